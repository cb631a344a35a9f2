use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pite_core::calibration::{calibrate, AlphaSource, CalibrationOptions};
use pite_core::experiment::{
    parse_shift, run, run_cost_sweep, write_csv, write_csv_to, write_manifest, AlphaChoice, ExperimentConfig,
    HamiltonianKind, Mode, Problem,
};
use pite_core::hamiltonian::{GridSpec, WeightedGraph};

#[derive(Parser)]
#[command(
    name = "pite",
    version,
    about = "Imaginary-time evolution with amplitude amplification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Max-cut ground-state search on a weighted graph.
    Maxcut {
        /// Edge list, one `i j w` per line; the 4-vertex instance when omitted.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Harmonic oscillator on a position grid.
    Harmonic {
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long)]
        box_length: Option<f64>,
        #[arg(long)]
        trotter_slices: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Transpiled costs of Q, Q̃, S_0 and the PITE block over a size range.
    Cost {
        #[arg(long, value_enum, default_value = "maxcut")]
        kind: KindArg,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the γ*/Δτ fixed-point loop on the initial state and prints JSON.
    Calibrate {
        #[arg(long, value_enum, default_value = "maxcut")]
        kind: KindArg,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        qubits: usize,
        #[arg(long)]
        shift: Option<String>,
        #[arg(long, value_enum, default_value = "circuit")]
        alpha: AlphaArg,
        /// Hold Δτ fixed; the full loop also adapts Δτ when omitted.
        #[arg(long)]
        dtau: Option<f64>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, conflicts_with = "auto_gamma")]
    gamma: Option<f64>,
    #[arg(long)]
    auto_gamma: bool,
    #[arg(long, conflicts_with = "auto_dtau")]
    dtau: Option<f64>,
    #[arg(long)]
    auto_dtau: bool,
    #[arg(long)]
    steps: Option<usize>,
    /// Comma-separated repetitions per step, e.g. `1,1,2`.
    #[arg(long, value_delimiter = ',')]
    m_schedule: Vec<usize>,
    /// `centered`, `ground` or a number.
    #[arg(long)]
    shift: Option<String>,
    #[arg(long, value_enum)]
    alpha: Option<AlphaArg>,
    /// CSV output; the manifest goes next to it with a `.json` extension.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Maxcut,
    Harmonic,
}

impl From<KindArg> for HamiltonianKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Maxcut => HamiltonianKind::Maxcut,
            KindArg::Harmonic => HamiltonianKind::Harmonic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Pite,
    PiteQaa,
    Multistep,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Pite => Mode::Pite,
            ModeArg::PiteQaa => Mode::PiteQaa,
            ModeArg::Multistep => Mode::Multistep,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlphaArg {
    Circuit,
    Exact,
}

impl From<AlphaArg> for AlphaChoice {
    fn from(a: AlphaArg) -> Self {
        match a {
            AlphaArg::Circuit => AlphaChoice::Circuit,
            AlphaArg::Exact => AlphaChoice::Exact,
        }
    }
}

impl RunArgs {
    fn base_config(&self, kind: HamiltonianKind) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let c = ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?;
                if c.kind != kind {
                    bail!("config file is for {:?}, not {:?}", c.kind, kind);
                }
                c
            }
            None => ExperimentConfig::new(kind, self.mode.map(Mode::from).unwrap_or(Mode::PiteQaa)),
        };
        if let Some(m) = self.mode {
            cfg.mode = m.into();
        }
        if self.gamma.is_some() || self.auto_gamma {
            cfg.gamma = self.gamma;
            cfg.auto_gamma = self.auto_gamma;
        }
        if self.dtau.is_some() || self.auto_dtau {
            cfg.dtau = self.dtau;
            cfg.auto_dtau = self.auto_dtau;
        }
        if let Some(s) = self.steps {
            cfg.steps = s;
        }
        if !self.m_schedule.is_empty() {
            cfg.m_schedule = self.m_schedule.clone();
        }
        if let Some(s) = &self.shift {
            cfg.shift = Some(parse_shift(s)?);
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a.into();
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        Ok(cfg)
    }
}

fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn run_experiment(cfg: ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    log::info!("running {:?} in {} mode for {} steps", cfg.kind, cfg.mode, cfg.steps);
    let result = run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            write_csv(path, &result.records).with_context(|| format!("writing {}", path.display()))?;
            write_manifest(&manifest_path(path), &result.manifest)?;
            if let Some(last) = result.records.last() {
                eprintln!(
                    "{} steps, final fidelity {:.6}, P_k {:.6}, cnot {}",
                    last.step, last.fidelity, last.big_p, last.cnot
                );
            }
        }
        None => write_csv_to(std::io::stdout().lock(), &result.records)?,
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Maxcut { graph, run } => {
            let mut cfg = run.base_config(HamiltonianKind::Maxcut)?;
            if graph.is_some() {
                cfg.graph = graph;
            }
            run_experiment(cfg)
        }
        Command::Harmonic {
            qubits,
            box_length,
            trotter_slices,
            run,
        } => {
            let mut cfg = run.base_config(HamiltonianKind::Harmonic)?;
            cfg.qubits = qubits.unwrap_or(cfg.qubits);
            cfg.box_length = box_length.unwrap_or(cfg.box_length);
            cfg.trotter_slices = trotter_slices.unwrap_or(cfg.trotter_slices);
            run_experiment(cfg)
        }
        Command::Cost {
            kind,
            n_min,
            n_max,
            out,
        } => {
            if n_min > n_max {
                bail!("n-min {n_min} exceeds n-max {n_max}");
            }
            let rows = run_cost_sweep(kind.into(), n_min..=n_max)?;
            match out {
                Some(path) => write_csv(&path, &rows)?,
                None => write_csv_to(std::io::stdout().lock(), &rows)?,
            }
            Ok(())
        }
        Command::Calibrate {
            kind,
            graph,
            qubits,
            shift,
            alpha,
            dtau,
            m,
            max_iter,
        } => {
            let kind: HamiltonianKind = kind.into();
            let problem = match kind {
                HamiltonianKind::Maxcut => Problem::maxcut(match graph {
                    Some(p) => WeightedGraph::from_file(&p, None)?,
                    None => WeightedGraph::benchmark(),
                })?,
                HamiltonianKind::Harmonic => Problem::harmonic(GridSpec::standard(qubits), 1)?,
            };
            let mut cfg = ExperimentConfig::new(kind, Mode::PiteQaa);
            if let Some(s) = &shift {
                cfg.shift = Some(parse_shift(s)?);
            }
            let e0 = problem.oracle.shift_for(cfg.shift_rule());
            let source = match AlphaChoice::from(alpha) {
                AlphaChoice::Circuit => AlphaSource::Circuit(problem.rte.as_ref()),
                AlphaChoice::Exact => AlphaSource::Exact,
            };
            let opts = CalibrationOptions {
                m_target: m,
                max_iter,
                fixed_dtau: dtau,
                ..Default::default()
            };
            let psi = problem.initial_state()?;
            let res = calibrate(&problem.oracle, &psi, e0, source, &opts)?;
            println!("{}", serde_json::to_string_pretty(&res)?);
            if !res.converged {
                bail!("calibration did not converge in {} iterations", res.iterations);
            }
            Ok(())
        }
    }
}
