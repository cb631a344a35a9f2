use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::hamiltonian::ShiftRule;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianKind {
    Maxcut,
    Harmonic,
}

/// How each imaginary-time step is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// First-order PITE with post-selection after every step.
    Pite,
    /// PITE followed by `m` pre-amplification rounds on the step input.
    PiteQaa,
    /// Measurement-free chain of amplified steps.
    Multistep,
}

impl Mode {
    pub fn amplified(self) -> bool {
        !matches!(self, Mode::Pite)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Pite => "pite",
            Mode::PiteQaa => "pite-qaa",
            Mode::Multistep => "multistep",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pite" | "pite-only" => Ok(Mode::Pite),
            "pite-qaa" | "qaa" => Ok(Mode::PiteQaa),
            "multistep" | "deterministic-multistep" => Ok(Mode::Multistep),
            _ => Err(Error::Config(format!("unknown mode '{s}'"))),
        }
    }
}

/// Where the calibration loop reads `α` from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaChoice {
    /// Success probability of the first-order circuit.
    #[default]
    Circuit,
    /// Exact `e^{-2HΔτ}` expectation.
    Exact,
}

/// Shift as written in a config file: `"centered"`, `"ground"` or a number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ShiftField {
    Value(f64),
    Named(String),
}

pub fn parse_shift(s: &str) -> Result<ShiftRule> {
    match s {
        "centered" => Ok(ShiftRule::Centered),
        "ground" | "ground-at-zero" => Ok(ShiftRule::GroundAtZero),
        _ => s
            .parse::<f64>()
            .map(ShiftRule::Fixed)
            .map_err(|_| Error::Config(format!("unknown shift '{s}'"))),
    }
}

/// One experiment run. `None` fields take the per-kind, per-mode defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: HamiltonianKind,
    /// Edge list for max-cut; the built-in 4-vertex instance when unset.
    pub graph: Option<PathBuf>,
    /// Grid qubits for the harmonic oscillator.
    pub qubits: usize,
    pub box_length: f64,
    pub mass: f64,
    pub omega: f64,
    pub trotter_slices: usize,
    pub mode: Mode,
    pub gamma: Option<f64>,
    pub auto_gamma: bool,
    pub dtau: Option<f64>,
    pub auto_dtau: bool,
    pub steps: usize,
    /// Repetitions per step; one entry applies to every step.
    pub m_schedule: Vec<usize>,
    pub shift: Option<ShiftRule>,
    pub alpha: AlphaChoice,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: HamiltonianKind, mode: Mode) -> Self {
        Self {
            kind,
            graph: None,
            qubits: 6,
            box_length: 14.0,
            mass: 1.0,
            omega: 1.0,
            trotter_slices: 1,
            mode,
            gamma: None,
            auto_gamma: false,
            dtau: None,
            auto_dtau: false,
            // long enough to pass 0.99 fidelity, short enough that the
            // first-order filter has not started to heat up the grid modes
            steps: match (kind, mode) {
                (HamiltonianKind::Maxcut, Mode::Pite) => 80,
                (HamiltonianKind::Maxcut, Mode::PiteQaa) => 12,
                (HamiltonianKind::Maxcut, Mode::Multistep) => 4,
                (HamiltonianKind::Harmonic, Mode::Pite) => 11,
                (HamiltonianKind::Harmonic, Mode::PiteQaa) => 24,
                (HamiltonianKind::Harmonic, Mode::Multistep) => 6,
            },
            m_schedule: Vec::new(),
            shift: None,
            alpha: AlphaChoice::Circuit,
            out: None,
        }
    }

    /// Parses a TOML file; keys mirror the field names.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.into_config()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.steps == 0 {
            return bad("steps must be at least 1");
        }
        if self.gamma.is_some() && self.auto_gamma {
            return bad("gamma and auto-gamma are mutually exclusive");
        }
        if self.dtau.is_some() && self.auto_dtau {
            return bad("dtau and auto-dtau are mutually exclusive");
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::GammaOutOfRange(g));
            }
        }
        if let Some(t) = self.dtau {
            if !(t > 0.0 && t.is_finite()) {
                return bad("dtau must be positive");
            }
        }
        match self.mode {
            Mode::Pite => {
                if self.auto_gamma {
                    return bad("auto-gamma needs an amplified mode");
                }
                if !self.m_schedule.is_empty() {
                    return bad("an m schedule needs an amplified mode");
                }
            }
            Mode::PiteQaa | Mode::Multistep => {
                if self.m_schedule.len() > 1 && self.m_schedule.len() < self.steps {
                    return bad("m schedule is shorter than the step count");
                }
            }
        }
        match self.kind {
            HamiltonianKind::Maxcut => {}
            HamiltonianKind::Harmonic => {
                if self.graph.is_some() {
                    return bad("a graph file only applies to max-cut");
                }
                if self.qubits < 3 {
                    return bad("the harmonic grid needs at least 3 qubits");
                }
                if self.trotter_slices == 0 {
                    return bad("trotter-slices must be at least 1");
                }
            }
        }
        Ok(())
    }

    /// `m` requested for step `k` (0-based), if any.
    pub fn m_for(&self, k: usize) -> Option<usize> {
        match self.m_schedule.len() {
            0 => None,
            1 => Some(self.m_schedule[0]),
            _ => self.m_schedule.get(k).copied(),
        }
    }

    pub fn shift_rule(&self) -> ShiftRule {
        self.shift.unwrap_or(match self.kind {
            HamiltonianKind::Maxcut => ShiftRule::Centered,
            HamiltonianKind::Harmonic => ShiftRule::GroundAtZero,
        })
    }

    /// `γ` for PITE-only runs, and for amplified runs when not auto.
    pub fn fixed_gamma(&self) -> Option<f64> {
        match (self.mode, self.gamma) {
            (_, Some(g)) => Some(g),
            (Mode::Pite, None) => Some(0.8),
            _ => None,
        }
    }

    /// `Δτ` unless it is derived from the spectrum bound.
    pub fn default_dtau(&self) -> Option<f64> {
        if self.auto_dtau {
            return None;
        }
        if let Some(t) = self.dtau {
            return Some(t);
        }
        match (self.kind, self.mode) {
            (HamiltonianKind::Maxcut, Mode::Pite) => match self.fixed_gamma() {
                Some(0.4) => Some(0.75),
                Some(0.8) => Some(0.25),
                _ => None,
            },
            (HamiltonianKind::Maxcut, _) => Some(0.63),
            (HamiltonianKind::Harmonic, Mode::Pite) => Some(0.20),
            (HamiltonianKind::Harmonic, Mode::PiteQaa) => Some(0.16),
            (HamiltonianKind::Harmonic, Mode::Multistep) => Some(0.14),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct RawConfig {
    kind: HamiltonianKind,
    mode: Mode,
    graph: Option<PathBuf>,
    qubits: Option<usize>,
    box_length: Option<f64>,
    mass: Option<f64>,
    omega: Option<f64>,
    trotter_slices: Option<usize>,
    gamma: Option<f64>,
    #[serde(default)]
    auto_gamma: bool,
    dtau: Option<f64>,
    #[serde(default)]
    auto_dtau: bool,
    steps: Option<usize>,
    #[serde(default)]
    m_schedule: Vec<usize>,
    shift: Option<ShiftField>,
    alpha: Option<AlphaChoice>,
    out: Option<PathBuf>,
}

impl RawConfig {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::new(self.kind, self.mode);
        c.graph = self.graph;
        c.qubits = self.qubits.unwrap_or(c.qubits);
        c.box_length = self.box_length.unwrap_or(c.box_length);
        c.mass = self.mass.unwrap_or(c.mass);
        c.omega = self.omega.unwrap_or(c.omega);
        c.trotter_slices = self.trotter_slices.unwrap_or(c.trotter_slices);
        c.gamma = self.gamma;
        c.auto_gamma = self.auto_gamma;
        c.dtau = self.dtau;
        c.auto_dtau = self.auto_dtau;
        c.steps = self.steps.unwrap_or(c.steps);
        c.m_schedule = self.m_schedule;
        c.shift = match self.shift {
            None => None,
            Some(ShiftField::Value(x)) => Some(ShiftRule::Fixed(x)),
            Some(ShiftField::Named(s)) => Some(parse_shift(&s)?),
        };
        c.alpha = self.alpha.unwrap_or_default();
        c.out = self.out;
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_of_defaults() {
        let c = ExperimentConfig::from_toml(
            r#"
            kind = "harmonic"
            mode = "pite-qaa"
            qubits = 5
            shift = "ground"
            m-schedule = [1]
            "#,
        )
        .unwrap();
        assert_eq!(c.qubits, 5);
        assert_eq!(c.shift_rule(), ShiftRule::GroundAtZero);
        assert_eq!(c.default_dtau(), Some(0.16));
        assert_eq!(c.m_for(4), Some(1));
        assert_eq!(c.fixed_gamma(), None);
    }

    #[test]
    fn numeric_shift_and_conflicts() {
        let c = ExperimentConfig::from_toml("kind = \"maxcut\"\nmode = \"pite\"\nshift = 1.5\ngamma = 0.4").unwrap();
        assert_eq!(c.shift_rule(), ShiftRule::Fixed(1.5));
        assert_eq!(c.default_dtau(), Some(0.75));
        for bad in [
            "kind = \"maxcut\"\nmode = \"pite\"\nauto-gamma = true",
            "kind = \"maxcut\"\nmode = \"pite\"\nm-schedule = [1]",
            "kind = \"maxcut\"\nmode = \"pite-qaa\"\ndtau = 0.1\nauto-dtau = true",
            "kind = \"maxcut\"\nmode = \"multistep\"\nsteps = 0",
            "kind = \"harmonic\"\nmode = \"pite\"\ngraph = \"g.txt\"",
            "kind = \"maxcut\"\nmode = \"pite\"\nbogus = 1",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml(bad), Err(Error::Config(_))),
                "{bad}"
            );
        }
    }
}
