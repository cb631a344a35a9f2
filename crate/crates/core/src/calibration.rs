//! Choice of `Δτ` and the self-consistent `{Δτ, γ, s}` loop, plus the
//! failure-branch leakage analysis.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::hamiltonian::{HamiltonianOracle, RteBuilder};
use crate::linalg::{kron, operator_norm, CMatrix, CVector};
use crate::pite::{alpha_squared, approx_pite_circuit, derive_params, PiteParams};
use crate::qaa::{admissible_gamma, optimal_gamma};
use crate::state::QuantumState;
use crate::{Error, Result};

/// Largest `Δτ` with `s·Δτ·λ_max ≤ angle_cap` in floating point.
pub fn determine_dtau(s: f64, lambda_max: f64, angle_cap: f64) -> Result<f64> {
    if !(s > 0.0 && lambda_max > 0.0 && angle_cap > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "determine_dtau needs positive inputs, got s={s}, lambda_max={lambda_max}, cap={angle_cap}"
        )));
    }
    let mut dtau = angle_cap / (s * lambda_max);
    while s * dtau * lambda_max > angle_cap {
        dtau = dtau.next_down();
    }
    Ok(dtau)
}

/// Where `α² = P0/γ²` comes from.
#[derive(Clone, Copy)]
pub enum AlphaSource<'a> {
    /// `⟨ψ|e^{-2(H+E0)Δτ}|ψ⟩` from the eigen-oracle.
    Exact,
    /// Success probability of the first-order circuit, simulated.
    Circuit(&'a dyn RteBuilder),
}

impl AlphaSource<'_> {
    pub fn label(&self) -> &'static str {
        match self {
            AlphaSource::Exact => "exact",
            AlphaSource::Circuit(_) => "circuit",
        }
    }
}

/// `α` seen by step parameters `p` on input `psi`.
pub fn measured_alpha(
    source: AlphaSource<'_>,
    h: &HamiltonianOracle,
    psi: &QuantumState,
    p: &PiteParams,
) -> Result<f64> {
    let a2 = match source {
        AlphaSource::Exact => alpha_squared(psi, h, p.e0_shift, p.dtau)?,
        AlphaSource::Circuit(rte) => {
            let mut s = psi.with_ancillas(1)?;
            s.apply(&approx_pite_circuit(rte, p))?;
            s.marginal(psi.n_qubits(), false)? / (p.gamma * p.gamma)
        }
    };
    Ok(a2.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationOptions {
    pub m_target: usize,
    pub branch: u32,
    pub max_iter: usize,
    pub tolerance: f64,
    pub damping: f64,
    pub angle_cap: f64,
    /// Multiplier on the exact `max |λ + E0|` when `lambda_max` is unset.
    pub lambda_scale: f64,
    pub lambda_max: Option<f64>,
    pub dtau_ceiling: Option<f64>,
    /// Hold `Δτ` and solve for `γ` only.
    pub fixed_dtau: Option<f64>,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            m_target: 1,
            branch: 0,
            max_iter: 50,
            tolerance: 1e-6,
            damping: 0.5,
            angle_cap: FRAC_PI_4,
            lambda_scale: 1.2,
            lambda_max: None,
            dtau_ceiling: None,
            fixed_dtau: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub params: PiteParams,
    pub alpha: f64,
    pub m_star: usize,
    pub branch: u32,
    pub iterations: usize,
    pub converged: bool,
    pub lambda_max: f64,
    pub dtau_history: Vec<f64>,
    pub gamma_history: Vec<f64>,
}

struct Resolved {
    lambda_max: f64,
}

impl Resolved {
    fn dtau(&self, s: f64, opts: &CalibrationOptions) -> Result<f64> {
        if let Some(t) = opts.fixed_dtau {
            return Ok(t);
        }
        let free = if self.lambda_max > 0.0 {
            Some(determine_dtau(s, self.lambda_max, opts.angle_cap)?)
        } else {
            None
        };
        match (free, opts.dtau_ceiling) {
            (Some(t), Some(c)) => Ok(t.min(c)),
            (Some(t), None) => Ok(t),
            (None, Some(c)) => Ok(c),
            (None, None) => Err(Error::InvalidParameter(
                "spectrum radius is zero; set a fixed dtau or a ceiling".into(),
            )),
        }
    }
}

fn gamma_for(alpha: f64, opts: &CalibrationOptions) -> Result<(f64, usize, u32)> {
    match optimal_gamma(alpha, opts.m_target, opts.branch) {
        Ok(g) => Ok((g, opts.m_target, opts.branch)),
        Err(Error::InadmissibleGamma(g)) => {
            log::info!("gamma* = {g} inadmissible at m* = {}; searching", opts.m_target);
            admissible_gamma(alpha, opts.m_target)
        }
        Err(e) => Err(e),
    }
}

/// Fixed-point loop: `α(γ, Δτ) → γ* → s → Δτ`, until `Δτ` and `γ` settle.
///
/// When the `Δτ` update changes sign between iterations the step is damped.
pub fn calibrate(
    h: &HamiltonianOracle,
    psi: &QuantumState,
    e0_shift: f64,
    source: AlphaSource<'_>,
    opts: &CalibrationOptions,
) -> Result<CalibrationResult> {
    if psi.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits(),
            found: psi.n_qubits(),
        });
    }
    let resolved = Resolved {
        lambda_max: opts
            .lambda_max
            .unwrap_or(opts.lambda_scale * h.max_abs_eigenvalue(e0_shift)),
    };
    let (mut gamma, mut m_star, mut branch) = gamma_for(1.0, opts)?;
    let mut dtau = resolved.dtau(derive_params(gamma, 1.0, e0_shift)?.s, opts)?;
    let mut dtau_history = vec![dtau];
    let mut gamma_history = vec![gamma];
    let mut last_step = 0.0;
    let mut alpha = f64::NAN;
    for iter in 1..=opts.max_iter.max(1) {
        let p = derive_params(gamma, dtau, e0_shift)?;
        let a = measured_alpha(source, h, psi, &p)?;
        if !a.is_finite() {
            log::warn!("alpha diverged at dtau = {dtau}; the loop has no fixed point here");
            break;
        }
        alpha = a;
        let (g_new, m_new, b_new) = gamma_for(alpha, opts)?;
        let mut d_new = resolved.dtau(derive_params(g_new, 1.0, e0_shift)?.s, opts)?;
        let step = d_new - dtau;
        if step * last_step < 0.0 {
            d_new = dtau + opts.damping * step;
        }
        let converged = (d_new - dtau).abs() < opts.tolerance && (g_new - gamma).abs() < opts.tolerance;
        last_step = step;
        gamma = g_new;
        m_star = m_new;
        branch = b_new;
        dtau = d_new;
        dtau_history.push(dtau);
        gamma_history.push(gamma);
        if converged {
            return Ok(CalibrationResult {
                params: derive_params(gamma, dtau, e0_shift)?,
                alpha,
                m_star,
                branch,
                iterations: iter,
                converged: true,
                lambda_max: resolved.lambda_max,
                dtau_history,
                gamma_history,
            });
        }
    }
    log::warn!("calibration did not converge");
    Ok(CalibrationResult {
        params: derive_params(gamma, dtau, e0_shift)?,
        alpha,
        m_star,
        branch,
        iterations: dtau_history.len() - 1,
        converged: false,
        lambda_max: resolved.lambda_max,
        dtau_history,
        gamma_history,
    })
}

/// Outcome of running a second PITE step on a partly failed first step.
#[derive(Clone, Debug)]
pub struct LeakageReport {
    pub epsilon: f64,
    /// Normalized success branch after the second step.
    pub success_state: QuantumState,
    pub probability: f64,
    /// Fidelity of the success branch with normalized `M'M|ψ⟩`.
    pub ideal_overlap: f64,
    /// `‖√(1-M²) - √(1-γ²) e^{(H+E0)s²Δτ}‖` at `Δτ` and `Δτ/2`.
    pub backward_error: f64,
    pub backward_error_half: f64,
}

impl LeakageReport {
    pub fn backward_ratio(&self) -> f64 {
        self.backward_error / self.backward_error_half
    }
}

fn exact_block(h: &HamiltonianOracle, p: &PiteParams) -> (CMatrix, CMatrix) {
    let m = h.function(p.e0_shift, |l| Complex64::new(p.gamma * (-l * p.dtau).exp(), 0.0));
    let rest = h.function(p.e0_shift, |l| {
        let mu = p.gamma * (-l * p.dtau).exp();
        Complex64::new((1.0 - mu * mu).max(0.0).sqrt(), 0.0)
    });
    (m, rest)
}

fn backward_error(h: &HamiltonianOracle, p: &PiteParams) -> f64 {
    let (_, rest) = exact_block(h, p);
    let c = (1.0 - p.gamma * p.gamma).sqrt();
    let approx = h.function(p.e0_shift, |l| Complex64::new(c * (l * p.s * p.s * p.dtau).exp(), 0.0));
    operator_norm(&(rest - approx))
}

/// Starts from `√((1-ε)/a) M|ψ⟩|0⟩ + √(ε/(1-a)) √(1-M²)|ψ⟩|1⟩`, applies the
/// exact step-2 block `[[M', √(1-M'²)], [√(1-M'²), -M']]`, and keeps the
/// ancilla-0 branch.
pub fn failure_leakage_analysis(
    h: &HamiltonianOracle,
    psi: &QuantumState,
    p2: &PiteParams,
    p1: &PiteParams,
    epsilon: f64,
) -> Result<LeakageReport> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let (m1, r1) = exact_block(h, p1);
    let (m2, r2) = exact_block(h, p2);
    let v = psi.to_vector();
    let good = &m1 * &v;
    let bad = &r1 * &v;
    let a = good.norm_squared();
    let mut parts = Vec::new();
    if epsilon < 1.0 {
        parts.push(&m2 * &good * Complex64::new(((1.0 - epsilon) / a).sqrt(), 0.0));
    }
    if epsilon > 0.0 {
        parts.push(&r2 * &bad * Complex64::new((epsilon / (1.0 - a)).sqrt(), 0.0));
    }
    let branch: CVector = parts.into_iter().fold(CVector::zeros(v.len()), |acc, x| acc + x);
    let probability = branch.norm_squared();
    let success_state = QuantumState::from_unnormalized(branch.iter().copied().collect())?;
    let ideal = QuantumState::from_unnormalized((&m2 * &good).iter().copied().collect())?;
    let half = PiteParams {
        dtau: p2.dtau / 2.0,
        ..*p2
    };
    Ok(LeakageReport {
        epsilon,
        ideal_overlap: success_state.fidelity(&ideal)?,
        success_state,
        probability,
        backward_error: backward_error(h, p2),
        backward_error_half: backward_error(h, &half),
    })
}

/// `[[M, √(1-M²)], [√(1-M²), -M]]` with the ancilla on top; the exact PITE
/// unitary has this form.
pub fn reflection_block_unitary(h: &HamiltonianOracle, p: &PiteParams) -> CMatrix {
    let (m, r) = exact_block(h, p);
    let z = CMatrix::from_diagonal(&CVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]));
    let x = CMatrix::from_fn(2, 2, |r, c| Complex64::new(if r != c { 1.0 } else { 0.0 }, 0.0));
    kron(&z, &m) + kron(&x, &r)
}

/// `γ* = sin(π/(4m+2)) e^{(λ+E0)Δτ}` for an eigenstate, with `Δτ` tied to
/// `γ` through `s`; solved by bisection on `γ`.
pub fn eigenstate_fixed_point(lambda: f64, e0_shift: f64, m: usize, lambda_max: f64, cap: f64) -> Result<f64> {
    let target = (PI / (4 * m + 2) as f64).sin();
    let f = |g: f64| -> Result<f64> {
        let s = g / (1.0 - g * g).sqrt();
        let dtau = determine_dtau(s, lambda_max, cap)?;
        Ok(g * (-(lambda + e0_shift) * dtau).exp() - target)
    };
    let (mut lo, mut hi) = (1e-9, 1.0 - 1e-12);
    if f(lo)?.signum() == f(hi)?.signum() {
        return Err(Error::InvalidParameter("no fixed point in (0, 1)".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == f(lo)?.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
