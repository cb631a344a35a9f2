//! Amplitude amplification on the PITE success branch.
//!
//! The good state is the ancilla-`|0⟩` branch. With `φ = π` the oracle is
//! `S_χ = -Z_a` and `Q = -U S_0 U† S_χ` rotates by `2θ_a` per application.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::circuit::builders::build_zero_reflection;
use crate::circuit::{Circuit, Gate};
use crate::hamiltonian::RteBuilder;
use crate::pite::{
    d_one_block, d_two_block, pite_block, split_product, two_step_block, z_conjugated, PiteAngles, PiteParams,
    PiteVariant,
};
use crate::{Error, Result};

/// Distance from `1/√2` below which `γ*` counts as singular.
pub const SINGULAR_MARGIN: f64 = 1e-6;

fn is_pi(phi: f64) -> bool {
    (phi.cos() + 1.0).abs() < 1e-12
}

/// `X Phase(φ) X` on the ancilla of an `(n+1)`-qubit register.
pub fn oracle_s_chi(n_work: usize, phi: f64) -> Circuit {
    let a = n_work;
    let mut c = Circuit::new(n_work + 1);
    if phi != 0.0 {
        c.push(Gate::x(a)).push(Gate::phase(a, phi)).push(Gate::x(a));
    }
    c
}

/// `Q = -U S_0(φ₁) U† S_χ(φ₂)` for `u` on `n+1` qubits.
pub fn amplification_q(u: &Circuit, phi1: f64, phi2: f64) -> Result<Circuit> {
    let n1 = u.n_qubits();
    if n1 < 2 {
        return Err(Error::InvalidParameter(
            "need at least one working qubit and the ancilla".into(),
        ));
    }
    let mut c = oracle_s_chi(n1 - 1, phi2);
    c.extend(&u.inverse())
        .extend(&build_zero_reflection(n1, phi1)?)
        .extend(u)
        .push(Gate::global_phase(PI));
    Ok(c)
}

/// `Q̃ = S_0 (U_ref†⊗I) D (U_ref⊗I)` with `D = U_PITE† Z_a U_PITE`.
///
/// Only the `φ = ±π` pair reduces to this form.
pub fn pre_amplification(
    rte: &dyn RteBuilder,
    p: &PiteParams,
    u_ref: &Circuit,
    phi1: f64,
    phi2: f64,
) -> Result<Circuit> {
    if !is_pi(phi1) || !is_pi(phi2) {
        return Err(Error::InvalidParameter(format!(
            "pre-amplification needs phi = ±pi, got ({phi1}, {phi2})"
        )));
    }
    let n = rte.n_qubits();
    if u_ref.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u_ref.n_qubits(),
        });
    }
    let r = u_ref.widened(n + 1);
    let mut c = r.clone();
    c.extend(&d_one_block(rte, p.angles()))
        .extend(&r.inverse())
        .extend(&build_zero_reflection(n + 1, PI)?);
    Ok(c)
}

/// `sin((2m+1) asin a)`.
pub fn grover_amplitude(a: f64, m: usize) -> f64 {
    ((2 * m + 1) as f64 * a.clamp(-1.0, 1.0).asin()).sin()
}

/// `⌊(2n+1)π / (4 asin a)⌋`.
pub fn optimal_m(a: f64, branch: u32) -> Result<usize> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidParameter(format!("amplitude {a} outside (0, 1]")));
    }
    let x = (2 * branch + 1) as f64 * PI / (4.0 * a.asin());
    Ok(x.floor() as usize)
}

/// `γ* = sin((2n+1)π/(4m+2)) / α`.
pub fn optimal_gamma(alpha: f64, m_star: usize, branch: u32) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let g = ((2 * branch + 1) as f64 * PI / (4 * m_star + 2) as f64).sin() / alpha;
    if !(g > 0.0 && g < 1.0) || (g - FRAC_1_SQRT_2).abs() < SINGULAR_MARGIN {
        return Err(Error::InadmissibleGamma(g));
    }
    Ok(g)
}

/// Admissible `(γ*, m*, n)` with the smallest `m* ≥ m_min`, then smallest `n`.
pub fn admissible_gamma(alpha: f64, m_min: usize) -> Result<(f64, usize, u32)> {
    const SEARCH: usize = 256;
    for m in m_min..m_min + SEARCH {
        for branch in 0..=m as u32 {
            match optimal_gamma(alpha, m, branch) {
                Ok(g) => return Ok((g, m, branch)),
                Err(Error::InadmissibleGamma(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Err(Error::InvalidParameter(format!(
        "no admissible gamma for alpha = {alpha} with m* < {}",
        m_min + SEARCH
    )))
}

/// Continuous `m*` for a homogeneous state under an equally spaced spectrum
/// `ω(k + 1/2)` on `2^n` levels, in the small-amplitude limit.
pub fn worst_case_m_harmonic(n: u32, dtau_omega: f64, gamma: f64, branch: u32) -> f64 {
    let big_n = 2f64.powi(n as i32);
    let x = dtau_omega;
    let root = (2.0 * big_n * x.sinh() / (1.0 - (-2.0 * x * (big_n - 1.0)).exp())).sqrt();
    (2 * branch + 1) as f64 * PI / (4.0 * gamma) * root - 0.5
}

/// Repetition counts per step; the executable path fixes every phase to `π`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QaaSchedule {
    pub repetitions: Vec<usize>,
    pub phi: f64,
    pub branch: u32,
}

impl QaaSchedule {
    pub fn new(repetitions: Vec<usize>) -> Self {
        Self {
            repetitions,
            phi: PI,
            branch: 0,
        }
    }

    pub fn uniform(m: usize, steps: usize) -> Self {
        Self::new(vec![m; steps])
    }

    pub fn validate(&self) -> Result<()> {
        if !is_pi(self.phi) {
            return Err(Error::InvalidParameter(format!(
                "only phi = ±pi schedules are executable, got {}",
                self.phi
            )));
        }
        Ok(())
    }
}

/// Product `P_N ⋯ P_1` of first-order blocks as one block.
pub fn fused_pite_product(rte: &dyn RteBuilder, steps: &[PiteParams]) -> Circuit {
    let angles: Vec<PiteAngles> = steps.iter().map(|p| p.angles()).collect();
    if !rte.composes() {
        return split_product(rte, &angles);
    }
    match angles.len() {
        0 => Circuit::new(rte.n_qubits() + 1),
        n if n % 2 == 1 => pite_block(rte, PiteAngles::alternating_sum(&angles), PiteVariant::Fused),
        n => two_step_block(rte, angles[n - 1], PiteAngles::alternating_sum(&angles[..n - 1])),
    }
}

/// `(P_N ⋯ P_1)† Z_a (P_N ⋯ P_1)` from the fused forms.
pub fn fused_d_operator(rte: &dyn RteBuilder, steps: &[PiteParams]) -> Circuit {
    let angles: Vec<PiteAngles> = steps.iter().map(|p| p.angles()).collect();
    if !rte.composes() {
        return z_conjugated(&split_product(rte, &angles));
    }
    match angles.len() {
        0 => {
            let mut c = Circuit::new(rte.n_qubits() + 1);
            c.push(Gate::z(rte.n_qubits()));
            c
        }
        n if n % 2 == 1 => d_one_block(rte, PiteAngles::alternating_sum(&angles)),
        n => d_two_block(rte, angles[n - 1], PiteAngles::alternating_sum(&angles[..n - 1])),
    }
}

/// Incremental builder for the deterministic multi-step circuits:
/// `U_ref^{[k+1]} = (P_k ⋯ P_1)(U_ref⊗I) Q̃_1^{m_1} ⋯ Q̃_k^{m_k}` with
/// `Q̃_k = S_0 X_k† (U_ref†⊗I) D̃_k (U_ref⊗I) X_k`, `X_k = Q̃_1^{m_1} ⋯ Q̃_{k-1}^{m_{k-1}}`.
pub struct MultiStepBuilder<'a> {
    rte: &'a dyn RteBuilder,
    r: Circuit,
    s0: Circuit,
    // gate order: the last factor of X_k acts first
    x: Circuit,
    steps: Vec<PiteParams>,
}

impl<'a> MultiStepBuilder<'a> {
    pub fn new(rte: &'a dyn RteBuilder, u_ref0: &Circuit) -> Result<Self> {
        let n = rte.n_qubits();
        if u_ref0.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u_ref0.n_qubits(),
            });
        }
        Ok(Self {
            rte,
            r: u_ref0.widened(n + 1),
            s0: build_zero_reflection(n + 1, PI)?,
            x: Circuit::new(n + 1),
            steps: Vec::new(),
        })
    }

    pub fn steps(&self) -> &[PiteParams] {
        &self.steps
    }

    /// `U_PITE+ref^{[k]}` for a candidate step `p`, before amplification.
    pub fn pite_plus_ref(&self, p: &PiteParams) -> Circuit {
        let mut all = self.steps.clone();
        all.push(*p);
        let mut c = self.x.clone();
        c.extend(&self.r).extend(&fused_pite_product(self.rte, &all));
        c
    }

    /// Adds step `p` with `m` repetitions; returns `(Q̃_k, U_ref^{[k+1]})`.
    pub fn push(&mut self, p: PiteParams, m: usize) -> (Circuit, Circuit) {
        self.steps.push(p);
        let mut q = self.x.clone();
        q.extend(&self.r)
            .extend(&fused_d_operator(self.rte, &self.steps))
            .extend(&self.r.inverse())
            .extend(&self.x.inverse())
            .extend(&self.s0);
        let mut next = q.repeated(m);
        next.extend(&self.x);
        self.x = next;
        let mut reference = self.x.clone();
        reference
            .extend(&self.r)
            .extend(&fused_pite_product(self.rte, &self.steps));
        (q, reference)
    }
}

/// Circuits of a deterministic multi-step run.
#[derive(Clone, Debug)]
pub struct MultiStep {
    /// `Q̃_k` for each step.
    pub pre_amplifiers: Vec<Circuit>,
    /// `U_ref^{[k+1]}`: the state after `k` amplified steps, ancilla included.
    pub references: Vec<Circuit>,
}

pub fn multi_step_circuits(
    rte: &dyn RteBuilder,
    steps: &[PiteParams],
    schedule: &QaaSchedule,
    u_ref0: &Circuit,
) -> Result<MultiStep> {
    schedule.validate()?;
    if schedule.repetitions.len() < steps.len() {
        return Err(Error::InvalidParameter(format!(
            "{} steps but only {} repetition counts",
            steps.len(),
            schedule.repetitions.len()
        )));
    }
    let mut b = MultiStepBuilder::new(rte, u_ref0)?;
    let mut out = MultiStep {
        pre_amplifiers: Vec::with_capacity(steps.len()),
        references: Vec::with_capacity(steps.len()),
    };
    for (p, &m) in steps.iter().zip(&schedule.repetitions) {
        let (q, r) = b.push(*p, m);
        out.pre_amplifiers.push(q);
        out.references.push(r);
    }
    Ok(out)
}

/// `U_ref^{[N+1]}` after all `steps`.
pub fn multi_step_reference(
    rte: &dyn RteBuilder,
    steps: &[PiteParams],
    schedule: &QaaSchedule,
    u_ref0: &Circuit,
) -> Result<Circuit> {
    let ms = multi_step_circuits(rte, steps, schedule, u_ref0)?;
    Ok(ms
        .references
        .last()
        .cloned()
        .unwrap_or_else(|| u_ref0.widened(u_ref0.n_qubits() + 1)))
}

/// Gate-operation counts of the building blocks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostModel {
    pub c_s0: u64,
    pub c_pite: u64,
    pub c_ref: u64,
    pub repetitions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostPrediction {
    /// `c_S0 + 2c_PITE + 2c_ref`.
    pub c_q: u64,
    /// `c_Q̃_k` per step.
    pub c_q_tilde: Vec<u64>,
    /// `c_U^{[k+1]}` per step: the circuit leaving step `k` amplified.
    pub c_reference: Vec<u64>,
}

/// `c_Q̃_k = (c_S0 + c_PITE + 2c_ref) Π_{j<k} (1 + 2m_j)` and
/// `c_U^{[k+1]} = c_PITE + c_ref + Σ_{j≤k} m_j c_Q̃_j`.
pub fn cost_model(cm: &CostModel, n_steps: usize) -> CostPrediction {
    let base = cm.c_s0 + cm.c_pite + 2 * cm.c_ref;
    let m = |k: usize| cm.repetitions.get(k).copied().unwrap_or(0) as u64;
    let mut c_q_tilde = Vec::with_capacity(n_steps);
    let mut c_reference = Vec::with_capacity(n_steps);
    let mut mult = 1u64;
    let mut acc = cm.c_pite + cm.c_ref;
    for k in 0..n_steps {
        let q = base * mult;
        c_q_tilde.push(q);
        acc += m(k) * q;
        c_reference.push(acc);
        mult *= 1 + 2 * m(k);
    }
    CostPrediction {
        c_q: cm.c_s0 + 2 * cm.c_pite + 2 * cm.c_ref,
        c_q_tilde,
        c_reference,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grover_closed_forms() {
        assert!((grover_amplitude(1.0, 3).abs() - 1.0).abs() < 1e-12);
        assert!((grover_amplitude(0.5, 1) - 1.0).abs() < 1e-12);
        assert!((grover_amplitude(0.5, 2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn optimal_m_values() {
        assert_eq!(optimal_m(1.0, 0).unwrap(), 0);
        assert_eq!(optimal_m(0.5, 0).unwrap(), 1);
        assert_eq!(optimal_m(0.01, 0).unwrap(), 78);
        assert!(optimal_m(0.0, 0).is_err());
    }

    #[test]
    fn optimal_gamma_values() {
        assert!((optimal_gamma(1.0, 1, 0).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(optimal_gamma(0.3, 1, 0), Err(Error::InadmissibleGamma(_))));
        // sin(π/6)/α = 1/√2 exactly
        assert!(matches!(
            optimal_gamma(0.5 / FRAC_1_SQRT_2, 1, 0),
            Err(Error::InadmissibleGamma(_))
        ));
    }

    #[test]
    fn admissible_search_raises_m_first() {
        let (g, m, b) = admissible_gamma(0.3, 1).unwrap();
        // sin(π/10)/0.3 > 1, so m* = 3
        assert_eq!((m, b), (3, 0));
        assert!((g - (PI / 14.0).sin() / 0.3).abs() < 1e-12);
    }

    #[test]
    fn worst_case_estimate() {
        let m = worst_case_m_harmonic(6, 0.2, 1.0, 0);
        assert!((m - 3.487).abs() < 2e-3, "{m}");
    }

    #[test]
    fn cost_model_recursion() {
        let cm = CostModel {
            c_s0: 10,
            c_pite: 20,
            c_ref: 5,
            repetitions: vec![1; 4],
        };
        let p = cost_model(&cm, 4);
        assert_eq!(p.c_q_tilde[0], 40);
        assert_eq!(p.c_q_tilde[3], 27 * 40);
        assert_eq!(p.c_q, 10 + 40 + 10);
        let flat = cost_model(
            &CostModel {
                repetitions: vec![0; 4],
                ..cm
            },
            4,
        );
        assert!(flat.c_q_tilde.iter().all(|&c| c == 40));
        assert!(flat.c_reference.iter().all(|&c| c == 25));
    }

    #[test]
    fn oracle_is_ancilla_phase() {
        let u = oracle_s_chi(1, PI).unitary();
        assert!((u[(0, 0)].re + 1.0).abs() < 1e-12);
        assert!((u[(1, 1)].re + 1.0).abs() < 1e-12);
        assert!((u[(2, 2)].re - 1.0).abs() < 1e-12);
        assert!(oracle_s_chi(2, 0.0).is_empty());
    }
}
