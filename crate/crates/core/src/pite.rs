//! Probabilistic imaginary-time evolution.
//!
//! Every block acts on `n` working qubits plus the ancilla at index `n`, and has
//! the form `W† e^{iAZ} W H` with `A` a function of the Hamiltonian. The ancilla
//! `|0⟩→|0⟩` block is then `cos(A - π/4)`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Circuit, Control, Gate, GateKind};
use crate::hamiltonian::{HamiltonianOracle, RteBuilder};
use crate::linalg::{kron, spectral_function, CMatrix};
use crate::state::QuantumState;
use crate::{Error, Result};

/// Slack on `‖M‖ ≤ 1` before the exact block encoding is refused.
pub const CONTRACTION_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PiteParams {
    pub gamma: f64,
    pub dtau: f64,
    pub e0_shift: f64,
    pub s: f64,
    pub theta: f64,
    pub kappa: i8,
}

pub fn derive_params(gamma: f64, dtau: f64, e0_shift: f64) -> Result<PiteParams> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    if (gamma - FRAC_1_SQRT_2).abs() < 1e-12 {
        return Err(Error::GammaSingular);
    }
    if dtau.is_nan() || dtau <= 0.0 || !dtau.is_finite() {
        return Err(Error::InvalidParameter(format!("dtau must be positive, got {dtau}")));
    }
    let c = (1.0 - gamma * gamma).sqrt();
    let kappa: i8 = if gamma > FRAC_1_SQRT_2 { 1 } else { -1 };
    let arg = ((gamma + c) * FRAC_1_SQRT_2).min(1.0);
    Ok(PiteParams {
        gamma,
        dtau,
        e0_shift,
        s: gamma / c,
        theta: f64::from(kappa) * arg.acos(),
        kappa,
    })
}

impl PiteParams {
    /// Real-time step `sΔτ` of the first-order circuit.
    pub fn rte_time(&self) -> f64 {
        self.s * self.dtau
    }

    /// Generator of the first-order block with the energy shift folded in.
    pub fn angles(&self) -> PiteAngles {
        PiteAngles {
            theta: self.theta - self.rte_time() * self.e0_shift,
            time: self.rte_time(),
        }
    }
}

/// `A = θ - t·H` for a first-order block on the unshifted Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PiteAngles {
    pub theta: f64,
    pub time: f64,
}

impl PiteAngles {
    /// `Σ_k (-1)^{k+1} a_k` over `steps` in application order (first has `+`).
    pub fn alternating_sum(steps: &[PiteAngles]) -> PiteAngles {
        steps
            .iter()
            .enumerate()
            .fold(PiteAngles { theta: 0.0, time: 0.0 }, |acc, (k, a)| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                PiteAngles {
                    theta: acc.theta + sign * a.theta,
                    time: acc.time + sign * a.time,
                }
            })
    }
}

/// Circuit layouts for the first-order block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PiteVariant {
    /// Open-controlled `U(t)` and controlled `U†(t)`.
    Split,
    /// Uncontrolled `U(t)` then controlled `U†(2t)`.
    Fused,
}

fn ancilla_prefix(c: &mut Circuit, a: usize) {
    c.push(Gate::h(a)).push(Gate::w(a));
}

/// `U(t)` on every branch, then `U(-2t)` on the ancilla-1 branch. The second
/// block is built as the inverse of `U(2t)` so the gate order mirrors the
/// first and the CNOTs meeting at the boundary cancel after lowering.
fn push_branch_evolution(c: &mut Circuit, rte: &dyn RteBuilder, t: f64, a: usize) {
    if t == 0.0 {
        return;
    }
    let n = rte.n_qubits();
    c.extend(&rte.rte(t).widened(n + 1));
    c.push(rte.rte(2.0 * t).inverse().controlled(Control::pos(a)));
}

/// `W† e^{iAZ} W H` with `A = θ - tH`.
pub fn pite_block(rte: &dyn RteBuilder, a: PiteAngles, variant: PiteVariant) -> Circuit {
    let n = rte.n_qubits();
    let anc = n;
    let mut c = Circuit::new(n + 1);
    ancilla_prefix(&mut c, anc);
    let variant = if rte.composes() { variant } else { PiteVariant::Split };
    match variant {
        PiteVariant::Fused => push_branch_evolution(&mut c, rte, a.time, anc),
        PiteVariant::Split => {
            c.push(rte.rte(a.time).controlled(Control::neg(anc)));
            c.push(rte.rte(a.time).inverse().controlled(Control::pos(anc)));
        }
    }
    c.push(Gate::rz(anc, -2.0 * a.theta)).push(Gate::wdg(anc));
    c
}

/// First-order PITE circuit, fused layout.
pub fn approx_pite_circuit(rte: &dyn RteBuilder, p: &PiteParams) -> Circuit {
    pite_block(rte, p.angles(), PiteVariant::Fused)
}

pub fn approx_pite_circuit_variant(rte: &dyn RteBuilder, p: &PiteParams, variant: PiteVariant) -> Circuit {
    pite_block(rte, p.angles(), variant)
}

/// Product `U(a2)·U(a1)` as one block:
/// `W† X Rz(2(θ2-θ1) - π/2) (U†(T)⊗|0⟩⟨0| + U(T)⊗|1⟩⟨1|) W H`, `T = t2 - t1`.
pub fn two_step_block(rte: &dyn RteBuilder, a2: PiteAngles, a1: PiteAngles) -> Circuit {
    let n = rte.n_qubits();
    let anc = n;
    let mut c = Circuit::new(n + 1);
    if a2 == a1 {
        return c;
    }
    if !rte.composes() {
        return split_product(rte, &[a1, a2]);
    }
    ancilla_prefix(&mut c, anc);
    push_branch_evolution(&mut c, rte, -(a2.time - a1.time), anc);
    c.push(Gate::rz(anc, 2.0 * (a2.theta - a1.theta) - FRAC_PI_2))
        .push(Gate::x(anc))
        .push(Gate::wdg(anc));
    c
}

pub fn two_step_circuit(p2: &PiteParams, p1: &PiteParams, rte: &dyn RteBuilder) -> Circuit {
    two_step_block(rte, p2.angles(), p1.angles())
}

/// `D = U† Z_a U` for the first-order block:
/// `H W† X Rz(-4θ) (U(2t)⊗|0⟩⟨0| + U†(2t)⊗|1⟩⟨1|) W H`.
pub fn d_one_block(rte: &dyn RteBuilder, a: PiteAngles) -> Circuit {
    let n = rte.n_qubits();
    let anc = n;
    if !rte.composes() {
        return z_conjugated(&split_product(rte, &[a]));
    }
    let mut c = Circuit::new(n + 1);
    ancilla_prefix(&mut c, anc);
    push_branch_evolution(&mut c, rte, 2.0 * a.time, anc);
    c.push(Gate::rz(anc, -4.0 * a.theta))
        .push(Gate::x(anc))
        .push(Gate::wdg(anc))
        .push(Gate::h(anc));
    c
}

/// `D_two = U_two† Z_a U_two`:
/// `H W† Y Rz(4(θ2-θ1)) (U†(2T)⊗|0⟩⟨0| + U(2T)⊗|1⟩⟨1|) W H`.
pub fn d_two_block(rte: &dyn RteBuilder, a2: PiteAngles, a1: PiteAngles) -> Circuit {
    let n = rte.n_qubits();
    let anc = n;
    if !rte.composes() {
        return z_conjugated(&split_product(rte, &[a1, a2]));
    }
    let mut c = Circuit::new(n + 1);
    ancilla_prefix(&mut c, anc);
    push_branch_evolution(&mut c, rte, -2.0 * (a2.time - a1.time), anc);
    c.push(Gate::rz(anc, 4.0 * (a2.theta - a1.theta)))
        .push(Gate::y(anc))
        .push(Gate::wdg(anc))
        .push(Gate::h(anc));
    c
}

/// Split-layout blocks applied in order, first element first.
pub fn split_product(rte: &dyn RteBuilder, steps: &[PiteAngles]) -> Circuit {
    let mut c = Circuit::new(rte.n_qubits() + 1);
    for &a in steps {
        c.extend(&pite_block(rte, a, PiteVariant::Split));
    }
    c
}

/// `U† Z_a U` for a circuit `u` on `n + 1` qubits, ancilla last.
pub fn z_conjugated(u: &Circuit) -> Circuit {
    let mut c = u.clone();
    c.push(Gate::z(u.n_qubits() - 1));
    c.extend(&u.inverse());
    c
}

pub fn d_one_circuit(rte: &dyn RteBuilder, p: &PiteParams) -> Circuit {
    d_one_block(rte, p.angles())
}

pub fn d_two_circuit(p2: &PiteParams, p1: &PiteParams, rte: &dyn RteBuilder) -> Circuit {
    d_two_block(rte, p2.angles(), p1.angles())
}

fn ancilla_1q(kind: GateKind) -> CMatrix {
    let m = kind.matrix_1q().expect("single-qubit kind");
    CMatrix::from_fn(2, 2, |r, c| m[r][c])
}

/// Dense `(n+1)`-qubit unitary with ancilla-00 block `M = γ e^{-(H+E0)Δτ}`.
///
/// Built per eigenvalue `μ` of `M` with `A = asin(μ) - π/4`, which picks the
/// sign branch eigenvalue by eigenvalue.
pub fn exact_pite_unitary(h: &HamiltonianOracle, p: &PiteParams) -> Result<CMatrix> {
    let mu: Vec<f64> = h
        .eigenvalues()
        .iter()
        .map(|&l| p.gamma * (-(l + p.e0_shift) * p.dtau).exp())
        .collect();
    let norm = mu.iter().cloned().fold(0.0, f64::max);
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction(norm));
    }
    let below = mu.iter().any(|&m| m < FRAC_1_SQRT_2);
    let above = mu.iter().any(|&m| m > FRAC_1_SQRT_2);
    if below && above {
        log::warn!("spectrum of M straddles 1/sqrt(2); the sign of (M - 1/sqrt(2)) is taken per eigenvalue");
    }
    let dim = h.dim();
    let vecs = h.eigenvectors();
    let angle: Vec<f64> = mu.iter().map(|&m| m.min(1.0).asin() - FRAC_PI_4).collect();
    let phase = |sign: f64| {
        let mut scaled = vecs.clone();
        for (k, &a) in angle.iter().enumerate() {
            let f = Complex64::from_polar(1.0, sign * a);
            scaled.column_mut(k).iter_mut().for_each(|x| *x *= f);
        }
        scaled * vecs.adjoint()
    };
    let mut mid = CMatrix::zeros(2 * dim, 2 * dim);
    mid.view_mut((0, 0), (dim, dim)).copy_from(&phase(1.0));
    mid.view_mut((dim, dim), (dim, dim)).copy_from(&phase(-1.0));
    let eye = CMatrix::identity(dim, dim);
    let pre = kron(&(ancilla_1q(GateKind::W) * ancilla_1q(GateKind::H)), &eye);
    let post = kron(&ancilla_1q(GateKind::Wdg), &eye);
    Ok(post * mid * pre)
}

/// `P0 = γ²α²` with `α² = ⟨ψ|e^{-2(H+E0)Δτ}|ψ⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuccessProbability {
    pub p0: f64,
    pub alpha_sq: f64,
}

pub fn alpha_squared(psi: &QuantumState, h: &HamiltonianOracle, e0_shift: f64, dtau: f64) -> Result<f64> {
    let m2 = spectral_function(h.eigenvalues(), h.eigenvectors(), |l| {
        Complex64::new((-2.0 * (l + e0_shift) * dtau).exp(), 0.0)
    });
    psi.expectation(&m2)
}

pub fn success_probability(psi: &QuantumState, h: &HamiltonianOracle, p: &PiteParams) -> Result<SuccessProbability> {
    let alpha_sq = alpha_squared(psi, h, p.e0_shift, p.dtau)?;
    Ok(SuccessProbability {
        p0: p.gamma * p.gamma * alpha_sq,
        alpha_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_closed_forms() {
        let p = derive_params(0.8, 0.1, 0.0).unwrap();
        assert!((p.s - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.kappa, 1);
        assert!((p.theta - (0.8f64.asin() - FRAC_PI_4)).abs() < 1e-12);
        let q = derive_params(0.4, 0.1, 0.0).unwrap();
        assert!((q.s - 0.436_435_780_471_984_8).abs() < 1e-12);
        assert_eq!(q.kappa, -1);
        assert!((q.theta - (0.4f64.asin() - FRAC_PI_4)).abs() < 1e-12);
    }

    #[test]
    fn params_reject_bad_gamma() {
        assert!(matches!(
            derive_params(FRAC_1_SQRT_2, 0.1, 0.0),
            Err(Error::GammaSingular)
        ));
        assert!(matches!(derive_params(1.0, 0.1, 0.0), Err(Error::GammaOutOfRange(_))));
        assert!(matches!(derive_params(0.0, 0.1, 0.0), Err(Error::GammaOutOfRange(_))));
        assert!(derive_params(0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn alternating_sum_signs() {
        let a = |t: f64| PiteAngles {
            theta: t,
            time: 2.0 * t,
        };
        let s = PiteAngles::alternating_sum(&[a(1.0), a(0.25), a(0.5)]);
        assert_eq!(s, a(1.25));
    }

    #[test]
    fn exact_block_scalar_case() {
        let h = HamiltonianOracle::from_diagonal(&[0.0, 1.0]).unwrap();
        let p = derive_params(0.5, 0.1, 0.0).unwrap();
        let u = exact_pite_unitary(&h, &p).unwrap();
        assert!((u[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((u[(1, 1)].re - 0.5 * (-0.1f64).exp()).abs() < 1e-12);
        assert!(u[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn exact_refuses_non_contraction() {
        let h = HamiltonianOracle::from_diagonal(&[-5.0, 1.0]).unwrap();
        let p = derive_params(0.9, 0.5, 0.0).unwrap();
        assert!(matches!(exact_pite_unitary(&h, &p), Err(Error::NotContraction(_))));
    }
}
