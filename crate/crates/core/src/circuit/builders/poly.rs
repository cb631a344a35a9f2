use crate::circuit::{Circuit, Gate};
use crate::hamiltonian::GridSpec;
use crate::{Error, Result};

/// `Σ_j e^{-i t f(x_j)} |j⟩⟨j|` on the position grid, `f(x) = Σ_k coeffs[k] x^k`.
pub fn build_poly_phase(coeffs: &[f64], t: f64, grid: &GridSpec) -> Result<Circuit> {
    poly_phase_affine(coeffs, t, grid.n_qubits, 0.0, grid.dx())
}

/// Same as [`build_poly_phase`] for the affine grid `x_j = x0 + j·dx`.
///
/// Writing bit `q` as `(1 - z_q)/2` gives `x = A - Σ w_q z_q` with
/// `A = x0 + dx(N-1)/2` and `w_q = dx·2^{q-1}`, so a quadratic needs only
/// `Rz` and `Rzz` gates plus a global phase.
pub fn poly_phase_affine(coeffs: &[f64], t: f64, n: usize, x0: f64, dx: f64) -> Result<Circuit> {
    let degree = coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    if degree > 2 {
        return Err(Error::UnsupportedDegree(degree));
    }
    let c = |k: usize| coeffs.get(k).copied().unwrap_or(0.0);
    let (c0, c1, c2) = (c(0), c(1), c(2));
    let dim = (1u64 << n) as f64;
    let a = x0 + dx * (dim - 1.0) / 2.0;
    let w: Vec<f64> = (0..n).map(|q| dx * 2f64.powi(q as i32 - 1)).collect();
    let sum_w2: f64 = w.iter().map(|x| x * x).sum();
    let constant = c0 + c1 * a + c2 * (a * a + sum_w2);

    let mut circ = Circuit::new(n);
    circ.push(Gate::global_phase(-t * constant));
    let lin = c1 + 2.0 * c2 * a;
    if lin != 0.0 {
        for (q, wq) in w.iter().enumerate() {
            circ.push(Gate::rz(q, -2.0 * t * lin * wq));
        }
    }
    if c2 != 0.0 {
        for q in 0..n {
            for r in q + 1..n {
                circ.push(Gate::rzz(q, r, 4.0 * t * c2 * w[q] * w[r]));
            }
        }
    }
    Ok(circ)
}
