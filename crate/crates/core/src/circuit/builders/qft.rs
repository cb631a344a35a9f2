use std::f64::consts::PI;

use crate::circuit::{Circuit, Gate};

/// `|m⟩ → N^{-1/2} Σ_j e^{2πi mj/N} |j⟩`, swaps included.
pub fn build_qft(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for i in (0..n).rev() {
        c.push(Gate::h(i));
        for j in (0..i).rev() {
            c.push(Gate::cphase(j, i, PI / (1u64 << (i - j)) as f64));
        }
    }
    for i in 0..n / 2 {
        let k = n - 1 - i;
        c.push(Gate::cx(i, k)).push(Gate::cx(k, i)).push(Gate::cx(i, k));
    }
    c
}

/// Centered transform `F_c = X_msb · QFT†`: maps grid amplitudes to momentum
/// modes `m' - N/2`, so `F_c[m', j] = ω^{-(m'-N/2) j} / √N`.
pub fn build_cqft(n: usize) -> Circuit {
    let mut c = build_qft(n).inverse();
    if n > 0 {
        c.push(Gate::x(n - 1));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cis, max_abs_diff, CMatrix};

    #[test]
    fn qft_matches_dft() {
        for n in 1..=4 {
            let dim = 1usize << n;
            let want = CMatrix::from_fn(dim, dim, |j, m| {
                cis(2.0 * PI * (m * j) as f64 / dim as f64) / (dim as f64).sqrt()
            });
            assert!(max_abs_diff(&build_qft(n).unitary(), &want) < 1e-12);
        }
    }

    #[test]
    fn centered_transform_entries() {
        let n = 3;
        let dim = 1usize << n;
        let half = (dim / 2) as f64;
        let want = CMatrix::from_fn(dim, dim, |mp, j| {
            cis(-2.0 * PI * (mp as f64 - half) * j as f64 / dim as f64) / (dim as f64).sqrt()
        });
        assert!(max_abs_diff(&build_cqft(n).unitary(), &want) < 1e-12);
    }
}
