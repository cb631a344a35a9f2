use std::f64::consts::PI;

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

/// `e^{iφ|0⟩⟨0|}` on `n` qubits, i.e. `I - 2|0⟩⟨0|` at `φ = π`.
///
/// At `φ = π` the open-controlled phase is a multi-controlled Z, which lowers to
/// `H · C^{n-1}X · H` on the top qubit.
pub fn build_zero_reflection(n: usize, phi: f64) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidParameter("reflection on zero qubits".into()));
    }
    let top = n - 1;
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Gate::x(q));
    }
    let mut g = if (phi - PI).abs() < 1e-15 {
        Gate::z(top)
    } else {
        Gate::phase(top, phi)
    };
    for q in 0..top {
        g = g.ctrl(q);
    }
    c.push(g);
    for q in 0..n {
        c.push(Gate::x(q));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{metrics, transpile_to_basis};
    use crate::linalg::{cis, max_abs_diff, CMatrix, ONE};

    #[test]
    fn matches_definition() {
        for n in 1..=4 {
            for phi in [PI, 0.7, -1.3] {
                let u = build_zero_reflection(n, phi).unwrap().unitary();
                let mut want = CMatrix::identity(1 << n, 1 << n);
                want[(0, 0)] = cis(phi);
                assert!(max_abs_diff(&u, &want) < 1e-12, "n={n} phi={phi}");
            }
        }
        let u = build_zero_reflection(3, PI).unwrap().unitary();
        assert!((u[(0, 0)] + ONE).norm() < 1e-14);
    }

    #[test]
    fn transpiled_cost_law() {
        for n in 6..=12 {
            let c = build_zero_reflection(n, PI).unwrap();
            let t = transpile_to_basis(&c, 1).unwrap();
            assert_eq!(metrics(&t).cnot_count, 16 * (n - 3), "n={n}");
        }
    }
}
