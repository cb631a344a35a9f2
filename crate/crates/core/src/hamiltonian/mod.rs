//! Model Hamiltonians, their exact spectra, and real-time-evolution circuits.

mod graph;
mod grid;
mod rte;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigen, spectral_function, CMatrix, CVector};
use crate::{Error, Result};

pub use graph::{Edge, WeightedGraph};
pub use grid::GridSpec;
pub use rte::{rte_circuit_grid, rte_circuit_ising, DenseRte, GridRte, IsingRte, RteBuilder};

/// Largest register the dense eigen-oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 12;

/// Dense Hermitian matrix with its spectral decomposition (ascending).
#[derive(Clone, Debug)]
pub struct HamiltonianOracle {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl HamiltonianOracle {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || !dim.is_power_of_two() || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(1),
                found: dim,
            });
        }
        let n = dim.trailing_zeros() as usize;
        if n > ORACLE_MAX_QUBITS {
            return Err(Error::Capacity {
                requested: n,
                cap: ORACLE_MAX_QUBITS,
            });
        }
        let asym = crate::linalg::max_abs_diff(&matrix, &matrix.adjoint());
        if asym > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "matrix is not Hermitian (deviation {asym:e})"
            )));
        }
        let (eigenvalues, eigenvectors) = hermitian_eigen(&matrix);
        Ok(Self {
            matrix,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            diag.len(),
            diag.iter().map(|&d| Complex64::new(d, 0.0)),
        ));
        Self::new(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Diagonal entries when the matrix is diagonal.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        let d = self.dim();
        for c in 0..d {
            for r in 0..d {
                if r != c && self.matrix[(r, c)].norm() != 0.0 {
                    return None;
                }
            }
        }
        Some((0..d).map(|k| self.matrix[(k, k)].re).collect())
    }

    /// `f(H + shift)` through the eigenbasis.
    pub fn function<F: Fn(f64) -> Complex64>(&self, shift: f64, f: F) -> CMatrix {
        spectral_function(&self.eigenvalues, &self.eigenvectors, |x| f(x + shift))
    }

    /// `e^{-(H + shift)τ}`.
    pub fn ite(&self, shift: f64, tau: f64) -> CMatrix {
        self.function(shift, |x| Complex64::new((-x * tau).exp(), 0.0))
    }

    /// `e^{-i(H + shift)t}`.
    pub fn rte(&self, shift: f64, t: f64) -> CMatrix {
        self.function(shift, |x| Complex64::from_polar(1.0, -x * t))
    }

    /// Normalized projection of `psi` onto the lowest eigenspace, if nonzero.
    pub fn ground_projection(&self, psi: &CVector, tol: f64) -> Option<CVector> {
        let e0 = self.lambda_min();
        let mut out = CVector::zeros(self.dim());
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            if lambda - e0 > tol {
                break;
            }
            let v = self.eigenvectors.column(k);
            let c = v.dotc(psi);
            out += v * c;
        }
        let norm = out.norm();
        (norm > 1e-12).then(|| out / Complex64::new(norm, 0.0))
    }

    pub fn ground_degeneracy(&self, tol: f64) -> usize {
        let e0 = self.lambda_min();
        self.eigenvalues.iter().take_while(|&&l| l - e0 <= tol).count()
    }

    /// Shift that maps the spectrum per `rule`.
    pub fn shift_for(&self, rule: ShiftRule) -> f64 {
        match rule {
            ShiftRule::Centered => -(self.lambda_min() + self.lambda_max()) / 2.0,
            ShiftRule::GroundAtZero => -self.lambda_min(),
            ShiftRule::Fixed(x) => x,
        }
    }

    /// Largest `|λ + shift|`.
    pub fn max_abs_eigenvalue(&self, shift: f64) -> f64 {
        (self.lambda_min() + shift).abs().max((self.lambda_max() + shift).abs())
    }
}

/// How the energy offset `E0` entering `γ e^{-(H+E0)Δτ}` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "kebab-case")]
pub enum ShiftRule {
    /// Spectrum symmetric around zero.
    Centered,
    /// Lowest eigenvalue at zero.
    GroundAtZero,
    Fixed(f64),
}

/// `H = -Σ_{(i,j)} d_ij (1 - z_i z_j)/2`, diagonal in the computational basis.
pub fn maxcut_diagonal(g: &WeightedGraph) -> Vec<f64> {
    (0..1usize << g.n_vertices()).map(|b| -g.cut_value(b)).collect()
}

pub fn maxcut_hamiltonian(g: &WeightedGraph) -> Result<HamiltonianOracle> {
    if g.n_vertices() > ORACLE_MAX_QUBITS {
        return Err(Error::Capacity {
            requested: g.n_vertices(),
            cap: ORACLE_MAX_QUBITS,
        });
    }
    HamiltonianOracle::from_diagonal(&maxcut_diagonal(g))
}

/// `H = F_c† diag(k²/2m) F_c + diag(V(x_j))` on the grid.
pub fn harmonic_hamiltonian(grid: &GridSpec) -> Result<HamiltonianOracle> {
    if grid.n_qubits > ORACLE_MAX_QUBITS {
        return Err(Error::Capacity {
            requested: grid.n_qubits,
            cap: ORACLE_MAX_QUBITS,
        });
    }
    let n = grid.n_points();
    let f = grid.centered_dft();
    let kin = CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        (0..n).map(|m| Complex64::new(grid.momentum(m).powi(2) / (2.0 * grid.mass), 0.0)),
    ));
    let mut h = f.adjoint() * kin * &f;
    for j in 0..n {
        h[(j, j)] += grid.potential(grid.x(j));
    }
    // symmetrize away rounding so the Hermitian check is exact
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    HamiltonianOracle::new(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_diagonal() {
        let g = WeightedGraph::unweighted(2, &[(0, 1)]).unwrap();
        assert_eq!(maxcut_diagonal(&g), vec![0.0, -1.0, -1.0, 0.0]);
    }

    #[test]
    fn benchmark_spectrum() {
        let h = maxcut_hamiltonian(&WeightedGraph::benchmark()).unwrap();
        assert_eq!(h.lambda_min(), -4.0);
        assert_eq!(h.lambda_max(), 0.0);
        assert_eq!(h.ground_degeneracy(1e-12), 2);
        let d = h.diagonal().unwrap();
        assert_eq!(d[0b0101], -4.0);
        assert_eq!(d[0b1010], -4.0);
        assert_eq!(h.shift_for(ShiftRule::Centered), 2.0);
    }

    #[test]
    fn empty_graph_is_zero() {
        let g = WeightedGraph::unweighted(3, &[]).unwrap();
        assert!(maxcut_diagonal(&g).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn harmonic_low_levels() {
        let h = harmonic_hamiltonian(&GridSpec::standard(6)).unwrap();
        let e = h.eigenvalues();
        assert!((e[0] - 0.5).abs() < 1e-2, "{}", e[0]);
        assert!((e[1] - e[0] - 1.0).abs() < 1e-2, "{}", e[1] - e[0]);
    }

    #[test]
    fn free_particle_levels_are_exact() {
        let grid = GridSpec::new(3, 14.0, 1.0, 0.0).unwrap();
        let h = harmonic_hamiltonian(&grid).unwrap();
        let mut want: Vec<f64> = (0..8).map(|m| grid.momentum(m).powi(2) / 2.0).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in h.eigenvalues().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(HamiltonianOracle::new(m).is_err());
    }
}
