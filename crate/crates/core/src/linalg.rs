//! Dense complex linear algebra shared by the oracles and the tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn cis(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in ascending order.
/// Columns of the returned matrix are the matching eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let dim = m.nrows();
    if is_diagonal(m) {
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re));
        let values = order.iter().map(|&k| m[(k, k)].re).collect();
        let mut vectors = CMatrix::zeros(dim, dim);
        for (col, &k) in order.iter().enumerate() {
            vectors[(k, col)] = ONE;
        }
        return (values, vectors);
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(dim, dim);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

fn is_diagonal(m: &CMatrix) -> bool {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if r != c && m[(r, c)].norm() != 0.0 {
                return false;
            }
        }
    }
    true
}

/// `V f(Λ) V†` for a spectral decomposition `(values, vectors)`.
pub fn spectral_function<F>(values: &[f64], vectors: &CMatrix, f: F) -> CMatrix
where
    F: Fn(f64) -> Complex64,
{
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let factor = f(lambda);
        for r in 0..scaled.nrows() {
            scaled[(r, k)] *= factor;
        }
    }
    scaled * vectors.adjoint()
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Max entry-wise distance after aligning the global phase of `a` to `b`.
pub fn phase_aligned_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let dim = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(dim, dim))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn from_rows(rows: &[&[Complex64]]) -> CMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(nrows, ncols, |r, c| rows[r][c])
}

/// Embeds `work ⊗ |a⟩⟨b|` blocks: the returned matrix acts on `n+1` qubits with the
/// extra qubit at the highest index, so `blocks[a][b]` is the `(a, b)` ancilla block.
pub fn ancilla_block_matrix(blocks: [[&CMatrix; 2]; 2]) -> CMatrix {
    let dim = blocks[0][0].nrows();
    let mut out = CMatrix::zeros(2 * dim, 2 * dim);
    for (a, row) in blocks.iter().enumerate() {
        for (b, block) in row.iter().enumerate() {
            out.view_mut((a * dim, b * dim), (dim, dim)).copy_from(*block);
        }
    }
    out
}

/// Top-left (ancilla 0 → 0) block of an `(n+1)`-qubit operator.
pub fn ancilla_zero_block(u: &CMatrix) -> CMatrix {
    let dim = u.nrows() / 2;
    u.view((0, 0), (dim, dim)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let m = from_rows(&[
            &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            &[Complex64::new(0.0, -1.0), Complex64::new(-1.0, 0.0)],
        ]);
        let (values, vectors) = hermitian_eigen(&m);
        assert!(values[0] < values[1]);
        let back = spectral_function(&values, &vectors, |x| Complex64::new(x, 0.0));
        assert!(max_abs_diff(&back, &m) < 1e-12);
    }

    #[test]
    fn diagonal_fast_path_orders_values() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.5, 0.0),
        ]));
        let (values, vectors) = hermitian_eigen(&m);
        assert_eq!(values, vec![-1.0, 0.5, 3.0]);
        assert_eq!(vectors[(1, 0)], ONE);
    }

    #[test]
    fn phase_alignment_ignores_global_phase() {
        let a = CMatrix::identity(2, 2);
        let b = &a * cis(0.7);
        assert!(phase_aligned_diff(&a, &b) < 1e-14);
        assert!(max_abs_diff(&a, &b) > 0.1);
    }
}
