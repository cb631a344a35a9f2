//! Dense statevector.

use num_complex::Complex64;

use crate::circuit::{sim, Circuit};
use crate::linalg::{CMatrix, CVector, ONE, ZERO};
use crate::{Error, Result};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 14;

const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Capacity {
            requested: n,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

impl QuantumState {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Self { n_qubits, amps })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: s.amps.len(),
                found: index,
            });
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(1),
                found: dim,
            });
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_capacity(n_qubits)?;
        let s = Self { n_qubits, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Normalizes `amps` first.
    pub fn from_unnormalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroProbability);
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    pub fn from_vector(v: &CVector) -> Result<Self> {
        Self::from_amplitudes(v.iter().copied().collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: circuit.n_qubits() - 1,
                n_qubits: self.n_qubits,
            });
        }
        circuit.validate()?;
        sim::apply_gates(&mut self.amps, circuit.gates(), &[]);
        Ok(())
    }

    pub fn apply_matrix(&mut self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.amps.len() || m.ncols() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: m.nrows(),
            });
        }
        let v = m * self.to_vector();
        self.amps = v.iter().copied().collect();
        Ok(())
    }

    /// Appends `extra` qubits in `|0⟩` above the current register.
    pub fn with_ancillas(&self, extra: usize) -> Result<Self> {
        let n = self.n_qubits + extra;
        check_capacity(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        Ok(Self { n_qubits: n, amps })
    }

    /// Probability of reading `outcome` on `qubit`.
    pub fn marginal(&self, qubit: usize, outcome: bool) -> Result<f64> {
        self.check_qubit(qubit)?;
        let want = usize::from(outcome);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> qubit) & 1 == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects `qubit` onto `outcome`, removes it, and renormalizes.
    /// Returns the reduced state and the branch probability.
    pub fn postselect(&self, qubit: usize, outcome: bool) -> Result<(QuantumState, f64)> {
        self.check_qubit(qubit)?;
        let want = usize::from(outcome);
        let low = (1usize << qubit) - 1;
        let mut amps = vec![ZERO; self.amps.len() / 2];
        for (i, a) in self.amps.iter().enumerate() {
            if (i >> qubit) & 1 == want {
                let j = (i & low) | ((i >> (qubit + 1)) << qubit);
                amps[j] = *a;
            }
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p <= f64::MIN_POSITIVE {
            return Err(Error::ZeroProbability);
        }
        let scale = p.sqrt();
        amps.iter_mut().for_each(|a| *a /= scale);
        Ok((
            QuantumState {
                n_qubits: self.n_qubits - 1,
                amps,
            },
            p,
        ))
    }

    /// Drops the top `extra` qubits, which must be in `|0⟩` up to `tol` in norm.
    pub fn drop_clean_ancillas(&self, extra: usize, tol: f64) -> Result<QuantumState> {
        let keep = 1usize << (self.n_qubits - extra);
        let leak: f64 = self.amps[keep..].iter().map(|a| a.norm_sqr()).sum();
        if leak.sqrt() > tol {
            return Err(Error::InvalidParameter(format!(
                "ancillas not returned to |0>, leaked norm {}",
                leak.sqrt()
            )));
        }
        QuantumState::from_unnormalized(self.amps[..keep].to_vec())
    }

    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: other.amps.len(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `⟨ψ|M|ψ⟩` for a Hermitian `M` (real part).
    pub fn expectation(&self, m: &CMatrix) -> Result<f64> {
        if m.nrows() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: m.nrows(),
            });
        }
        let v = self.to_vector();
        Ok((v.adjoint() * m * &v)[(0, 0)].re)
    }

    /// `⟨ψ|diag(d)|ψ⟩`.
    pub fn diagonal_expectation(&self, diag: &[f64]) -> Result<f64> {
        if diag.len() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: diag.len(),
            });
        }
        Ok(self.amps.iter().zip(diag).map(|(a, d)| a.norm_sqr() * d).sum())
    }

    /// `Tr ρ²` of the reduced state of the top (ancilla) qubit.
    pub fn ancilla_purity(&self) -> f64 {
        let half = self.amps.len() / 2;
        let (lo, hi) = self.amps.split_at(half);
        let p0: f64 = lo.iter().map(|a| a.norm_sqr()).sum();
        let p1: f64 = hi.iter().map(|a| a.norm_sqr()).sum();
        let c: Complex64 = lo.iter().zip(hi).map(|(a, b)| a * b.conj()).sum();
        p0 * p0 + p1 * p1 + 2.0 * c.norm_sqr()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }
}

/// Amplitude `a = sin θ_a` of a good branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeEstimate {
    pub a: f64,
    pub theta_a: f64,
}

impl AmplitudeEstimate {
    pub fn new(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameter(format!("amplitude {a} outside [0, 1]")));
        }
        Ok(Self { a, theta_a: a.asin() })
    }

    /// From the probability of the good branch.
    pub fn from_probability(p: f64) -> Result<Self> {
        Self::new(p.clamp(0.0, 1.0).sqrt())
    }
}

pub fn zero_state(n_qubits: usize) -> Result<QuantumState> {
    QuantumState::zero(n_qubits)
}

pub fn apply_circuit(state: &mut QuantumState, circuit: &Circuit) -> Result<()> {
    state.apply(circuit)
}

/// Post-selects the ancilla, which sits at the highest qubit index.
pub fn postselect_ancilla(state: &QuantumState, outcome: bool) -> Result<(QuantumState, f64)> {
    let top = state
        .n_qubits()
        .checked_sub(1)
        .ok_or(Error::QubitOutOfRange { index: 0, n_qubits: 0 })?;
    state.postselect(top, outcome)
}

pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    a.fidelity(b)
}

pub fn ancilla_purity(state: &QuantumState) -> f64 {
    state.ancilla_purity()
}
