use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::linalg::{cis, CMatrix};
use crate::{Error, Result};

/// Uniform grid `x_j = j·Δx`, `Δx = L/N`, for one particle in a harmonic well
/// centered at `L/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_qubits: usize,
    pub length: f64,
    pub mass: f64,
    pub omega: f64,
}

impl GridSpec {
    pub fn new(n_qubits: usize, length: f64, mass: f64, omega: f64) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("grid needs at least one qubit".into()));
        }
        if length <= 0.0 || mass <= 0.0 || omega < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid needs L > 0, m > 0, omega >= 0 (got {length}, {mass}, {omega})"
            )));
        }
        Ok(Self {
            n_qubits,
            length,
            mass,
            omega,
        })
    }

    /// `L = 14`, `m = ω = 1`.
    pub fn standard(n_qubits: usize) -> Self {
        Self::new(n_qubits, 14.0, 1.0, 1.0).expect("valid grid")
    }

    pub fn n_points(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n_points() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn potential(&self, x: f64) -> f64 {
        let d = x - self.length / 2.0;
        0.5 * self.mass * self.omega * self.omega * d * d
    }

    /// Power-series coefficients of the potential in `x`.
    pub fn potential_coeffs(&self) -> [f64; 3] {
        let k = 0.5 * self.mass * self.omega * self.omega;
        let c = self.length / 2.0;
        [k * c * c, -2.0 * k * c, k]
    }

    /// Momentum of centered mode `m'`: `2π(m' - N/2)/L`.
    pub fn momentum(&self, mode: usize) -> f64 {
        2.0 * PI * (mode as f64 - (self.n_points() / 2) as f64) / self.length
    }

    /// Dense centered transform `F_c[m', j] = e^{-2πi (m'-N/2) j / N} / √N`.
    pub fn centered_dft(&self) -> CMatrix {
        let n = self.n_points();
        let half = (n / 2) as f64;
        let norm = (n as f64).sqrt();
        CMatrix::from_fn(n, n, |mp, j| {
            cis(-2.0 * PI * (mp as f64 - half) * j as f64 / n as f64) / norm
        })
    }
}
