//! Gate and circuit data model.
//!
//! Qubit `q` is bit `q` of the basis index. Multi-qubit payloads (`Unitary`) use
//! `targets[0]` as the least significant bit of their local index.

pub mod builders;
mod dump;
mod metrics;
pub(crate) mod sim;
mod transpile;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::linalg::{cis, CMatrix, I, ONE, ZERO};

pub use dump::{from_text, to_text};
pub use metrics::{metrics, CircuitMetrics};
pub use transpile::{is_basis_circuit, transpile_to_basis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    /// `false` marks an open (negative) control.
    pub on_one: bool,
}

impl Control {
    pub fn pos(qubit: usize) -> Self {
        Self { qubit, on_one: true }
    }

    pub fn neg(qubit: usize) -> Self {
        Self { qubit, on_one: false }
    }
}

#[derive(Clone, Debug)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    /// `(1/√2)[[1, -i], [1, i]]`
    W,
    Wdg,
    Rx(f64),
    Ry(f64),
    /// `diag(e^{-iθ/2}, e^{iθ/2})`
    Rz(f64),
    /// `diag(1, e^{iφ})`
    Phase(f64),
    /// `exp(-iθ/2 Z⊗Z)` on two targets.
    Rzz(f64),
    /// Scalar `e^{iφ}` with no targets; becomes a phase gate once controlled.
    GlobalPhase(f64),
    Unitary(Arc<CMatrix>),
    Block(Arc<Circuit>),
    /// `outer`, then `inner`, then `outer†`. Controls attach to `inner` only.
    Conjugated {
        outer: Arc<Circuit>,
        inner: Arc<Circuit>,
    },
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::W => "W",
            GateKind::Wdg => "WDG",
            GateKind::Rx(_) => "RX",
            GateKind::Ry(_) => "RY",
            GateKind::Rz(_) => "RZ",
            GateKind::Phase(_) => "P",
            GateKind::Rzz(_) => "RZZ",
            GateKind::GlobalPhase(_) => "GPHASE",
            GateKind::Unitary(_) => "UNITARY",
            GateKind::Block(_) => "BLOCK",
            GateKind::Conjugated { .. } => "CONJ",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Rx(a)
            | GateKind::Ry(a)
            | GateKind::Rz(a)
            | GateKind::Phase(a)
            | GateKind::Rzz(a)
            | GateKind::GlobalPhase(a) => Some(a),
            _ => None,
        }
    }

    pub fn n_targets(&self) -> Option<usize> {
        match self {
            GateKind::Rzz(_) => Some(2),
            GateKind::GlobalPhase(_) => Some(0),
            GateKind::Unitary(m) => Some(m.nrows().trailing_zeros() as usize),
            GateKind::Block(_) | GateKind::Conjugated { .. } => None,
            _ => Some(1),
        }
    }

    pub fn inverse(&self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::W => GateKind::Wdg,
            GateKind::Wdg => GateKind::W,
            GateKind::Rx(a) => GateKind::Rx(-a),
            GateKind::Ry(a) => GateKind::Ry(-a),
            GateKind::Rz(a) => GateKind::Rz(-a),
            GateKind::Phase(a) => GateKind::Phase(-a),
            GateKind::Rzz(a) => GateKind::Rzz(-a),
            GateKind::GlobalPhase(a) => GateKind::GlobalPhase(-a),
            GateKind::Unitary(m) => GateKind::Unitary(Arc::new(m.adjoint())),
            GateKind::Block(c) => GateKind::Block(Arc::new(c.inverse())),
            GateKind::Conjugated { outer, inner } => GateKind::Conjugated {
                outer: outer.clone(),
                inner: Arc::new(inner.inverse()),
            },
            k @ (GateKind::X | GateKind::Y | GateKind::Z | GateKind::H) => k.clone(),
        }
    }

    /// 2×2 matrix for single-qubit kinds.
    pub fn matrix_1q(&self) -> Option<[[Complex64; 2]; 2]> {
        let r = |x: f64| Complex64::new(x, 0.0);
        let h = FRAC_1_SQRT_2;
        Some(match *self {
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, -I], [I, ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
            GateKind::H => [[r(h), r(h)], [r(h), r(-h)]],
            GateKind::S => [[ONE, ZERO], [ZERO, I]],
            GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
            GateKind::T => [[ONE, ZERO], [ZERO, cis(std::f64::consts::FRAC_PI_4)]],
            GateKind::Tdg => [[ONE, ZERO], [ZERO, cis(-std::f64::consts::FRAC_PI_4)]],
            GateKind::W => [[r(h), -I * h], [r(h), I * h]],
            GateKind::Wdg => [[r(h), r(h)], [I * h, -I * h]],
            GateKind::Rx(a) => {
                let (s, c) = (a / 2.0).sin_cos();
                [[r(c), -I * s], [-I * s, r(c)]]
            }
            GateKind::Ry(a) => {
                let (s, c) = (a / 2.0).sin_cos();
                [[r(c), r(-s)], [r(s), r(c)]]
            }
            GateKind::Rz(a) => [[cis(-a / 2.0), ZERO], [ZERO, cis(a / 2.0)]],
            GateKind::Phase(a) => [[ONE, ZERO], [ZERO, cis(a)]],
            GateKind::Unitary(ref m) if m.nrows() == 2 => [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Self {
            kind,
            targets,
            controls: Vec::new(),
        }
    }

    fn one(kind: GateKind, q: usize) -> Self {
        Self::new(kind, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::one(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::one(GateKind::Z, q)
    }
    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q)
    }
    pub fn s(q: usize) -> Self {
        Self::one(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Self::one(GateKind::Sdg, q)
    }
    pub fn t(q: usize) -> Self {
        Self::one(GateKind::T, q)
    }
    pub fn tdg(q: usize) -> Self {
        Self::one(GateKind::Tdg, q)
    }
    pub fn w(q: usize) -> Self {
        Self::one(GateKind::W, q)
    }
    pub fn wdg(q: usize) -> Self {
        Self::one(GateKind::Wdg, q)
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Rx(theta), q)
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Ry(theta), q)
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::one(GateKind::Rz(theta), q)
    }
    pub fn phase(q: usize, phi: f64) -> Self {
        Self::one(GateKind::Phase(phi), q)
    }
    pub fn rzz(a: usize, b: usize, theta: f64) -> Self {
        Self::new(GateKind::Rzz(theta), vec![a, b])
    }
    pub fn global_phase(phi: f64) -> Self {
        Self::new(GateKind::GlobalPhase(phi), Vec::new())
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::x(target).ctrl(control)
    }
    pub fn cphase(control: usize, target: usize, phi: f64) -> Self {
        Self::phase(target, phi).ctrl(control)
    }
    pub fn mcx(controls: &[usize], target: usize) -> Self {
        let mut g = Self::x(target);
        g.controls = controls.iter().map(|&q| Control::pos(q)).collect();
        g
    }
    pub fn unitary(targets: Vec<usize>, matrix: CMatrix) -> Self {
        assert_eq!(matrix.nrows(), 1 << targets.len(), "matrix size must match targets");
        Self::new(GateKind::Unitary(Arc::new(matrix)), targets)
    }
    pub fn block(circuit: Circuit) -> Self {
        Self::new(GateKind::Block(Arc::new(circuit)), Vec::new())
    }
    pub fn conjugated(outer: Circuit, inner: Circuit) -> Self {
        Self::new(
            GateKind::Conjugated {
                outer: Arc::new(outer),
                inner: Arc::new(inner),
            },
            Vec::new(),
        )
    }

    /// Adds a positive control.
    pub fn ctrl(mut self, qubit: usize) -> Self {
        self.controls.push(Control::pos(qubit));
        self
    }

    /// Adds an open control (fires on `|0⟩`).
    pub fn octrl(mut self, qubit: usize) -> Self {
        self.controls.push(Control::neg(qubit));
        self
    }

    pub fn with_controls(mut self, controls: &[Control]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind.inverse(),
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self.kind, GateKind::X) && self.controls.len() == 1 && self.controls[0].on_one
    }

    /// Every qubit the gate can touch, including those inside nested blocks.
    pub fn qubits(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.targets.clone();
        out.extend(self.controls.iter().map(|c| c.qubit));
        match &self.kind {
            GateKind::Block(c) => c.gates.iter().for_each(|g| out.extend(g.qubits())),
            GateKind::Conjugated { outer, inner } => {
                outer.gates.iter().for_each(|g| out.extend(g.qubits()));
                inner.gates.iter().for_each(|g| out.extend(g.qubits()));
            }
            _ => {}
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn check(&self, n_qubits: usize) -> crate::Result<()> {
        if let Some(k) = self.kind.n_targets() {
            if k != self.targets.len() {
                return Err(crate::Error::InvalidParameter(format!(
                    "{} expects {} targets, got {}",
                    self.kind.name(),
                    k,
                    self.targets.len()
                )));
            }
        }
        let mut seen: Vec<usize> = self.targets.clone();
        seen.extend(self.controls.iter().map(|c| c.qubit));
        for &q in &seen {
            if q >= n_qubits {
                return Err(crate::Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        let len = seen.len();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != len {
            let mut all: Vec<usize> = self.targets.clone();
            all.extend(self.controls.iter().map(|c| c.qubit));
            all.sort_unstable();
            let dup = all.windows(2).find(|w| w[0] == w[1]).map_or(0, |w| w[0]);
            return Err(crate::Error::RepeatedQubit(dup));
        }
        match &self.kind {
            GateKind::Block(c) => c.validate_within(n_qubits),
            GateKind::Conjugated { outer, inner } => {
                outer.validate_within(n_qubits)?;
                inner.validate_within(n_qubits)
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if !self.targets.is_empty() {
            let t: Vec<String> = self.targets.iter().map(|q| q.to_string()).collect();
            write!(f, " {}", t.join(","))?;
        }
        if !self.controls.is_empty() {
            let c: Vec<String> = self
                .controls
                .iter()
                .map(|c| {
                    if c.on_one {
                        c.qubit.to_string()
                    } else {
                        format!("!{}", c.qubit)
                    }
                })
                .collect();
            write!(f, " [{}]", c.join(","))?;
        }
        if let Some(a) = self.kind.angle() {
            write!(f, " {a:?}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate.
    ///
    /// Panics if the gate is malformed for this register; builders construct
    /// indices internally, so a failure here is a bug in the caller.
    pub fn push(&mut self, gate: Gate) -> &mut Self {
        if let Err(e) = gate.check(self.n_qubits) {
            panic!("invalid gate {gate}: {e}");
        }
        self.gates.push(gate);
        self
    }

    pub fn try_push(&mut self, gate: Gate) -> crate::Result<&mut Self> {
        gate.check(self.n_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends every gate of `other`, which may act on fewer qubits.
    pub fn extend(&mut self, other: &Circuit) -> &mut Self {
        assert!(
            other.n_qubits <= self.n_qubits,
            "cannot append a {}-qubit circuit to a {}-qubit one",
            other.n_qubits,
            self.n_qubits
        );
        self.gates.extend(other.gates.iter().cloned());
        self
    }

    pub fn then(mut self, other: &Circuit) -> Self {
        self.extend(other);
        self
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Same gates on a larger register.
    pub fn widened(&self, n_qubits: usize) -> Circuit {
        assert!(n_qubits >= self.n_qubits);
        Circuit {
            n_qubits,
            gates: self.gates.clone(),
        }
    }

    /// The whole circuit as one gate controlled by `control`.
    pub fn controlled(&self, control: Control) -> Gate {
        Gate::block(self.clone()).with_controls(&[control])
    }

    /// Circuit repeated `times` times.
    pub fn repeated(&self, times: usize) -> Circuit {
        let mut out = Circuit::new(self.n_qubits);
        for _ in 0..times {
            out.extend(self);
        }
        out
    }

    pub fn validate(&self) -> crate::Result<()> {
        self.validate_within(self.n_qubits)
    }

    fn validate_within(&self, n_qubits: usize) -> crate::Result<()> {
        if self.n_qubits > n_qubits {
            return Err(crate::Error::QubitOutOfRange {
                index: self.n_qubits - 1,
                n_qubits,
            });
        }
        self.gates.iter().try_for_each(|g| g.check(n_qubits))
    }

    /// Dense matrix of the circuit, built column by column by simulation.
    pub fn unitary(&self) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        let mut out = CMatrix::zeros(dim, dim);
        let mut amps = vec![ZERO; dim];
        for col in 0..dim {
            amps.iter_mut().for_each(|a| *a = ZERO);
            amps[col] = ONE;
            sim::apply_gates(&mut amps, &self.gates, &[]);
            for (row, a) in amps.iter().enumerate() {
                out[(row, col)] = *a;
            }
        }
        out
    }
}
