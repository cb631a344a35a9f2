use crate::circuit::builders::{build_cqft, build_poly_phase, poly_phase_affine};
use crate::circuit::{Circuit, Gate};
use crate::linalg::CMatrix;
use crate::Result;

use super::{Edge, GridSpec, HamiltonianOracle, WeightedGraph};
use std::f64::consts::PI;

/// Source of `e^{-iHt}` circuits on `n_qubits()` qubits.
pub trait RteBuilder {
    fn n_qubits(&self) -> usize;

    fn rte(&self, t: f64) -> Circuit;

    fn label(&self) -> &'static str;

    /// Whether `rte(a)·rte(b) = rte(a+b)` holds exactly. Fused PITE layouts
    /// rely on it; builders returning `false` get the split forms.
    fn composes(&self) -> bool {
        true
    }
}

/// Exact evolution under a max-cut Hamiltonian: one `Rzz` per edge.
#[derive(Clone, Debug)]
pub struct IsingRte {
    graph: WeightedGraph,
}

impl IsingRte {
    pub fn new(graph: WeightedGraph) -> Self {
        Self { graph }
    }
}

impl RteBuilder for IsingRte {
    fn n_qubits(&self) -> usize {
        self.graph.n_vertices()
    }

    fn rte(&self, t: f64) -> Circuit {
        rte_circuit_ising(&self.graph, t)
    }

    fn label(&self) -> &'static str {
        "ising"
    }
}

/// `d(Z_i Z_j - 1)/2` per edge gives `e^{i t d/2} Rzz(d t)`.
pub fn rte_circuit_ising(g: &WeightedGraph, t: f64) -> Circuit {
    let mut c = Circuit::new(g.n_vertices());
    let total = g.total_weight();
    if total != 0.0 {
        c.push(Gate::global_phase(t * total / 2.0));
    }
    for layer in edge_layers(g) {
        for e in layer {
            c.push(Gate::rzz(e.i, e.j, e.weight * t));
        }
    }
    c
}

/// Greedy split of the edges into vertex-disjoint layers so the commuting
/// `Rzz` terms run in parallel, smallest layer first.
fn edge_layers(g: &WeightedGraph) -> Vec<Vec<&Edge>> {
    let mut layers: Vec<(Vec<&Edge>, Vec<bool>)> = Vec::new();
    for e in g.edges() {
        let slot = layers.iter().position(|(_, used)| !used[e.i] && !used[e.j]);
        let k = slot.unwrap_or_else(|| {
            layers.push((Vec::new(), vec![false; g.n_vertices()]));
            layers.len() - 1
        });
        let (edges, used) = &mut layers[k];
        used[e.i] = true;
        used[e.j] = true;
        edges.push(e);
    }
    let mut layers: Vec<Vec<&Edge>> = layers.into_iter().map(|(edges, _)| edges).collect();
    // largest layer last: it meets its own inverse in the fused PITE block
    layers.sort_by_key(|l| l.len());
    layers
}

/// First-order Trotter evolution on the position grid.
#[derive(Clone, Debug)]
pub struct GridRte {
    grid: GridSpec,
    slices: usize,
    fuse: bool,
}

impl GridRte {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            grid,
            slices: 1,
            fuse: false,
        }
    }

    pub fn with_slices(grid: GridSpec, slices: usize) -> Self {
        Self {
            grid,
            slices: slices.max(1),
            fuse: false,
        }
    }

    /// Treats Trotter slices as if they composed, so fused layouts are used.
    /// Cheaper circuits; success probabilities then carry the Trotter error.
    pub fn fused(mut self) -> Self {
        self.fuse = true;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
}

impl RteBuilder for GridRte {
    fn n_qubits(&self) -> usize {
        self.grid.n_qubits
    }

    fn rte(&self, t: f64) -> Circuit {
        let mut c = Circuit::new(self.grid.n_qubits);
        let dt = t / self.slices as f64;
        for _ in 0..self.slices {
            c.extend(&grid_slice(&self.grid, dt).expect("quadratic terms only"));
        }
        c
    }

    fn label(&self) -> &'static str {
        "grid"
    }

    fn composes(&self) -> bool {
        self.fuse
    }
}

fn grid_slice(grid: &GridSpec, t: f64) -> Result<Circuit> {
    let n = grid.n_qubits;
    let big_n = grid.n_points() as f64;
    let kinetic = poly_phase_affine(
        &[0.0, 0.0, 1.0 / (2.0 * grid.mass)],
        t,
        n,
        -PI * big_n / grid.length,
        2.0 * PI / grid.length,
    )?;
    let mut c = Circuit::new(n);
    c.push(Gate::conjugated(build_cqft(n), kinetic));
    c.extend(&build_poly_phase(&grid.potential_coeffs(), t, grid)?);
    Ok(c)
}

/// One Trotter slice: `U_pot(t) · F_c† · U_kin(t) · F_c`.
pub fn rte_circuit_grid(grid: &GridSpec, t: f64) -> Circuit {
    GridRte::new(*grid).rte(t)
}

/// Exact evolution as one dense gate; for small test Hamiltonians.
#[derive(Clone, Debug)]
pub struct DenseRte {
    oracle: HamiltonianOracle,
}

impl DenseRte {
    pub fn new(oracle: HamiltonianOracle) -> Self {
        Self { oracle }
    }

    pub fn matrix(&self, t: f64) -> CMatrix {
        self.oracle.rte(0.0, t)
    }
}

impl RteBuilder for DenseRte {
    fn n_qubits(&self) -> usize {
        self.oracle.n_qubits()
    }

    fn rte(&self, t: f64) -> Circuit {
        let n = self.n_qubits();
        let mut c = Circuit::new(n);
        c.push(Gate::unitary((0..n).collect(), self.matrix(t)));
        c
    }

    fn label(&self) -> &'static str {
        "dense"
    }
}
