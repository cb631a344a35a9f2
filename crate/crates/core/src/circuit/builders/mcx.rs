//! Multi-controlled X in the CNOT + single-qubit basis.
//!
//! With one borrowed qubit (any state, restored afterwards) a `k`-control X costs
//! `16(k - 2)` CNOTs for `k >= 5`. Without it the fallback is a parity-network
//! phase oracle whose cost grows exponentially.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

type Gates = Vec<Gate>;

fn dagger(gates: &[Gate]) -> Gates {
    gates.iter().rev().map(Gate::inverse).collect()
}

fn ladder(b: usize, t: usize) -> Gates {
    vec![Gate::h(t), Gate::t(t), Gate::cx(b, t), Gate::tdg(t)]
}

/// Toffoli up to a diagonal relative phase, 3 CNOTs. Self-inverse.
fn rccx(c: usize, b: usize, t: usize) -> Gates {
    let mut g = ladder(b, t);
    g.push(Gate::cx(c, t));
    g.extend(dagger(&ladder(b, t)));
    g
}

/// Toggles `anc.last()` by the AND of `ctrls`, up to relative phase.
/// Needs `anc.len() == ctrls.len() - 1`; cost `4 * anc.len() - 1` CNOTs.
fn vchain(ctrls: &[usize], anc: &[usize]) -> Gates {
    let m = ctrls.len();
    debug_assert!(m >= 2 && anc.len() == m - 1);
    if m == 2 {
        return rccx(ctrls[0], ctrls[1], anc[0]);
    }
    let last = anc[m - 2];
    let prev = anc[m - 3];
    let mut g = ladder(ctrls[m - 1], last);
    g.push(Gate::cx(prev, last));
    g.extend(vchain(&ctrls[..m - 1], &anc[..m - 2]));
    g.push(Gate::cx(prev, last));
    g.extend(dagger(&ladder(ctrls[m - 1], last)));
    g
}

/// Relative-phase `C^m X` on dirty qubits, `8m - 14` CNOTs for `m >= 3`.
fn mcx_relative(ctrls: &[usize], tgt: usize, dirty: &[usize]) -> Gates {
    let m = ctrls.len();
    if m == 2 {
        return rccx(ctrls[0], ctrls[1], tgt);
    }
    let a = &dirty[..m - 2];
    let v = vchain(&ctrls[..m - 1], a);
    let c = ctrls[m - 1];
    let aw = a[m - 3];
    let mut g = ladder(c, tgt);
    g.push(Gate::cx(aw, tgt));
    g.extend(v.iter().cloned());
    g.push(Gate::cx(aw, tgt));
    g.extend(dagger(&ladder(c, tgt)));
    g.extend(v);
    g
}

/// Exact `C^m X` on `m - 2` dirty qubits, `8m - 10` CNOTs for `m >= 3`.
fn mcx_exact(ctrls: &[usize], tgt: usize, dirty: &[usize]) -> Gates {
    let m = ctrls.len();
    debug_assert!(m >= 3 && dirty.len() >= m - 2);
    let a = &dirty[..m - 2];
    let v = vchain(&ctrls[..m - 1], a);
    let c = ctrls[m - 1];
    let aw = a[m - 3];
    let x = tgt;
    let ph = |q: usize, k: f64| Gate::phase(q, k * FRAC_PI_4);
    let mut g = vec![
        Gate::h(x),
        Gate::z(x),
        Gate::z(c),
        ph(aw, 7.0),
        Gate::cx(x, aw),
        ph(aw, 1.0),
        Gate::cx(c, aw),
        ph(aw, 7.0),
        Gate::cx(x, aw),
        ph(aw, 1.0),
        Gate::cx(c, aw),
    ];
    g.extend(v.iter().cloned());
    g.extend([
        ph(aw, 5.0),
        Gate::cx(x, aw),
        ph(aw, 7.0),
        Gate::cx(c, aw),
        ph(aw, 5.0),
        Gate::cx(x, aw),
        ph(aw, 7.0),
        Gate::cx(c, aw),
        Gate::h(x),
    ]);
    g.extend(v);
    g
}

fn toffoli(c1: usize, c2: usize, t: usize) -> Gates {
    vec![
        Gate::h(t),
        Gate::cx(c2, t),
        Gate::tdg(t),
        Gate::cx(c1, t),
        Gate::t(t),
        Gate::cx(c2, t),
        Gate::tdg(t),
        Gate::cx(c1, t),
        Gate::t(c2),
        Gate::t(t),
        Gate::h(t),
        Gate::cx(c1, c2),
        Gate::t(c1),
        Gate::tdg(c2),
        Gate::cx(c1, c2),
    ]
}

/// `C^k Z` on `qubits` via one rotation per nonempty parity set.
fn mcz_parity(qubits: &[usize]) -> Gates {
    let m = qubits.len();
    let scale = PI / (1u64 << (m - 1)) as f64;
    let mut g = Vec::new();
    for set in 1usize..(1 << m) {
        let members: Vec<usize> = (0..m).filter(|b| set >> b & 1 == 1).map(|b| qubits[b]).collect();
        let sign = if members.len() % 2 == 1 { 1.0 } else { -1.0 };
        let (&w, rest) = members.split_last().unwrap();
        rest.iter().for_each(|&q| g.push(Gate::cx(q, w)));
        // e^{i a p} with p in {0,1}: phase on the parity wire
        g.push(Gate::phase(w, sign * scale));
        rest.iter().rev().for_each(|&q| g.push(Gate::cx(q, w)));
    }
    g
}

/// Basis-gate expansion of an `X` on `tgt` controlled by every qubit in `ctrls`.
///
/// `borrowed` is a qubit outside `ctrls ∪ {tgt}` in an arbitrary state.
pub(crate) fn mcx_gates(ctrls: &[usize], tgt: usize, borrowed: Option<usize>) -> Gates {
    let k = ctrls.len();
    match (k, borrowed) {
        (0, _) => vec![Gate::x(tgt)],
        (1, _) => vec![Gate::cx(ctrls[0], tgt)],
        (2, _) => toffoli(ctrls[0], ctrls[1], tgt),
        (3, Some(anc)) => mcx_exact(ctrls, tgt, &[anc]),
        (_, Some(anc)) => {
            let m1 = k.div_ceil(2);
            let (c1, c2) = ctrls.split_at(m1);
            let mut dirty_a: Vec<usize> = c2.to_vec();
            dirty_a.push(tgt);
            let mut ctrl_b: Vec<usize> = c2.to_vec();
            ctrl_b.push(anc);
            let a = mcx_relative(c1, anc, &dirty_a);
            let b = mcx_exact(&ctrl_b, tgt, c1);
            let mut g = a.clone();
            g.extend(b.iter().cloned());
            g.extend(dagger(&a));
            g.extend(b);
            g
        }
        (_, None) => {
            let mut all = ctrls.to_vec();
            all.push(tgt);
            let mut g = vec![Gate::h(tgt)];
            g.extend(mcz_parity(&all));
            g.push(Gate::h(tgt));
            g
        }
    }
}

/// Standalone `C^k X`: controls `0..k`, target `k`, and with `use_ancilla` one
/// borrowed qubit at index `k + 1`.
pub fn build_mcx(n_controls: usize, use_ancilla: bool) -> Result<Circuit> {
    if n_controls == 0 {
        return Err(Error::InvalidParameter("an MCX needs at least one control".into()));
    }
    let ctrls: Vec<usize> = (0..n_controls).collect();
    let borrowed = use_ancilla.then_some(n_controls + 1);
    let n = n_controls + 1 + usize::from(use_ancilla);
    let mut c = Circuit::new(n);
    for g in mcx_gates(&ctrls, n_controls, borrowed) {
        c.push(g);
    }
    Ok(c)
}
