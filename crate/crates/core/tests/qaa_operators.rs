use std::f64::consts::PI;

use num_complex::Complex64;
use pite_core::calibration::{calibrate, AlphaSource, CalibrationOptions};
use pite_core::circuit::builders::build_state_prep;
use pite_core::circuit::{metrics, transpile_to_basis, Circuit, Gate};
use pite_core::hamiltonian::{
    maxcut_hamiltonian, DenseRte, GridRte, GridSpec, HamiltonianOracle, IsingRte, RteBuilder, WeightedGraph,
};
use pite_core::linalg::{kron, max_abs_diff, CMatrix};
use pite_core::pite::{approx_pite_circuit, derive_params, pite_block, PiteVariant};
use pite_core::qaa::{
    amplification_q, fused_d_operator, fused_pite_product, multi_step_circuits, oracle_s_chi, pre_amplification,
    MultiStepBuilder, QaaSchedule,
};
use pite_core::QuantumState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_amplitudes(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let d = 1 << n;
    let a = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn hadamards(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    (0..n).for_each(|q| {
        c.push(Gate::h(q));
    });
    c
}

/// `I + (e^{iφ} - 1)|0⟩⟨0|`.
fn dense_zero_reflection(dim: usize, phi: f64) -> CMatrix {
    let mut m = CMatrix::identity(dim, dim);
    m[(0, 0)] = Complex64::from_polar(1.0, phi);
    m
}

/// `diag(e^{iφ}, 1)` on the ancilla.
fn dense_oracle(n_work: usize, phi: f64) -> CMatrix {
    let mut a = CMatrix::identity(2, 2);
    a[(0, 0)] = Complex64::from_polar(1.0, phi);
    kron(&a, &CMatrix::identity(1 << n_work, 1 << n_work))
}

fn good_weight(s: &QuantumState) -> f64 {
    s.marginal(s.n_qubits() - 1, false).unwrap()
}

#[test]
fn oracle_matches_matrix() {
    for phi in [PI, 0.0, 0.7, -2.1] {
        let d = dense_oracle(2, phi);
        assert!(max_abs_diff(&oracle_s_chi(2, phi).unitary(), &d) < 1e-14);
    }
    // -a|good> + b|bad>
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let amps = random_amplitudes(3, &mut rng);
    let mut s = QuantumState::from_amplitudes(amps.clone()).unwrap();
    s.apply(&oracle_s_chi(2, PI)).unwrap();
    for (k, a) in s.amplitudes().iter().enumerate() {
        let want = if k < 4 { -amps[k] } else { amps[k] };
        assert!((a - want).norm() < 1e-14);
    }
}

#[test]
fn amplification_matches_composed_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let u = build_state_prep(&random_amplitudes(3, &mut rng)).unwrap();
    let um = u.unitary();
    for (p1, p2) in [(PI, PI), (0.4, -1.3), (-PI, PI)] {
        let q = amplification_q(&u, p1, p2).unwrap().unitary();
        let want = -(&um * dense_zero_reflection(8, p1) * um.adjoint() * dense_oracle(2, p2));
        assert!(max_abs_diff(&q, &want) < 1e-10);
    }
}

#[test]
fn simulated_amplitude_follows_grover_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let u = build_state_prep(&random_amplitudes(3, &mut rng)).unwrap();
        let q = amplification_q(&u, PI, PI).unwrap();
        let mut s = QuantumState::zero(3).unwrap();
        s.apply(&u).unwrap();
        let theta = good_weight(&s).sqrt().asin();
        let (good_dir, _) = s.postselect(2, false).unwrap();
        for m in 0..=5 {
            let predicted = ((2 * m + 1) as f64 * theta).sin();
            let (branch, p) = s.postselect(2, false).unwrap();
            let signed = branch.inner(&good_dir).unwrap() * p.sqrt();
            assert!((signed.re - predicted).abs() < 1e-9, "m={m}");
            assert!(signed.im.abs() < 1e-9);
            assert!((s.norm() - 1.0).abs() < 1e-12);
            s.apply(&q).unwrap();
        }
    }
}

#[test]
fn amplitude_one_half_reaches_one() {
    // |ψ> = (|0>|0> + √3 |1>|1>)/2 on one working qubit
    let u = build_state_prep(&[
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(3f64.sqrt() / 2.0, 0.0),
    ])
    .unwrap();
    let mut s = QuantumState::zero(2).unwrap();
    s.apply(&u).unwrap();
    s.apply(&amplification_q(&u, PI, PI).unwrap()).unwrap();
    assert!((good_weight(&s) - 1.0).abs() < 1e-12);
}

fn chain_identity(rte: &dyn RteBuilder, u_ref: &Circuit, gamma: f64, dtau: f64, e0: f64) {
    let p = derive_params(gamma, dtau, e0).unwrap();
    let n = rte.n_qubits();
    let mut upr = u_ref.widened(n + 1);
    upr.extend(&approx_pite_circuit(rte, &p));
    let q = amplification_q(&upr, PI, PI).unwrap();
    let qt = pre_amplification(rte, &p, u_ref, PI, PI).unwrap();
    for m in 1..=3 {
        // circuits list gates in time order, so Q^m U means U first
        let lhs_u = upr.clone().then(&q.repeated(m)).unitary();
        let rhs_u = qt.repeated(m).then(&upr).unitary();
        assert!(max_abs_diff(&lhs_u, &rhs_u) < 1e-10, "m={m}");
        let mut a = QuantumState::zero(n + 1).unwrap();
        a.apply(&upr).unwrap();
        a.apply(&q.repeated(m)).unwrap();
        let mut b = QuantumState::zero(n + 1).unwrap();
        b.apply(&qt.repeated(m)).unwrap();
        b.apply(&upr).unwrap();
        assert!((a.inner(&b).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn pre_amplification_chain_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = WeightedGraph::unweighted(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    chain_identity(&IsingRte::new(g), &hadamards(3), 0.55, 0.3, 1.5);
    let h = HamiltonianOracle::new(random_hermitian(2, &mut rng)).unwrap();
    let u_ref = build_state_prep(&random_amplitudes(2, &mut rng)).unwrap();
    chain_identity(&DenseRte::new(h), &u_ref, 0.35, 0.4, 0.2);
    chain_identity(
        &IsingRte::new(WeightedGraph::benchmark()),
        &hadamards(4),
        0.46,
        0.63,
        2.0,
    );
}

#[test]
fn pre_amplification_requires_pi() {
    let rte = IsingRte::new(WeightedGraph::benchmark());
    let p = derive_params(0.5, 0.2, 2.0).unwrap();
    assert!(pre_amplification(&rte, &p, &hadamards(4), 0.3, PI).is_err());
    assert!(pre_amplification(&rte, &p, &hadamards(4), -PI, PI).is_ok());
}

fn ancilla_z(n: usize) -> CMatrix {
    kron(
        &CMatrix::from_diagonal(&pite_core::linalg::CVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ])),
        &CMatrix::identity(1 << n, 1 << n),
    )
}

/// Largest deviation of the fused forms from sequential blocks over 1..=4 steps.
fn fused_deviation(rte: &dyn RteBuilder, e0: f64) -> f64 {
    let n = rte.n_qubits();
    let steps: Vec<_> = [(0.4, 0.3), (0.8, 0.2), (0.6, 0.25), (0.3, 0.5)]
        .iter()
        .map(|&(g, t)| derive_params(g, t, e0).unwrap())
        .collect();
    let z = ancilla_z(n);
    let mut worst: f64 = 0.0;
    for k in 1..=steps.len() {
        let mut seq = Circuit::new(n + 1);
        for p in &steps[..k] {
            seq.extend(&pite_block(rte, p.angles(), PiteVariant::Split));
        }
        let u = seq.unitary();
        worst = worst.max(max_abs_diff(&fused_pite_product(rte, &steps[..k]).unitary(), &u));
        let d = u.adjoint() * &z * &u;
        worst = worst.max(max_abs_diff(&fused_d_operator(rte, &steps[..k]).unitary(), &d));
    }
    worst
}

#[test]
fn fused_products_match_sequential_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rte = DenseRte::new(HamiltonianOracle::new(random_hermitian(2, &mut rng)).unwrap());
    assert!(fused_deviation(&rte, 0.3) < 1e-10);
    let g = WeightedGraph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
    assert!(fused_deviation(&IsingRte::new(g), 1.0) < 1e-10);
}

#[test]
fn trotterized_grid_falls_back_to_exact_forms() {
    let grid = GridSpec::standard(3);
    let rte = GridRte::new(grid);
    assert!(!rte.composes());
    assert!(fused_deviation(&rte, 0.0) < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let r = build_state_prep(&random_amplitudes(3, &mut rng)).unwrap();
    chain_identity(&rte, &r, 0.5, 0.1, 0.0);
    // treating slices as composable is cheaper but no longer exact
    let fused = GridRte::new(grid).fused();
    assert!(fused.composes());
    assert!(fused_deviation(&fused, 0.0) > 1e-6);
}

#[test]
fn single_step_reference_is_pre_amplified_path() {
    let rte = IsingRte::new(WeightedGraph::benchmark());
    let p = derive_params(0.46, 0.63, 2.0).unwrap();
    let ms = multi_step_circuits(&rte, &[p], &QaaSchedule::uniform(1, 1), &hadamards(4)).unwrap();
    let qt = pre_amplification(&rte, &p, &hadamards(4), PI, PI).unwrap();
    let mut want = qt;
    want.extend(&hadamards(4).widened(5))
        .extend(&approx_pite_circuit(&rte, &p));
    let mut a = QuantumState::zero(5).unwrap();
    a.apply(&ms.references[0]).unwrap();
    let mut b = QuantumState::zero(5).unwrap();
    b.apply(&want).unwrap();
    assert!((a.inner(&b).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
}

#[test]
fn deterministic_steps_stay_separable() {
    const DTAU: f64 = 0.1;
    let g = WeightedGraph::benchmark();
    let h = maxcut_hamiltonian(&g).unwrap();
    let rte = IsingRte::new(g);
    let u_ref = hadamards(4);
    let mut psi = QuantumState::zero(4).unwrap();
    psi.apply(&u_ref).unwrap();
    let psi0 = psi.clone();
    let opts = CalibrationOptions {
        fixed_dtau: Some(DTAU),
        ..Default::default()
    };
    let mut b = MultiStepBuilder::new(&rte, &u_ref).unwrap();
    let mut total_tau = 0.0;
    for _ in 0..2 {
        let cal = calibrate(&h, &psi, 2.0, AlphaSource::Circuit(&rte), &opts).unwrap();
        assert!(cal.converged);
        let (_, reference) = b.push(cal.params, cal.m_star);
        let mut s = QuantumState::zero(5).unwrap();
        s.apply(&reference).unwrap();
        assert!((good_weight(&s) - 1.0).abs() < 1e-6);
        assert!(s.ancilla_purity() >= 1.0 - 1e-6);
        total_tau += cal.params.dtau;
        psi = s.postselect(4, false).unwrap().0;
    }
    let exact = QuantumState::from_vector(&(h.ite(0.0, total_tau) * psi0.to_vector()).normalize()).unwrap();
    assert!(1.0 - psi.fidelity(&exact).unwrap() < DTAU * DTAU);
}

#[test]
fn pre_amplification_saves_one_pite_block() {
    let rte = IsingRte::new(WeightedGraph::benchmark());
    let p = derive_params(0.46, 0.63, 2.0).unwrap();
    let r = hadamards(4);
    let mut upr = r.widened(5);
    upr.extend(&approx_pite_circuit(&rte, &p));
    let cnots = |c: &Circuit| metrics(&transpile_to_basis(c, 1).unwrap()).cnot_count as f64;
    let c_q = cnots(&amplification_q(&upr, PI, PI).unwrap());
    let c_qt = cnots(&pre_amplification(&rte, &p, &r, PI, PI).unwrap());
    let c_pite = cnots(&approx_pite_circuit(&rte, &p));
    assert!(c_qt < c_q);
    assert!(((c_q - c_qt) - c_pite).abs() <= 0.1 * c_pite, "{c_q} {c_qt} {c_pite}");
}
