use num_complex::Complex64;
use pite_core::circuit::{metrics, transpile_to_basis, Gate};
use pite_core::hamiltonian::{maxcut_hamiltonian, DenseRte, HamiltonianOracle, IsingRte, RteBuilder, WeightedGraph};
use pite_core::linalg::{ancilla_zero_block, kron, max_abs_diff, operator_norm, CMatrix};
use pite_core::pite::{
    approx_pite_circuit, approx_pite_circuit_variant, d_one_circuit, d_two_circuit, derive_params, exact_pite_unitary,
    success_probability, two_step_circuit, PiteVariant,
};
use pite_core::QuantumState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let d = 1 << n;
    let a = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn one_q(m: [[f64; 4]; 2]) -> CMatrix {
    // m[0] real parts, m[1] imaginary parts, row-major
    CMatrix::from_fn(2, 2, |r, c| Complex64::new(m[0][2 * r + c], m[1][2 * r + c]))
}

/// Oracle for `W† e^{iAZ} W H` with `A = θ - t(H + e0)`, from the spectrum.
fn first_order_oracle(h: &HamiltonianOracle, theta: f64, t: f64, e0: f64) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let w = one_q([[s, 0.0, s, 0.0], [0.0, -s, 0.0, s]]);
    let had = one_q([[s, s, s, -s], [0.0; 4]]);
    let d = h.dim();
    let plus = h.function(e0, |l| Complex64::from_polar(1.0, theta - t * l));
    let minus = h.function(e0, |l| Complex64::from_polar(1.0, -(theta - t * l)));
    let mut mid = CMatrix::zeros(2 * d, 2 * d);
    mid.view_mut((0, 0), (d, d)).copy_from(&plus);
    mid.view_mut((d, d), (d, d)).copy_from(&minus);
    let eye = CMatrix::identity(d, d);
    kron(&w.adjoint(), &eye) * mid * kron(&(w * had), &eye)
}

fn z_on_ancilla(d: usize) -> CMatrix {
    let z = one_q([[1.0, 0.0, 0.0, -1.0], [0.0; 4]]);
    kron(&z, &CMatrix::identity(d, d))
}

#[test]
fn first_order_circuit_matches_spectral_oracle() {
    let g = WeightedGraph::benchmark();
    let h = maxcut_hamiltonian(&g).unwrap();
    let rte = IsingRte::new(g);
    for (gamma, dtau, e0) in [(0.4, 0.75, 2.0), (0.8, 0.25, 2.0), (0.3, 0.2, 0.0)] {
        let p = derive_params(gamma, dtau, e0).unwrap();
        let u = approx_pite_circuit(&rte, &p).unitary();
        let want = first_order_oracle(&h, p.theta, p.rte_time(), e0);
        assert!(max_abs_diff(&u, &want) < 1e-12);
        let block = ancilla_zero_block(&u);
        // per eigenvalue the block is sin(asin γ - sΔτλ)
        let diag = h.diagonal().unwrap();
        for (k, lam) in diag.iter().enumerate() {
            let want = (gamma.asin() - p.rte_time() * (lam + e0)).sin();
            assert!((block[(k, k)] - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn split_and_fused_layouts_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = HamiltonianOracle::new(random_hermitian(2, &mut rng)).unwrap();
    let rte = DenseRte::new(h);
    let p = derive_params(0.62, 0.3, 0.4).unwrap();
    let a = approx_pite_circuit_variant(&rte, &p, PiteVariant::Split).unitary();
    let b = approx_pite_circuit_variant(&rte, &p, PiteVariant::Fused).unitary();
    assert!(max_abs_diff(&a, &b) < 1e-10);
}

#[test]
fn shifted_parameters_match_rescaled_gamma() {
    // (γ', E0) on H equals (γ'e^{-E0Δτ}, 0) on H for the exact encoding
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = HamiltonianOracle::new(random_hermitian(2, &mut rng)).unwrap();
    let (gp, e0, dtau) = (0.5, 0.3, 0.2);
    let a = exact_pite_unitary(&h, &derive_params(gp, dtau, e0).unwrap()).unwrap();
    let b = exact_pite_unitary(&h, &derive_params(gp * (-e0 * dtau).exp(), dtau, 0.0).unwrap()).unwrap();
    let psi = QuantumState::from_unnormalized((0..8).map(|k| Complex64::new(1.0 + k as f64, 0.5)).collect()).unwrap();
    let mut sa = psi.clone();
    sa.apply_matrix(&a).unwrap();
    let mut sb = psi;
    sb.apply_matrix(&b).unwrap();
    let (ra, pa) = sa.postselect(2, false).unwrap();
    let (rb, pb) = sb.postselect(2, false).unwrap();
    assert!((pa - pb).abs() < 1e-10);
    assert!((ra.fidelity(&rb).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn exact_probability_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = HamiltonianOracle::new(random_hermitian(3, &mut rng)).unwrap();
    let e0 = -h.lambda_min();
    let p = derive_params(0.7, 0.4, e0).unwrap();
    let u = exact_pite_unitary(&h, &p).unwrap();
    let psi = QuantumState::from_unnormalized(
        (0..8)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
    .unwrap();
    let mut s = psi.with_ancillas(1).unwrap();
    s.apply_matrix(&u).unwrap();
    let simulated = s.marginal(3, false).unwrap();
    let predicted = success_probability(&psi, &h, &p).unwrap();
    assert!((simulated - predicted.p0).abs() < 1e-10);
}

#[test]
fn two_step_equals_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = WeightedGraph::unweighted(2, &[(0, 1)]).unwrap();
    let rte = IsingRte::new(g);
    let p2 = derive_params(0.8, 0.2, 0.5).unwrap();
    let p1 = derive_params(0.4, 0.3, 0.5).unwrap();
    let fused = two_step_circuit(&p2, &p1, &rte).unitary();
    let product = approx_pite_circuit(&rte, &p1)
        .then(&approx_pite_circuit(&rte, &p2))
        .unitary();
    assert!(max_abs_diff(&fused, &product) < 1e-10);

    let dense = DenseRte::new(HamiltonianOracle::new(random_hermitian(2, &mut rng)).unwrap());
    let fused = two_step_circuit(&p2, &p1, &dense).unitary();
    let product = approx_pite_circuit(&dense, &p1)
        .then(&approx_pite_circuit(&dense, &p2))
        .unitary();
    assert!(max_abs_diff(&fused, &product) < 1e-10);
}

#[test]
fn two_step_with_equal_params_is_identity() {
    let rte = IsingRte::new(WeightedGraph::benchmark());
    let p = derive_params(0.46, 0.63, 2.0).unwrap();
    let c = two_step_circuit(&p, &p, &rte);
    assert!(c.is_empty());
    let product = approx_pite_circuit(&rte, &p)
        .then(&approx_pite_circuit(&rte, &p))
        .unitary();
    assert!(max_abs_diff(&product, &CMatrix::identity(32, 32)) < 1e-12);
}

#[test]
fn two_step_with_equal_times_leaves_register_alone() {
    let rte = IsingRte::new(WeightedGraph::benchmark());
    let p2 = derive_params(0.6, 0.5, 1.0).unwrap();
    let p1 = derive_params(0.6, 0.5, 2.0).unwrap();
    let c = two_step_circuit(&p2, &p1, &rte);
    assert!(c.gates().iter().all(|g| g.targets == vec![4] && g.controls.is_empty()));
    let product = approx_pite_circuit(&rte, &p1)
        .then(&approx_pite_circuit(&rte, &p2))
        .unitary();
    assert!(max_abs_diff(&c.unitary(), &product) < 1e-12);
}

#[test]
fn d_operators_match_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let rte = DenseRte::new(HamiltonianOracle::new(random_hermitian(2, &mut rng)).unwrap());
    let p = derive_params(0.55, 0.4, 0.2).unwrap();
    let u = approx_pite_circuit(&rte, &p).unitary();
    // -U† (I ⊗ XZX) U with XZX = -Z
    let want = u.adjoint() * z_on_ancilla(4) * &u;
    assert!(max_abs_diff(&d_one_circuit(&rte, &p).unitary(), &want) < 1e-10);

    let p2 = derive_params(0.85, 0.2, 0.2).unwrap();
    let u2 = two_step_circuit(&p2, &p, &rte).unitary();
    let want = u2.adjoint() * z_on_ancilla(4) * &u2;
    assert!(max_abs_diff(&d_two_circuit(&p2, &p, &rte).unitary(), &want) < 1e-10);
}

#[test]
fn fused_rte_squared_equals_doubled_time() {
    let rte = IsingRte::new(WeightedGraph::benchmark());
    let a = rte.rte(0.3).then(&rte.rte(0.3)).unitary();
    assert!(max_abs_diff(&a, &rte.rte(0.6).unitary()) < 1e-12);
}

#[test]
fn first_order_error_is_quadratic() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let h = HamiltonianOracle::new(random_hermitian(2, &mut rng)).unwrap();
    let e0 = -h.lambda_min();
    let rte = DenseRte::new(h.clone());
    let err = |dtau: f64| {
        let p = derive_params(0.5, dtau, e0).unwrap();
        let approx = approx_pite_circuit(&rte, &p).unitary();
        operator_norm(&(approx - exact_pite_unitary(&h, &p).unwrap()))
    };
    let ratio = err(0.02) / err(0.01);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn benchmark_circuit_cost() {
    let rte = IsingRte::new(WeightedGraph::benchmark());
    let p = derive_params(0.46, 0.63, 2.0).unwrap();
    let t = transpile_to_basis(&approx_pite_circuit(&rte, &p), 1).unwrap();
    let m = metrics(&t);
    assert_eq!(t.n_qubits(), 5);
    assert_eq!(m.cnot_count, 26);
    eprintln!("depth {}", m.depth);
}

#[test]
fn zero_time_block_is_ancilla_only() {
    let rte = IsingRte::new(WeightedGraph::benchmark());
    let c = pite_core::pite::pite_block(
        &rte,
        pite_core::pite::PiteAngles { theta: 0.1, time: 0.0 },
        PiteVariant::Fused,
    );
    assert!(c.gates().iter().all(|g: &Gate| g.targets == vec![4]));
}
