use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use tdvpsim::circuits::{build_family, Circuit, Family, FamilySpec};
use tdvpsim::engine::{Probes, RunOutput};
use tdvpsim::gates::GateOp;
use tdvpsim::metrics::cube_sum;
use tdvpsim::mps::{max_bond_dim, Mps};
use tdvpsim::oracle::{fidelity, mps_to_dense, run_circuit_dense};
use tdvpsim::tdvp::{apply_gate_tdvp, run_circuit_tdvp, TdvpConfig};
use tdvpsim::tebd::{run_circuit_tebd, TebdConfig};

fn spec(family: Family, n: usize, steps: usize) -> FamilySpec {
    match family {
        Family::Ising2d => FamilySpec::grid(2, n / 2, steps),
        f => FamilySpec { seed: 5, ..FamilySpec::new(f, n, steps) },
    }
}

fn lossless_tebd() -> TebdConfig {
    TebdConfig { s_max: 0.0, chi_max: usize::MAX, record_metrics: true }
}

fn check_metrics(out: &RunOutput, n: usize) {
    for m in &out.metrics {
        assert_eq!(m.cost, cube_sum(&m.bond_dims));
        assert_eq!(m.bond_dims.len(), n - 1);
        for (j, &chi) in m.bond_dims.iter().enumerate() {
            assert!(chi >= 1 && chi <= max_bond_dim(n, 2, j + 1));
        }
    }
}

#[test]
fn lossless_tebd_matches_oracle_for_every_family() {
    for family in Family::ALL {
        for n in [4, 6, 10] {
            let c = build_family(&spec(family, n, 3)).unwrap();
            let psi0 = family.default_initial_state().build(c.num_qubits).unwrap();
            let out = run_circuit_tebd(&c, &psi0, &lossless_tebd(), &Probes::default()).unwrap();
            let reference = run_circuit_dense(&c, &mps_to_dense(&psi0).unwrap()).unwrap();
            let f = fidelity(&reference, &mps_to_dense(&out.state).unwrap()).unwrap();
            assert!(f >= 1.0 - 1e-10, "{family} N={n}: {f}");
            check_metrics(&out, c.num_qubits);
        }
    }
}

#[test]
fn engines_agree_on_every_family() {
    for family in Family::ALL {
        let c = build_family(&spec(family, 8, 4)).unwrap();
        let psi0 = family.default_initial_state().build(8).unwrap();
        let probes = Probes::default();
        let a = run_circuit_tebd(&c, &psi0, &TebdConfig::default(), &probes).unwrap();
        let b = run_circuit_tdvp(&c, &psi0, &TdvpConfig::default(), &probes).unwrap();
        check_metrics(&b, 8);
        assert_eq!(a.metrics.len(), b.metrics.len());
        for (x, y) in a.metrics.iter().zip(&b.metrics) {
            assert!((x.correlator - y.correlator).abs() <= 1e-6, "{family} step {}", x.step);
        }
        let f = fidelity(&mps_to_dense(&a.state).unwrap(), &mps_to_dense(&b.state).unwrap()).unwrap();
        assert!(f >= 1.0 - 1e-8, "{family}: {f}");
    }
}

#[test]
fn runs_are_deterministic_apart_from_timing() {
    let c = build_family(&spec(Family::Qaoa, 8, 3)).unwrap();
    let psi0 = Mps::product_state(8, 2, &[0; 8]).unwrap();
    let strip = |out: &RunOutput| {
        out.metrics.iter().map(|m| (m.bond_dims.clone(), m.correlator.to_bits(), m.discarded_weight_cum.to_bits())).collect::<Vec<_>>()
    };
    let cfg = TdvpConfig::new(1e-6, 8).unwrap();
    let a = run_circuit_tdvp(&c, &psi0, &cfg, &Probes::default()).unwrap();
    let b = run_circuit_tdvp(&c, &psi0, &cfg, &Probes::default()).unwrap();
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.state, b.state);
}

#[test]
fn truncated_runs_respect_chi_max() {
    let c = build_family(&spec(Family::Hea, 10, 6)).unwrap();
    let psi0 = Mps::product_state(10, 2, &[0; 10]).unwrap();
    let a = run_circuit_tebd(&c, &psi0, &TebdConfig::new(1e-9, 4).unwrap(), &Probes::default()).unwrap();
    let b = run_circuit_tdvp(&c, &psi0, &TdvpConfig::new(1e-9, 4).unwrap(), &Probes::default()).unwrap();
    for out in [&a, &b] {
        assert!(out.metrics.iter().all(|m| m.max_bond_dim() <= 4));
        assert!(out.discarded_weight_cum > 0.0);
        assert!((out.state.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn empty_circuit_leaves_state_alone() {
    let c = Circuit::new(5);
    let mut rng = StdRng::seed_from_u64(3);
    let psi0 = Mps::random(5, 2, 3, &mut rng);
    let a = run_circuit_tebd(&c, &psi0, &TebdConfig::default(), &Probes::default()).unwrap();
    let b = run_circuit_tdvp(&c, &psi0, &TdvpConfig::default(), &Probes::default()).unwrap();
    assert_eq!(a.state, psi0);
    assert_eq!(b.state, psi0);
    assert!(a.metrics.is_empty() && b.metrics.is_empty());
}

fn any_gate(kind: usize, a: usize, b: usize, theta: f64) -> GateOp {
    match kind {
        0 => GateOp::rzz(a, b, theta),
        1 => GateOp::rxx(a, b, theta),
        2 => GateOp::ryy(a, b, theta),
        3 => GateOp::cx(a, b),
        _ => GateOp::cz(a, b),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // full-rank bonds make the tangent projection the identity, even
    // without basis expansion
    #[test]
    fn saturated_states_are_evolved_exactly(seed in any::<u64>(), kind in 0usize..5, a in 1usize..7, b in 1usize..7, theta in -3.0f64..3.0, expansion in any::<bool>()) {
        prop_assume!(a != b);
        let mut rng = StdRng::seed_from_u64(seed);
        let psi0 = Mps::random(6, 2, 64, &mut rng);
        let g = any_gate(kind, a, b, theta);
        let mut c = Circuit::new(6);
        c.push(g.clone());
        let reference = run_circuit_dense(&c, &mps_to_dense(&psi0).unwrap()).unwrap();
        let mut psi = psi0.clone();
        let cfg = TdvpConfig { s_max: 0.0, expansion, ..TdvpConfig::default() };
        apply_gate_tdvp(&mut psi, &g, &cfg).unwrap();
        let f = fidelity(&reference, &mps_to_dense(&psi).unwrap()).unwrap();
        prop_assert!(f >= 1.0 - 1e-8, "{:?}: {}", g, f);
    }

    #[test]
    fn tdvp_bonds_never_exceed_tebd_by_much(seed in 0u64..1000, steps in 1usize..4) {
        let c = build_family(&FamilySpec { seed, ..FamilySpec::new(Family::Qaoa, 8, steps) }).unwrap();
        let psi0 = Mps::product_state(8, 2, &[0; 8]).unwrap();
        let a = run_circuit_tebd(&c, &psi0, &TebdConfig::default(), &Probes::default()).unwrap();
        let b = run_circuit_tdvp(&c, &psi0, &TdvpConfig::default(), &Probes::default()).unwrap();
        for (x, y) in a.metrics.iter().zip(&b.metrics) {
            prop_assert!(y.total_bond_dim() as f64 <= 1.05 * x.total_bond_dim() as f64);
        }
    }
}
