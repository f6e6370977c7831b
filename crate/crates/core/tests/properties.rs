mod common;

use num_complex::Complex64;
use parafermion_sim::lattice::{BoundaryMode, Lattice};
use parafermion_sim::pauli::{GeneralizedPauli, SiteLabels};
use parafermion_sim::protocols::{Protocol, PrepMethod, GATE_NAMES};
use parafermion_sim::resources::{count_resources, fidelity_product, fidelity_threshold};
use parafermion_sim::statevector::StateVector;
use parafermion_sim::tableau::StabilizerTableau;
use proptest::prelude::*;

const D: u32 = 3;

fn pauli(n: usize) -> impl Strategy<Value = GeneralizedPauli> {
    (0..D, prop::collection::vec(0..D, n), prop::collection::vec(0..D, n))
        .prop_map(|(ph, x, z)| GeneralizedPauli::from_dense(D, ph as i64, &x, &z))
}

fn max_entry(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(gate, targets)` drawn from the script gate set on `n` qudits.
fn circuit(n: usize, len: usize) -> impl Strategy<Value = Vec<(&'static str, Vec<usize>)>> {
    let step = (0..GATE_NAMES.len(), Just(()).prop_perturb(move |_, mut rng| {
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        vec![a, b]
    }))
        .prop_map(|(g, t)| (GATE_NAMES[g], t));
    prop::collection::vec(step, 1..=len)
}

fn arity(name: &str) -> usize {
    common::book().get(name).unwrap().matrix.arity()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_and_commutation_match_matrices(a in pauli(2), b in pauli(2)) {
        let order = [0, 1];
        let (ma, mb) = (a.local_matrix(&order).unwrap(), b.local_matrix(&order).unwrap());
        let ab = a.mul(&b).unwrap();
        prop_assert!(max_entry(&(ab.local_matrix(&order).unwrap() - &ma * &mb)) < 1e-12);
        // ab = ω^s ba
        let s = a.commutation_exponent(&b).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / 3.0);
        prop_assert!(max_entry(&(&ma * &mb - (&mb * &ma) * w)) < 1e-12);
        prop_assert_eq!((s + b.commutation_exponent(&a).unwrap()) % 3, 0);
    }

    #[test]
    fn multiplication_is_associative(a in pauli(3), b in pauli(3), c in pauli(3)) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pauli_text_round_trips(p in pauli(4)) {
        let text = p.to_text(SiteLabels::Index);
        prop_assert_eq!(GeneralizedPauli::parse(&text, D, SiteLabels::Index).unwrap(), p.clone());
        let grid = SiteLabels::Grid { cols: 2 };
        prop_assert_eq!(GeneralizedPauli::parse(&p.to_text(grid), D, grid).unwrap(), p);
    }

    #[test]
    fn tableau_matches_dense_state_on_random_cliffords(c in circuit(3, 12), probes in prop::collection::vec(pauli(3), 8)) {
        let book = common::book();
        let mut t = StabilizerTableau::new(3, D).unwrap();
        let mut s = StateVector::zero(D, 3).unwrap();
        for (g, targets) in &c {
            let gate = book.get(g).unwrap();
            let on = &targets[..arity(g)];
            t.apply_clifford(&gate.action, on).unwrap();
            s.apply_gate(&gate.matrix, on).unwrap();
        }
        for p in t.generators() {
            prop_assert!((s.expectation(p).unwrap() - 1.0).norm() < 1e-10);
        }
        for p in &probes {
            prop_assert!((t.group_expectation(p).unwrap() - s.expectation(p).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn gate_then_inverse_restores_the_tableau(c in circuit(4, 10), g in 0..GATE_NAMES.len(), a in 0usize..4) {
        let book = common::book();
        let mut t = StabilizerTableau::new(4, D).unwrap();
        for (name, targets) in &c {
            t.apply_clifford(&book.get(name).unwrap().action, &targets[..arity(name)]).unwrap();
        }
        let before = t.generators().to_vec();
        let act = &book.get(GATE_NAMES[g]).unwrap().action;
        let on = [a, (a + 1) % 4];
        let on = &on[..act.arity()];
        t.apply_clifford(act, on).unwrap();
        t.apply_clifford(&act.inverse(), on).unwrap();
        prop_assert_eq!(t.generators(), &before[..]);
    }

    #[test]
    fn thresholds_round_trip(target in 0.01f64..0.999, n in 1u64..500) {
        let f = fidelity_threshold(target, n).unwrap();
        prop_assert!((fidelity_product(f, n) - target).abs() < 1e-12);
        prop_assert!(f >= target);
    }

    #[test]
    fn plaquette_stabilizers_commute(rows in 3usize..8, cols in 3usize..8) {
        let l = Lattice::new(rows, cols, D, BoundaryMode::FullPlaquettesOnly).unwrap();
        prop_assert_eq!(l.plaquettes().len(), (rows - 1) * (cols - 1));
        let ops: Vec<_> = (0..l.plaquettes().len()).map(|i| l.stabilizer(i)).collect();
        for a in &ops {
            for b in &ops {
                prop_assert!(a.commutes_with(b));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn prep_scripts_round_trip_with_identical_counts(rows in 3usize..7, cols in 3usize..7) {
        let p = common::prep(rows, cols, PrepMethod::Circuit);
        let back = Protocol::parse(&p.to_text()).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(count_resources(&back), count_resources(&p));
    }

    #[test]
    fn circuit_prep_fixes_every_plaquette(rows in 3usize..9, cols in 3usize..9) {
        let l = common::lattice(rows, cols);
        let p = common::prep(rows, cols, PrepMethod::Circuit);
        let mut t = StabilizerTableau::new(p.qudits, D).unwrap();
        parafermion_sim::protocols::execute(&p, common::book(), &mut t).unwrap();
        for i in 0..l.plaquettes().len() {
            prop_assert_eq!(t.expectation_phase(&l.stabilizer(i)).unwrap(), Some(0));
        }
    }

    #[test]
    fn commutation_survives_long_random_circuits(c in circuit(6, 1000)) {
        let book = common::book();
        let mut t = StabilizerTableau::new(6, D).unwrap();
        for (name, targets) in &c {
            t.apply_clifford(&book.get(name).unwrap().action, &targets[..arity(name)]).unwrap();
        }
        prop_assert!(t.check_invariants().is_ok());
    }
}
