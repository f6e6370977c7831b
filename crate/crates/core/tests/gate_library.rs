mod common;

use std::path::PathBuf;

use parafermion_sim::gates::{
    circuit_matrix, gv_matrix, max_abs_diff, phase_aligned_distance, uh_algebraic, uh_published, uv_algebraic,
    uv_published, GateMatrix, QutritLibrary, SWAP_CIRCUIT, UV_CIRCUIT,
};
use parafermion_sim::pauli::GeneralizedPauli;
use parafermion_sim::protocols::GATE_NAMES;
use parafermion_sim::tableau::derive_clifford_action;
use parafermion_sim::Error;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn published_and_algebraic_move_gates_agree_entrywise() {
    assert!(max_abs_diff(&uv_published(), &uv_algebraic()) < 1e-12);
    assert!(max_abs_diff(&uh_published(), &uh_algebraic()) < 1e-12);
}

#[test]
fn gv_circuit_and_swap_circuit() {
    let lib = QutritLibrary::build().unwrap();
    let lookup = |name: &str| lib.get(name);
    assert!(phase_aligned_distance(&circuit_matrix(UV_CIRCUIT, &lookup), lib.uv.matrix()) < 1e-9);
    assert!(phase_aligned_distance(&circuit_matrix(SWAP_CIRCUIT, &lookup), lib.swap.matrix()) < 1e-9);
    // a mistuned second angle is visibly wrong
    let off = GateMatrix::new("Gv", 3, 1, gv_matrix(lib.theta1, lib.theta2 + 0.05)).unwrap();
    let shifted = |name: &str| if name == "Gv" { Some(off.clone()) } else { lib.get(name) };
    assert!(phase_aligned_distance(&circuit_matrix(UV_CIRCUIT, &shifted), lib.uv.matrix()) > 1e-3);
}

#[test]
fn non_clifford_rotation_is_rejected() {
    let lib = QutritLibrary::build().unwrap();
    let g = GateMatrix::new("Gv(0.3)", 3, 1, gv_matrix(lib.theta1, 0.3)).unwrap();
    assert!(matches!(derive_clifford_action(&g), Err(Error::NotClifford(_))));
}

fn basis_paulis(k: usize) -> impl Iterator<Item = GeneralizedPauli> {
    (0..9usize.pow(k as u32)).map(move |mut idx| {
        let mut x = vec![0u32; k];
        let mut z = vec![0u32; k];
        for t in 0..k {
            x[t] = (idx % 3) as u32;
            idx /= 3;
            z[t] = (idx % 3) as u32;
            idx /= 3;
        }
        GeneralizedPauli::from_dense(3, 0, &x, &z)
    })
}

#[test]
fn tables_reproduce_matrix_conjugation_on_every_basis_pauli() {
    let book = common::book();
    for name in GATE_NAMES {
        let g = book.get(name).unwrap();
        let k = g.matrix.arity();
        let order: Vec<usize> = (0..k).collect();
        let u = g.matrix.matrix();
        for p in basis_paulis(k) {
            let want = u * p.local_matrix(&order).unwrap() * u.adjoint();
            let got = g.action.conjugate_local(&p).local_matrix(&order).unwrap();
            let err = (want - got).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{name} on {}", p.to_text(parafermion_sim::pauli::SiteLabels::Index));
        }
    }
}

#[test]
fn inverse_tables_undo_the_gate() {
    let book = common::book();
    for name in GATE_NAMES {
        let a = &book.get(name).unwrap().action;
        let inv = a.inverse();
        for p in basis_paulis(a.arity()) {
            assert_eq!(inv.conjugate_local(&a.conjugate_local(&p)), p, "{name}");
        }
    }
}

fn tables(names: &[&str]) -> String {
    let book = common::book();
    names.iter().map(|n| format!("# {n}\n{}", book.get(n).unwrap().action.to_text())).collect::<Vec<_>>().join("\n")
}

fn check_golden(file: &str, text: &str) {
    let path = golden(file);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, text).unwrap();
    }
    let want = std::fs::read_to_string(&path).expect("golden table; regenerate with UPDATE_GOLDEN=1");
    assert_eq!(text, want, "{file}");
}

#[test]
fn move_gate_tables_match_golden() {
    check_golden("uv_table.txt", &tables(&["Uv", "Uv†"]));
    check_golden("uh_table.txt", &tables(&["Uh", "Uh†"]));
}
