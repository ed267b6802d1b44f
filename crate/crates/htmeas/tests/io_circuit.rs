//! Serialization round trips and circuit constructions checked densely.

mod common;

use htmeas::circuit::{diag_circuit, emit_qasm, exp_pauli_z, parse_qasm, trotter_step, Circuit};
use htmeas::grouping::{ht_group, sorted_insertion};
use htmeas::hwgraph::{linear, subgraphs_all};
use htmeas::io::{grouping_from_json, grouping_to_json, parse_hamiltonian, write_hamiltonian};
use htmeas::oracle::{circuit_unitary, expm_i, observable_matrix, pauli_matrix, verify_collection};
use htmeas::{fixtures, PauliOp, PauliTerm, Predicate, SolverConfig, ValueFn};
use num_complex::Complex64;

#[test]
fn hamiltonian_text_round_trip() {
    let h = fixtures::h4();
    assert_eq!(h.terms.len(), 184);
    assert_eq!(parse_hamiltonian(&write_hamiltonian(&h)).unwrap(), h);
}

#[test]
fn grouping_json_round_trip() {
    let h = fixtures::h4();
    let conn = linear(8).unwrap();
    let groupings = [
        sorted_insertion(&h.terms, Predicate::Gc).unwrap(),
        sorted_insertion(&h.terms, Predicate::Qwc)
            .unwrap()
            .with_tpb_readouts()
            .unwrap(),
        ht_group(
            &h.terms,
            &conn,
            &subgraphs_all(&conn).unwrap(),
            SolverConfig::default(),
            ValueFn::SizeWeighted,
        )
        .unwrap(),
    ];
    for g in groupings {
        let text = grouping_to_json(&g);
        assert_eq!(grouping_from_json(&text).unwrap(), g);
    }
}

#[test]
fn grouping_json_rejects_bad_fields() {
    let g = sorted_insertion(&common::terms(&[("ZZ", 1.0), ("XX", 0.5)]), Predicate::Qwc)
        .unwrap()
        .with_tpb_readouts()
        .unwrap();
    let good = grouping_to_json(&g);
    assert!(grouping_from_json(&good.replace("\"schema\": 1", "\"schema\": 2")).is_err());
    assert!(
        grouping_from_json(&good.replace("\"HSH\"", "\"Q\"").replace("\"H\"", "\"Q\"")).is_err()
    );
    assert!(grouping_from_json(&good.replace("\"pauli\": \"ZZ\"", "\"pauli\": \"ZZZ\"")).is_err());
}

#[test]
fn tampered_targets_fail_verification() {
    let g = sorted_insertion(&common::terms(&[("ZZ", 1.0), ("XX", 0.5)]), Predicate::Qwc)
        .unwrap()
        .with_tpb_readouts()
        .unwrap();
    let text = grouping_to_json(&g).replacen("\"sign\": 1", "\"sign\": -1", 1);
    let bad = grouping_from_json(&text).unwrap();
    let failures: usize = bad
        .collections
        .iter()
        .map(|c| verify_collection(c, 2).unwrap().len())
        .sum();
    assert_eq!(failures, 1);
}

#[test]
fn qasm_round_trip_preserves_the_unitary() {
    let h = fixtures::h4();
    let conn = linear(8).unwrap();
    let g = ht_group(
        &h.terms[..60],
        &conn,
        &subgraphs_all(&conn).unwrap(),
        SolverConfig::default(),
        ValueFn::Size,
    )
    .unwrap();
    for c in &g.collections {
        let r = c.readout.as_ref().unwrap();
        let circ = diag_circuit(&r.layer, &r.template).unwrap();
        let back = parse_qasm(&emit_qasm(&circ)).unwrap();
        let (u, v) = (
            circuit_unitary(&circ).unwrap(),
            circuit_unitary(&back).unwrap(),
        );
        assert!(u.max_diff(&v) < 1e-12);
    }
}

#[test]
fn qasm_with_measurements_parses() {
    let mut c = exp_pauli_z(&"ZZZ".parse::<PauliOp>().unwrap().s().clone(), 0.3).unwrap();
    c.measure_all();
    let text = emit_qasm(&c);
    assert!(text.starts_with("OPENQASM 2.0;"));
    assert!(text.contains("creg c[3];"));
    assert_eq!(parse_qasm(&text).unwrap(), c);
}

#[test]
fn pauli_z_exponential_is_exact() {
    for (s, c) in [("Z", 0.3), ("ZZ", -0.7), ("ZIZ", 1.1), ("IZZZ", 0.25)] {
        let p: PauliOp = s.parse().unwrap();
        let circ = exp_pauli_z(p.s(), c).unwrap();
        let want = expm_i(&pauli_matrix(&p).unwrap().scale(Complex64::new(c, 0.0)));
        assert!(
            circuit_unitary(&circ).unwrap().max_diff(&want) < 1e-10,
            "{s}"
        );
    }
}

fn trotter_errors(terms: &[PauliTerm]) -> Vec<f64> {
    let n = terms[0].op.n();
    let g = ht_group(
        terms,
        &linear(n).unwrap(),
        &subgraphs_all(&linear(n).unwrap()).unwrap(),
        SolverConfig::default(),
        ValueFn::SizeWeighted,
    )
    .unwrap();
    let exact = expm_i(&observable_matrix(n, terms).unwrap());
    [1, 2, 4, 8]
        .iter()
        .map(|&k| {
            let u = circuit_unitary(&trotter_step(&g, k).unwrap()).unwrap();
            u.add(&exact.scale(Complex64::new(-1.0, 0.0))).frobenius()
        })
        .collect()
}

#[test]
fn trotter_error_halves_with_doubled_steps() {
    let mut rng = common::rng(51);
    let terms = common::random_hamiltonian(&mut rng, 3, 10);
    let errs = trotter_errors(&terms);
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.5..=2.5).contains(&ratio), "errors {errs:?}");
    }
}

#[test]
fn single_collection_trotter_is_exact() {
    let terms = common::terms(&[("ZZI", 0.4), ("IZZ", -0.3), ("ZIZ", 0.9)]);
    let errs = trotter_errors(&terms);
    assert!(errs.iter().all(|&e| e < 1e-10), "{errs:?}");
}

#[test]
fn inverse_circuit_undoes_the_circuit() {
    let h = fixtures::h4();
    let conn = linear(8).unwrap();
    let g = ht_group(
        &h.terms[..40],
        &conn,
        &subgraphs_all(&conn).unwrap(),
        SolverConfig::default(),
        ValueFn::Size,
    )
    .unwrap();
    let r = g.collections.last().unwrap().readout.as_ref().unwrap();
    let c = diag_circuit(&r.layer, &r.template).unwrap();
    let mut both = Circuit::new(8);
    both.extend(&c).unwrap();
    both.extend(&c.inverse().unwrap()).unwrap();
    assert!(
        circuit_unitary(&both)
            .unwrap()
            .max_diff(&htmeas::oracle::DenseMatrix::identity(256))
            < 1e-10
    );
}
