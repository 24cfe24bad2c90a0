//! Random circuits: translated amplitude against the statevector oracle,
//! and exact clause accounting.

use gapsat_core::circuit::{
    amplitude, circuit_to_weighted_2sat, statevector_amplitude, Gate,
};
use gapsat_core::random::random_circuit;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn amplitudes_match_the_statevector_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    for round in 0..150 {
        let n = rng.random_range(1..=8);
        let g = rng.random_range(0..=30);
        let circuit = random_circuit(&mut rng, n, g);
        let got = amplitude(&circuit).unwrap();
        let want = statevector_amplitude(&circuit).unwrap();
        let tolerance = 1e-9 * f64::max(1.0, want.norm());
        assert!(
            (got - want).norm() <= tolerance,
            "round {round}: {got} vs {want} (n={n}, g={g})"
        );
    }
}

#[test]
fn higher_order_controlled_z_matches_the_oracle() {
    let mut circuit = gapsat_core::circuit::Circuit::new(4);
    circuit.push_gate(Gate::H { qubit: 0 }).unwrap();
    circuit.push_gate(Gate::Ckz { qubits: vec![0, 1, 2, 3] }).unwrap();
    circuit.push_gate(Gate::Rz { qubit: 2, angle: 1.25 }).unwrap();
    let got = amplitude(&circuit).unwrap();
    let want = statevector_amplitude(&circuit).unwrap();
    assert!((got - want).norm() <= 1e-9 * f64::max(1.0, want.norm()), "{got} vs {want}");
    // k + 1 clauses for the C^3Z, two for the H
    assert_eq!(circuit_to_weighted_2sat(&circuit).formula.clause_count(), 6);
}

#[test]
fn clause_accounting_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC7);
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let g = rng.random_range(0..=25);
        let circuit = random_circuit(&mut rng, n, g);
        let mut expected = 0usize;
        let mut only_small_gates = true;
        for gate in circuit.gates() {
            expected += match gate {
                Gate::H { .. } | Gate::Cz { .. } => 2,
                Gate::Ckz { qubits } => {
                    if qubits.len() > 2 {
                        only_small_gates = false;
                    }
                    qubits.len()
                }
                Gate::Rz { .. } => 0,
            };
        }
        let translation = circuit_to_weighted_2sat(&circuit);
        assert_eq!(translation.formula.clause_count(), expected);
        if only_small_gates {
            assert!(translation.formula.clause_count() <= 2 * circuit.gates().len());
        }
    }
}
