//! Random instance and circuit generators, used by the differential test
//! suites and handy for fuzzing the solver against the oracle.

use rand::Rng;

use crate::circuit::{Circuit, Gate};
use crate::formula::{Clause, Literal, Var, WeightedFormula};
use crate::ring::Ring;

/// A random plain CNF: `clause_count` clauses of width uniform in
/// `1..=max_width` over distinct variables with independent polarities.
pub fn random_plain_formula<R: Ring>(
    rng: &mut impl Rng,
    variable_count: u32,
    clause_count: u32,
    max_width: u32,
) -> WeightedFormula<R> {
    assert!(variable_count >= 1);
    let mut formula = WeightedFormula::new(variable_count);
    let max_width = max_width.min(variable_count);
    for _ in 0..clause_count {
        let width = rng.random_range(1..=max_width.max(1));
        let mut vars: Vec<u32> = Vec::with_capacity(width as usize);
        while vars.len() < width as usize {
            let v = rng.random_range(1..=variable_count);
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let literals = vars
            .into_iter()
            .map(|v| Literal { var: Var::new(v), negated: rng.random_bool(0.5) })
            .collect();
        formula.push_clause(Clause::hard(literals));
    }
    formula
}

/// Clause count for a target density `m/n`, at least 1.
pub fn clauses_for_density(variable_count: u32, density: f64) -> u32 {
    ((f64::from(variable_count) * density).round() as u32).max(1)
}

/// A random plain CNF plus a random weight from `weights` on each variable.
pub fn random_weighted_formula<R: Ring>(
    rng: &mut impl Rng,
    variable_count: u32,
    clause_count: u32,
    max_width: u32,
    weights: &[R],
) -> WeightedFormula<R> {
    let mut formula = random_plain_formula(rng, variable_count, clause_count, max_width);
    for v in 1..=variable_count {
        let w = weights[rng.random_range(0..weights.len())].clone();
        formula.set_weight(Var::new(v), w);
    }
    formula
}

/// A random circuit over {H, CZ, CCZ, Rz} with angles uniform in [0, 2pi).
pub fn random_circuit(rng: &mut impl Rng, qubit_count: u32, gate_count: u32) -> Circuit {
    assert!(qubit_count >= 1);
    let mut circuit = Circuit::new(qubit_count);
    let distinct = |count: usize, rng: &mut dyn rand::RngCore| {
        let mut qs: Vec<u32> = Vec::with_capacity(count);
        while qs.len() < count {
            let q = rng.random_range(0..qubit_count);
            if !qs.contains(&q) {
                qs.push(q);
            }
        }
        qs
    };
    for _ in 0..gate_count {
        let max_kind = if qubit_count >= 3 { 4 } else if qubit_count >= 2 { 3 } else { 2 };
        let gate = match rng.random_range(0..max_kind) {
            0 => Gate::H { qubit: rng.random_range(0..qubit_count) },
            1 => Gate::Rz {
                qubit: rng.random_range(0..qubit_count),
                angle: rng.random_range(0.0..std::f64::consts::TAU),
            },
            2 => {
                let qs = distinct(2, rng);
                Gate::Cz { a: qs[0], b: qs[1] }
            }
            _ => Gate::Ckz { qubits: distinct(3, rng) },
        };
        circuit.push_gate(gate).expect("generated gates are valid");
    }
    circuit
}
