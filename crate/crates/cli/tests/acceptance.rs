//! Acceptance suite. One test per criterion; each prints a PASS/FAIL line
//! (run with `--nocapture` to see them on success).
//!
//! Criterion 7 is split in two: 7a covers every reference constant that is
//! reproducible from the stored bases, and 7b pins the published
//! per-variable exponent 0.3068, which is inconsistent with its own base
//! (log2(1.2377) = 0.30766, and the 2.2503 threshold only follows from
//! the latter). 7b is kept at its stated tolerance instead of being
//! loosened to fit, so it fails by design.

use std::collections::BTreeSet;
use std::process::Command;

use gapsat_core::bounds::{self, instance_stats};
use gapsat_core::circuit::{amplitude, circuit_to_weighted_2sat, statevector_amplitude, Gate};
use gapsat_core::oracle::{brute_force_count, brute_force_parity_count};
use gapsat_core::random::{
    clauses_for_density, random_circuit, random_plain_formula, random_weighted_formula,
};
use gapsat_core::reduce::reduce_to_signed_2sat;
use gapsat_core::solver::{
    cdp, cdp_3to2, cdp_to2, cdp_weighted, BranchStrategy, SolveOptions,
};
use gapsat_core::formula::clause;
use gapsat_core::{Int, IntFormula, Rational, RationalFormula, Var};
use num::traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn report(name: &str, pass: bool) {
    println!("criterion {name}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {name} failed");
}

#[test]
fn criterion_1_oracle_equivalence() {
    let mut rng = rng(101);
    let opts = SolveOptions::default();
    for round in 0..500 {
        let n = rng.random_range(4..=12);
        let k = rng.random_range(1..=6);
        let delta = rng.random_range(0.2..=3.0);
        let f: IntFormula = random_plain_formula(&mut rng, n, clauses_for_density(n, delta), k);
        let expected = brute_force_count(&f).unwrap();
        assert_eq!(cdp(&f, &opts).unwrap().count, expected, "cdp, round {round}");
        assert_eq!(cdp_to2(&f, &opts).unwrap().count, expected, "cdp_to2, round {round}");
        let width = f.clauses().iter().map(|c| c.width()).max().unwrap_or(0);
        if width <= 3 {
            assert_eq!(cdp_3to2(&f, &opts).unwrap().count, expected, "cdp_3to2, round {round}");
        }
    }
    report("1 (oracle equivalence, 500 instances)", true);
}

#[test]
fn criterion_2_reduction_identity() {
    let mut rng = rng(202);
    let mut produced = 0;
    while produced < 500 {
        let n = rng.random_range(3..=10);
        let delta = rng.random_range(0.2..=1.2);
        let k = rng.random_range(1..=6);
        let f: IntFormula = random_plain_formula(&mut rng, n, clauses_for_density(n, delta), k);
        let stats = instance_stats(&f.normalize().unwrap());
        if u64::from(n) + stats.wide_clause_count > 16 {
            continue; // keep the reduced instance enumerable in a blink
        }
        produced += 1;
        let expected = brute_force_count(&f).unwrap();
        let (reduced, map) = reduce_to_signed_2sat(&f).unwrap();
        assert_eq!(brute_force_count(&reduced).unwrap(), expected, "weighted count");
        let negatives: BTreeSet<Var> = map.negative_set().collect();
        let mut plain = reduced.clone();
        for &v in &negatives {
            plain.set_weight(v, Int::from(1));
        }
        assert_eq!(
            brute_force_parity_count(&plain, &negatives).unwrap(),
            expected,
            "parity count"
        );
    }
    report("2 (reduction identity, 500 instances)", true);
}

#[test]
fn criterion_3_signed_count_identity() {
    let mut rng = rng(303);
    for round in 0..200 {
        let n = rng.random_range(3..=12);
        let delta = rng.random_range(0.2..=3.0);
        let k = rng.random_range(1..=5);
        let f: IntFormula = random_plain_formula(&mut rng, n, clauses_for_density(n, delta), k);
        let negatives: BTreeSet<Var> = f.variables().filter(|_| rng.random_bool(0.5)).collect();
        let mut signed = f.clone();
        for &v in &negatives {
            signed.set_weight(v, Int::from(-1));
        }
        let by_weights = brute_force_count(&signed).unwrap();
        let by_parity = brute_force_parity_count(&f, &negatives).unwrap();
        assert_eq!(by_weights, by_parity, "round {round}");
        assert_eq!(
            cdp_weighted(&signed, &SolveOptions::default()).unwrap().count,
            by_parity,
            "solver, round {round}"
        );
    }
    report("3 (signed-count identity, 200 instances)", true);
}

#[test]
fn criterion_4_worked_example() {
    let f = worked_example();
    let expected = brute_force_count(&f).unwrap();
    assert_eq!(expected, Int::from(7));
    for strategy in [
        BranchStrategy::MaxOccurrence,
        BranchStrategy::MaxDegreeShortestClause,
        BranchStrategy::Max3Degree,
        BranchStrategy::FirstUnassigned,
    ] {
        let opts = SolveOptions { strategy, ..SolveOptions::default() };
        assert_eq!(cdp(&f, &opts).unwrap().count, Int::from(7), "cdp/{strategy:?}");
        assert_eq!(cdp_weighted(&f, &opts).unwrap().count, Int::from(7), "weighted/{strategy:?}");
        assert_eq!(cdp_to2(&f, &opts).unwrap().count, Int::from(7), "to2/{strategy:?}");
        assert_eq!(cdp_3to2(&f, &opts).unwrap().count, Int::from(7), "3to2/{strategy:?}");
    }
    let out = gapsat(&["count", "--algo", "cdp2", &data("example.cnf")]);
    assert_eq!(out, "7\n");
    report("4 (worked example counts to 7 everywhere)", true);
}

#[test]
fn criterion_5_degree_one_absorption() {
    let weights = [
        Rational::new(Int::from(1), Int::from(2)),
        Rational::new(Int::from(1), Int::from(1)),
        Rational::new(Int::from(3), Int::from(2)),
        Rational::new(Int::from(2), Int::from(1)),
    ];
    let mut rng = rng(505);
    for round in 0..200 {
        let n = rng.random_range(3..=10);
        let delta = rng.random_range(0.2..=2.0);
        let k = rng.random_range(1..=4);
        let f: RationalFormula =
            random_weighted_formula(&mut rng, n, clauses_for_density(n, delta), k, &weights);
        let off = cdp_weighted(&f, &SolveOptions::default()).unwrap().count;
        let on = cdp_weighted(
            &f,
            &SolveOptions { absorb_degree_one: true, ..SolveOptions::default() },
        )
        .unwrap()
        .count;
        // exact rationals: equality, strictly tighter than the 1e-12 bound
        assert_eq!(on, off, "round {round}");
    }
    report("5 (degree-one absorption, 200 instances, exact)", true);
}

#[test]
fn criterion_6_circuit_amplitudes() {
    let mut rng = rng(606);
    for round in 0..200 {
        let n = rng.random_range(1..=8);
        let g = rng.random_range(0..=30);
        let circuit = random_circuit(&mut rng, n, g);
        let got = amplitude(&circuit).unwrap();
        let want = statevector_amplitude(&circuit).unwrap();
        assert!(
            (got - want).norm() <= 1e-9 * f64::max(1.0, want.norm()),
            "round {round}: {got} vs {want}"
        );
        let (mut h_cz, mut ccz) = (0usize, 0usize);
        for gate in circuit.gates() {
            match gate {
                Gate::H { .. } | Gate::Cz { .. } => h_cz += 1,
                Gate::Ckz { qubits } => {
                    assert_eq!(qubits.len(), 3, "generator emits CCZ only");
                    ccz += 1;
                }
                Gate::Rz { .. } => {}
            }
        }
        let translation = circuit_to_weighted_2sat(&circuit);
        assert_eq!(translation.formula.clause_count(), 2 * h_cz + 3 * ccz, "round {round}");
    }
    report("6 (circuit amplitudes vs statevector, 200 circuits)", true);
}

#[test]
fn criterion_7a_reference_constants() {
    let close = |got: f64, want: f64, tol: f64| {
        assert!((got - want).abs() <= tol, "computed {got:.6} vs published {want} (tol {tol})");
    };
    close(bounds::density_improvement_threshold(), 2.2503, 5e-4);
    close(bounds::three_sat_base(5), 1.5829, 5e-4);
    close(bounds::three_sat_base(4), 1.5463, 5e-4);
    close(bounds::three_sat_base(7), 1.6350, 5e-4);
    let d5 = bounds::three_sat_branch_fraction(5).to_f64().unwrap();
    close(d5, 0.3074, 1e-4);
    close(bounds::circuit_exponent_base(1), 1.3783, 1e-3);
    close(bounds::circuit_exponent_base(2), 1.6181, 1e-3);
    close(bounds::naive_ccz_base(), 6.8552, 1e-3);
    close(bounds::TWO_SAT_CLAUSE_BASE.sqrt(), 1.0835, 5e-4);
    // flagged: the published degree threshold against its recomputation
    let recomputed = bounds::average_degree_improvement_threshold();
    println!(
        "  degree threshold: published {} / recomputed {recomputed:.5}",
        bounds::PUBLISHED_AVERAGE_DEGREE_THRESHOLD
    );
    close(recomputed, bounds::PUBLISHED_AVERAGE_DEGREE_THRESHOLD, 2e-3);
    report("7a (reference constants reproduced)", true);
}

#[test]
fn criterion_7b_printed_per_variable_exponent() {
    // The printed figure 0.3068 cannot be reproduced from the stored base:
    // log2(1.2377) = 0.30766, and the published 2.2503 threshold equals
    // 1/0.30766 - 1, confirming 0.30766. The stated tolerance is kept.
    let computed = bounds::variable_base_exponent();
    let published = 0.3068;
    let dev = (computed - published).abs();
    report(
        &format!(
            "7b (printed exponent {published} +-0.0002; computed log2(1.2377) = {computed:.5})"
        ),
        dev <= 2e-4,
    );
}

#[test]
fn criterion_8_large_instance_node_counts() {
    let mut rng = rng(808);
    let opts = SolveOptions { node_cap: Some(10_000_000), ..SolveOptions::default() };
    let mut node_counts = Vec::new();
    for round in 0..50 {
        let n = rng.random_range(28..=32);
        let delta = rng.random_range(0.5..=1.0);
        let k = rng.random_range(4..=6);
        let f: IntFormula = random_plain_formula(&mut rng, n, clauses_for_density(n, delta), k);
        let result = cdp_to2(&f, &opts).unwrap_or_else(|e| panic!("round {round}: {e}"));
        node_counts.push(result.stats.branch_nodes);
    }
    node_counts.sort_unstable();
    println!(
        "  branch nodes over 50 runs: min {} / median {} / max {} (cap 10^7)",
        node_counts[0],
        node_counts[25],
        node_counts[49]
    );
    report("8 (node counts recorded under the 10^7 cap, no exponent asserted)", true);
}

#[test]
fn criterion_9_cli_determinism() {
    let example = data("example.cnf");
    let signed = data("signed.cnf");
    let complex = data("complex.cnf");
    let bell = data("bell.qc");
    let phase = data("phase.qc");
    let invocations: Vec<Vec<&str>> = vec![
        vec!["count", &example],
        vec!["count", "--algo", "cdp2", &example],
        vec!["count", "--algo", "cdp3to2", &example],
        vec!["count", "--algo", "weighted", "--stats", &example],
        vec!["count", "--algo", "weighted", "--absorb", "--no-components", &signed],
        vec!["count", "--strategy", "max-occ", "--format", "key-value", "--stats", &example],
        vec!["count", "--check", &example],
        vec!["count", "--algo", "weighted", "--check", &signed],
        vec!["count", "--algo", "weighted", "--check", "--absorb", &complex],
        vec!["oracle", &example],
        vec!["oracle", &signed],
        vec!["oracle", &complex],
        vec!["reduce", &example],
        vec!["stats", &example],
        vec!["stats", &signed],
        vec!["stats", &complex],
        vec!["amplitude", &bell],
        vec!["amplitude", "--check", "--stats", &phase],
        vec!["amplitude", "--boundary", "zero", "--check", &phase],
    ];
    for args in &invocations {
        let first = gapsat(args);
        let second = gapsat(args);
        assert_eq!(first, second, "non-deterministic stdout for {args:?}");
        assert!(!first.is_empty(), "no output for {args:?}");
    }
    report("9 (byte-identical stdout across repeated runs)", true);
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn gapsat(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_gapsat"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "gapsat {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

fn worked_example() -> IntFormula {
    IntFormula::from_clauses(
        4,
        vec![clause(&[-1, -2, -3]), clause(&[2, 3]), clause(&[-1, 3]), clause(&[3, 4])],
    )
}
