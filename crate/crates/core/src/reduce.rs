//! Linear-time reduction from plain #SAT to signed #2SAT.
//!
//! Every clause `(c_1 | ... | c_k)` of width at least three is replaced by
//! a fresh variable `y` of weight -1 together with the `k` binary clauses
//! `(!c_j | !y)`. Summing over `y` recovers the original clause value:
//! the `y = 0` branch contributes 1 and the `y = 1` branch contributes -1
//! exactly when the original clause was satisfied, so violating
//! assignments cancel out and satisfying ones survive. Width-1 and
//! width-2 clauses are copied unchanged. The count is preserved exactly
//! while the output width drops to at most two, at the cost of one extra
//! (negative) variable per wide clause.

use std::collections::BTreeMap;

use crate::bounds::InstanceStats;
use crate::formula::{Clause, FormulaError, Literal, Var, WeightedFormula};
use crate::ring::Ring;

/// Where each reduced clause came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseOrigin {
    /// Width <= 2 clause copied unchanged.
    Copied { clause: usize },
    /// `(!c_j | !y)` generated from literal `literal` of a wide clause.
    Generated { clause: usize, literal: usize },
}

/// Bookkeeping connecting a reduced instance back to its source.
///
/// Indices refer to the normalized input formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionMap {
    pub original_variables: u32,
    /// Original wide-clause index -> the fresh variable standing in for it.
    pub fresh_variables: BTreeMap<usize, Var>,
    /// Per reduced clause, its origin.
    pub clause_origins: Vec<ClauseOrigin>,
}

impl ReductionMap {
    /// The fresh variables, i.e. the negative-weight set of the output.
    pub fn negative_set(&self) -> impl Iterator<Item = Var> + '_ {
        self.fresh_variables.values().copied()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReduceError {
    #[error("the reduction is defined for plain instances (all weights 1, all labels 0)")]
    NotPlain,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Reduces a plain instance to width <= 2 with weights in {1, -1}.
///
/// The input is normalized first; the map's clause indices refer to the
/// normalized clause list. Fresh variables are numbered `n+1, n+2, ...`
/// in clause order.
pub fn reduce_to_signed_2sat<R: Ring>(
    formula: &WeightedFormula<R>,
) -> Result<(WeightedFormula<R>, ReductionMap), ReduceError> {
    let formula = formula.normalize()?;
    if !formula.is_plain() {
        return Err(ReduceError::NotPlain);
    }
    let n = formula.variable_count();
    let mut out = WeightedFormula::<R>::new(n);
    let mut map = ReductionMap {
        original_variables: n,
        fresh_variables: BTreeMap::new(),
        clause_origins: Vec::new(),
    };
    for (i, clause) in formula.clauses().iter().enumerate() {
        if clause.width() <= 2 {
            out.push_clause(clause.clone());
            map.clause_origins.push(ClauseOrigin::Copied { clause: i });
        } else {
            let fresh = out.fresh_var();
            out.set_weight(fresh, -R::one());
            map.fresh_variables.insert(i, fresh);
            for (j, lit) in clause.literals.iter().enumerate() {
                out.push_clause(Clause::hard(vec![lit.negate(), Literal::negative(fresh)]));
                map.clause_origins.push(ClauseOrigin::Generated { clause: i, literal: j });
            }
        }
    }
    Ok((out, map))
}

/// Exact size of the reduced instance, from instance statistics alone:
/// `(n + wide clauses, literals in wide clauses + narrow clauses)`.
/// Matches the actual output of [`reduce_to_signed_2sat`] on every
/// normalized instance.
pub fn predict_reduced_size(stats: &InstanceStats) -> (u64, u64) {
    let variables = u64::from(stats.variable_count) + stats.wide_clause_count;
    let clauses = stats.wide_literal_count + (stats.clause_count - stats.wide_clause_count);
    (variables, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::instance_stats;
    use crate::formula::clause;
    use crate::oracle::{brute_force_count, brute_force_parity_count};
    use num::BigInt;
    use std::collections::BTreeSet;

    fn worked_example() -> WeightedFormula<BigInt> {
        WeightedFormula::from_clauses(
            4,
            vec![clause(&[-1, -2, -3]), clause(&[2, 3]), clause(&[-1, 3]), clause(&[3, 4])],
        )
    }

    #[test]
    fn wide_clause_becomes_gadget() {
        let f = WeightedFormula::<BigInt>::from_clauses(3, vec![clause(&[1, 2, 3])]);
        let (reduced, map) = reduce_to_signed_2sat(&f).unwrap();
        assert_eq!(reduced.variable_count(), 4);
        assert_eq!(reduced.weight(Var::new(4)), &BigInt::from(-1));
        assert_eq!(
            reduced.clauses(),
            &[clause::<BigInt>(&[-1, -4]), clause::<BigInt>(&[-2, -4]), clause::<BigInt>(&[-3, -4])]
        );
        assert_eq!(map.fresh_variables, BTreeMap::from([(0, Var::new(4))]));
    }

    #[test]
    fn narrow_clauses_are_untouched() {
        let f = WeightedFormula::<BigInt>::from_clauses(2, vec![clause(&[1, -2])]);
        let (reduced, map) = reduce_to_signed_2sat(&f).unwrap();
        assert_eq!(reduced.variable_count(), 2);
        assert_eq!(reduced.clauses(), f.clauses());
        assert!(map.fresh_variables.is_empty());
        assert_eq!(map.clause_origins, vec![ClauseOrigin::Copied { clause: 0 }]);
    }

    #[test]
    fn worked_example_reduction_preserves_the_count() {
        let f = worked_example();
        let (reduced, map) = reduce_to_signed_2sat(&f).unwrap();
        assert_eq!(reduced.variable_count(), 5);
        assert_eq!(reduced.clause_count(), 6);
        assert_eq!(brute_force_count(&reduced).unwrap(), BigInt::from(7));

        // the same value as a parity difference over the fresh variables
        let negatives: BTreeSet<Var> = map.negative_set().collect();
        let mut plain = reduced.clone();
        for v in &negatives {
            plain.set_weight(*v, BigInt::from(1));
        }
        assert_eq!(brute_force_parity_count(&plain, &negatives).unwrap(), BigInt::from(7));
    }

    #[test]
    fn weighted_input_is_rejected() {
        let mut f = WeightedFormula::<BigInt>::from_clauses(1, vec![clause(&[1])]);
        f.set_weight(Var::new(1), BigInt::from(-1));
        assert_eq!(reduce_to_signed_2sat(&f).unwrap_err(), ReduceError::NotPlain);
    }

    #[test]
    fn predicted_size_matches_actual() {
        let f = worked_example();
        let stats = instance_stats(&f);
        let (reduced, _) = reduce_to_signed_2sat(&f).unwrap();
        assert_eq!(
            predict_reduced_size(&stats),
            (u64::from(reduced.variable_count()), reduced.clause_count() as u64)
        );
        assert_eq!(predict_reduced_size(&stats), (5, 6));
    }

    #[test]
    fn predicted_size_of_narrow_instances_is_identity() {
        let f = WeightedFormula::<BigInt>::from_clauses(3, vec![clause(&[1, 2]), clause(&[-3])]);
        assert_eq!(predict_reduced_size(&instance_stats(&f)), (3, 2));
    }

    #[test]
    fn predicted_size_of_single_wide_clause() {
        let f = WeightedFormula::<BigInt>::from_clauses(5, vec![clause(&[1, 2, 3, 4, 5])]);
        assert_eq!(predict_reduced_size(&instance_stats(&f)), (6, 5));
    }

    #[test]
    fn empty_clauses_pass_through() {
        let f = WeightedFormula::<BigInt>::from_clauses(1, vec![Clause::hard(vec![])]);
        let (reduced, _) = reduce_to_signed_2sat(&f).unwrap();
        assert_eq!(reduced.clause_count(), 1);
        assert_eq!(reduced.clauses()[0].width(), 0);
    }
}
