//! Exhaustive-enumeration ground truth for every counting semantics in the
//! crate. Everything else is tested against this module.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::traits::Zero;

use crate::formula::{Assignment, FormulaError, Var, WeightedFormula};
use crate::ring::Ring;

/// Default refusal bound for `2^n` enumeration.
pub const DEFAULT_ENUMERATION_CAP: u32 = 25;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {variable_count} variables, over the enumeration cap {cap}")]
    CapExceeded { variable_count: u32, cap: u32 },
    #[error("parity counting is defined for plain instances (all weights 1, all labels 0)")]
    NotPlain,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Sums `evaluate` over all `2^n` assignments, in lexicographic order.
pub fn brute_force_count<R: Ring>(formula: &WeightedFormula<R>) -> Result<R, OracleError> {
    brute_force_count_capped(formula, DEFAULT_ENUMERATION_CAP)
}

/// As [`brute_force_count`] with an explicit enumeration cap (effectively
/// limited to 63, the widest enumerable assignment word).
pub fn brute_force_count_capped<R: Ring>(
    formula: &WeightedFormula<R>,
    cap: u32,
) -> Result<R, OracleError> {
    let n = formula.variable_count();
    if n > cap.min(63) {
        return Err(OracleError::CapExceeded { variable_count: n, cap: cap.min(63) });
    }
    let mut total = R::zero();
    let mut assignment = Assignment::new(n);
    for bits in 0..1u64 << n {
        for i in 0..n {
            assignment.set(Var::new(i + 1), bits >> i & 1 == 1);
        }
        total = total + formula.evaluate(&assignment)?;
    }
    Ok(total)
}

/// Signed count of a plain instance: satisfying assignments with even
/// parity over `negatives` minus those with odd parity.
pub fn brute_force_parity_count<R: Ring>(
    formula: &WeightedFormula<R>,
    negatives: &BTreeSet<Var>,
) -> Result<BigInt, OracleError> {
    brute_force_parity_count_capped(formula, negatives, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_parity_count_capped<R: Ring>(
    formula: &WeightedFormula<R>,
    negatives: &BTreeSet<Var>,
    cap: u32,
) -> Result<BigInt, OracleError> {
    if !formula.is_plain() {
        return Err(OracleError::NotPlain);
    }
    let n = formula.variable_count();
    if n > cap.min(63) {
        return Err(OracleError::CapExceeded { variable_count: n, cap: cap.min(63) });
    }
    let mut parity_mask = 0u64;
    for &var in negatives {
        assert!(var.index() <= n, "parity set references variable beyond the formula");
        parity_mask |= 1 << (var.index() - 1);
    }
    let mut total = BigInt::zero();
    let mut assignment = Assignment::new(n);
    for bits in 0..1u64 << n {
        for i in 0..n {
            assignment.set(Var::new(i + 1), bits >> i & 1 == 1);
        }
        let value = formula.evaluate(&assignment)?;
        if !value.is_zero() {
            if (bits & parity_mask).count_ones().is_multiple_of(2) {
                total += 1;
            } else {
                total -= 1;
            }
        }
    }
    Ok(total)
}
