//! Exact model counting over ring-weighted CNF.
//!
//! The crate counts satisfying assignments of CNF formulas under three
//! semantics sharing one engine: plain counts, signed counts (weights in
//! {1, -1}), and general weighted counts with complex or rational weights.
//! Around the engine sit a linear-time reduction from plain counting to
//! signed width-2 counting, closed-form runtime-bound calculators, a
//! translation of quantum-circuit amplitudes into weighted 2-CNF, and
//! brute-force oracles that everything is tested against.
//!
//! All core types are generic over the scalar [`ring::Ring`]; the aliases
//! below fix the three rings actually used.

pub mod bounds;
pub mod circuit;
pub mod dimacs;
pub mod formula;
pub mod oracle;
pub mod random;
pub mod reduce;
pub mod ring;
pub mod solver;

pub use formula::{Assignment, Clause, Literal, Var, WeightedFormula};
pub use ring::Ring;

/// Arbitrary-precision integer scalar: plain and signed counting.
pub type Int = num::bigint::BigInt;
/// Exact rational scalar: weighted counting with degree-one absorption.
pub type Rational = num::rational::BigRational;
/// Complex double scalar: circuit amplitudes and phase weights.
pub type Complex = num::complex::Complex64;

pub type IntFormula = WeightedFormula<Int>;
pub type RationalFormula = WeightedFormula<Rational>;
pub type ComplexFormula = WeightedFormula<Complex>;
