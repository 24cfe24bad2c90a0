//! CNF data model: literals, labeled clauses, weighted formulas and
//! assignments.
//!
//! A formula carries one ring weight per variable (default 1) and one ring
//! label per clause (default 0). A clause contributes factor 1 when
//! satisfied and its label when violated, so label 0 is an ordinary hard
//! clause and a plain #SAT instance is the all-weights-1 / all-labels-0
//! special case.

use std::fmt;



use crate::ring::Ring;

/// A propositional variable, 1-indexed as in DIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// Creates a variable from its 1-based index.
    ///
    /// Panics on index 0; variable numbering starts at 1.
    pub fn new(index: u32) -> Var {
        assert!(index >= 1, "variable indices start at 1");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: Var,
    pub negated: bool,
}

impl Literal {
    pub fn positive(var: Var) -> Literal {
        Literal { var, negated: false }
    }

    pub fn negative(var: Var) -> Literal {
        Literal { var, negated: true }
    }

    pub fn negate(self) -> Literal {
        Literal { var: self.var, negated: !self.negated }
    }

    /// Signed DIMACS encoding; `None` for 0.
    pub fn from_dimacs(code: i64) -> Option<Literal> {
        let var = u32::try_from(code.unsigned_abs()).ok()?;
        if code == 0 {
            None
        } else {
            Some(Literal { var: Var::new(var), negated: code < 0 })
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var.index());
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// True under `value` assigned to the literal's variable.
    pub fn satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals with a violation label.
///
/// Label 0 marks a hard clause; a nonzero label `a` makes the clause soft,
/// contributing factor `a` instead of annihilating the assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause<R> {
    pub literals: Vec<Literal>,
    pub label: R,
}

impl<R: Ring> Clause<R> {
    pub fn hard(literals: Vec<Literal>) -> Clause<R> {
        Clause { literals, label: R::zero() }
    }

    pub fn soft(literals: Vec<Literal>, label: R) -> Clause<R> {
        Clause { literals, label }
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn is_hard(&self) -> bool {
        self.label.is_zero()
    }
}

/// Errors raised by formula construction, normalization and evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormulaError {
    #[error("literal references variable {var} but the formula has {variable_count} variables")]
    VariableOutOfRange { var: u32, variable_count: u32 },
    #[error("variable {var} has weight zero; weights must be nonzero ring elements")]
    ZeroWeight { var: u32 },
    #[error("assignment is partial: variable {var} is unassigned")]
    PartialAssignment { var: u32 },
}

/// A CNF formula with per-variable weights and per-clause labels.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFormula<R> {
    variable_count: u32,
    clauses: Vec<Clause<R>>,
    weights: Vec<R>,
}

impl<R: Ring> WeightedFormula<R> {
    /// An empty formula over `variable_count` variables, all weights 1.
    pub fn new(variable_count: u32) -> WeightedFormula<R> {
        WeightedFormula {
            variable_count,
            clauses: Vec::new(),
            weights: vec![R::one(); variable_count as usize],
        }
    }

    pub fn from_clauses(variable_count: u32, clauses: Vec<Clause<R>>) -> WeightedFormula<R> {
        let mut f = WeightedFormula::new(variable_count);
        f.clauses = clauses;
        f
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> {
        (1..=self.variable_count).map(Var::new)
    }

    pub fn clauses(&self) -> &[Clause<R>] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn push_clause(&mut self, clause: Clause<R>) {
        self.clauses.push(clause);
    }

    pub fn set_label(&mut self, clause_index: usize, label: R) {
        self.clauses[clause_index].label = label;
    }

    pub fn weight(&self, var: Var) -> &R {
        &self.weights[var.index() as usize - 1]
    }

    pub fn set_weight(&mut self, var: Var, weight: R) {
        self.weights[var.index() as usize - 1] = weight;
    }

    /// Appends a fresh variable (weight 1) and returns it.
    pub fn fresh_var(&mut self) -> Var {
        self.variable_count += 1;
        self.weights.push(R::one());
        Var::new(self.variable_count)
    }

    /// All weights 1 and all labels 0.
    pub fn is_plain(&self) -> bool {
        self.weights.iter().all(|w| w.is_one()) && self.clauses.iter().all(|c| c.label.is_zero())
    }

    fn check_literal(&self, lit: Literal) -> Result<(), FormulaError> {
        if lit.var.index() > self.variable_count {
            Err(FormulaError::VariableOutOfRange {
                var: lit.var.index(),
                variable_count: self.variable_count,
            })
        } else {
            Ok(())
        }
    }

    /// Removes duplicate literals within clauses and deletes tautological
    /// clauses (a satisfied clause contributes factor 1 whatever its label).
    /// Duplicate clauses are kept: multiplicity matters for soft labels.
    /// The count is preserved exactly.
    pub fn normalize(&self) -> Result<WeightedFormula<R>, FormulaError> {
        for (i, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                return Err(FormulaError::ZeroWeight { var: i as u32 + 1 });
            }
        }
        let mut out = WeightedFormula {
            variable_count: self.variable_count,
            clauses: Vec::with_capacity(self.clauses.len()),
            weights: self.weights.clone(),
        };
        let mut polarity_seen: Vec<(u64, Option<bool>)> = vec![(0, None); self.variable_count as usize];
        let mut stamp = 0u64;
        'clauses: for clause in &self.clauses {
            stamp += 1;
            let mut literals = Vec::with_capacity(clause.literals.len());
            for &lit in &clause.literals {
                self.check_literal(lit)?;
                let slot = &mut polarity_seen[lit.var.index() as usize - 1];
                if slot.0 == stamp {
                    match slot.1 {
                        Some(neg) if neg == lit.negated => continue,
                        _ => continue 'clauses, // tautology: always satisfied
                    }
                }
                *slot = (stamp, Some(lit.negated));
                literals.push(lit);
            }
            out.clauses.push(Clause { literals, label: clause.label.clone() });
        }
        Ok(out)
    }

    /// The weighted value of a total assignment:
    /// `prod_i weight(i)^{x_i} * prod_clauses (1 if satisfied else label)`.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<R, FormulaError> {
        for var in self.variables() {
            if assignment.get(var).is_none() {
                return Err(FormulaError::PartialAssignment { var: var.index() });
            }
        }
        let mut value = R::one();
        for (i, var) in self.variables().enumerate() {
            if assignment.get(var) == Some(true) {
                value = value * self.weights[i].clone();
            }
        }
        for clause in &self.clauses {
            let mut satisfied = false;
            for &lit in &clause.literals {
                self.check_literal(lit)?;
                let v = assignment.get(lit.var).expect("assignment checked total");
                if lit.satisfied_by(v) {
                    satisfied = true;
                    break;
                }
            }
            if !satisfied {
                value = value * clause.label.clone();
                if value.is_zero() {
                    return Ok(R::zero());
                }
            }
        }
        Ok(value)
    }
}

/// A (possibly partial) truth assignment over variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new(variable_count: u32) -> Assignment {
        Assignment { values: vec![None; variable_count as usize] }
    }

    /// Total assignment with variable `i` (1-based) set to bit `i - 1` of `bits`.
    pub fn from_bits(variable_count: u32, bits: u64) -> Assignment {
        let mut a = Assignment::new(variable_count);
        for i in 0..variable_count {
            a.values[i as usize] = Some(bits >> i & 1 == 1);
        }
        a
    }

    pub fn set(&mut self, var: Var, value: bool) {
        self.values[var.index() as usize - 1] = Some(value);
    }

    pub fn clear(&mut self, var: Var) {
        self.values[var.index() as usize - 1] = None;
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.values[var.index() as usize - 1]
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }
}

/// Shorthand for building clauses from DIMACS-style signed integers.
pub fn clause<R: Ring>(codes: &[i64]) -> Clause<R> {
    Clause::hard(codes.iter().map(|&c| Literal::from_dimacs(c).expect("nonzero literal")).collect())
}
