//! DIMACS CNF reading and writing, extended with weight and label
//! directives.
//!
//! The base grammar is the usual one: a `p cnf <vars> <clauses>` header,
//! clauses as whitespace-separated nonzero integers terminated by `0`
//! (clauses may span lines), and `c ...` comment lines. Two comment forms
//! are treated as directives rather than free text:
//!
//! ```text
//! c w <var> <re> <im>     set the weight of <var> to re + i*im
//! c cl <clause> <re> <im> set the label of the 1-indexed clause
//! ```
//!
//! Directives are order-insensitive and last-write-wins. Serialization
//! renders weights and labels in their shortest round-tripping decimal
//! form, so `parse(serialize(f)) == normalize(f)` exactly.

use num::bigint::BigInt;
use num::complex::Complex64;


use crate::formula::{Clause, FormulaError, Literal, Var, WeightedFormula};
use crate::ring::{Ring, ScalarError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DimacsError {
    #[error("line {line}: expected `p cnf <vars> <clauses>`, found `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: duplicate problem header")]
    DuplicateHeader { line: usize },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {line}: clause seen before the problem header")]
    ClauseBeforeHeader { line: usize },
    #[error("line {line}: bad literal `{token}`")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {literal} references a variable beyond {variable_count}")]
    LiteralOutOfRange { line: usize, literal: i64, variable_count: u32 },
    #[error("line {line}: clause not terminated by 0 before end of input")]
    UnterminatedClause { line: usize },
    #[error("line {line}: malformed directive `{text}` (expected `c w <var> <re> <im>` or `c cl <clause> <re> <im>`)")]
    BadDirective { line: usize, text: String },
    #[error("line {line}: directive references variable {var} beyond {variable_count}")]
    DirectiveVarOutOfRange { line: usize, var: u64, variable_count: u32 },
    #[error("line {line}: directive references clause {clause} but the formula has {clause_count}")]
    DirectiveClauseOutOfRange { line: usize, clause: u64, clause_count: usize },
    #[error("line {line}: {source}")]
    Scalar {
        line: usize,
        #[source]
        source: ScalarError,
    },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

struct RawInstance {
    variable_count: u32,
    clauses: Vec<Vec<Literal>>,
    // (line, var, re, im) and (line, clause, re, im), in file order
    weight_directives: Vec<(usize, u64, String, String)>,
    label_directives: Vec<(usize, u64, String, String)>,
}

fn scan(text: &str) -> Result<RawInstance, DimacsError> {
    let mut header: Option<u32> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_open = false;
    let mut weight_directives = Vec::new();
    let mut label_directives = Vec::new();
    let mut last_line = 0;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let first = tokens.next().unwrap();
        if trimmed.starts_with('c') && first != "c" {
            continue; // comment without a separating space
        }
        if first == "c" {
            match tokens.next() {
                Some("w") => {
                    let rest: Vec<&str> = tokens.collect();
                    let [var, re, im] = rest[..] else {
                        return Err(DimacsError::BadDirective { line, text: trimmed.into() });
                    };
                    let var: u64 = var
                        .parse()
                        .ok()
                        .filter(|&v| v >= 1)
                        .ok_or_else(|| DimacsError::BadDirective { line, text: trimmed.into() })?;
                    weight_directives.push((line, var, re.to_string(), im.to_string()));
                }
                Some("cl") => {
                    let rest: Vec<&str> = tokens.collect();
                    let [cl, re, im] = rest[..] else {
                        return Err(DimacsError::BadDirective { line, text: trimmed.into() });
                    };
                    let cl: u64 = cl
                        .parse()
                        .ok()
                        .filter(|&v| v >= 1)
                        .ok_or_else(|| DimacsError::BadDirective { line, text: trimmed.into() })?;
                    label_directives.push((line, cl, re.to_string(), im.to_string()));
                }
                _ => {} // ordinary comment
            }
            continue;
        }
        if first == "p" {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line });
            }
            let rest: Vec<&str> = tokens.collect();
            let bad = || DimacsError::BadHeader { line, text: trimmed.into() };
            let [fmt, vars, _clause_count] = rest[..] else { return Err(bad()) };
            if fmt != "cnf" {
                return Err(bad());
            }
            let vars: u32 = vars.parse().map_err(|_| bad())?;
            let _: u64 = _clause_count.parse().map_err(|_| bad())?;
            header = Some(vars);
            continue;
        }
        // clause data
        let Some(variable_count) = header else {
            return Err(DimacsError::ClauseBeforeHeader { line });
        };
        for token in std::iter::once(first).chain(tokens) {
            let code: i64 = token
                .parse()
                .map_err(|_| DimacsError::BadLiteral { line, token: token.into() })?;
            if code == 0 {
                clauses.push(std::mem::take(&mut current));
                current_open = false;
                continue;
            }
            if code.unsigned_abs() > u64::from(variable_count) {
                return Err(DimacsError::LiteralOutOfRange {
                    line,
                    literal: code,
                    variable_count,
                });
            }
            current.push(Literal::from_dimacs(code).expect("nonzero in-range literal"));
            current_open = true;
        }
    }
    if current_open {
        return Err(DimacsError::UnterminatedClause { line: last_line });
    }
    let variable_count = header.ok_or(DimacsError::MissingHeader)?;
    Ok(RawInstance { variable_count, clauses, weight_directives, label_directives })
}

/// Parses extended DIMACS into a formula over ring `R` and normalizes it.
pub fn parse_dimacs<R: Ring>(text: &str) -> Result<WeightedFormula<R>, DimacsError> {
    let raw = scan(text)?;
    let mut formula = WeightedFormula::<R>::new(raw.variable_count);
    for lits in raw.clauses {
        formula.push_clause(Clause::hard(lits));
    }
    for (line, var, re, im) in &raw.weight_directives {
        if *var > u64::from(raw.variable_count) {
            return Err(DimacsError::DirectiveVarOutOfRange {
                line: *line,
                var: *var,
                variable_count: raw.variable_count,
            });
        }
        let weight = R::from_parts(re, im).map_err(|source| DimacsError::Scalar { line: *line, source })?;
        formula.set_weight(Var::new(*var as u32), weight);
    }
    for (line, cl, re, im) in &raw.label_directives {
        if *cl > formula.clause_count() as u64 {
            return Err(DimacsError::DirectiveClauseOutOfRange {
                line: *line,
                clause: *cl,
                clause_count: formula.clause_count(),
            });
        }
        let label = R::from_parts(re, im).map_err(|source| DimacsError::Scalar { line: *line, source })?;
        formula.set_label(*cl as usize - 1, label);
    }
    Ok(formula.normalize()?)
}

/// A parsed instance in whichever ring its numbers demand.
///
/// Instances whose weights and labels are all integral stay in exact
/// integer arithmetic end-to-end; anything else falls back to complex
/// doubles.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFormula {
    Int(WeightedFormula<BigInt>),
    Complex(WeightedFormula<Complex64>),
}

/// Parses into [`AnyFormula`], preferring the integer ring.
pub fn parse_dimacs_auto(text: &str) -> Result<AnyFormula, DimacsError> {
    match parse_dimacs::<BigInt>(text) {
        Ok(f) => Ok(AnyFormula::Int(f)),
        Err(DimacsError::Scalar { source: ScalarError::NotRepresentable(_), .. }) => {
            Ok(AnyFormula::Complex(parse_dimacs::<Complex64>(text)?))
        }
        Err(e) => Err(e),
    }
}

/// Writes extended DIMACS. Weights other than 1 become `c w` lines and
/// labels other than 0 become `c cl` lines, before the clauses.
pub fn serialize_dimacs<R: Ring>(formula: &WeightedFormula<R>) -> String {
    let mut out = String::new();
    out.push_str(&format!("p cnf {} {}\n", formula.variable_count(), formula.clause_count()));
    for var in formula.variables() {
        let w = formula.weight(var);
        if !w.is_one() {
            let (re, im) = w.to_parts();
            out.push_str(&format!("c w {} {} {}\n", var.index(), re, im));
        }
    }
    for (i, clause) in formula.clauses().iter().enumerate() {
        if !clause.label.is_zero() {
            let (re, im) = clause.label.to_parts();
            out.push_str(&format!("c cl {} {} {}\n", i + 1, re, im));
        }
    }
    for clause in formula.clauses() {
        for lit in &clause.literals {
            out.push_str(&format!("{} ", lit.to_dimacs()));
        }
        out.push_str("0\n");
    }
    out
}
