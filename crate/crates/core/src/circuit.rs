//! Quantum-circuit amplitudes as weighted 2-CNF counts.
//!
//! A circuit over {H, CZ, C^kZ, Rz} sandwiched between |+...+> states
//! translates into a width-2 weighted instance: each qubit wire is a chain
//! of segment variables (a new segment starts after every Hadamard), and
//! each H, CZ or C^kZ becomes one gadget variable `y` of weight -2 with a
//! clause `(s | !y)` per touched segment. Summing the gadget out gives
//! `1 - 2*[all segments true] = (-1)^(s1*...*sk)`, i.e. exactly the gate's
//! phase tensor; the Hadamard additionally contributes `2^(-1/2)` to a
//! global scalar. Z-phase gates multiply their segment's weight by
//! `e^(i*alpha)` and add no clauses. Counting the instance and applying
//! the scalar yields the amplitude; a dense statevector simulator serves
//! as the independent oracle.

use num::complex::Complex64;
use num::traits::One;

use crate::formula::{Clause, Literal, Var, WeightedFormula};
use crate::solver::{cdp_weighted, SearchStats, SolveError, SolveOptions};

/// Gates over the translated set. Qubits are 0-indexed.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H { qubit: u32 },
    Cz { a: u32, b: u32 },
    /// Controlled-Z on `qubits.len()` wires (k + 1 qubits for a C^kZ).
    Ckz { qubits: Vec<u32> },
    /// diag(1, e^(i*angle)) on one qubit.
    Rz { qubit: u32, angle: f64 },
}

impl Gate {
    pub fn qubits(&self) -> Vec<u32> {
        match self {
            Gate::H { qubit } | Gate::Rz { qubit, .. } => vec![*qubit],
            Gate::Cz { a, b } => vec![*a, *b],
            Gate::Ckz { qubits } => qubits.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for a {qubit_count}-qubit circuit")]
    QubitOutOfRange { qubit: u32, qubit_count: u32 },
    #[error("gate lists qubit {qubit} twice")]
    DuplicateQubit { qubit: u32 },
    #[error("controlled-Z needs at least 2 qubits, found {found}")]
    TooFewQubits { found: usize },
    #[error("{qubit_count} qubits exceed the statevector cap of {cap}")]
    TooManyQubits { qubit_count: u32, cap: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubit_count: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubit_count: u32) -> Circuit {
        Circuit { qubit_count, gates: Vec::new() }
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push_gate(&mut self, gate: Gate) -> Result<(), CircuitError> {
        let qubits = gate.qubits();
        if let Gate::Ckz { .. } = gate {
            if qubits.len() < 2 {
                return Err(CircuitError::TooFewQubits { found: qubits.len() });
            }
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.qubit_count {
                return Err(CircuitError::QubitOutOfRange { qubit: q, qubit_count: self.qubit_count });
            }
            if qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateQubit { qubit: q });
            }
        }
        self.gates.push(gate);
        Ok(())
    }
}

/// Boundary state applied uniformly to all qubits on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// |+>: the segment is summed freely, contributing 2^(-1/2) per qubit.
    #[default]
    Plus,
    /// |0>: the segment is pinned false by a hard unit clause.
    Zero,
}

/// Global scalar of a translation: `2^(half_power_of_two / 2) * phase`,
/// with the power kept exact as an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationScalar {
    pub half_power_of_two: i64,
    pub phase: Complex64,
}

impl TranslationScalar {
    pub fn value(&self) -> Complex64 {
        self.phase * f64::exp2(self.half_power_of_two as f64 * 0.5)
    }
}

/// A translated circuit: the weighted instance, its scalar, and the
/// segment variables carrying each qubit's boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub formula: WeightedFormula<Complex64>,
    pub scalar: TranslationScalar,
    pub initial_segments: Vec<Var>,
    pub final_segments: Vec<Var>,
}

/// Translates `<+|U|+>` into a weighted width-2 instance.
///
/// H and CZ add exactly two clauses each, a C^kZ adds k + 1, Rz adds none.
pub fn circuit_to_weighted_2sat(circuit: &Circuit) -> Translation {
    circuit_to_weighted_2sat_with(circuit, Boundary::Plus, Boundary::Plus)
}

pub fn circuit_to_weighted_2sat_with(
    circuit: &Circuit,
    input: Boundary,
    output: Boundary,
) -> Translation {
    let n = circuit.qubit_count();
    let mut formula = WeightedFormula::<Complex64>::new(n);
    let mut segment: Vec<Var> = (1..=n).map(Var::new).collect();
    let initial_segments = segment.clone();
    let mut half_power = 0i64;
    let minus_two = Complex64::new(-2.0, 0.0);

    let gadget = |formula: &mut WeightedFormula<Complex64>, segments: &[Var]| {
        let y = formula.fresh_var();
        formula.set_weight(y, minus_two);
        for &s in segments {
            formula.push_clause(Clause::hard(vec![Literal::positive(s), Literal::negative(y)]));
        }
    };

    for gate in circuit.gates() {
        match gate {
            Gate::H { qubit } => {
                let old = segment[*qubit as usize];
                let new = formula.fresh_var();
                gadget(&mut formula, &[old, new]);
                half_power -= 1;
                segment[*qubit as usize] = new;
            }
            Gate::Cz { a, b } => {
                gadget(&mut formula, &[segment[*a as usize], segment[*b as usize]]);
            }
            Gate::Ckz { qubits } => {
                let segments: Vec<Var> = qubits.iter().map(|&q| segment[q as usize]).collect();
                gadget(&mut formula, &segments);
            }
            Gate::Rz { qubit, angle } => {
                let s = segment[*qubit as usize];
                let w = *formula.weight(s) * Complex64::from_polar(1.0, *angle);
                formula.set_weight(s, w);
            }
        }
    }
    for (side, segments) in [(input, &initial_segments), (output, &segment)] {
        for &s in segments {
            match side {
                Boundary::Plus => half_power -= 1,
                Boundary::Zero => formula.push_clause(Clause::hard(vec![Literal::negative(s)])),
            }
        }
    }
    Translation {
        formula,
        scalar: TranslationScalar { half_power_of_two: half_power, phase: Complex64::one() },
        initial_segments,
        final_segments: segment,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeOptions {
    pub input: Boundary,
    pub output: Boundary,
    pub solve: SolveOptions,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        AmplitudeOptions { input: Boundary::Plus, output: Boundary::Plus, solve: SolveOptions::default() }
    }
}

/// `<+|U|+>` via translation and weighted counting.
pub fn amplitude(circuit: &Circuit) -> Result<Complex64, SolveError> {
    Ok(amplitude_with(circuit, &AmplitudeOptions::default())?.0)
}

pub fn amplitude_with(
    circuit: &Circuit,
    opts: &AmplitudeOptions,
) -> Result<(Complex64, SearchStats), SolveError> {
    let translation = circuit_to_weighted_2sat_with(circuit, opts.input, opts.output);
    let result = cdp_weighted(&translation.formula, &opts.solve)?;
    Ok((translation.scalar.value() * result.count, result.stats))
}

/// Cap on dense statevector simulation.
pub const STATEVECTOR_QUBIT_CAP: u32 = 20;

/// Dense simulation oracle for [`amplitude`].
pub fn statevector_amplitude(circuit: &Circuit) -> Result<Complex64, CircuitError> {
    statevector_amplitude_with(circuit, Boundary::Plus, Boundary::Plus)
}

pub fn statevector_amplitude_with(
    circuit: &Circuit,
    input: Boundary,
    output: Boundary,
) -> Result<Complex64, CircuitError> {
    let n = circuit.qubit_count();
    if n > STATEVECTOR_QUBIT_CAP {
        return Err(CircuitError::TooManyQubits { qubit_count: n, cap: STATEVECTOR_QUBIT_CAP });
    }
    let dim = 1usize << n;
    let mut state = match input {
        Boundary::Plus => vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim],
        Boundary::Zero => {
            let mut s = vec![Complex64::new(0.0, 0.0); dim];
            s[0] = Complex64::one();
            s
        }
    };
    for gate in circuit.gates() {
        match gate {
            Gate::H { qubit } => {
                let bit = 1usize << qubit;
                let norm = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..dim {
                    if i & bit == 0 {
                        let a = state[i];
                        let b = state[i | bit];
                        state[i] = (a + b) * norm;
                        state[i | bit] = (a - b) * norm;
                    }
                }
            }
            Gate::Cz { a, b } => {
                let mask = (1usize << a) | (1usize << b);
                for (i, amp) in state.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Ckz { qubits } => {
                let mask = qubits.iter().fold(0usize, |m, &q| m | 1 << q);
                for (i, amp) in state.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Rz { qubit, angle } => {
                let bit = 1usize << qubit;
                let phase = Complex64::from_polar(1.0, *angle);
                for (i, amp) in state.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *amp *= phase;
                    }
                }
            }
        }
    }
    Ok(match output {
        Boundary::Plus => state.iter().sum::<Complex64>() / (dim as f64).sqrt(),
        Boundary::Zero => state[0],
    })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitParseError {
    #[error("line {line}: expected `qubits <n>` before any gate")]
    MissingQubits { line: usize },
    #[error("line {line}: duplicate `qubits` directive")]
    DuplicateQubits { line: usize },
    #[error("line {line}: unknown gate `{token}`")]
    UnknownGate { line: usize, token: String },
    #[error("line {line}: `{directive}` takes {expected}, found `{text}`")]
    BadArguments { line: usize, directive: &'static str, expected: &'static str, text: String },
    #[error("line {line}: {source}")]
    Circuit {
        line: usize,
        #[source]
        source: CircuitError,
    },
}

/// Parses the line-oriented circuit format:
///
/// ```text
/// qubits 2
/// h 0
/// cz 0 1
/// ckz 0 1        # >= 2 qubits
/// rz 0 1.5707963267948966
/// ```
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitParseError> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let head = tokens.next().unwrap();
        let args: Vec<&str> = tokens.collect();
        if head == "qubits" {
            if circuit.is_some() {
                return Err(CircuitParseError::DuplicateQubits { line });
            }
            let bad = || CircuitParseError::BadArguments {
                line,
                directive: "qubits",
                expected: "one count",
                text: trimmed.into(),
            };
            let [count] = args[..] else { return Err(bad()) };
            circuit = Some(Circuit::new(count.parse().map_err(|_| bad())?));
            continue;
        }
        let Some(circuit) = circuit.as_mut() else {
            return Err(CircuitParseError::MissingQubits { line });
        };
        let parse_qubit = |token: &str, directive: &'static str, expected: &'static str| {
            token.parse::<u32>().map_err(|_| CircuitParseError::BadArguments {
                line,
                directive,
                expected,
                text: trimmed.into(),
            })
        };
        let gate = match head {
            "h" => {
                let [q] = args[..] else {
                    return Err(CircuitParseError::BadArguments {
                        line,
                        directive: "h",
                        expected: "one qubit",
                        text: trimmed.into(),
                    });
                };
                Gate::H { qubit: parse_qubit(q, "h", "one qubit")? }
            }
            "cz" => {
                let [a, b] = args[..] else {
                    return Err(CircuitParseError::BadArguments {
                        line,
                        directive: "cz",
                        expected: "two qubits",
                        text: trimmed.into(),
                    });
                };
                Gate::Cz { a: parse_qubit(a, "cz", "two qubits")?, b: parse_qubit(b, "cz", "two qubits")? }
            }
            "ckz" => {
                let qubits = args
                    .iter()
                    .map(|q| parse_qubit(q, "ckz", "two or more qubits"))
                    .collect::<Result<Vec<u32>, _>>()?;
                Gate::Ckz { qubits }
            }
            "rz" => {
                let [q, angle] = args[..] else {
                    return Err(CircuitParseError::BadArguments {
                        line,
                        directive: "rz",
                        expected: "a qubit and an angle in radians",
                        text: trimmed.into(),
                    });
                };
                let angle: f64 = angle.parse().map_err(|_| CircuitParseError::BadArguments {
                    line,
                    directive: "rz",
                    expected: "a qubit and an angle in radians",
                    text: trimmed.into(),
                })?;
                Gate::Rz { qubit: parse_qubit(q, "rz", "a qubit and an angle in radians")?, angle }
            }
            other => return Err(CircuitParseError::UnknownGate { line, token: other.into() }),
        };
        circuit.push_gate(gate).map_err(|source| CircuitParseError::Circuit { line, source })?;
    }
    circuit.ok_or(CircuitParseError::MissingQubits { line: text.lines().count() + 1 })
}

pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = format!("qubits {}\n", circuit.qubit_count());
    for gate in circuit.gates() {
        match gate {
            Gate::H { qubit } => out.push_str(&format!("h {qubit}\n")),
            Gate::Cz { a, b } => out.push_str(&format!("cz {a} {b}\n")),
            Gate::Ckz { qubits } => {
                out.push_str("ckz");
                for q in qubits {
                    out.push_str(&format!(" {q}"));
                }
                out.push('\n');
            }
            Gate::Rz { qubit, angle } => out.push_str(&format!("rz {qubit} {angle}\n")),
        }
    }
    out
}
