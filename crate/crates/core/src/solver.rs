//! The DPLL-style counting engine.
//!
//! One engine serves every variant: plain counting, signed counting
//! (weights in {1, -1}) and general weighted counting are all the same
//! recursion
//!
//! ```text
//! count(f) = count(f & !v) + weight(v) * count(f & v)
//! ```
//!
//! with unit propagation after each assignment, multiplicative splitting
//! of independent components, and `prod (1 + weight(i))` over the free
//! variables at clause-free leaves (for all-1 weights that is the usual
//! `2^n`). Unit propagation keeps the weight bookkeeping explicit: forcing
//! a variable true multiplies the branch scalar by its weight, and a soft
//! clause shrinking to empty multiplies in its label.
//!
//! The search is iterative over an explicit task stack; depth can reach
//! `n + m` after the clause-width reduction, which would be unkind to the
//! call stack on large instances.

use std::collections::VecDeque;



use crate::formula::{FormulaError, Literal, Var, WeightedFormula};
use crate::reduce::{reduce_to_signed_2sat, ReduceError};
use crate::ring::Ring;

/// How the next branching variable is chosen. Every strategy picks only
/// unassigned variables occurring in the residual formula and breaks ties
/// toward the lowest variable index, so runs are deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchStrategy {
    /// Most occurrences in residual clauses.
    MaxOccurrence,
    /// Most occurrences among the shortest residual clauses.
    #[default]
    MaxDegreeShortestClause,
    /// Most occurrences in residual clauses of width exactly three.
    Max3Degree,
    /// Lowest-indexed variable occurring in the residual formula.
    FirstUnassigned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub strategy: BranchStrategy,
    /// Split disconnected subproblems and multiply their counts.
    pub split_components: bool,
    /// Eliminate degree-one variables by folding their weight into a
    /// scalar and a new clause label, where the ring allows the division.
    pub absorb_degree_one: bool,
    /// Abort with [`SolveError::Budget`] beyond this many branch nodes.
    pub node_cap: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            strategy: BranchStrategy::default(),
            split_components: true,
            absorb_degree_one: false,
            node_cap: None,
        }
    }
}

/// Search effort counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub branch_nodes: u64,
    pub propagations: u64,
    /// Independent components counted at split points.
    pub components: u64,
    pub absorptions: u64,
    pub max_depth: u32,
}

impl SearchStats {
    fn absorb_child(&mut self, child: &SearchStats, at_depth: u32) {
        self.branch_nodes += child.branch_nodes;
        self.propagations += child.propagations;
        self.components += child.components;
        self.absorptions += child.absorptions;
        self.max_depth = self.max_depth.max(at_depth + child.max_depth);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountResult<R> {
    pub count: R,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("branch-node budget of {cap} exhausted")]
    Budget { cap: u64 },
    #[error("this algorithm is defined for plain instances (all weights 1, all labels 0)")]
    NotPlain,
    #[error("clause of width {width} exceeds the maximum width {max} this algorithm accepts")]
    WidthTooLarge { width: usize, max: usize },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

impl From<ReduceError> for SolveError {
    fn from(e: ReduceError) -> Self {
        match e {
            ReduceError::NotPlain => SolveError::NotPlain,
            ReduceError::Formula(f) => SolveError::Formula(f),
        }
    }
}

/// Outcome of running unit propagation to fixpoint.
#[derive(Debug, Clone, PartialEq)]
pub enum Propagation<R> {
    /// No hard unit clauses remain; `factor` is the product of weight and
    /// label factors incurred by this call.
    Fixpoint { factor: R },
    /// A hard clause shrank to empty.
    Conflict,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AbsorbError {
    #[error("variable {0} is not unassigned")]
    NotUnassigned(u32),
    #[error("variable {0} occurs in {1} residual clauses, not exactly one")]
    Degree(u32, usize),
    #[error("1 + weight({0}) is zero or the label quotient leaves the ring")]
    NonInvertible(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Unassigned,
    Assigned(bool),
    Eliminated,
}

#[derive(Debug, Clone, Copy)]
struct Occurrence {
    clause: u32,
    negated: bool,
}

/// One independent subproblem: (clause indices, its unassigned variables).
type Component = (Vec<u32>, Vec<Var>);

#[derive(Debug, Clone)]
struct ClauseState<R> {
    literals: Vec<Literal>,
    label: R,
    /// Literals over unassigned, non-eliminated variables.
    unassigned: u32,
    /// Assigned literals that satisfy the clause.
    satisfied: u32,
    /// Folded into the scalar (emptied soft clause).
    absorbed: bool,
}

#[derive(Debug)]
enum UndoOp<R> {
    Assign(Var),
    Absorb(u32),
    SetLabel(u32, R),
    HideLiteral(u32),
    Eliminate(Var),
}

/// Mutable search state over one formula.
///
/// The `scalar` accumulator equals the product of `weight(i)` over
/// variables assigned true so far times all absorbed soft-label and
/// degree-one factors along the current path; the residual formula (the
/// live clauses) mentions only unassigned variables.
#[derive(Debug)]
pub struct SolverState<R: Ring> {
    weights: Vec<R>,
    clauses: Vec<ClauseState<R>>,
    occurrences: Vec<Vec<Occurrence>>,
    var_state: Vec<VarState>,
    scalar: R,
    op_log: Vec<UndoOp<R>>,
    unit_queue: VecDeque<u32>,
    stats: SearchStats,
    initialized: bool,
    pending_conflict: bool,
    clause_in_set: Vec<u64>,
    clause_visited: Vec<u64>,
    var_visited: Vec<u64>,
    epoch: u64,
}

impl<R: Ring> SolverState<R> {
    /// Builds a state over a normalized formula.
    pub fn new(formula: &WeightedFormula<R>) -> SolverState<R> {
        let n = formula.variable_count() as usize;
        let m = formula.clause_count();
        let mut occurrences = vec![Vec::new(); n];
        let mut clauses = Vec::with_capacity(m);
        for (i, clause) in formula.clauses().iter().enumerate() {
            for lit in &clause.literals {
                occurrences[lit.var.index() as usize - 1]
                    .push(Occurrence { clause: i as u32, negated: lit.negated });
            }
            clauses.push(ClauseState {
                literals: clause.literals.clone(),
                label: clause.label.clone(),
                unassigned: clause.width() as u32,
                satisfied: 0,
                absorbed: false,
            });
        }
        SolverState {
            weights: formula.variables().map(|v| formula.weight(v).clone()).collect(),
            clauses,
            occurrences,
            var_state: vec![VarState::Unassigned; n],
            scalar: R::one(),
            op_log: Vec::new(),
            unit_queue: VecDeque::new(),
            stats: SearchStats::default(),
            initialized: false,
            pending_conflict: false,
            clause_in_set: vec![0; m],
            clause_visited: vec![0; m],
            var_visited: vec![0; n],
            epoch: 0,
        }
    }

    pub fn scalar(&self) -> &R {
        &self.scalar
    }

    pub fn set_scalar(&mut self, scalar: R) {
        self.scalar = scalar;
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn assignment_of(&self, var: Var) -> Option<bool> {
        match self.var_state[var.index() as usize - 1] {
            VarState::Assigned(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_unassigned(&self, var: Var) -> bool {
        self.var_state[var.index() as usize - 1] == VarState::Unassigned
    }

    fn clause_live(&self, clause: u32) -> bool {
        let c = &self.clauses[clause as usize];
        !c.absorbed && c.satisfied == 0
    }

    pub fn live_clause_indices(&self) -> Vec<u32> {
        (0..self.clauses.len() as u32).filter(|&c| self.clause_live(c)).collect()
    }

    /// Residual width (unassigned literal count) of a live clause.
    pub fn residual_width(&self, clause: u32) -> u32 {
        self.clauses[clause as usize].unassigned
    }

    pub fn unassigned_vars(&self) -> Vec<Var> {
        (1..=self.var_state.len() as u32)
            .map(Var::new)
            .filter(|&v| self.is_unassigned(v))
            .collect()
    }

    fn emit(&mut self, factor: &R, delta: &mut R) {
        *delta = delta.clone() * factor.clone();
        self.scalar = self.scalar.clone() * factor.clone();
    }

    fn apply_assign(&mut self, var: Var, value: bool, delta: &mut R) {
        let vi = var.index() as usize - 1;
        debug_assert_eq!(self.var_state[vi], VarState::Unassigned);
        self.var_state[vi] = VarState::Assigned(value);
        self.op_log.push(UndoOp::Assign(var));
        if value {
            let w = self.weights[vi].clone();
            self.emit(&w, delta);
        }
        for k in 0..self.occurrences[vi].len() {
            let occ = self.occurrences[vi][k];
            let ci = occ.clause as usize;
            if occ.negated != value {
                self.clauses[ci].satisfied += 1;
            } else {
                self.clauses[ci].unassigned -= 1;
                let c = &self.clauses[ci];
                if !c.absorbed && c.satisfied == 0 {
                    if c.unassigned == 0 {
                        if c.label.is_zero() {
                            self.pending_conflict = true;
                        } else {
                            let label = c.label.clone();
                            self.emit(&label, delta);
                            self.clauses[ci].absorbed = true;
                            self.op_log.push(UndoOp::Absorb(occ.clause));
                        }
                    } else if c.unassigned == 1 && c.label.is_zero() {
                        self.unit_queue.push_back(occ.clause);
                    }
                }
            }
        }
    }

    /// Assigns an unassigned variable, returning the multiplicative factor
    /// incurred (the variable's weight on a true assignment, times any
    /// soft-clause labels folded by the assignment).
    pub fn assign(&mut self, var: Var, value: bool) -> R {
        let mut delta = R::one();
        self.apply_assign(var, value, &mut delta);
        delta
    }

    /// Runs unit propagation to fixpoint: while a hard unit clause exists,
    /// assign its literal true. Soft unit clauses never propagate.
    pub fn unit_propagate(&mut self) -> Propagation<R> {
        let mut delta = R::one();
        if !self.initialized {
            self.initialized = true;
            for ci in 0..self.clauses.len() {
                let c = &self.clauses[ci];
                if c.literals.is_empty() {
                    if c.label.is_zero() {
                        self.pending_conflict = true;
                    } else {
                        let label = c.label.clone();
                        self.emit(&label, &mut delta);
                        self.clauses[ci].absorbed = true;
                        self.op_log.push(UndoOp::Absorb(ci as u32));
                    }
                } else if c.label.is_zero() && c.unassigned == 1 && c.satisfied == 0 {
                    self.unit_queue.push_back(ci as u32);
                }
            }
        }
        loop {
            if self.pending_conflict {
                self.unit_queue.clear();
                return Propagation::Conflict;
            }
            let Some(ci) = self.unit_queue.pop_front() else { break };
            let c = &self.clauses[ci as usize];
            if c.absorbed || c.satisfied > 0 || c.unassigned != 1 || !c.label.is_zero() {
                continue; // stale entry
            }
            let lit = *c
                .literals
                .iter()
                .find(|l| self.is_unassigned(l.var))
                .expect("unit clause has one unassigned literal");
            self.stats.propagations += 1;
            self.apply_assign(lit.var, !lit.negated, &mut delta);
        }
        Propagation::Fixpoint { factor: delta }
    }

    /// `scalar * prod (1 + weight(v))` over unassigned variables. Only
    /// meaningful when no live clauses remain.
    pub fn leaf_value(&self) -> R {
        self.scalar.clone() * self.free_product_all()
    }

    fn free_product_all(&self) -> R {
        let mut value = R::one();
        for (i, s) in self.var_state.iter().enumerate() {
            if *s == VarState::Unassigned {
                value = value * (R::one() + self.weights[i].clone());
            }
        }
        value
    }

    fn free_product(&self, vars: &[Var]) -> R {
        let mut value = R::one();
        for &v in vars {
            if self.is_unassigned(v) {
                value = value * (R::one() + self.weights[v.index() as usize - 1].clone());
            }
        }
        value
    }

    /// Eliminates a variable occurring in exactly one residual clause by
    /// folding its weight into the scalar and the clause label:
    /// summing over the two values of `x` with weight `w` turns a clause
    /// `(x | C, label a)` into `(C, label (a+w)/(1+w))` times `1 + w`, and
    /// `(!x | C, label a)` into `(C, label (1+a*w)/(1+w))` times `1 + w`.
    /// Returns the factor incurred; fails without touching the state when
    /// the degree is not one or the division leaves the ring.
    pub fn eliminate_degree_one(&mut self, var: Var) -> Result<R, AbsorbError> {
        let vi = var.index() as usize - 1;
        if self.var_state[vi] != VarState::Unassigned {
            return Err(AbsorbError::NotUnassigned(var.index()));
        }
        let mut live = self.occurrences[vi].iter().filter(|o| self.clause_live(o.clause));
        let (occ, extra) = (live.next().copied(), live.count());
        let Some(occ) = occ else { return Err(AbsorbError::Degree(var.index(), 0)) };
        if extra > 0 {
            return Err(AbsorbError::Degree(var.index(), extra + 1));
        }
        let ci = occ.clause as usize;
        let w = self.weights[vi].clone();
        let one_plus = R::one() + w.clone();
        let old_label = self.clauses[ci].label.clone();
        let numerator = if occ.negated {
            R::one() + old_label.clone() * w
        } else {
            old_label.clone() + w
        };
        let Some(new_label) = numerator.exact_div(&one_plus) else {
            return Err(AbsorbError::NonInvertible(var.index()));
        };

        let mut delta = R::one();
        self.emit(&one_plus, &mut delta);
        self.var_state[vi] = VarState::Eliminated;
        self.op_log.push(UndoOp::Eliminate(var));
        self.clauses[ci].unassigned -= 1;
        self.op_log.push(UndoOp::HideLiteral(occ.clause));
        self.op_log.push(UndoOp::SetLabel(occ.clause, old_label));
        self.clauses[ci].label = new_label.clone();
        self.stats.absorptions += 1;

        let c = &self.clauses[ci];
        if c.unassigned == 0 {
            // the clause is now empty: fold its label into the scalar
            if new_label.is_zero() {
                self.pending_conflict = true;
            } else {
                self.emit(&new_label, &mut delta);
                self.clauses[ci].absorbed = true;
                self.op_log.push(UndoOp::Absorb(occ.clause));
            }
        } else if c.unassigned == 1 && new_label.is_zero() {
            // absorbing into a hard clause left a hard unit
            self.unit_queue.push_back(occ.clause);
        }
        Ok(delta)
    }

    fn undo_to(&mut self, mark: usize) {
        while self.op_log.len() > mark {
            match self.op_log.pop().expect("log not empty") {
                UndoOp::Assign(var) => {
                    let vi = var.index() as usize - 1;
                    let VarState::Assigned(value) = self.var_state[vi] else {
                        unreachable!("undo of unassigned variable")
                    };
                    for k in 0..self.occurrences[vi].len() {
                        let occ = self.occurrences[vi][k];
                        if occ.negated != value {
                            self.clauses[occ.clause as usize].satisfied -= 1;
                        } else {
                            self.clauses[occ.clause as usize].unassigned += 1;
                        }
                    }
                    self.var_state[vi] = VarState::Unassigned;
                }
                UndoOp::Absorb(c) => self.clauses[c as usize].absorbed = false,
                UndoOp::SetLabel(c, old) => self.clauses[c as usize].label = old,
                UndoOp::HideLiteral(c) => self.clauses[c as usize].unassigned += 1,
                UndoOp::Eliminate(var) => {
                    self.var_state[var.index() as usize - 1] = VarState::Unassigned;
                }
            }
        }
        self.pending_conflict = false;
        self.unit_queue.clear();
    }

    /// Partitions the residual formula into connected components of the
    /// variable-clause incidence graph restricted to `live` and `vars`.
    /// Returns each component's (clauses, variables), both ascending, and
    /// the folded `prod (1 + weight)` over isolated variables.
    fn component_partition(&mut self, live: &[u32], vars: &[Var]) -> (Vec<Component>, R) {
        self.epoch += 1;
        let epoch = self.epoch;
        for &c in live {
            self.clause_in_set[c as usize] = epoch;
        }
        let mut components = Vec::new();
        let mut queue = Vec::new();
        for &start in live {
            if self.clause_visited[start as usize] == epoch {
                continue;
            }
            self.clause_visited[start as usize] = epoch;
            queue.push(start);
            let mut comp_clauses = Vec::new();
            let mut comp_vars = Vec::new();
            while let Some(c) = queue.pop() {
                comp_clauses.push(c);
                for li in 0..self.clauses[c as usize].literals.len() {
                    let var = self.clauses[c as usize].literals[li].var;
                    let vi = var.index() as usize - 1;
                    if self.var_state[vi] != VarState::Unassigned || self.var_visited[vi] == epoch {
                        continue;
                    }
                    self.var_visited[vi] = epoch;
                    comp_vars.push(var);
                    for k in 0..self.occurrences[vi].len() {
                        let other = self.occurrences[vi][k].clause;
                        if self.clause_in_set[other as usize] == epoch
                            && self.clause_visited[other as usize] != epoch
                        {
                            self.clause_visited[other as usize] = epoch;
                            queue.push(other);
                        }
                    }
                }
            }
            comp_clauses.sort_unstable();
            comp_vars.sort_unstable();
            components.push((comp_clauses, comp_vars));
        }
        let mut isolated = R::one();
        for &v in vars {
            let vi = v.index() as usize - 1;
            if self.var_state[vi] == VarState::Unassigned && self.var_visited[vi] != epoch {
                isolated = isolated * (R::one() + self.weights[vi].clone());
            }
        }
        (components, isolated)
    }

    /// The residual subformula over `clause_ids` and `vars` (ascending),
    /// with variables renumbered to `1..=vars.len()`.
    fn extract_subformula(&self, clause_ids: &[u32], vars: &[Var]) -> WeightedFormula<R> {
        let mut renumber = vec![0u32; self.var_state.len()];
        let mut out = WeightedFormula::<R>::new(vars.len() as u32);
        for (k, &v) in vars.iter().enumerate() {
            renumber[v.index() as usize - 1] = k as u32 + 1;
            out.set_weight(Var::new(k as u32 + 1), self.weights[v.index() as usize - 1].clone());
        }
        for &c in clause_ids {
            let clause = &self.clauses[c as usize];
            let literals = clause
                .literals
                .iter()
                .filter(|l| self.is_unassigned(l.var))
                .map(|l| Literal {
                    var: Var::new(renumber[l.var.index() as usize - 1]),
                    negated: l.negated,
                })
                .collect();
            out.push_clause(crate::formula::Clause { literals, label: clause.label.clone() });
        }
        out
    }

    /// Splits the whole residual formula into independent solver states,
    /// one per connected component, with this state's scalar (and the
    /// `1 + weight` factors of isolated free variables) placed on the
    /// first. The product of the component counts equals the count of the
    /// whole.
    pub fn split_components(&mut self) -> Vec<SolverState<R>> {
        let live = self.live_clause_indices();
        let vars = self.unassigned_vars();
        let (components, isolated) = self.component_partition(&live, &vars);
        let mut states: Vec<SolverState<R>> = components
            .iter()
            .map(|(clauses, vars)| SolverState::new(&self.extract_subformula(clauses, vars)))
            .collect();
        let carried = self.scalar.clone() * isolated;
        if let Some(first) = states.first_mut() {
            first.set_scalar(carried);
        } else {
            let mut empty = SolverState::new(&WeightedFormula::<R>::new(0));
            empty.set_scalar(carried);
            states.push(empty);
        }
        states
    }

    /// Picks the branching variable among `vars` for the residual clauses
    /// `live` under `strategy`. Returns a variable that occurs in a live
    /// clause; `vars` must be ascending for the documented tie-breaking.
    fn pick_branch_variable(&mut self, live: &[u32], vars: &[Var], strategy: BranchStrategy) -> Var {
        self.epoch += 1;
        let epoch = self.epoch;
        // var_visited doubles as the stamp for the scratch degree counters
        let mut degree = vec![0u32; vars.len()];
        let mut restricted = vec![0u32; vars.len()];
        let mut position = vec![0usize; self.var_state.len()];
        for (k, &v) in vars.iter().enumerate() {
            position[v.index() as usize - 1] = k;
            self.var_visited[v.index() as usize - 1] = epoch;
        }
        let target_width = match strategy {
            BranchStrategy::MaxDegreeShortestClause => {
                live.iter().map(|&c| self.clauses[c as usize].unassigned).min().unwrap_or(0)
            }
            BranchStrategy::Max3Degree => 3,
            _ => 0,
        };
        for &c in live {
            let clause = &self.clauses[c as usize];
            let restricted_hit = target_width != 0 && clause.unassigned == target_width;
            for lit in &clause.literals {
                let vi = lit.var.index() as usize - 1;
                if self.var_state[vi] == VarState::Unassigned && self.var_visited[vi] == epoch {
                    degree[position[vi]] += 1;
                    if restricted_hit {
                        restricted[position[vi]] += 1;
                    }
                }
            }
        }
        let ranking: &[u32] = match strategy {
            BranchStrategy::MaxOccurrence => &degree,
            BranchStrategy::MaxDegreeShortestClause | BranchStrategy::Max3Degree => &restricted,
            BranchStrategy::FirstUnassigned => &degree,
        };
        let mut best: Option<(u32, Var)> = None;
        for (k, &v) in vars.iter().enumerate() {
            if degree[k] == 0 {
                continue; // not in the residual formula
            }
            let score = match strategy {
                BranchStrategy::FirstUnassigned => return v,
                _ => ranking[k],
            };
            match best {
                Some((b, _)) if b >= score => {}
                _ => best = Some((score, v)),
            }
        }
        match best {
            Some((score, v)) if score > 0 => v,
            // every 3-degree is zero: fall back to the first occurring var
            _ => *vars
                .iter()
                .find(|v| degree[position[v.index() as usize - 1]] > 0)
                .expect("live clauses mention at least one variable"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Standard,
    /// Branch on maximal 3-degree until the residual 3-clause density
    /// drops to 2/3, then reduce the residual and finish weighted.
    DenseThree,
}

enum Task<R> {
    Eval { clauses: Vec<u32>, vars: Vec<Var>, depth: u32 },
    SecondBranch { var: Var, clauses: Vec<u32>, vars: Vec<Var>, depth: u32 },
    ExitBranch { mark: usize, saved_scalar: R },
    Scale { factor: R },
    SumTwo,
    MulProduct { count: usize, factor: R },
}

fn run_machine<R: Ring>(
    state: &mut SolverState<R>,
    opts: &SolveOptions,
    mode: Mode,
    root_clauses: Vec<u32>,
    root_vars: Vec<Var>,
) -> Result<R, SolveError> {
    let mut values: Vec<R> = Vec::new();
    let mut ctrl: Vec<Task<R>> = vec![Task::Eval { clauses: root_clauses, vars: root_vars, depth: 0 }];
    while let Some(task) = ctrl.pop() {
        match task {
            Task::Eval { clauses, vars, depth } => {
                eval_node(state, opts, mode, &mut ctrl, &mut values, clauses, vars, depth)?;
            }
            Task::SecondBranch { var, clauses, vars, depth } => {
                ctrl.push(Task::SumTwo);
                enter_branch(state, &mut ctrl, &mut values, var, true, clauses, vars, depth);
            }
            Task::ExitBranch { mark, saved_scalar } => {
                state.undo_to(mark);
                state.scalar = saved_scalar;
            }
            Task::Scale { factor } => {
                let v = values.pop().expect("value to scale");
                values.push(v * factor);
            }
            Task::SumTwo => {
                let b = values.pop().expect("true-branch value");
                let a = values.pop().expect("false-branch value");
                values.push(a + b);
            }
            Task::MulProduct { count, factor } => {
                let mut acc = factor;
                for _ in 0..count {
                    acc = acc * values.pop().expect("component value");
                }
                values.push(acc);
            }
        }
    }
    debug_assert_eq!(values.len(), 1);
    Ok(values.pop().expect("final count"))
}

/// Assigns `var := value`, propagates, and schedules the subtree
/// evaluation (or pushes 0 on conflict).
#[allow(clippy::too_many_arguments)]
fn enter_branch<R: Ring>(
    state: &mut SolverState<R>,
    ctrl: &mut Vec<Task<R>>,
    values: &mut Vec<R>,
    var: Var,
    value: bool,
    clauses: Vec<u32>,
    vars: Vec<Var>,
    depth: u32,
) {
    let mark = state.op_log.len();
    let saved_scalar = state.scalar.clone();
    let mut delta = state.assign(var, value);
    match state.unit_propagate() {
        Propagation::Conflict => {
            state.undo_to(mark);
            state.scalar = saved_scalar;
            values.push(R::zero());
        }
        Propagation::Fixpoint { factor } => {
            delta = delta * factor;
            if !delta.is_one() {
                ctrl.push(Task::Scale { factor: delta });
            }
            ctrl.push(Task::ExitBranch { mark, saved_scalar });
            ctrl.push(Task::Eval { clauses, vars, depth: depth + 1 });
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn eval_node<R: Ring>(
    state: &mut SolverState<R>,
    opts: &SolveOptions,
    mode: Mode,
    ctrl: &mut Vec<Task<R>>,
    values: &mut Vec<R>,
    clauses: Vec<u32>,
    mut vars: Vec<Var>,
    depth: u32,
) -> Result<(), SolveError> {
    state.stats.max_depth = state.stats.max_depth.max(depth);
    let mut pending = R::one();

    // Degree-one absorption applies between propagation and branching.
    // It can re-enable propagation (a label landing on zero makes the
    // clause hard again), so the two alternate to a joint fixpoint.
    if opts.absorb_degree_one && mode == Mode::Standard {
        vars.retain(|&v| state.is_unassigned(v));
        'absorb: loop {
            for &v in &vars {
                if !state.is_unassigned(v) {
                    continue;
                }
                if let Ok(delta) = state.eliminate_degree_one(v) {
                    pending = pending * delta;
                    match state.unit_propagate() {
                        Propagation::Conflict => {
                            values.push(R::zero());
                            return Ok(());
                        }
                        Propagation::Fixpoint { factor } => pending = pending * factor,
                    }
                    continue 'absorb;
                }
            }
            break;
        }
    }

    let live: Vec<u32> = clauses.into_iter().filter(|&c| state.clause_live(c)).collect();
    vars.retain(|&v| state.is_unassigned(v));

    if live.is_empty() {
        values.push(pending * state.free_product(&vars));
        return Ok(());
    }

    let (mut components, isolated) = if opts.split_components {
        state.component_partition(&live, &vars)
    } else {
        (vec![(live, vars)], R::one())
    };
    let factor = pending * isolated;

    if components.len() > 1 {
        state.stats.components += components.len() as u64;
        ctrl.push(Task::MulProduct { count: components.len(), factor });
        for (comp_clauses, comp_vars) in components {
            ctrl.push(Task::Eval { clauses: comp_clauses, vars: comp_vars, depth });
        }
        return Ok(());
    }
    let (live, vars) = components.pop().expect("live clauses form one component");
    if !factor.is_one() {
        ctrl.push(Task::Scale { factor });
    }

    if mode == Mode::DenseThree {
        let wide = live.iter().filter(|&&c| state.residual_width(c) >= 3).count();
        if 3 * wide <= 2 * vars.len() {
            // residual 3-clause density at most 2/3: reduce and finish
            let residual = state.extract_subformula(&live, &vars);
            let (reduced, _) = reduce_to_signed_2sat(&residual)?;
            let remaining_cap =
                opts.node_cap.map(|cap| cap.saturating_sub(state.stats.branch_nodes));
            let sub_opts = SolveOptions { node_cap: remaining_cap, ..opts.clone() };
            let sub = cdp_weighted(&reduced, &sub_opts).map_err(|e| match e {
                SolveError::Budget { .. } => SolveError::Budget { cap: opts.node_cap.unwrap_or(0) },
                other => other,
            })?;
            state.stats.absorb_child(&sub.stats, depth);
            values.push(sub.count);
            return Ok(());
        }
    }

    state.stats.branch_nodes += 1;
    if let Some(cap) = opts.node_cap {
        if state.stats.branch_nodes > cap {
            return Err(SolveError::Budget { cap });
        }
    }
    let strategy = match mode {
        Mode::DenseThree => BranchStrategy::Max3Degree,
        Mode::Standard => opts.strategy,
    };
    let var = state.pick_branch_variable(&live, &vars, strategy);
    ctrl.push(Task::SecondBranch { var, clauses: live.clone(), vars: vars.clone(), depth });
    enter_branch(state, ctrl, values, var, false, live, vars, depth);
    Ok(())
}

fn solve_machine<R: Ring>(
    formula: &WeightedFormula<R>,
    opts: &SolveOptions,
    mode: Mode,
) -> Result<CountResult<R>, SolveError> {
    let normalized = formula.normalize()?;
    let mut state = SolverState::new(&normalized);
    match state.unit_propagate() {
        Propagation::Conflict => {
            Ok(CountResult { count: R::zero(), stats: state.stats })
        }
        Propagation::Fixpoint { factor } => {
            let clauses = (0..normalized.clause_count() as u32).collect();
            let vars = state.unassigned_vars();
            let value = run_machine(&mut state, opts, mode, clauses, vars)?;
            Ok(CountResult { count: factor * value, stats: state.stats })
        }
    }
}

/// Plain model counting. Rejects weighted or soft-labeled input.
pub fn cdp<R: Ring>(
    formula: &WeightedFormula<R>,
    opts: &SolveOptions,
) -> Result<CountResult<R>, SolveError> {
    if !formula.is_plain() {
        return Err(SolveError::NotPlain);
    }
    solve_machine(formula, opts, Mode::Standard)
}

/// Weighted model counting over any ring weights; signed counting is the
/// weights-in-{1, -1} case.
pub fn cdp_weighted<R: Ring>(
    formula: &WeightedFormula<R>,
    opts: &SolveOptions,
) -> Result<CountResult<R>, SolveError> {
    solve_machine(formula, opts, Mode::Standard)
}

/// Plain counting via the signed 2-CNF reduction: reduce, then count
/// weighted. Equals [`cdp`] on every plain instance.
pub fn cdp_to2<R: Ring>(
    formula: &WeightedFormula<R>,
    opts: &SolveOptions,
) -> Result<CountResult<R>, SolveError> {
    let (reduced, _) = reduce_to_signed_2sat(formula)?;
    cdp_weighted(&reduced, opts)
}

/// Plain 3-CNF counting: branch on the variable of maximal 3-degree while
/// the residual 3-clause density exceeds 2/3 (measured against the
/// unassigned variables of the subproblem), then finish each leaf through
/// the reduction. Degree-one absorption, if enabled, applies only inside
/// the delegated solves; the dense phase keeps the residual plain.
pub fn cdp_3to2<R: Ring>(
    formula: &WeightedFormula<R>,
    opts: &SolveOptions,
) -> Result<CountResult<R>, SolveError> {
    if !formula.is_plain() {
        return Err(SolveError::NotPlain);
    }
    if let Some(widest) = formula.clauses().iter().map(|c| c.width()).max() {
        if widest > 3 {
            return Err(SolveError::WidthTooLarge { width: widest, max: 3 });
        }
    }
    solve_machine(formula, opts, Mode::DenseThree)
}
