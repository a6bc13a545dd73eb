//! Propositional decision procedure: CNF formulas, a CDCL solver with
//! assumptions, and the Tseitin encoding of Boolean expressions.

mod solver;
mod tseitin;

use std::fmt;
use std::fmt::Write as _;
use std::ops::Not;

use thiserror::Error;

use crate::model::Identifier;

pub use solver::{Heuristic, Solver, SolverConfig, SolverStats};
pub use tseitin::{tseitin, Encoder, Signal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Identifier),
}

/// Propositional variable, numbered densely from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SatVar(u32);

impl SatVar {
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "SAT variables are numbered from 1");
        SatVar(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn positive(self) -> Literal {
        Literal::new(self, false)
    }

    pub fn negative(self) -> Literal {
        Literal::new(self, true)
    }
}

/// A variable or its negation, packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(u32);

impl Literal {
    pub fn new(var: SatVar, negated: bool) -> Self {
        Literal(var.0 << 1 | u32::from(negated))
    }

    pub fn var(self) -> SatVar {
        SatVar(self.0 >> 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }

    /// DIMACS integer form.
    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().index());
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(value: i64) -> Self {
        assert!(value != 0, "0 is the DIMACS clause terminator");
        let var = SatVar::new(value.unsigned_abs() as u32);
        Literal::new(var, value < 0)
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Anything clauses can be written into.
pub trait ClauseSink {
    fn new_var(&mut self) -> SatVar;
    fn add_clause(&mut self, lits: &[Literal]);
}

/// Clause set over variables `1..=num_vars`.
///
/// An empty clause is never stored; adding one marks the formula as
/// contradictory instead.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Vec<Literal>>,
    contradiction: bool,
}

impl CnfFormula {
    pub fn new() -> Self {
        CnfFormula::default()
    }

    pub fn with_vars(num_vars: u32) -> Self {
        CnfFormula { num_vars, ..CnfFormula::default() }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn is_contradiction(&self) -> bool {
        self.contradiction
    }

    /// Grows the variable range so that `var` is valid.
    pub fn ensure_var(&mut self, var: SatVar) {
        self.num_vars = self.num_vars.max(var.index());
    }

    pub fn is_satisfied_by(&self, model: &Model) -> bool {
        !self.contradiction
            && self
                .clauses
                .iter()
                .all(|c| c.iter().any(|&l| model.lit_value(l)))
    }

    /// DIMACS CNF text: `p cnf <vars> <clauses>` then zero-terminated lines.
    pub fn to_dimacs(&self) -> String {
        let count = self.clauses.len() + usize::from(self.contradiction);
        let mut out = format!("p cnf {} {}\n", self.num_vars, count);
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{} ", lit.to_dimacs());
            }
            out.push_str("0\n");
        }
        if self.contradiction {
            out.push_str("0\n");
        }
        out
    }
}

impl ClauseSink for CnfFormula {
    fn new_var(&mut self) -> SatVar {
        self.num_vars += 1;
        SatVar(self.num_vars)
    }

    fn add_clause(&mut self, lits: &[Literal]) {
        if lits.is_empty() {
            self.contradiction = true;
            return;
        }
        for lit in lits {
            assert!(
                lit.var().index() <= self.num_vars,
                "literal {lit:?} outside variable range 1..={}",
                self.num_vars
            );
        }
        self.clauses.push(lits.to_vec());
    }
}

/// Total assignment over `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub(crate) fn from_values(values: Vec<bool>) -> Self {
        Model { values }
    }

    pub fn num_vars(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn value(&self, var: SatVar) -> bool {
        self.values[var.index() as usize]
    }

    pub fn lit_value(&self, lit: Literal) -> bool {
        self.value(lit.var()) != lit.is_negated()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat => None,
        }
    }
}

/// Solves `formula` under `assumptions` with the default configuration.
pub fn solve(formula: &CnfFormula, assumptions: &[Literal], seed: u64) -> SatResult {
    let mut solver = Solver::new(SolverConfig { seed, ..SolverConfig::default() });
    solver.load(formula);
    for lit in assumptions {
        solver.reserve_var(lit.var());
    }
    let result = solver.solve(assumptions);
    if let SatResult::Sat(model) = &result {
        assert!(formula.is_satisfied_by(model), "solver returned a non-model");
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v)
    }

    #[test]
    fn literal_packing() {
        let l = lit(-7);
        assert_eq!(l.var().index(), 7);
        assert!(l.is_negated());
        assert_eq!(!l, lit(7));
        assert_eq!((!l).to_dimacs(), 7);
    }

    #[test]
    fn empty_clause_marks_contradiction() {
        let mut f = CnfFormula::with_vars(1);
        f.add_clause(&[]);
        assert!(f.is_contradiction());
        assert_eq!(solve(&f, &[], 0), SatResult::Unsat);
        assert_eq!(f.to_dimacs(), "p cnf 1 1\n0\n");
    }

    #[test]
    fn dimacs_export() {
        let mut f = CnfFormula::with_vars(3);
        f.add_clause(&[lit(1), lit(-2)]);
        f.add_clause(&[lit(3)]);
        assert_eq!(f.to_dimacs(), "p cnf 3 2\n1 -2 0\n3 0\n");
    }

    #[test]
    #[should_panic(expected = "outside variable range")]
    fn literal_out_of_range_panics() {
        let mut f = CnfFormula::with_vars(1);
        f.add_clause(&[lit(2)]);
    }
}
