//! Selector encoding of slot programs.
//!
//! Every slot has a one-hot operator choice, a constant bit and two
//! one-hot operand selectors ranging over the inputs and earlier slots.
//! Each example pattern adds a copy of the circuit evaluated at that
//! pattern, tied to the shared selectors.

use super::program::{Program, SlotOp, Src};
use crate::model::BinOp;
use crate::sat::{Encoder, Literal, Model, Signal, Solver};
use crate::ClauseSink;

pub const OP_CONST: usize = 0;
pub const OP_ID: usize = 1;
pub const OP_NOT: usize = 2;
pub const OP_AND: usize = 3;
pub const OP_OR: usize = 4;
pub const OP_XOR: usize = 5;
const NUM_OPS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub num_inputs: usize,
    pub num_slots: usize,
    pub num_outputs: usize,
    /// Single output driven by the last slot (otherwise outputs select
    /// their slot freely).
    pub last_slot_output: bool,
    /// Adds constraints that only exclude programs for which a smaller
    /// equivalent one exists. Only sound when searching by increasing
    /// slot count.
    pub symmetry_breaking: bool,
}

#[derive(Debug, Clone)]
pub struct Template {
    pub shape: Shape,
    pub ops: Vec<[Literal; NUM_OPS]>,
    pub cval: Vec<Literal>,
    pub lsel: Vec<Vec<Literal>>,
    pub rsel: Vec<Vec<Literal>>,
    /// `osel[o][j]`: output `o` reads slot `j`.
    pub osel: Vec<Vec<Literal>>,
}

fn fresh(solver: &mut Solver) -> Literal {
    solver.new_var().positive()
}

pub fn exactly_one(solver: &mut Solver, lits: &[Literal]) {
    solver.add_clause(lits);
    for (i, a) in lits.iter().enumerate() {
        for b in &lits[i + 1..] {
            solver.add_clause(&[!*a, !*b]);
        }
    }
}

impl Template {
    pub fn sources(&self, slot: usize) -> usize {
        self.shape.num_inputs + slot
    }

    pub fn build(solver: &mut Solver, shape: Shape) -> Template {
        let (n, k) = (shape.num_inputs, shape.num_slots);
        assert!(k >= 1);
        let mut t = Template { shape, ops: Vec::new(), cval: Vec::new(), lsel: Vec::new(), rsel: Vec::new(), osel: Vec::new() };
        for j in 0..k {
            let ops: [Literal; NUM_OPS] = std::array::from_fn(|_| fresh(solver));
            exactly_one(solver, &ops);
            t.cval.push(fresh(solver));
            let sources = n + j;
            let lsel: Vec<Literal> = (0..sources).map(|_| fresh(solver)).collect();
            let rsel: Vec<Literal> = (0..sources).map(|_| fresh(solver)).collect();
            if sources == 0 {
                for op in &ops[OP_ID..] {
                    solver.add_clause(&[!*op]);
                }
            } else {
                exactly_one(solver, &lsel);
                exactly_one(solver, &rsel);
            }
            t.ops.push(ops);
            t.lsel.push(lsel);
            t.rsel.push(rsel);
        }
        if shape.last_slot_output {
            assert_eq!(shape.num_outputs, 1);
            let sel: Vec<Literal> = (0..k).map(|_| fresh(solver)).collect();
            for (j, s) in sel.iter().enumerate() {
                solver.add_clause(&[if j == k - 1 { *s } else { !*s }]);
            }
            t.osel.push(sel);
        } else {
            for _ in 0..shape.num_outputs {
                let sel: Vec<Literal> = (0..k).map(|_| fresh(solver)).collect();
                exactly_one(solver, &sel);
                t.osel.push(sel);
            }
        }
        if shape.symmetry_breaking {
            t.break_symmetries(solver);
        }
        t
    }

    fn break_symmetries(&self, solver: &mut Solver) {
        let (n, k) = (self.shape.num_inputs, self.shape.num_slots);
        for j in 0..k {
            let ops = &self.ops[j];
            let sources = self.sources(j);
            if sources == 0 {
                continue;
            }
            // With more than one slot a copy or a constant can always be
            // folded into its users.
            if self.shape.last_slot_output && k > 1 {
                solver.add_clause(&[!ops[OP_CONST]]);
                solver.add_clause(&[!ops[OP_ID]]);
            }
            // Unused selectors take a fixed value.
            solver.add_clause(&[!ops[OP_CONST], self.lsel[j][0]]);
            for op in [OP_CONST, OP_ID, OP_NOT] {
                solver.add_clause(&[!ops[op], self.rsel[j][0]]);
            }
            // Binary operands strictly ordered (all three operators commute,
            // and `x op x` is never needed).
            for a in 0..sources {
                for b in 0..=a {
                    solver.add_clause(&[
                        ops[OP_CONST],
                        ops[OP_ID],
                        ops[OP_NOT],
                        !self.lsel[j][a],
                        !self.rsel[j][b],
                    ]);
                }
            }
            // No double negation.
            for i in 0..j {
                solver.add_clause(&[!ops[OP_NOT], !self.lsel[j][n + i], !self.ops[i][OP_NOT]]);
            }
        }
        // Adjacent slots that do not depend on each other could be swapped,
        // so their (left, right, operator) keys must be non-decreasing. A
        // greedy topological order picking the smallest available key
        // satisfies this for any program.
        for j in 0..k.saturating_sub(1) {
            let dep = [self.lsel[j + 1][n + j], self.rsel[j + 1][n + j]];
            let sources = self.sources(j);
            for a in 0..sources {
                let (l0, l1) = (self.lsel[j][a], self.lsel[j + 1][a]);
                for b in 0..a {
                    solver.add_clause(&[dep[0], dep[1], !l0, !self.lsel[j + 1][b]]);
                }
                for c in 0..sources {
                    let (r0, r1) = (self.rsel[j][c], self.rsel[j + 1][c]);
                    for d in 0..c {
                        solver.add_clause(&[dep[0], dep[1], !l0, !l1, !r0, !self.rsel[j + 1][d]]);
                    }
                    for o1 in 0..NUM_OPS {
                        for o2 in 0..o1 {
                            solver.add_clause(&[
                                dep[0],
                                dep[1],
                                !l0,
                                !l1,
                                !r0,
                                !r1,
                                !self.ops[j][o1],
                                !self.ops[j + 1][o2],
                            ]);
                        }
                    }
                }
            }
        }
        // Every slot feeds a later slot or an output.
        for j in 0..k {
            let mut users: Vec<Literal> = self.osel.iter().map(|sel| sel[j]).collect();
            for m in j + 1..k {
                users.push(self.lsel[m][n + j]);
                users.push(self.rsel[m][n + j]);
            }
            solver.add_clause(&users);
        }
    }

    /// Adds the circuit at one input pattern; returns the output signals.
    pub fn add_example(&self, solver: &mut Solver, pattern: &[bool]) -> Vec<Signal> {
        let (n, k) = (self.shape.num_inputs, self.shape.num_slots);
        assert_eq!(pattern.len(), n);
        let mut values: Vec<Literal> = Vec::with_capacity(k);
        for j in 0..k {
            let src = |s: usize, values: &[Literal]| {
                if s < n {
                    Signal::Const(pattern[s])
                } else {
                    Signal::Lit(values[s - n])
                }
            };
            let operand = |solver: &mut Solver, sel: &[Literal], values: &[Literal]| {
                let x = fresh(solver);
                for (s, &choose) in sel.iter().enumerate() {
                    match src(s, values) {
                        Signal::Const(true) => solver.add_clause(&[!choose, x]),
                        Signal::Const(false) => solver.add_clause(&[!choose, !x]),
                        Signal::Lit(v) => {
                            solver.add_clause(&[!choose, !x, v]);
                            solver.add_clause(&[!choose, x, !v]);
                        }
                    }
                }
                x
            };
            let ops = self.ops[j];
            let v = fresh(solver);
            let c = self.cval[j];
            solver.add_clause(&[!ops[OP_CONST], !v, c]);
            solver.add_clause(&[!ops[OP_CONST], v, !c]);
            if self.sources(j) > 0 {
                let l = operand(solver, &self.lsel[j], &values);
                let r = operand(solver, &self.rsel[j], &values);
                solver.add_clause(&[!ops[OP_ID], !v, l]);
                solver.add_clause(&[!ops[OP_ID], v, !l]);
                solver.add_clause(&[!ops[OP_NOT], !v, !l]);
                solver.add_clause(&[!ops[OP_NOT], v, l]);
                solver.add_clause(&[!ops[OP_AND], !v, l]);
                solver.add_clause(&[!ops[OP_AND], !v, r]);
                solver.add_clause(&[!ops[OP_AND], v, !l, !r]);
                solver.add_clause(&[!ops[OP_OR], v, !l]);
                solver.add_clause(&[!ops[OP_OR], v, !r]);
                solver.add_clause(&[!ops[OP_OR], !v, l, r]);
                solver.add_clause(&[!ops[OP_XOR], !v, l, r]);
                solver.add_clause(&[!ops[OP_XOR], !v, !l, !r]);
                solver.add_clause(&[!ops[OP_XOR], v, !l, r]);
                solver.add_clause(&[!ops[OP_XOR], v, l, !r]);
            }
            values.push(v);
        }
        if self.shape.last_slot_output {
            return vec![Signal::Lit(values[k - 1])];
        }
        self.osel
            .iter()
            .map(|sel| {
                let out = fresh(solver);
                for (j, &choose) in sel.iter().enumerate() {
                    solver.add_clause(&[!choose, !out, values[j]]);
                    solver.add_clause(&[!choose, out, !values[j]]);
                }
                Signal::Lit(out)
            })
            .collect()
    }

    pub fn decode(&self, model: &Model) -> Program {
        let n = self.shape.num_inputs;
        let pick = |lits: &[Literal]| lits.iter().position(|l| model.lit_value(*l));
        let src = |s: usize| if s < n { Src::Input(s) } else { Src::Slot(s - n) };
        let slots = (0..self.shape.num_slots)
            .map(|j| {
                let op = pick(&self.ops[j]).expect("one operator per slot");
                let l = pick(&self.lsel[j]).map(src);
                let r = pick(&self.rsel[j]).map(src);
                match op {
                    OP_CONST => SlotOp::Const(model.lit_value(self.cval[j])),
                    OP_ID => SlotOp::Id(l.unwrap()),
                    OP_NOT => SlotOp::Not(l.unwrap()),
                    OP_AND => SlotOp::Bin(BinOp::And, l.unwrap(), r.unwrap()),
                    OP_OR => SlotOp::Bin(BinOp::Or, l.unwrap(), r.unwrap()),
                    _ => SlotOp::Bin(BinOp::Xor, l.unwrap(), r.unwrap()),
                }
            })
            .collect();
        let outputs = self.osel.iter().map(|sel| pick(sel).expect("one slot per output")).collect();
        Program { slots, outputs }
    }

    /// Literals that hold exactly when the template decodes to `op` at
    /// `slot` (operands renumbered by `map_src`).
    pub fn matches(&self, slot: usize, op: &SlotOp, map_src: &dyn Fn(Src) -> usize) -> Vec<Literal> {
        let ops = &self.ops[slot];
        match *op {
            SlotOp::Const(c) => vec![ops[OP_CONST], if c { self.cval[slot] } else { !self.cval[slot] }],
            SlotOp::Id(s) => vec![ops[OP_ID], self.lsel[slot][map_src(s)]],
            SlotOp::Not(s) => vec![ops[OP_NOT], self.lsel[slot][map_src(s)]],
            SlotOp::Bin(b, l, r) => {
                let op = match b {
                    BinOp::And => OP_AND,
                    BinOp::Or => OP_OR,
                    BinOp::Xor => OP_XOR,
                };
                vec![ops[op], self.lsel[slot][map_src(l)], self.rsel[slot][map_src(r)]]
            }
        }
    }

    /// Signal per slot that is true when the slot's value reaches an
    /// output.
    pub fn liveness(&self, solver: &mut Solver, enc: &mut Encoder) -> Vec<Signal> {
        let (n, k) = (self.shape.num_inputs, self.shape.num_slots);
        let mut live = vec![Signal::Const(false); k];
        for j in (0..k).rev() {
            let mut reasons: Vec<Signal> = self.osel.iter().map(|sel| Signal::Lit(sel[j])).collect();
            for m in j + 1..k {
                let ops = &self.ops[m];
                let uses_l = !Signal::Lit(ops[OP_CONST]);
                let uses_r = enc.any(solver, &[ops[OP_AND].into(), ops[OP_OR].into(), ops[OP_XOR].into()]);
                let via_l = enc.and(solver, uses_l, Signal::Lit(self.lsel[m][n + j]));
                let via_r = enc.and(solver, uses_r, Signal::Lit(self.rsel[m][n + j]));
                let via = enc.or(solver, via_l, via_r);
                reasons.push(enc.and(solver, live[m], via));
            }
            live[j] = enc.any(solver, &reasons);
        }
        live
    }
}

/// Sequential counter: `out[t]` is forced true whenever at least `t + 1`
/// of `lits` are true (for `t < max`). Assuming `!out[t]` bounds the count
/// by `t`.
pub fn at_least_counter(solver: &mut Solver, lits: &[Literal], max: usize) -> Vec<Literal> {
    let mut prev: Vec<Literal> = Vec::new();
    for (i, &x) in lits.iter().enumerate() {
        let width = (i + 1).min(max);
        let cur: Vec<Literal> = (0..width).map(|_| fresh(solver)).collect();
        for t in 0..width {
            if t < prev.len() {
                solver.add_clause(&[!prev[t], cur[t]]);
            }
            if t == 0 {
                solver.add_clause(&[!x, cur[0]]);
            } else if t - 1 < prev.len() {
                solver.add_clause(&[!x, !prev[t - 1], cur[t]]);
            }
        }
        prev = cur;
    }
    prev
}
