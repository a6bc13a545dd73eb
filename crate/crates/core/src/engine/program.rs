//! Straight-line slot programs: the candidate form the synthesizer
//! searches over.

use std::fmt;

use super::table::{Column, PatternSpace};
use crate::model::{BinOp, BoolExpr, Identifier};

/// An operand: an input variable or an earlier slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Src {
    Input(usize),
    Slot(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotOp {
    Const(bool),
    Id(Src),
    Not(Src),
    Bin(BinOp, Src, Src),
}

impl SlotOp {
    pub fn operands(&self) -> Vec<Src> {
        match *self {
            SlotOp::Const(_) => vec![],
            SlotOp::Id(s) | SlotOp::Not(s) => vec![s],
            SlotOp::Bin(_, l, r) => vec![l, r],
        }
    }
}

/// Slots in dependency order; `outputs[i]` is the slot driving output `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub slots: Vec<SlotOp>,
    pub outputs: Vec<usize>,
}

impl Program {
    /// Checks that operands only refer backwards.
    pub fn is_well_formed(&self, num_inputs: usize) -> bool {
        self.slots.iter().enumerate().all(|(j, op)| {
            op.operands().iter().all(|s| match *s {
                Src::Input(i) => i < num_inputs,
                Src::Slot(i) => i < j,
            })
        }) && self.outputs.iter().all(|o| *o < self.slots.len())
    }

    /// Slots reachable from some output.
    pub fn live(&self) -> Vec<bool> {
        let mut live = vec![false; self.slots.len()];
        for o in &self.outputs {
            live[*o] = true;
        }
        for j in (0..self.slots.len()).rev() {
            if live[j] {
                for s in self.slots[j].operands() {
                    if let Src::Slot(i) = s {
                        live[i] = true;
                    }
                }
            }
        }
        live
    }

    pub fn live_count(&self) -> usize {
        self.live().iter().filter(|l| **l).count()
    }

    /// Drops dead slots and renumbers the rest.
    pub fn pruned(&self) -> Program {
        let live = self.live();
        let mut index = vec![usize::MAX; self.slots.len()];
        let mut slots = Vec::new();
        let remap = |s: Src, index: &[usize]| match s {
            Src::Slot(i) => Src::Slot(index[i]),
            other => other,
        };
        for (j, op) in self.slots.iter().enumerate() {
            if !live[j] {
                continue;
            }
            index[j] = slots.len();
            slots.push(match *op {
                SlotOp::Const(c) => SlotOp::Const(c),
                SlotOp::Id(s) => SlotOp::Id(remap(s, &index)),
                SlotOp::Not(s) => SlotOp::Not(remap(s, &index)),
                SlotOp::Bin(b, l, r) => SlotOp::Bin(b, remap(l, &index), remap(r, &index)),
            });
        }
        Program { slots, outputs: self.outputs.iter().map(|o| index[*o]).collect() }
    }

    /// Expression tree of output `i`, sharing expanded.
    pub fn output_expr(&self, i: usize, inputs: &[Identifier]) -> BoolExpr {
        let mut exprs: Vec<BoolExpr> = Vec::with_capacity(self.slots.len());
        let src = |s: Src, exprs: &[BoolExpr]| match s {
            Src::Input(k) => BoolExpr::var(&inputs[k]),
            Src::Slot(k) => exprs[k].clone(),
        };
        for op in &self.slots {
            let e = match *op {
                SlotOp::Const(c) => BoolExpr::Const(c),
                SlotOp::Id(s) => src(s, &exprs),
                SlotOp::Not(s) => BoolExpr::not(src(s, &exprs)),
                SlotOp::Bin(b, l, r) => BoolExpr::binary(b, src(l, &exprs), src(r, &exprs)),
            };
            exprs.push(e);
        }
        exprs.swap_remove(self.outputs[i])
    }

    /// Truth-table column of every slot.
    pub fn eval_slots(&self, space: &PatternSpace, inputs: &[Column]) -> Vec<Column> {
        let mut cols: Vec<Column> = Vec::with_capacity(self.slots.len());
        for op in &self.slots {
            let get = |s: Src, cols: &[Column]| match s {
                Src::Input(k) => inputs[k].clone(),
                Src::Slot(k) => cols[k].clone(),
            };
            let c = match *op {
                SlotOp::Const(c) => space.constant(c),
                SlotOp::Id(s) => get(s, &cols),
                SlotOp::Not(s) => space.not(&get(s, &cols)),
                SlotOp::Bin(b, l, r) => {
                    let (l, r) = (get(l, &cols), get(r, &cols));
                    l.iter().zip(&r).map(|(x, y)| b.apply_word(*x, *y)).collect()
                }
            };
            cols.push(c);
        }
        cols
    }

    pub fn eval_outputs(&self, space: &PatternSpace, inputs: &[Column]) -> Vec<Column> {
        let cols = self.eval_slots(space, inputs);
        self.outputs.iter().map(|o| cols[*o].clone()).collect()
    }

    /// Slot form of an expression tree over `inputs`: one slot per
    /// operator; a bare variable or constant takes one slot. Returns
    /// `None` if the expression mentions a non-input.
    pub fn from_expr(expr: &BoolExpr, inputs: &[Identifier]) -> Option<Program> {
        let mut slots = Vec::new();
        let root = match lower(expr, inputs, &mut slots)? {
            Src::Slot(j) => j,
            Src::Input(i) => {
                slots.push(SlotOp::Id(Src::Input(i)));
                slots.len() - 1
            }
        };
        Some(Program { slots, outputs: vec![root] })
    }
}

fn lower(expr: &BoolExpr, inputs: &[Identifier], slots: &mut Vec<SlotOp>) -> Option<Src> {
    let op = match expr {
        BoolExpr::Var(id) => return inputs.iter().position(|n| n == id).map(Src::Input),
        BoolExpr::Const(c) => SlotOp::Const(*c),
        BoolExpr::Not(inner) => SlotOp::Not(lower(inner, inputs, slots)?),
        _ => {
            let (b, l, r) = expr.as_binary().expect("binary node");
            let l = lower(l, inputs, slots)?;
            let r = lower(r, inputs, slots)?;
            SlotOp::Bin(b, l, r)
        }
    };
    slots.push(op);
    Some(Src::Slot(slots.len() - 1))
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let src = |s: Src| match s {
            Src::Input(i) => format!("in{i}"),
            Src::Slot(j) => format!("s{j}"),
        };
        for (j, op) in self.slots.iter().enumerate() {
            let rhs = match *op {
                SlotOp::Const(c) => c.to_string(),
                SlotOp::Id(s) => src(s),
                SlotOp::Not(s) => format!("NOT {}", src(s)),
                SlotOp::Bin(b, l, r) => format!("{} {} {}", src(l), b.keyword(), src(r)),
            };
            writeln!(f, "s{j} = {rhs}")?;
        }
        write!(f, "out = {:?}", self.outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(names: &[&str]) -> Vec<Identifier> {
        names.iter().map(|n| Identifier::new(n).unwrap()).collect()
    }

    #[test]
    fn expr_round_trip() {
        let inputs = ids(&["a", "b", "c"]);
        let e = BoolExpr::or(
            BoolExpr::and(BoolExpr::named("b"), BoolExpr::named("c")),
            BoolExpr::not(BoolExpr::named("a")),
        );
        let p = Program::from_expr(&e, &inputs).unwrap();
        assert_eq!(p.slots.len(), 3);
        assert!(p.is_well_formed(3));
        assert_eq!(p.output_expr(0, &inputs), e);
        let leaf = Program::from_expr(&BoolExpr::named("b"), &inputs).unwrap();
        assert_eq!(leaf.slots, vec![SlotOp::Id(Src::Input(1))]);
        assert!(Program::from_expr(&BoolExpr::named("q"), &inputs).is_none());
    }

    #[test]
    fn pruning_and_evaluation() {
        let inputs = ids(&["a", "b"]);
        let p = Program {
            slots: vec![
                SlotOp::Not(Src::Input(0)),
                SlotOp::Bin(BinOp::Xor, Src::Input(0), Src::Input(1)),
                SlotOp::Bin(BinOp::And, Src::Slot(1), Src::Input(1)),
            ],
            outputs: vec![2],
        };
        assert_eq!(p.live(), vec![false, true, true]);
        let q = p.pruned();
        assert_eq!(q.slots.len(), 2);
        assert_eq!(q.output_expr(0, &inputs), p.output_expr(0, &inputs));
        let space = PatternSpace::new(inputs);
        // (a XOR b) AND b is true only for a=0, b=1 (pattern 2).
        assert_eq!(q.eval_outputs(&space, &space.inputs()), vec![vec![0b0100]]);
    }
}
