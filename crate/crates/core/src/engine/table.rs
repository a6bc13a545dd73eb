//! Bit-parallel truth tables: bit `p` of a column is the value at input
//! pattern `p`, where bit `i` of `p` is the value of input `i`.

use std::collections::BTreeMap;

use crate::model::{Assignment, BoolExpr, Identifier};

/// Widest input set checked by enumeration instead of SAT.
pub const MAX_EXHAUSTIVE_INPUTS: usize = 12;

pub type Column = Vec<u64>;

#[derive(Debug, Clone)]
pub struct PatternSpace {
    names: Vec<Identifier>,
    words: usize,
    last_mask: u64,
}

impl PatternSpace {
    pub fn new(names: Vec<Identifier>) -> Self {
        assert!(names.len() <= 20, "too many inputs to enumerate");
        let patterns = 1usize << names.len();
        let words = patterns.div_ceil(64);
        let last_mask = if patterns >= 64 { u64::MAX } else { (1u64 << patterns) - 1 };
        PatternSpace { names, words, last_mask }
    }

    pub fn names(&self) -> &[Identifier] {
        &self.names
    }

    pub fn num_patterns(&self) -> usize {
        1 << self.names.len()
    }

    pub fn constant(&self, value: bool) -> Column {
        let mut col = vec![if value { u64::MAX } else { 0 }; self.words];
        *col.last_mut().unwrap() &= self.last_mask;
        col
    }

    pub fn input(&self, i: usize) -> Column {
        (0..self.words)
            .map(|w| {
                let mut bits = 0u64;
                for b in 0..64 {
                    let p = w * 64 + b;
                    if p < self.num_patterns() && p >> i & 1 == 1 {
                        bits |= 1 << b;
                    }
                }
                bits
            })
            .collect()
    }

    pub fn inputs(&self) -> Vec<Column> {
        (0..self.names.len()).map(|i| self.input(i)).collect()
    }

    pub fn not(&self, col: &Column) -> Column {
        let mut out: Column = col.iter().map(|w| !w).collect();
        *out.last_mut().unwrap() &= self.last_mask;
        out
    }

    pub fn assignment(&self, pattern: usize) -> Assignment {
        Assignment::from_bits(&self.names, pattern as u64)
    }

    /// Evaluates `expr` with variables bound to columns in `env`.
    pub fn eval(&self, expr: &BoolExpr, env: &BTreeMap<Identifier, Column>) -> Column {
        match expr {
            BoolExpr::Const(v) => self.constant(*v),
            BoolExpr::Var(id) => env.get(id).unwrap_or_else(|| panic!("unbound `{id}`")).clone(),
            BoolExpr::Not(inner) => self.not(&self.eval(inner, env)),
            _ => {
                let (op, l, r) = expr.as_binary().expect("binary node");
                let l = self.eval(l, env);
                let r = self.eval(r, env);
                l.iter().zip(&r).map(|(a, b)| op.apply_word(*a, *b)).collect()
            }
        }
    }

    /// Columns of the input variables keyed by name.
    pub fn input_env(&self) -> BTreeMap<Identifier, Column> {
        self.names.iter().cloned().zip(self.inputs()).collect()
    }
}

pub fn or(a: &Column, b: &Column) -> Column {
    a.iter().zip(b).map(|(x, y)| x | y).collect()
}

pub fn and(a: &Column, b: &Column) -> Column {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

pub fn is_zero(col: &Column) -> bool {
    col.iter().all(|w| *w == 0)
}

pub fn count(col: &Column) -> usize {
    col.iter().map(|w| w.count_ones() as usize).sum()
}

pub fn bit(col: &Column, p: usize) -> bool {
    col[p / 64] >> (p % 64) & 1 == 1
}

/// Index of the `n`-th set bit.
pub fn nth_set(col: &Column, mut n: usize) -> Option<usize> {
    for (w, word) in col.iter().enumerate() {
        let ones = word.count_ones() as usize;
        if n < ones {
            let mut bits = *word;
            for _ in 0..n {
                bits &= bits - 1;
            }
            return Some(w * 64 + bits.trailing_zeros() as usize);
        }
        n -= ones;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_match_pattern_bits() {
        let names: Vec<Identifier> = ["a", "b", "c"].iter().map(|n| Identifier::new(n).unwrap()).collect();
        let space = PatternSpace::new(names);
        assert_eq!(space.input(0), vec![0b1010_1010]);
        assert_eq!(space.input(2), vec![0b1111_0000]);
        assert_eq!(space.constant(true), vec![0xff]);
        let e = BoolExpr::and(BoolExpr::named("a"), BoolExpr::not(BoolExpr::named("c")));
        assert_eq!(space.eval(&e, &space.input_env()), vec![0b0000_1010]);
    }

    #[test]
    fn wide_spaces_and_bit_search() {
        let names: Vec<Identifier> = (0..8).map(|i| Identifier::new(&format!("x{i}")).unwrap()).collect();
        let space = PatternSpace::new(names);
        let col = space.input(7);
        assert_eq!(col.len(), 4);
        assert_eq!(count(&col), 128);
        assert!(!bit(&col, 127) && bit(&col, 128));
        assert_eq!(nth_set(&col, 0), Some(128));
        assert_eq!(nth_set(&col, 127), Some(255));
        assert_eq!(nth_set(&col, 128), None);
    }
}
