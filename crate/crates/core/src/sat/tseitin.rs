use std::collections::BTreeMap;
use std::ops::Not;

use super::{ClauseSink, CnfFormula, Literal, SatError, SatVar};
use crate::model::{BinOp, BoolExpr, Identifier};

/// A circuit wire: either a known constant or a literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    Const(bool),
    Lit(Literal),
}

impl Not for Signal {
    type Output = Signal;

    fn not(self) -> Signal {
        match self {
            Signal::Const(v) => Signal::Const(!v),
            Signal::Lit(l) => Signal::Lit(!l),
        }
    }
}

impl From<Literal> for Signal {
    fn from(lit: Literal) -> Self {
        Signal::Lit(lit)
    }
}

/// Tseitin gate encoder with constant propagation.
///
/// Each AND/OR/XOR gate over two literals allocates one definition
/// variable; NOT is free. A shared variable fixed to true is allocated the
/// first time a constant has to become a literal.
#[derive(Debug, Clone, Default)]
pub struct Encoder {
    true_lit: Option<Literal>,
}

impl Encoder {
    pub fn new() -> Self {
        Encoder::default()
    }

    pub fn true_literal<S: ClauseSink>(&mut self, sink: &mut S) -> Literal {
        *self.true_lit.get_or_insert_with(|| {
            let v = sink.new_var().positive();
            sink.add_clause(&[v]);
            v
        })
    }

    /// Materializes a signal as a literal.
    pub fn literal<S: ClauseSink>(&mut self, sink: &mut S, signal: Signal) -> Literal {
        match signal {
            Signal::Lit(l) => l,
            Signal::Const(true) => self.true_literal(sink),
            Signal::Const(false) => !self.true_literal(sink),
        }
    }

    pub fn gate<S: ClauseSink>(&mut self, sink: &mut S, op: BinOp, a: Signal, b: Signal) -> Signal {
        match op {
            BinOp::And => self.and(sink, a, b),
            BinOp::Or => !self.and(sink, !a, !b),
            BinOp::Xor => self.xor(sink, a, b),
        }
    }

    pub fn and<S: ClauseSink>(&mut self, sink: &mut S, a: Signal, b: Signal) -> Signal {
        match (a, b) {
            (Signal::Const(false), _) | (_, Signal::Const(false)) => Signal::Const(false),
            (Signal::Const(true), x) | (x, Signal::Const(true)) => x,
            (Signal::Lit(x), Signal::Lit(y)) if x == y => a,
            (Signal::Lit(x), Signal::Lit(y)) if x == !y => Signal::Const(false),
            (Signal::Lit(x), Signal::Lit(y)) => {
                let g = sink.new_var().positive();
                sink.add_clause(&[!g, x]);
                sink.add_clause(&[!g, y]);
                sink.add_clause(&[g, !x, !y]);
                Signal::Lit(g)
            }
        }
    }

    pub fn or<S: ClauseSink>(&mut self, sink: &mut S, a: Signal, b: Signal) -> Signal {
        self.gate(sink, BinOp::Or, a, b)
    }

    pub fn xor<S: ClauseSink>(&mut self, sink: &mut S, a: Signal, b: Signal) -> Signal {
        match (a, b) {
            (Signal::Const(c), x) | (x, Signal::Const(c)) => {
                if c {
                    !x
                } else {
                    x
                }
            }
            (Signal::Lit(x), Signal::Lit(y)) if x == y => Signal::Const(false),
            (Signal::Lit(x), Signal::Lit(y)) if x == !y => Signal::Const(true),
            (Signal::Lit(x), Signal::Lit(y)) => {
                let g = sink.new_var().positive();
                sink.add_clause(&[!g, x, y]);
                sink.add_clause(&[!g, !x, !y]);
                sink.add_clause(&[g, !x, y]);
                sink.add_clause(&[g, x, !y]);
                Signal::Lit(g)
            }
        }
    }

    /// `a <-> b` as a signal.
    pub fn equal<S: ClauseSink>(&mut self, sink: &mut S, a: Signal, b: Signal) -> Signal {
        !self.xor(sink, a, b)
    }

    /// Disjunction of many signals.
    pub fn any<S: ClauseSink>(&mut self, sink: &mut S, items: &[Signal]) -> Signal {
        if items.contains(&Signal::Const(true)) {
            return Signal::Const(true);
        }
        let lits: Vec<Literal> = items
            .iter()
            .filter_map(|s| match s {
                Signal::Lit(l) => Some(*l),
                Signal::Const(_) => None,
            })
            .collect();
        match lits.as_slice() {
            [] => Signal::Const(false),
            [single] => Signal::Lit(*single),
            _ => {
                let g = sink.new_var().positive();
                for &l in &lits {
                    sink.add_clause(&[g, !l]);
                }
                let mut long = vec![!g];
                long.extend_from_slice(&lits);
                sink.add_clause(&long);
                Signal::Lit(g)
            }
        }
    }

    /// Encodes `expr`, resolving variables through `lookup`.
    pub fn encode<S, F>(&mut self, sink: &mut S, expr: &BoolExpr, lookup: &F) -> Result<Signal, SatError>
    where
        S: ClauseSink,
        F: Fn(&Identifier) -> Option<Signal>,
    {
        Ok(match expr {
            BoolExpr::Const(v) => Signal::Const(*v),
            BoolExpr::Var(id) => lookup(id).ok_or_else(|| SatError::UnboundVariable(id.clone()))?,
            BoolExpr::Not(inner) => !self.encode(sink, inner, lookup)?,
            _ => {
                let (op, l, r) = expr.as_binary().expect("binary node");
                let l = self.encode(sink, l, lookup)?;
                let r = self.encode(sink, r, lookup)?;
                self.gate(sink, op, l, r)
            }
        })
    }
}

/// Tseitin transformation of `root` over the given variable mapping.
///
/// The returned formula ranges over the mapped variables plus fresh
/// definition variables; asserting the returned literal constrains `root`
/// to be true.
pub fn tseitin(
    root: &BoolExpr,
    var_map: &BTreeMap<Identifier, SatVar>,
) -> Result<(CnfFormula, Literal), SatError> {
    let base = var_map.values().map(|v| v.index()).max().unwrap_or(0);
    let mut formula = CnfFormula::with_vars(base);
    let mut encoder = Encoder::new();
    let lookup = |id: &Identifier| var_map.get(id).map(|v| Signal::Lit(v.positive()));
    let signal = encoder.encode(&mut formula, root, &lookup)?;
    let root_lit = encoder.literal(&mut formula, signal);
    Ok((formula, root_lit))
}
