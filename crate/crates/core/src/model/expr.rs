use std::collections::BTreeSet;
use std::fmt;

use super::{Assignment, Identifier, ModelError};

/// Maximum nesting depth accepted for an expression tree.
pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    And,
    Or,
    Xor,
}

impl BinOp {
    pub const ALL: [BinOp; 3] = [BinOp::And, BinOp::Or, BinOp::Xor];

    pub fn apply(self, lhs: bool, rhs: bool) -> bool {
        match self {
            BinOp::And => lhs && rhs,
            BinOp::Or => lhs || rhs,
            BinOp::Xor => lhs ^ rhs,
        }
    }

    /// Word-parallel version of [`BinOp::apply`].
    pub fn apply_word(self, lhs: u64, rhs: u64) -> u64 {
        match self {
            BinOp::And => lhs & rhs,
            BinOp::Or => lhs | rhs,
            BinOp::Xor => lhs ^ rhs,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            BinOp::And => "AND",
            BinOp::Or => "OR",
            BinOp::Xor => "XOR",
        }
    }
}

/// Boolean expression over block variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolExpr {
    Const(bool),
    Var(Identifier),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Xor(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(id: &Identifier) -> Self {
        BoolExpr::Var(id.clone())
    }

    /// Builds a variable reference from a name known to be valid.
    ///
    /// Panics on an invalid identifier; meant for tests and fixed tables.
    pub fn named(name: &str) -> Self {
        BoolExpr::Var(Identifier::new(name).expect("valid identifier"))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(inner))
    }

    pub fn and(lhs: BoolExpr, rhs: BoolExpr) -> Self {
        BoolExpr::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: BoolExpr, rhs: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn xor(lhs: BoolExpr, rhs: BoolExpr) -> Self {
        BoolExpr::Xor(Box::new(lhs), Box::new(rhs))
    }

    pub fn binary(op: BinOp, lhs: BoolExpr, rhs: BoolExpr) -> Self {
        match op {
            BinOp::And => BoolExpr::and(lhs, rhs),
            BinOp::Or => BoolExpr::or(lhs, rhs),
            BinOp::Xor => BoolExpr::xor(lhs, rhs),
        }
    }

    /// Left-folded conjunction; `TRUE` for an empty iterator.
    pub fn all(items: impl IntoIterator<Item = BoolExpr>) -> Self {
        items
            .into_iter()
            .reduce(BoolExpr::and)
            .unwrap_or(BoolExpr::Const(true))
    }

    /// Left-folded disjunction; `FALSE` for an empty iterator.
    pub fn any(items: impl IntoIterator<Item = BoolExpr>) -> Self {
        items
            .into_iter()
            .reduce(BoolExpr::or)
            .unwrap_or(BoolExpr::Const(false))
    }

    /// Returns the operator and operands of a binary node.
    pub fn as_binary(&self) -> Option<(BinOp, &BoolExpr, &BoolExpr)> {
        match self {
            BoolExpr::And(l, r) => Some((BinOp::And, l, r)),
            BoolExpr::Or(l, r) => Some((BinOp::Or, l, r)),
            BoolExpr::Xor(l, r) => Some((BinOp::Xor, l, r)),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, BoolExpr::Const(_) | BoolExpr::Var(_))
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            BoolExpr::Const(_) | BoolExpr::Var(_) => 1,
            BoolExpr::Not(inner) => 1 + inner.size(),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) | BoolExpr::Xor(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    /// Number of operator nodes (NOT, AND, OR, XOR).
    pub fn operator_count(&self) -> usize {
        match self {
            BoolExpr::Const(_) | BoolExpr::Var(_) => 0,
            BoolExpr::Not(inner) => 1 + inner.operator_count(),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) | BoolExpr::Xor(l, r) => {
                1 + l.operator_count() + r.operator_count()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            BoolExpr::Const(_) | BoolExpr::Var(_) => 1,
            BoolExpr::Not(inner) => 1 + inner.depth(),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) | BoolExpr::Xor(l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }

    /// Variables referenced by the expression, sorted.
    pub fn vars(&self) -> BTreeSet<Identifier> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Identifier>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Var(id) => {
                out.insert(id.clone());
            }
            BoolExpr::Not(inner) => inner.collect_vars(out),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) | BoolExpr::Xor(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn mentions(&self, name: &Identifier) -> bool {
        match self {
            BoolExpr::Const(_) => false,
            BoolExpr::Var(id) => id == name,
            BoolExpr::Not(inner) => inner.mentions(name),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) | BoolExpr::Xor(l, r) => {
                l.mentions(name) || r.mentions(name)
            }
        }
    }

    /// Evaluates under a lookup function; `None` from the lookup is an
    /// unbound variable.
    pub fn eval_with<F>(&self, lookup: &F) -> Result<bool, ModelError>
    where
        F: Fn(&Identifier) -> Option<bool>,
    {
        Ok(match self {
            BoolExpr::Const(v) => *v,
            BoolExpr::Var(id) => {
                lookup(id).ok_or_else(|| ModelError::UnboundVariable(id.clone()))?
            }
            BoolExpr::Not(inner) => !inner.eval_with(lookup)?,
            BoolExpr::And(l, r) => l.eval_with(lookup)? && r.eval_with(lookup)?,
            BoolExpr::Or(l, r) => l.eval_with(lookup)? || r.eval_with(lookup)?,
            BoolExpr::Xor(l, r) => l.eval_with(lookup)? ^ r.eval_with(lookup)?,
        })
    }

    /// Replaces variables for which `subst` returns an expression.
    pub fn substitute<F>(&self, subst: &F) -> BoolExpr
    where
        F: Fn(&Identifier) -> Option<BoolExpr>,
    {
        match self {
            BoolExpr::Const(v) => BoolExpr::Const(*v),
            BoolExpr::Var(id) => subst(id).unwrap_or_else(|| self.clone()),
            BoolExpr::Not(inner) => BoolExpr::not(inner.substitute(subst)),
            BoolExpr::And(l, r) => BoolExpr::and(l.substitute(subst), r.substitute(subst)),
            BoolExpr::Or(l, r) => BoolExpr::or(l.substitute(subst), r.substitute(subst)),
            BoolExpr::Xor(l, r) => BoolExpr::xor(l.substitute(subst), r.substitute(subst)),
        }
    }

    /// Renames variables, leaving unmapped names untouched.
    pub fn rename<F>(&self, rename: &F) -> BoolExpr
    where
        F: Fn(&Identifier) -> Identifier,
    {
        self.substitute(&|id: &Identifier| Some(BoolExpr::Var(rename(id))))
    }

    /// Constant folding plus removal of double negation.
    pub fn simplify(&self) -> BoolExpr {
        match self {
            BoolExpr::Const(_) | BoolExpr::Var(_) => self.clone(),
            BoolExpr::Not(inner) => match inner.simplify() {
                BoolExpr::Const(v) => BoolExpr::Const(!v),
                BoolExpr::Not(x) => *x,
                other => BoolExpr::not(other),
            },
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) | BoolExpr::Xor(l, r) => {
                let op = self.as_binary().map(|(op, _, _)| op).expect("binary node");
                let (l, r) = (l.simplify(), r.simplify());
                match (op, &l, &r) {
                    (BinOp::And, BoolExpr::Const(false), _) | (BinOp::And, _, BoolExpr::Const(false)) => {
                        BoolExpr::Const(false)
                    }
                    (BinOp::Or, BoolExpr::Const(true), _) | (BinOp::Or, _, BoolExpr::Const(true)) => {
                        BoolExpr::Const(true)
                    }
                    (BinOp::And, BoolExpr::Const(true), _) | (BinOp::Or, BoolExpr::Const(false), _) => r,
                    (BinOp::And, _, BoolExpr::Const(true)) | (BinOp::Or, _, BoolExpr::Const(false)) => l,
                    (BinOp::Xor, BoolExpr::Const(a), BoolExpr::Const(b)) => BoolExpr::Const(a ^ b),
                    (BinOp::Xor, BoolExpr::Const(false), _) => r,
                    (BinOp::Xor, _, BoolExpr::Const(false)) => l,
                    (BinOp::Xor, BoolExpr::Const(true), _) => BoolExpr::not(r).simplify(),
                    (BinOp::Xor, _, BoolExpr::Const(true)) => BoolExpr::not(l).simplify(),
                    _ => BoolExpr::binary(op, l, r),
                }
            }
        }
    }
}

/// Evaluates `expr` under `env`.
pub fn eval_expr(expr: &BoolExpr, env: &Assignment) -> Result<bool, ModelError> {
    expr.eval_with(&|id: &Identifier| env.get(id))
}

impl fmt::Display for BoolExpr {
    /// Structured Text rendering with minimal parentheses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, 0, f)
    }
}

fn precedence(expr: &BoolExpr) -> u8 {
    match expr {
        BoolExpr::Or(..) => 1,
        BoolExpr::Xor(..) => 2,
        BoolExpr::And(..) => 3,
        BoolExpr::Not(_) => 4,
        BoolExpr::Const(_) | BoolExpr::Var(_) => 5,
    }
}

// Binary chains are left-associative, so a right operand of equal
// precedence keeps its parentheses.
fn write_expr(expr: &BoolExpr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = precedence(expr);
    let parens = prec < min_prec;
    if parens {
        f.write_str("(")?;
    }
    match expr {
        BoolExpr::Const(true) => f.write_str("TRUE")?,
        BoolExpr::Const(false) => f.write_str("FALSE")?,
        BoolExpr::Var(id) => write!(f, "{id}")?,
        BoolExpr::Not(inner) => {
            f.write_str("NOT ")?;
            write_expr(inner, 4, f)?;
        }
        _ => {
            let (op, l, r) = expr.as_binary().expect("binary node");
            write_expr(l, prec, f)?;
            write!(f, " {} ", op.keyword())?;
            write_expr(r, prec + 1, f)?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}
