use std::fmt::Write as _;

use crate::model::{Block, BoolExpr, Direction, Lang};

const INDENT: &str = "    ";

fn section_keyword(direction: Direction) -> &'static str {
    match direction {
        Direction::Input => "VAR_INPUT",
        Direction::Output => "VAR_OUTPUT",
        Direction::State => "VAR",
        Direction::Temp => "VAR_TEMP",
    }
}

/// Canonical text of `block` in `lang`.
///
/// Declarations keep their order (consecutive declarations of one
/// direction share a section), one statement or instruction per line.
pub fn emit(block: &Block, lang: Lang) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "FUNCTION_BLOCK {}", block.name());
    let decls = block.interface().decls();
    let mut i = 0;
    while i < decls.len() {
        let direction = decls[i].direction;
        let _ = writeln!(out, "{}", section_keyword(direction));
        while i < decls.len() && decls[i].direction == direction {
            let _ = writeln!(out, "{INDENT}{} : BOOL;", decls[i].name);
            i += 1;
        }
        out.push_str("END_VAR\n");
    }
    out.push_str("BEGIN\n");
    for stmt in block.body() {
        match lang {
            Lang::St => {
                let _ = writeln!(out, "{INDENT}{} := {};", stmt.target, stmt.rhs);
            }
            Lang::Il => {
                for line in emit_il_expr(&stmt.rhs) {
                    let _ = writeln!(out, "{INDENT}{line}");
                }
                let _ = writeln!(out, "{INDENT}ST {}", stmt.target);
            }
        }
    }
    out.push_str("END_FUNCTION_BLOCK\n");
    out
}

fn leaf_text(expr: &BoolExpr) -> Option<String> {
    match expr {
        BoolExpr::Const(true) => Some("TRUE".into()),
        BoolExpr::Const(false) => Some("FALSE".into()),
        BoolExpr::Var(id) => Some(id.to_string()),
        _ => None,
    }
}

/// Instructions leaving the value of `expr` in the accumulator.
///
/// Post-order traversal; a right operand that is not a variable or
/// constant goes into a deferred `OP(` ... `)` group.
pub fn emit_il_expr(expr: &BoolExpr) -> Vec<String> {
    let mut lines = Vec::new();
    compile(expr, &mut lines);
    lines
}

fn compile(expr: &BoolExpr, lines: &mut Vec<String>) {
    if let Some(leaf) = leaf_text(expr) {
        lines.push(format!("LD {leaf}"));
        return;
    }
    match expr {
        BoolExpr::Not(inner) => match leaf_text(inner) {
            Some(leaf) => lines.push(format!("LDN {leaf}")),
            None => {
                compile(inner, lines);
                lines.push("NOT".into());
            }
        },
        _ => {
            let (op, lhs, rhs) = expr.as_binary().expect("binary node");
            compile(lhs, lines);
            match leaf_text(rhs) {
                Some(leaf) => lines.push(format!("{} {leaf}", op.keyword())),
                None => {
                    lines.push(format!("{}(", op.keyword()));
                    compile(rhs, lines);
                    lines.push(")".into());
                }
            }
        }
    }
}
