use super::lexer::TokenKind;
use super::parser::{finish_block, parse_header, Cursor, Scope};
use super::{LangError, ParseError, SourceSpan};
use crate::model::{is_reserved, BinOp, Block, BoolExpr, Lang, Statement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mnemonic {
    Ld { negate: bool },
    Combine { op: BinOp, negate: bool },
    Not,
    St,
}

fn mnemonic(word: &str) -> Option<Mnemonic> {
    Some(match word.to_ascii_uppercase().as_str() {
        "LD" => Mnemonic::Ld { negate: false },
        "LDN" => Mnemonic::Ld { negate: true },
        "AND" => Mnemonic::Combine { op: BinOp::And, negate: false },
        "ANDN" => Mnemonic::Combine { op: BinOp::And, negate: true },
        "OR" => Mnemonic::Combine { op: BinOp::Or, negate: false },
        "ORN" => Mnemonic::Combine { op: BinOp::Or, negate: true },
        "XOR" => Mnemonic::Combine { op: BinOp::Xor, negate: false },
        "XORN" => Mnemonic::Combine { op: BinOp::Xor, negate: true },
        "NOT" => Mnemonic::Not,
        "ST" => Mnemonic::St,
        _ => return None,
    })
}

const MNEMONICS: &[&str] = &[
    "`LD`", "`LDN`", "`AND`", "`ANDN`", "`OR`", "`ORN`", "`XOR`", "`XORN`", "`NOT`", "`ST`", "`)`",
    "`END_FUNCTION_BLOCK`",
];

struct Deferred {
    op: BinOp,
    negate: bool,
    saved: BoolExpr,
    span: SourceSpan,
}

/// Accumulator machine that turns an instruction list into assignments.
struct Machine {
    acc: Option<BoolExpr>,
    stack: Vec<Deferred>,
    body: Vec<Statement>,
}

fn combine(op: BinOp, negate: bool, lhs: BoolExpr, rhs: BoolExpr) -> BoolExpr {
    let rhs = if negate { BoolExpr::not(rhs) } else { rhs };
    BoolExpr::binary(op, lhs, rhs)
}

fn operand(cur: &mut Cursor, scope: &Scope) -> Result<Option<(BoolExpr, SourceSpan)>, LangError> {
    let tok = cur.peek().clone();
    match &tok.kind {
        TokenKind::Word(w) if w.eq_ignore_ascii_case("TRUE") => {
            cur.next();
            Ok(Some((BoolExpr::Const(true), tok.span)))
        }
        TokenKind::Word(w) if w.eq_ignore_ascii_case("FALSE") => {
            cur.next();
            Ok(Some((BoolExpr::Const(false), tok.span)))
        }
        TokenKind::Word(w) if !is_reserved(w) => {
            let (id, span) = cur.identifier()?;
            scope.read(&id, span)?;
            Ok(Some((BoolExpr::Var(id), span)))
        }
        TokenKind::Newline | TokenKind::Eof => Ok(None),
        _ => Err(cur.error("unexpected token", &["operand", "end of line"]).into()),
    }
}

fn end_of_line(cur: &mut Cursor) -> Result<(), LangError> {
    match cur.peek().kind {
        TokenKind::Newline => {
            cur.next();
            Ok(())
        }
        TokenKind::Eof => Ok(()),
        _ => Err(cur.error("one instruction per line", &["end of line"]).into()),
    }
}

pub(crate) fn parse_il_block(text: &str) -> Result<Block, LangError> {
    let mut cur = Cursor::new(text)?;
    let (name, mut scope) = parse_header(&mut cur)?;
    cur.skip_newlines = false;
    let mut m = Machine { acc: None, stack: Vec::new(), body: Vec::new() };

    loop {
        let tok = cur.peek().clone();
        match &tok.kind {
            TokenKind::Newline => {
                cur.next();
                continue;
            }
            TokenKind::RParen => {
                cur.next();
                let Some(group) = m.stack.pop() else {
                    return Err(LangError::UnbalancedParen { span: tok.span });
                };
                let inner = m.acc.take().ok_or_else(|| LangError::AccumulatorUndefined {
                    span: tok.span,
                    instruction: ")".into(),
                })?;
                m.acc = Some(combine(group.op, group.negate, group.saved, inner));
                end_of_line(&mut cur)?;
                continue;
            }
            TokenKind::Word(w) if w.eq_ignore_ascii_case("END_FUNCTION_BLOCK") => {
                if let Some(open) = m.stack.last() {
                    return Err(LangError::UnbalancedParen { span: open.span });
                }
                cur.next();
                cur.skip_newlines = true;
                cur.expect(TokenKind::Eof)?;
                return finish_block(name, scope, m.body, Lang::Il, tok.span);
            }
            TokenKind::Eof => {
                if let Some(open) = m.stack.last() {
                    return Err(LangError::UnbalancedParen { span: open.span });
                }
                return Err(cur.error("unterminated block", &["`END_FUNCTION_BLOCK`"]).into());
            }
            _ => {}
        }

        let word = match &tok.kind {
            TokenKind::Word(w) => w.clone(),
            _ => return Err(cur.error("expected an instruction", MNEMONICS).into()),
        };
        let Some(instr) = mnemonic(&word) else {
            return Err(cur.error("unknown instruction", MNEMONICS).into());
        };
        cur.next();
        let undefined = || LangError::AccumulatorUndefined { span: tok.span, instruction: word.clone() };

        match instr {
            Mnemonic::Combine { op, negate } if cur.peek().kind == TokenKind::LParen => {
                cur.next();
                let saved = m.acc.take().ok_or_else(undefined)?;
                m.stack.push(Deferred { op, negate, saved, span: tok.span });
                m.acc = operand(&mut cur, &scope)?.map(|(e, _)| e);
            }
            Mnemonic::Combine { op, negate } => {
                let (rhs, _) = require_operand(&mut cur, &scope, &word)?;
                let lhs = m.acc.take().ok_or_else(undefined)?;
                m.acc = Some(combine(op, negate, lhs, rhs));
            }
            Mnemonic::Ld { negate } => {
                let (e, _) = require_operand(&mut cur, &scope, &word)?;
                m.acc = Some(if negate { BoolExpr::not(e) } else { e });
            }
            Mnemonic::Not => {
                let acc = m.acc.take().ok_or_else(undefined)?;
                m.acc = Some(BoolExpr::not(acc));
            }
            Mnemonic::St => {
                let (target, span) = match cur.peek().kind.clone() {
                    TokenKind::Word(w) if !is_reserved(&w) => cur.identifier()?,
                    _ => return Err(cur.error("`ST` needs a variable", &["identifier"]).into()),
                };
                if !m.stack.is_empty() {
                    return Err(ParseError::new(
                        tok.span,
                        "`ST` is not allowed inside a parenthesized group",
                        vec!["`)`".into()],
                    )
                    .into());
                }
                let value = m.acc.clone().ok_or_else(undefined)?;
                scope.write(&target, span)?;
                // The target now holds the accumulator value; later reads of
                // the accumulator must not see the overwritten variable.
                if value.mentions(&target) {
                    m.acc = Some(BoolExpr::Var(target.clone()));
                }
                m.body.push(Statement::new(target, value));
            }
        }
        end_of_line(&mut cur)?;
    }
}

fn require_operand(cur: &mut Cursor, scope: &Scope, word: &str) -> Result<(BoolExpr, SourceSpan), LangError> {
    match operand(cur, scope)? {
        Some(found) => Ok(found),
        None => Err(cur.error(&format!("`{word}` needs an operand"), &["identifier", "`TRUE`", "`FALSE`"]).into()),
    }
}
