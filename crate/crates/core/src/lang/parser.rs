use std::collections::HashSet;

use super::lexer::{tokenize, Token, TokenKind};
use super::{LangError, ParseError, SourceSpan};
use crate::model::{
    is_reserved, Block, BlockInterface, BoolExpr, Direction, Identifier, Lang, Statement, VarDecl,
    MAX_DEPTH,
};

pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    /// When set, newline tokens are invisible (ST and headers).
    pub skip_newlines: bool,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Cursor { tokens: tokenize(text)?, pos: 0, skip_newlines: true })
    }

    fn settle(&mut self) {
        if self.skip_newlines {
            while self.tokens[self.pos].kind == TokenKind::Newline {
                self.pos += 1;
            }
        }
    }

    pub(crate) fn peek(&mut self) -> &Token {
        self.settle();
        &self.tokens[self.pos]
    }

    pub(crate) fn next(&mut self) -> Token {
        self.settle();
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    pub(crate) fn error(&mut self, message: &str, expected: &[&str]) -> ParseError {
        let tok = self.peek().clone();
        ParseError::new(
            tok.span,
            format!("{message}, found {}", tok.kind.describe()),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub(crate) fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.next())
        } else {
            let want = kind.describe();
            Err(self.error("unexpected token", &[&want]))
        }
    }

    pub(crate) fn at_keyword(&mut self, keyword: &str) -> bool {
        self.peek().is_keyword(keyword)
    }

    pub(crate) fn expect_keyword(&mut self, keyword: &str) -> Result<Token, ParseError> {
        if self.at_keyword(keyword) {
            Ok(self.next())
        } else {
            Err(self.error("unexpected token", &[&format!("`{keyword}`")]))
        }
    }

    pub(crate) fn identifier(&mut self) -> Result<(Identifier, SourceSpan), ParseError> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Word(w) if !is_reserved(w) => match Identifier::new(w) {
                Ok(id) => {
                    self.next();
                    Ok((id, tok.span))
                }
                Err(e) => Err(ParseError::new(tok.span, e.to_string(), vec!["identifier".into()])),
            },
            _ => Err(self.error("unexpected token", &["identifier"])),
        }
    }
}

/// Interface plus the bookkeeping the body parsers need for type checks.
pub(crate) struct Scope {
    pub interface: BlockInterface,
    pub assigned_temps: HashSet<Identifier>,
}

impl Scope {
    pub(crate) fn new(interface: BlockInterface) -> Self {
        Scope { interface, assigned_temps: HashSet::new() }
    }

    pub(crate) fn read(&self, id: &Identifier, span: SourceSpan) -> Result<(), LangError> {
        match self.interface.direction_of(id) {
            None => Err(LangError::Type { span, message: format!("undeclared variable `{id}`") }),
            Some(Direction::Temp) if !self.assigned_temps.contains(id) => Err(LangError::Type {
                span,
                message: format!("temp variable `{id}` read before assignment"),
            }),
            Some(_) => Ok(()),
        }
    }

    pub(crate) fn write(&mut self, id: &Identifier, span: SourceSpan) -> Result<(), LangError> {
        match self.interface.direction_of(id) {
            None => Err(LangError::Type { span, message: format!("undeclared variable `{id}`") }),
            Some(Direction::Input) => Err(LangError::Type {
                span,
                message: format!("cannot assign to input `{id}`"),
            }),
            Some(Direction::Temp) => {
                self.assigned_temps.insert(id.clone());
                Ok(())
            }
            Some(_) => Ok(()),
        }
    }
}

const SECTION_KEYWORDS: [(&str, Direction); 4] = [
    ("VAR_INPUT", Direction::Input),
    ("VAR_OUTPUT", Direction::Output),
    ("VAR_TEMP", Direction::Temp),
    ("VAR", Direction::State),
];

/// `FUNCTION_BLOCK name section* BEGIN`
pub(crate) fn parse_header(cur: &mut Cursor) -> Result<(Identifier, Scope), LangError> {
    cur.expect_keyword("FUNCTION_BLOCK")?;
    let (name, _) = cur.identifier()?;
    let mut decls: Vec<VarDecl> = Vec::new();
    loop {
        if cur.at_keyword("BEGIN") {
            cur.next();
            break;
        }
        let direction = SECTION_KEYWORDS
            .iter()
            .find(|(kw, _)| cur.at_keyword(kw))
            .map(|(_, d)| *d);
        let Some(direction) = direction else {
            return Err(cur
                .error(
                    "unexpected token in declarations",
                    &["`VAR_INPUT`", "`VAR_OUTPUT`", "`VAR`", "`VAR_TEMP`", "`BEGIN`"],
                )
                .into());
        };
        cur.next();
        while !cur.at_keyword("END_VAR") {
            let (var, span) = cur.identifier().map_err(|mut e| {
                e.expected.push("`END_VAR`".into());
                e
            })?;
            cur.expect(TokenKind::Colon)?;
            cur.expect_keyword("BOOL")?;
            cur.expect(TokenKind::Semicolon)?;
            if decls.iter().any(|d| d.name == var) {
                return Err(LangError::Type { span, message: format!("variable `{var}` declared twice") });
            }
            decls.push(VarDecl::new(var, direction));
        }
        cur.next();
    }
    let interface = BlockInterface::new(decls).expect("duplicates rejected above");
    Ok((name, Scope::new(interface)))
}

pub(crate) fn finish_block(
    name: Identifier,
    scope: Scope,
    body: Vec<Statement>,
    lang: Lang,
    span: SourceSpan,
) -> Result<Block, LangError> {
    Block::new(name, scope.interface, body, lang)
        .map_err(|e| LangError::Type { span, message: e.to_string() })
}

pub(crate) fn parse_st_block(text: &str) -> Result<Block, LangError> {
    let mut cur = Cursor::new(text)?;
    let (name, mut scope) = parse_header(&mut cur)?;
    let mut body = Vec::new();
    while !cur.at_keyword("END_FUNCTION_BLOCK") {
        let (target, span) = cur.identifier().map_err(|mut e| {
            e.expected.push("`END_FUNCTION_BLOCK`".into());
            e
        })?;
        cur.expect(TokenKind::Assign)?;
        let rhs = parse_expr(&mut cur, &scope, 0)?;
        cur.expect(TokenKind::Semicolon)?;
        scope.write(&target, span)?;
        body.push(Statement::new(target, rhs));
    }
    let end = cur.next();
    cur.expect(TokenKind::Eof)?;
    finish_block(name, scope, body, Lang::St, end.span)
}

pub(crate) fn parse_standalone_expr(text: &str, interface: &BlockInterface) -> Result<BoolExpr, LangError> {
    let mut cur = Cursor::new(text)?;
    let mut scope = Scope::new(interface.clone());
    // Standalone expressions see every temp as written.
    scope.assigned_temps = interface.temps().into_iter().collect();
    let expr = parse_expr(&mut cur, &scope, 0)?;
    cur.expect(TokenKind::Eof)?;
    Ok(expr)
}

const BINARY_LEVELS: [(&str, fn(BoolExpr, BoolExpr) -> BoolExpr); 3] =
    [("OR", BoolExpr::or), ("XOR", BoolExpr::xor), ("AND", BoolExpr::and)];

/// expr := xorterm (OR xorterm)*; xorterm := andterm (XOR andterm)*;
/// andterm := unary (AND unary)*
fn parse_expr(cur: &mut Cursor, scope: &Scope, depth: usize) -> Result<BoolExpr, LangError> {
    parse_level(cur, scope, 0, depth)
}

fn parse_level(cur: &mut Cursor, scope: &Scope, level: usize, depth: usize) -> Result<BoolExpr, LangError> {
    if level == BINARY_LEVELS.len() {
        return parse_unary(cur, scope, depth);
    }
    let (keyword, build) = BINARY_LEVELS[level];
    let mut lhs = parse_level(cur, scope, level + 1, depth)?;
    while cur.at_keyword(keyword) {
        cur.next();
        let rhs = parse_level(cur, scope, level + 1, depth)?;
        lhs = build(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut Cursor, scope: &Scope, depth: usize) -> Result<BoolExpr, LangError> {
    if depth > MAX_DEPTH {
        let span = cur.peek().span;
        return Err(ParseError::new(span, format!("expression nesting exceeds {MAX_DEPTH}"), vec![]).into());
    }
    let tok = cur.peek().clone();
    match &tok.kind {
        TokenKind::Word(w) if w.eq_ignore_ascii_case("NOT") => {
            cur.next();
            Ok(BoolExpr::not(parse_unary(cur, scope, depth + 1)?))
        }
        TokenKind::Word(w) if w.eq_ignore_ascii_case("TRUE") => {
            cur.next();
            Ok(BoolExpr::Const(true))
        }
        TokenKind::Word(w) if w.eq_ignore_ascii_case("FALSE") => {
            cur.next();
            Ok(BoolExpr::Const(false))
        }
        TokenKind::LParen => {
            cur.next();
            let inner = parse_expr(cur, scope, depth + 1)?;
            cur.expect(TokenKind::RParen)?;
            Ok(inner)
        }
        TokenKind::Word(w) if !is_reserved(w) => {
            let (id, span) = cur.identifier()?;
            scope.read(&id, span)?;
            Ok(BoolExpr::Var(id))
        }
        _ => Err(cur
            .error("expected an operand", &["identifier", "`NOT`", "`(`", "`TRUE`", "`FALSE`"])
            .into()),
    }
}
