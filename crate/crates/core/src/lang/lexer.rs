use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    /// Identifier or keyword; keywords are recognized by the parsers.
    Word(String),
    Assign,
    Colon,
    Semicolon,
    LParen,
    RParen,
    Newline,
    Eof,
}

impl TokenKind {
    pub(crate) fn describe(&self) -> String {
        match self {
            TokenKind::Word(w) => format!("`{w}`"),
            TokenKind::Assign => "`:=`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Semicolon => "`;`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Newline => "end of line".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

impl Token {
    pub(crate) fn is_keyword(&self, keyword: &str) -> bool {
        matches!(&self.kind, TokenKind::Word(w) if w.eq_ignore_ascii_case(keyword))
    }
}

/// Splits source text into tokens. `//` line comments and `(* *)` block
/// comments are skipped; newlines are kept as tokens for the IL parser.
pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut last_span = SourceSpan::new(1, 1, 0);

    while i < chars.len() {
        let c = chars[i];
        let start = SourceSpan::new(line, col, 1);
        match c {
            '\n' => {
                tokens.push(Token { kind: TokenKind::Newline, span: start });
                i += 1;
                line += 1;
                col = 1;
                last_span = start;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            '(' if chars.get(i + 1) == Some(&'*') => {
                i += 2;
                col += 2;
                loop {
                    if i >= chars.len() {
                        return Err(ParseError::new(start, "unterminated comment", vec!["`*)`".into()]));
                    }
                    if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                        i += 2;
                        col += 2;
                        break;
                    }
                    if chars[i] == '\n' {
                        line += 1;
                        col = 1;
                    } else {
                        col += 1;
                    }
                    i += 1;
                }
                continue;
            }
            _ => {}
        }

        let (kind, len) = match c {
            ':' if chars.get(i + 1) == Some(&'=') => (TokenKind::Assign, 2),
            ':' => (TokenKind::Colon, 1),
            ';' => (TokenKind::Semicolon, 1),
            '(' => (TokenKind::LParen, 1),
            ')' => (TokenKind::RParen, 1),
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (TokenKind::Word(chars[i..j].iter().collect()), j - i)
            }
            other => {
                return Err(ParseError::new(start, format!("unexpected character `{other}`"), vec![]));
            }
        };
        let span = SourceSpan::new(line, col, len);
        tokens.push(Token { kind, span });
        last_span = span;
        i += len;
        col += len;
    }
    // EOF points at the last character so spans stay inside the text.
    let eof_span = SourceSpan::new(last_span.line, last_span.column + last_span.length.saturating_sub(1), 0);
    tokens.push(Token { kind: TokenKind::Eof, span: eof_span });
    Ok(tokens)
}
