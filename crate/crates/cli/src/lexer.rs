use num_bigint::BigInt;

use crate::diag::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(BigInt),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Equals,
    Star,
    Plus,
    /// `;` or a line break.
    End,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Int(v) => format!("integer `{v}`"),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Equals => "`=`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Plus => "`+`".into(),
            TokenKind::End => "end of statement".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Splits the input into tokens; `#` starts a comment running to the end of the line.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            let c = chars[k];
            let start = k;
            let span = |len: usize| Span::new(line_no, start + 1, len);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                k += 1;
                continue;
            }
            let single = match c {
                '[' => Some(TokenKind::LBracket),
                ']' => Some(TokenKind::RBracket),
                '(' => Some(TokenKind::LParen),
                ')' => Some(TokenKind::RParen),
                ',' => Some(TokenKind::Comma),
                '=' => Some(TokenKind::Equals),
                '*' => Some(TokenKind::Star),
                '+' => Some(TokenKind::Plus),
                ';' => Some(TokenKind::End),
                _ => None,
            };
            if let Some(kind) = single {
                out.push(Token { kind, span: span(1) });
                k += 1;
                continue;
            }
            let digits_at = |j: usize| chars.get(j).is_some_and(|d| d.is_ascii_digit());
            if c.is_ascii_digit() || (c == '-' && digits_at(k + 1)) {
                k += 1;
                while digits_at(k) {
                    k += 1;
                }
                let text: String = chars[start..k].iter().collect();
                if chars.get(k).is_some_and(|d| d.is_alphanumeric() || *d == '_') {
                    return Err(Diagnostic::error(source, span(k - start + 1), format!("malformed integer `{text}{}`", chars[k])));
                }
                let value: BigInt = text.parse().expect("digits with an optional sign");
                out.push(Token { kind: TokenKind::Int(value), span: span(k - start) });
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                k += 1;
                // Hyphens join words, as in `solve-expo`.
                while k < chars.len()
                    && (chars[k].is_alphanumeric()
                        || chars[k] == '_'
                        || (chars[k] == '-' && chars.get(k + 1).is_some_and(|d| d.is_alphabetic())))
                {
                    k += 1;
                }
                let text: String = chars[start..k].iter().collect();
                out.push(Token { kind: TokenKind::Ident(text), span: span(k - start) });
                continue;
            }
            return Err(Diagnostic::error(source, span(1), format!("unexpected character `{c}`")));
        }
        out.push(Token { kind: TokenKind::End, span: Span::new(line_no, chars.len() + 1, 1) });
    }
    let last = source.lines().count().max(1);
    let col = source.lines().last().map_or(0, |l| l.chars().count()) + 1;
    out.push(Token { kind: TokenKind::Eof, span: Span::new(last, col, 1) });
    Ok(out)
}
