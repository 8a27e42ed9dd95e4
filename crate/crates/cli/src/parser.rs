//! Recursive-descent parser. A syntax error skips to the end of its statement so
//! that later statements are still checked.

use crate::ast::{Decl, Document, Int, Ints, Name, Query, Term};
use crate::diag::{Diagnostic, Span};
use crate::lexer::{tokenize, Token, TokenKind};

type PResult<T> = Result<T, Diagnostic>;

struct Parser<'a> {
    source: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

pub fn parse(source: &str) -> Result<Document, Vec<Diagnostic>> {
    let tokens = tokenize(source).map_err(|d| vec![d])?;
    let mut p = Parser { source, tokens, pos: 0 };
    let mut doc = Document::default();
    let mut errors = Vec::new();
    loop {
        while p.peek() == &TokenKind::End {
            p.pos += 1;
        }
        if p.peek() == &TokenKind::Eof {
            break;
        }
        let start = p.span();
        match p.statement() {
            Ok(Statement::Decl(d)) => {
                if !doc.queries.is_empty() {
                    errors.push(p.error(start, "declarations must come before the queries"));
                } else {
                    doc.decls.push(d);
                }
            }
            Ok(Statement::Query(q)) => doc.queries.push(q),
            Err(d) => {
                errors.push(d);
                p.recover();
            }
        }
    }
    if errors.is_empty() && doc.queries.is_empty() {
        let end = p.tokens[p.tokens.len() - 1].span;
        errors.push(p.error(end, "the document needs at least one query (intersect, period, solve-expo or check)"));
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(errors)
    }
}

enum Statement {
    Decl(Decl),
    Query(Query),
}

impl Parser<'_> {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn last_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn error(&self, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.source, span, message)
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        self.error(self.span(), format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn recover(&mut self) {
        while !matches!(self.peek(), TokenKind::End | TokenKind::Eof) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.peek() == &kind {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&kind.describe()))
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), TokenKind::Ident(s) if s == word)
    }

    fn keyword(&mut self, word: &str) -> PResult<Span> {
        if self.at_keyword(word) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            TokenKind::Ident(text) => Ok(Name { text, span: self.bump().span }),
            _ => Err(self.unexpected("a name")),
        }
    }

    fn int(&mut self) -> PResult<Int> {
        match self.peek().clone() {
            TokenKind::Int(value) => Ok(Int { value, span: self.bump().span }),
            _ => Err(self.unexpected("an integer")),
        }
    }

    /// `open INT ("," INT)* close`, possibly empty.
    fn ints(&mut self, open: TokenKind, close: TokenKind) -> PResult<Ints> {
        let start = self.expect(open)?;
        let mut items = Vec::new();
        if !self.eat(&close) {
            loop {
                items.push(self.int()?);
                if self.eat(&close) {
                    break;
                }
                if !self.eat(&TokenKind::Comma) {
                    return Err(self.unexpected(&format!("`,` or {}", close.describe())));
                }
            }
        }
        Ok(Ints { items, span: start.to(self.last_span()) })
    }

    fn list(&mut self) -> PResult<Ints> {
        self.ints(TokenKind::LBracket, TokenKind::RBracket)
    }

    fn tuple(&mut self) -> PResult<Ints> {
        self.ints(TokenKind::LParen, TokenKind::RParen)
    }

    /// `TUPLE ("," TUPLE)*`, possibly empty.
    fn tuples(&mut self) -> PResult<Vec<Ints>> {
        let mut out = Vec::new();
        if self.peek() != &TokenKind::LParen {
            return Ok(out);
        }
        loop {
            out.push(self.tuple()?);
            if !self.eat(&TokenKind::Comma) {
                return Ok(out);
            }
        }
    }

    fn end(&mut self) -> PResult<()> {
        match self.peek() {
            TokenKind::End | TokenKind::Eof => {
                self.eat(&TokenKind::End);
                Ok(())
            }
            _ => Err(self.unexpected("end of statement")),
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        let head = match self.peek() {
            TokenKind::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("a declaration or query")),
        };
        let span = self.bump().span;
        let stmt = match head.as_str() {
            "group" => {
                let name = if self.at_keyword("rank") { None } else { Some(self.name()?) };
                self.keyword("rank")?;
                let rank = self.int()?;
                let torsion = if self.at_keyword("torsion") {
                    self.bump();
                    Some(self.list()?)
                } else {
                    None
                };
                Statement::Decl(Decl::Group { name, rank, torsion, span })
            }
            "sbase" => {
                let name = self.name()?;
                Statement::Decl(Decl::SBase { name, generators: self.list()? })
            }
            "seq" => {
                let name = self.name()?;
                self.keyword("rec")?;
                let rec = self.list()?;
                self.keyword("init")?;
                Statement::Decl(Decl::Seq { name, rec, init: self.list()? })
            }
            "point" => {
                let name = self.name()?;
                self.expect(TokenKind::Equals)?;
                Statement::Decl(Decl::Point { name, coords: self.tuple()? })
            }
            "groupless" => {
                let name = self.name()?;
                self.expect(TokenKind::Equals)?;
                let mut terms = Vec::new();
                loop {
                    let sequence = self.name()?;
                    self.expect(TokenKind::Star)?;
                    terms.push(Term { sequence, point: self.name()? });
                    if !self.eat(&TokenKind::Plus) {
                        break;
                    }
                }
                let offset = if self.at_keyword("offset") {
                    self.bump();
                    Some(self.name()?)
                } else {
                    None
                };
                Statement::Decl(Decl::Groupless { name, terms, offset })
            }
            "set" => {
                let name = self.name()?;
                self.expect(TokenKind::Equals)?;
                let base = self.name()?;
                let span = if self.eat(&TokenKind::Plus) {
                    self.keyword("span")?;
                    Some(self.tuples()?)
                } else {
                    None
                };
                Statement::Decl(Decl::Set { name, base, span })
            }
            "subgroup" => {
                let name = self.name()?;
                self.expect(TokenKind::Equals)?;
                self.keyword("span")?;
                Statement::Decl(Decl::Subgroup { name, generators: self.tuples()? })
            }
            "intersect" => {
                let set = self.name()?;
                Statement::Query(Query::Intersect { set, subgroup: self.name()? })
            }
            "period" => {
                let sequence = self.name()?;
                Statement::Query(Query::Period { sequence, modulus: self.int()? })
            }
            "solve-expo" => {
                self.expect(TokenKind::LBracket)?;
                let mut sequences = vec![self.name()?];
                while self.eat(&TokenKind::Comma) {
                    sequences.push(self.name()?);
                }
                self.expect(TokenKind::RBracket)?;
                self.expect(TokenKind::LBracket)?;
                let mut rows = vec![self.list()?];
                while self.eat(&TokenKind::Comma) {
                    rows.push(self.list()?);
                }
                self.expect(TokenKind::RBracket)?;
                Statement::Query(Query::SolveExpo { sequences, rows, span })
            }
            "check" => {
                let set = self.name()?;
                Statement::Query(Query::Check { set, point: self.tuple()? })
            }
            other => {
                return Err(self.error(
                    span,
                    format!("unknown statement `{other}`; expected group, sbase, seq, point, groupless, set, subgroup, intersect, period, solve-expo or check"),
                ))
            }
        };
        self.end()?;
        Ok(stmt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let doc = parse("group rank 1; seq a rec [2] init [2]; point P = (1); groupless U = a*P; set F = U; subgroup G = span (2); intersect F G").unwrap();
        assert_eq!(doc.decls.len(), 6);
        assert_eq!(doc.queries.len(), 1);
    }

    #[test]
    fn every_statement_form() {
        let src = "\
group A rank 2 torsion [2]
sbase S [2, 3]
seq a rec [3, -2] init [1, 3]
point P = (1, 0, 1)
point O = (0, 0, 0)
groupless U = a*P + a*O offset O
set F = U + span (1, 1, 0), (0, 2, 1)
subgroup G = span
intersect F G
period a -7
solve-expo [a, a] [[1, -1], [0, 1]]
check F (2, 0, 1)
";
        let doc = parse(src).unwrap();
        assert_eq!(doc.decls.len(), 8);
        assert_eq!(doc.queries.len(), 4);
        match &doc.decls[7] {
            Decl::Subgroup { generators, .. } => assert!(generators.is_empty()),
            d => panic!("{d:?}"),
        }
    }

    #[test]
    fn errors_recover_per_statement() {
        let errs = parse("seq a rec [1 init [1]\npoint = (1)\nintersect F G").unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!((errs[0].line, errs[0].column), (1, 14));
        assert_eq!((errs[1].line, errs[1].column), (2, 7));
    }

    #[test]
    fn queries_are_required() {
        let errs = parse("group rank 1\n").unwrap_err();
        assert!(errs[0].message.contains("at least one query"));
    }
}
