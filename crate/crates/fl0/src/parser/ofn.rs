//! Line-oriented subset of the OWL 2 functional syntax.
//!
//! Each non-skipped line must hold one `SubClassOf(C D)` or
//! `EquivalentClasses(C D)` axiom built from `owl:Thing`,
//! `ObjectIntersectionOf`, `ObjectAllValuesFrom`, and plain names.
//! `Prefix(...)`/`Ontology(` header lines and a closing `)` line are ignored.
//! Everything else — `Declaration`, `ObjectSomeValuesFrom`, n-ary
//! equivalences, prefixed names — is reported as unsupported.

use crate::concept::ConceptExpr;
use crate::symbol::SymbolTable;

use super::{Axiom, ParseError};

pub fn parse_ofn(text: &str, table: &mut SymbolTable) -> Result<Vec<Axiom>, ParseError> {
    let mut axioms = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = (idx + 1) as u32;
        let line = raw.trim();
        if line.is_empty()
            || line.starts_with("Prefix(")
            || line.starts_with("Ontology(")
            || line == ")"
        {
            continue;
        }
        let mut p = LineParser::new(raw, line_no);
        axioms.push(p.axiom(table)?);
    }
    Ok(axioms)
}

#[derive(Debug, PartialEq, Eq)]
enum Token {
    LParen,
    RParen,
    Ident(String),
}

struct LineParser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
    peeked: Option<Option<(Token, u32)>>,
}

impl<'a> LineParser<'a> {
    fn new(line: &'a str, line_no: u32) -> Self {
        LineParser { chars: line.chars().peekable(), line: line_no, col: 1, peeked: None }
    }

    fn lex(&mut self) -> Result<Option<(Token, u32)>, ParseError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(&c) if c.is_whitespace() => {
                    self.chars.next();
                    self.col += 1;
                }
                Some('(') => {
                    let col = self.col;
                    self.chars.next();
                    self.col += 1;
                    return Ok(Some((Token::LParen, col)));
                }
                Some(')') => {
                    let col = self.col;
                    self.chars.next();
                    self.col += 1;
                    return Ok(Some((Token::RParen, col)));
                }
                Some(&c) if c.is_ascii_alphabetic() => {
                    let col = self.col;
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' || c == ':' {
                            s.push(c);
                            self.chars.next();
                            self.col += 1;
                        } else {
                            break;
                        }
                    }
                    return Ok(Some((Token::Ident(s), col)));
                }
                Some(&c) => {
                    return Err(ParseError::syntax(self.line, self.col, format!("token, found `{}`", c)))
                }
            }
        }
    }

    fn next(&mut self) -> Result<Option<(Token, u32)>, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    fn peek(&mut self) -> Result<Option<&(Token, u32)>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex()?);
        }
        Ok(self.peeked.as_ref().unwrap().as_ref())
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        match self.next()? {
            Some((t, _)) if t == want => Ok(()),
            Some((_, c)) => Err(ParseError::syntax(self.line, c, what)),
            None => Err(ParseError::syntax(self.line, self.col, what)),
        }
    }

    fn axiom(&mut self, table: &mut SymbolTable) -> Result<Axiom, ParseError> {
        let (head, col) = match self.next()? {
            Some((Token::Ident(s), c)) => (s, c),
            Some((_, c)) => return Err(ParseError::syntax(self.line, c, "axiom name")),
            None => return Err(ParseError::syntax(self.line, self.col, "axiom name")),
        };
        let equiv = match head.as_str() {
            "SubClassOf" => false,
            "EquivalentClasses" => true,
            other => return Err(ParseError::unsupported(self.line, col, other)),
        };
        self.expect(Token::LParen, "`(`")?;
        let lhs = self.concept(table)?;
        let rhs = self.concept(table)?;
        if equiv {
            if let Some((Token::Ident(_) | Token::LParen, c)) = self.peek()? {
                let c = *c;
                return Err(ParseError::unsupported(
                    self.line,
                    c,
                    "EquivalentClasses with more than two operands",
                ));
            }
        }
        self.expect(Token::RParen, "`)`")?;
        if self.next()?.is_some() {
            return Err(ParseError::syntax(self.line, self.col, "end of line"));
        }
        Ok(if equiv { Axiom::Equivalence(lhs, rhs) } else { Axiom::Subsumption(lhs, rhs) })
    }

    fn concept(&mut self, table: &mut SymbolTable) -> Result<ConceptExpr, ParseError> {
        let (ident, col) = match self.next()? {
            Some((Token::Ident(s), c)) => (s, c),
            Some((_, c)) => return Err(ParseError::syntax(self.line, c, "class expression")),
            None => return Err(ParseError::syntax(self.line, self.col, "class expression")),
        };
        match ident.as_str() {
            "owl:Thing" => Ok(ConceptExpr::Top),
            "ObjectIntersectionOf" => {
                self.expect(Token::LParen, "`(`")?;
                let mut parts = vec![self.concept(table)?, self.concept(table)?];
                loop {
                    match self.peek()? {
                        Some((Token::RParen, _)) => {
                            self.next()?;
                            break;
                        }
                        Some(_) => parts.push(self.concept(table)?),
                        None => return Err(ParseError::syntax(self.line, self.col, "`)`")),
                    }
                }
                Ok(ConceptExpr::And(parts))
            }
            "ObjectAllValuesFrom" => {
                self.expect(Token::LParen, "`(`")?;
                let (role, rcol) = match self.next()? {
                    Some((Token::Ident(s), c)) => (s, c),
                    Some((_, c)) => return Err(ParseError::syntax(self.line, c, "property name")),
                    None => return Err(ParseError::syntax(self.line, self.col, "property name")),
                };
                if role.contains(':') {
                    return Err(ParseError::unsupported(self.line, rcol, "prefixed name"));
                }
                if role.ends_with("_var") {
                    return Err(ParseError::unsupported(self.line, rcol, "variable role"));
                }
                let inner = self.concept(table)?;
                self.expect(Token::RParen, "`)`")?;
                Ok(ConceptExpr::All(table.intern_role(&role), Box::new(inner)))
            }
            name => {
                if let Some((Token::LParen, _)) = self.peek()? {
                    // Some other constructor application, e.g. ObjectSomeValuesFrom.
                    return Err(ParseError::unsupported(self.line, col, name));
                }
                if name.contains(':') {
                    return Err(ParseError::unsupported(self.line, col, "prefixed name"));
                }
                Ok(ConceptExpr::Name(table.intern_concept(name)))
            }
        }
    }
}
