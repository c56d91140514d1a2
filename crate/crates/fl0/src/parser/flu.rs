//! S-expression problem syntax.
//!
//! ```text
//! problem  := decl*
//! decl     := (roles NAME+) | (sub concept concept) | (equiv concept concept)
//! concept  := top | NAME | (and concept concept+) | (all NAME concept)
//! NAME     := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! `;` starts a comment running to end of line. Names ending in `_var` denote
//! variables; all other names are constants. Keywords are reserved.

use crate::concept::ConceptExpr;
use crate::symbol::SymbolTable;

use super::{Axiom, ParseError};

const KEYWORDS: [&str; 6] = ["top", "and", "all", "sub", "equiv", "roles"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    LParen,
    RParen,
    Atom(String),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Next token plus its starting position, or `None` at end of input.
    fn next_token(&mut self) -> Result<Option<(Token, u32, u32)>, ParseError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(&c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('(') => {
                    let (l, col) = (self.line, self.col);
                    self.bump();
                    return Ok(Some((Token::LParen, l, col)));
                }
                Some(')') => {
                    let (l, col) = (self.line, self.col);
                    self.bump();
                    return Ok(Some((Token::RParen, l, col)));
                }
                Some(&c) if c.is_ascii_alphabetic() => {
                    let (l, col) = (self.line, self.col);
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    return Ok(Some((Token::Atom(s), l, col)));
                }
                Some(&c) => {
                    return Err(ParseError::syntax(
                        self.line,
                        self.col,
                        format!("token, found `{}`", c),
                    ))
                }
            }
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<(Token, u32, u32)>>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { lexer: Lexer::new(text), peeked: None }
    }

    fn peek(&mut self) -> Result<Option<&(Token, u32, u32)>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().unwrap().as_ref())
    }

    fn next(&mut self) -> Result<Option<(Token, u32, u32)>, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next_token(),
        }
    }

    fn pos(&mut self) -> (u32, u32) {
        (self.lexer.line, self.lexer.col)
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(u32, u32), ParseError> {
        match self.next()? {
            Some((t, l, c)) if t == want => Ok((l, c)),
            Some((_, l, c)) => Err(ParseError::syntax(l, c, what)),
            None => {
                let (l, c) = self.pos();
                Err(ParseError::syntax(l, c, what))
            }
        }
    }

    fn name(&mut self, what: &str) -> Result<(String, u32, u32), ParseError> {
        match self.next()? {
            Some((Token::Atom(s), l, c)) => {
                if KEYWORDS.contains(&s.as_str()) {
                    Err(ParseError::syntax(l, c, format!("{}, found keyword `{}`", what, s)))
                } else {
                    Ok((s, l, c))
                }
            }
            Some((_, l, c)) => Err(ParseError::syntax(l, c, what)),
            None => {
                let (l, c) = self.pos();
                Err(ParseError::syntax(l, c, what))
            }
        }
    }

    fn concept(&mut self, table: &mut SymbolTable) -> Result<ConceptExpr, ParseError> {
        match self.next()? {
            Some((Token::Atom(s), l, c)) => {
                if s == "top" {
                    Ok(ConceptExpr::Top)
                } else if KEYWORDS.contains(&s.as_str()) {
                    Err(ParseError::syntax(l, c, format!("concept, found keyword `{}`", s)))
                } else {
                    Ok(ConceptExpr::Name(table.intern_concept(&s)))
                }
            }
            Some((Token::LParen, ..)) => match self.next()? {
                Some((Token::Atom(s), l, c)) => self.compound(&s, l, c, table),
                Some((_, l, c)) => Err(ParseError::syntax(l, c, "`and` or `all`")),
                None => {
                    let (l, c) = self.pos();
                    Err(ParseError::syntax(l, c, "`and` or `all`"))
                }
            },
            Some((Token::RParen, l, c)) => Err(ParseError::syntax(l, c, "concept")),
            None => {
                let (l, c) = self.pos();
                Err(ParseError::syntax(l, c, "concept"))
            }
        }
    }

    fn compound(
        &mut self,
        head: &str,
        l: u32,
        c: u32,
        table: &mut SymbolTable,
    ) -> Result<ConceptExpr, ParseError> {
        match head {
            "and" => {
                let mut parts = vec![self.concept(table)?, self.concept(table)?];
                loop {
                    match self.peek()? {
                        Some((Token::RParen, ..)) => {
                            self.next()?;
                            break;
                        }
                        Some(_) => parts.push(self.concept(table)?),
                        None => {
                            let (l, c) = self.pos();
                            return Err(ParseError::syntax(l, c, "`)`"));
                        }
                    }
                }
                Ok(ConceptExpr::And(parts))
            }
            "all" => {
                let (role, rl, rc) = self.name("role name")?;
                if role.ends_with("_var") {
                    return Err(ParseError::unsupported(rl, rc, "variable role"));
                }
                let inner = self.concept(table)?;
                self.expect(Token::RParen, "`)`")?;
                Ok(ConceptExpr::All(table.intern_role(&role), Box::new(inner)))
            }
            other => Err(ParseError::unsupported(l, c, other)),
        }
    }
}

pub fn parse_flu(text: &str, table: &mut SymbolTable) -> Result<Vec<Axiom>, ParseError> {
    let mut parser = Parser::new(text);
    let mut axioms = Vec::new();
    loop {
        match parser.next()? {
            None => break,
            Some((Token::LParen, ..)) => {
                let (head, hl, hc) = match parser.next()? {
                    Some((Token::Atom(s), l, c)) => (s, l, c),
                    Some((_, l, c)) => return Err(ParseError::syntax(l, c, "declaration head")),
                    None => {
                        let (l, c) = parser.pos();
                        return Err(ParseError::syntax(l, c, "declaration head"));
                    }
                };
                match head.as_str() {
                    "roles" => {
                        let (first, ..) = parser.name("role name")?;
                        table.intern_role(&first);
                        loop {
                            match parser.peek()? {
                                Some((Token::RParen, ..)) => {
                                    parser.next()?;
                                    break;
                                }
                                Some(_) => {
                                    let (name, ..) = parser.name("role name")?;
                                    table.intern_role(&name);
                                }
                                None => {
                                    let (l, c) = parser.pos();
                                    return Err(ParseError::syntax(l, c, "`)`"));
                                }
                            }
                        }
                    }
                    "sub" | "equiv" => {
                        let lhs = parser.concept(table)?;
                        let rhs = parser.concept(table)?;
                        parser.expect(Token::RParen, "`)`")?;
                        axioms.push(if head == "sub" {
                            Axiom::Subsumption(lhs, rhs)
                        } else {
                            Axiom::Equivalence(lhs, rhs)
                        });
                    }
                    other => return Err(ParseError::unsupported(hl, hc, other)),
                }
            }
            Some((_, l, c)) => return Err(ParseError::syntax(l, c, "`(`")),
        }
    }
    Ok(axioms)
}
