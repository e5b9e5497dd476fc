//! Text format for ontologies.
//!
//! ```text
//! # comment
//! SubClassOf(A Some(r B))
//! ClassAssertion(And(A Not(B)) x)
//! PropertyAssertion(r x y)
//! ```
//!
//! Whitespace is insignificant apart from separating arguments. `And` and
//! `Or` take one or more arguments and are folded left-associatively.

use log::warn;

use crate::concept::Concept;
use crate::error::ParseError;
use crate::ontology::{Axiom, Ontology};

/// Prefix reserved for reasoner-internal individuals.
pub const RESERVED_PREFIX: &str = "__fresh_";

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Open,
    Close,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else if c == '(' || c == ')' {
            chars.next();
            column += 1;
            out.push(Token { tok: if c == '(' { Tok::Open } else { Tok::Close }, line: l, column: col });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(ident), line: l, column: col });
        } else {
            return Err(ParseError { line: l, column: col, message: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let tokens = lex(text)?;
        let line = text.lines().count().max(1);
        let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser { tokens, pos: 0, end: (line, column) })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.tokens.get(self.pos).map_or(self.end, |t| (t.line, t.column));
        ParseError { line, column, message: message.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek2_is_open(&self) -> bool {
        matches!(self.tokens.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Open))
    }

    fn expect_open(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Open) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here("expected '('")),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Close) => {
                self.pos += 1;
                Ok(())
            }
            None => Err(self.error_here("unbalanced parentheses: expected ')' before end of input")),
            _ => Err(self.error_here("expected ')'")),
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !self.peek2_is_open() => {
                if s.starts_with(RESERVED_PREFIX) {
                    return Err(self.error_here(format!("names starting with {RESERVED_PREFIX} are reserved")));
                }
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(Tok::Ident(_)) => Err(self.error_here(format!("expected {what} name, found a construct"))),
            None => Err(self.error_here(format!("expected {what} name before end of input"))),
            _ => Err(self.error_here(format!("expected {what} name"))),
        }
    }

    fn concept(&mut self) -> Result<Concept, ParseError> {
        let ident = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            None => return Err(self.error_here("expected concept before end of input")),
            _ => return Err(self.error_here("expected concept")),
        };
        if !self.peek2_is_open() {
            return match ident.as_str() {
                "Top" => {
                    self.pos += 1;
                    Ok(Concept::Top)
                }
                "Bottom" => {
                    self.pos += 1;
                    Ok(Concept::Bottom)
                }
                _ => Ok(Concept::Atomic(self.name("concept")?)),
            };
        }
        let start = self.pos;
        self.pos += 1;
        self.expect_open()?;
        let c = match ident.as_str() {
            "Not" => Concept::not(self.concept()?),
            "And" | "Or" => {
                let mut args = vec![self.concept()?];
                while !matches!(self.peek(), Some(Tok::Close) | None) {
                    args.push(self.concept()?);
                }
                let mut iter = args.into_iter();
                let first = iter.next().expect("at least one argument");
                if ident == "And" {
                    iter.fold(first, Concept::and)
                } else {
                    iter.fold(first, Concept::or)
                }
            }
            "All" | "Some" => {
                let role = self.name("role")?;
                let filler = self.concept()?;
                if ident == "All" {
                    Concept::all(role, filler)
                } else {
                    Concept::some(role, filler)
                }
            }
            other => {
                self.pos = start;
                return Err(self.error_here(format!("unknown concept constructor {other}")));
            }
        };
        self.expect_close()?;
        Ok(c)
    }

    fn statement(&mut self) -> Result<Axiom, ParseError> {
        let ident = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(self.error_here("expected statement")),
        };
        let start = self.pos;
        self.pos += 1;
        if !matches!(ident.as_str(), "SubClassOf" | "ClassAssertion" | "PropertyAssertion") {
            self.pos = start;
            return Err(self.error_here(format!("unknown statement {ident}")));
        }
        self.expect_open()?;
        let ax = match ident.as_str() {
            "SubClassOf" => {
                let lhs = self.concept()?;
                let rhs = self.concept()?;
                Axiom::Subsumption { lhs, rhs }
            }
            "ClassAssertion" => {
                let concept = self.concept()?;
                let individual = self.name("individual")?;
                Axiom::ClassAssertion { concept, individual }
            }
            _ => {
                let role = self.name("role")?;
                let subject = self.name("individual")?;
                let object = self.name("individual")?;
                Axiom::RoleAssertion { role, subject, object }
            }
        };
        self.expect_close()?;
        Ok(ax)
    }
}

/// Parses an ontology, returning it together with one warning per dropped
/// duplicate axiom.
pub fn parse_ontology_with_warnings(text: &str) -> Result<(Ontology, Vec<String>), ParseError> {
    let mut p = Parser::new(text)?;
    let mut axioms: Vec<Axiom> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut warnings = Vec::new();
    while !p.at_end() {
        let (line, column) = {
            let t = &p.tokens[p.pos];
            (t.line, t.column)
        };
        let ax = p.statement()?;
        if seen.insert(ax.clone()) {
            axioms.push(ax);
        } else {
            warnings.push(format!("{line}:{column}: duplicate axiom {ax} dropped"));
        }
    }
    Ok((Ontology::from_axioms(axioms), warnings))
}

pub fn parse_ontology(text: &str) -> Result<Ontology, ParseError> {
    let (o, warnings) = parse_ontology_with_warnings(text)?;
    for w in warnings {
        warn!("{w}");
    }
    Ok(o)
}

/// Parses a single concept expression.
pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let mut p = Parser::new(text)?;
    let c = p.concept()?;
    if !p.at_end() {
        return Err(p.error_here("trailing input after concept"));
    }
    Ok(c)
}

/// Parses a single axiom statement.
pub fn parse_axiom(text: &str) -> Result<Axiom, ParseError> {
    let mut p = Parser::new(text)?;
    let ax = p.statement()?;
    if !p.at_end() {
        return Err(p.error_here("trailing input after statement"));
    }
    Ok(ax)
}

/// Canonical serialization: one statement per line, in ontology order.
pub fn serialize_ontology(o: &Ontology) -> String {
    let mut out = String::new();
    for ax in o {
        out.push_str(&ax.to_string());
        out.push('\n');
    }
    out
}
