//! Concrete syntax for terms and rule files.
//!
//! ```text
//! term ::= term ';' term | term '+' term | '(' term ')' | atom
//! atom ::= OPNAME | 'id[' word ']' | 'sym[' word ',' word ']'
//!        | 'mult[' COLOUR ']' | 'unit[' COLOUR ']'
//!        | 'comult[' COLOUR ']' | 'counit[' COLOUR ']' | 'empty'
//! ```
//!
//! `+` binds tighter than `;`; both associate to the left.

use thiserror::Error;

use super::{id_word, sym_word, Diagram, DiagramKind, Rule, TypeError};
use crate::signature::{Colour, Signature, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<ParseError>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Semi,
    Plus,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = i + 1;
        match ch {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            ';' => out.push((col, Tok::Semi)),
            '+' => out.push((col, Tok::Plus)),
            '(' => out.push((col, Tok::LParen)),
            ')' => out.push((col, Tok::RParen)),
            '[' => out.push((col, Tok::LBrack)),
            ']' => out.push((col, Tok::RBrack)),
            ',' => out.push((col, Tok::Comma)),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((col, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end_column: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map(|(c, _)| *c).unwrap_or(self.end_column)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { column: self.column(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {tok:?}"))
        }
    }

    fn type_error(&self, e: TypeError) -> ParseError {
        match e {
            TypeError::Mismatch { left, right } => ParseError::Type(format!(
                "cannot compose {} with {}",
                self.sig.display_word(&left),
                self.sig.display_word(&right)
            )),
            other => ParseError::Type(other.to_string()),
        }
    }

    fn seq_expr(&mut self) -> Result<Diagram, ParseError> {
        let mut acc = self.par_expr()?;
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            let rhs = self.par_expr()?;
            acc = Diagram::seq(&acc, &rhs).map_err(|e| self.type_error(e))?;
        }
        Ok(acc)
    }

    fn par_expr(&mut self) -> Result<Diagram, ParseError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            let rhs = self.atom()?;
            acc = Diagram::par(&acc, &rhs);
        }
        Ok(acc)
    }

    fn colour(&mut self) -> Result<Colour, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.sig.colour(&name).ok_or(ParseError::UnknownSymbol(name))
            }
            _ => self.error("expected a colour"),
        }
    }

    fn word_until(&mut self, stop: &[Tok]) -> Result<Word, ParseError> {
        let mut colours = Vec::new();
        while let Some(t) = self.peek() {
            if stop.contains(t) {
                break;
            }
            colours.push(self.colour()?);
        }
        Ok(Word::new(colours))
    }

    fn atom(&mut self) -> Result<Diagram, ParseError> {
        let name = match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let d = self.seq_expr()?;
                self.expect(Tok::RParen)?;
                return Ok(d);
            }
            Some(Tok::Ident(name)) => name,
            _ => return self.error("expected a term"),
        };
        self.pos += 1;
        let bracketed = self.peek() == Some(&Tok::LBrack);
        if !bracketed {
            if name == "empty" {
                return Ok(Diagram::empty());
            }
            return match self.sig.op(&name) {
                Some(op) => Ok(Diagram::gen(self.sig, op)),
                None => Err(ParseError::UnknownSymbol(name)),
            };
        }
        self.pos += 1;
        let d = match name.as_str() {
            "id" => id_word(&self.word_until(&[Tok::RBrack])?),
            "sym" => {
                let w = self.word_until(&[Tok::Comma, Tok::RBrack])?;
                self.expect(Tok::Comma)?;
                let u = self.word_until(&[Tok::RBrack])?;
                sym_word(&w, &u)
            }
            "mult" => Diagram::mult(self.colour()?),
            "unit" => Diagram::unit(self.colour()?),
            "comult" => Diagram::comult(self.colour()?),
            "counit" => Diagram::counit(self.colour()?),
            other => return Err(ParseError::UnknownSymbol(format!("{other}[...]"))),
        };
        self.expect(Tok::RBrack)?;
        Ok(d)
    }
}

/// Parses and type-checks a term over `sig`.
pub fn parse_diagram(sig: &Signature, text: &str) -> Result<Diagram, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { sig, toks, pos: 0, end_column: text.chars().count() + 1 };
    if p.peek().is_none() {
        return p.error("empty term");
    }
    let d = p.seq_expr()?;
    if p.peek().is_some() {
        return p.error("trailing input");
    }
    Ok(d)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Seq,
    Par,
    Atom,
}

fn prec(d: &Diagram) -> Prec {
    match d.kind() {
        DiagramKind::Seq(..) => Prec::Seq,
        DiagramKind::Par(..) => Prec::Par,
        _ => Prec::Atom,
    }
}

fn write_at(sig: &Signature, d: &Diagram, min: Prec, out: &mut String) {
    if prec(d) < min {
        out.push('(');
        write_term(sig, d, out);
        out.push(')');
    } else {
        write_term(sig, d, out);
    }
}

fn write_term(sig: &Signature, d: &Diagram, out: &mut String) {
    let name = |c: &Colour| sig.colour_name(*c).to_string();
    match d.kind() {
        DiagramKind::Empty => out.push_str("empty"),
        DiagramKind::Gen(op) => out.push_str(&sig.operation(*op).name),
        DiagramKind::Id(c) => out.push_str(&format!("id[{}]", name(c))),
        DiagramKind::Sym(c, e) => out.push_str(&format!("sym[{}, {}]", name(c), name(e))),
        DiagramKind::Mult(c) => out.push_str(&format!("mult[{}]", name(c))),
        DiagramKind::Unit(c) => out.push_str(&format!("unit[{}]", name(c))),
        DiagramKind::Comult(c) => out.push_str(&format!("comult[{}]", name(c))),
        DiagramKind::Counit(c) => out.push_str(&format!("counit[{}]", name(c))),
        DiagramKind::Seq(a, b) => {
            write_at(sig, a, Prec::Seq, out);
            out.push_str(" ; ");
            write_at(sig, b, Prec::Par, out);
        }
        DiagramKind::Par(a, b) => {
            write_at(sig, a, Prec::Par, out);
            out.push_str(" + ");
            write_at(sig, b, Prec::Atom, out);
        }
    }
}

/// Prints a term so that [`parse_diagram`] gives back the same tree.
pub fn print_diagram(sig: &Signature, d: &Diagram) -> String {
    let mut out = String::new();
    write_term(sig, d, &mut out);
    out
}

/// Parses a rule file: one `rule <name> : <term> => <term>` per line, `#`
/// comments and blank lines allowed.
pub fn parse_rules(sig: &Signature, text: &str) -> Result<Vec<Rule>, ParseError> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let at = |e: ParseError| ParseError::AtLine { line: i + 1, source: Box::new(e) };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix("rule")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| {
                at(ParseError::Syntax { column: 1, message: "expected `rule`".into() })
            })?;
        let (name, body) = rest.split_once(':').ok_or_else(|| {
            at(ParseError::Syntax { column: 1, message: "expected `:` after rule name".into() })
        })?;
        let name = name.trim();
        if !crate::signature::is_identifier(name) {
            return Err(at(ParseError::Syntax {
                column: 1,
                message: format!("invalid rule name `{name}`"),
            }));
        }
        let (lhs, rhs) = body.split_once("=>").ok_or_else(|| {
            at(ParseError::Syntax { column: 1, message: "expected `=>`".into() })
        })?;
        let lhs = parse_diagram(sig, lhs).map_err(at)?;
        let rhs = parse_diagram(sig, rhs).map_err(at)?;
        let rule = Rule::new(name, lhs, rhs).map_err(|e| {
            at(ParseError::Type(match e {
                TypeError::RuleMismatch { lhs, rhs } => format!(
                    "rule sides differ: {} -> {} vs {} -> {}",
                    sig.display_word(&lhs.0),
                    sig.display_word(&lhs.1),
                    sig.display_word(&rhs.0),
                    sig.display_word(&rhs.1)
                ),
                other => other.to_string(),
            }))
        })?;
        rules.push(rule);
    }
    Ok(rules)
}
