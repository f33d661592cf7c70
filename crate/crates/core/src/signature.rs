//! Monoidal theories: a finite set of colours together with typed operation
//! symbols `o : w -> v`, where `w` and `v` are words over the colours.
//!
//! Colours and operations are interned; everything downstream refers to them
//! by [`Colour`] and [`OpId`] indices and only the signature knows names.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Interned colour (an object generator of the coloured prop).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Colour(pub(crate) u32);

impl Colour {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interned operation symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpId(pub(crate) u32);

impl OpId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A word over the colours; the empty word is the monoidal unit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Colour>);

impl Word {
    pub fn new(colours: Vec<Colour>) -> Self {
        Word(colours)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn singleton(c: Colour) -> Self {
        Word(vec![c])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn colours(&self) -> &[Colour] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Colour> + '_ {
        self.0.iter().copied()
    }

    /// Concatenation; the product of objects in the prop.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// The word `w[perm[0]] w[perm[1]] ...`.
    pub fn permuted(&self, perm: &[usize]) -> Word {
        Word(perm.iter().map(|&i| self.0[i]).collect())
    }
}

impl FromIterator<Colour> for Word {
    fn from_iter<I: IntoIterator<Item = Colour>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl std::ops::Index<usize> for Word {
    type Output = Colour;

    fn index(&self, i: usize) -> &Colour {
        &self.0[i]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub arity: Word,
    pub coarity: Word,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate declaration of `{name}`")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: undeclared colour `{name}`")]
    UndeclaredColour { line: usize, name: String },
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("colour index {0} does not belong to this signature")]
    ForeignColour(usize),
}

/// A monoidal theory `(Σ, C)` without equations.
///
/// Immutable once built; share it by reference (or `Arc`) across threads.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    colours: Vec<String>,
    colour_index: HashMap<String, Colour>,
    ops: Vec<Operation>,
    op_index: HashMap<String, OpId>,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_colour(&mut self, name: &str) -> Result<Colour, SignatureError> {
        if !is_identifier(name) {
            return Err(SignatureError::InvalidIdentifier(name.to_string()));
        }
        if self.colour_index.contains_key(name) {
            return Err(SignatureError::Duplicate { line: 0, name: name.to_string() });
        }
        let c = Colour(self.colours.len() as u32);
        self.colours.push(name.to_string());
        self.colour_index.insert(name.to_string(), c);
        Ok(c)
    }

    pub fn add_operation(
        &mut self,
        name: &str,
        arity: Word,
        coarity: Word,
    ) -> Result<OpId, SignatureError> {
        if !is_identifier(name) {
            return Err(SignatureError::InvalidIdentifier(name.to_string()));
        }
        if self.op_index.contains_key(name) {
            return Err(SignatureError::Duplicate { line: 0, name: name.to_string() });
        }
        self.check_word(&arity)?;
        self.check_word(&coarity)?;
        let id = OpId(self.ops.len() as u32);
        self.ops.push(Operation { name: name.to_string(), arity, coarity });
        self.op_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn colour(&self, name: &str) -> Option<Colour> {
        self.colour_index.get(name).copied()
    }

    pub fn colour_name(&self, c: Colour) -> &str {
        &self.colours[c.index()]
    }

    pub fn op(&self, name: &str) -> Option<OpId> {
        self.op_index.get(name).copied()
    }

    pub fn operation(&self, op: OpId) -> &Operation {
        &self.ops[op.index()]
    }

    pub fn arity(&self, op: OpId) -> &Word {
        &self.ops[op.index()].arity
    }

    pub fn coarity(&self, op: OpId) -> &Word {
        &self.ops[op.index()].coarity
    }

    pub fn num_colours(&self) -> usize {
        self.colours.len()
    }

    pub fn num_operations(&self) -> usize {
        self.ops.len()
    }

    pub fn colours(&self) -> impl Iterator<Item = Colour> + '_ {
        (0..self.colours.len() as u32).map(Colour)
    }

    pub fn operations(&self) -> impl Iterator<Item = (OpId, &Operation)> + '_ {
        self.ops.iter().enumerate().map(|(i, o)| (OpId(i as u32), o))
    }

    /// Ensures every colour of `w` is declared here.
    pub fn check_word(&self, w: &Word) -> Result<(), SignatureError> {
        match w.iter().find(|c| c.index() >= self.colours.len()) {
            Some(c) => Err(SignatureError::ForeignColour(c.index())),
            None => Ok(()),
        }
    }

    /// Concatenation of two words, both of which must belong to this signature.
    pub fn word_concat(&self, w1: &Word, w2: &Word) -> Result<Word, SignatureError> {
        self.check_word(w1)?;
        self.check_word(w2)?;
        Ok(w1.concat(w2))
    }

    /// Builds a word from colour names.
    pub fn word<S: AsRef<str>>(&self, names: &[S]) -> Result<Word, SignatureError> {
        names
            .iter()
            .map(|n| {
                self.colour(n.as_ref()).ok_or_else(|| SignatureError::UndeclaredColour {
                    line: 0,
                    name: n.as_ref().to_string(),
                })
            })
            .collect()
    }

    /// Parses a space-separated word; empty input and `()` denote ε.
    pub fn parse_word(&self, text: &str) -> Result<Word, SignatureError> {
        let text = text.trim();
        if text == "()" || text == "ε" {
            return Ok(Word::empty());
        }
        let names: Vec<&str> = text.split_whitespace().collect();
        self.word(&names)
    }

    /// Word in the file syntax: space-separated names, empty for ε.
    pub fn print_word(&self, w: &Word) -> String {
        w.iter().map(|c| self.colour_name(c)).collect::<Vec<_>>().join(" ")
    }

    /// Human-oriented rendering: `ε` for the unit, names juxtaposed when all
    /// of them are single characters (`dd`), otherwise joined by `·`.
    pub fn display_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let names: Vec<&str> = w.iter().map(|c| self.colour_name(c)).collect();
        if names.iter().all(|n| n.chars().count() == 1) {
            names.concat()
        } else {
            names.join("·")
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses the signature file format:
///
/// ```text
/// colour c
/// colour d
/// op o1 : c -> c d
/// op o2 : d d -> c   # comment
/// ```
///
/// Colours may be declared after the operations that use them.
pub fn parse_signature(text: &str) -> Result<Signature, SignatureError> {
    let mut sig = Signature::new();
    let mut pending_ops: Vec<(usize, String, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match keyword {
            "colour" | "color" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(SignatureError::Syntax {
                        line: line_no,
                        message: "expected `colour <name>`".into(),
                    });
                }
                sig.add_colour(rest).map_err(|e| relocate(e, line_no))?;
            }
            "op" => {
                let (name, ty) = rest.split_once(':').ok_or_else(|| SignatureError::Syntax {
                    line: line_no,
                    message: "expected `op <name> : <word> -> <word>`".into(),
                })?;
                let (dom, cod) = ty.split_once("->").ok_or_else(|| SignatureError::Syntax {
                    line: line_no,
                    message: "missing `->` in operation type".into(),
                })?;
                let name = name.trim();
                if !is_identifier(name) {
                    return Err(SignatureError::Syntax {
                        line: line_no,
                        message: format!("invalid operation name `{name}`"),
                    });
                }
                pending_ops.push((line_no, name.to_string(), dom.to_string(), cod.to_string()));
            }
            other => {
                return Err(SignatureError::Syntax {
                    line: line_no,
                    message: format!("unknown declaration `{other}`"),
                })
            }
        }
    }

    for (line_no, name, dom, cod) in pending_ops {
        let dom = sig.parse_word(&dom).map_err(|e| relocate(e, line_no))?;
        let cod = sig.parse_word(&cod).map_err(|e| relocate(e, line_no))?;
        sig.add_operation(&name, dom, cod).map_err(|e| relocate(e, line_no))?;
    }
    Ok(sig)
}

fn relocate(e: SignatureError, line: usize) -> SignatureError {
    match e {
        SignatureError::Duplicate { name, .. } => SignatureError::Duplicate { line, name },
        SignatureError::UndeclaredColour { name, .. } => {
            SignatureError::UndeclaredColour { line, name }
        }
        SignatureError::InvalidIdentifier(name) => SignatureError::Syntax {
            line,
            message: format!("invalid identifier `{name}`"),
        },
        other => other,
    }
}

/// Prints a signature in the format accepted by [`parse_signature`].
pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::new();
    for c in sig.colours() {
        out.push_str(&format!("colour {}\n", sig.colour_name(c)));
    }
    for (_, op) in sig.operations() {
        out.push_str(&format!(
            "op {} : {} -> {}\n",
            op.name,
            sig.print_word(&op.arity),
            sig.print_word(&op.coarity)
        ));
    }
    out
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_signature(self))
    }
}
