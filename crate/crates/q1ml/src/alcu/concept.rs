//! `S5_ALCu` concepts and ontologies: AST, parser, printers, normalization,
//! closures, and the embedding between role-free concepts and one-variable
//! formulas.
//!
//! The concrete syntax is
//! `C ::= 'Top' | name | '~' C | C '&' C | C '|' C | 'some' role '.' C |
//! 'all' role '.' C | '<>' C | '[]' C`, with the universal role spelled `U`
//! (`some U . C` quantifies over the whole domain of the current world) and
//! restriction bodies binding like the other prefixes. `⊥` has no token of
//! its own; it is written `~Top`.

use crate::formula::{Formula, ParseError, Signature};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// The universal role name; reserved, never a plain role.
pub const UNIVERSAL_ROLE: &str = "U";

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Name(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    /// `some R . C` for an ordinary role.
    SomeRole(String, Box<Concept>),
    /// `all R . C`.
    AllRole(String, Box<Concept>),
    /// `some U . C` — somewhere in the domain of the current world.
    SomeU(Box<Concept>),
    /// `all U . C`.
    AllU(Box<Concept>),
    /// `<>C` — at some world (the world relation is total).
    Diamond(Box<Concept>),
    /// `[]C`.
    Box(Box<Concept>),
}

pub fn cname(name: &str) -> Concept {
    Concept::Name(name.to_string())
}

/// `⊥` as the concept `~Top`.
pub fn bottom() -> Concept {
    Concept::Top.not()
}

impl Concept {
    pub fn not(self) -> Concept {
        Concept::Not(Box::new(self))
    }
    pub fn and(self, other: Concept) -> Concept {
        Concept::And(Box::new(self), Box::new(other))
    }
    pub fn or(self, other: Concept) -> Concept {
        Concept::Or(Box::new(self), Box::new(other))
    }
    pub fn some(self, role: &str) -> Concept {
        assert_ne!(role, UNIVERSAL_ROLE, "the universal role has its own constructor");
        Concept::SomeRole(role.to_string(), Box::new(self))
    }
    pub fn all(self, role: &str) -> Concept {
        assert_ne!(role, UNIVERSAL_ROLE, "the universal role has its own constructor");
        Concept::AllRole(role.to_string(), Box::new(self))
    }
    pub fn some_u(self) -> Concept {
        Concept::SomeU(Box::new(self))
    }
    pub fn all_u(self) -> Concept {
        Concept::AllU(Box::new(self))
    }
    pub fn dia(self) -> Concept {
        Concept::Diamond(Box::new(self))
    }
    pub fn bx(self) -> Concept {
        Concept::Box(Box::new(self))
    }

    fn walk(&self, visit: &mut impl FnMut(&Concept)) {
        visit(self);
        match self {
            Concept::Top | Concept::Name(_) => {}
            Concept::Not(c)
            | Concept::SomeRole(_, c)
            | Concept::AllRole(_, c)
            | Concept::SomeU(c)
            | Concept::AllU(c)
            | Concept::Diamond(c)
            | Concept::Box(c) => c.walk(visit),
            Concept::And(a, b) | Concept::Or(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    /// Concept and role names (`U` is a logical symbol, never part of the
    /// signature).
    pub fn signature(&self) -> Signature {
        let mut sig = BTreeSet::new();
        self.walk(&mut |c| match c {
            Concept::Name(a) => {
                sig.insert(a.clone());
            }
            Concept::SomeRole(r, _) | Concept::AllRole(r, _) => {
                sig.insert(r.clone());
            }
            _ => {}
        });
        sig
    }

    pub fn concept_names(&self) -> Signature {
        let mut sig = BTreeSet::new();
        self.walk(&mut |c| {
            if let Concept::Name(a) = c {
                sig.insert(a.clone());
            }
        });
        sig
    }

    pub fn role_names(&self) -> Signature {
        let mut sig = BTreeSet::new();
        self.walk(&mut |c| {
            if let Concept::SomeRole(r, _) | Concept::AllRole(r, _) = c {
                sig.insert(r.clone());
            }
        });
        sig
    }

    pub fn is_role_free(&self) -> bool {
        self.role_names().is_empty()
    }

    /// Rewrite into the core fragment `Top / A / ~ / & / some R / some U / <>`.
    /// Idempotent, like formula normalization.
    pub fn normalize(&self) -> Concept {
        match self {
            Concept::Top => Concept::Top,
            Concept::Name(a) => Concept::Name(a.clone()),
            Concept::Not(c) => c.normalize().not(),
            Concept::And(a, b) => a.normalize().and(b.normalize()),
            Concept::Or(a, b) => (a.normalize().not().and(b.normalize().not())).not(),
            Concept::SomeRole(r, c) => Concept::SomeRole(r.clone(), Box::new(c.normalize())),
            Concept::AllRole(r, c) => {
                Concept::SomeRole(r.clone(), Box::new(c.normalize().not())).not()
            }
            Concept::SomeU(c) => c.normalize().some_u(),
            Concept::AllU(c) => c.normalize().not().some_u().not(),
            Concept::Diamond(c) => c.normalize().dia(),
            Concept::Box(c) => c.normalize().not().dia().not(),
        }
    }

    pub fn is_normalized(&self) -> bool {
        match self {
            Concept::Top | Concept::Name(_) => true,
            Concept::Not(c) | Concept::SomeRole(_, c) | Concept::SomeU(c) | Concept::Diamond(c) => {
                c.is_normalized()
            }
            Concept::And(a, b) => a.is_normalized() && b.is_normalized(),
            _ => false,
        }
    }

    /// Canonical fully parenthesized rendering; `parse_concept` inverts it.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        self.fmt_canonical(&mut s);
        s
    }

    fn fmt_canonical(&self, out: &mut String) {
        match self {
            Concept::Top => out.push_str("Top"),
            Concept::Name(a) => out.push_str(a),
            Concept::Not(c) => {
                out.push('~');
                c.fmt_canonical(out);
            }
            Concept::SomeRole(r, c) => {
                out.push_str("some ");
                out.push_str(r);
                out.push('.');
                c.fmt_canonical(out);
            }
            Concept::AllRole(r, c) => {
                out.push_str("all ");
                out.push_str(r);
                out.push('.');
                c.fmt_canonical(out);
            }
            Concept::SomeU(c) => {
                out.push_str("some U.");
                c.fmt_canonical(out);
            }
            Concept::AllU(c) => {
                out.push_str("all U.");
                c.fmt_canonical(out);
            }
            Concept::Diamond(c) => {
                out.push_str("<>");
                c.fmt_canonical(out);
            }
            Concept::Box(c) => {
                out.push_str("[]");
                c.fmt_canonical(out);
            }
            Concept::And(a, b) => Self::fmt_bin(out, a, " & ", b),
            Concept::Or(a, b) => Self::fmt_bin(out, a, " | ", b),
        }
    }

    fn fmt_bin(out: &mut String, a: &Concept, op: &str, b: &Concept) {
        out.push('(');
        a.fmt_canonical(out);
        out.push_str(op);
        b.fmt_canonical(out);
        out.push(')');
    }

    /// Minimal-parenthesis rendering.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        self.fmt_pretty(&mut s, 0);
        s
    }

    fn prec(&self) -> u8 {
        match self {
            Concept::Or(..) => 1,
            Concept::And(..) => 2,
            Concept::Not(_)
            | Concept::SomeRole(..)
            | Concept::AllRole(..)
            | Concept::SomeU(_)
            | Concept::AllU(_)
            | Concept::Diamond(_)
            | Concept::Box(_) => 3,
            Concept::Top | Concept::Name(_) => 4,
        }
    }

    fn fmt_pretty(&self, out: &mut String, min: u8) {
        let me = self.prec();
        let paren = me < min;
        if paren {
            out.push('(');
        }
        match self {
            Concept::Top => out.push_str("Top"),
            Concept::Name(a) => out.push_str(a),
            Concept::Not(c) => {
                out.push('~');
                c.fmt_pretty(out, 3);
            }
            Concept::SomeRole(r, c) => {
                out.push_str("some ");
                out.push_str(r);
                out.push('.');
                c.fmt_pretty(out, 3);
            }
            Concept::AllRole(r, c) => {
                out.push_str("all ");
                out.push_str(r);
                out.push('.');
                c.fmt_pretty(out, 3);
            }
            Concept::SomeU(c) => {
                out.push_str("some U.");
                c.fmt_pretty(out, 3);
            }
            Concept::AllU(c) => {
                out.push_str("all U.");
                c.fmt_pretty(out, 3);
            }
            Concept::Diamond(c) => {
                out.push_str("<>");
                c.fmt_pretty(out, 3);
            }
            Concept::Box(c) => {
                out.push_str("[]");
                c.fmt_pretty(out, 3);
            }
            Concept::And(a, b) => {
                a.fmt_pretty(out, 2);
                out.push_str(" & ");
                b.fmt_pretty(out, 3);
            }
            Concept::Or(a, b) => {
                a.fmt_pretty(out, 1);
                out.push_str(" | ");
                b.fmt_pretty(out, 2);
            }
        }
        if paren {
            out.push(')');
        }
    }

    /// Constant folding: `Top`/`~Top` units in `&`/`|`, double negation,
    /// idempotence and complementary pairs (by syntactic equality), and
    /// restrictions/modalities applied to constants. Keeps the concept
    /// equivalent in every model (domains and world sets are non-empty, and
    /// the world relation is total, so `<>Top = Top` and `[]~Top = ~Top`).
    pub fn simplify(&self) -> Concept {
        let bot = bottom();
        let simplified = match self {
            Concept::Top | Concept::Name(_) => self.clone(),
            Concept::Not(c) => match c.simplify() {
                Concept::Not(inner) => *inner,
                other => other.not(),
            },
            Concept::And(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                if a == Concept::Top {
                    b
                } else if b == Concept::Top {
                    a
                } else if a == bot || b == bot || a == b.clone().not() || b == a.clone().not() {
                    bot.clone()
                } else if a == b {
                    a
                } else {
                    a.and(b)
                }
            }
            Concept::Or(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                if a == Concept::Top || b == Concept::Top {
                    Concept::Top
                } else if a == b.clone().not() || b == a.clone().not() {
                    Concept::Top
                } else if a == bot {
                    b
                } else if b == bot {
                    a
                } else if a == b {
                    a
                } else {
                    a.or(b)
                }
            }
            Concept::SomeRole(r, c) => match c.simplify() {
                c if c == bot => bot.clone(),
                c => c.some(r),
            },
            Concept::AllRole(r, c) => match c.simplify() {
                Concept::Top => Concept::Top,
                c => c.all(r),
            },
            Concept::SomeU(c) => match c.simplify() {
                Concept::Top => Concept::Top,
                c if c == bot => bot.clone(),
                c => c.some_u(),
            },
            Concept::AllU(c) => match c.simplify() {
                Concept::Top => Concept::Top,
                c if c == bot => bot.clone(),
                c => c.all_u(),
            },
            Concept::Diamond(c) => match c.simplify() {
                Concept::Top => Concept::Top,
                c if c == bot => bot.clone(),
                c => c.dia(),
            },
            Concept::Box(c) => match c.simplify() {
                Concept::Top => Concept::Top,
                c if c == bot => bot.clone(),
                c => c.bx(),
            },
        };
        simplified
    }

    /// Rename concept and role names according to `mapping` (first match
    /// wins, as in the formula renaming).
    pub fn rename(&self, mapping: &[(String, String)]) -> Concept {
        let lookup = |name: &str| -> String {
            for (from, to) in mapping {
                if name == from {
                    return to.clone();
                }
            }
            name.to_string()
        };
        match self {
            Concept::Top => Concept::Top,
            Concept::Name(a) => Concept::Name(lookup(a)),
            Concept::Not(c) => c.rename(mapping).not(),
            Concept::And(a, b) => a.rename(mapping).and(b.rename(mapping)),
            Concept::Or(a, b) => a.rename(mapping).or(b.rename(mapping)),
            Concept::SomeRole(r, c) => Concept::SomeRole(lookup(r), Box::new(c.rename(mapping))),
            Concept::AllRole(r, c) => Concept::AllRole(lookup(r), Box::new(c.rename(mapping))),
            Concept::SomeU(c) => c.rename(mapping).some_u(),
            Concept::AllU(c) => c.rename(mapping).all_u(),
            Concept::Diamond(c) => c.rename(mapping).dia(),
            Concept::Box(c) => c.rename(mapping).bx(),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Conjunction of a list; empty list is `Top`.
pub fn conj(mut items: Vec<Concept>) -> Concept {
    match items.len() {
        0 => Concept::Top,
        1 => items.pop().unwrap(),
        _ => {
            let mut it = items.into_iter();
            let first = it.next().unwrap();
            it.fold(first, |acc, c| acc.and(c))
        }
    }
}

/// Disjunction of a list; empty list is `~Top`.
pub fn disj(mut items: Vec<Concept>) -> Concept {
    match items.len() {
        0 => bottom(),
        1 => items.pop().unwrap(),
        _ => {
            let mut it = items.into_iter();
            let first = it.next().unwrap();
            it.fold(first, |acc, c| acc.or(c))
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    TopKw,
    SomeKw,
    AllKw,
    Ident(String),
    Tilde,
    Amp,
    Pipe,
    Dot,
    Dia,
    BoxT,
    LPar,
    RPar,
    Subsumes,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { src: text.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, message: String) -> ParseError {
        ParseError { line: self.line, col: self.col, message }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn tokens(&mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let (line, col) = (self.line, self.col);
            match self.src[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'~' => {
                    self.bump();
                    out.push((Tok::Tilde, line, col));
                }
                b'&' => {
                    self.bump();
                    out.push((Tok::Amp, line, col));
                }
                b'|' => {
                    self.bump();
                    out.push((Tok::Pipe, line, col));
                }
                b'.' => {
                    self.bump();
                    out.push((Tok::Dot, line, col));
                }
                b'(' => {
                    self.bump();
                    out.push((Tok::LPar, line, col));
                }
                b')' => {
                    self.bump();
                    out.push((Tok::RPar, line, col));
                }
                b'<' => {
                    self.bump();
                    match self.src.get(self.pos) {
                        Some(b'>') => {
                            self.bump();
                            out.push((Tok::Dia, line, col));
                        }
                        Some(b'=') => {
                            self.bump();
                            out.push((Tok::Subsumes, line, col));
                        }
                        _ => return Err(self.err("expected '<>' or '<='".to_string())),
                    }
                }
                b'[' => {
                    self.bump();
                    if self.src.get(self.pos) == Some(&b']') {
                        self.bump();
                        out.push((Tok::BoxT, line, col));
                    } else {
                        return Err(self.err("expected '[]'".to_string()));
                    }
                }
                c if c.is_ascii_alphanumeric() || c == b'_' => {
                    let start = self.pos;
                    while self.pos < self.src.len() {
                        let c = self.src[self.pos];
                        if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let tok = match word {
                        "Top" => Tok::TopKw,
                        "some" => Tok::SomeKw,
                        "all" => Tok::AllKw,
                        _ => Tok::Ident(word.to_string()),
                    };
                    out.push((tok, line, col));
                }
                other => {
                    return Err(self.err(format!("unexpected character {:?}", other as char)));
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|&(_, l, c)| (l, c)).unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, message: message.into() }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn parse_or(&mut self) -> Result<Concept, ParseError> {
        let mut c = self.parse_and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            c = c.or(self.parse_and()?);
        }
        Ok(c)
    }

    fn parse_and(&mut self) -> Result<Concept, ParseError> {
        let mut c = self.parse_unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            c = c.and(self.parse_unary()?);
        }
        Ok(c)
    }

    fn restriction(&mut self, existential: bool) -> Result<Concept, ParseError> {
        let role = match self.peek() {
            Some(Tok::Ident(_)) => {
                if let Tok::Ident(r) = self.bump() {
                    r
                } else {
                    unreachable!()
                }
            }
            _ => return Err(self.err("expected a role name")),
        };
        self.expect(Tok::Dot, "'.'")?;
        let body = self.parse_unary()?;
        Ok(match (role.as_str(), existential) {
            (UNIVERSAL_ROLE, true) => body.some_u(),
            (UNIVERSAL_ROLE, false) => body.all_u(),
            (_, true) => body.some(&role),
            (_, false) => body.all(&role),
        })
    }

    fn parse_unary(&mut self) -> Result<Concept, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(self.parse_unary()?.not())
            }
            Some(Tok::Dia) => {
                self.bump();
                Ok(self.parse_unary()?.dia())
            }
            Some(Tok::BoxT) => {
                self.bump();
                Ok(self.parse_unary()?.bx())
            }
            Some(Tok::SomeKw) => {
                self.bump();
                self.restriction(true)
            }
            Some(Tok::AllKw) => {
                self.bump();
                self.restriction(false)
            }
            _ => self.parse_atomic(),
        }
    }

    fn parse_atomic(&mut self) -> Result<Concept, ParseError> {
        match self.peek() {
            Some(Tok::TopKw) => {
                self.bump();
                Ok(Concept::Top)
            }
            Some(Tok::Ident(_)) => {
                if let Tok::Ident(name) = self.bump() {
                    Ok(Concept::Name(name))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::LPar) => {
                self.bump();
                let c = self.parse_or()?;
                self.expect(Tok::RPar, "')'")?;
                Ok(c)
            }
            Some(_) => Err(self.err("expected a concept")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn parser_for(text: &str) -> Result<Parser, ParseError> {
    let end_line = text.lines().count().max(1);
    let end_col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let toks = Lexer::new(text).tokens()?;
    Ok(Parser { toks, pos: 0, end: (end_line, end_col) })
}

/// Parse a concept from text. Errors carry 1-based line/column positions.
pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let mut p = parser_for(text)?;
    let c = p.parse_or()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after concept"));
    }
    Ok(c)
}

/// Parse a single concept inclusion `C <= D`.
pub fn parse_inclusion(text: &str) -> Result<(Concept, Concept), ParseError> {
    let mut p = parser_for(text)?;
    let lhs = p.parse_or()?;
    p.expect(Tok::Subsumes, "'<='")?;
    let rhs = p.parse_or()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after inclusion"));
    }
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Ontologies
// ---------------------------------------------------------------------------

/// A finite set of concept inclusions, kept in insertion order. An axiom
/// `C <= D` is read world-locally: a world satisfies it when every domain
/// element in `C` there is also in `D` there. Entailment `O ⊨ C <= D`
/// quantifies over the worlds at which all axioms hold.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Ontology {
    pub axioms: Vec<(Concept, Concept)>,
}

impl Ontology {
    pub fn new(axioms: Vec<(Concept, Concept)>) -> Ontology {
        Ontology { axioms }
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn push(&mut self, c: Concept, d: Concept) {
        self.axioms.push((c, d));
    }

    /// Add `Top <= [](all U.(~C | D))` — the shape of a globally asserted
    /// inclusion, constant-folded so that `C = Top` premises disappear.
    pub fn push_boxed(&mut self, c: Concept, d: Concept) {
        let matrix = c.not().or(d).simplify();
        self.axioms.push((Concept::Top, matrix.all_u().bx()));
    }

    /// One inclusion per line, `C <= D`; blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Ontology, ParseError> {
        let mut axioms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let stripped = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            };
            if stripped.trim().is_empty() {
                continue;
            }
            let (c, d) = parse_inclusion(stripped).map_err(|e| ParseError {
                line: i + 1,
                col: e.col,
                message: e.message,
            })?;
            axioms.push((c, d));
        }
        Ok(Ontology { axioms })
    }

    pub fn pretty(&self) -> String {
        self.axioms
            .iter()
            .map(|(c, d)| format!("{} <= {}\n", c.pretty(), d.pretty()))
            .collect()
    }

    pub fn signature(&self) -> Signature {
        let mut sig = BTreeSet::new();
        for (c, d) in &self.axioms {
            sig.extend(c.signature());
            sig.extend(d.signature());
        }
        sig
    }

    pub fn rename(&self, mapping: &[(String, String)]) -> Ontology {
        Ontology {
            axioms: self
                .axioms
                .iter()
                .map(|(c, d)| (c.rename(mapping), d.rename(mapping)))
                .collect(),
        }
    }

    /// Union, left axioms first.
    pub fn union(&self, other: &Ontology) -> Ontology {
        let mut axioms = self.axioms.clone();
        axioms.extend(other.axioms.iter().cloned());
        Ontology { axioms }
    }
}

/// The ontology as a single concept: the conjunction over all axioms
/// `C <= D` of `all U.(~C | D)`, true at a point exactly when every axiom
/// holds at that point's world. The empty ontology collapses to `Top`.
pub fn ontology_to_concept(o: &Ontology) -> Concept {
    conj(o.axioms.iter().map(|(c, d)| c.clone().not().or(d.clone()).all_u()).collect())
}

// ---------------------------------------------------------------------------
// Closures
// ---------------------------------------------------------------------------

/// Closure under single negation of the subconcepts of the normalized
/// inputs, with dense ids; mirrors the formula closure.
#[derive(Debug, Clone)]
pub struct ConceptClosure {
    pub items: Vec<Concept>,
    index: HashMap<Concept, usize>,
    /// Ids of members of shape `some U.C` or `~some U.C`.
    pub sub_some_u: Vec<usize>,
    /// Ids of members of shape `<>C` or `~<>C`.
    pub sub_diamond: Vec<usize>,
    /// Ids of members of shape `some R.C` or `~some R.C` (ordinary roles).
    pub sub_role: Vec<usize>,
    /// `neg[i]` is the id of the single-negation complement of member `i`.
    pub neg: Vec<usize>,
}

impl ConceptClosure {
    pub fn new(inputs: &[&Concept]) -> ConceptClosure {
        let mut items: Vec<Concept> = Vec::new();
        let mut index: HashMap<Concept, usize> = HashMap::new();
        let add = |c: Concept, items: &mut Vec<Concept>, index: &mut HashMap<Concept, usize>| {
            if !index.contains_key(&c) {
                index.insert(c.clone(), items.len());
                items.push(c);
            }
        };
        for input in inputs {
            let n = input.normalize();
            n.walk(&mut |sub| add(sub.clone(), &mut items, &mut index));
        }
        let base = items.clone();
        for c in base {
            if !matches!(c, Concept::Not(_)) {
                add(c.not(), &mut items, &mut index);
            }
        }
        let mut sub_some_u = Vec::new();
        let mut sub_diamond = Vec::new();
        let mut sub_role = Vec::new();
        let mut neg = vec![0usize; items.len()];
        for (i, c) in items.iter().enumerate() {
            let inner = if let Concept::Not(g) = c { g.as_ref() } else { c };
            match inner {
                Concept::SomeU(_) => sub_some_u.push(i),
                Concept::Diamond(_) => sub_diamond.push(i),
                Concept::SomeRole(..) => sub_role.push(i),
                _ => {}
            }
            neg[i] = match c {
                Concept::Not(g) => index[g.as_ref()],
                other => index[&other.clone().not()],
            };
        }
        ConceptClosure { items, index, sub_some_u, sub_diamond, sub_role, neg }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn id_of(&self, c: &Concept) -> Option<usize> {
        self.index.get(c).copied()
    }
}

// ---------------------------------------------------------------------------
// Embedding of the one-variable modal language
// ---------------------------------------------------------------------------

/// Read a one-variable formula as a role-free concept: predicates become
/// concept names, `E`/`A` become `some U`/`all U`, and the modalities map to
/// themselves. Total on all formulas (material connectives are expanded).
pub fn formula_to_concept(phi: &Formula) -> Concept {
    match phi {
        Formula::Top => Concept::Top,
        Formula::Bottom => bottom(),
        Formula::Atom(p) => cname(p),
        Formula::Not(f) => formula_to_concept(f).not(),
        Formula::And(a, b) => formula_to_concept(a).and(formula_to_concept(b)),
        Formula::Or(a, b) => formula_to_concept(a).or(formula_to_concept(b)),
        Formula::Implies(a, b) => formula_to_concept(a).not().or(formula_to_concept(b)),
        Formula::Iff(a, b) => {
            let (ca, cb) = (formula_to_concept(a), formula_to_concept(b));
            (ca.clone().not().or(cb.clone())).and(cb.not().or(ca))
        }
        Formula::Diamond(f) => formula_to_concept(f).dia(),
        Formula::Box(f) => formula_to_concept(f).bx(),
        Formula::Exists(f) => formula_to_concept(f).some_u(),
        Formula::Forall(f) => formula_to_concept(f).all_u(),
    }
}

/// Inverse reading; defined exactly on role-free concepts.
pub fn concept_to_formula(c: &Concept) -> Option<Formula> {
    Some(match c {
        Concept::Top => Formula::Top,
        Concept::Name(a) => Formula::Atom(a.clone()),
        Concept::Not(c) => concept_to_formula(c)?.not(),
        Concept::And(a, b) => concept_to_formula(a)?.and(concept_to_formula(b)?),
        Concept::Or(a, b) => concept_to_formula(a)?.or(concept_to_formula(b)?),
        Concept::SomeU(c) => concept_to_formula(c)?.exists(),
        Concept::AllU(c) => concept_to_formula(c)?.forall(),
        Concept::Diamond(c) => concept_to_formula(c)?.dia(),
        Concept::Box(c) => concept_to_formula(c)?.bx(),
        Concept::SomeRole(..) | Concept::AllRole(..) => return None,
    })
}

/// Rename every concept and role name outside `keep` to a fresh primed name,
/// consistently; returns the mapping for reuse on companion concepts.
pub fn rename_outside_sigma(sig: &Signature, keep: &Signature) -> Vec<(String, String)> {
    let mut used: BTreeSet<String> = sig.union(keep).cloned().collect();
    let mut mapping = Vec::new();
    for x in sig {
        if keep.contains(x) {
            continue;
        }
        let mut fresh = format!("{x}'");
        while used.contains(&fresh) {
            fresh.push('\'');
        }
        used.insert(fresh.clone());
        mapping.push((x.clone(), fresh));
    }
    mapping
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn parses_the_worked_definition() {
        let c = parse_concept("CS & some uses.Logic & (some areaOf.AI | some historicAreaOf.AI)")
            .unwrap();
        let expected = cname("CS")
            .and(cname("Logic").some("uses"))
            .and(cname("AI").some("areaOf").or(cname("AI").some("historicAreaOf")));
        assert_eq!(c, expected);
        assert_eq!(parse_concept(&c.pretty()).unwrap(), c);
        assert_eq!(parse_concept(&c.canonical()).unwrap(), c);
    }

    #[test]
    fn universal_role_is_not_an_ordinary_role() {
        let c = parse_concept("some U.A & all U.B").unwrap();
        assert_eq!(c, cname("A").some_u().and(cname("B").all_u()));
        assert!(c.role_names().is_empty());
        assert_eq!(parse_concept(&c.canonical()).unwrap(), c);
    }

    #[test]
    fn signature_separates_names_and_roles() {
        let c = parse_concept("A & some r.(B | <>~A)").unwrap();
        assert_eq!(c.concept_names().into_iter().collect::<Vec<_>>(), ["A", "B"]);
        assert_eq!(c.role_names().into_iter().collect::<Vec<_>>(), ["r"]);
        assert_eq!(c.signature().len(), 3);
        assert!(!c.is_role_free());
    }

    #[test]
    fn normalization_reaches_the_core() {
        let c = parse_concept("all r.(A | []B)").unwrap();
        let n = c.normalize();
        assert!(n.is_normalized());
        assert_eq!(n.normalize(), n);
    }

    #[test]
    fn restriction_binds_tighter_than_booleans() {
        let c = parse_concept("some r.A & B").unwrap();
        assert_eq!(c, cname("A").some("r").and(cname("B")));
    }

    #[test]
    fn simplification_folds_constants() {
        let c = Concept::Top.and(cname("A")).not().or(bottom());
        assert_eq!(c.simplify(), cname("A").not());
        assert_eq!(cname("A").or(cname("A").not()).simplify(), Concept::Top);
        assert_eq!(bottom().some("r").simplify(), bottom());
        assert_eq!(Concept::Top.dia().simplify(), Concept::Top);
    }

    #[test]
    fn ontology_lines_round_trip() {
        let text = "# toy ontology\nA <= some r.B\nTop <= [](all U.(~A | B))\n";
        let o = Ontology::parse(text).unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(Ontology::parse(&o.pretty()).unwrap(), o);
        assert!(o.signature().contains("r"));
    }

    #[test]
    fn ontology_concept_is_the_axiom_conjunction() {
        let o = Ontology::parse("A <= B\nB <= C").unwrap();
        let c = ontology_to_concept(&o);
        let first = cname("A").not().or(cname("B")).all_u();
        let second = cname("B").not().or(cname("C")).all_u();
        assert_eq!(c, first.and(second));
        assert_eq!(ontology_to_concept(&Ontology::default()), Concept::Top);
    }

    #[test]
    fn formula_embedding_round_trips() {
        use crate::kripke::{enumerate_models, model_check, ModelKind};
        for text in ["E p -> []q", "<>(p & ~q) | A p", "p <-> q"] {
            let phi = parse(text).unwrap();
            let c = formula_to_concept(&phi);
            assert!(c.is_role_free());
            // the embedding expands material connectives, so the round trip
            // is checked semantically rather than on raw trees
            let back = concept_to_formula(&c).unwrap();
            for m in enumerate_models(&phi.signature(), 2, 2, ModelKind::Q1S5, false) {
                assert_eq!(
                    model_check(&m, 0, 0, &back).unwrap(),
                    model_check(&m, 0, 0, &phi).unwrap(),
                    "{text}"
                );
            }
        }
        assert_eq!(concept_to_formula(&cname("A").some("r")), None);
    }

    #[test]
    fn priming_respects_sigma() {
        let sig: Signature = ["A", "B", "r"].iter().map(|s| s.to_string()).collect();
        let keep: Signature = ["B"].iter().map(|s| s.to_string()).collect();
        let mapping = rename_outside_sigma(&sig, &keep);
        assert_eq!(
            mapping,
            vec![("A".to_string(), "A'".to_string()), ("r".to_string(), "r'".to_string())]
        );
        let c = cname("A").some("r").and(cname("B"));
        assert_eq!(c.rename(&mapping), cname("A'").some("r'").and(cname("B")));
    }
}
