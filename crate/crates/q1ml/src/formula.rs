//! Formulas of one-variable quantified modal logic in succinct bimodal
//! notation: `E`/`A` quantify over the domain, `<>`/`[]` over worlds.
//!
//! The surface syntax is
//!
//! ```text
//! phi ::= 'true' | 'false' | ident | '~' phi | '<>' phi | '[]' phi
//!       | 'E' phi | 'A' phi | phi '&' phi | phi '|' phi
//!       | phi '->' phi | phi '<->' phi | '(' phi ')'
//! ```
//!
//! with precedence (tightest first) unary, `&`, `|`, `->` (right
//! associative), `<->`. A chain `a <-> b <-> c` abbreviates the conjunction
//! of the adjacent equivalences.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Formula AST. `Box` here is the modal box; the heap pointer is spelled
/// `std::boxed::Box` in the variant payloads.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Formula {
    Top,
    Bottom,
    Atom(String),
    Not(std::boxed::Box<Formula>),
    And(std::boxed::Box<Formula>, std::boxed::Box<Formula>),
    Or(std::boxed::Box<Formula>, std::boxed::Box<Formula>),
    Implies(std::boxed::Box<Formula>, std::boxed::Box<Formula>),
    Iff(std::boxed::Box<Formula>, std::boxed::Box<Formula>),
    Diamond(std::boxed::Box<Formula>),
    Box(std::boxed::Box<Formula>),
    Exists(std::boxed::Box<Formula>),
    Forall(std::boxed::Box<Formula>),
}

/// Predicate signature: duplicate-free, iterated in lexicographic order.
pub type Signature = BTreeSet<String>;

pub fn atom(name: &str) -> Formula {
    Formula::Atom(name.to_string())
}

impl Formula {
    pub fn not(self) -> Formula {
        Formula::Not(std::boxed::Box::new(self))
    }
    pub fn and(self, other: Formula) -> Formula {
        Formula::And(std::boxed::Box::new(self), std::boxed::Box::new(other))
    }
    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(std::boxed::Box::new(self), std::boxed::Box::new(other))
    }
    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(std::boxed::Box::new(self), std::boxed::Box::new(other))
    }
    pub fn iff(self, other: Formula) -> Formula {
        Formula::Iff(std::boxed::Box::new(self), std::boxed::Box::new(other))
    }
    pub fn dia(self) -> Formula {
        Formula::Diamond(std::boxed::Box::new(self))
    }
    pub fn bx(self) -> Formula {
        Formula::Box(std::boxed::Box::new(self))
    }
    pub fn exists(self) -> Formula {
        Formula::Exists(std::boxed::Box::new(self))
    }
    pub fn forall(self) -> Formula {
        Formula::Forall(std::boxed::Box::new(self))
    }

    /// All predicate names occurring in the formula.
    pub fn signature(&self) -> Signature {
        let mut sig = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Atom(p) = f {
                sig.insert(p.clone());
            }
        });
        sig
    }

    /// Maximal nesting of `<>`/`[]`. Quantifiers do not count.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Exists(f) | Formula::Forall(f) => f.modal_depth(),
            Formula::Diamond(f) | Formula::Box(f) => 1 + f.modal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
        }
    }

    /// Rewrite into the core fragment `true / p / ~ / & / E / <>`.
    /// Idempotent: normalizing a normalized formula returns it unchanged.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Top.not(),
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Not(f) => f.normalize().not(),
            Formula::And(a, b) => a.normalize().and(b.normalize()),
            Formula::Or(a, b) => (a.normalize().not().and(b.normalize().not())).not(),
            Formula::Implies(a, b) => (a.normalize().and(b.normalize().not())).not(),
            Formula::Iff(a, b) => {
                let (na, nb) = (a.normalize(), b.normalize());
                let fwd = (na.clone().and(nb.clone().not())).not();
                let bwd = (nb.and(na.not())).not();
                fwd.and(bwd)
            }
            Formula::Diamond(f) => f.normalize().dia(),
            Formula::Box(f) => f.normalize().not().dia().not(),
            Formula::Exists(f) => f.normalize().exists(),
            Formula::Forall(f) => f.normalize().not().exists().not(),
        }
    }

    pub fn is_normalized(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) => true,
            Formula::Not(f) | Formula::Exists(f) | Formula::Diamond(f) => f.is_normalized(),
            Formula::And(a, b) => a.is_normalized() && b.is_normalized(),
            _ => false,
        }
    }

    fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => {}
            Formula::Not(f)
            | Formula::Diamond(f)
            | Formula::Box(f)
            | Formula::Exists(f)
            | Formula::Forall(f) => f.walk(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    /// Canonical fully parenthesized rendering; `parse` inverts it exactly.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        self.fmt_canonical(&mut s);
        s
    }

    fn fmt_canonical(&self, out: &mut String) {
        match self {
            Formula::Top => out.push_str("true"),
            Formula::Bottom => out.push_str("false"),
            Formula::Atom(p) => out.push_str(p),
            Formula::Not(f) => {
                out.push('~');
                f.fmt_canonical(out);
            }
            Formula::Diamond(f) => {
                out.push_str("<>");
                f.fmt_canonical(out);
            }
            Formula::Box(f) => {
                out.push_str("[]");
                f.fmt_canonical(out);
            }
            Formula::Exists(f) => {
                out.push_str("E ");
                f.fmt_canonical(out);
            }
            Formula::Forall(f) => {
                out.push_str("A ");
                f.fmt_canonical(out);
            }
            Formula::And(a, b) => Self::fmt_bin(out, a, " & ", b),
            Formula::Or(a, b) => Self::fmt_bin(out, a, " | ", b),
            Formula::Implies(a, b) => Self::fmt_bin(out, a, " -> ", b),
            Formula::Iff(a, b) => Self::fmt_bin(out, a, " <-> ", b),
        }
    }

    fn fmt_bin(out: &mut String, a: &Formula, op: &str, b: &Formula) {
        out.push('(');
        a.fmt_canonical(out);
        out.push_str(op);
        b.fmt_canonical(out);
        out.push(')');
    }

    /// Minimal-parenthesis rendering (still re-parses to the same AST up to
    /// the right associativity of `->` and flat `&`/`|` chains, which the
    /// parser rebuilds identically).
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        self.fmt_pretty(&mut s, 0);
        s
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(_)
            | Formula::Diamond(_)
            | Formula::Box(_)
            | Formula::Exists(_)
            | Formula::Forall(_) => 5,
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 6,
        }
    }

    fn fmt_pretty(&self, out: &mut String, min: u8) {
        let me = self.prec();
        let paren = me < min;
        if paren {
            out.push('(');
        }
        match self {
            Formula::Top => out.push_str("true"),
            Formula::Bottom => out.push_str("false"),
            Formula::Atom(p) => out.push_str(p),
            Formula::Not(f) => {
                out.push('~');
                f.fmt_pretty(out, 5);
            }
            Formula::Diamond(f) => {
                out.push_str("<>");
                f.fmt_pretty(out, 5);
            }
            Formula::Box(f) => {
                out.push_str("[]");
                f.fmt_pretty(out, 5);
            }
            Formula::Exists(f) => {
                out.push_str("E ");
                f.fmt_pretty(out, 5);
            }
            Formula::Forall(f) => {
                out.push_str("A ");
                f.fmt_pretty(out, 5);
            }
            Formula::And(a, b) => {
                a.fmt_pretty(out, 4);
                out.push_str(" & ");
                b.fmt_pretty(out, 5);
            }
            Formula::Or(a, b) => {
                a.fmt_pretty(out, 3);
                out.push_str(" | ");
                b.fmt_pretty(out, 4);
            }
            Formula::Implies(a, b) => {
                a.fmt_pretty(out, 3);
                out.push_str(" -> ");
                b.fmt_pretty(out, 2);
            }
            Formula::Iff(a, b) => {
                a.fmt_pretty(out, 2);
                out.push_str(" <-> ");
                b.fmt_pretty(out, 2);
            }
        }
        if paren {
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Conjunction of a list; empty list is `true`.
pub fn conj(mut items: Vec<Formula>) -> Formula {
    match items.len() {
        0 => Formula::Top,
        1 => items.pop().unwrap(),
        _ => {
            let mut it = items.into_iter();
            let first = it.next().unwrap();
            it.fold(first, |acc, f| acc.and(f))
        }
    }
}

/// Disjunction of a list; empty list is `false`.
pub fn disj(mut items: Vec<Formula>) -> Formula {
    match items.len() {
        0 => Formula::Bottom,
        1 => items.pop().unwrap(),
        _ => {
            let mut it = items.into_iter();
            let first = it.next().unwrap();
            it.fold(first, |acc, f| acc.or(f))
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    True,
    False,
    Ident(String),
    Tilde,
    Dia,
    Boxt,
    E,
    A,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    LPar,
    RPar,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
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

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'(' => {
                    self.bump();
                    out.push((Tok::LPar, line, col));
                }
                b')' => {
                    self.bump();
                    out.push((Tok::RPar, line, col));
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
                b'<' => {
                    self.bump();
                    match self.peek() {
                        Some(b'>') => {
                            self.bump();
                            out.push((Tok::Dia, line, col));
                        }
                        Some(b'-') => {
                            self.bump();
                            if self.peek() == Some(b'>') {
                                self.bump();
                                out.push((Tok::DArrow, line, col));
                            } else {
                                return Err(self.err("expected '>' after '<-'"));
                            }
                        }
                        _ => return Err(self.err("expected '>' or '->' after '<'")),
                    }
                }
                b'[' => {
                    self.bump();
                    if self.peek() == Some(b']') {
                        self.bump();
                        out.push((Tok::Boxt, line, col));
                    } else {
                        return Err(self.err("expected ']' after '['"));
                    }
                }
                b'-' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        out.push((Tok::Arrow, line, col));
                    } else {
                        return Err(self.err("expected '>' after '-'"));
                    }
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let tok = match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "E" => Tok::E,
                        "A" => Tok::A,
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

    // iff level: chains fold into the conjunction of adjacent equivalences
    fn parse_iff(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.parse_implies()?];
        while self.peek() == Some(&Tok::DArrow) {
            self.bump();
            parts.push(self.parse_implies()?);
        }
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap());
        }
        let pairs: Vec<Formula> = parts
            .windows(2)
            .map(|w| w[0].clone().iff(w[1].clone()))
            .collect();
        Ok(conj(pairs))
    }

    fn parse_implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.parse_implies()?; // right associative
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.parse_and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            f = f.or(self.parse_and()?);
        }
        Ok(f)
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.parse_unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            f = f.and(self.parse_unary()?);
        }
        Ok(f)
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(self.parse_unary()?.not())
            }
            Some(Tok::Dia) => {
                self.bump();
                Ok(self.parse_unary()?.dia())
            }
            Some(Tok::Boxt) => {
                self.bump();
                Ok(self.parse_unary()?.bx())
            }
            Some(Tok::E) => {
                self.bump();
                Ok(self.parse_unary()?.exists())
            }
            Some(Tok::A) => {
                self.bump();
                Ok(self.parse_unary()?.forall())
            }
            _ => self.parse_atomic(),
        }
    }

    fn parse_atomic(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::True) => {
                self.bump();
                Ok(Formula::Top)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Some(Tok::Ident(_)) => {
                if let Tok::Ident(name) = self.bump() {
                    Ok(Formula::Atom(name))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::LPar) => {
                self.bump();
                let f = self.parse_iff()?;
                self.expect(Tok::RPar, "')'")?;
                Ok(f)
            }
            Some(_) => Err(self.err("expected a formula")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parse a formula from text. Errors carry 1-based line/column positions.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let end_line = text.lines().count().max(1);
    let end_col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0, end: (end_line, end_col) };
    let f = p.parse_iff()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after formula"));
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Closures
// ---------------------------------------------------------------------------

/// The closure of a formula pair: all subformulas of the normalized inputs,
/// closed under single negation, with dense ids and the quantified/modal
/// member lists used by type computations.
#[derive(Debug, Clone)]
pub struct ClosureIndex {
    /// Closure members in deterministic order (subformulas first, in
    /// pre-order of the inputs; missing negations appended afterwards).
    pub items: Vec<Formula>,
    index: HashMap<Formula, usize>,
    /// Ids of members of shape `E xi` or `~E xi`.
    pub sub_exists: Vec<usize>,
    /// Ids of members of shape `<>xi` or `~<>xi`.
    pub sub_diamond: Vec<usize>,
    /// `neg[i]` is the id of the single-negation complement of member `i`.
    pub neg: Vec<usize>,
}

impl ClosureIndex {
    /// Closure of the union of the given formulas (normalized internally).
    pub fn new(inputs: &[&Formula]) -> ClosureIndex {
        let mut items: Vec<Formula> = Vec::new();
        let mut index: HashMap<Formula, usize> = HashMap::new();
        let add = |f: Formula, items: &mut Vec<Formula>, index: &mut HashMap<Formula, usize>| {
            if !index.contains_key(&f) {
                index.insert(f.clone(), items.len());
                items.push(f);
            }
        };
        for input in inputs {
            let n = input.normalize();
            n.walk(&mut |sub| add(sub.clone(), &mut items, &mut index));
        }
        // Close under single negation: ~xi for plain members (the complement
        // of ~zeta is zeta, which is already a subformula).
        let base = items.clone();
        for f in base {
            if !matches!(f, Formula::Not(_)) {
                add(f.not(), &mut items, &mut index);
            }
        }
        let mut sub_exists = Vec::new();
        let mut sub_diamond = Vec::new();
        let mut neg = vec![0usize; items.len()];
        for (i, f) in items.iter().enumerate() {
            let inner = if let Formula::Not(g) = f { g.as_ref() } else { f };
            match inner {
                Formula::Exists(_) => sub_exists.push(i),
                Formula::Diamond(_) => sub_diamond.push(i),
                _ => {}
            }
            neg[i] = match f {
                Formula::Not(g) => index[g.as_ref()],
                other => index[&other.clone().not()],
            };
        }
        ClosureIndex { items, index, sub_exists, sub_diamond, neg }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn id_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }
}

/// Closure of a single formula.
pub fn closure_of(phi: &Formula) -> ClosureIndex {
    ClosureIndex::new(&[phi])
}

/// Closure of a pair, as used by interpolation problems.
pub fn closures(phi: &Formula, psi: &Formula) -> ClosureIndex {
    ClosureIndex::new(&[phi, psi])
}

/// Rename every predicate outside `keep` to a fresh primed name (appending
/// `'` until the name clashes with nothing in the formula, `keep`, or the
/// names already chosen). Returns the renamed formula and the mapping.
pub fn rename_outside(phi: &Formula, keep: &Signature) -> (Formula, Vec<(String, String)>) {
    let sig = phi.signature();
    let mut used: BTreeSet<String> = sig.union(keep).cloned().collect();
    let mut mapping: Vec<(String, String)> = Vec::new();
    for p in &sig {
        if keep.contains(p) {
            continue;
        }
        let mut fresh = format!("{p}'");
        while used.contains(&fresh) {
            fresh.push('\'');
        }
        used.insert(fresh.clone());
        mapping.push((p.clone(), fresh));
    }
    let renamed = apply_renaming(phi, &mapping);
    (renamed, mapping)
}

/// Apply a predicate renaming produced by [`rename_outside`] (useful when one
/// mapping must be applied consistently to several formulas).
pub fn apply_renaming(phi: &Formula, mapping: &[(String, String)]) -> Formula {
    match phi {
        Formula::Atom(p) => {
            for (from, to) in mapping {
                if p == from {
                    return Formula::Atom(to.clone());
                }
            }
            Formula::Atom(p.clone())
        }
        Formula::Top => Formula::Top,
        Formula::Bottom => Formula::Bottom,
        Formula::Not(f) => apply_renaming(f, mapping).not(),
        Formula::And(a, b) => apply_renaming(a, mapping).and(apply_renaming(b, mapping)),
        Formula::Or(a, b) => apply_renaming(a, mapping).or(apply_renaming(b, mapping)),
        Formula::Implies(a, b) => apply_renaming(a, mapping).implies(apply_renaming(b, mapping)),
        Formula::Iff(a, b) => apply_renaming(a, mapping).iff(apply_renaming(b, mapping)),
        Formula::Diamond(f) => apply_renaming(f, mapping).dia(),
        Formula::Box(f) => apply_renaming(f, mapping).bx(),
        Formula::Exists(f) => apply_renaming(f, mapping).exists(),
        Formula::Forall(f) => apply_renaming(f, mapping).forall(),
    }
}

/// Signature restricted to `sigma`: true when every predicate of `phi` is in
/// `sigma`.
pub fn in_signature(phi: &Formula, sigma: &Signature) -> bool {
    phi.signature().is_subset(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quantified_box() {
        let f = parse("E []p").unwrap();
        assert_eq!(f, atom("p").bx().exists());
    }

    #[test]
    fn keywords_require_separation() {
        // "Ep" is a single identifier, not E applied to p.
        assert_eq!(parse("Ep").unwrap(), atom("Ep"));
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse("a & b | c -> d -> e").unwrap();
        let expected = (atom("a").and(atom("b")).or(atom("c")))
            .implies(atom("d").implies(atom("e")));
        assert_eq!(f, expected);
    }

    #[test]
    fn iff_chain_becomes_pairwise_conjunction() {
        let f = parse("a <-> b <-> c").unwrap();
        let expected = atom("a").iff(atom("b")).and(atom("b").iff(atom("c")));
        assert_eq!(f, expected);
    }

    #[test]
    fn fine_axiom_parses_as_implication() {
        let text = "A rep -> <>A (inPower -> [](A rep -> ~inPower))";
        let f = parse(text).unwrap();
        assert!(matches!(f, Formula::Implies(..)));
        let back = parse(&f.canonical()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn parse_error_positions() {
        let e = parse("p &\n& q").unwrap_err();
        assert_eq!((e.line, e.col), (2, 1));
        let e = parse("(p").unwrap_err();
        assert_eq!(e.message, "expected ')'");
    }

    #[test]
    fn canonical_roundtrip_on_samples() {
        for text in [
            "true",
            "~false",
            "<>E (p & ~q)",
            "[](p -> q) <-> (A p | <>q)",
            "E A E p",
            "p' & p''",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(parse(&f.canonical()).unwrap(), f);
            assert_eq!(parse(&f.pretty()).unwrap(), f);
        }
    }

    #[test]
    fn normalize_is_idempotent_and_core() {
        let f = parse("[](p -> q) <-> (A p | <>false)").unwrap();
        let n = f.normalize();
        assert!(n.is_normalized());
        assert_eq!(n.normalize(), n);
    }

    #[test]
    fn modal_depth_ignores_quantifiers() {
        assert_eq!(parse("E A p").unwrap().modal_depth(), 0);
        assert_eq!(parse("<>E []p").unwrap().modal_depth(), 2);
        assert_eq!(parse("<>p & [][]q").unwrap().modal_depth(), 2);
    }

    #[test]
    fn closure_counts() {
        // E<>p normalized: members E<>p, <>p, p plus their negations.
        let phi = parse("E <>p").unwrap();
        let cl = closure_of(&phi);
        assert_eq!(cl.len(), 6);
        assert_eq!(cl.sub_exists.len(), 2);
        assert_eq!(cl.sub_diamond.len(), 2);
        for (i, f) in cl.items.iter().enumerate() {
            assert_eq!(cl.neg[cl.neg[i]], i);
            let c = &cl.items[cl.neg[i]];
            match f {
                Formula::Not(inner) => assert_eq!(inner.as_ref(), c),
                _ => assert_eq!(&f.clone().not(), c),
            }
        }
    }

    #[test]
    fn closure_of_pair_shares_members() {
        let phi = parse("p & q").unwrap();
        let psi = parse("q & r").unwrap();
        let cl = closures(&phi, &psi);
        // p&q, p, q, q&r, r plus 5 negations
        assert_eq!(cl.len(), 10);
        assert!(cl.id_of(&atom("q")).is_some());
    }

    #[test]
    fn rename_outside_primes_until_fresh() {
        let phi = parse("p & p' & q").unwrap();
        let keep: Signature = ["q".to_string()].into_iter().collect();
        let (renamed, mapping) = rename_outside(&phi, &keep);
        assert_eq!(mapping.len(), 2);
        assert!(renamed.signature().contains("q"));
        // p -> p'' because p' is taken; p' -> p''' because p'' just got taken
        assert_eq!(mapping[0], ("p".to_string(), "p''".to_string()));
        assert_eq!(mapping[1], ("p'".to_string(), "p'''".to_string()));
    }

    #[test]
    fn signature_collects_atoms() {
        let f = parse("<>(p & ~q) -> E r").unwrap();
        let sig: Vec<String> = f.signature().into_iter().collect();
        assert_eq!(sig, ["p", "q", "r"]);
    }
}
