//! The worked-example corpus as executable data.
//!
//! Each item bundles the formulas, models and distinguished points of one
//! narrative example together with the facts claimed about them — "this point
//! satisfies that formula", "these two points are bisimilar", "this instance
//! has no interpolant within these bounds". A fact names an operation from
//! this crate and the outcome it must produce, so the corpus doubles as an
//! end-to-end oracle: build an item, run [`GalleryItem::check`], and every
//! report must pass. The CLI exposes the same runner as `gallery --run`.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};

use crate::alcu::{
    encode_standpoint, entails_bounded, parse_concept, parse_standpoint_ontology,
    verify_dl_definition, Concept, Ontology,
};
use crate::bisim::{max_bisim_s5, max_k_bisim};
use crate::decide::{
    check_valid_bounded, decide_edep_s5, decide_iep_s5, Outcome, SearchBounds, Verdict,
};
use crate::formula::{parse, Formula, Signature};
use crate::kripke::{model_check, KripkeModel, ModelKind, Point};

/// A model plus the point the narrative talks about.
#[derive(Clone, Debug)]
pub struct NamedModel {
    pub name: String,
    pub model: KripkeModel,
    pub point: Point,
}

/// One machine-checkable claim. Formulas, models, concepts and ontologies are
/// referenced by the names they carry inside their [`GalleryItem`]; the
/// runner resolves the names and executes the named operation.
#[derive(Clone, Debug)]
pub enum GalleryFact {
    /// `model_check` at the given point returns `expected`.
    Holds { model: String, world: usize, elem: usize, formula: String, expected: bool },
    /// The maximal S5 bisimulation for `sigma` relates (or refuses to relate)
    /// the two points, in the sense of the derived point relation.
    S5Related {
        left: String,
        left_point: Point,
        right: String,
        right_point: Point,
        sigma: Vec<String>,
        expected: bool,
    },
    /// Membership of the two distinguished points in level `level` of the
    /// maximal depth-`depth` bisimulation.
    KRelated { left: String, right: String, sigma: Vec<String>, depth: usize, level: usize, expected: bool },
    /// `decide_iep_s5` on the two named formulas ends with `expected`.
    IepS5 { left: String, right: String, bounds: SearchBounds, expected: Outcome },
    /// `decide_edep_s5` for the named target over `sigma` ends with `expected`.
    EdepS5 { phi: String, target: String, sigma: Vec<String>, bounds: SearchBounds, expected: Outcome },
    /// `check_valid_bounded` finds no countermodel to the named formula.
    NoCountermodel { formula: String, logic: ModelKind, bounds: SearchBounds },
    /// The named formula only uses predicates from `sigma`.
    SignatureWithin { formula: String, sigma: Vec<String> },
    /// Encoding the named standpoint presentation reproduces the named
    /// ontology axiom for axiom (after the per-standpoint rigidity prefix),
    /// up to normalization and conjunction regrouping.
    EncodesOntology { text: String, ontology: String },
    /// `verify_dl_definition` accepts the named concept as a definition of
    /// `target` over `sigma` modulo the ontology: no countermodel to either
    /// leg within the bounds.
    DlDefinitionHolds {
        ontology: String,
        target: String,
        definition: String,
        sigma: Vec<String>,
        bounds: SearchBounds,
    },
    /// Dropping one axiom breaks the definition: some leg of the equivalence
    /// gains a countermodel within the bounds.
    DlAxiomLoadBearing {
        ontology: String,
        axiom: usize,
        target: String,
        definition: String,
        bounds: SearchBounds,
    },
}

impl GalleryFact {
    /// One-line description, used as the report label.
    pub fn label(&self) -> String {
        match self {
            GalleryFact::Holds { model, world, elem, formula, expected } => {
                let sign = if *expected { "satisfies" } else { "refutes" };
                format!("{model} at ({world},{elem}) {sign} {formula}")
            }
            GalleryFact::S5Related { left, left_point, right, right_point, sigma, expected } => {
                let sign = if *expected { "relates" } else { "does not relate" };
                format!(
                    "max S5 bisimulation over {{{}}} {sign} {left}@{:?} and {right}@{:?}",
                    sigma.join(","),
                    left_point,
                    right_point
                )
            }
            GalleryFact::KRelated { left, right, sigma, level, expected, .. } => {
                let sign = if *expected { "contains" } else { "omits" };
                format!(
                    "level {level} of the depth-bounded bisimulation over {{{}}} {sign} the points of {left} and {right}",
                    sigma.join(",")
                )
            }
            GalleryFact::IepS5 { left, right, expected, .. } => {
                format!("interpolant existence for ({left}, {right}) is {}", expected.as_str())
            }
            GalleryFact::EdepS5 { phi, target, sigma, expected, .. } => {
                format!(
                    "explicit definition of {target} over {{{}}} modulo {phi} is {}",
                    sigma.join(","),
                    expected.as_str()
                )
            }
            GalleryFact::NoCountermodel { formula, bounds, .. } => {
                format!(
                    "no countermodel to {formula} within {}x{} worlds, {}x{} elements",
                    bounds.left_worlds, bounds.right_worlds, bounds.left_elems, bounds.right_elems
                )
            }
            GalleryFact::SignatureWithin { formula, sigma } => {
                format!("{formula} stays inside the signature {{{}}}", sigma.join(","))
            }
            GalleryFact::EncodesOntology { text, ontology } => {
                format!("standpoint presentation {text} encodes to {ontology}")
            }
            GalleryFact::DlDefinitionHolds { target, definition, ontology, .. } => {
                format!("{definition} defines {target} modulo {ontology}")
            }
            GalleryFact::DlAxiomLoadBearing { ontology, axiom, definition, .. } => {
                format!("dropping axiom {axiom} of {ontology} breaks {definition}")
            }
        }
    }
}

/// Outcome of running one fact.
#[derive(Clone, Debug)]
pub struct FactReport {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

impl FactReport {
    pub fn to_json(&self) -> Value {
        json!({ "label": self.label, "pass": self.pass, "detail": self.detail })
    }
}

/// A worked example: named data plus the facts that make it checkable.
#[derive(Clone, Debug, Default)]
pub struct GalleryItem {
    pub name: String,
    pub description: String,
    pub formulas: Vec<(String, Formula)>,
    pub models: Vec<NamedModel>,
    pub concepts: Vec<(String, Concept)>,
    pub ontologies: Vec<(String, Ontology)>,
    /// Raw source texts (standpoint presentations).
    pub texts: Vec<(String, String)>,
    pub facts: Vec<GalleryFact>,
}

impl GalleryItem {
    pub fn formula(&self, name: &str) -> Option<&Formula> {
        self.formulas.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn model(&self, name: &str) -> Option<&NamedModel> {
        self.models.iter().find(|m| m.name == name)
    }

    pub fn concept(&self, name: &str) -> Option<&Concept> {
        self.concepts.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn ontology(&self, name: &str) -> Option<&Ontology> {
        self.ontologies.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        self.texts.iter().find(|(n, _)| n == name).map(|(_, t)| t.as_str())
    }

    /// Run every fact and report pass/fail per fact.
    pub fn check(&self) -> Vec<FactReport> {
        self.facts.iter().map(|f| self.run_fact(f)).collect()
    }

    /// True when every fact passes.
    pub fn passes(&self) -> bool {
        self.check().iter().all(|r| r.pass)
    }

    fn run_fact(&self, fact: &GalleryFact) -> FactReport {
        let label = fact.label();
        match self.eval_fact(fact) {
            Ok((pass, detail)) => FactReport { label, pass, detail },
            Err(detail) => FactReport { label, pass: false, detail },
        }
    }

    fn need_formula(&self, name: &str) -> Result<&Formula, String> {
        self.formula(name).ok_or_else(|| format!("no formula named {name} in this item"))
    }

    fn need_model(&self, name: &str) -> Result<&NamedModel, String> {
        self.model(name).ok_or_else(|| format!("no model named {name} in this item"))
    }

    fn eval_fact(&self, fact: &GalleryFact) -> Result<(bool, String), String> {
        match fact {
            GalleryFact::Holds { model, world, elem, formula, expected } => {
                let nm = self.need_model(model)?;
                let f = self.need_formula(formula)?;
                let got = model_check(&nm.model, *world, *elem, f).map_err(|e| e.to_string())?;
                Ok((got == *expected, format!("model_check returned {got}")))
            }
            GalleryFact::S5Related { left, left_point, right, right_point, sigma, expected } => {
                let l = self.need_model(left)?;
                let r = self.need_model(right)?;
                let sig = to_signature(sigma);
                let b = max_bisim_s5(&l.model, &r.model, &sig);
                let got = b.point_related(&l.model, &r.model, &sig, *left_point, *right_point);
                Ok((got == *expected, format!("derived point relation returned {got}")))
            }
            GalleryFact::KRelated { left, right, sigma, depth, level, expected } => {
                let l = self.need_model(left)?;
                let r = self.need_model(right)?;
                let sig = to_signature(sigma);
                let kb = max_k_bisim(&l.model, &r.model, &sig, *depth);
                let got = kb.level(*level).contains(l.point, r.point);
                Ok((got == *expected, format!("level {level} membership is {got}")))
            }
            GalleryFact::IepS5 { left, right, bounds, expected } => {
                let l = self.need_formula(left)?;
                let r = self.need_formula(right)?;
                let v = decide_iep_s5(l, r, bounds);
                Ok((v.outcome == *expected, verdict_detail(&v)))
            }
            GalleryFact::EdepS5 { phi, target, sigma, bounds, expected } => {
                let p = self.need_formula(phi)?;
                let t = self.need_formula(target)?;
                let v = decide_edep_s5(p, t, &to_signature(sigma), bounds);
                Ok((v.outcome == *expected, verdict_detail(&v)))
            }
            GalleryFact::NoCountermodel { formula, logic, bounds } => {
                let f = self.need_formula(formula)?;
                let v = check_valid_bounded(f, *logic, bounds);
                Ok((!v.is_no(), verdict_detail(&v)))
            }
            GalleryFact::SignatureWithin { formula, sigma } => {
                let f = self.need_formula(formula)?;
                let allowed = to_signature(sigma);
                let extra: Vec<String> = f.signature().difference(&allowed).cloned().collect();
                Ok((extra.is_empty(), format!("predicates outside sigma: [{}]", extra.join(","))))
            }
            GalleryFact::EncodesOntology { text, ontology } => {
                let src = self
                    .text(text)
                    .ok_or_else(|| format!("no text named {text} in this item"))?;
                let reference = self
                    .ontology(ontology)
                    .ok_or_else(|| format!("no ontology named {ontology} in this item"))?;
                let sp = parse_standpoint_ontology(src).map_err(|e| e.to_string())?;
                let encoded = encode_standpoint(&sp).map_err(|e| e.to_string())?;
                let skip = sp.standpoints.len();
                if encoded.axioms.len() != skip + reference.axioms.len() {
                    return Ok((
                        false,
                        format!(
                            "axiom count mismatch: {} encoded after {skip} rigidity axioms vs {} expected",
                            encoded.axioms.len() - skip,
                            reference.axioms.len()
                        ),
                    ));
                }
                for (i, ((l1, r1), (l2, r2))) in
                    encoded.axioms[skip..].iter().zip(&reference.axioms).enumerate()
                {
                    if canonical(l1) != canonical(l2) || canonical(r1) != canonical(r2) {
                        return Ok((false, format!("axiom {i} differs from the reference")));
                    }
                }
                Ok((true, format!("{} axioms match after the rigidity prefix", reference.axioms.len())))
            }
            GalleryFact::DlDefinitionHolds { ontology, target, definition, sigma, bounds } => {
                let o = self
                    .ontology(ontology)
                    .ok_or_else(|| format!("no ontology named {ontology} in this item"))?;
                let t = self
                    .concept(target)
                    .ok_or_else(|| format!("no concept named {target} in this item"))?;
                let d = self
                    .concept(definition)
                    .ok_or_else(|| format!("no concept named {definition} in this item"))?;
                let v = verify_dl_definition(d, o, t, &to_signature(sigma), bounds);
                let detail = format!(
                    "{}; no countermodel up to {} worlds and {} elements",
                    verdict_detail(&v),
                    bounds.left_worlds,
                    bounds.left_elems
                );
                Ok((!v.is_no(), detail))
            }
            GalleryFact::DlAxiomLoadBearing { ontology, axiom, target, definition, bounds } => {
                let o = self
                    .ontology(ontology)
                    .ok_or_else(|| format!("no ontology named {ontology} in this item"))?;
                let t = self
                    .concept(target)
                    .ok_or_else(|| format!("no concept named {target} in this item"))?;
                let d = self
                    .concept(definition)
                    .ok_or_else(|| format!("no concept named {definition} in this item"))?;
                if *axiom >= o.axioms.len() {
                    return Err(format!("axiom index {axiom} out of range"));
                }
                let mut reduced = o.clone();
                reduced.axioms.remove(*axiom);
                let fwd = entails_bounded(&reduced, t, d, bounds);
                if fwd.is_no() {
                    return Ok((true, "countermodel to the definition leg".into()));
                }
                let bwd = entails_bounded(&reduced, d, t, bounds);
                if bwd.is_no() {
                    return Ok((true, "countermodel to the converse leg".into()));
                }
                Ok((false, format!("both legs still hold ({}, {})", fwd.outcome.as_str(), bwd.outcome.as_str())))
            }
        }
    }
}

fn to_signature(names: &[String]) -> Signature {
    names.iter().cloned().collect::<BTreeSet<String>>()
}

fn verdict_detail(v: &Verdict) -> String {
    format!("outcome {}", v.outcome.as_str())
}

/// Key for comparing concepts up to normalization and up to associativity and
/// commutativity of conjunction: normalize first (which rewrites disjunction
/// and the boxed/universal duals into the core connectives), then flatten
/// conjunction trees and sort the conjuncts.
fn canonical(c: &Concept) -> String {
    fn go(c: &Concept, out: &mut String) {
        match c {
            Concept::And(a, b) => {
                let mut parts = Vec::new();
                collect_conjuncts(a, &mut parts);
                collect_conjuncts(b, &mut parts);
                let mut keys: Vec<String> = parts
                    .into_iter()
                    .map(|p| {
                        let mut s = String::new();
                        go(p, &mut s);
                        s
                    })
                    .collect();
                keys.sort();
                out.push_str("(and");
                for k in keys {
                    out.push(' ');
                    out.push_str(&k);
                }
                out.push(')');
            }
            Concept::Not(a) => {
                out.push_str("(not ");
                go(a, out);
                out.push(')');
            }
            Concept::SomeRole(r, a) => {
                out.push_str("(some ");
                out.push_str(r);
                out.push(' ');
                go(a, out);
                out.push(')');
            }
            Concept::AllRole(r, a) => {
                out.push_str("(all ");
                out.push_str(r);
                out.push(' ');
                go(a, out);
                out.push(')');
            }
            Concept::SomeU(a) => {
                out.push_str("(someU ");
                go(a, out);
                out.push(')');
            }
            Concept::AllU(a) => {
                out.push_str("(allU ");
                go(a, out);
                out.push(')');
            }
            Concept::Diamond(a) => {
                out.push_str("(dia ");
                go(a, out);
                out.push(')');
            }
            Concept::Box(a) => {
                out.push_str("(box ");
                go(a, out);
                out.push(')');
            }
            Concept::Or(a, b) => {
                out.push_str("(or ");
                go(a, out);
                out.push(' ');
                go(b, out);
                out.push(')');
            }
            Concept::Top => out.push_str("top"),
            Concept::Name(n) => out.push_str(n),
        }
    }
    fn collect_conjuncts<'a>(c: &'a Concept, out: &mut Vec<&'a Concept>) {
        if let Concept::And(a, b) = c {
            collect_conjuncts(a, out);
            collect_conjuncts(b, out);
        } else {
            out.push(c);
        }
    }
    let mut s = String::new();
    go(&c.clone().normalize(), &mut s);
    s
}

/// Failure to build a gallery item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GalleryError {
    UnknownName { name: String },
}

impl fmt::Display for GalleryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GalleryError::UnknownName { name } => {
                write!(f, "unknown gallery item `{name}`; known items: {}", gallery_names().join(", "))
            }
        }
    }
}

impl std::error::Error for GalleryError {}

/// Names accepted by [`gallery_build`].
pub fn gallery_names() -> Vec<&'static str> {
    vec!["fine", "marx_areces", "kr_kb", "example9", "ex6", "exK", "ex8b"]
}

/// Build every item in the corpus.
pub fn gallery_all() -> Vec<GalleryItem> {
    gallery_names().into_iter().map(|n| gallery_build(n).expect("listed names build")).collect()
}

/// Build one worked example by name.
pub fn gallery_build(name: &str) -> Result<GalleryItem, GalleryError> {
    match name {
        "fine" => Ok(fine()),
        "marx_areces" => Ok(marx_areces()),
        "kr_kb" => Ok(kr_kb()),
        "example9" => Ok(example9()),
        "ex6" => Ok(ex6()),
        "exK" => Ok(ex_k()),
        "ex8b" => Ok(ex8b()),
        _ => Err(GalleryError::UnknownName { name: name.to_string() }),
    }
}

fn fml(text: &str) -> Formula {
    parse(text).expect("gallery formulas parse")
}

fn con(text: &str) -> Concept {
    parse_concept(text).expect("gallery concepts parse")
}

fn strs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// An S5 model from a list of `(atom, world, element)` triples.
fn s5_with(n_worlds: usize, n_elems: usize, atoms: &[(&str, usize, usize)]) -> KripkeModel {
    let mut m = KripkeModel::s5(n_worlds, n_elems);
    for &(p, w, d) in atoms {
        m.set_atom(p, w, d);
    }
    m
}

/// Mark `p` true at every element of world `w` — the shape proposition-style
/// atoms take in these models.
fn set_proposition(m: &mut KripkeModel, p: &str, w: usize) {
    for d in 0..m.n_elems() {
        m.set_atom(p, w, d);
    }
}

/// The representative-election knowledge base: two dispositions about who may
/// stay in power, with `rep` behaving as a proposition.
fn fine() -> GalleryItem {
    let kb = fml(
        "(rep -> <>A(inPower -> [](rep -> ~inPower))) \
         & (~rep -> []E(inPower & [](~rep -> inPower)))",
    );
    let rep = fml("rep");

    // two worlds and two elements: power alternates along the diagonal and
    // rep holds exactly in the first world
    let mut m = s5_with(2, 2, &[("inPower", 0, 0), ("inPower", 1, 1)]);
    set_proposition(&mut m, "rep", 0);

    // three worlds and three elements: every world grants power to two
    // elements, every element is in power twice, rep fails only at the first
    // world, and each world shares an empowered element with the first
    let mut mp = s5_with(
        3,
        3,
        &[
            ("inPower", 0, 0),
            ("inPower", 1, 0),
            ("inPower", 1, 1),
            ("inPower", 2, 1),
            ("inPower", 0, 2),
            ("inPower", 2, 2),
        ],
    );
    set_proposition(&mut mp, "rep", 1);
    set_proposition(&mut mp, "rep", 2);

    GalleryItem {
        name: "fine".into(),
        description: "the knowledge base whose rep atom has no explicit definition over {inPower}: \
                      the two pictured models satisfy it while disagreeing on rep at bisimilar points"
            .into(),
        formulas: vec![("kb".into(), kb), ("rep".into(), rep)],
        models: vec![
            NamedModel { name: "M".into(), model: m, point: (0, 0) },
            NamedModel { name: "Mprime".into(), model: mp, point: (0, 0) },
        ],
        facts: vec![
            GalleryFact::Holds { model: "M".into(), world: 0, elem: 0, formula: "kb".into(), expected: true },
            GalleryFact::Holds { model: "M".into(), world: 0, elem: 0, formula: "rep".into(), expected: true },
            GalleryFact::Holds { model: "Mprime".into(), world: 0, elem: 0, formula: "kb".into(), expected: true },
            GalleryFact::Holds { model: "Mprime".into(), world: 0, elem: 0, formula: "rep".into(), expected: false },
            GalleryFact::S5Related {
                left: "M".into(),
                left_point: (0, 0),
                right: "Mprime".into(),
                right_point: (0, 0),
                sigma: strs(&["inPower"]),
                expected: true,
            },
            GalleryFact::EdepS5 {
                phi: "kb".into(),
                target: "rep".into(),
                sigma: strs(&["inPower"]),
                bounds: SearchBounds::pair(2, 2, 3, 3),
                expected: Outcome::No,
            },
        ],
        ..Default::default()
    }
}

/// The valid implication with no one-variable interpolant: a three-stage
/// pigeonhole on the left, a two-colour escape on the right, shared only
/// through the marker atom `e`.
fn marx_areces() -> GalleryItem {
    let phi = fml(
        "p0 & <>E(p1 & <>E p2) & []A((e <-> p0 | p1 | p2) \
         & (p0 -> ~p1) & (p0 -> ~p2) & (p1 -> ~p0) \
         & (p1 -> ~p2) & (p2 -> ~p0) & (p2 -> ~p1) \
         & (p0 -> [](e -> p0) & A(e -> p0)) \
         & (p1 -> [](e -> p1) & A(e -> p1)) \
         & (p2 -> [](e -> p2) & A(e -> p2)))",
    );
    let psi = fml(
        "[]A(e <-> b0 | b1) -> \
         <>E(b0 & <>(~e & E b0)) | <>E(b1 & <>(~e & E b1))",
    );
    let implication = phi.clone().implies(psi.clone());

    let m1 = s5_with(
        3,
        3,
        &[("e", 0, 0), ("p0", 0, 0), ("e", 1, 1), ("p1", 1, 1), ("e", 2, 2), ("p2", 2, 2)],
    );
    let m2 = s5_with(2, 2, &[("e", 0, 0), ("b0", 0, 0), ("e", 1, 1), ("b1", 1, 1)]);

    GalleryItem {
        name: "marx_areces".into(),
        description: "a valid implication whose left and right sides share only the atom e and \
                      admit no interpolant: the 3x3 diagonal and the 2x2 diagonal are {e}-bisimilar"
            .into(),
        formulas: vec![
            ("phi".into(), phi),
            ("psi".into(), psi),
            ("implication".into(), implication),
        ],
        models: vec![
            NamedModel { name: "M1".into(), model: m1, point: (0, 0) },
            NamedModel { name: "M2".into(), model: m2, point: (0, 0) },
        ],
        facts: vec![
            GalleryFact::Holds { model: "M1".into(), world: 0, elem: 0, formula: "phi".into(), expected: true },
            GalleryFact::Holds { model: "M2".into(), world: 0, elem: 0, formula: "psi".into(), expected: false },
            GalleryFact::S5Related {
                left: "M1".into(),
                left_point: (0, 0),
                right: "M2".into(),
                right_point: (0, 0),
                sigma: strs(&["e"]),
                expected: true,
            },
            GalleryFact::IepS5 {
                left: "phi".into(),
                right: "psi".into(),
                bounds: SearchBounds::pair(3, 3, 2, 2),
                expected: Outcome::No,
            },
            GalleryFact::NoCountermodel {
                formula: "implication".into(),
                logic: ModelKind::Q1S5,
                bounds: SearchBounds::uniform(3, 3),
            },
        ],
        ..Default::default()
    }
}

/// The standpoint presentation of the research-landscape knowledge base: two
/// schools of thought with diverging views on what the field is.
pub const KR_STANDPOINT_TEXT: &str = "\
standpoints: S1 S2

# the two schools cover every precisification
box[~S1 & ~S2] Top <= ~Top

box[*] KR | Databases | Verification <= CS & some uses.Logic
box[*] CS & some uses.Logic <= KR | Databases | Verification
box[*] Databases | Verification <= ~some historicAreaOf.AI

box[S1] KR <= CS & some areaOf.AI & some uses.Logic
box[S1] CS & some areaOf.AI & some uses.Logic <= KR

box[S2] KR <= some historicAreaOf.AI
box[S2] some areaOf.AI <= ~some uses.Logic
";

/// The research-landscape knowledge base and the explicit definition of KR it
/// entails over the school-neutral part of the vocabulary.
fn kr_kb() -> GalleryItem {
    let mut k = Ontology::default();
    let mut push = |c: &str, d: &str| {
        k.push_boxed(con(c), con(d));
    };
    push("Top", "S1 | S2");
    push("KR | Databases | Verification", "CS & some uses.Logic");
    push("CS & some uses.Logic", "KR | Databases | Verification");
    push("Databases | Verification", "~some historicAreaOf.AI");
    push("S1 & KR", "CS & some areaOf.AI & some uses.Logic");
    push("S1 & CS & some areaOf.AI & some uses.Logic", "KR");
    push("S2 & KR", "some historicAreaOf.AI");
    push("S2 & some areaOf.AI", "~some uses.Logic");

    let sigma = strs(&["CS", "Logic", "AI", "uses", "areaOf", "historicAreaOf"]);
    let bounds = SearchBounds::pair(2, 4, 2, 4);

    GalleryItem {
        name: "kr_kb".into(),
        description: "two standpoints with diverging views of KR whose encoded knowledge base \
                      still defines KR explicitly, without the standpoint names or KR itself"
            .into(),
        concepts: vec![
            ("KR".into(), con("KR")),
            (
                "definition".into(),
                con("CS & some uses.Logic & (some areaOf.AI | some historicAreaOf.AI)"),
            ),
        ],
        ontologies: vec![("K".into(), k)],
        texts: vec![("standpoints".into(), KR_STANDPOINT_TEXT.to_string())],
        facts: vec![
            GalleryFact::EncodesOntology { text: "standpoints".into(), ontology: "K".into() },
            GalleryFact::DlDefinitionHolds {
                ontology: "K".into(),
                target: "KR".into(),
                definition: "definition".into(),
                sigma: sigma.clone(),
                bounds,
            },
            GalleryFact::DlAxiomLoadBearing {
                ontology: "K".into(),
                axiom: 0,
                target: "KR".into(),
                definition: "definition".into(),
                bounds,
            },
        ],
        ..Default::default()
    }
}

/// A conservative extension that stops being one after adding a tautology
/// over a fresh proposition.
fn example9() -> GalleryItem {
    let phi = fml("rep & <>A(inPower -> [](rep -> ~inPower))");
    let psi = fml("[]A(<>inPower & <>~inPower & E inPower & E ~inPower)");
    let psi_prime = fml("[]A(<>inPower & <>~inPower & E inPower & E ~inPower) & (p | ~p)");
    let chi = fml("~(p & []E(inPower & [](p -> inPower)))");
    // rep and p behave as propositions, so the entailment fact carries the
    // world-constancy of both as explicit premises
    let conventions = fml("[](A rep | A ~rep) & [](A p | A ~p)");
    let goal = conventions.and(phi.clone()).and(psi_prime.clone()).implies(chi.clone());

    let mut m = s5_with(2, 2, &[("inPower", 0, 0), ("inPower", 1, 1)]);
    set_proposition(&mut m, "rep", 0);

    // the larger representative model with the fresh proposition pinned to
    // the first world: here psi' holds but chi fails
    let mut mp = s5_with(
        3,
        3,
        &[
            ("inPower", 0, 0),
            ("inPower", 1, 0),
            ("inPower", 1, 1),
            ("inPower", 2, 1),
            ("inPower", 0, 2),
            ("inPower", 2, 2),
        ],
    );
    set_proposition(&mut mp, "rep", 1);
    set_proposition(&mut mp, "rep", 2);
    set_proposition(&mut mp, "p", 0);

    GalleryItem {
        name: "example9".into(),
        description: "phi & psi conservatively extends psi, but adding the tautology p | ~p \
                      breaks conservativity: chi over {inPower, p} separates the two"
            .into(),
        formulas: vec![
            ("phi".into(), phi),
            ("psi".into(), psi),
            ("psi_prime".into(), psi_prime),
            ("chi".into(), chi),
            ("goal".into(), goal),
        ],
        models: vec![
            NamedModel { name: "M".into(), model: m, point: (0, 0) },
            NamedModel { name: "MprimeP".into(), model: mp, point: (0, 0) },
        ],
        facts: vec![
            GalleryFact::Holds { model: "M".into(), world: 0, elem: 0, formula: "phi".into(), expected: true },
            GalleryFact::Holds { model: "M".into(), world: 0, elem: 0, formula: "psi".into(), expected: true },
            GalleryFact::SignatureWithin { formula: "chi".into(), sigma: strs(&["inPower", "p"]) },
            GalleryFact::Holds {
                model: "MprimeP".into(),
                world: 0,
                elem: 0,
                formula: "psi_prime".into(),
                expected: true,
            },
            GalleryFact::Holds {
                model: "MprimeP".into(),
                world: 0,
                elem: 0,
                formula: "chi".into(),
                expected: false,
            },
            GalleryFact::NoCountermodel {
                formula: "goal".into(),
                logic: ModelKind::Q1S5,
                bounds: SearchBounds::uniform(3, 3),
            },
        ],
        ..Default::default()
    }
}

/// Nesting step of the ladder chain: `chain(0)` is verum and
/// `chain(r+1) = p1 ∧ ∃(p2 ∧ ◇chain(r))`.
pub fn ex6_chain(r: usize) -> Formula {
    let mut chi = Formula::Top;
    for _ in 0..r {
        chi = fml("p1").and(fml("p2").and(chi.diamond()).exists());
    }
    chi
}

/// The r-rung ladder: `r` worlds and `r` elements, the start atom at (0,0),
/// and the two rung atoms climbing one diagonal each — `p1` at (k, k-1) and
/// `p2` at (k, k) for 0 < k < r. Its start point reaches `chain(r')` for
/// every r' < r but not `chain(r)`.
pub fn ex6_model(r: usize) -> KripkeModel {
    assert!(r >= 1, "the ladder needs at least one world");
    let mut m = KripkeModel::s5(r, r);
    m.set_atom("a", 0, 0);
    for k in 1..r {
        m.set_atom("p1", k, k - 1);
        m.set_atom("p2", k, k);
    }
    m
}

/// The ladder family showing that `a ∧ phi0` has no uniform interpolant over
/// {a, p1, p2}: it entails every `◇chain(r)`, but the r-rung ladder refutes
/// `◇chain(r)` while satisfying all shorter chains.
fn ex6() -> GalleryItem {
    let phi0 = fml(
        "[]A(a -> <>(p1 & b)) & []A(p1 & b -> E(p2 & b)) & []A(p2 & b -> <>(p1 & b))",
    );
    let goal = fml("a").and(phi0.clone());
    let entail1 = goal.clone().implies(ex6_chain(1).diamond());
    let entail2 = goal.clone().implies(ex6_chain(2).diamond());

    GalleryItem {
        name: "ex6".into(),
        description: "the ladder family behind undecidability of uniform interpolant existence: \
                      a & phi0 entails every diamond-chain, yet ladder r refutes chain r"
            .into(),
        formulas: vec![
            ("phi0".into(), phi0),
            ("goal".into(), goal),
            ("diamond_chain2".into(), ex6_chain(2).diamond()),
            ("diamond_chain3".into(), ex6_chain(3).diamond()),
            ("entails_chain1".into(), entail1),
            ("entails_chain2".into(), entail2),
        ],
        models: vec![NamedModel { name: "M3".into(), model: ex6_model(3), point: (0, 0) }],
        facts: vec![
            GalleryFact::Holds {
                model: "M3".into(),
                world: 0,
                elem: 0,
                formula: "diamond_chain2".into(),
                expected: true,
            },
            GalleryFact::Holds {
                model: "M3".into(),
                world: 0,
                elem: 0,
                formula: "diamond_chain3".into(),
                expected: false,
            },
            GalleryFact::NoCountermodel {
                formula: "entails_chain1".into(),
                logic: ModelKind::Q1S5,
                bounds: SearchBounds::uniform(2, 2),
            },
            GalleryFact::NoCountermodel {
                formula: "entails_chain2".into(),
                logic: ModelKind::Q1S5,
                bounds: SearchBounds::uniform(2, 2),
            },
        ],
        ..Default::default()
    }
}

/// The depth-one/depth-two gap for the K logic: the two pictured trees are
/// 1-bisimilar over {a, b} but not 2-bisimilar, and they separate the
/// depth-one bisimulation quantifier from the valid implication.
fn ex_k() -> GalleryItem {
    let phi = fml(
        "A((a <-> b) & (b <-> h) & (h <-> []h) & ([]h <-> <>h)) & <>A(b <-> h)",
    );
    let psi = fml(
        "A((a <-> [][]a) & ([][]a <-> <><>a)) & []<>Top -> <>A(b <-> <>a)",
    );
    let implication = phi.clone().implies(psi.clone());

    // root w with two leaf worlds; the distinguished element carries a,b,h at
    // the root and h in both leaves, while b splits across the leaves
    let mut m = KripkeModel::k(3, 2, &[(0, 1), (0, 2)]);
    for p in ["a", "b", "h"] {
        m.set_atom(p, 0, 1);
    }
    m.set_atom("b", 1, 0);
    m.set_atom("h", 1, 1);
    m.set_atom("b", 2, 1);
    m.set_atom("h", 2, 1);

    // two-step chains: the distinguished element sees a again only at depth
    // two, and b never lines up with a diamond-a point
    let mut mp = KripkeModel::k(5, 3, &[(0, 1), (0, 2), (1, 3), (2, 4)]);
    mp.set_atom("a", 0, 2);
    mp.set_atom("b", 0, 2);
    mp.set_atom("b", 1, 1);
    mp.set_atom("b", 2, 0);
    mp.set_atom("b", 2, 2);
    mp.set_atom("a", 3, 2);
    mp.set_atom("a", 4, 2);

    GalleryItem {
        name: "exK".into(),
        description: "a valid K implication whose sides are 1-bisimilar over {a,b} at the pictured \
                      points but not 2-bisimilar: depth-bounded quantifiers cannot be reused \
                      across depths"
            .into(),
        formulas: vec![
            ("phi".into(), phi),
            ("psi".into(), psi),
            ("implication".into(), implication),
        ],
        models: vec![
            NamedModel { name: "M".into(), model: m, point: (0, 1) },
            NamedModel { name: "Mprime".into(), model: mp, point: (0, 2) },
        ],
        facts: vec![
            GalleryFact::Holds { model: "M".into(), world: 0, elem: 1, formula: "phi".into(), expected: true },
            GalleryFact::Holds {
                model: "Mprime".into(),
                world: 0,
                elem: 2,
                formula: "psi".into(),
                expected: false,
            },
            GalleryFact::KRelated {
                left: "M".into(),
                right: "Mprime".into(),
                sigma: strs(&["a", "b"]),
                depth: 2,
                level: 1,
                expected: true,
            },
            GalleryFact::KRelated {
                left: "M".into(),
                right: "Mprime".into(),
                sigma: strs(&["a", "b"]),
                depth: 2,
                level: 2,
                expected: false,
            },
            GalleryFact::NoCountermodel {
                formula: "implication".into(),
                logic: ModelKind::Q1K,
                bounds: SearchBounds { left_worlds: 7, left_elems: 3, right_worlds: 7, right_elems: 3, depth: 2, branch: 2 },
            },
        ],
        ..Default::default()
    }
}

/// Domain points versus domain bisimilarity: two elements that agree on every
/// diamond-form in play while a diamond-exists formula separates them.
fn ex8b() -> GalleryItem {
    let probe = fml("<>(a & E ~a)");

    let m1 = s5_with(3, 2, &[("a", 0, 0), ("a", 1, 0), ("a", 1, 1)]);
    let m2 = s5_with(
        3,
        2,
        &[("a", 0, 0), ("a", 1, 0), ("a", 1, 1), ("p", 0, 1), ("p", 2, 0), ("p", 2, 1)],
    );

    GalleryItem {
        name: "ex8b".into(),
        description: "non-bisimilar elements with the same domain profile: the probe formula \
                      separates d from d' inside each model, while across the models d matches e \
                      and d' matches e' over {a}"
            .into(),
        formulas: vec![("probe".into(), probe)],
        models: vec![
            NamedModel { name: "M1".into(), model: m1, point: (0, 0) },
            NamedModel { name: "M2".into(), model: m2, point: (0, 0) },
        ],
        facts: vec![
            GalleryFact::Holds { model: "M1".into(), world: 0, elem: 0, formula: "probe".into(), expected: true },
            GalleryFact::Holds { model: "M1".into(), world: 0, elem: 1, formula: "probe".into(), expected: false },
            GalleryFact::Holds { model: "M2".into(), world: 0, elem: 0, formula: "probe".into(), expected: true },
            GalleryFact::Holds { model: "M2".into(), world: 0, elem: 1, formula: "probe".into(), expected: false },
            GalleryFact::S5Related {
                left: "M1".into(),
                left_point: (0, 0),
                right: "M2".into(),
                right_point: (0, 0),
                sigma: strs(&["a"]),
                expected: true,
            },
            GalleryFact::S5Related {
                left: "M1".into(),
                left_point: (0, 1),
                right: "M2".into(),
                right_point: (0, 1),
                sigma: strs(&["a"]),
                expected: true,
            },
            GalleryFact::S5Related {
                left: "M1".into(),
                left_point: (0, 0),
                right: "M1".into(),
                right_point: (0, 1),
                sigma: strs(&["a"]),
                expected: false,
            },
        ],
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_item_passes(name: &str) {
        let item = gallery_build(name).unwrap();
        assert_eq!(item.name, name);
        assert!(!item.facts.is_empty());
        for report in item.check() {
            assert!(report.pass, "{name}: {} — {}", report.label, report.detail);
        }
    }

    #[test]
    fn unknown_names_are_rejected_with_the_known_list() {
        let err = gallery_build("fortress").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("fortress") && msg.contains("marx_areces"), "{msg}");
    }

    #[test]
    fn every_listed_name_builds() {
        for item in gallery_all() {
            assert!(gallery_names().contains(&item.name.as_str()));
        }
    }

    #[test]
    fn chain_zero_is_verum_and_the_recurrence_nests() {
        assert_eq!(ex6_chain(0), Formula::Top);
        assert_eq!(ex6_chain(1), fml("p1 & E(p2 & <>Top)"));
        let three = ex6_chain(3);
        let by_hand = fml("p1").and(fml("p2").and(ex6_chain(2).diamond()).exists());
        assert_eq!(three, by_hand);
    }

    #[test]
    fn ladders_put_the_rungs_on_the_two_diagonals() {
        let m = ex6_model(4);
        assert_eq!((m.n_worlds(), m.n_elems()), (4, 4));
        assert!(m.atom_holds("a", 0, 0));
        for k in 1..4 {
            assert!(m.atom_holds("p1", k, k - 1));
            assert!(m.atom_holds("p2", k, k));
            assert!(!m.atom_holds("p1", k, k));
        }
    }

    #[test]
    fn fine_facts_pass() {
        assert_item_passes("fine");
    }

    #[test]
    fn marx_areces_facts_pass() {
        assert_item_passes("marx_areces");
    }

    #[test]
    fn kr_kb_facts_pass() {
        assert_item_passes("kr_kb");
    }

    #[test]
    fn example9_facts_pass() {
        assert_item_passes("example9");
    }

    #[test]
    fn ex6_facts_pass() {
        assert_item_passes("ex6");
    }

    #[test]
    fn exk_facts_pass() {
        assert_item_passes("exK");
    }

    #[test]
    fn ex8b_facts_pass() {
        assert_item_passes("ex8b");
    }

    #[test]
    fn reports_render_to_json_with_labels() {
        let item = gallery_build("ex8b").unwrap();
        let reports = item.check();
        let v = reports[0].to_json();
        assert_eq!(v["pass"], Value::Bool(true));
        assert!(v["label"].as_str().unwrap().contains("probe"));
    }
}
