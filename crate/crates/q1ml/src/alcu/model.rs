//! Two-dimensional DL models: a finite world list, a constant domain, a
//! world×element grid per concept name and a per-world element×element grid
//! per role name. The world dimension behaves like total S5 and is never
//! serialized as a relation; the universal role is implicit.

use super::concept::{Concept, Ontology};
use crate::formula::Signature;
use crate::kripke::{Grid, KripkeModel, ModelKind, Point};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, PartialEq, Debug)]
pub struct DlModel {
    pub worlds: Vec<String>,
    pub domain: Vec<String>,
    /// concept name → worlds×elements grid
    pub val: BTreeMap<String, Grid>,
    /// role name → one elements×elements grid per world
    pub roles: BTreeMap<String, Vec<Grid>>,
}

#[derive(Debug, thiserror::Error)]
pub enum DlError {
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("point ({0}, {1}) outside the model")]
    PointOutOfRange(usize, usize),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("the universal role is implicit and cannot be listed")]
    ExplicitUniversalRole,
    #[error("unknown model kind {0:?}")]
    UnknownKind(String),
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
}

impl DlModel {
    /// Fresh model with synthesized ids `w0..`, `d0..`, empty valuation and
    /// no role edges.
    pub fn new(n_worlds: usize, n_elems: usize) -> DlModel {
        DlModel {
            worlds: (0..n_worlds).map(|i| format!("w{i}")).collect(),
            domain: (0..n_elems).map(|i| format!("d{i}")).collect(),
            val: BTreeMap::new(),
            roles: BTreeMap::new(),
        }
    }

    pub fn n_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn n_elems(&self) -> usize {
        self.domain.len()
    }

    pub fn set_concept(&mut self, a: &str, w: usize, d: usize) {
        let (rows, cols) = (self.worlds.len(), self.domain.len());
        self.val.entry(a.to_string()).or_insert_with(|| Grid::new(rows, cols)).set(w, d, true);
    }

    pub fn concept_holds(&self, a: &str, w: usize, d: usize) -> bool {
        self.val.get(a).map(|g| g.get(w, d)).unwrap_or(false)
    }

    pub fn set_role(&mut self, r: &str, w: usize, d: usize, e: usize) {
        let (n_worlds, n_elems) = (self.worlds.len(), self.domain.len());
        self.roles
            .entry(r.to_string())
            .or_insert_with(|| vec![Grid::new(n_elems, n_elems); n_worlds])[w]
            .set(d, e, true);
    }

    pub fn role_holds(&self, r: &str, w: usize, d: usize, e: usize) -> bool {
        self.roles.get(r).map(|gs| gs[w].get(d, e)).unwrap_or(false)
    }

    pub fn world_index(&self, name: &str) -> Result<usize, DlError> {
        self.worlds.iter().position(|w| w == name).ok_or_else(|| DlError::UnknownWorld(name.to_string()))
    }

    pub fn elem_index(&self, name: &str) -> Result<usize, DlError> {
        self.domain
            .iter()
            .position(|d| d == name)
            .ok_or_else(|| DlError::UnknownElement(name.to_string()))
    }

    /// The literal σ-type of a point: the bitmask over the concept names of
    /// `sigma` (in lexicographic order) true there. Role names in `sigma`
    /// have no grid and contribute nothing.
    pub fn literal_type(&self, sigma: &Signature, w: usize, d: usize) -> u64 {
        assert!(sigma.len() <= 64, "literal types are packed into u64 bitmasks");
        let mut mask = 0u64;
        for (i, a) in sigma.iter().enumerate() {
            if self.concept_holds(a, w, d) {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// View a role-free constant-domain S5 model as a DL model.
    pub fn from_kripke(m: &KripkeModel) -> DlModel {
        assert_eq!(m.kind, ModelKind::Q1S5, "only S5 models embed into the DL side");
        DlModel {
            worlds: m.worlds.clone(),
            domain: m.domain.clone(),
            val: m.val.clone(),
            roles: BTreeMap::new(),
        }
    }

    /// The converse view; meaningful when no role has any edge (role grids
    /// are dropped).
    pub fn to_kripke(&self) -> KripkeModel {
        let n = self.worlds.len();
        KripkeModel {
            kind: ModelKind::Q1S5,
            worlds: self.worlds.clone(),
            domain: self.domain.clone(),
            succ: (0..n).map(|_| (0..n).collect()).collect(),
            val: self.val.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Model checking
// ---------------------------------------------------------------------------

struct Evaluator<'a> {
    model: &'a DlModel,
    cache: HashMap<Concept, Grid>,
}

impl<'a> Evaluator<'a> {
    fn new(model: &'a DlModel) -> Self {
        Evaluator { model, cache: HashMap::new() }
    }

    fn eval(&mut self, c: &Concept) -> Grid {
        self.eval_norm(&c.normalize())
    }

    fn eval_norm(&mut self, c: &Concept) -> Grid {
        if let Some(g) = self.cache.get(c) {
            return g.clone();
        }
        let (w, d) = (self.model.n_worlds(), self.model.n_elems());
        let grid = match c {
            Concept::Top => Grid::filled(w, d, true),
            Concept::Name(a) => match self.model.val.get(a) {
                Some(g) => g.clone(),
                None => Grid::new(w, d),
            },
            Concept::Not(f) => {
                let g = self.eval_norm(f);
                let mut out = Grid::new(w, d);
                for r in 0..w {
                    for c in 0..d {
                        out.set(r, c, !g.get(r, c));
                    }
                }
                out
            }
            Concept::And(a, b) => {
                let ga = self.eval_norm(a);
                let gb = self.eval_norm(b);
                let mut out = Grid::new(w, d);
                for r in 0..w {
                    for c in 0..d {
                        out.set(r, c, ga.get(r, c) && gb.get(r, c));
                    }
                }
                out
            }
            Concept::SomeU(f) => {
                let g = self.eval_norm(f);
                let mut out = Grid::new(w, d);
                for r in 0..w {
                    let any = (0..d).any(|c| g.get(r, c));
                    for c in 0..d {
                        out.set(r, c, any);
                    }
                }
                out
            }
            Concept::Diamond(f) => {
                let g = self.eval_norm(f);
                let mut out = Grid::new(w, d);
                for c in 0..d {
                    let any = (0..w).any(|r| g.get(r, c));
                    for r in 0..w {
                        out.set(r, c, any);
                    }
                }
                out
            }
            Concept::SomeRole(role, f) => {
                let g = self.eval_norm(f);
                let mut out = Grid::new(w, d);
                if let Some(grids) = self.model.roles.get(role) {
                    for r in 0..w {
                        for c in 0..d {
                            let any = (0..d).any(|e| grids[r].get(c, e) && g.get(r, e));
                            out.set(r, c, any);
                        }
                    }
                }
                out
            }
            other => unreachable!("non-core constructor after normalization: {other:?}"),
        };
        self.cache.insert(c.clone(), grid.clone());
        grid
    }
}

/// Truth of `c` at a single point; absent concept names are empty, absent
/// roles have no edges.
pub fn dl_model_check(model: &DlModel, w: usize, d: usize, c: &Concept) -> Result<bool, DlError> {
    if w >= model.n_worlds() || d >= model.n_elems() {
        return Err(DlError::PointOutOfRange(w, d));
    }
    Ok(Evaluator::new(model).eval(c).get(w, d))
}

pub fn dl_model_check_named(
    model: &DlModel,
    world: &str,
    elem: &str,
    c: &Concept,
) -> Result<bool, DlError> {
    let w = model.world_index(world)?;
    let d = model.elem_index(elem)?;
    dl_model_check(model, w, d, c)
}

/// All axioms of `o` hold at world `w` (each read locally, over the whole
/// domain at `w`).
pub fn axioms_hold_at(model: &DlModel, w: usize, o: &Ontology) -> Result<bool, DlError> {
    let mut ev = Evaluator::new(model);
    for (c, d) in &o.axioms {
        let gc = ev.eval(c);
        let gd = ev.eval(d);
        for e in 0..model.n_elems() {
            if gc.get(w, e) && !gd.get(w, e) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `C <= D` holds at world `w` of the model.
pub fn inclusion_holds_at(
    model: &DlModel,
    w: usize,
    c: &Concept,
    d: &Concept,
) -> Result<bool, DlError> {
    let mut ev = Evaluator::new(model);
    let gc = ev.eval(c);
    let gd = ev.eval(d);
    Ok((0..model.n_elems()).all(|e| !gc.get(w, e) || gd.get(w, e)))
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DlModelFile {
    kind: String,
    worlds: Vec<String>,
    domain: Vec<String>,
    val: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    roles: BTreeMap<String, BTreeMap<String, Vec<(String, String)>>>,
}

impl DlModel {
    pub fn to_json(&self) -> serde_json::Value {
        let val = self
            .val
            .iter()
            .map(|(a, grid)| {
                let pairs = grid
                    .iter_true()
                    .map(|(w, d)| (self.worlds[w].clone(), self.domain[d].clone()))
                    .collect();
                (a.clone(), pairs)
            })
            .collect();
        let roles = self
            .roles
            .iter()
            .map(|(r, grids)| {
                let by_world = grids
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| g.count() > 0)
                    .map(|(w, g)| {
                        let pairs = g
                            .iter_true()
                            .map(|(d, e)| (self.domain[d].clone(), self.domain[e].clone()))
                            .collect();
                        (self.worlds[w].clone(), pairs)
                    })
                    .collect();
                (r.clone(), by_world)
            })
            .collect();
        let file = DlModelFile {
            kind: "s5alcu".to_string(),
            worlds: self.worlds.clone(),
            domain: self.domain.clone(),
            val,
            roles,
        };
        serde_json::to_value(file).expect("model serialization cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("model serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<DlModel, DlError> {
        let file: DlModelFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    pub fn from_json(value: serde_json::Value) -> Result<DlModel, DlError> {
        let file: DlModelFile = serde_json::from_value(value)?;
        Self::from_file(file)
    }

    fn from_file(file: DlModelFile) -> Result<DlModel, DlError> {
        if file.kind != "s5alcu" {
            return Err(DlError::UnknownKind(file.kind));
        }
        for (i, w) in file.worlds.iter().enumerate() {
            if file.worlds[..i].contains(w) {
                return Err(DlError::DuplicateId(w.clone()));
            }
        }
        for (i, d) in file.domain.iter().enumerate() {
            if file.domain[..i].contains(d) {
                return Err(DlError::DuplicateId(d.clone()));
            }
        }
        let mut model = DlModel {
            worlds: file.worlds,
            domain: file.domain,
            val: BTreeMap::new(),
            roles: BTreeMap::new(),
        };
        for (a, pairs) in &file.val {
            let mut grid = Grid::new(model.worlds.len(), model.domain.len());
            for (w, d) in pairs {
                grid.set(model.world_index(w)?, model.elem_index(d)?, true);
            }
            model.val.insert(a.clone(), grid);
        }
        for (r, by_world) in &file.roles {
            if r == super::concept::UNIVERSAL_ROLE {
                return Err(DlError::ExplicitUniversalRole);
            }
            let n = model.domain.len();
            let mut grids = vec![Grid::new(n, n); model.worlds.len()];
            for (w, pairs) in by_world {
                let wi = model.world_index(w)?;
                for (d, e) in pairs {
                    grids[wi].set(model.elem_index(d)?, model.elem_index(e)?, true);
                }
            }
            model.roles.insert(r.clone(), grids);
        }
        Ok(model)
    }
}

/// The distinguished point used by searches and witnesses.
pub type DlPoint = Point;

#[cfg(test)]
mod tests {
    use super::super::concept::{bottom, cname, parse_concept, Concept, Ontology};
    use super::*;

    fn two_world_model() -> DlModel {
        // w0: A = {d0}, r-edge d0→d1, B = {d1}; w1: everything empty
        let mut m = DlModel::new(2, 2);
        m.set_concept("A", 0, 0);
        m.set_concept("B", 0, 1);
        m.set_role("r", 0, 0, 1);
        m
    }

    #[test]
    fn role_restrictions_look_inside_the_current_world() {
        let m = two_world_model();
        let c = parse_concept("some r.B").unwrap();
        assert!(dl_model_check(&m, 0, 0, &c).unwrap());
        assert!(!dl_model_check(&m, 0, 1, &c).unwrap());
        assert!(!dl_model_check(&m, 1, 0, &c).unwrap(), "no r-edges at w1");
    }

    #[test]
    fn diamond_ranges_over_all_worlds() {
        let m = two_world_model();
        let c = parse_concept("<>A").unwrap();
        assert!(dl_model_check(&m, 1, 0, &c).unwrap());
        assert!(!dl_model_check(&m, 1, 1, &c).unwrap());
    }

    #[test]
    fn universal_role_ranges_over_the_domain() {
        let m = two_world_model();
        assert!(dl_model_check(&m, 0, 1, &parse_concept("some U.A").unwrap()).unwrap());
        assert!(!dl_model_check(&m, 1, 0, &parse_concept("some U.A").unwrap()).unwrap());
        assert!(dl_model_check(&m, 1, 0, &parse_concept("all U.~A").unwrap()).unwrap());
    }

    #[test]
    fn evaluation_agrees_with_pointwise_definitions() {
        let m = two_world_model();
        for (text, w, d, expected) in [
            ("A & ~B", 0, 0, true),
            ("all r.B", 0, 0, true),
            ("all r.B", 0, 1, true), // no successors
            ("some r.Top", 0, 1, false),
            ("[]~A | <>B", 1, 1, true),
            ("~Top", 0, 0, false),
        ] {
            let c = parse_concept(text).unwrap();
            assert_eq!(dl_model_check(&m, w, d, &c).unwrap(), expected, "{text} at ({w},{d})");
        }
        assert!(matches!(
            dl_model_check(&m, 5, 0, &Concept::Top),
            Err(DlError::PointOutOfRange(5, 0))
        ));
    }

    #[test]
    fn axioms_are_world_local() {
        let m = two_world_model();
        let o = Ontology::parse("A <= some r.B").unwrap();
        assert!(axioms_hold_at(&m, 0, &o).unwrap());
        assert!(axioms_hold_at(&m, 1, &o).unwrap(), "vacuously: A is empty at w1");
        let o2 = Ontology::parse("Top <= A").unwrap();
        assert!(!axioms_hold_at(&m, 0, &o2).unwrap());
        assert!(inclusion_holds_at(&m, 0, &cname("B"), &bottom().not()).unwrap());
    }

    #[test]
    fn json_round_trips_roles() {
        let m = two_world_model();
        let text = m.to_json_string();
        assert!(text.contains("\"s5alcu\""));
        let back = DlModel::from_json_str(&text).unwrap();
        assert_eq!(back, m);
        // a model without role edges serializes without a roles key
        let plain = DlModel::new(1, 1);
        assert!(!plain.to_json_string().contains("roles"));
    }

    #[test]
    fn kripke_embedding_preserves_truth() {
        let mut k = crate::kripke::KripkeModel::s5(2, 2);
        k.set_atom("p", 0, 0);
        k.set_atom("q", 1, 1);
        let m = DlModel::from_kripke(&k);
        let phi = crate::formula::parse("E p & <>q").unwrap();
        let c = super::super::concept::formula_to_concept(&phi);
        for w in 0..2 {
            for d in 0..2 {
                assert_eq!(
                    dl_model_check(&m, w, d, &c).unwrap(),
                    crate::kripke::model_check(&k, w, d, &phi).unwrap()
                );
            }
        }
        assert_eq!(m.to_kripke(), k);
    }
}
