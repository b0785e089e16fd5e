//! Constant-domain Kripke models. A model carries a finite world list, a
//! finite domain, a valuation (one world×element grid per predicate) and,
//! in the `Q1K` case, an accessibility relation; `Q1S5` models keep the
//! relation implicit (every world sees every world) and never serialize it.

use crate::formula::{Formula, Signature};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// A world/element pair, by dense index.
pub type Point = (usize, usize);

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ModelKind {
    Q1S5,
    Q1K,
}

/// Dense boolean grid; used for valuations (worlds × elements) and truth
/// tables produced by evaluation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
    bits: Vec<bool>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize) -> Grid {
        Grid { rows, cols, bits: vec![false; rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, value: bool) -> Grid {
        Grid { rows, cols, bits: vec![value; rows * cols] }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.bits[r * self.cols + c] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn iter_true(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (i / cols, i % cols))
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct KripkeModel {
    pub kind: ModelKind,
    pub worlds: Vec<String>,
    pub domain: Vec<String>,
    /// Successor lists; for `Q1S5` every world lists all worlds.
    pub succ: Vec<Vec<usize>>,
    pub val: BTreeMap<String, Grid>,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("point ({0}, {1}) outside the model")]
    PointOutOfRange(usize, usize),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("a q1s5 model must not list \"R\"")]
    UnexpectedR,
    #[error("a q1k model requires \"R\"")]
    MissingR,
    #[error("unknown model kind {0:?}")]
    UnknownKind(String),
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
}

impl KripkeModel {
    /// Fresh S5 model with synthesized ids `w0..`, `d0..` and empty valuation.
    pub fn s5(n_worlds: usize, n_elems: usize) -> KripkeModel {
        let succ = (0..n_worlds).map(|_| (0..n_worlds).collect()).collect();
        KripkeModel {
            kind: ModelKind::Q1S5,
            worlds: (0..n_worlds).map(|i| format!("w{i}")).collect(),
            domain: (0..n_elems).map(|i| format!("d{i}")).collect(),
            succ,
            val: BTreeMap::new(),
        }
    }

    /// Fresh K model with the given accessibility edges.
    pub fn k(n_worlds: usize, n_elems: usize, edges: &[(usize, usize)]) -> KripkeModel {
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n_worlds];
        for &(u, v) in edges {
            succ[u].push(v);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        KripkeModel {
            kind: ModelKind::Q1K,
            worlds: (0..n_worlds).map(|i| format!("w{i}")).collect(),
            domain: (0..n_elems).map(|i| format!("d{i}")).collect(),
            succ,
            val: BTreeMap::new(),
        }
    }

    pub fn n_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn n_elems(&self) -> usize {
        self.domain.len()
    }

    /// Make `p` true at `(w, d)`, creating the grid on first use.
    pub fn set_atom(&mut self, p: &str, w: usize, d: usize) {
        let (rows, cols) = (self.worlds.len(), self.domain.len());
        self.val
            .entry(p.to_string())
            .or_insert_with(|| Grid::new(rows, cols))
            .set(w, d, true);
    }

    pub fn atom_holds(&self, p: &str, w: usize, d: usize) -> bool {
        self.val.get(p).map(|g| g.get(w, d)).unwrap_or(false)
    }

    pub fn world_index(&self, name: &str) -> Result<usize, ModelError> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    pub fn elem_index(&self, name: &str) -> Result<usize, ModelError> {
        self.domain
            .iter()
            .position(|d| d == name)
            .ok_or_else(|| ModelError::UnknownElement(name.to_string()))
    }

    /// Accessibility edges as pairs (empty successor lists contribute none).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, vs) in self.succ.iter().enumerate() {
            for &v in vs {
                out.push((u, v));
            }
        }
        out
    }

    /// The literal sigma-type of a point: the bitmask over `sigma` (in
    /// lexicographic order) of atoms true there.
    pub fn literal_type(&self, sigma: &Signature, w: usize, d: usize) -> u64 {
        assert!(sigma.len() <= 64, "literal types are packed into u64");
        let mut mask = 0u64;
        for (i, p) in sigma.iter().enumerate() {
            if self.atom_holds(p, w, d) {
                mask |= 1 << i;
            }
        }
        mask
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Truth-grid evaluator with per-subformula memoization. Inputs are
/// normalized internally, so any formula may be passed.
pub struct Evaluator<'m> {
    model: &'m KripkeModel,
    cache: HashMap<Formula, Grid>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m KripkeModel) -> Self {
        Evaluator { model, cache: HashMap::new() }
    }

    /// Truth grid of `phi` over all points of the model.
    pub fn eval(&mut self, phi: &Formula) -> Grid {
        let n = phi.normalize();
        self.eval_norm(&n)
    }

    fn eval_norm(&mut self, phi: &Formula) -> Grid {
        if let Some(g) = self.cache.get(phi) {
            return g.clone();
        }
        let (w, d) = (self.model.n_worlds(), self.model.n_elems());
        let grid = match phi {
            Formula::Top => Grid::filled(w, d, true),
            Formula::Atom(p) => self
                .model
                .val
                .get(p)
                .cloned()
                .unwrap_or_else(|| Grid::new(w, d)),
            Formula::Not(f) => {
                let g = self.eval_norm(f);
                let mut out = Grid::new(w, d);
                for r in 0..w {
                    for c in 0..d {
                        out.set(r, c, !g.get(r, c));
                    }
                }
                out
            }
            Formula::And(a, b) => {
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
            Formula::Exists(f) => {
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
            Formula::Diamond(f) => {
                let g = self.eval_norm(f);
                let mut out = Grid::new(w, d);
                for r in 0..w {
                    for c in 0..d {
                        let any = self.model.succ[r].iter().any(|&v| g.get(v, c));
                        out.set(r, c, any);
                    }
                }
                out
            }
            other => unreachable!("non-core connective after normalization: {other:?}"),
        };
        self.cache.insert(phi.clone(), grid.clone());
        grid
    }
}

/// Truth of `phi` at a single point; absent predicates are false everywhere,
/// points outside the model are an error.
pub fn model_check(model: &KripkeModel, w: usize, d: usize, phi: &Formula) -> Result<bool, ModelError> {
    if w >= model.n_worlds() || d >= model.n_elems() {
        return Err(ModelError::PointOutOfRange(w, d));
    }
    Ok(Evaluator::new(model).eval(phi).get(w, d))
}

/// Variant addressing the point by world/element ids.
pub fn model_check_named(
    model: &KripkeModel,
    world: &str,
    elem: &str,
    phi: &Formula,
) -> Result<bool, ModelError> {
    let w = model.world_index(world)?;
    let d = model.elem_index(elem)?;
    model_check(model, w, d, phi)
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ModelFile {
    kind: String,
    worlds: Vec<String>,
    domain: Vec<String>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none", default)]
    r: Option<Vec<(String, String)>>,
    val: BTreeMap<String, Vec<(String, String)>>,
}

impl KripkeModel {
    pub fn to_json(&self) -> serde_json::Value {
        let r = match self.kind {
            ModelKind::Q1S5 => None,
            ModelKind::Q1K => Some(
                self.edges()
                    .into_iter()
                    .map(|(u, v)| (self.worlds[u].clone(), self.worlds[v].clone()))
                    .collect(),
            ),
        };
        let val = self
            .val
            .iter()
            .map(|(p, grid)| {
                let pairs = grid
                    .iter_true()
                    .map(|(w, d)| (self.worlds[w].clone(), self.domain[d].clone()))
                    .collect();
                (p.clone(), pairs)
            })
            .collect();
        let file = ModelFile {
            kind: match self.kind {
                ModelKind::Q1S5 => "q1s5".to_string(),
                ModelKind::Q1K => "q1k".to_string(),
            },
            worlds: self.worlds.clone(),
            domain: self.domain.clone(),
            r,
            val,
        };
        serde_json::to_value(file).expect("model serialization cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("model serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<KripkeModel, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    pub fn from_json(value: serde_json::Value) -> Result<KripkeModel, ModelError> {
        let file: ModelFile = serde_json::from_value(value)?;
        Self::from_file(file)
    }

    fn from_file(file: ModelFile) -> Result<KripkeModel, ModelError> {
        let kind = match file.kind.as_str() {
            "q1s5" => ModelKind::Q1S5,
            "q1k" => ModelKind::Q1K,
            other => return Err(ModelError::UnknownKind(other.to_string())),
        };
        for (i, w) in file.worlds.iter().enumerate() {
            if file.worlds[..i].contains(w) {
                return Err(ModelError::DuplicateId(w.clone()));
            }
        }
        for (i, d) in file.domain.iter().enumerate() {
            if file.domain[..i].contains(d) {
                return Err(ModelError::DuplicateId(d.clone()));
            }
        }
        let widx = |name: &str| -> Result<usize, ModelError> {
            file.worlds
                .iter()
                .position(|w| w == name)
                .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
        };
        let didx = |name: &str| -> Result<usize, ModelError> {
            file.domain
                .iter()
                .position(|d| d == name)
                .ok_or_else(|| ModelError::UnknownElement(name.to_string()))
        };
        let succ = match (kind, &file.r) {
            (ModelKind::Q1S5, None) => {
                (0..file.worlds.len()).map(|_| (0..file.worlds.len()).collect()).collect()
            }
            (ModelKind::Q1S5, Some(_)) => return Err(ModelError::UnexpectedR),
            (ModelKind::Q1K, None) => return Err(ModelError::MissingR),
            (ModelKind::Q1K, Some(pairs)) => {
                let mut succ: Vec<Vec<usize>> = vec![Vec::new(); file.worlds.len()];
                for (u, v) in pairs {
                    succ[widx(u)?].push(widx(v)?);
                }
                for s in &mut succ {
                    s.sort_unstable();
                    s.dedup();
                }
                succ
            }
        };
        let mut val = BTreeMap::new();
        for (p, pairs) in &file.val {
            let mut grid = Grid::new(file.worlds.len(), file.domain.len());
            for (w, d) in pairs {
                grid.set(widx(w)?, didx(d)?, true);
            }
            val.insert(p.clone(), grid);
        }
        Ok(KripkeModel { kind, worlds: file.worlds, domain: file.domain, succ, val })
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, depth: usize, out: &mut Vec<Vec<usize>>) {
        if depth == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur[depth] = i;
                rec(n, cur, used, depth + 1, out);
                used[i] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, 0, &mut out);
    out
}

/// Exhaustive stream of models of exactly the given size over `sigma`, in a
/// fixed deterministic order (the accessibility relation varies fastest,
/// then the valuation as a binary counter over (predicate, world, element)
/// bits). With `prune` set, only models whose encoding is lexicographically
/// minimal within their world/element-permutation orbit are emitted; exactly
/// one representative per orbit survives.
pub struct EnumModels {
    sigma: Vec<String>,
    n_worlds: usize,
    n_elems: usize,
    kind: ModelKind,
    prune: bool,
    // state: r bits (fastest) then val bits, little-endian odometer
    bits: Vec<bool>,
    n_r_bits: usize,
    done: bool,
}

pub fn enumerate_models(
    sigma: &Signature,
    n_worlds: usize,
    n_elems: usize,
    kind: ModelKind,
    prune: bool,
) -> EnumModels {
    assert!(n_worlds >= 1 && n_elems >= 1, "models need at least one world and element");
    let n_r_bits = match kind {
        ModelKind::Q1S5 => 0,
        ModelKind::Q1K => n_worlds * n_worlds,
    };
    let n_val_bits = sigma.len() * n_worlds * n_elems;
    EnumModels {
        sigma: sigma.iter().cloned().collect(),
        n_worlds,
        n_elems,
        kind,
        prune,
        bits: vec![false; n_r_bits + n_val_bits],
        n_r_bits,
        done: false,
    }
}

impl EnumModels {
    fn build(&self) -> KripkeModel {
        let mut model = match self.kind {
            ModelKind::Q1S5 => KripkeModel::s5(self.n_worlds, self.n_elems),
            ModelKind::Q1K => {
                let mut edges = Vec::new();
                for u in 0..self.n_worlds {
                    for v in 0..self.n_worlds {
                        if self.bits[u * self.n_worlds + v] {
                            edges.push((u, v));
                        }
                    }
                }
                KripkeModel::k(self.n_worlds, self.n_elems, &edges)
            }
        };
        for (pi, p) in self.sigma.iter().enumerate() {
            for w in 0..self.n_worlds {
                for d in 0..self.n_elems {
                    let bit = self.n_r_bits + (pi * self.n_worlds + w) * self.n_elems + d;
                    if self.bits[bit] {
                        model.set_atom(p, w, d);
                    }
                }
            }
        }
        model
    }

    /// Encoding of the model obtained by relabeling worlds with `pw` and
    /// elements with `pd` (entry `i` says where index `i` moves to).
    fn permuted_encoding(&self, pw: &[usize], pd: &[usize]) -> Vec<bool> {
        let mut out = vec![false; self.bits.len()];
        for u in 0..self.n_worlds {
            for v in 0..self.n_worlds {
                if self.n_r_bits > 0 && self.bits[u * self.n_worlds + v] {
                    out[pw[u] * self.n_worlds + pw[v]] = true;
                }
            }
        }
        for pi in 0..self.sigma.len() {
            for w in 0..self.n_worlds {
                for d in 0..self.n_elems {
                    let src = self.n_r_bits + (pi * self.n_worlds + w) * self.n_elems + d;
                    if self.bits[src] {
                        let dst = self.n_r_bits + (pi * self.n_worlds + pw[w]) * self.n_elems + pd[d];
                        out[dst] = true;
                    }
                }
            }
        }
        out
    }

    fn is_canonical(&self) -> bool {
        let wperms = permutations(self.n_worlds);
        let dperms = permutations(self.n_elems);
        for pw in &wperms {
            for pd in &dperms {
                if self.permuted_encoding(pw, pd) < self.bits {
                    return false;
                }
            }
        }
        true
    }

    fn advance(&mut self) {
        for b in self.bits.iter_mut() {
            if *b {
                *b = false;
            } else {
                *b = true;
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for EnumModels {
    type Item = KripkeModel;

    fn next(&mut self) -> Option<KripkeModel> {
        loop {
            if self.done {
                return None;
            }
            let keep = !self.prune || self.is_canonical();
            let model = if keep { Some(self.build()) } else { None };
            self.advance();
            if let Some(m) = model {
                return Some(m);
            }
        }
    }
}

/// Union of the exact-size streams for every size `1..=max_worlds` times
/// `1..=max_elems`, smaller sizes first.
pub fn enumerate_models_up_to(
    sigma: &Signature,
    max_worlds: usize,
    max_elems: usize,
    kind: ModelKind,
    prune: bool,
) -> impl Iterator<Item = KripkeModel> + '_ {
    let sigma = sigma.clone();
    (1..=max_worlds).flat_map(move |w| {
        let sigma = sigma.clone();
        (1..=max_elems).flat_map(move |d| enumerate_models(&sigma, w, d, kind, prune))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, parse};

    fn sig(names: &[&str]) -> Signature {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn evaluation_on_a_two_world_model() {
        let mut m = KripkeModel::s5(2, 2);
        m.set_atom("p", 0, 0);
        m.set_atom("p", 1, 1);
        // E p holds everywhere (each world has a p-element)
        assert!(model_check(&m, 0, 1, &parse("E p").unwrap()).unwrap());
        // A p fails everywhere
        assert!(!model_check(&m, 0, 0, &parse("A p").unwrap()).unwrap());
        // <>p holds at every point: element 0 has p at world 0, element 1 at world 1
        assert!(model_check(&m, 1, 0, &parse("<>p").unwrap()).unwrap());
        // []p fails for element 0 (not p at world 1)
        assert!(!model_check(&m, 0, 0, &parse("[]p").unwrap()).unwrap());
        // absent predicate is false
        assert!(!model_check(&m, 0, 0, &atom("q")).unwrap());
    }

    #[test]
    fn k_models_use_the_listed_edges_only() {
        let mut m = KripkeModel::k(2, 1, &[(0, 1)]);
        m.set_atom("p", 1, 0);
        assert!(model_check(&m, 0, 0, &parse("<>p").unwrap()).unwrap());
        // world 1 has no successors: []false holds there
        assert!(model_check(&m, 1, 0, &parse("[]false").unwrap()).unwrap());
        assert!(!model_check(&m, 1, 0, &parse("<>true").unwrap()).unwrap());
    }

    #[test]
    fn out_of_range_point_is_an_error() {
        let m = KripkeModel::s5(1, 1);
        assert!(matches!(
            model_check(&m, 0, 3, &Formula::Top),
            Err(ModelError::PointOutOfRange(0, 3))
        ));
    }

    #[test]
    fn json_roundtrip_s5() {
        let mut m = KripkeModel::s5(2, 2);
        m.set_atom("p", 0, 1);
        m.set_atom("q", 1, 0);
        let text = m.to_json_string();
        assert!(!text.contains("\"R\""));
        let back = KripkeModel::from_json_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn json_roundtrip_k() {
        let mut m = KripkeModel::k(3, 1, &[(0, 1), (0, 2), (2, 2)]);
        m.set_atom("p", 2, 0);
        let text = m.to_json_string();
        let back = KripkeModel::from_json_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn kind_and_r_must_agree() {
        let s5_with_r = r#"{"kind":"q1s5","worlds":["w"],"domain":["d"],"R":[["w","w"]],"val":{}}"#;
        assert!(matches!(KripkeModel::from_json_str(s5_with_r), Err(ModelError::UnexpectedR)));
        let k_without_r = r#"{"kind":"q1k","worlds":["w"],"domain":["d"],"val":{}}"#;
        assert!(matches!(KripkeModel::from_json_str(k_without_r), Err(ModelError::MissingR)));
    }

    #[test]
    fn dangling_ids_are_rejected() {
        let bad = r#"{"kind":"q1s5","worlds":["w"],"domain":["d"],"val":{"p":[["w","e"]]}}"#;
        assert!(matches!(KripkeModel::from_json_str(bad), Err(ModelError::UnknownElement(_))));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_models(&sig(&["p"]), 1, 1, ModelKind::Q1S5, false).count(), 2);
        assert_eq!(enumerate_models(&sig(&["p"]), 1, 2, ModelKind::Q1S5, false).count(), 4);
        assert_eq!(enumerate_models(&sig(&["p"]), 1, 2, ModelKind::Q1S5, true).count(), 3);
        assert_eq!(enumerate_models(&sig(&[]), 2, 1, ModelKind::Q1K, false).count(), 16);
    }

    #[test]
    fn pruning_keeps_one_representative_per_orbit() {
        for (w, d, kind) in [(2, 2, ModelKind::Q1S5), (2, 1, ModelKind::Q1K), (1, 2, ModelKind::Q1K)] {
            let full: Vec<KripkeModel> = enumerate_models(&sig(&["p"]), w, d, kind, false).collect();
            let pruned: Vec<KripkeModel> = enumerate_models(&sig(&["p"]), w, d, kind, true).collect();
            // every model is the relabeling of some surviving representative
            let wperms = permutations(w);
            let dperms = permutations(d);
            for m in &full {
                let mut covered = false;
                'outer: for rep in &pruned {
                    for pw in &wperms {
                        for pd in &dperms {
                            if relabel(rep, pw, pd) == *m {
                                covered = true;
                                break 'outer;
                            }
                        }
                    }
                }
                assert!(covered, "orbit lost a representative");
            }
            // and no two representatives share an orbit
            for (i, a) in pruned.iter().enumerate() {
                for b in pruned.iter().skip(i + 1) {
                    for pw in &wperms {
                        for pd in &dperms {
                            assert_ne!(relabel(a, pw, pd), *b, "orbit kept two representatives");
                        }
                    }
                }
            }
        }
    }

    fn relabel(m: &KripkeModel, pw: &[usize], pd: &[usize]) -> KripkeModel {
        let edges: Vec<(usize, usize)> =
            m.edges().into_iter().map(|(u, v)| (pw[u], pw[v])).collect();
        let mut out = match m.kind {
            ModelKind::Q1S5 => KripkeModel::s5(m.n_worlds(), m.n_elems()),
            ModelKind::Q1K => KripkeModel::k(m.n_worlds(), m.n_elems(), &edges),
        };
        for (p, grid) in &m.val {
            for (w, d) in grid.iter_true() {
                out.set_atom(p, pw[w], pd[d]);
            }
        }
        out
    }

    #[test]
    fn size_union_orders_smaller_first() {
        let all: Vec<KripkeModel> =
            enumerate_models_up_to(&sig(&[]), 2, 2, ModelKind::Q1S5, false).collect();
        assert_eq!(all.len(), 4);
        assert_eq!((all[0].n_worlds(), all[0].n_elems()), (1, 1));
        assert_eq!((all[3].n_worlds(), all[3].n_elems()), (2, 2));
    }

    #[test]
    fn literal_types_pack_in_signature_order() {
        let mut m = KripkeModel::s5(1, 1);
        m.set_atom("b", 0, 0);
        let s = sig(&["a", "b"]);
        assert_eq!(m.literal_type(&s, 0, 0), 0b10);
    }
}
