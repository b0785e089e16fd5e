//! Bounded DL model search.
//!
//! Same engine as [`crate::search`], lifted to two kinds of bits: one per
//! (concept name, world, element) and one per (role name, world, element,
//! element) edge. The target concept is evaluated in strong Kleene fashion
//! over the partial valuation, branching follows a suggested undetermined
//! bit, and once the target is definitely true the remaining bits are
//! enumerated exhaustively — so the stream visits every DL model of the
//! target at the given size exactly once. The world dimension is total S5;
//! the distinguished point is `(0, 0)`.

use super::concept::{ontology_to_concept, Concept, Ontology};
use super::model::{dl_model_check, DlModel, DlPoint};
use crate::formula::Signature;
use std::ops::ControlFlow;

#[derive(Copy, Clone, Debug)]
enum Node {
    Top,
    Name(usize),
    Not(usize),
    And(usize, usize),
    SomeRole(usize, usize),
    SomeU(usize),
    Diamond(usize),
}

/// A concept compiled to a DAG over explicit concept-name and role lists.
pub struct CompiledConcept {
    nodes: Vec<Node>,
    root: usize,
    names: Vec<String>,
    roles: Vec<String>,
}

impl CompiledConcept {
    /// Compile `c` (normalized internally). `names` and `roles` must cover
    /// the signature of `c`; extra symbols become free bits of the search.
    pub fn new(c: &Concept, names: &Signature, roles: &Signature) -> CompiledConcept {
        let names: Vec<String> = names.iter().cloned().collect();
        let roles: Vec<String> = roles.iter().cloned().collect();
        assert!(
            c.concept_names().iter().all(|a| names.contains(a)),
            "concept-name list must cover the target"
        );
        assert!(
            c.role_names().iter().all(|r| roles.contains(r)),
            "role list must cover the target"
        );
        let mut nodes = Vec::new();
        let mut index = std::collections::HashMap::new();
        let root = Self::build(&c.normalize(), &names, &roles, &mut nodes, &mut index);
        CompiledConcept { nodes, root, names, roles }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn build(
        c: &Concept,
        names: &[String],
        roles: &[String],
        nodes: &mut Vec<Node>,
        index: &mut std::collections::HashMap<Concept, usize>,
    ) -> usize {
        if let Some(&i) = index.get(c) {
            return i;
        }
        let node = match c {
            Concept::Top => Node::Top,
            Concept::Name(a) => Node::Name(names.iter().position(|b| b == a).unwrap()),
            Concept::Not(f) => Node::Not(Self::build(f, names, roles, nodes, index)),
            Concept::And(a, b) => {
                let ia = Self::build(a, names, roles, nodes, index);
                let ib = Self::build(b, names, roles, nodes, index);
                Node::And(ia, ib)
            }
            Concept::SomeRole(r, f) => {
                let ri = roles.iter().position(|s| s == r).unwrap();
                Node::SomeRole(ri, Self::build(f, names, roles, nodes, index))
            }
            Concept::SomeU(f) => Node::SomeU(Self::build(f, names, roles, nodes, index)),
            Concept::Diamond(f) => Node::Diamond(Self::build(f, names, roles, nodes, index)),
            other => unreachable!("non-core constructor after normalization: {other:?}"),
        };
        nodes.push(node);
        let id = nodes.len() - 1;
        index.insert(c.clone(), id);
        id
    }
}

struct DlSearcher<'a> {
    compiled: &'a CompiledConcept,
    n_worlds: usize,
    n_elems: usize,
    /// concept bits first, then role-edge bits
    bits: Vec<Option<bool>>,
    role_offset: usize,
    memo_val: Vec<Option<bool>>,
    memo_sugg: Vec<Option<usize>>,
    memo_stamp: Vec<u32>,
    stamp: u32,
}

impl<'a> DlSearcher<'a> {
    fn new(compiled: &'a CompiledConcept, n_worlds: usize, n_elems: usize) -> Self {
        let role_offset = compiled.names.len() * n_worlds * n_elems;
        let n_bits = role_offset + compiled.roles.len() * n_worlds * n_elems * n_elems;
        let n_memo = compiled.nodes.len() * n_worlds * n_elems;
        DlSearcher {
            compiled,
            n_worlds,
            n_elems,
            bits: vec![None; n_bits],
            role_offset,
            memo_val: vec![None; n_memo],
            memo_sugg: vec![None; n_memo],
            memo_stamp: vec![0; n_memo],
            stamp: 0,
        }
    }

    #[inline]
    fn name_bit(&self, name: usize, w: usize, d: usize) -> usize {
        (name * self.n_worlds + w) * self.n_elems + d
    }

    #[inline]
    fn edge_bit(&self, role: usize, w: usize, d: usize, e: usize) -> usize {
        self.role_offset + (((role * self.n_worlds + w) * self.n_elems) + d) * self.n_elems + e
    }

    /// Strong Kleene evaluation plus a branching suggestion, as in the
    /// formula searcher; a role restriction can suggest either an edge bit or
    /// a bit inside its child concept.
    fn eval(&mut self, node: usize, w: usize, d: usize) -> (Option<bool>, Option<usize>) {
        let midx = (node * self.n_worlds + w) * self.n_elems + d;
        if self.memo_stamp[midx] == self.stamp {
            return (self.memo_val[midx], self.memo_sugg[midx]);
        }
        let result = match self.compiled.nodes[node] {
            Node::Top => (Some(true), None),
            Node::Name(p) => {
                let b = self.name_bit(p, w, d);
                match self.bits[b] {
                    Some(v) => (Some(v), None),
                    None => (None, Some(b)),
                }
            }
            Node::Not(f) => {
                let (v, s) = self.eval(f, w, d);
                (v.map(|b| !b), s)
            }
            Node::And(a, b) => {
                let (va, sa) = self.eval(a, w, d);
                if va == Some(false) {
                    (Some(false), None)
                } else {
                    let (vb, sb) = self.eval(b, w, d);
                    if vb == Some(false) {
                        (Some(false), None)
                    } else if va == Some(true) && vb == Some(true) {
                        (Some(true), None)
                    } else {
                        (None, if va.is_none() { sa } else { sb })
                    }
                }
            }
            Node::SomeRole(r, f) => {
                let mut sugg = None;
                let mut unknown = false;
                let mut value = Some(false);
                for e in 0..self.n_elems {
                    let eb = self.edge_bit(r, w, d, e);
                    if self.bits[eb] == Some(false) {
                        continue;
                    }
                    let (v, s) = self.eval(f, w, e);
                    match (self.bits[eb], v) {
                        (Some(true), Some(true)) => {
                            value = Some(true);
                            break;
                        }
                        (Some(true), Some(false)) => {}
                        (None, Some(false)) => {}
                        _ => {
                            if !unknown {
                                unknown = true;
                                sugg = if self.bits[eb].is_none() { Some(eb) } else { s };
                            }
                        }
                    }
                }
                if value == Some(true) {
                    (Some(true), None)
                } else if unknown {
                    (None, sugg)
                } else {
                    (Some(false), None)
                }
            }
            Node::SomeU(f) => {
                let mut sugg = None;
                let mut unknown = false;
                let mut value = Some(false);
                for e in 0..self.n_elems {
                    let (v, s) = self.eval(f, w, e);
                    match v {
                        Some(true) => {
                            value = Some(true);
                            break;
                        }
                        Some(false) => {}
                        None => {
                            if !unknown {
                                unknown = true;
                                sugg = s;
                            }
                        }
                    }
                }
                if value == Some(true) {
                    (Some(true), None)
                } else if unknown {
                    (None, sugg)
                } else {
                    (Some(false), None)
                }
            }
            Node::Diamond(f) => {
                let mut sugg = None;
                let mut unknown = false;
                let mut value = Some(false);
                for v_world in 0..self.n_worlds {
                    let (v, s) = self.eval(f, v_world, d);
                    match v {
                        Some(true) => {
                            value = Some(true);
                            break;
                        }
                        Some(false) => {}
                        None => {
                            if !unknown {
                                unknown = true;
                                sugg = s;
                            }
                        }
                    }
                }
                if value == Some(true) {
                    (Some(true), None)
                } else if unknown {
                    (None, sugg)
                } else {
                    (Some(false), None)
                }
            }
        };
        self.memo_stamp[midx] = self.stamp;
        self.memo_val[midx] = result.0;
        self.memo_sugg[midx] = result.1;
        result
    }

    fn build(&self) -> DlModel {
        let mut model = DlModel::new(self.n_worlds, self.n_elems);
        for (pi, p) in self.compiled.names.iter().enumerate() {
            for w in 0..self.n_worlds {
                for d in 0..self.n_elems {
                    if self.bits[self.name_bit(pi, w, d)] == Some(true) {
                        model.set_concept(p, w, d);
                    }
                }
            }
        }
        for (ri, r) in self.compiled.roles.iter().enumerate() {
            for w in 0..self.n_worlds {
                for d in 0..self.n_elems {
                    for e in 0..self.n_elems {
                        if self.bits[self.edge_bit(ri, w, d, e)] == Some(true) {
                            model.set_role(r, w, d, e);
                        }
                    }
                }
            }
        }
        model
    }

    fn dfs(&mut self, visit: &mut dyn FnMut(&DlModel) -> ControlFlow<()>) -> ControlFlow<()> {
        self.stamp = self.stamp.wrapping_add(1);
        let (value, sugg) = self.eval(self.compiled.root, 0, 0);
        match value {
            Some(false) => ControlFlow::Continue(()),
            Some(true) => self.enumerate_completions(0, visit),
            None => {
                let bit = sugg.expect("an unknown value always carries a suggestion");
                for v in [false, true] {
                    self.bits[bit] = Some(v);
                    self.dfs(visit)?;
                }
                self.bits[bit] = None;
                ControlFlow::Continue(())
            }
        }
    }

    fn enumerate_completions(
        &mut self,
        from: usize,
        visit: &mut dyn FnMut(&DlModel) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        match self.bits[from..].iter().position(|b| b.is_none()) {
            None => visit(&self.build()),
            Some(off) => {
                let i = from + off;
                for v in [false, true] {
                    self.bits[i] = Some(v);
                    self.enumerate_completions(i + 1, visit)?;
                }
                self.bits[i] = None;
                ControlFlow::Continue(())
            }
        }
    }
}

/// Stream every DL model of `c` over the given symbol lists at a fixed size,
/// distinguished point `(0, 0)`.
pub fn for_each_dl_model(
    c: &Concept,
    names: &Signature,
    roles: &Signature,
    n_worlds: usize,
    n_elems: usize,
    visit: &mut dyn FnMut(&DlModel) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let compiled = CompiledConcept::new(c, names, roles);
    let mut searcher = DlSearcher::new(&compiled, n_worlds, n_elems);
    searcher.dfs(visit)
}

/// Stream every DL model of `c` of size up to `(max_worlds, max_elems)`,
/// smaller sizes first.
pub fn for_each_dl_model_up_to(
    c: &Concept,
    names: &Signature,
    roles: &Signature,
    max_worlds: usize,
    max_elems: usize,
    visit: &mut dyn FnMut(&DlModel) -> ControlFlow<()>,
) -> ControlFlow<()> {
    for w in 1..=max_worlds {
        for d in 1..=max_elems {
            for_each_dl_model(c, names, roles, w, d, visit)?;
        }
    }
    ControlFlow::Continue(())
}

/// First DL model of `c` within the bounds, if any; the point is `(0, 0)`.
pub fn find_dl_model(c: &Concept, max_worlds: usize, max_elems: usize) -> Option<(DlModel, DlPoint)> {
    let mut found = None;
    let _ = for_each_dl_model_up_to(
        c,
        &c.concept_names(),
        &c.role_names(),
        max_worlds,
        max_elems,
        &mut |m| {
            found = Some((m.clone(), (0, 0)));
            ControlFlow::Break(())
        },
    );
    found
}

/// Search for a countermodel to `O ⊨ C ⊑ D`: a model with a world (fixed to
/// world 0 by symmetry) where every axiom of `O` holds yet some element
/// satisfies `C ⊓ ¬D`. Returns the model and that element's point.
pub fn find_ontology_countermodel(
    o: &Ontology,
    c: &Concept,
    d: &Concept,
    max_worlds: usize,
    max_elems: usize,
) -> Option<(DlModel, DlPoint)> {
    let target = ontology_to_concept(o).and(c.clone().and(d.clone().not()).some_u());
    let (model, _) = find_dl_model(&target, max_worlds, max_elems)?;
    let point = (0..model.n_elems())
        .find(|&e| dl_model_check(&model, 0, e, &c.clone().and(d.clone().not())).unwrap())
        .expect("the universal witness exists in a model of the target");
    Some((model, (0, point)))
}
