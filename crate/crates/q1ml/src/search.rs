//! Bounded model search.
//!
//! The finder works on partial valuations: every (predicate, world, element)
//! bit is true, false or unset, the target formula is evaluated in strong
//! Kleene fashion, definitely-false branches are pruned, and branching always
//! follows a bit suggested by the evaluation (the first unset atom met on an
//! undetermined path), so irrelevant bits are never split on before they
//! matter. When the target becomes definitely true the remaining unset bits
//! are enumerated exhaustively, which makes the stream complete: every model
//! of the target at the given size is visited exactly once, in a fixed
//! deterministic order. The distinguished point is always `(0, 0)`; since
//! worlds and elements are interchangeable under relabeling this loses no
//! generality for satisfiability or witness search.

use crate::formula::{Formula, Signature};
use crate::kripke::{KripkeModel, Point};
use std::ops::ControlFlow;

/// World skeleton to search over: a total S5 block of `n` worlds, or a fixed
/// rooted tree given by its parent vector (`parents[i]` is the parent of
/// world `i + 1`; world 0 is the root).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WorldShape {
    S5(usize),
    Tree(Vec<usize>),
}

impl WorldShape {
    pub fn n_worlds(&self) -> usize {
        match self {
            WorldShape::S5(n) => *n,
            WorldShape::Tree(parents) => parents.len() + 1,
        }
    }

    /// Successor access without materializing the S5 clique (which would be
    /// quadratic in the world count, painful at completeness-bound sizes).
    fn succ_view(&self) -> SuccView {
        match self {
            WorldShape::S5(n) => SuccView::All(*n),
            WorldShape::Tree(parents) => {
                let mut succ = vec![Vec::new(); parents.len() + 1];
                for (i, &p) in parents.iter().enumerate() {
                    succ[p].push(i + 1);
                }
                SuccView::Lists(succ)
            }
        }
    }

    fn blank_model(&self, n_elems: usize) -> KripkeModel {
        match self {
            WorldShape::S5(n) => KripkeModel::s5(*n, n_elems),
            WorldShape::Tree(parents) => {
                let edges: Vec<(usize, usize)> =
                    parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
                KripkeModel::k(parents.len() + 1, n_elems, &edges)
            }
        }
    }
}

enum SuccView {
    All(usize),
    Lists(Vec<Vec<usize>>),
}

impl SuccView {
    fn count(&self, w: usize) -> usize {
        match self {
            SuccView::All(n) => *n,
            SuccView::Lists(succ) => succ[w].len(),
        }
    }

    fn nth(&self, w: usize, i: usize) -> usize {
        match self {
            SuccView::All(_) => i,
            SuccView::Lists(succ) => succ[w][i],
        }
    }
}

#[derive(Copy, Clone, Debug)]
enum Node {
    Top,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Exists(usize),
    Diamond(usize),
}

/// A formula compiled to a DAG over an explicit predicate list.
pub struct Compiled {
    nodes: Vec<Node>,
    root: usize,
    preds: Vec<String>,
}

impl Compiled {
    /// Compile `phi` (normalized internally). `preds` must cover the
    /// signature of `phi`; extra predicates become free bits of the search.
    pub fn new(phi: &Formula, preds: &Signature) -> Compiled {
        let preds: Vec<String> = preds.iter().cloned().collect();
        assert!(
            phi.signature().iter().all(|p| preds.contains(p)),
            "predicate list must cover the target formula"
        );
        let mut nodes = Vec::new();
        let mut index = std::collections::HashMap::new();
        let root = Self::build(&phi.normalize(), &preds, &mut nodes, &mut index);
        Compiled { nodes, root, preds }
    }

    /// Number of distinct compiled subterms (drives the memo-table size).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn build(
        phi: &Formula,
        preds: &[String],
        nodes: &mut Vec<Node>,
        index: &mut std::collections::HashMap<Formula, usize>,
    ) -> usize {
        if let Some(&i) = index.get(phi) {
            return i;
        }
        let node = match phi {
            Formula::Top => Node::Top,
            Formula::Atom(p) => Node::Atom(preds.iter().position(|q| q == p).unwrap()),
            Formula::Not(f) => Node::Not(Self::build(f, preds, nodes, index)),
            Formula::And(a, b) => {
                let ia = Self::build(a, preds, nodes, index);
                let ib = Self::build(b, preds, nodes, index);
                Node::And(ia, ib)
            }
            Formula::Exists(f) => Node::Exists(Self::build(f, preds, nodes, index)),
            Formula::Diamond(f) => Node::Diamond(Self::build(f, preds, nodes, index)),
            other => unreachable!("non-core connective after normalization: {other:?}"),
        };
        nodes.push(node);
        let id = nodes.len() - 1;
        index.insert(phi.clone(), id);
        id
    }
}

struct Searcher<'a> {
    compiled: &'a Compiled,
    succ: SuccView,
    n_worlds: usize,
    n_elems: usize,
    shape: &'a WorldShape,
    bits: Vec<Option<bool>>,
    memo_val: Vec<Option<bool>>,
    memo_sugg: Vec<Option<usize>>,
    memo_stamp: Vec<u32>,
    stamp: u32,
}

impl<'a> Searcher<'a> {
    fn new(compiled: &'a Compiled, shape: &'a WorldShape, n_elems: usize) -> Self {
        let n_worlds = shape.n_worlds();
        let n_bits = compiled.preds.len() * n_worlds * n_elems;
        let n_memo = compiled.nodes.len() * n_worlds * n_elems;
        Searcher {
            compiled,
            succ: shape.succ_view(),
            n_worlds,
            n_elems,
            shape,
            bits: vec![None; n_bits],
            memo_val: vec![None; n_memo],
            memo_sugg: vec![None; n_memo],
            memo_stamp: vec![0; n_memo],
            stamp: 0,
        }
    }

    #[inline]
    fn bit_index(&self, pred: usize, w: usize, d: usize) -> usize {
        (pred * self.n_worlds + w) * self.n_elems + d
    }

    /// Strong Kleene evaluation plus a branching suggestion: whenever the
    /// value is unknown, the suggestion is an unset bit on an undetermined
    /// path (so assigning it can change the value of this subterm).
    fn eval(&mut self, node: usize, w: usize, d: usize) -> (Option<bool>, Option<usize>) {
        let midx = (node * self.n_worlds + w) * self.n_elems + d;
        if self.memo_stamp[midx] == self.stamp {
            return (self.memo_val[midx], self.memo_sugg[midx]);
        }
        let result = match self.compiled.nodes[node] {
            Node::Top => (Some(true), None),
            Node::Atom(p) => {
                let b = self.bit_index(p, w, d);
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
            Node::Exists(f) => {
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
                for i in 0..self.succ.count(w) {
                    let v_world = self.succ.nth(w, i);
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

    fn build(&self) -> KripkeModel {
        let mut model = self.shape.blank_model(self.n_elems);
        for (pi, p) in self.compiled.preds.iter().enumerate() {
            for w in 0..self.n_worlds {
                for d in 0..self.n_elems {
                    if self.bits[self.bit_index(pi, w, d)] == Some(true) {
                        model.set_atom(p, w, d);
                    }
                }
            }
        }
        model
    }

    fn dfs(&mut self, visit: &mut dyn FnMut(&KripkeModel) -> ControlFlow<()>) -> ControlFlow<()> {
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
        visit: &mut dyn FnMut(&KripkeModel) -> ControlFlow<()>,
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

/// Stream every model of `phi` over `preds` with the given world shape and
/// domain size, distinguished point `(0, 0)`.
pub fn for_each_model(
    phi: &Formula,
    preds: &Signature,
    shape: &WorldShape,
    n_elems: usize,
    visit: &mut dyn FnMut(&KripkeModel) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let compiled = Compiled::new(phi, preds);
    let mut searcher = Searcher::new(&compiled, shape, n_elems);
    searcher.dfs(visit)
}

/// Stream every S5 model of `phi` of size up to `(max_worlds, max_elems)`,
/// smaller sizes first.
pub fn for_each_s5_model(
    phi: &Formula,
    preds: &Signature,
    max_worlds: usize,
    max_elems: usize,
    visit: &mut dyn FnMut(&KripkeModel) -> ControlFlow<()>,
) -> ControlFlow<()> {
    for w in 1..=max_worlds {
        for d in 1..=max_elems {
            for_each_model(phi, preds, &WorldShape::S5(w), d, visit)?;
        }
    }
    ControlFlow::Continue(())
}

/// First S5 model of `phi` within the bounds, if any; the point is `(0, 0)`.
pub fn find_s5_model(phi: &Formula, max_worlds: usize, max_elems: usize) -> Option<(KripkeModel, Point)> {
    let mut found = None;
    let preds = phi.signature();
    let _ = for_each_s5_model(phi, &preds, max_worlds, max_elems, &mut |m| {
        found = Some((m.clone(), (0, 0)));
        ControlFlow::Break(())
    });
    found
}

/// Canonical parent vectors of rooted trees with exactly `n_worlds` nodes,
/// depth at most `max_depth` (root has depth 0) and at most `max_branch`
/// children per node. Parent vectors are non-decreasing, which fixes one
/// breadth-first labeling per tree; distinct vectors may still describe
/// isomorphic trees, a harmless redundancy for search.
pub fn tree_shapes(n_worlds: usize, max_depth: usize, max_branch: usize) -> Vec<Vec<usize>> {
    assert!(n_worlds >= 1);
    let mut out = Vec::new();
    let mut parents: Vec<usize> = Vec::new();
    fn rec(
        n_extra: usize,
        max_depth: usize,
        max_branch: usize,
        parents: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parents.len() == n_extra {
            out.push(parents.clone());
            return;
        }
        let next_node = parents.len() + 1;
        let min_parent = parents.last().copied().unwrap_or(0);
        for p in min_parent..next_node {
            // depth of p: root 0, node i+1 has depth[parent]+1
            let depth_p = depth_of(p, parents);
            if depth_p + 1 > max_depth {
                continue;
            }
            let child_count = parents.iter().filter(|&&q| q == p).count();
            if child_count >= max_branch {
                continue;
            }
            parents.push(p);
            rec(n_extra, max_depth, max_branch, parents, out);
            parents.pop();
        }
    }
    fn depth_of(node: usize, parents: &[usize]) -> usize {
        let mut d = 0;
        let mut n = node;
        while n > 0 {
            n = parents[n - 1];
            d += 1;
        }
        d
    }
    rec(n_worlds - 1, max_depth, max_branch, &mut parents, &mut out);
    out
}

/// Stream every tree-shaped K model of `phi` with at most `max_worlds`
/// worlds (fewer node counts first), depth and branching as given, and
/// domain sizes `1..=max_elems`.
pub fn for_each_tree_model(
    phi: &Formula,
    preds: &Signature,
    max_depth: usize,
    max_branch: usize,
    max_worlds: usize,
    max_elems: usize,
    visit: &mut dyn FnMut(&KripkeModel) -> ControlFlow<()>,
) -> ControlFlow<()> {
    for n in 1..=max_worlds {
        for shape in tree_shapes(n, max_depth, max_branch) {
            for d in 1..=max_elems {
                for_each_model(phi, preds, &WorldShape::Tree(shape.clone()), d, visit)?;
            }
        }
    }
    ControlFlow::Continue(())
}

/// First tree-shaped K model of `phi` within the bounds, if any.
pub fn find_tree_model(
    phi: &Formula,
    max_depth: usize,
    max_branch: usize,
    max_worlds: usize,
    max_elems: usize,
) -> Option<(KripkeModel, Point)> {
    let mut found = None;
    let preds = phi.signature();
    let _ = for_each_tree_model(phi, &preds, max_depth, max_branch, max_worlds, max_elems, &mut |m| {
        found = Some((m.clone(), (0, 0)));
        ControlFlow::Break(())
    });
    found
}
