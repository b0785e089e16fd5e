//! Characteristic formulas: for a finite model with a distinguished point,
//! build the strongest formula of modal depth `k` (over a signature) that
//! the point satisfies. Satisfying it is equivalent to being depth-`k`
//! bisimilar to that point — the bridge between the semantic and the
//! syntactic side of the finite-depth analysis, exercised by the test
//! suites as an independent oracle for [`crate::bisim::max_k_bisim`].
//!
//! The construction follows the relation stored in the model, so it applies
//! verbatim to tree-shaped models of the K logic; on S5 models (where every
//! world sees every world) it still characterises depth-`k` bisimilarity
//! over the full relation, it just stops being a finite invariant of the
//! *unbounded* S5 bisimulation.
//!
//! One deliberate omission: the "bisimulation quantifier" companion
//! `∃^{~sigma,k} phi` (the strongest sigma-consequence of `phi` up to depth
//! `k`) is an infinite disjunction of characteristic formulas over all
//! models and is *not* materialised here; the deciders realise its role
//! semantically by searching for bisimilar model pairs instead.

use crate::formula::{atom, conj, disj, Formula, Signature};
use crate::kripke::KripkeModel;
use std::collections::HashMap;

/// Literal description of a point: which sigma-atoms hold and which fail.
fn literal_desc(m: &KripkeModel, sigma: &Signature, w: usize, d: usize) -> Formula {
    let mut parts = Vec::new();
    for p in sigma {
        if m.atom_holds(p, w, d) {
            parts.push(atom(p));
        } else {
            parts.push(atom(p).not());
        }
    }
    conj(parts)
}

fn push_unique(items: &mut Vec<Formula>, f: Formula) {
    if !items.contains(&f) {
        items.push(f);
    }
}

struct Builder<'a> {
    m: &'a KripkeModel,
    sigma: &'a Signature,
    /// tau at (level, world, element); levels repeat heavily across the
    /// element loop, so this is what keeps the output polynomial per call.
    tau: HashMap<(usize, usize, usize), Formula>,
}

impl<'a> Builder<'a> {
    /// The per-element building block at `level`: the literal description,
    /// and for positive levels the successor demands — one diamond per
    /// distinct successor formula, plus a box over their disjunction
    /// (which for a successor-free world degenerates to "box false",
    /// pinning the absence of successors).
    fn block(&mut self, level: usize, w: usize, e: usize) -> Formula {
        let mut parts = vec![literal_desc(self.m, self.sigma, w, e)];
        if level > 0 {
            let mut diamonds = Vec::new();
            let mut disjuncts = Vec::new();
            for i in 0..self.m.succ[w].len() {
                let v = self.m.succ[w][i];
                let t = self.tau(level - 1, v, e);
                push_unique(&mut diamonds, t.clone().dia());
                push_unique(&mut disjuncts, t);
            }
            parts.extend(diamonds);
            parts.push(Formula::Box(Box::new(disj(disjuncts))));
        }
        conj(parts)
    }

    fn tau(&mut self, level: usize, w: usize, d: usize) -> Formula {
        if let Some(f) = self.tau.get(&(level, w, d)) {
            return f.clone();
        }
        let mut parts = vec![self.block(level, w, d)];
        let mut exists = Vec::new();
        let mut choices = Vec::new();
        for e in 0..self.m.n_elems() {
            let b = self.block(level, w, e);
            push_unique(&mut exists, b.clone().exists());
            push_unique(&mut choices, b);
        }
        parts.extend(exists);
        parts.push(Formula::Forall(Box::new(disj(choices))));
        let f = conj(parts);
        self.tau.insert((level, w, d), f.clone());
        f
    }
}

/// The strongest depth-`k` formula over `sigma` satisfied at `(w, d)`:
/// a point of any model satisfies the result exactly when it is
/// sigma-`k`-bisimilar to `(w, d)`. The result's modal depth is `k`
/// (less only when every path from `w` ends before `k` steps — then a
/// "box false" conjunct already forces the same early end on any
/// satisfying point).
pub fn char_formula(m: &KripkeModel, w: usize, d: usize, sigma: &Signature, k: usize) -> Formula {
    assert!(w < m.n_worlds() && d < m.n_elems(), "point outside the model");
    let mut b = Builder { m, sigma, tau: HashMap::new() };
    b.tau(k, w, d)
}
