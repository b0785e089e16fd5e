//! Triple bisimulations between DL models: a world relation, an element
//! relation and a point relation tied together by five conditions — world
//! steps (every related world pair matches each element on one side with a
//! point-related element on the other), element steps (dually over worlds),
//! projection (point-related pairs project into the world and element
//! relations), concept-name agreement on the signature, and role steps
//! (signature-role successors are matched by point-related successors inside
//! the same world pair). The greatest such triple is computed by iterated
//! removal, exactly like the two-component S5 relation in [`crate::bisim`];
//! role-free models collapse to that case.

use super::model::DlModel;
use crate::formula::Signature;
use crate::kripke::{Grid, Point};
use serde_json::{json, Value};

/// Three-component relation between two DL models: `beta1` relates worlds,
/// `beta2` elements and `beta` points (world/element pairs).
#[derive(Clone, Debug, PartialEq)]
pub struct TripleBisim {
    pub dims: ((usize, usize), (usize, usize)),
    pub beta1: Grid,
    pub beta2: Grid,
    beta: Grid,
}

impl TripleBisim {
    pub fn empty(m1: &DlModel, m2: &DlModel) -> TripleBisim {
        let dims = ((m1.n_worlds(), m1.n_elems()), (m2.n_worlds(), m2.n_elems()));
        TripleBisim {
            dims,
            beta1: Grid::new(dims.0 .0, dims.1 .0),
            beta2: Grid::new(dims.0 .1, dims.1 .1),
            beta: Grid::new(dims.0 .0 * dims.0 .1, dims.1 .0 * dims.1 .1),
        }
    }

    #[inline]
    fn row(&self, p: Point) -> usize {
        p.0 * self.dims.0 .1 + p.1
    }

    #[inline]
    fn col(&self, q: Point) -> usize {
        q.0 * self.dims.1 .1 + q.1
    }

    pub fn world_related(&self, w1: usize, w2: usize) -> bool {
        self.beta1.get(w1, w2)
    }

    pub fn elem_related(&self, d1: usize, d2: usize) -> bool {
        self.beta2.get(d1, d2)
    }

    pub fn point_related(&self, p: Point, q: Point) -> bool {
        self.beta.get(self.row(p), self.col(q))
    }

    pub fn set_point(&mut self, p: Point, q: Point, v: bool) {
        let (r, c) = (self.row(p), self.col(q));
        self.beta.set(r, c, v);
    }

    pub fn point_pairs(&self) -> Vec<(Point, Point)> {
        let ((_, d1), (_, d2)) = self.dims;
        self.beta
            .iter_true()
            .map(|(r, c)| ((r / d1, r % d1), (c / d2, c % d2)))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.count() == 0
    }

    pub fn to_json(&self, m1: &DlModel, m2: &DlModel) -> Value {
        let beta1: Vec<Value> = self
            .beta1
            .iter_true()
            .map(|(w1, w2)| json!([m1.worlds[w1], m2.worlds[w2]]))
            .collect();
        let beta2: Vec<Value> = self
            .beta2
            .iter_true()
            .map(|(d1, d2)| json!([m1.domain[d1], m2.domain[d2]]))
            .collect();
        let beta: Vec<Value> = self
            .point_pairs()
            .into_iter()
            .map(|((w, d), (w2, d2))| {
                json!([[m1.worlds[w], m1.domain[d]], [m2.worlds[w2], m2.domain[d2]]])
            })
            .collect();
        json!({ "beta1": beta1, "beta2": beta2, "beta": beta })
    }

    pub fn from_json(value: &Value, m1: &DlModel, m2: &DlModel) -> Result<TripleBisim, String> {
        let mut out = TripleBisim::empty(m1, m2);
        let rows = |key: &str| -> Result<&Vec<Value>, String> {
            value
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| format!("expected object with a {key:?} array"))
        };
        let name = |entry: &Value, i: usize| -> Result<String, String> {
            entry
                .get(i)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| format!("malformed pair entry {entry}"))
        };
        for pair in rows("beta1")? {
            let w1 = m1.world_index(&name(pair, 0)?).map_err(|e| e.to_string())?;
            let w2 = m2.world_index(&name(pair, 1)?).map_err(|e| e.to_string())?;
            out.beta1.set(w1, w2, true);
        }
        for pair in rows("beta2")? {
            let d1 = m1.elem_index(&name(pair, 0)?).map_err(|e| e.to_string())?;
            let d2 = m2.elem_index(&name(pair, 1)?).map_err(|e| e.to_string())?;
            out.beta2.set(d1, d2, true);
        }
        for pair in rows("beta")? {
            let side = |i: usize| -> Result<(String, String), String> {
                let point = pair.get(i).ok_or_else(|| format!("malformed pair entry {pair}"))?;
                Ok((name(point, 0)?, name(point, 1)?))
            };
            let (lw, ld) = side(0)?;
            let (rw, rd) = side(1)?;
            let p = (
                m1.world_index(&lw).map_err(|e| e.to_string())?,
                m1.elem_index(&ld).map_err(|e| e.to_string())?,
            );
            let q = (
                m2.world_index(&rw).map_err(|e| e.to_string())?,
                m2.elem_index(&rd).map_err(|e| e.to_string())?,
            );
            out.set_point(p, q, true);
        }
        Ok(out)
    }
}

/// The identity triple on a model: every world, element and point related to
/// itself. A triple bisimulation for any signature.
pub fn identity_triple(m: &DlModel) -> TripleBisim {
    let mut t = TripleBisim::empty(m, m);
    for w in 0..m.n_worlds() {
        t.beta1.set(w, w, true);
    }
    for d in 0..m.n_elems() {
        t.beta2.set(d, d, true);
        for w in 0..m.n_worlds() {
            t.set_point((w, d), (w, d), true);
        }
    }
    t
}

/// The role names of `sigma` that carry edges in at least one of the models.
/// Roles absent from both have empty extensions everywhere, so their step
/// condition is vacuous.
fn live_sigma_roles(m1: &DlModel, m2: &DlModel, sigma: &Signature) -> Vec<String> {
    sigma
        .iter()
        .filter(|r| m1.roles.contains_key(*r) || m2.roles.contains_key(*r))
        .cloned()
        .collect()
}

/// One direction of the role-step condition at a related point pair: every
/// `r`-successor of `d1` in world `w1` must have a point-related
/// `r`-successor of `d2` in world `w2`. `beta` rows are indexed as in
/// [`TripleBisim`].
fn role_step_holds(
    from: &DlModel,
    to: &DlModel,
    beta: &Grid,
    r: &str,
    (w1, d1): Point,
    (w2, d2): Point,
    swapped: bool,
) -> bool {
    (0..from.n_elems()).all(|e1| {
        !from.role_holds(r, w1, d1, e1)
            || (0..to.n_elems()).any(|e2| {
                to.role_holds(r, w2, d2, e2)
                    && if swapped {
                        beta.get(w2 * to.n_elems() + e2, w1 * from.n_elems() + e1)
                    } else {
                        beta.get(w1 * from.n_elems() + e1, w2 * to.n_elems() + e2)
                    }
            })
    })
}

/// Greatest triple bisimulation for `sigma`. Starts from concept-name
/// agreement on points and the full world/element relations, then alternately
/// removes point pairs violating projection or role steps, world pairs
/// violating world steps and element pairs violating element steps, until all
/// five conditions hold.
pub fn max_bisim_alcu(m1: &DlModel, m2: &DlModel, sigma: &Signature) -> TripleBisim {
    let mut t = TripleBisim::empty(m1, m2);
    t.beta1 = Grid::filled(m1.n_worlds(), m2.n_worlds(), true);
    t.beta2 = Grid::filled(m1.n_elems(), m2.n_elems(), true);
    let lit1: Vec<Vec<u64>> = (0..m1.n_worlds())
        .map(|w| (0..m1.n_elems()).map(|d| m1.literal_type(sigma, w, d)).collect())
        .collect();
    let lit2: Vec<Vec<u64>> = (0..m2.n_worlds())
        .map(|w| (0..m2.n_elems()).map(|d| m2.literal_type(sigma, w, d)).collect())
        .collect();
    for w1 in 0..m1.n_worlds() {
        for d1 in 0..m1.n_elems() {
            for w2 in 0..m2.n_worlds() {
                for d2 in 0..m2.n_elems() {
                    if lit1[w1][d1] == lit2[w2][d2] {
                        t.set_point((w1, d1), (w2, d2), true);
                    }
                }
            }
        }
    }
    let roles = live_sigma_roles(m1, m2, sigma);
    loop {
        let mut changed = false;
        for ((w1, d1), (w2, d2)) in t.point_pairs() {
            let projected = t.beta1.get(w1, w2) && t.beta2.get(d1, d2);
            let stepped = projected
                && roles.iter().all(|r| {
                    role_step_holds(m1, m2, &t.beta, r, (w1, d1), (w2, d2), false)
                        && role_step_holds(m2, m1, &t.beta, r, (w2, d2), (w1, d1), true)
                });
            if !stepped {
                t.set_point((w1, d1), (w2, d2), false);
                changed = true;
            }
        }
        for w1 in 0..m1.n_worlds() {
            for w2 in 0..m2.n_worlds() {
                if !t.beta1.get(w1, w2) {
                    continue;
                }
                let fwd = (0..m1.n_elems())
                    .all(|d1| (0..m2.n_elems()).any(|d2| t.point_related((w1, d1), (w2, d2))));
                let bwd = (0..m2.n_elems())
                    .all(|d2| (0..m1.n_elems()).any(|d1| t.point_related((w1, d1), (w2, d2))));
                if !(fwd && bwd) {
                    t.beta1.set(w1, w2, false);
                    changed = true;
                }
            }
        }
        for d1 in 0..m1.n_elems() {
            for d2 in 0..m2.n_elems() {
                if !t.beta2.get(d1, d2) {
                    continue;
                }
                let fwd = (0..m1.n_worlds())
                    .all(|w1| (0..m2.n_worlds()).any(|w2| t.point_related((w1, d1), (w2, d2))));
                let bwd = (0..m2.n_worlds())
                    .all(|w2| (0..m1.n_worlds()).any(|w1| t.point_related((w1, d1), (w2, d2))));
                if !(fwd && bwd) {
                    t.beta2.set(d1, d2, false);
                    changed = true;
                }
            }
        }
        if !changed {
            return t;
        }
    }
}

/// Check every defining condition of a candidate triple and report violations
/// (empty report = valid triple bisimulation). Each violation names the
/// condition and the offending tuple.
pub fn verify_triple_bisim(
    m1: &DlModel,
    m2: &DlModel,
    sigma: &Signature,
    t: &TripleBisim,
) -> Vec<String> {
    let mut bad = Vec::new();
    let pname = |m: &DlModel, p: Point| format!("({}, {})", m.worlds[p.0], m.domain[p.1]);
    let roles = live_sigma_roles(m1, m2, sigma);
    for (p, q) in t.point_pairs() {
        let ((w1, d1), (w2, d2)) = (p, q);
        if !t.beta1.get(w1, w2) {
            bad.push(format!(
                "projection condition fails at ({}, {}): world pair not related",
                pname(m1, p),
                pname(m2, q)
            ));
        }
        if !t.beta2.get(d1, d2) {
            bad.push(format!(
                "projection condition fails at ({}, {}): element pair not related",
                pname(m1, p),
                pname(m2, q)
            ));
        }
        for a in sigma {
            if m1.concept_holds(a, w1, d1) != m2.concept_holds(a, w2, d2) {
                bad.push(format!(
                    "concept agreement fails at ({}, {}): {a} differs",
                    pname(m1, p),
                    pname(m2, q)
                ));
            }
        }
        for r in &roles {
            for e1 in 0..m1.n_elems() {
                if m1.role_holds(r, w1, d1, e1)
                    && !(0..m2.n_elems()).any(|e2| {
                        m2.role_holds(r, w2, d2, e2) && t.point_related((w1, e1), (w2, e2))
                    })
                {
                    bad.push(format!(
                        "role condition fails at ({}, {}): {r}-successor {} unmatched",
                        pname(m1, p),
                        pname(m2, q),
                        m1.domain[e1]
                    ));
                }
            }
            for e2 in 0..m2.n_elems() {
                if m2.role_holds(r, w2, d2, e2)
                    && !(0..m1.n_elems()).any(|e1| {
                        m1.role_holds(r, w1, d1, e1) && t.point_related((w1, e1), (w2, e2))
                    })
                {
                    bad.push(format!(
                        "role condition fails at ({}, {}): {r}-successor {} unmatched",
                        pname(m1, p),
                        pname(m2, q),
                        m2.domain[e2]
                    ));
                }
            }
        }
    }
    for (w1, w2) in t.beta1.iter_true() {
        for d1 in 0..m1.n_elems() {
            if !(0..m2.n_elems()).any(|d2| t.point_related((w1, d1), (w2, d2))) {
                bad.push(format!(
                    "world condition fails at ({}, {}): element {} has no point partner",
                    m1.worlds[w1], m2.worlds[w2], m1.domain[d1]
                ));
            }
        }
        for d2 in 0..m2.n_elems() {
            if !(0..m1.n_elems()).any(|d1| t.point_related((w1, d1), (w2, d2))) {
                bad.push(format!(
                    "world condition fails at ({}, {}): element {} has no point partner",
                    m1.worlds[w1], m2.worlds[w2], m2.domain[d2]
                ));
            }
        }
    }
    for (d1, d2) in t.beta2.iter_true() {
        for w1 in 0..m1.n_worlds() {
            if !(0..m2.n_worlds()).any(|w2| t.point_related((w1, d1), (w2, d2))) {
                bad.push(format!(
                    "element condition fails at ({}, {}): world {} has no point partner",
                    m1.domain[d1], m2.domain[d2], m1.worlds[w1]
                ));
            }
        }
        for w2 in 0..m2.n_worlds() {
            if !(0..m1.n_worlds()).any(|w1| t.point_related((w1, d1), (w2, d2))) {
                bad.push(format!(
                    "element condition fails at ({}, {}): world {} has no point partner",
                    m1.domain[d1], m2.domain[d2], m2.worlds[w2]
                ));
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::max_bisim_s5;
    use crate::kripke::{enumerate_models, ModelKind};

    fn sig(names: &[&str]) -> Signature {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// One world, two elements, A on d1 and an r-edge d0 → d1.
    fn edge_model() -> DlModel {
        let mut m = DlModel::new(1, 2);
        m.set_concept("A", 0, 1);
        m.set_role("r", 0, 0, 1);
        m
    }

    #[test]
    fn identity_is_a_triple_bisimulation() {
        let m = edge_model();
        let t = identity_triple(&m);
        assert!(verify_triple_bisim(&m, &m, &sig(&["A", "r"]), &t).is_empty());
        assert!(t.point_related((0, 0), (0, 0)));
        assert!(t.world_related(0, 0) && t.elem_related(1, 1));
    }

    #[test]
    fn greatest_triple_verifies_and_respects_projection() {
        let m1 = edge_model();
        let mut m2 = edge_model();
        m2.set_concept("B", 0, 0);
        let sigma = sig(&["A", "B", "r"]);
        let t = max_bisim_alcu(&m1, &m2, &sigma);
        assert!(verify_triple_bisim(&m1, &m2, &sigma, &t).is_empty());
        for (p, q) in t.point_pairs() {
            assert!(t.world_related(p.0, q.0) && t.elem_related(p.1, q.1));
        }
    }

    #[test]
    fn removing_a_sigma_role_edge_shrinks_the_point_relation() {
        let m1 = edge_model();
        let mut m2 = edge_model();
        m2.roles.clear();
        let with_edge = max_bisim_alcu(&m1, &m1, &sig(&["A", "r"]));
        assert!(with_edge.point_related((0, 0), (0, 0)));
        let without = max_bisim_alcu(&m1, &m2, &sig(&["A", "r"]));
        assert!(!without.point_related((0, 0), (0, 0)));
        // with the role outside the signature the difference is invisible
        let blind = max_bisim_alcu(&m1, &m2, &sig(&["A"]));
        assert!(blind.point_related((0, 0), (0, 0)));
    }

    #[test]
    fn violations_name_their_condition() {
        let m1 = edge_model();
        let mut m2 = edge_model();
        m2.roles.clear();
        let sigma = sig(&["A", "r"]);
        // force the identity pairing onto the mismatched pair
        let mut t = identity_triple(&m1);
        let report = verify_triple_bisim(&m1, &m2, &sigma, &t);
        assert!(report.iter().any(|m| m.contains("role condition")), "{report:?}");
        // drop a projection while keeping the point pair
        t.beta1.set(0, 0, false);
        let report = verify_triple_bisim(&m1, &m1, &sigma, &t);
        assert!(report.iter().any(|m| m.contains("projection condition")), "{report:?}");
        // a beta1 pair with no point support violates the world condition
        let mut empty = TripleBisim::empty(&m1, &m1);
        empty.beta1.set(0, 0, true);
        let report = verify_triple_bisim(&m1, &m1, &sigma, &empty);
        assert!(report.iter().any(|m| m.contains("world condition")), "{report:?}");
        // dually for beta2 pairs and the element condition
        let mut empty = TripleBisim::empty(&m1, &m1);
        empty.beta2.set(0, 0, true);
        let report = verify_triple_bisim(&m1, &m1, &sigma, &empty);
        assert!(report.iter().any(|m| m.contains("element condition")), "{report:?}");
    }

    #[test]
    fn role_free_models_reduce_to_the_two_component_relation() {
        let sigma = sig(&["p", "q"]);
        let models: Vec<_> =
            enumerate_models(&sigma, 2, 2, ModelKind::Q1S5, true).collect();
        for (i, a) in models.iter().enumerate() {
            // stride through the pairs to keep the square tractable
            for b in models.iter().skip(i % 7).step_by(7) {
                let s5 = max_bisim_s5(a, b, &sigma);
                let dl = max_bisim_alcu(&DlModel::from_kripke(a), &DlModel::from_kripke(b), &sigma);
                assert_eq!(s5.beta1, dl.beta1);
                assert_eq!(s5.beta2, dl.beta2);
                for w1 in 0..a.n_worlds() {
                    for d1 in 0..a.n_elems() {
                        for w2 in 0..b.n_worlds() {
                            for d2 in 0..b.n_elems() {
                                assert_eq!(
                                    dl.point_related((w1, d1), (w2, d2)),
                                    s5.point_related(a, b, &sigma, (w1, d1), (w2, d2))
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trips() {
        let m1 = edge_model();
        let mut m2 = edge_model();
        m2.set_concept("A", 0, 0);
        let t = max_bisim_alcu(&m1, &m2, &sig(&["A", "r"]));
        let back = TripleBisim::from_json(&t.to_json(&m1, &m2), &m1, &m2).unwrap();
        assert_eq!(t, back);
    }
}
