//! Seeded random generators and artifact mutators.
//!
//! The oracle suites compare two independent implementations of the same
//! notion (two bisimulation algorithms, a formula against its first-order
//! image, a verifier against a construction), so they need a stream of
//! small random inputs that is reproducible across runs and platforms.
//! Everything here draws from a caller-supplied ChaCha generator seeded
//! explicitly; the same seed always yields the same instance.
//!
//! The mutators deliberately *damage* a passing artifact in the smallest
//! possible way — one added relation bit, one flipped valuation bit, one
//! rewritten formula node — so the test suites can check that the
//! verifiers notice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bisim::{GeneralBisim, S5Bisim};
use crate::formula::{atom, Formula};
use crate::kripke::KripkeModel;
use crate::translate::FoModel;

/// The one random-number generator used by every seeded suite.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random formula over the given atoms with modal/quantifier depth at most
/// `depth`.  All twelve constructors appear; leaves are atoms or constants.
pub fn formula(rng: &mut impl Rng, atoms: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_range(0..10) == 0 {
        return match rng.gen_range(0..atoms.len() + 1) {
            i if i < atoms.len() => atom(atoms[i]),
            _ => {
                if rng.gen_bool(0.5) {
                    Formula::Top
                } else {
                    Formula::Bottom
                }
            }
        };
    }
    match rng.gen_range(0..10) {
        0 => formula(rng, atoms, depth - 1).not(),
        1 => formula(rng, atoms, depth - 1).and(formula(rng, atoms, depth - 1)),
        2 => formula(rng, atoms, depth - 1).or(formula(rng, atoms, depth - 1)),
        3 => formula(rng, atoms, depth - 1).implies(formula(rng, atoms, depth - 1)),
        4 => formula(rng, atoms, depth - 1).iff(formula(rng, atoms, depth - 1)),
        5 => formula(rng, atoms, depth - 1).dia(),
        6 => formula(rng, atoms, depth - 1).bx(),
        7 => formula(rng, atoms, depth - 1).exists(),
        8 => formula(rng, atoms, depth - 1).forall(),
        _ => atom(atoms[rng.gen_range(0..atoms.len())]),
    }
}

/// Random constant-domain model over the total world relation, between one
/// and the given number of worlds/elements, each atom true at each point
/// with probability one half.
pub fn s5_model(
    rng: &mut impl Rng,
    max_worlds: usize,
    max_elems: usize,
    atoms: &[&str],
) -> KripkeModel {
    let w = rng.gen_range(1..=max_worlds);
    let d = rng.gen_range(1..=max_elems);
    let mut m = KripkeModel::s5(w, d);
    fill_valuation(rng, &mut m, atoms);
    m
}

/// Random model with an arbitrary world relation: every directed edge is
/// tossed independently.
pub fn k_model(
    rng: &mut impl Rng,
    max_worlds: usize,
    max_elems: usize,
    atoms: &[&str],
) -> KripkeModel {
    let w = rng.gen_range(1..=max_worlds);
    let d = rng.gen_range(1..=max_elems);
    let mut edges = Vec::new();
    for i in 0..w {
        for j in 0..w {
            if rng.gen_bool(0.4) {
                edges.push((i, j));
            }
        }
    }
    let mut m = KripkeModel::k(w, d, &edges);
    fill_valuation(rng, &mut m, atoms);
    m
}

fn fill_valuation(rng: &mut impl Rng, m: &mut KripkeModel, atoms: &[&str]) {
    for p in atoms {
        for w in 0..m.n_worlds() {
            for d in 0..m.n_elems() {
                if rng.gen_bool(0.5) {
                    m.set_atom(p, w, d);
                }
            }
        }
    }
}

/// Random square first-order structure over binary predicates.
pub fn fo_square(rng: &mut impl Rng, max_size: usize, preds: &[&str]) -> FoModel {
    let n = rng.gen_range(1..=max_size);
    let mut a = FoModel::new(n);
    for p in preds {
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(0.5) {
                    a.set(p, i, j);
                }
            }
        }
    }
    a
}

// ---------------------------------------------------------------------------
// Mutators
// ---------------------------------------------------------------------------

/// Add one pair that the relation does not contain.  Returns `false` when
/// the relation is already full, in which case nothing changes and the
/// caller should resample.  Adding to a *maximal* bisimulation always
/// produces an invalid artifact, which is what the sensitivity suites need;
/// removing a pair would not (a redundant pair can be dropped without harm).
pub fn add_foreign_pair(rng: &mut impl Rng, b: &mut GeneralBisim) -> bool {
    let ((w1, d1), (w2, d2)) = b.dims;
    let total = w1 * d1 * w2 * d2;
    let missing = total - b.len();
    if missing == 0 {
        return false;
    }
    let mut skip = rng.gen_range(0..missing);
    for x1 in 0..w1 {
        for y1 in 0..d1 {
            for x2 in 0..w2 {
                for y2 in 0..d2 {
                    if b.contains((x1, y1), (x2, y2)) {
                        continue;
                    }
                    if skip == 0 {
                        b.set((x1, y1), (x2, y2), true);
                        return true;
                    }
                    skip -= 1;
                }
            }
        }
    }
    unreachable!("missing pair count was wrong")
}

/// Add one world-pair or element-pair bit to an S5 bisimulation.  Returns
/// `false` when both component relations are full.
pub fn add_foreign_bit_s5(rng: &mut impl Rng, b: &mut S5Bisim) -> bool {
    let mut holes = Vec::new();
    for r in 0..b.beta1.rows {
        for c in 0..b.beta1.cols {
            if !b.beta1.get(r, c) {
                holes.push((true, r, c));
            }
        }
    }
    for r in 0..b.beta2.rows {
        for c in 0..b.beta2.cols {
            if !b.beta2.get(r, c) {
                holes.push((false, r, c));
            }
        }
    }
    if holes.is_empty() {
        return false;
    }
    let (in_worlds, r, c) = holes[rng.gen_range(0..holes.len())];
    if in_worlds {
        b.beta1.set(r, c, true);
    } else {
        b.beta2.set(r, c, true);
    }
    true
}

/// Flip one valuation bit of the model.  Returns `false` when the model
/// valuates no atom at all.
pub fn flip_valuation_bit(rng: &mut impl Rng, m: &mut KripkeModel) -> bool {
    let atoms: Vec<String> = m.val.keys().cloned().collect();
    if atoms.is_empty() {
        return false;
    }
    let p = &atoms[rng.gen_range(0..atoms.len())];
    let w = rng.gen_range(0..m.n_worlds());
    let d = rng.gen_range(0..m.n_elems());
    let grid = m.val.get_mut(p).unwrap();
    let old = grid.get(w, d);
    grid.set(w, d, !old);
    true
}

/// Rewrite one node of the formula: negate it, swap a binary connective,
/// flip a modality or quantifier, or rename an atom.  The result is always
/// structurally different from the input.
pub fn mutate_formula(rng: &mut impl Rng, phi: &Formula) -> Formula {
    let n = node_count(phi);
    let target = rng.gen_range(0..n);
    let mut counter = 0;
    rewrite_at(rng, phi, target, &mut counter)
}

fn node_count(phi: &Formula) -> usize {
    1 + match phi {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
        Formula::Not(a)
        | Formula::Diamond(a)
        | Formula::Box(a)
        | Formula::Exists(a)
        | Formula::Forall(a) => node_count(a),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Implies(a, b)
        | Formula::Iff(a, b) => node_count(a) + node_count(b),
    }
}

fn rewrite_at(
    rng: &mut impl Rng,
    phi: &Formula,
    target: usize,
    counter: &mut usize,
) -> Formula {
    let here = *counter == target;
    *counter += 1;
    if here {
        return rewrite_node(rng, phi);
    }
    match phi {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => phi.clone(),
        Formula::Not(a) => rewrite_at(rng, a, target, counter).not(),
        Formula::Diamond(a) => rewrite_at(rng, a, target, counter).dia(),
        Formula::Box(a) => rewrite_at(rng, a, target, counter).bx(),
        Formula::Exists(a) => rewrite_at(rng, a, target, counter).exists(),
        Formula::Forall(a) => rewrite_at(rng, a, target, counter).forall(),
        Formula::And(a, b) => {
            rewrite_at(rng, a, target, counter).and(rewrite_at(rng, b, target, counter))
        }
        Formula::Or(a, b) => {
            rewrite_at(rng, a, target, counter).or(rewrite_at(rng, b, target, counter))
        }
        Formula::Implies(a, b) => {
            rewrite_at(rng, a, target, counter).implies(rewrite_at(rng, b, target, counter))
        }
        Formula::Iff(a, b) => {
            rewrite_at(rng, a, target, counter).iff(rewrite_at(rng, b, target, counter))
        }
    }
}

fn rewrite_node(rng: &mut impl Rng, phi: &Formula) -> Formula {
    match phi {
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Atom(p) => {
            if rng.gen_bool(0.5) {
                atom(&format!("{p}_mut"))
            } else {
                atom(p).not()
            }
        }
        Formula::Not(a) => (**a).clone(),
        Formula::And(a, b) => (**a).clone().or((**b).clone()),
        Formula::Or(a, b) => (**a).clone().and((**b).clone()),
        Formula::Implies(a, b) => (**a).clone().and((**b).clone()),
        Formula::Iff(a, b) => (**a).clone().implies((**b).clone()),
        Formula::Diamond(a) => (**a).clone().bx(),
        Formula::Box(a) => (**a).clone().dia(),
        Formula::Exists(a) => (**a).clone().forall(),
        Formula::Forall(a) => (**a).clone().exists(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::max_bisim_general;
    use crate::formula::Signature;

    #[test]
    fn generators_are_reproducible() {
        let a = formula(&mut rng(7), &["p", "q"], 3);
        let b = formula(&mut rng(7), &["p", "q"], 3);
        assert_eq!(a, b);
        let m = s5_model(&mut rng(7), 3, 3, &["p"]);
        let n = s5_model(&mut rng(7), 3, 3, &["p"]);
        assert_eq!(m.val, n.val);
    }

    #[test]
    fn model_sizes_respect_the_caps() {
        let mut r = rng(11);
        for _ in 0..50 {
            let m = k_model(&mut r, 2, 3, &["p", "q"]);
            assert!(m.n_worlds() <= 2 && m.n_elems() <= 3);
        }
    }

    #[test]
    fn formula_mutation_always_changes_the_tree() {
        let mut r = rng(13);
        for _ in 0..100 {
            let phi = formula(&mut r, &["p", "q"], 3);
            let psi = mutate_formula(&mut r, &phi);
            assert_ne!(phi, psi, "mutation returned the input for {phi:?}");
        }
    }

    #[test]
    fn foreign_pairs_really_are_foreign() {
        let mut r = rng(17);
        let sigma: Signature = ["p"].iter().map(|s| s.to_string()).collect();
        let mut added = 0;
        for _ in 0..20 {
            let m1 = s5_model(&mut r, 2, 2, &["p"]);
            let m2 = s5_model(&mut r, 2, 2, &["p"]);
            let before = max_bisim_general(&m1, &m2, &sigma);
            let mut b = before.clone();
            if add_foreign_pair(&mut r, &mut b) {
                added += 1;
                assert_eq!(b.len(), before.len() + 1);
            }
        }
        assert!(added >= 10, "almost every maximal bisimulation was full");
    }
}
