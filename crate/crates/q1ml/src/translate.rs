//! Bridges into first-order logic.
//!
//! Formulas of the one-variable language live inside two-variable
//! first-order logic in two different ways.  Over the total world relation
//! there is a direct reading: `<>` becomes `exists y`, the domain quantifier
//! becomes `exists x`, and an atom `p` becomes the guarded atom `p(y, x)` —
//! the image uses no equality and no atom other than `p(y, x)`, and square
//! models (as many worlds as elements) correspond exactly to first-order
//! structures over binary predicates.  Over an arbitrary world relation the
//! usual standard translation applies instead, spending a distinguished
//! predicate [`WORLD_RELATION`] on accessibility and cycling through two
//! world variables so that the output stays inside the two-variable
//! discipline.
//!
//! Evaluation of the first-order output over finite structures is
//! implemented directly, which keeps every translation testable by
//! co-evaluating both sides.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::formula::{Formula, Signature};
use crate::kripke::{Grid, KripkeModel, ModelKind};

/// The accessibility predicate emitted by [`standard_translation`].
pub const WORLD_RELATION: &str = "R";

/// The three first-order variables that ever appear in a translation:
/// `y` and `z` range over worlds, `x` over domain elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FoVar {
    Y,
    X,
    Z,
}

impl fmt::Display for FoVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FoVar::Y => "y",
            FoVar::X => "x",
            FoVar::Z => "z",
        })
    }
}

/// First-order formulas over binary predicates, without equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FoFormula {
    Top,
    Bottom,
    Atom(String, FoVar, FoVar),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Iff(Box<FoFormula>, Box<FoFormula>),
    Exists(FoVar, Box<FoFormula>),
    Forall(FoVar, Box<FoFormula>),
}

pub fn fo_atom(pred: &str, a: FoVar, b: FoVar) -> FoFormula {
    FoFormula::Atom(pred.to_string(), a, b)
}

impl FoFormula {
    pub fn not(self) -> FoFormula {
        FoFormula::Not(Box::new(self))
    }
    pub fn and(self, other: FoFormula) -> FoFormula {
        FoFormula::And(Box::new(self), Box::new(other))
    }
    pub fn or(self, other: FoFormula) -> FoFormula {
        FoFormula::Or(Box::new(self), Box::new(other))
    }
    pub fn implies(self, other: FoFormula) -> FoFormula {
        FoFormula::Implies(Box::new(self), Box::new(other))
    }
    pub fn iff(self, other: FoFormula) -> FoFormula {
        FoFormula::Iff(Box::new(self), Box::new(other))
    }
    pub fn exists(self, v: FoVar) -> FoFormula {
        FoFormula::Exists(v, Box::new(self))
    }
    pub fn forall(self, v: FoVar) -> FoFormula {
        FoFormula::Forall(v, Box::new(self))
    }

    /// The set of predicate names occurring in the formula.
    pub fn predicates(&self) -> Signature {
        let mut out = Signature::new();
        self.walk(&mut |f| {
            if let FoFormula::Atom(p, _, _) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Free variables, assuming the usual binding rules.
    pub fn free_vars(&self) -> BTreeSet<FoVar> {
        match self {
            FoFormula::Top | FoFormula::Bottom => BTreeSet::new(),
            FoFormula::Atom(_, a, b) => [*a, *b].into_iter().collect(),
            FoFormula::Not(f) => f.free_vars(),
            FoFormula::And(a, b)
            | FoFormula::Or(a, b)
            | FoFormula::Implies(a, b)
            | FoFormula::Iff(a, b) => {
                let mut out = a.free_vars();
                out.extend(b.free_vars());
                out
            }
            FoFormula::Exists(v, f) | FoFormula::Forall(v, f) => {
                let mut out = f.free_vars();
                out.remove(v);
                out
            }
        }
    }

    /// True when every atom has the exact shape `p(y, x)` — the grammar of
    /// the direct reading's image.  Equality is excluded by construction,
    /// so this is the whole grammar check.
    pub fn in_dagger_fragment(&self) -> bool {
        let mut ok = true;
        self.walk(&mut |f| {
            if let FoFormula::Atom(_, a, b) = f {
                ok &= *a == FoVar::Y && *b == FoVar::X;
            }
        });
        ok
    }

    fn walk(&self, f: &mut impl FnMut(&FoFormula)) {
        f(self);
        match self {
            FoFormula::Top | FoFormula::Bottom | FoFormula::Atom(..) => {}
            FoFormula::Not(a) | FoFormula::Exists(_, a) | FoFormula::Forall(_, a) => f_walk(a, f),
            FoFormula::And(a, b)
            | FoFormula::Or(a, b)
            | FoFormula::Implies(a, b)
            | FoFormula::Iff(a, b) => {
                f_walk(a, f);
                f_walk(b, f);
            }
        }
    }

    /// Lisp-style prefix text, e.g. `(exists y (and (R z y) (q y x)))`.
    pub fn prefix(&self) -> String {
        match self {
            FoFormula::Top => "true".to_string(),
            FoFormula::Bottom => "false".to_string(),
            FoFormula::Atom(p, a, b) => format!("({p} {a} {b})"),
            FoFormula::Not(f) => format!("(not {})", f.prefix()),
            FoFormula::And(a, b) => format!("(and {} {})", a.prefix(), b.prefix()),
            FoFormula::Or(a, b) => format!("(or {} {})", a.prefix(), b.prefix()),
            FoFormula::Implies(a, b) => format!("(implies {} {})", a.prefix(), b.prefix()),
            FoFormula::Iff(a, b) => format!("(iff {} {})", a.prefix(), b.prefix()),
            FoFormula::Exists(v, f) => format!("(exists {v} {})", f.prefix()),
            FoFormula::Forall(v, f) => format!("(forall {v} {})", f.prefix()),
        }
    }

    /// TPTP-style rendering, for handing the output to external provers.
    pub fn tptp(&self) -> String {
        fn var(v: &FoVar) -> &'static str {
            match v {
                FoVar::Y => "Y",
                FoVar::X => "X",
                FoVar::Z => "Z",
            }
        }
        fn go(f: &FoFormula) -> String {
            match f {
                FoFormula::Top => "$true".to_string(),
                FoFormula::Bottom => "$false".to_string(),
                FoFormula::Atom(p, a, b) => format!("{p}({},{})", var(a), var(b)),
                FoFormula::Not(x) => format!("~({})", go(x)),
                FoFormula::And(a, b) => format!("({} & {})", go(a), go(b)),
                FoFormula::Or(a, b) => format!("({} | {})", go(a), go(b)),
                FoFormula::Implies(a, b) => format!("({} => {})", go(a), go(b)),
                FoFormula::Iff(a, b) => format!("({} <=> {})", go(a), go(b)),
                FoFormula::Exists(v, x) => format!("? [{}] : {}", var(v), go(x)),
                FoFormula::Forall(v, x) => format!("! [{}] : {}", var(v), go(x)),
            }
        }
        go(self)
    }
}

fn f_walk(f: &FoFormula, g: &mut impl FnMut(&FoFormula)) {
    f.walk(g)
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.prefix())
    }
}

// ---------------------------------------------------------------------------
// The two translations
// ---------------------------------------------------------------------------

/// Direct reading over the total world relation: `y` holds the current
/// world, `x` the current element, and every connective maps structurally —
/// `<>` to `exists y`, `[]` to `forall y`, the domain quantifiers to
/// `exists x` / `forall x`, atoms to `p(y, x)`.
pub fn dagger_translation(phi: &Formula) -> FoFormula {
    match phi {
        Formula::Top => FoFormula::Top,
        Formula::Bottom => FoFormula::Bottom,
        Formula::Atom(p) => fo_atom(p, FoVar::Y, FoVar::X),
        Formula::Not(f) => dagger_translation(f).not(),
        Formula::And(a, b) => dagger_translation(a).and(dagger_translation(b)),
        Formula::Or(a, b) => dagger_translation(a).or(dagger_translation(b)),
        Formula::Implies(a, b) => dagger_translation(a).implies(dagger_translation(b)),
        Formula::Iff(a, b) => dagger_translation(a).iff(dagger_translation(b)),
        Formula::Diamond(f) => dagger_translation(f).exists(FoVar::Y),
        Formula::Box(f) => dagger_translation(f).forall(FoVar::Y),
        Formula::Exists(f) => dagger_translation(f).exists(FoVar::X),
        Formula::Forall(f) => dagger_translation(f).forall(FoVar::X),
    }
}

/// Standard translation for an arbitrary world relation.  The current world
/// sits in `z` at the top level; each modal step guards a fresh world
/// variable with [`WORLD_RELATION`] and the two world variables `z` and `y`
/// alternate with modal depth, so the output never needs a third one.  Free
/// variables of the result are at most `z` (world) and `x` (element).
pub fn standard_translation(phi: &Formula) -> FoFormula {
    st(phi, FoVar::Z)
}

fn st(phi: &Formula, world: FoVar) -> FoFormula {
    let next = if world == FoVar::Z { FoVar::Y } else { FoVar::Z };
    match phi {
        Formula::Top => FoFormula::Top,
        Formula::Bottom => FoFormula::Bottom,
        Formula::Atom(p) => fo_atom(p, world, FoVar::X),
        Formula::Not(f) => st(f, world).not(),
        Formula::And(a, b) => st(a, world).and(st(b, world)),
        Formula::Or(a, b) => st(a, world).or(st(b, world)),
        Formula::Implies(a, b) => st(a, world).implies(st(b, world)),
        Formula::Iff(a, b) => st(a, world).iff(st(b, world)),
        Formula::Diamond(f) => fo_atom(WORLD_RELATION, world, next)
            .and(st(f, next))
            .exists(next),
        Formula::Box(f) => fo_atom(WORLD_RELATION, world, next)
            .implies(st(f, next))
            .forall(next),
        Formula::Exists(f) => st(f, world).exists(FoVar::X),
        Formula::Forall(f) => st(f, world).forall(FoVar::X),
    }
}

// ---------------------------------------------------------------------------
// Finite first-order structures and the square-model bridge
// ---------------------------------------------------------------------------

/// A finite structure over binary predicates: one domain, one boolean grid
/// per predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoModel {
    pub size: usize,
    pub preds: BTreeMap<String, Grid>,
}

impl FoModel {
    pub fn new(size: usize) -> FoModel {
        assert!(size > 0, "first-order structures have nonempty domains");
        FoModel {
            size,
            preds: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, pred: &str, a: usize, b: usize) {
        let n = self.size;
        self.preds
            .entry(pred.to_string())
            .or_insert_with(|| Grid::new(n, n))
            .set(a, b, true);
    }

    pub fn holds(&self, pred: &str, a: usize, b: usize) -> bool {
        self.preds.get(pred).is_some_and(|g| g.get(a, b))
    }

    /// Evaluate under the assignment `y := y_val`, `x := x_val`,
    /// `z := z_val`.
    pub fn eval(&self, phi: &FoFormula, y_val: usize, x_val: usize, z_val: usize) -> bool {
        let value = |v: &FoVar| match v {
            FoVar::Y => y_val,
            FoVar::X => x_val,
            FoVar::Z => z_val,
        };
        let rebind = |v: &FoVar, e: usize| match v {
            FoVar::Y => (e, x_val, z_val),
            FoVar::X => (y_val, e, z_val),
            FoVar::Z => (y_val, x_val, e),
        };
        match phi {
            FoFormula::Top => true,
            FoFormula::Bottom => false,
            FoFormula::Atom(p, a, b) => self.holds(p, value(a), value(b)),
            FoFormula::Not(f) => !self.eval(f, y_val, x_val, z_val),
            FoFormula::And(a, b) => {
                self.eval(a, y_val, x_val, z_val) && self.eval(b, y_val, x_val, z_val)
            }
            FoFormula::Or(a, b) => {
                self.eval(a, y_val, x_val, z_val) || self.eval(b, y_val, x_val, z_val)
            }
            FoFormula::Implies(a, b) => {
                !self.eval(a, y_val, x_val, z_val) || self.eval(b, y_val, x_val, z_val)
            }
            FoFormula::Iff(a, b) => {
                self.eval(a, y_val, x_val, z_val) == self.eval(b, y_val, x_val, z_val)
            }
            FoFormula::Exists(v, f) => (0..self.size).any(|e| {
                let (y2, x2, z2) = rebind(v, e);
                self.eval(f, y2, x2, z2)
            }),
            FoFormula::Forall(v, f) => (0..self.size).all(|e| {
                let (y2, x2, z2) = rebind(v, e);
                self.eval(f, y2, x2, z2)
            }),
        }
    }
}

/// Read a first-order structure as a square model over the total world
/// relation: worlds and elements both range over the structure's domain,
/// and `p` holds at world `a`, element `b` exactly when the structure has
/// `p(a, b)`.
pub fn fo_to_square(a: &FoModel) -> KripkeModel {
    let mut m = KripkeModel::s5(a.size, a.size);
    for (pred, grid) in &a.preds {
        for (i, j) in grid.iter_true() {
            m.set_atom(pred, i, j);
        }
    }
    m
}

/// Read a square model back as a first-order structure.  `world_of[a]`
/// says which world the domain element `a` impersonates on the first
/// coordinate; by default element `a` plays world `a`.  Fails when the
/// model is not square (or not over the total relation), or when the given
/// assignment is not a bijection.
pub fn square_to_fo(m: &KripkeModel, world_of: Option<&[usize]>) -> Result<FoModel, String> {
    if m.kind != ModelKind::Q1S5 {
        return Err("the square bridge needs the total world relation".to_string());
    }
    let n = m.n_worlds();
    if n != m.n_elems() {
        return Err(format!(
            "not a square model: {n} worlds by {} elements",
            m.n_elems()
        ));
    }
    let identity: Vec<usize> = (0..n).collect();
    let f = world_of.unwrap_or(&identity);
    let mut seen = vec![false; n];
    let injective = f.len() == n
        && f.iter().all(|&w| {
            let fresh = w < n && !seen[w];
            if fresh {
                seen[w] = true;
            }
            fresh
        });
    if !injective {
        return Err("the world assignment is not a bijection".to_string());
    }
    let mut out = FoModel::new(n);
    for (pred, _) in &m.val {
        for a in 0..n {
            for b in 0..n {
                if m.atom_holds(pred, f[a], b) {
                    out.set(pred, a, b);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, parse, Formula};
    use crate::kripke::model_check;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fml(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
        let pick = if depth == 0 {
            rng.gen_range(0..2)
        } else {
            rng.gen_range(0..9)
        };
        match pick {
            0 => atom("p"),
            1 => atom("q"),
            2 => random_formula(rng, depth - 1).not(),
            3 => random_formula(rng, depth - 1).and(random_formula(rng, depth - 1)),
            4 => random_formula(rng, depth - 1).or(random_formula(rng, depth - 1)),
            5 => random_formula(rng, depth - 1).dia(),
            6 => random_formula(rng, depth - 1).bx(),
            7 => random_formula(rng, depth - 1).exists(),
            _ => random_formula(rng, depth - 1).forall(),
        }
    }

    #[test]
    fn dagger_matches_the_displayed_clauses() {
        assert_eq!(dagger_translation(&atom("p")), fo_atom("p", FoVar::Y, FoVar::X));
        assert_eq!(
            dagger_translation(&fml("<>E p")),
            fo_atom("p", FoVar::Y, FoVar::X)
                .exists(FoVar::X)
                .exists(FoVar::Y)
        );
        assert_eq!(
            dagger_translation(&fml("~(p & <>q)")),
            fo_atom("p", FoVar::Y, FoVar::X)
                .and(fo_atom("q", FoVar::Y, FoVar::X).exists(FoVar::Y))
                .not()
        );
    }

    #[test]
    fn dagger_images_stay_inside_the_guarded_grammar() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf02);
        for _ in 0..200 {
            let phi = random_formula(&mut rng, 3);
            let fo = dagger_translation(&phi);
            assert!(fo.in_dagger_fragment(), "{phi:?} left the fragment");
            assert_eq!(fo.predicates(), phi.signature());
        }
    }

    #[test]
    fn standard_translation_matches_the_displayed_clauses() {
        assert_eq!(
            standard_translation(&atom("q")),
            fo_atom("q", FoVar::Z, FoVar::X)
        );
        assert_eq!(
            standard_translation(&fml("<>q")),
            fo_atom("R", FoVar::Z, FoVar::Y)
                .and(fo_atom("q", FoVar::Y, FoVar::X))
                .exists(FoVar::Y)
        );
        assert_eq!(
            standard_translation(&fml("E q")),
            fo_atom("q", FoVar::Z, FoVar::X).exists(FoVar::X)
        );
        assert_eq!(
            standard_translation(&fml("[]q")),
            fo_atom("R", FoVar::Z, FoVar::Y)
                .implies(fo_atom("q", FoVar::Y, FoVar::X))
                .forall(FoVar::Y)
        );
    }

    #[test]
    fn modal_depth_alternates_the_two_world_variables() {
        // the inner step reuses z, so two world variables suffice at any depth
        assert_eq!(
            standard_translation(&fml("<><>q")),
            fo_atom("R", FoVar::Z, FoVar::Y)
                .and(
                    fo_atom("R", FoVar::Y, FoVar::Z)
                        .and(fo_atom("q", FoVar::Z, FoVar::X))
                        .exists(FoVar::Z)
                )
                .exists(FoVar::Y)
        );
    }

    #[test]
    fn standard_translation_frees_only_the_start_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf03);
        for _ in 0..200 {
            let phi = random_formula(&mut rng, 3);
            let fo = standard_translation(&phi);
            let free = fo.free_vars();
            assert!(
                free.iter().all(|v| *v == FoVar::Z || *v == FoVar::X),
                "{phi:?} frees {free:?}"
            );
        }
    }

    #[test]
    fn text_renderings_are_stable() {
        let dia_q = standard_translation(&fml("<>q"));
        assert_eq!(dia_q.prefix(), "(exists y (and (R z y) (q y x)))");
        assert_eq!(dia_q.tptp(), "? [Y] : (R(Z,Y) & q(Y,X))");
        assert_eq!(dagger_translation(&atom("p")).prefix(), "(p y x)");
        assert_eq!(
            dagger_translation(&fml("[]A ~p")).tptp(),
            "! [Y] : ! [X] : ~(p(Y,X))"
        );
    }

    #[test]
    fn one_point_structures_bridge_trivially() {
        let mut a = FoModel::new(1);
        a.set("p", 0, 0);
        let m = fo_to_square(&a);
        assert_eq!(m.n_worlds(), 1);
        assert!(m.atom_holds("p", 0, 0));
        assert_eq!(square_to_fo(&m, None).unwrap(), a);
    }

    #[test]
    fn non_square_models_are_rejected() {
        let m = KripkeModel::s5(2, 3);
        let err = square_to_fo(&m, None).unwrap_err();
        assert!(err.contains("not a square model"), "{err}");
        let m = KripkeModel::s5(2, 2);
        let err = square_to_fo(&m, Some(&[0, 0])).unwrap_err();
        assert!(err.contains("bijection"), "{err}");
    }

    fn random_square(rng: &mut ChaCha8Rng, n: usize) -> FoModel {
        let mut a = FoModel::new(n);
        for p in ["p", "q"] {
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

    #[test]
    fn the_bridge_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf04);
        for _ in 0..25 {
            let n = rng.gen_range(1..=3);
            let a = random_square(&mut rng, n);
            let back = square_to_fo(&fo_to_square(&a), None).unwrap();
            for p in ["p", "q"] {
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(a.holds(p, i, j), back.holds(p, i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn co_evaluation_agrees_on_random_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf05);
        for round in 0..100 {
            let n = rng.gen_range(1..=3);
            let a = random_square(&mut rng, n);
            let phi = random_formula(&mut rng, 2);
            let fo = dagger_translation(&phi);
            let m = fo_to_square(&a);
            // exercise a nontrivial bijection too: rotate the world roles
            let identity: Vec<usize> = (0..n).collect();
            let rotated: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
            for f in [identity, rotated] {
                let b = square_to_fo(&m, Some(&f)).unwrap();
                for y in 0..n {
                    for x in 0..n {
                        let modal = model_check(&m, f[y], x, &phi).unwrap();
                        assert_eq!(
                            modal,
                            b.eval(&fo, y, x, 0),
                            "round {round}: disagree at ({y}, {x}) on {phi:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn the_separating_pair_is_square_and_co_evaluates() {
        // three worlds by three elements, with the marker atom on the
        // diagonal and one level atom per diagonal point
        let mut m = KripkeModel::s5(3, 3);
        for (i, p) in ["p0", "p1", "p2"].iter().enumerate() {
            m.set_atom("e", i, i);
            m.set_atom(p, i, i);
        }
        let phi = fml(
            "p0 & <>E(p1 & <>E p2) & []A((e <-> p0 | p1 | p2) \
             & (p0 -> ~p1) & (p0 -> ~p2) & (p1 -> ~p0) \
             & (p1 -> ~p2) & (p2 -> ~p0) & (p2 -> ~p1) \
             & (p0 -> [](e -> p0) & A(e -> p0)) \
             & (p1 -> [](e -> p1) & A(e -> p1)) \
             & (p2 -> [](e -> p2) & A(e -> p2)))",
        );
        assert!(model_check(&m, 0, 0, &phi).unwrap());
        let a = square_to_fo(&m, None).unwrap();
        let fo = dagger_translation(&phi);
        for y in 0..3 {
            for x in 0..3 {
                assert_eq!(
                    model_check(&m, y, x, &phi).unwrap(),
                    a.eval(&fo, y, x, 0)
                );
            }
        }
    }
}
