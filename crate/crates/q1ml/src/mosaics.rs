//! Types, mosaics and filtrations for S5 models.
//!
//! Over the closure of a formula pair, every world has a world type (the
//! quantified members true there), every element a domain type (the modal
//! members true of it) and every point a full type. Mosaics record which
//! types are realized across the bisimilarity class of a world or element in
//! the two models; a point pairs a type with its mosaic.
//!
//! Two filtrations are built from this data:
//!
//! * [`filtrate_sat`] — the single-model construction: worlds are
//!   (world-type, surjection) copies, elements are (domain-type, k) copies,
//!   and the valuation reads atoms off the surjection's full type, so every
//!   closure member is true at a point exactly when the assigned full type
//!   contains it;
//! * [`filtrate_pair`] — the two-model construction over world/domain
//!   points, which additionally yields the mosaic-equality bisimulation
//!   between the two filtrated models.
//!
//! [`verify_filtration`] re-derives every claim of an artifact by direct
//! model checking and bisimulation verification.

use crate::bisim::{max_bisim_s5, verify_bisimulation, BisimCandidate, S5Bisim};
use crate::formula::{closure_of, closures, ClosureIndex, Formula, Signature};
use crate::kripke::{model_check, Evaluator, Grid, KripkeModel, ModelKind, Point};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

/// Set of closure-member ids (a world, domain or full type depending on the
/// restriction it came from).
pub type TypeSet = BTreeSet<usize>;

/// Pair of type-id sets, one per model: which types are realized across the
/// bisimilarity class in model 1 and in model 2.
pub type Mosaic = (BTreeSet<usize>, BTreeSet<usize>);

/// Per-model tables from worlds/elements/points to type, mosaic and point
/// ids (all ids index the shared lists in [`TypeAnalysis`]).
#[derive(Debug, Clone)]
pub struct ModelTypeTables {
    pub wt: Vec<usize>,
    pub dt: Vec<usize>,
    pub ft: Vec<Vec<usize>>,
    pub wm: Vec<usize>,
    pub dm: Vec<usize>,
    pub wp: Vec<usize>,
    pub dp: Vec<usize>,
}

/// Shared type/mosaic/point structure of a model pair.
#[derive(Debug, Clone)]
pub struct TypeAnalysis {
    pub sigma: Signature,
    pub closure: ClosureIndex,
    pub full_types: Vec<TypeSet>,
    pub world_types: Vec<TypeSet>,
    pub domain_types: Vec<TypeSet>,
    pub world_mosaics: Vec<Mosaic>,
    pub domain_mosaics: Vec<Mosaic>,
    /// A world point is a (world-type id, world-mosaic id) pair.
    pub world_points: Vec<(usize, usize)>,
    /// A domain point is a (domain-type id, domain-mosaic id) pair.
    pub domain_points: Vec<(usize, usize)>,
    pub tables: [ModelTypeTables; 2],
}

impl TypeAnalysis {
    /// Distinct world points realized in model `i`.
    pub fn world_point_count(&self, i: usize) -> usize {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        seen.extend(self.tables[i].wp.iter().copied());
        seen.len()
    }

    pub fn domain_point_count(&self, i: usize) -> usize {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        seen.extend(self.tables[i].dp.iter().copied());
        seen.len()
    }

    pub fn to_json(&self, m1: &KripkeModel, m2: &KripkeModel) -> Value {
        let describe = |m: &KripkeModel, t: &ModelTypeTables| {
            json!({
                "worlds": m.worlds.iter().enumerate().map(|(w, name)| json!({
                    "id": name,
                    "world_type": t.wt[w],
                    "world_mosaic": t.wm[w],
                    "world_point": t.wp[w],
                })).collect::<Vec<_>>(),
                "elements": m.domain.iter().enumerate().map(|(d, name)| json!({
                    "id": name,
                    "domain_type": t.dt[d],
                    "domain_mosaic": t.dm[d],
                    "domain_point": t.dp[d],
                })).collect::<Vec<_>>(),
                "full_types": (0..m.n_worlds()).map(|w| (0..m.n_elems()).map(|d| t.ft[w][d]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })
        };
        json!({
            "closure": self.closure.items.iter().map(|f| f.canonical()).collect::<Vec<_>>(),
            "counts": {
                "full_types": self.full_types.len(),
                "world_types": self.world_types.len(),
                "domain_types": self.domain_types.len(),
                "world_mosaics": self.world_mosaics.len(),
                "domain_mosaics": self.domain_mosaics.len(),
                "world_points": self.world_points.len(),
                "domain_points": self.domain_points.len(),
            },
            "model1": describe(m1, &self.tables[0]),
            "model2": describe(m2, &self.tables[1]),
        })
    }
}

fn intern<T: Ord + Clone>(list: &mut Vec<T>, index: &mut BTreeMap<T, usize>, item: T) -> usize {
    if let Some(&i) = index.get(&item) {
        return i;
    }
    let id = list.len();
    index.insert(item.clone(), id);
    list.push(item);
    id
}

/// Compute world/domain/full types, mosaics and points for a model pair over
/// the closure of `(phi, psi)`. Mosaics are read off the greatest
/// sigma-bisimulations within and across the two models.
pub fn compute_types(
    m1: &KripkeModel,
    m2: &KripkeModel,
    phi: &Formula,
    psi: &Formula,
    sigma: &Signature,
) -> TypeAnalysis {
    assert!(
        m1.kind == ModelKind::Q1S5 && m2.kind == ModelKind::Q1S5,
        "type analysis is defined on S5 models"
    );
    let closure = closures(phi, psi);
    let models = [m1, m2];

    // truth grids of every closure member, per model
    let grids: Vec<Vec<Grid>> = models
        .iter()
        .map(|m| {
            let mut ev = Evaluator::new(m);
            closure.items.iter().map(|f| ev.eval(f)).collect()
        })
        .collect();

    let mut full_types: Vec<TypeSet> = Vec::new();
    let mut full_index: BTreeMap<TypeSet, usize> = BTreeMap::new();
    let mut world_types: Vec<TypeSet> = Vec::new();
    let mut wt_index: BTreeMap<TypeSet, usize> = BTreeMap::new();
    let mut domain_types: Vec<TypeSet> = Vec::new();
    let mut dt_index: BTreeMap<TypeSet, usize> = BTreeMap::new();

    let mut tables: Vec<ModelTypeTables> = Vec::new();
    for (mi, m) in models.iter().enumerate() {
        let (nw, nd) = (m.n_worlds(), m.n_elems());
        let mut wt = Vec::with_capacity(nw);
        let mut dt = Vec::with_capacity(nd);
        let mut ft = vec![vec![0usize; nd]; nw];
        for w in 0..nw {
            let t: TypeSet = closure
                .sub_exists
                .iter()
                .copied()
                .filter(|&i| grids[mi][i].get(w, 0))
                .collect();
            wt.push(intern(&mut world_types, &mut wt_index, t));
        }
        for d in 0..nd {
            let t: TypeSet = closure
                .sub_diamond
                .iter()
                .copied()
                .filter(|&i| grids[mi][i].get(0, d))
                .collect();
            dt.push(intern(&mut domain_types, &mut dt_index, t));
        }
        for w in 0..nw {
            for d in 0..nd {
                let t: TypeSet =
                    (0..closure.len()).filter(|&i| grids[mi][i].get(w, d)).collect();
                ft[w][d] = intern(&mut full_types, &mut full_index, t);
            }
        }
        tables.push(ModelTypeTables { wt, dt, ft, wm: Vec::new(), dm: Vec::new(), wp: Vec::new(), dp: Vec::new() });
    }

    // bisimilarity within and across the models
    let b11 = max_bisim_s5(m1, m1, sigma);
    let b12 = max_bisim_s5(m1, m2, sigma);
    let b22 = max_bisim_s5(m2, m2, sigma);

    let world_related = |i: usize, w: usize, j: usize, v: usize| -> bool {
        match (i, j) {
            (0, 0) => b11.world_related(w, v),
            (0, 1) => b12.world_related(w, v),
            (1, 0) => b12.world_related(v, w),
            (1, 1) => b22.world_related(w, v),
            _ => unreachable!(),
        }
    };
    let elem_related = |i: usize, d: usize, j: usize, e: usize| -> bool {
        match (i, j) {
            (0, 0) => b11.elem_related(d, e),
            (0, 1) => b12.elem_related(d, e),
            (1, 0) => b12.elem_related(e, d),
            (1, 1) => b22.elem_related(d, e),
            _ => unreachable!(),
        }
    };

    let mut world_mosaics: Vec<Mosaic> = Vec::new();
    let mut wm_index: BTreeMap<Mosaic, usize> = BTreeMap::new();
    let mut domain_mosaics: Vec<Mosaic> = Vec::new();
    let mut dm_index: BTreeMap<Mosaic, usize> = BTreeMap::new();
    let mut world_points: Vec<(usize, usize)> = Vec::new();
    let mut wp_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut domain_points: Vec<(usize, usize)> = Vec::new();
    let mut dp_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();

    for i in 0..2 {
        let nw = models[i].n_worlds();
        let nd = models[i].n_elems();
        for w in 0..nw {
            let t1: BTreeSet<usize> = (0..models[0].n_worlds())
                .filter(|&v| world_related(i, w, 0, v))
                .map(|v| tables[0].wt[v])
                .collect();
            let t2: BTreeSet<usize> = (0..models[1].n_worlds())
                .filter(|&v| world_related(i, w, 1, v))
                .map(|v| tables[1].wt[v])
                .collect();
            let wm = intern(&mut world_mosaics, &mut wm_index, (t1, t2));
            tables[i].wm.push(wm);
            let wp = intern(&mut world_points, &mut wp_index, (tables[i].wt[w], wm));
            tables[i].wp.push(wp);
        }
        for d in 0..nd {
            let s1: BTreeSet<usize> = (0..models[0].n_elems())
                .filter(|&e| elem_related(i, d, 0, e))
                .map(|e| tables[0].dt[e])
                .collect();
            let s2: BTreeSet<usize> = (0..models[1].n_elems())
                .filter(|&e| elem_related(i, d, 1, e))
                .map(|e| tables[1].dt[e])
                .collect();
            let dm = intern(&mut domain_mosaics, &mut dm_index, (s1, s2));
            tables[i].dm.push(dm);
            let dp = intern(&mut domain_points, &mut dp_index, (tables[i].dt[d], dm));
            tables[i].dp.push(dp);
        }
    }

    let mut it = tables.into_iter();
    let t0 = it.next().unwrap();
    let t1 = it.next().unwrap();
    TypeAnalysis {
        sigma: sigma.clone(),
        closure,
        full_types,
        world_types,
        domain_types,
        world_mosaics,
        domain_mosaics,
        world_points,
        domain_points,
        tables: [t0, t1],
    }
}

// ---------------------------------------------------------------------------
// Filtration artifacts
// ---------------------------------------------------------------------------

/// One verification check with its counterexamples (empty = pass).
#[derive(Debug, Clone)]
pub struct ReportCheck {
    pub name: String,
    pub counterexamples: Vec<String>,
}

impl ReportCheck {
    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Result of verifying a filtration artifact.
#[derive(Debug, Clone)]
pub struct FiltrationReport {
    pub checks: Vec<ReportCheck>,
}

impl FiltrationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ReportCheck::pass)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass())
            .map(|c| format!("{}: {}", c.name, c.counterexamples.join("; ")))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "pass": c.pass(),
                "counterexamples": c.counterexamples,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Single-model filtration artifact. Worlds of the result are
/// (world-type, surjection-index) copies named `wt<t>.pi<m>`, elements are
/// (domain-type, k) copies named `dt<t>.k<k>`, and `assigned[w][d]` is the
/// full type whose members are exactly the closure formulas true at that
/// point.
#[derive(Debug, Clone)]
pub struct SatFiltration {
    pub phi: Formula,
    pub closure: ClosureIndex,
    pub full_types: Vec<TypeSet>,
    pub model: KripkeModel,
    pub point: Point,
    pub assigned: Vec<Vec<usize>>,
    /// `world_info[w] = (world-type id, rotation index m)`
    pub world_info: Vec<(usize, usize)>,
    /// `elem_info[d] = (domain-type id, copy index k)`
    pub elem_info: Vec<(usize, usize)>,
    /// Number of copies per domain type (= number of realized full types).
    pub n_copies: usize,
    /// Number of surjection tuples used (`|Π|`).
    pub pi_count: usize,
}

/// One side of a pair filtration.
#[derive(Debug, Clone)]
pub struct FiltrationSide {
    pub model: KripkeModel,
    pub point: Point,
    pub assigned: Vec<Vec<usize>>,
    /// `world_info[w] = (world-point id, rotation index m)`
    pub world_info: Vec<(usize, usize)>,
    /// `elem_info[d] = (domain-point id, copy index k)`
    pub elem_info: Vec<(usize, usize)>,
    /// world of the filtrated model → world-mosaic id
    pub world_mosaic: Vec<usize>,
    /// element of the filtrated model → domain-mosaic id
    pub elem_mosaic: Vec<usize>,
}

/// Pair filtration artifact: two filtrated models, their distinguished
/// points, and the mosaic-equality bisimulation between them.
#[derive(Debug, Clone)]
pub struct PairFiltration {
    pub phi: Formula,
    pub psi: Formula,
    pub sigma: Signature,
    pub closure: ClosureIndex,
    pub full_types: Vec<TypeSet>,
    pub sides: [FiltrationSide; 2],
    pub beta: S5Bisim,
    pub n_copies: usize,
    pub pi_count: usize,
}

pub enum FiltrationArtifact {
    Sat(SatFiltration),
    Pair(PairFiltration),
}

/// Deterministic rotation surjections: with ranges sorted and `n >= |range|`,
/// the map `k -> range[(k + m) % |range|]` is onto for every rotation `m`,
/// and every demand "send copy k to full type ft" is met by the rotation
/// `m = (pos(ft) - k) mod |range|`, which is below the largest range size.
/// So taking all rotations `0..max_range_len` realizes the covering property
/// with `|Π| = max range size <= n <= n²`.
fn rotation(range: &[usize], k: usize, m: usize) -> usize {
    range[(k + m) % range.len()]
}

fn filtration_valuation(
    model: &mut KripkeModel,
    closure: &ClosureIndex,
    full_types: &[TypeSet],
    assigned: &[Vec<usize>],
) {
    let preds: Vec<(String, usize)> = closure
        .items
        .iter()
        .filter_map(|f| match f {
            Formula::Atom(p) => Some((p.clone(), closure.id_of(f).unwrap())),
            _ => None,
        })
        .collect();
    for w in 0..model.n_worlds() {
        for d in 0..model.n_elems() {
            for (p, id) in &preds {
                if full_types[assigned[w][d]].contains(id) {
                    model.set_atom(p, w, d);
                }
            }
        }
    }
}

/// Filtration of a single pointed model through the types realized in it.
/// Requires `M, w, d ⊨ phi`; the resulting model satisfies every closure
/// member at a point exactly when the point's assigned full type contains
/// it, and in particular satisfies `phi` at the distinguished point.
pub fn filtrate_sat(
    m: &KripkeModel,
    w: usize,
    d: usize,
    phi: &Formula,
) -> Result<(SatFiltration, FiltrationReport), String> {
    assert!(m.kind == ModelKind::Q1S5, "filtration is defined on S5 models");
    if !model_check(m, w, d, phi).map_err(|e| e.to_string())? {
        return Err(format!(
            "precondition failure: the model does not satisfy the target at ({}, {})",
            m.worlds[w], m.domain[d]
        ));
    }
    let closure = closure_of(phi);
    let mut ev = Evaluator::new(m);
    let grids: Vec<Grid> = closure.items.iter().map(|f| ev.eval(f)).collect();

    let mut full_types: Vec<TypeSet> = Vec::new();
    let mut full_index: BTreeMap<TypeSet, usize> = BTreeMap::new();
    let mut world_types: Vec<TypeSet> = Vec::new();
    let mut wt_index: BTreeMap<TypeSet, usize> = BTreeMap::new();
    let mut domain_types: Vec<TypeSet> = Vec::new();
    let mut dt_index: BTreeMap<TypeSet, usize> = BTreeMap::new();

    let (nw, nd) = (m.n_worlds(), m.n_elems());
    let wt: Vec<usize> = (0..nw)
        .map(|v| {
            let t: TypeSet =
                closure.sub_exists.iter().copied().filter(|&i| grids[i].get(v, 0)).collect();
            intern(&mut world_types, &mut wt_index, t)
        })
        .collect();
    let dt: Vec<usize> = (0..nd)
        .map(|e| {
            let t: TypeSet =
                closure.sub_diamond.iter().copied().filter(|&i| grids[i].get(0, e)).collect();
            intern(&mut domain_types, &mut dt_index, t)
        })
        .collect();
    let mut ft = vec![vec![0usize; nd]; nw];
    for v in 0..nw {
        for e in 0..nd {
            let t: TypeSet = (0..closure.len()).filter(|&i| grids[i].get(v, e)).collect();
            ft[v][e] = intern(&mut full_types, &mut full_index, t);
        }
    }

    // ranges of the surjections, keyed by (world type, domain type); every
    // realized key has a nonempty range because all worlds pair with all
    // elements in a constant-domain model
    let mut ranges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for v in 0..nw {
        for e in 0..nd {
            let r = ranges.entry((wt[v], dt[e])).or_default();
            if !r.contains(&ft[v][e]) {
                r.push(ft[v][e]);
            }
        }
    }
    for r in ranges.values_mut() {
        r.sort_unstable();
    }
    let n = full_types.len();
    let pi_count = ranges.values().map(Vec::len).max().unwrap_or(1);
    assert!(pi_count <= n * n, "surjection count exceeds its bound");

    let wt_ids: Vec<usize> = {
        let mut xs: Vec<usize> = wt.clone();
        xs.sort_unstable();
        xs.dedup();
        xs
    };
    let dt_ids: Vec<usize> = {
        let mut xs: Vec<usize> = dt.clone();
        xs.sort_unstable();
        xs.dedup();
        xs
    };

    let mut world_info = Vec::new();
    let mut world_names = Vec::new();
    for &t in &wt_ids {
        for pi in 0..pi_count {
            world_info.push((t, pi));
            world_names.push(format!("wt{t}.pi{pi}"));
        }
    }
    let mut elem_info = Vec::new();
    let mut elem_names = Vec::new();
    for &t in &dt_ids {
        for k in 0..n {
            elem_info.push((t, k));
            elem_names.push(format!("dt{t}.k{k}"));
        }
    }

    let mut assigned = vec![vec![0usize; elem_info.len()]; world_info.len()];
    for (wi, &(t, pi)) in world_info.iter().enumerate() {
        for (di, &(s, k)) in elem_info.iter().enumerate() {
            let range = &ranges[&(t, s)];
            assigned[wi][di] = rotation(range, k, pi);
        }
    }

    let mut model = KripkeModel::s5(world_info.len(), elem_info.len());
    model.worlds = world_names;
    model.domain = elem_names;
    filtration_valuation(&mut model, &closure, &full_types, &assigned);

    // distinguished point: copy 0 of dt(d), and the rotation that assigns
    // the original full type to it
    let key = (wt[w], dt[d]);
    let m_star = ranges[&key].iter().position(|&x| x == ft[w][d]).unwrap();
    let w_star = world_info.iter().position(|&(t, pi)| t == wt[w] && pi == m_star).unwrap();
    let d_star = elem_info.iter().position(|&(t, k)| t == dt[d] && k == 0).unwrap();

    let artifact = SatFiltration {
        phi: phi.clone(),
        closure,
        full_types,
        model,
        point: (w_star, d_star),
        assigned,
        world_info,
        elem_info,
        n_copies: n,
        pi_count,
    };
    let report = verify_filtration(&FiltrationArtifact::Sat(artifact.clone()));
    Ok((artifact, report))
}

/// Pair filtration: given sigma-bisimilar points satisfying `phi` and
/// `~psi`, build bounded models over world/domain points with the
/// mosaic-equality bisimulation. `sigma` is `sig(phi) ∩ sig(psi)`.
#[allow(clippy::too_many_arguments)]
pub fn filtrate_pair(
    m1: &KripkeModel,
    w1: usize,
    d1: usize,
    m2: &KripkeModel,
    w2: usize,
    d2: usize,
    phi: &Formula,
    psi: &Formula,
) -> Result<(PairFiltration, FiltrationReport), String> {
    let sigma: Signature = phi
        .signature()
        .intersection(&psi.signature())
        .cloned()
        .collect();
    if !model_check(m1, w1, d1, phi).map_err(|e| e.to_string())? {
        return Err("precondition failure: left point does not satisfy the left target".into());
    }
    if model_check(m2, w2, d2, psi).map_err(|e| e.to_string())? {
        return Err("precondition failure: right point does not refute the right target".into());
    }
    let cross = max_bisim_s5(m1, m2, &sigma);
    if !cross.point_related(m1, m2, &sigma, (w1, d1), (w2, d2)) {
        return Err("precondition failure: distinguished points are not sigma-bisimilar".into());
    }

    let ta = compute_types(m1, m2, phi, psi, &sigma);
    let n = ta.full_types.len();

    // surjection ranges keyed by (model, world point, domain point)
    let models = [m1, m2];
    let mut ranges: BTreeMap<(usize, usize, usize), Vec<usize>> = BTreeMap::new();
    for i in 0..2 {
        let t = &ta.tables[i];
        for w in 0..models[i].n_worlds() {
            for d in 0..models[i].n_elems() {
                let r = ranges.entry((i, t.wp[w], t.dp[d])).or_default();
                if !r.contains(&t.ft[w][d]) {
                    r.push(t.ft[w][d]);
                }
            }
        }
    }
    for r in ranges.values_mut() {
        r.sort_unstable();
    }
    let pi_count = ranges.values().map(Vec::len).max().unwrap_or(1);
    assert!(pi_count <= n * n, "surjection count exceeds its bound");

    let mut sides: Vec<FiltrationSide> = Vec::new();
    for i in 0..2 {
        let t = &ta.tables[i];
        let mut wp_ids: Vec<usize> = t.wp.clone();
        wp_ids.sort_unstable();
        wp_ids.dedup();
        let mut dp_ids: Vec<usize> = t.dp.clone();
        dp_ids.sort_unstable();
        dp_ids.dedup();

        let mut world_info = Vec::new();
        let mut world_names = Vec::new();
        let mut world_mosaic = Vec::new();
        for &p in &wp_ids {
            for pi in 0..pi_count {
                world_info.push((p, pi));
                world_names.push(format!("wp{p}.pi{pi}"));
                world_mosaic.push(ta.world_points[p].1);
            }
        }
        let mut elem_info = Vec::new();
        let mut elem_names = Vec::new();
        let mut elem_mosaic = Vec::new();
        for &p in &dp_ids {
            for k in 0..n {
                elem_info.push((p, k));
                elem_names.push(format!("dp{p}.k{k}"));
                elem_mosaic.push(ta.domain_points[p].1);
            }
        }

        let mut assigned = vec![vec![0usize; elem_info.len()]; world_info.len()];
        for (wi, &(wp, pi)) in world_info.iter().enumerate() {
            for (di, &(dp, k)) in elem_info.iter().enumerate() {
                let range = ranges
                    .get(&(i, wp, dp))
                    .unwrap_or_else(|| panic!("unrealized point combination ({i}, {wp}, {dp})"));
                assigned[wi][di] = rotation(range, k, pi);
            }
        }

        let mut model = KripkeModel::s5(world_info.len(), elem_info.len());
        model.worlds = world_names;
        model.domain = elem_names;
        filtration_valuation(&mut model, &ta.closure, &ta.full_types, &assigned);

        let (w_orig, d_orig) = if i == 0 { (w1, d1) } else { (w2, d2) };
        let wp_star = t.wp[w_orig];
        let dp_star = t.dp[d_orig];
        let m_star = ranges[&(i, wp_star, dp_star)]
            .iter()
            .position(|&x| x == t.ft[w_orig][d_orig])
            .unwrap();
        let w_star =
            world_info.iter().position(|&(p, pi)| p == wp_star && pi == m_star).unwrap();
        let d_star = elem_info.iter().position(|&(p, k)| p == dp_star && k == 0).unwrap();

        sides.push(FiltrationSide {
            model,
            point: (w_star, d_star),
            assigned,
            world_info,
            elem_info,
            world_mosaic,
            elem_mosaic,
        });
    }

    // mosaic-equality bisimulation between the two filtrated models
    let mut beta1 = Grid::new(sides[0].model.n_worlds(), sides[1].model.n_worlds());
    for (a, &ma) in sides[0].world_mosaic.iter().enumerate() {
        for (b, &mb) in sides[1].world_mosaic.iter().enumerate() {
            if ma == mb {
                beta1.set(a, b, true);
            }
        }
    }
    let mut beta2 = Grid::new(sides[0].model.n_elems(), sides[1].model.n_elems());
    for (a, &ma) in sides[0].elem_mosaic.iter().enumerate() {
        for (b, &mb) in sides[1].elem_mosaic.iter().enumerate() {
            if ma == mb {
                beta2.set(a, b, true);
            }
        }
    }

    let mut it = sides.into_iter();
    let s0 = it.next().unwrap();
    let s1 = it.next().unwrap();
    let artifact = PairFiltration {
        phi: phi.clone(),
        psi: psi.clone(),
        sigma,
        closure: ta.closure,
        full_types: ta.full_types,
        sides: [s0, s1],
        beta: S5Bisim { beta1, beta2 },
        n_copies: n,
        pi_count,
    };
    let report = verify_filtration(&FiltrationArtifact::Pair(artifact.clone()));
    Ok((artifact, report))
}

/// Re-derive every claim of a filtration artifact: the type-truth invariant
/// (each closure member holds at a point iff the assigned full type contains
/// it), target satisfaction at the distinguished points, the bisimulation
/// conditions and the surjection-count bound.
pub fn verify_filtration(artifact: &FiltrationArtifact) -> FiltrationReport {
    let mut checks = Vec::new();
    let type_truth = |name: &str,
                      model: &KripkeModel,
                      closure: &ClosureIndex,
                      full_types: &[TypeSet],
                      assigned: &[Vec<usize>]|
     -> ReportCheck {
        let mut ev = Evaluator::new(model);
        let mut bad = Vec::new();
        for (i, f) in closure.items.iter().enumerate() {
            let grid = ev.eval(f);
            for w in 0..model.n_worlds() {
                for d in 0..model.n_elems() {
                    let claimed = full_types[assigned[w][d]].contains(&i);
                    if grid.get(w, d) != claimed {
                        bad.push(format!(
                            "{} at ({}, {}): holds={}, assigned type says {}",
                            f.canonical(),
                            model.worlds[w],
                            model.domain[d],
                            grid.get(w, d),
                            claimed
                        ));
                    }
                }
            }
        }
        ReportCheck { name: name.to_string(), counterexamples: bad }
    };

    match artifact {
        FiltrationArtifact::Sat(a) => {
            checks.push(type_truth("type-truth invariant", &a.model, &a.closure, &a.full_types, &a.assigned));
            let holds = model_check(&a.model, a.point.0, a.point.1, &a.phi).unwrap_or(false);
            checks.push(ReportCheck {
                name: "distinguished point satisfies the target".into(),
                counterexamples: if holds { vec![] } else { vec!["target fails".into()] },
            });
            checks.push(ReportCheck {
                name: "surjection count within bound".into(),
                counterexamples: if a.pi_count <= a.n_copies * a.n_copies.max(1) {
                    vec![]
                } else {
                    vec![format!("|Pi| = {} exceeds n² = {}", a.pi_count, a.n_copies * a.n_copies)]
                },
            });
        }
        FiltrationArtifact::Pair(a) => {
            for (i, side) in a.sides.iter().enumerate() {
                checks.push(type_truth(
                    &format!("type-truth invariant (model {})", i + 1),
                    &side.model,
                    &a.closure,
                    &a.full_types,
                    &side.assigned,
                ));
            }
            let left = model_check(&a.sides[0].model, a.sides[0].point.0, a.sides[0].point.1, &a.phi)
                .unwrap_or(false);
            let right = model_check(&a.sides[1].model, a.sides[1].point.0, a.sides[1].point.1, &a.psi)
                .unwrap_or(true);
            checks.push(ReportCheck {
                name: "distinguished points satisfy the targets".into(),
                counterexamples: match (left, right) {
                    (true, false) => vec![],
                    (false, _) => vec!["left target fails".into()],
                    (_, true) => vec!["right target holds (should be refuted)".into()],
                },
            });
            let violations = verify_bisimulation(
                &a.sides[0].model,
                &a.sides[1].model,
                &a.sigma,
                &BisimCandidate::S5(&a.beta),
            );
            checks.push(ReportCheck { name: "mosaic-equality bisimulation".into(), counterexamples: violations });
            let related = a.beta.point_related(
                &a.sides[0].model,
                &a.sides[1].model,
                &a.sigma,
                a.sides[0].point,
                a.sides[1].point,
            );
            checks.push(ReportCheck {
                name: "distinguished points are related".into(),
                counterexamples: if related { vec![] } else { vec!["points unrelated".into()] },
            });
            // the bisimulation must be exactly mosaic equality as tabulated
            let mut mism = Vec::new();
            for w in 0..a.sides[0].model.n_worlds() {
                for v in 0..a.sides[1].model.n_worlds() {
                    let expect = a.sides[0].world_mosaic[w] == a.sides[1].world_mosaic[v];
                    if a.beta.world_related(w, v) != expect {
                        mism.push(format!("beta1 at ({w}, {v})"));
                    }
                }
            }
            for d in 0..a.sides[0].model.n_elems() {
                for e in 0..a.sides[1].model.n_elems() {
                    let expect = a.sides[0].elem_mosaic[d] == a.sides[1].elem_mosaic[e];
                    if a.beta.elem_related(d, e) != expect {
                        mism.push(format!("beta2 at ({d}, {e})"));
                    }
                }
            }
            checks.push(ReportCheck { name: "bisimulation matches mosaic tables".into(), counterexamples: mism });
            checks.push(ReportCheck {
                name: "surjection count within bound".into(),
                counterexamples: if a.pi_count <= a.n_copies * a.n_copies.max(1) {
                    vec![]
                } else {
                    vec![format!("|Pi| = {} exceeds n² = {}", a.pi_count, a.n_copies * a.n_copies)]
                },
            });
        }
    }
    FiltrationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, parse};

    fn sig(names: &[&str]) -> Signature {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_point_model_has_one_of_each() {
        let mut m = KripkeModel::s5(1, 1);
        m.set_atom("p", 0, 0);
        let phi = atom("p");
        let ta = compute_types(&m, &m, &phi, &phi, &sig(&["p"]));
        assert_eq!(ta.full_types.len(), 1);
        assert_eq!(ta.world_types.len(), 1);
        assert_eq!(ta.domain_types.len(), 1);
        assert_eq!(ta.world_mosaics.len(), 1);
        assert_eq!(ta.domain_mosaics.len(), 1);
        assert_eq!(ta.world_point_count(0), 1);
        assert_eq!(ta.domain_point_count(1), 1);
    }

    #[test]
    fn full_type_restricts_to_world_and_domain_type() {
        let mut m1 = KripkeModel::s5(2, 2);
        m1.set_atom("p", 0, 0);
        m1.set_atom("q", 1, 1);
        let mut m2 = KripkeModel::s5(2, 1);
        m2.set_atom("p", 1, 0);
        let phi = parse("E <>p").unwrap();
        let psi = parse("<>q | E p").unwrap();
        let ta = compute_types(&m1, &m2, &phi, &psi, &sig(&["p"]));
        let models = [&m1, &m2];
        for i in 0..2 {
            let t = &ta.tables[i];
            for w in 0..models[i].n_worlds() {
                for d in 0..models[i].n_elems() {
                    let ft = &ta.full_types[t.ft[w][d]];
                    let wt: TypeSet = ft
                        .iter()
                        .copied()
                        .filter(|i| ta.closure.sub_exists.contains(i))
                        .collect();
                    let dt: TypeSet = ft
                        .iter()
                        .copied()
                        .filter(|i| ta.closure.sub_diamond.contains(i))
                        .collect();
                    assert_eq!(wt, ta.world_types[t.wt[w]]);
                    assert_eq!(dt, ta.domain_types[t.dt[d]]);
                }
            }
        }
    }

    #[test]
    fn bisimilar_worlds_share_mosaics() {
        // two models with sigma-bisimilar but differently-presented worlds
        let mut m1 = KripkeModel::s5(2, 1);
        m1.set_atom("p", 0, 0);
        m1.set_atom("q", 0, 0);
        let mut m2 = KripkeModel::s5(2, 1);
        m2.set_atom("p", 0, 0);
        let sigma = sig(&["p"]);
        let phi = parse("<>p").unwrap();
        let psi = parse("p & <>p").unwrap();
        let ta = compute_types(&m1, &m2, &phi, &psi, &sigma);
        let cross = max_bisim_s5(&m1, &m2, &sigma);
        for w in 0..2 {
            for v in 0..2 {
                if cross.world_related(w, v) {
                    assert_eq!(ta.tables[0].wm[w], ta.tables[1].wm[v], "worlds {w}/{v}");
                }
            }
        }
        for d in 0..1 {
            for e in 0..1 {
                if cross.elem_related(d, e) {
                    assert_eq!(ta.tables[0].dm[d], ta.tables[1].dm[e]);
                }
            }
        }
    }

    #[test]
    fn trivial_sat_filtration() {
        let mut m = KripkeModel::s5(1, 1);
        m.set_atom("p", 0, 0);
        let (f, report) = filtrate_sat(&m, 0, 0, &atom("p")).unwrap();
        assert!(report.passed(), "{:?}", report.failures());
        assert!(model_check(&f.model, f.point.0, f.point.1, &atom("p")).unwrap());
        assert_eq!(f.model.n_worlds(), 1);
        assert_eq!(f.model.n_elems(), 1);
    }

    #[test]
    fn sat_filtration_preserves_a_modal_target() {
        let mut m = KripkeModel::s5(3, 2);
        m.set_atom("p", 0, 0);
        m.set_atom("p", 1, 1);
        m.set_atom("q", 2, 0);
        let phi = parse("p & <>E q & []E (p | q)").unwrap();
        if model_check(&m, 0, 0, &phi).unwrap() {
            let (f, report) = filtrate_sat(&m, 0, 0, &phi).unwrap();
            assert!(report.passed(), "{:?}", report.failures());
            // every full type of the filtrated model is realized in the original
            let mut ev = Evaluator::new(&f.model);
            let grids: Vec<Grid> = f.closure.items.iter().map(|x| ev.eval(x)).collect();
            for w in 0..f.model.n_worlds() {
                for d in 0..f.model.n_elems() {
                    let t: TypeSet =
                        (0..f.closure.len()).filter(|&i| grids[i].get(w, d)).collect();
                    assert!(f.full_types.contains(&t), "new full type appeared");
                }
            }
        } else {
            panic!("fixture should satisfy the target");
        }
    }

    #[test]
    fn precondition_violation_is_an_error() {
        let m = KripkeModel::s5(1, 1);
        let err = filtrate_sat(&m, 0, 0, &atom("p")).unwrap_err();
        assert!(err.contains("precondition"), "{err}");
    }

    #[test]
    fn trivial_pair_filtration() {
        let mut m = KripkeModel::s5(1, 1);
        m.set_atom("p", 0, 0);
        let phi = atom("p");
        let psi = atom("p").not();
        // p and ~(~p) share sigma {p}; right point must refute ~p, i.e. satisfy p
        let (f, report) = filtrate_pair(&m, 0, 0, &m, 0, 0, &phi, &psi).unwrap();
        assert!(report.passed(), "{:?}", report.failures());
        assert!(f.beta.point_related(
            &f.sides[0].model,
            &f.sides[1].model,
            &f.sigma,
            f.sides[0].point,
            f.sides[1].point
        ));
    }

    #[test]
    fn pair_filtration_on_distinct_models() {
        // sigma = {p} and p holds everywhere in both models, so the full
        // relations are sigma-bisimulations; r and s are private to one side
        let mut m1 = KripkeModel::s5(2, 2);
        let mut m2 = KripkeModel::s5(2, 1);
        for w in 0..2 {
            for d in 0..2 {
                m1.set_atom("p", w, d);
            }
            m2.set_atom("p", w, 0);
        }
        m1.set_atom("r", 1, 0);
        let phi = parse("p & E <>r").unwrap();
        let psi = parse("p -> A <>s").unwrap();
        let (f, report) = filtrate_pair(&m1, 0, 0, &m2, 0, 0, &phi, &psi).unwrap();
        assert!(report.passed(), "{:?}", report.failures());
        assert!(model_check(&f.sides[0].model, f.sides[0].point.0, f.sides[0].point.1, &phi).unwrap());
        assert!(!model_check(&f.sides[1].model, f.sides[1].point.0, f.sides[1].point.1, &psi).unwrap());
    }

    #[test]
    fn mutation_is_detected() {
        let mut m = KripkeModel::s5(2, 2);
        m.set_atom("p", 0, 0);
        m.set_atom("q", 1, 0);
        let phi = parse("p & <>q").unwrap();
        let (mut f, report) = filtrate_sat(&m, 0, 0, &phi).unwrap();
        assert!(report.passed());
        // flip one valuation bit
        let was = f.model.atom_holds("p", 0, 0);
        if was {
            f.model.val.get_mut("p").unwrap().set(0, 0, false);
        } else {
            f.model.set_atom("p", 0, 0);
        }
        let mutated = verify_filtration(&FiltrationArtifact::Sat(f));
        assert!(!mutated.passed(), "mutation must be caught");
    }

    #[test]
    fn report_json_shape() {
        let mut m = KripkeModel::s5(1, 1);
        m.set_atom("p", 0, 0);
        let (_, report) = filtrate_sat(&m, 0, 0, &atom("p")).unwrap();
        let v = report.to_json();
        assert_eq!(v["passed"], true);
        assert!(v["checks"].as_array().unwrap().len() >= 3);
    }
}
