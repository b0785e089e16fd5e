//! Reductions from interpolation and definability problems *modulo an
//! ontology* to plain concept interpolation.
//!
//! All three tasks internalize the ontology through `O^c` (the conjunction
//! of `all U.(~C | D)` over its axioms), which pins the axioms to the
//! evaluation world only — that is exactly the world-local reading of CIs,
//! so prepending `O^c` to the left target and `~O^c` to the right one turns
//! "entailment modulo O" into a plain inclusion between compound concepts.

use super::concept::{ontology_to_concept, rename_outside_sigma, Concept, Ontology};
use crate::formula::Signature;

/// What to reduce: σ-interpolation for an inclusion modulo the ontology,
/// σ-ontology-interpolation (a σ-concept squeezed between `O^c` and the
/// inclusion), or explicit σ-definability of a concept name modulo the
/// ontology.
#[derive(Clone, Debug, PartialEq)]
pub enum OntologyTask {
    IepModulo { left: Concept, right: Concept },
    Oiep { left: Concept, right: Concept },
    EdepModulo { target: String },
}

/// A plain interpolation instance produced by [`reduce_ontology_problem`]:
/// a σ-interpolant for `left ⊑ right` answers the original question.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedInstance {
    pub left: Concept,
    pub right: Concept,
    pub sigma: Signature,
    /// Symbol renaming used to build the primed ontology copy; empty for
    /// the two tasks that need no copy.
    pub renaming: Vec<(String, String)>,
}

impl ReducedInstance {
    pub fn to_json(&self) -> serde_json::Value {
        let mut sigma: Vec<&String> = self.sigma.iter().collect();
        sigma.sort();
        serde_json::json!({
            "left": self.left.pretty(),
            "right": self.right.pretty(),
            "sigma": sigma,
            "renaming": self.renaming.iter().map(|(a, b)| serde_json::json!([a, b])).collect::<Vec<_>>(),
        })
    }
}

/// Reduce an ontology-relative problem to a plain interpolation instance.
///
/// - `IepModulo`: a σ-interpolant for `O^c ⊓ C ⊑ ¬O^c ⊔ D` is one for
///   `C ⊑ D` modulo `O`, and conversely.
/// - `Oiep`: a σ-ontology-interpolant is any σ-concept between `O^c` and
///   `¬C ⊔ D`.
/// - `EdepModulo { target }`: rename every symbol outside σ (the target
///   included, when it is outside) to a fresh primed copy, giving `O′`;
///   the target is explicitly σ-definable modulo `O` iff
///   `(O ∪ O′)^c ⊓ A ⊑ ¬(O ∪ O′)^c ⊔ A′` has a σ-interpolant — which is
///   then the definition itself.
///
/// Outputs are constant-folded, so an empty ontology leaves `(C, D)`
/// untouched.
pub fn reduce_ontology_problem(
    task: &OntologyTask,
    o: &Ontology,
    sigma: &Signature,
) -> ReducedInstance {
    match task {
        OntologyTask::IepModulo { left, right } => {
            let oc = ontology_to_concept(o);
            ReducedInstance {
                left: oc.clone().and(left.clone()).simplify(),
                right: oc.not().or(right.clone()).simplify(),
                sigma: sigma.clone(),
                renaming: Vec::new(),
            }
        }
        OntologyTask::Oiep { left, right } => ReducedInstance {
            left: ontology_to_concept(o).simplify(),
            right: left.clone().not().or(right.clone()).simplify(),
            sigma: sigma.clone(),
            renaming: Vec::new(),
        },
        OntologyTask::EdepModulo { target } => {
            let mut full = o.signature();
            full.insert(target.clone());
            let renaming = rename_outside_sigma(&full, sigma);
            let primed = o.rename(&renaming);
            let both = o.union(&primed);
            let oc = ontology_to_concept(&both);
            let a = Concept::Name(target.clone());
            let a_primed = renaming
                .iter()
                .find(|(from, _)| from == target)
                .map(|(_, to)| Concept::Name(to.clone()))
                .unwrap_or_else(|| a.clone());
            ReducedInstance {
                left: oc.clone().and(a).simplify(),
                right: oc.not().or(a_primed).simplify(),
                sigma: sigma.clone(),
                renaming,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::concept::parse_concept;
    use super::super::decide::{decide_iep_alcu_with_sigma, verify_dl_interpolant};
    use crate::decide::SearchBounds;

    fn con(text: &str) -> Concept {
        parse_concept(text).unwrap()
    }

    fn sig(names: &[&str]) -> Signature {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn worked_kb() -> Ontology {
        let mut o = Ontology::default();
        let mut push = |c: &str, d: &str| o.push_boxed(con(c), con(d));
        push("Top", "S1 | S2");
        push("KR | Databases | Verification", "CS & some uses.Logic");
        push("CS & some uses.Logic", "KR | Databases | Verification");
        push("Databases | Verification", "~some historicAreaOf.AI");
        push("S1 & KR", "CS & some areaOf.AI & some uses.Logic");
        push("S1 & CS & some areaOf.AI & some uses.Logic", "KR");
        push("S2 & KR", "some historicAreaOf.AI");
        push("S2 & some areaOf.AI", "~some uses.Logic");
        o
    }

    #[test]
    fn empty_ontology_collapses_to_the_plain_problem() {
        let task = OntologyTask::IepModulo { left: con("A"), right: con("B | A") };
        let inst = reduce_ontology_problem(&task, &Ontology::default(), &sig(&["A", "B"]));
        assert_eq!(inst.left, con("A"));
        assert_eq!(inst.right, con("B | A"));
        assert!(inst.renaming.is_empty());
    }

    #[test]
    fn definability_reduction_primes_everything_outside_sigma() {
        let sigma = sig(&["CS", "uses", "Logic", "areaOf", "historicAreaOf", "AI"]);
        let task = OntologyTask::EdepModulo { target: "KR".into() };
        let inst = reduce_ontology_problem(&task, &worked_kb(), &sigma);
        let renamed: Vec<&str> = inst.renaming.iter().map(|(a, _)| a.as_str()).collect();
        for outside in ["KR", "Databases", "Verification", "S1", "S2"] {
            assert!(renamed.contains(&outside), "{outside} should be renamed");
        }
        for kept in ["CS", "uses", "Logic", "areaOf", "historicAreaOf", "AI"] {
            assert!(!renamed.contains(&kept), "{kept} is in sigma");
        }
        // the instance mentions both copies, split across its two sides
        assert!(inst.left.signature().contains("KR"));
        assert!(inst.right.signature().iter().any(|s| s.starts_with("KR") && s != "KR"));
    }

    #[test]
    fn worked_kb_definition_solves_the_reduced_instance() {
        let sigma = sig(&["CS", "uses", "Logic", "areaOf", "historicAreaOf", "AI"]);
        let task = OntologyTask::EdepModulo { target: "KR".into() };
        let inst = reduce_ontology_problem(&task, &worked_kb(), &sigma);
        let def = con("CS & some uses.Logic & (some areaOf.AI | some historicAreaOf.AI)");
        let v = verify_dl_interpolant(&def, &inst.left, &inst.right, &inst.sigma, &SearchBounds::uniform(2, 2));
        assert!(v.is_yes(), "{:?}", v.outcome);
    }

    #[test]
    fn ontology_interpolants_check_against_both_reduction_sides() {
        let mut o = Ontology::default();
        o.push_boxed(con("A"), con("B"));
        let task = OntologyTask::Oiep { left: con("A"), right: con("B") };
        let sigma = sig(&["A", "B"]);
        let inst = reduce_ontology_problem(&task, &o, &sigma);
        // the internalized axiom itself is an ontology interpolant
        let good = con("~A | B");
        assert!(verify_dl_interpolant(&good, &inst.left, &inst.right, &sigma, &SearchBounds::uniform(2, 2)).is_yes());
        // a concept that does not follow from O^c is rejected with a witness
        let bad = con("A");
        assert!(verify_dl_interpolant(&bad, &inst.left, &inst.right, &sigma, &SearchBounds::uniform(2, 2)).is_no());
    }

    #[test]
    fn reduction_preserves_decidability_of_easy_instances() {
        // modulo the empty ontology the reduction is plain interpolation,
        // so the decider must reach the same verdicts
        let task = OntologyTask::IepModulo { left: con("A"), right: con("B") };
        let inst = reduce_ontology_problem(&task, &Ontology::default(), &sig(&[]));
        let v = decide_iep_alcu_with_sigma(&inst.left, &inst.right, &inst.sigma, &SearchBounds::uniform(2, 2));
        assert!(v.is_no());
    }

    #[test]
    fn instance_json_names_both_targets() {
        let task = OntologyTask::EdepModulo { target: "A".into() };
        let mut o = Ontology::default();
        o.push_boxed(con("A"), con("B"));
        let inst = reduce_ontology_problem(&task, &o, &sig(&["B"]));
        let js = inst.to_json();
        assert!(js["left"].as_str().unwrap().contains('A'));
        assert!(js["renaming"].as_array().unwrap().iter().any(|p| p[0] == "A"));
    }
}
