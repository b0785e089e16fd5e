//! The modal description logic `S5_ALCu`: concepts over concept and role
//! names with world modalities and the universal role, two-dimensional DL
//! models, triple bisimulations, bounded entailment and interpolant-existence
//! deciders, the ontology-problem reductions, the full-mosaic pair
//! filtration, and the standpoint-ontology encoder.

mod bisim;
mod concept;
mod decide;
mod filtrate;
mod model;
mod reduce;
mod search;
mod standpoint;

pub use bisim::{identity_triple, max_bisim_alcu, verify_triple_bisim, TripleBisim};
pub use decide::{
    completeness_bound_alcu, concept_tautology, decide_iep_alcu, decide_iep_alcu_with_sigma,
    dl_global_rule, entails_bounded, verify_dl_definition, verify_dl_interpolant,
};

pub use filtrate::{filtrate_pair_alcu, verify_dl_filtration, DlFiltrationSide, DlPairFiltration};

pub use reduce::{reduce_ontology_problem, OntologyTask, ReducedInstance};
pub use standpoint::{
    encode_standpoint, encode_standpoint_inclusion, parse_standpoint_inclusion,
    parse_standpoint_ontology, sp_countermodel, standpoint_expr_concept, SpAxiom, SpConcept,
    SpError, SpExpr, SpOntology, SpStructure,
};

pub use concept::{
    bottom, cname, concept_to_formula, conj, disj, formula_to_concept, ontology_to_concept,
    parse_concept, parse_inclusion, rename_outside_sigma, Concept, ConceptClosure, Ontology,
    UNIVERSAL_ROLE,
};
pub use model::{
    axioms_hold_at, dl_model_check, dl_model_check_named, inclusion_holds_at, DlError, DlModel,
    DlPoint,
};
pub use search::{
    find_dl_model, find_ontology_countermodel, for_each_dl_model, for_each_dl_model_up_to,
    CompiledConcept,
};
