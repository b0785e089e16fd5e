//! One-variable quantified modal logic (`Q1S5`, `Q1K`) and the modal
//! description logic `S5_ALCu`, with the machinery needed to decide
//! interpolant existence and explicit-definition existence on finite models:
//!
//! * [`formula`] — formula AST, parser/printer, normalization, closures;
//! * [`kripke`] — constant-domain Kripke models, model checking, enumeration;
//! * [`search`] — bounded three-valued model search (the engine behind
//!   satisfiability, validity and the pair loops in [`decide`]);
//! * [`bisim`] — greatest bisimulations (general, S5-pair, finite-depth);
//! * [`mosaics`] — types, mosaics and filtration constructions;
//! * [`decide`] — verdict-producing deciders and reductions;
//! * [`charform`] — characteristic formulas up to depth-k bisimilarity;
//! * [`alcu`] — concepts, ontologies, DL models, DL bisimulations,
//!   ontology-mediated reductions and standpoint encoding;
//! * [`translate`] — two-variable first-order translations and the
//!   square-model bridge;
//! * [`gallery`] — built-in worked examples with machine-checkable facts;
//! * [`testgen`] — seeded random generators used by the property suites.

pub mod alcu;
pub mod bisim;
pub mod charform;
pub mod decide;
pub mod formula;
pub mod gallery;
pub mod kripke;
pub mod mosaics;
pub mod search;
pub mod testgen;
pub mod translate;
