//! Synthesis of analytic geometric rules for a labelled modal sequent
//! calculus, with frame-correspondence checking.
//!
//! The crate provides, end to end:
//!
//! - a parser, printer and normal-form machinery for classical modal
//!   formulas ([`formula`]);
//! - a syntactic classifier that decomposes formulas into skeleton and
//!   parts and decides membership in the supported fragment ([`classify`]);
//! - a labelled sequent calculus with equality and synthesized geometric
//!   rules, including a proof checker and renderers ([`calculus`]);
//! - the rule-synthesis pipeline itself ([`massa`]): from an accepted
//!   formula it produces an analytic geometric rule together with a cut-free
//!   derivation of the formula in the calculus extended by that rule;
//! - first-order frame conditions read off from such rules, with a
//!   validating parser and an equivalence-preserving simplifier ([`fo`]);
//! - exhaustive Kripke-frame semantics for both the modal and the
//!   first-order side, used to verify that a formula and its frame
//!   condition define the same frame class up to a given size
//!   ([`semantics`]);
//! - a seeded generator of formulas from the supported fragment, for
//!   property testing ([`corpus`]).

pub mod calculus;
pub mod classify;
pub mod corpus;
pub mod fo;
pub mod formula;
pub mod massa;
pub mod semantics;

pub use calculus::{
    apply_rule, axiom_latex, check_proof, instantiate_geometric, latex_formula, render_latex,
    render_text, rule_latex, ApplyError, Choice, Colour, GeometricRule, InstantiateError, Label,
    LabelledFormula, ProofCheck, ProofError, ProofTree, RelAtom, RulePremise, RuleTag, Sequent,
    Side,
};
pub use classify::{classify, BetaPart, Classification, ConjunctAnalysis, DeltaPart};
pub use fo::{
    parse_fo, read_off_axiom, simplify_axiom, validate_geometric, Disjunct, FoAtom, FoFormula,
    GeometricAxiom, NotGeometric,
};
pub use formula::{parse, Formula, SyntaxError, Template};
pub use massa::{
    run, ConjunctRun, MassaFailure, MassaOutcome, MassaSuccess, RunReport, Stage,
};
pub use corpus::{corpus, CorpusParams};
pub use semantics::{
    corresponds, fo_equivalent, frame_satisfies, frame_validates, frames, truth_set_in,
    Correspondence, Frame, Model, SemanticsError, ValidationBudget,
};
