//! Syntactic classification of modal formulas.
//!
//! A formula is split, after conversion to negation normal form, into a
//! conjunction of *definite* formulas: each conjunct consists of an outer
//! layer built from disjunctions and boxes (the skeleton, represented as a
//! [`Template`]) whose holes are filled with *parts* built from
//! conjunctions, diamonds, literals and constants. Parts carrying exactly
//! one negated variable supply that variable (the part's *critical*
//! variable); parts with no negated variable are demanded by the formula.
//! The dependence order collects, for every supplying part, the pairs
//! `(a, b)` where `a` occurs positively in a part whose critical variable is
//! `b`; the formula is accepted only when this order is acyclic, and is
//! Sahlqvist when the order is empty.

use crate::formula::{Formula, Template};
use serde_json::{json, Value};
use std::collections::BTreeSet;

/// A part with exactly one negated variable occurrence: it can supply a
/// minimal interpretation for that variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaPart {
    pub formula: Formula,
    /// The variable occurring negated in the part.
    pub critical: String,
}

/// A part with only positive variable occurrences (or none at all).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaPart {
    pub formula: Formula,
    /// The distinct variables of the part, in occurrence order.
    pub vars: Vec<String>,
}

/// The decomposition of one definite conjunct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjunctAnalysis {
    pub conjunct: Formula,
    /// Skeleton of the conjunct; hole names refer to the parts below.
    pub skeleton: Template,
    pub betas: Vec<BetaPart>,
    pub deltas: Vec<DeltaPart>,
    /// Dependence order: `(a, b)` records that `a` occurs positively in a
    /// part critical for `b` (read `a` strictly below `b`).
    pub omega: Vec<(String, String)>,
    /// True when the dependence order is empty.
    pub sahlqvist: bool,
    /// True when the whole input already was a single definite conjunct.
    pub definite: bool,
}

/// Result of [`classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Reserved for inputs outside the supported connective set; the
    /// classical modal language handled here always normalizes, so this is
    /// currently never produced.
    NotNnfReducible { reason: String },
    NotAnalyticInductive { reason: String },
    AnalyticInductive { conjuncts: Vec<ConjunctAnalysis> },
}

impl Classification {
    pub fn analytic_inductive(&self) -> bool {
        matches!(self, Classification::AnalyticInductive { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            Classification::NotNnfReducible { reason } => json!({
                "status": "not_nnf_reducible",
                "reason": reason,
            }),
            Classification::NotAnalyticInductive { reason } => json!({
                "status": "not_analytic_inductive",
                "reason": reason,
            }),
            Classification::AnalyticInductive { conjuncts } => json!({
                "status": "analytic_inductive",
                "definite": conjuncts.iter().all(|c| c.definite),
                "sahlqvist": conjuncts.iter().all(|c| c.sahlqvist),
                "conjuncts": conjuncts.iter().map(ConjunctAnalysis::to_json).collect::<Vec<_>>(),
            }),
        }
    }
}

impl ConjunctAnalysis {
    pub fn to_json(&self) -> Value {
        json!({
            "conjunct": self.conjunct.to_string(),
            "skeleton": self.skeleton.to_string(),
            "betas": self.betas.iter().map(|b| json!({
                "formula": b.formula.to_string(),
                "critical": b.critical,
            })).collect::<Vec<_>>(),
            "deltas": self.deltas.iter().map(|d| json!({
                "formula": d.formula.to_string(),
                "vars": d.vars,
            })).collect::<Vec<_>>(),
            "omega": self.omega.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "sahlqvist": self.sahlqvist,
            "definite": self.definite,
        })
    }
}

/// Classify a formula, normalizing it first.
pub fn classify(f: &Formula) -> Classification {
    let nnf = f.to_nnf();
    let conjuncts = normalize_definite(&nnf);
    let definite = conjuncts.len() == 1 && conjuncts[0] == nnf;
    let mut out = Vec::new();
    for c in &conjuncts {
        match analyze_conjunct(c, definite) {
            Ok(a) => out.push(a),
            Err(reason) => return Classification::NotAnalyticInductive { reason },
        }
    }
    Classification::AnalyticInductive { conjuncts: out }
}

// ---------------------------------------------------------------------------
// Normalization into definite conjuncts
// ---------------------------------------------------------------------------

fn box_free(f: &Formula) -> bool {
    match f {
        Formula::Box(_) => false,
        _ => f.children().iter().all(|c| box_free(c)),
    }
}

fn cross(a: Vec<Formula>, b: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    for x in &a {
        for y in &b {
            out.push(join(x.clone(), y.clone()));
        }
    }
    out
}

fn or_join(mut fs: Vec<Formula>) -> Formula {
    let mut out = fs.pop().expect("non-empty disjunct list");
    while let Some(f) = fs.pop() {
        out = Formula::or(f, out);
    }
    out
}

/// Rewrite a box-free subtree into a list of formulas over conjunctions,
/// diamonds and literals whose disjunction is equivalent to the input
/// (disjunctions distribute out of conjunctions and diamonds).
fn distribute(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::Or(a, b) => {
            let mut out = distribute(a);
            out.extend(distribute(b));
            out
        }
        Formula::And(a, b) => cross(distribute(a), distribute(b), Formula::and),
        Formula::Dia(a) => distribute(a).into_iter().map(Formula::dia).collect(),
        _ => vec![f.clone()],
    }
}

/// Split a formula in negation normal form into definite conjuncts: boxes
/// distribute over conjunctions, conjunctions under the skeleton split the
/// formula, and disjunctions inside box-free part regions distribute
/// outwards. The conjunction of the returned formulas is equivalent to the
/// input.
fn normalize_definite(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::Or(a, b) => cross(normalize_definite(a), normalize_definite(b), Formula::or),
        Formula::And(a, b) => {
            if box_free(f) {
                vec![or_join(distribute(f))]
            } else {
                let mut out = normalize_definite(a);
                out.extend(normalize_definite(b));
                out
            }
        }
        Formula::Box(a) => normalize_definite(a).into_iter().map(Formula::boxed).collect(),
        Formula::Dia(a) => {
            if box_free(a) {
                vec![or_join(distribute(a).into_iter().map(Formula::dia).collect())]
            } else {
                vec![f.clone()]
            }
        }
        _ => vec![f.clone()],
    }
}

// ---------------------------------------------------------------------------
// Decomposition of one conjunct
// ---------------------------------------------------------------------------

fn path_str(path: &[u8]) -> String {
    if path.is_empty() {
        "the root".to_string()
    } else {
        let parts: Vec<String> = path.iter().map(u8::to_string).collect();
        format!("position {}", parts.join("."))
    }
}

/// Parts may contain only conjunctions, diamonds, literals and constants.
fn check_part(part: &Formula, f: &Formula, root: &[u8]) -> Result<(), String> {
    match f {
        Formula::And(a, b) => {
            check_part(part, a, root)?;
            check_part(part, b, root)
        }
        Formula::Dia(a) => check_part(part, a, root),
        Formula::Atom(_) | Formula::Bot | Formula::Top => Ok(()),
        Formula::Not(inner) if matches!(**inner, Formula::Atom(_)) => Ok(()),
        Formula::Or(..) => Err(format!(
            "the part `{part}` at {} contains the disjunction `{f}`, which belongs to the skeleton layer",
            path_str(root)
        )),
        Formula::Box(..) => Err(format!(
            "the part `{part}` at {} contains the box formula `{f}`, which belongs to the skeleton layer",
            path_str(root)
        )),
        Formula::Imp(..) | Formula::Not(..) => Err(format!(
            "the part `{part}` at {} contains `{f}`, which is not in negation normal form",
            path_str(root)
        )),
    }
}

fn collect_template(
    f: &Formula,
    path: &mut Vec<u8>,
    parts: &mut Vec<(Formula, Vec<u8>)>,
) -> Result<Template, String> {
    match f {
        Formula::Or(a, b) => {
            path.push(0);
            let ta = collect_template(a, path, parts)?;
            path.pop();
            path.push(1);
            let tb = collect_template(b, path, parts)?;
            path.pop();
            Ok(Template::Or(Box::new(ta), Box::new(tb)))
        }
        Formula::Box(a) => {
            path.push(0);
            let t = collect_template(a, path, parts)?;
            path.pop();
            Ok(Template::Box(Box::new(t)))
        }
        other => {
            check_part(other, other, path)?;
            parts.push((other.clone(), path.clone()));
            Ok(Template::Hole(format!("{}", parts.len() - 1)))
        }
    }
}

fn rename_template(t: &Template, names: &[String]) -> Template {
    match t {
        Template::Hole(i) => {
            let idx: usize = i.parse().expect("placeholder index");
            Template::Hole(names[idx].clone())
        }
        Template::Or(a, b) => Template::Or(
            Box::new(rename_template(a, names)),
            Box::new(rename_template(b, names)),
        ),
        Template::Box(a) => Template::Box(Box::new(rename_template(a, names))),
    }
}

enum Kind {
    Beta(String),
    Delta(Vec<String>),
}

fn analyze_conjunct(c: &Formula, definite: bool) -> Result<ConjunctAnalysis, String> {
    let mut parts: Vec<(Formula, Vec<u8>)> = Vec::new();
    let raw_template = collect_template(c, &mut Vec::new(), &mut parts)?;

    let mut kinds = Vec::new();
    for (pf, path) in &parts {
        let occs = pf.atom_occurrences();
        let negs: Vec<&String> = occs
            .iter()
            .filter(|o| !o.positive)
            .map(|o| &o.variable)
            .collect();
        match negs.len() {
            0 => {
                let mut vars = Vec::new();
                for o in &occs {
                    if !vars.contains(&o.variable) {
                        vars.push(o.variable.clone());
                    }
                }
                kinds.push(Kind::Delta(vars));
            }
            1 => kinds.push(Kind::Beta(negs[0].clone())),
            n => {
                return Err(format!(
                    "the part `{pf}` at {} has {n} negated variable occurrences; a supplying part must have exactly one",
                    path_str(path)
                ))
            }
        }
    }

    let beta_count = kinds.iter().filter(|k| matches!(k, Kind::Beta(_))).count();
    let delta_count = kinds.len() - beta_count;
    let (mut bi, mut di) = (0usize, 0usize);
    let names: Vec<String> = kinds
        .iter()
        .map(|k| match k {
            Kind::Beta(_) => {
                bi += 1;
                if beta_count == 1 {
                    "x".to_string()
                } else {
                    format!("x{bi}")
                }
            }
            Kind::Delta(_) => {
                di += 1;
                if delta_count == 1 {
                    "y".to_string()
                } else {
                    format!("y{di}")
                }
            }
        })
        .collect();
    let skeleton = rename_template(&raw_template, &names);

    let mut betas = Vec::new();
    let mut deltas = Vec::new();
    let mut omega: Vec<(String, String)> = Vec::new();
    for (i, k) in kinds.iter().enumerate() {
        match k {
            Kind::Beta(critical) => {
                for occ in parts[i].0.atom_occurrences() {
                    if occ.positive {
                        let edge = (occ.variable.clone(), critical.clone());
                        if !omega.contains(&edge) {
                            omega.push(edge);
                        }
                    }
                }
                betas.push(BetaPart {
                    formula: parts[i].0.clone(),
                    critical: critical.clone(),
                });
            }
            Kind::Delta(vars) => deltas.push(DeltaPart {
                formula: parts[i].0.clone(),
                vars: vars.clone(),
            }),
        }
    }

    // The strict order generated by the recorded pairs must be irreflexive.
    let mut closure: BTreeSet<(String, String)> = omega.iter().cloned().collect();
    loop {
        let mut grew = false;
        let snapshot: Vec<(String, String)> = closure.iter().cloned().collect();
        for (a, b) in &snapshot {
            for (c2, d) in &snapshot {
                if b == c2 && closure.insert((a.clone(), d.clone())) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    if let Some((v, _)) = closure.iter().find(|(a, b)| a == b) {
        return Err(format!(
            "the dependence order on variables has a cycle: `{v}` ends up strictly below itself"
        ));
    }

    let sahlqvist = omega.is_empty();
    Ok(ConjunctAnalysis {
        conjunct: c.clone(),
        skeleton,
        betas,
        deltas,
        omega,
        sahlqvist,
        definite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::semantics::{frames, truth_set_in};

    fn classified(s: &str) -> Vec<ConjunctAnalysis> {
        match classify(&parse(s).unwrap()) {
            Classification::AnalyticInductive { conjuncts } => conjuncts,
            other => panic!("`{s}` was not accepted: {other:?}"),
        }
    }

    fn rejected(s: &str) -> String {
        match classify(&parse(s).unwrap()) {
            Classification::NotAnalyticInductive { reason } => reason,
            other => panic!("`{s}` was not rejected: {other:?}"),
        }
    }

    fn beta_strings(c: &ConjunctAnalysis) -> Vec<(String, String)> {
        c.betas
            .iter()
            .map(|b| (b.formula.to_string(), b.critical.clone()))
            .collect()
    }

    fn delta_strings(c: &ConjunctAnalysis) -> Vec<String> {
        c.deltas.iter().map(|d| d.formula.to_string()).collect()
    }

    #[test]
    fn symmetry_shape_is_sahlqvist() {
        let cs = classified("dia p -> box p");
        assert_eq!(cs.len(), 1);
        let c = &cs[0];
        assert_eq!(c.conjunct.to_string(), "box ~p | box p");
        assert_eq!(c.skeleton.to_string(), "box x | box y");
        assert_eq!(beta_strings(c), vec![("~p".to_string(), "p".to_string())]);
        assert_eq!(delta_strings(c), vec!["p".to_string()]);
        assert!(c.omega.is_empty());
        assert!(c.sahlqvist);
        assert!(c.definite);
    }

    #[test]
    fn seriality_shape_is_sahlqvist() {
        let cs = classified("box p -> dia p");
        let c = &cs[0];
        assert_eq!(c.conjunct.to_string(), "dia ~p | dia p");
        assert_eq!(c.skeleton.to_string(), "x | y");
        assert_eq!(beta_strings(c), vec![("dia ~p".into(), "p".into())]);
        assert_eq!(delta_strings(c), vec!["dia p".to_string()]);
        assert!(c.sahlqvist);
    }

    #[test]
    fn church_rosser_shape_is_sahlqvist() {
        let cs = classified("dia box p -> box dia p");
        let c = &cs[0];
        assert_eq!(c.conjunct.to_string(), "box dia ~p | box dia p");
        assert_eq!(c.skeleton.to_string(), "box x | box y");
        assert_eq!(beta_strings(c), vec![("dia ~p".into(), "p".into())]);
        assert_eq!(delta_strings(c), vec!["dia p".to_string()]);
        assert!(c.sahlqvist);
        assert!(c.definite);
    }

    #[test]
    fn distribution_axiom_is_properly_inductive() {
        let cs = classified("box (p1 -> p2) -> (box p1 -> box p2)");
        assert_eq!(cs.len(), 1);
        let c = &cs[0];
        assert_eq!(c.conjunct.to_string(), "dia (p1 & ~p2) | dia ~p1 | box p2");
        assert_eq!(c.skeleton.to_string(), "x1 | x2 | box y");
        assert_eq!(
            beta_strings(c),
            vec![
                ("dia (p1 & ~p2)".to_string(), "p2".to_string()),
                ("dia ~p1".to_string(), "p1".to_string()),
            ]
        );
        assert_eq!(delta_strings(c), vec!["p2".to_string()]);
        assert_eq!(c.omega, vec![("p1".to_string(), "p2".to_string())]);
        assert!(!c.sahlqvist);
        assert!(c.definite);
    }

    #[test]
    fn weak_connectedness_shape_is_sahlqvist() {
        let cs = classified("box (box p1 -> p2) | box (box p2 -> p1)");
        let c = &cs[0];
        assert_eq!(
            c.conjunct.to_string(),
            "box (dia ~p1 | p2) | box (dia ~p2 | p1)"
        );
        assert_eq!(c.skeleton.to_string(), "box (x1 | y1) | box (x2 | y2)");
        assert_eq!(
            beta_strings(c),
            vec![
                ("dia ~p1".to_string(), "p1".to_string()),
                ("dia ~p2".to_string(), "p2".to_string()),
            ]
        );
        assert_eq!(delta_strings(c), vec!["p2".to_string(), "p1".to_string()]);
        assert!(c.sahlqvist);
        assert!(c.definite);
    }

    #[test]
    fn mckinsey_and_density_like_shapes_are_rejected() {
        let reason = rejected("box dia p -> dia box p");
        assert!(reason.contains("box"), "unexpected reason: {reason}");
        let reason = rejected("a -> dia box a");
        assert!(reason.contains("box"), "unexpected reason: {reason}");
    }

    #[test]
    fn dependence_cycles_are_rejected() {
        let reason = rejected("dia (p & ~q) | dia (q & ~p)");
        assert!(reason.contains("cycle"), "unexpected reason: {reason}");
        // A part whose critical variable also occurs positively in it.
        let reason = rejected("dia (p & ~p)");
        assert!(reason.contains("cycle"), "unexpected reason: {reason}");
    }

    #[test]
    fn parts_with_two_negated_occurrences_are_rejected() {
        let reason = rejected("dia (~p & ~q) | box p | box q");
        assert!(reason.contains("exactly one"), "unexpected reason: {reason}");
    }

    #[test]
    fn skeleton_conjunctions_split_the_formula() {
        let cs = classified("(box a | box b) & box c");
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].conjunct.to_string(), "box a | box b");
        assert_eq!(cs[1].conjunct.to_string(), "box c");
        assert!(!cs[0].definite && !cs[1].definite);
    }

    #[test]
    fn box_free_part_regions_stay_whole() {
        let cs = classified("box ((p & q) | r)");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].conjunct.to_string(), "box (p & q | r)");
        assert!(cs[0].definite);
        assert_eq!(cs[0].skeleton.to_string(), "box (y1 | y2)");

        let cs = classified("box ((p | q) & r)");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].conjunct.to_string(), "box (p & r | q & r)");
        assert!(!cs[0].definite);
    }

    #[test]
    fn purely_positive_formulas_are_sahlqvist() {
        let cs = classified("(p | q) & r");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].conjunct.to_string(), "p & r | q & r");
        assert!(cs[0].betas.is_empty());
        assert_eq!(cs[0].deltas.len(), 2);
        assert!(cs[0].sahlqvist);
    }

    #[test]
    fn diamonds_distribute_over_inner_disjunctions() {
        let cs = classified("dia ((p | q) & ~r) | box r");
        assert_eq!(cs.len(), 1);
        assert_eq!(
            cs[0].conjunct.to_string(),
            "(dia (p & ~r) | dia (q & ~r)) | box r"
        );
        assert_eq!(
            cs[0].omega,
            vec![
                ("p".to_string(), "r".to_string()),
                ("q".to_string(), "r".to_string()),
            ]
        );
    }

    /// The conjunction of the normalized conjuncts must be equivalent to the
    /// input on every pointed model with up to three worlds.
    #[test]
    fn normalization_is_semantically_faithful() {
        let samples = [
            "box ((p | q) & r)",
            "box (p & q) | (r & p)",
            "dia ((p | q) & (r | p))",
            "box (p1 -> p2) -> (box p1 -> box p2)",
            "(box a | box b) & box c",
            "dia ((p | q) & ~r) | box r",
            "~(p & q) | box (q | (p & r))",
        ];
        for s in samples {
            let f = parse(s).unwrap();
            let nnf = f.to_nnf();
            let joined = normalize_definite(&nnf)
                .into_iter()
                .reduce(Formula::and)
                .unwrap();
            let mut atoms: Vec<String> = f.atoms().into_iter().collect();
            atoms.sort();
            for n in 1..=3u8 {
                for frame in frames(n) {
                    let worlds = u32::from(n);
                    for code in 0..1u64 << (atoms.len() as u32 * worlds) {
                        let assignment: Vec<(&str, u8)> = atoms
                            .iter()
                            .enumerate()
                            .map(|(i, a)| {
                                let bits =
                                    (code >> (i as u32 * worlds)) & ((1 << worlds) - 1);
                                (a.as_str(), bits as u8)
                            })
                            .collect();
                        assert_eq!(
                            truth_set_in(&frame, &assignment, &f),
                            truth_set_in(&frame, &assignment, &joined),
                            "normalization changed `{s}` on {frame} with {assignment:?}"
                        );
                    }
                }
            }
        }
    }
}
