//! Rule synthesis: from an accepted formula to an analytic geometric rule
//! and a cut-free derivation witnessing the axiom it replaces.
//!
//! The pipeline builds the two-copy identity derivation of the input, breaks
//! the skeleton apart with invertible rules, pairs up the surviving atomic
//! leaves by cuts on their variables, chains the resulting initial sequents
//! forward with tonicity rules until the goal occurrences reappear, and — if
//! the chained sections jointly rebuild the destroyed sequent — packages the
//! leftover relational content as a geometric rule. The rule is named after
//! the frame condition its first-order reading is equivalent to, when that
//! condition is one of the classics.

mod chain;
mod identity;
mod merge;

use std::collections::{BTreeMap, BTreeSet};

use crate::calculus::{
    check_proof, Colour, GeometricRule, Label, LabelledFormula, ProofTree, RelAtom, RulePremise,
    RuleTag, Sequent,
};
use crate::classify::{classify, Classification};
use crate::fo::{parse_fo, read_off_axiom, simplify_axiom, GeometricAxiom};
use crate::formula::Formula;
use crate::semantics::{fo_equivalent, Correspondence};
use serde_json::{json, Value};

use chain::{backward_chain, closable, forward_chain, TreeState};
use identity::build_identity;
use merge::find_merging_point;

/// Frame bound for the simplifier's self-check and for rule naming.
const FRAME_BOUND: u8 = 3;

/// Where a failing synthesis got stuck.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Chaining,
    Merging,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Chaining => "chaining",
            Stage::Merging => "merging",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MassaSuccess {
    /// `None` when the destroyed sequent closes outright and no rule is
    /// needed.
    pub rule: Option<GeometricRule>,
    /// The frame condition read off the rule verbatim.
    pub raw_axiom: GeometricAxiom,
    /// The simplified frame condition.
    pub axiom: GeometricAxiom,
    /// A cut-free derivation of the input using at most the emitted rule.
    pub derivation: ProofTree,
}

#[derive(Clone, Debug)]
pub struct MassaFailure {
    pub stage: Stage,
    pub reason: String,
    /// The sequents the stuck stage was looking at.
    pub witness: Vec<Sequent>,
}

#[derive(Clone, Debug)]
pub enum MassaOutcome {
    Success(Box<MassaSuccess>),
    Failure(MassaFailure),
}

impl MassaOutcome {
    pub fn success(&self) -> bool {
        matches!(self, MassaOutcome::Success(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            MassaOutcome::Success(s) => json!({
                "status": "success",
                "rule": s.rule.as_ref().map(GeometricRule::to_json).unwrap_or(Value::Null),
                "raw_axiom": s.raw_axiom.to_string(),
                "axiom": s.axiom.to_string(),
                "derivation": s.derivation.to_json(),
            }),
            MassaOutcome::Failure(f) => json!({
                "status": "failure",
                "stage": f.stage.as_str(),
                "reason": f.reason,
                "witness": f.witness.iter().map(Sequent::to_string).collect::<Vec<_>>(),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConjunctRun {
    pub conjunct: Formula,
    pub outcome: MassaOutcome,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub formula: Formula,
    pub classification: Classification,
    pub runs: Vec<ConjunctRun>,
}

impl RunReport {
    pub fn success(&self) -> bool {
        !self.runs.is_empty() && self.runs.iter().all(|r| r.outcome.success())
    }

    /// The single outcome of a one-conjunct run.
    pub fn sole_outcome(&self) -> Option<&MassaOutcome> {
        match self.runs.as_slice() {
            [only] => Some(&only.outcome),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "formula": self.formula.to_string(),
            "classification": self.classification.to_json(),
        });
        if let [only] = self.runs.as_slice() {
            let fields = only.outcome.to_json();
            for (k, val) in fields.as_object().expect("outcome is an object") {
                v[k] = val.clone();
            }
        } else {
            v["status"] = json!(if self.success() { "success" } else { "failure" });
            v["results"] = Value::Array(
                self.runs
                    .iter()
                    .map(|r| {
                        let mut o = r.outcome.to_json();
                        o["conjunct"] = json!(r.conjunct.to_string());
                        o
                    })
                    .collect(),
            );
        }
        v
    }
}

// ---------------------------------------------------------------------------
// Rule emission
// ---------------------------------------------------------------------------

fn universal_name(i: usize) -> Label {
    const POOL: [&str; 3] = ["x", "y", "z"];
    POOL.get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("x{i}"))
}

fn eigen_name(i: usize) -> Label {
    const POOL: [&str; 3] = ["t", "w", "s"];
    POOL.get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("t{i}"))
}

/// How one emitted premise relates to its section: which chained tree proves
/// it and which conclusion formulas must be weakened in.
struct PremisePlan {
    section: usize,
    diff_left: Vec<LabelledFormula>,
    diff_right: Vec<LabelledFormula>,
}

/// Multiset difference `a - b` of sequent sides, ignoring colours, in `a`'s
/// order.
fn side_diff(a: &[LabelledFormula], b: &[LabelledFormula]) -> Vec<LabelledFormula> {
    let mut have: BTreeMap<(Label, Formula), usize> = BTreeMap::new();
    for f in b {
        *have.entry((f.label.clone(), f.formula.clone())).or_insert(0) += 1;
    }
    let mut out = Vec::new();
    for f in a {
        match have.get_mut(&(f.label.clone(), f.formula.clone())) {
            Some(n) if *n > 0 => *n -= 1,
            _ => out.push(LabelledFormula::new(
                f.label.clone(),
                f.formula.clone(),
                Colour::Plain,
            )),
        }
    }
    out
}

/// Package the chained sections over the destroyed sequent `top` as a
/// geometric rule with canonical variable names: the conclusion's labels
/// become universals `x`, `y`, `z`, ... (relational atoms first, in sorted
/// order, then any remaining labels); each premise's fresh labels become
/// eigenvariables `t`, `w`, `s`, ... numbered across all premises. Premises
/// whose sequents coincide are emitted once.
fn emit_rule(
    top: &Sequent,
    sections: &[TreeState],
) -> Result<(GeometricRule, Vec<PremisePlan>), String> {
    let top_labels = top.labels();
    let mut order: Vec<Label> = Vec::new();
    for l in top.rel.iter().flat_map(RelAtom::labels) {
        if !order.contains(l) {
            order.push(l.clone());
        }
    }
    for l in &top_labels {
        if !order.contains(l) {
            order.push(l.clone());
        }
    }
    let mut rename: BTreeMap<Label, Label> = BTreeMap::new();
    for (i, l) in order.iter().enumerate() {
        rename.insert(l.clone(), universal_name(i));
    }
    let universals: Vec<Label> = (0..order.len()).map(universal_name).collect();
    let conclusion_rel: BTreeSet<RelAtom> = top.rel.iter().map(|a| a.rename(&rename)).collect();

    let mut premises: Vec<RulePremise> = Vec::new();
    let mut plans: Vec<PremisePlan> = Vec::new();
    let mut targets: Vec<Sequent> = Vec::new();
    let mut eigen_count = 0usize;
    for (i, sec) in sections.iter().enumerate() {
        let seq = sec.sequent();
        let extra: Vec<RelAtom> = seq.rel.difference(&top.rel).cloned().collect();
        // Bare constants are trivially derivable placeholders, not content.
        let mut bots: Vec<Label> = Vec::new();
        for f in &seq.left {
            if f.formula == Formula::Bot && !bots.contains(&f.label) {
                bots.push(f.label.clone());
            }
        }
        let mut tops: Vec<Label> = Vec::new();
        for f in &seq.right {
            if f.formula == Formula::Top && !tops.contains(&f.label) {
                tops.push(f.label.clone());
            }
        }

        let mut fresh: Vec<Label> = Vec::new();
        for l in extra
            .iter()
            .flat_map(RelAtom::labels)
            .chain(bots.iter())
            .chain(tops.iter())
        {
            if !top_labels.contains(l) && !fresh.contains(l) {
                fresh.push(l.clone());
            }
        }
        for l in seq.labels() {
            if !top_labels.contains(&l) && !fresh.contains(&l) {
                return Err(format!(
                    "premise {} uses the fresh label {l} outside its new relational atoms",
                    i + 1
                ));
            }
        }

        let mut map = rename.clone();
        let mut eigen: Vec<Label> = Vec::new();
        for l in &fresh {
            let name = eigen_name(eigen_count);
            eigen_count += 1;
            eigen.push(name.clone());
            map.insert(l.clone(), name);
        }

        let diff_left = side_diff(&top.left, &seq.left);
        let diff_right = side_diff(&top.right, &seq.right);
        let mut target = seq.clone();
        target.rel.extend(top.rel.iter().cloned());
        target.left.extend(diff_left.iter().cloned());
        target.right.extend(diff_right.iter().cloned());
        if targets.iter().any(|t| t.same_content(&target)) {
            continue;
        }
        targets.push(target);

        premises.push(RulePremise {
            eigen,
            extra_rel: extra.iter().map(|a| a.rename(&map)).collect(),
            bot_markers: bots.iter().map(|l| map[l].clone()).collect(),
            top_markers: tops.iter().map(|l| map[l].clone()).collect(),
        });
        plans.push(PremisePlan {
            section: i,
            diff_left,
            diff_right,
        });
    }

    Ok((
        GeometricRule {
            name: "r".into(),
            universals,
            conclusion_rel,
            premises,
        },
        plans,
    ))
}

/// Name a rule after the classical frame condition its simplified axiom is
/// equivalent to on all frames up to [`FRAME_BOUND`] worlds; `r` otherwise.
fn name_rule(axiom: &GeometricAxiom) -> String {
    const FRAME_CONDITIONS: &[(&str, &str)] = &[
        ("Ser", "forall x. exists y. x R y"),
        ("Refl", "forall x. x R x"),
        ("Sym", "forall x y. (x R y) -> y R x"),
        ("Trans", "forall x y z. (x R y & y R z) -> x R z"),
        ("Eucl", "forall x y z. (x R y & x R z) -> y R z"),
        ("Fun", "forall x y z. (x R y & x R z) -> y = z"),
        ("Dir", "forall x y z. (x R y & x R z) -> exists t. (y R t & z R t)"),
        ("Conn", "forall x y t. (x R y & x R t) -> y R t | t R y"),
    ];
    if matches!(axiom, GeometricAxiom::Top) {
        return "r".into();
    }
    let lhs = axiom.to_fo();
    for (name, text) in FRAME_CONDITIONS {
        let rhs = parse_fo(text).expect("frame-condition table parses");
        if matches!(
            fo_equivalent(&lhs, &rhs, FRAME_BOUND),
            Ok(Correspondence::Holds { .. })
        ) {
            return (*name).to_string();
        }
    }
    "r".into()
}

// ---------------------------------------------------------------------------
// Derivation assembly
// ---------------------------------------------------------------------------

/// Weaken a whole proof uniformly: the given relational atoms and formulas
/// are added to every sequent, conclusion and premises alike. Every rule in
/// the calculus reads its context additively (premises repeat the
/// conclusion's side formulas), so growing all sequents by the same material
/// preserves each inference.
pub(crate) fn weaken(
    tree: &ProofTree,
    extra_rel: &BTreeSet<RelAtom>,
    extra_left: &[LabelledFormula],
    extra_right: &[LabelledFormula],
) -> ProofTree {
    if extra_rel.is_empty() && extra_left.is_empty() && extra_right.is_empty() {
        return tree.clone();
    }
    let mut conclusion = tree.conclusion.clone();
    conclusion.rel.extend(extra_rel.iter().cloned());
    conclusion.left.extend_from_slice(extra_left);
    conclusion.right.extend_from_slice(extra_right);
    ProofTree {
        conclusion,
        tag: tree.tag.clone(),
        premises: tree
            .premises
            .iter()
            .map(|p| weaken(p, extra_rel, extra_left, extra_right))
            .collect(),
    }
}

/// Re-apply the recorded invertible steps below `tip`, root first.
fn fold_backward(steps: &[(Sequent, RuleTag)], tip: ProofTree) -> ProofTree {
    let mut tree = tip;
    for (seq, tag) in steps.iter().rev() {
        tree = ProofTree {
            conclusion: seq.clone(),
            tag: tag.clone(),
            premises: vec![tree],
        };
    }
    tree
}

fn failure(stage: Stage, reason: impl Into<String>, witness: Vec<Sequent>) -> MassaOutcome {
    MassaOutcome::Failure(MassaFailure {
        stage,
        reason: reason.into(),
        witness,
    })
}

/// Run the whole synthesis pipeline on a single conjunct.
fn run_conjunct(phi: &Formula) -> MassaOutcome {
    let identity = build_identity(phi);
    let backward = backward_chain(phi, &identity.root_label, &identity.labels);
    let top = backward.top.clone();

    // The invertible steps alone may close the sequent; then the formula is
    // derivable outright and no rule is needed.
    if let Some(tag) = closable(&top) {
        let leaf = ProofTree::leaf(top.clone(), tag);
        let derivation = fold_backward(&backward.steps, leaf).prettify_labels();
        return match check_proof(&derivation, &[]) {
            Ok(c) if c.cut_free => MassaOutcome::Success(Box::new(MassaSuccess {
                rule: None,
                raw_axiom: GeometricAxiom::Top,
                axiom: GeometricAxiom::Top,
                derivation,
            })),
            Ok(_) => failure(
                Stage::Merging,
                "internal: closed derivation is not cut-free",
                vec![top],
            ),
            Err(e) => failure(
                Stage::Merging,
                format!("internal: closed derivation rejected: {e}"),
                vec![top],
            ),
        };
    }

    let sections = match forward_chain(&identity, &backward.goals) {
        Ok(s) => s,
        Err(stuck) => return failure(Stage::Chaining, stuck.reason, stuck.witness),
    };
    let section_seqs: Vec<Sequent> = sections.iter().map(TreeState::sequent).collect();

    if let Err(reason) = find_merging_point(&top, &section_seqs) {
        return failure(Stage::Merging, reason, section_seqs);
    }

    let (mut rule, plans) = match emit_rule(&top, &sections) {
        Ok(x) => x,
        Err(reason) => return failure(Stage::Merging, reason, section_seqs),
    };
    let raw_axiom = read_off_axiom(&rule);
    let axiom = simplify_axiom(&raw_axiom, FRAME_BOUND);
    rule.name = name_rule(&axiom);

    let premises: Vec<ProofTree> = plans
        .iter()
        .map(|p| {
            let proof = &sections[p.section].proof;
            let missing: BTreeSet<RelAtom> = top
                .rel
                .difference(&proof.conclusion.rel)
                .cloned()
                .collect();
            weaken(proof, &missing, &p.diff_left, &p.diff_right)
        })
        .collect();
    let geo = ProofTree {
        conclusion: top.clone(),
        tag: RuleTag::Geometric(rule.name.clone()),
        premises,
    };
    let derivation = fold_backward(&backward.steps, geo).prettify_labels();
    match check_proof(&derivation, &[rule.clone()]) {
        Ok(c) if c.cut_free => MassaOutcome::Success(Box::new(MassaSuccess {
            rule: Some(rule),
            raw_axiom,
            axiom,
            derivation,
        })),
        Ok(_) => failure(
            Stage::Merging,
            "internal: assembled derivation is not cut-free",
            section_seqs,
        ),
        Err(e) => failure(
            Stage::Merging,
            format!("internal: assembled derivation rejected: {e}"),
            section_seqs,
        ),
    }
}

/// Synthesize rules for every conjunct of `formula`.
///
/// A single-conjunct input is attempted verbatim first, so the derivation
/// follows the formula as written; the normalized conjunct is a fallback.
/// Inputs the classifier rejects are still attempted, and fail honestly.
pub fn run(formula: &Formula) -> RunReport {
    let classification = classify(formula);
    let runs = match &classification {
        Classification::AnalyticInductive { conjuncts } if conjuncts.len() > 1 => conjuncts
            .iter()
            .map(|c| ConjunctRun {
                conjunct: c.conjunct.clone(),
                outcome: run_conjunct(&c.conjunct),
            })
            .collect(),
        Classification::AnalyticInductive { conjuncts } => {
            let raw = run_conjunct(formula);
            match (&raw, conjuncts.first()) {
                (MassaOutcome::Failure(_), Some(c)) if c.conjunct != *formula => {
                    vec![ConjunctRun {
                        conjunct: c.conjunct.clone(),
                        outcome: run_conjunct(&c.conjunct),
                    }]
                }
                _ => vec![ConjunctRun {
                    conjunct: formula.clone(),
                    outcome: raw,
                }],
            }
        }
        _ => vec![ConjunctRun {
            conjunct: formula.clone(),
            outcome: run_conjunct(formula),
        }],
    };
    RunReport {
        formula: formula.clone(),
        classification,
        runs,
    }
}
