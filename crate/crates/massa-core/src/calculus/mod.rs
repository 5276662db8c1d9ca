//! A labelled sequent calculus for the basic normal modal logic K, extended
//! with equality rules and synthesized geometric rules.
//!
//! Sequents are `rel; left |- right` where `rel` is a set of relational
//! atoms (`xRy`, `x=y`) over world labels and each side is a multiset of
//! labelled formulas `x:A`. Formulas carry an optional colour used by the
//! rule-synthesis pipeline to track which side of an identity each occurrence
//! came from; all structural comparisons ignore it.

mod checker;
mod render;

pub use checker::{check_proof, ProofCheck, ProofError};
pub use render::{axiom_latex, latex_formula, render_latex, render_text, rule_latex};

use crate::formula::Formula;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A world label.
pub type Label = String;

/// A relational atom over labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelAtom {
    /// `xRy`: accessibility.
    R(Label, Label),
    /// `x=y`, stored with the lexicographically smaller label first.
    Eq(Label, Label),
}

impl RelAtom {
    pub fn rel(a: impl Into<Label>, b: impl Into<Label>) -> RelAtom {
        RelAtom::R(a.into(), b.into())
    }

    /// An equality atom, normalized so `x=y` and `y=x` compare equal.
    pub fn equality(a: impl Into<Label>, b: impl Into<Label>) -> RelAtom {
        let (a, b) = (a.into(), b.into());
        if a <= b {
            RelAtom::Eq(a, b)
        } else {
            RelAtom::Eq(b, a)
        }
    }

    pub fn labels(&self) -> [&Label; 2] {
        match self {
            RelAtom::R(a, b) | RelAtom::Eq(a, b) => [a, b],
        }
    }

    /// Apply a label substitution, renormalizing equalities.
    pub fn rename(&self, map: &BTreeMap<Label, Label>) -> RelAtom {
        let r = |l: &Label| map.get(l).cloned().unwrap_or_else(|| l.clone());
        match self {
            RelAtom::R(a, b) => RelAtom::R(r(a), r(b)),
            RelAtom::Eq(a, b) => RelAtom::equality(r(a), r(b)),
        }
    }

    /// Parse `xRy` or `x=y`.
    pub fn parse(text: &str) -> Result<RelAtom, String> {
        let text = text.trim();
        if let Some(i) = text.find('=') {
            let (a, b) = (text[..i].trim(), text[i + 1..].trim());
            if a.is_empty() || b.is_empty() {
                return Err(format!("malformed equality atom `{text}`"));
            }
            Ok(RelAtom::equality(a, b))
        } else if let Some(i) = text.find('R') {
            let (a, b) = (text[..i].trim(), text[i + 1..].trim());
            if a.is_empty() || b.is_empty() {
                return Err(format!("malformed relational atom `{text}`"));
            }
            Ok(RelAtom::rel(a, b))
        } else {
            Err(format!("malformed relational atom `{text}`"))
        }
    }
}

impl fmt::Display for RelAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelAtom::R(a, b) => write!(f, "{a}R{b}"),
            RelAtom::Eq(a, b) => write!(f, "{a}={b}"),
        }
    }
}

/// Provenance colour of a formula occurrence in the synthesis pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Colour {
    Red,
    Blue,
    Plain,
}

/// A formula at a world label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelledFormula {
    pub label: Label,
    pub formula: Formula,
    pub colour: Colour,
}

impl LabelledFormula {
    pub fn new(label: impl Into<Label>, formula: Formula, colour: Colour) -> LabelledFormula {
        LabelledFormula {
            label: label.into(),
            formula,
            colour,
        }
    }

    /// Parse `label:formula` (colour is not part of the text form).
    pub fn parse(text: &str) -> Result<LabelledFormula, String> {
        let (label, rest) = text
            .split_once(':')
            .ok_or_else(|| format!("labelled formula `{text}` is missing `:`"))?;
        let formula = crate::formula::parse(rest).map_err(|e| e.to_string())?;
        Ok(LabelledFormula::new(label.trim(), formula, Colour::Plain))
    }
}

impl fmt::Display for LabelledFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.label, self.formula)
    }
}

/// A labelled sequent. The relational atoms form a set; each side is a
/// multiset kept in display order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Sequent {
    pub rel: BTreeSet<RelAtom>,
    pub left: Vec<LabelledFormula>,
    pub right: Vec<LabelledFormula>,
}

impl Sequent {
    /// All labels occurring in the sequent.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        for a in &self.rel {
            for l in a.labels() {
                out.insert(l.clone());
            }
        }
        for f in self.left.iter().chain(&self.right) {
            out.insert(f.label.clone());
        }
        out
    }

    /// Colour-blind multiset view of one side.
    pub(crate) fn side_multiset(&self, side: Side) -> BTreeMap<(Label, Formula), usize> {
        let v = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        let mut out = BTreeMap::new();
        for f in v {
            *out.entry((f.label.clone(), f.formula.clone())).or_insert(0) += 1;
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rel": self.rel.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "left": self.left.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "right": self.right.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Sequent, String> {
        let strings = |key: &str| -> Result<Vec<String>, String> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| format!("sequent is missing array field `{key}`"))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| format!("non-string entry in `{key}`"))
                })
                .collect()
        };
        let mut seq = Sequent::default();
        for s in strings("rel")? {
            seq.rel.insert(RelAtom::parse(&s)?);
        }
        for s in strings("left")? {
            seq.left.push(LabelledFormula::parse(&s)?);
        }
        for s in strings("right")? {
            seq.right.push(LabelledFormula::parse(&s)?);
        }
        Ok(seq)
    }

    /// Equality up to formula order and colour (the relational part is a set
    /// already).
    pub fn same_content(&self, other: &Sequent) -> bool {
        self.rel == other.rel
            && self.side_multiset(Side::Left) == other.side_multiset(Side::Left)
            && self.side_multiset(Side::Right) == other.side_multiset(Side::Right)
    }

    /// Parse the display form `rels; antecedent |- succedent`, where the
    /// relational prefix is optional and either side may be empty.
    pub fn parse(text: &str) -> Result<Sequent, String> {
        let (ctx, right) = text
            .split_once("|-")
            .ok_or_else(|| format!("sequent `{text}` is missing `|-`"))?;
        let (rels, left) = match ctx.split_once(';') {
            Some((r, l)) => (r, l),
            None => {
                // Without a `;` the prefix is relational only when every
                // comma-separated entry parses as a relational atom.
                if !ctx.trim().is_empty()
                    && ctx
                        .split(',')
                        .all(|p| RelAtom::parse(p.trim()).is_ok())
                {
                    (ctx, "")
                } else {
                    ("", ctx)
                }
            }
        };
        let mut seq = Sequent::default();
        for p in rels.split(',') {
            if !p.trim().is_empty() {
                seq.rel.insert(RelAtom::parse(p.trim())?);
            }
        }
        for p in left.split(',') {
            if !p.trim().is_empty() {
                seq.left.push(LabelledFormula::parse(p.trim())?);
            }
        }
        for p in right.split(',') {
            if !p.trim().is_empty() {
                seq.right.push(LabelledFormula::parse(p.trim())?);
            }
        }
        Ok(seq)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.rel.is_empty() {
            let rels: Vec<String> = self.rel.iter().map(|a| a.to_string()).collect();
            write!(f, "{}; ", rels.join(", "))?;
        }
        let left: Vec<String> = self.left.iter().map(|x| x.to_string()).collect();
        let right: Vec<String> = self.right.iter().map(|x| x.to_string()).collect();
        if !left.is_empty() {
            write!(f, "{} ", left.join(", "))?;
        }
        write!(f, "|-")?;
        if !right.is_empty() {
            write!(f, " {}", right.join(", "))?;
        }
        Ok(())
    }
}

/// Which side of a sequent a formula sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// The inference-rule tag on a proof node. `mult` distinguishes the
/// context-splitting (multiplicative) reading of a two-sided rule from the
/// context-sharing one; the checker accepts either reading regardless of the
/// recorded flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleTag {
    /// Leaf: `x:p` on both sides, `p` atomic.
    Id,
    /// Leaf: `x:false` on the left.
    BotL,
    /// Leaf: `x:true` on the right.
    TopR,
    /// Leaf: `x:p` left and `y:p` right with `x=y` entailed by the equalities.
    EqId,
    AndL,
    AndR { mult: bool },
    OrL { mult: bool },
    OrR,
    ImpL { mult: bool },
    ImpR,
    NegL,
    NegR,
    BoxL { mult: bool },
    BoxR,
    DiaL,
    DiaR { mult: bool },
    EqRefl,
    EqTrans,
    ReplRel1,
    ReplRel2,
    ReplForm,
    Cut,
    Geometric(String),
}

impl RuleTag {
    pub fn name(&self) -> String {
        match self {
            RuleTag::Id => "Id".into(),
            RuleTag::BotL => "bot_L".into(),
            RuleTag::TopR => "top_R".into(),
            RuleTag::EqId => "Repl+Id".into(),
            RuleTag::AndL => "&_L".into(),
            RuleTag::AndR { .. } => "&_R".into(),
            RuleTag::OrL { .. } => "|_L".into(),
            RuleTag::OrR => "|_R".into(),
            RuleTag::ImpL { .. } => "->_L".into(),
            RuleTag::ImpR => "->_R".into(),
            RuleTag::NegL => "~_L".into(),
            RuleTag::NegR => "~_R".into(),
            RuleTag::BoxL { .. } => "box_L".into(),
            RuleTag::BoxR => "box_R".into(),
            RuleTag::DiaL => "dia_L".into(),
            RuleTag::DiaR { .. } => "dia_R".into(),
            RuleTag::EqRefl => "eq_refl".into(),
            RuleTag::EqTrans => "eq_trans".into(),
            RuleTag::ReplRel1 => "repl_R1".into(),
            RuleTag::ReplRel2 => "repl_R2".into(),
            RuleTag::ReplForm => "repl".into(),
            RuleTag::Cut => "cut".into(),
            RuleTag::Geometric(name) => name.clone(),
        }
    }

    pub fn is_multiplicative(&self) -> bool {
        matches!(
            self,
            RuleTag::AndR { mult: true }
                | RuleTag::OrL { mult: true }
                | RuleTag::ImpL { mult: true }
                | RuleTag::BoxL { mult: true }
                | RuleTag::DiaR { mult: true }
        )
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, RuleTag::Id | RuleTag::BotL | RuleTag::TopR | RuleTag::EqId)
    }

    fn from_name(name: &str, mult: bool) -> RuleTag {
        match name {
            "Id" => RuleTag::Id,
            "bot_L" => RuleTag::BotL,
            "top_R" => RuleTag::TopR,
            "Repl+Id" => RuleTag::EqId,
            "&_L" => RuleTag::AndL,
            "&_R" => RuleTag::AndR { mult },
            "|_L" => RuleTag::OrL { mult },
            "|_R" => RuleTag::OrR,
            "->_L" => RuleTag::ImpL { mult },
            "->_R" => RuleTag::ImpR,
            "~_L" => RuleTag::NegL,
            "~_R" => RuleTag::NegR,
            "box_L" => RuleTag::BoxL { mult },
            "box_R" => RuleTag::BoxR,
            "dia_L" => RuleTag::DiaL,
            "dia_R" => RuleTag::DiaR { mult },
            "eq_refl" => RuleTag::EqRefl,
            "eq_trans" => RuleTag::EqTrans,
            "repl_R1" => RuleTag::ReplRel1,
            "repl_R2" => RuleTag::ReplRel2,
            "repl" => RuleTag::ReplForm,
            "cut" => RuleTag::Cut,
            other => RuleTag::Geometric(other.to_string()),
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A derivation tree: a conclusion justified by a rule from its premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub conclusion: Sequent,
    pub tag: RuleTag,
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    pub fn leaf(conclusion: Sequent, tag: RuleTag) -> ProofTree {
        ProofTree {
            conclusion,
            tag,
            premises: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::node_count).sum::<usize>()
    }

    /// The rule tags along the leftmost branch, conclusion first.
    pub fn main_branch_tags(&self) -> Vec<String> {
        let mut out = vec![self.tag.name()];
        if let Some(first) = self.premises.first() {
            out.extend(first.main_branch_tags());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut node = json!({
            "rule": self.tag.name(),
            "conclusion": self.conclusion.to_json(),
            "premises": self.premises.iter().map(ProofTree::to_json).collect::<Vec<_>>(),
        });
        if self.tag.is_multiplicative() {
            node["mult"] = json!(true);
        }
        node
    }

    pub fn from_json(v: &Value) -> Result<ProofTree, String> {
        let name = v
            .get("rule")
            .and_then(Value::as_str)
            .ok_or("proof node is missing string field `rule`")?;
        let mult = v.get("mult").and_then(Value::as_bool).unwrap_or(false);
        let conclusion = Sequent::from_json(
            v.get("conclusion")
                .ok_or("proof node is missing field `conclusion`")?,
        )?;
        let premises = v
            .get("premises")
            .and_then(Value::as_array)
            .ok_or("proof node is missing array field `premises`")?
            .iter()
            .map(ProofTree::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProofTree {
            conclusion,
            tag: RuleTag::from_name(name, mult),
            premises,
        })
    }

    /// Rename every label for display: the first labels encountered (walking
    /// each conclusion's relational atoms, then left, then right, root first)
    /// become `x`, `y`, `z`, `w`, `t`, then `x5`, `x6`, ...
    pub fn prettify_labels(&self) -> ProofTree {
        let mut map: BTreeMap<Label, Label> = BTreeMap::new();
        self.collect_pretty(&mut map);
        self.rename(&map)
    }

    fn collect_pretty(&self, map: &mut BTreeMap<Label, Label>) {
        const POOL: [&str; 5] = ["x", "y", "z", "w", "t"];
        let visit = |l: &Label, map: &mut BTreeMap<Label, Label>| {
            if !map.contains_key(l) {
                let i = map.len();
                let name = POOL
                    .get(i)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("x{i}"));
                map.insert(l.clone(), name);
            }
        };
        for a in &self.conclusion.rel {
            for l in a.labels() {
                visit(l, map);
            }
        }
        for f in self.conclusion.left.iter().chain(&self.conclusion.right) {
            visit(&f.label, map);
        }
        for p in &self.premises {
            p.collect_pretty(map);
        }
    }

    pub fn rename(&self, map: &BTreeMap<Label, Label>) -> ProofTree {
        let r = |l: &Label| map.get(l).cloned().unwrap_or_else(|| l.clone());
        let seq = Sequent {
            rel: self.conclusion.rel.iter().map(|a| a.rename(map)).collect(),
            left: self
                .conclusion
                .left
                .iter()
                .map(|f| LabelledFormula::new(r(&f.label), f.formula.clone(), f.colour))
                .collect(),
            right: self
                .conclusion
                .right
                .iter()
                .map(|f| LabelledFormula::new(r(&f.label), f.formula.clone(), f.colour))
                .collect(),
        };
        ProofTree {
            conclusion: seq,
            tag: self.tag.clone(),
            premises: self.premises.iter().map(|p| p.rename(map)).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Geometric rules
// ---------------------------------------------------------------------------

/// One premise of a geometric rule: fresh labels, the relational atoms it
/// adds over the conclusion, and constant markers (`l:false` on the left /
/// `l:true` on the right) recording premises that are trivially derivable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RulePremise {
    pub eigen: Vec<Label>,
    pub extra_rel: BTreeSet<RelAtom>,
    pub bot_markers: Vec<Label>,
    pub top_markers: Vec<Label>,
}

/// A geometric rule scheme: from premises `R, extra_i, markers_i, Γ |- Δ`
/// (for each `i`, with `eigen_i` fresh) infer `R, Γ |- Δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricRule {
    pub name: String,
    pub universals: Vec<Label>,
    pub conclusion_rel: BTreeSet<RelAtom>,
    pub premises: Vec<RulePremise>,
}

impl GeometricRule {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "conclusion_rel": self.conclusion_rel.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "premises": self.premises.iter().map(|p| json!({
                "eigen": p.eigen,
                "extra_rel": p.extra_rel.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Rebuild a rule from its JSON form. Constant markers are not part of
    /// the serialized form; the proof checker tolerates their absence.
    pub fn from_json(v: &Value) -> Result<GeometricRule, String> {
        let name = v
            .get("name")
            .and_then(Value::as_str)
            .ok_or("rule is missing string field `name`")?
            .to_string();
        let mut conclusion_rel = BTreeSet::new();
        for s in v
            .get("conclusion_rel")
            .and_then(Value::as_array)
            .ok_or("rule is missing array field `conclusion_rel`")?
        {
            conclusion_rel.insert(RelAtom::parse(
                s.as_str().ok_or("non-string relational atom")?,
            )?);
        }
        let mut premises = Vec::new();
        for p in v
            .get("premises")
            .and_then(Value::as_array)
            .ok_or("rule is missing array field `premises`")?
        {
            let eigen: Vec<Label> = p
                .get("eigen")
                .and_then(Value::as_array)
                .ok_or("rule premise is missing array field `eigen`")?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| "non-string eigenvariable".to_string())
                })
                .collect::<Result<_, _>>()?;
            let mut extra_rel = BTreeSet::new();
            for s in p
                .get("extra_rel")
                .and_then(Value::as_array)
                .ok_or("rule premise is missing array field `extra_rel`")?
            {
                extra_rel.insert(RelAtom::parse(
                    s.as_str().ok_or("non-string relational atom")?,
                )?);
            }
            premises.push(RulePremise {
                eigen,
                extra_rel,
                bot_markers: Vec::new(),
                top_markers: Vec::new(),
            });
        }
        // Labels in the conclusion pattern, or used by a premise without
        // being bound as its eigenvariables, are the rule's universals.
        let mut universals: Vec<Label> = Vec::new();
        let mut seen = BTreeSet::new();
        let add = |l: &Label, universals: &mut Vec<Label>, seen: &mut BTreeSet<Label>| {
            if seen.insert(l.clone()) {
                universals.push(l.clone());
            }
        };
        for a in &conclusion_rel {
            for l in a.labels() {
                add(l, &mut universals, &mut seen);
            }
        }
        for p in &premises {
            for a in &p.extra_rel {
                for l in a.labels() {
                    if !p.eigen.contains(l) {
                        add(l, &mut universals, &mut seen);
                    }
                }
            }
        }
        Ok(GeometricRule {
            name,
            universals,
            conclusion_rel,
            premises,
        })
    }
}

impl fmt::Display for GeometricRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let concl: Vec<String> = self.conclusion_rel.iter().map(|a| a.to_string()).collect();
        let concl = if concl.is_empty() {
            "Gamma |- Delta".to_string()
        } else {
            format!("{}, Gamma |- Delta", concl.join(", "))
        };
        writeln!(f, "rule {}:", self.name)?;
        for (i, p) in self.premises.iter().enumerate() {
            let mut parts: Vec<String> = self.conclusion_rel.iter().map(|a| a.to_string()).collect();
            parts.extend(p.extra_rel.iter().map(|a| a.to_string()));
            let mut left = parts.join(", ");
            for b in &p.bot_markers {
                left = format!("{left}, {b}:false");
            }
            if !left.is_empty() {
                left.push_str(", ");
            }
            let mut line = format!("{left}Gamma |- ");
            for t in &p.top_markers {
                line.push_str(&format!("{t}:true, "));
            }
            line.push_str("Delta");
            let eigen = if p.eigen.is_empty() {
                String::new()
            } else {
                format!("   ({} fresh)", p.eigen.join(", "))
            };
            writeln!(f, "  premise {}: {}{}", i + 1, line, eigen)?;
        }
        write!(f, "  conclusion: {concl}")
    }
}

/// Errors from instantiating a geometric rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstantiateError {
    MissingAssignment(Label),
    /// A chosen fresh label already occurs in the context sequent.
    NotFresh(Label),
}

impl fmt::Display for InstantiateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstantiateError::MissingAssignment(l) => {
                write!(f, "universal label `{l}` has no assignment")
            }
            InstantiateError::NotFresh(l) => {
                write!(f, "eigenvariable instance `{l}` is not fresh for the conclusion")
            }
        }
    }
}

impl std::error::Error for InstantiateError {}

/// Instantiate a geometric rule against a concrete context: map the rule's
/// universals through `assignment`, add the conclusion pattern to the
/// context, and mint premise sequents using `fresh` for eigenvariables.
/// Returns the premises and the conclusion.
pub fn instantiate_geometric(
    rule: &GeometricRule,
    assignment: &BTreeMap<Label, Label>,
    context: &Sequent,
    fresh: &mut dyn FnMut() -> Label,
) -> Result<(Vec<Sequent>, Sequent), InstantiateError> {
    let mut sigma = BTreeMap::new();
    for u in &rule.universals {
        let img = assignment
            .get(u)
            .ok_or_else(|| InstantiateError::MissingAssignment(u.clone()))?;
        sigma.insert(u.clone(), img.clone());
    }
    let mut conclusion = context.clone();
    for a in &rule.conclusion_rel {
        conclusion.rel.insert(a.rename(&sigma));
    }
    let taken = conclusion.labels();

    let mut premises = Vec::new();
    for p in &rule.premises {
        let mut map = sigma.clone();
        for e in &p.eigen {
            let l = fresh();
            if taken.contains(&l) {
                return Err(InstantiateError::NotFresh(l));
            }
            map.insert(e.clone(), l);
        }
        let mut prem = conclusion.clone();
        for a in &p.extra_rel {
            prem.rel.insert(a.rename(&map));
        }
        for b in &p.bot_markers {
            let l = map.get(b).cloned().unwrap_or_else(|| b.clone());
            prem.left
                .push(LabelledFormula::new(l, Formula::Bot, Colour::Plain));
        }
        for t in &p.top_markers {
            let l = map.get(t).cloned().unwrap_or_else(|| t.clone());
            prem.right
                .push(LabelledFormula::new(l, Formula::Top, Colour::Plain));
        }
        premises.push(prem);
    }
    Ok((premises, conclusion))
}

// ---------------------------------------------------------------------------
// Rule application (context-sharing reading)
// ---------------------------------------------------------------------------

/// How to apply a rule backwards at a sequent: which formula is principal,
/// plus any label data the rule needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Choice {
    /// Principal formula by side and position.
    Principal { side: Side, index: usize },
    /// `box_R` / `dia_L`: principal plus the fresh label to introduce.
    PrincipalFresh { side: Side, index: usize, fresh: Label },
    /// `box_L` / `dia_R`: principal plus the witness label `y` with `xRy`.
    PrincipalWitness { side: Side, index: usize, witness: Label },
    /// `eq_refl`: which label to reflect.
    Reflect { label: Label },
    /// `eq_trans`: derive the equality of these two labels.
    Equate { a: Label, b: Label },
    /// `repl_R1` / `repl_R2`: copy a relational atom along an equality.
    MoveRel { from: (Label, Label), to: (Label, Label) },
    /// `repl`: copy left formula at `index` to the label `to`.
    MoveFormula { index: usize, to: Label },
}

/// Errors from [`apply_rule`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApplyError(pub String);

impl fmt::Display for ApplyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot apply rule: {}", self.0)
    }
}

impl std::error::Error for ApplyError {}

fn take(
    seq: &Sequent,
    side: Side,
    index: usize,
) -> Result<(Sequent, LabelledFormula), ApplyError> {
    let v = match side {
        Side::Left => &seq.left,
        Side::Right => &seq.right,
    };
    if index >= v.len() {
        return Err(ApplyError(format!(
            "no formula at index {index} on the {side:?} side"
        )));
    }
    let mut out = seq.clone();
    let f = match side {
        Side::Left => out.left.remove(index),
        Side::Right => out.right.remove(index),
    };
    Ok((out, f))
}

fn push(seq: &mut Sequent, side: Side, f: LabelledFormula) {
    match side {
        Side::Left => seq.left.push(f),
        Side::Right => seq.right.push(f),
    }
}

/// Apply a rule of the calculus backwards (conclusion to premises) in its
/// context-sharing reading, returning the premises in order. Two-premise
/// logical rules copy the context to both premises; `box_L` and `dia_R`
/// keep their principal formula.
pub fn apply_rule(seq: &Sequent, tag: &RuleTag, choice: &Choice) -> Result<Vec<Sequent>, ApplyError> {
    use Formula as F;
    let principal = |want: Side| -> Result<(Sequent, LabelledFormula), ApplyError> {
        match choice {
            Choice::Principal { side, index }
            | Choice::PrincipalFresh { side, index, .. }
            | Choice::PrincipalWitness { side, index, .. } => {
                if *side != want {
                    return Err(ApplyError(format!(
                        "rule {tag} expects its principal formula on the {want:?} side"
                    )));
                }
                take(seq, *side, *index)
            }
            _ => Err(ApplyError(format!("rule {tag} needs a principal formula"))),
        }
    };
    let colour_of = |f: &LabelledFormula| f.colour;

    match tag {
        RuleTag::AndL => {
            let (mut rest, p) = principal(Side::Left)?;
            let F::And(a, b) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a conjunction")));
            };
            push(&mut rest, Side::Left, LabelledFormula::new(p.label.clone(), (**a).clone(), colour_of(&p)));
            push(&mut rest, Side::Left, LabelledFormula::new(p.label.clone(), (**b).clone(), colour_of(&p)));
            Ok(vec![rest])
        }
        RuleTag::OrR => {
            let (mut rest, p) = principal(Side::Right)?;
            let F::Or(a, b) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a disjunction")));
            };
            push(&mut rest, Side::Right, LabelledFormula::new(p.label.clone(), (**a).clone(), colour_of(&p)));
            push(&mut rest, Side::Right, LabelledFormula::new(p.label.clone(), (**b).clone(), colour_of(&p)));
            Ok(vec![rest])
        }
        RuleTag::ImpR => {
            let (mut rest, p) = principal(Side::Right)?;
            let F::Imp(a, b) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not an implication")));
            };
            push(&mut rest, Side::Left, LabelledFormula::new(p.label.clone(), (**a).clone(), colour_of(&p)));
            push(&mut rest, Side::Right, LabelledFormula::new(p.label.clone(), (**b).clone(), colour_of(&p)));
            Ok(vec![rest])
        }
        RuleTag::NegL => {
            let (mut rest, p) = principal(Side::Left)?;
            let F::Not(a) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a negation")));
            };
            push(&mut rest, Side::Right, LabelledFormula::new(p.label.clone(), (**a).clone(), colour_of(&p)));
            Ok(vec![rest])
        }
        RuleTag::NegR => {
            let (mut rest, p) = principal(Side::Right)?;
            let F::Not(a) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a negation")));
            };
            push(&mut rest, Side::Left, LabelledFormula::new(p.label.clone(), (**a).clone(), colour_of(&p)));
            Ok(vec![rest])
        }
        RuleTag::AndR { .. } => {
            let (rest, p) = principal(Side::Right)?;
            let F::And(a, b) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a conjunction")));
            };
            let mut p1 = rest.clone();
            push(&mut p1, Side::Right, LabelledFormula::new(p.label.clone(), (**a).clone(), colour_of(&p)));
            let mut p2 = rest;
            push(&mut p2, Side::Right, LabelledFormula::new(p.label.clone(), (**b).clone(), colour_of(&p)));
            Ok(vec![p1, p2])
        }
        RuleTag::OrL { .. } => {
            let (rest, p) = principal(Side::Left)?;
            let F::Or(a, b) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a disjunction")));
            };
            let mut p1 = rest.clone();
            push(&mut p1, Side::Left, LabelledFormula::new(p.label.clone(), (**a).clone(), colour_of(&p)));
            let mut p2 = rest;
            push(&mut p2, Side::Left, LabelledFormula::new(p.label.clone(), (**b).clone(), colour_of(&p)));
            Ok(vec![p1, p2])
        }
        RuleTag::ImpL { .. } => {
            let (rest, p) = principal(Side::Left)?;
            let F::Imp(a, b) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not an implication")));
            };
            let mut p1 = rest.clone();
            push(&mut p1, Side::Right, LabelledFormula::new(p.label.clone(), (**a).clone(), colour_of(&p)));
            let mut p2 = rest;
            push(&mut p2, Side::Left, LabelledFormula::new(p.label.clone(), (**b).clone(), colour_of(&p)));
            Ok(vec![p1, p2])
        }
        RuleTag::BoxR => {
            let Choice::PrincipalFresh { fresh, .. } = choice else {
                return Err(ApplyError("box_R needs a fresh label".into()));
            };
            if seq.labels().contains(fresh) {
                return Err(ApplyError(format!("label `{fresh}` is not fresh")));
            }
            let (mut rest, p) = principal(Side::Right)?;
            let F::Box(a) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a box formula")));
            };
            rest.rel.insert(RelAtom::rel(p.label.clone(), fresh.clone()));
            push(&mut rest, Side::Right, LabelledFormula::new(fresh.clone(), (**a).clone(), colour_of(&p)));
            Ok(vec![rest])
        }
        RuleTag::DiaL => {
            let Choice::PrincipalFresh { fresh, .. } = choice else {
                return Err(ApplyError("dia_L needs a fresh label".into()));
            };
            if seq.labels().contains(fresh) {
                return Err(ApplyError(format!("label `{fresh}` is not fresh")));
            }
            let (mut rest, p) = principal(Side::Left)?;
            let F::Dia(a) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a diamond formula")));
            };
            rest.rel.insert(RelAtom::rel(p.label.clone(), fresh.clone()));
            push(&mut rest, Side::Left, LabelledFormula::new(fresh.clone(), (**a).clone(), colour_of(&p)));
            Ok(vec![rest])
        }
        RuleTag::BoxL { .. } => {
            let Choice::PrincipalWitness { side, index, witness } = choice else {
                return Err(ApplyError("box_L needs a witness label".into()));
            };
            if *side != Side::Left {
                return Err(ApplyError("box_L works on the left side".into()));
            }
            let p = seq
                .left
                .get(*index)
                .ok_or_else(|| ApplyError(format!("no formula at index {index} on the left")))?
                .clone();
            let F::Box(a) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a box formula")));
            };
            if !seq.rel.contains(&RelAtom::rel(p.label.clone(), witness.clone())) {
                return Err(ApplyError(format!("`{}R{witness}` is not available", p.label)));
            }
            let mut prem = seq.clone();
            push(&mut prem, Side::Left, LabelledFormula::new(witness.clone(), (**a).clone(), colour_of(&p)));
            Ok(vec![prem])
        }
        RuleTag::DiaR { .. } => {
            let Choice::PrincipalWitness { side, index, witness } = choice else {
                return Err(ApplyError("dia_R needs a witness label".into()));
            };
            if *side != Side::Right {
                return Err(ApplyError("dia_R works on the right side".into()));
            }
            let p = seq
                .right
                .get(*index)
                .ok_or_else(|| ApplyError(format!("no formula at index {index} on the right")))?
                .clone();
            let F::Dia(a) = &p.formula else {
                return Err(ApplyError(format!("`{p}` is not a diamond formula")));
            };
            if !seq.rel.contains(&RelAtom::rel(p.label.clone(), witness.clone())) {
                return Err(ApplyError(format!("`{}R{witness}` is not available", p.label)));
            }
            let mut prem = seq.clone();
            push(&mut prem, Side::Right, LabelledFormula::new(witness.clone(), (**a).clone(), colour_of(&p)));
            Ok(vec![prem])
        }
        RuleTag::EqRefl => {
            let Choice::Reflect { label } = choice else {
                return Err(ApplyError("eq_refl needs a label".into()));
            };
            let mut prem = seq.clone();
            prem.rel.insert(RelAtom::equality(label.clone(), label.clone()));
            Ok(vec![prem])
        }
        RuleTag::EqTrans => {
            let Choice::Equate { a, b } = choice else {
                return Err(ApplyError("eq_trans needs two labels".into()));
            };
            if !checker::eq_entailed(&seq.rel, a, b) {
                return Err(ApplyError(format!(
                    "`{a}={b}` does not follow from the equalities present"
                )));
            }
            let mut prem = seq.clone();
            prem.rel.insert(RelAtom::equality(a.clone(), b.clone()));
            Ok(vec![prem])
        }
        RuleTag::ReplRel1 | RuleTag::ReplRel2 => {
            let Choice::MoveRel { from, to } = choice else {
                return Err(ApplyError("replacement needs source and target atoms".into()));
            };
            if !seq.rel.contains(&RelAtom::rel(from.0.clone(), from.1.clone())) {
                return Err(ApplyError(format!("`{}R{}` is not available", from.0, from.1)));
            }
            if !(checker::eq_entailed(&seq.rel, &from.0, &to.0)
                && checker::eq_entailed(&seq.rel, &from.1, &to.1))
            {
                return Err(ApplyError("labels are not equated".into()));
            }
            let mut prem = seq.clone();
            prem.rel.insert(RelAtom::rel(to.0.clone(), to.1.clone()));
            Ok(vec![prem])
        }
        RuleTag::ReplForm => {
            let Choice::MoveFormula { index, to } = choice else {
                return Err(ApplyError("repl needs a formula index and target label".into()));
            };
            let p = seq
                .left
                .get(*index)
                .ok_or_else(|| ApplyError(format!("no formula at index {index} on the left")))?
                .clone();
            if !checker::eq_entailed(&seq.rel, &p.label, to) {
                return Err(ApplyError(format!("`{}={to}` is not available", p.label)));
            }
            let mut prem = seq.clone();
            push(&mut prem, Side::Left, LabelledFormula::new(to.clone(), p.formula.clone(), p.colour));
            Ok(vec![prem])
        }
        RuleTag::Id | RuleTag::BotL | RuleTag::TopR | RuleTag::EqId => {
            Err(ApplyError(format!("{tag} is a leaf axiom, not an inference")))
        }
        RuleTag::Cut | RuleTag::Geometric(_) => Err(ApplyError(format!(
            "{tag} is not applied through this interface"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn lf(l: &str, s: &str) -> LabelledFormula {
        LabelledFormula::new(l, parse(s).unwrap(), Colour::Plain)
    }

    #[test]
    fn sequent_display_and_json_roundtrip() {
        let seq = Sequent {
            rel: [RelAtom::rel("x", "y"), RelAtom::equality("t", "w")]
                .into_iter()
                .collect(),
            left: vec![lf("y", "box p")],
            right: vec![lf("z", "dia p")],
        };
        assert_eq!(seq.to_string(), "xRy, t=w; y:box p |- z:dia p");
        assert_eq!(Sequent::from_json(&seq.to_json()).unwrap(), seq);
        assert_eq!(
            Sequent::default().to_string(),
            "|-"
        );
    }

    #[test]
    fn equality_atoms_are_normalized() {
        assert_eq!(RelAtom::equality("w", "t"), RelAtom::equality("t", "w"));
        assert_eq!(RelAtom::parse("w=t").unwrap().to_string(), "t=w");
        assert_eq!(RelAtom::parse("xRy").unwrap(), RelAtom::rel("x", "y"));
        assert!(RelAtom::parse("xy").is_err());
    }

    #[test]
    fn imp_right_moves_antecedent_left() {
        let seq = Sequent {
            rel: BTreeSet::new(),
            left: vec![],
            right: vec![lf("x", "dia p -> box p")],
        };
        let prems = apply_rule(
            &seq,
            &RuleTag::ImpR,
            &Choice::Principal { side: Side::Right, index: 0 },
        )
        .unwrap();
        assert_eq!(prems.len(), 1);
        assert_eq!(prems[0].to_string(), "x:dia p |- x:box p");
    }

    #[test]
    fn box_right_requires_fresh_label() {
        let seq = Sequent {
            rel: BTreeSet::new(),
            left: vec![lf("x", "dia p")],
            right: vec![lf("x", "box p")],
        };
        let prems = apply_rule(
            &seq,
            &RuleTag::BoxR,
            &Choice::PrincipalFresh { side: Side::Right, index: 0, fresh: "y".into() },
        )
        .unwrap();
        assert_eq!(prems[0].to_string(), "xRy; x:dia p |- y:p");
        let err = apply_rule(
            &seq,
            &RuleTag::BoxR,
            &Choice::PrincipalFresh { side: Side::Right, index: 0, fresh: "x".into() },
        )
        .unwrap_err();
        assert!(err.0.contains("fresh"));
    }

    #[test]
    fn box_left_keeps_principal_and_needs_edge() {
        let seq = Sequent {
            rel: [RelAtom::rel("x", "y")].into_iter().collect(),
            left: vec![lf("x", "box p")],
            right: vec![],
        };
        let prems = apply_rule(
            &seq,
            &RuleTag::BoxL { mult: false },
            &Choice::PrincipalWitness { side: Side::Left, index: 0, witness: "y".into() },
        )
        .unwrap();
        assert_eq!(prems[0].to_string(), "xRy; x:box p, y:p |-");
        assert!(apply_rule(
            &seq,
            &RuleTag::BoxL { mult: false },
            &Choice::PrincipalWitness { side: Side::Left, index: 0, witness: "z".into() },
        )
        .is_err());
    }

    #[test]
    fn two_premise_rules_copy_contexts() {
        let seq = Sequent {
            rel: BTreeSet::new(),
            left: vec![lf("x", "p -> q"), lf("x", "r")],
            right: vec![lf("x", "s")],
        };
        let prems = apply_rule(
            &seq,
            &RuleTag::ImpL { mult: false },
            &Choice::Principal { side: Side::Left, index: 0 },
        )
        .unwrap();
        assert_eq!(prems.len(), 2);
        assert_eq!(prems[0].to_string(), "x:r |- x:s, x:p");
        assert_eq!(prems[1].to_string(), "x:r, x:q |- x:s");
    }

    #[test]
    fn instantiate_seriality_rule() {
        // From `xRy, Gamma |- Delta` with `y` fresh, infer `Gamma |- Delta`.
        let ser = GeometricRule {
            name: "Ser".into(),
            universals: vec!["x".into()],
            conclusion_rel: BTreeSet::new(),
            premises: vec![RulePremise {
                eigen: vec!["y".into()],
                extra_rel: [RelAtom::rel("x", "y")].into_iter().collect(),
                bot_markers: vec![],
                top_markers: vec![],
            }],
        };
        let context = Sequent {
            rel: BTreeSet::new(),
            left: vec![lf("u", "box p")],
            right: vec![lf("u", "dia p")],
        };
        let mut assignment = BTreeMap::new();
        assignment.insert("x".to_string(), "u".to_string());
        let mut counter = 0;
        let mut fresh = move || {
            counter += 1;
            format!("v{counter}")
        };
        let (premises, conclusion) =
            instantiate_geometric(&ser, &assignment, &context, &mut fresh).unwrap();
        assert_eq!(conclusion.to_string(), "u:box p |- u:dia p");
        assert_eq!(premises.len(), 1);
        assert_eq!(premises[0].to_string(), "uRv1; u:box p |- u:dia p");
    }

    #[test]
    fn rule_json_roundtrip_recovers_universals() {
        let rule = GeometricRule {
            name: "Dir".into(),
            universals: vec!["x".into(), "y".into(), "z".into()],
            conclusion_rel: [RelAtom::rel("x", "y"), RelAtom::rel("x", "z")]
                .into_iter()
                .collect(),
            premises: vec![RulePremise {
                eigen: vec!["t".into(), "w".into()],
                extra_rel: [
                    RelAtom::rel("y", "t"),
                    RelAtom::rel("z", "w"),
                    RelAtom::equality("t", "w"),
                ]
                .into_iter()
                .collect(),
                bot_markers: vec![],
                top_markers: vec![],
            }],
        };
        let back = GeometricRule::from_json(&rule.to_json()).unwrap();
        assert_eq!(back, rule);
    }

    #[test]
    fn prettify_assigns_pool_names_in_first_occurrence_order() {
        let tree = ProofTree::leaf(
            Sequent {
                rel: [RelAtom::rel("x0", "x3"), RelAtom::rel("x0", "x1")]
                    .into_iter()
                    .collect(),
                left: vec![lf("x9", "p")],
                right: vec![lf("x9", "p")],
            },
            RuleTag::Id,
        );
        let pretty = tree.prettify_labels();
        assert_eq!(pretty.conclusion.to_string(), "xRy, xRz; w:p |- w:p");
    }
}
