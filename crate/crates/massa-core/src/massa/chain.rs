//! Backward and forward chaining around the atomic cut stage.
//!
//! Backward chaining destroys the skeleton of the goal sequent with
//! invertible rules until only tonicity-bound formulas remain. The atomic
//! cut stage combines the pruned identity leaves into initial sequents (one
//! per red/blue atom pairing, plus constant leaves taken as-is, plus
//! constant substitutions for one-sided variables). Forward chaining then
//! rebuilds the remaining goal formulas from those initial sequents with
//! tonicity rules only, maintaining a forest of partial proof trees.

use std::collections::{BTreeMap, BTreeSet};

use crate::calculus::{
    Colour, Label, LabelledFormula, ProofTree, RelAtom, RuleTag, Sequent, Side,
};
use crate::formula::Formula;

use super::identity::{BlueOcc, Identity, LeafInfo, LeafKind, Pos};

/// A formula occurrence tracked through forward chaining.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Item {
    pub pos: Pos,
    pub label: Label,
    pub formula: Formula,
    pub colour: Colour,
}

impl Item {
    fn from_blue(b: &BlueOcc) -> Self {
        Item {
            pos: b.pos.clone(),
            label: b.label.clone(),
            formula: b.formula.clone(),
            colour: Colour::Blue,
        }
    }

    fn to_labelled(&self) -> LabelledFormula {
        LabelledFormula {
            label: self.label.clone(),
            formula: self.formula.clone(),
            colour: self.colour,
        }
    }
}

/// An initial sequent produced by the cut stage, used as a reusable template
/// during forward chaining.
#[derive(Clone, Debug)]
pub(crate) struct CutAxiom {
    pub rel: BTreeSet<RelAtom>,
    pub left: Vec<Item>,
    pub right: Vec<Item>,
    /// Positions of the consumable (blue) occurrences.
    pub supplies: Vec<Pos>,
    pub tag: RuleTag,
}

impl CutAxiom {
    pub(crate) fn sequent(&self) -> Sequent {
        Sequent {
            rel: self.rel.clone(),
            left: self.left.iter().map(Item::to_labelled).collect(),
            right: self.right.iter().map(Item::to_labelled).collect(),
        }
    }
}

fn marker_for(side: Side) -> Formula {
    match side {
        Side::Left => Formula::Bot,
        Side::Right => Formula::Top,
    }
}

/// Combine the pruned identity leaves into initial sequents.
///
/// Every variable with both a red-precedent and a red-succedent occurrence
/// yields one sequent per such pairing (the result of cutting the two leaves
/// on their red atoms). Variables whose red occurrences all sit on one side
/// get that atom replaced by the closing constant instead. Constant leaves
/// participate unchanged.
pub(crate) fn atomic_cuts(leaves: &[LeafInfo]) -> Vec<CutAxiom> {
    let mut vars: Vec<String> = Vec::new();
    for leaf in leaves {
        if let LeafKind::Atom { var, .. } = &leaf.kind {
            if !vars.contains(var) {
                vars.push(var.clone());
            }
        }
    }

    let items_of = |leaf: &LeafInfo| -> (Vec<Item>, Vec<Item>) {
        (
            leaf.remainder_left.iter().map(Item::from_blue).collect(),
            leaf.remainder_right.iter().map(Item::from_blue).collect(),
        )
    };
    let supplies_of = |leaf: &LeafInfo| -> Vec<Pos> {
        leaf.blues.iter().map(|b| b.pos.clone()).collect()
    };

    let mut axioms = Vec::new();
    for var in &vars {
        let of_var: Vec<&LeafInfo> = leaves
            .iter()
            .filter(|l| matches!(&l.kind, LeafKind::Atom { var: v, .. } if v == var))
            .collect();
        let succ: Vec<&&LeafInfo> = of_var
            .iter()
            .filter(|l| matches!(&l.kind, LeafKind::Atom { red_side: Side::Right, .. }))
            .collect();
        let prec: Vec<&&LeafInfo> = of_var
            .iter()
            .filter(|l| matches!(&l.kind, LeafKind::Atom { red_side: Side::Left, .. }))
            .collect();
        if succ.is_empty() || prec.is_empty() {
            // One-sided variable: substitute the red atom by the constant
            // that closes the leaf on the same side.
            for leaf in &of_var {
                let LeafKind::Atom {
                    label,
                    red_side,
                    red_pos,
                    ..
                } = &leaf.kind
                else {
                    unreachable!()
                };
                let (mut left, mut right) = items_of(leaf);
                let marker = Item {
                    pos: red_pos.clone(),
                    label: label.clone(),
                    formula: marker_for(*red_side),
                    colour: Colour::Red,
                };
                let tag = match red_side {
                    Side::Left => {
                        left.push(marker);
                        RuleTag::BotL
                    }
                    Side::Right => {
                        right.push(marker);
                        RuleTag::TopR
                    }
                };
                axioms.push(CutAxiom {
                    rel: leaf.rel.clone(),
                    left,
                    right,
                    supplies: supplies_of(leaf),
                    tag,
                });
            }
            continue;
        }
        for n in &succ {
            for p in &prec {
                let (n_label, p_label) = match (&n.kind, &p.kind) {
                    (LeafKind::Atom { label: a, .. }, LeafKind::Atom { label: b, .. }) => {
                        (a.clone(), b.clone())
                    }
                    _ => unreachable!(),
                };
                let mut rel: BTreeSet<RelAtom> = n.rel.union(&p.rel).cloned().collect();
                let tag = if n_label == p_label {
                    RuleTag::Id
                } else {
                    rel.insert(RelAtom::equality(n_label, p_label));
                    RuleTag::EqId
                };
                let (mut left, mut right) = items_of(n);
                let (pl, pr) = items_of(p);
                left.extend(pl);
                right.extend(pr);
                let mut supplies = supplies_of(n);
                supplies.extend(supplies_of(p));
                axioms.push(CutAxiom {
                    rel,
                    left,
                    right,
                    supplies,
                    tag,
                });
            }
        }
    }
    for leaf in leaves {
        if leaf.kind == LeafKind::Const {
            let (left, right) = items_of(leaf);
            axioms.push(CutAxiom {
                rel: leaf.rel.clone(),
                left,
                right,
                supplies: supplies_of(leaf),
                tag: leaf.tag.clone(),
            });
        }
    }
    axioms
}

/// The result of backward chaining: the saturated top sequent plus the rule
/// applications recorded root-first.
pub(crate) struct Backward {
    pub steps: Vec<(Sequent, RuleTag)>,
    pub top: Sequent,
    /// Goal formulas of the top sequent, succedent first, with their
    /// positions in the root formula.
    pub goals: Vec<Goal>,
}

#[derive(Clone, Debug)]
pub(crate) struct Goal {
    pub pos: Pos,
    pub side: Side,
    pub formula: Formula,
}

/// One tracked formula of the working sequent during backward chaining.
#[derive(Clone)]
struct BItem {
    pos: Pos,
    label: Label,
    formula: Formula,
}

impl BItem {
    fn to_labelled(&self) -> LabelledFormula {
        LabelledFormula {
            label: self.label.clone(),
            formula: self.formula.clone(),
            colour: Colour::Blue,
        }
    }
}

fn bitems_sequent(rel: &BTreeSet<RelAtom>, left: &[BItem], right: &[BItem]) -> Sequent {
    Sequent {
        rel: rel.clone(),
        left: left.iter().map(BItem::to_labelled).collect(),
        right: right.iter().map(BItem::to_labelled).collect(),
    }
}

/// Destroy the skeleton of `x:φ ⊢ ... ⊢ x:φ`'s blue half with invertible
/// rules, reusing the labels assigned by the identity derivation.
pub(crate) fn backward_chain(
    phi: &Formula,
    root_label: &Label,
    labels: &BTreeMap<Pos, Label>,
) -> Backward {
    let mut rel: BTreeSet<RelAtom> = BTreeSet::new();
    let mut left: Vec<BItem> = Vec::new();
    let mut right: Vec<BItem> = vec![BItem {
        pos: Vec::new(),
        label: root_label.clone(),
        formula: phi.clone(),
    }];
    let mut steps = Vec::new();

    let child = |p: &Pos, i: u8| {
        let mut c = p.clone();
        c.push(i);
        c
    };

    'saturate: loop {
        for i in 0..right.len() {
            let it = &right[i];
            match it.formula.clone() {
                Formula::Imp(a, b) => {
                    steps.push((bitems_sequent(&rel, &left, &right), RuleTag::ImpR));
                    let it = right.remove(i);
                    left.push(BItem {
                        pos: child(&it.pos, 0),
                        label: it.label.clone(),
                        formula: (*a).clone(),
                    });
                    right.insert(
                        i,
                        BItem {
                            pos: child(&it.pos, 1),
                            label: it.label,
                            formula: (*b).clone(),
                        },
                    );
                    continue 'saturate;
                }
                Formula::Or(a, b) => {
                    steps.push((bitems_sequent(&rel, &left, &right), RuleTag::OrR));
                    let it = right.remove(i);
                    right.insert(
                        i,
                        BItem {
                            pos: child(&it.pos, 1),
                            label: it.label.clone(),
                            formula: (*b).clone(),
                        },
                    );
                    right.insert(
                        i,
                        BItem {
                            pos: child(&it.pos, 0),
                            label: it.label,
                            formula: (*a).clone(),
                        },
                    );
                    continue 'saturate;
                }
                Formula::Box(a) => {
                    steps.push((bitems_sequent(&rel, &left, &right), RuleTag::BoxR));
                    let it = right.remove(i);
                    let fresh = labels
                        .get(&child(&it.pos, 0))
                        .expect("identity derivation labelled this position")
                        .clone();
                    rel.insert(RelAtom::rel(it.label.clone(), fresh.clone()));
                    right.insert(
                        i,
                        BItem {
                            pos: child(&it.pos, 0),
                            label: fresh,
                            formula: (*a).clone(),
                        },
                    );
                    continue 'saturate;
                }
                Formula::Not(a) => {
                    steps.push((bitems_sequent(&rel, &left, &right), RuleTag::NegR));
                    let it = right.remove(i);
                    left.push(BItem {
                        pos: child(&it.pos, 0),
                        label: it.label,
                        formula: (*a).clone(),
                    });
                    continue 'saturate;
                }
                _ => {}
            }
        }
        for i in 0..left.len() {
            let it = &left[i];
            match it.formula.clone() {
                Formula::And(a, b) => {
                    steps.push((bitems_sequent(&rel, &left, &right), RuleTag::AndL));
                    let it = left.remove(i);
                    left.insert(
                        i,
                        BItem {
                            pos: child(&it.pos, 1),
                            label: it.label.clone(),
                            formula: (*b).clone(),
                        },
                    );
                    left.insert(
                        i,
                        BItem {
                            pos: child(&it.pos, 0),
                            label: it.label,
                            formula: (*a).clone(),
                        },
                    );
                    continue 'saturate;
                }
                Formula::Dia(a) => {
                    steps.push((bitems_sequent(&rel, &left, &right), RuleTag::DiaL));
                    let it = left.remove(i);
                    let fresh = labels
                        .get(&child(&it.pos, 0))
                        .expect("identity derivation labelled this position")
                        .clone();
                    rel.insert(RelAtom::rel(it.label.clone(), fresh.clone()));
                    left.insert(
                        i,
                        BItem {
                            pos: child(&it.pos, 0),
                            label: fresh,
                            formula: (*a).clone(),
                        },
                    );
                    continue 'saturate;
                }
                Formula::Not(a) => {
                    steps.push((bitems_sequent(&rel, &left, &right), RuleTag::NegL));
                    let it = left.remove(i);
                    right.push(BItem {
                        pos: child(&it.pos, 0),
                        label: it.label,
                        formula: (*a).clone(),
                    });
                    continue 'saturate;
                }
                _ => {}
            }
        }
        break;
    }

    let mut goals = Vec::new();
    for it in &right {
        goals.push(Goal {
            pos: it.pos.clone(),
            side: Side::Right,
            formula: it.formula.clone(),
        });
    }
    for it in &left {
        goals.push(Goal {
            pos: it.pos.clone(),
            side: Side::Left,
            formula: it.formula.clone(),
        });
    }
    Backward {
        steps,
        top: bitems_sequent(&rel, &left, &right),
        goals,
    }
}

/// If the saturated sequent closes outright, return the closing leaf tag.
pub(crate) fn closable(s: &Sequent) -> Option<RuleTag> {
    if s.left.iter().any(|f| f.formula == Formula::Bot) {
        return Some(RuleTag::BotL);
    }
    if s.right.iter().any(|f| f.formula == Formula::Top) {
        return Some(RuleTag::TopR);
    }
    for l in &s.left {
        if matches!(l.formula, Formula::Atom(_))
            && s.right
                .iter()
                .any(|r| r.formula == l.formula && r.label == l.label)
        {
            return Some(RuleTag::Id);
        }
    }
    None
}

/// A partial proof tree grown during forward chaining.
#[derive(Clone, Debug)]
pub(crate) struct TreeState {
    pub proof: ProofTree,
    pub rel: BTreeSet<RelAtom>,
    pub left: Vec<Item>,
    pub right: Vec<Item>,
    /// Unconsumed supply positions (a multiset).
    pub avail: Vec<Pos>,
}

impl TreeState {
    pub(crate) fn sequent(&self) -> Sequent {
        Sequent {
            rel: self.rel.clone(),
            left: self.left.iter().map(Item::to_labelled).collect(),
            right: self.right.iter().map(Item::to_labelled).collect(),
        }
    }

    fn has_avail(&self, pos: &Pos) -> bool {
        self.avail.iter().any(|p| p == pos)
    }

    fn has_avail_under(&self, prefix: &Pos) -> bool {
        self.avail.iter().any(|p| p.starts_with(prefix))
    }

    fn consume(&mut self, pos: &Pos) {
        let i = self
            .avail
            .iter()
            .position(|p| p == pos)
            .expect("supply present");
        self.avail.remove(i);
    }

    fn side(&mut self, side: Side) -> &mut Vec<Item> {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    fn take_item(&mut self, side: Side, pos: &Pos) -> Result<Item, String> {
        let v = self.side(side);
        let i = v
            .iter()
            .position(|it| &it.pos == pos)
            .ok_or_else(|| format!("no occurrence at position {pos:?}"))?;
        Ok(v.remove(i))
    }
}

/// Formulas of `merged` that `own` is missing, as a multiset difference over
/// label and formula.
fn context_gap(merged: &[Item], own: &[Item]) -> Vec<LabelledFormula> {
    let mut remaining: Vec<&Item> = own.iter().collect();
    let mut out = Vec::new();
    for m in merged {
        if let Some(i) = remaining
            .iter()
            .position(|o| o.label == m.label && o.formula == m.formula)
        {
            remaining.remove(i);
        } else {
            out.push(m.to_labelled());
        }
    }
    out
}

/// Why forward chaining got stuck.
#[derive(Debug)]
pub(crate) struct Stuck {
    pub reason: String,
    pub witness: Vec<Sequent>,
}

pub(crate) struct Forest<'a> {
    axioms: Vec<CutAxiom>,
    labels: &'a BTreeMap<Pos, Label>,
    trees: Vec<Option<TreeState>>,
    instances: usize,
}

impl<'a> Forest<'a> {
    pub(crate) fn new(axioms: Vec<CutAxiom>, labels: &'a BTreeMap<Pos, Label>) -> Self {
        Forest {
            axioms,
            labels,
            trees: Vec::new(),
            instances: 0,
        }
    }

    fn live_ids(&self) -> Vec<usize> {
        (0..self.trees.len())
            .filter(|i| self.trees[*i].is_some())
            .collect()
    }

    fn live_sequents(&self) -> Vec<Sequent> {
        self.live_ids()
            .into_iter()
            .map(|i| self.trees[i].as_ref().unwrap().sequent())
            .collect()
    }

    fn stuck(&self, reason: impl Into<String>) -> Stuck {
        Stuck {
            reason: reason.into(),
            witness: self.live_sequents(),
        }
    }

    fn instantiate(&mut self, ax_idx: usize) -> usize {
        let ax = &self.axioms[ax_idx];
        let state = TreeState {
            proof: ProofTree::leaf(ax.sequent(), ax.tag.clone()),
            rel: ax.rel.clone(),
            left: ax.left.clone(),
            right: ax.right.clone(),
            avail: ax.supplies.clone(),
        };
        self.instances += 1;
        self.trees.push(Some(state));
        self.trees.len() - 1
    }

    fn tree(&mut self, id: usize) -> &mut TreeState {
        self.trees[id].as_mut().expect("live tree")
    }

    fn label_at(&self, pos: &Pos) -> Result<Label, String> {
        self.labels
            .get(pos)
            .cloned()
            .ok_or_else(|| format!("no label recorded at position {pos:?}"))
    }

    /// Pick or create a tree with an unconsumed supply at `pos` and consume
    /// it there.
    fn source_tree(
        &mut self,
        pos: &Pos,
        prefer: usize,
        exclude: Option<usize>,
    ) -> Result<usize, String> {
        let pick = if exclude != Some(prefer)
            && self
                .trees
                .get(prefer)
                .and_then(|t| t.as_ref())
                .is_some_and(|t| t.has_avail(pos))
        {
            Some(prefer)
        } else {
            self.live_ids()
                .into_iter()
                .find(|i| Some(*i) != exclude && self.trees[*i].as_ref().unwrap().has_avail(pos))
        };
        if let Some(id) = pick {
            self.tree(id).consume(pos);
            return Ok(id);
        }
        if self.instances > 32 + 8 * self.axioms.len() {
            return Err("forward chaining did not converge".into());
        }
        let ax_idx = self
            .axioms
            .iter()
            .position(|a| a.supplies.contains(pos))
            .ok_or_else(|| format!("no initial sequent supplies position {pos:?}"))?;
        let id = self.instantiate(ax_idx);
        self.tree(id).consume(pos);
        Ok(id)
    }

    fn unary(
        &mut self,
        id: usize,
        tag: RuleTag,
        parent: Item,
        aux: (Side, Pos),
        need_rel: Option<RelAtom>,
    ) -> Result<usize, String> {
        let t = self.tree(id);
        if let Some(r) = &need_rel {
            if !t.rel.contains(r) {
                return Err(format!("missing relational atom {r} for {}", tag.name()));
            }
        }
        let side = match tag {
            RuleTag::BoxL { .. } | RuleTag::NegL => Side::Left,
            _ => Side::Right,
        };
        t.take_item(aux.0, &aux.1)?;
        t.side(side).push(parent);
        let conclusion = t.sequent();
        let child = std::mem::replace(&mut t.proof, ProofTree::leaf(Sequent::default(), RuleTag::Id));
        t.proof = ProofTree {
            conclusion,
            tag,
            premises: vec![child],
        };
        Ok(id)
    }

    fn join(
        &mut self,
        ta: usize,
        tb: usize,
        tag: RuleTag,
        principal: Item,
        principal_side: Side,
        aux_a: (Side, Pos),
        aux_b: (Side, Pos),
    ) -> Result<usize, String> {
        let mut a = self.trees[ta].take().expect("live tree");
        let mut b = self.trees[tb].take().expect("live tree");
        a.take_item(aux_a.0, &aux_a.1)?;
        b.take_item(aux_b.0, &aux_b.1)?;

        let rel: BTreeSet<RelAtom> = a.rel.union(&b.rel).cloned().collect();
        let mut merged_positions: Vec<Pos> = Vec::new();
        let merge_side = |xs: &[Item], ys: &[Item], merged: &mut Vec<Pos>| -> Vec<Item> {
            let mut out = xs.to_vec();
            for y in ys {
                if out
                    .iter()
                    .any(|x| x.pos == y.pos && x.label == y.label && x.formula == y.formula)
                {
                    merged.push(y.pos.clone());
                } else {
                    out.push(y.clone());
                }
            }
            out
        };
        let left = merge_side(&a.left, &b.left, &mut merged_positions);
        let right = merge_side(&a.right, &b.right, &mut merged_positions);

        // The two sides may share supplies, which appear once in the merged
        // context; grow each branch's proof to the full shared context so
        // the inference reads additively.
        let grow = |t: &TreeState| -> ProofTree {
            let missing_rel: BTreeSet<RelAtom> = rel.difference(&t.rel).cloned().collect();
            super::weaken(
                &t.proof,
                &missing_rel,
                &context_gap(&left, &t.left),
                &context_gap(&right, &t.right),
            )
        };
        let a_proof = grow(&a);
        let b_proof = grow(&b);

        let mut avail = a.avail;
        avail.extend(b.avail);
        for pos in &merged_positions {
            let items = left
                .iter()
                .chain(right.iter())
                .filter(|it| &it.pos == pos)
                .count();
            while avail.iter().filter(|p| *p == pos).count() > items {
                let i = avail.iter().position(|p| p == pos).unwrap();
                avail.remove(i);
            }
        }

        let mut state = TreeState {
            proof: ProofTree::leaf(Sequent::default(), RuleTag::Id),
            rel,
            left,
            right,
            avail,
        };
        match principal_side {
            Side::Left => state.left.push(principal),
            Side::Right => state.right.push(principal),
        }
        state.proof = ProofTree {
            conclusion: state.sequent(),
            tag,
            premises: vec![a_proof, b_proof],
        };
        self.trees[ta] = Some(state);
        Ok(ta)
    }

    /// Rebuild the goal formula at `pos` on `side` with tonicity rules,
    /// returning the tree that ends up holding it.
    fn build(
        &mut self,
        pos: &Pos,
        side: Side,
        f: &Formula,
        prefer: usize,
        exclude: Option<usize>,
    ) -> Result<usize, String> {
        let child = |i: u8| {
            let mut c = pos.clone();
            c.push(i);
            c
        };
        match (side, f) {
            (_, Formula::Atom(_) | Formula::Bot | Formula::Top) => {
                self.source_tree(pos, prefer, exclude)
            }
            (Side::Right, Formula::And(x, y)) => {
                let ta = self.build(&child(0), Side::Right, x, prefer, exclude)?;
                let tb = self.build(&child(1), Side::Right, y, prefer, exclude)?;
                if ta == tb {
                    return Err(format!(
                        "the premises of {} would share a proof tree",
                        RuleTag::AndR { mult: false }.name()
                    ));
                }
                let label = self.label_at(pos)?;
                self.join(
                    ta,
                    tb,
                    RuleTag::AndR { mult: false },
                    Item {
                        pos: pos.clone(),
                        label,
                        formula: f.clone(),
                        colour: Colour::Blue,
                    },
                    Side::Right,
                    (Side::Right, child(0)),
                    (Side::Right, child(1)),
                )
            }
            (Side::Left, Formula::Or(x, y)) => {
                let ta = self.build(&child(0), Side::Left, x, prefer, exclude)?;
                let tb = self.build(&child(1), Side::Left, y, prefer, exclude)?;
                if ta == tb {
                    return Err(format!(
                        "the premises of {} would share a proof tree",
                        RuleTag::OrL { mult: false }.name()
                    ));
                }
                let label = self.label_at(pos)?;
                self.join(
                    ta,
                    tb,
                    RuleTag::OrL { mult: false },
                    Item {
                        pos: pos.clone(),
                        label,
                        formula: f.clone(),
                        colour: Colour::Blue,
                    },
                    Side::Left,
                    (Side::Left, child(0)),
                    (Side::Left, child(1)),
                )
            }
            (Side::Left, Formula::Imp(x, y)) => {
                let ta = self.build(&child(0), Side::Right, x, prefer, exclude)?;
                let tb = self.build(&child(1), Side::Left, y, prefer, exclude)?;
                if ta == tb {
                    return Err(format!(
                        "the premises of {} would share a proof tree",
                        RuleTag::ImpL { mult: false }.name()
                    ));
                }
                let label = self.label_at(pos)?;
                self.join(
                    ta,
                    tb,
                    RuleTag::ImpL { mult: false },
                    Item {
                        pos: pos.clone(),
                        label,
                        formula: f.clone(),
                        colour: Colour::Blue,
                    },
                    Side::Left,
                    (Side::Right, child(0)),
                    (Side::Left, child(1)),
                )
            }
            (Side::Right, Formula::Dia(x)) => {
                let t = self.build(&child(0), Side::Right, x, prefer, exclude)?;
                let label = self.label_at(pos)?;
                let inner = self.label_at(&child(0))?;
                self.unary(
                    t,
                    RuleTag::DiaR { mult: true },
                    Item {
                        pos: pos.clone(),
                        label: label.clone(),
                        formula: f.clone(),
                        colour: Colour::Blue,
                    },
                    (Side::Right, child(0)),
                    Some(RelAtom::rel(label, inner)),
                )
            }
            (Side::Left, Formula::Box(x)) => {
                let t = self.build(&child(0), Side::Left, x, prefer, exclude)?;
                let label = self.label_at(pos)?;
                let inner = self.label_at(&child(0))?;
                self.unary(
                    t,
                    RuleTag::BoxL { mult: true },
                    Item {
                        pos: pos.clone(),
                        label: label.clone(),
                        formula: f.clone(),
                        colour: Colour::Blue,
                    },
                    (Side::Left, child(0)),
                    Some(RelAtom::rel(label, inner)),
                )
            }
            (Side::Right, Formula::Not(x)) => {
                let t = self.build(&child(0), Side::Left, x, prefer, exclude)?;
                let label = self.label_at(pos)?;
                self.unary(
                    t,
                    RuleTag::NegR,
                    Item {
                        pos: pos.clone(),
                        label,
                        formula: f.clone(),
                        colour: Colour::Blue,
                    },
                    (Side::Left, child(0)),
                    None,
                )
            }
            (Side::Left, Formula::Not(x)) => {
                let t = self.build(&child(0), Side::Right, x, prefer, exclude)?;
                let label = self.label_at(pos)?;
                self.unary(
                    t,
                    RuleTag::NegL,
                    Item {
                        pos: pos.clone(),
                        label,
                        formula: f.clone(),
                        colour: Colour::Blue,
                    },
                    (Side::Right, child(0)),
                    None,
                )
            }
            (s, f) => Err(format!(
                "rebuilding {f} on the {} would need an invertible rule",
                match s {
                    Side::Left => "left",
                    Side::Right => "right",
                }
            )),
        }
    }

    /// Run forward chaining to a fixpoint and return the finished sections.
    pub(crate) fn saturate(&mut self, goals: &[Goal]) -> Result<Vec<TreeState>, Stuck> {
        for i in 0..self.axioms.len() {
            self.instantiate(i);
        }
        let mut passes = 0usize;
        'outer: loop {
            passes += 1;
            if passes > 10_000 {
                return Err(self.stuck("forward chaining did not converge"));
            }
            for g in goals {
                let atomic = matches!(g.formula, Formula::Atom(_) | Formula::Bot | Formula::Top);
                for id in self.live_ids() {
                    let t = self.trees[id].as_ref().unwrap();
                    if !t.has_avail_under(&g.pos) {
                        continue;
                    }
                    if atomic {
                        // The goal is already an initial-sequent occurrence;
                        // just mark it as spent.
                        let t = self.tree(id);
                        while t.has_avail(&g.pos) {
                            t.consume(&g.pos);
                        }
                    } else {
                        self.build(&g.pos, g.side, &g.formula, id, None)
                            .map_err(|e| self.stuck(e))?;
                    }
                    continue 'outer;
                }
            }
            break;
        }
        let mut sections: Vec<TreeState> = Vec::new();
        for id in self.live_ids() {
            let t = self.trees[id].take().unwrap();
            if sections.iter().any(|s| s.sequent().same_content(&t.sequent())) {
                continue;
            }
            sections.push(t);
        }
        Ok(sections)
    }
}

/// Convenience wrapper: cut stage plus forward chaining for one identity.
pub(crate) fn forward_chain(
    identity: &Identity,
    goals: &[Goal],
) -> Result<Vec<TreeState>, Stuck> {
    let axioms = atomic_cuts(&identity.leaves);
    let mut forest = Forest::new(axioms, &identity.labels);
    forest.saturate(goals)
}
