//! Canonical two-copy derivations of `x:φ ⊢ x:φ` and their multiplicative
//! pruning.
//!
//! The derivation keeps two coloured copies of every subformula: the copy
//! descending from the left (red) occurrence of φ and the copy descending
//! from the right (blue) one. Each connective is unfolded by a fixed pair of
//! rules — the invertible rule below, the tonicity rule above — so that the
//! two copies of each subformula meet again at the same label and close the
//! branch with an identity (or constant) leaf.

use std::collections::{BTreeMap, BTreeSet};

use crate::calculus::{
    Colour, Label, LabelledFormula, ProofTree, RelAtom, RuleTag, Sequent, Side,
};
use crate::formula::Formula;

/// Path of a subformula occurrence inside the root formula.
pub(crate) type Pos = Vec<u8>;

/// One formula occurrence in the two-copy derivation.
#[derive(Clone, Debug)]
struct Occ {
    id: usize,
    label: Label,
    formula: Formula,
    colour: Colour,
    pos: Pos,
}

impl Occ {
    fn to_labelled(&self) -> LabelledFormula {
        LabelledFormula {
            label: self.label.clone(),
            formula: self.formula.clone(),
            colour: self.colour,
        }
    }
}

/// A sequent whose formulas are tracked occurrences.
#[derive(Clone, Debug, Default)]
struct OccSeq {
    rel: BTreeSet<RelAtom>,
    left: Vec<Occ>,
    right: Vec<Occ>,
}

impl OccSeq {
    fn push(&mut self, side: Side, occ: Occ) {
        match side {
            Side::Left => self.left.push(occ),
            Side::Right => self.right.push(occ),
        }
    }

    fn remove(&mut self, id: usize) -> Occ {
        if let Some(i) = self.left.iter().position(|o| o.id == id) {
            return self.left.remove(i);
        }
        if let Some(i) = self.right.iter().position(|o| o.id == id) {
            return self.right.remove(i);
        }
        panic!("occurrence {id} is not in the sequent");
    }

    fn find(&self, id: usize) -> (&Occ, Side) {
        if let Some(o) = self.left.iter().find(|o| o.id == id) {
            return (o, Side::Left);
        }
        if let Some(o) = self.right.iter().find(|o| o.id == id) {
            return (o, Side::Right);
        }
        panic!("occurrence {id} is not in the sequent");
    }

    fn to_sequent(&self, keep: Option<&BTreeSet<usize>>) -> Sequent {
        let pick = |v: &[Occ]| {
            v.iter()
                .filter(|o| keep.is_none_or(|k| k.contains(&o.id)))
                .map(Occ::to_labelled)
                .collect()
        };
        Sequent {
            rel: self.rel.clone(),
            left: pick(&self.left),
            right: pick(&self.right),
        }
    }
}

/// Node of the two-copy derivation, remembering which occurrences each rule
/// introduced (per premise) and which it consumed.
struct Node {
    seq: OccSeq,
    tag: RuleTag,
    kids: Vec<Node>,
    /// Occurrence ids introduced into premise `i` by this rule.
    aux: Vec<Vec<usize>>,
    /// Occurrence id of the principal formula (absent at leaves).
    principal: Option<usize>,
    /// Leaf only: ids that the closing rule itself uses.
    closing: Vec<usize>,
}

/// Kind of a pruned leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum LeafKind {
    /// Identity leaf on a proposition variable; the red copy sits on
    /// `red_side` at `label` and position `red_pos`.
    Atom {
        var: String,
        label: Label,
        red_side: Side,
        red_pos: Pos,
    },
    /// Closed by a constant (`⊥` on the left or `⊤` on the right).
    Const,
}

/// A blue occurrence that a pruned leaf contributes to later chaining.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BlueOcc {
    pub pos: Pos,
    pub side: Side,
    pub label: Label,
    pub formula: Formula,
}

/// The data of one pruned leaf that the cut stage consumes.
#[derive(Clone, Debug)]
pub(crate) struct LeafInfo {
    /// Relational atoms of the pruned leaf.
    pub rel: BTreeSet<RelAtom>,
    /// Pruned leaf contexts minus the red atom (for `Atom` leaves); constant
    /// leaves keep everything.
    pub remainder_left: Vec<BlueOcc>,
    pub remainder_right: Vec<BlueOcc>,
    pub tag: RuleTag,
    pub kind: LeafKind,
    /// The blue occurrences available as building material.
    pub blues: Vec<BlueOcc>,
}

/// The identity derivation together with everything later stages reuse.
pub(crate) struct Identity {
    /// Fully additive two-copy derivation; kept for inspection and tests.
    #[allow(dead_code)]
    pub full: ProofTree,
    /// The same tree pruned to multiplicative form; kept for inspection and
    /// tests.
    #[allow(dead_code)]
    pub pruned: ProofTree,
    /// Label assigned to each subformula position.
    pub labels: BTreeMap<Pos, Label>,
    /// Pruned leaves in left-to-right order.
    pub leaves: Vec<LeafInfo>,
    pub root_label: Label,
}

struct Builder {
    fresh: usize,
    next_id: usize,
    labels: BTreeMap<Pos, Label>,
}

impl Builder {
    fn fresh_label(&mut self) -> Label {
        let l = format!("x{}", self.fresh);
        self.fresh += 1;
        l
    }

    fn occ(&mut self, label: &Label, formula: Formula, colour: Colour, pos: Pos) -> Occ {
        let id = self.next_id;
        self.next_id += 1;
        Occ {
            id,
            label: label.clone(),
            formula,
            colour,
            pos,
        }
    }

    /// Unfold the pair of copies of one subformula. `li`/`ri` are the ids of
    /// the left- and right-hand copy, already present in `seq`.
    fn pair(&mut self, seq: OccSeq, li: usize, ri: usize) -> Node {
        let (left_occ, ls) = seq.find(li);
        let (right_occ, rs) = seq.find(ri);
        debug_assert_eq!((ls, rs), (Side::Left, Side::Right));
        debug_assert_eq!(left_occ.formula, right_occ.formula);
        debug_assert_eq!(left_occ.label, right_occ.label);
        debug_assert_eq!(left_occ.pos, right_occ.pos);
        let formula = left_occ.formula.clone();
        let label = left_occ.label.clone();
        let pos = left_occ.pos.clone();
        let (lc, rc) = (left_occ.colour, right_occ.colour);
        self.labels.insert(pos.clone(), label.clone());

        let child = |p: &Pos, i: u8| {
            let mut c = p.clone();
            c.push(i);
            c
        };

        match formula {
            Formula::Atom(_) => Node {
                seq,
                tag: RuleTag::Id,
                kids: Vec::new(),
                aux: Vec::new(),
                principal: None,
                closing: vec![li, ri],
            },
            // Constant leaves keep both copies: the closing constant and its
            // partner, which later rules may still consume as a component.
            Formula::Bot => Node {
                seq,
                tag: RuleTag::BotL,
                kids: Vec::new(),
                aux: Vec::new(),
                principal: None,
                closing: vec![li, ri],
            },
            Formula::Top => Node {
                seq,
                tag: RuleTag::TopR,
                kids: Vec::new(),
                aux: Vec::new(),
                principal: None,
                closing: vec![ri, li],
            },
            Formula::Not(a) => {
                // ¬_R below on the right copy, ¬_L above on the left copy.
                let mut s1 = seq.clone();
                s1.remove(ri);
                let al = self.occ(&label, (*a).clone(), rc, child(&pos, 0));
                let al_id = al.id;
                s1.push(Side::Left, al);
                let mut s2 = s1.clone();
                s2.remove(li);
                let ar = self.occ(&label, (*a).clone(), lc, child(&pos, 0));
                let ar_id = ar.id;
                s2.push(Side::Right, ar);
                let top = self.pair(s2, al_id, ar_id);
                let negl = Node {
                    seq: s1,
                    tag: RuleTag::NegL,
                    kids: vec![top],
                    aux: vec![vec![ar_id]],
                    principal: Some(li),
                    closing: Vec::new(),
                };
                Node {
                    seq,
                    tag: RuleTag::NegR,
                    kids: vec![negl],
                    aux: vec![vec![al_id]],
                    principal: Some(ri),
                    closing: Vec::new(),
                }
            }
            Formula::Imp(a, b) => {
                // →_R below on the right copy, →_L above on the left copy.
                let mut s1 = seq.clone();
                s1.remove(ri);
                let al = self.occ(&label, (*a).clone(), rc, child(&pos, 0));
                let br = self.occ(&label, (*b).clone(), rc, child(&pos, 1));
                let (al_id, br_id) = (al.id, br.id);
                s1.push(Side::Left, al);
                s1.push(Side::Right, br);
                let mut sa = s1.clone();
                sa.remove(li);
                let ar = self.occ(&label, (*a).clone(), lc, child(&pos, 0));
                let ar_id = ar.id;
                sa.push(Side::Right, ar);
                let mut sb = s1.clone();
                sb.remove(li);
                let bl = self.occ(&label, (*b).clone(), lc, child(&pos, 1));
                let bl_id = bl.id;
                sb.push(Side::Left, bl);
                let ka = self.pair(sa, al_id, ar_id);
                let kb = self.pair(sb, bl_id, br_id);
                let impl_node = Node {
                    seq: s1,
                    tag: RuleTag::ImpL { mult: false },
                    kids: vec![ka, kb],
                    aux: vec![vec![ar_id], vec![bl_id]],
                    principal: Some(li),
                    closing: Vec::new(),
                };
                Node {
                    seq,
                    tag: RuleTag::ImpR,
                    kids: vec![impl_node],
                    aux: vec![vec![al_id, br_id]],
                    principal: Some(ri),
                    closing: Vec::new(),
                }
            }
            Formula::Or(a, b) => {
                // ∨_R below on the right copy, ∨_L above on the left copy.
                let mut s1 = seq.clone();
                s1.remove(ri);
                let ar = self.occ(&label, (*a).clone(), rc, child(&pos, 0));
                let br = self.occ(&label, (*b).clone(), rc, child(&pos, 1));
                let (ar_id, br_id) = (ar.id, br.id);
                s1.push(Side::Right, ar);
                s1.push(Side::Right, br);
                let mut sa = s1.clone();
                sa.remove(li);
                let al = self.occ(&label, (*a).clone(), lc, child(&pos, 0));
                let al_id = al.id;
                sa.push(Side::Left, al);
                let mut sb = s1.clone();
                sb.remove(li);
                let bl = self.occ(&label, (*b).clone(), lc, child(&pos, 1));
                let bl_id = bl.id;
                sb.push(Side::Left, bl);
                let ka = self.pair(sa, al_id, ar_id);
                let kb = self.pair(sb, bl_id, br_id);
                let orl = Node {
                    seq: s1,
                    tag: RuleTag::OrL { mult: false },
                    kids: vec![ka, kb],
                    aux: vec![vec![al_id], vec![bl_id]],
                    principal: Some(li),
                    closing: Vec::new(),
                };
                Node {
                    seq,
                    tag: RuleTag::OrR,
                    kids: vec![orl],
                    aux: vec![vec![ar_id, br_id]],
                    principal: Some(ri),
                    closing: Vec::new(),
                }
            }
            Formula::And(a, b) => {
                // ∧_L below on the left copy, ∧_R above on the right copy.
                let mut s1 = seq.clone();
                s1.remove(li);
                let al = self.occ(&label, (*a).clone(), lc, child(&pos, 0));
                let bl = self.occ(&label, (*b).clone(), lc, child(&pos, 1));
                let (al_id, bl_id) = (al.id, bl.id);
                s1.push(Side::Left, al);
                s1.push(Side::Left, bl);
                let mut sa = s1.clone();
                sa.remove(ri);
                let ar = self.occ(&label, (*a).clone(), rc, child(&pos, 0));
                let ar_id = ar.id;
                sa.push(Side::Right, ar);
                let mut sb = s1.clone();
                sb.remove(ri);
                let br = self.occ(&label, (*b).clone(), rc, child(&pos, 1));
                let br_id = br.id;
                sb.push(Side::Right, br);
                let ka = self.pair(sa, al_id, ar_id);
                let kb = self.pair(sb, bl_id, br_id);
                let andr = Node {
                    seq: s1,
                    tag: RuleTag::AndR { mult: false },
                    kids: vec![ka, kb],
                    aux: vec![vec![ar_id], vec![br_id]],
                    principal: Some(ri),
                    closing: Vec::new(),
                };
                Node {
                    seq,
                    tag: RuleTag::AndL,
                    kids: vec![andr],
                    aux: vec![vec![al_id, bl_id]],
                    principal: Some(li),
                    closing: Vec::new(),
                }
            }
            Formula::Box(a) => {
                // □_R below on the right copy (fresh label), □_L above on the
                // left copy, which stays in the premise.
                let v = self.fresh_label();
                let mut s1 = seq.clone();
                s1.remove(ri);
                s1.rel.insert(RelAtom::rel(label.clone(), v.clone()));
                let ar = self.occ(&v, (*a).clone(), rc, child(&pos, 0));
                let ar_id = ar.id;
                s1.push(Side::Right, ar);
                let mut s2 = s1.clone();
                let al = self.occ(&v, (*a).clone(), lc, child(&pos, 0));
                let al_id = al.id;
                s2.push(Side::Left, al);
                let top = self.pair(s2, al_id, ar_id);
                let boxl = Node {
                    seq: s1,
                    tag: RuleTag::BoxL { mult: false },
                    kids: vec![top],
                    aux: vec![vec![al_id]],
                    principal: Some(li),
                    closing: Vec::new(),
                };
                Node {
                    seq,
                    tag: RuleTag::BoxR,
                    kids: vec![boxl],
                    aux: vec![vec![ar_id]],
                    principal: Some(ri),
                    closing: Vec::new(),
                }
            }
            Formula::Dia(a) => {
                // ◇_L below on the left copy (fresh label), ◇_R above on the
                // right copy, which stays in the premise.
                let v = self.fresh_label();
                let mut s1 = seq.clone();
                s1.remove(li);
                s1.rel.insert(RelAtom::rel(label.clone(), v.clone()));
                let al = self.occ(&v, (*a).clone(), lc, child(&pos, 0));
                let al_id = al.id;
                s1.push(Side::Left, al);
                let mut s2 = s1.clone();
                let ar = self.occ(&v, (*a).clone(), rc, child(&pos, 0));
                let ar_id = ar.id;
                s2.push(Side::Right, ar);
                let top = self.pair(s2, al_id, ar_id);
                let diar = Node {
                    seq: s1,
                    tag: RuleTag::DiaR { mult: false },
                    kids: vec![top],
                    aux: vec![vec![ar_id]],
                    principal: Some(ri),
                    closing: Vec::new(),
                };
                Node {
                    seq,
                    tag: RuleTag::DiaL,
                    kids: vec![diar],
                    aux: vec![vec![al_id]],
                    principal: Some(li),
                    closing: Vec::new(),
                }
            }
        }
    }
}

fn full_tree(node: &Node) -> ProofTree {
    ProofTree {
        conclusion: node.seq.to_sequent(None),
        tag: node.tag.clone(),
        premises: node.kids.iter().map(full_tree).collect(),
    }
}

fn multiplicative(tag: &RuleTag) -> RuleTag {
    match tag {
        RuleTag::AndR { .. } => RuleTag::AndR { mult: true },
        RuleTag::OrL { .. } => RuleTag::OrL { mult: true },
        RuleTag::ImpL { .. } => RuleTag::ImpL { mult: true },
        RuleTag::BoxL { .. } => RuleTag::BoxL { mult: true },
        RuleTag::DiaR { .. } => RuleTag::DiaR { mult: true },
        other => other.clone(),
    }
}

/// Prune `node` to the occurrences that feed some closing leaf, collecting
/// the pruned leaves on the way. Returns the pruned tree and the ids still
/// needed below this node.
fn prune(node: &Node, leaves: &mut Vec<LeafInfo>) -> (ProofTree, BTreeSet<usize>) {
    if node.kids.is_empty() {
        // Keep exactly the two copies of the pair that closes here; every
        // other occurrence in the additive context belongs to (and is kept
        // by) a different branch.
        let keep: BTreeSet<usize> = node.closing.iter().copied().collect();
        let seq = node.seq.to_sequent(Some(&keep));
        let as_blue_occ = |id: usize| -> (BlueOcc, Colour) {
            let (o, side) = node.seq.find(id);
            (
                BlueOcc {
                    pos: o.pos.clone(),
                    side,
                    label: o.label.clone(),
                    formula: o.formula.clone(),
                },
                o.colour,
            )
        };
        let kind = match node.tag {
            RuleTag::Id => {
                let red = node
                    .closing
                    .iter()
                    .map(|id| node.seq.find(*id))
                    .find(|(o, _)| o.colour == Colour::Red)
                    .expect("an identity leaf closes on a red/blue pair");
                let var = match &red.0.formula {
                    Formula::Atom(v) => v.clone(),
                    other => panic!("identity leaf on non-atom {other}"),
                };
                LeafKind::Atom {
                    var,
                    label: red.0.label.clone(),
                    red_side: red.1,
                    red_pos: red.0.pos.clone(),
                }
            }
            _ => LeafKind::Const,
        };
        let (mut rem_l, mut rem_r) = (Vec::new(), Vec::new());
        let mut blues = Vec::new();
        for id in &keep {
            let (b, colour) = as_blue_occ(*id);
            if colour == Colour::Blue {
                blues.push(b.clone());
            }
            if colour == Colour::Red {
                match node.tag {
                    // The red atom of an identity leaf is the cut formula; it
                    // is not part of the remainder handed to the cut stage.
                    RuleTag::Id => continue,
                    // A red constant copy matters to the cut stage only when
                    // the closing rule fires on its side; otherwise it would
                    // linger in the premises as noise.
                    RuleTag::BotL if b.side != Side::Left => continue,
                    RuleTag::TopR if b.side != Side::Right => continue,
                    _ => {}
                }
            }
            match b.side {
                Side::Left => rem_l.push(b),
                Side::Right => rem_r.push(b),
            }
        }
        leaves.push(LeafInfo {
            rel: node.seq.rel.clone(),
            remainder_left: rem_l,
            remainder_right: rem_r,
            tag: node.tag.clone(),
            kind,
            blues,
        });
        return (ProofTree::leaf(seq, node.tag.clone()), keep);
    }

    let mut used = BTreeSet::new();
    let mut kids = Vec::new();
    for (i, kid) in node.kids.iter().enumerate() {
        let (tree, kid_used) = prune(kid, leaves);
        for id in kid_used {
            if !node.aux[i].contains(&id) {
                used.insert(id);
            }
        }
        kids.push(tree);
    }
    if let Some(p) = node.principal {
        used.insert(p);
    }
    let conclusion = node.seq.to_sequent(Some(&used));
    (
        ProofTree {
            conclusion,
            tag: multiplicative(&node.tag),
            premises: kids,
        },
        used,
    )
}

/// Build the two-copy identity derivation of `x0:φ ⊢ x0:φ`.
pub(crate) fn build_identity(phi: &Formula) -> Identity {
    let mut b = Builder {
        fresh: 0,
        next_id: 0,
        labels: BTreeMap::new(),
    };
    let root = b.fresh_label();
    let lo = b.occ(&root, phi.clone(), Colour::Red, Vec::new());
    let ro = b.occ(&root, phi.clone(), Colour::Blue, Vec::new());
    let (li, ri) = (lo.id, ro.id);
    let seq = OccSeq {
        rel: BTreeSet::new(),
        left: vec![lo],
        right: vec![ro],
    };
    let node = b.pair(seq, li, ri);
    let full = full_tree(&node);
    let mut leaves = Vec::new();
    let (pruned, _) = prune(&node, &mut leaves);
    Identity {
        full,
        pruned,
        labels: b.labels,
        leaves,
        root_label: root,
    }
}
