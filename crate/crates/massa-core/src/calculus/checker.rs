//! Validation of derivation trees against the rules of the calculus.
//!
//! Every structural comparison is colour-blind and treats each side of a
//! sequent as a multiset of `(label, formula)` pairs. Two-premise logical
//! rules and cut are accepted in either the context-sharing or the
//! context-splitting reading; `box_L` and `dia_R` may keep or drop their
//! principal formula. Premises of a two-premise rule may carry fewer
//! relational atoms than the conclusion (weakening on relational atoms is
//! built in, as usual for systems where it is height-preserving admissible).

use super::{GeometricRule, Label, LabelledFormula, ProofTree, RelAtom, RuleTag, Sequent, Side};
use crate::formula::Formula;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Statistics from a successful proof check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProofCheck {
    /// Number of inference nodes checked.
    pub nodes: usize,
    /// True when no node uses cut.
    pub cut_free: bool,
}

/// A failed proof check: the premise indices leading from the root to the
/// offending node, and what went wrong there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofError {
    pub path: Vec<usize>,
    pub reason: String,
}

impl fmt::Display for ProofError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "invalid inference at the root: {}", self.reason)
        } else {
            let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
            write!(
                f,
                "invalid inference at node {}: {}",
                path.join("."),
                self.reason
            )
        }
    }
}

impl std::error::Error for ProofError {}

/// Check every inference in `tree`, resolving geometric tags by name in
/// `rules`.
pub fn check_proof(tree: &ProofTree, rules: &[GeometricRule]) -> Result<ProofCheck, ProofError> {
    let mut check = ProofCheck {
        nodes: 0,
        cut_free: true,
    };
    walk(tree, rules, &mut Vec::new(), &mut check)?;
    Ok(check)
}

fn walk(
    t: &ProofTree,
    rules: &[GeometricRule],
    path: &mut Vec<usize>,
    check: &mut ProofCheck,
) -> Result<(), ProofError> {
    check.nodes += 1;
    if t.tag == RuleTag::Cut {
        check.cut_free = false;
    }
    verify(t, rules).map_err(|reason| ProofError {
        path: path.clone(),
        reason,
    })?;
    for (i, p) in t.premises.iter().enumerate() {
        path.push(i);
        walk(p, rules, path, check)?;
        path.pop();
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Multisets of labelled formulas
// ---------------------------------------------------------------------------

type Key = (Label, Formula);
type Ms = BTreeMap<Key, usize>;

fn ms(v: &[LabelledFormula]) -> Ms {
    let mut out = Ms::new();
    for f in v {
        *out.entry((f.label.clone(), f.formula.clone())).or_insert(0) += 1;
    }
    out
}

fn ms_add(m: &mut Ms, k: Key) {
    *m.entry(k).or_insert(0) += 1;
}

fn ms_remove(m: &mut Ms, k: &Key) -> bool {
    match m.get_mut(k) {
        Some(n) if *n > 1 => {
            *n -= 1;
            true
        }
        Some(_) => {
            m.remove(k);
            true
        }
        None => false,
    }
}

fn ms_sum(a: &Ms, b: &Ms) -> Ms {
    let mut out = a.clone();
    for (k, n) in b {
        *out.entry(k.clone()).or_insert(0) += n;
    }
    out
}

/// `a - b`, or `None` when `b` is not contained in `a`.
fn ms_diff(a: &Ms, b: &Ms) -> Option<Ms> {
    let mut out = a.clone();
    for (k, n) in b {
        for _ in 0..*n {
            if !ms_remove(&mut out, k) {
                return None;
            }
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Equality closure
// ---------------------------------------------------------------------------

/// Whether `a = b` follows from the equality atoms in `rel` by reflexivity,
/// symmetry and transitivity.
pub(crate) fn eq_entailed(rel: &BTreeSet<RelAtom>, a: &Label, b: &Label) -> bool {
    if a == b {
        return true;
    }
    let mut comps: Vec<BTreeSet<&Label>> = Vec::new();
    for atom in rel {
        if let RelAtom::Eq(u, v) = atom {
            let iu = comps.iter().position(|c| c.contains(u));
            let iv = comps.iter().position(|c| c.contains(v));
            match (iu, iv) {
                (None, None) => comps.push([u, v].into_iter().collect()),
                (Some(i), None) => {
                    comps[i].insert(v);
                }
                (None, Some(j)) => {
                    comps[j].insert(u);
                }
                (Some(i), Some(j)) if i != j => {
                    let hi = comps.remove(i.max(j));
                    comps[i.min(j)].extend(hi);
                }
                _ => {}
            }
        }
    }
    comps.iter().any(|c| c.contains(a) && c.contains(b))
}

// ---------------------------------------------------------------------------
// Per-rule verification
// ---------------------------------------------------------------------------

fn verify(t: &ProofTree, rules: &[GeometricRule]) -> Result<(), String> {
    let c = &t.conclusion;
    let ps: Vec<&Sequent> = t.premises.iter().map(|x| &x.conclusion).collect();
    let arity = |n: usize| -> Result<(), String> {
        if ps.len() == n {
            Ok(())
        } else {
            Err(format!(
                "{} expects {} premise(s), found {}",
                t.tag,
                n,
                ps.len()
            ))
        }
    };
    use Formula as F;
    match &t.tag {
        RuleTag::Id => {
            arity(0)?;
            let ok = c.left.iter().any(|lf| {
                matches!(lf.formula, F::Atom(_))
                    && c.right
                        .iter()
                        .any(|rf| rf.label == lf.label && rf.formula == lf.formula)
            });
            ok.then_some(())
                .ok_or_else(|| "no atom occurs at the same label on both sides".into())
        }
        RuleTag::EqId => {
            arity(0)?;
            let ok = c.left.iter().any(|lf| {
                matches!(lf.formula, F::Atom(_))
                    && c.right.iter().any(|rf| {
                        rf.formula == lf.formula && eq_entailed(&c.rel, &lf.label, &rf.label)
                    })
            });
            ok.then_some(()).ok_or_else(|| {
                "no atom occurs on both sides at labels equated by the relational atoms".into()
            })
        }
        RuleTag::BotL => {
            arity(0)?;
            c.left
                .iter()
                .any(|lf| lf.formula == F::Bot)
                .then_some(())
                .ok_or_else(|| "no falsum on the left".into())
        }
        RuleTag::TopR => {
            arity(0)?;
            c.right
                .iter()
                .any(|rf| rf.formula == F::Top)
                .then_some(())
                .ok_or_else(|| "no verum on the right".into())
        }
        RuleTag::AndL => {
            arity(1)?;
            unary_logical(c, ps[0], Side::Left, &|f| match f {
                F::And(a, b) => Some(vec![
                    ((**a).clone(), Side::Left),
                    ((**b).clone(), Side::Left),
                ]),
                _ => None,
            })
        }
        RuleTag::OrR => {
            arity(1)?;
            unary_logical(c, ps[0], Side::Right, &|f| match f {
                F::Or(a, b) => Some(vec![
                    ((**a).clone(), Side::Right),
                    ((**b).clone(), Side::Right),
                ]),
                _ => None,
            })
        }
        RuleTag::ImpR => {
            arity(1)?;
            unary_logical(c, ps[0], Side::Right, &|f| match f {
                F::Imp(a, b) => Some(vec![
                    ((**a).clone(), Side::Left),
                    ((**b).clone(), Side::Right),
                ]),
                _ => None,
            })
        }
        RuleTag::NegL => {
            arity(1)?;
            unary_logical(c, ps[0], Side::Left, &|f| match f {
                F::Not(a) => Some(vec![((**a).clone(), Side::Right)]),
                _ => None,
            })
        }
        RuleTag::NegR => {
            arity(1)?;
            unary_logical(c, ps[0], Side::Right, &|f| match f {
                F::Not(a) => Some(vec![((**a).clone(), Side::Left)]),
                _ => None,
            })
        }
        RuleTag::BoxR => {
            arity(1)?;
            modal_intro(c, ps[0], Side::Right)
        }
        RuleTag::DiaL => {
            arity(1)?;
            modal_intro(c, ps[0], Side::Left)
        }
        RuleTag::BoxL { .. } => {
            arity(1)?;
            modal_elim(c, ps[0], Side::Left)
        }
        RuleTag::DiaR { .. } => {
            arity(1)?;
            modal_elim(c, ps[0], Side::Right)
        }
        RuleTag::AndR { .. } => {
            arity(2)?;
            binary_logical(c, ps[0], ps[1], Side::Right, &|f| match f {
                F::And(a, b) => Some([
                    ((**a).clone(), Side::Right),
                    ((**b).clone(), Side::Right),
                ]),
                _ => None,
            })
        }
        RuleTag::OrL { .. } => {
            arity(2)?;
            binary_logical(c, ps[0], ps[1], Side::Left, &|f| match f {
                F::Or(a, b) => Some([((**a).clone(), Side::Left), ((**b).clone(), Side::Left)]),
                _ => None,
            })
        }
        RuleTag::ImpL { .. } => {
            arity(2)?;
            binary_logical(c, ps[0], ps[1], Side::Left, &|f| match f {
                F::Imp(a, b) => Some([
                    ((**a).clone(), Side::Right),
                    ((**b).clone(), Side::Left),
                ]),
                _ => None,
            })
        }
        RuleTag::Cut => {
            arity(2)?;
            cut(c, ps[0], ps[1])
        }
        RuleTag::EqRefl => {
            arity(1)?;
            let diff = rel_added(c, ps[0])?;
            match &diff[..] {
                [RelAtom::Eq(u, v)] if u == v => same_formulas(c, ps[0]),
                _ => Err("premise must add exactly one reflexive equality".into()),
            }
        }
        RuleTag::EqTrans => {
            arity(1)?;
            let diff = rel_added(c, ps[0])?;
            match &diff[..] {
                [RelAtom::Eq(u, v)] if eq_entailed(&c.rel, u, v) => same_formulas(c, ps[0]),
                _ => Err(
                    "premise must add one equality already entailed by those present".into(),
                ),
            }
        }
        RuleTag::ReplRel1 => {
            arity(1)?;
            let diff = rel_added(c, ps[0])?;
            match &diff[..] {
                [RelAtom::R(a2, b)]
                    if c.rel.iter().any(|at| {
                        matches!(at, RelAtom::R(a1, b1) if b1 == b && eq_entailed(&c.rel, a1, a2))
                    }) =>
                {
                    same_formulas(c, ps[0])
                }
                _ => Err("premise must replace the source of an accessibility atom along an equality".into()),
            }
        }
        RuleTag::ReplRel2 => {
            arity(1)?;
            let diff = rel_added(c, ps[0])?;
            match &diff[..] {
                [RelAtom::R(a, b2)]
                    if c.rel.iter().any(|at| {
                        matches!(at, RelAtom::R(a1, b1) if a1 == a && eq_entailed(&c.rel, b1, b2))
                    }) =>
                {
                    same_formulas(c, ps[0])
                }
                _ => Err("premise must replace the target of an accessibility atom along an equality".into()),
            }
        }
        RuleTag::ReplForm => {
            arity(1)?;
            let p = ps[0];
            if p.rel != c.rel {
                return Err("premise changes the relational atoms".into());
            }
            if ms(&p.right) != ms(&c.right) {
                return Err("premise changes the right-hand side".into());
            }
            let extra = ms_diff(&ms(&p.left), &ms(&c.left))
                .ok_or("premise drops a formula from the left-hand side")?;
            let mut items = extra.iter();
            match (items.next(), items.next()) {
                (Some(((m, a), 1)), None)
                    if c.left.iter().any(|lf| {
                        lf.formula == *a && eq_entailed(&c.rel, &lf.label, m)
                    }) =>
                {
                    Ok(())
                }
                _ => Err(
                    "premise must copy one left formula to a label equated with its own".into(),
                ),
            }
        }
        RuleTag::Geometric(name) => {
            let rule = rules
                .iter()
                .find(|r| r.name == *name)
                .ok_or_else(|| format!("unknown rule `{name}`"))?;
            arity(rule.premises.len())?;
            geometric(c, &ps, rule)
        }
    }
}

/// Premise relational atoms must extend the conclusion's; returns the new
/// ones.
fn rel_added(c: &Sequent, p: &Sequent) -> Result<Vec<RelAtom>, String> {
    if !c.rel.is_subset(&p.rel) {
        return Err("premise drops a relational atom".into());
    }
    Ok(p.rel.difference(&c.rel).cloned().collect())
}

fn same_formulas(c: &Sequent, p: &Sequent) -> Result<(), String> {
    if ms(&p.left) == ms(&c.left) && ms(&p.right) == ms(&c.right) {
        Ok(())
    } else {
        Err("premise changes the formulas of the sequent".into())
    }
}

/// One-premise logical rule: the principal formula on `side` is replaced by
/// the components given by `decompose`, at the same label.
fn unary_logical(
    c: &Sequent,
    p: &Sequent,
    side: Side,
    decompose: &dyn Fn(&Formula) -> Option<Vec<(Formula, Side)>>,
) -> Result<(), String> {
    if p.rel != c.rel {
        return Err("premise changes the relational atoms".into());
    }
    let (cl, cr) = (ms(&c.left), ms(&c.right));
    let (pl, pr) = (ms(&p.left), ms(&p.right));
    let pool = match side {
        Side::Left => &c.left,
        Side::Right => &c.right,
    };
    let mut seen = BTreeSet::new();
    for lf in pool {
        let key = (lf.label.clone(), lf.formula.clone());
        if !seen.insert(key.clone()) {
            continue;
        }
        let Some(parts) = decompose(&lf.formula) else {
            continue;
        };
        let (mut el, mut er) = (cl.clone(), cr.clone());
        match side {
            Side::Left => ms_remove(&mut el, &key),
            Side::Right => ms_remove(&mut er, &key),
        };
        for (f, s) in parts {
            match s {
                Side::Left => ms_add(&mut el, (lf.label.clone(), f)),
                Side::Right => ms_add(&mut er, (lf.label.clone(), f)),
            }
        }
        if pl == el && pr == er {
            return Ok(());
        }
    }
    Err("no principal formula matches the premise".into())
}

/// `box_R` / `dia_L`: the premise adds one accessibility atom to a fresh
/// label carrying the immediate subformula.
fn modal_intro(c: &Sequent, p: &Sequent, side: Side) -> Result<(), String> {
    let diff = rel_added(c, p)?;
    let [RelAtom::R(x, y)] = &diff[..] else {
        return Err("premise must add exactly one accessibility atom".into());
    };
    if c.labels().contains(y) {
        return Err(format!("label `{y}` is not fresh for the conclusion"));
    }
    let (cl, cr) = (ms(&c.left), ms(&c.right));
    let (pl, pr) = (ms(&p.left), ms(&p.right));
    let pool = match side {
        Side::Left => &c.left,
        Side::Right => &c.right,
    };
    for lf in pool {
        if lf.label != *x {
            continue;
        }
        let inner = match (&lf.formula, side) {
            (Formula::Box(a), Side::Right) => a,
            (Formula::Dia(a), Side::Left) => a,
            _ => continue,
        };
        let (mut el, mut er) = (cl.clone(), cr.clone());
        let key = (lf.label.clone(), lf.formula.clone());
        match side {
            Side::Left => {
                ms_remove(&mut el, &key);
                ms_add(&mut el, (y.clone(), (**inner).clone()));
            }
            Side::Right => {
                ms_remove(&mut er, &key);
                ms_add(&mut er, (y.clone(), (**inner).clone()));
            }
        }
        if pl == el && pr == er {
            return Ok(());
        }
    }
    Err("no principal modal formula matches the premise".into())
}

/// `box_L` / `dia_R`: the premise carries the immediate subformula at some
/// label already reachable in the conclusion; the principal formula may be
/// kept or dropped.
fn modal_elim(c: &Sequent, p: &Sequent, side: Side) -> Result<(), String> {
    if p.rel != c.rel {
        return Err("premise changes the relational atoms".into());
    }
    let (cl, cr) = (ms(&c.left), ms(&c.right));
    let (pl, pr) = (ms(&p.left), ms(&p.right));
    let pool = match side {
        Side::Left => &c.left,
        Side::Right => &c.right,
    };
    for lf in pool {
        let inner = match (&lf.formula, side) {
            (Formula::Box(a), Side::Left) => a,
            (Formula::Dia(a), Side::Right) => a,
            _ => continue,
        };
        let x = &lf.label;
        let key = (lf.label.clone(), lf.formula.clone());
        for atom in &c.rel {
            let RelAtom::R(u, y) = atom else { continue };
            if u != x {
                continue;
            }
            for keep in [true, false] {
                let (mut el, mut er) = (cl.clone(), cr.clone());
                let target = match side {
                    Side::Left => &mut el,
                    Side::Right => &mut er,
                };
                if !keep {
                    ms_remove(target, &key);
                }
                ms_add(target, (y.clone(), (**inner).clone()));
                if pl == el && pr == er {
                    return Ok(());
                }
            }
        }
    }
    Err("no principal modal formula matches the premise".into())
}

/// Two-premise logical rule, accepted in the context-sharing reading (each
/// premise repeats the whole context) or the context-splitting one (contexts
/// distribute, principal dropped).
fn binary_logical(
    c: &Sequent,
    p1: &Sequent,
    p2: &Sequent,
    side: Side,
    decompose: &dyn Fn(&Formula) -> Option<[(Formula, Side); 2]>,
) -> Result<(), String> {
    if !p1.rel.is_subset(&c.rel) || !p2.rel.is_subset(&c.rel) {
        return Err("premise adds relational atoms".into());
    }
    let (cl, cr) = (ms(&c.left), ms(&c.right));
    let pool = match side {
        Side::Left => &c.left,
        Side::Right => &c.right,
    };
    let mut seen = BTreeSet::new();
    for lf in pool {
        let key = (lf.label.clone(), lf.formula.clone());
        if !seen.insert(key.clone()) {
            continue;
        }
        let Some(comp) = decompose(&lf.formula) else {
            continue;
        };
        // Conclusion with the principal formula removed.
        let (mut bl, mut br) = (cl.clone(), cr.clone());
        match side {
            Side::Left => ms_remove(&mut bl, &key),
            Side::Right => ms_remove(&mut br, &key),
        };
        let comp_key =
            |i: usize| -> (Key, Side) { ((lf.label.clone(), comp[i].0.clone()), comp[i].1) };

        // Context-sharing: premise i = conclusion - principal + component i.
        let additive = (0..2).all(|i| {
            let p = if i == 0 { p1 } else { p2 };
            let (k, s) = comp_key(i);
            let (mut el, mut er) = (bl.clone(), br.clone());
            match s {
                Side::Left => ms_add(&mut el, k),
                Side::Right => ms_add(&mut er, k),
            }
            ms(&p.left) == el && ms(&p.right) == er
        });
        if additive {
            return Ok(());
        }

        // Context-splitting: component i sits in premise i; the premises'
        // remaining formulas sum to the conclusion without the principal.
        let strip = |p: &Sequent, i: usize| -> Option<(Ms, Ms)> {
            let (k, s) = comp_key(i);
            let (mut l, mut r) = (ms(&p.left), ms(&p.right));
            let removed = match s {
                Side::Left => ms_remove(&mut l, &k),
                Side::Right => ms_remove(&mut r, &k),
            };
            removed.then_some((l, r))
        };
        if let (Some((l1, r1)), Some((l2, r2))) = (strip(p1, 0), strip(p2, 1)) {
            if ms_sum(&l1, &l2) == bl && ms_sum(&r1, &r2) == br {
                return Ok(());
            }
        }
    }
    Err("no principal formula matches the premises".into())
}

fn cut(c: &Sequent, p1: &Sequent, p2: &Sequent) -> Result<(), String> {
    if !p1.rel.is_subset(&c.rel) || !p2.rel.is_subset(&c.rel) {
        return Err("premise adds relational atoms".into());
    }
    let (cl, cr) = (ms(&c.left), ms(&c.right));
    let (p1l, p1r) = (ms(&p1.left), ms(&p1.right));
    let (p2l, p2r) = (ms(&p2.left), ms(&p2.right));
    let candidates: Vec<Key> = p1r
        .keys()
        .filter(|k| p2l.contains_key(*k))
        .cloned()
        .collect();
    for k in candidates {
        // Context-sharing.
        let (mut e1r, mut e2l) = (cr.clone(), cl.clone());
        ms_add(&mut e1r, k.clone());
        ms_add(&mut e2l, k.clone());
        if p1l == cl && p1r == e1r && p2l == e2l && p2r == cr {
            return Ok(());
        }
        // Context-splitting.
        let (mut s1r, mut s2l) = (p1r.clone(), p2l.clone());
        ms_remove(&mut s1r, &k);
        ms_remove(&mut s2l, &k);
        if ms_sum(&p1l, &s2l) == cl && ms_sum(&s1r, &p2r) == cr {
            return Ok(());
        }
    }
    Err("no cut formula matches the premises".into())
}

// ---------------------------------------------------------------------------
// Geometric rule instances
// ---------------------------------------------------------------------------

/// Match `patterns` (relational atoms over rule variables) into `pool`.
/// `bind_ok` gates new variable bindings; `found` receives each complete
/// match (binding plus which pool atoms were used) and returns `true` to
/// stop the search.
fn match_into(
    patterns: &[RelAtom],
    pool: &[RelAtom],
    binding: &mut BTreeMap<Label, Label>,
    used: &mut [bool],
    bind_ok: &dyn Fn(&Label, &Label, &BTreeMap<Label, Label>) -> bool,
    found: &mut dyn FnMut(&BTreeMap<Label, Label>, &[bool]) -> bool,
) -> bool {
    let Some((pat, rest)) = patterns.split_first() else {
        return found(binding, used);
    };
    for (i, atom) in pool.iter().enumerate() {
        let orientations: Vec<[(&Label, &Label); 2]> = match (pat, atom) {
            (RelAtom::R(u, v), RelAtom::R(x, y)) => vec![[(u, x), (v, y)]],
            (RelAtom::Eq(u, v), RelAtom::Eq(x, y)) => vec![[(u, x), (v, y)], [(u, y), (v, x)]],
            _ => Vec::new(),
        };
        for pairs in orientations {
            let mut added: Vec<Label> = Vec::new();
            let mut ok = true;
            for (var, val) in pairs {
                match binding.get(var) {
                    Some(b) if b == val => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => {
                        if !bind_ok(var, val, binding) {
                            ok = false;
                            break;
                        }
                        binding.insert(var.clone(), val.clone());
                        added.push(var.clone());
                    }
                }
            }
            if ok {
                let was = used[i];
                used[i] = true;
                let stop = match_into(rest, pool, binding, used, bind_ok, found);
                used[i] = was;
                if stop {
                    for v in &added {
                        binding.remove(v);
                    }
                    return true;
                }
            }
            for v in &added {
                binding.remove(v);
            }
        }
    }
    false
}

/// Formulas in a geometric-rule premise must repeat the conclusion's, plus
/// optionally falsum on the left or verum on the right.
fn premise_formulas_ok(c: &Sequent, p: &Sequent) -> Result<(), String> {
    let extra_l = ms_diff(&ms(&p.left), &ms(&c.left))
        .ok_or("premise drops a formula from the left-hand side")?;
    let extra_r = ms_diff(&ms(&p.right), &ms(&c.right))
        .ok_or("premise drops a formula from the right-hand side")?;
    if extra_l.keys().any(|(_, f)| *f != Formula::Bot) {
        return Err("premise adds a non-falsum formula on the left".into());
    }
    if extra_r.keys().any(|(_, f)| *f != Formula::Top) {
        return Err("premise adds a non-verum formula on the right".into());
    }
    Ok(())
}

fn geometric(c: &Sequent, ps: &[&Sequent], rule: &GeometricRule) -> Result<(), String> {
    for (i, p) in ps.iter().enumerate() {
        if !c.rel.is_subset(&p.rel) {
            return Err(format!("premise {} drops relational atoms", i + 1));
        }
        premise_formulas_ok(c, p).map_err(|e| format!("premise {}: {e}", i + 1))?;
    }
    let c_labels = c.labels();
    let pool: Vec<RelAtom> = c.rel.iter().cloned().collect();
    let patterns: Vec<RelAtom> = rule.conclusion_rel.iter().cloned().collect();

    // Candidate assignments of the rule's universals: match the conclusion
    // pattern into the conclusion's relational atoms, then close over the
    // universals the pattern leaves unconstrained.
    let mut partials: BTreeSet<BTreeMap<Label, Label>> = BTreeSet::new();
    {
        let mut binding = BTreeMap::new();
        let mut used = vec![false; pool.len()];
        let is_universal =
            |v: &Label, _: &Label, _: &BTreeMap<Label, Label>| rule.universals.contains(v);
        match_into(
            &patterns,
            &pool,
            &mut binding,
            &mut used,
            &is_universal,
            &mut |b, _| {
                partials.insert(b.clone());
                false
            },
        );
    }
    let label_vec: Vec<Label> = c_labels.iter().cloned().collect();
    let mut sigmas: Vec<BTreeMap<Label, Label>> = Vec::new();
    for partial in partials {
        let unbound: Vec<&Label> = rule
            .universals
            .iter()
            .filter(|u| !partial.contains_key(*u))
            .collect();
        let mut stack = vec![partial];
        for u in unbound {
            let mut next = Vec::new();
            for s in &stack {
                for l in &label_vec {
                    let mut s2 = s.clone();
                    s2.insert(u.clone(), l.clone());
                    next.push(s2);
                }
            }
            stack = next;
            if stack.len() > 10_000 {
                return Err("too many candidate instantiations of the rule".into());
            }
        }
        sigmas.extend(stack);
    }

    'sigma: for sigma in &sigmas {
        for (rp, p) in rule.premises.iter().zip(ps) {
            let diff: Vec<RelAtom> = p.rel.difference(&c.rel).cloned().collect();
            let pats: Vec<RelAtom> = rp.extra_rel.iter().cloned().collect();
            let mut binding = sigma.clone();
            let mut used = vec![false; diff.len()];
            let bind_ok = |v: &Label, val: &Label, b: &BTreeMap<Label, Label>| {
                rp.eigen.contains(v)
                    && !c_labels.contains(val)
                    && !b.values().any(|x| x == val)
            };
            let mut covered = false;
            match_into(&pats, &diff, &mut binding, &mut used, &bind_ok, &mut |_, used| {
                if used.iter().all(|u| *u) {
                    covered = true;
                    true
                } else {
                    false
                }
            });
            if !covered {
                continue 'sigma;
            }
        }
        return Ok(());
    }
    Err(format!(
        "the premises are not an instance of rule `{}`",
        rule.name
    ))
}

#[cfg(test)]
mod tests {
    use super::super::{Colour, GeometricRule, RulePremise};
    use super::*;

    fn seq(rel: &[&str], left: &[&str], right: &[&str]) -> Sequent {
        Sequent {
            rel: rel.iter().map(|s| RelAtom::parse(s).unwrap()).collect(),
            left: left
                .iter()
                .map(|s| LabelledFormula::parse(s).unwrap())
                .collect(),
            right: right
                .iter()
                .map(|s| LabelledFormula::parse(s).unwrap())
                .collect(),
        }
    }

    fn node(seq: Sequent, tag: RuleTag, premises: Vec<ProofTree>) -> ProofTree {
        ProofTree {
            conclusion: seq,
            tag,
            premises,
        }
    }

    #[test]
    fn identity_implication_checks() {
        let tree = node(
            seq(&[], &[], &["x:p -> p"]),
            RuleTag::ImpR,
            vec![node(seq(&[], &["x:p"], &["x:p"]), RuleTag::Id, vec![])],
        );
        let check = check_proof(&tree, &[]).unwrap();
        assert_eq!(check.nodes, 2);
        assert!(check.cut_free);
    }

    #[test]
    fn bad_leaf_is_located_by_path() {
        let tree = node(
            seq(&[], &[], &["x:p -> q"]),
            RuleTag::ImpR,
            vec![node(seq(&[], &["x:p"], &["x:q"]), RuleTag::Id, vec![])],
        );
        let err = check_proof(&tree, &[]).unwrap_err();
        assert_eq!(err.path, vec![0]);
        assert!(err.reason.contains("no atom"));
    }

    #[test]
    fn modal_identity_checks_and_freshness_is_enforced() {
        let tree = node(
            seq(&[], &["x:box p"], &["x:box p"]),
            RuleTag::BoxR,
            vec![node(
                seq(&["xRy"], &["x:box p"], &["y:p"]),
                RuleTag::BoxL { mult: false },
                vec![node(
                    seq(&["xRy"], &["x:box p", "y:p"], &["y:p"]),
                    RuleTag::Id,
                    vec![],
                )],
            )],
        );
        assert!(check_proof(&tree, &[]).is_ok());

        // Reusing the conclusion's own label is rejected.
        let stale = node(
            seq(&[], &["x:box p"], &["x:box p"]),
            RuleTag::BoxR,
            vec![node(seq(&["xRx"], &["x:box p"], &["x:p"]), RuleTag::Id, vec![])],
        );
        let err = check_proof(&stale, &[]).unwrap_err();
        assert!(err.reason.contains("not fresh"));
    }

    #[test]
    fn multiplicative_box_left_drops_principal() {
        let tree = node(
            seq(&["xRy"], &["x:box p"], &["y:p"]),
            RuleTag::BoxL { mult: true },
            vec![node(seq(&["xRy"], &["y:p"], &["y:p"]), RuleTag::Id, vec![])],
        );
        assert!(check_proof(&tree, &[]).is_ok());
    }

    #[test]
    fn equated_labels_close_a_leaf() {
        assert!(check_proof(
            &node(seq(&["t=w"], &["t:p"], &["w:p"]), RuleTag::EqId, vec![]),
            &[],
        )
        .is_ok());
        assert!(check_proof(
            &node(seq(&["t=u", "u=w"], &["t:p"], &["w:p"]), RuleTag::EqId, vec![]),
            &[],
        )
        .is_ok());
        assert!(check_proof(
            &node(seq(&[], &["t:p"], &["w:p"]), RuleTag::EqId, vec![]),
            &[],
        )
        .is_err());
    }

    #[test]
    fn splitting_implication_left_checks() {
        let tree = node(
            seq(&[], &["x:p", "x:p -> q"], &["x:q"]),
            RuleTag::ImpL { mult: true },
            vec![
                node(seq(&[], &["x:p"], &["x:p"]), RuleTag::Id, vec![]),
                node(seq(&[], &["x:q"], &["x:q"]), RuleTag::Id, vec![]),
            ],
        );
        assert!(check_proof(&tree, &[]).is_ok());
    }

    #[test]
    fn cut_is_checked_and_reported() {
        let tree = node(
            seq(&[], &["x:p"], &["x:p"]),
            RuleTag::Cut,
            vec![
                node(seq(&[], &["x:p"], &["x:p", "x:q"]), RuleTag::Id, vec![]),
                node(seq(&[], &["x:p", "x:q"], &["x:p"]), RuleTag::Id, vec![]),
            ],
        );
        let check = check_proof(&tree, &[]).unwrap();
        assert!(!check.cut_free);
    }

    fn directedness() -> GeometricRule {
        GeometricRule {
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
        }
    }

    #[test]
    fn geometric_instance_checks() {
        let rule = directedness();
        let concl = seq(&["xRy", "xRz"], &[], &["y:dia p"]);
        let prem = seq(&["xRy", "xRz", "yRt", "zRw", "t=w"], &[], &["y:dia p"]);
        let tree = node(
            concl,
            RuleTag::Geometric("Dir".into()),
            vec![node(prem, RuleTag::TopR, vec![])],
        );
        // The premise leaf is not an axiom; check only the root inference by
        // giving the leaf a closable shape instead.
        let mut ok_tree = tree.clone();
        ok_tree.premises[0].conclusion.right.push(LabelledFormula::new(
            "y",
            Formula::Top,
            Colour::Plain,
        ));
        assert!(check_proof(&ok_tree, &[rule.clone()]).is_ok());

        // Premise missing one of the new atoms is rejected.
        let mut bad = ok_tree.clone();
        bad.premises[0]
            .conclusion
            .rel
            .remove(&RelAtom::rel("z", "w"));
        let err = check_proof(&bad, &[rule.clone()]).unwrap_err();
        assert!(err.reason.contains("Dir"));

        // Unknown rule name is rejected.
        let err = check_proof(&ok_tree, &[]).unwrap_err();
        assert!(err.reason.contains("unknown rule"));
    }

    #[test]
    fn geometric_eigenvariables_must_be_fresh() {
        let rule = directedness();
        // `t` is instantiated by a label already in the conclusion.
        let concl = seq(&["xRy", "xRz", "yRy"], &[], &["y:p", "y:true"]);
        let prem = seq(&["xRy", "xRz", "yRy", "zRy", "y=y"], &[], &["y:p", "y:true"]);
        let tree = node(
            concl,
            RuleTag::Geometric("Dir".into()),
            vec![node(prem, RuleTag::TopR, vec![])],
        );
        assert!(check_proof(&tree, &[rule]).is_err());
    }

    #[test]
    fn geometric_premise_tolerates_constant_markers_only() {
        // A reflexivity-style rule whose premise carries a falsum marker.
        let rule = GeometricRule {
            name: "r".into(),
            universals: vec!["x".into()],
            conclusion_rel: BTreeSet::new(),
            premises: vec![RulePremise {
                eigen: vec![],
                extra_rel: [RelAtom::rel("x", "x")].into_iter().collect(),
                bot_markers: vec!["x".into()],
                top_markers: vec![],
            }],
        };
        let concl = seq(&[], &[], &["x:p"]);
        let with_marker = node(
            concl.clone(),
            RuleTag::Geometric("r".into()),
            vec![node(
                seq(&["xRx"], &["x:false"], &["x:p"]),
                RuleTag::BotL,
                vec![],
            )],
        );
        assert!(check_proof(&with_marker, &[rule.clone()]).is_ok());

        let with_junk = node(
            concl,
            RuleTag::Geometric("r".into()),
            vec![node(
                seq(&["xRx"], &["x:q"], &["x:p"]),
                RuleTag::BotL,
                vec![],
            )],
        );
        assert!(check_proof(&with_junk, &[rule]).is_err());
    }

    #[test]
    fn equality_rules_check() {
        // eq_refl adds x=x.
        assert!(check_proof(
            &node(
                seq(&[], &["x:p"], &["x:p"]),
                RuleTag::EqRefl,
                vec![node(seq(&["x=x"], &["x:p"], &["x:p"]), RuleTag::Id, vec![])],
            ),
            &[],
        )
        .is_ok());
        // eq_trans materializes an equality entailed through the closure.
        assert!(check_proof(
            &node(
                seq(&["x=y", "y=z"], &["x:p"], &["z:p"]),
                RuleTag::EqTrans,
                vec![node(
                    seq(&["x=y", "y=z", "x=z"], &["x:p"], &["z:p"]),
                    RuleTag::EqId,
                    vec![],
                )],
            ),
            &[],
        )
        .is_ok());
        // ...but not an unrelated one.
        assert!(check_proof(
            &node(
                seq(&["x=y"], &["x:p"], &["z:p"]),
                RuleTag::EqTrans,
                vec![node(
                    seq(&["x=y", "x=z"], &["x:p"], &["z:p"]),
                    RuleTag::EqId,
                    vec![],
                )],
            ),
            &[],
        )
        .is_err());
        // repl copies a left formula along an equality.
        assert!(check_proof(
            &node(
                seq(&["x=y"], &["x:box p"], &["y:box p"]),
                RuleTag::ReplForm,
                vec![node(
                    seq(&["x=y"], &["x:box p", "y:box p"], &["y:box p"]),
                    RuleTag::Id,
                    vec![],
                )],
            ),
            &[],
        )
        .is_err()); // box p is not atomic, so the Id leaf fails...
        assert!(check_proof(
            &node(
                seq(&["x=y"], &["x:p"], &["y:p"]),
                RuleTag::ReplForm,
                vec![node(
                    seq(&["x=y"], &["x:p", "y:p"], &["y:p"]),
                    RuleTag::Id,
                    vec![],
                )],
            ),
            &[],
        )
        .is_ok());
        // repl_R2 copies the target of an edge along an equality.
        assert!(check_proof(
            &node(
                seq(&["xRy", "y=z"], &["x:p"], &["x:p"]),
                RuleTag::ReplRel2,
                vec![node(
                    seq(&["xRy", "xRz", "y=z"], &["x:p"], &["x:p"]),
                    RuleTag::Id,
                    vec![],
                )],
            ),
            &[],
        )
        .is_ok());
    }
}
