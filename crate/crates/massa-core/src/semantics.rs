//! Kripke semantics over small finite frames: exhaustive frame enumeration,
//! modal validity checking with an atom budget, evaluation of first-order
//! frame conditions, and the correspondence oracle that compares the two.
//!
//! Worlds are `0..n` with `n <= 8`; sets of worlds are `u8` bitmasks, and a
//! frame's relation is stored as one successor bitmask per world.

use crate::fo::{FoAtom, FoFormula};
use crate::formula::Formula;
use std::collections::BTreeMap;
use std::fmt;

/// Maximum number of worlds supported by the bitmask representation.
pub const MAX_WORLDS: u8 = 8;
/// Maximum number of worlds for exhaustive frame enumeration.
pub const MAX_ENUM_WORLDS: u8 = 5;

/// A finite Kripke frame: worlds `0..n` and an accessibility relation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Frame {
    n: u8,
    rel: [u8; MAX_WORLDS as usize],
}

impl Frame {
    /// A frame on `n` worlds with the given edges. Panics if `n` is 0 or
    /// exceeds [`MAX_WORLDS`], or an edge endpoint is out of range.
    pub fn new(n: u8, edges: &[(u8, u8)]) -> Frame {
        assert!(n >= 1 && n <= MAX_WORLDS, "frame size out of range: {n}");
        let mut rel = [0u8; MAX_WORLDS as usize];
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u},{v}) out of range for n={n}");
            rel[u as usize] |= 1 << v;
        }
        Frame { n, rel }
    }

    /// Decode a frame from an edge bitmap: bit `u*n + v` set means `u R v`.
    pub fn from_code(n: u8, code: u128) -> Frame {
        assert!(n >= 1 && n <= MAX_WORLDS, "frame size out of range: {n}");
        let mut rel = [0u8; MAX_WORLDS as usize];
        for u in 0..n {
            for v in 0..n {
                if code >> (u as u32 * n as u32 + v as u32) & 1 == 1 {
                    rel[u as usize] |= 1 << v;
                }
            }
        }
        Frame { n, rel }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Bitmask of the successors of world `u`.
    pub fn successors(&self, u: u8) -> u8 {
        self.rel[u as usize]
    }

    /// Bitmask containing every world of the frame.
    pub fn all_worlds(&self) -> u8 {
        (((1u16) << self.n) - 1) as u8
    }

    pub fn edges(&self) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if self.rel[u as usize] >> v & 1 == 1 {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .iter()
            .map(|(u, v)| format!("({u},{v})"))
            .collect();
        write!(f, "n={}; R={{{}}}", self.n, edges.join(","))
    }
}

/// Every frame on exactly `n` worlds, in edge-bitmap order. There are
/// `2^(n*n)` of them; `n` is capped at [`MAX_ENUM_WORLDS`].
pub fn frames(n: u8) -> impl Iterator<Item = Frame> {
    assert!(
        n >= 1 && n <= MAX_ENUM_WORLDS,
        "frame enumeration supports 1..={MAX_ENUM_WORLDS} worlds, got {n}"
    );
    let count: u128 = 1u128 << (n as u32 * n as u32);
    (0..count).map(move |code| Frame::from_code(n, code))
}

/// A frame together with a valuation assigning each atom a set of worlds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub frame: Frame,
    pub valuation: BTreeMap<String, u8>,
}

impl Model {
    /// The set of worlds where `f` is true, as a bitmask. Atoms missing from
    /// the valuation are treated as false everywhere.
    pub fn truth_set(&self, f: &Formula) -> u8 {
        let vals: Vec<(&str, u8)> = self
            .valuation
            .iter()
            .map(|(k, v)| (k.as_str(), *v))
            .collect();
        truth_set_in(&self.frame, &vals, f)
    }
}

/// The set of worlds of `frame` where `f` is true under the given atom
/// assignment, as a bitmask. Atoms missing from the assignment are treated
/// as false everywhere.
pub fn truth_set_in(frame: &Frame, vals: &[(&str, u8)], f: &Formula) -> u8 {
    let full = frame.all_worlds();
    match f {
        Formula::Atom(p) => vals
            .iter()
            .find(|(name, _)| *name == p.as_str())
            .map(|(_, m)| *m)
            .unwrap_or(0),
        Formula::Bot => 0,
        Formula::Top => full,
        Formula::Not(b) => !truth_set_in(frame, vals, b) & full,
        Formula::And(l, r) => truth_set_in(frame, vals, l) & truth_set_in(frame, vals, r),
        Formula::Or(l, r) => truth_set_in(frame, vals, l) | truth_set_in(frame, vals, r),
        Formula::Imp(l, r) => {
            (!truth_set_in(frame, vals, l) | truth_set_in(frame, vals, r)) & full
        }
        Formula::Box(b) => {
            let s = truth_set_in(frame, vals, b);
            let mut out = 0u8;
            for w in 0..frame.n {
                if frame.rel[w as usize] & !s == 0 {
                    out |= 1 << w;
                }
            }
            out
        }
        Formula::Dia(b) => {
            let s = truth_set_in(frame, vals, b);
            let mut out = 0u8;
            for w in 0..frame.n {
                if frame.rel[w as usize] & s != 0 {
                    out |= 1 << w;
                }
            }
            out
        }
    }
}

/// Cap on the number of distinct atoms a formula may use in exhaustive
/// validity checks; the check enumerates `2^(n * atoms)` valuations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationBudget {
    pub max_atoms: usize,
}

impl Default for ValidationBudget {
    fn default() -> Self {
        ValidationBudget { max_atoms: 2 }
    }
}

/// Errors from the exhaustive semantic checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemanticsError {
    /// The formula has more distinct atoms than the budget allows.
    BudgetExceeded { atoms: usize, max_atoms: usize },
    /// A first-order formula used a variable it never bound.
    UnboundVariable(String),
    /// Enumeration bound outside `1..=MAX_ENUM_WORLDS`.
    BadBound(u8),
}

impl fmt::Display for SemanticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticsError::BudgetExceeded { atoms, max_atoms } => write!(
                f,
                "formula has {atoms} atoms, over the validation budget of {max_atoms}"
            ),
            SemanticsError::UnboundVariable(v) => {
                write!(f, "first-order variable `{v}` is unbound")
            }
            SemanticsError::BadBound(n) => {
                write!(f, "world bound {n} outside 1..={MAX_ENUM_WORLDS}")
            }
        }
    }
}

impl std::error::Error for SemanticsError {}

/// True iff `f` holds at every world of `frame` under every valuation of its
/// atoms. Exhaustive in the valuations, so the atom count is budgeted.
pub fn frame_validates(
    frame: &Frame,
    f: &Formula,
    budget: &ValidationBudget,
) -> Result<bool, SemanticsError> {
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    if atoms.len() > budget.max_atoms {
        return Err(SemanticsError::BudgetExceeded {
            atoms: atoms.len(),
            max_atoms: budget.max_atoms,
        });
    }
    Ok(frame_validates_unchecked(frame, f, &atoms))
}

fn frame_validates_unchecked(frame: &Frame, f: &Formula, atoms: &[String]) -> bool {
    let full = frame.all_worlds();
    let k = atoms.len();
    let mut vals: Vec<(&str, u8)> = atoms.iter().map(|a| (a.as_str(), 0u8)).collect();
    // Mixed-radix counter over one valuation mask per atom.
    let states = 1u64 << (frame.n as u32 * k as u32);
    for code in 0..states {
        for (i, slot) in vals.iter_mut().enumerate() {
            slot.1 = (code >> (i as u32 * frame.n as u32)) as u8 & full;
        }
        if truth_set_in(frame, &vals, f) != full {
            return false;
        }
    }
    true
}

/// Evaluate a closed first-order formula on a frame.
pub fn frame_satisfies(frame: &Frame, fo: &FoFormula) -> Result<bool, SemanticsError> {
    let mut env: Vec<(String, u8)> = Vec::new();
    eval_fo(frame, fo, &mut env)
}

fn eval_fo(frame: &Frame, fo: &FoFormula, env: &mut Vec<(String, u8)>) -> Result<bool, SemanticsError> {
    match fo {
        FoFormula::Atom(a) => {
            let look = |v: &str, env: &[(String, u8)]| {
                env.iter()
                    .rev()
                    .find(|(name, _)| name == v)
                    .map(|(_, w)| *w)
                    .ok_or_else(|| SemanticsError::UnboundVariable(v.to_string()))
            };
            match a {
                FoAtom::Rel(x, y) => {
                    let (wx, wy) = (look(x, env)?, look(y, env)?);
                    Ok(frame.rel[wx as usize] >> wy & 1 == 1)
                }
                FoAtom::Eq(x, y) => Ok(look(x, env)? == look(y, env)?),
                FoAtom::True => Ok(true),
                FoAtom::False => Ok(false),
            }
        }
        FoFormula::Not(b) => Ok(!eval_fo(frame, b, env)?),
        FoFormula::And(l, r) => Ok(eval_fo(frame, l, env)? && eval_fo(frame, r, env)?),
        FoFormula::Or(l, r) => Ok(eval_fo(frame, l, env)? || eval_fo(frame, r, env)?),
        FoFormula::Imp(l, r) => Ok(!eval_fo(frame, l, env)? || eval_fo(frame, r, env)?),
        FoFormula::Forall(vs, b) => quantify(frame, vs, b, env, true),
        FoFormula::Exists(vs, b) => quantify(frame, vs, b, env, false),
    }
}

fn quantify(
    frame: &Frame,
    vs: &[String],
    body: &FoFormula,
    env: &mut Vec<(String, u8)>,
    universal: bool,
) -> Result<bool, SemanticsError> {
    if vs.is_empty() {
        return eval_fo(frame, body, env);
    }
    for w in 0..frame.n {
        env.push((vs[0].clone(), w));
        let sub = quantify(frame, &vs[1..], body, env, universal)?;
        env.pop();
        if sub != universal {
            return Ok(!universal);
        }
    }
    Ok(universal)
}

/// Outcome of an exhaustive comparison over all frames up to a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Correspondence {
    Holds { frames_checked: u64 },
    /// The first frame (smallest `n`, then edge-bitmap order) where the two
    /// sides disagree; `lhs`/`rhs` record each side's verdict there.
    Counterexample { frame: Frame, lhs: bool, rhs: bool },
}

impl Correspondence {
    pub fn holds(&self) -> bool {
        matches!(self, Correspondence::Holds { .. })
    }
}

/// Compare modal validity of `f` with truth of the closed first-order
/// condition `fo` on every frame with `1..=max_n` worlds.
pub fn corresponds(
    f: &Formula,
    fo: &FoFormula,
    max_n: u8,
    budget: &ValidationBudget,
) -> Result<Correspondence, SemanticsError> {
    if max_n < 1 || max_n > MAX_ENUM_WORLDS {
        return Err(SemanticsError::BadBound(max_n));
    }
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    if atoms.len() > budget.max_atoms {
        return Err(SemanticsError::BudgetExceeded {
            atoms: atoms.len(),
            max_atoms: budget.max_atoms,
        });
    }
    let free = fo.free_vars();
    if let Some(v) = free.into_iter().next() {
        return Err(SemanticsError::UnboundVariable(v));
    }
    let mut checked = 0u64;
    for n in 1..=max_n {
        for frame in frames(n) {
            let modal = frame_validates_unchecked(&frame, f, &atoms);
            let cond = frame_satisfies(&frame, fo)?;
            checked += 1;
            if modal != cond {
                return Ok(Correspondence::Counterexample {
                    frame,
                    lhs: modal,
                    rhs: cond,
                });
            }
        }
    }
    Ok(Correspondence::Holds {
        frames_checked: checked,
    })
}

/// Compare two closed first-order conditions on every frame up to `max_n`.
pub fn fo_equivalent(a: &FoFormula, b: &FoFormula, max_n: u8) -> Result<Correspondence, SemanticsError> {
    if max_n < 1 || max_n > MAX_ENUM_WORLDS {
        return Err(SemanticsError::BadBound(max_n));
    }
    for f in [a, b] {
        if let Some(v) = f.free_vars().into_iter().next() {
            return Err(SemanticsError::UnboundVariable(v));
        }
    }
    let mut checked = 0u64;
    for n in 1..=max_n {
        for frame in frames(n) {
            let va = frame_satisfies(&frame, a)?;
            let vb = frame_satisfies(&frame, b)?;
            checked += 1;
            if va != vb {
                return Ok(Correspondence::Counterexample {
                    frame,
                    lhs: va,
                    rhs: vb,
                });
            }
        }
    }
    Ok(Correspondence::Holds {
        frames_checked: checked,
    })
}
