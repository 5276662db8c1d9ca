//! Seeded random generation of formulas from the supported fragment.
//!
//! Every generated formula is a single definite conjunct: a skeleton of
//! disjunctions and boxes over parts built from conjunctions, diamonds,
//! literals and (rarely) constants. Acyclicity of the dependence order is
//! guaranteed by construction: variables are totally ordered by their index,
//! a part's critical variable is negated exactly once, and every other
//! variable of that part is chosen strictly below the critical one.

use crate::formula::Formula;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Size limits for generated formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusParams {
    /// Number of distinct propositional variables available (at most 4).
    pub max_atoms: usize,
    /// Nesting depth of the disjunction/box skeleton.
    pub skeleton_depth: u8,
    /// Nesting depth of the conjunction/diamond parts.
    pub part_depth: u8,
}

impl Default for CorpusParams {
    fn default() -> CorpusParams {
        CorpusParams {
            max_atoms: 2,
            skeleton_depth: 3,
            part_depth: 2,
        }
    }
}

const VARS: [&str; 4] = ["p", "q", "r", "s"];

/// Generate `count` distinct formulas deterministically from `seed`.
pub fn corpus(seed: u64, count: usize, params: &CorpusParams) -> Vec<Formula> {
    let vars = &VARS[..params.max_atoms.clamp(1, VARS.len())];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < count && attempts < count.saturating_mul(1000).max(1000) {
        attempts += 1;
        let f = skeleton(&mut rng, params.skeleton_depth, params, vars);
        debug_assert!(
            matches!(
                crate::classify::classify(&f),
                crate::classify::Classification::AnalyticInductive { ref conjuncts }
                    if conjuncts.len() == 1 && conjuncts[0].definite
            ),
            "generated formula `{f}` left the fragment"
        );
        if seen.insert(f.clone()) {
            out.push(f);
        }
    }
    out
}

fn skeleton(rng: &mut ChaCha8Rng, depth: u8, params: &CorpusParams, vars: &[&str]) -> Formula {
    let choice = if depth == 0 { 2 } else { rng.gen_range(0..4u8) };
    match choice {
        0 => Formula::or(
            skeleton(rng, depth - 1, params, vars),
            skeleton(rng, depth - 1, params, vars),
        ),
        1 => Formula::boxed(skeleton(rng, depth - 1, params, vars)),
        _ => part(rng, params.part_depth, vars),
    }
}

fn part(rng: &mut ChaCha8Rng, depth: u8, vars: &[&str]) -> Formula {
    if rng.gen_bool(0.5) {
        let critical = rng.gen_range(0..vars.len());
        supplying_part(rng, depth, vars[critical], &vars[..critical])
    } else {
        demanded_part(rng, depth, vars)
    }
}

fn rare_const(rng: &mut ChaCha8Rng) -> Option<Formula> {
    if rng.gen_bool(0.08) {
        Some(if rng.gen_bool(0.5) {
            Formula::Top
        } else {
            Formula::Bot
        })
    } else {
        None
    }
}

/// A part whose only negated leaf is `~critical`; other leaves come from
/// `below` (variables strictly under the critical one) or are constants.
fn supplying_part(rng: &mut ChaCha8Rng, depth: u8, critical: &str, below: &[&str]) -> Formula {
    let choice = if depth == 0 { 2 } else { rng.gen_range(0..4u8) };
    match choice {
        0 => {
            let crit_left = rng.gen_bool(0.5);
            let with = supplying_part(rng, depth - 1, critical, below);
            let without = positive_side(rng, depth - 1, below);
            if crit_left {
                Formula::and(with, without)
            } else {
                Formula::and(without, with)
            }
        }
        1 => Formula::dia(supplying_part(rng, depth - 1, critical, below)),
        _ => Formula::not(Formula::atom(critical)),
    }
}

/// A subtree of a supplying part that avoids the critical variable.
fn positive_side(rng: &mut ChaCha8Rng, depth: u8, below: &[&str]) -> Formula {
    let choice = if depth == 0 || below.is_empty() {
        2
    } else {
        rng.gen_range(0..4u8)
    };
    match choice {
        0 => Formula::and(
            positive_side(rng, depth - 1, below),
            positive_side(rng, depth - 1, below),
        ),
        1 => Formula::dia(positive_side(rng, depth - 1, below)),
        _ => {
            if let Some(c) = rare_const(rng) {
                c
            } else if below.is_empty() {
                Formula::Top
            } else {
                Formula::atom(below[rng.gen_range(0..below.len())])
            }
        }
    }
}

/// A part with only positive leaves.
fn demanded_part(rng: &mut ChaCha8Rng, depth: u8, vars: &[&str]) -> Formula {
    let choice = if depth == 0 { 2 } else { rng.gen_range(0..4u8) };
    match choice {
        0 => Formula::and(
            demanded_part(rng, depth - 1, vars),
            demanded_part(rng, depth - 1, vars),
        ),
        1 => Formula::dia(demanded_part(rng, depth - 1, vars)),
        _ => rare_const(rng)
            .unwrap_or_else(|| Formula::atom(vars[rng.gen_range(0..vars.len())])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, Classification};
    use crate::formula::parse;

    #[test]
    fn generation_is_deterministic() {
        let params = CorpusParams::default();
        assert_eq!(corpus(7, 20, &params), corpus(7, 20, &params));
        assert_ne!(corpus(7, 20, &params), corpus(8, 20, &params));
    }

    #[test]
    fn generated_formulas_stay_in_the_fragment() {
        let params = CorpusParams::default();
        let fs = corpus(42, 120, &params);
        assert_eq!(fs.len(), 120, "generator ran out of distinct formulas");
        for f in &fs {
            match classify(f) {
                Classification::AnalyticInductive { conjuncts } => {
                    assert_eq!(conjuncts.len(), 1, "`{f}` is not a single conjunct");
                    assert!(conjuncts[0].definite, "`{f}` is not definite");
                }
                other => panic!("`{f}` was rejected: {other:?}"),
            }
        }
    }

    #[test]
    fn generated_formulas_roundtrip_through_the_parser() {
        for f in corpus(3, 60, &CorpusParams::default()) {
            assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }
}
