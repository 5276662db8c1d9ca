//! First-order frame conditions: geometric axioms read off from synthesized
//! rules, a small general first-order language over one binary relation and
//! equality, a parser/printer for it, and an equivalence-guarded simplifier.
//!
//! Concrete grammar:
//!
//! ```text
//! fo    := "forall" var+ "." fo | imp
//! imp   := disj ( "->" fo )?
//! disj  := conj ( "|" conj )*
//! conj  := unary ( "&" unary )*
//! unary := "~" unary | "exists" var+ "." unary | "(" fo ")"
//!        | var "R" var | var "=" var | "true" | "false"
//! var   := [a-z][a-z0-9_]*
//! ```

use crate::calculus::{GeometricRule, RelAtom};
use crate::formula::SyntaxError;
use crate::semantics;
use std::collections::BTreeSet;
use std::fmt;

/// An atomic first-order statement about labelled worlds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FoAtom {
    /// `x R y`: the accessibility relation.
    Rel(String, String),
    /// `x = y`.
    Eq(String, String),
    True,
    False,
}

impl FoAtom {
    fn rename(&self, from: &str, to: &str) -> FoAtom {
        let r = |v: &String| {
            if v == from {
                to.to_string()
            } else {
                v.clone()
            }
        };
        match self {
            FoAtom::Rel(a, b) => FoAtom::Rel(r(a), r(b)),
            FoAtom::Eq(a, b) => {
                let (a, b) = (r(a), r(b));
                if a <= b {
                    FoAtom::Eq(a, b)
                } else {
                    FoAtom::Eq(b, a)
                }
            }
            c => c.clone(),
        }
    }

    fn vars(&self) -> Vec<&str> {
        match self {
            FoAtom::Rel(a, b) | FoAtom::Eq(a, b) => vec![a, b],
            _ => vec![],
        }
    }
}

impl fmt::Display for FoAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoAtom::Rel(a, b) => write!(f, "{a} R {b}"),
            FoAtom::Eq(a, b) => write!(f, "{a} = {b}"),
            FoAtom::True => f.write_str("true"),
            FoAtom::False => f.write_str("false"),
        }
    }
}

/// One existentially quantified conjunction on the right-hand side of a
/// geometric axiom: `exists vars. (atom & ... & atom)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    pub vars: Vec<String>,
    pub atoms: Vec<FoAtom>,
}

impl fmt::Display for Disjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.vars.is_empty() {
            write!(f, "exists {}. ", self.vars.join(" "))?;
        }
        match self.atoms.len() {
            0 => f.write_str("true"),
            1 => write!(f, "{}", self.atoms[0]),
            _ => {
                let body: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
                write!(f, "({})", body.join(" & "))
            }
        }
    }
}

/// A geometric frame condition:
/// `forall u1..uk. (A1 & ... & An) -> D1 | ... | Dm`,
/// where each `Di` is an existentially quantified conjunction of atoms, or
/// the degenerate condition `true`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometricAxiom {
    Top,
    Implication {
        universals: Vec<String>,
        antecedent: Vec<FoAtom>,
        disjuncts: Vec<Disjunct>,
    },
}

impl fmt::Display for GeometricAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometricAxiom::Top => f.write_str("true"),
            GeometricAxiom::Implication {
                universals,
                antecedent,
                disjuncts,
            } => {
                if !universals.is_empty() {
                    write!(f, "forall {}. ", universals.join(" "))?;
                }
                if !antecedent.is_empty() {
                    let ant: Vec<String> = antecedent.iter().map(|a| a.to_string()).collect();
                    write!(f, "({}) -> ", ant.join(" & "))?;
                }
                let ds: Vec<String> = disjuncts.iter().map(|d| d.to_string()).collect();
                f.write_str(&ds.join(" | "))
            }
        }
    }
}

impl GeometricAxiom {
    /// The axiom as a closed formula of the general first-order language.
    pub fn to_fo(&self) -> FoFormula {
        match self {
            GeometricAxiom::Top => FoFormula::Atom(FoAtom::True),
            GeometricAxiom::Implication {
                universals,
                antecedent,
                disjuncts,
            } => {
                let consequent = or_chain(
                    disjuncts
                        .iter()
                        .map(|d| {
                            let body = and_chain(
                                d.atoms.iter().map(|a| FoFormula::Atom(a.clone())).collect(),
                            );
                            if d.vars.is_empty() {
                                body
                            } else {
                                FoFormula::Exists(d.vars.clone(), Box::new(body))
                            }
                        })
                        .collect(),
                );
                let body = if antecedent.is_empty() {
                    consequent
                } else {
                    let ant = and_chain(
                        antecedent
                            .iter()
                            .map(|a| FoFormula::Atom(a.clone()))
                            .collect(),
                    );
                    FoFormula::Imp(Box::new(ant), Box::new(consequent))
                };
                if universals.is_empty() {
                    body
                } else {
                    FoFormula::Forall(universals.clone(), Box::new(body))
                }
            }
        }
    }
}

fn and_chain(mut fs: Vec<FoFormula>) -> FoFormula {
    match fs.len() {
        0 => FoFormula::Atom(FoAtom::True),
        1 => fs.pop().unwrap(),
        _ => {
            let last = fs.pop().unwrap();
            FoFormula::And(Box::new(and_chain(fs)), Box::new(last))
        }
    }
}

fn or_chain(mut fs: Vec<FoFormula>) -> FoFormula {
    match fs.len() {
        0 => FoFormula::Atom(FoAtom::False),
        1 => fs.pop().unwrap(),
        _ => {
            let last = fs.pop().unwrap();
            FoFormula::Or(Box::new(or_chain(fs)), Box::new(last))
        }
    }
}

/// A formula of first-order logic with one binary relation and equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoFormula {
    Atom(FoAtom),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Imp(Box<FoFormula>, Box<FoFormula>),
    Forall(Vec<String>, Box<FoFormula>),
    Exists(Vec<String>, Box<FoFormula>),
}

impl FoFormula {
    /// Variables that occur free in the formula.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &FoFormula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                FoFormula::Atom(a) => {
                    for v in a.vars() {
                        if !bound.iter().any(|b| b == v) {
                            out.insert(v.to_string());
                        }
                    }
                }
                FoFormula::Not(b) => go(b, bound, out),
                FoFormula::And(l, r) | FoFormula::Or(l, r) | FoFormula::Imp(l, r) => {
                    go(l, bound, out);
                    go(r, bound, out);
                }
                FoFormula::Forall(vs, b) | FoFormula::Exists(vs, b) => {
                    let n = bound.len();
                    bound.extend(vs.iter().cloned());
                    go(b, bound, out);
                    bound.truncate(n);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

const FO_PREC_IMP: u8 = 1;
const FO_PREC_OR: u8 = 2;
const FO_PREC_AND: u8 = 3;
const FO_PREC_UNARY: u8 = 4;

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl FoFormula {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = match self {
            FoFormula::Atom(_) => u8::MAX,
            FoFormula::Not(_) => FO_PREC_UNARY,
            FoFormula::And(_, _) => FO_PREC_AND,
            FoFormula::Or(_, _) => FO_PREC_OR,
            FoFormula::Imp(_, _) => FO_PREC_IMP,
            // A quantifier body extends as far right as possible.
            FoFormula::Forall(_, _) | FoFormula::Exists(_, _) => 0,
        };
        let parens = prec < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            FoFormula::Atom(a) => write!(f, "{a}")?,
            FoFormula::Not(b) => {
                f.write_str("~")?;
                b.fmt_prec(f, FO_PREC_UNARY)?;
            }
            FoFormula::And(l, r) => {
                l.fmt_prec(f, FO_PREC_AND)?;
                f.write_str(" & ")?;
                r.fmt_prec(f, FO_PREC_AND + 1)?;
            }
            FoFormula::Or(l, r) => {
                l.fmt_prec(f, FO_PREC_OR)?;
                f.write_str(" | ")?;
                r.fmt_prec(f, FO_PREC_OR + 1)?;
            }
            FoFormula::Imp(l, r) => {
                // Compound antecedents are always parenthesised; the
                // consequent extends as far right as possible.
                l.fmt_prec(f, FO_PREC_UNARY)?;
                f.write_str(" -> ")?;
                r.fmt_prec(f, 0)?;
            }
            FoFormula::Forall(vs, b) => {
                write!(f, "forall {}. ", vs.join(" "))?;
                b.fmt_prec(f, 0)?;
            }
            FoFormula::Exists(vs, b) => {
                write!(f, "exists {}. ", vs.join(" "))?;
                // An unparenthesised `exists` body is a single atom, so
                // anything wider must be grouped explicitly.
                if matches!(
                    **b,
                    FoFormula::And(_, _)
                        | FoFormula::Or(_, _)
                        | FoFormula::Imp(_, _)
                        | FoFormula::Forall(_, _)
                ) {
                    f.write_str("(")?;
                    b.fmt_prec(f, 0)?;
                    f.write_str(")")?;
                } else {
                    b.fmt_prec(f, 0)?;
                }
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum FoTok {
    Var(String),
    Forall,
    Exists,
    True,
    False,
    RelOp,
    EqOp,
    Not,
    And,
    Or,
    Imp,
    Dot,
    LParen,
    RParen,
    Eof,
}

impl FoTok {
    fn describe(&self) -> String {
        match self {
            FoTok::Var(v) => format!("variable `{v}`"),
            FoTok::Forall => "`forall`".into(),
            FoTok::Exists => "`exists`".into(),
            FoTok::True => "`true`".into(),
            FoTok::False => "`false`".into(),
            FoTok::RelOp => "`R`".into(),
            FoTok::EqOp => "`=`".into(),
            FoTok::Not => "`~`".into(),
            FoTok::And => "`&`".into(),
            FoTok::Or => "`|`".into(),
            FoTok::Imp => "`->`".into(),
            FoTok::Dot => "`.`".into(),
            FoTok::LParen => "`(`".into(),
            FoTok::RParen => "`)`".into(),
            FoTok::Eof => "end of input".into(),
        }
    }
}

fn fo_lex(text: &str) -> Result<Vec<(FoTok, usize)>, SyntaxError> {
    let mut toks = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let (tok, len) = if rest.starts_with("->") {
            (FoTok::Imp, 2)
        } else {
            match c {
                '(' => (FoTok::LParen, 1),
                ')' => (FoTok::RParen, 1),
                '&' => (FoTok::And, 1),
                '|' => (FoTok::Or, 1),
                '~' => (FoTok::Not, 1),
                '.' => (FoTok::Dot, 1),
                '=' => (FoTok::EqOp, 1),
                'R' => (FoTok::RelOp, 1),
                '∀' => (FoTok::Forall, c.len_utf8()),
                '∃' => (FoTok::Exists, c.len_utf8()),
                '∧' => (FoTok::And, c.len_utf8()),
                '∨' => (FoTok::Or, c.len_utf8()),
                '→' => (FoTok::Imp, c.len_utf8()),
                '¬' => (FoTok::Not, c.len_utf8()),
                '⊤' => (FoTok::True, c.len_utf8()),
                '⊥' => (FoTok::False, c.len_utf8()),
                'a'..='z' => {
                    let end = rest
                        .find(|ch: char| !(ch.is_ascii_lowercase() || ch.is_ascii_digit() || ch == '_'))
                        .unwrap_or(rest.len());
                    let word = &rest[..end];
                    let tok = match word {
                        "forall" => FoTok::Forall,
                        "exists" => FoTok::Exists,
                        "true" => FoTok::True,
                        "false" => FoTok::False,
                        _ => FoTok::Var(word.to_string()),
                    };
                    (tok, end)
                }
                _ => {
                    let expected = if c.is_ascii_uppercase() {
                        "`R` (the only relation symbol)".into()
                    } else {
                        "a first-order token".into()
                    };
                    return Err(SyntaxError {
                        offset: i,
                        expected,
                        found: format!("`{c}`"),
                    });
                }
            }
        };
        toks.push((tok, i));
        i += len;
    }
    toks.push((FoTok::Eof, text.len()));
    Ok(toks)
}

struct FoParser {
    toks: Vec<(FoTok, usize)>,
    pos: usize,
}

impl FoParser {
    fn peek(&self) -> &FoTok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> FoTok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn err(&self, expected: &str) -> SyntaxError {
        SyntaxError {
            offset: self.toks[self.pos].1,
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn var_list(&mut self) -> Result<Vec<String>, SyntaxError> {
        let mut vars = Vec::new();
        while let FoTok::Var(v) = self.peek().clone() {
            self.bump();
            vars.push(v);
        }
        if vars.is_empty() {
            return Err(self.err("a variable"));
        }
        if *self.peek() != FoTok::Dot {
            return Err(self.err("`.`"));
        }
        self.bump();
        Ok(vars)
    }

    fn fo(&mut self) -> Result<FoFormula, SyntaxError> {
        if *self.peek() == FoTok::Forall {
            self.bump();
            let vars = self.var_list()?;
            Ok(FoFormula::Forall(vars, Box::new(self.fo()?)))
        } else {
            self.imp()
        }
    }

    fn imp(&mut self) -> Result<FoFormula, SyntaxError> {
        let lhs = self.disj()?;
        if *self.peek() == FoTok::Imp {
            self.bump();
            Ok(FoFormula::Imp(Box::new(lhs), Box::new(self.fo()?)))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<FoFormula, SyntaxError> {
        let mut lhs = self.conj()?;
        while *self.peek() == FoTok::Or {
            self.bump();
            let rhs = self.conj()?;
            lhs = FoFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<FoFormula, SyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == FoTok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = FoFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<FoFormula, SyntaxError> {
        match self.peek().clone() {
            FoTok::Not => {
                self.bump();
                Ok(FoFormula::Not(Box::new(self.unary()?)))
            }
            FoTok::Exists => {
                self.bump();
                let vars = self.var_list()?;
                Ok(FoFormula::Exists(vars, Box::new(self.unary()?)))
            }
            FoTok::LParen => {
                self.bump();
                let f = self.fo()?;
                if *self.peek() != FoTok::RParen {
                    return Err(self.err("`)`"));
                }
                self.bump();
                Ok(f)
            }
            FoTok::True => {
                self.bump();
                Ok(FoFormula::Atom(FoAtom::True))
            }
            FoTok::False => {
                self.bump();
                Ok(FoFormula::Atom(FoAtom::False))
            }
            FoTok::Var(a) => {
                self.bump();
                match self.bump() {
                    FoTok::RelOp => match self.bump() {
                        FoTok::Var(b) => Ok(FoFormula::Atom(FoAtom::Rel(a, b))),
                        _ => {
                            self.pos -= 1;
                            Err(self.err("a variable after `R`"))
                        }
                    },
                    FoTok::EqOp => match self.bump() {
                        FoTok::Var(b) => Ok(FoFormula::Atom(FoAtom::Eq(a, b))),
                        _ => {
                            self.pos -= 1;
                            Err(self.err("a variable after `=`"))
                        }
                    },
                    _ => {
                        self.pos -= 1;
                        Err(self.err("`R` or `=`"))
                    }
                }
            }
            _ => Err(self.err("a first-order formula")),
        }
    }
}

/// Parse a first-order formula from the concrete grammar.
pub fn parse_fo(text: &str) -> Result<FoFormula, SyntaxError> {
    let mut p = FoParser {
        toks: fo_lex(text)?,
        pos: 0,
    };
    let f = p.fo()?;
    if *p.peek() == FoTok::Eof {
        Ok(f)
    } else {
        Err(p.err("end of input"))
    }
}

// ---------------------------------------------------------------------------
// Geometric shape recognition
// ---------------------------------------------------------------------------

/// Why a first-order formula is not a geometric implication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotGeometric(pub String);

impl fmt::Display for NotGeometric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a geometric implication: {}", self.0)
    }
}

impl std::error::Error for NotGeometric {}

fn flatten_conj(f: &FoFormula, out: &mut Vec<FoAtom>) -> Result<(), NotGeometric> {
    match f {
        FoFormula::Atom(a) => {
            out.push(a.clone());
            Ok(())
        }
        FoFormula::And(l, r) => {
            flatten_conj(l, out)?;
            flatten_conj(r, out)
        }
        other => Err(NotGeometric(format!(
            "expected a conjunction of atoms, found `{other}`"
        ))),
    }
}

fn flatten_disj<'a>(f: &'a FoFormula, out: &mut Vec<&'a FoFormula>) {
    match f {
        FoFormula::Or(l, r) => {
            flatten_disj(l, out);
            flatten_disj(r, out);
        }
        other => out.push(other),
    }
}

/// Check that a closed first-order formula has the shape of a geometric
/// implication — `forall xs. (conj of atoms) -> disjunction of existentially
/// quantified conjunctions of atoms` — and return it in structured form.
pub fn validate_geometric(f: &FoFormula) -> Result<GeometricAxiom, NotGeometric> {
    if let FoFormula::Atom(FoAtom::True) = f {
        return Ok(GeometricAxiom::Top);
    }
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(NotGeometric(format!(
            "free variables: {}",
            free.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    let (universals, body) = match f {
        FoFormula::Forall(vs, b) => (vs.clone(), &**b),
        other => (Vec::new(), other),
    };
    let (antecedent, consequent) = match body {
        FoFormula::Imp(l, r) => {
            let mut ant = Vec::new();
            flatten_conj(l, &mut ant)?;
            (ant, &**r)
        }
        other => (Vec::new(), other),
    };
    let mut parts = Vec::new();
    flatten_disj(consequent, &mut parts);
    let mut disjuncts = Vec::new();
    for part in parts {
        let (vars, body) = match part {
            FoFormula::Exists(vs, b) => (vs.clone(), &**b),
            other => (Vec::new(), other),
        };
        let mut atoms = Vec::new();
        flatten_conj(body, &mut atoms)?;
        disjuncts.push(Disjunct { vars, atoms });
    }
    Ok(GeometricAxiom::Implication {
        universals,
        antecedent,
        disjuncts,
    })
}

// ---------------------------------------------------------------------------
// Reading an axiom off a rule, and simplification
// ---------------------------------------------------------------------------

fn rel_to_fo(r: &RelAtom) -> FoAtom {
    match r {
        RelAtom::R(a, b) => FoAtom::Rel(a.clone(), b.clone()),
        RelAtom::Eq(a, b) => FoAtom::Eq(a.clone(), b.clone()),
    }
}

/// The frame condition expressed by a geometric rule: the conclusion's
/// relational pattern implies, for some premise, the existence of that
/// premise's fresh labels satisfying its extra relational atoms. A premise
/// that carries a constant marker (`_:false` on the left or `_:true` on the
/// right) is trivially derivable and contributes `false` as its disjunct.
pub fn read_off_axiom(rule: &GeometricRule) -> GeometricAxiom {
    let antecedent: Vec<FoAtom> = rule.conclusion_rel.iter().map(rel_to_fo).collect();
    let disjuncts: Vec<Disjunct> = rule
        .premises
        .iter()
        .map(|p| {
            if !p.bot_markers.is_empty() || !p.top_markers.is_empty() {
                Disjunct {
                    vars: Vec::new(),
                    atoms: vec![FoAtom::False],
                }
            } else {
                Disjunct {
                    vars: p.eigen.clone(),
                    atoms: p.extra_rel.iter().map(rel_to_fo).collect(),
                }
            }
        })
        .collect();
    GeometricAxiom::Implication {
        universals: rule.universals.clone(),
        antecedent,
        disjuncts,
    }
}

/// Simplify a geometric axiom: eliminate equations binding existential
/// variables, drop trivial and duplicate atoms, drop unsatisfiable disjuncts,
/// and collapse the axiom to `true` when some disjunct is implied by the
/// antecedent alone. The result is checked against the input by exhaustive
/// frame search up to `max_n` worlds; if the check fails the input is
/// returned unchanged.
pub fn simplify_axiom(axiom: &GeometricAxiom, max_n: u8) -> GeometricAxiom {
    let GeometricAxiom::Implication {
        universals,
        antecedent,
        disjuncts,
    } = axiom
    else {
        return GeometricAxiom::Top;
    };

    let ant_set: BTreeSet<FoAtom> = antecedent.iter().cloned().collect();
    let mut kept: Vec<Disjunct> = Vec::new();
    let mut trivially_true = false;

    for d in disjuncts {
        let mut vars = d.vars.clone();
        let mut atoms = d.atoms.clone();

        // Use equations to eliminate existential variables, preferring to
        // rewrite the later-bound variable so earlier names survive.
        loop {
            let mut step = None;
            for a in &atoms {
                if let FoAtom::Eq(u, v) = a {
                    if u == v {
                        continue;
                    }
                    let iu = vars.iter().position(|x| x == u);
                    let iv = vars.iter().position(|x| x == v);
                    step = match (iu, iv) {
                        (Some(a_), Some(b_)) if b_ >= a_ => Some((v.clone(), u.clone())),
                        (Some(_), Some(_)) => Some((u.clone(), v.clone())),
                        (Some(_), None) => Some((u.clone(), v.clone())),
                        (None, Some(_)) => Some((v.clone(), u.clone())),
                        (None, None) => None,
                    };
                    if step.is_some() {
                        break;
                    }
                }
            }
            let Some((from, to)) = step else { break };
            vars.retain(|x| *x != from);
            atoms = atoms.iter().map(|a| a.rename(&from, &to)).collect();
        }

        // Tidy the atom list.
        atoms.retain(|a| !matches!(a, FoAtom::True));
        atoms.retain(|a| !matches!(a, FoAtom::Eq(u, v) if u == v));
        let mut seen = BTreeSet::new();
        atoms.retain(|a| seen.insert(a.clone()));
        if atoms.iter().any(|a| matches!(a, FoAtom::False)) {
            continue;
        }
        // Drop binders that no longer bind anything.
        vars.retain(|v| atoms.iter().any(|a| a.vars().contains(&v.as_str())));

        if vars.is_empty() && atoms.iter().all(|a| ant_set.contains(a)) {
            trivially_true = true;
            break;
        }
        let d = Disjunct { vars, atoms };
        if !kept.contains(&d) {
            kept.push(d);
        }
    }

    let candidate = if trivially_true {
        GeometricAxiom::Top
    } else {
        if kept.is_empty() {
            kept.push(Disjunct {
                vars: Vec::new(),
                atoms: vec![FoAtom::False],
            });
        }
        GeometricAxiom::Implication {
            universals: universals.clone(),
            antecedent: antecedent.clone(),
            disjuncts: kept,
        }
    };

    match semantics::fo_equivalent(&axiom.to_fo(), &candidate.to_fo(), max_n) {
        Ok(semantics::Correspondence::Holds { .. }) => candidate,
        _ => axiom.clone(),
    }
}
