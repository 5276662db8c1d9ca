//! Modal formulas: syntax tree, parser, printer, negation normal form,
//! signed occurrences, and skeleton templates with placeholders.
//!
//! Concrete grammar (ASCII, with Unicode aliases in parentheses):
//!
//! ```text
//! formula := or ( "->" formula )?          right-associative   (→)
//! or      := and ( "|" or )?                                   (∨)
//! and     := unary ( "&" and )?                                (∧)
//! unary   := "~" unary | "box" unary | "dia" unary | primary   (¬ □ ◇, also [] <>)
//! primary := atom | "false" | "true" | "(" formula ")"         (⊥ ⊤)
//! atom    := [a-z][a-zA-Z0-9_]*            except the keywords above
//! ```
//!
//! Unary operators bind tightest, then `&`, then `|`, then `->`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// A classical modal formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Bot,
    Top,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
}

/// Convenience constructors, mostly for tests and internal rewriting.
impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }
    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }
    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Box::new(f))
    }
    pub fn dia(f: Formula) -> Formula {
        Formula::Dia(Box::new(f))
    }

    /// Child subformulas, in order (0 = left/only child, 1 = right child).
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Bot | Formula::Top => vec![],
            Formula::Not(b) | Formula::Box(b) | Formula::Dia(b) => vec![b],
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => vec![l, r],
        }
    }

    /// The subformula at a path of child indices; `None` if the path leaves
    /// the tree.
    pub fn at(&self, path: &[u8]) -> Option<&Formula> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i as usize)?;
        }
        Some(cur)
    }

    /// All atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    /// Negation normal form: `->` eliminated, `~` pushed down to atoms,
    /// double negations removed. The result uses only `&`, `|`, `box`, `dia`,
    /// literals, and the constants.
    pub fn to_nnf(&self) -> Formula {
        self.nnf(true)
    }

    fn nnf(&self, positive: bool) -> Formula {
        match (self, positive) {
            (Formula::Atom(p), true) => Formula::atom(p.clone()),
            (Formula::Atom(p), false) => Formula::not(Formula::atom(p.clone())),
            (Formula::Bot, true) | (Formula::Top, false) => Formula::Bot,
            (Formula::Top, true) | (Formula::Bot, false) => Formula::Top,
            (Formula::Not(b), _) => b.nnf(!positive),
            (Formula::And(l, r), true) | (Formula::Or(l, r), false) => {
                Formula::and(l.nnf(positive), r.nnf(positive))
            }
            (Formula::Or(l, r), true) | (Formula::And(l, r), false) => {
                Formula::or(l.nnf(positive), r.nnf(positive))
            }
            (Formula::Imp(l, r), true) => Formula::or(l.nnf(false), r.nnf(true)),
            (Formula::Imp(l, r), false) => Formula::and(l.nnf(true), r.nnf(false)),
            (Formula::Box(b), true) | (Formula::Dia(b), false) => Formula::boxed(b.nnf(positive)),
            (Formula::Dia(b), true) | (Formula::Box(b), false) => Formula::dia(b.nnf(positive)),
        }
    }

    /// True when the formula is already in negation normal form.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bot | Formula::Top => true,
            Formula::Not(b) => matches!(**b, Formula::Atom(_)),
            Formula::Imp(_, _) => false,
            Formula::And(l, r) | Formula::Or(l, r) => l.is_nnf() && r.is_nnf(),
            Formula::Box(b) | Formula::Dia(b) => b.is_nnf(),
        }
    }

    /// Every occurrence of the variable `v`, with its path and sign. The sign
    /// is positive iff the path crosses an even number of polarity-reversing
    /// edges (`~` bodies and left-hand sides of `->`).
    pub fn occurrences(&self, v: &str) -> Vec<Occurrence> {
        let mut out = Vec::new();
        self.occ_walk(&mut Vec::new(), true, &mut |path, var, positive| {
            if var == v {
                out.push(Occurrence {
                    path: path.to_vec(),
                    variable: var.to_string(),
                    positive,
                });
            }
        });
        out
    }

    /// Occurrences of every atom, in left-to-right order.
    pub fn atom_occurrences(&self) -> Vec<Occurrence> {
        let mut out = Vec::new();
        self.occ_walk(&mut Vec::new(), true, &mut |path, var, positive| {
            out.push(Occurrence {
                path: path.to_vec(),
                variable: var.to_string(),
                positive,
            });
        });
        out
    }

    fn occ_walk(
        &self,
        path: &mut Vec<u8>,
        positive: bool,
        visit: &mut impl FnMut(&[u8], &str, bool),
    ) {
        match self {
            Formula::Atom(p) => visit(path, p, positive),
            Formula::Bot | Formula::Top => {}
            Formula::Not(b) => {
                path.push(0);
                b.occ_walk(path, !positive, visit);
                path.pop();
            }
            Formula::Box(b) | Formula::Dia(b) => {
                path.push(0);
                b.occ_walk(path, positive, visit);
                path.pop();
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                path.push(0);
                l.occ_walk(path, positive, visit);
                path.pop();
                path.push(1);
                r.occ_walk(path, positive, visit);
                path.pop();
            }
            Formula::Imp(l, r) => {
                path.push(0);
                l.occ_walk(path, !positive, visit);
                path.pop();
                path.push(1);
                r.occ_walk(path, positive, visit);
                path.pop();
            }
        }
    }

    /// Sign summary per atom: `(has_positive, has_negative)`.
    pub fn atom_signs(&self) -> BTreeMap<String, (bool, bool)> {
        let mut out: BTreeMap<String, (bool, bool)> = BTreeMap::new();
        for occ in self.atom_occurrences() {
            let e = out.entry(occ.variable).or_insert((false, false));
            if occ.positive {
                e.0 = true;
            } else {
                e.1 = true;
            }
        }
        out
    }
}

/// One occurrence of a propositional variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    /// Child indices from the root to the atom node.
    pub path: Vec<u8>,
    pub variable: String,
    /// Positive iff the number of polarity-reversing edges on `path` is even.
    pub positive: bool,
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

// Binding strength; parenthesize a child whenever it binds looser than its
// context requires. All binary operators associate to the right.
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Formula {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = match self {
            Formula::Atom(_) | Formula::Bot | Formula::Top => u8::MAX,
            Formula::Not(_) | Formula::Box(_) | Formula::Dia(_) => PREC_UNARY,
            Formula::And(_, _) => PREC_AND,
            Formula::Or(_, _) => PREC_OR,
            Formula::Imp(_, _) => PREC_IMP,
        };
        let parens = prec < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Formula::Atom(p) => f.write_str(p)?,
            Formula::Bot => f.write_str("false")?,
            Formula::Top => f.write_str("true")?,
            Formula::Not(b) => {
                f.write_str("~")?;
                b.fmt_prec(f, PREC_UNARY)?;
            }
            Formula::Box(b) => {
                f.write_str("box ")?;
                b.fmt_prec(f, PREC_UNARY)?;
            }
            Formula::Dia(b) => {
                f.write_str("dia ")?;
                b.fmt_prec(f, PREC_UNARY)?;
            }
            Formula::And(l, r) => {
                l.fmt_prec(f, PREC_AND + 1)?;
                f.write_str(" & ")?;
                r.fmt_prec(f, PREC_AND)?;
            }
            Formula::Or(l, r) => {
                l.fmt_prec(f, PREC_OR + 1)?;
                f.write_str(" | ")?;
                r.fmt_prec(f, PREC_OR)?;
            }
            Formula::Imp(l, r) => {
                l.fmt_prec(f, PREC_IMP + 1)?;
                f.write_str(" -> ")?;
                r.fmt_prec(f, PREC_IMP)?;
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

/// A parse failure, with the byte offset of the offending token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at byte {}: expected {}, found {}",
            self.offset, self.expected, self.found
        )
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    False,
    True,
    Not,
    BoxOp,
    DiaOp,
    And,
    Or,
    Imp,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("atom `{s}`"),
            Tok::False => "`false`".into(),
            Tok::True => "`true`".into(),
            Tok::Not => "`~`".into(),
            Tok::BoxOp => "`box`".into(),
            Tok::DiaOp => "`dia`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let (tok, len) = if rest.starts_with("->") {
            (Tok::Imp, 2)
        } else if rest.starts_with("[]") {
            (Tok::BoxOp, 2)
        } else if rest.starts_with("<>") {
            (Tok::DiaOp, 2)
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '~' => (Tok::Not, 1),
                '¬' => (Tok::Not, c.len_utf8()),
                '□' => (Tok::BoxOp, c.len_utf8()),
                '◇' => (Tok::DiaOp, c.len_utf8()),
                '∧' => (Tok::And, c.len_utf8()),
                '∨' => (Tok::Or, c.len_utf8()),
                '→' => (Tok::Imp, c.len_utf8()),
                '⊥' => (Tok::False, c.len_utf8()),
                '⊤' => (Tok::True, c.len_utf8()),
                'a'..='z' => {
                    let end = rest
                        .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                        .unwrap_or(rest.len());
                    let word = &rest[..end];
                    let tok = match word {
                        "false" => Tok::False,
                        "true" => Tok::True,
                        "box" => Tok::BoxOp,
                        "dia" => Tok::DiaOp,
                        _ => Tok::Ident(word.to_string()),
                    };
                    (tok, end)
                }
                _ => {
                    return Err(SyntaxError {
                        offset: i,
                        expected: "a formula token".into(),
                        found: format!("`{c}`"),
                    })
                }
            }
        };
        toks.push((tok, i));
        i += len;
    }
    toks.push((Tok::Eof, text.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn err(&self, expected: &str) -> SyntaxError {
        SyntaxError {
            offset: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.imp()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.and()?;
        if *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.or()?;
            Ok(Formula::or(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::And {
            self.bump();
            let rhs = self.and()?;
            Ok(Formula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::BoxOp => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::DiaOp => {
                self.bump();
                Ok(Formula::dia(self.unary()?))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::LParen => {
                self.bump();
                let f = self.imp()?;
                if *self.peek() == Tok::RParen {
                    self.bump();
                    Ok(f)
                } else {
                    Err(self.err("`)`"))
                }
            }
            _ => Err(self.err("a formula")),
        }
    }
}

/// Parse a modal formula from the concrete grammar.
pub fn parse(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.imp()?;
    if *p.peek() == Tok::Eof {
        Ok(f)
    } else {
        Err(p.err("end of input"))
    }
}

impl FromStr for Formula {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// ---------------------------------------------------------------------------
// Skeleton templates
// ---------------------------------------------------------------------------

/// A formula skeleton over `|` and `box` with named placeholder slots, each
/// of which must be filled by exactly one formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Hole(String),
    Or(Box<Template>, Box<Template>),
    Box(Box<Template>),
}

/// Substitution failure: a placeholder had no assigned formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnassignedPlaceholder(pub String);

impl fmt::Display for UnassignedPlaceholder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "placeholder `{}` has no assigned formula", self.0)
    }
}

impl std::error::Error for UnassignedPlaceholder {}

impl Template {
    /// Replace every placeholder with its assigned formula.
    pub fn substitute(
        &self,
        assignment: &BTreeMap<String, Formula>,
    ) -> Result<Formula, UnassignedPlaceholder> {
        match self {
            Template::Hole(name) => assignment
                .get(name)
                .cloned()
                .ok_or_else(|| UnassignedPlaceholder(name.clone())),
            Template::Or(l, r) => Ok(Formula::or(
                l.substitute(assignment)?,
                r.substitute(assignment)?,
            )),
            Template::Box(b) => Ok(Formula::boxed(b.substitute(assignment)?)),
        }
    }

    /// Placeholder names in left-to-right occurrence order.
    pub fn holes(&self) -> Vec<String> {
        match self {
            Template::Hole(name) => vec![name.clone()],
            Template::Or(l, r) => {
                let mut v = l.holes();
                v.extend(r.holes());
                v
            }
            Template::Box(b) => b.holes(),
        }
    }

    fn to_display_formula(&self) -> Formula {
        match self {
            Template::Hole(name) => Formula::atom(name.clone()),
            Template::Or(l, r) => Formula::or(l.to_display_formula(), r.to_display_formula()),
            Template::Box(b) => Formula::boxed(b.to_display_formula()),
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_display_formula().fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn parses_modal_implication() {
        assert_eq!(
            p("dia box p -> box dia p"),
            Formula::imp(
                Formula::dia(Formula::boxed(Formula::atom("p"))),
                Formula::boxed(Formula::dia(Formula::atom("p")))
            )
        );
    }

    #[test]
    fn parses_bare_atom() {
        assert_eq!(p("p"), Formula::atom("p"));
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(
            p("p -> q -> r"),
            Formula::imp(
                Formula::atom("p"),
                Formula::imp(Formula::atom("q"), Formula::atom("r"))
            )
        );
    }

    #[test]
    fn unicode_aliases_accepted() {
        assert_eq!(p("◇□p→□◇p"), p("dia box p -> box dia p"));
        assert_eq!(p("¬(p∧⊥)∨⊤"), p("~(p & false) | true"));
        assert_eq!(p("[]p -> <>p"), p("box p -> dia p"));
    }

    #[test]
    fn precedence_and_over_or_over_imp() {
        assert_eq!(
            p("p & q | r -> s"),
            Formula::imp(
                Formula::or(
                    Formula::and(Formula::atom("p"), Formula::atom("q")),
                    Formula::atom("r")
                ),
                Formula::atom("s")
            )
        );
    }

    #[test]
    fn keywords_are_not_atoms_but_prefixed_words_are() {
        assert!(parse("box").is_err());
        assert_eq!(p("boxer"), Formula::atom("boxer"));
    }

    #[test]
    fn syntax_error_carries_offset() {
        let e = parse("p -> ").unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(e.expected.contains("formula"));
        let e = parse("p @ q").unwrap_err();
        assert_eq!(e.offset, 2);
    }

    #[test]
    fn printer_emits_minimal_parentheses() {
        assert_eq!(p("(p -> q) -> r").to_string(), "(p -> q) -> r");
        assert_eq!(p("p -> (q -> r)").to_string(), "p -> q -> r");
        assert_eq!(p("box (p -> q)").to_string(), "box (p -> q)");
        assert_eq!(p("~box p & dia ~q").to_string(), "~box p & dia ~q");
        assert_eq!(p("p & (q | r)").to_string(), "p & (q | r)");
        assert_eq!(p("(p & q) | r").to_string(), "p & q | r");
    }

    #[test]
    fn nnf_of_modal_implication() {
        // ◇p→□p becomes □¬p ∨ □p.
        assert_eq!(p("dia p -> box p").to_nnf(), p("box ~p | box p"));
        assert_eq!(p("~~p").to_nnf(), p("p"));
        assert_eq!(
            p("box (box p1 -> p2) | box (box p2 -> p1)").to_nnf(),
            p("box (dia ~p1 | p2) | box (dia ~p2 | p1)")
        );
    }

    #[test]
    fn nnf_is_idempotent_and_nnf_shaped() {
        for s in [
            "dia box p -> box dia p",
            "~(p & ~(q -> r))",
            "box dia p -> dia box p",
            "~true -> ~(p | ~q)",
        ] {
            let n = p(s).to_nnf();
            assert!(n.is_nnf(), "not NNF: {n}");
            assert_eq!(n.to_nnf(), n);
        }
    }

    #[test]
    fn occurrence_signs() {
        let f = p("box ~p | box p");
        let occ = f.occurrences("p");
        assert_eq!(occ.len(), 2);
        assert!(!occ[0].positive);
        assert_eq!(occ[0].path, vec![0, 0, 0]);
        assert!(occ[1].positive);

        assert!(p("dia p").occurrences("q").is_empty());

        let occ = p("box (p1 & ~p2)").occurrences("p2");
        assert_eq!(occ.len(), 1);
        assert!(!occ[0].positive);
    }

    #[test]
    fn signs_flip_under_negation() {
        let f = p("box (p -> q) -> (box p -> box q)");
        let neg = Formula::not(f.clone());
        let direct = f.atom_occurrences();
        let flipped = neg.atom_occurrences();
        assert_eq!(direct.len(), flipped.len());
        for (a, b) in direct.iter().zip(&flipped) {
            assert_eq!(a.variable, b.variable);
            assert_eq!(a.positive, !b.positive);
        }
    }

    #[test]
    fn template_substitution_rebuilds_formula() {
        // box x1 | box y1 with x1 := ~p, y1 := p.
        let t = Template::Or(
            Box::new(Template::Box(Box::new(Template::Hole("x1".into())))),
            Box::new(Template::Box(Box::new(Template::Hole("y1".into())))),
        );
        let mut asg = BTreeMap::new();
        asg.insert("x1".to_string(), p("~p"));
        asg.insert("y1".to_string(), p("p"));
        assert_eq!(t.substitute(&asg).unwrap(), p("box ~p | box p"));
        assert_eq!(t.to_string(), "box x1 | box y1");

        let id = Template::Hole("y1".into());
        let mut asg = BTreeMap::new();
        asg.insert("y1".to_string(), p("dia q"));
        assert_eq!(id.substitute(&asg).unwrap(), p("dia q"));

        let missing = Template::Hole("x9".into());
        assert_eq!(
            missing.substitute(&BTreeMap::new()).unwrap_err(),
            UnassignedPlaceholder("x9".into())
        );
    }

    #[test]
    fn roundtrip_on_fixed_corpus() {
        for s in [
            "p",
            "p -> q -> r",
            "box (p -> q) -> (box p -> box q)",
            "dia box p -> box dia p",
            "~(p & q) | (r & true)",
            "box ~p | box p",
            "dia (p & ~q & false)",
        ] {
            let f = p(s);
            assert_eq!(parse(&f.to_string()).unwrap(), f, "roundtrip of {s}");
        }
    }
}
