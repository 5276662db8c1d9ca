//! Text and LaTeX rendering of derivations, rules, and frame conditions.

use super::{Colour, GeometricRule, Label, LabelledFormula, ProofTree, RuleTag, Sequent};
use crate::fo::{Disjunct, FoAtom, GeometricAxiom};
use crate::formula::Formula;
use std::fmt::Write;

const RED: &str = "\x1b[31m";
const BLUE: &str = "\x1b[34m";
const RESET: &str = "\x1b[0m";

fn paint(f: &LabelledFormula, colour: bool) -> String {
    if !colour {
        return f.to_string();
    }
    match f.colour {
        Colour::Red => format!("{RED}{f}{RESET}"),
        Colour::Blue => format!("{BLUE}{f}{RESET}"),
        Colour::Plain => f.to_string(),
    }
}

fn seq_string(seq: &Sequent, colour: bool) -> String {
    let mut out = String::new();
    if !seq.rel.is_empty() {
        let rels: Vec<String> = seq.rel.iter().map(|a| a.to_string()).collect();
        out.push_str(&rels.join(", "));
        out.push_str("; ");
    }
    let left: Vec<String> = seq.left.iter().map(|x| paint(x, colour)).collect();
    let right: Vec<String> = seq.right.iter().map(|x| paint(x, colour)).collect();
    if !left.is_empty() {
        out.push_str(&left.join(", "));
        out.push(' ');
    }
    out.push_str("|-");
    if !right.is_empty() {
        out.push(' ');
        out.push_str(&right.join(", "));
    }
    out
}

/// Render a derivation with the root first and each premise indented one
/// step below its conclusion; every line shows the sequent and the rule that
/// justifies it. With `colour` set, formula provenance colours are shown
/// using ANSI escapes.
pub fn render_text(tree: &ProofTree, colour: bool) -> String {
    let mut out = String::new();
    render_text_at(tree, 0, colour, &mut out);
    out
}

fn render_text_at(t: &ProofTree, depth: usize, colour: bool, out: &mut String) {
    let _ = writeln!(
        out,
        "{}{}   [{}]",
        "  ".repeat(depth),
        seq_string(&t.conclusion, colour),
        t.tag.name()
    );
    for p in &t.premises {
        render_text_at(p, depth + 1, colour, out);
    }
}

// ---------------------------------------------------------------------------
// LaTeX
// ---------------------------------------------------------------------------

/// Subscript trailing digits: `x12` becomes `x_{12}`.
fn latex_name(name: &str) -> String {
    let head_len = name
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_digit())
        .last()
        .map(|(i, _)| i)
        .unwrap_or(name.len());
    let (head, digits) = name.split_at(head_len);
    let head = if head.chars().count() > 1 {
        format!("\\mathit{{{head}}}")
    } else {
        head.to_string()
    };
    if digits.is_empty() {
        head
    } else {
        format!("{head}_{{{digits}}}")
    }
}

const L_UNARY: u8 = 4;
const L_AND: u8 = 3;
const L_OR: u8 = 2;
const L_IMP: u8 = 1;

fn latex_formula_prec(f: &Formula, prec: u8) -> String {
    let (s, my) = match f {
        Formula::Atom(name) => (latex_name(name), L_UNARY),
        Formula::Bot => ("\\bot".to_string(), L_UNARY),
        Formula::Top => ("\\top".to_string(), L_UNARY),
        Formula::Not(a) => (format!("\\lnot {}", latex_formula_prec(a, L_UNARY)), L_UNARY),
        Formula::Box(a) => (format!("\\Box {}", latex_formula_prec(a, L_UNARY)), L_UNARY),
        Formula::Dia(a) => (
            format!("\\Diamond {}", latex_formula_prec(a, L_UNARY)),
            L_UNARY,
        ),
        Formula::And(a, b) => (
            format!(
                "{} \\land {}",
                latex_formula_prec(a, L_AND + 1),
                latex_formula_prec(b, L_AND)
            ),
            L_AND,
        ),
        Formula::Or(a, b) => (
            format!(
                "{} \\lor {}",
                latex_formula_prec(a, L_OR + 1),
                latex_formula_prec(b, L_OR)
            ),
            L_OR,
        ),
        Formula::Imp(a, b) => (
            format!(
                "{} \\to {}",
                latex_formula_prec(a, L_IMP + 1),
                latex_formula_prec(b, L_IMP)
            ),
            L_IMP,
        ),
    };
    if my < prec {
        format!("({s})")
    } else {
        s
    }
}

/// A formula in LaTeX math syntax (no surrounding delimiters).
pub fn latex_formula(f: &Formula) -> String {
    latex_formula_prec(f, 0)
}

fn latex_rel(a: &super::RelAtom) -> String {
    match a {
        super::RelAtom::R(x, y) => format!("{} R {}", latex_name(x), latex_name(y)),
        super::RelAtom::Eq(x, y) => format!("{} = {}", latex_name(x), latex_name(y)),
    }
}

fn latex_sequent(seq: &Sequent) -> String {
    let mut parts: Vec<String> = seq.rel.iter().map(latex_rel).collect();
    parts.extend(
        seq.left
            .iter()
            .map(|f| format!("{}{{:}}{}", latex_name(&f.label), latex_formula(&f.formula))),
    );
    let right: Vec<String> = seq
        .right
        .iter()
        .map(|f| format!("{}{{:}}{}", latex_name(&f.label), latex_formula(&f.formula)))
        .collect();
    format!("{} \\vdash {}", parts.join(", "), right.join(", "))
}

fn latex_tag(tag: &RuleTag) -> String {
    match tag {
        RuleTag::Id => "\\mathrm{Id}".into(),
        RuleTag::BotL => "\\bot_L".into(),
        RuleTag::TopR => "\\top_R".into(),
        RuleTag::EqId => "\\mathrm{Repl{+}Id}".into(),
        RuleTag::AndL => "{\\land}_L".into(),
        RuleTag::AndR { .. } => "{\\land}_R".into(),
        RuleTag::OrL { .. } => "{\\lor}_L".into(),
        RuleTag::OrR => "{\\lor}_R".into(),
        RuleTag::ImpL { .. } => "{\\to}_L".into(),
        RuleTag::ImpR => "{\\to}_R".into(),
        RuleTag::NegL => "{\\lnot}_L".into(),
        RuleTag::NegR => "{\\lnot}_R".into(),
        RuleTag::BoxL { .. } => "\\Box_L".into(),
        RuleTag::BoxR => "\\Box_R".into(),
        RuleTag::DiaL => "\\Diamond_L".into(),
        RuleTag::DiaR { .. } => "\\Diamond_R".into(),
        RuleTag::EqRefl => "\\mathrm{Eq{-}Refl}".into(),
        RuleTag::EqTrans => "\\mathrm{Eq{-}Trans}".into(),
        RuleTag::ReplRel1 => "\\mathrm{Repl}_{R1}".into(),
        RuleTag::ReplRel2 => "\\mathrm{Repl}_{R2}".into(),
        RuleTag::ReplForm => "\\mathrm{Repl}".into(),
        RuleTag::Cut => "\\mathrm{Cut}".into(),
        RuleTag::Geometric(name) => format!("\\mathrm{{{name}}}"),
    }
}

/// Render a derivation as a `bussproofs` proof tree. Inferences with more
/// than five premises are flattened into consecutive reductions of the same
/// conclusion, which `bussproofs`' stack discipline displays as a single
/// wide inference split over levels.
pub fn render_latex(tree: &ProofTree) -> String {
    let mut out = String::from("\\begin{prooftree}\n");
    emit_latex(tree, &mut out);
    out.push_str("\\end{prooftree}\n");
    out
}

fn emit_latex(t: &ProofTree, out: &mut String) {
    let concl = latex_sequent(&t.conclusion);
    let label = format!("\\RightLabel{{\\(\\scriptsize {}\\)}}\n", latex_tag(&t.tag));
    if t.premises.is_empty() {
        out.push_str("\\AxiomC{}\n");
        out.push_str(&label);
        let _ = writeln!(out, "\\UnaryInfC{{\\({concl}\\)}}");
        return;
    }
    for p in &t.premises {
        emit_latex(p, out);
    }
    let mut pending = t.premises.len();
    while pending > 5 {
        let _ = writeln!(out, "\\QuinaryInfC{{\\({concl}\\)}}");
        pending -= 4;
    }
    let macro_name = match pending {
        1 => "UnaryInfC",
        2 => "BinaryInfC",
        3 => "TrinaryInfC",
        4 => "QuaternaryInfC",
        _ => "QuinaryInfC",
    };
    out.push_str(&label);
    let _ = writeln!(out, "\\{macro_name}{{\\({concl}\\)}}");
}

/// Render a geometric rule scheme as a `bussproofs` inference over schematic
/// contexts.
pub fn rule_latex(rule: &GeometricRule) -> String {
    let ctx = |rels: Vec<String>, bots: &[Label], tops: &[Label]| -> String {
        let mut left = rels;
        left.extend(bots.iter().map(|l| format!("{}{{:}}\\bot", latex_name(l))));
        left.push("\\Gamma".into());
        let mut right: Vec<String> = tops
            .iter()
            .map(|l| format!("{}{{:}}\\top", latex_name(l)))
            .collect();
        right.push("\\Delta".into());
        format!("{} \\vdash {}", left.join(", "), right.join(", "))
    };
    let mut out = String::from("\\begin{prooftree}\n");
    for p in &rule.premises {
        let mut rels: Vec<String> = rule.conclusion_rel.iter().map(latex_rel).collect();
        rels.extend(p.extra_rel.iter().map(latex_rel));
        let _ = writeln!(
            out,
            "\\AxiomC{{\\({}\\)}}",
            ctx(rels, &p.bot_markers, &p.top_markers)
        );
    }
    let concl = ctx(
        rule.conclusion_rel.iter().map(latex_rel).collect(),
        &[],
        &[],
    );
    let mut pending = rule.premises.len().max(1);
    if rule.premises.is_empty() {
        out.push_str("\\AxiomC{}\n");
    }
    while pending > 5 {
        let _ = writeln!(out, "\\QuinaryInfC{{\\({concl}\\)}}");
        pending -= 4;
    }
    let macro_name = match pending {
        1 => "UnaryInfC",
        2 => "BinaryInfC",
        3 => "TrinaryInfC",
        4 => "QuaternaryInfC",
        _ => "QuinaryInfC",
    };
    let _ = writeln!(
        out,
        "\\RightLabel{{\\(\\scriptsize \\mathrm{{{}}}\\)}}",
        rule.name
    );
    let _ = writeln!(out, "\\{macro_name}{{\\({concl}\\)}}");
    out.push_str("\\end{prooftree}\n");
    out
}

fn latex_fo_atom(a: &FoAtom) -> String {
    match a {
        FoAtom::Rel(x, y) => format!("{} R {}", latex_name(x), latex_name(y)),
        FoAtom::Eq(x, y) => format!("{} = {}", latex_name(x), latex_name(y)),
        FoAtom::True => "\\top".into(),
        FoAtom::False => "\\bot".into(),
    }
}

fn latex_disjunct(d: &Disjunct) -> String {
    let body: Vec<String> = d.atoms.iter().map(latex_fo_atom).collect();
    let body = if body.is_empty() {
        "\\top".to_string()
    } else {
        body.join(" \\land ")
    };
    if d.vars.is_empty() {
        body
    } else {
        let qs: Vec<String> = d
            .vars
            .iter()
            .map(|v| format!("\\exists {}", latex_name(v)))
            .collect();
        format!("{}\\,({})", qs.join(""), body)
    }
}

/// Render a frame condition in LaTeX math syntax.
pub fn axiom_latex(ax: &GeometricAxiom) -> String {
    match ax {
        GeometricAxiom::Top => "\\top".into(),
        GeometricAxiom::Implication {
            universals,
            antecedent,
            disjuncts,
        } => {
            let qs: Vec<String> = universals
                .iter()
                .map(|v| format!("\\forall {}", latex_name(v)))
                .collect();
            let body: Vec<String> = disjuncts.iter().map(latex_disjunct).collect();
            let body = body.join(" \\lor ");
            if antecedent.is_empty() {
                format!("{}\\,[{}]", qs.join(""), body)
            } else {
                let ant: Vec<String> = antecedent.iter().map(latex_fo_atom).collect();
                format!(
                    "{}\\,[{} \\to {}]",
                    qs.join(""),
                    ant.join(" \\land "),
                    body
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{ProofTree, RelAtom, RuleTag};
    use super::*;

    fn lf(l: &str, s: &str) -> LabelledFormula {
        LabelledFormula::new(l, crate::formula::parse(s).unwrap(), Colour::Plain)
    }

    fn small_tree() -> ProofTree {
        ProofTree {
            conclusion: Sequent {
                rel: Default::default(),
                left: vec![],
                right: vec![lf("x", "p -> p")],
            },
            tag: RuleTag::ImpR,
            premises: vec![ProofTree::leaf(
                Sequent {
                    rel: Default::default(),
                    left: vec![lf("x", "p")],
                    right: vec![lf("x", "p")],
                },
                RuleTag::Id,
            )],
        }
    }

    #[test]
    fn text_rendering_indents_premises() {
        let text = render_text(&small_tree(), false);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "|- x:p -> p   [->_R]");
        assert_eq!(lines[1], "  x:p |- x:p   [Id]");
    }

    #[test]
    fn coloured_rendering_wraps_marked_formulas() {
        let mut tree = small_tree();
        tree.conclusion.right[0].colour = Colour::Blue;
        let text = render_text(&tree, true);
        assert!(text.contains("\x1b[34mx:p -> p\x1b[0m"));
        let plain = render_text(&tree, false);
        assert!(!plain.contains('\x1b'));
    }

    #[test]
    fn latex_rendering_uses_bussproofs() {
        let latex = render_latex(&small_tree());
        assert!(latex.starts_with("\\begin{prooftree}"));
        assert!(latex.contains("\\AxiomC{}"));
        assert!(latex.contains("\\UnaryInfC{\\(x{:}p \\vdash x{:}p\\)}"));
        assert!(latex.contains("{\\to}_R"));
        assert!(latex.trim_end().ends_with("\\end{prooftree}"));
    }

    #[test]
    fn latex_formulas_subscript_numbered_atoms() {
        let f = crate::formula::parse("box p1 -> dia p2").unwrap();
        assert_eq!(
            latex_formula(&f),
            "\\Box p_{1} \\to \\Diamond p_{2}"
        );
        let g = crate::formula::parse("~(p & (q | false))").unwrap();
        assert_eq!(latex_formula(&g), "\\lnot (p \\land (q \\lor \\bot))");
    }

    #[test]
    fn rule_latex_has_schematic_contexts() {
        let rule = GeometricRule {
            name: "Ser".into(),
            universals: vec!["x".into()],
            conclusion_rel: Default::default(),
            premises: vec![super::super::RulePremise {
                eigen: vec!["y".into()],
                extra_rel: [RelAtom::rel("x", "y")].into_iter().collect(),
                bot_markers: vec![],
                top_markers: vec![],
            }],
        };
        let latex = rule_latex(&rule);
        assert!(latex.contains("x R y, \\Gamma \\vdash \\Delta"));
        assert!(latex.contains("\\mathrm{Ser}"));
    }
}
