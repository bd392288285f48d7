use super::SyntaxKind;
use crate::core::{Chan, Sequent, Term};

pub fn print_sequent(s: &Sequent) -> String {
    s.to_string()
}

/// Prints a term on one line. Annotations present on the term (cut
/// formulas, nullary contexts) are printed; absent ones are omitted.
pub fn print_term(t: &Term, kind: SyntaxKind) -> String {
    let mut out = String::new();
    match kind {
        SyntaxKind::TermCalc => tc(t, &mut out),
        SyntaxKind::ProgLang => pl(t, &mut out),
    }
    out
}

fn join(cs: impl IntoIterator<Item = impl std::fmt::Display>) -> String {
    cs.into_iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

fn axiom(name: &str, ins: &[Chan], outs: &[Chan], out: &mut String) {
    out.push_str(name);
    out.push('(');
    out.push_str(&join(ins));
    if !outs.is_empty() {
        out.push_str("; ");
        out.push_str(&join(outs));
    }
    out.push(')');
}

fn tc(t: &Term, out: &mut String) {
    match t {
        Term::Id(a, b) => out.push_str(&format!("{a} == {b}")),
        Term::Axiom { name, ins, outs } => axiom(name, ins, outs, out),
        Term::Case { chan, branches, ctx } if branches.is_empty() => match ctx {
            Some(s) => out.push_str(&format!("{chan}{{ :: {s} }}")),
            None => out.push_str(&format!("{chan}{{}}")),
        },
        Term::Case { chan, branches, .. } => {
            out.push_str(&format!("{chan}{{ "));
            for (i, (tag, b)) in branches.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                out.push_str(&format!("{tag} => "));
                tc(b, out);
            }
            out.push_str(" }");
        }
        Term::Select { chan, tag, body } => {
            out.push_str(&format!("{chan}[{tag}]. "));
            tc(body, out);
        }
        Term::Split { chan, parts, body } => {
            out.push_str(&format!("{chan}<({}) => ", join(parts)));
            tc(body, out);
            out.push('>');
        }
        Term::Fork { chan, arms } if arms.is_empty() => out.push_str(&format!("{chan}<>")),
        Term::Fork { chan, arms } => {
            out.push_str(&format!("{chan}< "));
            for (i, a) in arms.iter().enumerate() {
                if i > 0 {
                    out.push_str(" ; ");
                }
                out.push_str(&format!("{} | {{{}}} => ", a.part, join(&a.owns)));
                tc(&a.body, out);
            }
            out.push_str(" >");
        }
        Term::Cut { chan, ty, left, right } => {
            match ty {
                Some(x) => out.push_str(&format!("cut {chan} : {x} (")),
                None => out.push_str(&format!("cut {chan} (")),
            }
            tc(left, out);
            out.push_str(", ");
            tc(right, out);
            out.push(')');
        }
    }
}

/// True when a trailing `|` after the printed term would be read as one
/// more branch or arm of a block inside it.
fn ends_open(t: &Term) -> bool {
    match t {
        Term::Case { branches, .. } => !branches.is_empty(),
        Term::Fork { arms, .. } => !arms.is_empty(),
        Term::Select { body, .. } | Term::Split { body, .. } => ends_open(body),
        Term::Cut { right, .. } => ends_open(right),
        Term::Id(..) | Term::Axiom { .. } => false,
    }
}

fn pl_item(t: &Term, last: bool, out: &mut String) {
    if !last && ends_open(t) {
        out.push('(');
        pl(t, out);
        out.push(')');
    } else {
        pl(t, out);
    }
}

fn pl(t: &Term, out: &mut String) {
    match t {
        Term::Id(a, b) => out.push_str(&format!("{a} == {b}")),
        Term::Axiom { name, ins, outs } => axiom(name, ins, outs, out),
        Term::Case { chan, branches, ctx } if branches.is_empty() => match ctx {
            Some(s) => out.push_str(&format!("stop {chan} {{ :: {s} }}")),
            None => out.push_str(&format!("stop {chan}")),
        },
        Term::Case { chan, branches, .. } => {
            out.push_str(&format!("input {chan} of"));
            let n = branches.len();
            for (i, (tag, b)) in branches.iter().enumerate() {
                out.push_str(&format!(" | {tag} => "));
                pl_item(b, i + 1 == n, out);
            }
        }
        Term::Select { chan, tag, body } => {
            out.push_str(&format!("output {tag} on {chan} in "));
            pl(body, out);
        }
        Term::Split { chan, parts, body } if parts.is_empty() => {
            out.push_str(&format!("close {chan} in "));
            pl(body, out);
        }
        Term::Split { chan, parts, body } => {
            out.push_str(&format!("split {chan} as {} in ", join(parts)));
            pl(body, out);
        }
        Term::Fork { chan, arms } if arms.is_empty() => out.push_str(&format!("end {chan}")),
        Term::Fork { chan, arms } => {
            out.push_str(&format!("fork {chan} as"));
            let n = arms.len();
            for (i, a) in arms.iter().enumerate() {
                if a.owns.is_empty() {
                    out.push_str(&format!(" | {} with => ", a.part));
                } else {
                    out.push_str(&format!(" | {} with {} => ", a.part, join(&a.owns)));
                }
                pl_item(&a.body, i + 1 == n, out);
            }
        }
        Term::Cut { chan, ty, left, right } => {
            match ty {
                Some(x) => out.push_str(&format!("on {chan} : {x} plug ")),
                None => out.push_str(&format!("on {chan} plug ")),
            }
            pl(left, out);
            out.push_str(" to ");
            pl(right, out);
        }
    }
}
