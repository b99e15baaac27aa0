//! Pretty-printing back to concrete syntax.
//!
//! Output is canonical: every token is separated by a single space. Right
//! operands of `+` are parenthesized when they are themselves sums, so
//! `parse(pretty(v)) == v` on any tree the grammar can express. Sequences
//! have no parenthesized form in the grammar, so only right-nested `Seq`
//! spines (with non-`Seq` bodies under `Prec`) print faithfully.

use std::fmt;

use super::{AExpr, AInstr, Assert, BExpr, Condition, Instr};

impl fmt::Display for AExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AExpr::Var(x) => write!(f, "{x}"),
            AExpr::Num(n) => write!(f, "{n}"),
            AExpr::Plus(a, b) => {
                write!(f, "{a} + ")?;
                match b.as_ref() {
                    AExpr::Plus(..) => write!(f, "( {b} )"),
                    _ => write!(f, "{b}"),
                }
            }
        }
    }
}

impl fmt::Display for BExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let BExpr::Lt(a, b) = self;
        write!(f, "{a} < {b}")
    }
}

// An assertion in `aconj` position: conjunctions need parentheses there.
fn fmt_aconj(a: &Assert, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match a {
        Assert::Conj(..) => write!(f, "( {a} )"),
        _ => write!(f, "{a}"),
    }
}

impl fmt::Display for Assert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assert::Bool(b) => write!(f, "{b}"),
            Assert::Not(a) => {
                f.write_str("~ ")?;
                fmt_aconj(a, f)
            }
            Assert::Conj(a, b) => {
                fmt_aconj(a, f)?;
                write!(f, " /\\ {b}")
            }
            Assert::Pred(name, args) => {
                write!(f, "{name} (")?;
                for (k, e) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ,")?;
                    }
                    write!(f, " {e}")?;
                }
                f.write_str(" )")
            }
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.hyp, self.concl)
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Skip => f.write_str("skip"),
            Instr::Assign(x, e) => write!(f, "{x} := {e}"),
            Instr::Seq(a, b) => write!(f, "{a} ; {b}"),
            Instr::While(b, body) => write!(f, "while {b} do {body} done"),
        }
    }
}

impl fmt::Display for AInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AInstr::Prec(a, i) => write!(f, "{{ {a} }} {i}"),
            AInstr::Skip => f.write_str("skip"),
            AInstr::Assign(x, e) => write!(f, "{x} := {e}"),
            AInstr::Seq(a, b) => write!(f, "{a} ; {b}"),
            AInstr::While(b, inv, body) => write!(f, "while {b} do [ {inv} ] {body} done"),
        }
    }
}
