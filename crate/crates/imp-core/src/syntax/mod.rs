//! Abstract syntax for the while language, its assertion language, and
//! annotated programs, together with the concrete-syntax parser and the
//! pretty-printer.

use num_bigint::BigInt;
use std::fmt;
use thiserror::Error;

mod parser;
mod pretty;

pub use parser::{
    parse_aexpr, parse_assert, parse_bare, parse_bexpr, parse_condition, parse_instr, ParseError,
};

pub const KEYWORDS: [&str; 4] = ["skip", "while", "do", "done"];

/// A validated variable or predicate name: non-empty, `[A-Za-z_][A-Za-z0-9_]*`,
/// and not one of the language keywords.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(String);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentError {
    #[error("empty identifier")]
    Empty,
    #[error("invalid identifier {0:?}")]
    InvalidChar(String),
    #[error("identifier {0:?} is a keyword")]
    Keyword(String),
}

impl Ident {
    pub fn new(s: impl Into<String>) -> Result<Self, IdentError> {
        let s = s.into();
        let mut chars = s.chars();
        match chars.next() {
            None => return Err(IdentError::Empty),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(_) => return Err(IdentError::InvalidChar(s)),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(IdentError::InvalidChar(s));
        }
        if KEYWORDS.contains(&s.as_str()) {
            return Err(IdentError::Keyword(s));
        }
        Ok(Ident(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::str::FromStr for Ident {
    type Err = IdentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ident::new(s)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ident({:?})", self.0)
    }
}

/// Shorthand used pervasively in tests; panics on invalid names.
pub fn ident(s: &str) -> Ident {
    Ident::new(s).expect("valid identifier")
}

/// Arithmetic expressions: variables, integer literals, and addition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AExpr {
    Var(Ident),
    Num(BigInt),
    Plus(Box<AExpr>, Box<AExpr>),
}

impl AExpr {
    pub fn var(x: Ident) -> Self {
        AExpr::Var(x)
    }

    pub fn num(n: impl Into<BigInt>) -> Self {
        AExpr::Num(n.into())
    }

    pub fn plus(a: AExpr, b: AExpr) -> Self {
        AExpr::Plus(Box::new(a), Box::new(b))
    }

    /// Variables read by the expression, in first-occurrence order.
    pub fn vars(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<Ident>) {
        match self {
            AExpr::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            AExpr::Num(_) => {}
            AExpr::Plus(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

/// Boolean expressions. The language has a single comparison, `<`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BExpr {
    Lt(AExpr, AExpr),
}

impl BExpr {
    pub fn lt(a: AExpr, b: AExpr) -> Self {
        BExpr::Lt(a, b)
    }

    pub fn vars(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<Ident>) {
        let BExpr::Lt(a, b) = self;
        a.collect_vars(out);
        b.collect_vars(out);
    }
}

/// Bare instructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instr {
    Skip,
    Assign(Ident, AExpr),
    Seq(Box<Instr>, Box<Instr>),
    While(BExpr, Box<Instr>),
}

impl Instr {
    pub fn seq(a: Instr, b: Instr) -> Self {
        Instr::Seq(Box::new(a), Box::new(b))
    }

    pub fn while_loop(b: BExpr, body: Instr) -> Self {
        Instr::While(b, Box::new(body))
    }

    /// Variables read or written anywhere in the instruction,
    /// in first-occurrence order.
    pub fn vars(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<Ident>) {
        match self {
            Instr::Skip => {}
            Instr::Assign(x, e) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
                e.collect_vars(out);
            }
            Instr::Seq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Instr::While(b, i) => {
                b.collect_vars(out);
                i.collect_vars(out);
            }
        }
    }

    /// Maximum while-nesting depth; 0 for loop-free programs.
    pub fn loop_nesting(&self) -> u64 {
        match self {
            Instr::Skip | Instr::Assign(..) => 0,
            Instr::Seq(a, b) => a.loop_nesting().max(b.loop_nesting()),
            Instr::While(_, body) => 1 + body.loop_nesting(),
        }
    }
}

/// Assertions: comparisons, negation, conjunction, and named predicates
/// applied to lists of arithmetic expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assert {
    Bool(BExpr),
    Not(Box<Assert>),
    Conj(Box<Assert>, Box<Assert>),
    Pred(Ident, Vec<AExpr>),
}

impl Assert {
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Assert) -> Self {
        Assert::Not(Box::new(a))
    }

    pub fn conj(a: Assert, b: Assert) -> Self {
        Assert::Conj(Box::new(a), Box::new(b))
    }

    /// The canonical truth encoding `0 < 1`. The assertion language has no
    /// truth constants, so this comparison stands in for `true`.
    pub fn true_assert() -> Self {
        Assert::Bool(BExpr::lt(AExpr::num(0), AExpr::num(1)))
    }

    /// The canonical falsity encoding `0 < 0`.
    pub fn false_assert() -> Self {
        Assert::Bool(BExpr::lt(AExpr::num(0), AExpr::num(0)))
    }

    pub fn vars(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<Ident>) {
        match self {
            Assert::Bool(b) => b.collect_vars(out),
            Assert::Not(a) => a.collect_vars(out),
            Assert::Conj(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Assert::Pred(_, args) => {
                for e in args {
                    e.collect_vars(out);
                }
            }
        }
    }

    /// Predicate names used anywhere in the assertion.
    pub fn pred_names(&self) -> Vec<Ident> {
        fn go(a: &Assert, out: &mut Vec<Ident>) {
            match a {
                Assert::Bool(_) => {}
                Assert::Not(a) => go(a, out),
                Assert::Conj(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Assert::Pred(name, _) => {
                    if !out.contains(name) {
                        out.push(name.clone());
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

/// An implication between two assertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub hyp: Assert,
    pub concl: Assert,
}

impl Condition {
    pub fn imp(hyp: Assert, concl: Assert) -> Self {
        Condition { hyp, concl }
    }

    pub fn vars(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        self.hyp.collect_vars(&mut out);
        self.concl.collect_vars(&mut out);
        out
    }
}

/// Annotated instructions: bare instructions extended with assertion
/// annotations (`Prec`) and loop invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AInstr {
    Prec(Assert, Box<AInstr>),
    Skip,
    Assign(Ident, AExpr),
    Seq(Box<AInstr>, Box<AInstr>),
    While(BExpr, Assert, Box<AInstr>),
}

impl AInstr {
    pub fn prec(a: Assert, i: AInstr) -> Self {
        AInstr::Prec(a, Box::new(i))
    }

    pub fn seq(a: AInstr, b: AInstr) -> Self {
        AInstr::Seq(Box::new(a), Box::new(b))
    }

    pub fn while_loop(b: BExpr, inv: Assert, body: AInstr) -> Self {
        AInstr::While(b, inv, Box::new(body))
    }
}

/// Erases all annotations, yielding the underlying bare instruction.
pub fn un_annot(i: &AInstr) -> Instr {
    match i {
        AInstr::Prec(_, i) => un_annot(i),
        AInstr::Skip => Instr::Skip,
        AInstr::Assign(x, e) => Instr::Assign(x.clone(), e.clone()),
        AInstr::Seq(a, b) => Instr::seq(un_annot(a), un_annot(b)),
        AInstr::While(b, _, body) => Instr::while_loop(b.clone(), un_annot(body)),
    }
}

/// Annotates every program point with the false assertion. Used to flag
/// dead code discovered by the abstract interpreter.
pub fn mark(i: &Instr) -> AInstr {
    match i {
        Instr::Skip => AInstr::prec(Assert::false_assert(), AInstr::Skip),
        Instr::Assign(x, e) => {
            AInstr::prec(Assert::false_assert(), AInstr::Assign(x.clone(), e.clone()))
        }
        Instr::Seq(a, b) => AInstr::seq(mark(a), mark(b)),
        Instr::While(b, body) => AInstr::prec(
            Assert::false_assert(),
            AInstr::while_loop(b.clone(), Assert::false_assert(), mark(body)),
        ),
    }
}

/// One step down an instruction tree; a sequence of steps addresses a
/// program point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    SeqFirst,
    SeqSecond,
    WhileBody,
    PrecBody,
}

impl PathStep {
    fn segment(self) -> &'static str {
        match self {
            PathStep::SeqFirst => "1",
            PathStep::SeqSecond => "2",
            PathStep::WhileBody => "body",
            PathStep::PrecBody => "prec",
        }
    }
}

/// Address of a program point, from the root of the instruction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PointPath(pub Vec<PathStep>);

impl PointPath {
    pub fn root() -> Self {
        PointPath(Vec::new())
    }
}

impl fmt::Display for PointPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let segs: Vec<&str> = self.0.iter().map(|s| s.segment()).collect();
        f.write_str(&segs.join("."))
    }
}

#[cfg(test)]
mod tests;
