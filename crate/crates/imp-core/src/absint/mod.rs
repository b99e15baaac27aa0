//! Abstract interpretation over a pluggable domain of abstract values.
//!
//! The interpreter runs a bare instruction over an abstract environment and
//! returns the same instruction annotated with what is known at every
//! program point, plus the abstract environment at the end (absent when the
//! analysis detects that concrete execution cannot terminate). Loops are
//! handled by a three-stage strategy: test the input environment for
//! stability, then a widened environment, then give up all precision.

use num_bigint::BigInt;
use std::fmt;
use thiserror::Error;

use crate::syntax::{mark, AExpr, AInstr, Assert, BExpr, Ident, Instr};

mod interval;

pub use interval::{Bound, Interval, IntervalParseError};

/// What the engine needs from a domain of abstract values. `top` denotes
/// the whole of the integers; `included` is the precision order with `top`
/// as maximum; `widen` must stabilize every ascending chain in finitely
/// many steps; the restrictions refine a value under a `<` test and return
/// `None` exactly when the refined set is empty.
pub trait AbstractDomain: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn top() -> Self;
    fn from_const(n: &BigInt) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn included(&self, other: &Self) -> bool;
    fn join(&self, other: &Self) -> Self;
    fn widen(&self, other: &Self) -> Self;
    fn restrict_lt(&self, bound: &Self) -> Option<Self>;
    fn restrict_ge(&self, bound: &Self) -> Option<Self>;
    fn to_assert(&self, var: &Ident) -> Assert;
}

/// An abstract environment: distinct names in a fixed order. Every
/// environment produced during one analysis carries the same name sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbEnv<D>(Vec<(Ident, D)>);

impl<D: AbstractDomain> AbEnv<D> {
    pub fn new() -> Self {
        AbEnv(Vec::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Ident, D)>) -> Self {
        let env = AbEnv(pairs.into_iter().collect());
        debug_assert!(env.names_distinct());
        env
    }

    fn names_distinct(&self) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(k, (x, _))| !self.0[..k].iter().any(|(y, _)| y == x))
    }

    pub fn push(&mut self, x: Ident, v: D) {
        debug_assert!(!self.is_bound(&x));
        self.0.push((x, v));
    }

    pub fn is_bound(&self, x: &Ident) -> bool {
        self.0.iter().any(|(y, _)| y == x)
    }

    pub fn names(&self) -> Vec<Ident> {
        self.0.iter().map(|(x, _)| x.clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Ident, D)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pointwise precision order; requires identical name sequences.
    pub fn included(&self, other: &Self) -> bool {
        debug_assert!(same_names(self, other));
        self.0
            .iter()
            .zip(other.0.iter())
            .all(|((_, a), (_, b))| a.included(b))
    }

    /// The same names, all mapped to `top`.
    pub fn all_top(&self) -> Self {
        AbEnv(self.0.iter().map(|(x, _)| (x.clone(), D::top())).collect())
    }
}

impl<D: AbstractDomain> Default for AbEnv<D> {
    fn default() -> Self {
        AbEnv::new()
    }
}

pub fn same_names<D: AbstractDomain>(l1: &AbEnv<D>, l2: &AbEnv<D>) -> bool {
    l1.len() == l2.len() && l1.0.iter().zip(l2.0.iter()).all(|((x, _), (y, _))| x == y)
}

/// The value bound to `x`, or `top` when `x` is unbound.
pub fn ab_lookup<D: AbstractDomain>(l: &AbEnv<D>, x: &Ident) -> D {
    l.0.iter()
        .find(|(y, _)| y == x)
        .map(|(_, v)| v.clone())
        .unwrap_or_else(D::top)
}

/// Abstract evaluation of an arithmetic expression.
pub fn ab_eval<D: AbstractDomain>(lookup: &dyn Fn(&Ident) -> D, a: &AExpr) -> D {
    match a {
        AExpr::Var(x) => lookup(x),
        AExpr::Num(n) => D::from_const(n),
        AExpr::Plus(a, b) => ab_eval(lookup, a).add(&ab_eval(lookup, b)),
    }
}

/// In-place binding replacement; `x` must be bound (the analysis pre-binds
/// every program variable).
pub fn ab_update<D: AbstractDomain>(l: &AbEnv<D>, x: &Ident, v: D) -> AbEnv<D> {
    let pos = l
        .0
        .iter()
        .position(|(y, _)| y == x)
        .expect("ab_update: variable bound by analysis setup");
    let mut out = l.clone();
    out.0[pos].1 = v;
    out
}

/// Pointwise join; requires identical name sequences.
pub fn join_env<D: AbstractDomain>(l1: &AbEnv<D>, l2: &AbEnv<D>) -> AbEnv<D> {
    debug_assert!(same_names(l1, l2));
    AbEnv(
        l1.0.iter()
            .zip(l2.0.iter())
            .map(|((x, a), (_, b))| (x.clone(), a.join(b)))
            .collect(),
    )
}

/// Pointwise widening; requires identical name sequences.
pub fn widen_env<D: AbstractDomain>(l1: &AbEnv<D>, l2: &AbEnv<D>) -> AbEnv<D> {
    debug_assert!(same_names(l1, l2));
    AbEnv(
        l1.0.iter()
            .zip(l2.0.iter())
            .map(|((x, a), (_, b))| (x.clone(), a.widen(b)))
            .collect(),
    )
}

/// Incorporates a loop test into the environment. With `polarity` true the
/// test is assumed satisfied, otherwise falsified. When the test has the
/// form `v < e` with `v` a bound variable, the value of `v` is refined;
/// `None` means the assumption is impossible, so the code behind it is
/// dead. Any other shape leaves the environment unchanged unless abstract
/// evaluation proves the test constant.
pub fn intersect_env<D: AbstractDomain>(
    polarity: bool,
    l: &AbEnv<D>,
    b: &BExpr,
) -> Option<AbEnv<D>> {
    let BExpr::Lt(lhs, rhs) = b;
    let eval = |e: &AExpr| ab_eval(&|x| ab_lookup(l, x), e);
    match lhs {
        AExpr::Var(v) if l.is_bound(v) => {
            let bound = eval(rhs);
            let cur = ab_lookup(l, v);
            let refined = if polarity {
                cur.restrict_lt(&bound)
            } else {
                cur.restrict_ge(&bound)
            };
            refined.map(|nv| ab_update(l, v, nv))
        }
        _ => {
            let (lv, rv) = (eval(lhs), eval(rhs));
            let impossible = if polarity {
                // Constant-false test: nothing on the left is below the right.
                lv.restrict_lt(&rv).is_none()
            } else {
                // Constant-true test: nothing on the left reaches the right.
                lv.restrict_ge(&rv).is_none()
            };
            if impossible {
                None
            } else {
                Some(l.clone())
            }
        }
    }
}

/// The environment as an assertion: the conjunction of each binding's
/// constraint, with uninformative (`top`) bindings dropped. The empty
/// conjunction is the true assertion.
pub fn to_a<D: AbstractDomain>(l: &AbEnv<D>) -> Assert {
    let parts: Vec<Assert> = l
        .0
        .iter()
        .map(|(x, v)| v.to_assert(x))
        .filter(|a| *a != Assert::true_assert())
        .collect();
    match parts.into_iter().rev().reduce(|acc, a| Assert::conj(a, acc)) {
        Some(a) => a,
        None => Assert::true_assert(),
    }
}

/// As `to_a`, with the absent environment mapped to the false assertion:
/// no store reaches a point the analysis proved unreachable.
pub fn to_a_opt<D: AbstractDomain>(l: &Option<AbEnv<D>>) -> Assert {
    match l {
        Some(l) => to_a(l),
        None => Assert::false_assert(),
    }
}

/// The body-analysis callback handed to `fp1` and `fp`.
pub type BodyAnalysis<'a, D> = dyn FnMut(&AbEnv<D>) -> (AInstr, Option<AbEnv<D>>) + 'a;

/// One pass over a loop body from candidate environment `l`: refine by the
/// test, run the body analysis `f`, and join input, refined, and output
/// environments. A dead test short-circuits to marked code; a diverging
/// body propagates `None`.
pub fn fp1<D: AbstractDomain>(
    l0: &AbEnv<D>,
    l: &AbEnv<D>,
    b: &BExpr,
    i: &Instr,
    f: &mut BodyAnalysis<D>,
) -> (AInstr, Option<AbEnv<D>>) {
    match intersect_env(true, l, b) {
        None => (AInstr::prec(Assert::false_assert(), mark(i)), Some(l.clone())),
        Some(l_ref) => {
            let (i2, out) = f(&l_ref);
            match out {
                None => (i2, None),
                Some(l2) => (i2, Some(join_env(l0, &join_env(&l_ref, &l2)))),
            }
        }
    }
}

/// The three-stage loop strategy. Stage 1 asks whether the input
/// environment is already stable under `fp1`; stage 2 widens input against
/// output and retries; stage 3 forgets everything and analyzes from the
/// all-top environment, which is stable by construction. Whenever the
/// returned environment is present, re-running `fp1` on it reproduces it.
pub fn fp<D: AbstractDomain>(
    l: &AbEnv<D>,
    b: &BExpr,
    i: &Instr,
    f: &mut BodyAnalysis<D>,
) -> (AInstr, Option<AbEnv<D>>) {
    let (i1, r1) = fp1(l, l, b, i, f);
    if r1.as_ref() == Some(l) {
        return (i1, r1);
    }
    let lw = widen_env(l, r1.as_ref().unwrap_or(l));
    let (i2, r2) = fp1(&lw, &lw, b, i, f);
    if r2.as_ref() == Some(&lw) {
        return (i2, r2);
    }
    let lt = l.all_top();
    fp1(&lt, &lt, b, i, f)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetupError {
    #[error("program variable {0} is not bound in the abstract environment")]
    Unbound(Ident),
}

/// Runs the abstract interpreter. Every variable the program reads or
/// writes must be bound in `l`; see `close_over` for defaulting.
///
/// Returns the annotated instruction, whose `Prec` annotations describe the
/// abstract environment flowing into each point, and the final environment
/// (`None` when the analysis detects non-termination).
pub fn abstract_i<D: AbstractDomain>(
    i: &Instr,
    l: &AbEnv<D>,
) -> Result<(AInstr, Option<AbEnv<D>>), SetupError> {
    for x in i.vars() {
        if !l.is_bound(&x) {
            return Err(SetupError::Unbound(x));
        }
    }
    Ok(abstract_i_rec(i, l))
}

fn abstract_i_rec<D: AbstractDomain>(i: &Instr, l: &AbEnv<D>) -> (AInstr, Option<AbEnv<D>>) {
    match i {
        Instr::Skip => (AInstr::prec(to_a(l), AInstr::Skip), Some(l.clone())),
        Instr::Assign(x, e) => {
            let v = ab_eval(&|y| ab_lookup(l, y), e);
            (
                AInstr::prec(to_a(l), AInstr::Assign(x.clone(), e.clone())),
                Some(ab_update(l, x, v)),
            )
        }
        Instr::Seq(i1, i2) => {
            let (a1, l1) = abstract_i_rec(i1, l);
            match l1 {
                None => (
                    // Everything after a diverging prefix is dead.
                    AInstr::seq(a1, AInstr::prec(Assert::false_assert(), mark(i2))),
                    None,
                ),
                Some(l1) => {
                    let (a2, l2) = abstract_i_rec(i2, &l1);
                    (AInstr::seq(a1, a2), l2)
                }
            }
        }
        Instr::While(b, body) => match intersect_env(true, l, b) {
            None => (
                // The loop is never entered: mark the body dead and record
                // the failed test in the invariant.
                AInstr::prec(
                    to_a(l),
                    AInstr::while_loop(
                        b.clone(),
                        Assert::conj(Assert::not(Assert::Bool(b.clone())), to_a(l)),
                        mark(body),
                    ),
                ),
                Some(l.clone()),
            ),
            Some(_) => {
                let (i2, out) = fp(l, b, body, &mut |env| abstract_i_rec(body, env));
                match out {
                    None => (
                        AInstr::prec(to_a(l), AInstr::while_loop(b.clone(), to_a(l), i2)),
                        intersect_env(false, l, b),
                    ),
                    Some(l2) => (
                        AInstr::prec(to_a(l), AInstr::while_loop(b.clone(), to_a(&l2), i2)),
                        intersect_env(false, &l2, b),
                    ),
                }
            }
        },
    }
}

/// Extends `init` with `top` bindings for the program variables it does
/// not cover, in first-occurrence order; returns the names that were
/// defaulted so callers can warn.
pub fn close_over<D: AbstractDomain>(i: &Instr, init: &AbEnv<D>) -> (AbEnv<D>, Vec<Ident>) {
    let mut env = init.clone();
    let mut defaulted = Vec::new();
    for x in i.vars() {
        if !env.is_bound(&x) {
            env.push(x.clone(), D::top());
            defaulted.push(x);
        }
    }
    (env, defaulted)
}

/// The `fp` call made at one reachable loop during an analysis.
#[derive(Debug, Clone)]
pub struct LoopFixpoint<D> {
    pub test: BExpr,
    pub body: Instr,
    pub entry: AbEnv<D>,
    pub result: Option<AbEnv<D>>,
}

/// Replays the analysis of `i` from `l` and records the fixpoint computed
/// at every reachable loop, outer loops before the loops of their bodies
/// (inner loops are recorded as analyzed in the final stable pass).
pub fn loop_fixpoints<D: AbstractDomain>(
    i: &Instr,
    l: &AbEnv<D>,
) -> Result<Vec<LoopFixpoint<D>>, SetupError> {
    for x in i.vars() {
        if !l.is_bound(&x) {
            return Err(SetupError::Unbound(x));
        }
    }
    let mut out = Vec::new();
    collect_fixpoints(i, l, &mut out);
    Ok(out)
}

fn collect_fixpoints<D: AbstractDomain>(
    i: &Instr,
    l: &AbEnv<D>,
    out: &mut Vec<LoopFixpoint<D>>,
) -> Option<AbEnv<D>> {
    match i {
        Instr::Skip => Some(l.clone()),
        Instr::Assign(x, e) => {
            let v = ab_eval(&|y| ab_lookup(l, y), e);
            Some(ab_update(l, x, v))
        }
        Instr::Seq(i1, i2) => {
            let l1 = collect_fixpoints(i1, l, out)?;
            collect_fixpoints(i2, &l1, out)
        }
        Instr::While(b, body) => match intersect_env(true, l, b) {
            None => Some(l.clone()),
            Some(_) => {
                let (_, result) = fp(l, b, body, &mut |env| abstract_i_rec(body, env));
                out.push(LoopFixpoint {
                    test: b.clone(),
                    body: (**body).clone(),
                    entry: l.clone(),
                    result: result.clone(),
                });
                // The final pass analyzed the body from the stable candidate
                // (all-top when the body was found to diverge).
                let candidate = result.clone().unwrap_or_else(|| l.all_top());
                if let Some(l_ref) = intersect_env(true, &candidate, b) {
                    collect_fixpoints(body, &l_ref, out);
                }
                match result {
                    None => intersect_env(false, l, b),
                    Some(l2) => intersect_env(false, &l2, b),
                }
            }
        },
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbEnvParseError {
    #[error("malformed binding {0:?}, expected name=[lo,hi]")]
    Malformed(String),
    #[error("bad variable name: {0}")]
    BadName(#[from] crate::syntax::IdentError),
    #[error("{0}")]
    BadInterval(#[from] IntervalParseError),
    #[error("duplicate variable {0}")]
    Duplicate(Ident),
}

/// Parses the textual form `x=[0,0],y=[-inf,3],n=[3,+inf]`.
pub fn parse_interval_env(s: &str) -> Result<AbEnv<Interval>, AbEnvParseError> {
    let mut env = AbEnv::new();
    if s.trim().is_empty() {
        return Ok(env);
    }
    // Bindings are comma separated, but intervals contain commas too, so
    // split on the commas that follow a closing bracket.
    let mut rest = s;
    loop {
        let (item, tail) = match rest.find(']') {
            Some(k) => {
                let (item, tail) = rest.split_at(k + 1);
                let tail = tail.trim_start();
                (item, tail.strip_prefix(',').unwrap_or(tail))
            }
            None => (rest, ""),
        };
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| AbEnvParseError::Malformed(item.to_string()))?;
        let name = Ident::new(name.trim())?;
        if env.is_bound(&name) {
            return Err(AbEnvParseError::Duplicate(name));
        }
        let value: Interval = value.parse()?;
        env.push(name, value);
        if tail.is_empty() {
            return Ok(env);
        }
        rest = tail;
    }
}

impl fmt::Display for AbEnv<Interval> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (x, v)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}={v}")?;
        }
        Ok(())
    }
}
