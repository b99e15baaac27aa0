//! Environments, partial expression evaluation, and the fuel-bounded
//! big-step interpreter.
//!
//! Environments are ordered association lists with first-match lookup.
//! Evaluation and update are partial: absence means an unbound variable was
//! read or written. The interpreter spends one unit of fuel per while-loop
//! iteration, which is the only source of non-termination, and classifies
//! every run as `Done`, `RuntimeError`, or `OutOfFuel`.

use num_bigint::BigInt;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::assertions::Valuation;
use crate::syntax::{AExpr, BExpr, Ident, Instr, PathStep, PointPath};

/// An ordered list of variable bindings. Duplicate names are permitted but
/// only the first binding of a name is observable; update rewrites only the
/// first binding and preserves order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Env(Vec<(Ident, BigInt)>);

impl Env {
    pub fn new() -> Self {
        Env(Vec::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Ident, BigInt)>) -> Self {
        Env(pairs.into_iter().collect())
    }

    pub fn bind(&mut self, x: Ident, n: impl Into<BigInt>) {
        self.0.push((x, n.into()));
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Ident, BigInt)> {
        self.0.iter()
    }

    pub fn names(&self) -> Vec<Ident> {
        self.0.iter().map(|(x, _)| x.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Value of the first binding of `s`, if any.
pub fn lookup(r: &Env, s: &Ident) -> Option<BigInt> {
    r.0.iter().find(|(x, _)| x == s).map(|(_, n)| n.clone())
}

pub(crate) fn af_checked(r: &Env, a: &AExpr) -> Result<BigInt, Ident> {
    match a {
        AExpr::Var(x) => lookup(r, x).ok_or_else(|| x.clone()),
        AExpr::Num(n) => Ok(n.clone()),
        AExpr::Plus(a, b) => Ok(af_checked(r, a)? + af_checked(r, b)?),
    }
}

/// Partial evaluation of an arithmetic expression; absent iff some variable
/// read is unbound in `r`.
pub fn af(r: &Env, a: &AExpr) -> Option<BigInt> {
    af_checked(r, a).ok()
}

pub(crate) fn bf_checked(r: &Env, b: &BExpr) -> Result<bool, Ident> {
    let BExpr::Lt(a1, a2) = b;
    Ok(af_checked(r, a1)? < af_checked(r, a2)?)
}

/// Partial evaluation of a boolean expression.
pub fn bf(r: &Env, b: &BExpr) -> Option<bool> {
    bf_checked(r, b).ok()
}

/// Rewrites the first binding of `x` to `n`; absent iff `x` is unbound.
pub fn update(r: &Env, x: &Ident, n: BigInt) -> Option<Env> {
    let pos = r.0.iter().position(|(name, _)| name == x)?;
    let mut out = r.clone();
    out.0[pos].1 = n;
    Some(out)
}

/// A total valuation agreeing with `r` on bound names and with `g`
/// elsewhere.
pub fn env_overlay(r: &Env, g: &Valuation) -> Valuation {
    let mut entries: Vec<(Ident, BigInt)> = r.0.clone();
    entries.extend(g.entries().iter().cloned());
    Valuation::from_entries(entries)
}

/// Why a run failed at some program point.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ErrorReason {
    #[error("read of unbound variable {0}")]
    UnboundRead(Ident),
    #[error("write to unbound variable {0}")]
    UnboundWrite(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeError {
    pub reason: ErrorReason,
    pub at: PointPath,
}

impl fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.reason, self.at)
    }
}

/// Classification of a run: terminated, failed, or exhausted its fuel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecOutcome {
    Done(Env),
    RuntimeError(RuntimeError),
    OutOfFuel,
}

impl ExecOutcome {
    pub fn is_done(&self) -> bool {
        matches!(self, ExecOutcome::Done(_))
    }
}

enum Halt {
    Error(RuntimeError),
    OutOfFuel,
}

fn exec_rec(fuel: &mut u64, r: Env, i: &Instr, path: &mut Vec<PathStep>) -> Result<Env, Halt> {
    let err = |reason: ErrorReason, path: &[PathStep]| {
        Halt::Error(RuntimeError { reason, at: PointPath(path.to_vec()) })
    };
    match i {
        Instr::Skip => Ok(r),
        Instr::Assign(x, e) => {
            let v = af_checked(&r, e)
                .map_err(|name| err(ErrorReason::UnboundRead(name), path))?;
            update(&r, x, v).ok_or_else(|| err(ErrorReason::UnboundWrite(x.clone()), path))
        }
        Instr::Seq(i1, i2) => {
            path.push(PathStep::SeqFirst);
            let r1 = exec_rec(fuel, r, i1, path)?;
            path.pop();
            path.push(PathStep::SeqSecond);
            let r2 = exec_rec(fuel, r1, i2, path)?;
            path.pop();
            Ok(r2)
        }
        Instr::While(b, body) => {
            let mut env = r;
            loop {
                match bf_checked(&env, b)
                    .map_err(|name| err(ErrorReason::UnboundRead(name), path))?
                {
                    false => return Ok(env),
                    true => {
                        if *fuel == 0 {
                            return Err(Halt::OutOfFuel);
                        }
                        *fuel -= 1;
                        path.push(PathStep::WhileBody);
                        env = exec_rec(fuel, env, body, path)?;
                        path.pop();
                    }
                }
            }
        }
    }
}

/// Runs `i` from `r` with a budget of `fuel` while-loop iterations.
///
/// `Done(r')` holds exactly when the big-step judgment relating `r`, `i`,
/// and `r'` is derivable within the budget; errors and fuel exhaustion are
/// reported as values, never panics.
///
/// ```
/// use imp_core::concrete::{exec_fuel, Env, ExecOutcome};
/// use imp_core::syntax::parse_bare;
///
/// let sum = parse_bare("while x < n do x:=x+1; y:=x+y done").unwrap();
/// let env: Env = "x=0,y=0,n=3".parse().unwrap();
/// assert_eq!(exec_fuel(100, &env, &sum), ExecOutcome::Done("x=3,y=6,n=3".parse().unwrap()));
/// ```
pub fn exec_fuel(fuel: u64, r: &Env, i: &Instr) -> ExecOutcome {
    let mut fuel = fuel;
    let mut path = Vec::new();
    match exec_rec(&mut fuel, r.clone(), i, &mut path) {
        Ok(env) => ExecOutcome::Done(env),
        Err(Halt::Error(e)) => ExecOutcome::RuntimeError(e),
        Err(Halt::OutOfFuel) => ExecOutcome::OutOfFuel,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvParseError {
    #[error("malformed binding {0:?}, expected name=value")]
    Malformed(String),
    #[error("bad variable name: {0}")]
    BadName(#[from] crate::syntax::IdentError),
    #[error("bad integer {0:?}")]
    BadValue(String),
}

impl FromStr for Env {
    type Err = EnvParseError;

    /// Parses the textual form `x=0,y=2`; the empty string is the empty
    /// environment.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut env = Env::new();
        if s.trim().is_empty() {
            return Ok(env);
        }
        for item in s.split(',') {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| EnvParseError::Malformed(item.to_string()))?;
            let name = Ident::new(name.trim())?;
            let value = BigInt::from_str(value.trim())
                .map_err(|_| EnvParseError::BadValue(value.to_string()))?;
            env.bind(name, value);
        }
        Ok(env)
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (x, n)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}={n}")?;
        }
        Ok(())
    }
}
