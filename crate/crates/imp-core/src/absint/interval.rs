//! The interval instance of the abstract domain: possibly unbounded
//! integer ranges.

use num_bigint::BigInt;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use super::AbstractDomain;
use crate::syntax::{AExpr, Assert, BExpr, Ident};

/// An interval endpoint. The derived ordering puts `NegInf` below every
/// finite bound and `PosInf` above.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    NegInf,
    Finite(BigInt),
    PosInf,
}

impl Bound {
    fn plus(&self, other: &Bound) -> Bound {
        use Bound::*;
        match (self, other) {
            (NegInf, PosInf) | (PosInf, NegInf) => unreachable!("mixed infinities"),
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::Finite(n) => write!(f, "{n}"),
            Bound::PosInf => f.write_str("+inf"),
        }
    }
}

/// A non-empty set of integers of the form `[lo, hi]`; the empty set is
/// never stored, it only appears as the absent result of a restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Bound,
    hi: Bound,
}

impl Interval {
    pub fn new(lo: Bound, hi: Bound) -> Self {
        debug_assert!(lo != Bound::PosInf && hi != Bound::NegInf && lo <= hi);
        Interval { lo, hi }
    }

    pub fn finite(lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Self {
        Interval::new(Bound::Finite(lo.into()), Bound::Finite(hi.into()))
    }

    pub fn at_least(lo: impl Into<BigInt>) -> Self {
        Interval::new(Bound::Finite(lo.into()), Bound::PosInf)
    }

    pub fn at_most(hi: impl Into<BigInt>) -> Self {
        Interval::new(Bound::NegInf, Bound::Finite(hi.into()))
    }

    pub fn lo(&self) -> &Bound {
        &self.lo
    }

    pub fn hi(&self) -> &Bound {
        &self.hi
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        Bound::Finite(n.clone()) >= self.lo && Bound::Finite(n.clone()) <= self.hi
    }
}

impl AbstractDomain for Interval {
    fn top() -> Self {
        Interval { lo: Bound::NegInf, hi: Bound::PosInf }
    }

    fn from_const(n: &BigInt) -> Self {
        Interval::finite(n.clone(), n.clone())
    }

    fn add(&self, other: &Self) -> Self {
        Interval::new(self.lo.plus(&other.lo), self.hi.plus(&other.hi))
    }

    fn included(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    fn join(&self, other: &Self) -> Self {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Keeps a bound that did not grow and pushes a grown bound to the
    /// matching infinity, so every widening chain stabilizes.
    fn widen(&self, other: &Self) -> Self {
        Interval {
            lo: if other.lo < self.lo { Bound::NegInf } else { self.lo.clone() },
            hi: if other.hi > self.hi { Bound::PosInf } else { self.hi.clone() },
        }
    }

    /// Refines under the knowledge `v < e` where `e` ranges over `bound`:
    /// sound refinement keeps everything below the bound's largest value.
    fn restrict_lt(&self, bound: &Self) -> Option<Self> {
        let cap = match &bound.hi {
            Bound::PosInf => return Some(self.clone()),
            Bound::Finite(d) => Bound::Finite(d - 1),
            Bound::NegInf => unreachable!("empty bound interval"),
        };
        let hi = self.hi.clone().min(cap);
        if self.lo > hi {
            None
        } else {
            Some(Interval { lo: self.lo.clone(), hi })
        }
    }

    /// Refines under the knowledge `not (v < e)`, that is `v >= e` for some
    /// value of `e` in `bound`.
    fn restrict_ge(&self, bound: &Self) -> Option<Self> {
        let floor = match &bound.lo {
            Bound::NegInf => return Some(self.clone()),
            Bound::Finite(c) => Bound::Finite(c.clone()),
            Bound::PosInf => unreachable!("empty bound interval"),
        };
        let lo = self.lo.clone().max(floor);
        if lo > self.hi {
            None
        } else {
            Some(Interval { lo, hi: self.hi.clone() })
        }
    }

    /// `[a, b]` becomes `a-1 < x /\ x < b+1`, the only comparisons the
    /// assertion language can express; infinite bounds contribute nothing.
    fn to_assert(&self, var: &Ident) -> Assert {
        let x = AExpr::Var(var.clone());
        let lo = match &self.lo {
            Bound::Finite(a) => Some(Assert::Bool(BExpr::Lt(AExpr::Num(a - 1), x.clone()))),
            _ => None,
        };
        let hi = match &self.hi {
            Bound::Finite(b) => Some(Assert::Bool(BExpr::Lt(x, AExpr::Num(b + 1)))),
            _ => None,
        };
        match (lo, hi) {
            (Some(l), Some(h)) => Assert::conj(l, h),
            (Some(l), None) => l,
            (None, Some(h)) => h,
            (None, None) => Assert::true_assert(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntervalParseError {
    #[error("malformed interval {0:?}, expected [lo,hi]")]
    Malformed(String),
    #[error("bad bound {0:?}")]
    BadBound(String),
    #[error("empty interval {0:?}")]
    Empty(String),
}

impl FromStr for Interval {
    type Err = IntervalParseError;

    /// Parses `[lo,hi]` where each bound is an integer, `-inf`, or `+inf`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| IntervalParseError::Malformed(s.to_string()))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| IntervalParseError::Malformed(s.to_string()))?;
        let parse = |b: &str| -> Result<Bound, IntervalParseError> {
            match b.trim() {
                "-inf" => Ok(Bound::NegInf),
                "+inf" | "inf" => Ok(Bound::PosInf),
                digits => digits
                    .parse::<BigInt>()
                    .map(Bound::Finite)
                    .map_err(|_| IntervalParseError::BadBound(b.to_string())),
            }
        };
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo == Bound::PosInf || hi == Bound::NegInf || lo > hi {
            return Err(IntervalParseError::Empty(s.to_string()));
        }
        Ok(Interval { lo, hi })
    }
}
