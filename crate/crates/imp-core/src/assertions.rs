//! Total evaluation under valuations, assertion interpretation,
//! substitution, predicate environments, and sampled validity checking.
//!
//! True validity of a condition quantifies over all valuations and is not
//! decidable here; `valid_sampled` is the executable analogue, a falsifier
//! over a caller-supplied sample set.

use num_bigint::BigInt;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::syntax::{AExpr, Assert, BExpr, Condition, Ident};

/// A total mapping from identifiers to integers: a finite override table
/// with first-match lookup and a default of zero for everything else.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Valuation(Vec<(Ident, BigInt)>);

impl Valuation {
    pub fn new() -> Self {
        Valuation(Vec::new())
    }

    pub fn from_entries(entries: Vec<(Ident, BigInt)>) -> Self {
        Valuation(entries)
    }

    pub fn bind(mut self, x: Ident, n: impl Into<BigInt>) -> Self {
        self.0.push((x, n.into()));
        self
    }

    pub fn get(&self, x: &Ident) -> BigInt {
        self.0
            .iter()
            .find(|(name, _)| name == x)
            .map(|(_, n)| n.clone())
            .unwrap_or_default()
    }

    pub fn entries(&self) -> &[(Ident, BigInt)] {
        &self.0
    }
}

impl FromStr for Valuation {
    type Err = crate::concrete::EnvParseError;

    /// Same textual form as environments: `x=0,y=2`; unknown names read as 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let env: crate::concrete::Env = s.parse()?;
        Ok(Valuation(env.iter().cloned().collect()))
    }
}

impl fmt::Display for Valuation {
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

/// Total evaluation of an arithmetic expression under a valuation.
pub fn af_total(g: &Valuation, a: &AExpr) -> BigInt {
    match a {
        AExpr::Var(x) => g.get(x),
        AExpr::Num(n) => n.clone(),
        AExpr::Plus(a, b) => af_total(g, a) + af_total(g, b),
    }
}

/// Total evaluation of a boolean expression under a valuation.
pub fn bf_total(g: &Valuation, b: &BExpr) -> bool {
    let BExpr::Lt(a1, a2) = b;
    af_total(g, a1) < af_total(g, a2)
}

/// Maps `af_total` over a list of arguments.
pub fn lf_total(g: &Valuation, args: &[AExpr]) -> Vec<BigInt> {
    args.iter().map(|a| af_total(g, a)).collect()
}

/// Substitutes `e` for every occurrence of `Var x` in an arithmetic
/// expression.
pub fn subst_a(a: &AExpr, x: &Ident, e: &AExpr) -> AExpr {
    match a {
        AExpr::Var(y) if y == x => e.clone(),
        AExpr::Var(_) | AExpr::Num(_) => a.clone(),
        AExpr::Plus(a1, a2) => AExpr::plus(subst_a(a1, x, e), subst_a(a2, x, e)),
    }
}

pub fn subst_b(b: &BExpr, x: &Ident, e: &AExpr) -> BExpr {
    let BExpr::Lt(a1, a2) = b;
    BExpr::Lt(subst_a(a1, x, e), subst_a(a2, x, e))
}

/// Substitution through assertions, homomorphic in every constructor.
pub fn a_subst(a: &Assert, x: &Ident, e: &AExpr) -> Assert {
    match a {
        Assert::Bool(b) => Assert::Bool(subst_b(b, x, e)),
        Assert::Not(a) => Assert::not(a_subst(a, x, e)),
        Assert::Conj(a1, a2) => Assert::conj(a_subst(a1, x, e), a_subst(a2, x, e)),
        Assert::Pred(name, args) => Assert::Pred(
            name.clone(),
            args.iter().map(|arg| subst_a(arg, x, e)).collect(),
        ),
    }
}

pub type Pred = Arc<dyn Fn(&[BigInt]) -> bool + Send + Sync>;

/// Named semantic predicates over integer lists, with first-match lookup.
/// Unbound names denote the constantly-true predicate, which keeps
/// generated conditions conservative to refute.
#[derive(Clone, Default)]
pub struct PredEnv(Vec<(Ident, Pred)>);

impl PredEnv {
    pub fn new() -> Self {
        PredEnv(Vec::new())
    }

    pub fn bind(
        mut self,
        name: Ident,
        pred: impl Fn(&[BigInt]) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.0.push((name, Arc::new(pred)));
        self
    }

    pub fn contains(&self, name: &Ident) -> bool {
        self.0.iter().any(|(n, _)| n == name)
    }
}

impl fmt::Debug for PredEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|(n, _)| n.as_str()).collect();
        write!(f, "PredEnv{names:?}")
    }
}

/// The predicate bound to `name`, or the constantly-true predicate.
pub fn f_p(m: &PredEnv, name: &Ident) -> Pred {
    m.0.iter()
        .find(|(n, _)| n == name)
        .map(|(_, p)| p.clone())
        .unwrap_or_else(|| Arc::new(|_| true))
}

/// Interprets an assertion as a truth value under a predicate environment
/// and a valuation.
pub fn i_a(m: &PredEnv, g: &Valuation, a: &Assert) -> bool {
    match a {
        Assert::Bool(b) => bf_total(g, b),
        Assert::Not(a) => !i_a(m, g, a),
        Assert::Conj(a1, a2) => i_a(m, g, a1) && i_a(m, g, a2),
        Assert::Pred(name, args) => f_p(m, name)(&lf_total(g, args)),
    }
}

/// Interprets a condition as material implication.
pub fn i_c(m: &PredEnv, g: &Valuation, c: &Condition) -> bool {
    !i_a(m, g, &c.hyp) || i_a(m, g, &c.concl)
}

/// Result of a sampled validity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NoCounterexample,
    Counterexample(Valuation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::NoCounterexample)
    }
}

/// Searches the sample set for a valuation refuting `c`. Finding none is
/// evidence, not proof: validity over all valuations is out of reach.
pub fn valid_sampled(m: &PredEnv, c: &Condition, samples: &[Valuation]) -> Verdict {
    assert!(!samples.is_empty(), "valid_sampled requires samples");
    for g in samples {
        if !i_c(m, g, c) {
            return Verdict::Counterexample(g.clone());
        }
    }
    Verdict::NoCounterexample
}

/// The built-in predicate table: `le ( a , b )` holds when a <= b, and
/// `pp ( y , x )` holds when 2*y = x*(x+1). Both yield false on any arity
/// other than two.
pub fn builtin_pred_env() -> PredEnv {
    PredEnv::new()
        .bind(Ident::new("le").unwrap(), |args: &[BigInt]| match args {
            [a, b] => a <= b,
            _ => false,
        })
        .bind(Ident::new("pp").unwrap(), |args: &[BigInt]| match args {
            [a, b] => BigInt::from(2) * a == b * (b + BigInt::from(1)),
            _ => false,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{ident, parse_aexpr, parse_assert, parse_condition};

    fn g(s: &str) -> Valuation {
        s.parse().unwrap()
    }

    #[test]
    fn af_total_examples() {
        assert_eq!(af_total(&g("x=3"), &parse_aexpr("x + 4").unwrap()), 7.into());
        assert_eq!(af_total(&g(""), &parse_aexpr("z + z").unwrap()), 0.into());
        let args = [parse_aexpr("y").unwrap(), parse_aexpr("x").unwrap()];
        assert_eq!(
            lf_total(&g("y=3,x=2"), &args),
            vec![BigInt::from(3), BigInt::from(2)]
        );
    }

    #[test]
    fn a_subst_examples() {
        let xp1 = parse_aexpr("x + 1").unwrap();
        assert_eq!(
            a_subst(&parse_assert("pp(y,x)").unwrap(), &ident("x"), &xp1),
            parse_assert("pp(y,x+1)").unwrap()
        );
        // The chained substitution behind the sum program's loop-body condition.
        let inv = parse_assert("le(x,n) /\\ pp(y,x)").unwrap();
        let step1 = a_subst(&inv, &ident("y"), &parse_aexpr("x + y").unwrap());
        let step2 = a_subst(&step1, &ident("x"), &xp1);
        assert_eq!(step2, parse_assert("le(x+1,n) /\\ pp(x+1+y, x+1)").unwrap());
        assert_eq!(
            a_subst(
                &parse_assert("x < y").unwrap(),
                &ident("y"),
                &parse_aexpr("3").unwrap()
            ),
            parse_assert("x < 3").unwrap()
        );
    }

    #[test]
    fn a_subst_identity_when_absent() {
        let a = parse_assert("le(x,n) /\\ ~ y < 3").unwrap();
        assert_eq!(a_subst(&a, &ident("z"), &parse_aexpr("x + 1").unwrap()), a);
    }

    #[test]
    fn i_a_examples() {
        let m = builtin_pred_env();
        assert!(i_a(&m, &g(""), &parse_assert("1 < 2").unwrap()));
        // pp(3, 2): 2*3 = 2*(2+1).
        assert!(i_a(&m, &g("y=3,x=2"), &parse_assert("pp(y,x)").unwrap()));
        // le(5, 3) fails.
        assert!(!i_a(&m, &g("x=5,n=3"), &parse_assert("le(x,n)").unwrap()));
    }

    #[test]
    fn i_a_is_structural() {
        let m = builtin_pred_env();
        let gv = g("x=1");
        for a in ["0 < 1", "0 < 0", "x < 1", "pp(x,x)"] {
            let a = parse_assert(a).unwrap();
            assert_eq!(i_a(&m, &gv, &Assert::not(a.clone())), !i_a(&m, &gv, &a));
            for b in ["0 < 1", "0 < 0"] {
                let b = parse_assert(b).unwrap();
                assert_eq!(
                    i_a(&m, &gv, &Assert::conj(a.clone(), b.clone())),
                    i_a(&m, &gv, &a) && i_a(&m, &gv, &b)
                );
            }
        }
    }

    #[test]
    fn i_c_examples() {
        let m = builtin_pred_env();
        let false_to_a = Condition::imp(Assert::false_assert(), parse_assert("x < 0").unwrap());
        assert!(i_c(&m, &g("x=7"), &false_to_a));
        let true_to_false = Condition::imp(Assert::true_assert(), Assert::false_assert());
        assert!(!i_c(&m, &g(""), &true_to_false));
        let ident_imp = parse_condition("le(x,n) -> le(x,n)").unwrap();
        assert!(i_c(&m, &g("x=0,n=1"), &ident_imp));
    }

    #[test]
    fn builtin_preds() {
        let m = builtin_pred_env();
        assert!(f_p(&m, &ident("le"))(&[1.into(), 2.into()]));
        assert!(!f_p(&m, &ident("pp"))(&[3.into(), 3.into()]));
        // Arity mismatch yields false.
        assert!(!f_p(&m, &ident("le"))(&[1.into()]));
        // Unbound names denote the constantly-true predicate.
        assert!(f_p(&m, &ident("mystery"))(&[]));
    }

    #[test]
    fn valid_sampled_examples() {
        let m = builtin_pred_env();
        let a = parse_assert("pp(y,x)").unwrap();
        let refl = Condition::imp(a.clone(), a);
        let samples = vec![g(""), g("x=1,y=5"), g("x=-2,y=3")];
        assert_eq!(valid_sampled(&m, &refl, &samples), Verdict::NoCounterexample);

        let c = parse_condition("0 < 1 -> x < 0").unwrap();
        let samples = vec![g("x=0")];
        match valid_sampled(&m, &c, &samples) {
            Verdict::Counterexample(w) => assert_eq!(w.get(&ident("x")), 0.into()),
            v => panic!("expected counterexample, got {v:?}"),
        }
    }

    #[test]
    fn env_overlay_examples() {
        use crate::concrete::{env_overlay, Env};
        let gv = g("x=9,z=5");
        let r: Env = "x=1".parse().unwrap();
        let f = env_overlay(&r, &gv);
        assert_eq!(f.get(&ident("x")), 1.into());
        assert_eq!(f.get(&ident("z")), 5.into());
        assert_eq!(f.get(&ident("unbound")), 0.into());
        let dup: Env = "x=1,x=3".parse().unwrap();
        assert_eq!(env_overlay(&dup, &gv).get(&ident("x")), 1.into());
        assert_eq!(env_overlay(&Env::new(), &gv).get(&ident("z")), 5.into());
    }
}
