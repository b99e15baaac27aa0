//! Hoare-logic derivation checking, weakest-precondition computation,
//! verification-condition generation, and instrumented execution that
//! checks annotations dynamically.

use std::fmt;

use crate::assertions::{a_subst, i_a, PredEnv, Valuation, Verdict};
use crate::concrete::{self, Env, ErrorReason, ExecOutcome, RuntimeError};
use crate::syntax::{AExpr, AInstr, Assert, BExpr, Condition, Ident, Instr, PathStep, PointPath};

/// A derivation tree for the Hoare judgment `{P} i {Q}`, with one
/// constructor per rule of the axiomatic semantics plus the consequence
/// rule. The triple at every node is determined by the node's rule; the
/// checker verifies the side conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoareDerivation {
    /// `{P} skip {P}`.
    Skip { pre: Assert },
    /// `{P[x <- e]} x := e {P}`; `post` stores `P`.
    Assign { post: Assert, var: Ident, expr: AExpr },
    /// `{P} i1 ; i2 {R}` from `{P} i1 {Q}` and `{Q} i2 {R}`.
    Seq { first: Box<HoareDerivation>, second: Box<HoareDerivation> },
    /// `{P} while b do i done {~b /\ P}` from `{b /\ P} i {P}`.
    While { invariant: Assert, test: BExpr, body: Box<HoareDerivation> },
    /// `{P} i {Q}` from `P -> P'`, `{P'} i {Q'}`, and `Q' -> Q`.
    Conseq {
        pre_condition: Condition,
        inner: Box<HoareDerivation>,
        post_condition: Condition,
    },
}

impl HoareDerivation {
    pub fn seq(first: HoareDerivation, second: HoareDerivation) -> Self {
        HoareDerivation::Seq { first: Box::new(first), second: Box::new(second) }
    }

    pub fn while_loop(invariant: Assert, test: BExpr, body: HoareDerivation) -> Self {
        HoareDerivation::While { invariant, test, body: Box::new(body) }
    }

    pub fn conseq(
        pre_condition: Condition,
        inner: HoareDerivation,
        post_condition: Condition,
    ) -> Self {
        HoareDerivation::Conseq {
            pre_condition,
            inner: Box::new(inner),
            post_condition,
        }
    }

    /// The precondition of the triple this node derives.
    pub fn pre(&self) -> Assert {
        match self {
            HoareDerivation::Skip { pre } => pre.clone(),
            HoareDerivation::Assign { post, var, expr } => a_subst(post, var, expr),
            HoareDerivation::Seq { first, .. } => first.pre(),
            HoareDerivation::While { invariant, .. } => invariant.clone(),
            HoareDerivation::Conseq { pre_condition, .. } => pre_condition.hyp.clone(),
        }
    }

    /// The postcondition of the triple this node derives.
    pub fn post(&self) -> Assert {
        match self {
            HoareDerivation::Skip { pre } => pre.clone(),
            HoareDerivation::Assign { post, .. } => post.clone(),
            HoareDerivation::Seq { second, .. } => second.post(),
            HoareDerivation::While { invariant, test, .. } => Assert::conj(
                Assert::not(Assert::Bool(test.clone())),
                invariant.clone(),
            ),
            HoareDerivation::Conseq { post_condition, .. } => post_condition.concl.clone(),
        }
    }

    /// The instruction of the triple this node derives.
    pub fn instr(&self) -> Instr {
        match self {
            HoareDerivation::Skip { .. } => Instr::Skip,
            HoareDerivation::Assign { var, expr, .. } => Instr::Assign(var.clone(), expr.clone()),
            HoareDerivation::Seq { first, second } => Instr::seq(first.instr(), second.instr()),
            HoareDerivation::While { test, body, .. } => {
                Instr::while_loop(test.clone(), body.instr())
            }
            HoareDerivation::Conseq { inner, .. } => inner.instr(),
        }
    }
}

/// Address of a node in a derivation tree: the child index at each level.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DerivPath(pub Vec<usize>);

impl fmt::Display for DerivPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("root")?;
        for k in &self.0 {
            write!(f, ".{k}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidReason {
    /// A rule's syntactic side condition does not hold.
    Structural { detail: String },
    /// A consequence condition was refuted by the oracle.
    FailedCondition { condition: Condition, counterexample: Valuation },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationVerdict {
    Valid,
    Invalid { at: DerivPath, reason: InvalidReason },
}

impl DerivationVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, DerivationVerdict::Valid)
    }
}

/// A validity oracle decides (or samples) conditions for the consequence
/// rule; `assertions::valid_sampled` over a fixed sample set is the default.
pub type ValidityOracle<'a> = dyn Fn(&Condition) -> Verdict + 'a;

fn check_rec(
    d: &HoareDerivation,
    oracle: &ValidityOracle,
    path: &mut Vec<usize>,
) -> DerivationVerdict {
    let invalid = |path: &[usize], reason: InvalidReason| DerivationVerdict::Invalid {
        at: DerivPath(path.to_vec()),
        reason,
    };
    let structural = |path: &[usize], detail: String| {
        invalid(path, InvalidReason::Structural { detail })
    };
    match d {
        HoareDerivation::Skip { .. } | HoareDerivation::Assign { .. } => DerivationVerdict::Valid,
        HoareDerivation::Seq { first, second } => {
            if first.post() != second.pre() {
                return structural(
                    path,
                    format!(
                        "sequence assertions do not meet: {} vs {}",
                        first.post(),
                        second.pre()
                    ),
                );
            }
            path.push(0);
            let v = check_rec(first, oracle, path);
            path.pop();
            if !v.is_valid() {
                return v;
            }
            path.push(1);
            let v = check_rec(second, oracle, path);
            path.pop();
            v
        }
        HoareDerivation::While { invariant, test, body } => {
            let want_pre = Assert::conj(Assert::Bool(test.clone()), invariant.clone());
            if body.pre() != want_pre {
                return structural(
                    path,
                    format!("loop body precondition is {}, expected {}", body.pre(), want_pre),
                );
            }
            if body.post() != *invariant {
                return structural(
                    path,
                    format!(
                        "loop body postcondition is {}, expected the invariant {}",
                        body.post(),
                        invariant
                    ),
                );
            }
            path.push(0);
            let v = check_rec(body, oracle, path);
            path.pop();
            v
        }
        HoareDerivation::Conseq { pre_condition, inner, post_condition } => {
            if pre_condition.concl != inner.pre() {
                return structural(
                    path,
                    format!(
                        "consequence does not meet the inner precondition: {} vs {}",
                        pre_condition.concl,
                        inner.pre()
                    ),
                );
            }
            if post_condition.hyp != inner.post() {
                return structural(
                    path,
                    format!(
                        "consequence does not meet the inner postcondition: {} vs {}",
                        post_condition.hyp,
                        inner.post()
                    ),
                );
            }
            for c in [pre_condition, post_condition] {
                if let Verdict::Counterexample(g) = oracle(c) {
                    return invalid(
                        path,
                        InvalidReason::FailedCondition { condition: c.clone(), counterexample: g },
                    );
                }
            }
            path.push(0);
            let v = check_rec(inner, oracle, path);
            path.pop();
            v
        }
    }
}

/// Checks that every node of `d` satisfies its rule's side conditions:
/// syntactic identity for the structural rules, the oracle for the two
/// conditions of each consequence step. Reports the first failing node in
/// pre-order.
pub fn check_derivation(d: &HoareDerivation, oracle: &ValidityOracle) -> DerivationVerdict {
    let mut path = Vec::new();
    check_rec(d, oracle, &mut path)
}

/// The precondition of an annotated instruction for a given postcondition:
/// declared annotations win, everything else is computed backward.
pub fn pc(i: &AInstr, post: &Assert) -> Assert {
    match i {
        AInstr::Prec(a, _) => a.clone(),
        AInstr::While(_, a, _) => a.clone(),
        AInstr::Skip => post.clone(),
        AInstr::Assign(x, e) => a_subst(post, x, e),
        AInstr::Seq(i1, i2) => pc(i1, &pc(i2, post)),
    }
}

/// Collects the conditions a Hoare proof of `{pc(i, post)} i {post}` would
/// have to discharge, in the order the backward traversal emits them.
///
/// ```
/// use imp_core::hoare::vcg;
/// use imp_core::syntax::{parse_assert, parse_instr};
///
/// let i = parse_instr("while x < n do [le(x,n) /\\ pp(y,x)] x:=x+1; y:=x+y done").unwrap();
/// let conds = vcg(&i, &parse_assert("pp(y,n)").unwrap());
/// assert_eq!(conds.len(), 2);
/// assert_eq!(conds[0].to_string(),
///     "~ x < n /\\ le ( x , n ) /\\ pp ( y , x ) -> pp ( y , n )");
/// ```
pub fn vcg(i: &AInstr, post: &Assert) -> Vec<Condition> {
    match i {
        AInstr::Skip | AInstr::Assign(..) => Vec::new(),
        AInstr::Prec(a, i) => {
            let mut out = vec![Condition::imp(a.clone(), pc(i, post))];
            out.extend(vcg(i, post));
            out
        }
        AInstr::Seq(i1, i2) => {
            let mut out = vcg(i2, post);
            out.extend(vcg(i1, &pc(i2, post)));
            out
        }
        AInstr::While(e, a, i) => {
            let mut out = vec![
                Condition::imp(
                    Assert::conj(Assert::not(Assert::Bool(e.clone())), a.clone()),
                    post.clone(),
                ),
                Condition::imp(
                    Assert::conj(Assert::Bool(e.clone()), a.clone()),
                    pc(i, a),
                ),
            ];
            out.extend(vcg(i, a));
            out
        }
    }
}

/// A failed annotation check: the program point and the assertion that did
/// not hold there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub at: PointPath,
    pub assertion: Assert,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.at, self.assertion)
    }
}

/// One annotation check performed during an instrumented run: where, what
/// was checked, the valuation it was checked under, and whether it held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRecord {
    pub at: PointPath,
    pub assertion: Assert,
    pub valuation: Valuation,
    pub holds: bool,
}

struct Checked<'a> {
    m: &'a PredEnv,
    g: &'a Valuation,
    fuel: u64,
    checks: Vec<CheckRecord>,
}

impl Checked<'_> {
    fn check(&mut self, a: &Assert, env: &Env, path: &[PathStep]) {
        let overlay = concrete::env_overlay(env, self.g);
        let holds = i_a(self.m, &overlay, a);
        self.checks.push(CheckRecord {
            at: PointPath(path.to_vec()),
            assertion: a.clone(),
            valuation: overlay,
            holds,
        });
    }

    fn run(
        &mut self,
        i: &AInstr,
        env: Env,
        path: &mut Vec<PathStep>,
    ) -> Result<Env, Halt> {
        match i {
            AInstr::Prec(a, body) => {
                self.check(a, &env, path);
                path.push(PathStep::PrecBody);
                let out = self.run(body, env, path);
                path.pop();
                out
            }
            AInstr::Skip => Ok(env),
            AInstr::Assign(x, e) => {
                let v = concrete::af_checked(&env, e).map_err(|name| {
                    Halt::error(ErrorReason::UnboundRead(name), path)
                })?;
                concrete::update(&env, x, v)
                    .ok_or_else(|| Halt::error(ErrorReason::UnboundWrite(x.clone()), path))
            }
            AInstr::Seq(i1, i2) => {
                path.push(PathStep::SeqFirst);
                let env = self.run(i1, env, path)?;
                path.pop();
                path.push(PathStep::SeqSecond);
                let env = self.run(i2, env, path)?;
                path.pop();
                Ok(env)
            }
            AInstr::While(b, inv, body) => {
                let mut env = env;
                loop {
                    // The invariant is due at entry and after each iteration.
                    self.check(inv, &env, path);
                    match concrete::bf_checked(&env, b).map_err(|name| {
                        Halt::error(ErrorReason::UnboundRead(name), path)
                    })? {
                        false => return Ok(env),
                        true => {
                            if self.fuel == 0 {
                                return Err(Halt::OutOfFuel);
                            }
                            self.fuel -= 1;
                            path.push(PathStep::WhileBody);
                            env = self.run(body, env, path)?;
                            path.pop();
                        }
                    }
                }
            }
        }
    }
}

enum Halt {
    Error(RuntimeError),
    OutOfFuel,
}

impl Halt {
    fn error(reason: ErrorReason, path: &[PathStep]) -> Self {
        Halt::Error(RuntimeError { reason, at: PointPath(path.to_vec()) })
    }
}

/// Executes the bare instruction underneath `i` exactly as `exec_fuel`
/// does, while checking every `Prec` assertion as it is reached and every
/// loop invariant at entry and after each iteration, under the overlay of
/// the current environment over `g`. Violations are collected without
/// stopping the run; this is the dynamic counterpart of checking the
/// generated verification conditions.
pub fn exec_annotated(
    fuel: u64,
    m: &PredEnv,
    g: &Valuation,
    r: &Env,
    i: &AInstr,
) -> (ExecOutcome, Vec<Violation>) {
    let (outcome, checks) = exec_annotated_trace(fuel, m, g, r, i);
    let violations = checks
        .into_iter()
        .filter(|c| !c.holds)
        .map(|c| Violation { at: c.at, assertion: c.assertion })
        .collect();
    (outcome, violations)
}

/// Like `exec_annotated`, but reports every check performed, not just the
/// failures.
pub fn exec_annotated_trace(
    fuel: u64,
    m: &PredEnv,
    g: &Valuation,
    r: &Env,
    i: &AInstr,
) -> (ExecOutcome, Vec<CheckRecord>) {
    let mut state = Checked { m, g, fuel, checks: Vec::new() };
    let mut path = Vec::new();
    let outcome = match state.run(i, r.clone(), &mut path) {
        Ok(env) => ExecOutcome::Done(env),
        Err(Halt::Error(e)) => ExecOutcome::RuntimeError(e),
        Err(Halt::OutOfFuel) => ExecOutcome::OutOfFuel,
    };
    (outcome, state.checks)
}
