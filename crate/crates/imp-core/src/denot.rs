//! Denotational semantics as bounded Kleene iteration.
//!
//! The meaning of a loop is the least fixpoint of its loop functional; here
//! we compute finite approximations by applying the functional `n` times to
//! the everywhere-undefined function. `Done` results are stable as `n`
//! grows, so agreement with the big-step interpreter is testable run by
//! run. A single undefined value would conflate faults with divergence,
//! so the bottom element carries a reason: `Error` for a runtime fault,
//! `Unknown` for not yet determined at this depth.

use crate::concrete::{af, bf, update, Env};
use crate::syntax::{BExpr, Instr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BottomReason {
    Error,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DenotResult {
    Done(Env),
    Bottom(BottomReason),
}

impl DenotResult {
    pub fn is_done(&self) -> bool {
        matches!(self, DenotResult::Done(_))
    }
}

pub type LoopTest<'a> = Box<dyn Fn(&Env) -> Option<bool> + 'a>;
pub type LoopBody<'a> = Box<dyn Fn(&Env) -> DenotResult + 'a>;

/// The test and body making up a loop functional: applying the functional
/// to an approximation `f` yields `if test then bind(body, f) else done`.
pub struct LoopFunctional<'a> {
    pub test: LoopTest<'a>,
    pub body: LoopBody<'a>,
}

/// The `n`-th Kleene approximation of the loop's least fixpoint, evaluated
/// at `r`: the loop functional applied `n` times to the everywhere-Unknown
/// function. Iterative, so deep approximations do not recurse.
pub fn phi_approx(n: u64, phi: &LoopFunctional, r: &Env) -> DenotResult {
    let mut env = r.clone();
    let mut remaining = n;
    loop {
        if remaining == 0 {
            // The minimal element of the approximation chain.
            return DenotResult::Bottom(BottomReason::Unknown);
        }
        match (phi.test)(&env) {
            None => return DenotResult::Bottom(BottomReason::Error),
            Some(false) => return DenotResult::Done(env),
            Some(true) => match (phi.body)(&env) {
                DenotResult::Done(next) => {
                    env = next;
                    remaining -= 1;
                }
                bottom => return bottom,
            },
        }
    }
}

/// Compositional denotational evaluation, with every loop given `fuel`
/// iterations of `phi_approx`.
pub fn ds_fuel(fuel: u64, i: &Instr, r: &Env) -> DenotResult {
    match i {
        Instr::Skip => DenotResult::Done(r.clone()),
        Instr::Assign(x, e) => match af(r, e).and_then(|v| update(r, x, v)) {
            Some(r2) => DenotResult::Done(r2),
            None => DenotResult::Bottom(BottomReason::Error),
        },
        Instr::Seq(i1, i2) => match ds_fuel(fuel, i1, r) {
            DenotResult::Done(r1) => ds_fuel(fuel, i2, &r1),
            bottom => bottom,
        },
        Instr::While(b, body) => {
            let phi = loop_functional(fuel, b, body);
            phi_approx(fuel, &phi, r)
        }
    }
}

/// The loop functional for `while b do i done` whose body is evaluated
/// denotationally with the given fuel.
pub fn loop_functional<'a>(fuel: u64, b: &'a BExpr, body: &'a Instr) -> LoopFunctional<'a> {
    LoopFunctional {
        test: Box::new(move |r| bf(r, b)),
        body: Box::new(move |r| ds_fuel(fuel, body, r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::{exec_fuel, ExecOutcome};
    use crate::syntax::{parse_bare, parse_bexpr};

    fn env(s: &str) -> Env {
        s.parse().unwrap()
    }

    #[test]
    fn zeroth_approximation_is_unknown() {
        let b = parse_bexpr("x < 3").unwrap();
        let body = parse_bare("x := x + 1").unwrap();
        let phi = loop_functional(10, &b, &body);
        assert_eq!(
            phi_approx(0, &phi, &env("x=0")),
            DenotResult::Bottom(BottomReason::Unknown)
        );
    }

    #[test]
    fn count_to_three_needs_four_unfoldings() {
        let b = parse_bexpr("x < 3").unwrap();
        let body = parse_bare("x := x + 1").unwrap();
        let phi = loop_functional(10, &b, &body);
        assert_eq!(phi_approx(4, &phi, &env("x=0")), DenotResult::Done(env("x=3")));
        assert_eq!(
            phi_approx(3, &phi, &env("x=0")),
            DenotResult::Bottom(BottomReason::Unknown)
        );
    }

    #[test]
    fn divergent_loop_is_unknown_at_every_depth() {
        let b = parse_bexpr("0 < 1").unwrap();
        let body = Instr::Skip;
        let phi = loop_functional(10, &b, &body);
        for n in [0, 1, 10, 1000] {
            assert_eq!(
                phi_approx(n, &phi, &Env::new()),
                DenotResult::Bottom(BottomReason::Unknown)
            );
        }
    }

    #[test]
    fn done_is_stable_under_larger_depth() {
        let b = parse_bexpr("x < 3").unwrap();
        let body = parse_bare("x := x + 1").unwrap();
        let phi = loop_functional(10, &b, &body);
        for n in 4..40 {
            assert_eq!(phi_approx(n, &phi, &env("x=0")), DenotResult::Done(env("x=3")));
        }
    }

    #[test]
    fn ds_examples() {
        assert_eq!(ds_fuel(5, &Instr::Skip, &env("x=1")), DenotResult::Done(env("x=1")));
        let sum = parse_bare("while x < n do x:=x+1; y:=x+y done").unwrap();
        assert_eq!(
            ds_fuel(100, &sum, &env("x=0,y=0,n=3")),
            DenotResult::Done(env("x=3,y=6,n=3"))
        );
        let bad = parse_bare("x := 1").unwrap();
        assert_eq!(
            ds_fuel(100, &bad, &Env::new()),
            DenotResult::Bottom(BottomReason::Error)
        );
    }

    #[test]
    fn ds_error_inside_loop() {
        let i = parse_bare("while x < 3 do x := x + z done").unwrap();
        assert_eq!(
            ds_fuel(100, &i, &env("x=0")),
            DenotResult::Bottom(BottomReason::Error)
        );
    }

    #[test]
    fn agrees_with_exec_on_generated_programs() {
        let vars = crate::gen::var_pool();
        let mut rng = crate::gen::Rng::new(0xD5);
        for _ in 0..300 {
            let i = crate::gen::gen_equiv_program(&mut rng, &vars, 5);
            let r = crate::gen::gen_env(&mut rng, &vars, true);
            let budget = 1000;
            let slack = i.loop_nesting();
            let a = exec_fuel(budget, &r, &i);
            let d = ds_fuel(budget + slack, &i, &r);
            match (a, d) {
                (ExecOutcome::Done(r1), DenotResult::Done(r2)) => assert_eq!(r1, r2),
                (ExecOutcome::RuntimeError(_), DenotResult::Bottom(BottomReason::Error)) => {}
                (ExecOutcome::OutOfFuel, DenotResult::Bottom(BottomReason::Unknown)) => {}
                (a, d) => panic!("outcomes disagree on {i} from {r}: {a:?} vs {d:?}"),
            }
        }
    }
}
