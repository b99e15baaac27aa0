//! Deterministic random generation: structured valuation samples for the
//! validity falsifier, and random ASTs, environments, and programs for the
//! property and acceptance suites.
//!
//! Everything is driven by an explicit seed so runs are reproducible.

use num_bigint::BigInt;

use crate::absint::{AbEnv, Bound, Interval};
use crate::assertions::Valuation;
use crate::concrete::Env;
use crate::syntax::{AExpr, AInstr, Assert, BExpr, Ident, Instr};

/// SplitMix64; small, seedable, and stable across platforms.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    /// Uniform-ish integer in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }

    /// True with probability `num/den`.
    pub fn ratio(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// The default variable pool used by the generators.
pub fn var_pool() -> Vec<Ident> {
    ["x", "y", "z", "n", "m"]
        .iter()
        .map(|s| Ident::new(*s).unwrap())
        .collect()
}

/// A wide random integer: mostly small, sometimes large enough to step
/// outside machine ranges.
pub fn wide_int(rng: &mut Rng) -> BigInt {
    match rng.below(10) {
        0..=5 => BigInt::from(rng.range(-10, 10)),
        6 | 7 => BigInt::from(rng.range(-1_000_000, 1_000_000)),
        8 => BigInt::from(rng.next_u64()) * BigInt::from(rng.range(-1000, 1000)),
        _ => {
            let a = BigInt::from(rng.next_u64());
            let b = BigInt::from(rng.next_u64());
            (a << 64u32) * if rng.ratio(1, 2) { 1 } else { -1 } + b
        }
    }
}

/// Structured samples for validity checking over `vars`: the boundary grid
/// `{-3..3}^k` (or a random slice of it past three variables), followed by
/// `wide` random valuations with wide values.
pub fn structured_valuations(vars: &[Ident], wide: usize, rng: &mut Rng) -> Vec<Valuation> {
    let mut out = Vec::new();
    let k = vars.len();
    if k <= 3 {
        let mut counters = vec![-3i64; k];
        loop {
            let entries = vars
                .iter()
                .cloned()
                .zip(counters.iter().map(|&v| BigInt::from(v)))
                .collect();
            out.push(Valuation::from_entries(entries));
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                counters[i] += 1;
                if counters[i] <= 3 {
                    break;
                }
                counters[i] = -3;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    } else {
        for _ in 0..2048 {
            let entries = vars
                .iter()
                .cloned()
                .map(|x| (x, BigInt::from(rng.range(-3, 3))))
                .collect();
            out.push(Valuation::from_entries(entries));
        }
    }
    for _ in 0..wide {
        let entries = vars.iter().cloned().map(|x| (x, wide_int(rng))).collect();
        out.push(Valuation::from_entries(entries));
    }
    out
}

pub fn gen_aexpr(rng: &mut Rng, vars: &[Ident], depth: u32) -> AExpr {
    if depth == 0 || rng.ratio(1, 2) {
        if !vars.is_empty() && rng.ratio(1, 2) {
            AExpr::Var(rng.pick(vars).clone())
        } else {
            AExpr::num(rng.range(-9, 9))
        }
    } else {
        AExpr::plus(
            gen_aexpr(rng, vars, depth - 1),
            gen_aexpr(rng, vars, depth - 1),
        )
    }
}

pub fn gen_bexpr(rng: &mut Rng, vars: &[Ident], depth: u32) -> BExpr {
    BExpr::Lt(gen_aexpr(rng, vars, depth), gen_aexpr(rng, vars, depth))
}

/// Predicate applications draw from the built-in names plus an unbound one.
pub fn gen_assert(rng: &mut Rng, vars: &[Ident], depth: u32) -> Assert {
    if depth == 0 {
        return match rng.below(2) {
            0 => Assert::Bool(gen_bexpr(rng, vars, 1)),
            _ => gen_pred(rng, vars),
        };
    }
    match rng.below(4) {
        0 => Assert::Bool(gen_bexpr(rng, vars, depth.min(2))),
        1 => Assert::not(gen_assert(rng, vars, depth - 1)),
        2 => Assert::conj(
            gen_assert(rng, vars, depth - 1),
            gen_assert(rng, vars, depth - 1),
        ),
        _ => gen_pred(rng, vars),
    }
}

fn gen_pred(rng: &mut Rng, vars: &[Ident]) -> Assert {
    let (name, arity) = *rng.pick(&[("le", 2), ("pp", 2), ("q", 1), ("q", 0)]);
    let args = (0..arity).map(|_| gen_aexpr(rng, vars, 1)).collect();
    Assert::Pred(Ident::new(name).unwrap(), args)
}

pub fn gen_condition(rng: &mut Rng, vars: &[Ident], depth: u32) -> crate::syntax::Condition {
    crate::syntax::Condition::imp(gen_assert(rng, vars, depth), gen_assert(rng, vars, depth))
}

/// A random bare instruction in the canonical shape the concrete syntax can
/// express: sequences nest to the right only.
pub fn gen_instr(rng: &mut Rng, vars: &[Ident], depth: u32) -> Instr {
    let item = gen_item(rng, vars, depth);
    if depth > 0 && rng.ratio(1, 2) {
        Instr::seq(item, gen_instr(rng, vars, depth - 1))
    } else {
        item
    }
}

fn gen_item(rng: &mut Rng, vars: &[Ident], depth: u32) -> Instr {
    match rng.below(if depth == 0 { 2 } else { 3 }) {
        0 => Instr::Skip,
        1 => Instr::Assign(rng.pick(vars).clone(), gen_aexpr(rng, vars, 2)),
        _ => Instr::while_loop(gen_bexpr(rng, vars, 1), gen_instr(rng, vars, depth - 1)),
    }
}

/// A random annotated instruction in canonical shape: `Prec` wraps
/// non-sequence items only, as in the grammar.
pub fn gen_ainstr(rng: &mut Rng, vars: &[Ident], depth: u32) -> AInstr {
    let item = gen_aitem(rng, vars, depth);
    if depth > 0 && rng.ratio(1, 2) {
        AInstr::seq(item, gen_ainstr(rng, vars, depth - 1))
    } else {
        item
    }
}

fn gen_aitem(rng: &mut Rng, vars: &[Ident], depth: u32) -> AInstr {
    match rng.below(if depth == 0 { 2 } else { 4 }) {
        0 => AInstr::Skip,
        1 => AInstr::Assign(rng.pick(vars).clone(), gen_aexpr(rng, vars, 2)),
        2 => AInstr::prec(
            gen_assert(rng, vars, depth.min(2)),
            gen_aitem(rng, vars, depth - 1),
        ),
        _ => AInstr::while_loop(
            gen_bexpr(rng, vars, 1),
            gen_assert(rng, vars, depth.min(2)),
            gen_ainstr(rng, vars, depth - 1),
        ),
    }
}

/// An environment binding each variable to a small value; with
/// `missing_one`, one variable of the pool may be left unbound to exercise
/// error paths.
pub fn gen_env(rng: &mut Rng, vars: &[Ident], missing_one: bool) -> Env {
    let skip = if missing_one && !vars.is_empty() && rng.ratio(1, 4) {
        Some(rng.below(vars.len() as u64) as usize)
    } else {
        None
    };
    let mut env = Env::new();
    for (k, x) in vars.iter().enumerate() {
        if Some(k) != skip {
            env.bind(x.clone(), rng.range(-10, 10));
        }
    }
    env
}

/// A random program for the interpreter-equivalence suite: depth-bounded
/// sequences of skips, assignments, and while loops whose bodies are short
/// runs of assignments, so any terminating run performs a small number of
/// iterations under environments from `gen_env`.
pub fn gen_equiv_program(rng: &mut Rng, vars: &[Ident], depth: u32) -> Instr {
    let item = gen_equiv_item(rng, vars, depth);
    if depth > 0 && rng.ratio(1, 2) {
        Instr::seq(item, gen_equiv_program(rng, vars, depth - 1))
    } else {
        item
    }
}

fn gen_equiv_item(rng: &mut Rng, vars: &[Ident], depth: u32) -> Instr {
    match rng.below(if depth == 0 { 2 } else { 3 }) {
        0 => Instr::Skip,
        1 => Instr::Assign(rng.pick(vars).clone(), gen_affine(rng, vars)),
        _ => {
            let test = BExpr::Lt(
                AExpr::Var(rng.pick(vars).clone()),
                if rng.ratio(1, 2) {
                    AExpr::Var(rng.pick(vars).clone())
                } else {
                    AExpr::num(rng.range(-10, 10))
                },
            );
            let mut body = Instr::Assign(rng.pick(vars).clone(), gen_affine(rng, vars));
            for _ in 0..rng.below(2) {
                body = Instr::seq(
                    Instr::Assign(rng.pick(vars).clone(), gen_affine(rng, vars)),
                    body,
                );
            }
            Instr::while_loop(test, body)
        }
    }
}

/// A concrete store drawn from inside an interval environment: each
/// variable gets a member of its interval, with infinite sides clipped to a
/// window of width 20.
pub fn sample_env_in_abenv(rng: &mut Rng, l: &AbEnv<Interval>) -> Env {
    let mut env = Env::new();
    for (x, v) in l.iter() {
        let (lo, hi) = match (v.lo(), v.hi()) {
            (Bound::Finite(a), Bound::Finite(b)) => (a.clone(), b.clone()),
            (Bound::Finite(a), _) => (a.clone(), a + 20),
            (_, Bound::Finite(b)) => (b - 20, b.clone()),
            _ => (BigInt::from(-20), BigInt::from(20)),
        };
        let span = (&hi - &lo) + 1;
        let offset = BigInt::from(rng.next_u64()) % &span;
        env.bind(x.clone(), lo + offset);
    }
    env
}

fn gen_affine(rng: &mut Rng, vars: &[Ident]) -> AExpr {
    match rng.below(4) {
        0 => AExpr::num(rng.range(-10, 10)),
        1 => AExpr::Var(rng.pick(vars).clone()),
        2 => AExpr::plus(
            AExpr::Var(rng.pick(vars).clone()),
            AExpr::num(rng.range(-3, 3)),
        ),
        _ => AExpr::plus(
            AExpr::Var(rng.pick(vars).clone()),
            AExpr::Var(rng.pick(vars).clone()),
        ),
    }
}
