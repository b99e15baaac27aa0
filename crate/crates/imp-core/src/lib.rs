//! Semantics toolkit for a minimal while-loop language.
//!
//! The library provides, over one shared abstract syntax:
//!
//! - `syntax` — ASTs, a concrete-syntax parser, and a pretty-printer;
//! - `concrete` — environments and a fuel-bounded big-step interpreter;
//! - `assertions` — total evaluation under valuations, substitution, and
//!   sampled validity checking of implications;
//! - `hoare` — Hoare-derivation checking, weakest preconditions,
//!   verification-condition generation, and instrumented execution;
//! - `denot` — the denotational semantics as bounded Kleene iteration of
//!   the loop functional;
//! - `absint` — an abstract interpreter over a pluggable domain with an
//!   interval instance, emitting annotated programs;
//! - `gen` — deterministic random generators used for sampling and testing.
//!
//! All values are immutable and all operations are pure functions, so the
//! whole library is safe to use from multiple threads without
//! synchronization.

pub mod absint;
pub mod assertions;
pub mod concrete;
pub mod denot;
pub mod gen;
pub mod hoare;
pub mod syntax;
