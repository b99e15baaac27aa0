//! Command layer for the `imp` binary: each subcommand is a pure function
//! from a `RunConfig` to a report with a fixed exit code, so the behavior
//! is testable without spawning processes.
//!
//! Exit codes: 0 success, 1 parse or configuration error, 2 runtime error,
//! 3 out of fuel, 4 refuted condition or annotation violation.

use serde_json::{json, Value};

use imp_core::absint::{self, AbEnv, Interval};
use imp_core::assertions::{builtin_pred_env, valid_sampled, Valuation, Verdict};
use imp_core::concrete::{exec_fuel, Env, ExecOutcome};
use imp_core::gen::{structured_valuations, Rng};
use imp_core::hoare::{exec_annotated, pc, vcg};
use imp_core::syntax::{parse_assert, parse_bare, parse_instr, Assert, Condition};

/// Seed for the validity sampler; fixed so command output is reproducible.
const SAMPLE_SEED: u64 = 0x1b95_eed5;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_RUNTIME_ERROR: u8 = 2;
pub const EXIT_OUT_OF_FUEL: u8 = 3;
pub const EXIT_REFUTED: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Run,
    Vcg,
    Absint,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Everything a subcommand needs; `program` is the already-loaded source
/// text.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub program: String,
    pub env: String,
    pub abenv: String,
    pub post: Option<String>,
    pub fuel: u64,
    pub samples: usize,
    pub format: Format,
    pub verify: bool,
}

impl RunConfig {
    pub fn new(subcommand: Subcommand, program: impl Into<String>) -> Self {
        RunConfig {
            subcommand,
            program: program.into(),
            env: String::new(),
            abenv: String::new(),
            post: None,
            fuel: 10_000,
            samples: 1000,
            format: Format::Text,
            verify: false,
        }
    }
}

/// A finished command: the exit code, rendered text, the same report as
/// JSON, and any warnings (rendered to stderr by the binary).
#[derive(Debug, Clone)]
pub struct CmdOutput {
    pub exit: u8,
    pub text: String,
    pub json: Value,
    pub warnings: Vec<String>,
}

impl CmdOutput {
    fn usage_error(message: String) -> Self {
        CmdOutput {
            exit: EXIT_USAGE,
            text: format!("error: {message}"),
            json: json!({ "status": "error", "error": message }),
            warnings: Vec::new(),
        }
    }

    pub fn rendered(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable"),
        }
    }
}

pub fn run_command(cfg: &RunConfig) -> CmdOutput {
    match cfg.subcommand {
        Subcommand::Run => cmd_run(cfg),
        Subcommand::Vcg => cmd_vcg(cfg),
        Subcommand::Absint => cmd_absint(cfg),
        Subcommand::Check => cmd_check(cfg),
    }
}

/// Runs a bare program under the big-step interpreter.
pub fn cmd_run(cfg: &RunConfig) -> CmdOutput {
    let program = match parse_bare(&cfg.program) {
        Ok(i) => i,
        Err(e) => return CmdOutput::usage_error(format!("program: {e}")),
    };
    let env: Env = match cfg.env.parse() {
        Ok(env) => env,
        Err(e) => return CmdOutput::usage_error(format!("--env: {e}")),
    };
    match exec_fuel(cfg.fuel, &env, &program) {
        ExecOutcome::Done(out) => CmdOutput {
            exit: EXIT_OK,
            text: out.to_string(),
            json: json!({ "status": "done", "env": out.to_string() }),
            warnings: Vec::new(),
        },
        ExecOutcome::RuntimeError(e) => CmdOutput {
            exit: EXIT_RUNTIME_ERROR,
            text: format!("runtime error: {e}"),
            json: json!({ "status": "runtime-error", "error": e.to_string() }),
            warnings: Vec::new(),
        },
        ExecOutcome::OutOfFuel => CmdOutput {
            exit: EXIT_OUT_OF_FUEL,
            text: format!("out of fuel after {} iterations", cfg.fuel),
            json: json!({ "status": "out-of-fuel", "fuel": cfg.fuel }),
            warnings: Vec::new(),
        },
    }
}

fn unknown_pred_warnings(asserts: &[&Assert]) -> Vec<String> {
    let m = builtin_pred_env();
    let mut warnings = Vec::new();
    for a in asserts {
        for name in a.pred_names() {
            let w = format!("unknown predicate {name} is treated as always true");
            if !m.contains(&name) && !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    warnings
}

/// Checks each condition against the boundary grid plus `samples` wide
/// random valuations over the condition's variables.
fn sample_conditions(conditions: &[Condition], samples: usize) -> Vec<(usize, Valuation)> {
    let m = builtin_pred_env();
    let mut found = Vec::new();
    for (k, c) in conditions.iter().enumerate() {
        let mut rng = Rng::new(SAMPLE_SEED);
        let set = structured_valuations(&c.vars(), samples, &mut rng);
        if let Verdict::Counterexample(g) = valid_sampled(&m, c, &set) {
            found.push((k, g));
        }
    }
    found
}

fn conditions_json(conditions: &[Condition]) -> Value {
    Value::Array(
        conditions
            .iter()
            .map(|c| json!({ "hyp": c.hyp.to_string(), "concl": c.concl.to_string() }))
            .collect(),
    )
}

fn counterexample_json(found: &[(usize, Valuation)]) -> Value {
    match found.first() {
        Some((k, g)) => json!({ "condition": k, "valuation": g.to_string() }),
        None => Value::Null,
    }
}

/// Generates and samples the verification conditions of an annotated
/// program against a postcondition.
pub fn cmd_vcg(cfg: &RunConfig) -> CmdOutput {
    let program = match parse_instr(&cfg.program) {
        Ok(i) => i,
        Err(e) => return CmdOutput::usage_error(format!("program: {e}")),
    };
    let post = match cfg.post.as_deref() {
        Some(text) => match parse_assert(text) {
            Ok(a) => a,
            Err(e) => return CmdOutput::usage_error(format!("--post: {e}")),
        },
        None => return CmdOutput::usage_error("vcg requires --post".into()),
    };

    let pre = pc(&program, &post);
    let conditions = vcg(&program, &post);
    let mut referenced: Vec<&Assert> = vec![&post];
    referenced.extend(conditions.iter().flat_map(|c| [&c.hyp, &c.concl]));
    let warnings = unknown_pred_warnings(&referenced);

    let found = sample_conditions(&conditions, cfg.samples);
    let mut text = format!("pre: {pre}\n");
    for c in &conditions {
        text.push_str(&format!("{c}\n"));
    }
    for (k, g) in &found {
        text.push_str(&format!("counterexample: condition {k} fails at {g}\n"));
    }
    let status = if found.is_empty() { "ok" } else { "counterexample" };
    text.push_str(status);

    CmdOutput {
        exit: if found.is_empty() { EXIT_OK } else { EXIT_REFUTED },
        text,
        json: json!({
            "status": status,
            "pre": pre.to_string(),
            "conditions": conditions_json(&conditions),
            "counterexample": counterexample_json(&found),
        }),
        warnings,
    }
}

/// Runs the abstract interpreter, printing the annotated program and the
/// final assertion; with `verify`, additionally samples the conditions the
/// soundness theorem says must hold.
pub fn cmd_absint(cfg: &RunConfig) -> CmdOutput {
    let program = match parse_bare(&cfg.program) {
        Ok(i) => i,
        Err(e) => return CmdOutput::usage_error(format!("program: {e}")),
    };
    let init: AbEnv<Interval> = match absint::parse_interval_env(&cfg.abenv) {
        Ok(env) => env,
        Err(e) => return CmdOutput::usage_error(format!("--abenv: {e}")),
    };
    let (init, defaulted) = absint::close_over(&program, &init);
    let mut warnings: Vec<String> = defaulted
        .iter()
        .map(|x| format!("variable {x} is not covered by --abenv, assuming any integer"))
        .collect();

    let (annotated, final_env) = match absint::abstract_i(&program, &init) {
        Ok(result) => result,
        Err(e) => return CmdOutput::usage_error(e.to_string()),
    };
    let post = absint::to_a_opt(&final_env);

    let mut text = format!("{annotated}\npost: {post}\n");
    let mut exit = EXIT_OK;
    let mut conditions_field = Value::Null;
    let mut counterexample_field = Value::Null;
    let mut status = "ok";
    if cfg.verify {
        let conditions = vcg(&annotated, &post);
        let found = sample_conditions(&conditions, cfg.samples);
        for c in &conditions {
            text.push_str(&format!("{c}\n"));
        }
        for (k, g) in &found {
            text.push_str(&format!("counterexample: condition {k} fails at {g}\n"));
        }
        if !found.is_empty() {
            exit = EXIT_REFUTED;
            status = "counterexample";
        }
        conditions_field = conditions_json(&conditions);
        counterexample_field = counterexample_json(&found);
        warnings.extend(unknown_pred_warnings(
            &conditions.iter().flat_map(|c| [&c.hyp, &c.concl]).collect::<Vec<_>>(),
        ));
    }
    text.push_str(status);

    CmdOutput {
        exit,
        text,
        json: json!({
            "status": status,
            "annotated": annotated.to_string(),
            "post": post.to_string(),
            "final_env": final_env.as_ref().map(|l| l.to_string()),
            "conditions": conditions_field,
            "counterexample": counterexample_field,
        }),
        warnings,
    }
}

fn annotation_asserts(i: &imp_core::syntax::AInstr) -> Vec<&Assert> {
    use imp_core::syntax::AInstr;
    match i {
        AInstr::Prec(a, i) => {
            let mut out = vec![a];
            out.extend(annotation_asserts(i));
            out
        }
        AInstr::Skip | AInstr::Assign(..) => Vec::new(),
        AInstr::Seq(i1, i2) => {
            let mut out = annotation_asserts(i1);
            out.extend(annotation_asserts(i2));
            out
        }
        AInstr::While(_, inv, body) => {
            let mut out = vec![inv];
            out.extend(annotation_asserts(body));
            out
        }
    }
}

/// Executes an annotated program, checking its annotations along the run.
pub fn cmd_check(cfg: &RunConfig) -> CmdOutput {
    let program = match parse_instr(&cfg.program) {
        Ok(i) => i,
        Err(e) => return CmdOutput::usage_error(format!("program: {e}")),
    };
    let env: Env = match cfg.env.parse() {
        Ok(env) => env,
        Err(e) => return CmdOutput::usage_error(format!("--env: {e}")),
    };
    let warnings = unknown_pred_warnings(&annotation_asserts(&program));
    let m = builtin_pred_env();
    let (outcome, violations) = exec_annotated(cfg.fuel, &m, &Valuation::new(), &env, &program);

    let mut text = String::new();
    for v in &violations {
        text.push_str(&format!("violation at {}: {}\n", v.at, v.assertion));
    }
    let (exit, status) = if !violations.is_empty() {
        (EXIT_REFUTED, "violations")
    } else {
        match &outcome {
            ExecOutcome::Done(_) => (EXIT_OK, "ok"),
            ExecOutcome::RuntimeError(_) => (EXIT_RUNTIME_ERROR, "runtime-error"),
            ExecOutcome::OutOfFuel => (EXIT_OUT_OF_FUEL, "out-of-fuel"),
        }
    };
    let env_field = match &outcome {
        ExecOutcome::Done(out) => {
            text.push_str(&format!("{out}\n"));
            Some(out.to_string())
        }
        ExecOutcome::RuntimeError(e) => {
            text.push_str(&format!("runtime error: {e}\n"));
            None
        }
        ExecOutcome::OutOfFuel => {
            text.push_str(&format!("out of fuel after {} iterations\n", cfg.fuel));
            None
        }
    };
    text.push_str(status);

    CmdOutput {
        exit,
        text,
        json: json!({
            "status": status,
            "env": env_field,
            "violations": violations
                .iter()
                .map(|v| json!({ "at": v.at.to_string(), "assertion": v.assertion.to_string() }))
                .collect::<Vec<_>>(),
        }),
        warnings,
    }
}
