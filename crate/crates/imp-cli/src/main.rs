use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand, ValueEnum};

use imp_cli::{run_command, Format, RunConfig, Subcommand, EXIT_USAGE};

/// Semantics toolkit for a minimal while language: run programs, generate
/// and sample verification conditions, infer interval annotations, and
/// check annotated programs dynamically.
#[derive(Parser)]
#[command(name = "imp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Execute a bare program and print the final environment
    Run(CommonArgs),
    /// Generate verification conditions for an annotated program and
    /// search them for counterexamples
    Vcg(CommonArgs),
    /// Infer interval annotations for a bare program
    Absint(CommonArgs),
    /// Execute an annotated program, checking its assertions along the run
    Check(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Program file, or `-` to read from stdin
    file: Option<String>,

    /// Program text given inline instead of a file
    #[arg(short = 'c', long, conflicts_with = "file")]
    code: Option<String>,

    /// Initial environment, e.g. `x=0,y=0,n=3`
    #[arg(long, default_value = "")]
    env: String,

    /// Initial abstract environment, e.g. `x=[0,0],n=[3,+inf]`;
    /// unlisted program variables default to any integer
    #[arg(long, default_value = "")]
    abenv: String,

    /// Postcondition for verification-condition generation
    #[arg(long)]
    post: Option<String>,

    /// While-loop iteration budget
    #[arg(long, default_value_t = 10_000)]
    fuel: u64,

    /// Random valuations sampled per condition, beyond the boundary grid
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
    samples: u32,

    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// After analysis, sample the generated conditions (absint)
    #[arg(long)]
    verify: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

fn load_program(args: &CommonArgs) -> Result<String, String> {
    if let Some(code) = &args.code {
        return Ok(code.clone());
    }
    match args.file.as_deref() {
        Some("-") => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| format!("stdin: {e}"))?;
            Ok(text)
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
        None => Err("no program given: pass a file, `-`, or --code".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (subcommand, args) = match &cli.command {
        Command::Run(a) => (Subcommand::Run, a),
        Command::Vcg(a) => (Subcommand::Vcg, a),
        Command::Absint(a) => (Subcommand::Absint, a),
        Command::Check(a) => (Subcommand::Check, a),
    };
    let program = match load_program(args) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let format = match args.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    let cfg = RunConfig {
        subcommand,
        program,
        env: args.env.clone(),
        abenv: args.abenv.clone(),
        post: args.post.clone(),
        fuel: args.fuel,
        samples: args.samples as usize,
        format,
        verify: args.verify,
    };
    let out = run_command(&cfg);
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", out.rendered(format));
    ExitCode::from(out.exit)
}
