use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use foxh::grid::parse_grid;
use foxh::{one_line, run, CliError, Request, Verb};

/// Fox-H densities from the command line.
#[derive(Debug, Parser)]
#[command(name = "foxh", version)]
struct Cli {
    #[arg(value_enum)]
    verb: Verb,
    /// Inline JSON, a file path, `-` for stdin, or a class fixture name.
    #[arg(long)]
    input: Option<String>,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// `min:max:n[:log]`.
    #[arg(long)]
    grid: Option<String>,
    /// Evaluation tolerance; for oracle-compare, the allowed delta.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Highest moment or derivative order.
    #[arg(long)]
    order: Option<usize>,
    /// Number of samples.
    #[arg(long)]
    points: Option<usize>,
}

fn request(cli: &Cli) -> Result<Request, CliError> {
    let max_terms = match std::env::var("FOXH_MAX_TERMS") {
        Ok(v) => Some(
            v.trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("FOXH_MAX_TERMS={v:?} is not a count")))?,
        ),
        Err(_) => None,
    };
    Ok(Request {
        input: cli.input.clone(),
        grid: cli.grid.as_deref().map(parse_grid).transpose()?,
        tol: cli.tol,
        seed: cli.seed,
        order: cli.order,
        points: cli.points,
        max_terms,
    })
}

fn emit(cli: &Cli, body: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Eval(format!("writing output: {e}"));
    match &cli.output {
        Some(path) => std::fs::write(path, body).map_err(io),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(io),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("foxh: {}", one_line(&e.to_string()));
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("bad arguments");
            return fail(&CliError::Parse(first.trim_start_matches("error: ").to_string()));
        }
    };
    let outcome = request(&cli).and_then(|req| run(cli.verb, &req));
    match outcome {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.body) {
                return fail(&e);
            }
            match out.failure {
                Some(e) => fail(&e),
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => fail(&e),
    }
}
