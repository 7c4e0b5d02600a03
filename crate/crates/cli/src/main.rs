use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use morrey_cli::config::{from_entries, merge, parse_entries, Entry};
use morrey_cli::{run, CliError};

/// Weighted Morrey–Sobolev moduli on the half-space.
///
/// Every configuration key has a flag of the same name; flags override the
/// file given with `--config`. Output is CSV on standard output unless
/// `--out` is set. On failure a single tab-separated `error` line is written
/// to standard error and the exit status is nonzero.
#[derive(Debug, Parser)]
#[command(name = "morrey", version)]
struct Cli {
    /// theta, certify, omega, hyperbolic or audit (overrides `command`).
    command: Option<String>,

    /// Configuration document (`key = value` lines, `#` comments).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long = "n")]
    n: Option<String>,
    #[arg(long = "gamma", allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long = "p")]
    p: Option<String>,
    /// Comma-separated lower corner; last coordinate is the height.
    #[arg(long = "box_lower", allow_hyphen_values = true)]
    box_lower: Option<String>,
    #[arg(long = "box_upper", allow_hyphen_values = true)]
    box_upper: Option<String>,
    #[arg(long = "cells")]
    cells: Option<String>,
    #[arg(long = "grading")]
    grading: Option<String>,
    #[arg(long = "max_iterations")]
    max_iterations: Option<String>,
    #[arg(long = "stop_rel_energy")]
    stop_rel_energy: Option<String>,
    #[arg(long = "smoothing_epsilon")]
    smoothing_epsilon: Option<String>,
    #[arg(long = "line_search_shrink")]
    line_search_shrink: Option<String>,
    #[arg(long = "warm_start")]
    warm_start: Option<String>,
    #[arg(long = "seed")]
    seed: Option<String>,
    /// inline or sample.
    #[arg(long = "pairs")]
    pairs: Option<String>,
    /// `<x>;<y>`, repeatable; replaces every `pair` line of the file.
    #[arg(long = "pair", allow_hyphen_values = true)]
    pair: Vec<String>,
    #[arg(long = "x", allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long = "y", allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long = "sample_lower", allow_hyphen_values = true)]
    sample_lower: Option<String>,
    #[arg(long = "sample_upper", allow_hyphen_values = true)]
    sample_upper: Option<String>,
    #[arg(long = "sample_count")]
    sample_count: Option<String>,
    /// `<kind> <args…>`, repeatable; replaces every `field` line of the file.
    #[arg(long = "field", allow_hyphen_values = true)]
    field: Vec<String>,
    #[arg(long = "variant")]
    variant: Option<String>,
    /// Output CSV path.
    #[arg(long = "out", value_name = "PATH")]
    out: Option<String>,
}

impl Cli {
    fn flag_entries(&self) -> Vec<Entry> {
        let scalars = [
            ("command", &self.command),
            ("n", &self.n),
            ("gamma", &self.gamma),
            ("p", &self.p),
            ("box_lower", &self.box_lower),
            ("box_upper", &self.box_upper),
            ("cells", &self.cells),
            ("grading", &self.grading),
            ("max_iterations", &self.max_iterations),
            ("stop_rel_energy", &self.stop_rel_energy),
            ("smoothing_epsilon", &self.smoothing_epsilon),
            ("line_search_shrink", &self.line_search_shrink),
            ("warm_start", &self.warm_start),
            ("seed", &self.seed),
            ("pairs", &self.pairs),
            ("x", &self.x),
            ("y", &self.y),
            ("sample_lower", &self.sample_lower),
            ("sample_upper", &self.sample_upper),
            ("sample_count", &self.sample_count),
            ("variant", &self.variant),
            ("out", &self.out),
        ];
        let mut out: Vec<Entry> = scalars.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| Entry::flag(k, v.trim()))).collect();
        out.extend(self.pair.iter().map(|v| Entry::flag("pair", v.trim())));
        out.extend(self.field.iter().map(|v| Entry::flag("field", v.trim())));
        out
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => parse_entries(&std::fs::read_to_string(path)?)?,
        None => Vec::new(),
    };
    let config = from_entries(&merge(file, cli.flag_entries()))?;
    run(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::FAILURE
        }
    }
}
