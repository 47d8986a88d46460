use clap::{Parser, Subcommand};
use slink_cli::{
    cmd_ds_bound, cmd_form_check, cmd_pretzel_scan, cmd_profile, cmd_signature, Format, Outcome,
};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact link-obstruction toolkit: Fox-calculus boundary obstructions,
/// Seifert form analysis, and Levine-Tristram signatures.
///
/// Matrix arguments accept a built-in name (see the data/ directory of the
/// library crate), a TOML file path, an inline [[..],[..]] literal, or a
/// `a#b` connected sum of those. Roots of unity are written k/m, meaning
/// e^(2*pi*i*k/m).
#[derive(Parser)]
#[command(name = "slink", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the 4-strand pretzel grid and compare the Fox-calculus pipeline
    /// against the closed-form criterion.
    PretzelScan {
        /// Largest twist parameter p (rows 1..=p).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        p_max: u32,
        /// Largest clasp count n (columns 1..=n).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n_max: u32,
    },
    /// Levine-Tristram signature of a Seifert matrix at a root of unity.
    Signature {
        /// Matrix: built-in name, file, inline literal, or a#b sum.
        matrix: String,
        /// Root of unity k/m (k/m in lowest terms, not equal to 1).
        omega: String,
        /// Exact cyclotomic evaluation (the default).
        #[arg(long, conflicts_with = "numeric")]
        exact: bool,
        /// Floating-point evaluation with certified refusal near zero.
        #[arg(long)]
        numeric: bool,
        /// Decimal digits of eigenvalue tolerance in numeric mode.
        #[arg(long, default_value_t = 12)]
        precision: u32,
    },
    /// Doubly-slice-genus lower bound for the Bing double of a knot with the
    /// given Seifert matrix.
    DsBound {
        matrix: String,
        /// `auto` or a comma-separated list of k/m points.
        #[arg(long, default_value = "auto")]
        test_set: String,
        /// Fallback sampling depth for degenerate torsion polynomials.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 24)]
        resolution: u64,
    },
    /// Build the Seifert form, verify its axioms, search for a metabolizer,
    /// and run the hyperbolicity obstruction.
    FormCheck {
        matrix: String,
        /// Symmetry sign of the pairing: +1 or -1.
        #[arg(allow_hyphen_values = true)]
        epsilon: String,
        /// Coefficient bound for the metabolizer search.
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..), default_value_t = 2)]
        bound: i64,
        /// `auto` or a comma-separated list of k/m points.
        #[arg(long, default_value = "auto")]
        test_set: String,
        /// Fallback sampling depth for degenerate torsion polynomials.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 24)]
        resolution: u64,
    },
    /// Piecewise-constant signature profile over the unit circle.
    Profile {
        matrix: String,
        /// Fallback sampling depth for degenerate torsion polynomials.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 24)]
        resolution: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::PretzelScan { p_max, n_max } => cmd_pretzel_scan(*p_max, *n_max, cli.format),
        Command::Signature { matrix, omega, exact: _, numeric, precision } => {
            cmd_signature(matrix, omega, *numeric, *precision, cli.format)
        }
        Command::DsBound { matrix, test_set, resolution } => {
            cmd_ds_bound(matrix, test_set, *resolution, cli.format)
        }
        Command::FormCheck { matrix, epsilon, bound, test_set, resolution } => {
            cmd_form_check(matrix, epsilon, *bound, test_set, *resolution, cli.format)
        }
        Command::Profile { matrix, resolution } => cmd_profile(matrix, *resolution, cli.format),
    };
    match outcome {
        Ok(Outcome { rendered, failed }) => {
            let emitted = match &cli.out {
                Some(path) => std::fs::write(path, &rendered)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout()
                    .write_all(rendered.as_bytes())
                    .map_err(|e| format!("cannot write to stdout: {e}")),
            };
            if let Err(message) = emitted {
                eprintln!("error: {message}");
                return ExitCode::from(2);
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
