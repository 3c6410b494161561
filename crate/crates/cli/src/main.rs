use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sprayfin::{analyze, catalog_export, catalog_list, catalog_show, format_claims, spencer, AnalyzeArgs, CliError};
use sprayfin_spencer::{SpencerConfig, DEFAULT_LIMIT};

#[derive(Parser)]
#[command(name = "sprayfin", version, about = "Projective metrizability analysis of sprays")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze a spray file (TOML or JSON) or a catalog entry at sampled points.
    ///
    /// Exit code 0: metrizable, 1: not metrizable, 2: inconclusive, >2: error.
    Analyze {
        input: String,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        /// Relative eigenvalue separation below which points are degenerate.
        #[arg(long)]
        sep_tol: Option<f64>,
        #[arg(long)]
        rank_tol: Option<f64>,
        /// Jet order of the coefficients.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        skip_homogeneity: bool,
        /// Also evaluate the Jacobi identity of the frame brackets.
        #[arg(long)]
        jacobi: bool,
        /// Attach the exact claim table to the report.
        #[arg(long)]
        spencer: bool,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check closed-form symbol and cohomology dimensions by exact elimination.
    ///
    /// Exit code 0 iff every authoritative claim matches.
    Spencer {
        #[arg(long, default_value = "2..4", value_parser = parse_range)]
        n: (usize, usize),
        #[arg(long, default_value = "2..5", value_parser = parse_range)]
        m: (usize, usize),
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest matrix side allowed.
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        /// Skip the rerun with a second eigenvalue seed.
        #[arg(long)]
        no_genericity: bool,
        /// Write the JSON table here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in sprays and frame fixtures.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Show { name: String },
    /// Print the entry as a spray file, or write it with --out.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// `A..B`, `A..=B` (both inclusive) or a single `A`.
fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    let (a, b) = (p(a)?, p(b)?);
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Analyze { input, points, seed, tol, sep_tol, rank_tol, order, threads, skip_homogeneity, jacobi, spencer, out } => {
            let args = AnalyzeArgs {
                input,
                points,
                seed,
                tol,
                sep_rel: sep_tol,
                rank_tol,
                order,
                threads,
                skip_homogeneity,
                jacobi_check: jacobi,
                spencer,
            };
            let report = analyze(&args)?;
            let json = serde_json::to_string_pretty(&report).expect("reports serialize");
            match out {
                Some(p) => write(&p, &json)?,
                None => println!("{json}"),
            }
            let counts: Vec<String> = report.aggregate.verdict_counts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
            eprintln!("{}: {} ({})", report.input.label, report.aggregate.verdict.as_str(), counts.join(", "));
            Ok(report.aggregate.exit_code)
        }
        Cmd::Spencer { n, m, seed, limit, no_genericity, out } => {
            let cfg = SpencerConfig {
                n_min: n.0,
                n_max: n.1,
                m_min: m.0,
                m_max: m.1,
                seed,
                limit,
                genericity: !no_genericity,
                ..SpencerConfig::default()
            };
            let table = spencer(&cfg)?;
            print!("{}", format_claims(&table));
            if let Some(p) = out {
                write(&p, &serde_json::to_string_pretty(&table).expect("tables serialize"))?;
            }
            Ok(if table.all_authoritative_pass { 0 } else { 1 })
        }
        Cmd::Catalog { action } => {
            match action {
                CatalogCmd::List => print!("{}", catalog_list()),
                CatalogCmd::Show { name } => print!("{}", catalog_show(&name)?),
                CatalogCmd::Export { name, out } => {
                    let text = catalog_export(&name)?;
                    match out {
                        Some(p) => write(&p, &text)?,
                        None => print!("{text}"),
                    }
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
