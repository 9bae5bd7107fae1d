use std::path::{Path, PathBuf};
use std::process::ExitCode;

use capax_cli::acceptance;
use capax_cli::commands::{self, CapacityArgs, Engine, FamilyArgs, FamilyName};
use capax_cli::spec::DomainSpecFile;
use capax_cli::{parse_k_range, CliError};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "capax", version, about = "Gutt–Hutchings and ECH capacities of toric domains")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    E2p,
    Ribcage,
    Ivr,
}

#[derive(Subcommand)]
enum Cmd {
    /// Gutt–Hutchings capacities c_k for a range of k.
    Capacity {
        #[arg(long)]
        spec: PathBuf,
        /// `a..b` (inclusive) or a single k.
        #[arg(long, default_value = "1..10")]
        k: String,
        #[arg(long, value_enum, default_value = "auto")]
        engine: Engine,
        /// Cross-check every value against the brute-force oracle.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        no_timing: bool,
    },
    /// ECH capacities from the weight expansion.
    Ech {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "1..10")]
        k: String,
        /// Also list the first m weights.
        #[arg(long)]
        weights: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        no_timing: bool,
    },
    /// Build a perturbation family, write its specs and verify its claims.
    Family {
        #[arg(value_enum)]
        name: FamilyName,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 10.0)]
        lambda: f64,
        #[arg(long, default_value_t = 30)]
        k_max: usize,
        /// Directory for `<name>_before.json`, `<name>_after.json` and `<name>_report.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the report to stdout.
        #[arg(long)]
        report: bool,
    },
    /// CSV data for the figures.
    Figure {
        #[arg(value_enum)]
        name: Figure,
        #[arg(long, default_value_t = std::f64::consts::E)]
        a: f64,
        #[arg(long, default_value_t = 123)]
        k: usize,
        /// `lo:hi:step`
        #[arg(long, default_value = "1:8:0.05")]
        p: String,
        #[arg(long, default_value_t = 21)]
        k_max: usize,
        #[arg(long, default_value = "circle")]
        profile: String,
        /// Exponent for `--profile pellipse`.
        #[arg(long)]
        profile_p: Option<f64>,
        #[arg(long, default_value_t = 400)]
        vertices: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite and print one line per criterion.
    VerifyAll {
        /// Only criteria whose number, name or tag matches.
        #[arg(long)]
        filter: Vec<String>,
        /// Multiplies every tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        #[arg(long)]
        no_timing: bool,
    },
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn p_range(s: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Spec(format!("bad p range {s:?}")))?;
    match parts[..] {
        [lo, hi, step] => Ok((lo, hi, step)),
        _ => Err(CliError::Spec(format!("p range must be lo:hi:step, got {s:?}"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Capacity { spec, k, engine, verify, tol, format, no_timing } => {
            let spec = DomainSpecFile::read(&spec)?;
            let args = CapacityArgs { k: parse_k_range(&k)?, engine, verify, tol, timing: !no_timing };
            let rec = commands::cmd_capacity(&spec, &args)?;
            print!("{}", if format == Format::Json { rec.to_json() } else { rec.to_csv() });
        }
        Cmd::Ech { spec, k, weights, format, no_timing } => {
            let spec = DomainSpecFile::read(&spec)?;
            let rec = commands::cmd_ech(&spec, parse_k_range(&k)?, weights, !no_timing)?;
            print!("{}", if format == Format::Json { rec.to_json() } else { rec.to_csv() });
        }
        Cmd::Family { name, j, delta, eps, lambda, k_max, out, report } => {
            let mut args = FamilyArgs::new(name);
            args.j = j.unwrap_or(args.j);
            args.delta = delta.unwrap_or(args.delta);
            args.eps = eps;
            args.lambda = lambda;
            args.k_max = k_max;
            let r = commands::family_report(&args)?;
            let text = serde_json::to_string_pretty(&r).expect("report serialises") + "\n";
            let stem = &r.family;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join(format!("{stem}_before.json")), r.before.canonical())?;
                std::fs::write(dir.join(format!("{stem}_after.json")), r.after.canonical())?;
                std::fs::write(dir.join(format!("{stem}_report.json")), &text)?;
            }
            if report || out.is_none() {
                print!("{text}");
            }
            if !r.pass {
                let failed: Vec<_> = r.checks.iter().filter(|c| !c.pass).map(|c| c.claim.clone()).collect();
                return Err(CliError::Verify(failed.join(", ")));
            }
        }
        Cmd::Figure { name, a, k, p, k_max, profile, profile_p, vertices, out } => {
            let text = match name {
                Figure::E2p => commands::figure_e2p(a, k, p_range(&p)?)?,
                Figure::Ribcage => commands::figure_ribcage(k_max)?,
                Figure::Ivr => commands::figure_ivr(&commands::ivr_profile(&profile, profile_p)?, vertices)?,
            };
            write_or_print(out.as_deref(), &text)?;
        }
        Cmd::VerifyAll { filter, tol_scale, no_timing } => {
            let reports = acceptance::run(&filter, tol_scale);
            for r in &reports {
                println!("{}", acceptance::format_line(r, !no_timing));
            }
            let failed = reports.iter().filter(|r| !r.pass).count();
            println!("{} passed, {failed} failed", reports.len() - failed);
            if failed > 0 {
                return Err(CliError::Verify(format!("{failed} criteria failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    capax_cli::init_threads();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("capax: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
