use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use zpgd::radial::fmt_f;
use zpgd::scenario::{
    gallery, run_scenario, EigenConfig, Report, Scenario, ScenarioError, Tolerances,
};
use zpgd::specfun::{find_eigenvalues, DomainCase};

#[derive(Parser)]
#[command(
    name = "zpgd",
    version,
    about = "Radial zero-pressure gas dynamics solutions"
)]
struct Cli {
    /// Multiply every check tolerance by this factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "ZPGD_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, or a bundled one with --example.
    Run {
        #[arg(long, conflicts_with = "example", required_unless_present = "example")]
        config: Option<PathBuf>,
        #[arg(long)]
        example: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the bundled scenarios.
    ListScenarios,
    /// Print Robin eigenvalues as CSV.
    Eigen {
        #[arg(long, value_parser = parse_case)]
        case: DomainCase,
        #[arg(long, default_value_t = 0.0)]
        r_inner: f64,
        #[arg(long)]
        r_outer: f64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        q_inner: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        q_outer: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Run every bundled scenario (or those named) into subdirectories of OUT.
    Verify {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        only: Vec<String>,
    },
}

fn parse_case(s: &str) -> Result<DomainCase, String> {
    match s {
        "ball2d" => Ok(DomainCase::Ball2D),
        "ball3d" => Ok(DomainCase::Ball3D),
        "annulus2d" => Ok(DomainCase::Annulus2D),
        "annulus3d" => Ok(DomainCase::Annulus3D),
        _ => Err(format!(
            "unknown case {s}; expected ball2d, ball3d, annulus2d or annulus3d"
        )),
    }
}

fn summary(report: &Report) {
    for c in &report.checks {
        println!(
            "  {:<28} {:>12.4e} (tol {:.3e}) {}",
            c.name,
            c.value,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
}

fn fail(e: &ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let tol = Tolerances {
        scale: cli.tolerance_scale,
    };
    match cli.command {
        Command::Run {
            config,
            example,
            out,
        } => {
            let scenario = match (config, example) {
                (Some(p), _) => Scenario::load(&p),
                (None, Some(n)) => gallery::load(&n),
                (None, None) => unreachable!("clap requires one"),
            };
            let scenario = match scenario {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            match run_scenario(&scenario, &out, tol) {
                Ok(report) => {
                    println!("{} ({})", report.name, report.mode);
                    summary(&report);
                    println!("report: {}", out.join("run_report.txt").display());
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        eprintln!("error: some checks failed");
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::ListScenarios => {
            for n in gallery::names() {
                let s = gallery::load(n).expect("bundled scenarios parse");
                println!("{n:<24} {:<15} {}", s.mode.name(), s.description);
            }
            ExitCode::SUCCESS
        }
        Command::Eigen {
            case,
            r_inner,
            r_outer,
            epsilon,
            q_inner,
            q_outer,
            count,
        } => {
            let cfg = EigenConfig {
                case,
                r_inner,
                r_outer,
                epsilon,
                q_inner,
                q_outer,
                count,
            };
            let result = cfg
                .problem()
                .and_then(|p| find_eigenvalues(&p, count).map_err(ScenarioError::from));
            match result {
                Ok(list) => {
                    println!("index,root,residual");
                    for (k, (v, r)) in list.values.iter().zip(&list.residuals).enumerate() {
                        println!("{k},{},{}", fmt_f(*v), fmt_f(*r));
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify { out, only } => match verify(&out, &only, tol) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}

fn verify(out: &std::path::Path, only: &[String], tol: Tolerances) -> anyhow::Result<bool> {
    let names: Vec<&str> = if only.is_empty() {
        gallery::names()
    } else {
        only.iter().map(String::as_str).collect()
    };
    let mut ok = true;
    for n in names {
        let s = gallery::load(n).with_context(|| format!("loading {n}"))?;
        let start = std::time::Instant::now();
        match run_scenario(&s, &out.join(n), tol) {
            Ok(r) => {
                let pass = r.passed();
                ok &= pass;
                println!(
                    "{} {n} ({:.1} s)",
                    if pass { "PASS" } else { "FAIL" },
                    start.elapsed().as_secs_f64()
                );
                summary(&r);
            }
            Err(e) => {
                ok = false;
                println!("FAIL {n}: {e}");
            }
        }
    }
    Ok(ok)
}
