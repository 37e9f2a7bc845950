use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use tracemono::ensembles::FamilyKind;
use tracemono::inequalities::CLASS_TOL;
use tracemono::posclass::{classify, Sampler};
use tracemono::suite::{replay_file, run_suite, square_dims, SuiteConfig};
use tracemono::supermap::{MapFamily, SuperMap};

#[derive(Parser)]
#[command(name = "tracemono", version, about = "Randomized checks of trace inequalities for positive maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites and write a JSON report.
    Run {
        /// Comma-separated check ids, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Comma-separated dimensions `2,3,4` (all pairs) or explicit pairs `2x3,3x2`.
        #[arg(long, default_value = "2,3,4")]
        dims: String,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated map families (default: all).
        #[arg(long)]
        families: Option<String>,
        /// Also run maps outside the hypotheses; their failures never set the exit code.
        #[arg(long)]
        force: bool,
    },
    /// Re-evaluate a stored snapshot.
    Replay {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Classify a map (positive, 2-positive, CP, Schwarz, generalized Schwarz).
    Classify {
        /// A serialized map, or a named family such as `{"family": "transpose", "d": 2}`.
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = CLASS_TOL)]
        tol: f64,
    },
}

fn parse_dims(s: &str) -> Result<Vec<(usize, usize)>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    if parts.iter().all(|p| !p.contains('x')) {
        let ds = parts.iter().map(|p| p.parse::<usize>().with_context(|| format!("bad dimension '{p}'"))).collect::<Result<Vec<_>>>()?;
        return Ok(square_dims(&ds));
    }
    parts
        .iter()
        .map(|p| {
            let (a, b) = p.split_once('x').with_context(|| format!("bad dimension pair '{p}'"))?;
            Ok((a.parse()?, b.parse()?))
        })
        .collect()
}

fn list(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn load_map(path: &PathBuf) -> Result<SuperMap> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("family").is_some() {
        let fam: MapFamily = serde_json::from_value(value)?;
        return Ok(fam.build()?);
    }
    Ok(serde_json::from_value(value)?)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run { suite, dims, trials, seed, tol, out, families, force } => {
            let families = match families {
                Some(f) => list(&f).iter().map(|n| FamilyKind::parse(n)).collect::<Result<Vec<_>, _>>()?,
                None => FamilyKind::ALL.to_vec(),
            };
            let config = SuiteConfig {
                suites: list(&suite),
                dims: parse_dims(&dims)?,
                trials,
                master_seed: seed,
                tol_rel: tol,
                families,
                output: out.clone(),
                force_out_of_hypothesis: force,
            };
            let report = run_suite(&config)?;
            for c in &report.checks {
                let worst = c.worst_margin.map_or("-".to_string(), |m| format!("{m:.3e}"));
                println!(
                    "{:<34} {}x{}  {:>5}/{:<5} failures {:<4} exploratory {:<4} worst {}",
                    c.check_id, c.d_in, c.d_out, c.passes, c.trials, c.failures, c.exploratory, worst
                );
            }
            for v in &report.verdicts {
                println!("{:<34} {:?} (expected {:?}) min_eig {:.3e}", v.check_id, v.verdict, v.expected, v.min_eig);
            }
            for s in &report.skipped {
                println!("{:<34} {}x{}  skipped: {}", s.check_id, s.d_in, s.d_out, s.reason);
            }
            let s = &report.summary;
            println!(
                "{} checks, {} trials, {} failures ({} within hypotheses), {} errors, {} unexpected verdicts",
                s.checks, s.trials, s.failures, s.hypothesis_failures, s.errors, s.unexpected_verdicts
            );
            if let Some(path) = out {
                println!("report written to {}", path.display());
            }
            Ok(report.exit_code() as u8)
        }
        Command::Replay { input } => {
            let r = replay_file(&input)?;
            println!("{}", serde_json::to_string_pretty(&serde_json::json!({
                "check_id": r.outcome.check_id,
                "lhs": r.outcome.lhs,
                "rhs": r.outcome.rhs,
                "margin": r.outcome.margin,
                "holds": r.outcome.holds,
                "exploratory": r.outcome.exploratory,
                "matches_stored": r.matches,
            }))?);
            if !r.matches {
                bail!("replayed values differ from the stored ones");
            }
            Ok(0)
        }
        Command::Classify { map, trials, seed, tol } => {
            let map = load_map(&map)?;
            let c = classify(&map, &Sampler::new(seed), trials, tol)?;
            println!("{}", serde_json::to_string_pretty(&c)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
