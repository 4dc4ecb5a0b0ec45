//! `balset`: construct, evaluate, search and certify balanced defining sets.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 invalid input,
//! 3 I/O error, 4 size refused.

mod docs;
mod failure;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use balset_core::construct::construct_for_z;
use balset_core::graphs::{build_pot, build_swp, export_graphs, ExportedGraphs, GraphFormat};
use balset_core::optsearch::{find_optimal, sample_balanced, Budget};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use docs::{parse_swaps, to_json, DefiningSetDocument, PopulationCheck, PopulationDocument, SearchDocument};
use failure::Failure;
use verify::{certify, exact_worst_case, Check};

#[derive(Parser)]
#[command(name = "balset", version, about = "Balanced defining sets under adjacent rank swaps")]
struct Cli {
    /// Worker threads for parallel evaluation (default: all cores)
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the recursive construction at level z (t = 5*2^(z-2) - 1)
    Construct {
        #[arg(long)]
        z: u32,
        /// Output file (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrepancy under a given swap set, or the exact worst case
    #[command(group(ArgGroup::new("mode").required(true).args(["swaps", "worst_case"])))]
    Eval {
        #[arg(long)]
        sets: PathBuf,
        /// JSON array of [i, i+1] pairs; an empty file means no swaps
        #[arg(long)]
        swaps: Option<PathBuf>,
        /// Print a certificate with the worst case and a minimal maximizer
        #[arg(long)]
        worst_case: bool,
        /// Evaluate exactly even above the size limit
        #[arg(long)]
        force_exhaustive: bool,
    },
    /// Find every optimal canonical defining set with t pairs
    Search {
        #[arg(long)]
        t: usize,
        /// Stop after this many seconds; the result is then uncertified
        #[arg(long)]
        time_budget: Option<f64>,
        /// Search above the size limit
        #[arg(long)]
        force_exhaustive: bool,
    },
    /// Run checks and write a certificate; exits 1 if any check fails
    #[command(group(ArgGroup::new("input").required(true).args(["sets", "z", "t"])))]
    Verify {
        #[arg(long)]
        sets: Option<PathBuf>,
        #[arg(long)]
        z: Option<u32>,
        /// Verify a random population of balanced sets with t pairs
        #[arg(long, requires = "samples")]
        t: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Seed for population sampling only
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated checks (default: all but lemma1)
        #[arg(long, value_enum, value_delimiter = ',')]
        checks: Vec<Check>,
        /// Certificate file (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force_exhaustive: bool,
    },
    /// Export the swap graph and the potential graph
    #[command(group(ArgGroup::new("which").required(true).args(["swaps", "minimal_maximizer"])))]
    Graphs {
        #[arg(long)]
        sets: PathBuf,
        #[arg(long)]
        swaps: Option<PathBuf>,
        /// Use the minimal worst-case swap set
        #[arg(long)]
        minimal_maximizer: bool,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        /// Output directory (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force_exhaustive: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn construct(z: u32, out: Option<&Path>) -> Result<u8, Failure> {
    if z < 2 {
        return Err(Failure::Invalid(format!("z must satisfy z >= 2, got {z}")));
    }
    let ds = construct_for_z(z)?;
    emit(out, &to_json(&DefiningSetDocument::from_set(&ds)))?;
    Ok(0)
}

fn eval(sets: &Path, swaps: Option<&Path>, force: bool) -> Result<u8, Failure> {
    let text = read(sets)?;
    let ds = DefiningSetDocument::parse_balanced(&text)?;
    match swaps {
        Some(path) => {
            let i = parse_swaps(&read(path)?, ds.t())?;
            println!("{}", ds.discrepancy(&i)?);
        }
        None => {
            let doc = DefiningSetDocument::parse(&text)?;
            print!("{}", to_json(&certify(&doc, &[], true, force)?));
        }
    }
    Ok(0)
}

fn search(t: usize, time_budget: Option<f64>, force: bool) -> Result<u8, Failure> {
    let time = match time_budget {
        Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(Failure::Invalid(format!("--time-budget must be positive, got {s}"))),
        None => None,
    };
    let r = find_optimal(
        t,
        Budget {
            time,
            force,
            ..Budget::default()
        },
    )?;
    eprintln!(
        "examined {} candidates in {:.2?}{}",
        r.candidates_examined,
        r.wall_time,
        if r.certified { "" } else { " (incomplete)" }
    );
    print!("{}", to_json(&SearchDocument::from_result(&r)));
    Ok(0)
}

struct VerifyArgs {
    sets: Option<PathBuf>,
    z: Option<u32>,
    t: Option<usize>,
    samples: Option<usize>,
    seed: u64,
    checks: Vec<Check>,
    out: Option<PathBuf>,
    force: bool,
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let mut checks = if args.checks.is_empty() {
        Check::DEFAULT.to_vec()
    } else {
        args.checks
    };
    checks.sort();
    checks.dedup();

    if let Some(t) = args.t {
        return verify_population(
            t,
            args.samples.unwrap_or(0),
            args.seed,
            &checks,
            args.out.as_deref(),
            args.force,
        );
    }
    let doc = match (args.sets, args.z) {
        (Some(path), _) => DefiningSetDocument::parse(&read(&path)?)?,
        (None, Some(z)) => {
            if z < 2 {
                return Err(Failure::Invalid(format!("z must satisfy z >= 2, got {z}")));
            }
            DefiningSetDocument::from_set(&construct_for_z(z)?)
        }
        (None, None) => unreachable!("clap requires an input"),
    };
    let cert = certify(&doc, &checks, false, args.force)?;
    emit(args.out.as_deref(), &to_json(&cert))?;
    Ok(if cert.all_hold() { 0 } else { 1 })
}

fn verify_population(
    t: usize,
    samples: usize,
    seed: u64,
    checks: &[Check],
    out: Option<&Path>,
    force: bool,
) -> Result<u8, Failure> {
    if t == 0 {
        return Err(Failure::Invalid("t must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs: Vec<DefiningSetDocument> = (0..samples)
        .map(|_| DefiningSetDocument::from_set(&sample_balanced(t, &mut rng)))
        .collect();
    let certs = docs
        .par_iter()
        .map(|d| certify(d, checks, false, force))
        .collect::<Result<Vec<_>, _>>()?;
    let mut tally = std::collections::BTreeMap::new();
    for &c in checks {
        let passed = certs.iter().filter(|cert| cert.checks[c.name()].holds).count();
        tally.insert(
            c.name().to_string(),
            PopulationCheck {
                holds: passed == certs.len(),
                passed,
                failed: certs.len() - passed,
            },
        );
    }
    let report = PopulationDocument {
        t,
        samples,
        seed,
        checks: tally,
        failures: certs.into_iter().filter(|c| !c.all_hold()).collect(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let ok = report.failures.is_empty();
    emit(out, &to_json(&report))?;
    Ok(if ok { 0 } else { 1 })
}

fn graphs(sets: &Path, swaps: Option<&Path>, format: Format, out: Option<&Path>, force: bool) -> Result<u8, Failure> {
    let ds = DefiningSetDocument::parse_balanced(&read(sets)?)?;
    let i = match swaps {
        Some(path) => parse_swaps(&read(path)?, ds.t())?,
        None => exact_worst_case(&ds, force)?.minimal_maximizer,
    };
    let swp = build_swp(&ds, &i)?;
    let pot = build_pot(&ds, &i)?;
    let format = match format {
        Format::Dot => GraphFormat::Dot,
        Format::Json => GraphFormat::Json,
    };
    let files = match export_graphs(&swp, &pot, format)? {
        ExportedGraphs::Dot { swp, pot } => vec![("swp.dot", swp), ("pot.dot", pot)],
        ExportedGraphs::Json(text) => vec![("graphs.json", text)],
    };
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
            for (name, text) in files {
                let path = dir.join(name);
                fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
            }
        }
        None => {
            for (_, text) in files {
                print!("{text}");
            }
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(usize::from(n))
            .build_global()
            .map_err(|e| Failure::Invalid(format!("--workers: {e}")))?;
    }
    match cli.command {
        Command::Construct { z, out } => construct(z, out.as_deref()),
        Command::Eval {
            sets,
            swaps,
            worst_case: _,
            force_exhaustive,
        } => eval(&sets, swaps.as_deref(), force_exhaustive),
        Command::Search {
            t,
            time_budget,
            force_exhaustive,
        } => search(t, time_budget, force_exhaustive),
        Command::Verify {
            sets,
            z,
            t,
            samples,
            seed,
            checks,
            out,
            force_exhaustive,
        } => verify(VerifyArgs {
            sets,
            z,
            t,
            samples,
            seed,
            checks,
            out,
            force: force_exhaustive,
        }),
        Command::Graphs {
            sets,
            swaps,
            minimal_maximizer: _,
            format,
            out,
            force_exhaustive,
        } => graphs(&sets, swaps.as_deref(), format, out.as_deref(), force_exhaustive),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("balset: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
