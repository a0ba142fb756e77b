//! `fairdiv bench` runs the four-way comparison over a corpus and writes the
//! CSV report; `fairdiv solve` prints one case's allocations as JSON.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use fairdiv::bench::{
    aggregate, emit_report, generate_synthetic, parse_cases, run_comparison, BenchError,
    GeneratorProfile, IngestOptions, Provenance, RunConfig, POINT_BUDGET,
};
use fairdiv::leximin::{allocate_leximin_with, LeximinState};
use fairdiv::lp::MicroLp;
use fairdiv::mms::{
    allocate_mms34_completed, check_oracle_size, mms_ratio, MmsProfile, ReductionTrace,
};
use fairdiv::{
    allocate_maxsum, allocate_propm, check_propm, utilities, Algorithm, Allocation, Instance,
};

const EXIT_FAILURES: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_AUDIT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fairdiv",
    version,
    about = "Fair division of indivisible goods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare algorithms over a corpus and write results.csv, fig_a..fig_d.csv.
    Bench(BenchArgs),
    /// Solve a single case and print allocations with certificates.
    Solve(SolveArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// JSON case list.
    #[arg(
        long,
        conflicts_with = "synthetic",
        required_unless_present = "synthetic"
    )]
    input: Option<PathBuf>,
    /// Generate this many synthetic cases instead of reading a file.
    #[arg(long)]
    synthetic: Option<usize>,
    #[arg(long, default_value_t = 42, requires = "synthetic")]
    seed: u64,
    /// spliddit, uniform, pairs or fixed-N.
    #[arg(long, default_value = "spliddit", requires = "synthetic")]
    profile: String,
    /// Comma-separated subset of maxsum,leximin,propm,mms34.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "maxsum,leximin,propm,mms34"
    )]
    algorithms: Vec<Algorithm>,
    /// Rescale every valuation row to 1000 points before solving.
    #[arg(long)]
    normalize: bool,
    /// Check the MMS and PROPm guarantees on cases small enough for the exact oracle.
    #[arg(long)]
    oracle_audit: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value = "fairdiv-report")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON case list, or `-` for standard input.
    #[arg(long)]
    input: PathBuf,
    /// Case to solve; defaults to the first.
    #[arg(long)]
    case: Option<String>,
    /// Comma-separated subset of maxsum,leximin,propm,mms34.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "maxsum,leximin,propm,mms34"
    )]
    algorithms: Vec<Algorithm>,
    #[arg(long)]
    normalize: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(args) => bench(args),
        Command::Solve(args) => solve(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                BenchError::Audit(_) => EXIT_AUDIT,
                _ => EXIT_INVALID,
            })
        }
    }
}

fn ingest_options(normalize: bool) -> IngestOptions {
    IngestOptions {
        normalize_total: normalize.then_some(POINT_BUDGET as f64),
    }
}

fn read_input(path: &PathBuf) -> Result<String, BenchError> {
    let io = |source| BenchError::Io {
        path: path.display().to_string(),
        source,
    };
    if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(io)
    } else {
        fs::read_to_string(path).map_err(io)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn bench(args: BenchArgs) -> Result<u8, BenchError> {
    let options = ingest_options(args.normalize);
    let (cases, digest, source, seed) = match (&args.input, args.synthetic) {
        (Some(path), _) => {
            let text = read_input(path)?;
            let cases = parse_cases(&text, &options)?;
            (
                cases,
                sha256_hex(text.as_bytes()),
                format!("file:{}", path.display()),
                None,
            )
        }
        (None, Some(n)) => {
            let profile = GeneratorProfile::named(&args.profile)?;
            let mut cases = generate_synthetic(n, args.seed, &profile)?;
            if let Some(total) = options.normalize_total {
                cases = cases.iter().map(|c| c.normalized(total)).collect();
            }
            let canonical = serde_json::to_vec(&cases).expect("instances serialize");
            let source = format!("synthetic:{n}:{}", profile.name);
            (cases, sha256_hex(&canonical), source, Some(args.seed))
        }
        (None, None) => unreachable!("clap requires an input source"),
    };

    let config = RunConfig {
        algorithms: args.algorithms.clone(),
        oracle_audit: args.oracle_audit,
        workers: args.workers,
    };
    let outcome = match run_comparison(&cases, &config) {
        Err(BenchError::Audit(v)) => {
            fs::create_dir_all(&args.out).ok();
            let bundle = args.out.join("audit_violation.json");
            let json = serde_json::to_string_pretty(&v).expect("violation serializes");
            match fs::write(&bundle, json + "\n") {
                Ok(()) => eprintln!("diagnostic bundle written to {}", bundle.display()),
                Err(e) => eprintln!("could not write {}: {e}", bundle.display()),
            }
            return Err(BenchError::Audit(v));
        }
        other => other?,
    };

    let names: Vec<&str> = args.algorithms.iter().map(|a| a.name()).collect();
    let provenance = Provenance {
        input_digest: digest,
        config: format!(
            "source={source} algorithms={} normalize={} oracle_audit={}",
            names.join(","),
            args.normalize,
            args.oracle_audit
        ),
        seed,
    };
    let report = aggregate(&outcome.results).with_provenance(provenance);
    emit_report(&report, &args.out)?;

    println!(
        "{:<8} {:>6} {:>14} {:>14}",
        "algorithm", "cases", "mean_sum", "mean_min"
    );
    for o in &report.overall {
        println!(
            "{:<8} {:>6} {:>14.6} {:>14.6}",
            o.algorithm.name(),
            o.n_cases,
            o.mean_sum,
            o.mean_min
        );
    }
    if let Some((sum_gap, min_gap)) = report.closeness(Algorithm::Propm, Algorithm::Mms34) {
        println!("propm vs mms34 relative gap: sum {sum_gap:.6}, min {min_gap:.6}");
    }
    println!("report written to {}", args.out.display());

    for f in &outcome.failures {
        eprintln!(
            "failure: {} on case {}: {}",
            f.algorithm, f.case_id, f.message
        );
    }
    Ok(if outcome.failures.is_empty() {
        0
    } else {
        EXIT_FAILURES
    })
}

#[derive(Serialize)]
struct Solved {
    case_id: String,
    n_agents: usize,
    n_items: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    mms: Option<Vec<f64>>,
    results: Vec<SolvedAlgorithm>,
}

#[derive(Serialize)]
struct SolvedAlgorithm {
    algorithm: Algorithm,
    /// Item indices per agent; absent for fractional allocations.
    #[serde(skip_serializing_if = "Option::is_none")]
    bundles: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shares: Option<Vec<Vec<f64>>>,
    utilities: Vec<f64>,
    sum_utility: f64,
    min_utility: f64,
    certificates: Certificates,
}

#[derive(Serialize, Default)]
struct Certificates {
    #[serde(skip_serializing_if = "Option::is_none")]
    propm: Option<fairdiv::PropmCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mms_ratios: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    leximin: Option<LeximinState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mms34_trace: Option<ReductionTrace>,
}

fn solve(args: SolveArgs) -> Result<u8, BenchError> {
    let text = read_input(&args.input)?;
    let cases = parse_cases(&text, &ingest_options(args.normalize))?;
    let inst = match &args.case {
        Some(id) => cases
            .iter()
            .find(|c| &c.case_id == id)
            .ok_or_else(|| BenchError::Config(format!("no case with id {id:?}")))?,
        None => cases
            .first()
            .ok_or_else(|| BenchError::Config("input holds no cases".into()))?,
    };
    let small = check_oracle_size(inst).is_ok();

    let mut failed = false;
    let mut results = Vec::new();
    for &alg in &args.algorithms {
        let mut certificates = Certificates::default();
        let alloc = match alg {
            Algorithm::MaxSum => allocate_maxsum(inst),
            Algorithm::Leximin => match allocate_leximin_with(inst, &MicroLp) {
                Ok((a, state)) => {
                    certificates.leximin = Some(state);
                    a
                }
                Err(e) => {
                    eprintln!("failure: leximin on case {}: {e}", inst.case_id);
                    failed = true;
                    continue;
                }
            },
            Algorithm::Propm => allocate_propm(inst),
            Algorithm::Mms34 => {
                let (a, trace) = allocate_mms34_completed(inst);
                if small {
                    let partial = trace.replay(inst);
                    certificates.mms_ratios =
                        Some(mms_ratio(inst, &partial).expect("size checked"));
                }
                certificates.mms34_trace = Some(trace);
                a
            }
        };
        if alloc.is_integral() {
            certificates.propm = check_propm(inst, &alloc).ok();
        }
        results.push(describe(inst, alg, &alloc, certificates));
    }

    let solved = Solved {
        case_id: inst.case_id.clone(),
        n_agents: inst.n_agents(),
        n_items: inst.n_items(),
        mms: small.then(|| MmsProfile::compute(inst).expect("size checked").values()),
        results,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&solved).expect("result serializes")
    );
    Ok(if failed { EXIT_FAILURES } else { 0 })
}

fn describe(
    inst: &Instance,
    alg: Algorithm,
    alloc: &Allocation,
    certificates: Certificates,
) -> SolvedAlgorithm {
    let u = utilities(inst, alloc).expect("allocation built for this case");
    let integral = alloc.is_integral();
    SolvedAlgorithm {
        algorithm: alg,
        bundles: integral.then(|| alloc.bundles()),
        shares: (!integral).then(|| alloc.shares().to_vec()),
        sum_utility: u.sum().expect("at least one agent"),
        min_utility: u.min().expect("at least one agent"),
        utilities: u.0,
        certificates,
    }
}
