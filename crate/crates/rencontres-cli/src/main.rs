//! Command-line front end for the derangement toolkit.
//!
//! Exit codes are part of the interface: 0 success, 1 identity failure,
//! 2 usage error, 3 enumeration-horizon refusal, 4 internal inconsistency
//! (unreadable or self-contradictory cache, impossible arithmetic state).

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rencontres_kit::exact::BigNat;
use rencontres_kit::identities::{self, IdentityId, IdentityReport, RangeSpec};
use rencontres_kit::oracle;
use rencontres_kit::sequences::{
    self, derangement_alternating, derangement_subfactorial, derangement_telescoped,
    SequenceCache,
};
use rencontres_kit::Error;

const EXIT_OK: i32 = 0;
const EXIT_IDENTITY_FAILURE: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_HORIZON: i32 = 3;
const EXIT_INTERNAL: i32 = 4;

#[derive(Parser)]
#[command(
    name = "rencontres",
    version,
    about = "Exact derangement and rencontres numbers: compute, tabulate, verify, bench, sample"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Sequence cache file; created on first use, extended as needed.
    #[arg(
        long,
        global = true,
        env = "RENCONTRES_CACHE",
        default_value = "./rencontres.cache",
        value_name = "PATH"
    )]
    cache: PathBuf,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Plain)]
    format: OutputFormat,

    /// Largest n the exhaustive permutation enumerator will attempt.
    #[arg(
        long,
        global = true,
        env = "RENCONTRES_HORIZON",
        default_value_t = oracle::DEFAULT_HORIZON,
        value_name = "N"
    )]
    horizon: usize,

    /// Seed for the deterministic sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Plain,
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one derangement number by the chosen method.
    Compute(ComputeArgs),
    /// Print derangement numbers or the rencontres triangle up to n_max.
    Table(TableArgs),
    /// Evaluate both sides of every identity over a range and report each point.
    Verify(VerifyArgs),
    /// Time each method at the given targets and digest the results.
    Bench(BenchArgs),
    /// Draw uniform random derangements.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Two-term recurrence through the shared cache.
    TwoTerm,
    /// Alternating one-term recurrence.
    Alternating,
    /// Inclusion-exclusion sum of falling factorials.
    Subfactorial,
    /// Telescoped inclusion-exclusion sum (defined from n = 2).
    Telescoped,
    /// Exhaustive enumeration of S_n, capped by the horizon.
    Oracle,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::TwoTerm => "two-term",
            Method::Alternating => "alternating",
            Method::Subfactorial => "subfactorial",
            Method::Telescoped => "telescoped",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    /// Index to compute.
    #[arg(value_name = "N", required_unless_present = "n_flag", conflicts_with = "n_flag")]
    n_pos: Option<usize>,

    /// Flag spelling of the index.
    #[arg(long = "n", value_name = "N")]
    n_flag: Option<usize>,

    #[arg(long, value_enum, default_value_t = Method::TwoTerm)]
    method: Method,
}

impl ComputeArgs {
    fn n(&self) -> usize {
        self.n_pos.or(self.n_flag).expect("clap enforces one spelling")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    /// Two columns: n and the derangement number.
    Derangements,
    /// Triangular rows: n followed by the counts for r = 0..n.
    Rencontres,
}

#[derive(Args)]
struct TableArgs {
    /// Largest index in the table.
    #[arg(value_name = "N_MAX")]
    n_max: usize,

    #[arg(value_enum, default_value_t = TableKind::Derangements)]
    kind: TableKind,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest n to check.
    #[arg(long, default_value_t = 200, value_name = "N_MAX")]
    n_max: usize,

    /// Comma-separated r values for the generalized identities.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,1,2,3",
        value_name = "R,.."
    )]
    r_set: Vec<usize>,

    /// Check a single identity by tag instead of the whole suite.
    #[arg(long, value_name = "TAG")]
    identity: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    /// Indices to benchmark, in ascending order.
    #[arg(value_name = "N", required = true, num_args = 1..)]
    targets: Vec<usize>,
}

#[derive(Args)]
struct SampleArgs {
    /// Size of the permutations to draw (at least 2).
    #[arg(value_name = "N", required_unless_present = "n_flag", conflicts_with = "n_flag")]
    n_pos: Option<usize>,

    /// Flag spelling of the size.
    #[arg(long = "n", value_name = "N")]
    n_flag: Option<usize>,

    /// How many derangements to draw.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
}

impl SampleArgs {
    fn n(&self) -> usize {
        self.n_pos.or(self.n_flag).expect("clap enforces one spelling")
    }
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let config = &cli.config;
    let outcome = match &cli.command {
        Command::Compute(args) => cmd_compute(args, config),
        Command::Table(args) => cmd_table(args, config),
        Command::Verify(args) => cmd_verify(args, config),
        Command::Bench(args) => cmd_bench(args, config),
        Command::Sample(args) => cmd_sample(args, config),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::HorizonExceeded { .. } => EXIT_HORIZON,
        Error::IndexBelowMinimum { .. } => EXIT_USAGE,
        Error::Consistency(_)
        | Error::CacheParse { .. }
        | Error::CacheValidation { .. }
        | Error::Io(_) => EXIT_INTERNAL,
    }
}

/// Loads the cache if the file exists, otherwise starts from the seeds.
/// Returns the entry count found on disk (0 when absent) so callers can
/// tell whether a save is warranted.
fn load_cache(path: &Path) -> Result<(SequenceCache, usize), Error> {
    if path.exists() {
        let cache = SequenceCache::load(path)?;
        let on_disk = cache.derangement_count();
        Ok((cache, on_disk))
    } else {
        Ok((SequenceCache::new(), 0))
    }
}

fn save_if_grown(cache: &SequenceCache, path: &Path, on_disk: usize) -> Result<(), Error> {
    if cache.derangement_count() > on_disk {
        cache.save(path)?;
    }
    Ok(())
}

fn cmd_compute(args: &ComputeArgs, config: &ConfigArgs) -> Result<i32, Error> {
    let n = args.n();
    if args.method == Method::Oracle {
        let census = oracle::enumerate_census(n, config.horizon)?;
        match config.format {
            OutputFormat::Plain => println!("{}", census.derangements()),
            OutputFormat::Csv => print!("{}", census.to_csv()),
            OutputFormat::Jsonl => {
                for (r, count) in census.counts.iter().enumerate() {
                    println!(
                        "{}",
                        serde_json::json!({ "n": n, "r": r, "count": count })
                    );
                }
            }
        }
        return Ok(EXIT_OK);
    }

    let (cache, on_disk) = load_cache(&config.cache)?;
    let value = match args.method {
        Method::TwoTerm => cache.derangement(n),
        Method::Alternating => derangement_alternating(n),
        Method::Subfactorial => derangement_subfactorial(n),
        Method::Telescoped => derangement_telescoped(n)?,
        Method::Oracle => unreachable!("handled above"),
    };
    match config.format {
        OutputFormat::Plain => println!("{value}"),
        OutputFormat::Csv => {
            println!("n,value");
            println!("{n},{value}");
        }
        OutputFormat::Jsonl => println!(
            "{}",
            serde_json::json!({
                "n": n,
                "method": args.method.name(),
                "value": value.to_string(),
            })
        ),
    }
    save_if_grown(&cache, &config.cache, on_disk)?;
    Ok(EXIT_OK)
}

fn cmd_table(args: &TableArgs, config: &ConfigArgs) -> Result<i32, Error> {
    let n_max = args.n_max;
    let (cache, on_disk) = load_cache(&config.cache)?;
    match args.kind {
        TableKind::Derangements => {
            if config.format == OutputFormat::Csv {
                println!("n,derangement");
            }
            for n in 0..=n_max {
                let value = cache.derangement(n);
                match config.format {
                    OutputFormat::Plain | OutputFormat::Csv => println!("{n},{value}"),
                    OutputFormat::Jsonl => println!(
                        "{}",
                        serde_json::json!({ "n": n, "derangement": value.to_string() })
                    ),
                }
            }
        }
        TableKind::Rencontres => {
            if config.format == OutputFormat::Csv {
                let header: Vec<String> = (0..=n_max).map(|r| format!("r{r}")).collect();
                println!("n,{}", header.join(","));
            }
            for n in 0..=n_max {
                let row = cache.rencontres_row(n);
                let counts: Vec<String> = row.values.iter().map(|v| v.to_string()).collect();
                match config.format {
                    OutputFormat::Plain | OutputFormat::Csv => {
                        println!("{n},{}", counts.join(","))
                    }
                    OutputFormat::Jsonl => println!(
                        "{}",
                        serde_json::json!({ "n": n, "counts": counts })
                    ),
                }
            }
        }
    }
    save_if_grown(&cache, &config.cache, on_disk)?;
    Ok(EXIT_OK)
}

fn report_header(format: OutputFormat) {
    if format == OutputFormat::Csv {
        println!("identity_id,n,r,lhs,rhs,holds");
    }
}

fn print_report(report: &IdentityReport, format: OutputFormat) {
    match format {
        OutputFormat::Jsonl => println!("{}", report.to_json_line()),
        OutputFormat::Csv => {
            let r = report.r.map_or(String::new(), |r| r.to_string());
            println!(
                "{},{},{},{},{},{}",
                report.identity_id.tag(),
                report.n,
                r,
                report.lhs,
                report.rhs,
                report.holds
            );
        }
        OutputFormat::Plain => {
            let r = report.r.map_or(String::new(), |r| format!(" r={r}"));
            let verdict = if report.holds { "ok" } else { "FAIL" };
            println!(
                "{} n={}{}: {} == {} {}",
                report.identity_id.tag(),
                report.n,
                r,
                report.lhs,
                report.rhs,
                verdict
            );
        }
    }
}

/// A failed load is reported in the same row shape as the identity
/// checkers, under the reserved tag `cache_recurrence`, so consumers see
/// one uniform stream.
fn print_cache_violation(violation: &sequences::RecurrenceViolation, format: OutputFormat) {
    let (index, actual, expected) = (
        violation.index,
        violation.actual.to_string(),
        violation.expected.to_string(),
    );
    match format {
        OutputFormat::Jsonl => println!(
            "{}",
            serde_json::json!({
                "identity_id": "cache_recurrence",
                "n": index,
                "r": null,
                "lhs": format!("{actual}/1"),
                "rhs": format!("{expected}/1"),
                "holds": false,
            })
        ),
        OutputFormat::Csv => {
            println!("cache_recurrence,{index},,{actual}/1,{expected}/1,false")
        }
        OutputFormat::Plain => {
            println!("cache_recurrence n={index}: {actual}/1 == {expected}/1 FAIL")
        }
    }
}

fn cmd_verify(args: &VerifyArgs, config: &ConfigArgs) -> Result<i32, Error> {
    // Parse and validate the cache by hand rather than through load(), so a
    // tampered file becomes a reported failure instead of a hard error.
    let (cache, on_disk) = if config.cache.exists() {
        let values = sequences::parse_cache_file(&config.cache)?;
        if let Err(violation) = sequences::validate_derangement_prefix(&values) {
            report_header(config.format);
            print_cache_violation(&violation, config.format);
            println!("checked=1 failed=1");
            return Ok(EXIT_IDENTITY_FAILURE);
        }
        let count = values.len();
        (SequenceCache::from_derangements_unchecked(values), count)
    } else {
        (SequenceCache::new(), 0)
    };

    let range = RangeSpec::new(0, args.n_max, args.r_set.clone())?;
    let (reports, notices) = match &args.identity {
        Some(tag) => {
            let Some(id) = IdentityId::from_tag(tag) else {
                eprintln!(
                    "error: unknown identity '{tag}' (expected one of: {})",
                    IdentityId::ALL.map(IdentityId::tag).join(", ")
                );
                return Ok(EXIT_USAGE);
            };
            let mut notices = Vec::new();
            if range.n_min < id.min_n() {
                notices.push(format!(
                    "identity {}: n_min clamped up to {}",
                    id.tag(),
                    id.min_n()
                ));
            }
            (identities::check(id, &cache, &range)?, notices)
        }
        None => {
            let summary = identities::run_all(&cache, &range)?;
            (summary.reports, summary.notices)
        }
    };

    for notice in &notices {
        eprintln!("notice: {notice}");
    }
    report_header(config.format);
    let mut failed = 0usize;
    for report in &reports {
        if !report.holds {
            failed += 1;
        }
        print_report(report, config.format);
    }
    println!("checked={} failed={}", reports.len(), failed);

    save_if_grown(&cache, &config.cache, on_disk)?;
    Ok(if failed > 0 { EXIT_IDENTITY_FAILURE } else { EXIT_OK })
}

fn digest(value: &str) -> String {
    let prefix = &value[..value.len().min(8)];
    format!("{prefix}x{}", value.len())
}

fn cmd_bench(args: &BenchArgs, config: &ConfigArgs) -> Result<i32, Error> {
    if !args.targets.windows(2).all(|pair| pair[0] <= pair[1]) {
        eprintln!("error: bench targets must be given in ascending order");
        return Ok(EXIT_USAGE);
    }
    let (cache, on_disk) = load_cache(&config.cache)?;
    let effective_horizon = config.horizon.min(oracle::MAX_ENUMERABLE);

    if config.format == OutputFormat::Csv {
        println!("n,method,milliseconds,digest");
    }
    for &n in &args.targets {
        for method in [
            Method::TwoTerm,
            Method::Alternating,
            Method::Subfactorial,
            Method::Telescoped,
            Method::Oracle,
        ] {
            if method == Method::Telescoped && n < 2 {
                eprintln!("notice: telescoped skipped at n={n} (defined from n = 2)");
                continue;
            }
            if method == Method::Oracle && n > effective_horizon {
                eprintln!(
                    "notice: oracle skipped at n={n} (enumeration horizon {effective_horizon})"
                );
                continue;
            }
            let start = Instant::now();
            let value = match method {
                Method::TwoTerm => cache.derangement(n),
                Method::Alternating => derangement_alternating(n),
                Method::Subfactorial => derangement_subfactorial(n),
                Method::Telescoped => derangement_telescoped(n)?,
                Method::Oracle => BigNat::from(oracle::enumerate_census(n, config.horizon)?.derangements()),
            };
            let millis = start.elapsed().as_secs_f64() * 1e3;
            let digest = digest(&value.to_string());
            match config.format {
                OutputFormat::Plain => {
                    println!("n={n} method={} time={millis:.3}ms digest={digest}", method.name())
                }
                OutputFormat::Csv => {
                    println!("{n},{},{millis:.3},{digest}", method.name())
                }
                OutputFormat::Jsonl => println!(
                    "{}",
                    serde_json::json!({
                        "n": n,
                        "method": method.name(),
                        "milliseconds": (millis * 1e3).round() / 1e3,
                        "digest": digest,
                    })
                ),
            }
        }
    }
    save_if_grown(&cache, &config.cache, on_disk)?;
    Ok(EXIT_OK)
}

fn cmd_sample(args: &SampleArgs, config: &ConfigArgs) -> Result<i32, Error> {
    let n = args.n();
    let mut rng = oracle::seeded_rng(config.seed);
    for draw in 0..args.count {
        let permutation = oracle::sample_derangement_with(n, &mut rng)?;
        match config.format {
            OutputFormat::Plain => println!("{permutation}"),
            OutputFormat::Csv => {
                if draw == 0 {
                    println!("draw,images");
                }
                println!("{draw},{permutation}");
            }
            OutputFormat::Jsonl => println!(
                "{}",
                serde_json::json!({ "draw": draw, "images": permutation.images() })
            ),
        }
    }
    Ok(EXIT_OK)
}
