//! Command-line front end: analyze builds factor tables and emits mass
//! reports, verify runs the inequality and mu-bound harnesses, tuples
//! renders the admissible-profile enumerations.
//!
//! Exit codes: 0 success, 2 violation found, 3 input rejected, 4 factoring
//! budget exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::Ratio;

use lcmlab::experiments::{
    self, reports_to_csv, reports_to_json, BoundReport, ExperimentConfig,
};
use lcmlab::poly::Polynomial;
use lcmlab::tuples::{self, AdmissibilityFilter};
use lcmlab::valuation::{default_cutoff_grid, format_ratio, parse_ratio, TableStore};
use lcmlab::{zerosum, Error};

const EXIT_VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(name = "lcmlab", version, about = "Prime anatomy of consecutive polynomial values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor f(1..N), cache the table, and report the log masses
    Analyze(AnalyzeArgs),
    /// Run a theorem or lemma harness; nonzero exit on violations
    Verify(VerifyArgs),
    /// Enumerate admissible valuation profiles and their extremal stats
    Tuples(TuplesArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Polynomial: symbolic "X^4-2" or coefficient list "-2,0,0,0,1"
    #[arg(long)]
    poly: Option<String>,
    /// N, or a strictly increasing comma-separated grid "500,1000,2000"
    #[arg(long = "N")]
    n: String,
    /// Cutoff c (primes <= floor(cN) are small); integer or fraction "3/2"
    #[arg(long)]
    c: Option<String>,
    /// Factor-table cache directory (env LCMLAB_CACHE as fallback)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Pollard-rho iteration budget per composite
    #[arg(long, default_value_t = 1u64 << 24)]
    rho_budget: u64,
    /// Prime budget for the irreducibility witness scan
    #[arg(long, default_value_t = 10_000)]
    witness_budget: u64,
    /// Proceed when irreducibility cannot be certified (e.g. X^4+1)
    #[arg(long)]
    allow_unknown: bool,
    /// Proceed with a provably reducible polynomial
    #[arg(long)]
    allow_reducible: bool,
    /// Worker thread cap
    #[arg(long)]
    jobs: Option<usize>,
    /// Suppress the timestamp header for byte-identical reruns
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LemmaKind {
    Algnt,
    Sah,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Theorem harness: 2 (lcm vs primes > 2N), 3 (radical, generic u),
    /// 4 (radical, X^{2^eta}+1)
    #[arg(long, conflicts_with = "lemma")]
    theorem: Option<u32>,
    /// Lemma harness: algnt (mu_p <= u-1 above 2N) or sah (mu_{p^nu} <= d-nu)
    #[arg(long, value_enum)]
    lemma: Option<LemmaKind>,
    /// Override the pairing-derived u
    #[arg(long)]
    u: Option<u32>,
    /// eta for theorem 4 (f = X^{2^eta}+1)
    #[arg(long)]
    eta: Option<u32>,
    /// Also confirm inequalities with exact big-integer arithmetic (N <= 500)
    #[arg(long)]
    exact: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FilterKind {
    Sah,
    Baierdey,
    Generic,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TupleFormat {
    Text,
    Tree,
    Dot,
}

#[derive(Args)]
struct TuplesArgs {
    #[arg(long, value_enum)]
    filter: FilterKind,
    /// Degree d for the sah and generic filters
    #[arg(long)]
    d: Option<u32>,
    /// eta for the baierdey filter
    #[arg(long)]
    eta: Option<u32>,
    /// u for the generic filter
    #[arg(long)]
    u: Option<u32>,
    #[arg(long, value_enum, default_value_t = TupleFormat::Text)]
    format: TupleFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Tuples(args) => cmd_tuples(args),
    }
}

fn parse_grid(s: &str) -> Result<Vec<u64>, Error> {
    let grid: Vec<u64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("bad N value {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    if grid.is_empty() {
        return Err(Error::Config("empty N grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("N grid must be strictly increasing".into()));
    }
    Ok(grid)
}

fn setup(common: &CommonArgs) -> Result<(TableStore, ExperimentConfig), Error> {
    if let Some(jobs) = common.jobs {
        // a pool may already exist when called twice in-process; that's fine
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let dir = common
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("LCMLAB_CACHE").map(PathBuf::from));
    let mut store = match dir {
        Some(d) => TableStore::with_dir(d),
        None => TableStore::in_memory(),
    };
    store.rho_budget = common.rho_budget;
    let cfg = ExperimentConfig {
        witness_budget: common.witness_budget,
        allow_unknown: common.allow_unknown,
        allow_reducible: common.allow_reducible,
        cutoff_grid: default_cutoff_grid(),
        exact_check: false,
    };
    Ok((store, cfg))
}

fn require_poly(common: &CommonArgs) -> Result<Polynomial, Error> {
    match &common.poly {
        Some(s) => Polynomial::from_str(s),
        None => Err(Error::Config("--poly is required for this command".into())),
    }
}

fn timestamp(common: &CommonArgs) -> Option<u64> {
    if common.no_timestamp {
        None
    } else {
        Some(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    }
}

fn cutoff_or(common: &CommonArgs, default: Ratio<u64>) -> Result<Ratio<u64>, Error> {
    match &common.c {
        Some(s) => parse_ratio(s),
        None => Ok(default),
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<u8, Error> {
    let (store, cfg) = setup(&args.common)?;
    let f = require_poly(&args.common)?;
    experiments::gate_polynomial(&f, &cfg)?;
    let grid = parse_grid(&args.common.n)?;
    let c = cutoff_or(&args.common, Ratio::from_integer(2))?;
    let mut reports: Vec<BoundReport> = Vec::new();
    for &n in &grid {
        let table = store.get_or_build(&f, n, c)?;
        let mass = table.mass_split();
        reports.push(BoundReport {
            poly: f.to_string(),
            n,
            c,
            log_q: mass.log_q,
            log_l: mass.log_l,
            log_ell: mass.log_ell,
            small_mass: mass.small_mass,
            large_mass: mass.large_mass,
            h: None,
            margin: None,
            normalized_gap: None,
            exact_holds: None,
        });
    }
    let ts = timestamp(&args.common);
    let text = match args.format {
        ReportFormat::Csv => reports_to_csv(&reports, ts),
        ReportFormat::Json => reports_to_json(&reports, ts),
    };
    emit(&text, &args.out)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Error> {
    let (store, mut cfg) = setup(&args.common)?;
    cfg.exact_check = args.exact;
    let grid = parse_grid(&args.common.n)?;
    match (args.theorem, args.lemma) {
        (Some(t), None) => verify_theorem(t, &args, grid, &cfg, &store),
        (None, Some(l)) => verify_lemma(l, &args, grid, &cfg, &store),
        _ => Err(Error::Config(
            "pass exactly one of --theorem or --lemma".into(),
        )),
    }
}

fn explicit_cutoff(args: &VerifyArgs) -> Result<Option<Ratio<u64>>, Error> {
    args.common.c.as_deref().map(parse_ratio).transpose()
}

fn verify_theorem(
    theorem: u32,
    args: &VerifyArgs,
    grid: Vec<u64>,
    cfg: &ExperimentConfig,
    store: &TableStore,
) -> Result<u8, Error> {
    let mut all_ok = true;
    for &n in &grid {
        let report = match theorem {
            2 => {
                let f = require_poly(&args.common)?;
                experiments::check_theorem2(&f, n, cfg, store)?
            }
            3 => {
                let f = require_poly(&args.common)?;
                experiments::check_theorem3(&f, n, explicit_cutoff(args)?, cfg, store)?
            }
            4 => {
                let eta = args
                    .eta
                    .ok_or_else(|| Error::Config("--eta is required for theorem 4".into()))?;
                experiments::check_theorem4(eta, n, explicit_cutoff(args)?, cfg, store)?
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown theorem {other}; expected 2, 3 or 4"
                )))
            }
        };
        let ok = report.margin_ok() && report.exact_holds != Some(false);
        all_ok &= ok;
        println!(
            "theorem {}: poly={} N={} c={} h={} margin={:.6} large_mass={:.6}{} -> {}",
            theorem,
            report.poly,
            report.n,
            format_ratio(report.c),
            report.h.map(format_ratio).unwrap_or_default(),
            report.margin.unwrap_or(f64::NAN),
            report.large_mass,
            match report.exact_holds {
                Some(true) => " exact=ok",
                Some(false) => " exact=VIOLATED",
                None => "",
            },
            if ok { "ok" } else { "VIOLATION" },
        );
    }
    Ok(if all_ok { 0 } else { EXIT_VIOLATION })
}

fn verify_lemma(
    lemma: LemmaKind,
    args: &VerifyArgs,
    grid: Vec<u64>,
    cfg: &ExperimentConfig,
    store: &TableStore,
) -> Result<u8, Error> {
    let f = require_poly(&args.common)?;
    experiments::gate_polynomial(&f, cfg)?;
    let u = match args.u {
        Some(u) => u,
        None => {
            let mu = zerosum::minimal_u(&zerosum::find_roots(&f)?);
            if !mu.usable && lemma == LemmaKind::Algnt {
                return Err(Error::NoPairingU);
            }
            mu.value
        }
    };
    let c = cutoff_or(&args.common, Ratio::from_integer(2))?;
    let mut all_ok = true;
    for &n in &grid {
        let table = store.get_or_build(&f, n, c)?;
        let report = table.verify_mu_bounds(u.max(2), &cfg.cutoff_grid);
        match lemma {
            LemmaKind::Algnt => {
                let max_mu = table
                    .prime_stats()
                    .iter()
                    .filter(|(p, _)| **p > BigUint::from(2 * n))
                    .map(|(_, st)| st.mu.get(&1).copied().unwrap_or(0))
                    .max()
                    .unwrap_or(0);
                let ok = report.algnt_violations.is_empty();
                all_ok &= ok;
                println!(
                    "algnt: poly={} N={} u={} max mu_p over p>2N: {} (bound {}) violations={} -> {}",
                    f,
                    n,
                    u,
                    max_mu,
                    u - 1,
                    report.algnt_violations.len(),
                    if ok { "ok" } else { "VIOLATION" },
                );
                for (p, mu) in report.algnt_violations.iter().take(10) {
                    println!("    p={p} mu_p={mu}");
                }
            }
            LemmaKind::Sah => {
                let at_c = report
                    .sah_per_cutoff
                    .iter()
                    .find(|(g, _)| *g == c)
                    .map(|(_, v)| v.len());
                let ok = at_c == Some(0);
                all_ok &= ok;
                println!(
                    "sah: poly={} N={} c={} violations={} minimal_free_c={} -> {}",
                    f,
                    n,
                    format_ratio(c),
                    at_c.map(|k| k.to_string())
                        .unwrap_or_else(|| "n/a (c not in grid)".into()),
                    report
                        .minimal_sah_free
                        .map(format_ratio)
                        .unwrap_or_else(|| "none".into()),
                    if ok { "ok" } else { "VIOLATION" },
                );
                for (g, v) in &report.sah_per_cutoff {
                    println!("    c'={}: {} violations", format_ratio(*g), v.len());
                }
            }
        }
    }
    Ok(if all_ok { 0 } else { EXIT_VIOLATION })
}

fn cmd_tuples(args: TuplesArgs) -> Result<u8, Error> {
    let filter = match args.filter {
        FilterKind::Sah => AdmissibilityFilter::sah(
            args.d
                .ok_or_else(|| Error::Config("--d is required for the sah filter".into()))?,
        ),
        FilterKind::Baierdey => AdmissibilityFilter::baier_dey(
            args.eta
                .ok_or_else(|| Error::Config("--eta is required for the baierdey filter".into()))?,
        ),
        FilterKind::Generic => {
            let d = args
                .d
                .ok_or_else(|| Error::Config("--d is required for the generic filter".into()))?;
            let u = args
                .u
                .ok_or_else(|| Error::Config("--u is required for the generic filter".into()))?;
            AdmissibilityFilter::generic_u(d, u)
        }
    };
    match args.format {
        TupleFormat::Tree => print!("{}", tuples::render_tree(&filter)?),
        TupleFormat::Dot => print!("{}", tuples::render_dot(&filter)?),
        TupleFormat::Text => {
            let set = tuples::enumerate(&filter)?;
            for p in &set {
                println!("{p}");
            }
            println!("profiles: {}", set.len());
            println!("max_weight: {}", tuples::max_weight(&filter)?);
            let ratio = tuples::max_weight_over_height(&filter)?;
            println!("max_ratio: {}", format_ratio(ratio));
            if let AdmissibilityFilter::GenericU { d, u } = filter {
                println!("closed_form: {}", tuples::generic_u_exponent(d, u)?);
            }
        }
    }
    Ok(0)
}
