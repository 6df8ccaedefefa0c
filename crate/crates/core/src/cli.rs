//! The `apgaps` command line.
//!
//! ```text
//! apgaps tuple find --k 105
//! apgaps tuple check --file tuple.txt
//! apgaps mk compute --k 105 --degree 11
//! apgaps sieve demo --k 2 --X 100000
//! apgaps sieve selftest
//! apgaps bv scan --X 1000000 --M 3 --qmax 100 --regime log-power
//! apgaps gaps scan --X 10000000 --M 7 --a 1 --r 1
//! ```
//!
//! Shared flags: `--out PATH` (a manifest is written to `PATH.manifest.json`),
//! `--threads N`, `--format json|csv` and `--config FILE`, a file of
//! `key = value` lines naming long flags; flags on the command line win.
//! Prime tables are cached in `$APGAPS_CACHE_DIR` when it is set.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on domain errors
//! (including a non-admissible tuple and too few primes for a gap scan).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::experiments::{
    bv_discrepancy_in, gap_scan_in, persist, to_csv, BVScanConfig, GapQuery, GapRecord, DESK_CAP,
};
use crate::primes::PrimeTable;
use crate::sieveweights::{
    config_selftest, multiplicative_identities_selftest, sieve_demo_in, ConfigSelftest, SelftestReport,
    SieveConfig, SieveParams,
};
use crate::tuples::{admissibility_obstruction, narrow_tuple, SearchBudget, Tuple};
use crate::variational::{analytic_mk_bound, maximize_mk, rk_threshold, Regime};

pub const CACHE_ENV: &str = "APGAPS_CACHE_DIR";

#[derive(Parser, Debug, Serialize)]
#[command(name = "apgaps", version, about = "Small gaps between primes in arithmetic progressions")]
#[command(arg_required_else_help = true, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// File of `key = value` defaults for long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Admissible tuples.
    #[command(subcommand)]
    Tuple(TupleCmd),
    /// Lower bounds for M_k.
    #[command(subcommand)]
    Mk(MkCmd),
    /// Sieve weights and sums.
    #[command(subcommand)]
    Sieve(SieveCmd),
    /// Bombieri-Vinogradov discrepancy.
    #[command(subcommand)]
    Bv(BvCmd),
    /// Gaps between primes in a progression.
    #[command(subcommand)]
    Gaps(GapsCmd),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TupleCmd {
    /// Find a narrow admissible k-tuple.
    Find(TupleFindArgs),
    /// Check a tuple file for admissibility.
    Check(TupleCheckArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct TupleFindArgs {
    #[arg(long)]
    pub k: usize,
    /// Candidate budget of the greedy search.
    #[arg(long, default_value_t = 4096)]
    pub budget: usize,
    /// Exact minimum by exhaustive search (k ≤ 12).
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct TupleCheckArgs {
    #[arg(long)]
    pub file: PathBuf,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MkCmd {
    /// Maximize the variational ratio over a polynomial basis.
    Compute(MkArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct MkArgs {
    #[arg(long)]
    pub k: usize,
    /// Basis cap: (1-P1)^a P2^b with a + 2b ≤ degree.
    #[arg(long, default_value_t = 11)]
    pub degree: u32,
    /// Level of distribution used for r_k.
    #[arg(long, default_value_t = 0.4999)]
    pub theta: f64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SieveCmd {
    /// Weights, window sums and main terms for one configuration.
    Demo(DemoArgs),
    /// Exact identity checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct DemoArgs {
    /// Tuple length; a narrow tuple is searched when no file is given.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "X", default_value_t = 100_000)]
    pub x: u64,
    #[arg(long = "M", default_value_t = 1)]
    pub m: u64,
    #[arg(long = "a", default_value_t = 0)]
    pub a: u64,
    #[arg(long)]
    pub tuple_file: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long, default_value_t = 0.49)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.02)]
    pub delta: f64,
    /// W is the product of primes ≤ d0 (default: just above the tuple diameter, at least 3).
    #[arg(long)]
    pub d0: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub pf: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    /// Bound for the squarefree pairs (d, e).
    #[arg(long, default_value_t = 200)]
    pub bound: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BvCmd {
    /// Sum over q of the worst class discrepancy of ψ(X; qM, a).
    Scan(BvArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct BvArgs {
    #[arg(long = "X")]
    pub x: u64,
    #[arg(long = "M", default_value_t = 1)]
    pub m: u64,
    #[arg(long)]
    pub qmax: u64,
    /// log-power, exp-sqrt or power(<theta>).
    #[arg(long, default_value = "log-power", value_parser = parse_regime)]
    pub regime: Regime,
    #[arg(long, default_value_t = 1)]
    pub pf: u64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Exponent A of the reference X / (φ(M) (log X)^A).
    #[arg(long = "A", default_value_t = 1.0)]
    pub a_exponent: f64,
    #[arg(long, default_value_t = DESK_CAP)]
    pub cap: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapsCmd {
    /// Narrowest r+1 consecutive primes ≡ a (mod M) in [X, 2X].
    Scan(GapArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GapArgs {
    #[arg(long = "X")]
    pub x: u64,
    #[arg(long = "M", default_value_t = 1)]
    pub m: u64,
    #[arg(long = "a", default_value_t = 1)]
    pub a: u64,
    #[arg(long, default_value_t = 1)]
    pub r: u64,
    #[arg(long)]
    pub tuple_file: Option<PathBuf>,
    #[arg(long, default_value = "log-power", value_parser = parse_regime)]
    pub regime: Regime,
}

fn parse_regime(s: &str) -> std::result::Result<Regime, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Output of one subcommand before it is written anywhere.
pub struct Outcome {
    pub text: String,
    /// 0, or 2 for a negative answer such as a non-admissible tuple.
    pub status: i32,
    pub message: Option<String>,
    /// Gap records to append to `--out` as CSV instead of replacing it.
    pub append_rows: Option<Vec<GapRecord>>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            status: 0,
            message: None,
            append_rows: None,
        }
    }
}

/// Manifest written next to `--out`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: serde_json::Value,
    pub format: Format,
    pub threads: Option<usize>,
    pub version: &'static str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub output: PathBuf,
    /// SHA-256 of the bytes this run produced.
    pub output_sha256: String,
}

/// Inserts `--key value` for every `key = value` line of the `--config`
/// file whose flag is not already on the command line.
pub fn apply_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let path = strs.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            strs.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    let mut out = argv;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key = value, got `{line}`"),
        })?;
        let flag = format!("--{}", key.trim());
        let present = strs
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match value.trim() {
            "true" => out.push(flag.into()),
            "false" => {}
            v => {
                out.push(flag.into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

/// A prime table up to `limit`, read from or stored in the cache directory.
pub fn cached_table(limit: u64) -> Result<PrimeTable> {
    let limit = limit.max(2);
    let Some(dir) = std::env::var_os(CACHE_ENV) else {
        return PrimeTable::new(limit);
    };
    let path = Path::new(&dir).join(format!("primes-{limit}.bin"));
    if let Ok(file) = std::fs::File::open(&path) {
        if let Ok(t) = PrimeTable::read_from(std::io::BufReader::new(file)) {
            if t.limit() == limit {
                return Ok(t);
            }
        }
    }
    let table = PrimeTable::new(limit)?;
    std::fs::create_dir_all(&dir)?;
    // write then rename so concurrent readers never see a partial image
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    table.write_to(std::io::BufWriter::new(std::fs::File::create(&tmp)?))?;
    std::fs::rename(&tmp, &path)?;
    Ok(table)
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn no_csv(what: &str) -> Error {
    invalid("format", format!("csv output is not available for `{what}`"))
}

fn read_tuple(path: &Path) -> Result<Tuple> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    text.parse()
}

#[derive(Serialize)]
struct TupleRow {
    k: usize,
    diameter: u64,
    offsets: String,
}

#[derive(Serialize)]
struct CheckReport {
    offsets: String,
    k: usize,
    diameter: u64,
    admissible: bool,
    /// A prime all of whose classes are hit.
    obstruction: Option<u64>,
}

#[derive(Serialize)]
struct MkReport {
    k: usize,
    degree: u32,
    lower_bound: f64,
    certified: String,
    eigenvalue: f64,
    theta: f64,
    r_k: u64,
    analytic_bound: f64,
    basis: Vec<String>,
    witness: Vec<f64>,
    pruned: Vec<usize>,
}

#[derive(Serialize)]
struct MkRow {
    k: usize,
    degree: u32,
    lower_bound: f64,
    certified: String,
    r_k: u64,
}

#[derive(Serialize)]
struct SieveSelftest {
    passed: bool,
    identities: SelftestReport,
    configs: Vec<(String, ConfigSelftest)>,
}

fn selftest_configs() -> Vec<(String, SieveParams)> {
    let p = |x, m, a, base: &[i64], d0| SieveParams {
        x_scale: x,
        modulus: m,
        residue: a,
        base: Tuple::new(base).expect("valid tuple"),
        theta: 0.49,
        delta: 0.02,
        d0,
        pf: 1,
    };
    vec![
        ("k=1 M=1 X=10^6".into(), p(1_000_000, 1, 0, &[0], 2)),
        ("k=2 M=1 X=10^5".into(), p(100_000, 1, 0, &[0, 2], 3)),
        ("k=2 M=5 a=2 X=2*10^5".into(), p(200_000, 5, 2, &[0, 2], 3)),
        ("k=3 M=1 X=10^5".into(), p(100_000, 1, 0, &[0, 2, 6], 7)),
    ]
}

/// Runs one parsed command and renders its primary output.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let fmt = cli.format;
    match &cli.command {
        Command::Tuple(TupleCmd::Find(a)) => {
            if a.k == 0 {
                return Err(invalid("k", "must be at least 1"));
            }
            let budget = if a.exhaustive {
                SearchBudget::Exhaustive
            } else {
                SearchBudget::Candidates(a.budget)
            };
            let t = narrow_tuple(a.k, budget);
            let row = TupleRow {
                k: t.len(),
                diameter: t.diameter(),
                offsets: t.to_string(),
            };
            Ok(Outcome::ok(match fmt {
                Format::Json => json(&row)?,
                Format::Csv => to_csv(&[row])?,
            }))
        }
        Command::Tuple(TupleCmd::Check(a)) => {
            if fmt == Format::Csv {
                return Err(no_csv("tuple check"));
            }
            let t = read_tuple(&a.file)?;
            let obstruction = admissibility_obstruction(&t);
            let report = CheckReport {
                offsets: t.to_string(),
                k: t.len(),
                diameter: t.diameter(),
                admissible: obstruction.is_none(),
                obstruction,
            };
            let mut out = Outcome::ok(json(&report)?);
            if let Some(p) = obstruction {
                out.status = 2;
                out.message = Some(format!("not admissible: every class mod {p} is occupied"));
            }
            Ok(out)
        }
        Command::Mk(MkCmd::Compute(a)) => {
            let res = maximize_mk(a.k, a.degree)?;
            let r_k = rk_threshold(res.lower_bound, a.theta)?;
            Ok(Outcome::ok(match fmt {
                Format::Json => json(&MkReport {
                    k: res.k,
                    degree: a.degree,
                    lower_bound: res.lower_bound,
                    certified: res.certified.clone(),
                    eigenvalue: res.eigenvalue,
                    theta: a.theta,
                    r_k,
                    analytic_bound: analytic_mk_bound(a.k as f64),
                    basis: res.basis.iter().map(|b| b.to_string()).collect(),
                    witness: res.witness.clone(),
                    pruned: res.pruned.clone(),
                })?,
                Format::Csv => to_csv(&[MkRow {
                    k: res.k,
                    degree: a.degree,
                    lower_bound: res.lower_bound,
                    certified: res.certified,
                    r_k,
                }])?,
            }))
        }
        Command::Sieve(SieveCmd::Demo(a)) => {
            if fmt == Format::Csv {
                return Err(no_csv("sieve demo"));
            }
            let base = match (&a.tuple_file, a.k) {
                (Some(path), k) => {
                    let t = read_tuple(path)?;
                    if let Some(k) = k {
                        if k != t.len() {
                            return Err(invalid("k", format!("--k {k} but the tuple file has {} offsets", t.len())));
                        }
                    }
                    t
                }
                (None, Some(k)) if k >= 1 => narrow_tuple(k, SearchBudget::default()),
                (None, _) => return Err(invalid("k", "give --k or --tuple-file")),
            };
            let d0 = a.d0.unwrap_or_else(|| (base.diameter() + 1).max(3));
            let params = SieveParams {
                x_scale: a.x,
                modulus: a.m,
                residue: a.a,
                base,
                theta: a.theta,
                delta: a.delta,
                d0,
                pf: a.pf,
            };
            let cfg = SieveConfig::new(&params)?;
            let table = cached_table(cfg.max_shifted())?;
            Ok(Outcome::ok(json(&sieve_demo_in(&params, a.degree, &table)?)?))
        }
        Command::Sieve(SieveCmd::Selftest(a)) => {
            if fmt == Format::Csv {
                return Err(no_csv("sieve selftest"));
            }
            let identities = multiplicative_identities_selftest(a.bound);
            let mut configs = Vec::new();
            for (name, p) in selftest_configs() {
                let cfg = SieveConfig::new(&p)?;
                let r = config_selftest(&cfg, |t| 1.0 - t.iter().sum::<f64>())?;
                configs.push((name, r));
            }
            let passed = identities.passed()
                && configs.iter().all(|(_, c)| {
                    c.round_trip_exact && c.s1_agree && c.ym_identities.iter().all(|i| i.exact)
                });
            let mut out = Outcome::ok(json(&SieveSelftest {
                passed,
                identities,
                configs,
            })?);
            if !passed {
                out.status = 2;
                out.message = Some("identity self-test failed".into());
            }
            Ok(out)
        }
        Command::Bv(BvCmd::Scan(a)) => {
            let cfg = BVScanConfig {
                x_scale: a.x,
                modulus: a.m,
                pf: a.pf,
                q_max: a.qmax,
                regime: a.regime,
                delta: a.delta,
                a_exponent: a.a_exponent,
                cap: a.cap,
            };
            if cfg.x_scale > cfg.cap {
                return Err(Error::LimitAboveCap {
                    limit: cfg.x_scale,
                    cap: cfg.cap,
                });
            }
            if cfg.modulus == 0 {
                return Err(Error::ZeroModulus);
            }
            if cfg.q_max == 0 {
                return Err(invalid("qmax", "must be at least 1"));
            }
            let table = cached_table(cfg.x_scale)?;
            let report = bv_discrepancy_in(&table, &cfg)?;
            Ok(Outcome::ok(match fmt {
                Format::Json => json(&report)?,
                Format::Csv => to_csv(&report.rows)?,
            }))
        }
        Command::Gaps(GapsCmd::Scan(a)) => {
            let mut q = GapQuery::new(a.m, a.a, a.x, a.r);
            q.regime = a.regime;
            if let Some(path) = &a.tuple_file {
                q.tuple_hint = Some(read_tuple(path)?);
            }
            let reach = q.tuple_hint.as_ref().map_or(0, |t| t.diameter() * q.modulus.max(1));
            let table = cached_table(q.hi() + reach)?;
            let rec = gap_scan_in(&table, &q)?;
            Ok(match fmt {
                Format::Json => Outcome::ok(json(&rec)?),
                Format::Csv => Outcome {
                    text: to_csv(std::slice::from_ref(&rec))?,
                    append_rows: Some(vec![rec]),
                    ..Outcome::ok(String::new())
                },
            })
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Tuple(TupleCmd::Find(_)) => "tuple find",
        Command::Tuple(TupleCmd::Check(_)) => "tuple check",
        Command::Mk(_) => "mk compute",
        Command::Sieve(SieveCmd::Demo(_)) => "sieve demo",
        Command::Sieve(SieveCmd::Selftest(_)) => "sieve selftest",
        Command::Bv(_) => "bv scan",
        Command::Gaps(_) => "gaps scan",
    }
}

fn write_output(cli: &Cli, out: &Outcome, path: &Path) -> Result<()> {
    match &out.append_rows {
        Some(rows) => persist(rows, path)?,
        None => std::fs::write(path, &out.text)?,
    }
    let bytes = out.text.as_bytes();
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let manifest = RunManifest {
        subcommand: subcommand_name(&cli.command).to_string(),
        params: serde_json::to_value(&cli.command).map_err(|e| Error::Io(e.to_string()))?,
        format: cli.format,
        threads: cli.threads,
        version: env!("CARGO_PKG_VERSION"),
        timestamp,
        output: path.to_path_buf(),
        output_sha256: hex::encode(Sha256::digest(bytes)),
    };
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    std::fs::write(PathBuf::from(name), json(&manifest)?)?;
    Ok(())
}

/// Parses `argv` (including the program name), runs, and returns the exit status.
pub fn run(argv: Vec<OsString>) -> i32 {
    let argv = match apply_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{}", e.render());
                    0
                }
                _ => {
                    eprint!("{}", e.render());
                    1
                }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let outcome = match pool.install(|| execute(&cli)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let written = match &cli.out {
        Some(path) => write_output(&cli, &outcome, path),
        None => std::io::stdout()
            .write_all(outcome.text.as_bytes())
            .map_err(Error::from),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if let Some(msg) = &outcome.message {
        eprintln!("{msg}");
    }
    outcome.status
}
