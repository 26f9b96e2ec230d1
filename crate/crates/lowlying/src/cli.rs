//! Command-line front end. One subcommand per pipeline; flags override a
//! flat `key = value` configuration file, which overrides defaults. Reports
//! land at --output (stdout when unset) as CSV or JSON with the resolved
//! configuration embedded, and identical configuration plus seed always
//! reproduces a report byte for byte.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dirpoly::{
    fourth_moment_integral, grand_density_ratio, grid_split_sweep, heath_brown_check,
    large_sieve_check, random_split_sweep, split_window, CoefKind, SplitSweepSummary,
};
use crate::error::{Error, Result};
use crate::kuznetsov::{density_geometric, omega_star};
use crate::lmfdb::{explicit_formula_check, fetch_forms, ClientConfig, FormKind};
use crate::ntcore::{divisors, gcd_u64, kloosterman, kloosterman_char_expansion, KloostermanQuery};
use crate::report::{self, DensityRow, OutputFormat, RunConfig};
use crate::specfun::zeros::{zero_count, ZeroCountQuery};
use crate::transforms::hplus::{hplus_integral, hplus_series};
use crate::transforms::mellin::{
    mellin_inversion_check, psi_bound_fit, psi_flat_bound_fit, MellinKind, MellinQuery,
};
use crate::transforms::{
    gaussian_weight, make_test_bump, make_test_triangle, TestFunction, WeightFunction,
};

#[derive(Parser)]
#[command(
    name = "lowlying",
    version,
    about = "Trace-formula pipelines: one-level densities, spectral transforms, \
             sieve inequalities, and zero counts"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat `key = value` configuration file; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Seed for every randomized subcommand.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    /// Report destination; stdout when omitted.
    #[arg(long, short = 'o', global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Report format: csv or json.
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,
    /// Never touch the network; serve external data from the cache only.
    #[arg(long, global = true)]
    offline: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Averaged one-level density at prime level from the geometric side.
    Density(DensityArgs),
    /// Kloosterman identities, pointwise bound, and the total-mass cross-check.
    KuznetsovCheck(KuznetsovArgs),
    /// Bessel-transform cross-check: direct integral against the residue series.
    Hplus(HplusArgs),
    /// Kernel-transform decay fits and inversion round trips.
    Mellin(MellinArgs),
    /// Exactness of the K-fold von Mangoldt decomposition.
    HbVerify(HbArgs),
    /// Block-splitting dichotomy sweep, random or exhaustive.
    SplitLemma(SplitArgs),
    /// Mean-value inequality for character sums over random vectors.
    Lsieve(LsieveArgs),
    /// Fourth moment of Dirichlet polynomials over primitive characters.
    FourthMoment(FourthMomentArgs),
    /// Aggregated zero counts against the density-bound envelope.
    GrandDensity(GrandArgs),
    /// Per-character zero counts in a right half-strip box.
    Zeros(ZerosArgs),
    /// Fetch and cache external eigenvalue data.
    Fetch(FetchArgs),
    /// Zero side against prime side for fetched forms.
    ExplicitFormula(ExplicitArgs),
}

#[derive(Args)]
struct DensityArgs {
    /// Prime level(s), comma-separated or repeated.
    #[arg(long = "N", value_delimiter = ',', value_name = "PRIME")]
    n: Vec<u64>,
    /// Support radius of the test function, in (0, 2).
    #[arg(long)]
    sigma: Option<f64>,
    /// Spectral weight id (gaussian).
    #[arg(long)]
    h_id: Option<String>,
    /// Test function id (triangle or bump).
    #[arg(long)]
    phi_id: Option<String>,
    /// Modulus cap as a multiple of the level.
    #[arg(long)]
    c_max_multiplier: Option<u64>,
}

#[derive(Args)]
struct KuznetsovArgs {
    /// Modulus cap for the all-characters expansion identity.
    #[arg(long)]
    c_max: Option<u64>,
    /// Modulus cap for the pointwise bound.
    #[arg(long)]
    weil_c_max: Option<u64>,
    /// Prime level for the total-mass cross-check.
    #[arg(long = "N")]
    n: Option<u64>,
    #[arg(long)]
    c_max_multiplier: Option<u64>,
}

#[derive(Args)]
struct HplusArgs {
    /// Evaluation points, comma-separated.
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    #[arg(long)]
    h_id: Option<String>,
}

#[derive(Args)]
struct MellinArgs {
    /// Family size parameter of the kernel.
    #[arg(long)]
    scale: Option<f64>,
    /// Modulus the kernel came from; must exceed scale^(sigma/2).
    #[arg(long)]
    c: Option<f64>,
    /// Holomorphic weight for the flat kernel.
    #[arg(long)]
    weight: Option<u32>,
    /// Truncation height of the inversion integral.
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    phi_id: Option<String>,
    #[arg(long)]
    h_id: Option<String>,
}

#[derive(Args)]
struct HbArgs {
    /// Sieve truncation.
    #[arg(long)]
    z: Option<u64>,
    /// Decomposition depth.
    #[arg(long = "K")]
    depth: Option<u32>,
    /// Verify n up to this bound (requires nmax <= z^K).
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Args)]
struct SplitArgs {
    /// Sweep the full exponent grid instead of random sampling.
    #[arg(long)]
    exhaustive: bool,
    /// Grid denominator for --exhaustive.
    #[arg(long)]
    grid: Option<u32>,
    /// Window parameter.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Random trials when not exhaustive.
    #[arg(long)]
    count: Option<u64>,
    /// Even holomorphic weight; Maass windows when omitted.
    #[arg(long)]
    holo_weight: Option<u32>,
    /// Family size parameter the exponents scale against.
    #[arg(long)]
    scale: Option<f64>,
    /// Active-slot cap for --exhaustive.
    #[arg(long)]
    max_active: Option<usize>,
}

#[derive(Args)]
struct LsieveArgs {
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    d_max: Option<u64>,
    #[arg(long)]
    x_max: Option<usize>,
}

#[derive(Args)]
struct FourthMomentArgs {
    /// Character modulus.
    #[arg(long)]
    d: Option<u64>,
    /// Sweep these moduli instead of a single one.
    #[arg(long, value_delimiter = ',')]
    d_list: Vec<u64>,
    /// Dyadic block start; coefficients run over (x, 2x].
    #[arg(long)]
    x: Option<usize>,
    /// Coefficient kind: one or log.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Exponent of the logarithm in the envelope.
    #[arg(long)]
    log_power: Option<f64>,
}

#[derive(Args)]
struct GrandArgs {
    /// Modulus cap of the twisting family.
    #[arg(long)]
    q_max: Option<u64>,
    /// Fixed twist modulus.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Real-part threshold of the counted box, in [1/2, 1].
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    log_power: Option<f64>,
}

#[derive(Args)]
struct ZerosArgs {
    /// Character modulus; every primitive character is counted.
    #[arg(long)]
    modulus: Option<u64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Args)]
struct FetchArgs {
    /// Form kind: maass or holomorphic.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    level: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    /// Coefficient coverage per form.
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Args)]
struct ExplicitArgs {
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    level: Option<u64>,
    /// Scale parameter of the prime sum.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    phi_id: Option<String>,
}

/// Run the CLI to completion and hand back the process exit code: 0 on
/// success, 1 for domain-style failures, 2 for budget failures, 3 for
/// network failures, 64 for usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run_inner(argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn run_inner<I, T>(argv: I) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    Ok(0)
                }
                _ => Err(Error::Usage(e.to_string())),
            };
        }
    };

    let file = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };

    let default_format = match &cli.cmd {
        Cmd::Density(_) | Cmd::Lsieve(_) => OutputFormat::Csv,
        _ => OutputFormat::Json,
    };
    let mut cfg = resolve_common(&cli.cmd, default_format, &cli.common, &file)?;

    if cfg.threads != 0 {
        // a second in-process call keeps the first pool; fine for one
        // subcommand per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global();
    }

    match &cli.cmd {
        Cmd::Density(a) => {
            if !a.n.is_empty() {
                cfg.n_list = a.n.clone();
            }
            if let Some(s) = a.sigma {
                cfg.sigma = s;
            }
            if let Some(h) = &a.h_id {
                cfg.h_id = h.clone();
            }
            if let Some(p) = &a.phi_id {
                cfg.phi_id = p.clone();
            }
            if let Some(m) = a.c_max_multiplier {
                cfg.c_max_multiplier = m;
            }
            cfg.validate()?;
            exec_density(&cfg)
        }
        Cmd::KuznetsovCheck(a) => {
            if let Some(n) = a.n {
                cfg.n_list = vec![n];
            }
            if let Some(m) = a.c_max_multiplier {
                cfg.c_max_multiplier = m;
            }
            cfg.validate()?;
            exec_kuznetsov(&cfg, a.c_max.unwrap_or(300), a.weil_c_max.unwrap_or(2000))
        }
        Cmd::Hplus(a) => {
            if let Some(h) = &a.h_id {
                cfg.h_id = h.clone();
            }
            cfg.validate()?;
            let xs = if a.x.is_empty() {
                vec![0.01, 0.1, 0.5, 1.0, 2.0, 3.0]
            } else {
                a.x.clone()
            };
            exec_hplus(&cfg, &xs)
        }
        Cmd::Mellin(a) => {
            if let Some(s) = a.sigma {
                cfg.sigma = s;
            }
            if let Some(p) = &a.phi_id {
                cfg.phi_id = p.clone();
            }
            if let Some(h) = &a.h_id {
                cfg.h_id = h.clone();
            }
            if let Some(w) = a.weight {
                cfg.k = w;
            }
            cfg.validate()?;
            exec_mellin(
                &cfg,
                a.scale.unwrap_or(100.0),
                a.c.unwrap_or(200.0),
                a.t_max.unwrap_or(40.0),
            )
        }
        Cmd::HbVerify(a) => {
            cfg.validate()?;
            exec_hb(
                &cfg,
                a.z.unwrap_or(3),
                a.depth.unwrap_or(20),
                a.nmax.unwrap_or(10_000),
            )
        }
        Cmd::SplitLemma(a) => {
            if let Some(e) = a.epsilon {
                cfg.epsilon = e;
            }
            if let Some(k) = a.holo_weight {
                cfg.k = k;
            }
            cfg.validate()?;
            exec_split(
                &cfg,
                a.exhaustive,
                a.grid.unwrap_or(80),
                a.count.unwrap_or(100_000),
                a.holo_weight,
                a.scale.unwrap_or(1e130),
                a.max_active.unwrap_or(5),
            )
        }
        Cmd::Lsieve(a) => {
            cfg.validate()?;
            exec_lsieve(
                &cfg,
                a.trials.unwrap_or(10_000),
                a.d_max.unwrap_or(100),
                a.x_max.unwrap_or(1000),
            )
        }
        Cmd::FourthMoment(a) => {
            cfg.validate()?;
            let ds = if a.d_list.is_empty() {
                vec![a.d.unwrap_or(3)]
            } else {
                a.d_list.clone()
            };
            exec_fourth(
                &cfg,
                &ds,
                a.x.unwrap_or(10),
                parse_kind(a.kind.as_deref().unwrap_or("one"))?,
                a.t_max.unwrap_or(8.0),
                a.log_power.unwrap_or(4.0),
            )
        }
        Cmd::GrandDensity(a) => {
            if let Some(k) = a.k {
                cfg.k = u32::try_from(k)
                    .map_err(|_| Error::Usage(format!("twist modulus {k} out of range")))?;
            }
            cfg.validate()?;
            exec_grand(
                &cfg,
                a.q_max.unwrap_or(8),
                a.k.unwrap_or(1),
                a.t_max.unwrap_or(15.0),
                a.beta.unwrap_or(0.9),
                a.log_power.unwrap_or(4.0),
            )
        }
        Cmd::Zeros(a) => {
            cfg.validate()?;
            exec_zeros(
                &cfg,
                a.modulus.unwrap_or(5),
                a.beta.unwrap_or(0.5),
                a.t_max.unwrap_or(15.0),
            )
        }
        Cmd::Fetch(a) => {
            cfg.validate()?;
            exec_fetch(
                &cfg,
                &file,
                parse_form_kind(a.kind.as_deref().unwrap_or("maass"))?,
                a.level.unwrap_or(1),
                a.count.unwrap_or(3),
                a.nmax.unwrap_or(1000),
            )
        }
        Cmd::ExplicitFormula(a) => {
            if let Some(s) = a.sigma {
                cfg.sigma = s;
            }
            if let Some(p) = &a.phi_id {
                cfg.phi_id = p.clone();
            }
            cfg.validate()?;
            let x = a.x.unwrap_or(100.0);
            let floor_cover = (x.powf(cfg.sigma).ceil() as usize).saturating_add(1);
            exec_explicit(
                &cfg,
                &file,
                parse_form_kind(a.kind.as_deref().unwrap_or("maass"))?,
                a.level.unwrap_or(1),
                x,
                a.count.unwrap_or(1),
                a.nmax.unwrap_or(floor_cover.max(1000)),
            )
        }
    }
}

// ---------------------------------------------------------------- config

#[derive(Default)]
struct FileConfig(BTreeMap<String, String>);

const KNOWN_KEYS: &[&str] = &[
    "sigma",
    "h_id",
    "phi_id",
    "N_list",
    "c_max_multiplier",
    "epsilon",
    "k",
    "seed",
    "output_path",
    "output_format",
    "offline",
    "threads",
    "api_base_url",
    "maass_query_path",
    "newform_query_path",
    "zeros_query_path",
];

impl FileConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Usage(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = k.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Usage(format!(
                    "{}:{}: unknown configuration key {key:?}",
                    path.display(),
                    lineno + 1
                )));
            }
            map.insert(key, v.trim().to_string());
        }
        Ok(FileConfig(map))
    }

    fn string(&self, key: &str) -> Option<String> {
        self.0.get(key).cloned()
    }

    fn parsed<V>(&self, key: &str) -> Result<Option<V>>
    where
        V: FromStr,
        V::Err: fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<V>()
                .map(Some)
                .map_err(|e| Error::Usage(format!("config key {key} = {raw:?}: {e}"))),
        }
    }

    fn n_list(&self) -> Result<Option<Vec<u64>>> {
        match self.0.get("N_list") {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::Usage(format!("config key N_list entry {p:?}: {e}")))
                })
                .collect::<Result<Vec<u64>>>()
                .map(Some),
        }
    }
}

fn cmd_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Density(_) => "density",
        Cmd::KuznetsovCheck(_) => "kuznetsov-check",
        Cmd::Hplus(_) => "hplus",
        Cmd::Mellin(_) => "mellin",
        Cmd::HbVerify(_) => "hb-verify",
        Cmd::SplitLemma(_) => "split-lemma",
        Cmd::Lsieve(_) => "lsieve",
        Cmd::FourthMoment(_) => "fourth-moment",
        Cmd::GrandDensity(_) => "grand-density",
        Cmd::Zeros(_) => "zeros",
        Cmd::Fetch(_) => "fetch",
        Cmd::ExplicitFormula(_) => "explicit-formula",
    }
}

/// Fill a RunConfig from defaults, then the file, then the shared flags.
/// Subcommand flags overwrite their fields afterwards.
fn resolve_common(
    cmd: &Cmd,
    default_format: OutputFormat,
    common: &CommonArgs,
    file: &FileConfig,
) -> Result<RunConfig> {
    let mut cfg = RunConfig {
        subcommand: cmd_name(cmd).into(),
        output_format: default_format,
        ..RunConfig::default()
    };
    if let Some(v) = file.parsed::<f64>("sigma")? {
        cfg.sigma = v;
    }
    if let Some(v) = file.string("h_id") {
        cfg.h_id = v;
    }
    if let Some(v) = file.string("phi_id") {
        cfg.phi_id = v;
    }
    if let Some(v) = file.n_list()? {
        cfg.n_list = v;
    }
    if let Some(v) = file.parsed::<u64>("c_max_multiplier")? {
        cfg.c_max_multiplier = v;
    }
    if let Some(v) = file.parsed::<f64>("epsilon")? {
        cfg.epsilon = v;
    }
    if let Some(v) = file.parsed::<u32>("k")? {
        cfg.k = v;
    }
    if let Some(v) = file.parsed::<u64>("seed")? {
        cfg.seed = v;
    }
    if let Some(v) = file.string("output_path") {
        cfg.output_path = Some(v);
    }
    if let Some(v) = file.string("output_format") {
        cfg.output_format = v.parse()?;
    }
    if let Some(v) = file.parsed::<bool>("offline")? {
        cfg.offline = v;
    }
    if let Some(v) = file.parsed::<usize>("threads")? {
        cfg.threads = v;
    }

    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if common.offline {
        cfg.offline = true;
    }
    if let Some(p) = &common.output {
        cfg.output_path = Some(p.display().to_string());
    }
    if let Some(f) = &common.format {
        cfg.output_format = f.parse()?;
    }
    Ok(cfg)
}

fn parse_kind(s: &str) -> Result<CoefKind> {
    match s {
        "one" => Ok(CoefKind::One),
        "log" => Ok(CoefKind::Log),
        "moebius" => Ok(CoefKind::Moebius),
        other => Err(Error::Usage(format!(
            "unknown coefficient kind {other:?}; use one, log, or moebius"
        ))),
    }
}

fn parse_form_kind(s: &str) -> Result<FormKind> {
    match s {
        "maass" => Ok(FormKind::Maass),
        "holomorphic" => Ok(FormKind::Holomorphic),
        other => Err(Error::Usage(format!(
            "unknown form kind {other:?}; use maass or holomorphic"
        ))),
    }
}

fn resolve_weight(h_id: &str) -> Result<&'static WeightFunction> {
    match h_id {
        "gaussian" => Ok(gaussian_weight()),
        other => Err(Error::Usage(format!(
            "unknown weight id {other:?}; gaussian is available"
        ))),
    }
}

fn resolve_phi(phi_id: &str, sigma: f64) -> Result<TestFunction> {
    match phi_id {
        "triangle" => make_test_triangle(sigma),
        "bump" => make_test_bump(sigma),
        other => Err(Error::Usage(format!(
            "unknown test-function id {other:?}; triangle and bump are available"
        ))),
    }
}

fn out_path(cfg: &RunConfig) -> Option<&Path> {
    cfg.output_path.as_deref().map(Path::new)
}

/// Single flat payload: JSON envelope, or a one-row CSV.
fn emit_flat<T: Serialize>(cfg: &RunConfig, payload: &T) -> Result<()> {
    let content = match cfg.output_format {
        OutputFormat::Json => report::render_json(cfg, payload)?,
        OutputFormat::Csv => report::render_csv(cfg, std::slice::from_ref(payload))?,
    };
    report::emit(out_path(cfg), &content)
}

/// Row sweep with a separate summary. CSV to a file also prints the JSON
/// summary on stdout, so a sweep run always leaves both behind.
fn emit_sweep<R: Serialize, S: Serialize>(cfg: &RunConfig, rows: &[R], summary: &S) -> Result<()> {
    match (cfg.output_format, out_path(cfg)) {
        (OutputFormat::Csv, Some(p)) => {
            report::emit(Some(p), &report::render_csv(cfg, rows)?)?;
            report::emit(None, &report::render_json(cfg, summary)?)
        }
        (OutputFormat::Csv, None) => report::emit(None, &report::render_csv(cfg, rows)?),
        (OutputFormat::Json, p) => report::emit(p, &report::render_json(cfg, summary)?),
    }
}

// ---------------------------------------------------------------- exec

fn exec_density(cfg: &RunConfig) -> Result<i32> {
    let h = resolve_weight(&cfg.h_id)?;
    let phi = resolve_phi(&cfg.phi_id, cfg.sigma)?;
    let mut reports = Vec::new();
    for &n in &cfg.n_list {
        let c_max = cfg
            .c_max_multiplier
            .checked_mul(n)
            .ok_or_else(|| Error::Usage(format!("modulus cap overflows at level {n}")))?;
        reports.push(density_geometric(h, &phi, n, c_max)?);
    }
    let rows: Vec<DensityRow> = reports
        .iter()
        .map(|r| DensityRow {
            n: r.level,
            sigma: r.sigma,
            h_id: &cfg.h_id,
            phi_id: &cfg.phi_id,
            c_max: r.c_max,
            density_value: r.density_value,
            ks_prediction: r.ks_prediction,
            deviation: r.deviation,
            tail_bound: r.tail_bound,
        })
        .collect();
    let content = match cfg.output_format {
        OutputFormat::Csv => report::render_csv(cfg, &rows)?,
        OutputFormat::Json => report::render_json(cfg, &reports)?,
    };
    report::emit(out_path(cfg), &content)?;
    Ok(0)
}

#[derive(Serialize)]
struct KuznetsovPayload {
    expansion_c_max: u64,
    pairs_checked: u64,
    max_expansion_gap: f64,
    weil_c_max: u64,
    weil_violations: u64,
    worst_weil_ratio: f64,
    mass_level: u64,
    mass_c_max: u64,
    mass_geometric: f64,
    mass_integral: f64,
    mass_difference: f64,
    mass_tail_bound: f64,
    pass: bool,
}

/// First three n >= 1 coprime to c.
fn coprime_triple(c: u64) -> Vec<u64> {
    (1..).filter(|&n| gcd_u64(n, c) == 1).take(3).collect()
}

fn exec_kuznetsov(cfg: &RunConfig, c_max: u64, weil_c_max: u64) -> Result<i32> {
    let expansion: Vec<(f64, u64)> = (2..=c_max)
        .into_par_iter()
        .map(|c| -> Result<(f64, u64)> {
            let mut worst = 0.0f64;
            let mut pairs = 0;
            for n in coprime_triple(c) {
                let direct = kloosterman(&KloostermanQuery {
                    m: n as i64,
                    n: 1,
                    c,
                })?;
                let rebuilt = kloosterman_char_expansion(n, c)?;
                worst = worst.max((direct - rebuilt).abs());
                pairs += 1;
            }
            Ok((worst, pairs))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_gap = 0.0f64;
    let mut pairs_checked = 0;
    for (g, p) in expansion {
        max_gap = max_gap.max(g);
        pairs_checked += p;
    }

    let weil: Vec<(f64, u64)> = (1..=weil_c_max)
        .into_par_iter()
        .map(|c| -> Result<(f64, u64)> {
            let cap = divisors(c).len() as f64 * (c as f64).sqrt();
            let mut worst = 0.0f64;
            let mut violations = 0;
            for n in coprime_triple(c) {
                let s = kloosterman(&KloostermanQuery {
                    m: n as i64,
                    n: 1,
                    c,
                })?;
                let ratio = s.abs() / cap;
                worst = worst.max(ratio);
                if ratio > 1.0 + 1e-12 {
                    violations += 1;
                }
            }
            Ok((worst, violations))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst_ratio = 0.0f64;
    let mut weil_violations = 0;
    for (w, v) in weil {
        worst_ratio = worst_ratio.max(w);
        weil_violations += v;
    }

    let level = cfg.n_list[0];
    let mass_c_max = cfg
        .c_max_multiplier
        .checked_mul(level)
        .ok_or_else(|| Error::Usage(format!("modulus cap overflows at level {level}")))?;
    let mass = omega_star(resolve_weight(&cfg.h_id)?, level, mass_c_max)?;

    let pass = max_gap <= 1e-9 && weil_violations == 0;
    let payload = KuznetsovPayload {
        expansion_c_max: c_max,
        pairs_checked,
        max_expansion_gap: max_gap,
        weil_c_max,
        weil_violations,
        worst_weil_ratio: worst_ratio,
        mass_level: level,
        mass_c_max,
        mass_geometric: mass.geometric,
        mass_integral: mass.integral,
        mass_difference: mass.difference,
        mass_tail_bound: mass.tail_bound,
        pass,
    };
    emit_flat(cfg, &payload)?;
    Ok(i32::from(!pass))
}

#[derive(Serialize)]
struct HplusRow {
    x: f64,
    integral: f64,
    series: f64,
    gap: f64,
}

#[derive(Serialize)]
struct HplusPayload {
    rows: Vec<HplusRow>,
    value_at_0_001: f64,
    /// H+(x) / (x e^{1/4} / pi) at x = 0.01; 1 to first order.
    leading_ratio_at_0_01: f64,
}

fn exec_hplus(cfg: &RunConfig, xs: &[f64]) -> Result<i32> {
    let h = resolve_weight(&cfg.h_id)?;
    let mut rows = Vec::new();
    for &x in xs {
        let integral = hplus_integral(h, x)?;
        let series = hplus_series(h, x)?;
        rows.push(HplusRow {
            x,
            integral,
            series,
            gap: (integral - series).abs(),
        });
    }
    let value_at_0_001 = hplus_integral(h, 1e-3)?;
    let leading = hplus_integral(h, 0.01)? / (0.01 * (0.25f64).exp() / std::f64::consts::PI);
    let payload = HplusPayload {
        rows,
        value_at_0_001,
        leading_ratio_at_0_01: leading,
    };
    match cfg.output_format {
        OutputFormat::Csv => report::emit(out_path(cfg), &report::render_csv(cfg, &payload.rows)?)?,
        OutputFormat::Json => report::emit(out_path(cfg), &report::render_json(cfg, &payload)?)?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct MellinPayload {
    scale: f64,
    c: f64,
    weight: u32,
    t_max: f64,
    spectral_constant: f64,
    spectral_worst_ratio: f64,
    flat_constant: f64,
    flat_worst_ratio: f64,
    spectral_inversion_err: f64,
    spectral_inversion_tail: f64,
    flat_inversion_err: f64,
    flat_inversion_tail: f64,
}

fn exec_mellin(cfg: &RunConfig, scale: f64, c: f64, t_max: f64) -> Result<i32> {
    let phi = resolve_phi(&cfg.phi_id, cfg.sigma)?;
    let h = resolve_weight(&cfg.h_id)?;
    let spec_q = MellinQuery {
        s: Complex64::new(0.0, 0.0),
        scale,
        c,
        kind: MellinKind::Maass,
    };
    let flat_q = MellinQuery {
        kind: MellinKind::Holomorphic { weight: cfg.k },
        ..spec_q
    };
    let sf = psi_bound_fit(&spec_q, &phi, h)?;
    let ff = psi_flat_bound_fit(&flat_q, &phi)?;
    let samples = [1u64, 2, 3, 5, 8];
    let si = mellin_inversion_check(&spec_q, &phi, Some(h), &samples, t_max)?;
    let fi = mellin_inversion_check(&flat_q, &phi, None, &samples, t_max)?;
    let payload = MellinPayload {
        scale,
        c,
        weight: cfg.k,
        t_max,
        spectral_constant: sf.constant,
        spectral_worst_ratio: sf.worst_checked_ratio,
        flat_constant: ff.constant,
        flat_worst_ratio: ff.worst_checked_ratio,
        spectral_inversion_err: si.max_abs_err,
        spectral_inversion_tail: si.tail_magnitude,
        flat_inversion_err: fi.max_abs_err,
        flat_inversion_tail: fi.tail_magnitude,
    };
    emit_flat(cfg, &payload)?;
    Ok(0)
}

#[derive(Serialize)]
struct HbPayload {
    z: u64,
    k: u32,
    n_max: usize,
    max_residual: f64,
    tolerance: f64,
    pass: bool,
}

fn exec_hb(cfg: &RunConfig, z: u64, k: u32, n_max: usize) -> Result<i32> {
    let max_residual = heath_brown_check(n_max, z, k)?;
    let pass = max_residual <= 1e-8;
    let payload = HbPayload {
        z,
        k,
        n_max,
        max_residual,
        tolerance: 1e-8,
        pass,
    };
    emit_flat(cfg, &payload)?;
    Ok(i32::from(!pass))
}

#[derive(Serialize)]
struct SplitPayload {
    mode: &'static str,
    grid: Option<u32>,
    count: Option<u64>,
    epsilon: f64,
    holo_weight: Option<u32>,
    scale: f64,
    max_active: Option<usize>,
    window_lo: f64,
    window_hi: f64,
    window_case_b: f64,
    #[serde(flatten)]
    summary: SplitSweepSummary,
    pass: bool,
}

fn exec_split(
    cfg: &RunConfig,
    exhaustive: bool,
    grid: u32,
    count: u64,
    holo_weight: Option<u32>,
    scale: f64,
    max_active: usize,
) -> Result<i32> {
    let (lo, hi, case_b) = split_window(cfg.epsilon, holo_weight)?;
    let (mode, summary) = if exhaustive {
        (
            "exhaustive",
            grid_split_sweep(grid, cfg.epsilon, holo_weight, max_active, scale)?,
        )
    } else {
        (
            "random",
            random_split_sweep(count, cfg.seed, cfg.epsilon, holo_weight, scale)?,
        )
    };
    let pass = summary.failures == 0;
    let payload = SplitPayload {
        mode,
        grid: exhaustive.then_some(grid),
        count: (!exhaustive).then_some(count),
        epsilon: cfg.epsilon,
        holo_weight,
        scale,
        max_active: exhaustive.then_some(max_active),
        window_lo: lo,
        window_hi: hi,
        window_case_b: case_b,
        summary,
        pass,
    };
    emit_flat(cfg, &payload)?;
    Ok(i32::from(!pass))
}

#[derive(Serialize)]
struct SieveRow {
    trial: u64,
    d: u64,
    x: u64,
    lhs: f64,
    rhs: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct SievePayload {
    trials: u64,
    d_max: u64,
    x_max: usize,
    violations: u64,
    worst_ratio: f64,
    pass: bool,
}

fn exec_lsieve(cfg: &RunConfig, trials: u64, d_max: u64, x_max: usize) -> Result<i32> {
    if d_max < 2 || x_max < 1 {
        return Err(Error::Usage(format!(
            "need d_max >= 2 and x_max >= 1, got {d_max} and {x_max}"
        )));
    }
    let rows: Vec<SieveRow> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<SieveRow> {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(t));
            let d = rng.gen_range(2..=d_max);
            let x = rng.gen_range(1..=x_max);
            let a: Vec<Complex64> = (0..x)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let (lhs, rhs) = large_sieve_check(d, x, &a)?;
            Ok(SieveRow {
                trial: t,
                d,
                x: x as u64,
                lhs,
                rhs,
                ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut violations = 0u64;
    let mut worst_ratio = 0.0f64;
    for r in &rows {
        if r.lhs > r.rhs * (1.0 + 1e-12) + 1e-12 {
            violations += 1;
        }
        worst_ratio = worst_ratio.max(r.ratio);
    }
    let pass = violations == 0;
    let summary = SievePayload {
        trials,
        d_max,
        x_max,
        violations,
        worst_ratio,
        pass,
    };
    emit_sweep(cfg, &rows, &summary)?;
    Ok(i32::from(!pass))
}

fn exec_fourth(
    cfg: &RunConfig,
    ds: &[u64],
    x: usize,
    kind: CoefKind,
    t_max: f64,
    log_power: f64,
) -> Result<i32> {
    let reports = ds
        .par_iter()
        .map(|&d| fourth_moment_integral(d, x, kind, t_max, log_power))
        .collect::<Result<Vec<_>>>()?;
    if reports.len() == 1 {
        emit_flat(cfg, &reports[0])?;
    } else {
        #[derive(Serialize)]
        struct FourthSummary {
            moduli: Vec<u64>,
            worst_ratio: f64,
            largest_tail: f64,
        }
        let summary = FourthSummary {
            moduli: ds.to_vec(),
            worst_ratio: reports.iter().fold(0.0f64, |m, r| m.max(r.ratio)),
            largest_tail: reports.iter().fold(0.0f64, |m, r| m.max(r.tail_bound)),
        };
        emit_sweep(cfg, &reports, &summary)?;
    }
    Ok(0)
}

fn exec_grand(
    cfg: &RunConfig,
    q_max: u64,
    k: u64,
    t_max: f64,
    beta: f64,
    log_power: f64,
) -> Result<i32> {
    let report = grand_density_ratio(q_max, k, t_max, beta, log_power)?;
    emit_flat(cfg, &report)?;
    Ok(0)
}

#[derive(Serialize)]
struct ZeroCountRow {
    modulus: u64,
    index: u64,
    conductor: u64,
    count: i64,
    line_scan_count: Option<i64>,
    scan_disagrees: bool,
}

fn exec_zeros(cfg: &RunConfig, modulus: u64, beta: f64, t_max: f64) -> Result<i32> {
    let group = crate::ntcore::character_group(modulus)?;
    let mut rows = Vec::new();
    for chi in group {
        if !chi.is_primitive {
            continue;
        }
        let rep = zero_count(&ZeroCountQuery {
            beta,
            t_max,
            character: chi.clone(),
        })?;
        rows.push(ZeroCountRow {
            modulus: chi.modulus,
            index: chi.index,
            conductor: chi.conductor,
            count: rep.count,
            line_scan_count: rep.line_scan_count,
            scan_disagrees: rep.scan_disagrees,
        });
    }
    if rows.is_empty() {
        return Err(Error::Domain(format!(
            "modulus {modulus} has no primitive characters"
        )));
    }
    let content = match cfg.output_format {
        OutputFormat::Csv => report::render_csv(cfg, &rows)?,
        OutputFormat::Json => report::render_json(cfg, &rows)?,
    };
    report::emit(out_path(cfg), &content)?;
    Ok(0)
}

fn client_config(file: &FileConfig, offline: bool) -> ClientConfig {
    let mut cc = ClientConfig::new(
        file.string("api_base_url")
            .unwrap_or_else(|| "https://www.lmfdb.org/api".into()),
        ClientConfig::cache_dir_from_env(),
    );
    if let Some(p) = file.string("maass_query_path") {
        cc.maass_query_path = p;
    }
    if let Some(p) = file.string("newform_query_path") {
        cc.newform_query_path = p;
    }
    if let Some(p) = file.string("zeros_query_path") {
        cc.zeros_query_path = p;
    }
    cc.offline = offline;
    cc
}

fn form_kind_str(kind: FormKind) -> &'static str {
    match kind {
        FormKind::Maass => "maass",
        FormKind::Holomorphic => "holomorphic",
    }
}

#[derive(Serialize)]
struct FetchRow {
    label: String,
    kind: &'static str,
    spectral_parameter: f64,
    sign: i8,
    coefficients_covered: u64,
    zeros_stored: usize,
    fetched_at: String,
}

fn exec_fetch(
    cfg: &RunConfig,
    file: &FileConfig,
    kind: FormKind,
    level: u64,
    count: usize,
    n_max: usize,
) -> Result<i32> {
    let cc = client_config(file, cfg.offline);
    let sources = fetch_forms(&cc, kind, level, count, n_max)?;
    let rows: Vec<FetchRow> = sources
        .iter()
        .map(|s| FetchRow {
            label: s.label.clone(),
            kind: form_kind_str(s.kind),
            spectral_parameter: s.spectral_parameter,
            sign: s.sign,
            coefficients_covered: s.coverage(),
            zeros_stored: s.zeros.len(),
            fetched_at: s.fetched_at.clone(),
        })
        .collect();
    let content = match cfg.output_format {
        OutputFormat::Csv => report::render_csv(cfg, &rows)?,
        OutputFormat::Json => report::render_json(cfg, &rows)?,
    };
    report::emit(out_path(cfg), &content)?;
    Ok(0)
}

#[derive(Serialize)]
struct ExplicitRow {
    label: String,
    x: f64,
    zero_side: f64,
    prime_side: f64,
    gap: f64,
    truncation_estimate: f64,
    /// truncation_estimate plus the archimedean slack the gap must beat.
    budget: f64,
    zeros_used: usize,
    pass: bool,
}

fn exec_explicit(
    cfg: &RunConfig,
    file: &FileConfig,
    kind: FormKind,
    level: u64,
    x: f64,
    count: usize,
    n_max: usize,
) -> Result<i32> {
    let phi = resolve_phi(&cfg.phi_id, cfg.sigma)?;
    let cc = client_config(file, cfg.offline);
    let sources = fetch_forms(&cc, kind, level, count, n_max)?;
    if sources.is_empty() {
        return Err(Error::Insufficient(format!(
            "no {} forms at level {level} available",
            form_kind_str(kind)
        )));
    }
    let mut rows = Vec::new();
    let mut all_pass = true;
    for src in &sources {
        let rep = explicit_formula_check(src, &phi, x)?;
        let budget = rep.truncation_estimate + 0.05;
        let pass = rep.gap <= budget;
        all_pass &= pass;
        rows.push(ExplicitRow {
            label: rep.label.clone(),
            x: rep.x,
            zero_side: rep.zero_side,
            prime_side: rep.prime_side,
            gap: rep.gap,
            truncation_estimate: rep.truncation_estimate,
            budget,
            zeros_used: rep.zeros_used,
            pass,
        });
    }
    let content = match cfg.output_format {
        OutputFormat::Csv => report::render_csv(cfg, &rows)?,
        OutputFormat::Json => report::render_json(cfg, &rows)?,
    };
    report::emit(out_path(cfg), &content)?;
    Ok(i32::from(!all_pass))
}
