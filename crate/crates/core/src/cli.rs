//! Command-line front end: argument and config-file merging, dispatch, reports.
//!
//! Precedence is flags over the `--config` JSON file over built-in defaults.
//! Exit codes: 0 success, 2 usage, 3 data, 4 non-convergence under `--strict`.

use crate::bv::{modular_exact, modular_fidelity, total_variation, BVFunction};
use crate::conditions::{check_a0, check_growth, log_holder_modulus};
use crate::domain::{Domain, Point};
use crate::duality::{dual_norm_v, dual_sup, SearchFamily, Strategy};
use crate::error::Error;
use crate::gamma::{gamma_sweep, minimize_fp, smooth_approximation, EnergySpec, SolverOptions, SweepOptions};
use crate::io::{self, Image, Signal};
use crate::phi::{PhiFunction, PhiSpec, SCHEMA_VERSION};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "BVPHI_THREADS";

pub fn version() -> &'static str {
    static V: OnceLock<String> = OnceLock::new();
    V.get_or_init(|| format!("{} (phi-spec schema {})", env!("CARGO_PKG_VERSION"), SCHEMA_VERSION))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Conjugate,
    Modular,
    Dualsup,
    Dualnorm,
    Denoise,
    GammaSweep,
    CheckConditions,
    Approx,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Conjugate => "conjugate",
            CommandKind::Modular => "modular",
            CommandKind::Dualsup => "dualsup",
            CommandKind::Dualnorm => "dualnorm",
            CommandKind::Denoise => "denoise",
            CommandKind::GammaSweep => "gamma-sweep",
            CommandKind::CheckConditions => "check-conditions",
            CommandKind::Approx => "approx",
        }
    }
}

/// Settings shared by the config file and the command line. Every field is
/// optional so that layers can be merged.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Φ-spec JSON file
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PathBuf>,
    /// Signal CSV (x,u)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal: Option<PathBuf>,
    /// Atoms CSV (x,jump)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<PathBuf>,
    /// Data for denoising: CSV signal or PGM image
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Fidelity data f (CSV on the signal grid)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<PathBuf>,
    /// Output signal or image
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Report JSON path (stdout if absent)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// Search strategy JSON
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<PathBuf>,
    /// Domain "lo,hi,n" for commands without a signal
    #[arg(long, allow_hyphen_values = true, value_parser = parse_domain)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainArg>,
    /// Evaluation point
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    /// Comma-separated conjugate arguments
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    /// Exponent of the regularized energy
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    /// Jump threshold for atomizing samples
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Smoothing of |∇u| in the energy
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Convergence tolerance of the selected engine
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Comma-separated mollification widths
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    /// Growth exponent p for aInc checks
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_inc: Option<f64>,
    /// Growth exponent q for aDec checks
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_dec: Option<f64>,
    /// Treat non-convergence as an error (exit 4)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    /// Diagnostic output on stderr
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verbosity: Option<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainArg {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

fn parse_domain(s: &str) -> Result<DomainArg, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected lo,hi,n".into());
    }
    let lo = parts[0].parse::<f64>().map_err(|e| e.to_string())?;
    let hi = parts[1].parse::<f64>().map_err(|e| e.to_string())?;
    let n = parts[2].parse::<usize>().map_err(|e| e.to_string())?;
    Ok(DomainArg { lo, hi, n })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    Nodal,
    Bump,
    Both,
}

impl From<FamilyArg> for SearchFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Nodal => SearchFamily::Nodal,
            FamilyArg::Bump => SearchFamily::Bump,
            FamilyArg::Both => SearchFamily::Both,
        }
    }
}

macro_rules! layer {
    ($base:expr, $top:expr, $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    /// Fields of `top` win over fields of `self`.
    pub fn overlay(self, top: Settings) -> Settings {
        layer!(self, top, phi, signal, atoms, input, fidelity, out, report, strategy, domain, x, s, p, kmax,
            theta, eps, tol, max_iters, family, resolution, delta_min, delta_max, iters, seed, deltas, p_inc,
            q_dec, strict, verbosity)
    }
}

#[derive(Parser, Debug)]
#[command(name = "bvphi", about = "BV^φ modulars, dual estimates and Γ-sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON file with default settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Conjugate φ*(x, s) on a list of s
    Conjugate(Common),
    /// Closed-form modular of a BV function
    Modular(Common),
    /// Dual modular by search over test fields
    Dualsup(Common),
    /// Dual norm by search over unit test fields
    Dualnorm(Common),
    /// Minimize the regularized energy for one p
    Denoise(Common),
    /// Warm-started sweep p_k = 1 + 2^-k
    GammaSweep(Common),
    /// Sampled regularity checks on φ
    CheckConditions(Common),
    /// Mollified modular approximation trace
    Approx(Common),
}

/// Effective configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(flatten)]
    pub settings: Settings,
}

impl std::ops::Deref for RunConfig {
    type Target = Settings;
    fn deref(&self) -> &Settings {
        &self.settings
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    NotConverged(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::NotConverged(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::NotConverged(m) => write!(f, "not converged: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type Res<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

enum Parsed {
    Run(RunConfig),
    Exit(i32, String),
}

fn parse(args: Vec<OsString>) -> Res<Parsed> {
    let cmd = Cli::command().version(version());
    let matches = match cmd.try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let text = e.render().to_string();
            return match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => Ok(Parsed::Exit(0, text)),
                _ => Err(CliError::Usage(text.trim_end().to_string())),
            };
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| usage(e.to_string()))?;
    let (kind, common) = match cli.command {
        Sub::Conjugate(c) => (CommandKind::Conjugate, c),
        Sub::Modular(c) => (CommandKind::Modular, c),
        Sub::Dualsup(c) => (CommandKind::Dualsup, c),
        Sub::Dualnorm(c) => (CommandKind::Dualnorm, c),
        Sub::Denoise(c) => (CommandKind::Denoise, c),
        Sub::GammaSweep(c) => (CommandKind::GammaSweep, c),
        Sub::CheckConditions(c) => (CommandKind::CheckConditions, c),
        Sub::Approx(c) => (CommandKind::Approx, c),
    };
    let file = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
            serde_json::from_str::<Settings>(&text)
                .map_err(|e| usage(format!("--config {}: line {}: {e}", path.display(), e.line())))?
        }
        None => Settings::default(),
    };
    let cfg = RunConfig { command: kind, settings: file.overlay(common.settings) };
    validate(&cfg)?;
    Ok(Parsed::Run(cfg))
}

/// Parses argv (including the program name) and an optional `--config` file.
pub fn parse_config<I, T>(argv: I) -> Res<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match parse(argv.into_iter().map(Into::into).collect())? {
        Parsed::Run(cfg) => Ok(cfg),
        Parsed::Exit(_, text) => Err(usage(text)),
    }
}

fn require<'a, T>(v: &'a Option<T>, flag: &str, cmd: CommandKind) -> Res<&'a T> {
    v.as_ref().ok_or_else(|| usage(format!("{} requires --{flag}", cmd.name())))
}

fn exists(v: &Option<PathBuf>, flag: &str) -> Res<()> {
    if let Some(p) = v {
        if !p.is_file() {
            return Err(usage(format!("--{flag}: no such file {}", p.display())));
        }
    }
    Ok(())
}

fn writable(v: &Option<PathBuf>, flag: &str) -> Res<()> {
    if let Some(p) = v {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(usage(format!("--{flag}: directory {} does not exist", dir.display())));
        }
    }
    Ok(())
}

fn in_range<T: PartialOrd + Copy + std::fmt::Display>(v: Option<T>, flag: &str, ok: impl Fn(T) -> bool, want: &str) -> Res<()> {
    match v {
        Some(x) if !ok(x) => Err(usage(format!("--{flag} {x}: expected {want}"))),
        _ => Ok(()),
    }
}

fn validate(cfg: &RunConfig) -> Res<()> {
    use CommandKind::*;
    let c = cfg.command;
    require(&cfg.phi, "phi", c)?;
    match c {
        Modular | Dualsup | Dualnorm | Approx => {
            require(&cfg.signal, "signal", c)?;
        }
        Denoise => {
            require(&cfg.input, "input", c)?;
            require(&cfg.p, "p", c)?;
        }
        GammaSweep => {
            require(&cfg.input, "input", c)?;
        }
        Conjugate | CheckConditions => {}
    }
    for (v, flag) in [
        (&cfg.phi, "phi"),
        (&cfg.signal, "signal"),
        (&cfg.atoms, "atoms"),
        (&cfg.input, "input"),
        (&cfg.fidelity, "fidelity"),
        (&cfg.strategy, "strategy"),
    ] {
        exists(v, flag)?;
    }
    writable(&cfg.out, "out")?;
    writable(&cfg.report, "report")?;
    let pos = |x: f64| x > 0.0 && x.is_finite();
    in_range(cfg.tol, "tol", |t| t > 0.0 && t < 1.0, "a value in (0, 1)")?;
    in_range(cfg.p, "p", |p| p > 1.0 && p.is_finite(), "a finite value > 1")?;
    in_range(cfg.kmax, "kmax", |k| (1..=12).contains(&k), "an integer in 1..=12")?;
    in_range(cfg.theta, "theta", pos, "a positive value")?;
    in_range(cfg.eps, "eps", |e| e >= 0.0 && e.is_finite(), "a nonnegative value")?;
    in_range(cfg.max_iters, "max-iters", |k| k >= 1, "a positive integer")?;
    in_range(cfg.resolution, "resolution", |r| (1..=64).contains(&r), "an integer in 1..=64")?;
    in_range(cfg.delta_min, "delta-min", pos, "a positive value")?;
    in_range(cfg.delta_max, "delta-max", pos, "a positive value")?;
    in_range(cfg.iters, "iters", |k| k >= 1, "a positive integer")?;
    in_range(cfg.p_inc, "p-inc", pos, "a positive value")?;
    in_range(cfg.q_dec, "q-dec", pos, "a positive value")?;
    if let (Some(a), Some(b)) = (cfg.delta_min, cfg.delta_max) {
        if a > b {
            return Err(usage(format!("--delta-min {a} exceeds --delta-max {b}")));
        }
    }
    if let Some(ds) = &cfg.deltas {
        if ds.is_empty() || ds.iter().any(|d| !pos(*d)) {
            return Err(usage("--deltas: expected positive widths"));
        }
    }
    if let Some(ss) = &cfg.s {
        if ss.iter().any(|s| !(*s >= 0.0)) {
            return Err(usage("--s: expected nonnegative values"));
        }
    }
    if let Some(d) = cfg.domain {
        if !(d.lo < d.hi) || d.n == 0 {
            return Err(usage("--domain: expected lo < hi and n ≥ 1"));
        }
    }
    Ok(())
}

fn load_phi(cfg: &RunConfig) -> Res<PhiFunction> {
    let path = cfg.phi.as_ref().expect("validated");
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let spec: PhiSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), e.line())))?;
    spec.build().map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_u(cfg: &RunConfig) -> Res<(Signal, BVFunction)> {
    let sig = io::load_signal(cfg.signal.as_ref().expect("validated"))?;
    let u = match (&cfg.atoms, cfg.theta) {
        (Some(a), _) => io::signal_to_bv(&sig, io::load_atoms(a)?)?,
        (None, Some(theta)) => BVFunction::atomize(sig.domain, sig.values.clone(), theta)?,
        (None, None) => BVFunction::from_samples(sig.domain, sig.values.clone())?,
    };
    Ok((sig, u))
}

fn strategy(cfg: &RunConfig) -> Res<Strategy> {
    let mut st = match &cfg.strategy {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<Strategy>(&text)
                .map_err(|e| CliError::Data(format!("{}:{}: {e}", p.display(), e.line())))?
        }
        None => Strategy::default(),
    };
    if let Some(f) = cfg.family {
        st.family = f.into();
    }
    st.resolution = cfg.resolution.unwrap_or(st.resolution);
    st.delta_min = cfg.delta_min.unwrap_or(st.delta_min);
    st.delta_max = cfg.delta_max.unwrap_or(st.delta_max);
    st.iters = cfg.iters.unwrap_or(st.iters);
    st.seed = cfg.seed.unwrap_or(st.seed);
    st.tol = cfg.tol.unwrap_or(st.tol);
    Ok(st)
}

fn solver(cfg: &RunConfig) -> SolverOptions {
    let d = SolverOptions::default();
    SolverOptions { tol: cfg.tol.unwrap_or(d.tol), max_iters: cfg.max_iters.unwrap_or(d.max_iters), ..d }
}

enum Data {
    Curve(Signal),
    Picture(Image, bool),
}

impl Data {
    fn domain(&self) -> Res<Domain> {
        Ok(match self {
            Data::Curve(s) => s.domain,
            Data::Picture(img, _) => img.domain()?,
        })
    }

    fn values(&self) -> &[f64] {
        match self {
            Data::Curve(s) => &s.values,
            Data::Picture(img, _) => &img.values,
        }
    }

    fn save(&self, path: &Path, values: &[f64]) -> Res<()> {
        match self {
            Data::Curve(s) => io::save_signal(path, &s.domain, values)?,
            Data::Picture(img, binary) => {
                let out = Image { values: values.to_vec(), ..img.clone() };
                io::save_pgm(path, &out, *binary)?;
            }
        }
        Ok(())
    }
}

fn load_data(path: &Path) -> Res<Data> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        let img = io::parse_pgm(&bytes, &path.display().to_string())?;
        Ok(Data::Picture(img, bytes.starts_with(b"P5")))
    } else {
        let text = String::from_utf8(bytes).map_err(|_| CliError::Data(format!("{}: not UTF-8 text or PGM", path.display())))?;
        Ok(Data::Curve(io::parse_signal(&text, &path.display().to_string())?))
    }
}

fn domain_of(cfg: &RunConfig) -> Res<Domain> {
    if let Some(d) = cfg.domain {
        return Ok(Domain::interval(d.lo, d.hi, d.n)?);
    }
    if let Some(p) = &cfg.signal {
        return Ok(io::load_signal(p)?.domain);
    }
    Ok(Domain::interval(-1.0, 1.0, 128)?)
}

fn merge(cfg: &RunConfig, body: impl Serialize) -> Res<Value> {
    let mut v = serde_json::to_value(body).map_err(Error::from)?;
    let obj = v.as_object_mut().ok_or_else(|| CliError::Data("report body is not an object".into()))?;
    obj.insert("config".into(), serde_json::to_value(cfg).map_err(Error::from)?);
    obj.insert("version".into(), Value::String(version().to_string()));
    Ok(v)
}

fn note(cfg: &RunConfig, msg: impl FnOnce() -> String) {
    if cfg.verbosity.unwrap_or(0) > 0 {
        eprintln!("bvphi: {}", msg());
    }
}

fn strict_check(cfg: &RunConfig, capped: bool, what: &str) -> Res<()> {
    if capped && cfg.strict.unwrap_or(false) {
        return Err(CliError::NotConverged(format!("{what} hit its iteration cap")));
    }
    Ok(())
}

/// Executes a resolved configuration and returns the report.
pub fn execute(cfg: &RunConfig) -> Res<Value> {
    let phi = load_phi(cfg)?;
    note(cfg, || format!("{} with φ family {}", cfg.command.name(), phi.family().name()));
    match cfg.command {
        CommandKind::Conjugate => {
            let x = cfg.x.unwrap_or(0.0);
            let ss = cfg.s.clone().unwrap_or_else(|| (-3..=3).map(|k| 10f64.powi(k)).collect());
            let pt = Point::at(x);
            let points: Vec<Value> = ss
                .iter()
                .map(|&s| json!({"s": s, "conjugate": phi.conjugate(&pt, s), "numeric": phi.conjugate_numeric(&pt, s)}))
                .collect();
            merge(cfg, json!({"x": x, "points": points, "recession": phi.recession(&pt)}))
        }
        CommandKind::Modular => {
            let (_, u) = load_u(cfg)?;
            let rep = match &cfg.fidelity {
                Some(p) => {
                    let f = io::load_signal(p)?;
                    modular_fidelity(&phi, &u, &f.values)?
                }
                None => modular_exact(&phi, &u),
            };
            let mut v = merge(cfg, &rep)?;
            v["total_variation"] = json!(total_variation(&u));
            Ok(v)
        }
        CommandKind::Dualsup | CommandKind::Dualnorm => {
            let (_, u) = load_u(cfg)?;
            let st = strategy(cfg)?;
            let est = if cfg.command == CommandKind::Dualsup { dual_sup(&phi, &u, &st)? } else { dual_norm_v(&phi, &u, &st)? };
            strict_check(cfg, est.capped, "test-field ascent")?;
            let mut v = merge(cfg, &est)?;
            v["strategy"] = serde_json::to_value(st).map_err(Error::from)?;
            v["modular_exact"] = serde_json::to_value(modular_exact(&phi, &u).total).map_err(Error::from)?;
            v["total_variation"] = json!(total_variation(&u));
            Ok(v)
        }
        CommandKind::Denoise => {
            let data = load_data(cfg.input.as_ref().expect("validated"))?;
            let mut spec = EnergySpec::new(phi, data.domain()?, cfg.p.expect("validated"), data.values().to_vec())?
                .with_options(solver(cfg));
            if let Some(e) = cfg.eps {
                spec = spec.with_eps(e);
            }
            let m = minimize_fp(&spec)?;
            note(cfg, || format!("{} iterations, energy {}", m.iterations, m.energy));
            strict_check(cfg, m.capped, "energy minimization")?;
            if let Some(out) = &cfg.out {
                data.save(out, &m.u)?;
            }
            merge(cfg, json!({"solver": spec.options, "energy": m.energy, "iterations": m.iterations, "capped": m.capped, "eps": spec.eps(), "initial_energy": m.trace.first()}))
        }
        CommandKind::GammaSweep => {
            let data = load_data(cfg.input.as_ref().expect("validated"))?;
            let opts = SweepOptions { kmax: cfg.kmax.unwrap_or(8), theta: cfg.theta, eps_abs: cfg.eps, solver: solver(cfg) };
            let r = gamma_sweep(&phi, &data.domain()?, data.values(), &opts)?;
            strict_check(cfg, r.steps.iter().any(|s| s.capped), "a sweep step")?;
            if let Some(out) = &cfg.out {
                data.save(out, &r.limit)?;
            }
            let mut v = merge(cfg, &r)?;
            if let Some(obj) = v.as_object_mut() {
                obj.remove("limit");
            }
            v["options"] = serde_json::to_value(opts).map_err(Error::from)?;
            Ok(v)
        }
        CommandKind::CheckConditions => {
            let domain = domain_of(cfg)?;
            let mut reports = vec![serde_json::to_value(check_a0(&phi, &domain)).map_err(Error::from)?];
            let g = phi.growth();
            if let (Some(p), Some(q)) = (cfg.p_inc.or(g.p_inc), cfg.q_dec.or(g.q_dec)) {
                reports.push(serde_json::to_value(check_growth(&phi, &domain, p, q)?).map_err(Error::from)?);
            }
            if let Some(p) = phi.exponent() {
                for strong in [false, true] {
                    reports.push(serde_json::to_value(log_holder_modulus(p, &domain, strong)?).map_err(Error::from)?);
                }
            }
            merge(cfg, json!({"reports": reports}))
        }
        CommandKind::Approx => {
            let (_, u) = load_u(cfg)?;
            let deltas = cfg.deltas.clone().unwrap_or_else(|| (1..=6).map(|k| 10f64.powi(-k)).collect());
            merge(cfg, smooth_approximation(&phi, &u, &deltas)?)
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Full CLI entry: parse, execute, emit. Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    init_threads();
    let outcome = parse(argv.into_iter().map(Into::into).collect()).and_then(|p| match p {
        Parsed::Exit(code, text) => {
            let _ = write!(stdout, "{text}");
            Ok(code)
        }
        Parsed::Run(cfg) => {
            let report = execute(&cfg)?;
            let text = io::report_json(&report)?;
            match &cfg.report {
                Some(p) => fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
                None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Data(e.to_string()))?,
            }
            Ok(0)
        }
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "bvphi: {e}");
            e.code()
        }
    }
}
