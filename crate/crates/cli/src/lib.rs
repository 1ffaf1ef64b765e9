//! `hpcs` command line: states, density grids, squeezed-state tables and
//! the verification report.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hpcs_core::fock::{FockVector, Truncation};
use hpcs_core::hpcs::{hpcs_fock, HpcsParams};
use hpcs_core::squeezed::{
    bn_closed_10, bn_closed_10_hermite, bn_closed_10_hyp1f1, bn_closed_2k, bn_pattern, bn_recursion,
    convergence_report, lomu_ln_norm_sqr, lomu_state, squeeze_hpcs, LomuParams, SqueezeParams, BN_PATTERN_MAX,
};
use hpcs_core::verify::{rel_diff, run_suite, CheckKind, Report, Suite, VerifyConfig, DEFAULT_SEED, MUTATION};
use hpcs_core::C64;
use serde::Serialize;
use serde_json::{json, Value};

pub mod grid;

use grid::{GridSpec, Route};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<hpcs_core::Error> for CliError {
    fn from(e: hpcs_core::Error) -> Self {
        match e {
            hpcs_core::Error::InvalidParameter(_) | hpcs_core::Error::IndexOutOfRange { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hpcs", version, about = "Higher-power coherent states and their squeezed extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Number-basis amplitudes of a state, as JSON.
    State(StateArgs),
    /// Time-evolved position density on an (x, t) grid, as CSV.
    Density(DensityArgs),
    /// Squeezed-state coefficient tables and normalisation.
    #[command(subcommand)]
    Squeezed(SqueezedCommand),
    /// Run the verification suites and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct StateParams {
    /// Power of the annihilation operator.
    #[arg(long)]
    pub j: usize,
    /// Family index, 0 ≤ k ≤ j−1.
    #[arg(long)]
    pub k: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: f64,
}

impl StateParams {
    fn params(&self) -> Result<HpcsParams, CliError> {
        if self.j == 0 {
            return Err(CliError::Usage("--j must be at least 1".into()));
        }
        if self.k >= self.j {
            return Err(CliError::Usage(format!(
                "--k {} is out of range for j = {}: need 0 ≤ k ≤ j−1",
                self.k, self.j
            )));
        }
        Ok(HpcsParams::new(self.j, self.k, self.x0, self.p0)?)
    }
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[command(flatten)]
    pub state: StateParams,
    /// Truncation index; chosen from the tail bound when absent.
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Squeeze magnitude r ≥ 0.
    #[arg(long)]
    pub r: Option<f64>,
    /// Squeeze angle φ in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    /// With --r: the a^j-type eigenstate of μ^j a^j + ν^j a†^j with β = α,
    /// instead of the squeeze operator applied to the state.
    #[arg(long, requires = "r")]
    pub lomu: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub state: StateParams,
    #[arg(long, default_value_t = -15.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 15.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 301)]
    pub nx: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU, allow_hyphen_values = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 128)]
    pub nt: usize,
    #[arg(long, value_enum, default_value_t = Route::Fock)]
    pub route: Route,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SqueezedCommand {
    /// Coefficients b_n by recursion, subset pattern and closed forms.
    Bn(BnArgs),
    /// Normalisation, convergence ratio and state of an LO/MU eigenstate.
    Lomu(LomuArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct BnArgs {
    #[arg(long)]
    pub j: usize,
    #[arg(long)]
    pub k: usize,
    /// Real part of R.
    #[arg(long = "R", allow_hyphen_values = true)]
    pub r: f64,
    /// Imaginary part of R.
    #[arg(long = "R-im", default_value_t = 0.0, allow_hyphen_values = true)]
    pub r_im: f64,
    #[arg(long)]
    pub nmax: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LomuArgs {
    #[arg(long)]
    pub j: usize,
    #[arg(long)]
    pub k: usize,
    /// Squeeze magnitude; sets μ^j = cosh r, ν^j = −e^{iφ} sinh r.
    #[arg(long, conflicts_with_all = ["mu_re", "mu_im", "nu_re", "nu_im"])]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu_im: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta_im: f64,
    /// Include the normalised number-basis state.
    #[arg(long)]
    pub state: bool,
    /// Index range of the convergence-ratio measurement.
    #[arg(long, default_value_t = 2000)]
    pub report_nmax: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl LomuArgs {
    fn params(&self) -> Result<LomuParams, CliError> {
        let beta = C64::new(self.beta_re, self.beta_im);
        let explicit = [self.mu_re, self.mu_im, self.nu_re, self.nu_im];
        match (self.r, explicit.iter().any(Option::is_some)) {
            (Some(r), _) => Ok(LomuParams::from_squeeze(self.j, self.k, r, self.phi, beta)?),
            (None, true) => {
                let mu = C64::new(self.mu_re.unwrap_or(0.0), self.mu_im.unwrap_or(0.0));
                let nu = C64::new(self.nu_re.unwrap_or(0.0), self.nu_im.unwrap_or(0.0));
                Ok(LomuParams::new(self.j, self.k, mu, nu, beta)?)
            }
            (None, false) => Err(CliError::Usage("give either --r [--phi] or --mu-re/--mu-im/--nu-re/--nu-im".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Hpcs,
    Squeezed,
    Figures,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Hpcs => Suite::Hpcs,
            SuiteArg::Squeezed => Suite::Squeezed,
            SuiteArg::Figures => Suite::Figures,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub draws: usize,
    /// Perturb one interference angle of every closed-form density
    /// (negative control; the run is expected to fail).
    #[arg(long)]
    pub mutate: bool,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hpcs: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<i32, CliError> {
    match cmd {
        Command::State(a) => {
            let doc = cmd_state(a)?;
            emit(a.out.as_deref(), &to_json(&doc)?)?;
            Ok(EXIT_OK)
        }
        Command::Density(a) => {
            let grid = GridSpec {
                x_min: a.x_min,
                x_max: a.x_max,
                nx: a.nx,
                t_min: a.t_min,
                t_max: a.t_max,
                nt: a.nt,
            };
            grid.validate(grid::max_points()?)?;
            let csv = grid::density_csv(&a.state.params()?, &grid, a.route)?;
            emit(a.out.as_deref(), &csv)?;
            Ok(EXIT_OK)
        }
        Command::Squeezed(SqueezedCommand::Bn(a)) => {
            let table = bn_table(a)?;
            let text = match a.format {
                Format::Json => to_json(&table)?,
                Format::Csv => table.to_csv(),
            };
            emit(a.out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Squeezed(SqueezedCommand::Lomu(a)) => {
            let doc = cmd_lomu(a)?;
            emit(a.out.as_deref(), &to_json(&doc)?)?;
            Ok(EXIT_OK)
        }
        Command::Verify(a) => cmd_verify(a),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

fn amplitudes(v: &FockVector) -> Vec<[f64; 2]> {
    v.amps().iter().map(|&c| pair(c)).collect()
}

pub fn cmd_state(a: &StateArgs) -> Result<Value, CliError> {
    let p = a.state.params()?;
    let trunc = a.nmax.map_or(Truncation::Auto, Truncation::Fixed);
    let mut params = json!({
        "j": p.j(),
        "k": p.k(),
        "x0": p.x0(),
        "p0": p.p0(),
        "alpha": pair(p.alpha()),
    });
    let v = match (a.r, a.lomu) {
        (None, _) => {
            params["family"] = json!("hpcs");
            hpcs_fock(&p, trunc)?
        }
        (Some(r), false) => {
            if a.nmax.is_some() {
                return Err(CliError::Usage(
                    "--nmax is chosen automatically for squeezed states; drop it or add --lomu".into(),
                ));
            }
            params["family"] = json!("squeezed_hpcs");
            params["r"] = json!(r);
            params["phi"] = json!(a.phi);
            squeeze_hpcs(&SqueezeParams::new(r, a.phi)?, &p)?
        }
        (Some(r), true) => {
            let lp = LomuParams::from_squeeze(p.j(), p.k(), r, a.phi, p.alpha())?;
            params["family"] = json!("lomu");
            params["r"] = json!(r);
            params["phi"] = json!(a.phi);
            params["beta"] = json!(pair(lp.beta()));
            lomu_state(&lp, trunc)?
        }
    };
    Ok(json!({
        "params": params,
        "nmax": v.nmax(),
        "tail_mass": v.tail_mass(),
        "degenerate": v.is_degenerate(),
        "amplitudes": amplitudes(&v),
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedValue {
    pub form: &'static str,
    pub value: Option<[f64; 2]>,
    pub rel_diff: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BnRow {
    pub n: usize,
    pub recursion: [f64; 2],
    pub pattern: Option<[f64; 2]>,
    pub pattern_rel_diff: Option<f64>,
    pub closed: Vec<ClosedValue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BnTable {
    pub j: usize,
    pub k: usize,
    #[serde(rename = "R")]
    pub r: [f64; 2],
    pub nmax: usize,
    pub closed_forms: Vec<&'static str>,
    pub note: Option<String>,
    pub rows: Vec<BnRow>,
}

impl BnTable {
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "# hpcs squeezed bn, version {}", hpcs_core::VERSION);
        let _ = writeln!(s, "# j={} k={} R={:?}+{:?}i nmax={}", self.j, self.k, self.r[0], self.r[1], self.nmax);
        if let Some(n) = &self.note {
            let _ = writeln!(s, "# {n}");
        }
        s.push_str("n,recursion_re,recursion_im,pattern_re,pattern_im,pattern_rel_diff");
        for f in &self.closed_forms {
            let _ = write!(s, ",{f}_re,{f}_im,{f}_rel_diff");
        }
        s.push('\n');
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:?}"));
        for row in &self.rows {
            let _ = write!(
                s,
                "{},{:?},{:?},{},{},{}",
                row.n,
                row.recursion[0],
                row.recursion[1],
                opt(row.pattern.map(|p| p[0])),
                opt(row.pattern.map(|p| p[1])),
                opt(row.pattern_rel_diff)
            );
            for c in &row.closed {
                let _ = write!(
                    s,
                    ",{},{},{}",
                    opt(c.value.map(|p| p[0])),
                    opt(c.value.map(|p| p[1])),
                    opt(c.rel_diff)
                );
            }
            s.push('\n');
        }
        s
    }
}

type ClosedFn = fn(C64, usize, usize) -> hpcs_core::Result<C64>;

fn closed_forms(j: usize, k: usize, r: C64) -> Vec<(&'static str, ClosedFn)> {
    match (j, k) {
        (1, 0) => vec![
            ("sum", |r, _, n| Ok(bn_closed_10(r, n))),
            ("hermite", |r, _, n| bn_closed_10_hermite(r, n)),
            ("hyp1f1", |r, _, n| bn_closed_10_hyp1f1(r, n)),
        ],
        (2, _) if r != C64::new(0.0, 0.0) => vec![("pollaczek", |r, k, n| bn_closed_2k(r, k, n))],
        _ => Vec::new(),
    }
}

pub fn bn_table(a: &BnArgs) -> Result<BnTable, CliError> {
    if a.j == 0 || a.k >= a.j {
        return Err(CliError::Usage(format!("need j ≥ 1 and 0 ≤ k ≤ j−1 (got j = {}, k = {})", a.j, a.k)));
    }
    let r = C64::new(a.r, a.r_im);
    if !(r.re.is_finite() && r.im.is_finite()) {
        return Err(CliError::Usage("R must be finite".into()));
    }
    let rec = bn_recursion(a.j, a.k, r, a.nmax)?;
    let forms = closed_forms(a.j, a.k, r);
    let note = match (forms.is_empty(), a.j, r == C64::new(0.0, 0.0)) {
        (false, _, _) => None,
        (true, 2, true) => Some("R = 0: every b_n is 1; closed form not evaluated".to_string()),
        (true, _, _) => Some("no closed form; recursion only".to_string()),
    };
    let rows = rec
        .iter()
        .enumerate()
        .map(|(n, &b)| {
            let pattern = if n <= BN_PATTERN_MAX { bn_pattern(a.j, a.k, r, n).ok() } else { None };
            let closed = forms
                .iter()
                .map(|(name, f)| match f(r, a.k, n) {
                    Ok(v) => ClosedValue { form: name, value: Some(pair(v)), rel_diff: Some(rel_diff(v, b)), error: None },
                    Err(e) => ClosedValue { form: name, value: None, rel_diff: None, error: Some(e.to_string()) },
                })
                .collect();
            BnRow {
                n,
                recursion: pair(b),
                pattern: pattern.map(pair),
                pattern_rel_diff: pattern.map(|p| rel_diff(p, b)),
                closed,
            }
        })
        .collect();
    Ok(BnTable {
        j: a.j,
        k: a.k,
        r: pair(r),
        nmax: a.nmax,
        closed_forms: forms.iter().map(|(n, _)| *n).collect(),
        note,
        rows,
    })
}

pub fn cmd_lomu(a: &LomuArgs) -> Result<Value, CliError> {
    let lp = a.params()?;
    let ln_norm = lomu_ln_norm_sqr(&lp)?;
    let rep = convergence_report(&lp, a.report_nmax);
    let mut doc = json!({
        "params": {
            "j": lp.j(),
            "k": lp.k(),
            "mu": pair(lp.mu()),
            "nu": pair(lp.nu()),
            "beta": pair(lp.beta()),
            "eigenvalue": pair(lp.eigenvalue()),
            "R": lp.r_param().ok().map(pair),
        },
        "ln_norm_sqr": ln_norm,
        "norm_sqr": ln_norm.exp(),
        "convergence": {
            "nu_over_mu_pow_j": lp.convergence_ratio(),
            "report_nmax": a.report_nmax,
            "even_ratio": rep.even_ratio,
            "odd_ratio": rep.odd_ratio,
            "expected_step_ratio": rep.expected_step_ratio,
            "per_index_ratio": rep.per_index_ratio,
            "expected_per_index": rep.expected_per_index,
            "deviation": rep.deviation,
            "within_tolerance": rep.within_tolerance,
        },
    });
    if a.state {
        let v = lomu_state(&lp, Truncation::Auto)?;
        doc["state"] = json!({
            "nmax": v.nmax(),
            "tail_mass": v.tail_mass(),
            "amplitudes": amplitudes(&v),
        });
    }
    Ok(doc)
}

fn report_json(r: &Report) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "passed": c.passed,
                "measured": c.measured,
                "tolerance": c.tolerance,
                "kind": match c.kind {
                    CheckKind::AtMost => "at_most",
                    CheckKind::AtLeast => "at_least",
                    CheckKind::Info => "info",
                },
                "details": c.details,
            })
        })
        .collect();
    json!({
        "checks": checks,
        "passed": r.passed,
        "seed": r.seed,
        "versions": {
            "hpcs-cli": env!("CARGO_PKG_VERSION"),
            "hpcs-core": hpcs_core::VERSION,
        },
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    let cfg = VerifyConfig {
        seed: a.seed,
        draws: a.draws,
        mutation: a.mutate.then_some(MUTATION),
    };
    let report = run_suite(a.suite.into(), &cfg);
    for c in &report.checks {
        let tag = match (c.is_informational(), c.passed) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        eprintln!("{tag} {} measured={:e} tol={:e} {}", c.name, c.measured, c.tolerance, c.details);
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    eprintln!("{} checks, {} failed", report.checks.len(), failed);
    emit(a.json.as_deref(), &to_json(&report_json(&report))?)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}
