//! Cross-oracle checks and the report they produce.
//!
//! Every check compares two independent computations (or a computation and
//! an exact property) and records the measured discrepancy next to its
//! tolerance. Informational entries carry known transcription differences
//! and never fail.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fock::{
    apply_a_power, apply_create_power, basis_state, coherent_state, matrix_exp_apply, phase_evolve,
    position_wavefunction, FockOperator, FockVector, Truncation,
};
use crate::hpcs::{
    closed_norm, effective_displacement_nonunitarity, effective_displacement_state, gen_g, hpcs_fock,
    phi_angles, printed, psi_closed, psi_series, rho_with, sum_s, theta_angles, y_terms, z_terms, AngleShift,
    HpcsParams, Method, Sign,
};
use crate::specfun::{hermite, hyp2f1_terminating, pochhammer_real, trapezoid};
use crate::squeezed::{
    bn_closed_10, bn_closed_10_hermite, bn_closed_10_hyp1f1, bn_closed_2k, bn_pattern, bn_recursion,
    convergence_report, do_ss_beta, do_ss_center, do_ss_fock, do_ss_psi, fit_lobe, lomu_psi_2k,
    lomu_psi_2k_norm_sqr, lomu_state, psi_ss_pm, squeeze_hpcs, t_coeff, Lomu2kParams, LomuParams,
    SqueezeParams,
};
use crate::{Error, Result, C64};

pub const DEFAULT_SEED: u64 = 0x5eed_2f1f;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Passes when `measured ≤ tolerance`.
    AtMost,
    /// Passes when `measured ≥ tolerance` (negative controls).
    AtLeast,
    /// Never fails.
    Info,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub details: String,
    pub kind: CheckKind,
}

impl CheckResult {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64, details: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            details: details.into(),
            kind: CheckKind::AtMost,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64, details: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: measured >= tolerance,
            measured,
            tolerance,
            details: details.into(),
            kind: CheckKind::AtLeast,
        }
    }

    pub fn info(name: impl Into<String>, measured: f64, details: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            measured,
            tolerance: f64::NAN,
            details: details.into(),
            kind: CheckKind::Info,
        }
    }

    /// A check whose computation itself failed.
    pub fn errored(name: impl Into<String>, tolerance: f64, err: &Error) -> Self {
        Self {
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            tolerance,
            details: format!("error: {err}"),
            kind: CheckKind::AtMost,
        }
    }

    pub fn is_informational(&self) -> bool {
        self.kind == CheckKind::Info
    }
}

fn check(name: &str, tol: f64, details: impl Into<String>, r: Result<f64>) -> CheckResult {
    match r {
        Ok(m) => CheckResult::at_most(name, m, tol, details),
        Err(e) => CheckResult::errored(name, tol, &e),
    }
}

fn check_at_least(name: &str, tol: f64, details: impl Into<String>, r: Result<f64>) -> CheckResult {
    match r {
        Ok(m) => CheckResult::at_least(name, m, tol, details),
        Err(e) => CheckResult {
            kind: CheckKind::AtLeast,
            ..CheckResult::errored(name, tol, &e)
        },
    }
}

/// `|a − b| / (max(|a|, |b|) + 1e-12)`.
pub fn rel_diff(a: C64, b: C64) -> f64 {
    (a - b).norm() / (a.norm().max(b.norm()) + 1e-12)
}

/// `‖a^j v − λ v‖` over indices `0..=nmax−j`, where `a^j v` is exact.
pub fn eigen_residual(v: &FockVector, j: usize, eigenvalue: C64) -> f64 {
    let r = apply_a_power(v, j).axpy(-eigenvalue, v);
    interior_norm(&r, v.nmax().saturating_sub(j))
}

/// `‖L v − λ v‖` over indices `0..=upto`.
pub fn operator_residual(v: &FockVector, l: &FockOperator, eigenvalue: C64, upto: usize) -> f64 {
    let r = l.apply(v).axpy(-eigenvalue, &v.resized(l.nmax()));
    interior_norm(&r, upto)
}

fn interior_norm(v: &FockVector, upto: usize) -> f64 {
    v.amps().iter().take(upto + 1).map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Second moments of `X = (L + L†)/√2`, `P = (L − L†)/(i√2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyBudget {
    pub dx2: f64,
    pub dp2: f64,
    /// `¼|⟨[X, P]⟩|²`.
    pub commutator_term: f64,
    /// `¼⟨{X − X̄, P − P̄}⟩²`.
    pub anticommutator_term: f64,
    /// `(⟨O⟩/2 + i cov(X, P)) / ΔP²`, `O = −i[X, P]`; real for states
    /// with vanishing covariance.
    pub lagrange_b: C64,
}

impl UncertaintyBudget {
    pub fn product(&self) -> f64 {
        self.dx2 * self.dp2
    }

    /// `(ΔX²ΔP² − commutator_term) / ΔX²ΔP²`.
    pub fn heisenberg_gap(&self) -> f64 {
        (self.product() - self.commutator_term) / self.product()
    }

    /// `(ΔX²ΔP² − commutator_term − anticommutator_term) / ΔX²ΔP²`.
    pub fn schrodinger_gap(&self) -> f64 {
        (self.product() - self.commutator_term - self.anticommutator_term) / self.product()
    }

    /// `|ΔX² − ΔP²| / max(ΔX², ΔP²)`.
    pub fn imbalance(&self) -> f64 {
        (self.dx2 - self.dp2).abs() / self.dx2.max(self.dp2)
    }
}

/// [`UncertaintyBudget`] for `L = a^j`.
pub fn uncertainty_budget(v: &FockVector, j: usize) -> Result<UncertaintyBudget> {
    ladder_budget(v, C64::new(1.0, 0.0), C64::zero(), j)
}

/// [`UncertaintyBudget`] for `L = (μa + νa†)^j`.
///
/// `v` is zero-padded by `2j` so that `Lv` and `L†v` are exact images of the
/// truncated vector.
pub fn ladder_budget(v: &FockVector, mu: C64, nu: C64, j: usize) -> Result<UncertaintyBudget> {
    if j == 0 {
        return Err(Error::InvalidParameter("ladder power j must be positive"));
    }
    if !v.is_normalized() {
        return Err(Error::InvalidParameter("uncertainty budget needs a normalised state"));
    }
    let v = v.resized(v.nmax() + 2 * j);
    let step = |w: &FockVector, m: C64, n: C64| apply_a_power(w, 1).scaled(m).axpy(n, &apply_create_power(w, 1));
    let (mut lv, mut ldv) = (v.clone(), v.clone());
    for _ in 0..j {
        lv = step(&lv, mu, nu);
        ldv = step(&ldv, nu.conj(), mu.conj());
    }
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let xv = lv.axpy(C64::new(1.0, 0.0), &ldv).scaled(C64::new(s, 0.0));
    let pv = lv.axpy(C64::new(-1.0, 0.0), &ldv).scaled(C64::new(0.0, -s));
    let xm = v.inner(&xv).re;
    let pm = v.inner(&pv).re;
    let dx2 = xv.norm_sqr() - xm * xm;
    let dp2 = pv.norm_sqr() - pm * pm;
    let xp = xv.inner(&pv);
    let o = 2.0 * xp.im;
    let cov = xp.re - xm * pm;
    Ok(UncertaintyBudget {
        dx2,
        dp2,
        commutator_term: 0.25 * o * o,
        anticommutator_term: cov * cov,
        lagrange_b: C64::new(0.5 * o, cov) / dp2,
    })
}

/// Pairwise inner products `⟨v_r|v_c⟩`, zero-padding shorter vectors.
pub fn gram_matrix(states: &[FockVector]) -> Vec<Vec<C64>> {
    states.iter().map(|a| states.iter().map(|b| a.inner(b)).collect()).collect()
}

/// Largest entry of `G − I`.
pub fn gram_deviation(g: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (r, row) in g.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

/// One reference density: `(j, k, x0, p0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureState {
    pub j: usize,
    pub k: usize,
    pub x0: f64,
    pub p0: f64,
}

impl FigureState {
    pub fn params(&self) -> Result<HpcsParams> {
        HpcsParams::new(self.j, self.k, self.x0, self.p0)
    }

    pub fn label(&self) -> String {
        format!("({},{})", self.j, self.k)
    }
}

/// The nine published density plots.
pub fn figure_states() -> [FigureState; 9] {
    let f = |j, k, x0, p0| FigureState { j, k, x0, p0 };
    [
        f(2, 0, 2.0 * SQRT_2, 0.0),
        f(2, 1, 10f64.sqrt(), 0.0),
        f(3, 0, 0.0, 10.0),
        f(3, 1, 0.0, 10.0),
        f(3, 2, 0.0, 10.0),
        f(4, 0, 0.0, 10.0),
        f(4, 1, 0.0, 10.0),
        f(4, 2, 0.0, 10.0),
        f(4, 3, 0.0, 10.0),
    ]
}

/// Which checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Hpcs,
    Squeezed,
    Figures,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Seeded parameter draws per randomised check.
    pub draws: usize,
    /// Angle perturbation applied to every closed-form density, to show
    /// that the density comparisons can fail.
    pub mutation: Option<AngleShift>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, draws: 200, mutation: None }
    }
}

/// The standard negative control: `φ12` (or `θ12`) shifted by `0.1`.
pub const MUTATION: AngleShift = AngleShift { index: 0, delta: 0.1 };

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub seed: u64,
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Report {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Hpcs | Suite::All) {
        checks.extend(hpcs_checks(cfg));
    }
    if matches!(suite, Suite::Figures | Suite::All) {
        checks.extend(figure_checks_with(cfg.mutation));
    }
    if matches!(suite, Suite::Squeezed | Suite::All) {
        checks.extend(squeezed_checks(cfg));
    }
    let passed = checks.iter().all(|c| c.passed);
    Report { checks, passed, seed: cfg.seed }
}

/// Density of the number-basis state at time `t` on `xs`.
pub fn fock_density(v: &FockVector, xs: &[f64], t: f64) -> Vec<f64> {
    position_wavefunction(&phase_evolve(v, t), xs).iter().map(|c| c.norm_sqr()).collect()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Eight times spread over one period.
pub fn sample_times() -> [f64; 8] {
    core::array::from_fn(|i| 2.0 * PI * i as f64 / 8.0)
}

pub fn figure_checks() -> Vec<CheckResult> {
    figure_checks_with(None)
}

/// Norm, dual-route, periodicity and shape checks at every reference state.
pub fn figure_checks_with(mutation: Option<AngleShift>) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let norm_xs = grid(-20.0, 20.0, 8001);
    let cmp_xs = grid(-15.0, 15.0, 1201);
    for fs in figure_states() {
        let label = fs.label();
        let params = format!("x0={}, p0={}", fs.x0, fs.p0);
        let p = match fs.params() {
            Ok(p) => p,
            Err(e) => {
                out.push(CheckResult::errored(format!("state{label}"), 0.0, &e));
                continue;
            }
        };
        let rho_at = |x: f64, t: f64| rho_with(&p, x, t, mutation);

        let norm = (|| {
            let mut worst = 0.0f64;
            for t in sample_times() {
                let vals = norm_xs.iter().map(|&x| rho_at(x, t)).collect::<Result<Vec<_>>>()?;
                let h = norm_xs[1] - norm_xs[0];
                let integral = h * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[vals.len() - 1]));
                worst = worst.max((integral - 1.0).abs());
            }
            Ok(worst)
        })();
        out.push(check(&format!("density_norm{label}"), 1e-6, format!("{params}; trapezoid on [-20,20], 8 times"), norm));

        let v = hpcs_fock(&p, Truncation::Auto);
        let dual = v.as_ref().map_err(Clone::clone).and_then(|v| {
            let mut worst = 0.0f64;
            for t in sample_times() {
                for (x, f) in cmp_xs.iter().zip(fock_density(v, &cmp_xs, t)) {
                    worst = worst.max((rho_at(*x, t)? - f).abs());
                }
            }
            Ok(worst)
        });
        let note = if mutation.is_some() { "; closed-form angle perturbed" } else { "" };
        out.push(check(
            &format!("density_dual_route{label}"),
            1e-8,
            format!("{params}; closed form vs number-basis phases, sup on [-15,15]{note}"),
            dual,
        ));

        let triple = v.as_ref().map_err(Clone::clone).and_then(|v| {
            let fock = position_wavefunction(v, &cmp_xs);
            let mut worst = 0.0f64;
            for (x, f) in cmp_xs.iter().zip(fock) {
                let c = psi_closed(&p, *x)?.norm();
                let s = psi_series(&p, *x)?.norm();
                worst = worst.max((c - s).abs()).max((c - f.norm()).abs()).max((s - f.norm()).abs());
            }
            Ok(worst)
        });
        out.push(check(
            &format!("wavefunction_triple_route{label}"),
            1e-8,
            format!("{params}; |closed| vs |series| vs |number basis| at t=0"),
            triple,
        ));

        let periodic = (|| {
            let mut worst = 0.0f64;
            for t in sample_times() {
                for &x in cmp_xs.iter().step_by(4) {
                    worst = worst.max((rho_at(x, t + 2.0 * PI)? - rho_at(x, t)?).abs());
                }
            }
            if let Ok(v) = &v {
                for t in sample_times() {
                    let a = fock_density(v, &cmp_xs[..100], t);
                    let b = fock_density(v, &cmp_xs[..100], t + 2.0 * PI);
                    for (x, y) in a.iter().zip(&b) {
                        worst = worst.max((x - y).abs());
                    }
                }
            }
            Ok(worst)
        })();
        out.push(check(&format!("density_period{label}"), 1e-10, format!("{params}; rho(x,t+2pi) vs rho(x,t)"), periodic));

        if fs.j % 2 == 0 {
            let parity = (|| {
                let mut worst = 0.0f64;
                for t in sample_times() {
                    for &x in cmp_xs.iter().step_by(3) {
                        worst = worst.max((rho_at(x, t)? - rho_at(-x, t)?).abs());
                    }
                }
                Ok(worst)
            })();
            out.push(check(&format!("density_parity{label}"), 1e-10, format!("{params}; rho(x,t) vs rho(-x,t)"), parity));
        }
        if fs.j % 2 == 0 && fs.k % 2 == 1 {
            let node = (|| {
                let mut worst = 0.0f64;
                for t in sample_times() {
                    worst = worst.max(rho_at(0.0, t)?);
                }
                Ok(worst)
            })();
            out.push(check(&format!("central_node{label}"), 1e-12, format!("{params}; rho(0,t) at 8 times"), node));
        }
        if fs.j == 2 {
            out.push(collision_shape(&p, fs.k, mutation));
        }
    }
    out
}

/// At `t = π/2` the two lobes of the `j = 2` states overlap at the origin.
/// Even: `ρ(0) > ρ(±h)`, measured as the margin. Odd: the origin is a node
/// flanked by symmetric peaks, measured as the smallest of the side-peak
/// prominence and the peak symmetry margin.
fn collision_shape(p: &HpcsParams, k: usize, mutation: Option<AngleShift>) -> CheckResult {
    let t = 0.5 * PI;
    let h = 0.05;
    let r = |x: f64| rho_with(p, x, t, mutation);
    if k == 0 {
        let res = (|| Ok(r(0.0)? - r(h)?.max(r(-h)?)))();
        check_at_least("central_peak(2,0)", 1e-12, "rho(0,pi/2) - max rho(±0.05,pi/2)", res)
    } else {
        let res = (|| {
            let xs = grid(h, 4.0, 80);
            let vals = xs.iter().map(|&x| r(x)).collect::<Result<Vec<_>>>()?;
            let (i, peak) = vals.iter().enumerate().fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            if i == 0 || i + 1 == vals.len() {
                return Ok(0.0);
            }
            let mirror = r(-xs[i])?;
            let prominence = peak - r(0.0)?;
            let symmetry = 1.0 - (peak - mirror).abs() / peak;
            Ok(prominence.min(symmetry * peak))
        })();
        check_at_least(
            "central_minimum(2,1)",
            1e-3,
            "rho(0,pi/2) is a node with interior side peaks at ±x*",
            res,
        )
    }
}

/// Condition number of a sum: `Σ|terms| / |Σ terms|`.
fn condition(terms: impl Iterator<Item = C64>) -> f64 {
    let (mut abs, mut sum) = (0.0, C64::zero());
    for t in terms {
        abs += t.norm();
        sum += t;
    }
    abs / sum.norm()
}

/// Draws are accepted only when both routes are well conditioned: each
/// sum loses about `log10(condition)` digits.
const MAX_CONDITION: f64 = 1e4;

fn root(j: usize, l: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (l % j) as f64 / j as f64)
}

fn s_conditions(j: usize, k: usize, z: C64) -> f64 {
    let value = match sum_s(j, k, z, Method::Closed) {
        Ok(v) => v,
        Err(_) => return f64::INFINITY,
    };
    let closed: f64 = (0..j).map(|l| (z * root(j, l)).exp().norm()).sum::<f64>() / j as f64 / value.norm();
    let series = sum_s(j, k, C64::new(z.norm(), 0.0), Method::Closed)
        .map(|a| a.norm() / value.norm())
        .unwrap_or(f64::INFINITY);
    closed.max(series)
}

fn g_conditions(j: usize, k: usize, x: f64, z: C64) -> f64 {
    let closed = condition((0..j).map(|l| {
        let w = z * root(j, l);
        (-w * w + w * (2.0 * x)).exp() * root(j, l * k).conj()
    }));
    // All h_m, not only those with m ≡ k, contribute rounding to the series.
    let (two_xz, two_z2) = (z * (2.0 * x), z * z * 2.0);
    let (mut prev, mut cur) = (C64::zero(), C64::new(1.0, 0.0));
    let (mut abs, mut value) = (0.0, C64::zero());
    let mut m = 0usize;
    let mut quiet = 0;
    while quiet < 40 && m < 20_000 {
        abs += cur.norm();
        if m % j == k {
            value += cur;
        }
        if cur.norm() < 1e-18 * abs {
            quiet += 1;
        } else {
            quiet = 0;
        }
        let next = (two_xz * cur - two_z2 * prev) / (m + 1) as f64;
        prev = cur;
        cur = next;
        m += 1;
    }
    closed.max(abs / value.norm())
}

struct DualStats {
    worst: f64,
    accepted: usize,
    rejected: usize,
}

fn dual_sum_s(cfg: &VerifyConfig) -> Result<DualStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut st = DualStats { worst: 0.0, accepted: 0, rejected: 0 };
    while st.accepted < cfg.draws && st.rejected < 100 * cfg.draws.max(1) {
        let j = rng.gen_range(1..=6);
        let k = rng.gen_range(0..j);
        let z = C64::from_polar(rng.gen_range(0.0..10.0), rng.gen_range(-PI..PI));
        if s_conditions(j, k, z) > MAX_CONDITION {
            st.rejected += 1;
            continue;
        }
        let d = rel_diff(sum_s(j, k, z, Method::Series)?, sum_s(j, k, z, Method::Closed)?);
        st.worst = st.worst.max(d);
        st.accepted += 1;
    }
    Ok(st)
}

fn dual_gen_g(cfg: &VerifyConfig) -> Result<DualStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut st = DualStats { worst: 0.0, accepted: 0, rejected: 0 };
    while st.accepted < cfg.draws && st.rejected < 100 * cfg.draws.max(1) {
        let j = rng.gen_range(1..=6);
        let k = rng.gen_range(0..j);
        let z = C64::from_polar(rng.gen_range(0.0..10.0), rng.gen_range(-PI..PI));
        let x = rng.gen_range(-15.0..15.0);
        if g_conditions(j, k, x, z) > MAX_CONDITION {
            st.rejected += 1;
            continue;
        }
        let d = rel_diff(gen_g(j, k, x, z, Method::Series)?, gen_g(j, k, x, z, Method::Closed)?);
        st.worst = st.worst.max(d);
        st.accepted += 1;
    }
    Ok(st)
}

fn stats_check(name: &str, tol: f64, what: &str, r: Result<DualStats>) -> CheckResult {
    match r {
        Ok(st) => {
            let mut c = CheckResult::at_most(
                name,
                st.worst,
                tol,
                format!(
                    "{what}; {} seeded draws accepted, {} rejected as ill-conditioned (condition > {MAX_CONDITION:e})",
                    st.accepted, st.rejected
                ),
            );
            if st.accepted == 0 {
                c.passed = false;
            }
            c
        }
        Err(e) => CheckResult::errored(name, tol, &e),
    }
}

/// Number-basis and operator checks on the higher-power coherent states.
pub fn hpcs_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(stats_check("sum_s_dual_method", 1e-10, "series vs root-of-unity sum, j<=6, |z|<=10", dual_sum_s(cfg)));
    out.push(stats_check(
        "gen_g_dual_method",
        1e-9,
        "Hermite series vs root-of-unity sum, j<=6, |z|<=10, |x|<=15",
        dual_gen_g(cfg),
    ));

    let mut worst_eigen = 0.0f64;
    let mut worst_heis = 0.0f64;
    let mut worst_balance = 0.0f64;
    let mut floor = 0.0f64;
    let mut failures = Vec::new();
    for fs in figure_states() {
        let r = fs.params().and_then(|p| {
            let v = hpcs_fock(&p, Truncation::Auto)?;
            let e = eigen_residual(&v, fs.j, p.alpha().powu(fs.j as u32));
            let b = uncertainty_budget(&v, fs.j)?;
            Ok((e, b))
        });
        match r {
            Ok((e, b)) => {
                worst_eigen = worst_eigen.max(e);
                worst_heis = worst_heis.max(b.heisenberg_gap().abs());
                worst_balance = worst_balance.max(b.imbalance());
                floor = floor.max(-b.schrodinger_gap());
            }
            Err(e) => failures.push(format!("{}: {e}", fs.label())),
        }
    }
    let fail_note = |f: &Vec<String>| if f.is_empty() { String::new() } else { format!("; failed: {}", f.join(", ")) };
    let with_fail = |mut c: CheckResult, f: &Vec<String>| {
        if !f.is_empty() {
            c.passed = false;
        }
        c
    };
    out.push(with_fail(
        CheckResult::at_most("hpcs_eigen_residual", worst_eigen, 1e-8, format!("||a^j v - alpha^j v|| on the exact interior, reference states{}", fail_note(&failures))),
        &failures,
    ));
    out.push(with_fail(
        CheckResult::at_most("hpcs_heisenberg_equality", worst_heis, 1e-6, "relative gap dX2 dP2 - |<[X,P]>|^2/4, reference states"),
        &failures,
    ));
    out.push(with_fail(
        CheckResult::at_most("hpcs_equal_variances", worst_balance, 1e-6, "|dX2 - dP2| / max, reference states"),
        &failures,
    ));

    // Orthonormal families at each reference displacement.
    let mut worst_gram = 0.0f64;
    let gram = (|| {
        for (j, x0, p0) in [(2, 2.0 * SQRT_2, 0.0), (2, 10f64.sqrt(), 0.0), (3, 0.0, 10.0), (4, 0.0, 10.0)] {
            let states = (0..j)
                .map(|k| hpcs_fock(&HpcsParams::new(j, k, x0, p0)?, Truncation::Auto))
                .collect::<Result<Vec<_>>>()?;
            worst_gram = worst_gram.max(gram_deviation(&gram_matrix(&states)));
        }
        Ok(worst_gram)
    })();
    out.push(check("hpcs_gram_orthonormal", 1e-10, "max |G - I| over the k-families", gram));

    let wrong = (|| {
        let p = HpcsParams::new(3, 0, 0.0, 10.0)?;
        let v = hpcs_fock(&p, Truncation::Auto)?;
        let a3 = p.alpha().powu(3);
        Ok(eigen_residual(&v, 3, -a3) / a3.norm())
    })();
    out.push(check_at_least(
        "wrong_eigenvalue_detected",
        1.99,
        "residual / |alpha|^3 for eigenvalue -alpha^3 on (3,0); 2 expected",
        wrong,
    ));

    let control = thermal_like_control().and_then(|v| {
        let b1 = uncertainty_budget(&v, 1)?;
        let b2 = uncertainty_budget(&v, 2)?;
        floor = floor.max(-b1.schrodinger_gap()).max(-b2.schrodinger_gap());
        Ok(b1.heisenberg_gap().abs().max(b1.imbalance()).min(b2.heisenberg_gap().abs().max(b2.imbalance())))
    });
    out.push(check_at_least(
        "thermal_like_control_gap",
        1e-2,
        "displaced state with thermal populations (q=0.5): violates Heisenberg equality or dX=dP for j=1,2",
        control,
    ));

    let floor_extra = (|| {
        let mut worst = floor;
        for (n, j) in [(0, 1), (3, 1), (5, 2), (7, 3)] {
            let b = uncertainty_budget(&basis_state(n, 40)?, j)?;
            worst = worst.max(-b.schrodinger_gap());
        }
        let b = uncertainty_budget(&coherent_state(C64::new(1.5, -0.5), 80), 2)?;
        Ok(worst.max(-b.schrodinger_gap()))
    })();
    out.push(check("schrodinger_bound_floor", 1e-9, "largest relative violation of dX2 dP2 >= comm + anticomm", floor_extra));

    for (sign, k, name) in [(Sign::Plus, 0, "d_plus"), (Sign::Minus, 1, "d_minus")] {
        for alpha in [C64::new(1.0, 0.5), C64::new(2.0, 0.0)] {
            let overlap = (|| {
                let v = effective_displacement_state(sign, alpha, 80)?;
                let h = hpcs_fock(&HpcsParams::from_alpha(2, k, alpha)?, Truncation::Fixed(80))?;
                Ok((1.0 - v.inner(&h).norm()).abs())
            })();
            out.push(check(&format!("{name}_overlap_alpha{}", alpha), 1e-10, format!("|<D|0> | alpha;2,{k}>| vs 1"), overlap));
        }
        let nonu = effective_displacement_nonunitarity(sign, C64::new(1.0, 0.5), 12);
        out.push(check_at_least(
            &format!("{name}_not_unitary"),
            0.1,
            "||D D^dagger - I|| on the lowest 12 number states, alpha=1+0.5i",
            nonu,
        ));
    }

    out.extend(printed_discrepancies());
    out
}

/// Pure state with populations `(1−q)qⁿ`, `q = 0.5`, displaced by `α = 1`.
pub fn thermal_like_control() -> Result<FockVector> {
    let nmax = 120;
    let q: f64 = 0.5;
    let amps = (0..=nmax).map(|n| C64::new(((1.0 - q) * q.powi(n as i32)).sqrt(), 0.0)).collect();
    let v = FockVector::new(amps)?.normalized()?;
    let a = FockOperator::annihilation(nmax);
    let gen = a.adjoint().sub(&a);
    matrix_exp_apply(&gen, &v)
}

/// Transcription differences, reported but never failing.
pub fn printed_discrepancies() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let a = 2.0;
    let n30 = closed_norm(3, 0, a).map(|n| (printed::n30(a) - n).abs()).unwrap_or(f64::NAN);
    out.push(CheckResult::info(
        "printed_n30",
        n30,
        "printed (3,0) normalisation 1+2cos(sqrt3 A/2) lacks exp(-3A/2) on the cosine; |printed - 3e^-A S(3,0,A)| at A=2",
    ));
    let n3x = closed_norm(3, 1, a)
        .and_then(|n1| closed_norm(3, 2, a).map(|n2| (printed::n31(a) - n1).abs().max((printed::n32(a) - n2).abs())))
        .unwrap_or(f64::NAN);
    out.push(CheckResult::info(
        "printed_n31_n32",
        n3x,
        "printed (3,1)/(3,2) normalisations lack sqrt3 on the sine; deviation at A=2",
    ));
    let (x0, p0) = (1.3, 0.7);
    let xs = grid(-4.0, 4.0, 81);
    let y2 = xs.iter().map(|&x| (printed::y2(x0, p0, x) - y_terms(x0, p0, x)[1]).norm()).fold(0.0, f64::max);
    out.push(CheckResult::info(
        "printed_y2_phase",
        y2,
        "printed Y2 constant phase has +sqrt3/8 (x0^2-p0^2); sign flipped; max amplitude difference at (1.3,0.7)",
    ));
    let phi = xs
        .iter()
        .map(|&x| wrap(printed::phi23(x0, p0, x) - phi_angles(x0, p0, x)[2]).abs())
        .fold(0.0, f64::max);
    out.push(CheckResult::info(
        "printed_phi23",
        phi,
        "printed phi23 x-term sign; max wrapped angle difference at (1.3,0.7)",
    ));
    let z = xs
        .iter()
        .map(|&x| {
            let (pz, cz) = (printed::z_terms(x0, p0, x), z_terms(x0, p0, x));
            (0..4).map(|i| (pz[i] - cz[i]).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    out.push(CheckResult::info(
        "printed_z_phases",
        z,
        "printed Z constant phases -/+ x0 p0 where -/+ x0 p0/2 holds; moduli and densities unaffected",
    ));
    let th = xs
        .iter()
        .map(|&x| (printed::theta24(x0, x).cos() - theta_angles(x0, p0, x)[4].cos()).abs())
        .fold(0.0, f64::max);
    out.push(CheckResult::info(
        "printed_theta24",
        th,
        "printed theta24 has the opposite sign; it only enters through cos, so |cos difference| is reported",
    ));
    let sp = SqueezeParams::new(0.5, 0.0).ok();
    let ss = sp
        .map(|sp| {
            let kappa = ((sp.mu() + sp.nu()) / (sp.mu() - sp.nu())).re;
            let pre = kappa.sqrt() * PI.powf(-0.25);
            trapezoid(|x| (pre * (-0.5 * kappa * x * x).exp()).powi(2), -40.0, 40.0, 8000)
        })
        .unwrap_or(f64::NAN);
    out.push(CheckResult::info(
        "printed_squeezed_prefactor",
        ss,
        "squared norm of the squeezed Gaussian with prefactor [kappa/sqrt(pi)]^(1/2) at r=0.5; (kappa/pi)^(1/4) normalises",
    ));
    out.push(CheckResult::info(
        "effective_squeeze_eigenvalue",
        f64::NAN,
        "the squeezed higher-power state is checked against eigenvalue alpha^j of (mu a + nu a^dagger)^j",
    ));
    out
}

fn wrap(a: f64) -> f64 {
    let t = num_traits::Euclid::rem_euclid(&a, &(2.0 * PI));
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Largest `n` in the seeded `b_n` comparisons.
const BN_CHECK_MAX: usize = 15;

/// Recursion vs subset enumeration vs closed forms over seeded `(j, k, R)`.
fn bn_triangle(cfg: &VerifyConfig) -> Result<(f64, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let mut worst = 0.0f64;
    let mut seen = Vec::new();
    let mut skipped = 0usize;
    for draw in 0..20 {
        // Every fourth draw targets a family with closed forms.
        let (j, k) = match draw % 4 {
            0 => (1, 0),
            1 => (2, rng.gen_range(0..2)),
            _ => {
                let j = rng.gen_range(1..=4);
                (j, rng.gen_range(0..j))
            }
        };
        let r = C64::from_polar(rng.gen_range(0.05..0.6), rng.gen_range(-PI..PI));
        let rec = bn_recursion(j, k, r, BN_CHECK_MAX)?;
        for (n, b) in rec.iter().enumerate() {
            worst = worst.max(rel_diff(*b, bn_pattern(j, k, r, n)?));
            if (j, k) == (1, 0) {
                worst = worst.max(rel_diff(*b, bn_closed_10(r, n)));
                worst = worst.max(rel_diff(*b, bn_closed_10_hermite(r, n)?));
                worst = worst.max(rel_diff(*b, bn_closed_10_hyp1f1(r, n)?));
            }
            if j == 2 {
                if pollaczek_condition(r, k, n) > MAX_CONDITION {
                    skipped += 1;
                } else {
                    worst = worst.max(rel_diff(*b, bn_closed_2k(r, k, n)?));
                }
            }
        }
        seen.push(format!("({j},{k})"));
    }
    Ok((
        worst,
        format!(
            "n<=15, R drawn with |R| in [0.05,0.6]; families {}; {skipped} (2,k) closed-form values skipped as ill-conditioned 2F1 sums",
            seen.join(" ")
        ),
    ))
}

/// Condition number of the terminating `2F1(−n, b; c; 2)` sum behind
/// [`bn_closed_2k`].
fn pollaczek_condition(r: C64, k: usize, n: usize) -> f64 {
    let sr = r.sqrt();
    let c = 0.5 + k as f64;
    let b = C64::new(0.25 + 0.5 * k as f64, 0.0) + C64::i() / (sr * 4.0);
    let mut t = C64::new(1.0, 0.0);
    let mut terms = vec![t];
    for m in 0..n {
        t = t * (m as f64 - n as f64) * (b + m as f64) / ((c + m as f64) * (m + 1) as f64) * 2.0;
        terms.push(t);
    }
    condition(terms.into_iter())
}

/// `H_n(y) = b_n(1,0) (2y)^n` at `R = 1/(2y²)` must satisfy
/// `H_{n+1} = 2y H_n − 2n H_{n−1}` and agree with the Hermite recurrence.
fn hermite_substitution(cfg: &VerifyConfig) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(3));
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let y: f64 = rng.gen_range(0.2..3.0);
        let r = C64::new(1.0 / (2.0 * y * y), 0.0);
        let b = bn_recursion(1, 0, r, BN_CHECK_MAX + 1)?;
        let h: Vec<f64> = b.iter().enumerate().map(|(n, b)| b.re * (2.0 * y).powi(n as i32)).collect();
        for n in 1..BN_CHECK_MAX {
            let lhs = h[n + 1];
            let rhs = 2.0 * y * h[n] - 2.0 * n as f64 * h[n - 1];
            let scale = lhs.abs() + (2.0 * y * h[n]).abs() + (2.0 * n as f64 * h[n - 1]).abs();
            worst = worst.max((lhs - rhs).abs() / scale);
        }
        for (n, hn) in h.iter().enumerate() {
            worst = worst.max(rel_diff(C64::new(*hn, 0.0), C64::new(hermite(n, y)?, 0.0)));
        }
    }
    Ok(worst)
}

/// `F_n = b_n(2,k) / (iⁿ (c)_n 2ⁿ R^{n/2})` must satisfy Gauss's contiguous
/// relation in the first parameter at `z = 2`:
/// `(c+n+1) F_{n+2} + (2b − c) F_{n+1} − (n+1) F_n = 0`.
fn gauss_contiguous(cfg: &VerifyConfig) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(4));
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let k = rng.gen_range(0..2usize);
        let r = C64::from_polar(rng.gen_range(0.05..0.6), rng.gen_range(-PI..PI));
        let sr = r.sqrt();
        let c = 0.5 + k as f64;
        let b = C64::new(0.25 + 0.5 * k as f64, 0.0) + C64::i() / (sr * 4.0);
        let rec = bn_recursion(2, k, r, BN_CHECK_MAX)?;
        let f: Vec<C64> = rec
            .iter()
            .enumerate()
            .map(|(n, bn)| bn / (C64::i().powu(n as u32) * pochhammer_real(c, n) * (sr * 2.0).powu(n as u32)))
            .collect();
        for n in 0..BN_CHECK_MAX - 1 {
            let terms = [f[n + 2] * (c + n as f64 + 1.0), (b * 2.0 - c) * f[n + 1], -f[n] * (n as f64 + 1.0)];
            let scale: f64 = terms.iter().map(|t| t.norm()).sum();
            worst = worst.max((terms[0] + terms[1] + terms[2]).norm() / scale);
            if pollaczek_condition(r, k, n) <= MAX_CONDITION {
                let direct = hyp2f1_terminating(n, b, C64::new(c, 0.0), C64::new(2.0, 0.0))?;
                worst = worst.max(rel_diff(direct, f[n]));
            }
        }
    }
    Ok(worst)
}

/// `b_6` written out: the single-`T` sum, the six admissible pairs
/// (including `T_3 T_5`) and the triple `T_1 T_3 T_5`.
fn b6_expansion() -> Result<f64> {
    let mut worst = 0.0f64;
    for (j, k, r) in [(1, 0, C64::new(0.3, 0.0)), (3, 2, C64::new(0.01, 0.02)), (2, 1, C64::new(-0.1, 0.05))] {
        let t = |n| t_coeff(j, k, n);
        let b6 = C64::new(1.0, 0.0) - r * (t(1) + t(2) + t(3) + t(4) + t(5))
            + r * r * (t(1) * t(3) + t(1) * t(4) + t(1) * t(5) + t(2) * t(4) + t(2) * t(5) + t(3) * t(5))
            - r * r * r * t(1) * t(3) * t(5);
        worst = worst.max(rel_diff(b6, bn_recursion(j, k, r, 6)?[6]));
    }
    Ok(worst)
}

/// Checks on both squeezed families and the `b_n` coefficients.
pub fn squeezed_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    match bn_triangle(cfg) {
        Ok((w, d)) => out.push(CheckResult::at_most("bn_triangle", w, 1e-9, d)),
        Err(e) => out.push(CheckResult::errored("bn_triangle", 1e-9, &e)),
    }
    out.push(check("bn_hermite_substitution", 1e-10, "H_n from b_n(1,0) obeys the Hermite recurrence, 20 seeded y", hermite_substitution(cfg)));
    out.push(check("bn_gauss_contiguous", 1e-10, "2F1 values from b_n(2,k) obey the contiguous relation, 20 seeded R", gauss_contiguous(cfg)));
    out.push(check("bn_six_expansion", 1e-12, "explicit b_6 with the T_3 T_5 pair vs recursion", b6_expansion()));

    // Ladder-operator / minimum-uncertainty states.
    let lomu_cases: [(usize, usize, f64, f64, C64); 6] = [
        (1, 0, 0.5, 0.3, C64::new(0.8, 0.4)),
        (2, 0, 0.3, 0.0, C64::new(1.0, 0.0)),
        (2, 1, 0.3, 0.0, C64::new(1.0, 0.0)),
        (2, 1, 0.4, 1.0, C64::new(-0.7, 1.2)),
        (3, 1, 0.4, 0.0, C64::new(1.3, 0.2)),
        (3, 2, 0.2, -0.6, C64::new(0.0, 1.5)),
    ];
    let mut eig = Ok(0.0f64);
    let mut schr = Ok(0.0f64);
    for &(j, k, r, phi, beta) in &lomu_cases {
        let res: Result<(f64, f64)> = (|| {
            let lp = LomuParams::from_squeeze(j, k, r, phi, beta)?;
            let v = lomu_state(&lp, Truncation::Auto)?;
            let e = operator_residual(&v, &lp.ladder_operator(v.nmax()), lp.eigenvalue(), v.nmax() - j);
            let b = uncertainty_budget(&v, j)?;
            Ok((e, b.schrodinger_gap().abs()))
        })();
        match res {
            Ok((e, s)) => {
                eig = eig.map(|w: f64| w.max(e));
                schr = schr.map(|w: f64| w.max(s));
            }
            Err(e) => {
                eig = Err(e.clone());
                schr = Err(e);
            }
        }
    }
    out.push(check("lomu_eigen_residual", 1e-7, "||(mu^j a^j + nu^j a^dagger^j) v - beta^j v||, j<=3", eig));
    out.push(check("lomu_schrodinger_equality", 1e-6, "relative gap of the Schrodinger relation for X_j, P_j, j<=3", schr));

    for (j, k, r) in [(1, 0, 0.5), (2, 1, 0.3), (3, 0, 0.3)] {
        let rep = LomuParams::from_squeeze(j, k, r, 0.0, C64::new(0.6, 0.0)).map(|lp| convergence_report(&lp, 4000));
        match rep {
            Ok(rep) => out.push(CheckResult::at_most(
                format!("lomu_convergence_ratio({j},{k})"),
                rep.deviation,
                0.05,
                format!(
                    "r={r}: two-step ratio {:.6} (even) {:.6} (odd) vs |nu/mu|^2j = {:.6}; per index {:.6} vs |nu/mu|^j = {:.6}",
                    rep.even_ratio, rep.odd_ratio, rep.expected_step_ratio, rep.per_index_ratio, rep.expected_per_index
                ),
            )),
            Err(e) => out.push(CheckResult::errored(format!("lomu_convergence_ratio({j},{k})"), 0.05, &e)),
        }
    }
    let zero = LomuParams::from_squeeze(2, 1, 0.0, 0.0, C64::new(1.0, 0.0)).map(|lp| convergence_report(&lp, 200).even_ratio);
    out.push(check("lomu_convergence_ratio_unsqueezed", 1e-6, "nu=0: ratio tends to 0", zero));

    let reduces = (|| {
        let beta = C64::new(1.2, -0.4);
        let mut worst = 0.0f64;
        for k in 0..3 {
            let lp = LomuParams::from_squeeze(3, k, 0.0, 0.0, beta)?;
            let v = lomu_state(&lp, Truncation::Auto)?;
            let h = hpcs_fock(&HpcsParams::from_alpha(3, k, beta)?, Truncation::Auto)?;
            worst = worst.max((1.0 - v.inner(&h).norm()).abs());
        }
        Ok(worst)
    })();
    out.push(check("lomu_unsqueezed_is_hpcs", 1e-10, "nu=0 overlap modulus with |beta;3,k>", reduces));

    let do_ss = (|| {
        let sp = SqueezeParams::new(0.4, 0.7)?;
        let beta = C64::new(0.8, 0.5);
        let lp = LomuParams::from_squeeze(1, 0, sp.r(), sp.phi(), beta)?;
        let v = lomu_state(&lp, Truncation::Auto)?;
        let (x0, p0) = do_ss_center(&sp, beta);
        let d = do_ss_fock(&sp, x0, p0, v.nmax())?;
        Ok((1.0 - v.inner(&d).norm()).abs())
    })();
    out.push(check("lomu_j1_is_squeezed_gaussian", 1e-8, "(1,0) overlap modulus with the projected squeezed Gaussian", do_ss));

    let psi2k = (|| {
        let mut worst = 0.0f64;
        for k in 0..2 {
            let lp = LomuParams::from_squeeze(2, k, 0.3, 0.0, C64::new(1.0, 0.0))?;
            let l2 = Lomu2kParams::from_lomu(&lp)?;
            let v = lomu_state(&lp, Truncation::Auto)?;
            let norm = lomu_psi_2k_norm_sqr(&l2, k, 20.0, 8000)?.sqrt();
            let xs = grid(-10.0, 10.0, 201);
            for (x, f) in xs.iter().zip(position_wavefunction(&v, &xs)) {
                worst = worst.max((lomu_psi_2k(&l2, k, *x)?.norm() / norm - f.norm()).abs());
            }
        }
        Ok(worst)
    })();
    out.push(check("lomu_psi_2k_vs_number_basis", 1e-6, "|1F1 wavefunction| vs |number-basis wavefunction|, r=0.3, beta=1", psi2k));

    // Displacement-operator squeezed states.
    let variance = (|| {
        let sp = SqueezeParams::new(0.5, 0.0)?;
        let m1 = trapezoid(|x| x * do_ss_psi(&sp, 0.3, 0.0, x).norm_sqr(), -30.0, 30.0, 6000);
        let m2 = trapezoid(|x| x * x * do_ss_psi(&sp, 0.3, 0.0, x).norm_sqr(), -30.0, 30.0, 6000);
        Ok((m2 - m1 * m1 - 0.5 * 1f64.exp()).abs())
    })();
    out.push(check("squeezed_gaussian_variance", 1e-9, "position variance e^{2r}/2 at r=0.5", variance));

    let gauss_eigen = (|| {
        let sp = SqueezeParams::new(0.4, 0.9)?;
        let (x0, p0) = (1.1, -0.6);
        let v = do_ss_fock(&sp, x0, p0, 90)?;
        let beta = do_ss_beta(&sp, x0, p0);
        let r = apply_a_power(&v, 1).scaled(sp.mu()).axpy(sp.nu(), &apply_create_power(&v, 1)).axpy(-beta, &v);
        Ok(interior_norm(&r, 88))
    })();
    out.push(check("squeezed_gaussian_eigen", 1e-8, "(mu a + nu a^dagger) psi = beta psi in the number basis", gauss_eigen));

    let mut eff_eig = Ok(0.0f64);
    let mut eff_heis = Ok(0.0f64);
    let mut eff_norm = Ok(0.0f64);
    for (j, k) in [(2, 0), (2, 1), (3, 0), (3, 2)] {
        let res: Result<(f64, f64, f64)> = (|| {
            let sp = SqueezeParams::new(0.3, 0.0)?;
            let p = HpcsParams::from_alpha(j, k, C64::new(1.0, 0.5))?;
            let w = squeeze_hpcs(&sp, &p)?;
            let l = sp.ladder_power(j, w.nmax());
            let e = operator_residual(&w, &l, p.alpha().powu(j as u32), w.nmax() - j);
            let b = ladder_budget(&w, sp.mu(), sp.nu(), j)?;
            Ok((e, b.heisenberg_gap().abs().max(b.imbalance()), (w.norm() - 1.0).abs()))
        })();
        match res {
            Ok((e, h, n)) => {
                eff_eig = eff_eig.map(|x: f64| x.max(e));
                eff_heis = eff_heis.map(|x: f64| x.max(h));
                eff_norm = eff_norm.map(|x: f64| x.max(n));
            }
            Err(e) => {
                eff_eig = Err(e.clone());
                eff_heis = Err(e.clone());
                eff_norm = Err(e);
            }
        }
    }
    let eff_note = "S(z)|alpha;j,k>, r=0.3, alpha=1+0.5i, (j,k) in (2,0),(2,1),(3,0),(3,2)";
    out.push(check("effective_squeeze_eigen_residual", 1e-7, format!("(mu a + nu a^dagger)^j eigenvalue alpha^j; {eff_note}"), eff_eig));
    out.push(check("effective_squeeze_heisenberg", 1e-6, format!("Heisenberg equality and equal variances; {eff_note}"), eff_heis));
    out.push(check("effective_squeeze_norm", 1e-8, eff_note, eff_norm));

    let cat = (|| {
        let r = 0.3;
        let sp = SqueezeParams::new(r, 0.0)?;
        let mut worst = 0.0f64;
        let mut fits = Vec::new();
        for k in 0..2 {
            let w = squeeze_hpcs(&sp, &HpcsParams::new(2, k, 4.0, 1.0)?)?;
            let psi = |x: f64| position_wavefunction(&w, &[x])[0];
            let fit = fit_lobe(psi, 4.0 * r.exp(), 0.05)?;
            let sign = if k == 0 { 1.0 } else { -1.0 };
            let xs = grid(-12.0, 12.0, 241);
            for (x, f) in xs.iter().zip(position_wavefunction(&w, &xs)) {
                worst = worst.max((psi_ss_pm(fit.width, fit.center, fit.momentum, sign, *x).norm() - f.norm()).abs());
            }
            fits.push(fit);
        }
        Ok((worst, fits))
    })();
    match cat {
        Ok((w, fits)) => out.push(CheckResult::at_most(
            "squeezed_cat_wavefunction",
            w,
            1e-6,
            format!(
                "(2,k) at (4,1), r=0.3: fitted s={:.9}, centre={:.9}, momentum={:.9} (e^r, e^r x0, e^-r p0 = {:.9}, {:.9}, {:.9})",
                fits[0].width,
                fits[0].center,
                fits[0].momentum,
                0.3f64.exp(),
                4.0 * 0.3f64.exp(),
                (-0.3f64).exp()
            ),
        )),
        Err(e) => out.push(CheckResult::errored("squeezed_cat_wavefunction", 1e-6, &e)),
    }
    out
}
