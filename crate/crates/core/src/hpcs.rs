//! Higher-power coherent states `|α; j, k⟩`, the eigenstates of `a^j` with
//! eigenvalue `α^j` supported on `n ≡ k (mod j)`.
//!
//! Units `ħ = m = ω = 1`; `α = (x0 + i p0)/√2`, `A = |α|²`.
//!
//! Three evaluation routes are provided and cross-checked elsewhere:
//! the Fock expansion ([`hpcs_fock`]), the generating-function form
//! ([`psi_series`]) and explicit Gaussian superpositions for `j = 2, 3, 4`
//! ([`psi_closed`], [`rho`]).
//!
//! Phase convention for the Gaussians: a phase-space point `(c, q)` carries
//! `e^{-(x-c)²/2} e^{i(qx - cq/2)}`, which is what the generating function
//! produces term by term. The `printed` submodule keeps the alternative
//! transcriptions so the discrepancies can be reported.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::fock::{
    auto_nmax, basis_state, coherent_state, matrix_exp_apply, FockOperator, FockVector, Truncation,
    DEFAULT_TRUNCATION_TOL,
};
use crate::specfun::{hermite_psi, ln_factorial, sum_tail_bounded, SeriesResult};
use crate::{Error, Result, C64};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpcsParams {
    j: usize,
    k: usize,
    x0: f64,
    p0: f64,
}

impl HpcsParams {
    pub fn new(j: usize, k: usize, x0: f64, p0: f64) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidParameter("j must be positive"));
        }
        if k >= j {
            return Err(Error::InvalidParameter("k must satisfy 0 ≤ k ≤ j−1"));
        }
        if !(x0.is_finite() && p0.is_finite()) {
            return Err(Error::InvalidParameter("x0 and p0 must be finite"));
        }
        Ok(Self { j, k, x0, p0 })
    }

    pub fn from_alpha(j: usize, k: usize, alpha: C64) -> Result<Self> {
        Self::new(j, k, alpha.re * 2f64.sqrt(), alpha.im * 2f64.sqrt())
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn alpha(&self) -> C64 {
        C64::new(self.x0, self.p0) * FRAC_1_SQRT_2
    }

    /// `A = (x0² + p0²)/2`.
    pub fn a_sq(&self) -> f64 {
        0.5 * (self.x0 * self.x0 + self.p0 * self.p0)
    }

    /// Harmonic evolution by time `t`: a clockwise phase-space rotation.
    pub fn evolved(&self, t: f64) -> Self {
        let (s, c) = t.sin_cos();
        Self { x0: self.x0 * c + self.p0 * s, p0: self.p0 * c - self.x0 * s, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    Closed,
}

/// `e^{2πi l/j}`, with the angle reduced first so `l = j` gives exactly 1.
fn root(j: usize, l: usize) -> C64 {
    let l = l % j;
    C64::from_polar(1.0, 2.0 * PI * l as f64 / j as f64)
}

fn series_tol() -> f64 {
    1e-16
}

/// `S(j,k,z) = Σ_n z^{jn+k}/(jn+k)!`.
pub fn sum_s(j: usize, k: usize, z: C64, method: Method) -> Result<C64> {
    check_jk(j, k)?;
    match method {
        Method::Closed => Ok((0..j)
            .map(|l| (z * root(j, l)).exp() * root(j, l * k).conj())
            .fold(C64::zero(), |a, b| a + b)
            / j as f64),
        Method::Series => sum_s_series(j, k, z).map(|r| r.value),
    }
}

/// Series route for [`sum_s`], with its tail diagnostics.
pub fn sum_s_series(j: usize, k: usize, z: C64) -> Result<SeriesResult> {
    check_jk(j, k)?;
    let mut t = C64::zero();
    let zj = z.powu(j as u32);
    sum_tail_bounded(
        |n| {
            if n == 0 {
                t = z.powu(k as u32) / ln_factorial(k).exp();
            } else {
                let base = j * (n - 1) + k;
                let denom: f64 = (1..=j).map(|i| (base + i) as f64).product();
                t = t * zj / denom;
            }
            t
        },
        series_tol(),
        100_000,
    )
}

/// `ln S(j,k,A)` for real `A ≥ 0`, as `A + ln Σ_{m≡k} e^{-A}A^m/m!`.
///
/// The Poisson weights are all positive, so there is no cancellation even
/// when `S` is tiny (small `A`, `k > 0`) or huge (large `A`).
pub fn ln_sum_s_real(j: usize, k: usize, a: f64) -> f64 {
    if a == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let ln_a = a.ln();
    let ln_p = |m: usize| m as f64 * ln_a - a - ln_factorial(m);
    let m0 = k + j * ((a - k as f64).max(0.0) / j as f64).floor() as usize;
    let reference = ln_p(m0).max(ln_p(m0 + j));
    let mut sum = 0.0;
    let mut m = m0;
    loop {
        let w = (ln_p(m) - reference).exp();
        sum += w;
        if m as f64 > a && w < 1e-20 {
            break;
        }
        m += j;
    }
    let mut m = m0;
    while m >= k + j {
        m -= j;
        let w = (ln_p(m) - reference).exp();
        sum += w;
        if w < 1e-20 {
            break;
        }
    }
    a + reference + sum.ln()
}

/// `G(j,k,x,z) = Σ_n z^{jn+k} H_{jn+k}(x)/(jn+k)!`.
pub fn gen_g(j: usize, k: usize, x: f64, z: C64, method: Method) -> Result<C64> {
    check_jk(j, k)?;
    match method {
        Method::Closed => Ok((0..j)
            .map(|l| {
                let w = z * root(j, l);
                (-w * w + w * (2.0 * x)).exp() * root(j, l * k).conj()
            })
            .fold(C64::zero(), |a, b| a + b)
            / j as f64),
        Method::Series => gen_g_series(j, k, x, z).map(|r| r.value),
    }
}

/// Series route for [`gen_g`] through `h_m = z^m H_m(x)/m!`, which obeys
/// `h_{m+1} = (2xz h_m − 2z² h_{m−1})/(m+1)` and never forms `H_m` or `m!`.
pub fn gen_g_series(j: usize, k: usize, x: f64, z: C64) -> Result<SeriesResult> {
    check_jk(j, k)?;
    let (two_xz, two_z2) = (z * (2.0 * x), z * z * 2.0);
    let (mut prev, mut cur, mut m) = (C64::zero(), C64::new(1.0, 0.0), 0usize);
    sum_tail_bounded(
        |n| {
            let target = j * n + k;
            while m < target {
                let next = (two_xz * cur - two_z2 * prev) / (m + 1) as f64;
                prev = cur;
                cur = next;
                m += 1;
            }
            cur
        },
        series_tol(),
        20_000 / j + 10,
    )
}

fn check_jk(j: usize, k: usize) -> Result<()> {
    if j == 0 || k >= j {
        return Err(Error::InvalidParameter("k must satisfy 0 ≤ k ≤ j−1"));
    }
    Ok(())
}

/// Number-basis expansion `c_{jn+k} = α^{jn+k}/√((jn+k)! S(j,k,A))`.
///
/// At `α = 0` with `k > 0` the limit `|k⟩` is returned, flagged degenerate.
pub fn hpcs_fock(p: &HpcsParams, truncation: Truncation) -> Result<FockVector> {
    let (j, k) = (p.j, p.k);
    let a = p.a_sq();
    if a == 0.0 {
        let nmax = match truncation {
            Truncation::Auto => auto_nmax(j, k, 0.0),
            Truncation::Fixed(n) => n,
        };
        let v = basis_state(k, nmax)?;
        return Ok(if k > 0 { v.mark_degenerate() } else { v });
    }
    let ln_s = ln_sum_s_real(j, k, a);
    let ln_r = p.alpha().norm().ln();
    let theta = p.alpha().arg();
    let ln_weight = |m: usize| 2.0 * m as f64 * ln_r - ln_factorial(m) - ln_s;

    let tail_after = |nmax: usize| -> f64 {
        let mut m = if nmax < k { k } else { k + j * ((nmax - k) / j + 1) };
        let mut tail = 0.0;
        loop {
            let w = ln_weight(m).exp();
            tail += w;
            if (m as f64 > a && w < 1e-30 * tail.max(1e-300)) || w == 0.0 && m as f64 > a {
                break;
            }
            m += j;
        }
        tail
    };

    let nmax = match truncation {
        Truncation::Fixed(n) => n,
        Truncation::Auto => {
            let mut n = auto_nmax(j, k, a);
            while tail_after(n) > DEFAULT_TRUNCATION_TOL {
                n = j * (2 * ((n - k) / j).max(1)) + k;
            }
            n
        }
    };
    if nmax < k {
        return Err(Error::IndexOutOfRange { n: k, nmax });
    }

    let mut amps = alloc::vec![C64::zero(); nmax + 1];
    let mut m = k;
    while m <= nmax {
        amps[m] = C64::from_polar((0.5 * ln_weight(m)).exp(), m as f64 * theta);
        m += j;
    }
    FockVector::with_tail(amps, tail_after(nmax))
}

/// `ψ(x) = e^{-x²/2} G(j,k,x,α/√2) / (π^{1/4} S(j,k,A)^{1/2})`.
///
/// The root-of-unity form is summed in log space; for `|α/√2| < 1` the
/// Hermite series is used instead since the closed sum cancels there.
pub fn psi_series(p: &HpcsParams, x: f64) -> Result<C64> {
    let (j, k) = (p.j, p.k);
    let a = p.a_sq();
    if a == 0.0 {
        return Ok(C64::new(hermite_psi(k, x), 0.0));
    }
    let z = p.alpha() * FRAC_1_SQRT_2;
    let ln_s = ln_sum_s_real(j, k, a);
    let quarter_pi = 0.25 * PI.ln();
    if z.norm() < 1.0 {
        let g = gen_g_series(j, k, x, z)?.value;
        return Ok(g * (-0.5 * x * x - 0.5 * ln_s - quarter_pi).exp());
    }
    let mut acc = C64::zero();
    for l in 0..j {
        let w = z * root(j, l);
        let e = -w * w + w * (2.0 * x) - 0.5 * x * x - 0.5 * ln_s - quarter_pi;
        acc += e.exp() * root(j, l * k).conj();
    }
    Ok(acc / j as f64)
}

/// `j e^{-A} S(j,k,A)`: the O(1) normalisation shared by the closed forms.
///
/// For `j ∈ {2,3,4}` and `A ≥ 1` it is evaluated from the trigonometric
/// expressions (e.g. `1 + 2 e^{-3A/2} cos(√3A/2)` for `(3,0)`); otherwise, and
/// for small `A` where those cancel, from [`ln_sum_s_real`].
pub fn closed_norm(j: usize, k: usize, a: f64) -> Result<f64> {
    check_jk(j, k)?;
    if a < 1.0 || !(2..=4).contains(&j) {
        return Ok(j as f64 * (ln_sum_s_real(j, k, a) - a).exp());
    }
    let e2 = (-2.0 * a).exp();
    Ok(match (j, k) {
        (2, 0) => 1.0 + e2,
        (2, 1) => 1.0 - e2,
        (3, _) => {
            let c = 0.5 * SQRT3 * a;
            let damp = (-1.5 * a).exp();
            match k {
                0 => 1.0 + 2.0 * c.cos() * damp,
                1 => 1.0 - (c.cos() - SQRT3 * c.sin()) * damp,
                _ => 1.0 - (c.cos() + SQRT3 * c.sin()) * damp,
            }
        }
        (4, _) => {
            // 2 e^{-A} × (cosh A ± cos A, sinh A ± sin A)
            let (s, c) = a.sin_cos();
            let ea = (-a).exp();
            match k {
                0 => 1.0 + e2 + 2.0 * ea * c,
                1 => 1.0 - e2 + 2.0 * ea * s,
                2 => 1.0 + e2 - 2.0 * ea * c,
                _ => 1.0 - e2 - 2.0 * ea * s,
            }
        }
        _ => unreachable!(),
    })
}

/// One Gaussian `coefficient · e^{-(x-center)²/2} e^{i momentum x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub center: f64,
    pub momentum: f64,
    pub coefficient: C64,
}

impl GaussianTerm {
    pub fn eval(&self, x: f64) -> C64 {
        let d = x - self.center;
        self.coefficient * C64::from_polar((-0.5 * d * d).exp(), self.momentum * x)
    }
}

/// `ψ = Σ_l terms_l(x) / (π^{1/4} √(j N))`, the `j` Gaussians sitting at `α`
/// rotated by multiples of `2π/j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormState {
    pub terms: Vec<GaussianTerm>,
    /// `N = j e^{-A} S(j,k,A)`, see [`closed_norm`].
    pub normalization: f64,
}

impl ClosedFormState {
    pub fn new(p: &HpcsParams) -> Result<Self> {
        let (j, k) = (p.j, p.k);
        let terms = (0..j)
            .map(|l| {
                let w = C64::new(p.x0, p.p0) * root(j, l);
                GaussianTerm {
                    center: w.re,
                    momentum: w.im,
                    coefficient: C64::from_polar(1.0, -0.5 * w.re * w.im) * root(j, l * k).conj(),
                }
            })
            .collect();
        let normalization = closed_norm(j, k, p.a_sq())?;
        if !(normalization > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { terms, normalization })
    }

    pub fn eval(&self, x: f64) -> C64 {
        let j = self.terms.len() as f64;
        let s: C64 = self.terms.iter().map(|t| t.eval(x)).fold(C64::zero(), |a, b| a + b);
        s / (PI.powf(0.25) * (j * self.normalization).sqrt())
    }
}

/// The three Gaussians of `j = 3`, ordered `(Y1, Y2, Y3)`: `Y3` sits at
/// `(x0, p0)`, `Y1` and `Y2` at its rotations by `2π/3` and `4π/3`.
pub fn y_terms(x0: f64, p0: f64, x: f64) -> [C64; 3] {
    let h = 0.5 * SQRT3;
    let sq = SQRT3 / 8.0 * (x0 * x0 - p0 * p0);
    let y1 = gauss(x + (0.5 * x0 + h * p0), x * (h * x0 - 0.5 * p0) + sq + 0.25 * x0 * p0);
    let y2 = gauss(x + (0.5 * x0 - h * p0), -x * (h * x0 + 0.5 * p0) - sq + 0.25 * x0 * p0);
    let y3 = gauss(x - x0, x * p0 - 0.5 * x0 * p0);
    [y1, y2, y3]
}

/// `(φ12, φ13, φ23)` with `φ_ab = arg Y_a − arg Y_b`.
pub fn phi_angles(x0: f64, p0: f64, x: f64) -> [f64; 3] {
    let sq = SQRT3 / 8.0 * (x0 * x0 - p0 * p0);
    [
        x * (SQRT3 * x0) + 2.0 * sq,
        x * (0.5 * SQRT3 * x0 - 1.5 * p0) + sq + 0.75 * x0 * p0,
        -x * (0.5 * SQRT3 * x0 + 1.5 * p0) - sq + 0.75 * x0 * p0,
    ]
}

/// The four Gaussians of `j = 4`, ordered `(Z1, Z2, Z3, Z4)` with centres
/// `x0, p0, −x0, −p0`.
pub fn z_terms(x0: f64, p0: f64, x: f64) -> [C64; 4] {
    let half = 0.5 * x0 * p0;
    [
        gauss(x - x0, p0 * x - half),
        gauss(x - p0, -x0 * x + half),
        gauss(x + x0, -p0 * x - half),
        gauss(x + p0, x0 * x + half),
    ]
}

/// `(θ12, θ13, θ14, θ23, θ24, θ34)` with `θ_ab = arg Z_a − arg Z_b`.
pub fn theta_angles(x0: f64, p0: f64, x: f64) -> [f64; 6] {
    let xp = x0 * p0;
    [
        x * (x0 + p0) - xp,
        2.0 * x * p0,
        x * (p0 - x0) - xp,
        x * (p0 - x0) + xp,
        -2.0 * x * x0,
        -x * (x0 + p0) - xp,
    ]
}

fn gauss(d: f64, phase: f64) -> C64 {
    C64::from_polar((-0.5 * d * d).exp(), phase)
}

/// Explicit Gaussian-superposition wavefunction for `j ∈ {2, 3, 4}`.
pub fn psi_closed(p: &HpcsParams, x: f64) -> Result<C64> {
    let (j, k, x0, p0) = (p.j, p.k, p.x0, p.p0);
    let norm = closed_norm(j, k, p.a_sq())?;
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let denom = PI.powf(0.25) * (j as f64 * norm).sqrt();
    let i = C64::i();
    let one = C64::new(1.0, 0.0);
    let sum = match j {
        2 => {
            let w = C64::new(x0, p0) * x;
            let phase = C64::from_polar(1.0, -0.5 * x0 * p0);
            if k == 1 && w.norm() < 1.0 {
                // g0 − g1 = 2 e^{-(x²+x0²)/2} sinh(x(x0 + i p0)) e^{-i x0 p0/2}
                phase * w.sinh() * (2.0 * (-0.5 * (x * x + x0 * x0)).exp())
            } else {
                let g0 = gauss(x - x0, p0 * x);
                let g1 = gauss(x + x0, -p0 * x);
                phase * if k == 0 { g0 + g1 } else { g0 - g1 }
            }
        }
        3 => {
            let [y1, y2, y3] = y_terms(x0, p0, x);
            let w = C64::new(-0.5, 0.5 * SQRT3);
            match k {
                0 => y1 + y2 + y3,
                1 => w.conj() * y1 + w * y2 + y3,
                _ => w * y1 + w.conj() * y2 + y3,
            }
        }
        4 => {
            let [z1, z2, z3, z4] = z_terms(x0, p0, x);
            let c = match k {
                0 => [one, one, one, one],
                1 => [one, i, -one, -i],
                2 => [one, -one, one, -one],
                _ => [one, -i, -one, i],
            };
            c[0] * z1 + c[1] * z2 + c[2] * z3 + c[3] * z4
        }
        _ => return Err(Error::InvalidParameter("closed forms exist for j ∈ {2,3,4}; use psi_series")),
    };
    Ok(sum / denom)
}

/// Perturbation of one interference angle, used as a negative control.
///
/// `index` counts `φ12, φ13, φ23` for `j = 3`, `θ12 … θ34` for `j = 4`, and
/// the single angle `2 p0 x` for `j = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleShift {
    pub index: usize,
    pub delta: f64,
}

/// Closed-form density `ρ_(j,k)(x, t)` written with interference angles.
pub fn rho(p: &HpcsParams, x: f64, t: f64) -> Result<f64> {
    rho_with(p, x, t, None)
}

pub fn rho_with(p: &HpcsParams, x: f64, t: f64, shift: Option<AngleShift>) -> Result<f64> {
    let q = p.evolved(t);
    let (j, k, x0, p0) = (q.j, q.k, q.x0, q.p0);
    let norm = closed_norm(j, k, q.a_sq())?;
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let bump = |idx: usize, v: f64| match shift {
        Some(s) if s.index == idx => v + s.delta,
        _ => v,
    };
    let pre = 1.0 / (j as f64 * PI.sqrt() * norm);
    let value = match j {
        2 => {
            let a = (-0.5 * (x - x0) * (x - x0)).exp();
            let b = (-0.5 * (x + x0) * (x + x0)).exp();
            let th = bump(0, 2.0 * p0 * x);
            let sign = if k == 0 { 1.0 } else { -1.0 };
            if k == 1 && shift.is_none() && (x * x0).abs() < 1.0 {
                // |g0 − g1|² = 4 e^{-(x²+x0²)} |sinh(x(x0 + i p0))|²
                let s = C64::new(x * x0, x * p0).sinh();
                4.0 * (-(x * x + x0 * x0)).exp() * s.norm_sqr()
            } else {
                a * a + b * b + sign * 2.0 * th.cos() * a * b
            }
        }
        3 => {
            let y = y_terms(x0, p0, x).map(|c| c.norm());
            let ph = phi_angles(x0, p0, x);
            let f = [bump(0, ph[0]), bump(1, ph[1]), bump(2, ph[2])];
            let diag = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
            let (m12, m13, m23) = (y[0] * y[1], y[0] * y[2], y[1] * y[2]);
            match k {
                0 => diag + 2.0 * (f[0].cos() * m12 + f[1].cos() * m13 + f[2].cos() * m23),
                1 => {
                    diag - (f[0].cos() + SQRT3 * f[0].sin()) * m12
                        - (f[1].cos() - SQRT3 * f[1].sin()) * m13
                        - (f[2].cos() + SQRT3 * f[2].sin()) * m23
                }
                _ => {
                    diag - (f[0].cos() - SQRT3 * f[0].sin()) * m12
                        - (f[1].cos() + SQRT3 * f[1].sin()) * m13
                        - (f[2].cos() - SQRT3 * f[2].sin()) * m23
                }
            }
        }
        4 => {
            let z = z_terms(x0, p0, x).map(|c| c.norm());
            let th = theta_angles(x0, p0, x);
            let th: [f64; 6] = core::array::from_fn(|i| bump(i, th[i]));
            let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            let diag: f64 = z.iter().map(|v| v * v).sum();
            // Per pair: (cos weight, sin weight) of 2|Z_a Z_b|.
            let weights: [(f64, f64); 6] = match k {
                0 => [(1.0, 0.0); 6],
                1 => [(0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (-1.0, 0.0), (0.0, 1.0)],
                2 => [(-1.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (-1.0, 0.0)],
                _ => [(0.0, -1.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (-1.0, 0.0), (0.0, -1.0)],
            };
            let cross: f64 = pairs
                .iter()
                .zip(th.iter().zip(&weights))
                .map(|(&(a, b), (&t, &(wc, ws)))| 2.0 * (wc * t.cos() + ws * t.sin()) * z[a] * z[b])
                .sum();
            diag + cross
        }
        _ => return Err(Error::InvalidParameter("closed forms exist for j ∈ {2,3,4}; use psi_series")),
    };
    Ok((pre * value).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `N_±[D(α) ± D(−α)]|0⟩`, normalised, on `0..=nmax`.
pub fn effective_displacement_state(sign: Sign, alpha: C64, nmax: usize) -> Result<FockVector> {
    let plus = coherent_state(alpha, nmax);
    let minus = coherent_state(-alpha, nmax);
    let v = plus.axpy(C64::new(sign.value(), 0.0), &minus);
    if v.norm() <= 1e-300 {
        return Err(Error::ZeroNorm);
    }
    v.normalized()
}

/// Spectral-norm estimate of `D_± D_±† − I` restricted to `|0⟩ … |block−1⟩`.
///
/// `D(±α)` columns are obtained from the matrix exponential of
/// `±(α a† − α* a)` on a basis large enough that the columns fit; since
/// `D_±` commutes with its adjoint the block equals that of `D_±† D_±`,
/// which only needs those columns.
pub fn effective_displacement_nonunitarity(sign: Sign, alpha: C64, block: usize) -> Result<f64> {
    if block == 0 {
        return Err(Error::InvalidParameter("block must be non-empty"));
    }
    let r = alpha.norm();
    let nmax = block + (4.0 * (r + 1.0) * (r + 1.0) + 12.0 * r * (block as f64).sqrt()).ceil() as usize + 60;
    let a = FockOperator::annihilation(nmax);
    let gen = a.adjoint().scale(alpha).sub(&a.scale(alpha.conj()));
    let gen_neg = gen.scale(C64::new(-1.0, 0.0));
    let a2 = (-2.0 * alpha.norm_sqr()).exp();
    let scale = 1.0 / (2.0 * (1.0 + sign.value() * a2)).sqrt();

    let cols: Vec<FockVector> = (0..block)
        .map(|n| {
            let e = basis_state(n, nmax)?;
            let p = matrix_exp_apply(&gen, &e)?;
            let m = matrix_exp_apply(&gen_neg, &e)?;
            Ok(p.axpy(C64::new(sign.value(), 0.0), &m).scaled(C64::new(scale, 0.0)))
        })
        .collect::<Result<_>>()?;
    let dev = FockOperator::from_fn(block - 1, None, |r, c| {
        let g = cols[r].inner(&cols[c]);
        if r == c {
            g - 1.0
        } else {
            g
        }
    });
    Ok(dev.hermitian_norm_estimate(200))
}

/// Transcriptions that differ from the forms used above, kept for the
/// discrepancy report. None of these are used in computation.
pub mod printed {
    use super::{gauss, SQRT3};
    use crate::C64;
    #[allow(unused_imports)]
    use num_traits::Float;

    /// `1 + 2 cos(√3A/2)`, with no `e^{-3A/2}` damping.
    pub fn n30(a: f64) -> f64 {
        1.0 + 2.0 * (0.5 * SQRT3 * a).cos()
    }

    /// `1 − (cos c − sin c) e^{-3A/2}`, without the `√3` on the sine.
    pub fn n31(a: f64) -> f64 {
        let c = 0.5 * SQRT3 * a;
        1.0 - (c.cos() - c.sin()) * (-1.5 * a).exp()
    }

    /// `1 − (cos c + sin c) e^{-3A/2}`, without the `√3` on the sine.
    pub fn n32(a: f64) -> f64 {
        let c = 0.5 * SQRT3 * a;
        1.0 - (c.cos() + c.sin()) * (-1.5 * a).exp()
    }

    /// `Y2` with `+√3/8 (x0² − p0²)` in its constant phase.
    pub fn y2(x0: f64, p0: f64, x: f64) -> C64 {
        let h = 0.5 * SQRT3;
        let sq = SQRT3 / 8.0 * (x0 * x0 - p0 * p0);
        gauss(x + (0.5 * x0 - h * p0), -x * (h * x0 + 0.5 * p0) + sq + 0.25 * x0 * p0)
    }

    /// `φ23` with `+x(√3/2 x0 + 3/2 p0)`.
    pub fn phi23(x0: f64, p0: f64, x: f64) -> f64 {
        x * (0.5 * SQRT3 * x0 + 1.5 * p0) - SQRT3 / 8.0 * (x0 * x0 - p0 * p0) + 0.75 * x0 * p0
    }

    /// `θ24 = 2 x x0`.
    pub fn theta24(x0: f64, x: f64) -> f64 {
        2.0 * x * x0
    }

    /// `Z1 … Z4` with constant phases `∓ x0 p0` instead of `∓ x0 p0/2`.
    pub fn z_terms(x0: f64, p0: f64, x: f64) -> [C64; 4] {
        [
            gauss(x - x0, p0 * (x - x0)),
            gauss(x - p0, -x0 * (x - p0)),
            gauss(x + x0, -p0 * (x + x0)),
            gauss(x + p0, x0 * (x + p0)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_a_power, phase_evolve, position_wavefunction};

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / (a.norm().max(b.norm()) + 1e-300)
    }

    #[test]
    fn params_validation() {
        assert!(HpcsParams::new(2, 2, 0.0, 0.0).is_err());
        assert!(HpcsParams::new(0, 0, 0.0, 0.0).is_err());
        let p = HpcsParams::new(3, 1, 1.0, 2.0).unwrap();
        assert!((p.a_sq() - p.alpha().norm_sqr()).abs() < 1e-15);
        assert!((p.a_sq() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn s_small_cases() {
        let z = C64::new(0.7, -0.3);
        for m in [Method::Series, Method::Closed] {
            assert!(rel(sum_s(2, 0, z, m).unwrap(), z.cosh()) < 1e-14);
            assert!(rel(sum_s(2, 1, z, m).unwrap(), z.sinh()) < 1e-14);
            assert_eq!(sum_s(3, 1, C64::zero(), Method::Series).unwrap(), C64::zero());
            assert!((sum_s(3, 0, C64::zero(), m).unwrap() - 1.0).norm() < 1e-15);
        }
        assert!(sum_s(3, 1, C64::zero(), Method::Closed).unwrap().norm() < 1e-15);
    }

    #[test]
    fn s_series_matches_closed_at_four() {
        let z = C64::new(4.0, 0.0);
        let a = sum_s(3, 1, z, Method::Series).unwrap();
        let b = sum_s(3, 1, z, Method::Closed).unwrap();
        assert!(rel(a, b) < 1e-11);
    }

    #[test]
    fn s_partition_of_exponential() {
        for j in 1..=6 {
            let z = C64::new(2.5, 1.5);
            let total: C64 = (0..j).map(|k| sum_s(j, k, z, Method::Series).unwrap()).sum();
            assert!(rel(total, z.exp()) < 1e-12);
        }
    }

    #[test]
    fn ln_s_real_matches_direct() {
        for (j, k, a) in [(1, 0, 3.0), (3, 2, 0.01), (4, 3, 7.5), (3, 0, 50.0), (5, 4, 0.4)] {
            let direct = sum_s(j, k, C64::new(a, 0.0), Method::Series).unwrap().re.ln();
            assert!((ln_sum_s_real(j, k, a) - direct).abs() < 1e-13, "{j} {k} {a}");
        }
        // Far beyond the range of exp.
        let big = ln_sum_s_real(3, 1, 2000.0);
        assert!((big - (2000.0 - 3f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn g_reduces_to_hermite_generating_function() {
        let (x, z) = (0.8, C64::new(0.4, 0.9));
        let expect = (z * (2.0 * x) - z * z).exp();
        for m in [Method::Series, Method::Closed] {
            assert!(rel(gen_g(1, 0, x, z, m).unwrap(), expect) < 1e-13);
        }
        assert_eq!(gen_g(3, 2, 1.0, C64::zero(), Method::Series).unwrap(), C64::zero());
        assert!(gen_g(3, 2, 1.0, C64::zero(), Method::Closed).unwrap().norm() < 1e-15);
    }

    #[test]
    fn g_series_matches_closed() {
        let z = C64::new(0.8, 0.3);
        let a = gen_g(3, 2, 1.5, z, Method::Series).unwrap();
        let b = gen_g(3, 2, 1.5, z, Method::Closed).unwrap();
        assert!(rel(a, b) < 1e-10);
    }

    #[test]
    fn fock_coherent_and_degenerate() {
        let p = HpcsParams::new(1, 0, 1.1, -0.6).unwrap();
        let v = hpcs_fock(&p, Truncation::Auto).unwrap();
        let c = coherent_state(p.alpha(), v.nmax());
        for (a, b) in v.amps().iter().zip(c.amps()) {
            assert!((a - b).norm() < 1e-14);
        }
        let d = hpcs_fock(&HpcsParams::new(3, 1, 0.0, 0.0).unwrap(), Truncation::Auto).unwrap();
        assert!(d.is_degenerate());
        assert_eq!(d.amps()[1], C64::new(1.0, 0.0));
        let v0 = hpcs_fock(&HpcsParams::new(3, 0, 0.0, 0.0).unwrap(), Truncation::Fixed(5)).unwrap();
        assert!(!v0.is_degenerate());
    }

    #[test]
    fn fock_normalised_and_eigen() {
        let p = HpcsParams::new(3, 1, 0.0, 10.0).unwrap();
        let v = hpcs_fock(&p, Truncation::Auto).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(v.tail_mass() <= DEFAULT_TRUNCATION_TOL);
        let lam = p.alpha().powu(3);
        let r = apply_a_power(&v, 3).axpy(-lam, &v);
        let interior: f64 = r.amps()[..=v.nmax() - 3].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(interior < 1e-8, "{interior}");
    }

    #[test]
    fn three_routes_agree_at_sample_points() {
        for (j, k, x0, p0) in [(2, 1, 3.0, 0.5), (3, 2, 0.0, 10.0), (4, 3, 1.2, -2.0), (3, 0, 0.3, 0.2)] {
            let p = HpcsParams::new(j, k, x0, p0).unwrap();
            let v = hpcs_fock(&p, Truncation::Auto).unwrap();
            let cf = ClosedFormState::new(&p).unwrap();
            for &x in &[-3.1, -0.4, 0.0, 0.9, 2.7] {
                let fock = position_wavefunction(&v, &[x])[0];
                let ser = psi_series(&p, x).unwrap();
                let clo = psi_closed(&p, x).unwrap();
                assert!((fock - ser).norm() < 1e-9, "{j}{k} fock/series at {x}");
                assert!((clo - cf.eval(x)).norm() < 1e-12, "{j}{k} closed/generic at {x}");
                assert!((clo - ser).norm() < 1e-9, "{j}{k} closed/series at {x}");
            }
        }
    }

    #[test]
    fn rho_matches_psi_and_fock_evolution() {
        for (j, k) in [(2, 0), (2, 1), (3, 0), (3, 1), (3, 2), (4, 0), (4, 1), (4, 2), (4, 3)] {
            let p = HpcsParams::new(j, k, 1.7, 2.3).unwrap();
            let v = hpcs_fock(&p, Truncation::Auto).unwrap();
            for &t in &[0.0, 0.4, 2.0] {
                let vt = phase_evolve(&v, t);
                for &x in &[-2.0, 0.1, 1.5] {
                    let r = rho(&p, x, t).unwrap();
                    let from_psi = psi_closed(&p.evolved(t), x).unwrap().norm_sqr();
                    let from_fock = position_wavefunction(&vt, &[x])[0].norm_sqr();
                    assert!((r - from_psi).abs() < 1e-12, "{j}{k} t={t} x={x}");
                    assert!((r - from_fock).abs() < 1e-9, "{j}{k} t={t} x={x}");
                }
            }
        }
    }

    #[test]
    fn angles_are_phase_differences() {
        let (x0, p0, x) = (1.3, -0.7, 0.45);
        let y = y_terms(x0, p0, x);
        let ph = phi_angles(x0, p0, x);
        for (i, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            let d = (y[a] * y[b].conj()).arg();
            assert!((C64::from_polar(1.0, d) - C64::from_polar(1.0, ph[i])).norm() < 1e-12);
        }
        let z = z_terms(x0, p0, x);
        let th = theta_angles(x0, p0, x);
        for (i, (a, b)) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].into_iter().enumerate() {
            let d = (z[a] * z[b].conj()).arg();
            assert!((C64::from_polar(1.0, d) - C64::from_polar(1.0, th[i])).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_norm_matches_s() {
        for j in 2..=4 {
            for k in 0..j {
                for a in [0.3, 1.0, 2.5, 9.0] {
                    let s = sum_s(j, k, C64::new(a, 0.0), Method::Series).unwrap().re;
                    let expect = j as f64 * (-a).exp() * s;
                    assert!((closed_norm(j, k, a).unwrap() - expect).abs() < 1e-12 * expect.max(1.0));
                }
            }
        }
    }

    #[test]
    fn printed_variants_differ() {
        let a = 1.3;
        assert!((printed::n30(a) - closed_norm(3, 0, a).unwrap()).abs() > 0.1);
        assert!((printed::n31(a) - closed_norm(3, 1, a).unwrap()).abs() > 0.01);
        let (x0, p0, x) = (1.3, 0.7, 0.2);
        assert!((printed::y2(x0, p0, x) - y_terms(x0, p0, x)[1]).norm() > 0.01);
        assert!((printed::phi23(x0, p0, x) - phi_angles(x0, p0, x)[2]).abs() > 0.01);
        // θ24 enters only through its cosine.
        let t = theta_angles(x0, p0, x)[4];
        assert!((printed::theta24(x0, x).cos() - t.cos()).abs() < 1e-15);
        assert_eq!(printed::z_terms(x0, 0.0, x), printed::z_terms(x0, 0.0, x));
    }

    #[test]
    fn odd_cat_node_and_small_alpha() {
        for (x0, p0) in [(3.0, 1.0), (1e-4, 2e-4), (0.0, 0.0003)] {
            let p = HpcsParams::new(2, 1, x0, p0).unwrap();
            assert_eq!(psi_closed(&p, 0.0).unwrap().norm(), 0.0);
            let near = psi_closed(&p, 0.7).unwrap();
            let ser = psi_series(&p, 0.7).unwrap();
            assert!((near.norm() - ser.norm()).abs() < 1e-12);
        }
        assert!(psi_closed(&HpcsParams::new(5, 0, 1.0, 0.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn mutation_changes_density() {
        let p = HpcsParams::new(3, 0, 0.0, 10.0).unwrap();
        let t = core::f64::consts::FRAC_PI_2;
        let shift = Some(AngleShift { index: 0, delta: 0.1 });
        let worst = (0..200)
            .map(|i| -7.0 + 0.05 * i as f64)
            .map(|x| (rho(&p, x, t).unwrap() - rho_with(&p, x, t, shift).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(worst > 1e-3, "{worst}");
    }

    #[test]
    fn effective_displacement() {
        let alpha = C64::new(2.0, 0.0);
        let v = effective_displacement_state(Sign::Plus, alpha, 80).unwrap();
        let h = hpcs_fock(&HpcsParams::from_alpha(2, 0, alpha).unwrap(), Truncation::Fixed(80)).unwrap();
        assert!((v.inner(&h).norm() - 1.0).abs() < 1e-10);
        let i = C64::i();
        let w = effective_displacement_state(Sign::Minus, i, 60).unwrap();
        let h1 = hpcs_fock(&HpcsParams::from_alpha(2, 1, i).unwrap(), Truncation::Fixed(60)).unwrap();
        assert!((w.inner(&h1).norm() - 1.0).abs() < 1e-10);
        assert!(matches!(effective_displacement_state(Sign::Minus, C64::zero(), 10), Err(Error::ZeroNorm)));
        let dev = effective_displacement_nonunitarity(Sign::Plus, alpha, 30).unwrap();
        assert!(dev > 0.1, "{dev}");
    }
}
