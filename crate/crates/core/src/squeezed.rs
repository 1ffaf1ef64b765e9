//! Squeezed higher-power states.
//!
//! Two families:
//!
//! * "effective" displacement-operator states `S(z)|α; j, k⟩`, eigenstates of
//!   `(μa + νa†)^j` with eigenvalue `α^j` ([`squeeze_hpcs`]);
//! * ladder-operator/minimum-uncertainty states, eigenstates of
//!   `μ^j a^j + ν^j a†^j` with eigenvalue `β^j` ([`lomu_state`]), whose Fock
//!   coefficients `c_n = b_n B^{nj+k}/√((nj+k)!)` follow a three-term recursion.
//!
//! The single-mode squeeze is `S(z) = exp(z a†²/2 − z* a²/2)`, `z = r e^{iφ}`,
//! with `S a S⁻¹ = μa + νa†`, `μ = cosh r`, `ν = −e^{iφ} sinh r`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::fock::{
    basis_state, guard_band, matrix_exp_apply_with, FockOperator, FockVector, Truncation,
};
use crate::hpcs::{hpcs_fock, HpcsParams};
use crate::specfun::{
    hermite_complex, hermite_psi_all, hyp1f1, ln_factorial, hyp1f1_scaled, hyp2f1_terminating, pochhammer_real,
    trapezoid, CompensatedSum, Hyp1f1Config,
};
use crate::{Error, Result, C64};

/// Leakage accepted by [`squeeze_hpcs`] before it enlarges the basis.
const SQUEEZE_LEAK_TOL: f64 = 1e-10;
/// Largest basis [`squeeze_hpcs`] will try.
const SQUEEZE_MAX_NMAX: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    r: f64,
    phi: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidParameter("squeeze needs finite r ≥ 0 and finite φ"));
        }
        Ok(Self { r, phi })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn z(&self) -> C64 {
        C64::from_polar(self.r, self.phi)
    }

    pub fn mu(&self) -> C64 {
        C64::new(self.r.cosh(), 0.0)
    }

    pub fn nu(&self) -> C64 {
        -C64::from_polar(self.r.sinh(), self.phi)
    }

    /// `z a†²/2 − z* a²/2` on `0..=nmax`.
    pub fn generator(&self, nmax: usize) -> FockOperator {
        let a2 = FockOperator::annihilation(nmax).power(2);
        let z = self.z();
        a2.adjoint().scale(z * 0.5).sub(&a2.scale(z.conj() * 0.5))
    }

    /// `(μa + νa†)^j` on `0..=nmax`.
    pub fn ladder_power(&self, j: usize, nmax: usize) -> FockOperator {
        let a = FockOperator::annihilation(nmax);
        a.scale(self.mu()).add(&a.adjoint().scale(self.nu())).power(j)
    }
}

/// `β = [(μ+ν)x0 + i(μ−ν)p0]/√2`.
pub fn do_ss_beta(sp: &SqueezeParams, x0: f64, p0: f64) -> C64 {
    let (mu, nu) = (sp.mu(), sp.nu());
    ((mu + nu) * x0 + C64::i() * (mu - nu) * p0) * FRAC_1_SQRT_2
}

/// Inverse of [`do_ss_beta`]: the `(x0, p0)` giving eigenvalue `β`.
pub fn do_ss_center(sp: &SqueezeParams, beta: C64) -> (f64, f64) {
    let (u, w) = (sp.mu() + sp.nu(), sp.mu() - sp.nu());
    let (bx, by) = (beta.re * 2f64.sqrt(), beta.im * 2f64.sqrt());
    // [Re u, −Im w; Im u, Re w] (x0, p0)ᵀ = (bx, by)ᵀ
    let det = u.re * w.re + w.im * u.im;
    ((bx * w.re + w.im * by) / det, (u.re * by - u.im * bx) / det)
}

/// Squeezed Gaussian `(Re κ/π)^{1/4} exp(−κ(x−x0)²/2 + i p0 x)`,
/// `κ = (μ+ν)/(μ−ν)`; an eigenfunction of `μa + νa†` with eigenvalue
/// [`do_ss_beta`].
pub fn do_ss_psi(sp: &SqueezeParams, x0: f64, p0: f64, x: f64) -> C64 {
    let kappa = (sp.mu() + sp.nu()) / (sp.mu() - sp.nu());
    let d = x - x0;
    let pre = (kappa.re / PI).powf(0.25);
    (-kappa * (0.5 * d * d) + C64::new(0.0, p0 * x)).exp() * pre
}

/// Number-basis projection `c_n = ∫ ψ_n ψ dx` of [`do_ss_psi`] on `0..=nmax`.
pub fn do_ss_fock(sp: &SqueezeParams, x0: f64, p0: f64, nmax: usize) -> Result<FockVector> {
    let kappa = (sp.mu() + sp.nu()) / (sp.mu() - sp.nu());
    let half = (80.0 / kappa.re).sqrt();
    let (lo, hi) = (x0 - half, x0 + half);
    let wave = p0.abs() + kappa.im.abs() * half + (2.0 * nmax as f64 + 1.0).sqrt();
    let h = (2.0 * PI / wave / 16.0).min(0.02);
    let steps = ((hi - lo) / h).ceil() as usize;
    let h = (hi - lo) / steps as f64;
    let mut acc = vec![CompensatedSum::default(); nmax + 1];
    for i in 0..=steps {
        let x = lo + h * i as f64;
        let w = if i == 0 || i == steps { 0.5 * h } else { h };
        let f = do_ss_psi(sp, x0, p0, x) * w;
        for (a, p) in acc.iter_mut().zip(hermite_psi_all(nmax, x)) {
            a.add(f * p);
        }
    }
    FockVector::new(acc.iter().map(|a| a.value()).collect())
}

/// `S(z)|α; j, k⟩` by a matrix exponential, enlarging the basis until less
/// than `1e-10` of norm reaches the guard band.
pub fn squeeze_hpcs(sp: &SqueezeParams, p: &HpcsParams) -> Result<FockVector> {
    let v = hpcs_fock(p, Truncation::Auto)?;
    if sp.r == 0.0 {
        return Ok(v);
    }
    let mut nmax = ((v.nmax() as f64) * (2.0 * sp.r).exp()).ceil() as usize + 40 + 8 * (1.0 + sp.r).powi(2) as usize;
    loop {
        match matrix_exp_apply_with(&sp.generator(nmax), &v, guard_band(nmax), SQUEEZE_LEAK_TOL) {
            Ok(w) => return Ok(w),
            Err(Error::GuardBand { .. }) if nmax < SQUEEZE_MAX_NMAX => nmax = (2 * nmax).min(SQUEEZE_MAX_NMAX),
            Err(e) => return Err(e),
        }
    }
}

/// Ladder-operator/minimum-uncertainty parameters: eigenstates of
/// `μ^j a^j + ν^j a†^j` with eigenvalue `β^j`, `|μ^j|² − |ν^j|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LomuParams {
    j: usize,
    k: usize,
    mu: C64,
    nu: C64,
    beta: C64,
}

impl LomuParams {
    pub fn new(j: usize, k: usize, mu: C64, nu: C64, beta: C64) -> Result<Self> {
        if j == 0 || k >= j {
            return Err(Error::InvalidParameter("k must satisfy 0 ≤ k ≤ j−1"));
        }
        if ![mu, nu, beta].iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidParameter("μ, ν and β must be finite"));
        }
        let lp = Self { j, k, mu, nu, beta };
        let ratio = lp.convergence_ratio();
        if !(ratio < 1.0) {
            return Err(Error::NotNormalizable { ratio });
        }
        let constraint = lp.mu_j().norm_sqr() - lp.nu_j().norm_sqr();
        if (constraint - 1.0).abs() > 1e-12 * lp.mu_j().norm_sqr().max(1.0) {
            return Err(Error::InvalidParameter("|μ^j|² − |ν^j|² must equal 1"));
        }
        Ok(lp)
    }

    /// `μ^j = cosh r`, `ν^j = −e^{iφ} sinh r`; `μ` and `ν` are the principal
    /// `j`-th roots.
    pub fn from_squeeze(j: usize, k: usize, r: f64, phi: f64, beta: C64) -> Result<Self> {
        let sp = SqueezeParams::new(r, phi)?;
        Self::new(j, k, principal_root(sp.mu(), j), principal_root(sp.nu(), j), beta)
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mu(&self) -> C64 {
        self.mu
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn mu_j(&self) -> C64 {
        self.mu.powu(self.j as u32)
    }

    pub fn nu_j(&self) -> C64 {
        self.nu.powu(self.j as u32)
    }

    /// Eigenvalue `β^j`.
    pub fn eigenvalue(&self) -> C64 {
        self.beta.powu(self.j as u32)
    }

    /// `B = β/μ` (the Fock-coefficient ratio).
    pub fn ratio_b(&self) -> C64 {
        self.beta / self.mu
    }

    /// `R = (νμ/β²)^j`; undefined at `β = 0`.
    pub fn r_param(&self) -> Result<C64> {
        if self.beta == C64::zero() {
            return Err(Error::InvalidParameter("R is undefined for β = 0"));
        }
        Ok((self.nu * self.mu / (self.beta * self.beta)).powu(self.j as u32))
    }

    /// `|ν/μ|^j`.
    pub fn convergence_ratio(&self) -> f64 {
        (self.nu.norm() / self.mu.norm()).powi(self.j as i32)
    }

    /// `μ^j a^j + ν^j a†^j` on `0..=nmax`.
    pub fn ladder_operator(&self, nmax: usize) -> FockOperator {
        let aj = FockOperator::annihilation(nmax).power(self.j);
        aj.scale(self.mu_j()).add(&aj.adjoint().scale(self.nu_j()))
    }
}

fn principal_root(z: C64, j: usize) -> C64 {
    if z == C64::zero() {
        return z;
    }
    C64::from_polar(z.norm().powf(1.0 / j as f64), z.arg() / j as f64)
}

/// `T_n(j,k) = ((n−1)j + k + 1)_j = (nj+k)!/((n−1)j+k)!`, with `T_0 = 0`.
pub fn t_coeff(j: usize, k: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    pochhammer_real(((n - 1) * j + k + 1) as f64, j)
}

/// `b_0 … b_nmax` from `b_{n+2} = b_{n+1} − R T_{n+1} b_n`, `b_0 = b_1 = 1`.
pub fn bn_recursion(j: usize, k: usize, r: C64, nmax: usize) -> Result<Vec<C64>> {
    if j == 0 || k >= j {
        return Err(Error::InvalidParameter("k must satisfy 0 ≤ k ≤ j−1"));
    }
    let mut b = Vec::with_capacity(nmax + 1);
    b.push(C64::new(1.0, 0.0));
    if nmax >= 1 {
        b.push(C64::new(1.0, 0.0));
    }
    for n in 0..nmax.saturating_sub(1) {
        let next = b[n + 1] - r * t_coeff(j, k, n + 1) * b[n];
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::Overflow { last_finite: n + 1 });
        }
        b.push(next);
    }
    Ok(b)
}

/// Largest `n` accepted by [`bn_pattern`].
pub const BN_PATTERN_MAX: usize = 24;

/// `b_n = Σ_t (−R)^t Σ T_{v_1} ⋯ T_{v_t}` over `1 ≤ v_1 < … < v_t ≤ n−1`
/// with consecutive indices at least two apart.
pub fn bn_pattern(j: usize, k: usize, r: C64, n: usize) -> Result<C64> {
    if n > BN_PATTERN_MAX {
        return Err(Error::InvalidParameter("bn_pattern enumerates subsets only up to n = 24"));
    }
    if j == 0 || k >= j {
        return Err(Error::InvalidParameter("k must satisfy 0 ≤ k ≤ j−1"));
    }
    let t: Vec<f64> = (0..n).map(|v| t_coeff(j, k, v)).collect();
    // by_size[t] = Σ over admissible index sets of size t.
    let mut by_size = vec![0.0f64; n / 2 + 2];
    fn walk(start: usize, n: usize, size: usize, prod: f64, t: &[f64], by_size: &mut [f64]) {
        by_size[size] += prod;
        for v in start..n {
            walk(v + 2, n, size + 1, prod * t[v], t, by_size);
        }
    }
    walk(1, n, 0, 1.0, &t, &mut by_size);
    let mut acc = CompensatedSum::default();
    let mut pow = C64::new(1.0, 0.0);
    for s in by_size {
        acc.add(pow * s);
        pow *= -r;
    }
    Ok(acc.value())
}

/// `b_n(1,0) = Σ_t (−R)^t n!/(2^t t! (n−2t)!)`.
pub fn bn_closed_10(r: C64, n: usize) -> C64 {
    let mut coeff = 1.0;
    let mut pow = C64::new(1.0, 0.0);
    let mut acc = CompensatedSum::default();
    for t in 0..=n / 2 {
        acc.add(pow * coeff);
        let m = (n - 2 * t) as f64;
        coeff *= m * (m - 1.0) / (2.0 * (t + 1) as f64);
        pow *= -r;
    }
    acc.value()
}

/// `b_n(1,0) = (R/2)^{n/2} H_n((2R)^{-1/2})`, principal square root.
pub fn bn_closed_10_hermite(r: C64, n: usize) -> Result<C64> {
    if r == C64::zero() {
        return Err(Error::InvalidParameter("Hermite form needs R ≠ 0"));
    }
    let s = (r * 0.5).sqrt();
    Ok(s.powu(n as u32) * hermite_complex(n, (s * 2.0).inv()))
}

/// `b_n(1,0) = (−R/2)^{[n/2]} n!/[n/2]! 1F1(−[n/2]; (2 + (−1)^{n+1})/2; 1/(2R))`.
pub fn bn_closed_10_hyp1f1(r: C64, n: usize) -> Result<C64> {
    if r == C64::zero() {
        return Err(Error::InvalidParameter("1F1 form needs R ≠ 0"));
    }
    let m = n / 2;
    let b = if n % 2 == 0 { 0.5 } else { 1.5 };
    let ratio: f64 = ((m + 1)..=n).map(|i| i as f64).product();
    let f = hyp1f1(C64::new(-(m as f64), 0.0), C64::new(b, 0.0), (r * 2.0).inv())?;
    Ok((-r * 0.5).powu(m as u32) * ratio * f.value)
}

/// `b_n(2,k) = iⁿ (½+k)_n 2ⁿ R^{n/2} 2F1(−n, ¼ + k/2 + i/(4√R); ½ + k; 2)`.
pub fn bn_closed_2k(r: C64, k: usize, n: usize) -> Result<C64> {
    if k > 1 {
        return Err(Error::InvalidParameter("j = 2 requires k ∈ {0, 1}"));
    }
    if r == C64::zero() {
        return Err(Error::InvalidParameter("Pollaczek form needs R ≠ 0"));
    }
    let sr = r.sqrt();
    let c = 0.5 + k as f64;
    let b = C64::new(0.25 + 0.5 * k as f64, 0.0) + C64::i() / (sr * 4.0);
    let f = hyp2f1_terminating(n, b, C64::new(c, 0.0), C64::new(2.0, 0.0))?;
    Ok(C64::i().powu(n as u32) * pochhammer_real(c, n) * (sr * 2.0).powu(n as u32) * f)
}

/// Pollaczek polynomial `P_n(x, δ) = iⁿ √((2δ)_n/n!) 2F1(−n, δ + ix; 2δ; 2)`.
pub fn pollaczek(n: usize, x: C64, delta: f64) -> Result<C64> {
    let scale = (1..=n).fold(1.0, |acc, i| acc * (2.0 * delta + (i - 1) as f64) / i as f64).sqrt();
    let f = hyp2f1_terminating(n, C64::new(delta, 0.0) + C64::i() * x, C64::new(2.0 * delta, 0.0), C64::new(2.0, 0.0))?;
    Ok(C64::i().powu(n as u32) * scale * f)
}

/// Iterates the regular coefficient recursion
/// `μ^j √T_{n+1} c_{n+1} + ν^j √T_n c_{n−1} = β^j c_n`, `c_0 = 1`,
/// yielding `c_n = mantissa · e^{ln_scale}`.
struct CoeffSeq {
    j: usize,
    k: usize,
    bj: C64,
    nj: C64,
    mj: C64,
    n: usize,
    prev: C64,
    cur: C64,
    ln_scale: f64,
}

impl CoeffSeq {
    fn new(lp: &LomuParams) -> Self {
        Self {
            j: lp.j,
            k: lp.k,
            bj: lp.eigenvalue(),
            nj: lp.nu_j(),
            mj: lp.mu_j(),
            n: 0,
            prev: C64::zero(),
            cur: C64::new(1.0, 0.0),
            ln_scale: 0.0,
        }
    }

    /// Current `(n, mantissa, ln_scale)`.
    fn current(&self) -> (usize, C64, f64) {
        (self.n, self.cur, self.ln_scale)
    }

    fn advance(&mut self) {
        let t_n = t_coeff(self.j, self.k, self.n).sqrt();
        let t_next = t_coeff(self.j, self.k, self.n + 1).sqrt();
        let next = (self.bj * self.cur - self.nj * t_n * self.prev) / (self.mj * t_next);
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        let s = self.cur.norm().max(self.prev.norm());
        if s > 1e100 || (s < 1e-100 && s > 0.0) {
            self.prev /= s;
            self.cur /= s;
            self.ln_scale += s.ln();
        }
    }
}

fn ln_norm_sqr(m: C64, ln_scale: f64) -> f64 {
    let a = m.norm_sqr();
    if a == 0.0 {
        f64::NEG_INFINITY
    } else {
        a.ln() + 2.0 * ln_scale
    }
}

/// Hard cap on recursion length.
const LOMU_MAX_TERMS: usize = 400_000;

/// `ln |c_n|²` for `n = 0..count` with `c_0 = 1`.
pub fn lomu_ln_terms(lp: &LomuParams, count: usize) -> Vec<f64> {
    let mut seq = CoeffSeq::new(lp);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        if i > 0 {
            seq.advance();
        }
        let (_, m, s) = seq.current();
        out.push(ln_norm_sqr(m, s));
    }
    out
}

/// `c_n = mantissa · e^{ln_scale}` up to the point where the remainder of
/// `Σ|c_n|²` is negligible.
struct CoeffTable {
    coeffs: Vec<(C64, f64)>,
    /// `ln Σ|c_n|²` over the kept terms.
    ln_sum: f64,
    /// Bound on the remainder relative to the kept sum.
    tail_rel: f64,
}

/// Runs the recursion until at least `min_terms` terms are kept and a
/// geometric bound on the remainder, built from the observed two-step
/// ratios and their limit `|ν/μ|^{2j}`, is below `1e-16` of the sum.
fn lomu_coefficients(lp: &LomuParams, min_terms: usize) -> Result<CoeffTable> {
    let q = lp.convergence_ratio().powi(2);
    let mut seq = CoeffSeq::new(lp);
    let mut coeffs: Vec<(C64, f64)> = Vec::new();
    let mut ln_t: Vec<f64> = Vec::new();
    let mut sum = CompensatedSum::default();
    let mut ln_ref = 0.0;
    loop {
        let (n, m, s) = seq.current();
        let lt = ln_norm_sqr(m, s);
        if lt > ln_ref {
            sum = sum.scaled((ln_ref - lt).exp());
            ln_ref = lt;
        }
        sum.add(C64::new((lt - ln_ref).exp(), 0.0));
        coeffs.push((m, s));
        ln_t.push(lt);

        if n >= 4 && n + 1 >= min_terms {
            let step = |a: usize, b: usize| {
                if ln_t[b] == f64::NEG_INFINITY {
                    0.0
                } else {
                    (ln_t[a] - ln_t[b]).exp()
                }
            };
            let rho = step(n, n - 2).max(step(n - 1, n - 3)).max(q);
            if rho < 1.0 {
                let last = (ln_t[n] - ln_ref).exp() + (ln_t[n - 1] - ln_ref).exp();
                let bound = last * rho / (1.0 - rho);
                let total = sum.value().re;
                if bound <= 1e-16 * total {
                    return Ok(CoeffTable { coeffs, ln_sum: ln_ref + total.ln(), tail_rel: bound / total });
                }
            }
        }
        if n >= LOMU_MAX_TERMS {
            return Err(Error::NonConvergence { partial: sum.value(), terms: n + 1 });
        }
        seq.advance();
    }
}

/// Normalised LO/MU state on the support `{nj + k}`.
///
/// Coefficients come from the recursion in `c_n` (regular at `β = 0`); the
/// normalisation is summed with compensation.
pub fn lomu_state(lp: &LomuParams, truncation: Truncation) -> Result<FockVector> {
    let (j, k) = (lp.j, lp.k);
    let min_terms = match truncation {
        Truncation::Auto => 0,
        Truncation::Fixed(nm) => nm.saturating_sub(k) / j + 1,
    };
    let table = lomu_coefficients(lp, min_terms)?;
    let nmax = match truncation {
        Truncation::Auto => (table.coeffs.len() - 1) * j + k,
        Truncation::Fixed(nm) => nm,
    };
    if nmax < k {
        return Err(Error::IndexOutOfRange { n: k, nmax });
    }
    let mut amps = vec![C64::zero(); nmax + 1];
    let mut dropped = 0.0;
    for (n, (m, s)) in table.coeffs.iter().enumerate() {
        let idx = n * j + k;
        let amp = if *m == C64::zero() {
            C64::zero()
        } else {
            *m / m.norm() * (m.norm().ln() + s - 0.5 * table.ln_sum).exp()
        };
        if idx <= nmax {
            amps[idx] = amp;
        } else {
            dropped += amp.norm_sqr();
        }
    }
    FockVector::with_tail(amps, dropped + table.tail_rel)
}

/// `ln 𝒩²` with `𝒩² = Σ_n |B|^{2(nj+k)} |b_n|² / (nj+k)!`, `B = β/μ`.
///
/// Summed through the regular `c_n` recursion, so `β = 0` gives `ln 1` for
/// `k = 0` and `−∞` otherwise.
pub fn lomu_ln_norm_sqr(lp: &LomuParams) -> Result<f64> {
    let table = lomu_coefficients(lp, 0)?;
    let k = lp.k as f64;
    let b = lp.ratio_b().norm();
    if lp.k == 0 {
        return Ok(table.ln_sum);
    }
    if b == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(table.ln_sum + 2.0 * k * b.ln() - ln_factorial(lp.k))
}

/// Large-`n` behaviour of the normalisation terms `|c_n|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    /// Mean two-step ratio `|c_{n+2}|²/|c_n|²` over the last window of even `n`.
    pub even_ratio: f64,
    /// Same for odd `n`.
    pub odd_ratio: f64,
    /// Limit of the two-step ratio, `|ν/μ|^{2j}`.
    pub expected_step_ratio: f64,
    /// `√even_ratio`, the ratio per index step.
    pub per_index_ratio: f64,
    /// `|ν/μ|^j`.
    pub expected_per_index: f64,
    /// Largest relative deviation of the measured two-step ratios from the
    /// limit (absolute deviation when the limit is zero).
    pub deviation: f64,
    pub within_tolerance: bool,
}

/// Fraction of the index range averaged over in [`convergence_report`].
const REPORT_WINDOW: f64 = 0.1;

/// Measures the two-step ratios of `|c_n|²` near `n = nmax` (geometric mean
/// over the last 10% of indices, which smooths oscillating `b_n`) and compares
/// them to `|ν/μ|^{2j}` with a 5% tolerance.
pub fn convergence_report(lp: &LomuParams, nmax: usize) -> ConvergenceReport {
    let nmax = nmax.max(8);
    let lt = lomu_ln_terms(lp, nmax + 1);
    let window = (((nmax as f64) * REPORT_WINDOW) as usize / 2).max(1);
    let mean_ratio = |end: usize| -> f64 {
        let start = end - 2 * window;
        if lt[end] == f64::NEG_INFINITY || lt[start] == f64::NEG_INFINITY {
            return 0.0;
        }
        ((lt[end] - lt[start]) / window as f64).exp()
    };
    let even_end = nmax - nmax % 2;
    let odd_end = if nmax % 2 == 1 { nmax } else { nmax - 1 };
    let even_ratio = mean_ratio(even_end);
    let odd_ratio = mean_ratio(odd_end);
    let expected = lp.convergence_ratio().powi(2);
    let dev = |r: f64| if expected > 0.0 { (r - expected).abs() / expected } else { r };
    let odd_live = lt.iter().skip(1).step_by(2).any(|v| v.is_finite());
    let deviation = if odd_live { dev(even_ratio).max(dev(odd_ratio)) } else { dev(even_ratio) };
    ConvergenceReport {
        even_ratio,
        odd_ratio,
        expected_step_ratio: expected,
        per_index_ratio: even_ratio.sqrt(),
        expected_per_index: lp.convergence_ratio(),
        deviation,
        within_tolerance: deviation <= 0.05,
    }
}

/// `U = (μ²−ν²)/(μ²+ν²)` and `Bw = β²/(μ²+ν²)` of the `j = 2` wavefunctions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lomu2kParams {
    pub u: C64,
    pub bw: C64,
}

impl Lomu2kParams {
    pub fn new(u: C64, bw: C64) -> Self {
        Self { u, bw }
    }

    pub fn from_lomu(lp: &LomuParams) -> Result<Self> {
        if lp.j != 2 {
            return Err(Error::InvalidParameter("the 1F1 wavefunctions exist for j = 2"));
        }
        let (m2, n2) = (lp.mu_j(), lp.nu_j());
        let d = m2 + n2;
        if d == C64::zero() {
            return Err(Error::InvalidParameter("μ² + ν² must be non-zero"));
        }
        Ok(Self { u: (m2 - n2) / d, bw: lp.eigenvalue() / d })
    }

    /// `√(U² − 1)`, principal branch, formed as `√((U−1)(U+1))`.
    pub fn root(&self) -> C64 {
        ((self.u - 1.0) * (self.u + 1.0)).sqrt()
    }
}

/// Unnormalised `x^k exp(−x²(U+s)/2) 1F1(¼ + k/2 + Bw/(2s); ½ + k; s x²)`,
/// `s = √(U²−1)`.
pub fn lomu_psi_2k(l2: &Lomu2kParams, k: usize, x: f64) -> Result<C64> {
    if k > 1 {
        return Err(Error::InvalidParameter("j = 2 requires k ∈ {0, 1}"));
    }
    let s = l2.root();
    if !((l2.u + s).re > 0.0 && (l2.u - s).re > 0.0) {
        return Err(Error::InvalidParameter("non-normalisable: need Re(U ± √(U²−1)) > 0"));
    }
    let xk = if k == 1 { x } else { 1.0 };
    if s == C64::zero() {
        if l2.bw == C64::zero() {
            return Ok(C64::new(xk * (-0.5 * x * x).exp(), 0.0));
        }
        return Err(Error::InvalidParameter("U = 1 with β ≠ 0 is a limit; perturb U"));
    }
    let a = C64::new(0.25 + 0.5 * k as f64, 0.0) + l2.bw / (s * 2.0);
    let b = C64::new(0.5 + k as f64, 0.0);
    let z = s * (x * x);
    let ln_scale = z.re.max(0.0);
    let cfg = Hyp1f1Config { radius: 1e4, max_terms: 100_000, ..Default::default() };
    let f = hyp1f1_scaled(a, b, z, ln_scale, &cfg)?;
    Ok((-(l2.u + s) * (0.5 * x * x) + ln_scale).exp() * f.value * xk)
}

/// `∫ |lomu_psi_2k|² dx` over `[−half_width, half_width]` by the trapezoid rule.
pub fn lomu_psi_2k_norm_sqr(l2: &Lomu2kParams, k: usize, half_width: f64, steps: usize) -> Result<f64> {
    let h = 2.0 * half_width / steps as f64;
    let vals = (0..=steps)
        .map(|i| lomu_psi_2k(l2, k, -half_width + h * i as f64).map(|c| c.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(trapezoid(|x| vals[(((x + half_width) / h).round() as usize).min(steps)], -half_width, half_width, steps))
}

/// Even (`sign = +1`) or odd (`−1`) squeezed state for real squeeze:
/// normalised `g(x; x0, p0) ± g(x; −x0, −p0)` with `g(y) = e^{−y²/(2s²) + i p0 x}`.
pub fn psi_ss_pm(s: f64, x0: f64, p0: f64, sign: f64, x: f64) -> C64 {
    let overlap = (-(x0 * x0) / (s * s) - p0 * p0 * s * s).exp();
    let norm = (PI.sqrt() * 2.0 * s * (1.0 + sign * overlap)).sqrt();
    let g = |c: f64, q: f64| C64::new(-(x - c) * (x - c) / (2.0 * s * s), q * x).exp();
    (g(x0, p0) + g(-x0, -p0) * sign) / norm
}

/// Width, centre and momentum of one Gaussian lobe `e^{−(x−c)²/(2s²) + ipx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobeFit {
    pub width: f64,
    pub center: f64,
    pub momentum: f64,
}

/// Fits a single Gaussian lobe near `x`: three-point parabola through
/// `ln|ψ|` and a centred phase difference.
pub fn fit_lobe(psi: impl Fn(f64) -> C64, x: f64, h: f64) -> Result<LobeFit> {
    let (m, c, p) = (psi(x - h), psi(x), psi(x + h));
    if m == C64::zero() || c == C64::zero() || p == C64::zero() {
        return Err(Error::InvalidParameter("lobe fit needs non-zero samples"));
    }
    let (lm, lc, lp) = (m.norm().ln(), c.norm().ln(), p.norm().ln());
    let d2 = (lp - 2.0 * lc + lm) / (h * h);
    if !(d2 < 0.0) {
        return Err(Error::InvalidParameter("no Gaussian lobe at the fit point"));
    }
    let d1 = (lp - lm) / (2.0 * h);
    Ok(LobeFit { width: (-1.0 / d2).sqrt(), center: x - d1 / d2, momentum: (p / m).arg() / (2.0 * h) })
}

/// `|0⟩` squeezed by `sp` (exact, for tests and controls).
pub fn squeezed_vacuum(sp: &SqueezeParams, nmax: usize) -> Result<FockVector> {
    matrix_exp_apply_with(&sp.generator(nmax), &basis_state(0, nmax)?, guard_band(nmax), SQUEEZE_LEAK_TOL)
}
