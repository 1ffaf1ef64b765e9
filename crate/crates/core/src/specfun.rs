//! Scalar special functions: Hermite polynomials and oscillator
//! eigenfunctions, Pochhammer symbols, terminating `2F1`, the confluent
//! `1F1`, and tail-bounded summation of infinite series.

use alloc::vec::Vec;
use core::f64::consts::PI;

// Float supplies the math methods without std; with std in the graph it is redundant.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::{Error, Result, C64};

/// Largest Hermite degree [`hermite`] accepts by default.
pub const DEFAULT_MAX_HERMITE_DEGREE: usize = 400;

/// Number of consecutive decaying terms required before the ratio-based tail
/// estimate of [`sum_tail_bounded`] is trusted.
const TRUSTED_RATIO_RUN: usize = 5;
/// A term ratio at or above this counts as "not yet decaying".
const DECAY_RATIO: f64 = 0.99;

/// A summed series together with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: C64,
    pub terms_used: usize,
    /// Estimated magnitude of the dropped remainder.
    pub tail_bound: f64,
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    hermite_with_max(n, x, DEFAULT_MAX_HERMITE_DEGREE)
}

pub fn hermite_with_max(n: usize, x: f64, max_degree: usize) -> Result<f64> {
    if n > max_degree {
        return Err(Error::DegreeOverflow { n, max: max_degree });
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for m in 0..n {
        let next = 2.0 * x * cur - 2.0 * m as f64 * prev;
        prev = cur;
        cur = next;
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(Error::DegreeOverflow { n, max: max_degree })
    }
}

/// `H_n(z)` for complex argument.
pub fn hermite_complex(n: usize, z: C64) -> C64 {
    let (mut prev, mut cur) = (C64::zero(), C64::new(1.0, 0.0));
    for m in 0..n {
        let next = z * cur * 2.0 - prev * (2.0 * m as f64);
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalised oscillator eigenfunction
/// `ψ_n(x) = e^{-x²/2} H_n(x) / (π^{1/2} 2^n n!)^{1/2}`.
///
/// Uses the normalised recurrence with a running exponent, so it stays finite
/// for `n` in the tens of thousands and only underflows where the true value
/// does.
pub fn hermite_psi(n: usize, x: f64) -> f64 {
    let mut out = 0.0;
    walk_hermite_psi(n, x, |m, v| {
        if m == n {
            out = v;
        }
    });
    out
}

/// `ψ_0(x), …, ψ_nmax(x)`.
pub fn hermite_psi_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    walk_hermite_psi(nmax, x, |_, v| out.push(v));
    out
}

fn walk_hermite_psi(nmax: usize, x: f64, mut sink: impl FnMut(usize, f64)) {
    const RESCALE: f64 = 1e150;
    let ln_rescale = RESCALE.ln();
    let mut ln_scale = -0.5 * x * x - 0.25 * PI.ln();
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    sink(0, cur * ln_scale.exp());
    for m in 0..nmax {
        let mf = m as f64;
        let next = x * (2.0 / (mf + 1.0)).sqrt() * cur - (mf / (mf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            ln_scale += ln_rescale;
        }
        sink(m + 1, cur * ln_scale.exp());
    }
}

/// Rising factorial `(a)_n = a (a+1) … (a+n-1)`, `(a)_0 = 1`.
pub fn pochhammer(a: C64, n: usize) -> C64 {
    (0..n).fold(C64::new(1.0, 0.0), |acc, i| acc * (a + i as f64))
}

pub fn pochhammer_real(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (a + i as f64))
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// If `c` is `0, -1, -2, …` returns its magnitude.
fn nonpositive_integer(c: C64) -> Option<usize> {
    (c.im == 0.0 && c.re <= 0.0 && c.re.fract() == 0.0).then(|| (-c.re) as usize)
}

/// Terminating Gauss series `2F1(-n, b; c; z)`, summed forward over its
/// `n + 1` terms.
pub fn hyp2f1_terminating(n: usize, b: C64, c: C64, z: C64) -> Result<C64> {
    if let Some(m) = nonpositive_integer(c) {
        if m < n {
            return Err(Error::InvalidParameter(
                "2F1 lower parameter is a non-positive integer inside the terminating range",
            ));
        }
    }
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for i in 0..n {
        let fi = i as f64;
        term = term * (fi - n as f64) * (b + fi) / ((c + fi) * (fi + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

/// Limits for the confluent series.
#[derive(Debug, Clone, Copy)]
pub struct Hyp1f1Config {
    /// Largest `|z|` accepted for non-terminating series.
    pub radius: f64,
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl Default for Hyp1f1Config {
    fn default() -> Self {
        Self { radius: 200.0, max_terms: 5000, rel_tol: 1e-16 }
    }
}

/// Kummer's `1F1(a; b; z)` by its power series.
pub fn hyp1f1(a: C64, b: C64, z: C64) -> Result<SeriesResult> {
    hyp1f1_scaled(a, b, z, 0.0, &Hyp1f1Config::default())
}

/// `e^{-ln_scale} · 1F1(a; b; z)`.
///
/// Terms are carried as mantissa and exponent so that the scaled result is
/// representable even when `1F1` itself is not (large positive `z`).
pub fn hyp1f1_scaled(
    a: C64,
    b: C64,
    z: C64,
    ln_scale: f64,
    config: &Hyp1f1Config,
) -> Result<SeriesResult> {
    if nonpositive_integer(b).is_some() {
        return Err(Error::InvalidParameter("1F1 lower parameter is a non-positive integer"));
    }
    let terminating = nonpositive_integer(a);
    if terminating.is_none() && z.norm() > config.radius {
        return Err(Error::InvalidParameter("1F1 argument exceeds the configured radius"));
    }

    if let Some(m) = terminating {
        let mut mantissa = C64::new(1.0, 0.0);
        let mut ln_mag = 0.0;
        let mut sum = CompensatedSum::default();
        for n in 0..=m {
            if n > 0 {
                let f = (n - 1) as f64;
                mantissa = mantissa * (a + f) / ((b + f) * (f + 1.0)) * z;
                let s = mantissa.norm();
                if s > 1e100 || (s < 1e-100 && s > 0.0) {
                    ln_mag += s.ln();
                    mantissa /= s;
                }
            }
            sum.add(mantissa * (ln_mag - ln_scale).exp());
        }
        return Ok(SeriesResult { value: sum.value(), terms_used: m + 1, tail_bound: 0.0 });
    }
    if z == C64::zero() {
        return Ok(SeriesResult { value: C64::new((-ln_scale).exp(), 0.0), terms_used: 1, tail_bound: 0.0 });
    }

    // The partial sum is kept in units of e^{ln_ref}, ln_ref being the
    // largest term exponent so far, so neither end of the series underflows.
    let (zn, bn, amb) = (z.norm(), b.norm(), (a - b).norm());
    let mut phase = C64::new(1.0, 0.0);
    let mut ln_t = 0.0;
    let mut ln_ref = 0.0;
    let mut sum = CompensatedSum::default();
    for n in 0..config.max_terms.max(1) {
        if n > 0 {
            let f = (n - 1) as f64;
            let step = (a + f) / ((b + f) * (f + 1.0)) * z;
            let s = step.norm();
            ln_t += s.ln();
            phase = phase * step / s;
        }
        if ln_t > ln_ref {
            sum = sum.scaled((ln_ref - ln_t).exp());
            ln_ref = ln_t;
        }
        let t = phase * (ln_t - ln_ref).exp();
        sum.add(t);

        // For m ≥ n > |b|, |t_{m+1}/t_m| ≤ (1 + |a−b|/(n−|b|))·|z|/(n+1).
        let f = n as f64;
        if f > bn {
            let bound = (1.0 + amb / (f - bn)) * zn / (f + 1.0);
            if bound < 1.0 {
                let tail = t.norm() * bound / (1.0 - bound);
                let total = sum.value();
                if tail <= config.rel_tol * total.norm() {
                    let unscale = (ln_ref - ln_scale).exp();
                    return Ok(SeriesResult {
                        value: total * unscale,
                        terms_used: n + 1,
                        tail_bound: tail * unscale,
                    });
                }
            }
        }
    }
    Err(Error::NonConvergence {
        partial: sum.value() * (ln_ref - ln_scale).exp(),
        terms: config.max_terms,
    })
}

/// Sums `term(0) + term(1) + …` until the ratio-based tail estimate drops
/// below `rel_tol · |partial sum|`.
///
/// `term` is called with `n = 0, 1, 2, …` in order, so stateful generators
/// (running recurrences) are fine. Exact zeros are skipped when measuring
/// ratios; a series whose first two terms are both zero is treated as
/// identically zero. The estimate `|t_last| ρ / (1 - ρ)` is only used after
/// [`TRUSTED_RATIO_RUN`] consecutive ratios below 0.99, with `ρ` the largest
/// of those ratios.
pub fn sum_tail_bounded(
    mut term: impl FnMut(usize) -> C64,
    rel_tol: f64,
    max_terms: usize,
) -> Result<SeriesResult> {
    let mut sum = CompensatedSum::default();
    let mut last_nonzero: Option<f64> = None;
    let mut recent = [0.0f64; TRUSTED_RATIO_RUN];
    let mut run = 0usize;
    let mut zero_run = 0usize;

    for n in 0..max_terms.max(1) {
        let t = term(n);
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::NonConvergence { partial: sum.value(), terms: n + 1 });
        }
        sum.add(t);
        let mag = t.norm();

        let ratio = if mag == 0.0 {
            zero_run += 1;
            if zero_run >= 2 && last_nonzero.is_none() {
                return Ok(SeriesResult { value: C64::zero(), terms_used: n + 1, tail_bound: 0.0 });
            }
            Some(0.0)
        } else {
            zero_run = 0;
            let r = last_nonzero.map(|prev| mag / prev);
            last_nonzero = Some(mag);
            r
        };

        if let Some(r) = ratio {
            if r < DECAY_RATIO {
                recent[run % TRUSTED_RATIO_RUN] = r;
                run += 1;
            } else {
                run = 0;
            }
        }
        if run >= TRUSTED_RATIO_RUN {
            let rho = recent.iter().copied().fold(0.0, f64::max);
            let tail = last_nonzero.unwrap_or(0.0) * rho / (1.0 - rho);
            if tail <= rel_tol * sum.value().norm() {
                return Ok(SeriesResult { value: sum.value(), terms_used: n + 1, tail_bound: tail });
            }
        }
    }
    Err(Error::NonConvergence { partial: sum.value(), terms: max_terms })
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: C64) {
        let (re, cre) = two_sum(self.sum.re, x.re);
        let (im, cim) = two_sum(self.sum.im, x.im);
        self.sum = C64::new(re, im);
        self.comp += C64::new(cre, cim);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { sum: self.sum * s, comp: self.comp * s }
    }
}

fn two_sum(s: f64, x: f64) -> (f64, f64) {
    let t = s + x;
    let c = if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
    (t, c)
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::zero(),
        1 => xs[0],
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Composite trapezoid rule with `steps` panels on `[a, b]`.
pub fn trapezoid(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let steps = steps.max(1);
    let h = (b - a) / steps as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for i in 1..steps {
        acc += f(a + i as f64 * h);
    }
    acc * h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite(1, 2.0).unwrap(), 4.0);
        // 8x³ − 12x at x = 2
        assert_eq!(hermite(3, 2.0).unwrap(), 40.0);
    }

    #[test]
    fn hermite_degree_limit() {
        assert!(matches!(hermite(401, 0.5), Err(Error::DegreeOverflow { .. })));
        assert!(hermite_with_max(150, 0.1, 1000).is_ok());
        // Genuine double overflow is reported as well.
        assert!(hermite_with_max(400, 30.0, 1000).is_err());
    }

    #[test]
    fn psi_ground_state_and_parity() {
        assert!((hermite_psi(0, 0.0) - 0.7511255444649425).abs() < 1e-15);
        assert_eq!(hermite_psi(1, 0.0), 0.0);
        for n in 0..12 {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(close(hermite_psi(n, -1.3), s * hermite_psi(n, 1.3), 1e-13));
        }
    }

    #[test]
    fn psi_large_degree_is_finite() {
        let v = hermite_psi(10_000, 100.0);
        assert!(v.is_finite() && v != 0.0);
        assert!(hermite_psi(10_000, 1.0).is_finite());
        // Far outside the classically allowed region the value underflows to 0.
        assert_eq!(hermite_psi(3, 60.0), 0.0);
    }

    #[test]
    fn psi_matches_raw_hermite() {
        for n in 0..30 {
            let x = 0.7;
            let nf = ln_factorial(n);
            let norm = (-0.5 * (0.5 * PI.ln() + n as f64 * 2f64.ln() + nf)).exp();
            let direct = (-0.5 * x * x).exp() * hermite(n, x).unwrap() * norm;
            assert!(close(hermite_psi(n, x), direct, 1e-12), "n={n}");
        }
    }

    #[test]
    fn psi_norm_by_quadrature() {
        let n = 50;
        let norm = trapezoid(|x| hermite_psi(n, x).powi(2), -30.0, 30.0, 12_000);
        assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    }

    #[test]
    fn pochhammer_values() {
        let x = C64::new(0.3, -1.1);
        assert_eq!(pochhammer(x, 0), C64::new(1.0, 0.0));
        assert_eq!(pochhammer(C64::new(2.0, 0.0), 3), C64::new(24.0, 0.0));
        assert_eq!(pochhammer_real(1.0, 2), 2.0);
    }

    #[test]
    fn hyp2f1_short_series() {
        let b = C64::new(0.4, 0.2);
        let c = C64::new(1.5, 0.0);
        let z = C64::new(2.0, 0.0);
        assert_eq!(hyp2f1_terminating(0, b, c, z).unwrap(), C64::new(1.0, 0.0));
        let two_term = C64::new(1.0, 0.0) - b * z / c;
        assert!((hyp2f1_terminating(1, b, c, z).unwrap() - two_term).norm() < 1e-15);
    }

    #[test]
    fn hyp2f1_rejects_pole() {
        let one = C64::new(1.0, 0.0);
        assert!(hyp2f1_terminating(3, one, C64::new(-1.0, 0.0), one).is_err());
        // c = -3 is harmless when the series stops at i = 2.
        assert!(hyp2f1_terminating(3, one, C64::new(-3.0, 0.0), one).is_ok());
    }

    #[test]
    fn hyp1f1_basic() {
        let a = C64::new(0.3, 0.1);
        let b = C64::new(1.5, 0.0);
        assert_eq!(hyp1f1(a, b, C64::zero()).unwrap().value, C64::new(1.0, 0.0));
        let z = C64::new(0.7, -0.2);
        let f = hyp1f1(C64::new(-1.0, 0.0), C64::new(0.5, 0.0), z).unwrap();
        assert!((f.value - (C64::new(1.0, 0.0) - z * 2.0)).norm() < 1e-15);
        assert_eq!(f.tail_bound, 0.0);
        // 1F1(a; a; z) = e^z
        let e = hyp1f1(b, b, C64::new(3.0, 0.0)).unwrap();
        assert!((e.value.re - 3f64.exp()).abs() < 1e-13 * 3f64.exp());
    }

    #[test]
    fn hyp1f1_errors() {
        let one = C64::new(1.0, 0.0);
        assert!(hyp1f1(one, C64::new(-2.0, 0.0), one).is_err());
        assert!(hyp1f1(C64::new(0.5, 0.0), one, C64::new(250.0, 0.0)).is_err());
        // Terminating series ignore the radius.
        assert!(hyp1f1(C64::new(-3.0, 0.0), one, C64::new(1e4, 0.0)).is_ok());
    }

    #[test]
    fn hyp1f1_scaled_beyond_overflow() {
        // 1F1(b; b; z) = e^z, so e^{-z} 1F1 = 1 even at z = 900.
        let b = C64::new(0.5, 0.0);
        let cfg = Hyp1f1Config { radius: 2000.0, ..Default::default() };
        let f = hyp1f1_scaled(b, b, C64::new(900.0, 0.0), 900.0, &cfg).unwrap();
        assert!((f.value.re - 1.0).abs() < 1e-12, "{:?}", f);
    }

    #[test]
    fn tail_bounded_exponential() {
        let mut t = C64::new(1.0, 0.0);
        let r = sum_tail_bounded(
            |n| {
                if n > 0 {
                    t /= n as f64;
                }
                t
            },
            1e-16,
            100,
        )
        .unwrap();
        assert!((r.value.re - core::f64::consts::E).abs() < 1e-14);
        assert!(r.tail_bound >= 0.0 && r.tail_bound.is_finite());
        assert!(r.terms_used >= 1);
    }

    #[test]
    fn tail_bounded_zero_and_divergent() {
        let r = sum_tail_bounded(|_| C64::zero(), 1e-14, 50).unwrap();
        assert_eq!(r.value, C64::zero());
        assert!(r.terms_used <= 2);

        let err = sum_tail_bounded(|n| C64::new(n as f64, 0.0), 1e-14, 50).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { terms: 50, .. }));
    }

    #[test]
    fn tail_bounded_finite_support() {
        // A single non-zero leading term followed by zeros.
        let r = sum_tail_bounded(|n| if n == 0 { C64::new(2.5, 0.0) } else { C64::zero() }, 1e-14, 50)
            .unwrap();
        assert_eq!(r.value, C64::new(2.5, 0.0));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        let mut s = CompensatedSum::default();
        for x in xs {
            s.add(C64::new(x, 0.0));
        }
        assert_eq!(s.value().re, 2.0);
    }
}
