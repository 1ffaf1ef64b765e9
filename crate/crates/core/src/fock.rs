//! Truncated number-basis linear algebra.
//!
//! A [`FockVector`] holds amplitudes `c_0 … c_nmax`; a [`FockOperator`] is a
//! dense `(nmax+1)²` complex matrix with optional band metadata (ladder
//! operators and their powers are banded, which keeps products and
//! matrix-vector applications cheap).
//!
//! Truncation breaks `[a, a†] = 1` in the last row and column. Operator-based
//! quantities are therefore either computed on a basis padded by `2j`
//! (so every product of two `j`-th ladder powers is exact) or restricted to a
//! guard-banded interior.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::specfun::{hermite_psi_all, ln_factorial, CompensatedSum};
use crate::{Error, Result, C64};

/// Dropped-tail probability accepted for constructed states.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-14;
/// Tolerance for the "normalised" flag.
pub const NORMALIZED_TOL: f64 = 1e-10;
/// Norm allowed to reach the guard band in [`matrix_exp_apply`].
pub const DEFAULT_LEAK_TOL: f64 = 1e-8;

/// Basis-size policy for state constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Grow the basis until the dropped tail is below [`DEFAULT_TRUNCATION_TOL`].
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
    tail_mass: f64,
    degenerate: bool,
}

impl FockVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        Self::with_tail(amps, 0.0)
    }

    /// `tail_mass` is the probability estimated to lie above `nmax`.
    pub fn with_tail(amps: Vec<C64>, tail_mass: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter("Fock vector needs at least one amplitude"));
        }
        if amps.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidParameter("Fock amplitudes must be finite"));
        }
        if !(tail_mass >= 0.0 && tail_mass.is_finite()) {
            return Err(Error::InvalidParameter("tail mass must be finite and non-negative"));
        }
        Ok(Self { amps, tail_mass, degenerate: false })
    }

    pub fn zeros(nmax: usize) -> Self {
        Self { amps: vec![C64::zero(); nmax + 1], tail_mass: 0.0, degenerate: false }
    }

    pub fn nmax(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Set for limit states, e.g. the `α → 0` limit `|k⟩` of an HPCS with `k > 0`.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub(crate) fn mark_degenerate(mut self) -> Self {
        self.degenerate = true;
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORMALIZED_TOL
    }

    /// `⟨self|other⟩`; a shorter vector is treated as zero-padded.
    pub fn inner(&self, other: &FockVector) -> C64 {
        let mut acc = CompensatedSum::default();
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc.add(a.conj() * b);
        }
        acc.value()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amps: self.amps.iter().map(|c| c / n).collect(),
            tail_mass: self.tail_mass / (n * n),
            degenerate: self.degenerate,
        })
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            amps: self.amps.iter().map(|c| c * s).collect(),
            tail_mass: self.tail_mass * s.norm_sqr(),
            degenerate: self.degenerate,
        }
    }

    /// `self + a·other`, on the larger of the two bases.
    pub fn axpy(&self, a: C64, other: &FockVector) -> Self {
        let n = self.amps.len().max(other.amps.len());
        let mut amps = vec![C64::zero(); n];
        for (i, c) in self.amps.iter().enumerate() {
            amps[i] += c;
        }
        for (i, c) in other.amps.iter().enumerate() {
            amps[i] += a * c;
        }
        Self { amps, tail_mass: self.tail_mass + a.norm_sqr() * other.tail_mass, degenerate: false }
    }

    /// Zero-pads or truncates to `nmax`; truncated probability moves to the tail.
    pub fn resized(&self, nmax: usize) -> Self {
        let mut amps = self.amps.clone();
        let dropped: f64 = amps.iter().skip(nmax + 1).map(|c| c.norm_sqr()).sum();
        amps.resize(nmax + 1, C64::zero());
        Self { amps, tail_mass: self.tail_mass + dropped, degenerate: self.degenerate }
    }

    /// Probability in the top `band` indices.
    pub fn top_mass(&self, band: usize) -> f64 {
        let start = self.amps.len().saturating_sub(band);
        self.amps[start..].iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Width of the top slice treated as unreliable after an operator exponential.
pub fn guard_band(nmax: usize) -> usize {
    ((nmax + 1) / 8).max(8)
}

/// Smallest `N ≥ j·ceil((A + 8√A + 20)/j) + k` for mean photon number `A`.
///
/// Callers double it until the dropped tail is below tolerance.
pub fn auto_nmax(j: usize, k: usize, a_sq: f64) -> usize {
    let base = a_sq + 8.0 * a_sq.sqrt() + 20.0;
    j * (base / j as f64).ceil() as usize + k
}

pub fn basis_state(n: usize, nmax: usize) -> Result<FockVector> {
    if n > nmax {
        return Err(Error::IndexOutOfRange { n, nmax });
    }
    let mut v = FockVector::zeros(nmax);
    v.amps[n] = C64::new(1.0, 0.0);
    Ok(v)
}

/// Ordinary coherent state `e^{-|α|²/2} Σ α^n/√n! |n⟩` on `0..=nmax`.
pub fn coherent_state(alpha: C64, nmax: usize) -> FockVector {
    let a_sq = alpha.norm_sqr();
    let (ln_r, theta) = (alpha.norm().ln(), alpha.arg());
    let mut tail = CompensatedSum::default();
    let amps = (0..=nmax)
        .map(|n| {
            if a_sq == 0.0 {
                return if n == 0 { C64::new(1.0, 0.0) } else { C64::zero() };
            }
            let ln_mag = n as f64 * ln_r - 0.5 * ln_factorial(n) - 0.5 * a_sq;
            C64::from_polar(ln_mag.exp(), n as f64 * theta)
        })
        .collect();
    if a_sq > 0.0 {
        // Poisson tail beyond nmax.
        let mut n = nmax + 1;
        loop {
            let p = (n as f64 * a_sq.ln() - ln_factorial(n) - a_sq).exp();
            tail.add(C64::new(p, 0.0));
            if (n as f64 > a_sq && p < 1e-30) || n > nmax + 100_000 {
                break;
            }
            n += 1;
        }
    }
    FockVector { amps, tail_mass: tail.value().re, degenerate: false }
}

/// `a v`.
pub fn annihilate(v: &FockVector) -> FockVector {
    apply_a_power(v, 1)
}

/// `a† v`; the component pushed above `nmax` is dropped into the tail.
pub fn create(v: &FockVector) -> FockVector {
    apply_create_power(v, 1)
}

/// `a^j v`.
pub fn apply_a_power(v: &FockVector, j: usize) -> FockVector {
    let nmax = v.nmax();
    let mut amps = vec![C64::zero(); nmax + 1];
    for m in 0..=nmax.saturating_sub(j) {
        if m + j > nmax {
            break;
        }
        amps[m] = v.amps[m + j] * falling_sqrt(m + j, j);
    }
    FockVector { amps, tail_mass: v.tail_mass, degenerate: false }
}

/// `(a†)^j v`.
pub fn apply_create_power(v: &FockVector, j: usize) -> FockVector {
    let nmax = v.nmax();
    let mut amps = vec![C64::zero(); nmax + 1];
    let mut dropped = 0.0;
    for (n, c) in v.amps.iter().enumerate() {
        let out = c * falling_sqrt(n + j, j);
        if n + j <= nmax {
            amps[n + j] = out;
        } else {
            dropped += out.norm_sqr();
        }
    }
    FockVector { amps, tail_mass: v.tail_mass + dropped, degenerate: false }
}

/// `√(m!/(m-j)!)`.
pub(crate) fn falling_sqrt(m: usize, j: usize) -> f64 {
    (0..j).map(|i| ((m - i) as f64).sqrt()).product()
}

/// Dense operator on the truncated basis `0..=nmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: usize,
    data: Vec<C64>,
    bandwidth: Option<usize>,
}

impl FockOperator {
    pub fn zeros(nmax: usize) -> Self {
        let dim = nmax + 1;
        Self { dim, data: vec![C64::zero(); dim * dim], bandwidth: Some(0) }
    }

    pub fn identity(nmax: usize) -> Self {
        let mut m = Self::zeros(nmax);
        for i in 0..m.dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Entries `f(row, col)`; `bandwidth` may promise that `f` vanishes
    /// farther than that from the diagonal.
    pub fn from_fn(nmax: usize, bandwidth: Option<usize>, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let dim = nmax + 1;
        let mut data = vec![C64::zero(); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = f(r, c);
            }
        }
        Self { dim, data, bandwidth }
    }

    /// `A[n-1][n] = √n`.
    pub fn annihilation(nmax: usize) -> Self {
        Self::from_fn(nmax, Some(1), |r, c| {
            if c == r + 1 {
                C64::new((c as f64).sqrt(), 0.0)
            } else {
                C64::zero()
            }
        })
    }

    pub fn creation(nmax: usize) -> Self {
        Self::annihilation(nmax).adjoint()
    }

    pub fn number(nmax: usize) -> Self {
        Self::from_fn(nmax, Some(0), |r, c| if r == c { C64::new(r as f64, 0.0) } else { C64::zero() })
    }

    pub fn nmax(&self) -> usize {
        self.dim - 1
    }

    pub fn bandwidth(&self) -> Option<usize> {
        self.bandwidth
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
        if let Some(bw) = self.bandwidth {
            let d = r.abs_diff(c);
            if d > bw && v != C64::zero() {
                self.bandwidth = Some(d);
            }
        }
    }

    fn cols(&self, r: usize) -> core::ops::Range<usize> {
        match self.bandwidth {
            Some(bw) => r.saturating_sub(bw)..(r + bw + 1).min(self.dim),
            None => 0..self.dim,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.nmax(), self.bandwidth, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| x * s).collect(), bandwidth: self.bandwidth }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        let bandwidth = match (self.bandwidth, other.bandwidth) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
            bandwidth,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        let dim = self.dim;
        let bandwidth = match (self.bandwidth, other.bandwidth) {
            (Some(a), Some(b)) if a + b < dim => Some(a + b),
            _ => None,
        };
        let mut data = vec![C64::zero(); dim * dim];
        for r in 0..dim {
            for k in self.cols(r) {
                let a = self.data[r * dim + k];
                if a == C64::zero() {
                    continue;
                }
                for c in other.cols(k) {
                    data[r * dim + c] += a * other.data[k * dim + c];
                }
            }
        }
        Self { dim, data, bandwidth }
    }

    pub fn power(&self, j: usize) -> Self {
        (0..j).fold(Self::identity(self.nmax()), |acc, _| acc.mul(self))
    }

    /// `M v`, with `v` zero-padded or truncated to this basis.
    pub fn apply(&self, v: &FockVector) -> FockVector {
        let v = if v.nmax() == self.nmax() { v.clone() } else { v.resized(self.nmax()) };
        let mut out = vec![C64::zero(); self.dim];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::zero();
            for c in self.cols(r) {
                acc += self.data[r * self.dim + c] * v.amps[c];
            }
            *o = acc;
        }
        FockVector { amps: out, tail_mass: v.tail_mass, degenerate: false }
    }

    /// Largest `|M_rc − conj(M_cr)|` over indices `≤ upto`.
    pub fn hermitian_asymmetry(&self, upto: usize) -> f64 {
        let n = (upto + 1).min(self.dim);
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Largest `|M_rc + conj(M_cr)|` over the whole matrix.
    pub fn anti_hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) + self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Leading `(n+1)×(n+1)` block.
    pub fn sub_block(&self, nmax: usize) -> Self {
        let nmax = nmax.min(self.nmax());
        Self::from_fn(nmax, self.bandwidth, |r, c| self.get(r, c))
    }

    /// Lower bound on the spectral norm of a Hermitian matrix by power
    /// iteration (a Rayleigh estimate never exceeds the true norm).
    pub fn hermitian_norm_estimate(&self, iterations: usize) -> f64 {
        let mut w = FockVector {
            amps: (0..self.dim).map(|i| C64::new(1.0 + 0.1 * (i % 7) as f64, 0.0)).collect(),
            tail_mass: 0.0,
            degenerate: false,
        };
        let mut estimate = 0.0;
        for _ in 0..iterations.max(1) {
            let n = w.norm();
            if n == 0.0 {
                return 0.0;
            }
            w = w.scaled(C64::new(1.0 / n, 0.0));
            let mw = self.apply(&w);
            estimate = mw.norm();
            w = mw;
        }
        estimate
    }
}

/// `X = (L + L†)/√2`, `P = (L − L†)/(i√2)` and `O = −i(XP − PX)`, so that
/// `[X, P] = iO`.
pub fn ladder_quadratures(l: &FockOperator) -> (FockOperator, FockOperator, FockOperator) {
    let ld = l.adjoint();
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let x = l.add(&ld).scale(C64::new(s, 0.0));
    let p = l.sub(&ld).scale(C64::new(0.0, -s));
    let o = x.mul(&p).sub(&p.mul(&x)).scale(C64::new(0.0, -1.0));
    (x, p, o)
}

/// `(X_j, P_j, O)` built from `a^j` on `0..=nmax`.
pub fn xp_operators(j: usize, nmax: usize) -> Result<(FockOperator, FockOperator, FockOperator)> {
    if j == 0 {
        return Err(Error::InvalidParameter("ladder power j must be positive"));
    }
    if 2 * j > nmax {
        return Err(Error::InvalidParameter("nmax must be at least 2j for X_j/P_j"));
    }
    Ok(ladder_quadratures(&FockOperator::annihilation(nmax).power(j)))
}

/// `⟨v|M|v⟩`.
pub fn expectation(v: &FockVector, m: &FockOperator) -> C64 {
    v.resized(m.nmax()).inner(&m.apply(v))
}

/// `⟨M²⟩ − ⟨M⟩²` for Hermitian `M`.
pub fn variance(v: &FockVector, m: &FockOperator) -> Result<f64> {
    let asym = m.hermitian_asymmetry(m.nmax());
    if asym > 1e-8 {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let mv = m.apply(v);
    let mean = v.resized(m.nmax()).inner(&mv).re;
    Ok(mv.norm_sqr() - mean * mean)
}

/// `exp(G) v` for anti-Hermitian `G`, by Taylor steps of `exp(G/s)`.
///
/// Fails if more than [`DEFAULT_LEAK_TOL`] of norm ends up in the top
/// [`guard_band`] indices, since the truncated generator reflects there.
pub fn matrix_exp_apply(g: &FockOperator, v: &FockVector) -> Result<FockVector> {
    matrix_exp_apply_with(g, v, guard_band(g.nmax()), DEFAULT_LEAK_TOL)
}

pub fn matrix_exp_apply_with(
    g: &FockOperator,
    v: &FockVector,
    guard: usize,
    leak_tol: f64,
) -> Result<FockVector> {
    let scale = g.one_norm();
    if g.anti_hermitian_asymmetry() > 1e-12 * scale.max(1.0) {
        return Err(Error::InvalidParameter("generator must be anti-Hermitian"));
    }
    let v = v.resized(g.nmax());
    let steps = scale.ceil().max(1.0) as usize;
    let inv = 1.0 / steps as f64;

    let mut w = v.clone();
    for _ in 0..steps {
        let mut term = w.clone();
        let mut acc = w.clone();
        for k in 1..80 {
            term = g.apply(&term).scaled(C64::new(inv / k as f64, 0.0));
            acc = acc.axpy(C64::new(1.0, 0.0), &term);
            if term.norm() <= 1e-18 * acc.norm() {
                break;
            }
        }
        w = acc;
    }
    w.tail_mass = v.tail_mass;

    let leakage = w.top_mass(guard).sqrt();
    let drift = (w.norm() - v.norm()).abs();
    if leakage > leak_tol || drift > leak_tol {
        return Err(Error::GuardBand { leakage: leakage.max(drift), nmax: g.nmax() });
    }
    Ok(w)
}

/// Free oscillator evolution `c_n → e^{-int} c_n` (global `e^{-it/2}` dropped).
pub fn phase_evolve(v: &FockVector, t: f64) -> FockVector {
    FockVector {
        amps: v.amps.iter().enumerate().map(|(n, c)| c * C64::from_polar(1.0, -(n as f64) * t)).collect(),
        tail_mass: v.tail_mass,
        degenerate: v.degenerate,
    }
}

/// `Σ_n c_n ψ_n(x)` at each `x`.
pub fn position_wavefunction(v: &FockVector, xs: &[f64]) -> Vec<C64> {
    xs.iter()
        .map(|&x| {
            let psi = hermite_psi_all(v.nmax(), x);
            let mut acc = CompensatedSum::default();
            for (c, p) in v.amps.iter().zip(&psi) {
                acc.add(c * p);
            }
            acc.value()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn basis_states() {
        let v = basis_state(0, 10).unwrap();
        assert_eq!(v.amps()[0], c(1.0));
        assert!(v.amps()[1..].iter().all(|a| *a == C64::zero()));
        assert_eq!(basis_state(5, 20).unwrap().norm(), 1.0);
        assert!(matches!(basis_state(11, 10), Err(Error::IndexOutOfRange { n: 11, nmax: 10 })));
    }

    #[test]
    fn ladder_actions() {
        let v = basis_state(5, 20).unwrap();
        let w = annihilate(&v);
        assert!((w.amps()[4] - c(5f64.sqrt())).norm() < 1e-15);
        assert!((w.norm_sqr() - 5.0).abs() < 1e-13);
        assert_eq!(annihilate(&basis_state(0, 7).unwrap()).norm(), 0.0);
        let up = create(&basis_state(3, 9).unwrap());
        assert!((up.amps()[4] - c(2.0)).norm() < 1e-15);
        assert_eq!(apply_a_power(&basis_state(2, 9).unwrap(), 3).norm(), 0.0);
    }

    #[test]
    fn create_drops_top_into_tail() {
        let v = basis_state(4, 4).unwrap();
        let w = create(&v);
        assert_eq!(w.norm(), 0.0);
        assert!((w.tail_mass() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn commutator_on_interior() {
        let amps: Vec<C64> = (0..=18).map(|n| C64::new(0.1 * n as f64, -0.05 * n as f64)).chain([C64::zero(); 2]).collect();
        let v = FockVector::new(amps).unwrap();
        let lhs = annihilate(&create(&v)).axpy(c(-1.0), &create(&annihilate(&v)));
        for (a, b) in lhs.amps().iter().zip(v.amps()) {
            assert!((a - b).norm() < 1e-12);
        }
        // Same through the dense matrices.
        let a = FockOperator::annihilation(20);
        let comm = a.mul(&a.adjoint()).sub(&a.adjoint().mul(&a));
        let w = comm.apply(&v);
        for (x, y) in w.amps().iter().zip(v.amps()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn xp_operator_structure() {
        let (_, _, o) = xp_operators(1, 12).unwrap();
        for n in 0..=10 {
            assert!((o.get(n, n) - c(1.0)).norm() < 1e-12);
        }
        let (x, p, o) = xp_operators(2, 14).unwrap();
        // [a², a†²] = 4a†a + 2
        assert!((o.get(0, 0) - c(2.0)).norm() < 1e-12);
        assert!((o.get(3, 3) - c(14.0)).norm() < 1e-12);
        let interior = 14 - 4;
        assert!(x.hermitian_asymmetry(interior) < 1e-12);
        assert!(p.hermitian_asymmetry(interior) < 1e-12);
        assert!(o.hermitian_asymmetry(interior) < 1e-12);
        assert!(xp_operators(3, 5).is_err());
    }

    #[test]
    fn expectations() {
        let num = FockOperator::number(15);
        for n in 0..15 {
            let v = basis_state(n, 15).unwrap();
            assert!((expectation(&v, &num) - c(n as f64)).norm() < 1e-14);
        }
        let alpha = C64::new(1.2, -0.4);
        let v = coherent_state(alpha, 60);
        let (x, _, _) = xp_operators(1, 60).unwrap();
        let mean = expectation(&v, &x);
        assert!((mean.re - 2f64.sqrt() * alpha.re).abs() < 1e-12);
        assert!((variance(&v, &x).unwrap() - 0.5).abs() < 1e-10);
        let not_herm = FockOperator::annihilation(60);
        assert!(matches!(variance(&v, &not_herm), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn coherent_state_is_eigenvector() {
        let alpha = C64::new(-0.8, 1.5);
        let v = coherent_state(alpha, 80);
        let r = annihilate(&v).axpy(-alpha, &v);
        let interior: f64 = r.amps()[..80].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(interior < 1e-12);
        assert!((v.norm_sqr() + v.tail_mass() - 1.0).abs() < 1e-14);
    }

    fn squeeze_generator(z: C64, nmax: usize) -> FockOperator {
        let a2 = FockOperator::annihilation(nmax).power(2);
        let ad2 = a2.adjoint();
        ad2.scale(z * 0.5).sub(&a2.scale(z.conj() * 0.5))
    }

    #[test]
    fn exp_identity_and_inverse() {
        let v = coherent_state(C64::new(1.0, 0.5), 80);
        let zero = FockOperator::zeros(80);
        assert_eq!(matrix_exp_apply(&zero, &v).unwrap().amps(), v.amps());

        let g = squeeze_generator(C64::new(0.4, 0.2), 80);
        let w = matrix_exp_apply(&g, &v).unwrap();
        let back = matrix_exp_apply(&g.scale(c(-1.0)), &w).unwrap();
        let d = back.axpy(c(-1.0), &v).norm();
        assert!(d < 1e-9, "{d}");
        assert!((w.norm() - v.norm()).abs() < 1e-8);
    }

    #[test]
    fn squeezed_vacuum_photon_number() {
        let r = 0.5;
        let g = squeeze_generator(c(r), 120);
        let w = matrix_exp_apply(&g, &basis_state(0, 120).unwrap()).unwrap();
        let n = expectation(&w, &FockOperator::number(120)).re;
        let sinh = libm::sinh(r);
        assert!((n - sinh * sinh).abs() < 1e-8, "{n}");
    }

    #[test]
    fn exp_detects_leakage_and_rejects_hermitian() {
        let g = squeeze_generator(c(1.5), 30);
        let v = basis_state(10, 30).unwrap();
        assert!(matches!(matrix_exp_apply(&g, &v), Err(Error::GuardBand { .. })));
        let herm = FockOperator::number(30);
        assert!(matrix_exp_apply(&herm, &v).is_err());
    }

    #[test]
    fn phase_evolution() {
        let v = coherent_state(C64::new(0.7, 0.2), 40);
        assert_eq!(phase_evolve(&v, 0.0).amps(), v.amps());
        let full = phase_evolve(&v, 2.0 * core::f64::consts::PI);
        for (a, b) in full.amps().iter().zip(v.amps()) {
            assert!((a - b).norm() < 1e-13);
        }
        assert!((phase_evolve(&v, 1.234).norm() - v.norm()).abs() < 1e-15);
    }

    #[test]
    fn position_representation() {
        let v = basis_state(0, 5).unwrap();
        let psi = position_wavefunction(&v, &[0.0]);
        assert!((psi[0].re - 0.7511255444649425).abs() < 1e-15);

        // Even support gives an even wavefunction.
        let amps: Vec<C64> =
            (0..=20).map(|n| if n % 2 == 0 { C64::new(1.0 / (n + 1) as f64, 0.3) } else { C64::zero() }).collect();
        let e = FockVector::new(amps).unwrap();
        let xs = [0.3, 1.1, 2.5];
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        for (a, b) in position_wavefunction(&e, &xs).iter().zip(position_wavefunction(&e, &neg)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn coherent_wavefunction_is_displaced_gaussian() {
        // (x0, p0) = (2, 0)
        let alpha = C64::new(2f64.sqrt(), 0.0);
        let v = coherent_state(alpha, 60);
        let xs: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.15).collect();
        for (x, psi) in xs.iter().zip(position_wavefunction(&v, &xs)) {
            let g = (-0.5 * (x - 2.0) * (x - 2.0)).exp() / core::f64::consts::PI.powf(0.25);
            assert!((psi.norm() - g).abs() < 1e-9);
        }
    }

    #[test]
    fn non_hermitian_power_iteration_bound() {
        let m = FockOperator::number(6);
        let est = m.hermitian_norm_estimate(200);
        assert!(est <= 6.0 + 1e-12 && est > 5.9);
    }
}
