//! Fourier analysis on `[N]`: `f̂(α) = Σ_x f(x) e(αx)` with `e(θ) = exp(2πiθ)`,
//! Fejér smoothing along `q·ℤ`, quadratic Weyl sums, rational approximation,
//! the sixth-moment count for sums of three squares and the major-arc
//! witness search.
//!
//! Phases `α·n` are reduced mod 1 exactly. A double `α ∈ [0, 1)` is a dyadic
//! rational `m / 2^k`, so `α·n mod 1 = (m·n mod 2^k) / 2^k` can be computed in
//! 128-bit integers; rational frequencies `a/b` reduce `a·n mod b` instead.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::counting::{count_operator, isqrt, CountingParams};
use crate::error::{Error, Result};
use crate::function::{check_len, l1_norm, BoundedFunction};
use crate::progression::Progression;

/// `e(θ) = exp(2πiθ)`.
#[inline]
pub fn e(theta: f64) -> Complex64 {
    let (s, c) = (TAU * theta).sin_cos();
    Complex64::new(c, s)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(m, k)` with `α = m / 2^k` for finite `α ∈ [0, 1)`.
fn dyadic(alpha: f64) -> (u64, u32) {
    let bits = alpha.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, 1074)
    } else {
        (frac | (1u64 << 52), (1075 - exp) as u32)
    }
}

/// `α·n mod 1` for `α ∈ [0, 1)`, exact up to the final rounding.
fn frac_mul(alpha: f64, n: u64) -> f64 {
    if alpha == 0.0 || n == 0 {
        return 0.0;
    }
    let (m, k) = dyadic(alpha);
    let prod = m as u128 * n as u128;
    let r = if k >= 128 { prod } else { prod & ((1u128 << k) - 1) };
    let half = (k / 2) as i32;
    let v = r as f64 * 2f64.powi(-half) * 2f64.powi(half - k as i32);
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

/// A frequency `α ∈ ℝ/ℤ`, stored in `[0, 1)`. Rational frequencies keep
/// their exact reduced form so that multiples and distances are exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    value: f64,
    exact: Option<(u64, u64)>,
}

impl Frequency {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha.is_finite(), "frequency must be finite");
        let mut v = alpha - alpha.floor();
        if v >= 1.0 {
            v = 0.0;
        }
        Self { value: v, exact: None }
    }

    /// `a / b` reduced mod 1.
    pub fn rational(a: i64, b: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidParameter("denominator must be positive".into()));
        }
        let num = a.rem_euclid(b as i64) as u64;
        let g = gcd(num as u128, b as u128) as u64;
        let (num, den) = (num / g, b / g);
        Ok(Self { value: num as f64 / den as f64, exact: Some((num, den)) })
    }

    pub fn zero() -> Self {
        Self { value: 0.0, exact: Some((0, 1)) }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// The reduced fraction `(a, b)` with `0 <= a < b` for rational frequencies.
    pub fn exact(&self) -> Option<(u64, u64)> {
        self.exact
    }

    /// `‖α‖_𝕋 = min(α, 1 - α)`.
    pub fn distance_to_integer(&self) -> f64 {
        match self.exact {
            Some((a, b)) => a.min(b - a) as f64 / b as f64,
            None => self.value.min(1.0 - self.value),
        }
    }

    pub fn neg(&self) -> Self {
        match self.exact {
            Some((a, b)) => Self::rational(-(a as i64), b).unwrap(),
            None if self.value == 0.0 => *self,
            None => Self { value: 1.0 - self.value, exact: None },
        }
    }

    /// `n·α mod 1`.
    pub fn times(&self, n: i64) -> Self {
        if n < 0 {
            return self.times_u(n.unsigned_abs()).neg();
        }
        self.times_u(n as u64)
    }

    fn times_u(&self, n: u64) -> Self {
        match self.exact {
            Some((a, b)) => {
                let r = (a as u128 * n as u128 % b as u128) as u64;
                Self::rational(r as i64, b).unwrap()
            }
            None => Self { value: frac_mul(self.value, n), exact: None },
        }
    }

    /// `e(n·α)`.
    #[inline]
    pub fn character(&self, n: i64) -> Complex64 {
        e(self.times(n).value)
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        match (self.exact, other.exact) {
            (Some((a, b)), Some((c, d))) => (a as u128 * d as u128).cmp(&(c as u128 * b as u128)),
            _ => self.value.total_cmp(&other.value),
        }
    }
}

/// `f̂(α) = Σ_x f(x) e(αx)` by direct evaluation.
pub fn fourier_coefficient(f: &BoundedFunction, alpha: &Frequency) -> Complex64 {
    f.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
        .map(|(i, v)| v * alpha.character(i as i64 + 1))
        .sum()
}

/// `f̂(k / L)` for `k = 0, .., L - 1` via one FFT. Requires `L > N`.
pub fn spectrum_grid(f: &BoundedFunction, l: usize) -> Result<Vec<Complex64>> {
    if l <= f.len() {
        return Err(Error::InvalidParameter(format!("grid size {l} must exceed N = {}", f.len())));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    buf[1..=f.len()].copy_from_slice(f.values());
    // The inverse transform is unnormalised with kernel e(+jk/L).
    FftPlanner::new().plan_fft_inverse(l).process(&mut buf);
    Ok(buf)
}

/// The normalised Fejér kernel `μ_H(h) = (⌊H⌋ - |h|)₊ / ⌊H⌋²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FejerKernel {
    width: u64,
}

impl FejerKernel {
    /// `⌊H⌋`.
    pub fn width(&self) -> u64 {
        self.width
    }

    /// Integer numerator `(⌊H⌋ - |h|)₊` of the weight at `h`.
    pub fn numerator(&self, h: i64) -> u64 {
        self.width.saturating_sub(h.unsigned_abs())
    }

    /// The common denominator `⌊H⌋²`.
    pub fn denominator(&self) -> u64 {
        self.width * self.width
    }

    pub fn weight(&self, h: i64) -> f64 {
        self.numerator(h) as f64 / self.denominator() as f64
    }

    /// The support `-(⌊H⌋ - 1) ..= ⌊H⌋ - 1`.
    pub fn support(&self) -> std::ops::RangeInclusive<i64> {
        let r = self.width as i64 - 1;
        -r..=r
    }

    /// Total mass as an exact fraction `(numerator sum, denominator)`.
    pub fn mass(&self) -> (u64, u64) {
        (self.support().map(|h| self.numerator(h)).sum(), self.denominator())
    }

    /// `(h, μ_H(h))` over the support.
    pub fn weights(&self) -> Vec<(i64, f64)> {
        self.support().map(|h| (h, self.weight(h))).collect()
    }
}

pub fn fejer_kernel(h: f64) -> Result<FejerKernel> {
    if !(h >= 1.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("H = {h} must be at least 1")));
    }
    Ok(FejerKernel { width: h.floor() as u64 })
}

/// `φ(x) = Σ_h μ_H(h) f(x + q h)` on `[N]`.
pub fn smooth_along(f: &BoundedFunction, q: u64, h: f64) -> Result<BoundedFunction> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    let kernel = fejer_kernel(h)?;
    let weights = kernel.weights();
    let values = (1..=f.len() as i64)
        .map(|x| weights.iter().map(|&(t, w)| f.get(x + q as i64 * t) * w).sum())
        .collect();
    BoundedFunction::with_bound(values, f.bound())
}

/// `sup |φ(x + q y) - φ(x)| / |y|` over `x, x + qy ∈ [N]`, `1 <= |y| <= window`.
pub fn lipschitz_constant_along(phi: &BoundedFunction, q: u64, window: u64) -> Result<f64> {
    if q == 0 || window == 0 {
        return Err(Error::InvalidParameter("q and window must be positive".into()));
    }
    let v = phi.values();
    let n = v.len();
    let mut best: f64 = 0.0;
    for y in 1..=window as usize {
        let shift = q as usize * y;
        if shift >= n {
            break;
        }
        for i in 0..n - shift {
            best = best.max((v[i + shift] - v[i]).norm() / y as f64);
        }
    }
    Ok(best)
}

/// `S_P(α) = Σ_{y ∈ P ∩ [⌊√N⌋]} e(α y²)`.
pub fn quadratic_weyl_sum(p: &Progression, n: u64, alpha: &Frequency) -> Complex64 {
    let k = isqrt(n) as i64;
    p.iter()
        .filter(|&y| y >= 1 && y <= k)
        .map(|y| alpha.character(y * y))
        .sum()
}

/// `|P ∩ [⌊√N⌋]|`.
fn truncated_len(p: &Progression, n: u64) -> u64 {
    let k = isqrt(n) as i64;
    p.iter().filter(|&y| y >= 1 && y <= k).count() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalApproximation {
    pub q: u64,
    /// `‖q α‖_𝕋`.
    pub distance: f64,
}

const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// The `q <= Q` minimising `‖qα‖_𝕋`, smallest `q` on ties.
///
/// Scans every `q` when `Q <= 10⁶`; otherwise walks the continued-fraction
/// convergents of the exact value of `α`, whose denominators are exactly the
/// record minimisers.
pub fn rational_approximation(alpha: &Frequency, big_q: u64) -> Result<RationalApproximation> {
    if big_q == 0 {
        return Err(Error::InvalidParameter("Q must be positive".into()));
    }
    let dist = |q: u64| alpha.times(q as i64).distance_to_integer();
    if big_q <= EXHAUSTIVE_LIMIT {
        let mut best = RationalApproximation { q: 1, distance: dist(1) };
        for q in 2..=big_q {
            if best.distance == 0.0 {
                break;
            }
            let d = dist(q);
            if d < best.distance {
                best = RationalApproximation { q, distance: d };
            }
        }
        return Ok(best);
    }
    let (mut num, mut den): (u128, u128) = match alpha.exact {
        Some((a, b)) => (a as u128, b as u128),
        None => {
            let (m, k) = dyadic(alpha.value);
            if k >= 128 {
                return Ok(RationalApproximation { q: 1, distance: dist(1) });
            }
            let g = gcd(m as u128, 1u128 << k).max(1);
            (m as u128 / g, (1u128 << k) / g)
        }
    };
    let (mut q_prev, mut q_cur) = (0u128, 1u128);
    while num != 0 {
        let t = den / num;
        let Some(q_next) = t.checked_mul(q_cur).and_then(|v| v.checked_add(q_prev)) else {
            break;
        };
        if q_next > big_q as u128 {
            break;
        }
        (q_prev, q_cur) = (q_cur, q_next);
        (den, num) = (num, den % num);
    }
    let q = q_cur as u64;
    Ok(RationalApproximation { q, distance: dist(q) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylWitness {
    pub q_prime: u64,
    /// `‖q' q² α‖_𝕋` with `q` the step of `P`.
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylOutcome {
    /// `|S_P(α)| / |P|`, with `P` truncated to `[⌊√N⌋]`.
    pub sum_ratio: f64,
    pub truncated_len: u64,
    /// `|S_P(α)| >= δ |P|`.
    pub hypothesis_holds: bool,
    /// Smallest `q' <= δ^{-C}` with `‖q' q² α‖ <= δ^{-C} |P|^{-2}`, searched
    /// only when the hypothesis holds.
    pub witness: Option<WeylWitness>,
}

pub fn weyl_frequency_finder(
    p: &Progression,
    n: u64,
    alpha: &Frequency,
    delta: f64,
    c_exp: f64,
) -> Result<WeylOutcome> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("δ = {delta} not in (0, 1]")));
    }
    let len = truncated_len(p, n);
    if len == 0 {
        return Ok(WeylOutcome { sum_ratio: 0.0, truncated_len: 0, hypothesis_holds: false, witness: None });
    }
    let ratio = quadratic_weyl_sum(p, n, alpha).norm() / len as f64;
    let holds = ratio >= delta;
    let mut witness = None;
    if holds {
        let scale = delta.powf(-c_exp);
        let q_max = scale.floor().min(u64::MAX as f64) as u64;
        let tol = scale / (len as f64 * len as f64);
        let q2 = p.step as i64 * p.step as i64;
        let base = alpha.times(q2);
        witness = (1..=q_max.max(1)).find_map(|qp| {
            let d = base.times(qp as i64).distance_to_integer();
            (d <= tol).then_some(WeylWitness { q_prime: qp, distance: d })
        });
    }
    Ok(WeylOutcome { sum_ratio: ratio, truncated_len: len, hypothesis_holds: holds, witness })
}

/// Ordered 6-tuples in `[N]⁶` with `x₁² + x₂² + x₃² = x₄² + x₅² + x₆²`,
/// computed as `Σ_s r₃(s)²`.
pub fn sixth_moment_squares(n: u64) -> Result<u128> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let n = n as usize;
    let mut r3 = vec![0u64; 3 * n * n + 1];
    for a in 1..=n {
        for b in 1..=n {
            let ab = a * a + b * b;
            for c in 1..=n {
                r3[ab + c * c] += 1;
            }
        }
    }
    Ok(r3.iter().map(|&r| r as u128 * r as u128).sum())
}

/// Tuning for [`major_arc_witness`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MajorArcConfig {
    /// Exponent `C` in `δ^{-C}` (Farey denominators, witness `q` range) and
    /// `η = c₀ δ^C`.
    pub c_exponent: f64,
    pub c0: f64,
    /// Major arcs test every residue class `r mod s`, `s <= max_step`, as a
    /// progression `P` inside `[⌊√N⌋]`.
    pub max_step: u64,
    /// Grid spacing is `1 / (grid_factor · N)`.
    pub grid_factor: usize,
    /// Subtract the mean of `h` before taking coefficients.
    pub center: bool,
}

impl Default for MajorArcConfig {
    fn default() -> Self {
        Self { c_exponent: 3.0, c0: 0.125, max_step: 4, grid_factor: 4, center: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorArcWitness {
    pub alpha: Frequency,
    pub q: u64,
    /// `‖q α‖_𝕋`.
    pub q_alpha_distance: f64,
    /// `|ĥ(α)|`, recomputed directly.
    pub coefficient_modulus: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MajorArcStatus {
    Found,
    /// `|Λ(f, g, h)| < δ`.
    HypothesisFails,
    /// No candidate frequency has a large quadratic Weyl sum.
    NoMajorArc,
    /// The best coefficient on the major arcs is below `η N`.
    CoefficientBelowThreshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorArcOutcome {
    pub status: MajorArcStatus,
    pub lambda_modulus: f64,
    pub eta: f64,
    pub candidates: usize,
    pub major_arc_candidates: usize,
    pub best_coefficient: f64,
    pub witness: Option<MajorArcWitness>,
}

/// `max_P |S_P(β)|` over residue-class progressions `P ⊆ [K]` of step `<= s_max`.
fn max_weyl_over_classes(beta: &Frequency, k: i64, s_max: u64) -> f64 {
    let chars: Vec<Complex64> = (1..=k).map(|y| beta.character(y * y)).collect();
    let mut best: f64 = 0.0;
    for s in 1..=s_max.max(1) as usize {
        let mut sums = vec![Complex64::new(0.0, 0.0); s];
        for (i, c) in chars.iter().enumerate() {
            sums[(i + 1) % s] += c;
        }
        best = sums.iter().fold(best, |m, v| m.max(v.norm()));
    }
    best
}

/// `ĥ(a/b)` through residue sums `Σ_{x ≡ r (b)} h(x)`.
fn coefficient_by_residues(residue_sums: &[Complex64], a: u64, b: u64) -> Complex64 {
    residue_sums
        .iter()
        .enumerate()
        .map(|(r, s)| s * e((a as u128 * r as u128 % b as u128) as f64 / b as f64))
        .sum()
}

/// Searches for a frequency `α` at which `h` has a large Fourier coefficient
/// and the quadratic Weyl sum over some progression is large, given that the
/// counting operator `Λ_{1,N}(f, g, h)` is at least `δ`.
///
/// Candidates are the grid `k / (grid_factor·N)` together with all reduced
/// fractions of denominator at most `⌈δ^{-C}⌉`. A candidate is on the major
/// arcs when `|S_P(α)| >= η √N` for a residue-class progression `P`,
/// `η = c₀ δ^C`. The largest `|ĥ(α)|` on the major arcs (smallest `α` within
/// `1e-9·‖h‖₁`) is returned if it reaches `η N`, together with the best
/// denominator `q <= ⌈δ^{-C}⌉` for `α`.
pub fn major_arc_witness(
    p: &CountingParams,
    f: &BoundedFunction,
    g: &BoundedFunction,
    h: &BoundedFunction,
    delta: f64,
    cfg: &MajorArcConfig,
) -> Result<MajorArcOutcome> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("δ = {delta} not in (0, 1]")));
    }
    if p.q() != 1 {
        return Err(Error::InvalidParameter("major-arc search requires q = 1".into()));
    }
    if cfg.grid_factor < 2 {
        return Err(Error::InvalidParameter("grid_factor must be at least 2".into()));
    }
    let n = p.n();
    for fun in [f, g, h] {
        check_len(n, fun.len())?;
    }
    let lambda = count_operator(p, f, g, h)?.norm();
    let eta = cfg.c0 * delta.powf(cfg.c_exponent);
    let mut out = MajorArcOutcome {
        status: MajorArcStatus::HypothesisFails,
        lambda_modulus: lambda,
        eta,
        candidates: 0,
        major_arc_candidates: 0,
        best_coefficient: 0.0,
        witness: None,
    };
    if lambda < delta {
        return Ok(out);
    }
    let h = if cfg.center {
        let mean = h.mean();
        BoundedFunction::with_bound(h.values().iter().map(|v| v - mean).collect(), 2.0 * h.bound())?
    } else {
        h.clone()
    };

    let grid_len = cfg.grid_factor * n;
    let big_q = delta.powf(-cfg.c_exponent).ceil().min(u32::MAX as f64) as u64;
    let mut cands: Vec<Frequency> = (0..grid_len as i64)
        .map(|k| Frequency::rational(k, grid_len as u64).unwrap())
        .collect();
    for b in 1..=big_q {
        for a in 0..b {
            if gcd(a as u128, b as u128) == 1 {
                cands.push(Frequency::rational(a as i64, b).unwrap());
            }
        }
    }
    cands.sort_by(|x, y| x.cmp_value(y));
    cands.dedup_by(|x, y| x.exact == y.exact);
    out.candidates = cands.len();

    let k = isqrt(n as u64) as i64;
    let arc_threshold = eta * (n as f64).sqrt();
    let on_arcs: Vec<Frequency> = cands
        .par_iter()
        .filter(|beta| max_weyl_over_classes(beta, k, cfg.max_step) >= arc_threshold)
        .copied()
        .collect();
    out.major_arc_candidates = on_arcs.len();
    if on_arcs.is_empty() {
        out.status = MajorArcStatus::NoMajorArc;
        return Ok(out);
    }

    let grid = spectrum_grid(&h, grid_len)?;
    let coefficient = |beta: &Frequency| -> Complex64 {
        let (a, b) = beta.exact.unwrap();
        if grid_len as u64 % b == 0 {
            grid[(a * (grid_len as u64 / b)) as usize]
        } else {
            let mut sums = vec![Complex64::new(0.0, 0.0); b as usize];
            for (i, v) in h.values().iter().enumerate() {
                sums[(i + 1) % b as usize] += v;
            }
            coefficient_by_residues(&sums, a, b)
        }
    };
    let moduli: Vec<f64> = on_arcs.par_iter().map(|beta| coefficient(beta).norm()).collect();
    let tol = 1e-9 * l1_norm(&h);
    let mut best = 0usize;
    for (i, &m) in moduli.iter().enumerate() {
        if m > moduli[best] + tol {
            best = i;
        }
    }
    out.best_coefficient = moduli[best];
    if moduli[best] < eta * n as f64 {
        out.status = MajorArcStatus::CoefficientBelowThreshold;
        return Ok(out);
    }
    let alpha = on_arcs[best];
    let approx = rational_approximation(&alpha, big_q)?;
    out.status = MajorArcStatus::Found;
    out.witness = Some(MajorArcWitness {
        alpha,
        q: approx.q,
        q_alpha_distance: approx.distance,
        coefficient_modulus: fourier_coefficient(&h, &alpha).norm(),
        delta,
    });
    Ok(out)
}
