//! The counting operator
//!
//! ```text
//! Λ_{q,N}(f0, f1, f2) = E_{x∈[N]} E_{y∈[M]} f0(x) f1(x+y) f2(x+q y²),   M = ⌊√(N/q)⌋
//! ```
//!
//! together with exact configuration counts, freeness checks, the ℓ¹
//! control bound and the polynomial-family generalisation.
//!
//! Inputs whose values all lie in `{-1, 0, 1}` are counted exactly with
//! shifted bitset intersections (one AND per 64 values of `x`); other inputs
//! take the direct double sum.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{l1_norm, BoundedFunction};
use crate::set::IntegerSet;

/// `(q, N)` with the derived `M = ⌊√(N/q)⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingParams {
    q: u64,
    n: usize,
    m: usize,
}

impl CountingParams {
    pub fn new(q: u64, n: usize) -> Result<Self> {
        if q == 0 || n == 0 {
            return Err(Error::InvalidParameter("q and N must be positive".into()));
        }
        if q > n as u64 {
            return Err(Error::ModulusTooLarge { q, n });
        }
        let m = isqrt(n as u64 / q) as usize;
        Ok(Self { q, n, m })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `q y²` as a shift.
    #[inline]
    pub fn quad_shift(&self, y: usize) -> usize {
        self.q as usize * y * y
    }
}

/// `⌊√v⌋` for any `u64`.
pub fn isqrt(v: u64) -> u64 {
    if v < 2 {
        return v;
    }
    let mut r = (v as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > v) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= v) {
        r += 1;
    }
    r
}

/// Largest `r` with `r^d <= v`.
pub fn iroot(v: u64, d: u32) -> u64 {
    if d == 1 || v < 2 {
        return v;
    }
    let mut r = (v as f64).powf(1.0 / d as f64) as u64;
    let pow_le = |r: u64| r.checked_pow(d).is_some_and(|s| s <= v);
    while r > 0 && !pow_le(r) {
        r -= 1;
    }
    while pow_le(r + 1) {
        r += 1;
    }
    r
}

fn check_min_len(p: &CountingParams, fs: &[&BoundedFunction]) -> Result<()> {
    for f in fs {
        if f.len() < p.n {
            return Err(Error::LengthMismatch { expected: p.n, found: f.len() });
        }
    }
    Ok(())
}

/// `Λ_{q,N}(f0, f1, f2)`. Functions may be longer than `N`; values past
/// their length count as zero.
pub fn count_operator(
    p: &CountingParams,
    f0: &BoundedFunction,
    f1: &BoundedFunction,
    f2: &BoundedFunction,
) -> Result<Complex64> {
    check_min_len(p, &[f0, f1, f2])?;
    let norm = (p.n * p.m) as f64;
    if let (Some(t0), Some(t1), Some(t2)) = (f0.as_ternary(), f1.as_ternary(), f2.as_ternary()) {
        let total = ternary_sum(p, &SignSplit::new(&t0), &SignSplit::new(&t1), &SignSplit::new(&t2));
        return Ok(Complex64::new(total as f64 / norm, 0.0));
    }
    Ok(naive_sum(p, f0, f1, f2) / norm)
}

/// The unnormalised double sum, `x` outer and `y` inner.
fn naive_sum(p: &CountingParams, f0: &BoundedFunction, f1: &BoundedFunction, f2: &BoundedFunction) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for x in 1..=p.n as i64 {
        let a = f0.get(x);
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for y in 1..=p.m {
            inner += f1.get(x + y as i64) * f2.get(x + p.quad_shift(y) as i64);
        }
        total += a * inner;
    }
    total
}

struct SignSplit {
    pos: IntegerSet,
    neg: IntegerSet,
}

impl SignSplit {
    fn new(t: &[i8]) -> Self {
        let n = t.len();
        let mut pos = IntegerSet::new(n);
        let mut neg = IntegerSet::new(n);
        for (i, &v) in t.iter().enumerate() {
            match v {
                1 => {
                    pos.insert(i + 1);
                }
                -1 => {
                    neg.insert(i + 1);
                }
                _ => {}
            }
        }
        Self { pos, neg }
    }
}

#[inline]
fn x_mask(n: usize, w: usize) -> u64 {
    let hi = (w + 1) * 64;
    if hi <= n {
        !0
    } else {
        (1u64 << (n - w * 64)) - 1
    }
}

fn ternary_sum(p: &CountingParams, s0: &SignSplit, s1: &SignSplit, s2: &SignSplit) -> i128 {
    let words = p.n.div_ceil(64);
    let unsigned = s0.neg.is_empty() && s1.neg.is_empty() && s2.neg.is_empty();
    (1..=p.m)
        .into_par_iter()
        .map(|y| {
            let (d1, d2) = (y, p.quad_shift(y));
            let mut plus = 0i128;
            let mut minus = 0i128;
            for w in 0..words {
                let m = x_mask(p.n, w);
                let b = w * 64;
                let (p0, p1, p2) = (s0.pos.window(b) & m, s1.pos.window(b + d1), s2.pos.window(b + d2));
                if unsigned {
                    plus += (p0 & p1 & p2).count_ones() as i128;
                    continue;
                }
                let (n0, n1, n2) = (s0.neg.window(b) & m, s1.neg.window(b + d1), s2.neg.window(b + d2));
                let pm = (p0 & p1 & p2) | (p0 & n1 & n2) | (n0 & p1 & n2) | (n0 & n1 & p2);
                let nm = (n0 & p1 & p2) | (p0 & n1 & p2) | (p0 & p1 & n2) | (n0 & n1 & n2);
                plus += pm.count_ones() as i128;
                minus += nm.count_ones() as i128;
            }
            plus - minus
        })
        .sum()
}

/// Pairs `(x, y)` with `y ∈ [lo, hi]` and `x, x + y, x + q y²` all in `A`.
fn count_shifted(a: &IntegerSet, q: u64, ys: std::ops::RangeInclusive<usize>) -> u128 {
    let words = a.len().div_ceil(64);
    ys.into_par_iter()
        .map(|y| {
            let (d1, d2) = (y, q as usize * y * y);
            let mut c = 0u128;
            for w in 0..words {
                let b = w * 64;
                c += (a.words()[w] & a.window(b + d1) & a.window(b + d2)).count_ones() as u128;
            }
            c
        })
        .sum()
}

/// The number of pairs `(x, y)`, `y ∈ [M]`, with `x, x+y, x+qy² ∈ A`.
/// Equals `Λ_{q,N}(1_A) · N · M`.
pub fn count_configurations(a: &IntegerSet, p: &CountingParams) -> Result<u128> {
    crate::function::check_len(p.n, a.len())?;
    Ok(count_shifted(a, p.q, 1..=p.m))
}

/// A configuration `x, x + y, x + q y²` with `y ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub x: i64,
    pub y: i64,
}

impl Configuration {
    pub fn points(&self, q: u64) -> [i64; 3] {
        [self.x, self.x + self.y, self.x + q as i64 * self.y * self.y]
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x={} y={}", self.x, self.y)
    }
}

/// Result of a full freeness scan over every `y ≠ 0` that fits in `[N]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessReport {
    /// No configuration with `y >= 1` and none with `y <= -1`.
    pub free: bool,
    /// Pairs with `y >= 1`; this is also `count_configurations`, since every
    /// admissible positive `y` is at most `M`.
    pub positive_pairs: u128,
    pub negative_pairs: u128,
    /// First configuration found scanning `y = 1, 2, ..` then `x` ascending.
    pub positive_witness: Option<Configuration>,
    pub negative_witness: Option<Configuration>,
}

impl FreenessReport {
    pub fn free_for_positive_y(&self) -> bool {
        self.positive_pairs == 0
    }

    pub fn witness(&self) -> Option<Configuration> {
        self.positive_witness.or(self.negative_witness)
    }
}

fn first_hit(a: &IntegerSet, d1: usize, d2: usize) -> Option<i64> {
    let words = a.len().div_ceil(64);
    (0..words).find_map(|w| {
        let hit = a.words()[w] & a.window(w * 64 + d1) & a.window(w * 64 + d2);
        (hit != 0).then(|| (w * 64 + hit.trailing_zeros() as usize + 1) as i64)
    })
}

/// Scans all `y ≠ 0` with `x, x+y, x+qy² ∈ [N]` and reports both signs
/// separately.
///
/// A negative `y = -t` configuration `x, x - t, x + q t²` is counted through
/// its smallest point `u = x - t`, i.e. `u, u + t, u + t + q t²`.
pub fn is_configuration_free(a: &IntegerSet, q: u64) -> Result<FreenessReport> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    let n = a.len();
    let y_max = isqrt((n as u64 - 1) / q) as usize;
    let mut positive_pairs = 0;
    let mut negative_pairs = 0;
    let mut positive_witness = None;
    let mut negative_witness = None;
    if y_max >= 1 {
        positive_pairs = count_shifted(a, q, 1..=y_max);
        let neg_counts: Vec<u128> = (1..=y_max)
            .into_par_iter()
            .map(|t| count_one_shift(a, t, t + q as usize * t * t))
            .collect();
        negative_pairs = neg_counts.iter().sum();
        if positive_pairs > 0 {
            positive_witness = (1..=y_max).find_map(|y| {
                first_hit(a, y, q as usize * y * y).map(|x| Configuration { x, y: y as i64 })
            });
        }
        if negative_pairs > 0 {
            negative_witness = (1..=y_max).find_map(|t| {
                let u = first_hit(a, t, t + q as usize * t * t)?;
                Some(Configuration { x: u + t as i64, y: -(t as i64) })
            });
        }
    }
    Ok(FreenessReport {
        free: positive_pairs == 0 && negative_pairs == 0,
        positive_pairs,
        negative_pairs,
        positive_witness,
        negative_witness,
    })
}

fn count_one_shift(a: &IntegerSet, d1: usize, d2: usize) -> u128 {
    let words = a.len().div_ceil(64);
    (0..words)
        .map(|w| (a.words()[w] & a.window(w * 64 + d1) & a.window(w * 64 + d2)).count_ones() as u128)
        .sum()
}

/// Every configuration (either sign of `y`) that uses `z` and whose other
/// points lie in `A ∪ {z}`. Used for incremental greedy constructions.
pub fn configurations_through(a: &IntegerSet, q: u64, z: usize) -> Vec<Configuration> {
    let n = a.len() as i64;
    let z = z as i64;
    let in_a = |v: i64| v == z || a.contains(v);
    let y_max = isqrt((n as u64).saturating_sub(1) / q) as i64;
    let mut out = Vec::new();
    for t in 1..=y_max {
        let qt = q as i64 * t * t;
        for y in [t, -t] {
            // z as x, as x + y, as x + q y²
            for x in [z, z - y, z - qt] {
                let c = Configuration { x, y };
                let pts = c.points(q);
                if pts.iter().all(|&v| v >= 1 && v <= n && in_a(v)) && pts.contains(&z) && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Whether adding `z` to `A` creates a configuration of either sign.
pub fn creates_configuration(a: &IntegerSet, q: u64, z: usize) -> bool {
    let n = a.len() as i64;
    let z = z as i64;
    let in_a = |v: i64| v == z || a.contains(v);
    let y_max = isqrt((n as u64).saturating_sub(1) / q) as i64;
    for t in 1..=y_max {
        let qt = q as i64 * t * t;
        for y in [t, -t] {
            for x in [z, z - y, z - qt] {
                let (p1, p2) = (x + y, x + qt);
                if in_a(x) && in_a(p1) && in_a(p2) {
                    return true;
                }
            }
        }
    }
    false
}

/// `N⁻¹ ‖f_i‖₁ ∏_{j≠i} ‖f_j‖_∞`, an upper bound for `|Λ_{q,N}(f0, f1, f2)|`.
pub fn l1_control_bound(
    p: &CountingParams,
    f0: &BoundedFunction,
    f1: &BoundedFunction,
    f2: &BoundedFunction,
    slot: usize,
) -> Result<f64> {
    let fs = [f0, f1, f2];
    if slot > 2 {
        return Err(Error::InvalidParameter(format!("slot {slot} not in 0..=2")));
    }
    let mut bound = l1_norm(fs[slot]) / p.n as f64;
    for (j, f) in fs.iter().enumerate() {
        if j != slot {
            bound *= f.sup_norm();
        }
    }
    Ok(bound)
}

/// An integer polynomial `Σ c_k y^k` with zero constant term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<i64>,
}

impl Polynomial {
    /// Coefficients in ascending degree; `coeffs[0]` must be zero.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("zero polynomial".into()));
        }
        if coeffs[0] != 0 {
            return Err(Error::InvalidParameter("polynomial must have zero constant term".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn monomial(degree: u32) -> Self {
        assert!(degree >= 1);
        let mut coeffs = vec![0; degree as usize + 1];
        coeffs[degree as usize] = 1;
        Self { coeffs }
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// `P(y)`, or `None` on overflow.
    pub fn eval(&self, y: i64) -> Option<i128> {
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(y as i128)?.checked_add(c as i128)?;
        }
        Some(acc)
    }
}

/// `P_1, .., P_m` with strictly increasing degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialFamily {
    polys: Vec<Polynomial>,
}

impl PolynomialFamily {
    pub fn new(polys: Vec<Polynomial>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::InvalidParameter("empty polynomial family".into()));
        }
        if polys.windows(2).any(|w| w[0].degree() >= w[1].degree()) {
            return Err(Error::InvalidParameter("degrees must be strictly increasing".into()));
        }
        Ok(Self { polys })
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn top_degree(&self) -> u32 {
        self.polys.last().map(|p| p.degree()).unwrap_or(1)
    }
}

/// `E_{x∈[N]} E_{y∈[⌊N^{1/deg P_m}⌋]} f0(x) ∏ f_i(x + P_i(y))`.
pub fn polynomial_counting_operator(
    n: usize,
    fam: &PolynomialFamily,
    fs: &[BoundedFunction],
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    if fs.len() != fam.len() + 1 {
        return Err(Error::InvalidParameter(format!(
            "expected {} functions, got {}",
            fam.len() + 1,
            fs.len()
        )));
    }
    for f in fs {
        if f.len() < n {
            return Err(Error::LengthMismatch { expected: n, found: f.len() });
        }
    }
    let y_len = iroot(n as u64, fam.top_degree()) as i64;
    if y_len == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let shifts: Vec<Vec<Option<i64>>> = fam
        .polys()
        .iter()
        .map(|poly| (1..=y_len).map(|y| poly.eval(y).and_then(|v| i64::try_from(v).ok())).collect())
        .collect();
    let zero = Complex64::new(0.0, 0.0);
    let mut total = zero;
    for x in 1..=n as i64 {
        let a = fs[0].get(x);
        if a == zero {
            continue;
        }
        let mut inner = zero;
        for yi in 0..y_len as usize {
            let mut prod = Complex64::new(1.0, 0.0);
            for (i, sh) in shifts.iter().enumerate() {
                prod *= match sh[yi].and_then(|s| x.checked_add(s)) {
                    Some(pt) => fs[i + 1].get(pt),
                    None => zero,
                };
            }
            inner += prod;
        }
        total += a * inner;
    }
    Ok(total / (n as f64 * y_len as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::indicator;

    fn params(q: u64, n: usize) -> CountingParams {
        CountingParams::new(q, n).unwrap()
    }

    /// Independent triple loop over `(x, y)`.
    fn brute_pairs(a: &IntegerSet, q: u64, n: usize) -> u128 {
        let m = (((n as f64) / q as f64).sqrt().floor()) as i64;
        let mut c = 0;
        for x in 1..=n as i64 {
            for y in 1..=m {
                if a.contains(x) && a.contains(x + y) && a.contains(x + q as i64 * y * y) {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn params_invariants() {
        for n in 1..300usize {
            for q in 1..=n as u64 {
                let p = params(q, n);
                assert!(p.m() >= 1);
                assert!(q * (p.m() as u64).pow(2) <= n as u64);
                assert!((n as u64) < q * (p.m() as u64 + 1).pow(2));
            }
        }
        assert!(matches!(CountingParams::new(10, 9), Err(Error::ModulusTooLarge { .. })));
        assert!(CountingParams::new(0, 9).is_err());
    }

    #[test]
    fn integer_roots() {
        for v in 0..5000u64 {
            let r = isqrt(v);
            assert!(r * r <= v && (r + 1) * (r + 1) > v);
            let c = iroot(v, 3);
            assert!(c.pow(3) <= v && (c + 1).pow(3) > v);
        }
        assert_eq!(isqrt(u64::MAX), 4294967295);
    }

    #[test]
    fn lambda_nine_examples() {
        let p = params(1, 9);
        assert_eq!(p.m(), 3);
        let one = BoundedFunction::ones(9);
        let lam = count_operator(&p, &one, &one, &one).unwrap();
        assert_eq!(lam, Complex64::new(13.0 / 27.0, 0.0));
        let odd = IntegerSet::from_predicate(9, |x| x % 2 == 1);
        let f = indicator(&odd);
        assert_eq!(count_operator(&p, &f, &f, &f).unwrap(), Complex64::new(3.0 / 27.0, 0.0));
        assert_eq!(count_operator(&p, &BoundedFunction::zero(9), &one, &one).unwrap().norm(), 0.0);
    }

    #[test]
    fn configuration_counts() {
        let p = params(1, 9);
        assert_eq!(count_configurations(&IntegerSet::new(9), &p).unwrap(), 0);
        assert_eq!(count_configurations(&IntegerSet::full(9), &p).unwrap(), 13);
        let odd = IntegerSet::from_predicate(9, |x| x % 2 == 1);
        assert_eq!(count_configurations(&odd, &p).unwrap(), 3);
    }

    #[test]
    fn ternary_and_complex_paths_agree() {
        let p = params(2, 300);
        let t: Vec<f64> = (1..=300).map(|x| [(1.0), (-1.0), 0.0][(x * 7 % 11) % 3]).collect();
        let f = BoundedFunction::from_real(&t).unwrap();
        let fast = count_operator(&p, &f, &f, &f).unwrap();
        let slow = naive_sum(&p, &f, &f, &f) / (p.n() * p.m()) as f64;
        assert_eq!(fast, slow);
    }

    #[test]
    fn freeness_examples() {
        let one = IntegerSet::from_members(10, [1]).unwrap();
        assert!(is_configuration_free(&one, 1).unwrap().free);
        let pair = IntegerSet::from_members(10, [1, 2]).unwrap();
        let r = is_configuration_free(&pair, 1).unwrap();
        assert!(!r.free);
        assert_eq!(r.positive_witness, Some(Configuration { x: 1, y: 1 }));
        assert_eq!(r.witness().unwrap().to_string(), "x=1 y=1");
    }

    #[test]
    fn freeness_matches_exhaustive_scan() {
        // {1, 3, 6} in [6]: all (x, y) pairs with y ≠ 0.
        let a = IntegerSet::from_members(6, [1, 3, 6]).unwrap();
        let mut pos = 0u128;
        let mut neg = 0u128;
        for x in -10i64..=10 {
            for y in -10i64..=10 {
                if y == 0 {
                    continue;
                }
                if a.contains(x) && a.contains(x + y) && a.contains(x + y * y) {
                    if y > 0 {
                        pos += 1
                    } else {
                        neg += 1
                    }
                }
            }
        }
        let r = is_configuration_free(&a, 1).unwrap();
        assert_eq!((r.positive_pairs, r.negative_pairs), (pos, neg));
        assert_eq!(r.free, pos + neg == 0);
    }

    #[test]
    fn negative_configurations_are_reported_separately() {
        // x = 3, y = -1: 3, 2, 4.
        let a = IntegerSet::from_members(6, [2, 3, 4]).unwrap();
        let r = is_configuration_free(&a, 1).unwrap();
        assert!(r.negative_pairs >= 1);
        let w = r.negative_witness.unwrap();
        assert!(w.points(1).iter().all(|&v| a.contains(v)));
        assert!(w.y < 0);
    }

    #[test]
    fn incremental_check_matches_full_scan() {
        let n = 80;
        let mut a = IntegerSet::new(n);
        for z in [5, 9, 17, 30, 31, 44, 60, 61, 70] {
            let creates = creates_configuration(&a, 2, z);
            let mut b = a.clone();
            b.insert(z);
            let full = is_configuration_free(&b, 2).unwrap();
            let before = is_configuration_free(&a, 2).unwrap();
            if before.free {
                assert_eq!(creates, !full.free, "z = {z}");
                assert_eq!(configurations_through(&a, 2, z).is_empty(), full.free);
            }
            a.insert(z);
        }
    }

    #[test]
    fn l1_bound_examples() {
        let p = params(1, 50);
        let one = BoundedFunction::ones(50);
        assert_eq!(l1_control_bound(&p, &one, &one, &one, 0).unwrap(), 1.0);
        let pm = BoundedFunction::point_mass(50, 17).unwrap();
        assert_eq!(l1_control_bound(&p, &one, &pm, &one, 1).unwrap(), 1.0 / 50.0);
        assert!(l1_control_bound(&p, &one, &one, &one, 3).is_err());
    }

    #[test]
    fn polynomial_family_validation() {
        assert!(PolynomialFamily::new(vec![]).is_err());
        assert!(PolynomialFamily::new(vec![Polynomial::monomial(2), Polynomial::monomial(1)]).is_err());
        assert!(PolynomialFamily::new(vec![Polynomial::monomial(2), Polynomial::monomial(2)]).is_err());
        assert!(Polynomial::new(vec![1, 1]).is_err());
        assert!(Polynomial::new(vec![0, 0]).is_err());
        assert_eq!(Polynomial::new(vec![0, 3, 0, 2]).unwrap().eval(2), Some(22));
    }

    #[test]
    fn polynomial_operator_matches_quadratic_case() {
        let fam = PolynomialFamily::new(vec![Polynomial::monomial(1), Polynomial::monomial(2)]).unwrap();
        let one = BoundedFunction::ones(9);
        let v = polynomial_counting_operator(9, &fam, &[one.clone(), one.clone(), one]).unwrap();
        assert!((v - Complex64::new(13.0 / 27.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn polynomial_operator_brute_force() {
        // (y, y³) at N = 8: y ∈ [2].
        let mut c = 0;
        for x in 1..=8i64 {
            for y in 1..=2i64 {
                if x + y <= 8 && x + y * y * y <= 8 {
                    c += 1;
                }
            }
        }
        let fam = PolynomialFamily::new(vec![Polynomial::monomial(1), Polynomial::monomial(3)]).unwrap();
        let one = BoundedFunction::ones(8);
        let v = polynomial_counting_operator(8, &fam, &[one.clone(), one.clone(), one]).unwrap();
        assert_eq!(v.re, c as f64 / 16.0);

        // (y²) alone at N = 16: y ∈ [4].
        let mut c = 0;
        for x in 1..=16i64 {
            for y in 1..=4i64 {
                if x + y * y <= 16 {
                    c += 1;
                }
            }
        }
        let fam = PolynomialFamily::new(vec![Polynomial::monomial(2)]).unwrap();
        let one = BoundedFunction::ones(16);
        let v = polynomial_counting_operator(16, &fam, &[one.clone(), one]).unwrap();
        assert_eq!(v.re, c as f64 / 64.0);
        assert_eq!(c, 34);
    }

    #[test]
    fn bitset_count_matches_brute_force_small() {
        for n in [1usize, 2, 5, 63, 64, 65, 130] {
            for q in 1..=(n as u64).min(5) {
                let a = IntegerSet::from_predicate(n, |x| (x * 37 + q as usize) % 5 < 3);
                assert_eq!(count_configurations(&a, &params(q, n)).unwrap(), brute_pairs(&a, q, n));
            }
        }
    }
}
