//! Cut norms of `Λ_{q,N}`.
//!
//! `‖f‖_{q,N}` is the supremum of `|Λ_{q,N}|` with `f` in one slot and
//! 1-bounded functions supported on `[N]` in the other two, maximised over the
//! three positions of `f`; the partial norm `‖f‖♭_{q,N}` only places `f` in
//! slots 0 and 1.
//!
//! With `f` and one companion fixed, `Λ = E_x g(x) F(x)` for a dual function
//! `F`, so the best remaining companion is the conjugate phase of `F` and the
//! value becomes `E_x |F(x)|`. Alternating these updates never decreases the
//! value and gives lower bounds. For real `f` the updates stay real (`g =
//! sign F`), which keeps the estimate below the real supremum computed by
//! [`cut_norm_exact_small`].

use std::ops::{AddAssign, Mul};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::CountingParams;
use crate::error::{Error, Result};
use crate::factors::{lcm, JoinFunction, LocalSignature};
use crate::fourier::e;
use crate::function::{check_len, l1_norm, BoundedFunction};

/// Values the alternating maximisation can run over.
trait Scalar: Copy + Default + Send + Sync + AddAssign + Mul<Output = Self> {
    fn to_complex(self) -> Complex64;
    fn modulus(self) -> f64;
    /// The 1-bounded `g` maximising `Re(g · self)`; `1` at zero.
    fn phase_conj(self) -> Self;
    fn one() -> Self;
    fn scale(self, s: f64) -> Self;
    fn random_unit(rng: &mut ChaCha8Rng) -> Self;
}

impl Scalar for f64 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn phase_conj(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
    fn one() -> Self {
        1.0
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn random_unit(rng: &mut ChaCha8Rng) -> Self {
        if rng.random_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    }
}

impl Scalar for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn phase_conj(self) -> Self {
        let r = self.norm();
        if r == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self.conj() / r
        }
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn random_unit(rng: &mut ChaCha8Rng) -> Self {
        e(rng.random::<f64>())
    }
}

/// The two slots other than `slot`, ascending.
fn others(slot: usize) -> (usize, usize) {
    match slot {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Dual-function evaluation on zero-padded copies of the inputs.
struct Kernel {
    n: usize,
    q: usize,
    ys: Vec<usize>,
    off: usize,
    total: usize,
}

impl Kernel {
    fn new(p: &CountingParams, include_zero_shift: bool) -> Self {
        let m = p.m();
        let q = p.q() as usize;
        let ys = if include_zero_shift { (0..=m).collect() } else { (1..=m).collect() };
        let off = q * m * m + m + 1;
        Self { n: p.n(), q, ys, off, total: p.n() + 2 * off + 1 }
    }

    /// Values on `[N]` placed so that integer `z` sits at index `z + off`.
    fn pad<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); self.total];
        out[self.off + 1..=self.off + self.n].copy_from_slice(&v[..self.n]);
        out
    }

    /// `F` for `slot`, given padded functions in the other two slots
    /// (ascending slot order).
    fn dual<T: Scalar>(&self, slot: usize, a: &[T], b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut out = vec![T::default(); n];
        for &y in &self.ys {
            let s = self.q * y * y;
            let (sa, sb) = match slot {
                0 => (self.off + 1 + y, self.off + 1 + s),
                1 => (self.off + 1 - y, self.off + 1 - y + s),
                _ => (self.off + 1 - s, self.off + 1 - s + y),
            };
            for ((o, &u), &v) in out.iter_mut().zip(&a[sa..sa + n]).zip(&b[sb..sb + n]) {
                *o += u * v;
            }
        }
        let norm = 1.0 / self.ys.len() as f64;
        out.iter_mut().for_each(|v| *v = v.scale(norm));
        out
    }
}

/// `F` with `Λ_{q,N}(…) = E_{x∈[N]} g_slot(x) F(x)`, where `g_a`, `g_b` fill
/// the remaining slots in ascending order. Values past `N` are ignored.
pub fn dual_function(
    p: &CountingParams,
    slot: usize,
    g_a: &BoundedFunction,
    g_b: &BoundedFunction,
) -> Result<BoundedFunction> {
    if slot > 2 {
        return Err(Error::InvalidParameter(format!("slot {slot} not in 0..=2")));
    }
    for g in [g_a, g_b] {
        if g.len() < p.n() {
            return Err(Error::LengthMismatch { expected: p.n(), found: g.len() });
        }
    }
    let k = Kernel::new(p, false);
    let values: Vec<Complex64> = if g_a.is_real() && g_b.is_real() {
        let (a, b) = (k.pad(&g_a.real_parts()), k.pad(&g_b.real_parts()));
        k.dual(slot, &a, &b).into_iter().map(|v| Complex64::new(v, 0.0)).collect()
    } else {
        k.dual(slot, &k.pad(g_a.values()), &k.pad(g_b.values()))
    };
    BoundedFunction::with_bound(values, g_a.bound() * g_b.bound())
}

/// Which positions of `f` the supremum runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutNormKind {
    /// Slots 0 and 1.
    Partial,
    /// Slots 0, 1 and 2.
    Full,
}

impl CutNormKind {
    pub fn slots(self) -> &'static [usize] {
        match self {
            CutNormKind::Partial => &[0, 1],
            CutNormKind::Full => &[0, 1, 2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CutNormConfig {
    pub restarts: usize,
    pub iterations: usize,
    /// Stop a restart once a full cycle gains less than this.
    pub tolerance: f64,
    pub seed: u64,
    /// Average over `y ∈ {0, .., M}` instead of `y ∈ [M]`.
    pub include_zero_shift: bool,
}

impl Default for CutNormConfig {
    fn default() -> Self {
        Self { restarts: 8, iterations: 50, tolerance: 1e-10, seed: 0, include_zero_shift: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutNormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    /// Position of `f` in the best configuration found.
    pub slot: usize,
    /// Companions in the two other slots, ascending slot order.
    pub witness_a: BoundedFunction,
    pub witness_b: BoundedFunction,
    pub restarts: usize,
    /// Half-steps performed by the winning restart.
    pub iterations: usize,
    /// Values after each half-step of the winning restart.
    pub history: Vec<f64>,
}

struct Run<T> {
    value: f64,
    slot: usize,
    a: Vec<T>,
    b: Vec<T>,
    history: Vec<f64>,
}

fn alternate<T: Scalar>(
    k: &Kernel,
    f: &[T],
    slot: usize,
    start_b: Vec<T>,
    cfg: &CutNormConfig,
) -> Run<T> {
    let (sa, sb) = others(slot);
    let n = k.n as f64;
    let fp = k.pad(f);
    let mut a = vec![T::one(); k.n];
    let mut b = start_b;
    let mut history = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    let pick = |j: usize, a: &[T], b: &[T]| -> Vec<T> {
        if j == slot {
            fp.clone()
        } else if j == sa {
            k.pad(a)
        } else {
            k.pad(b)
        }
    };
    for _ in 0..cfg.iterations.max(1) {
        let (u, v) = others(sa);
        let d = k.dual(sa, &pick(u, &a, &b), &pick(v, &a, &b));
        a = d.iter().map(|z| z.phase_conj()).collect();
        history.push(d.iter().map(|z| z.modulus()).sum::<f64>() / n);

        let (u, v) = others(sb);
        let d = k.dual(sb, &pick(u, &a, &b), &pick(v, &a, &b));
        b = d.iter().map(|z| z.phase_conj()).collect();
        let cur = d.iter().map(|z| z.modulus()).sum::<f64>() / n;
        history.push(cur);
        if cur - prev < cfg.tolerance {
            break;
        }
        prev = cur;
    }
    Run { value: *history.last().unwrap(), slot, a, b, history }
}

fn lower_generic<T: Scalar>(
    p: &CountingParams,
    f: &[T],
    kind: CutNormKind,
    cfg: &CutNormConfig,
) -> Run<T> {
    let k = Kernel::new(p, cfg.include_zero_shift);
    let jobs: Vec<(usize, usize)> = kind
        .slots()
        .iter()
        .flat_map(|&s| (0..cfg.restarts.max(1)).map(move |r| (s, r)))
        .collect();
    let runs: Vec<Run<T>> = jobs
        .par_iter()
        .map(|&(slot, restart)| {
            let start = if restart == 0 {
                vec![T::one(); k.n]
            } else {
                let seed = cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((slot as u64) << 32 | restart as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..k.n).map(|_| T::random_unit(&mut rng)).collect()
            };
            alternate(&k, f, slot, start, cfg)
        })
        .collect();
    runs.into_iter().reduce(|best, r| if r.value > best.value { r } else { best }).unwrap()
}

/// Alternating-maximisation lower bound with `upper = min(‖f‖₁/N, ‖f‖_∞)`.
pub fn cut_norm_lower(
    p: &CountingParams,
    f: &BoundedFunction,
    kind: CutNormKind,
    cfg: &CutNormConfig,
) -> Result<CutNormEstimate> {
    check_len(p.n(), f.len())?;
    if cfg.restarts == 0 || cfg.iterations == 0 {
        return Err(Error::InvalidParameter("restarts and iterations must be positive".into()));
    }
    let upper = (l1_norm(f) / p.n() as f64).min(f.sup_norm());
    let to_fn = |v: Vec<Complex64>| BoundedFunction::new(v);
    let (lower, slot, a, b, history) = if f.is_real() {
        let r = lower_generic(p, &f.real_parts(), kind, cfg);
        let conv = |v: Vec<f64>| v.into_iter().map(|x| x.to_complex()).collect::<Vec<_>>();
        (r.value, r.slot, conv(r.a), conv(r.b), r.history)
    } else {
        let r = lower_generic(p, f.values(), kind, cfg);
        (r.value, r.slot, r.a, r.b, r.history)
    };
    Ok(CutNormEstimate {
        lower,
        upper,
        exact: false,
        slot,
        witness_a: to_fn(a)?,
        witness_b: to_fn(b)?,
        restarts: cfg.restarts,
        iterations: history.len(),
        history,
    })
}

/// Largest `N` accepted by [`cut_norm_exact_small`].
pub const EXACT_LIMIT: usize = 14;

/// The exact real supremum for real `f`, `N <= 14`.
///
/// `Λ` is bilinear in the two companions, so the supremum over the real cube
/// `[-1, 1]^N × [-1, 1]^N` sits at a vertex. One companion is enumerated over
/// `{±1}^N` (up to a global sign) and the other is closed in form as the
/// `ℓ¹` norm of the induced coefficient vector.
pub fn cut_norm_exact_small(
    p: &CountingParams,
    f: &BoundedFunction,
    kind: CutNormKind,
    include_zero_shift: bool,
) -> Result<f64> {
    let n = p.n();
    if n > EXACT_LIMIT {
        return Err(Error::TooLarge { n, limit: EXACT_LIMIT });
    }
    check_len(n, f.len())?;
    if !f.is_real() {
        return Err(Error::ComplexInput);
    }
    let fr = f.real_parts();
    let y0 = if include_zero_shift { 0 } else { 1 };
    let mut triples = Vec::new();
    for x in 1..=n {
        for y in y0..=p.m() {
            let t = [x, x + y, x + p.quad_shift(y)];
            if t.iter().all(|&v| v <= n) {
                triples.push(t.map(|v| v - 1));
            }
        }
    }
    let norm = (n * (p.m() + 1 - y0)) as f64;
    let mut best: f64 = 0.0;
    for &slot in kind.slots() {
        let (sa, sb) = others(slot);
        for mask in 0u32..(1 << (n - 1)) {
            let mut c = [0.0f64; EXACT_LIMIT];
            for t in &triples {
                let ga = if mask >> t[sa] & 1 == 1 { -1.0 } else { 1.0 };
                c[t[sb]] += fr[t[slot]] * ga;
            }
            best = best.max(c.iter().map(|v| v.abs()).sum::<f64>() / norm);
        }
    }
    Ok(best)
}

/// Candidate simple local factors for [`inverse_correlation_search`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchGrid {
    /// Resolutions `⌈√(N/q)⌉ · 2^k` for `k` in `k_min..=k_max`.
    pub k_min: i32,
    pub k_max: i32,
    /// Moduli `q · q'` for `q'` in `1..=max_modulus_factor`.
    pub max_modulus_factor: u64,
    /// Phases `{0, ⌊M/2⌋}` when set, else `{0}`.
    pub half_phase: bool,
    /// Absolute correlation a witness must reach.
    pub threshold: f64,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self { k_min: -1, k_max: 3, max_modulus_factor: 12, half_phase: true, threshold: 0.0 }
    }
}

/// Smallest `r` with `q r² >= N`.
fn ceil_sqrt_ratio(n: u64, q: u64) -> u64 {
    let mut r = crate::counting::isqrt(n / q);
    while q * r * r < n {
        r += 1;
    }
    r.max(1)
}

impl SearchGrid {
    pub fn resolutions(&self, n: usize, q: u64) -> Vec<u64> {
        let base = ceil_sqrt_ratio(n as u64, q);
        let mut out: Vec<u64> = (self.k_min..=self.k_max)
            .map(|k| if k >= 0 { base << k } else { base.div_ceil(1 << -k) }.max(1))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All candidates, sorted by `(M, modulus, phase)`.
    pub fn candidates(&self, n: usize, q: u64) -> Vec<LocalSignature> {
        let mut out = Vec::new();
        for m in self.resolutions(n, q) {
            for qp in 1..=self.max_modulus_factor.max(1) {
                let mut phases = vec![0];
                if self.half_phase && m / 2 > 0 {
                    phases.push(m / 2);
                }
                for ph in phases {
                    out.push(LocalSignature { resolution: m, modulus: q * qp, phase: ph });
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// A 1-bounded function measurable for the join of two simple local factors
/// with large correlation `|Σ_x f(x) ψ(x)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationWitness {
    pub signatures: [LocalSignature; 2],
    /// lcm of the two moduli.
    pub modulus: u64,
    pub correlation: f64,
    /// `ψ`, the conjugate phase of `Π f` on the join's atoms.
    pub function: JoinFunction,
}

impl CorrelationWitness {
    /// `|Σ_x f(x) ψ(x)|` recomputed from the stored function.
    pub fn reproduce(&self, f: &BoundedFunction) -> Result<f64> {
        let psi = self.function.to_function(f.len())?;
        Ok(f.values().iter().zip(psi.values()).map(|(a, b)| a * b).sum::<Complex64>().norm())
    }
}

struct PairLayout {
    modulus: usize,
    segments: usize,
}

/// Atom index of `x` in the join of `s1` and `s2`: the interval pair moves
/// monotonically with `x`, so `k1 + k2` indexes it injectively.
fn pair_layout(n: usize, s1: &LocalSignature, s2: &LocalSignature) -> Result<PairLayout> {
    let modulus = lcm(s1.modulus, s2.modulus)? as usize;
    let lo = s1.interval(1) + s2.interval(1);
    let hi = s1.interval(n as i64) + s2.interval(n as i64);
    Ok(PairLayout { modulus, segments: (hi - lo + 1) as usize })
}

fn pair_sums<T: Scalar>(
    f: &[T],
    k1: &[u32],
    k2: &[u32],
    layout: &PairLayout,
) -> Vec<T> {
    let mut sums = vec![T::default(); layout.segments * layout.modulus];
    let mut r = 1 % layout.modulus;
    for (i, &v) in f.iter().enumerate() {
        let seg = (k1[i] + k2[i]) as usize;
        sums[seg * layout.modulus + r] += v;
        r += 1;
        if r == layout.modulus {
            r = 0;
        }
    }
    sums
}

fn search_generic<T: Scalar>(
    f: &[T],
    q: u64,
    grid: &SearchGrid,
) -> Result<Option<CorrelationWitness>> {
    let n = f.len();
    let cands = grid.candidates(n, q);
    let intervals: Vec<Vec<u32>> = cands
        .iter()
        .map(|s| {
            let k0 = s.interval(1);
            (1..=n as i64).map(|x| (s.interval(x) - k0) as u32).collect()
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..cands.len()).flat_map(|i| (i..cands.len()).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let layout = pair_layout(n, &cands[i], &cands[j])?;
            Ok(pair_sums(f, &intervals[i], &intervals[j], &layout).iter().map(|s| s.modulus()).sum())
        })
        .collect::<Result<_>>()?;
    let tol = 1e-9 * n as f64;
    let mut best = 0;
    for (idx, &v) in values.iter().enumerate() {
        if v > values[best] + tol {
            best = idx;
        }
    }
    let correlation = values[best];
    if correlation <= 0.0 || correlation < grid.threshold {
        return Ok(None);
    }
    let (i, j) = pairs[best];
    let layout = pair_layout(n, &cands[i], &cands[j])?;
    let sums = pair_sums(f, &intervals[i], &intervals[j], &layout);
    let function = JoinFunction::from_fn(vec![cands[i], cands[j]], n, |x| {
        let idx = x as usize - 1;
        let seg = (intervals[i][idx] + intervals[j][idx]) as usize;
        sums[seg * layout.modulus + x as usize % layout.modulus].phase_conj().to_complex()
    })?;
    Ok(Some(CorrelationWitness {
        signatures: [cands[i], cands[j]],
        modulus: layout.modulus as u64,
        correlation,
        function,
    }))
}

/// Best pair of simple local factors from `grid` for correlating with `f`.
///
/// For a join `𝓑` of two simple local factors, the best 1-bounded
/// `𝓑`-measurable test function is the conjugate phase of `Π_𝓑 f`, with
/// correlation `‖Π_𝓑 f‖₁`. Every unordered pair of candidates is scored this
/// way; ties within `1e-9·N` go to the lexicographically first pair. Returns
/// `None` when the best correlation is zero or below `grid.threshold`.
pub fn inverse_correlation_search(
    f: &BoundedFunction,
    q: u64,
    grid: &SearchGrid,
) -> Result<Option<CorrelationWitness>> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    if f.is_real() {
        search_generic(&f.real_parts(), q, grid)
    } else {
        search_generic(f.values(), q, grid)
    }
}
