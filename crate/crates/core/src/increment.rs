//! Density increments for configuration-free sets, the rescaling iteration,
//! greedy configuration-free sets and the oscillating example showing that
//! dual functions need not correlate with global local functions.
//!
//! If `A ⊆ [N]` has no `x, x + y, x + Q y²` with `y ≠ 0` and `P = a + s·[L]`
//! with `Q | s`, then `{x : a + s x ∈ A}` has no `x, x + y, x + Q² (s/Q) y²`,
//! since `Y = s y` satisfies `Q Y² = s · Q² (s/Q) y²`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::{count_operator, creates_configuration, is_configuration_free, isqrt, Configuration, CountingParams};
use crate::error::{Error, Result};
use crate::function::{indicator, BoundedFunction};
use crate::progression::Progression;
use crate::regularity::{weak_regularize, RegularityCaps, RegularityStop};
use crate::set::IntegerSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IncrementCaps {
    pub regularity: RegularityCaps,
    /// Atoms shorter than this are not accepted.
    pub min_length: u64,
    /// `N < (q/δ)^small_n_exponent` is reported as too small.
    pub small_n_exponent: f64,
}

impl Default for IncrementCaps {
    fn default() -> Self {
        Self {
            regularity: RegularityCaps { max_dimension: 4, ..RegularityCaps::default() },
            min_length: 1,
            small_n_exponent: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementResult {
    pub progression: Progression,
    pub old_density: f64,
    /// `|A ∩ P| / |P|`, recomputed from `A`.
    pub new_density: f64,
    pub count: usize,
    pub c: f64,
    /// Atom id within the regularity factor.
    pub atom_id: u32,
    pub atom_count: usize,
    pub regularity_stop: RegularityStop,
    pub regularity_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotFoundReason {
    /// Fewer than two elements, `M < 2`, `q > N` or `N < (q/δ)^e`.
    SmallN,
    /// No atom of the regularity factor has density `>= (1+c)δ`.
    NoDenseAtom,
    /// Dense atoms exist but all are shorter than `min_length`.
    AtomTooShort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementDiagnostic {
    pub reason: NotFoundReason,
    pub detail: String,
    pub regularity_stop: Option<RegularityStop>,
    /// Highest atom density seen.
    pub best_atom_density: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncrementOutcome {
    Found(IncrementResult),
    NotFound(IncrementDiagnostic),
}

fn not_found(reason: NotFoundReason, detail: String) -> IncrementOutcome {
    IncrementOutcome::NotFound(IncrementDiagnostic { reason, detail, regularity_stop: None, best_atom_density: None })
}

fn configuration_error(c: Configuration) -> Error {
    Error::ContainsConfiguration { x: c.x, y: c.y }
}

/// Regularises `1_A`, keeps the atoms where the structured part is at least
/// `(1+c)δ` and returns the largest of them (smallest start on ties) as a
/// progression whose step is the factor modulus.
pub fn find_density_increment(
    a: &IntegerSet,
    q: u64,
    delta: f64,
    c: f64,
    caps: &IncrementCaps,
) -> Result<IncrementOutcome> {
    if q == 0 || !(c > 0.0) {
        return Err(Error::InvalidParameter("q and c must be positive".into()));
    }
    let n = a.len();
    let report = is_configuration_free(a, q)?;
    if let Some(w) = report.witness() {
        return Err(configuration_error(w));
    }
    if (a.density() - delta).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("δ = {delta} but |A|/N = {}", a.density())));
    }
    if a.cardinality() < 2 {
        return Ok(not_found(NotFoundReason::SmallN, format!("|A| = {}", a.cardinality())));
    }
    if q > n as u64 {
        return Ok(not_found(NotFoundReason::SmallN, format!("q = {q} exceeds N = {n}")));
    }
    let p = CountingParams::new(q, n)?;
    if p.m() < 2 {
        return Ok(not_found(NotFoundReason::SmallN, format!("M = {}", p.m())));
    }
    let floor = (q as f64 / delta).powf(caps.small_n_exponent);
    if (n as f64) < floor {
        return Ok(not_found(NotFoundReason::SmallN, format!("N = {n} below (q/δ)^e = {floor:.3}")));
    }

    let one = BoundedFunction::ones(n);
    let lambda_full = count_operator(&p, &one, &one, &one)?.re;
    let delta_reg = (delta.powi(3) * lambda_full / 6.0).min(1.0);
    let reg = weak_regularize(&p, &indicator(a), delta_reg, &caps.regularity)?;
    let factor = &reg.factor;
    let step = factor.meta().map_or(1, |m| m.q);
    let target = (1.0 + c) * delta;

    let atoms = factor.atoms();
    let densities: Vec<f64> = atoms
        .iter()
        .map(|atom| atom.iter().filter(|&&x| a.contains(x as i64)).count() as f64 / atom.len() as f64)
        .collect();
    let best_density = densities.iter().cloned().fold(0.0, f64::max);
    let mut chosen: Option<usize> = None;
    let mut dense_seen = false;
    for (id, atom) in atoms.iter().enumerate() {
        if reg.structured.get(atom[0] as i64).re < target {
            continue;
        }
        dense_seen = true;
        if (atom.len() as u64) < caps.min_length {
            continue;
        }
        let better = match chosen {
            None => true,
            Some(j) => atom.len() > atoms[j].len() || (atom.len() == atoms[j].len() && atom[0] < atoms[j][0]),
        };
        if better {
            chosen = Some(id);
        }
    }
    let diag = |reason, detail| {
        IncrementOutcome::NotFound(IncrementDiagnostic {
            reason,
            detail,
            regularity_stop: Some(reg.stop),
            best_atom_density: Some(best_density),
        })
    };
    let Some(id) = chosen else {
        return Ok(if dense_seen {
            diag(NotFoundReason::AtomTooShort, format!("dense atoms shorter than {}", caps.min_length))
        } else {
            diag(NotFoundReason::NoDenseAtom, format!("best atom density {best_density:.6} below {target:.6}"))
        });
    };
    let atom = &atoms[id];
    let progression = Progression::from_sorted_elements(atom, step)
        .ok_or_else(|| Error::InvalidParameter(format!("atom {id} is not a progression of step {step}")))?;
    let count = progression.count_in(a);
    let new_density = count as f64 / progression.length as f64;
    // Recomputed from A; the structured value only selected the atom.
    if (count as f64) < target * progression.length as f64 * (1.0 - 1e-12) {
        return Ok(diag(NotFoundReason::NoDenseAtom, format!("recomputed density {new_density:.6} below {target:.6}")));
    }
    Ok(IncrementOutcome::Found(IncrementResult {
        progression,
        old_density: delta,
        new_density,
        count,
        c,
        atom_id: id as u32,
        atom_count: factor.atom_count(),
        regularity_stop: reg.stop,
        regularity_steps: reg.steps.len(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IterationCaps {
    pub increment: IncrementCaps,
    pub max_stages: usize,
    /// Largest modulus `Q_i` carried forward.
    pub modulus_cap: u64,
}

impl Default for IterationCaps {
    fn default() -> Self {
        Self { increment: IncrementCaps::default(), max_stages: 64, modulus_cap: 1 << 32 }
    }
}

/// One stage `(A_i, N_i, Q_i)`. Element `x` of `[N_i]` corresponds to
/// `origin_start + origin_step · x` in the original interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub n: usize,
    pub modulus: u64,
    pub cardinality: usize,
    pub density: f64,
    pub origin_start: i64,
    pub origin_step: u64,
    pub members: Vec<usize>,
    /// The progression of the previous stage this one was read from.
    pub from: Option<Progression>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ConfigurationFound,
    SmallN,
    Cap,
    IncrementNotFound,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub c: f64,
    pub stages: Vec<Stage>,
    pub termination: Termination,
    pub detail: String,
    /// `⌈ln(1/δ₀) / ln(1+c)⌉`, asserted on successful stages.
    pub geometric_bound: u64,
    /// `2/c + log₂(1/δ₀)`, recorded only.
    pub doubling_bound: f64,
}

impl IterationTrace {
    /// Number of successful increments.
    pub fn increments(&self) -> usize {
        self.stages.len().saturating_sub(1)
    }
}

fn stage_of(a: &IntegerSet, modulus: u64, origin_start: i64, origin_step: u64, from: Option<Progression>) -> Stage {
    Stage {
        n: a.len(),
        modulus,
        cardinality: a.cardinality(),
        density: a.density(),
        origin_start,
        origin_step,
        members: a.members().collect(),
        from,
    }
}

/// Iterates [`find_density_increment`], rescaling each progression back to
/// an interval: from `A_i ⊆ [N_i]` free of modulus-`Q_i` configurations and a
/// progression `a + s·[L]` with `s = Q_i q'`, the next stage is
/// `A_{i+1} = {x ∈ [L] : a + s x ∈ A_i}` with `Q_{i+1} = Q_i² q'`.
pub fn run_increment_iteration(a: &IntegerSet, c: f64, caps: &IterationCaps) -> Result<IterationTrace> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter("c must be positive".into()));
    }
    let delta0 = a.density();
    let geometric_bound = if delta0 > 0.0 { ((1.0 / delta0).ln() / (1.0 + c).ln()).ceil().max(0.0) as u64 } else { 0 };
    let doubling_bound = if delta0 > 0.0 { 2.0 / c + (1.0 / delta0).log2() } else { 0.0 };
    let mut trace = IterationTrace {
        c,
        stages: vec![stage_of(a, 1, 0, 1, None)],
        termination: Termination::Empty,
        detail: String::new(),
        geometric_bound,
        doubling_bound,
    };
    let mut cur = a.clone();
    let mut modulus = 1u64;
    let (mut origin_start, mut origin_step) = (0i64, 1u64);
    loop {
        let finish = |mut t: IterationTrace, term, detail: String| {
            t.termination = term;
            t.detail = detail;
            Ok(t)
        };
        if cur.is_empty() {
            return finish(trace, Termination::Empty, "empty set".into());
        }
        let report = is_configuration_free(&cur, modulus)?;
        if let Some(w) = report.witness() {
            return finish(trace, Termination::ConfigurationFound, format!("{w} (modulus {modulus})"));
        }
        if trace.stages.len() > caps.max_stages {
            return finish(trace, Termination::Cap, format!("stage cap {}", caps.max_stages));
        }
        let outcome = find_density_increment(&cur, modulus, cur.density(), c, &caps.increment)?;
        let res = match outcome {
            IncrementOutcome::Found(r) => r,
            IncrementOutcome::NotFound(d) if d.reason == NotFoundReason::SmallN => {
                return finish(trace, Termination::SmallN, d.detail);
            }
            IncrementOutcome::NotFound(d) => return finish(trace, Termination::IncrementNotFound, d.detail),
        };
        let p = res.progression;
        if p.step % modulus != 0 {
            return Err(Error::InvalidParameter(format!("step {} not divisible by {modulus}", p.step)));
        }
        let q_prime = p.step / modulus;
        let next_modulus = modulus.checked_mul(modulus).and_then(|v| v.checked_mul(q_prime));
        let next_modulus = match next_modulus {
            Some(m) if m <= caps.modulus_cap => m,
            _ => return finish(trace, Termination::Cap, format!("modulus cap {} exceeded", caps.modulus_cap)),
        };
        let next = cur.pull_back(p.start, p.step, p.length as usize);
        assert!(
            next.cardinality() as f64 * cur.len() as f64
                >= (1.0 + c) * cur.cardinality() as f64 * next.len() as f64 * (1.0 - 1e-12),
            "density ladder violated"
        );
        origin_start += origin_step as i64 * p.start;
        origin_step *= p.step;
        trace.stages.push(stage_of(&next, next_modulus, origin_start, origin_step, Some(p)));
        assert!(trace.increments() as u64 <= geometric_bound, "more increments than (1+c)^n δ₀ <= 1 allows");
        cur = next;
        modulus = next_modulus;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Ascending order.
    Greedy,
    /// Seeded random order.
    RandomGreedy,
    /// Greedy, then remove-one-and-refill moves kept when the set does not shrink.
    LocalSearch,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Strategy::Greedy),
            "random_greedy" | "random-greedy" => Ok(Strategy::RandomGreedy),
            "local_search" | "local-search" => Ok(Strategy::LocalSearch),
            _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
        }
    }
}

fn fill(a: &mut IntegerSet, q: u64, order: &[usize]) {
    for &z in order {
        if !a.contains(z as i64) && !creates_configuration(a, q, z) {
            a.insert(z);
        }
    }
}

/// A maximal configuration-free subset of `[N]` (both signs of `y`).
/// `budget` bounds the local-search moves.
pub fn greedy_extremal_search(n: usize, q: u64, strategy: Strategy, seed: u64, budget: usize) -> Result<IntegerSet> {
    if n == 0 || q == 0 {
        return Err(Error::InvalidParameter("N and q must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (1..=n).collect();
    if strategy == Strategy::RandomGreedy {
        order.shuffle(&mut rng);
    }
    let mut a = IntegerSet::new(n);
    fill(&mut a, q, &order);
    if strategy == Strategy::LocalSearch {
        for _ in 0..budget {
            if a.is_empty() {
                break;
            }
            let members: Vec<usize> = a.members().collect();
            let out = members[rng.random_range(0..members.len())];
            let mut trial = a.clone();
            trial.remove(out);
            order.shuffle(&mut rng);
            let refill: Vec<usize> = order.iter().copied().filter(|&z| z != out).collect();
            fill(&mut trial, q, &refill);
            if trial.cardinality() >= a.cardinality() {
                a = trial;
            }
        }
    }
    let report = is_configuration_free(&a, q)?;
    assert!(report.free, "greedy output contains {:?}", report.witness());
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatingStats {
    pub n: usize,
    pub k: usize,
    /// `Σ_x Σ_{y >= 1} f(x) f(x+y) 1_[N](x+y²)`.
    pub s: i64,
    /// `S / N^{3/2}`.
    pub s_ratio: f64,
    /// Largest `|Σ_{x ∈ P} f(x)|` over progressions in `[N]` with step `<= max_step`.
    pub max_progression_sum: i64,
    pub best_progression: Progression,
    /// `max_progression_sum / N^{1/2}`.
    pub progression_ratio: f64,
    pub max_step: u64,
}

/// `f(x₁ + (x₂ - 1)K) = 1, 0, -1, 0` for `x₂ ≡ 0, 1, 2, 3 mod 4`, `x₁, x₂ ∈ [K]`,
/// `N = K²`, with its correlation sum and progression sums.
pub fn oscillating_example(n: usize, max_step: u64) -> Result<(BoundedFunction, OscillatingStats)> {
    let k = isqrt(n as u64) as usize;
    if n == 0 || k * k != n {
        return Err(Error::InvalidParameter(format!("N = {n} is not a positive perfect square")));
    }
    if max_step == 0 {
        return Err(Error::InvalidParameter("max_step must be positive".into()));
    }
    let vals: Vec<i64> = (0..n)
        .map(|i| match (i / k + 1) % 4 {
            0 => 1,
            2 => -1,
            _ => 0,
        })
        .collect();
    let at = |x: usize| vals[x - 1];
    let mut s = 0i64;
    for x in 1..=n {
        if at(x) == 0 {
            continue;
        }
        let mut y = 1;
        while x + y * y <= n {
            s += at(x) * at(x + y);
            y += 1;
        }
    }
    let mut best = (0i64, Progression::interval(0));
    for step in 1..=max_step.min(n as u64) as usize {
        for r in 1..=step.min(n) {
            // Prefix sums along r, r + step, ..; the best block is max - min.
            let (mut pre, mut lo, mut hi) = (0i64, (0i64, 0usize), (0i64, 0usize));
            let mut idx = 0;
            let mut x = r;
            while x <= n {
                pre += at(x);
                idx += 1;
                if pre < lo.0 {
                    lo = (pre, idx);
                }
                if pre > hi.0 {
                    hi = (pre, idx);
                }
                x += step;
            }
            let (a, b) = if lo.1 < hi.1 { (lo, hi) } else { (hi, lo) };
            let v = (b.0 - a.0).abs();
            if v > best.0 {
                let start = r as i64 + (a.1 as i64 - 1) * step as i64;
                best = (v, Progression { start, step: step as u64, length: (b.1 - a.1) as u64 });
            }
        }
    }
    let f = BoundedFunction::from_real(&vals.iter().map(|&v| v as f64).collect::<Vec<_>>())?;
    let nf = n as f64;
    Ok((
        f,
        OscillatingStats {
            n,
            k,
            s,
            s_ratio: s as f64 / nf.powf(1.5),
            max_progression_sum: best.0,
            best_progression: best.1,
            progression_ratio: best.0 as f64 / nf.sqrt(),
            max_step,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_small_example() {
        let a = greedy_extremal_search(3, 1, Strategy::Greedy, 0, 0).unwrap();
        assert_eq!(a.members().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn greedy_is_maximal_on_small_n() {
        // Compare against the best of all 2^N subsets (both signs of y).
        for n in 1..=12usize {
            let a = greedy_extremal_search(n, 1, Strategy::Greedy, 0, 0).unwrap();
            for z in 1..=n {
                if !a.contains(z as i64) {
                    let mut b = a.clone();
                    b.insert(z);
                    assert!(!is_configuration_free(&b, 1).unwrap().free);
                }
            }
            let best = (0u32..1 << n)
                .filter(|m| {
                    let s = IntegerSet::from_predicate(n, |x| m >> (x - 1) & 1 == 1);
                    is_configuration_free(&s, 1).unwrap().free
                })
                .map(|m| m.count_ones() as usize)
                .max()
                .unwrap();
            assert!(a.cardinality() <= best);
        }
    }

    #[test]
    fn strategies_are_free_and_seeded() {
        for strategy in [Strategy::Greedy, Strategy::RandomGreedy, Strategy::LocalSearch] {
            let a = greedy_extremal_search(500, 2, strategy, 7, 20).unwrap();
            let b = greedy_extremal_search(500, 2, strategy, 7, 20).unwrap();
            assert_eq!(a, b);
            assert!(is_configuration_free(&a, 2).unwrap().free);
        }
        let g = greedy_extremal_search(500, 1, Strategy::Greedy, 0, 0).unwrap();
        let l = greedy_extremal_search(500, 1, Strategy::LocalSearch, 0, 30).unwrap();
        assert!(l.cardinality() >= g.cardinality());
        assert_eq!("random-greedy".parse::<Strategy>().unwrap(), Strategy::RandomGreedy);
        assert!("nope".parse::<Strategy>().is_err());
    }

    #[test]
    fn oscillating_small_case() {
        let (f, stats) = oscillating_example(16, 64).unwrap();
        let expect = [0., 0., 0., 0., -1., -1., -1., -1., 0., 0., 0., 0., 1., 1., 1., 1.];
        assert_eq!(f.real_parts(), expect);
        assert_eq!(f.sum().re, 0.0);
        // Direct double loop.
        let mut s = 0.0;
        for x in 1..=16i64 {
            for y in 1..=4i64 {
                if x + y * y <= 16 {
                    s += f.get(x).re * f.get(x + y).re;
                }
            }
        }
        assert_eq!(stats.s as f64, s);
        assert!(oscillating_example(15, 64).is_err());
    }

    #[test]
    fn oscillating_progression_scan_matches_brute_force() {
        let n = 64;
        let (f, stats) = oscillating_example(n, 8).unwrap();
        let mut best = 0.0f64;
        for step in 1..=8i64 {
            for start in 1..=n as i64 {
                let mut sum = 0.0;
                let mut x = start;
                while x <= n as i64 {
                    sum += f.get(x).re;
                    best = best.max(sum.abs());
                    x += step;
                }
            }
        }
        assert_eq!(stats.max_progression_sum as f64, best);
        let p = stats.best_progression;
        assert!(p.within(n));
        assert_eq!(p.iter().map(|x| f.get(x).re).sum::<f64>().abs(), best);
    }

    #[test]
    fn increment_preconditions() {
        let a = IntegerSet::from_members(20, [1, 2]).unwrap();
        assert_eq!(
            find_density_increment(&a, 1, 0.1, 0.01, &IncrementCaps::default()),
            Err(Error::ContainsConfiguration { x: 1, y: 1 })
        );
        let one = IntegerSet::from_members(20, [1]).unwrap();
        assert!(find_density_increment(&one, 1, 0.5, 0.01, &IncrementCaps::default()).is_err());
        match find_density_increment(&one, 1, 0.05, 0.01, &IncrementCaps::default()).unwrap() {
            IncrementOutcome::NotFound(d) => assert_eq!(d.reason, NotFoundReason::SmallN),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn increment_on_structured_set() {
        // Free set concentrated on the first half: an increment must exist.
        let n = 1024;
        let base = greedy_extremal_search(n / 2, 1, Strategy::Greedy, 0, 0).unwrap();
        let a = IntegerSet::from_members(n, base.members()).unwrap();
        assert!(is_configuration_free(&a, 1).unwrap().free);
        match find_density_increment(&a, 1, a.density(), 0.01, &IncrementCaps::default()).unwrap() {
            IncrementOutcome::Found(r) => {
                assert!(r.new_density >= 1.01 * a.density());
                assert!(r.progression.within(n));
                assert_eq!(r.count, r.progression.count_in(&a));
            }
            IncrementOutcome::NotFound(d) => panic!("{d:?}"),
        }
    }

    #[test]
    fn iteration_on_empty_and_trivial_sets() {
        let t = run_increment_iteration(&IntegerSet::new(50), 0.1, &IterationCaps::default()).unwrap();
        assert_eq!(t.termination, Termination::Empty);
        assert_eq!(t.increments(), 0);
        let bad = IntegerSet::from_members(50, [1, 2]).unwrap();
        let t = run_increment_iteration(&bad, 0.1, &IterationCaps::default()).unwrap();
        assert_eq!(t.termination, Termination::ConfigurationFound);
    }

    #[test]
    fn iteration_bounds_arithmetic() {
        let a = IntegerSet::from_members(100, [1]).unwrap();
        let t = run_increment_iteration(&a, 0.1, &IterationCaps::default()).unwrap();
        assert_eq!(t.geometric_bound, 49);
        assert!((t.doubling_bound - (20.0 + 100f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn iteration_stages_stay_free() {
        let n = 2048;
        let base = greedy_extremal_search(n / 2, 1, Strategy::Greedy, 0, 0).unwrap();
        let a = IntegerSet::from_members(n, base.members()).unwrap();
        let t = run_increment_iteration(&a, 0.01, &IterationCaps::default()).unwrap();
        assert!(t.increments() >= 1);
        for (prev, next) in t.stages.iter().zip(&t.stages[1..]) {
            assert!(next.density >= 1.01 * prev.density * (1.0 - 1e-12));
            let set = IntegerSet::from_members(next.n, next.members.iter().copied()).unwrap();
            assert!(is_configuration_free(&set, next.modulus).unwrap().free);
            for &x in &next.members {
                assert!(a.contains(next.origin_start + next.origin_step as i64 * x as i64));
            }
        }
    }
}
