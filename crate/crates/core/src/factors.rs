//! Partitions of `[N]` ("factors"), local functions and the projection
//! `Π_𝓑 f(x) = E_{y ∈ B_x} f(y)` onto atom averages.
//!
//! A simple real factor of resolution `M` and phase `p` puts `x` in interval
//! `⌊(x - 1 + p) / M⌋`; a simple congruence factor of modulus `q` puts `x` in
//! class `x mod q`. A simple local factor is the join of one of each, and a
//! local factor of dimension `d` joins `d` simple local factors.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{check_len, BoundedFunction};
use crate::progression::Progression;

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> Result<u64> {
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::ModulusOverflow)
}

/// Dimension, nominal resolution, modulus and interval phases of a local factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorMeta {
    pub d: u32,
    #[serde(rename = "M")]
    pub m: u64,
    pub q: u64,
    pub phases: Vec<u64>,
}

/// `(M, q, phase)` of a simple local factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocalSignature {
    pub resolution: u64,
    pub modulus: u64,
    pub phase: u64,
}

impl LocalSignature {
    pub fn new(resolution: u64, modulus: u64, phase: u64) -> Result<Self> {
        if resolution == 0 || modulus == 0 {
            return Err(Error::InvalidParameter("resolution and modulus must be positive".into()));
        }
        if phase >= resolution {
            return Err(Error::InvalidParameter(format!("phase {phase} not below resolution {resolution}")));
        }
        Ok(Self { resolution, modulus, phase })
    }

    #[inline]
    pub fn interval(&self, x: i64) -> i64 {
        (x - 1 + self.phase as i64).div_euclid(self.resolution as i64)
    }

    #[inline]
    pub fn residue(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }
}

/// A partition of `[N]` given by atom ids. Ids are numbered `0, 1, ..` in
/// order of first appearance, so equal partitions have equal id arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    n: usize,
    atom_id: Vec<u32>,
    atoms: usize,
    meta: Option<FactorMeta>,
}

impl Factor {
    /// Builds a factor from arbitrary labels, renumbering them canonically.
    pub fn from_labels<T: std::hash::Hash + Eq>(labels: &[T], meta: Option<FactorMeta>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        let mut map: HashMap<&T, u32> = HashMap::new();
        let atom_id = labels
            .iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(l).or_insert(next)
            })
            .collect();
        Ok(Self { n: labels.len(), atom_id, atoms: map.len(), meta })
    }

    /// The factor `{[N]}`: a local factor with `d = 0`, `M = N`, `q = 1`.
    pub fn trivial(n: usize) -> Self {
        assert!(n > 0, "N must be positive");
        Self {
            n,
            atom_id: vec![0; n],
            atoms: 1,
            meta: Some(FactorMeta { d: 0, m: n as u64, q: 1, phases: vec![] }),
        }
    }

    /// Every point its own atom.
    pub fn singletons(n: usize) -> Self {
        assert!(n > 0, "N must be positive");
        Self { n, atom_id: (0..n as u32).collect(), atoms: n, meta: None }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atom_ids(&self) -> &[u32] {
        &self.atom_id
    }

    pub fn atom_count(&self) -> usize {
        self.atoms
    }

    pub fn meta(&self) -> Option<&FactorMeta> {
        self.meta.as_ref()
    }

    /// Atom id of `x ∈ [N]`.
    pub fn atom_of(&self, x: usize) -> u32 {
        self.atom_id[x - 1]
    }

    /// Members of each atom, ascending.
    pub fn atoms(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.atoms];
        for (i, &a) in self.atom_id.iter().enumerate() {
            out[a as usize].push(i + 1);
        }
        out
    }

    pub fn atom_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.atoms];
        for &a in &self.atom_id {
            out[a as usize] += 1;
        }
        out
    }

    /// Whether every atom of `self` lies inside an atom of `coarser`.
    pub fn refines(&self, coarser: &Factor) -> bool {
        if self.n != coarser.n {
            return false;
        }
        let mut image = vec![u32::MAX; self.atoms];
        for (&a, &b) in self.atom_id.iter().zip(&coarser.atom_id) {
            let slot = &mut image[a as usize];
            if *slot == u32::MAX {
                *slot = b;
            } else if *slot != b {
                return false;
            }
        }
        true
    }

    /// Whether `f` is constant on every atom (within `tol`).
    pub fn is_measurable(&self, f: &BoundedFunction, tol: f64) -> bool {
        if f.len() != self.n {
            return false;
        }
        let mut first: Vec<Option<Complex64>> = vec![None; self.atoms];
        for (&a, v) in self.atom_id.iter().zip(f.values()) {
            match first[a as usize] {
                None => first[a as usize] = Some(*v),
                Some(w) if (w - v).norm() > tol => return false,
                _ => {}
            }
        }
        true
    }

    /// Each atom as a progression of the given step, or `None` if some atom
    /// is not one.
    pub fn atoms_as_progressions(&self, step: u64) -> Option<Vec<Progression>> {
        self.atoms().iter().map(|a| Progression::from_sorted_elements(a, step)).collect()
    }
}

/// `⌊(x - 1 + phase) / M⌋`-intervals intersected with `[N]`.
pub fn simple_real_factor(n: usize, m: u64, phase: u64) -> Result<Factor> {
    let sig = LocalSignature::new(m, 1, phase)?;
    let labels: Vec<i64> = (1..=n as i64).map(|x| sig.interval(x)).collect();
    Factor::from_labels(&labels, Some(FactorMeta { d: 1, m, q: 1, phases: vec![phase] }))
}

/// Residue classes mod `q` intersected with `[N]`.
pub fn simple_congruence_factor(n: usize, q: u64) -> Result<Factor> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    let labels: Vec<u64> = (1..=n as u64).map(|x| x % q).collect();
    Factor::from_labels(&labels, Some(FactorMeta { d: 1, m: n as u64, q, phases: vec![0] }))
}

/// The join of the simple real factor `(M, phase)` and the congruence factor `q`.
pub fn simple_local_factor(n: usize, sig: LocalSignature) -> Result<Factor> {
    let sig = LocalSignature::new(sig.resolution, sig.modulus, sig.phase)?;
    let labels: Vec<(i64, u64)> = (1..=n as i64).map(|x| (sig.interval(x), sig.residue(x))).collect();
    Factor::from_labels(
        &labels,
        Some(FactorMeta { d: 1, m: sig.resolution, q: sig.modulus, phases: vec![sig.phase] }),
    )
}

/// Common refinement. For local factors the metadata adds dimensions, takes
/// the least resolution and the lcm of the moduli.
pub fn join_factors(factors: &[&Factor]) -> Result<Factor> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("join of no factors".into()))?;
    let mut acc = (*first).clone();
    for f in rest {
        if f.n != acc.n {
            return Err(Error::LengthMismatch { expected: acc.n, found: f.n });
        }
        let meta = match (&acc.meta, &f.meta) {
            (Some(a), Some(b)) => {
                let mut phases = a.phases.clone();
                phases.extend(&b.phases);
                Some(FactorMeta { d: a.d + b.d, m: a.m.min(b.m), q: lcm(a.q, b.q)?, phases })
            }
            _ => None,
        };
        let width = f.atoms as u64;
        let labels: Vec<u64> = acc
            .atom_id
            .iter()
            .zip(&f.atom_id)
            .map(|(&a, &b)| a as u64 * width + b as u64)
            .collect();
        acc = Factor::from_labels(&labels, meta)?;
    }
    Ok(acc)
}

/// Atom sums and sizes of `f`.
fn atom_sums(f: &BoundedFunction, b: &Factor) -> (Vec<Complex64>, Vec<usize>) {
    let mut sums = vec![Complex64::new(0.0, 0.0); b.atoms];
    let mut sizes = vec![0usize; b.atoms];
    for (&a, v) in b.atom_id.iter().zip(f.values()) {
        sums[a as usize] += v;
        sizes[a as usize] += 1;
    }
    (sums, sizes)
}

/// `Π_𝓑 f`.
pub fn project(f: &BoundedFunction, b: &Factor) -> Result<BoundedFunction> {
    check_len(b.n, f.len())?;
    let (sums, sizes) = atom_sums(f, b);
    let means: Vec<Complex64> = sums.iter().zip(&sizes).map(|(s, &c)| s / c as f64).collect();
    let values = b.atom_id.iter().map(|&a| means[a as usize]).collect();
    BoundedFunction::with_bound(values, f.bound())
}

/// `‖Π_𝓑 f‖₁ = Σ_atoms |Σ_{x ∈ B} f(x)|`.
pub fn projected_l1(f: &BoundedFunction, b: &Factor) -> Result<f64> {
    check_len(b.n, f.len())?;
    Ok(atom_sums(f, b).0.iter().map(|s| s.norm()).sum())
}

/// `⌈q d (N/M + 2)⌉`, the atom bound for a local factor.
pub fn factor_size_bound(d: u64, m: u64, q: u64, n: u64) -> Result<u64> {
    if d == 0 || m == 0 || q == 0 || n == 0 {
        return Err(Error::InvalidParameter("d, M, q, N must be positive".into()));
    }
    let num = q as u128 * d as u128 * (n as u128 + 2 * m as u128);
    u64::try_from(num.div_ceil(m as u128)).map_err(|_| Error::ModulusOverflow)
}

/// A value on one `(interval, residue)` piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub interval: i64,
    pub residue: u64,
    pub value: Complex64,
}

/// A function constant on each (length-`M` interval) ∩ (class mod `q`),
/// zero on pieces without an entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFunction {
    signature: LocalSignature,
    pieces: Vec<Piece>,
    bound: f64,
}

impl LocalFunction {
    pub fn new(signature: LocalSignature, bound: f64) -> Self {
        Self { signature, pieces: Vec::new(), bound }
    }

    /// Tabulates `value(interval, residue)` over every piece meeting `[N]`.
    pub fn from_fn(
        signature: LocalSignature,
        n: usize,
        bound: f64,
        mut value: impl FnMut(i64, u64) -> Complex64,
    ) -> Result<Self> {
        let mut phi = Self::new(signature, bound);
        let (k_lo, k_hi) = (signature.interval(1), signature.interval(n as i64));
        for k in k_lo..=k_hi {
            for r in 0..signature.modulus.min(n as u64) {
                phi.set(k, r, value(k, r))?;
            }
        }
        Ok(phi)
    }

    pub fn signature(&self) -> LocalSignature {
        self.signature
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn set(&mut self, interval: i64, residue: u64, value: Complex64) -> Result<()> {
        if residue >= self.signature.modulus {
            return Err(Error::InvalidParameter(format!("residue {residue} not below {}", self.signature.modulus)));
        }
        if value.norm() > self.bound + 1e-12 {
            return Err(Error::BoundViolation { x: 0, modulus: value.norm(), bound: self.bound });
        }
        let piece = Piece { interval, residue, value };
        match self.pieces.binary_search_by_key(&(interval, residue), |p| (p.interval, p.residue)) {
            Ok(i) => self.pieces[i] = piece,
            Err(i) => self.pieces.insert(i, piece),
        }
        Ok(())
    }

    pub fn eval(&self, x: i64) -> Complex64 {
        let key = (self.signature.interval(x), self.signature.residue(x));
        self.pieces
            .binary_search_by_key(&key, |p| (p.interval, p.residue))
            .map(|i| self.pieces[i].value)
            .unwrap_or_default()
    }

    /// Restriction to `[N]`.
    pub fn to_function(&self, n: usize) -> Result<BoundedFunction> {
        BoundedFunction::with_bound((1..=n as i64).map(|x| self.eval(x)).collect(), self.bound)
    }
}

/// The simple local factor of `φ`'s grid, on whose atoms `φ` is constant.
pub fn local_function_levels(phi: &LocalFunction, n: usize) -> Result<Factor> {
    simple_local_factor(n, phi.signature)
}

/// A function measurable with respect to the join of several simple local
/// factors: constant on each (interval tuple, class mod lcm) piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinFunction {
    signatures: Vec<LocalSignature>,
    modulus: u64,
    pieces: Vec<(Vec<i64>, u64, Complex64)>,
}

impl JoinFunction {
    /// Tabulates `value(x)` on `[N]`, which must be constant on each piece;
    /// the first value seen on a piece is kept.
    pub fn from_fn(
        signatures: Vec<LocalSignature>,
        n: usize,
        mut value: impl FnMut(i64) -> Complex64,
    ) -> Result<Self> {
        let mut modulus = 1;
        for s in &signatures {
            modulus = lcm(modulus, s.modulus)?;
        }
        let mut map: HashMap<(Vec<i64>, u64), Complex64> = HashMap::new();
        for x in 1..=n as i64 {
            let key = (signatures.iter().map(|s| s.interval(x)).collect::<Vec<_>>(), x.rem_euclid(modulus as i64) as u64);
            map.entry(key).or_insert_with(|| value(x));
        }
        let mut pieces: Vec<_> = map.into_iter().map(|((k, r), v)| (k, r, v)).collect();
        pieces.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
        Ok(Self { signatures, modulus, pieces })
    }

    pub fn signatures(&self) -> &[LocalSignature] {
        &self.signatures
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn eval(&self, x: i64) -> Complex64 {
        let key: Vec<i64> = self.signatures.iter().map(|s| s.interval(x)).collect();
        let r = x.rem_euclid(self.modulus as i64) as u64;
        self.pieces
            .binary_search_by(|p| (&p.0, p.1).cmp(&(&key, r)))
            .map(|i| self.pieces[i].2)
            .unwrap_or_default()
    }

    pub fn to_function(&self, n: usize) -> Result<BoundedFunction> {
        BoundedFunction::new((1..=n as i64).map(|x| self.eval(x)).collect())
    }

    /// The factor whose atoms are this function's pieces.
    pub fn factor(&self, n: usize) -> Result<Factor> {
        let parts: Vec<Factor> = self
            .signatures
            .iter()
            .map(|s| simple_local_factor(n, *s))
            .collect::<Result<_>>()?;
        join_factors(&parts.iter().collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::inner_product;
    use proptest::prelude::*;

    fn f_real(v: &[f64]) -> BoundedFunction {
        BoundedFunction::from_values(v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn real_factor_examples() {
        let f = simple_real_factor(10, 3, 0).unwrap();
        assert_eq!(f.atoms(), vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9], vec![10]]);
        let g = simple_real_factor(10, 3, 1).unwrap();
        assert_eq!(g.atoms()[0], vec![1, 2]);
        assert_eq!(simple_real_factor(10, 10, 0).unwrap().atom_count(), 1);
        assert_eq!(simple_real_factor(10, 50, 0).unwrap().atom_count(), 1);
        assert!(simple_real_factor(10, 3, 3).is_err());
        assert!(simple_real_factor(10, 0, 0).is_err());
    }

    #[test]
    fn congruence_factor_examples() {
        assert_eq!(simple_congruence_factor(10, 1).unwrap().atom_count(), 1);
        assert_eq!(simple_congruence_factor(10, 2).unwrap().atom_sizes(), vec![5, 5]);
        assert_eq!(simple_congruence_factor(10, 3).unwrap().atom_sizes(), vec![4, 3, 3]);
        assert_eq!(simple_congruence_factor(4, 9).unwrap().atom_count(), 4);
    }

    #[test]
    fn join_examples() {
        let r = simple_real_factor(10, 3, 0).unwrap();
        let t = Factor::trivial(10);
        let j = join_factors(&[&r, &t]).unwrap();
        assert_eq!(j.atom_ids(), r.atom_ids());
        let c = simple_congruence_factor(10, 2).unwrap();
        let rc = join_factors(&[&r, &c]).unwrap();
        assert!(rc.atoms_as_progressions(2).is_some());
        assert_eq!(rc.atom_count(), 7);
        let m = rc.meta().unwrap();
        assert_eq!((m.d, m.m, m.q), (2, 3, 2));
        let idem = join_factors(&[&rc, &rc]).unwrap();
        assert_eq!(idem.atom_ids(), rc.atom_ids());
        let big = Factor::from_labels(&[0u8; 10], Some(FactorMeta { d: 1, m: 1, q: u64::MAX - 1, phases: vec![] })).unwrap();
        let other = Factor::from_labels(&[0u8; 10], Some(FactorMeta { d: 1, m: 1, q: u64::MAX - 2, phases: vec![] })).unwrap();
        assert_eq!(join_factors(&[&big, &other]), Err(Error::ModulusOverflow));
    }

    #[test]
    fn projection_examples() {
        let f = f_real(&[1.0, 2.0, 3.0, 4.0]);
        let b = Factor::from_labels(&[0, 0, 1, 1], None).unwrap();
        let p = project(&f, &b).unwrap();
        assert_eq!(p.real_parts(), vec![1.5, 1.5, 3.5, 3.5]);
        assert_eq!(project(&f, &Factor::trivial(4)).unwrap().real_parts(), vec![2.5; 4]);
        assert_eq!(project(&f, &Factor::singletons(4)).unwrap(), f);
        assert_eq!(projected_l1(&f, &b).unwrap(), 10.0);
    }

    #[test]
    fn atom_bound_examples() {
        assert_eq!(factor_size_bound(1, 10, 1, 10).unwrap(), 3);
        assert!(simple_real_factor(10, 10, 0).unwrap().atom_count() <= 2);
        assert_eq!(factor_size_bound(2, 10, 6, 100).unwrap(), 144);
        let a = simple_local_factor(100, LocalSignature::new(10, 2, 0).unwrap()).unwrap();
        let b = simple_local_factor(100, LocalSignature::new(12, 3, 5).unwrap()).unwrap();
        assert!(join_factors(&[&a, &b]).unwrap().atom_count() <= 144);
        assert!(factor_size_bound(0, 1, 1, 1).is_err());
    }

    #[test]
    fn local_function_levels_make_it_measurable() {
        let sig = LocalSignature::new(4, 3, 0).unwrap();
        let mut seed = 7u64;
        let phi = LocalFunction::from_fn(sig, 24, 1.0, |_, _| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            Complex64::new(((seed >> 33) as f64 / (1u64 << 31) as f64) - 1.0, 0.0)
        })
        .unwrap();
        let f = phi.to_function(24).unwrap();
        let levels = local_function_levels(&phi, 24).unwrap();
        assert_eq!(project(&f, &levels).unwrap(), f);
        let constant = LocalFunction::from_fn(sig, 24, 1.0, |_, _| Complex64::new(0.5, 0.0)).unwrap();
        let cf = constant.to_function(24).unwrap();
        assert!(local_function_levels(&constant, 24).unwrap().is_measurable(&cf, 0.0));
        let parity = LocalFunction::from_fn(LocalSignature::new(30, 2, 0).unwrap(), 24, 1.0, |_, r| {
            Complex64::new(r as f64, 0.0)
        })
        .unwrap();
        assert_eq!(
            local_function_levels(&parity, 24).unwrap().atom_ids(),
            simple_congruence_factor(24, 2).unwrap().atom_ids()
        );
    }

    #[test]
    fn local_function_rejects_large_values() {
        let mut phi = LocalFunction::new(LocalSignature::new(3, 2, 0).unwrap(), 1.0);
        assert!(phi.set(0, 0, Complex64::new(2.0, 0.0)).is_err());
        assert!(phi.set(0, 2, Complex64::new(0.5, 0.0)).is_err());
        phi.set(0, 1, Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(phi.eval(1), Complex64::new(0.5, 0.0));
        assert_eq!(phi.eval(2), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn join_function_round_trip() {
        let sigs = vec![LocalSignature::new(5, 2, 0).unwrap(), LocalSignature::new(7, 3, 3).unwrap()];
        let fac = JoinFunction::from_fn(sigs.clone(), 40, |_| Complex64::new(0.0, 0.0)).unwrap().factor(40).unwrap();
        let ids = fac.atom_ids().to_vec();
        let jf = JoinFunction::from_fn(sigs, 40, |x| Complex64::new(ids[x as usize - 1] as f64 / 100.0, 0.0)).unwrap();
        let g = jf.to_function(40).unwrap();
        for x in 1..=40 {
            assert_eq!(g.get(x).re, ids[x as usize - 1] as f64 / 100.0);
        }
        assert!(fac.is_measurable(&g, 0.0));
        assert_eq!(jf.modulus(), 6);
    }

    fn arb_function(n: usize) -> impl Strategy<Value = BoundedFunction> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|v| {
            BoundedFunction::from_values(v.into_iter().map(|(a, b)| Complex64::new(a, b) * 0.7).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn projection_is_self_adjoint_and_idempotent(
            (f, g) in (1usize..200).prop_flat_map(|n| (arb_function(n), arb_function(n))),
            m in 1u64..40, q in 1u64..6,
        ) {
            let n = f.len();
            let b = simple_local_factor(n, LocalSignature::new(m, q, m / 2).unwrap()).unwrap();
            let pf = project(&f, &b).unwrap();
            let pg = project(&g, &b).unwrap();
            let lhs = inner_product(&f, &pg).unwrap();
            let rhs = inner_product(&pf, &g).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-9 * n as f64);
            let ppf = project(&pf, &b).unwrap();
            for (a, c) in ppf.values().iter().zip(pf.values()) {
                prop_assert!((a - c).norm() <= 1e-12);
            }
            prop_assert!(b.atoms_as_progressions(q).is_some());
            prop_assert!(b.atom_count() as u64 <= factor_size_bound(1, m, q, n as u64).unwrap());
        }
    }
}
