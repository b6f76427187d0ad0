//! Subsets of `[N]` stored as a word bitset.
//!
//! Element `x` is bit `x - 1`. Bits past `N` in the last word are always
//! clear, which lets shifted reads run off the end without masking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerSet {
    n: usize,
    words: Vec<u64>,
    cardinality: usize,
}

impl IntegerSet {
    /// The empty subset of `[n]`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "N must be positive");
        Self { n, words: vec![0; n.div_ceil(WORD)], cardinality: 0 }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::new(n);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        if n % WORD != 0 {
            let last = s.words.len() - 1;
            s.words[last] = (1u64 << (n % WORD)) - 1;
        }
        s.cardinality = n;
        s
    }

    pub fn from_members<I>(n: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        let mut s = Self::new(n);
        for x in members {
            if x == 0 || x > n {
                return Err(Error::OutOfRange { value: x as i64, n });
            }
            s.insert(x);
        }
        Ok(s)
    }

    /// Members `x ∈ [n]` with `pred(x)`.
    pub fn from_predicate(n: usize, pred: impl Fn(usize) -> bool) -> Self {
        let mut s = Self::new(n);
        for x in 1..=n {
            if pred(x) {
                s.insert(x);
            }
        }
        s
    }

    /// `N`, the size of the ambient interval.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality == 0
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn density(&self) -> f64 {
        self.cardinality as f64 / self.n as f64
    }

    #[inline]
    pub fn contains(&self, x: i64) -> bool {
        if x < 1 || x as u64 > self.n as u64 {
            return false;
        }
        let i = (x - 1) as usize;
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    /// Inserts `x ∈ [N]`; returns whether it was newly added.
    pub fn insert(&mut self, x: usize) -> bool {
        assert!(x >= 1 && x <= self.n, "{x} outside [1, {}]", self.n);
        let i = x - 1;
        let mask = 1u64 << (i % WORD);
        let w = &mut self.words[i / WORD];
        if *w & mask == 0 {
            *w |= mask;
            self.cardinality += 1;
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, x: usize) -> bool {
        if x == 0 || x > self.n {
            return false;
        }
        let i = x - 1;
        let mask = 1u64 << (i % WORD);
        let w = &mut self.words[i / WORD];
        if *w & mask != 0 {
            *w &= !mask;
            self.cardinality -= 1;
            true
        } else {
            false
        }
    }

    /// Members in ascending order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * WORD + b + 1)
                }
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bits `start .. start + 64` as one word (bit `i` of the result is
    /// element `start + i + 1`). Reads past the end are zero.
    #[inline]
    pub fn window(&self, start: usize) -> u64 {
        let w = start / WORD;
        let b = start % WORD;
        let lo = self.words.get(w).copied().unwrap_or(0);
        if b == 0 {
            lo
        } else {
            let hi = self.words.get(w + 1).copied().unwrap_or(0);
            (lo >> b) | (hi << (WORD - b))
        }
    }

    /// Number of members in `[lo, hi]` (inclusive, clipped to `[N]`).
    pub fn count_in_range(&self, lo: i64, hi: i64) -> usize {
        let lo = lo.max(1);
        let hi = hi.min(self.n as i64);
        if lo > hi {
            return 0;
        }
        (lo..=hi).filter(|&x| self.contains(x)).count()
    }

    /// `{x ∈ [len] : start + step * x ∈ self}`: the set read along a progression.
    pub fn pull_back(&self, start: i64, step: u64, len: usize) -> Self {
        Self::from_predicate(len, |x| self.contains(start + step as i64 * x as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_and_empty() {
        let f = IntegerSet::full(70);
        assert_eq!(f.cardinality(), 70);
        assert_eq!(f.members().count(), 70);
        assert!(f.contains(70));
        assert!(!f.contains(71));
        assert!(!f.contains(0));
        assert_eq!(f.words()[1], (1 << 6) - 1);
        assert!(IntegerSet::new(3).is_empty());
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(IntegerSet::from_members(5, [6]), Err(Error::OutOfRange { value: 6, n: 5 })));
        assert!(IntegerSet::from_members(5, [0]).is_err());
    }

    #[test]
    fn window_reads_across_words() {
        let s = IntegerSet::from_members(200, [1, 64, 65, 130, 200]).unwrap();
        assert_eq!(s.window(0) & 1, 1);
        assert_eq!(s.window(63) & 0b11, 0b11);
        assert_eq!(s.window(129) & 1, 1);
        assert_eq!(s.window(199), 1);
        assert_eq!(s.window(200), 0);
        assert_eq!(s.window(10_000), 0);
    }

    #[test]
    fn pull_back_reads_progression() {
        let s = IntegerSet::from_members(20, [3, 7, 11, 19]).unwrap();
        let t = s.pull_back(-1, 4, 5);
        assert_eq!(t.members().collect::<Vec<_>>(), vec![1, 2, 3, 5]);
    }

    proptest! {
        #[test]
        fn cardinality_matches_popcount(n in 1usize..300, xs in proptest::collection::vec(1usize..300, 0..80)) {
            let mut s = IntegerSet::new(n);
            for x in xs.iter().filter(|&&x| x <= n) {
                s.insert(*x);
            }
            let pop: usize = s.words().iter().map(|w| w.count_ones() as usize).sum();
            prop_assert_eq!(s.cardinality(), pop);
            prop_assert!(s.members().all(|x| x >= 1 && x <= n));
            for x in xs.iter().filter(|&&x| x <= n) {
                s.remove(*x);
            }
            prop_assert_eq!(s.cardinality(), 0);
        }

        #[test]
        fn window_matches_contains(n in 1usize..400, seed in any::<u64>(), start in 0usize..450) {
            let s = IntegerSet::from_predicate(n, |x| (x as u64).wrapping_mul(seed | 1).rotate_left(17) % 3 == 0);
            let w = s.window(start);
            for i in 0..64 {
                prop_assert_eq!(w >> i & 1 == 1, s.contains((start + i + 1) as i64));
            }
        }
    }
}
