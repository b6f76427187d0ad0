use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::IntegerSet;

/// The arithmetic progression `{a + Q k : k = 1, .., L}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Progression {
    pub start: i64,
    pub step: u64,
    pub length: u64,
}

impl Progression {
    pub fn new(start: i64, step: u64, length: u64) -> Result<Self> {
        if step == 0 {
            return Err(Error::InvalidParameter("progression step must be positive".into()));
        }
        Ok(Self { start, step, length })
    }

    /// `[L] = {1, .., L}` as the progression `0 + 1·[L]`.
    pub fn interval(length: u64) -> Self {
        Self { start: 0, step: 1, length }
    }

    #[inline]
    pub fn element(&self, k: u64) -> i64 {
        self.start + (self.step * k) as i64
    }

    pub fn first(&self) -> Option<i64> {
        (self.length > 0).then(|| self.element(1))
    }

    pub fn last(&self) -> Option<i64> {
        (self.length > 0).then(|| self.element(self.length))
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        (1..=self.length).map(move |k| self.element(k))
    }

    pub fn contains(&self, x: i64) -> bool {
        let d = x - self.start;
        d > 0 && d as u64 % self.step == 0 && d as u64 / self.step <= self.length
    }

    /// True when every element lies in `[1, n]`.
    pub fn within(&self, n: usize) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => a >= 1 && b <= n as i64,
            _ => true,
        }
    }

    /// `|A ∩ P|`.
    pub fn count_in(&self, a: &IntegerSet) -> usize {
        self.iter().filter(|&x| a.contains(x)).count()
    }

    /// Rebuilds a progression from the sorted elements of an atom, checking
    /// that consecutive gaps equal `step`. A singleton is accepted for any step.
    pub fn from_sorted_elements(elements: &[usize], step: u64) -> Option<Self> {
        let (&first, rest) = elements.split_first()?;
        let mut prev = first;
        for &x in rest {
            if (x - prev) as u64 != step {
                return None;
            }
            prev = x;
        }
        Some(Self { start: first as i64 - step as i64, step, length: elements.len() as u64 })
    }
}
