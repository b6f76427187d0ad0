//! Complex-valued functions supported on `[N] = {1, .., N}`.
//!
//! Points are addressed with 1-based integers as in `[N]`; storage is a
//! 0-based `Vec` so `x` lives at index `x - 1`. Evaluation outside `[N]`
//! returns zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::IntegerSet;

/// Slack allowed when checking `|f(x)| <= bound`.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedFunction {
    values: Vec<Complex64>,
    bound: f64,
}

impl BoundedFunction {
    /// A 1-bounded function. Fails if any value has modulus above 1.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        Self::with_bound(values, 1.0)
    }

    pub fn with_bound(values: Vec<Complex64>, bound: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("function length must be positive".into()));
        }
        if !(bound >= 0.0) || !bound.is_finite() {
            return Err(Error::InvalidParameter(format!("bound {bound} must be finite and nonnegative")));
        }
        for (i, v) in values.iter().enumerate() {
            let m = v.norm();
            if !m.is_finite() || m > bound + BOUND_SLACK {
                return Err(Error::BoundViolation { x: i + 1, modulus: m, bound });
            }
        }
        Ok(Self { values, bound })
    }

    /// Builds a function whose bound is the smallest of `1` and its sup norm
    /// that still covers every value. Used for derived functions (residuals,
    /// linear combinations) whose modulus is not known in advance.
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Self::with_bound(values, sup.max(1.0))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, Complex64::new(0.0, 0.0))
    }

    /// The indicator of `[N]`.
    pub fn ones(n: usize) -> Self {
        Self::constant(n, Complex64::new(1.0, 0.0))
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        assert!(n > 0, "function length must be positive");
        Self { values: vec![c; n], bound: c.norm().max(1.0) }
    }

    /// Point mass at `x0 ∈ [N]`.
    pub fn point_mass(n: usize, x0: usize) -> Result<Self> {
        if x0 == 0 || x0 > n {
            return Err(Error::OutOfRange { value: x0 as i64, n });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[x0 - 1] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `f(x)`, zero outside `[N]`.
    #[inline]
    pub fn get(&self, x: i64) -> Complex64 {
        if x >= 1 && (x as u64) <= self.values.len() as u64 {
            self.values[(x - 1) as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Real parts, for functions known to be real-valued.
    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Values as integers in `{-1, 0, 1}` when every value is exactly one of them.
    pub fn as_ternary(&self) -> Option<Vec<i8>> {
        self.values
            .iter()
            .map(|v| {
                if v.im != 0.0 {
                    None
                } else if v.re == 0.0 {
                    Some(0)
                } else if v.re == 1.0 {
                    Some(1)
                } else if v.re == -1.0 {
                    Some(-1)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> Complex64 {
        self.sum() / self.values.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            bound: self.bound * c.norm(),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect(),
            bound: alpha.norm() * self.bound + beta.norm() * other.bound,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
            bound: self.bound * other.bound,
        })
    }

    pub fn conj(&self) -> Self {
        Self { values: self.values.iter().map(|v| v.conj()).collect(), bound: self.bound }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::LengthMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// `1_A` as a function on `[N]`.
pub fn indicator(a: &IntegerSet) -> BoundedFunction {
    let mut v = vec![Complex64::new(0.0, 0.0); a.len()];
    for x in a.members() {
        v[x - 1] = Complex64::new(1.0, 0.0);
    }
    BoundedFunction { values: v, bound: 1.0 }
}

/// The mean-zero part `1_A - (|A|/N) 1_[N]`.
pub fn balanced_part(a: &IntegerSet) -> BoundedFunction {
    let delta = a.density();
    let mut v = vec![Complex64::new(-delta, 0.0); a.len()];
    for x in a.members() {
        v[x - 1] = Complex64::new(1.0 - delta, 0.0);
    }
    BoundedFunction { values: v, bound: 1.0 }
}

/// `<f, g> = Σ f(x) conj(g(x))`, summed in index order.
pub fn inner_product(f: &BoundedFunction, g: &BoundedFunction) -> Result<Complex64> {
    check_len(f.len(), g.len())?;
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

pub fn lp_norm(f: &BoundedFunction, p: Exponent) -> Result<f64> {
    match p {
        Exponent::Infinity => Ok(f.sup_norm()),
        Exponent::Finite(p) if !(p >= 1.0) || !p.is_finite() => {
            Err(Error::InvalidParameter(format!("l^p norm needs p >= 1, got {p}")))
        }
        Exponent::Finite(p) if p == 1.0 => Ok(f.values.iter().map(|v| v.norm()).sum()),
        Exponent::Finite(p) if p == 2.0 => Ok(f.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()),
        Exponent::Finite(p) => Ok(f.values.iter().map(|v| v.norm().powf(p)).sum::<f64>().powf(1.0 / p)),
    }
}

pub fn l1_norm(f: &BoundedFunction) -> f64 {
    f.values.iter().map(|v| v.norm()).sum()
}

pub fn l2_norm_sqr(f: &BoundedFunction) -> f64 {
    f.values.iter().map(|v| v.norm_sqr()).sum()
}
