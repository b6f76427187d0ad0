//! Weak regularity by energy increment.
//!
//! Starting from the trivial factor, the residual `f - Π_𝓑 f` is tested with
//! the cut-norm estimator. While it exceeds `δ`, the inverse search finds two
//! simple local factors whose join correlates with the residual, and both are
//! joined into `𝓑`. If the witness `ψ` has correlation `c` with the residual,
//! Cauchy–Schwarz gives an energy gain `‖Π_𝓑' f‖² - ‖Π_𝓑 f‖² >= c² / N`.

use serde::{Deserialize, Serialize};

use crate::counting::CountingParams;
use crate::cutnorm::{
    cut_norm_lower, inverse_correlation_search, CutNormConfig, CutNormEstimate, CutNormKind, SearchGrid,
};
use crate::error::{Error, Result};
use crate::factors::{join_factors, project, simple_local_factor, Factor, LocalSignature};
use crate::function::{check_len, l2_norm_sqr, BoundedFunction};

/// `‖Π_𝓑 f‖₂²`.
pub fn energy(f: &BoundedFunction, b: &Factor) -> Result<f64> {
    Ok(l2_norm_sqr(&project(f, b)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegularityCaps {
    /// Largest factor dimension; each step adds two.
    pub max_dimension: u32,
    pub grid: SearchGrid,
    pub cut: CutNormConfig,
    /// Steps need correlation at least `c2 δ³ N`.
    pub c2: f64,
    /// Accept 1-bounded signed inputs instead of `[0, 1]`-valued ones.
    pub relaxed: bool,
}

impl Default for RegularityCaps {
    fn default() -> Self {
        Self {
            max_dimension: 20,
            grid: SearchGrid::default(),
            cut: CutNormConfig::default(),
            c2: 1.0 / 64.0,
            relaxed: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityStop {
    /// The residual estimate is at most `δ`.
    Converged,
    /// Another step would exceed `max_dimension`.
    DimensionCap,
    /// The estimator exceeds `δ` but the search found nothing above threshold.
    SearchGap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityStep {
    pub signatures: [LocalSignature; 2],
    pub correlation: f64,
    /// Residual estimate that triggered this step.
    pub residual_lower: f64,
    pub energy_gain: f64,
    pub atoms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityOutput {
    pub factor: Factor,
    pub structured: BoundedFunction,
    pub residual: BoundedFunction,
    pub residual_estimate: CutNormEstimate,
    /// Energy of the trivial factor followed by the energy after each step.
    pub energy_trace: Vec<f64>,
    pub steps: Vec<RegularityStep>,
    pub stop: RegularityStop,
    /// Correlation threshold `c2 δ³ N` used for steps.
    pub threshold: f64,
}

fn check_input(f: &BoundedFunction, relaxed: bool) -> Result<()> {
    if relaxed {
        if f.sup_norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter("relaxed input must be 1-bounded".into()));
        }
        return Ok(());
    }
    let ok = f.values().iter().all(|v| v.im == 0.0 && v.re >= 0.0 && v.re <= 1.0);
    if !ok {
        return Err(Error::InvalidParameter(
            "values must lie in [0, 1]; set `relaxed` for signed 1-bounded input".into(),
        ));
    }
    Ok(())
}

/// Runs the energy-increment loop until the residual estimate drops to `δ`,
/// the dimension cap is reached or the search comes back empty.
pub fn weak_regularize(
    p: &CountingParams,
    f: &BoundedFunction,
    delta: f64,
    caps: &RegularityCaps,
) -> Result<RegularityOutput> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("δ = {delta} not in (0, 1]")));
    }
    check_len(p.n(), f.len())?;
    check_input(f, caps.relaxed)?;
    let n = p.n();
    let threshold = caps.c2 * delta.powi(3) * n as f64;
    let grid = SearchGrid { threshold, ..caps.grid };

    let mut factor = Factor::trivial(n);
    let mut structured = project(f, &factor)?;
    let mut energy_trace = vec![l2_norm_sqr(&structured)];
    let mut steps = Vec::new();
    loop {
        let residual = f.sub(&structured)?;
        let estimate = cut_norm_lower(p, &residual, CutNormKind::Full, &caps.cut)?;
        let finish = |stop, factor, structured, residual, estimate, energy_trace, steps| RegularityOutput {
            factor,
            structured,
            residual,
            residual_estimate: estimate,
            energy_trace,
            steps,
            stop,
            threshold,
        };
        if estimate.lower <= delta {
            return Ok(finish(RegularityStop::Converged, factor, structured, residual, estimate, energy_trace, steps));
        }
        let d = factor.meta().map_or(0, |m| m.d);
        if d + 2 > caps.max_dimension {
            return Ok(finish(RegularityStop::DimensionCap, factor, structured, residual, estimate, energy_trace, steps));
        }
        let Some(w) = inverse_correlation_search(&residual, p.q(), &grid)? else {
            return Ok(finish(RegularityStop::SearchGap, factor, structured, residual, estimate, energy_trace, steps));
        };
        let b1 = simple_local_factor(n, w.signatures[0])?;
        let b2 = simple_local_factor(n, w.signatures[1])?;
        factor = join_factors(&[&factor, &b1, &b2])?;
        structured = project(f, &factor)?;
        let e = l2_norm_sqr(&structured);
        let gain = e - energy_trace.last().unwrap();
        energy_trace.push(e);
        steps.push(RegularityStep {
            signatures: w.signatures,
            correlation: w.correlation,
            residual_lower: estimate.lower,
            energy_gain: gain,
            atoms: factor.atom_count(),
        });
    }
}
