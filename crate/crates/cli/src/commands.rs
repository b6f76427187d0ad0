use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use rayon::prelude::*;
use roth_core::counting::{count_configurations, count_operator, is_configuration_free, isqrt, CountingParams};
use roth_core::cutnorm::{cut_norm_exact_small, cut_norm_lower, CutNormConfig, CutNormKind};
use roth_core::fourier::{
    major_arc_witness, rational_approximation, sixth_moment_squares, spectrum_grid, weyl_frequency_finder,
    Frequency, MajorArcConfig, MajorArcStatus,
};
use roth_core::function::{balanced_part, indicator};
use roth_core::increment::{
    find_density_increment, greedy_extremal_search, oscillating_example, run_increment_iteration, IncrementCaps,
    IncrementOutcome, IterationCaps, Strategy,
};
use roth_core::regularity::{weak_regularize, RegularityCaps};
use roth_core::{io, BoundedFunction, Progression};
use serde_json::json;

use crate::input::{function_or_indicator, load_set};
use crate::output::{Report, Table};
use crate::{Command, Context, Domain, Input, Kind, StrategyArg};

pub fn dispatch(ctx: &Context, command: Command) -> Result<Report> {
    match command {
        Command::Count { domain, set } => count(ctx, &domain, set),
        Command::FreeCheck { domain, set } => free_check(ctx, &domain, set),
        Command::Cutnorm { domain, input, kind, restarts, iterations, exact, include_zero_shift, witness_prefix } => {
            let cfg = CutNormConfig { restarts, iterations, seed: ctx.seed, include_zero_shift, ..Default::default() };
            cutnorm(ctx, &domain, &input, kind, cfg, exact, witness_prefix.as_deref())
        }
        Command::Regularize { domain, input, delta, max_dimension, relaxed, factor_out } => {
            regularize(ctx, &domain, &input, delta, max_dimension, relaxed, factor_out.as_deref())
        }
        Command::Increment { domain, set, c, max_dimension, min_length } => {
            increment(ctx, &domain, set, c, max_dimension, min_length)
        }
        Command::Iterate { domain, set, c, max_dimension, max_stages, modulus_cap } => {
            iterate(ctx, &domain, set, c, max_dimension, max_stages, modulus_cap)
        }
        Command::SearchExtremal { sizes, q, strategy, budget, runs, set_out } => {
            search_extremal(ctx, &sizes, q, strategy, budget, runs, set_out.as_deref())
        }
        Command::Example1 { n, max_step, function_out } => example1(ctx, n, max_step, function_out.as_deref()),
        Command::Spectrum { domain, input, l } => spectrum(ctx, &domain, &input, l),
        Command::Weyl { n, alpha, start, step, length, delta, c_exp } => {
            weyl(ctx, n, &alpha, start, step, length, delta, c_exp)
        }
        Command::Moment6 { n } => moment6(ctx, n),
        Command::Majorarc { domain, input, delta, c_exp, c0, max_step, grid_factor, center } => {
            let cfg = MajorArcConfig { c_exponent: c_exp, c0, max_step, grid_factor, center };
            majorarc(ctx, &domain, &input, delta, cfg)
        }
    }
}

impl Context {
    fn n(&self, arg: Option<usize>) -> Option<usize> {
        arg.or(self.cfg.n)
    }

    fn require_n(&self, arg: Option<usize>) -> Result<usize> {
        match self.n(arg) {
            Some(0) => bail!("N must be positive"),
            Some(n) => Ok(n),
            None => bail!("--N is required"),
        }
    }

    fn q(&self, arg: Option<u64>) -> Result<u64> {
        let q = arg.or(self.cfg.q).unwrap_or(1);
        if q == 0 {
            bail!("q must be positive");
        }
        Ok(q)
    }

    fn delta(&self, arg: Option<f64>, default: f64) -> f64 {
        arg.or(self.cfg.delta).unwrap_or(default)
    }

    fn c(&self, arg: Option<f64>) -> f64 {
        arg.or(self.cfg.c).unwrap_or(0.01)
    }

    fn set_spec(&self, arg: Option<String>) -> Result<String> {
        arg.or_else(|| self.cfg.paths.set.as_ref().map(|p| p.display().to_string()))
            .context("--set is required")
    }

    fn function_path(&self, input: &Input) -> Option<PathBuf> {
        input.function.clone().or_else(|| self.cfg.paths.function.clone())
    }

    fn input_function(&self, domain: &Domain, input: &Input) -> Result<BoundedFunction> {
        let q = self.q(domain.q)?;
        let set = input.set.clone().or_else(|| self.cfg.paths.set.as_ref().map(|p| p.display().to_string()));
        let path = self.function_path(input);
        if input.balanced && path.is_none() {
            let spec = set.context("--balanced needs --set")?;
            return Ok(balanced_part(&load_set(&spec, self.n(domain.n), q, self.seed)?));
        }
        let f = function_or_indicator(path.as_deref(), set.as_deref(), self.n(domain.n), q, self.seed)?;
        if let Some(n) = self.n(domain.n) {
            if n != f.len() {
                bail!("--N {n} disagrees with input length {}", f.len());
            }
        }
        Ok(f)
    }

    fn regularity_caps(&self, arg: Option<u32>, default: u32, relaxed: bool) -> RegularityCaps {
        let base = RegularityCaps::default();
        RegularityCaps {
            max_dimension: arg.or(self.cfg.caps.dimension).unwrap_or(default),
            grid: self.cfg.caps.grid.unwrap_or(base.grid),
            cut: CutNormConfig { seed: self.seed, ..base.cut },
            relaxed,
            ..base
        }
    }
}

fn count(ctx: &Context, domain: &Domain, set: Option<String>) -> Result<Report> {
    let q = ctx.q(domain.q)?;
    let a = load_set(&ctx.set_spec(set)?, ctx.n(domain.n), q, ctx.seed)?;
    let p = CountingParams::new(q, a.len())?;
    let f = indicator(&a);
    let lambda = count_operator(&p, &f, &f, &f)?;
    let pairs = u64::try_from(count_configurations(&a, &p)?)?;
    let free = is_configuration_free(&a, q)?.free;
    Report::new(json!({
        "N": a.len(),
        "q": q,
        "M": p.m(),
        "lambda_re": lambda.re,
        "lambda_im": lambda.im,
        "pairs": pairs,
        "free": free,
    }))
}

fn free_check(ctx: &Context, domain: &Domain, set: Option<String>) -> Result<Report> {
    let q = ctx.q(domain.q)?;
    let a = load_set(&ctx.set_spec(set)?, ctx.n(domain.n), q, ctx.seed)?;
    let r = is_configuration_free(&a, q)?;
    let show = |c: Option<roth_core::counting::Configuration>| c.map(|c| c.to_string());
    Report::new(json!({
        "N": a.len(),
        "q": q,
        "cardinality": a.cardinality(),
        "free": r.free,
        "witness": show(r.witness()),
        "positive_pairs": u64::try_from(r.positive_pairs)?,
        "negative_pairs": u64::try_from(r.negative_pairs)?,
        "positive_witness": show(r.positive_witness),
        "negative_witness": show(r.negative_witness),
    }))
}

fn cutnorm(
    ctx: &Context,
    domain: &Domain,
    input: &Input,
    kind: Kind,
    cfg: CutNormConfig,
    exact: bool,
    witness_prefix: Option<&Path>,
) -> Result<Report> {
    let f = ctx.input_function(domain, input)?;
    let q = ctx.q(domain.q)?;
    let p = CountingParams::new(q, f.len())?;
    let kind = match kind {
        Kind::Partial => CutNormKind::Partial,
        Kind::Full => CutNormKind::Full,
    };
    let est = cut_norm_lower(&p, &f, kind, &cfg)?;
    let exact_value = if exact { Some(cut_norm_exact_small(&p, &f, kind, cfg.include_zero_shift)?) } else { None };
    let mut files = Vec::new();
    if let Some(prefix) = witness_prefix {
        for (tag, w) in [("a", &est.witness_a), ("b", &est.witness_b)] {
            let path = PathBuf::from(format!("{}_{tag}.csv", prefix.display()));
            io::save_function(&path, w)?;
            files.push(path.display().to_string());
        }
    }
    Report::new(json!({
        "N": f.len(),
        "q": q,
        "kind": kind,
        "lower": est.lower,
        "upper": est.upper,
        "exact": exact_value.is_some(),
        "exact_value": exact_value,
        "slot": est.slot,
        "restarts": est.restarts,
        "iterations": est.iterations,
        "seed": cfg.seed,
        "witness_files": files,
    }))
}

fn regularize(
    ctx: &Context,
    domain: &Domain,
    input: &Input,
    delta: Option<f64>,
    max_dimension: Option<u32>,
    relaxed: bool,
    factor_out: Option<&Path>,
) -> Result<Report> {
    let f = ctx.input_function(domain, input)?;
    let q = ctx.q(domain.q)?;
    let p = CountingParams::new(q, f.len())?;
    let delta = ctx.delta(delta, 0.1);
    let caps = ctx.regularity_caps(max_dimension, 20, relaxed || input.balanced);
    let out = weak_regularize(&p, &f, delta, &caps)?;
    let mut files = Vec::new();
    if let Some(stem) = factor_out {
        io::save_factor(stem, &out.factor)?;
        files = vec![stem.with_extension("csv").display().to_string(), stem.with_extension("json").display().to_string()];
    }
    let est = &out.residual_estimate;
    Report::new(json!({
        "N": f.len(),
        "q": q,
        "delta": delta,
        "stop": out.stop,
        "threshold": out.threshold,
        "steps": out.steps,
        "energies": out.energy_trace,
        "residual_estimate": { "lower": est.lower, "upper": est.upper, "slot": est.slot },
        "atoms": out.factor.atom_count(),
        "meta": out.factor.meta(),
        "factor_files": files,
    }))
}

fn increment(
    ctx: &Context,
    domain: &Domain,
    set: Option<String>,
    c: Option<f64>,
    max_dimension: Option<u32>,
    min_length: u64,
) -> Result<Report> {
    let q = ctx.q(domain.q)?;
    let a = load_set(&ctx.set_spec(set)?, ctx.n(domain.n), q, ctx.seed)?;
    let c = ctx.c(c);
    let defaults = IncrementCaps::default();
    let caps = IncrementCaps {
        regularity: ctx.regularity_caps(max_dimension, defaults.regularity.max_dimension, false),
        min_length,
        ..defaults
    };
    let outcome = find_density_increment(&a, q, a.density(), c, &caps)?;
    let found = matches!(outcome, IncrementOutcome::Found(_));
    Ok(Report::new(json!({
        "N": a.len(),
        "q": q,
        "delta": a.density(),
        "c": c,
        "outcome": outcome,
    }))?
    .failed(!found))
}

fn iterate(
    ctx: &Context,
    domain: &Domain,
    set: Option<String>,
    c: Option<f64>,
    max_dimension: Option<u32>,
    max_stages: usize,
    modulus_cap: Option<u64>,
) -> Result<Report> {
    let a = load_set(&ctx.set_spec(set)?, ctx.n(domain.n), 1, ctx.seed)?;
    let defaults = IterationCaps::default();
    let caps = IterationCaps {
        increment: IncrementCaps {
            regularity: ctx.regularity_caps(max_dimension, defaults.increment.regularity.max_dimension, false),
            ..defaults.increment
        },
        max_stages,
        modulus_cap: modulus_cap.or(ctx.cfg.caps.modulus).unwrap_or(defaults.modulus_cap),
    };
    let trace = run_increment_iteration(&a, ctx.c(c), &caps)?;
    Report::new(json!({ "seed": ctx.seed, "trace": trace }))
}

fn search_extremal(
    ctx: &Context,
    sizes: &[usize],
    q: Option<u64>,
    strategy: StrategyArg,
    budget: usize,
    runs: u64,
    set_out: Option<&Path>,
) -> Result<Report> {
    let q = ctx.q(q)?;
    if runs == 0 {
        bail!("--runs must be positive");
    }
    let strategy = match strategy {
        StrategyArg::Greedy => Strategy::Greedy,
        StrategyArg::RandomGreedy => Strategy::RandomGreedy,
        StrategyArg::LocalSearch => Strategy::LocalSearch,
    };
    let mut rows = Vec::new();
    let mut last = None;
    for &n in sizes {
        if n == 0 {
            bail!("N must be positive");
        }
        let seeds: Vec<u64> = (0..runs).map(|k| ctx.seed.wrapping_add(k)).collect();
        let sets = seeds
            .par_iter()
            .map(|&s| greedy_extremal_search(n, q, strategy, s, budget).map(|a| (s, a)))
            .collect::<roth_core::Result<Vec<_>>>()?;
        // Largest set, smallest seed on ties.
        let (seed, best) = sets
            .into_iter()
            .reduce(|x, y| if y.1.cardinality() > x.1.cardinality() { y } else { x })
            .unwrap();
        let density = best.density();
        let ratio = density * (n as f64).ln().powf(0.01);
        rows.push(json!({ "N": n, "card": best.cardinality(), "density": density, "ratio": ratio, "seed": seed }));
        last = Some(best);
    }
    if let (Some(path), Some(a)) = (set_out, &last) {
        io::save_set(path, a)?;
    }
    let table = Table {
        header: ["N", "card", "density", "ratio"].map(String::from).to_vec(),
        rows: rows
            .iter()
            .map(|r| ["N", "card", "density", "ratio"].iter().map(|k| r[k].to_string()).collect())
            .collect(),
    };
    Ok(Report::new(json!({ "q": q, "strategy": strategy, "rows": rows }))?.with_table(table))
}

fn example1(ctx: &Context, n: Option<usize>, max_step: u64, function_out: Option<&Path>) -> Result<Report> {
    let n = ctx.require_n(n)?;
    let (f, stats) = oscillating_example(n, max_step)?;
    if let Some(path) = function_out {
        io::save_function(path, &f)?;
    }
    Report::new(stats)
}

fn spectrum(ctx: &Context, domain: &Domain, input: &Input, l: Option<usize>) -> Result<Report> {
    let f = ctx.input_function(domain, input)?;
    let l = l.unwrap_or_else(|| (2 * f.len()).next_power_of_two());
    let coeffs = spectrum_grid(&f, l)?;
    let rows: Vec<Vec<String>> = coeffs
        .iter()
        .enumerate()
        .map(|(k, z)| vec![(k as f64 / l as f64).to_string(), z.re.to_string(), z.im.to_string(), z.norm().to_string()])
        .collect();
    let json_rows: Vec<_> = coeffs
        .iter()
        .enumerate()
        .map(|(k, z)| json!({ "alpha": k as f64 / l as f64, "re": z.re, "im": z.im, "modulus": z.norm() }))
        .collect();
    let table = Table { header: ["alpha", "re", "im", "modulus"].map(String::from).to_vec(), rows };
    Ok(Report::new(json!({ "N": f.len(), "L": l, "rows": json_rows }))?.with_table(table))
}

fn parse_alpha(s: &str) -> Result<Frequency> {
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().with_context(|| format!("bad numerator in {s:?}"))?;
        let b: u64 = b.trim().parse().with_context(|| format!("bad denominator in {s:?}"))?;
        return Ok(Frequency::rational(a, b)?);
    }
    let v: f64 = s.trim().parse().with_context(|| format!("bad frequency {s:?}"))?;
    if !v.is_finite() {
        bail!("frequency must be finite");
    }
    Ok(Frequency::new(v))
}

#[allow(clippy::too_many_arguments)]
fn weyl(
    ctx: &Context,
    n: Option<usize>,
    alpha: &str,
    start: i64,
    step: u64,
    length: Option<u64>,
    delta: Option<f64>,
    c_exp: f64,
) -> Result<Report> {
    let n = ctx.require_n(n)? as u64;
    let alpha = parse_alpha(alpha)?;
    let p = Progression::new(start, step, length.unwrap_or_else(|| isqrt(n)))?;
    let delta = ctx.delta(delta, 0.1);
    let out = weyl_frequency_finder(&p, n, &alpha, delta, c_exp)?;
    let big_q = delta.powf(-c_exp).floor().max(1.0) as u64;
    let approx = rational_approximation(&alpha, big_q)?;
    Ok(Report::new(json!({
        "N": n,
        "alpha": alpha,
        "progression": p,
        "delta": delta,
        "C": c_exp,
        "outcome": out,
        "rational_approximation": { "Q": big_q, "q": approx.q, "distance": approx.distance },
    }))?
    .failed(out.witness.is_none()))
}

fn moment6(ctx: &Context, n: Option<usize>) -> Result<Report> {
    let n = ctx.require_n(n)?;
    let count = u64::try_from(sixth_moment_squares(n as u64)?)?;
    Report::new(json!({ "N": n, "count": count, "ratio": count as f64 / (n as f64).powi(4) }))
}

fn majorarc(ctx: &Context, domain: &Domain, input: &Input, delta: Option<f64>, cfg: MajorArcConfig) -> Result<Report> {
    let h = ctx.input_function(domain, input)?;
    let n = h.len();
    let p = CountingParams::new(1, n)?;
    let one = BoundedFunction::ones(n);
    let delta = ctx.delta(delta, 0.1);
    let out = major_arc_witness(&p, &one, &one, &h, delta, &cfg)?;
    Ok(Report::new(json!({ "N": n, "delta": delta, "config": cfg, "outcome": out }))?
        .failed(out.status != MajorArcStatus::Found))
}
