use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roth_core::function::indicator;
use roth_core::increment::{greedy_extremal_search, Strategy};
use roth_core::{io, BoundedFunction, IntegerSet};

/// Resolves `--set`: a named family on `[N]` or a set file.
///
/// Names: `full`, `empty`, `odd`, `even`, `greedy`, `random-greedy`
/// (seeded) and `random:<p>` (each element kept with probability `p`).
pub fn load_set(spec: &str, n: Option<usize>, q: u64, seed: u64) -> Result<IntegerSet> {
    let need_n = || n.with_context(|| format!("--N is required for --set {spec}"));
    let set = match spec {
        "full" => IntegerSet::full(need_n()?),
        "empty" => IntegerSet::new(need_n()?),
        "odd" => IntegerSet::from_predicate(need_n()?, |x| x % 2 == 1),
        "even" => IntegerSet::from_predicate(need_n()?, |x| x % 2 == 0),
        "greedy" => greedy_extremal_search(need_n()?, q, Strategy::Greedy, seed, 0)?,
        "random-greedy" => greedy_extremal_search(need_n()?, q, Strategy::RandomGreedy, seed, 0)?,
        _ if spec.starts_with("random:") => {
            let p: f64 = spec["random:".len()..].parse().with_context(|| format!("bad probability in {spec:?}"))?;
            if !(0.0..=1.0).contains(&p) {
                bail!("probability {p} not in [0, 1]");
            }
            let n = need_n()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let keep: Vec<bool> = (0..n).map(|_| rng.random_bool(p)).collect();
            IntegerSet::from_predicate(n, |x| keep[x - 1])
        }
        path => {
            let a = io::load_set(path).with_context(|| format!("reading set file {path}"))?;
            if let Some(n) = n {
                if n != a.len() {
                    bail!("--N {n} disagrees with N={} in {path}", a.len());
                }
            }
            a
        }
    };
    Ok(set)
}

pub fn load_function(path: &Path) -> Result<BoundedFunction> {
    io::load_function(path).with_context(|| format!("reading function file {}", path.display()))
}

/// `--function` if given, else the indicator of `--set`.
pub fn function_or_indicator(
    function: Option<&Path>,
    set: Option<&str>,
    n: Option<usize>,
    q: u64,
    seed: u64,
) -> Result<BoundedFunction> {
    match (function, set) {
        (Some(path), _) => load_function(path),
        (None, Some(spec)) => Ok(indicator(&load_set(spec, n, q, seed)?)),
        (None, None) => bail!("one of --set or --function is required"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_sets() {
        assert_eq!(load_set("full", Some(5), 1, 0).unwrap().cardinality(), 5);
        assert_eq!(load_set("odd", Some(5), 1, 0).unwrap().members().collect::<Vec<_>>(), vec![1, 3, 5]);
        assert_eq!(load_set("greedy", Some(3), 1, 0).unwrap().members().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(load_set("random:0.5", Some(50), 1, 7).unwrap(), load_set("random:0.5", Some(50), 1, 7).unwrap());
        assert!(load_set("full", None, 1, 0).is_err());
        assert!(load_set("random:2", Some(5), 1, 0).is_err());
    }
}
