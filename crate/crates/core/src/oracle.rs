//! Brute-force oracles and seeded generators.
//!
//! The generators draw jumps from the quarter grid `{0.25, 0.5, …, 4}` so
//! that jump sums are exact in binary64.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{Distribution, StepDistribution};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::probmetric::{Carrier, ClassicalMetric, ProbMetricSpace};
use crate::tnorm::OrdinalSum;

/// Identifier of the pseudo-random algorithm behind every generator.
pub const RNG_ALGORITHM: &str = "chacha8-v1";

/// Resample budget of [`random_space`].
pub const MAX_ATTEMPTS: usize = 100;

pub const DEFAULT_RESOLUTION: usize = 1000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The grid `i · t_max / resolution` for `i = 0..=resolution`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    t_max: f64,
    resolution: usize,
}

impl GridSpec {
    pub fn new(t_max: f64, resolution: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) || resolution == 0 {
            return Err(Error::Precondition(format!(
                "grid needs a finite positive t_max and a positive resolution, got ({t_max}, {resolution})"
            )));
        }
        Ok(GridSpec { t_max, resolution })
    }

    /// `t_max` is twice the largest finite jump (1 if there is none).
    pub fn covering<'a>(dists: impl IntoIterator<Item = &'a StepDistribution>) -> Self {
        let largest = dists
            .into_iter()
            .flat_map(|d| d.jumps())
            .fold(0.0, f64::max);
        let t_max = if largest > 0.0 { 2.0 * largest } else { 1.0 };
        GridSpec {
            t_max,
            resolution: DEFAULT_RESOLUTION,
        }
    }

    /// Parses `"t_max,resolution"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Schema(format!("grid {s:?} is not of the form t_max,resolution")))?;
        let t_max = a
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("bad grid t_max {a:?}")))?;
        let resolution = b
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("bad grid resolution {b:?}")))?;
        GridSpec::new(t_max, resolution)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn pitch(&self) -> f64 {
        self.t_max / self.resolution as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        (i as f64 * self.t_max) / self.resolution as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.resolution).map(|i| self.point(i)).collect()
    }
}

/// `(t, max_{r+s=t} φ(r) * ψ(s))` with `r`, `s` and `t` on the grid.
pub fn grid_convolve_oracle(
    t: &OrdinalSum,
    phi: &StepDistribution,
    psi: &StepDistribution,
    grid: &GridSpec,
) -> Vec<(f64, f64)> {
    let pts = grid.points();
    let a: Vec<f64> = pts.iter().map(|&r| phi.evaluate(ExtReal::finite(r))).collect();
    let b: Vec<f64> = pts.iter().map(|&s| psi.evaluate(ExtReal::finite(s))).collect();
    (0..pts.len())
        .map(|i| {
            let best = (0..=i).map(|j| t.eval(a[j], b[i - j])).fold(0.0, f64::max);
            (pts[i], best)
        })
        .collect()
}

/// A grid point where the exact convolution breaks the oracle contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractBreach {
    pub t: f64,
    pub exact: f64,
    pub oracle: f64,
    pub reason: &'static str,
}

/// Checks that `exact` dominates the oracle everywhere and agrees with it
/// at grid points more than one pitch past the start of their plateau.
pub fn check_convolve_contract(
    exact: &StepDistribution,
    oracle: &[(f64, f64)],
    grid: &GridSpec,
) -> Option<ContractBreach> {
    let pitch = grid.pitch();
    for &(t, o) in oracle {
        let e = exact.evaluate(ExtReal::finite(t));
        if o > e {
            return Some(ContractBreach {
                t,
                exact: e,
                oracle: o,
                reason: "oracle exceeds exact value",
            });
        }
        let start = exact
            .plateaus()
            .iter()
            .rev()
            .find(|p| p.0 < t)
            .map_or(0.0, |p| p.0);
        if t > start + pitch && o != e {
            return Some(ContractBreach {
                t,
                exact: e,
                oracle: o,
                reason: "oracle and exact disagree inside a plateau",
            });
        }
    }
    None
}

/// The least grid radius `r` with `sup_{a ∈ A} α(x, a, r⁺) = 1`.
///
/// Right limits make the oracle return a grid point at or above the exact
/// infimum, so `A = {x}` gives 0 and integer distances come out exact.
pub fn grid_delta_oracle(
    m: &ProbMetricSpace,
    x: usize,
    set: &[usize],
    grid: &GridSpec,
) -> Result<ExtReal> {
    if set.is_empty() {
        return Err(Error::Precondition("grid_delta_oracle needs a non-empty set".into()));
    }
    for r in grid.points() {
        if set.iter().any(|&a| m.entry(x, a).value_after(r) == 1.0) {
            return Ok(ExtReal::finite(r));
        }
    }
    Ok(ExtReal::INFINITY)
}

const VALUES: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

fn quarter(rng: &mut impl Rng) -> f64 {
    rng.gen_range(1..=16) as f64 * 0.25
}

/// A step distribution with one to three plateaus on the quarter grid.
/// About four in five reach 1.
pub fn random_step(rng: &mut impl Rng) -> StepDistribution {
    let k = rng.gen_range(1..=3);
    let mut jumps: Vec<u32> = (1..=16).collect::<Vec<_>>();
    jumps.shuffle(rng);
    let mut jumps: Vec<f64> = jumps[..k].iter().map(|&j| j as f64 * 0.25).collect();
    jumps.sort_by(f64::total_cmp);
    let reaches_one = rng.gen_bool(0.8);
    let pool = if reaches_one { &VALUES[..9] } else { &VALUES[..] };
    let mut values: Vec<f64> = pool.choose_multiple(rng, k).copied().collect();
    values.sort_by(f64::total_cmp);
    if reaches_one {
        values[k - 1] = 1.0;
    }
    StepDistribution::new(jumps.into_iter().zip(values).collect()).expect("generated plateaus are valid")
}

/// A random valid space: symmetric random entries closed under the triangle
/// axiom for `t`.
pub fn random_space(t: &OrdinalSum, n_points: usize, seed: u64) -> Result<ProbMetricSpace> {
    if n_points < 2 {
        return Err(Error::Precondition("random_space needs at least two points".into()));
    }
    let mut rng = rng(seed);
    let mut last = String::new();
    for _ in 0..MAX_ATTEMPTS {
        let raw = random_symmetric(&mut rng, n_points);
        match ProbMetricSpace::triangle_closure(Carrier::numbered(n_points), raw, t.clone()) {
            Ok(space) => {
                let report = space.check_axioms();
                if report.all_passed() {
                    return Ok(space);
                }
                last = report.render();
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::GeneratorExhausted {
        attempts: MAX_ATTEMPTS,
        reason: last,
    })
}

fn random_symmetric(rng: &mut impl Rng, n: usize) -> Vec<Vec<StepDistribution>> {
    let mut raw = vec![vec![StepDistribution::kappa(); n]; n];
    for x in 0..n {
        for y in (x + 1)..n {
            let e = random_step(rng);
            raw[y][x] = e.clone();
            raw[x][y] = e;
        }
    }
    raw
}

/// A random finite metric on the quarter grid, shortest-path closed.
/// About one pair in ten starts at distance `∞`.
pub fn random_metric(n_points: usize, seed: u64) -> ClassicalMetric {
    assert!(n_points > 0, "random_metric needs at least one point");
    let mut rng = rng(seed);
    let n = n_points;
    let mut d = vec![vec![ExtReal::ZERO; n]; n];
    for x in 0..n {
        for y in (x + 1)..n {
            let v = if rng.gen_bool(0.1) {
                ExtReal::INFINITY
            } else {
                ExtReal::finite(quarter(&mut rng))
            };
            d[x][y] = v;
            d[y][x] = v;
        }
    }
    for k in 0..n {
        for x in 0..n {
            for y in 0..n {
                let via = d[x][k] + d[k][y];
                if via < d[x][y] {
                    d[x][y] = via;
                }
            }
        }
    }
    ClassicalMetric::new(Carrier::numbered(n), d).expect("shortest-path closure is a metric")
}

/// A map `f` together with spaces `M` and `N` such that `f: M → N` is
/// non-expansive.
#[derive(Debug, Clone)]
pub struct NonexpansivePair {
    pub map: Vec<usize>,
    pub source: ProbMetricSpace,
    pub target: ProbMetricSpace,
}

/// Draws `M`, a map `f`, and builds `N` as the triangle closure of the
/// pushforward of `M` along `f`. Pairs of `N` not hit by `f` get random
/// entries.
pub fn random_nonexpansive_pair(
    t: &OrdinalSum,
    n_source: usize,
    n_target: usize,
    seed: u64,
) -> Result<NonexpansivePair> {
    if n_target < 2 {
        return Err(Error::Precondition("target needs at least two points".into()));
    }
    let source = random_space(t, n_source, seed)?;
    let mut rng = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let map: Vec<usize> = (0..n_source).map(|_| rng.gen_range(0..n_target)).collect();
    let mut raw = random_symmetric(&mut rng, n_target);
    for u in 0..n_target {
        for v in 0..n_target {
            if u == v {
                continue;
            }
            let hits: Vec<&StepDistribution> = (0..n_source)
                .flat_map(|x| (0..n_source).map(move |y| (x, y)))
                .filter(|&(x, y)| map[x] == u && map[y] == v)
                .map(|(x, y)| source.entry(x, y).as_step().expect("generated spaces are step"))
                .collect();
            if !hits.is_empty() {
                raw[u][v] = StepDistribution::sup(hits);
            }
        }
    }
    let target = ProbMetricSpace::triangle_closure(Carrier::numbered(n_target), raw, t.clone())?;
    Ok(NonexpansivePair { map, source, target })
}

/// One line of a corpus manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub seed: u64,
    pub tnorm: OrdinalSum,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    #[serde(default = "default_algorithm")]
    pub algorithm: String,
    pub entries: Vec<CorpusEntry>,
}

fn default_algorithm() -> String {
    RNG_ALGORITHM.to_string()
}

impl CorpusManifest {
    pub fn new(entries: Vec<CorpusEntry>) -> Self {
        CorpusManifest {
            algorithm: default_algorithm(),
            entries,
        }
    }

    pub fn check_algorithm(&self) -> Result<()> {
        if self.algorithm != RNG_ALGORITHM {
            return Err(Error::Schema(format!(
                "manifest uses generator {:?}, this build provides {RNG_ALGORITHM:?}",
                self.algorithm
            )));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Vec<ProbMetricSpace>> {
        self.check_algorithm()?;
        self.entries
            .iter()
            .map(|e| random_space(&e.tnorm, e.n_points, e.seed))
            .collect()
    }
}

/// Wraps every entry as a [`Distribution`]; used by tests that need
/// matrices in the enum form.
pub fn step_matrix(m: &[Vec<StepDistribution>]) -> Vec<Vec<Distribution>> {
    m.iter()
        .map(|r| r.iter().cloned().map(Distribution::Step).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(t: f64) -> ExtReal {
        ExtReal::finite(t)
    }

    #[test]
    fn grid_points_are_exact_multiples() {
        let g = GridSpec::new(8.0, 1000).unwrap();
        assert_eq!(g.point(125), 1.0);
        assert_eq!(g.point(1000), 8.0);
        assert_eq!(g.points().len(), 1001);
        assert!(GridSpec::new(0.0, 10).is_err());
        assert_eq!(GridSpec::parse("4, 100").unwrap(), GridSpec::new(4.0, 100).unwrap());
    }

    #[test]
    fn kappa_oracle_reproduces_samples() {
        let phi = StepDistribution::new(vec![(0.5, 0.3), (1.25, 1.0)]).unwrap();
        let g = GridSpec::new(4.0, 400).unwrap();
        for t in [OrdinalSum::minimum(), OrdinalSum::product(), OrdinalSum::lukasiewicz()] {
            let o = grid_convolve_oracle(&t, &StepDistribution::kappa(), &phi, &g);
            // κ(0) = 0, so the oracle lags φ by one pitch right after a jump
            for &(s, v) in &o {
                let lagging = phi.jumps().any(|j| j < s && s <= j + g.pitch() + 1e-12);
                if !lagging {
                    assert_eq!(v, phi.evaluate(x(s)), "t = {s}");
                }
            }
        }
    }

    #[test]
    fn single_jump_oracle_rises_after_sum() {
        let a = StepDistribution::single_jump(x(1.0));
        let b = StepDistribution::single_jump(x(1.5));
        let g = GridSpec::new(5.0, 500).unwrap();
        let o = grid_convolve_oracle(&OrdinalSum::minimum(), &a, &b, &g);
        for &(t, v) in &o {
            if t <= 2.5 {
                assert_eq!(v, 0.0, "t = {t}");
            } else if t > 2.5 + g.pitch() {
                assert_eq!(v, 1.0, "t = {t}");
            }
        }
        assert_eq!((o[251].1, o[252].1), (0.0, 1.0));
        let exact = a.convolve(&b, &OrdinalSum::minimum()).unwrap();
        assert!(check_convolve_contract(&exact, &o, &g).is_none());
    }

    #[test]
    fn delta_oracle_examples() {
        let d = random_metric(4, 3);
        let m = ProbMetricSpace::from_classical_metric(&d, OrdinalSum::minimum());
        let g = GridSpec::new(10.0, 1000).unwrap();
        assert_eq!(grid_delta_oracle(&m, 1, &[1], &g).unwrap(), ExtReal::ZERO);
        let want = d.distance_to_set(0, [2, 3]);
        let got = grid_delta_oracle(&m, 0, &[2, 3], &g).unwrap();
        if want.is_finite() {
            assert!(got >= want && got.get() - want.get() <= g.pitch() + 1e-12);
        } else {
            assert!(got.is_infinite());
        }
        let e = ProbMetricSpace::exp_family_from_metric(&random_metric(3, 5));
        assert!(grid_delta_oracle(&e, 0, &[1, 2], &g).unwrap().is_infinite());
        assert!(grid_delta_oracle(&e, 0, &[], &g).is_err());
    }

    #[test]
    fn random_space_is_deterministic_and_valid() {
        for t in [OrdinalSum::minimum(), OrdinalSum::product(), OrdinalSum::lukasiewicz()] {
            let a = random_space(&t, 5, 11).unwrap();
            let b = random_space(&t, 5, 11).unwrap();
            assert_eq!(a, b);
            assert!(a.check_axioms().all_passed());
        }
        assert!(random_space(&OrdinalSum::minimum(), 1, 0).is_err());
    }

    #[test]
    fn two_point_space_keeps_raw_entry() {
        let s = random_space(&OrdinalSum::product(), 2, 42).unwrap();
        let mut r = rng(42);
        let raw = random_symmetric(&mut r, 2);
        assert_eq!(s.entry(0, 1), &Distribution::Step(raw[0][1].clone()));
    }

    #[test]
    fn random_steps_are_valid() {
        let mut r = rng(1);
        for _ in 0..2000 {
            let s = random_step(&mut r);
            assert!(!s.plateaus().is_empty() && s.plateaus().len() <= 3);
        }
    }

    #[test]
    fn manifest_round_trip() {
        let m = CorpusManifest::new(vec![CorpusEntry {
            seed: 7,
            tnorm: OrdinalSum::lukasiewicz(),
            n_points: 4,
        }]);
        let s = serde_json::to_string(&m).unwrap();
        let back: CorpusManifest = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.generate().unwrap().len(), 1);
        let bare: CorpusManifest =
            serde_json::from_str(r#"{"entries":[{"seed":1,"tnorm":"min","n_points":3}]}"#).unwrap();
        assert_eq!(bare.algorithm, RNG_ALGORITHM);
    }
}
