//! Finite probabilistic metric spaces.
//!
//! A [`ProbMetricSpace`] is a finite carrier, a t-norm and a symmetric
//! matrix of distance distributions. Construction only checks the shape;
//! the axioms P1–P5 are verified by [`ProbMetricSpace::check_axioms`], which
//! returns a report with witnesses instead of failing.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distribution::{Distribution, StepDistribution};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::oracle::GridSpec;
use crate::report::{AxiomReport, MapCheck, Verdict, Witness};
use crate::tnorm::OrdinalSum;

/// Absolute slack allowed by the sampled triangle check on exponential
/// entries.
pub const SAMPLED_TOLERANCE: f64 = 1e-9;

/// Points per axis of the default sampled triangle grid (32² ≈ 10³ pairs).
const SAMPLE_POINTS: usize = 32;

/// An ordered list of distinct point labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Carrier {
    labels: Vec<String>,
}

impl Carrier {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidSpace("carrier is empty".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidSpace(format!("duplicate label `{l}`")));
            }
            if l.contains('|') || l.contains(',') || l.contains('{') || l.contains('}') {
                return Err(Error::InvalidSpace(format!(
                    "label `{l}` contains a reserved character (| , {{ }})"
                )));
            }
        }
        Ok(Carrier { labels })
    }

    /// Labels `x0, x1, …`.
    pub fn numbered(n: usize) -> Self {
        assert!(n > 0, "carrier needs at least one point");
        Carrier {
            labels: (0..n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }
}

impl<'de> Deserialize<'de> for Carrier {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(deserializer)?;
        Carrier::new(labels).map_err(serde::de::Error::custom)
    }
}

fn check_square<T>(n: usize, m: &[Vec<T>]) -> Result<()> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidSpace(format!(
            "matrix is not {n}×{n}"
        )));
    }
    Ok(())
}

/// A classical metric with values in `[0, ∞]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalMetric {
    carrier: Carrier,
    d: Vec<Vec<ExtReal>>,
}

impl ClassicalMetric {
    /// Validates zero diagonal, symmetry, the triangle inequality and
    /// separation.
    pub fn new(carrier: Carrier, d: Vec<Vec<ExtReal>>) -> Result<Self> {
        Self::build(carrier, d, true)
    }

    /// As [`ClassicalMetric::new`] but distinct points may be at distance 0.
    pub fn pseudo(carrier: Carrier, d: Vec<Vec<ExtReal>>) -> Result<Self> {
        Self::build(carrier, d, false)
    }

    fn build(carrier: Carrier, d: Vec<Vec<ExtReal>>, separated: bool) -> Result<Self> {
        let n = carrier.len();
        check_square(n, &d)?;
        let name = |i: usize| carrier.label(i).to_string();
        for x in 0..n {
            if d[x][x] != ExtReal::ZERO {
                return Err(Error::InvalidSpace(format!("d({0}, {0}) is not 0", name(x))));
            }
            for y in 0..n {
                if d[x][y] != d[y][x] {
                    return Err(Error::InvalidSpace(format!(
                        "d is not symmetric at ({}, {})",
                        name(x),
                        name(y)
                    )));
                }
                if separated && x != y && d[x][y] == ExtReal::ZERO {
                    return Err(Error::InvalidSpace(format!(
                        "distinct points {} and {} are at distance 0",
                        name(x),
                        name(y)
                    )));
                }
                for z in 0..n {
                    if d[x][z] > d[x][y] + d[y][z] {
                        return Err(Error::InvalidSpace(format!(
                            "triangle inequality fails for ({}, {}, {})",
                            name(x),
                            name(y),
                            name(z)
                        )));
                    }
                }
            }
        }
        Ok(ClassicalMetric { carrier, d })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn distance(&self, x: usize, y: usize) -> ExtReal {
        self.d[x][y]
    }

    pub fn matrix(&self) -> &[Vec<ExtReal>] {
        &self.d
    }

    /// `inf_{a ∈ A} d(x, a)`; `∞` for the empty set.
    pub fn distance_to_set(&self, x: usize, set: impl IntoIterator<Item = usize>) -> ExtReal {
        set.into_iter()
            .map(|a| self.d[x][a])
            .min()
            .unwrap_or(ExtReal::INFINITY)
    }
}

/// Options for [`ProbMetricSpace::check_axioms_with`].
#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    /// Grid for the sampled triangle check on exponential entries. When
    /// `None`, each triple gets 32 points per axis up to four times its
    /// largest finite rate.
    pub sample_grid: Option<GridSpec>,
}

/// A finite probabilistic metric space `(X, α)` with respect to a t-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMetricSpace {
    carrier: Carrier,
    tnorm: OrdinalSum,
    alpha: Vec<Vec<Distribution>>,
}

impl ProbMetricSpace {
    pub fn new(carrier: Carrier, tnorm: OrdinalSum, alpha: Vec<Vec<Distribution>>) -> Result<Self> {
        check_square(carrier.len(), &alpha)?;
        Ok(ProbMetricSpace {
            carrier,
            tnorm,
            alpha,
        })
    }

    /// `α_d(x, y, t) = 1` iff `t > d(x, y)`.
    pub fn from_classical_metric(d: &ClassicalMetric, tnorm: OrdinalSum) -> Self {
        let alpha = d
            .matrix()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&dist| Distribution::Step(StepDistribution::single_jump(dist)))
                    .collect()
            })
            .collect();
        ProbMetricSpace {
            carrier: d.carrier().clone(),
            tnorm,
            alpha,
        }
    }

    /// `α(x, y, r) = 1 − e^{−r/d(x,y)}` under the minimum t-norm.
    pub fn exp_family_from_metric(d: &ClassicalMetric) -> Self {
        let alpha = d
            .matrix()
            .iter()
            .map(|row| row.iter().map(|&rate| Distribution::exp(rate)).collect())
            .collect();
        ProbMetricSpace {
            carrier: d.carrier().clone(),
            tnorm: OrdinalSum::minimum(),
            alpha,
        }
    }

    /// The smallest pointwise enlargement of `raw` that satisfies the
    /// triangle axiom under `tnorm`.
    ///
    /// Runs Floyd–Warshall passes of `α[x][z] ← α[x][z] ∨ (α[y][z] ⊗ α[x][y])`
    /// until nothing changes. κ is the top distribution, so cycles never
    /// improve a path and a single pass already reaches the fixpoint.
    pub fn triangle_closure(
        carrier: Carrier,
        raw: Vec<Vec<StepDistribution>>,
        tnorm: OrdinalSum,
    ) -> Result<Self> {
        let n = carrier.len();
        check_square(n, &raw)?;
        for x in 0..n {
            if !raw[x][x].is_kappa() {
                return Err(Error::InvalidSpace(format!(
                    "diagonal entry at `{}` is not kappa",
                    carrier.label(x)
                )));
            }
            for z in 0..x {
                if raw[x][z] != raw[z][x] {
                    return Err(Error::InvalidSpace(format!(
                        "raw matrix is not symmetric at ({}, {})",
                        carrier.label(x),
                        carrier.label(z)
                    )));
                }
            }
        }
        let mut m = raw;
        for _pass in 0..=n {
            let mut changed = false;
            for y in 0..n {
                for x in 0..n {
                    for z in (x + 1)..n {
                        if y == x || y == z {
                            continue;
                        }
                        let path = m[y][z].convolve(&m[x][y], &tnorm)?;
                        if !path.leq(&m[x][z]) {
                            let sup = StepDistribution::sup([&m[x][z], &path]);
                            m[z][x] = sup.clone();
                            m[x][z] = sup;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for x in 0..n {
            for z in (x + 1)..n {
                if m[x][z].is_kappa() {
                    return Err(Error::SeparationLost {
                        x: carrier.label(x).into(),
                        y: carrier.label(z).into(),
                    });
                }
            }
        }
        let alpha = m
            .into_iter()
            .map(|row| row.into_iter().map(Distribution::Step).collect())
            .collect();
        Ok(ProbMetricSpace {
            carrier,
            tnorm,
            alpha,
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn tnorm(&self) -> &OrdinalSum {
        &self.tnorm
    }

    pub fn entry(&self, x: usize, y: usize) -> &Distribution {
        &self.alpha[x][y]
    }

    pub fn row(&self, x: usize) -> &[Distribution] {
        &self.alpha[x]
    }

    pub fn matrix(&self) -> &[Vec<Distribution>] {
        &self.alpha
    }

    pub fn is_step(&self) -> bool {
        self.alpha.iter().flatten().all(Distribution::is_step)
    }

    /// The same matrix under another t-norm.
    pub fn retag(&self, tnorm: OrdinalSum) -> Self {
        ProbMetricSpace {
            carrier: self.carrier.clone(),
            tnorm,
            alpha: self.alpha.clone(),
        }
    }

    /// Applies `f` to every entry and tags the result with `tnorm`.
    pub fn map_entries(
        &self,
        tnorm: OrdinalSum,
        mut f: impl FnMut(&Distribution) -> Result<Distribution>,
    ) -> Result<Self> {
        let alpha = self
            .alpha
            .iter()
            .map(|row| row.iter().map(&mut f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbMetricSpace {
            carrier: self.carrier.clone(),
            tnorm,
            alpha,
        })
    }

    pub fn check_axioms(&self) -> AxiomReport {
        self.check_axioms_with(&CheckOptions::default())
    }

    /// Checks P1–P5. The triangle axiom is exact for step entries; triples
    /// of exponential entries use the closed-form rate inequality together
    /// with a sampled grid.
    pub fn check_axioms_with(&self, opts: &CheckOptions) -> AxiomReport {
        let n = self.len();
        let lbl = |i: usize| self.carrier.label(i).to_string();
        let pair = |x: usize, y: usize, t: Option<f64>| Witness::Pair {
            x: lbl(x),
            y: lbl(y),
            t,
        };
        let mut report = AxiomReport::default();

        let mut w = None;
        'p1: for x in 0..n {
            for y in 0..n {
                if let Distribution::Step(s) = &self.alpha[x][y] {
                    if s.validate().is_err() {
                        w = Some(pair(x, y, None));
                        break 'p1;
                    }
                }
            }
        }
        report.verdicts.push(Verdict::from_witness("P1", w));

        let w = (0..n).find(|&x| !self.alpha[x][x].is_kappa()).map(|x| pair(x, x, None));
        report.verdicts.push(Verdict::from_witness("P2", w));

        let mut w = None;
        'p3: for x in 0..n {
            for y in (x + 1)..n {
                if self.alpha[x][y] != self.alpha[y][x] {
                    w = Some(pair(x, y, None));
                    break 'p3;
                }
            }
        }
        report.verdicts.push(Verdict::from_witness("P3", w));

        let mut w = None;
        'p4: for x in 0..n {
            for y in 0..n {
                if x != y && self.alpha[x][y].is_kappa() {
                    w = Some(pair(x, y, None));
                    break 'p4;
                }
            }
        }
        report.verdicts.push(Verdict::from_witness("P4", w));

        let mut witness = None;
        let mut sampled = 0usize;
        'p5: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (yz, xy, xz) = (&self.alpha[y][z], &self.alpha[x][y], &self.alpha[x][z]);
                    match (yz, xy, xz) {
                        (Distribution::Step(a), Distribution::Step(b), Distribution::Step(c)) => {
                            let path = match a.convolve(b, &self.tnorm) {
                                Ok(p) => p,
                                Err(e) => {
                                    report.unchecked.push(format!(
                                        "({}, {}, {}): {e}",
                                        lbl(x),
                                        lbl(y),
                                        lbl(z)
                                    ));
                                    continue;
                                }
                            };
                            if let Some(t) = path.first_violation(c) {
                                witness = Some(Witness::Triple {
                                    x: lbl(x),
                                    y: lbl(y),
                                    z: lbl(z),
                                    t,
                                });
                                break 'p5;
                            }
                        }
                        _ => {
                            sampled += 1;
                            if let Some((r, s)) = self.sampled_triangle(yz, xy, xz, opts) {
                                witness = Some(Witness::SampledTriple {
                                    x: lbl(x),
                                    y: lbl(y),
                                    z: lbl(z),
                                    r,
                                    s,
                                });
                                break 'p5;
                            }
                            if !rates_close_triangle(yz, xy, xz) {
                                report.unchecked.push(format!(
                                    "({}, {}, {}): sampled grid passed but no closed-form certificate",
                                    lbl(x),
                                    lbl(y),
                                    lbl(z)
                                ));
                            }
                        }
                    }
                }
            }
        }
        let mut v = Verdict::from_witness("P5", witness);
        if sampled > 0 {
            v = v.with_detail(format!(
                "{sampled} triples with exponential entries checked on a sampled grid, tolerance {SAMPLED_TOLERANCE:e}"
            ));
        }
        report.verdicts.push(v);
        report
    }

    /// Searches a grid of `(r, s)` for `α(y,z,r) * α(x,y,s) > α(x,z,r+s) + tol`.
    fn sampled_triangle(
        &self,
        yz: &Distribution,
        xy: &Distribution,
        xz: &Distribution,
        opts: &CheckOptions,
    ) -> Option<(f64, f64)> {
        let grid = opts.sample_grid.unwrap_or_else(|| {
            let scale = [yz, xy, xz]
                .iter()
                .filter_map(|d| match d {
                    Distribution::Exp(e) if e.rate().is_finite() => Some(e.rate().get()),
                    Distribution::Step(s) => s.jumps().last(),
                    _ => None,
                })
                .fold(0.0, f64::max);
            let t_max = if scale > 0.0 { 4.0 * scale } else { 1.0 };
            GridSpec::new(t_max, SAMPLE_POINTS - 1).expect("positive grid")
        });
        let pts = grid.points();
        for &r in &pts {
            let a = yz.evaluate(ExtReal::finite(r));
            for &s in &pts {
                let b = xy.evaluate(ExtReal::finite(s));
                let lhs = self.tnorm.eval(a, b);
                if lhs > xz.evaluate(ExtReal::finite(r + s)) + SAMPLED_TOLERANCE {
                    return Some((r, s));
                }
            }
        }
        None
    }

    /// The file representation described in the crate README.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("space serialises")
    }
}

/// For an all-exponential triple, `d(x,z) ≤ d(x,y) + d(y,z)` on the rates is
/// sufficient for the triangle axiom under every t-norm.
fn rates_close_triangle(yz: &Distribution, xy: &Distribution, xz: &Distribution) -> bool {
    match (yz, xy, xz) {
        (Distribution::Exp(a), Distribution::Exp(b), Distribution::Exp(c)) => {
            c.rate() <= a.rate() + b.rate()
        }
        _ => false,
    }
}

/// Checks `α(x, x', t) ≤ β(f(x), f(x'), t)` for every pair.
///
/// `f[i]` is the index in `target` of the image of point `i` of `source`.
pub fn check_nonexpansive(
    f: &[usize],
    source: &ProbMetricSpace,
    target: &ProbMetricSpace,
) -> Result<MapCheck> {
    if f.len() != source.len() {
        return Err(Error::Precondition(format!(
            "map has {} images for a carrier of {} points",
            f.len(),
            source.len()
        )));
    }
    if let Some(&bad) = f.iter().find(|&&y| y >= target.len()) {
        return Err(Error::Precondition(format!("image index {bad} is outside the target")));
    }
    if source.tnorm() != target.tnorm() {
        return Err(Error::Precondition(format!(
            "spaces use different t-norms ({} and {})",
            source.tnorm(),
            target.tnorm()
        )));
    }
    for x in 0..source.len() {
        for y in 0..source.len() {
            if let Some(t) = source.entry(x, y).first_violation(target.entry(f[x], f[y])) {
                return Ok(MapCheck::from_witness(Some(Witness::Pair {
                    x: source.carrier().label(x).into(),
                    y: source.carrier().label(y).into(),
                    t: Some(t),
                })));
            }
        }
    }
    Ok(MapCheck::from_witness(None))
}

#[derive(Serialize, Deserialize)]
struct SpaceRecord {
    carrier: Carrier,
    tnorm: OrdinalSum,
    entries: BTreeMap<String, Distribution>,
}

impl Serialize for ProbMetricSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.len();
        let mut entries = BTreeMap::new();
        for x in 0..n {
            for y in (x + 1)..n {
                entries.insert(
                    format!("{}|{}", self.carrier.label(x), self.carrier.label(y)),
                    self.alpha[x][y].clone(),
                );
            }
        }
        SpaceRecord {
            carrier: self.carrier.clone(),
            tnorm: self.tnorm.clone(),
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProbMetricSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = SpaceRecord::deserialize(deserializer)?;
        space_from_record(rec).map_err(serde::de::Error::custom)
    }
}

fn space_from_record(rec: SpaceRecord) -> Result<ProbMetricSpace> {
    let n = rec.carrier.len();
    let mut alpha: Vec<Vec<Option<Distribution>>> = vec![vec![None; n]; n];
    for (key, dist) in rec.entries {
        let (a, b) = key
            .split_once('|')
            .ok_or_else(|| Error::Schema(format!("entry key {key:?} is not of the form \"x|y\"")))?;
        let (x, y) = (rec.carrier.index_of(a)?, rec.carrier.index_of(b)?);
        if x == y {
            if !dist.is_kappa() {
                return Err(Error::Schema(format!(
                    "diagonal entry {key:?} must be kappa"
                )));
            }
            continue;
        }
        for (i, j) in [(x, y), (y, x)] {
            match &alpha[i][j] {
                Some(prev) if *prev != dist => {
                    return Err(Error::Schema(format!(
                        "entries for {key:?} in both orders disagree"
                    )))
                }
                _ => alpha[i][j] = Some(dist.clone()),
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for (x, row) in alpha.into_iter().enumerate() {
        let mut r = Vec::with_capacity(n);
        for (y, e) in row.into_iter().enumerate() {
            match e {
                _ if x == y => r.push(Distribution::kappa()),
                Some(d) => r.push(d),
                None => {
                    return Err(Error::Schema(format!(
                        "missing entry \"{}|{}\"",
                        rec.carrier.label(x),
                        rec.carrier.label(y)
                    )))
                }
            }
        }
        out.push(r);
    }
    ProbMetricSpace::new(rec.carrier, rec.tnorm, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tnorm::{Archetype, OrdinalInterval};

    fn x(t: f64) -> ExtReal {
        ExtReal::finite(t)
    }

    fn metric(d: &[&[f64]]) -> ClassicalMetric {
        let n = d.len();
        ClassicalMetric::new(
            Carrier::numbered(n),
            d.iter().map(|r| r.iter().map(|&v| x(v)).collect()).collect(),
        )
        .unwrap()
    }

    fn step(p: &[(f64, f64)]) -> StepDistribution {
        StepDistribution::new(p.to_vec()).unwrap()
    }

    fn corpus() -> Vec<OrdinalSum> {
        vec![
            OrdinalSum::minimum(),
            OrdinalSum::product(),
            OrdinalSum::lukasiewicz(),
            OrdinalSum::new(vec![OrdinalInterval::new(0.2, 0.8, Archetype::Lukasiewicz).unwrap()]).unwrap(),
            OrdinalSum::new(vec![OrdinalInterval::new(0.3, 1.0, Archetype::Product).unwrap()]).unwrap(),
        ]
    }

    #[test]
    fn classical_metric_validation() {
        let c = Carrier::numbered(3);
        let bad = vec![vec![x(0.0), x(1.0), x(5.0)], vec![x(1.0), x(0.0), x(1.0)], vec![x(5.0), x(1.0), x(0.0)]];
        assert!(ClassicalMetric::new(c.clone(), bad).is_err());
        let pseudo = vec![vec![x(0.0), x(0.0), x(1.0)], vec![x(0.0), x(0.0), x(1.0)], vec![x(1.0), x(1.0), x(0.0)]];
        assert!(ClassicalMetric::new(c.clone(), pseudo.clone()).is_err());
        assert!(ClassicalMetric::pseudo(c, pseudo).is_ok());
        assert!(Carrier::new(vec!["a".into(), "a".into()]).is_err());
        assert!(Carrier::new(vec![]).is_err());
    }

    #[test]
    fn chi_of_metric_is_valid_for_every_tnorm() {
        let d = metric(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 3.0], &[2.0, 3.0, 0.0]]);
        for t in corpus() {
            let m = ProbMetricSpace::from_classical_metric(&d, t.clone());
            let r = m.check_axioms();
            assert!(r.all_passed(), "{t}: {}", r.render());
            assert!(m.entry(0, 0).is_kappa());
            assert_eq!(m.entry(1, 2).evaluate(x(3.0)), 0.0);
            assert_eq!(m.entry(0, 2).evaluate(x(2.0)), 0.0);
            assert_eq!(m.entry(0, 2).evaluate(x(2.1)), 1.0);
        }
        let jump1 = StepDistribution::single_jump(x(1.0));
        let jump2 = StepDistribution::single_jump(x(2.0));
        let path = jump1.convolve(&jump2, &OrdinalSum::minimum()).unwrap();
        assert_eq!(path, StepDistribution::single_jump(x(3.0)));
        assert!(path.leq(&StepDistribution::single_jump(x(3.0))));
    }

    #[test]
    fn off_diagonal_kappa_fails_p4() {
        let c = Carrier::numbered(2);
        let m = ProbMetricSpace::new(
            c,
            OrdinalSum::minimum(),
            vec![vec![Distribution::kappa(), Distribution::kappa()], vec![Distribution::kappa(), Distribution::kappa()]],
        )
        .unwrap();
        let r = m.check_axioms();
        let p4 = r.get("P4").unwrap();
        assert!(!p4.passed);
        assert_eq!(p4.witness, Some(Witness::Pair { x: "x0".into(), y: "x1".into(), t: None }));
    }

    /// Two sides `(1→0.5, 2→1)` and a third side that dominates their product
    /// convolution but not their minimum convolution on `(2, 3]`.
    fn product_only_space(t: OrdinalSum) -> ProbMetricSpace {
        let half = Distribution::Step(step(&[(1.0, 0.5), (2.0, 1.0)]));
        let weak = Distribution::Step(step(&[(2.0, 0.3), (3.0, 0.5), (4.0, 1.0)]));
        let k = Distribution::kappa();
        ProbMetricSpace::new(
            Carrier::numbered(3),
            t,
            vec![
                vec![k.clone(), half.clone(), weak.clone()],
                vec![half.clone(), k.clone(), half.clone()],
                vec![weak, half, k],
            ],
        )
        .unwrap()
    }

    #[test]
    fn retag_to_minimum_breaks_triangle() {
        let p = product_only_space(OrdinalSum::product());
        assert!(p.check_axioms().all_passed(), "{}", p.check_axioms().render());
        let m = p.retag(OrdinalSum::minimum());
        let r = m.check_axioms();
        let p5 = r.get("P5").unwrap();
        assert!(!p5.passed);
        match p5.witness.as_ref().unwrap() {
            Witness::Triple { x, y, z, t } => {
                let (xi, yi, zi) = (m.carrier().index_of(x).unwrap(), m.carrier().index_of(y).unwrap(), m.carrier().index_of(z).unwrap());
                let path = m.entry(yi, zi).convolve(m.entry(xi, yi), m.tnorm()).unwrap();
                assert!(path.evaluate(ExtReal::finite(*t)) > m.entry(xi, zi).evaluate(ExtReal::finite(*t)));
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn exp_family_examples() {
        let d = metric(&[&[0.0, 1.0, 3.0], &[1.0, 0.0, 2.0], &[3.0, 2.0, 0.0]]);
        let m = ProbMetricSpace::exp_family_from_metric(&d);
        assert!(m.entry(1, 1).is_kappa());
        let v = m.entry(0, 1).evaluate(x(1.0));
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        let r = m.check_axioms();
        assert!(r.all_passed(), "{}", r.render());
        assert!(r.unchecked.is_empty());
        // spot check from the closed form: d = (1, 2, 3), r = s = 1
        let lhs = (1.0 - (-1.0f64).exp()).min(1.0 - (-0.5f64).exp());
        let rhs = 1.0 - (-2.0f64 / 3.0).exp();
        assert!(lhs <= rhs);
        assert!((lhs - 0.3935).abs() < 1e-4 && (rhs - 0.4866).abs() < 1e-4);
    }

    #[test]
    fn exp_family_with_broken_rates_fails() {
        let k = Distribution::kappa();
        let e = |r: f64| Distribution::exp(x(r));
        let m = ProbMetricSpace::new(
            Carrier::numbered(3),
            OrdinalSum::minimum(),
            vec![vec![k.clone(), e(1.0), e(5.0)], vec![e(1.0), k.clone(), e(1.0)], vec![e(5.0), e(1.0), k]],
        )
        .unwrap();
        assert!(!m.check_axioms().get("P5").unwrap().passed);
    }

    #[test]
    fn triangle_closure_examples() {
        let t = OrdinalSum::product();
        let k = StepDistribution::kappa();
        // already a metric: unchanged
        let d = metric(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.5], &[2.0, 1.5, 0.0]]);
        let chi = ProbMetricSpace::from_classical_metric(&d, t.clone());
        let raw: Vec<Vec<StepDistribution>> = chi.matrix().iter().map(|r| r.iter().map(|e| e.as_step().unwrap().clone()).collect()).collect();
        let closed = ProbMetricSpace::triangle_closure(Carrier::numbered(3), raw, t.clone()).unwrap();
        assert_eq!(closed, chi);
        // two points: nothing to do
        let a = step(&[(1.0, 0.4)]);
        let two = ProbMetricSpace::triangle_closure(Carrier::numbered(2), vec![vec![k.clone(), a.clone()], vec![a.clone(), k.clone()]], t.clone()).unwrap();
        assert_eq!(two.entry(0, 1), &Distribution::Step(a));
        // weak direct edge gets raised to the path
        let near = step(&[(1.0, 1.0)]);
        let weak = step(&[(5.0, 1.0)]);
        let raw = vec![
            vec![k.clone(), near.clone(), weak.clone()],
            vec![near.clone(), k.clone(), near.clone()],
            vec![weak, near, k],
        ];
        let closed = ProbMetricSpace::triangle_closure(Carrier::numbered(3), raw, t).unwrap();
        assert_eq!(closed.entry(0, 2), &Distribution::Step(step(&[(2.0, 1.0)])));
        assert!(closed.check_axioms().all_passed());
    }

    #[test]
    fn triangle_closure_reports_lost_separation() {
        let k = StepDistribution::kappa();
        let raw = vec![vec![k.clone(), k.clone()], vec![k.clone(), k]];
        assert!(matches!(
            ProbMetricSpace::triangle_closure(Carrier::numbered(2), raw, OrdinalSum::minimum()),
            Err(Error::SeparationLost { .. })
        ));
    }

    #[test]
    fn nonexpansive_examples() {
        let d = metric(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.5], &[2.0, 1.5, 0.0]]);
        let m = ProbMetricSpace::from_classical_metric(&d, OrdinalSum::minimum());
        assert!(check_nonexpansive(&[0, 1, 2], &m, &m).unwrap().holds);
        assert!(check_nonexpansive(&[1, 1, 1], &m, &m).unwrap().holds);
        let far = metric(&[&[0.0, 4.0], &[4.0, 0.0]]);
        let n = ProbMetricSpace::from_classical_metric(&far, OrdinalSum::minimum());
        let v = check_nonexpansive(&[0, 1, 1], &m, &n).unwrap();
        assert!(!v.holds);
        assert!(matches!(v.witness, Some(Witness::Pair { .. })));
        assert!(check_nonexpansive(&[0, 1], &m, &n).is_err());
        assert!(check_nonexpansive(&[0, 1, 1], &m, &n.retag(OrdinalSum::product())).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let src = r#"{
            "carrier": ["a", "b", "c"],
            "tnorm": "product",
            "entries": {
                "a|b": {"plateaus": [[1.0, 0.5], [2.0, 1.0]]},
                "c|a": {"plateaus": [[2.0, 1.0]]},
                "b|c": "kappa"
            }
        }"#;
        let m: ProbMetricSpace = serde_json::from_str(src).unwrap();
        assert_eq!(m.entry(2, 0), m.entry(0, 2));
        assert!(!m.check_axioms().get("P4").unwrap().passed);
        let back: ProbMetricSpace = serde_json::from_value(m.to_json_value()).unwrap();
        assert_eq!(back, m);

        let missing = r#"{"carrier": ["a", "b"], "tnorm": "min", "entries": {}}"#;
        assert!(serde_json::from_str::<ProbMetricSpace>(missing).is_err());
        let contradictory = r#"{"carrier": ["a", "b"], "tnorm": "min", "entries": {
            "a|b": {"plateaus": [[1.0, 1.0]]}, "b|a": {"plateaus": [[2.0, 1.0]]}}}"#;
        assert!(serde_json::from_str::<ProbMetricSpace>(contradictory).is_err());
        let unknown = r#"{"carrier": ["a", "b"], "tnorm": "min", "entries": {"a|z": "kappa"}}"#;
        assert!(serde_json::from_str::<ProbMetricSpace>(unknown).is_err());
    }
}
