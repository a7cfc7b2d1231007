//! Finite approach spaces and the structures a probabilistic metric induces
//! on them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distribution::{Distribution, StepDistribution};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::probmetric::{Carrier, ProbMetricSpace, SAMPLED_TOLERANCE};
use crate::report::{AxiomReport, MapCheck, Verdict, Witness};

/// Largest carrier for which a full δ table is built.
pub const MAX_TABLE_CARRIER: usize = 16;

/// Default largest carrier for the exhaustive A3/A4 checks.
pub const DEFAULT_A4_CAP: usize = 8;

/// A subset of a carrier of at most 16 points, as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        Subset(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn from_indices(idx: impl IntoIterator<Item = usize>) -> Self {
        Subset(idx.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// All subsets of an `n`-point carrier, in bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..1u32 << n).map(Subset)
    }

    /// Parses a comma-separated list of labels; the empty string is `∅`.
    pub fn parse(carrier: &Carrier, list: &str) -> Result<Self> {
        let list = list.trim().trim_start_matches('{').trim_end_matches('}');
        let mut s = Subset::EMPTY;
        for label in list.split(',').map(str::trim).filter(|l| !l.is_empty()) {
            s = s.union(Subset::singleton(carrier.index_of(label)?));
        }
        Ok(s)
    }

    pub fn labels(self, carrier: &Carrier) -> Vec<String> {
        self.iter().map(|i| carrier.label(i).to_string()).collect()
    }

    /// `{a,b}` with labels in carrier order.
    pub fn display(self, carrier: &Carrier) -> String {
        format!("{{{}}}", self.labels(carrier).join(","))
    }
}

fn check_table_size(n: usize) -> Result<()> {
    if n > MAX_TABLE_CARRIER {
        return Err(Error::CarrierCap {
            size: n,
            cap: MAX_TABLE_CARRIER,
        });
    }
    Ok(())
}

/// A carrier with the full table `δ: X × 2^X → [0, ∞]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteApproachSpace {
    carrier: Carrier,
    delta: Vec<Vec<ExtReal>>,
}

impl FiniteApproachSpace {
    /// `delta[x][A.bits()]`. Only the shape is checked; see
    /// [`FiniteApproachSpace::check_axioms`].
    pub fn new(carrier: Carrier, delta: Vec<Vec<ExtReal>>) -> Result<Self> {
        let n = carrier.len();
        check_table_size(n)?;
        if delta.len() != n || delta.iter().any(|r| r.len() != 1 << n) {
            return Err(Error::InvalidSpace(format!(
                "delta table must have {n} rows of {} entries",
                1usize << n
            )));
        }
        Ok(FiniteApproachSpace { carrier, delta })
    }

    /// `δ(x, A) = inf { r : sup_{a ∈ A} α(x, a, r) = 1 }`.
    ///
    /// A finite supremum equals 1 exactly when one of its members does, so
    /// each row is filled by a minimum over the members of `A`.
    pub fn derive(m: &ProbMetricSpace) -> Result<Self> {
        let n = m.len();
        check_table_size(n)?;
        let delta = (0..n)
            .map(|x| {
                let reach: Vec<ExtReal> = m.row(x).iter().map(Distribution::first_reach_one).collect();
                let mut row = vec![ExtReal::INFINITY; 1 << n];
                for bits in 1..(1u32 << n) {
                    let low = bits.trailing_zeros() as usize;
                    row[bits as usize] = row[(bits & (bits - 1)) as usize].min(reach[low]);
                }
                row
            })
            .collect();
        Ok(FiniteApproachSpace {
            carrier: m.carrier().clone(),
            delta,
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

    pub fn delta(&self, x: usize, a: Subset) -> ExtReal {
        self.delta[x][a.bits() as usize]
    }

    pub fn table(&self) -> &[Vec<ExtReal>] {
        &self.delta
    }

    pub fn check_axioms(&self) -> AxiomReport {
        self.check_axioms_capped(DEFAULT_A4_CAP)
    }

    /// A1–A4. A3 and A4 run over all pairs of subsets when the carrier has
    /// at most `cap` points. Above the cap A3 is checked through the
    /// equivalent form `δ(x, A) = min_{a ∈ A} δ(x, {a})` and A4 is reported
    /// as unchecked.
    pub fn check_axioms_capped(&self, cap: usize) -> AxiomReport {
        let n = self.len();
        let c = &self.carrier;
        let subsets = |x: usize, a: Subset, b: Option<Subset>| Witness::Subsets {
            x: c.label(x).into(),
            a: a.labels(c),
            b: b.map(|b| b.labels(c)),
        };
        let mut report = AxiomReport::default();

        let w = (0..n)
            .find(|&x| self.delta(x, Subset::singleton(x)) != ExtReal::ZERO)
            .map(|x| subsets(x, Subset::singleton(x), None));
        report.verdicts.push(Verdict::from_witness("A1", w));

        let w = (0..n)
            .find(|&x| self.delta(x, Subset::EMPTY) != ExtReal::INFINITY)
            .map(|x| subsets(x, Subset::EMPTY, None));
        report.verdicts.push(Verdict::from_witness("A2", w));

        let exhaustive = n <= cap;
        let mut w = None;
        'a3: for x in 0..n {
            if exhaustive {
                for a in Subset::all(n) {
                    for b in Subset::all(n) {
                        if self.delta(x, a.union(b)) != self.delta(x, a).min(self.delta(x, b)) {
                            w = Some(subsets(x, a, Some(b)));
                            break 'a3;
                        }
                    }
                }
            } else {
                for a in Subset::all(n).filter(|a| !a.is_empty()) {
                    let m = a.iter().map(|i| self.delta(x, Subset::singleton(i))).min().expect("non-empty");
                    if self.delta(x, a) != m {
                        w = Some(subsets(x, a, None));
                        break 'a3;
                    }
                }
            }
        }
        let mut v = Verdict::from_witness("A3", w);
        if !exhaustive {
            v = v.with_detail(format!("carrier above {cap} points: checked via singleton minima"));
        }
        report.verdicts.push(v);

        if exhaustive {
            let v = match self.a4_witness() {
                None => Verdict::pass("A4"),
                Some((w, left, right)) => Verdict::fail("A4", Some(w))
                    .with_detail(format!("delta(x, A) = {left} > sup_b delta(b, A) + delta(x, B) = {right}")),
            };
            report.verdicts.push(v);
        } else {
            report
                .unchecked
                .push(format!("A4: carrier of {n} points exceeds the exhaustive cap {cap}"));
        }
        report
    }

    fn a4_witness(&self) -> Option<(Witness, ExtReal, ExtReal)> {
        let n = self.len();
        let size = 1usize << n;
        let mut sup_b = vec![ExtReal::ZERO; size];
        for a in Subset::all(n) {
            // sup_{b ∈ B} δ(b, A) for every B
            for bits in 1..size {
                let low = bits.trailing_zeros() as usize;
                sup_b[bits] = sup_b[bits & (bits - 1)].max(self.delta(low, a));
            }
            for x in 0..n {
                let left = self.delta(x, a);
                for (bits, &s) in sup_b.iter().enumerate() {
                    let b = Subset::from_bits(bits as u32);
                    let right = s + self.delta(x, b);
                    if left > right {
                        let w = Witness::Subsets {
                            x: self.carrier.label(x).into(),
                            a: a.labels(&self.carrier),
                            b: Some(b.labels(&self.carrier)),
                        };
                        return Some((w, left, right));
                    }
                }
            }
        }
        None
    }

    /// `cl(S) = { x : δ(x, S) = 0 }`.
    pub fn closure(&self, s: Subset) -> Subset {
        Subset::from_indices((0..self.len()).filter(|&x| self.delta(x, s) == ExtReal::ZERO))
    }

    /// Whether `A.δ(x, S) ≥ B.δ(f(x), f(S))` for every point and subset.
    pub fn is_contraction(f: &[usize], a: &FiniteApproachSpace, b: &FiniteApproachSpace) -> Result<MapCheck> {
        if f.len() != a.len() {
            return Err(Error::Precondition(format!(
                "map has {} images for a carrier of {} points",
                f.len(),
                a.len()
            )));
        }
        if let Some(&bad) = f.iter().find(|&&y| y >= b.len()) {
            return Err(Error::Precondition(format!("image index {bad} is outside the target")));
        }
        for s in Subset::all(a.len()) {
            let image = Subset::from_indices(s.iter().map(|i| f[i]));
            for x in 0..a.len() {
                let left = a.delta(x, s);
                let right = b.delta(f[x], image);
                if left < right {
                    return Ok(MapCheck::from_witness(Some(Witness::Distances {
                        x: a.carrier.label(x).into(),
                        a: s.labels(&a.carrier),
                        left,
                        right,
                    })));
                }
            }
        }
        Ok(MapCheck::from_witness(None))
    }

    /// The first `(x, A)` where two tables on the same carrier differ.
    pub fn first_difference(&self, other: &FiniteApproachSpace) -> Option<(usize, Subset)> {
        if self.len() != other.len() {
            return Some((0, Subset::EMPTY));
        }
        for x in 0..self.len() {
            for a in Subset::all(self.len()) {
                if self.delta(x, a) != other.delta(x, a) {
                    return Some((x, a));
                }
            }
        }
        None
    }

    /// Reads the table format or a `{"derive_from": path}` directive.
    /// Relative paths are resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if let Some(src) = value.get("derive_from") {
            let src = src
                .as_str()
                .ok_or_else(|| Error::Schema("derive_from must be a path string".into()))?;
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            let space_text = std::fs::read_to_string(base.join(src))?;
            let space: ProbMetricSpace = serde_json::from_str(&space_text)?;
            return FiniteApproachSpace::derive(&space);
        }
        Ok(serde_json::from_value(value)?)
    }
}

/// `δ` of a single point and subset straight from the definition, via the
/// pointwise supremum of the entries.
pub fn delta_by_sup(m: &ProbMetricSpace, x: usize, a: Subset) -> ExtReal {
    let family: Vec<&Distribution> = a.iter().map(|i| m.entry(x, i)).collect();
    Distribution::first_reach_one_of_sup(&family)
}

#[derive(Serialize, Deserialize)]
struct ApproachRecord {
    carrier: Carrier,
    delta: BTreeMap<String, ExtReal>,
}

impl Serialize for FiniteApproachSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut delta = BTreeMap::new();
        for x in 0..self.len() {
            for a in Subset::all(self.len()) {
                delta.insert(
                    format!("{}|{}", self.carrier.label(x), a.display(&self.carrier)),
                    self.delta(x, a),
                );
            }
        }
        ApproachRecord {
            carrier: self.carrier.clone(),
            delta,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteApproachSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = ApproachRecord::deserialize(deserializer)?;
        approach_from_record(rec).map_err(serde::de::Error::custom)
    }
}

fn approach_from_record(rec: ApproachRecord) -> Result<FiniteApproachSpace> {
    let n = rec.carrier.len();
    check_table_size(n)?;
    let mut table: Vec<Vec<Option<ExtReal>>> = vec![vec![None; 1 << n]; n];
    for (key, value) in rec.delta {
        let (x, set) = key
            .split_once('|')
            .ok_or_else(|| Error::Schema(format!("delta key {key:?} is not of the form \"x|{{a,b}}\"")))?;
        if !(set.starts_with('{') && set.ends_with('}')) {
            return Err(Error::Schema(format!("delta key {key:?}: subset must be braced")));
        }
        let x = rec.carrier.index_of(x.trim())?;
        let a = Subset::parse(&rec.carrier, set)?;
        let slot = &mut table[x][a.bits() as usize];
        if slot.is_some_and(|v| v != value) {
            return Err(Error::Schema(format!("delta key {key:?} given twice with different values")));
        }
        *slot = Some(value);
    }
    let mut delta = Vec::with_capacity(n);
    for (x, row) in table.into_iter().enumerate() {
        let mut r = Vec::with_capacity(1 << n);
        for (bits, v) in row.into_iter().enumerate() {
            r.push(v.ok_or_else(|| {
                Error::Schema(format!(
                    "missing delta entry \"{}|{}\"",
                    rec.carrier.label(x),
                    Subset::from_bits(bits as u32).display(&rec.carrier)
                ))
            })?);
        }
        delta.push(r);
    }
    FiniteApproachSpace::new(rec.carrier, delta)
}

impl fmt::Display for FiniteApproachSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 0..self.len() {
            for a in Subset::all(self.len()) {
                writeln!(
                    f,
                    "delta({}, {}) = {}",
                    self.carrier.label(x),
                    a.display(&self.carrier),
                    self.delta(x, a)
                )?;
            }
        }
        Ok(())
    }
}

/// `U_x(t) = { y : α(x, y, t) > 1 − t }`.
pub fn neighborhood(m: &ProbMetricSpace, x: usize, t: f64) -> Result<Subset> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Precondition(format!("neighborhood radius {t} must be positive and finite")));
    }
    check_table_size(m.len())?;
    let r = ExtReal::finite(t);
    Ok(Subset::from_indices(
        (0..m.len()).filter(|&y| m.entry(x, y).evaluate(r) > 1.0 - t),
    ))
}

/// `λ_{x,n}(y) = inf { r : α(x, y, r) > 1 − 1/n }` for every `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaTable {
    pub x: usize,
    pub n: usize,
    pub values: Vec<ExtReal>,
}

fn lambda_threshold(n: usize) -> f64 {
    1.0 - 1.0 / n as f64
}

pub fn lambda_n(m: &ProbMetricSpace, x: usize, n: usize) -> Result<LambdaTable> {
    if n == 0 {
        return Err(Error::Precondition("lambda index n must be at least 1".into()));
    }
    let theta = lambda_threshold(n);
    let values = m
        .row(x)
        .iter()
        .map(|d| d.threshold_inf(theta))
        .collect::<Result<Vec<_>>>()?;
    Ok(LambdaTable { x, n, values })
}

fn step_row<'a>(m: &'a ProbMetricSpace, x: usize, op: &'static str) -> Result<Vec<&'a StepDistribution>> {
    m.row(x).iter().map(|d| d.step_or_err(op)).collect()
}

/// The least `N` with `1 − 1/N` at or above every plateau value below 1 in
/// row `x`. The λ tables for `n ≥ N` all equal the first-reach-one row.
pub fn stabilization_bound(m: &ProbMetricSpace, x: usize) -> Result<usize> {
    let row = step_row(m, x, "stabilization_bound")?;
    let vmax = row
        .iter()
        .flat_map(|s| s.values())
        .filter(|&v| v < 1.0)
        .fold(0.0, f64::max);
    if vmax == 0.0 {
        return Ok(1);
    }
    let mut n = (1.0 / (1.0 - vmax)).ceil().max(1.0) as usize;
    while lambda_threshold(n) < vmax {
        n += 1;
    }
    while n > 1 && lambda_threshold(n - 1) >= vmax {
        n -= 1;
    }
    Ok(n)
}

/// `sup_{n ≥ 1} inf_{a ∈ A} λ_{x,n}(a)`, with the supremum cut at the
/// stabilization bound.
pub fn delta_via_lambda(m: &ProbMetricSpace, x: usize, a: Subset) -> Result<ExtReal> {
    if a.is_empty() {
        return Err(Error::Precondition("delta_via_lambda needs a non-empty subset".into()));
    }
    let big_n = stabilization_bound(m, x)?;
    let mut sup = ExtReal::ZERO;
    for n in 1..=big_n {
        let table = lambda_n(m, x, n)?;
        let inf = a.iter().map(|i| table.values[i]).min().expect("non-empty");
        sup = sup.max(inf);
    }
    Ok(sup)
}

/// The gauge `d_n(x, y) = λ_{x,n}(y)` and its metric checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    pub n: usize,
    pub matrix: Vec<Vec<ExtReal>>,
    pub report: AxiomReport,
}

pub fn gauge_dn(m: &ProbMetricSpace, n: usize) -> Result<Gauge> {
    if !m.tnorm().is_minimum() {
        return Err(Error::Unsupported {
            op: "gauge_dn",
            what: format!(
                "t-norm {}; the gauge triangle inequality is only established under the minimum t-norm",
                m.tnorm()
            ),
        });
    }
    let size = m.len();
    let matrix = (0..size)
        .map(|x| lambda_n(m, x, n).map(|t| t.values))
        .collect::<Result<Vec<_>>>()?;
    let c = m.carrier();
    let pair = |x: usize, y: usize| Witness::Pair {
        x: c.label(x).into(),
        y: c.label(y).into(),
        t: None,
    };
    let mut report = AxiomReport::default();
    let w = (0..size).find(|&x| matrix[x][x] != ExtReal::ZERO).map(|x| pair(x, x));
    report.verdicts.push(Verdict::from_witness("diagonal", w));
    let mut w = None;
    'sym: for x in 0..size {
        for y in (x + 1)..size {
            if matrix[x][y] != matrix[y][x] {
                w = Some(pair(x, y));
                break 'sym;
            }
        }
    }
    report.verdicts.push(Verdict::from_witness("symmetry", w));
    // Exponential entries scale every rate by the same rounded factor, so
    // their triangles only hold up to rounding.
    let tol = if m.is_step() { 0.0 } else { SAMPLED_TOLERANCE };
    let mut w = None;
    'tri: for x in 0..size {
        for y in 0..size {
            for z in 0..size {
                let (left, right) = (matrix[x][z], matrix[y][z] + matrix[x][y]);
                if left > right && (left.is_infinite() || left.get() - right.get() > tol * left.get()) {
                    w = Some(Witness::Distances {
                        x: c.label(x).into(),
                        a: vec![c.label(y).into(), c.label(z).into()],
                        left,
                        right,
                    });
                    break 'tri;
                }
            }
        }
    }
    let mut v = Verdict::from_witness("triangle", w);
    if tol > 0.0 {
        v = v.with_detail(format!("exponential entries, relative tolerance {tol:e}"));
    }
    report.verdicts.push(v);
    Ok(Gauge { n, matrix, report })
}

/// The least `n ≤ N` with `min(φ(y), ω) ≤ λ_{x,n}(y) + ε` for all `y`.
/// `None` means no `n` at all works, since the tables are constant from
/// `N` on.
pub fn dominates(
    m: &ProbMetricSpace,
    x: usize,
    phi: &[ExtReal],
    eps: f64,
    omega: f64,
) -> Result<Option<usize>> {
    if phi.len() != m.len() {
        return Err(Error::Precondition(format!(
            "phi has {} values for a carrier of {} points",
            phi.len(),
            m.len()
        )));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Precondition(format!("eps {eps} must be positive and finite")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Precondition(format!("omega {omega} must be positive and finite")));
    }
    let omega = ExtReal::finite(omega);
    let eps = ExtReal::finite(eps);
    let big_n = stabilization_bound(m, x)?;
    for n in 1..=big_n {
        let table = lambda_n(m, x, n)?;
        if phi
            .iter()
            .zip(&table.values)
            .all(|(&p, &l)| p.min(omega) <= l + eps)
        {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
