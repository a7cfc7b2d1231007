//! Continuous t-norms on `[0, 1]` represented as finite ordinal sums.
//!
//! An [`OrdinalSum`] is a sorted list of disjoint open intervals `(a, b)`,
//! each carrying a product or Łukasiewicz norm transported affinely onto
//! `[a, b]`. Outside those intervals the operation is the minimum, so the
//! empty sum is the minimum t-norm. The idempotent elements are exactly the
//! points not covered by any open interval.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::report::{AxiomReport, Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Archetype {
    /// Only meaningful as the ambient norm; never an interval tag.
    Minimum,
    Product,
    Lukasiewicz,
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Archetype::Minimum => "minimum",
            Archetype::Product => "product",
            Archetype::Lukasiewicz => "lukasiewicz",
        })
    }
}

pub(crate) fn check_unit(v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v + 0.0)
    } else {
        Err(Error::NotUnit { value: v })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrdinalInterval {
    a: f64,
    b: f64,
    archetype: Archetype,
}

impl OrdinalInterval {
    pub fn new(a: f64, b: f64, archetype: Archetype) -> Result<Self> {
        let a = check_unit(a)?;
        let b = check_unit(b)?;
        if a >= b {
            return Err(Error::InvalidTNorm(format!("interval ({a}, {b}) is empty")));
        }
        if archetype == Archetype::Minimum {
            return Err(Error::InvalidTNorm(
                "the minimum archetype cannot tag an interval".into(),
            ));
        }
        Ok(OrdinalInterval { a, b, archetype })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn archetype(&self) -> Archetype {
        self.archetype
    }

    fn contains_open(&self, q: f64) -> bool {
        self.a < q && q < self.b
    }

    /// Both arguments must lie in the open interval.
    fn eval_inside(&self, p: f64, q: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        let raw = match self.archetype {
            Archetype::Product => {
                let w = b - a;
                a + w * (((p - a) / w) * ((q - a) / w))
            }
            Archetype::Lukasiewicz => a.max(p + q - b),
            Archetype::Minimum => unreachable!("rejected at construction"),
        };
        raw.max(a).min(p.min(q))
    }

    /// The affine order isomorphism `[a, 1] → [0, 1]` that carries the
    /// restricted norm onto the bare archetype. Only defined when `b = 1`.
    pub fn transported_iso(&self) -> Result<AffineIso> {
        if self.b != 1.0 {
            return Err(Error::Precondition(format!(
                "transport needs an interval ending at 1, got ({}, {})",
                self.a, self.b
            )));
        }
        Ok(AffineIso { a: self.a })
    }
}

/// `x ↦ (x − a)/(1 − a)` on `[a, 1]` and its inverse. Both maps send 1 to 1
/// exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineIso {
    a: f64,
}

impl AffineIso {
    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn forward(&self, x: f64) -> f64 {
        if x == 1.0 {
            return 1.0;
        }
        ((x - self.a) / (1.0 - self.a)).clamp(0.0, 1.0)
    }

    pub fn backward(&self, y: f64) -> f64 {
        if y == 1.0 {
            return 1.0;
        }
        (self.a + (1.0 - self.a) * y).clamp(self.a, 1.0)
    }
}

/// A continuous t-norm given as a finite ordinal sum of product and
/// Łukasiewicz summands.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrdinalSum {
    intervals: Vec<OrdinalInterval>,
}

impl OrdinalSum {
    /// Sorts the intervals and rejects overlapping interiors. Touching
    /// endpoints are allowed.
    pub fn new(mut intervals: Vec<OrdinalInterval>) -> Result<Self> {
        intervals.sort_by(|x, y| x.a.total_cmp(&y.a));
        for w in intervals.windows(2) {
            if w[0].b > w[1].a {
                return Err(Error::InvalidTNorm(format!(
                    "intervals ({}, {}) and ({}, {}) overlap",
                    w[0].a, w[0].b, w[1].a, w[1].b
                )));
            }
        }
        Ok(OrdinalSum { intervals })
    }

    pub fn minimum() -> Self {
        OrdinalSum::default()
    }

    pub fn product() -> Self {
        Self::archetype(Archetype::Product)
    }

    pub fn lukasiewicz() -> Self {
        Self::archetype(Archetype::Lukasiewicz)
    }

    /// The bare archetype on `[0, 1]`.
    pub fn archetype(archetype: Archetype) -> Self {
        match archetype {
            Archetype::Minimum => Self::minimum(),
            other => OrdinalSum {
                intervals: vec![OrdinalInterval {
                    a: 0.0,
                    b: 1.0,
                    archetype: other,
                }],
            },
        }
    }

    pub fn intervals(&self) -> &[OrdinalInterval] {
        &self.intervals
    }

    pub fn is_minimum(&self) -> bool {
        self.intervals.is_empty()
    }

    fn interval_of(&self, q: f64) -> Option<&OrdinalInterval> {
        self.intervals.iter().find(|i| i.contains_open(q))
    }

    /// `p * q`. Arguments are expected in `[0, 1]`.
    pub fn eval(&self, p: f64, q: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
        if let Some(i) = self.interval_of(p) {
            if i.contains_open(q) {
                return i.eval_inside(p, q);
            }
        }
        p.min(q)
    }

    pub fn is_idempotent(&self, q: f64) -> bool {
        self.interval_of(q).is_none()
    }

    /// `q⁻`, the largest idempotent element not above `q`.
    pub fn idempotent_floor(&self, q: f64) -> f64 {
        match self.interval_of(q) {
            Some(i) => i.a,
            None => q,
        }
    }

    /// The supremum of the idempotents in `[0, 1)`.
    pub fn k_star(&self) -> f64 {
        match self.intervals.last() {
            Some(last) if last.b == 1.0 => last.a,
            _ => 1.0,
        }
    }

    /// The summand `(k*, 1)` when `k* < 1`.
    pub fn tail_interval(&self) -> Option<&OrdinalInterval> {
        self.intervals.last().filter(|i| i.b == 1.0)
    }

    /// A short human-readable form, e.g. `[(0.2,0.8,lukasiewicz)]` or `min`.
    pub fn label(&self) -> String {
        if self.is_minimum() {
            return "min".into();
        }
        if self.intervals.len() == 1 && self.intervals[0].a == 0.0 && self.intervals[0].b == 1.0 {
            return self.intervals[0].archetype.to_string();
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|i| format!("({},{},{})", i.a, i.b, i.archetype))
            .collect();
        format!("[{}]", parts.join(","))
    }

    /// Parses a shorthand name: `min`, `product` or `lukasiewicz`.
    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "min" | "minimum" => Some(Self::minimum()),
            "product" | "prod" => Some(Self::product()),
            "lukasiewicz" | "luk" | "łukasiewicz" => Some(Self::lukasiewicz()),
            _ => None,
        }
    }
}

impl fmt::Display for OrdinalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRecord {
    a: f64,
    b: f64,
    archetype: Archetype,
}

#[derive(Serialize, Deserialize)]
struct DescriptorRecord {
    intervals: Vec<IntervalRecord>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DescriptorInput {
    Name(String),
    Full(DescriptorRecord),
}

impl Serialize for OrdinalSum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DescriptorRecord {
            intervals: self
                .intervals
                .iter()
                .map(|i| IntervalRecord {
                    a: i.a,
                    b: i.b,
                    archetype: i.archetype,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrdinalSum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match DescriptorInput::deserialize(deserializer)? {
            DescriptorInput::Name(n) => OrdinalSum::from_name(&n)
                .ok_or_else(|| D::Error::custom(format!("unknown t-norm name {n:?}"))),
            DescriptorInput::Full(rec) => {
                let intervals = rec
                    .intervals
                    .into_iter()
                    .map(|r| OrdinalInterval::new(r.a, r.b, r.archetype))
                    .collect::<Result<Vec<_>>>()
                    .map_err(D::Error::custom)?;
                OrdinalSum::new(intervals).map_err(D::Error::custom)
            }
        }
    }
}

fn linspace(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Grid points plus every interval endpoint, sorted and deduplicated.
fn grid_with_endpoints(t: &OrdinalSum, n: usize) -> Vec<f64> {
    let mut g = linspace(n);
    for i in &t.intervals {
        g.push(i.a);
        g.push(i.b);
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Side of the associativity cube in [`verify_properties`].
pub const ASSOCIATIVITY_SIDE: usize = 50;

/// Runs the algebraic property suite: commutativity, associativity,
/// monotonicity, the unit law, min-behaviour at idempotents, the floor
/// identity `(p*q)⁻ = min(p⁻, q⁻)` and the characterisation of `k*`.
///
/// `grid` is the side length for the pairwise checks; associativity runs on
/// `min(grid, 50)³` triples.
pub fn verify_properties(t: &OrdinalSum, grid: usize) -> AxiomReport {
    let g = linspace(grid.clamp(2, ASSOCIATIVITY_SIDE));
    let ge = grid_with_endpoints(t, grid.max(2));
    let vals = |v: &[f64]| Some(Witness::Values { values: v.to_vec() });
    let mut report = AxiomReport::default();

    let mut w = None;
    'comm: for &p in &ge {
        for &q in &ge {
            if t.eval(p, q) != t.eval(q, p) {
                w = vals(&[p, q]);
                break 'comm;
            }
        }
    }
    report.verdicts.push(Verdict::from_witness("commutativity", w));

    let mut w = None;
    'assoc: for &p in &g {
        for &q in &g {
            let pq = t.eval(p, q);
            for &r in &g {
                let lhs = t.eval(pq, r);
                let rhs = t.eval(p, t.eval(q, r));
                if (lhs - rhs).abs() > 1e-12 {
                    w = vals(&[p, q, r]);
                    break 'assoc;
                }
            }
        }
    }
    report
        .verdicts
        .push(Verdict::from_witness("associativity", w).with_detail("tolerance 1e-12"));

    let mut w = None;
    'mono: for (i, &p) in ge.iter().enumerate() {
        for (j, &q) in ge.iter().enumerate() {
            let here = t.eval(p, q);
            if i + 1 < ge.len() && here > t.eval(ge[i + 1], q) + 1e-15 {
                w = vals(&[p, ge[i + 1], q]);
                break 'mono;
            }
            if j + 1 < ge.len() && here > t.eval(p, ge[j + 1]) + 1e-15 {
                w = vals(&[p, q, ge[j + 1]]);
                break 'mono;
            }
        }
    }
    report.verdicts.push(Verdict::from_witness("monotonicity", w));

    let w = ge
        .iter()
        .find(|&&q| t.eval(1.0, q) != q || t.eval(q, 1.0) != q)
        .map(|&q| Witness::Values { values: vec![1.0, q] });
    report.verdicts.push(Verdict::from_witness("unit", w));

    let mut w = None;
    for &q in &ge {
        if t.is_idempotent(q) != (t.eval(q, q) == q) {
            w = vals(&[q]);
            break;
        }
    }
    report
        .verdicts
        .push(Verdict::from_witness("idempotent_set", w));

    let mut w = None;
    'idem: for &q in ge.iter().filter(|&&q| t.is_idempotent(q)) {
        for &p in &ge {
            if t.eval(p, q) != p.min(q) {
                w = vals(&[p, q]);
                break 'idem;
            }
        }
    }
    report
        .verdicts
        .push(Verdict::from_witness("idempotent_acts_as_min", w));

    let mut w = None;
    'wedge: for &p in &ge {
        for &q in &ge {
            let lhs = t.idempotent_floor(t.eval(p, q));
            let rhs = t.idempotent_floor(p).min(t.idempotent_floor(q));
            if lhs != rhs {
                w = vals(&[p, q]);
                break 'wedge;
            }
        }
    }
    report
        .verdicts
        .push(Verdict::from_witness("floor_of_product", w));

    let k = t.k_star();
    let mut w = if t.is_idempotent(k) { None } else { vals(&[k]) };
    if w.is_none() {
        w = ge
            .iter()
            .find(|&&q| q > k && q < 1.0 && t.is_idempotent(q))
            .map(|&q| Witness::Values { values: vec![k, q] });
    }
    report.verdicts.push(Verdict::from_witness("k_star", w));

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn luk_mid() -> OrdinalSum {
        OrdinalSum::new(vec![OrdinalInterval::new(0.2, 0.8, Archetype::Lukasiewicz).unwrap()]).unwrap()
    }

    fn prod_tail(a: f64) -> OrdinalSum {
        OrdinalSum::new(vec![OrdinalInterval::new(a, 1.0, Archetype::Product).unwrap()]).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(OrdinalSum::minimum().eval(0.3, 0.7), 0.3);
        assert_eq!(luk_mid().eval(0.5, 0.5), 0.2);
        for t in [OrdinalSum::minimum(), OrdinalSum::product(), luk_mid(), prod_tail(0.3)] {
            for q in [0.0, 0.1, 0.25, 0.5, 0.77, 1.0] {
                assert_eq!(t.eval(1.0, q), q);
                assert_eq!(t.eval(q, 1.0), q);
            }
        }
        assert_eq!(OrdinalSum::product().eval(0.5, 0.5), 0.25);
        assert_eq!(OrdinalSum::lukasiewicz().eval(0.25, 0.5), 0.0);
        // one argument inside, the other outside the interval: minimum
        assert_eq!(luk_mid().eval(0.5, 0.9), 0.5);
    }

    #[test]
    fn idempotent_examples() {
        assert!(OrdinalSum::minimum().is_idempotent(0.5));
        assert!(!OrdinalSum::product().is_idempotent(0.5));
        assert!(luk_mid().is_idempotent(0.8));
        assert!(luk_mid().is_idempotent(0.2));
        assert!(!luk_mid().is_idempotent(0.5));
    }

    #[test]
    fn floor_examples() {
        assert_eq!(OrdinalSum::minimum().idempotent_floor(0.7), 0.7);
        assert_eq!(OrdinalSum::product().idempotent_floor(0.5), 0.0);
        assert_eq!(luk_mid().idempotent_floor(0.9), 0.9);
        assert_eq!(luk_mid().idempotent_floor(0.5), 0.2);
        assert_eq!(OrdinalSum::product().idempotent_floor(1.0), 1.0);
    }

    #[test]
    fn k_star_examples() {
        assert_eq!(OrdinalSum::minimum().k_star(), 1.0);
        assert_eq!(OrdinalSum::product().k_star(), 0.0);
        assert_eq!(prod_tail(0.2).k_star(), 0.2);
        assert_eq!(luk_mid().k_star(), 1.0);
    }

    #[test]
    fn transported_iso_examples() {
        let id = OrdinalInterval::new(0.0, 1.0, Archetype::Product).unwrap().transported_iso().unwrap();
        for x in [0.0, 0.3, 0.75, 1.0] {
            assert_eq!(id.forward(x), x);
        }
        let iso = OrdinalInterval::new(0.5, 1.0, Archetype::Product).unwrap().transported_iso().unwrap();
        assert_eq!(iso.forward(0.75), 0.5);
        assert_eq!(iso.backward(0.5), 0.75);
        assert_eq!(iso.forward(1.0), 1.0);
        assert_eq!(iso.backward(1.0), 1.0);
        assert!(OrdinalInterval::new(0.2, 0.8, Archetype::Product).unwrap().transported_iso().is_err());
    }

    #[test]
    fn transported_iso_inverts_and_carries_the_norm() {
        for (a, arch) in [(0.0, Archetype::Product), (0.1, Archetype::Product), (0.3, Archetype::Lukasiewicz), (0.77, Archetype::Lukasiewicz)] {
            let interval = OrdinalInterval::new(a, 1.0, arch).unwrap();
            let iso = interval.transported_iso().unwrap();
            let t1 = OrdinalSum::new(vec![interval]).unwrap();
            let t2 = OrdinalSum::archetype(arch);
            let mut prev = -1.0;
            for i in 0..=1000 {
                let x = a + (1.0 - a) * i as f64 / 1000.0;
                let y = iso.forward(x);
                assert!(y >= prev);
                prev = y;
                assert!((iso.backward(y) - x).abs() <= 1e-12);
            }
            for i in 0..=40 {
                for j in 0..=40 {
                    let p = a + (1.0 - a) * i as f64 / 40.0;
                    let q = a + (1.0 - a) * j as f64 / 40.0;
                    let lhs = iso.forward(t1.eval(p, q));
                    let rhs = t2.eval(iso.forward(p), iso.forward(q));
                    assert!((lhs - rhs).abs() <= 1e-12, "{a} {p} {q}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(OrdinalInterval::new(0.5, 0.5, Archetype::Product).is_err());
        assert!(OrdinalInterval::new(0.0, 1.5, Archetype::Product).is_err());
        assert!(OrdinalInterval::new(0.0, 0.5, Archetype::Minimum).is_err());
        let a = OrdinalInterval::new(0.1, 0.5, Archetype::Product).unwrap();
        let b = OrdinalInterval::new(0.4, 0.9, Archetype::Product).unwrap();
        assert!(OrdinalSum::new(vec![a, b]).is_err());
        let c = OrdinalInterval::new(0.5, 0.9, Archetype::Lukasiewicz).unwrap();
        let touching = OrdinalSum::new(vec![c, a]).unwrap();
        assert_eq!(touching.intervals()[0].a(), 0.1);
        assert!(touching.is_idempotent(0.5));
    }

    #[test]
    fn descriptor_json() {
        let t: OrdinalSum =
            serde_json::from_str(r#"{"intervals":[{"a":0.2,"b":1.0,"archetype":"product"}]}"#).unwrap();
        assert_eq!(t, prod_tail(0.2));
        let m: OrdinalSum = serde_json::from_str(r#""min""#).unwrap();
        assert!(m.is_minimum());
        let l: OrdinalSum = serde_json::from_str(r#""lukasiewicz""#).unwrap();
        assert_eq!(l, OrdinalSum::lukasiewicz());
        let empty: OrdinalSum = serde_json::from_str(r#"{"intervals":[]}"#).unwrap();
        assert!(empty.is_minimum());
        let back: OrdinalSum = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<OrdinalSum>(r#""hamacher""#).is_err());
    }

    #[test]
    fn property_suite_passes_on_examples() {
        let two = OrdinalSum::new(vec![
            OrdinalInterval::new(0.1, 0.4, Archetype::Product).unwrap(),
            OrdinalInterval::new(0.4, 1.0, Archetype::Lukasiewicz).unwrap(),
        ])
        .unwrap();
        for t in [OrdinalSum::minimum(), OrdinalSum::product(), OrdinalSum::lukasiewicz(), luk_mid(), prod_tail(0.3), two] {
            let r = verify_properties(&t, 30);
            assert!(r.all_passed(), "{t}: {}", r.render());
        }
    }
}
