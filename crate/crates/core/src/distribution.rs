//! Distance distributions: monotone, left-continuous maps `[0, ∞] → [0, 1]`
//! with `φ(0) = 0` and `φ(∞) = 1`.
//!
//! Two representations are supported. [`StepDistribution`] is an exact
//! finite step function and supports the full algebra, including convolution
//! with respect to a t-norm. [`ExpDistribution`] is the family
//! `φ_r(t) = 1 − e^{−t/r}` and only supports evaluation and the
//! threshold queries that approach distances need.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::tnorm::OrdinalSum;

/// Default cap on the number of candidate plateaus a single convolution may
/// create before it is aborted.
pub const DEFAULT_PLATEAU_CAP: usize = 1_000_000;

/// The largest binary64 value strictly below one.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// A step distance distribution.
///
/// `plateaus[i] = (jump, value)` means `φ(t) = value` for
/// `t ∈ (jump_i, jump_{i+1}]`, with the last plateau running up to (but not
/// including) `∞`. Before the first jump the function is 0. Jumps are finite
/// and strictly increasing, values strictly increasing in `(0, 1]`, so the
/// function is left-continuous by construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepDistribution {
    plateaus: Vec<(f64, f64)>,
}

impl StepDistribution {
    pub fn new(plateaus: Vec<(f64, f64)>) -> Result<Self> {
        let d = StepDistribution { plateaus };
        d.validate()?;
        Ok(d)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let mut prev: Option<(f64, f64)> = None;
        for &(j, v) in &self.plateaus {
            if !(j.is_finite() && j >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "jump {j} is not a finite non-negative real"
                )));
            }
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidDistribution(format!(
                    "plateau value {v} is not in (0, 1]"
                )));
            }
            if let Some((pj, pv)) = prev {
                if j <= pj || v <= pv {
                    return Err(Error::InvalidDistribution(format!(
                        "plateaus ({pj}, {pv}) and ({j}, {v}) are not strictly increasing"
                    )));
                }
            }
            prev = Some((j, v));
        }
        Ok(())
    }

    /// The unit of convolution: 0 at 0 and 1 everywhere else.
    pub fn kappa() -> Self {
        StepDistribution {
            plateaus: vec![(0.0, 1.0)],
        }
    }

    /// The bottom distribution: 0 on `[0, ∞)`, 1 at `∞`.
    pub fn bottom() -> Self {
        StepDistribution::default()
    }

    /// Value 1 on `(at, ∞]`, 0 below. `at = ∞` gives [`StepDistribution::bottom`].
    pub fn single_jump(at: ExtReal) -> Self {
        if at.is_infinite() {
            Self::bottom()
        } else {
            StepDistribution {
                plateaus: vec![(at.get(), 1.0)],
            }
        }
    }

    pub fn plateaus(&self) -> &[(f64, f64)] {
        &self.plateaus
    }

    pub fn jumps(&self) -> impl Iterator<Item = f64> + '_ {
        self.plateaus.iter().map(|p| p.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.plateaus.iter().map(|p| p.1)
    }

    pub fn is_kappa(&self) -> bool {
        self.plateaus == [(0.0, 1.0)]
    }

    pub fn evaluate(&self, t: ExtReal) -> f64 {
        if t.is_infinite() {
            return 1.0;
        }
        let t = t.get();
        // number of jumps strictly below t
        let k = self.plateaus.partition_point(|p| p.0 < t);
        if k == 0 {
            0.0
        } else {
            self.plateaus[k - 1].1
        }
    }

    /// The value on the plateau immediately to the right of `s`, i.e.
    /// `lim_{t↓s} φ(t)`.
    /// The right limit `φ(s⁺)`, the value on the plateau just after `s`.
    pub fn value_after(&self, s: f64) -> f64 {
        let k = self.plateaus.partition_point(|p| p.0 <= s);
        if k == 0 {
            0.0
        } else {
            self.plateaus[k - 1].1
        }
    }

    /// Builds canonical plateaus from `(jump, value)` pairs sorted by jump
    /// with non-decreasing values: zero values dropped, equal values merged
    /// onto the earliest jump, coincident jumps keep the largest value.
    fn canonical(sorted: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (j, v) in sorted {
            let last = out.last().map_or(0.0, |p| p.1);
            if v <= last {
                continue;
            }
            match out.last_mut() {
                Some(p) if p.0 == j => p.1 = v,
                _ => out.push((j, v)),
            }
        }
        StepDistribution { plateaus: out }
    }

    /// Left regularisation `ψ(t) = sup_{s<t} φ(s)` of the right-continuous
    /// step map that takes `value` from `threshold` onwards.
    pub fn left_regularize(points: &[(f64, f64)]) -> Result<Self> {
        let mut prev = (0.0f64, 0.0f64);
        for (i, &(j, v)) in points.iter().enumerate() {
            if !(j.is_finite() && j >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "threshold {j} is not a finite non-negative real"
                )));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::NotUnit { value: v });
            }
            if i > 0 && (j < prev.0 || v < prev.1) {
                return Err(Error::InvalidDistribution(format!(
                    "point ({j}, {v}) after ({}, {}) breaks monotonicity",
                    prev.0, prev.1
                )));
            }
            prev = (j, v);
        }
        Ok(Self::canonical(points.iter().copied()))
    }

    /// Applies `f` to the stored plateau values. The leading zero segment
    /// `(0, jump_1]` is left at zero.
    ///
    /// `f` must be monotone on the values it sees and send 1 to exactly 1.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.map_impl(&f, false)
    }

    /// Applies `f` to the whole function on `(0, ∞)`, including the implicit
    /// zero segment before the first jump, so that segment becomes `f(0)`.
    /// `φ(0) = 0` is kept.
    pub fn compose_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.map_impl(&f, true)
    }

    fn map_impl(&self, f: &dyn Fn(f64) -> f64, include_zero: bool) -> Result<Self> {
        if f(1.0) != 1.0 {
            return Err(Error::Precondition(format!(
                "value map must send 1 to 1, got {}",
                f(1.0)
            )));
        }
        let mut mapped = Vec::with_capacity(self.plateaus.len() + 1);
        let starts_at_zero = self.plateaus.first().is_some_and(|p| p.0 == 0.0);
        if include_zero && !starts_at_zero {
            mapped.push((0.0, check_mapped(f(0.0), 0.0)?));
        }
        for &(j, v) in &self.plateaus {
            mapped.push((j, check_mapped(f(v), v)?));
        }
        if let Some(w) = mapped.windows(2).find(|w| w[1].1 < w[0].1) {
            return Err(Error::Precondition(format!(
                "value map is not monotone: {} then {}",
                w[0].1, w[1].1
            )));
        }
        Ok(Self::canonical(mapped))
    }

    /// Convolution `(φ ⊗ ψ)(t) = sup_{r+s=t} φ(r) * ψ(s)` for finite `t`.
    pub fn convolve(&self, other: &StepDistribution, t: &OrdinalSum) -> Result<Self> {
        self.convolve_capped(other, t, DEFAULT_PLATEAU_CAP)
    }

    pub fn convolve_capped(
        &self,
        other: &StepDistribution,
        t: &OrdinalSum,
        cap: usize,
    ) -> Result<Self> {
        let size = self.plateaus.len() * other.plateaus.len();
        if size > cap {
            return Err(Error::SizeCap { size, cap });
        }
        // A pair of plateaus is available at radius t exactly when t exceeds
        // the sum of their jumps, so each output plateau starts at a sum.
        let mut candidates = Vec::with_capacity(size);
        for &(j, v) in &self.plateaus {
            for &(k, w) in &other.plateaus {
                candidates.push((j + k, t.eval(v, w)));
            }
        }
        candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut running = 0.0f64;
        let accumulated = candidates.into_iter().map(|(s, v)| {
            running = running.max(v);
            (s, running)
        });
        Ok(Self::canonical(accumulated))
    }

    /// `inf { r : φ(r) = 1 }`.
    pub fn first_reach_one(&self) -> ExtReal {
        match self.plateaus.last() {
            Some(&(j, 1.0)) => ExtReal::finite(j),
            _ => ExtReal::INFINITY,
        }
    }

    /// `inf { r : φ(r) > θ }` for `θ ∈ [0, 1)`.
    pub fn threshold_inf(&self, theta: f64) -> Result<ExtReal> {
        check_threshold(theta)?;
        Ok(self
            .plateaus
            .iter()
            .find(|p| p.1 > theta)
            .map_or(ExtReal::INFINITY, |p| ExtReal::finite(p.0)))
    }

    /// Exact pointwise order, decided on the merged jump set.
    pub fn leq(&self, other: &StepDistribution) -> bool {
        self.first_violation(other).is_none()
    }

    /// Some `t` with `self(t) > other(t)`, if there is one.
    pub fn first_violation(&self, other: &StepDistribution) -> Option<f64> {
        let mut jumps: Vec<f64> = self.jumps().chain(other.jumps()).collect();
        jumps.sort_by(f64::total_cmp);
        jumps.dedup();
        for (i, &j) in jumps.iter().enumerate() {
            if self.value_after(j) > other.value_after(j) {
                // both functions are constant on (j, next]
                return Some(jumps.get(i + 1).copied().unwrap_or(j + 1.0));
            }
        }
        None
    }

    /// Exact pointwise supremum of a finite family. The empty family gives
    /// the bottom distribution.
    pub fn sup<'a>(family: impl IntoIterator<Item = &'a StepDistribution>) -> Self {
        let members: Vec<&StepDistribution> = family.into_iter().collect();
        let mut jumps: Vec<f64> = members.iter().flat_map(|m| m.jumps()).collect();
        jumps.sort_by(f64::total_cmp);
        jumps.dedup();
        Self::canonical(jumps.into_iter().map(|j| {
            let v = members.iter().map(|m| m.value_after(j)).fold(0.0, f64::max);
            (j, v)
        }))
    }
}

fn check_mapped(y: f64, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&y) {
        Ok(y)
    } else {
        Err(Error::Precondition(format!(
            "value map sent {x} to {y}, outside [0, 1]"
        )))
    }
}

fn check_threshold(theta: f64) -> Result<()> {
    if (0.0..1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "threshold {theta} must lie in [0, 1); use first_reach_one for 1"
        )))
    }
}

/// The exponential family `φ_r(t) = 1 − e^{−t/r}`; rate 0 is κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpDistribution {
    rate: ExtReal,
}

impl ExpDistribution {
    pub fn new(rate: ExtReal) -> Self {
        ExpDistribution { rate }
    }

    pub fn rate(&self) -> ExtReal {
        self.rate
    }

    /// Finite arguments never evaluate to 1 unless the rate is 0; values
    /// that would round up to 1 are held just below it.
    pub fn evaluate(&self, t: ExtReal) -> f64 {
        if t.is_infinite() {
            return 1.0;
        }
        let t = t.get();
        if t == 0.0 {
            return 0.0;
        }
        let r = self.rate.get();
        if r == 0.0 {
            return 1.0;
        }
        if r.is_infinite() {
            return 0.0;
        }
        (-(-t / r).exp_m1()).min(BELOW_ONE)
    }

    pub fn first_reach_one(&self) -> ExtReal {
        if self.rate == ExtReal::ZERO {
            ExtReal::ZERO
        } else {
            ExtReal::INFINITY
        }
    }

    pub fn threshold_inf(&self, theta: f64) -> Result<ExtReal> {
        check_threshold(theta)?;
        let r = self.rate.get();
        if r == 0.0 {
            return Ok(ExtReal::ZERO);
        }
        if r.is_infinite() {
            return Ok(ExtReal::INFINITY);
        }
        ExtReal::new(-r * (-theta).ln_1p())
    }
}

/// Either representation of a distance distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Step(StepDistribution),
    Exp(ExpDistribution),
}

impl Distribution {
    pub fn kappa() -> Self {
        Distribution::Step(StepDistribution::kappa())
    }

    pub fn exp(rate: ExtReal) -> Self {
        Distribution::Exp(ExpDistribution::new(rate))
    }

    pub fn as_step(&self) -> Option<&StepDistribution> {
        match self {
            Distribution::Step(s) => Some(s),
            Distribution::Exp(_) => None,
        }
    }

    pub fn is_step(&self) -> bool {
        matches!(self, Distribution::Step(_))
    }

    pub fn is_kappa(&self) -> bool {
        match self {
            Distribution::Step(s) => s.is_kappa(),
            Distribution::Exp(e) => e.rate == ExtReal::ZERO,
        }
    }

    pub fn evaluate(&self, t: ExtReal) -> f64 {
        match self {
            Distribution::Step(s) => s.evaluate(t),
            Distribution::Exp(e) => e.evaluate(t),
        }
    }

    /// The right limit `φ(t⁺)` at a finite `t`.
    pub fn value_after(&self, t: f64) -> f64 {
        match self {
            Distribution::Step(s) => s.value_after(t),
            Distribution::Exp(e) if e.rate == ExtReal::ZERO => 1.0,
            Distribution::Exp(e) => e.evaluate(ExtReal::finite(t)),
        }
    }

    pub fn first_reach_one(&self) -> ExtReal {
        match self {
            Distribution::Step(s) => s.first_reach_one(),
            Distribution::Exp(e) => e.first_reach_one(),
        }
    }

    pub fn threshold_inf(&self, theta: f64) -> Result<ExtReal> {
        match self {
            Distribution::Step(s) => s.threshold_inf(theta),
            Distribution::Exp(e) => e.threshold_inf(theta),
        }
    }

    pub fn step_or_err(&self, op: &'static str) -> Result<&StepDistribution> {
        self.as_step().ok_or_else(|| Error::Unsupported {
            op,
            what: "exponential distributions".into(),
        })
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Distribution> {
        Ok(Distribution::Step(self.step_or_err("map_values")?.map_values(f)?))
    }

    pub fn convolve(&self, other: &Distribution, t: &OrdinalSum) -> Result<Distribution> {
        let a = self.step_or_err("convolve")?;
        let b = other.step_or_err("convolve")?;
        Ok(Distribution::Step(a.convolve(b, t)?))
    }

    /// Pointwise supremum of a non-empty family of one representation.
    /// Exponentials reduce to the member with the smallest rate.
    pub fn pointwise_sup(family: &[Distribution]) -> Result<Distribution> {
        if family.is_empty() {
            return Err(Error::Precondition("supremum of an empty family".into()));
        }
        if family.iter().all(Distribution::is_step) {
            let sup = StepDistribution::sup(family.iter().filter_map(Distribution::as_step));
            return Ok(Distribution::Step(sup));
        }
        let rates: Option<Vec<ExtReal>> = family
            .iter()
            .map(|d| match d {
                Distribution::Exp(e) => Some(e.rate),
                Distribution::Step(_) => None,
            })
            .collect();
        match rates {
            Some(rates) => Ok(Distribution::exp(rates.into_iter().min().expect("non-empty"))),
            None => Err(Error::Unsupported {
                op: "pointwise_sup",
                what: "a family mixing step and exponential distributions".into(),
            }),
        }
    }

    /// `inf { r : sup_i φ_i(r) = 1 }` for a finite family, which may mix
    /// representations. Empty families give `∞`.
    pub fn first_reach_one_of_sup(family: &[&Distribution]) -> ExtReal {
        let steps: Vec<Distribution> = family
            .iter()
            .filter(|d| d.is_step())
            .map(|d| (*d).clone())
            .collect();
        let exps: Vec<Distribution> = family
            .iter()
            .filter(|d| !d.is_step())
            .map(|d| (*d).clone())
            .collect();
        [steps, exps]
            .iter()
            .filter(|g| !g.is_empty())
            .map(|g| {
                Distribution::pointwise_sup(g)
                    .expect("homogeneous family")
                    .first_reach_one()
            })
            .min()
            .unwrap_or(ExtReal::INFINITY)
    }

    pub fn leq(&self, other: &Distribution) -> bool {
        self.first_violation(other).is_none()
    }

    /// Some finite `t > 0` with `self(t) > other(t)`, decided in closed form
    /// for every combination of representations.
    pub fn first_violation(&self, other: &Distribution) -> Option<f64> {
        match (self, other) {
            (Distribution::Step(a), Distribution::Step(b)) => a.first_violation(b),
            (Distribution::Exp(a), Distribution::Exp(b)) => {
                // φ_r decreases in r
                (a.rate < b.rate).then(|| if a.rate.is_finite() && a.rate.get() > 0.0 { a.rate.get() } else { 1.0 })
            }
            (Distribution::Step(a), Distribution::Exp(b)) => step_below_exp(a, b),
            (Distribution::Exp(a), Distribution::Step(b)) => exp_below_step(a, b),
        }
    }
}

/// Violation of `step ≤ exp`.
fn step_below_exp(s: &StepDistribution, e: &ExpDistribution) -> Option<f64> {
    let r = e.rate.get();
    if r == 0.0 {
        return None;
    }
    let p = &s.plateaus;
    for (i, &(j, v)) in p.iter().enumerate() {
        let next = p.get(i + 1).map_or(f64::INFINITY, |q| q.0);
        // exp is continuous and increasing, so its infimum on (j, next] is exp(j)
        let floor = e.evaluate(ExtReal::finite(j));
        if v > floor {
            let cross = if r.is_infinite() { f64::INFINITY } else { -r * (-v).ln_1p() };
            let upper = cross.min(next);
            return Some(if upper.is_finite() { 0.5 * (j + upper) } else { j + 1.0 });
        }
    }
    None
}

/// Violation of `exp ≤ step`.
fn exp_below_step(e: &ExpDistribution, s: &StepDistribution) -> Option<f64> {
    let r = e.rate.get();
    if r.is_infinite() {
        return None;
    }
    let p = &s.plateaus;
    match p.first() {
        Some(&(0.0, _)) => {}
        Some(&(j, _)) => return Some(j),
        None => return Some(1.0),
    }
    if r == 0.0 {
        return (!s.is_kappa()).then(|| p.get(1).map_or(1.0, |q| q.0));
    }
    for (i, &(_, v)) in p.iter().enumerate() {
        match p.get(i + 1) {
            Some(&(next, _)) => {
                if e.evaluate(ExtReal::finite(next)) > v {
                    return Some(next);
                }
            }
            None => {
                if v < 1.0 {
                    let cross = -r * (-v).ln_1p();
                    return Some(2.0 * cross.max(p[i].0) + 1.0);
                }
            }
        }
    }
    None
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Step(s) if s.is_kappa() => f.write_str("kappa"),
            Distribution::Step(s) => {
                let parts: Vec<String> = s.plateaus.iter().map(|(j, v)| format!("({j}, {v})")).collect();
                write!(f, "step[{}]", parts.join(", "))
            }
            Distribution::Exp(e) => write!(f, "exp(rate {})", e.rate),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DistributionRecord {
    Name(String),
    Step { plateaus: Vec<(f64, f64)> },
    Exp { exp_rate: ExtReal },
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distribution::Step(s) => DistributionRecord::Step {
                plateaus: s.plateaus.clone(),
            },
            Distribution::Exp(e) => DistributionRecord::Exp { exp_rate: e.rate },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match DistributionRecord::deserialize(deserializer)? {
            DistributionRecord::Name(n) if n == "kappa" => Ok(Distribution::kappa()),
            DistributionRecord::Name(n) => Err(D::Error::custom(format!(
                "unknown distribution name {n:?}; only \"kappa\" is predefined"
            ))),
            DistributionRecord::Step { plateaus } => StepDistribution::new(plateaus)
                .map(Distribution::Step)
                .map_err(D::Error::custom),
            DistributionRecord::Exp { exp_rate } => Ok(Distribution::exp(exp_rate)),
        }
    }
}
