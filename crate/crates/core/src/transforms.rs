//! Re-metrization transforms between t-norms.
//!
//! Every transform returns a [`TransformReport`] that re-checks the axioms
//! of its output and compares the derived approach structures of input and
//! output over all points and subsets.

use serde::{Deserialize, Serialize};

use crate::approach::{FiniteApproachSpace, Subset};
use crate::distribution::{Distribution, StepDistribution};
use crate::error::{Error, Result};
use crate::probmetric::ProbMetricSpace;
use crate::report::{AxiomReport, Witness};
use crate::tnorm::{AffineIso, Archetype, OrdinalSum};

/// Carried by every classification report.
pub const FINITE_CARRIER_CAVEAT: &str = "finite carrier: the minimum-t-norm certificate always succeeds here, \
so a space that is product-metrizable without being minimum-metrizable cannot be exhibited";

/// Largest pointwise raise accepted from the rounding repair.
pub const REPAIR_LIMIT: f64 = 1e-12;

const PROJECTION_NOTE: &str = "k* < 1: delta preservation rests on the carrier being finite \
(a finite supremum equals 1 only through a value equal to 1, and 1 is idempotent)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub output_tnorm: OrdinalSum,
    pub axioms_passed: bool,
    pub delta_preserved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub stages: Vec<Stage>,
    pub input_tnorm: OrdinalSum,
    pub output_tnorm: OrdinalSum,
    pub output: ProbMetricSpace,
    pub axioms: AxiomReport,
    pub delta_preserved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TransformReport {
    pub fn passed(&self) -> bool {
        self.axioms.all_passed() && self.delta_preserved
    }

    /// Text summary for terminal output.
    pub fn render(&self) -> String {
        let mut out = format!("{} -> {}\n", self.input_tnorm, self.output_tnorm);
        for s in &self.stages {
            out.push_str(&format!(
                "  stage {:<22} -> {:<28} axioms {}  delta {}\n",
                s.name,
                s.output_tnorm.to_string(),
                if s.axioms_passed { "pass" } else { "FAIL" },
                if s.delta_preserved { "preserved" } else { "CHANGED" },
            ));
        }
        out.push_str(&self.axioms.render());
        out.push_str(&format!(
            "  {:<28} {}",
            "delta preserved",
            if self.delta_preserved { "pass" } else { "FAIL" }
        ));
        if let Some(w) = &self.delta_witness {
            out.push_str(&format!("  witness: {}", serde_json::to_string(w).unwrap_or_default()));
        }
        out.push('\n');
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

fn require_valid(m: &ProbMetricSpace, t: &OrdinalSum, op: &str) -> Result<()> {
    let report = m.retag(t.clone()).check_axioms();
    if report.all_passed() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{op}: input is not a probabilistic metric space for {t}:\n{}",
            report.render()
        )))
    }
}

fn require_steps(m: &ProbMetricSpace, op: &'static str) -> Result<()> {
    if let Some(d) = m.matrix().iter().flatten().find(|d| !d.is_step()) {
        d.step_or_err(op)?;
    }
    Ok(())
}

fn delta_comparison(input: &ProbMetricSpace, output: &ProbMetricSpace) -> Result<(bool, Option<Witness>)> {
    let a = FiniteApproachSpace::derive(input)?;
    let b = FiniteApproachSpace::derive(output)?;
    Ok(match a.first_difference(&b) {
        None => (true, None),
        Some((x, s)) => (
            false,
            Some(Witness::Subsets {
                x: input.carrier().label(x).into(),
                a: s.labels(input.carrier()),
                b: None,
            }),
        ),
    })
}

fn finish(name: &str, input: &ProbMetricSpace, output: ProbMetricSpace) -> Result<TransformReport> {
    let axioms = output.check_axioms();
    let (delta_preserved, delta_witness) = delta_comparison(input, &output)?;
    Ok(TransformReport {
        stages: vec![Stage {
            name: name.into(),
            output_tnorm: output.tnorm().clone(),
            axioms_passed: axioms.all_passed(),
            delta_preserved,
        }],
        input_tnorm: input.tnorm().clone(),
        output_tnorm: output.tnorm().clone(),
        output,
        axioms,
        delta_preserved,
        delta_witness,
        notes: Vec::new(),
    })
}

/// Largest `b(t) − a(t)` over the merged jump set.
fn max_raise(a: &StepDistribution, b: &StepDistribution) -> f64 {
    a.jumps()
        .chain(b.jumps())
        .map(|j| b.value_after(j) - a.value_after(j))
        .fold(0.0, f64::max)
}

/// Value maps such as `e^{v−1}` or affine transport are applied in
/// binary64, so a triangle that is tight in the input can fail by an ulp in
/// the output. When every violation is below [`REPAIR_LIMIT`], the output is
/// replaced by its triangle closure; larger violations are left for the
/// axiom report to expose.
fn finish_repaired(name: &str, input: &ProbMetricSpace, output: ProbMetricSpace) -> Result<TransformReport> {
    if output.check_axioms().all_passed() || !output.is_step() {
        return finish(name, input, output);
    }
    let raw: Vec<Vec<StepDistribution>> = output
        .matrix()
        .iter()
        .map(|r| r.iter().map(|d| d.as_step().expect("step space").clone()).collect())
        .collect();
    let repaired = match ProbMetricSpace::triangle_closure(output.carrier().clone(), raw, output.tnorm().clone()) {
        Ok(r) => r,
        Err(_) => return finish(name, input, output),
    };
    let mut raised = 0usize;
    let mut worst = 0.0f64;
    for (a, b) in output.matrix().iter().flatten().zip(repaired.matrix().iter().flatten()) {
        let (a, b) = (a.as_step().expect("step"), b.as_step().expect("step"));
        if a != b {
            raised += 1;
            worst = worst.max(max_raise(a, b));
        }
    }
    if worst > REPAIR_LIMIT {
        return finish(name, input, output);
    }
    let mut report = finish(name, input, repaired)?;
    report.notes.push(format!(
        "{name}: rounding repair raised {raised} entries by at most {worst:e}"
    ));
    Ok(report)
}

/// Chains `next` after `first`; the final verdicts compare against the
/// input of `first`.
fn compose(
    input: &ProbMetricSpace,
    first: TransformReport,
    next: impl FnOnce(&ProbMetricSpace) -> Result<TransformReport>,
) -> Result<TransformReport> {
    let second = next(&first.output)?;
    let (delta_preserved, delta_witness) = delta_comparison(input, &second.output)?;
    let mut stages = first.stages;
    stages.extend(second.stages);
    let mut notes = first.notes;
    notes.extend(second.notes);
    Ok(TransformReport {
        stages,
        input_tnorm: input.tnorm().clone(),
        output_tnorm: second.output_tnorm,
        output: second.output,
        axioms: second.axioms,
        delta_preserved,
        delta_witness,
        notes,
    })
}

/// Re-tags a space that is valid for the minimum t-norm with `t`.
pub fn min_retag(m: &ProbMetricSpace, t: &OrdinalSum) -> Result<TransformReport> {
    require_valid(m, &OrdinalSum::minimum(), "min_retag")?;
    finish("min-retag", m, m.retag(t.clone()))
}

/// `β(x, y, t) = e^{α(x, y, t) − 1}` for `t > 0`, from the Łukasiewicz to
/// the product t-norm.
pub fn luk_to_prod(m: &ProbMetricSpace) -> Result<TransformReport> {
    require_steps(m, "luk_to_prod")?;
    require_valid(m, &OrdinalSum::lukasiewicz(), "luk_to_prod")?;
    let out = m.map_entries(OrdinalSum::product(), |d| {
        let s = d.step_or_err("luk_to_prod")?;
        Ok(Distribution::Step(s.compose_values(|v| (v - 1.0).exp())?))
    })?;
    finish_repaired("luk-to-prod", m, out)
}

/// Re-tags a product-valid space with the Łukasiewicz t-norm.
pub fn prod_to_luk(m: &ProbMetricSpace) -> Result<TransformReport> {
    require_valid(m, &OrdinalSum::product(), "prod_to_luk")?;
    finish("prod-to-luk", m, m.retag(OrdinalSum::lukasiewicz()))
}

fn tail_iso(t1: &OrdinalSum, op: &str) -> Result<(AffineIso, Archetype)> {
    let tail = t1.tail_interval().ok_or_else(|| {
        Error::Precondition(format!("{op}: {t1} has k* = 1, so there is no tail summand to rescale"))
    })?;
    Ok((tail.transported_iso()?, tail.archetype()))
}

/// Sends values below `q` to 0 and transports `[q, 1]` affinely onto
/// `[0, 1]`; the output is tagged with the archetype of the tail summand.
pub fn tail_rescale_up(m: &ProbMetricSpace, q: f64) -> Result<TransformReport> {
    let t1 = m.tnorm().clone();
    if q != t1.k_star() {
        return Err(Error::Precondition(format!(
            "tail_rescale_up: q = {q} but k* = {} for {t1}",
            t1.k_star()
        )));
    }
    if !t1.is_idempotent(q) {
        return Err(Error::Precondition(format!("tail_rescale_up: {q} is not idempotent for {t1}")));
    }
    let (iso, archetype) = tail_iso(&t1, "tail_rescale_up")?;
    require_steps(m, "tail_rescale_up")?;
    require_valid(m, &t1, "tail_rescale_up")?;
    let out = m.map_entries(OrdinalSum::archetype(archetype), |d| {
        let s = d.step_or_err("tail_rescale_up")?;
        let f = |v: f64| if v < q { 0.0 } else { iso.forward(v) };
        Ok(Distribution::Step(s.map_values(f)?))
    })?;
    finish_repaired("tail-rescale-up", m, out)
}

/// Transports a space over the tail archetype of `t1` back into `[k*, 1]`
/// and tags it with `t1`.
pub fn tail_rescale_down(m: &ProbMetricSpace, t1: &OrdinalSum) -> Result<TransformReport> {
    let (iso, archetype) = tail_iso(t1, "tail_rescale_down")?;
    let expected = OrdinalSum::archetype(archetype);
    if *m.tnorm() != expected {
        return Err(Error::Precondition(format!(
            "tail_rescale_down: input is tagged {} but the tail summand of {t1} is {archetype}",
            m.tnorm()
        )));
    }
    require_steps(m, "tail_rescale_down")?;
    require_valid(m, &expected, "tail_rescale_down")?;
    let out = m.map_entries(t1.clone(), |d| {
        let s = d.step_or_err("tail_rescale_down")?;
        Ok(Distribution::Step(s.compose_values(|v| iso.backward(v))?))
    })?;
    finish_repaired("tail-rescale-down", m, out)
}

/// Replaces every value by its idempotent floor and tags the result with
/// the minimum t-norm.
pub fn idempotent_projection(m: &ProbMetricSpace) -> Result<TransformReport> {
    let t = m.tnorm().clone();
    require_valid(m, &t, "idempotent_projection")?;
    if !t.is_minimum() {
        require_steps(m, "idempotent_projection")?;
    }
    let out = m.map_entries(OrdinalSum::minimum(), |d| match d {
        Distribution::Exp(_) => Ok(d.clone()),
        Distribution::Step(s) => {
            let floored = s.map_values(|v| t.idempotent_floor(v))?;
            let regular = StepDistribution::left_regularize(floored.plateaus())?;
            assert_eq!(regular, floored, "left regularization changed a step distribution");
            Ok(Distribution::Step(floored))
        }
    })?;
    let mut report = finish("project-min", m, out)?;
    if t.k_star() < 1.0 {
        report.notes.push(PROJECTION_NOTE.into());
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Minimum,
    Product,
}

impl Target {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "minimum" => Ok(Target::Minimum),
            "product" | "prod" => Ok(Target::Product),
            other => Err(Error::Schema(format!("unknown target {other:?}; expected min or product"))),
        }
    }
}

/// Produces an equivalent space over the minimum or the product t-norm.
pub fn remetrize(m: &ProbMetricSpace, target: Target) -> Result<TransformReport> {
    let t = m.tnorm().clone();
    match target {
        Target::Minimum => idempotent_projection(m),
        Target::Product if t == OrdinalSum::product() => {
            require_valid(m, &t, "remetrize")?;
            finish("identity", m, m.clone())
        }
        Target::Product if t.k_star() < 1.0 => {
            let up = tail_rescale_up(m, t.k_star())?;
            match up.output_tnorm.intervals()[0].archetype() {
                Archetype::Lukasiewicz => compose(m, up, luk_to_prod),
                _ => Ok(up),
            }
        }
        Target::Product => {
            let projected = idempotent_projection(m)?;
            compose(m, projected, |p| min_retag(p, &OrdinalSum::product()))
        }
    }
}

/// A sequence with supremum 1 whose idempotent floors stay at `k* < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeWitness {
    pub sequence: Vec<f64>,
    pub floors: Vec<f64>,
    pub floor_sup: f64,
}

pub const WEDGE_WITNESS_LEN: i32 = 20;

/// `None` when `k* = 1`; otherwise `a_i = 1 − (1 − k*)·2^{−i}` for
/// `i = 1..=20`.
pub fn wedgesup_witness(t: &OrdinalSum) -> Option<WedgeWitness> {
    let k = t.k_star();
    if k == 1.0 {
        return None;
    }
    let sequence: Vec<f64> = (1..=WEDGE_WITNESS_LEN)
        .map(|i| 1.0 - (1.0 - k) * 2f64.powi(-i))
        .collect();
    let floors: Vec<f64> = sequence.iter().map(|&a| t.idempotent_floor(a)).collect();
    let floor_sup = floors.iter().copied().fold(0.0, f64::max);
    Some(WedgeWitness {
        sequence,
        floors,
        floor_sup,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub target: Target,
    pub succeeded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<TransformReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Certificate {
    fn attempt(m: &ProbMetricSpace, target: Target) -> Self {
        match remetrize(m, target) {
            Ok(r) => Certificate {
                target,
                succeeded: r.passed(),
                report: Some(r),
                error: None,
            },
            Err(e) => Certificate {
                target,
                succeeded: false,
                report: None,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub tnorm: OrdinalSum,
    pub k_star: f64,
    pub minimum: Certificate,
    pub product: Certificate,
    pub class: String,
    pub caveat: String,
}

impl ClassificationReport {
    pub fn render(&self) -> String {
        let mark = |c: &Certificate| if c.succeeded { "succeeded" } else { "failed" };
        let mut out = format!("t-norm {}  k* = {}\n", self.tnorm, self.k_star);
        for c in [&self.minimum, &self.product] {
            out.push_str(&format!("  certificate {:<8} {}", format!("{:?}", c.target).to_lowercase(), mark(c)));
            if let Some(r) = &c.report {
                let names: Vec<&str> = r.stages.iter().map(|s| s.name.as_str()).collect();
                out.push_str(&format!("  [{}]", names.join(" -> ")));
            }
            if let Some(e) = &c.error {
                out.push_str(&format!("  error: {e}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("  class: {}\n  caveat: {}\n", self.class, self.caveat));
        out
    }
}

/// Tries both certificates and reports which succeed.
pub fn classify(m: &ProbMetricSpace) -> Result<ClassificationReport> {
    require_valid(m, m.tnorm(), "classify")?;
    let minimum = Certificate::attempt(m, Target::Minimum);
    let product = Certificate::attempt(m, Target::Product);
    let class = match (minimum.succeeded, product.succeeded) {
        (true, _) => "(1) minimum-metrizable, hence metrizable for every continuous t-norm",
        (false, true) => "(2) product-metrizable but no minimum certificate",
        (false, false) => "(3) no certificate for either target",
    };
    Ok(ClassificationReport {
        tnorm: m.tnorm().clone(),
        k_star: m.tnorm().k_star(),
        minimum,
        product,
        class: class.into(),
        caveat: FINITE_CARRIER_CAVEAT.into(),
    })
}

/// Checks that two spaces over the same carrier derive the same δ, for
/// callers composing transforms by hand.
pub fn same_delta(a: &ProbMetricSpace, b: &ProbMetricSpace) -> Result<Option<(usize, Subset)>> {
    Ok(FiniteApproachSpace::derive(a)?.first_difference(&FiniteApproachSpace::derive(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtReal;
    use crate::oracle::{random_metric, random_space};
    use crate::probmetric::Carrier;
    use crate::tnorm::OrdinalInterval;

    fn step(p: &[(f64, f64)]) -> StepDistribution {
        StepDistribution::new(p.to_vec()).unwrap()
    }

    fn two_point(t: OrdinalSum, e: StepDistribution) -> ProbMetricSpace {
        let k = Distribution::kappa();
        let e = Distribution::Step(e);
        ProbMetricSpace::new(Carrier::numbered(2), t, vec![vec![k.clone(), e.clone()], vec![e, k]]).unwrap()
    }

    fn sum(a: f64, b: f64, arch: Archetype) -> OrdinalSum {
        OrdinalSum::new(vec![OrdinalInterval::new(a, b, arch).unwrap()]).unwrap()
    }

    #[test]
    fn min_retag_of_chi_is_valid_everywhere() {
        let m = ProbMetricSpace::from_classical_metric(&random_metric(4, 2), OrdinalSum::minimum());
        for t in [OrdinalSum::product(), OrdinalSum::lukasiewicz(), sum(0.2, 0.8, Archetype::Lukasiewicz)] {
            let r = min_retag(&m, &t).unwrap();
            assert!(r.passed(), "{}", r.render());
            assert_eq!(r.output_tnorm, t);
        }
        let e = ProbMetricSpace::exp_family_from_metric(&random_metric(3, 4));
        assert!(min_retag(&e, &OrdinalSum::product()).unwrap().passed());
    }

    #[test]
    fn min_retag_rejects_invalid_input() {
        let p = random_space(&OrdinalSum::product(), 4, 0).unwrap();
        let r = min_retag(&p, &OrdinalSum::product());
        if !p.retag(OrdinalSum::minimum()).check_axioms().all_passed() {
            assert!(r.is_err());
        }
    }

    #[test]
    fn luk_to_prod_values() {
        let m = two_point(OrdinalSum::lukasiewicz(), step(&[(1.0, 0.5), (2.0, 1.0)]));
        let r = luk_to_prod(&m).unwrap();
        assert!(r.passed(), "{}", r.render());
        let out = r.output.entry(0, 1);
        assert_eq!(out.evaluate(ExtReal::finite(2.5)), 1.0);
        assert!((out.evaluate(ExtReal::finite(1.5)) - 0.606_530_66).abs() < 1e-8);
        assert!((out.evaluate(ExtReal::finite(0.5)) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(out.evaluate(ExtReal::ZERO), 0.0);
        assert!(r.output.entry(0, 0).is_kappa());
    }

    #[test]
    fn luk_round_trip_preserves_delta() {
        for seed in 0..10 {
            let m = random_space(&OrdinalSum::lukasiewicz(), 4, seed).unwrap();
            let to_p = luk_to_prod(&m).unwrap();
            assert!(to_p.passed(), "{}", to_p.render());
            let back = prod_to_luk(&to_p.output).unwrap();
            assert!(back.passed());
            assert_eq!(same_delta(&m, &back.output).unwrap(), None);
        }
    }

    #[test]
    fn tail_rescale_values() {
        let t1 = sum(0.5, 1.0, Archetype::Product);
        let m = two_point(t1.clone(), step(&[(0.0, 0.5), (1.0, 0.75), (2.0, 1.0)]));
        let up = tail_rescale_up(&m, 0.5).unwrap();
        assert!(up.passed(), "{}", up.render());
        assert_eq!(up.output_tnorm, OrdinalSum::product());
        // 0.5 dropped, 0.75 ↦ 0.5, 1 ↦ 1
        assert_eq!(up.output.entry(0, 1), &Distribution::Step(step(&[(1.0, 0.5), (2.0, 1.0)])));
        let down = tail_rescale_down(&up.output, &t1).unwrap();
        assert!(down.passed());
        assert_eq!(down.output, m);
        assert!(tail_rescale_up(&m, 0.4).is_err());
        assert!(tail_rescale_down(&up.output, &sum(0.5, 1.0, Archetype::Lukasiewicz)).is_err());
    }

    #[test]
    fn tail_rescale_down_fills_leading_segment() {
        let t1 = sum(0.5, 1.0, Archetype::Product);
        let m = two_point(OrdinalSum::product(), step(&[(1.0, 0.5), (2.0, 1.0)]));
        let down = tail_rescale_down(&m, &t1).unwrap();
        assert!(down.passed(), "{}", down.render());
        assert_eq!(down.output.entry(0, 1), &Distribution::Step(step(&[(0.0, 0.5), (1.0, 0.75), (2.0, 1.0)])));
    }

    #[test]
    fn projection_values_and_idempotence() {
        let t = sum(0.2, 0.8, Archetype::Lukasiewicz);
        let m = two_point(t, step(&[(1.0, 0.5), (2.0, 0.9), (3.0, 1.0)]));
        let r = idempotent_projection(&m).unwrap();
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r.output.entry(0, 1), &Distribution::Step(step(&[(1.0, 0.2), (2.0, 0.9), (3.0, 1.0)])));
        let again = idempotent_projection(&r.output).unwrap();
        assert_eq!(again.output, r.output);
    }

    #[test]
    fn projection_with_small_k_star_carries_note() {
        let t = sum(0.3, 1.0, Archetype::Product);
        let m = random_space(&t, 4, 1).unwrap();
        let r = idempotent_projection(&m).unwrap();
        assert!(r.passed());
        assert_eq!(r.notes, vec![PROJECTION_NOTE.to_string()]);
    }

    #[test]
    fn remetrize_pipelines() {
        let p = random_space(&OrdinalSum::product(), 3, 5).unwrap();
        let r = remetrize(&p, Target::Product).unwrap();
        assert_eq!(r.stages.len(), 1);
        assert_eq!(r.stages[0].name, "identity");
        assert_eq!(r.output, p);

        let t = sum(0.3, 1.0, Archetype::Lukasiewicz);
        let m = random_space(&t, 4, 6).unwrap();
        let r = remetrize(&m, Target::Product).unwrap();
        let names: Vec<&str> = r.stages.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["tail-rescale-up", "luk-to-prod"]);
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r.output_tnorm, OrdinalSum::product());

        let chi = ProbMetricSpace::from_classical_metric(&random_metric(3, 1), OrdinalSum::minimum());
        let r = remetrize(&chi, Target::Product).unwrap();
        let names: Vec<&str> = r.stages.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["project-min", "min-retag"]);
        assert_eq!(r.output, chi.retag(OrdinalSum::product()));
        assert!(r.passed());
    }

    #[test]
    fn wedge_witnesses() {
        assert!(wedgesup_witness(&OrdinalSum::minimum()).is_none());
        assert!(wedgesup_witness(&sum(0.2, 0.8, Archetype::Lukasiewicz)).is_none());
        let w = wedgesup_witness(&OrdinalSum::product()).unwrap();
        assert_eq!(w.sequence[0], 0.5);
        assert_eq!(w.sequence[19], 1.0 - 2f64.powi(-20));
        assert_eq!(w.floor_sup, 0.0);
        let w = wedgesup_witness(&sum(0.2, 1.0, Archetype::Lukasiewicz)).unwrap();
        assert_eq!(w.floor_sup, 0.2);
        assert!(w.floors.iter().all(|&f| f == 0.2));
    }

    #[test]
    fn classification() {
        let chi = ProbMetricSpace::from_classical_metric(&random_metric(3, 8), OrdinalSum::product());
        let c = classify(&chi).unwrap();
        assert!(c.minimum.succeeded && c.product.succeeded);
        assert!(c.class.starts_with("(1)"));
        assert_eq!(c.caveat, FINITE_CARRIER_CAVEAT);
        let e = ProbMetricSpace::exp_family_from_metric(&random_metric(3, 9));
        let c = classify(&e).unwrap();
        assert!(c.minimum.succeeded && c.product.succeeded, "{}", c.render());
        let l = random_space(&OrdinalSum::lukasiewicz(), 4, 2).unwrap();
        let c = classify(&l).unwrap();
        assert!(c.minimum.succeeded && c.product.succeeded, "{}", c.render());
    }

    #[test]
    fn report_json_round_trip() {
        let m = random_space(&OrdinalSum::lukasiewicz(), 4, 3).unwrap();
        let r = remetrize(&m, Target::Product).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: TransformReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let c = classify(&m).unwrap();
        let back: ClassificationReport = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
