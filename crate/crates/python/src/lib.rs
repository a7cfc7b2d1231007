//! Python bindings. Reports cross the boundary as JSON strings.

use probmetrize::approach::{self, FiniteApproachSpace, Subset};
use probmetrize::oracle;
use probmetrize::probmetric::check_nonexpansive;
use probmetrize::transforms::{self, Target};
use probmetrize::{
    Archetype, Carrier, ClassicalMetric, Distribution as CoreDistribution, ExtReal, OrdinalInterval, OrdinalSum,
    ProbMetricSpace, StepDistribution,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ext(t: f64) -> PyResult<ExtReal> {
    ExtReal::new(t).map_err(err)
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(err)
}

#[pyclass(name = "TNorm", module = "probmetrize", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTNorm {
    inner: OrdinalSum,
}

#[pymethods]
impl PyTNorm {
    /// `name` is min, product, lukasiewicz or a JSON descriptor.
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let inner = match OrdinalSum::from_name(name) {
            Some(t) => t,
            None => serde_json::from_str(name).map_err(err)?,
        };
        Ok(PyTNorm { inner })
    }

    /// Intervals as `(a, b, "product" | "lukasiewicz")` triples.
    #[staticmethod]
    fn from_intervals(intervals: Vec<(f64, f64, String)>) -> PyResult<Self> {
        let parsed = intervals
            .into_iter()
            .map(|(a, b, kind)| {
                let arch = match kind.to_ascii_lowercase().as_str() {
                    "product" => Archetype::Product,
                    "lukasiewicz" => Archetype::Lukasiewicz,
                    other => return Err(err(format!("unknown archetype {other:?}"))),
                };
                OrdinalInterval::new(a, b, arch).map_err(err)
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyTNorm {
            inner: OrdinalSum::new(parsed).map_err(err)?,
        })
    }

    fn __call__(&self, p: f64, q: f64) -> PyResult<f64> {
        if !((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q)) {
            return Err(err("arguments must lie in [0, 1]"));
        }
        Ok(self.inner.eval(p, q))
    }

    fn is_idempotent(&self, q: f64) -> bool {
        self.inner.is_idempotent(q)
    }

    fn idempotent_floor(&self, q: f64) -> f64 {
        self.inner.idempotent_floor(q)
    }

    #[getter]
    fn k_star(&self) -> f64 {
        self.inner.k_star()
    }

    #[pyo3(signature = (grid = 200))]
    fn verify(&self, grid: usize) -> PyResult<String> {
        json(&probmetrize::tnorm::verify_properties(&self.inner, grid))
    }

    fn wedgesup_witness(&self) -> PyResult<Option<String>> {
        transforms::wedgesup_witness(&self.inner).map(|w| json(&w)).transpose()
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("TNorm({})", self.inner)
    }
}

#[pyclass(name = "Distribution", module = "probmetrize", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDistribution {
    inner: CoreDistribution,
}

#[pymethods]
impl PyDistribution {
    /// A step distribution from `(jump, value)` plateaus.
    #[staticmethod]
    fn step(plateaus: Vec<(f64, f64)>) -> PyResult<Self> {
        Ok(PyDistribution {
            inner: CoreDistribution::Step(StepDistribution::new(plateaus).map_err(err)?),
        })
    }

    #[staticmethod]
    fn kappa() -> Self {
        PyDistribution {
            inner: CoreDistribution::kappa(),
        }
    }

    /// `1 − e^{−t/rate}`.
    #[staticmethod]
    fn exp(rate: f64) -> PyResult<Self> {
        Ok(PyDistribution {
            inner: CoreDistribution::exp(ext(rate)?),
        })
    }

    fn __call__(&self, t: f64) -> PyResult<f64> {
        Ok(self.inner.evaluate(ext(t)?))
    }

    fn first_reach_one(&self) -> f64 {
        self.inner.first_reach_one().get()
    }

    fn threshold_inf(&self, theta: f64) -> PyResult<f64> {
        Ok(self.inner.threshold_inf(theta).map_err(err)?.get())
    }

    fn convolve(&self, other: &Self, tnorm: &PyTNorm) -> PyResult<Self> {
        Ok(PyDistribution {
            inner: self.inner.convolve(&other.inner, &tnorm.inner).map_err(err)?,
        })
    }

    fn leq(&self, other: &Self) -> bool {
        self.inner.leq(&other.inner)
    }

    #[getter]
    fn plateaus(&self) -> PyResult<Vec<(f64, f64)>> {
        Ok(self.inner.step_or_err("plateaus").map_err(err)?.plateaus().to_vec())
    }

    fn is_kappa(&self) -> bool {
        self.inner.is_kappa()
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Distribution({})", self.inner)
    }
}

fn carrier(labels: Option<Vec<String>>, n: usize) -> PyResult<Carrier> {
    match labels {
        Some(l) => Carrier::new(l).map_err(err),
        None => Ok(Carrier::numbered(n)),
    }
}

fn metric(d: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<ClassicalMetric> {
    let c = carrier(labels, d.len())?;
    let rows = d
        .into_iter()
        .map(|r| r.into_iter().map(ext).collect::<PyResult<Vec<_>>>())
        .collect::<PyResult<Vec<_>>>()?;
    ClassicalMetric::new(c, rows).map_err(err)
}

#[pyclass(name = "Space", module = "probmetrize", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpace {
    inner: ProbMetricSpace,
}

impl PySpace {
    fn index(&self, label: &str) -> PyResult<usize> {
        self.inner.carrier().index_of(label).map_err(err)
    }

    fn subset(&self, labels: Vec<String>) -> PyResult<Subset> {
        Ok(Subset::from_indices(
            labels.iter().map(|l| self.index(l)).collect::<PyResult<Vec<_>>>()?,
        ))
    }
}

#[pymethods]
impl PySpace {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySpace {
            inner: serde_json::from_str(text).map_err(err)?,
        })
    }

    /// The single-jump space of a classical metric; `inf` entries allowed.
    #[staticmethod]
    #[pyo3(signature = (d, tnorm, labels = None))]
    fn from_metric(d: Vec<Vec<f64>>, tnorm: &PyTNorm, labels: Option<Vec<String>>) -> PyResult<Self> {
        Ok(PySpace {
            inner: ProbMetricSpace::from_classical_metric(&metric(d, labels)?, tnorm.inner.clone()),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (d, labels = None))]
    fn exp_family(d: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        Ok(PySpace {
            inner: ProbMetricSpace::exp_family_from_metric(&metric(d, labels)?),
        })
    }

    #[staticmethod]
    fn random(tnorm: &PyTNorm, n_points: usize, seed: u64) -> PyResult<Self> {
        Ok(PySpace {
            inner: oracle::random_space(&tnorm.inner, n_points, seed).map_err(err)?,
        })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.carrier().labels().to_vec()
    }

    #[getter]
    fn tnorm(&self) -> PyTNorm {
        PyTNorm {
            inner: self.inner.tnorm().clone(),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn entry(&self, x: &str, y: &str) -> PyResult<PyDistribution> {
        Ok(PyDistribution {
            inner: self.inner.entry(self.index(x)?, self.index(y)?).clone(),
        })
    }

    fn retag(&self, tnorm: &PyTNorm) -> Self {
        PySpace {
            inner: self.inner.retag(tnorm.inner.clone()),
        }
    }

    fn check_axioms(&self) -> PyResult<String> {
        json(&self.inner.check_axioms())
    }

    fn is_valid(&self) -> bool {
        self.inner.check_axioms().all_passed()
    }

    fn derive(&self) -> PyResult<PyApproach> {
        Ok(PyApproach {
            inner: FiniteApproachSpace::derive(&self.inner).map_err(err)?,
        })
    }

    fn neighborhood(&self, x: &str, t: f64) -> PyResult<Vec<String>> {
        let u = approach::neighborhood(&self.inner, self.index(x)?, t).map_err(err)?;
        Ok(u.labels(self.inner.carrier()))
    }

    fn lambda_n(&self, x: &str, n: usize) -> PyResult<Vec<f64>> {
        let t = approach::lambda_n(&self.inner, self.index(x)?, n).map_err(err)?;
        Ok(t.values.into_iter().map(ExtReal::get).collect())
    }

    fn delta_via_lambda(&self, x: &str, subset: Vec<String>) -> PyResult<f64> {
        let a = self.subset(subset)?;
        Ok(approach::delta_via_lambda(&self.inner, self.index(x)?, a).map_err(err)?.get())
    }

    fn gauge(&self, n: usize) -> PyResult<String> {
        json(&approach::gauge_dn(&self.inner, n).map_err(err)?)
    }

    /// Runs a named pipeline and returns the report as JSON.
    #[pyo3(signature = (pipeline, tnorm = None, target = None))]
    fn transform(&self, pipeline: &str, tnorm: Option<&PyTNorm>, target: Option<&str>) -> PyResult<String> {
        let m = &self.inner;
        let need = || tnorm.map(|t| t.inner.clone()).ok_or_else(|| err(format!("{pipeline} needs a tnorm")));
        let report = match pipeline {
            "min-retag" => transforms::min_retag(m, &need()?),
            "luk-to-prod" => transforms::luk_to_prod(m),
            "prod-to-luk" => transforms::prod_to_luk(m),
            "tail-rescale" => transforms::tail_rescale_up(m, m.tnorm().k_star()),
            "tail-rescale-down" => transforms::tail_rescale_down(m, &need()?),
            "project-min" => transforms::idempotent_projection(m),
            "remetrize" => {
                let target = Target::parse(target.ok_or_else(|| err("remetrize needs a target"))?).map_err(err)?;
                transforms::remetrize(m, target)
            }
            other => return Err(err(format!("unknown pipeline {other:?}"))),
        }
        .map_err(err)?;
        json(&report)
    }

    fn classify(&self) -> PyResult<String> {
        json(&transforms::classify(&self.inner).map_err(err)?)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Space({} points, {})", self.inner.len(), self.inner.tnorm())
    }
}

#[pyclass(name = "Approach", module = "probmetrize", frozen)]
struct PyApproach {
    inner: FiniteApproachSpace,
}

impl PyApproach {
    fn subset(&self, labels: Vec<String>) -> PyResult<Subset> {
        Subset::parse(self.inner.carrier(), &labels.join(",")).map_err(err)
    }
}

#[pymethods]
impl PyApproach {
    /// `delta(x, A)`; `inf` when unreachable.
    fn delta(&self, x: &str, subset: Vec<String>) -> PyResult<f64> {
        let i = self.inner.carrier().index_of(x).map_err(err)?;
        Ok(self.inner.delta(i, self.subset(subset)?).get())
    }

    fn closure(&self, subset: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.inner.closure(self.subset(subset)?).labels(self.inner.carrier()))
    }

    fn check_axioms(&self) -> PyResult<String> {
        json(&self.inner.check_axioms())
    }

    /// Whether `f` (indices into the target carrier) is a contraction.
    fn is_contraction(&self, f: Vec<usize>, target: &PyApproach) -> PyResult<bool> {
        Ok(FiniteApproachSpace::is_contraction(&f, &self.inner, &target.inner)
            .map_err(err)?
            .holds)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Whether `f` (indices into the target carrier) is non-expansive.
#[pyfunction]
fn is_nonexpansive(f: Vec<usize>, source: &PySpace, target: &PySpace) -> PyResult<bool> {
    Ok(check_nonexpansive(&f, &source.inner, &target.inner).map_err(err)?.holds)
}

#[pymodule]
#[pyo3(name = "probmetrize")]
pub fn probmetrize_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTNorm>()?;
    m.add_class::<PyDistribution>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PyApproach>()?;
    m.add_function(wrap_pyfunction!(is_nonexpansive, m)?)?;
    m.add("RNG_ALGORITHM", oracle::RNG_ALGORITHM)?;
    Ok(())
}
