//! Verdicts and witnesses shared by every checker in the crate.

use serde::{Deserialize, Serialize};

use crate::ext::ExtReal;

/// Concrete evidence that a property fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Unit values at which a t-norm law fails.
    Values { values: Vec<f64> },
    /// A pair of points; `t` is a radius where the pointwise comparison fails.
    Pair {
        x: String,
        y: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
    },
    /// A triple of points and a radius `t` where `(α(y,z) ⊗ α(x,y))(t) > α(x,z)(t)`.
    Triple { x: String, y: String, z: String, t: f64 },
    /// Split radii for a sampled triangle check.
    SampledTriple {
        x: String,
        y: String,
        z: String,
        r: f64,
        s: f64,
    },
    /// A point and one or two subsets of the carrier.
    Subsets {
        x: String,
        a: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<String>>,
    },
    /// A point, a subset and the two distances that should have been ordered.
    Distances {
        x: String,
        a: Vec<String>,
        left: ExtReal,
        right: ExtReal,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn pass(name: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            passed: true,
            witness: None,
            detail: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: Option<Witness>) -> Self {
        Verdict {
            name: name.into(),
            passed: false,
            witness,
            detail: None,
        }
    }

    pub fn from_witness(name: impl Into<String>, witness: Option<Witness>) -> Self {
        match witness {
            None => Verdict::pass(name),
            Some(w) => Verdict::fail(name, Some(w)),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// A list of named verdicts plus anything the checker could not decide.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unchecked: Vec<String>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    /// One line per verdict, for terminal output.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let mark = if v.passed { "pass" } else { "FAIL" };
            out.push_str(&format!("  {:<28} {mark}", v.name));
            if let Some(d) = &v.detail {
                out.push_str(&format!("  ({d})"));
            }
            if let Some(w) = &v.witness {
                out.push_str(&format!("  witness: {}", serde_json::to_string(w).unwrap_or_default()));
            }
            out.push('\n');
        }
        for u in &self.unchecked {
            out.push_str(&format!("  unchecked: {u}\n"));
        }
        out
    }
}

/// Outcome of checking a map between two spaces (non-expansiveness or the
/// contraction property).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapCheck {
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl MapCheck {
    pub fn from_witness(witness: Option<Witness>) -> Self {
        MapCheck {
            holds: witness.is_none(),
            witness,
        }
    }
}
