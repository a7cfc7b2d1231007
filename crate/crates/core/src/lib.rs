//! Continuous t-norms as finite ordinal sums, step distance distributions,
//! finite probabilistic metric spaces, the approach spaces they induce, and
//! verified re-metrization transforms between t-norms.

#![allow(clippy::needless_range_loop)]

pub mod approach;
pub mod cli;
pub mod distribution;
pub mod error;
pub mod ext;
pub mod oracle;
pub mod probmetric;
pub mod report;
pub mod tnorm;
pub mod transforms;

pub use approach::{FiniteApproachSpace, Subset};
pub use distribution::{Distribution, ExpDistribution, StepDistribution};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use probmetric::{Carrier, ClassicalMetric, ProbMetricSpace};
pub use report::{AxiomReport, MapCheck, Verdict, Witness};
pub use tnorm::{Archetype, OrdinalInterval, OrdinalSum};
pub use transforms::{ClassificationReport, Target, TransformReport};
