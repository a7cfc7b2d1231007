//! Command-line front end.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on input
//! errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::approach::{neighborhood, FiniteApproachSpace, Subset, MAX_TABLE_CARRIER};
use crate::error::{Error, Result};
use crate::oracle::{random_space, CorpusManifest, GridSpec};
use crate::probmetric::{CheckOptions, ProbMetricSpace};
use crate::tnorm::{verify_properties, OrdinalSum};
use crate::transforms::{self, classify, remetrize, Target, TransformReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const TNORM_GRID: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "probmetrize", version, about = "Verify t-norms, probabilistic metric spaces and their approach structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the machine-readable report to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Reject spaces with more points than this.
    #[arg(long, global = true, default_value_t = MAX_TABLE_CARRIER)]
    pub max_carrier: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the t-norm property suite on a descriptor.
    VerifyTnorm {
        #[arg(long)]
        tnorm: String,
    },
    /// Check P1-P5 for a space file.
    VerifySpace {
        #[arg(long)]
        space: PathBuf,
        /// Check against this t-norm instead of the one in the file.
        #[arg(long)]
        tnorm: Option<String>,
        /// Sampled grid for exponential entries, as `t_max,resolution`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Emit the full delta table of a space and check A1-A4.
    Derive {
        #[arg(long)]
        space: PathBuf,
    },
    /// Closure of one subset, or of every subset.
    Closure {
        /// A space file or an approach file.
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        subset: Option<String>,
    },
    /// Strong-topology neighborhoods U_x(t) of every point.
    Neighborhoods {
        #[arg(long)]
        space: PathBuf,
        /// Comma-separated radii.
        #[arg(long = "t")]
        t: String,
    },
    /// Run a re-metrization pipeline and report on its output.
    Transform {
        #[arg(value_enum)]
        pipeline: Pipeline,
        #[arg(long)]
        space: PathBuf,
        /// Target t-norm for min-retag, or the original t-norm for tail-rescale-down.
        #[arg(long)]
        tnorm: Option<String>,
        #[arg(long)]
        target: Option<String>,
    },
    /// Try the minimum and product certificates for a space.
    Classify {
        #[arg(long)]
        space: PathBuf,
    },
    /// Replay a corpus manifest, or draw one space with --seed.
    Corpus {
        manifest: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tnorm: Option<String>,
        #[arg(long, default_value_t = 5)]
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pipeline {
    MinRetag,
    LukToProd,
    ProdToLuk,
    TailRescale,
    TailRescaleDown,
    ProjectMin,
    Remetrize,
}

/// Text for stdout, JSON for `--out`, and whether every check passed.
struct Outcome {
    text: String,
    json: Value,
    passed: bool,
}

impl Outcome {
    fn new(text: String, json: impl Serialize, passed: bool) -> Result<Self> {
        Ok(Outcome {
            text,
            json: serde_json::to_value(json)?,
            passed,
        })
    }
}

/// Parses `args` (including the program name) and runs the command,
/// printing to `stdout` and errors to `stderr`.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.text.as_bytes());
            if let Some(path) = &cli.out {
                let body = serde_json::to_string_pretty(&outcome.json).expect("report serialises");
                if let Err(e) = std::fs::write(path, body + "\n") {
                    let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            }
            if outcome.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path, cap: usize) -> Result<ProbMetricSpace> {
    let value = read_json(path)?;
    let space: ProbMetricSpace =
        serde_json::from_value(value).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    if space.len() > cap {
        return Err(Error::CarrierCap {
            size: space.len(),
            cap,
        });
    }
    Ok(space)
}

/// A t-norm name, or a file holding a descriptor.
pub fn load_tnorm(spec: &str) -> Result<OrdinalSum> {
    if let Some(t) = OrdinalSum::from_name(spec) {
        return Ok(t);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Error::InvalidTNorm(format!(
            "{spec:?} is neither min, product, lukasiewicz nor a readable file"
        )));
    }
    let value = read_json(path)?;
    serde_json::from_value(value).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn load_approach(path: &Path, cap: usize) -> Result<FiniteApproachSpace> {
    let value = read_json(path)?;
    let a = if let Some(table) = value.get("approach") {
        // A report written by `derive --out`.
        serde_json::from_value(table.clone())?
    } else if value.get("delta").is_some() || value.get("derive_from").is_some() {
        FiniteApproachSpace::load(path)?
    } else {
        FiniteApproachSpace::derive(&load_space(path, cap)?)?
    };
    if a.len() > cap {
        return Err(Error::CarrierCap { size: a.len(), cap });
    }
    Ok(a)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| Error::Schema(format!("{p:?} is not a number"))))
        .collect()
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let cap = cli.max_carrier;
    match &cli.command {
        Command::VerifyTnorm { tnorm } => {
            let t = load_tnorm(tnorm)?;
            let report = verify_properties(&t, TNORM_GRID);
            let text = format!("t-norm {t}  k* = {}\n{}", t.k_star(), report.render());
            let passed = report.all_passed();
            Outcome::new(text, json!({ "tnorm": t, "report": report }), passed)
        }
        Command::VerifySpace { space, tnorm, grid } => {
            let mut m = load_space(space, cap)?;
            if let Some(t) = tnorm {
                m = m.retag(load_tnorm(t)?);
            }
            let opts = CheckOptions {
                sample_grid: grid.as_deref().map(GridSpec::parse).transpose()?,
            };
            let report = m.check_axioms_with(&opts);
            let text = format!("space of {} points under {}\n{}", m.len(), m.tnorm(), report.render());
            let passed = report.all_passed();
            Outcome::new(text, report, passed)
        }
        Command::Derive { space } => {
            let m = load_space(space, cap)?;
            let a = FiniteApproachSpace::derive(&m)?;
            let report = a.check_axioms();
            let text = format!("{a}{}", report.render());
            let passed = report.all_passed();
            Outcome::new(text, json!({ "approach": a, "axioms": report }), passed)
        }
        Command::Closure { space, subset } => {
            let a = load_approach(space, cap)?;
            let report = a.check_axioms();
            let c = a.carrier();
            let subsets: Vec<Subset> = match subset {
                Some(s) => vec![Subset::parse(c, s)?],
                None => Subset::all(a.len()).collect(),
            };
            let mut text = String::new();
            let mut rows = Vec::new();
            for s in subsets {
                let cl = a.closure(s);
                text.push_str(&format!("cl({}) = {}\n", s.display(c), cl.display(c)));
                rows.push(json!({ "subset": s.labels(c), "closure": cl.labels(c) }));
            }
            text.push_str(&report.render());
            let passed = report.all_passed();
            Outcome::new(text, json!({ "closures": rows, "axioms": report }), passed)
        }
        Command::Neighborhoods { space, t } => {
            let m = load_space(space, cap)?;
            let radii = parse_list(t)?;
            if radii.is_empty() {
                return Err(Error::Schema("--t needs at least one radius".into()));
            }
            let c = m.carrier();
            let mut text = String::new();
            let mut rows = Vec::new();
            for &r in &radii {
                for x in 0..m.len() {
                    let u = neighborhood(&m, x, r)?;
                    text.push_str(&format!("U_{}({r}) = {}\n", c.label(x), u.display(c)));
                    rows.push(json!({ "x": c.label(x), "t": r, "neighborhood": u.labels(c) }));
                }
            }
            Outcome::new(text, json!({ "neighborhoods": rows }), true)
        }
        Command::Transform {
            pipeline,
            space,
            tnorm,
            target,
        } => {
            let m = load_space(space, cap)?;
            let need_tnorm = || -> Result<OrdinalSum> {
                load_tnorm(tnorm.as_deref().ok_or_else(|| {
                    Error::Schema(format!("pipeline {pipeline:?} needs --tnorm"))
                })?)
            };
            let report: TransformReport = match pipeline {
                Pipeline::MinRetag => transforms::min_retag(&m, &need_tnorm()?)?,
                Pipeline::LukToProd => transforms::luk_to_prod(&m)?,
                Pipeline::ProdToLuk => transforms::prod_to_luk(&m)?,
                Pipeline::TailRescale => transforms::tail_rescale_up(&m, m.tnorm().k_star())?,
                Pipeline::TailRescaleDown => transforms::tail_rescale_down(&m, &need_tnorm()?)?,
                Pipeline::ProjectMin => transforms::idempotent_projection(&m)?,
                Pipeline::Remetrize => {
                    let target = Target::parse(target.as_deref().ok_or_else(|| {
                        Error::Schema("pipeline remetrize needs --target min|product".into())
                    })?)?;
                    remetrize(&m, target)?
                }
            };
            let passed = report.passed();
            Outcome::new(report.render(), &report, passed)
        }
        Command::Classify { space } => {
            let m = load_space(space, cap)?;
            let report = classify(&m)?;
            let passed = report.minimum.succeeded || report.product.succeeded;
            Outcome::new(report.render(), &report, passed)
        }
        Command::Corpus {
            manifest,
            seed,
            tnorm,
            points,
        } => match (manifest, seed) {
            (Some(path), None) => replay(path, cap),
            (None, Some(seed)) => {
                if *points > cap {
                    return Err(Error::CarrierCap { size: *points, cap });
                }
                let t = load_tnorm(tnorm.as_deref().unwrap_or("min"))?;
                let m = random_space(&t, *points, *seed)?;
                let text = serde_json::to_string_pretty(&m)? + "\n";
                Outcome::new(text, &m, true)
            }
            _ => Err(Error::Schema("corpus takes either a manifest path or --seed".into())),
        },
    }
}

#[derive(Serialize)]
struct CorpusLine {
    seed: u64,
    tnorm: OrdinalSum,
    n_points: usize,
    axioms: bool,
    approach_axioms: bool,
    minimum_certificate: bool,
    product_certificate: bool,
}

fn replay(path: &Path, cap: usize) -> Result<Outcome> {
    let manifest: CorpusManifest = serde_json::from_value(read_json(path)?)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    manifest.check_algorithm()?;
    let mut text = String::new();
    let mut lines = Vec::new();
    let mut all = true;
    for e in &manifest.entries {
        if e.n_points > cap {
            return Err(Error::CarrierCap { size: e.n_points, cap });
        }
        let m = random_space(&e.tnorm, e.n_points, e.seed)?;
        let axioms = m.check_axioms().all_passed();
        let approach_axioms = FiniteApproachSpace::derive(&m)?.check_axioms().all_passed();
        let c = classify(&m)?;
        let line = CorpusLine {
            seed: e.seed,
            tnorm: e.tnorm.clone(),
            n_points: e.n_points,
            axioms,
            approach_axioms,
            minimum_certificate: c.minimum.succeeded,
            product_certificate: c.product.succeeded,
        };
        let ok = axioms && approach_axioms && line.minimum_certificate && line.product_certificate;
        all &= ok;
        text.push_str(&format!(
            "seed {:<6} {:<28} n={}  {}\n",
            e.seed,
            e.tnorm.to_string(),
            e.n_points,
            if ok { "pass" } else { "FAIL" }
        ));
        lines.push(line);
    }
    Outcome::new(text, json!({ "algorithm": manifest.algorithm, "entries": lines }), all)
}
