//! Argument handling and report rendering for the `treeorbit` binary.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use treeorbit::engine::{decide_with, EngineConfig, EngineError, Instance, Verdict};
use treeorbit::oracle::orbits::DEFAULT_CAP;
use treeorbit::oracle::{
    certify_density, enumerate_orbits, OracleError, OrbitError, OrbitLimits, Pencil, Slicing,
    StabReport, DEFAULT_PRIME,
};
use treeorbit::{
    orbit_class, parse_product_spec, parse_tree_spec, trivially_sparse, LabeledTree, ParseError,
};

#[derive(Debug, Parser)]
#[command(
    name = "treeorbit",
    version,
    about = "Orbit and density questions for tree varieties"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of the variety.
    Dim(InputArgs),
    /// Orbit classification and the trivial sparseness test.
    Classify(InputArgs),
    /// Dense, sparse or unknown, with the rule trace.
    Decide {
        #[command(flatten)]
        input: InputArgs,
        /// Nesting depth of the forgetful-map search.
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Tangent rank of random points over a prime field.
    Certify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive orbit count over a small field.
    Orbits {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Largest number of points to materialize.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = SlicingArg::Auto)]
        slicing: SlicingArg,
    },
    /// Cross-ratio of four subspaces in a pencil, given as JSON.
    Crossratio {
        /// Inline JSON document.
        pencil: Option<String>,
        #[arg(long)]
        pencil_file: Option<PathBuf>,
        /// Overrides the prime in the document.
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SlicingArg {
    Auto,
    Off,
    Parabolic,
    Double,
}

impl From<SlicingArg> for Slicing {
    fn from(s: SlicingArg) -> Self {
        match s {
            SlicingArg::Auto => Slicing::Auto,
            SlicingArg::Off => Slicing::Off,
            SlicingArg::Parabolic => Slicing::Parabolic,
            SlicingArg::Double => Slicing::Double,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Tree DSL, tree JSON or product, detected from the text.
    pub input: Option<String>,
    #[arg(long, conflicts_with_all = ["input", "tree_file", "product"])]
    pub tree: Option<String>,
    #[arg(long, conflicts_with_all = ["input", "product"])]
    pub tree_file: Option<PathBuf>,
    #[arg(long, conflicts_with = "input")]
    pub product: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid pencil document: {0}")]
    Pencil(String),
    #[error(transparent)]
    CrossRatio(#[from] treeorbit::oracle::CrossRatioError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Orbits(#[from] OrbitError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Orbits(OrbitError::CapExceeded { .. }) => 3,
            CliError::Engine(_) | CliError::Oracle(OracleError::RankSamplingFailure { .. }) => 4,
            _ => 2,
        }
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn looks_like_product(text: &str) -> bool {
    let t = text.trim_start();
    t.starts_with("F(") || t.starts_with("G(")
}

impl InputArgs {
    pub fn instance(&self) -> Result<Instance, CliError> {
        if let Some(p) = &self.product {
            return Ok(Instance::Product(parse_product_spec(p)?));
        }
        if let Some(t) = &self.tree {
            return Ok(Instance::Tree(parse_tree_spec(t)?));
        }
        if let Some(path) = &self.tree_file {
            return Ok(Instance::Tree(parse_tree_spec(&read(path)?)?));
        }
        match &self.input {
            Some(text) if looks_like_product(text) => {
                Ok(Instance::Product(parse_product_spec(text)?))
            }
            Some(text) => Ok(Instance::Tree(parse_tree_spec(text)?)),
            None => Err(CliError::Usage(
                "no input: give a tree or product, or one of --tree, --tree-file, --product".into(),
            )),
        }
    }

    fn tree(&self) -> Result<LabeledTree, CliError> {
        Ok(self.instance()?.tree().into_owned())
    }
}

#[derive(Debug, Serialize)]
struct DimReport {
    dimension: u64,
}

#[derive(Debug, Serialize)]
struct ClassifyReport {
    kind: String,
    case_label: Option<String>,
    witness: Option<String>,
    trivially_sparse: bool,
    vertex: Option<String>,
    lhs: u64,
    rhs: u64,
}

#[derive(Debug, Serialize)]
struct CertifyReport {
    #[serde(flatten)]
    report: StabReport,
    pgl_stab_dim: u64,
    certificate: &'static str,
}

#[derive(Debug, Serialize)]
struct CrossRatioReport {
    prime: u64,
    cross_ratio: u64,
}

/// Renders a flat JSON object as `key: value` lines, `null` as `-`.
fn render_fields(value: &Value) -> String {
    let Value::Object(map) = value else {
        return format!("{value}\n");
    };
    map.iter()
        .map(|(k, v)| format!("{k}: {}\n", scalar(v)))
        .collect()
}

pub fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_verdict(v: &Verdict) -> String {
    let mut out = format!("status: {}\n", v.status);
    if v.trace.is_empty() {
        out.push_str("trace: (no rule applies)\n");
    } else {
        out.push_str("trace:\n");
    }
    for (i, step) in v.trace.iter().enumerate() {
        out.push_str(&format!(
            "  {}. {} [{}] {} => {}\n",
            i + 1,
            step.rule_id,
            step.citation,
            step.before,
            step.after
        ));
    }
    if let Some(r) = &v.reduced {
        out.push_str(&format!("reduced: {r}\n"));
    }
    out
}

fn emit<T: Serialize>(value: &T, json: bool) -> String {
    let v = serde_json::to_value(value).expect("reports serialize");
    if json {
        format!("{v}\n")
    } else {
        render_fields(&v)
    }
}

/// Runs one command and returns its report.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Dim(input) => Ok(emit(
            &DimReport {
                dimension: input.instance()?.dimension(),
            },
            input.json,
        )),
        Command::Classify(input) => {
            let tree = input.tree()?;
            let class = orbit_class(&tree);
            let check = trivially_sparse(&tree);
            let report = ClassifyReport {
                kind: class.kind.to_string(),
                case_label: class.case_label.map(|c| c.label().to_string()),
                witness: class.witness,
                trivially_sparse: check.trivially_sparse,
                vertex: check.violating_vertex,
                lhs: check.lhs,
                rhs: check.rhs,
            };
            Ok(emit(&report, input.json))
        }
        Command::Decide { input, depth } => {
            let config = EngineConfig {
                r9_depth: *depth,
                ..EngineConfig::default()
            };
            let verdict = decide_with(&input.instance()?, &config)?;
            Ok(if input.json {
                format!(
                    "{}\n",
                    serde_json::to_string(&verdict).expect("verdicts serialize")
                )
            } else {
                render_verdict(&verdict)
            })
        }
        Command::Certify {
            input,
            prime,
            trials,
            seed,
        } => {
            let report = certify_density(&input.tree()?, *prime, *trials, *seed)?;
            let out = CertifyReport {
                report,
                pgl_stab_dim: report.pgl_stab_dim(),
                certificate: report.certificate(),
            };
            Ok(emit(&out, input.json))
        }
        Command::Orbits {
            input,
            q,
            cap,
            slicing,
        } => {
            let limits = OrbitLimits {
                cap: *cap,
                slicing: (*slicing).into(),
            };
            let report = enumerate_orbits(&input.tree()?, *q, &limits)?;
            Ok(emit(&report, input.json))
        }
        Command::Crossratio {
            pencil,
            pencil_file,
            prime,
            json,
        } => {
            let text = match (pencil, pencil_file) {
                (Some(t), None) => t.clone(),
                (None, Some(path)) => read(path)?,
                _ => {
                    return Err(CliError::Usage(
                        "give the pencil inline or with --pencil-file".into(),
                    ))
                }
            };
            let mut p: Pencil =
                serde_json::from_str(&text).map_err(|e| CliError::Pencil(e.to_string()))?;
            if let Some(prime) = prime {
                p.prime = *prime;
            }
            let report = CrossRatioReport {
                prime: p.prime,
                cross_ratio: p.cross_ratio()?,
            };
            Ok(emit(&report, *json))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_line(args: &[&str]) -> Result<String, CliError> {
        let cli =
            Cli::try_parse_from(std::iter::once("treeorbit").chain(args.iter().copied())).unwrap();
        run(&cli)
    }

    #[test]
    fn input_detection() {
        assert_eq!(run_line(&["dim", "F(1,2;4)^3"]).unwrap(), "dimension: 15\n");
        assert_eq!(run_line(&["dim", "1>2>4"]).unwrap(), "dimension: 5\n");
        assert_eq!(
            run_line(&["dim", "--tree", "1>2>4"]).unwrap(),
            "dimension: 5\n"
        );
        assert_eq!(
            run_line(&["dim", "--product", "G(2;4)", "--json"]).unwrap(),
            "{\"dimension\":4}\n"
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_line(&["dim", "2>2"]).unwrap_err().exit_code(), 2);
        assert_eq!(run_line(&["dim"]).unwrap_err().exit_code(), 2);
        assert_eq!(
            run_line(&[
                "orbits",
                "a:1>r:2 | b:1>r | c:1>r",
                "--q",
                "3",
                "--cap",
                "5"
            ])
            .unwrap_err()
            .exit_code(),
            3
        );
        assert_eq!(
            run_line(&["orbits", "1>2", "--q", "7"])
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            run_line(&["certify", "1>2", "--prime", "9"])
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn field_rendering() {
        let v = serde_json::json!({"a": 1, "b": null, "c": "x", "d": true});
        assert_eq!(render_fields(&v), "a: 1\nb: -\nc: x\nd: true\n");
    }
}
