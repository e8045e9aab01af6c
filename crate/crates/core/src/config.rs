//! Building solvers from a JSON configuration tree.
//!
//! ```json
//! {
//!     "type": "solver::Gmres",
//!     "krylov_dim": 30,
//!     "preconditioner": {"type": "preconditioner::Jacobi", "max_block_size": 1},
//!     "criteria": [
//!         {"type": "Iteration", "max_iters": 1000},
//!         {"type": "ResidualNorm", "reduction_factor": 1e-6, "baseline": "rhs_norm"}
//!     ]
//! }
//! ```
//!
//! Validation is strict: unknown keys, missing keys and values of the wrong
//! kind are errors naming the offending key path, e.g.
//! `criteria[1].reduction_factor`.

use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::dense::DenseMatrix;
use crate::device::Device;
use crate::linop::LinOp;
use crate::precond::{Ic, Ilu, Jacobi, PreconditionerKind};
use crate::scalar::{Index, Scalar};
use crate::solver::{
    validate_criteria, Baseline, Cg, Cgs, ConvergenceLog, Criterion, Gmres, Solver, SolverKind,
    SolverParams, DEFAULT_KRYLOV_DIM,
};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreconditionerConfig {
    Jacobi { max_block_size: usize },
    Ilu,
    Ic,
}

impl PreconditionerConfig {
    pub fn kind(self) -> PreconditionerKind {
        match self {
            PreconditionerConfig::Jacobi { .. } => PreconditionerKind::Jacobi,
            PreconditionerConfig::Ilu => PreconditionerKind::Ilu,
            PreconditionerConfig::Ic => PreconditionerKind::Ic,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub solver: SolverKind,
    /// GMRES restart length; `None` means the default of 30.
    pub krylov_dim: Option<usize>,
    pub preconditioner: Option<PreconditionerConfig>,
    pub criteria: Vec<Criterion>,
}

impl SolverConfig {
    pub fn krylov_dim_or_default(&self) -> usize {
        self.krylov_dim.unwrap_or(DEFAULT_KRYLOV_DIM)
    }

    /// Serializes back to the tree shape accepted by [`parse_config`].
    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("type".into(), json!(solver_type_name(self.solver)));
        if let Some(k) = self.krylov_dim {
            root.insert("krylov_dim".into(), json!(k));
        }
        if let Some(p) = self.preconditioner {
            let node = match p {
                PreconditionerConfig::Jacobi { max_block_size } => json!({
                    "type": "preconditioner::Jacobi",
                    "max_block_size": max_block_size,
                }),
                PreconditionerConfig::Ilu => json!({"type": "preconditioner::Ilu"}),
                PreconditionerConfig::Ic => json!({"type": "preconditioner::Ic"}),
            };
            root.insert("preconditioner".into(), node);
        }
        let criteria = self
            .criteria
            .iter()
            .map(|c| match *c {
                Criterion::Iteration { max_iters } => {
                    json!({"type": "Iteration", "max_iters": max_iters})
                }
                Criterion::ResidualNorm {
                    reduction_factor,
                    baseline,
                } => json!({
                    "type": "ResidualNorm",
                    "reduction_factor": reduction_factor,
                    "baseline": baseline.as_str(),
                }),
            })
            .collect();
        root.insert("criteria".into(), Value::Array(criteria));
        Value::Object(root)
    }

    /// Solver parameters equivalent to this configuration.
    pub fn params<T: Scalar>(&self, preconditioner: Option<Arc<dyn LinOp<T>>>) -> SolverParams<T> {
        let max_iters = self
            .criteria
            .iter()
            .find_map(|c| match c {
                Criterion::Iteration { max_iters } => Some(*max_iters),
                _ => None,
            })
            .unwrap_or(0);
        let mut params = SolverParams::new(max_iters, 0.0)
            .krylov_dim(self.krylov_dim_or_default())
            .with_criteria(self.criteria.clone());
        params.preconditioner = preconditioner;
        params
    }
}

fn solver_type_name(kind: SolverKind) -> &'static str {
    match kind {
        SolverKind::Cg => "solver::Cg",
        SolverKind::Cgs => "solver::Cgs",
        SolverKind::Gmres => "solver::Gmres",
    }
}

/// Key-path aware view of one JSON object.
struct Node<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Node<'a> {
    fn new(path: String, value: &'a Value) -> Result<Self> {
        match value {
            Value::Object(map) => Ok(Node { path, map }),
            other => Err(Error::config(
                display_path(&path),
                format!("expected an object, found {}", kind_of(other)),
            )),
        }
    }

    fn key(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::config(self.key(k), "unknown key")),
            None => Ok(()),
        }
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn required(&self, key: &str) -> Result<&'a Value> {
        self.get(key)
            .ok_or_else(|| Error::config(self.key(key), "missing required key"))
    }

    fn string(&self, key: &str) -> Result<&'a str> {
        match self.required(key)? {
            Value::String(s) => Ok(s),
            other => Err(self.wrong_kind(key, "a string", other)),
        }
    }

    fn positive_int(&self, key: &str) -> Result<usize> {
        let v = self.required(key)?;
        match v.as_u64() {
            Some(n) if n > 0 => usize::try_from(n)
                .map_err(|_| Error::config(self.key(key), "value too large")),
            Some(_) => Err(Error::config(self.key(key), "must be positive")),
            None => Err(self.wrong_kind(key, "a positive integer", v)),
        }
    }

    fn number(&self, key: &str) -> Result<f64> {
        let v = self.required(key)?;
        v.as_f64().ok_or_else(|| self.wrong_kind(key, "a number", v))
    }

    fn wrong_kind(&self, key: &str, expected: &str, found: &Value) -> Error {
        Error::config(self.key(key), format!("expected {expected}, found {}", kind_of(found)))
    }
}

fn display_path(path: &str) -> &str {
    if path.is_empty() {
        "<root>"
    } else {
        path
    }
}

fn kind_of(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => format!("boolean {b}"),
        Value::Number(n) => format!("number {n}"),
        Value::String(s) => format!("string {s:?}"),
        Value::Array(_) => "an array".into(),
        Value::Object(_) => "an object".into(),
    }
}

/// Validates a configuration tree.
pub fn parse_config(tree: &Value) -> Result<SolverConfig> {
    let root = Node::new(String::new(), tree)?;
    let solver = match root.string("type")? {
        "solver::Gmres" => SolverKind::Gmres,
        "solver::Cg" => SolverKind::Cg,
        "solver::Cgs" => SolverKind::Cgs,
        other => {
            return Err(Error::config(
                "type",
                format!("unknown solver type \"{other}\""),
            ))
        }
    };
    let mut allowed = vec!["type", "preconditioner", "criteria"];
    if solver == SolverKind::Gmres {
        allowed.push("krylov_dim");
    }
    root.reject_unknown(&allowed)?;

    let krylov_dim = match root.get("krylov_dim") {
        Some(_) => Some(root.positive_int("krylov_dim")?),
        None => None,
    };
    let preconditioner = match root.get("preconditioner") {
        Some(v) => Some(parse_preconditioner(Node::new(root.key("preconditioner"), v)?)?),
        None => None,
    };
    let criteria = match root.required("criteria")? {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(k, v)| parse_criterion(Node::new(format!("criteria[{k}]"), v)?))
            .collect::<Result<Vec<_>>>()?,
        other => return Err(root.wrong_kind("criteria", "an array", other)),
    };
    validate_criteria(&criteria)?;
    Ok(SolverConfig {
        solver,
        krylov_dim,
        preconditioner,
        criteria,
    })
}

fn parse_preconditioner(node: Node<'_>) -> Result<PreconditionerConfig> {
    match node.string("type")? {
        "preconditioner::Jacobi" => {
            node.reject_unknown(&["type", "max_block_size"])?;
            let max_block_size = match node.get("max_block_size") {
                Some(_) => node.positive_int("max_block_size")?,
                None => 1,
            };
            if max_block_size > 1 {
                return Err(Error::Unsupported(format!(
                    "{}: block Jacobi with max_block_size {max_block_size}",
                    node.key("max_block_size")
                )));
            }
            Ok(PreconditionerConfig::Jacobi { max_block_size })
        }
        "preconditioner::Ilu" => {
            node.reject_unknown(&["type"])?;
            Ok(PreconditionerConfig::Ilu)
        }
        "preconditioner::Ic" => {
            node.reject_unknown(&["type"])?;
            Ok(PreconditionerConfig::Ic)
        }
        other => Err(Error::config(
            node.key("type"),
            format!("unknown preconditioner type \"{other}\""),
        )),
    }
}

fn parse_criterion(node: Node<'_>) -> Result<Criterion> {
    match node.string("type")? {
        "Iteration" => {
            node.reject_unknown(&["type", "max_iters"])?;
            Ok(Criterion::Iteration {
                max_iters: node.positive_int("max_iters")?,
            })
        }
        "ResidualNorm" => {
            node.reject_unknown(&["type", "reduction_factor", "baseline"])?;
            let reduction_factor = node.number("reduction_factor")?;
            if !(reduction_factor.is_finite() && reduction_factor >= 0.0) {
                return Err(Error::config(
                    node.key("reduction_factor"),
                    "must be a finite non-negative number",
                ));
            }
            let baseline = match node.get("baseline") {
                None => Baseline::RhsNorm,
                Some(_) => match node.string("baseline")? {
                    "rhs_norm" => Baseline::RhsNorm,
                    other => {
                        return Err(Error::Unsupported(format!(
                            "{}: baseline \"{other}\"",
                            node.key("baseline")
                        )))
                    }
                },
            };
            Ok(Criterion::ResidualNorm {
                reduction_factor,
                baseline,
            })
        }
        other => Err(Error::config(
            node.key("type"),
            format!("unknown criterion type \"{other}\""),
        )),
    }
}

pub fn parse_config_str(text: &str) -> Result<SolverConfig> {
    let tree: Value = serde_json::from_str(text)
        .map_err(|e| Error::config("<root>", format!("invalid JSON: {e}")))?;
    parse_config(&tree)
}

pub fn parse_config_file(path: impl AsRef<Path>) -> Result<SolverConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

/// Builds the preconditioner described by `config` for the matrix `a`.
pub fn build_preconditioner<T: Scalar, I: Index>(
    config: PreconditionerConfig,
    a: &CsrMatrix<T, I>,
) -> Result<Arc<dyn LinOp<T>>> {
    Ok(match config {
        PreconditionerConfig::Jacobi { max_block_size } => Arc::new(Jacobi::new(a, max_block_size)?),
        PreconditionerConfig::Ilu => Arc::new(Ilu::new(a)?),
        PreconditionerConfig::Ic => Arc::new(Ic::new(a)?),
    })
}

/// Builds the configured solver for `a`, copied to `device`.
pub fn build_solver<T: Scalar, I: Index>(
    config: &SolverConfig,
    device: &Device,
    a: &CsrMatrix<T, I>,
) -> Result<Box<dyn Solver<T>>> {
    let a = a.to_device(device);
    let preconditioner = config
        .preconditioner
        .map(|p| build_preconditioner(p, &a))
        .transpose()?;
    let params = config.params(preconditioner);
    let system: Arc<dyn LinOp<T>> = Arc::new(a);
    Ok(match config.solver {
        SolverKind::Cg => Box::new(Cg::new(system, &params)?),
        SolverKind::Cgs => Box::new(Cgs::new(system, &params)?),
        SolverKind::Gmres => Box::new(Gmres::new(system, &params)?),
    })
}

/// Parses `tree`, builds the solver and solves `a x = b`, overwriting `x`.
pub fn config_solve<T: Scalar, I: Index>(
    tree: &Value,
    device: &Device,
    a: &CsrMatrix<T, I>,
    b: &DenseMatrix<T>,
    x: &mut DenseMatrix<T>,
) -> Result<ConvergenceLog> {
    let config = parse_config(tree)?;
    build_solver(&config, device, a)?.solve(b, x)
}
