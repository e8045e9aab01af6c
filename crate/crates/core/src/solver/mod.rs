//! Krylov solvers.
//!
//! Every solver owns its system operator, an optional preconditioner and a
//! list of stopping criteria, and implements [`LinOp`]: applying it to `b`
//! solves `A x = b`, using the incoming `x` as initial guess and overwriting
//! it with the result. [`Solver::solve`] does the same and also returns the
//! [`ConvergenceLog`].
//!
//! One iteration is one preconditioned SpMV step for CG and CGS, and one
//! Arnoldi step for GMRES, so `Iteration { max_iters }` bounds the inner
//! work of restarted GMRES too.

mod cg;
mod cgs;
mod criteria;
mod gmres;

use std::sync::Arc;

pub use cg::{cg_solve, Cg};
pub use cgs::{cgs_solve, Cgs};
pub use criteria::{check_criteria, validate_criteria, Baseline, Criterion, StopReason};
pub use gmres::{givens_rotation, gmres_solve, Gmres};

use crate::dense::DenseMatrix;
use crate::device::Device;
use crate::linop::LinOp;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Default restart length for GMRES.
pub const DEFAULT_KRYLOV_DIM: usize = 30;

/// Relative size below which a recurrence denominator counts as zero.
const BREAKDOWN_TOL: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Cg,
    Cgs,
    Gmres,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Cg => "cg",
            SolverKind::Cgs => "cgs",
            SolverKind::Gmres => "gmres",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cg" => Ok(SolverKind::Cg),
            "cgs" => Ok(SolverKind::Cgs),
            "gmres" => Ok(SolverKind::Gmres),
            other => Err(Error::Unsupported(format!("solver `{other}`"))),
        }
    }
}

/// Diagnostic record of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceLog {
    /// Iterations actually executed.
    pub iterations: usize,
    /// Monitored residual norm after each iteration (one entry per check).
    pub residual_history: Vec<f64>,
    /// `||b - A x0||` before the first iteration.
    pub initial_residual: f64,
    pub rhs_norm: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// How many times the stopping criteria were evaluated.
    pub criteria_checks: usize,
}

impl ConvergenceLog {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }
}

/// Parameters shared by the direct solver constructors.
#[derive(Clone)]
pub struct SolverParams<T> {
    pub max_iters: usize,
    pub reduction_factor: f64,
    /// Restart length; only used by GMRES.
    pub krylov_dim: usize,
    pub preconditioner: Option<Arc<dyn LinOp<T>>>,
    /// Overrides the `[Iteration, ResidualNorm]` pair derived from
    /// `max_iters` and `reduction_factor`.
    pub criteria: Option<Vec<Criterion>>,
}

impl<T: Scalar> SolverParams<T> {
    pub fn new(max_iters: usize, reduction_factor: f64) -> Self {
        SolverParams {
            max_iters,
            reduction_factor,
            krylov_dim: DEFAULT_KRYLOV_DIM,
            preconditioner: None,
            criteria: None,
        }
    }

    /// Runs exactly `iters` iterations, ignoring the residual.
    pub fn fixed_iterations(iters: usize) -> Self {
        Self::new(iters, 0.0).with_criteria(vec![Criterion::Iteration { max_iters: iters }])
    }

    pub fn krylov_dim(mut self, krylov_dim: usize) -> Self {
        self.krylov_dim = krylov_dim;
        self
    }

    pub fn preconditioner(mut self, preconditioner: Arc<dyn LinOp<T>>) -> Self {
        self.preconditioner = Some(preconditioner);
        self
    }

    pub fn with_criteria(mut self, criteria: Vec<Criterion>) -> Self {
        self.criteria = Some(criteria);
        self
    }

    pub fn criteria_list(&self) -> Vec<Criterion> {
        self.criteria.clone().unwrap_or_else(|| {
            vec![
                Criterion::Iteration {
                    max_iters: self.max_iters,
                },
                Criterion::ResidualNorm {
                    reduction_factor: self.reduction_factor,
                    baseline: Baseline::RhsNorm,
                },
            ]
        })
    }
}

impl<T> std::fmt::Debug for SolverParams<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolverParams")
            .field("max_iters", &self.max_iters)
            .field("reduction_factor", &self.reduction_factor)
            .field("krylov_dim", &self.krylov_dim)
            .field("preconditioner", &self.preconditioner.is_some())
            .field("criteria", &self.criteria)
            .finish()
    }
}

/// Snapshot handed to a monitor after every iteration.
pub struct Step<'a, T: Scalar> {
    pub iteration: usize,
    /// The residual norm the criteria see at this iteration.
    pub residual: f64,
    iterate: Iterate<'a, T>,
}

pub(crate) enum Iterate<'a, T: Scalar> {
    Explicit(&'a DenseMatrix<T>),
    Gmres(gmres::PartialIterate<'a, T>),
}

impl<T: Scalar> Step<'_, T> {
    /// The current approximate solution. GMRES forms it on demand from the
    /// Krylov basis, which costs one least-squares solve and one
    /// preconditioner application.
    pub fn solution(&self) -> Result<DenseMatrix<T>> {
        match &self.iterate {
            Iterate::Explicit(x) => Ok((*x).clone()),
            Iterate::Gmres(partial) => partial.form(),
        }
    }
}

/// A linear operator that solves a linear system when applied.
pub trait Solver<T: Scalar>: LinOp<T> {
    fn kind(&self) -> SolverKind;

    fn criteria(&self) -> &[Criterion];

    fn solve(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<ConvergenceLog> {
        self.solve_monitored(b, x, &mut |_| {})
    }

    /// Like [`Solver::solve`], calling `monitor` after every iteration.
    fn solve_monitored(
        &self,
        b: &DenseMatrix<T>,
        x: &mut DenseMatrix<T>,
        monitor: &mut dyn FnMut(&Step<'_, T>),
    ) -> Result<ConvergenceLog>;
}

/// State shared by all solver implementations.
#[derive(Clone)]
pub(crate) struct SolverCore<T> {
    system: Arc<dyn LinOp<T>>,
    preconditioner: Option<Arc<dyn LinOp<T>>>,
    criteria: Vec<Criterion>,
}

impl<T: Scalar> SolverCore<T> {
    fn new(system: Arc<dyn LinOp<T>>, params: &SolverParams<T>) -> Result<Self> {
        let (rows, cols) = system.size();
        if rows != cols {
            return Err(Error::dims("solver", format!("square system, {rows}x{rows}"), format!("{rows}x{cols}")));
        }
        if let Some(p) = &params.preconditioner {
            if p.size() != (rows, rows) {
                let (pr, pc) = p.size();
                return Err(Error::dims("preconditioner", format!("{rows}x{rows}"), format!("{pr}x{pc}")));
            }
        }
        let criteria = params.criteria_list();
        validate_criteria(&criteria)?;
        Ok(SolverCore {
            system,
            preconditioner: params.preconditioner.clone(),
            criteria,
        })
    }

    fn device(&self) -> &Device {
        self.system.device()
    }

    fn check_vectors(&self, b: &DenseMatrix<T>, x: &DenseMatrix<T>) -> Result<()> {
        let n = self.system.size().0;
        if b.shape() != (n, 1) || x.shape() != (n, 1) {
            return Err(Error::dims(
                "solve",
                format!("b: {n}x1, x: {n}x1"),
                format!("b: {}x{}, x: {}x{}", b.rows(), b.cols(), x.rows(), x.cols()),
            ));
        }
        Ok(())
    }

    /// `out := M^{-1} v`, or a copy of `v` without a preconditioner.
    fn precondition(&self, v: &DenseMatrix<T>, out: &mut DenseMatrix<T>) -> Result<()> {
        match &self.preconditioner {
            Some(p) => p.apply(v, out),
            None => out.copy_from(v),
        }
    }

    /// `r := b - A x`
    fn residual(&self, b: &DenseMatrix<T>, x: &DenseMatrix<T>, r: &mut DenseMatrix<T>) -> Result<()> {
        r.copy_from(b)?;
        self.system.apply_advanced(-T::one(), x, T::one(), r)
    }
}

/// Breakdown threshold for type `T`: `1e-30`, raised where squaring it would
/// underflow.
fn tiny<T: Scalar>() -> T {
    T::from_f64(BREAKDOWN_TOL).max(T::min_positive_value().sqrt())
}

/// Tracks iterations, residual history and stopping decisions during a solve.
struct Progress<'c> {
    criteria: &'c [Criterion],
    rhs_norm: f64,
    initial_residual: f64,
    iterations: usize,
    history: Vec<f64>,
    checks: usize,
}

impl<'c> Progress<'c> {
    fn new(criteria: &'c [Criterion], rhs_norm: f64, initial_residual: f64) -> Self {
        Progress {
            criteria,
            rhs_norm,
            initial_residual,
            iterations: 0,
            history: Vec::new(),
            checks: 0,
        }
    }

    /// Records one finished iteration and evaluates the criteria.
    fn step(&mut self, residual: f64) -> Option<StopReason> {
        self.iterations += 1;
        self.history.push(residual);
        self.checks += 1;
        check_criteria(self.criteria, self.iterations, residual, self.rhs_norm)
    }

    fn finish(self, reason: StopReason) -> ConvergenceLog {
        ConvergenceLog {
            iterations: self.iterations,
            residual_history: self.history,
            initial_residual: self.initial_residual,
            rhs_norm: self.rhs_norm,
            converged: reason == StopReason::Residual,
            stop_reason: reason,
            criteria_checks: self.checks,
        }
    }
}

/// Scale against which residuals count as exhausted: `||b||`, or the initial
/// residual when `b == 0`.
fn residual_scale<T: Scalar>(b_norm: T, r0_norm: T) -> T {
    if b_norm > T::zero() {
        b_norm
    } else {
        r0_norm
    }
}

fn check_finite<T: Scalar>(v: T, iteration: usize) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NumericFailure { iteration })
    }
}
