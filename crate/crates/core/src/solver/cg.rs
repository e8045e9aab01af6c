use std::sync::Arc;

use super::{
    check_finite, residual_scale, tiny, ConvergenceLog, Criterion, Iterate, Progress, Solver,
    SolverCore, SolverKind, SolverParams, Step,
};
use crate::dense::{axpby, axpy, dot, norm2, DenseMatrix};
use crate::device::Device;
use crate::linop::LinOp;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Preconditioned conjugate gradient for symmetric positive definite systems.
///
/// The stopping test uses the recurrence residual, so no extra SpMV is spent
/// per iteration.
#[derive(Clone)]
pub struct Cg<T> {
    core: SolverCore<T>,
}

impl<T: Scalar> Cg<T> {
    pub fn new(system: Arc<dyn LinOp<T>>, params: &SolverParams<T>) -> Result<Self> {
        Ok(Cg {
            core: SolverCore::new(system, params)?,
        })
    }
}

/// Solves `A x = b` with CG, overwriting `x`.
pub fn cg_solve<T: Scalar>(
    system: Arc<dyn LinOp<T>>,
    b: &DenseMatrix<T>,
    x: &mut DenseMatrix<T>,
    params: &SolverParams<T>,
) -> Result<ConvergenceLog> {
    Cg::new(system, params)?.solve(b, x)
}

impl<T: Scalar> Solver<T> for Cg<T> {
    fn kind(&self) -> SolverKind {
        SolverKind::Cg
    }

    fn criteria(&self) -> &[Criterion] {
        &self.core.criteria
    }

    fn solve_monitored(
        &self,
        b: &DenseMatrix<T>,
        x: &mut DenseMatrix<T>,
        monitor: &mut dyn FnMut(&Step<'_, T>),
    ) -> Result<ConvergenceLog> {
        let core = &self.core;
        core.check_vectors(b, x)?;
        let dev = core.device();
        let n = b.rows();
        let tiny = tiny::<T>();

        let mut r = DenseMatrix::zeros(dev, n, 1);
        let mut z = DenseMatrix::zeros(dev, n, 1);
        let mut q = DenseMatrix::zeros(dev, n, 1);
        core.residual(b, x, &mut r)?;
        core.precondition(&r, &mut z)?;
        let mut p = z.clone();
        let mut rz = dot(&r, &z)?;

        let b_norm = norm2(b);
        let mut r_norm = norm2(&r);
        let scale = residual_scale(b_norm, r_norm);
        let mut exhausted = r_norm <= tiny * scale;
        let mut progress = Progress::new(&core.criteria, b_norm.to_f64(), r_norm.to_f64());

        loop {
            let k = progress.iterations + 1;
            if !exhausted {
                core.system.apply(&p, &mut q)?;
                let pq = check_finite(dot(&p, &q)?, k)?;
                if pq <= tiny * dot(&p, &p)? {
                    return Err(Error::Breakdown {
                        iteration: k,
                        reason: "p^T A p is not positive",
                    });
                }
                let alpha = rz / pq;
                axpy(alpha, &p, x)?;
                axpy(-alpha, &q, &mut r)?;
                r_norm = check_finite(norm2(&r), k)?;
            }
            let stop = progress.step(r_norm.to_f64());
            monitor(&Step {
                iteration: k,
                residual: r_norm.to_f64(),
                iterate: Iterate::Explicit(x),
            });
            if let Some(reason) = stop {
                return Ok(progress.finish(reason));
            }
            if exhausted || r_norm <= tiny * scale {
                // x is exact to working precision; remaining iterations are no-ops
                exhausted = true;
                continue;
            }
            core.precondition(&r, &mut z)?;
            let rz_next = check_finite(dot(&r, &z)?, k)?;
            if rz.abs() <= tiny * tiny {
                return Err(Error::Breakdown {
                    iteration: k,
                    reason: "r^T z vanished",
                });
            }
            let beta = rz_next / rz;
            axpby(T::one(), &z, beta, &mut p)?;
            rz = rz_next;
        }
    }
}

impl<T: Scalar> LinOp<T> for Cg<T> {
    fn size(&self) -> (usize, usize) {
        self.core.system.size()
    }

    fn device(&self) -> &Device {
        self.core.device()
    }

    fn apply(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<()> {
        self.solve(b, x).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::StopReason;
    use crate::sparse::CsrMatrix;

    fn dev() -> Device {
        Device::reference()
    }

    fn diag(values: &[f64]) -> Arc<dyn LinOp<f64>> {
        let t: Vec<_> = values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Arc::new(CsrMatrix::<f64, i32>::from_triplets(&dev(), values.len(), values.len(), &t).unwrap())
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let b = DenseMatrix::filled(&dev(), 4, 1, 1.0);
        let mut x = DenseMatrix::zeros(&dev(), 4, 1);
        let log = cg_solve(diag(&[1.0; 4]), &b, &mut x, &SolverParams::new(1000, 1e-6)).unwrap();
        assert_eq!(log.iterations, 1);
        assert_eq!(log.final_residual(), Some(0.0));
        assert!(log.converged);
        assert_eq!(log.stop_reason, StopReason::Residual);
        assert_eq!(x.to_vec(), vec![1.0; 4]);
    }

    #[test]
    fn diagonal_system_terminates_finitely() {
        let b = DenseMatrix::filled(&dev(), 3, 1, 1.0);
        let mut x = DenseMatrix::zeros(&dev(), 3, 1);
        let log = cg_solve(diag(&[1.0, 2.0, 3.0]), &b, &mut x, &SolverParams::new(1000, 1e-12)).unwrap();
        assert!(log.converged);
        assert!(log.iterations <= 3, "{}", log.iterations);
        for (got, want) in x.iter().zip([1.0, 0.5, 1.0 / 3.0]) {
            assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_matrix_breaks_down() {
        let zero: Arc<dyn LinOp<f64>> =
            Arc::new(CsrMatrix::<f64, i32>::from_triplets(&dev(), 2, 2, &[]).unwrap());
        let b = DenseMatrix::filled(&dev(), 2, 1, 1.0);
        let mut x = DenseMatrix::zeros(&dev(), 2, 1);
        let err = cg_solve(zero, &b, &mut x, &SolverParams::new(10, 1e-6)).unwrap_err();
        assert!(matches!(err, Error::Breakdown { iteration: 1, .. }));
    }

    #[test]
    fn fixed_iterations_run_to_the_limit() {
        let b = DenseMatrix::filled(&dev(), 3, 1, 1.0);
        let mut x = DenseMatrix::zeros(&dev(), 3, 1);
        let log = cg_solve(diag(&[1.0; 3]), &b, &mut x, &SolverParams::fixed_iterations(10)).unwrap();
        assert_eq!(log.iterations, 10);
        assert_eq!(log.stop_reason, StopReason::MaxIters);
        assert!(!log.converged);
        assert_eq!(x.to_vec(), vec![1.0; 3]);
    }

    #[test]
    fn zero_rhs_with_zero_guess() {
        let b = DenseMatrix::zeros(&dev(), 3, 1);
        let mut x = DenseMatrix::zeros(&dev(), 3, 1);
        let log = cg_solve(diag(&[2.0; 3]), &b, &mut x, &SolverParams::new(5, 1e-6)).unwrap();
        assert!(log.converged);
        assert_eq!(log.iterations, 1);
    }

    #[test]
    fn rejects_bad_shapes() {
        let rect: Arc<dyn LinOp<f64>> =
            Arc::new(CsrMatrix::<f64, i32>::from_triplets(&dev(), 2, 3, &[]).unwrap());
        assert!(Cg::new(rect, &SolverParams::new(5, 1e-6)).is_err());
        let solver = Cg::new(diag(&[1.0; 3]), &SolverParams::new(5, 1e-6)).unwrap();
        let mut x = DenseMatrix::zeros(&dev(), 2, 1);
        assert!(matches!(
            solver.solve(&DenseMatrix::zeros(&dev(), 3, 1), &mut x),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
