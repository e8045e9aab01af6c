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

/// Preconditioned conjugate gradient squared for general nonsingular systems.
#[derive(Clone)]
pub struct Cgs<T> {
    core: SolverCore<T>,
}

impl<T: Scalar> Cgs<T> {
    pub fn new(system: Arc<dyn LinOp<T>>, params: &SolverParams<T>) -> Result<Self> {
        Ok(Cgs {
            core: SolverCore::new(system, params)?,
        })
    }
}

/// Solves `A x = b` with CGS, overwriting `x`.
pub fn cgs_solve<T: Scalar>(
    system: Arc<dyn LinOp<T>>,
    b: &DenseMatrix<T>,
    x: &mut DenseMatrix<T>,
    params: &SolverParams<T>,
) -> Result<ConvergenceLog> {
    Cgs::new(system, params)?.solve(b, x)
}

impl<T: Scalar> Solver<T> for Cgs<T> {
    fn kind(&self) -> SolverKind {
        SolverKind::Cgs
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
        let zeros = || DenseMatrix::<T>::zeros(dev, n, 1);

        let mut r = zeros();
        core.residual(b, x, &mut r)?;
        let r_tld = r.clone();
        let r_tld_norm = norm2(&r_tld);
        let (mut u, mut p, mut q) = (zeros(), zeros(), zeros());
        let (mut p_hat, mut v_hat, mut u_hat, mut t) = (zeros(), zeros(), zeros(), zeros());
        let mut rho_prev = T::one();

        let b_norm = norm2(b);
        let mut r_norm = norm2(&r);
        let scale = residual_scale(b_norm, r_norm);
        let mut exhausted = r_norm <= tiny * scale;
        let mut progress = Progress::new(&core.criteria, b_norm.to_f64(), r_norm.to_f64());

        loop {
            let k = progress.iterations + 1;
            if !exhausted {
                let rho = check_finite(dot(&r_tld, &r)?, k)?;
                if rho.abs() <= tiny * r_tld_norm * r_norm {
                    return Err(Error::Breakdown {
                        iteration: k,
                        reason: "rho vanished",
                    });
                }
                if k == 1 {
                    u.copy_from(&r)?;
                    p.copy_from(&u)?;
                } else {
                    let beta = rho / rho_prev;
                    // u = r + beta q
                    u.copy_from(&r)?;
                    axpy(beta, &q, &mut u)?;
                    // p = u + beta (q + beta p)
                    axpby(T::one(), &q, beta, &mut p)?;
                    axpby(T::one(), &u, beta, &mut p)?;
                }
                core.precondition(&p, &mut p_hat)?;
                core.system.apply(&p_hat, &mut v_hat)?;
                let sigma = check_finite(dot(&r_tld, &v_hat)?, k)?;
                if sigma == T::zero() || sigma.abs() <= tiny * r_tld_norm * norm2(&v_hat) {
                    return Err(Error::Breakdown {
                        iteration: k,
                        reason: "r~^T A p vanished",
                    });
                }
                let alpha = rho / sigma;
                // q = u - alpha v_hat
                q.copy_from(&u)?;
                axpy(-alpha, &v_hat, &mut q)?;
                // u_hat = M^{-1} (u + q)
                t.copy_from(&u)?;
                axpy(T::one(), &q, &mut t)?;
                core.precondition(&t, &mut u_hat)?;
                axpy(alpha, &u_hat, x)?;
                core.system.apply(&u_hat, &mut t)?;
                axpy(-alpha, &t, &mut r)?;
                rho_prev = rho;
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
            if r_norm <= tiny * scale {
                exhausted = true;
            }
        }
    }
}

impl<T: Scalar> LinOp<T> for Cgs<T> {
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
