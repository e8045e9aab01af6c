//! Restarted GMRES with right preconditioning.
//!
//! Each cycle builds an Arnoldi basis with modified Gram-Schmidt. Every new
//! Hessenberg column is reduced right away by the stored Givens rotations
//! plus one new rotation, which also updates the residual estimate
//! `|g[j + 1]|`. The criteria are checked after every column, not only at the
//! end of a cycle. On stop or restart the small triangular system is solved
//! and `x` is updated.
//!
//! With right preconditioning the monitored residual is the residual of the
//! original system `A x = b`.

use std::sync::Arc;

use super::{
    check_finite, residual_scale, tiny, ConvergenceLog, Criterion, Iterate, Progress, Solver,
    SolverCore, SolverKind, SolverParams, Step,
};
use crate::dense::{axpy, dot, norm2, scal, DenseMatrix};
use crate::device::Device;
use crate::linop::LinOp;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Rotation `(c, s, r)` with `c a + s b = r` and `-s a + c b = 0`.
pub fn givens_rotation<T: Scalar>(a: T, b: T) -> (T, T, T) {
    if b == T::zero() {
        (T::one(), T::zero(), a)
    } else if a == T::zero() {
        (T::zero(), T::one(), b)
    } else {
        let r = a.hypot(b);
        (a / r, b / r, r)
    }
}

#[derive(Clone)]
pub struct Gmres<T> {
    core: SolverCore<T>,
    krylov_dim: usize,
}

impl<T: Scalar> Gmres<T> {
    pub fn new(system: Arc<dyn LinOp<T>>, params: &SolverParams<T>) -> Result<Self> {
        if params.krylov_dim == 0 {
            return Err(Error::InvalidArgument("krylov_dim must be at least 1".into()));
        }
        Ok(Gmres {
            core: SolverCore::new(system, params)?,
            krylov_dim: params.krylov_dim,
        })
    }

    pub fn krylov_dim(&self) -> usize {
        self.krylov_dim
    }
}

/// Solves `A x = b` with restarted GMRES, overwriting `x`.
pub fn gmres_solve<T: Scalar>(
    system: Arc<dyn LinOp<T>>,
    b: &DenseMatrix<T>,
    x: &mut DenseMatrix<T>,
    params: &SolverParams<T>,
) -> Result<ConvergenceLog> {
    Gmres::new(system, params)?.solve(b, x)
}

/// Arnoldi state of one restart cycle.
struct Cycle<T: Scalar> {
    basis: Vec<DenseMatrix<T>>,
    /// Column `j` holds the rotated Hessenberg column, `krylov_dim + 1` long.
    hessenberg: Vec<Vec<T>>,
    cos: Vec<T>,
    sin: Vec<T>,
    /// Rotated right-hand side of the least-squares problem.
    g: Vec<T>,
}

impl<T: Scalar> Cycle<T> {
    fn new(dev: &Device, n: usize, m: usize) -> Self {
        Cycle {
            basis: (0..=m).map(|_| DenseMatrix::zeros(dev, n, 1)).collect(),
            hessenberg: vec![vec![T::zero(); m + 1]; m],
            cos: vec![T::zero(); m],
            sin: vec![T::zero(); m],
            g: vec![T::zero(); m + 1],
        }
    }

    /// Least-squares coefficients for the first `k` basis vectors.
    fn coefficients(&self, k: usize) -> Vec<T> {
        let mut y = self.g[..k].to_vec();
        for i in (0..k).rev() {
            let mut s = y[i];
            for j in i + 1..k {
                s = s - self.hessenberg[j][i] * y[j];
            }
            y[i] = s / self.hessenberg[i][i];
        }
        y
    }

    /// `x += M^{-1} V_k y`
    fn update(&self, core: &SolverCore<T>, k: usize, x: &mut DenseMatrix<T>) -> Result<()> {
        let y = self.coefficients(k);
        let mut combo = DenseMatrix::zeros(x.device(), x.rows(), 1);
        for (v, &c) in self.basis.iter().zip(&y) {
            axpy(c, v, &mut combo)?;
        }
        match &core.preconditioner {
            Some(p) => {
                let mut z = DenseMatrix::zeros(x.device(), x.rows(), 1);
                p.apply(&combo, &mut z)?;
                axpy(T::one(), &z, x)
            }
            None => axpy(T::one(), &combo, x),
        }
    }
}

/// Iterate of an unfinished cycle, formed only when a monitor asks for it.
pub(crate) struct PartialIterate<'a, T: Scalar> {
    core: &'a SolverCore<T>,
    cycle: &'a Cycle<T>,
    start: &'a DenseMatrix<T>,
    columns: usize,
}

impl<T: Scalar> PartialIterate<'_, T> {
    pub(crate) fn form(&self) -> Result<DenseMatrix<T>> {
        let mut x = self.start.clone();
        self.cycle.update(self.core, self.columns, &mut x)?;
        Ok(x)
    }
}

impl<T: Scalar> Solver<T> for Gmres<T> {
    fn kind(&self) -> SolverKind {
        SolverKind::Gmres
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
        let m = self.krylov_dim;
        let tiny = tiny::<T>();

        let mut cycle = Cycle::new(dev, n, m);
        let mut w = DenseMatrix::zeros(dev, n, 1);
        let mut z = DenseMatrix::zeros(dev, n, 1);

        core.residual(b, x, &mut w)?;
        let b_norm = norm2(b);
        let r0_norm = norm2(&w);
        let scale = residual_scale(b_norm, r0_norm);
        let mut progress = Progress::new(&core.criteria, b_norm.to_f64(), r0_norm.to_f64());
        let mut restart = false;

        loop {
            if restart {
                core.residual(b, x, &mut w)?;
            }
            restart = true;
            let beta = check_finite(norm2(&w), progress.iterations + 1)?;
            if beta <= tiny * scale {
                // x is exact to working precision; remaining iterations are no-ops
                loop {
                    let stop = progress.step(beta.to_f64());
                    monitor(&Step {
                        iteration: progress.iterations,
                        residual: beta.to_f64(),
                        iterate: Iterate::Explicit(x),
                    });
                    if let Some(reason) = stop {
                        return Ok(progress.finish(reason));
                    }
                }
            }
            cycle.basis[0].copy_from(&w)?;
            scal(T::one() / beta, &mut cycle.basis[0]);
            cycle.g.fill(T::zero());
            cycle.g[0] = beta;
            let start = x.clone();

            for j in 0..m {
                let k = progress.iterations + 1;
                // w = A M^{-1} v_j
                core.precondition(&cycle.basis[j], &mut z)?;
                core.system.apply(&z, &mut w)?;

                let column = &mut cycle.hessenberg[j];
                for i in 0..=j {
                    let h = dot(&w, &cycle.basis[i])?;
                    column[i] = h;
                    axpy(-h, &cycle.basis[i], &mut w)?;
                }
                let h_next = check_finite(norm2(&w), k)?;
                column[j + 1] = h_next;

                for i in 0..j {
                    let (c, s) = (cycle.cos[i], cycle.sin[i]);
                    let (hi, hk) = (column[i], column[i + 1]);
                    column[i] = c * hi + s * hk;
                    column[i + 1] = c * hk - s * hi;
                }
                let (c, s, r) = givens_rotation(column[j], column[j + 1]);
                cycle.cos[j] = c;
                cycle.sin[j] = s;
                column[j] = r;
                column[j + 1] = T::zero();
                let gj = cycle.g[j];
                cycle.g[j] = c * gj;
                cycle.g[j + 1] = -s * gj;

                let estimate = check_finite(cycle.g[j + 1].abs(), k)?;
                let stop = progress.step(estimate.to_f64());
                monitor(&Step {
                    iteration: k,
                    residual: estimate.to_f64(),
                    iterate: Iterate::Gmres(PartialIterate {
                        core,
                        cycle: &cycle,
                        start: &start,
                        columns: j + 1,
                    }),
                });

                let happy = h_next <= tiny * scale;
                if stop.is_some() || happy || j + 1 == m {
                    if r == T::zero() {
                        return Err(Error::Breakdown {
                            iteration: k,
                            reason: "singular Hessenberg matrix",
                        });
                    }
                    cycle.update(core, j + 1, x)?;
                    if let Some(reason) = stop {
                        return Ok(progress.finish(reason));
                    }
                    break;
                }
                cycle.basis[j + 1].copy_from(&w)?;
                scal(T::one() / h_next, &mut cycle.basis[j + 1]);
            }
        }
    }
}

impl<T: Scalar> LinOp<T> for Gmres<T> {
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
