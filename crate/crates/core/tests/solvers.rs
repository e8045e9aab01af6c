use std::sync::Arc;

use sparsekit::gen::{diagonal, laplacian_2d, random_spd};
use sparsekit::prelude::*;
use sparsekit::solver::Step;
use sparsekit_testkit as oracle;

type Solve = fn(Arc<dyn LinOp<f64>>, &DenseMatrix<f64>, &mut DenseMatrix<f64>, &SolverParams<f64>) -> Result<ConvergenceLog>;

const SOLVERS: [(&str, Solve); 3] = [("cg", cg_solve), ("cgs", cgs_solve), ("gmres", gmres_solve)];

fn fixtures() -> Vec<(String, CsrMatrix<f64>)> {
    let dev = Device::reference();
    let mut out = vec![
        ("identity".to_string(), CsrMatrix::identity(&dev, 10).unwrap()),
        ("diag".to_string(), diagonal(&dev, &(1..=8).map(f64::from).collect::<Vec<_>>()).unwrap()),
        ("laplace8".to_string(), laplacian_2d(&dev, 8).unwrap()),
        ("laplace16".to_string(), laplacian_2d(&dev, 16).unwrap()),
    ];
    for seed in 0..3 {
        out.push((format!("spd{seed}"), random_spd(&dev, 60 + 20 * seed as usize, 0.05, seed).unwrap()));
    }
    out
}

fn true_relative_residual(a: &CsrMatrix<f64>, b: &[f64], x: &DenseMatrix<f64>) -> f64 {
    let dense = oracle::densify(a.rows(), a.cols(), a.triplets());
    let ax = oracle::matvec(&dense, &x.to_vec());
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
    oracle::vec_norm2(&r) / oracle::vec_norm2(b)
}

#[test]
fn converged_solutions_have_small_true_residual() {
    let dev = Device::reference();
    for (name, a) in fixtures() {
        for (solver, solve) in SOLVERS {
            let b = DenseMatrix::filled(&dev, a.rows(), 1, 1.0);
            let mut x = DenseMatrix::zeros(&dev, a.rows(), 1);
            let log = solve(Arc::new(a.clone()), &b, &mut x, &SolverParams::new(1000, 1e-6)).unwrap();
            assert!(log.converged, "{solver} on {name} did not converge");
            assert_eq!(log.stop_reason, StopReason::Residual);
            let res = true_relative_residual(&a, &b.to_vec(), &x);
            assert!(res <= 1e-6 * (1.0 + 1e-8), "{solver} on {name}: {res}");
            assert_eq!(log.residual_history.len(), log.iterations);
        }
    }
}

#[test]
fn cg_terminates_within_distinct_eigenvalue_count() {
    let dev = Device::reference();
    for k in 1..=12 {
        let a = diagonal::<f64, i32>(&dev, &(1..=k).map(|v| v as f64).collect::<Vec<_>>()).unwrap();
        let b = DenseMatrix::filled(&dev, k, 1, 1.0);
        let mut x = DenseMatrix::zeros(&dev, k, 1);
        let log = cg_solve(Arc::new(a), &b, &mut x, &SolverParams::new(1000, 1e-6)).unwrap();
        assert!(log.converged && log.iterations <= k + 1, "k={k}: {}", log.iterations);
    }
}

#[test]
fn gmres_estimate_tracks_true_residual() {
    let dev = Device::reference();
    let a = laplacian_2d::<f64, i32>(&dev, 16).unwrap();
    let n = a.rows();
    let b = DenseMatrix::filled(&dev, n, 1, 1.0);
    let b_norm = norm2(&b);
    let a = Arc::new(a);
    let solver = Gmres::new(a.clone(), &SolverParams::new(1000, 1e-6).krylov_dim(20)).unwrap();
    let mut x = DenseMatrix::zeros(&dev, n, 1);
    let mut checks = Vec::new();
    let log = solver
        .solve_monitored(&b, &mut x, &mut |step: &Step<'_, f64>| {
            let xi = step.solution().unwrap();
            let mut r = b.clone();
            apply_advanced(a.as_ref(), -1.0, &xi, 1.0, &mut r).unwrap();
            checks.push((step.iteration, step.residual, norm2(&r)));
        })
        .unwrap();
    assert!(log.converged);
    assert!(log.iterations > 20, "needs a restart to be meaningful");
    assert_eq!(checks.len(), log.iterations);
    assert_eq!(log.criteria_checks, log.iterations);
    for (k, &(it, est, true_res)) in checks.iter().enumerate() {
        assert_eq!(it, k + 1);
        assert!((est - true_res).abs() <= 1e-8 * b_norm, "{it}: {est} vs {true_res}");
        if k % 20 != 0 {
            assert!(est <= checks[k - 1].1 + 1e-14 * b_norm);
        }
    }
}

#[test]
fn solvers_run_on_parallel_device() {
    let par = Device::parallel_host(3).unwrap();
    let a = laplacian_2d::<f64, i32>(&par, 10).unwrap();
    let b = DenseMatrix::filled(&par, a.rows(), 1, 1.0);
    for (solver, solve) in SOLVERS {
        let mut x = DenseMatrix::zeros(&par, a.rows(), 1);
        let log = solve(Arc::new(a.clone()), &b, &mut x, &SolverParams::new(1000, 1e-8)).unwrap();
        assert!(log.converged, "{solver}");
        assert!(true_relative_residual(&a, &b.to_vec(), &x) <= 1e-8 * (1.0 + 1e-8));
    }
}

#[test]
fn fixed_iteration_mode_runs_exactly() {
    let dev = Device::reference();
    // 40 steps on a 256-unknown Laplacian stay well above rounding noise
    let a = laplacian_2d::<f64, i32>(&dev, 16).unwrap();
    let b = DenseMatrix::filled(&dev, a.rows(), 1, 1.0);
    for (solver, solve) in SOLVERS {
        let mut x = DenseMatrix::zeros(&dev, a.rows(), 1);
        let log = solve(Arc::new(a.clone()), &b, &mut x, &SolverParams::fixed_iterations(40)).unwrap();
        assert_eq!((log.iterations, log.stop_reason), (40, StopReason::MaxIters), "{solver}");
    }
}
