use std::sync::Arc;

use serde_json::{json, Value};
use sparsekit::config::{config_solve, parse_config_file};
use sparsekit::gen::{laplacian_2d, random_spd};
use sparsekit::prelude::*;

fn reference_tree() -> Value {
    serde_json::from_str(include_str!("fixtures/gmres_jacobi.json")).unwrap()
}

fn direct(kind: &str, prec: &str, a: &CsrMatrix<f64>, b: &DenseMatrix<f64>) -> (ConvergenceLog, DenseMatrix<f64>) {
    let mut params = SolverParams::new(1000, 1e-6).krylov_dim(30);
    match prec {
        "jacobi" => params = params.preconditioner(Arc::new(Jacobi::new(a, 1).unwrap())),
        "ilu" => params = params.preconditioner(Arc::new(Ilu::new(a).unwrap())),
        "ic" => params = params.preconditioner(Arc::new(Ic::new(a).unwrap())),
        _ => {}
    }
    let system: Arc<dyn LinOp<f64>> = Arc::new(a.clone());
    let mut x = DenseMatrix::zeros(a.device(), a.rows(), 1);
    let log = match kind {
        "cg" => cg_solve(system, b, &mut x, &params),
        "cgs" => cgs_solve(system, b, &mut x, &params),
        _ => gmres_solve(system, b, &mut x, &params),
    }
    .unwrap();
    (log, x)
}

#[test]
fn config_and_direct_construction_agree() {
    let dev = Device::reference();
    let matrices = [laplacian_2d::<f64, i32>(&dev, 12).unwrap(), random_spd(&dev, 70, 0.06, 4).unwrap()];
    for a in &matrices {
        let b = DenseMatrix::filled(&dev, a.rows(), 1, 1.0);
        for (kind, ty) in [("cg", "solver::Cg"), ("cgs", "solver::Cgs"), ("gmres", "solver::Gmres")] {
            for prec in ["none", "jacobi", "ilu", "ic"] {
                let mut tree = reference_tree();
                tree["type"] = json!(ty);
                if kind != "gmres" {
                    tree.as_object_mut().unwrap().remove("krylov_dim");
                }
                match prec {
                    "none" => {
                        tree.as_object_mut().unwrap().remove("preconditioner");
                    }
                    "jacobi" => {}
                    "ilu" => tree["preconditioner"] = json!({"type": "preconditioner::Ilu"}),
                    _ => tree["preconditioner"] = json!({"type": "preconditioner::Ic"}),
                }
                let mut x = DenseMatrix::zeros(&dev, a.rows(), 1);
                let log = config_solve(&tree, &dev, a, &b, &mut x).unwrap();
                let (want_log, want_x) = direct(kind, prec, a, &b);
                assert_eq!(log.iterations, want_log.iterations, "{kind}/{prec}");
                assert_eq!(log.stop_reason, want_log.stop_reason, "{kind}/{prec}");
                let scale = norm2(&want_x);
                for (g, w) in x.iter().zip(want_x.iter()) {
                    assert!((g - w).abs() <= 1e-14 * scale, "{kind}/{prec}");
                }
            }
        }
    }
}

#[test]
fn fixture_file_matches_in_memory_tree() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/gmres_jacobi.json");
    assert_eq!(parse_config_file(path).unwrap(), parse_config(&reference_tree()).unwrap());
}

#[test]
fn config_solver_on_parallel_device() {
    let reference = Device::reference();
    let par = Device::parallel_host(4).unwrap();
    let a = laplacian_2d::<f64, i32>(&reference, 10).unwrap();
    let solve = |dev: &Device| {
        let b = DenseMatrix::filled(dev, a.rows(), 1, 1.0);
        let mut x = DenseMatrix::zeros(dev, a.rows(), 1);
        let log = config_solve(&reference_tree(), dev, &a, &b, &mut x).unwrap();
        (log, x)
    };
    let (log_r, x_r) = solve(&reference);
    let (log_p, x_p) = solve(&par);
    assert!(log_r.converged && log_p.converged);
    let scale = norm2(&x_r);
    for (g, w) in x_p.iter().zip(x_r.iter()) {
        assert!((g - w).abs() <= 1e-10 * scale);
    }
}
