use sparsekit::prelude::*;
use sparsekit::gen::{random_sparse, random_vector};
use sparsekit::sparse::coo_from_csr;
use sparsekit_testkit as oracle;

fn cases() -> impl Iterator<Item = (CsrMatrix<f64>, Vec<f64>)> {
    (0..200u64).map(|seed| {
        let rows = 1 + (seed as usize * 37) % 200;
        let cols = 1 + (seed as usize * 91 + 13) % 200;
        let density = 0.1 * ((seed % 10) as f64 + 1.0) / 10.0;
        let a = random_sparse(&Device::reference(), rows, cols, density, seed).unwrap();
        (a, random_vector(cols, 1000 + seed))
    })
}

#[test]
fn csr_and_coo_match_dense_matvec() {
    let dev = Device::reference();
    for (a, b) in cases() {
        let dense = oracle::densify(a.rows(), a.cols(), a.triplets());
        let want = oracle::matvec(&dense, &b);
        // per-component magnitude sum(|a_ij| |b_j|)
        let abs: oracle::Dense = dense.iter().map(|r| r.iter().map(|v| v.abs()).collect()).collect();
        let scales = oracle::matvec(&abs, &b.iter().map(|v| v.abs()).collect::<Vec<_>>());
        let b = DenseMatrix::vector(&dev, &b);

        let mut x_csr = DenseMatrix::zeros(&dev, a.rows(), 1);
        a.apply(&b, &mut x_csr).unwrap();
        let mut x_coo = DenseMatrix::zeros(&dev, a.rows(), 1);
        coo_from_csr(&a).apply(&b, &mut x_coo).unwrap();

        for ((got, want), scale) in x_csr.iter().zip(&want).zip(&scales) {
            assert!((got - want).abs() <= 1e-12 * scale, "{got} vs {want}");
        }
        assert!(x_csr.bitwise_eq(&x_coo));
    }
}

#[test]
fn parallel_spmv_is_bitwise_reference() {
    let reference = Device::reference();
    for threads in [2, 4, 8] {
        let par = Device::parallel_host(threads).unwrap();
        for (a, b) in cases().step_by(7) {
            let b = DenseMatrix::vector(&reference, &b);
            let mut want = DenseMatrix::zeros(&reference, a.rows(), 1);
            a.apply(&b, &mut want).unwrap();

            let ap = a.to_device(&par);
            let bp = b.to_device(&par);
            let mut got = DenseMatrix::zeros(&par, a.rows(), 1);
            ap.apply(&bp, &mut got).unwrap();
            assert!(got.bitwise_eq(&want));
            let mut got_coo = DenseMatrix::zeros(&par, a.rows(), 1);
            coo_from_csr(&ap).apply(&bp, &mut got_coo).unwrap();
            assert!(got_coo.bitwise_eq(&want));
        }
    }
}

#[test]
fn advanced_apply_matches_oracle() {
    let dev = Device::reference();
    let (a, b) = cases().nth(17).unwrap();
    let dense = oracle::densify(a.rows(), a.cols(), a.triplets());
    let ab = oracle::matvec(&dense, &b);
    let x0 = random_vector::<f64>(a.rows(), 5);
    let mut x = DenseMatrix::vector(&dev, &x0);
    apply_advanced(&a, 2.0, &DenseMatrix::vector(&dev, &b), -0.5, &mut x).unwrap();
    for ((got, ab), x0) in x.iter().zip(&ab).zip(&x0) {
        assert!((got - (2.0 * ab - 0.5 * x0)).abs() <= 1e-12 * (1.0 + ab.abs()));
    }
}
