use std::path::{Path, PathBuf};

use sparsekit::config::{build_solver, parse_config_file, SolverConfig};
use sparsekit::dense::DenseMatrix;
use sparsekit::device::{create_device, Device};
use sparsekit::gen::random_vector;
use sparsekit::linop::LinOp;
use sparsekit::mmio::read_matrix_market;
use sparsekit::scalar::{Precision, Scalar};
use sparsekit::solver::{Criterion, SolverKind};
use sparsekit::sparse::{Format, SparseMatrix};

use crate::record::{BenchRecord, Status};
use crate::timer::{median, Timer};
use crate::Result;

/// Seed of the random SpMV input vector unless overridden.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone)]
pub struct SpmvOptions {
    pub matrix: PathBuf,
    pub format: Format,
    pub device: String,
    pub threads: Option<usize>,
    pub precision: Precision,
    pub warmups: usize,
    pub reps: usize,
    pub seed: u64,
}

impl SpmvOptions {
    pub fn new(matrix: impl Into<PathBuf>) -> Self {
        SpmvOptions {
            matrix: matrix.into(),
            format: Format::Csr,
            device: "reference".into(),
            threads: None,
            precision: Precision::Single,
            warmups: 3,
            reps: 20,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub matrix: PathBuf,
    /// JSON solver configuration; its criteria are replaced by the fixed
    /// iteration count.
    pub config: Option<PathBuf>,
    /// Overrides the solver type of the configuration.
    pub solver: Option<SolverKind>,
    pub device: String,
    pub threads: Option<usize>,
    pub precision: Precision,
    pub iters: usize,
    pub warmups: usize,
    pub reps: usize,
}

impl SolverOptions {
    pub fn new(matrix: impl Into<PathBuf>) -> Self {
        SolverOptions {
            matrix: matrix.into(),
            config: None,
            solver: None,
            device: "reference".into(),
            threads: None,
            precision: Precision::Double,
            iters: 1000,
            warmups: 3,
            reps: 20,
        }
    }
}

fn matrix_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn device_for(name: &str, threads: Option<usize>) -> Result<Device> {
    Ok(create_device(name, 0, threads)?)
}

/// Times `x = A b` for the Matrix Market file named in `opts`.
pub fn bench_spmv(opts: &SpmvOptions, timer: &mut dyn Timer) -> Result<BenchRecord> {
    let device = device_for(&opts.device, opts.threads)?;
    let name = matrix_name(&opts.matrix);
    match opts.precision {
        Precision::Single => {
            let a = read_matrix_market::<f32, i32>(&device, &opts.matrix, opts.format)?;
            bench_spmv_matrix(&name, &a, &device, opts.warmups, opts.reps, opts.seed, timer)
        }
        Precision::Double => {
            let a = read_matrix_market::<f64, i32>(&device, &opts.matrix, opts.format)?;
            bench_spmv_matrix(&name, &a, &device, opts.warmups, opts.reps, opts.seed, timer)
        }
    }
}

/// Times `x = A b` for an in-memory matrix. `b` holds seeded random values.
pub fn bench_spmv_matrix<T: Scalar>(
    name: &str,
    a: &SparseMatrix<T, i32>,
    device: &Device,
    warmups: usize,
    reps: usize,
    seed: u64,
    timer: &mut dyn Timer,
) -> Result<BenchRecord> {
    assert!(reps > 0, "at least one timed repetition is required");
    let a = a.to_device(device);
    let (rows, cols) = a.size();
    let b = DenseMatrix::column(device, random_vector::<T>(cols, seed));
    let mut x = DenseMatrix::zeros(device, rows, 1);
    let mut times = Vec::with_capacity(reps);

    for _ in 0..warmups {
        a.apply(&b, &mut x)?;
    }
    let mut status = Ok(());
    for _ in 0..reps {
        times.push(timer.time(&mut || status = a.apply(&b, &mut x)));
        std::mem::replace(&mut status, Ok(()))?;
    }

    let time_s = median(&times);
    let flops = 2.0 * a.nnz() as f64;
    Ok(BenchRecord {
        matrix: name.to_string(),
        rows,
        cols,
        nnz: a.nnz(),
        format: a.format().as_str().to_string(),
        device: device.name().to_string(),
        threads: device.thread_count(),
        precision: T::PRECISION.as_str().to_string(),
        kernel: "spmv".into(),
        reps,
        time_s,
        gflops: flops / time_s / 1e9,
        speedup: None,
        p_overhead_pct: None,
        t_overhead_s: None,
        warmups,
        iterations: None,
        status: Status::Ok,
        notes: format!("seed={seed}"),
    })
}

/// Times fixed-iteration solves of `A x = b` with `b = 1`, `x0 = 0`.
///
/// A breakdown yields a failed record rather than an error.
pub fn bench_solver(opts: &SolverOptions, timer: &mut dyn Timer) -> Result<BenchRecord> {
    let device = device_for(&opts.device, opts.threads)?;
    let name = matrix_name(&opts.matrix);
    let mut config = match &opts.config {
        Some(path) => parse_config_file(path)?,
        None => SolverConfig {
            solver: opts.solver.unwrap_or(SolverKind::Gmres),
            krylov_dim: None,
            preconditioner: None,
            criteria: vec![],
        },
    };
    if let Some(kind) = opts.solver {
        config.solver = kind;
        if kind != SolverKind::Gmres {
            config.krylov_dim = None;
        }
    }
    match opts.precision {
        Precision::Single => {
            let a = read_matrix_market::<f32, i32>(&device, &opts.matrix, Format::Csr)?.to_csr();
            bench_solver_matrix(&name, &a, &config, &device, opts.iters, opts.warmups, opts.reps, timer)
        }
        Precision::Double => {
            let a = read_matrix_market::<f64, i32>(&device, &opts.matrix, Format::Csr)?.to_csr();
            bench_solver_matrix(&name, &a, &config, &device, opts.iters, opts.warmups, opts.reps, timer)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn bench_solver_matrix<T: Scalar>(
    name: &str,
    a: &sparsekit::sparse::CsrMatrix<T, i32>,
    config: &SolverConfig,
    device: &Device,
    iters: usize,
    warmups: usize,
    reps: usize,
    timer: &mut dyn Timer,
) -> Result<BenchRecord> {
    assert!(reps > 0, "at least one timed repetition is required");
    let mut config = config.clone();
    config.criteria = vec![Criterion::Iteration { max_iters: iters }];
    let mut record = BenchRecord {
        matrix: name.to_string(),
        rows: a.rows(),
        cols: a.cols(),
        nnz: a.nnz(),
        format: Format::Csr.as_str().to_string(),
        device: device.name().to_string(),
        threads: device.thread_count(),
        precision: T::PRECISION.as_str().to_string(),
        kernel: config.solver.as_str().to_string(),
        reps,
        time_s: 0.0,
        gflops: 0.0,
        speedup: None,
        p_overhead_pct: None,
        t_overhead_s: None,
        warmups,
        iterations: None,
        status: Status::Ok,
        notes: String::new(),
    };
    let fail = |mut record: BenchRecord, e: sparsekit::Error| {
        record.status = Status::Failed;
        record.notes = format!("{}: {e}", e.kind());
        record
    };

    let solver = match build_solver(&config, device, a) {
        Ok(s) => s,
        Err(e) => return Ok(fail(record, e)),
    };
    let b = DenseMatrix::filled(device, a.rows(), 1, T::one());
    let mut x = DenseMatrix::zeros(device, a.rows(), 1);
    let mut times = Vec::with_capacity(reps);
    let mut iterations = 0;

    for k in 0..warmups + reps {
        x.fill(T::zero());
        let mut outcome = None;
        let t = timer.time(&mut || outcome = Some(solver.solve(&b, &mut x)));
        match outcome.expect("kernel ran") {
            Ok(log) => iterations = log.iterations,
            Err(e) => return Ok(fail(record, e)),
        }
        if k >= warmups {
            times.push(t);
        }
    }

    let time_s = median(&times);
    record.time_s = time_s;
    record.gflops = 2.0 * a.nnz() as f64 * iterations as f64 / time_s / 1e9;
    record.iterations = Some(iterations);
    record.notes = format!("time_per_iter_s={}", time_s / iterations as f64);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timer::StubTimer;
    use sparsekit::gen;
    use sparsekit::mmio::write_matrix_market;
    use sparsekit::sparse::CsrMatrix;

    fn write(dir: &Path, name: &str, m: CsrMatrix<f64, i32>) -> PathBuf {
        let path = dir.join(format!("{name}.mtx"));
        write_matrix_market(&SparseMatrix::Csr(m), &path).unwrap();
        path
    }

    #[test]
    fn spmv_with_stub_timer() {
        let dir = tempfile::tempdir().unwrap();
        let dev = Device::reference();
        let path = write(dir.path(), "diag1000", gen::diagonal(&dev, &vec![2.0; 1000]).unwrap());

        let mut timer = StubTimer::constant(1e-3);
        let r = bench_spmv(&SpmvOptions::new(&path), &mut timer).unwrap();
        assert_eq!(r.gflops, 0.002);
        assert_eq!(r.gflops * r.time_s * 1e9, 2.0 * r.nnz as f64);
        assert_eq!((r.matrix.as_str(), r.nnz, r.precision.as_str()), ("diag1000", 1000, "single"));

        let mut timer = StubTimer::new(vec![1e-3, 2e-3, 3e-3, 2e-3, 1e-3]);
        let mut opts = SpmvOptions::new(&path);
        opts.reps = 5;
        opts.warmups = 0;
        assert_eq!(bench_spmv(&opts, &mut timer).unwrap().time_s, 2e-3);

        let mut timer = StubTimer::constant(1e-3);
        opts.warmups = 2;
        opts.reps = 3;
        bench_spmv(&opts, &mut timer).unwrap();
        assert_eq!(timer.calls(), 3);
    }

    #[test]
    fn solver_protocol() {
        let dir = tempfile::tempdir().unwrap();
        let dev = Device::reference();
        let id = write(dir.path(), "id", CsrMatrix::identity(&dev, 10).unwrap());
        let mut opts = SolverOptions::new(&id);
        opts.solver = Some(SolverKind::Cg);
        opts.iters = 10;
        opts.warmups = 1;
        opts.reps = 2;
        let r = bench_solver(&opts, &mut StubTimer::constant(1e-3)).unwrap();
        assert!(r.is_ok(), "{}", r.notes);
        assert_eq!(r.iterations, Some(10));
        assert_eq!(r.kernel, "cg");

        let lap = write(dir.path(), "lap16", gen::laplacian_2d(&dev, 16).unwrap());
        let mut opts = SolverOptions::new(&lap);
        opts.iters = 100;
        opts.reps = 1;
        opts.warmups = 0;
        let r = bench_solver(&opts, &mut StubTimer::constant(1e-2)).unwrap();
        assert_eq!((r.kernel.as_str(), r.iterations), ("gmres", Some(100)));

        let zero = write(dir.path(), "zero", CsrMatrix::from_triplets(&dev, 4, 4, &[]).unwrap());
        let mut opts = SolverOptions::new(&zero);
        opts.solver = Some(SolverKind::Cg);
        let r = bench_solver(&opts, &mut StubTimer::constant(1e-3)).unwrap();
        assert_eq!(r.status, Status::Failed);
        assert!(r.notes.contains("breakdown"), "{}", r.notes);
    }
}
