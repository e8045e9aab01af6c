//! Benchmark harness for sparsekit SpMV and solver kernels.
//!
//! Every measurement follows the same protocol: inputs are prepared and
//! converted up front, the kernel runs `warmups` untimed times, then `reps`
//! timed times, and the median time is reported. Only the kernel call sits
//! inside the timed region.

mod overhead;
mod record;
mod run;
mod timer;

pub use overhead::{compare, compute_overhead, Overhead};
pub use record::{emit_report, read_report, write_report, BenchRecord, ReportFormat, Status, CSV_HEADER};
pub use run::{bench_solver, bench_spmv, bench_spmv_matrix, SolverOptions, SpmvOptions, DEFAULT_SEED};
pub use timer::{median, StubTimer, SteadyTimer, Timer};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] sparsekit::Error),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Report {
        path: std::path::PathBuf,
        message: String,
    },
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
