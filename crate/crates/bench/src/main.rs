use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sparsekit::scalar::Precision;
use sparsekit::solver::SolverKind;
use sparsekit::sparse::Format;
use sparsekit_bench::{
    bench_solver, bench_spmv, compare, read_report, write_report, BenchRecord, ReportFormat,
    SolverOptions, SpmvOptions, Status, SteadyTimer, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(name = "bench", about = "SpMV and Krylov solver benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time x = A b.
    Spmv {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csr)]
        format: FormatArg,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = PrecisionArg::Single)]
        precision: PrecisionArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Time a fixed number of solver iterations on A x = 1.
    Solver {
        #[arg(long)]
        matrix: PathBuf,
        /// JSON solver configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        iters: u64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
        precision: PrecisionArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Add speedup and overhead columns to a candidate report.
    Compare {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = DeviceArg::Reference)]
    device: DeviceArg,
    /// Worker threads for the omp device; defaults to all hardware threads.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[arg(long, default_value_t = 3)]
    warmups: usize,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format; defaults to the extension of --out, else csv.
    #[arg(long, value_enum)]
    emit: Option<EmitArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csr,
    Coo,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeviceArg {
    Reference,
    Omp,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Single,
    Double,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Cg,
    Cgs,
    Gmres,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    Csv,
    Json,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Single => Precision::Single,
            PrecisionArg::Double => Precision::Double,
        }
    }
}

impl DeviceArg {
    fn name(self) -> &'static str {
        match self {
            DeviceArg::Reference => "reference",
            DeviceArg::Omp => "omp",
        }
    }
}

fn failed(matrix: &Path, kernel: &str, run: &RunArgs, precision: Precision, format: &str, err: &dyn std::fmt::Display) -> BenchRecord {
    BenchRecord {
        matrix: matrix
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        rows: 0,
        cols: 0,
        nnz: 0,
        format: format.into(),
        device: run.device.name().into(),
        threads: run.threads.unwrap_or(1) as usize,
        precision: precision.as_str().into(),
        kernel: kernel.into(),
        reps: run.reps as usize,
        time_s: 0.0,
        gflops: 0.0,
        speedup: None,
        p_overhead_pct: None,
        t_overhead_s: None,
        warmups: run.warmups,
        iterations: None,
        status: Status::Failed,
        notes: err.to_string(),
    }
}

fn emit(records: &[BenchRecord], output: &OutputArgs) -> std::io::Result<()> {
    let format = match (output.emit, &output.out) {
        (Some(EmitArg::Csv), _) => ReportFormat::Csv,
        (Some(EmitArg::Json), _) => ReportFormat::Json,
        (None, Some(path)) => ReportFormat::from_path(path),
        (None, None) => ReportFormat::Csv,
    };
    match &output.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            write_report(records, format, &mut file)?;
            file.flush()
        }
        None => write_report(records, format, &mut std::io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<(Vec<BenchRecord>, OutputArgs), String> {
    Ok(match cli.command {
        Command::Spmv {
            matrix,
            format,
            run,
            precision,
            seed,
            output,
        } => {
            let format = match format {
                FormatArg::Csr => Format::Csr,
                FormatArg::Coo => Format::Coo,
            };
            let opts = SpmvOptions {
                matrix: matrix.clone(),
                format,
                device: run.device.name().into(),
                threads: run.threads.map(|t| t as usize),
                precision: precision.into(),
                warmups: run.warmups,
                reps: run.reps as usize,
                seed,
            };
            let record = bench_spmv(&opts, &mut SteadyTimer)
                .unwrap_or_else(|e| failed(&matrix, "spmv", &run, opts.precision, format.as_str(), &e));
            (vec![record], output)
        }
        Command::Solver {
            matrix,
            config,
            solver,
            iters,
            run,
            precision,
            output,
        } => {
            let solver = solver.map(|s| match s {
                SolverArg::Cg => SolverKind::Cg,
                SolverArg::Cgs => SolverKind::Cgs,
                SolverArg::Gmres => SolverKind::Gmres,
            });
            let opts = SolverOptions {
                matrix: matrix.clone(),
                config,
                solver,
                device: run.device.name().into(),
                threads: run.threads.map(|t| t as usize),
                precision: precision.into(),
                iters: iters as usize,
                warmups: run.warmups,
                reps: run.reps as usize,
            };
            let kernel = solver.unwrap_or(SolverKind::Gmres).as_str();
            let record = bench_solver(&opts, &mut SteadyTimer)
                .unwrap_or_else(|e| failed(&matrix, kernel, &run, opts.precision, "csr", &e));
            (vec![record], output)
        }
        Command::Compare {
            baseline,
            candidate,
            output,
        } => {
            let base = read_report(&baseline).map_err(|e| e.to_string())?;
            let cand = read_report(&candidate).map_err(|e| e.to_string())?;
            (compare(&base, &cand), output)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (records, output) = match run(cli) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("bench: {msg}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&records, &output) {
        eprintln!("bench: cannot write report: {e}");
        return ExitCode::from(1);
    }
    for r in records.iter().filter(|r| !r.is_ok()) {
        eprintln!("bench: {} {} failed: {}", r.matrix, r.kernel, r.notes);
    }
    if records.iter().all(BenchRecord::is_ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
