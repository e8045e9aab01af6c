use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{BenchError, Result};

/// Column order of the CSV report.
pub const CSV_HEADER: &str =
    "matrix,rows,cols,nnz,format,device,threads,precision,kernel,reps,time_s,gflops,speedup,p_overhead_pct,t_overhead_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    #[default]
    Ok,
    Failed,
}

/// One benchmark measurement. The JSON form carries every field; the CSV
/// form carries the columns of [`CSV_HEADER`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub matrix: String,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub format: String,
    pub device: String,
    pub threads: usize,
    pub precision: String,
    pub kernel: String,
    pub reps: usize,
    /// Median seconds per kernel execution.
    pub time_s: f64,
    pub gflops: f64,
    pub speedup: Option<f64>,
    pub p_overhead_pct: Option<f64>,
    pub t_overhead_s: Option<f64>,
    #[serde(default)]
    pub warmups: usize,
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub status: Status,
    #[serde(default)]
    pub notes: String,
}

impl BenchRecord {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    fn csv_fields(&self) -> [String; 15] {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        [
            self.matrix.clone(),
            self.rows.to_string(),
            self.cols.to_string(),
            self.nnz.to_string(),
            self.format.clone(),
            self.device.clone(),
            self.threads.to_string(),
            self.precision.clone(),
            self.kernel.clone(),
            self.reps.to_string(),
            self.time_s.to_string(),
            self.gflops.to_string(),
            opt(self.speedup),
            opt(self.p_overhead_pct),
            opt(self.t_overhead_s),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

/// Serializes records into `out`.
pub fn write_report(records: &[BenchRecord], format: ReportFormat, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, records)?;
            writeln!(out)
        }
        ReportFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.write_record(r.csv_fields())?;
            }
            w.flush()
        }
    }
}

pub fn emit_report(records: &[BenchRecord], format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_report(records, format, &mut buf).expect("writing to memory cannot fail");
    fs::write(path, buf).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Deserialize)]
struct CsvRow {
    matrix: String,
    rows: usize,
    cols: usize,
    nnz: usize,
    format: String,
    device: String,
    threads: usize,
    precision: String,
    kernel: String,
    reps: usize,
    time_s: f64,
    gflops: f64,
    speedup: Option<f64>,
    p_overhead_pct: Option<f64>,
    t_overhead_s: Option<f64>,
}

/// Reads a report written by [`emit_report`]; the format follows the file
/// extension.
pub fn read_report(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |message: String| BenchError::Report {
        path: path.to_path_buf(),
        message,
    };
    match ReportFormat::from_path(path) {
        ReportFormat::Json => serde_json::from_str(&text).map_err(|e| bad(e.to_string())),
        ReportFormat::Csv => {
            let mut reader = csv::Reader::from_reader(text.as_bytes());
            let header = reader.headers().map_err(|e| bad(e.to_string()))?;
            if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
                return Err(bad("unexpected CSV header".into()));
            }
            reader
                .deserialize::<CsvRow>()
                .map(|row| {
                    let r = row.map_err(|e| bad(e.to_string()))?;
                    Ok(BenchRecord {
                        matrix: r.matrix,
                        rows: r.rows,
                        cols: r.cols,
                        nnz: r.nnz,
                        format: r.format,
                        device: r.device,
                        threads: r.threads,
                        precision: r.precision,
                        kernel: r.kernel,
                        reps: r.reps,
                        time_s: r.time_s,
                        gflops: r.gflops,
                        speedup: r.speedup,
                        p_overhead_pct: r.p_overhead_pct,
                        t_overhead_s: r.t_overhead_s,
                        warmups: 0,
                        iterations: None,
                        status: Status::Ok,
                        notes: String::new(),
                    })
                })
                .collect()
        }
    }
}

#[cfg(test)]
pub(crate) fn sample() -> BenchRecord {
    BenchRecord {
        matrix: "diag1000".into(),
        rows: 1000,
        cols: 1000,
        nnz: 1000,
        format: "csr".into(),
        device: "omp".into(),
        threads: 4,
        precision: "double".into(),
        kernel: "spmv".into(),
        reps: 20,
        time_s: 1e-3,
        gflops: 0.002,
        speedup: None,
        p_overhead_pct: Some(10.0),
        t_overhead_s: None,
        warmups: 3,
        iterations: None,
        status: Status::Ok,
        notes: "seed=42".into(),
    }
}
