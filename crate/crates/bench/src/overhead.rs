use crate::record::{BenchRecord, Status};

/// Relative performance loss and absolute extra time of a measurement
/// against a reference measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overhead {
    /// `(perf_ref - perf_bound) / perf_ref * 100`
    pub p_overhead_pct: f64,
    /// `t_bound - t_ref`; noise can make it negative.
    pub t_overhead_s: f64,
}

pub fn compute_overhead(
    perf_ref: f64,
    perf_bound: f64,
    t_ref: f64,
    t_bound: f64,
) -> Result<Overhead, sparsekit::Error> {
    if perf_ref == 0.0 {
        return Err(sparsekit::Error::UndefinedBaseline);
    }
    Ok(Overhead {
        p_overhead_pct: (perf_ref - perf_bound) / perf_ref * 100.0,
        t_overhead_s: t_bound - t_ref,
    })
}

fn same_case(a: &BenchRecord, b: &BenchRecord) -> bool {
    a.matrix == b.matrix && a.format == b.format && a.precision == b.precision && a.kernel == b.kernel
}

/// Annotates every candidate record with speedup and overhead against the
/// first successful baseline record for the same matrix, format, precision
/// and kernel.
pub fn compare(baseline: &[BenchRecord], candidate: &[BenchRecord]) -> Vec<BenchRecord> {
    candidate
        .iter()
        .map(|cand| {
            let mut out = cand.clone();
            if !cand.is_ok() {
                return out;
            }
            let Some(base) = baseline.iter().find(|b| b.is_ok() && same_case(b, cand)) else {
                out.status = Status::Failed;
                out.notes = append(&out.notes, "no matching baseline record");
                return out;
            };
            match compute_overhead(base.gflops, cand.gflops, base.time_s, cand.time_s) {
                Ok(o) => {
                    out.speedup = Some(base.time_s / cand.time_s);
                    out.p_overhead_pct = Some(o.p_overhead_pct);
                    out.t_overhead_s = Some(o.t_overhead_s);
                }
                Err(e) => {
                    out.status = Status::Failed;
                    out.notes = append(&out.notes, &e.to_string());
                }
            }
            out
        })
        .collect()
}

fn append(notes: &str, extra: &str) -> String {
    if notes.is_empty() {
        extra.to_string()
    } else {
        format!("{notes}; {extra}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::sample;

    #[test]
    fn formula_examples() {
        assert_eq!(compute_overhead(100.0, 90.0, 1.0, 1.0).unwrap().p_overhead_pct, 10.0);
        assert_eq!(
            compute_overhead(100.0, 100.0, 1e-3, 1e-3).unwrap(),
            Overhead {
                p_overhead_pct: 0.0,
                t_overhead_s: 0.0
            }
        );
        let t = compute_overhead(1.0, 1.0, 1.0e-5, 1.2e-5).unwrap().t_overhead_s;
        assert!((t - 2e-6).abs() <= 1e-12 * 2e-6);
        assert!(compute_overhead(1.0, 1.0, 1.2e-5, 1.0e-5).unwrap().t_overhead_s < 0.0);
        assert!(matches!(
            compute_overhead(0.0, 1.0, 1.0, 1.0),
            Err(sparsekit::Error::UndefinedBaseline)
        ));
    }

    #[test]
    fn compare_matches_cases() {
        let mut base = sample();
        base.gflops = 100.0;
        base.time_s = 1.0e-5;
        let mut cand = sample();
        cand.gflops = 90.0;
        cand.time_s = 1.2e-5;
        let mut other = sample();
        other.matrix = "unknown".into();
        let out = compare(&[base], &[cand, other]);
        assert_eq!(out[0].p_overhead_pct, Some(10.0));
        assert!((out[0].t_overhead_s.unwrap() - 2e-6).abs() <= 1e-12 * 2e-6);
        assert_eq!(out[0].speedup, Some(1.0e-5 / 1.2e-5));
        assert_eq!(out[1].status, Status::Failed);
    }

    #[test]
    fn zero_baseline_fails_the_record() {
        let mut base = sample();
        base.gflops = 0.0;
        let out = compare(&[base], &[sample()]);
        assert_eq!(out[0].status, Status::Failed);
        assert!(out[0].notes.contains("baseline"));
    }
}
