use crate::{Error, Result};

/// Reference quantity a residual-norm criterion is relative to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// `||b||`
    RhsNorm,
}

impl Baseline {
    pub fn as_str(self) -> &'static str {
        match self {
            Baseline::RhsNorm => "rhs_norm",
        }
    }
}

/// One stopping criterion. A list of criteria stops as soon as any is met.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    Iteration { max_iters: usize },
    ResidualNorm { reduction_factor: f64, baseline: Baseline },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    Residual,
    MaxIters,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Residual => "residual",
            StopReason::MaxIters => "max_iters",
        }
    }
}

/// Checks that a criteria list is usable: non-empty and bounded by an
/// iteration limit.
pub fn validate_criteria(criteria: &[Criterion]) -> Result<()> {
    if criteria.is_empty() {
        return Err(Error::config("criteria", "at least one criterion is required"));
    }
    if !criteria
        .iter()
        .any(|c| matches!(c, Criterion::Iteration { .. }))
    {
        return Err(Error::config("criteria", "an Iteration criterion is required"));
    }
    for (k, c) in criteria.iter().enumerate() {
        match *c {
            Criterion::Iteration { max_iters: 0 } => {
                return Err(Error::config(
                    format!("criteria[{k}].max_iters"),
                    "must be positive",
                ))
            }
            Criterion::ResidualNorm { reduction_factor, .. }
                if !(reduction_factor.is_finite() && reduction_factor >= 0.0) =>
            {
                return Err(Error::config(
                    format!("criteria[{k}].reduction_factor"),
                    "must be a finite non-negative number",
                ))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Decides whether to stop after `iteration` iterations.
///
/// A residual criterion is met when `residual <= reduction_factor * rhs_norm`;
/// with `rhs_norm == 0` the test becomes absolute. When both kinds are met at
/// once the residual wins, so such a run still counts as converged.
pub fn check_criteria(
    criteria: &[Criterion],
    iteration: usize,
    residual: f64,
    rhs_norm: f64,
) -> Option<StopReason> {
    let mut reason = None;
    for c in criteria {
        match *c {
            Criterion::ResidualNorm {
                reduction_factor,
                baseline: Baseline::RhsNorm,
            } => {
                let bound = if rhs_norm == 0.0 {
                    reduction_factor
                } else {
                    reduction_factor * rhs_norm
                };
                if residual <= bound {
                    return Some(StopReason::Residual);
                }
            }
            Criterion::Iteration { max_iters } => {
                if iteration >= max_iters {
                    reason = Some(StopReason::MaxIters);
                }
            }
        }
    }
    reason
}

#[cfg(test)]
mod tests {
    use super::*;

    const ITER: Criterion = Criterion::Iteration { max_iters: 1000 };
    const RES: Criterion = Criterion::ResidualNorm {
        reduction_factor: 1e-6,
        baseline: Baseline::RhsNorm,
    };

    #[test]
    fn iteration_limit() {
        assert_eq!(check_criteria(&[ITER], 1000, 1.0, 1.0), Some(StopReason::MaxIters));
        assert_eq!(check_criteria(&[ITER], 999, 1.0, 1.0), None);
    }

    #[test]
    fn residual_reduction() {
        assert_eq!(check_criteria(&[RES], 1, 5e-7, 1.0), Some(StopReason::Residual));
        assert_eq!(check_criteria(&[ITER, RES], 3, 0.5, 1.0), None);
        assert_eq!(check_criteria(&[ITER, RES], 1000, 1e-9, 1.0), Some(StopReason::Residual));
    }

    #[test]
    fn zero_rhs_is_absolute() {
        assert_eq!(check_criteria(&[RES], 1, 5e-7, 0.0), Some(StopReason::Residual));
        assert_eq!(check_criteria(&[RES], 1, 2e-6, 0.0), None);
    }

    #[test]
    fn validation() {
        assert!(validate_criteria(&[]).is_err());
        assert!(validate_criteria(&[RES]).is_err());
        assert!(validate_criteria(&[Criterion::Iteration { max_iters: 0 }]).is_err());
        assert!(validate_criteria(&[ITER, RES]).is_ok());
    }
}
