//! Preconditioners. Each one is a [`LinOp`](crate::linop::LinOp) whose apply
//! computes `x := M^{-1} b`. Factorizations run sequentially on every device.

mod ic;
mod ilu;
mod jacobi;

pub use ic::{ic0_factorize, ic_apply, Ic, IcFactor};
pub use ilu::{ilu0_factorize, ilu_apply, Ilu, IluFactors};
pub use jacobi::Jacobi;

use std::str::FromStr;

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreconditionerKind {
    Jacobi,
    Ilu,
    Ic,
}

impl PreconditionerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PreconditionerKind::Jacobi => "jacobi",
            PreconditionerKind::Ilu => "ilu",
            PreconditionerKind::Ic => "ic",
        }
    }
}

impl FromStr for PreconditionerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "jacobi" => Ok(PreconditionerKind::Jacobi),
            "ilu" => Ok(PreconditionerKind::Ilu),
            "ic" => Ok(PreconditionerKind::Ic),
            other => Err(Error::Unsupported(format!("preconditioner `{other}`"))),
        }
    }
}
