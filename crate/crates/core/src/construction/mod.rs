//! BEC density evolution, union-bound BLER estimation and puncturing
//! pattern construction.

mod density;
mod greedy;
mod pattern_file;

pub use density::{bec_evolve, estimate_bler, BlerEstimate, ZProfile};
pub use greedy::{
    puncture_fixed_eps, puncture_frozen_based, puncture_greedy, puncture_symmetric, update_eps, EpsUpdate,
    GreedyOutcome, EPS_FLOOR, EPS_STEP, TIE_REL_TOL,
};
pub use pattern_file::PatternFile;

/// Which construction produced a subset code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Greedy,
    Symmetric,
    FixedEps,
    Frozen,
}

impl std::str::FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Algorithm::Greedy),
            "symmetric" => Ok(Algorithm::Symmetric),
            "fixed_eps" | "fixed-eps" => Ok(Algorithm::FixedEps),
            "frozen" => Ok(Algorithm::Frozen),
            other => Err(crate::Error::Parse(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Symmetric => "symmetric",
            Algorithm::FixedEps => "fixed_eps",
            Algorithm::Frozen => "frozen",
        })
    }
}
