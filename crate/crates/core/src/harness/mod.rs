//! Random baths, ensemble sweeps, envelope fits and analytic-vs-oracle
//! checks, as used by the command-line tool.

pub mod fit;
pub mod sampling;
pub mod sweep;

use crate::density::rho_at;
use crate::error::Result;
use crate::oracle::oracle_rho;
use crate::types::{Environment, PairState};

/// Largest entrywise gap between the analytic reduced state and the
/// brute-force partial trace over `times`.
pub fn max_oracle_deviation(psi: &PairState, env: &Environment, times: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in times {
        let analytic = rho_at(psi, env, t)?;
        let brute = oracle_rho(psi, env, t)?;
        worst = worst.max(analytic.max_abs_diff(&brute));
    }
    Ok(worst)
}
