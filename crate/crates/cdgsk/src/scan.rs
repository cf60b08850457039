//! Parallel Floquet scan. Slices are independent; results keep grid order,
//! so the output does not depend on the worker count.

use cdgsk_core::bloch::{self, SpectrumSlice, StabilityReport, XiGrid};
use cdgsk_core::WaveProfile;
use rayon::prelude::*;

use crate::error::CliError;

/// Environment variable holding the worker count; unset or 0 means one
/// worker per core.
pub const WORKERS_ENV: &str = "CDGSK_WORKERS";

pub fn worker_count() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Validation(format!("{WORKERS_ENV} must be a non-negative integer, got {v:?}"))
        }),
    }
}

pub fn parallel_scan(
    profile: &WaveProfile,
    grid: &XiGrid,
    n_max: usize,
    tol: f64,
) -> Result<(StabilityReport, Vec<SpectrumSlice>), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count()?)
        .build()
        .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    let slices = pool.install(|| {
        grid.points()
            .par_iter()
            .map(|&xi| bloch::slice(profile, xi, n_max))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let report = StabilityReport::from_slices(profile, n_max, grid, &slices, tol);
    Ok((report, slices))
}
