//! Ensembles split across threads.
//!
//! Runs are cut into fixed chunks independent of the thread count, and every
//! run draws from its own stream, so the histogram equals the sequential one.

use rayon::prelude::*;

use randsub_core::simulate::{
    ensemble_counts_with, ensemble_range, EnsembleHistogram, SimulationMode,
};
use randsub_core::{Result, RuleParams};

pub const CHUNK_RUNS: u64 = 4096;

pub fn parallel_ensemble(
    params: RuleParams,
    i: u32,
    runs: u64,
    seed: u64,
    mode: SimulationMode,
) -> Result<EnsembleHistogram> {
    if runs <= CHUNK_RUNS {
        return ensemble_counts_with(params, i, runs, seed, mode);
    }
    let chunks: Vec<_> = (0..runs)
        .step_by(CHUNK_RUNS as usize)
        .map(|s| s..(s + CHUNK_RUNS).min(runs))
        .collect();
    let parts = chunks
        .into_par_iter()
        .map(|r| ensemble_range(params, i, r, seed, mode))
        .collect::<Result<Vec<_>>>()?;
    let mut hist = EnsembleHistogram::empty(params, i, seed);
    for part in &parts {
        hist.merge(part)?;
    }
    Ok(hist)
}
