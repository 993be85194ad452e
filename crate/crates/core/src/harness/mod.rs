//! Monte Carlo machinery: null calibration, risk estimation, phase grids and
//! the clique-size law experiment.
//!
//! Every trial draws its randomness from a stream keyed by
//! `(master_seed, role_tag, trial_index)`. Calibration, H0-risk and H1-risk
//! trials use different role tags, and results are always reduced in trial
//! order, so output does not depend on the number of worker threads.

mod calibrate;
mod cliquelaw;
mod detector;
mod format;
mod grid;
mod risk;

pub use calibrate::{calibrate_threshold, quantile_order_statistic, CalibrationTable};
pub use cliquelaw::{clique_law_experiment, clique_law_value, CliqueLawRow, DEFAULT_NODE_BUDGET};
pub use detector::{default_slices, DetectorConfig};
pub use format::{fmt_g6, fmt_sig};
pub use grid::{
    gamma_of, parse_experiment_file, phase_grid, risk_heatmap_svg, write_grid_csv, CellOutcome, GridRow, KappaRule,
    PhaseGridSpec, GRID_CSV_HEADER, SOLVED_RISK,
};
pub use risk::{estimate_risk, wilson_interval, RiskEstimate, WILSON_Z};

use rayon::prelude::*;

use crate::error::{HpcError, Result};

/// Runs `f` on trial indices `0..trials` in parallel, returning results in
/// index order. The lowest failing index determines the error.
pub(crate) fn run_trials<T, F>(trials: usize, context: &str, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = (0..trials as u64).into_par_iter().map(&f).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| HpcError::Trial {
                context: format!("{context}, trial {i}"),
                source: Box::new(e),
            })
        })
        .collect()
}
