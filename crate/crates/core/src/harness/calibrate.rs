use crate::error::{HpcError, Result};
use crate::model::{generate, ModelParams};
use crate::stream::{derive_stream, SeedSpec};

use super::{fmt_g6, run_trials, DetectorConfig};

/// Calibration needs `trials * level >= MIN_EXCEEDANCES` null exceedances.
pub const MIN_EXCEEDANCES: f64 = 10.0;

/// The `ceil((1 - alpha) T)`-th order statistic (1-based) of a sorted sample.
pub fn quantile_order_statistic(sorted: &[f64], alpha: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(HpcError::param("empty null sample"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(HpcError::param(format!("level {alpha} outside (0, 1)")));
    }
    let t = sorted.len();
    // guard against 0.95 * 200 = 190.00000000000003
    let k = (((1.0 - alpha) * t as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(sorted[k.min(t) - 1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTable {
    pub detector: DetectorConfig,
    pub n: usize,
    pub d: usize,
    pub level: f64,
    pub trials: usize,
    pub threshold: f64,
    /// Sorted ascending.
    pub null_stats: Vec<f64>,
}

impl CalibrationTable {
    pub fn csv(&self) -> String {
        format!(
            "detector,N,d,level,trials,threshold\n{},{},{},{},{},{}\n",
            self.detector.name(),
            self.n,
            self.d,
            fmt_g6(self.level),
            self.trials,
            fmt_g6(self.threshold)
        )
    }
}

pub(crate) fn calib_scope(n: usize, d: usize) -> String {
    format!("calib/n{n}/d{d}")
}

/// Samples `trials` null instances and returns the `1 - level` empirical
/// quantile of the detector statistic. Requires `trials >= 10 / level`.
pub fn calibrate_threshold(
    detector: &DetectorConfig,
    n: usize,
    d: usize,
    level: f64,
    trials: usize,
    master_seed: u64,
) -> Result<CalibrationTable> {
    if !(level > 0.0 && level < 1.0) {
        return Err(HpcError::param(format!("level {level} outside (0, 1)")));
    }
    if (trials as f64) < MIN_EXCEEDANCES / level - 1e-9 {
        return Err(HpcError::param(format!(
            "{trials} calibration trials cannot resolve level {level}; need at least {}",
            (MIN_EXCEEDANCES / level).ceil()
        )));
    }
    let params = ModelParams::null(n, d)?;
    let scope = calib_scope(n, d);
    let det_tag = format!("{scope}/detector/{}", detector.name());
    let mut null_stats = run_trials(trials, &format!("calibration of {}", detector.name()), |t| {
        let inst = generate(&params, master_seed, &scope, t)?;
        let mut rng = derive_stream(&SeedSpec::new(master_seed, det_tag.clone(), t));
        detector.statistic(&inst.graph, &mut rng)
    })?;
    null_stats.sort_by(f64::total_cmp);
    let threshold = quantile_order_statistic(&null_stats, level)?;
    Ok(CalibrationTable {
        detector: detector.clone(),
        n,
        d,
        level,
        trials,
        threshold,
        null_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_statistic_index() {
        let xs: Vec<f64> = (1..=200).map(f64::from).collect();
        assert_eq!(quantile_order_statistic(&xs, 0.05).unwrap(), 190.0);
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(quantile_order_statistic(&xs, 0.05).unwrap(), 19.0);
        assert!(quantile_order_statistic(&[], 0.05).is_err());
        assert!(quantile_order_statistic(&xs, 1.5).is_err());
    }

    #[test]
    fn constant_detector_threshold() {
        let t = calibrate_threshold(&DetectorConfig::Constant(3.5), 10, 3, 0.05, 200, 1).unwrap();
        assert_eq!(t.threshold, 3.5);
    }

    #[test]
    fn too_few_trials_rejected() {
        assert!(calibrate_threshold(&DetectorConfig::EdgeCount, 10, 3, 0.05, 199, 1).is_err());
    }

    #[test]
    fn undefined_statistic_propagates() {
        let err = calibrate_threshold(&DetectorConfig::EdgeCount, 2, 3, 0.05, 400, 1).unwrap_err();
        assert_eq!(err.code(), "undefined-statistic");
    }
}
