use crate::detectors::decide;
use crate::error::{HpcError, Result};
use crate::model::{generate, ModelParams};
use crate::stream::{derive_stream, SeedSpec};

use super::{run_trials, DetectorConfig};

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Wilson score interval `(low, high)` for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Largest distance from the observed rate to a Wilson endpoint.
fn wilson_half_width(successes: usize, trials: usize) -> f64 {
    let (lo, hi) = wilson_interval(successes, trials);
    let p = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
    (p - lo).max(hi - p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskEstimate {
    pub type_i: f64,
    pub type_ii: f64,
    pub trials: usize,
    pub ci_i: f64,
    pub ci_ii: f64,
}

impl RiskEstimate {
    pub fn risk(&self) -> f64 {
        self.type_i + self.type_ii
    }

    pub(crate) fn from_counts(false_alarms: usize, misses: usize, trials: usize) -> Self {
        let t = trials as f64;
        RiskEstimate {
            type_i: false_alarms as f64 / t,
            type_ii: misses as f64 / t,
            trials,
            ci_i: wilson_half_width(false_alarms, trials),
            ci_ii: wilson_half_width(misses, trials),
        }
    }
}

pub(crate) fn h0_scope(n: usize, d: usize) -> String {
    format!("risk-h0/n{n}/d{d}")
}

pub(crate) fn h1_scope(n: usize, d: usize, kappa: usize) -> String {
    format!("risk-h1/n{n}/d{d}/k{kappa}")
}

/// Empirical type-I and type-II errors over `trials` fresh instances per hypothesis.
pub fn estimate_risk(
    detector: &DetectorConfig,
    threshold: f64,
    n: usize,
    d: usize,
    kappa: usize,
    trials: usize,
    master_seed: u64,
) -> Result<RiskEstimate> {
    if trials == 0 {
        return Err(HpcError::param("risk estimation needs at least one trial"));
    }
    let null = ModelParams::null(n, d)?;
    let alt = ModelParams::planted(n, d, kappa)?;
    let name = detector.name();
    let run = |params: ModelParams, scope: String, label: &str| -> Result<usize> {
        let det_tag = format!("{scope}/detector/{name}");
        let decisions = run_trials(trials, &format!("{name} under {label}"), |t| {
            let inst = generate(&params, master_seed, &scope, t)?;
            let mut rng = derive_stream(&SeedSpec::new(master_seed, det_tag.clone(), t));
            Ok(decide(detector.statistic(&inst.graph, &mut rng)?, threshold))
        })?;
        Ok(decisions.into_iter().filter(|&x| x).count())
    };
    let false_alarms = run(null, h0_scope(n, d), "H0")?;
    let detections = run(alt, h1_scope(n, d, kappa), "H1")?;
    Ok(RiskEstimate::from_counts(false_alarms, trials - detections, trials))
}
