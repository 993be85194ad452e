use std::time::Instant;

use rand::RngCore;

use super::TestResult;
use crate::error::Result;
use crate::model::DUniformHypergraph;
use crate::tensor::{top_singular_value, AdjacencyTensorView, Unfolding, UnfoldingView, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub unfolding: Unfolding,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        SpectralSettings {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            unfolding: Unfolding::ModeOne,
        }
    }
}

/// Top singular value of the centered unfolding. At `d = 2` this is the
/// spectral norm of the ±1 adjacency matrix with zero diagonal.
pub fn spectral_statistic<R: RngCore + ?Sized>(
    g: &DUniformHypergraph,
    settings: &SpectralSettings,
    rng: &mut R,
) -> Result<f64> {
    let u = UnfoldingView::new(AdjacencyTensorView::centered(g), settings.unfolding)?;
    Ok(top_singular_value::<f64, _>(&u, settings.tol, settings.max_iter, rng)?.sigma)
}

pub fn spectral_test<R: RngCore + ?Sized>(
    g: &DUniformHypergraph,
    threshold: f64,
    settings: &SpectralSettings,
    rng: &mut R,
) -> Result<TestResult> {
    let t0 = Instant::now();
    let s = spectral_statistic(g, settings, rng)?;
    Ok(TestResult::new("spectral", s, threshold, t0.elapsed().as_secs_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{derive_stream, SeedSpec};

    #[test]
    fn complete_small_case() {
        let g = DUniformHypergraph::complete(4, 3).unwrap();
        let mut r = derive_stream(&SeedSpec::new(0, "s", 0));
        let res = spectral_test(&g, 3.0, &SpectralSettings::default(), &mut r).unwrap();
        assert!((res.statistic - 12f64.sqrt()).abs() < 1e-3);
        assert!(res.decision);
        let res = spectral_test(&g, f64::INFINITY, &SpectralSettings::default(), &mut r).unwrap();
        assert!(!res.decision);
    }
}
