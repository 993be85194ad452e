use std::time::Instant;

use super::TestResult;
use crate::error::{HpcError, Result};
use crate::model::DUniformHypergraph;

/// Standardized edge count `(|E| - C/2) / (sqrt(C)/2)` with `C = C(N, d)`.
pub fn edge_count_statistic(g: &DUniformHypergraph) -> Result<f64> {
    let slots = g.slot_count();
    if slots == 0 {
        return Err(HpcError::UndefinedStatistic(format!(
            "edge count with C({}, {}) = 0 slots",
            g.n(),
            g.d()
        )));
    }
    let c = slots as f64;
    Ok((g.edge_count() as f64 - c / 2.0) / (c.sqrt() / 2.0))
}

pub fn edge_count_test(g: &DUniformHypergraph, threshold: f64) -> Result<TestResult> {
    let t0 = Instant::now();
    let s = edge_count_statistic(g)?;
    Ok(TestResult::new("edgecount", s, threshold, t0.elapsed().as_secs_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate, ModelParams};

    #[test]
    fn extremes() {
        assert_eq!(edge_count_statistic(&DUniformHypergraph::complete(4, 3).unwrap()).unwrap(), 2.0);
        assert_eq!(edge_count_statistic(&DUniformHypergraph::empty(4, 3).unwrap()).unwrap(), -2.0);
        assert!(matches!(
            edge_count_statistic(&DUniformHypergraph::empty(2, 3).unwrap()),
            Err(HpcError::UndefinedStatistic(_))
        ));
    }

    #[test]
    fn null_moments() {
        let p = ModelParams::null(20, 3).unwrap();
        let xs: Vec<f64> = (0..2000)
            .map(|t| edge_count_statistic(&generate(&p, 17, "ec", t).unwrap().graph).unwrap())
            .collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!(mean.abs() <= 0.07, "{mean}");
        assert!((0.85..=1.15).contains(&var), "{var}");
    }

    #[test]
    fn planted_mean_shift() {
        // E|E| under H1 = C(N,d)/2 + C(kappa,d)/2 = 570 + 60
        let p = ModelParams::planted(20, 3, 10).unwrap();
        let counts: Vec<f64> = (0..2000)
            .map(|t| generate(&p, 23, "ec1", t).unwrap().graph.edge_count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / 2000.0;
        let var = counts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 1999.0;
        let se = (var / 2000.0).sqrt();
        assert!((mean - 630.0).abs() <= 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn decision_is_strict() {
        let g = DUniformHypergraph::complete(4, 3).unwrap();
        assert!(!edge_count_test(&g, 2.0).unwrap().decision);
        assert!(edge_count_test(&g, 1.999).unwrap().decision);
    }
}
