use crate::detectors::max_clique_with_budget;
use crate::error::{HpcError, Result};
use crate::model::{generate, ModelParams};

use super::run_trials;

/// Search-node cap per trial.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CliqueLawRow {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    /// `None` when some trial exceeded the work budget.
    pub mean_max_clique: Option<f64>,
    pub law_value: f64,
    pub ratio: Option<f64>,
}

/// `(d! log2 N)^(1/(d-1))`.
pub fn clique_law_value(n: usize, d: usize) -> f64 {
    let fact: f64 = (2..=d).map(|i| i as f64).product();
    (fact * (n as f64).log2()).powf(1.0 / (d as f64 - 1.0))
}

/// Mean exact maximum clique size of null hypergraphs against the almost-sure law.
pub fn clique_law_experiment(
    d: usize,
    n_list: &[usize],
    trials: usize,
    master_seed: u64,
    node_budget: u64,
) -> Result<Vec<CliqueLawRow>> {
    if trials == 0 {
        return Err(HpcError::param("trials must be at least 1"));
    }
    n_list
        .iter()
        .map(|&n| {
            let params = ModelParams::null(n, d)?;
            let scope = format!("cliquelaw/n{n}/d{d}");
            let sizes = run_trials(trials, &format!("clique law N={n}"), |t| {
                let g = generate(&params, master_seed, &scope, t)?.graph;
                Ok(max_clique_with_budget(&g, None, Some(node_budget))?.size)
            });
            let law_value = clique_law_value(n, d);
            let mean = match sizes {
                Ok(s) => Some(s.iter().sum::<usize>() as f64 / trials as f64),
                Err(e) if e.code() == "budget-exceeded" => None,
                Err(e) => return Err(e),
            };
            Ok(CliqueLawRow {
                n,
                d,
                trials,
                mean_max_clique: mean,
                law_value,
                ratio: mean.map(|m| m / law_value),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_values() {
        assert!((clique_law_value(64, 3) - 6.0).abs() < 1e-12);
        assert!((clique_law_value(16, 2) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_budget_marks_infeasible() {
        let rows = clique_law_experiment(3, &[20], 2, 0, 5).unwrap();
        assert_eq!(rows[0].mean_max_clique, None);
        assert_eq!(rows[0].ratio, None);
    }
}
