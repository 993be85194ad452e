//! Exact maximum clique by ordered depth-first extension.

use std::time::Instant;

use super::{CliqueSearchResult, TestResult};
use crate::error::{HpcError, Result};
use crate::model::DUniformHypergraph;

pub const DEFAULT_EPSILON: f64 = 1.0;

struct Search<'g> {
    g: &'g DUniformHypergraph,
    cap: usize,
    budget: Option<u64>,
    nodes: u64,
    cur: Vec<usize>,
    best: Vec<usize>,
    tuple: Vec<usize>,
}

enum Flow {
    Continue,
    Stop,
}

impl Search<'_> {
    /// `w` may join `cur` (whose last element is `v < w`) iff every d-subset
    /// containing both `v` and `w` is an edge.
    fn compatible(&mut self, w: usize) -> bool {
        let d = self.g.d();
        let (&v, rest) = self.cur.split_last().expect("cur non-empty");
        if rest.len() < d - 2 {
            return true;
        }
        let g = self.g;
        let tuple = &mut self.tuple;
        let mut ok = true;
        crate::comb::for_each_colex(rest.len(), d - 2, |pos| {
            if !ok {
                return;
            }
            tuple.clear();
            tuple.extend(pos.iter().map(|&p| rest[p]));
            tuple.push(v);
            tuple.push(w);
            ok = g.has_sorted_edge(tuple);
        });
        ok
    }

    fn extend(&mut self, cand: &[usize]) -> Result<Flow> {
        for (i, &v) in cand.iter().enumerate() {
            if self.cur.len() + (cand.len() - i) <= self.best.len() {
                break;
            }
            self.nodes += 1;
            if let Some(b) = self.budget {
                if self.nodes > b {
                    return Err(HpcError::BudgetExceeded(self.nodes));
                }
            }
            self.cur.push(v);
            if self.cur.len() > self.best.len() {
                self.best.clone_from(&self.cur);
                if self.best.len() >= self.cap {
                    return Ok(Flow::Stop);
                }
            }
            let next: Vec<usize> = cand[i + 1..]
                .iter()
                .copied()
                .filter(|&w| self.compatible(w))
                .collect();
            if let Flow::Stop = self.extend(&next)? {
                return Ok(Flow::Stop);
            }
            self.cur.pop();
        }
        Ok(Flow::Continue)
    }
}

/// Maximum clique, or the first clique of size `size_cap` when one exists.
pub fn max_clique_exhaustive(g: &DUniformHypergraph, size_cap: Option<usize>) -> CliqueSearchResult {
    max_clique_with_budget(g, size_cap, None).expect("no budget, no budget error")
}

/// As [`max_clique_exhaustive`] but fails once more than `node_budget` search nodes are expanded.
pub fn max_clique_with_budget(
    g: &DUniformHypergraph,
    size_cap: Option<usize>,
    node_budget: Option<u64>,
) -> Result<CliqueSearchResult> {
    let cap = size_cap.unwrap_or(usize::MAX);
    let mut s = Search {
        g,
        cap,
        budget: node_budget,
        nodes: 0,
        cur: Vec::new(),
        best: Vec::new(),
        tuple: Vec::with_capacity(g.d()),
    };
    if cap > 0 {
        let all: Vec<usize> = (0..g.n()).collect();
        s.extend(&all)?;
    }
    Ok(CliqueSearchResult {
        size: s.best.len(),
        best_clique: s.best,
        steps_or_nodes: s.nodes,
    })
}

/// `ceil(((d! + eps) log2 N)^(1/(d-1)))`.
pub fn exhaustive_k_star(n: usize, d: usize, epsilon: f64) -> Result<usize> {
    if n < 2 {
        return Err(HpcError::param("exhaustive test needs N >= 2"));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(HpcError::param(format!("epsilon = {epsilon} must be positive")));
    }
    let fact: f64 = (2..=d).map(|i| i as f64).product();
    let x = ((fact + epsilon) * (n as f64).log2()).powf(1.0 / (d as f64 - 1.0));
    Ok((x - 1e-9).ceil() as usize)
}

/// Decides 1 iff a clique of size at least `k*` exists.
pub fn exhaustive_test(g: &DUniformHypergraph, epsilon: f64) -> Result<TestResult> {
    let t0 = Instant::now();
    let k = exhaustive_k_star(g.n(), g.d(), epsilon)?;
    let found = max_clique_exhaustive(g, Some(k));
    Ok(TestResult::new(
        "exhaustive",
        found.size as f64,
        k as f64 - 1.0,
        t0.elapsed().as_secs_f64(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate, is_clique, ModelParams};

    #[test]
    fn complete_and_empty() {
        let g = DUniformHypergraph::complete(9, 3).unwrap();
        assert_eq!(max_clique_exhaustive(&g, None).best_clique, (0..9).collect::<Vec<_>>());
        let e = DUniformHypergraph::empty(9, 3).unwrap();
        assert_eq!(max_clique_exhaustive(&e, None).size, 2);
        let e4 = DUniformHypergraph::empty(9, 4).unwrap();
        assert_eq!(max_clique_exhaustive(&e4, None).size, 3);
        let tiny = DUniformHypergraph::empty(2, 4).unwrap();
        assert_eq!(max_clique_exhaustive(&tiny, None).size, 2);
    }

    #[test]
    fn cap_stops_early() {
        let g = DUniformHypergraph::complete(12, 3).unwrap();
        let r = max_clique_exhaustive(&g, Some(5));
        assert_eq!(r.size, 5);
        assert!(is_clique(&g, &r.best_clique).unwrap());
        assert_eq!(max_clique_exhaustive(&g, Some(0)).size, 0);
    }

    #[test]
    fn budget_is_enforced() {
        let g = generate(&ModelParams::null(30, 3).unwrap(), 1, "", 0).unwrap().graph;
        assert!(matches!(max_clique_with_budget(&g, None, Some(10)), Err(HpcError::BudgetExceeded(_))));
    }

    #[test]
    fn k_star_arithmetic() {
        assert_eq!(exhaustive_k_star(64, 3, 1.0).unwrap(), 7);
        assert_eq!(exhaustive_k_star(16, 2, 0.5).unwrap(), 10);
        assert!(exhaustive_k_star(1, 3, 1.0).is_err());
        assert!(exhaustive_k_star(10, 3, 0.0).is_err());
    }

    #[test]
    fn complete_graph_is_detected() {
        let g = DUniformHypergraph::complete(10, 3).unwrap();
        let r = exhaustive_test(&g, 1.0).unwrap();
        // k* = ceil(sqrt(7 log2 10)) = 5
        assert_eq!(r.threshold, 4.0);
        assert_eq!(r.statistic, 5.0);
        assert!(r.decision);
    }
}
