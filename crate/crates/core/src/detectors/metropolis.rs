//! Single-vertex Metropolis chain on the cliques of a hypergraph.
//!
//! From clique `C`, pick `v` uniformly. If `v` is in `C` propose `C \ {v}`,
//! otherwise propose `C ∪ {v}` when that is still a clique. Accept with
//! probability `min(1, lambda^(|C'| - |C|))`.

use std::time::Instant;

use rand::{Rng, RngCore};

use super::{CliqueSearchResult, TestResult};
use crate::comb::for_each_colex;
use crate::error::{HpcError, Result};
use crate::model::DUniformHypergraph;

pub const DEFAULT_LAMBDA: f64 = 2.0;

/// `ceil(10 N ln N)`, at least 1.
pub fn default_steps(n: usize) -> u64 {
    if n < 2 {
        return 1;
    }
    (10.0 * n as f64 * (n as f64).ln()).ceil() as u64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MoveCounts {
    pub add_proposals: u64,
    pub add_accepted: u64,
    /// Additions rejected because `C ∪ {v}` is not a clique.
    pub add_blocked: u64,
    pub delete_proposals: u64,
    pub delete_accepted: u64,
}

pub struct MetropolisChain<'g, R: ?Sized> {
    g: &'g DUniformHypergraph,
    lambda: f64,
    state: Vec<usize>,
    member: Vec<bool>,
    best: Vec<usize>,
    steps: u64,
    counts: MoveCounts,
    tuple: Vec<usize>,
    rng: &'g mut R,
}

impl<'g, R: RngCore + ?Sized> MetropolisChain<'g, R> {
    pub fn new(g: &'g DUniformHypergraph, lambda: f64, rng: &'g mut R) -> Result<Self> {
        if !(lambda >= 1.0) || !lambda.is_finite() {
            return Err(HpcError::param(format!("lambda = {lambda} must be finite and >= 1")));
        }
        Ok(MetropolisChain {
            g,
            lambda,
            state: Vec::new(),
            member: vec![false; g.n()],
            best: Vec::new(),
            steps: 0,
            counts: MoveCounts::default(),
            tuple: Vec::with_capacity(g.d()),
            rng,
        })
    }

    /// Current clique, sorted.
    pub fn state(&self) -> &[usize] {
        &self.state
    }

    pub fn best(&self) -> &[usize] {
        &self.best
    }

    pub fn counts(&self) -> MoveCounts {
        self.counts
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn can_add(&mut self, v: usize) -> bool {
        let d = self.g.d();
        if self.state.len() < d - 1 {
            return true;
        }
        let (g, state, tuple) = (self.g, &self.state, &mut self.tuple);
        let mut ok = true;
        for_each_colex(state.len(), d - 1, |pos| {
            if !ok {
                return;
            }
            tuple.clear();
            tuple.extend(pos.iter().map(|&p| state[p]));
            let at = tuple.partition_point(|&x| x < v);
            tuple.insert(at, v);
            ok = g.has_sorted_edge(tuple);
        });
        ok
    }

    fn accept(&mut self, delta: i32) -> bool {
        let p = self.lambda.powi(delta);
        p >= 1.0 || self.rng.gen::<f64>() < p
    }

    pub fn step(&mut self) {
        self.steps += 1;
        let n = self.g.n();
        if n == 0 {
            return;
        }
        let v = self.rng.gen_range(0..n);
        if self.member[v] {
            self.counts.delete_proposals += 1;
            if self.accept(-1) {
                self.counts.delete_accepted += 1;
                let at = self.state.binary_search(&v).expect("member");
                self.state.remove(at);
                self.member[v] = false;
            }
        } else {
            self.counts.add_proposals += 1;
            if !self.can_add(v) {
                self.counts.add_blocked += 1;
                return;
            }
            if self.accept(1) {
                self.counts.add_accepted += 1;
                let at = self.state.partition_point(|&x| x < v);
                self.state.insert(at, v);
                self.member[v] = true;
                if self.state.len() > self.best.len() {
                    self.best.clone_from(&self.state);
                }
            }
        }
    }

    pub fn into_result(self) -> CliqueSearchResult {
        CliqueSearchResult {
            size: self.best.len(),
            best_clique: self.best,
            steps_or_nodes: self.steps,
        }
    }
}

/// Runs the chain from the empty clique and returns the largest clique visited.
pub fn metropolis_search<R: RngCore + ?Sized>(
    g: &DUniformHypergraph,
    lambda: f64,
    steps: u64,
    rng: &mut R,
) -> Result<CliqueSearchResult> {
    let mut chain = MetropolisChain::new(g, lambda, rng)?;
    for _ in 0..steps {
        chain.step();
    }
    Ok(chain.into_result())
}

pub fn metropolis_test<R: RngCore + ?Sized>(
    g: &DUniformHypergraph,
    lambda: f64,
    steps: u64,
    threshold: f64,
    rng: &mut R,
) -> Result<TestResult> {
    let t0 = Instant::now();
    let r = metropolis_search(g, lambda, steps, rng)?;
    Ok(TestResult::new("metropolis", r.size as f64, threshold, t0.elapsed().as_secs_f64()))
}
