//! HPC-to-PC reduction by slicing, amplified over several random slices.

use std::time::Instant;

use rand::seq::index;
use rand::RngCore;
use rayon::prelude::*;

use super::spectral::{spectral_statistic, SpectralSettings};
use super::TestResult;
use crate::comb::Ranker;
use crate::error::{HpcError, Result};
use crate::harness::quantile_order_statistic;
use crate::model::{sample_null, DUniformHypergraph, ModelParams};
use crate::stream::{derive_stream, SeedSpec, SeedStream};
use crate::tensor::{slice, AdjacencyTensorView};

/// Sorted null sample of the per-slice PC statistic on `N - d + 2` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceNullTable {
    pub n_prime: usize,
    pub stats: Vec<f64>,
}

impl SliceNullTable {
    /// Empirical `1 - level / slices` quantile.
    pub fn bonferroni_threshold(&self, level: f64, slices: usize) -> Result<f64> {
        if slices == 0 {
            return Err(HpcError::param("slices must be at least 1"));
        }
        quantile_order_statistic(&self.stats, level / slices as f64)
    }

    /// Sample size that resolves the Bonferroni quantile (`20 s / level`).
    pub fn recommended_trials(level: f64, slices: usize) -> usize {
        (20.0 * slices as f64 / level).ceil() as usize
    }
}

/// Draws the per-slice null table directly: a slice of a null hypergraph is
/// an Erdős–Rényi graph on `N - d + 2` vertices.
pub fn calibrate_slice_null(
    n: usize,
    d: usize,
    trials: usize,
    settings: &SpectralSettings,
    master_seed: u64,
) -> Result<SliceNullTable> {
    if d < 3 || n < d {
        return Err(HpcError::param(format!("slice calibration needs d >= 3 and N >= d, got N={n} d={d}")));
    }
    let n_prime = n - d + 2;
    let params = ModelParams::null(n_prime, 2)?;
    let scope = format!("slice-null/n{n}/d{d}");
    let mut stats = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let g = sample_null(&params, &mut derive_stream(&SeedSpec::new(master_seed, format!("{scope}/null-gen"), t)))?;
            let mut det = derive_stream(&SeedSpec::new(master_seed, format!("{scope}/detector"), t));
            spectral_statistic(&g, settings, &mut det)
        })
        .collect::<Result<Vec<f64>>>()?;
    stats.sort_by(f64::total_cmp);
    Ok(SliceNullTable { n_prime, stats })
}

/// `s` distinct `(d-2)`-subsets of `[0, N)`, uniformly at random.
pub fn sample_slice_tuples<R: RngCore + ?Sized>(
    g: &DUniformHypergraph,
    slices: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if g.d() < 3 {
        return Err(HpcError::param("slice vote needs d >= 3"));
    }
    let ranker = Ranker::new(g.n(), g.d() - 2)?;
    if slices == 0 || slices > ranker.slots() {
        return Err(HpcError::param(format!(
            "slices = {slices} outside [1, C({}, {})] = [1, {}]",
            g.n(),
            g.d() - 2,
            ranker.slots()
        )));
    }
    let mut ranks = index::sample(rng, ranker.slots(), slices).into_vec();
    ranks.sort_unstable();
    Ok(ranks
        .into_iter()
        .map(|r| {
            let mut t = vec![0; g.d() - 2];
            ranker.unrank_into(r, &mut t);
            t
        })
        .collect())
}

/// Max over `slices` random slices of the PC spectral statistic.
pub fn slice_vote_statistic<R: RngCore + ?Sized>(
    g: &DUniformHypergraph,
    slices: usize,
    settings: &SpectralSettings,
    rng: &mut R,
) -> Result<f64> {
    let tuples = sample_slice_tuples(g, slices, rng)?;
    let mut streams: Vec<SeedStream> = Vec::with_capacity(tuples.len());
    let mut parent = SeedStream::from_rng(rng);
    for _ in 0..tuples.len() {
        streams.push(parent.fork());
    }
    let tensor = AdjacencyTensorView::centered(g);
    let stats = tuples
        .par_iter()
        .zip(streams.into_par_iter())
        .map(|(fixed, mut s)| {
            let sl = slice(&tensor, fixed)?;
            spectral_statistic(&sl.graph, settings, &mut s)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(stats.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Bonferroni-calibrated slice vote against a per-slice null table.
pub fn slice_vote_test<R: RngCore + ?Sized>(
    g: &DUniformHypergraph,
    slices: usize,
    level: f64,
    table: &SliceNullTable,
    settings: &SpectralSettings,
    rng: &mut R,
) -> Result<TestResult> {
    let t0 = Instant::now();
    if g.d() >= 3 && table.n_prime != g.n() + 2 - g.d() {
        return Err(HpcError::param(format!(
            "null table built for {} slice vertices, graph slices have {}",
            table.n_prime,
            g.n() + 2 - g.d()
        )));
    }
    let s = slice_vote_statistic(g, slices, settings, rng)?;
    let threshold = table.bonferroni_threshold(level, slices)?;
    Ok(TestResult::new("slicevote", s, threshold, t0.elapsed().as_secs_f64()))
}
