use std::fmt;

use rand::RngCore;

use crate::detectors::{
    default_steps, edge_count_statistic, exhaustive_k_star, max_clique_exhaustive, metropolis_search,
    slice_vote_statistic, spectral_statistic, SpectralSettings, DEFAULT_EPSILON, DEFAULT_LAMBDA,
};
use crate::error::{HpcError, Result};
use crate::model::DUniformHypergraph;

/// A detector and its settings, evaluated as a scalar statistic.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectorConfig {
    EdgeCount,
    Spectral(SpectralSettings),
    /// Max clique size, searched up to `k*`.
    Exhaustive { epsilon: f64 },
    /// `steps = None` means `ceil(10 N ln N)`.
    Metropolis { lambda: f64, steps: Option<u64> },
    /// `slices = None` means `min(N, C(N, d-2))`.
    SliceVote { slices: Option<usize>, spectral: SpectralSettings },
    /// Returns the same value on every input.
    Constant(f64),
}

impl DetectorConfig {
    pub fn name(&self) -> &'static str {
        match self {
            DetectorConfig::EdgeCount => "edgecount",
            DetectorConfig::Spectral(_) => "spectral",
            DetectorConfig::Exhaustive { .. } => "exhaustive",
            DetectorConfig::Metropolis { .. } => "metropolis",
            DetectorConfig::SliceVote { .. } => "slicevote",
            DetectorConfig::Constant(_) => "constant",
        }
    }

    /// Default settings for a detector name.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "edgecount" => DetectorConfig::EdgeCount,
            "spectral" => DetectorConfig::Spectral(SpectralSettings::default()),
            "exhaustive" => DetectorConfig::Exhaustive { epsilon: DEFAULT_EPSILON },
            "metropolis" => DetectorConfig::Metropolis { lambda: DEFAULT_LAMBDA, steps: None },
            "slicevote" => DetectorConfig::SliceVote {
                slices: None,
                spectral: SpectralSettings::default(),
            },
            other => return Err(HpcError::param(format!("unknown detector {other:?}"))),
        })
    }

    pub fn statistic<R: RngCore + ?Sized>(&self, g: &DUniformHypergraph, rng: &mut R) -> Result<f64> {
        match self {
            DetectorConfig::EdgeCount => edge_count_statistic(g),
            DetectorConfig::Spectral(s) => spectral_statistic(g, s, rng),
            DetectorConfig::Exhaustive { epsilon } => {
                let k = exhaustive_k_star(g.n(), g.d(), *epsilon)?;
                Ok(max_clique_exhaustive(g, Some(k)).size as f64)
            }
            DetectorConfig::Metropolis { lambda, steps } => {
                let steps = steps.unwrap_or_else(|| default_steps(g.n()));
                Ok(metropolis_search(g, *lambda, steps, rng)?.size as f64)
            }
            DetectorConfig::SliceVote { slices, spectral } => {
                let s = slices.unwrap_or_else(|| default_slices(g.n(), g.d()));
                slice_vote_statistic(g, s, spectral, rng)
            }
            DetectorConfig::Constant(c) => Ok(*c),
        }
    }
}

/// `min(N, C(N, d-2))`: with `N` slices about `kappa` of them land on a clique vertex at `d = 3`.
pub fn default_slices(n: usize, d: usize) -> usize {
    let c = crate::comb::binom(n as u64, d.saturating_sub(2) as u64)
        .ok()
        .and_then(|c| usize::try_from(c).ok())
        .unwrap_or(usize::MAX);
    n.min(c)
}

impl fmt::Display for DetectorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectorConfig::EdgeCount => write!(f, "edgecount"),
            DetectorConfig::Spectral(s) => {
                write!(f, "spectral(tol={}, max_iter={}, unfolding={:?})", s.tol, s.max_iter, s.unfolding)
            }
            DetectorConfig::Exhaustive { epsilon } => write!(f, "exhaustive(epsilon={epsilon})"),
            DetectorConfig::Metropolis { lambda, steps } => match steps {
                Some(s) => write!(f, "metropolis(lambda={lambda}, steps={s})"),
                None => write!(f, "metropolis(lambda={lambda}, steps=ceil(10 N ln N))"),
            },
            DetectorConfig::SliceVote { slices, spectral } => write!(
                f,
                "slicevote(slices={}, tol={}, max_iter={})",
                slices.map_or("min(N, C(N,d-2))".to_string(), |s| s.to_string()),
                spectral.tol,
                spectral.max_iter
            ),
            DetectorConfig::Constant(c) => write!(f, "constant({c})"),
        }
    }
}
