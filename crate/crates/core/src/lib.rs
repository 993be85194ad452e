//! Hypergraphic planted clique (HPC) instances, detectors and Monte Carlo
//! risk experiments.
//!
//! A `d`-uniform hypergraph on `N` vertices is stored as one bit per
//! colex-ranked `d`-subset. Under `H0` every bit is a fair coin; under `H1`
//! all `d`-subsets of a hidden `kappa`-set are forced on. Detectors map a
//! hypergraph to a statistic and a 0/1 decision, and the [`harness`] turns
//! them into calibrated tests and empirical risk tables over `(N, kappa)`.
//!
//! The spectral numerics are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common choices.

pub mod comb;
pub mod detectors;
pub mod error;
pub mod harness;
pub mod io;
pub mod model;
pub mod scalar;
pub mod stream;
pub mod tensor;

pub use comb::{binom, comb_rank, comb_unrank, CombIndex};
pub use error::{HpcError, Result};
pub use model::{
    generate, is_clique, plant_clique, sample_null, DUniformHypergraph, Hypothesis, ModelParams, PlantedInstance,
};
pub use scalar::Scalar;
pub use stream::{derive_stream, SeedSpec, SeedStream};
pub use tensor::{AdjacencyTensorView, Centering, SingularEstimate, Unfolding, UnfoldingView};

/// Double-precision singular value estimate.
pub type SingularEstimateF64 = SingularEstimate<f64>;
/// Single-precision singular value estimate.
pub type SingularEstimateF32 = SingularEstimate<f32>;
