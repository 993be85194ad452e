//! Erdős–Rényi d-uniform hypergraphs and clique planting.

use std::fmt;

use rand::seq::index;
use rand::RngCore;

use crate::comb::{for_each_colex, for_each_subset_of, Ranker, MAX_SUBSET_SIZE};
use crate::error::{HpcError, Result};
use crate::stream::{derive_stream, SeedSpec};

pub const MIN_ARITY: usize = 2;
pub const MAX_ARITY: usize = MAX_SUBSET_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelParams {
    pub n: usize,
    pub d: usize,
    pub kappa: Option<usize>,
}

impl ModelParams {
    pub fn null(n: usize, d: usize) -> Result<Self> {
        Self::new(n, d, None)
    }

    pub fn planted(n: usize, d: usize, kappa: usize) -> Result<Self> {
        Self::new(n, d, Some(kappa))
    }

    pub fn new(n: usize, d: usize, kappa: Option<usize>) -> Result<Self> {
        if !(MIN_ARITY..=MAX_ARITY).contains(&d) {
            return Err(HpcError::param(format!("d = {d} outside [{MIN_ARITY}, {MAX_ARITY}]")));
        }
        if n == 0 {
            return Err(HpcError::param("N must be at least 1"));
        }
        if let Some(k) = kappa {
            if k > n {
                return Err(HpcError::param(format!("kappa = {k} exceeds N = {n}")));
            }
        }
        Ok(ModelParams { n, d, kappa })
    }
}

/// A d-uniform hypergraph on `[0, N)` stored as one bit per colex-ranked d-subset.
#[derive(Clone)]
pub struct DUniformHypergraph {
    n: usize,
    d: usize,
    ranker: Ranker,
    words: Vec<u64>,
}

impl PartialEq for DUniformHypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d && self.words == other.words
    }
}

impl Eq for DUniformHypergraph {}

impl fmt::Debug for DUniformHypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DUniformHypergraph")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl DUniformHypergraph {
    /// Hypergraph with no edges. `N < d` gives zero edge slots.
    pub fn empty(n: usize, d: usize) -> Result<Self> {
        if !(MIN_ARITY..=MAX_ARITY).contains(&d) {
            return Err(HpcError::param(format!("d = {d} outside [{MIN_ARITY}, {MAX_ARITY}]")));
        }
        let ranker = Ranker::new(n, d)?;
        let words = vec![0u64; ranker.slots().div_ceil(64)];
        Ok(DUniformHypergraph { n, d, ranker, words })
    }

    pub fn complete(n: usize, d: usize) -> Result<Self> {
        let mut g = Self::empty(n, d)?;
        g.words.iter_mut().for_each(|w| *w = u64::MAX);
        g.mask_tail();
        Ok(g)
    }

    /// Builds from raw little-endian edge words; bits past `C(N, d)` must be clear.
    pub(crate) fn from_words(n: usize, d: usize, words: Vec<u64>) -> Result<Self> {
        let mut g = Self::empty(n, d)?;
        if words.len() != g.words.len() {
            return Err(HpcError::param("edge word count does not match C(N, d)"));
        }
        g.words = words;
        let before = g.words.clone();
        g.mask_tail();
        if before != g.words {
            return Err(HpcError::param("padding bits beyond C(N, d) are set"));
        }
        Ok(g)
    }

    fn mask_tail(&mut self) {
        let rem = self.ranker.slots() % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `C(N, d)`.
    pub fn slot_count(&self) -> usize {
        self.ranker.slots()
    }

    pub fn ranker(&self) -> &Ranker {
        &self.ranker
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn edge_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn has_rank(&self, rank: usize) -> bool {
        self.words[rank / 64] >> (rank % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_rank(&mut self, rank: usize, on: bool) {
        let mask = 1u64 << (rank % 64);
        if on {
            self.words[rank / 64] |= mask;
        } else {
            self.words[rank / 64] &= !mask;
        }
    }

    /// Edge test for a sorted, distinct d-tuple in range. Unchecked beyond debug asserts.
    #[inline]
    pub fn has_sorted_edge(&self, sorted: &[usize]) -> bool {
        self.has_rank(self.ranker.rank_sorted(sorted))
    }

    /// Edge test for any d vertices; repeats or out-of-range ids are errors.
    pub fn has_edge(&self, vertices: &[usize]) -> Result<bool> {
        let sorted = self.sorted_distinct(vertices)?;
        if sorted.len() != self.d {
            return Err(HpcError::param(format!(
                "edge needs {} vertices, got {}",
                self.d,
                sorted.len()
            )));
        }
        Ok(self.has_sorted_edge(&sorted))
    }

    pub fn set_edge(&mut self, vertices: &[usize], on: bool) -> Result<()> {
        let sorted = self.sorted_distinct(vertices)?;
        if sorted.len() != self.d {
            return Err(HpcError::param(format!("edge needs {} vertices", self.d)));
        }
        let r = self.ranker.rank_sorted(&sorted);
        self.set_rank(r, on);
        Ok(())
    }

    fn sorted_distinct(&self, vertices: &[usize]) -> Result<Vec<usize>> {
        let mut s = vertices.to_vec();
        s.sort_unstable();
        if let Some(&v) = s.iter().find(|&&v| v >= self.n) {
            return Err(HpcError::range(format!("vertex {v} >= N = {}", self.n)));
        }
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(HpcError::param(format!("repeated vertex in {vertices:?}")));
        }
        Ok(s)
    }

    /// Edges as sorted d-tuples in colex rank order.
    pub fn edges(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.edge_count());
        let mut rank = 0usize;
        for_each_colex(self.n, self.d, |c| {
            if self.has_rank(rank) {
                out.push(c.to_vec());
            }
            rank += 1;
        });
        out
    }

    /// Ranks of present edges, ascending.
    pub fn edge_ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

/// A hypergraph plus the hidden ground truth. Detectors only ever see `graph`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedInstance {
    pub graph: DUniformHypergraph,
    pub clique: Option<Vec<usize>>,
    pub hypothesis: Hypothesis,
}

impl PlantedInstance {
    pub fn null(graph: DUniformHypergraph) -> Self {
        PlantedInstance {
            graph,
            clique: None,
            hypothesis: Hypothesis::H0,
        }
    }
}

/// Samples `G_d(N, 1/2)`: one fair bit per slot, slots in colex rank order,
/// bit `r` taken from bit `r % 64` of the `r / 64`-th 64-bit word of the stream.
pub fn sample_null<R: RngCore + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<DUniformHypergraph> {
    let mut g = DUniformHypergraph::empty(params.n, params.d)?;
    for w in g.words.iter_mut() {
        *w = rng.next_u64();
    }
    g.mask_tail();
    Ok(g)
}

/// Plants a clique on a uniformly random `kappa`-subset of the vertices.
pub fn plant_clique<R: RngCore + ?Sized>(
    g: &DUniformHypergraph,
    kappa: usize,
    rng: &mut R,
) -> Result<PlantedInstance> {
    if kappa > g.n {
        return Err(HpcError::param(format!("kappa = {kappa} exceeds N = {}", g.n)));
    }
    let mut clique = index::sample(rng, g.n, kappa).into_vec();
    clique.sort_unstable();
    let mut graph = g.clone();
    let mut buf = Vec::with_capacity(g.d);
    for_each_subset_of(&clique, g.d, &mut buf, |e| {
        let r = graph.ranker.rank_sorted(e);
        graph.set_rank(r, true);
        true
    });
    Ok(PlantedInstance {
        graph,
        clique: Some(clique),
        hypothesis: Hypothesis::H1,
    })
}

/// True iff every d-subset of `vertices` is an edge. Sets smaller than `d` are cliques.
pub fn is_clique(g: &DUniformHypergraph, vertices: &[usize]) -> Result<bool> {
    let s = g.sorted_distinct(vertices)?;
    Ok(is_clique_sorted(g, &s))
}

pub(crate) fn is_clique_sorted(g: &DUniformHypergraph, sorted: &[usize]) -> bool {
    let mut buf = Vec::with_capacity(g.d);
    for_each_subset_of(sorted, g.d, &mut buf, |e| g.has_sorted_edge(e))
}

fn scoped_tag(scope: &str, role: &str) -> String {
    if scope.is_empty() {
        role.to_string()
    } else {
        format!("{scope}/{role}")
    }
}

/// Draws one instance: the null hypergraph from the `null-gen` stream and, when
/// `params.kappa` is set, the clique from the `plant` stream.
pub fn generate(params: &ModelParams, master_seed: u64, scope: &str, trial: u64) -> Result<PlantedInstance> {
    let mut gen = derive_stream(&SeedSpec::new(master_seed, scoped_tag(scope, "null-gen"), trial));
    let g = sample_null(params, &mut gen)?;
    match params.kappa {
        None => Ok(PlantedInstance::null(g)),
        Some(k) => {
            let mut plant = derive_stream(&SeedSpec::new(master_seed, scoped_tag(scope, "plant"), trial));
            plant_clique(&g, k, &mut plant)
        }
    }
}
