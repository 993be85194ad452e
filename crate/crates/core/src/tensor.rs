//! The adjacency tensor as an implicit object.
//!
//! Nothing here materializes the `N^d` tensor. Unfolding products walk the
//! `C(N, d)` edge slots once and scatter each slot's value to its `d!` ordered
//! tuples, which costs `O(N^d)` per product.

use rand::{Rng, RngCore};

use crate::comb::for_each_colex;
use crate::error::{HpcError, Result};
use crate::model::DUniformHypergraph;
use crate::scalar::{dot, norm, Scalar};

/// Default relative tolerance for the power iteration.
pub const DEFAULT_TOL: f64 = 1e-4;
/// Default iteration cap for the power iteration.
pub const DEFAULT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centering {
    /// 0/1 entries.
    Raw,
    /// `2A - 1` on distinct indices, 0 on any repeated index.
    #[default]
    Centered,
}

#[derive(Debug, Clone, Copy)]
pub struct AdjacencyTensorView<'g> {
    graph: &'g DUniformHypergraph,
    centering: Centering,
}

impl<'g> AdjacencyTensorView<'g> {
    pub fn new(graph: &'g DUniformHypergraph, centering: Centering) -> Self {
        AdjacencyTensorView { graph, centering }
    }

    pub fn centered(graph: &'g DUniformHypergraph) -> Self {
        Self::new(graph, Centering::Centered)
    }

    pub fn graph(&self) -> &'g DUniformHypergraph {
        self.graph
    }

    pub fn centering(&self) -> Centering {
        self.centering
    }

    /// Value stored for a slot given whether the edge is present.
    #[inline]
    fn slot_value(&self, present: bool) -> i8 {
        match (self.centering, present) {
            (_, true) => 1,
            (Centering::Raw, false) => 0,
            (Centering::Centered, false) => -1,
        }
    }

    pub fn entry(&self, idx: &[usize]) -> Result<i8> {
        let g = self.graph;
        if idx.len() != g.d() {
            return Err(HpcError::param(format!("index has {} modes, tensor has {}", idx.len(), g.d())));
        }
        if let Some(&i) = idx.iter().find(|&&i| i >= g.n()) {
            return Err(HpcError::range(format!("index {i} >= N = {}", g.n())));
        }
        let mut s = idx.to_vec();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Ok(0);
        }
        Ok(self.slot_value(g.has_sorted_edge(&s)))
    }
}

/// How the `d` modes are split into rows and columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Unfolding {
    /// Mode 1 against modes `2..d`.
    #[default]
    ModeOne,
    /// First `ceil(d/2)` modes against the remaining `floor(d/2)`.
    Balanced,
}

impl Unfolding {
    pub fn row_modes(self, d: usize) -> usize {
        match self {
            Unfolding::ModeOne => 1,
            Unfolding::Balanced => d.div_ceil(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `M v`
    Right,
    /// `M^T v`
    Left,
}

/// Matricization of a tensor view. Row id is `sum_{j<r} i_j N^j` over the row
/// modes, column id `sum_{j>=r} i_j N^(j-r)` over the rest.
#[derive(Debug, Clone)]
pub struct UnfoldingView<'g> {
    tensor: AdjacencyTensorView<'g>,
    row_modes: usize,
    rows: usize,
    cols: usize,
    perms: Vec<Vec<usize>>,
}

impl<'g> UnfoldingView<'g> {
    pub fn new(tensor: AdjacencyTensorView<'g>, layout: Unfolding) -> Result<Self> {
        let (n, d) = (tensor.graph.n(), tensor.graph.d());
        let row_modes = layout.row_modes(d);
        let pow = |e: usize| {
            n.checked_pow(e as u32)
                .ok_or_else(|| HpcError::Overflow(format!("N^{e} for N = {n}")))
        };
        Ok(UnfoldingView {
            tensor,
            row_modes,
            rows: pow(row_modes)?,
            cols: pow(d - row_modes)?,
            perms: permutations(d),
        })
    }

    pub fn mode_one(tensor: AdjacencyTensorView<'g>) -> Self {
        Self::new(tensor, Unfolding::ModeOne).expect("mode-one unfolding of a stored hypergraph fits in usize")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tensor(&self) -> &AdjacencyTensorView<'g> {
        &self.tensor
    }

    /// Entry `(row, col)` decoded to a tensor index.
    pub fn entry(&self, row: usize, col: usize) -> Result<i8> {
        if row >= self.rows || col >= self.cols {
            return Err(HpcError::range(format!("({row}, {col}) outside {}x{}", self.rows, self.cols)));
        }
        let n = self.tensor.graph.n();
        let d = self.tensor.graph.d();
        let mut idx = Vec::with_capacity(d);
        let (mut r, mut c) = (row, col);
        for _ in 0..self.row_modes {
            idx.push(r % n);
            r /= n;
        }
        for _ in self.row_modes..d {
            idx.push(c % n);
            c /= n;
        }
        self.tensor.entry(&idx)
    }

    fn apply_into<T: Scalar>(&self, v: &[T], side: Side, out: &mut [T]) {
        let g = self.tensor.graph;
        let (n, d, r) = (g.n(), g.d(), self.row_modes);
        out.iter_mut().for_each(|x| *x = T::zero());
        let mut pw = vec![1usize; d];
        for j in 1..d {
            pw[j] = pw[j - 1] * n;
        }
        let mut rank = 0usize;
        for_each_colex(n, d, |c| {
            let val = self.tensor.slot_value(g.has_rank(rank));
            rank += 1;
            if val == 0 {
                return;
            }
            let val = T::from_entry(val);
            for p in &self.perms {
                let mut row = 0;
                let mut col = 0;
                for (j, &pj) in p.iter().enumerate() {
                    if j < r {
                        row += c[pj] * pw[j];
                    } else {
                        col += c[pj] * pw[j - r];
                    }
                }
                match side {
                    Side::Right => out[row] = out[row] + val * v[col],
                    Side::Left => out[col] = out[col] + val * v[row],
                }
            }
        });
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(d), &mut vec![false; d], &mut out);
    out
}

/// `M v` (`Side::Right`) or `M^T v` (`Side::Left`) without forming `M`.
pub fn unfold_matvec<T: Scalar>(u: &UnfoldingView<'_>, v: &[T], side: Side) -> Result<Vec<T>> {
    let (expect, out_len) = match side {
        Side::Right => (u.cols, u.rows),
        Side::Left => (u.rows, u.cols),
    };
    if v.len() != expect {
        return Err(HpcError::param(format!("vector length {} != {expect}", v.len())));
    }
    let mut out = vec![T::zero(); out_len];
    u.apply_into(v, side, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularEstimate<T> {
    pub sigma: T,
    pub iterations: usize,
    pub converged: bool,
    /// Sigma estimate after each iteration.
    pub history: Vec<T>,
}

/// Top singular value by power iteration on `w -> M (M^T w)`, started from a
/// vector of iid uniform `[-1, 1)` draws from `rng`.
pub fn top_singular_value<T: Scalar, R: RngCore + ?Sized>(
    u: &UnfoldingView<'_>,
    tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<SingularEstimate<T>> {
    check_power_args(u, tol, max_iter)?;
    // continuous draws: a ±1 start can be exactly orthogonal to the top singular vector
    let start: Vec<T> = (0..u.rows)
        .map(|_| T::from_f64_lossy(rng.gen_range(-1.0..1.0)))
        .collect();
    power_iteration(u, start, tol, max_iter)
}

fn check_power_args(u: &UnfoldingView<'_>, tol: f64, max_iter: usize) -> Result<()> {
    if u.tensor.graph.n() == 0 {
        return Err(HpcError::param("N = 0 has no singular values"));
    }
    if !(tol > 0.0) {
        return Err(HpcError::param(format!("tol = {tol} must be positive")));
    }
    if max_iter == 0 {
        return Err(HpcError::param("max_iter must be at least 1"));
    }
    Ok(())
}

/// Power iteration from an explicit start vector of length `rows()`.
pub fn power_iteration<T: Scalar>(
    u: &UnfoldingView<'_>,
    start: Vec<T>,
    tol: f64,
    max_iter: usize,
) -> Result<SingularEstimate<T>> {
    check_power_args(u, tol, max_iter)?;
    if start.len() != u.rows {
        return Err(HpcError::param(format!("start length {} != {}", start.len(), u.rows)));
    }
    let tol = T::from_f64_lossy(tol);
    let mut w = start;
    let mut z = vec![T::zero(); u.cols];
    let mut y = vec![T::zero(); u.rows];
    let mut history = Vec::new();
    let mut prev: Option<T> = None;
    for it in 1..=max_iter {
        u.apply_into(&w, Side::Left, &mut z);
        u.apply_into(&z, Side::Right, &mut y);
        let ww = dot(&w, &w);
        if ww == T::zero() {
            return Err(HpcError::param("start vector is zero"));
        }
        // Rayleigh quotient of the Gram operator: <w, M M^T w> / <w, w> = |M^T w|^2 / |w|^2
        let sigma = (dot(&z, &z) / ww).sqrt();
        history.push(sigma);
        let ny = norm(&y);
        if ny == T::zero() {
            return Ok(SingularEstimate { sigma, iterations: it, converged: true, history });
        }
        if let Some(p) = prev {
            if (sigma - p).abs() < tol * sigma {
                return Ok(SingularEstimate { sigma, iterations: it, converged: true, history });
            }
        }
        prev = Some(sigma);
        for (wi, &yi) in w.iter_mut().zip(&y) {
            *wi = yi / ny;
        }
    }
    Ok(SingularEstimate {
        sigma: *history.last().expect("max_iter >= 1"),
        iterations: max_iter,
        converged: false,
        history,
    })
}

/// A 2-uniform slice with the map from new ids back to original vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceGraph {
    pub graph: DUniformHypergraph,
    /// `vertex_map[new_id] = original_id`, increasing.
    pub vertex_map: Vec<usize>,
}

/// Fixes `d - 2` distinct vertices and keeps pairs `{i, j}` whose union with
/// the fixed set is a hyperedge. Remaining vertices are relabeled in order.
pub fn slice(t: &AdjacencyTensorView<'_>, fixed: &[usize]) -> Result<SliceGraph> {
    let g = t.graph;
    let d = g.d();
    if d < 3 {
        return Err(HpcError::param("slicing needs d >= 3"));
    }
    if fixed.len() != d - 2 {
        return Err(HpcError::param(format!("need {} fixed vertices, got {}", d - 2, fixed.len())));
    }
    let mut fixed_sorted = fixed.to_vec();
    fixed_sorted.sort_unstable();
    if let Some(&v) = fixed_sorted.iter().find(|&&v| v >= g.n()) {
        return Err(HpcError::range(format!("fixed vertex {v} >= N = {}", g.n())));
    }
    if fixed_sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(HpcError::param("fixed vertices repeat"));
    }
    let vertex_map: Vec<usize> = (0..g.n()).filter(|v| fixed_sorted.binary_search(v).is_err()).collect();
    let mut out = DUniformHypergraph::empty(vertex_map.len(), 2)?;
    let mut rank = 0usize;
    let mut buf = Vec::with_capacity(d);
    for_each_colex(vertex_map.len(), 2, |pair| {
        buf.clear();
        buf.extend_from_slice(&fixed_sorted);
        buf.push(vertex_map[pair[0]]);
        buf.push(vertex_map[pair[1]]);
        buf.sort_unstable();
        if g.has_sorted_edge(&buf) {
            out.set_rank(rank, true);
        }
        rank += 1;
    });
    Ok(SliceGraph { graph: out, vertex_map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate, plant_clique, ModelParams};
    use crate::stream::{derive_stream, SeedSpec};

    fn rng(t: u64) -> crate::stream::SeedStream {
        derive_stream(&SeedSpec::new(3, "tensor-test", t))
    }

    #[test]
    fn complete_centered_entries() {
        let g = DUniformHypergraph::complete(5, 3).unwrap();
        let t = AdjacencyTensorView::centered(&g);
        assert_eq!(t.entry(&[0, 3, 4]).unwrap(), 1);
        assert_eq!(t.entry(&[0, 3, 0]).unwrap(), 0);
        assert!(matches!(t.entry(&[0, 3, 5]), Err(HpcError::Range(_))));
        let raw = AdjacencyTensorView::new(&g, Centering::Raw);
        assert_eq!(raw.entry(&[1, 1, 2]).unwrap(), 0);
    }

    #[test]
    fn entries_are_symmetric_and_diagonal_free() {
        let g = generate(&ModelParams::null(9, 4).unwrap(), 1, "", 0).unwrap().graph;
        let t = AdjacencyTensorView::centered(&g);
        let mut r = rng(0);
        for _ in 0..1000 {
            let idx: Vec<usize> = (0..4).map(|_| r.gen_range(0..9)).collect();
            let mut p = idx.clone();
            rand::seq::SliceRandom::shuffle(p.as_mut_slice(), &mut r);
            assert_eq!(t.entry(&idx).unwrap(), t.entry(&p).unwrap());
            let mut rep = idx.clone();
            rep[3] = rep[r.gen_range(0..3)];
            assert_eq!(t.entry(&rep).unwrap(), 0);
        }
    }

    #[test]
    fn zero_vector_maps_to_zero() {
        let g = generate(&ModelParams::null(6, 3).unwrap(), 1, "", 0).unwrap().graph;
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        assert_eq!(u.rows(), 6);
        assert_eq!(u.cols(), 36);
        let out = unfold_matvec(&u, &vec![0.0f64; 36], Side::Right).unwrap();
        assert!(out.iter().all(|&x| x == 0.0));
        assert!(unfold_matvec(&u, &vec![0.0f64; 6], Side::Right).is_err());
    }

    #[test]
    fn complete_and_empty_have_sqrt12() {
        for g in [DUniformHypergraph::complete(4, 3).unwrap(), DUniformHypergraph::empty(4, 3).unwrap()] {
            let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
            let est = top_singular_value::<f64, _>(&u, 1e-12, 1000, &mut rng(1)).unwrap();
            assert!((est.sigma - 12f64.sqrt()).abs() < 1e-9, "{}", est.sigma);
            assert!(est.converged);
        }
    }

    #[test]
    fn start_vector_scale_is_irrelevant() {
        let g = generate(&ModelParams::null(10, 3).unwrap(), 4, "", 0).unwrap().graph;
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        let mut r = rng(2);
        let start: Vec<f64> = (0..10).map(|_| r.gen_range(-1.0..1.0)).collect();
        let base = power_iteration(&u, start.clone(), 1e-10, 50).unwrap();
        let scaled4 = power_iteration(&u, start.iter().map(|x| 4.0 * x).collect(), 1e-10, 50).unwrap();
        assert_eq!(base.history, scaled4.history);
        let scaled = power_iteration(&u, start.iter().map(|x| 3.7 * x).collect(), 1e-10, 50).unwrap();
        assert_eq!(base.history.len(), scaled.history.len());
        for (a, b) in base.history.iter().zip(&scaled.history) {
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn power_iteration_argument_errors() {
        let g = DUniformHypergraph::empty(0, 3).unwrap();
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        assert!(top_singular_value::<f64, _>(&u, 1e-4, 10, &mut rng(0)).is_err());
        let g = DUniformHypergraph::empty(4, 3).unwrap();
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        assert!(top_singular_value::<f64, _>(&u, 0.0, 10, &mut rng(0)).is_err());
        assert!(top_singular_value::<f64, _>(&u, 1e-4, 0, &mut rng(0)).is_err());
    }

    #[test]
    fn non_convergence_is_flagged_not_fatal() {
        let g = generate(&ModelParams::null(12, 3).unwrap(), 8, "", 0).unwrap().graph;
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        let est = top_singular_value::<f64, _>(&u, 1e-300, 3, &mut rng(0)).unwrap();
        assert!(!est.converged);
        assert_eq!(est.iterations, 3);
        assert!(est.sigma > 0.0);
    }

    #[test]
    fn fewer_vertices_than_arity_gives_zero() {
        let g = DUniformHypergraph::empty(2, 3).unwrap();
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        let est = top_singular_value::<f64, _>(&u, 1e-4, 10, &mut rng(0)).unwrap();
        assert_eq!(est.sigma, 0.0);
    }

    #[test]
    fn single_precision_agrees_with_double() {
        let g = generate(&ModelParams::null(10, 3).unwrap(), 5, "", 0).unwrap().graph;
        let u = UnfoldingView::mode_one(AdjacencyTensorView::centered(&g));
        let a = top_singular_value::<f64, _>(&u, 1e-9, 5000, &mut rng(5)).unwrap();
        let b = top_singular_value::<f32, _>(&u, 1e-6, 5000, &mut rng(5)).unwrap();
        assert!((a.sigma - b.sigma as f64).abs() < 1e-3 * a.sigma);
    }

    #[test]
    fn slice_of_complete_is_complete() {
        let g = DUniformHypergraph::complete(7, 4).unwrap();
        let s = slice(&AdjacencyTensorView::centered(&g), &[5, 1]).unwrap();
        assert_eq!(s.graph.n(), 5);
        assert_eq!(s.vertex_map, vec![0, 2, 3, 4, 6]);
        assert_eq!(s.graph, DUniformHypergraph::complete(5, 2).unwrap());
    }

    #[test]
    fn slice_inside_clique_is_complete_on_rest_of_clique() {
        let g = generate(&ModelParams::null(30, 3).unwrap(), 2, "", 0).unwrap().graph;
        let inst = plant_clique(&g, 10, &mut rng(9)).unwrap();
        let k = inst.clique.unwrap();
        let s = slice(&AdjacencyTensorView::centered(&inst.graph), &[k[3]]).unwrap();
        assert_eq!(s.graph.n(), 29);
        let rest: Vec<usize> = k
            .iter()
            .filter(|&&v| v != k[3])
            .map(|v| s.vertex_map.binary_search(v).unwrap())
            .collect();
        assert!(crate::model::is_clique(&s.graph, &rest).unwrap());
    }

    #[test]
    fn slice_argument_errors() {
        let g = DUniformHypergraph::complete(6, 3).unwrap();
        let t = AdjacencyTensorView::centered(&g);
        assert!(slice(&t, &[6]).is_err());
        assert!(slice(&t, &[1, 2]).is_err());
        let g4 = DUniformHypergraph::complete(6, 4).unwrap();
        assert!(slice(&AdjacencyTensorView::centered(&g4), &[2, 2]).is_err());
        let g2 = DUniformHypergraph::complete(6, 2).unwrap();
        assert!(slice(&AdjacencyTensorView::centered(&g2), &[]).is_err());
    }

    #[test]
    fn balanced_layout_shape() {
        let g = DUniformHypergraph::complete(5, 4).unwrap();
        let u = UnfoldingView::new(AdjacencyTensorView::centered(&g), Unfolding::Balanced).unwrap();
        assert_eq!((u.rows(), u.cols()), (25, 25));
        let g3 = DUniformHypergraph::complete(5, 3).unwrap();
        let u3 = UnfoldingView::new(AdjacencyTensorView::centered(&g3), Unfolding::Balanced).unwrap();
        assert_eq!((u3.rows(), u3.cols()), (25, 5));
    }
}
