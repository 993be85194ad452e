//! Exact binomials and colexicographic ranking of k-subsets.
//!
//! The colex rank of `c_1 < c_2 < ... < c_k` is `sum_j C(c_j, j)`. It does not
//! depend on the ground-set size, so bit addresses of a hyperedge never change
//! with the vertex count.

use crate::error::{HpcError, Result};

/// Largest subset size handled by the ranking code.
pub const MAX_SUBSET_SIZE: usize = 8;

/// Vertex ids must stay below this bound so every rank fits in `u128`.
pub const MAX_VERTEX_ID: usize = 100_000;

/// Exact `C(n, k)`, `0` when `k > n`.
pub fn binom(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc == C(n - k + i - 1, i - 1) here, so the division is exact.
        acc = acc
            .checked_mul(u128::from(n - k + i))
            .ok_or_else(|| HpcError::Overflow(format!("C({n}, {k})")))?
            / u128::from(i);
    }
    Ok(acc)
}

/// A strictly increasing list of 0-based vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombIndex(Vec<usize>);

impl CombIndex {
    pub fn new(members: Vec<usize>) -> Result<Self> {
        if members.len() > MAX_SUBSET_SIZE {
            return Err(HpcError::param(format!(
                "subset size {} exceeds {MAX_SUBSET_SIZE}",
                members.len()
            )));
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HpcError::param(format!(
                "subset members not strictly increasing: {members:?}"
            )));
        }
        if let Some(&m) = members.last() {
            if m >= MAX_VERTEX_ID {
                return Err(HpcError::range(format!("vertex {m} >= {MAX_VERTEX_ID}")));
            }
        }
        Ok(CombIndex(members))
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

/// Colex rank of a subset.
pub fn comb_rank(s: &CombIndex) -> u128 {
    s.members()
        .iter()
        .enumerate()
        .map(|(j, &c)| binom(c as u64, j as u64 + 1).expect("bounded by MAX_VERTEX_ID"))
        .sum()
}

/// Inverse of [`comb_rank`] on the k-subsets of `[0, n)`.
pub fn comb_unrank(rank: u128, k: usize, n: usize) -> Result<CombIndex> {
    if k > MAX_SUBSET_SIZE || n > MAX_VERTEX_ID {
        return Err(HpcError::param(format!("unsupported (n, k) = ({n}, {k})")));
    }
    let total = binom(n as u64, k as u64)?;
    if rank >= total {
        return Err(HpcError::range(format!("rank {rank} >= C({n}, {k}) = {total}")));
    }
    let mut r = rank;
    let mut out = vec![0usize; k];
    let mut hi = n;
    for j in (1..=k).rev() {
        // largest c < hi with C(c, j) <= r
        let (mut lo, mut top) = (j - 1, hi - 1);
        while lo < top {
            let mid = (lo + top).div_ceil(2);
            if binom(mid as u64, j as u64)? <= r {
                lo = mid;
            } else {
                top = mid - 1;
            }
        }
        out[j - 1] = lo;
        r -= binom(lo as u64, j as u64)?;
        hi = lo;
    }
    CombIndex::new(out)
}

/// Precomputed binomial table for fast ranking of k-subsets of `[0, n)` into `usize`.
#[derive(Debug, Clone)]
pub struct Ranker {
    n: usize,
    k: usize,
    // table[j * (n + 1) + c] = C(c, j)
    table: Vec<usize>,
    slots: usize,
}

impl Ranker {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > MAX_SUBSET_SIZE || n > MAX_VERTEX_ID {
            return Err(HpcError::param(format!("unsupported (n, k) = ({n}, {k})")));
        }
        let slots = usize::try_from(binom(n as u64, k as u64)?)
            .map_err(|_| HpcError::Overflow(format!("C({n}, {k}) as usize")))?;
        let mut table = vec![0usize; (k + 1) * (n + 1)];
        for j in 0..=k {
            for c in 0..=n {
                let v = binom(c as u64, j as u64)?;
                table[j * (n + 1) + c] = usize::try_from(v).unwrap_or(usize::MAX);
            }
        }
        Ok(Ranker { n, k, table, slots })
    }

    /// Number of k-subsets, `C(n, k)`.
    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn binom(&self, c: usize, j: usize) -> usize {
        self.table[j * (self.n + 1) + c]
    }

    /// Rank of a sorted, distinct slice of length `k` with members below `n`.
    #[inline]
    pub fn rank_sorted(&self, members: &[usize]) -> usize {
        debug_assert_eq!(members.len(), self.k);
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        members
            .iter()
            .enumerate()
            .map(|(j, &c)| self.binom(c, j + 1))
            .sum()
    }

    pub fn unrank_into(&self, mut rank: usize, out: &mut [usize]) {
        debug_assert!(rank < self.slots);
        let mut hi = self.n;
        for j in (1..=self.k).rev() {
            let mut c = hi - 1;
            while self.binom(c, j) > rank {
                c -= 1;
            }
            out[j - 1] = c;
            rank -= self.binom(c, j);
            hi = c;
        }
    }
}

/// Calls `f` on every k-subset of `[0, n)` in colex order, i.e. rank order.
pub fn for_each_colex(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        f(&c);
        let mut j = 0;
        while j < k {
            let limit = if j + 1 < k { c[j + 1] } else { n };
            if c[j] + 1 < limit {
                break;
            }
            j += 1;
        }
        if j == k {
            return;
        }
        c[j] += 1;
        for (i, slot) in c.iter_mut().enumerate().take(j) {
            *slot = i;
        }
    }
}

/// Calls `f` on every k-subset of `items` (positions taken in colex order).
pub(crate) fn for_each_subset_of<T: Copy>(items: &[T], k: usize, buf: &mut Vec<T>, mut f: impl FnMut(&[T]) -> bool) -> bool {
    let mut keep_going = true;
    for_each_colex(items.len(), k, |pos| {
        if !keep_going {
            return;
        }
        buf.clear();
        buf.extend(pos.iter().map(|&p| items[p]));
        keep_going = f(buf);
    });
    keep_going
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: usize, k: usize) -> u128 {
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row.get(k).copied().unwrap_or(0)
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(4, 3).unwrap(), 4);
        for n in 0..30 {
            assert_eq!(binom(n, 0).unwrap(), 1);
        }
        assert_eq!(binom(3, 5).unwrap(), 0);
        assert_eq!(pascal(64, 7), 621_216_192);
        assert_eq!(binom(64, 7).unwrap(), 621_216_192);
    }

    #[test]
    fn binom_pascal_rule() {
        for n in 1..=64u64 {
            for k in 1..=8u64 {
                assert_eq!(
                    binom(n, k).unwrap(),
                    binom(n - 1, k - 1).unwrap() + binom(n - 1, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn binom_supported_range_and_overflow() {
        assert!(binom(10_000, 8).is_ok());
        assert!(matches!(binom(1_000, 500), Err(HpcError::Overflow(_))));
    }

    #[test]
    fn rank_examples() {
        let r = |v: Vec<usize>| comb_rank(&CombIndex::new(v).unwrap());
        assert_eq!(r(vec![0, 1, 2]), 0);
        assert_eq!(r(vec![0, 1, 3]), 1);
        assert_eq!(r(vec![2, 3, 4]), 9);
        assert_eq!(comb_unrank(0, 3, 5).unwrap().members(), &[0, 1, 2]);
        assert_eq!(comb_unrank(9, 3, 5).unwrap().members(), &[2, 3, 4]);
        assert!(matches!(comb_unrank(10, 3, 5), Err(HpcError::Range(_))));
    }

    #[test]
    fn colex_enumeration_order_of_small_case() {
        let mut seen = Vec::new();
        for_each_colex(4, 3, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]
        );
    }

    #[test]
    fn round_trip_exhaustive_small() {
        let mut count = 0u128;
        for_each_colex(12, 3, |c| {
            let s = CombIndex::new(c.to_vec()).unwrap();
            let r = comb_rank(&s);
            assert_eq!(r, count);
            assert_eq!(comb_unrank(r, 3, 12).unwrap(), s);
            count += 1;
        });
        assert_eq!(count, 220);
    }

    #[test]
    fn rank_unrank_identity_up_to_n14_k6() {
        for n in 0..=14usize {
            for k in 0..=6usize {
                let total = binom(n as u64, k as u64).unwrap();
                let ranker = Ranker::new(n, k).unwrap();
                assert_eq!(ranker.slots() as u128, total);
                let mut buf = vec![0; k];
                for r in 0..total {
                    let s = comb_unrank(r, k, n).unwrap();
                    assert_eq!(comb_rank(&s), r);
                    ranker.unrank_into(r as usize, &mut buf);
                    assert_eq!(buf.as_slice(), s.members());
                    assert_eq!(ranker.rank_sorted(&buf), r as usize);
                }
                let mut next = 0u128;
                for_each_colex(n, k, |c| {
                    assert_eq!(comb_rank(&CombIndex::new(c.to_vec()).unwrap()), next);
                    next += 1;
                });
                assert_eq!(next, total);
            }
        }
    }

    #[test]
    fn rank_is_monotone_in_colex_order() {
        // colex order: compare reversed member lists lexicographically
        let mut all = Vec::new();
        for_each_colex(10, 3, |c| all.push(CombIndex::new(c.to_vec()).unwrap()));
        for a in &all {
            for b in &all {
                let ka: Vec<_> = a.members().iter().rev().collect();
                let kb: Vec<_> = b.members().iter().rev().collect();
                assert_eq!(ka.cmp(&kb), comb_rank(a).cmp(&comb_rank(b)));
            }
        }
    }

    #[test]
    fn comb_index_rejects_bad_members() {
        assert!(CombIndex::new(vec![1, 1, 2]).is_err());
        assert!(CombIndex::new(vec![3, 2]).is_err());
        assert!(CombIndex::new((0..9).collect()).is_err());
    }
}
