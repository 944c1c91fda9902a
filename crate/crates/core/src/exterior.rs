//! Combinatorics of the standard basis of Λ^p V.
//!
//! Basis elements `e_I = e_{i_1} ∧ … ∧ e_{i_p}` are addressed by strictly
//! increasing multi-indices, stored as bitmasks (bit `i - 1` set for index
//! `i`). Within each degree the basis is ordered lexicographically, and that
//! order is shared by every matrix in the crate.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported dimension. Clifford elements carry 2^n coefficients.
pub const MAX_DIM: usize = 12;

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub const fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = if k < n - k { k } else { n - k };
    let mut acc = 1usize;
    let mut i = 1;
    while i <= k {
        acc = acc * (n - k + i) / i;
        i += 1;
    }
    acc
}

/// `k!` as a float.
pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

struct Tables {
    by_degree: Vec<Vec<u32>>,
    rank: Vec<u32>,
}

impl Tables {
    fn build(n: usize) -> Self {
        let mut by_degree = Vec::with_capacity(n + 1);
        let mut rank = vec![0u32; 1 << n];
        for p in 0..=n {
            let mut list = Vec::with_capacity(binomial(n, p));
            let mut current = Vec::with_capacity(p);
            push_combinations(n, p, 0, &mut current, &mut list);
            for (r, &mask) in list.iter().enumerate() {
                rank[mask as usize] = r as u32;
            }
            by_degree.push(list);
        }
        Tables { by_degree, rank }
    }
}

fn push_combinations(n: usize, p: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<u32>) {
    if current.len() == p {
        out.push(current.iter().fold(0u32, |m, &i| m | (1 << i)));
        return;
    }
    let remaining = p - current.len();
    for i in start..=(n - remaining) {
        current.push(i);
        push_combinations(n, p, i + 1, current, out);
        current.pop();
    }
}

fn tables(n: usize) -> &'static Tables {
    static TABLES: [OnceLock<Tables>; MAX_DIM + 1] = [const { OnceLock::new() }; MAX_DIM + 1];
    TABLES[n].get_or_init(|| Tables::build(n))
}

/// The ambient Euclidean space `V = R^n` with its fixed orthonormal basis
/// and orientation `e_1 ∧ … ∧ e_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraContext {
    n: usize,
}

impl AlgebraContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidDimension(n));
        }
        Ok(AlgebraContext { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `C(n, p)`, the dimension of Λ^p V.
    pub fn basis_len(&self, p: usize) -> usize {
        binomial(self.n, p)
    }

    /// Bitmasks of the degree-`p` basis in lexicographic order.
    pub fn basis(&self, p: usize) -> &'static [u32] {
        match tables(self.n).by_degree.get(p) {
            Some(list) => list,
            None => &[],
        }
    }

    /// Position of a subset mask within the basis of its own degree.
    pub fn rank_of_mask(&self, mask: u32) -> usize {
        tables(self.n).rank[mask as usize] as usize
    }

    /// Mask of the full index set, i.e. of the volume element.
    pub fn full_mask(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    /// Number of Clifford basis blades, `2^n`.
    pub fn clifford_len(&self) -> usize {
        1 << self.n
    }
}

/// A strictly increasing tuple of basis indices (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    mask: u32,
}

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex { mask: 0 };

    /// Builds an index from 1-based, strictly increasing entries.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        let mut last = 0usize;
        for &i in indices {
            if i == 0 || i > MAX_DIM {
                return Err(Error::InvalidIndex {
                    indices: indices.to_vec(),
                    n: MAX_DIM,
                    reason: "entry out of range",
                });
            }
            if i <= last {
                return Err(Error::InvalidIndex {
                    indices: indices.to_vec(),
                    n: MAX_DIM,
                    reason: "entries must be strictly increasing",
                });
            }
            last = i;
            mask |= 1 << (i - 1);
        }
        Ok(MultiIndex { mask })
    }

    pub fn from_mask(mask: u32) -> Self {
        MultiIndex { mask }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// The 1-based entries in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        (0..32).filter(|b| self.mask & (1 << b) != 0).map(|b| b + 1).collect()
    }

    fn check(&self, ctx: &AlgebraContext) -> Result<()> {
        if (self.mask as u64) >> ctx.dim() != 0 {
            return Err(Error::InvalidIndex {
                indices: self.indices(),
                n: ctx.dim(),
                reason: "entry exceeds the dimension",
            });
        }
        Ok(())
    }
}

/// Sign of the permutation that sorts the concatenation `(a, b)` of two
/// disjoint increasing index sets.
pub fn shuffle_sign(a: u32, b: u32) -> i32 {
    debug_assert_eq!(a & b, 0);
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        // elements of `a` above `bit` must jump over it
        inversions += (a >> bit).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `(-1)^{#elements of mask below bit}`: the sign picked up by moving
/// `e_{bit}` to the front of `e_mask`.
pub fn leading_sign(mask: u32, bit: u32) -> i32 {
    if (mask & ((1u32 << bit) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn rank_index(index: &MultiIndex, ctx: &AlgebraContext) -> Result<usize> {
    index.check(ctx)?;
    Ok(ctx.rank_of_mask(index.mask))
}

pub fn unrank_index(rank: usize, p: usize, ctx: &AlgebraContext) -> Result<MultiIndex> {
    let size = ctx.basis_len(p);
    if p > ctx.dim() || rank >= size {
        return Err(Error::InvalidRank { rank, degree: p, size });
    }
    Ok(MultiIndex::from_mask(ctx.basis(p)[rank]))
}

/// `e_I ∧ e_J = sign · e_K`, or `None` when the indices overlap.
pub fn wedge_basis(i: &MultiIndex, j: &MultiIndex) -> Option<(i32, MultiIndex)> {
    if i.mask & j.mask != 0 {
        return None;
    }
    Some((shuffle_sign(i.mask, j.mask), MultiIndex::from_mask(i.mask | j.mask)))
}

/// Hodge complement: `∗e_I = sign · e_{I^c}` with `e_I ∧ ∗e_I = e_1 ∧ … ∧ e_n`.
pub fn complement(index: &MultiIndex, ctx: &AlgebraContext) -> (i32, MultiIndex) {
    let rest = ctx.full_mask() & !index.mask;
    (shuffle_sign(index.mask, rest), MultiIndex::from_mask(rest))
}
