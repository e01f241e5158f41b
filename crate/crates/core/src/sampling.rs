//! Strength-preferential selection.

use rand::Rng;

use crate::error::{Error, Result};
use crate::stream::VertexId;

/// Picks one id with probability proportional to its strength, or uniformly
/// when every strength is zero.
///
/// Equivalent to drawing from a list holding each vertex `strength` times,
/// without materialising the list.
pub fn sps<R: Rng + ?Sized>(candidates: &[(VertexId, u64)], rng: &mut R) -> Result<VertexId> {
    if candidates.is_empty() {
        return Err(Error::Domain(
            "strength preferential selection over an empty set".into(),
        ));
    }
    let total: u64 = candidates.iter().map(|&(_, s)| s).sum();
    if total == 0 {
        return Ok(candidates[rng.random_range(0..candidates.len())].0);
    }
    let mut r = rng.random_range(0..total);
    for &(id, s) in candidates {
        if r < s {
            return Ok(id);
        }
        r -= s;
    }
    unreachable!("draw below the total must land on a candidate")
}

/// Growable Fenwick tree over non-negative integer weights, used for
/// O(log n) weighted draws over a whole partition.
#[derive(Debug, Clone)]
pub struct FenwickTree {
    // 1-indexed partial sums; tree[0] is unused.
    tree: Vec<u64>,
    values: Vec<u64>,
    total: u64,
}

impl Default for FenwickTree {
    fn default() -> Self {
        Self::new()
    }
}

impl FenwickTree {
    pub fn new() -> Self {
        FenwickTree {
            tree: vec![0],
            values: Vec::new(),
            total: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, idx: usize) -> u64 {
        self.values.get(idx).copied().unwrap_or(0)
    }

    fn prefix(&self, mut n: usize) -> u64 {
        let mut s = 0;
        while n > 0 {
            s += self.tree[n];
            n &= n - 1;
        }
        s
    }

    fn push(&mut self, v: u64) {
        let n = self.values.len() + 1;
        let low = n & n.wrapping_neg();
        let node = v + self.prefix(n - 1) - self.prefix(n - low);
        self.tree.push(node);
        self.values.push(v);
        self.total += v;
    }

    /// Sets the weight at `idx`, growing the tree with zeros as needed.
    pub fn set(&mut self, idx: usize, v: u64) {
        while self.values.len() <= idx {
            self.push(0);
        }
        let old = self.values[idx];
        if old == v {
            return;
        }
        self.values[idx] = v;
        let mut n = idx + 1;
        if v > old {
            let d = v - old;
            self.total += d;
            while n < self.tree.len() {
                self.tree[n] += d;
                n += n & n.wrapping_neg();
            }
        } else {
            let d = old - v;
            self.total -= d;
            while n < self.tree.len() {
                self.tree[n] -= d;
                n += n & n.wrapping_neg();
            }
        }
    }

    /// Index `k` such that `prefix(k) <= r < prefix(k + 1)`. Requires `r < total`.
    pub fn find(&self, mut r: u64) -> usize {
        debug_assert!(r < self.total);
        let n = self.values.len();
        let mut pos = 0;
        let mut step = if n == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - n.leading_zeros())
        };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= r {
                pos = next;
                r -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }

    /// Weighted draw; `None` when every weight is zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.total == 0 {
            return None;
        }
        Some(self.find(rng.random_range(0..self.total)))
    }
}
