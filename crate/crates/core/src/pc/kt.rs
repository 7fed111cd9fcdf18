use crate::coding::SymbolInterval;
use crate::error::{Error, Result};

/// Krichevsky-Trofimov mixture over the growing alphabet `{0, ..., K}` of the
/// censored sequence. Rank `k` has weight `2 n~^k + 1` out of `2 i + K + 1`.
///
/// Weights live in a Fenwick tree so interval lookup is logarithmic in `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KtState {
    i: u64,
    counts: Vec<u64>,
    /// 1-based Fenwick tree over the weights of ranks `0..=K`
    tree: Vec<u64>,
    digest: u64,
}

impl Default for KtState {
    fn default() -> Self {
        Self::new()
    }
}

#[inline]
fn lowbit(x: usize) -> usize {
    x & x.wrapping_neg()
}

#[inline]
fn mix(rank: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = (rank as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl KtState {
    pub fn new() -> Self {
        let mut s = KtState { i: 0, counts: Vec::new(), tree: vec![0], digest: 0 };
        s.push_rank();
        s
    }

    /// Symbols consumed so far.
    #[inline]
    pub fn i(&self) -> u64 {
        self.i
    }

    /// Distinct message symbols so far.
    #[inline]
    pub fn k(&self) -> usize {
        self.counts.len() - 1
    }

    /// `n~^k` for every rank.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Denominator `2 i + K + 1`.
    #[inline]
    pub fn total(&self) -> u64 {
        2 * self.i + self.k() as u64 + 1
    }

    /// Order-independent fingerprint of `(i, K, n~)`, maintained incrementally.
    pub fn digest(&self) -> u64 {
        self.digest ^ self.i.rotate_left(17) ^ (self.k() as u64).rotate_left(41)
    }

    fn push_rank(&mut self) {
        let idx = self.tree.len();
        // the new node covers ranks (idx - lowbit(idx), idx]; all but the last have weights already
        let covered = self.prefix(idx - 1) - self.prefix(idx - lowbit(idx));
        self.tree.push(covered + 1);
        self.counts.push(0);
    }

    /// Sum of the weights of ranks `< m`.
    #[inline]
    fn prefix(&self, m: usize) -> u64 {
        let mut idx = m;
        let mut s = 0;
        while idx > 0 {
            s += self.tree[idx];
            idx -= lowbit(idx);
        }
        s
    }

    #[inline]
    fn add_weight(&mut self, rank: usize, delta: u64) {
        let mut idx = rank + 1;
        while idx < self.tree.len() {
            self.tree[idx] += delta;
            idx += lowbit(idx);
        }
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        if rank > self.k() {
            return Err(Error::RankOutOfRange { rank, max: self.k() });
        }
        Ok(())
    }

    /// Predictive probability of `rank` as `(2 n~^k + 1, 2 i + K + 1)`.
    pub fn predictive(&self, rank: usize) -> Result<(u64, u64)> {
        self.check_rank(rank)?;
        Ok((2 * self.counts[rank] + 1, self.total()))
    }

    /// Coding interval of `rank`.
    pub fn interval(&self, rank: usize) -> Result<SymbolInterval> {
        self.check_rank(rank)?;
        let lo = self.prefix(rank);
        SymbolInterval::new(lo, lo + 2 * self.counts[rank] + 1, self.total())
    }

    /// Rank whose interval contains the cumulative target `c`.
    pub fn lookup(&self, c: u64) -> Result<(usize, SymbolInterval)> {
        if c >= self.total() {
            return Err(Error::CorruptStream(format!("target {c} outside [0, {})", self.total())));
        }
        // largest m with prefix(m) <= c
        let n = self.tree.len() - 1;
        let mut pos = 0usize;
        let mut rem = c;
        let mut step = if n == 0 { 0 } else { 1usize << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let nxt = pos + step;
            if nxt <= n && self.tree[nxt] <= rem {
                pos = nxt;
                rem -= self.tree[nxt];
            }
            step >>= 1;
        }
        let rank = pos;
        let lo = c - rem;
        Ok((rank, SymbolInterval::new(lo, lo + 2 * self.counts[rank] + 1, self.total())?))
    }

    /// Records an occurrence of `rank`; rank 0 also opens a new rank with count 0.
    pub fn update(&mut self, rank: usize) -> Result<()> {
        self.check_rank(rank)?;
        self.counts[rank] += 1;
        self.add_weight(rank, 2);
        self.digest = self.digest.wrapping_add(mix(rank));
        self.i += 1;
        if rank == 0 {
            self.push_rank();
        }
        Ok(())
    }
}
