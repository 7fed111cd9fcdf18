use std::collections::HashMap;

/// Symbol/rank dictionary. Rank 0 is the escape symbol; message symbols get
/// ranks `1..=K` in order of first occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    by_symbol: HashMap<u64, u32>,
    by_rank: Vec<u64>,
}

impl Dictionary {
    pub fn new() -> Self {
        Dictionary { by_symbol: HashMap::new(), by_rank: vec![0] }
    }

    /// Number of message symbols inserted (`K`).
    #[inline]
    pub fn len(&self) -> usize {
        self.by_rank.len() - 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn rank_of(&self, symbol: u64) -> Option<usize> {
        self.by_symbol.get(&symbol).map(|&r| r as usize)
    }

    #[inline]
    pub fn symbol_of(&self, rank: usize) -> Option<u64> {
        self.by_rank.get(rank).copied()
    }

    /// Inserts a new symbol and returns its rank.
    pub fn insert(&mut self, symbol: u64) -> usize {
        debug_assert!(symbol > 0 && !self.by_symbol.contains_key(&symbol));
        let rank = self.by_rank.len();
        self.by_symbol.insert(symbol, rank as u32);
        self.by_rank.push(symbol);
        rank
    }

    /// `(symbol, rank)` pairs, escape first.
    pub fn entries(&self) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.by_rank.iter().enumerate().map(|(r, &s)| (s, r))
    }
}
