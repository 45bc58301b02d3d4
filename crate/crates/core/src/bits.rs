//! Fixed-capacity bitsets used for vertex sets and adjacency rows.

/// Set of vertex indices below a fixed capacity, packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    nbits: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(nbits: usize) -> usize {
    nbits.div_ceil(64)
}

impl VertexSet {
    pub fn empty(nbits: usize) -> Self {
        Self {
            nbits,
            words: vec![0; words_for(nbits)],
        }
    }

    pub fn full(nbits: usize) -> Self {
        let mut s = Self::empty(nbits);
        for w in 0..s.words.len() {
            s.words[w] = u64::MAX;
        }
        s.trim_tail();
        s
    }

    fn trim_tail(&mut self) {
        let spill = self.nbits % 64;
        if spill != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << spill) - 1;
            }
        }
    }

    pub fn capacity(&self) -> usize {
        self.nbits
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.nbits);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Number of set bits in `[lo, hi)`.
    pub fn count_range(&self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi && hi <= self.nbits);
        if lo >= hi {
            return 0;
        }
        let (wl, wh) = (lo / 64, (hi - 1) / 64);
        if wl == wh {
            let mask = range_mask(lo % 64, (hi - 1) % 64 + 1);
            return (self.words[wl] & mask).count_ones() as usize;
        }
        let mut total = (self.words[wl] & !low_mask(lo % 64)).count_ones() as usize;
        for w in wl + 1..wh {
            total += self.words[w].count_ones() as usize;
        }
        total += (self.words[wh] & low_mask((hi - 1) % 64 + 1)).count_ones() as usize;
        total
    }

    /// The `idx`-th (0-based) set bit within `[lo, hi)`, if any.
    pub fn nth_one_in_range(&self, lo: usize, hi: usize, mut idx: usize) -> Option<usize> {
        for i in self.ones_in_range(lo, hi) {
            if idx == 0 {
                return Some(i);
            }
            idx -= 1;
        }
        None
    }

    /// Iterates set bits in `[lo, hi)` in ascending order.
    pub fn ones_in_range(&self, lo: usize, hi: usize) -> impl Iterator<Item = usize> + '_ {
        debug_assert!(lo <= hi && hi <= self.nbits);
        let mut word_idx = lo / 64;
        let mut current = if lo < hi {
            let mut w = self.words[word_idx] & !low_mask(lo % 64);
            if word_idx == (hi - 1) / 64 {
                w &= low_mask((hi - 1) % 64 + 1);
            }
            w
        } else {
            0
        };
        std::iter::from_fn(move || {
            loop {
                if current != 0 {
                    let bit = current.trailing_zeros() as usize;
                    current &= current - 1;
                    return Some(word_idx * 64 + bit);
                }
                if lo >= hi || word_idx >= (hi - 1) / 64 {
                    return None;
                }
                word_idx += 1;
                current = self.words[word_idx];
                if word_idx == (hi - 1) / 64 {
                    current &= low_mask((hi - 1) % 64 + 1);
                }
            }
        })
    }

    /// Iterates all set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.ones_in_range(0, self.nbits)
    }

    /// `self &= other`.
    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.nbits, other.nbits);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// `self &= !row` for a raw adjacency row: keeps non-neighbors.
    pub fn retain_non_neighbors(&mut self, row: &[u64]) {
        debug_assert_eq!(self.words.len(), row.len());
        for (a, b) in self.words.iter_mut().zip(row) {
            *a &= !b;
        }
    }

    /// True when `self` and the raw row share at least one bit.
    pub fn intersects_row(&self, row: &[u64]) -> bool {
        self.words.iter().zip(row).any(|(a, b)| a & b != 0)
    }
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    debug_assert!(bits <= 64);
    if bits == 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

#[inline]
fn range_mask(lo: usize, hi: usize) -> u64 {
    low_mask(hi) & !low_mask(lo)
}

/// Dense symmetric adjacency: one bit row of capacity `n` per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl AdjacencyMatrix {
    pub fn new(n: usize) -> Self {
        let words_per_row = words_for(n);
        Self {
            n,
            words_per_row,
            data: vec![0; words_per_row * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.data[v * self.words_per_row..(v + 1) * self.words_per_row]
    }

    pub fn set_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.n && v < self.n);
        self.data[u * self.words_per_row + v / 64] |= 1 << (v % 64);
        self.data[v * self.words_per_row + u / 64] |= 1 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.row(u)[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }
}
