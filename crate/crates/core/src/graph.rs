//! Seeded sampling of block graphs.
//!
//! Edge presence for a pair `{u, v}` is a pure function of the master seed
//! and the pair, derived by a counter-based mix. Sampling order therefore
//! cannot change the graph, and identical `(model, n, seed)` inputs always
//! produce byte-identical adjacency.

use crate::bits::AdjacencyMatrix;
use crate::error::{Error, Result};
use crate::model::BlockModel;
use crate::scalar::Real;

/// SplitMix64 finalizer; bijective with full avalanche.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream value from a seed and an index; used for
/// per-pair edge randomness, per-class search streams, and per-trial seeds.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(index ^ 0x9E37_79B9_7F4A_7C15).wrapping_add(mix64(seed)))
}

/// Uniform value in [0, 1) attached to the unordered pair `{u, v}`.
#[inline]
fn pair_uniform(seed: u64, u: usize, v: usize) -> f64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    let pair = ((a as u64) << 32) | b as u64;
    let bits = derive_seed(seed, pair);
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Part sizes for `n` vertices: `floor(alpha_i n)` for all but the last part,
/// which takes the remainder.
pub fn part_sizes<F: Real>(model: &BlockModel<F>, n: usize) -> Result<Vec<usize>> {
    let k = model.k();
    if n < k {
        return Err(Error::Precondition(format!(
            "n = {n} is smaller than the number of parts k = {k}"
        )));
    }
    let mut sizes = Vec::with_capacity(k);
    let mut used = 0usize;
    for i in 0..k - 1 {
        let size = (model.alpha()[i].to_f64().unwrap() * n as f64).floor() as usize;
        if size == 0 {
            return Err(Error::Precondition(format!(
                "part {} is empty: floor(alpha_{} * {n}) = 0",
                i + 1,
                i + 1
            )));
        }
        sizes.push(size);
        used += size;
    }
    if used >= n {
        return Err(Error::Precondition(format!(
            "parts 1..{} already use {used} of {n} vertices, leaving part {k} empty",
            k - 1
        )));
    }
    sizes.push(n - used);
    Ok(sizes)
}

/// Sampled block graph with part labels and bitset adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGraph {
    n: usize,
    part_of: Vec<u32>,
    part_starts: Vec<usize>,
    adj: AdjacencyMatrix,
    seed: u64,
}

impl BlockGraph {
    /// Draws `G(n, alpha, P)`: parts laid out contiguously in block order,
    /// each unordered pair present independently with probability
    /// `p_{part(u), part(v)}`.
    pub fn sample<F: Real>(model: &BlockModel<F>, n: usize, seed: u64) -> Result<Self> {
        let sizes = part_sizes(model, n)?;
        let mut graph = Self::empty_with_parts(&sizes, seed);
        let k = model.k();
        let mut probs = vec![0.0f64; k * k];
        for i in 0..k {
            for j in 0..k {
                probs[i * k + j] = model.probability(i, j).to_f64().unwrap();
            }
        }
        for v in 1..n {
            let pv = graph.part_of[v] as usize;
            for u in 0..v {
                let p = probs[graph.part_of[u] as usize * k + pv];
                if pair_uniform(seed, u, v) < p {
                    graph.adj.set_edge(u, v);
                }
            }
        }
        Ok(graph)
    }

    /// Builds a graph with prescribed part sizes and an explicit edge list;
    /// used by oracles and tests that need exact instances.
    pub fn from_parts_and_edges(
        sizes: &[usize],
        edges: &[(usize, usize)],
        seed: u64,
    ) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
            return Err(Error::Precondition("all parts must be nonempty".into()));
        }
        let mut graph = Self::empty_with_parts(sizes, seed);
        for &(u, v) in edges {
            if u == v || u >= graph.n || v >= graph.n {
                return Err(Error::Precondition(format!("invalid edge ({u}, {v})")));
            }
            graph.adj.set_edge(u, v);
        }
        Ok(graph)
    }

    fn empty_with_parts(sizes: &[usize], seed: u64) -> Self {
        let n: usize = sizes.iter().sum();
        let mut part_of = Vec::with_capacity(n);
        let mut part_starts = Vec::with_capacity(sizes.len() + 1);
        part_starts.push(0);
        for (i, &s) in sizes.iter().enumerate() {
            part_of.extend(std::iter::repeat(i as u32).take(s));
            part_starts.push(part_starts[i] + s);
        }
        Self {
            n,
            part_of,
            part_starts,
            adj: AdjacencyMatrix::new(n),
            seed,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.part_starts.len() - 1
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v] as usize
    }

    pub fn part_range(&self, i: usize) -> std::ops::Range<usize> {
        self.part_starts[i]..self.part_starts[i + 1]
    }

    pub fn part_size(&self, i: usize) -> usize {
        self.part_starts[i + 1] - self.part_starts[i]
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        (0..self.k()).map(|i| self.part_size(i)).collect()
    }

    pub fn adjacency(&self) -> &AdjacencyMatrix {
        &self.adj
    }

    pub fn row(&self, v: usize) -> &[u64] {
        self.adj.row(v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.has_edge(u, v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj.degree(v)
    }

    pub fn edge_count(&self) -> u64 {
        let total: u64 = (0..self.n).map(|v| self.degree(v) as u64).sum();
        total / 2
    }

    /// Induced subgraph on part `i`, relabeled to a single-part graph.
    pub fn part_subgraph(&self, i: usize) -> BlockGraph {
        let range = self.part_range(i);
        let size = range.len();
        let mut sub = Self::empty_with_parts(&[size], self.seed);
        for (new_v, v) in range.clone().enumerate() {
            for (new_u, u) in range.clone().take_while(|&u| u < v).enumerate() {
                if self.has_edge(u, v) {
                    sub.adj.set_edge(new_u, new_v);
                }
            }
        }
        sub
    }

    /// Serializes to the text format: header `n k seed`, part sizes line,
    /// then one lower-triangular row per vertex. Row `v` packs the bits for
    /// neighbors `u < v` into nibbles (bit `u` goes to nibble `u / 4`,
    /// position `u % 4`), written as lowercase hex.
    pub fn encode_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {} {}\n", self.n, self.k(), self.seed));
        let sizes: Vec<String> = self.part_sizes().iter().map(usize::to_string).collect();
        out.push_str(&sizes.join(" "));
        out.push('\n');
        for v in 0..self.n {
            let nibbles = v.div_ceil(4);
            let mut row = String::with_capacity(nibbles);
            for nib in 0..nibbles {
                let mut value = 0u8;
                for bit in 0..4 {
                    let u = nib * 4 + bit;
                    if u < v && self.has_edge(u, v) {
                        value |= 1 << bit;
                    }
                }
                row.push(char::from_digit(u32::from(value), 16).unwrap());
            }
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    /// Parses the text format written by [`encode_text`](Self::encode_text).
    pub fn decode_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!(
                "header must be `n k seed`, got {header:?}"
            )));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| Error::Parse("bad n in header".into()))?;
        let k: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse("bad k in header".into()))?;
        let seed: u64 = fields[2]
            .parse()
            .map_err(|_| Error::Parse("bad seed in header".into()))?;
        let sizes_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing part sizes line".into()))?;
        let sizes: Vec<usize> = sizes_line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::Parse("bad part size".into())))
            .collect::<Result<_>>()?;
        if sizes.len() != k || sizes.iter().sum::<usize>() != n {
            return Err(Error::Parse(format!(
                "part sizes {sizes:?} inconsistent with n = {n}, k = {k}"
            )));
        }
        let mut graph = Self::empty_with_parts(&sizes, seed);
        for v in 0..n {
            let row = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing adjacency row {v}")))?;
            if row.len() != v.div_ceil(4) {
                return Err(Error::Parse(format!(
                    "row {v} has {} nibbles, expected {}",
                    row.len(),
                    v.div_ceil(4)
                )));
            }
            for (nib, ch) in row.chars().enumerate() {
                let value = ch
                    .to_digit(16)
                    .ok_or_else(|| Error::Parse(format!("row {v}: non-hex digit {ch:?}")))?;
                for bit in 0..4 {
                    if value >> bit & 1 == 1 {
                        let u = nib * 4 + bit;
                        if u >= v {
                            return Err(Error::Parse(format!("row {v}: bit {u} out of range")));
                        }
                        graph.adj.set_edge(u, v);
                    }
                }
            }
        }
        Ok(graph)
    }
}
