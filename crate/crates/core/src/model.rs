//! Block model parameters and the scalar functions attached to them.
//!
//! A [`BlockModel`] holds the part weights `alpha` and the symmetric edge
//! probability matrix `P`. Everything downstream (region geometry, expected
//! counts, coloring schedules) is a pure function of these parameters, so the
//! model validates its invariants once at construction and caches the
//! `ln(1 - p_ij)` table that every formula needs.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Subset-enumerating operations walk all 2^k - 1 nonempty subsets; this cap
/// turns an accidental huge `k` into an error instead of a hang.
pub const SUBSET_ENUM_LIMIT: usize = 20;

/// Nonnegative real k-vector measured in multiples of `ln n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledType<F>(Vec<F>);

impl<F: Real> ScaledType<F> {
    pub fn new(coords: Vec<F>) -> Result<Self> {
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() || c < F::zero() {
                return Err(Error::Precondition(format!(
                    "scaled type coordinate {i} must be finite and >= 0, got {c}"
                )));
            }
        }
        Ok(Self(coords))
    }

    pub fn from_slice(coords: &[F]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![F::zero(); k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[F] {
        &self.0
    }

    /// 1-norm; coordinates are nonnegative so this is the plain sum.
    pub fn norm1(&self) -> F {
        self.0.iter().fold(F::zero(), |acc, &c| acc + c)
    }

    pub fn scaled(&self, factor: F) -> Self {
        Self(self.0.iter().map(|&c| c * factor).collect())
    }
}

impl<F> std::ops::Index<usize> for ScaledType<F> {
    type Output = F;
    fn index(&self, i: usize) -> &F {
        &self.0[i]
    }
}

/// Nonnegative integer k-vector: exact intersection sizes with each part.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeVector(Vec<u32>);

impl TypeVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&t| u64::from(t)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&t| t == 0)
    }

    /// Coordinate-wise `<=`.
    pub fn le(&self, other: &TypeVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl std::ops::Index<usize> for TypeVector {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl std::fmt::Display for TypeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Nonempty subset of parts, stored as a bitmask over 0-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubsetIndex(u32);

impl SubsetIndex {
    pub fn from_mask(mask: u32, k: usize) -> Result<Self> {
        if mask == 0 {
            return Err(Error::Precondition("subset must be nonempty".into()));
        }
        if k < 32 && mask >> k != 0 {
            return Err(Error::Precondition(format!(
                "subset mask {mask:#b} has members outside 1..={k}"
            )));
        }
        Ok(Self(mask))
    }

    /// Builds a subset from 0-based part indices.
    pub fn from_indices(indices: &[usize], k: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &i in indices {
            if i >= k {
                return Err(Error::Precondition(format!(
                    "part index {i} out of range for k = {k}"
                )));
            }
            mask |= 1 << i;
        }
        Self::from_mask(mask, k)
    }

    pub fn full(k: usize) -> Self {
        debug_assert!(k >= 1 && k <= 32);
        Self(if k == 32 { u32::MAX } else { (1 << k) - 1 })
    }

    pub fn singleton(i: usize) -> Self {
        Self(1 << i)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 >> i & 1 == 1
    }

    /// Iterates member part indices in ascending order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }
}

impl std::fmt::Display for SubsetIndex {
    /// 1-based members joined by `+`, e.g. `1+2`; safe inside CSV fields.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (pos, i) in self.members().enumerate() {
            if pos > 0 {
                write!(f, "+")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

/// Convexity classification of a pair of parts: how `p_ij` compares to
/// `1 - sqrt((1 - p_i)(1 - p_j))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClass {
    ConvexCompatible,
    Boundary,
    Concave,
}

/// The natural color class size `c(p) = -2 / ln(1 - p)`.
pub fn natural_class_size<F: Real>(p: F) -> Result<F> {
    if !(p > F::zero() && p < F::one()) {
        return Err(Error::Precondition(format!(
            "probability must lie strictly inside (0,1), got {p}"
        )));
    }
    let c = -(real::<F>(2.0)) / (F::one() - p).ln();
    if !(c.is_finite() && c > F::zero()) {
        return Err(Error::Precondition(format!(
            "probability {p} too close to 1 for the scalar type"
        )));
    }
    Ok(c)
}

/// Block model parameters: `k` parts with weights `alpha` and symmetric edge
/// probabilities `P`.
#[derive(Clone, Debug)]
pub struct BlockModel<F> {
    k: usize,
    alpha: Vec<F>,
    probs: Vec<F>,
    log1m: Vec<F>,
}

#[derive(Deserialize)]
struct ModelJson {
    k: usize,
    alpha: Vec<f64>,
    #[serde(rename = "P")]
    p: Vec<Vec<f64>>,
}

impl<F: Real> BlockModel<F> {
    pub fn new(alpha: Vec<F>, probs: Vec<Vec<F>>) -> Result<Self> {
        let k = alpha.len();
        if k == 0 {
            return Err(Error::InvalidModel("k must be >= 1".into()));
        }
        if k > 32 {
            return Err(Error::InvalidModel(format!("k = {k} exceeds 32 parts")));
        }
        let eps = real::<F>(1e-12).max(F::epsilon() * real(16.0));
        let mut sum = F::zero();
        for (i, &a) in alpha.iter().enumerate() {
            if !(a.is_finite() && a > F::zero() && a <= F::one()) {
                return Err(Error::InvalidModel(format!(
                    "alpha_{} = {a} outside (0,1]",
                    i + 1
                )));
            }
            sum = sum + a;
        }
        if (sum - F::one()).abs() > eps {
            return Err(Error::InvalidModel(format!(
                "alpha entries sum to {sum}, expected 1 within 1e-12"
            )));
        }
        if probs.len() != k || probs.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidModel(format!(
                "P must be a {k}x{k} matrix matching alpha"
            )));
        }
        let sym_eps = real::<F>(1e-15).max(F::epsilon() * real(4.0));
        let edge = real::<F>(1e-12).max(F::epsilon() * real(16.0));
        let mut flat = Vec::with_capacity(k * k);
        for (i, row) in probs.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < edge || p > F::one() - edge {
                    return Err(Error::InvalidModel(format!(
                        "p_{}{} = {p} outside the open interval (0,1)",
                        i + 1,
                        j + 1
                    )));
                }
                if (p - probs[j][i]).abs() > sym_eps {
                    return Err(Error::InvalidModel(format!(
                        "P not symmetric: p_{}{} = {p} vs p_{}{} = {}",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1,
                        probs[j][i]
                    )));
                }
                flat.push(p);
            }
        }
        let log1m = flat.iter().map(|&p| (F::one() - p).ln()).collect();
        Ok(Self {
            k,
            alpha,
            probs: flat,
            log1m,
        })
    }

    /// Parses the model file format: `{"k": .., "alpha": [..], "P": [[..]]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: ModelJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("model JSON: {e}")))?;
        if raw.alpha.len() != raw.k {
            return Err(Error::InvalidModel(format!(
                "k = {} but alpha has {} entries",
                raw.k,
                raw.alpha.len()
            )));
        }
        let alpha = raw.alpha.into_iter().map(real::<F>).collect();
        let probs = raw
            .p
            .into_iter()
            .map(|row| row.into_iter().map(real::<F>).collect())
            .collect();
        Self::new(alpha, probs)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> &[F] {
        &self.alpha
    }

    pub fn probability(&self, i: usize, j: usize) -> F {
        self.probs[i * self.k + j]
    }

    /// Cached `ln(1 - p_ij)`.
    pub fn log_one_minus(&self, i: usize, j: usize) -> F {
        self.log1m[i * self.k + j]
    }

    /// `c(p_ii)` for part `i`.
    pub fn class_size(&self, i: usize) -> F {
        -(real::<F>(2.0)) / self.log_one_minus(i, i)
    }

    pub fn max_probability(&self) -> F {
        self.probs
            .iter()
            .copied()
            .fold(F::zero(), |acc, p| acc.max(p))
    }

    /// Largest `C` such that every nonnegative vector with 1-norm at most `C`
    /// is admissible.
    pub fn safe_radius(&self) -> F {
        let max_log = self
            .log1m
            .iter()
            .copied()
            .fold(F::infinity(), |acc, m| acc.min(m));
        -(real::<F>(2.0)) / max_log
    }

    /// First-moment exponent of the expected count of independent sets of
    /// scaled type `c` supported on the parts in `subset`:
    /// `sum_{i in I} c_i + 1/2 sum_{i,j in I} c_i c_j ln(1 - p_ij)`,
    /// where the double sum runs over ordered pairs.
    pub fn subset_exponent(&self, c: &ScaledType<F>, subset: SubsetIndex) -> F {
        assert_eq!(c.len(), self.k, "scaled type length must equal k");
        assert!(
            self.k == 32 || subset.mask() >> self.k == 0,
            "subset members out of range"
        );
        let half = real::<F>(0.5);
        let mut linear = F::zero();
        let mut quad = F::zero();
        let members: Vec<usize> = subset.members().collect();
        for &i in &members {
            linear = linear + c[i];
            for &j in &members {
                quad = quad + c[i] * c[j] * self.log_one_minus(i, j);
            }
        }
        linear + half * quad
    }

    /// Minimum of the subset exponent over all nonempty subsets, with the
    /// first minimizing subset in ascending mask order.
    pub fn min_subset_exponent(&self, c: &ScaledType<F>) -> Result<(F, SubsetIndex)> {
        let (value, mask) = self.scan_subsets(c, None)?;
        Ok((value, SubsetIndex::from_mask(mask, self.k)?))
    }

    /// Membership in the admissible region: every nonempty subset exponent is
    /// at least `-tol`.
    pub fn region_contains(&self, c: &ScaledType<F>, tol: F) -> Result<bool> {
        if !(tol >= F::zero()) {
            return Err(Error::Precondition(format!(
                "membership tolerance must be >= 0, got {tol}"
            )));
        }
        let (min_value, _) = self.scan_subsets(c, Some(-tol))?;
        Ok(min_value >= -tol)
    }

    /// Incremental scan over all nonempty subsets. Adding part `i` to a set
    /// `R` changes the exponent by `c_i + c_i^2 m_ii / 2 + c_i sum_{j in R}
    /// c_j m_ij`, so each subset costs O(k) instead of O(k^2). Stops early at
    /// the first value below `cutoff` when one is supplied.
    fn scan_subsets(&self, c: &ScaledType<F>, cutoff: Option<F>) -> Result<(F, u32)> {
        assert_eq!(c.len(), self.k, "scaled type length must equal k");
        if self.k > SUBSET_ENUM_LIMIT {
            return Err(Error::TooManyParts {
                k: self.k,
                limit: SUBSET_ENUM_LIMIT,
            });
        }
        let half = real::<F>(0.5);
        let size = 1usize << self.k;
        let mut value = vec![F::zero(); size];
        let mut best = F::infinity();
        let mut best_mask = 0u32;
        for mask in 1..size {
            let i = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let ci = c[i];
            let mut cross = F::zero();
            let mut r = rest;
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                r &= r - 1;
                cross = cross + c[j] * self.log_one_minus(i, j);
            }
            let v = value[rest] + ci + half * ci * ci * self.log_one_minus(i, i) + ci * cross;
            value[mask] = v;
            if v < best {
                best = v;
                best_mask = mask as u32;
                if let Some(cut) = cutoff {
                    if v < cut {
                        return Ok((best, best_mask));
                    }
                }
            }
        }
        Ok((best, best_mask))
    }

    /// Compares `p_ij` against `1 - sqrt((1 - p_i)(1 - p_j))` with tolerance
    /// 1e-12.
    pub fn classify_pair(&self, i: usize, j: usize) -> Result<PairClass> {
        if i == j {
            return Err(Error::Precondition(format!(
                "classify_pair requires two distinct parts, got i = j = {}",
                i + 1
            )));
        }
        if i >= self.k || j >= self.k {
            return Err(Error::Precondition(format!(
                "part indices ({i}, {j}) out of range for k = {}",
                self.k
            )));
        }
        let threshold = F::one()
            - ((F::one() - self.probability(i, i)) * (F::one() - self.probability(j, j))).sqrt();
        let tol = real::<F>(1e-12).max(F::epsilon() * real(16.0));
        let p = self.probability(i, j);
        Ok(if p < threshold - tol {
            PairClass::ConvexCompatible
        } else if p > threshold + tol {
            PairClass::Concave
        } else {
            PairClass::Boundary
        })
    }

    /// True when every unordered pair of distinct parts is `Concave` or
    /// `Boundary`.
    pub fn all_pairs_concave_or_boundary(&self) -> bool {
        for i in 0..self.k {
            for j in i + 1..self.k {
                match self.classify_pair(i, j) {
                    Ok(PairClass::ConvexCompatible) => return false,
                    Ok(_) => {}
                    Err(_) => unreachable!("indices validated by loop bounds"),
                }
            }
        }
        true
    }

    /// The scaled type `t * alpha`.
    pub fn along_ray(&self, t: F) -> ScaledType<F> {
        ScaledType(self.alpha.iter().map(|&a| a * t).collect())
    }
}
