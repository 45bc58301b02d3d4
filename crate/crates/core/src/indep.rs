//! Typed independent sets: queries, expected counts, randomized search, and
//! exact oracles for small graphs.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::VertexSet;
use crate::error::{Error, Result};
use crate::graph::{derive_seed, part_sizes, BlockGraph};
use crate::model::{BlockModel, ScaledType, SubsetIndex, TypeVector};
use crate::scalar::{ln_binomial, real_of, Real};

/// Exact routines enumerate sets explicitly and are capped here.
pub const EXACT_ENUM_LIMIT: usize = 30;

/// True iff no edge has both endpoints in `s`.
pub fn is_independent(g: &BlockGraph, s: &VertexSet) -> bool {
    s.ones().all(|v| !s.intersects_row(g.row(v)))
}

/// Intersection sizes of `s` with each part.
pub fn type_of(g: &BlockGraph, s: &VertexSet) -> TypeVector {
    let counts = (0..g.k())
        .map(|i| {
            let r = g.part_range(i);
            s.count_range(r.start, r.end) as u32
        })
        .collect();
    TypeVector::new(counts)
}

/// `ln` of the expected number of independent `t`-sets inside an `s`-set:
/// `prod_i C(s_i, t_i) * prod_i (1-p_i)^C(t_i,2) * prod_{i<j} (1-p_ij)^{t_i t_j}`
/// evaluated in log space.
pub fn log_expected_count<F: Real>(
    model: &BlockModel<F>,
    capacities: &TypeVector,
    t: &TypeVector,
) -> Result<F> {
    let k = model.k();
    if capacities.len() != k || t.len() != k {
        return Err(Error::Precondition(format!(
            "capacity and type vectors must have length k = {k}"
        )));
    }
    if !t.le(capacities) {
        return Err(Error::Precondition(format!(
            "type exceeds capacity: t = ({t}) vs s = ({capacities})"
        )));
    }
    let mut total = F::zero();
    for i in 0..k {
        total = total + ln_binomial::<F>(u64::from(capacities[i]), u64::from(t[i]));
        let ti = u64::from(t[i]);
        let pairs = ti * ti.saturating_sub(1) / 2;
        total = total + F::from_u64(pairs).unwrap() * model.log_one_minus(i, i);
        for j in i + 1..k {
            let cross = u64::from(t[i]) * u64::from(t[j]);
            total = total + F::from_u64(cross).unwrap() * model.log_one_minus(i, j);
        }
    }
    Ok(total)
}

/// The `o(1)` discrepancy between the normalized log expected count at
/// `t = round(c ln n)` with capacities `floor(alpha n)` and the subset
/// exponent of `c` on its support.
pub fn exponent_gap<F: Real>(model: &BlockModel<F>, c: &ScaledType<F>, n: usize) -> Result<F> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "exponent gap requires n >= 3, got {n}"
        )));
    }
    if c.len() != model.k() {
        return Err(Error::Precondition(
            "scaled type length must equal k".into(),
        ));
    }
    let support: Vec<usize> = (0..model.k()).filter(|&i| c[i] > F::zero()).collect();
    if support.is_empty() {
        return Ok(F::zero());
    }
    let sizes = part_sizes(model, n)?;
    let ln_n = real_of::<F>(n).ln();
    let mut t = Vec::with_capacity(model.k());
    for i in 0..model.k() {
        let target = (c[i] * ln_n).round();
        let count = target.to_u64().unwrap_or(u64::MAX);
        if count > sizes[i] as u64 {
            return Err(Error::Precondition(format!(
                "rounded type {count} exceeds part {} capacity {}",
                i + 1,
                sizes[i]
            )));
        }
        t.push(count as u32);
    }
    let capacities = TypeVector::new(sizes.iter().map(|&s| s as u32).collect());
    let ln_mu = log_expected_count(model, &capacities, &TypeVector::new(t))?;
    let subset = SubsetIndex::from_indices(&support, model.k())?;
    Ok(ln_mu / (ln_n * ln_n) - model.subset_exponent(c, subset))
}

/// Restart and step limits for the randomized typed-set search.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_restarts: usize,
    pub max_steps: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_restarts: 50,
            max_steps: 1_000_000,
        }
    }
}

/// Search failure: the best per-part placement achieved before the budget
/// ran out, so callers can shrink the failing coordinates.
#[derive(Clone, Debug)]
pub struct SearchFailure {
    pub best: TypeVector,
}

/// Finds an independent set with exact type `t` inside `available`.
///
/// Strategy: part-interleaved randomized greedy (always extend the part with
/// the largest remaining deficit by a random compatible vertex), with
/// restarts, switching to bounded exhaustive completion once the total
/// deficit drops to 3. Deterministic for a fixed seed.
pub fn find_typed_set(
    g: &BlockGraph,
    available: &VertexSet,
    t: &TypeVector,
    budget: &SearchBudget,
    seed: u64,
) -> std::result::Result<VertexSet, SearchFailure> {
    assert_eq!(t.len(), g.k(), "type vector length must equal k");
    if t.is_zero() {
        return Ok(VertexSet::empty(g.n()));
    }
    let avail_type = type_of(g, available);
    if !t.le(&avail_type) {
        return Err(SearchFailure {
            best: TypeVector::zeros(g.k()),
        });
    }

    let mut steps = 0u64;
    let mut best = TypeVector::zeros(g.k());
    for restart in 0..budget.max_restarts.max(1) {
        if steps >= budget.max_steps {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, restart as u64));
        let mut allowed = available.clone();
        let mut chosen = VertexSet::empty(g.n());
        let mut deficit: Vec<u32> = t.as_slice().to_vec();
        let mut placed = TypeVector::zeros(g.k());
        loop {
            let total: u64 = deficit.iter().map(|&d| u64::from(d)).sum();
            if total == 0 {
                debug_assert!(is_independent(g, &chosen));
                return Ok(chosen);
            }
            if total <= 3 {
                if let Some(done) = complete_exhaustive(
                    g,
                    &allowed,
                    &mut deficit.clone(),
                    &mut steps,
                    budget.max_steps,
                    chosen.clone(),
                ) {
                    debug_assert!(is_independent(g, &done));
                    debug_assert_eq!(type_of(g, &done), *t);
                    return Ok(done);
                }
                break;
            }
            if steps >= budget.max_steps {
                break;
            }
            // Part with the largest remaining deficit, lowest index on ties.
            let part = (0..g.k()).max_by_key(|&i| (deficit[i], usize::MAX - i)).unwrap();
            let range = g.part_range(part);
            let candidates = allowed.count_range(range.start, range.end);
            if candidates == 0 {
                break;
            }
            let pick = rng.gen_range(0..candidates);
            let v = allowed
                .nth_one_in_range(range.start, range.end, pick)
                .expect("candidate count was positive");
            chosen.insert(v);
            allowed.retain_non_neighbors(g.row(v));
            allowed.remove(v);
            deficit[part] -= 1;
            let new_count = placed[part] + 1;
            placed = bump(placed, part, new_count);
            steps += 1;
        }
        if placed.sum() > best.sum() {
            best = placed;
        }
    }
    Err(SearchFailure { best })
}

fn bump(tv: TypeVector, part: usize, value: u32) -> TypeVector {
    let mut counts = tv.as_slice().to_vec();
    counts[part] = value;
    TypeVector::new(counts)
}

/// Bounded exhaustive completion: depth-first over the remaining deficit,
/// iterating candidates in ascending order within the most deficient part.
fn complete_exhaustive(
    g: &BlockGraph,
    allowed: &VertexSet,
    deficit: &mut [u32],
    steps: &mut u64,
    max_steps: u64,
    chosen: VertexSet,
) -> Option<VertexSet> {
    let total: u64 = deficit.iter().map(|&d| u64::from(d)).sum();
    if total == 0 {
        return Some(chosen);
    }
    let part = (0..deficit.len())
        .max_by_key(|&i| (deficit[i], usize::MAX - i))
        .unwrap();
    let range = g.part_range(part);
    let candidates: Vec<usize> = allowed.ones_in_range(range.start, range.end).collect();
    for v in candidates {
        *steps += 1;
        if *steps > max_steps {
            return None;
        }
        let mut next_allowed = allowed.clone();
        next_allowed.retain_non_neighbors(g.row(v));
        next_allowed.remove(v);
        // Stay within ascending order inside the part to avoid permutations.
        for w in allowed.ones_in_range(range.start, v) {
            next_allowed.remove(w);
        }
        let mut next_chosen = chosen.clone();
        next_chosen.insert(v);
        deficit[part] -= 1;
        let found = complete_exhaustive(g, &next_allowed, deficit, steps, max_steps, next_chosen);
        deficit[part] += 1;
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Exact set of types of all maximal independent sets, by Bron-Kerbosch with
/// pivoting on the complement graph.
pub fn enumerate_max_types(g: &BlockGraph) -> Result<BTreeSet<TypeVector>> {
    let n = g.n();
    if n > EXACT_ENUM_LIMIT {
        return Err(Error::GraphTooLarge {
            what: "maximal independent set enumeration",
            n,
            limit: EXACT_ENUM_LIMIT,
        });
    }
    // Complement adjacency: maximal cliques there are maximal independent
    // sets here.
    let comp: Vec<VertexSet> = (0..n)
        .map(|v| {
            let mut row = VertexSet::full(n);
            row.retain_non_neighbors(g.row(v));
            row.remove(v);
            row
        })
        .collect();
    let mut out = BTreeSet::new();
    let r = VertexSet::empty(n);
    let p = VertexSet::full(n);
    let x = VertexSet::empty(n);
    bron_kerbosch(g, &comp, r, p, x, &mut out);
    Ok(out)
}

fn bron_kerbosch(
    g: &BlockGraph,
    comp: &[VertexSet],
    r: VertexSet,
    p: VertexSet,
    x: VertexSet,
    out: &mut BTreeSet<TypeVector>,
) {
    if p.is_empty() && x.is_empty() {
        out.insert(type_of(g, &r));
        return;
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| {
            let mut common = p.clone();
            common.intersect_with(&comp[u]);
            (common.count(), usize::MAX - u)
        })
        .expect("p or x nonempty");
    let mut candidates = p.clone();
    for u in comp[pivot].ones() {
        candidates.remove(u);
    }
    let mut p = p;
    let mut x = x;
    for v in candidates.ones().collect::<Vec<_>>() {
        let mut r2 = r.clone();
        r2.insert(v);
        let mut p2 = p.clone();
        p2.intersect_with(&comp[v]);
        let mut x2 = x.clone();
        x2.intersect_with(&comp[v]);
        bron_kerbosch(g, comp, r2, p2, x2, out);
        p.remove(v);
        x.insert(v);
    }
}

/// Exact count of independent sets with type exactly `t`, by part-ordered
/// enumeration with pruning. Used as the Monte Carlo oracle for the expected
/// count formula.
pub fn count_typed_sets(g: &BlockGraph, t: &TypeVector) -> Result<u64> {
    let n = g.n();
    if n > EXACT_ENUM_LIMIT {
        return Err(Error::GraphTooLarge {
            what: "typed set counting",
            n,
            limit: EXACT_ENUM_LIMIT,
        });
    }
    if t.len() != g.k() {
        return Err(Error::Precondition(
            "type vector length must equal k".into(),
        ));
    }
    for i in 0..g.k() {
        if u64::from(t[i]) > g.part_size(i) as u64 {
            return Err(Error::Precondition(format!(
                "type coordinate {} exceeds part size",
                i + 1
            )));
        }
    }
    let allowed = VertexSet::full(n);
    Ok(count_rec(g, &allowed, t, 0, 0))
}

fn count_rec(g: &BlockGraph, allowed: &VertexSet, t: &TypeVector, part: usize, taken: u32) -> u64 {
    let k = g.k();
    let mut part = part;
    let mut taken = taken;
    while part < k && taken == t[part] {
        part += 1;
        taken = 0;
    }
    if part == k {
        return 1;
    }
    let need = t[part] - taken;
    let range = g.part_range(part);
    let mut total = 0u64;
    let candidates: Vec<usize> = allowed.ones_in_range(range.start, range.end).collect();
    if (candidates.len() as u32) < need {
        return 0;
    }
    for (idx, &v) in candidates.iter().enumerate() {
        // Remaining candidates after choosing ascending v must cover the need.
        if ((candidates.len() - idx) as u32) < need {
            break;
        }
        let mut next = allowed.clone();
        next.retain_non_neighbors(g.row(v));
        next.remove(v);
        for &w in &candidates[..idx] {
            next.remove(w);
        }
        total += count_rec(g, &next, t, part, taken + 1);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BlockModel;

    fn k1_model(p: f64) -> BlockModel<f64> {
        BlockModel::new(vec![1.0], vec![vec![p]]).unwrap()
    }

    fn k2_model(p1: f64, p2: f64, p12: f64) -> BlockModel<f64> {
        BlockModel::new(vec![0.5, 0.5], vec![vec![p1, p12], vec![p12, p2]]).unwrap()
    }

    fn cycle4() -> BlockGraph {
        // Parts {a, c} and {b, d} of the 4-cycle a-b-c-d-a.
        // Vertices: a = 0, c = 1 (part 1); b = 2, d = 3 (part 2).
        BlockGraph::from_parts_and_edges(&[2, 2], &[(0, 2), (2, 1), (1, 3), (3, 0)], 0).unwrap()
    }

    #[test]
    fn independence_basics() {
        let g = cycle4();
        let empty = VertexSet::empty(4);
        assert!(is_independent(&g, &empty));
        let mut single = VertexSet::empty(4);
        single.insert(2);
        assert!(is_independent(&g, &single));
        let mut edge = VertexSet::empty(4);
        edge.insert(0);
        edge.insert(2);
        assert!(!is_independent(&g, &edge));
    }

    #[test]
    fn type_of_counts_per_part() {
        let g = cycle4();
        assert_eq!(type_of(&g, &VertexSet::empty(4)), TypeVector::zeros(2));
        let mut part1 = VertexSet::empty(4);
        part1.insert(0);
        part1.insert(1);
        assert_eq!(type_of(&g, &part1), TypeVector::new(vec![2, 0]));
        let full = VertexSet::full(4);
        assert_eq!(type_of(&g, &full).sum(), 4);
    }

    #[test]
    fn expected_count_small_cases() {
        let m = k2_model(0.5, 0.5, 0.3);
        let zero = log_expected_count(
            &m,
            &TypeVector::new(vec![2, 2]),
            &TypeVector::zeros(2),
        )
        .unwrap();
        assert_eq!(zero, 0.0);

        // mu = C(2,1)^2 * 0.7 = 2.8
        let v = log_expected_count(
            &m,
            &TypeVector::new(vec![2, 2]),
            &TypeVector::new(vec![1, 1]),
        )
        .unwrap();
        assert!((v - 1.0296194171811581).abs() < 1e-12);

        // k = 1: mu = C(3,2) * 0.5 = 1.5
        let m1 = k1_model(0.5);
        let v1 = log_expected_count(
            &m1,
            &TypeVector::new(vec![3]),
            &TypeVector::new(vec![2]),
        )
        .unwrap();
        assert!((v1 - 1.5f64.ln()).abs() < 1e-12);

        let over = log_expected_count(
            &m1,
            &TypeVector::new(vec![3]),
            &TypeVector::new(vec![4]),
        );
        assert!(over.is_err());
    }

    #[test]
    fn exponent_gap_zero_vector() {
        let m = k1_model(0.5);
        let gap = exponent_gap(&m, &ScaledType::zeros(1), 1000).unwrap();
        assert_eq!(gap, 0.0);
    }

    #[test]
    fn exponent_gap_shrinks_over_decades() {
        let m = k1_model(0.5);
        let c = ScaledType::new(vec![1.0]).unwrap();
        let gaps: Vec<f64> = [1_000usize, 10_000, 100_000, 1_000_000]
            .iter()
            .map(|&n| exponent_gap(&m, &c, n).unwrap().abs())
            .collect();
        for w in gaps.windows(2) {
            assert!(w[0] > w[1], "gaps not decreasing: {gaps:?}");
        }
    }

    #[test]
    fn outside_region_has_negative_exponent_and_count() {
        let m = k1_model(0.5);
        let c_out = natural_class_size_plus_half(&m);
        let g = m.subset_exponent(&c_out, SubsetIndex::singleton(0));
        assert!(g < 0.0);
        let n = 1_000_000usize;
        let ln_n = (n as f64).ln();
        let t = TypeVector::new(vec![(c_out[0] * ln_n).round() as u32]);
        let s = TypeVector::new(vec![n as u32]);
        let ln_mu = log_expected_count(&m, &s, &t).unwrap();
        assert!(ln_mu < 0.0, "ln mu = {ln_mu}");
    }

    fn natural_class_size_plus_half(m: &BlockModel<f64>) -> ScaledType<f64> {
        ScaledType::new(vec![m.class_size(0) + 0.5]).unwrap()
    }

    #[test]
    fn find_trivial_targets() {
        let g = cycle4();
        let avail = VertexSet::full(4);
        let budget = SearchBudget::default();
        let empty = find_typed_set(&g, &avail, &TypeVector::zeros(2), &budget, 1).unwrap();
        assert!(empty.is_empty());

        let one = find_typed_set(&g, &avail, &TypeVector::new(vec![1, 0]), &budget, 1).unwrap();
        assert_eq!(one.count(), 1);
        assert!(is_independent(&g, &one));
    }

    #[test]
    fn find_respects_availability() {
        let g = cycle4();
        let mut avail = VertexSet::full(4);
        avail.remove(0);
        avail.remove(1);
        // Part 1 has no available vertices.
        let out = find_typed_set(
            &g,
            &avail,
            &TypeVector::new(vec![1, 0]),
            &SearchBudget::default(),
            3,
        );
        assert!(out.is_err());
    }

    #[test]
    fn find_matches_exhaustive_oracle() {
        // G(60, 0.3): search for a 4-element independent set whenever
        // exhaustive backtracking confirms one exists.
        let m = k1_model(0.3);
        let budget = SearchBudget::default();
        let mut confirmed = 0;
        let mut found = 0;
        for seed in 0..200u64 {
            let g = BlockGraph::sample(&m, 60, seed).unwrap();
            let target = TypeVector::new(vec![4]);
            let exists = {
                let allowed = VertexSet::full(60);
                let mut deficit = [4u32];
                let mut steps = 0u64;
                complete_exhaustive(
                    &g,
                    &allowed,
                    &mut deficit,
                    &mut steps,
                    u64::MAX,
                    VertexSet::empty(60),
                )
                .is_some()
            };
            if !exists {
                continue;
            }
            confirmed += 1;
            let got = find_typed_set(&g, &VertexSet::full(60), &target, &budget, seed);
            if let Ok(set) = got {
                assert!(is_independent(&g, &set));
                assert_eq!(type_of(&g, &set), target);
                found += 1;
            }
        }
        assert!(confirmed > 190, "oracle should confirm nearly all instances");
        let rate = found as f64 / confirmed as f64;
        assert!(rate >= 0.99, "success rate {rate} below 99%");
    }

    #[test]
    fn find_deterministic_given_seed() {
        let m = k2_model(0.4, 0.4, 0.2);
        let g = BlockGraph::sample(&m, 40, 5).unwrap();
        let t = TypeVector::new(vec![3, 3]);
        let budget = SearchBudget::default();
        let a = find_typed_set(&g, &VertexSet::full(40), &t, &budget, 11).unwrap();
        let b = find_typed_set(&g, &VertexSet::full(40), &t, &budget, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn max_types_edgeless_and_complete() {
        let edgeless = BlockGraph::from_parts_and_edges(&[2, 3], &[], 0).unwrap();
        let types = enumerate_max_types(&edgeless).unwrap();
        assert_eq!(types.len(), 1);
        assert!(types.contains(&TypeVector::new(vec![2, 3])));

        let mut edges = Vec::new();
        for v in 0..5 {
            for u in 0..v {
                edges.push((u, v));
            }
        }
        let complete = BlockGraph::from_parts_and_edges(&[2, 3], &edges, 0).unwrap();
        let types = enumerate_max_types(&complete).unwrap();
        let expect: BTreeSet<TypeVector> = [
            TypeVector::new(vec![1, 0]),
            TypeVector::new(vec![0, 1]),
        ]
        .into_iter()
        .collect();
        assert_eq!(types, expect);
    }

    #[test]
    fn max_types_four_cycle() {
        let types = enumerate_max_types(&cycle4()).unwrap();
        let expect: BTreeSet<TypeVector> = [
            TypeVector::new(vec![2, 0]),
            TypeVector::new(vec![0, 2]),
        ]
        .into_iter()
        .collect();
        assert_eq!(types, expect);
    }

    #[test]
    fn counting_matches_hand_enumeration() {
        let g = cycle4();
        // All four cross pairs of C4 with parts {a,c}, {b,d} are edges, so
        // there is no independent (1,1)-set.
        assert_eq!(count_typed_sets(&g, &TypeVector::new(vec![1, 1])).unwrap(), 0);
        assert_eq!(count_typed_sets(&g, &TypeVector::new(vec![2, 0])).unwrap(), 1);
        assert_eq!(count_typed_sets(&g, &TypeVector::new(vec![1, 0])).unwrap(), 2);
        assert_eq!(count_typed_sets(&g, &TypeVector::new(vec![0, 0])).unwrap(), 1);
    }

    #[test]
    fn counting_matches_expectation_on_average() {
        // Quick Monte Carlo agreement check; the acceptance suite runs the
        // full-sized version.
        let m = k2_model(0.5, 0.5, 0.3);
        let t = TypeVector::new(vec![1, 1]);
        let trials = 400u64;
        let mut counts = Vec::with_capacity(trials as usize);
        for seed in 0..trials {
            let g = BlockGraph::sample(&m, 4, seed).unwrap();
            counts.push(count_typed_sets(&g, &t).unwrap() as f64);
        }
        let mean: f64 = counts.iter().sum::<f64>() / trials as f64;
        let var: f64 =
            counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        let mu = log_expected_count(&m, &TypeVector::new(vec![2, 2]), &t)
            .unwrap()
            .exp();
        assert!((mean - mu).abs() < 5.0 * se, "mean {mean} vs mu {mu}");
    }
}
