//! Two-regime greedy coloring driven by a chromatic-constant certificate,
//! plus DSATUR and exact baselines used for validation.
//!
//! Phase 1 repeatedly extracts independent sets of the scheduled types while
//! every touched part stays above its cleanup threshold. Phase 2 colors each
//! part's leftovers with within-part independent sets, and phase 3 hands out
//! singleton colors, so the engine always produces a proper coloring.

use crate::bits::VertexSet;
use crate::error::{Error, Result};
use crate::graph::{derive_seed, BlockGraph};
use crate::indep::{find_typed_set, is_independent, SearchBudget};
use crate::model::{BlockModel, ScaledType, TypeVector};
use crate::region::CStarResult;
use crate::scalar::{real, real_of, Real};

/// Predicted chromatic number `n / (c* ln n)` from both ends of the bracket.
#[derive(Clone, Copy, Debug)]
pub struct PredictedChi<F> {
    /// `n / (lower ln n)`; the larger estimate.
    pub from_lower: F,
    /// `n / (upper ln n)`.
    pub from_upper: F,
}

pub fn predicted_chi<F: Real>(n: usize, cstar: &CStarResult<F>) -> PredictedChi<F> {
    let nf = real_of::<F>(n);
    let ln_n = nf.ln();
    PredictedChi {
        from_lower: nf / (cstar.lower * ln_n),
        from_upper: nf / (cstar.upper * ln_n),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanRegime {
    /// The ray point is admissible: one target type proportional to alpha.
    SingleType,
    /// Schedule from the convex-combination certificate.
    ConvexSchedule,
}

/// Extraction schedule plus the cleanup parameters, all precomputed from the
/// model so execution only needs the graph.
#[derive(Clone, Debug)]
pub struct ColoringPlan {
    pub regime: PlanRegime,
    /// `(target type, class count)` per scheduled type.
    pub schedule: Vec<(TypeVector, usize)>,
    pub epsilon: f64,
    /// Per part: stop extracting/cleaning below this many remaining vertices.
    pub cleanup_threshold: Vec<usize>,
    /// Per part: cleanup class size `max(1, floor(c(p_i) ln n / 2))`.
    pub cleanup_target: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct PlanOptions<F> {
    /// Cap on `epsilon = 7 ln ln n / ln n`, which exceeds 1 for all feasible
    /// `n`; the cap keeps targets nonempty at desk scale.
    pub epsilon_cap: F,
    /// Membership tolerance used to pick the regime and check targets.
    pub region_tol: F,
}

impl<F: Real> Default for PlanOptions<F> {
    fn default() -> Self {
        Self {
            epsilon_cap: real(1.0 / 3.0),
            region_tol: real(1e-6),
        }
    }
}

/// Builds the extraction schedule for coloring a sampled graph on `n`
/// vertices.
pub fn build_plan<F: Real>(
    model: &BlockModel<F>,
    n: usize,
    cstar: &CStarResult<F>,
    opts: &PlanOptions<F>,
) -> Result<ColoringPlan> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "coloring plans need n >= 3, got {n}"
        )));
    }
    let k = model.k();
    let nf = real_of::<F>(n);
    let ln_n = nf.ln();
    let eps_schedule = real::<F>(7.0) * ln_n.ln() / ln_n;
    let epsilon = eps_schedule.min(opts.epsilon_cap);
    if !(epsilon < F::one() && epsilon > F::zero()) {
        return Err(Error::Precondition(format!(
            "epsilon = {epsilon} outside (0,1); adjust the cap"
        )));
    }
    let scale = (F::one() - epsilon) * ln_n;

    let floor_type = |point: &ScaledType<F>| -> TypeVector {
        TypeVector::new(
            (0..k)
                .map(|i| {
                    let f = (point[i] * scale).floor();
                    f.to_u32().unwrap_or(0)
                })
                .collect(),
        )
    };

    let ray_point = model.along_ray(cstar.lower);
    let in_region = model.region_contains(&ray_point, opts.region_tol)?;

    let mut schedule = Vec::new();
    let regime = if in_region {
        let target = floor_type(&ray_point);
        if !target.is_zero() {
            let per_class = target.sum() as usize;
            schedule.push((target, n.div_ceil(per_class)));
        }
        PlanRegime::SingleType
    } else {
        let classes_total = nf / (cstar.lower * ln_n);
        for (weight, point) in &cstar.certificate {
            if !(*weight > F::zero()) {
                continue;
            }
            let target = floor_type(point);
            if target.is_zero() {
                continue;
            }
            let count = (*weight * classes_total)
                .round()
                .to_usize()
                .unwrap_or(0);
            if count == 0 {
                continue;
            }
            schedule.push((target, count));
        }
        PlanRegime::ConvexSchedule
    };
    if schedule.is_empty() {
        return Err(Error::EpsilonInfeasible);
    }

    // Floored targets stay admissible by downward closure; verify anyway.
    for (target, _) in &schedule {
        let rescaled = ScaledType::new(
            target
                .as_slice()
                .iter()
                .map(|&t| F::from_u32(t).unwrap() / scale)
                .collect(),
        )?;
        if !model.region_contains(&rescaled, opts.region_tol)? {
            return Err(Error::Precondition(format!(
                "scheduled target ({target}) fell outside the admissible region"
            )));
        }
    }

    let ln2 = ln_n * ln_n;
    let cleanup_threshold = (0..k)
        .map(|i| {
            let t = (model.alpha()[i] * nf / ln2).floor();
            t.to_usize().unwrap_or(0).max(1)
        })
        .collect();
    let cleanup_target = (0..k)
        .map(|i| {
            let m = (model.class_size(i) * ln_n / real::<F>(2.0)).floor();
            m.to_usize().unwrap_or(0).max(1)
        })
        .collect();

    Ok(ColoringPlan {
        regime,
        schedule,
        epsilon: epsilon.to_f64().unwrap(),
        cleanup_threshold,
        cleanup_target,
    })
}

/// Proper vertex coloring with contiguous color ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub color_of: Vec<u32>,
    pub num_colors: usize,
}

/// Accounting for one plan execution.
#[derive(Clone, Debug)]
pub struct ColoringReport {
    pub colors_used: usize,
    /// Classes placed per scheduled target type.
    pub histogram: Vec<(TypeVector, usize)>,
    pub cleanup_colors: usize,
    pub singleton_colors: usize,
    /// `n / (c*_lower ln n)`.
    pub predicted: f64,
    /// `colors_used / predicted`.
    pub ratio: f64,
}

/// Runs the three coloring phases. Never fails: extraction failures shrink
/// the failing coordinates (down to half the original target) and whatever
/// remains is colored by cleanup sets and singletons.
pub fn execute_plan(
    g: &BlockGraph,
    plan: &ColoringPlan,
    budget: &SearchBudget,
    seed: u64,
) -> (Coloring, ColoringReport) {
    let n = g.n();
    let k = g.k();
    let mut avail = VertexSet::full(n);
    let mut avail_count: Vec<usize> = (0..k).map(|i| g.part_size(i)).collect();
    let mut color_of = vec![u32::MAX; n];
    let mut next_color = 0u32;
    let mut class_counter = 0u64;

    let assign = |set: &VertexSet,
                      avail: &mut VertexSet,
                      avail_count: &mut Vec<usize>,
                      color_of: &mut Vec<u32>,
                      next_color: &mut u32| {
        for v in set.ones() {
            debug_assert_eq!(color_of[v], u32::MAX);
            color_of[v] = *next_color;
            avail.remove(v);
            avail_count[g.part_of(v)] -= 1;
        }
        *next_color += 1;
    };

    // Phase 1: scheduled typed extraction.
    let mut histogram: Vec<(TypeVector, usize)> = plan
        .schedule
        .iter()
        .map(|(t, _)| (t.clone(), 0usize))
        .collect();
    for (si, (orig_target, count)) in plan.schedule.iter().enumerate() {
        let mut target: Vec<u32> = orig_target.as_slice().to_vec();
        let shrink_floor: Vec<u32> = orig_target.as_slice().iter().map(|&t| t.div_ceil(2)).collect();
        let mut placed = 0usize;
        'extraction: while placed < *count {
            if target.iter().all(|&t| t == 0) {
                break;
            }
            for i in 0..k {
                if target[i] > 0
                    && avail_count[i] < (target[i] as usize).max(plan.cleanup_threshold[i])
                {
                    break 'extraction;
                }
            }
            let attempt = TypeVector::new(target.clone());
            let class_seed = derive_seed(seed, class_counter);
            class_counter += 1;
            match find_typed_set(g, &avail, &attempt, budget, class_seed) {
                Ok(set) => {
                    debug_assert!(is_independent(g, &set));
                    assign(
                        &set,
                        &mut avail,
                        &mut avail_count,
                        &mut color_of,
                        &mut next_color,
                    );
                    placed += 1;
                    histogram[si].1 += 1;
                }
                Err(failure) => {
                    let mut shrunk = false;
                    for i in 0..k {
                        if failure.best[i] < target[i] && target[i] > shrink_floor[i] {
                            target[i] -= 1;
                            shrunk = true;
                        }
                    }
                    if !shrunk {
                        break 'extraction;
                    }
                }
            }
        }
    }

    // Phase 2: per-part cleanup sets while the part stays above threshold.
    let mut cleanup_colors = 0usize;
    for i in 0..k {
        let mut size = plan.cleanup_target[i] as u32;
        while avail_count[i] >= plan.cleanup_threshold[i] && avail_count[i] > 0 {
            let want = size.min(avail_count[i] as u32).max(1);
            let mut coords = vec![0u32; k];
            coords[i] = want;
            let class_seed = derive_seed(seed, class_counter);
            class_counter += 1;
            match find_typed_set(g, &avail, &TypeVector::new(coords), budget, class_seed) {
                Ok(set) => {
                    assign(
                        &set,
                        &mut avail,
                        &mut avail_count,
                        &mut color_of,
                        &mut next_color,
                    );
                    cleanup_colors += 1;
                }
                Err(_) => {
                    if want > 1 {
                        size = want - 1;
                    } else {
                        break;
                    }
                }
            }
        }
    }

    // Phase 3: singletons.
    let mut singleton_colors = 0usize;
    for v in 0..n {
        if color_of[v] == u32::MAX {
            color_of[v] = next_color;
            next_color += 1;
            singleton_colors += 1;
        }
    }

    let coloring = Coloring {
        color_of,
        num_colors: next_color as usize,
    };
    let report = ColoringReport {
        colors_used: next_color as usize,
        histogram,
        cleanup_colors,
        singleton_colors,
        predicted: f64::NAN,
        ratio: f64::NAN,
    };
    (coloring, report)
}

/// Fills in the prediction fields of a report against a `c*` bracket.
pub fn finish_report<F: Real>(report: &mut ColoringReport, n: usize, cstar: &CStarResult<F>) {
    let predicted = predicted_chi(n, cstar);
    report.predicted = predicted.from_lower.to_f64().unwrap();
    report.ratio = report.colors_used as f64 / report.predicted;
}

/// Maximum-saturation greedy baseline; ties by degree, then lowest index.
pub fn dsatur(g: &BlockGraph) -> Coloring {
    let n = g.n();
    let mut color_of = vec![u32::MAX; n];
    let mut forbidden: Vec<VertexSet> = (0..n).map(|_| VertexSet::empty(n)).collect();
    let mut saturation = vec![0usize; n];
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut num_colors = 0u32;
    for _ in 0..n {
        let mut pick = usize::MAX;
        for v in 0..n {
            if color_of[v] != u32::MAX {
                continue;
            }
            if pick == usize::MAX
                || (saturation[v], degrees[v], usize::MAX - v)
                    > (saturation[pick], degrees[pick], usize::MAX - pick)
            {
                pick = v;
            }
        }
        let mut color = 0u32;
        while forbidden[pick].contains(color as usize) {
            color += 1;
        }
        color_of[pick] = color;
        num_colors = num_colors.max(color + 1);
        for u in 0..n {
            if g.has_edge(pick, u) && color_of[u] == u32::MAX && !forbidden[u].contains(color as usize)
            {
                forbidden[u].insert(color as usize);
                saturation[u] += 1;
            }
        }
    }
    Coloring {
        color_of,
        num_colors: num_colors as usize,
    }
}

/// Exact chromatic number: subset dynamic programming up to 16 vertices,
/// branch and bound with a clique lower bound up to 30.
pub fn exact_chromatic(g: &BlockGraph) -> Result<usize> {
    let n = g.n();
    if n == 0 {
        return Ok(0);
    }
    if n <= 16 {
        return Ok(chromatic_subset_dp(g));
    }
    if n <= 30 {
        return Ok(chromatic_branch_and_bound(g));
    }
    Err(Error::GraphTooLarge {
        what: "exact chromatic number",
        n,
        limit: 30,
    })
}

fn adjacency_masks(g: &BlockGraph) -> Vec<u32> {
    let n = g.n();
    (0..n)
        .map(|v| {
            let mut mask = 0u32;
            for u in 0..n {
                if g.has_edge(v, u) {
                    mask |= 1 << u;
                }
            }
            mask
        })
        .collect()
}

fn chromatic_subset_dp(g: &BlockGraph) -> usize {
    let n = g.n();
    let adj = adjacency_masks(g);
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut dp = vec![u8::MAX; (full as usize) + 1];
    dp[0] = 0;
    for mask in 1..=full {
        let v = mask.trailing_zeros() as usize;
        // Enumerate independent subsets of `mask` containing `v`; removing
        // one color class containing the lowest vertex is always optimal.
        let mut best = u8::MAX;
        enumerate_independent(
            &adj,
            1 << v,
            mask & !adj[v] & !((1 << (v + 1)) - 1),
            &mut |class: u32| {
                let rest = dp[(mask & !class) as usize];
                if rest != u8::MAX && rest + 1 < best {
                    best = rest + 1;
                }
            },
        );
        dp[mask as usize] = best;
    }
    dp[full as usize] as usize
}

fn enumerate_independent(adj: &[u32], current: u32, candidates: u32, visit: &mut impl FnMut(u32)) {
    visit(current);
    let mut rest = candidates;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        enumerate_independent(adj, current | 1 << u, rest & !adj[u], visit);
    }
}

fn greedy_clique_size(g: &BlockGraph) -> usize {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| usize::MAX - g.degree(v));
    let mut best = 1;
    for &seed in order.iter().take(8) {
        let mut clique = vec![seed];
        for &v in &order {
            if v != seed && clique.iter().all(|&u| g.has_edge(u, v)) {
                clique.push(v);
            }
        }
        best = best.max(clique.len());
    }
    best
}

fn chromatic_branch_and_bound(g: &BlockGraph) -> usize {
    let n = g.n();
    let upper = dsatur(g).num_colors;
    let lower = greedy_clique_size(g);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| usize::MAX - g.degree(v));
    for target in lower..upper {
        let mut colors = vec![u32::MAX; n];
        if try_color(g, &order, 0, target as u32, 0, &mut colors) {
            return target;
        }
    }
    upper
}

fn try_color(
    g: &BlockGraph,
    order: &[usize],
    pos: usize,
    target: u32,
    max_used: u32,
    colors: &mut Vec<u32>,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let v = order[pos];
    // Trying one fresh color beyond the used range is enough; further fresh
    // colors are symmetric.
    let limit = (max_used + 1).min(target - 1);
    for color in 0..=limit {
        let conflict = order[..pos]
            .iter()
            .any(|&u| colors[u] == color && g.has_edge(u, v));
        if conflict {
            continue;
        }
        colors[v] = color;
        if try_color(g, order, pos + 1, target, max_used.max(color + 1), colors) {
            return true;
        }
        colors[v] = u32::MAX;
    }
    false
}

/// True iff every vertex carries a color below `num_colors` and every edge is
/// bichromatic.
pub fn validate(g: &BlockGraph, coloring: &Coloring) -> bool {
    let n = g.n();
    if coloring.color_of.len() != n {
        return false;
    }
    for v in 0..n {
        if coloring.color_of[v] == u32::MAX || coloring.color_of[v] as usize >= coloring.num_colors
        {
            return false;
        }
        for u in 0..v {
            if g.has_edge(u, v) && coloring.color_of[u] == coloring.color_of[v] {
                return false;
            }
        }
    }
    true
}

/// Average class type `(1/N) sum_i type(S_i)`; proportional to the exact part
/// sizes for any full coloring.
pub fn average_type(g: &BlockGraph, coloring: &Coloring) -> Vec<f64> {
    let k = g.k();
    let mut totals = vec![0u64; k];
    for v in 0..g.n() {
        totals[g.part_of(v)] += 1;
    }
    let mut sums = vec![0.0f64; k];
    let mut per_class = vec![0u64; k * coloring.num_colors];
    for v in 0..g.n() {
        let c = coloring.color_of[v] as usize;
        per_class[c * k + g.part_of(v)] += 1;
    }
    for c in 0..coloring.num_colors {
        for i in 0..k {
            sums[i] += per_class[c * k + i] as f64;
        }
    }
    debug_assert!((0..k).all(|i| sums[i] as u64 == totals[i]));
    sums.iter()
        .map(|&s| s / coloring.num_colors as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{c_star, CStarOptions};

    fn k1_model(p: f64) -> BlockModel<f64> {
        BlockModel::new(vec![1.0], vec![vec![p]]).unwrap()
    }

    fn complete_graph(n: usize) -> BlockGraph {
        let mut edges = Vec::new();
        for v in 0..n {
            for u in 0..v {
                edges.push((u, v));
            }
        }
        BlockGraph::from_parts_and_edges(&[n], &edges, 0).unwrap()
    }

    fn cycle(n: usize) -> BlockGraph {
        let edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        BlockGraph::from_parts_and_edges(&[n], &edges, 0).unwrap()
    }

    fn edgeless(n: usize) -> BlockGraph {
        BlockGraph::from_parts_and_edges(&[n], &[], 0).unwrap()
    }

    #[test]
    fn predicted_chi_values() {
        let m = k1_model(0.5);
        let cstar = c_star(&m, &CStarOptions::default()).unwrap();
        let pred = predicted_chi(1_000_000, &cstar);
        assert!((pred.from_lower - 25085.832971998432).abs() < 1e-6);
        // Bracket is a point here, so both estimates agree.
        assert!((pred.from_lower - pred.from_upper).abs() < 1e-9);
        // Identity: predicted * lower * ln n == n for any n.
        for n in [10usize, 997, 12345] {
            let p = predicted_chi(n, &cstar);
            let back = p.from_lower * cstar.lower * (n as f64).ln();
            assert!((back - n as f64).abs() < 1e-9 * n as f64);
        }
    }

    #[test]
    fn predicted_chi_union_model() {
        let m =
            BlockModel::<f64>::new(vec![0.5, 0.5], vec![vec![0.2, 0.8], vec![0.8, 0.5]]).unwrap();
        let cstar = c_star(&m, &CStarOptions::default()).unwrap();
        let pred = predicted_chi(1_000_000, &cstar);
        assert!((pred.from_lower - 16580.833694668236).abs() < 1e-6);
    }

    #[test]
    fn build_plan_k1_example() {
        // epsilon capped at 0.1 gives target floor(0.9 ln(1e4) c(0.5)) = 23.
        let m = k1_model(0.5);
        let cstar = c_star(&m, &CStarOptions::default()).unwrap();
        let opts = PlanOptions {
            epsilon_cap: 0.1,
            ..PlanOptions::default()
        };
        let plan = build_plan(&m, 10_000, &cstar, &opts).unwrap();
        assert_eq!(plan.regime, PlanRegime::SingleType);
        assert_eq!(plan.schedule.len(), 1);
        assert_eq!(plan.schedule[0].0.as_slice(), &[23]);
        assert!((plan.epsilon - 0.1).abs() < 1e-12);
    }

    #[test]
    fn build_plan_union_schedule() {
        let m = BlockModel::new(vec![0.5, 0.5], vec![vec![0.2, 0.8], vec![0.8, 0.5]]).unwrap();
        let cstar = c_star(&m, &CStarOptions::default()).unwrap();
        let plan = build_plan(&m, 10_000, &cstar, &PlanOptions::default()).unwrap();
        assert_eq!(plan.regime, PlanRegime::ConvexSchedule);
        assert_eq!(plan.schedule.len(), 2);
        // Axis targets: each scheduled type touches exactly one part.
        for (target, count) in &plan.schedule {
            assert_eq!(
                target.as_slice().iter().filter(|&&t| t > 0).count(),
                1,
                "axis target expected, got ({target})"
            );
            assert!(*count > 0);
        }
        // Class counts proportional to the certificate weights.
        let total: usize = plan.schedule.iter().map(|(_, c)| c).sum();
        let ln_n = (10_000f64).ln();
        let expect_total = 10_000.0 / (cstar.lower * ln_n);
        assert!((total as f64 - expect_total).abs() < 2.0);
    }

    #[test]
    fn build_plan_single_type_when_inside() {
        let m = BlockModel::new(vec![0.5, 0.5], vec![vec![0.5, 0.1], vec![0.1, 0.5]]).unwrap();
        let cstar = c_star(&m, &CStarOptions::default()).unwrap();
        let plan = build_plan(&m, 5_000, &cstar, &PlanOptions::default()).unwrap();
        assert_eq!(plan.regime, PlanRegime::SingleType);
        assert_eq!(plan.schedule.len(), 1);
    }

    #[test]
    fn epsilon_infeasible_for_tiny_n() {
        // Dense single part: c(0.99) ~ 0.43, so at n = 3 the shrunken target
        // floors to zero.
        let m = k1_model(0.99);
        let cstar = c_star(&m, &CStarOptions::default()).unwrap();
        let err = build_plan(&m, 3, &cstar, &PlanOptions::default());
        assert!(matches!(err, Err(Error::EpsilonInfeasible)));
    }

    #[test]
    fn dsatur_baselines() {
        assert_eq!(dsatur(&complete_graph(7)).num_colors, 7);
        assert_eq!(dsatur(&edgeless(9)).num_colors, 1);
        let c5 = cycle(5);
        let col = dsatur(&c5);
        assert_eq!(col.num_colors, 3);
        assert!(validate(&c5, &col));
    }

    #[test]
    fn exact_chromatic_small_cases() {
        assert_eq!(exact_chromatic(&complete_graph(4)).unwrap(), 4);
        assert_eq!(exact_chromatic(&edgeless(6)).unwrap(), 1);
        assert_eq!(exact_chromatic(&cycle(5)).unwrap(), 3);
        assert_eq!(exact_chromatic(&cycle(6)).unwrap(), 2);
    }

    #[test]
    fn c5_not_two_colorable_brute_force() {
        // Independent confirmation that chi(C5) = 3: try all 2-colorings.
        let c5 = cycle(5);
        let mut two_colorable = false;
        for assignment in 0..(1u32 << 5) {
            let coloring = Coloring {
                color_of: (0..5).map(|v| assignment >> v & 1).collect(),
                num_colors: 2,
            };
            if validate(&c5, &coloring) {
                two_colorable = true;
            }
        }
        assert!(!two_colorable);
    }

    #[test]
    fn branch_and_bound_agrees_with_dp() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for trial in 0..10 {
            let n = 10 + trial % 5;
            let mut edges = Vec::new();
            for v in 0..n {
                for u in 0..v {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = BlockGraph::from_parts_and_edges(&[n], &edges, 0).unwrap();
            let dp = chromatic_subset_dp(&g);
            let bb = chromatic_branch_and_bound(&g);
            assert_eq!(dp, bb, "n = {n}, trial {trial}");
        }
    }

    #[test]
    fn validate_rejects_bad_colorings() {
        let g = cycle(4);
        let proper = dsatur(&g);
        assert!(validate(&g, &proper));
        let monochrome = Coloring {
            color_of: vec![0; 4],
            num_colors: 1,
        };
        assert!(!validate(&g, &monochrome));
        let partial = Coloring {
            color_of: vec![0, 1, 0, u32::MAX],
            num_colors: 2,
        };
        assert!(!validate(&g, &partial));
    }

    #[test]
    fn execute_plan_edgeless_graph() {
        let m = k1_model(0.5);
        let cstar = c_star(&m, &CStarOptions::default()).unwrap();
        let plan = build_plan(&m, 64, &cstar, &PlanOptions::default()).unwrap();
        let g = edgeless(64);
        let (coloring, report) = execute_plan(&g, &plan, &SearchBudget::default(), 1);
        assert!(validate(&g, &coloring));
        assert!(report.colors_used <= 64);
        let hist_total: usize = report.histogram.iter().map(|(_, c)| c).sum();
        assert_eq!(
            hist_total + report.cleanup_colors + report.singleton_colors,
            report.colors_used
        );
    }

    #[test]
    fn execute_plan_block_graph_accounting() {
        let m = BlockModel::new(vec![0.5, 0.5], vec![vec![0.5, 0.2], vec![0.2, 0.5]]).unwrap();
        let cstar = c_star(&m, &CStarOptions::default()).unwrap();
        let g = BlockGraph::sample(&m, 300, 17).unwrap();
        let plan = build_plan(&m, 300, &cstar, &PlanOptions::default()).unwrap();
        let (coloring, mut report) = execute_plan(&g, &plan, &SearchBudget::default(), 17);
        assert!(validate(&g, &coloring));
        finish_report(&mut report, 300, &cstar);
        assert!(report.ratio > 0.0);
        let hist_total: usize = report.histogram.iter().map(|(_, c)| c).sum();
        assert_eq!(
            hist_total + report.cleanup_colors + report.singleton_colors,
            report.colors_used
        );
        // Deterministic for fixed seed.
        let (coloring2, _) = execute_plan(&g, &plan, &SearchBudget::default(), 17);
        assert_eq!(coloring, coloring2);
    }

    #[test]
    fn average_type_identities() {
        let m = BlockModel::new(vec![0.4, 0.6], vec![vec![0.5, 0.3], vec![0.3, 0.5]]).unwrap();
        let g = BlockGraph::sample(&m, 60, 4).unwrap();
        let coloring = dsatur(&g);
        let avg = average_type(&g, &coloring);
        let n_colors = coloring.num_colors as f64;
        for i in 0..2 {
            let expect = g.part_size(i) as f64 / n_colors;
            assert_eq!(avg[i], expect, "part {i}");
        }
        // n / (|avg| ln n) == N / ln n exactly.
        let total: f64 = avg.iter().sum();
        let lhs = g.n() as f64 / total;
        assert!((lhs - n_colors).abs() < 1e-9);
    }
}
