//! Cross-validation of the region geometry: exact ray exits against a
//! bisection oracle, boundary sampling shape, and the `c*` bracket against
//! every closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbm_chroma::model::PairClass;
use sbm_chroma::{
    boundary_cloud, boundary_export, c_star, homogeneous_cstar, ray_exit, union_case_cstar,
    BlockModel64, CStarOptions64, Regime, ScaledType64,
};

fn k1(p: f64) -> BlockModel64 {
    BlockModel64::new(vec![1.0], vec![vec![p]]).unwrap()
}

fn k2(alpha1: f64, p1: f64, p2: f64, p12: f64) -> BlockModel64 {
    BlockModel64::new(
        vec![alpha1, 1.0 - alpha1],
        vec![vec![p1, p12], vec![p12, p2]],
    )
    .unwrap()
}

fn random_model(rng: &mut ChaCha8Rng, k: usize) -> BlockModel64 {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let alpha: Vec<f64> = raw.iter().map(|a| a / total).collect();
    let mut probs = vec![vec![0.0; k]; k];
    for i in 0..k {
        probs[i][i] = rng.gen_range(0.1..0.9);
    }
    for i in 0..k {
        for j in i + 1..k {
            let p = rng.gen_range(0.1..0.9);
            probs[i][j] = p;
            probs[j][i] = p;
        }
    }
    BlockModel64::new(alpha, probs).unwrap()
}

/// 1-D bisection on region membership along a ray: the independent oracle
/// for the closed-form exit radius.
fn bisect_exit(model: &BlockModel64, dir: &[f64]) -> f64 {
    let norm: f64 = dir.iter().sum();
    let dir: Vec<f64> = dir.iter().map(|d| d / norm).collect();
    let inside = |t: f64| {
        let c = ScaledType64::new(dir.iter().map(|d| d * t).collect()).unwrap();
        model.region_contains(&c, 0.0).unwrap()
    };
    let mut hi = 1.0;
    while inside(hi) {
        hi *= 2.0;
        assert!(hi < 1e9, "region unexpectedly unbounded along {dir:?}");
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn ray_exit_k1_is_class_size() {
    let m = k1(0.5);
    let s = ray_exit(&m, &[1.0]).unwrap();
    assert!((s.exit_t - 2.8853900817779268).abs() < 1e-12);
    assert_eq!(s.binding.to_string(), "1");
}

#[test]
fn ray_exit_k2_examples_match_bisection() {
    // Convex-compatible pair: the full-subset constraint binds on the
    // diagonal ray.
    let m = k2(0.5, 0.5, 0.5, 0.1);
    let s = ray_exit(&m, &[0.5, 0.5]).unwrap();
    assert!((s.exit_t - 5.009344329361489).abs() < 1e-9);
    assert_eq!(s.binding.to_string(), "1+2");
    assert!((s.exit_t - bisect_exit(&m, &[0.5, 0.5])).abs() < 1e-9);

    let m9 = k2(0.5, 0.5, 0.5, 0.9);
    let s9 = ray_exit(&m9, &[0.5, 0.5]).unwrap();
    assert!((s9.exit_t - 1.3352328027813363).abs() < 1e-9);
    assert_eq!(s9.binding.to_string(), "1+2");
    assert!((s9.exit_t - bisect_exit(&m9, &[0.5, 0.5])).abs() < 1e-9);
}

#[test]
fn ray_exit_matches_bisection_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 1..=4usize {
        for _ in 0..5 {
            let m = random_model(&mut rng, k);
            for _ in 0..5 {
                let dir: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
                if dir.iter().sum::<f64>() <= 0.0 {
                    continue;
                }
                let s = ray_exit(&m, &dir).unwrap();
                let oracle = bisect_exit(&m, &dir);
                assert!(
                    (s.exit_t - oracle).abs() < 1e-9,
                    "k = {k}: exact {} vs bisection {oracle}",
                    s.exit_t
                );
                // The exit point is on the boundary: the binding subset
                // exponent vanishes.
                let g = m.subset_exponent(&s.point, s.binding);
                assert!(g.abs() < 1e-9, "binding exponent {g}");
            }
        }
    }
}

#[test]
fn cloud_shapes() {
    let m1 = k1(0.35);
    for resolution in [1usize, 7, 32] {
        let cloud = boundary_cloud(&m1, resolution).unwrap();
        assert_eq!(cloud.len(), 1);
        assert!((cloud[0].exit_t - m1.class_size(0)).abs() < 1e-12);
    }

    let m = k2(0.4, 0.3, 0.6, 0.2);
    let r = 24;
    let cloud = boundary_cloud(&m, r).unwrap();
    assert_eq!(cloud.len(), r + 1);
    let c1 = m.class_size(0);
    let c2 = m.class_size(1);
    let has_axis1 = cloud
        .iter()
        .any(|s| (s.point[0] - c1).abs() < 1e-9 && s.point[1].abs() < 1e-12);
    let has_axis2 = cloud
        .iter()
        .any(|s| (s.point[1] - c2).abs() < 1e-9 && s.point[0].abs() < 1e-12);
    assert!(has_axis1 && has_axis2, "axis boundary points missing");
}

#[test]
fn line_case_cloud_is_collinear() {
    // p12 exactly at threshold: the boundary is the chord between the axis
    // points.
    let m = k2(0.5, 0.5, 0.5, 0.5);
    let c1 = m.class_size(0);
    let c2 = m.class_size(1);
    for s in boundary_cloud(&m, 64).unwrap() {
        let lhs = s.point[0] / c1 + s.point[1] / c2;
        assert!((lhs - 1.0).abs() < 1e-9, "off the line: {lhs}");
    }
}

#[test]
fn export_requires_two_parts() {
    assert!(boundary_export(&k1(0.5), 8).is_err());
    let rows = boundary_export(&k2(0.5, 0.5, 0.5, 0.5), 8).unwrap();
    assert_eq!(rows.len(), 9);
}

#[test]
fn union_closed_form_values() {
    let m = k2(0.5, 0.2, 0.5, 0.8);
    let v = union_case_cstar(&m).unwrap();
    // h = 0.5/c(0.2) + 0.5/c(0.5)
    assert!((v - 4.365426671749166).abs() < 1e-12);

    let equal = k2(0.5, 0.5, 0.5, 0.9);
    assert!((union_case_cstar(&equal).unwrap() - 2.8853900817779268).abs() < 1e-12);

    let degenerate = k1(0.3);
    let c = degenerate.class_size(0);
    assert!((union_case_cstar(&degenerate).unwrap() - c).abs() < 1e-12);

    let convex = k2(0.5, 0.5, 0.5, 0.1);
    assert!(union_case_cstar(&convex).is_err());
}

#[test]
fn homogeneous_closed_form_values() {
    let m = BlockModel64::new(
        vec![0.5, 0.5],
        vec![vec![0.5, 0.3], vec![0.3, 0.5]],
    )
    .unwrap();
    let v = homogeneous_cstar(&m).unwrap();
    assert!((v - 3.8101692721613407).abs() < 1e-12);

    // q = p collapses to c(p).
    let mqp = BlockModel64::new(
        vec![0.5, 0.5],
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
    )
    .unwrap();
    assert!((homogeneous_cstar(&mqp).unwrap() - 2.8853900817779268).abs() < 1e-12);

    // Unbalanced weights: precondition violated.
    let unbal = k2(0.3, 0.5, 0.5, 0.3);
    assert!(homogeneous_cstar(&unbal).is_err());
    // q > p: precondition violated.
    let qgtp = BlockModel64::new(
        vec![0.5, 0.5],
        vec![vec![0.3, 0.5], vec![0.5, 0.3]],
    )
    .unwrap();
    assert!(homogeneous_cstar(&qgtp).is_err());
}

#[test]
fn c_star_fast_paths() {
    let opts = CStarOptions64::default();

    let r1 = c_star(&k1(0.5), &opts).unwrap();
    assert_eq!(r1.regime, Regime::ClosedFormK1);
    assert!((r1.lower - 2.8853900817779268).abs() < 1e-12);
    assert_eq!(r1.lower, r1.upper);
    assert_eq!(r1.certificate.len(), 1);

    let ru = c_star(&k2(0.5, 0.2, 0.5, 0.8), &opts).unwrap();
    assert_eq!(ru.regime, Regime::ClosedFormUnion);
    assert!((ru.lower - 4.365426671749166).abs() < 1e-12);
    assert_eq!(ru.certificate.len(), 2);

    let rh = c_star(
        &BlockModel64::new(vec![0.5, 0.5], vec![vec![0.5, 0.3], vec![0.3, 0.5]]).unwrap(),
        &opts,
    )
    .unwrap();
    assert_eq!(rh.regime, Regime::ClosedFormHomogeneous);
    assert!((rh.lower - 3.8101692721613407).abs() < 1e-12);
}

fn forced() -> CStarOptions64 {
    CStarOptions64 {
        force_numeric: true,
        ..CStarOptions64::default()
    }
}

#[test]
fn numeric_bracket_matches_k1() {
    let r = c_star(&k1(0.5), &forced()).unwrap();
    assert!(!r.budget_exceeded);
    assert!(r.upper - r.lower <= 1e-6);
    let exact = 2.8853900817779268;
    assert!(r.lower <= exact + 1e-9 && exact <= r.upper + 1e-9);
    assert_eq!(r.regime, Regime::InRegion);
}

#[test]
fn numeric_bracket_matches_union_case() {
    let m = k2(0.5, 0.2, 0.5, 0.8);
    let exact = union_case_cstar(&m).unwrap();
    let r = c_star(&m, &forced()).unwrap();
    assert!(!r.budget_exceeded, "bracket [{}, {}]", r.lower, r.upper);
    assert!(r.upper - r.lower <= 1e-6);
    assert!(r.lower <= exact + 1e-9 && exact <= r.upper + 1e-9);
    assert_eq!(r.regime, Regime::OnHull);
}

#[test]
fn numeric_bracket_matches_convex_ray_exit() {
    let m = k2(0.3, 0.5, 0.5, 0.1);
    assert_eq!(m.classify_pair(0, 1).unwrap(), PairClass::ConvexCompatible);
    let exact = ray_exit(&m, m.alpha()).unwrap().exit_t;
    let r = c_star(&m, &forced()).unwrap();
    assert!(!r.budget_exceeded);
    assert!(r.upper - r.lower <= 1e-6);
    assert!((r.lower - exact).abs() <= 1e-6, "{} vs {exact}", r.lower);
    assert_eq!(r.regime, Regime::InRegion);
}

#[test]
fn numeric_bracket_matches_homogeneous() {
    let m = BlockModel64::new(
        vec![0.5, 0.5],
        vec![vec![0.6, 0.25], vec![0.25, 0.6]],
    )
    .unwrap();
    let exact = homogeneous_cstar(&m).unwrap();
    let r = c_star(&m, &forced()).unwrap();
    assert!(!r.budget_exceeded);
    assert!(r.upper - r.lower <= 1e-6);
    assert!(r.lower <= exact + 1e-9 && exact <= r.upper + 1e-9);
}

#[test]
fn certificates_recombine() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut opts = CStarOptions64::default();
    opts.max_doublings = 8;
    for trial in 0..10 {
        let k = 2 + (trial % 2);
        let m = random_model(&mut rng, k);
        for force in [false, true] {
            let mut o = opts.clone();
            o.force_numeric = force;
            let r = c_star(&m, &o).unwrap();
            assert!(r.lower > 0.0 && r.lower <= r.upper);
            assert!(r.certificate.len() <= k + 1, "certificate too long");
            let total: f64 = r.certificate.iter().map(|(w, _)| *w).sum();
            assert!((total - 1.0).abs() < 1e-9, "weights sum to {total}");
            let mut combo = vec![0.0; k];
            for (w, point) in &r.certificate {
                assert!(*w >= 0.0);
                assert!(m.region_contains(point, 1e-7).unwrap());
                for i in 0..k {
                    combo[i] += w * point[i];
                }
            }
            for i in 0..k {
                let target = r.lower * m.alpha()[i];
                assert!(
                    (combo[i] - target).abs() < 1e-6,
                    "coordinate {i}: {} vs {target}",
                    combo[i]
                );
            }
        }
    }
}

#[test]
fn upper_bound_weakly_decreases_in_probabilities() {
    // More edges shrink the admissible region, so the bracket can only drop.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..6 {
        let p1 = rng.gen_range(0.2..0.7);
        let p2 = rng.gen_range(0.2..0.7);
        let p12 = rng.gen_range(0.1..0.6);
        let bump = rng.gen_range(0.05..0.3);
        let base = k2(0.5, p1, p2, p12);
        let denser = k2(0.5, p1, p2, (p12 + bump).min(0.95));
        let opts = forced();
        let a = c_star(&base, &opts).unwrap();
        let b = c_star(&denser, &opts).unwrap();
        assert!(
            b.upper <= a.upper + 1e-9,
            "p12 {p12} -> {}: upper went {} -> {}",
            (p12 + bump).min(0.95),
            a.upper,
            b.upper
        );
    }
}

#[test]
fn lower_bound_never_below_ray_exit() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let k = 2 + (rng.gen_range(0..2) as usize);
        let m = random_model(&mut rng, k);
        let exit = ray_exit(&m, m.alpha()).unwrap().exit_t;
        let r = c_star(&m, &forced()).unwrap();
        assert!(r.lower >= exit - 1e-9);
    }
}
