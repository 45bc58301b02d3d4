//! Experiment drivers shared by the CLI subcommands and the acceptance
//! suite. Everything here is deterministic under a fixed configuration:
//! per-trial seeds are derived from the master seed and the trial index, and
//! parallel trials are collected in index order before output.

use rayon::prelude::*;
use sbm_chroma::coloring::{
    build_plan, dsatur, exact_chromatic, execute_plan, finish_report, predicted_chi, validate,
    PlanOptions,
};
use sbm_chroma::graph::derive_seed;
use sbm_chroma::indep::{count_typed_sets, log_expected_count, SearchBudget};
use sbm_chroma::{
    boundary_export, c_star, BlockGraph, BlockModel64, CStarOptions64, CStarResult64, TypeVector,
};

use crate::{CliError, CliResult};

/// One coloring run in the shared report schema.
#[derive(Clone, Debug)]
pub struct ColorRow {
    pub n: usize,
    pub seed: u64,
    pub method: String,
    pub colors: usize,
    /// `n / (upper ln n)`: the low end of the predicted chromatic number.
    pub predicted_lower: f64,
    /// `n / (lower ln n)`: the high end, used as the ratio denominator.
    pub predicted_upper: f64,
    pub ratio: f64,
    pub cleanup_colors: usize,
    pub singleton_colors: usize,
}

pub const REPORT_HEADER: &str =
    "n,seed,method,colors,predicted_lower,predicted_upper,ratio,cleanup_colors,singleton_colors";

impl ColorRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.seed,
            self.method,
            self.colors,
            self.predicted_lower,
            self.predicted_upper,
            self.ratio,
            self.cleanup_colors,
            self.singleton_colors
        )
    }
}

fn predictions(n: usize, cstar: &CStarResult64) -> (f64, f64) {
    let p = predicted_chi(n, cstar);
    (p.from_upper, p.from_lower)
}

/// Samples one graph, runs the plan coloring (and optionally DSATUR) and
/// reports rows in the shared schema.
pub fn color_run(
    model: &BlockModel64,
    n: usize,
    seed: u64,
    epsilon_cap: f64,
    budget: &SearchBudget,
    with_dsatur: bool,
) -> CliResult<Vec<ColorRow>> {
    let cstar = c_star(model, &CStarOptions64::default())?;
    let graph = BlockGraph::sample(model, n, seed)?;
    let plan = build_plan(
        model,
        n,
        &cstar,
        &PlanOptions {
            epsilon_cap,
            ..PlanOptions::default()
        },
    )?;
    let (coloring, mut report) = execute_plan(&graph, &plan, budget, seed);
    debug_assert!(validate(&graph, &coloring));
    finish_report(&mut report, n, &cstar);
    let (pred_lo, pred_hi) = predictions(n, &cstar);
    let mut rows = vec![ColorRow {
        n,
        seed,
        method: "plan".into(),
        colors: report.colors_used,
        predicted_lower: pred_lo,
        predicted_upper: pred_hi,
        ratio: report.ratio,
        cleanup_colors: report.cleanup_colors,
        singleton_colors: report.singleton_colors,
    }];
    if with_dsatur {
        let baseline = dsatur(&graph);
        debug_assert!(validate(&graph, &baseline));
        rows.push(ColorRow {
            n,
            seed,
            method: "dsatur".into(),
            colors: baseline.num_colors,
            predicted_lower: pred_lo,
            predicted_upper: pred_hi,
            ratio: baseline.num_colors as f64 / pred_hi,
            cleanup_colors: 0,
            singleton_colors: 0,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct TrendConfig {
    pub n_list: Vec<usize>,
    pub seeds: usize,
    pub master_seed: u64,
    pub epsilon_cap: f64,
    pub budget: SearchBudget,
}

/// Trend study: for each `(n, derived seed)` sample, plan, execute, and
/// record the ratio; medians per `n` summarize the directional claim.
pub fn run_trend(
    model: &BlockModel64,
    config: &TrendConfig,
) -> CliResult<(Vec<ColorRow>, Vec<(usize, f64)>)> {
    if config.n_list.is_empty() || config.seeds == 0 {
        return Err(CliError::Config(
            "trend needs at least one n and one seed".into(),
        ));
    }
    let cstar = c_star(model, &CStarOptions64::default())?;
    let mut jobs = Vec::new();
    for (n_idx, &n) in config.n_list.iter().enumerate() {
        for seed_idx in 0..config.seeds {
            let trial = ((n_idx as u64) << 32) | seed_idx as u64;
            jobs.push((n, derive_seed(config.master_seed, trial)));
        }
    }
    let rows: Vec<CliResult<ColorRow>> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let graph = BlockGraph::sample(model, n, seed)?;
            let plan = build_plan(
                model,
                n,
                &cstar,
                &PlanOptions {
                    epsilon_cap: config.epsilon_cap,
                    ..PlanOptions::default()
                },
            )?;
            let (coloring, mut report) = execute_plan(&graph, &plan, &config.budget, seed);
            debug_assert!(validate(&graph, &coloring));
            finish_report(&mut report, n, &cstar);
            let (pred_lo, pred_hi) = predictions(n, &cstar);
            Ok(ColorRow {
                n,
                seed,
                method: "plan".into(),
                colors: report.colors_used,
                predicted_lower: pred_lo,
                predicted_upper: pred_hi,
                ratio: report.ratio,
                cleanup_colors: report.cleanup_colors,
                singleton_colors: report.singleton_colors,
            })
        })
        .collect();
    let mut rows: Vec<ColorRow> = rows.into_iter().collect::<CliResult<_>>()?;
    rows.sort_by(|a, b| (a.n, a.seed).cmp(&(b.n, b.seed)));

    let mut medians = Vec::new();
    for &n in &config.n_list {
        let mut ratios: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.ratio)
            .collect();
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push((n, median_of_sorted(&ratios)));
    }
    Ok((rows, medians))
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

/// Serializes trend output: data rows then one `median` summary row per `n`.
pub fn trend_csv(rows: &[ColorRow], medians: &[(usize, f64)]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    for (n, median) in medians {
        out.push_str(&format!("{n},,median,,,,{median},,\n"));
    }
    out
}

/// Monte Carlo agreement between the exact typed-set count and its expected
/// value.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct McOutcome {
    pub empirical_mean: f64,
    pub mu: f64,
    pub z_score: f64,
}

pub fn mc_count(
    model: &BlockModel64,
    n: usize,
    t: &TypeVector,
    trials: usize,
    master_seed: u64,
) -> CliResult<McOutcome> {
    if trials < 2 {
        return Err(CliError::Config("mc-count needs at least 2 trials".into()));
    }
    let counts: Vec<CliResult<u64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let graph = BlockGraph::sample(model, n, derive_seed(master_seed, i as u64))?;
            Ok(count_typed_sets(&graph, t)?)
        })
        .collect();
    let counts: Vec<u64> = counts.into_iter().collect::<CliResult<_>>()?;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / trials as f64;
    let var = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / (trials - 1) as f64;
    let se = (var / trials as f64).sqrt();
    let sizes = sbm_chroma::graph::part_sizes(model, n)?;
    let capacities = TypeVector::new(sizes.iter().map(|&s| s as u32).collect());
    let mu = log_expected_count(model, &capacities, t)?.exp();
    let z_score = if se > 0.0 {
        (mean - mu) / se
    } else if (mean - mu).abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(McOutcome {
        empirical_mean: mean,
        mu,
        z_score,
    })
}

/// Exact-vs-heuristic comparison rows: `(exact, dsatur, plan)` per trial.
pub fn oracle_rows(
    model: &BlockModel64,
    n: usize,
    trials: usize,
    master_seed: u64,
    epsilon_cap: f64,
    budget: &SearchBudget,
) -> CliResult<Vec<(usize, usize, usize)>> {
    if n > 14 {
        return Err(CliError::Config(format!(
            "oracle-compare is limited to n <= 14, got {n}"
        )));
    }
    let cstar = c_star(model, &CStarOptions64::default())?;
    let plan_opts = PlanOptions {
        epsilon_cap,
        ..PlanOptions::default()
    };
    let mut rows = Vec::with_capacity(trials);
    for i in 0..trials {
        let seed = derive_seed(master_seed, i as u64);
        let graph = BlockGraph::sample(model, n, seed)?;
        let exact = exact_chromatic(&graph)?;
        let baseline = dsatur(&graph);
        debug_assert!(validate(&graph, &baseline));
        let plan = build_plan(model, n, &cstar, &plan_opts)?;
        let (coloring, report) = execute_plan(&graph, &plan, budget, seed);
        debug_assert!(validate(&graph, &coloring));
        rows.push((exact, baseline.num_colors, report.colors_used));
    }
    Ok(rows)
}

/// The qualitative two-part boundary shapes, keyed by where `p12` sits
/// relative to the single-part thresholds and the main threshold.
pub fn gallery_cases(p1: f64, p2: f64) -> Vec<(String, f64)> {
    let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
    let t_lo = 1.0 - (1.0 - lo).sqrt();
    let t_hi = 1.0 - (1.0 - hi).sqrt();
    let t_main = 1.0 - ((1.0 - lo) * (1.0 - hi)).sqrt();
    let mut cases = vec![("below_single_lo".to_string(), t_lo / 2.0)];
    if t_hi - t_lo > 1e-9 {
        cases.push(("between_singles".to_string(), 0.5 * (t_lo + t_hi)));
    }
    if t_main - t_hi > 1e-9 {
        cases.push(("below_main".to_string(), 0.5 * (t_hi + t_main)));
    }
    cases.push(("at_main".to_string(), t_main));
    cases.push(("above_main".to_string(), 0.5 * (t_main + 1.0)));
    cases
}

/// Boundary CSVs across the qualitative `p12` cases of a two-part model.
/// Returns `(tag, p12, csv)` triples; explicit `p12` overrides replace the
/// band-derived cases.
pub fn run_shape_gallery(
    model: &BlockModel64,
    resolution: usize,
    overrides: Option<&[f64]>,
) -> CliResult<Vec<(String, f64, String)>> {
    if model.k() != 2 {
        return Err(CliError::Config(format!(
            "shape-gallery needs a two-part model, got k = {}",
            model.k()
        )));
    }
    let p1 = model.probability(0, 0);
    let p2 = model.probability(1, 1);
    let cases: Vec<(String, f64)> = match overrides {
        Some(values) => values
            .iter()
            .enumerate()
            .map(|(i, &p12)| (format!("custom_{i}"), p12))
            .collect(),
        None => gallery_cases(p1, p2),
    };
    let alpha = model.alpha().to_vec();
    let mut out = Vec::with_capacity(cases.len());
    for (tag, p12) in cases {
        let variant = BlockModel64::new(alpha.clone(), vec![vec![p1, p12], vec![p12, p2]])?;
        let rows = boundary_export(&variant, resolution)?;
        let mut csv = String::from("c1,c2,binding_subset\n");
        for (c1, c2, binding) in rows {
            csv.push_str(&format!("{c1},{c2},{binding}\n"));
        }
        out.push((tag, p12, csv));
    }
    Ok(out)
}
