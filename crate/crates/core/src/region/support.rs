//! Support function of the admissible region.
//!
//! For a dual direction `u`, the support value is
//! `max { <u, c> : c admissible } = max over unit directions d of
//! <u, exit(d)>`, a low-dimensional piecewise-smooth problem over the
//! direction simplex. The search seeds from the best sampled boundary point
//! plus caller-provided starts and refines by pairwise mass-transfer hill
//! climbing; the result is the largest value seen, so the returned support is
//! never above the true one by more than floating error but can only fall
//! short if every start misses the global basin. Callers always include the
//! contact points of the regimes they care about among the starts.

use super::ray_exit;
use crate::model::BlockModel;
use crate::scalar::{real, Real};

pub(crate) struct SupportEstimate<F> {
    pub value: F,
    pub argmax: Vec<F>,
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `<u, exit(d)>` for a nonnegative direction `d` with positive mass.
fn objective<F: Real>(model: &BlockModel<F>, u: &[F], d: &[F]) -> F {
    match ray_exit(model, d) {
        Ok(sample) => dot(u, sample.point.as_slice()),
        Err(_) => F::neg_infinity(),
    }
}

pub(crate) fn support_value<F: Real>(
    model: &BlockModel<F>,
    u: &[F],
    cloud: &[(Vec<F>, F)],
    extra_starts: &[Vec<F>],
) -> SupportEstimate<F> {
    let k = model.k();
    let mut best_value = F::neg_infinity();
    let mut best_dir = vec![F::zero(); k];

    // Best sampled point: rho_j * <u, delta_j>.
    for (dir, radius) in cloud {
        let value = dot(u, dir) * *radius;
        if value > best_value {
            best_value = value;
            best_dir = dir.clone();
        }
    }

    let mut starts: Vec<Vec<F>> = Vec::new();
    if best_value.is_finite() {
        starts.push(best_dir.clone());
    }
    for i in 0..k {
        let mut axis = vec![F::zero(); k];
        axis[i] = F::one();
        starts.push(axis);
    }
    starts.push(model.alpha().to_vec());
    starts.extend_from_slice(extra_starts);

    for start in starts {
        if start.len() != k || start.iter().any(|&x| !(x >= F::zero())) {
            continue;
        }
        let total = start.iter().fold(F::zero(), |acc, &x| acc + x);
        if !(total > F::zero()) {
            continue;
        }
        let mut dir: Vec<F> = start.iter().map(|&x| x / total).collect();
        let mut value = objective(model, u, &dir);
        if !value.is_finite() {
            continue;
        }
        let (refined_value, refined_dir) = hill_climb(model, u, dir.clone(), value);
        value = refined_value;
        dir = refined_dir;
        if value > best_value {
            best_value = value;
            best_dir = dir;
        }
    }

    SupportEstimate {
        value: best_value,
        argmax: best_dir,
    }
}

/// Pairwise mass transfer on the direction simplex with a halving step.
fn hill_climb<F: Real>(
    model: &BlockModel<F>,
    u: &[F],
    mut dir: Vec<F>,
    mut value: F,
) -> (F, Vec<F>) {
    let k = dir.len();
    if k == 1 {
        return (value, dir);
    }
    let mut step = real::<F>(0.25);
    let floor = real::<F>(1e-12);
    let improve_eps = real::<F>(1e-15);
    let mut evals = 0usize;
    let max_evals = 20_000;
    while step > floor && evals < max_evals {
        let mut improved = false;
        for from in 0..k {
            if dir[from] <= F::zero() {
                continue;
            }
            for to in 0..k {
                if to == from {
                    continue;
                }
                let shift = step.min(dir[from]);
                let mut cand = dir.clone();
                cand[from] = cand[from] - shift;
                if cand[from] < F::zero() {
                    cand[from] = F::zero();
                }
                cand[to] = cand[to] + shift;
                let cand_value = objective(model, u, &cand);
                evals += 1;
                if cand_value > value + improve_eps + value.abs() * improve_eps {
                    value = cand_value;
                    dir = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step = step * real::<F>(0.5);
        }
    }
    (value, dir)
}
