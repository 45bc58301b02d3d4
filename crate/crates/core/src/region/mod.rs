//! Geometry of the admissible region and the chromatic constant.
//!
//! The admissible region is star-shaped around the origin, so it is fully
//! described by its exit radius along each nonnegative direction, and that
//! radius has a closed form: restricted to a ray, every subset exponent is a
//! concave quadratic vanishing at zero, so the region along the ray is the
//! interval up to the smallest positive root ([`ray_exit`]).
//!
//! The chromatic constant `c*` is the largest `t` with `t * alpha` in the
//! convex hull of the region. [`c_star`] brackets it between
//!
//! * a primal bound: the best convex decomposition of the ray point over a
//!   sampled boundary cloud (a small LP over direction columns whose basic
//!   solutions are Caratheodory certificates), and
//! * a dual bound: `min_u support(u) / <u, alpha>` over candidate separating
//!   directions (the LP dual, the binding-constraint gradient at the ray
//!   exit, and the hyperplane through the axis points), with the support
//!   value computed by global sampling plus local ascent.
//!
//! Closed-form regimes (single part, all pairs concave, homogeneous
//! balanced) bypass the numeric pipeline unless explicitly disabled.

mod simplex;
mod support;

use crate::error::{Error, Result};
use crate::model::{BlockModel, ScaledType, SubsetIndex, SUBSET_ENUM_LIMIT};
use crate::scalar::{real, Real};
use simplex::{min_cost_decomposition, Columns};
use support::support_value;

/// The numeric bracket enumerates hull geometry and is capped in dimension.
pub const NUMERIC_K_LIMIT: usize = 6;

/// A boundary point of the admissible region along a sampled direction.
#[derive(Clone, Debug)]
pub struct BoundarySample<F> {
    /// Unit 1-norm nonnegative direction.
    pub direction: ScaledType<F>,
    /// Exit radius along the direction.
    pub exit_t: F,
    /// `exit_t * direction`.
    pub point: ScaledType<F>,
    /// Subset whose exponent vanishes at the exit.
    pub binding: SubsetIndex,
}

/// Which path produced a [`CStarResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// The ray point itself is admissible; the certificate is that point.
    InRegion,
    /// The optimum lies on the hull strictly outside the region.
    OnHull,
    ClosedFormUnion,
    ClosedFormHomogeneous,
    ClosedFormK1,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Regime::InRegion => "in_region",
            Regime::OnHull => "on_hull",
            Regime::ClosedFormUnion => "closed_form_union",
            Regime::ClosedFormHomogeneous => "closed_form_homogeneous",
            Regime::ClosedFormK1 => "closed_form_k1",
        };
        f.write_str(name)
    }
}

/// Certified bracket for the chromatic constant plus a convex-combination
/// certificate of admissible points recombining to `lower * alpha`.
#[derive(Clone, Debug)]
pub struct CStarResult<F> {
    pub lower: F,
    pub upper: F,
    pub certificate: Vec<(F, ScaledType<F>)>,
    pub regime: Regime,
    /// Set when the doubling budget ran out before the bracket closed to the
    /// requested tolerance; the bracket is still valid.
    pub budget_exceeded: bool,
}

#[derive(Clone, Debug)]
pub struct CStarOptions<F> {
    /// Initial simplex grid subdivisions per axis.
    pub resolution: usize,
    /// Target bracket width.
    pub tol: F,
    /// Resolution doublings before giving up.
    pub max_doublings: usize,
    /// Skip the closed-form fast paths and run the numeric pipeline.
    pub force_numeric: bool,
    /// Hard cap on boundary cloud size per pass.
    pub max_cloud_points: usize,
}

impl<F: Real> Default for CStarOptions<F> {
    fn default() -> Self {
        Self {
            resolution: 64,
            tol: real(1e-6),
            max_doublings: 12,
            force_numeric: false,
            max_cloud_points: 2_000_000,
        }
    }
}

/// Exact exit of the region along a nonnegative direction.
///
/// For each nonempty subset `I` of the direction's support,
/// `g(t d, I) = t S_I + t^2 Q_I / 2` with `S_I > 0` and `Q_I < 0`, so the
/// constraint holds exactly for `t <= -2 S_I / Q_I`; the exit is the minimum
/// over subsets, no iteration involved.
pub fn ray_exit<F: Real>(model: &BlockModel<F>, direction: &[F]) -> Result<BoundarySample<F>> {
    let k = model.k();
    if direction.len() != k {
        return Err(Error::Precondition(format!(
            "direction length {} does not match k = {k}",
            direction.len()
        )));
    }
    if k > SUBSET_ENUM_LIMIT {
        return Err(Error::TooManyParts {
            k,
            limit: SUBSET_ENUM_LIMIT,
        });
    }
    let mut total = F::zero();
    for (i, &d) in direction.iter().enumerate() {
        if !d.is_finite() || d < F::zero() {
            return Err(Error::Precondition(format!(
                "direction coordinate {i} must be finite and >= 0, got {d}"
            )));
        }
        total = total + d;
    }
    if !(total > F::zero()) {
        return Err(Error::Precondition(
            "direction must have positive total mass".into(),
        ));
    }
    let dir: Vec<F> = direction.iter().map(|&d| d / total).collect();
    let support: Vec<usize> = (0..k).filter(|&i| dir[i] > F::zero()).collect();
    let s = support.len();

    let two = real::<F>(2.0);
    let size = 1usize << s;
    let mut linear = vec![F::zero(); size];
    let mut quad = vec![F::zero(); size];
    let mut best_t = F::infinity();
    let mut best_mask = 0u32;
    for mask in 1..size {
        let a = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let i = support[a];
        let di = dir[i];
        let mut cross = F::zero();
        let mut r = rest;
        while r != 0 {
            let b = r.trailing_zeros() as usize;
            r &= r - 1;
            let j = support[b];
            cross = cross + dir[j] * model.log_one_minus(i, j);
        }
        linear[mask] = linear[rest] + di;
        quad[mask] = quad[rest] + di * di * model.log_one_minus(i, i) + two * di * cross;
        let t = -(two * linear[mask]) / quad[mask];
        if t < best_t {
            best_t = t;
            let mut global = 0u32;
            let mut m = mask;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                global |= 1 << support[b];
            }
            best_mask = global;
        }
    }
    let point: Vec<F> = dir.iter().map(|&d| d * best_t).collect();
    Ok(BoundarySample {
        direction: ScaledType::new(dir)?,
        exit_t: best_t,
        point: ScaledType::new(point)?,
        binding: SubsetIndex::from_mask(best_mask, k)?,
    })
}

/// Number of compositions of `total` into `k` nonnegative parts, saturating.
fn composition_count(total: usize, k: usize) -> u128 {
    // C(total + k - 1, k - 1)
    let mut value: u128 = 1;
    for i in 0..k - 1 {
        value = value.saturating_mul((total + i + 1) as u128) / (i + 1) as u128;
        if value > u128::from(u64::MAX) {
            return value;
        }
    }
    value
}

fn for_each_composition(total: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    let mut parts = vec![0usize; k];
    fn rec(total: usize, pos: usize, parts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if pos == parts.len() - 1 {
            parts[pos] = total;
            f(parts);
            return;
        }
        for m in 0..=total {
            parts[pos] = m;
            rec(total - m, pos + 1, parts, f);
        }
    }
    rec(total, 0, &mut parts, f);
}

/// Deterministic boundary sampling: the uniform grid on the unit 1-norm
/// simplex with `resolution` subdivisions per axis (the grid corners are the
/// coordinate axes), each mapped through [`ray_exit`].
pub fn boundary_cloud<F: Real>(
    model: &BlockModel<F>,
    resolution: usize,
) -> Result<Vec<BoundarySample<F>>> {
    if resolution == 0 {
        return Err(Error::Precondition("resolution must be >= 1".into()));
    }
    let k = model.k();
    if k == 1 {
        return Ok(vec![ray_exit(model, &[F::one()])?]);
    }
    let count = composition_count(resolution, k);
    if count > 50_000_000 {
        return Err(Error::Precondition(format!(
            "boundary cloud would hold {count} samples; lower the resolution"
        )));
    }
    let denom = real::<F>(resolution as f64);
    let mut samples = Vec::with_capacity(count as usize);
    let mut error = None;
    for_each_composition(resolution, k, &mut |parts| {
        if error.is_some() {
            return;
        }
        let dir: Vec<F> = parts
            .iter()
            .map(|&m| real::<F>(m as f64) / denom)
            .collect();
        match ray_exit(model, &dir) {
            Ok(sample) => samples.push(sample),
            Err(e) => error = Some(e),
        }
    });
    match error {
        Some(e) => Err(e),
        None => Ok(samples),
    }
}

/// Boundary trace for two-part models: rows `(c1, c2, binding_subset)`.
pub fn boundary_export<F: Real>(
    model: &BlockModel<F>,
    resolution: usize,
) -> Result<Vec<(F, F, SubsetIndex)>> {
    if model.k() != 2 {
        return Err(Error::DimensionUnsupported {
            k: model.k(),
            limit: 2,
        });
    }
    let cloud = boundary_cloud(model, resolution)?;
    Ok(cloud
        .into_iter()
        .map(|s| (s.point[0], s.point[1], s.binding))
        .collect())
}

/// Closed form for models whose parts are cheapest to color separately:
/// requires every pair to classify as concave or boundary, and returns
/// `1 / h` with `h = sum_j alpha_j / c(p_j)`.
pub fn union_case_cstar<F: Real>(model: &BlockModel<F>) -> Result<F> {
    for i in 0..model.k() {
        for j in i + 1..model.k() {
            if model.classify_pair(i, j)? == crate::model::PairClass::ConvexCompatible {
                return Err(Error::Precondition(format!(
                    "pair ({}, {}) is convex_compatible; the union closed form needs every \
                     pair concave or boundary",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let mut h = F::zero();
    for j in 0..model.k() {
        h = h + model.alpha()[j] / model.class_size(j);
    }
    Ok(F::one() / h)
}

/// Axis-point certificate for the union closed form: weights
/// `alpha_i / (h c(p_i))` on the points `c(p_i) e_i`.
pub(crate) fn union_certificate<F: Real>(model: &BlockModel<F>) -> Vec<(F, ScaledType<F>)> {
    let k = model.k();
    let mut h = F::zero();
    for j in 0..k {
        h = h + model.alpha()[j] / model.class_size(j);
    }
    (0..k)
        .map(|i| {
            let ci = model.class_size(i);
            let weight = model.alpha()[i] / (h * ci);
            let mut coords = vec![F::zero(); k];
            coords[i] = ci;
            (weight, ScaledType::new(coords).expect("axis point valid"))
        })
        .collect()
}

/// Closed form for the balanced two-value model: all diagonal probabilities
/// equal to `p`, all off-diagonal equal to `q <= p`, uniform weights.
pub fn homogeneous_cstar<F: Real>(model: &BlockModel<F>) -> Result<F> {
    let k = model.k();
    let kf = real::<F>(k as f64);
    let tol = real::<F>(1e-12).max(F::epsilon() * real(16.0));
    for (i, &a) in model.alpha().iter().enumerate() {
        if (a - F::one() / kf).abs() > tol {
            return Err(Error::Precondition(format!(
                "alpha_{} = {a} is not the balanced weight 1/{k}",
                i + 1
            )));
        }
    }
    let p = model.probability(0, 0);
    let mut q = p;
    for i in 0..k {
        if (model.probability(i, i) - p).abs() > tol {
            return Err(Error::Precondition(
                "diagonal probabilities are not all equal".into(),
            ));
        }
        for j in 0..k {
            if i == j {
                continue;
            }
            if i == 0 && j == 1 {
                q = model.probability(0, 1);
            }
            if (model.probability(i, j) - q).abs() > tol {
                return Err(Error::Precondition(
                    "off-diagonal probabilities are not all equal".into(),
                ));
            }
        }
    }
    if q > p + tol {
        return Err(Error::Precondition(format!(
            "homogeneous closed form needs p >= q, got p = {p}, q = {q}"
        )));
    }
    let ln_p = model.log_one_minus(0, 0);
    let ln_q = if k > 1 {
        model.log_one_minus(0, 1)
    } else {
        ln_p
    };
    Ok(-(real::<F>(2.0)) / (ln_p / kf + (kf - F::one()) / kf * ln_q))
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Computes a certified bracket for the chromatic constant.
pub fn c_star<F: Real>(model: &BlockModel<F>, opts: &CStarOptions<F>) -> Result<CStarResult<F>> {
    if !(opts.tol > F::zero()) {
        return Err(Error::Precondition(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if opts.resolution == 0 {
        return Err(Error::Precondition("resolution must be >= 1".into()));
    }
    let k = model.k();

    if !opts.force_numeric {
        if k == 1 {
            let value = model.class_size(0);
            let point = ScaledType::new(vec![value])?;
            return Ok(CStarResult {
                lower: value,
                upper: value,
                certificate: vec![(F::one(), point)],
                regime: Regime::ClosedFormK1,
                budget_exceeded: false,
            });
        }
        if model.all_pairs_concave_or_boundary() {
            let value = union_case_cstar(model)?;
            return Ok(CStarResult {
                lower: value,
                upper: value,
                certificate: union_certificate(model),
                regime: Regime::ClosedFormUnion,
                budget_exceeded: false,
            });
        }
        if let Ok(value) = homogeneous_cstar(model) {
            let point = model.along_ray(value);
            return Ok(CStarResult {
                lower: value,
                upper: value,
                certificate: vec![(F::one(), point)],
                regime: Regime::ClosedFormHomogeneous,
                budget_exceeded: false,
            });
        }
    }

    if k > NUMERIC_K_LIMIT {
        return Err(Error::DimensionUnsupported {
            k,
            limit: NUMERIC_K_LIMIT,
        });
    }
    numeric_bracket(model, opts)
}

/// The grid/LP/support pipeline behind [`c_star`].
fn numeric_bracket<F: Real>(
    model: &BlockModel<F>,
    opts: &CStarOptions<F>,
) -> Result<CStarResult<F>> {
    let k = model.k();
    let exit = ray_exit(model, model.alpha())?;

    let mut best_lower = exit.exit_t;
    let mut best_cert: Vec<(F, ScaledType<F>)> = vec![(F::one(), exit.point.clone())];
    let mut best_upper = F::infinity();
    let mut carried_starts: Vec<Vec<F>> = Vec::new();

    // Gradient of the binding constraint at the ray exit; for a locally
    // convex boundary this is the exact separating normal.
    let gradient_dual: Option<Vec<F>> = {
        let mut u = vec![F::zero(); k];
        for i in exit.binding.members() {
            let mut slope = F::one();
            for j in exit.binding.members() {
                slope = slope + exit.point[j] * model.log_one_minus(i, j);
            }
            u[i] = -slope;
        }
        let total = u.iter().fold(F::zero(), |acc, &x| acc + x.abs());
        if total > F::zero() && dot(&u, model.alpha()) > F::zero() {
            Some(u.iter().map(|&x| x / total).collect())
        } else {
            None
        }
    };
    // Hyperplane through the axis points; exact for union-type hulls.
    let axis_dual: Vec<F> = (0..k).map(|i| F::one() / model.class_size(i)).collect();

    let mut resolution = opts.resolution;
    let mut converged = false;
    for _pass in 0..=opts.max_doublings {
        if composition_count(resolution, k) > opts.max_cloud_points as u128 {
            break;
        }

        // Column set: exact axes first (identity start basis), then the ray
        // direction, then the interior grid.
        let mut columns = Columns::new(k);
        let mut radii: Vec<F> = Vec::new();
        let mut cloud: Vec<(Vec<F>, F)> = Vec::new();
        for i in 0..k {
            let mut axis = vec![F::zero(); k];
            axis[i] = F::one();
            let sample = ray_exit(model, &axis)?;
            columns.push(&axis);
            radii.push(sample.exit_t);
            cloud.push((axis, sample.exit_t));
        }
        {
            let dir = exit.direction.as_slice().to_vec();
            columns.push(&dir);
            radii.push(exit.exit_t);
            cloud.push((dir, exit.exit_t));
        }
        let denom = real::<F>(resolution as f64);
        let mut grid_error = None;
        for_each_composition(resolution, k, &mut |parts| {
            if grid_error.is_some() || parts.iter().any(|&m| m == resolution) {
                return;
            }
            let dir: Vec<F> = parts
                .iter()
                .map(|&m| real::<F>(m as f64) / denom)
                .collect();
            match ray_exit(model, &dir) {
                Ok(sample) => {
                    columns.push(&dir);
                    radii.push(sample.exit_t);
                    cloud.push((dir, sample.exit_t));
                }
                Err(e) => grid_error = Some(e),
            }
        });
        if let Some(e) = grid_error {
            return Err(e);
        }

        let costs: Vec<F> = radii.iter().map(|&r| F::one() / r).collect();
        let initial_basis: Vec<usize> = (0..k).collect();
        let mut duals: Vec<Vec<F>> = Vec::new();
        match min_cost_decomposition(&columns, &costs, model.alpha(), &initial_basis) {
            Ok(solution) => {
                let t = F::one() / solution.objective;
                if t > best_lower {
                    best_lower = t;
                    best_cert = solution
                        .basis
                        .iter()
                        .zip(&solution.values)
                        .filter(|(_, &nu)| nu > real(1e-14))
                        .map(|(&j, &nu)| {
                            let weight = t * nu * costs[j];
                            let point: Vec<F> =
                                columns.col(j).iter().map(|&d| d * radii[j]).collect();
                            (weight, ScaledType::new(point).expect("cloud point valid"))
                        })
                        .collect();
                }
                duals.push(solution.dual);
            }
            Err(_) => {
                // Keep the ray-exit lower bound and fall back to the
                // geometric dual candidates for this pass.
            }
        }
        if let Some(u) = &gradient_dual {
            duals.push(u.clone());
        }
        duals.push(axis_dual.clone());

        let mut next_starts: Vec<Vec<F>> = Vec::new();
        for u in &duals {
            let denom = dot(u, model.alpha());
            if !(denom > F::zero()) {
                continue;
            }
            let estimate = support_value(model, u, &cloud, &carried_starts);
            if !estimate.value.is_finite() {
                continue;
            }
            let candidate = estimate.value / denom;
            if candidate < best_upper {
                best_upper = candidate;
            }
            next_starts.push(estimate.argmax);
        }
        carried_starts = next_starts;

        if best_upper - best_lower <= opts.tol {
            converged = true;
            break;
        }
        resolution = resolution.saturating_mul(2);
    }

    // Both bounds approximate the same quantity; a dual estimate a few ulps
    // below the certified primal bound is floating noise, not a real
    // crossing.
    if best_upper < best_lower {
        debug_assert!(
            best_lower - best_upper <= real::<F>(1e-9) * (F::one() + best_lower.abs()),
            "bracket inverted beyond floating noise: lower {best_lower}, upper {best_upper}"
        );
        best_upper = best_lower;
    }

    let near_exit = best_lower - exit.exit_t <= real::<F>(1e-9) * (F::one() + exit.exit_t.abs());
    let (regime, certificate) = if near_exit {
        (Regime::InRegion, vec![(F::one(), exit.point.clone())])
    } else {
        (Regime::OnHull, best_cert)
    };
    Ok(CStarResult {
        lower: best_lower,
        upper: best_upper,
        certificate,
        regime,
        budget_exceeded: !converged,
    })
}
