//! Dense revised simplex for the direction-decomposition LP.
//!
//! The primal bound for the chromatic constant reduces to
//!
//! ```text
//! minimize   sum_j nu_j / rho_j
//! subject to sum_j nu_j * delta_j = alpha,   nu >= 0,
//! ```
//!
//! where the columns `delta_j` are unit 1-norm directions sampled on the
//! boundary and `rho_j` their exit radii. The optimum equals `1 / t` for the
//! largest `t` with `t * alpha` in the convex hull of the sampled boundary
//! points, and a basic optimal solution is a Caratheodory certificate with at
//! most `k` atoms. The axis directions are always among the columns, so the
//! identity basis is a feasible start and no phase-1 is needed.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

pub(crate) struct LpSolution<F> {
    /// Optimal objective value.
    pub objective: F,
    /// Column indices of the optimal basis.
    pub basis: Vec<usize>,
    /// Values of the basic variables, aligned with `basis`.
    pub values: Vec<F>,
    /// Dual vector `y` with `y . delta_j <= cost_j` for every column.
    pub dual: Vec<F>,
}

/// Column-major store of `k`-dimensional columns.
pub(crate) struct Columns<F> {
    pub k: usize,
    pub data: Vec<F>,
}

impl<F: Real> Columns<F> {
    pub fn new(k: usize) -> Self {
        Self { k, data: Vec::new() }
    }

    pub fn push(&mut self, col: &[F]) {
        debug_assert_eq!(col.len(), self.k);
        self.data.extend_from_slice(col);
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.k
    }

    pub fn col(&self, j: usize) -> &[F] {
        &self.data[j * self.k..(j + 1) * self.k]
    }
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// LU factorization with partial pivoting of a small dense matrix.
struct Lu<F> {
    k: usize,
    lu: Vec<F>,
    perm: Vec<usize>,
}

impl<F: Real> Lu<F> {
    fn factor(k: usize, columns: &Columns<F>, basis: &[usize]) -> Option<Self> {
        let mut a = vec![F::zero(); k * k];
        for (pos, &j) in basis.iter().enumerate() {
            let col = columns.col(j);
            for row in 0..k {
                a[row * k + pos] = col[row];
            }
        }
        let mut perm: Vec<usize> = (0..k).collect();
        for col in 0..k {
            let mut pivot = col;
            let mut best = a[perm[col] * k + col].abs();
            for row in col + 1..k {
                let cand = a[perm[row] * k + col].abs();
                if cand > best {
                    best = cand;
                    pivot = row;
                }
            }
            if !(best > F::zero()) || !best.is_finite() {
                return None;
            }
            perm.swap(col, pivot);
            let diag = a[perm[col] * k + col];
            for row in col + 1..k {
                let factor = a[perm[row] * k + col] / diag;
                a[perm[row] * k + col] = factor;
                for c2 in col + 1..k {
                    let sub = factor * a[perm[col] * k + c2];
                    a[perm[row] * k + c2] = a[perm[row] * k + c2] - sub;
                }
            }
        }
        Some(Self { k, lu: a, perm })
    }

    /// Solves `B x = rhs`.
    fn solve(&self, rhs: &[F]) -> Vec<F> {
        let k = self.k;
        let mut x = vec![F::zero(); k];
        for row in 0..k {
            let mut acc = rhs[self.perm[row]];
            for col in 0..row {
                acc = acc - self.lu[self.perm[row] * k + col] * x[col];
            }
            x[row] = acc;
        }
        for row in (0..k).rev() {
            let mut acc = x[row];
            for col in row + 1..k {
                acc = acc - self.lu[self.perm[row] * k + col] * x[col];
            }
            x[row] = acc / self.lu[self.perm[row] * k + row];
        }
        x
    }

    /// Solves `B^T y = rhs`.
    fn solve_transpose(&self, rhs: &[F]) -> Vec<F> {
        let k = self.k;
        // Forward pass with U^T, then backward with L^T, undoing the
        // row permutation at the end.
        let mut y = vec![F::zero(); k];
        for row in 0..k {
            let mut acc = rhs[row];
            for col in 0..row {
                acc = acc - self.lu[self.perm[col] * k + row] * y[col];
            }
            y[row] = acc / self.lu[self.perm[row] * k + row];
        }
        for row in (0..k).rev() {
            let mut acc = y[row];
            for col in row + 1..k {
                acc = acc - self.lu[self.perm[col] * k + row] * y[col];
            }
            y[row] = acc;
        }
        let mut out = vec![F::zero(); k];
        for row in 0..k {
            out[self.perm[row]] = y[row];
        }
        out
    }
}

/// Minimizes `costs . nu` over `columns * nu = rhs, nu >= 0`, starting from
/// the feasible basis `initial_basis` (whose basis matrix must be
/// nonsingular, typically the identity from the axis columns).
pub(crate) fn min_cost_decomposition<F: Real>(
    columns: &Columns<F>,
    costs: &[F],
    rhs: &[F],
    initial_basis: &[usize],
) -> Result<LpSolution<F>> {
    let k = columns.k;
    debug_assert_eq!(initial_basis.len(), k);
    debug_assert_eq!(costs.len(), columns.len());
    let n_cols = columns.len();
    let mut basis = initial_basis.to_vec();
    let mut in_basis = vec![false; n_cols];
    for &j in &basis {
        in_basis[j] = true;
    }

    let opt_eps = real::<F>(1e-12);
    let piv_eps = real::<F>(1e-13);
    let max_iters = 1000 + 200 * k + n_cols / 8;
    let bland_after = 200 + 20 * k;

    let mut iter = 0usize;
    loop {
        let lu = Lu::factor(k, columns, &basis).ok_or_else(|| {
            Error::Precondition("simplex basis became numerically singular".into())
        })?;
        let values = lu.solve(rhs);
        let basis_costs: Vec<F> = basis.iter().map(|&j| costs[j]).collect();
        let dual = lu.solve_transpose(&basis_costs);

        // Pricing: Dantzig rule normally, Bland once the iteration count
        // suggests degeneracy cycling.
        let bland = iter >= bland_after;
        let mut entering = None;
        let mut most_negative = -opt_eps;
        for j in 0..n_cols {
            if in_basis[j] {
                continue;
            }
            let reduced = costs[j] - dot(&dual, columns.col(j));
            if reduced < most_negative {
                most_negative = reduced;
                entering = Some(j);
                if bland {
                    break;
                }
            }
        }
        let Some(entering) = entering else {
            let objective = dot(&basis_costs, &values);
            return Ok(LpSolution {
                objective,
                basis,
                values,
                dual,
            });
        };

        let direction = lu.solve(columns.col(entering));
        let mut leaving: Option<(usize, F)> = None;
        for (pos, &w) in direction.iter().enumerate() {
            if w > piv_eps {
                let ratio = values[pos].max(F::zero()) / w;
                let better = match leaving {
                    None => true,
                    // Bland-style tie break on the column index keeps the
                    // pivot sequence finite under degeneracy.
                    Some((best_pos, best_ratio)) => {
                        ratio < best_ratio - piv_eps
                            || (ratio <= best_ratio + piv_eps && basis[pos] < basis[best_pos])
                    }
                };
                if better {
                    leaving = Some((pos, ratio));
                }
            }
        }
        let Some((leave_pos, _)) = leaving else {
            return Err(Error::Precondition(
                "decomposition LP reported an unbounded ray".into(),
            ));
        };
        in_basis[basis[leave_pos]] = false;
        in_basis[entering] = true;
        basis[leave_pos] = entering;

        iter += 1;
        if iter > max_iters {
            return Err(Error::Precondition(format!(
                "decomposition LP exceeded {max_iters} iterations"
            )));
        }
    }
}
