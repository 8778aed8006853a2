//! Dense simplex solver for the discretized extremal problem:
//! `maximize c·x subject to -1 <= (S x)_i <= 1` over free `x`.
//!
//! The two-sided rows are doubled into `G = [S; -S]`, `G x <= 1`, and the
//! solve runs on the dual `min 1ᵀy, Gᵀ y = c, y >= 0` — an (n+1)-row
//! tableau instead of a grid-sized one. Two phases, Bland's rule for
//! anti-cycling. The optimal basis names the active primal constraints;
//! the primal vertex is recovered from that square system and verified
//! against the dual objective and feasibility before it is returned.

use crate::error::{Error, Result};
use crate::linalg;

const EPS: f64 = 1e-9;
const MAX_ITERATIONS: usize = 200_000;

/// An optimal vertex of the discretized extremal problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub coefficients: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

struct Tableau {
    /// rows x (columns + rhs), row-major; column count excludes rhs.
    rows: Vec<Vec<f64>>,
    reduced: Vec<f64>,
    basis: Vec<usize>,
    columns: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row && r[col].abs() > 0.0 {
                let factor = r[col];
                for (v, p) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        let factor = self.reduced[col];
        if factor != 0.0 {
            for (v, p) in self.reduced.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
        }
        self.basis[row] = col;
    }

    /// Two-pass ratio test: exact minimum first, then Bland's
    /// smallest-basis-index tie-break inside a tight relative band.
    /// Returns the leaving row and whether the step is degenerate.
    fn ratio_test(&self, col: usize) -> Option<(usize, bool)> {
        let mut min_ratio = f64::INFINITY;
        for r in &self.rows {
            if r[col] > EPS {
                min_ratio = min_ratio.min(r[self.columns].max(0.0) / r[col]);
            }
        }
        if !min_ratio.is_finite() {
            return None;
        }
        let band = min_ratio + 1e-12 * (1.0 + min_ratio);
        let mut leaving: Option<usize> = None;
        for (i, r) in self.rows.iter().enumerate() {
            if r[col] > EPS && r[self.columns].max(0.0) / r[col] <= band {
                let better = match leaving {
                    None => true,
                    Some(best) => self.basis[i] < self.basis[best],
                };
                if better {
                    leaving = Some(i);
                }
            }
        }
        leaving.map(|row| (row, min_ratio <= 1e-12))
    }

    /// One simplex phase. Entering column: most negative reduced cost
    /// (Dantzig) while progress is made, switching to Bland's
    /// smallest-index rule after a run of degenerate pivots to break
    /// cycles. Both phases minimize objectives bounded below, so a column
    /// with a tiny negative reduced cost and no admissible pivot row is
    /// numerical noise and gets skipped; a decidedly negative one is a
    /// genuine inconsistency.
    fn run_phase(&mut self, allowed: impl Fn(usize) -> bool, budget: &mut usize) -> Result<usize> {
        let mut iterations = 0;
        let mut degenerate_run = 0usize;
        'outer: loop {
            let bland = degenerate_run > 40;
            let mut candidates: Vec<usize> = (0..self.columns)
                .filter(|&j| allowed(j) && self.reduced[j] < -EPS)
                .collect();
            if !bland {
                candidates.sort_by(|&a, &b| self.reduced[a].total_cmp(&self.reduced[b]));
            }
            let mut worst_unpivotable = 0.0f64;
            for &col in &candidates {
                match self.ratio_test(col) {
                    Some((row, degenerate)) => {
                        self.pivot(row, col);
                        degenerate_run = if degenerate { degenerate_run + 1 } else { 0 };
                        iterations += 1;
                        if *budget == 0 {
                            return Err(Error::LpMaxIterations(MAX_ITERATIONS));
                        }
                        *budget -= 1;
                        continue 'outer;
                    }
                    None => worst_unpivotable = worst_unpivotable.max(-self.reduced[col]),
                }
            }
            if worst_unpivotable > 1e-6 {
                return Err(Error::LpInconsistent(format!(
                    "column with reduced cost -{worst_unpivotable:e} has no pivot row"
                )));
            }
            return Ok(iterations);
        }
    }
}

/// Maximizes `objective·x` subject to `|(samples·x)_i| <= 1` for every row.
/// Requires `samples` to have full column rank (a Chebyshev-node grid with
/// at least `n+1` points guarantees it); rank-deficient inputs surface as
/// an unbounded error.
pub fn maximize_linear_over_unit_ball(
    objective: &[f64],
    samples: &[Vec<f64>],
) -> Result<LpSolution> {
    let n = objective.len();
    if n == 0 || samples.is_empty() || samples.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples.len() as f64,
            reason: "need a nonempty matrix matching the objective length",
        });
    }
    let m = samples.len();
    let dual_cols = 2 * m;
    let columns = dual_cols + n;

    // Constraint rows: sum_j y_j g_j = c with g_j = samples[j] (j < m) and
    // -samples[j-m] (j >= m). Rows with negative rhs are flipped so the
    // artificial basis starts feasible.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let sign = if objective[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; columns + 1];
        for j in 0..m {
            row[j] = sign * samples[j][i];
            row[m + j] = -sign * samples[j][i];
        }
        row[dual_cols + i] = 1.0;
        row[columns] = sign * objective[i];
        rows.push(row);
    }

    // Phase 1: drive out the artificials. Reduced costs of the dual
    // columns start at minus their column sums.
    let mut reduced = vec![0.0; columns + 1];
    for j in 0..dual_cols {
        reduced[j] = -rows.iter().map(|r| r[j]).sum::<f64>();
    }
    reduced[columns] = -rows.iter().map(|r| r[columns]).sum::<f64>();

    let mut tableau = Tableau {
        rows,
        reduced,
        basis: (dual_cols..columns).collect(),
        columns,
    };
    let mut budget = MAX_ITERATIONS;
    let mut iterations = tableau.run_phase(|j| j < dual_cols, &mut budget)?;

    let infeasibility = -tableau.reduced[columns];
    if infeasibility > 1e-7 {
        // Dual infeasible means the primal is unbounded, which only happens
        // when the sample matrix is rank deficient.
        return Err(Error::LpUnbounded);
    }
    // Pivot any zero-level artificials out of the basis.
    for row in 0..n {
        if tableau.basis[row] >= dual_cols {
            let col = (0..dual_cols).find(|&j| tableau.rows[row][j].abs() > 1e-9);
            match col {
                Some(col) => {
                    tableau.pivot(row, col);
                    iterations += 1;
                }
                None => {
                    return Err(Error::LpInconsistent(
                        "redundant dual row: sample matrix is rank deficient".into(),
                    ))
                }
            }
        }
    }

    // Phase 2: minimize the actual dual objective (all dual costs are 1).
    for j in 0..dual_cols {
        tableau.reduced[j] = 1.0 - tableau.rows.iter().map(|r| r[j]).sum::<f64>();
    }
    for j in dual_cols..columns {
        tableau.reduced[j] = f64::INFINITY;
    }
    tableau.reduced[columns] = -tableau
        .rows
        .iter()
        .map(|r| r[columns])
        .sum::<f64>();
    iterations += tableau.run_phase(|j| j < dual_cols, &mut budget)?;

    let dual_value: f64 = tableau.rows.iter().map(|r| r[columns]).sum();

    // The optimal basis lists the active primal constraints g_j x = 1;
    // recover the vertex from that square system.
    let active: Vec<Vec<f64>> = tableau
        .basis
        .iter()
        .map(|&j| {
            if j < m {
                samples[j].clone()
            } else {
                samples[j - m].iter().map(|v| -v).collect()
            }
        })
        .collect();
    let x = linalg::solve(active, vec![1.0; n])?;

    let value: f64 = objective.iter().zip(&x).map(|(c, xi)| c * xi).sum();
    if (value - dual_value).abs() > 1e-7 * (1.0 + dual_value.abs()) {
        return Err(Error::LpInconsistent(format!(
            "primal value {value} disagrees with dual optimum {dual_value}"
        )));
    }
    let worst = samples
        .iter()
        .map(|row| row.iter().zip(&x).map(|(a, xi)| a * xi).sum::<f64>().abs())
        .fold(0.0f64, f64::max);
    if worst > 1.0 + 1e-7 {
        return Err(Error::LpInconsistent(format!(
            "recovered vertex violates the unit ball by {:e}",
            worst - 1.0
        )));
    }

    Ok(LpSolution { coefficients: x, value, iterations })
}
