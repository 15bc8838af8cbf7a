//! Dense two-phase simplex for small linear programs of the form
//!
//! ```text
//! maximize c·x   subject to   A x <= b,   x >= 0
//! ```
//!
//! with `b` of arbitrary sign. Phase one introduces artificial variables
//! for rows whose slack cannot start basic and minimizes their sum;
//! phase two optimizes the real objective. Pivoting uses Dantzig's rule
//! and falls back to Bland's rule after a fixed number of iterations so
//! degenerate programs cannot cycle. Sizes here are a few hundred rows
//! and columns, well within dense-tableau territory.

use thiserror::Error;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("no feasible point satisfies the constraints")]
    Infeasible,
    #[error("objective is unbounded above")]
    Unbounded,
    #[error("pivoting stalled after {0} iterations")]
    Stalled(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Optimal structural variables, length = |c|.
    pub x: Vec<f64>,
    /// Objective value c·x at the optimum. Consumers re-derive game
    /// values from the strategy itself; the objective is kept for
    /// direct checks of the solver.
    #[cfg_attr(not(test), allow(dead_code))]
    pub value: f64,
}

struct Tableau {
    /// rows[i] holds the coefficients over all columns, then the rhs.
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    cols: usize,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = 1.0 / self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, &p) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for (v, &p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
        }
        self.basis[row] = col;
    }

    /// Entering column under Dantzig (most negative reduced cost) or
    /// Bland (lowest index) once `bland` is set.
    fn entering(&self, allowed: usize, bland: bool) -> Option<usize> {
        if bland {
            (0..allowed).find(|&j| self.obj[j] < -COST_TOL)
        } else {
            let mut best = None;
            let mut best_val = -COST_TOL;
            for j in 0..allowed {
                if self.obj[j] < best_val {
                    best_val = self.obj[j];
                    best = Some(j);
                }
            }
            best
        }
    }

    /// Ratio test; ties prefer the row whose basic variable has the
    /// smallest column index (anti-cycling with Bland's rule).
    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows.len() {
            let a = self.rows[i][col];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(i) / a;
            match best {
                None => best = Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - PIVOT_TOL
                        || (ratio < br + PIVOT_TOL && self.basis[i] < self.basis[bi])
                    {
                        best = Some((i, ratio));
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs pivots until no entering column remains among the first
    /// `allowed` columns.
    fn optimize(&mut self, allowed: usize) -> Result<(), SimplexError> {
        let switch_at = 5 * (self.rows.len() + self.cols);
        let cap = 50 * (self.rows.len() + self.cols) + 1000;
        for iter in 0..cap {
            let Some(col) = self.entering(allowed, iter >= switch_at) else {
                return Ok(());
            };
            let Some(row) = self.leaving(col) else {
                return Err(SimplexError::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(SimplexError::Stalled(cap))
    }
}

/// Solves `maximize c·x  s.t.  A x <= b, x >= 0`.
pub fn solve_lp(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution, SimplexError> {
    let n = c.len();
    let m = a.len();
    if b.len() != m {
        return Err(SimplexError::Shape(format!("{} rows vs {} rhs entries", m, b.len())));
    }
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(SimplexError::Shape(format!("row {i} has {} entries, want {n}", row.len())));
        }
    }

    // Columns: n structural, m slacks, then one artificial per negative-rhs
    // row. Negative-rhs rows are negated so every rhs starts nonnegative.
    let negative: Vec<bool> = b.iter().map(|&v| v < 0.0).collect();
    let n_art = negative.iter().filter(|&&v| v).count();
    let cols = n + m + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_seen = 0;
    for i in 0..m {
        let sign = if negative[i] { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols + 1];
        for j in 0..n {
            row[j] = sign * a[i][j];
        }
        row[n + i] = sign; // slack
        row[cols] = sign * b[i];
        if negative[i] {
            let art_col = n + m + art_seen;
            row[art_col] = 1.0;
            basis.push(art_col);
            art_seen += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }

    let mut t = Tableau { rows, obj: vec![0.0; cols + 1], cols, basis };

    if n_art > 0 {
        // Phase one: maximize -(sum of artificials).
        for j in (n + m)..cols {
            t.obj[j] = 1.0;
        }
        for i in 0..m {
            if t.basis[i] >= n + m {
                let row = t.rows[i].clone();
                for (v, &p) in t.obj.iter_mut().zip(&row) {
                    *v -= p;
                }
            }
        }
        t.optimize(cols)?;
        if t.obj[cols] < -FEAS_TOL {
            return Err(SimplexError::Infeasible);
        }
        // Drive zero-level artificials out of the basis; a row with no
        // non-artificial coefficient left is redundant and is dropped.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + m {
                if let Some(col) = (0..n + m).find(|&j| t.rows[i][j].abs() > PIVOT_TOL) {
                    t.pivot(i, col);
                } else {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
    }

    // Phase two on the real objective, artificial columns frozen out.
    t.obj = vec![0.0; cols + 1];
    for (o, &cj) in t.obj.iter_mut().zip(c) {
        *o = -cj;
    }
    for i in 0..t.rows.len() {
        let col = t.basis[i];
        let factor = t.obj[col];
        if factor != 0.0 {
            let row = t.rows[i].clone();
            for (v, &p) in t.obj.iter_mut().zip(&row) {
                *v -= factor * p;
            }
        }
    }
    t.optimize(n + m)?;

    let mut x = vec![0.0; n];
    for i in 0..t.rows.len() {
        if t.basis[i] < n {
            x[t.basis[i]] = t.rhs(i);
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-7, "{a} != {b}");
    }

    #[test]
    fn box_corner() {
        let sol = solve_lp(&[1.0, 1.0], &[vec![1.0, 0.0], vec![0.0, 1.0]], &[2.0, 3.0]).unwrap();
        assert_close(sol.value, 5.0);
        assert_close(sol.x[0], 2.0);
        assert_close(sol.x[1], 3.0);
    }

    #[test]
    fn interior_vertex() {
        let sol = solve_lp(
            &[2.0, 3.0],
            &[vec![1.0, 1.0], vec![1.0, 3.0]],
            &[4.0, 6.0],
        )
        .unwrap();
        assert_close(sol.value, 9.0);
        assert_close(sol.x[0], 3.0);
        assert_close(sol.x[1], 1.0);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // x >= 2 encoded as -x <= -2
        let sol = solve_lp(&[1.0], &[vec![-1.0], vec![1.0]], &[-2.0, 5.0]).unwrap();
        assert_close(sol.value, 5.0);
        let sol = solve_lp(&[-1.0], &[vec![-1.0], vec![1.0]], &[-2.0, 5.0]).unwrap();
        assert_close(sol.value, -2.0);
        assert_close(sol.x[0], 2.0);
    }

    #[test]
    fn infeasible_detected() {
        let r = solve_lp(&[1.0], &[vec![1.0], vec![-1.0]], &[1.0, -3.0]);
        assert!(matches!(r, Err(SimplexError::Infeasible)));
    }

    #[test]
    fn unbounded_detected() {
        let r = solve_lp(&[1.0, 0.0], &[vec![-1.0, 0.0], vec![0.0, 1.0]], &[5.0, 1.0]);
        assert!(matches!(r, Err(SimplexError::Unbounded)));
    }

    #[test]
    fn equality_via_paired_inequalities() {
        // x + y = 1 and maximize x - y: optimum (1, 0)
        let sol = solve_lp(
            &[1.0, -1.0],
            &[vec![1.0, 1.0], vec![-1.0, -1.0]],
            &[1.0, -1.0],
        )
        .unwrap();
        assert_close(sol.value, 1.0);
        assert_close(sol.x[0], 1.0);
        assert_close(sol.x[1], 0.0);
    }

    #[test]
    fn degenerate_cycling_prone_program() {
        // Beale's classic cycling example; optimum value is 1/20.
        let sol = solve_lp(
            &[0.75, -150.0, 0.02, -6.0],
            &[
                vec![0.25, -60.0, -0.04, 9.0],
                vec![0.5, -90.0, -0.02, 3.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            &[0.0, 0.0, 1.0],
        )
        .unwrap();
        assert_close(sol.value, 0.05);
    }

    /// Oracle for matrix games: value = max v s.t. row mix p guarantees
    /// at least v against every column, encoded with v >= 0 (all games
    /// here have positive value).
    fn game_value(matrix: &[Vec<f64>]) -> f64 {
        let rows = matrix.len();
        let cols = matrix[0].len();
        // variables: p_0..p_{rows-1}, v
        let mut a = Vec::new();
        let mut b = Vec::new();
        for j in 0..cols {
            let mut row = vec![0.0; rows + 1];
            for (i, m) in matrix.iter().enumerate() {
                row[i] = -m[j];
            }
            row[rows] = 1.0;
            a.push(row);
            b.push(0.0);
        }
        let mut sum_row = vec![1.0; rows];
        sum_row.push(0.0);
        a.push(sum_row.clone());
        b.push(1.0);
        for v in sum_row.iter_mut() {
            *v = -*v;
        }
        a.push(sum_row);
        b.push(-1.0);
        let mut c = vec![0.0; rows + 1];
        c[rows] = 1.0;
        solve_lp(&c, &a, &b).unwrap().value
    }

    #[test]
    fn matrix_game_values() {
        assert_close(game_value(&[vec![2.0, 0.0], vec![1.0, 3.0]]), 1.5);
        // rock-paper-scissors shifted by +1 has value 1 at the uniform mix
        assert_close(
            game_value(&[
                vec![1.0, 2.0, 0.0],
                vec![0.0, 1.0, 2.0],
                vec![2.0, 0.0, 1.0],
            ]),
            1.0,
        );
    }
}
