//! Dense two-phase primal simplex for small feasibility/optimization
//! problems over free real variables.
//!
//! Problems have the form: maximize `c.x` subject to `A_ub x <= b_ub` and
//! `A_eq x = b_eq`, with `x` unconstrained in sign. Free variables are split
//! as `x = x+ - x-`; inequality rows get slacks; every row gets a phase-one
//! artificial. Pivoting uses Dantzig's rule for speed and falls back to
//! Bland's rule after a stall to guarantee termination on degenerate bases.

use crate::error::{Error, Result};

/// `maximize objective . x` subject to `row . x <= bound` for every row in
/// `ub_rows` and `row . x = bound` for every row in `eq_rows`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub ub_rows: Vec<(Vec<f64>, f64)>,
    pub eq_rows: Vec<(Vec<f64>, f64)>,
}

/// An optimal vertex and its objective value.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Total simplex pivots allowed across both phases.
const ITERATION_BUDGET: usize = 5_000;
/// Iterations without objective progress before switching to Bland's rule.
const STALL_LIMIT: usize = 50;
/// Residual infeasibility accepted at the end of phase one.
const PHASE_ONE_GATE: f64 = 1e-7;
/// Entering-column reduced-cost threshold and ratio-test pivot floor.
const PIVOT_EPS: f64 = 1e-9;

struct Tableau {
    /// `m x (width + 1)` constraint rows, last column is the rhs.
    rows: Vec<Vec<f64>>,
    /// Objective row in reduced-cost form, last entry is minus the value.
    obj: Vec<f64>,
    /// Basic column of each row.
    basis: Vec<usize>,
    width: usize,
    iterations: usize,
    bland: bool,
    stall: usize,
    last_value: f64,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let scale = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= scale;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        let factor = self.obj[c];
        if factor != 0.0 {
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations (minimization: enter while a reduced cost is
    /// negative) over the allowed entering columns. Returns `false` when the
    /// problem is unbounded in the current phase.
    fn solve(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<bool> {
        loop {
            let entering = if self.bland {
                (0..self.width).find(|&j| allowed(j) && self.obj[j] < -PIVOT_EPS)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..self.width {
                    if allowed(j) && self.obj[j] < -PIVOT_EPS {
                        if best.map_or(true, |(_, v)| self.obj[j] < v) {
                            best = Some((j, self.obj[j]));
                        }
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(c) = entering else {
                return Ok(true);
            };

            // Ratio test; ties broken toward the smallest basis index so the
            // Bland fallback is well defined.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][c];
                if a > PIVOT_EPS {
                    let ratio = self.rows[r][self.width] / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lv)) => {
                            ratio < lv - 1e-12
                                || (ratio < lv + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };

            self.pivot(r, c);
            self.iterations += 1;
            if self.iterations > ITERATION_BUDGET {
                return Err(Error::LpBudgetExhausted {
                    budget: ITERATION_BUDGET,
                });
            }

            let value = -self.obj[self.width];
            if (value - self.last_value).abs() < 1e-12 {
                self.stall += 1;
                if self.stall > STALL_LIMIT {
                    self.bland = true;
                }
            } else {
                self.stall = 0;
                self.last_value = value;
            }
        }
    }
}

/// Solves the program, returning an optimal vertex.
pub fn maximize(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.objective.len();
    for (row, _) in lp.ub_rows.iter().chain(&lp.eq_rows) {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                left: row.len(),
                right: n,
            });
        }
    }
    let m_ub = lp.ub_rows.len();
    let m = m_ub + lp.eq_rows.len();
    // Columns: x+ (n) | x- (n) | slacks (m_ub) | artificials (m) | rhs.
    let width = 2 * n + m_ub + m;
    let slack0 = 2 * n;
    let art0 = 2 * n + m_ub;

    let mut rows = Vec::with_capacity(m);
    for (i, (row, b)) in lp.ub_rows.iter().chain(&lp.eq_rows).enumerate() {
        let mut t = vec![0.0; width + 1];
        let flip = if *b < 0.0 { -1.0 } else { 1.0 };
        for (j, &a) in row.iter().enumerate() {
            t[j] = flip * a;
            t[n + j] = -flip * a;
        }
        if i < m_ub {
            t[slack0 + i] = flip;
        }
        t[art0 + i] = 1.0;
        t[width] = flip * b;
        rows.push(t);
    }

    let mut tab = Tableau {
        rows,
        obj: vec![0.0; width + 1],
        basis: (0..m).map(|i| art0 + i).collect(),
        width,
        iterations: 0,
        bland: false,
        stall: 0,
        last_value: 0.0,
    };

    // Phase one: minimize the sum of artificials. Reduced costs start as
    // c_j - sum of basic rows (each artificial has unit cost).
    for j in art0..art0 + m {
        tab.obj[j] = 1.0;
    }
    for r in 0..m {
        let row = tab.rows[r].clone();
        for (v, p) in tab.obj.iter_mut().zip(&row) {
            *v -= p;
        }
    }
    let bounded = tab.solve(&|_| true)?;
    debug_assert!(bounded, "phase one is bounded below by zero");
    let infeasibility = -tab.obj[width];
    if infeasibility > PHASE_ONE_GATE {
        return Err(Error::LpInfeasible {
            phase_one: infeasibility,
        });
    }

    // Drive out any artificial still basic (at zero level) when a structural
    // pivot exists; rows with none are redundant and keep a frozen artificial.
    for r in 0..m {
        if tab.basis[r] >= art0 {
            if let Some(c) = (0..art0).find(|&j| tab.rows[r][j].abs() > PIVOT_EPS) {
                tab.pivot(r, c);
            }
        }
    }

    // Phase two: maximize c.x, i.e. minimize (-c).x, artificials banned.
    tab.obj = vec![0.0; width + 1];
    for j in 0..n {
        tab.obj[j] = -lp.objective[j];
        tab.obj[n + j] = lp.objective[j];
    }
    for r in 0..m {
        let b = tab.basis[r];
        let factor = tab.obj[b];
        if factor != 0.0 {
            let row = tab.rows[r].clone();
            for (v, p) in tab.obj.iter_mut().zip(&row) {
                *v -= factor * p;
            }
        }
    }
    tab.bland = false;
    tab.stall = 0;
    tab.last_value = -tab.obj[width];
    let bounded = tab.solve(&|j| j < art0)?;
    if !bounded {
        return Err(Error::LpUnbounded);
    }

    let mut x = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        let v = tab.rows[r][width];
        if b < n {
            x[b] += v;
        } else if b < 2 * n {
            x[b - n] -= v;
        }
    }
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, objective })
}
