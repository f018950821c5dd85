//! Exact-rational linear programming via two-phase primal simplex.
//!
//! Small and dense on purpose: the LPs built elsewhere in the crate have at
//! most a few dozen rows. Bland's rule keeps the pivot sequence finite even
//! on degenerate instances, and every comparison is an exact rational one,
//! so "optimal" here means optimal, not optimal-up-to-epsilon.

use crate::rational::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    Free,
    NonNegative,
}

/// One row `coeffs . v <= rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

/// Minimize `objective . v` subject to the constraint rows and sign bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub bounds: Vec<VarBound>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        solution: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    cost: Vec<Rational>,
    /// Holds `-(current objective value)` throughout.
    cost_rhs: Rational,
    basis: Vec<usize>,
}

enum LoopResult {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        debug_assert!(!p.is_zero());
        for v in self.rows[row].iter_mut() {
            *v /= &p;
        }
        self.rhs[row] /= &p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                *v -= &factor * pv;
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        let factor = self.cost[col].clone();
        if !factor.is_zero() {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= &factor * pv;
            }
            self.cost_rhs -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Zeroes the cost row over the current basic columns.
    fn price_out(&mut self) {
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            let factor = self.cost[b].clone();
            if factor.is_zero() {
                continue;
            }
            let row = self.rows[r].clone();
            let row_rhs = self.rhs[r].clone();
            for (v, pv) in self.cost.iter_mut().zip(&row) {
                *v -= &factor * pv;
            }
            self.cost_rhs -= &factor * &row_rhs;
        }
    }

    /// Bland's rule: enter the lowest-index improving column, leave by the
    /// minimum ratio with ties broken by lowest basic variable index.
    fn run_simplex(&mut self) -> LoopResult {
        loop {
            let entering = (0..self.width()).find(|&j| self.cost[j].is_negative());
            let Some(col) = entering else {
                return LoopResult::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][col];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return LoopResult::Unbounded;
            };
            self.pivot(row, col);
        }
    }
}

/// Solves the program exactly. Panics if the shape is inconsistent
/// (objective, bounds, and every constraint row must agree on the variable
/// count).
pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let n = lp.objective.len();
    assert_eq!(lp.bounds.len(), n, "bounds length mismatch");
    for c in &lp.constraints {
        assert_eq!(c.coeffs.len(), n, "constraint arity mismatch");
    }

    // Split free variables into positive and negative parts.
    let mut col_of_var: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut n_struct = 0usize;
    for b in &lp.bounds {
        match b {
            VarBound::NonNegative => {
                col_of_var.push((n_struct, None));
                n_struct += 1;
            }
            VarBound::Free => {
                col_of_var.push((n_struct, Some(n_struct + 1)));
                n_struct += 2;
            }
        }
    }

    let m = lp.constraints.len();
    let n_slack_end = n_struct + m;

    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    let mut needs_artificial: Vec<bool> = Vec::with_capacity(m);
    for (ci, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); n_slack_end];
        for (vi, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (pos, neg) = col_of_var[vi];
            row[pos] += a;
            if let Some(neg) = neg {
                row[neg] -= a;
            }
        }
        row[n_struct + ci] = Rational::one();
        let mut b = c.rhs.clone();
        if b.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            b = -b;
            needs_artificial.push(true);
        } else {
            needs_artificial.push(false);
        }
        rows.push(row);
        rhs.push(b);
    }

    let art_count = needs_artificial.iter().filter(|&&x| x).count();
    let total_width = n_slack_end + art_count;
    let mut basis = Vec::with_capacity(m);
    let mut next_art = n_slack_end;
    for (ci, row) in rows.iter_mut().enumerate() {
        row.resize(total_width, Rational::zero());
        if needs_artificial[ci] {
            row[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n_struct + ci);
        }
    }

    let mut t = Tableau {
        rows,
        rhs,
        cost: vec![Rational::zero(); total_width],
        cost_rhs: Rational::zero(),
        basis,
    };

    if art_count > 0 {
        for j in n_slack_end..total_width {
            t.cost[j] = Rational::one();
        }
        t.price_out();
        match t.run_simplex() {
            LoopResult::Optimal => {}
            LoopResult::Unbounded => unreachable!("phase one objective is bounded below by zero"),
        }
        if !t.cost_rhs.is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive leftover artificials out of the basis; rows that cannot be
        // pivoted are redundant and get dropped.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= n_slack_end {
                let col = (0..n_slack_end).find(|&j| !t.rows[r][j].is_zero());
                match col {
                    Some(col) => t.pivot(r, col),
                    None => {
                        t.rows.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in t.rows.iter_mut() {
            row.truncate(n_slack_end);
        }
    }

    t.cost = vec![Rational::zero(); n_slack_end];
    t.cost_rhs = Rational::zero();
    for (vi, c) in lp.objective.iter().enumerate() {
        let (pos, neg) = col_of_var[vi];
        t.cost[pos] = c.clone();
        if let Some(neg) = neg {
            t.cost[neg] = -c.clone();
        }
    }
    t.price_out();
    match t.run_simplex() {
        LoopResult::Unbounded => LpOutcome::Unbounded,
        LoopResult::Optimal => {
            let mut struct_sol = vec![Rational::zero(); n_struct];
            for (r, &b) in t.basis.iter().enumerate() {
                if b < n_struct {
                    struct_sol[b] = t.rhs[r].clone();
                }
            }
            let solution = col_of_var
                .iter()
                .map(|&(pos, neg)| match neg {
                    None => struct_sol[pos].clone(),
                    Some(neg) => &struct_sol[pos] - &struct_sol[neg],
                })
                .collect();
            LpOutcome::Optimal {
                value: -t.cost_rhs,
                solution,
            }
        }
    }
}
