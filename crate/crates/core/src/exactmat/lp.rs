use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{check_scale, ratser, MatError, RatMatrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub x: Option<Vec<Rational>>,
}

/// A small dense LP: maximize `cᵀx` subject to linear constraints, with each
/// variable either nonnegative (default) or free.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    num_vars: usize,
    free: Vec<bool>,
    objective: Vec<Rational>,
    constraints: Vec<(Vec<Rational>, Relation, Rational)>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            free: vec![false; num_vars],
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) -> Result<&mut Self, MatError> {
        if objective.len() != self.num_vars {
            return Err(MatError::DimensionMismatch(format!(
                "objective of length {} for {} variables",
                objective.len(),
                self.num_vars
            )));
        }
        self.objective = objective;
        Ok(self)
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<&mut Self, MatError> {
        if coeffs.len() != self.num_vars {
            return Err(MatError::DimensionMismatch(format!(
                "constraint of length {} for {} variables",
                coeffs.len(),
                self.num_vars
            )));
        }
        self.constraints.push((coeffs, relation, rhs));
        Ok(self)
    }

    /// Two-phase primal simplex on a dense tableau with Bland's rule.
    pub fn solve(&self) -> Result<LpSolution, MatError> {
        check_scale(self.constraints.len(), self.num_vars)?;

        // Structural columns: x⁺ for every variable, x⁻ for free ones.
        let mut column_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(self.num_vars);
        let mut n_struct = 0;
        for &free in &self.free {
            let plus = n_struct;
            n_struct += 1;
            let minus = free.then(|| {
                n_struct += 1;
                n_struct - 1
            });
            column_of.push((plus, minus));
        }
        let n_slack = self
            .constraints
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Eq)
            .count();
        let n_real = n_struct + n_slack;
        let m = self.constraints.len();
        let width = n_real + m + 1;

        let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
        let mut slack = n_struct;
        for (i, (coeffs, rel, rhs)) in self.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); width];
            for (j, a) in coeffs.iter().enumerate() {
                let (plus, minus) = column_of[j];
                row[plus] = a.clone();
                if let Some(minus) = minus {
                    row[minus] = -a;
                }
            }
            match rel {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[width - 1] = rhs.clone();
            if rhs.is_negative() {
                for x in row.iter_mut() {
                    *x = -&*x;
                }
            }
            row[n_real + i] = Rational::one();
            tab.push(row);
        }
        let mut basis: Vec<usize> = (n_real..n_real + m).collect();

        // Phase 1: minimize the sum of artificials.
        let mut reduced = vec![Rational::zero(); width];
        for row in &tab {
            for (r, x) in reduced.iter_mut().zip(row) {
                *r -= x;
            }
        }
        for r in reduced.iter_mut().skip(n_real).take(m) {
            *r = Rational::zero();
        }
        let bounded = run_simplex(&mut tab, &mut basis, &mut reduced, width - 1);
        debug_assert!(bounded, "phase one is always bounded");
        let phase_one_value = -reduced[width - 1].clone();
        if phase_one_value.is_positive() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: None,
                x: None,
            });
        }

        // Drive zero-level artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < tab.len() {
            if basis[i] >= n_real {
                match (0..n_real).find(|&j| !tab[i][j].is_zero()) {
                    Some(j) => pivot(&mut tab, &mut basis, &mut reduced, i, j),
                    None => {
                        tab.remove(i);
                        basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        // Phase 2: minimize -objective over the real columns only.
        let mut cost = vec![Rational::zero(); width];
        for (j, c) in self.objective.iter().enumerate() {
            let (plus, minus) = column_of[j];
            cost[plus] = -c;
            if let Some(minus) = minus {
                cost[minus] = c.clone();
            }
        }
        let mut reduced = cost.clone();
        reduced[width - 1] = Rational::zero();
        for (row, &b) in tab.iter().zip(&basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (r, x) in reduced.iter_mut().zip(row) {
                *r -= cb * x;
            }
        }
        if !run_simplex(&mut tab, &mut basis, &mut reduced, n_real) {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                value: None,
                x: None,
            });
        }

        let mut values = vec![Rational::zero(); n_real];
        for (row, &b) in tab.iter().zip(&basis) {
            if b < n_real {
                values[b] = row[width - 1].clone();
            }
        }
        let x: Vec<Rational> = column_of
            .iter()
            .map(|&(plus, minus)| match minus {
                Some(minus) => &values[plus] - &values[minus],
                None => values[plus].clone(),
            })
            .collect();
        let value = super::dot(&self.objective, &x);
        Ok(LpSolution {
            status: LpStatus::Optimal,
            value: Some(value),
            x: Some(x),
        })
    }
}

fn pivot(
    tab: &mut [Vec<Rational>],
    basis: &mut [usize],
    reduced: &mut [Rational],
    row: usize,
    col: usize,
) {
    let inv = tab[row][col].recip();
    for x in tab[row].iter_mut() {
        *x *= &inv;
    }
    let pivot_row = tab[row].clone();
    let eliminate = |target: &mut [Rational]| {
        let factor = target[col].clone();
        if factor.is_zero() {
            return;
        }
        for (x, p) in target.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *x -= &factor * p;
            }
        }
    };
    for (i, r) in tab.iter_mut().enumerate() {
        if i != row {
            eliminate(r);
        }
    }
    eliminate(reduced);
    basis[row] = col;
}

/// Runs Bland's rule over columns `0..allowed`. Returns false if unbounded.
fn run_simplex(
    tab: &mut [Vec<Rational>],
    basis: &mut [usize],
    reduced: &mut [Rational],
    allowed: usize,
) -> bool {
    let rhs = reduced.len() - 1;
    loop {
        let Some(enter) = (0..allowed).find(|&j| reduced[j].is_negative()) else {
            return true;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[enter];
            let better = match &leave {
                None => true,
                Some((best, best_ratio)) => {
                    ratio < *best_ratio || (ratio == *best_ratio && basis[i] < basis[*best])
                }
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((leave, _)) = leave else {
            return false;
        };
        pivot(tab, basis, reduced, leave, enter);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MaxMinWeightStatus {
    Optimal,
    Infeasible,
}

/// Result of maximizing the smallest weight in `A w = b, w ≥ t ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxMinWeight {
    pub status: MaxMinWeightStatus,
    #[serde(with = "ratser::option")]
    pub t_star: Option<Rational>,
    #[serde(with = "ratser::option_vec")]
    pub weights: Option<Vec<Rational>>,
}

/// Maximizes `t` subject to `A w = b` and `w_i ≥ t ≥ 0` for every weight.
///
/// With the two convexity rows of a hull-intersection encoding present in
/// `A`, the optimum is bounded by the reciprocal of the larger block size.
/// An unbounded program means the encoding is malformed.
pub fn lp_max_min_weight(a: &RatMatrix, b: &[Rational]) -> Result<MaxMinWeight, MatError> {
    if a.rows() != b.len() {
        return Err(MatError::DimensionMismatch(format!(
            "{} constraint rows with rhs of length {}",
            a.rows(),
            b.len()
        )));
    }
    // Substitute w = s + t·1 with s ≥ 0: A s + (A·1) t = b.
    let k = a.cols();
    let mut lp = LinearProgram::new(k + 1);
    for (i, rhs) in b.iter().enumerate() {
        let mut coeffs = a.row(i).to_vec();
        let row_sum = coeffs.iter().fold(Rational::zero(), |acc, x| acc + x);
        coeffs.push(row_sum);
        lp.add_constraint(coeffs, Relation::Eq, rhs.clone())?;
    }
    let mut objective = vec![Rational::zero(); k + 1];
    objective[k] = Rational::one();
    lp.maximize(objective)?;

    let sol = lp.solve()?;
    match sol.status {
        LpStatus::Optimal => {
            let mut x = sol.x.expect("optimal solution carries a point");
            let t = x.pop().expect("t variable present");
            let weights = x.into_iter().map(|s| s + &t).collect();
            Ok(MaxMinWeight {
                status: MaxMinWeightStatus::Optimal,
                t_star: Some(t),
                weights: Some(weights),
            })
        }
        LpStatus::Infeasible => Ok(MaxMinWeight {
            status: MaxMinWeightStatus::Infeasible,
            t_star: None,
            weights: None,
        }),
        LpStatus::Unbounded => Err(MatError::Unbounded),
    }
}
