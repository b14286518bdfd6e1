//! Dense two-phase simplex for small minimisation LPs.
//!
//! Pricing is Dantzig's largest-coefficient rule; after a run of degenerate
//! pivots it falls back to Bland's rule until the objective moves again.
//! Every optimal answer is checked against the original data (primal
//! feasibility, dual feasibility, duality gap) before it is returned.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const FEASIBILITY_TOL: f64 = 1e-7;
pub const OPTIMALITY_TOL: f64 = 1e-7;

const PIVOT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-12;
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// How far `x` is from satisfying the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// `min c·x` subject to linear rows and `x >= lower`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    lower: Vec<f64>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            lower: vec![0.0; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    /// Nonzeros in the constraint matrix.
    pub fn nnz(&self) -> usize {
        self.constraints.iter().map(|c| c.coeffs.len()).sum()
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) -> Result<()> {
        self.check_var(var, coeff)?;
        self.objective[var] = coeff;
        Ok(())
    }

    pub fn set_lower_bound(&mut self, var: usize, bound: f64) -> Result<()> {
        self.check_var(var, bound)?;
        self.lower[var] = bound;
        Ok(())
    }

    /// Adds a row; repeated indices are summed. Returns the row index.
    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize> {
        if !rhs.is_finite() {
            return Err(Error::Domain(format!("non-finite right-hand side {rhs}")));
        }
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs;
        sorted.sort_by_key(|&(j, _)| j);
        for (j, a) in sorted {
            self.check_var(j, a)?;
            match merged.last_mut() {
                Some((k, b)) if *k == j => *b += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.constraints.push(Constraint {
            coeffs: merged,
            relation,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    fn check_var(&self, var: usize, value: f64) -> Result<()> {
        if var >= self.num_vars {
            return Err(Error::Domain(format!(
                "variable {var} out of range (have {})",
                self.num_vars
            )));
        }
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite coefficient for variable {var}"
            )));
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.violation(x));
        let bounds = self.lower.iter().zip(x).map(|(l, v)| (l - v).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// CPLEX LP text for cross-checking with external solvers. Variables are
    /// named `x0, x1, ...` and rows `c0, c1, ...`.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        let terms: Vec<(usize, f64)> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| (j, *c))
            .collect();
        write_terms(&mut out, &terms);
        out.push_str("\nSubject To\n");
        for (i, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{i}:");
            write_terms(&mut out, &c.coeffs);
            let _ = writeln!(out, " {} {}", c.relation.symbol(), fmt_num(c.rhs));
        }
        out.push_str("Bounds\n");
        for (j, l) in self.lower.iter().enumerate() {
            let _ = writeln!(out, " x{j} >= {}", fmt_num(*l));
        }
        out.push_str("End\n");
        out
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

fn write_terms(out: &mut String, terms: &[(usize, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0 x0");
        return;
    }
    for (k, &(j, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 {
            " -"
        } else if k == 0 {
            ""
        } else {
            " +"
        };
        let _ = write!(out, "{sign} {} x{j}", fmt_num(a.abs()));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values (empty unless optimal).
    pub values: Vec<f64>,
    pub objective: f64,
    /// One multiplier per row, in the original row orientation (empty unless
    /// optimal).
    pub duals: Vec<f64>,
    pub pivots: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, pivots: usize) -> Self {
        let objective = match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::NAN,
        };
        LpSolution {
            status,
            values: Vec::new(),
            objective,
            duals: Vec::new(),
            pivots,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may not enter the basis.
    blocked: Vec<bool>,
    /// Oriented right-hand side and, per row, the column that started as its
    /// unit vector; together they recover `B^-1 b` after a perturbation.
    b0: Vec<f64>,
    identity_col: Vec<usize>,
    perturbed: bool,
    pivots: usize,
    limit: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, q: usize) {
        let p = self.rows[r][q];
        let inv = 1.0 / p;
        for v in self.rows[r].iter_mut() {
            if *v != 0.0 {
                *v *= inv;
            }
        }
        self.rhs[r] *= inv;
        self.rows[r][q] = 1.0;
        let support: Vec<usize> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, _)| j)
            .collect();
        let (before, rest) = self.rows.split_at_mut(r);
        let (prow, after) = rest.split_first_mut().expect("pivot row");
        let prhs = self.rhs[r];
        let others = before.iter_mut().enumerate().chain(
            after
                .iter_mut()
                .enumerate()
                .map(|(k, row)| (k + r + 1, row)),
        );
        for (i, row) in others {
            let f = row[q];
            if f == 0.0 {
                continue;
            }
            for &j in &support {
                let v = row[j] - f * prow[j];
                row[j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            row[q] = 0.0;
            let b = self.rhs[i] - f * prhs;
            self.rhs[i] = if b.abs() < DROP_TOL { 0.0 } else { b };
        }
        let f = self.cost[q];
        if f != 0.0 {
            for &j in &support {
                let v = self.cost[j] - f * prow[j];
                self.cost[j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            self.cost[q] = 0.0;
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    fn check_limit(&self) -> Result<()> {
        if self.pivots > self.limit {
            return Err(Error::Solver(format!("pivot limit {} reached", self.limit)));
        }
        Ok(())
    }

    /// Primal simplex on the current cost row. A long run of degenerate
    /// pivots first triggers a small positive shift of the basic values (a
    /// perturbation of `b`); if that is not allowed or does not help, Bland's
    /// rule takes over.
    fn primal(&mut self, may_perturb: bool) -> Result<Outcome> {
        let mut degenerate = 0usize;
        loop {
            self.check_limit()?;
            if degenerate >= DEGENERATE_RUN && may_perturb && !self.perturbed {
                self.perturb();
                degenerate = 0;
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let q = if bland {
                (0..self.cost.len()).find(|&j| !self.blocked[j] && self.cost[j] < -PIVOT_TOL)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for (j, &d) in self.cost.iter().enumerate() {
                    if !self.blocked[j] && d < -PIVOT_TOL && best.is_none_or(|(_, b)| d < b) {
                        best = Some((j, d));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(q) = q else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][q];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs[i].max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[k]
                            } else {
                                a > self.rows[k][q]
                            }
                        } else {
                            ratio < best
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, q);
        }
    }

    fn perturb(&mut self) {
        for (i, b) in self.rhs.iter_mut().enumerate() {
            // Deterministic pseudo-random factor in [0.5, 1.5).
            let u = ((i as u64).wrapping_mul(2_654_435_761) % 1000) as f64 / 1000.0;
            *b += 1e-6 * (1.0 + b.abs()) * (0.5 + u);
        }
        self.perturbed = true;
    }

    /// Replaces the (perturbed) basic values with `B^-1 b`.
    fn restore_rhs(&mut self) {
        for i in 0..self.rows.len() {
            let v: f64 = self
                .identity_col
                .iter()
                .zip(&self.b0)
                .map(|(&c, &b)| self.rows[i][c] * b)
                .sum();
            self.rhs[i] = if v.abs() < DROP_TOL { 0.0 } else { v };
        }
        self.perturbed = false;
    }

    /// Dual simplex pivots until the basic values are nonnegative. The cost
    /// row is dual feasible on entry and stays so.
    fn dual_cleanup(&mut self) -> Result<()> {
        loop {
            self.check_limit()?;
            let r = (0..self.rows.len())
                .filter(|&i| self.rhs[i] < -1e-9)
                .min_by(|&a, &b| self.rhs[a].total_cmp(&self.rhs[b]));
            let Some(r) = r else {
                // What is left is rounding noise.
                for b in self.rhs.iter_mut() {
                    if *b < 0.0 {
                        *b = 0.0;
                    }
                }
                return Ok(());
            };
            let q = (0..self.cost.len())
                .filter(|&j| !self.blocked[j] && self.rows[r][j] < -PIVOT_TOL)
                .min_by(|&a, &b| {
                    let ra = self.cost[a].max(0.0) / -self.rows[r][a];
                    let rb = self.cost[b].max(0.0) / -self.rows[r][b];
                    ra.total_cmp(&rb)
                        .then(self.rows[r][a].total_cmp(&self.rows[r][b]))
                });
            let Some(q) = q else {
                return Err(Error::Solver(format!(
                    "row {r} stays negative ({:e}) after removing the perturbation",
                    self.rhs[r]
                )));
            };
            self.pivot(r, q);
        }
    }

    fn optimize(&mut self) -> Result<Outcome> {
        let outcome = self.primal(true)?;
        if !self.perturbed {
            return Ok(outcome);
        }
        self.restore_rhs();
        if let Outcome::Unbounded = outcome {
            // A ray of the perturbed problem is a ray of the original one.
            return Ok(outcome);
        }
        self.dual_cleanup()?;
        self.primal(false)
    }
}

/// Solves `lp`. Numerical trouble is reported as [`Error::Solver`], never as
/// a wrong optimum.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars;
    let m = lp.constraints.len();

    // Shift x = x' + lower, and orient every row so that its rhs is >= 0.
    let mut flipped = vec![false; m];
    let mut rels = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let shift: f64 = c.coeffs.iter().map(|&(j, a)| a * lp.lower[j]).sum();
        let mut b = c.rhs - shift;
        let mut rel = c.relation;
        if b < 0.0 {
            b = -b;
            flipped[i] = true;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rels.push(rel);
        rhs.push(b);
    }

    // Columns: structural | one slack/surplus per inequality | one artificial per >= or = row.
    let n_slack = rels.iter().filter(|r| **r != Relation::Eq).count();
    let n_art = rels.iter().filter(|r| **r != Relation::Le).count();
    let width = n + n_slack + n_art;
    let mut rows = vec![vec![0.0; width]; m];
    let mut basis = vec![0; m];
    let mut identity_col = vec![0; m];
    let mut is_art = vec![false; width];
    let (mut s, mut a) = (n, n + n_slack);
    for (i, c) in lp.constraints.iter().enumerate() {
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        for &(j, v) in &c.coeffs {
            rows[i][j] = sign * v;
        }
        match rels[i] {
            Relation::Le => {
                rows[i][s] = 1.0;
                basis[i] = s;
                identity_col[i] = s;
                s += 1;
            }
            Relation::Ge => {
                rows[i][s] = -1.0;
                s += 1;
                rows[i][a] = 1.0;
                basis[i] = a;
                identity_col[i] = a;
                is_art[a] = true;
                a += 1;
            }
            Relation::Eq => {
                rows[i][a] = 1.0;
                basis[i] = a;
                identity_col[i] = a;
                is_art[a] = true;
                a += 1;
            }
        }
    }

    let original = rows.clone();
    let mut t = Tableau {
        rows,
        b0: rhs.clone(),
        rhs,
        cost: vec![0.0; width],
        basis,
        blocked: vec![false; width],
        identity_col: identity_col.clone(),
        perturbed: false,
        pivots: 0,
        limit: 50 * (m + width) + 1000,
    };

    if n_art > 0 {
        // Phase one: minimise the sum of artificials.
        for j in 0..width {
            if is_art[j] {
                t.cost[j] = 1.0;
            }
        }
        for i in 0..m {
            if is_art[t.basis[i]] {
                for j in 0..width {
                    t.cost[j] -= t.rows[i][j];
                }
            }
        }
        if let Outcome::Unbounded = t.optimize()? {
            return Err(Error::Solver("phase one reported unbounded".into()));
        }
        let infeasibility: f64 = (0..m)
            .filter(|&i| is_art[t.basis[i]])
            .map(|i| t.rhs[i])
            .sum();
        let scale = 1.0 + t.rhs.iter().cloned().fold(0.0, f64::max);
        if infeasibility > FEASIBILITY_TOL * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, t.pivots));
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if !is_art[t.basis[i]] {
                continue;
            }
            let q = (0..width)
                .filter(|&j| !is_art[j])
                .max_by(|&x, &y| t.rows[i][x].abs().total_cmp(&t.rows[i][y].abs()));
            if let Some(q) = q {
                if t.rows[i][q].abs() > PIVOT_TOL {
                    t.pivot(i, q);
                }
            }
        }
        for j in 0..width {
            t.blocked[j] = is_art[j];
        }
    }

    // Phase two.
    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(&lp.objective);
    for i in 0..m {
        let cb = cost[t.basis[i]];
        if cb != 0.0 {
            for j in 0..width {
                cost[j] -= cb * t.rows[i][j];
            }
        }
    }
    // Basic columns have exactly zero reduced cost.
    for &b in &t.basis {
        cost[b] = 0.0;
    }
    t.cost = cost;
    if let Outcome::Unbounded = t.optimize()? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, t.pivots));
    }

    // The tableau drifts over many pivots, so the final point and duals are
    // recomputed from the basis columns of the original data.
    let basis_matrix: Vec<Vec<f64>> = (0..m)
        .map(|i| t.basis.iter().map(|&c| original[i][c]).collect())
        .collect();
    let values = solve_dense(basis_matrix.clone(), t.b0.clone())
        .ok_or_else(|| Error::Solver("final basis is singular".into()))?;
    let transposed: Vec<Vec<f64>> = (0..m)
        .map(|k| (0..m).map(|i| basis_matrix[i][k]).collect())
        .collect();
    let basic_costs: Vec<f64> = t
        .basis
        .iter()
        .map(|&c| if c < n { lp.objective[c] } else { 0.0 })
        .collect();
    let y = solve_dense(transposed, basic_costs)
        .ok_or_else(|| Error::Solver("final basis is singular".into()))?;

    let mut x = lp.lower.clone();
    for (k, &c) in t.basis.iter().enumerate() {
        if c < n {
            x[c] += values[k].max(0.0);
        }
    }
    let duals: Vec<f64> = (0..m)
        .map(|i| if flipped[i] { -y[i] } else { y[i] })
        .collect();
    let objective = lp.objective_value(&x);
    certify(lp, &x, &duals, objective)?;
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values: x,
        objective,
        duals,
        pivots: t.pivots,
    })
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let (top, bottom) = a.split_at_mut(col + 1);
        let prow = &top[col];
        for (k, row) in bottom.iter_mut().enumerate() {
            let f = row[col] / prow[col];
            if f == 0.0 {
                continue;
            }
            for j in col..m {
                row[j] -= f * prow[j];
            }
            b[col + 1 + k] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Checks primal feasibility, dual feasibility and the duality gap on the
/// original (unshifted, unoriented) data.
fn certify(lp: &LinearProgram, x: &[f64], y: &[f64], objective: f64) -> Result<()> {
    for (i, c) in lp.constraints.iter().enumerate() {
        let v = c.violation(x);
        if v > FEASIBILITY_TOL * (1.0 + c.rhs.abs()) {
            return Err(Error::Solver(format!("row {i} violated by {v:e}")));
        }
    }
    for (j, (&l, &v)) in lp.lower.iter().zip(x).enumerate() {
        if l - v > FEASIBILITY_TOL * (1.0 + l.abs()) {
            return Err(Error::Solver(format!(
                "variable {j} below its bound by {:e}",
                l - v
            )));
        }
    }
    let scale = 1.0 + lp.objective.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for (i, c) in lp.constraints.iter().enumerate() {
        let wrong_sign = match c.relation {
            Relation::Le => y[i],
            Relation::Ge => -y[i],
            Relation::Eq => 0.0,
        };
        if wrong_sign > OPTIMALITY_TOL * scale {
            return Err(Error::Solver(format!(
                "dual {i} has the wrong sign ({:e})",
                y[i]
            )));
        }
    }
    let mut reduced = lp.objective.clone();
    for (i, c) in lp.constraints.iter().enumerate() {
        for &(j, a) in &c.coeffs {
            reduced[j] -= y[i] * a;
        }
    }
    if let Some((j, d)) = reduced
        .iter()
        .enumerate()
        .find(|(_, d)| **d < -OPTIMALITY_TOL * scale)
    {
        return Err(Error::Solver(format!(
            "reduced cost of variable {j} is {d:e}"
        )));
    }
    let dual_obj: f64 = lp
        .constraints
        .iter()
        .zip(y)
        .map(|(c, yi)| c.rhs * yi)
        .sum::<f64>()
        + lp.lower
            .iter()
            .zip(&reduced)
            .map(|(l, d)| l * d)
            .sum::<f64>();
    let gap = (objective - dual_obj).abs();
    if gap > OPTIMALITY_TOL * scale * (1.0 + objective.abs()) {
        return Err(Error::Solver(format!(
            "duality gap {gap:e} (primal {objective}, dual {dual_obj})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-7 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn single_lower_bound_row() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1.0).unwrap();
        lp.add_constraint(vec![(0, 1.0)], Relation::Ge, 3.0)
            .unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.values[0], 3.0) && close(s.objective, 3.0));
        assert!(close(s.duals[0], 1.0));
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new(1);
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, 0.0)
            .unwrap();
        lp.add_constraint(vec![(0, 1.0)], Relation::Ge, 1.0)
            .unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, -1.0).unwrap();
        lp.add_constraint(vec![(0, 1.0), (1, -1.0)], Relation::Le, 1.0)
            .unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  → 36 at (2, 6).
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, -3.0).unwrap();
        lp.set_objective(1, -5.0).unwrap();
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, 4.0)
            .unwrap();
        lp.add_constraint(vec![(1, 2.0)], Relation::Le, 12.0)
            .unwrap();
        lp.add_constraint(vec![(0, 3.0), (1, 2.0)], Relation::Le, 18.0)
            .unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.objective, -36.0));
        assert!(close(s.values[0], 2.0) && close(s.values[1], 6.0));
    }

    #[test]
    fn equality_rows_and_lower_bounds() {
        // min x + 2y, x + y = 5, x >= 1, y >= 2, x <= 2  → x=2, y=3.
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0).unwrap();
        lp.set_objective(1, 2.0).unwrap();
        lp.set_lower_bound(0, 1.0).unwrap();
        lp.set_lower_bound(1, 2.0).unwrap();
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 5.0)
            .unwrap();
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, 2.0)
            .unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.objective, 8.0), "{}", s.objective);
        assert!(close(s.values[0], 2.0));
    }

    #[test]
    fn redundant_equalities_keep_artificials_at_zero() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0).unwrap();
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0)
            .unwrap();
        lp.add_constraint(vec![(0, 2.0), (1, 2.0)], Relation::Eq, 2.0)
            .unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.objective, 0.0) && close(s.values[1], 1.0));
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // -x <= -2 means x >= 2.
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1.0).unwrap();
        lp.add_constraint(vec![(0, -1.0)], Relation::Le, -2.0)
            .unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.objective, 2.0));
        assert!(close(s.duals[0], -1.0));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under a naive largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        for (j, c) in [-0.75, 150.0, -0.02, 6.0].into_iter().enumerate() {
            lp.set_objective(j, c).unwrap();
        }
        lp.add_constraint(
            vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)],
            Relation::Le,
            0.0,
        )
        .unwrap();
        lp.add_constraint(
            vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)],
            Relation::Le,
            0.0,
        )
        .unwrap();
        lp.add_constraint(vec![(2, 1.0)], Relation::Le, 1.0)
            .unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.objective, -0.05), "{}", s.objective);
    }

    #[test]
    fn bad_input_is_rejected() {
        let mut lp = LinearProgram::new(1);
        assert!(lp
            .add_constraint(vec![(1, 1.0)], Relation::Le, 1.0)
            .is_err());
        assert!(lp.set_objective(0, f64::NAN).is_err());
        assert!(lp
            .add_constraint(vec![(0, 1.0)], Relation::Le, f64::INFINITY)
            .is_err());
    }

    #[test]
    fn lp_text_export() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 2.0).unwrap();
        lp.set_objective(1, -1.0).unwrap();
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Ge, 1.0)
            .unwrap();
        let text = lp.to_lp_format();
        assert!(text.starts_with("Minimize\n obj: 2.0 x0 - 1.0 x1\n"));
        assert!(text.contains(" c0: 1.0 x0 + 1.0 x1 >= 1.0\n"));
        assert!(text.ends_with("End\n"));
    }

    proptest! {
        #[test]
        fn scaling_objective_scales_value(
            c in prop::collection::vec(0.1f64..5.0, 3),
            rows in prop::collection::vec((prop::collection::vec(0.0f64..3.0, 3), 1.0f64..5.0), 1..5),
            k in 0.1f64..10.0,
        ) {
            let build = |scale: f64| {
                let mut lp = LinearProgram::new(3);
                for (j, cj) in c.iter().enumerate() {
                    lp.set_objective(j, cj * scale).unwrap();
                }
                for (a, b) in &rows {
                    lp.add_constraint(a.iter().cloned().enumerate().collect(), Relation::Ge, *b).unwrap();
                }
                solve_lp(&lp).unwrap()
            };
            let base = build(1.0);
            let scaled = build(k);
            prop_assert_eq!(base.status, scaled.status);
            if base.status == LpStatus::Optimal {
                prop_assert!(close(scaled.objective, k * base.objective));
            }
        }
    }
}
