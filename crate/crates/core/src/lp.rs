//! Exact two-phase tableau simplex.
//!
//! Pivoting uses the most negative reduced cost and falls back to Bland's
//! rule for the rest of a phase once a long run of degenerate pivots shows
//! up, so termination is guaranteed.

use std::fmt::Write as _;

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    /// `None` means free.
    pub lower: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `min c·x` subject to linear constraints and optional lower bounds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    vars: Vec<Variable>,
    objective: Vec<(usize, Rational)>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per declared variable (all zero unless optimal).
    pub values: Vec<Rational>,
    pub objective_value: Rational,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Merges repeated variables and drops zero coefficients.
fn normalize_terms(terms: impl IntoIterator<Item = (usize, Rational)>) -> Vec<(usize, Rational)> {
    let mut v: Vec<(usize, Rational)> = terms.into_iter().collect();
    v.sort_by_key(|(i, _)| *i);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Option<Rational>) -> usize {
        self.vars.push(Variable {
            name: name.into(),
            lower,
        });
        self.vars.len() - 1
    }

    pub fn add_nonneg(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, Some(Rational::zero()))
    }

    pub fn add_free(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, None)
    }

    pub fn add_constraint(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) {
        let terms = normalize_terms(terms);
        assert!(
            terms.iter().all(|(i, _)| *i < self.vars.len()),
            "constraint uses an undeclared variable"
        );
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
    }

    pub fn set_objective(&mut self, terms: impl IntoIterator<Item = (usize, Rational)>) {
        let terms = normalize_terms(terms);
        assert!(
            terms.iter().all(|(i, _)| *i < self.vars.len()),
            "objective uses an undeclared variable"
        );
        self.objective = terms;
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, Rational)] {
        &self.objective
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Whether `values` meets every bound and constraint exactly.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        let bounds = self
            .vars
            .iter()
            .zip(values)
            .all(|(v, x)| v.lower.as_ref().is_none_or(|l| x >= l));
        bounds
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.terms.iter().map(|(i, a)| a * &values[*i]).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn objective_at(&self, values: &[Rational]) -> Rational {
        self.objective.iter().map(|(i, c)| c * &values[*i]).sum()
    }

    /// Plain-text listing, one item per line:
    ///
    /// ```text
    /// var <name> >= <lower>      (or `var <name> free`)
    /// min: <c> <name> + ...
    /// c<k>: <a> <name> + ... <= | = | >= <rhs>
    /// ```
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let expr = |terms: &[(usize, Rational)]| -> String {
            if terms.is_empty() {
                return "0".to_string();
            }
            terms
                .iter()
                .map(|(i, c)| format!("{c} {}", self.vars[*i].name))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        for v in &self.vars {
            match &v.lower {
                Some(l) => writeln!(out, "var {} >= {l}", v.name),
                None => writeln!(out, "var {} free", v.name),
            }
            .expect("writing to a String");
        }
        writeln!(out, "min: {}", expr(&self.objective)).expect("writing to a String");
        for (k, c) in self.constraints.iter().enumerate() {
            writeln!(
                out,
                "c{k}: {} {} {}",
                expr(&c.terms),
                c.relation.symbol(),
                c.rhs
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn solve(&self) -> LpSolution {
        let sol = Tableau::solve(self);
        debug_assert!(!sol.is_optimal() || self.is_feasible(&sol.values));
        sol
    }
}

/// Degenerate pivots in a row before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

struct Tableau {
    /// Constraint rows; last entry of each row is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced-cost rows: phase-one objective and the real objective.
    cost: [Vec<Rational>; 2],
    n_cols: usize,
    artificial_from: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn solve(lp: &LinearProgram) -> LpSolution {
        // Column layout: one column per bounded variable, two per free one.
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(lp.vars.len());
        let mut n_struct = 0;
        for v in &lp.vars {
            if v.lower.is_some() {
                col_of.push((n_struct, None));
                n_struct += 1;
            } else {
                col_of.push((n_struct, Some(n_struct + 1)));
                n_struct += 2;
            }
        }
        // Shifted rows with non-negative right-hand sides.
        let mut shaped: Vec<(Vec<(usize, Rational)>, Relation, Rational)> = Vec::new();
        for c in &lp.constraints {
            let mut rhs = c.rhs.clone();
            let mut row = Vec::with_capacity(c.terms.len() + 1);
            for (i, a) in &c.terms {
                let (pos, neg) = col_of[*i];
                if let Some(l) = &lp.vars[*i].lower {
                    rhs -= a * l;
                }
                row.push((pos, a.clone()));
                if let Some(n) = neg {
                    row.push((n, -a));
                }
            }
            let mut rel = c.relation;
            if rhs.is_negative() {
                rhs = -rhs;
                for (_, a) in row.iter_mut() {
                    *a = -&*a;
                }
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            shaped.push((row, rel, rhs));
        }
        let n_slack = shaped.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let n_art = shaped.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let artificial_from = n_struct + n_slack;
        let n_cols = artificial_from + n_art;
        let width = n_cols + 1;

        let mut rows = Vec::with_capacity(shaped.len());
        let mut basis = Vec::with_capacity(shaped.len());
        let (mut next_slack, mut next_art) = (n_struct, artificial_from);
        for (terms, rel, rhs) in shaped {
            let mut row = vec![Rational::zero(); width];
            for (j, a) in terms {
                row[j] += a;
            }
            row[n_cols] = rhs;
            match rel {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = Rational::from_int(-1);
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }

        // Phase-one costs: minimize the artificial sum, expressed in the
        // non-basic columns.
        let mut phase1 = vec![Rational::zero(); width];
        for (r, &b) in rows.iter().zip(&basis) {
            if b >= artificial_from {
                for (j, a) in r.iter().enumerate() {
                    if j < artificial_from || j == n_cols {
                        phase1[j] -= a;
                    }
                }
            }
        }
        let mut phase2 = vec![Rational::zero(); width];
        for (i, c) in &lp.objective {
            let (pos, neg) = col_of[*i];
            phase2[pos] += c;
            if let Some(n) = neg {
                phase2[n] -= c;
            }
        }
        // Objective constant from lower-bound shifts lives in the rhs slot
        // as its negation.
        let mut shift = Rational::zero();
        for (i, c) in &lp.objective {
            if let Some(l) = &lp.vars[*i].lower {
                shift += c * l;
            }
        }

        let mut t = Tableau {
            rows,
            basis,
            cost: [phase1, phase2],
            n_cols,
            artificial_from,
        };
        let infeasible = || LpSolution {
            status: LpStatus::Infeasible,
            values: vec![Rational::zero(); lp.vars.len()],
            objective_value: Rational::zero(),
        };

        if n_art > 0 {
            t.run_phase(0, n_cols);
            if !t.cost[0][n_cols].is_zero() {
                return infeasible();
            }
            t.drive_out_artificials();
        }
        if let PhaseEnd::Unbounded = t.run_phase(1, artificial_from) {
            return LpSolution {
                status: LpStatus::Unbounded,
                values: vec![Rational::zero(); lp.vars.len()],
                objective_value: Rational::zero(),
            };
        }

        let mut col_val = vec![Rational::zero(); n_cols];
        for (r, &b) in t.rows.iter().zip(&t.basis) {
            col_val[b] = r[n_cols].clone();
        }
        let values: Vec<Rational> = lp
            .vars
            .iter()
            .zip(&col_of)
            .map(|(v, (pos, neg))| {
                let mut x = col_val[*pos].clone();
                if let Some(n) = neg {
                    x -= &col_val[*n];
                }
                if let Some(l) = &v.lower {
                    x += l;
                }
                x
            })
            .collect();
        let objective_value = -&t.cost[1][n_cols] + shift;
        LpSolution {
            status: LpStatus::Optimal,
            values,
            objective_value,
        }
    }

    /// Runs the simplex on cost row `which`, letting only columns below
    /// `allowed` enter.
    fn run_phase(&mut self, which: usize, allowed: usize) -> PhaseEnd {
        let mut streak = 0usize;
        let mut bland = false;
        loop {
            let cost = &self.cost[which];
            let entering = if bland {
                (0..allowed).find(|&j| cost[j].is_negative())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..allowed {
                    if cost[j].is_negative() && best.is_none_or(|b| cost[j] < cost[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                return PhaseEnd::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = &row[col];
                if a.is_positive() {
                    let ratio = &row[self.n_cols] / a;
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
            }
            let Some((row, ratio)) = leave else {
                return PhaseEnd::Unbounded;
            };
            if ratio.is_zero() {
                streak += 1;
                if streak >= DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        let mut nz = Vec::new();
        for (j, a) in self.rows[r].iter_mut().enumerate() {
            if !a.is_zero() {
                *a *= &inv;
                nz.push(j);
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |target: &mut Vec<Rational>| {
            let f = target[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                let delta = &f * &pivot_row[j];
                target[j] -= delta;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        for cost in self.cost.iter_mut() {
            eliminate(cost);
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// After a zero-cost phase one, pivots basic artificials out or drops
    /// their rows when the row is redundant.
    fn drive_out_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.artificial_from {
                match (0..self.artificial_from).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(j) => {
                        self.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn single_lower_bound() {
        let mut lp = LinearProgram::new();
        let x = lp.add_free("x");
        lp.add_constraint([(x, int(1))], Relation::Ge, int(3));
        lp.set_objective([(x, int(1))]);
        let s = lp.solve();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.values[x], int(3));
        assert_eq!(s.objective_value, int(3));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_free("x");
        lp.add_constraint([(x, int(1))], Relation::Ge, int(1));
        lp.add_constraint([(x, int(1))], Relation::Le, int(0));
        assert_eq!(lp.solve().status, LpStatus::Infeasible);
    }

    #[test]
    fn textbook_case() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.add_constraint([(x, int(1)), (y, int(1))], Relation::Le, int(1));
        lp.set_objective([(x, int(-1)), (y, int(-1))]);
        let s = lp.solve();
        assert_eq!(s.objective_value, int(-1));
        assert!(lp.is_feasible(&s.values));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new();
        let x = lp.add_free("x");
        lp.set_objective([(x, int(1))]);
        assert_eq!(lp.solve().status, LpStatus::Unbounded);
    }

    #[test]
    fn lower_bounds_shift_objective() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", Some(rat(5, 2)));
        let y = lp.add_var("y", Some(int(-1)));
        lp.add_constraint([(x, int(1)), (y, int(1))], Relation::Ge, int(2));
        lp.set_objective([(x, int(2)), (y, int(3))]);
        let s = lp.solve();
        assert_eq!(s.values, vec![int(3), int(-1)]);
        assert_eq!(s.objective_value, int(3));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.add_constraint([(x, int(1)), (y, int(1))], Relation::Eq, int(2));
        lp.add_constraint([(x, int(2)), (y, int(2))], Relation::Eq, int(4));
        lp.set_objective([(x, int(1))]);
        let s = lp.solve();
        assert_eq!(s.values, vec![int(0), int(2)]);
    }

    #[test]
    fn dump_lists_one_constraint_per_line() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        let y = lp.add_free("y");
        lp.add_constraint([(x, int(1)), (y, rat(1, 2))], Relation::Le, int(1));
        lp.set_objective([(x, int(-1))]);
        assert_eq!(
            lp.dump(),
            "var x >= 0\nvar y free\nmin: -1 x\nc0: 1 x + 1/2 y <= 1\n"
        );
    }

    #[test]
    fn identical_programs_identical_answers() {
        let mut lp = LinearProgram::new();
        let v: Vec<usize> = (0..4).map(|i| lp.add_nonneg(format!("v{i}"))).collect();
        lp.add_constraint(v.iter().map(|&i| (i, int(1))), Relation::Eq, int(1));
        lp.set_objective([]);
        assert_eq!(lp.solve(), lp.solve());
    }

    /// Random `min c·x, Ax ≥ b, x ≥ 0` with `c ≥ 0` (always bounded) and a
    /// dual bound built from the test's own multipliers.
    fn covering_case() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>, Vec<i64>, Vec<i64>)> {
        (1usize..5, 1usize..6).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(proptest::collection::vec(-2i64..4, n), m),
                proptest::collection::vec(-3i64..6, m),
                proptest::collection::vec(0i64..5, n),
                proptest::collection::vec(0i64..3, m),
            )
        })
    }

    proptest! {
        #[test]
        fn weak_duality_and_exact_feasibility((a, b, c, y) in covering_case()) {
            let n = c.len();
            let mut lp = LinearProgram::new();
            let xs: Vec<usize> = (0..n).map(|j| lp.add_nonneg(format!("x{j}"))).collect();
            for (row, bi) in a.iter().zip(&b) {
                lp.add_constraint(row.iter().enumerate().map(|(j, v)| (xs[j], int(*v))), Relation::Ge, int(*bi));
            }
            lp.set_objective(c.iter().enumerate().map(|(j, v)| (xs[j], int(*v))));
            let s = lp.solve();
            prop_assert!(s.status != LpStatus::Unbounded);
            if s.is_optimal() {
                prop_assert!(lp.is_feasible(&s.values));
                prop_assert_eq!(lp.objective_at(&s.values), s.objective_value.clone());
                // y ≥ 0 with yᵀA ≤ c certifies the bound yᵀb.
                let dual_ok = (0..n).all(|j| a.iter().zip(&y).map(|(row, yi)| row[j] * yi).sum::<i64>() <= c[j]);
                if dual_ok {
                    let bound: i64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
                    prop_assert!(s.objective_value >= int(bound));
                }
            }
        }

        #[test]
        fn optimum_beats_random_feasible_points(
            (a, b, c, _) in covering_case(),
            probes in proptest::collection::vec(proptest::collection::vec(0i64..6, 6), 8),
        ) {
            let n = c.len();
            let mut lp = LinearProgram::new();
            let xs: Vec<usize> = (0..n).map(|j| lp.add_nonneg(format!("x{j}"))).collect();
            for (row, bi) in a.iter().zip(&b) {
                lp.add_constraint(row.iter().enumerate().map(|(j, v)| (xs[j], int(*v))), Relation::Ge, int(*bi));
            }
            lp.set_objective(c.iter().enumerate().map(|(j, v)| (xs[j], int(*v))));
            let s = lp.solve();
            for p in probes {
                let point: Vec<Rational> = p[..n].iter().map(|v| int(*v)).collect();
                if lp.is_feasible(&point) {
                    prop_assert!(s.is_optimal());
                    prop_assert!(lp.objective_at(&point) >= s.objective_value);
                }
            }
        }
    }
}
