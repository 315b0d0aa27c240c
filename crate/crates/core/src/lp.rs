//! Exact rational linear programming.
//!
//! Programs have free (sign-unrestricted) variables and `<=`, `=`, `>=` rows.
//! Almost every program built by this crate has a handful of variables and
//! many inequality rows, so the solver runs a two-phase simplex with Bland's
//! rule on the Lagrangian dual written in standard form, whose tableau has
//! one row per primal variable. The primal witness is read off the simplex
//! multipliers of the optimal dual basis and re-checked exactly before it is
//! returned.

use crate::error::{Error, Result};
use crate::rational::{dot, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn holds_at(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    direction: Direction,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal {
        optimum: Rational,
        witness: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpResult::Optimal { .. })
    }

    pub fn optimum(&self) -> Option<&Rational> {
        match self {
            LpResult::Optimal { optimum, .. } => Some(optimum),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            LpResult::Optimal { witness, .. } => Some(witness),
            _ => None,
        }
    }

    /// Unwraps an optimal result; panics with `what` otherwise.
    pub fn expect_optimal(self, what: &str) -> (Rational, Vec<Rational>) {
        match self {
            LpResult::Optimal { optimum, witness } => (optimum, witness),
            other => panic!("{what}: expected an optimum, got {other:?}"),
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize, direction: Direction, objective: Vec<Rational>) -> Result<Self> {
        if objective.len() != num_vars {
            return Err(Error::MalformedProgram(format!(
                "objective has {} coefficients for {num_vars} variables",
                objective.len()
            )));
        }
        Ok(LinearProgram {
            num_vars,
            direction,
            objective,
            constraints: Vec::new(),
        })
    }

    pub fn minimize(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram::new(n, Direction::Minimize, objective).expect("length matches by construction")
    }

    pub fn maximize(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram::new(n, Direction::Maximize, objective).expect("length matches by construction")
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<()> {
        if coeffs.len() != self.num_vars {
            return Err(Error::MalformedProgram(format!(
                "constraint has {} coefficients for {} variables",
                coeffs.len(),
                self.num_vars
            )));
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        Ok(())
    }

    /// Internal builder path; dimensions are fixed by the caller.
    pub(crate) fn push(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars && self.constraints.iter().all(|c| c.holds_at(x))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    pub fn solve(&self) -> LpResult {
        lp_solve(self)
    }
}

/// Solves `lp` exactly. Deterministic: Bland's rule fixes every pivot.
pub fn lp_solve(lp: &LinearProgram) -> LpResult {
    let n = lp.num_vars;
    if n == 0 {
        return if lp.constraints.iter().all(|c| c.holds_at(&[])) {
            LpResult::Optimal {
                optimum: Rational::zero(),
                witness: Vec::new(),
            }
        } else {
            LpResult::Infeasible
        };
    }

    let cost: Vec<Rational> = match lp.direction {
        Direction::Minimize => lp.objective.clone(),
        Direction::Maximize => lp.objective.iter().map(|c| -c).collect(),
    };
    let mut ineqs: Vec<(&[Rational], Rational, bool)> = Vec::new();
    let mut eqs: Vec<(&[Rational], &Rational)> = Vec::new();
    for c in &lp.constraints {
        match c.relation {
            Relation::Le => ineqs.push((&c.coeffs, c.rhs.clone(), false)),
            Relation::Ge => ineqs.push((&c.coeffs, -&c.rhs, true)),
            Relation::Eq => eqs.push((&c.coeffs, &c.rhs)),
        }
    }
    let rows = NormalizedRows { ineqs, eqs };

    match rows.solve_dual(&cost) {
        DualOutcome::Optimal(x) => {
            debug_assert!(lp.is_feasible_point(&x), "simplex witness infeasible");
            assert!(lp.is_feasible_point(&x), "internal error: LP witness violates a constraint");
            let optimum = lp.objective_value(&x);
            LpResult::Optimal {
                optimum,
                witness: x,
            }
        }
        DualOutcome::Unbounded => LpResult::Infeasible,
        DualOutcome::Infeasible => {
            let zero = vec![Rational::zero(); n];
            match rows.solve_dual(&zero) {
                DualOutcome::Optimal(_) => LpResult::Unbounded,
                _ => LpResult::Infeasible,
            }
        }
    }
}

/// Primal rows normalized to `a.x <= b` (with a sign flag for `>=` rows) and
/// `e.x = d`.
struct NormalizedRows<'a> {
    ineqs: Vec<(&'a [Rational], Rational, bool)>,
    eqs: Vec<(&'a [Rational], &'a Rational)>,
}

enum DualOutcome {
    Optimal(Vec<Rational>),
    Infeasible,
    Unbounded,
}

impl NormalizedRows<'_> {
    /// Primal: min c.x, a_i.x <= b_i, e_k.x = d_k, x free.
    /// Dual in standard form: min sum b_i y_i - d_k z+_k + d_k z-_k subject to
    /// sum y_i a_i - z+_k e_k + z-_k e_k = -c, all variables >= 0.
    fn solve_dual(&self, c: &[Rational]) -> DualOutcome {
        let mut columns: Vec<Vec<Rational>> = Vec::new();
        let mut costs: Vec<Rational> = Vec::new();
        for (a, b, negate) in &self.ineqs {
            columns.push(if *negate {
                a.iter().map(|x| -x).collect()
            } else {
                a.to_vec()
            });
            costs.push(b.clone());
        }
        for (e, d) in &self.eqs {
            columns.push(e.iter().map(|x| -x).collect());
            costs.push(-*d);
            columns.push(e.to_vec());
            costs.push((*d).clone());
        }
        let rhs: Vec<Rational> = c.iter().map(|x| -x).collect();

        let mut tableau = Tableau::new(&columns, costs, rhs);
        match tableau.run() {
            SimplexEnd::Infeasible => DualOutcome::Infeasible,
            SimplexEnd::Unbounded => DualOutcome::Unbounded,
            SimplexEnd::Optimal => DualOutcome::Optimal(tableau.multipliers()),
        }
    }
}

enum SimplexEnd {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Dense standard-form tableau: `rows` equations, `structural` columns
/// followed by one artificial column per row.
struct Tableau {
    rows: usize,
    structural: usize,
    entries: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    costs: Vec<Rational>,
    reduced: Vec<Rational>,
    flipped: Vec<bool>,
}

impl Tableau {
    fn new(columns: &[Vec<Rational>], costs: Vec<Rational>, mut rhs: Vec<Rational>) -> Self {
        let rows = rhs.len();
        let structural = columns.len();
        let width = structural + rows;
        let mut flipped = vec![false; rows];
        let mut entries = vec![vec![Rational::zero(); width]; rows];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    entries[i][j] = v.clone();
                }
            }
        }
        for i in 0..rows {
            if rhs[i].is_negative() {
                flipped[i] = true;
                rhs[i] = -&rhs[i];
                for v in entries[i].iter_mut().take(structural) {
                    if !v.is_zero() {
                        *v = -&*v;
                    }
                }
            }
            entries[i][structural + i] = Rational::one();
        }
        let mut full_costs = costs;
        full_costs.resize(width, Rational::zero());
        Tableau {
            rows,
            structural,
            entries,
            rhs,
            basis: (structural..structural + rows).collect(),
            costs: full_costs,
            reduced: vec![Rational::zero(); width],
            flipped,
        }
    }

    fn width(&self) -> usize {
        self.structural + self.rows
    }

    fn compute_reduced(&mut self, costs: &[Rational]) {
        let width = self.width();
        let mut reduced = costs.to_vec();
        for i in 0..self.rows {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, r) in reduced.iter_mut().enumerate().take(width) {
                let a = &self.entries[i][j];
                if !a.is_zero() {
                    *r -= &(cb * a);
                }
            }
        }
        self.reduced = reduced;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.entries[row][col].clone();
        if !p.is_one() {
            let inv = p.recip();
            for v in self.entries[row].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[row] *= &inv;
        }
        let pivot_row = self.entries[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        let support: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let factor = self.entries[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                self.entries[i][j] -= &delta;
            }
            let delta = &factor * &pivot_rhs;
            self.rhs[i] -= &delta;
        }
        let factor = self.reduced[col].clone();
        if !factor.is_zero() {
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                self.reduced[j] -= &delta;
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iterations over the columns `< allowed`.
    fn iterate(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.reduced[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows {
                let a = &self.entries[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return false,
                Some((row, _)) => self.pivot(row, enter),
            }
        }
    }

    fn run(&mut self) -> SimplexEnd {
        let width = self.width();
        let mut phase_one = vec![Rational::zero(); width];
        for c in phase_one.iter_mut().skip(self.structural) {
            *c = Rational::one();
        }
        self.compute_reduced(&phase_one);
        let bounded = self.iterate(self.structural);
        debug_assert!(bounded, "phase one is bounded below by zero");
        let infeasible = (0..self.rows)
            .any(|i| self.basis[i] >= self.structural && self.rhs[i].is_positive());
        if infeasible {
            return SimplexEnd::Infeasible;
        }
        // Drive zero-level artificials out of the basis where possible; rows
        // left with an artificial are redundant.
        for i in 0..self.rows {
            if self.basis[i] >= self.structural {
                if let Some(j) = (0..self.structural).find(|&j| !self.entries[i][j].is_zero()) {
                    self.pivot(i, j);
                }
            }
        }
        let costs = self.costs.clone();
        self.compute_reduced(&costs);
        if self.iterate(self.structural) {
            SimplexEnd::Optimal
        } else {
            SimplexEnd::Unbounded
        }
    }

    /// Simplex multipliers of the original (unflipped) rows; these solve the
    /// dual of the standard-form program, i.e. the primal we started from.
    fn multipliers(&self) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| {
                let pi = -&self.reduced[self.structural + i];
                if self.flipped[i] {
                    -pi
                } else {
                    pi
                }
            })
            .collect()
    }
}
