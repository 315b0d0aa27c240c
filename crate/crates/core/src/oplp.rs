//! Linear programs whose unknown is a matrix `X` between polyhedral spaces.
//!
//! Norm bounds of the form `||L X R - T|| <= c` are linear in `X` once the
//! operator norm is written out over domain vertices and codomain facets:
//! `psi (L X R v - T v) <= c` for every vertex `v` and facet `psi`.

use crate::linalg::Matrix;
use crate::lp::{LinearProgram, LpResult, Relation};
use crate::rational::{dot, Rational};
use crate::space::PolyhedralSpace;

/// Minimize a slack `s` over matrices `X` (`rows x cols`).
pub(crate) struct OperatorLp {
    rows: usize,
    cols: usize,
    lp: LinearProgram,
}

/// Right-hand side of a norm bound.
pub(crate) enum Bound<'a> {
    Fixed(&'a Rational),
    Slack,
}

impl OperatorLp {
    pub(crate) fn new(rows: usize, cols: usize) -> Self {
        let n = rows * cols + 1;
        let mut objective = vec![Rational::zero(); n];
        objective[n - 1] = Rational::one();
        let mut lp = LinearProgram::minimize(objective);
        let mut nonneg = vec![Rational::zero(); n];
        nonneg[n - 1] = Rational::one();
        lp.push(nonneg, Relation::Ge, Rational::zero());
        OperatorLp { rows, cols, lp }
    }

    fn slack_index(&self) -> usize {
        self.rows * self.cols
    }

    /// `||L X R - T|| <= bound` as maps from `source` to `target`, where
    /// `L` is `target.dim x rows`, `R` is `cols x source.dim` and `T` is
    /// `target.dim x source.dim`. `None` stands for the identity.
    pub(crate) fn norm_bound(
        &mut self,
        source: &PolyhedralSpace,
        target: &PolyhedralSpace,
        left: Option<&Matrix>,
        right: Option<&Matrix>,
        constant: Option<&Matrix>,
        bound: Bound<'_>,
    ) {
        let images: Vec<(Vec<Rational>, Vec<Rational>)> = source
            .half_vertices()
            .map(|v| {
                let rv = right.map_or_else(|| v.clone(), |r| r.apply(v));
                let tv = constant.map_or_else(|| vec![Rational::zero(); target.dim()], |t| t.apply(v));
                (rv, tv)
            })
            .collect();
        let mut seen = std::collections::BTreeSet::new();
        for psi in target.facets() {
            let pl = left.map_or_else(|| psi.clone(), |l| l.left_apply(psi));
            for (rv, tv) in &images {
                let mut coeffs = Vec::with_capacity(self.rows * self.cols + 1);
                for a in &pl {
                    for b in rv {
                        coeffs.push(a * b);
                    }
                }
                let mut rhs = dot(psi, tv);
                match bound {
                    Bound::Fixed(c) => {
                        coeffs.push(Rational::zero());
                        rhs += c;
                    }
                    Bound::Slack => coeffs.push(-Rational::one()),
                }
                if seen.insert((coeffs.clone(), rhs.clone())) {
                    self.lp.push(coeffs, Relation::Le, rhs);
                }
            }
        }
    }

    /// `L X R = T` entrywise.
    pub(crate) fn equal(&mut self, left: Option<&Matrix>, right: Option<&Matrix>, target: &Matrix) {
        let l = left.cloned().unwrap_or_else(|| Matrix::identity(self.rows));
        let r = right.cloned().unwrap_or_else(|| Matrix::identity(self.cols));
        for i in 0..target.rows() {
            for j in 0..target.cols() {
                let mut coeffs = Vec::with_capacity(self.rows * self.cols + 1);
                for a in 0..self.rows {
                    for b in 0..self.cols {
                        coeffs.push(&l[(i, a)] * &r[(b, j)]);
                    }
                }
                coeffs.push(Rational::zero());
                self.lp.push(coeffs, Relation::Eq, target[(i, j)].clone());
            }
        }
    }

    /// Optimal slack and matrix, or `None` when infeasible.
    pub(crate) fn solve(self) -> Option<(Rational, Matrix)> {
        let slack = self.slack_index();
        match self.lp.solve() {
            LpResult::Optimal { optimum, witness } => {
                debug_assert_eq!(optimum, witness[slack]);
                let x = Matrix::from_fn(self.rows, self.cols, |i, j| witness[i * self.cols + j].clone());
                Some((optimum, x))
            }
            LpResult::Infeasible => None,
            LpResult::Unbounded => unreachable!("slack is bounded below by zero"),
        }
    }
}
