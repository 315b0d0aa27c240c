//! Positive-primitive formulas over normed spaces.
//!
//! A formula `EXISTS y . /\ atoms` with atoms `t1 = t2` or `||t|| <= M`
//! is evaluated at an assignment of its free variables by one linear
//! program: minimize the uniform relaxation `s` such that all equalities hold
//! and every norm atom satisfies `||t|| <= M + s`.

mod parse;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{independent_subset, Matrix};
use crate::lp::{LinearProgram, LpResult, Relation};
use crate::purity::{ideal_defect, Embedding};
use crate::rational::{dot, Rational};
use crate::space::PolyhedralSpace;

pub use parse::parse_formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// `x_{i+1}`
    Free(usize),
    /// The `j`-th existentially bound variable.
    Bound(usize),
}

/// A rational linear combination of variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Term {
    coeffs: BTreeMap<Var, Rational>,
}

impl Term {
    pub fn zero() -> Self {
        Term::default()
    }

    pub fn var(v: Var) -> Self {
        Term::from_pairs([(v, Rational::one())])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Rational)>) -> Self {
        pairs.into_iter().fold(Term::zero(), |mut t, (v, r)| {
            t.add_coeff(v, &r);
            t
        })
    }

    fn add_coeff(&mut self, v: Var, r: &Rational) {
        let entry = self.coeffs.entry(v).or_insert_with(Rational::zero);
        *entry += r;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn add(&self, other: &Term) -> Term {
        let mut out = self.clone();
        for (v, r) in &other.coeffs {
            out.add_coeff(*v, r);
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Term {
        if r.is_zero() {
            return Term::zero();
        }
        Term {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, c * r)).collect(),
        }
    }

    pub fn coefficient(&self, v: Var) -> Rational {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &Rational)> {
        self.coeffs.iter().map(|(v, r)| (*v, r))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Eq(Term, Term),
    NormLe(Term, Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PPFormula {
    free_count: usize,
    bound_names: Vec<String>,
    atoms: Vec<Atom>,
}

impl PPFormula {
    /// Formula with bound variables named `y1, ..., ym`. Fails with a scope
    /// error if an atom mentions a variable out of range.
    pub fn new(free_count: usize, bound_count: usize, atoms: Vec<Atom>) -> Result<Self> {
        for atom in &atoms {
            let terms: Vec<&Term> = match atom {
                Atom::Eq(a, b) => vec![a, b],
                Atom::NormLe(t, m) => {
                    if m.is_negative() {
                        return Err(Error::PreconditionViolated("norm bound must be nonnegative".into()));
                    }
                    vec![t]
                }
            };
            for (v, _) in terms.iter().flat_map(|t| t.iter()) {
                let (ok, name) = match v {
                    Var::Free(i) => (i < free_count, format!("x{}", i + 1)),
                    Var::Bound(j) => (j < bound_count, format!("y{}", j + 1)),
                };
                if !ok {
                    return Err(Error::ScopeError { name, line: 0, column: 0 });
                }
            }
        }
        Ok(PPFormula {
            free_count,
            bound_names: (1..=bound_count).map(|j| format!("y{j}")).collect(),
            atoms,
        })
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn bound_count(&self) -> usize {
        self.bound_names.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn has_norm_atom(&self) -> bool {
        self.atoms.iter().any(|a| matches!(a, Atom::NormLe(..)))
    }
}

/// Every bound `M` becomes `M + eps`.
pub fn approximate(phi: &PPFormula, eps: &Rational) -> PPFormula {
    let atoms = phi
        .atoms
        .iter()
        .map(|a| match a {
            Atom::NormLe(t, m) => Atom::NormLe(t.clone(), m + eps),
            eq => eq.clone(),
        })
        .collect();
    PPFormula {
        atoms,
        ..phi.clone()
    }
}

struct TermDisplay<'a>(&'a Term, &'a [String]);

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            return write!(f, "0");
        }
        for (k, (v, c)) in self.0.iter().enumerate() {
            let name = match v {
                Var::Free(i) => format!("x{}", i + 1),
                Var::Bound(j) => self.1[j].clone(),
            };
            let magnitude = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if magnitude.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{magnitude}*{name}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for PPFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.bound_names.is_empty() {
            write!(f, "EXISTS {} . ", self.bound_names.join(", "))?;
        }
        if self.atoms.is_empty() {
            return write!(f, "TRUE");
        }
        for (k, atom) in self.atoms.iter().enumerate() {
            if k > 0 {
                write!(f, " AND ")?;
            }
            match atom {
                Atom::Eq(a, b) => write!(f, "{} = {}", TermDisplay(a, &self.bound_names), TermDisplay(b, &self.bound_names))?,
                Atom::NormLe(t, m) => write!(f, "norm({}) <= {m}", TermDisplay(t, &self.bound_names))?,
            }
        }
        Ok(())
    }
}

/// Least uniform relaxation making a formula true.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slack {
    Value(Rational),
    /// The equalities are solvable and there are no norm atoms.
    Free,
    /// The equalities have no solution.
    Infeasible,
}

impl Slack {
    pub fn satisfied(&self) -> bool {
        self.satisfied_within(&Rational::zero())
    }

    /// Whether the `eps`-approximation of the formula holds.
    pub fn satisfied_within(&self, eps: &Rational) -> bool {
        match self {
            Slack::Value(v) => v <= eps,
            Slack::Free => true,
            Slack::Infeasible => false,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Slack::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Slack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slack::Value(v) => write!(f, "{v}"),
            Slack::Free => write!(f, "-inf"),
            Slack::Infeasible => write!(f, "+inf"),
        }
    }
}

/// Slack of `phi` in `k` at the assignment `a` (one vector per free variable).
pub fn satisfaction_slack(k: &PolyhedralSpace, phi: &PPFormula, a: &[Vec<Rational>]) -> Result<Slack> {
    if a.len() != phi.free_count {
        return Err(Error::mismatch(phi.free_count, a.len()));
    }
    for v in a {
        k.check_vector(v)?;
    }
    let d = k.dim();
    let m = phi.bound_count();
    let nvars = m * d + 1;
    let s = m * d;
    let mut obj = vec![Rational::zero(); nvars];
    obj[s] = Rational::one();
    let mut lp = LinearProgram::minimize(obj);

    // Value of a term: (coefficients on the bound coordinates, constant vector).
    let split = |t: &Term| {
        let mut constant = vec![Rational::zero(); d];
        let mut bound = vec![Rational::zero(); m];
        for (v, c) in t.iter() {
            match v {
                Var::Free(i) => {
                    for (x, y) in constant.iter_mut().zip(&a[i]) {
                        *x += &(c * y);
                    }
                }
                Var::Bound(j) => bound[j] = c.clone(),
            }
        }
        (bound, constant)
    };

    let mut any_norm = false;
    for atom in &phi.atoms {
        match atom {
            Atom::Eq(lhs, rhs) => {
                let (bound, constant) = split(&lhs.add(&rhs.scale(&-Rational::one())));
                for c in 0..d {
                    let mut row = vec![Rational::zero(); nvars];
                    for (j, b) in bound.iter().enumerate() {
                        row[j * d + c] = b.clone();
                    }
                    lp.push(row, Relation::Eq, -&constant[c]);
                }
            }
            Atom::NormLe(t, bound_m) => {
                any_norm = true;
                let (bound, constant) = split(t);
                // psi(t) - s <= M for every facet psi.
                for psi in k.facets() {
                    let mut row = vec![Rational::zero(); nvars];
                    for (j, b) in bound.iter().enumerate() {
                        for c in 0..d {
                            row[j * d + c] = b * &psi[c];
                        }
                    }
                    row[s] = -Rational::one();
                    lp.push(row, Relation::Le, bound_m - &dot(psi, &constant));
                }
                // Norms are nonnegative, so s >= -M always.
                let mut row = vec![Rational::zero(); nvars];
                row[s] = Rational::one();
                lp.push(row, Relation::Ge, -bound_m);
            }
        }
    }
    if !any_norm {
        let mut row = vec![Rational::zero(); nvars];
        row[s] = Rational::one();
        lp.push(row, Relation::Eq, Rational::zero());
    }
    Ok(match lp.solve() {
        LpResult::Optimal { optimum, .. } if any_norm => Slack::Value(optimum),
        LpResult::Optimal { .. } => Slack::Free,
        LpResult::Infeasible => Slack::Infeasible,
        LpResult::Unbounded => unreachable!("slack is bounded below by -M"),
    })
}

/// `/\_v ||sum v_i x_i|| <= 1` over the vertices `v` of the unit ball of `a`.
/// Satisfied by `(a_1, ..., a_n)` in `K` iff `e_i -> a_i` has norm at most one.
pub fn presentation_formula(a: &PolyhedralSpace) -> PPFormula {
    let atoms = a
        .vertices()
        .iter()
        .map(|v| {
            let t = Term::from_pairs(v.iter().enumerate().map(|(i, r)| (Var::Free(i), r.clone())));
            Atom::NormLe(t, Rational::one())
        })
        .collect();
    PPFormula {
        free_count: a.dim(),
        bound_names: Vec::new(),
        atoms,
    }
}

/// Slacks of `phi` at `a` (coordinates in `K`) in `K` and, pushed along the
/// embedding, in `L`.
pub fn transfer_check(e: &Embedding, phi: &PPFormula, a: &[Vec<Rational>]) -> Result<(Slack, Slack)> {
    let k = e.subspace();
    for v in a {
        k.check_vector(v)?;
    }
    let pushed: Vec<Vec<Rational>> = a.iter().map(|v| e.map().matrix().apply(v)).collect();
    let slack_k = satisfaction_slack(k, phi, a)?;
    let slack_l = satisfaction_slack(e.ambient(), phi, &pushed)?;
    Ok((slack_k, slack_l))
}

/// As [`transfer_check`], with the assignment given in `L` coordinates; each
/// vector must lie in the image of `K`.
pub fn transfer_check_ambient(e: &Embedding, phi: &PPFormula, a: &[Vec<Rational>]) -> Result<(Slack, Slack)> {
    let lifted = lift_assignment(e, a)?;
    transfer_check(e, phi, &lifted)
}

pub fn lift_assignment(e: &Embedding, a: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    a.iter()
        .map(|v| {
            e.ambient().check_vector(v)?;
            e.map().matrix().solve(v).ok_or(Error::AssignmentNotInSubspace)
        })
        .collect()
}

/// For a non-ideal `K ⊆ L`: the presentation formula of `L` in a basis
/// extending that of `K`, with the complement coordinates quantified. At the
/// basis of `K` it holds in `L` but fails in `K`, because a witness in `K`
/// would be a norm-one extension operator.
pub fn distinguishing_formula(e: &Embedding) -> Result<(PPFormula, Vec<Vec<Rational>>)> {
    if ideal_defect(e).is_zero() {
        return Err(Error::IsActuallyIdeal);
    }
    let k = e.subspace().dim();
    let l = e.ambient().dim();
    let mut candidates = e.intersection_basis();
    candidates.extend((0..l).map(|i| {
        let mut u = vec![Rational::zero(); l];
        u[i] = Rational::one();
        u
    }));
    let chosen = independent_subset(&candidates, l);
    debug_assert_eq!(&chosen[..k], &(0..k).collect::<Vec<_>>()[..]);
    let basis: Vec<Vec<Rational>> = chosen.iter().map(|&i| candidates[i].clone()).collect();
    let change = Matrix::from_columns(&basis, l)?.inverse().expect("a basis");
    let atoms = e
        .ambient()
        .vertices()
        .iter()
        .map(|v| {
            let coords = change.apply(v);
            let t = Term::from_pairs(coords.into_iter().enumerate().map(|(i, r)| {
                if i < k {
                    (Var::Free(i), r)
                } else {
                    (Var::Bound(i - k), r)
                }
            }));
            Atom::NormLe(t, Rational::one())
        })
        .collect();
    let phi = PPFormula::new(k, l - k, atoms)?;
    let assignment = (0..k)
        .map(|i| {
            let mut u = vec![Rational::zero(); k];
            u[i] = Rational::one();
            u
        })
        .collect();
    Ok((phi, assignment))
}
