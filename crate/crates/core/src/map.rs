//! Linear maps between polyhedral spaces.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::check_cap;
use crate::linalg::Matrix;
use crate::lp::{LinearProgram, LpResult, Relation};
use crate::rational::Rational;
use crate::space::{PolyhedralSpace, SpaceRef};

#[derive(Clone, PartialEq, Eq)]
pub struct LinearMap {
    domain: SpaceRef,
    codomain: SpaceRef,
    matrix: Matrix,
}

/// Additive isometry defect of a map.
///
/// `upper = max_{||x|| <= 1} (||fx|| - ||x||)_+ = (||f|| - 1)_+` and
/// `lower = max_{||x|| = 1} (||x|| - ||fx||)_+`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryDefect {
    pub upper: Rational,
    pub lower: Rational,
}

impl IsometryDefect {
    pub fn max(&self) -> Rational {
        self.upper.clone().max(self.lower.clone())
    }

    pub fn is_isometry(&self) -> bool {
        self.upper.is_zero() && self.lower.is_zero()
    }

    /// `| ||fx|| - ||x|| | <= eps` on the unit ball.
    pub fn is_weak_isometry(&self, eps: &Rational) -> bool {
        self.max() <= *eps
    }

    /// `(1 + eps)^-1 ||x|| <= ||fx|| <= (1 + eps) ||x||`.
    pub fn is_strong_isometry(&self, eps: &Rational) -> bool {
        let one = Rational::one();
        self.upper <= *eps && self.lower <= eps / &(eps + &one)
    }
}

impl LinearMap {
    pub fn new(domain: SpaceRef, codomain: SpaceRef, matrix: Matrix) -> Result<Self> {
        if matrix.cols() != domain.dim() {
            return Err(Error::mismatch(domain.dim(), matrix.cols()));
        }
        if matrix.rows() != codomain.dim() {
            return Err(Error::mismatch(codomain.dim(), matrix.rows()));
        }
        Ok(LinearMap {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn identity(space: SpaceRef) -> Self {
        let n = space.dim();
        LinearMap {
            domain: space.clone(),
            codomain: space,
            matrix: Matrix::identity(n),
        }
    }

    pub fn zero(domain: SpaceRef, codomain: SpaceRef) -> Self {
        let matrix = Matrix::zeros(codomain.dim(), domain.dim());
        LinearMap {
            domain,
            codomain,
            matrix,
        }
    }

    pub fn domain(&self) -> &SpaceRef {
        &self.domain
    }

    pub fn codomain(&self) -> &SpaceRef {
        &self.codomain
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Same matrix between different spaces of matching dimension.
    pub fn with_spaces(&self, domain: SpaceRef, codomain: SpaceRef) -> Result<Self> {
        LinearMap::new(domain, codomain, self.matrix.clone())
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        self.domain.check_vector(v)?;
        Ok(self.matrix.apply(v))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        LinearMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.scale(r),
        }
    }

    fn check_parallel(&self, other: &LinearMap) -> Result<()> {
        if self.domain.dim() != other.domain.dim() {
            return Err(Error::mismatch(self.domain.dim(), other.domain.dim()));
        }
        if self.codomain.dim() != other.codomain.dim() {
            return Err(Error::mismatch(self.codomain.dim(), other.codomain.dim()));
        }
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::PreconditionViolated(
                "maps have different domain or codomain norms".into(),
            ));
        }
        Ok(())
    }

    pub fn sub(&self, other: &LinearMap) -> Result<Self> {
        self.check_parallel(other)?;
        Ok(LinearMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.sub(&other.matrix),
        })
    }

    pub fn add(&self, other: &LinearMap) -> Result<Self> {
        self.check_parallel(other)?;
        Ok(LinearMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.add(&other.matrix),
        })
    }

    /// `max_v ||f v||` over the vertices of the domain ball.
    pub fn operator_norm(&self) -> Rational {
        self.domain
            .half_vertices()
            .map(|v| self.codomain.norm_of(&self.matrix.apply(v)))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `||f - g||` for parallel maps.
    pub fn distance(&self, other: &LinearMap) -> Result<Rational> {
        Ok(self.sub(other)?.operator_norm())
    }

    pub fn isometry_defect(&self) -> IsometryDefect {
        let upper = (self.operator_norm() - Rational::one()).positive_part();
        let lower = match self.min_on_sphere() {
            Some(m) => (Rational::one() - m).positive_part(),
            None => Rational::zero(),
        };
        IsometryDefect { upper, lower }
    }

    /// `min ||fx||` over the unit sphere of the domain, `None` when the
    /// domain is `{0}`.
    ///
    /// The sphere is the union of the facets `F = {x in Ball : phi x = 1}`.
    /// On `F` the codomain norm `max_psi psi(fx)` is minimized region by
    /// region: for each `psi`, minimize `psi(fx)` over the part of `F` where
    /// `psi` is the active functional.
    pub fn min_on_sphere(&self) -> Option<Rational> {
        let dom = &*self.domain;
        if dom.dim() == 0 {
            return None;
        }
        let n = dom.dim();
        // psi . f as covectors on the domain, deduplicated.
        let mut pulled: Vec<Vec<Rational>> = self
            .codomain
            .facets()
            .iter()
            .map(|psi| self.matrix.left_apply(psi))
            .collect();
        pulled.sort();
        pulled.dedup();
        if pulled.is_empty() {
            return Some(Rational::zero());
        }
        let faces: Vec<&Vec<Rational>> = dom.half_facets().collect();
        let jobs: Vec<(usize, usize)> = (0..faces.len())
            .flat_map(|i| (0..pulled.len()).map(move |j| (i, j)))
            .collect();
        jobs.par_iter()
            .filter_map(|&(i, j)| {
                let phi = faces[i];
                let w = &pulled[j];
                let mut lp = LinearProgram::minimize(w.clone());
                for other in dom.facets() {
                    lp.push(other.clone(), Relation::Le, Rational::one());
                }
                lp.push(phi.clone(), Relation::Eq, Rational::one());
                for (k, u) in pulled.iter().enumerate() {
                    if k != j {
                        let diff: Vec<Rational> = w.iter().zip(u).map(|(a, b)| a - b).collect();
                        if diff.iter().any(|x| !x.is_zero()) {
                            lp.push(diff, Relation::Ge, Rational::zero());
                        }
                    }
                }
                debug_assert_eq!(lp.num_vars(), n);
                match lp.solve() {
                    LpResult::Optimal { optimum, .. } => Some(optimum),
                    LpResult::Infeasible => None,
                    LpResult::Unbounded => unreachable!("facet of a bounded ball"),
                }
            })
            .min()
    }

    /// Exact isometry test: `||f|| <= 1` and the pulled-back ball
    /// `{x : ||fx|| <= 1}` lies inside the domain ball.
    pub fn is_isometry(&self) -> bool {
        if self.operator_norm() > Rational::one() {
            return false;
        }
        if self.domain.dim() == 0 {
            return true;
        }
        let pulled: Vec<Vec<Rational>> = self
            .codomain
            .facets()
            .iter()
            .map(|psi| self.matrix.left_apply(psi))
            .collect();
        let faces: Vec<&Vec<Rational>> = self.domain.half_facets().collect();
        faces.par_iter().all(|phi| {
            let mut lp = LinearProgram::maximize((*phi).clone());
            for w in &pulled {
                lp.push(w.clone(), Relation::Le, Rational::one());
            }
            match lp.solve() {
                LpResult::Optimal { optimum, .. } => optimum <= Rational::one(),
                _ => false,
            }
        })
    }

    pub fn is_injective(&self) -> bool {
        self.matrix.rank() == self.domain.dim()
    }
}

/// `g . f`.
pub fn compose(g: &LinearMap, f: &LinearMap) -> Result<LinearMap> {
    if g.domain.dim() != f.codomain.dim() {
        return Err(Error::mismatch(g.domain.dim(), f.codomain.dim()));
    }
    if g.domain != f.codomain {
        return Err(Error::PreconditionViolated(
            "domain of the outer map differs from the codomain of the inner map".into(),
        ));
    }
    Ok(LinearMap {
        domain: f.domain.clone(),
        codomain: g.codomain.clone(),
        matrix: g.matrix.mul(&f.matrix),
    })
}

/// `id_K ⊗ f : K ⊗ A -> K ⊗ B` between projective tensor products.
pub fn tensor_map(k: &PolyhedralSpace, f: &LinearMap) -> Result<LinearMap> {
    check_cap(k.dim() * f.domain.dim())?;
    check_cap(k.dim() * f.codomain.dim())?;
    let domain = Arc::new(k.projective_tensor(&f.domain)?);
    let codomain = Arc::new(k.projective_tensor(&f.codomain)?);
    let matrix = Matrix::identity(k.dim()).kron(&f.matrix);
    LinearMap::new(domain, codomain, matrix)
}

impl std::fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LinearMap({} -> {}, {:?})",
            self.domain.dim(),
            self.codomain.dim(),
            self.matrix
        )
    }
}
