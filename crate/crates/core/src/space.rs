//! Finite-dimensional normed spaces whose unit ball is a symmetric polytope.
//!
//! A [`PolyhedralSpace`] stores both descriptions of its ball: the extreme
//! points and the facet functionals `phi` (each facet is `phi . x <= 1`).
//! The norm is `max_phi phi . x`, and operator norms out of the space are
//! maxima over the extreme points.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{check_cap, convex_hull_facets, vertex_enumerate, Halfspace};
use crate::linalg::Matrix;
use crate::rational::{dot, Rational};

pub type Point = Vec<Rational>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyhedralSpace {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Point>,
}

/// Shared handle; maps and pushouts reference spaces through this.
pub type SpaceRef = Arc<PolyhedralSpace>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    /// `||(x, y)|| = ||x|| + ||y||` (coproduct).
    Sum,
    /// `||(x, y)|| = max(||x||, ||y||)` (product).
    Max,
}

fn is_symmetric(points: &[Point]) -> bool {
    let set: BTreeSet<&Point> = points.iter().collect();
    points.iter().all(|p| {
        let neg: Point = p.iter().map(|x| -x).collect();
        set.contains(&neg)
    })
}

fn negate(p: &[Rational]) -> Point {
    p.iter().map(|x| -x).collect()
}

fn is_canonical_half(p: &[Rational]) -> bool {
    p.iter().find(|x| !x.is_zero()).is_some_and(Rational::is_positive)
}

impl PolyhedralSpace {
    /// The zero space `{0}`.
    pub fn zero() -> Self {
        PolyhedralSpace {
            dim: 0,
            vertices: Vec::new(),
            facets: Vec::new(),
        }
    }

    /// Space whose unit ball is the convex hull of `points`. The point set
    /// must already be symmetric; non-extreme points are dropped.
    pub fn from_vertices(dim: usize, points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return if points.iter().all(|p| p.is_empty()) {
                Ok(PolyhedralSpace::zero())
            } else {
                Err(Error::mismatch(0, points.iter().map(Vec::len).max().unwrap_or(0)))
            };
        }
        if points.is_empty() {
            return Err(Error::EmptyInput("no ball vertices given".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::mismatch(dim, p.len()));
        }
        if !is_symmetric(&points) {
            return Err(Error::NotSymmetric("vertex set is not closed under negation".into()));
        }
        let rank = Matrix::from_rows(points.clone(), dim)?.rank();
        if rank < dim {
            return Err(Error::NotFullDimensional(format!(
                "vertices span a {rank}-dimensional subspace of R^{dim}"
            )));
        }
        Self::hull_of(dim, points)
    }

    /// Space whose unit ball is `{x : phi . x <= 1 for every phi}`. The
    /// functional set must be symmetric; redundant functionals are dropped.
    pub fn from_facets(dim: usize, functionals: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Ok(PolyhedralSpace::zero());
        }
        if functionals.is_empty() {
            return Err(Error::EmptyInput("no facet functionals given".into()));
        }
        if let Some(p) = functionals.iter().find(|p| p.len() != dim) {
            return Err(Error::mismatch(dim, p.len()));
        }
        if !is_symmetric(&functionals) {
            return Err(Error::NotSymmetric("facet set is not closed under negation".into()));
        }
        let halfspaces: Vec<Halfspace> = functionals
            .into_iter()
            .map(|phi| Halfspace::new(phi, Rational::one()))
            .collect();
        let vertices = match vertex_enumerate(&halfspaces, dim) {
            Ok(v) => v,
            Err(Error::UnboundedPolytope) => {
                return Err(Error::NotFullDimensional(
                    "facet functionals do not separate points (ball is unbounded)".into(),
                ))
            }
            Err(e) => return Err(e),
        };
        Self::hull_of(dim, vertices)
    }

    /// Ball = convex hull of the given points closed under negation. Callers
    /// guarantee the points span `R^dim`.
    pub(crate) fn from_symmetric_hull(dim: usize, points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Ok(PolyhedralSpace::zero());
        }
        let mut all: BTreeSet<Point> = BTreeSet::new();
        for p in points {
            if p.iter().all(Rational::is_zero) {
                continue;
            }
            all.insert(negate(&p));
            all.insert(p);
        }
        Self::hull_of(dim, all.into_iter().collect())
    }

    fn hull_of(dim: usize, points: Vec<Point>) -> Result<Self> {
        check_cap(dim)?;
        let hull = convex_hull_facets(&points, dim).map_err(|e| match e {
            Error::DegenerateSystem(m) => Error::NotFullDimensional(m),
            other => other,
        })?;
        let mut facets: Vec<Point> = hull
            .iter()
            .map(|h| {
                debug_assert!(h.offset.is_positive(), "origin must be interior");
                h.normal.iter().map(|x| x / &h.offset).collect()
            })
            .collect();
        facets.sort();
        // Extreme points are exactly the vertices of the facet description.
        let hs: Vec<Halfspace> = facets
            .iter()
            .map(|phi| Halfspace::new(phi.clone(), Rational::one()))
            .collect();
        let vertices = vertex_enumerate(&hs, dim)?;
        debug_assert!(vertices.iter().all(|v| points.contains(v)));
        Ok(PolyhedralSpace {
            dim,
            vertices,
            facets,
        })
    }

    /// Builds from precomputed, already canonical data (sorted, polar to each other).
    pub(crate) fn from_parts(dim: usize, mut vertices: Vec<Point>, mut facets: Vec<Point>) -> Self {
        vertices.sort();
        vertices.dedup();
        facets.sort();
        facets.dedup();
        PolyhedralSpace {
            dim,
            vertices,
            facets,
        }
    }

    /// `R` with the absolute value.
    pub fn real_line() -> Self {
        Self::from_parts(1, vec![vec![Rational::one()], vec![-Rational::one()]], vec![
            vec![Rational::one()],
            vec![-Rational::one()],
        ])
    }

    /// `l1^n`: ball = cross-polytope, facets = sign vectors.
    pub fn l1(n: usize) -> Self {
        if n == 0 {
            return Self::zero();
        }
        Self::linf(n).dual()
    }

    /// `l_inf^n`: ball = cube, facets = `±e_i`.
    pub fn linf(n: usize) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let mut facets = Vec::new();
        for i in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            facets.push(negate(&e));
            facets.push(e);
        }
        let mut vertices = vec![Vec::new()];
        for _ in 0..n {
            vertices = vertices
                .into_iter()
                .flat_map(|v: Point| {
                    let mut a = v.clone();
                    a.push(Rational::one());
                    let mut b = v;
                    b.push(-Rational::one());
                    [a, b]
                })
                .collect();
        }
        Self::from_parts(n, vertices, facets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme points of the unit ball, sorted.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Facet functionals `phi` (facet `phi . x <= 1`), sorted.
    pub fn facets(&self) -> &[Point] {
        &self.facets
    }

    /// One representative of each `±v` vertex pair.
    pub fn half_vertices(&self) -> impl Iterator<Item = &Point> {
        self.vertices.iter().filter(|v| is_canonical_half(v))
    }

    /// One representative of each `±phi` facet pair.
    pub fn half_facets(&self) -> impl Iterator<Item = &Point> {
        self.facets.iter().filter(|v| is_canonical_half(v))
    }

    pub fn check_vector(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.dim {
            Err(Error::mismatch(self.dim, v.len()))
        } else {
            Ok(())
        }
    }

    pub fn norm(&self, v: &[Rational]) -> Result<Rational> {
        self.check_vector(v)?;
        Ok(self.norm_of(v))
    }

    /// Norm without the length check (internal hot path).
    pub(crate) fn norm_of(&self, v: &[Rational]) -> Rational {
        self.facets
            .iter()
            .map(|phi| dot(phi, v))
            .max()
            .unwrap_or_else(Rational::zero)
            .positive_part()
    }

    pub fn in_ball(&self, v: &[Rational]) -> bool {
        self.norm_of(v) <= Rational::one()
    }

    /// The dual space: the ball is the polar, so vertices and facets swap.
    pub fn dual(&self) -> Self {
        PolyhedralSpace {
            dim: self.dim,
            vertices: self.facets.clone(),
            facets: self.vertices.clone(),
        }
    }

    pub fn direct_sum(&self, other: &PolyhedralSpace, kind: SumKind) -> Result<Self> {
        let dim = self.dim + other.dim;
        check_cap(dim)?;
        if self.dim == 0 {
            return Ok(other.clone());
        }
        if other.dim == 0 {
            return Ok(self.clone());
        }
        // Ball of the sum norm: hull of the two balls, and its facets pair up
        // facets of the summands. The max norm is the polar picture.
        let ((spread_a, spread_b), (paired_a, paired_b)) = match kind {
            SumKind::Sum => ((&self.vertices, &other.vertices), (&self.facets, &other.facets)),
            SumKind::Max => ((&self.facets, &other.facets), (&self.vertices, &other.vertices)),
        };
        let mut injected = Vec::new();
        for v in spread_a {
            let mut p = v.clone();
            p.resize(dim, Rational::zero());
            injected.push(p);
        }
        for v in spread_b {
            let mut p = vec![Rational::zero(); self.dim];
            p.extend(v.iter().cloned());
            injected.push(p);
        }
        let mut pairs = Vec::new();
        for a in paired_a {
            for b in paired_b {
                let mut p = a.clone();
                p.extend(b.iter().cloned());
                pairs.push(p);
            }
        }
        Ok(match kind {
            SumKind::Sum => Self::from_parts(dim, injected, pairs),
            SumKind::Max => Self::from_parts(dim, pairs, injected),
        })
    }

    /// Projective tensor product: ball = hull of `u ⊗ v` over ball vertices,
    /// coordinates ordered `(i, j) -> i * dim(other) + j`.
    pub fn projective_tensor(&self, other: &PolyhedralSpace) -> Result<Self> {
        let dim = self.dim * other.dim;
        check_cap(dim)?;
        if dim == 0 {
            return Ok(Self::zero());
        }
        let mut points = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for u in &self.vertices {
            for v in &other.vertices {
                let mut p = Vec::with_capacity(dim);
                for a in u {
                    for b in v {
                        p.push(a * b);
                    }
                }
                points.push(p);
            }
        }
        Self::from_symmetric_hull(dim, points)
    }

    /// The subspace spanned by `basis` (vectors of `self`) with the induced
    /// norm, in coordinates relative to that basis.
    pub fn induced_subspace(&self, basis: &[Point]) -> Result<Self> {
        for b in basis {
            self.check_vector(b)?;
        }
        let k = basis.len();
        let inclusion = Matrix::from_columns(basis, self.dim)?;
        if inclusion.rank() < k {
            return Err(Error::DegenerateSystem("subspace basis is linearly dependent".into()));
        }
        if k == 0 {
            return Ok(Self::zero());
        }
        let mut pulled: BTreeSet<Point> = BTreeSet::new();
        for phi in &self.facets {
            let p = inclusion.left_apply(phi);
            if p.iter().any(|x| !x.is_zero()) {
                pulled.insert(p);
            }
        }
        Self::from_facets(k, pulled.into_iter().collect())
    }
}

impl std::fmt::Debug for PolyhedralSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PolyhedralSpace")
            .field("dim", &self.dim)
            .field("vertices", &self.vertices)
            .field("facets", &self.facets)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn pt(xs: &[i64]) -> Point {
        xs.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn square_from_vertices_is_linf() {
        let k = PolyhedralSpace::from_vertices(2, vec![pt(&[1, 1]), pt(&[1, -1]), pt(&[-1, 1]), pt(&[-1, -1])]).unwrap();
        assert_eq!(k, PolyhedralSpace::linf(2));
        assert_eq!(k.facets().len(), 4);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(PolyhedralSpace::from_vertices(2, vec![pt(&[1, 0])]), Err(Error::NotSymmetric(_))));
        assert!(matches!(
            PolyhedralSpace::from_vertices(2, vec![pt(&[1, 0]), pt(&[-1, 0])]),
            Err(Error::NotFullDimensional(_))
        ));
        assert!(matches!(PolyhedralSpace::from_vertices(2, vec![]), Err(Error::EmptyInput(_))));
        assert!(matches!(
            PolyhedralSpace::from_facets(2, vec![pt(&[1, 0]), pt(&[-1, 0])]),
            Err(Error::NotFullDimensional(_))
        ));
    }

    #[test]
    fn norms() {
        let linf = PolyhedralSpace::linf(2);
        assert_eq!(linf.norm(&pt(&[3, -1])).unwrap(), Rational::from(3));
        let l1 = PolyhedralSpace::l1(2);
        assert_eq!(l1.norm(&pt(&[1, 1])).unwrap(), Rational::from(2));
        assert_eq!(l1.norm(&pt(&[0, 0])).unwrap(), Rational::zero());
        assert!(l1.norm(&pt(&[1])).is_err());
        assert_eq!(PolyhedralSpace::zero().norm(&[]).unwrap(), Rational::zero());
    }

    #[test]
    fn duality() {
        assert_eq!(PolyhedralSpace::l1(2).dual(), PolyhedralSpace::linf(2));
        let k = PolyhedralSpace::linf(3);
        assert_eq!(k.dual().dual(), k);
        assert_eq!(PolyhedralSpace::real_line().dual(), PolyhedralSpace::real_line());
    }

    #[test]
    fn sums() {
        let r = PolyhedralSpace::real_line();
        assert_eq!(r.direct_sum(&r, SumKind::Sum).unwrap(), PolyhedralSpace::l1(2));
        assert_eq!(r.direct_sum(&r, SumKind::Max).unwrap(), PolyhedralSpace::linf(2));
        let k = PolyhedralSpace::l1(3);
        assert_eq!(k.direct_sum(&PolyhedralSpace::zero(), SumKind::Sum).unwrap(), k);
        assert_eq!(PolyhedralSpace::zero().direct_sum(&k, SumKind::Max).unwrap(), k);
    }

    #[test]
    fn sums_agree_with_hull_route() {
        let a = PolyhedralSpace::linf(2);
        let b = PolyhedralSpace::l1(1);
        for kind in [SumKind::Sum, SumKind::Max] {
            let direct = a.direct_sum(&b, kind).unwrap();
            let rebuilt = PolyhedralSpace::from_vertices(3, direct.vertices().to_vec()).unwrap();
            assert_eq!(direct, rebuilt, "{kind:?}");
        }
    }

    #[test]
    fn tensor_with_real_line_is_identity() {
        let k = PolyhedralSpace::from_vertices(2, vec![pt(&[2, 1]), pt(&[-2, -1]), pt(&[0, 1]), pt(&[0, -1])]).unwrap();
        assert_eq!(PolyhedralSpace::real_line().projective_tensor(&k).unwrap(), k);
        assert_eq!(k.projective_tensor(&PolyhedralSpace::real_line()).unwrap(), k);
    }

    #[test]
    fn tensor_cap() {
        let k = PolyhedralSpace::linf(3);
        assert!(matches!(k.projective_tensor(&k), Err(Error::DimensionCapExceeded { dim: 9, .. })));
    }

    #[test]
    fn hexagon_subspace_of_cube() {
        let l = PolyhedralSpace::linf(3);
        let k = l.induced_subspace(&[pt(&[1, -1, 0]), pt(&[0, 1, -1])]).unwrap();
        assert_eq!(k.dim(), 2);
        assert_eq!(k.vertices().len(), 6);
        assert_eq!(k.facets().len(), 6);
        // (1,0) in coordinates is (1,-1,0) in the cube: norm 1.
        assert_eq!(k.norm(&[Rational::one(), Rational::zero()]).unwrap(), Rational::one());
        assert_eq!(k.norm(&[Rational::one(), Rational::one()]).unwrap(), Rational::one());
        assert_eq!(k.norm(&[q(1, 2), -Rational::one()]).unwrap(), q(3, 2));
    }
}
