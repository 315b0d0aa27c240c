//! Ideals, retractions and pure squares.
//!
//! An isometric embedding `f: K -> L` is an ideal when extension operators
//! `t: L -> K` with `t f = id` exist of norm arbitrarily close to one. In
//! finite dimension the best such `t` is attained, so the question becomes
//! a single linear program.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::map::{compose, LinearMap};
use crate::oplp::{Bound, OperatorLp};
use crate::rational::Rational;
use crate::space::{PolyhedralSpace, SpaceRef};

/// An isometric embedding `f: K -> L`.
#[derive(Debug, Clone)]
pub struct Embedding {
    map: LinearMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefectKind {
    Ideal,
    Retraction,
    Square,
    Saturation,
    Injectivity,
}

impl DefectKind {
    pub fn name(self) -> &'static str {
        match self {
            DefectKind::Ideal => "ideal",
            DefectKind::Retraction => "retraction",
            DefectKind::Square => "square",
            DefectKind::Saturation => "saturation",
            DefectKind::Injectivity => "injectivity",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DefectReport {
    pub kind: DefectKind,
    pub value: Rational,
    /// Optimal map; evaluating the defining objective at it gives `value`.
    pub witness: Option<LinearMap>,
    /// For max-min defects, the inner problem attaining the maximum.
    pub probe: Option<LinearMap>,
}

impl DefectReport {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl Embedding {
    pub fn new(map: LinearMap) -> Result<Self> {
        if !map.is_isometry() {
            let d = map.isometry_defect();
            return Err(Error::NotAnIsometry(format!("defect upper {} lower {}", d.upper, d.lower)));
        }
        Ok(Embedding { map })
    }

    /// `span(basis) ⊆ L` with the induced norm, embedded by inclusion.
    pub fn from_subspace(ambient: SpaceRef, basis: &[Vec<Rational>]) -> Result<Self> {
        let sub = Arc::new(ambient.induced_subspace(basis)?);
        let matrix = Matrix::from_columns(basis, ambient.dim())?;
        Embedding::new(LinearMap::new(sub, ambient, matrix)?)
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn subspace(&self) -> &SpaceRef {
        self.map.domain()
    }

    pub fn ambient(&self) -> &SpaceRef {
        self.map.codomain()
    }

    /// Basis of `f[K]` in `L`: the images of the coordinate vectors of `K`.
    pub fn intersection_basis(&self) -> Vec<Vec<Rational>> {
        (0..self.map.matrix().cols()).map(|j| self.map.matrix().column(j)).collect()
    }
}

/// `min ||t|| - 1` over `t: L -> K` with `t f = id_K`, clamped at zero.
pub fn ideal_defect(e: &Embedding) -> DefectReport {
    let k = e.subspace();
    let l = e.ambient();
    let mut op = OperatorLp::new(k.dim(), l.dim());
    op.norm_bound(l, k, None, None, None, Bound::Slack);
    op.equal(None, Some(e.map.matrix()), &Matrix::identity(k.dim()));
    let (norm, x) = op.solve().expect("an isometry has a left inverse");
    let t = LinearMap::new(l.clone(), k.clone(), x).expect("shape from the program");
    debug_assert_eq!(t.operator_norm(), norm);
    DefectReport {
        kind: DefectKind::Ideal,
        value: (norm - Rational::one()).positive_part(),
        witness: Some(t),
        probe: None,
    }
}

/// `min ||t g - u||` over `t: B -> K` with `||t|| <= 1`, for `g: A -> B`
/// and `u: A -> K`.
pub fn best_factorization(g: &LinearMap, u: &LinearMap) -> Result<DefectReport> {
    if g.domain() != u.domain() {
        return Err(Error::mismatch(g.domain().dim(), u.domain().dim()));
    }
    let a = g.domain();
    let b = g.codomain();
    let k = u.codomain();
    let mut op = OperatorLp::new(k.dim(), b.dim());
    op.norm_bound(b, k, None, None, None, Bound::Fixed(&Rational::one()));
    op.norm_bound(a, k, None, Some(g.matrix()), Some(u.matrix()), Bound::Slack);
    let (value, x) = op.solve().expect("the zero map is feasible");
    let t = LinearMap::new(b.clone(), k.clone(), x)?;
    debug_assert_eq!(compose(&t, g)?.distance(u)?, value);
    Ok(DefectReport {
        kind: DefectKind::Square,
        value,
        witness: Some(t),
        probe: None,
    })
}

/// `min ||s f - id_K||` over `s: L -> K` with `||s|| <= 1`.
pub fn retraction_defect(f: &LinearMap) -> Result<DefectReport> {
    let n = f.operator_norm();
    if n > Rational::one() {
        return Err(Error::NormTooLarge { norm: n.to_string() });
    }
    let mut report = best_factorization(f, &LinearMap::identity(f.domain().clone()))?;
    report.kind = DefectKind::Retraction;
    Ok(report)
}

/// Factorization defect of a commuting square `f u = v g` back through `g`.
pub fn pure_square_defect(e: &Embedding, g: &LinearMap, u: &LinearMap, v: &LinearMap) -> Result<DefectReport> {
    if u.codomain() != e.subspace() {
        return Err(Error::mismatch(e.subspace().dim(), u.codomain().dim()));
    }
    if v.codomain() != e.ambient() {
        return Err(Error::mismatch(e.ambient().dim(), v.codomain().dim()));
    }
    if g.codomain() != v.domain() {
        return Err(Error::mismatch(v.domain().dim(), g.codomain().dim()));
    }
    if g.domain() != u.domain() {
        return Err(Error::mismatch(u.domain().dim(), g.domain().dim()));
    }
    if compose(e.map(), u)?.matrix() != compose(v, g)?.matrix() {
        return Err(Error::SquareNotCommuting);
    }
    best_factorization(g, u)
}

/// The square `A = K`, `B = L`, `g = f`, `u = id_K`, `v = id_L`. Its
/// defect is positive exactly when the embedding is not an ideal.
pub fn canonical_square(e: &Embedding) -> (LinearMap, LinearMap, LinearMap) {
    (
        e.map.clone(),
        LinearMap::identity(e.subspace().clone()),
        LinearMap::identity(e.ambient().clone()),
    )
}

/// Checks a candidate `t: B -> K` for a subspace `b: B -> L`: `t` must fix
/// `K ∩ B` and be a strong `eps`-isometry.
pub fn verify_u_extension_candidate(e: &Embedding, b: &LinearMap, t: &LinearMap, eps: &Rational) -> Result<bool> {
    if b.codomain() != e.ambient() {
        return Err(Error::mismatch(e.ambient().dim(), b.codomain().dim()));
    }
    if t.domain() != b.domain() {
        return Err(Error::mismatch(b.domain().dim(), t.domain().dim()));
    }
    if t.codomain() != e.subspace() {
        return Err(Error::mismatch(e.subspace().dim(), t.codomain().dim()));
    }
    // Pairs (x, y) with b x = f y span the intersection.
    let joint = b.matrix().hcat(&e.map.matrix().scale(&-Rational::one()));
    let nb = b.domain().dim();
    for w in joint.nullspace() {
        let (x, y) = w.split_at(nb);
        if t.matrix().apply(x) != y {
            return Ok(false);
        }
    }
    Ok(t.isometry_defect().is_strong_isometry(eps))
}

#[derive(Debug, Clone)]
pub struct Repair {
    pub map: LinearMap,
    /// Allowed error per fixed basis vector, `eps / (n M)`.
    pub delta: Rational,
    /// `M`: the largest basis coefficient of a unit-ball vertex.
    pub coefficient_bound: Rational,
    /// `||t - t'||`, recomputed exactly.
    pub distance: Rational,
}

/// Corrects `t': B -> K` so that `basis[i] -> targets[i]` for the first
/// `targets.len()` basis vectors, leaving the rest unchanged.
///
/// Requires `||t' e_i - y_i|| <= delta = eps / (n M)`; then every unit vector
/// `x = sum a_i e_i` has `|a_i| <= M`, so the correction moves it by at most
/// `n M delta = eps`.
pub fn repair_fix_basis(
    t_prime: &LinearMap,
    basis: &[Vec<Rational>],
    targets: &[Vec<Rational>],
    eps: &Rational,
) -> Result<Repair> {
    let b = t_prime.domain();
    let k = t_prime.codomain();
    let n = b.dim();
    if basis.len() != n {
        return Err(Error::mismatch(n, basis.len()));
    }
    if targets.len() > n {
        return Err(Error::mismatch(n, targets.len()));
    }
    for y in targets {
        k.check_vector(y)?;
    }
    let e = Matrix::from_columns(basis, n)?;
    let e_inv = e
        .inverse()
        .ok_or_else(|| Error::DegenerateSystem("repair basis is not a basis".into()))?;
    if n == 0 || targets.is_empty() {
        return Ok(Repair {
            map: t_prime.clone(),
            delta: eps.clone(),
            coefficient_bound: Rational::zero(),
            distance: Rational::zero(),
        });
    }
    let coefficient_bound = b
        .vertices()
        .iter()
        .flat_map(|v| e_inv.apply(v))
        .map(|a| a.abs())
        .max()
        .expect("nonempty ball");
    let delta = eps / &(Rational::from(n as i64) * &coefficient_bound);
    let mut errors = Vec::with_capacity(targets.len());
    for (i, y) in targets.iter().enumerate() {
        let image = t_prime.matrix().apply(&basis[i]);
        let err: Vec<Rational> = y.iter().zip(&image).map(|(a, b)| a - b).collect();
        let size = k.norm_of(&err);
        if size > delta {
            return Err(Error::PreconditionViolated(format!(
                "basis vector {i} is moved by {size}, more than delta = {delta}"
            )));
        }
        errors.push(err);
    }
    // Correction sends e_i to y_i - t' e_i for fixed indices and kills the rest.
    let mut columns = errors;
    columns.resize(n, vec![Rational::zero(); k.dim()]);
    let in_basis = Matrix::from_columns(&columns, k.dim())?;
    let correction = LinearMap::new(b.clone(), k.clone(), in_basis.mul(&e_inv))?;
    let map = t_prime.add(&correction)?;
    let distance = correction.operator_norm();
    assert!(distance <= *eps, "repair exceeded its certified bound");
    Ok(Repair {
        map,
        delta,
        coefficient_bound,
        distance,
    })
}

/// The canonical map `K -> K**` (the identity in these coordinates).
pub fn bidual_embedding(k: &PolyhedralSpace) -> LinearMap {
    let dom = Arc::new(k.clone());
    let bidual = Arc::new(k.dual().dual());
    LinearMap::new(dom, bidual, Matrix::identity(k.dim())).expect("same dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn arc(k: PolyhedralSpace) -> SpaceRef {
        Arc::new(k)
    }

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    fn pt(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| r(x)).collect()
    }

    #[test]
    fn identity_is_ideal() {
        let l = arc(PolyhedralSpace::l1(2));
        let e = Embedding::new(LinearMap::identity(l.clone())).unwrap();
        let d = ideal_defect(&e);
        assert_eq!(d.value, r(0));
        assert_eq!(d.witness.unwrap(), LinearMap::identity(l));
    }

    #[test]
    fn coordinate_line_in_cube() {
        let e = Embedding::from_subspace(arc(PolyhedralSpace::linf(2)), &[pt(&[1, 0])]).unwrap();
        assert_eq!(ideal_defect(&e).value, r(0));
    }

    #[test]
    fn hyperplane_in_cube() {
        let e = Embedding::from_subspace(arc(PolyhedralSpace::linf(3)), &[pt(&[1, -1, 0]), pt(&[0, 1, -1])]).unwrap();
        let d = ideal_defect(&e);
        assert_eq!(d.value, q(1, 3));
        assert_eq!(d.witness.unwrap().operator_norm(), q(4, 3));
        let (g, u, v) = canonical_square(&e);
        assert!(pure_square_defect(&e, &g, &u, &v).unwrap().value.is_positive());
    }

    #[test]
    fn not_an_isometry() {
        let line = arc(PolyhedralSpace::real_line());
        let half = LinearMap::identity(line).scale(&q(1, 2));
        assert!(matches!(Embedding::new(half), Err(Error::NotAnIsometry(_))));
    }

    #[test]
    fn retractions() {
        let line = arc(PolyhedralSpace::real_line());
        let diag = LinearMap::new(line.clone(), arc(PolyhedralSpace::linf(2)), Matrix::from_rows(vec![pt(&[1]), pt(&[1])], 1).unwrap()).unwrap();
        assert_eq!(retraction_defect(&diag).unwrap().value, r(0));
        let first = LinearMap::new(line.clone(), arc(PolyhedralSpace::l1(2)), Matrix::from_rows(vec![pt(&[1]), pt(&[0])], 1).unwrap()).unwrap();
        assert_eq!(retraction_defect(&first).unwrap().value, r(0));
        assert_eq!(retraction_defect(&LinearMap::identity(line)).unwrap().value, r(0));
    }

    #[test]
    fn square_must_commute() {
        let line = arc(PolyhedralSpace::real_line());
        let e = Embedding::new(LinearMap::identity(line.clone())).unwrap();
        let id = LinearMap::identity(line.clone());
        let half = id.scale(&q(1, 2));
        assert!(matches!(pure_square_defect(&e, &id, &id, &half), Err(Error::SquareNotCommuting)));
        assert_eq!(pure_square_defect(&e, &id, &half, &half).unwrap().value, r(0));
    }

    #[test]
    fn u_extension_candidates() {
        let l = arc(PolyhedralSpace::linf(2));
        let e = Embedding::new(LinearMap::identity(l.clone())).unwrap();
        let id = LinearMap::identity(l.clone());
        assert!(verify_u_extension_candidate(&e, &id, &id, &r(0)).unwrap());
        let big = id.scale(&q(3, 2));
        // Fixes nothing correctly, since K ∩ B = L.
        assert!(!verify_u_extension_candidate(&e, &id, &big, &r(1)).unwrap());

        // B = span{(1,1)} in l_inf^2, K = span{e_1}: K ∩ B = 0.
        let k = Embedding::from_subspace(l.clone(), &[pt(&[1, 0])]).unwrap();
        let b = Embedding::from_subspace(l.clone(), &[pt(&[1, 1])]).unwrap();
        let t = LinearMap::new(b.subspace().clone(), k.subspace().clone(), Matrix::identity(1)).unwrap();
        assert!(verify_u_extension_candidate(&k, b.map(), &t, &r(0)).unwrap());
        let low = t.scale(&q(1, 2));
        assert!(!verify_u_extension_candidate(&k, b.map(), &low, &q(1, 2)).unwrap());
        assert!(verify_u_extension_candidate(&k, b.map(), &low, &r(1)).unwrap());
    }

    #[test]
    fn repairs() {
        let l = arc(PolyhedralSpace::linf(2));
        let basis = vec![pt(&[1, 0]), pt(&[0, 1])];
        let id = LinearMap::identity(l.clone());
        let same = repair_fix_basis(&id, &basis, &basis[..1], &q(1, 2)).unwrap();
        assert_eq!(same.map, id);
        assert_eq!(same.distance, r(0));

        // M = 1, n = 2: delta = eps / 2.
        let eps = q(1, 2);
        let t_prime = LinearMap::new(l.clone(), l.clone(), Matrix::from_rows(vec![vec![r(1), r(0)], vec![q(1, 4), r(1)]], 2).unwrap()).unwrap();
        let fixed = repair_fix_basis(&t_prime, &basis, &basis[..1], &eps).unwrap();
        assert_eq!(fixed.delta, q(1, 4));
        assert_eq!(fixed.map, id);
        assert!(fixed.distance <= eps);
        assert!(matches!(repair_fix_basis(&t_prime, &basis, &basis[..1], &q(1, 3)), Err(Error::PreconditionViolated(_))));
        let none = repair_fix_basis(&t_prime, &basis, &[], &eps).unwrap();
        assert_eq!(none.map, t_prime);
    }

    #[test]
    fn bidual_is_ideal() {
        let k = PolyhedralSpace::l1(3);
        let j = bidual_embedding(&k);
        let e = Embedding::new(j.clone()).unwrap();
        assert_eq!(ideal_defect(&e).value, r(0));
        assert_eq!(retraction_defect(&j).unwrap().value, r(0));
    }
}
