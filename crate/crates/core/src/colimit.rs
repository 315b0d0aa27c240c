//! Approximate pushouts and finite chains.
//!
//! The `eps`-pushout of `f: A -> B` and `g: A -> C` lives on `B ⊕ C` with
//! the norm
//!
//! ```text
//! ||(x, y)|| = inf { ||b|| + ||c|| + eps ||a|| : x = b + f a, y = c - g a }
//! ```
//!
//! For `eps > 0` its ball is the hull of the two summand balls and the
//! image of `(1/eps) Ball_A` under `a -> (f a, -g a)`. For `eps = 0` the
//! relations are exact and the apex is the quotient of the sum by
//! `N = {(f a, -g a)}`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::check_cap;
use crate::linalg::{independent_subset, rref, Matrix};
use crate::map::{compose, LinearMap};
use crate::oplp::{Bound, OperatorLp};
use crate::rational::Rational;
use crate::space::{PolyhedralSpace, SpaceRef, SumKind};

#[derive(Debug, Clone)]
pub struct EpsPushout {
    eps: Rational,
    f: LinearMap,
    g: LinearMap,
    apex: SpaceRef,
    leg_from_b: LinearMap,
    leg_from_c: LinearMap,
    relation_basis: Vec<Vec<Rational>>,
    // B ⊕ C -> D and a right inverse D -> B ⊕ C; identities when eps > 0.
    quotient: Matrix,
    section: Matrix,
}

fn check_norm(f: &LinearMap) -> Result<()> {
    let n = f.operator_norm();
    if n > Rational::one() {
        return Err(Error::NormTooLarge { norm: n.to_string() });
    }
    Ok(())
}

fn injections(b: usize, c: usize) -> (Matrix, Matrix) {
    let ib = Matrix::from_fn(b + c, b, |i, j| if i == j { Rational::one() } else { Rational::zero() });
    let ic = Matrix::from_fn(b + c, c, |i, j| if i == b + j { Rational::one() } else { Rational::zero() });
    (ib, ic)
}

/// Builds the `eps`-pushout of `f: A -> B` and `g: A -> C`.
pub fn eps_pushout(f: &LinearMap, g: &LinearMap, eps: &Rational) -> Result<EpsPushout> {
    if f.domain() != g.domain() {
        return Err(if f.domain().dim() != g.domain().dim() {
            Error::mismatch(f.domain().dim(), g.domain().dim())
        } else {
            Error::PreconditionViolated("the two maps have different domains".into())
        });
    }
    if eps.is_negative() {
        return Err(Error::PreconditionViolated("eps must be nonnegative".into()));
    }
    check_norm(f)?;
    check_norm(g)?;
    let b = f.codomain().dim();
    let c = g.codomain().dim();
    check_cap(b + c)?;
    let relation = f.matrix().vcat(&g.matrix().scale(&-Rational::one()));
    let (ib, ic) = injections(b, c);

    if !eps.is_zero() {
        let inv = eps.recip();
        let sum = f.codomain().direct_sum(g.codomain(), SumKind::Sum)?;
        let mut points = sum.vertices().to_vec();
        for v in f.domain().vertices() {
            points.push(relation.apply(v).iter().map(|x| x * &inv).collect());
        }
        let apex = Arc::new(PolyhedralSpace::from_symmetric_hull(b + c, points)?);
        let leg_from_b = LinearMap::new(f.codomain().clone(), apex.clone(), ib)?;
        let leg_from_c = LinearMap::new(g.codomain().clone(), apex.clone(), ic)?;
        let relation_basis = relation_basis(&relation);
        return Ok(EpsPushout {
            eps: eps.clone(),
            f: f.clone(),
            g: g.clone(),
            apex,
            leg_from_b,
            leg_from_c,
            relation_basis,
            quotient: Matrix::identity(b + c),
            section: Matrix::identity(b + c),
        });
    }

    let basis = relation_basis(&relation);
    let (quotient, section) = quotient_coordinates(&basis, b + c);
    let sum = f.codomain().direct_sum(g.codomain(), SumKind::Sum)?;
    let d = quotient.rows();
    let apex = if d == 0 {
        Arc::new(PolyhedralSpace::zero())
    } else {
        let points = sum.vertices().iter().map(|v| quotient.apply(v)).collect();
        Arc::new(PolyhedralSpace::from_symmetric_hull(d, points)?)
    };
    let leg_from_b = LinearMap::new(f.codomain().clone(), apex.clone(), quotient.mul(&ib))?;
    let leg_from_c = LinearMap::new(g.codomain().clone(), apex.clone(), quotient.mul(&ic))?;
    Ok(EpsPushout {
        eps: eps.clone(),
        f: f.clone(),
        g: g.clone(),
        apex,
        leg_from_b,
        leg_from_c,
        relation_basis: basis,
        quotient,
        section,
    })
}

/// Basis of the column space of `relation` (the image of `a -> (f a, -g a)`).
fn relation_basis(relation: &Matrix) -> Vec<Vec<Rational>> {
    let columns: Vec<Vec<Rational>> = (0..relation.cols()).map(|j| relation.column(j)).collect();
    independent_subset(&columns, relation.rows())
        .into_iter()
        .map(|j| columns[j].clone())
        .collect()
}

/// Reduction modulo `span(basis)`: the coordinates of the quotient are the
/// non-pivot coordinates after eliminating the pivots of the reduced basis.
fn quotient_coordinates(basis: &[Vec<Rational>], n: usize) -> (Matrix, Matrix) {
    let reduced = rref(basis.to_vec(), n);
    let free: Vec<usize> = (0..n).filter(|j| !reduced.pivots.contains(j)).collect();
    // z -> z - sum_i z[p_i] r_i, then keep the free coordinates.
    let quotient = Matrix::from_fn(free.len(), n, |i, j| {
        let col = free[i];
        let mut value = if col == j { Rational::one() } else { Rational::zero() };
        for (r, &p) in reduced.rows.iter().zip(&reduced.pivots) {
            if p == j {
                value -= &r[col];
            }
        }
        value
    });
    let section = Matrix::from_fn(n, free.len(), |i, j| {
        if free[j] == i {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    (quotient, section)
}

impl EpsPushout {
    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn apex(&self) -> &SpaceRef {
        &self.apex
    }

    /// `ḡ: B -> D`, the leg opposite to `g`.
    pub fn leg_from_b(&self) -> &LinearMap {
        &self.leg_from_b
    }

    /// `f̄: C -> D`, the leg opposite to `f`.
    pub fn leg_from_c(&self) -> &LinearMap {
        &self.leg_from_c
    }

    pub fn input(&self) -> (&LinearMap, &LinearMap) {
        (&self.f, &self.g)
    }

    /// Basis of `N = {(f a, -g a)}` inside `B ⊕ C`.
    pub fn relation_basis(&self) -> &[Vec<Rational>] {
        &self.relation_basis
    }

    /// `||ḡ f - f̄ g||`.
    pub fn commutativity_defect(&self) -> Rational {
        let lhs = compose(&self.leg_from_b, &self.f).expect("legs compose");
        let rhs = compose(&self.leg_from_c, &self.g).expect("legs compose");
        lhs.distance(&rhs).expect("parallel maps")
    }

    /// The two legs jointly span the apex, so a mediator is unique.
    pub fn legs_span_apex(&self) -> bool {
        self.leg_from_b.matrix().hcat(self.leg_from_c.matrix()).rank() == self.apex.dim()
    }

    /// Coordinates in `D` of the class of `(x, y)` in `B ⊕ C`.
    pub fn class_of(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
        self.f.codomain().check_vector(x)?;
        self.g.codomain().check_vector(y)?;
        let mut z = x.to_vec();
        z.extend_from_slice(y);
        Ok(self.quotient.apply(&z))
    }
}

/// The unique `t: D -> D'` with `t f̄ = f'` and `t ḡ = g'`, for a cocone
/// `(f': C -> D', g': B -> D')` with `||g' f - f' g|| <= eps`.
pub fn pushout_mediator(p: &EpsPushout, f_prime: &LinearMap, g_prime: &LinearMap) -> Result<LinearMap> {
    if f_prime.codomain() != g_prime.codomain() {
        return Err(Error::PreconditionViolated("cocone legs have different codomains".into()));
    }
    if f_prime.domain() != p.g.codomain() {
        return Err(Error::mismatch(p.g.codomain().dim(), f_prime.domain().dim()));
    }
    if g_prime.domain() != p.f.codomain() {
        return Err(Error::mismatch(p.f.codomain().dim(), g_prime.domain().dim()));
    }
    check_norm(f_prime)?;
    check_norm(g_prime)?;
    let distance = compose(g_prime, &p.f)?.distance(&compose(f_prime, &p.g)?)?;
    if distance > p.eps {
        return Err(Error::NotEpsCommutative {
            distance: distance.to_string(),
            eps: p.eps.to_string(),
        });
    }
    let joint = g_prime.matrix().hcat(f_prime.matrix());
    if p.eps.is_zero() && p.relation_basis.iter().any(|n| joint.apply(n).iter().any(|x| !x.is_zero())) {
        return Err(Error::NotEpsCommutative {
            distance: distance.to_string(),
            eps: p.eps.to_string(),
        });
    }
    let t = LinearMap::new(p.apex.clone(), f_prime.codomain().clone(), joint.mul(&p.section))?;
    debug_assert!(compose(&t, &p.leg_from_c).unwrap().matrix() == f_prime.matrix());
    debug_assert!(compose(&t, &p.leg_from_b).unwrap().matrix() == g_prime.matrix());
    Ok(t)
}

/// A finite chain `K_0 -> K_1 -> ... -> K_N` of norm-one links.
#[derive(Debug, Clone)]
pub struct Chain {
    spaces: Vec<SpaceRef>,
    links: Vec<LinearMap>,
    // composites[i][j - i] = k_ij
    composites: Vec<Vec<LinearMap>>,
}

impl Chain {
    pub fn new(links: Vec<LinearMap>) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::EmptyInput("a chain needs at least one link; use Chain::single".into()));
        }
        for pair in links.windows(2) {
            if pair[0].codomain() != pair[1].domain() {
                return Err(Error::mismatch(pair[0].codomain().dim(), pair[1].domain().dim()));
            }
        }
        for k in &links {
            check_norm(k)?;
        }
        let mut spaces = vec![links[0].domain().clone()];
        spaces.extend(links.iter().map(|k| k.codomain().clone()));
        Ok(Self::assemble(spaces, links))
    }

    pub fn single(space: SpaceRef) -> Self {
        Self::assemble(vec![space], Vec::new())
    }

    fn assemble(spaces: Vec<SpaceRef>, links: Vec<LinearMap>) -> Self {
        let composites = (0..spaces.len())
            .map(|i| {
                let mut row = vec![LinearMap::identity(spaces[i].clone())];
                for link in &links[i..] {
                    let next = compose(link, row.last().unwrap()).expect("composable links");
                    row.push(next);
                }
                row
            })
            .collect();
        Chain {
            spaces,
            links,
            composites,
        }
    }

    /// Index of the last space.
    pub fn last(&self) -> usize {
        self.spaces.len() - 1
    }

    pub fn spaces(&self) -> &[SpaceRef] {
        &self.spaces
    }

    pub fn links(&self) -> &[LinearMap] {
        &self.links
    }

    /// `k_ij: K_i -> K_j` for `i <= j`.
    pub fn composite(&self, i: usize, j: usize) -> Result<&LinearMap> {
        let len = self.spaces.len();
        if j >= len {
            return Err(Error::StageOutOfRange { stage: j, len });
        }
        if i > j {
            return Err(Error::StageOutOfRange { stage: i, len: j + 1 });
        }
        Ok(&self.composites[i][j - i])
    }
}

/// `d_j = ||k_ij f - k_ij g||` for `j = i, ..., N`.
pub fn chain_colimit_distance(ch: &Chain, stage: usize, f: &LinearMap, g: &LinearMap) -> Result<Vec<Rational>> {
    let len = ch.spaces.len();
    if stage >= len {
        return Err(Error::StageOutOfRange { stage, len });
    }
    if f.codomain() != &ch.spaces[stage] || g.codomain() != &ch.spaces[stage] {
        return Err(Error::mismatch(ch.spaces[stage].dim(), f.codomain().dim()));
    }
    let diff = f.sub(g)?;
    (stage..len)
        .map(|j| Ok(compose(ch.composite(stage, j)?, &diff)?.operator_norm()))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Factorization {
    pub stage: usize,
    pub map: LinearMap,
    /// `||k_iN g - f||` for the returned `g`.
    pub distance: Rational,
    /// Best achievable distance at each stage `0..=N`.
    pub stage_distances: Vec<Rational>,
}

/// Least `(i, g: A -> K_i)` with `||g|| <= 1` and `||k_iN g - f|| <= eps`.
pub fn factor_through_stage(ch: &Chain, f: &LinearMap, eps: &Rational) -> Result<Factorization> {
    let last = ch.last();
    if f.codomain() != &ch.spaces[last] {
        return Err(Error::mismatch(ch.spaces[last].dim(), f.codomain().dim()));
    }
    if eps.is_negative() {
        return Err(Error::PreconditionViolated("eps must be nonnegative".into()));
    }
    let best: Vec<(Rational, Matrix)> = (0..=last)
        .into_par_iter()
        .map(|i| best_factor(ch, i, f, &Rational::one()))
        .collect::<Option<Vec<_>>>()
        .expect("the zero map is always feasible");
    let stage = best.iter().position(|(d, _)| d <= eps).expect("stage N with g = f has distance 0");
    let map = LinearMap::new(f.domain().clone(), ch.spaces[stage].clone(), best[stage].1.clone())?;
    let distance = compose(ch.composite(stage, last)?, &map)?.distance(f)?;
    debug_assert_eq!(distance, best[stage].0);
    Ok(Factorization {
        stage,
        map,
        distance,
        stage_distances: best.into_iter().map(|(d, _)| d).collect(),
    })
}

/// `min ||k_iN X - f||` over `||X|| <= bound`.
fn best_factor(ch: &Chain, i: usize, f: &LinearMap, bound: &Rational) -> Option<(Rational, Matrix)> {
    let last = ch.last();
    let k = ch.composite(i, last).expect("stage in range");
    let a = f.domain();
    let target = &ch.spaces[i];
    let mut op = OperatorLp::new(target.dim(), a.dim());
    op.norm_bound(a, target, None, None, None, Bound::Fixed(bound));
    op.norm_bound(a, &ch.spaces[last], Some(k.matrix()), None, Some(f.matrix()), Bound::Slack);
    op.solve()
}

/// Factorization by the rescaling argument: with `eps' = eps / 2`, find
/// `f*` at stage `i` with `||f*|| <= 1 + eps'` and `||k_iN f* - f|| <= eps'`,
/// then `g = f* / (1 + eps')` has norm at most one and `||k_iN g - f|| <= eps`.
/// Returns the least stage where this works.
pub fn factor_by_rescaling(ch: &Chain, f: &LinearMap, eps: &Rational) -> Result<Factorization> {
    let last = ch.last();
    if f.codomain() != &ch.spaces[last] {
        return Err(Error::mismatch(ch.spaces[last].dim(), f.codomain().dim()));
    }
    if !eps.is_positive() {
        return Err(Error::PreconditionViolated("eps must be positive".into()));
    }
    let half = eps / &Rational::from(2);
    let stretch = Rational::one() + &half;
    let best: Vec<(Rational, Matrix)> = (0..=last)
        .into_par_iter()
        .map(|i| best_factor(ch, i, f, &stretch))
        .collect::<Option<Vec<_>>>()
        .expect("the zero map is always feasible");
    let stage = best.iter().position(|(d, _)| *d <= half).expect("stage N with f* = f works");
    let map = LinearMap::new(f.domain().clone(), ch.spaces[stage].clone(), best[stage].1.scale(&stretch.recip()))?;
    let distance = compose(ch.composite(stage, last)?, &map)?.distance(f)?;
    assert!(map.operator_norm() <= Rational::one() && distance <= *eps, "rescaling bound failed");
    Ok(Factorization {
        stage,
        map,
        distance,
        stage_distances: best.into_iter().map(|(d, _)| d).collect(),
    })
}
