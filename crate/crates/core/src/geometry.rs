//! Exact polytope conversions between facet (H) and vertex (V) descriptions.
//!
//! Both directions reduce to listing the extreme rays of a pointed cone
//! `{y : M y <= 0}`, done with the double-description method and the
//! combinatorial adjacency test. Ambient dimension is bounded by a
//! process-wide cap (see [`dim_cap`]).

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::linalg::{independent_subset, Matrix};
use crate::rational::{dot, primitive_direction, Rational};

pub const DEFAULT_DIM_CAP: usize = 6;

static DIM_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIM_CAP);

/// Current cap on the ambient dimension of any polytope conversion.
pub fn dim_cap() -> usize {
    DIM_CAP.load(Ordering::Relaxed)
}

/// Overrides the dimension cap for the rest of the process (CLI `--dim-cap`).
pub fn set_dim_cap(cap: usize) {
    DIM_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub(crate) fn check_cap(dim: usize) -> Result<()> {
    let cap = dim_cap();
    if dim > cap {
        Err(Error::DimensionCapExceeded { dim, cap })
    } else {
        Ok(())
    }
}

/// Half-space `normal . x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Self {
        Halfspace { normal, offset }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) <= self.offset
    }

    pub fn is_tight(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) == self.offset
    }
}

/// Small fixed-width bitset over constraint indices.
#[derive(Clone, PartialEq, Eq)]
struct RowSet(Vec<u64>);

impl RowSet {
    fn empty(n: usize) -> Self {
        RowSet(vec![0; n.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersect(&self, other: &RowSet) -> RowSet {
        RowSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset_of(&self, other: &RowSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    dir: Vec<Rational>,
    zeros: RowSet,
}

/// Extreme rays of the pointed cone `{y in R^d : row . y <= 0 for all rows}`,
/// each scaled to a primitive integer vector and sorted. Returns
/// `DegenerateSystem` when the cone has a nontrivial lineality space.
pub fn extreme_rays(rows: &[Vec<Rational>], d: usize) -> Result<Vec<Vec<Rational>>> {
    if d == 0 {
        return Ok(Vec::new());
    }
    let order = independent_subset(rows, d);
    if order.len() < d {
        return Err(Error::DegenerateSystem(format!(
            "constraint matrix has rank {} < {d}; cone is not pointed",
            order.len()
        )));
    }
    let basis = Matrix::from_rows(order.iter().map(|&i| rows[i].clone()).collect(), d)?;
    let inv = basis.inverse().expect("independent rows form an invertible matrix");
    let n = rows.len();

    let mut rays: Vec<Ray> = (0..d)
        .map(|k| {
            let dir: Vec<Rational> = inv.column(k).iter().map(|x| -x).collect();
            let mut zeros = RowSet::empty(n);
            for (pos, &row) in order.iter().enumerate() {
                if pos != k {
                    zeros.insert(row);
                }
            }
            Ray {
                dir: primitive_direction(&dir),
                zeros,
            }
        })
        .collect();

    let in_basis: BTreeSet<usize> = order.iter().copied().collect();
    let mut processed: Vec<usize> = order.clone();
    for row in (0..n).filter(|i| !in_basis.contains(i)) {
        let a = &rows[row];
        let values: Vec<Rational> = rays.iter().map(|r| dot(a, &r.dir)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        processed.push(row);

        let mut next: Vec<Ray> = Vec::new();
        for &p in &plus {
            for &m in &minus {
                let common = rays[p].zeros.intersect(&rays[m].zeros);
                if common.count() + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&k| k != p && k != m)
                    .all(|k| !common.is_subset_of(&rays[k].zeros));
                if !adjacent {
                    continue;
                }
                let vp = &values[p];
                let vm = -&values[m];
                let dir: Vec<Rational> = rays[m]
                    .dir
                    .iter()
                    .zip(&rays[p].dir)
                    .map(|(xm, xp)| vp * xm + &vm * xp)
                    .collect();
                let mut zeros = common;
                zeros.insert(row);
                next.push(Ray {
                    dir: primitive_direction(&dir),
                    zeros,
                });
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + next.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if values[i].is_positive() {
                continue;
            }
            if values[i].is_zero() {
                r.zeros.insert(row);
            }
            kept.push(r);
        }
        kept.extend(next);
        rays = kept;
    }

    let mut out: Vec<Vec<Rational>> = rays.into_iter().map(|r| r.dir).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Vertices of the bounded, full-dimensional polytope `{x : a_i . x <= b_i}`.
pub fn vertex_enumerate(facets: &[Halfspace], dim: usize) -> Result<Vec<Vec<Rational>>> {
    check_cap(dim)?;
    if let Some(h) = facets.iter().find(|h| h.normal.len() != dim) {
        return Err(Error::mismatch(dim, h.normal.len()));
    }
    if dim == 0 {
        return if facets.iter().all(|h| !h.offset.is_negative()) {
            Ok(vec![Vec::new()])
        } else {
            Err(Error::DegenerateSystem("empty polytope".into()))
        };
    }
    // Homogenize: (x, t) with a.x - b t <= 0 and -t <= 0.
    let mut rows: Vec<Vec<Rational>> = facets
        .iter()
        .map(|h| {
            let mut r = h.normal.clone();
            r.push(-&h.offset);
            r
        })
        .collect();
    let mut t_row = vec![Rational::zero(); dim + 1];
    t_row[dim] = -Rational::one();
    rows.push(t_row);

    let rays = match extreme_rays(&rows, dim + 1) {
        Ok(r) => r,
        // A lineality space of the homogenized cone is a recession line.
        Err(Error::DegenerateSystem(_)) => return Err(Error::UnboundedPolytope),
        Err(e) => return Err(e),
    };
    let mut vertices = Vec::new();
    for ray in rays {
        let t = &ray[dim];
        if t.is_zero() {
            return Err(Error::UnboundedPolytope);
        }
        vertices.push(ray[..dim].iter().map(|x| x / t).collect::<Vec<_>>());
    }
    if vertices.is_empty() {
        return Err(Error::DegenerateSystem("empty polytope".into()));
    }
    vertices.sort();
    vertices.dedup();
    if affine_rank(&vertices) < dim {
        return Err(Error::DegenerateSystem(format!(
            "polytope is not full-dimensional in R^{dim}"
        )));
    }
    Ok(vertices)
}

/// Irredundant facet description of the convex hull of `points`, each facet
/// scaled so that `(normal, offset)` is a primitive integer vector.
pub fn convex_hull_facets(points: &[Vec<Rational>], dim: usize) -> Result<Vec<Halfspace>> {
    check_cap(dim)?;
    if points.is_empty() {
        return Err(Error::EmptyInput("no points".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::mismatch(dim, p.len()));
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    // Valid inequalities (alpha, gamma) with alpha.p + gamma <= 0 for every p
    // form the polar cone; its extreme rays are the facets alpha.x <= -gamma.
    let rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| {
            let mut r = p.clone();
            r.push(Rational::one());
            r
        })
        .collect();
    let rays = extreme_rays(&rows, dim + 1).map_err(|_| {
        Error::DegenerateSystem(format!("points do not span R^{dim} affinely"))
    })?;
    let mut facets: Vec<Halfspace> = rays
        .into_iter()
        .filter(|r| r[..dim].iter().any(|x| !x.is_zero()))
        .map(|mut r| {
            let gamma = r.pop().expect("dimension >= 1");
            Halfspace::new(r, -gamma)
        })
        .collect();
    facets.sort();
    Ok(facets)
}

/// Extreme points among `points` (as a sorted, deduplicated set).
pub fn extreme_points(points: &[Vec<Rational>], dim: usize) -> Result<Vec<Vec<Rational>>> {
    let facets = convex_hull_facets(points, dim)?;
    let mut out: Vec<Vec<Rational>> = points
        .iter()
        .filter(|p| facets.iter().filter(|h| h.is_tight(p)).count() >= dim)
        .filter(|p| {
            // Tight on >= dim facets is necessary; the tight normals must also span.
            let tight: Vec<Vec<Rational>> = facets
                .iter()
                .filter(|h| h.is_tight(p))
                .map(|h| h.normal.clone())
                .collect();
            Matrix::from_rows(tight, dim).map(|m| m.rank() == dim).unwrap_or(false)
        })
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Dimension of the affine hull of a point set (`-1` is reported as 0 for the empty set).
pub fn affine_rank(points: &[Vec<Rational>]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    Matrix::from_rows(diffs, first.len()).map(|m| m.rank()).unwrap_or(0)
}
