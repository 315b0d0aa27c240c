//! Approximate injectivity and saturation with respect to isometries.
//!
//! `K` is approximately injective to `h: A -> B` when every `f: A -> K` of
//! norm at most one nearly extends along `h`. The best extension error is a
//! convex function of `f`, so its maximum over the operator ball is attained
//! at a vertex of that polytope.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::check_cap;
use crate::linalg::{independent_subset, Matrix};
use crate::map::{compose, LinearMap};
use crate::purity::{best_factorization, DefectKind, DefectReport};
use crate::rational::Rational;
use crate::space::{PolyhedralSpace, SpaceRef, SumKind};

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub map: LinearMap,
    pub isometry: bool,
}

/// Named maps of norm at most one, each flagged as isometry or not.
#[derive(Debug, Clone, Default)]
pub struct MorphismCatalog {
    entries: Vec<CatalogEntry>,
}

impl MorphismCatalog {
    pub fn new(maps: Vec<(String, LinearMap)>) -> Result<Self> {
        let entries = maps
            .into_iter()
            .map(|(name, map)| {
                let n = map.operator_norm();
                if n > Rational::one() {
                    return Err(Error::NormTooLarge { norm: n.to_string() });
                }
                let isometry = map.is_isometry();
                Ok(CatalogEntry { name, map, isometry })
            })
            .collect::<Result<_>>()?;
        Ok(MorphismCatalog { entries })
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn isometries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| e.isometry)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The operator ball `{X : ||X|| <= 1}` of maps `A -> K` as a polyhedral
/// space on `dim K * dim A` coordinates (row-major).
pub fn operator_ball(a: &PolyhedralSpace, k: &PolyhedralSpace) -> Result<PolyhedralSpace> {
    let dim = a.dim() * k.dim();
    check_cap(dim)?;
    if dim == 0 {
        return Ok(PolyhedralSpace::zero());
    }
    let mut rows = std::collections::BTreeSet::new();
    for v in a.vertices() {
        for psi in k.facets() {
            let mut row = Vec::with_capacity(dim);
            for p in psi {
                for x in v {
                    row.push(p * x);
                }
            }
            rows.insert(row);
        }
    }
    PolyhedralSpace::from_facets(dim, rows.into_iter().collect())
}

/// `max_f min_g ||g h - f||` over `f` in the operator ball `Hom(A, K)` and
/// `g: B -> K` of norm at most one.
pub fn injectivity_defect(h: &LinearMap, k: &SpaceRef) -> Result<DefectReport> {
    let n = h.operator_norm();
    if n > Rational::one() {
        return Err(Error::NormTooLarge { norm: n.to_string() });
    }
    let a = h.domain();
    let ball = operator_ball(a, k)?;
    let candidates: Vec<&Vec<Rational>> = ball.half_vertices().collect();
    let best = candidates
        .par_iter()
        .map(|x| {
            let m = Matrix::from_fn(k.dim(), a.dim(), |i, j| x[i * a.dim() + j].clone());
            let f = LinearMap::new(a.clone(), k.clone(), m).expect("shape");
            let report = best_factorization(h, &f).expect("same domain");
            (report, f)
        })
        // Ties go to the first vertex in sorted order.
        .reduce_with(|p, q| if q.0.value > p.0.value { q } else { p });
    Ok(match best {
        Some((report, f)) => DefectReport {
            kind: DefectKind::Injectivity,
            value: report.value,
            witness: report.witness,
            probe: Some(f),
        },
        None => DefectReport {
            kind: DefectKind::Injectivity,
            value: Rational::zero(),
            witness: None,
            probe: None,
        },
    })
}

/// Injectivity defect of `K ⊕_max L`.
pub fn product_injectivity(h: &LinearMap, k: &SpaceRef, l: &SpaceRef) -> Result<DefectReport> {
    let product = std::sync::Arc::new(k.direct_sum(l, SumKind::Max)?);
    injectivity_defect(h, &product)
}

#[derive(Debug, Clone)]
pub struct SaturationEntry {
    pub test_map: LinearMap,
    /// Best `||g h - f||` over isometric candidates `g`, if any candidate exists.
    pub best_bound: Option<Rational>,
    /// `min ||g h - f||` over all `g` of norm at most one; a lower bound for
    /// any isometry.
    pub relaxation_bound: Rational,
    pub witness: Option<LinearMap>,
    pub certified: bool,
}

impl SaturationEntry {
    /// Without a certificate the bound is only an estimate.
    pub fn heuristic(&self) -> bool {
        !self.certified
    }
}

/// Isometries `B -> K` that send a basis of vertices of `Ball_B` to vertices
/// of `Ball_K`.
pub fn vertex_isometries(b: &SpaceRef, k: &SpaceRef) -> Vec<LinearMap> {
    let n = b.dim();
    if n == 0 {
        return vec![LinearMap::zero(b.clone(), k.clone())];
    }
    if k.dim() < n {
        return Vec::new();
    }
    let verts = b.vertices();
    let picked: Vec<usize> = independent_subset(verts, n);
    let basis: Vec<Vec<Rational>> = picked.iter().map(|&i| verts[i].clone()).collect();
    let inv = Matrix::from_columns(&basis, n).expect("shape").inverse().expect("vertices span");
    let targets = k.vertices();
    let mut out = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        let cols: Vec<Vec<Rational>> = choice.iter().map(|&c| targets[c].clone()).collect();
        let image = Matrix::from_columns(&cols, k.dim()).expect("shape");
        let g = LinearMap::new(b.clone(), k.clone(), image.mul(&inv)).expect("shape");
        if g.operator_norm() <= Rational::one() && g.is_isometry() {
            out.push(g);
        }
        // Next tuple in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < targets.len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// For each isometry `f: A -> K`, searches isometries `g: B -> K` with
/// `g h` close to `f`. Candidates are the vertex isometries plus `extra`.
pub fn saturation_report(
    h: &LinearMap,
    k: &SpaceRef,
    tests: &[LinearMap],
    extra: &[LinearMap],
) -> Result<Vec<SaturationEntry>> {
    if !h.is_isometry() {
        return Err(Error::NotAnIsometry("h".into()));
    }
    for f in tests {
        if f.domain() != h.domain() || f.codomain() != k {
            return Err(Error::mismatch(h.domain().dim(), f.domain().dim()));
        }
        if !f.is_isometry() {
            return Err(Error::NotAnIsometry("test map".into()));
        }
    }
    let mut candidates = vertex_isometries(h.codomain(), k);
    for g in extra {
        if g.domain() == h.codomain() && g.codomain() == k && g.is_isometry() {
            candidates.push(g.clone());
        }
    }
    let composites: Vec<LinearMap> = candidates.iter().map(|g| compose(g, h).expect("composable")).collect();
    tests
        .par_iter()
        .map(|f| {
            let relaxation = best_factorization(h, f)?;
            let mut best: Option<(Rational, usize)> = None;
            for (i, gh) in composites.iter().enumerate() {
                let d = gh.distance(f)?;
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, i));
                }
            }
            let certified = best.as_ref().is_some_and(|(d, _)| d.is_zero());
            Ok(SaturationEntry {
                test_map: f.clone(),
                best_bound: best.as_ref().map(|(d, _)| d.clone()),
                relaxation_bound: relaxation.value,
                witness: best.map(|(_, i)| candidates[i].clone()),
                certified,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct LindenstraussReport {
    pub entries: Vec<(String, DefectReport)>,
}

impl LindenstraussReport {
    /// First catalog isometry with positive defect.
    pub fn counterexample(&self) -> Option<&str> {
        self.entries.iter().find(|(_, d)| !d.is_zero()).map(|(n, _)| n.as_str())
    }
}

/// Injectivity defect of `K` against every isometry of the catalog. A clean
/// report only means the catalog holds no counterexample.
pub fn lindenstrauss_report(k: &SpaceRef, catalog: &MorphismCatalog) -> Result<LindenstraussReport> {
    let entries = catalog
        .isometries()
        .map(|e| Ok((e.name.clone(), injectivity_defect(&e.map, k)?)))
        .collect::<Result<_>>()?;
    Ok(LindenstraussReport { entries })
}
