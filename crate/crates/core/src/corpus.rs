//! Standard spaces, embeddings and seeded random generators used by the
//! self test and the test suites.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::Matrix;
use crate::map::LinearMap;
use crate::purity::Embedding;
use crate::rational::Rational;
use crate::space::{PolyhedralSpace, SpaceRef};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn r(n: i64) -> Rational {
    Rational::from(n)
}

fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| r(x)).collect()
}

/// The hyperplane `x1 + x2 + x3 = 0` of `l_inf^3`, with basis
/// `(1, -1, 0), (0, 1, -1)`. Its ball is a hexagon.
pub fn hexagon_basis() -> Vec<Vec<Rational>> {
    vec![ints(&[1, -1, 0]), ints(&[0, 1, -1])]
}

pub fn hexagon() -> PolyhedralSpace {
    PolyhedralSpace::linf(3)
        .induced_subspace(&hexagon_basis())
        .expect("hyperplane of the cube")
}

/// An asymmetric-looking but centrally symmetric polygon.
pub fn skew_polygon() -> PolyhedralSpace {
    let pts = [[2, 1], [1, 2], [-1, 1], [-2, -1], [-1, -2], [1, -1]];
    PolyhedralSpace::from_vertices(2, pts.iter().map(|p| ints(p)).collect()).expect("symmetric hexagon")
}

pub fn standard_spaces() -> Vec<(&'static str, PolyhedralSpace)> {
    vec![
        ("R", PolyhedralSpace::real_line()),
        ("l1_2", PolyhedralSpace::l1(2)),
        ("linf_2", PolyhedralSpace::linf(2)),
        ("hexagon", hexagon()),
        ("skew", skew_polygon()),
        ("l1_3", PolyhedralSpace::l1(3)),
        ("linf_3", PolyhedralSpace::linf(3)),
    ]
}

/// Named isometric embeddings; the flag says whether each is an ideal.
pub fn standard_embeddings() -> Vec<(&'static str, Embedding, bool)> {
    let linf2: SpaceRef = Arc::new(PolyhedralSpace::linf(2));
    let linf3: SpaceRef = Arc::new(PolyhedralSpace::linf(3));
    let l12: SpaceRef = Arc::new(PolyhedralSpace::l1(2));
    let l13: SpaceRef = Arc::new(PolyhedralSpace::l1(3));
    let e = |l: &SpaceRef, basis: Vec<Vec<Rational>>| Embedding::from_subspace(l.clone(), &basis).expect("subspace");
    vec![
        ("e1_in_linf2", e(&linf2, vec![ints(&[1, 0])]), true),
        ("diag_in_linf2", e(&linf2, vec![ints(&[1, 1])]), true),
        ("e1_in_l1_2", e(&l12, vec![ints(&[1, 0])]), true),
        ("diag_in_l1_2", e(&l12, vec![ints(&[1, 1])]), true),
        ("plane_in_linf3", e(&linf3, vec![ints(&[1, 0, 0]), ints(&[0, 1, 0])]), true),
        ("plane_in_l1_3", e(&l13, vec![ints(&[1, 0, 0]), ints(&[0, 1, 0])]), true),
        ("hexagon_in_linf3", e(&linf3, hexagon_basis()), false),
        ("identity_linf2", e(&linf2, vec![ints(&[1, 0]), ints(&[0, 1])]), true),
    ]
}

/// Isometries `h: A -> B` between small spaces, with names.
pub fn standard_isometries() -> Vec<(&'static str, LinearMap)> {
    let line: SpaceRef = Arc::new(PolyhedralSpace::real_line());
    let linf2: SpaceRef = Arc::new(PolyhedralSpace::linf(2));
    let linf3: SpaceRef = Arc::new(PolyhedralSpace::linf(3));
    let l12: SpaceRef = Arc::new(PolyhedralSpace::l1(2));
    let hex: SpaceRef = Arc::new(hexagon());
    let m = |a: &SpaceRef, b: &SpaceRef, rows: &[&[i64]]| {
        let rows = rows.iter().map(|row| ints(row)).collect();
        LinearMap::new(a.clone(), b.clone(), Matrix::from_rows(rows, a.dim()).unwrap()).unwrap()
    };
    vec![
        ("R_to_linf2_e1", m(&line, &linf2, &[&[1], &[0]])),
        ("R_to_linf2_diag", m(&line, &linf2, &[&[1], &[1]])),
        ("R_to_l1_2_e1", m(&line, &l12, &[&[1], &[0]])),
        ("linf2_to_linf3", m(&linf2, &linf3, &[&[1, 0], &[0, 1], &[0, 0]])),
        ("hexagon_to_linf3", m(&hex, &linf3, &[&[1, 0], &[-1, 1], &[0, -1]])),
        ("l1_2_rotated", m(&l12, &linf2, &[&[1, 1], &[1, -1]])),
    ]
}

/// A rational with denominator at most `denom_cap` in `[-bound, bound]`.
pub fn grid_rational(rng: &mut impl Rng, denom_cap: u32, bound: i64) -> Rational {
    let q = rng.gen_range(1..=denom_cap.max(1)) as i64;
    let p = rng.gen_range(-bound * q..=bound * q);
    Rational::new(p, q)
}

pub fn random_vector(rng: &mut impl Rng, dim: usize, denom_cap: u32, bound: i64) -> Vec<Rational> {
    (0..dim).map(|_| grid_rational(rng, denom_cap, bound)).collect()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, denom_cap: u32) -> Matrix {
    let data = (0..rows).map(|_| random_vector(rng, cols, denom_cap, 1)).collect();
    Matrix::from_rows(data, cols).expect("shape")
}

/// Random map with operator norm at most one (rescaled when larger).
pub fn random_contraction(rng: &mut impl Rng, a: &SpaceRef, b: &SpaceRef, denom_cap: u32) -> LinearMap {
    let f = LinearMap::new(a.clone(), b.clone(), random_matrix(rng, b.dim(), a.dim(), denom_cap)).expect("shape");
    let n = f.operator_norm();
    if n > Rational::one() {
        f.scale(&n.recip())
    } else {
        f
    }
}

/// Random symmetric polytope norm: hull of `±e_i` scaled and `extra`
/// random points.
pub fn random_space(rng: &mut impl Rng, dim: usize, extra: usize, denom_cap: u32) -> Result<PolyhedralSpace> {
    let mut points = Vec::new();
    for i in 0..dim {
        let mut e = vec![Rational::zero(); dim];
        e[i] = Rational::new(rng.gen_range(1..=3), rng.gen_range(1..=2));
        points.push(e.iter().map(|x| -x).collect());
        points.push(e);
    }
    for _ in 0..extra {
        let p = random_vector(rng, dim, denom_cap, 2);
        if p.iter().any(|x| !x.is_zero()) {
            points.push(p.iter().map(|x| -x).collect());
            points.push(p);
        }
    }
    points.sort();
    points.dedup();
    PolyhedralSpace::from_vertices(dim, points)
}
