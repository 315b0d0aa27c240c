//! Oracles and corpus generators shared by the integration tests. The
//! oracles avoid the library's polytope conversions: they either solve the
//! defining optimization problem directly as a linear program or enumerate
//! candidates exhaustively.

#![allow(dead_code)]

use std::sync::Arc;

use polynorm::corpus::{self, grid_rational, random_contraction, random_vector, rng};
use polynorm::{
    compose, lp_solve, Atom, Chain, Embedding, LinearMap, LinearProgram, LpResult, Matrix, PPFormula, PolyhedralSpace,
    Rational, Relation, SpaceRef, Term, Var,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn r(n: i64) -> Rational {
    Rational::from(n)
}

pub fn arc(k: PolyhedralSpace) -> SpaceRef {
    Arc::new(k)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + &(x * y))
}

/// Unique solution of a square system by Gauss-Jordan elimination, `None`
/// when singular.
pub fn gauss_solve(rows: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut row = row.clone();
            row.push(b.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in col..=n {
                    let delta = &factor * &m[col][j];
                    m[i][j] = &m[i][j] - &delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Vertices of `{x : rows x <= rhs}` by trying every `dim`-subset of
/// constraints as the active set.
pub fn basic_points(dim: usize, rows: &[Vec<Rational>], rhs: &[Rational]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = subsets(rows.len(), dim)
        .into_iter()
        .filter_map(|s| {
            let a: Vec<Vec<Rational>> = s.iter().map(|&i| rows[i].clone()).collect();
            let b: Vec<Rational> = s.iter().map(|&i| rhs[i].clone()).collect();
            gauss_solve(&a, &b)
        })
        .filter(|x| rows.iter().zip(rhs).all(|(a, b)| dot(a, x) <= *b))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Vertices of `{x : phi x <= 1}`.
pub fn subset_vertices(dim: usize, facets: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    basic_points(dim, facets, &vec![Rational::one(); facets.len()])
}

/// `max_phi phi(x)` over every facet.
pub fn facet_norm(k: &PolyhedralSpace, x: &[Rational]) -> Rational {
    k.facets().iter().map(|phi| dot(phi, x)).max().unwrap_or_else(Rational::zero)
}

/// Adds `phi(x) <= t` rows for the block of variables starting at `x0`
/// and the epigraph variable `t`.
fn epigraph(lp: &mut LinearProgram, n: usize, k: &PolyhedralSpace, x0: usize, t: usize) {
    for phi in k.facets() {
        let mut row = vec![Rational::zero(); n];
        for (i, c) in phi.iter().enumerate() {
            row[x0 + i] = c.clone();
        }
        row[t] = -Rational::one();
        lp.add_constraint(row, Relation::Le, Rational::zero()).unwrap();
    }
}

/// The apex gauge of `(x, y)` as the decomposition program
/// `inf ||b|| + ||c|| + eps ||a||` over `x = b + f a`, `y = c - g a`.
pub fn decomposition_gauge(f: &LinearMap, g: &LinearMap, eps: &Rational, x: &[Rational], y: &[Rational]) -> Rational {
    let (a, b, c) = (f.domain(), f.codomain(), g.codomain());
    let (na, nb, nc) = (a.dim(), b.dim(), c.dim());
    // Variables: b, c, a, tb, tc, ta.
    let n = nb + nc + na + 3;
    let (tb, tc, ta) = (n - 3, n - 2, n - 1);
    let mut obj = vec![Rational::zero(); n];
    obj[tb] = Rational::one();
    obj[tc] = Rational::one();
    obj[ta] = eps.clone();
    let mut lp = LinearProgram::minimize(obj);
    epigraph(&mut lp, n, b, 0, tb);
    epigraph(&mut lp, n, c, nb, tc);
    epigraph(&mut lp, n, a, nb + nc, ta);
    for i in 0..nb {
        let mut row = vec![Rational::zero(); n];
        row[i] = Rational::one();
        for j in 0..na {
            row[nb + nc + j] = f.matrix().row(i)[j].clone();
        }
        lp.add_constraint(row, Relation::Eq, x[i].clone()).unwrap();
    }
    for i in 0..nc {
        let mut row = vec![Rational::zero(); n];
        row[nb + i] = Rational::one();
        for j in 0..na {
            row[nb + nc + j] = -&g.matrix().row(i)[j];
        }
        lp.add_constraint(row, Relation::Eq, y[i].clone()).unwrap();
    }
    match lp_solve(&lp) {
        LpResult::Optimal { optimum, .. } => optimum,
        other => panic!("decomposition program: {other:?}"),
    }
}

/// `min ||k X - f||` over `||X|| <= 1`, `X: A -> K_i`, written directly over
/// all vertices of `A`.
pub fn stage_oracle(ch: &Chain, i: usize, f: &LinearMap) -> Rational {
    let a = f.domain();
    let ki = &ch.spaces()[i];
    let last = ch.spaces().len() - 1;
    let k = ch.links()[i..last]
        .iter()
        .fold(Matrix::identity(ki.dim()), |acc, l| l.matrix().mul(&acc));
    let (rows, cols) = (ki.dim(), a.dim());
    let n = rows * cols + 1;
    let s = n - 1;
    let mut obj = vec![Rational::zero(); n];
    obj[s] = Rational::one();
    let mut lp = LinearProgram::minimize(obj);
    for v in a.vertices() {
        for psi in ki.facets() {
            let mut row = vec![Rational::zero(); n];
            for rr in 0..rows {
                for c in 0..cols {
                    row[rr * cols + c] = &psi[rr] * &v[c];
                }
            }
            lp.add_constraint(row, Relation::Le, Rational::one()).unwrap();
        }
        let fv = f.matrix().apply(v);
        for chi in ch.spaces()[last].facets() {
            // chi (k X v) - chi (f v) <= s
            let w = k.left_apply(chi);
            let mut row = vec![Rational::zero(); n];
            for rr in 0..rows {
                for c in 0..cols {
                    row[rr * cols + c] = &w[rr] * &v[c];
                }
            }
            row[s] = -Rational::one();
            lp.add_constraint(row, Relation::Le, dot(chi, &fv)).unwrap();
        }
    }
    match lp_solve(&lp) {
        LpResult::Optimal { optimum, .. } => optimum,
        other => panic!("stage program: {other:?}"),
    }
}

/// Best norm of a projection `x -> x - (s . x) u` onto `ker s` in
/// `l_inf^3`, `s = (1, 1, 1)`, over a grid of `u` with `s . u = 1`. The
/// norm of a matrix on `l_inf` is its largest absolute row sum.
pub fn projection_grid_search(steps: i64) -> (Rational, Vec<Rational>) {
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for i in -steps..=2 * steps {
        for j in -steps..=2 * steps {
            let u1 = Rational::new(i, steps);
            let u2 = Rational::new(j, steps);
            let u3 = Rational::one() - &u1 - &u2;
            let u = [u1, u2, u3];
            let norm = (0..3)
                .map(|rr| {
                    (0..3).fold(Rational::zero(), |acc, c| {
                        let delta = if rr == c { Rational::one() } else { Rational::zero() };
                        acc + &(delta - &u[rr]).abs()
                    })
                })
                .max()
                .unwrap();
            if best.as_ref().is_none_or(|(b, _)| norm < *b) {
                best = Some((norm, u.to_vec()));
            }
        }
    }
    best.unwrap()
}

/// Spaces of dimension at most two used to build random instances.
pub fn small_spaces() -> Vec<SpaceRef> {
    vec![
        arc(PolyhedralSpace::real_line()),
        arc(PolyhedralSpace::l1(2)),
        arc(PolyhedralSpace::linf(2)),
        arc(corpus::hexagon()),
        arc(corpus::skew_polygon()),
    ]
}

fn pick(rng: &mut ChaCha8Rng, spaces: &[SpaceRef]) -> SpaceRef {
    spaces.choose(rng).unwrap().clone()
}

pub struct Square {
    pub name: String,
    pub f: LinearMap,
    pub g: LinearMap,
    pub eps: Rational,
}

/// Spans `f: A -> B`, `g: A -> C` with `dim B + dim C <= 4`: catalog
/// isometries against identities and contractions, plus seeded random
/// contractions. Each span appears with `eps` in `{0, 1/4, 1}`.
pub fn pushout_corpus() -> Vec<Square> {
    let iso = corpus::standard_isometries();
    let get = |name: &str| iso.iter().find(|(n, _)| *n == name).unwrap().1.clone();
    let mut spans: Vec<(String, LinearMap, LinearMap)> = Vec::new();
    let e1 = get("R_to_linf2_e1");
    let diag = get("R_to_linf2_diag");
    let l1e1 = get("R_to_l1_2_e1");
    let rot = get("l1_2_rotated");
    let hex = get("hexagon_to_linf3");
    let line = e1.domain().clone();
    spans.push(("e1_vs_diag".into(), e1.clone(), diag.clone()));
    spans.push(("e1_vs_l1".into(), e1.clone(), l1e1.clone()));
    spans.push(("diag_vs_id".into(), diag.clone(), LinearMap::identity(line.clone())));
    spans.push(("l1_vs_half".into(), l1e1.clone(), LinearMap::identity(line.clone()).scale(&Rational::new(1, 2))));
    spans.push(("rotated_vs_id".into(), rot.clone(), LinearMap::identity(rot.domain().clone())));
    let mut g = rng(11);
    let to_line = random_contraction(&mut g, hex.domain(), &line, 2);
    spans.push(("hexagon_vs_line".into(), hex, to_line));
    let spaces = small_spaces();
    let mut attempt = 0;
    while spans.len() < 12 {
        attempt += 1;
        let a = pick(&mut g, &spaces);
        let b = pick(&mut g, &spaces);
        let c = pick(&mut g, &spaces);
        if b.dim() + c.dim() > 4 {
            continue;
        }
        let f = random_contraction(&mut g, &a, &b, 3);
        let h = random_contraction(&mut g, &a, &c, 3);
        spans.push((format!("random_{attempt}"), f, h));
    }
    let mut out = Vec::new();
    for (name, f, g) in spans {
        for eps in [Rational::zero(), Rational::new(1, 4), Rational::one()] {
            out.push(Square {
                name: format!("{name}@{eps}"),
                f: f.clone(),
                g: g.clone(),
                eps,
            });
        }
    }
    out
}

/// Random maps `v: B -> L` and `u: A -> K` with `f u = v g` and norms at
/// most one, for the embedding `f: K -> L`.
pub fn commuting_squares(e: &Embedding, rng: &mut ChaCha8Rng, count: usize) -> Vec<(LinearMap, LinearMap, LinearMap)> {
    let k = e.subspace();
    let l = e.ambient();
    let spaces = small_spaces();
    let mut out = Vec::new();
    while out.len() < count {
        let a = pick(rng, &spaces);
        let b = pick(rng, &spaces);
        if b.dim() < a.dim() {
            continue;
        }
        let g = random_contraction(rng, &a, &b, 3);
        if g.matrix().rank() < a.dim() {
            continue;
        }
        let u = random_contraction(rng, &a, k, 3);
        // v = f u g+ + w (1 - g g+) with g+ a left inverse of g.
        let gm = g.matrix();
        let left = gm.transpose().mul(gm).inverse().unwrap().mul(&gm.transpose());
        let fu = e.map().matrix().mul(u.matrix());
        let w = corpus::random_matrix(rng, l.dim(), b.dim(), 3);
        let complement = Matrix::identity(b.dim()).sub(&gm.mul(&left));
        let v = LinearMap::new(b.clone(), l.clone(), fu.mul(&left).add(&w.mul(&complement))).unwrap();
        let scale = [u.operator_norm(), v.operator_norm(), Rational::one()].into_iter().max().unwrap();
        let lambda = scale.recip();
        out.push((g, u.scale(&lambda), v.scale(&lambda)));
    }
    out
}

fn random_term(rng: &mut ChaCha8Rng, free: usize, bound: usize) -> Term {
    let mut pairs = Vec::new();
    for i in 0..free {
        if rng.gen_bool(0.7) {
            pairs.push((Var::Free(i), grid_rational(rng, 2, 2)));
        }
    }
    for j in 0..bound {
        if rng.gen_bool(0.7) {
            pairs.push((Var::Bound(j), grid_rational(rng, 2, 2)));
        }
    }
    Term::from_pairs(pairs)
}

/// A random pp-formula in `free` free variables.
pub fn random_formula(rng: &mut ChaCha8Rng, free: usize) -> PPFormula {
    let bound = rng.gen_range(0..=2);
    let atoms = (0..rng.gen_range(1..=3))
        .map(|_| {
            if rng.gen_bool(0.8) {
                let bounds = [Rational::zero(), Rational::new(1, 2), Rational::one(), r(2)];
                Atom::NormLe(random_term(rng, free, bound), bounds.choose(rng).unwrap().clone())
            } else {
                Atom::Eq(random_term(rng, free, bound), random_term(rng, free, bound))
            }
        })
        .collect();
    PPFormula::new(free, bound, atoms).unwrap()
}

pub fn random_assignment(rng: &mut ChaCha8Rng, k: &PolyhedralSpace, free: usize) -> Vec<Vec<Rational>> {
    (0..free).map(|_| random_vector(rng, k.dim(), 2, 1)).collect()
}

/// Finite chains of norm-one links with `dim <= 3`, mixing isometric
/// embeddings, contractions and rescalings.
pub fn chain_corpus(count: usize) -> Vec<Chain> {
    let mut g = rng(23);
    let mut spaces = small_spaces();
    spaces.push(arc(PolyhedralSpace::linf(3)));
    spaces.push(arc(PolyhedralSpace::l1(3)));
    let iso = corpus::standard_isometries();
    let mut out = Vec::new();
    while out.len() < count {
        let len = g.gen_range(1..=3);
        let mut links = Vec::new();
        let mut current = pick(&mut g, &spaces[..5]);
        for _ in 0..len {
            let choice = g.gen_range(0..3);
            let link = match choice {
                0 => iso.iter().find(|(_, h)| h.domain() == &current).map(|(_, h)| h.clone()),
                1 => {
                    let s = Rational::new(g.gen_range(1..=3), 4);
                    Some(LinearMap::identity(current.clone()).scale(&(Rational::one() - s)))
                }
                _ => None,
            };
            let link = link.unwrap_or_else(|| {
                let next = pick(&mut g, &spaces);
                random_contraction(&mut g, &current, &next, 2)
            });
            current = link.codomain().clone();
            links.push(link);
        }
        out.push(Chain::new(links).unwrap());
    }
    out
}

/// A map into the last stage: a pushed-forward stage map, sometimes
/// perturbed, rescaled to norm at most one.
pub fn chain_target(ch: &Chain, rng: &mut ChaCha8Rng) -> LinearMap {
    let spaces = small_spaces();
    let a = pick(rng, &spaces[..3]);
    let last = ch.spaces().len() - 1;
    let i = rng.gen_range(0..=last);
    let h = random_contraction(rng, &a, &ch.spaces()[i], 2);
    let mut f = ch.links()[i..last].iter().fold(h, |acc, l| compose(l, &acc).unwrap());
    if rng.gen_bool(0.5) {
        let noise = random_contraction(rng, &a, &ch.spaces()[last], 2).scale(&Rational::new(1, 4));
        f = f.add(&noise).unwrap();
    }
    let n = f.operator_norm();
    if n > Rational::one() {
        f = f.scale(&n.recip());
    }
    f
}

/// Minkowski gauge of `x` for the hull of the symmetric point set `points`:
/// `min sum l_i` over `sum l_i p_i = x`, `l >= 0`.
pub fn hull_gauge(points: &[Vec<Rational>], x: &[Rational]) -> Rational {
    let m = points.len();
    let mut lp = LinearProgram::minimize(vec![Rational::one(); m]);
    for (j, xj) in x.iter().enumerate() {
        let row: Vec<Rational> = points.iter().map(|p| p[j].clone()).collect();
        lp.add_constraint(row, Relation::Eq, xj.clone()).unwrap();
    }
    for i in 0..m {
        let mut e = vec![Rational::zero(); m];
        e[i] = Rational::one();
        lp.add_constraint(e, Relation::Ge, Rational::zero()).unwrap();
    }
    lp.solve().expect_optimal("hull gauge").0
}
