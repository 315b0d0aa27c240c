//! Acceptance criteria. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any fails.
//!
//! All comparisons are exact rational comparisons. The only pinned
//! tolerances are wall-clock budgets.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use polynorm::corpus::{self, grid_rational, random_contraction, random_vector, rng};
use polynorm::{
    canonical_square, chain_colimit_distance, compose, distinguishing_formula, eps_pushout, factor_through_stage,
    gurarii_build, ideal_defect, injectivity_defect, product_injectivity, pure_square_defect, repair_fix_basis,
    tensor_map, transfer_check, Embedding, GurariiConfig, LinearMap, Matrix, MorphismCatalog, PolyhedralSpace,
    Rational,
};
use rand::Rng;

/// Wall-clock budget for the pushout corpus and for the 3-round build.
const TIME_BUDGET: Duration = Duration::from_secs(60);
const POINTS_PER_SQUARE: usize = 20;
const COCONES_PER_PUSHOUT: usize = 20;
const COMPOSITION_PAIRS: usize = 100;
const SQUARES_PER_EMBEDDING: usize = 50;
const FORMULAS_PER_EMBEDDING: usize = 100;
const CHAINS: usize = 20;
const INJECTIVITY_TRIPLES: usize = 20;
const REPAIRS: usize = 50;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn pushout_gauge() -> Outcome {
    let start = Instant::now();
    let corpus = pushout_corpus();
    ensure(corpus.len() >= 30, || format!("only {} squares", corpus.len()))?;
    let mut g = rng(1);
    let mut points = 0;
    for sq in &corpus {
        let p = eps_pushout(&sq.f, &sq.g, &sq.eps).map_err(|e| format!("{}: {e}", sq.name))?;
        for _ in 0..POINTS_PER_SQUARE {
            let x = random_vector(&mut g, sq.f.codomain().dim(), 4, 2);
            let y = random_vector(&mut g, sq.g.codomain().dim(), 4, 2);
            let apex = p.apex().norm(&p.class_of(&x, &y).unwrap()).unwrap();
            let oracle = decomposition_gauge(&sq.f, &sq.g, &sq.eps, &x, &y);
            ensure(apex == oracle, || format!("{}: gauge {apex} != oracle {oracle} at {x:?},{y:?}", sq.name))?;
            points += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < TIME_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{} squares, {points} points, {elapsed:.1?}", corpus.len()))
}

/// Cocones built two ways: through a random map out of the apex, and (for
/// `eps > 0`) as random contraction pairs scaled until eps-commutative. For
/// `eps = 0` the second kind is a random map killing the relations.
fn universal_property() -> Outcome {
    let targets = [
        arc(PolyhedralSpace::real_line()),
        arc(PolyhedralSpace::linf(2)),
        arc(PolyhedralSpace::l1(2)),
    ];
    let mut g = rng(2);
    let mut total = 0;
    let corpus = pushout_corpus();
    for sq in &corpus {
        let p = eps_pushout(&sq.f, &sq.g, &sq.eps).unwrap();
        ensure(p.legs_span_apex(), || format!("{}: legs do not span", sq.name))?;
        let (b, c) = (sq.f.codomain(), sq.g.codomain());
        for n in 0..COCONES_PER_PUSHOUT {
            let d = targets[n % targets.len()].clone();
            let (f_prime, g_prime) = if n % 2 == 0 {
                let t = random_contraction(&mut g, p.apex(), &d, 3);
                (compose(&t, p.leg_from_c()).unwrap(), compose(&t, p.leg_from_b()).unwrap())
            } else if sq.eps.is_positive() {
                let fp = random_contraction(&mut g, c, &d, 3);
                let gp = random_contraction(&mut g, b, &d, 3);
                let dist = compose(&gp, &sq.f).unwrap().distance(&compose(&fp, &sq.g).unwrap()).unwrap();
                if dist > sq.eps {
                    let s = &sq.eps / &dist;
                    (fp.scale(&s), gp.scale(&s))
                } else {
                    (fp, gp)
                }
            } else {
                // A random J on B + C with J n = 0 for the relations n.
                let mut j = corpus::random_matrix(&mut g, d.dim(), b.dim() + c.dim(), 3);
                let rel: Vec<Vec<Rational>> = p.relation_basis().to_vec();
                if !rel.is_empty() {
                    let nm = Matrix::from_columns(&rel, b.dim() + c.dim()).unwrap();
                    let proj = nm.mul(&nm.transpose().mul(&nm).inverse().unwrap()).mul(&nm.transpose());
                    j = j.mul(&Matrix::identity(b.dim() + c.dim()).sub(&proj));
                }
                let jb = Matrix::from_fn(d.dim(), b.dim(), |r, s| j.row(r)[s].clone());
                let jc = Matrix::from_fn(d.dim(), c.dim(), |r, s| j.row(r)[b.dim() + s].clone());
                let gp = LinearMap::new(b.clone(), d.clone(), jb).unwrap();
                let fp = LinearMap::new(c.clone(), d.clone(), jc).unwrap();
                let s = [gp.operator_norm(), fp.operator_norm(), Rational::one()].into_iter().max().unwrap();
                (fp.scale(&s.recip()), gp.scale(&s.recip()))
            };
            let t = polynorm::pushout_mediator(&p, &f_prime, &g_prime)
                .map_err(|e| format!("{} cocone {n}: {e}", sq.name))?;
            ensure(compose(&t, p.leg_from_c()).unwrap().matrix() == f_prime.matrix(), || {
                format!("{} cocone {n}: t f_bar != f'", sq.name)
            })?;
            ensure(compose(&t, p.leg_from_b()).unwrap().matrix() == g_prime.matrix(), || {
                format!("{} cocone {n}: t g_bar != g'", sq.name)
            })?;
            let norm = t.operator_norm();
            ensure(norm <= Rational::one(), || format!("{} cocone {n}: mediator norm {norm}", sq.name))?;
            total += 1;
        }
    }
    Ok(format!("{} pushouts, {total} cocones", corpus.len()))
}

fn isometry_stability() -> Outcome {
    let mut checked = 0;
    for sq in pushout_corpus() {
        let p = eps_pushout(&sq.f, &sq.g, &sq.eps).unwrap();
        if sq.f.isometry_defect().is_isometry() {
            let d = p.leg_from_c().isometry_defect();
            ensure(d.is_isometry(), || format!("{}: f isometric, leg from C has {d:?}", sq.name))?;
            checked += 1;
        }
        if sq.g.isometry_defect().is_isometry() {
            let d = p.leg_from_b().isometry_defect();
            ensure(d.is_isometry(), || format!("{}: g isometric, leg from B has {d:?}", sq.name))?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no isometric inputs in the corpus".into())?;
    Ok(format!("{checked} isometric inputs, all legs (0, 0)"))
}

/// Morphisms are norm-at-most-one maps: isometries, damped isometries,
/// perturbed isometries and random contractions.
fn composition_bound() -> Outcome {
    let mut g = rng(4);
    let mut spaces = small_spaces();
    spaces.push(arc(PolyhedralSpace::linf(3)));
    let iso = corpus::standard_isometries();
    let draw = |g: &mut rand_chacha::ChaCha8Rng, a: &polynorm::SpaceRef| -> LinearMap {
        let kind = g.gen_range(0..3);
        let candidates: Vec<&LinearMap> = iso.iter().map(|(_, h)| h).filter(|h| h.domain() == a).collect();
        let b = spaces[g.gen_range(0..spaces.len())].clone();
        let base = match (kind, candidates.is_empty()) {
            (0, false) => candidates[g.gen_range(0..candidates.len())].clone(),
            (1, false) => {
                let h = candidates[g.gen_range(0..candidates.len())];
                let noise = random_contraction(g, a, h.codomain(), 4).scale(&q(1, 8));
                h.add(&noise).unwrap()
            }
            _ => random_contraction(g, a, &b, 3),
        };
        let damp = Rational::one() - grid_rational(g, 4, 1).abs() / Rational::from(4);
        let f = base.scale(&damp);
        let n = f.operator_norm();
        if n > Rational::one() {
            f.scale(&n.recip())
        } else {
            f
        }
    };
    let mut worst_margin: Option<Rational> = None;
    for n in 0..COMPOSITION_PAIRS {
        let a = spaces[g.gen_range(0..5)].clone();
        let f = draw(&mut g, &a);
        let h = draw(&mut g, f.codomain());
        let gf = compose(&h, &f).unwrap();
        let lhs = gf.isometry_defect().max();
        let rhs = f.isometry_defect().max() + h.isometry_defect().max();
        ensure(lhs <= rhs, || format!("pair {n}: {lhs} > {rhs}"))?;
        let margin = rhs - lhs;
        if worst_margin.as_ref().is_none_or(|m| margin < *m) {
            worst_margin = Some(margin);
        }
    }
    Ok(format!("{COMPOSITION_PAIRS} pairs, tightest margin {}", worst_margin.unwrap()))
}

fn ideal_purity() -> Outcome {
    // Anchors, with the hyperplane value fixed by the grid search first.
    let (grid_norm, _) = projection_grid_search(12);
    ensure(grid_norm == q(4, 3), || format!("grid oracle found {grid_norm}"))?;
    let embeddings = corpus::standard_embeddings();
    let find = |name: &str| embeddings.iter().find(|(n, _, _)| *n == name).unwrap().1.clone();
    let e1 = ideal_defect(&find("e1_in_linf2"));
    ensure(e1.is_zero(), || format!("span e1 in l_inf^2 has defect {}", e1.value))?;
    let hyp = ideal_defect(&find("hexagon_in_linf3"));
    ensure(hyp.value == &grid_norm - &Rational::one(), || format!("hyperplane defect {}", hyp.value))?;

    let mut g = rng(5);
    let mut squares = 0;
    let mut positive = 0;
    for (name, e, _) in &embeddings {
        let d = ideal_defect(e);
        if d.is_zero() {
            for (i, (gm, u, v)) in commuting_squares(e, &mut g, SQUARES_PER_EMBEDDING).iter().enumerate() {
                let s = pure_square_defect(e, gm, u, v).map_err(|err| format!("{name} square {i}: {err}"))?;
                ensure(s.is_zero(), || format!("{name} square {i}: defect {}", s.value))?;
                squares += 1;
            }
        } else {
            let (gm, u, v) = canonical_square(e);
            let s = pure_square_defect(e, &gm, &u, &v).unwrap();
            ensure(s.value.is_positive(), || format!("{name}: canonical square has defect 0"))?;
            positive += 1;
        }
    }
    Ok(format!(
        "{squares} squares with defect 0, {positive} canonical squares positive, hyperplane defect {}",
        hyp.value
    ))
}

fn satisfaction_transfer() -> Outcome {
    let mut g = rng(6);
    let mut formulas = 0;
    let mut gaps = 0;
    for (name, e, _) in corpus::standard_embeddings() {
        if ideal_defect(&e).is_zero() {
            for i in 0..FORMULAS_PER_EMBEDDING {
                let free = g.gen_range(1..=2);
                let phi = random_formula(&mut g, free);
                let a = random_assignment(&mut g, e.subspace(), free);
                let (sk, sl) = transfer_check(&e, &phi, &a).map_err(|err| format!("{name} #{i}: {err}"))?;
                ensure(sk.satisfied() == sl.satisfied(), || {
                    format!("{name} #{i}: `{phi}` has slack {sk} in K and {sl} in L")
                })?;
                formulas += 1;
            }
        } else {
            let (phi, a) = distinguishing_formula(&e).map_err(|err| format!("{name}: {err}"))?;
            let (sk, sl) = transfer_check(&e, &phi, &a).unwrap();
            ensure(!sk.satisfied() && sl.satisfied(), || format!("{name}: no gap, slacks {sk} and {sl}"))?;
            gaps += 1;
        }
    }
    Ok(format!("{formulas} formulas agree, {gaps} certified gaps"))
}

fn chain_factorization() -> Outcome {
    let mut g = rng(7);
    let chains = chain_corpus(CHAINS);
    let epss = [Rational::zero(), q(1, 4), q(1, 2)];
    let mut checked = 0;
    let mut later = 0;
    for (n, ch) in chains.iter().enumerate() {
        let f = chain_target(ch, &mut g);
        let eps = &epss[n % epss.len()];
        let fac = factor_through_stage(ch, &f, eps).map_err(|e| format!("chain {n}: {e}"))?;
        let oracle: Vec<Rational> = (0..ch.spaces().len()).map(|i| stage_oracle(ch, i, &f)).collect();
        ensure(fac.stage_distances == oracle, || format!("chain {n}: distances differ from oracle"))?;
        ensure(oracle[fac.stage] <= *eps, || format!("chain {n}: returned stage infeasible"))?;
        if fac.stage > 0 {
            ensure(oracle[fac.stage - 1] > *eps, || format!("chain {n}: stage {} not least", fac.stage))?;
        }
        ensure(fac.map.operator_norm() <= Rational::one(), || format!("chain {n}: factor norm"))?;
        if fac.stage > 0 {
            later += 1;
        }

        let last = ch.spaces().len() - 1;
        let i = g.gen_range(0..=last);
        let a = f.domain().clone();
        let x = random_contraction(&mut g, &a, &ch.spaces()[i], 2);
        let y = random_contraction(&mut g, &a, &ch.spaces()[i], 2);
        let ds = chain_colimit_distance(ch, i, &x, &y).unwrap();
        ensure(ds.windows(2).all(|w| w[1] <= w[0]), || format!("chain {n}: distances increase {ds:?}"))?;
        let pushed = |m: &LinearMap| ch.links()[i..last].iter().fold(m.clone(), |acc, l| compose(l, &acc).unwrap());
        let final_norm = pushed(&x).sub(&pushed(&y)).unwrap().operator_norm();
        ensure(ds.last() == Some(&final_norm), || format!("chain {n}: last distance {ds:?} vs {final_norm}"))?;
        checked += 1;
    }
    Ok(format!("{checked} chains ({later} factor only at a later stage), least stages confirmed by oracle"))
}

fn tensor_ideals() -> Outcome {
    let ks = [
        ("R", PolyhedralSpace::real_line()),
        ("l1_2", PolyhedralSpace::l1(2)),
        ("linf_2", PolyhedralSpace::linf(2)),
    ];
    let cap = polynorm::geometry::dim_cap();
    let mut checked = 0;
    let mut skipped = Vec::new();
    for (name, e, ideal) in corpus::standard_embeddings() {
        if !ideal {
            continue;
        }
        for (kn, k) in &ks {
            if k.dim() * e.ambient().dim() > cap {
                skipped.push(format!("{kn}(x){name}"));
                continue;
            }
            let t = tensor_map(k, e.map()).map_err(|err| format!("{kn} (x) {name}: {err}"))?;
            let te = Embedding::new(t).map_err(|err| format!("{kn} (x) {name}: {err}"))?;
            let d = ideal_defect(&te);
            ensure(d.is_zero(), || format!("{kn} (x) {name}: defect {}", d.value))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} tensored ideals with defect 0; over cap: {}", skipped.len()))
}

/// Every triple `(h, K, L)` of catalog isometries and small spaces whose
/// operator ball fits under the dimension cap.
fn injectivity_law() -> Outcome {
    let iso = corpus::standard_isometries();
    let spaces = small_spaces();
    let cap = polynorm::geometry::dim_cap();
    let mut triples = 0;
    let mut positive = 0;
    for (name, h) in &iso {
        let single: Vec<Rational> = spaces
            .iter()
            .map(|k| {
                if h.domain().dim() * k.dim() > cap {
                    Rational::zero()
                } else {
                    injectivity_defect(h, k).unwrap().value
                }
            })
            .collect();
        for i in 0..spaces.len() {
            for j in i..spaces.len() {
                let (k, l) = (&spaces[i], &spaces[j]);
                if h.domain().dim() * (k.dim() + l.dim()) > cap {
                    continue;
                }
                let prod = product_injectivity(h, k, l).unwrap().value;
                let (dk, dl) = (&single[i], &single[j]);
                ensure(prod == dk.clone().max(dl.clone()), || {
                    format!("{name} into spaces {i}, {j}: product {prod} vs max({dk}, {dl})")
                })?;
                if prod.is_positive() {
                    positive += 1;
                }
                triples += 1;
            }
        }
    }
    ensure(triples >= INJECTIVITY_TRIPLES, || format!("only {triples} triples"))?;
    let mut cube_checks = 0;
    for n in 1..=3 {
        let cube = arc(PolyhedralSpace::linf(n));
        for (name, h) in &iso {
            if h.domain().dim() * n > cap {
                continue;
            }
            let d = injectivity_defect(h, &cube).unwrap();
            ensure(d.is_zero(), || format!("l_inf^{n} against {name}: defect {}", d.value))?;
            cube_checks += 1;
        }
    }
    Ok(format!("{triples} triples exact ({positive} with positive defect), {cube_checks} cube checks with defect 0"))
}

fn gurarii() -> Outcome {
    let start = Instant::now();
    let maps = corpus::standard_isometries()
        .into_iter()
        .map(|(n, h)| (n.to_string(), h))
        .collect();
    let catalog = MorphismCatalog::new(maps).unwrap();
    let seed = arc(PolyhedralSpace::real_line());
    let log = gurarii_build(seed, &catalog, &GurariiConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(log.stopped.is_none(), || format!("stopped: {:?}", log.stopped))?;
    ensure(log.rounds.len() == 3, || format!("{} rounds", log.rounds.len()))?;
    for (j, rec) in log.rounds.iter().enumerate() {
        ensure(rec.dim == rec.expected_dim, || format!("round {j}: dim {} vs {}", rec.dim, rec.expected_dim))?;
        let d = log.links[j].isometry_defect();
        ensure(d.is_isometry(), || format!("link {j}: {d:?}"))?;
        for to in j + 1..log.spaces.len() {
            let res = log.residual_at(j, to).unwrap();
            ensure(res.is_zero(), || format!("request {j} at stage {to}: residual {res}"))?;
        }
    }
    ensure(elapsed < TIME_BUDGET, || format!("took {elapsed:?}"))?;
    let dims: Vec<usize> = log.spaces.iter().map(|s| s.dim()).collect();
    Ok(format!("dims {dims:?}, residuals 0, {elapsed:.1?}"))
}

fn repairs() -> Outcome {
    let mut g = rng(11);
    let spaces = small_spaces();
    let mut done = 0;
    let mut attempts = 0;
    while done < REPAIRS {
        attempts += 1;
        let b = spaces[g.gen_range(0..spaces.len())].clone();
        let k = spaces[g.gen_range(0..spaces.len())].clone();
        let n = b.dim();
        let basis: Vec<Vec<Rational>> = loop {
            let cand: Vec<Vec<Rational>> = (0..n).map(|_| random_vector(&mut g, n, 2, 2)).collect();
            if Matrix::from_columns(&cand, n).unwrap().rank() == n {
                break cand;
            }
        };
        let t_prime = random_contraction(&mut g, &b, &k, 3);
        let eps = q(g.gen_range(1..=4), 4);
        let fixed = g.gen_range(1..=n);
        // Perturb within delta = eps / (n M), recomputed here from the vertices.
        let e_inv = Matrix::from_columns(&basis, n).unwrap().inverse().unwrap();
        let m = b.vertices().iter().flat_map(|v| e_inv.apply(v)).map(|a| a.abs()).max().unwrap();
        let delta = &eps / &(Rational::from(n as i64) * &m);
        let targets: Vec<Vec<Rational>> = basis[..fixed]
            .iter()
            .map(|e| {
                let image = t_prime.matrix().apply(e);
                let noise = random_vector(&mut g, k.dim(), 3, 1);
                let size = facet_norm(&k, &noise);
                let scale = if size.is_zero() { Rational::zero() } else { &delta / &size * q(g.gen_range(0..=4), 4) };
                image.iter().zip(&noise).map(|(a, z)| a + &(z * &scale)).collect()
            })
            .collect();
        let rep = repair_fix_basis(&t_prime, &basis, &targets, &eps).map_err(|e| format!("repair {done}: {e}"))?;
        ensure(rep.delta == delta, || format!("repair {done}: delta {} vs {delta}", rep.delta))?;
        let dist = rep.map.sub(&t_prime).unwrap().operator_norm();
        ensure(dist <= eps, || format!("repair {done}: moved by {dist} > {eps}"))?;
        for (e, y) in basis.iter().zip(&targets) {
            ensure(rep.map.matrix().apply(e) == *y, || format!("repair {done}: basis vector not fixed"))?;
        }
        done += 1;
    }
    Ok(format!("{done} repairs within eps ({attempts} draws)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("eps-pushout gauge matches decomposition program", pushout_gauge),
        ("universal property of eps-pushouts", universal_property),
        ("isometries stable under eps-pushouts", isometry_stability),
        ("eps-isometry composition bound", composition_bound),
        ("ideal iff pure", ideal_purity),
        ("satisfaction transfer", satisfaction_transfer),
        ("finite-stage factorization through chains", chain_factorization),
        ("projective tensor preserves ideals", tensor_ideals),
        ("injectivity product law", injectivity_law),
        ("Gurarii builder", gurarii),
        ("basis repair within eps", repairs),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.1?}]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{elapsed:.1?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
