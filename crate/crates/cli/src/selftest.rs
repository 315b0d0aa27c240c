//! Bundled invariant checks over the standard corpus.

use std::sync::Arc;

use polynorm::corpus;
use polynorm::{
    distinguishing_formula, eps_pushout, ideal_defect, lindenstrauss_report, parse_formula, q, transfer_check,
    MorphismCatalog, PolyhedralSpace, Rational, Result,
};

use crate::report::Report;
use crate::{CliError, Context};

type Check = (&'static str, fn() -> Result<bool>);

fn duality() -> Result<bool> {
    Ok(corpus::standard_spaces().iter().all(|(_, k)| {
        k.dual().dual() == *k && k.vertices().iter().all(|v| k.norm(v).is_ok_and(|n| n == Rational::one()))
    }))
}

fn isometries() -> Result<bool> {
    Ok(corpus::standard_isometries().iter().all(|(_, h)| h.isometry_defect().is_isometry()))
}

fn ideals() -> Result<bool> {
    let flags_match = corpus::standard_embeddings()
        .iter()
        .all(|(_, e, ideal)| ideal_defect(e).is_zero() == *ideal);
    let hexagon = corpus::standard_embeddings()
        .into_iter()
        .find(|(n, _, _)| *n == "hexagon_in_linf3")
        .map(|(_, e, _)| ideal_defect(&e).value);
    Ok(flags_match && hexagon == Some(q(1, 3)))
}

fn distinguishing() -> Result<bool> {
    let (_, e, _) = corpus::standard_embeddings()
        .into_iter()
        .find(|(_, _, ideal)| !ideal)
        .expect("corpus has a non-ideal");
    let (phi, a) = distinguishing_formula(&e)?;
    let (sk, sl) = transfer_check(&e, &phi, &a)?;
    Ok(!sk.satisfied() && sl.satisfied())
}

fn pushout_legs() -> Result<bool> {
    for (_, h) in corpus::standard_isometries() {
        if h.domain().dim() + h.codomain().dim() > 4 {
            continue;
        }
        let id = polynorm::LinearMap::identity(h.domain().clone());
        for eps in [Rational::zero(), q(1, 4), Rational::one()] {
            let p = eps_pushout(&h, &id, &eps)?;
            if !p.leg_from_c().isometry_defect().is_isometry() || !p.legs_span_apex() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn cube_injective() -> Result<bool> {
    let maps = corpus::standard_isometries()
        .into_iter()
        .filter(|(_, h)| h.domain().dim() == 1)
        .map(|(n, h)| (n.to_string(), h))
        .collect();
    let cat = MorphismCatalog::new(maps)?;
    let k = Arc::new(PolyhedralSpace::linf(2));
    Ok(lindenstrauss_report(&k, &cat)?.counterexample().is_none())
}

fn formula_round_trip() -> Result<bool> {
    let phi = parse_formula("EXISTS y. norm(x1 - 2*y) <= 1/2 AND x2 = y")?;
    Ok(parse_formula(&phi.to_string())? == phi)
}

const CHECKS: &[Check] = &[
    ("duality", duality),
    ("isometries", isometries),
    ("ideals", ideals),
    ("distinguishing", distinguishing),
    ("pushout_legs", pushout_legs),
    ("cube_injective", cube_injective),
    ("formula_round_trip", formula_round_trip),
];

pub fn run(_ctx: &Context) -> Result<Report, CliError> {
    let mut r = Report::new();
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        let ok = check()?;
        r.field(format!("check[{name}]"), if ok { "pass" } else { "fail" });
        if !ok {
            failed.push(*name);
        }
    }
    if !failed.is_empty() {
        return Err(CliError::Failed(format!("failed checks: {}", failed.join(", "))));
    }
    r.field("passed", CHECKS.len());
    Ok(r)
}
