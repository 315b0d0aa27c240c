use std::path::Path;
use std::sync::Arc;

use polynorm::{
    chain_colimit_distance, distinguishing_formula, eps_pushout, factor_by_rescaling, factor_through_stage,
    ideal_defect, injectivity_defect, lindenstrauss_report, retraction_defect, satisfaction_slack, transfer_check,
    transfer_check_ambient, verify_u_extension_candidate, DefectReport, Embedding, GurariiConfig, LinearMap,
    PolyhedralSpace, Slack,
};

use crate::report::{vector, Report};
use crate::workspace::{create_dir, parse_rational, parse_vectors, write_map, write_space, write_text};
use crate::{CliError, Context};

type Out = Result<Report, CliError>;

fn space_fields(r: &mut Report, key: &str, k: &PolyhedralSpace) {
    r.field(format!("{key}.dim"), k.dim());
    r.field(format!("{key}.vertex_count"), k.vertices().len());
    r.field(format!("{key}.facet_count"), k.facets().len());
}

fn defect_fields(r: &mut Report, key: &str, f: &LinearMap) {
    let d = f.isometry_defect();
    r.field(format!("{key}.upper"), &d.upper);
    r.field(format!("{key}.lower"), &d.lower);
}

fn witness_fields(r: &mut Report, d: &DefectReport) {
    match &d.witness {
        Some(w) => {
            r.field("witness_norm", w.operator_norm());
            r.map("witness", w);
        }
        None => {
            r.field("witness", "none");
        }
    }
}

fn embedding(ctx: &Context, arg: &str) -> Result<Embedding, CliError> {
    Ok(Embedding::new(ctx.ws.map(arg)?)?)
}

pub fn space_check(ctx: &Context, file: &str) -> Out {
    let k = ctx.ws.space(file)?;
    let mut r = Report::new();
    r.field("dim", k.dim());
    r.vectors("vertex", k.vertices());
    r.vectors("facet", k.facets());
    Ok(r)
}

pub fn map_norm(ctx: &Context, file: &str) -> Out {
    let f = ctx.ws.map(file)?;
    let mut r = Report::new();
    r.field("domain_dim", f.domain().dim());
    r.field("codomain_dim", f.codomain().dim());
    r.field("norm", f.operator_norm());
    Ok(r)
}

pub fn map_defect(ctx: &Context, file: &str) -> Out {
    let f = ctx.ws.map(file)?;
    let d = f.isometry_defect();
    let mut r = Report::new();
    r.field("norm", f.operator_norm());
    r.field("upper", &d.upper);
    r.field("lower", &d.lower);
    r.field("max", d.max());
    r.field("isometry", d.is_isometry());
    r.field("injective", f.is_injective());
    Ok(r)
}

pub fn pushout(ctx: &Context, f: &str, g: &str, eps: &str, out: &Path) -> Out {
    let f = ctx.ws.map(f)?;
    let g = ctx.ws.map(g)?;
    let eps = parse_rational(eps)?;
    let p = eps_pushout(&f, &g, &eps)?;
    create_dir(out)?;
    let apex = out.join("apex.json");
    let leg_b = out.join("leg_from_b.json");
    let leg_c = out.join("leg_from_c.json");
    write_space(&apex, p.apex())?;
    write_map(&leg_b, p.leg_from_b())?;
    write_map(&leg_c, p.leg_from_c())?;
    let mut r = Report::new();
    r.field("eps", p.eps());
    space_fields(&mut r, "apex", p.apex());
    r.field("relation_dim", p.relation_basis().len());
    r.field("commutativity_defect", p.commutativity_defect());
    r.field("legs_span", p.legs_span_apex());
    defect_fields(&mut r, "leg_from_b", p.leg_from_b());
    defect_fields(&mut r, "leg_from_c", p.leg_from_c());
    r.field("apex_file", apex.display());
    r.field("leg_from_b_file", leg_b.display());
    r.field("leg_from_c_file", leg_c.display());
    Ok(r)
}

pub fn chain_factor(ctx: &Context, chain: &str, f: &str, eps: &str, rescale: bool, out: Option<&Path>) -> Out {
    let ch = ctx.ws.chain(chain)?;
    let f = ctx.ws.map(f)?;
    let eps = parse_rational(eps)?;
    let fac = if rescale {
        factor_by_rescaling(&ch, &f, &eps)?
    } else {
        factor_through_stage(&ch, &f, &eps)?
    };
    let mut r = Report::new();
    r.field("method", if rescale { "rescale" } else { "exact" });
    r.field("eps", &eps);
    r.field("stage", fac.stage);
    r.field("distance", &fac.distance);
    for (i, d) in fac.stage_distances.iter().enumerate() {
        r.field(format!("stage_distance[{i}]"), d);
    }
    r.field("factor_norm", fac.map.operator_norm());
    r.map("factor", &fac.map);
    if let Some(path) = out {
        write_map(path, &fac.map)?;
        r.field("factor_file", path.display());
    }
    Ok(r)
}

pub fn chain_distance(ctx: &Context, chain: &str, f: &str, g: &str, stage: usize) -> Out {
    let ch = ctx.ws.chain(chain)?;
    let f = ctx.ws.map(f)?;
    let g = ctx.ws.map(g)?;
    let ds = chain_colimit_distance(&ch, stage, &f, &g)?;
    let mut r = Report::new();
    r.field("stage", stage);
    for (j, d) in ds.iter().enumerate() {
        r.field(format!("distance[{}]", stage + j), d);
    }
    r.field("limit", ds.last().expect("at least the starting stage"));
    Ok(r)
}

pub fn ideal_check(ctx: &Context, emb: &str, witness: Option<&Path>) -> Out {
    let e = embedding(ctx, emb)?;
    let d = ideal_defect(&e);
    let mut r = Report::new();
    r.field("subspace_dim", e.subspace().dim());
    r.field("ambient_dim", e.ambient().dim());
    r.field("defect", &d.value);
    r.field("ideal", d.is_zero());
    match (witness, &d.witness) {
        (Some(path), Some(w)) => {
            write_map(path, w)?;
            r.field("witness_norm", w.operator_norm());
            r.field("witness", path.display());
        }
        _ => witness_fields(&mut r, &d),
    }
    Ok(r)
}

pub fn retract_check(ctx: &Context, map: &str) -> Out {
    let f = ctx.ws.map(map)?;
    let d = retraction_defect(&f)?;
    let mut r = Report::new();
    r.field("defect", &d.value);
    r.field("split", d.is_zero());
    witness_fields(&mut r, &d);
    Ok(r)
}

pub fn uext_verify(ctx: &Context, emb: &str, t: &str, eps: &str, subspace: Option<&str>) -> Out {
    let e = embedding(ctx, emb)?;
    let t = ctx.ws.map(t)?;
    let eps = parse_rational(eps)?;
    let b = match subspace {
        Some(s) => ctx.ws.map(s)?,
        None => LinearMap::identity(e.ambient().clone()),
    };
    let ok = verify_u_extension_candidate(&e, &b, &t, &eps)?;
    let mut r = Report::new();
    r.field("eps", &eps);
    defect_fields(&mut r, "candidate", &t);
    r.field("valid", ok);
    Ok(r)
}

fn slack_fields(r: &mut Report, key: &str, s: &Slack) {
    r.field(key.to_string(), s);
    r.field(format!("{key}.satisfied"), s.satisfied());
}

pub fn logic_slack(ctx: &Context, space: &str, formula: &str, assign: &str) -> Out {
    let k = ctx.ws.space(space)?;
    let phi = ctx.ws.formula(formula)?;
    let a = parse_vectors(assign)?;
    let s = satisfaction_slack(&k, &phi, &a)?;
    let mut r = Report::new();
    r.field("formula", &phi);
    slack_fields(&mut r, "slack", &s);
    Ok(r)
}

pub fn logic_transfer(ctx: &Context, emb: &str, formula: &str, assign: &str, ambient: bool) -> Out {
    let e = embedding(ctx, emb)?;
    let phi = ctx.ws.formula(formula)?;
    let a = parse_vectors(assign)?;
    let (sk, sl) = if ambient {
        transfer_check_ambient(&e, &phi, &a)?
    } else {
        transfer_check(&e, &phi, &a)?
    };
    let mut r = Report::new();
    r.field("formula", &phi);
    slack_fields(&mut r, "slack_subspace", &sk);
    slack_fields(&mut r, "slack_ambient", &sl);
    r.field("agree", sk.satisfied() == sl.satisfied());
    Ok(r)
}

pub fn logic_distinguish(ctx: &Context, emb: &str, out: Option<&Path>) -> Out {
    let e = embedding(ctx, emb)?;
    let (phi, a) = distinguishing_formula(&e)?;
    let (sk, sl) = transfer_check(&e, &phi, &a)?;
    let mut r = Report::new();
    r.field("formula", &phi);
    r.vectors("assignment", &a);
    slack_fields(&mut r, "slack_subspace", &sk);
    slack_fields(&mut r, "slack_ambient", &sl);
    if let Some(path) = out {
        write_text(path, &format!("{phi}\n"))?;
        r.field("formula_file", path.display());
    }
    Ok(r)
}

pub fn inj_defect(ctx: &Context, h: &str, space: &str) -> Out {
    let h = ctx.ws.map(h)?;
    let k = ctx.ws.space(space)?;
    let d = injectivity_defect(&h, &k)?;
    let mut r = Report::new();
    r.field("defect", &d.value);
    match &d.probe {
        Some(p) => {
            r.map("probe", p);
        }
        None => {
            r.field("probe", "none");
        }
    }
    witness_fields(&mut r, &d);
    Ok(r)
}

pub fn lind_report(ctx: &Context, space: &str, catalog: &str) -> Out {
    let k = ctx.ws.space(space)?;
    let cat = ctx.ws.catalog(catalog)?;
    let rep = lindenstrauss_report(&k, &cat)?;
    let mut r = Report::new();
    r.field("tested", rep.entries.len());
    for (name, d) in &rep.entries {
        r.field(format!("defect[{name}]"), &d.value);
    }
    r.field("counterexample", rep.counterexample().unwrap_or("none"));
    Ok(r)
}

pub fn gurarii_build(ctx: &Context, seed: &str, catalog: &str, rounds: usize, rng_seed: u64, out: &Path) -> Out {
    let k = ctx.ws.space(seed)?;
    let cat = ctx.ws.catalog(catalog)?;
    let config = GurariiConfig {
        rounds,
        denom_cap: ctx.denom_cap,
        seed: rng_seed,
    };
    let log = polynorm::gurarii_build(Arc::clone(&k), &cat, &config)?;
    create_dir(out)?;
    let mut r = Report::new();
    r.field("rounds_requested", rounds);
    r.field("rounds_completed", log.rounds.len());
    r.field("denom_cap", ctx.denom_cap);
    r.field("rng_seed", rng_seed);
    for (i, s) in log.spaces.iter().enumerate() {
        let path = out.join(format!("stage_{i}.json"));
        write_space(&path, s)?;
        r.field(format!("stage[{i}].dim"), s.dim());
        r.field(format!("stage[{i}].file"), path.display());
    }
    for (i, l) in log.links.iter().enumerate() {
        let path = out.join(format!("link_{i}.json"));
        write_map(&path, l)?;
        r.field(format!("link[{i}].file"), path.display());
    }
    for rec in &log.rounds {
        let key = format!("round[{}]", rec.round);
        r.field(format!("{key}.catalog"), &rec.catalog_name);
        r.field(format!("{key}.request_norm"), rec.request.operator_norm());
        r.field(format!("{key}.dim"), rec.dim);
        r.field(format!("{key}.expected_dim"), rec.expected_dim);
        r.field(format!("{key}.link_isometry"), rec.link_is_isometry);
        let residuals: Vec<_> = rec.residuals.clone();
        r.field(format!("{key}.residuals"), vector(&residuals));
    }
    r.field(
        "stopped",
        log.stopped.as_ref().map_or("none".to_string(), |e| format!("{}: {e}", e.name())),
    );
    let log_path = out.join("log.txt");
    write_text(&log_path, &r.to_string())?;
    r.field("log_file", log_path.display());
    Ok(r)
}
