//! Iterated amalgamation towards a space of almost universal disposition.
//!
//! Each round takes a request `(h: A -> B, f: A -> K_n)` with `h` an
//! isometry and forms the exact pushout of `h` along `f`. The new link
//! `K_n -> K_{n+1}` is the pushout of `h`, hence an isometry, and the other
//! leg `g: B -> K_{n+1}` satisfies `g h = k f` exactly.

use rayon::prelude::*;

use crate::colimit::eps_pushout;
use crate::corpus::{random_contraction, rng};
use crate::error::{Error, Result};
use crate::injectivity::MorphismCatalog;
use crate::map::{compose, LinearMap};
use crate::rational::Rational;
use crate::space::SpaceRef;

#[derive(Debug, Clone)]
pub struct GurariiConfig {
    pub rounds: usize,
    /// Largest denominator of request matrix entries.
    pub denom_cap: u32,
    pub seed: u64,
}

impl Default for GurariiConfig {
    fn default() -> Self {
        GurariiConfig {
            rounds: 3,
            denom_cap: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub round: usize,
    pub catalog_name: String,
    /// The isometry `h: A -> B`.
    pub catalog_map: LinearMap,
    /// The request map `f: A -> K_n`.
    pub request: LinearMap,
    /// `g: B -> K_{n+1}`.
    pub request_leg: LinearMap,
    pub dim: usize,
    /// `dim B + dim K_n - dim A`.
    pub expected_dim: usize,
    pub link_is_isometry: bool,
    /// Residual `||g_j h_j - k f_j||` of every request processed so far,
    /// pushed to the new stage.
    pub residuals: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct GurariiLog {
    pub spaces: Vec<SpaceRef>,
    pub links: Vec<LinearMap>,
    pub rounds: Vec<RoundRecord>,
    /// Why the build stopped early, if it did.
    pub stopped: Option<Error>,
}

/// Runs `config.rounds` rounds, cycling through the isometries of the
/// catalog and drawing request maps with bounded denominators.
pub fn gurarii_build(seed: SpaceRef, catalog: &MorphismCatalog, config: &GurariiConfig) -> Result<GurariiLog> {
    let isometries: Vec<_> = catalog.isometries().collect();
    let mut log = GurariiLog {
        spaces: vec![seed],
        links: Vec::new(),
        rounds: Vec::new(),
        stopped: None,
    };
    if config.rounds > 0 && isometries.is_empty() {
        return Err(Error::EmptyInput("catalog has no isometries".into()));
    }
    let mut stream = rng(config.seed);
    // (h, f, g, stage of f)
    let mut processed: Vec<(LinearMap, LinearMap, LinearMap, usize)> = Vec::new();
    for round in 0..config.rounds {
        let entry = isometries[round % isometries.len()];
        let h = &entry.map;
        let current = log.spaces.last().unwrap().clone();
        let mut f = random_contraction(&mut stream, h.domain(), &current, config.denom_cap);
        // Avoid degenerate zero requests when the grid allows something else.
        for _ in 0..8 {
            if !f.matrix().is_zero() {
                break;
            }
            f = random_contraction(&mut stream, h.domain(), &current, config.denom_cap);
        }
        let p = match eps_pushout(h, &f, &Rational::zero()) {
            Ok(p) => p,
            Err(e @ Error::DimensionCapExceeded { .. }) => {
                log.stopped = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        let link = p.leg_from_c().clone();
        let leg = p.leg_from_b().clone();
        let n = log.links.len();
        log.spaces.push(p.apex().clone());
        log.links.push(link.clone());
        processed.push((h.clone(), f.clone(), leg.clone(), n));
        let new_stage = n + 1;
        let residuals = processed
            .par_iter()
            .map(|(h, f, g, stage)| residual(&log, h, f, g, *stage, new_stage))
            .collect::<Result<Vec<_>>>()?;
        log.rounds.push(RoundRecord {
            round,
            catalog_name: entry.name.clone(),
            catalog_map: h.clone(),
            request: f,
            request_leg: leg,
            dim: p.apex().dim(),
            expected_dim: h.codomain().dim() + current.dim() - h.domain().dim(),
            link_is_isometry: link.is_isometry(),
            residuals,
        });
    }
    Ok(log)
}

fn push_to(log: &GurariiLog, map: &LinearMap, from: usize, to: usize) -> Result<LinearMap> {
    log.links[from..to].iter().try_fold(map.clone(), |acc, k| compose(k, &acc))
}

/// `||(k g) h - (k f)||` with both sides pushed to stage `to`.
fn residual(log: &GurariiLog, h: &LinearMap, f: &LinearMap, g: &LinearMap, stage: usize, to: usize) -> Result<Rational> {
    let lhs = compose(&push_to(log, g, stage + 1, to)?, h)?;
    let rhs = push_to(log, f, stage, to)?;
    lhs.distance(&rhs)
}

impl GurariiLog {
    /// Residual of request `j` at stage `to` (`to > j`).
    pub fn residual_at(&self, j: usize, to: usize) -> Result<Rational> {
        let r = self.rounds.get(j).ok_or(Error::StageOutOfRange { stage: j, len: self.rounds.len() })?;
        if to <= j || to >= self.spaces.len() {
            return Err(Error::StageOutOfRange { stage: to, len: self.spaces.len() });
        }
        residual(self, &r.catalog_map, &r.request, &r.request_leg, j, to)
    }
}
