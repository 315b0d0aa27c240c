//! Exact computations with finite-dimensional polyhedral normed spaces:
//! isometry defects, approximate pushouts and chain colimits, ideals and
//! approximate retractions, positive-primitive formulas, and injectivity
//! defects. All arithmetic is over the rationals.

pub mod colimit;
pub mod corpus;
pub mod error;
pub mod format;
pub mod geometry;
pub mod gurarii;
pub mod injectivity;
pub mod linalg;
pub mod logic;
pub mod lp;
pub mod map;
mod oplp;
pub mod purity;
pub mod rational;
pub mod space;

pub use colimit::{
    chain_colimit_distance, eps_pushout, factor_by_rescaling, factor_through_stage, pushout_mediator, Chain,
    EpsPushout, Factorization,
};
pub use error::{Error, Result};
pub use format::{CatalogFile, CatalogItem, ChainFile, MapFile, SpaceFile, SpaceSource};
pub use gurarii::{gurarii_build, GurariiConfig, GurariiLog, RoundRecord};
pub use injectivity::{
    injectivity_defect, lindenstrauss_report, operator_ball, product_injectivity, saturation_report, vertex_isometries,
    CatalogEntry, LindenstraussReport, MorphismCatalog, SaturationEntry,
};
pub use linalg::Matrix;
pub use map::{compose, tensor_map, IsometryDefect, LinearMap};
pub use logic::{
    approximate, distinguishing_formula, parse_formula, presentation_formula, satisfaction_slack, transfer_check,
    transfer_check_ambient, Atom, PPFormula, Slack, Term, Var,
};
pub use lp::{lp_solve, Constraint, Direction, LinearProgram, LpResult, Relation};
pub use purity::{
    best_factorization, bidual_embedding, canonical_square, ideal_defect, pure_square_defect, repair_fix_basis,
    retraction_defect, verify_u_extension_candidate, DefectKind, DefectReport, Embedding, Repair,
};
pub use rational::{q, Rational};
pub use space::{Point, PolyhedralSpace, SpaceRef, SumKind};
