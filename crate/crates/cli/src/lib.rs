//! Command-line frontend for `polynorm`.
//!
//! Exit codes: 0 on success, 1 on I/O or parse errors, 2 on domain errors
//! (the error name is printed on standard error), 64 on usage errors.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
pub mod report;
mod selftest;
pub mod workspace;

pub use workspace::{Manifest, MANIFEST_NAME, ROOT_VAR};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

const DEFAULT_DENOM_CAP: u32 = 2;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Domain(polynorm::Error),
    /// A check that ran to completion and failed.
    Failed(String),
}

impl From<polynorm::Error> for CliError {
    fn from(e: polynorm::Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => EXIT_INPUT,
            CliError::Domain(e) if e.is_parse() => EXIT_INPUT,
            CliError::Domain(_) | CliError::Failed(_) => EXIT_DOMAIN,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Io(_) => "IoError",
            CliError::Parse(_) => "ParseError",
            CliError::Domain(e) => e.name(),
            CliError::Failed(_) => "SelftestFailed",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Parse(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polynorm", version, about = "Exact computations with polyhedral normed spaces")]
struct Cli {
    /// Largest dimension allowed in polytope conversions.
    #[arg(long, global = true)]
    dim_cap: Option<usize>,
    /// Largest denominator of randomly drawn entries.
    #[arg(long, global = true)]
    denom_cap: Option<u32>,
    /// Workspace root (defaults to $POLYNORM_ROOT, then the current directory).
    #[arg(long, global = true)]
    root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect space files.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Norms and isometry defects of maps.
    #[command(subcommand)]
    Map(MapCmd),
    /// Eps-pushout of f: A -> B and g: A -> C.
    Pushout {
        f: String,
        g: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Factorization through finite chains.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Ideal defect of an isometric embedding.
    #[command(subcommand)]
    Ideal(IdealCmd),
    /// Approximate left inverses.
    #[command(subcommand)]
    Retract(RetractCmd),
    /// Candidate operators for almost isometric ideals.
    #[command(subcommand)]
    Uext(UextCmd),
    /// Positive-primitive formulas.
    #[command(subcommand)]
    Logic(LogicCmd),
    /// Approximate injectivity defects.
    #[command(subcommand)]
    Inj(InjCmd),
    /// Injectivity against a catalog of isometries.
    #[command(subcommand)]
    Lind(LindCmd),
    /// Iterated pushout amalgamation.
    #[command(subcommand)]
    Gurarii(GurariiCmd),
    /// Runs the bundled invariant corpus.
    Selftest,
}

#[derive(Debug, Subcommand)]
enum SpaceCmd {
    /// Validate a space and print vertices and facets.
    Check { file: String },
}

#[derive(Debug, Subcommand)]
enum MapCmd {
    Norm { file: String },
    Defect { file: String },
}

#[derive(Debug, Subcommand)]
enum ChainCmd {
    /// Least stage through which f factors within eps.
    Factor {
        chain: String,
        f: String,
        #[arg(long)]
        eps: String,
        /// Use the rescaling argument instead of the exact stage search.
        #[arg(long)]
        rescale: bool,
        /// Write the factor map here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distances between the images of f and g at later stages.
    Distance {
        chain: String,
        f: String,
        g: String,
        #[arg(long)]
        stage: usize,
    },
}

#[derive(Debug, Subcommand)]
enum IdealCmd {
    Check {
        embedding: String,
        /// Write the optimal extension operator here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum RetractCmd {
    Check { map: String },
}

#[derive(Debug, Subcommand)]
enum UextCmd {
    /// Check t: B -> K against the embedding K -> L.
    Verify {
        embedding: String,
        t: String,
        #[arg(long)]
        eps: String,
        /// The subspace map B -> L (defaults to the identity of L).
        #[arg(long)]
        subspace: Option<String>,
    },
}

#[derive(Debug, Args)]
struct Assignment {
    /// Vectors separated by `;`, entries by `,`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    assign: String,
}

#[derive(Debug, Subcommand)]
enum LogicCmd {
    Slack {
        space: String,
        formula: String,
        #[command(flatten)]
        assign: Assignment,
    },
    Transfer {
        embedding: String,
        formula: String,
        #[command(flatten)]
        assign: Assignment,
        /// The assignment is given in ambient coordinates.
        #[arg(long)]
        ambient: bool,
    },
    Distinguish {
        embedding: String,
        /// Write the formula here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum InjCmd {
    Defect { h: String, space: String },
}

#[derive(Debug, Subcommand)]
enum LindCmd {
    Report { space: String, catalog: String },
}

#[derive(Debug, Subcommand)]
enum GurariiCmd {
    Build {
        seed: String,
        catalog: String,
        #[arg(long, default_value_t = 3)]
        rounds: usize,
        #[arg(long)]
        out: PathBuf,
        /// Seed of the request stream.
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
    },
}

/// Settings after merging flags, environment and manifest.
pub(crate) struct Context {
    pub ws: workspace::Workspace,
    pub denom_cap: u32,
}

/// Runs one command. `root_env` is the value of `$POLYNORM_ROOT`.
pub fn run<I, T>(args: I, root_env: Option<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, root_env) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, root_env: Option<OsString>) -> Result<String, CliError> {
    if cli.dim_cap == Some(0) || cli.denom_cap == Some(0) {
        return Err(CliError::Parse("caps must be positive".into()));
    }
    let root = cli
        .root
        .or_else(|| root_env.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let ws = workspace::Workspace::open(root)?;
    let dim_cap = cli
        .dim_cap
        .or(ws.manifest.dim_cap)
        .unwrap_or(polynorm::geometry::DEFAULT_DIM_CAP);
    polynorm::geometry::set_dim_cap(dim_cap);
    let denom_cap = cli.denom_cap.or(ws.manifest.denom_cap).unwrap_or(DEFAULT_DENOM_CAP);
    let ctx = Context { ws, denom_cap };
    let report = match cli.command {
        Command::Space(SpaceCmd::Check { file }) => commands::space_check(&ctx, &file)?,
        Command::Map(MapCmd::Norm { file }) => commands::map_norm(&ctx, &file)?,
        Command::Map(MapCmd::Defect { file }) => commands::map_defect(&ctx, &file)?,
        Command::Pushout { f, g, eps, out } => commands::pushout(&ctx, &f, &g, &eps, &out)?,
        Command::Chain(ChainCmd::Factor {
            chain,
            f,
            eps,
            rescale,
            out,
        }) => commands::chain_factor(&ctx, &chain, &f, &eps, rescale, out.as_deref())?,
        Command::Chain(ChainCmd::Distance { chain, f, g, stage }) => {
            commands::chain_distance(&ctx, &chain, &f, &g, stage)?
        }
        Command::Ideal(IdealCmd::Check { embedding, witness }) => {
            commands::ideal_check(&ctx, &embedding, witness.as_deref())?
        }
        Command::Retract(RetractCmd::Check { map }) => commands::retract_check(&ctx, &map)?,
        Command::Uext(UextCmd::Verify {
            embedding,
            t,
            eps,
            subspace,
        }) => commands::uext_verify(&ctx, &embedding, &t, &eps, subspace.as_deref())?,
        Command::Logic(LogicCmd::Slack { space, formula, assign }) => {
            commands::logic_slack(&ctx, &space, &formula, &assign.assign)?
        }
        Command::Logic(LogicCmd::Transfer {
            embedding,
            formula,
            assign,
            ambient,
        }) => commands::logic_transfer(&ctx, &embedding, &formula, &assign.assign, ambient)?,
        Command::Logic(LogicCmd::Distinguish { embedding, out }) => {
            commands::logic_distinguish(&ctx, &embedding, out.as_deref())?
        }
        Command::Inj(InjCmd::Defect { h, space }) => commands::inj_defect(&ctx, &h, &space)?,
        Command::Lind(LindCmd::Report { space, catalog }) => commands::lind_report(&ctx, &space, &catalog)?,
        Command::Gurarii(GurariiCmd::Build {
            seed,
            catalog,
            rounds,
            out,
            rng_seed,
        }) => commands::gurarii_build(&ctx, &seed, &catalog, rounds, rng_seed, &out)?,
        Command::Selftest => selftest::run(&ctx)?,
    };
    Ok(report.to_string())
}
