//! Locating and loading input files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use polynorm::{
    CatalogFile, Chain, ChainFile, LinearMap, MapFile, MorphismCatalog, PPFormula, PolyhedralSpace, Rational,
    SpaceFile, SpaceRef, SpaceSource,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MANIFEST_NAME: &str = "polynorm.json";
pub const ROOT_VAR: &str = "POLYNORM_ROOT";

/// Optional `polynorm.json` at the workspace root: named files by kind and
/// default caps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub spaces: BTreeMap<String, String>,
    #[serde(default)]
    pub maps: BTreeMap<String, String>,
    #[serde(default)]
    pub chains: BTreeMap<String, String>,
    #[serde(default)]
    pub catalogs: BTreeMap<String, String>,
    #[serde(default)]
    pub formulas: BTreeMap<String, String>,
    #[serde(default)]
    pub dim_cap: Option<usize>,
    #[serde(default)]
    pub denom_cap: Option<u32>,
}

#[derive(Debug, Clone, Copy)]
pub enum Kind {
    Space,
    Map,
    Chain,
    Catalog,
    Formula,
}

pub struct Workspace {
    root: PathBuf,
    pub manifest: Manifest,
}

impl Workspace {
    /// Reads the manifest under `root`, if there is one, and checks that
    /// every file it names exists and parses.
    pub fn open(root: PathBuf) -> Result<Self, CliError> {
        let path = root.join(MANIFEST_NAME);
        let manifest = if path.is_file() {
            read_json(&path)?
        } else {
            Manifest::default()
        };
        let ws = Workspace { root, manifest };
        ws.validate()?;
        Ok(ws)
    }

    fn validate(&self) -> Result<(), CliError> {
        let m = &self.manifest;
        if m.dim_cap == Some(0) || m.denom_cap == Some(0) {
            return Err(CliError::Parse("manifest caps must be positive".into()));
        }
        for p in m.spaces.values() {
            read_json::<SpaceFile>(&self.root.join(p))?;
        }
        for p in m.maps.values() {
            read_json::<MapFile>(&self.root.join(p))?;
        }
        for p in m.chains.values() {
            read_json::<ChainFile>(&self.root.join(p))?;
        }
        for p in m.catalogs.values() {
            read_json::<CatalogFile>(&self.root.join(p))?;
        }
        for p in m.formulas.values() {
            read_text(&self.root.join(p))?;
        }
        Ok(())
    }

    /// A manifest name, a path relative to the working directory, or a path
    /// relative to the workspace root, in that order.
    pub fn resolve(&self, kind: Kind, arg: &str) -> PathBuf {
        let table = match kind {
            Kind::Space => &self.manifest.spaces,
            Kind::Map => &self.manifest.maps,
            Kind::Chain => &self.manifest.chains,
            Kind::Catalog => &self.manifest.catalogs,
            Kind::Formula => &self.manifest.formulas,
        };
        if let Some(p) = table.get(arg) {
            return self.root.join(p);
        }
        let direct = PathBuf::from(arg);
        if direct.is_absolute() || direct.exists() {
            direct
        } else {
            self.root.join(arg)
        }
    }

    pub fn space(&self, arg: &str) -> Result<SpaceRef, CliError> {
        load_space(&self.resolve(Kind::Space, arg))
    }

    pub fn map(&self, arg: &str) -> Result<LinearMap, CliError> {
        load_map(&self.resolve(Kind::Map, arg))
    }

    pub fn formula(&self, arg: &str) -> Result<PPFormula, CliError> {
        let text = read_text(&self.resolve(Kind::Formula, arg))?;
        Ok(polynorm::parse_formula(&text)?)
    }

    pub fn chain(&self, arg: &str) -> Result<Chain, CliError> {
        let path = self.resolve(Kind::Chain, arg);
        let file: ChainFile = read_json(&path)?;
        let dir = parent(&path);
        match (&file.space, file.links.is_empty()) {
            (Some(s), true) => Ok(Chain::single(load_space(&dir.join(s))?)),
            (None, false) => {
                let links = file
                    .links
                    .iter()
                    .map(|l| load_map(&dir.join(l)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Chain::new(links)?)
            }
            _ => Err(CliError::Parse(format!(
                "{}: a chain lists either links or a single space",
                path.display()
            ))),
        }
    }

    pub fn catalog(&self, arg: &str) -> Result<MorphismCatalog, CliError> {
        let path = self.resolve(Kind::Catalog, arg);
        let file: CatalogFile = read_json(&path)?;
        let dir = parent(&path);
        let maps = file
            .maps
            .iter()
            .map(|item| Ok((item.name.clone(), load_map(&dir.join(&item.map))?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(MorphismCatalog::new(maps)?)
    }
}

fn parent(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn load_space(path: &Path) -> Result<SpaceRef, CliError> {
    let file: SpaceFile = read_json(path)?;
    Ok(Arc::new(file.build()?))
}

fn load_source(src: &SpaceSource, dir: &Path) -> Result<PolyhedralSpace, CliError> {
    match src {
        SpaceSource::Inline(f) => Ok(f.build()?),
        SpaceSource::Path(p) => {
            let file: SpaceFile = read_json(&dir.join(p))?;
            Ok(file.build()?)
        }
    }
}

pub fn load_map(path: &Path) -> Result<LinearMap, CliError> {
    let file: MapFile = read_json(path)?;
    let dir = parent(path);
    let domain = load_source(&file.domain, &dir)?;
    let codomain = load_source(&file.codomain, &dir)?;
    Ok(file.build(domain, codomain)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_space(path: &Path, space: &PolyhedralSpace) -> Result<(), CliError> {
    write_json(path, &SpaceFile::describe(space))
}

pub fn write_map(path: &Path, map: &LinearMap) -> Result<(), CliError> {
    write_json(path, &MapFile::describe(map))
}

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    s.trim()
        .parse()
        .map_err(|e: polynorm::Error| CliError::Parse(e.to_string()))
}

/// `"1,0;0,1/2"`: vectors separated by `;`, entries by `,`.
pub fn parse_vectors(s: &str) -> Result<Vec<Vec<Rational>>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|v| v.split(',').map(parse_rational).collect())
        .collect()
}
