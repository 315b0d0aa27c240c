//! Serializable file representations of spaces and maps. Rationals are
//! written as `"p/q"` strings; floats are rejected on input.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::map::LinearMap;
use crate::rational::Rational;
use crate::space::PolyhedralSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<Rational>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Vec<Rational>>>,
}

/// A space given inline or by a path relative to the referring file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSource {
    Path(String),
    Inline(SpaceFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub domain: SpaceSource,
    pub codomain: SpaceSource,
    /// Codomain-dimension rows of domain-dimension entries.
    pub matrix: Vec<Vec<Rational>>,
}

/// A chain is either a list of link map files or a single space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    #[serde(default)]
    pub links: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogItem {
    pub name: String,
    pub map: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    pub maps: Vec<CatalogItem>,
}

impl SpaceFile {
    /// Validates and builds the space. When both descriptions are given they
    /// must describe the same ball.
    pub fn build(&self) -> Result<PolyhedralSpace> {
        let space = match (&self.vertices, &self.facets) {
            (Some(v), _) => PolyhedralSpace::from_vertices(self.dim, v.clone())?,
            (None, Some(f)) => PolyhedralSpace::from_facets(self.dim, f.clone())?,
            (None, None) if self.dim == 0 => PolyhedralSpace::zero(),
            (None, None) => return Err(Error::EmptyInput("space needs vertices or facets".into())),
        };
        if let (Some(_), Some(f)) = (&self.vertices, &self.facets) {
            let other = PolyhedralSpace::from_facets(self.dim, f.clone())?;
            if other != space {
                return Err(Error::Parse("vertex and facet descriptions disagree".into()));
            }
        }
        Ok(space)
    }

    pub fn describe(space: &PolyhedralSpace) -> Self {
        SpaceFile {
            dim: space.dim(),
            vertices: Some(space.vertices().to_vec()),
            facets: Some(space.facets().to_vec()),
        }
    }
}

impl MapFile {
    /// Builds the map once both spaces are resolved.
    pub fn build(&self, domain: PolyhedralSpace, codomain: PolyhedralSpace) -> Result<LinearMap> {
        let matrix = Matrix::from_rows(self.matrix.clone(), domain.dim())?;
        LinearMap::new(Arc::new(domain), Arc::new(codomain), matrix)
    }

    /// Self-contained file with both spaces inline.
    pub fn describe(map: &LinearMap) -> Self {
        MapFile {
            domain: SpaceSource::Inline(SpaceFile::describe(map.domain())),
            codomain: SpaceSource::Inline(SpaceFile::describe(map.codomain())),
            matrix: map.matrix().row_vecs(),
        }
    }
}
