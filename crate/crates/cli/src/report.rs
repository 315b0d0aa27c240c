//! Line-oriented `key = value` reports.

use std::fmt::{self, Display};

use polynorm::{LinearMap, Rational};

#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.lines.push((key.into(), value.to_string()));
        self
    }

    pub fn vectors(&mut self, key: &str, vs: &[Vec<Rational>]) -> &mut Self {
        self.field(format!("{key}_count"), vs.len());
        for (i, v) in vs.iter().enumerate() {
            self.field(format!("{key}[{i}]"), vector(v));
        }
        self
    }

    /// Matrix rows of a map, preceded by its dimensions.
    pub fn map(&mut self, key: &str, f: &LinearMap) -> &mut Self {
        self.field(format!("{key}.domain_dim"), f.domain().dim());
        self.field(format!("{key}.codomain_dim"), f.codomain().dim());
        for (i, row) in f.matrix().row_vecs().iter().enumerate() {
            self.field(format!("{key}.row[{i}]"), vector(row));
        }
        self
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

pub fn vector(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}
