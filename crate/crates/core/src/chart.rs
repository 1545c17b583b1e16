use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Maximum chart dimension. Multi-indices are stored as 32-bit masks.
pub const MAX_DIM: usize = 32;

const RESERVED: &[&str] = &["sin", "cos", "exp"];

#[derive(Debug, PartialEq, Eq)]
struct ChartInner {
    names: Vec<String>,
}

/// An n-dimensional coordinate chart: a dimension plus named coordinates.
///
/// Charts are cheap to clone and compared by coordinate names, so two charts
/// built with the same names are interchangeable.
#[derive(Debug, Clone)]
pub struct Chart(Arc<ChartInner>);

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Chart {}

impl Chart {
    /// A chart with the given coordinate names. Names must be unique, valid
    /// identifiers, and not one of the reserved function names.
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Invalid("chart dimension must be at least 1".into()));
        }
        if names.len() > MAX_DIM {
            return Err(Error::Invalid(format!(
                "chart dimension {} exceeds the supported maximum {MAX_DIM}",
                names.len()
            )));
        }
        for name in &names {
            if !is_identifier(name) {
                return Err(Error::Invalid(format!(
                    "coordinate name `{name}` is not a valid identifier"
                )));
            }
            if RESERVED.contains(&name.as_str()) {
                return Err(Error::Invalid(format!(
                    "coordinate name `{name}` is reserved"
                )));
            }
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::Invalid(format!(
                    "duplicate coordinate name `{name}`"
                )));
            }
        }
        Ok(Chart(Arc::new(ChartInner { names })))
    }

    /// The standard chart with coordinates `x0..x{n-1}`.
    pub fn standard(dim: usize) -> Result<Self> {
        Chart::new((0..dim).map(|i| format!("x{i}")).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.names.len()
    }

    pub fn coord_names(&self) -> &[String] {
        &self.0.names
    }

    pub fn coord_name(&self, i: usize) -> &str {
        &self.0.names[i]
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    /// Error if `other` is a different chart.
    pub fn expect_same(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.names.join(","))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
