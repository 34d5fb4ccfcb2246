//! Matrix and state fixtures, with complex entries written as [re, im] pairs.

use std::path::{Path, PathBuf};

use qmeas::{Complex64, ComplexMatrix, ComplexVector};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, Result};

pub type Pair = [f64; 2];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFixture {
    pub observable: Vec<Vec<Pair>>,
    #[serde(default)]
    pub state: Option<Vec<Pair>>,
    #[serde(default)]
    pub density: Option<Vec<Vec<Pair>>>,
    #[serde(default)]
    pub hamiltonian: Option<Vec<Vec<Pair>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringFixture {
    pub h0: Vec<Vec<Pair>>,
    pub hi: Vec<Vec<Pair>>,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: PathBuf::from(path), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse { path: PathBuf::from(path), source })
}

pub fn vector(pairs: &[Pair]) -> ComplexVector {
    pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

pub fn matrix(rows: &[Vec<Pair>], what: &str) -> Result<ComplexMatrix> {
    let rows: Vec<ComplexVector> = rows.iter().map(|r| vector(r)).collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| CliError::Config(format!("{what}: {e}")))
}
