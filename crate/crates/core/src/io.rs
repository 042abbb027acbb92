//! JSON input formats and serialization helpers.
//!
//! Matrices are written row-major as a flat list of `[re, im]` pairs.
//! A generator file looks like
//! `{"d": 2, "tol": 1e-9, "generators": [[[0,1],[0,0],[0,0],[0,-1]], ...]}`
//! and a single-matrix file like `{"d": 2, "matrix": [[1,0],[0,0],[0,0],[1,0]]}`.

use std::fmt::Display;
use std::path::Path;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groups::{enumerate_closure, GroupSpec};
use crate::matcore::{CMatrix, UnitaryMatrix};

/// Default tolerance for generator files that omit `tol`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default closure cap for `enum:FILE` groups.
pub const DEFAULT_CLOSURE_CAP: usize = 100_000;

pub(crate) fn ser_ratio_vec<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

pub(crate) fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Quotes a CSV field when it contains a separator, quote, or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub d: usize,
    #[serde(default)]
    pub tol: Option<f64>,
    pub generators: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub d: usize,
    #[serde(default)]
    pub tol: Option<f64>,
    pub matrix: Vec<[f64; 2]>,
}

/// Flat `[re, im]` list of a matrix, row-major.
pub fn matrix_to_pairs(m: &CMatrix) -> Vec<[f64; 2]> {
    m.as_slice().iter().map(|z| [z.re, z.im]).collect()
}

pub fn matrix_from_pairs(d: usize, pairs: &[[f64; 2]]) -> Result<CMatrix> {
    if pairs.len() != d * d {
        return Err(Error::Parse(format!(
            "expected {} entries for a {d}x{d} matrix, found {}",
            d * d,
            pairs.len()
        )));
    }
    if pairs.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Parse("matrix entries must be finite".into()));
    }
    CMatrix::from_row_major(d, pairs.iter().map(|&[a, b]| Complex64::new(a, b)).collect())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

impl GeneratorFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("generator file: {e}")))
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    /// Generators as unitaries, checked to the file's tolerance.
    pub fn unitaries(&self) -> Result<Vec<UnitaryMatrix>> {
        if self.generators.is_empty() {
            return Err(Error::Parse("generator list is empty".into()));
        }
        self.generators
            .iter()
            .map(|g| UnitaryMatrix::with_tol(matrix_from_pairs(self.d, g)?, self.tol().max(1e-9)))
            .collect()
    }
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix file: {e}")))
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        matrix_from_pairs(self.d, &self.matrix)
    }
}

pub fn read_generator_file(path: impl AsRef<Path>) -> Result<GeneratorFile> {
    GeneratorFile::parse(&read(path.as_ref())?)
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<MatrixFile> {
    MatrixFile::parse(&read(path.as_ref())?)
}

/// Parses a group string: the structured forms accepted by
/// [`GroupSpec::from_str`](std::str::FromStr) plus `enum:FILE`, which
/// enumerates the group generated by a generator file, and `q8`, the
/// quaternion group in its two-dimensional representation.
pub fn parse_group(s: &str, cap: usize) -> Result<GroupSpec> {
    if s == "q8" {
        let group = enumerate_closure(&crate::groups::quaternion_generators(), DEFAULT_TOL, cap)?;
        return Ok(GroupSpec::enumerated(group));
    }
    match s.strip_prefix("enum:") {
        Some(path) => {
            let file = read_generator_file(path)?;
            let group = enumerate_closure(&file.unitaries()?, file.tol(), cap)?;
            Ok(GroupSpec::enumerated(group))
        }
        None => s.parse(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_file_round_trip() {
        let text = r#"{"d": 2, "tol": 1e-9, "generators": [
            [[0,1],[0,0],[0,0],[0,-1]],
            [[0,0],[1,0],[-1,0],[0,0]]
        ]}"#;
        let f = GeneratorFile::parse(text).unwrap();
        let gens = f.unitaries().unwrap();
        assert_eq!(gens.len(), 2);
        let grp = enumerate_closure(&gens, f.tol(), 100).unwrap();
        assert_eq!(grp.order(), 8);
        let back = GeneratorFile::parse(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(GeneratorFile::parse("{").is_err());
        let wrong_len = r#"{"d": 2, "generators": [[[1,0],[0,0],[0,0]]]}"#;
        assert!(GeneratorFile::parse(wrong_len).unwrap().unitaries().is_err());
        let not_unitary = r#"{"d": 1, "generators": [[[2,0]]]}"#;
        assert!(GeneratorFile::parse(not_unitary).unwrap().unitaries().is_err());
        assert!(parse_group("enum:/nonexistent/file.json", 10).is_err());
    }

    #[test]
    fn matrix_file() {
        let f = MatrixFile::parse(r#"{"d": 1, "matrix": [[0, 1]]}"#).unwrap();
        assert_eq!(f.matrix().unwrap()[(0, 0)], Complex64::new(0.0, 1.0));
        let m = f.matrix().unwrap();
        assert_eq!(matrix_from_pairs(1, &matrix_to_pairs(&m)).unwrap(), m);
    }
}
