//! JSON matrix file format shared by the CLI and claim witnesses.
//!
//! Complex entries are `[re, im]` pairs in row-major order. Floats are written
//! in shortest round-trip form, so a matrix read back is bit-identical.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Matrix,
    Density,
    PureBipartite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub kind: MatrixKind,
    pub dim_rows: usize,
    pub dim_cols: usize,
    pub entries: Vec<[f64; 2]>,
    /// `[dA, dB]` for bipartite data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(kind: MatrixKind, m: &ComplexMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixFile {
            kind,
            dim_rows: rows,
            dim_cols: cols,
            entries,
            dims: None,
        }
    }

    pub fn with_dims(mut self, da: usize, db: usize) -> Self {
        self.dims = Some([da, db]);
        self
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let expected = self.dim_rows * self.dim_cols;
        if self.entries.len() != expected {
            return Err(Error::LengthMismatch(self.entries.len(), expected));
        }
        Ok(ComplexMatrix::from_fn(self.dim_rows, self.dim_cols, |i, j| {
            let [re, im] = self.entries[i * self.dim_cols + j];
            c(re, im)
        }))
    }
}

/// Matrix as a JSON value in [`MatrixFile`] layout.
pub fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    serde_json::to_value(MatrixFile::from_matrix(MatrixKind::Matrix, m)).expect("matrix serialises")
}

pub fn matrix_from_json(v: &serde_json::Value) -> Result<ComplexMatrix> {
    let file: MatrixFile =
        serde_json::from_value(v.clone()).map_err(|e| Error::MalformedWitness(e.to_string()))?;
    file.to_matrix()
}
