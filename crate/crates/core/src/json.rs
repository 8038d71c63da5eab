//! JSON encodings shared by modules, invariants and orbit tables.
//!
//! Matrices are row-major arrays of element encodings. Every decoder
//! validates what it reads, so malformed files fail before any computation.

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::witt::{ElemJson, Ring, RingElem, WittError};

pub type MatrixJson = Vec<Vec<ElemJson>>;

pub fn matrix_to_json(m: &Matrix<RingElem>) -> MatrixJson {
    m.row_vecs()
        .iter()
        .map(|row| row.iter().map(|a| a.to_json()).collect())
        .collect()
}

pub fn matrix_from_json(ring: &Ring, rows: &MatrixJson) -> Result<Matrix<RingElem>, WittError> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(WittError::Malformed("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(WittError::Malformed("ragged matrix rows".into()));
    }
    let entries = rows
        .iter()
        .map(|r| r.iter().map(|e| RingElem::from_json(ring, e)).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    Ok(Matrix::from_rows(entries))
}

/// Output of the invariant computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantJson {
    /// Absent for the F-zip route, which never forms the integral element.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub integral: Option<MatrixJson>,
    pub coset_rep: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orbit_id: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stratum_id: Option<usize>,
}
