//! Matrices as nested row arrays in reports.

use nalgebra::DMatrix;
use serde::ser::{SerializeSeq, Serializer};

use crate::Real;

pub(crate) fn rows<T: Real, S: Serializer>(m: &DMatrix<T>, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in m.row_iter() {
        seq.serialize_element(&r.iter().map(|v| v.to_f64()).collect::<Vec<f64>>())?;
    }
    seq.end()
}
