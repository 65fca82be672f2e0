//! JSON interchange formats.
//!
//! * matrix: `{"rows": r, "cols": c, "data": [[re, im], …]}`, row-major
//! * polynomial: `[[re, im], …]`, ascending degree
//! * realization: `{"n", "m", "A", "B", "C", "D", "symmetry"?}`
//! * feedback: `{"m", "coords": [[re, im], …]}` over pairs `i < j`
//!
//! Finite doubles round-trip bit-exactly.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feedback::{SkewFeedback, SolutionSet};
use crate::sysreal::{Realization, SymmetryType};
use crate::{CMatrix, Poly};

pub type ComplexPair = [f64; 2];

fn pair(z: Complex64) -> ComplexPair {
    [z.re, z.im]
}

fn unpair(p: ComplexPair) -> Result<Complex64> {
    if p[0].is_finite() && p[1].is_finite() {
        Ok(Complex64::new(p[0], p[1]))
    } else {
        Err(Error::NonFinite)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<ComplexPair>,
}

impl From<&CMatrix> for MatrixDoc {
    fn from(m: &CMatrix) -> Self {
        let data = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| pair(m[(i, j)]))
            .collect();
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl TryFrom<&MatrixDoc> for CMatrix {
    type Error = Error;
    fn try_from(doc: &MatrixDoc) -> Result<Self> {
        if doc.data.len() != doc.rows * doc.cols {
            return Err(Error::Format(format!(
                "{}x{} matrix with {} entries",
                doc.rows,
                doc.cols,
                doc.data.len()
            )));
        }
        let entries = doc.data.iter().map(|&p| unpair(p)).collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_row_slice(doc.rows, doc.cols, &entries))
    }
}

pub fn poly_to_doc(p: &Poly) -> Vec<ComplexPair> {
    p.coeffs().iter().map(|&z| pair(z)).collect()
}

pub fn poly_from_doc(doc: &[ComplexPair]) -> Result<Poly> {
    Ok(Poly::new(doc.iter().map(|&p| unpair(p)).collect::<Result<_>>()?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizationDoc {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: MatrixDoc,
    #[serde(rename = "B")]
    pub b: MatrixDoc,
    #[serde(rename = "C")]
    pub c: MatrixDoc,
    #[serde(rename = "D")]
    pub d: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryType>,
}

impl RealizationDoc {
    pub fn new(r: &Realization, symmetry: Option<SymmetryType>) -> Self {
        Self {
            n: r.n(),
            m: r.m(),
            a: (&r.a).into(),
            b: (&r.b).into(),
            c: (&r.c).into(),
            d: (&r.d).into(),
            symmetry,
        }
    }

    pub fn realization(&self) -> Result<Realization> {
        let r = Realization::new(
            (&self.a).try_into()?,
            (&self.b).try_into()?,
            (&self.c).try_into()?,
            (&self.d).try_into()?,
        )?;
        if r.n() != self.n || r.m() != self.m {
            return Err(Error::Format(format!(
                "declared (n, m) = ({}, {}) but matrices give ({}, {})",
                self.n,
                self.m,
                r.n(),
                r.m()
            )));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackDoc {
    pub m: usize,
    pub coords: Vec<ComplexPair>,
}

impl From<&SkewFeedback> for FeedbackDoc {
    fn from(f: &SkewFeedback) -> Self {
        Self {
            m: f.m,
            coords: f.coords.iter().map(|&z| pair(z)).collect(),
        }
    }
}

impl TryFrom<&FeedbackDoc> for SkewFeedback {
    type Error = Error;
    fn try_from(doc: &FeedbackDoc) -> Result<Self> {
        let coords = doc.coords.iter().map(|&p| unpair(p)).collect::<Result<_>>()?;
        SkewFeedback::new(doc.m, coords)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub feedback: FeedbackDoc,
    pub residual: f64,
    pub charpoly_error: f64,
    pub is_real: bool,
    pub char_poly: Vec<ComplexPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSetDoc {
    pub count: usize,
    pub all_real: bool,
    pub underdetermined: bool,
    pub starts_used: usize,
    pub converged_starts: usize,
    pub rejected_starts: usize,
    pub scaling: Vec<f64>,
    pub solutions: Vec<SolutionDoc>,
}

impl From<&SolutionSet> for SolutionSetDoc {
    fn from(s: &SolutionSet) -> Self {
        let solutions = (0..s.len())
            .map(|k| SolutionDoc {
                feedback: (&s.solutions[k]).into(),
                residual: s.residuals[k],
                charpoly_error: s.charpoly_errors[k],
                is_real: s.is_real[k],
                char_poly: poly_to_doc(&s.char_polys[k]),
            })
            .collect();
        Self {
            count: s.len(),
            all_real: s.all_real(),
            underdetermined: s.underdetermined,
            starts_used: s.starts_used,
            converged_starts: s.converged_starts,
            rejected_starts: s.rejected_starts,
            scaling: s.scaling.clone(),
            solutions,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    from_json(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)? + "\n").map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn read_realization(path: &Path) -> Result<(Realization, Option<SymmetryType>)> {
    let doc: RealizationDoc = read_json(path)?;
    Ok((doc.realization()?, doc.symmetry))
}

pub fn read_feedback(path: &Path) -> Result<SkewFeedback> {
    let doc: FeedbackDoc = read_json(path)?;
    (&doc).try_into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn matrix_round_trip_is_exact() {
        let mut rng = fixtures::rng(71);
        let m = fixtures::complex_matrix(&mut rng, 3, 4) * Complex64::new(1e-7, 3.3);
        let text = to_json(&MatrixDoc::from(&m)).unwrap();
        let back: MatrixDoc = from_json(&text).unwrap();
        assert_eq!(CMatrix::try_from(&back).unwrap(), m);
    }

    #[test]
    fn realization_round_trip() {
        let mut rng = fixtures::rng(72);
        let r = fixtures::structured_realization(&mut rng, SymmetryType::SkewSymmetric, 4, 2, true);
        let doc = RealizationDoc::new(&r, Some(SymmetryType::SkewSymmetric));
        let text = to_json(&doc).unwrap();
        assert!(text.contains("\"skew-symmetric\""));
        let back: RealizationDoc = from_json(&text).unwrap();
        assert_eq!(back.realization().unwrap(), r);
    }

    #[test]
    fn malformed_documents() {
        let bad = r#"{"rows": 2, "cols": 2, "data": [[1, 0]]}"#;
        let doc: MatrixDoc = from_json(bad).unwrap();
        assert!(matches!(CMatrix::try_from(&doc), Err(Error::Format(_))));
        assert!(from_json::<MatrixDoc>("{").is_err());
        let fb = FeedbackDoc {
            m: 3,
            coords: vec![[1.0, 0.0]],
        };
        assert!(SkewFeedback::try_from(&fb).is_err());
    }
}
