//! Matrix-set JSON files.
//!
//! ```json
//! {
//!   "dim": 3,
//!   "provenance": "bravyi_smolin_3",
//!   "exact_cos_theta": [-7, 8],
//!   "elements": [
//!     [[re, im], [re, im], ...],
//!     ...
//!   ]
//! }
//! ```
//!
//! Each element is a flat row-major list of `dim²` `[re, im]` pairs. Reals
//! are written with 17 significant digits, which reproduces every `f64`
//! bit for bit on reading.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_rational::Rational64;
use serde::Deserialize;

use crate::constructions::{Provenance, UmebCandidate};
use crate::error::{Result, UmebError};
use crate::linalg::{Complex, ComplexMatrix};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixSetFile {
    dim: usize,
    provenance: String,
    exact_cos_theta: Option<[i64; 2]>,
    elements: Vec<Vec<[f64; 2]>>,
}

/// `f64` with 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_json_string(candidate: &UmebCandidate) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"dim\": {},", candidate.dim());
    let provenance = serde_json::to_string(&candidate.provenance().to_string()).expect("string serialises");
    let _ = writeln!(out, "  \"provenance\": {provenance},");
    match candidate.exact_cos_theta() {
        Some(r) => {
            let _ = writeln!(out, "  \"exact_cos_theta\": [{}, {}],", r.numer(), r.denom());
        }
        None => out.push_str("  \"exact_cos_theta\": null,\n"),
    }
    out.push_str("  \"elements\": [\n");
    let n = candidate.len();
    for (k, m) in candidate.elements().iter().enumerate() {
        out.push_str("    [");
        for (i, z) in m.entries().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "[{}, {}]", format_real(z.re), format_real(z.im));
        }
        out.push(']');
        if k + 1 < n {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn from_json_str(text: &str) -> Result<UmebCandidate> {
    let file: MatrixSetFile = serde_json::from_str(text)?;
    if file.dim == 0 {
        return Err(UmebError::Schema("dim must be positive".into()));
    }
    if file.elements.is_empty() {
        return Err(UmebError::Schema("elements must be non-empty".into()));
    }
    let expected = file.dim * file.dim;
    let mut elements = Vec::with_capacity(file.elements.len());
    for (k, raw) in file.elements.into_iter().enumerate() {
        let side = (raw.len() as f64).sqrt().round() as usize;
        if side * side != raw.len() {
            return Err(UmebError::Schema(format!(
                "element {k} has {} entries, not a square matrix",
                raw.len()
            )));
        }
        if raw.len() != expected {
            return Err(UmebError::Schema(format!(
                "element {k} is {side}x{side} but dim is {}",
                file.dim
            )));
        }
        let entries = raw.into_iter().map(|[re, im]| Complex::new(re, im)).collect();
        elements.push(ComplexMatrix::from_row_major(file.dim, file.dim, entries)?);
    }
    let provenance: Provenance = file.provenance.parse()?;
    let cos = match file.exact_cos_theta {
        Some([_, 0]) => return Err(UmebError::Schema("exact_cos_theta has zero denominator".into())),
        Some([n, d]) => Some(Rational64::new(n, d)),
        None => None,
    };
    Ok(UmebCandidate::new(file.dim, elements, provenance)?.with_exact_cos_theta(cos))
}

pub fn save_umeb(candidate: &UmebCandidate, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json_string(candidate))?;
    Ok(())
}

pub fn load_umeb(path: impl AsRef<Path>) -> Result<UmebCandidate> {
    from_json_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{bravyi_smolin_3, lift, umeb_6};
    use proptest::prelude::*;

    #[test]
    fn umeb_6_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u6.json");
        let u6 = umeb_6();
        save_umeb(&u6, &path).unwrap();
        assert_eq!(load_umeb(&path).unwrap(), u6);
    }

    #[test]
    fn lift_provenance_survives() {
        let lifted = lift(&bravyi_smolin_3(), 2).unwrap();
        let back = from_json_str(&to_json_string(&lifted)).unwrap();
        assert_eq!(back.provenance(), lifted.provenance());
        assert_eq!(back.exact_cos_theta(), Some(Rational64::new(-7, 8)));
    }

    #[test]
    fn wrong_size_element_is_schema_violation() {
        let two = "[[1,0],[0,0],[0,0],[1,0]]";
        let three = "[[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]";
        let text = format!(
            r#"{{"dim": 2, "provenance": "external:t", "exact_cos_theta": null, "elements": [{two}, {two}, {three}]}}"#
        );
        assert!(matches!(from_json_str(&text), Err(UmebError::Schema(_))));
        let text = r#"{"dim": 2, "provenance": "x", "exact_cos_theta": null, "elements": [[[1,0],[0,0],[1,0]]]}"#;
        assert!(matches!(from_json_str(text), Err(UmebError::Schema(_))));
    }

    #[test]
    fn corrupt_json_is_parse_error() {
        assert!(matches!(from_json_str("{\"dim\": 2,"), Err(UmebError::Parse(_))));
        assert!(matches!(from_json_str(r#"{"dim": 2}"#), Err(UmebError::Parse(_))));
    }

    #[test]
    fn unknown_provenance_becomes_external() {
        let text = r#"{"dim": 1, "provenance": "from a colleague", "exact_cos_theta": null, "elements": [[[1,0]]]}"#;
        let c = from_json_str(text).unwrap();
        assert_eq!(c.provenance(), &Provenance::External("from a colleague".into()));
    }

    proptest! {
        #[test]
        fn reals_round_trip_bit_exactly(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = serde_json::from_str(&format_real(x)).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
