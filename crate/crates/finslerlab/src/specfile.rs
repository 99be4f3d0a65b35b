//! The on-disk description of a homogeneous space, in TOML.
//!
//! ```toml
//! n = 2
//! metric = [1.0, 0.0,
//!           0.0, 1.0]        # row-major n x n
//! v = [0.5, 0.0]
//!
//! [[brackets]]               # [e_i, e_j] = coef * e_k, 1-indexed, i < j
//! i = 1
//! j = 2
//! k = 2
//! coef = 1.0
//!
//! [phi]
//! family = "kropina"         # or "randers" / "polynomial"
//! m = 2.0                    # kropina only
//! # coeffs = [1.0, 1.0]      # polynomial only
//! ```
//!
//! Brackets are 1-indexed in the file to match the basis notation e_1, ...,
//! e_n; only the upper triangle i < j may be written and the antisymmetric
//! mirror is implied. Unknown fields anywhere are rejected, so a typo cannot
//! silently become a default.

use std::path::Path;

use serde::Deserialize;

use crate::algebra::{BracketEntry, HomogeneousSpec};
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::phi::PhiModel;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    n: usize,
    metric: Vec<f64>,
    v: Vec<f64>,
    #[serde(default)]
    brackets: Vec<RawBracket>,
    phi: RawPhi,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBracket {
    i: usize,
    j: usize,
    k: usize,
    coef: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhi {
    family: String,
    m: Option<f64>,
    coeffs: Option<Vec<f64>>,
}

/// A parsed spec file: the space plus the profile it names.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub space: HomogeneousSpec,
    pub phi: PhiModel,
    /// The kropina exponent when the profile is kropina, for CLI overrides.
    pub kropina_m: Option<f64>,
}

fn build_phi(raw: &RawPhi) -> Result<(PhiModel, Option<f64>)> {
    match raw.family.as_str() {
        "kropina" => {
            if raw.coeffs.is_some() {
                return Err(Error::InvalidInput(
                    "phi.coeffs is only valid for family = \"polynomial\"".into(),
                ));
            }
            let m = raw.m.ok_or_else(|| {
                Error::InvalidInput("phi.m is required for family = \"kropina\"".into())
            })?;
            Ok((PhiModel::kropina(m)?, Some(m)))
        }
        "randers" => {
            if raw.m.is_some() || raw.coeffs.is_some() {
                return Err(Error::InvalidInput(
                    "phi.m and phi.coeffs are not valid for family = \"randers\"".into(),
                ));
            }
            Ok((PhiModel::Randers, None))
        }
        "polynomial" => {
            if raw.m.is_some() {
                return Err(Error::InvalidInput(
                    "phi.m is only valid for family = \"kropina\"".into(),
                ));
            }
            let coeffs = raw.coeffs.clone().ok_or_else(|| {
                Error::InvalidInput("phi.coeffs is required for family = \"polynomial\"".into())
            })?;
            Ok((PhiModel::polynomial(coeffs)?, None))
        }
        other => Err(Error::InvalidInput(format!(
            "unknown phi family {other:?}; expected \"kropina\", \"randers\" or \"polynomial\""
        ))),
    }
}

/// Parses a spec document. Parse errors keep the TOML line/column context;
/// semantic errors name the offending field.
pub fn parse_spec(text: &str) -> Result<LoadedSpec> {
    // The toml error Display carries line/column and the offending key.
    let raw: RawSpec =
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("spec file: {e}")))?;
    let n = raw.n;
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "n must be at least 2, got {n}"
        )));
    }
    if raw.metric.len() != n * n {
        return Err(Error::DimensionMismatch {
            context: "metric",
            expected: n * n,
            got: raw.metric.len(),
        });
    }
    let metric = SquareMatrix::from_rows(n, raw.metric)?;
    let mut entries = Vec::with_capacity(raw.brackets.len());
    for b in &raw.brackets {
        if b.i == 0 || b.j == 0 || b.k == 0 {
            return Err(Error::InvalidInput(format!(
                "bracket indices are 1-based; got [{}, {}] -> {}",
                b.i, b.j, b.k
            )));
        }
        if b.i > n || b.j > n || b.k > n {
            return Err(Error::InvalidInput(format!(
                "bracket [{}, {}] -> {} exceeds n = {n}",
                b.i, b.j, b.k
            )));
        }
        if b.i >= b.j {
            return Err(Error::InvalidInput(format!(
                "bracket entries must have i < j; got i = {}, j = {}",
                b.i, b.j
            )));
        }
        entries.push(BracketEntry {
            i: b.i - 1,
            j: b.j - 1,
            k: b.k - 1,
            coef: b.coef,
        });
    }
    let space = HomogeneousSpec::from_entries(n, metric, &entries, raw.v)?;
    let (phi, kropina_m) = build_phi(&raw.phi)?;
    Ok(LoadedSpec {
        space,
        phi,
        kropina_m,
    })
}

/// Reads and parses a spec file from disk.
pub fn load_spec(path: &Path) -> Result<LoadedSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidInput(format!("cannot read spec file {}: {e}", path.display()))
    })?;
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVABLE: &str = r#"
        n = 2
        metric = [1.0, 0.0, 0.0, 1.0]
        v = [0.5, 0.0]

        [[brackets]]
        i = 1
        j = 2
        k = 2
        coef = 1.0

        [phi]
        family = "kropina"
        m = 2.0
    "#;

    #[test]
    fn parses_the_solvable_example() {
        let loaded = parse_spec(SOLVABLE).unwrap();
        assert_eq!(loaded.space.n(), 2);
        assert_eq!(loaded.kropina_m, Some(2.0));
        assert_eq!(loaded.space.structure_constant(0, 1, 1), 1.0);
        assert_eq!(loaded.space.structure_constant(1, 0, 1), -1.0);
        assert!(loaded.space.validate().passed());
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = SOLVABLE.replace("[phi]", "extra = 3\n[phi]");
        let err = parse_spec(&text).unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn rejects_lower_triangle_brackets() {
        let text = SOLVABLE.replace("i = 1", "i = 2").replace("j = 2", "j = 1");
        let err = parse_spec(&text).unwrap_err();
        assert!(err.to_string().contains("i < j"), "{err}");
    }

    #[test]
    fn rejects_zero_based_indices() {
        let text = SOLVABLE.replace("i = 1", "i = 0");
        assert!(parse_spec(&text).is_err());
    }

    #[test]
    fn rejects_wrong_metric_length() {
        let text = SOLVABLE.replace("[1.0, 0.0, 0.0, 1.0]", "[1.0, 0.0, 0.0]");
        assert!(parse_spec(&text).is_err());
    }

    #[test]
    fn rejects_kropina_without_m() {
        let text = SOLVABLE.replace("m = 2.0", "");
        let err = parse_spec(&text).unwrap_err();
        assert!(err.to_string().contains("phi.m"), "{err}");
    }

    #[test]
    fn rejects_mixed_family_fields() {
        let text = SOLVABLE.replace("m = 2.0", "m = 2.0\ncoeffs = [1.0]");
        assert!(parse_spec(&text).is_err());
    }

    #[test]
    fn parses_randers_and_polynomial() {
        let randers = SOLVABLE
            .replace("family = \"kropina\"", "family = \"randers\"")
            .replace("m = 2.0", "");
        assert!(matches!(
            parse_spec(&randers).unwrap().phi,
            PhiModel::Randers
        ));
        let poly = SOLVABLE
            .replace("family = \"kropina\"", "family = \"polynomial\"")
            .replace("m = 2.0", "coeffs = [1.0, 0.5]");
        let loaded = parse_spec(&poly).unwrap();
        assert!(matches!(loaded.phi, PhiModel::Polynomial { .. }));
        assert_eq!(loaded.kropina_m, None);
    }

    #[test]
    fn parse_errors_carry_location_context() {
        let err = parse_spec("n = \"two\"").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("spec file"), "{msg}");
    }

    #[test]
    fn load_reports_missing_file() {
        let err = load_spec(Path::new("/nonexistent/space.toml")).unwrap_err();
        assert!(err.to_string().contains("cannot read"), "{err}");
    }
}
