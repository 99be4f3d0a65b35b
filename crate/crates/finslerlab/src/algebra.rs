//! Lie-algebra input data for a homogeneous space.
//!
//! A reductive homogeneous space enters the pipeline as a finite slab of
//! numbers: the dimension n of the tangent piece m, an inner product a_ij on
//! it (the alpha part of the metric at the origin), the m-component of the
//! Lie bracket as structure constants, and the fixed vector v whose dual
//! one-form is the beta part. Everything downstream, S-curvature and mean
//! Berwald curvature alike, is a function of these numbers and of the choice
//! of phi.
//!
//! Validation failures are data, not errors: [`HomogeneousSpec::validate`]
//! returns a report so a caller (and the CLI) can show every violated
//! invariant instead of bailing on the first.

use crate::error::{Error, Result};
use crate::linalg::{dot, SquareMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Pivot floor for the positive-definiteness check of the metric.
pub const METRIC_PIVOT_TOL: f64 = 1e-12;

/// A tangent direction y in m, in the same basis as the spec data.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(pub Vec<f64>);

impl TangentVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|x| c * x).collect())
    }
}

impl From<Vec<f64>> for TangentVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// One structure-constant entry [e_i, e_j] += coef * e_k with i < j,
/// zero-indexed. Used to build the full antisymmetric table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coef: f64,
}

/// Homogeneous-space data in a fixed basis of m.
#[derive(Debug, Clone)]
pub struct HomogeneousSpec {
    n: usize,
    metric: SquareMatrix,
    /// Structure constants c[i][j][k], flat with stride n*n, n, 1.
    bracket: Vec<f64>,
    v: Vec<f64>,
}

/// Outcome of one validation invariant.
#[derive(Debug, Clone)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail per invariant; construction never fails on bad values.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl HomogeneousSpec {
    /// Builds a spec from a full structure-constant table. Shapes are
    /// enforced here; value-level invariants are left to [`Self::validate`].
    pub fn new(n: usize, metric: SquareMatrix, bracket: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension n must be positive".into()));
        }
        if metric.n() != n {
            return Err(Error::DimensionMismatch {
                context: "metric",
                expected: n,
                got: metric.n(),
            });
        }
        if bracket.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                context: "bracket table",
                expected: n * n * n,
                got: bracket.len(),
            });
        }
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                context: "vector v",
                expected: n,
                got: v.len(),
            });
        }
        Ok(Self {
            n,
            metric,
            bracket,
            v,
        })
    }

    /// Builds the antisymmetric table from i < j entries. Entries with
    /// i >= j or out-of-range indices are rejected; duplicates for the same
    /// (i, j, k) slot are rejected rather than summed.
    pub fn from_entries(
        n: usize,
        metric: SquareMatrix,
        entries: &[BracketEntry],
        v: Vec<f64>,
    ) -> Result<Self> {
        let mut bracket = vec![0.0; n * n * n];
        for e in entries {
            if e.i >= e.j {
                return Err(Error::InvalidInput(format!(
                    "bracket entry ({}, {}, {}): only i < j entries are allowed",
                    e.i, e.j, e.k
                )));
            }
            if e.j >= n || e.k >= n {
                return Err(Error::InvalidInput(format!(
                    "bracket entry ({}, {}, {}): index out of range for n = {}",
                    e.i, e.j, e.k, n
                )));
            }
            let idx = (e.i * n + e.j) * n + e.k;
            if bracket[idx] != 0.0 {
                return Err(Error::InvalidInput(format!(
                    "duplicate bracket entry for ({}, {}, {})",
                    e.i, e.j, e.k
                )));
            }
            bracket[idx] = e.coef;
            bracket[(e.j * n + e.i) * n + e.k] = -e.coef;
        }
        Self::new(n, metric, bracket, v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn metric(&self) -> &SquareMatrix {
        &self.metric
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.bracket[(i * self.n + j) * self.n + k]
    }

    /// Inner product of the alpha metric.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.metric.bilinear(x, y)
    }

    /// b^2 = <v, v>.
    pub fn b_squared(&self) -> f64 {
        self.inner(&self.v, &self.v)
    }

    /// m-component of the Lie bracket [x, y].
    #[allow(clippy::needless_range_loop)]
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> TangentVector {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                let c = x[i] * y[j];
                for k in 0..n {
                    out[k] += c * self.bracket[(i * n + j) * n + k];
                }
            }
        }
        TangentVector(out)
    }

    /// [v, y], the pairing source of every curvature formula here.
    pub fn bracket_v(&self, y: &[f64]) -> TangentVector {
        self.bracket(&self.v, y)
    }

    /// alpha(y), beta(y) and their ratio s = beta/alpha.
    pub fn alpha_beta_s(&self, y: &TangentVector) -> Result<(f64, f64, f64)> {
        if y.dim() != self.n {
            return Err(Error::DimensionMismatch {
                context: "direction y",
                expected: self.n,
                got: y.dim(),
            });
        }
        let a2 = self.inner(y.as_slice(), y.as_slice());
        if a2 <= 0.0 || a2.is_nan() {
            return Err(Error::ZeroVector);
        }
        let alpha = a2.sqrt();
        let beta = self.inner(&self.v, y.as_slice());
        Ok((alpha, beta, beta / alpha))
    }

    /// Runs every value-level invariant and reports each outcome.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();

        let sym = self.metric.is_symmetric(0.0);
        checks.push(ValidationCheck {
            name: "metric symmetric",
            passed: sym,
            detail: if sym {
                "a_ij = a_ji".into()
            } else {
                format!("max |a_ij - a_ji| = {:.3e}", self.metric.max_asymmetry())
            },
        });

        let chol = self.metric.cholesky(METRIC_PIVOT_TOL);
        checks.push(ValidationCheck {
            name: "metric positive definite",
            passed: chol.is_ok(),
            detail: match &chol {
                Ok(_) => format!("Cholesky pivots exceed {METRIC_PIVOT_TOL:.0e}"),
                Err(e) => format!("metric not positive definite: {e}"),
            },
        });

        let mut anti_ok = true;
        let mut anti_detail = String::from("c[i][j][k] = -c[j][i][k]");
        'outer: for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    let cij = self.structure_constant(i, j, k);
                    let cji = self.structure_constant(j, i, k);
                    if cij != -cji {
                        anti_ok = false;
                        anti_detail =
                            format!("c[{i}][{j}][{k}] = {cij} but c[{j}][{i}][{k}] = {cji}");
                        break 'outer;
                    }
                }
            }
        }
        checks.push(ValidationCheck {
            name: "bracket antisymmetric",
            passed: anti_ok,
            detail: anti_detail,
        });

        let b2 = self.b_squared();
        let b_ok = chol.is_ok() && b2 > 0.0 && b2 < 1.0;
        checks.push(ValidationCheck {
            name: "0 < b < 1",
            passed: b_ok,
            detail: if !chol.is_ok() {
                "b undefined: metric is not positive definite".into()
            } else if b2 <= 0.0 {
                "b = 0 (v vanishes)".into()
            } else if b2 >= 1.0 {
                format!("b >= 1 (b^2 = {b2})")
            } else {
                format!("b = {}", b2.sqrt())
            },
        });

        ValidationReport { checks }
    }

    /// Draws directions on the unit sphere of alpha, uniform with respect to
    /// the alpha-invariant measure: standard Gaussians in an alpha-orthonormal
    /// basis, normalized. Directions with |s| < `min_abs_s` are rejected so
    /// that callers working with models singular at s = 0 stay off the cone.
    pub fn sample_unit_directions(
        &self,
        count: usize,
        seed: u64,
        min_abs_s: f64,
    ) -> Result<Vec<TangentVector>> {
        let l = self
            .metric
            .cholesky(METRIC_PIVOT_TOL)
            .map_err(|e| Error::InvalidInput(format!("cannot sample directions: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let max_attempts = 1000 * count.max(1);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > max_attempts {
                return Err(Error::NoRegularDirections {
                    attempts: max_attempts,
                });
            }
            let g: Vec<f64> = (0..self.n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let norm = dot(&g, &g).sqrt();
            if norm < 1e-8 {
                continue;
            }
            let w = l.solve_transposed_lower(&g);
            let y = TangentVector(w.iter().map(|x| x / norm).collect());
            let (_, _, s) = self.alpha_beta_s(&y)?;
            if s.abs() < min_abs_s {
                continue;
            }
            out.push(y);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solvable_2d() -> HomogeneousSpec {
        // [e1, e2] = e2 with the flat metric and v = 0.5 e1.
        HomogeneousSpec::from_entries(
            2,
            SquareMatrix::identity(2),
            &[BracketEntry {
                i: 0,
                j: 1,
                k: 1,
                coef: 1.0,
            }],
            vec![0.5, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn bracket_of_basis_vectors() {
        let spec = solvable_2d();
        let b = spec.bracket(&[1.0, 0.0], &[0.0, 1.0]);
        assert_eq!(b.0, vec![0.0, 1.0]);
        let b = spec.bracket(&[0.0, 1.0], &[1.0, 0.0]);
        assert_eq!(b.0, vec![0.0, -1.0]);
    }

    #[test]
    fn bracket_is_bilinear() {
        let spec = solvable_2d();
        let b = spec.bracket(&[0.5, 0.0], &[1.0, 1.0]);
        assert_eq!(b.0, vec![0.0, 0.5]);
    }

    #[test]
    fn alpha_beta_s_on_diagonal() {
        let spec = solvable_2d();
        let (alpha, beta, s) = spec.alpha_beta_s(&TangentVector(vec![1.0, 1.0])).unwrap();
        assert!((alpha - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((beta - 0.5).abs() < 1e-15);
        assert!((s - 0.5 / 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_direction_is_an_error() {
        let spec = solvable_2d();
        assert!(matches!(
            spec.alpha_beta_s(&TangentVector(vec![0.0, 0.0])),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn validation_passes_on_good_spec() {
        assert!(solvable_2d().validate().passed());
    }

    #[test]
    fn validation_flags_large_v() {
        let spec = HomogeneousSpec::new(2, SquareMatrix::identity(2), vec![0.0; 8], vec![1.1, 0.0])
            .unwrap();
        let report = spec.validate();
        assert!(!report.passed());
        let failure = report.first_failure().unwrap();
        assert_eq!(failure.name, "0 < b < 1");
        assert!(failure.detail.contains("b >= 1"));
    }

    #[test]
    fn validation_flags_indefinite_metric() {
        let spec = HomogeneousSpec::new(
            2,
            SquareMatrix::from_rows(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap(),
            vec![0.0; 8],
            vec![0.5, 0.0],
        )
        .unwrap();
        let report = spec.validate();
        assert!(!report.passed());
        assert_eq!(
            report.first_failure().unwrap().name,
            "metric positive definite"
        );
    }

    #[test]
    fn validation_flags_asymmetric_bracket() {
        let mut bracket = vec![0.0; 8];
        // c[i][j][k] = c[0][1][1] = 1 without the mirrored entry.
        let (i, j, k, n) = (0usize, 1usize, 1usize, 2usize);
        bracket[(i * n + j) * n + k] = 1.0;
        let spec =
            HomogeneousSpec::new(2, SquareMatrix::identity(2), bracket, vec![0.5, 0.0]).unwrap();
        let report = spec.validate();
        assert!(!report.passed());
        assert_eq!(
            report.first_failure().unwrap().name,
            "bracket antisymmetric"
        );
    }

    #[test]
    fn entries_reject_lower_triangle() {
        let err = HomogeneousSpec::from_entries(
            2,
            SquareMatrix::identity(2),
            &[BracketEntry {
                i: 1,
                j: 0,
                k: 1,
                coef: 1.0,
            }],
            vec![0.5, 0.0],
        );
        assert!(err.is_err());
    }

    #[test]
    fn sampled_directions_live_on_the_alpha_sphere() {
        let metric = SquareMatrix::from_rows(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap();
        let spec = HomogeneousSpec::new(2, metric, vec![0.0; 8], vec![0.4, 0.1]).unwrap();
        let dirs = spec.sample_unit_directions(32, 7, 1e-3).unwrap();
        assert_eq!(dirs.len(), 32);
        for y in &dirs {
            let (alpha, _, s) = spec.alpha_beta_s(y).unwrap();
            assert!((alpha - 1.0).abs() < 1e-12);
            assert!(s.abs() >= 1e-3);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = solvable_2d();
        let a = spec.sample_unit_directions(8, 42, 1e-3).unwrap();
        let b = spec.sample_unit_directions(8, 42, 1e-3).unwrap();
        assert_eq!(a, b);
    }
}
