//! The metric profile phi and the scalar bundle built from it.
//!
//! An (alpha,beta)-metric is F = alpha * phi(s) with s = beta/alpha. All
//! curvature quantities in this crate reach phi only through a handful of
//! scalars at a point (s, b^2, n):
//!
//! ```text
//! Q     = phi' / (phi - s phi')
//! Delta = 1 + s Q + (b^2 - s^2) Q'
//! Phi   = (s Q' - Q) (1 + n Delta + s Q) - (b^2 - s^2)(1 + s Q) Q''
//! psi   = Q' / (2 Delta)
//! ```
//!
//! [`ab_scalars_generic`] produces the bundle for any profile by jet
//! propagation through the quotient defining Q; [`ab_scalars_kropina`] is the
//! hand-derived closed form for phi(s) = s^(-m) and must agree with the
//! generic route to near machine precision. That agreement is one of the
//! standing cross-checks of the crate.

use crate::error::{Error, Result};
use crate::jet::{extract_jet3, nested_seed, Jet2, JetNum};
use std::fmt;
use std::sync::Arc;

/// Relative floor below which phi - s phi' counts as vanished.
pub const Q_DENOMINATOR_TOL: f64 = 1e-14;

/// Number of grid points used by [`default_validity_grid`].
pub const DEFAULT_VALIDITY_POINTS: usize = 201;

/// A user-supplied profile, written once in generic jet arithmetic.
pub trait PhiEval: Send + Sync {
    fn eval(&self, s: Jet2<Jet2<f64>>) -> Jet2<Jet2<f64>>;
}

impl<F> PhiEval for F
where
    F: Fn(Jet2<Jet2<f64>>) -> Jet2<Jet2<f64>> + Send + Sync,
{
    fn eval(&self, s: Jet2<Jet2<f64>>) -> Jet2<Jet2<f64>> {
        self(s)
    }
}

/// The profile phi(s) of an (alpha,beta)-metric.
#[derive(Clone)]
pub enum PhiModel {
    /// phi(s) = s^(-m), m not in {-1, 0, 1}. Singular at s = 0; for
    /// non-integer m only s > 0 is admitted (principal real power).
    Kropina { m: f64 },
    /// phi(s) = 1 + s.
    Randers,
    /// phi(s) = c0 + c1 s + c2 s^2 + ...
    Polynomial { coeffs: Vec<f64> },
    /// Any profile expressible in jet arithmetic.
    Custom(Arc<dyn PhiEval>),
}

impl fmt::Debug for PhiModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiModel::Kropina { m } => write!(f, "Kropina {{ m: {m} }}"),
            PhiModel::Randers => write!(f, "Randers"),
            PhiModel::Polynomial { coeffs } => {
                write!(f, "Polynomial {{ coeffs: {coeffs:?} }}")
            }
            PhiModel::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PhiModel {
    pub fn kropina(m: f64) -> Result<Self> {
        if m == -1.0 || m == 0.0 || m == 1.0 {
            return Err(Error::InvalidInput(format!(
                "kropina exponent m must avoid -1, 0 and 1, got {m}"
            )));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput(
                "kropina exponent must be finite".into(),
            ));
        }
        Ok(PhiModel::Kropina { m })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "polynomial profile needs at least one coefficient".into(),
            ));
        }
        Ok(PhiModel::Polynomial { coeffs })
    }

    /// True when phi is undefined at s = 0.
    pub fn singular_at_zero(&self) -> bool {
        matches!(self, PhiModel::Kropina { .. })
    }

    /// Checks that phi may be evaluated at this slope at all.
    pub fn domain_check(&self, s: f64) -> Result<()> {
        if let PhiModel::Kropina { m } = self {
            if s == 0.0 {
                return Err(Error::SingularAtZero);
            }
            if s < 0.0 && m.fract() != 0.0 {
                return Err(Error::NonRealPower { m: *m, s });
            }
        }
        Ok(())
    }

    fn eval_nested(&self, x: Jet2<Jet2<f64>>) -> Jet2<Jet2<f64>> {
        match self {
            PhiModel::Kropina { m } => x.powf(-m),
            PhiModel::Randers => <Jet2<Jet2<f64>> as JetNum>::one() + x,
            PhiModel::Polynomial { coeffs } => horner(coeffs, x),
            PhiModel::Custom(f) => f.eval(x),
        }
    }

    /// phi and its first three derivatives at s.
    pub fn jet3(&self, s: f64) -> Result<[f64; 4]> {
        self.domain_check(s)?;
        Ok(extract_jet3(self.eval_nested(nested_seed(s))))
    }

    /// phi, phi', phi'' at s as a jet. Exact to machine precision for the
    /// built-in families, whose evaluation is plain power-rule arithmetic.
    pub fn phi_jet(&self, s: f64) -> Result<Jet2> {
        let [p0, p1, p2, _] = self.jet3(s)?;
        Ok(Jet2::new(p0, p1, p2))
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        Ok(self.jet3(s)?[0])
    }
}

fn horner<T: JetNum>(coeffs: &[f64], x: T) -> T {
    let mut acc = T::from_f64(*coeffs.last().expect("nonempty coeffs"));
    for c in coeffs.iter().rev().skip(1) {
        acc = acc * x + T::from_f64(*c);
    }
    acc
}

/// Scalars of the metric family at a single (s, b^2, n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBetaScalars {
    pub s: f64,
    pub b2: f64,
    pub n: usize,
    pub q: f64,
    pub qp: f64,
    pub qpp: f64,
    pub delta: f64,
    pub phi_cap: f64,
    pub psi: f64,
}

/// Scalar bundle for an arbitrary profile, by jet propagation.
pub fn ab_scalars_generic(model: &PhiModel, s: f64, b2: f64, n: usize) -> Result<AlphaBetaScalars> {
    let [p0, p1, p2, p3] = model.jet3(s)?;
    let den0 = p0 - s * p1;
    if den0.abs() < Q_DENOMINATOR_TOL * p0.abs() {
        return Err(Error::DegeneratePhi { s });
    }
    // Q = phi' / (phi - s phi') as a jet in s. The numerator jet is
    // (phi', phi'', phi'''); the denominator differentiates to -s phi'' and
    // -phi'' - s phi'''.
    let num = Jet2::new(p1, p2, p3);
    let den = Jet2::new(den0, -s * p2, -p2 - s * p3);
    let qj = num / den;
    Ok(assemble_scalars(s, b2, n, qj.val, qj.d1, qj.d2))
}

/// Closed-form scalar bundle for phi(s) = s^(-m).
///
/// Q = -m / (s (1+m)), Delta = ((1-m) s^2 + b^2 m) / ((1+m) s^2) and
/// Phi = 2m ((n - n m) s^2 + (n m + 1) b^2) / ((1+m)^2 s^3). These must match
/// [`ab_scalars_generic`] with a kropina model on every field.
pub fn ab_scalars_kropina(m: f64, s: f64, b2: f64, n: usize) -> Result<AlphaBetaScalars> {
    let model = PhiModel::kropina(m)?;
    model.domain_check(s)?;
    let nf = n as f64;
    let q = -m / (s * (1.0 + m));
    let qp = m / (1.0 + m) / (s * s);
    let qpp = -2.0 * m / (1.0 + m) / (s * s * s);
    let delta = ((1.0 - m) * s * s + b2 * m) / ((1.0 + m) * s * s);
    let phi_cap = 2.0 * m / ((1.0 + m) * (1.0 + m) * s * s * s)
        * ((nf - nf * m) * s * s + (nf * m + 1.0) * b2);
    let psi = qp / (2.0 * delta);
    Ok(AlphaBetaScalars {
        s,
        b2,
        n,
        q,
        qp,
        qpp,
        delta,
        phi_cap,
        psi,
    })
}

fn assemble_scalars(s: f64, b2: f64, n: usize, q: f64, qp: f64, qpp: f64) -> AlphaBetaScalars {
    let nf = n as f64;
    let delta = 1.0 + s * q + (b2 - s * s) * qp;
    let psi = qp / (2.0 * delta);
    let common = 1.0 + nf * delta + s * q;
    let tail = (b2 - s * s) * (1.0 + s * q) * qpp;
    let phi_a = (s * qp - q) * common - tail;
    // Second printed arrangement of the same quantity; IEEE negation makes
    // the two bitwise equal, which we keep asserted. The one escape hatch is
    // an exact zero, where -(0 - 0) flips the sign bit.
    let phi_b = -(q - s * qp) * common - tail;
    debug_assert!(
        phi_a.to_bits() == phi_b.to_bits() || (phi_a == 0.0 && phi_b == 0.0),
        "Phi arrangements disagree: {phi_a} vs {phi_b}"
    );
    AlphaBetaScalars {
        s,
        b2,
        n,
        q,
        qp,
        qpp,
        delta,
        phi_cap: phi_a,
        psi,
    }
}

/// Both arrangements of the Phi expression, for the formula audit.
pub fn phi_cap_both_forms(scalars: &AlphaBetaScalars) -> (f64, f64) {
    let nf = scalars.n as f64;
    let common = 1.0 + nf * scalars.delta + scalars.s * scalars.q;
    let tail = (scalars.b2 - scalars.s * scalars.s) * (1.0 + scalars.s * scalars.q) * scalars.qpp;
    let a = (scalars.s * scalars.qp - scalars.q) * common - tail;
    let b = -(scalars.q - scalars.s * scalars.qp) * common - tail;
    (a, b)
}

/// Verdict of the pointwise positivity check of a profile.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidityVerdict {
    /// Both conditions hold at every grid point.
    Valid,
    /// Some point failed; the first one is recorded.
    Invalid { first_failing_s: f64 },
    /// The family is undefined at s = 0 and the grid touches or crosses it.
    Singular,
    /// Negative slopes were skipped because phi has no real value there.
    DomainRestricted,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidityPoint {
    pub s: f64,
    pub phi: f64,
    /// phi - s phi' + (b^2 - s^2) phi''
    pub convexity: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct ValidityReport {
    pub b: f64,
    pub points: Vec<ValidityPoint>,
    pub verdict: ValidityVerdict,
}

/// Uniform slope grid for [`validity_check`]: 201 points on [-b, b], or on
/// (0, b] for families singular at s = 0.
pub fn default_validity_grid(model: &PhiModel, b: f64) -> Vec<f64> {
    let n = DEFAULT_VALIDITY_POINTS;
    if model.singular_at_zero() {
        (1..=n).map(|k| b * k as f64 / n as f64).collect()
    } else {
        (0..n)
            .map(|k| -b + 2.0 * b * k as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Positivity of phi and of phi - s phi' + (b^2 - s^2) phi'' over a grid.
///
/// Both must be strictly positive for F = alpha phi(beta/alpha) to be a
/// Finsler metric for |beta/alpha| <= b. Kropina-type grids that touch or
/// cross s = 0 yield [`ValidityVerdict::Singular`]; negative slopes a
/// fractional power cannot represent are skipped and downgrade the verdict
/// to [`ValidityVerdict::DomainRestricted`].
pub fn validity_check(model: &PhiModel, b: f64, grid: &[f64]) -> Result<ValidityReport> {
    if b <= 0.0 || b.is_nan() {
        return Err(Error::InvalidInput(format!("b must be positive, got {b}")));
    }
    let b2 = b * b;
    let singular_grid = model.singular_at_zero()
        && (grid.contains(&0.0)
            || (grid.iter().any(|&s| s < 0.0) && grid.iter().any(|&s| s > 0.0)));
    let mut restricted = false;
    let mut points = Vec::with_capacity(grid.len());
    let mut first_failing_s = None;
    for &s in grid {
        if s == 0.0 && model.singular_at_zero() {
            continue;
        }
        let jet = match model.phi_jet(s) {
            Ok(j) => j,
            Err(Error::NonRealPower { .. }) => {
                restricted = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        let convexity = jet.val - s * jet.d1 + (b2 - s * s) * jet.d2;
        let passed = jet.val > 0.0 && convexity > 0.0;
        if !passed && first_failing_s.is_none() {
            first_failing_s = Some(s);
        }
        points.push(ValidityPoint {
            s,
            phi: jet.val,
            convexity,
            passed,
        });
    }
    let verdict = if let Some(s) = first_failing_s {
        ValidityVerdict::Invalid { first_failing_s: s }
    } else if singular_grid {
        ValidityVerdict::Singular
    } else if restricted {
        ValidityVerdict::DomainRestricted
    } else {
        ValidityVerdict::Valid
    };
    Ok(ValidityReport { b, points, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kropina_jet_hand_values() {
        // phi(s) = s^(-2) at s = 0.5: (4, -16, 96)
        let model = PhiModel::kropina(2.0).unwrap();
        let j = model.phi_jet(0.5).unwrap();
        assert_eq!(j.val, 4.0);
        assert_eq!(j.d1, -16.0);
        assert_eq!(j.d2, 96.0);
    }

    #[test]
    fn kropina_rejects_unit_exponents() {
        assert!(PhiModel::kropina(1.0).is_err());
        assert!(PhiModel::kropina(0.0).is_err());
        assert!(PhiModel::kropina(-1.0).is_err());
        assert!(PhiModel::kropina(2.0).is_ok());
        assert!(PhiModel::kropina(0.5).is_ok());
    }

    #[test]
    fn kropina_domain_rules() {
        let integer = PhiModel::kropina(2.0).unwrap();
        assert!(matches!(integer.phi_jet(0.0), Err(Error::SingularAtZero)));
        assert!(integer.phi_jet(-0.3).is_ok());

        let fractional = PhiModel::kropina(1.5).unwrap();
        assert!(matches!(
            fractional.phi_jet(-0.3),
            Err(Error::NonRealPower { .. })
        ));
        assert!(fractional.phi_jet(0.3).is_ok());
    }

    #[test]
    fn randers_jet() {
        let j = PhiModel::Randers.phi_jet(0.3).unwrap();
        assert_eq!(j.val, 1.3);
        assert_eq!(j.d1, 1.0);
        assert_eq!(j.d2, 0.0);
    }

    #[test]
    fn polynomial_jet() {
        // phi = 1 + 2s + 3s^2: phi'(0.5) = 2 + 3 = 5, phi'' = 6
        let model = PhiModel::polynomial(vec![1.0, 2.0, 3.0]).unwrap();
        let j = model.phi_jet(0.5).unwrap();
        assert!((j.val - 2.75).abs() < 1e-15);
        assert!((j.d1 - 5.0).abs() < 1e-15);
        assert!((j.d2 - 6.0).abs() < 1e-15);
    }

    #[test]
    fn custom_profile_matches_randers() {
        let custom = PhiModel::Custom(Arc::new(|s: Jet2<Jet2<f64>>| {
            <Jet2<Jet2<f64>> as JetNum>::one() + s
        }));
        for &s in &[-0.4, 0.1, 0.6] {
            let a = custom.jet3(s).unwrap();
            let b = PhiModel::Randers.jet3(s).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn kropina_scalars_hand_values() {
        // m = 2, s = 0.5, b^2 = 0.64, n = 3
        let sc = ab_scalars_kropina(2.0, 0.5, 0.64, 3).unwrap();
        assert!((sc.q - (-4.0 / 3.0)).abs() < 1e-15);
        assert!((sc.qp - 8.0 / 3.0).abs() < 1e-15);
        assert!((sc.qpp - (-32.0 / 3.0)).abs() < 1e-14);
        assert!((sc.delta - (-0.25 + 1.28) / 0.75).abs() < 1e-15);
        let phi_expect = 4.0 / (9.0 * 0.125) * (-0.75 + 4.48);
        assert!((sc.phi_cap - phi_expect).abs() < 1e-12);
    }

    #[test]
    fn generic_matches_kropina_closed_form() {
        let model = PhiModel::kropina(2.0).unwrap();
        let g = ab_scalars_generic(&model, 0.5, 0.64, 3).unwrap();
        let k = ab_scalars_kropina(2.0, 0.5, 0.64, 3).unwrap();
        for (a, b) in [
            (g.q, k.q),
            (g.qp, k.qp),
            (g.qpp, k.qpp),
            (g.delta, k.delta),
            (g.phi_cap, k.phi_cap),
            (g.psi, k.psi),
        ] {
            assert!(
                (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())),
                "{a} vs {b}"
            );
        }
    }

    #[test]
    fn riemannian_profile_has_zero_q() {
        let model = PhiModel::polynomial(vec![1.0]).unwrap();
        let sc = ab_scalars_generic(&model, 0.3, 0.25, 4).unwrap();
        assert_eq!(sc.q, 0.0);
        assert_eq!(sc.qp, 0.0);
        assert_eq!(sc.phi_cap, 0.0);
        assert_eq!(sc.delta, 1.0);
    }

    #[test]
    fn degenerate_quotient_is_reported() {
        // phi = s: phi - s phi' = 0 everywhere.
        let model = PhiModel::polynomial(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            ab_scalars_generic(&model, 0.4, 0.25, 3),
            Err(Error::DegeneratePhi { .. })
        ));
    }

    #[test]
    fn phi_cap_vanishes_on_its_zero_locus() {
        // (n - n m) s^2 + (n m + 1) b^2 = 0 at s^2 = 7 b^2 / 3 for m = 2, n = 3.
        let b2 = 0.09;
        let s = (7.0 * b2 / 3.0_f64).sqrt();
        let sc = ab_scalars_kropina(2.0, s, b2, 3).unwrap();
        assert!(sc.phi_cap.abs() < 1e-14);
    }

    #[test]
    fn validity_randers_passes() {
        let report = validity_check(
            &PhiModel::Randers,
            0.5,
            &default_validity_grid(&PhiModel::Randers, 0.5),
        )
        .unwrap();
        assert_eq!(report.verdict, ValidityVerdict::Valid);
        assert!(report.points.iter().all(|p| p.passed));
    }

    #[test]
    fn validity_kropina_positive_grid_passes() {
        let model = PhiModel::kropina(2.0).unwrap();
        let grid = default_validity_grid(&model, 0.8);
        assert!(grid.iter().all(|&s| s > 0.0));
        let report = validity_check(&model, 0.8, &grid).unwrap();
        assert_eq!(report.verdict, ValidityVerdict::Valid);
    }

    #[test]
    fn validity_kropina_crossing_grid_is_singular() {
        let model = PhiModel::kropina(2.0).unwrap();
        let grid: Vec<f64> = (0..41).map(|k| -0.8 + 0.04 * k as f64).collect();
        let report = validity_check(&model, 0.8, &grid).unwrap();
        assert_eq!(report.verdict, ValidityVerdict::Singular);
    }

    #[test]
    fn validity_fractional_kropina_is_domain_restricted() {
        // A fractional power has no real value at negative slopes; a grid
        // living entirely there is skipped point by point.
        let model = PhiModel::kropina(1.5).unwrap();
        let report = validity_check(&model, 0.5, &[-0.4, -0.2]).unwrap();
        assert_eq!(report.verdict, ValidityVerdict::DomainRestricted);
        assert!(report.points.is_empty());
        // A sign-crossing grid is singular before it is restricted, the same
        // verdict an integer exponent would get.
        let crossing = validity_check(&model, 0.5, &[-0.4, 0.2, 0.4]).unwrap();
        assert_eq!(crossing.verdict, ValidityVerdict::Singular);
    }

    #[test]
    fn validity_flags_failing_profile() {
        // phi = 1 - 2s fails phi > 0 at s >= 0.5.
        let model = PhiModel::polynomial(vec![1.0, -2.0]).unwrap();
        let grid = default_validity_grid(&model, 0.8);
        let report = validity_check(&model, 0.8, &grid).unwrap();
        assert!(matches!(report.verdict, ValidityVerdict::Invalid { .. }));
    }
}
