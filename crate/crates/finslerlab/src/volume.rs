//! The volume-form coefficient f(b).
//!
//! For the Busemann-Hausdorff volume form of F = alpha phi(beta/alpha),
//!
//! ```text
//! f(b) = Int_0^pi sin(t)^(n-2) dt  /  Int_0^pi sin(t)^(n-2) / phi(b cos t)^n dt
//! ```
//!
//! and for the Holmes-Thompson form the caller supplies the profile T under
//! the integral sign:
//!
//! ```text
//! f(b) = Int_0^pi sin(t)^(n-2) T(b cos t) dt / Int_0^pi sin(t)^(n-2) dt
//! ```
//!
//! The S-curvature formula consumes f only through f'(b) / (b f(b)), which
//! [`fb_log_derivative`] obtains by central-differencing log f. Quadrature is
//! adaptive composite Gauss-Legendre; each panel uses 15 nodes, and a panel
//! whose bisection changes the estimate too much is split, to a depth of 30.
//! Kropina-type profiles make 1/phi(b cos t)^n = (b cos t)^(m n), which is
//! smooth for positive integer m n, genuinely divergent for negative m, and
//! complex for fractional m; the last two surface as errors.

use crate::error::{Error, Result};
use crate::phi::PhiModel;
use std::sync::{Arc, OnceLock};

/// Default relative tolerance of the adaptive quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// Maximum bisection depth before an integral is declared divergent.
pub const QUADRATURE_MAX_DEPTH: u32 = 30;

/// Relative step of the central difference in [`fb_log_derivative`].
pub const FB_DERIVATIVE_STEP: f64 = 1e-5;

/// Which volume form the coefficient refers to.
#[derive(Clone)]
pub enum VolumeForm {
    BusemannHausdorff,
    /// Caller-supplied integrand profile T.
    HolmesThompson(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for VolumeForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VolumeForm::BusemannHausdorff => write!(f, "BusemannHausdorff"),
            VolumeForm::HolmesThompson(_) => write!(f, "HolmesThompson(..)"),
        }
    }
}

fn gauss_legendre_15() -> &'static [(f64, f64); 15] {
    static NODES: OnceLock<[(f64, f64); 15]> = OnceLock::new();
    #[allow(clippy::needless_range_loop)]
    NODES.get_or_init(|| {
        // Roots of the degree-15 Legendre polynomial by Newton iteration from
        // the Chebyshev initial guesses; weights 2 / ((1 - x^2) P'(x)^2).
        let n = 15usize;
        let mut out = [(0.0, 0.0); 15];
        for k in 0..n {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            out[k] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        out
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl15_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in gauss_legendre_15() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Estimates past this magnitude are never accepted. A power pole sampled at
/// finite nodes produces finite but astronomically large panel values that
/// can poison the error budget; every integrand this module actually meets
/// is many orders of magnitude below the cap.
const PANEL_MAGNITUDE_CAP: f64 = 1e30;

/// Adaptive composite Gauss-Legendre integration over [a, b].
///
/// A panel is accepted when bisecting it moves the estimate by no more than
/// its share of `rel_tol` times the magnitude of the integral. Non-finite or
/// cap-exceeding integrand values force refinement, so non-integrable
/// singularities exhaust the depth budget and surface as
/// [`Error::QuadratureDivergence`].
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Result<f64> {
    let whole = gl15_panel(f, a, b);
    // The error budget is proportional to the integral's magnitude. Estimate
    // it from the first bisection rather than the single whole-interval
    // panel: a pole sitting on one of the whole-panel nodes (the kropina
    // denominator integrand does exactly this at the midpoint) would inflate
    // the raw estimate by tens of orders of magnitude and the budget with it.
    let mid = 0.5 * (a + b);
    let first_split = gl15_panel(f, a, mid) + gl15_panel(f, mid, b);
    let scale = first_split.abs().clamp(1e-300, PANEL_MAGNITUDE_CAP);
    let total_len = b - a;
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        rel_tol: f64,
        scale: f64,
        total_len: f64,
        depth: u32,
        max_depth: u32,
    ) -> Result<f64> {
        let mid = 0.5 * (a + b);
        let left = gl15_panel(f, a, mid);
        let right = gl15_panel(f, mid, b);
        let refined = left + right;
        let budget = rel_tol * scale * ((b - a) / total_len);
        if refined.is_finite()
            && whole.is_finite()
            && refined.abs() <= PANEL_MAGNITUDE_CAP
            && (refined - whole).abs() <= budget
        {
            return Ok(refined);
        }
        if depth >= max_depth {
            return Err(Error::QuadratureDivergence);
        }
        let l = recurse(
            f,
            a,
            mid,
            left,
            rel_tol,
            scale,
            total_len,
            depth + 1,
            max_depth,
        )?;
        let r = recurse(
            f,
            mid,
            b,
            right,
            rel_tol,
            scale,
            total_len,
            depth + 1,
            max_depth,
        )?;
        Ok(l + r)
    }
    recurse(f, a, b, whole, rel_tol, scale, total_len, 0, max_depth)
}

fn sin_power_integral(n: usize, rel_tol: f64) -> Result<f64> {
    let p = (n - 2) as i32;
    integrate(
        &|t: f64| t.sin().powi(p),
        0.0,
        std::f64::consts::PI,
        rel_tol,
        QUADRATURE_MAX_DEPTH,
    )
}

fn f_of_b_with_tol(
    model: &PhiModel,
    b: f64,
    n: usize,
    form: &VolumeForm,
    rel_tol: f64,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "volume coefficient needs n >= 2, got {n}"
        )));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::InvalidInput(format!(
            "volume coefficient needs 0 < b < 1, got {b}"
        )));
    }
    if let (PhiModel::Kropina { m }, VolumeForm::BusemannHausdorff) = (model, form) {
        // 1/phi(b cos t)^n = (b cos t)^(m n); cos changes sign on (0, pi).
        if m.fract() != 0.0 || (m * n as f64).fract() != 0.0 {
            return Err(Error::NonRealPower { m: *m, s: -b });
        }
    }
    let p = (n - 2) as i32;
    let sin_int = sin_power_integral(n, rel_tol)?;
    match form {
        VolumeForm::BusemannHausdorff => {
            let den = integrate(
                &|t: f64| {
                    let phi = match model.value(b * t.cos()) {
                        Ok(v) => v,
                        Err(_) => return f64::NAN,
                    };
                    t.sin().powi(p) / phi.powi(n as i32)
                },
                0.0,
                std::f64::consts::PI,
                rel_tol,
                QUADRATURE_MAX_DEPTH,
            )?;
            if !(den.is_finite() && den != 0.0) {
                return Err(Error::QuadratureDivergence);
            }
            Ok(sin_int / den)
        }
        VolumeForm::HolmesThompson(t_profile) => {
            let num = integrate(
                &|t: f64| t.sin().powi(p) * t_profile(b * t.cos()),
                0.0,
                std::f64::consts::PI,
                rel_tol,
                QUADRATURE_MAX_DEPTH,
            )?;
            Ok(num / sin_int)
        }
    }
}

/// The volume coefficient f(b) for the given form, at the default tolerance.
pub fn f_of_b(model: &PhiModel, b: f64, n: usize, form: &VolumeForm) -> Result<f64> {
    f_of_b_with_tol(model, b, n, form, QUADRATURE_REL_TOL)
}

/// f'(b) / (b f(b)), the combination entering the S-curvature formula.
///
/// Central difference of log f at step 1e-5 b. The difference divides the
/// quadrature error by the step, so the two stencil integrals run at a much
/// tighter tolerance than [`f_of_b`] itself.
pub fn fb_log_derivative(model: &PhiModel, b: f64, n: usize, form: &VolumeForm) -> Result<f64> {
    let h = FB_DERIVATIVE_STEP * b;
    let tight = 1e-13;
    let f_plus = f_of_b_with_tol(model, b + h, n, form, tight)?;
    let f_minus = f_of_b_with_tol(model, b - h, n, form, tight)?;
    if !(f_plus > 0.0 && f_minus > 0.0) {
        return Err(Error::InvalidInput(
            "f(b) must be positive to take log f differences".into(),
        ));
    }
    Ok((f_plus.ln() - f_minus.ln()) / (2.0 * h) / b)
}
