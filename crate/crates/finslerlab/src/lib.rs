//! Curvature computations for homogeneous (alpha, beta)-Finsler spaces.
//!
//! An (alpha, beta)-metric deforms a Riemannian norm alpha by a one-form
//! beta through a positive profile phi: F(y) = alpha(y) phi(beta(y)/alpha(y)).
//! On a homogeneous space the whole geometry is encoded in a small pile of
//! linear algebra at the origin: an inner product on a complement 𝔪 of the
//! isotropy algebra, the Lie bracket restricted to 𝔪, and the vector v dual
//! to beta. This crate takes exactly that data and computes two of the
//! classical non-Riemannian quantities, the S-curvature and the mean Berwald
//! curvature, with particular attention to the generalized Kropina profile
//! phi(s) = s^(-m).
//!
//! The design principle throughout is that every closed form is paired with
//! an independent evaluation route and the gap between the two is measured:
//! scalar bundles come from second-order jets as well as hand closed forms,
//! the S-curvature has a generic and a Kropina-specialized assembly, and the
//! mean Berwald closed form is compared against a finite-difference Hessian
//! of our own S. Gaps are reported, never silently patched; see [`audit`].
//!
//! Modules:
//!
//! * [`algebra`]: the homogeneous-space input data and direction sampling.
//! * [`phi`]: profile models, jet evaluation, scalar bundles, validity scan.
//! * [`curvature`]: S-curvature routes, the Omega factor, mean Berwald
//!   curvature by oracle and by closed form, isotropy classification.
//! * [`volume`]: Busemann-Hausdorff and Holmes-Thompson volume coefficients.
//! * [`jet`]: the small forward-mode second-order jet type the crate uses
//!   instead of symbolic differentiation.
//! * [`linalg`]: dense row-major matrices sized for dimensions 2 through 8.
//! * [`audit`]: the formula audit report aggregating all route-vs-route gaps.
//! * [`specfile`]: the on-disk TOML description of a homogeneous space.

pub mod algebra;
pub mod audit;
pub mod curvature;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod phi;
pub mod specfile;
pub mod volume;

pub use algebra::{
    BracketEntry, HomogeneousSpec, TangentVector, ValidationCheck, ValidationReport,
};
pub use audit::{run_formula_audit, FormulaAuditReport, ScalarGaps};
pub use curvature::{
    classify_isotropy, mean_berwald_closed, mean_berwald_oracle, omega_bundle, omega_y_derivatives,
    s_curvature_generic, s_curvature_kropina, s_curvature_local, CovDerivData, IsotropicTerm,
    IsotropyClass, IsotropyReport, MeanBerwaldResult, MeanBerwaldSource, OmegaBundle,
};
pub use error::{Error, Result};
pub use jet::Jet2;
pub use linalg::SquareMatrix;
pub use phi::{
    ab_scalars_generic, ab_scalars_kropina, AlphaBetaScalars, PhiModel, ValidityReport,
    ValidityVerdict,
};
pub use specfile::{load_spec, parse_spec, LoadedSpec};
pub use volume::{f_of_b, fb_log_derivative, VolumeForm};
