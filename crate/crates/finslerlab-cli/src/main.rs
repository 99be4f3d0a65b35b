//! Command-line front end: load a space description, run curvature
//! computations and formula audits, print deterministic reports.
//!
//! Exit codes: 0 on success, 1 for input or validation problems, 2 for
//! numerical failures (singular directions, divergent quadrature). Reports
//! go to standard output, diagnostics to standard error.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use finslerlab::curvature::HESSIAN_BASE_STEP;
use finslerlab::phi::{default_validity_grid, validity_check};
use finslerlab::{
    classify_isotropy, f_of_b, fb_log_derivative, mean_berwald_closed, mean_berwald_oracle,
    run_formula_audit, s_curvature_generic, s_curvature_kropina, Error, HomogeneousSpec,
    LoadedSpec, PhiModel, TangentVector, ValidityVerdict, VolumeForm,
};
use report::{fmt_direction, fmt_direction_label, matrix_csv, scalar_csv, sig9};

#[derive(Parser)]
#[command(
    name = "finslerlab",
    version,
    about = "curvature of homogeneous (alpha,beta)-Finsler spaces from Lie-algebra data"
)]
struct Cli {
    /// Path to the TOML space description.
    #[arg(long, global = true, value_name = "PATH")]
    spec: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Override the kropina exponent of the spec's profile.
    #[arg(
        long,
        global = true,
        value_name = "REAL",
        allow_negative_numbers = true
    )]
    m: Option<f64>,

    /// Seed for direction sampling.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Number of sampled directions when none are given explicitly.
    #[arg(long, global = true, default_value_t = 50)]
    samples: usize,

    /// Explicit direction as comma-separated components; repeatable.
    #[arg(
        long = "direction",
        global = true,
        value_name = "Y1,Y2,...",
        allow_hyphen_values = true
    )]
    directions: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// S-curvature along the given or sampled directions.
    SCurvature,
    /// Mean Berwald curvature matrix along one direction.
    MeanBerwald,
    /// Audit every closed form against its independent route.
    VerifyFormulas,
    /// Validate the metric, bracket and profile data.
    ValidateMetric,
    /// Scan sampled directions and classify the S-curvature as zero or not.
    Isotropy,
    /// Busemann-Hausdorff volume coefficient f(b) and its log-derivative.
    VolumeCoeff,
}

/// Outcome of a command: the report text plus whether validation failed
/// (a printable, non-numerical failure).
struct Report {
    text: String,
    validation_failed: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report {
            text,
            validation_failed: false,
        }
    }
}

fn main() -> ExitCode {
    // Usage problems are input problems (exit 1); 2 is reserved for
    // numerical failures. Help and version render normally.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = check_thread_cap() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.text);
            if report.validation_failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_class(&e))
        }
    }
}

/// 1 for input and validation problems, 2 for numerical failures.
fn exit_class(e: &Error) -> u8 {
    match e {
        Error::DimensionMismatch { .. } | Error::InvalidInput(_) | Error::ZeroVector => 1,
        _ => 2,
    }
}

/// `FINSLERLAB_THREADS` caps internal parallelism; 0 means automatic. The
/// computation pipeline is sequential, which satisfies every cap, but the
/// variable is still validated so a typo fails loudly instead of silently.
fn check_thread_cap() -> Result<(), String> {
    match std::env::var("FINSLERLAB_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(_) => Ok(()),
            Err(_) => Err(format!(
                "FINSLERLAB_THREADS must be a non-negative integer, got {raw:?}"
            )),
        },
    }
}

fn run(cli: &Cli) -> finslerlab::Result<Report> {
    let path = cli
        .spec
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("--spec <PATH> is required".into()))?;
    let loaded = finslerlab::load_spec(path)?;
    let (model, kropina_m) = apply_m_override(&loaded, cli.m)?;
    match cli.command {
        Command::SCurvature => s_curvature_cmd(cli, &loaded, &model, kropina_m),
        Command::MeanBerwald => mean_berwald_cmd(cli, &loaded, &model, kropina_m),
        Command::VerifyFormulas => {
            let m = require_kropina(kropina_m, "verify-formulas")?;
            verify_formulas_cmd(cli, &loaded.space, m)
        }
        Command::ValidateMetric => validate_metric_cmd(cli, &loaded, &model, kropina_m),
        Command::Isotropy => {
            let m = require_kropina(kropina_m, "isotropy")?;
            isotropy_cmd(cli, &loaded.space, m)
        }
        Command::VolumeCoeff => volume_coeff_cmd(cli, &loaded, &model),
    }
}

/// `--m` replaces the kropina exponent; on any other family it is an error
/// rather than a silent profile swap.
fn apply_m_override(
    loaded: &LoadedSpec,
    m_override: Option<f64>,
) -> finslerlab::Result<(PhiModel, Option<f64>)> {
    match (m_override, loaded.kropina_m) {
        (None, km) => Ok((loaded.phi.clone(), km)),
        (Some(m), Some(_)) => Ok((PhiModel::kropina(m)?, Some(m))),
        (Some(_), None) => Err(Error::InvalidInput(
            "--m only overrides a kropina profile; this spec declares a different family".into(),
        )),
    }
}

fn require_kropina(kropina_m: Option<f64>, command: &str) -> finslerlab::Result<f64> {
    kropina_m.ok_or_else(|| {
        Error::InvalidInput(format!(
            "{command} audits the kropina closed forms and needs a kropina profile"
        ))
    })
}

fn parse_direction(raw: &str, n: usize) -> finslerlab::Result<TangentVector> {
    let parts: Result<Vec<f64>, _> = raw.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let comps = parts.map_err(|e| Error::InvalidInput(format!("bad --direction {raw:?}: {e}")))?;
    if comps.len() != n {
        return Err(Error::DimensionMismatch {
            context: "--direction",
            expected: n,
            got: comps.len(),
        });
    }
    Ok(TangentVector(comps))
}

/// Explicit directions if any were given, otherwise a seeded sample on the
/// alpha-unit sphere.
fn gather_directions(
    cli: &Cli,
    space: &HomogeneousSpec,
    singular_profile: bool,
) -> finslerlab::Result<Vec<TangentVector>> {
    if !cli.directions.is_empty() {
        return cli
            .directions
            .iter()
            .map(|raw| parse_direction(raw, space.n()))
            .collect();
    }
    if cli.samples == 0 {
        return Err(Error::InvalidInput("--samples must be positive".into()));
    }
    let min_abs_s = if singular_profile { 1e-2 } else { 0.0 };
    space.sample_unit_directions(cli.samples, cli.seed, min_abs_s)
}

fn profile_line(model: &PhiModel, kropina_m: Option<f64>) -> String {
    match (model, kropina_m) {
        (PhiModel::Kropina { .. }, Some(m)) => format!("kropina m = {}", sig9(m)),
        (PhiModel::Randers, _) => "randers".into(),
        (PhiModel::Polynomial { .. }, _) => "polynomial".into(),
        _ => "custom".into(),
    }
}

fn s_curvature_cmd(
    cli: &Cli,
    loaded: &LoadedSpec,
    model: &PhiModel,
    kropina_m: Option<f64>,
) -> finslerlab::Result<Report> {
    let space = &loaded.space;
    let dirs = gather_directions(cli, space, model.singular_at_zero())?;
    let mut values = Vec::with_capacity(dirs.len());
    for y in &dirs {
        // The closed form is the headline route for kropina; both routes are
        // held together by the audit and the test suite.
        let s = match kropina_m {
            Some(m) => s_curvature_kropina(space, m, y)?,
            None => s_curvature_generic(space, model, y)?,
        };
        values.push(s);
    }
    match cli.format {
        Format::Csv => {
            let rows: Vec<(String, String)> = dirs
                .iter()
                .zip(&values)
                .map(|(y, s)| {
                    (
                        format!("S[{}]", fmt_direction_label(y.as_slice())),
                        sig9(*s),
                    )
                })
                .collect();
            Ok(Report::ok(scalar_csv(&rows)))
        }
        Format::Text => {
            let mut out = format!("s-curvature ({})\n", profile_line(model, kropina_m));
            for (y, s) in dirs.iter().zip(&values) {
                out.push_str(&format!(
                    "  y = {}: S = {}\n",
                    fmt_direction(y.as_slice()),
                    sig9(*s)
                ));
            }
            Ok(Report::ok(out))
        }
    }
}

fn mean_berwald_cmd(
    cli: &Cli,
    loaded: &LoadedSpec,
    model: &PhiModel,
    kropina_m: Option<f64>,
) -> finslerlab::Result<Report> {
    let space = &loaded.space;
    let dirs = gather_directions(cli, space, model.singular_at_zero())?;
    let dirs = if cli.directions.is_empty() {
        // Sampling is for surveys; the Hessian report reads best one
        // direction at a time.
        dirs.into_iter().take(1).collect::<Vec<_>>()
    } else {
        dirs
    };
    if cli.format == Format::Csv && dirs.len() != 1 {
        return Err(Error::InvalidInput(
            "csv output for mean-berwald is a single matrix; give exactly one --direction".into(),
        ));
    }
    let mut out = String::new();
    for y in &dirs {
        let oracle = mean_berwald_oracle(space, model, y)?;
        if cli.format == Format::Csv {
            return Ok(Report::ok(matrix_csv(&oracle.e)));
        }
        out.push_str(&format!(
            "mean berwald curvature (difference oracle, base step {} alpha)\n",
            sig9(HESSIAN_BASE_STEP)
        ));
        out.push_str(&format!("  y = {}\n", fmt_direction(y.as_slice())));
        let n = space.n();
        for i in 0..n {
            for j in 0..n {
                out.push_str(&format!(
                    "  E[{},{}] = {}\n",
                    i + 1,
                    j + 1,
                    sig9(oracle.e[(i, j)])
                ));
            }
        }
        if let Some(m) = kropina_m {
            let closed = mean_berwald_closed(space, m, y)?;
            out.push_str(&format!(
                "  closed form vs oracle, max entry gap = {}\n",
                sig9(closed.residual_vs_oracle.unwrap_or(f64::NAN))
            ));
        }
    }
    Ok(Report::ok(out))
}

fn verify_formulas_cmd(cli: &Cli, space: &HomogeneousSpec, m: f64) -> finslerlab::Result<Report> {
    let audit = run_formula_audit(space, m, cli.samples, cli.seed)?;
    let rows: Vec<(String, String)> = vec![
        ("samples_drawn".into(), audit.samples_drawn.to_string()),
        ("samples_used".into(), audit.samples_used.to_string()),
        ("samples_skipped".into(), audit.samples_skipped.to_string()),
        ("q_gap".into(), sig9(audit.scalar_gaps.q)),
        ("qp_gap".into(), sig9(audit.scalar_gaps.qp)),
        ("qpp_gap".into(), sig9(audit.scalar_gaps.qpp)),
        ("delta_gap".into(), sig9(audit.scalar_gaps.delta)),
        ("phi_gap".into(), sig9(audit.scalar_gaps.phi_cap)),
        ("phi_forms_gap".into(), sig9(audit.scalar_gaps.phi_forms)),
        ("s_curvature_gap".into(), sig9(audit.s_curvature_gap)),
        ("omega_d1_gap".into(), sig9(audit.omega_d1_gap)),
        ("omega_d2_gap".into(), sig9(audit.omega_d2_gap)),
        ("omega_grad_gap".into(), sig9(audit.omega_grad_gap)),
        ("omega_hess_gap".into(), sig9(audit.omega_hess_gap)),
        (
            "berwald_residual_omega_reading".into(),
            sig9(audit.berwald_residual_omega),
        ),
        (
            "berwald_residual_s_term_reading".into(),
            sig9(audit.berwald_residual_s_term),
        ),
        (
            "berwald_raw_asymmetry".into(),
            sig9(audit.berwald_raw_asymmetry),
        ),
    ];
    if cli.format == Format::Csv {
        return Ok(Report::ok(scalar_csv(&rows)));
    }
    let mut out = format!(
        "formula audit (kropina m = {}, seed = {})\n",
        sig9(m),
        audit.seed
    );
    out.push_str(&format!(
        "directions: {} drawn, {} used, {} skipped near degeneracies\n",
        audit.samples_drawn, audit.samples_used, audit.samples_skipped
    ));
    out.push_str("closed forms vs independent routes (max relative gap):\n");
    for (label, key) in [
        ("Q", 3usize),
        ("Q'", 4),
        ("Q''", 5),
        ("Delta", 6),
        ("Phi", 7),
        ("Phi two arrangements", 8),
        ("S closed vs generic", 9),
    ] {
        out.push_str(&format!("  {:<24} = {}\n", label, rows[key].1));
    }
    out.push_str("expanded displays under audit (max relative gap):\n");
    for (label, key) in [
        ("dOmega/ds expanded", 10usize),
        ("d2Omega/ds2 expanded", 11),
        ("Omega y-gradient", 12),
        ("Omega y-Hessian", 13),
    ] {
        out.push_str(&format!("  {:<24} = {}\n", label, rows[key].1));
    }
    out.push_str(&format!(
        "mean berwald closed form vs oracle ({} directions):\n",
        audit.berwald_directions
    ));
    for (label, key) in [
        ("coefficient read as Omega", 14usize),
        ("coefficient read as S-term", 15),
        ("raw asymmetry", 16),
    ] {
        out.push_str(&format!("  {:<28} = {}\n", label, rows[key].1));
    }
    out.push_str("notes:\n");
    for note in &audit.notes {
        out.push_str(&format!("  - {note}\n"));
    }
    Ok(Report::ok(out))
}

fn validate_metric_cmd(
    cli: &Cli,
    loaded: &LoadedSpec,
    model: &PhiModel,
    kropina_m: Option<f64>,
) -> finslerlab::Result<Report> {
    let space = &loaded.space;
    let validation = space.validate();
    let b = space.b_squared().sqrt();
    let validity = if validation.passed() {
        Some(validity_check(model, b, &default_validity_grid(model, b))?)
    } else {
        None
    };
    let passed = validation.passed()
        && !matches!(
            validity.as_ref().map(|v| &v.verdict),
            Some(ValidityVerdict::Invalid { .. })
        );
    if cli.format == Format::Csv {
        let mut rows: Vec<(String, String)> = validation
            .checks
            .iter()
            .map(|c| {
                (
                    c.name.replace(' ', "_"),
                    if c.passed { "pass" } else { "fail" }.to_string(),
                )
            })
            .collect();
        rows.push(("b".into(), sig9(b)));
        if let Some(v) = &validity {
            rows.push((
                "profile_validity".into(),
                match v.verdict {
                    ValidityVerdict::Valid => "valid".into(),
                    ValidityVerdict::Invalid { .. } => "invalid".into(),
                    ValidityVerdict::Singular => "singular".into(),
                    ValidityVerdict::DomainRestricted => "domain-restricted".into(),
                },
            ));
        }
        rows.push((
            "verdict".into(),
            if passed { "valid" } else { "invalid" }.to_string(),
        ));
        return Ok(Report {
            text: scalar_csv(&rows),
            validation_failed: !passed,
        });
    }
    let mut out = String::from("metric validation\n");
    for c in &validation.checks {
        if c.passed {
            out.push_str(&format!("  {}: pass\n", c.name));
        } else {
            out.push_str(&format!("  {}: FAIL ({})\n", c.name, c.detail));
        }
    }
    out.push_str(&format!("  b = {}\n", sig9(b)));
    let mut profile = format!("profile: {}", profile_line(model, kropina_m));
    if model.singular_at_zero() {
        profile.push_str(", singular at beta = 0");
    }
    out.push_str(&profile);
    out.push('\n');
    if let Some(v) = &validity {
        let verdict = match v.verdict {
            ValidityVerdict::Valid => "valid".to_string(),
            ValidityVerdict::Invalid { first_failing_s } => {
                format!("invalid, first failure at s = {}", sig9(first_failing_s))
            }
            ValidityVerdict::Singular => "singular on this grid".into(),
            ValidityVerdict::DomainRestricted => "valid on its real domain".into(),
        };
        out.push_str(&format!(
            "profile validity ({} grid points): {verdict}\n",
            v.points.len()
        ));
    }
    out.push_str(&format!(
        "verdict: {}\n",
        if passed { "valid" } else { "invalid" }
    ));
    Ok(Report {
        text: out,
        validation_failed: !passed,
    })
}

fn isotropy_cmd(cli: &Cli, space: &HomogeneousSpec, m: f64) -> finslerlab::Result<Report> {
    let report = classify_isotropy(space, m, cli.samples, cli.seed)?;
    if cli.format == Format::Csv {
        let rows = vec![
            ("samples".into(), report.samples.to_string()),
            ("max_abs_s".into(), sig9(report.max_abs_s)),
            ("cancellation_scale".into(), sig9(report.scale)),
            (
                "verdict".into(),
                match report.class {
                    finslerlab::IsotropyClass::Zero => "zero".into(),
                    finslerlab::IsotropyClass::Nonzero => "nonzero".into(),
                },
            ),
        ];
        return Ok(Report::ok(scalar_csv(&rows)));
    }
    let mut out = format!(
        "isotropy scan (kropina m = {}, samples = {}, seed = {})\n",
        sig9(m),
        report.samples,
        cli.seed
    );
    out.push_str(&format!("  max |S| = {}\n", sig9(report.max_abs_s)));
    out.push_str(&format!("  cancellation scale = {}\n", sig9(report.scale)));
    out.push_str(&format!("verdict: {}\n", report.class));
    Ok(Report::ok(out))
}

fn volume_coeff_cmd(
    cli: &Cli,
    loaded: &LoadedSpec,
    model: &PhiModel,
) -> finslerlab::Result<Report> {
    let space = &loaded.space;
    let b = space.b_squared().sqrt();
    let n = space.n();
    let form = VolumeForm::BusemannHausdorff;
    let f = f_of_b(model, b, n, &form)?;
    let log_deriv = fb_log_derivative(model, b, n, &form)?;
    if cli.format == Format::Csv {
        let rows = vec![
            ("f_of_b".into(), sig9(f)),
            ("fb_log_derivative".into(), sig9(log_deriv)),
        ];
        return Ok(Report::ok(scalar_csv(&rows)));
    }
    let mut out = format!(
        "volume coefficient (busemann-hausdorff, n = {n}, b = {})\n",
        sig9(b)
    );
    out.push_str(&format!("  f(b) = {}\n", sig9(f)));
    out.push_str(&format!("  f'(b)/(b f(b)) = {}\n", sig9(log_deriv)));
    Ok(Report::ok(out))
}
