//! The five commands. Each writes its files into the output directory and
//! returns a [`Report`] whose `passed` flag decides the exit status.

use std::fs;
use std::path::Path;

use antiassoc::anti::{anti_closed_monic, anti_closed_orthonormal, expand_anti_all, extend};
use antiassoc::families::{chebyshev_t_zeros, chebyshev_u_zeros};
use antiassoc::measure::{
    christoffel_limit_estimate, gram_matrix_against, identity_deviation,
    predicted_christoffel_limit, Base, MeasureModel,
};
use antiassoc::ode::{fourth_order_ode, second_order_ode, PolyOperator};
use antiassoc::quadrature::PanelRule;
use antiassoc::recurrence::{eval_monic, eval_orthonormal, shift, trace_class_score};
use antiassoc::spectral::zeros;
use antiassoc::{CoefficientSequence, Error, Execution, Rational};
use serde::{Deserialize, Serialize};

use crate::config::JobConfig;
use crate::error::CliError;
use crate::model_file::ModelFile;

/// Outcome of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub passed: bool,
    pub summary: String,
}

/// 17 significant digits, enough to read every `f64` back exactly.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    fs::write(dir.join(name), serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn coefficient_text(seq: &CoefficientSequence, n: usize, a2: bool) -> String {
    if a2 && n == 0 {
        return "-".into();
    }
    let exact = if a2 { seq.a2_exact(n) } else { seq.b_exact(n) };
    match exact {
        Ok(q) => q.to_string(),
        Err(_) => fmt17(if a2 { seq.a2(n) } else { seq.b(n) }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffRow {
    pub n: usize,
    pub base_b: String,
    pub base_a2: String,
    pub extended_b: String,
    pub extended_a2: String,
    pub shifted_b: String,
    pub shifted_a2: String,
}

/// `(n, b_n, a_n^2)` for the base, the extension and the extension shifted
/// back by `r`, which must reproduce the base.
pub fn cmd_coeffs(config: &JobConfig, out: &Path) -> Result<Report, CliError> {
    let base = config.base.sequence();
    let ext = extend(&base, &config.extension);
    let back = shift(&ext, config.extension.r());
    let rows: Vec<CoeffRow> = (0..=config.options.degree)
        .map(|n| CoeffRow {
            n,
            base_b: coefficient_text(&base, n, false),
            base_a2: coefficient_text(&base, n, true),
            extended_b: coefficient_text(&ext, n, false),
            extended_a2: coefficient_text(&ext, n, true),
            shifted_b: coefficient_text(&back, n, false),
            shifted_a2: coefficient_text(&back, n, true),
        })
        .collect();
    let mut csv = csv::Writer::from_path(out.join("coeffs.csv"))?;
    for row in &rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    write_json(out, "coeffs.json", &rows)?;
    let round_trip = rows
        .iter()
        .all(|r| r.shifted_b == r.base_b && r.shifted_a2 == r.base_a2);
    let mut summary = format!(
        "{:>4} {:>14} {:>14} {:>14} {:>14}\n",
        "n", "b", "a2", "ext b", "ext a2"
    );
    for r in &rows {
        summary.push_str(&format!(
            "{:>4} {:>14} {:>14} {:>14} {:>14}\n",
            r.n, r.base_b, r.base_a2, r.extended_b, r.extended_a2
        ));
    }
    summary.push_str(&format!(
        "shift round trip: {}",
        if round_trip { "ok" } else { "MISMATCH" }
    ));
    Ok(Report {
        passed: round_trip,
        summary,
    })
}

/// Uniform grid on `[-1, 1]` including the endpoints, or the configured points.
fn eval_points(config: &JobConfig) -> Vec<f64> {
    match &config.options.points {
        Some(ps) => ps.clone(),
        None => {
            let g = config.options.grid;
            (0..g)
                .map(|k| -1.0 + 2.0 * k as f64 / (g - 1) as f64)
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub x: f64,
    pub m: usize,
    pub closed: f64,
    pub direct: f64,
    /// Closed form against recurrence in orthonormal scaling, relative to
    /// `max(1, |p_m(x)|)`.
    pub mismatch: f64,
}

/// `P^(-r)_m(x)` for `m = 0..=degree` by the closed form and by the extended
/// recurrence.
pub fn cmd_eval(config: &JobConfig, out: &Path) -> Result<Report, CliError> {
    let base = config.base.sequence();
    let p = &config.extension;
    let degree = config.options.degree;
    if degree < p.r() {
        return Err(CliError::Config(format!(
            "degree {degree} is below the extension order {}",
            p.r()
        )));
    }
    let ext = extend(&base, p);
    let n = degree - p.r();
    let tol = config.options.tol.unwrap_or(1e-10);
    let mut rows = Vec::new();
    for x in eval_points(config) {
        let closed = anti_closed_monic(&base, p, n, x)?;
        let direct = eval_monic(&ext, degree, x)?;
        let closed_on = anti_closed_orthonormal(&base, p, n, x)?;
        let direct_on = eval_orthonormal(&ext, degree, x)?;
        for m in 0..=degree {
            let (c, d) = (closed_on.values[m], direct_on.values[m]);
            rows.push(EvalRow {
                x,
                m,
                closed: closed.values[m],
                direct: direct.values[m],
                mismatch: (c - d).abs() / d.abs().max(1.0),
            });
        }
    }
    let mut csv = csv::Writer::from_path(out.join("eval.csv"))?;
    csv.write_record(["x", "m", "closed", "direct", "mismatch"])?;
    for r in &rows {
        csv.write_record([
            fmt17(r.x),
            r.m.to_string(),
            fmt17(r.closed),
            fmt17(r.direct),
            fmt17(r.mismatch),
        ])?;
    }
    csv.flush()?;
    let worst = rows.iter().map(|r| r.mismatch).fold(0.0, f64::max);
    let passed = worst <= tol;
    let summary = format!(
        "{} values, degrees 0..={degree}; max closed/recurrence mismatch {worst:.3e} (tol {tol:.1e}): {}",
        rows.len(),
        if passed { "ok" } else { "FAIL" }
    );
    Ok(Report { passed, summary })
}

fn measure_base(config: &JobConfig) -> Result<Base, CliError> {
    config.base.measure_base().ok_or_else(|| {
        CliError::Config("this command needs a chebyshev_u, chebyshev_t or grosjean1 base".into())
    })
}

/// Density on a uniform interior grid plus the mass points.
pub fn cmd_measure(config: &JobConfig, out: &Path) -> Result<Report, CliError> {
    let base = measure_base(config)?;
    let model = MeasureModel::build(base, config.extension.clone())?;
    let g = config.options.grid;
    let mut csv = csv::Writer::from_path(out.join("density.csv"))?;
    csv.write_record(["x", "density"])?;
    for k in 0..g {
        let x = -1.0 + 2.0 * (k as f64 + 0.5) / g as f64;
        csv.write_record([fmt17(x), fmt17(model.density(x)?)])?;
    }
    csv.flush()?;
    let rule = PanelRule::default();
    let continuous = model.continuous_mass(&rule, Execution::default())?;
    let file = ModelFile::from_model(&model, continuous);
    write_json(out, "masses.json", &file)?;
    let mut summary = format!(
        "provenance {}; {} mass point(s)",
        model.provenance().tag(),
        model.masses().len()
    );
    for m in model.masses() {
        summary.push_str(&format!("\n  x = {}  mass = {}", fmt17(m.x), fmt17(m.mass)));
    }
    summary.push_str(&format!(
        "\ncontinuous mass {}, total {}",
        fmt17(continuous),
        fmt17(continuous + model.discrete_mass())
    ));
    Ok(Report {
        passed: true,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub note: String,
}

fn check(name: &str, value: f64, threshold: f64, note: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        value,
        threshold,
        passed: value <= threshold,
        note: note.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Largest violation of the zero comparison: positive values are failures.
fn zero_violation(
    seq: &CoefficientSequence,
    reference: fn(usize) -> Vec<f64>,
    sign: f64,
    max_n: usize,
) -> Result<f64, CliError> {
    let worst = Execution::default()
        .map_range(max_n, |k| -> Result<f64, Error> {
            let n = k + 1;
            let zs = zeros(seq, n, 1e-14)?;
            Ok(zs
                .iter()
                .zip(reference(n))
                .map(|(z, t)| sign * (z - t))
                .fold(f64::NEG_INFINITY, f64::max))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(worst.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Gram deviation, total mass, Christoffel limit, trace-class score and the
/// zero comparisons of the base family.
pub fn cmd_verify(config: &JobConfig, out: &Path) -> Result<Report, CliError> {
    let base = measure_base(config)?;
    let o = &config.options;
    let model = MeasureModel::build(base.clone(), config.measure_params())?;
    let rule = PanelRule::default();
    let exec = Execution::default();
    let mut checks = Vec::new();

    let gram_tol = o
        .tol
        .unwrap_or(if base == Base::ChebyshevU { 1e-8 } else { 1e-6 });
    let gram = gram_matrix_against(&model, &config.extension, o.gram_m, &rule, exec)?;
    checks.push(check(
        "gram_deviation",
        identity_deviation(&gram),
        gram_tol,
        format!("max |G - I|, m <= {}", o.gram_m),
    ));

    let total = model.total_mass(&rule, exec)?;
    checks.push(check(
        "total_mass",
        (total - 1.0).abs(),
        1e-7,
        format!(
            "|total - 1| with {} mass point(s), total {}",
            model.masses().len(),
            fmt17(total)
        ),
    ));

    let seq = extend(&base.sequence()?, &config.extension);
    let n = o.christoffel_n;
    let mut gap = 0.0f64;
    for x in [-0.6, -0.2, 0.25, 0.7] {
        let est = christoffel_limit_estimate(&seq, x, &[n / 2, n])?;
        let predicted = predicted_christoffel_limit(&model, x)?;
        gap = gap.max((est.limit - predicted).abs() / predicted);
    }
    checks.push(check(
        "christoffel_limit",
        gap,
        0.02,
        format!("relative gap of n lambda_n at n = {n} (extrapolated)"),
    ));

    let t = o.truncation;
    let tail = trace_class_score(&seq, t) - trace_class_score(&seq, t / 2);
    checks.push(check(
        "trace_class_tail",
        tail,
        1e-2,
        format!(
            "score {} up to N = {t}; tail from N/2",
            fmt17(trace_class_score(&seq, t))
        ),
    ));

    if let Base::Grosjean1(alpha) = &base {
        let a = alpha.value();
        if a != -0.5 {
            let sign = if a > -0.5 { 1.0 } else { -1.0 };
            let g1 = base.sequence()?;
            let v = zero_violation(&g1, chebyshev_t_zeros, sign, o.zero_degree)?;
            checks.push(check(
                "zeros_first_kind",
                v,
                0.0,
                "zeros of G_n against Chebyshev-T zeros",
            ));
            // the associated family is the second-kind family with parameter -alpha
            let g2 = g1.shifted(1);
            let sign2 = if -a > 0.5 { 1.0 } else { -1.0 };
            let v = zero_violation(&g2, chebyshev_u_zeros, sign2, o.zero_degree)?;
            checks.push(check(
                "zeros_second_kind",
                v,
                0.0,
                "zeros of g_n against Chebyshev-U zeros",
            ));
        }
    }
    // strict inequalities: a zero margin counts as a failure
    for c in checks.iter_mut().filter(|c| c.name.starts_with("zeros_")) {
        c.passed = c.value < 0.0;
    }

    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport { passed, checks };
    write_json(out, "verify.json", &report)?;
    let mut text = String::new();
    for c in &report.checks {
        text.push_str(&format!(
            "{} {:<18} {:>12.4e} (threshold {:.1e})  {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold,
            c.note
        ));
    }
    text.push_str(if passed {
        "verification passed\n"
    } else {
        "verification FAILED\n"
    });
    fs::write(out.join("verify.txt"), &text)?;
    Ok(Report {
        passed,
        summary: text.trim_end().to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub x: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeReport {
    pub order: usize,
    pub n: usize,
    pub r: usize,
    /// `coefficients[k]` multiplies `D^k`, listed by ascending power of `x`.
    pub coefficients: Vec<Vec<String>>,
    pub residuals: Vec<Residual>,
    pub annihilates: bool,
    pub annihilates_next_degree: bool,
}

/// Points where the residual is evaluated exactly.
pub fn residual_points() -> Vec<Rational> {
    [(0, 1), (1, 3), (-2, 5), (3, 4), (-9, 7)]
        .iter()
        .map(|&(p, q)| Rational::new(p.into(), q.into()))
        .collect()
}

/// Exact differential equation for `P^(-r)_{n+r}` with `n = degree`; the
/// second-order form is used where the fourth-order one degenerates.
pub fn cmd_ode(config: &JobConfig, out: &Path) -> Result<Report, CliError> {
    let seq = config.base.sequence();
    let p = &config.extension;
    let n = config.options.degree;
    let operator: PolyOperator = match fourth_order_ode(&seq, p, n) {
        Ok(ode) => ode.operator,
        Err(Error::Degenerate(_)) => second_order_ode(&seq, p, n)?,
        Err(e) => return Err(e.into()),
    };
    let polys = expand_anti_all(&seq, p, n + p.r() + 1)?;
    let (y, next) = (&polys[n + p.r()], &polys[n + p.r() + 1]);
    let residuals: Vec<Residual> = residual_points()
        .iter()
        .map(|x| Residual {
            x: x.to_string(),
            value: operator.residual_at(y, x).to_string(),
        })
        .collect();
    let annihilates = operator.apply(y).is_zero();
    let annihilates_next_degree = operator.apply(next).is_zero();
    let report = OdeReport {
        order: operator.order().unwrap_or(0),
        n,
        r: p.r(),
        coefficients: operator.coeffs().iter().map(|c| c.to_strings()).collect(),
        residuals,
        annihilates,
        annihilates_next_degree,
    };
    write_json(out, "ode.json", &report)?;
    let passed =
        annihilates && !annihilates_next_degree && report.residuals.iter().all(|r| r.value == "0");
    let summary = format!(
        "order {} equation for P^(-{})_{}: {}\n{operator}",
        report.order,
        p.r(),
        n + p.r(),
        if passed {
            "annihilates exactly, rejects the next degree"
        } else {
            "FAIL"
        }
    );
    Ok(Report { passed, summary })
}
