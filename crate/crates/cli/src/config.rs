//! Job configuration.
//!
//! A config is a TOML file with three sections:
//!
//! ```toml
//! [base]
//! kind = "grosjean1"      # chebyshev_u | chebyshev_t | chebyshev_v | chebyshev_w
//!                         # | jacobi | grosjean1 | grosjean2 | constant
//! alpha = "-3/10"         # grosjean1, grosjean2, jacobi
//! # beta = "1/2"          # jacobi
//! # b = 0, a2 = "1/4"     # constant
//!
//! [extension]             # the r prepended rows, top row first
//! b = [0.1]               # b_{-r}, ..., b_{-1}
//! a2 = ["2/5"]            # a_{-r+1}^2, ..., a_0^2
//!
//! [options]               # all optional
//! degree = 10
//! grid = 201
//! tol = 1e-8
//! truncation = 2000
//! points = [-0.5, 0, "1/3"]
//! gram_m = 12
//! christoffel_n = 20000
//! zero_degree = 100
//! measure_a0_squared = 0.5
//! ```
//!
//! Numbers may be TOML integers, floats or strings (`"p/q"` or decimal).
//! Floats are read through their shortest decimal form, so `0.1` means
//! exactly `1/10`.

use std::path::Path;

use antiassoc::families::{
    chebyshev_coeffs, chebyshev_u_constant, constant_coeffs, grosjean1_coeffs, grosjean2_coeffs,
    jacobi_coeffs,
};
use antiassoc::measure::Base;
use antiassoc::{ChebyshevKind, CoefficientSequence, ExtensionParams, Real};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_real(&self) -> Result<Real, CliError> {
        match self {
            Number::Int(n) => Ok(Real::integer(*n)),
            Number::Float(v) => Real::from_f64_decimal(*v).map_err(CliError::config),
            Number::Text(s) => Real::parse(s).map_err(CliError::config),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    base: RawBase,
    extension: RawExtension,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBase {
    kind: String,
    alpha: Option<Number>,
    beta: Option<Number>,
    b: Option<Number>,
    a2: Option<Number>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExtension {
    b: Vec<Number>,
    a2: Vec<Number>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    degree: Option<usize>,
    grid: Option<usize>,
    tol: Option<f64>,
    truncation: Option<usize>,
    points: Option<Vec<Number>>,
    gram_m: Option<usize>,
    christoffel_n: Option<usize>,
    zero_degree: Option<usize>,
    measure_a0_squared: Option<Number>,
}

/// A validated base family.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseChoice {
    Chebyshev(ChebyshevKind),
    Jacobi { alpha: Real, beta: Real },
    Grosjean1 { alpha: Real },
    Grosjean2 { alpha: Real },
    Constant { b: Real, a2: Real },
}

impl BaseChoice {
    pub fn sequence(&self) -> CoefficientSequence {
        let seq = match self {
            BaseChoice::Chebyshev(ChebyshevKind::U) => Ok(chebyshev_u_constant()),
            BaseChoice::Chebyshev(kind) => Ok(chebyshev_coeffs(*kind)),
            BaseChoice::Jacobi { alpha, beta } => jacobi_coeffs(alpha.clone(), beta.clone()),
            BaseChoice::Grosjean1 { alpha } => grosjean1_coeffs(alpha.clone()),
            BaseChoice::Grosjean2 { alpha } => grosjean2_coeffs(alpha.clone()),
            BaseChoice::Constant { b, a2 } => constant_coeffs(b.clone(), a2.clone()),
        };
        seq.expect("parameters were validated when the config was read")
    }

    /// The base as a measure family, when its measure is known in closed form.
    pub fn measure_base(&self) -> Option<Base> {
        match self {
            BaseChoice::Chebyshev(ChebyshevKind::U) => Some(Base::ChebyshevU),
            BaseChoice::Chebyshev(ChebyshevKind::T) => Some(Base::Grosjean1(Real::ratio(-1, 2))),
            BaseChoice::Grosjean1 { alpha } => Some(Base::Grosjean1(alpha.clone())),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    /// Highest degree for `coeffs`/`eval`; `n` for `ode`.
    pub degree: usize,
    /// Number of grid points for `eval` and `measure`.
    pub grid: usize,
    /// Overrides the default pass threshold of `eval` and of the Gram check.
    pub tol: Option<f64>,
    /// Truncation size for outlier checks and the trace-class score.
    pub truncation: usize,
    pub points: Option<Vec<f64>>,
    pub gram_m: usize,
    pub christoffel_n: usize,
    pub zero_degree: usize,
    /// Builds the verified measure from a different `a_0^2` (negative tests).
    pub measure_a0_squared: Option<Real>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            degree: 10,
            grid: 201,
            tol: None,
            truncation: 2000,
            points: None,
            gram_m: 12,
            christoffel_n: 20_000,
            zero_degree: 100,
            measure_a0_squared: None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub degree: Option<usize>,
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub base: BaseChoice,
    pub extension: ExtensionParams,
    pub options: Options,
}

const MAX_DEGREE: usize = 100_000;

fn required(value: &Option<Number>, kind: &str, key: &str) -> Result<Real, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("base kind {kind:?} needs `{key}`")))?
        .to_real()
}

fn forbid(value: &Option<Number>, kind: &str, key: &str) -> Result<(), CliError> {
    match value {
        Some(_) => Err(CliError::Config(format!(
            "base kind {kind:?} takes no `{key}`"
        ))),
        None => Ok(()),
    }
}

fn parse_base(raw: &RawBase) -> Result<BaseChoice, CliError> {
    let kind = raw.kind.as_str();
    let keys = [
        ("alpha", &raw.alpha),
        ("beta", &raw.beta),
        ("b", &raw.b),
        ("a2", &raw.a2),
    ];
    let allowed: &[&str] = match kind {
        "jacobi" => &["alpha", "beta"],
        "grosjean1" | "grosjean2" => &["alpha"],
        "constant" => &["b", "a2"],
        _ => &[],
    };
    for (key, value) in keys {
        if !allowed.contains(&key) {
            forbid(value, kind, key)?;
        }
    }
    let choice = match kind {
        "chebyshev_u" => BaseChoice::Chebyshev(ChebyshevKind::U),
        "chebyshev_t" => BaseChoice::Chebyshev(ChebyshevKind::T),
        "chebyshev_v" => BaseChoice::Chebyshev(ChebyshevKind::V),
        "chebyshev_w" => BaseChoice::Chebyshev(ChebyshevKind::W),
        "jacobi" => BaseChoice::Jacobi {
            alpha: required(&raw.alpha, kind, "alpha")?,
            beta: required(&raw.beta, kind, "beta")?,
        },
        "grosjean1" => BaseChoice::Grosjean1 {
            alpha: required(&raw.alpha, kind, "alpha")?,
        },
        "grosjean2" => BaseChoice::Grosjean2 {
            alpha: required(&raw.alpha, kind, "alpha")?,
        },
        "constant" => BaseChoice::Constant {
            b: required(&raw.b, kind, "b")?,
            a2: required(&raw.a2, kind, "a2")?,
        },
        other => return Err(CliError::Config(format!("unknown base kind {other:?}"))),
    };
    // run the family constructors once so later code can rely on them
    match &choice {
        BaseChoice::Jacobi { alpha, beta } => {
            jacobi_coeffs(alpha.clone(), beta.clone()).map(|_| ())
        }
        BaseChoice::Grosjean1 { alpha } => grosjean1_coeffs(alpha.clone()).map(|_| ()),
        BaseChoice::Grosjean2 { alpha } => grosjean2_coeffs(alpha.clone()).map(|_| ()),
        BaseChoice::Constant { b, a2 } => constant_coeffs(b.clone(), a2.clone()).map(|_| ()),
        BaseChoice::Chebyshev(_) => Ok(()),
    }
    .map_err(CliError::config)?;
    Ok(choice)
}

fn reals(values: &[Number]) -> Result<Vec<Real>, CliError> {
    values.iter().map(Number::to_real).collect()
}

impl JobConfig {
    pub fn from_toml(text: &str, overrides: &Overrides) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let base = parse_base(&raw.base)?;
        let extension = ExtensionParams::new(reals(&raw.extension.b)?, reals(&raw.extension.a2)?)
            .map_err(CliError::config)?;
        let d = Options::default();
        let o = raw.options;
        let options = Options {
            degree: overrides.degree.or(o.degree).unwrap_or(d.degree),
            grid: overrides.grid.or(o.grid).unwrap_or(d.grid),
            tol: overrides.tol.or(o.tol),
            truncation: overrides
                .truncation
                .or(o.truncation)
                .unwrap_or(d.truncation),
            points: o
                .points
                .map(|ps| ps.iter().map(|p| p.to_real().map(|r| r.value())).collect())
                .transpose()?,
            gram_m: o.gram_m.unwrap_or(d.gram_m),
            christoffel_n: o.christoffel_n.unwrap_or(d.christoffel_n),
            zero_degree: o.zero_degree.unwrap_or(d.zero_degree),
            measure_a0_squared: o
                .measure_a0_squared
                .as_ref()
                .map(Number::to_real)
                .transpose()?,
        };
        let config = JobConfig {
            base,
            extension,
            options,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, overrides)
    }

    fn validate(&self) -> Result<(), CliError> {
        let o = &self.options;
        let r = self.extension.r();
        let fail = |msg: String| Err(CliError::Config(msg));
        if o.degree > MAX_DEGREE {
            return fail(format!("degree {} exceeds {MAX_DEGREE}", o.degree));
        }
        if o.grid < 2 {
            return fail("grid needs at least 2 points".into());
        }
        if let Some(t) = o.tol {
            if !(t.is_finite() && t > 0.0) {
                return fail(format!("tol must be positive, got {t}"));
            }
        }
        if o.truncation < r + 2 || o.truncation > MAX_DEGREE {
            return fail(format!("truncation must lie in {}..={MAX_DEGREE}", r + 2));
        }
        if let Some(ps) = &o.points {
            if ps.is_empty() || ps.iter().any(|x| !x.is_finite()) {
                return fail("points must be a nonempty list of finite numbers".into());
            }
        }
        if o.gram_m > 20 {
            return fail(format!("gram_m {} exceeds 20", o.gram_m));
        }
        if o.christoffel_n < 4 || o.christoffel_n > MAX_DEGREE {
            return fail(format!("christoffel_n must lie in 4..={MAX_DEGREE}"));
        }
        if o.zero_degree == 0 || o.zero_degree > 2000 {
            return fail("zero_degree must lie in 1..=2000".into());
        }
        if let Some(a) = &o.measure_a0_squared {
            self.extension
                .with_a0_squared(a.clone())
                .map_err(CliError::config)?;
        }
        Ok(())
    }

    /// Extension parameters the verified measure is built from.
    pub fn measure_params(&self) -> ExtensionParams {
        match &self.options.measure_a0_squared {
            Some(a) => self
                .extension
                .with_a0_squared(a.clone())
                .expect("validated"),
            None => self.extension.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
[base]
kind = "grosjean1"
alpha = -0.3

[extension]
b = [0.1]
a2 = ["2/5"]

[options]
degree = 7
"#;

    #[test]
    fn parses_and_overrides() {
        let c = JobConfig::from_toml(GOOD, &Overrides::default()).unwrap();
        assert_eq!(
            c.base,
            BaseChoice::Grosjean1 {
                alpha: Real::ratio(-3, 10)
            }
        );
        assert_eq!(c.extension.b()[0], Real::ratio(1, 10));
        assert_eq!(c.options.degree, 7);
        assert_eq!(c.options.grid, 201);
        let o = Overrides {
            degree: Some(3),
            grid: Some(11),
            ..Overrides::default()
        };
        let c = JobConfig::from_toml(GOOD, &o).unwrap();
        assert_eq!((c.options.degree, c.options.grid), (3, 11));
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            GOOD.replace("degree = 7", "degre = 7"),
            GOOD.replace("kind = \"grosjean1\"", "kind = \"hermite\""),
            GOOD.replace("alpha = -0.3", "alpha = 0.3"),
            GOOD.replace("alpha = -0.3", "alpha = -0.3\nbeta = 1"),
            GOOD.replace("a2 = [\"2/5\"]", "a2 = [0]"),
            GOOD.replace("a2 = [\"2/5\"]", "a2 = [\"1/0\"]"),
            GOOD.replace("b = [0.1]", "b = [0.1, 0.2]"),
            GOOD.replace("degree = 7", "grid = 1"),
            GOOD.replace("degree = 7", "gram_m = 40"),
            GOOD.replace("degree = 7", "measure_a0_squared = -1"),
            GOOD.replace("[options]", "[extra]"),
        ];
        for text in &bad {
            assert!(
                matches!(
                    JobConfig::from_toml(text, &Overrides::default()),
                    Err(CliError::Config(_))
                ),
                "{text}"
            );
        }
    }

    #[test]
    fn measure_bases() {
        assert_eq!(
            BaseChoice::Chebyshev(ChebyshevKind::U).measure_base(),
            Some(Base::ChebyshevU)
        );
        assert!(BaseChoice::Chebyshev(ChebyshevKind::V)
            .measure_base()
            .is_none());
        assert!(matches!(
            BaseChoice::Chebyshev(ChebyshevKind::T).measure_base(),
            Some(Base::Grosjean1(_))
        ));
    }
}
