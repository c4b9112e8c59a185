//! Named coefficient families: Chebyshev (four kinds), Jacobi, and the
//! Grosjean polynomials of the first and second kind.
//!
//! Grosjean polynomials are the Jacobi polynomials with `alpha + beta = -1`
//! (first kind, `G_n^alpha`, `-1 < alpha < 0`) and `alpha + beta = 1`
//! (second kind, `g_n^alpha`, `-1 < alpha < 2`). Their associated
//! polynomials are again Grosjean: `shift(G^alpha, 1) = g^{-alpha}`.

use std::f64::consts::PI;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::DensePolynomial;
use crate::recurrence::CoefficientSequence;
use crate::scalar::{Field, Real};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChebyshevKind {
    /// First kind, weight `1/(pi sqrt(1-x^2))`.
    T,
    /// Second kind, constant coefficients `b = 0`, `a^2 = 1/4`.
    U,
    /// Third kind, Jacobi `(1/2, -1/2)`.
    V,
    /// Fourth kind, Jacobi `(-1/2, 1/2)`.
    W,
}

impl ChebyshevKind {
    /// Jacobi parameters `(alpha, beta)` of this kind.
    pub fn jacobi_params(self) -> (Real, Real) {
        let h = Real::ratio(1, 2);
        let mh = Real::ratio(-1, 2);
        match self {
            ChebyshevKind::T => (mh.clone(), mh),
            ChebyshevKind::U => (h.clone(), h),
            ChebyshevKind::V => (h, mh),
            ChebyshevKind::W => (mh, h),
        }
    }
}

/// Generator of an infinite coefficient stream, a pure function of the index.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Constant { b: Real, a2: Real },
    Chebyshev(ChebyshevKind),
    Jacobi { alpha: Real, beta: Real },
    Grosjean1 { alpha: Real },
    Grosjean2 { alpha: Real },
}

impl Family {
    pub(crate) fn b_with<T: Field>(&self, n: usize, get: impl Fn(&Real) -> Option<T>) -> Option<T> {
        let nn = T::from_int(n as i64);
        Some(match self {
            Family::Constant { b, .. } => get(b)?,
            Family::Chebyshev(kind) => match (kind, n) {
                (ChebyshevKind::V, 0) => T::from_ratio(-1, 2),
                (ChebyshevKind::W, 0) => T::from_ratio(1, 2),
                _ => T::zero(),
            },
            Family::Jacobi { alpha, beta } => {
                let (a, b) = (get(alpha)?, get(beta)?);
                let s = a.clone() + b.clone();
                let two = T::from_int(2);
                if n == 0 {
                    (b - a) / (s + two)
                } else {
                    let m = two.clone() * nn + s;
                    (b.clone() * b - a.clone() * a) / (m.clone() * (m + two))
                }
            }
            Family::Grosjean1 { alpha } => {
                let a = get(alpha)?;
                (T::from_int(2) * a + T::one()) / (T::from_int(4) * nn.clone() * nn - T::one())
            }
            Family::Grosjean2 { alpha } => {
                let a = get(alpha)?;
                let m = nn + T::one();
                (T::one() - T::from_int(2) * a) / (T::from_int(4) * m.clone() * m - T::one())
            }
        })
    }

    /// `a_n^2` for `n >= 1`.
    pub(crate) fn a2_with<T: Field>(
        &self,
        n: usize,
        get: impl Fn(&Real) -> Option<T>,
    ) -> Option<T> {
        debug_assert!(n >= 1);
        let nn = T::from_int(n as i64);
        let one = T::one();
        let two = T::from_int(2);
        let four = T::from_int(4);
        Some(match self {
            Family::Constant { a2, .. } => get(a2)?,
            Family::Chebyshev(kind) => match (kind, n) {
                (ChebyshevKind::T, 1) => T::from_ratio(1, 2),
                _ => T::from_ratio(1, 4),
            },
            Family::Jacobi { alpha, beta } => {
                let (a, b) = (get(alpha)?, get(beta)?);
                let s = a.clone() + b.clone();
                if n == 1 {
                    // Separate formula: the general one is 0/0 when alpha + beta = -1.
                    let d = two + s.clone();
                    four * (one.clone() + a) * (one.clone() + b)
                        / (d.clone() * d * (T::from_int(3) + s))
                } else {
                    let m = two * nn.clone() + s.clone();
                    four * nn.clone() * (nn.clone() + a) * (nn.clone() + b) * (nn + s)
                        / (m.clone() * m.clone() * (m.clone() * m - one))
                }
            }
            Family::Grosjean1 { alpha } => {
                let a = get(alpha)?;
                if n == 1 {
                    -two * a.clone() * (one + a)
                } else {
                    let d = two * nn.clone() - one.clone();
                    (nn.clone() + a.clone()) * (nn - one - a) / (d.clone() * d)
                }
            }
            Family::Grosjean2 { alpha } => {
                let a = get(alpha)?;
                let d = two * nn.clone() + one.clone();
                (nn.clone() + a.clone()) * (nn + one - a) / (d.clone() * d)
            }
        })
    }

    pub(crate) fn params(&self) -> Vec<&Real> {
        match self {
            Family::Constant { b, a2 } => vec![b, a2],
            Family::Chebyshev(_) => vec![],
            Family::Jacobi { alpha, beta } => vec![alpha, beta],
            Family::Grosjean1 { alpha } | Family::Grosjean2 { alpha } => vec![alpha],
        }
    }

    /// Jacobi parameters when the family is a Jacobi family.
    pub fn jacobi_params(&self) -> Option<(Real, Real)> {
        match self {
            Family::Chebyshev(kind) => Some(kind.jacobi_params()),
            Family::Jacobi { alpha, beta } => Some((alpha.clone(), beta.clone())),
            Family::Grosjean1 { alpha } => {
                let beta = match alpha.as_exact() {
                    Some(q) => Real::exact(-Rational::one() - q),
                    None => Real::approx(-1.0 - alpha.value()),
                };
                Some((alpha.clone(), beta))
            }
            Family::Grosjean2 { alpha } => {
                let beta = match alpha.as_exact() {
                    Some(q) => Real::exact(Rational::one() - q),
                    None => Real::approx(1.0 - alpha.value()),
                };
                Some((alpha.clone(), beta))
            }
            Family::Constant { b, a2 } => {
                let is_u = b.as_exact().is_some_and(|q| q.is_zero())
                    && a2
                        .as_exact()
                        .is_some_and(|q| *q == Rational::new(1.into(), 4.into()));
                is_u.then(|| ChebyshevKind::U.jacobi_params())
            }
        }
    }
}

fn check(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

/// Constant sequence `b_n = b`, `a_n^2 = a2`.
pub fn constant_coeffs(b: Real, a2: Real) -> Result<CoefficientSequence> {
    check(b.is_finite(), "b must be finite")?;
    check(a2.value() > 0.0, "a^2 must be positive")?;
    Ok(CoefficientSequence::from_family(Family::Constant { b, a2 }))
}

/// Monic Chebyshev polynomials of the second kind: `b = 0`, `a^2 = 1/4`.
pub fn chebyshev_u_constant() -> CoefficientSequence {
    CoefficientSequence::from_family(Family::Constant {
        b: Real::integer(0),
        a2: Real::ratio(1, 4),
    })
}

pub fn chebyshev_coeffs(kind: ChebyshevKind) -> CoefficientSequence {
    CoefficientSequence::from_family(Family::Chebyshev(kind))
}

/// Monic Jacobi polynomials `P_n^(alpha, beta)`, orthogonal on `[-1, 1]`.
pub fn jacobi_coeffs(alpha: Real, beta: Real) -> Result<CoefficientSequence> {
    check(
        alpha.value() > -1.0 && beta.value() > -1.0,
        "Jacobi parameters must exceed -1",
    )?;
    Ok(CoefficientSequence::from_family(Family::Jacobi {
        alpha,
        beta,
    }))
}

/// Grosjean polynomials of the first kind `G_n^alpha`, `-1 < alpha < 0`.
///
/// `a_1^2 = -2 alpha (1 + alpha)`; the quadratic-ratio formula for `a_n^2`
/// applies from `n = 2` on.
pub fn grosjean1_coeffs(alpha: Real) -> Result<CoefficientSequence> {
    check(
        alpha.value() > -1.0 && alpha.value() < 0.0,
        "first-kind Grosjean needs -1 < alpha < 0",
    )?;
    Ok(CoefficientSequence::from_family(Family::Grosjean1 {
        alpha,
    }))
}

/// Grosjean polynomials of the second kind `g_n^alpha`, `-1 < alpha < 2`.
pub fn grosjean2_coeffs(alpha: Real) -> Result<CoefficientSequence> {
    check(
        alpha.value() > -1.0 && alpha.value() < 2.0,
        "second-kind Grosjean needs -1 < alpha < 2",
    )?;
    Ok(CoefficientSequence::from_family(Family::Grosjean2 {
        alpha,
    }))
}

/// Probability density of `G_n^alpha` on `(-1, 1)`.
pub fn grosjean1_weight(alpha: f64, x: f64) -> Result<f64> {
    check(
        alpha > -1.0 && alpha < 0.0,
        "first-kind Grosjean needs -1 < alpha < 0",
    )?;
    if x.abs() >= 1.0 || x.is_nan() {
        return Err(Error::OutOfDomain {
            x,
            what: "grosjean1_weight",
        });
    }
    Ok(grosjean1_weight_factors(alpha, 1.0 - x, 1.0 + x))
}

/// [`grosjean1_weight`] from precomputed `1 - x` and `1 + x`, for points
/// so close to an endpoint that `x` itself rounds to `+-1`.
pub fn grosjean1_weight_factors(alpha: f64, one_minus_x: f64, one_plus_x: f64) -> f64 {
    (-PI * alpha).sin() / PI * (one_minus_x / one_plus_x).powf(alpha) / one_plus_x
}

/// Probability density of `g_n^alpha` on `(-1, 1)`.
///
/// This is half of `sin(pi a)/(a (1-a) pi) ((1-x)/(1+x))^a (1+x)`, whose total
/// mass is 2. At `alpha = 1/2` it is the Chebyshev-U weight `(2/pi) sqrt(1-x^2)`.
pub fn grosjean2_weight(alpha: f64, x: f64) -> Result<f64> {
    check(
        alpha > -1.0 && alpha < 2.0,
        "second-kind Grosjean needs -1 < alpha < 2",
    )?;
    if x.abs() >= 1.0 || x.is_nan() {
        return Err(Error::OutOfDomain {
            x,
            what: "grosjean2_weight",
        });
    }
    Ok(grosjean2_weight_factors(alpha, 1.0 - x, 1.0 + x))
}

/// [`grosjean2_weight`] from precomputed `1 - x` and `1 + x`.
pub fn grosjean2_weight_factors(alpha: f64, one_minus_x: f64, one_plus_x: f64) -> f64 {
    // sin(pi a) / (a (1 - a)) has removable singularities at a = 0 and a = 1.
    let c = if alpha == 0.0 || alpha == 1.0 {
        PI
    } else {
        (PI * alpha).sin() / (alpha * (1.0 - alpha))
    };
    c / (2.0 * PI) * (one_minus_x / one_plus_x).powf(alpha) * one_plus_x
}

/// Grosjean kind selector for [`classical_operator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrosjeanKind {
    First,
    Second,
}

/// `sigma D^2 + tau D + lambda_n`, annihilating the degree-`n` member.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalOperator {
    pub sigma: DensePolynomial,
    pub tau: DensePolynomial,
    pub lambda: Rational,
    pub n: usize,
}

impl ClassicalOperator {
    /// `lambda_n = -n[(n-1) sigma'' + 2 tau'] / 2` for the given `n`.
    pub fn eigenvalue_for(sigma: &DensePolynomial, tau: &DensePolynomial, n: usize) -> Rational {
        let nn = Rational::from_integer((n as i64).into());
        let s2 = sigma.nth_derivative(2).coeff(0);
        let t1 = tau.derivative().coeff(0);
        -(nn.clone() * ((nn - Rational::one()) * s2 + Rational::from_integer(2.into()) * t1))
            / Rational::from_integer(2.into())
    }

    /// Operator for the Jacobi family `(alpha, beta)`:
    /// `sigma = 1 - x^2`, `tau = beta - alpha - (alpha + beta + 2) x`.
    pub fn jacobi(alpha: &Rational, beta: &Rational, n: usize) -> Self {
        let sigma = DensePolynomial::from_ints(&[1, 0, -1]);
        let two = Rational::from_integer(2.into());
        let tau = DensePolynomial::new(vec![beta - alpha, -(alpha + beta + two)]);
        let lambda = Self::eigenvalue_for(&sigma, &tau, n);
        ClassicalOperator {
            sigma,
            tau,
            lambda,
            n,
        }
    }

    /// `sigma'' - 2 tau'`, which vanishes for first-kind Grosjean bases.
    pub fn inhomogeneity(&self) -> Rational {
        self.sigma.nth_derivative(2).coeff(0)
            - Rational::from_integer(2.into()) * self.tau.derivative().coeff(0)
    }
}

/// `L_{G,alpha,n} = (1-x^2) D^2 + (-1-2 alpha - x) D + n^2` (first kind) or
/// `L_{g,alpha,n} = (1-x^2) D^2 + (1-2 alpha - 3x) D + n(n+2)` (second kind).
pub fn classical_operator(kind: GrosjeanKind, alpha: &Real, n: usize) -> Result<ClassicalOperator> {
    let a = alpha.as_exact().ok_or(Error::NotExact)?;
    match kind {
        GrosjeanKind::First => {
            grosjean1_coeffs(alpha.clone())?;
            Ok(ClassicalOperator::jacobi(a, &(-Rational::one() - a), n))
        }
        GrosjeanKind::Second => {
            grosjean2_coeffs(alpha.clone())?;
            Ok(ClassicalOperator::jacobi(a, &(Rational::one() - a), n))
        }
    }
}

/// Classical operator of a sequence that is a plain (unshifted, unextended)
/// Jacobi-type family, for degree `n`.
pub fn classical_operator_of(seq: &CoefficientSequence, n: usize) -> Result<ClassicalOperator> {
    let family = seq.plain_family().ok_or_else(|| {
        Error::UnsupportedBase("shifted or extended sequences have no classical operator".into())
    })?;
    let (alpha, beta) = family
        .jacobi_params()
        .ok_or_else(|| Error::UnsupportedBase("family is not of Jacobi type".into()))?;
    let (a, b) = (
        alpha.as_exact().ok_or(Error::NotExact)?,
        beta.as_exact().ok_or(Error::NotExact)?,
    );
    Ok(ClassicalOperator::jacobi(a, b, n))
}

/// Leading term of `sqrt(n pi) P_n^(alpha,beta)(cos theta)` (standard Jacobi
/// normalization) for large `n`, uniformly on closed subintervals of `(0, pi)`.
pub fn darboux_asymptotic(alpha: f64, beta: f64, n: usize, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::OutOfDomain {
            x: theta,
            what: "darboux_asymptotic (theta)",
        });
    }
    let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let phase = (n as f64 + (alpha + beta + 1.0) / 2.0) * theta - (alpha + 0.5) * PI / 2.0;
    Ok(s.powf(-alpha - 0.5) * c.powf(-beta - 0.5) * phase.cos())
}

/// Zeros of the degree-`n` Chebyshev-T polynomial in increasing order.
pub fn chebyshev_t_zeros(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| -((2 * j - 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// Zeros of the degree-`n` Chebyshev-U polynomial in increasing order.
pub fn chebyshev_u_zeros(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| -(j as f64 * PI / (n + 1) as f64).cos())
        .collect()
}
