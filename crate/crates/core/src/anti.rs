//! Upward extension of a Jacobi matrix.
//!
//! `r` new rows and columns are prepended: diagonal entries
//! `b_{-r}, ..., b_{-1}` and squared off-diagonals `a_{-r+1}^2, ..., a_0^2`.
//! The resulting monic polynomials `P^(-r)_m` coincide with the finite-block
//! polynomials `Q_m` for `m <= r` and beyond that satisfy
//!
//! ```text
//! P^(-r)_{n+r} = Q_r P_n - a_0^2 Q_{r-1} P^(1)_{n-1}
//! p^(-r)_{n+r} = q_r p_n - (a_0 / a_1) q_{r-1} p^(1)_{n-1}     (orthonormal)
//! ```

use crate::error::{Error, Result};
use crate::poly::DensePolynomial;
use crate::recurrence::{eval_monic, eval_orthonormal, CoefficientSequence, EvaluationVector};
use crate::scalar::Real;
use crate::Rational;

/// The `2r` parameters of an upward extension.
///
/// Both vectors are ordered most-negative index first, matching the matrix
/// read top-down: `b = [b_{-r}, ..., b_{-1}]`, `a2 = [a_{-r+1}^2, ..., a_0^2]`.
/// The last `a2` entry couples the new block to the original matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionParams {
    b: Vec<Real>,
    a2: Vec<Real>,
}

impl ExtensionParams {
    pub fn new(b: Vec<Real>, a2: Vec<Real>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidParameter(
                "extension order r must be positive".into(),
            ));
        }
        if b.len() != a2.len() {
            return Err(Error::InvalidParameter(format!(
                "extension needs r diagonal and r off-diagonal entries, got {} and {}",
                b.len(),
                a2.len()
            )));
        }
        if let Some(v) = b.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "extension entry b = {v} is not finite"
            )));
        }
        if let Some(v) = a2.iter().find(|v| !(v.value() > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "extension entry a^2 = {v} must be positive"
            )));
        }
        Ok(ExtensionParams { b, a2 })
    }

    /// Convenience constructor from floats (approximate parameters).
    pub fn from_f64(b: &[f64], a2: &[f64]) -> Result<Self> {
        Self::new(
            b.iter().map(|&v| Real::approx(v)).collect(),
            a2.iter().map(|&v| Real::approx(v)).collect(),
        )
    }

    pub fn r(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &[Real] {
        &self.b
    }

    pub fn a2(&self) -> &[Real] {
        &self.a2
    }

    /// `a_0^2`, the coupling to the original matrix.
    pub fn a0_squared(&self) -> &Real {
        self.a2.last().expect("r >= 1")
    }

    pub fn a0(&self) -> f64 {
        self.a0_squared().value().sqrt()
    }

    pub fn is_exact(&self) -> bool {
        self.b.iter().chain(&self.a2).all(Real::is_exact)
    }

    /// Drops the first `k` rows, leaving an extension of order `r - k`
    /// (`None` when nothing is left).
    pub fn without_first(&self, k: usize) -> Option<Self> {
        (k < self.r()).then(|| ExtensionParams {
            b: self.b[k..].to_vec(),
            a2: self.a2[k..].to_vec(),
        })
    }

    /// Same parameters with `a_0^2` replaced.
    pub fn with_a0_squared(&self, a0_squared: Real) -> Result<Self> {
        let mut a2 = self.a2.clone();
        *a2.last_mut().expect("r >= 1") = a0_squared;
        Self::new(self.b.clone(), a2)
    }

    /// Monic `Q_0(x), ..., Q_r(x)`.
    pub fn q_monic(&self, x: f64) -> Vec<f64> {
        let r = self.r();
        let mut out = Vec::with_capacity(r + 1);
        out.push(1.0);
        let (mut prev, mut cur) = (0.0, 1.0);
        for n in 0..r {
            let a2 = if n == 0 { 0.0 } else { self.a2[n - 1].value() };
            let next = (x - self.b[n].value()) * cur - a2 * prev;
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }

    /// Orthonormal `q_n = Q_n / (a_{-r+1} ... a_{-r+n})`, `n = 0..=r`.
    pub fn q_orthonormal(&self, x: f64) -> Vec<f64> {
        let mut q = self.q_monic(x);
        let mut norm = 1.0;
        for (qn, a2) in q[1..].iter_mut().zip(&self.a2) {
            norm *= a2.value().sqrt();
            *qn /= norm;
        }
        q
    }
}

/// Exact `Q_0, ..., Q_r` for the prepended finite block.
#[derive(Debug, Clone, PartialEq)]
pub struct QLadder {
    pub polys: Vec<DensePolynomial>,
    /// `(a_{-r+1} ... a_{-r+n})^2`, the squared normalizers of `q_n`.
    pub norms_squared: Vec<Rational>,
}

impl QLadder {
    pub fn r(&self) -> usize {
        self.polys.len() - 1
    }

    /// `Q_r` and `Q_{r-1}` have no common zero.
    pub fn consecutive_coprime(&self) -> bool {
        let r = self.r();
        !self.polys[r]
            .resultant(&self.polys[r - 1])
            .eq(&Rational::from_integer(0.into()))
    }
}

/// `Q_{n+1} = (x - b_{-r+n}) Q_n - a_{-r+n}^2 Q_{n-1}` for `n <= r - 1`.
pub fn q_ladder(params: &ExtensionParams) -> Result<QLadder> {
    let r = params.r();
    let mut polys = vec![DensePolynomial::one()];
    let mut norms = vec![Rational::from_integer(1.into())];
    let mut prev = DensePolynomial::zero();
    for n in 0..r {
        let b = params.b[n].as_exact().ok_or(Error::NotExact)?;
        let cur = polys.last().expect("nonempty").clone();
        let mut next = &DensePolynomial::linear_root(b) * &cur;
        if n > 0 {
            let a2 = params.a2[n - 1].as_exact().ok_or(Error::NotExact)?;
            next = &next - &prev.scale(a2);
        }
        let a2n = params.a2[n].as_exact().ok_or(Error::NotExact)?;
        norms.push(norms.last().expect("nonempty") * a2n);
        prev = cur;
        polys.push(next);
    }
    Ok(QLadder {
        polys,
        norms_squared: norms,
    })
}

/// The Jacobi matrix pushed down by `r` with the new block on top.
/// `shift(extend(seq, params), r) == seq`.
pub fn extend(seq: &CoefficientSequence, params: &ExtensionParams) -> CoefficientSequence {
    seq.prepended(&params.b, &params.a2)
}

/// `P^(-r)_{n+r}(x)` from `Q_r P_n - a_0^2 Q_{r-1} P^(1)_{n-1}`.
pub fn eval_anti_closed(
    seq: &CoefficientSequence,
    params: &ExtensionParams,
    n: usize,
    x: f64,
) -> Result<f64> {
    Ok(*anti_closed_monic(seq, params, n, x)?
        .values
        .last()
        .expect("nonempty"))
}

/// `P^(-r)_m(x)` by running the recurrence of the extended sequence.
pub fn eval_anti_direct(
    seq: &CoefficientSequence,
    params: &ExtensionParams,
    m: usize,
    x: f64,
) -> Result<f64> {
    Ok(eval_monic(&extend(seq, params), m, x)?.last())
}

/// `p^(-r)_{n+r}(x)` from the orthonormal closed form.
pub fn eval_anti_orthonormal(
    seq: &CoefficientSequence,
    params: &ExtensionParams,
    n: usize,
    x: f64,
) -> Result<f64> {
    Ok(*anti_closed_orthonormal(seq, params, n, x)?
        .values
        .last()
        .expect("nonempty"))
}

/// All monic values `P^(-r)_0(x), ..., P^(-r)_{n+r}(x)` via the closed form
/// (the first `r + 1` are `Q_0, ..., Q_r`).
pub fn anti_closed_monic(
    seq: &CoefficientSequence,
    params: &ExtensionParams,
    n: usize,
    x: f64,
) -> Result<EvaluationVector> {
    let r = params.r();
    let q = params.q_monic(x);
    let p = eval_monic(seq, n, x)?;
    let p1 = if n > 0 {
        Some(eval_monic(&seq.shifted(1), n - 1, x)?)
    } else {
        None
    };
    let a02 = params.a0_squared().value();
    let mut values = q[..r].to_vec();
    for k in 0..=n {
        let assoc = if k == 0 {
            0.0
        } else {
            p1.as_ref().expect("n > 0").values[k - 1]
        };
        values.push(q[r] * p.values[k] - a02 * q[r - 1] * assoc);
    }
    Ok(EvaluationVector { x, values })
}

/// All orthonormal values `p^(-r)_0(x), ..., p^(-r)_{n+r}(x)` via the closed form.
pub fn anti_closed_orthonormal(
    seq: &CoefficientSequence,
    params: &ExtensionParams,
    n: usize,
    x: f64,
) -> Result<EvaluationVector> {
    let r = params.r();
    let q = params.q_orthonormal(x);
    let p = eval_orthonormal(seq, n, x)?;
    let p1 = if n > 0 {
        Some(eval_orthonormal(&seq.shifted(1), n - 1, x)?)
    } else {
        None
    };
    let ratio = params.a0() / seq.a(1);
    let mut values = q[..r].to_vec();
    for k in 0..=n {
        let assoc = if k == 0 {
            0.0
        } else {
            p1.as_ref().expect("n > 0").values[k - 1]
        };
        values.push(q[r] * p.values[k] - ratio * q[r - 1] * assoc);
    }
    Ok(EvaluationVector { x, values })
}

/// Checks `[P^(-r)]^(k) = P^(k-r)`: the associated polynomials of order `k`
/// of the extended family are the extension built from the last `r - k`
/// parameters (the base family itself when `k = r`). Compares the
/// coefficient streams over the first `n + r` indices and the values at `x`.
pub fn shift_identity_check(
    seq: &CoefficientSequence,
    params: &ExtensionParams,
    k: usize,
    n: usize,
    x: f64,
) -> Result<bool> {
    let r = params.r();
    if k > r {
        return Err(Error::InvalidParameter(format!(
            "shift order {k} exceeds extension order {r}"
        )));
    }
    let lhs = extend(seq, params).shifted(k);
    let rhs = match params.without_first(k) {
        Some(p) => extend(seq, &p),
        None => seq.clone(),
    };
    let m = n + r;
    let exact = lhs.is_exact() && rhs.is_exact();
    for i in 0..=m {
        let same = if exact {
            lhs.b_exact(i)? == rhs.b_exact(i)? && lhs.a2_exact(i)? == rhs.a2_exact(i)?
        } else {
            lhs.b(i) == rhs.b(i) && lhs.a2(i) == rhs.a2(i)
        };
        if !same {
            return Ok(false);
        }
    }
    let a = eval_monic(&lhs, m - k, x)?;
    let b = eval_monic(&rhs, m - k, x)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .all(|(u, v)| (u - v).abs() <= 1e-12 * v.abs().max(1.0)))
}

/// Exact `P^(-r)_0, ..., P^(-r)_m` from the extended recurrence.
pub fn expand_anti_all(
    seq: &CoefficientSequence,
    params: &ExtensionParams,
    m: usize,
) -> Result<Vec<DensePolynomial>> {
    crate::recurrence::expand_monic_all(&extend(seq, params), m)
}
