//! Recurrence-coefficient streams and polynomial evaluation.
//!
//! Monic polynomials follow `P_{n+1} = (x - b_n) P_n - a_n^2 P_{n-1}` with
//! `P_{-1} = 0`, `P_0 = 1`. The orthonormal ones are `p_n = gamma_n P_n`
//! with `gamma_n = (a_1 ... a_n)^{-1}`.

use num::Zero;

use crate::error::{Error, Result};
use crate::families::Family;
use crate::poly::DensePolynomial;
use crate::scalar::{is_positive, Real};
use crate::Rational;

/// Largest degree accepted by the floating-point evaluators.
pub const MAX_DEGREE: usize = 1_000_000;

/// An infinite stream of recurrence coefficients `(b_n, a_n^2)`.
///
/// It is a base [`Family`] read from index `offset` onwards, with an optional
/// block of prepended coefficients (the upward extension). For a head of
/// length `h`, `b(i) = head_b[i]` for `i < h` and `a2(i) = head_a2[i - 1]`
/// for `1 <= i <= h`; past the head the family takes over.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    family: Family,
    offset: usize,
    head_b: Vec<Real>,
    head_a2: Vec<Real>,
}

impl CoefficientSequence {
    pub(crate) fn from_family(family: Family) -> Self {
        CoefficientSequence {
            family,
            offset: 0,
            head_b: Vec::new(),
            head_a2: Vec::new(),
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// The family itself when nothing was shifted off or prepended.
    pub fn plain_family(&self) -> Option<&Family> {
        (self.offset == 0 && self.head_b.is_empty()).then_some(&self.family)
    }

    pub fn head_len(&self) -> usize {
        self.head_b.len()
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    #[inline]
    pub fn b(&self, n: usize) -> f64 {
        match self.head_b.get(n) {
            Some(v) => v.value(),
            None => {
                let i = n - self.head_b.len() + self.offset;
                self.family
                    .b_with(i, |r| Some(r.value()))
                    .unwrap_or(f64::NAN)
            }
        }
    }

    /// `a_n^2`; zero for `n = 0`.
    #[inline]
    pub fn a2(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self.head_a2.get(n - 1) {
            Some(v) => v.value(),
            None => {
                let i = n - self.head_a2.len() + self.offset;
                self.family
                    .a2_with(i, |r| Some(r.value()))
                    .unwrap_or(f64::NAN)
            }
        }
    }

    #[inline]
    pub fn a(&self, n: usize) -> f64 {
        self.a2(n).sqrt()
    }

    pub fn is_exact(&self) -> bool {
        self.family.params().iter().all(|r| r.is_exact())
            && self
                .head_b
                .iter()
                .chain(&self.head_a2)
                .all(|r| r.is_exact())
    }

    pub fn b_exact(&self, n: usize) -> Result<Rational> {
        match self.head_b.get(n) {
            Some(v) => v.as_exact().cloned().ok_or(Error::NotExact),
            None => {
                let i = n - self.head_b.len() + self.offset;
                self.family
                    .b_with(i, |r| r.as_exact().cloned())
                    .ok_or(Error::NotExact)
            }
        }
    }

    pub fn a2_exact(&self, n: usize) -> Result<Rational> {
        if n == 0 {
            return Ok(Rational::zero());
        }
        match self.head_a2.get(n - 1) {
            Some(v) => v.as_exact().cloned().ok_or(Error::NotExact),
            None => {
                let i = n - self.head_a2.len() + self.offset;
                self.family
                    .a2_with(i, |r| r.as_exact().cloned())
                    .ok_or(Error::NotExact)
            }
        }
    }

    /// Deletes the first `r` rows and columns of the Jacobi matrix.
    pub fn shifted(&self, r: usize) -> Self {
        let h = self.head_b.len();
        if r <= h {
            CoefficientSequence {
                family: self.family.clone(),
                offset: self.offset,
                head_b: self.head_b[r..].to_vec(),
                head_a2: self.head_a2[r..].to_vec(),
            }
        } else {
            CoefficientSequence {
                family: self.family.clone(),
                offset: self.offset + r - h,
                head_b: Vec::new(),
                head_a2: Vec::new(),
            }
        }
    }

    /// Prepends rows: `b` holds the new diagonal entries top-down and `a2`
    /// the new squared off-diagonals, the last one coupling to the old matrix.
    pub(crate) fn prepended(&self, b: &[Real], a2: &[Real]) -> Self {
        debug_assert_eq!(b.len(), a2.len());
        CoefficientSequence {
            family: self.family.clone(),
            offset: self.offset,
            head_b: b.iter().chain(&self.head_b).cloned().collect(),
            head_a2: a2.iter().chain(&self.head_a2).cloned().collect(),
        }
    }

    /// Checks positivity and finiteness of the first `n` coefficients.
    pub fn validate_prefix(&self, n: usize) -> Result<()> {
        for k in 0..n {
            if !self.b(k).is_finite() {
                return Err(Error::InvalidParameter(format!("b_{k} is not finite")));
            }
            let a2 = self.a2(k + 1);
            if !(a2 > 0.0 && a2.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "a_{}^2 = {a2} is not positive",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

/// `shift(seq, r)`: the sequence of the associated polynomials of order `r`.
pub fn shift(seq: &CoefficientSequence, r: usize) -> CoefficientSequence {
    seq.shifted(r)
}

/// Values `[v_0(x), ..., v_n(x)]` of a polynomial family at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationVector {
    pub x: f64,
    pub values: Vec<f64>,
}

impl EvaluationVector {
    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn last(&self) -> f64 {
        *self
            .values
            .last()
            .expect("evaluation vectors are never empty")
    }
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        Err(Error::DegreeTooLarge {
            degree: n,
            cap: MAX_DEGREE,
        })
    } else {
        Ok(())
    }
}

fn finish(x: f64, values: Vec<f64>) -> Result<EvaluationVector> {
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { degree: k, x });
    }
    Ok(EvaluationVector { x, values })
}

/// Monic `P_0(x), ..., P_n(x)`.
pub fn eval_monic(seq: &CoefficientSequence, n: usize, x: f64) -> Result<EvaluationVector> {
    check_degree(n)?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(1.0);
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = (x - seq.b(k)) * cur - seq.a2(k) * prev;
        prev = cur;
        cur = next;
        values.push(cur);
    }
    finish(x, values)
}

/// Orthonormal `p_0(x), ..., p_n(x)` from
/// `a_{k+1} p_{k+1} = (x - b_k) p_k - a_k p_{k-1}`.
pub fn eval_orthonormal(seq: &CoefficientSequence, n: usize, x: f64) -> Result<EvaluationVector> {
    check_degree(n)?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(1.0);
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut a_k = 0.0;
    for k in 0..n {
        let a_next = seq.a(k + 1);
        let next = ((x - seq.b(k)) * cur - a_k * prev) / a_next;
        prev = cur;
        cur = next;
        a_k = a_next;
        values.push(cur);
    }
    finish(x, values)
}

/// Orthonormal values together with their `x`-derivatives.
pub fn eval_orthonormal_with_derivative(
    seq: &CoefficientSequence,
    n: usize,
    x: f64,
) -> Result<(EvaluationVector, Vec<f64>)> {
    check_degree(n)?;
    let mut values = Vec::with_capacity(n + 1);
    let mut derivs = Vec::with_capacity(n + 1);
    values.push(1.0);
    derivs.push(0.0);
    let (mut p0, mut p1) = (0.0, 1.0);
    let (mut d0, mut d1) = (0.0, 0.0);
    let mut a_k = 0.0;
    for k in 0..n {
        let a_next = seq.a(k + 1);
        let shifted = x - seq.b(k);
        let p2 = (shifted * p1 - a_k * p0) / a_next;
        let d2 = (p1 + shifted * d1 - a_k * d0) / a_next;
        (p0, p1, d0, d1) = (p1, p2, d1, d2);
        a_k = a_next;
        values.push(p1);
        derivs.push(d1);
    }
    let ev = finish(x, values)?;
    if let Some(k) = derivs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { degree: k, x });
    }
    Ok((ev, derivs))
}

/// Monic associated polynomials of order `r`: `eval_monic(shift(seq, r), n, x)`.
pub fn eval_associated(
    seq: &CoefficientSequence,
    r: usize,
    n: usize,
    x: f64,
) -> Result<EvaluationVector> {
    eval_monic(&seq.shifted(r), n, x)
}

/// Monic derivatives `P'_0(x), ..., P'_n(x)` from the differentiated recurrence
/// `P'_{k+1} = P_k + (x - b_k) P'_k - a_k^2 P'_{k-1}`.
pub fn eval_monic_derivative(
    seq: &CoefficientSequence,
    n: usize,
    x: f64,
) -> Result<EvaluationVector> {
    let p = eval_monic(seq, n, x)?;
    let mut d = Vec::with_capacity(n + 1);
    d.push(0.0);
    let (mut prev, mut cur) = (0.0, 0.0);
    for k in 0..n {
        let next = p.values[k] + (x - seq.b(k)) * cur - seq.a2(k) * prev;
        prev = cur;
        cur = next;
        d.push(cur);
    }
    finish(x, d)
}

/// Exact monic polynomials `P_0, ..., P_n`.
pub fn expand_monic_all(seq: &CoefficientSequence, n: usize) -> Result<Vec<DensePolynomial>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(DensePolynomial::one());
    let mut prev = DensePolynomial::zero();
    for k in 0..n {
        let b = seq.b_exact(k)?;
        let a2 = seq.a2_exact(k)?;
        let cur = out.last().expect("nonempty");
        let next = &(&DensePolynomial::linear_root(&b) * cur) - &prev.scale(&a2);
        prev = cur.clone();
        out.push(next);
    }
    Ok(out)
}

/// Exact monic `P_n`; requires exact coefficients.
pub fn expand_monic(seq: &CoefficientSequence, n: usize) -> Result<DensePolynomial> {
    Ok(expand_monic_all(seq, n)?.pop().expect("nonempty"))
}

/// `gamma_n = (a_1 ... a_n)^{-1}`.
pub fn gamma(seq: &CoefficientSequence, n: usize) -> f64 {
    (1..=n).fold(1.0, |g, k| g / seq.a(k))
}

/// `gamma_n^(1) = a_1 gamma_n`, the normalization of `P^(1)_{n-1}`.
pub fn gamma1(seq: &CoefficientSequence, n: usize) -> f64 {
    seq.a(1) * gamma(seq, n)
}

/// `gamma_n^2 = (a_1^2 ... a_n^2)^{-1}` in exact arithmetic.
pub fn gamma_squared_exact(seq: &CoefficientSequence, n: usize) -> Result<Rational> {
    let mut g = Rational::from_integer(1.into());
    for k in 1..=n {
        let a2 = seq.a2_exact(k)?;
        if !is_positive(&a2) {
            return Err(Error::InvalidParameter(format!("a_{k}^2 is not positive")));
        }
        g /= a2;
    }
    Ok(g)
}

/// Christoffel function `lambda_n(x) = (sum_{j<=n} p_j(x)^2)^{-1}`.
pub fn christoffel(seq: &CoefficientSequence, n: usize, x: f64) -> Result<f64> {
    let p = eval_orthonormal(seq, n, x)?;
    Ok(1.0 / p.values.iter().map(|v| v * v).sum::<f64>())
}

/// `sum_{k=1}^n p_k(x) p^(1)_{k-1}(x)` computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedSum {
    /// Direct summation.
    pub direct: f64,
    /// `a_{n+1} [p'_{n+1} p^(1)_{n-1} - p'_n p^(1)_n]`.
    pub darboux: f64,
}

pub fn mixed_sum(seq: &CoefficientSequence, n: usize, x: f64) -> Result<MixedSum> {
    if n == 0 {
        return Err(Error::InvalidParameter("mixed_sum needs n >= 1".into()));
    }
    let (p, dp) = eval_orthonormal_with_derivative(seq, n + 1, x)?;
    let p1 = eval_orthonormal(&seq.shifted(1), n, x)?;
    let direct = (1..=n).map(|k| p.values[k] * p1.values[k - 1]).sum();
    let darboux = seq.a(n + 1) * (dp[n + 1] * p1.values[n - 1] - dp[n] * p1.values[n]);
    Ok(MixedSum { direct, darboux })
}

/// Partial sum `sum_{k=0}^{N} (|1 - 4 a_{k+1}^2| + 2 |b_k|)`.
pub fn trace_class_score(seq: &CoefficientSequence, n: usize) -> f64 {
    (0..=n)
        .map(|k| (1.0 - 4.0 * seq.a2(k + 1)).abs() + 2.0 * seq.b(k).abs())
        .sum()
}
