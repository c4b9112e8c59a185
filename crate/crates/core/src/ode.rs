//! Differential equations for anti-associated polynomials, in exact rational
//! arithmetic.
//!
//! For a classical base `L_2 P_n = sigma P_n'' + tau P_n' + lambda P_n = 0`
//! and `y = P^(-r)_{n+r} = Q_r P_n + B P^(1)_{n-1}` with `B = -a_0^2 Q_{r-1}`,
//! the operator `R_2` removes the associated polynomial:
//! `R_2 y = M_0 P_n + N_0 P_n'`. Differentiating twice (each time multiplied
//! by `sigma` and reduced with `L_2`) gives three linear forms in
//! `(P_n, P_n')`, and the vanishing 3x3 determinant is a fourth-order
//! equation for `y`.

use num::{One, Zero};

use crate::anti::{q_ladder, ExtensionParams};
use crate::error::{Error, Result};
use crate::families::{classical_operator_of, ClassicalOperator};
use crate::poly::DensePolynomial;
use crate::recurrence::CoefficientSequence;
use crate::Rational;

/// `c_k D^k + ... + c_1 D + c_0` with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyOperator {
    coeffs: Vec<DensePolynomial>,
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut b = Rational::one();
    for i in 0..k {
        b = b * Rational::from_integer(((n - i) as i64).into())
            / Rational::from_integer(((i + 1) as i64).into());
    }
    b
}

impl PolyOperator {
    /// Coefficients in ascending order of derivative; trailing zeros dropped.
    pub fn new(mut coeffs: Vec<DensePolynomial>) -> Self {
        while coeffs.last().is_some_and(DensePolynomial::is_zero) {
            coeffs.pop();
        }
        PolyOperator { coeffs }
    }

    pub fn zero() -> Self {
        PolyOperator { coeffs: Vec::new() }
    }

    pub fn identity() -> Self {
        PolyOperator::new(vec![DensePolynomial::one()])
    }

    /// Multiplication by `p` (an order-0 operator).
    pub fn multiplication(p: DensePolynomial) -> Self {
        PolyOperator::new(vec![p])
    }

    /// The operator `D`.
    pub fn d() -> Self {
        PolyOperator::new(vec![DensePolynomial::zero(), DensePolynomial::one()])
    }

    pub fn coeffs(&self) -> &[DensePolynomial] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> DensePolynomial {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn apply(&self, y: &DensePolynomial) -> DensePolynomial {
        let mut out = DensePolynomial::zero();
        let mut dy = y.clone();
        for c in &self.coeffs {
            out = &out + &(c * &dy);
            dy = dy.derivative();
        }
        out
    }

    /// `sum c_k(x) y^(k)(x)` at a rational point.
    pub fn residual_at(&self, y: &DensePolynomial, x: &Rational) -> Rational {
        let mut out = Rational::zero();
        let mut dy = y.clone();
        for c in &self.coeffs {
            out += c.eval(x) * dy.eval(x);
            dy = dy.derivative();
        }
        out
    }

    /// `p L`.
    pub fn left_mul(&self, p: &DensePolynomial) -> Self {
        PolyOperator::new(self.coeffs.iter().map(|c| p * c).collect())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        PolyOperator::new(self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    /// `self o other`.
    pub fn compose(&self, other: &Self) -> Self {
        // D^k (m_j D^j) = sum_i C(k, i) m_j^(k-i) D^(j+i)
        let len = match (self.order(), other.order()) {
            (Some(a), Some(b)) => a + b + 1,
            _ => return Self::zero(),
        };
        let mut out = vec![DensePolynomial::zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            for (j, m) in other.coeffs.iter().enumerate() {
                for i in 0..=k {
                    let term = (c * &m.nth_derivative(k - i)).scale(&binomial(k, i));
                    out[j + i] = &out[j + i] + &term;
                }
            }
        }
        PolyOperator::new(out)
    }

    /// `sigma D o self`.
    pub fn sigma_d(&self, sigma: &DensePolynomial) -> Self {
        let mut out = vec![DensePolynomial::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] = &out[k] + &(sigma * &c.derivative());
            out[k + 1] = &out[k + 1] + &(sigma * c);
        }
        PolyOperator::new(out)
    }

    /// Formal adjoint `y -> sum (-1)^k D^k (c_k y)`.
    pub fn formal_adjoint(&self) -> Self {
        let mut out = vec![DensePolynomial::zero(); self.coeffs.len()];
        for (k, c) in self.coeffs.iter().enumerate() {
            let sign = if k % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            for (i, slot) in out[..=k].iter_mut().enumerate() {
                *slot = &*slot + &c.nth_derivative(k - i).scale(&(binomial(k, i) * &sign));
            }
        }
        PolyOperator::new(out)
    }

    /// Divides out the common polynomial factor of all coefficients and
    /// makes the top coefficient monic.
    pub fn normalized(&self) -> Self {
        let Some(top) = self.coeffs.last() else {
            return Self::zero();
        };
        let g = self
            .coeffs
            .iter()
            .fold(DensePolynomial::zero(), |g, c| g.gcd(c));
        let reduced: Vec<DensePolynomial> = self
            .coeffs
            .iter()
            .map(|c| c.exact_div(&g).expect("gcd divides every coefficient"))
            .collect();
        let lead = top.exact_div(&g).expect("gcd divides top").leading();
        PolyOperator::new(
            reduced
                .iter()
                .map(|c| c.scale(&(Rational::one() / &lead)))
                .collect(),
        )
    }
}

impl std::ops::Add for &PolyOperator {
    type Output = PolyOperator;
    fn add(self, rhs: &PolyOperator) -> PolyOperator {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyOperator::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl std::ops::Sub for &PolyOperator {
    type Output = PolyOperator;
    fn sub(self, rhs: &PolyOperator) -> PolyOperator {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyOperator::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl std::fmt::Display for PolyOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c}) D"),
                _ => format!("({c}) D^{k}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `sigma D^2 + tau D + lambda_n`.
pub fn l2_operator(op: &ClassicalOperator) -> PolyOperator {
    PolyOperator::new(vec![
        DensePolynomial::constant(op.lambda.clone()),
        op.tau.clone(),
        op.sigma.clone(),
    ])
}

/// Formal adjoint of a second-order operator:
/// `c_2 D^2 + (2 c_2' - c_1) D + (c_2'' - c_1' + c_0)`.
pub fn adjoint(op: &PolyOperator) -> Result<PolyOperator> {
    match op.order() {
        Some(k) if k > 2 => Err(Error::InvalidParameter(format!(
            "adjoint expects order <= 2, got {k}"
        ))),
        _ => Ok(op.formal_adjoint()),
    }
}

/// `R_2 = sigma B^2 D^2 + [(2 sigma' - tau) B^2 - 2 sigma B B'] D
///      + 2 sigma B'^2 - sigma B B'' - B B' (2 sigma' - tau)
///      - [sigma'' (n^2 - n - 2)/2 + tau' (n + 1)] B^2`.
pub fn r2_operator(
    sigma: &DensePolynomial,
    tau: &DensePolynomial,
    n: usize,
    b: &DensePolynomial,
) -> Result<PolyOperator> {
    if b.is_zero() {
        return Err(Error::InvalidParameter("R_2 needs a nonzero B".into()));
    }
    let s1 = sigma.derivative();
    let s2 = sigma.nth_derivative(2).coeff(0);
    let t1 = tau.derivative().coeff(0);
    let b1 = b.derivative();
    let b2 = b1.derivative();
    let bb = b * b;
    let two = Rational::from_integer(2.into());
    let nn = Rational::from_integer((n as i64).into());
    let k = &(s1.scale(&two)) - tau; // 2 sigma' - tau

    let c2 = sigma * &bb;
    let c1 = &(&k * &bb) - &(sigma * &(b * &b1)).scale(&two);
    let lam = s2 * (&nn * &nn - &nn - &two) / &two + t1 * (nn + Rational::one());
    let c0 = &(&(&(sigma * &(&b1 * &b1)).scale(&two) - &(sigma * &(b * &b2))) - &(&(b * &b1) * &k))
        - &bb.scale(&lam);
    Ok(PolyOperator::new(vec![c0, c1, c2]))
}

/// Rewrites `e2 P'' + e1 P' + e0 P` as `M P + N P'` using
/// `sigma P'' = -tau P' - lambda P`. `e2` must be a multiple of `sigma`.
pub fn reduce_mod_l2(
    e2: &DensePolynomial,
    e1: &DensePolynomial,
    e0: &DensePolynomial,
    sigma: &DensePolynomial,
    tau: &DensePolynomial,
    lambda: &Rational,
) -> Result<(DensePolynomial, DensePolynomial)> {
    let s = e2.exact_div(sigma)?;
    let m = e0 - &s.scale(lambda);
    let n = e1 - &(tau * &s);
    Ok((m, n))
}

/// `sigma (M P + N P')' = (sigma M' - lambda N) P + (sigma (M + N') - tau N) P'`.
pub fn derive_chain(
    m: &DensePolynomial,
    n: &DensePolynomial,
    sigma: &DensePolynomial,
    tau: &DensePolynomial,
    lambda: &Rational,
) -> (DensePolynomial, DensePolynomial) {
    let m_next = &(sigma * &m.derivative()) - &n.scale(lambda);
    let n_next = &(sigma * &(m + &n.derivative())) - &(tau * n);
    (m_next, n_next)
}

/// Fourth-order operator annihilating `P^(-r)_{n+r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourthOrderOde {
    pub operator: PolyOperator,
    pub n: usize,
    pub r: usize,
    /// `(M_i, N_i)` for `i = 0, 1, 2`.
    pub chain: [(DensePolynomial, DensePolynomial); 3],
}

impl FourthOrderOde {
    /// `[c_0, ..., c_4]`.
    pub fn coeffs(&self) -> &[DensePolynomial] {
        self.operator.coeffs()
    }
}

fn determinant_operator(
    chain: &[(DensePolynomial, DensePolynomial); 3],
    inner: &PolyOperator,
    sigma: &DensePolynomial,
) -> PolyOperator {
    let [(m0, n0), (m1, n1), (m2, n2)] = chain;
    let d12 = &(m1 * n2) - &(m2 * n1);
    let d02 = &(m0 * n2) - &(m2 * n0);
    let d01 = &(m0 * n1) - &(m1 * n0);
    let once = inner.sigma_d(sigma);
    let twice = once.sigma_d(sigma);
    let sum = &inner.left_mul(&d12) - &once.left_mul(&d02);
    &sum + &twice.left_mul(&d01)
}

/// Exact parts shared by both constructions: `(Q_r, B = -a_0^2 Q_{r-1})`.
fn q_and_b(params: &ExtensionParams) -> Result<(DensePolynomial, DensePolynomial)> {
    let ladder = q_ladder(params)?;
    let r = ladder.r();
    let a02 = params.a0_squared().as_exact().ok_or(Error::NotExact)?;
    Ok((
        ladder.polys[r].clone(),
        ladder.polys[r - 1].scale(&-a02.clone()),
    ))
}

fn exact_jacobi_params(seq: &CoefficientSequence) -> Option<(Rational, Rational)> {
    let (a, b) = seq.plain_family()?.jacobi_params()?;
    Some((a.as_exact()?.clone(), b.as_exact()?.clone()))
}

fn minus_half_pair() -> (Rational, Rational) {
    let h = Rational::new((-1).into(), 2.into());
    (h.clone(), h)
}

/// Builds the fourth-order equation for a Jacobi-type base (first-kind
/// Grosjean or any plain Jacobi family with exact parameters).
pub fn fourth_order_ode(
    seq: &CoefficientSequence,
    params: &ExtensionParams,
    n: usize,
) -> Result<FourthOrderOde> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "fourth_order_ode needs n >= 1".into(),
        ));
    }
    let op = classical_operator_of(seq, n)?;
    if exact_jacobi_params(seq) == Some(minus_half_pair()) {
        return Err(Error::Degenerate(
            "Chebyshev-T base: P^(1)_{n-1} is a multiple of P_n', use second_order_ode".into(),
        ));
    }
    let (sigma, tau, lambda) = (&op.sigma, &op.tau, &op.lambda);
    let (q, b) = q_and_b(params)?;
    let r2 = r2_operator(sigma, tau, n, &b)?;
    let (c0, c1, c2) = (r2.coeff(0), r2.coeff(1), r2.coeff(2));

    // R_2 [Q P] collected by P'', P', P
    let q1 = q.derivative();
    let two = Rational::from_integer(2.into());
    let e2 = &c2 * &q;
    let e1 = &(&c2 * &q1).scale(&two) + &(&c1 * &q);
    let e0 = &(&(&c2 * &q1.derivative()) + &(&c1 * &q1)) + &(&c0 * &q);
    let (m0, mut n0) = reduce_mod_l2(&e2, &e1, &e0, sigma, tau, lambda)?;
    // R_2 [B P^(1)_{n-1}] = (sigma'' - 2 tau') B^3 P_n'
    let inhom = op.inhomogeneity();
    if !inhom.is_zero() {
        n0 = &n0 + &(&(&b * &b) * &b).scale(&inhom);
    }
    let (m1, n1) = derive_chain(&m0, &n0, sigma, tau, lambda);
    let (m2, n2) = derive_chain(&m1, &n1, sigma, tau, lambda);
    let chain = [(m0, n0), (m1, n1), (m2, n2)];
    let operator = determinant_operator(&chain, &r2, sigma).normalized();
    if operator.order() != Some(4) {
        return Err(Error::Degenerate(format!(
            "the determinant operator has order {:?}; use the second-order equation for this base",
            operator.order()
        )));
    }
    Ok(FourthOrderOde {
        operator,
        n,
        r: params.r(),
        chain,
    })
}

/// Second-order operator annihilating `P^(-r)_{n+r}` over a Chebyshev-T or
/// Chebyshev-U base, where `P^(1)_{n-1}` is itself a combination of `P_n`
/// and `P_n'`:
/// T: `P^(1)_{n-1} = t_n' / n`;
/// U: `u_{n-1} = 2 [(1 - x^2) u_n' + n x u_n] / (n + 1)`.
pub fn second_order_ode(
    seq: &CoefficientSequence,
    params: &ExtensionParams,
    n: usize,
) -> Result<PolyOperator> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "second_order_ode needs n >= 1".into(),
        ));
    }
    let family = exact_jacobi_params(seq).ok_or_else(|| {
        Error::UnsupportedBase("second-order equation needs a Chebyshev T or U base".into())
    })?;
    let half = Rational::new(1.into(), 2.into());
    let op = classical_operator_of(seq, n)?;
    let (q, b) = q_and_b(params)?;
    let nn = Rational::from_integer((n as i64).into());
    let (a0, b0) = if family == minus_half_pair() {
        (q, b.scale(&(Rational::one() / &nn)))
    } else if family == (half.clone(), half) {
        let c = Rational::from_integer(2.into()) / (&nn + Rational::one());
        let x = DensePolynomial::x();
        (
            &q + &(&b * &x).scale(&(&c * &nn)),
            (&b * &op.sigma).scale(&c),
        )
    } else {
        return Err(Error::UnsupportedBase(
            "second-order equation needs a Chebyshev T or U base".into(),
        ));
    };
    let (sigma, tau, lambda) = (&op.sigma, &op.tau, &op.lambda);
    let (m1, n1) = derive_chain(&a0, &b0, sigma, tau, lambda);
    let (m2, n2) = derive_chain(&m1, &n1, sigma, tau, lambda);
    let chain = [(a0, b0), (m1, n1), (m2, n2)];
    let operator = determinant_operator(&chain, &PolyOperator::identity(), sigma).normalized();
    if operator.order() != Some(2) {
        return Err(Error::Degenerate(format!(
            "second-order construction collapsed to order {:?}",
            operator.order()
        )));
    }
    Ok(operator)
}
