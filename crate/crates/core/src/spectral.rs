//! Truncated Jacobi matrices: Sturm-count bisection eigenvalues, Gauss rules
//! and polynomial zeros.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::recurrence::{eval_orthonormal_with_derivative, CoefficientSequence};

/// Default absolute accuracy of eigenvalues.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Symmetric tridiagonal matrix with diagonal `b_0..b_{N-1}` and positive
/// off-diagonal `a_1..a_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalN {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalN {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal matrix needs N >= 1 diagonal and N - 1 off-diagonal entries, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().any(|v| !v.is_finite())
            || offdiag.iter().any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::InvalidParameter(
                "tridiagonal entries must be finite with positive off-diagonal".into(),
            ));
        }
        Ok(TridiagonalN { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    fn off(&self, i: usize) -> f64 {
        // coupling between rows i-1 and i; zero outside the band
        if i == 0 || i > self.offdiag.len() {
            0.0
        } else {
            self.offdiag[i - 1]
        }
    }

    /// Interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, &b) in self.diag.iter().enumerate() {
            let rad = self.off(i) + self.off(i + 1);
            lo = lo.min(b - rad);
            hi = hi.max(b + rad);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    ///
    /// Uses the pivots of the `LDL^T` factorization of `T - x I`
    /// (`d_i = b_i - x - a_i^2 / d_{i-1}`), which never overflow, so the
    /// count is exact in the sense of Sylvester's law of inertia.
    pub fn sturm_count(&self, x: f64) -> usize {
        let scale = self.offdiag.iter().fold(1.0f64, |m, &a| m.max(a * a));
        let pivmin = f64::MIN_POSITIVE * scale;
        let mut count = 0;
        let mut d = 1.0;
        for (i, &b) in self.diag.iter().enumerate() {
            let e = self.off(i);
            d = if i == 0 { b - x } else { (b - x) - e * e / d };
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) to absolute accuracy `tol`.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue index {k} out of range for N = {}",
                self.len()
            )));
        }
        check_tol(tol)?;
        let (mut lo, mut hi) = self.gershgorin();
        let pad = tol.max(f64::EPSILON * lo.abs().max(hi.abs()));
        lo -= pad;
        hi += pad;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// All eigenvalues in increasing order.
    pub fn eigenvalues(&self, tol: f64) -> Result<Vec<f64>> {
        self.eigenvalues_with(tol, Execution::default())
    }

    pub fn eigenvalues_with(&self, tol: f64, exec: Execution) -> Result<Vec<f64>> {
        check_tol(tol)?;
        let mut out = exec
            .map_range(self.len(), |k| self.eigenvalue(k, tol))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        // bisection per index is monotone already; sorting guards ties within tol
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// Eigenvalues below `lower` and above `upper`, found without computing
    /// the rest of the spectrum.
    pub fn outliers(&self, lower: f64, upper: f64, tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let below = self.sturm_count(lower);
        let above_start = self.sturm_count(upper);
        let left = (0..below)
            .map(|k| self.eigenvalue(k, tol))
            .collect::<Result<Vec<_>>>()?;
        let right = (above_start..self.len())
            .map(|k| self.eigenvalue(k, tol))
            .collect::<Result<Vec<_>>>()?;
        // eigenvalues equal to `upper` itself are not outliers
        Ok((left, right.into_iter().filter(|&v| v > upper).collect()))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// Leading `N x N` block of the symmetric Jacobi matrix.
pub fn truncate(seq: &CoefficientSequence, n: usize) -> Result<TridiagonalN> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "truncation size must be at least 1".into(),
        ));
    }
    seq.validate_prefix(n)?;
    TridiagonalN::new(
        (0..n).map(|i| seq.b(i)).collect(),
        (1..n).map(|i| seq.a(i)).collect(),
    )
}

/// Zeros of the monic `P_n`, increasing.
pub fn zeros(seq: &CoefficientSequence, n: usize, tol: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    truncate(seq, n)?.eigenvalues(tol)
}

/// Gauss rule for the orthogonality measure, normalized to unit mass when
/// `p_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

pub fn gauss_rule(seq: &CoefficientSequence, n: usize) -> Result<QuadratureRule> {
    gauss_rule_with(seq, n, Execution::default())
}

/// Squared eigenvector of a Jacobi matrix at an eigenvalue `x`, from a twisted
/// factorization: the recurrence runs forward from the top and backward from
/// the bottom, and the two are joined at the row with the smallest pivot
/// `gamma`. This stays accurate at outlying eigenvalues, where the forward
/// recurrence alone is swamped by the growing solution.
#[derive(Debug, Clone)]
pub struct TwistedVector {
    /// `v_j^2` scaled so the entry at `twist` is 1.
    pub squares: Vec<f64>,
    pub twist: usize,
    /// `|gamma|` at the twist; `1 / |gamma|` bounds the distance from `x` to the
    /// nearest eigenvalue from below, so it is tiny only at an eigenvalue.
    pub gamma: f64,
}

impl TwistedVector {
    /// `v_0^2 / |v|^2`, the Gauss weight at `x`.
    pub fn weight(&self) -> f64 {
        self.squares[0] / self.squares.iter().sum::<f64>()
    }
}

const BIG: f64 = 1e100;

/// Values of the three-term recurrence run from row 0, each stored as
/// `value * BIG^exponent` so that growth cannot overflow.
fn scaled_run(
    n: usize,
    x: f64,
    b: impl Fn(usize) -> f64,
    a: impl Fn(usize) -> f64,
) -> (Vec<f64>, Vec<i32>) {
    let mut vals = vec![0.0; n];
    let mut exps = vec![0i32; n];
    vals[0] = 1.0;
    let (mut prev, mut cur, mut e) = (0.0, 1.0, 0);
    for j in 0..n - 1 {
        let coupling = if j > 0 { a(j - 1) * prev } else { 0.0 };
        let next = ((x - b(j)) * cur - coupling) / a(j);
        (prev, cur) = (cur, next);
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            e += 1;
        }
        vals[j + 1] = cur;
        exps[j + 1] = e;
    }
    (vals, exps)
}

/// `vals[i] / vals[k]` for `i` computed before `k`.
fn scaled_ratio(vals: &[f64], exps: &[i32], i: usize, k: usize) -> f64 {
    vals[i] / vals[k] * BIG.powi(exps[i] - exps[k])
}

pub fn twisted_vector(t: &TridiagonalN, x: f64) -> TwistedVector {
    let n = t.len();
    if n == 1 {
        return TwistedVector {
            squares: vec![1.0],
            twist: 0,
            gamma: (t.diag()[0] - x).abs(),
        };
    }
    let (b, a) = (t.diag(), t.offdiag()); // a[j] couples rows j and j + 1
    let (f, fe) = scaled_run(n, x, |j| b[j], |j| a[j]);
    // the backward run is the forward run of the flipped matrix: g[j] = gr[n - 1 - j]
    let (gr, ge) = scaled_run(n, x, |i| b[n - 1 - i], |i| a[n - 2 - i]);
    let gamma = |k: usize| {
        let (fk, gk) = (f[k], gr[n - 1 - k]);
        if fk == 0.0 || gk == 0.0 || !fk.is_finite() || !gk.is_finite() {
            return f64::INFINITY;
        }
        let mut d = b[k] - x;
        if k > 0 {
            d += a[k - 1] * scaled_ratio(&f, &fe, k - 1, k);
        }
        if k + 1 < n {
            d += a[k] * scaled_ratio(&gr, &ge, n - 2 - k, n - 1 - k);
        }
        d.abs()
    };
    let (twist, g_min) = (0..n)
        .map(|k| (k, gamma(k)))
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("n >= 1");
    let squares = (0..n)
        .map(|j| {
            let r = if j <= twist {
                scaled_ratio(&f, &fe, j, twist)
            } else {
                scaled_ratio(&gr, &ge, n - 1 - j, n - 1 - twist)
            };
            r * r
        })
        .collect();
    TwistedVector {
        squares,
        twist,
        gamma: g_min,
    }
}

/// `N`-point Gauss rule: nodes are the eigenvalues of the truncation, polished
/// by Newton steps on `p_N`; weights are `1 / sum_{j<N} p_j(x_k)^2`, the squared first components
/// of the normalized eigenvectors.
pub fn gauss_rule_with(
    seq: &CoefficientSequence,
    n: usize,
    exec: Execution,
) -> Result<QuadratureRule> {
    let t = truncate(seq, n)?;
    let rough = t.eigenvalues_with(DEFAULT_TOL, exec)?;
    let pairs = exec
        .map_slice(&rough, |&x0| -> Result<(f64, f64)> {
            let mut x = x0;
            for _ in 0..3 {
                let (p, dp) = match eval_orthonormal_with_derivative(seq, n, x) {
                    Ok(v) => v,
                    // p_N overflows at far outliers; the bisection value stands
                    Err(Error::NonFinite { .. }) => break,
                    Err(e) => return Err(e),
                };
                let step = p.last() / dp[n];
                if !step.is_finite() || step.abs() > 1e-8 * (1.0 + x.abs()) {
                    break;
                }
                x -= step;
                if step.abs() <= f64::EPSILON * x.abs().max(1e-300) {
                    break;
                }
            }
            Ok((x, twisted_vector(&t, x).weight()))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule { nodes, weights })
}
