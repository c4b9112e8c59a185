//! Orthogonality measure of the anti-associated polynomials.
//!
//! The absolutely continuous part is known in closed form for the two bases
//! supported here, the constant (Chebyshev-U) sequence and first-kind
//! Grosjean polynomials. Mass points outside `[-1, 1]` are the zeros of
//! `q_r(x) - a_0 q_{r-1}(x) F(x)`, where `F(x) = lim p^(1)_{n-1}(x) / (a_1 p_n(x))`
//! is the Stieltjes-type ratio of the base family. Every root is
//! cross-checked against outlier eigenvalues of a large truncation before
//! it is accepted.

use std::f64::consts::PI;

use crate::anti::{anti_closed_orthonormal, extend, ExtensionParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::families::{chebyshev_u_constant, grosjean1_coeffs, grosjean1_weight_factors};
use crate::quadrature::{integrate_x, AnglePoint, PanelRule};
use crate::recurrence::{eval_orthonormal, CoefficientSequence};
use crate::scalar::Real;
use crate::spectral::{truncate, twisted_vector, DEFAULT_TOL};

/// Standoff from `+-1` when bracketing mass-point roots.
pub const ROOT_STANDOFF: f64 = 1e-13;
/// Smallest truncation used to cross-check mass points against outlier eigenvalues.
pub const OUTLIER_TRUNCATION: usize = 2000;
/// Cap on the truncation a mass point close to `+-1` may call for.
pub const MAX_OUTLIER_TRUNCATION: usize = 1_000_000;
/// `N ln(rho)` needed for an outlier of the `N`-truncation to sit on its mass
/// point, where `rho = |x| + sqrt(x^2 - 1)` is the decay rate of the eigenvector.
const OUTLIER_DECAY: f64 = 40.0;
/// Largest `v_{N-1}^2 / v_max^2` for an eigenvector localized at a mass point.
const MASS_DECAY: f64 = 1e-20;
/// Largest twisted pivot accepted as an eigenvalue in `mass_at`.
const MASS_GAMMA_TOL: f64 = 1e-6;
/// Allowed distance between a root and its outlier eigenvalue.
pub const OUTLIER_MATCH_TOL: f64 = 1e-6;

/// Base family of an extension with a known measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Base {
    /// `b_n = 0`, `a_n^2 = 1/4`.
    ChebyshevU,
    /// First-kind Grosjean polynomials, `-1 < alpha < 0`.
    Grosjean1(Real),
}

impl Base {
    pub fn grosjean1(alpha: f64) -> Result<Self> {
        let b = Base::Grosjean1(Real::approx(alpha));
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Base::ChebyshevU => Ok(()),
            Base::Grosjean1(a) => grosjean1_coeffs(a.clone()).map(|_| ()),
        }
    }

    pub fn sequence(&self) -> Result<CoefficientSequence> {
        match self {
            Base::ChebyshevU => Ok(chebyshev_u_constant()),
            Base::Grosjean1(a) => grosjean1_coeffs(a.clone()),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Base::ChebyshevU => None,
            Base::Grosjean1(a) => Some(a.value()),
        }
    }

    /// `lim p^(1)_{n-1}(x) / (a_1 p_n(x))` for `|x| > 1`.
    pub fn stieltjes_ratio(&self, x: f64) -> Result<f64> {
        match self {
            Base::ChebyshevU => {
                outside(x, "stieltjes_ratio")?;
                Ok(2.0 / (x + x.signum() * (x * x - 1.0).sqrt()))
            }
            Base::Grosjean1(a) => stieltjes_ratio_limit(a.value(), x),
        }
    }
}

fn inside(x: f64, what: &'static str) -> Result<()> {
    if x.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain { x, what })
    }
}

fn outside(x: f64, what: &'static str) -> Result<()> {
    if x.abs() > 1.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain { x, what })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -1.0 && alpha < 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "first-kind Grosjean needs -1 < alpha < 0, got {alpha}"
        )))
    }
}

/// Density of the extended measure over a first-kind Grosjean base.
///
/// With `h = (1-x)^a / (1+x)^(a+1)`, `A = q_r`, `B = q_{r-1}` the modulus in
/// `|A - a_0 e^{i a pi} B h|^2` expands to `A^2 - 2 a_0 cos(a pi) A B h + a_0^2 B^2 h^2`,
/// and the density is `sin(-a pi)/pi * h` divided by that.
pub fn theorem1_density(alpha: f64, params: &ExtensionParams, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    inside(x, "theorem1_density")?;
    Ok(grosjean_density_at(alpha, params, &AnglePoint::from_x(x)))
}

fn grosjean_density_at(alpha: f64, params: &ExtensionParams, pt: &AnglePoint) -> f64 {
    let r = params.r();
    let q = params.q_orthonormal(pt.x);
    let (a, b) = (q[r], q[r - 1]);
    let a0 = params.a0();
    // divide through by h so that h -> infinity at the endpoints stays finite
    let inv_h = (pt.one_plus_x / pt.one_minus_x).powf(alpha) * pt.one_plus_x;
    let denom = a * a * inv_h - 2.0 * a0 * (alpha * PI).cos() * a * b + a0 * a0 * b * b / inv_h;
    (-PI * alpha).sin() / PI / denom
}

/// Density over the constant base:
/// `(2/pi) sqrt(1-x^2) / (q_r^2 - 4 a_0 x q_r q_{r-1} + 4 a_0^2 q_{r-1}^2)`.
/// Only `q_r - 2 a_0 x q_{r-1}` can vanish at the endpoints (as for
/// `a_0^2 = 1/2`, which gives the Chebyshev-T weight).
pub fn bernstein_szego_u_density(params: &ExtensionParams, x: f64) -> Result<f64> {
    inside(x, "bernstein_szego_u_density")?;
    Ok(bsu_at(params, &AnglePoint::from_x(x)))
}

fn bsu_at(params: &ExtensionParams, pt: &AnglePoint) -> f64 {
    let r = params.r();
    let q = params.q_orthonormal(pt.x);
    let (a, b) = (q[r], q[r - 1]);
    let a0 = params.a0();
    // the denominator as (q_r - 2 a_0 x q_{r-1})^2 + 4 a_0^2 q_{r-1}^2 (1 - x^2),
    // which cannot cancel to zero or below when it vanishes at an endpoint
    let lead = a - 2.0 * a0 * pt.x * b;
    let s2 = pt.one_minus_x * pt.one_plus_x;
    2.0 / PI * pt.sin / (lead * lead + 4.0 * a0 * a0 * b * b * s2)
}

/// Density over the Chebyshev-T base (Grosjean with `alpha = -1/2`):
/// `(1/pi) sqrt(1-x^2) / ((1-x^2) q_r^2 + a_0^2 q_{r-1}^2)`.
pub fn bernstein_szego_t_density(params: &ExtensionParams, x: f64) -> Result<f64> {
    inside(x, "bernstein_szego_t_density")?;
    Ok(bst_at(params, &AnglePoint::from_x(x)))
}

fn bst_at(params: &ExtensionParams, pt: &AnglePoint) -> f64 {
    let r = params.r();
    let q = params.q_orthonormal(pt.x);
    let (a, b) = (q[r], q[r - 1]);
    let a0 = params.a0();
    let s2 = pt.one_minus_x * pt.one_plus_x;
    pt.sin / PI / (s2 * a * a + a0 * a0 * b * b)
}

/// `q_r(x) - a_0 q_{r-1}(x) F(x)` for `|x| > 1`; its zeros are the mass points.
pub fn mass_point_equation(base: &Base, params: &ExtensionParams, x: f64) -> Result<f64> {
    outside(x, "mass_point_equation")?;
    let f = base.stieltjes_ratio(x)?;
    let q = params.q_orthonormal(x);
    let r = params.r();
    Ok(q[r] - params.a0() * q[r - 1] * f)
}

/// Gershgorin radius of the extended matrix plus one.
pub fn default_search_bound(base: &Base, params: &ExtensionParams) -> Result<f64> {
    let seq = extend(&base.sequence()?, params);
    // Jacobi-type coefficients settle quickly; the head dominates the bound
    let n = params.r() + 1000;
    let (lo, hi) = truncate(&seq, n)?.gershgorin();
    Ok(lo.abs().max(hi.abs()) + 1.0)
}

/// Sign-change roots of the mass-point equation on both sides of `[-1, 1]`,
/// refined by bisection. No outlier cross-check.
pub fn mass_point_roots(
    base: &Base,
    params: &ExtensionParams,
    search_bound: f64,
) -> Result<Vec<f64>> {
    if search_bound.is_nan() || search_bound <= 1.0 + ROOT_STANDOFF {
        return Err(Error::InvalidParameter(format!(
            "search bound {search_bound} must exceed 1"
        )));
    }
    let mut roots = Vec::new();
    for side in [-1.0, 1.0] {
        let g = |t: f64| mass_point_equation(base, params, side * (1.0 + t));
        // samples in t = |x| - 1: log-spaced near the endpoint plus uniform
        let span = search_bound - 1.0;
        let mut ts: Vec<f64> = (0..=2000)
            .map(|k| ROOT_STANDOFF * (span / ROOT_STANDOFF).powf(k as f64 / 2000.0))
            .chain((1..=2000).map(|k| span * k as f64 / 2000.0))
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let mut side_roots = Vec::new();
        let mut prev_t = ts[0];
        let mut prev_v = g(prev_t)?;
        if prev_v == 0.0 {
            side_roots.push(prev_t);
        }
        for &t in &ts[1..] {
            let v = g(t)?;
            if v == 0.0 {
                side_roots.push(t);
            } else if prev_v != 0.0 && (v < 0.0) != (prev_v < 0.0) {
                side_roots.push(bisect(&g, prev_t, t, prev_v)?);
            }
            prev_t = t;
            prev_v = v;
        }
        roots.extend(side_roots.into_iter().map(|t| side * (1.0 + t)));
    }
    roots.sort_by(f64::total_cmp);
    let r = params.r();
    let left = roots.iter().filter(|&&x| x < 0.0).count();
    if left > r || roots.len() - left > r {
        return Err(Error::Integrity(format!(
            "found {left} mass points below -1 and {} above 1, more than r = {r} on a side",
            roots.len() - left
        )));
    }
    Ok(roots)
}

fn bisect(g: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut g_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = v;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Outlier eigenvalues (outside `[-1, 1]`) of the `n`-truncated extended matrix.
pub fn truncation_outliers(base: &Base, params: &ExtensionParams, n: usize) -> Result<Vec<f64>> {
    outliers_beyond(base, params, n, 1e-9)
}

fn outliers_beyond(
    base: &Base,
    params: &ExtensionParams,
    n: usize,
    guard: f64,
) -> Result<Vec<f64>> {
    let t = truncate(&extend(&base.sequence()?, params), n)?;
    let (mut left, right) = t.outliers(-1.0 - guard, 1.0 + guard, DEFAULT_TOL)?;
    left.extend(right);
    Ok(left)
}

/// Truncation size whose outliers resolve a mass point at `x`.
fn resolving_truncation(x: f64) -> usize {
    let rho_log = x.abs().acosh();
    let n = (OUTLIER_DECAY / rho_log).ceil();
    if n.is_finite() {
        (n as usize).max(OUTLIER_TRUNCATION)
    } else {
        usize::MAX
    }
}

/// Mass points: roots of the mass-point equation that agree one-to-one with
/// outlier eigenvalues of a truncation. The truncation has at least
/// `OUTLIER_TRUNCATION` rows and grows for roots close to `+-1`, whose
/// eigenvectors decay slowly.
pub fn find_mass_points(
    base: &Base,
    params: &ExtensionParams,
    search_bound: f64,
) -> Result<Vec<f64>> {
    let roots = mass_point_roots(base, params, search_bound)?;
    let (n, widest) = roots
        .iter()
        .map(|&x| (resolving_truncation(x), x))
        .max_by_key(|p| p.0)
        .unwrap_or((OUTLIER_TRUNCATION, 0.0));
    if n > MAX_OUTLIER_TRUNCATION {
        return Err(Error::UnresolvedMassPoint {
            x: widest,
            needed: n,
            cap: MAX_OUTLIER_TRUNCATION,
        });
    }
    // bulk eigenvalues stay inside [-1, 1], so the guard only absorbs rounding
    let closest = roots
        .iter()
        .map(|x| x.abs() - 1.0)
        .fold(f64::INFINITY, f64::min);
    let guard = (0.5 * closest).clamp(1e-12, 1e-9);
    let outliers = outliers_beyond(base, params, n, guard)?;
    let matched = roots.len() == outliers.len()
        && roots
            .iter()
            .zip(&outliers)
            .all(|(a, b)| (a - b).abs() <= OUTLIER_MATCH_TOL);
    if !matched {
        return Err(Error::Integrity(format!(
            "mass-point roots {roots:?} do not match outlier eigenvalues {outliers:?} of the {n}-truncation"
        )));
    }
    Ok(roots)
}

/// Mass at a mass point: `1 / sum_k p^(-r)_k(x)^2`.
///
/// The values `p_k(x)` are the components of the eigenvector at `x`, so they
/// are taken from a twisted factorization of a truncation long enough for
/// them to decay by `e^(-2 OUTLIER_DECAY)`. The forward recurrence alone
/// would be swamped by the growing solution, which rounding (of `x` itself
/// near `+-1`) excites. The remaining tail is bounded by the geometric decay
/// `1 / rho^2` and added.
pub fn mass_at(base: &Base, params: &ExtensionParams, location: f64) -> Result<f64> {
    outside(location, "mass_at")?;
    let not_mass = |reason| Error::NotAMassPoint {
        x: location,
        reason,
    };
    let n = resolving_truncation(location);
    if n > MAX_OUTLIER_TRUNCATION {
        return Err(Error::UnresolvedMassPoint {
            x: location,
            needed: n,
            cap: MAX_OUTLIER_TRUNCATION,
        });
    }
    let t = truncate(&extend(&base.sequence()?, params), n)?;
    let v = twisted_vector(&t, location);
    if v.gamma.is_nan() || v.gamma > MASS_GAMMA_TOL {
        return Err(not_mass("not an eigenvalue of the truncated matrix"));
    }
    let last = v.squares[n - 1];
    if last.is_nan() || last > MASS_DECAY * v.squares[v.twist] {
        return Err(not_mass("orthonormal values do not decay"));
    }
    let q = (-2.0 * location.abs().acosh()).exp();
    let sum = v.squares.iter().sum::<f64>() + last * q / (1.0 - q);
    Ok(v.squares[0] / sum)
}

/// Where a measure model's density formula comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    GrosjeanClosedForm,
    BernsteinSzegoU,
    BernsteinSzegoT,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::GrosjeanClosedForm => "theorem1",
            Provenance::BernsteinSzegoU => "bernstein_szego_U",
            Provenance::BernsteinSzegoT => "bernstein_szego_T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassPoint {
    pub x: f64,
    pub mass: f64,
}

/// Density plus mass points of the extended measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureModel {
    base: Base,
    params: ExtensionParams,
    provenance: Provenance,
    masses: Vec<MassPoint>,
}

impl MeasureModel {
    /// Locates and weighs the mass points.
    pub fn build(base: Base, params: ExtensionParams) -> Result<Self> {
        base.validate()?;
        let bound = default_search_bound(&base, &params)?;
        let locations = find_mass_points(&base, &params, bound)?;
        let masses = locations
            .into_iter()
            .map(|x| {
                Ok(MassPoint {
                    x,
                    mass: mass_at(&base, &params, x)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(base, params, masses))
    }

    /// Assembles a model from known mass points (e.g. read back from disk).
    pub fn from_parts(base: Base, params: ExtensionParams, masses: Vec<MassPoint>) -> Self {
        let provenance = match &base {
            Base::ChebyshevU => Provenance::BernsteinSzegoU,
            Base::Grosjean1(a) if a.value() == -0.5 => Provenance::BernsteinSzegoT,
            Base::Grosjean1(_) => Provenance::GrosjeanClosedForm,
        };
        MeasureModel {
            base,
            params,
            provenance,
            masses,
        }
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn params(&self) -> &ExtensionParams {
        &self.params
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn masses(&self) -> &[MassPoint] {
        &self.masses
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        inside(x, "density")?;
        Ok(self.density_at(&AnglePoint::from_x(x)))
    }

    pub fn density_at(&self, pt: &AnglePoint) -> f64 {
        match (&self.base, self.provenance) {
            (Base::ChebyshevU, _) => bsu_at(&self.params, pt),
            (Base::Grosjean1(_), Provenance::BernsteinSzegoT) => bst_at(&self.params, pt),
            (Base::Grosjean1(a), _) => grosjean_density_at(a.value(), &self.params, pt),
        }
    }

    /// `int density` over `(-1, 1)`.
    pub fn continuous_mass(&self, rule: &PanelRule, exec: Execution) -> Result<f64> {
        Ok(integrate_x(rule, 1, exec, |pt, out| out[0] = self.density_at(pt))?.values[0])
    }

    pub fn discrete_mass(&self) -> f64 {
        self.masses.iter().map(|m| m.mass).sum()
    }

    pub fn total_mass(&self, rule: &PanelRule, exec: Execution) -> Result<f64> {
        Ok(self.continuous_mass(rule, exec)? + self.discrete_mass())
    }

    /// Smallest value of the density denominator's reciprocal factor over a
    /// uniform angle grid, i.e. the minimum density on `(-1, 1)`.
    pub fn min_density(&self, grid: usize) -> f64 {
        (1..grid)
            .map(|k| self.density_at(&AnglePoint::from_theta(PI * k as f64 / grid as f64)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `n lambda_n(x)` sampled at `n_list` with a two-point Richardson limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelLimit {
    pub samples: Vec<(usize, f64)>,
    pub limit: f64,
}

/// Assumes `n lambda_n(x) = L + c/n + o(1/n)` and eliminates `c` using the
/// last two entries of `n_list`.
pub fn christoffel_limit_estimate(
    seq: &CoefficientSequence,
    x: f64,
    n_list: &[usize],
) -> Result<ChristoffelLimit> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::InvalidParameter(
            "n_list must be nonempty, positive and increasing".into(),
        ));
    }
    inside(x, "christoffel_limit_estimate")?;
    let nmax = *n_list.last().expect("nonempty");
    let p = eval_orthonormal(seq, nmax, x)?;
    let mut sum = 0.0;
    let mut samples = Vec::with_capacity(n_list.len());
    let mut next = 0;
    for (j, v) in p.values.iter().enumerate() {
        sum += v * v;
        if j == n_list[next] {
            samples.push((j, j as f64 / sum));
            next += 1;
            if next == n_list.len() {
                break;
            }
        }
    }
    let limit = match samples.as_slice() {
        [.., (n1, f1), (n2, f2)] => {
            let rho = *n2 as f64 / *n1 as f64;
            (rho * f2 - f1) / (rho - 1.0)
        }
        [(_, f)] => *f,
        [] => unreachable!("n_list is nonempty"),
    };
    Ok(ChristoffelLimit { samples, limit })
}

/// Normalized sums over a first-kind Grosjean base and their predicted limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumLimits {
    /// `(1/n) sum_{k<n} p_k^2`, `(1/n) sum_{k<n} [p^(1)_k]^2`,
    /// `(1/n) sum_{k=1}^{n} p_k p^(1)_{k-1}`.
    pub ratios: [f64; 3],
    pub limits: [f64; 3],
}

impl SumLimits {
    /// Relative errors; absolute where the limit vanishes (`alpha = -1/2`
    /// for the mixed sum).
    pub fn relative_errors(&self) -> [f64; 3] {
        std::array::from_fn(|i| {
            let scale = if self.limits[i] == 0.0 {
                1.0
            } else {
                self.limits[i].abs()
            };
            (self.ratios[i] - self.limits[i]).abs() / scale
        })
    }
}

pub fn sum_limit_checks(alpha: f64, x: f64, n: usize) -> Result<SumLimits> {
    check_alpha(alpha)?;
    inside(x, "sum_limit_checks")?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sum_limit_checks needs n >= 1".into(),
        ));
    }
    let g = grosjean1_coeffs(Real::approx(alpha))?;
    let p = eval_orthonormal(&g, n, x)?;
    let p1 = eval_orthonormal(&g.shifted(1), n, x)?;
    let nf = n as f64;
    let s1 = p.values[..n].iter().map(|v| v * v).sum::<f64>() / nf;
    let s2 = p1.values[..n].iter().map(|v| v * v).sum::<f64>() / nf;
    let s3 = (1..=n).map(|k| p.values[k] * p1.values[k - 1]).sum::<f64>() / nf;

    let sin_t = (1.0 - x * x).sqrt();
    let s = (-PI * alpha).sin();
    let h = (1.0 - x).powf(alpha) / (1.0 + x).powf(alpha + 1.0);
    let a1_sq = -2.0 * alpha * (1.0 + alpha);
    let limits = [
        1.0 / (s * h * sin_t),
        a1_sq * h / (s * sin_t),
        a1_sq.sqrt() * (PI * alpha).cos() / (sin_t * s),
    ];
    Ok(SumLimits {
        ratios: [s1, s2, s3],
        limits,
    })
}

/// `lim p^(1)_{n-1}(x) / (a_1 p_n(x)) = (x-1)^a / (x+1)^(a+1)`, taken positive
/// for `x > 1` and negative for `x < -1`.
pub fn stieltjes_ratio_limit(alpha: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    outside(x, "stieltjes_ratio_limit")?;
    Ok(x.signum() * (x - 1.0).abs().powf(alpha) / (x + 1.0).abs().powf(alpha + 1.0))
}

/// Finite-`n` ratio `p^(1)_{n-1}(x) / (a_1 p_n(x))`, which equals the monic
/// ratio `P^(1)_{n-1}(x) / P_n(x)`. Both recurrences are rescaled together
/// to avoid overflow.
pub fn stieltjes_ratio_at(seq: &CoefficientSequence, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("ratio needs n >= 1".into()));
    }
    let (mut p0, mut p1) = (0.0f64, 1.0f64);
    let (mut s0, mut s1) = (0.0f64, 0.0f64); // P^(1)_{k-1}: P^(1)_{-1} = 0
    for k in 0..n {
        let b = seq.b(k);
        let a2 = seq.a2(k);
        let p2 = (x - b) * p1 - a2 * p0;
        // P^(1)_{k} = (x - b_{k+1}) P^(1)_{k-1} - a_{k+1}^2 P^(1)_{k-2}, started at P^(1)_0 = 1
        let s2 = if k == 0 { 1.0 } else { (x - b) * s1 - a2 * s0 };
        (p0, p1, s0, s1) = (p1, p2, s1, s2);
        let m = p1.abs().max(s1.abs());
        if m > 1e100 {
            p0 /= m;
            p1 /= m;
            s0 /= m;
            s1 /= m;
        }
    }
    Ok(s1 / p1)
}

/// `G[i][j] = int p_i p_j w + sum_s m_s p_i(x_s) p_j(x_s)` for the orthonormal
/// anti-associated polynomials `p_0..p_{m_max}`.
pub fn gram_matrix(model: &MeasureModel, m_max: usize) -> Result<Vec<Vec<f64>>> {
    gram_matrix_with(model, m_max, &PanelRule::default(), Execution::default())
}

pub fn gram_matrix_with(
    model: &MeasureModel,
    m_max: usize,
    rule: &PanelRule,
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    gram_matrix_against(model, &model.params, m_max, rule, exec)
}

/// Gram matrix of the polynomials extended by `params` against the measure
/// of `model`. Differs from the identity when `params` does not match the
/// parameters the measure was built from.
pub fn gram_matrix_against(
    model: &MeasureModel,
    params: &ExtensionParams,
    m_max: usize,
    rule: &PanelRule,
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    if m_max > 20 {
        return Err(Error::InvalidParameter(format!(
            "m_max = {m_max} exceeds 20"
        )));
    }
    let dim = m_max + 1;
    let seq = extend(&model.base.sequence()?, params);
    let integral = integrate_x(rule, dim * dim, exec, |pt, out| {
        let w = model.density_at(pt);
        // p_m for m <= m_max from the extended recurrence
        if let Ok(p) = eval_orthonormal(&seq, m_max, pt.x) {
            for i in 0..dim {
                for j in 0..dim {
                    out[i * dim + j] = w * p.values[i] * p.values[j];
                }
            }
        }
    })?;
    let mut g: Vec<Vec<f64>> = integral.values.chunks(dim).map(<[f64]>::to_vec).collect();
    for m in &model.masses {
        let p = eval_orthonormal(&seq, m_max, m.x)?;
        for (row, pi) in g.iter_mut().zip(&p.values) {
            for (gij, pj) in row.iter_mut().zip(&p.values) {
                *gij += m.mass * pi * pj;
            }
        }
    }
    Ok(g)
}

/// `max |G - I|`.
pub fn identity_deviation(g: &[Vec<f64>]) -> f64 {
    let mut dev = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((v - target).abs());
        }
    }
    dev
}

/// `pi w(x) sqrt(1 - x^2)`, the predicted value of `lim n lambda_n(x)`.
pub fn predicted_christoffel_limit(model: &MeasureModel, x: f64) -> Result<f64> {
    Ok(PI * model.density(x)? * (1.0 - x * x).sqrt())
}

/// The orthonormal anti-associated value `p^(-r)_{n+r}(x)` of a model.
pub fn model_orthonormal(model: &MeasureModel, n: usize, x: f64) -> Result<f64> {
    Ok(anti_closed_orthonormal(&model.base.sequence()?, &model.params, n, x)?.last())
}

/// First-kind Grosjean weight in angle form, for quadrature checks.
pub fn grosjean1_weight_at(alpha: f64, pt: &AnglePoint) -> f64 {
    grosjean1_weight_factors(alpha, pt.one_minus_x, pt.one_plus_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::grosjean1_weight;
    use crate::recurrence::christoffel;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn p(b: &[f64], a2: &[f64]) -> ExtensionParams {
        ExtensionParams::from_f64(b, a2).unwrap()
    }

    #[test]
    fn u_density_examples() {
        let t = p(&[0.0], &[0.5]);
        let v = p(&[-0.5], &[0.25]);
        let two = p(&[0.0], &[1.0]);
        for x in [-0.9f64, -0.3, 0.0, 0.45, 0.99] {
            let s = (1.0 - x * x).sqrt();
            assert!(close(
                bernstein_szego_u_density(&t, x).unwrap(),
                1.0 / (PI * s),
                1e-13
            ));
            // Jacobi (1/2, -1/2) probability weight: (1/pi) sqrt((1-x)/(1+x)) ... normalized
            let jac = ((1.0 - x) / (1.0 + x)).sqrt() / PI;
            assert!(close(bernstein_szego_u_density(&v, x).unwrap(), jac, 1e-13));
            assert!(close(
                bernstein_szego_u_density(&two, x).unwrap(),
                2.0 / PI * s / (4.0 - 3.0 * x * x),
                1e-13
            ));
        }
        assert!(bernstein_szego_u_density(&t, 1.0).is_err());
        for x in [1.0 - 1e-9f64, -1.0 + 1e-12] {
            let s = (1.0 - x * x).sqrt();
            let d = bernstein_szego_u_density(&t, x).unwrap();
            assert!(
                d.is_finite() && close(d, 1.0 / (PI * s), 1e-6),
                "x={x}: {d}"
            );
        }
    }

    #[test]
    fn grosjean_density_at_minus_half_is_t_formula() {
        let params = p(&[0.2, -0.6], &[0.7, 1.3]);
        for k in 1..200 {
            let x = -1.0 + 2.0 * k as f64 / 200.0;
            let a = theorem1_density(-0.5, &params, x).unwrap();
            let b = bernstein_szego_t_density(&params, x).unwrap();
            assert!(close(a, b, 1e-12), "x={x}: {a} vs {b}");
        }
        assert!(theorem1_density(-0.5, &params, -1.0).is_err());
        assert!(theorem1_density(0.2, &params, 0.0).is_err());
    }

    #[test]
    fn grosjean_density_dominant_term() {
        // large q_1 makes the density approach w_G / q_1^2
        let params = p(&[-1e4], &[1.0]);
        let x = 0.3;
        let q1 = x + 1e4;
        let w = grosjean1_weight(-0.3, x).unwrap();
        assert!(close(
            theorem1_density(-0.3, &params, x).unwrap(),
            w / (q1 * q1),
            1e-3
        ));
    }

    #[test]
    fn mass_point_equation_examples() {
        let u = Base::ChebyshevU;
        // Chebyshev T: the equation reduces to a multiple of sqrt(x^2 - 1)
        let t = p(&[0.0], &[0.5]);
        for x in [1.1f64, 2.0, -1.5, -3.0] {
            let v = mass_point_equation(&u, &t, x).unwrap();
            assert!(close(
                v,
                2f64.sqrt() * x.signum() * (x * x - 1.0).sqrt(),
                1e-13
            ));
        }
        assert!(mass_point_roots(&u, &t, 3.0).unwrap().is_empty());
        let two = p(&[0.0], &[1.0]);
        let roots = mass_point_roots(&u, &two, 3.0).unwrap();
        let m = 2.0 / 3f64.sqrt();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + m).abs() < 1e-12 && (roots[1] - m).abs() < 1e-12);
        assert!(mass_point_equation(&u, &two, 0.5).is_err());
    }

    #[test]
    fn grosjean_ratio_at_minus_half_matches_t() {
        // Chebyshev T base: P^(1)_{n-1} / P_n -> 1 / sqrt(x^2 - 1)
        let b = Base::grosjean1(-0.5).unwrap();
        for x in [1.3f64, -2.0] {
            let f = b.stieltjes_ratio(x).unwrap();
            assert!(close(f, x.signum() / (x * x - 1.0).sqrt(), 1e-14));
        }
    }

    #[test]
    fn stieltjes_ratio_examples() {
        assert!(close(
            stieltjes_ratio_limit(-0.5, 2.0).unwrap(),
            1.0 / 3f64.sqrt(),
            1e-15
        ));
        assert!(stieltjes_ratio_limit(-0.5, -2.0).unwrap() < 0.0);
        assert!(stieltjes_ratio_limit(-0.5, 0.5).is_err());
        for (alpha, x) in [(-0.3, 1.5), (-0.7, -1.2), (-0.3, 3.0)] {
            let g = grosjean1_coeffs(Real::approx(alpha)).unwrap();
            let finite = stieltjes_ratio_at(&g, 2000, x).unwrap();
            let limit = stieltjes_ratio_limit(alpha, x).unwrap();
            assert!(
                (finite - limit).abs() <= 1e-4 * limit.abs(),
                "{alpha} {x}: {finite} vs {limit}"
            );
        }
    }

    #[test]
    fn masses_for_two_point_u_case() {
        let base = Base::ChebyshevU;
        let params = p(&[0.0], &[1.0]);
        let model = MeasureModel::build(base, params).unwrap();
        assert_eq!(model.provenance(), Provenance::BernsteinSzegoU);
        let m = model.masses();
        assert_eq!(m.len(), 2);
        assert!(close(m[0].mass, m[1].mass, 1e-10));
        // the density integrates to 1/3, leaving 1/3 for each mass
        let total = model
            .total_mass(&PanelRule::default(), Execution::default())
            .unwrap();
        assert!((total - 1.0).abs() < 1e-8, "total {total}");
        assert!((m[0].mass - 1.0 / 3.0).abs() < 1e-9, "mass {}", m[0].mass);
    }

    #[test]
    fn mass_at_rejects_regular_points() {
        let base = Base::ChebyshevU;
        assert!(mass_at(&base, &p(&[0.0], &[0.5]), 1.5).is_err());
        assert!(mass_at(&base, &p(&[0.0], &[1.0]), 1.5).is_err());
        assert!(mass_at(&base, &p(&[0.0], &[1.0]), 0.5).is_err());
    }

    #[test]
    fn grosjean_model_total_mass() {
        let base = Base::grosjean1(-0.3).unwrap();
        let model = MeasureModel::build(base, p(&[0.1], &[0.4])).unwrap();
        assert_eq!(model.provenance(), Provenance::GrosjeanClosedForm);
        assert!(model
            .masses()
            .iter()
            .all(|m| m.mass > 0.0 && m.x.abs() > 1.0));
        let total = model
            .total_mass(&PanelRule::default(), Execution::default())
            .unwrap();
        assert!((total - 1.0).abs() < 1e-7, "total {total}");
        assert!(model.min_density(4000) > 0.0);
    }

    #[test]
    fn christoffel_limits() {
        let u = chebyshev_u_constant();
        let est = christoffel_limit_estimate(&u, 0.0, &[1000, 2000]).unwrap();
        assert!((est.limit - 2.0).abs() < 1e-3);
        let t = crate::families::chebyshev_coeffs(crate::families::ChebyshevKind::T);
        let est = christoffel_limit_estimate(&t, 0.0, &[1000, 2000]).unwrap();
        assert!((est.limit - 1.0).abs() < 1e-3);
        let g = grosjean1_coeffs(Real::approx(-0.3)).unwrap();
        let est = christoffel_limit_estimate(&g, 0.2, &[5000, 10000]).unwrap();
        let target = PI * grosjean1_weight(-0.3, 0.2).unwrap() * (1.0f64 - 0.04).sqrt();
        assert!((est.limit - target).abs() < 0.01 * target);
        // samples agree with the direct Christoffel function
        let (n, v) = est.samples[0];
        assert!(close(v, n as f64 * christoffel(&g, n, 0.2).unwrap(), 1e-12));
        assert!(christoffel_limit_estimate(&g, 0.2, &[10, 5]).is_err());
    }

    #[test]
    fn sum_limit_trivia() {
        let s = sum_limit_checks(-0.5, 0.0, 10).unwrap();
        assert!(s.limits[2].abs() < 1e-15);
        assert!(s.limits[1] > 0.0);
        let s = sum_limit_checks(-0.3, 0.3, 100_000).unwrap();
        for e in s.relative_errors() {
            assert!(e < 0.02);
        }
    }

    #[test]
    fn gram_matrix_t_case() {
        let model = MeasureModel::build(Base::ChebyshevU, p(&[0.0], &[0.5])).unwrap();
        assert!(model.masses().is_empty());
        let g = gram_matrix(&model, 10).unwrap();
        assert!(identity_deviation(&g) < 1e-10, "{}", identity_deviation(&g));
        assert!(gram_matrix(&model, 21).is_err());
    }

    #[test]
    fn gram_matrix_with_masses() {
        let model = MeasureModel::build(Base::ChebyshevU, p(&[0.0], &[1.0])).unwrap();
        assert!(identity_deviation(&gram_matrix(&model, 12).unwrap()) < 1e-8);
        let model = MeasureModel::build(Base::grosjean1(-0.3).unwrap(), p(&[0.1], &[0.4])).unwrap();
        assert!(identity_deviation(&gram_matrix(&model, 12).unwrap()) < 1e-6);
    }

    #[test]
    fn mass_just_outside_the_interval() {
        // a mass of about 5e-9 at 1 + 4e-9, invisible to a 2000-truncation
        let base = Base::grosjean1(-0.1).unwrap();
        let params = p(&[0.0, -0.8594300380071316], &[0.2, 0.44578790828240594]);
        let model = MeasureModel::build(base, params).unwrap();
        let near = model.masses().iter().find(|m| m.x > 1.0).unwrap();
        assert!(near.x - 1.0 < 1e-8 && near.mass > 0.0 && near.mass < 1e-8);
        let dev = identity_deviation(&gram_matrix(&model, 6).unwrap());
        assert!(dev < 1e-10, "gram deviation {dev}");
    }

    #[test]
    fn mass_at_matches_the_converged_direct_sum() {
        // p_2 nearly vanishes at the mass point near 1, which must not stop the sum
        let base = Base::grosjean1(-0.7918976596133955).unwrap();
        let params = p(
            &[
                0.21980869345866738,
                -0.4562482444635534,
                0.26412451657974545,
            ],
            &[1.137185448003925, 0.8747453393025773, 1.9016683438831437],
        );
        let x = 1.000223505984474;
        // oracle: plain forward sum up to where its terms are smallest
        let seq = extend(&base.sequence().unwrap(), &params);
        let (mut p0, mut p1, mut a_k, mut sum) = (0.0f64, 1.0f64, 0.0, 1.0);
        for k in 1..700 {
            let a_next = seq.a(k);
            let p2 = ((x - seq.b(k - 1)) * p1 - a_k * p0) / a_next;
            (p0, p1, a_k) = (p1, p2, a_next);
            sum += p1 * p1;
        }
        assert!(p1 * p1 < 1e-12 * sum);
        let mass = mass_at(&base, &params, x).unwrap();
        assert!(close(mass, 1.0 / sum, 1e-9), "{mass} vs {}", 1.0 / sum);
    }

    #[test]
    fn unresolvable_root_is_reported() {
        let base = Base::grosjean1(-0.8922857468409172).unwrap();
        let params = p(
            &[0.8179830884965051, 0.6102214887585489, 0.967366514693186],
            &[0.9576846015029932, 0.42365931711464055, 0.21832559663473497],
        );
        match MeasureModel::build(base.clone(), params.clone()) {
            Err(Error::UnresolvedMassPoint { x, needed, cap }) => {
                assert!(x < -1.0 && x > -1.0 - 1e-9 && needed > cap);
            }
            other => panic!("expected an unresolved mass point, got {other:?}"),
        }
        assert!(matches!(
            mass_at(&base, &params, -1.0 - 1e-12),
            Err(Error::UnresolvedMassPoint { .. })
        ));
    }

    #[test]
    fn model_orthonormal_matches_t() {
        let model = MeasureModel::from_parts(Base::ChebyshevU, p(&[0.0], &[0.5]), vec![]);
        let x: f64 = 0.3;
        let v = model_orthonormal(&model, 4, x).unwrap();
        assert!(close(v, 2f64.sqrt() * (5.0 * x.acos()).cos(), 1e-13));
    }
}
