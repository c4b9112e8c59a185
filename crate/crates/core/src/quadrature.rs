//! Composite Gauss-Legendre integration in the angle variable `x = cos(theta)`.
//!
//! Densities on `[-1, 1]` with algebraic endpoint behaviour become
//! `theta^s`-type integrands near `theta = 0, pi`. The two end panels are
//! therefore split geometrically towards the endpoint, and the uniform panel
//! count is doubled until the result stabilizes.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::families::jacobi_coeffs;
use crate::scalar::Real;
use crate::spectral::gauss_rule;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelRule {
    /// Uniform panels on `[0, pi]` in the first pass.
    pub panels: usize,
    /// Gauss-Legendre points per panel.
    pub order: usize,
    /// Geometric sub-panels inside each end panel.
    pub grading: usize,
    /// Ratio between consecutive graded sub-panels.
    pub ratio: f64,
    /// Largest change allowed between the last two passes, relative to
    /// `max(1, |value|)`.
    pub tol: f64,
    /// Give up once the uniform panel count would exceed this.
    pub max_panels: usize,
}

impl Default for PanelRule {
    fn default() -> Self {
        PanelRule {
            panels: 64,
            order: 32,
            grading: 30,
            ratio: 0.15,
            tol: 1e-8,
            max_panels: 1024,
        }
    }
}

/// Outcome of a converged integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub values: Vec<f64>,
    /// Largest entrywise change in the final doubling.
    pub change: f64,
    pub panels: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, built from the Legendre
/// recurrence.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let leg = jacobi_coeffs(Real::integer(0), Real::integer(0))?;
    let rule = gauss_rule(&leg, order)?;
    // the recurrence rule is normalized to the probability measure dx/2
    Ok((
        rule.nodes,
        rule.weights.into_iter().map(|w| 2.0 * w).collect(),
    ))
}

fn intervals(rule: &PanelRule, panels: usize) -> Vec<(f64, f64)> {
    let h = PI / panels as f64;
    let mut out = Vec::with_capacity(panels + 2 * rule.grading);
    // [0, h] split as [0, h r^K], ..., [h r^2, h r], [h r, h]
    let mut edges = vec![h];
    for _ in 0..rule.grading {
        edges.push(edges.last().expect("nonempty") * rule.ratio);
    }
    edges.push(0.0);
    edges.reverse();
    for w in edges.windows(2) {
        out.push((w[0], w[1]));
    }
    for k in 1..panels - 1 {
        out.push((k as f64 * h, (k + 1) as f64 * h));
    }
    for &(a, b) in out[..=rule.grading].to_vec().iter().rev() {
        out.push((PI - b, PI - a));
    }
    out
}

fn one_pass<F>(
    rule: &PanelRule,
    panels: usize,
    dim: usize,
    gl: &(Vec<f64>, Vec<f64>),
    exec: Execution,
    f: &F,
) -> Vec<f64>
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    let parts = intervals(rule, panels);
    let partials = exec.map_slice(&parts, |&(a, b)| {
        let mut acc = vec![0.0; dim];
        let mut buf = vec![0.0; dim];
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (t, w) in gl.0.iter().zip(&gl.1) {
            buf.iter_mut().for_each(|v| *v = 0.0);
            f(mid + half * t, &mut buf);
            for (s, v) in acc.iter_mut().zip(&buf) {
                *s += w * half * v;
            }
        }
        acc
    });
    let mut total = vec![0.0; dim];
    for p in partials {
        for (s, v) in total.iter_mut().zip(p) {
            *s += v;
        }
    }
    total
}

/// Integrates a vector-valued `g(theta)` over `[0, pi]`; `f(theta, out)` must
/// fill `out` (length `dim`).
pub fn integrate_theta<F>(rule: &PanelRule, dim: usize, exec: Execution, f: F) -> Result<Integral>
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    if rule.panels < 2 || rule.order == 0 || !(rule.ratio > 0.0 && rule.ratio < 1.0) {
        return Err(Error::InvalidParameter(
            "panel rule needs >= 2 panels, order >= 1 and 0 < ratio < 1".into(),
        ));
    }
    let gl = gauss_legendre(rule.order)?;
    let mut panels = rule.panels;
    let mut prev = one_pass(rule, panels, dim, &gl, exec, &f);
    loop {
        if 2 * panels > rule.max_panels {
            let change = f64::NAN;
            return Err(Error::QuadratureNotConverged { change, panels });
        }
        panels *= 2;
        let next = one_pass(rule, panels, dim, &gl, exec, &f);
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
            .fold(0.0, f64::max);
        if !change.is_finite() {
            return Err(Error::QuadratureNotConverged { change, panels });
        }
        if change <= rule.tol {
            return Ok(Integral {
                values: next,
                change,
                panels,
            });
        }
        if 2 * panels > rule.max_panels {
            return Err(Error::QuadratureNotConverged { change, panels });
        }
        prev = next;
    }
}

/// A point of `(-1, 1)` given through its angle, with `1 - x` and `1 + x`
/// computed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePoint {
    pub theta: f64,
    pub x: f64,
    pub one_minus_x: f64,
    pub one_plus_x: f64,
    /// `sqrt(1 - x^2) = sin(theta)`.
    pub sin: f64,
}

impl AnglePoint {
    pub fn from_theta(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        AnglePoint {
            theta,
            x: theta.cos(),
            one_minus_x: 2.0 * s * s,
            one_plus_x: 2.0 * c * c,
            sin: theta.sin(),
        }
    }

    pub fn from_x(x: f64) -> Self {
        AnglePoint {
            theta: x.acos(),
            x,
            one_minus_x: 1.0 - x,
            one_plus_x: 1.0 + x,
            sin: (1.0 - x * x).sqrt(),
        }
    }
}

/// `int_{-1}^{1} f(x) dx` for integrands written in terms of an [`AnglePoint`].
pub fn integrate_x<F>(rule: &PanelRule, dim: usize, exec: Execution, f: F) -> Result<Integral>
where
    F: Fn(&AnglePoint, &mut [f64]) + Sync,
{
    integrate_theta(rule, dim, exec, |theta, out| {
        let pt = AnglePoint::from_theta(theta);
        f(&pt, out);
        out.iter_mut().for_each(|v| *v *= pt.sin);
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{grosjean1_weight_factors, grosjean2_weight_factors};

    #[test]
    fn legendre_nodes() {
        let (x, w) = gauss_legendre(5).unwrap();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(x[2].abs() < 1e-15);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn panels_tile_the_interval() {
        let rule = PanelRule::default();
        let parts = intervals(&rule, 8);
        assert_eq!(parts.first().unwrap().0, 0.0);
        assert!((parts.last().unwrap().1 - PI).abs() < 1e-15);
        for w in parts.windows(2) {
            assert!((w[0].1 - w[1].0).abs() < 1e-15);
        }
    }

    #[test]
    fn polynomial_and_power_integrands() {
        let rule = PanelRule::default();
        let r = integrate_x(&rule, 2, Execution::default(), |p, out| {
            out[0] = p.x * p.x;
            out[1] = p.one_minus_x.powf(-0.7);
        })
        .unwrap();
        assert!((r.values[0] - 2.0 / 3.0).abs() < 1e-13);
        // int (1-x)^(-0.7) dx = 2^0.3 / 0.3
        assert!((r.values[1] - 2f64.powf(0.3) / 0.3).abs() < 1e-10);
    }

    #[test]
    fn grosjean_weights_have_unit_mass() {
        for alpha in [-0.3, -0.7, -0.5] {
            let r = integrate_x(&PanelRule::default(), 1, Execution::default(), |p, out| {
                out[0] = grosjean1_weight_factors(alpha, p.one_minus_x, p.one_plus_x);
            })
            .unwrap();
            assert!(
                (r.values[0] - 1.0).abs() < 1e-9,
                "alpha={alpha}: {}",
                r.values[0]
            );
        }
        for alpha in [-0.3, 0.5, 1.4] {
            let r = integrate_x(&PanelRule::default(), 1, Execution::default(), |p, out| {
                out[0] = grosjean2_weight_factors(alpha, p.one_minus_x, p.one_plus_x);
            })
            .unwrap();
            assert!(
                (r.values[0] - 1.0).abs() < 1e-9,
                "alpha={alpha}: {}",
                r.values[0]
            );
        }
    }

    #[test]
    fn reports_non_convergence() {
        let rule = PanelRule {
            max_panels: 128,
            ..PanelRule::default()
        };
        let r = integrate_theta(&rule, 1, Execution::Sequential, |t, out| {
            out[0] = (1e4 * t + 0.3).sin() * 1e3
        });
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }
}
