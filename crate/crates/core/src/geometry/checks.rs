use serde::{Deserialize, Serialize};

use super::domain::ConvexDomain;
use super::sphere::SphereQuadrature;
use crate::constants::{sphere_moment, unit_ball_volume};
use crate::error::{HardyError, Result};
use crate::quadrature::Estimate;
use crate::report::SlackReport;

fn interior_depth(dom: &ConvexDomain, x: &[f64], quad: &SphereQuadrature) -> Result<f64> {
    if quad.dim() != dom.dim() {
        return Err(HardyError::Dimension {
            expected: dom.dim(),
            got: quad.dim(),
        });
    }
    let d = dom.boundary_distance(x)?;
    if d == 0.0 {
        return Err(HardyError::OnBoundary);
    }
    Ok(d)
}

fn point_label(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    parts.join(",")
}

/// Mean-distance bound: `int rho_w^{-p} dS >= K_p d(x)^{-p}`.
pub fn check_mean_distance_lemma(
    dom: &ConvexDomain,
    x: &[f64],
    p: f64,
    quad: &SphereQuadrature,
) -> Result<SlackReport> {
    let d = interior_depth(dom, x, quad)?;
    let kp = sphere_moment(dom.dim(), p)?;
    let lhs = quad.integrate(|w| {
        let mut s = vec![0.0; w.len()];
        let (rho, _, _) = dom.rho_b_unchecked(x, w, &mut s);
        rho.powf(-p)
    });
    Ok(SlackReport::new(
        format!("mean_distance/p={p}/x=[{}]", point_label(x)),
        lhs,
        Estimate::exact(kp * d.powf(-p)),
        None,
    ))
}

/// `int b_w^{-p} dS >= (int tau_w^N dS)^{-p/N}`.
pub fn check_bmean_bound(dom: &ConvexDomain, x: &[f64], p: f64, quad: &SphereQuadrature) -> Result<SlackReport> {
    interior_depth(dom, x, quad)?;
    if !(p > 1.0) {
        return Err(HardyError::domain("p", p, "> 1"));
    }
    let n = dom.dim() as f64;
    let [b_int, tau_int] = quad.integrate_many(|w| {
        let mut s = vec![0.0; w.len()];
        let (_, b, fwd) = dom.rho_b_unchecked(x, w, &mut s);
        [b.powf(-p), fwd.powf(n)]
    });
    let e = -p / n;
    let rhs = Estimate::new(
        tau_int.value.powf(e),
        e.abs() * tau_int.value.powf(e - 1.0) * tau_int.error,
    );
    Ok(SlackReport::new(
        format!("bmean/p={p}/x=[{}]", point_label(x)),
        b_int,
        rhs,
        None,
    ))
}

/// Outcome of comparing `a_N int tau_w^N dS` with the volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub case: String,
    pub estimate: f64,
    pub quad_error: f64,
    /// `None` where the volume has no closed form.
    pub exact: Option<f64>,
    pub rel_deviation: Option<f64>,
    pub rel_tol: f64,
    pub passed: Option<bool>,
}

/// `a_N int tau_w(x)^N dS(w) = |Omega|` for convex domains.
pub fn volume_identity(dom: &ConvexDomain, x: &[f64], quad: &SphereQuadrature, rel_tol: f64) -> Result<IdentityReport> {
    interior_depth(dom, x, quad)?;
    let n = dom.dim();
    let an = unit_ball_volume(n)?;
    let est = quad
        .integrate(|w| dom.exit_time_unchecked(x, w).powi(n as i32))
        .scale(an);
    let exact = dom.volume();
    let rel = exact.map(|v| (est.value - v).abs() / v);
    Ok(IdentityReport {
        case: format!("volume/x=[{}]", point_label(x)),
        estimate: est.value,
        quad_error: est.error,
        exact,
        rel_deviation: rel,
        rel_tol,
        passed: rel.map(|r| r <= rel_tol),
    })
}

/// Minimum of `(1 + t^N) / (1 + t)^N` over `t > 0` by golden-section search in
/// `ln t`. Returns `(minimum, argmin)`.
pub fn min_ratio_identity(n: usize) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(HardyError::domain("N", n as f64, ">= 1"));
    }
    let f = |u: f64| {
        // symmetric form, stable for large |u|
        let t = u.exp();
        let nn = n as i32;
        (1.0 + t.powi(nn)) / (1.0 + t).powi(nn)
    };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (-20.0f64, 20.0f64);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
        if b - a < 1e-12 {
            break;
        }
    }
    let u = 0.5 * (a + b);
    Ok((f(u), u.exp()))
}
