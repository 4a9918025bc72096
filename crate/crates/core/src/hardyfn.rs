//! The one-dimensional auxiliary functions
//!
//! ```text
//! g(s) = -((p-1)/p)^(p-1) s^(1-p) (1 - eta(s/D) - a eta(s/D)^2)
//! A(s) = g'(s) - (p-1)|g(s) - g(b)|^(p/(p-1)) - ((p-1)/p)^p s^-p
//!        - (1/2)((p-1)/p)^(p-1) s^-p B(s/D)
//! ```
//!
//! and grid verifiers for the conditions they must satisfy once `D` is large,
//! the cubic Taylor expansions used to compare them, and the one-dimensional
//! weighted inequality on `(0, 2b)` they feed into.

use serde::{Deserialize, Serialize};

use crate::constants::a_coeff;
use crate::error::{HardyError, Result};
use crate::logtower::Tower;
use crate::quadrature::{composite_estimate, GaussLegendre};
use crate::report::{GridReport, SlackReport};

/// Relative rounding tolerance for the pointwise grid conditions.
pub const GRID_TOL: f64 = 1e-12;
/// Relative tolerance for the `p = 2` equality.
pub const EQUALITY_TOL: f64 = 1e-10;

/// `n` points `b * ratio^-(n - i)`, ascending, all in `(0, b)`.
pub fn s_grid(b: f64, n: usize, ratio: f64) -> Vec<f64> {
    let lr = ratio.ln();
    (0..n).map(|i| b * (-(lr * (n - i) as f64)).exp()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub p: f64,
    pub k: usize,
    pub big_d: f64,
    pub b: f64,
    pub grid: Vec<f64>,
}

impl LemmaConfig {
    pub fn new(p: f64, k: usize, big_d: f64, b: f64, grid: Vec<f64>) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(HardyError::domain("p", p, "> 1"));
        }
        if !(b > 0.0 && b <= big_d) {
            return Err(HardyError::domain("b", b, "(0, D]"));
        }
        if grid.iter().any(|&s| !(s > 0.0 && s < b)) {
            return Err(HardyError::InvalidDomain("grid points must lie in (0, b)".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HardyError::InvalidDomain("grid must be strictly increasing".into()));
        }
        Ok(LemmaConfig { p, k, big_d, b, grid })
    }

    /// Config with the standard geometric grid of `n` points (ratio 1.01).
    pub fn with_geometric_grid(p: f64, k: usize, big_d: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(p, k, big_d, b, s_grid(b, n, crate::constants::GRID_RATIO))
    }

    pub fn a(&self) -> f64 {
        a_coeff(self.p, self.k)
    }

    fn c0(&self) -> f64 {
        ((self.p - 1.0) / self.p).powf(self.p)
    }

    fn c1(&self) -> f64 {
        ((self.p - 1.0) / self.p).powf(self.p - 1.0)
    }

    fn check_s(&self, s: f64) -> Result<()> {
        if s > 0.0 && s <= self.b {
            Ok(())
        } else {
            Err(HardyError::domain("s", s, "(0, b]"))
        }
    }

    fn tower(&self, s: f64) -> Tower {
        Tower::from_ln(self.k, (s / self.big_d).ln().min(0.0))
    }

    pub fn g(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        Ok(self.eval(s).g)
    }

    pub fn g_prime(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        Ok(self.eval(s).g_prime)
    }

    #[allow(non_snake_case)]
    pub fn A(&self, s: f64) -> Result<f64> {
        self.check_s(s)?;
        let gb = self.eval(self.b).g;
        Ok(self.eval(s).a_value(self.p, gb))
    }

    fn eval(&self, s: f64) -> Point {
        let p = self.p;
        let a = self.a();
        let tw = self.tower(s);
        let eta = tw.eta();
        let bsum = tw.bsum();
        let h = 1.0 - eta - a * eta * eta;
        let s_p = s.powf(-p);
        let c1 = self.c1();
        let g = -c1 * s.powf(1.0 - p) * h;
        // d/ds eta(s/D) = (B + eta^2) / (2s)
        let g_prime = c1 * s_p * ((p - 1.0) * h + (1.0 + 2.0 * a * eta) * 0.5 * (bsum + eta * eta));
        Point {
            g,
            g_prime,
            hardy: self.c0() * s_p,
            log: 0.5 * c1 * s_p * bsum,
        }
    }
}

struct Point {
    g: f64,
    g_prime: f64,
    hardy: f64,
    log: f64,
}

impl Point {
    fn a_value(&self, p: f64, gb: f64) -> f64 {
        self.g_prime - (p - 1.0) * (self.g - gb).abs().powf(p / (p - 1.0)) - self.hardy - self.log
    }

    fn magnitude(&self) -> f64 {
        self.g_prime.abs().max(self.hardy)
    }
}

/// Condition (i): `1 - eta - a eta^2 >= 0` at `diam / 2D`.
pub fn condition_i_margin(p: f64, k: usize, big_d: f64, diam: f64) -> f64 {
    let t = (0.5 * diam / big_d).min(1.0);
    let eta = Tower::new(k, t).map(|tw| tw.eta()).unwrap_or(f64::NAN);
    1.0 - eta - a_coeff(p, k) * eta * eta
}

/// Condition (ii) on the grid:
/// `g' - ((p-1)/p)^p s^-p - (1/2)((p-1)/p)^(p-1) s^-p B >= (p-1)|g|^(p/(p-1))`.
///
/// For `p = 2` the two sides are equal and the report carries the largest
/// relative residual; otherwise it carries the smallest relative slack.
pub fn check_lemma22_ii(cfg: &LemmaConfig) -> GridReport {
    let p = cfg.p;
    let equality = p == 2.0;
    let mut worst = if equality { 0.0 } else { f64::INFINITY };
    let mut worst_s = f64::NAN;
    for &s in &cfg.grid {
        let pt = cfg.eval(s);
        let lhs = pt.g_prime - pt.hardy - pt.log;
        let rhs = (p - 1.0) * pt.g.abs().powf(p / (p - 1.0));
        let scale = pt.magnitude();
        let rel = (lhs - rhs) / scale;
        let bad = if equality { rel.abs() > worst } else { rel < worst };
        if bad || worst_s.is_nan() {
            worst = if equality { rel.abs() } else { rel };
            worst_s = s;
        }
    }
    let (name, passed, tol) = if equality {
        ("lemma22_ii_equality", worst <= EQUALITY_TOL, EQUALITY_TOL)
    } else {
        ("lemma22_ii", worst >= -GRID_TOL, GRID_TOL)
    };
    GridReport::new(name, cfg, worst_s, worst, tol, passed)
}

/// Condition (iii): `A` decreasing on consecutive grid points, up to a
/// relative rounding tolerance. The report carries the largest relative rise.
pub fn check_a_monotone(cfg: &LemmaConfig) -> GridReport {
    let gb = cfg.eval(cfg.b).g;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_s = f64::NAN;
    let mut prev: Option<(f64, f64)> = None;
    for &s in &cfg.grid {
        let pt = cfg.eval(s);
        let val = pt.a_value(cfg.p, gb);
        let mag = pt.magnitude();
        if let Some((pv, pmag)) = prev {
            let rise = (val - pv) / pmag.max(mag);
            if rise > worst {
                worst = rise;
                worst_s = s;
            }
        }
        prev = Some((val, mag));
    }
    GridReport::new("lemma22_iii_monotone", cfg, worst_s, worst, GRID_TOL, worst <= GRID_TOL)
}

/// All three conditions with `b = diam / 2`.
pub(crate) fn lemma22_certified(cfg: &LemmaConfig, diam: f64) -> bool {
    condition_i_margin(cfg.p, cfg.k, cfg.big_d, diam) >= 0.0
        && check_lemma22_ii(cfg).passed
        && check_a_monotone(cfg).passed
}

/// Which expansion of `(1 - eta - a eta^2)^q` to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expansion {
    /// exponent `p/(p-1)`
    Hop,
    /// exponent `1/(p-1)`
    Snow,
}

/// Coefficients `[c0, c1, c2, c3]` of the cubic Taylor polynomial in `eta`.
pub fn taylor_coefficients(p: f64, a: f64, which: Expansion) -> [f64; 4] {
    let q = p - 1.0;
    match which {
        Expansion::Hop => [
            1.0,
            -p / q,
            -a * p / q + p / (2.0 * q * q),
            p * a / (q * q) + p * (p - 2.0) / (6.0 * q * q * q),
        ],
        Expansion::Snow => [
            1.0,
            -1.0 / q,
            -(a / q + (p - 2.0) / (2.0 * q * q)),
            -((p - 2.0) * a / (q * q) - (p - 2.0) * (3.0 - 2.0 * p) / (6.0 * q * q * q)),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorReport {
    pub p: f64,
    pub k: usize,
    pub expansion: Expansion,
    pub etas: Vec<f64>,
    pub remainders: Vec<f64>,
    /// `remainder / eta^4`
    pub ratios: Vec<f64>,
    pub passed: bool,
}

/// Halving sequence `0.1, 0.05, 0.025, 0.0125`.
pub const TAYLOR_ETAS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Exact function minus its cubic polynomial at the halving sequence; passes
/// when `|remainder| / eta^4` does not grow more than twofold (a wrong cubic
/// coefficient makes it double at every halving).
pub fn taylor_remainder_check(p: f64, k: usize, which: Expansion) -> Result<TaylorReport> {
    if !(p > 1.0) {
        return Err(HardyError::domain("p", p, "> 1"));
    }
    let a = a_coeff(p, k);
    let exponent = match which {
        Expansion::Hop => p / (p - 1.0),
        Expansion::Snow => 1.0 / (p - 1.0),
    };
    let c = taylor_coefficients(p, a, which);
    let mut remainders = Vec::new();
    let mut ratios = Vec::new();
    for &e in &TAYLOR_ETAS {
        let exact = (1.0 - e - a * e * e).powf(exponent);
        let poly = c[0] + e * (c[1] + e * (c[2] + e * c[3]));
        let r = exact - poly;
        remainders.push(r);
        ratios.push(r / e.powi(4));
    }
    let first = ratios[0].abs();
    let passed = ratios.iter().all(|r| r.is_finite() && r.abs() <= 2.0 * first + 1e-6);
    Ok(TaylorReport {
        p,
        k,
        expansion: which,
        etas: TAYLOR_ETAS.to_vec(),
        remainders,
        ratios,
        passed,
    })
}

/// A continuously differentiable function on `(0, b]`.
pub trait Auxiliary {
    fn value(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;
}

impl Auxiliary for LemmaConfig {
    fn value(&self, s: f64) -> f64 {
        self.eval(s).g
    }
    fn derivative(&self, s: f64) -> f64 {
        self.eval(s).g_prime
    }
}

/// Test functions on `(0, 2b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TestFunction1D {
    Zero,
    /// `t^2 (2b - t)^2`
    Bump {
        b: f64,
    },
    /// `sin(pi t / 2b)`
    Sine {
        b: f64,
    },
    /// Affine `1 + t`, which does not vanish at the ends.
    Affine,
}

impl TestFunction1D {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TestFunction1D::Zero => 0.0,
            TestFunction1D::Bump { b } => (t * (2.0 * b - t)).powi(2),
            TestFunction1D::Sine { b } => (std::f64::consts::PI * t / (2.0 * b)).sin(),
            TestFunction1D::Affine => 1.0 + t,
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            TestFunction1D::Zero => 0.0,
            TestFunction1D::Bump { b } => 2.0 * t * (2.0 * b - t) * (2.0 * b - 2.0 * t),
            TestFunction1D::Sine { b } => {
                let w = std::f64::consts::PI / (2.0 * b);
                w * (w * t).cos()
            }
            TestFunction1D::Affine => 1.0,
        }
    }
}

/// Panels per half-interval for the one-dimensional check.
pub const LEMMA21_PANELS: usize = 2048;

/// Both sides of
/// `int_0^2b |u'|^p >= int_0^2b {g'(rho) - (p-1)|g(rho) - g(b)|^(p/(p-1))} |u|^p`
/// with `rho(t) = min(t, 2b - t)`.
pub fn check_lemma21(u: &TestFunction1D, g: &dyn Auxiliary, b: f64, p: f64) -> Result<SlackReport> {
    if !(b > 0.0) {
        return Err(HardyError::domain("b", b, "> 0"));
    }
    let scale = (0..=16)
        .map(|i| u.value(2.0 * b * i as f64 / 16.0).abs())
        .fold(0.0, f64::max)
        .max(1.0);
    if u.value(0.0).abs() > 1e-12 * scale || u.value(2.0 * b).abs() > 1e-12 * scale {
        return Err(HardyError::Inadmissible("u must vanish at 0 and 2b".into()));
    }
    let rule = GaussLegendre::new(8);
    let gb = g.value(b);
    let q = p / (p - 1.0);
    let weight = |s: f64| g.derivative(s) - (p - 1.0) * (g.value(s) - gb).abs().powf(q);
    let lhs = composite_estimate(&rule, 0.0, 2.0 * b, 2 * LEMMA21_PANELS, |t| {
        u.derivative(t).abs().powf(p)
    });
    let left = composite_estimate(&rule, 0.0, b, LEMMA21_PANELS, |t| weight(t) * u.value(t).abs().powf(p));
    let right = composite_estimate(&rule, b, 2.0 * b, LEMMA21_PANELS, |t| {
        weight(2.0 * b - t) * u.value(t).abs().powf(p)
    });
    Ok(SlackReport::new("lemma21_ii".to_string(), lhs, left + right, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::d0_threshold;
    use approx::assert_relative_eq;

    fn cfg(p: f64, k: usize, d: f64, b: f64) -> LemmaConfig {
        LemmaConfig::with_geometric_grid(p, k, d, b, 1000).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(LemmaConfig::new(2.0, 1, 1.0, 1.0, vec![0.5, 0.4]).is_err());
        assert!(LemmaConfig::new(2.0, 1, 1.0, 1.0, vec![0.5, 1.0]).is_err());
        assert!(LemmaConfig::new(2.0, 1, 0.5, 1.0, vec![0.2]).is_err());
        assert!(LemmaConfig::new(1.0, 1, 1.0, 1.0, vec![0.2]).is_err());
        let c = cfg(2.0, 1, 1.0, 1.0);
        assert_eq!(c.grid.len(), 1000);
        assert!(c.grid[999] < 1.0 && c.grid[0] > 0.0);
    }

    #[test]
    fn g_values() {
        let c = cfg(2.0, 0, 1.0, 1.0);
        for &s in &[0.01, 0.3, 1.0] {
            assert_relative_eq!(c.g(s).unwrap(), -0.5 / s, max_relative = 1e-15);
            assert_relative_eq!(c.g_prime(s).unwrap(), 0.5 / (s * s), max_relative = 1e-15);
        }
        let d = 2.0;
        let c = cfg(2.0, 1, d, 1.0);
        let s = d * (-1.0f64).exp();
        assert_relative_eq!(c.g(s).unwrap(), -0.5 / s * 0.5, max_relative = 1e-14);
        assert!(c.g(0.0).is_err());
        assert!(c.g(1.5).is_err());
        // s^(p-1) g(s) -> -((p-1)/p)^(p-1) as s -> 0
        let c = cfg(3.0, 2, 4.0, 1.0);
        let lim = c.g(1e-150).unwrap() * 1e-150 * 1e-150;
        assert!((lim + (2.0f64 / 3.0).powi(2)).abs() < 0.02);
    }

    #[test]
    fn g_prime_matches_finite_difference() {
        for &(p, k) in &[(3.0, 2), (1.5, 1), (2.0, 3), (2.5, 0)] {
            let c = cfg(p, k, 5.0, 1.0);
            for &s in &[0.5, 0.1, 1e-3, 0.9] {
                let h = 1e-5 * s;
                let fd = (c.g(s + h).unwrap() - c.g(s - h).unwrap()) / (2.0 * h);
                assert_relative_eq!(c.g_prime(s).unwrap(), fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn a_closed_form_p2_k0() {
        let c = cfg(2.0, 0, 1.0, 1.0);
        for s in [0.1f64, 0.5, 0.9] {
            let expect = 0.5 / (s * s) - (0.5 * (1.0 / s - 1.0)).powi(2) - 0.25 / (s * s);
            assert_relative_eq!(c.A(s).unwrap(), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn p2_equality() {
        for k in 0..=4 {
            let d0 = d0_threshold(2.0, k, 2.0);
            let r = check_lemma22_ii(&cfg(2.0, k, d0, 1.0));
            assert!(r.passed, "{r:?}");
            assert!(r.worst_value <= 1e-10);
        }
    }

    #[test]
    fn lemma22_p_not_2() {
        let d0 = d0_threshold(3.0, 1, 2.0);
        assert!(check_lemma22_ii(&cfg(3.0, 1, d0, 1.0)).passed);
        assert!(check_a_monotone(&cfg(3.0, 1, 10.0 * d0, 1.0)).passed);
        // k = 0 makes (ii) an identity
        let r = check_lemma22_ii(&cfg(1.5, 0, 1.0, 1.0));
        assert!(r.passed && r.worst_value.abs() < 1e-13, "{r:?}");
    }

    #[test]
    fn monotone_examples() {
        assert!(check_a_monotone(&cfg(2.0, 1, 1.0, 1.0)).passed);
        let d0 = d0_threshold(1.5, 2, 2.0);
        assert!(check_a_monotone(&cfg(1.5, 2, 4.0 * d0, 1.0)).passed);
    }

    #[test]
    fn condition_i_over_d_sweep() {
        for &p in &[1.5, 2.0, 3.0] {
            for k in 0..=3 {
                let d0 = d0_threshold(p, k, 2.0);
                for m in [1.0, 1.5, 2.0, 10.0, 1e3] {
                    assert!(condition_i_margin(p, k, m * d0, 2.0) >= 0.0, "p={p} k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn taylor_coefficients_against_derivatives() {
        // finite-difference Taylor coefficients of the exact function at 0
        for &p in &[1.5, 3.0, 4.0] {
            for k in 0..3 {
                let a = a_coeff(p, k);
                for which in [Expansion::Hop, Expansion::Snow] {
                    let q = match which {
                        Expansion::Hop => p / (p - 1.0),
                        Expansion::Snow => 1.0 / (p - 1.0),
                    };
                    let f = |e: f64| (1.0 - e - a * e * e).powf(q);
                    let h = 1e-2;
                    let d1 = (f(h) - f(-h)) / (2.0 * h);
                    let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
                    let d3 = (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h);
                    let c = taylor_coefficients(p, a, which);
                    assert!((c[1] - d1).abs() < 1e-3, "{p} {k} {which:?}");
                    assert!((c[2] - d2 / 2.0).abs() < 1e-3, "{p} {k} {which:?}");
                    assert!((c[3] - d3 / 6.0).abs() < 1e-2 * (1.0 + c[3].abs()), "{p} {k} {which:?}");
                }
            }
        }
        let c = taylor_coefficients(1.5, 0.0, Expansion::Hop);
        assert_relative_eq!(c[3], 1.5 * (-0.5) / (6.0 * 0.125), max_relative = 1e-15);
        assert!(c[3] < 0.0);
    }

    #[test]
    fn taylor_remainders_are_quartic() {
        for &p in &[1.5, 3.0] {
            for which in [Expansion::Hop, Expansion::Snow] {
                let r = taylor_remainder_check(p, 1, which).unwrap();
                assert!(r.passed, "{r:?}");
            }
        }
        let r = taylor_remainder_check(2.0, 1, Expansion::Hop).unwrap();
        assert!(r.remainders.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn lemma21_examples() {
        let b = 0.5;
        let u = TestFunction1D::Bump { b };
        let g = LemmaConfig::with_geometric_grid(2.0, 1, 2.0, b, 10).unwrap();
        let r = check_lemma21(&u, &g, b, 2.0).unwrap();
        assert!(r.passed && r.slack > 0.0, "{r:?}");
        let zero = check_lemma21(&TestFunction1D::Zero, &g, b, 2.0).unwrap();
        assert_eq!(zero.lhs, 0.0);
        assert_eq!(zero.rhs, 0.0);
        let g0 = LemmaConfig::with_geometric_grid(2.0, 0, 2.0, b, 10).unwrap();
        let r = check_lemma21(&TestFunction1D::Sine { b }, &g0, b, 2.0).unwrap();
        assert!(r.passed && r.slack >= -10.0 * r.quad_error, "{r:?}");
        assert!(check_lemma21(&TestFunction1D::Affine, &g0, b, 2.0).is_err());
        let g3 = LemmaConfig::with_geometric_grid(3.0, 1, 10.0, b, 10).unwrap();
        assert!(check_lemma21(&u, &g3, b, 3.0).unwrap().passed);
    }
}
