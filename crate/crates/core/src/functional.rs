//! Hardy functionals of `u = phi(d(x))` and radial `u` on balls, and the
//! inequality checks built from them.
//!
//! The default route reduces every integral to one dimension through the level
//! sets of the distance function, `int_Omega F(d) dx = int_0^dmax F(t) S(t) dt`,
//! with `S(t)` the surface measure of `{d = t}`. The integrand is evaluated in
//! logarithmic form and the region near `t = 0` is mapped by
//! `t = t_c exp(1 - e^v)`, which reaches depths far below the smallest positive
//! double. A pointwise route (tensor Gauss for boxes, radial Gauss times sphere
//! quadrature for balls) is available as an independent check.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::constants::{a_coeff, d0_threshold, kp_constant, unit_ball_volume, HardyParams};
use crate::error::{HardyError, Result};
use crate::geometry::{ConvexDomain, HPolytope, SphereQuadrature, POLYTOPE_MEASURE_MAX_DIM};
use crate::logtower::{log_sum_exp, Tower};
use crate::quadrature::{graded_breaks, Estimate, GaussLegendre};
use crate::report::SlackReport;

/// A depth `t = d(x)` with its logarithm, which stays finite when `t` underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Depth {
    pub t: f64,
    pub ln_t: f64,
}

impl Depth {
    pub fn new(t: f64) -> Self {
        Depth { t, ln_t: t.ln() }
    }

    pub fn from_ln(ln_t: f64) -> Self {
        Depth { t: ln_t.exp(), ln_t }
    }
}

fn ln_x1(ln_tau: f64) -> f64 {
    -(-ln_tau.min(0.0)).ln_1p()
}

/// `ln |u| = beta ln t + rest_u` and `ln |grad u| = (beta - 1) ln t + rest_g`.
///
/// Keeping the power of `t` apart lets the integrands combine it exactly when
/// `ln t` is astronomically large.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnParts {
    pub beta: f64,
    pub rest_u: f64,
    pub rest_g: f64,
}

impl LnParts {
    pub fn new(beta: f64, rest_u: f64, rest_g: f64) -> Self {
        LnParts { beta, rest_u, rest_g }
    }

    pub fn ln_value(&self, at: Depth) -> f64 {
        self.beta * at.ln_t + self.rest_u
    }

    pub fn ln_abs_slope(&self, at: Depth) -> f64 {
        (self.beta - 1.0) * at.ln_t + self.rest_g
    }
}

/// Scalar profile `phi` with `phi(0) = 0`, positive on the depth range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// `t`
    Linear,
    /// `t (1 - t / dmax)`
    Tent { dmax: f64 },
    /// `t^2`
    Quadratic,
    /// `t^e`
    Power { exponent: f64 },
    /// `t X_1(t / scale)`
    LogWeighted { scale: f64 },
    /// `h tanh(t / h)`, a smoothed `min(t, h)`
    Saturated { h: f64 },
    /// `t^{(p-1)/p} X_1(t / scale)^{1/p + alpha}`, concentrating at the boundary
    /// as `alpha -> 0`.
    Boundary { p: f64, alpha: f64, scale: f64 },
}

impl Profile {
    /// Split `ln phi = beta ln t + rest_u`, `ln |phi'| = (beta - 1) ln t + rest_g`.
    pub fn ln_parts(&self, at: Depth) -> LnParts {
        let lt = at.ln_t;
        match *self {
            Profile::Linear => LnParts::new(1.0, 0.0, 0.0),
            Profile::Tent { dmax } => LnParts::new(1.0, (-at.t / dmax).ln_1p(), (1.0 - 2.0 * at.t / dmax).abs().ln()),
            Profile::Quadratic => LnParts::new(2.0, 0.0, std::f64::consts::LN_2),
            Profile::Power { exponent } => LnParts::new(exponent, 0.0, exponent.abs().ln()),
            Profile::LogWeighted { scale } => {
                let lx = ln_x1(lt - scale.ln());
                LnParts::new(1.0, lx, lx + lx.exp().ln_1p())
            }
            Profile::Saturated { h } => {
                let x = at.t / h;
                let ratio = if x < 1e-8 { 0.0 } else { (x.tanh() / x).ln() };
                LnParts::new(1.0, ratio, -2.0 * x.cosh().ln())
            }
            Profile::Boundary { p, alpha, scale } => {
                let lx = ln_x1(lt - scale.ln());
                let e = 1.0 / p + alpha;
                LnParts::new((p - 1.0) / p, e * lx, e * lx + ((p - 1.0) / p + e * lx.exp()).ln())
            }
        }
    }

    pub fn ln_value(&self, at: Depth) -> f64 {
        self.ln_parts(at).ln_value(at)
    }

    /// `ln |phi'(t)|`.
    pub fn ln_abs_slope(&self, at: Depth) -> f64 {
        self.ln_parts(at).ln_abs_slope(at)
    }

    /// `(beta, delta)` with `phi(t) ~ t^beta X_1(t)^delta` as `t -> 0`.
    fn small_t(&self) -> (f64, f64) {
        match *self {
            Profile::Linear | Profile::Tent { .. } | Profile::Saturated { .. } => (1.0, 0.0),
            Profile::Quadratic => (2.0, 0.0),
            Profile::Power { exponent } => (exponent, 0.0),
            Profile::LogWeighted { .. } => (1.0, 1.0),
            Profile::Boundary { p, alpha, .. } => ((p - 1.0) / p, 1.0 / p + alpha),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match *self {
            Profile::Tent { dmax } => vec![0.5 * dmax],
            _ => Vec::new(),
        }
    }

    fn validate(&self, dmax: f64) -> Result<()> {
        let bad = |m: &str| Err(HardyError::Inadmissible(m.to_string()));
        match *self {
            Profile::Tent { dmax: m } if m < dmax => bad("tent must stay positive on the domain"),
            Profile::Power { exponent } if !(exponent > 0.0) => bad("profile must vanish at t = 0"),
            Profile::LogWeighted { scale } | Profile::Boundary { scale, .. } if scale < dmax => {
                bad("log scale must dominate the inradius")
            }
            Profile::Saturated { h } if !(h > 0.0) => bad("saturation level must be positive"),
            Profile::Boundary { p, alpha, .. } if !(p > 1.0 && alpha > 0.0) => {
                bad("boundary profile needs p > 1 and alpha > 0")
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Profile::Linear => "linear".into(),
            Profile::Tent { .. } => "tent".into(),
            Profile::Quadratic => "quadratic".into(),
            Profile::Power { exponent } => format!("power{exponent}"),
            Profile::LogWeighted { .. } => "logweighted".into(),
            Profile::Saturated { .. } => "saturated".into(),
            Profile::Boundary { alpha, .. } => format!("boundary-alpha{alpha}"),
        }
    }
}

/// Radial profile `psi(r)` on a ball of radius `R`, with `psi(R) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialProfile {
    /// `cos(pi r / 2R)`
    Cosine,
    /// `1 - (r / R)^2`
    Parabolic,
}

/// Admissible trial function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `u = 0`
    Zero,
    /// `u(x) = phi(d(x))`, `|grad u| = |phi'(d)|` almost everywhere.
    Distance(Profile),
    /// `u(x) = psi(|x - c|)` on a ball of the given radius.
    Radial { profile: RadialProfile, radius: f64 },
}

impl TestFunction {
    pub fn label(&self) -> String {
        match self {
            TestFunction::Zero => "zero".into(),
            TestFunction::Distance(p) => p.label(),
            TestFunction::Radial {
                profile: RadialProfile::Cosine,
                ..
            } => "radial-cosine".into(),
            TestFunction::Radial {
                profile: RadialProfile::Parabolic,
                ..
            } => "radial-parabolic".into(),
        }
    }

    /// Logarithms of `|u|` and `|grad u|` as functions of the depth.
    pub fn ln_parts(&self, at: Depth) -> LnParts {
        match *self {
            TestFunction::Zero => LnParts::new(1.0, f64::NEG_INFINITY, f64::NEG_INFINITY),
            TestFunction::Distance(p) => p.ln_parts(at),
            TestFunction::Radial { profile, radius } => match profile {
                RadialProfile::Cosine => {
                    let c = std::f64::consts::FRAC_PI_2 / radius;
                    let x = c * at.t;
                    let ratio = if x < 1e-8 { 0.0 } else { (x.sin() / x).ln() };
                    LnParts::new(1.0, c.ln() + ratio, c.ln() + x.cos().ln())
                }
                RadialProfile::Parabolic => {
                    let s = at.t / radius;
                    LnParts::new(1.0, (2.0 - s).ln() - radius.ln(), (2.0 / radius).ln() + (1.0 - s).ln())
                }
            },
        }
    }

    /// `(|u(x)|, |grad u(x)|)` evaluated directly at a point.
    fn at_point(&self, dom: &ConvexDomain, x: &[f64]) -> (f64, f64) {
        match *self {
            TestFunction::Zero => (0.0, 0.0),
            TestFunction::Distance(p) => {
                let at = Depth::new(dom.signed_distance(x).max(0.0));
                let parts = p.ln_parts(at);
                (parts.ln_value(at).exp(), parts.ln_abs_slope(at).exp())
            }
            TestFunction::Radial { profile, radius } => {
                let c = dom.reference_point();
                let r = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                let s = r / radius;
                match profile {
                    RadialProfile::Cosine => {
                        let k = std::f64::consts::FRAC_PI_2;
                        ((k * s).cos(), (k / radius) * (k * s).sin())
                    }
                    RadialProfile::Parabolic => (1.0 - s * s, 2.0 * s / radius),
                }
            }
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            TestFunction::Distance(p) => p.kinks(),
            TestFunction::Zero | TestFunction::Radial { .. } => Vec::new(),
        }
    }

    /// Whether `int |u|^p / d^p` and `int |grad u|^p` converge at the boundary.
    pub fn hardy_integrable(&self, p: f64) -> bool {
        let (beta, delta) = match self {
            TestFunction::Distance(prof) => prof.small_t(),
            TestFunction::Zero | TestFunction::Radial { .. } => (1.0, 0.0),
        };
        let e = p * (beta - 1.0);
        e > -1.0 + 1e-12 || ((e + 1.0).abs() <= 1e-12 && p * delta > 1.0)
    }

    fn validate(&self, dom: &ConvexDomain, dmax: f64, p: f64) -> Result<()> {
        match self {
            TestFunction::Zero => {}
            TestFunction::Distance(prof) => prof.validate(dmax)?,
            TestFunction::Radial { radius, .. } => match dom {
                ConvexDomain::Ball { radius: r, .. } if (r - radius).abs() <= 1e-12 * r => {}
                _ => {
                    return Err(HardyError::Inadmissible(
                        "radial profile needs a ball of the same radius".into(),
                    ))
                }
            },
        }
        if !self.hardy_integrable(p) {
            return Err(HardyError::Inadmissible(format!(
                "{}: |u|^p / d^p is not integrable at the boundary",
                self.label()
            )));
        }
        Ok(())
    }

    /// The fixed five-member distance-profile suite for a domain.
    pub fn suite(dom: &ConvexDomain) -> Result<Vec<TestFunction>> {
        let dmax = inradius(dom)?;
        Ok(vec![
            TestFunction::Distance(Profile::Linear),
            TestFunction::Distance(Profile::Tent { dmax }),
            TestFunction::Distance(Profile::Quadratic),
            TestFunction::Distance(Profile::LogWeighted { scale: dom.diameter() }),
            TestFunction::Distance(Profile::Saturated { h: 0.5 * dmax }),
        ])
    }

    /// Radial profiles for a ball.
    pub fn radial_suite(dom: &ConvexDomain) -> Result<Vec<TestFunction>> {
        match dom {
            ConvexDomain::Ball { radius, .. } => Ok(vec![
                TestFunction::Radial {
                    profile: RadialProfile::Cosine,
                    radius: *radius,
                },
                TestFunction::Radial {
                    profile: RadialProfile::Parabolic,
                    radius: *radius,
                },
            ]),
            _ => Err(HardyError::Unsupported("radial profiles need a ball".into())),
        }
    }
}

/// Exponents `alpha` of the boundary-concentrating family.
pub const SHARPNESS_ALPHAS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// `phi_alpha(t) = t^{(p-1)/p} X_1(t / D)^{1/p + alpha}` for each `alpha`.
pub fn sharpness_family(p: f64, big_d: f64, alphas: &[f64]) -> Vec<TestFunction> {
    alphas
        .iter()
        .map(|&alpha| TestFunction::Distance(Profile::Boundary { p, alpha, scale: big_d }))
        .collect()
}

fn inradius(dom: &ConvexDomain) -> Result<f64> {
    dom.inradius()
        .ok_or_else(|| HardyError::Unsupported("inradius of this domain".into()))
}

/// Level-set integration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSetRule {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Panel width in `ln t` on the core interval.
    pub panel_width: f64,
    /// The core interval is `[dmax 10^-decades, dmax]`.
    pub core_decades: f64,
    /// Largest value of the tail variable `v`.
    pub max_v: f64,
}

impl Default for LevelSetRule {
    fn default() -> Self {
        LevelSetRule {
            order: 10,
            panel_width: 0.5,
            core_decades: 6.0,
            max_v: 690.0,
        }
    }
}

impl LevelSetRule {
    /// Twice the resolution.
    pub fn refined(&self) -> Self {
        LevelSetRule {
            panel_width: 0.5 * self.panel_width,
            ..*self
        }
    }
}

/// Pointwise quadrature parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseRule {
    /// Panels in the depth (box pyramids) or in the radius (ball).
    pub panels: usize,
    pub order: usize,
    /// Ratio of the smallest to the largest panel next to the boundary.
    pub grading: f64,
    pub sphere_resolution: usize,
    pub seed: u64,
}

impl Default for PointwiseRule {
    fn default() -> Self {
        PointwiseRule {
            panels: 16,
            order: 6,
            grading: 1e-3,
            sphere_resolution: 64,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    LevelSet(LevelSetRule),
    Pointwise(PointwiseRule),
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::LevelSet(LevelSetRule::default())
    }
}

/// Parameters of the weighted integrands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub p: f64,
    pub k: usize,
    pub big_d: f64,
    /// exponent on `X_k` in the critical term
    pub gamma: f64,
}

/// Every integral needed by the checks, for one `u`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Integrals {
    /// `int |grad u|^p`
    pub energy: Estimate,
    /// `int |u|^p`
    pub mass: Estimate,
    /// `int |u|^p / d^p`
    pub hardy: Estimate,
    /// `int |u|^p / d^p B(d / D)`
    pub log_series: Estimate,
    /// `int |u|^p / d^p sum_{i<k} X_1^2 ... X_i^2`
    pub partial_series: Estimate,
    /// `int |u|^p / d^p X_1^2 ... X_{k-1}^2 X_k^gamma`
    pub critical: Estimate,
}

const TERMS: usize = 6;

/// Exponents of `t` this close to zero are treated as exactly zero.
const EXPONENT_SNAP: f64 = 1e-12;

/// Logarithms of the six integrands times a jacobian `t^jac_pow`.
fn ln_integrands(parts: LnParts, at: Depth, jac_pow: f64, w: &Weights, ln_d: f64) -> [f64; TERMS] {
    let p = w.p;
    let snap = |c: f64| if c.abs() < EXPONENT_SNAP { 0.0 } else { c };
    let pow_t = |c: f64| {
        let c = snap(c);
        if c == 0.0 {
            0.0
        } else {
            c * at.ln_t
        }
    };
    let le = pow_t(p * (parts.beta - 1.0) + jac_pow) + p * parts.rest_g;
    let lm = pow_t(p * parts.beta + jac_pow) + p * parts.rest_u;
    let lh = pow_t(p * (parts.beta - 1.0) + jac_pow) + p * parts.rest_u;
    let tower = Tower::from_ln(w.k, (at.ln_t - ln_d).min(0.0));
    let (ln_b, ln_partial, ln_crit) = if w.k == 0 {
        (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY)
    } else {
        let squares: Vec<f64> = (1..w.k).map(|i| 2.0 * tower.ln_prefix(i)).collect();
        (
            tower.ln_bsum(),
            log_sum_exp(&squares),
            2.0 * tower.ln_prefix(w.k - 1) + w.gamma * tower.ln_x(w.k),
        )
    };
    [le, lm, lh, lh + ln_b, lh + ln_partial, lh + ln_crit]
}

fn pack(e: [Estimate; TERMS]) -> Integrals {
    Integrals {
        energy: e[0],
        mass: e[1],
        hardy: e[2],
        log_series: e[3],
        partial_series: e[4],
        critical: e[5],
    }
}

enum Levels<'a> {
    Ball { n: usize, radius: f64 },
    Box { lengths: Vec<f64> },
    Polytope(&'a HPolytope),
}

impl<'a> Levels<'a> {
    fn of(dom: &'a ConvexDomain) -> Result<Self> {
        match dom {
            ConvexDomain::Ball { center, radius } => Ok(Levels::Ball {
                n: center.len(),
                radius: *radius,
            }),
            ConvexDomain::Box { lo, hi } => Ok(Levels::Box {
                lengths: lo.iter().zip(hi).map(|(a, b)| b - a).collect(),
            }),
            ConvexDomain::HPolytope(h) if h.dim() <= POLYTOPE_MEASURE_MAX_DIM => Ok(Levels::Polytope(h)),
            ConvexDomain::HPolytope(_) => Err(HardyError::Unsupported(format!(
                "level sets of a polytope in more than {POLYTOPE_MEASURE_MAX_DIM} dimensions"
            ))),
        }
    }

    /// Depths where `S(t)` is not smooth.
    fn kinks(&self) -> Vec<f64> {
        match self {
            Levels::Polytope(h) => h.level_set_breaks(),
            _ => Vec::new(),
        }
    }

    /// `ln S(t)`, the log surface measure of `{d = t}`.
    fn ln_surface(&self, t: f64) -> f64 {
        match self {
            Levels::Ball { n, radius } => {
                let nf = *n as f64;
                (nf * unit_ball_volume(*n).unwrap_or(f64::NAN)).ln() + (nf - 1.0) * (radius - t).ln()
            }
            Levels::Box { lengths } => {
                let s: f64 = (0..lengths.len())
                    .map(|i| {
                        2.0 * lengths
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != i)
                            .map(|(_, l)| l - 2.0 * t)
                            .product::<f64>()
                    })
                    .sum();
                s.ln()
            }
            Levels::Polytope(h) => h.level_set_area(t).unwrap_or(f64::NAN).ln(),
        }
    }
}

const TAIL_REL: f64 = 1e-17;

struct LevelSetIntegrator<'a> {
    rule: LevelSetRule,
    gl: GaussLegendre,
    levels: Levels<'a>,
    f: &'a dyn Fn(Depth) -> [f64; TERMS],
}

impl LevelSetIntegrator<'_> {
    /// Sum over Gauss points of `[a, b]`; `map(x) = (depth, ln(jacobian / t))`.
    fn panel(&self, a: f64, b: f64, map: &dyn Fn(f64) -> (Depth, f64)) -> [f64; TERMS] {
        let mut out = [0.0; TERMS];
        for (x, wt) in self.gl.mapped(a, b) {
            let (at, ln_jac) = map(x);
            let ln_s = self.levels.ln_surface(at.t);
            let vals = (self.f)(at);
            for j in 0..TERMS {
                let l = vals[j] + ln_s + ln_jac;
                if l > f64::NEG_INFINITY {
                    out[j] += wt * l.exp();
                }
            }
        }
        out
    }

    /// `(fine, coarse)`: the panel split in two, and the panel as a whole.
    fn pair(&self, a: f64, b: f64, map: &dyn Fn(f64) -> (Depth, f64)) -> ([f64; TERMS], [f64; TERMS]) {
        let m = 0.5 * (a + b);
        let l = self.panel(a, m, map);
        let r = self.panel(m, b, map);
        let c = self.panel(a, b, map);
        let mut fine = [0.0; TERMS];
        for j in 0..TERMS {
            fine[j] = l[j] + r[j];
        }
        (fine, c)
    }

    fn run(&self, dmax: f64, kinks: &[f64]) -> [Estimate; TERMS] {
        let ln_dmax = dmax.ln();
        let ln_tc = ln_dmax - self.rule.core_decades * std::f64::consts::LN_10;
        let panels = ((ln_dmax - ln_tc) / self.rule.panel_width).ceil().max(1.0) as usize;
        let mut breaks: Vec<f64> = (0..=panels)
            .map(|i| ln_tc + (ln_dmax - ln_tc) * i as f64 / panels as f64)
            .collect();
        for &k in kinks {
            if k > 0.0 && k < dmax {
                breaks.push(k.ln());
            }
        }
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let mut fine = [0.0; TERMS];
        let mut coarse = [0.0; TERMS];
        let core_map = |x: f64| (Depth::from_ln(x), 0.0);
        for w in breaks.windows(2) {
            let (f, c) = self.pair(w[0], w[1], &core_map);
            for j in 0..TERMS {
                fine[j] += f[j];
                coarse[j] += c[j];
            }
        }

        // tail: ln t = ln t_c + 1 - e^v, dt = t e^v dv
        let tail_map = |v: f64| {
            let ln_t = ln_tc + 1.0 - v.exp();
            (Depth::from_ln(ln_t), v)
        };
        let mut prev = [0.0; TERMS];
        let mut remainder = [0.0; TERMS];
        let mut v = 0.0;
        loop {
            let (f, c) = self.pair(v, v + 1.0, &tail_map);
            let mut small = v >= 3.0;
            for j in 0..TERMS {
                fine[j] += f[j];
                coarse[j] += c[j];
                if f[j] > TAIL_REL * fine[j].abs() {
                    small = false;
                }
            }
            v += 1.0;
            if small || v >= self.rule.max_v {
                for j in 0..TERMS {
                    remainder[j] = if f[j] == 0.0 {
                        0.0
                    } else if prev[j] > f[j] {
                        let q = f[j] / prev[j];
                        f[j] * q / (1.0 - q)
                    } else {
                        f[j] * (self.rule.max_v - v).max(1.0)
                    };
                }
                break;
            }
            prev = f;
        }

        let mut out = [Estimate::default(); TERMS];
        for j in 0..TERMS {
            let e = Estimate::from_pair(fine[j] + remainder[j], coarse[j] + remainder[j]);
            out[j] = Estimate::new(e.value, e.error + remainder[j].abs());
        }
        out
    }
}

/// Depth breakpoints with the profile kinks inserted.
fn with_kinks(mut breaks: Vec<f64>, kinks: &[f64]) -> Vec<f64> {
    let (a, b) = (breaks[0], breaks[breaks.len() - 1]);
    breaks.extend(kinks.iter().copied().filter(|k| *k > a && *k < b));
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-12 * (b - a));
    breaks
}

fn pointwise_sum(
    dom: &ConvexDomain,
    u: &TestFunction,
    w: &Weights,
    rule: &PointwiseRule,
    panels: usize,
    sphere: Option<&SphereQuadrature>,
) -> Result<[f64; TERMS]> {
    let ln_d = w.big_d.ln();
    let mut out = [0.0; TERMS];
    let mut add = |x: &[f64], weight: f64| {
        let t = dom.signed_distance(x);
        if !(t > 0.0) {
            return;
        }
        let (uv, gv) = u.at_point(dom, x);
        let vals = ln_integrands(
            LnParts::new(1.0, uv.ln() - t.ln(), gv.ln()),
            Depth::new(t),
            0.0,
            w,
            ln_d,
        );
        for j in 0..TERMS {
            if vals[j] > f64::NEG_INFINITY {
                out[j] += weight * vals[j].exp();
            }
        }
    };
    match dom {
        ConvexDomain::Box { lo, hi } => {
            // one pyramid per face, on which the nearest face is fixed and d is smooth
            let n = lo.len();
            let tmax = lo
                .iter()
                .zip(hi)
                .map(|(a, b)| 0.5 * (b - a))
                .fold(f64::INFINITY, f64::min);
            let gl = GaussLegendre::new(rule.order);
            let breaks = with_kinks(graded_breaks(0.0, tmax, panels, rule.grading), &u.kinks());
            let cross = n - 1;
            let mut x = vec![0.0; n];
            for axis in 0..n {
                for upper in [false, true] {
                    for bw in breaks.windows(2) {
                        for (t, wt) in gl.mapped(bw[0], bw[1]) {
                            x[axis] = if upper { hi[axis] - t } else { lo[axis] + t };
                            let sides: Vec<Vec<(f64, f64)>> = (0..n)
                                .filter(|&j| j != axis)
                                .map(|j| gl.mapped(lo[j] + t, hi[j] - t).collect())
                                .collect();
                            let mut idx = vec![0usize; cross];
                            'cell: loop {
                                let mut weight = wt;
                                for (c, j) in (0..n).filter(|&j| j != axis).enumerate() {
                                    let (y, wy) = sides[c][idx[c]];
                                    x[j] = y;
                                    weight *= wy;
                                }
                                add(&x, weight);
                                for c in 0..cross {
                                    idx[c] += 1;
                                    if idx[c] < sides[c].len() {
                                        continue 'cell;
                                    }
                                    idx[c] = 0;
                                }
                                break;
                            }
                        }
                    }
                }
            }
        }
        ConvexDomain::Ball { center, radius } => {
            let sphere = sphere.expect("ball route needs a sphere rule");
            let n = center.len();
            let surface = n as f64 * unit_ball_volume(n)?;
            let gl = GaussLegendre::new(rule.order);
            // graded toward the boundary r = R
            let breaks = with_kinks(graded_breaks(0.0, *radius, panels, rule.grading), &u.kinks());
            let mut x = vec![0.0; n];
            for bw in breaks.windows(2) {
                // mirror so the small panels sit at r = R
                let (a, b) = (radius - bw[1], radius - bw[0]);
                for (r, wr) in gl.mapped(a, b) {
                    for (om, wo) in sphere.nodes().zip(sphere.weights()) {
                        for d in 0..n {
                            x[d] = center[d] + r * om[d];
                        }
                        add(&x, surface * r.powi(n as i32 - 1) * wr * wo);
                    }
                }
            }
        }
        ConvexDomain::HPolytope(_) => {
            return Err(HardyError::Unsupported(
                "pointwise quadrature on a general polytope".into(),
            ))
        }
    }
    Ok(out)
}

/// All functional integrals of `u` on `dom`.
pub fn integrals(dom: &ConvexDomain, u: &TestFunction, w: &Weights, integ: &Integrator) -> Result<Integrals> {
    let dmax = inradius(dom)?;
    if !(w.p > 1.0) {
        return Err(HardyError::domain("p", w.p, "> 1"));
    }
    if !(w.big_d >= dmax) {
        return Err(HardyError::domain("D", w.big_d, ">= inradius"));
    }
    u.validate(dom, dmax, w.p)?;
    let ln_d = w.big_d.ln();
    match integ {
        Integrator::LevelSet(rule) => {
            let f = |at: Depth| ln_integrands(u.ln_parts(at), at, 1.0, w, ln_d);
            let levels = Levels::of(dom)?;
            let mut kinks = u.kinks();
            kinks.extend(levels.kinks());
            let it = LevelSetIntegrator {
                rule: *rule,
                gl: GaussLegendre::new(rule.order),
                levels,
                f: &f,
            };
            Ok(pack(it.run(dmax, &kinks)))
        }
        Integrator::Pointwise(rule) => {
            let sphere = match dom {
                ConvexDomain::Ball { center, .. } => Some(SphereQuadrature::default_for(
                    center.len(),
                    rule.sphere_resolution,
                    rule.seed,
                )?),
                _ => None,
            };
            let fine = pointwise_sum(dom, u, w, rule, rule.panels, sphere.as_ref())?;
            let coarse = pointwise_sum(dom, u, w, rule, (rule.panels / 2).max(2), sphere.as_ref())?;
            let mut out = [Estimate::default(); TERMS];
            for j in 0..TERMS {
                out[j] = Estimate::from_pair(fine[j], coarse[j]);
            }
            Ok(pack(out))
        }
    }
}

fn plain(p: f64, dom: &ConvexDomain) -> Weights {
    Weights {
        p,
        k: 0,
        big_d: dom.diameter(),
        gamma: 2.0,
    }
}

/// `int |grad u|^p`.
pub fn dirichlet_p_energy(dom: &ConvexDomain, u: &TestFunction, p: f64, integ: &Integrator) -> Result<Estimate> {
    Ok(integrals(dom, u, &plain(p, dom), integ)?.energy)
}

/// `int |u|^p / d^p`.
pub fn hardy_term(dom: &ConvexDomain, u: &TestFunction, p: f64, integ: &Integrator) -> Result<Estimate> {
    Ok(integrals(dom, u, &plain(p, dom), integ)?.hardy)
}

/// `int |u|^p`.
pub fn lp_mass(dom: &ConvexDomain, u: &TestFunction, p: f64, integ: &Integrator) -> Result<Estimate> {
    Ok(integrals(dom, u, &plain(p, dom), integ)?.mass)
}

/// `sum_{i<=k} int |u|^p / d^p X_1^2(d/D) ... X_i^2(d/D)`.
pub fn log_series_term(
    dom: &ConvexDomain,
    u: &TestFunction,
    p: f64,
    k: usize,
    big_d: f64,
    integ: &Integrator,
) -> Result<Estimate> {
    if !(big_d >= 0.5 * dom.diameter()) {
        return Err(HardyError::domain("D", big_d, ">= diam/2"));
    }
    Ok(integrals(
        dom,
        u,
        &Weights {
            p,
            k,
            big_d,
            gamma: 2.0,
        },
        integ,
    )?
    .log_series)
}

/// `(a_N / |Omega|)^{p/N}`.
fn volume_factor(dom: &ConvexDomain, p: f64) -> Result<f64> {
    let n = dom.dim();
    let vol = dom.volume().ok_or_else(|| {
        HardyError::Unsupported(format!(
            "volume of a polytope in more than {POLYTOPE_MEASURE_MAX_DIM} dimensions"
        ))
    })?;
    Ok((unit_ball_volume(n)? / vol).powf(p / n as f64))
}

/// Right-hand side of the refined inequality from precomputed integrals.
pub fn theorem_a_rhs(dom: &ConvexDomain, params: &HardyParams, ints: &Integrals) -> Result<Estimate> {
    let p = params.p;
    let q = (p - 1.0) / p;
    let cp = q.powf(p);
    let c1 = q.powf(p - 1.0);
    let eta = params.eta_d();
    let a = a_coeff(p, params.k);
    let factor = (1.0 - eta - a * eta * eta).max(0.0).powf(p / (p - 1.0));
    let vol = kp_constant(params.n, p)? * factor * volume_factor(dom, p)?;
    Ok(ints.hardy.scale(cp) + ints.log_series.scale(0.5 * c1) + ints.mass.scale(vol))
}

/// Relative slack below the threshold that is still accepted as `D >= D_0`.
const THRESHOLD_SLACK: f64 = 1e-12;

/// The refined inequality with log corrections for one `u`.
pub fn verify_theorem_a(
    dom: &ConvexDomain,
    u: &TestFunction,
    params: &HardyParams,
    integ: &Integrator,
) -> Result<SlackReport> {
    let d0 = d0_threshold(params.p, params.k, params.diam);
    verify_theorem_a_above(dom, u, params, d0, integ, &u.label())
}

/// As [`verify_theorem_a`] with a precomputed threshold `d0` and a case label.
pub fn verify_theorem_a_above(
    dom: &ConvexDomain,
    u: &TestFunction,
    params: &HardyParams,
    d0: f64,
    integ: &Integrator,
    case: &str,
) -> Result<SlackReport> {
    check_params(dom, params)?;
    if params.big_d < d0 * (1.0 - THRESHOLD_SLACK) {
        return Err(HardyError::BelowThreshold {
            given: params.big_d,
            threshold: d0,
        });
    }
    let w = Weights {
        p: params.p,
        k: params.k,
        big_d: params.big_d,
        gamma: 2.0,
    };
    let ints = integrals(dom, u, &w, integ)?;
    let rhs = theorem_a_rhs(dom, params, &ints)?;
    Ok(SlackReport::new(case.to_string(), ints.energy, rhs, Some(*params)))
}

fn check_params(dom: &ConvexDomain, params: &HardyParams) -> Result<()> {
    if params.n != dom.dim() {
        return Err(HardyError::Dimension {
            expected: dom.dim(),
            got: params.n,
        });
    }
    let diam = dom.diameter();
    if (params.diam - diam).abs() > 1e-12 * diam {
        return Err(HardyError::domain("diam", params.diam, "domain diameter"));
    }
    Ok(())
}

/// The classical inequalities without log corrections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classical {
    /// `int |grad u|^p >= ((p-1)/p)^p int |u|^p / d^p`
    Hi,
    /// `p = 2` with the volume term `N/4 (a_N/|Omega|)^{2/N} int u^2`
    L,
    /// general `p` with the volume term `k_p (a_N/|Omega|)^{p/N} int |u|^p`
    T,
}

pub fn verify_classical(
    dom: &ConvexDomain,
    u: &TestFunction,
    p: f64,
    which: Classical,
    integ: &Integrator,
) -> Result<SlackReport> {
    if which == Classical::L && p != 2.0 {
        return Err(HardyError::domain("p", p, "= 2"));
    }
    let diam = dom.diameter();
    let params = HardyParams::new(dom.dim(), p, 0, 0.5 * diam, diam)?;
    let ints = integrals(dom, u, &plain(p, dom), integ)?;
    let cp = ((p - 1.0) / p).powf(p);
    let rhs = match which {
        Classical::Hi => ints.hardy.scale(cp),
        Classical::L | Classical::T => {
            let vol = kp_constant(dom.dim(), p)? * volume_factor(dom, p)?;
            ints.hardy.scale(cp) + ints.log_series.scale(0.0) + ints.mass.scale(vol)
        }
    };
    let tag = match which {
        Classical::Hi => "hi",
        Classical::L => "l",
        Classical::T => "t",
    };
    Ok(SlackReport::new(
        format!("classical-{tag}/{}", u.label()),
        ints.energy,
        rhs,
        Some(params),
    ))
}

/// One member of a sharpness sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub case: String,
    pub function: String,
    pub gamma: f64,
    pub quotient: f64,
    pub quad_error: f64,
    /// `1/2 ((p-1)/p)^{p-1}`
    pub reference: f64,
    /// `None` when no bound is claimed (`gamma < 2`).
    pub passed: Option<bool>,
}

/// `c(u) = [int |grad u|^p - ((p-1)/p)^p int |u|^p/d^p
///          - 1/2 ((p-1)/p)^{p-1} sum_{i<k} int |u|^p/d^p X_1^2..X_i^2]
///         / int |u|^p/d^p X_1^2..X_{k-1}^2 X_k^gamma`
/// for each member of `family`.
pub fn sharpness_probe(
    dom: &ConvexDomain,
    p: f64,
    k: usize,
    gamma: f64,
    big_d: f64,
    family: &[TestFunction],
    integ: &Integrator,
) -> Result<Vec<SharpnessRow>> {
    if k == 0 {
        return Err(HardyError::domain("k", 0.0, ">= 1"));
    }
    if !(gamma > 0.0) {
        return Err(HardyError::domain("gamma", gamma, "> 0"));
    }
    let q = (p - 1.0) / p;
    let cp = q.powf(p);
    let half_c1 = 0.5 * q.powf(p - 1.0);
    let w = Weights { p, k, big_d, gamma };
    family
        .iter()
        .map(|u| {
            let ints = integrals(dom, u, &w, integ)?;
            let num = ints.energy + ints.hardy.scale(-cp) + ints.partial_series.scale(-half_c1);
            let den = ints.critical;
            let quotient = num.value / den.value;
            let quad_error = (num.error + quotient.abs() * den.error) / den.value.abs();
            let passed = (gamma >= 2.0).then_some(quotient >= half_c1 - 10.0 * quad_error);
            Ok(SharpnessRow {
                case: format!("sharpness/p={p}/k={k}/gamma={gamma}/{}", u.label()),
                function: u.label(),
                gamma,
                quotient,
                quad_error,
                reference: half_c1,
                passed,
            })
        })
        .collect()
}

/// One case of the refined-inequality matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCase {
    pub key: String,
    pub domain: ConvexDomain,
    pub u: TestFunction,
    pub params: HardyParams,
    pub d0: f64,
}

impl TheoremCase {
    pub fn run(&self, integ: &Integrator) -> Result<SlackReport> {
        verify_theorem_a_above(&self.domain, &self.u, &self.params, self.d0, integ, &self.key)
    }
}

/// Cases `domains x p x k x (D multiples of D_0) x suite profiles`, sorted by key.
pub fn theorem_a_cases(
    domains: &[(String, ConvexDomain)],
    ps: &[f64],
    ks: &[usize],
    d_mults: &[f64],
) -> Result<Vec<TheoremCase>> {
    let mut thresholds: BTreeMap<(u64, usize, u64), f64> = BTreeMap::new();
    let mut cases = Vec::new();
    for (label, dom) in domains {
        let diam = dom.diameter();
        let n = dom.dim();
        let funcs = TestFunction::suite(dom)?;
        for &p in ps {
            for &k in ks {
                let d0 = *thresholds
                    .entry((p.to_bits(), k, diam.to_bits()))
                    .or_insert_with(|| d0_threshold(p, k, diam));
                for &m in d_mults {
                    if !(m >= 1.0) {
                        return Err(HardyError::domain("D multiplier", m, ">= 1"));
                    }
                    let params = HardyParams::new(n, p, k, m * d0, diam)?;
                    for u in &funcs {
                        cases.push(TheoremCase {
                            key: format!("thmA/{label}/N={n}/p={p}/k={k}/D={m}D0/{}", u.label()),
                            domain: dom.clone(),
                            u: *u,
                            params,
                            d0,
                        });
                    }
                }
            }
        }
    }
    cases.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(cases)
}
