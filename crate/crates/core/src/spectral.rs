//! One-dimensional weighted eigenvalue problems on `(0, 1)` and the radial
//! best-constant computations for the unit ball.
//!
//! The solver minimises `[int W (v')^2 + int Q v^2] / int W v^2` over
//! piecewise-linear `v` on a [`RadialMesh`], which gives a symmetric
//! tridiagonal pencil `K v = lambda M v`. The smallest eigenvalue is located by
//! Sturm-count bisection and the vector by inverse iteration.

use serde::{Deserialize, Serialize};

use crate::constants::mu2;
use crate::error::{HardyError, Result};
use crate::quadrature::GaussLegendre;
pub use crate::special::{bessel_j0, bessel_j1, first_j0_zero};

/// Width of the element touching a graded endpoint.
pub const FIRST_WIDTH: f64 = 1e-6;
/// Growth factor between neighbouring elements in a graded region.
pub const GRADING_RATIO: f64 = 1.02;
/// Relative width of the final bisection bracket.
pub const EIG_TOL: f64 = 1e-10;
/// Smallest admissible `epsilon` in [`u_eps_quotient`].
pub const MIN_EPS: f64 = 1e-6;

const INVERSE_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grading {
    Uniform,
    GeometricToOne,
    GeometricToZeroAndOne,
}

/// Strictly increasing nodes on `[0, 1]`, endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialMesh {
    pub grading: Grading,
    pub nodes: Vec<f64>,
}

impl RadialMesh {
    /// `n` nodes. Graded meshes start at [`FIRST_WIDTH`], grow by
    /// [`GRADING_RATIO`] and are capped at the width that makes them fill `[0, 1]`.
    pub fn new(n: usize, grading: Grading) -> Result<Self> {
        if n < 3 {
            return Err(HardyError::domain("mesh nodes", n as f64, ">= 3"));
        }
        let m = n - 1;
        let profile: Vec<f64> = (0..m)
            .map(|i| match grading {
                Grading::Uniform => 1.0,
                Grading::GeometricToOne => FIRST_WIDTH * GRADING_RATIO.powi((m - 1 - i) as i32),
                Grading::GeometricToZeroAndOne => FIRST_WIDTH * GRADING_RATIO.powi(i.min(m - 1 - i) as i32),
            })
            .collect();
        let total = |cap: f64| profile.iter().map(|w| w.min(cap)).sum::<f64>();
        let widest = profile.iter().cloned().fold(0.0, f64::max);
        let widths: Vec<f64> = if grading == Grading::Uniform || total(widest) <= 1.0 {
            let s = total(widest);
            profile.iter().map(|w| w / s).collect()
        } else {
            let (mut lo, mut hi) = (0.0, widest);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if total(mid) < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            profile.iter().map(|w| w.min(hi)).collect()
        };
        Ok(Self::from_widths(grading, &widths))
    }

    fn from_widths(grading: Grading, widths: &[f64]) -> Self {
        // accumulate from both ends so the two graded tails stay exact
        let m = widths.len();
        let half = m / 2;
        let mut nodes = vec![0.0; m + 1];
        for i in 0..half {
            nodes[i + 1] = nodes[i] + widths[i];
        }
        nodes[m] = 1.0;
        for i in (half + 1..m).rev() {
            nodes[i] = nodes[i + 1] - widths[i];
        }
        RadialMesh { grading, nodes }
    }

    /// Nodes given explicitly.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 || nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(HardyError::InvalidDomain(
                "mesh must run from 0 to 1 with >= 3 nodes".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(HardyError::InvalidDomain("mesh nodes must increase strictly".into()));
        }
        Ok(RadialMesh {
            grading: Grading::Uniform,
            nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Bisect every element; the result contains the old mesh.
    pub fn refine(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(1.0);
        RadialMesh {
            grading: self.grading,
            nodes,
        }
    }
}

/// Weight `W` in the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    One,
    R,
    OneMinusR,
}

impl Weight {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::R => r,
            Weight::OneMinusR => 1.0 - r,
        }
    }

    fn vanishes_at_zero(self) -> bool {
        self == Weight::R
    }

    fn vanishes_at_one(self) -> bool {
        self == Weight::OneMinusR
    }
}

/// Potential `Q` in the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Potential {
    Zero,
    /// `c (1 - r) / r^2`
    InverseSquare {
        c: f64,
    },
}

impl Potential {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::InverseSquare { c } => c * (1.0 - r) / (r * r),
        }
    }

    fn singular_at_zero(self) -> bool {
        matches!(self, Potential::InverseSquare { c } if c != 0.0)
    }
}

/// Treatment of an endpoint where the weight vanishes.
///
/// Such a point has zero capacity: functions vanishing there are dense in the
/// energy space, so the infimum does not change when the constraint is
/// dropped. `Free` leaves the node value unconstrained, which converges at the
/// usual algebraic rate; `Pinned` imposes `v = 0`, which is also a conforming
/// upper estimate but converges only like `1 / ln(1 / h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegenerateEnd {
    #[default]
    Free,
    Pinned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigResult {
    pub value: f64,
    /// Node values, normalised to unit weighted mass and positive maximum.
    pub vector: Vec<f64>,
    /// `|K v - lambda M v| / (|K v| + |lambda| |M v|)`.
    pub residual: f64,
    pub weight: Weight,
    pub potential: Potential,
    pub mesh: RadialMesh,
}

impl EigResult {
    /// Piecewise-linear value and slope at `r`.
    pub fn interpolate(&self, r: f64) -> (f64, f64) {
        let nodes = &self.mesh.nodes;
        let e = match nodes.partition_point(|&x| x <= r) {
            0 => 0,
            i => (i - 1).min(nodes.len() - 2),
        };
        let h = nodes[e + 1] - nodes[e];
        let slope = (self.vector[e + 1] - self.vector[e]) / h;
        (self.vector[e] + slope * (r - nodes[e]), slope)
    }
}

struct Pencil {
    k_diag: Vec<f64>,
    k_off: Vec<f64>,
    m_diag: Vec<f64>,
    m_off: Vec<f64>,
}

impl Pencil {
    fn len(&self) -> usize {
        self.k_diag.len()
    }

    /// Number of eigenvalues below `lambda`.
    fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut d = 0.0;
        for i in 0..self.len() {
            let t = self.k_diag[i] - lambda * self.m_diag[i];
            d = if i == 0 {
                t
            } else {
                let o = self.k_off[i - 1] - lambda * self.m_off[i - 1];
                t - o * o / d
            };
            if d == 0.0 {
                d = -f64::EPSILON * t.abs().max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn apply(&self, diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut y = diag[i] * x[i];
                if i > 0 {
                    y += off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Solve `(K - sigma M) x = rhs` by the Thomas algorithm.
    fn shifted_solve(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut denom = self.k_diag[0] - sigma * self.m_diag[0];
        x[0] = rhs[0] / denom;
        for i in 1..n {
            let o = self.k_off[i - 1] - sigma * self.m_off[i - 1];
            c[i - 1] = o / denom;
            denom = self.k_diag[i] - sigma * self.m_diag[i] - o * c[i - 1];
            x[i] = (rhs[i] - o * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn assemble(w: Weight, q: Potential, mesh: &RadialMesh, free0: bool, free1: bool) -> Result<(Pencil, usize)> {
    let nodes = &mesh.nodes;
    let n = nodes.len();
    let gl = GaussLegendre::new(4);
    let mut kd = vec![0.0; n];
    let mut ko = vec![0.0; n - 1];
    let mut md = vec![0.0; n];
    let mut mo = vec![0.0; n - 1];
    for e in 0..n - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = b - a;
        for (r, wt) in gl.mapped(a, b) {
            let phi_l = (b - r) / h;
            let phi_r = (r - a) / h;
            let wr = w.eval(r);
            let qr = q.eval(r);
            let stiff = wt * wr / (h * h);
            kd[e] += stiff + wt * qr * phi_l * phi_l;
            kd[e + 1] += stiff + wt * qr * phi_r * phi_r;
            ko[e] += -stiff + wt * qr * phi_l * phi_r;
            md[e] += wt * wr * phi_l * phi_l;
            md[e + 1] += wt * wr * phi_r * phi_r;
            mo[e] += wt * wr * phi_l * phi_r;
        }
    }
    let lo = if free0 { 0 } else { 1 };
    let hi = if free1 { n - 1 } else { n - 2 };
    let pencil = Pencil {
        k_diag: kd[lo..=hi].to_vec(),
        k_off: ko[lo..hi].to_vec(),
        m_diag: md[lo..=hi].to_vec(),
        m_off: mo[lo..hi].to_vec(),
    };
    if pencil.m_diag.iter().any(|&m| !(m > 0.0)) {
        return Err(HardyError::IndefiniteMass("weight is not positive on the mesh".into()));
    }
    if pencil.k_diag.iter().chain(&pencil.k_off).any(|v| !v.is_finite()) {
        return Err(HardyError::Quadrature("potential not integrable on the mesh".into()));
    }
    Ok((pencil, lo))
}

/// Smallest value of `[int W (v')^2 + int Q v^2] / int W v^2` over
/// piecewise-linear `v` vanishing at both ends, except that the constraint is
/// dropped where `W` vanishes (see [`DegenerateEnd`]).
pub fn weighted_rayleigh_min(w: Weight, q: Potential, mesh: &RadialMesh) -> Result<EigResult> {
    weighted_rayleigh_min_with(w, q, mesh, DegenerateEnd::Free)
}

pub fn weighted_rayleigh_min_with(
    w: Weight,
    q: Potential,
    mesh: &RadialMesh,
    ends: DegenerateEnd,
) -> Result<EigResult> {
    let free = ends == DegenerateEnd::Free;
    let free0 = free && w.vanishes_at_zero() && !q.singular_at_zero();
    let free1 = free && w.vanishes_at_one();
    let (pencil, offset) = assemble(w, q, mesh, free0, free1)?;

    let mut hi = 1.0;
    while pencil.count_below(hi) == 0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(HardyError::NoConvergence("no eigenvalue below 1e300".into()));
        }
    }
    let mut lo = 0.0;
    let mut step = 1.0;
    while pencil.count_below(lo) > 0 {
        lo = -step;
        step *= 2.0;
        if step > 1e300 {
            return Err(HardyError::NoConvergence("quotient unbounded below".into()));
        }
    }
    for _ in 0..400 {
        if hi - lo <= EIG_TOL * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pencil.count_below(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > EIG_TOL * hi.abs().max(1.0) {
        return Err(HardyError::NoConvergence("bisection stalled".into()));
    }

    // below the smallest eigenvalue, so K - lo M is positive definite
    let mut x = vec![1.0; pencil.len()];
    for _ in 0..INVERSE_STEPS {
        let rhs = pencil.apply(&pencil.m_diag, &pencil.m_off, &x);
        x = pencil.shifted_solve(lo, &rhs);
        let mx = pencil.apply(&pencil.m_diag, &pencil.m_off, &x);
        let norm = dot(&x, &mx).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(HardyError::NoConvergence("inverse iteration broke down".into()));
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    let peak = x
        .iter()
        .cloned()
        .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if peak < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let kx = pencil.apply(&pencil.k_diag, &pencil.k_off, &x);
    let mx = pencil.apply(&pencil.m_diag, &pencil.m_off, &x);
    let value = dot(&x, &kx) / dot(&x, &mx);
    let res: f64 = kx
        .iter()
        .zip(&mx)
        .map(|(a, b)| (a - value * b).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = dot(&kx, &kx).sqrt() + value.abs() * dot(&mx, &mx).sqrt();

    let mut vector = vec![0.0; mesh.len()];
    vector[offset..offset + x.len()].copy_from_slice(&x);
    Ok(EigResult {
        value,
        vector,
        residual: res / scale,
        weight: w,
        potential: q,
        mesh: mesh.clone(),
    })
}

/// Coefficient `(N - 1)(N - 3) / 4` of the transformed potential.
pub fn transformed_potential_coeff(n: usize) -> f64 {
    let nf = n as f64;
    (nf - 1.0) * (nf - 3.0) / 4.0
}

/// Radial upper estimate of the best constant `C_N` in
/// `int |grad u|^2 - 1/4 int u^2 / d^2 >= C_N int u^2` on the unit ball.
///
/// With `u = r^{-(N-1)/2} (1 - r)^{1/2} v` the quotient becomes
/// `[int (1-r)(v')^2 + c int (1-r) v^2 / r^2] / int (1-r) v^2`.
pub fn cn_transformed_estimate(n: usize, mesh: &RadialMesh) -> Result<EigResult> {
    if n < 2 {
        return Err(HardyError::domain("N", n as f64, ">= 2"));
    }
    let c = transformed_potential_coeff(n);
    let q = if c == 0.0 {
        Potential::Zero
    } else {
        Potential::InverseSquare { c }
    };
    weighted_rayleigh_min(Weight::OneMinusR, q, mesh)
}

/// `mu_2 + (N - 1)(N - 3) / 4`.
pub fn cn_lower_bound(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(HardyError::domain("N", n as f64, ">= 2"));
    }
    Ok(mu2() + transformed_potential_coeff(n))
}

/// Eigenvalue `m (N - 2 + m)` of the Laplace-Beltrami operator on `S^{N-1}`.
pub fn cm_eigenvalue(m: usize, n: usize) -> Result<f64> {
    if m < 1 {
        return Err(HardyError::domain("m", m as f64, ">= 1"));
    }
    if n < 2 {
        return Err(HardyError::domain("N", n as f64, ">= 2"));
    }
    Ok((m * (n - 2 + m)) as f64)
}

/// Quotient of the three-dimensional trial family
/// `u_eps(r) = r^{-1} (1 - r)^{1/2 + eps} w(1 - r)`, `w(s) = J_0(j_0 s)`:
///
/// `[int s^{1+2eps} (w')^2 - eps^2 int s^{-1+2eps} w^2] / int s^{1+2eps} w^2`.
///
/// The mesh elements, read in `s = 1 - r`, serve as quadrature panels; the
/// first element is replaced by the leading terms of the small-`s` expansion.
pub fn u_eps_quotient(eps: f64, mesh: &RadialMesh) -> Result<f64> {
    if !(eps >= MIN_EPS && eps.is_finite()) {
        return Err(HardyError::domain("eps", eps, ">= 1e-6"));
    }
    let j0 = first_j0_zero();
    let gl = GaussLegendre::new(8);
    let s0 = mesh.nodes[1];
    let e2 = 2.0 * eps;
    // w^2 ~ 1 - (j0 s)^2 / 2 and (w')^2 ~ j0^4 s^2 / 4 near s = 0
    let j2 = j0 * j0;
    let mut grad = j2 * j2 / 4.0 * s0.powf(4.0 + e2) / (4.0 + e2);
    let mut mass = s0.powf(2.0 + e2) / (2.0 + e2) - 0.5 * j2 * s0.powf(4.0 + e2) / (4.0 + e2);
    let mut sing = s0.powf(e2) / e2 - 0.5 * j2 * s0.powf(2.0 + e2) / (2.0 + e2);
    for win in mesh.nodes[1..].windows(2) {
        for (s, wt) in gl.mapped(win[0], win[1]) {
            let w = bessel_j0(j0 * s);
            let dw = -j0 * bessel_j1(j0 * s);
            let ps = s.powf(e2);
            grad += wt * s * ps * dw * dw;
            mass += wt * s * ps * w * w;
            sing += wt * ps / s * w * w;
        }
    }
    Ok((grad - eps * eps * sing) / mass)
}

/// Radial position with both `r` and `d = 1 - r` held to full precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radius {
    pub r: f64,
    pub d: f64,
}

/// `[int |grad u|^2 - 1/4 int u^2 / d^2] / int u^2` on the unit ball in `R^N` for
/// radial `u`, where `trial` returns `(u, du/dr)`.
///
/// Each half of `(0, 1)` gets `panels` panels graded geometrically toward its
/// endpoint; `smallest_r` and `smallest_d` are the ratios of the smallest to the
/// largest panel near `r = 0` and near `r = 1`.
pub fn radial_rayleigh_quotient(
    n: usize,
    trial: impl Fn(Radius) -> (f64, f64),
    panels: usize,
    smallest_r: f64,
    smallest_d: f64,
) -> Result<f64> {
    if n < 2 {
        return Err(HardyError::domain("N", n as f64, ">= 2"));
    }
    let gl = GaussLegendre::new(8);
    let mut energy = 0.0;
    let mut mass = 0.0;
    let mut add = |at: Radius, wt: f64| {
        let (u, du) = trial(at);
        let jac = at.r.powi(n as i32 - 1);
        energy += wt * jac * (du * du - 0.25 * u * u / (at.d * at.d));
        mass += wt * jac * u * u;
    };
    for win in crate::quadrature::graded_breaks(0.0, 0.5, panels, smallest_r).windows(2) {
        for (x, wt) in gl.mapped(win[0], win[1]) {
            add(Radius { r: x, d: 1.0 - x }, wt);
        }
    }
    for win in crate::quadrature::graded_breaks(0.0, 0.5, panels, smallest_d).windows(2) {
        for (x, wt) in gl.mapped(win[0], win[1]) {
            add(Radius { r: 1.0 - x, d: x }, wt);
        }
    }
    if !(mass > 0.0 && energy.is_finite()) {
        return Err(HardyError::Inadmissible(
            "trial function has zero or infinite mass".into(),
        ));
    }
    Ok(energy / mass)
}

/// The radial trial `u = r^{-(N-1)/2} (1 - r)^{1/2} v` built from an eigenvector.
///
/// Needs `v(0) = v(1) = 0`: with `v(1) != 0` the gradient of `u` is not square
/// integrable and the pointwise quotient misses a boundary term.
pub fn transformed_trial(n: usize, eig: &EigResult) -> Result<impl Fn(Radius) -> (f64, f64) + '_> {
    if eig.vector[0] != 0.0 || *eig.vector.last().unwrap() != 0.0 {
        return Err(HardyError::Inadmissible(
            "eigenvector does not vanish at both ends".into(),
        ));
    }
    let m = 0.5 * (n as f64 - 1.0);
    Ok(move |at: Radius| {
        let (v, dv) = eig.interpolate(at.r);
        let phi = at.r.powf(-m) * at.d.sqrt();
        let dlog = -m / at.r - 0.5 / at.d;
        (phi * v, phi * (dv + v * dlog))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn mesh(n: usize) -> RadialMesh {
        RadialMesh::new(n, Grading::GeometricToZeroAndOne).unwrap()
    }

    #[test]
    fn mesh_shape() {
        for g in [
            Grading::Uniform,
            Grading::GeometricToOne,
            Grading::GeometricToZeroAndOne,
        ] {
            for n in [3, 10, 400, 4000] {
                let m = RadialMesh::new(n, g).unwrap();
                assert_eq!(m.len(), n);
                assert_eq!(m.nodes[0], 0.0);
                assert_eq!(*m.nodes.last().unwrap(), 1.0);
                assert!(m.nodes.windows(2).all(|w| w[0] < w[1]), "{g:?} {n}");
            }
        }
        let m = mesh(4000);
        assert_relative_eq!(m.nodes[1], FIRST_WIDTH, max_relative = 1e-12);
        assert_relative_eq!(1.0 - m.nodes[3998], FIRST_WIDTH, max_relative = 1e-6);
        let m = RadialMesh::new(4000, Grading::GeometricToOne).unwrap();
        assert_relative_eq!(1.0 - m.nodes[3998], FIRST_WIDTH, max_relative = 1e-6);
        assert!(RadialMesh::new(2, Grading::Uniform).is_err());
        assert!(RadialMesh::from_nodes(vec![0.0, 0.5, 0.4, 1.0]).is_err());
    }

    #[test]
    fn refine_nests() {
        let m = mesh(50);
        let r = m.refine();
        assert_eq!(r.len(), 99);
        for (i, x) in m.nodes.iter().enumerate() {
            assert_eq!(r.nodes[2 * i], *x);
        }
    }

    #[test]
    fn string_eigenvalue() {
        let e = weighted_rayleigh_min(Weight::One, Potential::Zero, &mesh(4000)).unwrap();
        assert!((e.value - PI * PI).abs() / (PI * PI) < 1e-3, "{}", e.value);
        assert!(e.residual < 1e-8, "{}", e.residual);
        assert_eq!(e.vector[0], 0.0);
        assert_eq!(*e.vector.last().unwrap(), 0.0);
        // eigenvector is sin(pi r) up to normalisation
        let (v, _) = e.interpolate(0.5);
        let (v2, _) = e.interpolate(0.25);
        assert_relative_eq!(v2 / v, (PI / 4.0).sin(), max_relative = 1e-4);
    }

    #[test]
    fn disk_weights_give_mu2() {
        let m = mesh(4000);
        for w in [Weight::R, Weight::OneMinusR] {
            let e = weighted_rayleigh_min(w, Potential::Zero, &m).unwrap();
            assert!((e.value - mu2()).abs() / mu2() < 1e-3, "{w:?}: {}", e.value);
            assert!(e.value >= mu2() - 1e-9);
            assert!(e.residual < 1e-8);
        }
    }

    #[test]
    fn pinned_degenerate_end_converges_slowly() {
        let m = mesh(4000);
        let free = weighted_rayleigh_min(Weight::R, Potential::Zero, &m).unwrap();
        let pinned = weighted_rayleigh_min_with(Weight::R, Potential::Zero, &m, DegenerateEnd::Pinned).unwrap();
        assert!(pinned.value > free.value);
        // capacity of a disk of radius h in the plane decays like 1 / ln(1/h)
        assert!(pinned.value - mu2() > 5e-3, "{}", pinned.value - mu2());
        assert!(free.value - mu2() < 1e-4);
        assert_eq!(pinned.vector[0], 0.0);
    }

    #[test]
    fn refinement_is_monotone() {
        for w in [Weight::One, Weight::R, Weight::OneMinusR] {
            let mut m = mesh(200);
            let mut prev = weighted_rayleigh_min(w, Potential::Zero, &m).unwrap();
            for _ in 0..3 {
                m = m.refine();
                let next = weighted_rayleigh_min(w, Potential::Zero, &m).unwrap();
                assert!(next.value <= prev.value * (1.0 + 1e-10), "{w:?}");
                prev = next;
            }
        }
    }

    #[test]
    fn best_constant_pinch() {
        let m = mesh(4000);
        let c3 = cn_transformed_estimate(3, &m).unwrap();
        assert!((c3.value - mu2()).abs() <= 5e-3);
        assert_eq!(cn_lower_bound(3).unwrap(), mu2());
        for n in [4, 5, 6] {
            let e = cn_transformed_estimate(n, &m).unwrap();
            assert!(e.value >= cn_lower_bound(n).unwrap() - 5e-3, "N={n}");
        }
        assert_relative_eq!(cn_lower_bound(2).unwrap(), mu2() - 0.25);
        assert_relative_eq!(cn_lower_bound(5).unwrap(), mu2() + 2.0);
        // N = 2 is computed but carries no claim
        assert!(cn_transformed_estimate(2, &m).unwrap().value.is_finite());
        assert!(cn_transformed_estimate(1, &m).is_err());
    }

    #[test]
    fn cm_values() {
        assert_eq!(cm_eigenvalue(1, 3).unwrap(), 2.0);
        assert_eq!(cm_eigenvalue(2, 2).unwrap(), 4.0);
        assert_eq!(cm_eigenvalue(1, 2).unwrap(), 1.0);
        assert!(cm_eigenvalue(0, 3).is_err());
    }

    #[test]
    fn u_eps_family() {
        let m = mesh(4000);
        let eps = [0.2, 0.1, 0.05, 0.02, 0.01];
        let q: Vec<f64> = eps.iter().map(|&e| u_eps_quotient(e, &m).unwrap()).collect();
        for (e, v) in eps.iter().zip(&q) {
            assert!(*v >= mu2() - 1e-6, "eps={e}");
        }
        assert!(q.windows(2).all(|w| w[1] < w[0]));
        let small = u_eps_quotient(1e-3, &m).unwrap() - mu2();
        assert!((0.0..=0.05).contains(&small), "{small}");
        // reference values from an independent high-resolution evaluation
        for (e, want) in [(0.2, 0.7764), (0.01, 0.03719), (0.001, 0.003711)] {
            assert!((u_eps_quotient(e, &m).unwrap() - mu2() - want).abs() < 2e-4, "eps={e}");
        }
        assert!(u_eps_quotient(1e-7, &m).is_err());
    }

    #[test]
    fn u_eps_matches_direct_quotient() {
        let j0 = first_j0_zero();
        for eps in [0.2, 0.1] {
            let trial = move |at: Radius| {
                let s = at.d;
                let w = bessel_j0(j0 * s);
                let dw = -j0 * bessel_j1(j0 * s);
                let g = s.powf(0.5 + eps);
                let dg = (0.5 + eps) * s.powf(eps - 0.5);
                let u = g * w / at.r;
                // d/dr = -d/ds
                let du = -(dg * w + g * dw) / at.r - u / at.r;
                (u, du)
            };
            let direct = radial_rayleigh_quotient(3, trial, 400, 1e-6, 1e-28).unwrap();
            let reduced = u_eps_quotient(eps, &mesh(4000)).unwrap();
            assert_relative_eq!(direct, reduced, max_relative = 1e-5);
        }
    }

    #[test]
    fn transformed_trials_respect_lower_bound() {
        let m = mesh(4000);
        for n in [3, 4, 5] {
            let c = transformed_potential_coeff(n);
            let pot = if c == 0.0 {
                Potential::Zero
            } else {
                Potential::InverseSquare { c }
            };
            let e = weighted_rayleigh_min_with(Weight::OneMinusR, pot, &m, DegenerateEnd::Pinned).unwrap();
            let q = radial_rayleigh_quotient(n, transformed_trial(n, &e).unwrap(), 2000, 1e-8, 1e-8).unwrap();
            assert!(q >= cn_lower_bound(n).unwrap() - 5e-3, "N={n}: {q}");
            assert!((q - e.value).abs() < 1e-4 * e.value, "N={n}: {q} vs {}", e.value);
        }
        // the free-end minimiser is not the transform of an admissible u
        let free = cn_transformed_estimate(3, &m).unwrap();
        assert!(transformed_trial(3, &free).is_err());
    }

    #[test]
    fn eig_result_json() {
        let e = weighted_rayleigh_min(Weight::One, Potential::Zero, &mesh(20)).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.contains("\"grading\":\"geometric-to-zero-and-one\""));
        let back: EigResult = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
