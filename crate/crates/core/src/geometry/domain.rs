use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::unit_ball_volume;
use crate::error::{HardyError, Result};

/// Rays with `n . w <= DIR_EPS` never leave through face `n`.
pub const DIR_EPS: f64 = 1e-14;
const UNIT_TOL: f64 = 1e-10;

/// Intersection of half-spaces `n_i . x <= c_i` with unit normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPolytope {
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    vertices: Vec<Vec<f64>>,
    inradius: f64,
    volume: Option<f64>,
}

/// Dimensions in which facet measures, volume and level-set areas are computed.
pub const POLYTOPE_MEASURE_MAX_DIM: usize = 3;

/// A bounded convex domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConvexDomain {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    HPolytope(HPolytope),
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl ConvexDomain {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(HardyError::InvalidDomain("empty center".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(HardyError::domain("radius", radius, "> 0"));
        }
        Ok(ConvexDomain::Ball { center, radius })
    }

    pub fn unit_ball(n: usize) -> Self {
        ConvexDomain::Ball {
            center: vec![0.0; n],
            radius: 1.0,
        }
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(HardyError::InvalidDomain(
                "box corners must have equal, nonzero length".into(),
            ));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(HardyError::InvalidDomain("box needs lo < hi componentwise".into()));
        }
        Ok(ConvexDomain::Box { lo, hi })
    }

    /// `[0, 1]^n`.
    pub fn unit_cube(n: usize) -> Self {
        ConvexDomain::Box {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    /// Half-space description; normals are rescaled to unit length.
    pub fn polytope(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        Ok(ConvexDomain::HPolytope(HPolytope::new(normals, offsets)?))
    }

    /// Parse the polytope text format: one half-space `n_1 ... n_N c` per line
    /// meaning `n . x <= c`; `#` starts a comment line.
    pub fn parse_polytope(text: &str) -> Result<Self> {
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        let mut width = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|tok| tok.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| HardyError::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if vals.len() < 2 {
                return Err(HardyError::Parse {
                    line: i + 1,
                    msg: "need N + 1 numbers".into(),
                });
            }
            match width {
                None => width = Some(vals.len()),
                Some(w) if w != vals.len() => {
                    return Err(HardyError::Parse {
                        line: i + 1,
                        msg: format!("expected {w} numbers, found {}", vals.len()),
                    })
                }
                _ => {}
            }
            let (n, c) = vals.split_at(vals.len() - 1);
            normals.push(n.to_vec());
            offsets.push(c[0]);
        }
        if normals.is_empty() {
            return Err(HardyError::Parse {
                line: 0,
                msg: "no half-spaces".into(),
            });
        }
        Self::polytope(normals, offsets)
    }

    pub fn read_polytope(path: &std::path::Path) -> Result<Self> {
        Self::parse_polytope(&std::fs::read_to_string(path)?)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexDomain::Ball { center, .. } => center.len(),
            ConvexDomain::Box { lo, .. } => lo.len(),
            ConvexDomain::HPolytope(h) => h.dim(),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(HardyError::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Signed distance: positive inside, negative outside.
    pub(crate) fn signed_distance(&self, x: &[f64]) -> f64 {
        match self {
            ConvexDomain::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                radius - r2.sqrt()
            }
            ConvexDomain::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(xi, (l, h))| (xi - l).min(h - xi))
                .fold(f64::INFINITY, f64::min),
            ConvexDomain::HPolytope(h) => h
                .normals
                .iter()
                .zip(&h.offsets)
                .map(|(n, c)| c - dot(n, x))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// `d(x) = dist(x, boundary)` for `x` in the closed domain.
    ///
    /// For polytopes the minimum over facet planes is exact for interior
    /// points of a convex polytope.
    pub fn boundary_distance(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let d = self.signed_distance(x);
        if d < 0.0 {
            return Err(HardyError::OutsideDomain(d));
        }
        Ok(d)
    }

    /// Directional exit time `tau_w(x) = inf { s > 0 : x + s w not in domain }`.
    pub fn exit_time(&self, x: &[f64], w: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(w)?;
        let nw = norm(w);
        if (nw - 1.0).abs() > UNIT_TOL {
            return Err(HardyError::NotUnit(nw));
        }
        let d = self.signed_distance(x);
        if d < 0.0 {
            return Err(HardyError::OutsideDomain(d));
        }
        if d == 0.0 {
            return Err(HardyError::OnBoundary);
        }
        Ok(self.exit_time_unchecked(x, w))
    }

    /// Exit time for an interior `x` and unit `w`, without validation.
    pub(crate) fn exit_time_unchecked(&self, x: &[f64], w: &[f64]) -> f64 {
        match self {
            ConvexDomain::Ball { center, radius } => {
                let mut b = 0.0;
                let mut c = -radius * radius;
                for ((xi, ci), wi) in x.iter().zip(center).zip(w) {
                    let y = xi - ci;
                    b += y * wi;
                    c += y * y;
                }
                // s^2 + 2 b s + c = 0 with c < 0; take the positive root stably
                let disc = (b * b - c).sqrt();
                if b <= 0.0 {
                    disc - b
                } else {
                    -c / (b + disc)
                }
            }
            ConvexDomain::Box { lo, hi } => {
                let mut t = f64::INFINITY;
                for ((xi, wi), (l, h)) in x.iter().zip(w).zip(lo.iter().zip(hi)) {
                    if *wi > DIR_EPS {
                        t = t.min((h - xi) / wi);
                    } else if *wi < -DIR_EPS {
                        t = t.min((l - xi) / wi);
                    }
                }
                t
            }
            ConvexDomain::HPolytope(h) => {
                let mut t = f64::INFINITY;
                for (n, c) in h.normals.iter().zip(&h.offsets) {
                    let nw = dot(n, w);
                    if nw > DIR_EPS {
                        t = t.min((c - dot(n, x)) / nw);
                    }
                }
                t
            }
        }
    }

    /// `(rho_w, b_w)`: the smaller and the mean of the two exit times along `+-w`.
    pub(crate) fn rho_b_unchecked(&self, x: &[f64], w: &[f64], scratch: &mut [f64]) -> (f64, f64, f64) {
        let fwd = self.exit_time_unchecked(x, w);
        for (s, wi) in scratch.iter_mut().zip(w) {
            *s = -wi;
        }
        let back = self.exit_time_unchecked(x, scratch);
        (fwd.min(back), 0.5 * (fwd + back), fwd)
    }

    /// `rho_w(x) = min(tau_w, tau_-w)`.
    pub fn rho(&self, x: &[f64], w: &[f64]) -> Result<f64> {
        let fwd = self.exit_time(x, w)?;
        let neg: Vec<f64> = w.iter().map(|c| -c).collect();
        Ok(fwd.min(self.exit_time(x, &neg)?))
    }

    /// `b_w(x) = (tau_w + tau_-w) / 2`.
    pub fn b_mean(&self, x: &[f64], w: &[f64]) -> Result<f64> {
        let fwd = self.exit_time(x, w)?;
        let neg: Vec<f64> = w.iter().map(|c| -c).collect();
        Ok(0.5 * (fwd + self.exit_time(x, &neg)?))
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexDomain::Ball { radius, .. } => 2.0 * radius,
            ConvexDomain::Box { lo, hi } => {
                let d: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
                norm(&d)
            }
            ConvexDomain::HPolytope(h) => {
                let mut best: f64 = 0.0;
                for (i, a) in h.vertices.iter().enumerate() {
                    for b in &h.vertices[i + 1..] {
                        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                        best = best.max(norm(&d));
                    }
                }
                best
            }
        }
    }

    /// Lebesgue measure. Polytopes: exact for `N <= 3`, `None` above.
    pub fn volume(&self) -> Option<f64> {
        match self {
            ConvexDomain::Ball { center, radius } => {
                Some(unit_ball_volume(center.len()).ok()? * radius.powi(center.len() as i32))
            }
            ConvexDomain::Box { lo, hi } => Some(lo.iter().zip(hi).map(|(a, b)| b - a).product()),
            ConvexDomain::HPolytope(h) => h.volume,
        }
    }

    /// `max d(x)`.
    pub fn inradius(&self) -> Option<f64> {
        match self {
            ConvexDomain::Ball { radius, .. } => Some(*radius),
            ConvexDomain::Box { lo, hi } => Some(
                lo.iter()
                    .zip(hi)
                    .map(|(a, b)| 0.5 * (b - a))
                    .fold(f64::INFINITY, f64::min),
            ),
            ConvexDomain::HPolytope(h) => Some(h.inradius),
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConvexDomain::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            ConvexDomain::Box { lo, hi } => (lo.clone(), hi.clone()),
            ConvexDomain::HPolytope(h) => {
                let n = h.dim();
                let mut lo = vec![f64::INFINITY; n];
                let mut hi = vec![f64::NEG_INFINITY; n];
                for v in &h.vertices {
                    for i in 0..n {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// `count` seeded interior points with `d(x) >= min_depth`, by rejection
    /// from the bounding box.
    pub fn sample_interior(&self, count: usize, min_depth: f64, seed: u64) -> Vec<Vec<f64>> {
        let (lo, hi) = self.bounding_box();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            assert!(
                attempts < 1000 * count + 100_000,
                "rejection sampling found no interior points"
            );
            let x: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..*h)).collect();
            if self.signed_distance(&x) >= min_depth {
                out.push(x);
            }
        }
        out
    }

    /// A strictly interior reference point.
    pub fn reference_point(&self) -> Vec<f64> {
        match self {
            ConvexDomain::Ball { center, .. } => center.clone(),
            ConvexDomain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            ConvexDomain::HPolytope(h) => h.centroid(),
        }
    }
}

impl HPolytope {
    pub fn new(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        if normals.is_empty() || normals.len() != offsets.len() {
            return Err(HardyError::InvalidDomain("need one offset per normal".into()));
        }
        let dim = normals[0].len();
        if dim == 0 || normals.iter().any(|n| n.len() != dim) {
            return Err(HardyError::InvalidDomain(
                "normals must share a nonzero dimension".into(),
            ));
        }
        let mut unit = Vec::with_capacity(normals.len());
        let mut offs = Vec::with_capacity(normals.len());
        for (n, c) in normals.iter().zip(&offsets) {
            let l = norm(n);
            if l == 0.0 || !l.is_finite() || !c.is_finite() {
                return Err(HardyError::InvalidDomain("degenerate half-space".into()));
            }
            unit.push(n.iter().map(|x| x / l).collect::<Vec<f64>>());
            offs.push(c / l);
        }
        if is_unbounded(&unit) {
            return Err(HardyError::Unbounded);
        }
        let vertices = enumerate_vertices(&unit, &offs);
        let mut poly = HPolytope {
            normals: unit,
            offsets: offs,
            vertices,
            inradius: 0.0,
            volume: None,
        };
        if poly.vertices.len() < dim + 1 {
            return Err(HardyError::EmptyInterior);
        }
        let c = poly.centroid();
        let depth = poly
            .normals
            .iter()
            .zip(&poly.offsets)
            .map(|(n, o)| o - dot(n, &c))
            .fold(f64::INFINITY, f64::min);
        let scale = poly.vertices.iter().map(|v| norm(v)).fold(1.0, f64::max);
        if depth <= 1e-12 * scale {
            return Err(HardyError::EmptyInterior);
        }
        poly.vertices
            .sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        poly.inradius = poly.chebyshev_radius();
        if dim <= POLYTOPE_MEASURE_MAX_DIM {
            // cones from an interior point over each facet
            let c = poly.centroid();
            let facets = poly.facet_measures(0.0);
            let v: f64 = poly
                .normals
                .iter()
                .zip(&poly.offsets)
                .zip(&facets)
                .map(|((n, o), a)| (o - dot(n, &c)) * a)
                .sum();
            poly.volume = Some(v / dim as f64);
        }
        Ok(poly)
    }

    /// `max t` over the lifted constraints `n_i . x + t <= c_i`, `t >= 0`.
    fn chebyshev_radius(&self) -> f64 {
        let dim = self.dim();
        let mut normals: Vec<Vec<f64>> = self
            .normals
            .iter()
            .map(|n| n.iter().copied().chain([1.0]).collect())
            .collect();
        let mut offsets = self.offsets.clone();
        let mut floor = vec![0.0; dim + 1];
        floor[dim] = -1.0;
        normals.push(floor);
        offsets.push(0.0);
        enumerate_vertices(&normals, &offsets)
            .iter()
            .map(|v| v[dim])
            .fold(0.0, f64::max)
    }

    /// Vertices of `P(t) = {n_i . x <= c_i - t}`, each with its active constraints.
    fn parallel_body(&self, t: f64) -> Vec<(Vec<f64>, Vec<usize>)> {
        let shifted: Vec<f64> = self.offsets.iter().map(|c| c - t).collect();
        enumerate_vertices(&self.normals, &shifted)
            .into_iter()
            .map(|v| {
                let tol = 1e-9 * (1.0 + norm(&v));
                let active = self
                    .normals
                    .iter()
                    .zip(&shifted)
                    .enumerate()
                    .filter(|(_, (n, c))| (dot(n, &v) - *c).abs() <= tol)
                    .map(|(i, _)| i)
                    .collect();
                (v, active)
            })
            .collect()
    }

    /// `(N-1)`-measure of each facet of `P(t)`. Requires `N <= 3`.
    fn facet_measures(&self, t: f64) -> Vec<f64> {
        let dim = self.dim();
        let body = self.parallel_body(t);
        (0..self.normals.len())
            .map(|i| {
                let pts: Vec<&Vec<f64>> = body.iter().filter(|(_, a)| a.contains(&i)).map(|(v, _)| v).collect();
                match dim {
                    1 => (pts.len() == 1) as u8 as f64,
                    2 => {
                        let mut best = 0.0f64;
                        for a in &pts {
                            for b in &pts {
                                let d: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
                                best = best.max(norm(&d));
                            }
                        }
                        best
                    }
                    _ => polygon_area(&self.normals[i], &pts),
                }
            })
            .collect()
    }

    /// Surface measure of `{d = t}`, the sum of the facet measures of `P(t)`.
    /// `None` for `N > 3`.
    pub fn level_set_area(&self, t: f64) -> Option<f64> {
        if self.dim() > POLYTOPE_MEASURE_MAX_DIM {
            return None;
        }
        if !(t >= 0.0 && t < self.inradius) {
            return Some(0.0);
        }
        Some(self.facet_measures(t).iter().sum())
    }

    /// Depths in `(0, inradius)` where the face structure of `P(t)` changes and
    /// the level-set area has a kink.
    pub fn level_set_breaks(&self) -> Vec<f64> {
        const SCAN: usize = 256;
        let signature = |t: f64| {
            let mut s: Vec<Vec<usize>> = self.parallel_body(t).into_iter().map(|(_, a)| a).collect();
            s.sort();
            s
        };
        let r = self.inradius;
        let mut out = Vec::new();
        let mut prev_t = 0.0;
        let mut prev = signature(prev_t);
        for i in 1..SCAN {
            let t = r * i as f64 / SCAN as f64;
            let sig = signature(t);
            if sig != prev {
                let (mut a, mut b) = (prev_t, t);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if signature(m) == prev {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                out.push(0.5 * (a + b));
            }
            prev_t = t;
            prev = sig;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.normals[0].len()
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    fn centroid(&self) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        for v in &self.vertices {
            for i in 0..n {
                c[i] += v[i];
            }
        }
        c.iter_mut().for_each(|x| *x /= self.vertices.len() as f64);
        c
    }
}

/// Area of the convex polygon through `pts`, which lie in a plane with unit normal `n`.
fn polygon_area(n: &[f64], pts: &[&Vec<f64>]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    // orthonormal basis (e1, e2) of the plane
    let k = (0..3).min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs())).unwrap_or(0);
    let mut e1 = [0.0; 3];
    e1[k] = 1.0;
    let p = dot(&e1, n);
    for j in 0..3 {
        e1[j] -= p * n[j];
    }
    let l = norm(&e1);
    e1.iter_mut().for_each(|x| *x /= l);
    let e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ];
    let mut uv: Vec<(f64, f64)> = pts.iter().map(|v| (dot(v, &e1), dot(v, &e2))).collect();
    let m = uv.len() as f64;
    let (cx, cy) = uv.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
    uv.sort_by(|a, b| (a.1 - cy).atan2(a.0 - cx).total_cmp(&(b.1 - cy).atan2(b.0 - cx)));
    let mut twice = 0.0;
    for i in 0..uv.len() {
        let (x0, y0) = uv[i];
        let (x1, y1) = uv[(i + 1) % uv.len()];
        twice += x0 * y1 - x1 * y0;
    }
    0.5 * twice.abs()
}

fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    if r > m {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = r;
        while i > 0 && idx[i - 1] == m - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn rank(rows: &[Vec<f64>]) -> usize {
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    m.rank(1e-10)
}

/// The recession cone `{d : n_i . d <= 0}` is nontrivial iff the normals do not
/// span, or an extreme ray (kernel of `N - 1` normals) lies in it.
fn is_unbounded(normals: &[Vec<f64>]) -> bool {
    let dim = normals[0].len();
    if normals.len() <= dim || rank(normals) < dim {
        return true;
    }
    if dim == 1 {
        let pos = normals.iter().any(|n| n[0] > 0.0);
        let neg = normals.iter().any(|n| n[0] < 0.0);
        return !(pos && neg);
    }
    for subset in combinations(normals.len(), dim - 1) {
        // generalized cross product of the chosen rows
        let d: Vec<f64> = (0..dim)
            .map(|j| {
                let minor = DMatrix::from_fn(dim - 1, dim - 1, |r, c| {
                    normals[subset[r]][if c < j { c } else { c + 1 }]
                });
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * minor.determinant()
            })
            .collect();
        let len = norm(&d);
        if len < 1e-12 {
            continue;
        }
        for s in [1.0, -1.0] {
            if normals.iter().all(|n| s * dot(n, &d) <= 1e-12 * len) {
                return true;
            }
        }
    }
    false
}

fn enumerate_vertices(normals: &[Vec<f64>], offsets: &[f64]) -> Vec<Vec<f64>> {
    let dim = normals[0].len();
    let mut verts: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(normals.len(), dim) {
        let a = DMatrix::from_fn(dim, dim, |r, c| normals[subset[r]][c]);
        let rhs = DVector::from_fn(dim, |r, _| offsets[subset[r]]);
        let Some(x) = a.lu().solve(&rhs) else { continue };
        let x: Vec<f64> = x.iter().copied().collect();
        if x.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let scale = 1.0 + norm(&x);
        let feasible = normals.iter().zip(offsets).all(|(n, c)| dot(n, &x) <= c + 1e-9 * scale);
        if feasible {
            let dup = verts
                .iter()
                .any(|v| v.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < 1e-9 * scale);
            if !dup {
                verts.push(x);
            }
        }
    }
    verts
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cube_as_polytope(n: usize) -> ConvexDomain {
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            normals.push(e.clone());
            offsets.push(1.0);
            e[i] = -2.0; // deliberately not unit
            normals.push(e);
            offsets.push(0.0);
        }
        ConvexDomain::polytope(normals, offsets).unwrap()
    }

    #[test]
    fn distance_examples() {
        let ball = ConvexDomain::unit_ball(3);
        assert_eq!(ball.boundary_distance(&[0.0; 3]).unwrap(), 1.0);
        let sq = ConvexDomain::unit_cube(2);
        assert_eq!(sq.boundary_distance(&[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(sq.boundary_distance(&[1.0, 0.5]).unwrap(), 0.0);
        assert!(sq.boundary_distance(&[1.5, 0.5]).is_err());
        assert!(sq.boundary_distance(&[0.5]).is_err());
    }

    #[test]
    fn polytope_cube_matches_box() {
        let poly = cube_as_polytope(3);
        let cube = ConvexDomain::unit_cube(3);
        for x in cube.sample_interior(100, 0.0, 42) {
            assert_relative_eq!(
                poly.boundary_distance(&x).unwrap(),
                cube.boundary_distance(&x).unwrap(),
                epsilon = 1e-14
            );
        }
        assert_relative_eq!(poly.diameter(), 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn exit_time_examples() {
        let ball = ConvexDomain::unit_ball(2);
        for th in [0.0, 1.0, 2.5] {
            let w = [f64::cos(th), f64::sin(th)];
            assert_relative_eq!(ball.exit_time(&[0.0, 0.0], &w).unwrap(), 1.0, epsilon = 1e-15);
        }
        let sq = ConvexDomain::unit_cube(2);
        assert_eq!(sq.exit_time(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
        assert_eq!(sq.exit_time(&[0.25, 0.5], &[-1.0, 0.0]).unwrap(), 0.25);
        assert!(sq.exit_time(&[0.0, 0.5], &[1.0, 0.0]).is_err());
        assert!(sq.exit_time(&[0.5, 0.5], &[1.0, 1.0]).is_err());
        // off-centre ball point hits the sphere
        let x = [0.3, -0.2];
        let w = [0.6, 0.8];
        let t = ball.exit_time(&x, &w).unwrap();
        let y = [x[0] + t * w[0], x[1] + t * w[1]];
        assert_relative_eq!(norm(&y), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rho_and_b() {
        let ball = ConvexDomain::ball(vec![1.0, 2.0], 3.0).unwrap();
        let w = [0.6, -0.8];
        assert_relative_eq!(ball.rho(&[1.0, 2.0], &w).unwrap(), 3.0, epsilon = 1e-14);
        assert_relative_eq!(ball.b_mean(&[1.0, 2.0], &w).unwrap(), 3.0, epsilon = 1e-14);
        let sq = ConvexDomain::unit_cube(2);
        assert_eq!(sq.rho(&[0.25, 0.5], &[1.0, 0.0]).unwrap(), 0.25);
        assert_eq!(sq.b_mean(&[0.25, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
    }

    #[test]
    fn rho_dominates_distance() {
        let simplex = ConvexDomain::polytope(
            vec![
                vec![-1.0, 0.0, 0.0],
                vec![0.0, -1.0, 0.0],
                vec![0.0, 0.0, -1.0],
                vec![1.0, 1.0, 1.0],
            ],
            vec![0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let slab = ConvexDomain::boxed(vec![0.0, 0.0, 0.0], vec![4.0, 4.0, 0.2]).unwrap();
        let domains = [ConvexDomain::unit_ball(3), ConvexDomain::unit_cube(3), simplex, slab];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut w = vec![0.0; 3];
        for dom in &domains {
            let diam = dom.diameter();
            for x in dom.sample_interior(1000, 1e-3 * diam, 17) {
                crate::geometry::sphere::sample_unit_sphere(&mut rng, &mut w);
                let d = dom.boundary_distance(&x).unwrap();
                let r = dom.rho(&x, &w).unwrap();
                assert!(r >= d * (1.0 - 1e-12), "rho {r} < d {d}");
                assert!(r <= dom.b_mean(&x, &w).unwrap());
            }
        }
    }

    #[test]
    fn diameters() {
        assert_eq!(ConvexDomain::unit_ball(4).diameter(), 2.0);
        assert_relative_eq!(ConvexDomain::unit_cube(3).diameter(), 3f64.sqrt());
        let tri = ConvexDomain::polytope(
            vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
            vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        assert_relative_eq!(tri.diameter(), 2f64.sqrt(), epsilon = 1e-12);
        if let ConvexDomain::HPolytope(h) = &tri {
            assert_eq!(h.vertices().len(), 3);
        }
    }

    #[test]
    fn polytope_errors() {
        // half-plane strip is unbounded
        let strip = ConvexDomain::polytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![1.0, 1.0]);
        assert_eq!(strip.unwrap_err(), HardyError::Unbounded);
        // wedge: three constraints but a recession direction
        let wedge = ConvexDomain::polytope(
            vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![-1.0, -1.0]],
            vec![0.0, 0.0, 1.0],
        );
        assert_eq!(wedge.unwrap_err(), HardyError::Unbounded);
        let empty = ConvexDomain::polytope(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![-1.0, 0.0, 1.0, 1.0],
        );
        assert_eq!(empty.unwrap_err(), HardyError::EmptyInterior);
    }

    #[test]
    fn parse_format() {
        let text = "# unit square\n1 0 1\n-1 0 0\n\n0 1 1\n0 -1 0\n";
        let dom = ConvexDomain::parse_polytope(text).unwrap();
        assert_eq!(dom.dim(), 2);
        assert_eq!(dom.boundary_distance(&[0.5, 0.25]).unwrap(), 0.25);
        assert!(matches!(
            ConvexDomain::parse_polytope("1 0 1\n1 0\n"),
            Err(HardyError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ConvexDomain::parse_polytope("1 x 1\n"),
            Err(HardyError::Parse { line: 1, .. })
        ));
        assert!(ConvexDomain::parse_polytope("# nothing\n").is_err());
    }

    #[test]
    fn volumes_and_inradius() {
        assert_relative_eq!(ConvexDomain::unit_ball(2).volume().unwrap(), std::f64::consts::PI);
        let b = ConvexDomain::boxed(vec![0.0, 0.0], vec![2.0, 0.5]).unwrap();
        assert_eq!(b.volume(), Some(1.0));
        assert_eq!(b.inradius(), Some(0.25));
        let sq = cube_as_polytope(2);
        assert_relative_eq!(sq.volume().unwrap(), 1.0, epsilon = 1e-13);
        assert_relative_eq!(sq.inradius().unwrap(), 0.5, epsilon = 1e-12);
        let seg = ConvexDomain::polytope(vec![vec![1.0], vec![-1.0]], vec![3.0, 1.0]).unwrap();
        assert_relative_eq!(seg.volume().unwrap(), 4.0, epsilon = 1e-13);
        assert_relative_eq!(seg.inradius().unwrap(), 2.0, epsilon = 1e-12);
    }

    fn simplex(n: usize) -> HPolytope {
        let mut normals: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = -1.0;
                e
            })
            .collect();
        normals.push(vec![1.0; n]);
        let mut offsets = vec![0.0; n];
        offsets.push(1.0);
        HPolytope::new(normals, offsets).unwrap()
    }

    #[test]
    fn simplex_parallel_bodies_are_homothetic() {
        // P(t) = incentre + (1 - t/r)(P - incentre), so S(t) = N |P| (1 - t/r)^(N-1) / r
        for n in [2usize, 3] {
            let s = simplex(n);
            let nf = n as f64;
            let vol = 1.0 / (1..=n).product::<usize>() as f64;
            let r = 1.0 / (nf + nf.sqrt());
            assert_relative_eq!(s.volume.unwrap(), vol, epsilon = 1e-13);
            assert_relative_eq!(s.inradius, r, epsilon = 1e-12);
            for t in [0.0, 0.1 * r, 0.5 * r, 0.9 * r] {
                let exact = nf * vol * (1.0 - t / r).powi(n as i32 - 1) / r;
                assert_relative_eq!(s.level_set_area(t).unwrap(), exact, max_relative = 1e-10);
            }
            assert!(s.level_set_breaks().is_empty());
        }
    }

    #[test]
    fn polytope_level_sets_match_box() {
        let poly = cube_as_polytope(3);
        let ConvexDomain::HPolytope(h) = &poly else {
            unreachable!()
        };
        for t in [0.0, 0.1, 0.3, 0.45] {
            let exact = 6.0 * (1.0 - 2.0 * t) * (1.0 - 2.0 * t);
            assert_relative_eq!(h.level_set_area(t).unwrap(), exact, max_relative = 1e-10);
        }
        assert_eq!(h.level_set_area(0.6), Some(0.0));
    }

    #[test]
    fn level_set_areas_integrate_to_volume() {
        // unit cube with a corner cut off: the cut facet vanishes at a depth inside (0, r)
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for i in 0..3 {
            let mut e = vec![0.0; 3];
            e[i] = 1.0;
            normals.push(e.clone());
            offsets.push(1.0);
            e[i] = -1.0;
            normals.push(e);
            offsets.push(0.0);
        }
        normals.push(vec![1.0, 1.0, 1.0]);
        offsets.push(2.5);
        let h = HPolytope::new(normals, offsets).unwrap();
        let vol = 1.0 - 0.125 / 6.0;
        assert_relative_eq!(h.volume.unwrap(), vol, epsilon = 1e-12);
        let breaks = h.level_set_breaks();
        assert!(!breaks.is_empty());
        let gl = crate::quadrature::GaussLegendre::new(8);
        let mut pts = vec![0.0];
        pts.extend(&breaks);
        pts.push(h.inradius);
        let integral: f64 = pts
            .windows(2)
            .flat_map(|w| gl.mapped(w[0], w[1]).collect::<Vec<_>>())
            .map(|(t, wt)| wt * h.level_set_area(t).unwrap())
            .sum();
        assert_relative_eq!(integral, vol, max_relative = 1e-9);
        let four = HPolytope::new(vec![vec![1.0, 0.0, 0.0, 0.0]; 1], vec![1.0]);
        assert!(four.is_err());
    }
}
