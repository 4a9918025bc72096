//! Closed-form constants: the unit-ball volume `a_N`, the volume-term constant
//! `k_p`, the sphere moment `K_p`, the Dirichlet disk eigenvalue `mu_2`, the
//! correction coefficient `a(p, k)` and the scale threshold `D_0`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{HardyError, Result};
use crate::geometry::sphere::sample_unit_sphere;
use crate::hardyfn::{lemma22_certified, s_grid, LemmaConfig};
use crate::logtower::Tower;
use crate::special::{first_j0_zero, ln_gamma};

/// Dimension, exponent, tower depth, scale and domain diameter for one
/// inequality evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyParams {
    pub n: usize,
    pub p: f64,
    pub k: usize,
    pub big_d: f64,
    pub diam: f64,
}

impl HardyParams {
    pub fn new(n: usize, p: f64, k: usize, big_d: f64, diam: f64) -> Result<Self> {
        if n < 2 {
            return Err(HardyError::domain("N", n as f64, ">= 2"));
        }
        check_p(p)?;
        if !(diam > 0.0 && diam.is_finite()) {
            return Err(HardyError::domain("diam", diam, "> 0"));
        }
        if !(big_d >= 0.5 * diam) {
            return Err(HardyError::domain("D", big_d, ">= diam/2"));
        }
        Ok(HardyParams { n, p, k, big_d, diam })
    }

    pub fn a(&self) -> f64 {
        a_coeff(self.p, self.k)
    }

    pub fn d0(&self) -> f64 {
        d0_threshold(self.p, self.k, self.diam)
    }

    /// `eta(diam / 2D)`.
    pub fn eta_d(&self) -> f64 {
        Tower::new(self.k, (0.5 * self.diam / self.big_d).min(1.0))
            .map(|t| t.eta())
            .unwrap_or(0.0)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(HardyError::domain("p", p, "> 1"))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(HardyError::domain("N", n as f64, ">= 2"))
    }
}

/// Volume of the unit ball in `R^N`.
pub fn unit_ball_volume(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(HardyError::domain("N", 0.0, ">= 1"));
    }
    let half = 0.5 * n as f64;
    Ok((half * PI.ln() - ln_gamma(half + 1.0)).exp())
}

/// `K_p = Gamma((p+1)/2) Gamma(N/2) / (sqrt(pi) Gamma((N+p)/2))`, the average of
/// `|e . w|^p` over the unit sphere.
///
/// `p > 0` is accepted here since the moment is finite for every positive
/// exponent; the inequality constants require `p > 1`.
pub fn sphere_moment(n: usize, p: f64) -> Result<f64> {
    check_dim(n)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(HardyError::domain("p", p, "> 0"));
    }
    let nf = n as f64;
    let ln = ln_gamma(0.5 * (p + 1.0)) + ln_gamma(0.5 * nf) - 0.5 * PI.ln() - ln_gamma(0.5 * (nf + p));
    Ok(ln.exp())
}

/// `k_p = (p-1) ((p-1)/p)^p / K_p`.
pub fn kp_constant(n: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    let moment = sphere_moment(n, p)?;
    Ok((p - 1.0) * ((p - 1.0) / p).powf(p) / moment)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Seeded Monte Carlo estimate of `(1/|v|^p) * avg_w |v . w|^p` over the sphere.
pub fn sphere_moment_monte_carlo(n: usize, p: f64, v: &[f64], samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check_dim(n)?;
    if v.len() != n {
        return Err(HardyError::Dimension {
            expected: n,
            got: v.len(),
        });
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(HardyError::ZeroVector);
    }
    if samples == 0 {
        return Err(HardyError::domain("n", 0.0, ">= 1"));
    }
    let unit: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![0.0; n];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        sample_unit_sphere(&mut rng, &mut w);
        let dot: f64 = unit.iter().zip(&w).map(|(a, b)| a * b).sum();
        let f = dot.abs().powf(p);
        sum += f;
        sum_sq += f * f;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / (m - 1.0).max(1.0)).sqrt(),
        samples,
    })
}

/// First Dirichlet eigenvalue of the unit disk, `j_{0,1}^2`.
pub fn mu2() -> f64 {
    first_j0_zero().powi(2)
}

/// `a = 0` for `p <= 2`, `(p - 2) k / (3 (p - 1))` for `p > 2`.
pub fn a_coeff(p: f64, k: usize) -> f64 {
    if p <= 2.0 {
        0.0
    } else {
        (p - 2.0) * k as f64 / (3.0 * (p - 1.0))
    }
}

/// Points in the certification grid used for `p != 2`.
pub const D0_GRID_POINTS: usize = 10_000;
/// Geometric ratio between consecutive grid points.
pub const GRID_RATIO: f64 = 1.01;
const D0_REL_WIDTH: f64 = 1e-6;

/// Scale threshold `D_0(k, p, diam)`.
///
/// `k = 0`: `diam / 2`. `p = 2`: the solution of `eta(diam / 2D) = 1`, rounded
/// up so that `eta <= 1` holds exactly. Otherwise the smallest `D` (to relative
/// width 1e-6) for which the three auxiliary-function conditions hold on the
/// certification grid with `b = diam / 2`.
pub fn d0_threshold(p: f64, k: usize, diam: f64) -> f64 {
    let half = 0.5 * diam;
    if k == 0 {
        return half;
    }
    if p == 2.0 {
        // eta(1) = k >= 1 and eta is increasing
        if k == 1 {
            return half;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if Tower::new(k, mid).map(|t| t.eta()).unwrap_or(0.0) <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return half / lo;
    }
    let grid = s_grid(half, D0_GRID_POINTS, GRID_RATIO);
    let holds = |d: f64| {
        LemmaConfig::new(p, k, d, half, grid.clone())
            .map(|cfg| lemma22_certified(&cfg, diam))
            .unwrap_or(false)
    };
    if holds(half) {
        return half;
    }
    let mut lo = half;
    let mut hi = 2.0 * half;
    while !holds(hi) {
        lo = hi;
        hi *= 2.0;
        assert!(hi < 1e300 * half, "no admissible D found");
    }
    while (hi - lo) > D0_REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
