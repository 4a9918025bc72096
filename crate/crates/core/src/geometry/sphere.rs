//! Quadrature on the unit sphere `S^{N-1}` with total measure one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{HardyError, Result};
use crate::quadrature::{Estimate, GaussLegendre};

/// Fill `out` with a uniformly distributed unit vector (normalised Gaussian).
pub fn sample_unit_sphere<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *v = g;
            norm2 += g * g;
        }
        if norm2 > 1e-300 {
            let inv = norm2.sqrt().recip();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SphereScheme {
    /// `n` equally spaced angles on the circle (N = 2).
    UniformAngle { n: usize },
    /// Gauss–Legendre in `cos(theta)` times equally spaced azimuths (N = 3).
    ProductGrid { n_polar: usize, n_azimuth: usize },
    /// `n` seeded uniform samples (any N).
    MonteCarlo { n: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    dim: usize,
    scheme: SphereScheme,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    coarse: Option<Box<SphereQuadrature>>,
}

impl SphereQuadrature {
    pub fn new(dim: usize, scheme: SphereScheme) -> Result<Self> {
        let mut q = Self::build(dim, scheme)?;
        q.coarse = match scheme {
            SphereScheme::UniformAngle { n } if n >= 4 => {
                Some(Box::new(Self::build(dim, SphereScheme::UniformAngle { n: n / 2 })?))
            }
            SphereScheme::ProductGrid { n_polar, n_azimuth } if n_polar >= 2 && n_azimuth >= 4 => {
                Some(Box::new(Self::build(
                    dim,
                    SphereScheme::ProductGrid {
                        n_polar: n_polar / 2,
                        n_azimuth: n_azimuth / 2,
                    },
                )?))
            }
            _ => None,
        };
        Ok(q)
    }

    /// Uniform angles for N = 2, product grid for N = 3, Monte Carlo above.
    pub fn default_for(dim: usize, resolution: usize, seed: u64) -> Result<Self> {
        match dim {
            2 => Self::new(2, SphereScheme::UniformAngle { n: resolution }),
            3 => Self::new(
                3,
                SphereScheme::ProductGrid {
                    n_polar: resolution / 2,
                    n_azimuth: resolution,
                },
            ),
            _ => Self::new(
                dim,
                SphereScheme::MonteCarlo {
                    n: resolution * resolution,
                    seed,
                },
            ),
        }
    }

    fn build(dim: usize, scheme: SphereScheme) -> Result<Self> {
        if dim < 2 {
            return Err(HardyError::domain("N", dim as f64, ">= 2"));
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match scheme {
            SphereScheme::UniformAngle { n } => {
                if dim != 2 || n == 0 {
                    return Err(HardyError::Unsupported("uniform-angle rule needs N = 2, n >= 1".into()));
                }
                for j in 0..n {
                    let th = 2.0 * PI * j as f64 / n as f64;
                    nodes.extend([th.cos(), th.sin()]);
                    weights.push(1.0 / n as f64);
                }
            }
            SphereScheme::ProductGrid { n_polar, n_azimuth } => {
                if dim != 3 || n_polar == 0 || n_azimuth == 0 {
                    return Err(HardyError::Unsupported("product grid needs N = 3".into()));
                }
                let gl = GaussLegendre::new(n_polar);
                for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                    let r = (1.0 - z * z).sqrt();
                    for j in 0..n_azimuth {
                        let ph = 2.0 * PI * (j as f64 + 0.5) / n_azimuth as f64;
                        let v = [r * ph.cos(), r * ph.sin(), *z];
                        let inv = 1.0 / (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                        nodes.extend(v.iter().map(|c| c * inv));
                        weights.push(wz / (2.0 * n_azimuth as f64));
                    }
                }
            }
            SphereScheme::MonteCarlo { n, seed } => {
                if n < 2 {
                    return Err(HardyError::domain("n", n as f64, ">= 2"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut w = vec![0.0; dim];
                for _ in 0..n {
                    sample_unit_sphere(&mut rng, &mut w);
                    nodes.extend_from_slice(&w);
                    weights.push(1.0 / n as f64);
                }
            }
        }
        Ok(SphereQuadrature {
            dim,
            scheme,
            nodes,
            weights,
            coarse: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scheme(&self) -> SphereScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dim)
    }

    /// Integrate several functions of the direction at once.
    ///
    /// Monte Carlo errors are standard errors; deterministic rules compare
    /// against the half-resolution rule.
    pub fn integrate_many<const M: usize>(&self, f: impl Fn(&[f64]) -> [f64; M]) -> [Estimate; M] {
        self.integrate_dyn(&f)
    }

    fn sums<const M: usize>(&self, f: &dyn Fn(&[f64]) -> [f64; M]) -> ([f64; M], [f64; M]) {
        let mut sum = [0.0; M];
        let mut sum_sq = [0.0; M];
        for (w, x) in self.weights.iter().zip(self.nodes()) {
            let v = f(x);
            for j in 0..M {
                sum[j] += w * v[j];
                sum_sq[j] += w * v[j] * v[j];
            }
        }
        (sum, sum_sq)
    }

    fn integrate_dyn<const M: usize>(&self, f: &dyn Fn(&[f64]) -> [f64; M]) -> [Estimate; M] {
        let (sum, sum_sq) = self.sums(f);
        let mut out = [Estimate::default(); M];
        match (&self.scheme, &self.coarse) {
            (SphereScheme::MonteCarlo { n, .. }, _) => {
                for j in 0..M {
                    let var = (sum_sq[j] - sum[j] * sum[j]).max(0.0);
                    out[j] = Estimate::new(sum[j], (var / (*n as f64 - 1.0)).sqrt());
                }
            }
            (_, Some(coarse)) => {
                let (c, _) = coarse.sums(f);
                for j in 0..M {
                    out[j] = Estimate::from_pair(sum[j], c[j]);
                }
            }
            _ => {
                for j in 0..M {
                    out[j] = Estimate::exact(sum[j]);
                }
            }
        }
        out
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> Estimate {
        self.integrate_many(|x| [f(x)])[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schemes() -> Vec<SphereQuadrature> {
        vec![
            SphereQuadrature::new(2, SphereScheme::UniformAngle { n: 256 }).unwrap(),
            SphereQuadrature::new(
                3,
                SphereScheme::ProductGrid {
                    n_polar: 32,
                    n_azimuth: 64,
                },
            )
            .unwrap(),
            SphereQuadrature::new(3, SphereScheme::MonteCarlo { n: 100_000, seed: 5 }).unwrap(),
            SphereQuadrature::new(5, SphereScheme::MonteCarlo { n: 100_000, seed: 9 }).unwrap(),
        ]
    }

    fn compensated_sum(xs: &[f64]) -> f64 {
        let (mut s, mut c) = (0.0f64, 0.0f64);
        for &x in xs {
            let t = s + x;
            c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
            s = t;
        }
        s + c
    }

    #[test]
    fn weights_and_nodes() {
        for q in schemes() {
            assert!((compensated_sum(q.weights()) - 1.0).abs() < 1e-14);
            for x in q.nodes() {
                let n: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn first_and_second_moments() {
        for q in schemes() {
            let dim = q.dim();
            let v: Vec<f64> = (0..dim).map(|i| 0.5 + i as f64).collect();
            let v2: f64 = v.iter().map(|c| c * c).sum();
            let [mean, second] = q.integrate_many(|w| {
                let d: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
                [d, d * d]
            });
            assert!(mean.value.abs() <= 5.0 * mean.error + 1e-12, "{mean:?}");
            let exact = v2 / dim as f64;
            assert!(
                (second.value - exact).abs() <= 5.0 * second.error + 1e-12 * exact,
                "{second:?}"
            );
        }
    }

    #[test]
    fn rejects_bad_schemes() {
        assert!(SphereQuadrature::new(3, SphereScheme::UniformAngle { n: 8 }).is_err());
        assert!(SphereQuadrature::new(
            2,
            SphereScheme::ProductGrid {
                n_polar: 4,
                n_azimuth: 8
            }
        )
        .is_err());
        assert!(SphereQuadrature::new(1, SphereScheme::MonteCarlo { n: 8, seed: 0 }).is_err());
    }

    #[test]
    fn seeded_rules_repeat() {
        let a = SphereQuadrature::new(4, SphereScheme::MonteCarlo { n: 100, seed: 1 }).unwrap();
        let b = SphereQuadrature::new(4, SphereScheme::MonteCarlo { n: 100, seed: 1 }).unwrap();
        assert_eq!(a, b);
    }
}
