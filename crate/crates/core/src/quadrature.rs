//! Gauss–Legendre rules and composite panel integration.

use std::f64::consts::PI;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = ((i as f64 + 0.75) / (nf + 0.5) * PI).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A value together with an a-posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    /// Compare a fine and a coarse evaluation; the error has a rounding floor.
    pub fn from_pair(fine: f64, coarse: f64) -> Self {
        Estimate {
            value: fine,
            error: (fine - coarse).abs().max(64.0 * f64::EPSILON * fine.abs()),
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Estimate::new(c * self.value, c.abs() * self.error)
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate::new(self.value + o.value, self.error + o.error)
    }
}

/// Composite Gauss–Legendre over `panels` equal panels of `[a, b]`.
pub fn composite(rule: &GaussLegendre, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == panels { b } else { lo + h };
            rule.integrate(lo, hi, &f)
        })
        .sum()
}

/// Composite rule on equal panels, with an error estimate from halving the
/// panel count.
pub fn composite_estimate(rule: &GaussLegendre, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> Estimate {
    let fine = composite(rule, a, b, panels, &f);
    let coarse = composite(rule, a, b, (panels / 2).max(1), &f);
    Estimate::from_pair(fine, coarse)
}

/// Breakpoints of `[a, b]` with geometric grading toward `a`: panel widths grow
/// geometrically and the first is `smallest` times the last.
pub fn graded_breaks(a: f64, b: f64, panels: usize, smallest: f64) -> Vec<f64> {
    let ratio = (1.0 / smallest).powf(1.0 / (panels as f64 - 1.0).max(1.0));
    let mut widths: Vec<f64> = (0..panels).map(|i| ratio.powi(i as i32)).collect();
    let total: f64 = widths.iter().sum();
    widths.iter_mut().for_each(|w| *w *= (b - a) / total);
    let mut breaks = Vec::with_capacity(panels + 1);
    let mut x = a;
    breaks.push(x);
    for (i, w) in widths.iter().enumerate() {
        x = if i + 1 == panels { b } else { x + w };
        breaks.push(x);
    }
    breaks
}

/// Integrate over consecutive panels given by `breaks`.
pub fn over_breaks(rule: &GaussLegendre, breaks: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    breaks.windows(2).map(|w| rule.integrate(w[0], w[1], &f)).sum()
}
