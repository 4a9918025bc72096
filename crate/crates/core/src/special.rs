//! Gamma and Bessel functions of the first kind, orders 0 and 1.

use std::f64::consts::{FRAC_PI_2, PI};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is already shifted by -1
    let mut s = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (x + i as f64);
    }
    s
}

/// The Gamma function for real `x` (not a non-positive integer).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x > 140.0 {
        return ln_gamma(x).exp();
    }
    let z = x - 1.0;
    let w = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * w.powf(z + 0.5) * (-w).exp() * lanczos_sum(z)
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let w = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * w.ln() - w + lanczos_sum(z).ln()
}

const SERIES_LIMIT: f64 = 8.0;
const MILLER_LIMIT: f64 = 25.0;

/// Bessel function `J_0(x)`.
///
/// Power series for `|x| <= 8`, Miller's backward recurrence up to 25, Hankel's
/// asymptotic expansion beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        series(ax, 0)
    } else if ax <= MILLER_LIMIT {
        miller(ax).0
    } else {
        hankel(ax, 0)
    }
}

/// Bessel function `J_1(x)`.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        series(ax, 1)
    } else if ax <= MILLER_LIMIT {
        miller(ax).1
    } else {
        hankel(ax, 1)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn series(x: f64, order: u32) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= q / (m * (m + order as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        m += 1.0;
    }
    sum
}

fn miller(x: f64) -> (f64, f64) {
    let mut n = (x as usize + 40) & !1;
    let mut above = 0.0;
    let mut cur = 1e-30;
    let mut norm = 0.0;
    let mut j1 = 0.0;
    while n > 0 {
        let below = 2.0 * n as f64 / x * cur - above;
        above = cur;
        cur = below;
        n -= 1;
        // cur now holds J_n (unnormalised)
        if n == 1 {
            j1 = cur;
        }
        if n > 0 && n.is_multiple_of(2) {
            norm += 2.0 * cur;
        }
    }
    norm += cur;
    (cur / norm, j1 / norm)
}

fn hankel(x: f64, order: u32) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if a.abs() > last {
            break;
        }
        last = a.abs();
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (order as f64 + 0.5) * FRAC_PI_2;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// First positive zero of `J_0`, by safeguarded Newton iteration on `[2, 3]`.
pub fn first_j0_zero() -> f64 {
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    let mut x = 2.4;
    for _ in 0..100 {
        let f = bessel_j0(x);
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = f / bessel_j1(x); // J0' = -J1
        let mut next = x + step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            return next;
        }
        x = next;
    }
    x
}
