//! Iterated-logarithm tower `X_1(t) = 1/(1 - ln t)`, `X_k = X_1 o X_{k-1}`, and
//! the derived sums
//!
//! * `eta(t) = sum_{i<=k} X_1(t)...X_i(t)`
//! * `B(t)   = sum_{i<=k} X_1(t)^2...X_i(t)^2`
//! * `Gamma(t) = t B'(t)`
//!
//! Derivatives are analytic. Differentiating the composition gives
//! `X_k'(t) = X_1(t) ... X_{k-1}(t) X_k(t)^2 / t`, so with the prefix products
//! `P_i = X_1 ... X_i` and their partial sums `S_i = P_1 + ... + P_i` one gets
//! `t P_i' = P_i S_i`, hence `t eta' = sum P_i S_i = (eta^2 + B) / 2` and
//! `t B' = 2 sum P_i^2 S_i`.
//!
//! Everything is evaluated from `ln t`, which keeps the tower finite for
//! arguments far below the smallest positive double (`Tower::from_ln`).

use crate::error::{HardyError, Result};

/// The first `k` tower levels at one point, stored as logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct Tower {
    ln_x: Vec<f64>,
}

impl Tower {
    /// Tower of depth `k` at `t` in `(0, 1]`.
    pub fn new(k: usize, t: f64) -> Result<Self> {
        check_t(t)?;
        Ok(Self::from_ln(k, t.ln()))
    }

    /// Tower of depth `k` at the point whose logarithm is `ln_t <= 0`.
    ///
    /// No range check is done; callers guarantee `ln_t <= 0`.
    pub fn from_ln(k: usize, ln_t: f64) -> Self {
        let mut ln_x = Vec::with_capacity(k);
        let mut prev = ln_t;
        for _ in 0..k {
            // ln X_1(e^prev) = -ln(1 - prev)
            let next = -(-prev).ln_1p();
            ln_x.push(next);
            prev = next;
        }
        Tower { ln_x }
    }

    pub fn depth(&self) -> usize {
        self.ln_x.len()
    }

    /// `X_j` for `j` in `1..=k`.
    pub fn x(&self, j: usize) -> f64 {
        self.ln_x[j - 1].exp()
    }

    pub fn ln_x(&self, j: usize) -> f64 {
        self.ln_x[j - 1]
    }

    /// `ln P_i = ln(X_1 ... X_i)`, with `ln P_0 = 0`.
    pub fn ln_prefix(&self, i: usize) -> f64 {
        self.ln_x[..i].iter().sum()
    }

    fn prefixes(&self) -> impl Iterator<Item = f64> + '_ {
        self.ln_x.iter().scan(0.0, |acc, l| {
            *acc += l;
            Some(acc.exp())
        })
    }

    pub fn eta(&self) -> f64 {
        self.prefixes().sum()
    }

    pub fn bsum(&self) -> f64 {
        self.prefixes().map(|p| p * p).sum()
    }

    /// `ln B`, accurate even when every `P_i^2` underflows.
    pub fn ln_bsum(&self) -> f64 {
        if self.ln_x.is_empty() {
            return f64::NEG_INFINITY;
        }
        let terms: Vec<f64> = self
            .ln_x
            .iter()
            .scan(0.0, |acc, l| {
                *acc += 2.0 * l;
                Some(*acc)
            })
            .collect();
        log_sum_exp(&terms)
    }

    /// `t * eta'(t)`.
    pub fn t_eta_prime(&self) -> f64 {
        let mut partial = 0.0;
        let mut total = 0.0;
        for p in self.prefixes() {
            partial += p;
            total += p * partial;
        }
        total
    }

    /// `t * B'(t)`, i.e. `Gamma(t)`.
    pub fn t_bsum_prime(&self) -> f64 {
        let mut partial = 0.0;
        let mut total = 0.0;
        for p in self.prefixes() {
            partial += p;
            total += 2.0 * p * p * partial;
        }
        total
    }
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(HardyError::domain("t", t, "(0, 1]"))
    }
}

/// `X_1(t) = 1 / (1 - ln t)`.
pub fn x1(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(1.0 / (1.0 - t.ln()))
}

/// `X_k(t)`, the `k`-fold composition of `X_1`, for `k >= 1`.
pub fn xk(k: usize, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(HardyError::domain("k", 0.0, ">= 1"));
    }
    let mut v = t;
    for _ in 0..k {
        v = x1(v)?;
    }
    Ok(v)
}

pub fn eta(k: usize, t: f64) -> Result<f64> {
    Ok(Tower::new(k, t)?.eta())
}

pub fn bsum(k: usize, t: f64) -> Result<f64> {
    Ok(Tower::new(k, t)?.bsum())
}

/// `d eta / dt`.
pub fn eta_derivative(k: usize, t: f64) -> Result<f64> {
    Ok(Tower::new(k, t)?.t_eta_prime() / t)
}

/// `Gamma(t) = t B'(t)`.
pub fn gamma_fn(k: usize, t: f64) -> Result<f64> {
    Ok(Tower::new(k, t)?.t_bsum_prime())
}
