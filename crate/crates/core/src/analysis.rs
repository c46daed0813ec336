//! Closed-form performance and complexity figures for overlay on simulation.

use crate::detect::ListParams;
use crate::error::{Error, Result};

/// Inputs of the per-layer success bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInputs {
    pub m: usize,
    pub s: usize,
    /// `|h|^2`
    pub h_mag2: f64,
    pub n0: f64,
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Variance of one entry of the conjugate half-product at layer `s`,
/// `2|h|^2 N0 / 2^(m-s) + (N0 / 2^(m-s))^2`.
pub fn layer_noise_variance(m: usize, s: usize, h_mag2: f64, n0: f64) -> f64 {
    let n = n0 / (1u64 << (m - s)) as f64;
    2.0 * h_mag2 * n + n * n
}

fn check_inputs(m: usize, h_mag2: f64, n0: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    if !(h_mag2 >= 0.0 && h_mag2.is_finite()) || !(n0 >= 0.0 && n0.is_finite()) {
        return Err(Error::Config(format!("bound inputs |h|^2 = {h_mag2}, N0 = {n0}")));
    }
    Ok(())
}

/// Union lower bound on recovering layer `s` given correct layers above:
/// `max(0, 1 - (2^(s-1) - 1) Phi(-2^(s-1)|h|^2 / sqrt(2^(s-1) sigma^2)))`.
pub fn layer_success_bound(inputs: BoundInputs) -> Result<f64> {
    let BoundInputs { m, s, h_mag2, n0 } = inputs;
    check_inputs(m, h_mag2, n0)?;
    if !(2..=m).contains(&s) {
        return Err(Error::LayerOutOfRange { s, m });
    }
    let half = (1u64 << (s - 1)) as f64;
    let var = layer_noise_variance(m, s, h_mag2, n0);
    let tail = if h_mag2 == 0.0 {
        0.5
    } else if var == 0.0 {
        0.0
    } else {
        std_normal_cdf(-half * h_mag2 / (half * var).sqrt())
    };
    Ok((1.0 - (half - 1.0) * tail).max(0.0))
}

/// Product of the layer bounds over `s = m..=2`.
pub fn sequence_success_bound(m: usize, h_mag2: f64, n0: f64) -> Result<f64> {
    check_inputs(m, h_mag2, n0)?;
    (2..=m).try_fold(1.0, |acc, s| {
        Ok(acc * layer_success_bound(BoundInputs { m, s, h_mag2, n0 })?)
    })
}

/// [`sequence_success_bound`] averaged over `|h|^2 ~ Exp(1)` (Rayleigh
/// fading), by midpoint quadrature after the substitution
/// `u = 1 - exp(-|h|^2)`.
pub fn sequence_success_bound_rayleigh(m: usize, n0: f64) -> Result<f64> {
    check_inputs(m, 1.0, n0)?;
    const NODES: usize = 4000;
    let mut acc = 0.0;
    for i in 0..NODES {
        let u = (i as f64 + 0.5) / NODES as f64;
        let x = -(1.0 - u).ln();
        acc += sequence_success_bound(m, x, n0)?;
    }
    Ok(acc / NODES as f64)
}

/// SINR of `y^s` for the stronger of two users once the layers above are
/// correct, `2^(m-s) |h1|^2 / (|h2|^2 + N0)`.
pub fn sinr_layer(s: usize, m: usize, h1_mag2: f64, h2_mag2: f64, n0: f64) -> f64 {
    let gain = 2f64.powi(m as i32 - s as i32);
    gain * h1_mag2 / (h2_mag2 + n0)
}

/// Multiplications of layer-by-layer detection, `(m + 1) 2^m`.
pub fn multiplication_count_lld(m: usize) -> u64 {
    (m as u64 + 1) << m
}

/// Multiplications of `(L, F)` list detection:
///
/// ```text
/// N_M = (m + 2) 2^(m-1)
///     + sum_{s1 = m-F+1}^{m} (prod_{s2 = s1}^{m} L_s2) (s1 + 1) 2^(s1 - 2)
///     + (prod_s L_s) sum_{s2 = 4}^{m - F} (s2 + 1) 2^(s2 - 2)
/// ```
pub fn multiplication_count_list(params: &ListParams, m: usize) -> Result<u64> {
    params.validate(m)?;
    let f = params.depth();
    let width = |s: usize| params.widths()[m - s] as u64;

    let mut total = (m as u64 + 2) << (m - 1);
    for s1 in m - f + 1..=m {
        let prod: u64 = (s1..=m).map(width).product();
        total += prod * (s1 as u64 + 1) * (1u64 << (s1 - 2));
    }
    let all: u64 = params.widths().iter().map(|&w| w as u64).product();
    let tail: u64 = (4..=m - f).map(|s2| (s2 as u64 + 1) << (s2 - 2)).sum();
    Ok(total + all * tail)
}
