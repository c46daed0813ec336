//! Layer-by-layer detection of a single RM sequence.
//!
//! Each layer splits the current signal `y^s` into halves `y'` and `y''`,
//! multiplies `y'` by the conjugate of `y''` (which strips the unknown channel
//! and the lower-order chips, leaving `|h|^2 v^(s-1)` plus noise), and reads
//! `alpha^s` off the peak of the flipped WHT of that product. The halves are
//! then merged into `y^(s-1) = (y' + v * y'') / 2`, which carries the order
//! `s - 1` sub-sequence at half the noise variance. After the last layer the
//! length-2 remainder gives the channel estimate directly.
//!
//! [`detect_list`] keeps several candidates per layer for the first few layers
//! and picks the path with the least residual energy.

use crate::error::{Error, Result};
use crate::rm::{self, generate_sequence, pair_to_id, walsh_row, Layer, RmPair, RmSequence, UserId};
use crate::transform::{fwht_flipped_in_place, fwht_op_count};
use num_complex::Complex64;
use std::ops::Deref;

/// A complex sample vector whose length is a power of two (at least 2).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSignal(Vec<Complex64>);

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        let n = samples.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        Ok(Self(samples))
    }

    /// `h * c` for a bipolar sequence.
    pub fn from_sequence(seq: &RmSequence, h: Complex64) -> Self {
        Self(seq.chips().iter().map(|&c| h * c as f64).collect())
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// `log2` of the length.
    pub fn order(&self) -> usize {
        self.0.len().trailing_zeros() as usize
    }

    pub fn energy(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self(self.0.iter().map(|v| v * k).collect())
    }
}

impl Deref for ComplexSignal {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

/// Outcome of single-sequence detection.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    pub pair: RmPair,
    pub id: UserId,
    pub sequence: RmSequence,
    pub h_hat: Complex64,
    /// `||y - h_hat * c||^2`.
    pub residual: f64,
    /// Multiplications charged to this detection (see [`layer_op_count`]).
    pub mult_count: u64,
}

/// List widths `[L_m, L_(m-1), ..., L_(m-F+1)]`; the depth `F` is their count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ListParams {
    widths: Vec<usize>,
}

impl ListParams {
    pub fn new(widths: Vec<usize>) -> Result<Self> {
        if widths.is_empty() {
            return Err(Error::InvalidListParams("empty width vector".into()));
        }
        if widths.contains(&0) {
            return Err(Error::InvalidListParams("list widths must be >= 1".into()));
        }
        Ok(Self { widths })
    }

    /// Width-one list, equivalent to plain layer-by-layer detection.
    pub fn single() -> Self {
        Self { widths: vec![1] }
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn depth(&self) -> usize {
        self.widths.len()
    }

    pub fn is_single(&self) -> bool {
        self.widths.iter().all(|&w| w == 1)
    }

    pub fn total_paths(&self) -> usize {
        self.widths.iter().product()
    }

    /// Checks `1 <= F <= m - 1` and `L_s <= 2^(s-1)` for order `m`.
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.depth() > m.saturating_sub(1) {
            return Err(Error::InvalidListParams(format!(
                "depth {} exceeds m - 1 = {}",
                self.depth(),
                m - 1
            )));
        }
        for (i, &w) in self.widths.iter().enumerate() {
            let s = m - i;
            if w > 1 << (s - 1) {
                return Err(Error::InvalidListParams(format!(
                    "width {w} at layer {s} exceeds 2^{}",
                    s - 1
                )));
            }
        }
        Ok(())
    }

    fn width_at(&self, m: usize, s: usize) -> usize {
        self.widths.get(m - s).copied().unwrap_or(1)
    }
}

impl std::fmt::Display for ListParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.widths.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Multiplications charged to one layer of order `s`: `2^(s-1)` for the
/// conjugate product, `(s-1) 2^(s-1)` for the transform and `2 * 2^(s-1)`
/// for the sign product and halving of the combining step.
pub fn layer_op_count(s: usize) -> u64 {
    spectrum_op_count(s) + combine_op_count(s)
}

fn spectrum_op_count(s: usize) -> u64 {
    let half = 1u64 << (s - 1);
    half + fwht_op_count(half as usize)
}

fn combine_op_count(s: usize) -> u64 {
    2u64 << (s - 1)
}

/// Multiplications charged to [`estimate_channel`].
pub const CHANNEL_ESTIMATE_OPS: u64 = 2;

/// Multiplications charged to validating one list path: `h * c` and `|.|^2`.
pub fn validation_op_count(m: usize) -> u64 {
    2u64 << m
}

fn conj_product(y: &[Complex64]) -> Vec<Complex64> {
    let (first, second) = y.split_at(y.len() / 2);
    first
        .iter()
        .zip(second)
        .map(|(a, b)| a * b.conj())
        .collect()
}

/// `out_j = y'_j * conj(y''_j)` for the two halves of `y`.
pub fn conj_multiply_halves(y: &ComplexSignal) -> Result<ComplexSignal> {
    if y.len() < 4 {
        return Err(Error::SignalTooShort { len: y.len(), min: 4 });
    }
    Ok(ComplexSignal(conj_product(y)))
}

fn combine(y: &[Complex64], v: &[i8]) -> Vec<Complex64> {
    let (first, second) = y.split_at(y.len() / 2);
    first
        .iter()
        .zip(second)
        .zip(v)
        .map(|((a, b), &w)| (a + b * w as f64) * 0.5)
        .collect()
}

/// `y^(s-1) = (y' + v * y'') / 2` for an arbitrary (possibly wrong) Walsh
/// row `v`.
pub fn combine_halves(y: &ComplexSignal, v: &[i8]) -> Result<ComplexSignal> {
    if y.len() < 4 {
        return Err(Error::SignalTooShort { len: y.len(), min: 4 });
    }
    if v.len() * 2 != y.len() {
        return Err(Error::LengthMismatch {
            expected: y.len() / 2,
            got: v.len(),
        });
    }
    Ok(ComplexSignal(combine(y, v)))
}

/// Flipped WHT of the conjugate half-product of `y`.
fn layer_spectrum(y: &[Complex64]) -> Vec<Complex64> {
    let mut prod = conj_product(y);
    fwht_flipped_in_place(&mut prod).expect("power-of-two length");
    prod
}

/// Public view of the layer statistic `V^(s-1)`.
pub fn layer_spectrum_of(y: &ComplexSignal) -> Result<Vec<Complex64>> {
    if y.len() < 4 {
        return Err(Error::SignalTooShort { len: y.len(), min: 4 });
    }
    Ok(layer_spectrum(y))
}

/// Indices of the `count` largest real parts, ties to the lowest index.
fn ranked(spectrum: &[Complex64], count: usize) -> Vec<usize> {
    if count == 1 {
        let mut best = 0;
        for (i, v) in spectrum.iter().enumerate().skip(1) {
            if v.re > spectrum[best].re {
                best = i;
            }
        }
        return vec![best];
    }
    let mut idx: Vec<usize> = (0..spectrum.len()).collect();
    idx.sort_by(|&a, &b| spectrum[b].re.total_cmp(&spectrum[a].re).then(a.cmp(&b)));
    idx.truncate(count);
    idx
}

/// Recovers one layer and returns it together with `y^(s-1)`.
pub fn detect_layer(y: &ComplexSignal) -> Result<(Layer, ComplexSignal)> {
    let s = y.order();
    if s < 2 {
        return Err(Error::SignalTooShort { len: y.len(), min: 4 });
    }
    let spectrum = layer_spectrum(y);
    let w = ranked(&spectrum, 1)[0];
    let layer = Layer::from_mask(s, w as u32)?;
    let next = combine(y, &walsh_row(&layer));
    Ok((layer, ComplexSignal(next)))
}

/// `h = (y_1 + (-1)^b1 y_2) / 2` from the final length-2 signal.
pub fn estimate_channel(y1: &ComplexSignal, b1_hat: u8) -> Result<Complex64> {
    if y1.len() != 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            got: y1.len(),
        });
    }
    Ok(channel_from_pair(y1[0], y1[1], b1_hat))
}

fn channel_from_pair(y1: Complex64, y2: Complex64, b1: u8) -> Complex64 {
    let sign = if b1 & 1 == 1 { -1.0 } else { 1.0 };
    (y1 + y2 * sign) * 0.5
}

fn residual_of(y: &[Complex64], h: Complex64, seq: &RmSequence) -> f64 {
    y.iter()
        .zip(seq.chips())
        .map(|(v, &c)| (v - h * c as f64).norm_sqr())
        .sum()
}

/// `||y - h * c(pair)||^2`.
pub fn residual_energy(y: &ComplexSignal, h_hat: Complex64, pair: &RmPair) -> Result<f64> {
    if y.len() != 1 << pair.order() {
        return Err(Error::LengthMismatch {
            expected: 1 << pair.order(),
            got: y.len(),
        });
    }
    Ok(residual_of(y, h_hat, &generate_sequence(pair)))
}

/// Scalar least-squares channel fit `<c, y> / 2^m` for a known sequence.
pub fn ls_scalar(y: &[Complex64], seq: &RmSequence) -> Complex64 {
    let sum: Complex64 = y
        .iter()
        .zip(seq.chips())
        .map(|(v, &c)| v * c as f64)
        .sum();
    sum / seq.len() as f64
}

struct Path {
    y: Vec<Complex64>,
    alphas: Vec<u32>,
}

/// Runs the layer recursion, branching `params` ways in the first layers.
/// Paths come out in lexicographic label order.
fn extend_paths(y: &[Complex64], params: &ListParams, ops: &mut u64) -> Vec<Path> {
    let m = y.len().trailing_zeros() as usize;
    let mut paths = vec![Path {
        y: y.to_vec(),
        alphas: Vec::with_capacity(m - 1),
    }];
    for s in (2..=m).rev() {
        let width = params.width_at(m, s);
        let mut next = Vec::with_capacity(paths.len() * width);
        for path in paths {
            let spectrum = layer_spectrum(&path.y);
            let picks = ranked(&spectrum, width);
            *ops += spectrum_op_count(s) + combine_op_count(s) * picks.len() as u64;
            for w in picks {
                let layer = Layer::from_mask(s, w as u32).expect("index below 2^(s-1)");
                let mut alphas = path.alphas.clone();
                alphas.push(w as u32);
                next.push(Path {
                    y: combine(&path.y, &walsh_row(&layer)),
                    alphas,
                });
            }
        }
        paths = next;
    }
    paths
}

fn finish_path(y: &[Complex64], path: &Path) -> (RmPair, RmSequence, Complex64, f64) {
    let m = y.len().trailing_zeros() as usize;
    let pair = RmPair::from_layers(m, &path.alphas).expect("layer masks in range");
    let b1 = pair.b(m - 1);
    let h_hat = channel_from_pair(path.y[0], path.y[1], b1);
    let sequence = generate_sequence(&pair);
    let residual = residual_of(y, h_hat, &sequence);
    (pair, sequence, h_hat, residual)
}

fn check_signal(y: &ComplexSignal) -> Result<usize> {
    let m = y.order();
    rm::check_order(m)?;
    Ok(m)
}

/// Layer-by-layer detection of a single sequence.
///
/// Always returns a hypothesis; callers judge it through `residual`.
pub fn detect_single(y: &ComplexSignal) -> Result<DetectionResult> {
    check_signal(y)?;
    let mut ops = 0;
    let paths = extend_paths(y, &ListParams::single(), &mut ops);
    let (pair, sequence, h_hat, residual) = finish_path(y, &paths[0]);
    Ok(DetectionResult {
        id: pair_to_id(&pair),
        pair,
        sequence,
        h_hat,
        residual,
        mult_count: ops + CHANNEL_ESTIMATE_OPS,
    })
}

/// List detection: keeps the `L_s` best candidates in each of the first `F`
/// layers, continues greedily below, and returns the path with the least
/// residual energy. Ties go to the lexicographically first path label.
pub fn detect_list(y: &ComplexSignal, params: &ListParams) -> Result<DetectionResult> {
    let m = check_signal(y)?;
    params.validate(m)?;
    let mut ops = 0;
    let paths = extend_paths(y, params, &mut ops);
    let per_path = CHANNEL_ESTIMATE_OPS + validation_op_count(m);
    ops += per_path * paths.len() as u64;

    let mut best: Option<(RmPair, RmSequence, Complex64, f64)> = None;
    for path in &paths {
        let cand = finish_path(y, path);
        if best.as_ref().is_none_or(|b| cand.3 < b.3) {
            best = Some(cand);
        }
    }
    let (pair, sequence, h_hat, residual) = best.expect("at least one path");
    Ok(DetectionResult {
        id: pair_to_id(&pair),
        pair,
        sequence,
        h_hat,
        residual,
        mult_count: ops,
    })
}

/// Dispatches to [`detect_single`] for width-one lists.
pub fn detect_with(y: &ComplexSignal, params: &ListParams) -> Result<DetectionResult> {
    if params.is_single() {
        detect_single(y)
    } else {
        detect_list(y, params)
    }
}
