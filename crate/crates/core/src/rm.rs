//! Second-order Reed-Muller sequences and the user-ID mapping.
//!
//! A sequence of order `m` is generated by a symmetric binary `m x m` matrix
//! `P` with zero diagonal and a binary vector `b = [b_m, ..., b_1]`. Chip `j`
//! (0-based) is
//!
//! ```text
//! c_j = (-1)^( b . a_j + sum_{i<k} P[i][k] a_j[i] a_j[k] )
//! ```
//!
//! where `a_j` is the big-endian `m`-bit expansion of `j`. Position `i` of
//! `a_j` pairs with position `i` of `b`, so `b_m` multiplies the most
//! significant bit.
//!
//! Bit layout: row `i` of `P` and the vector `b` are stored as `u32` masks in
//! which position `p` occupies bit `m - 1 - p`. With this layout the inner
//! product `b . a_j` is simply `popcount(b & j)`, and the `s`-th layer
//! `alpha^s` is the low `s - 1` bits of row `m - s`.

use crate::error::{Error, Result};
use num_complex::Complex64;

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 16;

pub(crate) fn check_order(m: usize) -> Result<()> {
    if (MIN_ORDER..=MAX_ORDER).contains(&m) {
        Ok(())
    } else {
        Err(Error::InvalidOrder(m))
    }
}

#[inline]
fn parity(x: u32) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Number of ID bits carried by an order-`m` sequence, `m(m-1)/2`.
pub const fn id_bits(m: usize) -> usize {
    m * (m - 1) / 2
}

/// Size of the user space, `2^(m(m-1)/2)`.
pub fn capacity(m: usize) -> u128 {
    1u128 << id_bits(m)
}

/// A user identifier valid for sequences of order `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UserId {
    value: u128,
    m: u8,
}

impl UserId {
    pub fn new(value: u128, m: usize) -> Result<Self> {
        check_order(m)?;
        if value >= capacity(m) {
            return Err(Error::IdOutOfRange {
                value,
                m,
                bits: id_bits(m),
            });
        }
        Ok(Self { value, m: m as u8 })
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn order(&self) -> usize {
        self.m as usize
    }
}

impl std::fmt::Display for UserId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// One layer `(alpha^s, b_s)` of a matrix-vector pair.
///
/// `alpha` holds the `s - 1` bits of the first row of the `s`-th order
/// sub-matrix (without its leading zero), most significant bit first. `b_s`
/// is always the XOR of those bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Layer {
    s: usize,
    alpha: u32,
}

impl Layer {
    /// Builds a layer from its alpha mask; bits above `s - 1` are rejected.
    pub fn from_mask(s: usize, alpha: u32) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&s) {
            return Err(Error::LayerOutOfRange { s, m: MAX_ORDER });
        }
        if alpha >> (s - 1) != 0 {
            return Err(Error::InvalidPair(format!(
                "alpha mask {alpha:#b} has more than {} bits",
                s - 1
            )));
        }
        Ok(Self { s, alpha })
    }

    /// Builds a layer from explicit alpha bits `[alpha_1, ..., alpha_{s-1}]`.
    pub fn from_bits(s: usize, bits: &[u8]) -> Result<Self> {
        if bits.len() + 1 != s {
            return Err(Error::LengthMismatch {
                expected: s.saturating_sub(1),
                got: bits.len(),
            });
        }
        let mut mask = 0u32;
        for &bit in bits {
            if bit > 1 {
                return Err(Error::InvalidPair(format!("non-binary entry {bit}")));
            }
            mask = (mask << 1) | bit as u32;
        }
        Self::from_mask(s, mask)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn alpha_mask(&self) -> u32 {
        self.alpha
    }

    pub fn alpha_bits(&self) -> Vec<u8> {
        (0..self.s - 1)
            .map(|p| ((self.alpha >> (self.s - 2 - p)) & 1) as u8)
            .collect()
    }

    pub fn b_s(&self) -> u8 {
        parity(self.alpha)
    }
}

/// The matrix-vector pair `{P, b}` identifying one sequence.
///
/// Always symmetric, zero-diagonal and parity-consistent: constructors reject
/// anything else.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RmPair {
    m: usize,
    rows: Vec<u32>,
    b: u32,
}

impl RmPair {
    /// The all-zero pair (user 0).
    pub fn zero(m: usize) -> Result<Self> {
        check_order(m)?;
        Ok(Self {
            m,
            rows: vec![0; m],
            b: 0,
        })
    }

    /// Validates and wraps an explicit matrix and vector `[b_m, ..., b_1]`.
    #[allow(clippy::needless_range_loop)]
    pub fn from_matrix(p: &[Vec<u8>], b: &[u8]) -> Result<Self> {
        let m = p.len();
        check_order(m)?;
        if b.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: b.len(),
            });
        }
        let mut rows = vec![0u32; m];
        for (i, row) in p.iter().enumerate() {
            if row.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
            for (k, &entry) in row.iter().enumerate() {
                match entry {
                    0 => {}
                    1 => rows[i] |= 1 << (m - 1 - k),
                    _ => return Err(Error::InvalidPair(format!("P[{i}][{k}] = {entry}"))),
                }
            }
        }
        for i in 0..m {
            if p[i][i] != 0 {
                return Err(Error::InvalidPair(format!("nonzero diagonal at {i}")));
            }
            for k in i + 1..m {
                if p[i][k] != p[k][i] {
                    return Err(Error::InvalidPair(format!("P[{i}][{k}] != P[{k}][{i}]")));
                }
            }
        }
        let mut b_mask = 0u32;
        for (pos, &bit) in b.iter().enumerate() {
            match bit {
                0 => {}
                1 => b_mask |= 1 << (m - 1 - pos),
                _ => return Err(Error::InvalidPair(format!("b[{pos}] = {bit}"))),
            }
        }
        let pair = Self { m, rows, b: b_mask };
        if pair.b != parity_vector(m, &pair.rows) {
            return Err(Error::InvalidPair(
                "b violates the parity law of the mapping rule".into(),
            ));
        }
        Ok(pair)
    }

    /// Assembles a pair from its layers, `alphas[0] = alpha^m`, ...,
    /// `alphas[m - 2] = alpha^2`, each given as a mask of `s - 1` bits.
    #[allow(clippy::needless_range_loop)]
    pub fn from_layers(m: usize, alphas: &[u32]) -> Result<Self> {
        check_order(m)?;
        if alphas.len() != m - 1 {
            return Err(Error::LengthMismatch {
                expected: m - 1,
                got: alphas.len(),
            });
        }
        let mut rows = vec![0u32; m];
        for (r, &alpha) in alphas.iter().enumerate() {
            let s = m - r;
            if alpha >> (s - 1) != 0 {
                return Err(Error::InvalidPair(format!(
                    "layer {s} mask {alpha:#b} is wider than {} bits",
                    s - 1
                )));
            }
            rows[r] |= alpha;
            // mirror into column r
            for k in r + 1..m {
                if alpha & (1 << (m - 1 - k)) != 0 {
                    rows[k] |= 1 << (m - 1 - r);
                }
            }
        }
        let b = parity_vector(m, &rows);
        Ok(Self { m, rows, b })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn p(&self, i: usize, k: usize) -> u8 {
        ((self.rows[i] >> (self.m - 1 - k)) & 1) as u8
    }

    /// Entry `pos` of `[b_m, ..., b_1]`.
    pub fn b(&self, pos: usize) -> u8 {
        ((self.b >> (self.m - 1 - pos)) & 1) as u8
    }

    pub fn matrix(&self) -> Vec<Vec<u8>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|k| self.p(i, k)).collect())
            .collect()
    }

    pub fn b_vector(&self) -> Vec<u8> {
        (0..self.m).map(|pos| self.b(pos)).collect()
    }

    /// The `s`-th layer `(alpha^s, b_s)`.
    pub fn layer(&self, s: usize) -> Result<Layer> {
        if !(2..=self.m).contains(&s) {
            return Err(Error::LayerOutOfRange { s, m: self.m });
        }
        let alpha = self.rows[self.m - s] & ((1u32 << (s - 1)) - 1);
        Ok(Layer { s, alpha })
    }

    /// The `s`-th order sub-sequence `c^s`, generated from the lower-right
    /// `s x s` block of `P` and `[b_s, ..., b_1]`. `s = 1` gives
    /// `[1, (-1)^b_1]`.
    pub fn sub_sequence(&self, s: usize) -> Result<RmSequence> {
        if !(1..=self.m).contains(&s) {
            return Err(Error::LayerOutOfRange { s, m: self.m });
        }
        let low = (1u32 << s) - 1;
        let rows: Vec<u32> = self.rows[self.m - s..].iter().map(|r| r & low).collect();
        Ok(RmSequence {
            m: s,
            chips: evaluate_chips(s, &rows, self.b & low),
        })
    }
}

/// Parity law: `b_s` is the XOR of layer `s`, `b_1` the XOR of `b_m..b_2`.
fn parity_vector(m: usize, rows: &[u32]) -> u32 {
    let mut b = 0u32;
    for s in 2..=m {
        let alpha = rows[m - s] & ((1u32 << (s - 1)) - 1);
        b |= (parity(alpha) as u32) << (s - 1);
    }
    b | parity(b) as u32
}

/// Maps a user ID to its matrix-vector pair.
///
/// The `m(m-1)/2` ID bits, most significant first, fill the strict upper
/// triangle of `P` row by row; `b` follows from the parity law.
pub fn id_to_pair(id: UserId) -> RmPair {
    let m = id.order();
    let nbits = id_bits(m);
    let mut rows = vec![0u32; m];
    let mut t = 0;
    for i in 0..m {
        for k in i + 1..m {
            if (id.value >> (nbits - 1 - t)) & 1 == 1 {
                rows[i] |= 1 << (m - 1 - k);
                rows[k] |= 1 << (m - 1 - i);
            }
            t += 1;
        }
    }
    let b = parity_vector(m, &rows);
    RmPair { m, rows, b }
}

/// Inverse of [`id_to_pair`].
pub fn pair_to_id(pair: &RmPair) -> UserId {
    let m = pair.m;
    let mut value = 0u128;
    for i in 0..m {
        for k in i + 1..m {
            value = (value << 1) | pair.p(i, k) as u128;
        }
    }
    UserId { value, m: m as u8 }
}

/// A bipolar, unnormalised RM sequence of length `2^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RmSequence {
    m: usize,
    chips: Vec<i8>,
}

impl RmSequence {
    /// Wraps raw chips; every chip must be `+1` or `-1` and the length a
    /// power of two.
    pub fn from_chips(chips: Vec<i8>) -> Result<Self> {
        let n = chips.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if chips.iter().any(|&c| c != 1 && c != -1) {
            return Err(Error::InvalidPair("chips must be +1 or -1".into()));
        }
        Ok(Self {
            m: n.trailing_zeros() as usize,
            chips,
        })
    }

    /// The order-1 sub-sequence `[1, (-1)^b_1]`.
    pub fn order_one(b1: u8) -> Self {
        Self {
            m: 1,
            chips: vec![1, if b1 & 1 == 1 { -1 } else { 1 }],
        }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn chips(&self) -> &[i8] {
        &self.chips
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.chips
            .iter()
            .map(|&c| Complex64::new(c as f64, 0.0))
            .collect()
    }
}

/// Generates the sequence of a pair by direct evaluation of the exponent.
pub fn generate_sequence(pair: &RmPair) -> RmSequence {
    RmSequence {
        m: pair.m,
        chips: evaluate_chips(pair.m, &pair.rows, pair.b),
    }
}

fn evaluate_chips(m: usize, rows: &[u32], b: u32) -> Vec<i8> {
    // upper[i]: entries of row i strictly right of the diagonal
    let upper: Vec<u32> = (0..m)
        .map(|i| rows[i] & ((1u32 << (m - 1 - i)) - 1))
        .collect();
    (0..1u32 << m)
        .map(|j| {
            let mut e = (b & j).count_ones();
            for (i, &u) in upper.iter().enumerate() {
                if j & (1 << (m - 1 - i)) != 0 {
                    e += (u & j).count_ones();
                }
            }
            if e & 1 == 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Evaluates the general quaternary generator
/// `(-1)^wt(b) / sqrt(2^m) * i^((2b + P a)^T a)` entry by entry.
///
/// Reference only. For pairs produced by this module it equals
/// [`generate_sequence`] scaled by `1/sqrt(2^m)`.
pub fn generate_sequence_quaternary_oracle(pair: &RmPair) -> Vec<Complex64> {
    let m = pair.m;
    let p = pair.matrix();
    let b = pair.b_vector();
    let wt: u32 = b.iter().map(|&x| x as u32).sum();
    let scale = if wt.is_multiple_of(2) { 1.0 } else { -1.0 } / ((1u64 << m) as f64).sqrt();
    let powers = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    (0..1usize << m)
        .map(|j| {
            let a: Vec<u64> = (0..m).map(|pos| ((j >> (m - 1 - pos)) & 1) as u64).collect();
            let mut e = 0u64;
            for i in 0..m {
                e += 2 * b[i] as u64 * a[i];
                let pa: u64 = (0..m).map(|k| p[i][k] as u64 * a[k]).sum();
                e += pa * a[i];
            }
            powers[(e % 4) as usize] * scale
        })
        .collect()
}

/// The Walsh row `v^(s-1)` of a layer: `v_j = (-1)^(alpha . not(a_j))`.
pub fn walsh_row(layer: &Layer) -> Vec<i8> {
    let len = 1usize << (layer.s - 1);
    let full = (len - 1) as u32;
    (0..len as u32)
        .map(|j| {
            if (layer.alpha & !j & full).count_ones() & 1 == 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Builds `c^s = (c^(s-1), c^(s-1) * v^(s-1))`.
pub fn nested_compose(half: &RmSequence, v: &[i8]) -> Result<RmSequence> {
    if half.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: half.len(),
            got: v.len(),
        });
    }
    let mut chips = Vec::with_capacity(2 * half.len());
    chips.extend_from_slice(&half.chips);
    chips.extend(half.chips.iter().zip(v).map(|(&c, &w)| c * w));
    Ok(RmSequence {
        m: half.m + 1,
        chips,
    })
}

/// Rebuilds the full sequence of a pair from `c^1` by repeated
/// [`nested_compose`] over layers 2..=m.
pub fn compose_from_layers(pair: &RmPair) -> RmSequence {
    let mut seq = RmSequence::order_one((pair.b & 1) as u8);
    for s in 2..=pair.m {
        let layer = pair.layer(s).expect("layer index in range");
        seq = nested_compose(&seq, &walsh_row(&layer)).expect("matching lengths");
    }
    seq
}

/// Real inner product of two bipolar sequences.
pub fn inner_product(c1: &RmSequence, c2: &RmSequence) -> Result<i64> {
    if c1.len() != c2.len() {
        return Err(Error::LengthMismatch {
            expected: c1.len(),
            got: c2.len(),
        });
    }
    Ok(c1
        .chips
        .iter()
        .zip(&c2.chips)
        .map(|(&a, &b)| (a * b) as i64)
        .sum())
}
