//! Flipped fast Walsh-Hadamard transform.
//!
//! The kernel is `t[i][j] = (-1)^(a_i . not(a_j))` with `a_i` the big-endian
//! binary expansion of `i`. Compared with the natural-order Hadamard matrix
//! `h[i][j] = (-1)^(a_i . a_j)` this reverses the column order, so
//! `T x = H (x reversed)`. A Walsh row of frequency `alpha` in the same
//! complemented convention transforms to a single peak at index `alpha`.

use crate::error::{Error, Result};
use num_complex::Complex64;

fn check_len(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        Err(Error::NotPowerOfTwo(n))
    } else {
        Ok(())
    }
}

/// In-place `x <- T x`.
pub fn fwht_flipped_in_place(x: &mut [Complex64]) -> Result<()> {
    check_len(x.len())?;
    x.reverse();
    fwht_natural_in_place(x);
    Ok(())
}

/// Returns `T x`.
pub fn fwht_flipped(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = x.to_vec();
    fwht_flipped_in_place(&mut out)?;
    Ok(out)
}

/// Natural-order butterfly; `x.len()` must be a power of two.
fn fwht_natural_in_place(x: &mut [Complex64]) {
    let n = x.len();
    let mut h = 1;
    while h < n {
        for block in x.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

/// Operation count charged for one transform of length `n = 2^s`: `s * 2^s`.
pub fn fwht_op_count(n: usize) -> u64 {
    (n.trailing_zeros() as u64) * n as u64
}

/// Entry `t[i][j]` of the flipped Hadamard matrix of size `n`.
pub fn flipped_entry(n: usize, i: usize, j: usize) -> i8 {
    let nj = !j & (n - 1);
    if (i & nj).count_ones() & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Direct `O(n^2)` evaluation of `T x`. Reference for [`fwht_flipped`].
pub fn naive_transform_oracle(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.len();
    check_len(n)?;
    Ok((0..n)
        .map(|i| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * flipped_entry(n, i, j) as f64)
                .sum()
        })
        .collect())
}
