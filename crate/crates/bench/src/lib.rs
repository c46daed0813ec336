//! Fixtures shared by the benchmarks.

use rm_access::channel::{snr_to_n0, synthesize, ChannelModel, Scenario};
use rm_access::{Complex64, ComplexSignal};

/// Received signal with `k` Rayleigh users at `snr_db`.
pub fn received(m: usize, k: usize, snr_db: f64, seed: u64) -> ComplexSignal {
    let sc = Scenario::draw(m, k, snr_to_n0(snr_db), ChannelModel::Rayleigh, seed, 0)
        .expect("valid scenario");
    synthesize(&sc)
}

/// Deterministic pseudo-random complex vector of length `n`.
pub fn complex_input(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let x = (i as f64 * 0.618_033_988_75).fract() - 0.5;
            let y = (i as f64 * 0.414_213_562_37).fract() - 0.5;
            Complex64::new(x, y)
        })
        .collect()
}
