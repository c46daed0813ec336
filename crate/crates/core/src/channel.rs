//! Received-signal synthesis: `y_j = sum_k h_k c_(k,j) + e_j`.
//!
//! SNR convention: chips have unit magnitude and `E|h|^2 = 1`, so the
//! per-user average receive SNR is `1 / N0`.
//!
//! Randomness comes from ChaCha8 keyed by a sweep seed. Every trial owns a
//! pair of streams selected by its index, one for the scenario draw (IDs and
//! channels) and one for the noise, so trials can be generated in any order
//! or in parallel with identical results.

use crate::detect::ComplexSignal;
use crate::error::{Error, Result};
use crate::rm::{self, capacity, generate_sequence, id_to_pair, UserId};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::HashSet;

/// `N0 = 10^(-snr_db / 10)`.
pub fn snr_to_n0(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Channel coefficient distribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ChannelModel {
    /// `h ~ CN(0, 1)`.
    #[default]
    Rayleigh,
    /// `|h| = 1` with uniform phase.
    UnitMagnitude,
}

impl std::str::FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rayleigh" => Ok(Self::Rayleigh),
            "unit" => Ok(Self::UnitMagnitude),
            other => Err(Error::Config(format!("unknown channel model '{other}'"))),
        }
    }
}

impl std::fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Rayleigh => "rayleigh",
            Self::UnitMagnitude => "unit",
        })
    }
}

#[derive(Clone, Copy, Debug)]
enum Purpose {
    Draw = 0,
    Noise = 1,
}

fn stream_rng(seed: u64, stream: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.wrapping_mul(2).wrapping_add(purpose as u64));
    rng
}

/// Independent RNG for `(seed, stream)`, distinct from the scenario streams.
pub fn aux_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5bd1_e995_9e37_79b9);
    rng.set_stream(stream);
    rng
}

/// One sample of `CN(0, var)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let sd = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sd, im * sd)
}

fn draw_channel<R: Rng + ?Sized>(rng: &mut R, model: ChannelModel) -> Complex64 {
    match model {
        ChannelModel::Rayleigh => complex_gaussian(rng, 1.0),
        ChannelModel::UnitMagnitude => {
            Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
        }
    }
}

/// Active users, their channels and the noise level of one access slot.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    m: usize,
    ids: Vec<UserId>,
    h: Vec<Complex64>,
    n0: f64,
    seed: u64,
    stream: u64,
}

impl Scenario {
    /// Explicit scenario. `n0 = 0` gives a noiseless signal.
    pub fn new(
        m: usize,
        ids: Vec<UserId>,
        h: Vec<Complex64>,
        n0: f64,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        rm::check_order(m)?;
        if ids.len() != h.len() {
            return Err(Error::InvalidScenario(format!(
                "{} ids but {} channel coefficients",
                ids.len(),
                h.len()
            )));
        }
        if ids.iter().any(|id| id.order() != m) {
            return Err(Error::InvalidScenario("id of the wrong order".into()));
        }
        let distinct: HashSet<_> = ids.iter().collect();
        if distinct.len() != ids.len() {
            return Err(Error::InvalidScenario("duplicate user ids".into()));
        }
        if !(n0 >= 0.0 && n0.is_finite()) {
            return Err(Error::InvalidScenario(format!("noise variance {n0}")));
        }
        Ok(Self {
            m,
            ids,
            h,
            n0,
            seed,
            stream,
        })
    }

    /// Draws `k` distinct uniform user IDs and their channels from the
    /// scenario stream of `(seed, stream)`.
    pub fn draw(
        m: usize,
        k: usize,
        n0: f64,
        model: ChannelModel,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        rm::check_order(m)?;
        let cap = capacity(m);
        if k as u128 > cap {
            return Err(Error::InvalidScenario(format!(
                "{k} users exceed the {cap} available ids"
            )));
        }
        let mut rng = stream_rng(seed, stream, Purpose::Draw);
        let mut seen = HashSet::with_capacity(k);
        let mut ids = Vec::with_capacity(k);
        while ids.len() < k {
            let v = rng.random_range(0..cap);
            if seen.insert(v) {
                ids.push(UserId::new(v, m)?);
            }
        }
        let h = (0..k).map(|_| draw_channel(&mut rng, model)).collect();
        Self::new(m, ids, h, n0, seed, stream)
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn ids(&self) -> &[UserId] {
        &self.ids
    }

    pub fn channels(&self) -> &[Complex64] {
        &self.h
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn active_users(&self) -> usize {
        self.ids.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Same users with a different noise level.
    pub fn with_n0(mut self, n0: f64) -> Result<Self> {
        if !(n0 >= 0.0 && n0.is_finite()) {
            return Err(Error::InvalidScenario(format!("noise variance {n0}")));
        }
        self.n0 = n0;
        Ok(self)
    }
}

/// Builds the received signal of a scenario; the noise stream depends only
/// on `(seed, stream)`, not on the users.
pub fn synthesize(sc: &Scenario) -> ComplexSignal {
    let n = 1usize << sc.m;
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for (id, &h) in sc.ids.iter().zip(&sc.h) {
        let seq = generate_sequence(&id_to_pair(*id));
        for (acc, &c) in y.iter_mut().zip(seq.chips()) {
            *acc += h * c as f64;
        }
    }
    if sc.n0 > 0.0 {
        let mut rng = stream_rng(sc.seed, sc.stream, Purpose::Noise);
        for acc in y.iter_mut() {
            *acc += complex_gaussian(&mut rng, sc.n0);
        }
    }
    ComplexSignal::new(y).expect("2^m samples")
}
