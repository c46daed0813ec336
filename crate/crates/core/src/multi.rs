//! Multi-user detection: iterative per-user detection with interference
//! subtraction and joint least-squares channel refits, and the one-pass
//! successive interference cancellation (SIC) baseline.
//!
//! Both detectors work on `k_max` user slots. A slot is re-detected on the
//! received signal minus the current estimates of every other slot, in
//! Gauss-Seidel order: slots before `k` already hold this sweep's estimates,
//! slots after `k` still hold the previous sweep's. Slots that lock onto noise
//! or duplicate another slot are removed by a residual-improvement test before
//! reporting.

use crate::detect::{detect_with, ComplexSignal, ListParams};
use crate::error::{Error, Result};
use crate::rm::{RmSequence, UserId};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;

/// Knobs shared by [`detect_iterative`] and [`detect_sic`].
#[derive(Clone, Debug, PartialEq)]
pub struct MultiUserConfig {
    /// Number of user slots.
    pub k_max: usize,
    /// Maximum number of sweeps (iterative detection only).
    pub n_max: usize,
    /// Per-user detector.
    pub list: ListParams,
    /// A user is reported only if dropping it raises the residual energy by
    /// more than `tau * N0_hat * 2^m`.
    pub tau: f64,
}

impl MultiUserConfig {
    pub const DEFAULT_N_MAX: usize = 5;
    pub const DEFAULT_TAU: f64 = 3.0;

    pub fn new(k_max: usize) -> Self {
        Self {
            k_max,
            n_max: Self::DEFAULT_N_MAX,
            list: ListParams::single(),
            tau: Self::DEFAULT_TAU,
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_list(mut self, list: ListParams) -> Self {
        self.list = list;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if self.n_max == 0 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("prune factor {}", self.tau)));
        }
        self.list.validate(m)
    }
}

/// Slot contents during iterative detection.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiUserState {
    m: usize,
    slots: Vec<Option<(UserId, RmSequence)>>,
    h: Vec<Complex64>,
    iteration: usize,
}

impl MultiUserState {
    /// All slots empty (zero columns, zero channels).
    pub fn new(m: usize, k_max: usize) -> Self {
        Self {
            m,
            slots: vec![None; k_max],
            h: vec![Complex64::new(0.0, 0.0); k_max],
            iteration: 0,
        }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn k_max(&self) -> usize {
        self.slots.len()
    }

    /// Current sweep, starting at 1 (0 before the first sweep).
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn id(&self, k: usize) -> Option<UserId> {
        self.slots.get(k).and_then(|s| s.as_ref().map(|(id, _)| *id))
    }

    pub fn sequence(&self, k: usize) -> Option<&RmSequence> {
        self.slots.get(k).and_then(|s| s.as_ref().map(|(_, c)| c))
    }

    pub fn channels(&self) -> &[Complex64] {
        &self.h
    }

    pub fn columns(&self) -> Vec<Option<RmSequence>> {
        self.slots.iter().map(|s| s.as_ref().map(|(_, c)| c.clone())).collect()
    }

    /// Overwrites slot `k`.
    pub fn set_slot(&mut self, k: usize, id: UserId, seq: RmSequence, h: Complex64) -> Result<()> {
        self.check_slot(k)?;
        if seq.len() != 1 << self.m {
            return Err(Error::LengthMismatch {
                expected: 1 << self.m,
                got: seq.len(),
            });
        }
        self.slots[k] = Some((id, seq));
        self.h[k] = h;
        Ok(())
    }

    fn check_slot(&self, k: usize) -> Result<()> {
        if k >= self.k_max() {
            return Err(Error::SlotOutOfRange { k, k_max: self.k_max() });
        }
        Ok(())
    }

    fn add_slot_to(&self, k: usize, acc: &mut [Complex64], sign: f64) {
        if let Some((_, c)) = &self.slots[k] {
            let h = self.h[k] * sign;
            for (a, &chip) in acc.iter_mut().zip(c.chips()) {
                *a += h * chip as f64;
            }
        }
    }

    /// `sum_k h_k c_k` over all filled slots.
    pub fn superposition(&self) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); 1 << self.m];
        for k in 0..self.k_max() {
            self.add_slot_to(k, &mut acc, 1.0);
        }
        acc
    }
}

/// Interference seen by slot `k` (0-based): `sum_{k' != k} h_k' c_k'` over the
/// current slot contents, computed from scratch.
pub fn mai(state: &MultiUserState, k: usize) -> Result<ComplexSignal> {
    state.check_slot(k)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); 1 << state.m];
    for j in (0..state.k_max()).filter(|&j| j != k) {
        state.add_slot_to(j, &mut acc, 1.0);
    }
    ComplexSignal::new(acc)
}

/// Least-squares channels `argmin_h ||y - C h||^2` for the given columns
/// (`None` is an all-zero column). Empty columns and repeats of an earlier
/// column get `h = 0`; the remaining distinct columns are solved exactly.
pub fn ls_channels(y: &[Complex64], columns: &[Option<RmSequence>]) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); columns.len()];
    let mut first: HashMap<&[i8], usize> = HashMap::new();
    let mut keep = Vec::new();
    for (k, col) in columns.iter().enumerate() {
        let Some(c) = col else { continue };
        if c.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: y.len(),
                got: c.len(),
            });
        }
        if first.insert(c.chips(), k).is_none() {
            keep.push(k);
        }
    }
    if keep.is_empty() {
        return Ok(out);
    }

    let cols: Vec<&[i8]> = keep.iter().map(|&k| columns[k].as_ref().unwrap().chips()).collect();
    let n = cols.len();
    let gram = DMatrix::from_fn(n, n, |a, b| {
        cols[a].iter().zip(cols[b]).map(|(&x, &z)| (x * z) as i64).sum::<i64>() as f64
    });
    let mut rhs = DMatrix::zeros(n, 2);
    for (a, c) in cols.iter().enumerate() {
        let r: Complex64 = y.iter().zip(c.iter()).map(|(v, &x)| v * x as f64).sum();
        rhs[(a, 0)] = r.re;
        rhs[(a, 1)] = r.im;
    }
    let sol = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram
            .svd(true, true)
            .solve(&rhs, 1e-9)
            .map_err(|e| Error::InvalidScenario(format!("least-squares solve failed: {e}")))?,
    };
    for (a, &k) in keep.iter().enumerate() {
        out[k] = Complex64::new(sol[(a, 0)], sol[(a, 1)]);
    }
    Ok(out)
}

/// Detected users and their channel estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct ActiveSetReport {
    /// Reported IDs, distinct and in increasing order.
    pub ids: Vec<UserId>,
    /// Least-squares channels over the reported set, matching `ids`.
    pub h_hats: Vec<Complex64>,
    /// Residual energy increase when each reported user is dropped.
    pub contributions: Vec<f64>,
    pub iterations_used: usize,
    /// `||y - sum h_hat c||^2` over the reported set.
    pub residual: f64,
    /// Multiplications of the per-user detections plus the correlations of
    /// every least-squares refit (`2^m` per distinct column).
    pub mult_count: u64,
}

struct Candidate {
    id: UserId,
    seq: RmSequence,
}

fn residual_after(y: &[Complex64], cands: &[Candidate], h: &[Complex64]) -> Vec<Complex64> {
    let mut r = y.to_vec();
    for (c, &hk) in cands.iter().zip(h) {
        for (v, &chip) in r.iter_mut().zip(c.seq.chips()) {
            *v -= hk * chip as f64;
        }
    }
    r
}

fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// `||r + h c||^2 - ||r||^2` for each candidate.
fn contributions(r: &[Complex64], cands: &[Candidate], h: &[Complex64]) -> Vec<f64> {
    let base = energy(r);
    cands
        .iter()
        .zip(h)
        .map(|(c, &hk)| {
            let with: f64 = r
                .iter()
                .zip(c.seq.chips())
                .map(|(v, &chip)| (v + hk * chip as f64).norm_sqr())
                .sum();
            with - base
        })
        .collect()
}

fn distinct(slots: impl IntoIterator<Item = (UserId, RmSequence)>) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    for (id, seq) in slots {
        if !out.iter().any(|c| c.id == id) {
            out.push(Candidate { id, seq });
        }
    }
    out
}

fn fit(y: &[Complex64], cands: &[Candidate]) -> Result<Vec<Complex64>> {
    let cols: Vec<Option<RmSequence>> = cands.iter().map(|c| Some(c.seq.clone())).collect();
    ls_channels(y, &cols)
}

/// Keeps the candidates whose removal raises the residual by more than
/// `tau * N0_hat * 2^m`, with `N0_hat` the per-sample residual energy of the
/// joint fit, then refits over the survivors.
fn prune_and_report(
    y: &[Complex64],
    cands: Vec<Candidate>,
    tau: f64,
    iterations_used: usize,
    mut mult_count: u64,
) -> Result<ActiveSetReport> {
    let n = y.len() as f64;
    let h = fit(y, &cands)?;
    mult_count += (cands.len() * y.len()) as u64;
    let r = residual_after(y, &cands, &h);
    let dof = (y.len() - cands.len().min(y.len() - 1)) as f64;
    let floor = f64::EPSILON * energy(y) / n;
    let n0_hat = (energy(&r) / dof).max(floor);
    let threshold = tau * n0_hat * n;
    let delta = contributions(&r, &cands, &h);

    let mut kept: Vec<Candidate> = cands
        .into_iter()
        .zip(&delta)
        .filter(|(_, &d)| d > threshold)
        .map(|(c, _)| c)
        .collect();
    kept.sort_by_key(|c| c.id.value());

    let h = fit(y, &kept)?;
    mult_count += (kept.len() * y.len()) as u64;
    let r = residual_after(y, &kept, &h);
    Ok(ActiveSetReport {
        ids: kept.iter().map(|c| c.id).collect(),
        contributions: contributions(&r, &kept, &h),
        h_hats: h,
        iterations_used,
        residual: energy(&r),
        mult_count,
    })
}

/// Reported IDs after pruning, without the final refit.
fn pruned_ids(y: &[Complex64], cands: &[Candidate], h: &[Complex64], tau: f64) -> Vec<u128> {
    let n = y.len() as f64;
    let r = residual_after(y, cands, h);
    let dof = (y.len() - cands.len().min(y.len() - 1)) as f64;
    let n0_hat = (energy(&r) / dof).max(f64::EPSILON * energy(y) / n);
    let mut ids: Vec<u128> = contributions(&r, cands, h)
        .iter()
        .zip(cands)
        .filter(|(&d, _)| d > tau * n0_hat * n)
        .map(|(_, c)| c.id.value())
        .collect();
    ids.sort_unstable();
    ids
}

/// Iterative detection, calling `observe(state, k, input)` with the signal
/// handed to the detector at every stage. The input is maintained
/// incrementally; `y - mai(state, k)` recomputes it from scratch.
pub fn detect_iterative_traced<F>(
    y: &ComplexSignal,
    cfg: &MultiUserConfig,
    mut observe: F,
) -> Result<ActiveSetReport>
where
    F: FnMut(&MultiUserState, usize, &ComplexSignal),
{
    let m = y.order();
    crate::rm::check_order(m)?;
    cfg.validate(m)?;

    let mut state = MultiUserState::new(m, cfg.k_max);
    let mut total = vec![Complex64::new(0.0, 0.0); y.len()];
    let mut ops = 0u64;
    let mut previous: Option<Vec<u128>> = None;
    let mut used = 0;

    for n in 1..=cfg.n_max {
        state.iteration = n;
        used = n;
        for k in 0..cfg.k_max {
            let input: Vec<Complex64> = y
                .iter()
                .zip(&total)
                .map(|(v, t)| v - t)
                .collect();
            let mut input = ComplexSignal::new(input)?;
            if let Some((_, c)) = &state.slots[k] {
                let hk = state.h[k];
                let own: Vec<Complex64> = input
                    .iter()
                    .zip(c.chips())
                    .map(|(v, &chip)| v + hk * chip as f64)
                    .collect();
                input = ComplexSignal::new(own)?;
            }
            observe(&state, k, &input);

            let det = detect_with(&input, &cfg.list)?;
            ops += det.mult_count;
            state.add_slot_to(k, &mut total, -1.0);
            state.slots[k] = Some((det.id, det.sequence));
            state.h[k] = det.h_hat;
            state.add_slot_to(k, &mut total, 1.0);
        }

        let cands = distinct(state.slots.iter().flatten().cloned());
        let h = fit(y, &cands)?;
        ops += (cands.len() * y.len()) as u64;
        // write the refit back slot by slot; repeated slots get zero
        let mut seen = Vec::new();
        for k in 0..cfg.k_max {
            let id = state.id(k).expect("every slot filled after a sweep");
            state.h[k] = if seen.contains(&id) {
                Complex64::new(0.0, 0.0)
            } else {
                seen.push(id);
                h[cands.iter().position(|c| c.id == id).unwrap()]
            };
        }
        total = state.superposition();

        let ids = pruned_ids(y, &cands, &h, cfg.tau);
        if previous.as_ref() == Some(&ids) {
            break;
        }
        previous = Some(ids);
    }

    let cands = distinct(state.slots.into_iter().flatten());
    prune_and_report(y, cands, cfg.tau, used, ops)
}

/// Iterative multi-user detection. Stops when the reported ID set is the
/// same after two consecutive sweeps, or after `n_max` sweeps.
pub fn detect_iterative(y: &ComplexSignal, cfg: &MultiUserConfig) -> Result<ActiveSetReport> {
    detect_iterative_traced(y, cfg, |_, _, _| {})
}

/// One-pass SIC: detect on the residual, refit every channel detected so far
/// by least squares, subtract, repeat `k_max` times.
pub fn detect_sic(y: &ComplexSignal, cfg: &MultiUserConfig) -> Result<ActiveSetReport> {
    let m = y.order();
    crate::rm::check_order(m)?;
    cfg.validate(m)?;

    let mut found: Vec<Candidate> = Vec::new();
    let mut residual = y.clone();
    let mut ops = 0u64;
    for _ in 0..cfg.k_max {
        let det = detect_with(&residual, &cfg.list)?;
        ops += det.mult_count;
        if !found.iter().any(|c| c.id == det.id) {
            found.push(Candidate {
                id: det.id,
                seq: det.sequence,
            });
        }
        let h = fit(y, &found)?;
        ops += (found.len() * y.len()) as u64;
        residual = ComplexSignal::new(residual_after(y, &found, &h))?;
    }
    prune_and_report(y, found, cfg.tau, 1, ops)
}
