//! Monte-Carlo sweeps over SNR and number of active users, with CSV output.
//!
//! Every trial draws its scenario from its own RNG stream, keyed by the sweep
//! seed, the grid point and the trial index. Per-trial outcomes are collected
//! in trial order and summed serially, so the output does not depend on the
//! number of worker threads.

use crate::analysis::{sequence_success_bound, sequence_success_bound_rayleigh};
use crate::channel::{snr_to_n0, synthesize, ChannelModel, Scenario};
use crate::detect::{detect_list, detect_single, ListParams};
use crate::error::{Error, Result};
use crate::multi::{detect_iterative, detect_sic, MultiUserConfig};
use crate::rm::{capacity, UserId};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "RM_ACCESS_THREADS";

/// Column header of the metrics CSV.
pub const CSV_HEADER: &str = "m,snr_db,K,algorithm,L,n_max,k_max,seed,trials,success_prob,channel_mse,far,mean_iterations,mean_mult_count,bound_value";

/// Detector run in each trial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Layer-by-layer single-sequence detection.
    #[default]
    Lld,
    /// List detection of a single sequence.
    List,
    /// Iterative multi-user detection.
    Iterative,
    /// Successive interference cancellation.
    Sic,
}

impl Algorithm {
    pub fn is_multi_user(self) -> bool {
        matches!(self, Self::Iterative | Self::Sic)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lld" => Ok(Self::Lld),
            "list" => Ok(Self::List),
            "iterative" => Ok(Self::Iterative),
            "sic" => Ok(Self::Sic),
            other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Lld => "lld",
            Self::List => "list",
            Self::Iterative => "iterative",
            Self::Sic => "sic",
        })
    }
}

/// A sweep over `snr_db x users`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub m: usize,
    pub snr_db: Vec<f64>,
    /// Numbers of active users `K`.
    pub users: Vec<usize>,
    /// Trials per grid point.
    pub trials: u64,
    pub algorithm: Algorithm,
    /// Per-user list widths. `list` defaults to `[2, 2]`, the multi-user
    /// algorithms to plain detection; ignored by `lld`.
    pub list: Option<ListParams>,
    pub n_max: usize,
    /// Number of slots; `K + 2` when unset.
    pub k_max: Option<usize>,
    pub tau: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub channel: ChannelModel,
    /// Worker threads; falls back to `RM_ACCESS_THREADS`, then to all cores.
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            m: 8,
            snr_db: (-10..=5).map(f64::from).collect(),
            users: vec![1],
            trials: 2000,
            algorithm: Algorithm::Lld,
            list: None,
            n_max: MultiUserConfig::DEFAULT_N_MAX,
            k_max: None,
            tau: MultiUserConfig::DEFAULT_TAU,
            seed: 1,
            out: None,
            channel: ChannelModel::Rayleigh,
            threads: None,
        }
    }
}

fn config_err(key: &str, value: &str, why: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key} = '{value}': {why}"))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| config_err(key, value, e))
}

/// `lo:hi:step` (inclusive) or a comma-separated list.
pub fn parse_snr_list(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(config_err("snr", text, "expected lo:hi:step"));
        }
        let lo: f64 = parse_num("snr", parts[0])?;
        let hi: f64 = parse_num("snr", parts[1])?;
        let step: f64 = parse_num("snr", parts[2])?;
        if !step.is_finite() || step <= 0.0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(config_err("snr", text, "need lo <= hi and step > 0"));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| lo + i as f64 * step).collect());
    }
    let out: Vec<f64> = text
        .split(',')
        .map(|v| parse_num("snr", v))
        .collect::<Result<_>>()?;
    if out.iter().any(|v| !v.is_finite()) {
        return Err(config_err("snr", text, "non-finite value"));
    }
    Ok(out)
}

/// Comma-separated non-negative integers.
pub fn parse_usize_list(key: &str, text: &str) -> Result<Vec<usize>> {
    text.split(',').map(|v| parse_num(key, v)).collect()
}

/// List widths, separated by commas or semicolons.
pub fn parse_list_widths(text: &str) -> Result<ListParams> {
    let widths = text
        .split([',', ';'])
        .map(|v| parse_num("list", v))
        .collect::<Result<Vec<usize>>>()?;
    ListParams::new(widths)
}

impl SweepConfig {
    /// Sets one field from its textual form. Keys match the CLI flags without
    /// the leading dashes; `-` and `_` are interchangeable.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "m" => self.m = parse_num("m", v)?,
            "snr" | "snr_db" => self.snr_db = parse_snr_list(v)?,
            "users" | "k" => self.users = parse_usize_list("users", v)?,
            "trials" => self.trials = parse_num("trials", v)?,
            "algo" | "algorithm" => self.algorithm = v.parse()?,
            "list" => self.list = Some(parse_list_widths(v)?),
            "iters" | "n_max" => self.n_max = parse_num("iters", v)?,
            "kmax" | "k_max" => self.k_max = Some(parse_num("kmax", v)?),
            "prune_tau" | "tau" => self.tau = parse_num("prune_tau", v)?,
            "seed" => self.seed = parse_num("seed", v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "channel" => self.channel = v.parse()?,
            "threads" => self.threads = Some(parse_num("threads", v)?),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_kv_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            self.apply(key, value)?;
        }
        Ok(())
    }

    /// Defaults overridden by a config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_kv_text(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    /// Per-user detector for this algorithm.
    pub fn effective_list(&self) -> ListParams {
        match (self.algorithm, &self.list) {
            (Algorithm::Lld, _) => ListParams::single(),
            (Algorithm::List, None) => ListParams::new(vec![2, 2]).expect("valid widths"),
            (_, Some(l)) => l.clone(),
            (_, None) => ListParams::single(),
        }
    }

    /// Slots used with `k` active users.
    pub fn effective_k_max(&self, k: usize) -> usize {
        self.k_max.unwrap_or(k + 2).max(1)
    }

    fn multi_config(&self, k: usize) -> MultiUserConfig {
        MultiUserConfig::new(self.effective_k_max(k))
            .with_n_max(self.n_max)
            .with_list(self.effective_list())
            .with_tau(self.tau)
    }

    pub fn validate(&self) -> Result<()> {
        crate::rm::check_order(self.m)?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.trials > u32::MAX as u64 {
            return Err(Error::Config("at most 2^32 - 1 trials per grid point".into()));
        }
        if self.snr_db.is_empty() || self.users.is_empty() {
            return Err(Error::Config("snr and users lists must be non-empty".into()));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("non-finite snr".into()));
        }
        if let Some(&k) = self.users.iter().find(|&&k| k as u128 > capacity(self.m)) {
            return Err(Error::Config(format!("{k} users exceed the id space of m = {}", self.m)));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.algorithm.is_multi_user() {
            for &k in &self.users {
                self.multi_config(k).validate(self.m)?;
            }
        } else {
            self.effective_list().validate(self.m)?;
        }
        Ok(())
    }

    /// Grid points in output order: SNR outer, `K` inner.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.snr_db.len() * self.users.len());
        for &snr_db in &self.snr_db {
            for &users in &self.users {
                out.push(GridPoint {
                    index: out.len() as u64,
                    snr_db,
                    users,
                });
            }
        }
        out
    }
}

/// One `(snr, K)` cell of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub index: u64,
    pub snr_db: f64,
    pub users: usize,
}

impl GridPoint {
    /// RNG stream of trial `t` at this point.
    pub fn stream(&self, trial: u64) -> u64 {
        (self.index << 32) | trial
    }
}

/// What one trial contributes to the metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub active: usize,
    /// Active users whose exact ID was reported.
    pub detected: usize,
    /// Reported IDs that were not active.
    pub false_alarms: usize,
    /// `|h_hat - h|^2` of each detected user.
    pub sq_errors: Vec<f64>,
    pub iterations: usize,
    pub mult_count: u64,
    /// Residual energy left by the detector.
    pub residual: f64,
}

struct Report {
    ids: Vec<UserId>,
    h: Vec<Complex64>,
    iterations: usize,
    mult_count: u64,
    residual: f64,
}

fn run_detector(cfg: &SweepConfig, y: &crate::ComplexSignal, k: usize) -> Result<Report> {
    match cfg.algorithm {
        Algorithm::Lld | Algorithm::List => {
            let det = if cfg.algorithm == Algorithm::Lld {
                detect_single(y)?
            } else {
                detect_list(y, &cfg.effective_list())?
            };
            Ok(Report {
                ids: vec![det.id],
                h: vec![det.h_hat],
                iterations: 1,
                mult_count: det.mult_count,
                residual: det.residual,
            })
        }
        Algorithm::Iterative | Algorithm::Sic => {
            let mc = cfg.multi_config(k);
            let rep = if cfg.algorithm == Algorithm::Iterative {
                detect_iterative(y, &mc)?
            } else {
                detect_sic(y, &mc)?
            };
            Ok(Report {
                ids: rep.ids,
                h: rep.h_hats,
                iterations: rep.iterations_used,
                mult_count: rep.mult_count,
                residual: rep.residual,
            })
        }
    }
}

/// Scenario of trial `trial` at `point`.
pub fn trial_scenario(cfg: &SweepConfig, point: &GridPoint, trial: u64) -> Result<Scenario> {
    Scenario::draw(
        cfg.m,
        point.users,
        snr_to_n0(point.snr_db),
        cfg.channel,
        cfg.seed,
        point.stream(trial),
    )
}

/// Runs one trial.
pub fn simulate_trial(cfg: &SweepConfig, point: &GridPoint, trial: u64) -> Result<TrialOutcome> {
    let sc = trial_scenario(cfg, point, trial)?;
    let y = synthesize(&sc);
    let rep = run_detector(cfg, &y, point.users)?;

    let mut sq_errors = Vec::new();
    for (id, h) in sc.ids().iter().zip(sc.channels()) {
        if let Some(pos) = rep.ids.iter().position(|r| r == id) {
            sq_errors.push((rep.h[pos] - h).norm_sqr());
        }
    }
    let false_alarms = rep.ids.iter().filter(|r| !sc.ids().contains(r)).count();
    Ok(TrialOutcome {
        active: point.users,
        detected: sq_errors.len(),
        false_alarms,
        sq_errors,
        iterations: rep.iterations,
        mult_count: rep.mult_count,
        residual: rep.residual,
    })
}

/// Aggregated metrics of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub m: usize,
    pub snr_db: f64,
    pub users: usize,
    pub algorithm: Algorithm,
    /// Per-user list widths, `;`-separated.
    pub list: String,
    pub n_max: Option<usize>,
    pub k_max: Option<usize>,
    pub seed: u64,
    pub trials: u64,
    /// Detected fraction of active users; `None` when `K = 0`.
    pub success_prob: Option<f64>,
    /// Mean `|h_hat - h|^2` over detected users; `None` if none were.
    pub channel_mse: Option<f64>,
    /// False alarms per inactive user, averaged over trials.
    pub far: f64,
    pub mean_iterations: f64,
    pub mean_mult_count: f64,
    /// Single-user success bound, for single-sequence algorithms at `K = 1`.
    pub bound_value: Option<f64>,
}

/// Closed-form success bound matching the channel model of `cfg`.
pub fn bound_for(cfg: &SweepConfig, snr_db: f64) -> Result<f64> {
    let n0 = snr_to_n0(snr_db);
    match cfg.channel {
        ChannelModel::Rayleigh => sequence_success_bound_rayleigh(cfg.m, n0),
        ChannelModel::UnitMagnitude => sequence_success_bound(cfg.m, 1.0, n0),
    }
}

/// Folds per-trial outcomes (in trial order) into a row.
pub fn aggregate(cfg: &SweepConfig, point: &GridPoint, outcomes: &[TrialOutcome]) -> Result<MetricsRow> {
    let trials = outcomes.len() as f64;
    let inactive = capacity(cfg.m) as f64 - point.users as f64;
    let (mut active, mut detected, mut sq, mut far, mut iters, mut mults) =
        (0usize, 0usize, 0.0, 0.0, 0.0, 0.0);
    for o in outcomes {
        active += o.active;
        detected += o.detected;
        sq += o.sq_errors.iter().sum::<f64>();
        far += if inactive > 0.0 { o.false_alarms as f64 / inactive } else { 0.0 };
        iters += o.iterations as f64;
        mults += o.mult_count as f64;
    }
    let multi = cfg.algorithm.is_multi_user();
    let bound_value = if !multi && point.users == 1 {
        Some(bound_for(cfg, point.snr_db)?)
    } else {
        None
    };
    Ok(MetricsRow {
        m: cfg.m,
        snr_db: point.snr_db,
        users: point.users,
        algorithm: cfg.algorithm,
        list: cfg.effective_list().to_string(),
        n_max: multi.then_some(cfg.n_max),
        k_max: multi.then(|| cfg.effective_k_max(point.users)),
        seed: cfg.seed,
        trials: outcomes.len() as u64,
        success_prob: (active > 0).then(|| detected as f64 / active as f64),
        channel_mse: (detected > 0).then(|| sq / detected as f64),
        far: far / trials,
        mean_iterations: iters / trials,
        mean_mult_count: mults / trials,
        bound_value,
    })
}

/// Worker count: explicit setting, then `RM_ACCESS_THREADS`, else `None`
/// (all cores).
pub fn resolve_threads(explicit: Option<usize>) -> Result<Option<usize>> {
    if explicit.is_some() {
        return Ok(explicit);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            let n: usize = parse_num(THREADS_ENV, &v)?;
            if n == 0 {
                return Err(Error::Config(format!("{THREADS_ENV} must be at least 1")));
            }
            Ok(Some(n))
        }
        _ => Ok(None),
    }
}

/// All trial outcomes of a sweep, grouped by grid point in grid order.
pub fn run_trials(cfg: &SweepConfig) -> Result<Vec<(GridPoint, Vec<TrialOutcome>)>> {
    cfg.validate()?;
    let grid = cfg.grid();
    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|g| (0..cfg.trials).map(move |t| (g, t)))
        .collect();
    let run = |&(g, t): &(usize, u64)| simulate_trial(cfg, &grid[g], t);

    let flat: Vec<TrialOutcome> = match resolve_threads(cfg.threads)? {
        Some(1) => jobs.iter().map(run).collect::<Result<_>>()?,
        threads => {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                builder = builder.num_threads(n);
            }
            let pool = builder
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| jobs.par_iter().map(run).collect::<Result<_>>())?
        }
    };

    let per = cfg.trials as usize;
    Ok(grid
        .into_iter()
        .zip(flat.chunks(per))
        .map(|(p, c)| (p, c.to_vec()))
        .collect())
}

/// Runs the sweep; one row per grid point, in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<MetricsRow>> {
    run_trials(cfg)?
        .iter()
        .map(|(p, outcomes)| aggregate(cfg, p, outcomes))
        .collect()
}

/// `%g`-style rendering with 6 significant digits.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl MetricsRow {
    /// CSV record in [`CSV_HEADER`] order.
    pub fn to_csv(&self) -> String {
        [
            self.m.to_string(),
            format_g(self.snr_db),
            self.users.to_string(),
            self.algorithm.to_string(),
            self.list.clone(),
            opt(self.n_max, |v| v.to_string()),
            opt(self.k_max, |v| v.to_string()),
            self.seed.to_string(),
            self.trials.to_string(),
            opt(self.success_prob, format_g),
            opt(self.channel_mse, format_g),
            format_g(self.far),
            format_g(self.mean_iterations),
            format_g(self.mean_mult_count),
            opt(self.bound_value, format_g),
        ]
        .join(",")
    }
}

/// Writes the header and one line per row.
pub fn emit_csv<W: Write>(rows: &[MetricsRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    out.flush()?;
    Ok(())
}

/// [`emit_csv`] to a file.
pub fn write_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    emit_csv(rows, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_g_matches_printf() {
        assert_eq!(format_g(0.0), "0");
        assert_eq!(format_g(1.0), "1");
        assert_eq!(format_g(-4.0), "-4");
        assert_eq!(format_g(0.985), "0.985");
        assert_eq!(format_g(2302.0), "2302");
        assert_eq!(format_g(1234567.0), "1.23457e+06");
        assert_eq!(format_g(0.000123456789), "0.000123457");
        assert_eq!(format_g(1.5e-7), "1.5e-07");
        assert_eq!(format_g(1.0 / 3.0), "0.333333");
        assert_eq!(format_g(999999.5), "1e+06");
    }

    #[test]
    fn snr_parsing() {
        assert_eq!(parse_snr_list("-10:5:1").unwrap().len(), 16);
        assert_eq!(parse_snr_list("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_snr_list("20, 10,-3").unwrap(), vec![20.0, 10.0, -3.0]);
        assert!(parse_snr_list("1:0:1").is_err());
        assert!(parse_snr_list("0:1:0").is_err());
        assert!(parse_snr_list("a,b").is_err());
    }

    #[test]
    fn kv_text() {
        let mut cfg = SweepConfig::default();
        cfg.apply_kv_text(
            "# sweep\nm = 6\nsnr = 0:2:1\nusers = 2,4\nalgo = sic\nkmax = 5\nprune-tau = 2.5\nlist = 2;2\n",
        )
        .unwrap();
        assert_eq!(cfg.m, 6);
        assert_eq!(cfg.snr_db, vec![0.0, 1.0, 2.0]);
        assert_eq!(cfg.users, vec![2, 4]);
        assert_eq!(cfg.algorithm, Algorithm::Sic);
        assert_eq!(cfg.k_max, Some(5));
        assert_eq!(cfg.tau, 2.5);
        assert_eq!(cfg.list.as_ref().unwrap().widths(), &[2, 2]);
        assert!(cfg.apply_kv_text("bogus = 1").is_err());
        assert!(cfg.apply_kv_text("m 3").is_err());
    }

    #[test]
    fn validation() {
        let ok = SweepConfig::default();
        assert!(ok.validate().is_ok());
        let bad = SweepConfig { trials: 0, ..ok.clone() };
        assert!(bad.validate().is_err());
        let bad = SweepConfig { users: vec![], ..ok.clone() };
        assert!(bad.validate().is_err());
        let bad = SweepConfig { m: 1, ..ok.clone() };
        assert!(bad.validate().is_err());
        let bad = SweepConfig {
            algorithm: Algorithm::List,
            list: Some(ListParams::new(vec![1; 8]).unwrap()),
            ..ok
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn grid_order_and_streams() {
        let cfg = SweepConfig {
            snr_db: vec![0.0, 5.0],
            users: vec![1, 2, 3],
            ..Default::default()
        };
        let g = cfg.grid();
        assert_eq!(g.len(), 6);
        assert_eq!((g[4].snr_db, g[4].users, g[4].index), (5.0, 2, 4));
        assert_eq!(g[4].stream(7), (4 << 32) | 7);
    }

    #[test]
    fn noiseless_single_user_is_always_detected() {
        let cfg = SweepConfig {
            m: 6,
            snr_db: vec![300.0],
            trials: 50,
            threads: Some(1),
            ..Default::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows[0].success_prob, Some(1.0));
        assert_eq!(rows[0].far, 0.0);
    }

    #[test]
    fn zero_users_row() {
        let cfg = SweepConfig {
            m: 6,
            snr_db: vec![60.0],
            users: vec![0],
            trials: 1,
            algorithm: Algorithm::Iterative,
            threads: Some(1),
            ..Default::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows[0].success_prob, None);
        assert_eq!(rows[0].channel_mse, None);
        assert!(rows[0].to_csv().contains(",,,"));
    }

    #[test]
    fn csv_shape() {
        let mut buf = Vec::new();
        emit_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }
}
