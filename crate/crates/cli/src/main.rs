use anyhow::{Context, Result};
use clap::Parser;
use rm_access::harness::{emit_csv, run_sweep, write_csv, SweepConfig};
use std::path::PathBuf;

/// Monte-Carlo sweep of RM-sequence user detection. Writes one CSV row per
/// (SNR, K) grid point.
#[derive(Parser, Debug)]
#[command(name = "rm-access", version)]
struct Args {
    /// `key = value` config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sequence order (length 2^m)
    #[arg(long)]
    m: Option<String>,
    /// SNR in dB: lo:hi:step or a comma list
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Numbers of active users, comma separated
    #[arg(long)]
    users: Option<String>,
    /// Trials per grid point
    #[arg(long)]
    trials: Option<String>,
    /// lld, list, iterative or sic
    #[arg(long)]
    algo: Option<String>,
    /// List widths, e.g. 2,2
    #[arg(long)]
    list: Option<String>,
    /// Maximum iterations of the iterative detector
    #[arg(long)]
    iters: Option<String>,
    /// User slots (default K + 2)
    #[arg(long)]
    kmax: Option<String>,
    /// Pruning factor
    #[arg(long = "prune-tau")]
    prune_tau: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    out: Option<String>,
    /// rayleigh or unit
    #[arg(long)]
    channel: Option<String>,
    /// Worker threads (default: RM_ACCESS_THREADS, then all cores)
    #[arg(long)]
    threads: Option<String>,
}

impl Args {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        [
            ("m", &self.m),
            ("snr", &self.snr),
            ("users", &self.users),
            ("trials", &self.trials),
            ("algo", &self.algo),
            ("list", &self.list),
            ("iters", &self.iters),
            ("kmax", &self.kmax),
            ("prune_tau", &self.prune_tau),
            ("seed", &self.seed),
            ("out", &self.out),
            ("channel", &self.channel),
            ("threads", &self.threads),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

fn build_config(args: &Args) -> Result<SweepConfig> {
    let mut cfg = match &args.config {
        Some(path) => SweepConfig::from_file(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => SweepConfig::default(),
    };
    for (key, value) in args.overrides() {
        cfg.apply(key, value).with_context(|| format!("--{key}"))?;
    }
    cfg.validate().context("invalid sweep configuration")?;
    Ok(cfg)
}

fn main() -> Result<()> {
    let args = Args::parse();
    let cfg = build_config(&args)?;
    let rows = run_sweep(&cfg).context("sweep failed")?;
    match &cfg.out {
        Some(path) => {
            write_csv(&rows, path).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => emit_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("rm-access").chain(argv.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.cfg");
        std::fs::write(&path, "m = 6\ntrials = 10\nalgo = sic\n").unwrap();
        let args = parse(&["--config", path.to_str().unwrap(), "--trials", "3", "--snr", "-2:0:1"]);
        let cfg = build_config(&args).unwrap();
        assert_eq!(cfg.m, 6);
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.snr_db, vec![-2.0, -1.0, 0.0]);
        assert_eq!(cfg.algorithm.to_string(), "sic");
    }

    #[test]
    fn invalid_values_are_errors() {
        assert!(build_config(&parse(&["--trials", "0"])).is_err());
        assert!(build_config(&parse(&["--algo", "omp"])).is_err());
        assert!(build_config(&parse(&["--config", "/nonexistent/sweep.cfg"])).is_err());
    }
}
