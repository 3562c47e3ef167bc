use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dynamic_lpp::experiments::{self, config::parse_distributions, IdentityConfig, Settings, SweepConfig};
use dynamic_lpp::{oracle, Error, Result, WeightDistribution};

/// Dynamic last-passage percolation experiments.
///
/// Settings come from an optional `--config` file of `key = value` lines
/// (keys: dist, dim, n, t, alpha, reps, pilot_reps, seed, vertex_sample, out,
/// json_summary, threads, no_timestamp, k, configs); flags override the file.
///
/// Exit codes: 0 success, 1 an identity or oracle check failed, 2 invalid
/// configuration or I/O error.
#[derive(Parser, Debug)]
#[command(name = "dynlpp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Q_t, Corr(T_0, T_t), L2 distance, overlap and Var(T) per (n, t) cell.
    Sweep(Common),
    /// Log-log fit of the sample variance of T against n.
    FitExponent(Common),
    /// Covariance formula, derivative identity, co-influence bounds,
    /// stability chain and monotonicity suites.
    Identities(Common),
    /// Conditional tail statistics and integrability verdicts per law.
    DistAudit(Audit),
    /// Dynamic programs against brute-force path enumeration.
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// `key = value` settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight law: exp:<rate>, geom:<p>, pareto:<exponent>,
    /// stretched:<shape>:<scale>, unif01, const:<value> (key: dist).
    #[arg(long)]
    dist: Option<String>,
    /// Dimension d (key: dim, default 2).
    #[arg(long)]
    dim: Option<usize>,
    /// Comma-separated side lengths (key: n).
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated times in [0, 1] (key: t).
    #[arg(long, conflicts_with = "alpha")]
    t: Option<String>,
    /// Comma-separated rescaled times, t = alpha * Var(T) / n capped at 1 (key: alpha).
    #[arg(long)]
    alpha: Option<String>,
    /// Replicates per cell (key: reps, default 1000).
    #[arg(long)]
    reps: Option<usize>,
    /// Replicates of the pilot Var(T) estimate, at least 1000 (key: pilot_reps).
    #[arg(long)]
    pilot_reps: Option<usize>,
    /// Master seed (key: seed, default 1).
    #[arg(long)]
    seed: Option<u64>,
    /// Vertices tracked individually by the identity suite (key: vertex_sample, default 8).
    #[arg(long)]
    vertex_sample: Option<usize>,
    /// Output path; stdout when absent (key: out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary path (key: json_summary).
    #[arg(long)]
    json_summary: Option<PathBuf>,
    /// Worker threads; results do not depend on it (key: threads).
    #[arg(long)]
    threads: Option<usize>,
    /// Omit the `# generated` line from CSV output (key: no_timestamp).
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args, Debug, Clone)]
struct Audit {
    #[command(flatten)]
    common: Common,
    /// Comma-separated truncation levels k (key: k).
    #[arg(long)]
    k: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Random configurations per (law, grid) (key: configs, default 1000).
    #[arg(long)]
    configs: Option<usize>,
}

impl Common {
    fn settings(&self) -> Result<Settings> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let mut top = Settings::default();
        let pairs = [
            ("dist", self.dist.clone()),
            ("dim", self.dim.map(|x| x.to_string())),
            ("n", self.n.clone()),
            ("t", self.t.clone()),
            ("alpha", self.alpha.clone()),
            ("reps", self.reps.map(|x| x.to_string())),
            ("pilot_reps", self.pilot_reps.map(|x| x.to_string())),
            ("seed", self.seed.map(|x| x.to_string())),
            ("vertex_sample", self.vertex_sample.map(|x| x.to_string())),
            ("threads", self.threads.map(|x| x.to_string())),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                top.set(key, &v)?;
            }
        }
        top.out = self.out.clone();
        top.json_summary = self.json_summary.clone();
        if self.no_timestamp {
            top.no_timestamp = Some(true);
        }
        let merged = base.overlay(top);
        // `t` from flags replaces `alpha` from the file and vice versa
        let merged = match (&self.t, &self.alpha) {
            (Some(_), None) => Settings { alpha: None, ..merged },
            (None, Some(_)) => Settings { t: None, ..merged },
            _ => merged,
        };
        Ok(merged)
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => experiments::write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads(settings: &Settings) -> Result<()> {
    if let Some(threads) = settings.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start {threads} threads: {e}")))?;
    }
    Ok(())
}

/// Returns whether every check passed.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Sweep(common) => {
            let s = common.settings()?;
            configure_threads(&s)?;
            let config = SweepConfig::from_settings(&s)?;
            let output = experiments::run_transition_sweep(&config)?;
            emit(config.out.as_deref(), &output.table().to_csv(config.timestamp))?;
            if let Some(p) = &config.json_summary {
                experiments::write_text(p, &experiments::to_json(&output)?)?;
            }
            Ok(true)
        }
        Command::FitExponent(common) => {
            let s = common.settings()?;
            configure_threads(&s)?;
            let dist = s.single_distribution()?;
            let fit = experiments::fit_variance_exponent(&dist, s.dimension(), &s.n_list()?, s.replicates(), s.seed())?;
            emit(s.out.as_deref(), &fit.table().to_csv(s.timestamp()))?;
            if let Some(p) = &s.json_summary {
                experiments::write_text(p, &experiments::to_json(&fit)?)?;
            }
            eprintln!("slope {:.6} ± {:.6} (intercept {:.6})", fit.slope, fit.slope_stderr, fit.intercept);
            Ok(true)
        }
        Command::Identities(common) => {
            let s = common.settings()?;
            configure_threads(&s)?;
            let config = IdentityConfig::from_settings(&s)?;
            let doc = experiments::run_identity_suite(&config)?;
            let json = experiments::to_json(&doc)?;
            emit(s.out.as_deref(), &json)?;
            if let Some(p) = &s.json_summary {
                experiments::write_text(p, &json)?;
            }
            for v in &doc.verdicts {
                eprintln!("{:?} {} n={} t={:?}", v.status, v.identity, v.n, v.t);
            }
            Ok(doc.passed)
        }
        Command::DistAudit(audit) => {
            let mut s = audit.common.settings()?;
            if let Some(k) = &audit.k {
                s.set("k", k)?;
            }
            configure_threads(&s)?;
            let dists = match &s.dist {
                Some(d) => d.clone(),
                None => parse_distributions("exp:1,geom:0.5,pareto:3,stretched:0.5:1,unif01")?,
            };
            let ks = s.k.clone().unwrap_or_else(|| experiments::DEFAULT_AUDIT_K.to_vec());
            let rows = experiments::run_distribution_audit(&dists, &ks, s.dimension())?;
            emit(s.out.as_deref(), &experiments::audit_table(&rows).to_csv(s.timestamp()))?;
            if let Some(p) = &s.json_summary {
                experiments::write_text(p, &experiments::to_json(&rows)?)?;
            }
            Ok(true)
        }
        Command::Oracle(args) => {
            let mut s = args.common.settings()?;
            if let Some(c) = args.configs {
                s.configs = Some(c);
            }
            configure_threads(&s)?;
            let dists: Vec<WeightDistribution> = match &s.dist {
                Some(d) => d.clone(),
                None => parse_distributions("exp:1,geom:0.5,pareto:3,unif01")?,
            };
            let cases = oracle::run_equivalence_suite(&dists, s.configs.unwrap_or(1000), s.seed())?;
            emit(s.out.as_deref(), &experiments::oracle_table(&cases).to_csv(s.timestamp()))?;
            if let Some(p) = &s.json_summary {
                experiments::write_text(p, &experiments::to_json(&cases)?)?;
            }
            Ok(cases.iter().all(|c| c.passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
