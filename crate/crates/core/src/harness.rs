//! Seeded ensembles: configuration, parallel execution, machine-readable
//! output files and the log-log fit of final edge counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{run, RunConfig, RunResult, PERMUTATION_GUARD};
use crate::rng::derive_seed;
use crate::trajectory::{csv_row, step_at_p, SnapshotPolicy, StoppingConfig, CSV_HEADER};

pub const SCHEMA_VERSION: u32 = 1;

/// Which seeds each `n` is run with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SeedSpec {
    List(Vec<u64>),
    /// `count` seeds derived from `master`, `n` and the replicate index.
    Derived {
        master: u64,
        count: u64,
    },
}

impl SeedSpec {
    pub fn seeds_for(&self, n: usize) -> Vec<u64> {
        match self {
            SeedSpec::List(s) => s.clone(),
            SeedSpec::Derived { master, count } => (0..*count).map(|r| derive_seed(*master, n as u64, r)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ns: Vec<usize>,
    pub seeds: SeedSpec,
    pub m: usize,
    /// Snapshot grid spacing in `p`; snapshots are off when `None`.
    pub snapshot_dp: Option<f64>,
    pub pair_sample: usize,
    pub full_scan_max_n: usize,
    pub kappa: f64,
    pub alpha: f64,
    pub output_dir: PathBuf,
    pub workers: usize,
    /// Switch to permutation mode once `p` reaches this value.
    pub permutation_at_p: Option<f64>,
    /// Start survivor instrumentation once `p` reaches this value.
    pub certify_at_p: Option<f64>,
    pub stop_below_p: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let policy = SnapshotPolicy::default();
        Self {
            ns: Vec::new(),
            seeds: SeedSpec::List(vec![1]),
            m: 3,
            snapshot_dp: None,
            pair_sample: policy.pair_sample,
            full_scan_max_n: policy.full_scan_max_n,
            kappa: policy.stopping.kappa,
            alpha: policy.stopping.alpha,
            output_dir: PathBuf::from("out"),
            workers: 1,
            permutation_at_p: None,
            certify_at_p: None,
            stop_below_p: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

/// `a..b` (inclusive) or a comma-separated list.
fn parse_seed_list(value: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = value.split_once("..") {
        let (a, b): (u64, u64) = (parse_num("seeds", a)?, parse_num("seeds", b)?);
        if a > b {
            return Err(Error::Config(format!("seeds: empty range {value:?}")));
        }
        return Ok((a..=b).collect());
    }
    parse_list("seeds", value)
}

fn parse_optional_p(key: &str, value: &str) -> Result<Option<f64>> {
    match value.trim() {
        "" | "none" | "off" => Ok(None),
        v => parse_num(key, v).map(Some),
    }
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::parse(&text)
    }

    /// Applies one `key=value` override; the result is validated.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
        self.set(k.trim(), v.trim())?;
        self.validate()
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" | "ns" => self.ns = parse_list(key, value)?,
            "seeds" => self.seeds = SeedSpec::List(parse_seed_list(value)?),
            "replicates" => {
                let master = match self.seeds {
                    SeedSpec::Derived { master, .. } => master,
                    SeedSpec::List(_) => 0,
                };
                self.seeds = SeedSpec::Derived {
                    master,
                    count: parse_num(key, value)?,
                };
            }
            "master_seed" => {
                let count = match self.seeds {
                    SeedSpec::Derived { count, .. } => count,
                    SeedSpec::List(_) => 1,
                };
                self.seeds = SeedSpec::Derived {
                    master: parse_num(key, value)?,
                    count,
                };
            }
            "M" | "m" => self.m = parse_num(key, value)?,
            "snapshot_dp" => self.snapshot_dp = parse_optional_p(key, value)?,
            "pair_sample" => self.pair_sample = parse_num(key, value)?,
            "full_scan_max_n" => self.full_scan_max_n = parse_num(key, value)?,
            "kappa" => self.kappa = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "workers" => self.workers = parse_num(key, value)?,
            "permutation_at_p" => self.permutation_at_p = parse_optional_p(key, value)?,
            "certify_at_p" => self.certify_at_p = parse_optional_p(key, value)?,
            "stop_below_p" => self.stop_below_p = parse_optional_p(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.ns.is_empty() || self.ns.contains(&0) {
            return bad(format!("n list must be non-empty and positive, got {:?}", self.ns));
        }
        if self.m == 0 || self.workers == 0 || self.pair_sample == 0 {
            return bad("M, workers and pair_sample must be positive".into());
        }
        if !(self.kappa > 0.0 && self.alpha > 0.0) {
            return bad("kappa and alpha must be positive".into());
        }
        for (name, p) in [
            ("snapshot_dp", self.snapshot_dp),
            ("permutation_at_p", self.permutation_at_p),
            ("certify_at_p", self.certify_at_p),
            ("stop_below_p", self.stop_below_p),
        ] {
            if let Some(p) = p {
                if !(p > 0.0 && p <= 1.0) {
                    return bad(format!("{name} must lie in (0, 1], got {p}"));
                }
            }
        }
        for &n in &self.ns {
            let seeds = self.seeds.seeds_for(n);
            if seeds.is_empty() {
                return bad(format!("no seeds for n = {n}"));
            }
            if seeds.iter().collect::<BTreeSet<_>>().len() != seeds.len() {
                return bad(format!("seeds are not unique for n = {n}"));
            }
        }
        Ok(())
    }

    /// Process options for one run at `n`.
    pub fn run_config(&self, n: usize) -> RunConfig {
        RunConfig {
            snapshots: self.snapshot_dp.map(|dp| SnapshotPolicy {
                dp,
                pair_sample: self.pair_sample,
                full_scan_max_n: self.full_scan_max_n,
                stopping: StoppingConfig {
                    kappa: self.kappa,
                    alpha: self.alpha,
                },
            }),
            permutation_at: self.permutation_at_p.map(|p| step_at_p(n, p)),
            certify_at: self.certify_at_p.map(|p| step_at_p(n, p)),
            stop_below_p: self.stop_below_p,
            permutation_guard: PERMUTATION_GUARD,
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Per-run output file contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub result: RunResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeStats {
    pub n: usize,
    pub runs: usize,
    pub mean_final_edges: f64,
    pub sd_final_edges: f64,
    pub min_final_edges: u64,
    pub max_final_edges: u64,
    pub mean_tau0: f64,
    pub completed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub sizes: Vec<SizeStats>,
    /// Fit of `ln(mean final edges)` against `ln n`, when at least three
    /// sizes have positive means.
    pub fit: Option<Fit>,
}

/// Paths written by [`run_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub aggregate: Aggregate,
    pub results: Vec<RunResult>,
    pub snapshot_csv: Option<PathBuf>,
    pub run_files: Vec<PathBuf>,
    pub aggregate_file: PathBuf,
}

/// Runs every `(n, seed)` of `cfg` on a pool of `cfg.workers` threads and
/// writes `snapshots.csv`, `runs/n{n}_seed{seed}.json` and `aggregate.json`
/// under `cfg.output_dir`. File contents do not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let results = run_ensemble(cfg)?;
    let dir = &cfg.output_dir;

    let snapshot_csv = if cfg.snapshot_dp.is_some() {
        let mut csv = String::new();
        csv.push_str(CSV_HEADER);
        csv.push('\n');
        for r in &results {
            for s in &r.snapshots {
                writeln!(csv, "{}", csv_row(s)).expect("string write");
            }
        }
        let path = dir.join("snapshots.csv");
        write_file(&path, &csv)?;
        Some(path)
    } else {
        None
    };

    let mut run_files = Vec::with_capacity(results.len());
    for r in &results {
        let path = dir.join("runs").join(format!("n{}_seed{}.json", r.n, r.seed));
        let summary = RunSummary {
            schema_version: SCHEMA_VERSION,
            config: cfg.clone(),
            result: r.clone(),
        };
        write_file(&path, &to_json(&summary))?;
        run_files.push(path);
    }

    let aggregate = aggregate(cfg, &results);
    let aggregate_file = dir.join("aggregate.json");
    write_file(&aggregate_file, &to_json(&aggregate))?;
    Ok(ExperimentOutput {
        aggregate,
        results,
        snapshot_csv,
        run_files,
        aggregate_file,
    })
}

/// Runs every `(n, seed)` of `cfg` without writing files, sorted by `(n, seed)`.
pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    let jobs: Vec<(usize, u64)> = cfg
        .ns
        .iter()
        .flat_map(|&n| cfg.seeds.seeds_for(n).into_iter().map(move |s| (n, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut results = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, seed)| run(n, seed, &cfg.run_config(n)))
            .collect::<Result<Vec<_>>>()
    })?;
    results.sort_by_key(|r| (r.n, r.seed));
    Ok(results)
}

/// Per-size statistics and the exponent fit.
pub fn aggregate(cfg: &ExperimentConfig, results: &[RunResult]) -> Aggregate {
    let mut by_n: BTreeMap<usize, Vec<&RunResult>> = BTreeMap::new();
    for r in results {
        by_n.entry(r.n).or_default().push(r);
    }
    let sizes: Vec<SizeStats> = by_n
        .into_iter()
        .map(|(n, rs)| {
            let k = rs.len() as f64;
            let mean = rs.iter().map(|r| r.final_edges as f64).sum::<f64>() / k;
            let var = if rs.len() > 1 {
                rs.iter().map(|r| (r.final_edges as f64 - mean).powi(2)).sum::<f64>() / (k - 1.0)
            } else {
                0.0
            };
            SizeStats {
                n,
                runs: rs.len(),
                mean_final_edges: mean,
                sd_final_edges: var.sqrt(),
                min_final_edges: rs.iter().map(|r| r.final_edges).min().unwrap_or(0),
                max_final_edges: rs.iter().map(|r| r.final_edges).max().unwrap_or(0),
                mean_tau0: rs.iter().map(|r| r.tau0 as f64).sum::<f64>() / k,
                completed: rs.iter().filter(|r| r.completed).count(),
            }
        })
        .collect();
    let points: Vec<(f64, f64)> = sizes.iter().map(|s| (s.n as f64, s.mean_final_edges)).collect();
    Aggregate {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        fit: fit_exponent(&points).ok(),
        sizes,
    }
}

pub fn read_aggregate(path: &Path) -> Result<Aggregate> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_run_summary(path: &Path) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// `(n, mean)` points from an aggregate JSON file or from `n,mean` lines
/// (a non-numeric first line is taken as a header).
pub fn read_fit_input(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    if text.trim_start().starts_with('{') {
        let agg: Aggregate =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        return Ok(agg.sizes.iter().map(|s| (s.n as f64, s.mean_final_edges)).collect());
    }
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match f.as_slice() {
            [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(pt) => out.push(pt),
            None if k == 0 => continue,
            None => return Err(Error::Parse(format!("line {}: expected n,mean", k + 1))),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least-squares line through `(ln n, ln mean)`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<Fit> {
    let distinct: BTreeSet<u64> = points.iter().map(|&(n, _)| n.to_bits()).collect();
    if distinct.len() < 3 {
        return Err(Error::Degenerate(format!(
            "need at least 3 distinct n, got {}",
            distinct.len()
        )));
    }
    if let Some(&(n, m)) = points.iter().find(|&&(n, m)| !(n > 0.0 && m > 0.0)) {
        return Err(Error::Degenerate(format!("non-positive point ({n}, {m})")));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, m)| m.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(Fit { slope, intercept, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_config_and_overrides() {
        let mut cfg =
            ExperimentConfig::parse("# ensemble\nn = 5, 8\nseeds = 1..4\nsnapshot_dp = 0.1\nworkers = 2\n").unwrap();
        assert_eq!(cfg.ns, vec![5, 8]);
        assert_eq!(cfg.seeds.seeds_for(5), vec![1, 2, 3, 4]);
        assert_eq!(cfg.snapshot_dp, Some(0.1));
        cfg.apply_override("workers=1").unwrap();
        assert_eq!(cfg.workers, 1);
        assert!(cfg.apply_override("workers=0").is_err());
        assert!(ExperimentConfig::parse("n = 5\nseeds = 1,1\n").is_err());
        assert!(ExperimentConfig::parse("n = 5\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::parse("seeds = 1\n").is_err());
    }

    #[test]
    fn derived_seeds_are_distinct_per_size() {
        let cfg = ExperimentConfig::parse("n = 10, 20\nmaster_seed = 7\nreplicates = 5\n").unwrap();
        let a = cfg.seeds.seeds_for(10);
        let b = cfg.seeds.seeds_for(20);
        assert_eq!(a.len(), 5);
        assert_ne!(a, b);
        assert_eq!(a[2], derive_seed(7, 10, 2));
    }

    #[test]
    fn fit_examples() {
        let pts: Vec<(f64, f64)> = [128.0, 256.0, 512.0]
            .iter()
            .map(|&n: &f64| (n, 7.0 * n.powf(1.5)))
            .collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-9);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        let f = fit_exponent(&[(10.0, 3.0), (20.0, 3.0), (40.0, 3.0)]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.r2, 1.0);
        assert!(fit_exponent(&[(10.0, 3.0), (20.0, 3.0)]).is_err());
        assert!(fit_exponent(&[(10.0, 3.0), (20.0, 0.0), (30.0, 1.0)]).is_err());
    }

    #[test]
    fn tiny_ensembles() {
        let cfg = ExperimentConfig {
            ns: vec![2],
            ..Default::default()
        };
        let rs = run_ensemble(&cfg).unwrap();
        assert_eq!((rs[0].tau0, rs[0].final_edges), (0, 1));
        let cfg = ExperimentConfig {
            ns: vec![5],
            seeds: SeedSpec::List((1..=100).collect()),
            ..Default::default()
        };
        assert!(run_ensemble(&cfg).unwrap().iter().all(|r| r.final_edges == 4));
    }
}
