use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use trirem_core::harness::{read_fit_input, RunSummary, SCHEMA_VERSION};
use trirem_core::ladders::{backward_extension, classify_all};
use trirem_core::trajectory::{csv_row, CSV_HEADER};
use trirem_core::{
    build_ladder, concentration_audit, enumerate_bm, fit_exponent, run, run_experiment, AuditConfig, EdgeClass,
    ExperimentConfig, SeedSpec,
};

#[derive(Parser)]
#[command(name = "trirem", version, about = "Random greedy triangle removal workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the process once and print a JSON summary.
    Simulate(SimulateArgs),
    /// Run a seeded ensemble described by a config file.
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, `key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Enumerate the bounded ladder family.
    Ladders {
        #[arg(long = "M", short = 'M')]
        m: usize,
        /// One word per line with vertex and edge counts.
        #[arg(long, conflicts_with = "classify")]
        list: bool,
        /// Edge classes of every ladder.
        #[arg(long)]
        classify: bool,
    },
    /// Check that every backward extension is balanced at the expected density.
    VerifyBalance {
        #[arg(long = "M", short = 'M')]
        m: usize,
    },
    /// Compare tracked ladder deviations with their envelopes along one run.
    HomAudit(AuditArgs),
    /// Fit ln(mean final edges) against ln n.
    ExponentFit {
        /// Aggregate JSON or `n,mean` lines.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.35)]
        min_slope: f64,
        #[arg(long, default_value_t = 1.65)]
        max_slope: f64,
        #[arg(long, default_value_t = 0.98)]
        min_r2: f64,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Snapshot grid spacing in p.
    #[arg(long)]
    snapshot_dp: Option<f64>,
    /// Also write the snapshot rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Sampled pairs per snapshot above the full-scan size.
    #[arg(long)]
    pair_sample: Option<usize>,
    /// Switch to permutation mode once p falls to this value.
    #[arg(long = "permutation-at", value_name = "P")]
    permutation_at: Option<f64>,
    /// Start survivor certificates once p falls to this value.
    #[arg(long = "certify-at", value_name = "P")]
    certify_at: Option<f64>,
    /// Stop once p falls below this value.
    #[arg(long, value_name = "P")]
    stop_below: Option<f64>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "M", short = 'M', default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 0.3)]
    p_min: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    pairs: usize,
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    #[arg(long, default_value_t = 0.05)]
    dp: f64,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

enum Status {
    Ok,
    GateFailed,
}

type CliResult = Result<Status, Box<dyn std::error::Error>>;

fn simulate(args: SimulateArgs) -> CliResult {
    let mut out = io::stdout().lock();
    let mut cfg = ExperimentConfig {
        ns: vec![args.n],
        seeds: SeedSpec::List(vec![args.seed]),
        snapshot_dp: args.snapshot_dp,
        permutation_at_p: args.permutation_at,
        certify_at_p: args.certify_at,
        stop_below_p: args.stop_below,
        ..Default::default()
    };
    if let Some(k) = args.pair_sample {
        cfg.pair_sample = k;
    }
    cfg.validate()?;
    let result = run(args.n, args.seed, &cfg.run_config(args.n))?;
    if let Some(path) = args.csv {
        let mut text = format!("{CSV_HEADER}\n");
        for s in &result.snapshots {
            text.push_str(&csv_row(s));
            text.push('\n');
        }
        fs::write(&path, text)?;
    }
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        config: cfg,
        result,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
    Ok(Status::Ok)
}

fn ensemble(config: PathBuf, overrides: Vec<String>) -> CliResult {
    let mut out = io::stdout().lock();
    let mut cfg = ExperimentConfig::load(&config)?;
    for o in &overrides {
        cfg.apply_override(o)?;
    }
    cfg.validate()?;
    let done = run_experiment(&cfg)?;
    writeln!(
        out,
        "{:>7} {:>5} {:>12} {:>10} {:>8} {:>8}",
        "n", "runs", "mean_edges", "sd", "min", "max"
    )?;
    for s in &done.aggregate.sizes {
        writeln!(
            out,
            "{:>7} {:>5} {:>12.2} {:>10.2} {:>8} {:>8}",
            s.n, s.runs, s.mean_final_edges, s.sd_final_edges, s.min_final_edges, s.max_final_edges
        )?;
    }
    if let Some(fit) = done.aggregate.fit {
        writeln!(
            out,
            "slope {:.4}  intercept {:.4}  r2 {:.4}",
            fit.slope, fit.intercept, fit.r2
        )?;
    }
    writeln!(out, "wrote {}", done.aggregate_file.display())?;
    Ok(Status::Ok)
}

fn ladders(m: usize, list: bool, classify: bool) -> CliResult {
    let mut out = io::stdout().lock();
    let words = enumerate_bm(m)?;
    let mut totals = [0usize; 4];
    for w in &words {
        let ladder = build_ladder(w)?;
        let classes = classify_all(w, m)?;
        for (_, c) in &classes {
            totals[class_index(*c)] += 1;
        }
        if list {
            writeln!(out, "{w} v={} e={}", ladder.v(), ladder.edges().len())?;
        } else if classify {
            let parts: Vec<String> = classes.iter().map(|((y, z), c)| format!("{y}-{z}:{c}")).collect();
            writeln!(out, "{w} {}", parts.join(" "))?;
        }
    }
    writeln!(
        out,
        "M={m} words={} edges: initial={} interior={} side={} outer={}",
        words.len(),
        totals[0],
        totals[1],
        totals[2],
        totals[3]
    )?;
    Ok(Status::Ok)
}

fn class_index(c: EdgeClass) -> usize {
    match c {
        EdgeClass::Initial => 0,
        EdgeClass::Interior => 1,
        EdgeClass::SideBoundary => 2,
        EdgeClass::OuterBoundary => 3,
    }
}

fn verify_balance(m: usize) -> CliResult {
    let mut out = io::stdout().lock();
    let words = enumerate_bm(m)?;
    let target = Ratio::new(2 * m as i64 - 1, m as i64 - 1);
    let (mut checked, mut bad) = (0, 0);
    for w in words {
        for ((y, z), c) in classify_all(&w, m)? {
            if c != EdgeClass::OuterBoundary {
                continue;
            }
            let b = backward_extension(&w, y, z, m)?;
            let density = b.density()?;
            checked += 1;
            if !b.is_balanced(false)? || density != target {
                bad += 1;
                writeln!(
                    out,
                    "{w} ({y},{z}): density {density}, balanced {}",
                    b.is_balanced(false)?
                )?;
            }
        }
    }
    writeln!(
        out,
        "M={m}: {checked} backward extensions, {bad} failures, target density {target}"
    )?;
    Ok(if bad == 0 { Status::Ok } else { Status::GateFailed })
}

fn hom_audit(args: AuditArgs) -> CliResult {
    let mut out = io::stdout().lock();
    let cfg = AuditConfig {
        n: args.n,
        seed: args.seed,
        m: args.m,
        p_min: args.p_min,
        max_len: args.max_len,
        pairs: args.pairs,
        dp: args.dp,
    };
    let report = concentration_audit(&cfg)?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        let worst = report.entries.iter().max_by(|a, b| a.max_ratio.total_cmp(&b.max_ratio));
        writeln!(
            out,
            "entries {}  max ratio {:.6}  exceedances {}",
            report.entries.len(),
            report.max_ratio,
            report.exceedances
        )?;
        if let Some(e) = worst {
            writeln!(
                out,
                "worst: word {} at p={:.3}, pair {:?}, |X|={:.3}",
                e.word, e.p, e.argmax_pair, e.max_abs_x
            )?;
        }
    }
    Ok(if report.exceedances == 0 {
        Status::Ok
    } else {
        Status::GateFailed
    })
}

fn exponent_fit(input: PathBuf, min_slope: f64, max_slope: f64, min_r2: f64) -> CliResult {
    let mut out = io::stdout().lock();
    let points = read_fit_input(&input)?;
    let fit = fit_exponent(&points)?;
    writeln!(
        out,
        "slope {:.4}  intercept {:.4}  r2 {:.4}  points {}",
        fit.slope,
        fit.intercept,
        fit.r2,
        points.len()
    )?;
    let pass = (min_slope..=max_slope).contains(&fit.slope) && fit.r2 >= min_r2;
    writeln!(
        out,
        "gate slope in [{min_slope}, {max_slope}], r2 >= {min_r2}: {}",
        if pass { "PASS" } else { "FAIL" }
    )?;
    Ok(if pass { Status::Ok } else { Status::GateFailed })
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Ensemble { config, overrides } => ensemble(config, overrides),
        Command::Ladders { m, list, classify } => ladders(m, list, classify),
        Command::VerifyBalance { m } => verify_balance(m),
        Command::HomAudit(args) => hom_audit(args),
        Command::ExponentFit {
            input,
            min_slope,
            max_slope,
            min_r2,
        } => exponent_fit(input, min_slope, max_slope, min_r2),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::GateFailed) => ExitCode::from(2),
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
