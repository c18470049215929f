use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use refqd::engine::{self, EngineConfig};
use refqd::error::{Error, Result};
use refqd::io::{
    load_config, load_snapshot, read_log, snapshot_archive, write_log, write_plot, LoadedRun,
    Snapshot,
};
use refqd::tasks::Task;
use refqd::variation::OperatorMix;
use refqd::Real;

#[derive(Parser)]
#[command(
    name = "refqd",
    version,
    about = "Quality-diversity optimization with a shared representation and a deep decision archive"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write log.csv + snapshot.json into --out.
    Run {
        /// Config file (TOML with [task] and [engine] sections).
        #[arg(long)]
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-score a snapshot's top levels against its stored representation
    /// and report how far the recorded fitness values had drifted.
    Reeval {
        #[arg(long)]
        snapshot: PathBuf,
        /// Config that produced the snapshot; names the task to rebuild.
        #[arg(long)]
        config: PathBuf,
        /// Where to write the re-scored snapshot (optional).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the metrics recorded in a snapshot.
    Metrics {
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Draw QD-Score / Coverage / Max Fitness charts from a run log.
    Plot {
        #[arg(long)]
        log: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one config across a parameter grid and several seeds, then print
    /// a median summary table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Swept knob and its values, e.g. "K=1,2,4". Knobs: K (archive
        /// levels), T_r (re-evaluation period), k (re-evaluated levels),
        /// N (batch size), T (generations), ga_fraction.
        #[arg(long)]
        param: String,
        /// Seeds per value: base seed, base+1, ...
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Overrides the base seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed } => cmd_run(&config, &out, seed),
        Command::Reeval {
            snapshot,
            config,
            out,
        } => cmd_reeval(&snapshot, &config, out.as_deref()),
        Command::Metrics { snapshot } => cmd_metrics(&snapshot),
        Command::Plot { log, out } => cmd_plot(&log, &out),
        Command::Sweep {
            config,
            param,
            seeds,
            seed,
            out,
        } => cmd_sweep(&config, &param, seeds, seed, out.as_deref()),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(if e.is_validation() { 1 } else { 2 });
    }
}

fn cmd_run(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<()> {
    let LoadedRun { config, task } = load_config(config_path, seed)?;
    std::fs::create_dir_all(out_dir)?;
    let output = engine::run_with_observer(&config, task.as_ref(), |event| {
        println!(
            "[gen {}] re-evaluation touched {} slots",
            event.counter - 1,
            event.touched
        );
    })?;

    let log_path = out_dir.join("log.csv");
    write_log(&output.history, &log_path)?;
    let snapshot = Snapshot {
        task_name: task.name().to_string(),
        seed: config.seed,
        shared: config.algorithm.shares_representation(),
        fitness_offset: task.fitness_offset(),
        archive: output.state.archive.clone(),
        representation: output.state.representation.clone(),
    };
    let snap_path = out_dir.join("snapshot.json");
    snapshot_archive(&snapshot, &snap_path)?;

    let report = engine::resource_report(&output.state, &config, task.as_ref());
    let metrics = output.state.archive.metrics(task.fitness_offset());
    println!(
        "{} on {}: {} generations, {} evaluations",
        config.algorithm.name(),
        task.name(),
        config.generations,
        output.state.evaluations
    );
    println!("  qd-score      {:.6}", metrics.qd_score);
    println!(
        "  coverage      {:.4} ({}/{} cells)",
        metrics.coverage,
        output.state.archive.occupied_level1(),
        output.state.archive.grid().cell_count()
    );
    match metrics.max_fitness {
        Some(f) => println!("  max fitness   {f:.6}"),
        None => println!("  max fitness   none (empty archive)"),
    }
    println!(
        "  compression   {:.6} ({} archive params vs {} full-genome)",
        report.compression_ratio, report.archive_params, report.baseline_archive_params
    );
    println!("wrote {} and {}", log_path.display(), snap_path.display());
    Ok(())
}

fn cmd_reeval(snapshot_path: &Path, config_path: &Path, out: Option<&Path>) -> Result<()> {
    let mut snapshot = load_snapshot(snapshot_path)?;
    // Rebuild the task with the snapshot's seed so stochastic task state
    // (the context vector) matches the run that wrote the file.
    let LoadedRun { config, task } = load_config(config_path, Some(snapshot.seed))?;
    check_snapshot_matches(&snapshot, &config, task.as_ref())?;

    let offset = snapshot.fitness_offset;
    let before = snapshot.archive.metrics(offset);
    let deltas = engine::mismatch_deltas(
        &snapshot.archive,
        &snapshot.representation,
        task.as_ref(),
        snapshot.shared,
        config.reeval_top_k,
    )?;

    let mut by_magnitude: Vec<_> = deltas.iter().collect();
    by_magnitude.sort_by(|a, b| {
        b.delta()
            .abs()
            .partial_cmp(&a.delta().abs())
            .expect("finite deltas")
    });
    println!("{:>6} {:>6} {:>16} {:>16} {:>12}", "cell", "level", "recorded", "fresh", "delta");
    for d in by_magnitude.iter().take(20) {
        println!(
            "{:>6} {:>6} {:>16.8} {:>16.8} {:>12.3e}",
            d.cell,
            d.level,
            d.recorded,
            d.fresh,
            d.delta()
        );
    }
    if by_magnitude.len() > 20 {
        println!("  ... {} more slots", by_magnitude.len() - 20);
    }
    let drifted = deltas.iter().filter(|d| d.delta().abs() > 1e-6).count();
    let max_drift = deltas.iter().map(|d| d.delta().abs()).fold(0.0, f64::max);
    let mean_delta = if deltas.is_empty() {
        0.0
    } else {
        deltas.iter().map(|d| d.delta()).sum::<f64>() / deltas.len() as f64
    };
    println!(
        "{} slots probed, {} drifted beyond 1e-6 (max |delta| {:.3e}, mean delta {:.3e})",
        deltas.len(),
        drifted,
        max_drift,
        mean_delta
    );

    let touched = engine::reevaluate(
        &mut snapshot.archive,
        &snapshot.representation,
        task.as_ref(),
        config.reeval_top_k,
        snapshot.shared,
    )?;
    let after = snapshot.archive.metrics(offset);
    println!("re-scored {touched} slots");
    println!(
        "qd-score {:.6} -> {:.6}, coverage {:.4} -> {:.4}",
        before.qd_score, after.qd_score, before.coverage, after.coverage
    );
    if let Some(path) = out {
        snapshot_archive(&snapshot, path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn check_snapshot_matches(
    snapshot: &Snapshot,
    config: &EngineConfig<Real>,
    task: &dyn Task<Real>,
) -> Result<()> {
    if snapshot.task_name != task.name() {
        return Err(Error::config(format!(
            "snapshot was produced by task {:?} but the config names {:?}",
            snapshot.task_name,
            task.name()
        )));
    }
    if snapshot.shared != config.algorithm.shares_representation() {
        return Err(Error::config(format!(
            "snapshot {} a shared representation but algorithm {} {}",
            if snapshot.shared { "keeps" } else { "does not keep" },
            config.algorithm.name(),
            if config.algorithm.shares_representation() {
                "expects one"
            } else {
                "does not"
            }
        )));
    }
    let layout = task.layout();
    let expected_rep = if snapshot.shared { layout.rep_len() } else { 0 };
    if snapshot.representation.len() != expected_rep {
        return Err(Error::config(format!(
            "snapshot representation has {} parameters but the configured task needs {}",
            snapshot.representation.len(),
            expected_rep
        )));
    }
    let expected_dec = if snapshot.shared {
        layout.dec_len()
    } else {
        layout.full_len()
    };
    if let Some((cell, _, slot)) = snapshot.archive.slots().next() {
        if slot.decision.len() != expected_dec {
            return Err(Error::config(format!(
                "snapshot slots hold {} parameters (cell {cell}) but the configured task needs {}",
                slot.decision.len(),
                expected_dec
            )));
        }
    }
    Ok(())
}

fn cmd_metrics(snapshot_path: &Path) -> Result<()> {
    let snapshot = load_snapshot(snapshot_path)?;
    let archive = &snapshot.archive;
    let metrics = archive.metrics(snapshot.fitness_offset);
    println!(
        "task          {} (seed {}, {})",
        snapshot.task_name,
        snapshot.seed,
        if snapshot.shared {
            "shared representation"
        } else {
            "full genomes"
        }
    );
    println!("levels        {}", archive.levels());
    println!(
        "occupied      {} of {} level-1 cells, {} slots across all levels",
        archive.occupied_level1(),
        archive.grid().cell_count(),
        archive.occupied_slots()
    );
    println!("qd-score      {:.6}", metrics.qd_score);
    println!("coverage      {:.4}", metrics.coverage);
    match metrics.max_fitness {
        Some(f) => println!("max fitness   {f:.6}"),
        None => println!("max fitness   none (empty archive)"),
    }
    Ok(())
}

fn cmd_plot(log_path: &Path, out: &Path) -> Result<()> {
    let records = read_log(log_path)?;
    write_plot(&records, out)?;
    println!("wrote {} ({} generations)", out.display(), records.len());
    Ok(())
}

struct SweepRow {
    label: String,
    qd: f64,
    coverage: f64,
    max_fitness: f64,
    deployed_qd: f64,
}

fn cmd_sweep(
    config_path: &Path,
    param: &str,
    seeds: u64,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<()> {
    if seeds == 0 {
        return Err(Error::config("sweep needs at least one seed"));
    }
    let (name, values) = parse_sweep_param(param)?;
    let base = load_config(config_path, seed)?;
    let base_seed = base.config.seed;

    let mut rows = Vec::new();
    for value in &values {
        let mut finals: Vec<(f64, f64, f64, f64)> = Vec::new();
        for i in 0..seeds {
            // Re-parse per seed so seed-dependent task state is rebuilt.
            let LoadedRun { mut config, task } = load_config(config_path, Some(base_seed + i))?;
            apply_sweep_value(&mut config, name, *value)?;
            config.validate_for(task.as_ref())?;
            let output = engine::run(&config, task.as_ref())?;
            let last = output
                .history
                .last()
                .ok_or_else(|| Error::config("sweep needs at least one generation"))?;
            let deployed = engine::deployment_metrics(
                &output.state.archive,
                &output.state.representation,
                task.as_ref(),
                config.algorithm.shares_representation(),
            )?;
            finals.push((
                last.qd_score,
                last.coverage,
                last.max_fitness.unwrap_or(f64::NAN),
                deployed.qd_score,
            ));
            println!(
                "{}={} seed {}: qd-score {:.4}, deployed {:.4}",
                name.label(),
                value,
                base_seed + i,
                last.qd_score,
                deployed.qd_score
            );
        }
        rows.push(SweepRow {
            label: format!("{}={}", name.label(), value),
            qd: median(finals.iter().map(|f| f.0).collect()),
            coverage: median(finals.iter().map(|f| f.1).collect()),
            max_fitness: median(finals.iter().map(|f| f.2).collect()),
            deployed_qd: median(finals.iter().map(|f| f.3).collect()),
        });
    }

    let table = render_sweep_table(&rows, seeds);
    print!("{table}");
    if let Some(path) = out {
        std::fs::write(path, &table)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum SweepKnob {
    Levels,
    ReevalPeriod,
    ReevalTopK,
    BatchSize,
    Generations,
    GaFraction,
}

impl SweepKnob {
    fn label(self) -> &'static str {
        match self {
            SweepKnob::Levels => "K",
            SweepKnob::ReevalPeriod => "T_r",
            SweepKnob::ReevalTopK => "k",
            SweepKnob::BatchSize => "N",
            SweepKnob::Generations => "T",
            SweepKnob::GaFraction => "ga_fraction",
        }
    }
}

fn parse_sweep_param(param: &str) -> Result<(SweepKnob, Vec<f64>)> {
    let (name, values) = param.split_once('=').ok_or_else(|| {
        Error::config(format!("--param must look like \"K=1,2,4\", got {param:?}"))
    })?;
    let knob = match name.trim() {
        "K" => SweepKnob::Levels,
        "T_r" => SweepKnob::ReevalPeriod,
        "k" => SweepKnob::ReevalTopK,
        "N" => SweepKnob::BatchSize,
        "T" => SweepKnob::Generations,
        "ga_fraction" => SweepKnob::GaFraction,
        other => {
            return Err(Error::config(format!(
                "unknown sweep knob {other:?}; expected K, T_r, k, N, T, or ga_fraction"
            )))
        }
    };
    let values: Vec<f64> = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("sweep value {v:?} is not a number")))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::config("sweep needs at least one value"));
    }
    if knob != SweepKnob::GaFraction {
        for &v in &values {
            if v.fract() != 0.0 || v < 0.0 {
                return Err(Error::config(format!(
                    "sweep values for {} must be non-negative integers, got {v}",
                    knob.label()
                )));
            }
        }
    }
    Ok((knob, values))
}

fn apply_sweep_value(config: &mut EngineConfig<Real>, knob: SweepKnob, value: f64) -> Result<()> {
    match knob {
        SweepKnob::Levels => config.dda_levels = value as usize,
        SweepKnob::ReevalPeriod => config.reeval_period = Some(value as usize),
        SweepKnob::ReevalTopK => config.reeval_top_k = value as usize,
        SweepKnob::BatchSize => config.batch_size = value as usize,
        SweepKnob::Generations => config.generations = value as usize,
        SweepKnob::GaFraction => config.mix = OperatorMix::new(value)?,
    }
    Ok(())
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn render_sweep_table(rows: &[SweepRow], seeds: u64) -> String {
    use std::fmt::Write as _;
    let label_w = rows
        .iter()
        .map(|r| r.label.len())
        .max()
        .unwrap_or(5)
        .max("param".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<label_w$}  {:>5}  {:>14}  {:>14}  {:>14}  {:>14}",
        "param", "seeds", "median qd", "median cov", "median maxfit", "deployed qd"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<label_w$}  {:>5}  {:>14.4}  {:>14.4}  {:>14.4}  {:>14.4}",
            r.label, seeds, r.qd, r.coverage, r.max_fitness, r.deployed_qd
        );
    }
    out
}
