//! `run`, `compare` and `sweep`.
//!
//! Output files (all CSVs start with a header row, fields in this order):
//!
//! * `trace.csv`: iteration, strategy, x_norm, y_norm, x_cm, y_cm,
//!   raw_height_cm, on_surface, cumulative_on_surface
//! * `metrics.csv`: strategy, seed, n_taps, n_on_surface, on_surface_ratio,
//!   final_rmse_cm, final_mean_variance, stopped_early
//! * `variance_curve.csv`: iteration, mean_variance
//! * `compare.csv`: seed, on_surface_weighted, on_surface_uncertainty,
//!   improvement, followed by one `mean` row
//! * `compare_summary.csv`: statistic, value
//! * sweep `metrics.csv`: sweep_key, sweep_value, is_default, then the
//!   `metrics.csv` columns
//!
//! Heatmaps under `heatmaps/` are headerless `resolution × resolution` grids
//! with the `y = 1` edge on the first line.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use tapgp_core::env::Scene;
use tapgp_core::explorer::{run_with_state, RunConfig, RunTrace, Strategy};
use tapgp_core::metrics::{effective_tap_improvement, TraceMetrics};
use tapgp_core::surface::ExplorationState;
use tapgp_core::{CandidateGrid, Error};

use crate::config::{is_default, ExperimentConfig};
use crate::format::g9;
use crate::heatmap;
use crate::CliError;

pub const IMPROVEMENT_READING: &str =
    "improvement = (on_surface_weighted - on_surface_uncertainty) / n_taps";

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Replaces `[output] output_dir`.
    pub output_dir: Option<PathBuf>,
    pub quiet: bool,
}

/// Files written by one command; removed again if the command fails.
struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
    new_dirs: Vec<PathBuf>,
}

impl Outputs {
    fn create(dir: &Path) -> Result<Self, CliError> {
        let mut out = Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            new_dirs: Vec::new(),
        };
        out.ensure_dir(dir)?;
        Ok(out)
    }

    fn ensure_dir(&mut self, dir: &Path) -> Result<(), CliError> {
        let mut missing = Vec::new();
        let mut cur = Some(dir);
        while let Some(d) = cur {
            if d.as_os_str().is_empty() || d.exists() {
                break;
            }
            missing.push(d.to_path_buf());
            cur = d.parent();
        }
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        missing.reverse();
        self.new_dirs.extend(missing);
        Ok(())
    }

    fn write(
        &mut self,
        rel: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            let parent = parent.to_path_buf();
            self.ensure_dir(&parent)?;
        }
        let wrap = |source| CliError::Write {
            path: path.clone(),
            source,
        };
        let file = File::create(&path).map_err(wrap)?;
        self.files.push(path.clone());
        let mut w = BufWriter::new(file);
        body(&mut w).map_err(wrap)?;
        w.flush().map_err(wrap)
    }

    fn discard(self) {
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        for d in self.new_dirs.iter().rev() {
            let _ = fs::remove_dir(d);
        }
    }
}

fn with_outputs<T>(
    dir: &Path,
    f: impl FnOnce(&mut Outputs) -> Result<T, CliError>,
) -> Result<T, CliError> {
    let mut out = Outputs::create(dir)?;
    match f(&mut out) {
        Ok(v) => Ok(v),
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

fn output_dir(cfg: &ExperimentConfig, opts: &Options) -> PathBuf {
    opts.output_dir
        .clone()
        .unwrap_or_else(|| cfg.output.output_dir.clone())
}

/// Exhausting the grid is a normal way for a run to end; anything else is not.
fn check_stop(trace: &RunTrace) -> Result<(), CliError> {
    match &trace.stopped_early {
        None | Some(Error::ExhaustedGrid) => Ok(()),
        Some(e) => Err(CliError::Run(e.clone())),
    }
}

struct Evaluated {
    trace: RunTrace,
    metrics: TraceMetrics,
    final_mean_variance: f64,
}

fn evaluate(run: RunConfig, scene: &Scene, eval_resolution: usize) -> Result<Evaluated, CliError> {
    let (trace, state) = run_with_state(run, scene)?;
    check_stop(&trace)?;
    let eval = CandidateGrid::new(eval_resolution)?;
    let metrics = TraceMetrics::compute(&trace, &state, scene, &eval)?;
    Ok(Evaluated {
        final_mean_variance: mean_variance(&state),
        trace,
        metrics,
    })
}

fn mean_variance(state: &ExplorationState) -> f64 {
    let u = state.uncertainty_map(state.grid());
    u.iter().sum::<f64>() / u.len() as f64
}

const METRICS_HEADER: &str =
    "strategy,seed,n_taps,n_on_surface,on_surface_ratio,final_rmse_cm,final_mean_variance,stopped_early";

fn metrics_fields(e: &Evaluated) -> String {
    let stop = match &e.trace.stopped_early {
        None => String::new(),
        Some(Error::ExhaustedGrid) => "exhausted_grid".into(),
        Some(other) => format!("\"{other}\""),
    };
    format!(
        "{},{},{},{},{},{},{},{}",
        e.trace.config.strategy,
        e.trace.config.seed,
        e.metrics.n_taps,
        e.metrics.n_on_surface,
        g9(e.metrics.on_surface_ratio),
        g9(e.metrics.final_rmse_cm),
        g9(e.final_mean_variance),
        stop
    )
}

fn write_trace(w: &mut impl Write, trace: &RunTrace, scene: &Scene) -> io::Result<()> {
    writeln!(
        w,
        "iteration,strategy,x_norm,y_norm,x_cm,y_cm,raw_height_cm,on_surface,cumulative_on_surface"
    )?;
    for r in &trace.records {
        let (x_cm, y_cm) = scene.to_cm(r.position);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.iteration,
            trace.config.strategy,
            g9(r.position.x),
            g9(r.position.y),
            g9(x_cm),
            g9(y_cm),
            g9(r.result.raw_height_cm),
            u8::from(r.result.on_surface),
            r.cumulative_on_surface
        )?;
    }
    Ok(())
}

fn write_run_info(w: &mut impl Write, cfg: &ExperimentConfig, trace: &RunTrace) -> io::Result<()> {
    let run = &trace.config;
    writeln!(w, "scene: {}", cfg.scene.describe())?;
    writeln!(w, "rng: {}", trace.rng)?;
    writeln!(w, "strategy: {}", run.strategy)?;
    writeln!(w, "seed: {}", run.seed)?;
    writeln!(
        w,
        "budget: {} (initial random: {})",
        run.budget, run.n_initial_random
    )?;
    writeln!(w, "grid_resolution: {}", run.grid_resolution)?;
    for (name, k) in [
        ("surface", run.surface_kernel),
        ("weight", run.weight_kernel),
    ] {
        writeln!(
            w,
            "{name} kernel: lengthscale_sq {}, noise_var {}, prior_mean {}",
            g9(k.lengthscale_sq),
            g9(k.noise_var),
            g9(k.prior_mean)
        )?;
    }
    writeln!(
        w,
        "desk_taps_in_surface_gp: {}",
        run.desk_taps_in_surface_gp
    )?;
    writeln!(w, "eval_resolution: {}", cfg.eval_resolution)?;
    if let Some(e) = &trace.stopped_early {
        writeln!(w, "stopped early: {e}")?;
    }
    Ok(())
}

/// Result of `run`.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub metrics: TraceMetrics,
    pub heatmap_files: usize,
}

pub fn cmd_run(config_path: &Path, opts: &Options) -> Result<RunSummary, CliError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let run = RunConfig {
        snapshot_every: Some(1),
        ..cfg.run
    };
    let evaluated = evaluate(run, &cfg.scene, cfg.eval_resolution)?;
    let dir = output_dir(&cfg, opts);
    let heatmap_files = with_outputs(&dir, |out| {
        let trace = &evaluated.trace;
        out.write("trace.csv", |w| write_trace(w, trace, &cfg.scene))?;
        out.write("metrics.csv", |w| {
            writeln!(w, "{METRICS_HEADER}")?;
            writeln!(w, "{}", metrics_fields(&evaluated))
        })?;
        out.write("variance_curve.csv", |w| {
            writeln!(w, "iteration,mean_variance")?;
            for (i, v) in evaluated.metrics.mean_variance_curve.iter().enumerate() {
                writeln!(w, "{i},{}", g9(*v))?;
            }
            Ok(())
        })?;
        out.write("run_info.txt", |w| write_run_info(w, &cfg, trace))?;
        let mut count = 0;
        if let Some(every) = cfg.output.snapshot_every {
            let res = run.grid_resolution;
            for snap in trace.snapshots.iter().filter(|s| s.iteration % every == 0) {
                let fields: [(&str, &[f64]); 4] = [
                    ("uncertainty", &snap.uncertainty),
                    ("weight", &snap.weight),
                    ("exploration", &snap.exploration),
                    ("mean", &snap.posterior_mean),
                ];
                for (name, field) in fields {
                    let stem = format!("heatmaps/iter_{:03}_{name}", snap.iteration);
                    out.write(&format!("{stem}.csv"), |w| {
                        heatmap::write_csv(w, field, res)
                    })?;
                    count += 1;
                    if cfg.output.emit_pgm {
                        out.write(&format!("{stem}.pgm"), |w| {
                            heatmap::write_pgm(w, field, res)
                        })?;
                    }
                }
            }
        }
        Ok(count)
    })?;
    if !opts.quiet {
        let m = &evaluated.metrics;
        println!(
            "{} seed {}: {}/{} taps on surface (ratio {}), surface RMSE {} cm -> {}",
            run.strategy,
            run.seed,
            m.n_on_surface,
            m.n_taps,
            g9(m.on_surface_ratio),
            g9(m.final_rmse_cm),
            dir.display()
        );
    }
    Ok(RunSummary {
        metrics: evaluated.metrics,
        heatmap_files,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub seed: u64,
    pub on_surface_weighted: usize,
    pub on_surface_uncertainty: usize,
    pub n_taps: usize,
    pub improvement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareSummary {
    pub rows: Vec<CompareRow>,
    pub mean_improvement: f64,
    pub min_improvement: f64,
    pub max_improvement: f64,
    pub mean_ratio_weighted: f64,
    pub mean_ratio_uncertainty: f64,
}

/// Paired-seed comparison of weighted exploration against uncertainty-only
/// tapping. Pure: writes nothing.
pub fn compare(cfg: &ExperimentConfig) -> Result<CompareSummary, CliError> {
    let rows: Vec<CompareRow> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let base = cfg.run.with_seed(seed);
            let (w, _) = run_with_state(
                base.with_strategy(Strategy::WeightedExploration),
                &cfg.scene,
            )?;
            let (u, _) = run_with_state(base.with_strategy(Strategy::UncertaintyOnly), &cfg.scene)?;
            check_stop(&w)?;
            check_stop(&u)?;
            Ok(CompareRow {
                seed,
                on_surface_weighted: w.n_on_surface(),
                on_surface_uncertainty: u.n_on_surface(),
                n_taps: w.n_taps(),
                improvement: effective_tap_improvement(&w, &u)?,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let n = rows.len() as f64;
    let imps = rows.iter().map(|r| r.improvement);
    Ok(CompareSummary {
        mean_improvement: imps.clone().sum::<f64>() / n,
        min_improvement: imps.clone().fold(f64::INFINITY, f64::min),
        max_improvement: imps.fold(f64::NEG_INFINITY, f64::max),
        mean_ratio_weighted: rows
            .iter()
            .map(|r| r.on_surface_weighted as f64 / r.n_taps as f64)
            .sum::<f64>()
            / n,
        mean_ratio_uncertainty: rows
            .iter()
            .map(|r| r.on_surface_uncertainty as f64 / r.n_taps as f64)
            .sum::<f64>()
            / n,
        rows,
    })
}

pub fn cmd_compare(config_path: &Path, opts: &Options) -> Result<CompareSummary, CliError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let summary = compare(&cfg)?;
    let dir = output_dir(&cfg, opts);
    with_outputs(&dir, |out| {
        out.write("compare.csv", |w| {
            writeln!(
                w,
                "seed,on_surface_weighted,on_surface_uncertainty,improvement"
            )?;
            for r in &summary.rows {
                writeln!(
                    w,
                    "{},{},{},{}",
                    r.seed,
                    r.on_surface_weighted,
                    r.on_surface_uncertainty,
                    g9(r.improvement)
                )?;
            }
            let n = summary.rows.len() as f64;
            let mean_w = summary
                .rows
                .iter()
                .map(|r| r.on_surface_weighted)
                .sum::<usize>() as f64
                / n;
            let mean_u = summary
                .rows
                .iter()
                .map(|r| r.on_surface_uncertainty)
                .sum::<usize>() as f64
                / n;
            writeln!(
                w,
                "mean,{},{},{}",
                g9(mean_w),
                g9(mean_u),
                g9(summary.mean_improvement)
            )
        })?;
        out.write("compare_summary.csv", |w| {
            writeln!(w, "statistic,value")?;
            writeln!(w, "seeds,{}", summary.rows.len())?;
            writeln!(w, "mean_improvement,{}", g9(summary.mean_improvement))?;
            writeln!(w, "min_improvement,{}", g9(summary.min_improvement))?;
            writeln!(w, "max_improvement,{}", g9(summary.max_improvement))?;
            writeln!(w, "mean_ratio_weighted,{}", g9(summary.mean_ratio_weighted))?;
            writeln!(
                w,
                "mean_ratio_uncertainty,{}",
                g9(summary.mean_ratio_uncertainty)
            )?;
            writeln!(w, "definition,\"{IMPROVEMENT_READING}\"")
        })
    })?;
    if !opts.quiet {
        println!(
            "{} seeds, scene: {}",
            summary.rows.len(),
            cfg.scene.describe()
        );
        println!(
            "mean on-surface ratio: weighted {}, uncertainty-only {}",
            g9(summary.mean_ratio_weighted),
            g9(summary.mean_ratio_uncertainty)
        );
        println!(
            "effective-tap improvement: mean {:.1}% (min {:.1}%, max {:.1}%)",
            100.0 * summary.mean_improvement,
            100.0 * summary.min_improvement,
            100.0 * summary.max_improvement
        );
        println!("  {IMPROVEMENT_READING}");
        println!("  -> {}", dir.join("compare.csv").display());
    }
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: String,
    pub is_default: bool,
    pub metrics: TraceMetrics,
}

pub fn cmd_sweep(config_path: &Path, opts: &Options) -> Result<Vec<SweepRow>, CliError> {
    let cfg = ExperimentConfig::load(config_path)?;
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| CliError::config("config has no [sweep] section"))?;
    let mut cells = Vec::new();
    for value in &sweep.values {
        let cell = cfg.with_override(&sweep.key, value)?;
        for &seed in &cell.seeds {
            cells.push((value.clone(), cell.clone(), seed));
        }
    }
    let results: Vec<(String, Evaluated)> = cells
        .par_iter()
        .map(|(value, cell, seed)| {
            let e = evaluate(cell.run.with_seed(*seed), &cell.scene, cell.eval_resolution)?;
            Ok((value.clone(), e))
        })
        .collect::<Result<_, CliError>>()?;
    let dir = output_dir(&cfg, opts);
    with_outputs(&dir, |out| {
        out.write("metrics.csv", |w| {
            writeln!(w, "sweep_key,sweep_value,is_default,{METRICS_HEADER}")?;
            for (value, e) in &results {
                writeln!(
                    w,
                    "{},{},{},{}",
                    sweep.key,
                    value,
                    u8::from(is_default(&sweep.key, value)),
                    metrics_fields(e)
                )?;
            }
            Ok(())
        })
    })?;
    if !opts.quiet {
        for (value, e) in &results {
            let tag = if is_default(&sweep.key, value) {
                " (default)"
            } else {
                ""
            };
            println!(
                "{} = {value}{tag}, seed {}: {}/{} on surface, RMSE {} cm",
                sweep.key,
                e.trace.config.seed,
                e.metrics.n_on_surface,
                e.metrics.n_taps,
                g9(e.metrics.final_rmse_cm)
            );
        }
    }
    Ok(results
        .into_iter()
        .map(|(value, e)| SweepRow {
            is_default: is_default(&sweep.key, &value),
            value,
            metrics: e.metrics,
        })
        .collect())
}
