//! `holowidths` — runs the convergence studies, width tables and the
//! impossibility demonstration, writing CSV tables and SVG charts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use holowidths_core::experiments::svg::{line_chart_loglog, Series};
use holowidths_core::experiments::{
    run_impossibility_demo, run_known_convergence, run_unknown_convergence, run_width_tables,
    ExperimentConfig, ExperimentError, Pipeline, RateFit, Table,
};

#[derive(Parser)]
#[command(name = "holowidths", about = "width bounds and sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Prints solver progress and per-step summaries.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Known-anisotropy convergence study.
    Known,
    /// Unknown-anisotropy (Gaussian sketch) convergence study.
    Unknown,
    /// Width table over the anisotropy families.
    Widths,
    /// Out-of-search-space impossibility demonstration.
    Impossibility,
    /// Small deterministic run of all four studies.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Honors `HOLOWIDTHS_THREADS` as a cap on the rayon work pool.
fn configure_threads() {
    if let Ok(v) = std::env::var("HOLOWIDTHS_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn run(cli: &Cli) -> Result<(), ExperimentError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_json(&fs::read_to_string(path)?)?,
        None => default_config(&cli.command),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    fs::create_dir_all(&cfg.output_dir)?;

    match cli.command {
        Command::Known => {
            cfg.pipeline = Pipeline::Known;
            run_known(&cfg, "known", cli.verbose)?;
        }
        Command::Unknown => {
            cfg.pipeline = Pipeline::Unknown;
            run_unknown(&cfg, "unknown", cli.verbose)?;
        }
        Command::Widths => {
            cfg.pipeline = Pipeline::Widths;
            run_widths(&cfg, "widths", cli.verbose)?;
        }
        Command::Impossibility => {
            cfg.pipeline = Pipeline::Impossibility;
            run_impossibility(&cfg, "impossibility", cli.verbose)?;
        }
        Command::Selftest => selftest(&cfg, cli.verbose)?,
    }
    Ok(())
}

fn default_config(command: &Command) -> ExperimentConfig {
    let (pipeline, m_grid, dims, trials) = match command {
        Command::Known => (Pipeline::Known, vec![8, 16, 32, 64, 128, 256, 512], 10_000, 1),
        Command::Unknown => (Pipeline::Unknown, vec![16, 32, 64, 128, 256], 9, 10),
        Command::Widths => (Pipeline::Widths, vec![2, 4, 8, 16, 32, 64, 128, 256], 512, 1),
        Command::Impossibility | Command::Selftest => {
            (Pipeline::Impossibility, vec![16, 32, 64], 4, 5)
        }
    };
    ExperimentConfig {
        pipeline,
        m_grid,
        p_star: 0.5,
        k: 1,
        dims,
        trials,
        seed: 0,
        quad_order: 0,
        output_dir: PathBuf::from("out"),
        c_const: 1.0,
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), ExperimentError> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn write_table(dir: &Path, name: &str, table: &Table) -> Result<(), ExperimentError> {
    write(dir, name, &table.to_csv())
}

fn fit_summary(name: &str, fit: &RateFit, target: Option<f64>) -> String {
    let mut s = format!(
        "{name}: slope {:.4}, intercept {:.4}, r^2 {:.5}, points {}, excluded {}",
        fit.slope,
        fit.intercept,
        fit.r_squared,
        fit.points.len(),
        fit.excluded
    );
    if let Some(t) = target {
        s.push_str(&format!(" (target slope {t:.4})"));
    }
    s
}

fn run_known(cfg: &ExperimentConfig, stem: &str, verbose: bool) -> Result<RateFit, ExperimentError> {
    let run = run_known_convergence(cfg)?;
    write_table(&cfg.output_dir, &format!("{stem}.csv"), &run.table)?;
    let pts: Vec<(f64, f64)> = run.errors.iter().map(|&(m, e)| (m as f64, e)).collect();
    let chart = line_chart_loglog(
        "known-anisotropy convergence",
        "m",
        "L2 error",
        &[Series {
            name: "error",
            points: &pts,
        }],
    );
    write(&cfg.output_dir, &format!("{stem}.svg"), &chart)?;
    println!(
        "{}",
        fit_summary("known", &run.fit, Some(run.target_slope))
    );
    if verbose {
        for (m, e) in &run.errors {
            println!("  m = {m:>6}  error = {e:.6e}");
        }
    }
    Ok(run.fit)
}

fn run_unknown(cfg: &ExperimentConfig, stem: &str, verbose: bool) -> Result<(), ExperimentError> {
    let run = run_unknown_convergence(cfg)?;
    write_table(&cfg.output_dir, &format!("{stem}_trials.csv"), &run.trials_table)?;
    write_table(&cfg.output_dir, &format!("{stem}_summary.csv"), &run.summary_table)?;
    let chart = line_chart_loglog(
        "unknown-anisotropy convergence",
        "m / log^2(m)",
        "mean L2 error",
        &[Series {
            name: "mean error",
            points: &run.mean_points,
        }],
    );
    write(&cfg.output_dir, &format!("{stem}.svg"), &chart)?;
    println!("{}", fit_summary("unknown vs m/log^2(m)", &run.fit_effective, None));
    println!("{}", fit_summary("unknown vs m", &run.fit_m, None));
    if verbose {
        for (x, e) in &run.mean_points {
            println!("  m/log^2(m) = {x:>10.4}  mean error = {e:.6e}");
        }
    }
    Ok(())
}

fn run_widths(cfg: &ExperimentConfig, stem: &str, verbose: bool) -> Result<(), ExperimentError> {
    // a quick known-anisotropy fit supplies the empirical upper constant
    let known_cfg = ExperimentConfig {
        pipeline: Pipeline::Known,
        m_grid: vec![8, 16, 32, 64, 128],
        ..cfg.clone()
    };
    let known_fit = run_known_convergence(&known_cfg).ok().map(|r| r.fit);
    let table = run_width_tables(cfg, known_fit.as_ref())?;
    write_table(&cfg.output_dir, &format!("{stem}.csv"), &table)?;
    println!("widths: {} rows over {} m-values", table.rows.len(), cfg.m_grid.len());
    if verbose {
        println!("{}", table.to_csv());
    }
    Ok(())
}

fn run_impossibility(
    cfg: &ExperimentConfig,
    stem: &str,
    verbose: bool,
) -> Result<(), ExperimentError> {
    let run = run_impossibility_demo(cfg)?;
    write_table(&cfg.output_dir, &format!("{stem}.csv"), &run.table)?;
    println!(
        "impossibility: max |error - ||f||| = {:.3e}, out/in ratio at largest m = {:.3e}",
        run.max_out_deviation, run.error_ratio_at_largest_m
    );
    if verbose {
        println!("{}", run.table.to_csv());
    }
    Ok(())
}

/// Small deterministic pass over all four studies; used by the release
/// checklist to confirm byte-stable outputs.
fn selftest(base: &ExperimentConfig, verbose: bool) -> Result<(), ExperimentError> {
    let dir = base.output_dir.clone();
    let known = ExperimentConfig {
        pipeline: Pipeline::Known,
        m_grid: vec![8, 16, 32, 64],
        dims: 2_000,
        trials: 1,
        ..base.clone()
    };
    run_known(&known, "selftest_known", verbose)?;

    let unknown = ExperimentConfig {
        pipeline: Pipeline::Unknown,
        m_grid: vec![16, 32, 64],
        dims: 4,
        trials: 3,
        ..base.clone()
    };
    run_unknown(&unknown, "selftest_unknown", verbose)?;

    let widths = ExperimentConfig {
        pipeline: Pipeline::Widths,
        m_grid: vec![4, 16, 64],
        dims: 512,
        ..base.clone()
    };
    let table = run_width_tables(&widths, None)?;
    write_table(&dir, "selftest_widths.csv", &table)?;

    let imposs = ExperimentConfig {
        pipeline: Pipeline::Impossibility,
        m_grid: vec![16, 32],
        dims: 4,
        trials: 3,
        ..base.clone()
    };
    let run = run_impossibility_demo(&imposs)?;
    write_table(&dir, "selftest_impossibility.csv", &run.table)?;
    println!("selftest complete: outputs in {}", dir.display());
    Ok(())
}
