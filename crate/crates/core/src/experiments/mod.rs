//! Experiment harness: convergence studies for the known- and
//! unknown-anisotropy pipelines, width tables, the impossibility
//! demonstration, and log-log rate fitting.
//!
//! Every run is a pure function of its configuration: trial seeds are
//! derived from the base seed by a splitmix chain, work items execute in
//! a rayon pool, and results are gathered and sorted before emission, so
//! thread scheduling never changes output bytes.

pub mod svg;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anisotropy::{make_algebraic_b, make_flat_b, make_log_b, SlowGrowth};
use crate::legendre::order_one_test_function;
use crate::multiindex::hyperbolic_cross;
use crate::recovery::{
    basis_pursuit_block, default_bp_max_iter, RecoveryError, DEFAULT_BP_TOL,
};
use crate::sampling::{hyperbolic_cross_order, unknown_sample, SamplingError};
use crate::sampling::{choose_set_known, known_reconstruct, known_sample};
use crate::widths::{
    discrete_width_chain, gelfand_lower_bound, measure_moments, theta_lower_bound_known,
    theta_lower_bound_unknown, Measure, WidthError,
};

#[derive(Error, Debug)]
pub enum ExperimentError {
    #[error("rate fit needs at least 3 points with positive errors, got {0}")]
    TooFewPoints(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    #[error(transparent)]
    Width(#[from] WidthError),
    #[error(transparent)]
    Legendre(#[from] crate::legendre::LegendreError),
    #[error(transparent)]
    Anisotropy(#[from] crate::anisotropy::AnisotropyError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Which study a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Known,
    Unknown,
    Widths,
    Impossibility,
}

/// Configuration shared by all studies; JSON-loadable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_pipeline")]
    pub pipeline: Pipeline,
    pub m_grid: Vec<usize>,
    #[serde(default = "default_p_star")]
    pub p_star: f64,
    #[serde(rename = "K", default = "default_k")]
    pub k: usize,
    #[serde(default = "default_dims")]
    pub dims: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Per-dimension quadrature order; 0 means the minimal exact order
    /// for the search space.
    #[serde(default)]
    pub quad_order: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_c_const")]
    pub c_const: f64,
}

fn default_pipeline() -> Pipeline {
    Pipeline::Known
}
fn default_p_star() -> f64 {
    0.5
}
fn default_k() -> usize {
    1
}
fn default_dims() -> usize {
    10_000
}
fn default_trials() -> usize {
    1
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_c_const() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: &str| Err(ExperimentError::InvalidConfig(msg.to_string()));
        if self.m_grid.is_empty() {
            return bad("m_grid must be nonempty");
        }
        if !self.m_grid.windows(2).all(|w| w[0] < w[1]) {
            return bad("m_grid must be strictly increasing");
        }
        if matches!(self.pipeline, Pipeline::Unknown | Pipeline::Impossibility)
            && self.m_grid[0] < 3
        {
            return bad("the sketch pipelines need every m >= 3");
        }
        if self.trials < 1 {
            return bad("trials must be >= 1");
        }
        if self.k < 1 {
            return bad("K must be >= 1");
        }
        if !(self.p_star > 0.0 && self.p_star < 1.0) {
            return bad("p_star must lie in (0,1)");
        }
        if !(self.c_const > 0.0) {
            return bad("c_const must be positive");
        }
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-work-item seed derivation.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base).wrapping_add(a)).wrapping_add(b))
}

/// A least-squares power-law fit on log-log axes.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// The points actually fitted.
    pub points: Vec<(f64, f64)>,
    /// Points dropped for nonpositive or nonfinite error.
    pub excluded: usize,
}

/// Ordinary least squares on `(log x, log y)`. Points with nonpositive
/// error are excluded (counted in `excluded`); at least 3 must remain.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit, ExperimentError> {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .copied()
        .collect();
    let excluded = points.len() - kept.len();
    if kept.len() < 3 {
        return Err(ExperimentError::TooFewPoints(kept.len()));
    }
    let n = kept.len() as f64;
    let (mx, my) = kept
        .iter()
        .fold((0.0, 0.0), |(ax, ay), (x, y)| (ax + x.ln(), ay + y.ln()));
    let (mx, my) = (mx / n, my / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &kept {
        let dx = x.ln() - mx;
        let dy = y.ln() - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy <= 1e-30 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        points: kept,
        excluded,
    })
}

/// A small deterministic CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Unit codomain vector `(1, 0, …, 0)` in `R^K`.
fn unit_codomain(k: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[0] = 1.0;
    v
}

/// Result of the known-anisotropy convergence study.
#[derive(Debug, Clone)]
pub struct KnownRun {
    pub table: Table,
    pub errors: Vec<(usize, f64)>,
    pub fit: RateFit,
    /// The limiting exponent `1/2 − 1/p` at `p → p_star`.
    pub target_slope: f64,
}

/// Deterministic coefficient sampling on the chosen anchored set for the
/// algebraic order-one family `c_i = b_i = i^{−1/p_star}`; the recorded
/// error is the Parseval tail of the coefficients outside the set.
pub fn run_known_convergence(cfg: &ExperimentConfig) -> Result<KnownRun, ExperimentError> {
    cfg.validate()?;
    let b = make_algebraic_b(cfg.p_star, 1.0, cfg.dims);
    let v = unit_codomain(cfg.k);
    let f = order_one_test_function(b.head(), &v, measure_moments(Measure::Uniform))?
        .with_anisotropy(b.clone())?;
    let truth = f.truth_coeffs().expect("order-one family carries truth");

    let mut table = Table::new(&["m", "set_size", "error"]);
    let mut errors = Vec::new();
    for &m in &cfg.m_grid {
        let set = choose_set_known(&b, m);
        let sampled = known_sample(&f, &set, cfg.quad_order.max(2))?;
        let reconstruction = known_reconstruct(&sampled);
        let err = reconstruction
            .truth_coeffs()
            .expect("reconstruction carries its coefficients")
            .l2_distance(truth);
        table.push(vec![m.to_string(), set.len().to_string(), fmt(err)]);
        errors.push((m, err));
    }
    let fit = fit_rate(
        &errors
            .iter()
            .map(|&(m, e)| (m as f64, e))
            .collect::<Vec<_>>(),
    )?;
    Ok(KnownRun {
        table,
        errors,
        fit,
        target_slope: 0.5 - 1.0 / cfg.p_star,
    })
}

/// One trial of the sketch pipeline: sample, solve basis pursuit, and
/// report the full `L²` error against the truth (recovery error inside
/// the search space plus the Parseval tail outside it).
fn unknown_trial(
    f: &crate::legendre::TestFunction,
    m: usize,
    seed: u64,
    quad_order: usize,
) -> Result<(f64, usize, bool), ExperimentError> {
    let (measurements, sketch, set) = unknown_sample(f, m, seed, quad_order)?;
    let sol = basis_pursuit_block(
        &sketch,
        &measurements,
        DEFAULT_BP_TOL,
        default_bp_max_iter(set.len()),
    )?;
    let recovered = sol.to_coefficients(&set)?;
    let err = recovered.l2_distance(f.truth_coeffs().expect("family carries truth"));
    Ok((err, sol.iterations, sol.converged))
}

/// Result of the unknown-anisotropy convergence study.
#[derive(Debug, Clone)]
pub struct UnknownRun {
    pub trials_table: Table,
    pub summary_table: Table,
    /// `(m/log²m, mean error)` pairs.
    pub mean_points: Vec<(f64, f64)>,
    pub fit_effective: RateFit,
    pub fit_m: RateFit,
}

/// Gaussian-sketch sampling and block basis pursuit over the trial grid;
/// the mean error per `m` is fitted against the effective sample count
/// `m/log²(m)` and against `m` itself.
pub fn run_unknown_convergence(cfg: &ExperimentConfig) -> Result<UnknownRun, ExperimentError> {
    cfg.validate()?;
    let b = make_algebraic_b(cfg.p_star, 1.0, cfg.dims);
    let v = unit_codomain(cfg.k);
    let f = order_one_test_function(b.head(), &v, measure_moments(Measure::Uniform))?
        .with_anisotropy(b)?;

    let work: Vec<(usize, usize)> = cfg
        .m_grid
        .iter()
        .flat_map(|&m| (0..cfg.trials).map(move |t| (m, t)))
        .collect();
    let mut results: Vec<(usize, usize, u64, f64, usize, bool)> = work
        .par_iter()
        .map(|&(m, t)| {
            let seed = derive_seed(cfg.seed, m as u64, t as u64);
            let (err, iters, conv) = unknown_trial(&f, m, seed, cfg.quad_order)?;
            Ok((m, t, seed, err, iters, conv))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    results.sort_by_key(|&(m, t, ..)| (m, t));

    let mut trials_table = Table::new(&[
        "m",
        "trial",
        "seed",
        "search_space",
        "error",
        "iterations",
        "converged",
    ]);
    for &(m, t, seed, err, iters, conv) in &results {
        let n = hyperbolic_cross(hyperbolic_cross_order(m)).len();
        trials_table.push(vec![
            m.to_string(),
            t.to_string(),
            seed.to_string(),
            n.to_string(),
            fmt(err),
            iters.to_string(),
            conv.to_string(),
        ]);
    }

    let mut summary_table = Table::new(&["m", "m_effective", "mean_error", "worst_error"]);
    let mut mean_points = Vec::new();
    let mut m_points = Vec::new();
    for &m in &cfg.m_grid {
        let errs: Vec<f64> = results
            .iter()
            .filter(|&&(mm, ..)| mm == m)
            .map(|&(.., err, _, _)| err)
            .collect();
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        let worst = errs.iter().copied().fold(0.0, f64::max);
        let x = m as f64 / (m as f64).ln().powi(2);
        summary_table.push(vec![m.to_string(), fmt(x), fmt(mean), fmt(worst)]);
        mean_points.push((x, mean));
        m_points.push((m as f64, mean));
    }
    let fit_effective = fit_rate(&mean_points)?;
    let fit_m = fit_rate(&m_points)?;
    Ok(UnknownRun {
        trials_table,
        summary_table,
        mean_points,
        fit_effective,
        fit_m,
    })
}

/// Width-table study: the three anisotropy families against the closed
/// forms and lower bounds, plus the empirical constant of a convergence
/// fit when one is supplied.
pub fn run_width_tables(
    cfg: &ExperimentConfig,
    known_fit: Option<&RateFit>,
) -> Result<Table, ExperimentError> {
    cfg.validate()?;
    let moments = measure_moments(Measure::Uniform);
    let p = cfg.p_star;
    let log_b = make_log_b(p, SlowGrowth::LogSquared, 1000)?;
    let algebraic = make_algebraic_b(p, 1.0, cfg.dims.max(2 * cfg.m_grid.last().unwrap()));
    let empirical = known_fit.map(|f| f.intercept.exp());

    let mut table = Table::new(&[
        "m",
        "N",
        "p",
        "q",
        "family",
        "stesin",
        "gelfand_lb",
        "theta_lb_known",
        "theta_lb_unknown",
        "empirical_upper_c",
    ]);
    for &m in &cfg.m_grid {
        let flat = make_flat_b(m, p);
        let families: [(&str, &crate::anisotropy::AnisotropySequence); 3] = [
            ("flat", &flat),
            ("log", &log_b.sequence),
            ("algebraic", &algebraic),
        ];
        let n = 2 * m;
        for (name, b) in families {
            let stesin = discrete_width_chain(b, n, m)?;
            let gelfand = gelfand_lower_bound(n, m, p, 2.0)?;
            let theta_known = theta_lower_bound_known(b, m, moments)?;
            let theta_unknown = theta_lower_bound_unknown(p, moments)?;
            table.push(vec![
                m.to_string(),
                n.to_string(),
                fmt(p),
                fmt(2.0),
                name.to_string(),
                fmt(stesin),
                fmt(gelfand),
                fmt(theta_known),
                fmt(theta_unknown),
                empirical.map_or(String::new(), fmt),
            ]);
        }
    }
    Ok(table)
}

/// Result of the impossibility demonstration.
#[derive(Debug, Clone)]
pub struct ImpossibilityRun {
    pub table: Table,
    /// Largest deviation of the out-of-range error from `‖f‖_{L²}`.
    pub max_out_deviation: f64,
    /// Mean out-of-range error over mean in-range error at the largest m.
    pub error_ratio_at_largest_m: f64,
}

/// Runs the sketch pipeline on order-one functions whose single active
/// coordinate lies strictly beyond every dimension of the largest search
/// space. Their hyperbolic-cross coefficients all vanish, so the sketch
/// sees zero and the reconstruction error equals `‖f‖_{L²}` at every `m`;
/// an in-range control function recovers normally for contrast.
pub fn run_impossibility_demo(cfg: &ExperimentConfig) -> Result<ImpossibilityRun, ExperimentError> {
    cfg.validate()?;
    let m_max = *cfg.m_grid.last().unwrap();
    let n_max = hyperbolic_cross_order(m_max);
    let max_dim = n_max.saturating_sub(1).max(1);
    let v = unit_codomain(cfg.k);
    let moments = measure_moments(Measure::Uniform);

    let control = order_one_test_function(&[1.0], &v, moments)?;

    let work: Vec<(usize, usize)> = cfg
        .m_grid
        .iter()
        .flat_map(|&m| (0..cfg.trials).map(move |t| (m, t)))
        .collect();
    let mut results: Vec<(usize, usize, u32, f64, f64, f64, f64)> = work
        .par_iter()
        .map(|&(m, t)| {
            // active coordinate strictly beyond the largest search space
            let dim_draw = derive_seed(cfg.seed, 0x0DD, t as u64) % 16;
            let j = max_dim + 1 + dim_draw as usize;
            let mut c = vec![0.0; j];
            c[j - 1] = 1.0;
            let out_fn = order_one_test_function(&c, &v, moments)?;
            let out_norm = out_fn.l2_norm_from_truth().unwrap();
            let (out_err, _, _) =
                unknown_trial(&out_fn, m, derive_seed(cfg.seed, m as u64, t as u64), cfg.quad_order)?;
            let in_norm = control.l2_norm_from_truth().unwrap();
            let (in_err, _, _) = unknown_trial(
                &control,
                m,
                derive_seed(cfg.seed, m as u64, 0x1000 + t as u64),
                cfg.quad_order,
            )?;
            Ok((m, t, j as u32, out_err, out_norm, in_err, in_norm))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    results.sort_by_key(|&(m, t, ..)| (m, t));

    let mut table = Table::new(&["m", "trial", "kind", "active_dim", "error", "l2_norm"]);
    let mut max_dev = 0.0f64;
    let mut out_sum_last = 0.0;
    let mut in_sum_last = 0.0;
    for &(m, t, j, out_err, out_norm, in_err, in_norm) in &results {
        table.push(vec![
            m.to_string(),
            t.to_string(),
            "out_of_range".to_string(),
            j.to_string(),
            fmt(out_err),
            fmt(out_norm),
        ]);
        table.push(vec![
            m.to_string(),
            t.to_string(),
            "in_range".to_string(),
            "1".to_string(),
            fmt(in_err),
            fmt(in_norm),
        ]);
        max_dev = max_dev.max((out_err - out_norm).abs());
        if m == m_max {
            out_sum_last += out_err;
            in_sum_last += in_err;
        }
    }
    let ratio = out_sum_last / in_sum_last.max(f64::MIN_POSITIVE);
    Ok(ImpossibilityRun {
        table,
        max_out_deviation: max_dev,
        error_ratio_at_largest_m: ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_cfg(pipeline: Pipeline, m_grid: Vec<usize>) -> ExperimentConfig {
        ExperimentConfig {
            pipeline,
            m_grid,
            p_star: 0.5,
            k: 1,
            dims: 200,
            trials: 2,
            seed: 7,
            quad_order: 0,
            output_dir: PathBuf::from("out"),
            c_const: 1.0,
        }
    }

    #[test]
    fn fit_exact_power_law() {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0]
            .iter()
            .map(|&m: &f64| (m, m.powf(-1.5)))
            .collect();
        let fit = fit_rate(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, -1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert_eq!(fit.excluded, 0);
    }

    #[test]
    fn fit_constant_series() {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0].iter().map(|&m| (m, 7.0)).collect();
        let fit = fit_rate(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn fit_with_noise_and_exclusions() {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for (i, &m) in [4.0f64, 8.0, 16.0, 32.0, 64.0].iter().enumerate() {
            let noise = 1.0 + 0.01 * [0.4, -0.7, 0.2, 0.9, -0.3][i];
            pts.push((m, m.powf(-1.5) * noise));
        }
        pts.push((128.0, 0.0)); // excluded
        let fit = fit_rate(&pts).unwrap();
        assert_eq!(fit.excluded, 1);
        assert!((fit.slope + 1.5).abs() < 0.05, "slope {}", fit.slope);
        assert!(fit.points.len() == 5);
        assert!(matches!(
            fit_rate(&[(1.0, 1.0), (2.0, 0.5)]),
            Err(ExperimentError::TooFewPoints(2))
        ));
    }

    #[test]
    fn known_run_errors_are_tails_and_monotone() {
        let cfg = small_cfg(Pipeline::Known, vec![4, 8, 16, 32]);
        let run = run_known_convergence(&cfg).unwrap();
        // closed-form tail oracle for the order-one family
        for &(m, err) in &run.errors {
            let expect: f64 = ((m.min(cfg.dims + 1))..=cfg.dims)
                .map(|i| (i as f64).powf(-4.0))
                .sum::<f64>()
                .sqrt();
            assert_abs_diff_eq!(err, expect, epsilon = 1e-12);
        }
        for w in run.errors.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-15);
        }
        assert_abs_diff_eq!(run.target_slope, -1.5, epsilon = 1e-15);
        // full support captured once m exceeds dims
        let cfg = small_cfg(Pipeline::Known, vec![4, 8, 16, 201, 300]);
        let run = run_known_convergence(&cfg).unwrap();
        assert_eq!(run.errors[3].1, 0.0);
        assert_eq!(run.errors[4].1, 0.0);
        assert_eq!(run.fit.excluded, 2);
    }

    #[test]
    fn unknown_run_zero_function_is_exact() {
        // the zero function gives zero error at every trial
        let zero = crate::legendre::TestFunction::zero(1);
        for m in [8usize, 16] {
            let (err, _, _) = unknown_trial(&zero, m, 5, 0).unwrap();
            assert_abs_diff_eq!(err, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn unknown_run_is_deterministic() {
        let cfg = ExperimentConfig {
            dims: 3,
            trials: 2,
            ..small_cfg(Pipeline::Unknown, vec![8, 16, 32])
        };
        let a = run_unknown_convergence(&cfg).unwrap();
        let b = run_unknown_convergence(&cfg).unwrap();
        assert_eq!(a.trials_table.to_csv(), b.trials_table.to_csv());
        assert_eq!(a.summary_table.to_csv(), b.summary_table.to_csv());
        // per-trial error bounded by the sanity ceiling ||f|| + objective-level bound
        let f_norm = make_algebraic_b(0.5, 1.0, 3)
            .lp_norm(2.0)
            .unwrap();
        for row in &a.trials_table.rows {
            let err: f64 = row[4].parse().unwrap();
            assert!(err >= 0.0 && err.is_finite());
            assert!(err <= 2.0 * f_norm + 1e-9);
        }
    }

    #[test]
    fn width_table_rows_satisfy_formulas() {
        let cfg = small_cfg(Pipeline::Widths, vec![2, 4, 8]);
        let table = run_width_tables(&cfg, None).unwrap();
        assert_eq!(table.rows.len(), 9);
        let p = cfg.p_star;
        let moments = measure_moments(Measure::Uniform);
        let mut unknown_cols = Vec::new();
        for row in &table.rows {
            let m: usize = row[0].parse().unwrap();
            let family = &row[4];
            let stesin: f64 = row[5].parse().unwrap();
            let theta_known: f64 = row[7].parse().unwrap();
            let theta_unknown: f64 = row[8].parse().unwrap();
            unknown_cols.push(theta_unknown);
            if family == "flat" {
                // flat row reproduces C(b) 2^{-1/p} m^{1/2-1/p}
                let b = make_flat_b(m, p);
                let c = crate::widths::known_anisotropy_constant(&b, moments).unwrap();
                let expect = c * 2f64.powf(-1.0 / p) * (m as f64).powf(0.5 - 1.0 / p);
                assert_abs_diff_eq!(theta_known, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(
                    stesin,
                    2f64.powf(-1.0 / p) * (m as f64).powf(0.5 - 1.0 / p),
                    epsilon = 1e-12
                );
            }
            if family == "log" {
                // log row dominates the slow-growth lower bound
                let built = make_log_b(p, SlowGrowth::LogSquared, 1000).unwrap();
                let c = crate::widths::known_anisotropy_constant(&built.sequence, moments)
                    .unwrap();
                let rhs = c
                    * built.normalization
                    * 2f64.powf(-1.0 / p)
                    * SlowGrowth::LogSquared.effective(2 * m).powf(-1.0 / p)
                    * (m as f64).powf(0.5 - 1.0 / p);
                assert!(theta_known >= rhs - 1e-15);
            }
        }
        // the unknown-anisotropy column is constant in m
        for w in unknown_cols.windows(2) {
            assert_abs_diff_eq!(w[0], w[1], epsilon = 1e-15);
        }
        // empirical constant column filled when a fit is passed
        let fit = RateFit {
            slope: -1.5,
            intercept: 0.25f64.ln(),
            r_squared: 1.0,
            points: vec![],
            excluded: 0,
        };
        let with_fit = run_width_tables(&cfg, Some(&fit)).unwrap();
        let c: f64 = with_fit.rows[0][9].parse().unwrap();
        assert_abs_diff_eq!(c, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn impossibility_demo_small() {
        let cfg = ExperimentConfig {
            dims: 4,
            trials: 2,
            ..small_cfg(Pipeline::Impossibility, vec![8, 16])
        };
        let run = run_impossibility_demo(&cfg).unwrap();
        assert!(run.max_out_deviation <= 1e-10, "{}", run.max_out_deviation);
        assert!(run.error_ratio_at_largest_m >= 10.0);
        assert_eq!(run.table.rows.len(), 2 * 2 * 2);
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(Pipeline::Known, vec![4, 8]);
        assert!(cfg.validate().is_ok());
        cfg.m_grid = vec![8, 4];
        assert!(cfg.validate().is_err());
        cfg.m_grid = vec![];
        assert!(cfg.validate().is_err());
        let cfg = small_cfg(Pipeline::Unknown, vec![2, 8]);
        assert!(cfg.validate().is_err());

        let parsed = ExperimentConfig::from_json(
            r#"{"pipeline":"unknown","m_grid":[16,32],"K":2,"seed":11}"#,
        )
        .unwrap();
        assert_eq!(parsed.pipeline, Pipeline::Unknown);
        assert_eq!(parsed.k, 2);
        assert_eq!(parsed.p_star, 0.5);
        assert_eq!(parsed.trials, 1);
    }

    #[test]
    fn derive_seed_spreads() {
        let a = derive_seed(7, 16, 0);
        let b = derive_seed(7, 16, 1);
        let c = derive_seed(7, 32, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(7, 16, 0));
    }
}
