//! Monte Carlo sweeps over `(n, p, q)` and success-curve estimates.

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{completion_threshold, ThresholdOptions};
use crate::game::{two_round_game, ArrivalMode, GameOutcome, GameParams, RoundOneStats, StrategySpec, TrialSeeds};
use crate::graph::RngSpec;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959964;

pub const CSV_HEADER: &str = "n,p,q,trials,successes,wilson_lo,wilson_hi,crrbb_mean,crbbbb_mean,dangerous_pairs_mean,dangerous_k12_mean,first_round_failures,runtime_ms";

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("curve does not bracket 1/2")]
    NoCrossing,
    #[error("need at least {0} points")]
    TooFewPoints(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Edge probabilities of round one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PRule {
    /// `p = n^{-γ}` for each `γ`.
    Exponents(Vec<f64>),
    Values(Vec<f64>),
}

/// Edge probabilities of round two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QGrid {
    Values(Vec<f64>),
    /// Multiples of the nominal completion threshold at `(n, p)`.
    ThresholdMultiples(Vec<f64>),
    /// `points` log-spaced values from `lo` to `hi` inclusive.
    LogSpaced { lo: f64, hi: f64, points: usize },
}

impl Default for QGrid {
    fn default() -> Self {
        QGrid::ThresholdMultiples(vec![1e-2, 1e-1, 1.0, 1e1, 1e2])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: Vec<usize>,
    pub p: PRule,
    #[serde(default)]
    pub q: QGrid,
    pub trials: usize,
    #[serde(default)]
    pub strategy: StrategySpec,
    pub master_seed: u64,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub arrival: ArrivalMode,
    #[serde(default)]
    pub output: Option<std::path::PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Measure wall-clock time per trial. Off by default so that output
    /// bytes depend only on the config.
    #[serde(default)]
    pub record_runtime: bool,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<SweepConfig, LabError> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.n.is_empty() {
            return bad("n list is empty".into());
        }
        if let Some(&n) = self.n.iter().find(|&&n| n < 3) {
            return bad(format!("n = {n} is below 3"));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        match &self.p {
            PRule::Exponents(g) if g.is_empty() => return bad("p grid is empty".into()),
            PRule::Values(v) if v.is_empty() => return bad("p grid is empty".into()),
            PRule::Values(v) => {
                if let Some(p) = v.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
                    return bad(format!("p = {p} is not in (0, 1)"));
                }
            }
            PRule::Exponents(g) => {
                if let Some(x) = g.iter().find(|x| x.is_nan() || **x <= 0.0) {
                    return bad(format!("exponent {x} must be positive"));
                }
            }
        }
        match &self.q {
            QGrid::Values(v) | QGrid::ThresholdMultiples(v) if v.is_empty() => return bad("q grid is empty".into()),
            QGrid::LogSpaced { lo, hi, points } if *points == 0 || lo.is_nan() || hi.is_nan() || lo > hi || *lo <= 0.0 => {
                return bad("log-spaced q grid needs 0 < lo <= hi and points >= 1".into())
            }
            _ => {}
        }
        for cell in self.cells()? {
            if !(cell.q > 0.0 && cell.q <= 1.0) {
                return bad(format!("q = {} at n = {}, p = {} is not in (0, 1]", cell.q, cell.n, cell.p));
            }
        }
        Ok(())
    }

    /// Cells in output order: `n`, then `p`, then `q`.
    pub fn cells(&self) -> Result<Vec<Cell>, LabError> {
        let mut out = Vec::new();
        for &n in &self.n {
            let ps: Vec<f64> = match &self.p {
                PRule::Exponents(g) => g.iter().map(|x| (n as f64).powf(-x)).collect(),
                PRule::Values(v) => v.clone(),
            };
            for p in ps {
                let qs: Vec<f64> = match &self.q {
                    QGrid::Values(v) => v.clone(),
                    QGrid::ThresholdMultiples(m) => {
                        let t = completion_threshold(n, p, &ThresholdOptions::default())
                            .map_err(|e| LabError::Config(e.to_string()))?
                            .nominal;
                        m.iter().map(|k| k * t).collect()
                    }
                    QGrid::LogSpaced { lo, hi, points } => log_spaced(*lo, *hi, *points),
                };
                for q in qs {
                    out.push(Cell {
                        index: out.len(),
                        n,
                        p,
                        q,
                    });
                }
            }
        }
        Ok(out)
    }
}

pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub p: f64,
    pub q: f64,
}

/// RNG stream of trial `trial` in cell `cell`. Injective for cells below
/// `2^30` and trials below `2^32`.
pub fn trial_stream(cell: usize, trial: usize) -> u64 {
    ((cell as u64) << 32) | trial as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub trials: usize,
    pub successes: usize,
    /// Round two failed.
    pub failures: usize,
    pub first_round_failures: usize,
    /// Trials that raised an error.
    pub errors: usize,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub crrbb_mean: f64,
    pub crrbb_median: f64,
    pub crbbbb_mean: f64,
    pub crbbbb_median: f64,
    pub dangerous_pairs_mean: f64,
    pub dangerous_k12_mean: f64,
    pub runtime_ms: f64,
    /// More than 10% of trials failed in round one.
    pub flagged: bool,
}

enum Trial {
    Success(RoundOneStats),
    Failure(RoundOneStats),
    FirstRound,
    Error,
}

fn run_trial(cfg: &SweepConfig, cell: &Cell, trial: usize) -> (Trial, f64) {
    let start = Instant::now();
    let params = GameParams {
        n: cell.n,
        p: cell.p,
        q: cell.q,
        arrival: cfg.arrival,
    };
    let seeds = TrialSeeds::new(cfg.master_seed, trial_stream(cell.index, trial));
    let outcome = match two_round_game(&params, &cfg.strategy, &seeds) {
        Ok(t) => match (t.outcome, t.round_one) {
            (GameOutcome::Success, Some(s)) => Trial::Success(s),
            (GameOutcome::Failure(_), Some(s)) => Trial::Failure(s),
            (GameOutcome::FirstRoundFailure(_), _) => Trial::FirstRound,
            _ => Trial::Error,
        },
        Err(_) => Trial::Error,
    };
    let ms = if cfg.record_runtime {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    (outcome, ms)
}

/// Runs every trial of every cell. Output order and values depend only on
/// the config, never on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<CellResult>, LabError> {
    cfg.validate()?;
    let cells = cfg.cells()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let run = || -> Vec<(Trial, f64)> {
        jobs.par_iter()
            .map(|&(c, t)| run_trial(cfg, &cells[c], t))
            .collect()
    };
    let outcomes = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| LabError::Pool(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(cells
        .iter()
        .zip(outcomes.chunks(cfg.trials))
        .map(|(cell, trials)| aggregate(cell, trials))
        .collect())
}

fn aggregate(cell: &Cell, trials: &[(Trial, f64)]) -> CellResult {
    let mut stats = Vec::new();
    let (mut successes, mut failures, mut first, mut errors) = (0, 0, 0, 0);
    for (t, _) in trials {
        match t {
            Trial::Success(s) => {
                successes += 1;
                stats.push(*s);
            }
            Trial::Failure(s) => {
                failures += 1;
                stats.push(*s);
            }
            Trial::FirstRound => first += 1,
            Trial::Error => errors += 1,
        }
    }
    let (wilson_lo, wilson_hi) = wilson_interval(successes, trials.len());
    let pick = |f: fn(&RoundOneStats) -> u64| stats.iter().map(f).map(|x| x as f64).collect::<Vec<_>>();
    let crrbb = pick(|s| s.crrbb);
    let crbbbb = pick(|s| s.crbbbb);
    CellResult {
        n: cell.n,
        p: cell.p,
        q: cell.q,
        trials: trials.len(),
        successes,
        failures,
        first_round_failures: first,
        errors,
        wilson_lo,
        wilson_hi,
        crrbb_mean: mean(&crrbb),
        crrbb_median: median(&crrbb),
        crbbbb_mean: mean(&crbbbb),
        crbbbb_median: median(&crbbbb),
        dangerous_pairs_mean: mean(&pick(|s| s.dangerous_pairs)),
        dangerous_k12_mean: mean(&pick(|s| s.dangerous_k12)),
        runtime_ms: mean(&trials.iter().map(|(_, ms)| *ms).collect::<Vec<_>>()),
        flagged: 10 * first > trials.len(),
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub fn write_csv<W: Write>(results: &[CellResult], mut out: W) -> Result<(), LabError> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.p,
            r.q,
            r.trials,
            r.successes,
            r.wilson_lo,
            r.wilson_hi,
            r.crrbb_mean,
            r.crbbbb_mean,
            r.dangerous_pairs_mean,
            r.dangerous_k12_mean,
            r.first_round_failures,
            r.runtime_ms
        )?;
    }
    Ok(())
}

pub fn to_csv(results: &[CellResult]) -> String {
    let mut buf = Vec::new();
    write_csv(results, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// One point of a success curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub q: f64,
    pub successes: usize,
    pub trials: usize,
}

impl From<&CellResult> for CurvePoint {
    fn from(r: &CellResult) -> Self {
        CurvePoint {
            q: r.q,
            successes: r.successes,
            trials: r.trials,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub q_hat: f64,
    pub lo: f64,
    pub hi: f64,
    /// Bootstrap replicates that bracketed 1/2.
    pub replicates: usize,
}

/// Weighted pool-adjacent-violators fit, nonincreasing.
pub fn isotonic_decreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() >= 2 {
            let (v2, w2, c2) = blocks[blocks.len() - 1];
            let (v1, w1, c1) = blocks[blocks.len() - 2];
            if v1 >= v2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            let w = w1 + w2;
            let v = if w > 0.0 { (v1 * w1 + v2 * w2) / w } else { (v1 + v2) / 2.0 };
            blocks.push((v, w, c1 + c2));
        }
    }
    blocks.into_iter().flat_map(|(v, _, c)| std::iter::repeat_n(v, c)).collect()
}

fn crossing_of(log_q: &[f64], fitted: &[f64]) -> Option<f64> {
    let j = fitted.iter().position(|&f| f <= 0.5)?;
    if j == 0 {
        return None;
    }
    let (a, b) = (fitted[j - 1], fitted[j]);
    let t = (a - 0.5) / (a - b);
    Some(log_q[j - 1] + t * (log_q[j] - log_q[j - 1]))
}

fn fit_crossing(points: &[CurvePoint], successes: &[usize]) -> Option<f64> {
    let log_q: Vec<f64> = points.iter().map(|p| p.q.ln()).collect();
    let rates: Vec<f64> = points
        .iter()
        .zip(successes)
        .map(|(p, &s)| s as f64 / p.trials as f64)
        .collect();
    let weights: Vec<f64> = points.iter().map(|p| p.trials as f64).collect();
    crossing_of(&log_q, &isotonic_decreasing(&rates, &weights)).map(f64::exp)
}

/// Where the isotonic fit of success rate against `log q` crosses 1/2,
/// with a parametric bootstrap interval over `bootstrap` replicates.
pub fn estimate_crossing(points: &[CurvePoint], bootstrap: usize, rng: &RngSpec) -> Result<Crossing, LabError> {
    if points.len() < 3 {
        return Err(LabError::TooFewPoints(3));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.q.total_cmp(&b.q));
    let observed: Vec<usize> = pts.iter().map(|p| p.successes).collect();
    let q_hat = fit_crossing(&pts, &observed).ok_or(LabError::NoCrossing)?;
    let mut r = rng.rng();
    let mut reps = Vec::with_capacity(bootstrap);
    for _ in 0..bootstrap {
        let resampled: Vec<usize> = pts
            .iter()
            .map(|p| {
                let rate = p.successes as f64 / p.trials as f64;
                (0..p.trials).filter(|_| r.random::<f64>() < rate).count()
            })
            .collect();
        if let Some(x) = fit_crossing(&pts, &resampled) {
            reps.push(x.ln());
        }
    }
    let (lo, hi) = if reps.is_empty() {
        (q_hat, q_hat)
    } else {
        reps.sort_by(f64::total_cmp);
        let at = |f: f64| reps[((reps.len() - 1) as f64 * f).round() as usize].exp();
        (at(0.025).min(q_hat), at(0.975).max(q_hat))
    };
    Ok(Crossing {
        q_hat,
        lo,
        hi,
        replicates: reps.len(),
    })
}
