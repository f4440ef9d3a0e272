//! Desk-scale scans: deviation norms per momentum window, decay fits,
//! acceleration persistence, bound-state probes and the window/tail-sum
//! checks.
//!
//! Every cell `(n, k, t)` is an independent propagation and runs on the
//! rayon pool; results are collected in grid order, so output does not
//! depend on the thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::crossing::{backscatter_symmetric_part, crossing_interval};
use crate::dynamics::{evolve, row_deviation, PropagatorConfig, Scheme};
use crate::error::{Error, Result};
use crate::phase::free_phase_factor;
use crate::potential::FourierPotential;
use crate::state::{compensated_sum, FiberState};

pub const DEFAULT_SEED: u64 = 0x5eed_0001;
const BOOTSTRAP_SAMPLES: usize = 2000;

/// How the truncation is chosen per cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// [`PropagatorConfig::for_window`] with the cell's own `n` and `t`.
    Auto,
    Fixed { half_width: usize, buffer: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    /// Shape of the potential; the coupling actually used is `lambda · potential`.
    pub potential: FourierPotential,
    pub lambda: f64,
    pub n_list: Vec<i64>,
    pub t_max: f64,
    /// Number of fibers `k = j / k_grid`.
    pub k_grid: usize,
    pub truncation: Truncation,
    pub tol: f64,
    pub leak_max: f64,
    pub scheme: Scheme,
}

impl ExperimentSpec {
    pub fn new(name: &str, potential: FourierPotential, lambda: f64, n_list: Vec<i64>, t_max: f64) -> Self {
        ExperimentSpec {
            name: name.to_string(),
            potential,
            lambda,
            n_list,
            t_max,
            k_grid: 1,
            truncation: Truncation::Auto,
            tol: 1e-9,
            leak_max: 1e-6,
            scheme: Scheme::InteractionPictureRk,
        }
    }

    pub fn scaled_potential(&self) -> FourierPotential {
        self.potential.scaled(self.lambda)
    }

    pub fn k_values(&self) -> Vec<f64> {
        (0..self.k_grid).map(|j| j as f64 / self.k_grid as f64).collect()
    }

    /// Truncation used for window `n` up to time `|t|`.
    pub fn cell_config(&self, n: i64, t: f64) -> PropagatorConfig {
        let bw = self.potential.bandwidth();
        let base = PropagatorConfig::for_window(n, t.abs(), bw);
        let base = match self.truncation {
            Truncation::Auto => base,
            Truncation::Fixed { half_width, buffer } => PropagatorConfig {
                half_width,
                buffer,
                ..base
            },
        };
        PropagatorConfig {
            tol: self.tol,
            leak_max: self.leak_max,
            scheme: self.scheme,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!("lambda = {} must be >= 0", self.lambda)));
        }
        if self.n_list.is_empty() {
            return Err(Error::InvalidConfig("n_list is empty".into()));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_max = {} must be >= 0", self.t_max)));
        }
        if self.k_grid == 0 {
            return Err(Error::InvalidConfig("k_grid must be >= 1".into()));
        }
        self.potential.check_hermitian()?;
        for &n in &self.n_list {
            let cfg = self.cell_config(n, self.t_max);
            cfg.validate(&self.potential)?;
            if n.abs() > cfg.safe_site_limit() {
                return Err(Error::SiteOutOfRange {
                    site: n,
                    limit: cfg.safe_site_limit(),
                });
            }
        }
        Ok(())
    }
}

/// One propagation result, the unit of CSV output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub n: i64,
    pub k: f64,
    pub t: f64,
    pub window_prob: f64,
    pub dev_norm: f64,
    pub err: f64,
    pub leak: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub n: i64,
    /// Sup over sampled `(k, t)` of `‖P_n(U(t) - U_0(t))‖`.
    pub dev_norm: f64,
    /// Largest error budget among the cells.
    pub err: f64,
    pub t_at: f64,
    pub k_at: f64,
    /// No cell leaked past `leak_max`.
    pub valid: bool,
    /// Refining around the maximiser changed the sup by at most 5%.
    pub converged: bool,
    pub cells: Vec<Cell>,
}

/// Crossing-aligned grid `{j/4}` on `(0, t_max]`, plus `t_max` itself.
pub fn crossing_time_grid(t_max: f64) -> Vec<f64> {
    let mut ts: Vec<f64> = (1..).map(|j| 0.25 * j as f64).take_while(|&t| t <= t_max + 1e-12).collect();
    if ts.last().is_none_or(|&t| t < t_max) && t_max > 0.0 {
        ts.push(t_max);
    }
    ts
}

fn deviation_cell(spec: &ExperimentSpec, pot: &FourierPotential, n: i64, k: f64, t: f64) -> Result<Cell> {
    let cfg = spec.cell_config(n, t);
    let d = row_deviation(n, t, pot, &cfg, k)?;
    Ok(Cell {
        n,
        k,
        t,
        window_prob: d.window_prob,
        dev_norm: d.dev_norm,
        err: d.err,
        leak: d.leak,
        valid: d.leak <= cfg.leak_max,
    })
}

fn scan_cells(spec: &ExperimentSpec, pot: &FourierPotential, jobs: Vec<(i64, f64, f64)>) -> Result<Vec<Cell>> {
    jobs.into_par_iter()
        .map(|(n, k, t)| deviation_cell(spec, pot, n, k, t))
        .collect()
}

fn report_from_cells(n: i64, cells: Vec<Cell>, extra: &[Cell]) -> DeviationReport {
    let best = |cs: &[Cell]| {
        cs.iter()
            .copied()
            .fold(None, |acc: Option<Cell>, c| match acc {
                Some(a) if a.dev_norm >= c.dev_norm => Some(a),
                _ => Some(c),
            })
    };
    let coarse = best(&cells);
    let all: Vec<Cell> = cells.iter().chain(extra).copied().collect();
    let top = best(&all);
    let (dev, t_at, k_at) = top.map_or((0.0, 0.0, 0.0), |c| (c.dev_norm, c.t, c.k));
    let coarse_dev = coarse.map_or(0.0, |c| c.dev_norm);
    let err = all.iter().map(|c| c.err).fold(0.0, f64::max);
    DeviationReport {
        n,
        dev_norm: dev,
        err,
        t_at,
        k_at,
        valid: all.iter().all(|c| c.valid),
        converged: dev - coarse_dev <= 0.05 * dev.max(err),
        cells: all,
    }
}

fn run_scan(spec: &ExperimentSpec, grid: impl Fn(i64) -> Vec<f64>) -> Result<Vec<DeviationReport>> {
    spec.validate()?;
    let pot = spec.scaled_potential();
    let ks = spec.k_values();
    let mut jobs = Vec::new();
    for &n in &spec.n_list {
        for t in grid(n) {
            for &k in &ks {
                jobs.push((n, k, t));
            }
        }
    }
    let cells = scan_cells(spec, &pot, jobs)?;
    // refinement: t-midpoints next to the maximiser, k-midpoints at its time
    let mut reports = Vec::new();
    let mut refine = Vec::new();
    for &n in &spec.n_list {
        let own: Vec<Cell> = cells.iter().filter(|c| c.n == n).copied().collect();
        let top = own
            .iter()
            .copied()
            .fold(own[0], |a, c| if c.dev_norm > a.dev_norm { c } else { a });
        let dk = 1.0 / spec.k_grid as f64;
        let sign = top.t.signum();
        for dt in [-0.125, 0.125] {
            let t = top.t + dt;
            if t * sign > 0.0 && t.abs() <= grid(n).iter().fold(0.0f64, |a, &b| a.max(b.abs())) {
                refine.push((n, top.k, t));
            }
        }
        if spec.k_grid > 1 {
            refine.push((n, (top.k + 0.5 * dk).rem_euclid(1.0), top.t));
            refine.push((n, (top.k - 0.5 * dk).rem_euclid(1.0), top.t));
        }
        reports.push((n, own));
    }
    let extra = scan_cells(spec, &pot, refine)?;
    Ok(reports
        .into_iter()
        .map(|(n, own)| {
            let ex: Vec<Cell> = extra.iter().filter(|c| c.n == n).copied().collect();
            report_from_cells(n, own, &ex)
        })
        .collect())
}

/// Sup of the row deviation over `t ∈ (0, t_max]` and the k grid, per window.
pub fn deviation_scan(spec: &ExperimentSpec) -> Result<Vec<DeviationReport>> {
    run_scan(spec, |_| crossing_time_grid(spec.t_max))
}

/// The same sup over negative times `t ∈ [-(|n| + t_max), 0)`.
///
/// For `n > 0` and `t < 0` the drift first carries window `n` down to zero
/// momentum, where it meets the strongest crossing; the horizon is
/// stretched by `|n|` so every window passes that point.
pub fn deviation_scan_negative(spec: &ExperimentSpec) -> Result<Vec<DeviationReport>> {
    let mut wide = spec.clone();
    let n_max = spec.n_list.iter().map(|n| n.abs()).max().unwrap_or(0);
    wide.t_max = spec.t_max + n_max as f64;
    wide.validate()?;
    run_scan(spec, |n| {
        crossing_time_grid(spec.t_max + n.abs() as f64)
            .into_iter()
            .map(|t| -t)
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// `-slope` of `log y` against `log x`.
    pub exponent: f64,
    /// Bootstrap half-width of the central 95% interval.
    pub ci: f64,
    pub prefactor: f64,
}

/// Least-squares power law `y ≈ c·x^{-exponent}` with a seeded pairs bootstrap.
pub fn power_law_fit(xs: &[f64], ys: &[f64], seed: u64) -> Result<DecayFit> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateFit("length mismatch".into()));
    }
    let mut distinct: Vec<f64> = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 5 {
        return Err(Error::DegenerateFit(format!(
            "need at least 5 distinct abscissae, got {}",
            distinct.len()
        )));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit("non-positive value in log-log fit".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, icept) = least_squares(&lx, &ly, &(0..xs.len()).collect::<Vec<_>>())
        .ok_or_else(|| Error::DegenerateFit("singular design".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slopes = Vec::with_capacity(BOOTSTRAP_SAMPLES);
    let m = xs.len();
    while slopes.len() < BOOTSTRAP_SAMPLES {
        let idx: Vec<usize> = (0..m).map(|_| rng.random_range(0..m)).collect();
        if let Some((s, _)) = least_squares(&lx, &ly, &idx) {
            slopes.push(s);
        }
    }
    slopes.sort_by(f64::total_cmp);
    let q = |p: f64| slopes[((p * (BOOTSTRAP_SAMPLES - 1) as f64).round()) as usize];
    Ok(DecayFit {
        exponent: -slope,
        ci: 0.5 * (q(0.975) - q(0.025)),
        prefactor: icept.exp(),
    })
}

fn least_squares(x: &[f64], y: &[f64], idx: &[usize]) -> Option<(f64, f64)> {
    let m = idx.len() as f64;
    let mx = idx.iter().map(|&i| x[i]).sum::<f64>() / m;
    let my = idx.iter().map(|&i| y[i]).sum::<f64>() / m;
    let sxx: f64 = idx.iter().map(|&i| (x[i] - mx).powi(2)).sum();
    let sxy: f64 = idx.iter().map(|&i| (x[i] - mx) * (y[i] - my)).sum();
    if sxx <= 1e-300 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Fits `dev_norm ∝ |n|^{-exponent}` over the reports.
pub fn decay_exponent_fit(reports: &[DeviationReport]) -> Result<DecayFit> {
    decay_exponent_fit_seeded(reports, DEFAULT_SEED)
}

pub fn decay_exponent_fit_seeded(reports: &[DeviationReport], seed: u64) -> Result<DecayFit> {
    if let Some(r) = reports.iter().find(|r| !r.valid) {
        return Err(Error::DegenerateFit(format!("report for n = {} is invalid", r.n)));
    }
    if let Some(r) = reports.iter().find(|r| r.dev_norm <= r.err) {
        return Err(Error::DegenerateFit(format!(
            "dev_norm {:e} at n = {} sits at the error floor {:e}",
            r.dev_norm, r.n, r.err
        )));
    }
    let xs: Vec<f64> = reports.iter().map(|r| r.n.unsigned_abs() as f64).collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.dev_norm).collect();
    power_law_fit(&xs, &ys, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceReport {
    /// Smallest window meeting the criterion, if any.
    pub found: Option<i64>,
    /// `(n, min over k and t of ‖P_n U(t) e_n‖)`.
    pub min_mass: Vec<(i64, f64)>,
    pub cells: Vec<Cell>,
}

/// Starts in window `n` on each fiber and records `‖P_n U(t)ψ‖` at the
/// crossing-aligned times up to `t_max`.
pub fn acceleration_persistence(spec: &ExperimentSpec, epsilon: f64) -> Result<PersistenceReport> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!("epsilon = {epsilon} must lie in [0, 1)")));
    }
    spec.validate()?;
    let pot = spec.scaled_potential();
    let ts = crossing_time_grid(spec.t_max);
    let mut ns = spec.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let jobs: Vec<(i64, f64)> = ns
        .iter()
        .flat_map(|&n| spec.k_values().into_iter().map(move |k| (n, k)))
        .collect();
    let runs: Vec<Vec<Cell>> = jobs
        .into_par_iter()
        .map(|(n, k)| {
            let cfg = spec.cell_config(n, spec.t_max);
            let mut psi = FiberState::unit(cfg.half_width, n, k, 0.0)?;
            let mut out = Vec::with_capacity(ts.len());
            for &t in &ts {
                psi = evolve(&psi, t, &pot, &cfg)?;
                out.push(Cell {
                    n,
                    k,
                    t,
                    window_prob: psi.amp(n).norm_sqr(),
                    dev_norm: (psi.amp(n) - free_phase_factor(n, k, 0.0, t)).norm(),
                    err: psi.err + psi.leak,
                    leak: psi.leak,
                    valid: psi.leak <= cfg.leak_max,
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let cells: Vec<Cell> = runs.into_iter().flatten().collect();
    let mut min_mass = Vec::new();
    let mut found = None;
    for &n in &ns {
        let own = cells.iter().filter(|c| c.n == n);
        let m = own.clone().map(|c| c.window_prob.sqrt()).fold(f64::INFINITY, f64::min);
        let valid = own.clone().all(|c| c.valid);
        min_mass.push((n, m));
        let qualifies = if epsilon == 0.0 { m >= 1.0 && pot.is_zero() } else { m >= 1.0 - epsilon };
        if found.is_none() && valid && qualifies {
            found = Some(n);
        }
    }
    Ok(PersistenceReport { found, min_mass, cells })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub n: i64,
    /// `(t, ‖P_n U(t)ψ‖)` with the norm taken over the k ensemble.
    pub samples: Vec<(f64, f64)>,
    /// Finite-horizon heuristic: last value below half the max and
    /// decreasing over the final three samples.
    pub decaying: bool,
    /// All values within ten times the error budget.
    pub inconclusive: bool,
    /// Per-fiber samples; `window_prob` is `|ψ_k(t)(n)|²`.
    pub cells: Vec<Cell>,
}

/// `count` geometrically spaced times from `min(1/4, t_max)` to `t_max`.
pub fn geometric_time_grid(t_max: f64, count: usize) -> Vec<f64> {
    let t0 = 0.25f64.min(t_max);
    let r = if count > 1 { (t_max / t0).powf(1.0 / (count - 1) as f64) } else { 1.0 };
    (0..count).map(|j| if j + 1 == count { t_max } else { t0 * r.powi(j as i32) }).collect()
}

/// Tracks the window masses of an ensemble `psi0` (one state per fiber,
/// equal weights) on a geometric time grid.
pub fn bound_state_probe(psi0: &[FiberState], spec: &ExperimentSpec) -> Result<Vec<ProbeResult>> {
    if psi0.is_empty() {
        return Err(Error::InvalidConfig("empty ensemble".into()));
    }
    let pot = spec.scaled_potential();
    let ts = geometric_time_grid(spec.t_max, 16);
    let cfg_for = |s: &FiberState| PropagatorConfig {
        half_width: s.half_width(),
        ..spec.cell_config(0, spec.t_max)
    };
    let runs: Vec<Vec<FiberState>> = psi0
        .par_iter()
        .map(|s| {
            let cfg = PropagatorConfig {
                buffer: cfg_for(s).buffer.min(s.half_width().saturating_sub(1)),
                ..cfg_for(s)
            };
            let mut cur = s.clone();
            let mut out = Vec::with_capacity(ts.len());
            for &t in &ts {
                cur = evolve(&cur, s.t + t, &pot, &cfg)?;
                out.push(cur.clone());
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let weight = 1.0 / psi0.len() as f64;
    Ok(spec
        .n_list
        .iter()
        .map(|&n| {
            let samples: Vec<(f64, f64)> = ts
                .iter()
                .enumerate()
                .map(|(j, &t)| {
                    let m2 = compensated_sum(runs.iter().map(|r| weight * r[j].amp(n).norm_sqr()));
                    (t, m2.sqrt())
                })
                .collect();
            let err = runs
                .iter()
                .map(|r| r.last().map_or(0.0, |s| s.err + s.leak))
                .fold(0.0, f64::max);
            let vals: Vec<f64> = samples.iter().map(|s| s.1).collect();
            let max = vals.iter().copied().fold(0.0, f64::max);
            let tail = &vals[vals.len().saturating_sub(3)..];
            let decaying = vals.last().is_some_and(|&v| v < 0.5 * max) && tail.windows(2).all(|w| w[1] < w[0]);
            // dev_norm: distance from the free evolution of the same start
            let cells = runs
                .iter()
                .zip(psi0)
                .flat_map(|(r, s0)| {
                    r.iter().zip(&ts).map(move |(s, &t)| Cell {
                        n,
                        k: s.k,
                        t,
                        window_prob: s.amp(n).norm_sqr(),
                        dev_norm: (s.amp(n) - s0.amp(n) * free_phase_factor(n, s0.k, s0.t, s.t)).norm(),
                        err: s.err + s.leak,
                        leak: s.leak,
                        valid: s.leak <= spec.leak_max,
                    })
                })
                .collect();
            ProbeResult {
                n,
                samples,
                decaying,
                inconclusive: max <= 10.0 * err,
                cells,
            }
        })
        .collect())
}

/// `|Σ_n ‖P_n ψ‖² - ‖ψ‖²|` with the right side taken in position space:
/// the mean of `|ψ(x)|²` on a grid fine enough for the discrete Parseval
/// identity to hold exactly.
pub fn window_parseval_defect(psi: &FiberState) -> f64 {
    let windows = compensated_sum(psi.sites().map(|n| psi.window_mass(n).powi(2)));
    let len = (2 * psi.len()).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (n, a) in psi.sites().zip(psi.amps()) {
        buf[n.rem_euclid(len as i64) as usize] = *a;
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let position = compensated_sum(buf.iter().map(|z| z.norm_sqr())) / len as f64;
    (windows - position).abs()
}

/// `⟨x⟩ = (1 + x²)^{1/2}`.
pub fn japanese(x: f64) -> f64 {
    x.hypot(1.0)
}

/// `Σ_{l >= 0} ⟨2n + l⟩^{-β}` for `β > 1`: direct sum up to a cutoff plus
/// an Euler–Maclaurin tail.
pub fn tail_sum(n: i64, beta: f64) -> f64 {
    const CUTOFF: i64 = 20_000;
    let f = |y: f64| japanese(y).powf(-beta);
    let head = compensated_sum((0..CUTOFF).map(|l| f((2 * n + l) as f64)));
    let y = (2 * n + CUTOFF) as f64;
    // ∫_y^∞ u^{-β}(1 + u^{-2})^{-β/2} du, expanded in u^{-2}
    let b2 = 0.5 * beta;
    let integral = y.powf(1.0 - beta) / (beta - 1.0) - b2 * y.powf(-1.0 - beta) / (beta + 1.0)
        + 0.5 * b2 * (b2 + 1.0) * y.powf(-3.0 - beta) / (beta + 3.0);
    let fp = -beta * y * japanese(y).powf(-beta - 2.0);
    head + integral + 0.5 * f(y) - fp / 12.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSumCheck {
    pub beta: f64,
    /// `max_n Σ_l ⟨2n+l⟩^{-β} / ⟨n⟩^{1-β}` over `0 <= n <= n_max`.
    pub cte: f64,
    pub ratio_at_max: f64,
    /// Large-`n` limit `2^{1-β} / (β - 1)` of the ratio.
    pub asymptote: f64,
}

impl TailSumCheck {
    /// The ratio stays bounded and approaches its limit from within 10%.
    pub fn passes(&self) -> bool {
        self.cte.is_finite() && (self.ratio_at_max / self.asymptote - 1.0).abs() < 0.1
    }
}

pub fn tail_sum_check(beta: f64, n_max: i64) -> Result<TailSumCheck> {
    if beta.is_nan() || beta <= 1.0 {
        return Err(Error::InvalidConfig(format!("tail sum needs beta > 1, got {beta}")));
    }
    let ratio = |n: i64| tail_sum(n, beta) / japanese(n as f64).powf(1.0 - beta);
    let cte = (0..=n_max).map(ratio).fold(0.0, f64::max);
    Ok(TailSumCheck {
        beta,
        cte,
        ratio_at_max: ratio(n_max),
        asymptote: 2f64.powf(1.0 - beta) / (beta - 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackscatterPoint {
    pub n: i64,
    pub l: i64,
    /// `sup_{t ∈ I_l} |raw|`.
    pub sup_raw: f64,
    /// `max_t |raw - symmetric|`.
    pub pair_defect: f64,
}

/// Samples the backscattering sum on `samples` points of `I_l` for each `n`.
pub fn backscatter_scan(pot: &FourierPotential, n_list: &[i64], l: i64, samples: usize) -> Result<Vec<BackscatterPoint>> {
    let (lo, hi) = crossing_interval(l);
    let samples = samples.max(2);
    n_list
        .iter()
        .map(|&n| {
            let mut sup = 0.0f64;
            let mut defect = 0.0f64;
            for j in 0..samples {
                // right edge excluded
                let t = lo + (hi - lo) * j as f64 / samples as f64;
                let b = backscatter_symmetric_part(n, l, t, pot)?;
                sup = sup.max(b.raw.abs());
                defect = defect.max((b.raw - b.symmetric).abs());
            }
            Ok(BackscatterPoint {
                n,
                l,
                sup_raw: sup,
                pair_defect: defect,
            })
        })
        .collect()
}

/// Uniform random complex vector on `|m| <= reach`, unit norm.
pub fn random_state(half_width: usize, reach: i64, k: f64, seed: u64) -> Result<FiberState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = FiberState::zeros(half_width, k, 0.0);
    for site in -reach..=reach {
        *s.amp_mut(site)? = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let norm = s.norm();
    s.amps_mut().iter_mut().for_each(|z| *z /= norm);
    Ok(s)
}
