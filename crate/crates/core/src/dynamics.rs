//! Fibered propagation of `H(t) = diag((n+k+t)²) + 𝕍`.
//!
//! The default scheme integrates the interaction-picture amplitudes
//! `c_n = e^{iΦ_n}ψ_n` with an embedded Runge–Kutta pair, which leaves only
//! the coupling band in the right-hand side. Phase differences between coupled
//! sites are formed analytically (`phase_difference`). The midpoint-Magnus
//! scheme works on the original amplitudes with dense exponentials and serves
//! as a cross-check on small truncations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::{apply_exp_hermitian, fiber_hamiltonian};
use crate::integrator::{Dopri5, StepControl};
use crate::phase::{free_phase_factor, phase_difference};
use crate::potential::FourierPotential;
use crate::state::FiberState;

/// Steps never span more than this many radians of the fastest coupled
/// phase difference.
const PHASE_PER_STEP: f64 = 2.0;

/// Added to every row error budget: the propagated and analytic unit factors
/// are rounded independently.
pub const ROUNDING_ALLOWANCE: f64 = 64.0 * f64::EPSILON;

/// Restart the unit-factor recurrence along the fiber this often.
const RECURRENCE_BLOCK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    InteractionPictureRk,
    MagnusMidpoint,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interaction_picture_rk" => Ok(Scheme::InteractionPictureRk),
            "magnus_midpoint" => Ok(Scheme::MagnusMidpoint),
            other => Err(Error::InvalidConfig(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    /// Truncation half-width `N`: sites `[-N, N]`.
    pub half_width: usize,
    /// Width `B` of the monitored outer band.
    pub buffer: usize,
    /// Local error tolerance per unit time.
    pub tol: f64,
    pub leak_max: f64,
    pub scheme: Scheme,
}

impl PropagatorConfig {
    /// Default truncation for window `n` up to horizon `t_max`:
    /// `N = |n| + 2|t_max| + 16·bandwidth`, `B = 4·bandwidth`.
    ///
    /// A reflection at time `τ` sends site `n` to `-n-2τ`, so a single
    /// reflection inside the horizon stays within `|n| + 2|t_max|`; the
    /// margin absorbs the off-resonant spread and the buffer monitors it.
    pub fn for_window(n: i64, t_max: f64, bandwidth: usize) -> Self {
        let reach = n.unsigned_abs() as f64 + 2.0 * t_max.abs();
        let bw = bandwidth.max(1);
        PropagatorConfig {
            half_width: reach.ceil() as usize + 16 * bw,
            buffer: 4 * bw,
            tol: 1e-9,
            leak_max: 1e-6,
            scheme: Scheme::InteractionPictureRk,
        }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        PropagatorConfig { tol, ..self }
    }

    pub fn with_half_width(self, half_width: usize) -> Self {
        PropagatorConfig { half_width, ..self }
    }

    pub fn validate(&self, pot: &FourierPotential) -> Result<()> {
        pot.check_hermitian()?;
        let bw = pot.bandwidth();
        if self.buffer < bw {
            return Err(Error::InvalidConfig(format!(
                "buffer B = {} must be >= potential bandwidth {bw} (N > B >= bandwidth)",
                self.buffer
            )));
        }
        if self.half_width <= self.buffer {
            return Err(Error::InvalidConfig(format!(
                "truncation N = {} must exceed buffer B = {} (N > B >= bandwidth)",
                self.half_width, self.buffer
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol = {} must be > 0", self.tol)));
        }
        if !(self.leak_max > 0.0 && self.leak_max < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "leak_max = {} must lie in (0, 1)",
                self.leak_max
            )));
        }
        Ok(())
    }

    /// Largest `|n|` whose coupling band stays clear of the buffer.
    pub fn safe_site_limit(&self) -> i64 {
        self.half_width as i64 - self.buffer as i64
    }
}

/// Evolves `state` from `state.t` to `t1` under `U(t1, state.t)`.
///
/// Returns `LeakageExceeded` once the buffer mass passes `cfg.leak_max`.
pub fn propagate(
    state: &FiberState,
    t1: f64,
    pot: &FourierPotential,
    cfg: &PropagatorConfig,
) -> Result<FiberState> {
    let out = evolve(state, t1, pot, cfg)?;
    if out.leak > cfg.leak_max {
        return Err(Error::LeakageExceeded {
            leak: out.leak,
            leak_max: cfg.leak_max,
            t: t1,
        });
    }
    Ok(out)
}

/// Like [`propagate`] but never rejects on leakage; the caller inspects
/// `leak` and flags the result itself.
pub fn evolve(
    state: &FiberState,
    t1: f64,
    pot: &FourierPotential,
    cfg: &PropagatorConfig,
) -> Result<FiberState> {
    cfg.validate(pot)?;
    if state.half_width() != cfg.half_width {
        return Err(Error::InvalidConfig(format!(
            "state half-width {} differs from configured N = {}",
            state.half_width(),
            cfg.half_width
        )));
    }
    if pot.is_zero() {
        return Ok(evolve_free(state, t1, cfg.buffer));
    }
    match cfg.scheme {
        Scheme::InteractionPictureRk => evolve_interaction(state, t1, pot, cfg),
        Scheme::MagnusMidpoint => evolve_magnus(state, t1, pot, cfg),
    }
}

/// Exact diagonal evolution for the zero potential.
fn evolve_free(state: &FiberState, t1: f64, buffer: usize) -> FiberState {
    let mut out = state.clone();
    let (k, s) = (state.k, state.t);
    for (site, a) in state.sites().zip(out.amps_mut()) {
        *a *= free_phase_factor(site, k, s, t1);
    }
    out.t = t1;
    out.leak = out.leak.max(out.buffer_mass(buffer));
    out
}

struct InteractionRhs {
    k: f64,
    s: f64,
    half_width: i64,
    /// `(d, V̂(d)/√(2π))` for `d > 0`.
    couplings: Vec<(i64, Complex64)>,
    factors: Vec<Complex64>,
}

impl InteractionRhs {
    fn new(pot: &FourierPotential, k: f64, s: f64, half_width: usize) -> Self {
        let couplings = pot
            .iter()
            .filter(|&(d, _)| d > 0)
            .map(|(d, _)| (d, pot.coupling(d)))
            .collect();
        InteractionRhs {
            k,
            s,
            half_width: half_width as i64,
            couplings,
            factors: vec![Complex64::new(0.0, 0.0); 2 * half_width + 1],
        }
    }

    /// `ċ_n = -i Σ_d W_d e^{i(Φ_n - Φ_{n-d})} c_{n-d}`.
    fn eval(&mut self, tau: f64, c: &[Complex64], dc: &mut [Complex64]) {
        dc.fill(Complex64::new(0.0, 0.0));
        let n_max = self.half_width;
        let u = tau - self.s;
        for &(d, w) in &self.couplings {
            // factors[j] = e^{iθ(n, n-d)} for n = -N + d + j
            let len = (2 * n_max + 1 - d) as usize;
            let first = -n_max + d;
            let step = Complex64::from_polar(1.0, 2.0 * d as f64 * u);
            let f = &mut self.factors[..len];
            for (block, chunk) in f.chunks_mut(RECURRENCE_BLOCK).enumerate() {
                let n0 = first + (block * RECURRENCE_BLOCK) as i64;
                let mut z = Complex64::from_polar(1.0, phase_difference(n0, n0 - d, self.k, self.s, tau));
                for slot in chunk.iter_mut() {
                    *slot = z;
                    z *= step;
                }
            }
            let mi_w = Complex64::new(0.0, -1.0) * w;
            let mi_wc = Complex64::new(0.0, -1.0) * w.conj();
            let d = d as usize;
            for j in 0..len {
                // n = first + j has index j + d, n - d has index j
                let z = f[j];
                dc[j + d] += mi_w * z * c[j];
                dc[j] += mi_wc * z.conj() * c[j + d];
            }
        }
    }

    /// Fastest coupled phase difference `max |E_n - E_{n-d}|` over `[a, b]`.
    fn max_frequency(&self, a: f64, b: f64) -> f64 {
        let n = self.half_width as f64;
        let mut w: f64 = 0.0;
        for &(d, _) in &self.couplings {
            let d = d as f64;
            for tau in [a, b] {
                let hi = (2.0 * (n + self.k + tau) - d).abs();
                let lo = (2.0 * (-n + d + self.k + tau) - d).abs();
                w = w.max(d * hi.max(lo));
            }
        }
        w
    }
}

fn evolve_interaction(
    state: &FiberState,
    t1: f64,
    pot: &FourierPotential,
    cfg: &PropagatorConfig,
) -> Result<FiberState> {
    let (k, s) = (state.k, state.t);
    let mut rhs = InteractionRhs::new(pot, k, s, cfg.half_width);
    let mut c = state.amps().to_vec();
    let mut leak = state.leak.max(state.buffer_mass(cfg.buffer));
    let buffer = cfg.buffer.min(c.len());
    let h_init = PHASE_PER_STEP / rhs.max_frequency(s, s).max(1.0);
    let cap_rhs = InteractionRhs::new(pot, k, s, cfg.half_width);
    let ctrl = StepControl { tol: cfg.tol, h_init };
    let mut rk = Dopri5::new(c.len());
    let stats = rk.integrate(
        |tau, y, dy| rhs.eval(tau, y, dy),
        s,
        &mut c,
        t1,
        ctrl,
        |a, b| PHASE_PER_STEP / cap_rhs.max_frequency(a, b).max(1e-300),
        |_, y| {
            let n = y.len();
            let m: f64 = y[..buffer].iter().chain(&y[n - buffer..]).map(|z| z.norm_sqr()).sum();
            leak = leak.max(m.sqrt());
            Ok(())
        },
    )?;
    let mut out = FiberState::from_amps(c, k, t1)?;
    for (site, a) in state.sites().zip(out.amps_mut()) {
        *a *= free_phase_factor(site, k, s, t1);
    }
    out.err = state.err + stats.err_sum;
    out.leak = leak;
    Ok(out)
}

/// Midpoint-Magnus with step doubling: each step compares one exponential
/// of size `h` with two of size `h/2` and keeps the extrapolated pair.
fn evolve_magnus(
    state: &FiberState,
    t1: f64,
    pot: &FourierPotential,
    cfg: &PropagatorConfig,
) -> Result<FiberState> {
    let (k, mut t) = (state.k, state.t);
    let n = cfg.half_width;
    let span = t1 - t;
    let dir = span.signum();
    let mut psi = state.amps().to_vec();
    let mut err_sum = 0.0;
    let mut leak = state.leak.max(state.buffer_mass(cfg.buffer));
    let mut h: f64 = (span.abs() / 16.0).min(0.05);
    let step = |psi: &[Complex64], t: f64, h: f64| {
        let mut v = psi.to_vec();
        apply_exp_hermitian(fiber_hamiltonian(pot, n, k, t + 0.5 * h), h, &mut v);
        v
    };
    while (t1 - t).abs() > 1e-14 * t1.abs().max(1.0) {
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        let hs = if last { t1 - t } else { dir * h };
        if hs.abs() < 1e-12 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h: hs });
        }
        let coarse = step(&psi, t, hs);
        let half = step(&psi, t, 0.5 * hs);
        let fine = step(&half, t + 0.5 * hs, 0.5 * hs);
        let diff: Vec<Complex64> = fine.iter().zip(&coarse).map(|(f, c)| (f - c) / 3.0).collect();
        let err = crate::state::norm2(&diff);
        let allowed = cfg.tol * hs.abs();
        if err <= allowed {
            for ((p, f), d) in psi.iter_mut().zip(&fine).zip(&diff) {
                *p = f + d;
            }
            t = if last { t1 } else { t + hs };
            err_sum += err;
            let st = FiberState::from_amps(psi.clone(), k, t)?;
            leak = leak.max(st.buffer_mass(cfg.buffer));
            if !last {
                h = hs.abs() * (0.9 * (allowed / err.max(1e-300)).powf(0.5)).clamp(0.2, 3.0);
            }
        } else {
            h = hs.abs() * (0.9 * (allowed / err).powf(0.5)).clamp(0.1, 0.9);
        }
    }
    let mut out = FiberState::from_amps(psi, k, t1)?;
    out.err = state.err + err_sum;
    out.leak = leak;
    Ok(out)
}

/// Row `n` of `U(t, 0)` on fiber `k`, obtained as the conjugate of column
/// `n` of `U(0, t)`.
pub fn propagator_row(
    n: i64,
    t: f64,
    pot: &FourierPotential,
    cfg: &PropagatorConfig,
    k: f64,
) -> Result<FiberState> {
    check_row_site(n, cfg)?;
    let start = FiberState::unit(cfg.half_width, n, k, t)?;
    let back = propagate(&start, 0.0, pot, cfg)?;
    Ok(conjugate_row(back, t))
}

fn conjugate_row(back: FiberState, t: f64) -> FiberState {
    let (k, err, leak) = (back.k, back.err, back.leak);
    let amps = back.into_amps().into_iter().map(|z| z.conj()).collect();
    let mut row = FiberState::from_amps(amps, k, t).expect("odd width");
    row.err = err;
    row.leak = leak;
    row
}

fn check_row_site(n: i64, cfg: &PropagatorConfig) -> Result<()> {
    let limit = cfg.safe_site_limit();
    if n.abs() > limit {
        return Err(Error::SiteOutOfRange { site: n, limit });
    }
    Ok(())
}

/// Row `n` of `U(t,0) - U_0(t,0)` on fiber `k` measured without the
/// leakage rejection; the row's `leak` says whether it can be trusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowDeviation {
    /// `‖P_n(U(t) - U_0(t))‖` on the fiber.
    pub dev_norm: f64,
    /// `|⟨n|U(t,0)|n⟩|²`.
    pub window_prob: f64,
    pub err: f64,
    pub leak: f64,
}

pub fn row_deviation(
    n: i64,
    t: f64,
    pot: &FourierPotential,
    cfg: &PropagatorConfig,
    k: f64,
) -> Result<RowDeviation> {
    check_row_site(n, cfg)?;
    let start = FiberState::unit(cfg.half_width, n, k, t)?;
    let row = conjugate_row(evolve(&start, 0.0, pot, cfg)?, t);
    Ok(deviation_of_row(&row, n, k, t))
}

/// Deviation of a propagator row from the free row `e^{-iΦ_n(t)} δ_{n·}`.
pub fn deviation_of_row(row: &FiberState, n: i64, k: f64, t: f64) -> RowDeviation {
    let mut diff = row.amps().to_vec();
    let i = row.index_of(n).expect("row site inside fiber");
    diff[i] -= free_phase_factor(n, k, 0.0, t);
    RowDeviation {
        dev_norm: crate::state::norm2(&diff),
        window_prob: row.amps()[i].norm_sqr(),
        err: row.err + row.leak + ROUNDING_ALLOWANCE,
        leak: row.leak,
    }
}

/// `Tψ(n) = conj ψ(-n)`; requires the symmetric range, which every
/// [`FiberState`] has.
pub fn time_reverse(state: &FiberState) -> FiberState {
    state.time_reverse()
}
