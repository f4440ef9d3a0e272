//! Analysis local to one crossing interval `I_l = l/2 + [-1/4, 1/4)`.
//!
//! In fiber `k = 0` the levels `n` and `-n-l` are degenerate at `t* = l/2`,
//! their energy difference is `(2n+l)(2t-l)` and they are coupled directly by
//! `V̂(2n+l)/√(2π)`. Every other level `m` stays separated from `n` by
//! `|(m-n)(m+n+2t)|`, which is what the reduced resolvent inverts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::banded::BandedMatrix;
use crate::dynamics::{propagate, PropagatorConfig};
use crate::error::{Error, Result};
use crate::integrator::{Dopri5, StepControl};
use crate::phase::{cis_dd, free_phase_dd, free_phase_factor, phase_difference};
use crate::potential::FourierPotential;
use crate::state::FiberState;

/// Smallest admissible `|(m-n)(m+n+2t)|` off the crossing pair.
pub const RESOLVENT_GUARD: f64 = 1e-9;

/// `[l/2 - 1/4, l/2 + 1/4)`.
pub fn crossing_interval(l: i64) -> (f64, f64) {
    let mid = 0.5 * l as f64;
    (mid - 0.25, mid + 0.25)
}

fn check_in_interval(l: i64, t: f64) -> Result<()> {
    let (lo, hi) = crossing_interval(l);
    // the right edge is admitted so the closed integration range works
    if !(lo..=hi).contains(&t) {
        return Err(Error::OutsideCrossingInterval { t, l, lo, hi });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEvent {
    pub n: i64,
    pub l: i64,
    pub t_star: f64,
    /// `(n, -n-l)`.
    pub pair: (i64, i64),
    /// `⟨n|𝕍|-n-l⟩ = V̂(2n+l)/√(2π)`.
    pub coupling: Complex64,
    /// `φ''`, i.e. `2(2n+l)`.
    pub curvature: f64,
}

impl CrossingEvent {
    pub fn new(n: i64, l: i64, pot: &FourierPotential) -> Result<Self> {
        let a = 2 * n + l;
        if a == 0 {
            return Err(Error::SelfCrossing { n, l });
        }
        Ok(CrossingEvent {
            n,
            l,
            t_star: 0.5 * l as f64,
            pair: (n, -n - l),
            coupling: pot.coupling(a),
            curvature: 2.0 * a as f64,
        })
    }

    /// `2n + l`.
    pub fn gap_index(&self) -> i64 {
        2 * self.n + self.l
    }

    /// Exact degeneracy check in integers: `(2n+l)² = (-2n-l)²` after
    /// scaling both energies by 4.
    pub fn is_degenerate(&self) -> bool {
        let (n, m) = self.pair;
        let e_n = 2 * n + self.l;
        let e_m = 2 * m + self.l;
        e_n * e_n == e_m * e_m
    }
}

/// Crossings of level `n >= 0` with `t* = l/2 <= t_max`, skipping `2n+l = 0`.
pub fn crossing_schedule(n: i64, t_max: f64, pot: &FourierPotential) -> Result<Vec<CrossingEvent>> {
    if n < 0 {
        return Err(Error::InvalidConfig(format!(
            "crossing_schedule needs n >= 0 (got {n}); reflect with time reversal"
        )));
    }
    let l_max = (2.0 * t_max).floor().max(-1.0) as i64;
    (0..=l_max)
        .filter(|&l| 2 * n + l != 0)
        .map(|l| CrossingEvent::new(n, l, pot))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseValue {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `φ(t) = ∫_0^t (E_n - E_{-n-l}) = (2n+l)(t² - lt)` and its derivatives.
pub fn phase_function(n: i64, l: i64, t: f64) -> PhaseValue {
    let a = (2 * n + l) as f64;
    let l = l as f64;
    PhaseValue {
        value: a * t * (t - l),
        d1: a * (2.0 * t - l),
        d2: 2.0 * a,
    }
}

/// Leading-order transition magnitude `|v|·√(2π/|φ''|) = |V̂(2n+l)| / √(2(2n+l))`.
pub fn stationary_phase_amplitude(event: &CrossingEvent) -> f64 {
    if event.coupling.norm() == 0.0 {
        return 0.0;
    }
    event.coupling.norm() * (2.0 * PI / event.curvature.abs()).sqrt()
}

/// Amplitudes of the isolated pair after a two-level evolution started in
/// level `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevel {
    /// `x₁`, amplitude left in level `n`.
    pub stay: Complex64,
    /// `x₂`, amplitude transferred to `-n-l`.
    pub off: Complex64,
}

impl TwoLevel {
    pub fn norm_defect(&self) -> f64 {
        (self.stay.norm_sqr() + self.off.norm_sqr() - 1.0).abs()
    }
}

/// Two-level reduction of the crossing on a window inside `I_l`.
pub fn two_level_oracle(event: &CrossingEvent, window: (f64, f64), tol: f64) -> Result<TwoLevel> {
    let (ta, tb) = window;
    check_in_interval(event.l, ta)?;
    check_in_interval(event.l, tb)?;
    if ta >= tb {
        return Err(Error::InvalidConfig(format!("empty window [{ta}, {tb}]")));
    }
    integrate_pair(event, ta, tb, tol)
}

/// The same two-level evolution across `t* ± half_width`, ignoring the
/// interval bounds. With a wide window this is the full passage whose
/// transition magnitude the stationary-phase formula predicts.
pub fn crossing_passage(event: &CrossingEvent, half_width: f64, tol: f64) -> Result<TwoLevel> {
    integrate_pair(event, event.t_star - half_width, event.t_star + half_width, tol)
}

fn integrate_pair(event: &CrossingEvent, ta: f64, tb: f64, tol: f64) -> Result<TwoLevel> {
    let (n, m) = event.pair;
    let v = event.coupling;
    let mut y = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    if v.norm() == 0.0 {
        return Ok(TwoLevel {
            stay: free_phase_factor(n, 0.0, ta, tb),
            off: Complex64::new(0.0, 0.0),
        });
    }
    let mi = Complex64::new(0.0, -1.0);
    let rhs = |tau: f64, c: &[Complex64], dc: &mut [Complex64]| {
        let z = Complex64::from_polar(1.0, phase_difference(n, m, 0.0, ta, tau));
        dc[0] = mi * v * z * c[1];
        dc[1] = mi * v.conj() * z.conj() * c[0];
    };
    let freq = |a: f64, b: f64| {
        let d1 = |t: f64| phase_function(n, event.l, t).d1.abs();
        d1(a).max(d1(b))
    };
    let ctrl = StepControl { tol, h_init: 1e-3 };
    Dopri5::new(2).integrate(
        rhs,
        ta,
        &mut y,
        tb,
        ctrl,
        |a, b| 2.0 / freq(a, b).max(1e-12),
        |_, _| Ok(()),
    )?;
    Ok(TwoLevel {
        stay: free_phase_factor(n, 0.0, ta, tb) * y[0],
        off: free_phase_factor(m, 0.0, ta, tb) * y[1],
    })
}

/// `R̂_l(t) = (H_0(t) - E_n(t))^{-1}` restricted off `{n, -n-l}` (fiber k = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedResolvent {
    pub n: i64,
    pub l: i64,
    pub t: f64,
}

impl ReducedResolvent {
    pub fn new(n: i64, l: i64, t: f64) -> Result<Self> {
        check_in_interval(l, t)?;
        Ok(ReducedResolvent { n, l, t })
    }

    fn excluded(&self, m: i64) -> bool {
        m == self.n || m == -self.n - self.l
    }

    /// `E_m - E_n = (m-n)(m+n+2t)`.
    pub fn gap(&self, m: i64) -> f64 {
        (m - self.n) as f64 * ((m + self.n) as f64 + 2.0 * self.t)
    }

    pub fn entry(&self, m: i64) -> f64 {
        if self.excluded(m) {
            0.0
        } else {
            1.0 / self.gap(m)
        }
    }

    /// `d/dt` of [`entry`](Self::entry): `-2 / ((m-n)(m+n+2t)²)`.
    pub fn derivative(&self, m: i64) -> f64 {
        if self.excluded(m) {
            return 0.0;
        }
        let s = (m + self.n) as f64 + 2.0 * self.t;
        -2.0 / ((m - self.n) as f64 * s * s)
    }

    fn check_columns(&self, cols: impl Iterator<Item = i64>) -> Result<()> {
        for m in cols {
            if !self.excluded(m) && self.gap(m).abs() < RESOLVENT_GUARD {
                return Err(Error::NearSingular {
                    site: m,
                    gap: self.gap(m).abs(),
                });
            }
        }
        Ok(())
    }

    pub fn as_matrix(&self, half_width: usize) -> BandedMatrix {
        BandedMatrix::diagonal(half_width, |m| Complex64::new(self.entry(m), 0.0))
    }
}

/// `Ã_l = P_n A R̂_l(t)`; the result has row `n` only.
pub fn twiddle_apply(a: &BandedMatrix, n: i64, l: i64, t: f64) -> Result<BandedMatrix> {
    let r = ReducedResolvent::new(n, l, t)?;
    r.check_columns(a.row_columns(n))?;
    Ok(a.keep_row(n).scale_columns(|m| Complex64::new(r.entry(m), 0.0)))
}

/// `H_0(t) - E_n(t)` on the fiber (k = 0).
pub fn shifted_free_hamiltonian(half_width: usize, n: i64, t: f64) -> BandedMatrix {
    BandedMatrix::diagonal(half_width, |m| {
        Complex64::new((m - n) as f64 * ((m + n) as f64 + 2.0 * t), 0.0)
    })
}

/// `P_n A ℙ^⊥_{n,l}`.
pub fn project_off_pair(a: &BandedMatrix, n: i64, l: i64) -> BandedMatrix {
    a.keep_row(n).scale_columns(|m| {
        let keep = m != n && m != -n - l;
        Complex64::new(if keep { 1.0 } else { 0.0 }, 0.0)
    })
}

/// Operator norm of `R̂_l(t) 𝕍` on the truncated fiber.
pub fn resolvent_potential_norm(pot: &FourierPotential, n: i64, l: i64, t: f64, half_width: usize) -> Result<f64> {
    let r = ReducedResolvent::new(n, l, t)?;
    let v = BandedMatrix::convolution(pot, half_width);
    Ok(v.scale_rows(|m| Complex64::new(r.entry(m), 0.0)).operator_norm())
}

/// Both sides of the double integration-by-parts identity for the
/// off-pair transition integral, applied to one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbpSides {
    /// `[∫ U_0* P_n 𝕍 ℙ^⊥ U_0 Ω ψ]_n`.
    pub lhs: Complex64,
    /// Integral terms plus boundary terms.
    pub rhs: Complex64,
    pub panels: usize,
    /// Propagation error budget of the state used at the nodes.
    pub prop_err: f64,
}

impl IbpSides {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// Operators entering the identity at time `t`.
struct IbpOperators {
    lhs: BandedMatrix,
    rhs: BandedMatrix,
    boundary: BandedMatrix,
}

fn ibp_operators(n: i64, l: i64, t: f64, v: &BandedMatrix) -> Result<IbpOperators> {
    let r = ReducedResolvent::new(n, l, t)?;
    let hw = v.half_width();
    r.check_columns(v.sites())?;
    let rmat = r.as_matrix(hw);
    let rdot = BandedMatrix::diagonal(hw, |m| Complex64::new(r.derivative(m), 0.0));
    let pn_v = v.keep_row(n);
    // Ṽ = P_n 𝕍 R̂,  X = (Ṽ𝕍)~ = P_n 𝕍 R̂ 𝕍 R̂
    let vt = pn_v.mul(&rmat);
    let vt_v = vt.mul(v);
    let x = vt_v.mul(&rmat);
    let vt_dot = pn_v.mul(&rdot);
    let x_dot = pn_v.mul(&rdot).mul(v).mul(&rmat).add(&vt_v.mul(&rdot));
    let pair = BandedMatrix::diagonal(hw, |m| {
        Complex64::new(if m == n || m == -n - l { 1.0 } else { 0.0 }, 0.0)
    });
    let i = Complex64::new(0.0, 1.0);
    let rhs = x
        .mul(v)
        .add(&x_dot.scale(i))
        .sub(&vt_v.mul(&pair))
        .sub(&vt_dot.scale(i));
    Ok(IbpOperators {
        lhs: project_off_pair(v, n, l),
        rhs,
        boundary: vt.sub(&x).scale(i),
    })
}

/// Evaluates both sides with `panels` Gauss–Legendre panels on
/// `[l/2 - 1/4, l/2 + 1/4]`, starting from a seeded random state at the
/// left edge.
pub fn ibp_sides(
    n: i64,
    l: i64,
    pot: &FourierPotential,
    cfg: &PropagatorConfig,
    panels: usize,
    seed: u64,
) -> Result<IbpSides> {
    let (alpha, beta) = crossing_interval(l);
    let hw = cfg.half_width;
    let v = BandedMatrix::convolution(pot, hw);
    // support kept well inside the window so the buffer stays empty
    let reach = (cfg.safe_site_limit() - pot.bandwidth() as i64).min(hw as i64 / 2);
    let mut state = random_state(hw, reach, alpha, seed)?;
    let (nodes, weights) = gauss_legendre(8);
    let width = (beta - alpha) / panels as f64;
    // phase reference at α; a common factor on both sides
    let u0_star = |t: f64| {
        cis_dd(free_phase_dd(n, 0.0, alpha, t))
    };
    let component = |op: &BandedMatrix, psi: &FiberState| -> Complex64 {
        op.row_columns(n).map(|j| op.get(n, j) * psi.amp(j)).sum()
    };
    let boundary = |t: f64, psi: &FiberState| -> Result<Complex64> {
        let ops = ibp_operators(n, l, t, &v)?;
        Ok(u0_star(t) * component(&ops.boundary, psi))
    };
    let b_alpha = boundary(alpha, &state)?;
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = alpha + p as f64 * width;
        for (x, w) in nodes.iter().zip(&weights) {
            let t = a + 0.5 * width * (x + 1.0);
            state = propagate(&state, t, pot, cfg)?;
            let ops = ibp_operators(n, l, t, &v)?;
            let phase = u0_star(t) * (0.5 * width * w);
            lhs += phase * component(&ops.lhs, &state);
            rhs += phase * component(&ops.rhs, &state);
        }
    }
    state = propagate(&state, beta, pot, cfg)?;
    rhs += boundary(beta, &state)? - b_alpha;
    Ok(IbpSides {
        lhs,
        rhs,
        panels,
        prop_err: state.err + state.leak,
    })
}

/// Residual of the integration-by-parts identity, refining the panel count
/// until both sides change by less than `quad_tol`.
pub fn ibp_residual(
    n: i64,
    l: i64,
    pot: &FourierPotential,
    cfg: &PropagatorConfig,
    quad_tol: f64,
) -> Result<f64> {
    const SEED: u64 = 0x1b9_2024;
    const MAX_PANELS: usize = 512;
    let mut prev = ibp_sides(n, l, pot, cfg, 2, SEED)?;
    let mut panels = 4;
    loop {
        let cur = ibp_sides(n, l, pot, cfg, panels, SEED)?;
        let change = (cur.lhs - prev.lhs).norm().max((cur.rhs - prev.rhs).norm());
        if change < quad_tol {
            return Ok(cur.residual());
        }
        if panels >= MAX_PANELS {
            return Err(Error::Quadrature { panels, change });
        }
        prev = cur;
        panels *= 2;
    }
}

fn random_state(half_width: usize, reach: i64, t: f64, seed: u64) -> Result<FiberState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = FiberState::zeros(half_width, 0.0, t);
    let reach = reach.max(0);
    for site in -reach..=reach {
        *s.amp_mut(site)? = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let norm = s.norm();
    s.amps_mut().iter_mut().for_each(|z| *z /= norm);
    Ok(s)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Second-order return sum into level `n` (scaled by 2π), split into the
/// direct sum and its even-in-`p` form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backscatter {
    /// `Σ_p |V̂(p)|² / (p(p+s))`, `s = 2n + 2t`, over `p ∉ {0, ±(2n+l)}`.
    pub raw: f64,
    /// `Σ_p |V̂(p)|² / (p² - s²)` over the same `p`.
    pub symmetric: f64,
}

pub fn backscatter_symmetric_part(n: i64, l: i64, t: f64, pot: &FourierPotential) -> Result<Backscatter> {
    check_in_interval(l, t)?;
    let a = 2 * n + l;
    let s = 2.0 * n as f64 + 2.0 * t;
    let mut raw = 0.0;
    let mut symmetric = 0.0;
    for (p, v) in pot.iter() {
        if p == a || p == -a {
            continue;
        }
        let pf = p as f64;
        let den = pf * (pf + s);
        if den.abs() < RESOLVENT_GUARD {
            return Err(Error::NearSingular { site: n + p, gap: den.abs() });
        }
        raw += v.norm_sqr() / den;
        symmetric += v.norm_sqr() / (pf * pf - s * s);
    }
    Ok(Backscatter { raw, symmetric })
}

/// `2π ⟨n|𝕍 R̂_l 𝕍|n⟩` summed over intermediate sites `m ∉ {n, -n-l}`.
pub fn backscatter_kernel(n: i64, l: i64, t: f64, pot: &FourierPotential) -> Result<f64> {
    let r = ReducedResolvent::new(n, l, t)?;
    let bw = pot.bandwidth() as i64;
    Ok((n - bw..=n + bw)
        .map(|m| pot.coefficient(n - m).norm_sqr() * r.entry(m))
        .sum())
}

/// Resonant part excluded from [`Backscatter::raw`]:
/// `|V̂(2n+l)|² / ((2n+l)(4n+l+2t))`.
pub fn backscatter_resonant_term(n: i64, l: i64, t: f64, pot: &FourierPotential) -> f64 {
    let a = 2 * n + l;
    pot.coefficient(a).norm_sqr() / (a as f64 * (2.0 * n as f64 + a as f64 + 2.0 * t))
}
