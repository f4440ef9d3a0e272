//! Brute-force reference propagator: one exact exponential of the midpoint
//! Hamiltonian per fixed step.

use crate::error::{Error, Result};
use crate::expm::{apply_exp_hermitian, fiber_hamiltonian};
use crate::potential::FourierPotential;
use crate::state::FiberState;

pub const MAX_DENSE_HALF_WIDTH: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseConfig {
    pub half_width: usize,
    /// Fixed step; the last step is shortened to land on the target time.
    pub h: f64,
}

/// `ψ ← exp(-i h H(t + h/2)) ψ` repeated `⌈|t1 - t0| / h⌉` times.
pub fn dense_propagate(
    state: &FiberState,
    t1: f64,
    pot: &FourierPotential,
    dc: &DenseConfig,
) -> Result<FiberState> {
    if dc.half_width > MAX_DENSE_HALF_WIDTH {
        return Err(Error::DenseTooLarge {
            got: dc.half_width,
            max: MAX_DENSE_HALF_WIDTH,
        });
    }
    if state.half_width() != dc.half_width {
        return Err(Error::InvalidConfig(format!(
            "state half-width {} differs from dense N = {}",
            state.half_width(),
            dc.half_width
        )));
    }
    if dc.h.is_nan() || dc.h <= 0.0 {
        return Err(Error::InvalidConfig(format!("dense step h = {} must be > 0", dc.h)));
    }
    let span = t1 - state.t;
    let steps = (span.abs() / dc.h - 1e-9).ceil().max(0.0) as usize;
    let dir = span.signum();
    let mut psi = state.amps().to_vec();
    let mut t = state.t;
    for i in 0..steps {
        let h = if i + 1 == steps { t1 - t } else { dir * dc.h };
        let hm = fiber_hamiltonian(pot, dc.half_width, state.k, t + 0.5 * h);
        apply_exp_hermitian(hm, h, &mut psi);
        t += h;
    }
    FiberState::from_amps(psi, state.k, t1)
}

/// Richardson-extrapolated oracle result from steps `h`, `h/2`, `h/4`.
#[derive(Debug, Clone)]
pub struct DenseReference {
    /// Extrapolation of the two finest runs.
    pub state: FiberState,
    /// Distance between the two extrapolations, an upper estimate of the
    /// error of `state`.
    pub err: f64,
    /// `‖ψ_h - ψ_{h/2}‖ / ‖ψ_{h/2} - ψ_{h/4}‖`; close to 4 for a second
    /// order method in its asymptotic range.
    pub ratio: f64,
}

pub fn dense_reference(
    state: &FiberState,
    t1: f64,
    pot: &FourierPotential,
    dc: &DenseConfig,
) -> Result<DenseReference> {
    let run = |h: f64| dense_propagate(state, t1, pot, &DenseConfig { h, ..*dc });
    let u1 = run(dc.h)?;
    let u2 = run(0.5 * dc.h)?;
    let u4 = run(0.25 * dc.h)?;
    let extrapolate = |fine: &FiberState, coarse: &FiberState| {
        let amps = fine
            .amps()
            .iter()
            .zip(coarse.amps())
            .map(|(f, c)| f + (f - c) / 3.0)
            .collect();
        FiberState::from_amps(amps, state.k, t1)
    };
    let r_coarse = extrapolate(&u2, &u1)?;
    let r_fine = extrapolate(&u4, &u2)?;
    let ratio = u1.distance(&u2) / u2.distance(&u4);
    let mut out = r_fine;
    out.err = r_coarse.distance(&out);
    Ok(DenseReference {
        err: out.err,
        state: out,
        ratio,
    })
}
