//! Embedded Dormand–Prince 5(4) pair for complex linear systems.
//!
//! Error control is per unit time: a step of size `h` is accepted when the
//! ℓ² norm of the embedded error estimate is at most `tol·|h|`, so the sum of
//! accepted estimates stays below `tol·|t1 - t0|`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::norm2;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// b - b* (fifth minus fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub tol: f64,
    /// Initial step magnitude; the cap still applies.
    pub h_init: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Sum of accepted local error estimates.
    pub err_sum: f64,
    /// Magnitude of the last accepted step, useful to restart the controller.
    pub h_last: f64,
}

/// Reusable stage storage for one system size.
pub struct Dopri5 {
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    y_new: Vec<Complex64>,
    err: Vec<Complex64>,
}

impl Dopri5 {
    pub fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Dopri5 {
            k: std::array::from_fn(|_| z.clone()),
            tmp: z.clone(),
            y_new: z.clone(),
            err: z,
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
    ///
    /// `max_step(t, t_next)` caps the step magnitude over a prospective step;
    /// `after_step(t, y)` runs after every accepted step and may abort.
    #[allow(clippy::too_many_arguments)]
    pub fn integrate<F, C, A>(
        &mut self,
        mut f: F,
        t0: f64,
        y: &mut [Complex64],
        t1: f64,
        ctrl: StepControl,
        mut max_step: C,
        mut after_step: A,
    ) -> Result<IntegrationStats>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
        C: FnMut(f64, f64) -> f64,
        A: FnMut(f64, &[Complex64]) -> Result<()>,
    {
        let mut stats = IntegrationStats::default();
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(stats);
        }
        let dir = span.signum();
        let mut t = t0;
        let mut h = ctrl.h_init.abs().min(span.abs());
        f(t, y, &mut self.k[0]);
        loop {
            let remaining = (t1 - t).abs();
            if remaining <= 1e-14 * t1.abs().max(1.0) {
                break;
            }
            let cap = max_step(t, t + dir * h.min(remaining));
            h = h.min(cap).min(remaining);
            let min_h = 1e-13 * t.abs().max(1.0);
            if h < min_h {
                return Err(Error::StepUnderflow { t, h });
            }
            let last = h >= remaining;
            let hs = if last { t1 - t } else { dir * h };
            let err = self.step(&mut f, t, y, hs);
            let allowed = ctrl.tol * hs.abs();
            if err <= allowed {
                t = if last { t1 } else { t + hs };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                stats.accepted += 1;
                stats.err_sum += err;
                stats.h_last = hs.abs();
                after_step(t, y)?;
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * (allowed / err).powf(0.25)).clamp(0.2, 5.0)
                };
                if !last {
                    h = hs.abs() * fac;
                }
            } else {
                stats.rejected += 1;
                h = hs.abs() * (0.9 * (allowed / err).powf(0.25)).clamp(0.1, 0.9);
            }
        }
        Ok(stats)
    }

    /// One trial step; writes the fifth-order solution to `y_new` and the
    /// FSAL derivative to `k[6]`, returns the error-estimate norm.
    fn step<F>(&mut self, f: &mut F, t: f64, y: &[Complex64], h: f64) -> f64
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let tmp = &mut self.tmp;
        let n = y.len();
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (h * A21);
        }
        f(t + C2 * h, tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
        }
        f(t + C3 * h, tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
        }
        f(t + C4 * h, tmp, k4);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
        }
        f(t + C5 * h, tmp, k5);
        for i in 0..n {
            tmp[i] = y[i]
                + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
        }
        f(t + h, tmp, k6);
        let y_new = &mut self.y_new;
        for i in 0..n {
            y_new[i] =
                y[i] + (k1[i] * B1 + k3[i] * B3 + k4[i] * B4 + k5[i] * B5 + k6[i] * B6) * h;
        }
        f(t + h, y_new, k7);
        let err = &mut self.err;
        for i in 0..n {
            err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                * h;
        }
        norm2(err)
    }
}
