//! The 2π-periodic potential in Fourier form and its lattice convolution.
//!
//! Coefficients follow `V̂(m) = (2π)^{-1/2} ∫_0^{2π} e^{-imx} V(x) dx`, so a
//! potential `2λ cos x` has `V̂(±1) = λ√(2π)` and the convolution operator
//! `(𝕍ψ)(n) = (2π)^{-1/2} Σ_m V̂(n-m) ψ(m)` has off-diagonal entries `λ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::state::{compensated_sum, FiberState};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Finite set of Fourier coefficients of a real periodic potential.
///
/// Invariants: `V̂(-m) = conj V̂(m)`, `V̂(0) = 0`, finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPotential {
    coeffs: BTreeMap<i64, Complex64>,
}

impl Default for FourierPotential {
    fn default() -> Self {
        Self::zero()
    }
}

impl FourierPotential {
    pub fn zero() -> Self {
        FourierPotential {
            coeffs: BTreeMap::new(),
        }
    }

    /// `V(x) = 2λ cos x`.
    pub fn cosine(lambda: f64) -> Self {
        Self::from_positive(&[(1, Complex64::new(lambda * SQRT_2PI, 0.0))]).0
    }

    /// Builds the potential from its non-negative frequencies; negative ones
    /// are filled by Hermitian symmetry. A nonzero `V̂(0)` is dropped and its
    /// energy shift `V̂(0)/√(2π)` returned alongside.
    pub fn from_positive(entries: &[(i64, Complex64)]) -> (Self, f64) {
        let mut coeffs = BTreeMap::new();
        let mut offset = 0.0;
        for &(m, v) in entries {
            if m == 0 {
                offset += v.re / SQRT_2PI;
                continue;
            }
            let (m, v) = if m < 0 { (-m, v.conj()) } else { (m, v) };
            if v != Complex64::new(0.0, 0.0) {
                *coeffs.entry(m).or_insert(Complex64::new(0.0, 0.0)) += v;
            }
        }
        let neg: Vec<_> = coeffs.iter().map(|(&m, v)| (-m, v.conj())).collect();
        coeffs.extend(neg);
        if offset != 0.0 {
            log::info!("subtracted constant {offset} from the potential (V̂(0) = 0)");
        }
        (FourierPotential { coeffs }, offset)
    }

    /// Stores the coefficients exactly as given, without enforcing any
    /// invariant. Only meant for fault injection in the verification suite.
    pub fn from_raw_unchecked(coeffs: BTreeMap<i64, Complex64>) -> Self {
        FourierPotential { coeffs }
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let tol = 1e-14 * self.coeffs.values().map(|v| v.norm()).fold(1.0, f64::max);
        for (&m, v) in &self.coeffs {
            let mirror = self.coefficient(-m);
            if m == 0 || (mirror - v.conj()).norm() > tol {
                return Err(Error::HermitianSymmetry { freq: m });
            }
        }
        Ok(())
    }

    /// Multiplies every coefficient by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|_| lambda != 0.0)
            .map(|(&m, v)| (m, v * lambda))
            .collect();
        FourierPotential { coeffs }
    }

    /// Reflected potential `x ↦ V(-x)`, i.e. `V̂(m) ↦ V̂(-m)`.
    pub fn reflected(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&m, v)| (-m, *v)).collect();
        FourierPotential { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|m|` with a nonzero coefficient.
    pub fn bandwidth(&self) -> usize {
        self.coeffs
            .keys()
            .map(|m| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn coefficient(&self, m: i64) -> Complex64 {
        self.coeffs
            .get(&m)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Matrix element `⟨n|𝕍|n-d⟩ = V̂(d)/√(2π)`.
    pub fn coupling(&self, d: i64) -> Complex64 {
        self.coefficient(d) / SQRT_2PI
    }

    /// Nonzero `(m, V̂(m))` pairs, both signs, ascending in `m`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&m, &v)| (m, v))
    }

    /// `‖V‖_α = (Σ_m |V̂(m)|² (1+m²)^α)^{1/2}`.
    pub fn sobolev_norm(&self, alpha: f64) -> f64 {
        assert!(alpha >= 0.0, "sobolev_norm needs alpha >= 0");
        compensated_sum(
            self.coeffs
                .iter()
                .map(|(&m, v)| v.norm_sqr() * (1.0 + (m * m) as f64).powf(alpha)),
        )
        .sqrt()
    }

    /// `V(x) = (2π)^{-1/2} Σ_m V̂(m) e^{imx}`; real by symmetry.
    pub fn sample(&self, x: f64) -> f64 {
        let x = x.rem_euclid(2.0 * PI);
        let s: f64 = compensated_sum(self.coeffs.iter().filter(|(&m, _)| m > 0).map(|(&m, v)| {
            let (s, c) = (m as f64 * x).sin_cos();
            2.0 * (v.re * c - v.im * s)
        }));
        s / SQRT_2PI
    }

    /// Discrete Fourier coefficients of samples on the uniform grid
    /// `x_j = 2πj/M`, keeping `|m| <= bandwidth`. Returns the potential and
    /// the subtracted mean.
    pub fn from_samples(samples: &[f64], bandwidth: usize) -> Result<(Self, f64)> {
        let grid = samples.len();
        let limit = grid.saturating_sub(1) / 2;
        if bandwidth > limit {
            return Err(Error::Aliasing {
                bandwidth,
                grid,
                limit,
            });
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(grid).process(&mut buf);
        let scale = SQRT_2PI / grid as f64;
        let offset = buf[0].re / grid as f64;
        let entries: Vec<(i64, Complex64)> = (1..=bandwidth)
            .map(|m| {
                // average the ±m bins so the result is exactly Hermitian
                let v = 0.5 * (buf[m] + buf[grid - m].conj()) * scale;
                (m as i64, v)
            })
            .filter(|(_, v)| v.norm() > 1e-13)
            .collect();
        let (pot, _) = Self::from_positive(&entries);
        if offset != 0.0 {
            log::info!("subtracted mean {offset} from sampled potential");
        }
        Ok((pot, offset))
    }

    /// `𝕍ψ` on the same truncated range. The buffer must be at least as wide
    /// as the bandwidth; the mass the exact product would place outside
    /// `[-N, N]` is returned as leakage.
    pub fn apply_convolution(&self, state: &FiberState, buffer: usize) -> Result<Convolved> {
        let bw = self.bandwidth();
        if bw > buffer {
            return Err(Error::Truncation {
                bandwidth: bw,
                buffer,
            });
        }
        let n = state.half_width() as i64;
        let mut out = FiberState::zeros(state.half_width(), state.k, state.t);
        let mut outside = Vec::new();
        for target in -n - bw as i64..=n + bw as i64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (d, v) in self.iter() {
                acc += v * state.amp(target - d);
            }
            acc /= SQRT_2PI;
            match out.index_of(target) {
                Some(i) => out.amps_mut()[i] = acc,
                None => outside.push(acc.norm_sqr()),
            }
        }
        Ok(Convolved {
            state: out,
            leakage: compensated_sum(outside).sqrt(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Convolved {
    pub state: FiberState,
    pub leakage: f64,
}
