use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes on the truncated site range `[-N, N]` of one quasimomentum
/// fiber, together with the error report accumulated while propagating.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberState {
    pub k: f64,
    pub t: f64,
    half_width: usize,
    amps: Vec<Complex64>,
    /// Accumulated numerical error budget (integrator estimates plus leakage).
    pub err: f64,
    /// Largest buffer mass observed while propagating.
    pub leak: f64,
}

impl FiberState {
    pub fn zeros(half_width: usize, k: f64, t: f64) -> Self {
        FiberState {
            k,
            t,
            half_width,
            amps: vec![Complex64::new(0.0, 0.0); 2 * half_width + 1],
            err: 0.0,
            leak: 0.0,
        }
    }

    /// Unit mass at `site`.
    pub fn unit(half_width: usize, site: i64, k: f64, t: f64) -> Result<Self> {
        let mut s = Self::zeros(half_width, k, t);
        *s.amp_mut(site)? = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amps(amps: Vec<Complex64>, k: f64, t: f64) -> Result<Self> {
        if amps.len().is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "fiber needs an odd number of sites, got {}",
                amps.len()
            )));
        }
        Ok(FiberState {
            k,
            t,
            half_width: amps.len() / 2,
            amps,
            err: 0.0,
            leak: 0.0,
        })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        let n = self.half_width as i64;
        -n..=n
    }

    pub fn contains(&self, site: i64) -> bool {
        site.unsigned_abs() as usize <= self.half_width
    }

    pub fn index_of(&self, site: i64) -> Option<usize> {
        self.contains(site)
            .then(|| (site + self.half_width as i64) as usize)
    }

    pub fn amp(&self, site: i64) -> Complex64 {
        self.index_of(site)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    pub fn amp_mut(&mut self, site: i64) -> Result<&mut Complex64> {
        let limit = self.half_width as i64;
        match self.index_of(site) {
            Some(i) => Ok(&mut self.amps[i]),
            None => Err(Error::SiteOutOfRange { site, limit }),
        }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.amps)
    }

    /// `‖P_n ψ‖`.
    pub fn window_mass(&self, site: i64) -> f64 {
        self.amp(site).norm()
    }

    /// Mass in the outer band `|m| > N - buffer`.
    pub fn buffer_mass(&self, buffer: usize) -> f64 {
        let b = buffer.min(self.amps.len());
        let n = self.amps.len();
        let sq: f64 = self.amps[..b]
            .iter()
            .chain(&self.amps[n - b..])
            .map(|z| z.norm_sqr())
            .sum();
        sq.sqrt()
    }

    /// `‖self - other‖` over the common site range (both must share N).
    pub fn distance(&self, other: &FiberState) -> f64 {
        assert_eq!(self.len(), other.len(), "fiber widths differ");
        let diff: Vec<Complex64> = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a - b)
            .collect();
        norm2(&diff)
    }

    /// Antiunitary reflection `Tψ(n) = conj ψ(-n)`.
    pub fn time_reverse(&self) -> FiberState {
        let amps = self.amps.iter().rev().map(|z| z.conj()).collect();
        FiberState {
            amps,
            ..self.clone()
        }
    }
}

/// Euclidean norm with Neumaier-compensated accumulation of the squares.
pub fn norm2(v: &[Complex64]) -> f64 {
    compensated_sum(v.iter().map(|z| z.norm_sqr())).sqrt()
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> FiberState {
        let amps = (0..2 * n + 1)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        FiberState::from_amps(amps, 0.2, 0.0).unwrap()
    }

    #[test]
    fn time_reversal_is_an_involution() {
        let s = sample(7);
        assert_eq!(s.time_reverse().time_reverse(), s);
        assert!((s.time_reverse().norm() - s.norm()).abs() < 1e-15);
        assert_eq!(s.time_reverse().amp(3), s.amp(-3).conj());
    }

    #[test]
    fn site_indexing() {
        let mut s = FiberState::zeros(4, 0.0, 0.0);
        assert!(s.amp_mut(5).is_err());
        *s.amp_mut(-4).unwrap() = Complex64::new(2.0, 0.0);
        assert_eq!(s.amps()[0], Complex64::new(2.0, 0.0));
        assert_eq!(s.amp(9), Complex64::new(0.0, 0.0));
        assert!((s.buffer_mass(1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn window_parseval() {
        let s = sample(20);
        let windows: f64 = s.sites().map(|n| s.window_mass(n).powi(2)).sum();
        assert!((windows - s.norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let xs = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 10_000));
        assert!((compensated_sum(xs) - (1.0 + 1e-12)).abs() < 1e-15);
    }
}
