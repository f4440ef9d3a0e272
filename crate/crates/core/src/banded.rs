//! Banded complex operators on the truncated fiber `[-N, N]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::potential::FourierPotential;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Entries `A(i, j)` with `|i - j| <= band`, rows and columns labelled by
/// sites in `[-N, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    half_width: usize,
    band: usize,
    // row-major, (2N+1) x (2·band+1); column offset j - i + band
    data: Vec<Complex64>,
}

impl BandedMatrix {
    pub fn zeros(half_width: usize, band: usize) -> Self {
        let rows = 2 * half_width + 1;
        BandedMatrix {
            half_width,
            band,
            data: vec![ZERO; rows * (2 * band + 1)],
        }
    }

    pub fn diagonal(half_width: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let mut m = Self::zeros(half_width, 0);
        for s in m.sites() {
            m.set(s, s, f(s));
        }
        m
    }

    /// The convolution operator `𝕍` truncated to `[-N, N]`.
    pub fn convolution(pot: &FourierPotential, half_width: usize) -> Self {
        let mut m = Self::zeros(half_width, pot.bandwidth());
        for i in m.sites() {
            for (d, _) in pot.iter() {
                let j = i - d;
                if m.in_range(j) {
                    m.set(i, j, pot.coupling(d));
                }
            }
        }
        m
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        let n = self.half_width as i64;
        -n..=n
    }

    fn in_range(&self, s: i64) -> bool {
        s.unsigned_abs() as usize <= self.half_width
    }

    fn slot(&self, i: i64, j: i64) -> Option<usize> {
        let off = j - i + self.band as i64;
        if !self.in_range(i) || !self.in_range(j) || off < 0 || off > 2 * self.band as i64 {
            return None;
        }
        let row = (i + self.half_width as i64) as usize;
        Some(row * (2 * self.band + 1) + off as usize)
    }

    pub fn get(&self, i: i64, j: i64) -> Complex64 {
        self.slot(i, j).map_or(ZERO, |k| self.data[k])
    }

    /// Panics if `(i, j)` lies outside the band or the fiber.
    pub fn set(&mut self, i: i64, j: i64, v: Complex64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside band {}", self.band));
        self.data[k] = v;
    }

    /// Nonzero-capable columns of row `i`.
    pub fn row_columns(&self, i: i64) -> impl Iterator<Item = i64> + '_ {
        let b = self.band as i64;
        let n = self.half_width as i64;
        ((i - b).max(-n)..=(i + b).min(n)).filter(move |_| self.in_range(i))
    }

    pub fn mul(&self, other: &BandedMatrix) -> BandedMatrix {
        assert_eq!(self.half_width, other.half_width);
        let mut out = Self::zeros(self.half_width, self.band + other.band);
        for i in self.sites() {
            for m in self.row_columns(i) {
                let a = self.get(i, m);
                if a == ZERO {
                    continue;
                }
                for j in other.row_columns(m) {
                    let b = other.get(m, j);
                    if b != ZERO {
                        let k = out.slot(i, j).expect("product band");
                        out.data[k] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &BandedMatrix) -> BandedMatrix {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &BandedMatrix) -> BandedMatrix {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &BandedMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> BandedMatrix {
        assert_eq!(self.half_width, other.half_width);
        let mut out = Self::zeros(self.half_width, self.band.max(other.band));
        for i in out.sites() {
            for j in out.row_columns(i).collect::<Vec<_>>() {
                out.set(i, j, f(self.get(i, j), other.get(i, j)));
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> BandedMatrix {
        BandedMatrix {
            data: self.data.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// `P_n A`: keeps row `n` only.
    pub fn keep_row(&self, n: i64) -> BandedMatrix {
        let mut out = Self::zeros(self.half_width, self.band);
        for j in self.row_columns(n) {
            out.set(n, j, self.get(n, j));
        }
        out
    }

    /// `A · diag(d)`.
    pub fn scale_columns(&self, d: impl Fn(i64) -> Complex64) -> BandedMatrix {
        let mut out = self.clone();
        for i in self.sites() {
            for j in self.row_columns(i) {
                if let Some(k) = out.slot(i, j) {
                    out.data[k] *= d(j);
                }
            }
        }
        out
    }

    /// `diag(d) · A`.
    pub fn scale_rows(&self, d: impl Fn(i64) -> Complex64) -> BandedMatrix {
        let mut out = self.clone();
        for i in self.sites() {
            let di = d(i);
            for j in self.row_columns(i) {
                if let Some(k) = out.slot(i, j) {
                    out.data[k] *= di;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), 2 * self.half_width + 1);
        let n = self.half_width as i64;
        self.sites()
            .map(|i| {
                self.row_columns(i)
                    .map(|j| self.get(i, j) * v[(j + n) as usize])
                    .sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 2 * self.half_width + 1;
        let n = self.half_width as i64;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for i in self.sites() {
            for j in self.row_columns(i) {
                m[((i + n) as usize, (j + n) as usize)] = self.get(i, j);
            }
        }
        m
    }

    /// Spectral norm via dense SVD.
    pub fn operator_norm(&self) -> f64 {
        self.to_dense()
            .singular_values()
            .iter()
            .fold(0.0, |a: f64, &b| a.max(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn product_matches_dense() {
        let (pot, _) = FourierPotential::from_positive(&[(1, Complex64::new(0.3, 0.2)), (2, c(0.1))]);
        let v = BandedMatrix::convolution(&pot, 6);
        let d = BandedMatrix::diagonal(6, |s| c(s as f64 * 0.5 + 1.0));
        let p = v.mul(&d).mul(&v);
        let dense = v.to_dense() * d.to_dense() * v.to_dense();
        assert!((p.to_dense() - dense).norm() < 1e-14);
        assert_eq!(p.band(), 4);
    }

    #[test]
    fn apply_matches_convolution() {
        let pot = FourierPotential::cosine(0.7);
        let v = BandedMatrix::convolution(&pot, 5);
        let mut psi = crate::state::FiberState::zeros(5, 0.0, 0.0);
        *psi.amp_mut(2).unwrap() = c(1.0);
        *psi.amp_mut(-1).unwrap() = Complex64::new(0.0, 2.0);
        let a = v.apply(psi.amps());
        let b = pot.apply_convolution(&psi, 1).unwrap().state;
        for (x, y) in a.iter().zip(b.amps()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn row_and_scaling() {
        let pot = FourierPotential::cosine(1.0);
        let v = BandedMatrix::convolution(&pot, 4);
        let r = v.keep_row(2).scale_columns(|j| c(j as f64));
        assert_eq!(r.get(2, 3), c(3.0));
        assert_eq!(r.get(2, 1), c(1.0));
        assert_eq!(r.get(1, 2), c(0.0));
        assert!((v.operator_norm() - 2.0 * (std::f64::consts::PI / 10.0).cos()).abs() < 1e-12);
    }
}
