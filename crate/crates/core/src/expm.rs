//! Exact exponentials of the truncated fiber Hamiltonian via dense
//! Hermitian eigendecomposition. Slow by construction; only used by the
//! reference propagators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::phase::band_energy;
use crate::potential::FourierPotential;

/// Dense `H(t)` restricted to `[-N, N]` in fiber `k`.
pub fn fiber_hamiltonian(pot: &FourierPotential, half_width: usize, k: f64, t: f64) -> DMatrix<Complex64> {
    let n = half_width as i64;
    let dim = 2 * half_width + 1;
    let mut h = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for i in 0..dim {
        let site = i as i64 - n;
        h[(i, i)] = Complex64::new(band_energy(site, k, t), 0.0);
        for (d, _) in pot.iter() {
            let j = i as i64 - d;
            if (0..dim as i64).contains(&j) {
                h[(i, j as usize)] = pot.coupling(d);
            }
        }
    }
    h
}

/// Applies `exp(-i·h·H)` to `v` for Hermitian `H`. Real symmetric inputs
/// take the cheaper real eigensolver.
pub fn apply_exp_hermitian(hmat: DMatrix<Complex64>, h: f64, v: &mut [Complex64]) {
    let is_real = hmat.iter().all(|z| z.im == 0.0);
    let x = DVector::from_column_slice(v);
    let out = if is_real {
        let eig = hmat.map(|z| z.re).symmetric_eigen();
        let q = eig.eigenvectors.map(|r| Complex64::new(r, 0.0));
        propagate_in_eigenbasis(&q, eig.eigenvalues.as_slice(), h, &x)
    } else {
        let eig = hmat.symmetric_eigen();
        propagate_in_eigenbasis(&eig.eigenvectors, eig.eigenvalues.as_slice(), h, &x)
    };
    v.copy_from_slice(out.as_slice());
}

fn propagate_in_eigenbasis(
    q: &DMatrix<Complex64>,
    eigenvalues: &[f64],
    h: f64,
    x: &DVector<Complex64>,
) -> DVector<Complex64> {
    let mut coeffs = q.ad_mul(x);
    for (c, &e) in coeffs.iter_mut().zip(eigenvalues) {
        let (s, co) = (h * e).sin_cos();
        *c *= Complex64::new(co, -s);
    }
    q * coeffs
}
