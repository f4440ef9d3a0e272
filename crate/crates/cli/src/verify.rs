//! Built-in identity suite at small sizes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swlab_core::banded::BandedMatrix;
use swlab_core::crossing::{backscatter_symmetric_part, crossing_interval, ibp_residual, twiddle_apply};
use swlab_core::dynamics::row_deviation;
use swlab_core::experiments::random_state;
use swlab_core::oracle::{dense_reference, DenseConfig};
use swlab_core::{free_phase, propagate, Error, FourierPotential, PropagatorConfig, Scheme};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Break `V̂(-m) = conj V̂(m)` in the test potential.
    Hermitian,
}

type Check = fn(&FourierPotential, u64) -> Result<(bool, String), Error>;

fn cfg(half_width: usize, tol: f64) -> PropagatorConfig {
    PropagatorConfig {
        half_width,
        buffer: 4,
        tol,
        leak_max: 1e-6,
        scheme: Scheme::InteractionPictureRk,
    }
}

fn test_potential(fault: Option<Fault>) -> FourierPotential {
    let (pot, _) = FourierPotential::from_positive(&[
        (1, Complex64::new(0.25, 0.1)),
        (2, Complex64::new(0.1, 0.0)),
    ]);
    match fault {
        None => pot,
        Some(Fault::Hermitian) => {
            let mut raw: BTreeMap<i64, Complex64> = pot.iter().collect();
            raw.insert(-1, Complex64::new(0.25, 0.3));
            FourierPotential::from_raw_unchecked(raw)
        }
    }
}

fn free_exactness(_: &FourierPotential, seed: u64) -> Result<(bool, String), Error> {
    let mut psi = random_state(24, 20, 0.25, seed)?;
    psi.t = 0.5;
    let out = propagate(&psi, 3.5, &FourierPotential::zero(), &cfg(24, 1e-9))?;
    let worst = psi
        .sites()
        .map(|n| {
            let want = psi.amp(n) * Complex64::from_polar(1.0, -free_phase(n, 0.25, 0.5, 3.5));
            (out.amp(n) - want).norm()
        })
        .fold(0.0, f64::max);
    Ok((worst < 1e-12, format!("max error {worst:.1e}")))
}

fn covariance(pot: &FourierPotential, seed: u64) -> Result<(bool, String), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = cfg(32, 1e-9);
    let mut worst = 0.0f64;
    for i in 0..5 {
        let k = rng.random_range(0.0..1.0);
        let mut a = random_state(32, 8, k, seed + i)?;
        a.t = 0.0;
        let mut b = a.clone();
        b.k = 0.0;
        b.t = k;
        let ua = propagate(&a, 2.0, pot, &c)?;
        let ub = propagate(&b, 2.0 + k, pot, &c)?;
        let d: f64 = ua.amps().iter().zip(ub.amps()).map(|(x, y)| (x - y).norm_sqr()).sum();
        worst = worst.max(d.sqrt());
    }
    Ok((worst < 10.0 * c.tol, format!("max difference {worst:.1e}")))
}

fn time_reversal(pot: &FourierPotential, _: u64) -> Result<(bool, String), Error> {
    let mut worst = 0.0f64;
    let mut pass = true;
    for n in [2, 4] {
        let c = PropagatorConfig::for_window(n, 2.0, pot.bandwidth());
        let f = row_deviation(n, 2.0, pot, &c, 0.0)?;
        let b = row_deviation(-n, -2.0, pot, &c, 0.0)?;
        let gap = (f.dev_norm - b.dev_norm).abs();
        pass &= gap <= f.err + b.err;
        worst = worst.max(gap);
    }
    Ok((pass, format!("max |difference| {worst:.1e}")))
}

fn twiddle(_: &FourierPotential, seed: u64) -> Result<(bool, String), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = rng.random_range(1..=6i64);
        let l = rng.random_range(0..=6i64);
        let (lo, hi) = crossing_interval(l);
        let t = rng.random_range(lo..hi);
        let mut a = BandedMatrix::zeros(16, 2);
        for i in a.sites() {
            for j in a.row_columns(i).collect::<Vec<_>>() {
                a.set(i, j, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        let d = BandedMatrix::diagonal(16, |m| Complex64::new((m as f64 + t).powi(2) - (n as f64 + t).powi(2), 0.0));
        let tw = twiddle_apply(&a, n, l, t)?;
        let comm = tw.mul(&d).sub(&d.mul(&tw));
        for j in a.sites() {
            let want = if j == n || j == -n - l { Complex64::new(0.0, 0.0) } else { a.get(n, j) };
            worst = worst.max((comm.get(n, j) - want).norm());
        }
    }
    Ok((worst <= 1e-12, format!("max entry error {worst:.1e}")))
}

fn pair_identity(pot: &FourierPotential, _: u64) -> Result<(bool, String), Error> {
    pot.check_hermitian()?;
    let mut worst = 0.0f64;
    for n in [8, 16, 32] {
        for l in 0..3 {
            let (lo, _) = crossing_interval(l);
            let b = backscatter_symmetric_part(n, l, lo + 0.1, pot)?;
            worst = worst.max((b.raw - b.symmetric).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max defect {worst:.1e}")))
}

fn ibp(pot: &FourierPotential, _: u64) -> Result<(bool, String), Error> {
    let c = cfg(32, 1e-11);
    let qtol = 1e-9;
    let r = ibp_residual(6, 2, pot, &c, qtol)?;
    let bound = 10.0 * (qtol + c.tol);
    Ok((r <= bound, format!("residual {r:.1e} (bound {bound:.1e})")))
}

fn oracle(pot: &FourierPotential, seed: u64) -> Result<(bool, String), Error> {
    let mut psi = random_state(24, 8, 0.4, seed)?;
    psi.t = 0.0;
    let fast = propagate(&psi, 1.0, pot, &cfg(24, 1e-10))?;
    let dense = dense_reference(&psi, 1.0, pot, &DenseConfig { half_width: 24, h: 0.02 })?;
    let diff = fast.distance(&dense.state);
    let budget = fast.err + fast.leak + dense.err;
    let pass = diff <= budget && (3.5..=4.5).contains(&dense.ratio);
    Ok((pass, format!("diff {diff:.1e} (budget {budget:.1e}), ratio {:.3}", dense.ratio)))
}

pub fn verify(fault: Option<Fault>, seed: u64) -> Result<(), CliError> {
    let pot = test_potential(fault);
    let checks: [(&str, Check); 7] = [
        ("free exactness", free_exactness),
        ("fiber covariance", covariance),
        ("time reversal", time_reversal),
        ("twiddle commutator", twiddle),
        ("symmetric pair identity", pair_identity),
        ("ibp residual", ibp),
        ("oracle cross-validation", oracle),
    ];
    let mut failures = Vec::new();
    for (name, check) in checks {
        match check(&pot, seed) {
            Ok((true, detail)) => println!("ok   {name}: {detail}"),
            Ok((false, detail)) => {
                println!("FAIL {name}: {detail}");
                failures.push(name.to_string());
            }
            Err(e) => {
                println!("FAIL {name}: {e}");
                failures.push(format!("{name} ({e})"));
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!("identity suite failed: {}", failures.join(", "))))
    }
}
