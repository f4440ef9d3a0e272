//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swlab_core::banded::BandedMatrix;
use swlab_core::crossing::{
    crossing_interval, crossing_passage, ibp_sides, stationary_phase_amplitude, two_level_oracle,
    twiddle_apply, CrossingEvent,
};
use swlab_core::dynamics::row_deviation;
use swlab_core::experiments::{
    acceleration_persistence, backscatter_scan, decay_exponent_fit, deviation_scan,
    deviation_scan_negative, power_law_fit, random_state, tail_sum_check, window_parseval_defect,
    ExperimentSpec,
};
use swlab_core::oracle::{dense_reference, DenseConfig};
use swlab_core::{propagate, FiberState, FourierPotential, PropagatorConfig, Scheme};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Check = fn() -> Result<Outcome, swlab_core::Error>;

fn cfg(half_width: usize, buffer: usize, tol: f64) -> PropagatorConfig {
    PropagatorConfig {
        half_width,
        buffer,
        tol,
        leak_max: 1e-6,
        scheme: Scheme::InteractionPictureRk,
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// Cody–Waite split of 2π: the first two parts carry 24 bits each.
const TWO_PI_1: f64 = 6.2831854820251465;
const TWO_PI_2: f64 = -1.7484555314695172e-07;
const TWO_PI_3: f64 = -6.8604979977715316e-15;

/// `e^{-i((n+k+t)³ - (n+k)³)/3}` for `k = 3/8`, `t = 5`, from the exact
/// integer numerator `(8n+43)³ - (8n+3)³` over `3·8³`.
fn analytic_free_factor(n: i64) -> Complex64 {
    let a = 8 * n as i128 + 3;
    let b = a + 40;
    let num = (b * b * b - a * a * a) as f64;
    let den = 1536.0;
    let m = (num / den / (TWO_PI_1 + TWO_PI_2)).round();
    let big = m * den;
    let r = ((num - big * TWO_PI_1) - big * TWO_PI_2 - big * TWO_PI_3) / den;
    Complex64::from_polar(1.0, -r)
}

fn free_exactness() -> Result<Outcome, swlab_core::Error> {
    let (k, t) = (0.375, 5.0);
    let mut psi = random_state(64, 60, k, 11)?;
    psi.t = 0.0;
    let out = propagate(&psi, t, &FourierPotential::zero(), &cfg(64, 4, 1e-9))?;
    let worst = (-60..=60)
        .map(|n| (out.amp(n) - psi.amp(n) * analytic_free_factor(n)).norm() / psi.amp(n).norm())
        .fold(0.0, f64::max);
    Ok(outcome(worst <= 1e-12, format!("max relative amplitude error {worst:.2e} (bound 1e-12)")))
}

fn unitarity_and_leakage() -> Result<Outcome, swlab_core::Error> {
    let pot = FourierPotential::cosine(0.5);
    let cf = cfg(128, 4, 1e-9);
    let mut psi = random_state(128, 32, 0.3, 12)?;
    let mut drift = 0.0f64;
    for j in 1..=20 {
        psi = propagate(&psi, 0.5 * j as f64, &pot, &cf)?;
        drift = drift.max((psi.norm() - 1.0).abs());
    }
    let pass = drift < 1e-6 && psi.leak < 1e-6;
    Ok(outcome(pass, format!("norm drift {drift:.2e}, leakage {:.2e} (bounds 1e-6)", psi.leak)))
}

fn covariance() -> Result<Outcome, swlab_core::Error> {
    let (pot, _) = FourierPotential::from_positive(&[(1, c(0.3, 0.1)), (2, c(0.1, -0.05))]);
    let cf = cfg(48, 8, 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let k: f64 = rng.random_range(0.0..1.0);
        let s: f64 = rng.random_range(-1.0..1.0);
        let t = s + rng.random_range(0.5..3.0);
        let mut a = random_state(48, 10, k, 100 + case)?;
        a.t = s;
        let mut b = a.clone();
        b.k = 0.0;
        b.t = s + k;
        let ua = propagate(&a, t, &pot, &cf)?;
        let ub = propagate(&b, t + k, &pot, &cf)?;
        let d = ua
            .amps()
            .iter()
            .zip(ub.amps())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(d);
    }
    Ok(outcome(worst < 10.0 * cf.tol, format!("max difference {worst:.2e} over 20 cases (bound {:.0e})", 10.0 * cf.tol)))
}

fn time_reversal() -> Result<Outcome, swlab_core::Error> {
    let pots = [
        ("2λcos x", FourierPotential::cosine(0.25)),
        (
            "complex band 2",
            FourierPotential::from_positive(&[(1, c(0.3, 0.2)), (2, c(0.1, 0.0))]).0,
        ),
    ];
    let mut pass = true;
    let mut worst = 0.0f64;
    for (_, pot) in &pots {
        for n in [2i64, 4, 8] {
            let cf = PropagatorConfig::for_window(n, 3.0, pot.bandwidth());
            let fwd = row_deviation(n, 3.0, pot, &cf, 0.0)?;
            let bwd = row_deviation(-n, -3.0, pot, &cf, 0.0)?;
            let gap = (fwd.dev_norm - bwd.dev_norm).abs();
            let budget = fwd.err + bwd.err;
            pass &= gap <= budget;
            worst = worst.max(gap / budget);
        }
    }
    Ok(outcome(pass, format!("largest |difference| / budget = {worst:.2e} over n ∈ {{2,4,8}}, two potentials")))
}

fn oracle_equivalence() -> Result<Outcome, swlab_core::Error> {
    let scenarios = [
        (FourierPotential::cosine(0.5), 0.2, 2.0),
        (FourierPotential::from_positive(&[(1, c(0.2, 0.15)), (3, c(0.1, 0.0))]).0, 0.7, 1.5),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for (i, (pot, k, t)) in scenarios.iter().enumerate() {
        let mut psi = random_state(64, 16, *k, 14 + i as u64)?;
        psi.t = 0.0;
        let cf = cfg(64, 8, 1e-10);
        let fast = propagate(&psi, *t, pot, &cf)?;
        let dense = dense_reference(&psi, *t, pot, &DenseConfig { half_width: 64, h: 0.02 })?;
        let diff = fast.distance(&dense.state);
        let budget = fast.err + fast.leak + dense.err;
        let ok = diff <= budget && (3.5..=4.5).contains(&dense.ratio);
        pass &= ok;
        lines.push(format!("diff {diff:.2e} ≤ {budget:.2e}, ratio {:.3}", dense.ratio));
    }
    Ok(outcome(pass, lines.join("; ")))
}

fn twiddle_commutator() -> Result<Outcome, swlab_core::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let hw = 24usize;
    let mut worst = 0.0f64;
    let mut cases = 0;
    while cases < 50 {
        let band = rng.random_range(1..=3usize);
        let n: i64 = rng.random_range(-10..=10);
        let l: i64 = rng.random_range(0..=10);
        if 2 * n + l == 0 {
            continue;
        }
        let (lo, hi) = crossing_interval(l);
        let t = rng.random_range(lo..hi);
        let mut a = BandedMatrix::zeros(hw, band);
        for i in a.sites() {
            for j in a.row_columns(i).collect::<Vec<_>>() {
                a.set(i, j, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        let d = BandedMatrix::diagonal(hw, |m| c((m as f64 + t).powi(2) - (n as f64 + t).powi(2), 0.0));
        let tw = twiddle_apply(&a, n, l, t)?;
        let comm = tw.mul(&d).sub(&d.mul(&tw));
        for i in a.sites() {
            for j in a.sites() {
                let want = if i == n && j != n && j != -n - l { a.get(i, j) } else { c(0.0, 0.0) };
                worst = worst.max((comm.get(i, j) - want).norm());
            }
        }
        cases += 1;
    }
    Ok(outcome(worst <= 1e-12, format!("max entry error {worst:.2e} over 50 cases (bound 1e-12)")))
}

fn ibp() -> Result<Outcome, swlab_core::Error> {
    // V = 0.2 cos x
    let pot = FourierPotential::cosine(0.1);
    let cf = cfg(32, 4, 1e-11);
    let qtol = 1e-9;
    let mut residuals = Vec::new();
    let mut prev: Option<swlab_core::crossing::IbpSides> = None;
    let mut converged = None;
    for panels in [1usize, 2, 4, 8, 16, 32] {
        let s = ibp_sides(6, 2, &pot, &cf, panels, 0x1b9)?;
        residuals.push(s.residual());
        if let Some(p) = prev {
            let change = (s.lhs - p.lhs).norm().max((s.rhs - p.rhs).norm());
            if change < qtol && converged.is_none() {
                converged = Some(s.residual());
            }
        }
        prev = Some(s);
    }
    let bound = 10.0 * (qtol + cf.tol);
    let floor = 1e-14;
    let halving = residuals
        .windows(2)
        .all(|w| w[1] <= 0.5 * w[0] || w[1] <= floor);
    let res = converged.unwrap_or(f64::INFINITY);
    let seq: Vec<String> = residuals.iter().map(|r| format!("{r:.1e}")).collect();
    Ok(outcome(
        res <= bound && halving,
        format!("residual {res:.2e} (bound {bound:.1e}); by panel doubling [{}]", seq.join(", ")),
    ))
}

fn stationary_phase() -> Result<Outcome, swlab_core::Error> {
    let mut pass = true;
    let mut parts = Vec::new();
    for a in [16i64, 24, 32, 48] {
        let (pot, _) = FourierPotential::from_positive(&[(a, c(0.05, 0.0))]);
        let ev = CrossingEvent::new(a / 2, 0, &pot)?;
        let predicted = stationary_phase_amplitude(&ev);
        let full = crossing_passage(&ev, 4.0, 1e-12)?.off.norm();
        let (lo, hi) = crossing_interval(0);
        let window = two_level_oracle(&ev, (lo, hi), 1e-12)?.off.norm();
        let rel = (full / predicted - 1.0).abs();
        pass &= rel <= 0.15;
        parts.push(format!(
            "{a}: {:.1}% (on I_l {:.1}%)",
            100.0 * rel,
            100.0 * (window / predicted - 1.0).abs()
        ));
    }
    Ok(outcome(pass, format!("relative deviation of the passage amplitude, 2n+l = {}", parts.join(", "))))
}

fn backscatter() -> Result<Outcome, swlab_core::Error> {
    let pots = [
        FourierPotential::cosine(0.25),
        FourierPotential::from_positive(&[(1, c(0.2, 0.1)), (2, c(0.1, 0.0)), (3, c(0.0, 0.05))]).0,
    ];
    let ns: Vec<i64> = (8..=64).collect();
    let mut min_exp = f64::INFINITY;
    let mut max_defect = 0.0f64;
    for pot in &pots {
        for l in 0..4 {
            let pts = backscatter_scan(pot, &ns, l, 64)?;
            let xs: Vec<f64> = pts.iter().map(|p| (2 * p.n + p.l) as f64).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.sup_raw).collect();
            min_exp = min_exp.min(power_law_fit(&xs, &ys, 16)?.exponent);
            max_defect = pts.iter().map(|p| p.pair_defect).fold(max_defect, f64::max);
        }
    }
    Ok(outcome(
        min_exp >= 1.8 && max_defect <= 1e-12,
        format!("smallest fitted exponent {min_exp:.3} (bound 1.8), pair identity defect {max_defect:.1e} (bound 1e-12)"),
    ))
}

fn decay_scaling() -> Result<Outcome, swlab_core::Error> {
    let mut spec = ExperimentSpec::new(
        "deviation",
        FourierPotential::cosine(1.0),
        0.25,
        vec![4, 6, 8, 12, 16, 24, 32],
        8.0,
    );
    spec.k_grid = 17;
    spec.tol = 1e-8;
    let pos = decay_exponent_fit(&deviation_scan(&spec)?)?;
    let neg = decay_exponent_fit(&deviation_scan_negative(&spec)?)?;
    let pass = (0.7..=1.3).contains(&pos.exponent) && pos.exponent - neg.exponent >= 0.4;
    Ok(outcome(
        pass,
        format!(
            "exponent t>0 {:.3} ± {:.3} (range [0.7, 1.3]); t<0 {:.3} ± {:.3}; gap {:.3} (bound 0.4)",
            pos.exponent,
            pos.ci,
            neg.exponent,
            neg.ci,
            pos.exponent - neg.exponent
        ),
    ))
}

fn persistence() -> Result<Outcome, swlab_core::Error> {
    let mut spec = ExperimentSpec::new(
        "persistence",
        FourierPotential::cosine(1.0),
        0.25,
        vec![2, 4, 6, 8, 12, 16, 24, 32],
        10.0,
    );
    spec.k_grid = 17;
    let rep = acceleration_persistence(&spec, 0.2)?;
    let masses: Vec<String> = rep.min_mass.iter().map(|(n, m)| format!("{n}:{m:.3}")).collect();
    Ok(outcome(
        rep.found.is_some_and(|n| n <= 32),
        format!("first window with mass ≥ 0.8: {:?}; minima [{}]", rep.found, masses.join(" ")),
    ))
}

fn parseval_and_tail() -> Result<Outcome, swlab_core::Error> {
    let mut worst = 0.0f64;
    for seed in 0..8 {
        let mut s: FiberState = random_state(64, 60, 0.1 * seed as f64, 200 + seed)?;
        let scale = 1.0 + seed as f64;
        s.amps_mut().iter_mut().for_each(|z| *z *= scale);
        worst = worst.max(window_parseval_defect(&s) / (scale * scale));
    }
    let mut tails = Vec::new();
    let mut pass = worst <= 1e-12;
    for beta in [1.5, 2.0, 3.0] {
        let chk = tail_sum_check(beta, 100)?;
        pass &= chk.passes();
        tails.push(format!("β={beta}: cte {:.3}, ratio→{:.3} (limit {:.3})", chk.cte, chk.ratio_at_max, chk.asymptote));
    }
    Ok(outcome(pass, format!("Parseval defect {worst:.1e} (bound 1e-12); {}", tails.join("; "))))
}

fn main() {
    let checks: [(&str, Check); 12] = [
        ("free-evolution exactness", free_exactness),
        ("unitarity and leakage", unitarity_and_leakage),
        ("fiber covariance", covariance),
        ("time reversal", time_reversal),
        ("oracle equivalence", oracle_equivalence),
        ("twiddle commutator", twiddle_commutator),
        ("integration-by-parts residual", ibp),
        ("stationary-phase law", stationary_phase),
        ("backscattering decay", backscatter),
        ("deviation decay scaling", decay_scaling),
        ("acceleration persistence", persistence),
        ("window Parseval and tail sums", parseval_and_tail),
    ];
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let id = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let res = check();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match res {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{id:>2}] {name}: {detail} ({secs:.1} s)",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
