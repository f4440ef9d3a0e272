//! Free band energies and their accumulated phases.
//!
//! Free phases grow like `(n+k+t)^3 / 3`, so a plain `f64` loses the
//! absolute phase at the 1e-11 level already for `|n+t| ~ 70`. Phases that
//! are turned into unit factors are therefore carried in double-double
//! arithmetic (error-free transforms) and only rounded inside `sin_cos`.

use num_complex::Complex64;

/// `E_n(t) = (n + k + t)^2`.
pub fn band_energy(n: i64, k: f64, t: f64) -> f64 {
    let p = n as f64 + k + t;
    p * p
}

/// `∫_s^t (n+k+τ)^2 dτ`, evaluated as `(t-s)(X² + XY + Y²)/3` with
/// `X = n+k+t`, `Y = n+k+s` so that no large cubes are subtracted.
pub fn free_phase(n: i64, k: f64, s: f64, t: f64) -> f64 {
    free_phase_dd(n, k, s, t).to_f64()
}

/// `e^{-i·free_phase(n,k,s,t)}` accurate to a few ulps of the unit factor.
pub fn free_phase_factor(n: i64, k: f64, s: f64, t: f64) -> Complex64 {
    cis_dd(free_phase_dd(n, k, s, t).neg())
}

/// `Φ_n(τ) - Φ_m(τ)` for phases referenced at `s`:
/// `(n-m)(τ-s)(n+m+2k+s+τ)`.
pub fn phase_difference(n: i64, m: i64, k: f64, s: f64, tau: f64) -> f64 {
    let u = tau - s;
    (n - m) as f64 * u * ((n + m) as f64 + 2.0 * k + s + tau)
}

pub(crate) fn free_phase_dd(n: i64, k: f64, s: f64, t: f64) -> Dd {
    let a = Dd::from_f64(n as f64).add_f64(k);
    let x = a.add_f64(t);
    let y = a.add_f64(s);
    let d = Dd::two_sum(t, -s);
    let q = x.mul(x).add(x.mul(y)).add(y.mul(y));
    d.mul(q).div_f64(3.0)
}

pub(crate) fn cis_dd(phi: Dd) -> Complex64 {
    let (s1, c1) = phi.hi.sin_cos();
    let (s2, c2) = phi.lo.sin_cos();
    Complex64::new(c1, s1) * Complex64::new(c2, s2)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Dd {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        Dd {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn neg(self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, o: Dd) -> Self {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let v = Dd::quick_two_sum(s.hi, s.lo + t.hi);
        Dd::quick_two_sum(v.hi, v.lo + t.lo)
    }

    pub fn add_f64(self, b: f64) -> Self {
        let s = Dd::two_sum(self.hi, b);
        Dd::quick_two_sum(s.hi, s.lo + self.lo)
    }

    pub fn mul(self, o: Dd) -> Self {
        let p = Dd::two_prod(self.hi, o.hi);
        let lo = p.lo + (self.hi * o.lo + self.lo * o.hi);
        Dd::quick_two_sum(p.hi, lo)
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let p = Dd::two_prod(q1, b);
        let r = Dd::two_sum(self.hi, -p.hi);
        let q2 = (r.hi + (r.lo - p.lo + self.lo)) / b;
        Dd::quick_two_sum(q1, q2)
    }
}
