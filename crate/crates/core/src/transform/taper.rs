//! The logarithmic taper `τ_{R,n}`.

use std::sync::OnceLock;

/// Root of `s·log s = 1`.
pub fn s_star() -> f64 {
    static S: OnceLock<f64> = OnceLock::new();
    *S.get_or_init(|| {
        let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.ln() < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    })
}

/// `q(s) = 1/(1 ∨ s log s)`; equal to one for `s ≤ s*`, negative `s`
/// included.
pub fn q_taper(s: f64) -> f64 {
    if s <= 1.0 {
        return 1.0;
    }
    1.0 / (s * s.ln()).max(1.0)
}

/// `Q(k) = ∫₀ᵏ q`, in closed form.
pub fn big_q_taper(k: f64) -> f64 {
    let s = s_star();
    if k <= s {
        k
    } else {
        s + k.ln().ln() + 1.0 / s
    }
}

/// `r(s, k) = (Q(k) − Q((s ∨ 0) ∧ k)) / Q(k)`.
pub fn r_ratio(s: f64, k: f64) -> f64 {
    let qk = big_q_taper(k);
    (qk - big_q_taper(s.max(0.0).min(k))) / qk
}

/// Parameters of `τ_{R,n}(s) = τ·r(s − R, n − R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taper {
    pub tau: f64,
    pub r_inner: f64,
    pub n_outer: f64,
}

impl Taper {
    pub fn new(tau: f64, r_inner: f64, n_outer: f64) -> Self {
        Taper { tau, r_inner, n_outer }
    }

    fn width(&self) -> f64 {
        self.n_outer - self.r_inner
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= self.r_inner {
            self.tau
        } else if s >= self.n_outer {
            0.0
        } else {
            self.tau * r_ratio(s - self.r_inner, self.width())
        }
    }

    /// `dτ_{R,n}/ds`; zero off the open ramp `(R, n)`.
    pub fn deriv(&self, s: f64) -> f64 {
        if s <= self.r_inner || s >= self.n_outer {
            0.0
        } else {
            -self.tau * q_taper(s - self.r_inner) / big_q_taper(self.width())
        }
    }

    /// `q(s − R)/Q(n − R)`, the ramp slope per unit `τ`.
    pub fn slope_factor(&self, s: f64) -> f64 {
        q_taper(s - self.r_inner) / big_q_taper(self.width())
    }
}

/// `τ_{R,n}(|y|)` together with its derivative along the first axis.
pub fn taper_at(taper: &Taper, x: [f64; 2]) -> (f64, f64) {
    let r = x[0].abs().max(x[1].abs());
    let v = taper.eval(r);
    let d = if x[0].abs() >= x[1].abs() && x[0] != 0.0 { taper.deriv(r) * x[0].signum() } else { 0.0 };
    (v, d)
}
