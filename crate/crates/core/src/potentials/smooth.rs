use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, gl40};

use super::well_behaved::{ContinuousPart, Cubic};

const ROUNDOFF: f64 = 1e-12;

/// `∫_{−1}^{1} exp(−1/(1 − x²)) dx`.
fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| adaptive_simpson(-1.0, 1.0, 1e-15, &|x: f64| unit_bump(x)))
}

fn unit_bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Symmetric smooth probability density supported on `(−δ′, δ′)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    width: f64,
    norm: f64,
}

impl Mollifier {
    pub fn new(width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::Parameter(format!("mollifier width must be positive, got {width}")));
        }
        Ok(Mollifier { width, norm: 1.0 / (width * bump_mass()) })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn density(&self, t: f64) -> f64 {
        self.norm * unit_bump(t / self.width)
    }
}

/// C² cutoff rising from 0 at `s ≤ 0` to 1 at `s ≥ 1`.
fn smootherstep(s: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if s >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let v = s * s * s * (s * (6.0 * s - 15.0) + 10.0);
        let d = 30.0 * s * s * (s - 1.0) * (s - 1.0);
        let d2 = 60.0 * s * (2.0 * s * s - 3.0 * s + 1.0);
        (v, d, d2)
    }
}

/// The smooth radial part `Ū = U_c ∗ f_{δ′} + c′χ` of one spin pair.
///
/// `U_c` is the continuous envelope, continued below the hard core by its
/// first polynomial. The lift `c′χ` is a C² plateau that covers every place
/// where the mollified envelope dips under `U_c`, so `Ū ≥ U_c ≥ U` off the
/// hard core.
#[derive(Clone, Debug)]
pub struct SmoothRadial {
    segments: Vec<(f64, f64, Cubic)>,
    jumps: Vec<(f64, f64)>,
    mollifier: Mollifier,
    lift: f64,
    plateaus: Vec<(f64, f64)>,
    fade: f64,
    range: f64,
    trivial: bool,
}

impl SmoothRadial {
    pub fn zero() -> Self {
        SmoothRadial {
            segments: Vec::new(),
            jumps: Vec::new(),
            mollifier: Mollifier { width: 1.0, norm: 1.0 },
            lift: 0.0,
            plateaus: Vec::new(),
            fade: 0.0,
            range: 0.0,
            trivial: true,
        }
    }

    pub fn build(cont: &ContinuousPart, mollifier: Mollifier) -> Result<Self> {
        let env = &cont.envelope;
        if env.polys.is_empty() {
            return Ok(SmoothRadial::zero());
        }
        let dp = mollifier.width();
        let mut sm = SmoothRadial {
            segments: env.segments(),
            jumps: env.derivative_jumps(),
            mollifier,
            lift: 0.0,
            plateaus: Vec::new(),
            fade: dp / 2.0,
            range: env.end() + dp,
            trivial: false,
        };
        let r0 = cont.base.r0();
        let lo = r0;
        let hi = env.end() + dp;
        let err = |sm: &SmoothRadial, r: f64| sm.mollified(r, 0) - env.eval(r);

        let mut pad = dp / 8.0;
        for _attempt in 0..6 {
            let step = dp / 16.0;
            let n = ((hi - lo) / step).ceil() as usize;
            let mut worst = 0.0f64;
            let mut neg: Vec<(f64, f64)> = Vec::new();
            for k in 0..=n {
                let r = (lo + k as f64 * step).min(hi);
                let e = err(&sm, r);
                if e < -ROUNDOFF * (1.0 + env.eval(r).abs()) {
                    worst = worst.max(-e);
                    let (a, b) = ((r - pad).max(lo - pad), r + pad);
                    match neg.last_mut() {
                        Some(last) if a <= last.1 + 2.0 * sm.fade => last.1 = b,
                        _ => neg.push((a, b)),
                    }
                }
            }
            sm.lift = if worst > 0.0 { worst * 1.05 + 1e-12 } else { 0.0 };
            sm.plateaus = neg;
            sm.range = hi.max(sm.plateaus.iter().map(|p| p.1 + sm.fade).fold(0.0, f64::max));

            // dense re-check, including a margin of the hard core
            let fine = dp / 64.0;
            let m = ((hi - lo) / fine).ceil() as usize;
            let bad = (0..=m).any(|k| {
                let r = (lo + k as f64 * fine).min(hi);
                r > r0 && sm.value(r) < env.eval(r) - ROUNDOFF * (1.0 + env.eval(r).abs())
            });
            if !bad {
                return Ok(sm);
            }
            pad *= 2.0;
        }
        Err(Error::Internal("could not lift the mollified envelope above the continuous part".into()))
    }

    /// `∫ U_c^{(k)}(r − t) f(t) dt`, with the Dirac terms of `U_c″` added
    /// for `k = 2`.
    fn mollified(&self, r: f64, k: u8) -> f64 {
        let dp = self.mollifier.width();
        let (nodes, weights) = gl40();
        let mut acc = 0.0;
        for &(a, b, p) in &self.segments {
            let lo = a.max(r - dp);
            let hi = b.min(r + dp);
            if hi <= lo || p == Cubic::ZERO {
                continue;
            }
            let pieces = ((hi - lo) / (0.5 * dp)).ceil().max(1.0) as usize;
            let width = (hi - lo) / pieces as f64;
            for j in 0..pieces {
                let half = 0.5 * width;
                let mid = lo + (j as f64 + 0.5) * width;
                let mut s = 0.0;
                for (x, w) in nodes.iter().zip(weights) {
                    let u = mid + half * x;
                    let pv = match k {
                        0 => p.eval(u),
                        1 => p.deriv(u),
                        _ => p.deriv2(u),
                    };
                    s += w * pv * self.mollifier.density(r - u);
                }
                acc += half * s;
            }
        }
        if k == 2 {
            for &(knot, jump) in &self.jumps {
                acc += jump * self.mollifier.density(r - knot);
            }
        }
        acc
    }

    fn chi(&self, r: f64) -> (f64, f64, f64) {
        let mut best = (0.0, 0.0, 0.0);
        for &(a, b) in &self.plateaus {
            let c = if r < a {
                smootherstep((r - (a - self.fade)) / self.fade)
            } else if r > b {
                let (v, d, d2) = smootherstep(((b + self.fade) - r) / self.fade);
                (v, -d, d2)
            } else {
                (1.0, 0.0, 0.0)
            };
            if c.0 > best.0 {
                best = (c.0, c.1 / self.fade, c.2 / (self.fade * self.fade));
            }
        }
        best
    }

    pub fn value(&self, r: f64) -> f64 {
        if self.trivial {
            return 0.0;
        }
        self.mollified(r, 0) + self.lift * self.chi(r).0
    }

    pub fn deriv(&self, r: f64) -> f64 {
        if self.trivial {
            return 0.0;
        }
        self.mollified(r, 1) + self.lift * self.chi(r).1
    }

    pub fn deriv2(&self, r: f64) -> f64 {
        if self.trivial {
            return 0.0;
        }
        self.mollified(r, 2) + self.lift * self.chi(r).2
    }

    /// Beyond this radius `Ū` vanishes.
    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn lift(&self) -> f64 {
        self.lift
    }

    pub fn is_zero(&self) -> bool {
        self.trivial
    }

    /// Sample radii that resolve the structure of `Ū` on `[lo, range]`.
    pub fn grid(&self, lo: f64, per_width: usize) -> Vec<f64> {
        if self.trivial {
            return Vec::new();
        }
        let step = self.mollifier.width() / per_width as f64;
        let n = ((self.range - lo) / step).ceil().max(0.0) as usize;
        (0..=n).map(|k| (lo + k as f64 * step).min(self.range)).collect()
    }
}
