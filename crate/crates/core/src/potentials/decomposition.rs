use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::particles::{distance, Norm, Particle};
use crate::quadrature::integrate_gl40;

use super::potts::{eval_pair_potential, PottsPotential};
use super::smooth::{Mollifier, SmoothRadial};
use super::well_behaved::{decompose_well_behaved, ContinuousPart};

/// Tuning of the decomposition. Missing widths fall back to
/// `ε = 0.05·min r₀` and `δ′ = ε/4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionParams {
    pub eps: Option<f64>,
    pub mollify_width: Option<f64>,
    pub activity: f64,
    pub ruelle: f64,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        DecompositionParams { eps: None, mollify_width: None, activity: 0.1, ruelle: 1.0 }
    }
}

/// `U = Ū − u` with `u ≥ 0`, `u = 0` on the hard core, plus the constants
/// the deformed translation needs.
#[derive(Clone, Debug)]
pub struct DecomposedPotential {
    base: PottsPotential,
    mollify_width: f64,
    continuous: Vec<ContinuousPart>,
    smooth: Vec<SmoothRadial>,
    psi_height: Vec<f64>,
    pub c_k: f64,
    pub c_f: f64,
    pub c_psi: f64,
    pub c_u: f64,
    pub c_xi: f64,
    pub activity: f64,
    pub ruelle: f64,
}

/// `Ū` as a pair energy.
#[derive(Clone, Copy, Debug)]
pub struct SmoothPart<'a>(pub &'a DecomposedPotential);

/// `u` as a pair energy.
#[derive(Clone, Copy, Debug)]
pub struct SmallPart<'a>(pub &'a DecomposedPotential);

/// `∫_0^{2π} h(u_θ) / N(u_θ)^{2+p} dθ`, so that
/// `∫ g(N(x)) h(x) dx = this · ∫ g(s) s^{1+p} ds` for `h` homogeneous of
/// degree `p`.
fn angular(norm: &Norm, p: f64, h: impl Fn([f64; 2]) -> f64) -> f64 {
    (0..8)
        .map(|k| {
            let a = k as f64 * PI / 4.0;
            integrate_gl40(a, a + PI / 4.0, |t| {
                let u = [t.cos(), t.sin()];
                h(u) / norm.eval(u).powf(2.0 + p)
            })
        })
        .sum()
}

fn max_norm_sq(v: [f64; 2]) -> f64 {
    let m = v[0].abs().max(v[1].abs());
    m * m
}

/// `∫_{a}^{b} g(s) ds` split into pieces no longer than `h`.
fn integrate_fine(a: f64, b: f64, h: f64, g: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = ((b - a) / h).ceil().max(1.0) as usize;
    let w = (b - a) / n as f64;
    (0..n).map(|k| integrate_gl40(a + k as f64 * w, a + (k + 1) as f64 * w, &g)).sum()
}

fn smoothstep(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0)
    } else if s >= 1.0 {
        (1.0, 0.0)
    } else {
        (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s))
    }
}

/// Builds `Ū`, `u`, `ψ` and the constants, and checks `c_ξ < 1/(zξ)`.
pub fn build_decomposition(pot: &PottsPotential, params: DecompositionParams) -> Result<DecomposedPotential> {
    let eps = match params.eps {
        Some(e) => e,
        None => 0.05 * pot.min_positive_hard_core().unwrap_or(1.0),
    };
    let dp = params.mollify_width.unwrap_or(eps / 4.0);
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    if !(params.activity > 0.0 && params.activity.is_finite()) {
        return Err(Error::Parameter("activity must be positive".into()));
    }
    if !(params.ruelle >= 1.0 && params.ruelle.is_finite()) {
        return Err(Error::Parameter("Ruelle bound must be finite and at least 1".into()));
    }
    let mollifier = Mollifier::new(dp)?;
    let s = pot.spins();
    let norm = *pot.norm();
    // enlargements use the potential's own ε; keep them consistent
    let pot = PottsPotential::new(
        norm,
        s,
        (0..s * s).map(|i| pot.entry(i / s, i % s).clone()).collect(),
        eps,
    )?;

    let mut continuous: Vec<ContinuousPart> = Vec::with_capacity(s * s);
    let mut smooth: Vec<SmoothRadial> = Vec::with_capacity(s * s);
    for i in 0..s * s {
        let (a, b) = (i / s, i % s);
        if b < a {
            continuous.push(continuous[b * s + a].clone());
            smooth.push(smooth[b * s + a].clone());
            continue;
        }
        let c = decompose_well_behaved(pot.entry(a, b), eps)?;
        smooth.push(SmoothRadial::build(&c, mollifier)?);
        continuous.push(c);
    }

    let mut dec = DecomposedPotential {
        base: pot,
        mollify_width: dp,
        continuous,
        smooth,
        psi_height: vec![0.0; s * s],
        c_k: 0.0,
        c_f: 1.5 * norm.first_axis_lipschitz() / (2.0 * eps),
        c_psi: 0.0,
        c_u: 0.0,
        c_xi: 0.0,
        activity: params.activity,
        ruelle: params.ruelle,
    };

    for i in 0..s * s {
        let (a, b) = (i / s, i % s);
        let r = dec.base.hard_core_radius(a, b);
        dec.c_k = dec.c_k.max((r + 2.0 * eps) * norm.max_norm_ratio());
        if b >= a {
            dec.psi_height[i] = 1.1 * dec.sup_second_derivative(a, b);
        } else {
            dec.psi_height[i] = dec.psi_height[b * s + a];
        }
    }

    let unit_area = angular(&norm, 0.0, |_| 1.0) / 2.0;
    let ang_sq = angular(&norm, 2.0, max_norm_sq);
    let ang_sq_or_one = |l: f64| {
        // ∫_{N(x) ≤ l} (|x|²_max ∨ 1) dx
        (0..8)
            .map(|k| {
                let a0 = k as f64 * PI / 4.0;
                integrate_gl40(a0, a0 + PI / 4.0, |t| {
                    let u = [t.cos(), t.sin()];
                    let n = norm.eval(u);
                    let m2 = max_norm_sq(u);
                    // radial: x = ρ u/n, |x|²_max = ρ² m2/n², Jacobian ρ/n²
                    let rho_one = (n * n / m2).sqrt().min(l);
                    let inner = rho_one * rho_one / 2.0 + m2 / (n * n) * (l.powi(4) - rho_one.powi(4)) / 4.0;
                    inner / (n * n)
                })
            })
            .sum::<f64>()
    };

    let mut c_u: f64 = 0.0;
    let mut c_xi: f64 = 0.0;
    let mut c_psi_int: f64 = 0.0;
    for a in 0..s {
        let (mut su, mut sx, mut sp) = (0.0, 0.0, 0.0);
        for b in 0..s {
            let r = dec.base.hard_core_radius(a, b);
            let sm = &dec.smooth[a * s + b];
            let (int_u1, int_u3) = if sm.is_zero() {
                (0.0, 0.0)
            } else {
                let ut = |x: f64| 1.0 - (-dec.small_radial(a, b, x)).exp();
                let mut cuts = vec![r];
                cuts.extend(dec.base.entry(a, b).breakpoints().iter().copied().filter(|k| *k > r));
                cuts.push(sm.range().max(r));
                cuts.dedup();
                let mut i1 = 0.0;
                let mut i3 = 0.0;
                for w in cuts.windows(2) {
                    i1 += integrate_fine(w[0], w[1], dp / 4.0, |x| ut(x) * x);
                    i3 += integrate_fine(w[0], w[1], dp / 4.0, |x| ut(x) * x * x * x);
                }
                (i1, i3)
            };
            let annulus = unit_area * ((r + 2.0 * eps).powi(2) - r * r);
            sx += annulus + 2.0 * unit_area * int_u1;
            su += ang_sq * int_u3;
            let h = dec.psi_height[a * s + b];
            if h > 0.0 {
                sp += h * ang_sq_or_one(dec.psi_range(a, b));
            }
        }
        let w = 1.0 / s as f64;
        c_u = c_u.max(su * w);
        c_xi = c_xi.max(sx * w);
        c_psi_int = c_psi_int.max(sp * w);
    }
    dec.c_u = c_u;
    dec.c_xi = c_xi;
    dec.c_psi = dec.psi_height.iter().copied().fold(c_psi_int, f64::max);

    let bound = 1.0 / (params.activity * params.ruelle);
    if dec.c_xi >= bound {
        return Err(Error::ActivityTooLarge { c_xi: dec.c_xi, bound });
    }
    Ok(dec)
}

impl DecomposedPotential {
    pub fn base(&self) -> &PottsPotential {
        &self.base
    }

    pub fn eps(&self) -> f64 {
        self.base.eps()
    }

    pub fn mollify_width(&self) -> f64 {
        self.mollify_width
    }

    pub fn continuous_part(&self, a: usize, b: usize) -> &ContinuousPart {
        &self.continuous[a * self.base.spins() + b]
    }

    pub fn smooth_radial(&self, a: usize, b: usize) -> &SmoothRadial {
        &self.smooth[a * self.base.spins() + b]
    }

    fn small_radial(&self, a: usize, b: usize, d: f64) -> f64 {
        let f = self.base.entry(a, b);
        match f.eval(d) {
            ExtReal::Finite(v) if d > 0.0 => (self.smooth_radial(a, b).value(d) - v).max(0.0),
            _ => 0.0,
        }
    }

    /// `Ū(y₁, y₂)`; finite everywhere, including the hard core.
    pub fn smooth_pair(&self, y1: &Particle, y2: &Particle) -> f64 {
        let d = distance(y1, y2, self.base.norm());
        self.smooth_radial(y1.spin.index(), y2.spin.index()).value(d)
    }

    /// `u(y₁, y₂) = Ū − U` off the hard core and `0` on it.
    pub fn small_pair(&self, y1: &Particle, y2: &Particle) -> f64 {
        match eval_pair_potential(&self.base, y1, y2) {
            ExtReal::PosInf => 0.0,
            ExtReal::Finite(v) => (self.smooth_pair(y1, y2) - v).max(0.0),
        }
    }

    /// `ũ = 1 − e^{−u}`.
    pub fn utilde_pair(&self, y1: &Particle, y2: &Particle) -> f64 {
        -(-self.small_pair(y1, y2)).exp_m1()
    }

    /// `∂²Ū/∂x₁²` along the first axis, in the first particle's position.
    pub fn e_deriv2_smooth(&self, y1: &Particle, y2: &Particle) -> f64 {
        let v = [y1.x[0] - y2.x[0], y1.x[1] - y2.x[1]];
        let norm = self.base.norm();
        let d = norm.eval(v);
        let g = self.smooth_radial(y1.spin.index(), y2.spin.index());
        let n1 = norm.d_first(v);
        g.deriv2(d) * n1 * n1 + g.deriv(d) * norm.d2_first(v)
    }

    /// `∂Ū/∂x₁` along the first axis, in the first particle's position.
    pub fn e_deriv_smooth(&self, y1: &Particle, y2: &Particle) -> f64 {
        let v = [y1.x[0] - y2.x[0], y1.x[1] - y2.x[1]];
        let norm = self.base.norm();
        let g = self.smooth_radial(y1.spin.index(), y2.spin.index());
        g.deriv(norm.eval(v)) * norm.d_first(v)
    }

    fn psi_range(&self, a: usize, b: usize) -> f64 {
        self.smooth_radial(a, b).range() + 1.0
    }

    /// `ψ(y₁, y₂) = c_{σ₁σ₂}·1{d ≤ range(Ū) + 1}`.
    pub fn psi(&self, y1: &Particle, y2: &Particle) -> f64 {
        let (a, b) = (y1.spin.index(), y2.spin.index());
        let h = self.psi_height[a * self.base.spins() + b];
        if h == 0.0 || distance(y1, y2, self.base.norm()) > self.psi_range(a, b) {
            0.0
        } else {
            h
        }
    }

    pub fn psi_height(&self, a: usize, b: usize) -> f64 {
        self.psi_height[a * self.base.spins() + b]
    }

    /// Largest distance at which `Ū`, `u` or `ψ` can be nonzero.
    pub fn psi_support(&self) -> f64 {
        let s = self.base.spins();
        (0..s * s)
            .filter(|i| self.psi_height[*i] > 0.0)
            .map(|i| self.psi_range(i / s, i % s))
            .fold(0.0, f64::max)
    }

    pub fn smooth_range(&self) -> f64 {
        self.smooth.iter().map(|g| g.range()).fold(0.0, f64::max)
    }

    /// Sampled `sup |∂²_e Ū|` over positions off the hard core.
    fn sup_second_derivative(&self, a: usize, b: usize) -> f64 {
        let g = self.smooth_radial(a, b);
        if g.is_zero() {
            return 0.0;
        }
        let norm = *self.base.norm();
        let r0 = self.base.hard_core_radius(a, b);
        let radii = g.grid(r0, 16);
        let dirs: Vec<[f64; 2]> = (0..64)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / 64.0;
                let u = [t.cos(), t.sin()];
                let n = norm.eval(u);
                [u[0] / n, u[1] / n]
            })
            .chain([[1.0 / norm.eval([1.0, 0.0]), 0.0], [0.0, 1.0 / norm.eval([0.0, 1.0])]])
            .collect();
        let mut best: f64 = 0.0;
        for &r in &radii {
            if r <= r0 {
                continue;
            }
            let (g1, g2) = (g.deriv(r), g.deriv2(r));
            for u in &dirs {
                let v = [u[0] * r, u[1] * r];
                let n1 = norm.d_first(v);
                best = best.max((g2 * n1 * n1 + g1 * norm.d2_first(v)).abs());
            }
        }
        best
    }
}

/// `f_K(y′, y)`: `0` on the hard core, `1` outside `K″`, a smoothstep in
/// the normalised distance between.
pub fn cutoff_fk(dec: &DecomposedPotential, y1: &Particle, y2: &Particle) -> f64 {
    let (s, _) = fk_parts(dec, y1, y2);
    smoothstep(s).0
}

/// `∂_e f_K(y′, y)` with respect to the position of the second argument.
pub fn e_deriv_fk(dec: &DecomposedPotential, y1: &Particle, y2: &Particle) -> f64 {
    let (s, v) = fk_parts(dec, y1, y2);
    let (_, ds) = smoothstep(s);
    if ds == 0.0 {
        return 0.0;
    }
    ds / (2.0 * dec.eps()) * dec.base.norm().d_first(v)
}

fn fk_parts(dec: &DecomposedPotential, y1: &Particle, y2: &Particle) -> (f64, [f64; 2]) {
    let v = [y2.x[0] - y1.x[0], y2.x[1] - y1.x[1]];
    let d = dec.base.norm().eval(v);
    let r = dec.base.hard_core_radius(y1.spin.index(), y2.spin.index());
    if d <= r {
        return (0.0, v);
    }
    ((d - r) / (2.0 * dec.eps()), v)
}
