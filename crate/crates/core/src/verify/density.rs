//! Monte Carlo check of the change-of-variables identity
//! `∫ f∘𝔗 · φ d(ν⊗π′) = ∫ f d(ν⊗π′)`.
//!
//! `(Y, B)` is drawn from `ν_{Λ_n} ⊗ π_n`, whose density against
//! `ν ⊗ π′` is `w(Y, B) = e^{−H^u(Y)} ∏_{b∈B} (e^{u(b)} − 1)`. Bonded
//! particles share a cluster and move rigidly, so the product is
//! unchanged by `𝔗` and only `e^{−H^u}` needs reweighting. With
//! `F = f·w` the identity becomes
//!
//! ```text
//! E[ f(𝔗(Y,B)) · φ(Y,B) · e^{H^u(Y) − H^u(𝔗Y)} ] = E[ f(Y,B) ]
//! ```
//!
//! and is tested by a paired z-score per statistic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bonds::sample_bonds;
use crate::error::{Error, Result};
use crate::particles::{Configuration, Particle, Window};
use crate::potentials::{hamiltonian_particles, ModelSpec, SmallPart};
use crate::rng::substream;
use crate::sampler::sample_poisson;
use crate::stats::mean_and_standard_error;
use crate::transform::{transform_particles, TaperParams};

use super::report::{Check, SuiteReport};

/// Statistics `f` of a particle list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `f ≡ 1`.
    Normalisation,
    /// `N_{Λ₁}`.
    CountInner,
    /// `1{N_{Λ₁} ≥ 2}`.
    CountInnerAtLeastTwo,
    /// Particles in the right half of the taper ramp, `x₀ ∈ [R, n)`.
    RightRampCount,
    /// `Σ_y exp(−(x₀ − (R+n)/2)² − x₁²)`.
    SmoothBump,
}

impl Statistic {
    pub const ALL: [Statistic; 5] = [
        Statistic::Normalisation,
        Statistic::CountInner,
        Statistic::CountInnerAtLeastTwo,
        Statistic::RightRampCount,
        Statistic::SmoothBump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Normalisation => "normalisation",
            Statistic::CountInner => "count_inner",
            Statistic::CountInnerAtLeastTwo => "count_inner_at_least_two",
            Statistic::RightRampCount => "right_ramp_count",
            Statistic::SmoothBump => "smooth_bump",
        }
    }

    pub fn eval(self, ps: &[Particle], params: &TaperParams) -> f64 {
        let (r, n) = (params.r_inner as f64, params.n_outer as f64);
        let inner = |p: &&Particle| p.radius() < 1.0 && p.x[0] < 1.0 && p.x[1] < 1.0;
        match self {
            Statistic::Normalisation => 1.0,
            Statistic::CountInner => ps.iter().filter(inner).count() as f64,
            Statistic::CountInnerAtLeastTwo => (ps.iter().filter(inner).count() >= 2) as u8 as f64,
            Statistic::RightRampCount => ps
                .iter()
                .filter(|p| p.x[0] >= r && p.x[0] < n && p.x[1] >= -n && p.x[1] < n)
                .count() as f64,
            Statistic::SmoothBump => {
                let c = 0.5 * (r + n);
                ps.iter().map(|p| (-(p.x[0] - c).powi(2) - p.x[1] * p.x[1]).exp()).sum()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    /// `τ, R, n, n′, δ`; the Poisson window is `Λ_n`.
    pub tau: f64,
    pub r_inner: u32,
    pub n_outer: u32,
    pub n_prime: u32,
    pub delta: f64,
    /// Intensity of the reference Poisson process `ν`.
    pub intensity: f64,
    pub samples: usize,
    pub statistics: Vec<Statistic>,
    /// Replace `φ` by 1; the check is then expected to fail.
    pub negative_control: bool,
    pub z_threshold: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            tau: 0.5,
            r_inner: 2,
            n_outer: 3,
            n_prime: 1,
            delta: 0.25,
            intensity: 1.0,
            samples: 100_000,
            statistics: Statistic::ALL.to_vec(),
            negative_control: false,
            z_threshold: 3.0,
        }
    }
}

/// Per-sample `(f(𝔗)·φ·reweight, f)` for every statistic.
fn draw(
    i: u64,
    seed: u64,
    cfg: &DensityConfig,
    params: &TaperParams,
    dec: &crate::potentials::DecomposedPotential,
) -> Result<Vec<(f64, f64)>> {
    let window = Window::new(cfg.n_outer as f64)?;
    let mut rng = substream(seed, "density/draw", i);
    let y: Configuration = sample_poisson(window, cfg.intensity, dec.base().spins(), &mut rng)?;
    let bonds = sample_bonds(&y, dec, &window, &mut rng);
    let ps = y.to_vec();
    let r = transform_particles(&ps, ps.len(), &bonds, params, dec)?;
    let phi = if cfg.negative_control { 1.0 } else { r.density };
    let small = SmallPart(dec);
    let hu = hamiltonian_particles(&small, &ps, &window).to_f64();
    let hu_t = hamiltonian_particles(&small, &r.particles, &window).to_f64();
    let weight = phi * (hu - hu_t).exp();
    Ok(cfg.statistics.iter().map(|s| (s.eval(&r.particles, params) * weight, s.eval(&ps, params))).collect())
}

pub fn check_density_identity(model: &ModelSpec, cfg: &DensityConfig, seed: u64) -> Result<SuiteReport> {
    if cfg.samples < 2 {
        return Err(Error::Parameter("need at least two samples".into()));
    }
    let dec = model.build()?;
    let params = TaperParams::new(cfg.tau, cfg.r_inner, cfg.n_outer, cfg.n_prime, cfg.delta, &dec)?;
    let rows = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| draw(i, seed, cfg, &params, &dec))
        .collect::<Result<Vec<_>>>()?;
    let suite = if cfg.negative_control { "density-negative-control" } else { "density" };
    let mut report = SuiteReport::new(suite, seed);
    for (k, s) in cfg.statistics.iter().enumerate() {
        let diffs: Vec<f64> = rows.iter().map(|r| r[k].0 - r[k].1).collect();
        let lhs: Vec<f64> = rows.iter().map(|r| r[k].0).collect();
        let rhs: Vec<f64> = rows.iter().map(|r| r[k].1).collect();
        let (d, se) = mean_and_standard_error(&diffs);
        let z = if se > 0.0 { d / se } else if d == 0.0 { 0.0 } else { f64::INFINITY };
        let (ml, _) = mean_and_standard_error(&lhs);
        let (mr, _) = mean_and_standard_error(&rhs);
        let c = Check::new(s.name(), seed)
            .measured(z)
            .tolerance(format!("|z| < {}", cfg.z_threshold))
            .detail(format!("E[f∘𝔗·φ] = {ml:.6}, E[f] = {mr:.6}, paired SE {se:.3e}, n = {}", cfg.samples))
            .passed(z.abs() < cfg.z_threshold);
        let mut c = c;
        c.instances = cfg.samples as u64;
        report.push(c);
    }
    Ok(report)
}
