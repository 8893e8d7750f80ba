//! The deformed translation `𝔗_{R,n}` and its relatives.
//!
//! Every particle `y` is moved to `y + d·t(y)·e` with `e = (1, 0)` and
//! `d = ±1`. The distance map `t = t^{Y,B}` is built recursively:
//!
//! ```text
//! t₀ = τ_{R,n}(|·|)
//! P_k = argmin of t_k over particles not yet fixed, τ_k its value
//! C_k = B-clusters of P_k, all fixed at distance τ_k
//! t_{k+1} = t_k ∧ min_{y′ ∈ C_k} m_{y′,τ_k}
//! ```
//!
//! `τ_{R,n}` is the logarithmic taper from `τ` inside `Λ_R` to `0` outside
//! `Λ_n`, `|·|` is the max norm, and `m_{y′,t}` slows the translation down
//! near already-fixed particles so that hard-core contacts move rigidly.
//! The map `t` does not depend on `d`; [`backward_transform`] only flips
//! the sign. [`inverse_transform`] rebuilds the same recursion from the
//! image by solving `x + d·t_k(x) = ỹ` along `e`.
//!
//! The Jacobian density is `φ = ∏_k ∏_{y ∈ P_k} |1 + d·∂_e t_k(y)|`.
//! [`good_config_report`] evaluates the functionals `Σ₁ … Σ₅` that define
//! the good set on which the key estimates hold.

mod construction;
mod good;
mod taper;

pub use construction::{
    distortion_height, m_aux, Branch, DerivativeRecord, DistanceMap, Step, TValue, ARGMIN_TOLERANCE,
    BRANCH_TOLERANCE,
};
pub use good::{augment_bplus_particles, good_config_report_particles, tau_q, GoodConfigReport};
pub use taper::{big_q_taper, q_taper, r_ratio, s_star, taper_at, Taper};

use serde::{Deserialize, Serialize};

use crate::bonds::BondSet;
use crate::error::{Error, Result};
use crate::particles::{Configuration, Particle, Window};
use crate::potentials::{hamiltonian_particles, DecomposedPotential, SmoothPart};

use construction::{construct, construct_inverse, Construction};

pub const TRANSFORM_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn reversed(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Forward,
    Backward,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaperParams {
    pub tau: f64,
    pub r_inner: u32,
    pub n_outer: u32,
    pub n_prime: u32,
    pub direction: Direction,
    pub c_k: f64,
    pub c_f: f64,
    pub delta: f64,
}

impl TaperParams {
    /// Forward-direction parameters with `c_K`, `c_f` taken from `dec`.
    pub fn new(tau: f64, r_inner: u32, n_outer: u32, n_prime: u32, delta: f64, dec: &DecomposedPotential) -> Result<Self> {
        let p = TaperParams {
            tau,
            r_inner,
            n_outer,
            n_prime,
            direction: Direction::Forward,
            c_k: dec.c_k,
            c_f: dec.c_f,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.tau) {
            return Err(Error::Parameter(format!("tau must lie in [0, 1/2], got {}", self.tau)));
        }
        if !(self.n_outer > self.r_inner && self.r_inner >= self.n_prime && self.n_prime >= 1) {
            return Err(Error::Parameter(format!(
                "need n > R >= n' >= 1, got n = {}, R = {}, n' = {}",
                self.n_outer, self.r_inner, self.n_prime
            )));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::Parameter(format!("delta must lie in (0, 1/2), got {}", self.delta)));
        }
        if !(self.c_k.is_finite() && self.c_k >= 0.0 && self.c_f.is_finite() && self.c_f >= 0.0) {
            return Err(Error::Parameter("c_K and c_f must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn taper(&self) -> Taper {
        Taper::new(self.tau, self.r_inner as f64, self.n_outer as f64)
    }

    /// `τ_{R,n}(s)`.
    pub fn tau_rn(&self, s: f64) -> f64 {
        self.taper().eval(s)
    }

    /// Parses `"tau,R,n,nprime,delta"`.
    pub fn parse(spec: &str, dec: &DecomposedPotential) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::Parameter(format!("expected tau,R,n,nprime,delta, got {spec:?}")));
        }
        let bad = |what: &str| Error::Parameter(format!("cannot parse {what} in {spec:?}"));
        let tau: f64 = parts[0].parse().map_err(|_| bad("tau"))?;
        let r: u32 = parts[1].parse().map_err(|_| bad("R"))?;
        let n: u32 = parts[2].parse().map_err(|_| bad("n"))?;
        let np: u32 = parts[3].parse().map_err(|_| bad("nprime"))?;
        let delta: f64 = parts[4].parse().map_err(|_| bad("delta"))?;
        TaperParams::new(tau, r, n, np, delta, dec)
    }
}

/// Output of a forward, backward or inverse transform. Particle `i` of the
/// output is particle `i` of the input moved along `e`; bonds keep their
/// index pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformResult {
    pub kind: TransformKind,
    pub direction: Direction,
    pub steps: Vec<Step>,
    pub t_map: Vec<f64>,
    pub particles: Vec<Particle>,
    pub interior_len: usize,
    pub bonds: BondSet,
    /// For an inverse this is the density of the forward map at the
    /// recovered configuration.
    pub density: f64,
    pub log_density: f64,
    pub derivative_log: Vec<DerivativeRecord>,
    pub ties: usize,
}

impl TransformResult {
    fn assemble(
        kind: TransformKind,
        direction: Direction,
        c: Construction,
        interior_len: usize,
        bonds: &BondSet,
    ) -> Self {
        let log_density: f64 = c.log.iter().map(|r| r.factor.ln()).sum();
        let ties = c.log.iter().filter(|r| r.tie).count();
        TransformResult {
            kind,
            direction,
            steps: c.steps,
            t_map: c.t_map,
            particles: c.positions,
            interior_len,
            bonds: bonds.clone(),
            density: log_density.exp(),
            log_density,
            derivative_log: c.log,
            ties,
        }
    }

    pub fn tau_k(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.tau).collect()
    }

    /// Index of the last step, `−1` when there were none.
    pub fn last_step(&self) -> i64 {
        self.steps.len() as i64 - 1
    }

    /// The output as a configuration in `window`, keeping the input's
    /// interior/boundary split by index.
    pub fn transformed_config(&self, window: Window) -> Result<Configuration> {
        let (a, b) = self.particles.split_at(self.interior_len);
        Configuration::new(window, a.to_vec(), b.to_vec())
    }

    pub fn to_file(&self) -> TransformFile {
        TransformFile {
            schema_version: TRANSFORM_SCHEMA_VERSION,
            kind: self.kind,
            direction: self.direction,
            tau_k: self.tau_k(),
            partition: self.steps.clone(),
            t_map: self.t_map.clone(),
            particles: self.particles.iter().map(|p| (p.x[0], p.x[1], p.spin.0)).collect(),
            interior_len: self.interior_len,
            bonds: self.bonds.iter().collect(),
            density: self.density,
            log_density: self.log_density,
            ties: self.ties,
            derivative_log: self.derivative_log.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }
}

/// Serialized form of a [`TransformResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformFile {
    pub schema_version: u32,
    pub kind: TransformKind,
    pub direction: Direction,
    pub tau_k: Vec<f64>,
    pub partition: Vec<Step>,
    pub t_map: Vec<f64>,
    pub particles: Vec<(f64, f64, u16)>,
    pub interior_len: usize,
    pub bonds: Vec<(usize, usize)>,
    pub density: f64,
    pub log_density: f64,
    pub ties: usize,
    pub derivative_log: Vec<DerivativeRecord>,
}

/// Transforms a particle list in `params.direction`.
pub fn transform_particles(
    particles: &[Particle],
    interior_len: usize,
    bonds: &BondSet,
    params: &TaperParams,
    dec: &DecomposedPotential,
) -> Result<TransformResult> {
    params.validate()?;
    let c = construct(particles, bonds, params, dec, params.direction.sign(), false)?;
    let kind = match params.direction {
        Direction::Forward => TransformKind::Forward,
        Direction::Backward => TransformKind::Backward,
    };
    Ok(TransformResult::assemble(kind, params.direction, c, interior_len, bonds))
}

/// `𝔗_{R,n}(Y, B)`.
pub fn forward_transform(
    config: &Configuration,
    bonds: &BondSet,
    params: &TaperParams,
    dec: &DecomposedPotential,
) -> Result<TransformResult> {
    let p = params.with_direction(Direction::Forward);
    transform_particles(&config.to_vec(), config.interior().len(), bonds, &p, dec)
}

/// `𝔗̄_{R,n}(Y, B)`, the same construction along `−e`.
pub fn backward_transform(
    config: &Configuration,
    bonds: &BondSet,
    params: &TaperParams,
    dec: &DecomposedPotential,
) -> Result<TransformResult> {
    let p = params.with_direction(Direction::Backward);
    transform_particles(&config.to_vec(), config.interior().len(), bonds, &p, dec)
}

/// Inverts the map in `params.direction` from its image.
pub fn inverse_transform(
    particles: &[Particle],
    bonds: &BondSet,
    params: &TaperParams,
    dec: &DecomposedPotential,
) -> Result<TransformResult> {
    params.validate()?;
    let c = construct_inverse(particles, bonds, params, dec, params.direction.sign())?;
    Ok(TransformResult::assemble(TransformKind::Inverse, params.direction, c, particles.len(), bonds))
}

/// Inverts a forward or backward result, keeping its interior split.
pub fn inverse_of(result: &TransformResult, params: &TaperParams, dec: &DecomposedPotential) -> Result<TransformResult> {
    let p = params.with_direction(result.direction);
    let mut inv = inverse_transform(&result.particles, &result.bonds, &p, dec)?;
    inv.interior_len = result.interior_len;
    Ok(inv)
}

/// `φ_{R,n}` of a result.
pub fn density(result: &TransformResult) -> f64 {
    result.density
}

/// Snapshots `t₀, t₁, …` of the forward recursion, one per step.
pub fn distance_maps<'a>(
    particles: &[Particle],
    bonds: &BondSet,
    params: &TaperParams,
    dec: &'a DecomposedPotential,
) -> Result<Vec<DistanceMap<'a>>> {
    params.validate()?;
    Ok(construct(particles, bonds, params, dec, params.direction.sign(), true)?.maps)
}

pub fn good_config_report(
    config: &Configuration,
    bonds: &BondSet,
    params: &TaperParams,
    dec: &DecomposedPotential,
) -> Result<GoodConfigReport> {
    good_config_report_particles(&config.to_vec(), bonds, params, dec)
}

/// Both sides of the two key estimates at one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyEstimates {
    pub log_phi: f64,
    pub log_phi_bar: f64,
    pub h_original: f64,
    pub h_forward: f64,
    pub h_backward: f64,
    pub delta: f64,
}

impl KeyEstimates {
    /// `log φ + log φ̄ ≥ −δ`.
    pub fn density_holds(&self) -> bool {
        self.log_phi + self.log_phi_bar >= -self.delta
    }

    /// `H^Ū_{Λ_n}(𝔗Y) + H^Ū_{Λ_n}(𝔗̄Y) ≤ 2H^Ū_{Λ_n}(Y) + δ`.
    pub fn hamiltonian_holds(&self) -> bool {
        self.h_forward + self.h_backward <= 2.0 * self.h_original + self.delta
    }
}

pub fn key_estimates(
    config: &Configuration,
    bonds: &BondSet,
    params: &TaperParams,
    dec: &DecomposedPotential,
) -> Result<KeyEstimates> {
    let fwd = forward_transform(config, bonds, params, dec)?;
    let bwd = backward_transform(config, bonds, params, dec)?;
    let region = Window::new(params.n_outer as f64)?;
    let e = SmoothPart(dec);
    let h = |ps: &[Particle]| hamiltonian_particles(&e, ps, &region).to_f64();
    Ok(KeyEstimates {
        log_phi: fwd.log_density,
        log_phi_bar: bwd.log_density,
        h_original: h(&config.to_vec()),
        h_forward: h(&fwd.particles),
        h_backward: h(&bwd.particles),
        delta: params.delta,
    })
}

#[cfg(test)]
mod tests;
