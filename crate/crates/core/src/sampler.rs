//! Poisson base process and a grand-canonical Metropolis–Hastings chain
//! for the conditional Gibbs distribution in a window with fixed boundary.
//!
//! The target has density `z^{N} e^{−H_Λ(Y)}` against the unit-intensity
//! Poisson process with uniform spins. Births, deaths and Gaussian moves
//! use the standard acceptance ratios
//!
//! - birth: `min(1, z|Λ|/(N+1) · e^{−ΔH})`,
//! - death: `min(1, N/(z|Λ|) · e^{+ΔH})` with `ΔH` the removed energy,
//! - move: `min(1, e^{−ΔH})`, proposals leaving the window are rejected.
//!
//! Burn-in lengths are empirical; no mixing-time bound is claimed.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::cells::CellList;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::particles::{Configuration, Particle, Spin, Window};
use crate::potentials::{eval_pair_potential, hamiltonian, PairEnergy, PottsPotential};
use crate::rng::Stream;

const RESYNC_EVERY: u64 = 10_000;
const RESYNC_TOLERANCE: f64 = 1e-6;

/// Proposal probabilities of birth, death and translation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveMix {
    pub birth: f64,
    pub death: f64,
    pub translate: f64,
}

impl Default for MoveMix {
    fn default() -> Self {
        MoveMix { birth: 0.35, death: 0.35, translate: 0.30 }
    }
}

#[derive(Clone, Debug)]
pub struct GibbsParams {
    pub activity: f64,
    pub potential: PottsPotential,
    pub window: Window,
    pub boundary: Vec<Particle>,
    pub move_mix: MoveMix,
    pub sweeps: usize,
    pub burn_in: usize,
    pub thinning: usize,
    /// Standard deviation of translation proposals.
    pub move_scale: f64,
    /// Births are proposed with density `∝ exp(κ·clamp(x₀, −1, 1))` but
    /// accepted as if uniform. Only for negative controls; keep at zero otherwise.
    pub birth_tilt: f64,
}

impl GibbsParams {
    pub fn new(potential: PottsPotential, activity: f64, window: Window) -> Self {
        let move_scale = 0.25 * potential.min_positive_hard_core().unwrap_or(1.0);
        GibbsParams {
            activity,
            potential,
            window,
            boundary: Vec::new(),
            move_mix: MoveMix::default(),
            sweeps: 100,
            burn_in: 100,
            thinning: 1,
            move_scale,
            birth_tilt: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.activity > 0.0 && self.activity.is_finite()) {
            return Err(Error::Parameter(format!("activity must be positive, got {}", self.activity)));
        }
        let m = self.move_mix;
        if [m.birth, m.death, m.translate].iter().any(|p| !(*p >= 0.0)) || (m.birth + m.death + m.translate - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter("move probabilities must be nonnegative and sum to 1".into()));
        }
        if self.thinning == 0 {
            return Err(Error::Parameter("thinning must be positive".into()));
        }
        if !(self.move_scale > 0.0 && self.move_scale.is_finite()) {
            return Err(Error::Parameter("move scale must be positive".into()));
        }
        if self.boundary.iter().any(|p| self.window.contains(p.x)) {
            return Err(Error::Parameter("boundary particles must lie outside the window".into()));
        }
        for p in &self.boundary {
            self.potential.check_spin(p)?;
        }
        Ok(())
    }

    /// Proposals per sweep: `max(1, ⌈z|Λ|⌉)`.
    pub fn steps_per_sweep(&self) -> u64 {
        (self.activity * self.window.area()).ceil().max(1.0) as u64
    }
}

/// Acceptance counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub proposed: [u64; 3],
    pub accepted: [u64; 3],
    pub resyncs: u64,
    pub max_resync_error: f64,
}

/// The chain's current configuration with an energy cache.
#[derive(Clone, Debug)]
pub struct ChainState {
    interior: Vec<Particle>,
    boundary: Vec<Particle>,
    window: Window,
    inner_cells: CellList,
    outer_cells: CellList,
    energy: f64,
    steps: u64,
    pub diagnostics: ChainDiagnostics,
}

impl ChainState {
    pub fn new(params: &GibbsParams, start: &[Particle]) -> Result<Self> {
        params.validate()?;
        let cell = params.potential.cutoff().max(0.5);
        let config = Configuration::new(params.window, start.to_vec(), params.boundary.clone())?;
        let energy = hamiltonian(&params.potential, &config, &params.window);
        let energy = energy
            .finite()
            .ok_or_else(|| Error::Configuration("initial configuration violates the hard core".into()))?;
        Ok(ChainState {
            inner_cells: CellList::from_points(cell, start.iter().map(|p| &p.x)),
            outer_cells: CellList::from_points(cell, params.boundary.iter().map(|p| &p.x)),
            interior: start.to_vec(),
            boundary: params.boundary.clone(),
            window: params.window,
            energy,
            steps: 0,
            diagnostics: ChainDiagnostics::default(),
        })
    }

    pub fn interior(&self) -> &[Particle] {
        &self.interior
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn configuration(&self) -> Configuration {
        Configuration::new(self.window, self.interior.clone(), self.boundary.clone())
            .expect("chain keeps a valid configuration")
    }

    /// Energy of `y` with every particle except interior index `skip`.
    fn local_energy(&self, pot: &PottsPotential, y: &Particle, skip: Option<usize>) -> ExtReal {
        let mut e = ExtReal::ZERO;
        for j in self.inner_cells.neighbours(y.x) {
            if Some(j) != skip {
                e += eval_pair_potential(pot, y, &self.interior[j]);
                if e.is_infinite() {
                    return e;
                }
            }
        }
        for j in self.outer_cells.neighbours(y.x) {
            e += eval_pair_potential(pot, y, &self.boundary[j]);
            if e.is_infinite() {
                return e;
            }
        }
        e
    }

    fn resync(&mut self, pot: &PottsPotential) {
        let exact = hamiltonian(pot, &self.configuration(), &self.window).to_f64();
        let err = (exact - self.energy).abs();
        self.diagnostics.resyncs += 1;
        self.diagnostics.max_resync_error = self.diagnostics.max_resync_error.max(err);
        debug_assert!(err <= RESYNC_TOLERANCE * (1.0 + exact.abs()), "energy cache drifted by {err}");
        self.energy = exact;
    }
}

/// Inverse CDF at `u` of the density `∝ exp(k·clamp(x, −c, c))` on
/// `[−r, r)` with `c = min(1, r)`.
fn tilted_coordinate(r: f64, k: f64, u: f64) -> f64 {
    let c = r.min(1.0);
    let (lo, hi) = ((-k * c).exp(), (k * c).exp());
    let left = lo * (r - c);
    let middle = (hi - lo) / k;
    let right = hi * (r - c);
    let m = u * (left + middle + right);
    let x = if m < left {
        -r + m / lo
    } else if m < left + middle {
        (lo + k * (m - left)).ln() / k
    } else {
        c + (m - left - middle) / hi
    };
    x.clamp(-r, r - r * f64::EPSILON)
}

fn propose_position(params: &GibbsParams, rng: &mut Stream) -> [f64; 2] {
    let r = params.window.half_width();
    let k = params.birth_tilt;
    let x0 = if k == 0.0 {
        rng.gen_range(-r..r)
    } else {
        tilted_coordinate(r, k, rng.gen())
    };
    [x0, rng.gen_range(-r..r)]
}

/// One Metropolis–Hastings proposal. Returns whether it was accepted.
pub fn mcmc_step(state: &mut ChainState, params: &GibbsParams, rng: &mut Stream) -> bool {
    let pot = &params.potential;
    let za = params.activity * params.window.area();
    let u: f64 = rng.gen();
    let m = params.move_mix;
    let kind = if u < m.birth {
        0
    } else if u < m.birth + m.death {
        1
    } else {
        2
    };
    state.diagnostics.proposed[kind] += 1;
    let n = state.interior.len();
    let accepted = match kind {
        0 => {
            let x = propose_position(params, rng);
            let spin = Spin(rng.gen_range(0..pot.spins()) as u16);
            let y = Particle { x, spin };
            let de = state.local_energy(pot, &y, None);
            match de {
                ExtReal::PosInf => false,
                ExtReal::Finite(de) => {
                    let ratio = za / (n as f64 + 1.0) * (-de).exp();
                    if ratio >= 1.0 || rng.gen::<f64>() < ratio {
                        state.inner_cells.insert(n, y.x);
                        state.interior.push(y);
                        state.energy += de;
                        true
                    } else {
                        false
                    }
                }
            }
        }
        1 if n > 0 => {
            let i = rng.gen_range(0..n);
            let y = state.interior[i];
            let de = state.local_energy(pot, &y, Some(i)).to_f64();
            let ratio = n as f64 / za * de.exp();
            if ratio >= 1.0 || rng.gen::<f64>() < ratio {
                state.inner_cells.remove(i, y.x);
                let last = n - 1;
                if i != last {
                    state.inner_cells.relabel(last, i, state.interior[last].x);
                }
                state.interior.swap_remove(i);
                state.energy -= de;
                true
            } else {
                false
            }
        }
        2 if n > 0 => {
            let i = rng.gen_range(0..n);
            let old = state.interior[i];
            let normal = Normal::new(0.0, params.move_scale).expect("positive scale");
            let x = [old.x[0] + normal.sample(rng), old.x[1] + normal.sample(rng)];
            if !params.window.contains(x) {
                false
            } else {
                let new = Particle { x, spin: old.spin };
                match state.local_energy(pot, &new, Some(i)) {
                    ExtReal::PosInf => false,
                    ExtReal::Finite(e_new) => {
                        let e_old = state.local_energy(pot, &old, Some(i)).to_f64();
                        let de = e_new - e_old;
                        if de <= 0.0 || rng.gen::<f64>() < (-de).exp() {
                            state.inner_cells.remove(i, old.x);
                            state.inner_cells.insert(i, x);
                            state.interior[i] = new;
                            state.energy += de;
                            true
                        } else {
                            false
                        }
                    }
                }
            }
        }
        _ => false,
    };
    if accepted {
        state.diagnostics.accepted[kind] += 1;
    }
    state.steps += 1;
    if state.steps % RESYNC_EVERY == 0 {
        state.resync(pot);
    }
    accepted
}

/// Samples and diagnostics of one chain.
#[derive(Clone, Debug)]
pub struct ChainRun {
    pub samples: Vec<Configuration>,
    pub diagnostics: ChainDiagnostics,
}

/// Runs `burn_in` sweeps, then `sweeps` sweeps emitting every
/// `thinning`-th state. Starts from the empty configuration.
pub fn run_chain_detailed(params: &GibbsParams, rng: &mut Stream) -> Result<ChainRun> {
    let mut state = ChainState::new(params, &[])?;
    let per = params.steps_per_sweep();
    for _ in 0..params.burn_in as u64 * per {
        mcmc_step(&mut state, params, rng);
    }
    let mut samples = Vec::with_capacity(params.sweeps / params.thinning);
    for sweep in 1..=params.sweeps {
        for _ in 0..per {
            mcmc_step(&mut state, params, rng);
        }
        if sweep % params.thinning == 0 {
            samples.push(state.configuration());
        }
    }
    state.resync(&params.potential);
    Ok(ChainRun { samples, diagnostics: state.diagnostics })
}

pub fn run_chain(params: &GibbsParams, rng: &mut Stream) -> Result<Vec<Configuration>> {
    Ok(run_chain_detailed(params, rng)?.samples)
}

/// Poisson process of the given intensity in `window` with uniform spins.
pub fn sample_poisson(window: Window, intensity: f64, spins: usize, rng: &mut Stream) -> Result<Configuration> {
    if !(intensity > 0.0 && intensity.is_finite()) || spins == 0 {
        return Err(Error::Parameter("intensity must be positive and the spin space nonempty".into()));
    }
    let mean = intensity * window.area();
    let n = Poisson::new(mean).map_err(|e| Error::Parameter(e.to_string()))?.sample(rng) as usize;
    let r = window.half_width();
    let interior = (0..n)
        .map(|_| Particle::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(0..spins) as u16))
        .collect();
    Configuration::new(window, interior, Vec::new())
}

/// A Poisson ring `Λ_{r+width} ∖ Λ_r` of boundary particles, thinned so
/// that no two of them violate the hard core.
pub fn boundary_ring(window: Window, width: f64, intensity: f64, pot: &PottsPotential, rng: &mut Stream) -> Result<Vec<Particle>> {
    let outer = Window::new(window.half_width() + width)?;
    let cloud = sample_poisson(outer, intensity, pot.spins(), rng)?;
    let mut ring: Vec<Particle> = Vec::new();
    for p in cloud.interior() {
        if window.contains(p.x) {
            continue;
        }
        if ring.iter().all(|q| eval_pair_potential(pot, p, q).is_finite()) {
            ring.push(*p);
        }
    }
    Ok(ring)
}

/// Estimate of the correlation function at one probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    /// `estimate > ξ^{#probe} + 3·SE`.
    pub violation: bool,
}

/// `ρ(Y′) ≈ e^{−H(Y′)} · mean_samples e^{−W(Y′, Y)}`, where `W` sums the
/// interactions between probe and sample particles.
pub fn estimate_correlation(
    samples: &[Configuration],
    probes: &[Vec<Particle>],
    pot: &PottsPotential,
    ruelle: f64,
) -> Result<Vec<CorrelationEstimate>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut out = Vec::with_capacity(probes.len());
    for probe in probes {
        let mut h_self = ExtReal::ZERO;
        for i in 0..probe.len() {
            for j in i + 1..probe.len() {
                h_self += eval_pair_potential(pot, &probe[i], &probe[j]);
            }
        }
        let pre = h_self.boltzmann();
        let vals: Vec<f64> = if pre == 0.0 {
            vec![0.0; samples.len()]
        } else {
            samples
                .iter()
                .map(|s| {
                    let mut w = ExtReal::ZERO;
                    for y in probe {
                        for x in s.particles() {
                            w += eval_pair_potential(pot, y, x);
                        }
                    }
                    pre * w.boltzmann()
                })
                .collect()
        };
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = if vals.len() > 1 { vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        let se = (var / n).sqrt();
        out.push(CorrelationEstimate {
            estimate: mean,
            standard_error: se,
            violation: mean > ruelle.powi(probe.len() as i32) + 3.0 * se,
        });
    }
    Ok(out)
}
