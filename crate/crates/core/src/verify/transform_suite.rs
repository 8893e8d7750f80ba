//! Construction properties of the deformed translation on sampled
//! `(Y, B)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bonds::{sample_bonds, BondSet};
use crate::error::Result;
use crate::particles::{distance, Configuration, Particle, Window};
use crate::potentials::{DecomposedPotential, ModelSpec};
use crate::rng::{rng_stream, substream};
use crate::sampler::{run_chain, GibbsParams};
use crate::transform::{
    distance_maps, good_config_report, inverse_of, inverse_transform, key_estimates, transform_particles,
    Direction, TaperParams, TransformResult, ARGMIN_TOLERANCE,
};

use super::report::{Check, SuiteReport};

const ROUND_TRIP_TOLERANCE: f64 = 1e-9;
const HLD_STEPS: [f64; 3] = [1e-3, 1e-2, 0.1];
const INTERPOLATION: [f64; 6] = [-1.0, -0.5, -0.25, 0.25, 0.5, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformSuiteConfig {
    pub window: f64,
    /// Overrides the model's activity when set.
    pub activity: Option<f64>,
    pub samples: usize,
    pub thinning: usize,
    pub burn_in: usize,
    /// Draws with more particles are skipped.
    pub max_particles: usize,
    pub tau: f64,
    pub r_inner: u32,
    pub n_outer: u32,
    pub n_prime: u32,
    pub delta: f64,
    /// Distance maps probed per draw for the ½-Lipschitz check.
    pub hld_maps: usize,
    pub hld_probes: usize,
}

impl Default for TransformSuiteConfig {
    fn default() -> Self {
        TransformSuiteConfig {
            window: 6.0,
            activity: None,
            samples: 200,
            thinning: 5,
            burn_in: 200,
            max_particles: 100,
            tau: 0.05,
            r_inner: 3,
            n_outer: 40,
            n_prime: 1,
            delta: 0.25,
            hld_maps: 4,
            hld_probes: 8,
        }
    }
}

impl TransformSuiteConfig {
    pub fn taper_params(&self, dec: &DecomposedPotential) -> Result<TaperParams> {
        TaperParams::new(self.tau, self.r_inner, self.n_outer, self.n_prime, self.delta, dec)
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    items: u64,
    failures: u64,
    first: Option<u64>,
    worst: f64,
    hits: u64,
}

impl Tally {
    fn add(&mut self, instance: u64, ok: bool) {
        self.items += 1;
        if !ok {
            self.failures += 1;
            self.first = Some(self.first.map_or(instance, |f| f.min(instance)));
        }
    }

    fn worst(&mut self, v: f64) {
        if v > self.worst || v.is_nan() {
            self.worst = v;
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.items += o.items;
        self.failures += o.failures;
        self.hits += o.hits;
        self.first = match (self.first, o.first) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if o.worst > self.worst || o.worst.is_nan() {
            self.worst = o.worst;
        }
        self
    }
}

const NAMES: [(&str, &str); 17] = [
    ("partition", "C_k disjoint, covering, P_k ⊆ C_k"),
    ("mono", "τ_0 ≤ τ_1 ≤ … exactly"),
    ("vercon", "equal t on K pairs, exact"),
    ("greps", "non-K pairs stay off K"),
    ("greps_interpolated", "s ∈ {±¼, ±½, ±1}"),
    ("ordering_bound", "0 ≤ t ≤ τ_{R,n}(|y|) ≤ τ"),
    ("round_trip_forward", "inverse∘forward, max error < 1e-9"),
    ("round_trip_inverse", "forward∘inverse, max error < 1e-9"),
    ("round_trip_backward", "inverse∘backward, max error < 1e-9"),
    ("half_lipschitz", "|Δt/h| ≤ ½ + 1e-9, h ∈ {1e-3, 1e-2, 0.1}"),
    ("step_consistency", "t_{k+1} = τ_k on C_k, 1e-12"),
    ("factor_range", "|1 ± ∂_e t_k| ∈ [½, 3/2]"),
    ("finite_differences", "central FD, step 1e-6, rel 1e-4"),
    ("inner_outer", "good draws: Λ_{n′−1} by τ, Λ_n^c fixed, #Λ_n kept"),
    ("key_density", "good draws: log φ + log φ̄ ≥ −δ"),
    ("key_hamiltonian", "good draws: H(𝔗Y) + H(𝔗̄Y) ≤ 2H(Y) + δ"),
    ("good_fraction", "informational"),
];

fn max_error(a: &[Particle], b: &[Particle]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p.x[0] - q.x[0]).abs().max((p.x[1] - q.x[1]).abs()))
        .fold(0.0, f64::max)
}

fn construction_checks(t: &mut [Tally], idx: u64, ps: &[Particle], r: &TransformResult, params: &TaperParams, dec: &DecomposedPotential) {
    let n = ps.len();
    let mut seen = vec![false; n];
    let mut ok = true;
    for s in &r.steps {
        for &i in &s.c {
            ok &= !std::mem::replace(&mut seen[i], true);
        }
        ok &= s.p.iter().all(|i| s.c.binary_search(i).is_ok());
    }
    t[0].add(idx, ok && seen.iter().all(|&s| s));
    t[1].add(idx, r.steps.windows(2).all(|w| w[0].tau <= w[1].tau));

    let taper = params.taper();
    for (i, y) in ps.iter().enumerate() {
        let t0 = taper.eval(y.radius());
        t[5].add(idx, r.t_map[i] >= 0.0 && r.t_map[i] <= t0 && t0 <= params.tau);
    }

    let pot = dec.base();
    let reach = (pot.range() + params.tau) * pot.norm().max_norm_ratio() + 1.0;
    let cells = crate::cells::CellList::from_points(reach, ps.iter().map(|p| &p.x));
    let sign = r.direction.sign();
    for i in 0..n {
        for j in cells.neighbours(ps[i].x) {
            if j <= i {
                continue;
            }
            let rc = pot.hard_core_radius(ps[i].spin.index(), ps[j].spin.index());
            if distance(&ps[i], &ps[j], pot.norm()) <= rc {
                t[2].add(idx, r.t_map[i] == r.t_map[j]);
            } else {
                t[3].add(idx, distance(&r.particles[i], &r.particles[j], pot.norm()) > rc);
                let dt = r.t_map[j] - r.t_map[i];
                let ok = INTERPOLATION
                    .iter()
                    .all(|s| distance(&ps[i], &ps[j].shifted(sign * s * dt), pot.norm()) > rc);
                t[4].add(idx, ok);
            }
        }
    }
    for rec in &r.derivative_log {
        t[11].add(idx, rec.factor >= 0.5 - 1e-12 && rec.factor <= 1.5 + 1e-12);
        if !rec.kink && !rec.tie {
            let err = (rec.finite_difference - rec.derivative).abs();
            t[12].add(idx, err <= 1e-4 * rec.derivative.abs() + 1e-9);
        }
    }
}

fn instance(
    idx: u64,
    config: &Configuration,
    bonds: &BondSet,
    params: &TaperParams,
    dec: &DecomposedPotential,
    cfg: &TransformSuiteConfig,
    seed: u64,
) -> Result<Vec<Tally>> {
    let mut t = vec![Tally::default(); NAMES.len()];
    let ps = config.to_vec();
    let fwd = transform_particles(&ps, ps.len(), bonds, params, dec)?;
    construction_checks(&mut t, idx, &ps, &fwd, params, dec);
    let bparams = params.with_direction(Direction::Backward);
    let bwd = transform_particles(&ps, ps.len(), bonds, &bparams, dec)?;
    construction_checks(&mut t, idx, &ps, &bwd, &bparams, dec);

    let e1 = max_error(&ps, &inverse_of(&fwd, params, dec)?.particles);
    t[6].add(idx, e1 < ROUND_TRIP_TOLERANCE);
    t[6].worst(e1);
    let inv = inverse_transform(&ps, bonds, params, dec)?;
    let e2 = max_error(&ps, &transform_particles(&inv.particles, ps.len(), bonds, params, dec)?.particles);
    t[7].add(idx, e2 < ROUND_TRIP_TOLERANCE);
    t[7].worst(e2);
    let e3 = max_error(&ps, &inverse_of(&bwd, &bparams, dec)?.particles);
    t[8].add(idx, e3 < ROUND_TRIP_TOLERANCE);
    t[8].worst(e3);

    if cfg.hld_maps > 0 && !ps.is_empty() {
        let maps = distance_maps(&ps, bonds, params, dec)?;
        let mut rng = substream(seed, "transform-suite/hld", idx);
        for _ in 0..cfg.hld_maps.min(maps.len()) {
            let k = rng.gen_range(0..maps.len());
            let m = &maps[k];
            for _ in 0..cfg.hld_probes {
                let base = ps[rng.gen_range(0..ps.len())];
                let y = Particle { x: [base.x[0] + rng.gen_range(-1.5..1.5), base.x[1] + rng.gen_range(-1.5..1.5)], ..base };
                let v = m.value(&y);
                for h in HLD_STEPS {
                    let q = (m.value(&y.shifted(h)) - v).abs() / h;
                    t[9].add(idx, q <= 0.5 + 1e-9);
                    t[9].worst(q);
                }
            }
            if k + 1 < maps.len() {
                for &i in &fwd.steps[k].c {
                    t[10].add(idx, (maps[k + 1].value(&ps[i]) - fwd.steps[k].tau).abs() <= ARGMIN_TOLERANCE);
                }
            }
        }
    }

    let good = good_config_report(config, bonds, params, dec)?;
    t[16].add(idx, true);
    if good.is_good {
        t[16].hits += 1;
        let inner = (params.n_prime > 1).then(|| Window::new((params.n_prime - 1) as f64)).transpose()?;
        let outer = Window::new(params.n_outer as f64)?;
        let mut ok = true;
        for (i, y) in ps.iter().enumerate() {
            if inner.is_some_and(|w| w.contains(y.x)) {
                ok &= fwd.t_map[i] == params.tau;
            }
            if !outer.contains(y.x) {
                ok &= fwd.t_map[i] == 0.0;
            }
        }
        let before = ps.iter().filter(|p| outer.contains(p.x)).count();
        let after = fwd.particles.iter().filter(|p| outer.contains(p.x)).count();
        t[13].add(idx, ok && before == after);
        let k = key_estimates(config, bonds, params, dec)?;
        t[14].add(idx, k.density_holds());
        t[14].worst(-(k.log_phi + k.log_phi_bar));
        t[15].add(idx, k.hamiltonian_holds());
        t[15].worst(k.h_forward + k.h_backward - 2.0 * k.h_original);
    }
    Ok(t)
}

/// Draws `(Y, B)` from the model's Gibbs chain and bond process.
pub fn sample_instances(
    model: &ModelSpec,
    cfg: &TransformSuiteConfig,
    dec: &DecomposedPotential,
    seed: u64,
) -> Result<Vec<(Configuration, BondSet)>> {
    let window = Window::new(cfg.window)?;
    let mut gp = GibbsParams::new(model.potential()?, cfg.activity.unwrap_or(model.activity), window);
    gp.thinning = cfg.thinning.max(1);
    gp.sweeps = cfg.samples * gp.thinning;
    gp.burn_in = cfg.burn_in;
    let samples = run_chain(&gp, &mut rng_stream(seed, "transform-suite/chain"))?;
    Ok(samples
        .into_iter()
        .enumerate()
        .map(|(i, y)| {
            let b = sample_bonds(&y, dec, &window, &mut substream(seed, "transform-suite/bonds", i as u64));
            (y, b)
        })
        .collect())
}

pub fn check_transform_suite(model: &ModelSpec, cfg: &TransformSuiteConfig, seed: u64) -> Result<SuiteReport> {
    let dec = model.build()?;
    let params = cfg.taper_params(&dec)?;
    let draws = sample_instances(model, cfg, &dec, seed)?;
    let skipped = draws.iter().filter(|(y, _)| y.len() > cfg.max_particles).count();
    let tallies = draws
        .par_iter()
        .enumerate()
        .filter(|(_, (y, _))| y.len() <= cfg.max_particles)
        .map(|(i, (y, b))| instance(i as u64, y, b, &params, &dec, cfg, seed))
        .collect::<Result<Vec<_>>>()?;
    let total = tallies.into_iter().fold(vec![Tally::default(); NAMES.len()], |acc, t| {
        acc.into_iter().zip(t).map(|(a, b)| a.merge(b)).collect()
    });

    let mut report = SuiteReport::new("transform", seed);
    for (k, (name, tol)) in NAMES.iter().enumerate() {
        let t = total[k];
        let mut c = Check::new(name, seed).counted(t.items, t.failures, t.first).tolerance(*tol).measured(t.worst);
        if k == 16 {
            let frac = if t.items == 0 { 0.0 } else { t.hits as f64 / t.items as f64 };
            c = c.measured(frac).detail(format!(
                "{} good of {} draws ({skipped} skipped above {} particles)",
                t.hits, t.items, cfg.max_particles
            ));
        }
        report.push(c);
    }
    Ok(report)
}
