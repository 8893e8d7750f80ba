use crate::cells::CellList;
use crate::extreal::ExtReal;
use crate::particles::{Configuration, Particle, Window};

use super::decomposition::{SmallPart, SmoothPart};
use super::potts::{eval_pair_potential, PottsPotential};

/// A symmetric pair interaction with a finite max-norm cutoff.
pub trait PairEnergy {
    fn pair(&self, a: &Particle, b: &Particle) -> ExtReal;

    /// Pairs further apart than this in the max norm do not interact.
    fn cutoff(&self) -> f64;
}

impl PairEnergy for PottsPotential {
    fn pair(&self, a: &Particle, b: &Particle) -> ExtReal {
        eval_pair_potential(self, a, b)
    }

    fn cutoff(&self) -> f64 {
        self.range() * self.norm().max_norm_ratio()
    }
}

impl PairEnergy for SmoothPart<'_> {
    fn pair(&self, a: &Particle, b: &Particle) -> ExtReal {
        ExtReal::Finite(self.0.smooth_pair(a, b))
    }

    fn cutoff(&self) -> f64 {
        self.0.smooth_range() * self.0.base().norm().max_norm_ratio()
    }
}

impl PairEnergy for SmallPart<'_> {
    fn pair(&self, a: &Particle, b: &Particle) -> ExtReal {
        ExtReal::Finite(self.0.small_pair(a, b))
    }

    fn cutoff(&self) -> f64 {
        self.0.smooth_range() * self.0.base().norm().max_norm_ratio()
    }
}

fn in_region(config: &Configuration, region: &Window, i: usize) -> bool {
    region.contains(config.particle(i).x)
}

/// `H_Λ(Y)` by enumerating every unordered pair with at least one particle
/// in `region`.
pub fn hamiltonian_brute_force<E: PairEnergy + ?Sized>(e: &E, config: &Configuration, region: &Window) -> ExtReal {
    let n = config.len();
    let mut h = ExtReal::ZERO;
    for i in 0..n {
        for j in i + 1..n {
            if in_region(config, region, i) || in_region(config, region, j) {
                h += e.pair(config.particle(i), config.particle(j));
            }
        }
    }
    h
}

/// `H_Λ(Y)` via a cell list; sums in the same pair order as
/// [`hamiltonian_brute_force`], so both agree bit for bit.
pub fn hamiltonian<E: PairEnergy + ?Sized>(e: &E, config: &Configuration, region: &Window) -> ExtReal {
    let pts = config.to_vec();
    hamiltonian_particles(e, &pts, region)
}

/// `H_Λ` of an arbitrary particle list: every unordered pair with at least
/// one particle in `region`.
pub fn hamiltonian_particles<E: PairEnergy + ?Sized>(e: &E, particles: &[Particle], region: &Window) -> ExtReal {
    let cells = CellList::from_points(e.cutoff().max(0.25), particles.iter().map(|p| &p.x));
    let inside: Vec<bool> = particles.iter().map(|p| region.contains(p.x)).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, p) in particles.iter().enumerate() {
        for j in cells.neighbours(p.x) {
            if j > i && (inside[i] || inside[j]) {
                pairs.push((i, j));
            }
        }
    }
    pairs.sort_unstable();
    let mut h = ExtReal::ZERO;
    for (i, j) in pairs {
        h += e.pair(&particles[i], &particles[j]);
    }
    h
}

/// `Σ_{x ∈ others, x ≠ skip} E(y, x)`.
pub fn interaction_energy<E: PairEnergy + ?Sized>(
    e: &E,
    others: &[Particle],
    y: &Particle,
    skip: Option<usize>,
) -> ExtReal {
    let mut h = ExtReal::ZERO;
    for (i, x) in others.iter().enumerate() {
        if Some(i) != skip {
            h += e.pair(y, x);
        }
    }
    h
}
