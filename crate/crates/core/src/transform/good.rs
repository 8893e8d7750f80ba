//! The good-configuration functionals `Σ₁ … Σ₅`.

use serde::{Deserialize, Serialize};

use crate::bonds::{clusters, BondSet};
use crate::cells::CellList;
use crate::error::Result;
use crate::particles::{distance, Particle, Window};
use crate::potentials::{cutoff_fk, DecomposedPotential};

use super::construction::check_input;
use super::taper::{big_q_taper, q_taper};
use super::TaperParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodConfigReport {
    pub sigma: [f64; 5],
    /// `r^{Y,B₊}_{n′}`; `None` when no particle lies in `Λ_{n′}`.
    pub cluster_range: Option<f64>,
    pub is_good: bool,
}

impl GoodConfigReport {
    pub fn sigma_total(&self) -> f64 {
        self.sigma.iter().sum()
    }
}

/// `τ^q_{R,n}(y, y′) = 1{|y| ≤ |y′|}·|τ_{R,n}(|y| − c_K) − τ_{R,n}(|y′|)|²`.
pub fn tau_q(params: &TaperParams, y: &Particle, yp: &Particle) -> f64 {
    let (a, b) = (y.radius(), yp.radius());
    if a > b {
        return 0.0;
    }
    let t = params.taper();
    let d = t.eval(a - params.c_k) - t.eval(b);
    d * d
}

/// `B₊`: the bonds plus every pair closer than `r + 2ε`.
pub fn augment_bplus_particles(particles: &[Particle], bonds: &BondSet, dec: &DecomposedPotential) -> BondSet {
    let mut b = bonds.clone();
    let pot = dec.base();
    let cells = CellList::from_points(dec.c_k.max(1e-3), particles.iter().map(|p| &p.x));
    for (i, p) in particles.iter().enumerate() {
        for j in cells.neighbours(p.x) {
            if j <= i {
                continue;
            }
            let q = &particles[j];
            let r = pot.hard_core_radius(p.spin.index(), q.spin.index());
            if distance(p, q, pot.norm()) <= r + 2.0 * dec.eps() {
                b.insert(i, j).expect("distinct indices");
            }
        }
    }
    b
}

pub fn good_config_report_particles(
    particles: &[Particle],
    bonds: &BondSet,
    params: &TaperParams,
    dec: &DecomposedPotential,
) -> Result<GoodConfigReport> {
    check_input(particles, bonds)?;
    let n = particles.len();
    let bplus = augment_bplus_particles(particles, bonds, dec);
    let part = clusters(n, &bplus);

    let inner = Window::new(params.n_prime as f64)?;
    let mut hit = vec![false; part.clusters().len()];
    for (i, p) in particles.iter().enumerate() {
        if inner.contains(p.x) {
            hit[part.label(i)] = true;
        }
    }
    let cluster_range = (0..n)
        .filter(|&i| hit[part.label(i)])
        .map(|i| particles[i].radius())
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));

    // S(y) = Σ_{y″ ↔ y} τ^q(y, y″)
    let mut s = vec![0.0; n];
    for c in part.clusters() {
        for &i in c {
            s[i] = c.iter().map(|&j| tau_q(params, &particles[i], &particles[j])).sum();
        }
    }
    let cf2 = params.c_f * params.c_f;
    let sigma1 = 4.0 * cf2 * s.iter().sum::<f64>();

    let outer = Window::new(params.n_outer as f64)?;
    let qn = big_q_taper((params.n_outer - params.r_inner) as f64);
    let sigma2 = 2.0
        * params.tau
        * params.tau
        * particles
            .iter()
            .filter(|p| outer.contains(p.x))
            .map(|p| (q_taper(p.radius() - params.r_inner as f64) / qn).powi(2))
            .sum::<f64>();

    let kcells = CellList::from_points(dec.c_k.max(1e-3), particles.iter().map(|p| &p.x));
    let mut sigma3 = 0.0;
    for (i, p) in particles.iter().enumerate() {
        if s[i] == 0.0 {
            continue;
        }
        let deg = kcells.neighbours(p.x).filter(|&j| cutoff_fk(dec, p, &particles[j]) < 1.0).count();
        sigma3 += deg as f64 * s[i];
    }
    sigma3 *= 2.0 * cf2;

    let psi_reach = dec.psi_support() * dec.base().norm().max_norm_ratio();
    let mut sigma4 = 0.0;
    let mut sigma5 = 0.0;
    if psi_reach > 0.0 {
        let pcells = CellList::from_points(psi_reach, particles.iter().map(|p| &p.x));
        for (i, p) in particles.iter().enumerate() {
            let mut psi_row = 0.0;
            for j in pcells.neighbours(p.x) {
                let w = dec.psi(p, &particles[j]);
                if w == 0.0 {
                    continue;
                }
                psi_row += w;
                if j != i {
                    sigma4 += w * tau_q(params, p, &particles[j]);
                }
            }
            sigma5 += psi_row * s[i];
        }
    }
    sigma4 *= 3.0;
    sigma5 *= 6.0;

    let sigma = [sigma1, sigma2, sigma3, sigma4, sigma5];
    let total: f64 = sigma.iter().sum();
    let is_good = cluster_range.map_or(true, |r| r < params.r_inner as f64) && total < params.delta;
    Ok(GoodConfigReport { sigma, cluster_range, is_good })
}
