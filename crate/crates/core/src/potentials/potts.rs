use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::particles::{distance, Norm, Particle};

use super::well_behaved::WellBehavedFn;

/// `U(x₁,σ₁,x₂,σ₂) = φ_{σ₁σ₂}(|x₁ − x₂|_h)` with disc enlargements of width `ε`.
#[derive(Clone, Debug)]
pub struct PottsPotential {
    norm: Norm,
    spins: usize,
    table: Vec<WellBehavedFn>,
    eps: f64,
}

/// Where a pair sits relative to the hard core and its enlargements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairRegion {
    HardCore,
    /// `K ∖ K^U`; empty because `K` is taken equal to the hard core.
    KMinusHardCore,
    KPrimeMinusK,
    KDoublePrimeMinusKPrime,
    Outside,
}

impl PottsPotential {
    /// `table` is indexed `σ₁·|S| + σ₂` and must be symmetric with
    /// nonnegative entries.
    pub fn new(norm: Norm, spins: usize, table: Vec<WellBehavedFn>, eps: f64) -> Result<Self> {
        norm.validate()?;
        if spins == 0 {
            return Err(Error::Parameter("spin space must be nonempty".into()));
        }
        if table.len() != spins * spins {
            return Err(Error::Parameter(format!("table needs {} entries, got {}", spins * spins, table.len())));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
        }
        for a in 0..spins {
            for b in 0..spins {
                if table[a * spins + b] != table[b * spins + a] {
                    return Err(Error::Parameter(format!("table not symmetric at ({a}, {b})")));
                }
                if table[a * spins + b].min_value() < 0.0 {
                    return Err(Error::Parameter(format!("interaction ({a}, {b}) takes negative values")));
                }
            }
        }
        Ok(PottsPotential { norm, spins, table, eps })
    }

    /// Widom–Rowlinson: two spins, unlike particles exclude each other
    /// within `r0`, like particles do not interact.
    pub fn widom_rowlinson(r0: f64, norm: Norm, eps: f64) -> Result<Self> {
        let like = WellBehavedFn::zero();
        let unlike = WellBehavedFn::hard_core(r0)?;
        PottsPotential::new(norm, 2, vec![like.clone(), unlike.clone(), unlike, like], eps)
    }

    /// The same step interaction for every spin pair.
    pub fn uniform(norm: Norm, spins: usize, f: WellBehavedFn, eps: f64) -> Result<Self> {
        PottsPotential::new(norm, spins, vec![f; spins * spins], eps)
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    pub fn spins(&self) -> usize {
        self.spins
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn entry(&self, a: usize, b: usize) -> &WellBehavedFn {
        &self.table[a * self.spins + b]
    }

    pub fn hard_core_radius(&self, a: usize, b: usize) -> f64 {
        self.entry(a, b).r0()
    }

    /// Largest distance at which any pair interacts.
    pub fn range(&self) -> f64 {
        self.table.iter().map(|f| f.range()).fold(0.0, f64::max)
    }

    /// Smallest positive hard-core radius, if any pair has one.
    pub fn min_positive_hard_core(&self) -> Option<f64> {
        self.table.iter().map(|f| f.r0()).filter(|r| *r > 0.0).min_by(|a, b| a.partial_cmp(b).unwrap())
    }

    pub fn check_spin(&self, y: &Particle) -> Result<()> {
        if y.spin.index() >= self.spins {
            return Err(Error::Configuration(format!("spin {} outside a space of size {}", y.spin.0, self.spins)));
        }
        Ok(())
    }
}

pub fn eval_pair_potential(pot: &PottsPotential, y1: &Particle, y2: &Particle) -> ExtReal {
    if y1.x == y2.x {
        return ExtReal::PosInf;
    }
    let d = distance(y1, y2, pot.norm());
    pot.entry(y1.spin.index(), y2.spin.index()).eval(d)
}

pub fn pair_region(pot: &PottsPotential, y1: &Particle, y2: &Particle) -> PairRegion {
    let d = distance(y1, y2, pot.norm());
    let r = pot.hard_core_radius(y1.spin.index(), y2.spin.index());
    let eps = pot.eps();
    if d <= r {
        PairRegion::HardCore
    } else if d <= r + eps {
        PairRegion::KPrimeMinusK
    } else if d <= r + 2.0 * eps {
        PairRegion::KDoublePrimeMinusKPrime
    } else {
        PairRegion::Outside
    }
}
