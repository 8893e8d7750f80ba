//! Translation-distance maps and the recursive construction.

use serde::{Deserialize, Serialize};

use crate::bonds::{clusters, BondSet};
use crate::cells::CellList;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::particles::Particle;
use crate::potentials::{cutoff_fk, e_deriv_fk, DecomposedPotential};

use super::taper::{taper_at, Taper};
use super::TaperParams;

/// Particles whose `t_k` is within this of the minimum join `P_k`.
pub const ARGMIN_TOLERANCE: f64 = 1e-12;
/// Branch values closer than this count as a tie for the derivative.
pub const BRANCH_TOLERANCE: f64 = 1e-13;
const ROOT_TOLERANCE: f64 = 1e-13;
const FD_STEP: f64 = 1e-6;

/// Which piece of the pointwise minimum is active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branch {
    Taper,
    Cap,
    Local { source: usize },
}

/// `t_k(y)` and its derivative along the first axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TValue {
    pub value: f64,
    pub deriv: f64,
    pub branch: Branch,
    pub tie: bool,
}

#[derive(Clone, Debug)]
struct Source {
    y: Particle,
    t: f64,
    h: f64,
    particle: usize,
}

/// `h_{y′,t} = |τ_{R,n}(|y′| − c_K) − t|`.
pub fn distortion_height(params: &TaperParams, y: &Particle, t: f64) -> f64 {
    (params.taper().eval(y.radius() - params.c_k) - t).abs()
}

/// `m_{y′,t}(y)`.
pub fn m_aux(yp: &Particle, t: f64, y: &Particle, params: &TaperParams, dec: &DecomposedPotential) -> ExtReal {
    let h = distortion_height(params, yp, t);
    if h * params.c_f > 0.5 {
        return ExtReal::Finite(t);
    }
    let f = cutoff_fk(dec, yp, y);
    if f >= 1.0 {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(t + h * f)
    }
}

/// The running minimum `t_k = τ_{R,n}(|·|) ∧ min m_{y′,τ_i}` over fixed
/// particles `y′`. Sources with `h·c_f > ½` collapse to a global cap.
#[derive(Clone, Debug)]
pub struct DistanceMap<'a> {
    taper: Taper,
    c_k: f64,
    c_f: f64,
    dec: &'a DecomposedPotential,
    cap: Option<(f64, usize)>,
    sources: Vec<Source>,
    cells: CellList,
}

impl<'a> DistanceMap<'a> {
    pub fn new(params: &TaperParams, dec: &'a DecomposedPotential) -> Self {
        DistanceMap {
            taper: params.taper(),
            c_k: params.c_k,
            c_f: params.c_f,
            dec,
            cap: None,
            sources: Vec::new(),
            cells: CellList::new(params.c_k.max(1e-3)),
        }
    }

    pub fn cap(&self) -> Option<f64> {
        self.cap.map(|c| c.0)
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    /// Adds `m_{y′,t}` for the fixed particle `y′` with index `particle`.
    /// Returns true when the global cap dropped.
    pub fn add_source(&mut self, y: Particle, t: f64, particle: usize) -> bool {
        let h = (self.taper.eval(y.radius() - self.c_k) - t).abs();
        if h * self.c_f > 0.5 {
            if self.cap.map_or(true, |(c, _)| t < c) {
                self.cap = Some((t, particle));
                return true;
            }
            return false;
        }
        self.cells.insert(self.sources.len(), y.x);
        self.sources.push(Source { y, t, h, particle });
        false
    }

    pub fn eval(&self, y: &Particle) -> TValue {
        let (v, d) = taper_at(&self.taper, y.x);
        let mut best = TValue { value: v, deriv: d, branch: Branch::Taper, tie: false };
        if let Some((c, _)) = self.cap {
            consider(&mut best, c, 0.0, Branch::Cap);
        }
        for i in self.cells.neighbours(y.x) {
            let s = &self.sources[i];
            let f = cutoff_fk(self.dec, &s.y, y);
            if f >= 1.0 {
                continue;
            }
            let value = s.t + s.h * f;
            if value > best.value + BRANCH_TOLERANCE {
                continue;
            }
            let deriv = s.h * e_deriv_fk(self.dec, &s.y, y);
            consider(&mut best, value, deriv, Branch::Local { source: s.particle });
        }
        best
    }

    pub fn value(&self, y: &Particle) -> f64 {
        self.eval(y).value
    }

    /// Central difference of `t_k` along the first axis.
    pub fn finite_difference(&self, y: &Particle, step: f64) -> f64 {
        (self.value(&y.shifted(step)) - self.value(&y.shifted(-step))) / (2.0 * step)
    }

    /// Central difference plus whether the one-sided differences disagree,
    /// which signals a branch switch inside the stencil.
    pub fn finite_difference_checked(&self, y: &Particle, step: f64) -> (f64, bool) {
        let (l, c, r) = (self.value(&y.shifted(-step)), self.value(y), self.value(&y.shifted(step)));
        let (dl, dr) = ((c - l) / step, (r - c) / step);
        (0.5 * (dl + dr), (dl - dr).abs() > 1e-3 * dl.abs().max(dr.abs()) + 1e-6)
    }
}

fn consider(best: &mut TValue, value: f64, deriv: f64, branch: Branch) {
    if value < best.value - BRANCH_TOLERANCE {
        *best = TValue { value, deriv, branch, tie: false };
        return;
    }
    if value > best.value + BRANCH_TOLERANCE {
        return;
    }
    let v = value.min(best.value);
    if (deriv - best.deriv).abs() > BRANCH_TOLERANCE {
        best.tie = true;
        if deriv.abs() < best.deriv.abs() {
            best.deriv = deriv;
            best.branch = branch;
        }
    } else if value < best.value {
        best.branch = branch;
    }
    best.value = v;
}

/// One construction step: the argmin set, its cluster and the distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub p: Vec<usize>,
    pub c: Vec<usize>,
    pub tau: f64,
}

/// One factor `|1 + d·∂_e t_k(y)|` of the density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeRecord {
    pub step: usize,
    pub particle: usize,
    pub branch: Branch,
    pub derivative: f64,
    pub finite_difference: f64,
    /// The finite-difference stencil straddles a kink of `t_k`.
    pub kink: bool,
    pub factor: f64,
    pub tie: bool,
}

pub(crate) struct Construction<'a> {
    pub steps: Vec<Step>,
    pub t_map: Vec<f64>,
    pub positions: Vec<Particle>,
    pub log: Vec<DerivativeRecord>,
    pub maps: Vec<DistanceMap<'a>>,
}

pub(crate) fn check_input(particles: &[Particle], bonds: &BondSet) -> Result<()> {
    for (i, p) in particles.iter().enumerate() {
        if !(p.x[0].is_finite() && p.x[1].is_finite()) {
            return Err(Error::Configuration(format!("particle {i} has a non-finite position")));
        }
    }
    for (i, j) in bonds.iter() {
        if j >= particles.len() {
            return Err(Error::InvalidBond(i, j));
        }
    }
    Ok(())
}

fn record(step: usize, particle: usize, tv: &TValue, (fd, kink): (f64, bool), sign: f64) -> DerivativeRecord {
    DerivativeRecord {
        step,
        particle,
        branch: tv.branch,
        derivative: tv.deriv,
        finite_difference: fd,
        kink,
        factor: (1.0 + sign * tv.deriv).abs(),
        tie: tv.tie,
    }
}

fn argmin(values: &[TValue], remaining: &[bool]) -> Option<(f64, Vec<usize>)> {
    let min = values
        .iter()
        .zip(remaining)
        .filter(|(_, r)| **r)
        .map(|(v, _)| v.value)
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    let p = (0..values.len()).filter(|&i| remaining[i] && values[i].value <= min + ARGMIN_TOLERANCE).collect();
    Some((min, p))
}

fn cluster_union(part: &crate::bonds::ClusterPartition, p: &[usize]) -> Vec<usize> {
    let mut labels: Vec<usize> = p.iter().map(|&i| part.label(i)).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut c: Vec<usize> = labels.iter().flat_map(|&l| part.clusters()[l].iter().copied()).collect();
    c.sort_unstable();
    c
}

/// The forward recursion on original positions. `sign` is `+1` or `−1`.
pub(crate) fn construct<'a>(
    particles: &[Particle],
    bonds: &BondSet,
    params: &TaperParams,
    dec: &'a DecomposedPotential,
    sign: f64,
    keep_maps: bool,
) -> Result<Construction<'a>> {
    check_input(particles, bonds)?;
    let n = particles.len();
    let part = clusters(n, bonds);
    let grid = CellList::from_points(params.c_k.max(1e-3), particles.iter().map(|p| &p.x));
    let mut map = DistanceMap::new(params, dec);
    let mut values: Vec<TValue> = particles.iter().map(|p| map.eval(p)).collect();
    let mut remaining = vec![true; n];
    let mut t_map = vec![0.0; n];
    let mut steps = Vec::new();
    let mut log = Vec::new();
    let mut maps = Vec::new();
    while let Some((tau_k, p)) = argmin(&values, &remaining) {
        if keep_maps {
            maps.push(map.clone());
        }
        let k = steps.len();
        for &i in &p {
            let fd = map.finite_difference_checked(&particles[i], FD_STEP);
            log.push(record(k, i, &values[i], fd, sign));
        }
        let c = cluster_union(&part, &p);
        let mut cap_dropped = false;
        let mut touched = Vec::new();
        for &i in &c {
            remaining[i] = false;
            t_map[i] = tau_k;
            let before = map.source_count();
            cap_dropped |= map.add_source(particles[i], tau_k, i);
            if map.source_count() > before {
                touched.extend(grid.neighbours(particles[i].x));
            }
        }
        if cap_dropped {
            touched = (0..n).collect();
        }
        touched.sort_unstable();
        touched.dedup();
        for j in touched {
            if remaining[j] {
                values[j] = map.eval(&particles[j]);
            }
        }
        steps.push(Step { p, c, tau: tau_k });
    }
    let positions = particles.iter().zip(&t_map).map(|(p, t)| p.shifted(sign * t)).collect();
    Ok(Construction { steps, t_map, positions, log, maps })
}

/// Solves `x + d·t(x, y₁) = ỹ₀` for `x` along the first axis.
fn solve_preimage(map: &DistanceMap, target: &Particle, sign: f64, tau: f64) -> Result<(Particle, TValue)> {
    let at = |x0: f64| -> (Particle, TValue) {
        let p = Particle { x: [x0, target.x[1]], spin: target.spin };
        let tv = map.eval(&p);
        (p, tv)
    };
    let g = |x0: f64, tv: &TValue| x0 + sign * tv.value - target.x[0];
    let mut lo = target.x[0] - tau - 1.0;
    let mut hi = target.x[0] + tau + 1.0;
    let (_, tlo) = at(lo);
    let (_, thi) = at(hi);
    if g(lo, &tlo) > 0.0 || g(hi, &thi) < 0.0 {
        return Err(Error::Internal(format!(
            "inverse root finder failed to bracket at ({}, {})",
            target.x[0], target.x[1]
        )));
    }
    for _ in 0..200 {
        if hi - lo <= ROOT_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (_, tv) = at(mid);
        if g(mid, &tv) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    let (mut p, mut tv) = at(x);
    let mut gx = g(x, &tv);
    for _ in 0..3 {
        let slope = 1.0 + sign * tv.deriv;
        if slope <= 0.0 || gx == 0.0 {
            break;
        }
        let xn = x - gx / slope;
        if !(xn >= lo - ROOT_TOLERANCE && xn <= hi + ROOT_TOLERANCE) {
            break;
        }
        let (pn, tn) = at(xn);
        let gn = g(xn, &tn);
        if gn.abs() >= gx.abs() {
            break;
        }
        x = xn;
        p = pn;
        tv = tn;
        gx = gn;
    }
    Ok((p, tv))
}

/// The inverse recursion on transformed positions.
pub(crate) fn construct_inverse<'a>(
    transformed: &[Particle],
    bonds: &BondSet,
    params: &TaperParams,
    dec: &'a DecomposedPotential,
    sign: f64,
) -> Result<Construction<'a>> {
    check_input(transformed, bonds)?;
    let n = transformed.len();
    let part = clusters(n, bonds);
    let reach = params.c_k.max(1e-3) + params.tau + 1e-9;
    let grid = CellList::from_points(reach, transformed.iter().map(|p| &p.x));
    let mut map = DistanceMap::new(params, dec);
    let mut values = Vec::with_capacity(n);
    for y in transformed {
        values.push(solve_preimage(&map, y, sign, params.tau)?.1);
    }
    let mut remaining = vec![true; n];
    let mut t_map = vec![0.0; n];
    let mut originals = transformed.to_vec();
    let mut steps = Vec::new();
    let mut log = Vec::new();
    while let Some((tau_k, p)) = argmin(&values, &remaining) {
        let k = steps.len();
        for &i in &p {
            let x = transformed[i].shifted(-sign * values[i].value);
            let fd = map.finite_difference_checked(&x, FD_STEP);
            log.push(record(k, i, &values[i], fd, sign));
        }
        let c = cluster_union(&part, &p);
        let mut cap_dropped = false;
        let mut touched = Vec::new();
        for &i in &c {
            remaining[i] = false;
            t_map[i] = tau_k;
            originals[i] = transformed[i].shifted(-sign * tau_k);
            let before = map.source_count();
            cap_dropped |= map.add_source(originals[i], tau_k, i);
            if map.source_count() > before {
                touched.extend(grid.neighbours(originals[i].x));
            }
        }
        if cap_dropped {
            touched = (0..n).collect();
        }
        touched.sort_unstable();
        touched.dedup();
        for j in touched {
            if remaining[j] {
                values[j] = solve_preimage(&map, &transformed[j], sign, params.tau)?.1;
            }
        }
        steps.push(Step { p, c, tau: tau_k });
    }
    Ok(Construction { steps, t_map, positions: originals, log, maps: Vec::new() })
}
