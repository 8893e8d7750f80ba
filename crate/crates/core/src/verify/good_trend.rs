//! Empirical frequency of non-good `(Y, B)` along growing `(R, n)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bonds::sample_bonds;
use crate::error::{Error, Result};
use crate::particles::Window;
use crate::potentials::ModelSpec;
use crate::rng::{rng_stream, substream};
use crate::sampler::{run_chain, GibbsParams};
use crate::transform::{good_config_report, TaperParams};

use super::report::{Check, SuiteReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodTrendConfig {
    pub tau: f64,
    pub delta: f64,
    pub n_prime: u32,
    /// `(R, n)` in increasing order; each chain runs on `Λ_n`.
    pub points: Vec<(u32, u32)>,
    pub samples: usize,
    pub thinning: usize,
    pub burn_in: usize,
    pub activity: Option<f64>,
}

impl Default for GoodTrendConfig {
    fn default() -> Self {
        GoodTrendConfig {
            tau: 0.5,
            delta: 0.25,
            n_prime: 1,
            points: vec![(4, 16), (6, 32), (8, 64)],
            samples: 500,
            thinning: 2,
            burn_in: 100,
            activity: None,
        }
    }
}

/// Non-good fraction and mean `ΣΣᵢ` at one `(R, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub r_inner: u32,
    pub n_outer: u32,
    pub bad_fraction: f64,
    pub mean_sigma: f64,
    pub mean_particles: f64,
}

pub fn good_fraction_trend(model: &ModelSpec, cfg: &GoodTrendConfig, seed: u64) -> Result<Vec<TrendPoint>> {
    if cfg.points.is_empty() || cfg.samples == 0 {
        return Err(Error::Parameter("need at least one (R, n) point and one sample".into()));
    }
    let dec = model.build()?;
    cfg.points
        .iter()
        .enumerate()
        .map(|(k, &(r, n))| {
            let params = TaperParams::new(cfg.tau, r, n, cfg.n_prime, cfg.delta, &dec)?;
            let window = Window::new(n as f64)?;
            let mut gp = GibbsParams::new(model.potential()?, cfg.activity.unwrap_or(model.activity), window);
            gp.thinning = cfg.thinning.max(1);
            gp.sweeps = cfg.samples * gp.thinning;
            gp.burn_in = cfg.burn_in;
            let samples = run_chain(&gp, &mut substream(seed, "good-trend/chain", k as u64))?;
            let rows = samples
                .par_iter()
                .enumerate()
                .map(|(i, y)| {
                    let mut rng = rng_stream(seed ^ ((k as u64) << 32), &format!("good-trend/bonds/{i}"));
                    let b = sample_bonds(y, &dec, &window, &mut rng);
                    let g = good_config_report(y, &b, &params, &dec)?;
                    Ok((g.is_good, g.sigma_total(), y.len()))
                })
                .collect::<Result<Vec<_>>>()?;
            let m = rows.len().max(1) as f64;
            Ok(TrendPoint {
                r_inner: r,
                n_outer: n,
                bad_fraction: rows.iter().filter(|r| !r.0).count() as f64 / m,
                mean_sigma: rows.iter().map(|r| r.1).sum::<f64>() / m,
                mean_particles: rows.iter().map(|r| r.2 as f64).sum::<f64>() / m,
            })
        })
        .collect()
}

/// Non-increasing non-good fraction, below `δ` at the last point.
pub fn check_good_trend(model: &ModelSpec, cfg: &GoodTrendConfig, seed: u64) -> Result<SuiteReport> {
    let pts = good_fraction_trend(model, cfg, seed)?;
    let detail = pts
        .iter()
        .map(|p| format!("(R={}, n={}): bad {:.3}, mean ΣΣ {:.3e}", p.r_inner, p.n_outer, p.bad_fraction, p.mean_sigma))
        .collect::<Vec<_>>()
        .join("; ");
    let mut report = SuiteReport::new("good-trend", seed);
    let rises = pts.windows(2).filter(|w| w[1].bad_fraction > w[0].bad_fraction).count() as u64;
    let first = pts.windows(2).position(|w| w[1].bad_fraction > w[0].bad_fraction).map(|i| i as u64 + 1);
    report.push(
        Check::new("non_increasing", seed)
            .counted(pts.len().saturating_sub(1) as u64, rises, first)
            .tolerance("bad fraction non-increasing along (R, n)")
            .measured(pts.windows(2).map(|w| w[1].bad_fraction - w[0].bad_fraction).fold(f64::NEG_INFINITY, f64::max))
            .detail(detail),
    );
    let last = pts.last().map_or(1.0, |p| p.bad_fraction);
    report.push(
        Check::new("below_delta", seed)
            .measured(last)
            .tolerance(format!("bad fraction < δ = {} at the last point", cfg.delta))
            .passed(last < cfg.delta),
    );
    Ok(report)
}
