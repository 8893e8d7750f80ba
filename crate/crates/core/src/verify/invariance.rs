//! Statistical translation invariance: samples seen through a region `A`
//! are compared with independent samples seen through `A + s·e₀`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::particles::{Configuration, Particle, Window};
use crate::potentials::ModelSpec;
use crate::rng::rng_stream;
use crate::sampler::{run_chain, GibbsParams};
use crate::stats::{chi2_homogeneity, count_histogram, ks_two_sample, mean_pair_distance, spin_counts, TestResult};

use super::report::{Check, SuiteReport};

const TESTS: usize = 3;

/// Birth tilt used by the negative control.
pub const NEGATIVE_CONTROL_TILT: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceConfig {
    pub window: f64,
    /// Overrides the model's activity when set.
    pub activity: Option<f64>,
    /// Half-width of the observation region `A`.
    pub region: f64,
    pub shift: f64,
    /// Samples per chain after thinning.
    pub samples: usize,
    pub thinning: usize,
    pub burn_in: usize,
    /// Family-wise significance level.
    pub alpha: f64,
    /// Birth proposal tilt; nonzero only for the negative control.
    pub birth_tilt: f64,
}

impl Default for InvarianceConfig {
    fn default() -> Self {
        InvarianceConfig {
            window: 8.0,
            activity: None,
            region: 1.0,
            shift: 0.5,
            samples: 2000,
            thinning: 5,
            burn_in: 200,
            alpha: 0.01,
            birth_tilt: 0.0,
        }
    }
}

/// The particles of `c` in `A + s·e₀`, moved back by `−s·e₀`.
fn view(c: &Configuration, region: Window, shift: f64) -> Result<Configuration> {
    let ps: Vec<Particle> = c.particles().map(|p| p.shifted(-shift)).filter(|p| region.contains(p.x)).collect();
    Configuration::new(region, ps, Vec::new())
}

pub fn check_invariance_statistical(model: &ModelSpec, cfg: &InvarianceConfig, seed: u64) -> Result<SuiteReport> {
    let pot = model.potential()?;
    let reach = cfg.region + cfg.shift.abs() + pot.range() * pot.norm().max_norm_ratio();
    if reach > cfg.window {
        return Err(Error::BoundaryEffect(format!(
            "region {} shifted by {} plus interaction range reaches {reach}, beyond the window {}",
            cfg.region, cfg.shift, cfg.window
        )));
    }
    if cfg.samples < 2 {
        return Err(Error::Parameter("need at least two samples per chain".into()));
    }
    let window = Window::new(cfg.window)?;
    let region = Window::new(cfg.region)?;
    let mut gp = GibbsParams::new(pot.clone(), cfg.activity.unwrap_or(model.activity), window);
    gp.burn_in = cfg.burn_in;
    gp.thinning = cfg.thinning;
    gp.sweeps = cfg.samples * cfg.thinning;
    gp.birth_tilt = cfg.birth_tilt;
    gp.validate()?;

    let chains = [("invariance/chain/base", 0.0), ("invariance/chain/shifted", cfg.shift)]
        .into_par_iter()
        .map(|(name, s)| -> Result<Vec<Configuration>> {
            let mut rng = rng_stream(seed, name);
            run_chain(&gp, &mut rng)?.iter().map(|c| view(c, region, s)).collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let (a, b) = (&chains[0], &chains[1]);

    let counts = |v: &[Configuration]| count_histogram(&v.iter().map(|c| c.len()).collect::<Vec<_>>());
    let count_test = chi2_homogeneity(&counts(a), &counts(b))?;
    let mpd = |v: &[Configuration]| v.iter().filter_map(|c| mean_pair_distance(c, &region, pot.norm())).collect::<Vec<_>>();
    let (da, db) = (mpd(a), mpd(b));
    let pair_test = if da.is_empty() || db.is_empty() { None } else { Some(ks_two_sample(&da, &db)?) };
    let spin_test = if pot.spins() > 1 {
        Some(chi2_homogeneity(&spin_counts(a, &region, pot.spins()), &spin_counts(b, &region, pot.spins()))?)
    } else {
        None
    };

    let suite = if cfg.birth_tilt != 0.0 { "invariance-negative-control" } else { "invariance" };
    let mut report = SuiteReport::new(suite, seed);
    let mut push = |name: &str, t: Option<TestResult>, what: String| {
        let c = Check::new(name, seed).tolerance(format!("Bonferroni p > {}", cfg.alpha));
        report.push(match t {
            None => c.counted(0, 0, None).detail(format!("{what}: nothing to compare")),
            Some(t) => {
                let p = (TESTS as f64 * t.p_value).min(1.0);
                let mut c = c
                    .measured(p)
                    .detail(format!("{what}: statistic {:.4}, dof {}, raw p {:.4}", t.statistic, t.dof, t.p_value))
                    .passed(p > cfg.alpha);
                c.instances = cfg.samples as u64;
                c
            }
        });
    };
    push("count_histogram", Some(count_test), "chi-square homogeneity of N_A".into());
    push("mean_pair_distance", pair_test, format!("two-sample KS on {} vs {} values", da.len(), db.len()));
    push("spin_counts", spin_test, "chi-square homogeneity of spin counts".into());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wr() -> ModelSpec {
        ModelSpec::widom_rowlinson(1.0, 0.2)
    }

    #[test]
    fn view_moves_the_shifted_region_onto_a() {
        let w = Window::new(4.0).unwrap();
        let c = Configuration::new(w, vec![Particle::new(1.2, 0.0, 0), Particle::new(0.2, 0.0, 0)], vec![]).unwrap();
        let v = view(&c, Window::new(1.0).unwrap(), 0.5).unwrap();
        assert_eq!(v.len(), 2);
        assert!((v.interior()[0].x[0] - 0.7).abs() < 1e-15);
        let v0 = view(&c, Window::new(1.0).unwrap(), 3.0).unwrap();
        assert_eq!(v0.len(), 0);
    }

    #[test]
    fn rejects_regions_touching_the_boundary() {
        let cfg = InvarianceConfig { window: 2.0, ..Default::default() };
        assert!(matches!(check_invariance_statistical(&wr(), &cfg, 1), Err(Error::BoundaryEffect(_))));
    }

    #[test]
    fn widom_rowlinson_is_invariant_and_tilt_is_detected() {
        let cfg = InvarianceConfig { samples: 1000, ..Default::default() };
        let r = check_invariance_statistical(&wr(), &cfg, 3).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let neg = check_invariance_statistical(&wr(), &InvarianceConfig { birth_tilt: NEGATIVE_CONTROL_TILT, ..cfg }, 3).unwrap();
        assert!(!neg.passed(), "{}", neg.to_text());
    }
}
