//! Estimates correlation functions at a few probes and compares them with
//! the Ruelle-type bound `ξ^{#probe}`.

use contgibbs::potentials::ModelSpec;
use contgibbs::sampler::{estimate_correlation, run_chain, GibbsParams};
use contgibbs::{rng_stream, Particle, Result, Window};

pub fn run() -> Result<()> {
    let model = ModelSpec::widom_rowlinson(1.0, 0.2);
    let pot = model.potential()?;
    let mut gp = GibbsParams::new(pot.clone(), model.activity, Window::new(4.0)?);
    gp.sweeps = 600;
    gp.thinning = 3;
    let samples = run_chain(&gp, &mut rng_stream(7, "example/correlation"))?;
    let probes = vec![
        vec![Particle::new(0.0, 0.0, 0)],
        vec![Particle::new(0.0, 0.0, 0), Particle::new(0.5, 0.0, 0)],
        vec![Particle::new(0.0, 0.0, 0), Particle::new(1.5, 0.0, 1)],
        vec![Particle::new(0.0, 0.0, 0), Particle::new(0.5, 0.0, 1)],
    ];
    for (p, e) in probes.iter().zip(estimate_correlation(&samples, &probes, &pot, model.ruelle)?) {
        println!("{} particle(s): {:.4} ± {:.4}  violation {}", p.len(), e.estimate, e.standard_error, e.violation);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
