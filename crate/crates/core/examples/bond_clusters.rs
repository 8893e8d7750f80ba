//! Draws the Bernoulli bond process on a soft-step sample and reports the
//! clusters of the augmented bond set that touch the inner window.

use contgibbs::bonds::{augment_bplus, cluster_range, clusters, sample_bonds};
use contgibbs::potentials::ModelSpec;
use contgibbs::sampler::{run_chain, GibbsParams};
use contgibbs::{rng_stream, Result, Window};

pub fn run() -> Result<()> {
    let model = ModelSpec::load(concat!(env!("CARGO_MANIFEST_DIR"), "/models/soft_step.json"))?;
    let dec = model.build()?;
    let window = Window::new(6.0)?;
    let mut gp = GibbsParams::new(model.potential()?, 0.3, window);
    gp.sweeps = 50;
    gp.thinning = 50;
    let y = run_chain(&gp, &mut rng_stream(2, "example/bonds/chain"))?.pop().expect("one sample");
    let b = sample_bonds(&y, &dec, &window, &mut rng_stream(2, "example/bonds"));
    let bplus = augment_bplus(&y, &b, &dec);
    let parts = clusters(y.len(), &bplus);
    let largest = parts.clusters().iter().map(Vec::len).max().unwrap_or(0);
    println!("{} particles, {} bonds, {} in B+", y.len(), b.len(), bplus.len());
    println!("{} clusters, largest has {largest} particles", parts.clusters().len());
    match cluster_range(&y, &bplus, &Window::new(1.0)?) {
        Some(r) => println!("clusters meeting Λ_1 reach |y| = {r:.3}"),
        None => println!("no cluster meets Λ_1"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
