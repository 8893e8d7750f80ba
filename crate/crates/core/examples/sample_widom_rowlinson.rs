//! Samples the two-spin Widom–Rowlinson model on Λ_4 and checks that no
//! unlike pair comes within the exclusion radius.

use contgibbs::potentials::ModelSpec;
use contgibbs::sampler::{run_chain_detailed, GibbsParams};
use contgibbs::stats::{pair_distances, spin_fractions, PairFilter};
use contgibbs::{rng_stream, Result, Window};

pub fn run() -> Result<()> {
    let model = ModelSpec::widom_rowlinson(1.0, 0.2);
    let window = Window::new(4.0)?;
    let mut gp = GibbsParams::new(model.potential()?, model.activity, window);
    gp.sweeps = 400;
    gp.thinning = 4;
    let run = run_chain_detailed(&gp, &mut rng_stream(1, "example/wr"))?;
    let mean = run.samples.iter().map(|c| c.len()).sum::<usize>() as f64 / run.samples.len() as f64;
    let closest = run
        .samples
        .iter()
        .flat_map(|c| pair_distances(c, &window, PairFilter::Unlike, gp.potential.norm()))
        .fold(f64::INFINITY, f64::min);
    println!("{} samples, mean particle count {mean:.2}", run.samples.len());
    println!("spin fractions {:?}", spin_fractions(&run.samples, &window, 2));
    println!("closest unlike pair {closest:.4} (exclusion radius 1)");
    println!("acceptance birth/death/move {:?} of {:?}", run.diagnostics.accepted, run.diagnostics.proposed);
    assert!(closest > 1.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
