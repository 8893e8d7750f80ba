//! Applies the deformed translation to a Widom–Rowlinson sample, inverts
//! it, and prints the step partition and the Jacobian density.

use contgibbs::bonds::sample_bonds;
use contgibbs::potentials::ModelSpec;
use contgibbs::sampler::{run_chain, GibbsParams};
use contgibbs::transform::{backward_transform, forward_transform, inverse_of, TaperParams};
use contgibbs::{rng_stream, Result, Window};

pub fn run() -> Result<()> {
    let model = ModelSpec::widom_rowlinson(1.0, 0.2);
    let dec = model.build()?;
    let window = Window::new(5.0)?;
    let mut gp = GibbsParams::new(model.potential()?, model.activity, window);
    gp.sweeps = 100;
    gp.thinning = 100;
    let y = run_chain(&gp, &mut rng_stream(3, "example/transform"))?.pop().expect("one sample");
    let b = sample_bonds(&y, &dec, &window, &mut rng_stream(3, "example/transform/bonds"));
    let params = TaperParams::parse("0.5,2,5,1,0.25", &dec)?;

    let fwd = forward_transform(&y, &b, &params, &dec)?;
    println!("{} particles in {} steps, tau_k = {:?}", y.len(), fwd.steps.len(), fwd.tau_k());
    println!("phi = {:.6} (log {:.6}), ties {}", fwd.density, fwd.log_density, fwd.ties);
    let back = inverse_of(&fwd, &params, &dec)?;
    let err = back.particles.iter().zip(y.particles()).map(|(a, b)| (a.x[0] - b.x[0]).abs()).fold(0.0, f64::max);
    println!("round trip error {err:.2e}");
    let bwd = backward_transform(&y, &b, &params, &dec)?;
    println!("phi_bar = {:.6}, log phi + log phi_bar = {:.6}", bwd.density, fwd.log_density + bwd.log_density);
    assert!(err < 1e-9);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
