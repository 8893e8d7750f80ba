//! Evaluates the five error sums of the good-configuration test and, on a
//! good draw, both key estimates.

use contgibbs::bonds::sample_bonds;
use contgibbs::potentials::ModelSpec;
use contgibbs::sampler::{run_chain, GibbsParams};
use contgibbs::transform::{good_config_report, key_estimates, TaperParams};
use contgibbs::{rng_stream, Result, Window};

pub fn run() -> Result<()> {
    let model = ModelSpec { eps: Some(0.25), ..ModelSpec::widom_rowlinson(1.0, 0.2) };
    let dec = model.build()?;
    let params = TaperParams::new(0.05, 3, 40, 1, 0.25, &dec)?;
    let window = Window::new(6.0)?;
    let mut gp = GibbsParams::new(model.potential()?, model.activity, window);
    gp.sweeps = 200;
    gp.thinning = 10;
    let samples = run_chain(&gp, &mut rng_stream(4, "example/good"))?;
    let mut good = 0;
    for (i, y) in samples.iter().enumerate() {
        let b = sample_bonds(y, &dec, &window, &mut rng_stream(4 + i as u64, "example/good/bonds"));
        let g = good_config_report(y, &b, &params, &dec)?;
        if g.is_good {
            good += 1;
            let k = key_estimates(y, &b, &params, &dec)?;
            println!(
                "draw {i:>2}: sigma {:.3e}  log phi + log phi_bar = {:+.2e}  H slack = {:+.2e}",
                g.sigma_total(),
                k.log_phi + k.log_phi_bar,
                2.0 * k.h_original + k.delta - k.h_forward - k.h_backward
            );
            assert!(k.density_holds() && k.hamiltonian_holds());
        }
    }
    println!("{good} of {} draws are good", samples.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
