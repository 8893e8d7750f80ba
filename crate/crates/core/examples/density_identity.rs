//! Monte Carlo check that the Jacobian density balances the deformed
//! translation, with the φ ≡ 1 negative control alongside.

use contgibbs::potentials::ModelSpec;
use contgibbs::verify::{check_density_identity, DensityConfig};
use contgibbs::Result;

pub fn run() -> Result<()> {
    let model = ModelSpec::widom_rowlinson(1.0, 0.2);
    let cfg = DensityConfig { samples: 20_000, ..Default::default() };
    print!("{}", check_density_identity(&model, &cfg, 5)?.to_text());
    let neg = DensityConfig { negative_control: true, ..cfg };
    print!("{}", check_density_identity(&model, &neg, 5)?.to_text());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
