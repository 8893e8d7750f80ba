//! Compares Widom–Rowlinson samples seen through `Λ_1` and through
//! `Λ_1 + ½e`, then repeats with a deliberately biased birth proposal.

use contgibbs::potentials::ModelSpec;
use contgibbs::verify::{check_invariance_statistical, InvarianceConfig, NEGATIVE_CONTROL_TILT};
use contgibbs::Result;

pub fn run() -> Result<()> {
    let model = ModelSpec::widom_rowlinson(1.0, 0.2);
    let cfg = InvarianceConfig { samples: 600, ..Default::default() };
    print!("{}", check_invariance_statistical(&model, &cfg, 6)?.to_text());
    let biased = InvarianceConfig { birth_tilt: NEGATIVE_CONTROL_TILT, ..cfg };
    print!("{}", check_invariance_statistical(&model, &biased, 6)?.to_text());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
