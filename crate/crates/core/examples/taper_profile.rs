//! Tabulates the taper `τ_{R,n}` together with `q`, its closed-form
//! integral `Q` and the resulting slope factors.

use contgibbs::transform::{big_q_taper, q_taper, s_star, Taper};
use contgibbs::Result;

pub fn run() -> Result<()> {
    println!("s* = {:.6}", s_star());
    for k in [0.5, 1.0, s_star(), 2.0, 10.0, 100.0] {
        println!("Q({k:.4}) = {:.6}   q = {:.6}", big_q_taper(k), q_taper(k));
    }
    let t = Taper::new(0.5, 2.0, 12.0);
    println!("{:>6} {:>10} {:>10} {:>8}", "|y|", "tau_Rn", "deriv", "1+deriv");
    for i in 0..=14 {
        let s = i as f64;
        println!("{s:>6.1} {:>10.6} {:>10.6} {:>8.4}", t.eval(s), t.deriv(s), 1.0 + t.deriv(s));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
