//! Invariance criterion on finite state spaces: `μ` is `τ`-invariant iff
//! `μ(τA) + μ(τ⁻¹A) ≥ 2μ(A)` for every event `A`.

use crate::error::{Error, Result};

use super::report::{Check, SuiteReport};

const MAX_STATES: usize = 20;
const TOL: f64 = 1e-12;

/// Outcome of both enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LekritOutcome {
    pub criterion_holds: bool,
    pub invariant: bool,
    /// First event (as a bit mask) violating the criterion.
    pub witness: Option<u32>,
}

fn validate(measure: &[f64], perm: &[usize]) -> Result<()> {
    let n = measure.len();
    if n > MAX_STATES {
        return Err(Error::StateSpaceTooLarge(n));
    }
    if perm.len() != n {
        return Err(Error::Parameter("permutation and measure differ in length".into()));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Parameter("not a permutation".into()));
        }
    }
    if measure.iter().any(|m| !(*m >= 0.0)) || (measure.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter("not a probability vector".into()));
    }
    Ok(())
}

fn image(mask: u32, map: &[usize]) -> u32 {
    (0..map.len()).filter(|&i| mask >> i & 1 == 1).fold(0, |m, i| m | 1 << map[i])
}

fn mass(mask: u32, measure: &[f64]) -> f64 {
    (0..measure.len()).filter(|&i| mask >> i & 1 == 1).map(|i| measure[i]).sum()
}

/// Enumerates all `2^|S|` events and the pointwise invariance.
pub fn lekrit_enumerate(measure: &[f64], perm: &[usize]) -> Result<LekritOutcome> {
    validate(measure, perm)?;
    let n = measure.len();
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let mut witness = None;
    for mask in 0..(1u32 << n) {
        let lhs = mass(image(mask, perm), measure) + mass(image(mask, &inv), measure);
        if lhs < 2.0 * mass(mask, measure) - TOL {
            witness = Some(mask);
            break;
        }
    }
    // μ∘τ⁻¹ = μ  ⇔  μ({τ⁻¹x}) = μ({x})
    let invariant = (0..n).all(|x| (measure[inv[x]] - measure[x]).abs() <= TOL);
    Ok(LekritOutcome { criterion_holds: witness.is_none(), invariant, witness })
}

pub fn check_lekrit_toy(measure: &[f64], perm: &[usize], seed: u64) -> Result<SuiteReport> {
    let o = lekrit_enumerate(measure, perm)?;
    let mut r = SuiteReport::new("lekrit", seed);
    let mut c = Check::new("criterion_iff_invariant", seed)
            .passed(o.criterion_holds == o.invariant)
            .measured((1u64 << measure.len()) as f64)
            .tolerance(format!("{TOL:e} on event masses"))
            .detail(format!(
                "criterion {}, invariant {}{}",
                o.criterion_holds,
                o.invariant,
                o.witness.map_or(String::new(), |w| format!(", violating event mask {w:#b}"))
            ));
    c.instances = 1u64 << measure.len();
    r.push(c);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_stream;
    use rand::seq::SliceRandom;
    use rand::Rng;

    #[test]
    fn uniform_measure_is_invariant() {
        let mu = vec![0.25; 4];
        let o = lekrit_enumerate(&mu, &[2, 0, 3, 1]).unwrap();
        assert!(o.criterion_holds && o.invariant);
    }

    #[test]
    fn three_cycle_breaks_both() {
        let o = lekrit_enumerate(&[0.5, 0.3, 0.2], &[1, 2, 0]).unwrap();
        assert!(!o.criterion_holds);
        assert!(!o.invariant);
        // witness checked by hand: A = {0}: μ(τA) + μ(τ⁻¹A) = 0.3 + 0.2 < 1.0
        assert_eq!(o.witness, Some(0b001));
    }

    #[test]
    fn identity_is_invariant() {
        let o = lekrit_enumerate(&[0.5, 0.3, 0.2], &[0, 1, 2]).unwrap();
        assert!(o.criterion_holds && o.invariant);
    }

    #[test]
    fn both_directions_agree_on_random_instances() {
        let mut rng = rng_stream(5, "lekrit");
        for k in 0..100 {
            let n = rng.gen_range(1..=8);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let mut mu: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            if k % 3 == 0 {
                // invariant on cycles: constant on each orbit
                let mut orbit_val = vec![f64::NAN; n];
                for s in 0..n {
                    if orbit_val[s].is_nan() {
                        let v = rng.gen::<f64>();
                        let mut x = s;
                        loop {
                            orbit_val[x] = v;
                            x = perm[x];
                            if x == s {
                                break;
                            }
                        }
                    }
                }
                mu = orbit_val;
            }
            let total: f64 = mu.iter().sum();
            mu.iter_mut().for_each(|m| *m /= total);
            let o = lekrit_enumerate(&mu, &perm).unwrap();
            assert_eq!(o.criterion_holds, o.invariant, "instance {k}");
        }
    }

    #[test]
    fn refuses_large_state_spaces() {
        let mu = vec![1.0 / 21.0; 21];
        let perm: Vec<usize> = (0..21).collect();
        assert!(matches!(lekrit_enumerate(&mu, &perm), Err(Error::StateSpaceTooLarge(21))));
    }

    #[test]
    fn report_reflects_outcome() {
        let r = check_lekrit_toy(&[0.5, 0.3, 0.2], &[1, 2, 0], 9).unwrap();
        assert!(r.passed());
        assert!(r.to_text().contains("violating event"));
    }
}
