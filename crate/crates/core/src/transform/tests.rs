use super::*;
use crate::potentials::{
    build_decomposition, cutoff_fk, DecompositionParams, PottsPotential, WellBehavedFn,
};
use crate::particles::{distance, Norm};
use crate::rng_stream;
use rand::Rng;

fn wr_dec() -> DecomposedPotential {
    let p = PottsPotential::widom_rowlinson(1.0, Norm::Euclidean, 0.05).unwrap();
    build_decomposition(&p, DecompositionParams { eps: Some(0.05), ..Default::default() }).unwrap()
}

fn step_dec() -> DecomposedPotential {
    let f = WellBehavedFn::step(0.5, 1.5, 0.5).unwrap();
    let p = PottsPotential::uniform(Norm::Euclidean, 2, f, 0.25).unwrap();
    build_decomposition(
        &p,
        DecompositionParams { eps: Some(0.25), mollify_width: Some(0.05), activity: 0.01, ruelle: 1.0 },
    )
    .unwrap()
}

fn params(dec: &DecomposedPotential, tau: f64, r: u32, n: u32) -> TaperParams {
    TaperParams::new(tau, r, n, 1, 0.25, dec).unwrap()
}

fn config(ps: Vec<Particle>) -> Configuration {
    Configuration::new(Window::new(100.0).unwrap(), ps, Vec::new()).unwrap()
}

fn q_oracle(s: f64) -> f64 {
    if s <= 1.0 || s * s.ln() <= 1.0 {
        1.0
    } else {
        1.0 / (s * s.ln())
    }
}

fn big_q_oracle(k: f64) -> f64 {
    // midpoint rule on a fine grid
    let m = 200_000;
    let h = k / m as f64;
    (0..m).map(|i| q_oracle((i as f64 + 0.5) * h)).sum::<f64>() * h
}

/// Random particles in `Λ_w` plus bonds between pairs closer than `reach`.
fn random_instance(rng: &mut crate::Stream, w: f64, count: usize, reach: f64) -> (Vec<Particle>, BondSet) {
    let ps: Vec<Particle> = (0..count)
        .map(|_| Particle::new(rng.gen_range(-w..w), rng.gen_range(-w..w), rng.gen_range(0..2)))
        .collect();
    let mut b = BondSet::new();
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            if distance(&ps[i], &ps[j], &Norm::Euclidean) < reach && rng.gen_bool(0.5) {
                b.insert(i, j).unwrap();
            }
        }
    }
    (ps, b)
}

#[test]
fn parameters_are_validated() {
    let d = wr_dec();
    assert!(TaperParams::new(0.6, 2, 5, 1, 0.25, &d).is_err());
    assert!(TaperParams::new(0.5, 5, 5, 1, 0.25, &d).is_err());
    assert!(TaperParams::new(0.5, 2, 5, 3, 0.25, &d).is_err());
    assert!(TaperParams::new(0.5, 2, 5, 1, 0.5, &d).is_err());
    let p = TaperParams::parse("0.5, 2, 5, 1, 0.25", &d).unwrap();
    assert_eq!((p.r_inner, p.n_outer, p.n_prime), (2, 5, 1));
    assert!(TaperParams::parse("0.5,2,5", &d).is_err());
}

#[test]
fn empty_configuration_gives_empty_result() {
    let d = wr_dec();
    let r = forward_transform(&config(vec![]), &BondSet::new(), &params(&d, 0.5, 2, 5), &d).unwrap();
    assert!(r.steps.is_empty());
    assert_eq!(r.last_step(), -1);
    assert_eq!(r.density, 1.0);
    let inv = inverse_transform(&[], &BondSet::new(), &params(&d, 0.5, 2, 5), &d).unwrap();
    assert!(inv.particles.is_empty());
}

#[test]
fn origin_particle_moves_by_tau() {
    let d = wr_dec();
    let p = params(&d, 0.4, 2, 5);
    let r = forward_transform(&config(vec![Particle::new(0.0, 0.0, 0)]), &BondSet::new(), &p, &d).unwrap();
    assert_eq!(r.particles[0].x, [0.4, 0.0]);
    assert_eq!(r.derivative_log[0].factor, 1.0);
    assert_eq!(r.density, 1.0);
    let b = backward_transform(&config(vec![Particle::new(0.0, 0.0, 0)]), &BondSet::new(), &p, &d).unwrap();
    assert_eq!(b.particles[0].x, [-0.4, 0.0]);
}

#[test]
fn outer_particle_stays() {
    let d = wr_dec();
    let p = params(&d, 0.4, 2, 5);
    let c = config(vec![Particle::new(7.0, -1.0, 1)]);
    let r = forward_transform(&c, &BondSet::new(), &p, &d).unwrap();
    assert_eq!(r.particles[0], Particle::new(7.0, -1.0, 1));
    assert_eq!(r.steps[0].tau, 0.0);
    assert_eq!(r.density, 1.0);
    let b = backward_transform(&c, &BondSet::new(), &p, &d).unwrap();
    assert_eq!(b.particles[0], Particle::new(7.0, -1.0, 1));
}

#[test]
fn ramp_factor_matches_differentiated_taper() {
    let d = wr_dec();
    let (tau, r_in, n) = (0.5, 2u32, 12u32);
    let p = params(&d, tau, r_in, n);
    for r in [2.5, 3.7, 6.0, 11.0] {
        let res = forward_transform(&config(vec![Particle::new(r, 0.3, 0)]), &BondSet::new(), &p, &d).unwrap();
        let oracle = (1.0 - tau * q_oracle(r - r_in as f64) / big_q_oracle((n - r_in) as f64)).abs();
        assert!((res.density - oracle).abs() < 1e-6, "r = {r}: {} vs {oracle}", res.density);
        let rec = &res.derivative_log[0];
        assert!((rec.finite_difference - rec.derivative).abs() < 1e-4 * rec.derivative.abs());
    }
}

#[test]
fn taper_matches_oracle_values() {
    let d = wr_dec();
    let p = params(&d, 0.5, 2, 12);
    assert_eq!(p.tau_rn(1.0), 0.5);
    assert_eq!(p.tau_rn(2.0), 0.5);
    assert_eq!(p.tau_rn(12.0), 0.0);
    let s = 7.0;
    let oracle = 0.5 * (1.0 - big_q_oracle(s - 2.0) / big_q_oracle(10.0));
    assert!((p.tau_rn(s) - oracle).abs() < 1e-7);
}

#[test]
fn m_aux_branches() {
    let d = wr_dec();
    let p = params(&d, 0.5, 3, 8);
    let yp = Particle::new(0.0, 0.0, 0);
    // deep inside: h = 0
    assert_eq!(distortion_height(&p, &yp, 0.5), 0.0);
    let near = Particle::new(0.02, 0.0, 0);
    assert_eq!(m_aux(&yp, 0.5, &near, &p, &d).to_f64(), 0.5);
    let far = Particle::new(1.5, 0.0, 1);
    assert!(m_aux(&yp, 0.5, &far, &p, &d).is_infinite());
    // unlike spins inside the hard core: f_K = 0
    let core = Particle::new(0.5, 0.0, 1);
    assert_eq!(cutoff_fk(&d, &yp, &core), 0.0);
    assert_eq!(m_aux(&yp, 0.2, &core, &p, &d).to_f64(), 0.2);
    // ramp source with h·c_f = 0.6
    let ramp = Particle::new(5.0, 0.0, 0);
    let t = p.tau_rn(5.0 - p.c_k) - 0.6 / p.c_f;
    assert!((distortion_height(&p, &ramp, t) * p.c_f - 0.6).abs() < 1e-12);
    assert_eq!(m_aux(&ramp, t, &far, &p, &d).to_f64(), t);
    assert_eq!(m_aux(&ramp, t, &Particle::new(-7.0, 2.0, 1), &p, &d).to_f64(), t);
}

#[test]
fn backward_after_forward_is_not_the_identity() {
    let d = wr_dec();
    let p = params(&d, 0.5, 2, 6);
    let c = config(vec![Particle::new(0.0, 0.0, 0), Particle::new(3.0, 0.5, 1), Particle::new(4.5, -1.0, 0)]);
    let f = forward_transform(&c, &BondSet::new(), &p, &d).unwrap();
    let fc = Configuration::new(Window::new(100.0).unwrap(), f.particles.clone(), vec![]).unwrap();
    let b = backward_transform(&fc, &BondSet::new(), &p, &d).unwrap();
    let err = c.particles().zip(&b.particles).map(|(a, b)| (a.x[0] - b.x[0]).abs()).fold(0.0, f64::max);
    assert!(err > 1e-3, "{err}");
}

fn check_invariants(ps: &[Particle], bonds: &BondSet, p: &TaperParams, d: &DecomposedPotential) {
    let r = transform_particles(ps, ps.len(), bonds, p, d).unwrap();
    // partition
    let mut seen = vec![false; ps.len()];
    for s in &r.steps {
        for &i in &s.c {
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert!(s.p.iter().all(|i| s.c.contains(i)));
    }
    assert!(seen.iter().all(|&s| s));
    // mono
    for w in r.steps.windows(2) {
        assert!(w[0].tau <= w[1].tau);
    }
    let taper = p.taper();
    for (i, y) in ps.iter().enumerate() {
        assert!(r.t_map[i] >= 0.0 && r.t_map[i] <= taper.eval(y.radius()) + 1e-15);
        assert_eq!(r.particles[i].x[0], y.x[0] + p.direction.sign() * r.t_map[i]);
    }
    // vercon and greps
    let pot = d.base();
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            let rc = pot.hard_core_radius(ps[i].spin.index(), ps[j].spin.index());
            if distance(&ps[i], &ps[j], pot.norm()) <= rc {
                assert_eq!(r.t_map[i], r.t_map[j]);
            } else {
                assert!(distance(&r.particles[i], &r.particles[j], pot.norm()) > rc);
            }
        }
    }
    for rec in &r.derivative_log {
        assert!(rec.factor >= 0.5 - 1e-12 && rec.factor <= 1.5 + 1e-12);
    }
}

#[test]
fn construction_properties_on_random_instances() {
    let d = wr_dec();
    let mut rng = rng_stream(11, "transform-props");
    for k in 0..60 {
        let (ps, b) = random_instance(&mut rng, 6.0, 5 + k % 40, 1.2);
        let p = params(&d, 0.5, 2, 5).with_direction(if k % 2 == 0 { Direction::Forward } else { Direction::Backward });
        check_invariants(&ps, &b, &p, &d);
    }
}

#[test]
fn construction_properties_with_smooth_part() {
    let d = step_dec();
    let mut rng = rng_stream(12, "transform-props-step");
    for k in 0..40 {
        let (ps, b) = random_instance(&mut rng, 5.0, 5 + k, 1.0);
        check_invariants(&ps, &b, &params(&d, 0.3, 2, 6), &d);
    }
}

fn max_error(a: &[Particle], b: &[Particle]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p.x[0] - q.x[0]).abs().max((p.x[1] - q.x[1]).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn inverse_round_trips_both_ways() {
    let d = wr_dec();
    let mut rng = rng_stream(13, "transform-inverse");
    for k in 0..80 {
        let (ps, b) = random_instance(&mut rng, 6.0, 1 + k % 50, 1.2);
        let dir = if k % 3 == 0 { Direction::Backward } else { Direction::Forward };
        let p = params(&d, 0.5, 2, 5).with_direction(dir);
        let f = transform_particles(&ps, ps.len(), &b, &p, &d).unwrap();
        let back = inverse_of(&f, &p, &d).unwrap();
        assert!(max_error(&ps, &back.particles) < 1e-9, "instance {k}");
        assert!((back.log_density - f.log_density).abs() < 1e-9);

        let inv = inverse_transform(&ps, &b, &p, &d).unwrap();
        let again = transform_particles(&inv.particles, ps.len(), &b, &p, &d).unwrap();
        assert!(max_error(&ps, &again.particles) < 1e-9, "instance {k}");
    }
}

#[test]
fn distance_maps_are_half_lipschitz() {
    let d = step_dec();
    let mut rng = rng_stream(14, "transform-hld");
    for k in 0..20 {
        let (ps, b) = random_instance(&mut rng, 5.0, 10 + k, 1.0);
        let p = params(&d, 0.5, 2, 5);
        let maps = distance_maps(&ps, &b, &p, &d).unwrap();
        for m in &maps {
            for _ in 0..20 {
                let y = Particle::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0), rng.gen_range(0..2));
                for h in [1e-3, 1e-2, 0.1] {
                    let q = (m.value(&y.shifted(h)) - m.value(&y)).abs() / h;
                    assert!(q <= 0.5 + 1e-9, "{q}");
                }
            }
        }
    }
}

#[test]
fn maps_reproduce_recorded_step_values() {
    let d = wr_dec();
    let mut rng = rng_stream(15, "transform-lektk");
    let (ps, b) = random_instance(&mut rng, 6.0, 40, 1.2);
    let p = params(&d, 0.5, 2, 5);
    let r = transform_particles(&ps, ps.len(), &b, &p, &d).unwrap();
    let maps = distance_maps(&ps, &b, &p, &d).unwrap();
    assert_eq!(maps.len(), r.steps.len());
    for (m, s) in maps.iter().zip(&r.steps) {
        for &i in &s.p {
            assert!((m.value(&ps[i]) - s.tau).abs() <= ARGMIN_TOLERANCE);
        }
    }
}

#[test]
fn result_serialises() {
    let d = wr_dec();
    let p = params(&d, 0.5, 2, 5);
    let c = config(vec![Particle::new(0.0, 0.0, 0), Particle::new(3.0, 0.0, 1)]);
    let r = forward_transform(&c, &BondSet::new(), &p, &d).unwrap();
    let json = r.to_json().unwrap();
    let back: TransformFile = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r.to_file());
    assert_eq!(back.schema_version, TRANSFORM_SCHEMA_VERSION);
}

#[test]
fn good_report_empty_and_flat() {
    let d = wr_dec();
    let p = params(&d, 0.5, 4, 10);
    let e = good_config_report(&config(vec![]), &BondSet::new(), &p, &d).unwrap();
    assert_eq!(e.sigma, [0.0; 5]);
    assert_eq!(e.cluster_range, None);
    assert!(e.is_good);

    let lim = 4.0 - p.c_k;
    let ps = vec![Particle::new(0.0, 0.0, 0), Particle::new(lim, 0.0, 0), Particle::new(0.0, -lim, 1)];
    let r = good_config_report(&config(ps), &BondSet::new(), &p, &d).unwrap();
    assert_eq!(r.sigma[0], 0.0);
    assert_eq!(r.sigma[2], 0.0);
    assert_eq!(r.sigma[3], 0.0);
    assert_eq!(r.sigma[4], 0.0);
}

#[test]
fn sigma_one_matches_hand_evaluation() {
    let d = wr_dec();
    let (tau, r_in, n) = (0.5, 4u32, 10u32);
    let p = params(&d, tau, r_in, n);
    let ps = vec![Particle::new(3.8, 0.0, 0), Particle::new(4.3, 0.0, 0)];
    let b = BondSet::from_edges([(0, 1)]).unwrap();
    let rep = good_config_report(&config(ps.clone()), &b, &p, &d).unwrap();

    let taper = |s: f64| {
        let x = ((s - r_in as f64).max(0.0)).min((n - r_in) as f64);
        tau * (1.0 - big_q_oracle(x) / big_q_oracle((n - r_in) as f64))
    };
    let ck = p.c_k;
    let tq = |a: f64, b: f64| if a <= b { (taper(a - ck) - taper(b)).powi(2) } else { 0.0 };
    let (a, b2) = (3.8, 4.3);
    let oracle = 4.0 * p.c_f * p.c_f * (tq(a, a) + tq(a, b2) + tq(b2, a) + tq(b2, b2));
    assert!(rep.sigma[0] > 0.0);
    assert!((rep.sigma[0] - oracle).abs() < 1e-6 * oracle, "{} vs {oracle}", rep.sigma[0]);
    assert_eq!(rep.cluster_range, None);
}

#[test]
fn sigma_two_counts_the_ramp() {
    let d = wr_dec();
    let p = params(&d, 0.5, 4, 10);
    let ps = vec![Particle::new(6.0, 0.0, 0), Particle::new(20.0, 0.0, 0)];
    let rep = good_config_report(&config(ps), &BondSet::new(), &p, &d).unwrap();
    let oracle = 2.0 * 0.25 * (q_oracle(2.0) / big_q_oracle(6.0)).powi(2);
    assert!((rep.sigma[1] - oracle).abs() < 1e-7);
}

#[test]
fn cluster_range_decides_goodness() {
    let d = wr_dec();
    let p = TaperParams::new(0.01, 3, 40, 1, 0.25, &d).unwrap();
    let chain: Vec<Particle> = (0..5).map(|i| Particle::new(0.5 + 0.9 * i as f64, 0.0, 0)).collect();
    let edges = (0..4).map(|i| (i, i + 1));
    let rep = good_config_report(&config(chain), &BondSet::from_edges(edges).unwrap(), &p, &d).unwrap();
    assert!((rep.cluster_range.unwrap() - 4.1).abs() < 1e-12);
    assert!(!rep.is_good);
}

#[test]
fn key_estimates_on_a_good_configuration() {
    let d = step_dec();
    let p = TaperParams::new(0.05, 3, 40, 1, 0.25, &d).unwrap();
    let ps = vec![Particle::new(0.0, 0.0, 0), Particle::new(1.2, 0.3, 1), Particle::new(-0.4, 1.1, 0)];
    let c = config(ps);
    let rep = good_config_report(&c, &BondSet::new(), &p, &d).unwrap();
    assert!(rep.is_good, "{rep:?}");
    let k = key_estimates(&c, &BondSet::new(), &p, &d).unwrap();
    assert!(k.density_holds() && k.hamiltonian_holds(), "{k:?}");
}

#[test]
fn contact_pair_on_the_ramp_moves_together() {
    let d = wr_dec();
    let p = params(&d, 0.5, 2, 10);
    let ps = vec![Particle::new(4.0, 0.0, 0), Particle::new(5.0, 0.0, 1), Particle::new(0.0, 7.0, 1)];
    let r = transform_particles(&ps, 3, &BondSet::new(), &p, &d).unwrap();
    assert_eq!(r.t_map[0], r.t_map[1]);
    assert!(r.t_map[0] > 0.0 && r.t_map[0] < 0.5);
    check_invariants(&ps, &BondSet::new(), &p, &d);
}
