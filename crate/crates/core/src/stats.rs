//! Sample statistics and the classical tests used by the verification
//! suites.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

use crate::error::{Error, Result};
use crate::particles::{distance, Configuration, Norm, Window};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Number of particles (interior or boundary) in `region`, per sample.
pub fn counts_in(samples: &[Configuration], region: &Window) -> Vec<usize> {
    samples.iter().map(|s| s.count_in(region)).collect()
}

/// `h[k]` = number of entries equal to `k`.
pub fn count_histogram(counts: &[usize]) -> Vec<u64> {
    let mut h = vec![0u64; counts.iter().copied().max().map_or(0, |m| m + 1)];
    for &c in counts {
        h[c] += 1;
    }
    h
}

/// Per-spin particle counts in `region`, summed over samples.
pub fn spin_counts(samples: &[Configuration], region: &Window, spins: usize) -> Vec<u64> {
    let mut out = vec![0u64; spins];
    for s in samples {
        for p in s.particles().filter(|p| region.contains(p.x)) {
            out[p.spin.index()] += 1;
        }
    }
    out
}

pub fn spin_fractions(samples: &[Configuration], region: &Window, spins: usize) -> Vec<f64> {
    let c = spin_counts(samples, region, spins);
    let total: u64 = c.iter().sum();
    c.iter().map(|&k| if total == 0 { 0.0 } else { k as f64 / total as f64 }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairFilter {
    All,
    Like,
    Unlike,
}

/// Distances between all pairs of particles in `region`.
pub fn pair_distances(config: &Configuration, region: &Window, filter: PairFilter, norm: &Norm) -> Vec<f64> {
    let ps: Vec<_> = config.particles().filter(|p| region.contains(p.x)).collect();
    let mut out = Vec::new();
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            let like = ps[i].spin == ps[j].spin;
            let keep = match filter {
                PairFilter::All => true,
                PairFilter::Like => like,
                PairFilter::Unlike => !like,
            };
            if keep {
                out.push(distance(ps[i], ps[j], norm));
            }
        }
    }
    out
}

/// Mean pair distance in `region`, `None` with fewer than two particles.
pub fn mean_pair_distance(config: &Configuration, region: &Window, norm: &Norm) -> Option<f64> {
    let d = pair_distances(config, region, PairFilter::All, norm);
    if d.is_empty() {
        None
    } else {
        Some(d.iter().sum::<f64>() / d.len() as f64)
    }
}

/// Equal-width histogram on `[lo, hi)`; values outside are dropped.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    let w = (hi - lo) / bins as f64;
    for &v in values {
        if v >= lo && v < hi {
            h[(((v - lo) / w) as usize).min(bins - 1)] += 1;
        }
    }
    h
}

pub fn mean_and_standard_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn chi2_p(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).map(|d| d.sf(stat)).unwrap_or(f64::NAN)
}

/// Merges adjacent bins until every expected count is at least `min`.
fn pool(observed: &[f64], expected: &[f64], min: f64) -> (Vec<f64>, Vec<f64>) {
    let mut o = Vec::new();
    let mut e = Vec::new();
    let (mut ao, mut ae) = (0.0, 0.0);
    for (x, y) in observed.iter().zip(expected) {
        ao += x;
        ae += y;
        if ae >= min {
            o.push(ao);
            e.push(ae);
            ao = 0.0;
            ae = 0.0;
        }
    }
    if ae > 0.0 || ao > 0.0 {
        if let (Some(lo), Some(le)) = (o.last_mut(), e.last_mut()) {
            *lo += ao;
            *le += ae;
        } else {
            o.push(ao);
            e.push(ae);
        }
    }
    (o, e)
}

/// χ² goodness of fit of integer counts against `Poisson(mean)`.
pub fn poisson_chi2(counts: &[usize], mean: f64) -> Result<TestResult> {
    if counts.is_empty() {
        return Err(Error::EmptySamples);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::Parameter(e.to_string()))?;
    let n = counts.len() as f64;
    let hist = count_histogram(counts);
    let top = hist.len().max((mean + 10.0 * mean.sqrt() + 10.0) as usize);
    let mut observed: Vec<f64> = (0..top).map(|k| hist.get(k).copied().unwrap_or(0) as f64).collect();
    let mut expected: Vec<f64> = (0..top).map(|k| n * dist.pmf(k as u64)).collect();
    // upper tail into the last bin
    let tail = n - expected.iter().sum::<f64>();
    *expected.last_mut().expect("nonempty") += tail.max(0.0);
    let extra: f64 = hist.iter().skip(top).map(|&c| c as f64).sum();
    *observed.last_mut().expect("nonempty") += extra;
    let (o, e) = pool(&observed, &expected, 5.0);
    let stat = o.iter().zip(&e).map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = o.len().saturating_sub(1);
    Ok(TestResult { statistic: stat, dof, p_value: chi2_p(stat, dof) })
}

/// χ² test that two count vectors come from the same categorical law.
pub fn chi2_homogeneity(a: &[u64], b: &[u64]) -> Result<TestResult> {
    let k = a.len().max(b.len());
    let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0) as f64;
    let (na, nb): (f64, f64) = ((0..k).map(|i| get(a, i)).sum(), (0..k).map(|i| get(b, i)).sum());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::EmptySamples);
    }
    let total = na + nb;
    // pool on the combined column so both rows share bins
    let combined: Vec<f64> = (0..k).map(|i| get(a, i) + get(b, i)).collect();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for i in 0..k {
        ca += get(a, i);
        cb += get(b, i);
        if (ca + cb) * na.min(nb) / total >= 5.0 {
            bins.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        if let Some(last) = bins.last_mut() {
            last.0 += ca;
            last.1 += cb;
        } else {
            bins.push((ca, cb));
        }
    }
    debug_assert!((bins.iter().map(|b| b.0 + b.1).sum::<f64>() - combined.iter().sum::<f64>()).abs() < 1e-9);
    let mut stat = 0.0;
    for &(x, y) in &bins {
        let col = x + y;
        let (ea, eb) = (col * na / total, col * nb / total);
        stat += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    let dof = bins.len().saturating_sub(1);
    Ok(TestResult { statistic: stat, dof, p_value: chi2_p(stat, dof) })
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=200 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = (n * m / (n + m)).sqrt();
    let p = kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
    Ok(TestResult { statistic: d, dof: 0, p_value: p })
}

/// Two-sided p-value of a standard normal score.
pub fn normal_two_sided_p(z: f64) -> f64 {
    use statrs::distribution::Normal;
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    2.0 * n.sf(z.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::particles::Particle;
    use crate::rng_stream;
    use rand::Rng;
    use rand_distr::{Distribution, Poisson as PoissonDist};

    #[test]
    fn histogram_and_counts() {
        assert_eq!(count_histogram(&[0, 2, 2, 3]), vec![1, 0, 2, 1]);
        assert!(count_histogram(&[]).is_empty());
        assert_eq!(histogram(&[0.1, 0.5, 0.99, 1.0, -0.1], 0.0, 1.0, 2), vec![1, 2]);
    }

    #[test]
    fn poisson_gof_accepts_poisson_and_rejects_shifted() {
        let mut rng = rng_stream(1, "stats");
        let d = PoissonDist::new(16.0).unwrap();
        let good: Vec<usize> = (0..5000).map(|_| d.sample(&mut rng) as usize).collect();
        assert!(poisson_chi2(&good, 16.0).unwrap().p_value > 1e-3);
        let bad: Vec<usize> = good.iter().map(|c| c + 2).collect();
        assert!(poisson_chi2(&bad, 16.0).unwrap().p_value < 1e-6);
    }

    #[test]
    fn chi2_statistic_matches_hand_computation() {
        // two equal rows: statistic 0
        let t = chi2_homogeneity(&[10, 20, 30], &[10, 20, 30]).unwrap();
        assert!(t.statistic.abs() < 1e-12);
        assert_eq!(t.dof, 2);
        // 2×2: [[30, 10], [10, 30]] → χ² = 20
        let t = chi2_homogeneity(&[30, 10], &[10, 30]).unwrap();
        assert!((t.statistic - 20.0).abs() < 1e-12);
        assert!((t.p_value - 7.744e-6).abs() < 1e-8);
    }

    #[test]
    fn ks_detects_shift_only_when_present() {
        let mut rng = rng_stream(2, "ks");
        let a: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>()).collect();
        let c: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>() + 0.1).collect();
        assert!(ks_two_sample(&a, &b).unwrap().p_value > 1e-3);
        assert!(ks_two_sample(&a, &c).unwrap().p_value < 1e-6);
        let t = ks_two_sample(&[0.0, 1.0], &[2.0, 3.0]).unwrap();
        assert_eq!(t.statistic, 1.0);
    }

    #[test]
    fn kolmogorov_tail_reference_values() {
        // Q_KS(1.0) = 0.26999967, Q_KS(1.36) ≈ 0.0494
        assert!((kolmogorov_sf(1.0) - 0.269_999_67).abs() < 1e-7);
        assert!((kolmogorov_sf(1.36) - 0.0494).abs() < 5e-4);
    }

    #[test]
    fn pair_distances_respect_filter() {
        let w = Window::new(2.0).unwrap();
        let c = Configuration::new(
            w,
            vec![Particle::new(0.0, 0.0, 0), Particle::new(1.0, 0.0, 1), Particle::new(0.0, 1.0, 0)],
            vec![],
        )
        .unwrap();
        let n = Norm::Euclidean;
        assert_eq!(pair_distances(&c, &w, PairFilter::All, &n).len(), 3);
        assert_eq!(pair_distances(&c, &w, PairFilter::Like, &n), vec![1.0]);
        assert_eq!(pair_distances(&c, &w, PairFilter::Unlike, &n).len(), 2);
        assert_eq!(spin_counts(&[c.clone()], &w, 2), vec![2, 1]);
        let m = mean_pair_distance(&c, &w, &n).unwrap();
        assert!((m - (2.0 + 2f64.sqrt()) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn normal_p_values() {
        assert!((normal_two_sided_p(1.959_964) - 0.05).abs() < 1e-6);
        assert_eq!(normal_two_sided_p(0.0), 1.0);
    }
}
