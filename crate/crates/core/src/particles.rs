//! Particles, windows, configurations and norms.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index into a finite spin space `{0, …, |S|−1}` carrying the uniform
/// reference measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Spin(pub u16);

impl Spin {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub x: [f64; 2],
    pub spin: Spin,
}

impl Particle {
    pub fn new(x0: f64, x1: f64, spin: u16) -> Self {
        Particle { x: [x0, x1], spin: Spin(spin) }
    }

    /// Maximum norm of the position, the `|y|` used by the taper.
    pub fn radius(&self) -> f64 {
        self.x[0].abs().max(self.x[1].abs())
    }

    /// The same particle shifted by `t` along the first axis.
    pub fn shifted(&self, t: f64) -> Particle {
        Particle { x: [self.x[0] + t, self.x[1]], spin: self.spin }
    }

    fn is_finite(&self) -> bool {
        self.x[0].is_finite() && self.x[1].is_finite()
    }
}

/// The centred half-open square `Λ_r = [−r, r)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    r: f64,
}

impl Window {
    pub fn new(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Parameter(format!("window half-width must be positive, got {r}")));
        }
        Ok(Window { r })
    }

    pub fn half_width(&self) -> f64 {
        self.r
    }

    pub fn area(&self) -> f64 {
        4.0 * self.r * self.r
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        -self.r <= x[0] && x[0] < self.r && -self.r <= x[1] && x[1] < self.r
    }
}

/// Norm on the plane used for pair distances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Norm {
    Max,
    Euclidean,
    /// `sqrt(a·v₀² + b·v₁²)` with `a, b > 0`.
    Weighted { a: f64, b: f64 },
}

impl Norm {
    pub fn validate(&self) -> Result<()> {
        if let Norm::Weighted { a, b } = *self {
            if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(Error::Parameter("weighted norm needs positive finite weights".into()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, v: [f64; 2]) -> f64 {
        match *self {
            Norm::Max => v[0].abs().max(v[1].abs()),
            Norm::Euclidean => v[0].hypot(v[1]),
            Norm::Weighted { a, b } => (a * v[0] * v[0] + b * v[1] * v[1]).sqrt(),
        }
    }

    /// `∂|v|/∂v₀`, the derivative along the first axis. Zero at the origin
    /// and, for the maximum norm, on the diagonals where it is not
    /// differentiable.
    pub fn d_first(&self, v: [f64; 2]) -> f64 {
        match *self {
            Norm::Max => {
                if v[0].abs() > v[1].abs() {
                    v[0].signum()
                } else {
                    0.0
                }
            }
            Norm::Euclidean => {
                let n = v[0].hypot(v[1]);
                if n == 0.0 {
                    0.0
                } else {
                    v[0] / n
                }
            }
            Norm::Weighted { a, b } => {
                let n = (a * v[0] * v[0] + b * v[1] * v[1]).sqrt();
                if n == 0.0 {
                    0.0
                } else {
                    a * v[0] / n
                }
            }
        }
    }

    /// `∂²|v|/∂v₀²` where it exists.
    pub fn d2_first(&self, v: [f64; 2]) -> f64 {
        match *self {
            Norm::Max => 0.0,
            Norm::Euclidean => {
                let n = v[0].hypot(v[1]);
                if n == 0.0 {
                    0.0
                } else {
                    v[1] * v[1] / (n * n * n)
                }
            }
            Norm::Weighted { a, b } => {
                let n = (a * v[0] * v[0] + b * v[1] * v[1]).sqrt();
                if n == 0.0 {
                    0.0
                } else {
                    a * b * v[1] * v[1] / (n * n * n)
                }
            }
        }
    }

    /// `sup |∂|v|/∂v₀|` over `v ≠ 0`.
    pub fn first_axis_lipschitz(&self) -> f64 {
        match *self {
            Norm::Max | Norm::Euclidean => 1.0,
            Norm::Weighted { a, .. } => a.sqrt(),
        }
    }

    /// `sup |v|_max / |v|` over `v ≠ 0`.
    pub fn max_norm_ratio(&self) -> f64 {
        match *self {
            Norm::Max | Norm::Euclidean => 1.0,
            Norm::Weighted { a, b } => (1.0 / a.sqrt()).max(1.0 / b.sqrt()),
        }
    }
}

/// Distance between the positions of two particles; spins are ignored.
pub fn distance(y1: &Particle, y2: &Particle, norm: &Norm) -> f64 {
    norm.eval([y1.x[0] - y2.x[0], y1.x[1] - y2.x[1]])
}

/// A finite configuration: particles inside a window plus a fixed list of
/// boundary particles outside it.
///
/// Particle identity is the index into [`Configuration::particle`]'s
/// combined list: interior particles come first, boundary particles after.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    window: Window,
    interior: Vec<Particle>,
    boundary: Vec<Particle>,
}

impl Configuration {
    pub fn new(window: Window, interior: Vec<Particle>, boundary: Vec<Particle>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(interior.len() + boundary.len());
        for (i, p) in interior.iter().chain(boundary.iter()).enumerate() {
            if !p.is_finite() {
                return Err(Error::Configuration(format!("particle {i} has a non-finite position")));
            }
            let inside = window.contains(p.x);
            if i < interior.len() && !inside {
                return Err(Error::Configuration(format!(
                    "interior particle {i} at ({}, {}) lies outside the window",
                    p.x[0], p.x[1]
                )));
            }
            if i >= interior.len() && inside {
                return Err(Error::Configuration(format!(
                    "boundary particle {} at ({}, {}) lies inside the window",
                    i - interior.len(),
                    p.x[0],
                    p.x[1]
                )));
            }
            if !seen.insert(position_key(p.x)) {
                return Err(Error::Configuration(format!(
                    "duplicate position ({}, {})",
                    p.x[0], p.x[1]
                )));
            }
        }
        Ok(Configuration { window, interior, boundary })
    }

    pub fn empty(window: Window) -> Self {
        Configuration { window, interior: Vec::new(), boundary: Vec::new() }
    }

    /// Splits an arbitrary particle list by window membership.
    pub fn from_particles(window: Window, particles: Vec<Particle>) -> Result<Self> {
        let (interior, boundary) = particles.into_iter().partition(|p| window.contains(p.x));
        Configuration::new(window, interior, boundary)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn interior(&self) -> &[Particle] {
        &self.interior
    }

    pub fn boundary(&self) -> &[Particle] {
        &self.boundary
    }

    pub fn len(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Particle by combined index (interior first).
    pub fn particle(&self, i: usize) -> &Particle {
        if i < self.interior.len() {
            &self.interior[i]
        } else {
            &self.boundary[i - self.interior.len()]
        }
    }

    pub fn is_interior(&self, i: usize) -> bool {
        i < self.interior.len()
    }

    /// All particles in combined index order.
    pub fn particles(&self) -> impl Iterator<Item = &Particle> + '_ {
        self.interior.iter().chain(self.boundary.iter())
    }

    pub fn to_vec(&self) -> Vec<Particle> {
        self.particles().copied().collect()
    }

    /// Number of particles (interior or boundary) in `region`.
    pub fn count_in(&self, region: &Window) -> usize {
        self.particles().filter(|p| region.contains(p.x)).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ConfigurationFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ConfigurationFile = serde_json::from_str(s)?;
        file.try_into()
    }
}

fn position_key(x: [f64; 2]) -> (u64, u64) {
    // −0.0 and 0.0 are the same point
    ((x[0] + 0.0).to_bits(), (x[1] + 0.0).to_bits())
}

/// Keeps the particles of the interior that lie in `region` as the new
/// interior; everything else becomes boundary.
pub fn restrict(config: &Configuration, region: Window) -> Result<Configuration> {
    if region.half_width() > config.window.half_width() {
        return Err(Error::RegionExceedsWindow);
    }
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for p in &config.interior {
        if region.contains(p.x) {
            interior.push(*p);
        } else {
            boundary.push(*p);
        }
    }
    boundary.extend_from_slice(&config.boundary);
    Ok(Configuration { window: region, interior, boundary })
}

/// On-disk form: `{window_r, interior: [[x0, x1, spin], …], boundary: […]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationFile {
    pub window_r: f64,
    pub interior: Vec<(f64, f64, u16)>,
    pub boundary: Vec<(f64, f64, u16)>,
}

impl From<&Configuration> for ConfigurationFile {
    fn from(c: &Configuration) -> Self {
        let enc = |ps: &[Particle]| ps.iter().map(|p| (p.x[0], p.x[1], p.spin.0)).collect();
        ConfigurationFile {
            window_r: c.window.half_width(),
            interior: enc(&c.interior),
            boundary: enc(&c.boundary),
        }
    }
}

impl TryFrom<ConfigurationFile> for Configuration {
    type Error = Error;
    fn try_from(f: ConfigurationFile) -> Result<Self> {
        let dec = |v: Vec<(f64, f64, u16)>| v.into_iter().map(|(a, b, s)| Particle::new(a, b, s)).collect();
        Configuration::new(Window::new(f.window_r)?, dec(f.interior), dec(f.boundary))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(r: f64) -> Window {
        Window::new(r).unwrap()
    }

    #[test]
    fn distance_examples() {
        let a = Particle::new(0.0, 0.0, 0);
        let b = Particle::new(3.0, 4.0, 1);
        assert_eq!(distance(&a, &b, &Norm::Euclidean), 5.0);
        assert_eq!(distance(&a, &b, &Norm::Max), 4.0);
        assert_eq!(distance(&b, &b, &Norm::Euclidean), 0.0);
    }

    #[test]
    fn window_is_half_open() {
        for r in [0.5, 1.0, 7.25] {
            let win = w(r);
            assert!(win.contains([-r, -r]));
            assert!(!win.contains([r, 0.0]));
            assert!(!win.contains([0.0, r]));
        }
    }

    #[test]
    fn restrict_examples() {
        let empty = Configuration::empty(w(2.0));
        assert!(restrict(&empty, w(1.0)).unwrap().is_empty());

        let c = Configuration::new(w(2.0), vec![Particle::new(0.5, 0.5, 0), Particle::new(1.0, 0.0, 0)], vec![])
            .unwrap();
        let r = restrict(&c, w(1.0)).unwrap();
        assert_eq!(r.interior(), &[Particle::new(0.5, 0.5, 0)]);
        assert_eq!(r.boundary(), &[Particle::new(1.0, 0.0, 0)]);

        assert!(matches!(restrict(&c, w(3.0)), Err(Error::RegionExceedsWindow)));
    }

    #[test]
    fn rejects_duplicates_and_misplaced_particles() {
        let p = Particle::new(0.1, 0.2, 0);
        assert!(Configuration::new(w(1.0), vec![p, Particle::new(0.1, 0.2, 1)], vec![]).is_err());
        assert!(Configuration::new(w(1.0), vec![Particle::new(1.5, 0.0, 0)], vec![]).is_err());
        assert!(Configuration::new(w(1.0), vec![], vec![p]).is_err());
        assert!(Configuration::new(w(1.0), vec![Particle::new(f64::NAN, 0.0, 0)], vec![]).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let c = Configuration::new(
            w(3.0),
            vec![Particle::new(0.1 + 0.2, -1.0 / 3.0, 1), Particle::new(2.999999999999999, -3.0, 0)],
            vec![Particle::new(1e-300 + 5.0, 0.7, 2)],
        )
        .unwrap();
        let back = Configuration::from_json(&c.to_json().unwrap()).unwrap();
        for (a, b) in c.particles().zip(back.particles()) {
            assert_eq!(a.x[0].to_bits(), b.x[0].to_bits());
            assert_eq!(a.x[1].to_bits(), b.x[1].to_bits());
            assert_eq!(a.spin, b.spin);
        }
    }

    fn arb_norm() -> impl Strategy<Value = Norm> {
        prop_oneof![
            Just(Norm::Max),
            Just(Norm::Euclidean),
            (0.2f64..5.0, 0.2f64..5.0).prop_map(|(a, b)| Norm::Weighted { a, b }),
        ]
    }

    proptest! {
        #[test]
        fn norm_axioms(norm in arb_norm(), u in prop::array::uniform2(-10.0f64..10.0),
                       v in prop::array::uniform2(-10.0f64..10.0), s in -4.0f64..4.0) {
            let n = |x: [f64; 2]| norm.eval(x);
            prop_assert!((n([s * u[0], s * u[1]]) - s.abs() * n(u)).abs() <= 1e-12 * (1.0 + n(u)));
            prop_assert!((n([-u[0], -u[1]]) - n(u)).abs() <= 1e-12);
            prop_assert!(n([u[0] + v[0], u[1] + v[1]]) <= n(u) + n(v) + 1e-12);
            prop_assert!(n(u).abs() * norm.max_norm_ratio() + 1e-12 >= u[0].abs().max(u[1].abs()));
        }

        #[test]
        fn distance_symmetric_and_zero_exactly_at_equal_positions(
            a in prop::array::uniform2(-5.0f64..5.0), b in prop::array::uniform2(-5.0f64..5.0), norm in arb_norm()) {
            let p = Particle { x: a, spin: Spin(0) };
            let q = Particle { x: b, spin: Spin(1) };
            prop_assert_eq!(distance(&p, &q, &norm), distance(&q, &p, &norm));
            prop_assert_eq!(distance(&p, &q, &norm) == 0.0, a == b);
        }

        #[test]
        fn restrict_idempotent(pts in prop::collection::vec(prop::array::uniform2(-2.0f64..2.0), 0..30),
                               r in 0.1f64..2.0) {
            let ps: Vec<Particle> = pts.iter().enumerate().map(|(i, x)| Particle { x: *x, spin: Spin((i % 2) as u16) }).collect();
            let mut uniq = HashSet::new();
            let ps: Vec<Particle> = ps.into_iter().filter(|p| uniq.insert(position_key(p.x))).collect();
            let c = Configuration::new(w(2.0), ps, vec![]).unwrap();
            let once = restrict(&c, w(r)).unwrap();
            let twice = restrict(&once, w(r)).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
