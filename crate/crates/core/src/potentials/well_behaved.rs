use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// `c₀ + c₁ r + c₂ r² + c₃ r³`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cubic(pub [f64; 4]);

impl Cubic {
    pub const ZERO: Cubic = Cubic([0.0; 4]);

    pub fn constant(c: f64) -> Cubic {
        Cubic([c, 0.0, 0.0, 0.0])
    }

    pub fn linear(c0: f64, c1: f64) -> Cubic {
        Cubic([c0, c1, 0.0, 0.0])
    }

    pub fn eval(&self, r: f64) -> f64 {
        let c = &self.0;
        ((c[3] * r + c[2]) * r + c[1]) * r + c[0]
    }

    pub fn deriv(&self, r: f64) -> f64 {
        let c = &self.0;
        (3.0 * c[3] * r + 2.0 * c[2]) * r + c[1]
    }

    pub fn deriv2(&self, r: f64) -> f64 {
        6.0 * self.0[3] * r + 2.0 * self.0[2]
    }

    pub fn sub(&self, other: &Cubic) -> Cubic {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(other.0) {
            *a -= b;
        }
        Cubic(c)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Minimum over `[a, b]`, attained at an endpoint or a critical point.
    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        let mut m = self.eval(a).min(self.eval(b));
        let [_, c1, c2, c3] = self.0;
        // roots of 3c₃ r² + 2c₂ r + c₁
        let (qa, qb, qc) = (3.0 * c3, 2.0 * c2, c1);
        let mut crit = Vec::new();
        if qa.abs() > 1e-300 {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc >= 0.0 {
                let s = disc.sqrt();
                crit.push((-qb + s) / (2.0 * qa));
                crit.push((-qb - s) / (2.0 * qa));
            }
        } else if qb.abs() > 1e-300 {
            crit.push(-qc / qb);
        }
        for r in crit {
            if r > a && r < b {
                m = m.min(self.eval(r));
            }
        }
        m
    }
}

/// A radial interaction that is `+∞` below `r₀`, a cubic on every open
/// interval between consecutive breakpoints, a stored value at each
/// breakpoint and `0` beyond the last breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct WellBehavedFn {
    breakpoints: Vec<f64>,
    pieces: Vec<Cubic>,
    point_values: Vec<ExtReal>,
}

impl WellBehavedFn {
    /// `pieces[i]` lives on `(r_i, r_{i+1})`, so there is one piece fewer
    /// than breakpoints. A positive `r₀` is a closed hard core: its point
    /// value is forced to `+∞`.
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Cubic>, mut point_values: Vec<ExtReal>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Parameter("a well-behaved function needs at least r0".into()));
        }
        if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::Parameter(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                pieces.len()
            )));
        }
        if point_values.len() != breakpoints.len() {
            return Err(Error::Parameter("one point value per breakpoint is required".into()));
        }
        if !(breakpoints[0] >= 0.0) || breakpoints.iter().any(|r| !r.is_finite()) {
            return Err(Error::Parameter("breakpoints must be finite with r0 >= 0".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("breakpoints must be strictly increasing".into()));
        }
        if pieces.iter().any(|p| !p.is_finite()) {
            return Err(Error::Parameter("piece coefficients must be finite".into()));
        }
        if point_values[1..].iter().any(|v| v.is_infinite() || !v.to_f64().is_finite()) {
            return Err(Error::Parameter("point values beyond r0 must be finite".into()));
        }
        if breakpoints[0] > 0.0 || point_values[0].finite().map_or(false, |v| !v.is_finite()) {
            point_values[0] = ExtReal::PosInf;
        }
        Ok(WellBehavedFn { breakpoints, pieces, point_values })
    }

    /// `+∞` below `r₀` (closed at `r₀` when `r₀ > 0`), zero beyond.
    pub fn hard_core(r0: f64) -> Result<Self> {
        WellBehavedFn::new(vec![r0], vec![], vec![ExtReal::PosInf])
    }

    /// The identically-zero interaction (no hard core besides coincidence).
    pub fn zero() -> Self {
        WellBehavedFn { breakpoints: vec![0.0], pieces: vec![], point_values: vec![ExtReal::PosInf] }
    }

    /// `height` on `(r₀, r₁)` and zero after, with the left value kept at `r₁`.
    pub fn step(r0: f64, r1: f64, height: f64) -> Result<Self> {
        WellBehavedFn::new(
            vec![r0, r1],
            vec![Cubic::constant(height)],
            vec![ExtReal::PosInf, ExtReal::Finite(height)],
        )
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Cubic] {
        &self.pieces
    }

    pub fn point_values(&self) -> &[ExtReal] {
        &self.point_values
    }

    pub fn r0(&self) -> f64 {
        self.breakpoints[0]
    }

    /// Last breakpoint; the function vanishes beyond it.
    pub fn range(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn eval(&self, r: f64) -> ExtReal {
        let bp = &self.breakpoints;
        if r < bp[0] {
            return ExtReal::PosInf;
        }
        match bp.binary_search_by(|b| b.partial_cmp(&r).unwrap()) {
            Ok(i) => self.point_values[i],
            Err(i) => {
                // bp[i-1] < r < bp[i]
                if i >= bp.len() {
                    ExtReal::ZERO
                } else {
                    ExtReal::Finite(self.pieces[i - 1].eval(r))
                }
            }
        }
    }

    /// `lim_{r→r_i−}`, for `i ≥ 1`.
    pub fn left_limit(&self, i: usize) -> f64 {
        self.pieces[i - 1].eval(self.breakpoints[i])
    }

    /// `lim_{r→r_i+}`, zero at the last breakpoint.
    pub fn right_limit(&self, i: usize) -> f64 {
        if i + 1 < self.breakpoints.len() {
            self.pieces[i].eval(self.breakpoints[i])
        } else {
            0.0
        }
    }

    /// Cubic describing the function on the open interval containing `r`
    /// (`r > r₀`, not a breakpoint).
    fn piece_at(&self, r: f64) -> Cubic {
        let bp = &self.breakpoints;
        let i = bp.partition_point(|b| *b <= r);
        if i >= bp.len() {
            Cubic::ZERO
        } else {
            self.pieces[i - 1]
        }
    }

    /// Smallest value taken on `(r₀, ∞)`.
    pub fn min_value(&self) -> f64 {
        let mut m = 0.0f64;
        for (i, p) in self.pieces.iter().enumerate() {
            m = m.min(p.min_on(self.breakpoints[i], self.breakpoints[i + 1]));
        }
        for v in &self.point_values[1..] {
            m = m.min(v.to_f64());
        }
        m
    }
}

/// Piecewise cubic on `[knots[0], knots[m]]`, continued to the left by
/// `polys[0]` and by zero to the right of the last knot.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseCubic {
    pub knots: Vec<f64>,
    pub polys: Vec<Cubic>,
}

impl PiecewiseCubic {
    pub fn zero_from(r0: f64) -> Self {
        PiecewiseCubic { knots: vec![r0], polys: vec![] }
    }

    fn segment(&self, r: f64) -> Cubic {
        if self.polys.is_empty() {
            return Cubic::ZERO;
        }
        let i = self.knots.partition_point(|k| *k <= r);
        if i == 0 {
            self.polys[0]
        } else if i >= self.knots.len() {
            if r == *self.knots.last().unwrap() {
                *self.polys.last().unwrap()
            } else {
                Cubic::ZERO
            }
        } else {
            self.polys[i - 1]
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.segment(r).eval(r)
    }

    pub fn deriv(&self, r: f64) -> f64 {
        self.segment(r).deriv(r)
    }

    pub fn end(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Segments `(lo, hi, poly)` including the unbounded left extension and
    /// the zero tail.
    pub fn segments(&self) -> Vec<(f64, f64, Cubic)> {
        let mut out = Vec::with_capacity(self.polys.len() + 2);
        let first = self.polys.first().copied().unwrap_or(Cubic::ZERO);
        out.push((f64::NEG_INFINITY, self.knots[0], first));
        for (i, p) in self.polys.iter().enumerate() {
            out.push((self.knots[i], self.knots[i + 1], *p));
        }
        out.push((self.end(), f64::INFINITY, Cubic::ZERO));
        out
    }

    /// `(knot, jump of the first derivative)` at every interior knot and at
    /// the end knot.
    pub fn derivative_jumps(&self) -> Vec<(f64, f64)> {
        let segs = self.segments();
        segs.windows(2)
            .map(|w| {
                let k = w[0].1;
                (k, w[1].2.deriv(k) - w[0].2.deriv(k))
            })
            .filter(|(_, j)| *j != 0.0)
            .collect()
    }
}

/// The continuous envelope `φ̄ = φ ∨ ⋁ᵢ h_{rᵢ,mᵢ,ε}` of a well-behaved
/// function, stored as a piecewise cubic on `(r₀, ∞)`.
#[derive(Clone, Debug)]
pub struct ContinuousPart {
    pub base: WellBehavedFn,
    pub eps: f64,
    pub hats: Vec<(f64, f64)>,
    pub envelope: PiecewiseCubic,
}

impl ContinuousPart {
    pub fn eval(&self, r: f64) -> ExtReal {
        if r < self.base.r0() || (r == self.base.r0() && self.base.eval(r).is_infinite()) {
            return ExtReal::PosInf;
        }
        ExtReal::Finite(self.envelope.eval(r))
    }

    /// `φ̄ − φ` off the hard core, zero on it.
    pub fn small_part(&self, r: f64) -> f64 {
        match (self.eval(r), self.base.eval(r)) {
            (ExtReal::Finite(c), ExtReal::Finite(f)) => c - f,
            _ => 0.0,
        }
    }

    /// The tent `m − (m/ε)|r − s|` of hat `i`.
    pub fn hat(&self, i: usize, r: f64) -> f64 {
        let (s, m) = self.hats[i];
        m - (m / self.eps) * (r - s).abs()
    }
}

/// Splits a well-behaved function into a part that is continuous on
/// `(r₀, ∞)` and a nonnegative remainder supported within `ε` of the
/// interior breakpoints.
pub fn decompose_well_behaved(f: &WellBehavedFn, eps: f64) -> Result<ContinuousPart> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    let bp = f.breakpoints();
    let r0 = bp[0];
    let hats: Vec<(f64, f64)> = (1..bp.len())
        .map(|i| {
            let top = f.point_values()[i].to_f64().max(f.left_limit(i)).max(f.right_limit(i));
            (bp[i], top + 1.0)
        })
        .collect();

    let mut cuts: Vec<f64> = vec![r0];
    for (i, &b) in bp.iter().enumerate() {
        cuts.push(b);
        if i > 0 {
            cuts.push(b - eps);
            cuts.push(b + eps);
        }
    }
    cuts.retain(|c| *c >= r0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let mut knots = vec![r0];
    let mut polys: Vec<Cubic> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let mut cands = vec![f.piece_at(mid)];
        for &(s, m) in &hats {
            if (mid - s).abs() < eps {
                let slope = m / eps;
                cands.push(if mid < s { Cubic::linear(m - slope * s, slope) } else { Cubic::linear(m + slope * s, -slope) });
            }
        }
        let mut sub = vec![a, b];
        for i in 0..cands.len() {
            for j in i + 1..cands.len() {
                sub.extend(roots_in(&cands[i].sub(&cands[j]), a, b));
            }
        }
        sub.sort_by(|x, y| x.partial_cmp(y).unwrap());
        sub.dedup();
        for s in sub.windows(2) {
            let m = 0.5 * (s[0] + s[1]);
            let best = *cands
                .iter()
                .max_by(|p, q| p.eval(m).partial_cmp(&q.eval(m)).unwrap())
                .unwrap();
            if polys.last() == Some(&best) {
                *knots.last_mut().unwrap() = s[1];
            } else {
                polys.push(best);
                knots.push(s[1]);
            }
        }
    }
    // drop a trailing zero segment so the zero tail starts at the last knot
    while polys.last() == Some(&Cubic::ZERO) {
        polys.pop();
        knots.pop();
    }
    let envelope = PiecewiseCubic { knots, polys };
    for w in envelope.segments().windows(2) {
        let k = w[0].1;
        let jump = (w[1].2.eval(k) - w[0].2.eval(k)).abs();
        let scale = 1.0 + w[0].2.eval(k).abs();
        if k > r0 && jump > 1e-9 * scale {
            return Err(Error::Internal(format!("continuous envelope jumps by {jump} at r = {k}")));
        }
    }
    Ok(ContinuousPart { base: f.clone(), eps, hats, envelope })
}

/// Sign-change roots of `p` on the open interval `(a, b)`.
fn roots_in(p: &Cubic, a: f64, b: f64) -> Vec<f64> {
    const N: usize = 64;
    let mut out = Vec::new();
    let xs: Vec<f64> = (0..=N).map(|k| a + (b - a) * k as f64 / N as f64).collect();
    for w in xs.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (p.eval(lo), p.eval(hi));
        if flo == 0.0 && lo > a {
            out.push(lo);
            continue;
        }
        if flo * fhi >= 0.0 {
            continue;
        }
        let sign_lo = flo.signum();
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            if p.eval(m).signum() == sign_lo {
                lo = m;
            } else {
                hi = m;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}
