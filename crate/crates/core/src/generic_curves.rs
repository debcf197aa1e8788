//! Parallel pairs and affine equidistants of curves that are not given by a
//! support function: closed trigonometric curves and open spline arcs, in
//! particular loops.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geom::{Rect, Vec2};
use crate::roots::{sign_change_roots, Wrap};
use crate::supportfn::RosetteCurve;

/// Minimum number of samples for an open spline curve.
pub const MIN_SPLINE_SAMPLES: usize = 16;
/// Minimum grid for [`find_parallel_pairs`].
pub const MIN_PAIR_GRID: usize = 256;
/// Minimum chain length for [`detect_chain_singularities`].
pub const MIN_CHAIN_POINTS: usize = 32;

const PAIR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenericCurveError {
    #[error("spline needs at least {required} samples, got {given}")]
    TooFewSamples { given: usize, required: usize },
    #[error("parameter range [{start}, {end}] is empty or not finite")]
    InvalidRange { start: f64, end: f64 },
    #[error("curve data contains a non-finite value")]
    NonFinite,
    #[error("curve is not regular: speed {speed:e} at t = {t}")]
    NotRegular { t: f64, speed: f64 },
    #[error("pair grid must be at least {MIN_PAIR_GRID}, got {0}")]
    GridTooSmall(usize),
    #[error("not a loop: {0}")]
    NotALoop(LoopDefect),
    #[error("chain has {len} points, at least {MIN_CHAIN_POINTS} are needed")]
    ChainTooShort { len: usize },
    #[error("chain is degenerate: all points coincide")]
    DegenerateChain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LoopDefect {
    OpenEnds { gap: f64 },
    VanishingCurvature { t: f64 },
}

impl std::fmt::Display for LoopDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoopDefect::OpenEnds { gap } => write!(f, "endpoints are {gap:e} apart"),
            LoopDefect::VanishingCurvature { t } => write!(f, "curvature vanishes near t = {t}"),
        }
    }
}

/// `c·cos(j t) + s·sin(j t)`; for `j = 0` only `c` is used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierTerm {
    pub j: u32,
    pub cos: f64,
    pub sin: f64,
}

impl FourierTerm {
    pub fn new(j: u32, cos: f64, sin: f64) -> Self {
        FourierTerm { j, cos, sin }
    }
}

/// Finite trigonometric polynomial in `t` with integer frequencies, period 2π.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FourierSeries {
    terms: Vec<FourierTerm>,
}

impl FourierSeries {
    /// Terms sharing a frequency are summed; the sine part of `j = 0` is dropped.
    pub fn new(terms: impl IntoIterator<Item = FourierTerm>) -> Result<Self, GenericCurveError> {
        let mut acc: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
        for t in terms {
            if !t.cos.is_finite() || !t.sin.is_finite() {
                return Err(GenericCurveError::NonFinite);
            }
            let e = acc.entry(t.j).or_default();
            e.0 += t.cos;
            if t.j != 0 {
                e.1 += t.sin;
            }
        }
        Ok(Self::from_map(acc))
    }

    fn from_map(acc: BTreeMap<u32, (f64, f64)>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, (c, s))| *c != 0.0 || *s != 0.0)
            .map(|(j, (c, s))| FourierTerm::new(j, c, s))
            .collect();
        FourierSeries { terms }
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn max_frequency(&self) -> u32 {
        self.terms.iter().map(|t| t.j).max().unwrap_or(0)
    }

    /// Value of the `order`-th derivative at `t`.
    pub fn eval(&self, t: f64, order: u32) -> f64 {
        let mut sum = 0.0;
        for term in &self.terms {
            if term.j == 0 {
                if order == 0 {
                    sum += term.cos;
                }
                continue;
            }
            let w = f64::from(term.j);
            let (s, c) = (w * t).sin_cos();
            let scale = w.powi(order as i32);
            // d/dt cycles (cos, sin) → (−sin, cos) → (−cos, −sin) → (sin, −cos).
            let v = match order % 4 {
                0 => term.cos * c + term.sin * s,
                1 => -term.cos * s + term.sin * c,
                2 => -term.cos * c - term.sin * s,
                _ => term.cos * s - term.sin * c,
            };
            sum += scale * v;
        }
        sum
    }

    pub fn derivative(&self) -> FourierSeries {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.j != 0)
            .map(|t| {
                let w = f64::from(t.j);
                FourierTerm::new(t.j, w * t.sin, -w * t.cos)
            })
            .collect();
        FourierSeries { terms }
    }

    pub fn scaled(&self, factor: f64) -> FourierSeries {
        let terms = self
            .terms
            .iter()
            .map(|t| FourierTerm::new(t.j, t.cos * factor, t.sin * factor))
            .collect();
        FourierSeries { terms }
    }

    pub fn add(&self, other: &FourierSeries) -> FourierSeries {
        let mut acc: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
        for t in self.terms.iter().chain(&other.terms) {
            let e = acc.entry(t.j).or_default();
            e.0 += t.cos;
            e.1 += t.sin;
        }
        Self::from_map(acc)
    }

    /// Product, expanded with the product-to-sum identities.
    pub fn mul(&self, other: &FourierSeries) -> FourierSeries {
        let mut acc: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
        let mut put = |freq: i64, c: f64, s: f64| {
            let e = acc.entry(freq.unsigned_abs() as u32).or_default();
            e.0 += c;
            if freq != 0 {
                e.1 += if freq < 0 { -s } else { s };
            }
        };
        for a in &self.terms {
            let (c1, s1) = (a.cos, if a.j == 0 { 0.0 } else { a.sin });
            for b in &other.terms {
                let (c2, s2) = (b.cos, if b.j == 0 { 0.0 } else { b.sin });
                let sum = i64::from(a.j) + i64::from(b.j);
                let diff = i64::from(a.j) - i64::from(b.j);
                put(sum, 0.5 * (c1 * c2 - s1 * s2), 0.5 * (c1 * s2 + s1 * c2));
                put(diff, 0.5 * (c1 * c2 + s1 * s2), 0.5 * (s1 * c2 - c1 * s2));
            }
        }
        Self::from_map(acc)
    }
}

/// Not-a-knot cubic spline through equally spaced samples.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    start: f64,
    step: f64,
    values: Vec<f64>,
    moments: Vec<f64>,
}

impl CubicSpline {
    /// `values[i]` is the value at `start + i·(end − start)/(len − 1)`.
    pub fn new(start: f64, end: f64, values: Vec<f64>) -> Result<Self, GenericCurveError> {
        if values.len() < 4 {
            return Err(GenericCurveError::TooFewSamples {
                given: values.len(),
                required: 4,
            });
        }
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(GenericCurveError::InvalidRange { start, end });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GenericCurveError::NonFinite);
        }
        let intervals = values.len() - 1;
        let step = (end - start) / intervals as f64;
        let moments = not_a_knot_moments(&values, step);
        Ok(CubicSpline {
            start,
            step,
            values,
            moments,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn sample_count(&self) -> usize {
        self.values.len()
    }

    /// `order`-th derivative at `t`; outside the range the end pieces are extended.
    pub fn eval(&self, t: f64, order: u32) -> f64 {
        let h = self.step;
        let last = self.values.len() - 2;
        let i = (((t - self.start) / h).floor().max(0.0) as usize).min(last);
        let (m0, m1) = (self.moments[i], self.moments[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let a = self.start + h * (i + 1) as f64 - t;
        let b = t - (self.start + h * i as f64);
        match order {
            0 => {
                m0 * a * a * a / (6.0 * h)
                    + m1 * b * b * b / (6.0 * h)
                    + (y0 / h - m0 * h / 6.0) * a
                    + (y1 / h - m1 * h / 6.0) * b
            }
            1 => {
                -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - (y0 / h - m0 * h / 6.0)
                    + (y1 / h - m1 * h / 6.0)
            }
            2 => (m0 * a + m1 * b) / h,
            3 => (m1 - m0) / h,
            _ => 0.0,
        }
    }
}

/// Second derivatives at the knots. The not-a-knot conditions
/// `M₀ = 2M₁ − M₂`, `M_N = 2M_{N−1} − M_{N−2}` fold into the first and last
/// rows, leaving a tridiagonal system for `M₁ … M_{N−1}`.
fn not_a_knot_moments(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len() - 1;
    let rhs: Vec<f64> = (1..n)
        .map(|i| 6.0 / (h * h) * (y[i - 1] - 2.0 * y[i] + y[i + 1]))
        .collect();
    let m = n - 1;
    let mut sub = vec![1.0; m];
    let mut diag = vec![4.0; m];
    let mut sup = vec![1.0; m];
    diag[0] = 6.0;
    sup[0] = 0.0;
    diag[m - 1] = 6.0;
    sub[m - 1] = 0.0;
    if m == 1 {
        diag[0] = 6.0;
    }

    // Thomas algorithm.
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..m {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut inner = vec![0.0; m];
    inner[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        inner[i] = d[i] - c[i] * inner[i + 1];
    }

    let mut moments = Vec::with_capacity(n + 1);
    let first = if m >= 2 {
        2.0 * inner[0] - inner[1]
    } else {
        inner[0]
    };
    let last = if m >= 2 {
        2.0 * inner[m - 1] - inner[m - 2]
    } else {
        inner[0]
    };
    moments.push(first);
    moments.extend_from_slice(&inner);
    moments.push(last);
    moments
}

#[derive(Clone, Debug, PartialEq)]
enum Representation {
    Closed { x: FourierSeries, y: FourierSeries },
    Open { x: CubicSpline, y: CubicSpline },
}

/// A plane curve: closed trigonometric on `[0, 2π)` or an open spline arc.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricCurve {
    repr: Representation,
    start: f64,
    end: f64,
    diameter: f64,
    regular: bool,
    min_speed: (f64, f64),
}

impl ParametricCurve {
    pub fn closed(x: FourierSeries, y: FourierSeries) -> Self {
        Self::finish(Representation::Closed { x, y }, 0.0, TAU)
    }

    /// Spline through `samples` taken at equally spaced parameters on `t_range`.
    pub fn open(samples: &[Vec2], t_range: (f64, f64)) -> Result<Self, GenericCurveError> {
        if samples.len() < MIN_SPLINE_SAMPLES {
            return Err(GenericCurveError::TooFewSamples {
                given: samples.len(),
                required: MIN_SPLINE_SAMPLES,
            });
        }
        let (start, end) = t_range;
        let x = CubicSpline::new(start, end, samples.iter().map(|p| p.x).collect())?;
        let y = CubicSpline::new(start, end, samples.iter().map(|p| p.y).collect())?;
        Ok(Self::finish(Representation::Open { x, y }, start, end))
    }

    /// Closed form of a rosette in the parameter `t = θ/n`.
    pub fn from_rosette(curve: &RosetteCurve) -> Self {
        let support = curve.support();
        let n = support.rotation_number();
        let p = FourierSeries::new(
            std::iter::once(FourierTerm::new(0, support.constant(), 0.0)).chain(
                support
                    .terms()
                    .iter()
                    .map(|t| FourierTerm::new(t.j, t.cos, t.sin)),
            ),
        )
        .expect("support function coefficients are finite");
        let dp = p.derivative().scaled(1.0 / f64::from(n));
        let cos_n = FourierSeries {
            terms: vec![FourierTerm::new(n, 1.0, 0.0)],
        };
        let sin_n = FourierSeries {
            terms: vec![FourierTerm::new(n, 0.0, 1.0)],
        };
        let x = p.mul(&cos_n).add(&dp.mul(&sin_n).scaled(-1.0));
        let y = p.mul(&sin_n).add(&dp.mul(&cos_n));
        Self::closed(x, y)
    }

    fn finish(repr: Representation, start: f64, end: f64) -> Self {
        let mut curve = ParametricCurve {
            repr,
            start,
            end,
            diameter: 0.0,
            regular: false,
            min_speed: (start, 0.0),
        };
        let grid = curve.dense_grid();
        let step = (end - start) / grid as f64;
        let points: Vec<Vec2> = (0..=grid)
            .map(|i| curve.point(start + step * i as f64))
            .collect();
        curve.diameter = Rect::bounding(points).map_or(0.0, |r| r.diagonal());
        curve.min_speed = (0..=grid)
            .map(|i| {
                let t = start + step * i as f64;
                (t, curve.speed(t))
            })
            .fold((start, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            });
        curve.regular = curve.diameter > 0.0 && curve.min_speed.1 > curve.regularity_epsilon();
        curve
    }

    fn dense_grid(&self) -> usize {
        match &self.repr {
            Representation::Closed { x, y } => {
                4096.max(64 * x.max_frequency().max(y.max_frequency()) as usize)
            }
            Representation::Open { x, .. } => 4096.max(64 * x.sample_count()),
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.repr, Representation::Closed { .. })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    pub fn domain_length(&self) -> f64 {
        self.end - self.start
    }

    pub fn derivative(&self, t: f64, order: u32) -> Vec2 {
        match &self.repr {
            Representation::Closed { x, y } => Vec2::new(x.eval(t, order), y.eval(t, order)),
            Representation::Open { x, y } => Vec2::new(x.eval(t, order), y.eval(t, order)),
        }
    }

    pub fn point(&self, t: f64) -> Vec2 {
        self.derivative(t, 0)
    }

    pub fn velocity(&self, t: f64) -> Vec2 {
        self.derivative(t, 1)
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.velocity(t).length()
    }

    pub fn unit_tangent(&self, t: f64) -> Vec2 {
        self.velocity(t).normalized().unwrap_or(Vec2::ZERO)
    }

    pub fn signed_curvature(&self, t: f64) -> f64 {
        let v = self.velocity(t);
        let a = self.derivative(t, 2);
        v.cross(a) / v.length().powi(3)
    }

    /// Bounding-box diagonal of a dense sample.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// `1e−6 × diameter / domain length`.
    pub fn regularity_epsilon(&self) -> f64 {
        1e-6 * self.diameter / self.domain_length()
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    fn require_regular(&self) -> Result<(), GenericCurveError> {
        if self.regular {
            Ok(())
        } else {
            Err(GenericCurveError::NotRegular {
                t: self.min_speed.0,
                speed: self.min_speed.1,
            })
        }
    }

    /// `count + 1` points from start to end inclusive.
    pub fn sample(&self, count: usize) -> Vec<Vec2> {
        let count = count.max(1);
        let step = self.domain_length() / count as f64;
        (0..=count)
            .map(|i| self.point(self.start + step * i as f64))
            .collect()
    }
}

/// Continuous angle of `γ′(t)`.
#[derive(Clone, Debug)]
pub struct TangentAngle<'a> {
    curve: &'a ParametricCurve,
    step: f64,
    table: Vec<f64>,
}

impl TangentAngle<'_> {
    pub fn at(&self, t: f64) -> f64 {
        let (start, _) = self.curve.domain();
        let pos = ((t - start) / self.step).clamp(0.0, (self.table.len() - 1) as f64);
        let i = (pos.floor() as usize).min(self.table.len() - 2);
        let frac = pos - i as f64;
        let guess = self.table[i] + frac * (self.table[i + 1] - self.table[i]);
        let v = self.curve.velocity(t);
        lift_near(v.y.atan2(v.x), guess)
    }

    pub fn total_turn(&self) -> f64 {
        self.table[self.table.len() - 1] - self.table[0]
    }

    /// Total turn over 2π.
    pub fn rotation_index(&self) -> f64 {
        self.total_turn() / TAU
    }

    /// Integer rotation number of a closed curve.
    pub fn rotation_number(&self) -> Option<i64> {
        let index = self.rotation_index();
        let rounded = index.round();
        (self.curve.is_closed() && (index - rounded).abs() < 1e-6).then_some(rounded as i64)
    }
}

fn lift_near(angle: f64, reference: f64) -> f64 {
    angle + TAU * ((reference - angle) / TAU).round()
}

/// Lifts the tangent angle to a continuous function of `t`.
pub fn tangent_angle_lift(curve: &ParametricCurve) -> Result<TangentAngle<'_>, GenericCurveError> {
    curve.require_regular()?;
    let (start, _) = curve.domain();
    let mut samples = curve.dense_grid();
    loop {
        let step = curve.domain_length() / samples as f64;
        let mut table = Vec::with_capacity(samples + 1);
        let mut prev = {
            let v = curve.velocity(start);
            v.y.atan2(v.x)
        };
        let mut max_jump: f64 = 0.0;
        for i in 0..=samples {
            let v = curve.velocity(start + step * i as f64);
            let phi = lift_near(v.y.atan2(v.x), prev);
            max_jump = max_jump.max((phi - prev).abs());
            table.push(phi);
            prev = phi;
        }
        if max_jump < PI / 4.0 || samples >= 1 << 22 {
            return Ok(TangentAngle { curve, step, table });
        }
        samples *= 4;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOrientation {
    Same,
    Opposite,
}

/// Parameters `t1 < t2` with parallel tangent lines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParallelPair {
    pub t1: f64,
    pub t2: f64,
    pub orientation: PairOrientation,
    /// Number of half turns of the tangent from `t1` to `t2`.
    pub level: i64,
}

/// Parallel pairs with `t1` on a `grid`-point lattice of the domain and `t2`
/// refined by bisection.
pub fn find_parallel_pairs(
    curve: &ParametricCurve,
    grid: usize,
) -> Result<Vec<ParallelPair>, GenericCurveError> {
    if grid < MIN_PAIR_GRID {
        return Err(GenericCurveError::GridTooSmall(grid));
    }
    let lift = tangent_angle_lift(curve)?;
    let (start, end) = curve.domain();
    let step = curve.domain_length() / grid as f64;
    let node = |i: usize| {
        if i == grid {
            end
        } else {
            start + step * i as f64
        }
    };
    let last_t1 = if curve.is_closed() { grid - 1 } else { grid };

    let per_t1: Vec<Vec<ParallelPair>> = (0..=last_t1)
        .into_par_iter()
        .map(|i| {
            let t1 = node(i);
            if i + 1 >= grid {
                return Vec::new();
            }
            let tangent = curve.unit_tangent(t1);
            let phi1 = lift.at(t1);
            let from = node(i + 1);
            let f = |t: f64| tangent.cross(curve.unit_tangent(t));
            sign_change_roots(
                f,
                from,
                end - from,
                grid - i - 1,
                PAIR_TOLERANCE,
                Wrap::Open,
            )
            .into_iter()
            .map(|r| r.at)
            .filter(|&t2| !(curve.is_closed() && end - t2 < 1e-9))
            .map(|t2| {
                let level = ((lift.at(t2) - phi1) / PI).round() as i64;
                let orientation = if level.rem_euclid(2) == 0 {
                    PairOrientation::Same
                } else {
                    PairOrientation::Opposite
                };
                ParallelPair {
                    t1,
                    t2,
                    orientation,
                    level,
                }
            })
            .collect()
        })
        .collect();

    let mut pairs: Vec<ParallelPair> = per_t1.into_iter().flatten().collect();
    pairs.sort_by(|a, b| a.t1.total_cmp(&b.t1).then(a.t2.total_cmp(&b.t2)));
    pairs.dedup_by(|b, a| (a.t1 - b.t1).abs() < 1e-9 && (a.t2 - b.t2).abs() < 1e-9);
    Ok(pairs)
}

/// A connected run of equidistant points `w·γ(t1) + (1−w)·γ(t2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chain {
    pub level: i64,
    /// Weight `w` on `γ(t1)`.
    pub weight: f64,
    pub points: Vec<Vec2>,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    /// Unit tangent of the curve at `t1` (and, up to sign, at `t2`).
    pub tangents: Vec<Vec2>,
    /// Diameter of the source curve.
    pub scale: f64,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

/// Chains of `λγ(t1) + (1−λ)γ(t2)` over `pairs`, grouped by level and split
/// where consecutive points are more than four median spacings apart and
/// more than four times the previous spacing. For
/// `λ ≠ 0.5` the chains of `(1−λ)γ(t1) + λγ(t2)` follow, so the cloud of `λ`
/// and of `1 − λ` is the same set.
pub fn equidistant_cloud(
    curve: &ParametricCurve,
    pairs: &[ParallelPair],
    lambda: f64,
) -> Vec<Chain> {
    let mut by_level: BTreeMap<i64, Vec<ParallelPair>> = BTreeMap::new();
    for p in pairs {
        by_level.entry(p.level).or_default().push(*p);
    }
    let weights: Vec<f64> = if lambda == 0.5 {
        vec![0.5]
    } else {
        vec![lambda, 1.0 - lambda]
    };
    let scale = curve.diameter();

    let mut chains = Vec::new();
    for &w in &weights {
        for (&level, group) in &mut by_level {
            group.sort_by(|a, b| a.t1.total_cmp(&b.t1).then(a.t2.total_cmp(&b.t2)));
            let points: Vec<Vec2> = group
                .iter()
                .map(|p| curve.point(p.t1) * w + curve.point(p.t2) * (1.0 - w))
                .collect();
            let spacing: Vec<f64> = points.windows(2).map(|s| s[0].distance(s[1])).collect();
            let dt1: Vec<f64> = group.windows(2).map(|s| s[1].t1 - s[0].t1).collect();
            let dt2: Vec<f64> = group
                .windows(2)
                .map(|s| (s[1].t2 - s[0].t2).abs())
                .collect();
            let gap = 4.0 * median(spacing.clone());
            let gap_t1 = 4.0 * median(dt1.clone());
            let gap_t2 = 4.0 * median(dt2.clone());
            let floor = 1e-9 * scale;

            // A gap breaks the chain only if it is large against both the
            // median and the previous gap of the chain, so runs whose spacing
            // grows smoothly stay connected.
            let mut current: Option<Chain> = None;
            let mut last = (gap / 4.0, gap_t2 / 4.0);
            for (idx, pair) in group.iter().enumerate() {
                let breaks = idx > 0 && {
                    let (ds, d2) = (spacing[idx - 1], dt2[idx - 1]);
                    let jump_s = ds > gap && ds > floor && ds > 4.0 * last.0;
                    let jump_t2 = d2 > gap_t2.max(gap_t1) && d2 > 4.0 * last.1.max(dt1[idx - 1]);
                    let broken = jump_s || dt1[idx - 1] > gap_t1 || jump_t2;
                    last = if broken {
                        (gap / 4.0, gap_t2 / 4.0)
                    } else {
                        (ds, d2)
                    };
                    broken
                };
                if breaks {
                    chains.extend(current.take());
                }
                let chain = current.get_or_insert_with(|| Chain {
                    level,
                    weight: w,
                    points: Vec::new(),
                    t1: Vec::new(),
                    t2: Vec::new(),
                    tangents: Vec::new(),
                    scale,
                });
                chain.points.push(points[idx]);
                chain.t1.push(pair.t1);
                chain.t2.push(pair.t2);
                chain.tangents.push(curve.unit_tangent(pair.t1));
            }
            chains.extend(current);
        }
    }
    chains
}

/// Indices of chain points where the polyline reverses against the curve
/// tangent, i.e. where the sign of `(p[i+1] − p[i]) · tangent` flips.
pub fn detect_chain_singularities(chain: &Chain) -> Result<Vec<usize>, GenericCurveError> {
    if chain.len() < MIN_CHAIN_POINTS {
        return Err(GenericCurveError::ChainTooShort { len: chain.len() });
    }
    let extent = Rect::bounding(chain.points.iter().copied()).map_or(0.0, |r| r.diagonal());
    if extent <= 1e-9 * chain.scale {
        return Err(GenericCurveError::DegenerateChain);
    }
    let tiny = 1e-13 * extent;
    let mut singular = Vec::new();
    let mut previous: Option<bool> = None;
    for i in 0..chain.len() - 1 {
        let segment = chain.points[i + 1] - chain.points[i];
        let along = (chain.tangents[i] + chain.tangents[i + 1]).dot(segment);
        if segment.length() <= tiny || along == 0.0 {
            continue;
        }
        let forward = along > 0.0;
        if previous.is_some_and(|p| p != forward) {
            singular.push(i);
        }
        previous = Some(forward);
    }
    Ok(singular)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopClass {
    Convex,
    NonConvex,
}

/// A curve arc whose endpoints coincide and whose curvature does not vanish.
#[derive(Clone, Debug)]
pub struct LoopSegment {
    curve: ParametricCurve,
    rotation_index: f64,
}

impl LoopSegment {
    pub fn new(curve: ParametricCurve) -> Result<Self, GenericCurveError> {
        let (start, end) = curve.domain();
        let gap = curve.point(start).distance(curve.point(end));
        if gap >= 1e-6 * curve.diameter() {
            return Err(GenericCurveError::NotALoop(LoopDefect::OpenEnds { gap }));
        }
        let rotation_index = tangent_angle_lift(&curve)?.rotation_index();
        let grid = curve.dense_grid();
        let step = curve.domain_length() / grid as f64;
        let floor = 1e-9 / curve.diameter();
        let mut sign = 0.0;
        for i in 1..grid {
            let t = start + step * i as f64;
            let k = curve.signed_curvature(t);
            if k.abs() <= floor || (sign != 0.0 && k.signum() != sign) {
                return Err(GenericCurveError::NotALoop(
                    LoopDefect::VanishingCurvature { t },
                ));
            }
            sign = k.signum();
        }
        Ok(LoopSegment {
            curve,
            rotation_index,
        })
    }

    pub fn curve(&self) -> &ParametricCurve {
        &self.curve
    }

    /// Total tangent turn over 2π.
    pub fn rotation_index(&self) -> f64 {
        self.rotation_index
    }
}

/// Convex iff `|rotation index| ≤ 1`.
pub fn classify_loop(segment: &LoopSegment) -> LoopClass {
    if segment.rotation_index.abs() <= 1.0 + 1e-9 {
        LoopClass::Convex
    } else {
        LoopClass::NonConvex
    }
}
