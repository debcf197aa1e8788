//! Curves given by a Minkowski support function in polar-tangential coordinates.
//!
//! A support function `p(θ)` is the oriented distance from the origin to the
//! tangent line whose normal is `(cos θ, sin θ)`. The curve is then
//!
//! ```text
//! γ(θ) = (p cos θ − p′ sin θ, p sin θ + p′ cos θ)
//! ```
//!
//! with tangent direction `(−sin θ, cos θ)` and radius of curvature
//! `ρ(θ) = p(θ) + p″(θ)`, which is also the speed `‖γ′(θ)‖`. Every downstream
//! singularity condition is a combination of `ρ` values, so `ρ` is exposed
//! directly.
//!
//! Support functions here are finite trigonometric polynomials whose
//! frequencies are exact rationals `j/n`, `n` being the rotation number, so
//! `p` has period `2nπ` with no floating drift in the frequency itself.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::geom::{Rect, Vec2};
use crate::roots::golden_section_min;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SupportFnError {
    #[error("rotation number must be a positive integer")]
    InvalidRotationNumber,
    #[error("term {index}: frequency numerator must be at least 1")]
    ZeroFrequency { index: usize },
    #[error("frequency {j}/{n} appears more than once")]
    DuplicateFrequency { j: u32, n: u32 },
    #[error("support function coefficients must be finite")]
    NonFinite,
    #[error("rotation number {n} is not minimal: every frequency numerator shares the factor {gcd} with it")]
    NonMinimalPeriod { n: u32, gcd: u32 },
    #[error("p + p'' = {radius:e} vanishes at theta = {theta}: curve is not locally convex there")]
    DegenerateCurvature { theta: f64, radius: f64 },
    #[error("not a rosette: p + p'' reaches {min_radius} at theta = {theta}")]
    NotARosette { theta: f64, min_radius: f64 },
    #[error("validation grid of {given} samples is too coarse, need at least {required}")]
    TooFewSamples { given: usize, required: usize },
}

/// One term `cos·cos(jθ/n) + sin·sin(jθ/n)` of a support function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrigTerm {
    pub j: u32,
    pub cos: f64,
    pub sin: f64,
}

impl TrigTerm {
    pub fn new(j: u32, cos: f64, sin: f64) -> Self {
        TrigTerm { j, cos, sin }
    }
}

/// `p(θ) = a₀ + Σ [cₖ cos(jₖθ/n) + sₖ sin(jₖθ/n)]`, period `2nπ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrigSupportFunction {
    rotation_number: u32,
    constant: f64,
    terms: Vec<TrigTerm>,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl TrigSupportFunction {
    pub fn new(
        rotation_number: u32,
        constant: f64,
        terms: Vec<TrigTerm>,
    ) -> Result<Self, SupportFnError> {
        if rotation_number == 0 {
            return Err(SupportFnError::InvalidRotationNumber);
        }
        if !constant.is_finite() {
            return Err(SupportFnError::NonFinite);
        }
        let mut seen = Vec::with_capacity(terms.len());
        for (index, term) in terms.iter().enumerate() {
            if term.j == 0 {
                return Err(SupportFnError::ZeroFrequency { index });
            }
            if !term.cos.is_finite() || !term.sin.is_finite() {
                return Err(SupportFnError::NonFinite);
            }
            if seen.contains(&term.j) {
                return Err(SupportFnError::DuplicateFrequency {
                    j: term.j,
                    n: rotation_number,
                });
            }
            seen.push(term.j);
        }
        // With a common factor d the curve closes after 2(n/d)π and is an
        // (n/d)-rosette traced d times.
        let common = terms
            .iter()
            .filter(|t| t.cos != 0.0 || t.sin != 0.0)
            .fold(rotation_number, |acc, t| gcd(acc, t.j));
        if common != 1 {
            return Err(SupportFnError::NonMinimalPeriod {
                n: rotation_number,
                gcd: common,
            });
        }
        Ok(TrigSupportFunction {
            rotation_number,
            constant,
            terms,
        })
    }

    /// `p(θ) = radius`: a circle centred at the origin.
    pub fn circle(radius: f64) -> Self {
        TrigSupportFunction {
            rotation_number: 1,
            constant: radius,
            terms: Vec::new(),
        }
    }

    pub fn rotation_number(&self) -> u32 {
        self.rotation_number
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn frequency(&self, term: &TrigTerm) -> f64 {
        f64::from(term.j) / f64::from(self.rotation_number)
    }

    /// Largest frequency numerator `j` (0 for a constant function).
    pub fn max_numerator(&self) -> u32 {
        self.terms.iter().map(|t| t.j).max().unwrap_or(0)
    }

    /// The full parameter period `2nπ`.
    pub fn period(&self) -> f64 {
        2.0 * PI * f64::from(self.rotation_number)
    }

    /// Upper bound on `|p|`, used to scale absolute tolerances.
    pub fn magnitude(&self) -> f64 {
        self.constant.abs()
            + self
                .terms
                .iter()
                .map(|t| t.cos.abs() + t.sin.abs())
                .sum::<f64>()
    }

    /// Threshold below which `|p + p″|` counts as vanishing curvature radius.
    pub fn curvature_epsilon(&self) -> f64 {
        1e-9 * self.magnitude().max(f64::MIN_POSITIVE)
    }

    /// `d^order p / dθ^order` at `theta`, differentiated term by term.
    pub fn eval(&self, theta: f64, order: u32) -> f64 {
        let mut value = if order == 0 { self.constant } else { 0.0 };
        for term in &self.terms {
            let f = self.frequency(term);
            let (s, c) = (f * theta).sin_cos();
            let scale = f.powi(order as i32);
            let v = match order % 4 {
                0 => term.cos * c + term.sin * s,
                1 => -term.cos * s + term.sin * c,
                2 => -term.cos * c - term.sin * s,
                _ => term.cos * s - term.sin * c,
            };
            value += scale * v;
        }
        value
    }

    /// Radius of curvature `ρ(θ) = p(θ) + p″(θ)`.
    pub fn radius_of_curvature(&self, theta: f64) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|term| {
                    let f = self.frequency(term);
                    let (s, c) = (f * theta).sin_cos();
                    (1.0 - f * f) * (term.cos * c + term.sin * s)
                })
                .sum::<f64>()
    }

    /// `ρ^(order)(θ)`, i.e. `p^(order) + p^(order+2)`.
    pub fn radius_of_curvature_derivative(&self, theta: f64, order: u32) -> f64 {
        if order == 0 {
            self.radius_of_curvature(theta)
        } else {
            self.eval(theta, order) + self.eval(theta, order + 2)
        }
    }

    pub fn position(&self, theta: f64) -> Vec2 {
        let p = self.eval(theta, 0);
        let dp = self.eval(theta, 1);
        let (s, c) = theta.sin_cos();
        Vec2::new(p * c - dp * s, p * s + dp * c)
    }

    /// Analytic velocity `γ′(θ) = ρ(θ)·(−sin θ, cos θ)`.
    pub fn velocity(&self, theta: f64) -> Vec2 {
        tangent_direction(theta) * self.radius_of_curvature(theta)
    }

    pub fn gamma(&self, theta: f64) -> Result<CurvePoint, SupportFnError> {
        let radius = self.radius_of_curvature(theta);
        if radius.abs() < self.curvature_epsilon() {
            return Err(SupportFnError::DegenerateCurvature { theta, radius });
        }
        Ok(CurvePoint {
            theta,
            position: self.position(theta),
            tangent_dir: tangent_direction(theta),
            curvature: 1.0 / radius,
        })
    }

    /// Minimum grid size accepted by [`validate_rosette`](Self::validate_rosette).
    pub fn min_validation_samples(&self) -> usize {
        (4 * self.max_numerator() as usize).max(4)
    }

    /// Checks local convexity: `p + p″ > 0` on the whole period.
    ///
    /// `samples` grid points cover `[0, 2nπ)`; every grid-local minimum is
    /// refined by golden-section search on its neighbouring cells.
    pub fn validate_rosette(&self, samples: usize) -> Result<RosetteValidity, SupportFnError> {
        let required = self.min_validation_samples();
        if samples < required {
            return Err(SupportFnError::TooFewSamples {
                given: samples,
                required,
            });
        }
        let period = self.period();
        let step = period / samples as f64;
        let values: Vec<f64> = (0..samples)
            .map(|i| self.radius_of_curvature(step * i as f64))
            .collect();

        let mut best_theta = 0.0;
        let mut best = f64::INFINITY;
        for i in 0..samples {
            let prev = values[(i + samples - 1) % samples];
            let next = values[(i + 1) % samples];
            let here = values[i];
            if here <= prev && here <= next {
                let center = step * i as f64;
                let (theta, value) = golden_section_min(
                    |t| self.radius_of_curvature(t),
                    center - step,
                    center + step,
                    1e-12,
                );
                if value < best {
                    best = value;
                    best_theta = theta.rem_euclid(period);
                }
            }
        }
        // Constant functions have no strict local minimum structure issue,
        // but guard the empty case anyway.
        if !best.is_finite() {
            best = values.iter().copied().fold(f64::INFINITY, f64::min);
        }
        let verdict = if best > self.curvature_epsilon() {
            ConvexityVerdict::Rosette
        } else {
            ConvexityVerdict::NotLocallyConvex
        };
        Ok(RosetteValidity {
            min_radius_of_curvature: best,
            theta_at_min: best_theta,
            verdict,
        })
    }

    /// The support function of the same curve rotated by `-shift`,
    /// i.e. `θ ↦ p(θ + shift)`.
    pub fn shifted(&self, shift: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (s, c) = (self.frequency(t) * shift).sin_cos();
                TrigTerm::new(t.j, t.cos * c + t.sin * s, t.sin * c - t.cos * s)
            })
            .collect();
        TrigSupportFunction {
            rotation_number: self.rotation_number,
            constant: self.constant,
            terms,
        }
    }

    /// The support function of the curve scaled by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| TrigTerm::new(t.j, t.cos * factor, t.sin * factor))
            .collect();
        TrigSupportFunction {
            rotation_number: self.rotation_number,
            constant: self.constant * factor,
            terms,
        }
    }
}

/// Unit tangent `(−sin θ, cos θ)` shared by every point with normal angle `θ`.
#[inline]
pub fn tangent_direction(theta: f64) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(-s, c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub theta: f64,
    pub position: Vec2,
    pub tangent_dir: Vec2,
    pub curvature: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityVerdict {
    Rosette,
    NotLocallyConvex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RosetteValidity {
    pub min_radius_of_curvature: f64,
    pub theta_at_min: f64,
    pub verdict: ConvexityVerdict,
}

impl RosetteValidity {
    pub fn is_rosette(&self) -> bool {
        self.verdict == ConvexityVerdict::Rosette
    }
}

/// A support function that has passed the local-convexity check.
///
/// Holding a `RosetteCurve` is proof that `ρ > 0` on the whole period, so the
/// branch constructors downstream cannot fail with "not a rosette".
#[derive(Clone, Debug, PartialEq)]
pub struct RosetteCurve {
    support: TrigSupportFunction,
    validity: RosetteValidity,
    max_radius: f64,
    bounds: Rect,
}

impl RosetteCurve {
    pub fn new(support: TrigSupportFunction) -> Result<Self, SupportFnError> {
        let samples = (64 * support.max_numerator() as usize).max(1024);
        let validity = support.validate_rosette(samples)?;
        if !validity.is_rosette() {
            return Err(SupportFnError::NotARosette {
                theta: validity.theta_at_min,
                min_radius: validity.min_radius_of_curvature,
            });
        }
        let period = support.period();
        let n = 4096 * support.rotation_number() as usize;
        let mut max_radius = 0f64;
        let bounds = Rect::bounding((0..n).map(|i| {
            let t = period * i as f64 / n as f64;
            max_radius = max_radius.max(support.radius_of_curvature(t).abs());
            support.position(t)
        }))
        .expect("non-empty sample");
        Ok(RosetteCurve {
            support,
            validity,
            max_radius,
            bounds,
        })
    }

    pub fn support(&self) -> &TrigSupportFunction {
        &self.support
    }

    pub fn validity(&self) -> &RosetteValidity {
        &self.validity
    }

    pub fn rotation_number(&self) -> u32 {
        self.support.rotation_number
    }

    pub fn period(&self) -> f64 {
        self.support.period()
    }

    pub fn point(&self, theta: f64) -> Vec2 {
        self.support.position(theta)
    }

    pub fn rho(&self, theta: f64) -> f64 {
        self.support.radius_of_curvature(theta)
    }

    /// `κ(θ) = 1/ρ(θ)`, finite because `ρ > 0` everywhere.
    pub fn curvature(&self, theta: f64) -> f64 {
        1.0 / self.rho(theta)
    }

    /// Sampled maximum of `ρ`.
    pub fn max_radius_of_curvature(&self) -> f64 {
        self.max_radius
    }

    /// `max κ = 1 / min ρ`.
    pub fn max_curvature(&self) -> f64 {
        1.0 / self.validity.min_radius_of_curvature
    }

    /// Bounding box of the curve (dense sample).
    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    /// Diagonal of the bounding box, the length scale for relative tolerances.
    pub fn diameter(&self) -> f64 {
        self.bounds.diagonal()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_rosette() -> TrigSupportFunction {
        TrigSupportFunction::new(2, 10.0, vec![TrigTerm::new(3, 3.0, 0.0)]).unwrap()
    }

    fn oval() -> TrigSupportFunction {
        TrigSupportFunction::new(1, 10.0, vec![TrigTerm::new(3, 1.0, 0.0)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let circle = TrigSupportFunction::circle(4.5);
        assert_eq!(circle.eval(1.234, 0), 4.5);
        assert_eq!(circle.eval(1.234, 2), 0.0);

        let p = two_rosette();
        assert_eq!(p.eval(0.0, 0), 13.0);
        // p'' = -(3/2)^2 * 3 cos(3θ/2)
        assert!((p.eval(0.0, 2) - (-6.75)).abs() < 1e-14);
    }

    #[test]
    fn gamma_examples() {
        let r = 2.5;
        let circle = TrigSupportFunction::circle(r);
        for theta in [0.0, 0.7, 2.0, 5.9] {
            let pt = circle.gamma(theta).unwrap();
            assert!((pt.position.x - r * theta.cos()).abs() < 1e-14);
            assert!((pt.position.y - r * theta.sin()).abs() < 1e-14);
            assert!((pt.curvature - 1.0 / r).abs() < 1e-15);
        }

        let pt = two_rosette().gamma(0.0).unwrap();
        assert_eq!(pt.position, Vec2::new(13.0, 0.0));
        assert!((pt.curvature - 0.16).abs() < 1e-15);
        assert_eq!(pt.tangent_dir, Vec2::new(-0.0, 1.0));
    }

    #[test]
    fn gamma_reports_vanishing_radius() {
        // ρ = 1 - 6 cos 2θ vanishes at cos 2θ = 1/6.
        let p = TrigSupportFunction::new(1, 1.0, vec![TrigTerm::new(2, 2.0, 0.0)]).unwrap();
        let theta = 0.5 * (1.0f64 / 6.0).acos();
        match p.gamma(theta) {
            Err(SupportFnError::DegenerateCurvature { .. }) => {}
            other => panic!("expected DegenerateCurvature, got {other:?}"),
        }
    }

    #[test]
    fn validate_examples() {
        // ρ = 10 - 3.75 cos(3θ/2), minimum 6.25 at θ = 0.
        let v = two_rosette().validate_rosette(64).unwrap();
        assert!(v.is_rosette());
        assert!((v.min_radius_of_curvature - 6.25).abs() < 1e-10);
        assert!(v.theta_at_min.abs() < 1e-5 || (v.theta_at_min - 4.0 * PI).abs() < 1e-5);

        let bad = TrigSupportFunction::new(1, 1.0, vec![TrigTerm::new(2, 2.0, 0.0)]).unwrap();
        let v = bad.validate_rosette(64).unwrap();
        assert_eq!(v.verdict, ConvexityVerdict::NotLocallyConvex);
        assert!((v.min_radius_of_curvature + 5.0).abs() < 1e-10);
        let off = v
            .theta_at_min
            .min(2.0 * PI - v.theta_at_min)
            .min((v.theta_at_min - PI).abs());
        assert!(off < 1e-5, "theta_at_min = {}", v.theta_at_min);

        let v = TrigSupportFunction::circle(3.0)
            .validate_rosette(16)
            .unwrap();
        assert!(v.is_rosette());
        assert_eq!(v.min_radius_of_curvature, 3.0);
    }

    #[test]
    fn validation_grid_must_resolve_highest_frequency() {
        assert_eq!(
            oval().validate_rosette(8),
            Err(SupportFnError::TooFewSamples {
                given: 8,
                required: 12
            })
        );
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            TrigSupportFunction::new(0, 1.0, vec![]),
            Err(SupportFnError::InvalidRotationNumber)
        );
        assert_eq!(
            TrigSupportFunction::new(1, 1.0, vec![TrigTerm::new(0, 1.0, 0.0)]),
            Err(SupportFnError::ZeroFrequency { index: 0 })
        );
        assert_eq!(
            TrigSupportFunction::new(
                1,
                1.0,
                vec![TrigTerm::new(2, 1.0, 0.0), TrigTerm::new(2, 0.0, 1.0)]
            ),
            Err(SupportFnError::DuplicateFrequency { j: 2, n: 1 })
        );
        assert_eq!(
            TrigSupportFunction::new(2, 1.0, vec![TrigTerm::new(4, 0.1, 0.0)]),
            Err(SupportFnError::NonMinimalPeriod { n: 2, gcd: 2 })
        );
        assert_eq!(
            TrigSupportFunction::new(1, f64::NAN, vec![]),
            Err(SupportFnError::NonFinite)
        );
    }

    #[test]
    fn rosette_curve_rejects_non_convex() {
        let bad = TrigSupportFunction::new(1, 1.0, vec![TrigTerm::new(2, 2.0, 0.0)]).unwrap();
        assert!(matches!(
            RosetteCurve::new(bad),
            Err(SupportFnError::NotARosette { .. })
        ));
        let good = RosetteCurve::new(oval()).unwrap();
        assert!((good.max_curvature() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn shift_and_scale() {
        let p = TrigSupportFunction::new(
            1,
            10.0,
            vec![TrigTerm::new(3, 1.0, 0.4), TrigTerm::new(5, -0.2, 0.1)],
        )
        .unwrap();
        let q = p.shifted(0.37);
        let s = p.scaled(3.0);
        for theta in [0.0, 1.0, 2.5, 4.0] {
            assert!((q.eval(theta, 0) - p.eval(theta + 0.37, 0)).abs() < 1e-12);
            assert!((s.eval(theta, 1) - 3.0 * p.eval(theta, 1)).abs() < 1e-12);
        }
    }
}
