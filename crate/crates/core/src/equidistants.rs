//! Closed-form branches of the Wigner caustic, affine λ-equidistants and the
//! Centre Symmetry Set of an n-rosette.
//!
//! For a rosette parametrized by its normal angle, `γ(θ)` and `γ(θ + kπ)` are
//! a parallel pair for every `k = 1, …, 2n−1`. Writing `ρᵢ` for the radius of
//! curvature at the two ends and `s = (−1)^k`:
//!
//! * an equidistant point `w·γ(θ) + (1−w)·γ(θ+kπ)` moves with velocity
//!   `[w·ρ₁ + (1−w)·s·ρ₂]·(−sin θ, cos θ)`;
//! * the envelope of the chord through the pair is
//!   `(κ₁γ₁ − s·κ₂γ₂) / (κ₁ − s·κ₂)`, the point where the equidistant with
//!   `w = s·ρ₂ / (s·ρ₂ − ρ₁)` is singular, and it moves along the chord with
//!   velocity `−s·(ρ₁ρ₂′ − ρ₁′ρ₂)·(γ₁ − γ₂) / (ρ₂ − s·ρ₁)²`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::geom::Vec2;
use crate::roots::{sign_change_roots, Wrap};
use crate::supportfn::{tangent_direction, RosetteCurve};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquidistantError {
    #[error("lambda = {0} is not in (0, 1) \\ {{0.5}}; use the Wigner caustic for 0.5")]
    InvalidLambda(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    WignerCaustic,
    Equidistant,
    Css,
}

/// Half-open parameter interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParamDomain {
    pub start: f64,
    pub end: f64,
}

impl ParamDomain {
    pub fn new(start: f64, end: f64) -> Self {
        ParamDomain { start, end }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn shifted(&self, by: f64) -> Self {
        ParamDomain::new(self.start + by, self.end + by)
    }

    /// `count` equally spaced parameters covering the domain, end excluded.
    pub fn samples(&self, count: usize) -> impl Iterator<Item = f64> + '_ {
        let step = self.length() / count as f64;
        (0..count).map(move |i| self.start + step * i as f64)
    }
}

/// Stable identifier of a branch inside its set, e.g. `E_{λ,n+k}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchId {
    pub kind: BranchKind,
    /// The subscript: `k` for `k < n`, `n`, or `n + k` for the swapped family.
    pub index: u32,
    pub lambda: Option<f64>,
}

/// One smooth branch of `E_λ` or of the CSS.
#[derive(Clone, Debug)]
pub struct Branch {
    curve: Arc<RosetteCurve>,
    kind: BranchKind,
    index: u32,
    pair_offset: u32,
    lambda: Option<f64>,
    weight: f64,
    domain: ParamDomain,
}

impl Branch {
    fn new(
        curve: &Arc<RosetteCurve>,
        kind: BranchKind,
        index: u32,
        pair_offset: u32,
        lambda: Option<f64>,
        weight: f64,
    ) -> Self {
        let n = curve.rotation_number();
        let half = pair_offset == n && matches!(kind, BranchKind::WignerCaustic | BranchKind::Css);
        let end = if half {
            PI * f64::from(n)
        } else {
            curve.period()
        };
        Branch {
            curve: Arc::clone(curve),
            kind,
            index,
            pair_offset,
            lambda,
            weight,
            domain: ParamDomain::new(0.0, end),
        }
    }

    pub fn curve(&self) -> &Arc<RosetteCurve> {
        &self.curve
    }

    pub fn kind(&self) -> BranchKind {
        self.kind
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// The `k` of the parallel pair `γ(θ), γ(θ + kπ)`.
    pub fn pair_offset(&self) -> u32 {
        self.pair_offset
    }

    /// Nominal λ of the set the branch belongs to; `None` for the CSS.
    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    /// Coefficient of `γ(θ)` in the affine combination (`1 − λ` on the
    /// swapped `E_{λ,n+k}` branches).
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn domain(&self) -> ParamDomain {
        self.domain
    }

    pub fn id(&self) -> BranchId {
        BranchId {
            kind: self.kind,
            index: self.index,
            lambda: self.lambda,
        }
    }

    /// The same branch parametrized over its domain shifted by `by`.
    pub fn with_domain_shifted(&self, by: f64) -> Branch {
        Branch {
            domain: self.domain.shifted(by),
            ..self.clone()
        }
    }

    fn partner(&self, theta: f64) -> f64 {
        theta + PI * f64::from(self.pair_offset)
    }

    /// `(−1)^k`.
    fn pair_sign(&self) -> f64 {
        if self.pair_offset.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn point(&self, theta: f64) -> Vec2 {
        let a = self.curve.point(theta);
        let b = self.curve.point(self.partner(theta));
        match self.kind {
            BranchKind::WignerCaustic | BranchKind::Equidistant => {
                a * self.weight + b * (1.0 - self.weight)
            }
            BranchKind::Css => {
                let (r1, r2) = (self.curve.rho(theta), self.curve.rho(self.partner(theta)));
                let s = self.pair_sign();
                (a * r2 - b * (s * r1)) * (1.0 / (r2 - s * r1))
            }
        }
    }

    /// Analytic velocity `d point / dθ`.
    pub fn velocity(&self, theta: f64) -> Vec2 {
        match self.kind {
            BranchKind::WignerCaustic | BranchKind::Equidistant => {
                tangent_direction(theta) * self.cusp_condition(theta)
            }
            BranchKind::Css => {
                let t2 = self.partner(theta);
                let (r1, r2) = (self.curve.rho(theta), self.curve.rho(t2));
                let s = self.pair_sign();
                let d = r2 - s * r1;
                let chord = self.curve.point(theta) - self.curve.point(t2);
                chord * (-s * self.cusp_condition(theta) / (d * d))
            }
        }
    }

    /// The scalar whose sign changes mark cusps of the branch.
    ///
    /// Equidistants: `w·ρ(θ) + (1−w)·(−1)^k·ρ(θ+kπ)`, the signed speed along
    /// `(−sin θ, cos θ)`. CSS: `ρ(θ)ρ′(θ+kπ) − ρ′(θ)ρ(θ+kπ)`, the factor that
    /// scales the velocity along the chord.
    pub fn cusp_condition(&self, theta: f64) -> f64 {
        let t2 = self.partner(theta);
        let support = self.curve.support();
        match self.kind {
            BranchKind::WignerCaustic | BranchKind::Equidistant => {
                self.weight * support.radius_of_curvature(theta)
                    + (1.0 - self.weight) * self.pair_sign() * support.radius_of_curvature(t2)
            }
            BranchKind::Css => {
                support.radius_of_curvature(theta) * support.radius_of_curvature_derivative(t2, 1)
                    - support.radius_of_curvature_derivative(theta, 1)
                        * support.radius_of_curvature(t2)
            }
        }
    }

    /// `d/dθ` of [`cusp_condition`](Self::cusp_condition).
    pub fn cusp_condition_derivative(&self, theta: f64) -> f64 {
        let t2 = self.partner(theta);
        let support = self.curve.support();
        let rd = |t: f64, order: u32| support.radius_of_curvature_derivative(t, order);
        match self.kind {
            BranchKind::WignerCaustic | BranchKind::Equidistant => {
                self.weight * rd(theta, 1) + (1.0 - self.weight) * self.pair_sign() * rd(t2, 1)
            }
            BranchKind::Css => rd(theta, 0) * rd(t2, 2) - rd(theta, 2) * rd(t2, 0),
        }
    }

    fn is_half_domain(&self) -> bool {
        self.domain.length() < self.curve.period() * 0.75
    }

    /// How [`cusp_condition`](Self::cusp_condition) at the domain end relates
    /// to its value at the start.
    pub fn cusp_condition_wrap(&self) -> Wrap {
        if !self.is_half_domain() {
            return Wrap::Periodic;
        }
        match self.kind {
            // Swapping the pair multiplies the condition by (−1)^n.
            BranchKind::WignerCaustic | BranchKind::Equidistant if self.pair_sign() > 0.0 => {
                Wrap::Periodic
            }
            BranchKind::WignerCaustic | BranchKind::Equidistant => Wrap::Antiperiodic,
            BranchKind::Css => Wrap::Antiperiodic,
        }
    }

    /// Same as [`cusp_condition_wrap`](Self::cusp_condition_wrap) for
    /// [`css_denominator`](Self::css_denominator).
    pub fn denominator_wrap(&self) -> Wrap {
        if !self.is_half_domain() || self.pair_sign() < 0.0 {
            Wrap::Periodic
        } else {
            Wrap::Antiperiodic
        }
    }

    /// Scale of [`cusp_condition`](Self::cusp_condition) used for relative tolerances.
    pub fn cusp_condition_scale(&self) -> f64 {
        let max_rho = self.curve.max_radius_of_curvature();
        match self.kind {
            BranchKind::WignerCaustic | BranchKind::Equidistant => max_rho,
            BranchKind::Css => max_rho * max_rho,
        }
    }

    /// CSS denominator in curvature form, `κ(θ) − (−1)^k κ(θ+kπ)`. Always
    /// nonzero for odd `k`.
    pub fn css_denominator(&self, theta: f64) -> f64 {
        self.curve.curvature(theta) - self.pair_sign() * self.curve.curvature(self.partner(theta))
    }

    /// `ε_pole = 1e−8 · max κ`.
    pub fn pole_epsilon(&self) -> f64 {
        1e-8 * self.curve.max_curvature()
    }

    /// Whether the CSS point escapes to infinity at `theta`. Always false for
    /// equidistant branches.
    pub fn is_pole(&self, theta: f64) -> bool {
        self.kind == BranchKind::Css && self.css_denominator(theta).abs() < self.pole_epsilon()
    }

    /// Grid size used for scans over this branch's domain.
    pub fn scan_samples(&self) -> usize {
        let j = self.curve.support().max_numerator().max(1) as usize;
        let n = self.curve.rotation_number() as usize;
        (128 * j * n).max(4096)
    }

    /// `count` parameters and points over the domain (end excluded).
    pub fn sample(&self, count: usize) -> Vec<(f64, Vec2)> {
        self.domain
            .samples(count)
            .map(|t| (t, self.point(t)))
            .collect()
    }

    /// Samples split into runs that avoid CSS poles.
    pub fn polylines(&self, count: usize) -> Vec<Vec<Vec2>> {
        let mut runs = Vec::new();
        let mut current = Vec::new();
        for t in self.domain.samples(count) {
            let p = self.point(t);
            if self.is_pole(t) || !p.is_finite() {
                if current.len() > 1 {
                    runs.push(std::mem::take(&mut current));
                }
                current.clear();
            } else {
                current.push(p);
            }
        }
        if current.len() > 1 {
            runs.push(current);
        }
        runs
    }
}

/// How a CSS branch fails to be a curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CssDegeneracy {
    /// The denominator vanishes on the whole domain.
    AllPoles,
    /// Every chord passes through one point (central symmetry).
    Collapsed { point: Vec2 },
}

/// Pole structure of a CSS branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CssStructure {
    pub degenerate: Option<CssDegeneracy>,
    pub poles: Vec<f64>,
    pub pole_free: Vec<ParamDomain>,
}

/// Locates the poles of a CSS branch and detects degenerate branches.
///
/// Equidistant branches have no poles and report the whole domain.
pub fn css_structure(branch: &Branch) -> CssStructure {
    let domain = branch.domain();
    if branch.kind() != BranchKind::Css {
        return CssStructure {
            degenerate: None,
            poles: Vec::new(),
            pole_free: vec![domain],
        };
    }
    let samples = branch.scan_samples();
    let eps = branch.pole_epsilon();
    let grid: Vec<f64> = domain.samples(samples).collect();

    if grid.iter().all(|&t| branch.css_denominator(t).abs() < eps) {
        return CssStructure {
            degenerate: Some(CssDegeneracy::AllPoles),
            poles: Vec::new(),
            pole_free: Vec::new(),
        };
    }
    let flat = 1e-9 * branch.cusp_condition_scale();
    if grid.iter().all(|&t| branch.cusp_condition(t).abs() <= flat) {
        let anchor = grid
            .iter()
            .copied()
            .max_by(|a, b| {
                branch
                    .css_denominator(*a)
                    .abs()
                    .total_cmp(&branch.css_denominator(*b).abs())
            })
            .unwrap_or(domain.start);
        return CssStructure {
            degenerate: Some(CssDegeneracy::Collapsed {
                point: branch.point(anchor),
            }),
            poles: Vec::new(),
            pole_free: Vec::new(),
        };
    }

    let poles: Vec<f64> = sign_change_roots(
        |t| branch.css_denominator(t),
        domain.start,
        domain.length(),
        samples,
        1e-12,
        branch.denominator_wrap(),
    )
    .into_iter()
    .map(|r| r.at)
    .collect();

    let pole_free = if poles.is_empty() {
        vec![domain]
    } else {
        let mut intervals: Vec<ParamDomain> = poles
            .windows(2)
            .map(|w| ParamDomain::new(w[0], w[1]))
            .collect();
        // The arc from the last pole wraps around through the domain end.
        intervals.push(ParamDomain::new(
            poles[poles.len() - 1],
            poles[0] + domain.length(),
        ));
        intervals
    };
    CssStructure {
        degenerate: None,
        poles,
        pole_free,
    }
}

/// An ordered list of branches of one set.
#[derive(Clone, Debug)]
pub struct BranchSet {
    pub curve: Arc<RosetteCurve>,
    pub branches: Vec<Branch>,
}

impl BranchSet {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Branch> {
        self.branches.iter()
    }
}

/// The `n` branches of the Wigner caustic `E_{0.5}`.
pub fn wigner_branches(curve: &Arc<RosetteCurve>) -> BranchSet {
    let n = curve.rotation_number();
    let branches = (1..=n)
        .map(|k| Branch::new(curve, BranchKind::WignerCaustic, k, k, Some(0.5), 0.5))
        .collect();
    BranchSet {
        curve: Arc::clone(curve),
        branches,
    }
}

/// The `2n − 1` branches of `E_λ` for `λ ∈ (0, 1) \ {0.5}`.
pub fn equidistant_branches(
    curve: &Arc<RosetteCurve>,
    lambda: f64,
) -> Result<BranchSet, EquidistantError> {
    if !(lambda > 0.0 && lambda < 1.0) || lambda == 0.5 {
        return Err(EquidistantError::InvalidLambda(lambda));
    }
    let n = curve.rotation_number();
    let kind = BranchKind::Equidistant;
    let mut branches = Vec::with_capacity(2 * n as usize - 1);
    for k in 1..n {
        branches.push(Branch::new(curve, kind, k, k, Some(lambda), lambda));
    }
    branches.push(Branch::new(curve, kind, n, n, Some(lambda), lambda));
    for k in 1..n {
        branches.push(Branch::new(
            curve,
            kind,
            n + k,
            k,
            Some(lambda),
            1.0 - lambda,
        ));
    }
    Ok(BranchSet {
        curve: Arc::clone(curve),
        branches,
    })
}

/// The `n` branches of the Centre Symmetry Set.
pub fn css_branches(curve: &Arc<RosetteCurve>) -> BranchSet {
    let n = curve.rotation_number();
    let branches = (1..=n)
        .map(|k| Branch::new(curve, BranchKind::Css, k, k, None, 0.5))
        .collect();
    BranchSet {
        curve: Arc::clone(curve),
        branches,
    }
}

/// `λ·γ(θ) + (1−λ)·γ(θ + kπ)` for any real `λ`.
pub fn equidistant_point(curve: &RosetteCurve, theta: f64, pair_offset: u32, lambda: f64) -> Vec2 {
    let a = curve.point(theta);
    let b = curve.point(theta + PI * f64::from(pair_offset));
    a * lambda + b * (1.0 - lambda)
}
