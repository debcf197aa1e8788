//! Cusp location on equidistant and CSS branches, and the parity/inequality
//! checks for ovals.
//!
//! Branch velocities factor as a scalar times a direction that never
//! vanishes (the common tangent `(−sin θ, cos θ)` for equidistants, the chord
//! for the CSS), so cusps are exactly the sign changes of that scalar. Both
//! cases reduce to bracketing roots of a smooth periodic function.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::equidistants::{
    css_branches, css_structure, equidistant_branches, wigner_branches, Branch, BranchId,
    BranchKind, CssDegeneracy,
};
use crate::geom::Vec2;
use crate::roots::sign_change_roots;
use crate::supportfn::RosetteCurve;

const ROOT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SingularError {
    #[error("branch {0:?} is degenerate: its cusp condition vanishes identically")]
    DegenerateBranch(BranchId),
    #[error("branch {got:?} has the wrong kind for this operation (expected {expected})")]
    WrongBranchKind {
        expected: &'static str,
        got: BranchKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(count: usize) -> Parity {
        if count.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspReport {
    pub branch: BranchId,
    pub cusp_parameters: Vec<f64>,
    pub cusp_positions: Vec<Vec2>,
    pub count: usize,
    pub parity: Parity,
    /// Parameters where the condition vanished with (near) zero slope.
    pub non_simple: Vec<f64>,
}

/// `θ ↦ λ·ρ(θ) + (1−λ)·(−1)^k·ρ(θ + kπ)`, zero exactly at cusps of the
/// branch `λγ(θ) + (1−λ)γ(θ + kπ)`.
pub fn cusp_condition(
    curve: &RosetteCurve,
    pair_offset: u32,
    lambda: f64,
) -> impl Fn(f64) -> f64 + '_ {
    let offset = std::f64::consts::PI * f64::from(pair_offset);
    let sign = if pair_offset.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    move |theta| lambda * curve.rho(theta) + (1.0 - lambda) * sign * curve.rho(theta + offset)
}

fn report_from_roots(branch: &Branch, roots: Vec<f64>) -> CuspReport {
    let scale = branch.cusp_condition_scale();
    let slope_floor = 1e-9 * scale;
    let non_simple = roots
        .iter()
        .copied()
        .filter(|&t| branch.cusp_condition_derivative(t).abs() < slope_floor)
        .collect();
    let cusp_positions = roots.iter().map(|&t| branch.point(t)).collect();
    CuspReport {
        branch: branch.id(),
        count: roots.len(),
        parity: Parity::of(roots.len()),
        cusp_parameters: roots,
        cusp_positions,
        non_simple,
    }
}

fn condition_vanishes(branch: &Branch) -> bool {
    let flat = 1e-9 * branch.cusp_condition_scale();
    branch
        .domain()
        .samples(branch.scan_samples())
        .all(|t| branch.cusp_condition(t).abs() <= flat)
}

/// Cusps of a Wigner caustic or equidistant branch.
pub fn find_cusps(branch: &Branch) -> Result<CuspReport, SingularError> {
    if branch.kind() == BranchKind::Css {
        return Err(SingularError::WrongBranchKind {
            expected: "wigner caustic or equidistant",
            got: branch.kind(),
        });
    }
    if condition_vanishes(branch) {
        return Err(SingularError::DegenerateBranch(branch.id()));
    }
    let domain = branch.domain();
    let roots = sign_change_roots(
        |t| branch.cusp_condition(t),
        domain.start,
        domain.length(),
        branch.scan_samples(),
        ROOT_TOLERANCE,
        branch.cusp_condition_wrap(),
    );
    Ok(report_from_roots(
        branch,
        roots.into_iter().map(|r| r.at).collect(),
    ))
}

/// Cusps of a CSS branch, located on its pole-free arcs.
pub fn find_css_cusps(branch: &Branch) -> Result<CuspReport, SingularError> {
    if branch.kind() != BranchKind::Css {
        return Err(SingularError::WrongBranchKind {
            expected: "css",
            got: branch.kind(),
        });
    }
    let structure = css_structure(branch);
    if structure.degenerate.is_some() {
        return Err(SingularError::DegenerateBranch(branch.id()));
    }
    let domain = branch.domain();
    let near_pole =
        |t: f64| structure.poles.iter().any(|&p| (p - t).abs() < 1e-6) || branch.is_pole(t);
    let roots = sign_change_roots(
        |t| branch.cusp_condition(t),
        domain.start,
        domain.length(),
        branch.scan_samples(),
        ROOT_TOLERANCE,
        branch.cusp_condition_wrap(),
    )
    .into_iter()
    .map(|r| r.at)
    .filter(|&t| !near_pole(t))
    .collect();
    Ok(report_from_roots(branch, roots))
}

/// Outcome of cusp search on one branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BranchCusps {
    Regular(CuspReport),
    Degenerate {
        branch: BranchId,
        collapsed_to: Option<Vec2>,
    },
}

impl BranchCusps {
    pub fn count(&self) -> Option<usize> {
        match self {
            BranchCusps::Regular(r) => Some(r.count),
            BranchCusps::Degenerate { .. } => None,
        }
    }
}

fn analyze_branch(branch: &Branch) -> BranchCusps {
    let result = match branch.kind() {
        BranchKind::Css => find_css_cusps(branch),
        _ => find_cusps(branch),
    };
    match result {
        Ok(report) => BranchCusps::Regular(report),
        Err(_) => {
            let collapsed_to = match branch.kind() {
                BranchKind::Css => match css_structure(branch).degenerate {
                    Some(CssDegeneracy::Collapsed { point }) => Some(point),
                    _ => None,
                },
                _ => Some(branch.point(branch.domain().start)),
            };
            BranchCusps::Degenerate {
                branch: branch.id(),
                collapsed_to,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The statement has no content for this input (a degenerate set).
    Vacuous,
    /// The statement is not made for this input (not an oval).
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub name: &'static str,
    pub verdict: Verdict,
    /// The counts the verdict was computed from.
    pub counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchCounts {
    pub wigner: usize,
    pub css: usize,
    /// `(λ, number of branches)` per tested λ.
    pub equidistants: Vec<(f64, usize)>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquidistantCusps {
    pub lambda: f64,
    pub branches: Vec<BranchCusps>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub rotation_number: u32,
    pub branch_counts: BranchCounts,
    pub wigner: Vec<BranchCusps>,
    pub css: Vec<BranchCusps>,
    pub equidistants: Vec<EquidistantCusps>,
    pub checks: Vec<TheoremCheck>,
}

impl TheoremReport {
    pub fn check(&self, name: &str) -> Option<&TheoremCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn wigner_cusp_total(&self) -> Option<usize> {
        total(&self.wigner)
    }

    pub fn css_cusp_total(&self) -> Option<usize> {
        total(&self.css)
    }
}

fn total(branches: &[BranchCusps]) -> Option<usize> {
    branches.iter().map(BranchCusps::count).sum()
}

pub const WIGNER_ODD: &str = "wigner_caustic_cusps_odd";
pub const CSS_ODD: &str = "css_cusps_odd";
pub const WIGNER_NOT_FEWER: &str = "wigner_caustic_cusps_not_fewer_than_css";
pub const EQUIDISTANT_EVEN: &str = "equidistant_branch_cusps_even";

/// Branch inventory, cusp counts, and the parity and inequality statements
/// made for ovals.
///
/// `lambdas` equal to 0.5 or outside `(0, 1)` are ignored. For rotation
/// numbers above 1 only the branch counts are checked. A degenerate Wigner
/// caustic or CSS means the curve is not generic and every statement is
/// vacuous.
pub fn check_theorems(curve: &Arc<RosetteCurve>, lambdas: &[f64]) -> TheoremReport {
    let n = curve.rotation_number();
    let wc_set = wigner_branches(curve);
    let css_set = css_branches(curve);
    let eq_sets: Vec<_> = lambdas
        .iter()
        .filter_map(|&l| equidistant_branches(curve, l).ok().map(|set| (l, set)))
        .collect();

    let branch_counts = {
        let eq_ok = eq_sets.iter().all(|(_, s)| s.len() == 2 * n as usize - 1);
        let ok = wc_set.len() == n as usize && css_set.len() == n as usize && eq_ok;
        BranchCounts {
            wigner: wc_set.len(),
            css: css_set.len(),
            equidistants: eq_sets.iter().map(|(l, s)| (*l, s.len())).collect(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        }
    };

    let wigner: Vec<BranchCusps> = wc_set.iter().map(analyze_branch).collect();
    let css: Vec<BranchCusps> = css_set.iter().map(analyze_branch).collect();
    let equidistants: Vec<EquidistantCusps> = eq_sets
        .iter()
        .map(|(lambda, set)| EquidistantCusps {
            lambda: *lambda,
            branches: set.iter().map(analyze_branch).collect(),
        })
        .collect();

    let wc_total = total(&wigner);
    let css_total = total(&css);
    let eq_counts: Option<Vec<usize>> = equidistants
        .iter()
        .flat_map(|e| e.branches.iter().map(BranchCusps::count))
        .collect();

    let names = [WIGNER_ODD, CSS_ODD, WIGNER_NOT_FEWER, EQUIDISTANT_EVEN];
    let checks = if n != 1 {
        names
            .iter()
            .map(|&name| TheoremCheck {
                name,
                verdict: Verdict::Skipped,
                counts: Vec::new(),
            })
            .collect()
    } else if let (Some(wc), Some(cs)) = (wc_total, css_total) {
        let pass = |ok: bool| if ok { Verdict::Pass } else { Verdict::Fail };
        let eq_check = match &eq_counts {
            Some(counts) => TheoremCheck {
                name: EQUIDISTANT_EVEN,
                verdict: pass(counts.iter().all(|c| c % 2 == 0)),
                counts: counts.clone(),
            },
            None => TheoremCheck {
                name: EQUIDISTANT_EVEN,
                verdict: Verdict::Vacuous,
                counts: Vec::new(),
            },
        };
        vec![
            TheoremCheck {
                name: WIGNER_ODD,
                verdict: pass(wc % 2 == 1),
                counts: vec![wc],
            },
            TheoremCheck {
                name: CSS_ODD,
                verdict: pass(cs % 2 == 1),
                counts: vec![cs],
            },
            TheoremCheck {
                name: WIGNER_NOT_FEWER,
                verdict: pass(wc >= cs),
                counts: vec![wc, cs],
            },
            eq_check,
        ]
    } else {
        names
            .iter()
            .map(|&name| TheoremCheck {
                name,
                verdict: Verdict::Vacuous,
                counts: Vec::new(),
            })
            .collect()
    };

    TheoremReport {
        rotation_number: n,
        branch_counts,
        wigner,
        css,
        equidistants,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supportfn::{TrigSupportFunction, TrigTerm};
    use std::f64::consts::PI;

    fn rosette(n: u32, constant: f64, terms: &[(u32, f64, f64)]) -> Arc<RosetteCurve> {
        let terms = terms
            .iter()
            .map(|&(j, c, s)| TrigTerm::new(j, c, s))
            .collect();
        Arc::new(RosetteCurve::new(TrigSupportFunction::new(n, constant, terms).unwrap()).unwrap())
    }

    fn circle() -> Arc<RosetteCurve> {
        Arc::new(RosetteCurve::new(TrigSupportFunction::circle(2.0)).unwrap())
    }

    #[test]
    fn cusp_condition_examples() {
        let c = circle();
        let f = cusp_condition(&c, 1, 0.5);
        assert!([0.0, 1.0, 4.0].iter().all(|&t| f(t).abs() < 1e-15));

        // ½(ρ(θ) − ρ(θ+π)) = −8 cos 3θ.
        let oval = rosette(1, 10.0, &[(3, 1.0, 0.0)]);
        let f = cusp_condition(&oval, 1, 0.5);
        for t in [0.1, 0.9, 2.2] {
            assert!((f(t) + 8.0 * (3.0 * t).cos()).abs() < 1e-12);
        }
        let f = cusp_condition(&oval, 1, 0.3);
        for t in [0.1, 0.9, 2.2] {
            assert!((f(t) - (-4.0 - 8.0 * (3.0 * t).cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn oval_wigner_and_equidistant_cusps() {
        let oval = rosette(1, 10.0, &[(3, 1.0, 0.0)]);
        let wc = find_cusps(&wigner_branches(&oval).branches[0]).unwrap();
        assert_eq!(wc.count, 3);
        assert_eq!(wc.parity, Parity::Odd);
        for (got, want) in wc
            .cusp_parameters
            .iter()
            .zip([PI / 6.0, PI / 2.0, 5.0 * PI / 6.0])
        {
            assert!((got - want).abs() < 1e-9);
        }
        let eq = find_cusps(&equidistant_branches(&oval, 0.3).unwrap().branches[0]).unwrap();
        assert_eq!(eq.count, 6);
        assert_eq!(eq.parity, Parity::Even);
        assert!(eq.non_simple.is_empty());
    }

    #[test]
    fn circle_branches_are_degenerate() {
        let c = circle();
        assert!(matches!(
            find_cusps(&wigner_branches(&c).branches[0]),
            Err(SingularError::DegenerateBranch(_))
        ));
        assert!(matches!(
            find_css_cusps(&css_branches(&c).branches[0]),
            Err(SingularError::DegenerateBranch(_))
        ));
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let oval = rosette(1, 10.0, &[(3, 1.0, 0.0)]);
        assert!(matches!(
            find_cusps(&css_branches(&oval).branches[0]),
            Err(SingularError::WrongBranchKind { .. })
        ));
        assert!(matches!(
            find_css_cusps(&wigner_branches(&oval).branches[0]),
            Err(SingularError::WrongBranchKind { .. })
        ));
    }

    #[test]
    fn oval_css_cusps() {
        // ρ(θ)ρ′(θ+π) − ρ′(θ)ρ(θ+π) = −480 sin 3θ: cusps at 0, π/3, 2π/3.
        let oval = rosette(1, 10.0, &[(3, 1.0, 0.0)]);
        let css = find_css_cusps(&css_branches(&oval).branches[0]).unwrap();
        assert_eq!(css.count, 3);
        for (got, want) in css
            .cusp_parameters
            .iter()
            .zip([0.0, PI / 3.0, 2.0 * PI / 3.0])
        {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        let flatter = rosette(1, 10.0, &[(3, 0.5, 0.0)]);
        let css = find_css_cusps(&css_branches(&flatter).branches[0]).unwrap();
        assert_eq!(css.parity, Parity::Odd);
    }

    #[test]
    fn theorem_report_for_oval() {
        let oval = rosette(1, 10.0, &[(3, 1.0, 0.0)]);
        let report = check_theorems(&oval, &[0.3]);
        assert_eq!(report.wigner_cusp_total(), Some(3));
        assert_eq!(report.css_cusp_total(), Some(3));
        for check in &report.checks {
            assert_eq!(check.verdict, Verdict::Pass, "{check:?}");
        }
        assert_eq!(report.check(EQUIDISTANT_EVEN).unwrap().counts, vec![6]);
    }

    #[test]
    fn theorem_report_for_circle_is_vacuous() {
        let report = check_theorems(&circle(), &[0.3]);
        assert!(report.checks.iter().all(|c| c.verdict == Verdict::Vacuous));
        assert_eq!(report.branch_counts.verdict, Verdict::Pass);
    }

    #[test]
    fn theorem_report_for_two_rosette_skips_parity() {
        let r2 = rosette(2, 10.0, &[(3, 3.0, 0.0)]);
        let report = check_theorems(&r2, &[0.45]);
        assert!(report.checks.iter().all(|c| c.verdict == Verdict::Skipped));
        assert_eq!(report.branch_counts.wigner, 2);
        assert_eq!(report.branch_counts.css, 2);
        assert_eq!(report.branch_counts.equidistants, vec![(0.45, 3)]);
        assert_eq!(report.branch_counts.verdict, Verdict::Pass);
    }

    #[test]
    fn cusps_satisfy_condition() {
        let r = rosette(1, 10.0, &[(2, 0.3, 0.1), (3, 0.5, -0.2), (5, 0.05, 0.1)]);
        for branch in wigner_branches(&r)
            .iter()
            .chain(equidistant_branches(&r, 0.2).unwrap().iter())
        {
            let report = find_cusps(branch).unwrap();
            for &t in &report.cusp_parameters {
                assert!(branch.cusp_condition(t).abs() < 1e-9 * r.max_radius_of_curvature());
            }
            assert!(report.cusp_parameters.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
