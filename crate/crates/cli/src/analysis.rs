//! The `analyze` report.

use std::sync::Arc;

use caustica::equidistants::CssDegeneracy;
use caustica::geom::Vec2;
use caustica::{
    check_theorems, classify_loop, css_branches, css_structure, detect_chain_singularities,
    equidistant_branches, equidistant_cloud, find_parallel_pairs, tangent_angle_lift,
    wigner_branches, Branch, BranchKind, CurveGeometry, LoopClass, LoopSegment, ParametricCurve,
    RosetteCurve, TheoremReport,
};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::schema::{AnalysisOptions, LoadedScene};

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
    pub lambdas: Vec<f64>,
    pub grid: usize,
    pub curves: Vec<CurveAnalysis>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurveAnalysis {
    Support(SupportAnalysis),
    Parametric(ParametricAnalysis),
}

#[derive(Debug, Serialize)]
pub struct SupportAnalysis {
    pub id: String,
    pub rotation_number: u32,
    pub min_radius_of_curvature: f64,
    pub theta_at_min: f64,
    pub branches: Vec<BranchEntry>,
    pub css_poles: Vec<CssEntry>,
    pub theorems: TheoremReport,
}

#[derive(Debug, Serialize)]
pub struct BranchEntry {
    pub kind: BranchKind,
    pub index: u32,
    pub pair_offset: u32,
    pub lambda: Option<f64>,
    pub weight: f64,
    pub domain: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct CssEntry {
    pub index: u32,
    pub degenerate: Option<CssDegeneracy>,
    pub poles: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct ParametricAnalysis {
    pub id: String,
    pub closed: bool,
    pub rotation_index: Option<f64>,
    pub loop_class: Option<LoopClass>,
    pub loop_defect: Option<String>,
    pub parallel_pairs: usize,
    pub wigner_chains: Vec<ChainEntry>,
}

#[derive(Debug, Serialize)]
pub struct ChainEntry {
    pub level: i64,
    pub points: usize,
    pub t1_range: [f64; 2],
    pub singular_points: Option<Vec<SingularPoint>>,
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SingularPoint {
    pub index: usize,
    pub t1: f64,
    pub position: Vec2,
}

fn branch_entry(b: &Branch) -> BranchEntry {
    let d = b.domain();
    BranchEntry {
        kind: b.kind(),
        index: b.index(),
        pair_offset: b.pair_offset(),
        lambda: b.lambda(),
        weight: b.weight(),
        domain: [d.start, d.end],
    }
}

fn analyze_support(
    id: &str,
    curve: &Arc<RosetteCurve>,
    options: &AnalysisOptions,
) -> SupportAnalysis {
    let mut branches: Vec<BranchEntry> = wigner_branches(curve).iter().map(branch_entry).collect();
    for &lambda in &options.lambdas {
        if let Ok(set) = equidistant_branches(curve, lambda) {
            branches.extend(set.iter().map(branch_entry));
        }
    }
    let css = css_branches(curve);
    branches.extend(css.iter().map(branch_entry));
    let css_poles = css
        .iter()
        .map(|b| {
            let s = css_structure(b);
            CssEntry {
                index: b.index(),
                degenerate: s.degenerate,
                poles: s.poles,
            }
        })
        .collect();
    let validity = curve.validity();
    SupportAnalysis {
        id: id.to_string(),
        rotation_number: curve.rotation_number(),
        min_radius_of_curvature: validity.min_radius_of_curvature,
        theta_at_min: validity.theta_at_min,
        branches,
        css_poles,
        theorems: check_theorems(curve, &options.lambdas),
    }
}

fn analyze_parametric(
    id: &str,
    curve: &ParametricCurve,
    options: &AnalysisOptions,
) -> ParametricAnalysis {
    let rotation_index = tangent_angle_lift(curve).ok().map(|l| l.rotation_index());
    let (loop_class, loop_defect) = if curve.is_closed() {
        (None, None)
    } else {
        match LoopSegment::new(curve.clone()) {
            Ok(l) => (Some(classify_loop(&l)), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let pairs = find_parallel_pairs(curve, options.grid).unwrap_or_default();
    let wigner_chains = equidistant_cloud(curve, &pairs, 0.5)
        .into_iter()
        .map(|chain| {
            let (singular_points, note) = match detect_chain_singularities(&chain) {
                Ok(idx) => (
                    Some(
                        idx.into_iter()
                            .map(|i| SingularPoint {
                                index: i,
                                t1: chain.t1[i],
                                position: chain.points[i],
                            })
                            .collect(),
                    ),
                    None,
                ),
                Err(e) => (None, Some(e.to_string())),
            };
            ChainEntry {
                level: chain.level,
                points: chain.len(),
                t1_range: [chain.t1[0], chain.t1[chain.len() - 1]],
                singular_points,
                note,
            }
        })
        .collect();
    ParametricAnalysis {
        id: id.to_string(),
        closed: curve.is_closed(),
        rotation_index,
        loop_class,
        loop_defect,
        parallel_pairs: pairs.len(),
        wigner_chains,
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Analyses every curve of the scene; curves are processed in parallel and
/// reported in file order.
pub fn analyze(loaded: &LoadedScene, input: &[u8]) -> AnalysisReport {
    let options = &loaded.analysis;
    let curves = loaded
        .scene
        .curves
        .par_iter()
        .map(|c| match &c.geometry {
            CurveGeometry::Rosette(r) => CurveAnalysis::Support(analyze_support(&c.id, r, options)),
            CurveGeometry::Parametric(p) => {
                CurveAnalysis::Parametric(analyze_parametric(&c.id, p, options))
            }
        })
        .collect();
    AnalysisReport {
        tool: "caustica",
        version: env!("CARGO_PKG_VERSION"),
        input_sha256: sha256_hex(input),
        lambdas: options.lambdas.clone(),
        grid: options.grid,
        curves,
    }
}
