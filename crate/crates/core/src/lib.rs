//! Wigner caustics, affine λ-equidistants and Centre Symmetry Sets of planar
//! curves, their cusps, and string-art renderings of the line families whose
//! envelopes they are.

pub mod equidistants;
pub mod generic_curves;
pub mod geom;
pub mod roots;
pub mod scene;
pub mod singular;
pub mod supportfn;

pub use equidistants::{
    css_branches, css_structure, equidistant_branches, equidistant_point, wigner_branches, Branch,
    BranchId, BranchKind, BranchSet, CssDegeneracy, CssStructure, EquidistantError, ParamDomain,
};
pub use generic_curves::{
    classify_loop, detect_chain_singularities, equidistant_cloud, find_parallel_pairs,
    tangent_angle_lift, Chain, CubicSpline, FourierSeries, FourierTerm, GenericCurveError,
    LoopClass, LoopSegment, PairOrientation, ParallelPair, ParametricCurve,
};
pub use geom::{Rect, Vec2};
pub use scene::{
    clip_line, family_lines, render_svg, Canvas, CurveGeometry, FamilyKind, LineFamily, Overlay,
    RenderReport, Rgb, Scene, SceneCurve, SceneError, WorldWindow,
};
pub use singular::{
    check_theorems, cusp_condition, find_css_cusps, find_cusps, BranchCusps, CuspReport, Parity,
    SingularError, TheoremReport, Verdict,
};
pub use supportfn::{
    ConvexityVerdict, CurvePoint, RosetteCurve, RosetteValidity, SupportFnError,
    TrigSupportFunction, TrigTerm,
};
