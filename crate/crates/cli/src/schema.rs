//! Scene file format (JSON, schema version 1) and its conversion to a
//! [`Scene`].

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use caustica::geom::{Rect, Vec2};
use caustica::{
    Canvas, CurveGeometry, FamilyKind, FourierSeries, FourierTerm, LineFamily, Overlay,
    ParametricCurve, Rgb, RosetteCurve, Scene, SceneCurve, SceneError, SupportFnError,
    TrigSupportFunction, TrigTerm, WorldWindow,
};
use serde::Deserialize;

use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_LAMBDAS: [f64; 3] = [0.2, 0.3, 0.45];
pub const DEFAULT_GRID: usize = 1024;

/// A problem in a scene file, located by field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Diagnostic {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

fn default_width() -> u32 {
    1000
}

fn default_background() -> String {
    "#FFFFFF".into()
}

fn default_margin() -> Scalar {
    Scalar(caustica::scene::DEFAULT_MARGIN)
}

fn default_one() -> Scalar {
    Scalar(1.0)
}

fn default_stroke() -> Scalar {
    Scalar(0.5)
}

fn default_step() -> Scalar {
    Scalar(0.01)
}

fn default_rotation() -> u32 {
    1
}

fn zero() -> Scalar {
    Scalar(0.0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub schema_version: u32,
    #[serde(default)]
    pub canvas: CanvasDecl,
    pub curves: Vec<CurveDecl>,
    #[serde(default)]
    pub families: Vec<FamilyDecl>,
    #[serde(default)]
    pub overlays: Vec<OverlayDecl>,
    #[serde(default)]
    pub analysis: AnalysisDecl,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanvasDecl {
    #[serde(default = "default_width")]
    pub width: u32,
    #[serde(default = "default_width")]
    pub height: u32,
    #[serde(default = "default_background")]
    pub background: String,
    #[serde(default)]
    pub world_window: WindowDecl,
    #[serde(default = "default_margin")]
    pub margin: Scalar,
}

impl Default for CanvasDecl {
    fn default() -> Self {
        CanvasDecl {
            width: default_width(),
            height: default_width(),
            background: default_background(),
            world_window: WindowDecl::default(),
            margin: default_margin(),
        }
    }
}

/// `"auto"` or `[xmin, ymin, xmax, ymax]`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum WindowDecl {
    Keyword(String),
    Bounds([Scalar; 4]),
}

impl Default for WindowDecl {
    fn default() -> Self {
        WindowDecl::Keyword("auto".into())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDecl {
    pub j: u32,
    #[serde(default = "zero")]
    pub cos: Scalar,
    #[serde(default = "zero")]
    pub sin: Scalar,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportDecl {
    #[serde(default = "default_rotation")]
    pub n: u32,
    #[serde(rename = "const")]
    pub constant: Scalar,
    #[serde(default)]
    pub terms: Vec<TermDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametricDecl {
    pub x_terms: Option<Vec<TermDecl>>,
    pub y_terms: Option<Vec<TermDecl>>,
    pub samples: Option<Vec<[Scalar; 2]>>,
    pub t_range: Option<[Scalar; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDecl {
    pub id: String,
    pub support: Option<SupportDecl>,
    pub parametric: Option<ParametricDecl>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKindDecl {
    CurveTangents,
    AffineChords,
    EquidistantTangents,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDecl {
    pub source: String,
    pub kind: FamilyKindDecl,
    pub pair_offset: Option<u32>,
    pub lambda: Option<Scalar>,
    pub param_range: Option<[Scalar; 2]>,
    #[serde(default = "default_step")]
    pub step: Scalar,
    pub color: String,
    #[serde(default = "default_one")]
    pub opacity: Scalar,
    #[serde(default = "default_stroke")]
    pub stroke_width: Scalar,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlayDecl {
    pub curve: String,
    pub color: String,
    #[serde(default = "default_one")]
    pub opacity: Scalar,
    #[serde(default = "default_one")]
    pub stroke_width: Scalar,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisDecl {
    pub lambdas: Option<Vec<Scalar>>,
    pub grid: Option<usize>,
}

/// Analysis settings after defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub lambdas: Vec<f64>,
    pub grid: usize,
}

#[derive(Clone, Debug)]
pub struct LoadedScene {
    pub scene: Scene,
    pub analysis: AnalysisOptions,
}

/// Parses JSON, reporting the field path of the first error.
pub fn parse_scene_file(bytes: &[u8]) -> Result<SceneFile, Diagnostic> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let file: SceneFile = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        Diagnostic::new(path, err.into_inner())
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Diagnostic::new(
            "schema_version",
            format!(
                "unsupported schema version {}, expected {SCHEMA_VERSION}",
                file.schema_version
            ),
        ));
    }
    Ok(file)
}

fn color(path: String, text: &str, out: &mut Vec<Diagnostic>) -> Rgb {
    text.parse().unwrap_or_else(|e: SceneError| {
        out.push(Diagnostic::new(path, e));
        Rgb::BLACK
    })
}

fn support_error_path(base: &str, err: &SupportFnError) -> String {
    match err {
        SupportFnError::ZeroFrequency { index } => format!("{base}.terms[{index}].j"),
        SupportFnError::InvalidRotationNumber | SupportFnError::NonMinimalPeriod { .. } => {
            format!("{base}.n")
        }
        _ => base.to_string(),
    }
}

fn build_curve(index: usize, decl: &CurveDecl, out: &mut Vec<Diagnostic>) -> Option<SceneCurve> {
    let base = format!("curves[{index}]");
    let geometry = match (&decl.support, &decl.parametric) {
        (Some(s), None) => {
            let path = format!("{base}.support");
            let terms = s
                .terms
                .iter()
                .map(|t| TrigTerm::new(t.j, t.cos.0, t.sin.0))
                .collect();
            let curve =
                TrigSupportFunction::new(s.n, s.constant.0, terms).and_then(RosetteCurve::new);
            match curve {
                Ok(c) => CurveGeometry::Rosette(Arc::new(c)),
                Err(e) => {
                    out.push(Diagnostic::new(support_error_path(&path, &e), e));
                    return None;
                }
            }
        }
        (None, Some(p)) => {
            let path = format!("{base}.parametric");
            let curve = match (&p.x_terms, &p.y_terms, &p.samples, &p.t_range) {
                (Some(x), Some(y), None, None) => {
                    let series = |terms: &[TermDecl]| {
                        FourierSeries::new(
                            terms
                                .iter()
                                .map(|t| FourierTerm::new(t.j, t.cos.0, t.sin.0)),
                        )
                    };
                    series(x).and_then(|x| Ok(ParametricCurve::closed(x, series(y)?)))
                }
                (None, None, Some(samples), Some([a, b])) => {
                    let points: Vec<Vec2> =
                        samples.iter().map(|[x, y]| Vec2::new(x.0, y.0)).collect();
                    ParametricCurve::open(&points, (a.0, b.0))
                }
                _ => {
                    out.push(Diagnostic::new(
                        path,
                        "give either x_terms and y_terms, or samples and t_range",
                    ));
                    return None;
                }
            };
            match curve {
                Ok(c) if c.is_regular() => CurveGeometry::Parametric(Arc::new(c)),
                Ok(c) => {
                    out.push(Diagnostic::new(
                        path,
                        format!("curve is not regular (diameter {:e})", c.diameter()),
                    ));
                    return None;
                }
                Err(e) => {
                    out.push(Diagnostic::new(path, e));
                    return None;
                }
            }
        }
        _ => {
            out.push(Diagnostic::new(
                base,
                "a curve needs exactly one of 'support' or 'parametric'",
            ));
            return None;
        }
    };
    Some(SceneCurve {
        id: decl.id.clone(),
        geometry,
    })
}

fn default_range(curve: Option<&SceneCurve>) -> (f64, f64) {
    match curve.map(|c| &c.geometry) {
        Some(CurveGeometry::Rosette(r)) => (0.0, r.period()),
        Some(CurveGeometry::Parametric(p)) => p.domain(),
        None => (0.0, TAU),
    }
}

impl SceneFile {
    /// Builds curves (checking rosette validity and regularity), families
    /// and overlays, collecting every problem found.
    pub fn build(&self) -> Result<LoadedScene, Vec<Diagnostic>> {
        let mut out = Vec::new();

        let c = &self.canvas;
        let world_window = match &c.world_window {
            WindowDecl::Keyword(k) if k == "auto" => WorldWindow::Auto,
            WindowDecl::Keyword(k) => {
                out.push(Diagnostic::new(
                    "canvas.world_window",
                    format!("expected \"auto\" or 4 numbers, got \"{k}\""),
                ));
                WorldWindow::Auto
            }
            WindowDecl::Bounds([x0, y0, x1, y1]) => {
                WorldWindow::Fixed(Rect::new(Vec2::new(x0.0, y0.0), Vec2::new(x1.0, y1.0)))
            }
        };
        let canvas = Canvas {
            width: c.width,
            height: c.height,
            background: color("canvas.background".into(), &c.background, &mut out),
            world_window,
            margin: c.margin.0,
        };

        let curves: Vec<SceneCurve> = self
            .curves
            .iter()
            .enumerate()
            .filter_map(|(i, d)| build_curve(i, d, &mut out))
            .collect();
        let curves_ok = curves.len() == self.curves.len();

        let families = self
            .families
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let curve = curves.iter().find(|c| c.id == f.source);
                let (start, end) = f
                    .param_range
                    .map_or_else(|| default_range(curve), |[a, b]| (a.0, b.0));
                LineFamily {
                    source: f.source.clone(),
                    kind: match f.kind {
                        FamilyKindDecl::CurveTangents => FamilyKind::CurveTangents,
                        FamilyKindDecl::AffineChords => FamilyKind::AffineChords,
                        FamilyKindDecl::EquidistantTangents => FamilyKind::EquidistantTangents,
                    },
                    pair_offset: f.pair_offset,
                    lambda: f.lambda.map(|l| l.0),
                    param_range: (start, end),
                    step: f.step.0,
                    color: color(format!("families[{i}].color"), &f.color, &mut out),
                    opacity: f.opacity.0,
                    stroke_width: f.stroke_width.0,
                }
            })
            .collect();

        let overlays = self
            .overlays
            .iter()
            .enumerate()
            .map(|(i, o)| Overlay {
                curve: o.curve.clone(),
                color: color(format!("overlays[{i}].color"), &o.color, &mut out),
                opacity: o.opacity.0,
                stroke_width: o.stroke_width.0,
            })
            .collect();

        let lambdas: Vec<f64> = match &self.analysis.lambdas {
            Some(ls) => ls.iter().map(|l| l.0).collect(),
            None => DEFAULT_LAMBDAS.to_vec(),
        };
        for (i, l) in lambdas.iter().enumerate() {
            if let Err(msg) = check_lambda(*l) {
                out.push(Diagnostic::new(format!("analysis.lambdas[{i}]"), msg));
            }
        }
        let grid = self.analysis.grid.unwrap_or(DEFAULT_GRID);
        if grid < caustica::generic_curves::MIN_PAIR_GRID {
            out.push(Diagnostic::new(
                "analysis.grid",
                format!(
                    "grid must be at least {}",
                    caustica::generic_curves::MIN_PAIR_GRID
                ),
            ));
        }

        let scene = Scene {
            canvas,
            curves,
            families,
            overlays,
        };
        // Reference errors are only meaningful once every curve was built.
        if curves_ok {
            if let Err(e) = scene.validate() {
                out.push(scene_error_diagnostic(&e));
            }
        }
        if out.is_empty() {
            Ok(LoadedScene {
                scene,
                analysis: AnalysisOptions { lambdas, grid },
            })
        } else {
            Err(out)
        }
    }
}

pub fn check_lambda(lambda: f64) -> Result<(), String> {
    if lambda > 0.0 && lambda < 1.0 && lambda != 0.5 {
        Ok(())
    } else {
        Err(format!(
            "lambda {lambda} must lie in (0, 1) and differ from 0.5"
        ))
    }
}

pub fn scene_error_diagnostic(err: &SceneError) -> Diagnostic {
    let path = match err {
        SceneError::UnknownCurveReference { family, .. } => format!("families[{family}].source"),
        SceneError::InvalidFamily { family, .. } => format!("families[{family}]"),
        SceneError::UnknownOverlayReference { overlay, .. } => format!("overlays[{overlay}].curve"),
        SceneError::DuplicateCurveId(_) => "curves".into(),
        SceneError::InvalidCanvas(_) | SceneError::InvalidColor(_) => "canvas".into(),
        SceneError::EmptyScene => String::new(),
    };
    Diagnostic::new(path, err)
}

/// Parses and builds in one step.
pub fn load_scene(bytes: &[u8]) -> Result<LoadedScene, Vec<Diagnostic>> {
    parse_scene_file(bytes).map_err(|d| vec![d])?.build()
}
