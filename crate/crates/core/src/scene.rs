//! String-art scenes: families of lines built from a curve, clipped to a
//! window and written as layered SVG.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::generic_curves::ParametricCurve;
use crate::geom::{Rect, Vec2};
use crate::supportfn::{tangent_direction, RosetteCurve};

/// Samples per curve for the automatic window and for overlay strokes.
pub const CURVE_SAMPLES: usize = 4096;
pub const DEFAULT_MARGIN: f64 = 0.05;

const DEGENERATE_CHORD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("scene has nothing to draw")]
    EmptyScene,
    #[error("family {family}: unknown curve '{id}'")]
    UnknownCurveReference { family: usize, id: String },
    #[error("overlay {overlay}: unknown curve '{id}'")]
    UnknownOverlayReference { overlay: usize, id: String },
    #[error("duplicate curve id '{0}'")]
    DuplicateCurveId(String),
    #[error("family {family}: {reason}")]
    InvalidFamily { family: usize, reason: String },
    #[error("invalid canvas: {0}")]
    InvalidCanvas(String),
    #[error("invalid color '{0}': expected #RRGGBB")]
    InvalidColor(String),
}

/// 8-bit RGB color, written as `#RRGGBB`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const BLACK: Rgb = Rgb([0, 0, 0]);
    pub const WHITE: Rgb = Rgb([255, 255, 255]);
}

impl FromStr for Rgb {
    type Err = SceneError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SceneError::InvalidColor(s.to_string());
        let hex = s.strip_prefix('#').ok_or_else(bad)?;
        if hex.len() != 6 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(bad());
        }
        let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
        Ok(Rgb([channel(0)?, channel(2)?, channel(4)?]))
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [r, g, b] = self.0;
        write!(f, "#{r:02X}{g:02X}{b:02X}")
    }
}

impl Serialize for Rgb {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Infinite line through `point` with unit `direction`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Line {
    pub point: Vec2,
    pub direction: Vec2,
}

impl Line {
    pub fn distance_to(&self, p: Vec2) -> f64 {
        self.direction.cross(p - self.point).abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub start: Vec2,
    pub end: Vec2,
}

/// Intersection of an infinite line with a rectangle (Liang–Barsky).
pub fn clip_line(line: &Line, window: &Rect) -> Option<Segment> {
    let (p, d) = (line.point, line.direction);
    let mut enter = f64::NEG_INFINITY;
    let mut exit = f64::INFINITY;
    for (origin, delta, lo, hi) in [
        (p.x, d.x, window.min.x, window.max.x),
        (p.y, d.y, window.min.y, window.max.y),
    ] {
        if delta == 0.0 {
            if origin < lo || origin > hi {
                return None;
            }
            continue;
        }
        let (a, b) = ((lo - origin) / delta, (hi - origin) / delta);
        enter = enter.max(a.min(b));
        exit = exit.min(a.max(b));
    }
    if enter > exit || !enter.is_finite() || !exit.is_finite() {
        return None;
    }
    let clamp = |q: Vec2| {
        Vec2::new(
            q.x.clamp(window.min.x, window.max.x),
            q.y.clamp(window.min.y, window.max.y),
        )
    };
    Some(Segment {
        start: clamp(p + d * enter),
        end: clamp(p + d * exit),
    })
}

#[derive(Clone, Debug)]
pub enum CurveGeometry {
    Rosette(Arc<RosetteCurve>),
    Parametric(Arc<ParametricCurve>),
}

#[derive(Clone, Debug)]
pub struct SceneCurve {
    pub id: String,
    pub geometry: CurveGeometry,
}

impl SceneCurve {
    /// Samples along one full traversal, both ends included.
    pub fn outline(&self, count: usize) -> Vec<Vec2> {
        match &self.geometry {
            CurveGeometry::Rosette(c) => {
                let step = c.period() / count as f64;
                (0..=count).map(|i| c.point(step * i as f64)).collect()
            }
            CurveGeometry::Parametric(c) => c.sample(count),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    CurveTangents,
    AffineChords,
    EquidistantTangents,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineFamily {
    pub source: String,
    pub kind: FamilyKind,
    pub pair_offset: Option<u32>,
    pub lambda: Option<f64>,
    pub param_range: (f64, f64),
    pub step: f64,
    pub color: Rgb,
    pub opacity: f64,
    pub stroke_width: f64,
}

impl LineFamily {
    /// `floor((end − start)/step) + 1`, with a relative slack of 1e−9 steps so
    /// that ranges meant as whole multiples of `step` keep their last sample.
    pub fn sample_count(&self) -> usize {
        let (start, end) = self.param_range;
        ((end - start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn parameters(&self) -> impl Iterator<Item = f64> + '_ {
        let start = self.param_range.0;
        (0..self.sample_count()).map(move |i| start + self.step * i as f64)
    }

    fn check(&self, family: usize) -> Result<(), SceneError> {
        let invalid = |reason: &str| {
            Err(SceneError::InvalidFamily {
                family,
                reason: reason.to_string(),
            })
        };
        let (start, end) = self.param_range;
        if !(start.is_finite() && end.is_finite() && end >= start) {
            return invalid("param_range must be finite with start <= end");
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return invalid("step must be positive");
        }
        if !(0.0..=1.0).contains(&self.opacity) {
            return invalid("opacity must lie in [0, 1]");
        }
        if !(self.stroke_width.is_finite() && self.stroke_width > 0.0) {
            return invalid("stroke_width must be positive");
        }
        match self.kind {
            FamilyKind::CurveTangents if self.lambda.is_some() || self.pair_offset.is_some() => {
                invalid("curve_tangents takes no lambda or pair_offset")
            }
            FamilyKind::AffineChords if self.lambda.is_some() => {
                invalid("affine_chords takes no lambda")
            }
            FamilyKind::EquidistantTangents if self.lambda.is_none() => {
                invalid("equidistant_tangents requires lambda")
            }
            _ if self.pair_offset == Some(0) => invalid("pair_offset must be positive"),
            _ if self.lambda.is_some_and(|l| !l.is_finite()) => invalid("lambda must be finite"),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Overlay {
    pub curve: String,
    pub color: Rgb,
    pub opacity: f64,
    pub stroke_width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldWindow {
    Auto,
    Fixed(Rect),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
    pub background: Rgb,
    pub world_window: WorldWindow,
    pub margin: f64,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            width: 1000,
            height: 1000,
            background: Rgb::WHITE,
            world_window: WorldWindow::Auto,
            margin: DEFAULT_MARGIN,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scene {
    pub canvas: Canvas,
    pub curves: Vec<SceneCurve>,
    pub families: Vec<LineFamily>,
    pub overlays: Vec<Overlay>,
}

impl Scene {
    /// Checks canvas, families and curve references.
    pub fn validate(&self) -> Result<(), SceneError> {
        let c = &self.canvas;
        if c.width == 0 || c.height == 0 {
            return Err(SceneError::InvalidCanvas(
                "width and height must be positive".into(),
            ));
        }
        if !(c.margin.is_finite() && c.margin >= 0.0) {
            return Err(SceneError::InvalidCanvas(
                "margin must be non-negative".into(),
            ));
        }
        if let WorldWindow::Fixed(r) = c.world_window {
            if !(r.width() > 0.0 && r.height() > 0.0 && r.min.is_finite() && r.max.is_finite()) {
                return Err(SceneError::InvalidCanvas(
                    "world window must have positive area".into(),
                ));
            }
        }
        let mut seen = HashMap::new();
        for curve in &self.curves {
            if seen.insert(curve.id.as_str(), ()).is_some() {
                return Err(SceneError::DuplicateCurveId(curve.id.clone()));
            }
        }
        for (index, family) in self.families.iter().enumerate() {
            family.check(index)?;
            let curve =
                self.curve(&family.source)
                    .ok_or_else(|| SceneError::UnknownCurveReference {
                        family: index,
                        id: family.source.clone(),
                    })?;
            if family.kind != FamilyKind::CurveTangents
                && matches!(curve.geometry, CurveGeometry::Parametric(_))
            {
                return Err(SceneError::InvalidFamily {
                    family: index,
                    reason: "chords and equidistant tangents need a support-function curve".into(),
                });
            }
        }
        for (index, overlay) in self.overlays.iter().enumerate() {
            if self.curve(&overlay.curve).is_none() {
                return Err(SceneError::UnknownOverlayReference {
                    overlay: index,
                    id: overlay.curve.clone(),
                });
            }
            if !(0.0..=1.0).contains(&overlay.opacity)
                || overlay.stroke_width.is_nan()
                || overlay.stroke_width <= 0.0
            {
                return Err(SceneError::InvalidCanvas(format!(
                    "overlay {index}: bad opacity or stroke width"
                )));
            }
        }
        Ok(())
    }

    pub fn curve(&self, id: &str) -> Option<&SceneCurve> {
        self.curves.iter().find(|c| c.id == id)
    }

    /// The configured window, or the margin-expanded bounding box of all curves.
    pub fn world_window(&self) -> Result<Rect, SceneError> {
        match self.canvas.world_window {
            WorldWindow::Fixed(r) => Ok(r),
            WorldWindow::Auto => {
                let bounds = self
                    .curves
                    .iter()
                    .filter_map(|c| Rect::bounding(c.outline(CURVE_SAMPLES)))
                    .reduce(|a, b| a.union(&b))
                    .ok_or(SceneError::EmptyScene)?;
                let framed = bounds.scaled_about_center(1.0 + self.canvas.margin);
                if framed.width() > 0.0 || framed.height() > 0.0 {
                    Ok(framed)
                } else {
                    Err(SceneError::InvalidCanvas("curves have zero extent".into()))
                }
            }
        }
    }
}

/// Lines of one family plus the number of samples skipped as degenerate chords.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyLines {
    pub lines: Vec<Line>,
    pub skipped: usize,
}

pub fn family_lines(scene: &Scene, index: usize) -> Result<FamilyLines, SceneError> {
    let family = scene.families.get(index).ok_or(SceneError::InvalidFamily {
        family: index,
        reason: "no such family".into(),
    })?;
    family.check(index)?;
    let curve = scene
        .curve(&family.source)
        .ok_or_else(|| SceneError::UnknownCurveReference {
            family: index,
            id: family.source.clone(),
        })?;

    let k = f64::from(family.pair_offset.unwrap_or(1));
    let mut lines = Vec::with_capacity(family.sample_count());
    let mut skipped = 0;
    match (&curve.geometry, family.kind) {
        (CurveGeometry::Parametric(c), FamilyKind::CurveTangents) => {
            for t in family.parameters() {
                match c.velocity(t).normalized() {
                    Some(direction) => lines.push(Line {
                        point: c.point(t),
                        direction,
                    }),
                    None => skipped += 1,
                }
            }
        }
        (CurveGeometry::Parametric(_), _) => {
            return Err(SceneError::InvalidFamily {
                family: index,
                reason: "chords and equidistant tangents need a support-function curve".into(),
            })
        }
        (CurveGeometry::Rosette(c), FamilyKind::CurveTangents) => {
            lines.extend(family.parameters().map(|t| Line {
                point: c.point(t),
                direction: tangent_direction(t),
            }));
        }
        (CurveGeometry::Rosette(c), FamilyKind::AffineChords) => {
            for t in family.parameters() {
                let (a, b) = (c.point(t), c.point(t + k * PI));
                let chord = b - a;
                if chord.length() < DEGENERATE_CHORD {
                    skipped += 1;
                    continue;
                }
                lines.push(Line {
                    point: a,
                    direction: chord * (1.0 / chord.length()),
                });
            }
        }
        (CurveGeometry::Rosette(c), FamilyKind::EquidistantTangents) => {
            let lambda = family.lambda.expect("checked above");
            lines.extend(family.parameters().map(|t| Line {
                point: c.point(t) * lambda + c.point(t + k * PI) * (1.0 - lambda),
                direction: tangent_direction(t),
            }));
        }
    }
    Ok(FamilyLines { lines, skipped })
}

/// Uniform world-to-canvas map with the window centred and y pointing up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    width: f64,
    height: f64,
    center: Vec2,
    scale: f64,
}

impl Viewport {
    pub fn new(canvas: &Canvas, window: Rect) -> Self {
        let (width, height) = (f64::from(canvas.width), f64::from(canvas.height));
        let scale = (width / window.width()).min(height / window.height());
        Viewport {
            width,
            height,
            center: window.center(),
            scale,
        }
    }

    pub fn to_canvas(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            0.5 * self.width + self.scale * (p.x - self.center.x),
            0.5 * self.height - self.scale * (p.y - self.center.y),
        )
    }

    /// The world rectangle that fills the whole canvas.
    pub fn visible(&self) -> Rect {
        let hw = 0.5 * self.width / self.scale;
        let hh = 0.5 * self.height / self.scale;
        Rect::new(
            Vec2::new(self.center.x - hw, self.center.y - hh),
            Vec2::new(self.center.x + hw, self.center.y + hh),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub index: usize,
    pub source: String,
    pub kind: FamilyKind,
    pub color: Rgb,
    pub opacity: f64,
    /// Sampled parameters.
    pub samples: usize,
    /// Lines generated (samples minus skipped).
    pub lines: usize,
    /// Degenerate chords.
    pub skipped: usize,
    /// Lines missing the window.
    pub outside: usize,
    pub segments: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenderReport {
    pub width: u32,
    pub height: u32,
    /// Window as configured or computed.
    pub world_window: Rect,
    /// Window actually covering the canvas after aspect correction.
    pub visible_window: Rect,
    pub families: Vec<FamilyReport>,
    pub overlays: usize,
}

/// Fixed three-decimal formatting (ties to even) without negative zero.
pub fn format_coord(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn push_point(out: &mut String, p: Vec2) {
    out.push_str(&format_coord(p.x));
    out.push(' ');
    out.push_str(&format_coord(p.y));
}

fn group_open(out: &mut String, color: Rgb, opacity: f64, width: f64) {
    let _ = writeln!(
        out,
        r#"<g fill="none" stroke="{color}" stroke-opacity="{opacity}" stroke-width="{width}">"#
    );
}

/// Renders the scene. Output depends only on the scene, not on thread count.
pub fn render_svg(scene: &Scene) -> Result<(String, RenderReport), SceneError> {
    if scene.families.is_empty() && scene.overlays.is_empty() {
        return Err(SceneError::EmptyScene);
    }
    scene.validate()?;
    let world_window = scene.world_window()?;
    let viewport = Viewport::new(&scene.canvas, world_window);
    let visible = viewport.visible();

    let rendered: Vec<Result<(String, FamilyReport), SceneError>> = (0..scene.families.len())
        .into_par_iter()
        .map(|index| {
            let family = &scene.families[index];
            let FamilyLines { lines, skipped } = family_lines(scene, index)?;
            let mut body = String::new();
            group_open(&mut body, family.color, family.opacity, family.stroke_width);
            let mut segments = 0;
            for line in &lines {
                if let Some(seg) = clip_line(line, &visible) {
                    body.push_str(r#"<path d="M"#);
                    push_point(&mut body, viewport.to_canvas(seg.start));
                    body.push_str(" L");
                    push_point(&mut body, viewport.to_canvas(seg.end));
                    body.push_str("\"/>\n");
                    segments += 1;
                }
            }
            body.push_str("</g>\n");
            let report = FamilyReport {
                index,
                source: family.source.clone(),
                kind: family.kind,
                color: family.color,
                opacity: family.opacity,
                samples: family.sample_count(),
                lines: lines.len(),
                skipped,
                outside: lines.len() - segments,
                segments,
            };
            Ok((body, report))
        })
        .collect();

    let (w, h) = (scene.canvas.width, scene.canvas.height);
    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{w}" height="{h}" fill="{}"/>"#,
        scene.canvas.background
    );

    let mut families = Vec::with_capacity(rendered.len());
    for item in rendered {
        let (body, report) = item?;
        svg.push_str(&body);
        families.push(report);
    }

    for overlay in &scene.overlays {
        let curve = scene.curve(&overlay.curve).expect("validated");
        group_open(
            &mut svg,
            overlay.color,
            overlay.opacity,
            overlay.stroke_width,
        );
        svg.push_str(r#"<polyline points=""#);
        for (i, p) in curve.outline(CURVE_SAMPLES).into_iter().enumerate() {
            if i > 0 {
                svg.push(' ');
            }
            let q = viewport.to_canvas(p);
            svg.push_str(&format_coord(q.x));
            svg.push(',');
            svg.push_str(&format_coord(q.y));
        }
        svg.push_str("\"/>\n</g>\n");
    }
    svg.push_str("</svg>\n");

    let report = RenderReport {
        width: w,
        height: h,
        world_window,
        visible_window: visible,
        families,
        overlays: scene.overlays.len(),
    };
    Ok((svg, report))
}
