mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use caustica::scene::{
    Canvas, CurveGeometry, FamilyKind, LineFamily, Rgb, Scene, SceneCurve, Viewport,
};
use caustica::singular::Verdict;
use caustica::{
    check_theorems, clip_line, css_branches, equidistant_branches, equidistant_cloud,
    equidistant_point, family_lines, find_css_cusps, find_cusps, find_parallel_pairs, render_svg,
    wigner_branches, BranchKind, PairOrientation, ParametricCurve, RosetteCurve,
};
use common::{arb_oval, arb_rosette, same_mod};
use proptest::prelude::*;

fn cusp_parameters(curve: &Arc<RosetteCurve>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = wigner_branches(curve)
        .iter()
        .map(|b| find_cusps(b).unwrap().cusp_parameters)
        .collect();
    out.extend(
        equidistant_branches(curve, 0.3)
            .unwrap()
            .iter()
            .map(|b| find_cusps(b).unwrap().cusp_parameters),
    );
    out.extend(css_branches(curve).iter().map(|b| {
        find_css_cusps(b)
            .map(|r| r.cusp_parameters)
            .unwrap_or_default()
    }));
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn radius_of_curvature_is_speed(curve in arb_rosette(), theta in 0.0f64..20.0) {
        let v = curve.support().velocity(theta);
        prop_assert!((v.length() - curve.rho(theta)).abs() < 1e-9 * curve.max_radius_of_curvature());
    }

    #[test]
    fn equidistant_is_symmetric_in_lambda(curve in arb_rosette(), theta in 0.0f64..20.0, lambda in 0.01f64..0.99) {
        let n = curve.rotation_number();
        for k in 1..=n {
            let a = equidistant_point(&curve, theta, k, lambda);
            let b = equidistant_point(&curve, theta + f64::from(k) * PI, 2 * n - k, 1.0 - lambda);
            let c = equidistant_point(&curve, theta + f64::from(k) * PI, k, 1.0 - lambda);
            prop_assert!(a.distance(b) < 1e-9 * curve.diameter() || a.distance(c) < 1e-9 * curve.diameter());
        }
    }

    #[test]
    fn branch_velocity_matches_finite_difference(curve in arb_rosette(), theta in 0.0f64..20.0) {
        let h = 1e-5;
        for branch in wigner_branches(&curve).iter().chain(equidistant_branches(&curve, 0.2).unwrap().iter()) {
            let fd = (branch.point(theta + h) - branch.point(theta - h)) * (0.5 / h);
            prop_assert!(fd.distance(branch.velocity(theta)) < 1e-6 * curve.diameter());
        }
    }

    #[test]
    fn oval_cusp_parities(curve in arb_oval()) {
        let report = check_theorems(&curve, &[0.2, 0.3, 0.45]);
        for name in [
            caustica::singular::WIGNER_ODD,
            caustica::singular::CSS_ODD,
            caustica::singular::EQUIDISTANT_EVEN,
        ] {
            prop_assert_eq!(report.check(name).unwrap().verdict, Verdict::Pass, "{}", name);
        }
    }

    #[test]
    fn css_cusps_are_at_least_wigner_cusps(curve in arb_oval()) {
        // CSS cusps are the critical points of log(ρ(θ)/ρ(θ+π)); Wigner
        // caustic cusps are its zeros, and a periodic function has a critical
        // point between any two zeros.
        let report = check_theorems(&curve, &[]);
        prop_assert!(report.css_cusp_total().unwrap() >= report.wigner_cusp_total().unwrap());
    }

    #[test]
    fn cusps_are_invariant_under_rotation(curve in arb_oval(), shift in 0.0f64..(2.0 * PI)) {
        let rotated = Arc::new(RosetteCurve::new(curve.support().shifted(shift)).unwrap());
        let original = cusp_parameters(&curve);
        let moved = cusp_parameters(&rotated);
        let periods = [PI, 2.0 * PI, PI];
        for ((a, b), period) in original.iter().zip(&moved).zip(periods) {
            let back: Vec<f64> = b.iter().map(|t| t + shift).collect();
            prop_assert!(same_mod(a, &back, period, 1e-7), "{:?} vs {:?}", a, back);
        }
    }

    #[test]
    fn cusps_are_invariant_under_scaling(curve in arb_oval(), factor in 0.01f64..100.0) {
        let scaled = Arc::new(RosetteCurve::new(curve.support().scaled(factor)).unwrap());
        let periods = [PI, 2.0 * PI, PI];
        for ((a, b), period) in cusp_parameters(&curve).iter().zip(&cusp_parameters(&scaled)).zip(periods) {
            prop_assert!(same_mod(a, b, period, 1e-7), "{:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn cusp_count_does_not_depend_on_domain_start(curve in arb_rosette(), shift in 0.0f64..7.0) {
        for branch in wigner_branches(&curve).iter().chain(equidistant_branches(&curve, 0.3).unwrap().iter()) {
            let a = find_cusps(branch).unwrap();
            let b = find_cusps(&branch.with_domain_shifted(shift)).unwrap();
            prop_assert!(same_mod(&a.cusp_parameters, &b.cusp_parameters, branch.domain().length(), 1e-7));
        }
    }

    #[test]
    fn parametric_pairs_recover_support_pairs(curve in arb_rosette()) {
        let n = curve.rotation_number();
        let param = ParametricCurve::from_rosette(&curve);
        let pairs = find_parallel_pairs(&param, 1024).unwrap();
        let step = 2.0 * PI / 1024.0;
        for t1 in (0..1024).map(|i| step * f64::from(i)) {
            let mut found: Vec<f64> = pairs.iter().filter(|p| p.t1 == t1).map(|p| p.t2).collect();
            found.sort_by(f64::total_cmp);
            // θ = n·t, so partners sit at t + kπ/n inside [t, 2π).
            let expected: Vec<f64> = (1..2 * n)
                .map(|k| t1 + f64::from(k) * PI / f64::from(n))
                .filter(|&t2| t2 < 2.0 * PI - 1e-9)
                .collect();
            prop_assert_eq!(found.len(), expected.len(), "t1 = {}", t1);
            for (f, e) in found.iter().zip(&expected) {
                prop_assert!((f - e).abs() < 1e-6);
            }
        }
        for p in &pairs {
            let k = ((p.t2 - p.t1) * f64::from(n) / PI).round() as i64;
            let expect = if k % 2 == 0 { PairOrientation::Same } else { PairOrientation::Opposite };
            prop_assert_eq!(p.orientation, expect);
        }
    }

    #[test]
    fn equidistant_tangent_lines_touch_their_branch(curve in arb_rosette(), lambda in 0.05f64..0.95) {
        let scene = single_curve_scene(&curve, vec![family(FamilyKind::EquidistantTangents, Some(lambda), &curve)]);
        let lines = family_lines(&scene, 0).unwrap().lines;
        let fam = &scene.families[0];
        for (theta, line) in fam.parameters().zip(&lines) {
            let p = equidistant_point(&curve, theta, 1, lambda);
            prop_assert!(line.distance_to(p) < 1e-9 * curve.diameter());
            let branch = equidistant_branches(&curve, lambda).unwrap();
            let b = branch.iter().find(|b| b.pair_offset() == 1 && b.weight() == lambda).unwrap();
            let v = b.velocity(theta);
            if v.length() > 1e-6 * curve.diameter() {
                prop_assert!(line.direction.cross(v).abs() < 1e-9 * v.length());
            }
        }
    }

    #[test]
    fn clipped_segments_stay_in_window(curve in arb_rosette(), kind in 0usize..3) {
        let kind = [FamilyKind::CurveTangents, FamilyKind::AffineChords, FamilyKind::EquidistantTangents][kind];
        let lambda = (kind == FamilyKind::EquidistantTangents).then_some(0.3);
        let scene = single_curve_scene(&curve, vec![family(kind, lambda, &curve)]);
        let visible = Viewport::new(&scene.canvas, scene.world_window().unwrap()).visible();
        let lines = family_lines(&scene, 0).unwrap();
        prop_assert_eq!(lines.lines.len() + lines.skipped, scene.families[0].sample_count());
        for line in &lines.lines {
            if let Some(seg) = clip_line(line, &visible) {
                prop_assert!(visible.contains(seg.start, 1e-9) && visible.contains(seg.end, 1e-9));
                prop_assert!(line.distance_to(seg.start) < 1e-9 * visible.diagonal());
            }
        }
    }
}

#[test]
fn cloud_of_lambda_equals_cloud_of_one_minus_lambda() {
    let curve =
        ParametricCurve::from_rosette(&common::rosette(1, 10.0, &[(3, 0.5, 0.1), (4, 0.1, -0.1)]));
    let pairs = find_parallel_pairs(&curve, 512).unwrap();
    let points = |lambda: f64| -> Vec<caustica::Vec2> {
        equidistant_cloud(&curve, &pairs, lambda)
            .into_iter()
            .flat_map(|c| c.points)
            .collect()
    };
    let (a, b) = (points(0.3), points(0.7));
    assert_eq!(a.len(), b.len());
    let tol = 1e-12 * curve.diameter();
    assert!(a.iter().all(|p| b.iter().any(|q| p.distance(*q) < tol)));
    assert!(b.iter().all(|p| a.iter().any(|q| p.distance(*q) < tol)));
}

#[test]
fn pairs_are_found_from_either_end() {
    // On a 512 grid every partner t + π of a grid point is itself a grid point.
    let curve =
        ParametricCurve::from_rosette(&common::rosette(1, 10.0, &[(3, 0.8, 0.1), (5, 0.05, 0.02)]));
    let pairs = find_parallel_pairs(&curve, 512).unwrap();
    let step = 2.0 * PI / 512.0;
    for p in pairs.iter().filter(|p| p.t2 < PI + 1.0) {
        let near = (p.t2 / step).round() * step;
        if (near - p.t2).abs() < 1e-6 {
            assert!(
                pairs
                    .iter()
                    .any(|q| (q.t1 - p.t1).abs() < 1e-6 && (q.t2 - p.t2).abs() < 1e-6),
                "{p:?}"
            );
        }
    }
    for p in &pairs {
        let tangents = curve.unit_tangent(p.t1).cross(curve.unit_tangent(p.t2));
        assert!(tangents.abs() < 1e-9);
        assert!(p.t1 < p.t2);
    }
}

#[test]
fn chords_touch_css_where_defined() {
    let curve = common::rosette(1, 10.0, &[(2, 0.4, -0.3), (3, 0.6, 0.2), (5, 0.1, 0.05)]);
    let scene = single_curve_scene(&curve, vec![family(FamilyKind::AffineChords, None, &curve)]);
    let css = css_branches(&curve);
    let branch = &css.branches[0];
    assert_eq!(branch.kind(), BranchKind::Css);
    let lines = family_lines(&scene, 0).unwrap().lines;
    for (theta, line) in scene.families[0].parameters().zip(&lines) {
        if !branch.is_pole(theta) {
            assert!(line.distance_to(branch.point(theta)) < 1e-6 * curve.diameter());
        }
    }
}

#[test]
fn rendering_is_deterministic_across_pools() {
    let curve = common::rosette(2, 10.0, &[(3, 3.0, 0.5)]);
    let scene = single_curve_scene(
        &curve,
        vec![
            family(FamilyKind::CurveTangents, None, &curve),
            family(FamilyKind::EquidistantTangents, Some(0.3), &curve),
            family(FamilyKind::AffineChords, None, &curve),
        ],
    );
    let reference = render_svg(&scene).unwrap().0;
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        assert_eq!(pool.install(|| render_svg(&scene).unwrap().0), reference);
    }
}

fn family(kind: FamilyKind, lambda: Option<f64>, curve: &RosetteCurve) -> LineFamily {
    LineFamily {
        source: "c".into(),
        kind,
        pair_offset: (kind != FamilyKind::CurveTangents).then_some(1),
        lambda,
        param_range: (0.0, curve.period()),
        step: 0.05,
        color: Rgb::BLACK,
        opacity: 0.1,
        stroke_width: 0.5,
    }
}

fn single_curve_scene(curve: &Arc<RosetteCurve>, families: Vec<LineFamily>) -> Scene {
    Scene {
        canvas: Canvas::default(),
        curves: vec![SceneCurve {
            id: "c".into(),
            geometry: CurveGeometry::Rosette(curve.clone()),
        }],
        families,
        overlays: vec![],
    }
}
