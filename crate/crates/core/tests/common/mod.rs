#![allow(dead_code)]

use std::sync::Arc;

use caustica::{RosetteCurve, TrigSupportFunction, TrigTerm};
use proptest::prelude::*;

pub fn rosette(n: u32, constant: f64, terms: &[(u32, f64, f64)]) -> Arc<RosetteCurve> {
    let terms = terms
        .iter()
        .map(|&(j, c, s)| TrigTerm::new(j, c, s))
        .collect();
    Arc::new(RosetteCurve::new(TrigSupportFunction::new(n, constant, terms).unwrap()).unwrap())
}

pub fn oval() -> Arc<RosetteCurve> {
    rosette(1, 10.0, &[(3, 1.0, 0.0)])
}

/// Ovals `10 + Σ aⱼ cos jθ + bⱼ sin jθ`, 2 ≤ j ≤ 6, with
/// `Σ (j² − 1)(|aⱼ| + |bⱼ|) ≤ 9` so that `p + p″ ≥ 1`. The first term has
/// odd frequency, so the oval is never centrally symmetric.
pub fn arb_oval() -> impl Strategy<Value = Arc<RosetteCurve>> {
    let odd = (
        prop::sample::select(vec![3u32, 5]),
        0.05f64..1.0,
        0.0f64..(2.0 * std::f64::consts::PI),
    )
        .prop_map(|(j, a, phase)| (j, a * phase.cos(), a * phase.sin()));
    let rest = prop::collection::vec((2u32..=6, -1.0f64..1.0, -1.0f64..1.0), 0..3);
    (odd, rest).prop_map(|(first, rest)| {
        let raw: Vec<_> = std::iter::once(first).chain(rest).collect();
        let weight: f64 = raw
            .iter()
            .map(|&(j, c, s)| f64::from(j * j - 1) * (c.abs() + s.abs()))
            .sum();
        let scale = if weight > 9.0 { 9.0 / weight } else { 1.0 };
        let mut terms: Vec<(u32, f64, f64)> = Vec::new();
        for (j, c, s) in raw {
            match terms.iter_mut().find(|t| t.0 == j) {
                Some(t) => {
                    t.1 += c * scale;
                    t.2 += s * scale;
                }
                None => terms.push((j, c * scale, s * scale)),
            }
        }
        rosette(1, 10.0, &terms)
    })
}

/// n-rosettes with a single term of frequency j/n, j coprime to n and odd
/// when n is odd (otherwise the branch pairing θ with θ + nπ collapses).
pub fn arb_rosette() -> impl Strategy<Value = Arc<RosetteCurve>> {
    (1u32..=3, 1u32..=7, 0.1f64..1.0, -1.0f64..1.0).prop_filter_map(
        "j coprime to n",
        |(n, j, frac, phase)| {
            if gcd(n, j) != 1 || j == n || (n % 2 == 1 && j % 2 == 0) {
                return None;
            }
            let w = f64::from(j) / f64::from(n);
            // ρ = 10 + a(1 − w²)cos(...) stays positive for |a| < 10/|1 − w²|.
            let limit = if (1.0 - w * w).abs() < 1e-12 {
                5.0
            } else {
                9.0 / (1.0 - w * w).abs()
            };
            let a = frac * limit.min(5.0);
            Some(rosette(n, 10.0, &[(j, a * phase.cos(), a * phase.sin())]))
        },
    )
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// True when `a` and `b` agree as multisets of points on a circle of
/// circumference `period`.
pub fn same_mod(a: &[f64], b: &[f64], period: f64, tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| {
            b.iter().any(|y| {
                let d = (x - y).rem_euclid(period);
                d < tol || period - d < tol
            })
        })
}
