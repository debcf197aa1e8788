//! One-dimensional root bracketing and minimization on parameter intervals.

/// A zero of a scalar function located by sign-change bracketing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub at: f64,
    /// Width of the final bracket (0 for a zero hit exactly on a grid node).
    pub bracket: f64,
}

/// How the end of a scanned interval relates to its start.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wrap {
    /// Unrelated endpoints.
    Open,
    /// `f(start + length) = f(start)`.
    Periodic,
    /// `f(start + length) = −f(start)`.
    Antiperiodic,
}

/// Finds every sign change of `f` on the half-open interval `[start, start + length)`.
///
/// The interval is sampled at `samples + 1` equally spaced nodes (both ends
/// included), each strict sign change is refined by bisection until the
/// bracket is narrower than `tolerance`, and nodes where `f` is exactly zero
/// are reported as roots. With a wrapping interval the end node is the start
/// node of the next lap, so a root refined onto the end is folded onto
/// `start`, and a sign mismatch across the seam (round-off in `f` at the two
/// ends) is reported as a root at `start`.
pub fn sign_change_roots<F>(
    f: F,
    start: f64,
    length: f64,
    samples: usize,
    tolerance: f64,
    wrap: Wrap,
) -> Vec<Root>
where
    F: Fn(f64) -> f64,
{
    let samples = samples.max(1);
    let step = length / samples as f64;
    let node = |i: usize| {
        if i == samples {
            start + length
        } else {
            start + step * i as f64
        }
    };

    let mut roots = Vec::new();
    let mut lo_t = node(0);
    let mut lo_v = f(lo_t);
    let first_v = lo_v;
    for i in 0..samples {
        let hi_t = node(i + 1);
        let hi_v = f(hi_t);
        if lo_v == 0.0 {
            roots.push(Root {
                at: lo_t,
                bracket: 0.0,
            });
        } else if lo_v * hi_v < 0.0 {
            roots.push(bisect(&f, lo_t, lo_v, hi_t, tolerance));
        }
        lo_t = hi_t;
        lo_v = hi_v;
    }

    let seam_sign = match wrap {
        Wrap::Open => return roots,
        Wrap::Periodic => 1.0,
        Wrap::Antiperiodic => -1.0,
    };
    let at_start = |roots: &[Root]| roots.first().is_some_and(|r| r.at - start <= tolerance);
    if let Some(last) = roots.last().copied() {
        if (start + length) - last.at <= tolerance {
            roots.pop();
            if !at_start(&roots) {
                roots.insert(
                    0,
                    Root {
                        at: start,
                        bracket: last.bracket,
                    },
                );
            }
        }
    }
    // `lo_v` now holds f(start + length).
    if first_v != 0.0 && lo_v * seam_sign * first_v < 0.0 && !at_start(&roots) {
        roots.insert(
            0,
            Root {
                at: start,
                bracket: 0.0,
            },
        );
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut lo_v: f64,
    mut hi: f64,
    tolerance: f64,
) -> Root {
    // 200 halvings exhaust f64 resolution on any finite interval.
    for _ in 0..200 {
        if hi - lo <= tolerance {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mid_v = f(mid);
        if mid_v == 0.0 {
            return Root {
                at: mid,
                bracket: 0.0,
            };
        }
        if (mid_v < 0.0) == (lo_v < 0.0) {
            lo = mid;
            lo_v = mid_v;
        } else {
            hi = mid;
        }
    }
    Root {
        at: 0.5 * (lo + hi),
        bracket: hi - lo,
    }
}

/// Golden-section search for a local minimum of `f` on `[a, b]`.
///
/// Returns `(argmin, min)`. The function is assumed unimodal on the bracket;
/// the result is never worse than the best endpoint.
pub fn golden_section_min<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    tolerance: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) * 0.5;
    let (fa, fb) = (f(a), f(b));
    let (best_end, best_end_v) = if fa <= fb { (a, fa) } else { (b, fb) };

    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tolerance {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let v = f(x);
    if v <= best_end_v {
        (x, v)
    } else {
        (best_end, best_end_v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn finds_all_roots_of_cosine() {
        let roots = sign_change_roots(|t| (3.0 * t).cos(), 0.0, PI, 97, 1e-13, Wrap::Open);
        let at: Vec<f64> = roots.iter().map(|r| r.at).collect();
        assert_eq!(at.len(), 3);
        for (got, want) in at.iter().zip([PI / 6.0, PI / 2.0, 5.0 * PI / 6.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn exact_zero_on_a_node_is_counted_once() {
        // sin(3t) vanishes exactly at t = 0.
        let roots = sign_change_roots(|t| (3.0 * t).sin(), 0.0, PI, 192, 1e-13, Wrap::Antiperiodic);
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[0].at, 0.0);
    }

    #[test]
    fn periodic_wrap_is_not_double_counted() {
        // Root at 0 and (numerically) again at 2π.
        let f = |t: f64| t.sin() + 1e-17;
        let roots = sign_change_roots(f, 0.0, 2.0 * PI, 64, 1e-13, Wrap::Periodic);
        assert_eq!(roots.len(), 2, "{roots:?}");
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, v) = golden_section_min(|t| (t - 0.3) * (t - 0.3) + 2.0, -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }
}
