use std::collections::HashMap;
use std::f64::consts::PI;

use super::curve::Curve;
use crate::linalg::{norm, sub, Vector};

const SCAN_STEP: f64 = 0.01;

/// Sampled estimate of the uniqueness radius `r̃₀` on `window`.
///
/// Starting from `r = (1 − 10⁻³)/(2K)`, the radius is reduced while some
/// pair of curve points at arclength separation more than `π r` sits closer
/// than `2 r`. Sample spacing `h` is accounted for conservatively: each pair
/// is judged with separation `|Δs| + h` and distance `d − h`. The result is
/// a numerically certified bound on the sampled window, not a proof.
pub fn estimate_uniqueness_radius(curve: &Curve, window: (f64, f64)) -> f64 {
    let cap = (1.0 - 1e-3) / (2.0 * curve.k_bound());
    let h = SCAN_STEP.min(cap / 8.0);
    let count = ((window.1 - window.0) / h).ceil() as usize + 1;
    let points: Vec<Vector> = (0..count).map(|k| curve.jet(window.0 + h * k as f64).pos).collect();

    let mut r = cap;
    loop {
        match closest_violation(&points, h, r) {
            None => return r,
            Some(d) => {
                // the offending pair stays below 2r' for any r' > (d − h)/2
                let next = (0.5 * (d - h)).min(0.9 * r);
                if next <= h {
                    return h.min(r) * 0.5;
                }
                r = next;
            }
        }
    }
}

/// Smallest conservative distance among pairs that violate the
/// no-self-approach condition at radius `r`.
fn closest_violation(points: &[Vector], h: f64, r: f64) -> Option<f64> {
    let cell = 2.0 * r + h;
    let key = |p: &Vector| -> Vec<i64> { p.iter().map(|x| (x / cell).floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }
    let dim = points.first().map_or(0, |p| p.len());
    let mut offsets = vec![vec![]];
    for _ in 0..dim {
        offsets = offsets
            .into_iter()
            .flat_map(|o: Vec<i64>| {
                (-1..=1).map(move |d| {
                    let mut o = o.clone();
                    o.push(d);
                    o
                })
            })
            .collect();
    }
    let min_sep = PI * r;
    let mut worst: Option<f64> = None;
    for (i, p) in points.iter().enumerate() {
        let base = key(p);
        for off in &offsets {
            let k: Vec<i64> = base.iter().zip(off).map(|(a, b)| a + b).collect();
            let Some(bucket) = grid.get(&k) else { continue };
            for &j in bucket {
                if j <= i {
                    continue;
                }
                let sep = (j - i) as f64 * h;
                if sep + h <= min_sep {
                    continue;
                }
                let d = norm(&sub(p, &points[j]));
                if d - h < 2.0 * r {
                    worst = Some(worst.map_or(d, |w: f64| w.min(d)));
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_radius_hits_curvature_cap() {
        let c = Curve::line(3, (-10.0, 10.0)).unwrap();
        let cap = (1.0 - 1e-3) / (2.0 * c.k_bound());
        assert_eq!(c.r_tilde0(), cap);
    }

    #[test]
    fn tight_helix_radius_is_limited_by_turn_spacing() {
        // turns sit 2π·0.05 ≈ 0.314 apart along the axis
        let c = Curve::helix(3, 1.0, 0.05, (-30.0, 30.0)).unwrap();
        let spacing = 2.0 * PI * 0.05;
        assert!(c.r_tilde0() < 0.5 * spacing, "{}", c.r_tilde0());
        assert!(c.r_tilde0() > 0.25 * spacing, "{}", c.r_tilde0());
    }

    #[test]
    fn matches_dense_pair_scan_on_helix() {
        let c = Curve::helix(3, 1.0, 0.05, (-8.0, 8.0)).unwrap();
        let r = c.r_tilde0();
        let h = 1e-3;
        let pts: Vec<Vector> = (0..16_000).map(|k| c.jet(-8.0 + h * k as f64).pos).collect();
        for i in (0..pts.len()).step_by(7) {
            for j in (i + 1)..pts.len() {
                let sep = (j - i) as f64 * h;
                if sep > PI * r {
                    assert!(norm(&sub(&pts[i], &pts[j])) >= 2.0 * r);
                }
            }
        }
    }
}
