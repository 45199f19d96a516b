use rand::Rng;

use super::curve::Curve;
use crate::linalg::{dot, gram_schmidt, norm, orthonormal_complement, scale, sub, Vector};

/// Rotation-minimising normal frame along a window of the curve, built by
/// the double-reflection rule on a uniform grid.
#[derive(Debug, Clone)]
pub struct TubeFrame {
    start: f64,
    step: f64,
    positions: Vec<Vector>,
    tangents: Vec<Vector>,
    normals: Vec<Vec<Vector>>,
}

fn double_reflect(x0: &[f64], t0: &[f64], x1: &[f64], t1: &[f64], normals: &[Vector]) -> Vec<Vector> {
    let v1 = sub(x1, x0);
    let c1 = dot(&v1, &v1);
    if c1 == 0.0 {
        return normals.to_vec();
    }
    let reflect = |w: &[f64], v: &[f64], c: f64| -> Vector {
        let k = 2.0 * dot(v, w) / c;
        w.iter().zip(v).map(|(a, b)| a - k * b).collect()
    };
    let t_l = reflect(t0, &v1, c1);
    let v2 = sub(t1, &t_l);
    let c2 = dot(&v2, &v2);
    normals
        .iter()
        .map(|r| {
            let r_l = reflect(r, &v1, c1);
            if c2 == 0.0 {
                r_l
            } else {
                reflect(&r_l, &v2, c2)
            }
        })
        .collect()
}

impl TubeFrame {
    pub fn new(curve: &Curve, window: (f64, f64), step: f64) -> Self {
        let count = ((window.1 - window.0) / step).ceil() as usize + 1;
        let mut positions: Vec<Vector> = Vec::with_capacity(count);
        let mut tangents: Vec<Vector> = Vec::with_capacity(count);
        let mut normals: Vec<Vec<Vector>> = Vec::with_capacity(count);
        for k in 0..count {
            let j = curve.jet(window.0 + step * k as f64);
            let frame = match normals.last() {
                None => orthonormal_complement(&j.d1),
                Some(prev) => {
                    let mut nx = double_reflect(&positions[k - 1], &tangents[k - 1], &j.pos, &j.d1, prev);
                    gram_schmidt(&j.d1, &mut nx);
                    nx
                }
            };
            positions.push(j.pos);
            tangents.push(j.d1);
            normals.push(frame);
        }
        Self { start: window.0, step, positions, tangents, normals }
    }

    /// Orthonormal normals at `s`, transported from the nearest grid node.
    pub fn normals_at(&self, curve: &Curve, s: f64) -> Vec<Vector> {
        let k = (((s - self.start) / self.step).floor().max(0.0) as usize).min(self.normals.len() - 1);
        let j = curve.jet(s);
        let mut nx = double_reflect(&self.positions[k], &self.tangents[k], &j.pos, &j.d1, &self.normals[k]);
        gram_schmidt(&j.d1, &mut nx);
        nx
    }

    /// `ξ(s) + r Σ wᵢ νᵢ(s)` for a unit `w ∈ ℝⁿ⁻¹`.
    pub fn point(&self, curve: &Curve, s: f64, r: f64, w: &[f64]) -> Vector {
        let mut x = curve.jet(s).pos;
        for (wi, nu) in w.iter().zip(self.normals_at(curve, s)) {
            for (xk, vk) in x.iter_mut().zip(&nu) {
                *xk += r * wi * vk;
            }
        }
        x
    }
}

/// Uniformly distributed unit vector in ℝᵈ.
pub fn random_unit<R: Rng>(rng: &mut R, d: usize) -> Vector {
    loop {
        let v: Vector = (0..d).map(|_| standard_normal(rng)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            return scale(1.0 / len, &v);
        }
    }
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Latin hypercube design of `count` points in `[0, 1)^dims`.
pub fn latin_hypercube<R: Rng>(rng: &mut R, count: usize, dims: usize) -> Vec<Vec<f64>> {
    use rand::seq::SliceRandom;
    let mut columns: Vec<Vec<f64>> = (0..dims)
        .map(|_| {
            let mut col: Vec<f64> = (0..count).map(|k| (k as f64 + rng.gen::<f64>()) / count as f64).collect();
            col.shuffle(rng);
            col
        })
        .collect();
    (0..count).map(|k| columns.iter_mut().map(|c| c[k]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::projection::project;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_points_project_back() {
        let c = Curve::helix(4, 1.0, 0.7, (-15.0, 15.0)).unwrap();
        let frame = TubeFrame::new(&c, (-15.0, 15.0), 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = rng.gen_range(-14.0..14.0);
            let r = rng.gen_range(1e-3..0.3);
            let w = random_unit(&mut rng, 3);
            let x = frame.point(&c, s, r, &w);
            let tp = project(&c, &x, c.r_tilde0()).unwrap().inside().unwrap();
            assert!((tp.s - s).abs() < 1e-10 && (tp.r - r).abs() < 1e-12, "{s} {r} -> {} {}", tp.s, tp.r);
        }
    }

    #[test]
    fn normals_are_orthonormal() {
        let c = Curve::sine(3, 0.3, 1.0, (-10.0, 10.0)).unwrap();
        let frame = TubeFrame::new(&c, (-10.0, 10.0), 0.05);
        let nx = frame.normals_at(&c, 2.345);
        let t = c.jet(2.345).d1;
        for (i, a) in nx.iter().enumerate() {
            assert!(dot(a, &t).abs() < 1e-13);
            for (j, b) in nx.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(a, b) - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn hypercube_stratifies_each_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts = latin_hypercube(&mut rng, 50, 3);
        for d in 0..3 {
            let mut bins = [false; 50];
            for p in &pts {
                bins[(p[d] * 50.0) as usize] = true;
            }
            assert!(bins.iter().all(|&b| b));
        }
    }
}
