//! Small dense-vector helpers. Ambient dimensions here are tiny (n ≤ ~6), so
//! plain `Vec<f64>` with free functions is enough.

pub type Vector = Vec<f64>;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add_scaled(a: &[f64], k: f64, b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + k * y).collect()
}

#[inline]
pub fn scale(k: f64, a: &[f64]) -> Vector {
    a.iter().map(|x| k * x).collect()
}

pub fn unit(dim: usize, axis: usize) -> Vector {
    let mut v = vec![0.0; dim];
    v[axis] = 1.0;
    v
}

/// Orthonormalise `vectors` in place against `against` (assumed unit) and
/// each other. Returns `false` if some vector collapsed.
pub fn gram_schmidt(against: &[f64], vectors: &mut [Vector]) -> bool {
    for k in 0..vectors.len() {
        let mut v = vectors[k].clone();
        let d = dot(&v, against);
        v = add_scaled(&v, -d, against);
        for prev in &vectors[..k] {
            let d = dot(&v, prev);
            v = add_scaled(&v, -d, prev);
        }
        let len = norm(&v);
        if len < 1e-12 {
            return false;
        }
        vectors[k] = scale(1.0 / len, &v);
    }
    true
}

/// Orthonormal basis of the complement of the unit vector `t` in ℝⁿ.
pub fn orthonormal_complement(t: &[f64]) -> Vec<Vector> {
    let dim = t.len();
    // Drop the axis most aligned with t; the rest stay independent of it.
    let skip = (0..dim)
        .max_by(|&a, &b| t[a].abs().total_cmp(&t[b].abs()))
        .unwrap_or(0);
    let mut basis: Vec<Vector> = (0..dim).filter(|&i| i != skip).map(|i| unit(dim, i)).collect();
    let ok = gram_schmidt(t, &mut basis);
    debug_assert!(ok);
    basis
}

/// Solve a tridiagonal system in place (Thomas algorithm).
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut Vec<f64>) {
    let n = diag.len();
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let t = scale(1.0 / 3f64.sqrt(), &[1.0, 1.0, 1.0]);
        let b = orthonormal_complement(&t);
        assert_eq!(b.len(), 2);
        for v in &b {
            assert!((norm(v) - 1.0).abs() < 1e-14);
            assert!(dot(v, &t).abs() < 1e-14);
        }
        assert!(dot(&b[0], &b[1]).abs() < 1e-14);
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let lower = [0.0, -1.0, -1.0, -1.0];
        let diag = [4.0, 4.0, 4.0, 4.0];
        let upper = [-1.0, -1.0, -1.0, 0.0];
        let x = [1.0, 2.0, 3.0, 4.0];
        let mut rhs: Vec<f64> = (0..4)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s += lower[i] * x[i - 1];
                }
                if i < 3 {
                    s += upper[i] * x[i + 1];
                }
                s
            })
            .collect();
        let mut scratch = Vec::new();
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs, &mut scratch);
        for i in 0..4 {
            assert!((rhs[i] - x[i]).abs() < 1e-14);
        }
    }
}
