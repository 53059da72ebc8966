//! Dense symmetric eigen-machinery used by the spectral module.

/// Householder reduction of a dense symmetric matrix to tridiagonal form.
///
/// `a` is row-major `n × n` and is destroyed. Returns the diagonal, the
/// off-diagonal (`off[i]` couples `i` and `i+1`) and the reflector vectors;
/// reflector `k` acts on coordinates `k+1..n` and `A = Q T Qᵀ` with
/// `Q = H_0 H_1 ⋯`.
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    reflectors: Vec<Vec<f64>>,
}

impl Tridiagonal {
    pub fn reduce(mut a: Vec<f64>, n: usize) -> Self {
        debug_assert_eq!(a.len(), n * n);
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let mut p = vec![0.0; n];
        for k in 0..n.saturating_sub(2) {
            diag[k] = a[k * n + k];
            let m = n - k - 1;
            let mut v: Vec<f64> = (k + 1..n).map(|i| a[i * n + k]).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                off[k] = 0.0;
                reflectors.push(vec![0.0; m]);
                continue;
            }
            let alpha = if v[0] > 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                off[k] = alpha;
                reflectors.push(vec![0.0; m]);
                continue;
            }
            for x in v.iter_mut() {
                *x /= vnorm;
            }
            off[k] = alpha;
            // p = A22 v, q = p − (vᵀp) v, A22 ← A22 − 2 v qᵀ − 2 q vᵀ
            let base = k + 1;
            for (i, pi) in p[..m].iter_mut().enumerate() {
                let row = &a[(base + i) * n + base..(base + i) * n + n];
                *pi = row.iter().zip(&v).map(|(x, y)| x * y).sum();
            }
            let vp: f64 = v.iter().zip(&p[..m]).map(|(x, y)| x * y).sum();
            for (pi, vi) in p[..m].iter_mut().zip(&v) {
                *pi -= vp * vi;
            }
            for i in 0..m {
                let (vi, qi) = (v[i], p[i]);
                let row = &mut a[(base + i) * n + base..(base + i) * n + n];
                for ((x, vj), qj) in row.iter_mut().zip(&v).zip(&p[..m]) {
                    *x -= 2.0 * (vi * qj + qi * vj);
                }
            }
            reflectors.push(v);
        }
        if n >= 2 {
            diag[n - 2] = a[(n - 2) * n + n - 2];
            diag[n - 1] = a[(n - 1) * n + n - 1];
            off[n - 2] = a[(n - 1) * n + n - 2];
        } else if n == 1 {
            diag[0] = a[0];
        }
        Self { diag, off, reflectors }
    }

    /// Maps a tridiagonal-basis vector back to the original basis.
    pub fn back_transform(&self, z: &mut [f64]) {
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            let tail = &mut z[k + 1..];
            let dot: f64 = tail.iter().zip(v).map(|(a, b)| a * b).sum();
            for (x, vi) in tail.iter_mut().zip(v) {
                *x -= 2.0 * dot * vi;
            }
        }
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicitly shifted
/// QL iteration. Returns `None` if some eigenvalue needs more than 60 sweeps.
pub(crate) fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Some(d)
}

/// Eigenvector of a symmetric tridiagonal matrix for a computed eigenvalue,
/// by inverse iteration with a pivoted tridiagonal solver.
pub(crate) fn tridiagonal_eigenvector(diag: &[f64], off: &[f64], theta: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = diag
        .iter()
        .map(|x| x.abs())
        .chain(off.iter().map(|x| x.abs()))
        .fold(1.0f64, f64::max);
    let tiny = f64::EPSILON * scale;
    let shift = theta + 8.0 * tiny;
    let lu = TridiagonalLu::factor(diag, off, shift, tiny);
    // deterministic, nonsymmetric start avoids orthogonality to the target
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0).collect();
    for _ in 0..4 {
        lu.solve(&mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    x
}

/// LU factorization with partial pivoting of `T − μI`.
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(diag: &[f64], off: &[f64], mu: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut d: Vec<f64> = diag.iter().map(|x| x - mu).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for x in d.iter_mut() {
            if *x == 0.0 {
                *x = tiny;
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Cyclic Jacobi eigendecomposition of a small dense symmetric matrix, kept
/// as an independent oracle for the tridiagonal route.
/// Returns eigenvalues and column-major eigenvectors (`vecs[j*n + i]` is
/// component `i` of vector `j`).
#[cfg(test)]
pub(crate) fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[p * n + k], v[q * n + k]);
                    v[p * n + k] = c * vkp - s * vkq;
                    v[q * n + k] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals = (0..n).map(|i| m[i * n + i]).collect();
    (vals, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        let mut a = vec![0.0; n * n];
        let mut s = seed;
        for i in 0..n {
            for j in 0..=i {
                s = crate::rng::mix64(s.wrapping_add(1));
                let x = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        a
    }

    #[test]
    fn tridiagonal_route_matches_jacobi() {
        for n in [1, 2, 3, 7, 20] {
            let a = random_symmetric(n, n as u64);
            let t = Tridiagonal::reduce(a.clone(), n);
            let mut ql = tridiagonal_eigenvalues(&t.diag, &t.off).unwrap();
            let (mut jac, _) = jacobi_eigen(&a, n);
            ql.sort_by(f64::total_cmp);
            jac.sort_by(f64::total_cmp);
            for (x, y) in ql.iter().zip(&jac) {
                assert!((x - y).abs() < 1e-10, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn inverse_iteration_vectors_have_small_residuals() {
        let n = 30;
        let a = random_symmetric(n, 99);
        let t = Tridiagonal::reduce(a.clone(), n);
        let vals = tridiagonal_eigenvalues(&t.diag, &t.off).unwrap();
        for &theta in &vals {
            let mut x = tridiagonal_eigenvector(&t.diag, &t.off, theta);
            t.back_transform(&mut x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let res: f64 = (0..n)
                .map(|i| {
                    let ax: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
                    (ax - theta * x[i]).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(res / norm < 1e-10, "θ={theta}: residual {res}");
        }
    }

    #[test]
    fn jacobi_vectors_diagonalize() {
        let n = 6;
        let a = random_symmetric(n, 5);
        let (vals, vecs) = jacobi_eigen(&a, n);
        for j in 0..n {
            let v = &vecs[j * n..(j + 1) * n];
            for i in 0..n {
                let av: f64 = (0..n).map(|k| a[i * n + k] * v[k]).sum();
                assert!((av - vals[j] * v[i]).abs() < 1e-10);
            }
        }
    }
}
