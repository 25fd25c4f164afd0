//! Restarted GMRES for complex linear operators given as closures.

use crate::Complex64;

type C = Complex64;

#[derive(Clone, Debug)]
pub struct GmresResult {
    pub x: Vec<C>,
    /// Final relative residual ‖b − Ax‖/‖b‖.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(v: &[C]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Solve A x = b from x = 0 with GMRES(restart), identity preconditioner.
pub fn gmres<F>(apply: F, b: &[C], tol: f64, max_iter: usize, restart: usize) -> GmresResult
where
    F: Fn(&[C]) -> Vec<C>,
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![C::new(0.0, 0.0); n];
    if bnorm == 0.0 {
        return GmresResult { x, residual: 0.0, iterations: 0, converged: true };
    }
    let m = restart.max(1);
    let mut iters = 0;
    let mut rel = 1.0;
    while iters < max_iter {
        let ax = apply(&x);
        let r: Vec<C> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= tol {
            return GmresResult { x, residual: rel, iterations: iters, converged: true };
        }
        let mut v: Vec<Vec<C>> = vec![r.iter().map(|c| c / beta).collect()];
        let mut h = vec![vec![C::new(0.0, 0.0); m]; m + 1];
        let mut cs = vec![C::new(0.0, 0.0); m];
        let mut sn = vec![C::new(0.0, 0.0); m];
        let mut g = vec![C::new(0.0, 0.0); m + 1];
        g[0] = C::new(beta, 0.0);
        let mut k_used = 0;
        for k in 0..m {
            if iters >= max_iter {
                break;
            }
            iters += 1;
            let mut w = apply(&v[k]);
            // modified Gram–Schmidt
            for (i, vi) in v.iter().enumerate() {
                let hik = dot(vi, &w);
                h[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(vi) {
                    *wj -= hik * vj;
                }
            }
            let hn = norm(&w);
            h[k + 1][k] = C::new(hn, 0.0);
            for i in 0..k {
                let t = cs[i].conj() * h[i][k] + sn[i].conj() * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let (a, bb) = (h[k][k], h[k + 1][k]);
            let d = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if d == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = a / d;
            sn[k] = bb / d;
            h[k][k] = C::new(d, 0.0);
            h[k + 1][k] = C::new(0.0, 0.0);
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k].conj() * g[k];
            k_used = k + 1;
            rel = g[k + 1].norm() / bnorm;
            if rel <= tol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|c| c / hn).collect());
        }
        // back substitution on the k_used × k_used triangle
        let mut y = vec![C::new(0.0, 0.0); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&v[j]) {
                *xi += yj * vi;
            }
        }
        if rel <= tol {
            // confirm with the true residual on the next pass
            continue;
        }
    }
    let ax = apply(&x);
    let r: Vec<C> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let rel_true = norm(&r) / bnorm;
    GmresResult { x, residual: rel_true, iterations: iters, converged: rel_true <= tol.max(rel) && rel_true <= tol * 10.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_nonsymmetric_system() {
        let a = [
            [C::new(4.0, 1.0), C::new(1.0, 0.0), C::new(0.0, 0.5)],
            [C::new(0.0, -1.0), C::new(3.0, 0.0), C::new(1.0, 0.0)],
            [C::new(0.5, 0.0), C::new(0.0, 2.0), C::new(5.0, -1.0)],
        ];
        let apply = |x: &[C]| (0..3).map(|i| (0..3).map(|j| a[i][j] * x[j]).sum()).collect();
        let b = vec![C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(2.0, -1.0)];
        let res = gmres(apply, &b, 1e-13, 50, 2);
        assert!(res.converged, "{res:?}");
        let ax: Vec<C> = apply(&res.x);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }
    }
}
