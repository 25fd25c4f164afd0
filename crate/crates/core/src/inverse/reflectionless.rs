use super::{assemble, row_scale, PointValues, Poles};
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::scattering::ScatteringData;
use crate::{Complex64, Mat2C};
use nalgebra::DMatrix;
use rayon::prelude::*;

type C = Complex64;

/// Reconstructed field with the raw trigonometric outputs.
#[derive(Clone, Debug)]
pub struct ReflectionlessOutput {
    pub state: FieldState,
    pub sin_f: Vec<f64>,
    pub cos_f: Vec<f64>,
    /// f_x assembled as (g + h)/2 from the RHP data.
    pub fx: Vec<f64>,
}

/// Solve the residue system at one (x, t), where t is measured from the
/// data's own time. Unknowns Ã_k = w_k M₂(p_k) and B̃_k = w̄_k M₁(p̄_k):
///
/// Ã_k/w_k + Σ_i B̃_i/(p_k − p̄_i) = e₂,  B̃_k/w̄_k − Σ_i Ã_i/(p̄_k − p_i) = e₁.
pub fn reflectionless_point(data: &ScatteringData, x: f64, t: f64) -> Result<PointValues> {
    let poles = Poles::from_data(data);
    solve_point(&poles, x, t)
}

pub(crate) fn solve_point(poles: &Poles, x: f64, t: f64) -> Result<PointValues> {
    Ok(point_values(&poles.p, &solve_residues(poles, x, t)?, None))
}

/// M(z; x, t) of the pure-soliton problem at any z off the poles.
pub fn reflectionless_matrix(data: &ScatteringData, z: C, x: f64, t: f64) -> Result<Mat2C> {
    let poles = Poles::from_data(data);
    let sol = solve_residues(&poles, x, t)?;
    let mut m = Mat2C::identity();
    for row in 0..2 {
        for (i, p) in poles.p.iter().enumerate() {
            m[(row, 0)] += sol[(i, row)] / (z - p);
            m[(row, 1)] -= sol[(poles.len() + i, row)] / (z - p.conj());
        }
    }
    Ok(m)
}

fn solve_residues(poles: &Poles, x: f64, t: f64) -> Result<DMatrix<C>> {
    let n = poles.len();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 2));
    }
    let p = &poles.p;
    let lw = poles.log_w(x, t);
    let mut a = DMatrix::<C>::zeros(2 * n, 2 * n);
    let mut rhs = DMatrix::<C>::zeros(2 * n, 2);
    for k in 0..n {
        let (diag, coup) = row_scale(lw[k]);
        // row for Ã_k
        a[(k, k)] = diag;
        for i in 0..n {
            a[(k, n + i)] = coup / (p[k] - p[i].conj());
        }
        rhs[(k, 1)] = coup;
        // row for B̃_k (weights conjugated)
        let (diag_b, coup_b) = (diag.conj(), coup.conj());
        a[(n + k, n + k)] = diag_b;
        for i in 0..n {
            a[(n + k, i)] = -coup_b / (p[k].conj() - p[i]);
        }
        rhs[(n + k, 0)] = coup_b;
    }
    let sol = a.clone().lu().solve(&rhs).ok_or(Error::SingularSystem { x, t })?;
    let resid = (&a * &sol - &rhs).norm();
    if !resid.is_finite() || resid > 1e-8 * (1.0 + sol.norm()) {
        return Err(Error::SingularSystem { x, t });
    }
    Ok(sol)
}

/// Continuous contributions to M(0), M′(0) and m⁽¹⁾, column-wise.
pub(crate) struct Continuum {
    pub m0: Mat2C,
    pub dm0: Mat2C,
    pub m1: Mat2C,
}

/// Evaluate M(0), M′(0), m⁽¹⁾ from the residue unknowns. Column r of `sol`
/// holds row r of the 2-vectors Ã, B̃.
pub(crate) fn point_values(p: &[C], sol: &DMatrix<C>, cont: Option<Continuum>) -> PointValues {
    let n = p.len();
    let mut m0 = Mat2C::identity();
    let mut dm0 = Mat2C::zeros();
    let mut m1 = Mat2C::zeros();
    for row in 0..2 {
        for i in 0..n {
            let at = sol[(i, row)];
            let bt = sol[(n + i, row)];
            let pc = p[i].conj();
            // M₁(z) = e₁ + Σ Ã/(z − p),  M₂(z) = e₂ − Σ B̃/(z − p̄)
            m0[(row, 0)] -= at / p[i];
            m0[(row, 1)] += bt / pc;
            dm0[(row, 0)] -= at / (p[i] * p[i]);
            dm0[(row, 1)] += bt / (pc * pc);
            m1[(row, 0)] += at;
            m1[(row, 1)] -= bt;
        }
    }
    if let Some(c) = cont {
        m0 += c.m0;
        dm0 += c.dm0;
        m1 += c.m1;
    }
    PointValues { m0, dm0, m1 }
}

/// Pure-soliton reconstruction on a grid.
pub fn reconstruct_reflectionless(data: &ScatteringData, xs: &[f64], t: f64) -> Result<ReflectionlessOutput> {
    if !data.is_reflectionless() {
        return Err(Error::InvalidParameter("reflectionless reconstruction needs r ≡ 0".into()));
    }
    let poles = Poles::from_data(data);
    let dt = t - data.meta.t;
    let pts: Vec<PointValues> = xs.par_iter().map(|&x| solve_point(&poles, x, dt)).collect::<Result<_>>()?;
    let (state, sin_f, cos_f) = assemble(xs, t, data.meta.l_minus, &pts)?;
    let fx = pts.iter().map(|p| 0.5 * (p.g() + p.h())).collect();
    Ok(ReflectionlessOutput { state, sin_f, cos_f, fx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::KinkEig;

    #[test]
    fn empty_data_is_vacuum() {
        let d = ScatteringData::reflectionless(vec![], vec![]);
        let out = reconstruct_reflectionless(&d, &[-1.0, 0.0, 1.0], 0.0).unwrap();
        assert!(out.state.f.iter().all(|f| *f == 0.0));
        assert!(out.cos_f.iter().all(|c| *c == 1.0));
    }

    #[test]
    fn saturates_far_from_the_kink() {
        let d = ScatteringData::reflectionless(vec![KinkEig { zeta: 1.0, c: C::new(0.0, 2.0) }], vec![]);
        for x in [-2000.0, 2000.0] {
            let p = reflectionless_point(&d, x, 0.0).unwrap();
            assert!((p.cos_f() - 1.0).abs() < 1e-12 && p.sin_f().abs() < 1e-12);
        }
    }
}
