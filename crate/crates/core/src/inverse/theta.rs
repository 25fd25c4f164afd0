use crate::Complex64;

/// θ(z; x, t) = ¼((z − 1/z)x + (z + 1/z)t).
pub fn theta(z: Complex64, x: f64, t: f64) -> Complex64 {
    0.25 * ((z - 1.0 / z) * x + (z + 1.0 / z) * t)
}

/// θ̃(z; x, t) = ¼((z + 1/z)x + (z − 1/z)t).
pub fn theta_tilde(z: Complex64, x: f64, t: f64) -> Complex64 {
    0.25 * ((z + 1.0 / z) * x + (z - 1.0 / z) * t)
}

/// Re(iθ), the exponent governing every decay estimate:
/// ¼η[(t − x)/(ξ² + η²) − (t + x)] for z = ξ + iη.
pub fn re_i_theta(z: Complex64, x: f64, t: f64) -> f64 {
    (Complex64::i() * theta(z, x, t)).re
}

/// The stationary point z₀ = √((t − x)/(t + x)) of θ for |x| < t.
pub fn stationary_point(x: f64, t: f64) -> Option<f64> {
    (t > 0.0 && x.abs() < t).then(|| ((t - x) / (t + x)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_and_real_on_the_axis() {
        for z in [0.3, 1.7, -2.2] {
            let zc = Complex64::new(z, 0.0);
            assert_eq!(theta(-zc, 1.3, 0.4), -theta(zc, 1.3, 0.4));
            assert_eq!(theta(zc, 1.3, 0.4).im, 0.0);
            assert_eq!(re_i_theta(zc, 1.3, 0.4), 0.0);
        }
        assert!(re_i_theta(Complex64::i(), 0.0, 1.0).abs() < 1e-16);
    }

    #[test]
    fn stationary_point_is_critical() {
        let (x, t) = (0.4, 2.0);
        let z0 = stationary_point(x, t).unwrap();
        // complex-step style central difference of θ′
        let e = 1e-6;
        let d = (theta(Complex64::new(z0 + e, 0.0), x, t) - theta(Complex64::new(z0 - e, 0.0), x, t)) / (2.0 * e);
        assert!(d.norm() < 1e-9);
        assert!(stationary_point(3.0, 2.0).is_none());
    }
}
