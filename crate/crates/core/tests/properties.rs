use proptest::prelude::*;
use sg_ist::diagnostics::fit_decay_exponent;
use sg_ist::field::*;
use sg_ist::inverse::reconstruct_reflectionless;
use sg_ist::scattering::*;
use sg_ist::Complex64 as C;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reflectionless_fields_are_unimodular(
        zeta in 0.3f64..2.5,
        b in prop_oneof![-3.0f64..-0.2, 0.2f64..3.0],
        rho in 0.5f64..1.8,
        phi in 0.3f64..1.3,
        cr in -1.0f64..1.0,
        ci in -1.0f64..1.0,
        t in -3.0f64..3.0,
    ) {
        prop_assume!(C::new(cr, ci).norm() > 0.1);
        let d = ScatteringData::reflectionless(
            vec![KinkEig { zeta, c: C::new(0.0, b) }],
            vec![BreatherEig { z: C::from_polar(rho, phi), c: C::new(cr, ci) }],
        );
        let xs: Vec<f64> = (-20..=20).map(|k| 0.5 * k as f64).collect();
        let out = reconstruct_reflectionless(&d, &xs, t).unwrap();
        for i in 0..xs.len() {
            prop_assert!((out.sin_f[i].powi(2) + out.cos_f[i].powi(2) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn power_laws_are_fitted_exactly(p in -3.0f64..1.0, a in 0.01f64..100.0, t0 in 1.0f64..50.0) {
        let s: Vec<(f64, f64)> = (0..8).map(|k| {
            let t = t0 * 1.5f64.powi(k);
            (t, a * t.powf(p))
        }).collect();
        let fit = fit_decay_exponent(&s).unwrap();
        prop_assert!((fit.slope - p).abs() < 1e-10);
    }

    #[test]
    fn reflection_is_symmetric(amp in 0.05f64..0.6, width in 0.5f64..2.0, z in 0.3f64..3.0) {
        let xs = uniform_grid(-25.0, 25.0, 0.05).unwrap();
        let f = xs.iter().map(|x| amp * (-(x / width).powi(2)).exp()).collect();
        let ft = xs.iter().map(|x| 0.5 * amp * x * (-(x / width).powi(2)).exp()).collect();
        let st = FieldState::new(xs, f, ft, 0.0).unwrap();
        let cfg = JostConfig::default();
        let (p, m) = (scattering_matrix(&st, z, &cfg).unwrap(), scattering_matrix(&st, -z, &cfg).unwrap());
        // r(−z) = conj r(z) for real initial data
        prop_assert!((m.r() - p.r().conj()).norm() < 1e-7);
        prop_assert!((p.det() - 1.0).norm() < 1e-7);
    }
}
