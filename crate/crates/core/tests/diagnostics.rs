use sg_ist::diagnostics::*;
use sg_ist::field::*;
use sg_ist::inverse::reconstruct_reflectionless;
use sg_ist::pde::{evolve, Boundary, SolverConfig};
use sg_ist::scattering::{BreatherEig, ScatteringData};
use sg_ist::Complex64 as C;

#[test]
fn static_kink_norm_closed_form() {
    // f_x = 2 sech x and sin(f/2) = sech x, so the s = 0 norm is ∫5 sech² = 10
    let xs = uniform_grid(-30.0, 30.0, 0.01).unwrap();
    let k = eval_kink(&KinkParams::new(0.0, 0.0, 1).unwrap(), &xs, 0.0).unwrap();
    let spec = WeightedNormSpec::weighted(0.0, NormKind::H1SinL2s).unwrap();
    assert!((weighted_norm_sq(&k, &spec).unwrap() - 10.0).abs() < 1e-8);
    let spec = WeightedNormSpec::weighted(0.0, NormKind::L2s).unwrap();
    assert!((weighted_norm_sq(&k, &spec).unwrap() - 2.0).abs() < 1e-8);
    // a weight grows the norm, and the kink tail then trips the truncation check
    let spec = WeightedNormSpec::weighted(0.5, NormKind::H1SinL2s).unwrap();
    assert!(weighted_norm_sq(&k, &spec).unwrap() > 10.0);
    let short = uniform_grid(-5.0, 5.0, 0.01).unwrap();
    let k = eval_kink(&KinkParams::new(0.0, 0.0, 1).unwrap(), &short, 0.0).unwrap();
    assert!(weighted_norm_sq(&k, &spec).is_err());
}

#[test]
fn small_breather_norms() {
    // f ≈ 4β sech(βx) at rest and f_t ≈ 4β sech(βx) a quarter period later,
    // which give 8β (up to O(β³)) and 32β for the s = 0 norm
    let xs = uniform_grid(-800.0, 800.0, 0.1).unwrap();
    let spec = WeightedNormSpec::weighted(0.0, NormKind::H1SinL2s).unwrap();
    for beta in [0.1, 0.05] {
        let (rest, moving) = breather_norms(beta, &spec, &xs).unwrap();
        assert!((rest / beta - 8.0).abs() < 10.0 * beta * beta, "{rest}");
        assert!((moving / beta - 32.0).abs() < 1e-6, "{moving}");
    }
    let mut last = 0.0;
    for s in [0.0, 0.25, 0.5, 1.0] {
        let spec = WeightedNormSpec::weighted(s, NormKind::H1SinL2s).unwrap();
        let (a, _) = breather_norms(0.1, &spec, &xs).unwrap();
        assert!(a > last, "{s}: {a}");
        last = a;
    }
}

#[test]
fn wobbler_minus_kink_vanishes_with_beta() {
    let xs = uniform_grid(-400.0, 400.0, 0.05).unwrap();
    let spec = WeightedNormSpec::weighted(0.25, NormKind::H1SinL2s).unwrap().homogeneous();
    let n: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&b| wobbler_kink_norm(b, &spec, &xs).unwrap()).collect();
    assert!(n[0] > n[1] && n[1] > n[2], "{n:?}");
}

#[test]
fn decay_fits() {
    let ts: Vec<f64> = (0..20).map(|k| 50.0 * (10.0f64).powf(k as f64 / 19.0)).collect();
    let exact: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 3.0 * t.powf(-1.5))).collect();
    let fit = fit_decay_exponent(&exact).unwrap();
    assert!((fit.slope + 1.5).abs() < 1e-12 && (fit.intercept - 3f64.ln()).abs() < 1e-10);
    assert!(fit.stderr < 1e-12);
    let wobbly: Vec<(f64, f64)> = ts.iter().map(|&t| (t, t.powf(-0.75) * (1.0 + 0.1 * t.sin()))).collect();
    let fit = fit_decay_exponent(&wobbly).unwrap();
    assert!((fit.slope + 0.75).abs() < 0.03 && fit.stderr > 0.0, "{fit:?}");
    let flat: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 0.2)).collect();
    assert!(fit_decay_exponent(&flat).unwrap().slope.abs() < 1e-14);
    assert!(fit_decay_exponent(&exact[..2]).is_err());
    assert!(fit_decay_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
}

#[test]
fn shifted_kinks_drift_apart() {
    let xs = uniform_grid(-30.0, 30.0, 0.02).unwrap();
    let k0 = eval_kink(&KinkParams::new(0.0, 0.0, 1).unwrap(), &xs, 0.0).unwrap();
    let mut last = 0.0;
    for shift in [0.0, 0.1, 0.5, 1.0, 2.0] {
        let k = eval_kink(&KinkParams::new(0.0, shift, 1).unwrap(), &xs, 0.0).unwrap();
        let m = compare_fields(&k0, &k, None).unwrap();
        assert!(m.l2 >= last && m.max <= 2.0 * std::f64::consts::PI);
        assert_eq!(m.l2, m.windowed_l2);
        last = m.l2;
    }
    assert!(last > 1.0);
}

#[test]
fn comparison_on_a_shared_lattice() {
    let a = FieldState::zeros(uniform_grid(-10.0, 10.0, 0.1).unwrap(), 0.0).unwrap();
    let b = FieldState::zeros(uniform_grid(-5.0, 12.0, 0.1).unwrap(), 0.0).unwrap();
    assert!(compare_fields(&a, &b, None).is_err());
    assert_eq!(compare_fields(&a, &b, Some((-4.0, 4.0))).unwrap().max, 0.0);
    let c = FieldState::zeros(uniform_grid(-10.0, 10.0, 0.05).unwrap(), 0.0).unwrap();
    assert!(compare_fields(&a, &c, Some((-4.0, 4.0))).is_err());
}

#[test]
fn pde_against_the_reflectionless_inverse() {
    let z = C::from_polar(1.0, 0.9);
    let data = ScatteringData::reflectionless(vec![], vec![BreatherEig { z, c: C::new(0.7, 0.4) }]);
    let xs = uniform_grid(-40.0, 40.0, 0.02).unwrap();
    let st = reconstruct_reflectionless(&data, &xs, 0.0).unwrap().state;
    let cfg = SolverConfig::new(0.02, 0.01, 5.0, Boundary::PeriodicKinkSubtracted).unwrap();
    let pde = evolve(&st, &cfg, &[5.0]).unwrap().states.remove(0);
    let ist = reconstruct_reflectionless(&data, &xs, 5.0).unwrap().state;
    let m = compare_fields(&pde, &ist, Some((-15.0, 15.0))).unwrap();
    assert!(m.max < 1e-3, "{m:?}");
}

#[test]
fn localized_energy_of_dispersing_radiation() {
    let h = 0.05;
    let xs = uniform_grid(-200.0, 200.0, h).unwrap();
    let f = xs.iter().map(|x| 0.3 * (-x * x / 2.0).exp()).collect();
    let st = FieldState::new(xs.clone(), f, vec![0.0; xs.len()], 0.0).unwrap();
    let total = energy(&st);
    let cfg = SolverConfig::new(h, 0.025, 120.0, Boundary::PeriodicKinkSubtracted).unwrap();
    let times = [20.0, 40.0, 60.0, 80.0, 100.0, 120.0];
    let tr = evolve(&st, &cfg, &times).unwrap();
    let spec = WeightedNormSpec::localized(0.2, 5.0).unwrap();
    let samples: Vec<(f64, f64)> = tr.states.iter().map(|s| (s.t, localized_energy(s, &spec, s.t).unwrap())).collect();
    // the window never holds more than twice the conserved energy
    assert!(samples.iter().all(|&(_, e)| e <= 2.0 * total));
    let fit = fit_decay_exponent(&samples).unwrap();
    assert!(fit.slope <= -0.4, "{fit:?}");
}
