use sg_ist::asymptotics::*;
use sg_ist::field::*;
use sg_ist::inverse::*;
use sg_ist::scattering::*;
use sg_ist::Complex64 as C;

fn scattered(f: impl Fn(f64) -> (f64, f64)) -> ScatteringData {
    let xs = uniform_grid(-30.0, 30.0, 0.05).unwrap();
    let (f, ft): (Vec<f64>, Vec<f64>) = xs.iter().map(|&x| f(x)).unzip();
    scatter(&FieldState::new(xs.clone(), f, ft, 0.0).unwrap(), &ScatterOptions::default()).unwrap()
}

fn radiation() -> ScatteringData {
    scattered(|x| (0.4 * (-x * x / 2.0).exp(), 0.3 * x * (-x * x / 2.0).exp()))
}

fn with_bump(p: FieldPoint, x: f64) -> (f64, f64) {
    (p.f + 0.2 * (-(x - 2.0) * (x - 2.0)).exp(), p.ft)
}

fn kink_and_radiation() -> ScatteringData {
    let k = KinkParams::new(0.3, 0.0, 1).unwrap();
    scattered(|x| with_bump(k.eval(x, 0.0), x))
}

/// Largest gap in (cos f, sin f) between the leading term, the corrected
/// total and the full inverse transform over a window around x = vt.
fn gaps(data: &ScatteringData, v: f64, t: f64, cfg: &AsymptoticsConfig) -> (f64, f64, FrameKind) {
    let xs: Vec<f64> = (-4..=4).map(|j| v * t + 0.5 * j as f64).collect();
    let full = reconstruct_full(data, &xs, t, &FullConfig::default()).unwrap();
    let (mut lead, mut total) = (0.0f64, 0.0f64);
    let mut kind = FrameKind::Exterior;
    for (i, &x) in xs.iter().enumerate() {
        let a = asymptote(data, x, t, cfg).unwrap();
        kind = a.frame;
        let (c, s) = (full.state.f[i].cos(), full.state.f[i].sin());
        lead = lead.max((a.cos_lead - c).abs().max((a.sin_lead - s).abs()));
        total = total.max((a.cos_total - c).abs().max((a.sin_total - s).abs()));
    }
    (lead, total, kind)
}

#[test]
fn solitonless_frame_against_the_full_transform() {
    let d = radiation();
    assert!(d.kinks.is_empty() && d.breathers.is_empty());
    let (lead, total, kind) = gaps(&d, 0.4, 40.0, &AsymptoticsConfig::default());
    assert_eq!(kind, FrameKind::Solitonless);
    assert!(total < 4e-3 && total < lead / 10.0, "{lead} {total}");
}

#[test]
fn kink_frame_against_the_full_transform() {
    let d = kink_and_radiation();
    assert_eq!(d.kinks.len(), 1);
    let (lead, total, kind) = gaps(&d, d.kinks[0].velocity(), 40.0, &AsymptoticsConfig::default());
    assert_eq!(kind, FrameKind::Kink(0));
    assert!(total < 3e-3 && total < lead / 4.0, "{lead} {total}");
}

#[test]
fn breather_frame_against_the_full_transform() {
    let b = BreatherParams::new(0.6, -0.3, 0.0, 0.0).unwrap();
    let d = scattered(|x| with_bump(b.eval(x, 0.0), x));
    assert_eq!((d.kinks.len(), d.breathers.len()), (0, 1));
    let (lead, total, kind) = gaps(&d, d.breathers[0].velocity(), 40.0, &AsymptoticsConfig::default());
    assert_eq!(kind, FrameKind::Breather(0));
    assert!(total < 2e-3 && total < lead / 4.0, "{lead} {total}");
}

#[test]
fn sign_of_the_discrete_sum() {
    // in the frame v = -0.5 the kink is in the dressing set, so the sign matters
    let d = kink_and_radiation();
    let t = 60.0;
    let fr = frame(&d, -0.5 * t, t, &AsymptoticsConfig::default()).unwrap();
    assert_eq!(BSet::for_frame(&d, &fr).kink_count(), 1);
    let run = |sum_sign| gaps(&d, -0.5, t, &AsymptoticsConfig { sum_sign, ..Default::default() }).1;
    let (derived, alternative) = (run(DiscreteSumSign::Derived), run(DiscreteSumSign::Alternative));
    assert!(derived < 1e-3 && alternative > 10.0 * derived, "{derived} {alternative}");
}

#[test]
fn one_slow_kink_flips_delta_at_the_origin() {
    let d = ScatteringData::reflectionless(vec![KinkEig { zeta: 0.4, c: C::new(0.0, 1.0) }], vec![]);
    let fr = AsymptoticFrame { v: 0.0, z0: Some(1.0), tau: 5.0, kind: FrameKind::Solitonless };
    let delta = Delta::new(&d, &fr, &AsymptoticsConfig::default()).unwrap();
    let d0 = delta.eval(C::new(0.0, 1e-9)).unwrap();
    assert!((d0 + 1.0).norm() < 1e-6, "{d0}");
}

#[test]
fn reflectionless_data_has_no_radiation() {
    let d = ScatteringData::reflectionless(vec![], vec![]);
    let cfg = AsymptoticsConfig::default();
    let fr = frame(&d, 10.0, 50.0, &cfg).unwrap();
    let c = pc_constants(&d, &fr, &cfg).unwrap();
    assert!(c.degenerate && c.kappa == 0.0 && c.beta12.norm() == 0.0);
    assert_eq!(radiation_solitonless(&d, 10.0, 50.0, &cfg).unwrap(), (1.0, 0.0));
}

#[test]
fn undressed_breather_is_the_breather() {
    let z = C::from_polar(1.1, 1.0);
    let c = C::new(0.5, -0.8);
    let d = ScatteringData::reflectionless(vec![], vec![BreatherEig { z, c }]);
    let cfg = AsymptoticsConfig::default();
    let v = d.breathers[0].velocity();
    let t = 30.0;
    for dx in [-1.0, 0.0, 0.7] {
        let x = v * t + dx;
        let a = dressed_breather(&d, 0, x, t, &cfg).unwrap();
        let (cs, sn) = breather_closed_form(z, c, x, t);
        assert!((a.cos_lead - cs).abs() < 1e-10 && (a.sin_lead - sn).abs() < 1e-10);
        assert_eq!((a.r_cos, a.r_sin), (0.0, 0.0));
        let m = breather_m0_closed_form(z, c, x, t);
        assert!((m.determinant() - 1.0).norm() < 1e-12);
    }
}

#[test]
fn correction_coefficients_stay_bounded() {
    // R is reported as the τ^{-1/2} coefficient, so it should not grow with t
    let d = radiation();
    let cfg = AsymptoticsConfig::default();
    let r: Vec<f64> = [25.0, 100.0, 400.0]
        .iter()
        .map(|&t| (0..20).map(|j| asymptote(&d, 0.4 * t + 0.3 * j as f64, t, &cfg).unwrap().r_sin.abs()).fold(0.0, f64::max))
        .collect();
    assert!(r.iter().all(|v| *v > 1e-3 && *v < 1.0), "{r:?}");
    assert!(r[2] / r[0] < 2.0 && r[0] / r[2] < 2.0, "{r:?}");
}

#[test]
fn frames_outside_the_cone() {
    let d = radiation();
    let cfg = AsymptoticsConfig::default();
    let a = asymptote(&d, 60.0, 40.0, &cfg).unwrap();
    assert_eq!(a.frame, FrameKind::Exterior);
    assert_eq!((a.cos_total, a.sin_total), (1.0, 0.0));
    assert!(asymptote(&d, 1.0, 0.0, &cfg).is_err());
}
