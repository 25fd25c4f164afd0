use sg_ist::field::*;
use sg_ist::pde::*;

fn l2(a: &[f64], b: &[f64], h: f64) -> f64 {
    (a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>() * h).sqrt()
}

#[test]
fn static_kink_centre_drift() {
    let xs = uniform_grid(-30.0, 30.0, 0.02).unwrap();
    let st = eval_kink(&KinkParams::new(0.0, 0.0, 1).unwrap(), &xs, 0.0).unwrap();
    let cfg = SolverConfig::new(0.02, 0.01, 10.0, Boundary::PeriodicKinkSubtracted).unwrap();
    let tr = evolve(&st, &cfg, &[2.5, 5.0, 7.5, 10.0]).unwrap();
    for s in &tr.states {
        assert!(kink_center(s).unwrap().abs() < 1e-3);
    }
}

#[test]
fn breather_period_error_is_second_order() {
    let b = BreatherParams::new(0.5, 0.0, 0.0, 0.0).unwrap();
    let t_end = b.period();
    let err = |h: f64| {
        let xs = uniform_grid(-30.0, 30.0, h).unwrap();
        let st = eval_breather(&b, &xs, 0.0).unwrap();
        let cfg = SolverConfig::new(h, h / 2.0, t_end, Boundary::PeriodicKinkSubtracted).unwrap();
        let tr = evolve(&st, &cfg, &[t_end]).unwrap();
        let s = &tr.states[0];
        let exact = eval_breather(&b, &xs, s.t).unwrap();
        l2(&s.f, &exact.f, h)
    };
    // the period is not a multiple of dt; rounding the step count costs O(dt²) too
    let ratio = err(0.04) / err(0.02);
    assert!((3.6..=4.4).contains(&ratio), "{ratio}");
}

#[test]
fn boosted_kink_momentum() {
    let xs = uniform_grid(-40.0, 40.0, 0.02).unwrap();
    let st = eval_kink(&KinkParams::new(0.4, 10.0, 1).unwrap(), &xs, 0.0).unwrap();
    let cfg = SolverConfig::new(0.02, 0.01, 40.0, Boundary::PeriodicKinkSubtracted).unwrap();
    let tr = evolve(&st, &cfg, &[0.0, 10.0, 20.0, 30.0, 40.0]).unwrap();
    let p0 = tr.log[0].p;
    for r in &tr.log {
        assert!(((r.p - p0) / p0).abs() < 1e-6, "{} vs {p0}", r.p);
    }
}

#[test]
fn kink_antikink_collision_is_elastic() {
    let h = 0.02;
    let xs = uniform_grid(-60.0, 60.0, h).unwrap();
    let v = 0.5;
    // kink from the left moving right, antikink from the right moving left
    let k = KinkParams::new(v, 20.0, 1).unwrap();
    let a = KinkParams::new(-v, -20.0, -1).unwrap();
    let f = Superposition(vec![Box::new(k), Box::new(a)]).sample(&xs, 0.0).unwrap();
    let cfg = SolverConfig::new(h, h / 2.0, 80.0, Boundary::PeriodicKinkSubtracted).unwrap();
    let tr = evolve(&f, &cfg, &[5.0, 10.0, 70.0, 75.0]).unwrap();
    // left-most crossing of |f| = π: the kink before the pass-through, the
    // antikink (now dropping to -2π) after it
    let pi = std::f64::consts::PI;
    let centre = |s: &FieldState| {
        let i = s.f.iter().position(|&v| v.abs() > pi).unwrap();
        let (a, b) = (s.f[i - 1].abs() - pi, s.f[i].abs() - pi);
        s.xs[i - 1] + h * a / (a - b)
    };
    let before = (centre(&tr.states[1]) - centre(&tr.states[0])) / 5.0;
    let after = (centre(&tr.states[3]) - centre(&tr.states[2])) / 5.0;
    assert!((before - v).abs() < 1e-3, "{before}");
    assert!((after + v).abs() < 1e-3, "{after}");
}

#[test]
fn time_reversal_returns_the_initial_state() {
    let xs = uniform_grid(-40.0, 40.0, 0.05).unwrap();
    let st = eval_breather(&BreatherParams::new(0.6, 0.1, 0.0, 0.0).unwrap(), &xs, 0.0).unwrap();
    let run = |dt: f64| {
        let cfg = SolverConfig::new(0.05, dt, 5.0, Boundary::PeriodicKinkSubtracted).unwrap();
        let mut s = evolve(&st, &cfg, &[5.0]).unwrap().states.remove(0);
        s.ft.iter_mut().for_each(|v| *v = -*v);
        s.t = 0.0;
        let mut back = evolve(&s, &cfg, &[5.0]).unwrap().states.remove(0);
        back.ft.iter_mut().for_each(|v| *v = -*v);
        back.f.iter().zip(&st.f).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (run(0.02), run(0.01));
    assert!(e1 < 1e-3, "{e1}");
    assert!(e1 / e2 > 3.0, "{e1} {e2}");
}

#[test]
fn translation_by_one_cell() {
    let h = 0.05;
    let xs = uniform_grid(-20.0, 20.0, h).unwrap();
    let bump = |x: f64| 0.3 * (-(x - 1.0) * (x - 1.0)).exp();
    let a = FieldState::new(xs.clone(), xs.iter().map(|&x| bump(x)).collect(), vec![0.0; xs.len()], 0.0).unwrap();
    let mut shifted = a.f.clone();
    shifted.rotate_right(1);
    let b = FieldState::new(xs.clone(), shifted, vec![0.0; xs.len()], 0.0).unwrap();
    let cfg = SolverConfig::new(h, 0.025, 3.0, Boundary::PeriodicKinkSubtracted).unwrap();
    let (sa, sb) = (evolve(&a, &cfg, &[3.0]).unwrap(), evolve(&b, &cfg, &[3.0]).unwrap());
    let (fa, fb) = (&sa.states[0].f, &sb.states[0].f);
    let n = fa.len();
    for i in 0..n {
        assert_eq!(fb[(i + 1) % n], fa[i]);
    }
}

#[test]
fn sponge_absorbs_radiation() {
    let xs = uniform_grid(-30.0, 30.0, 0.05).unwrap();
    let st = FieldState::new(xs.clone(), xs.iter().map(|x| 0.2 * (-x * x).exp()).collect(), vec![0.0; xs.len()], 0.0).unwrap();
    let cfg = SolverConfig::new(0.05, 0.025, 60.0, Boundary::Sponge { width: 10.0, strength: 1.0 }).unwrap();
    let tr = evolve(&st, &cfg, &[0.0, 60.0]).unwrap();
    assert!(tr.log[1].e < 0.2 * tr.log[0].e, "{:?}", tr.log);
}

#[test]
fn residual_of_exact_solutions() {
    let xs: Vec<f64> = (-20..=20).map(|k| 0.5 * k as f64).collect();
    let zero = |_: f64, _: f64| FieldPoint::default();
    assert_eq!(residual_max(&zero, &xs, 1.0, 0.01), 0.0);
    let k = KinkParams::new(0.0, 0.0, 1).unwrap();
    let w = WobblerParams::exact(0.2).unwrap();
    for r in [residual_max(&k, &xs, 0.3, 0.02) / residual_max(&k, &xs, 0.3, 0.01), residual_max(&w, &xs, 0.3, 0.02) / residual_max(&w, &xs, 0.3, 0.01)] {
        assert!((3.6..=4.4).contains(&r), "{r}");
    }
    // off the exact branch the wobbler is not a solution
    let off = WobblerParams::new(0.2, 0.5).unwrap();
    assert!(residual_max(&off, &xs, 0.3, 0.01) > 1e-2);
}
