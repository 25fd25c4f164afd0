use sg_ist::io;
use sg_ist::scattering::{BreatherEig, KinkEig, ScatteringData};
use sg_ist::Complex64 as C;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sg() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sg-ist"));
    c.env_remove("SG_IST_THREADS");
    c
}

fn ok(out: Output) -> Output {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect()
}

fn two_soliton(path: &Path) {
    let d = ScatteringData::reflectionless(
        vec![KinkEig { zeta: 0.8, c: C::new(0.0, 1.5) }],
        vec![BreatherEig { z: C::from_polar(1.0, 1.0), c: C::new(0.4, -0.6) }],
    );
    io::write_scattering_json(path, &d).unwrap();
}

#[test]
fn exact_kink_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("kink.csv");
    ok(sg().args(["exact", "kink", "--grid=-20:20:0.5", "--out"]).arg(&out).output().unwrap());
    let header = fs::read_to_string(&out).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "x,f,ft");
    let r = rows(&out);
    let mid = r.iter().find(|row| row[0] == 0.0).unwrap();
    assert_eq!(mid[1], std::f64::consts::PI);
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("kink.json")).unwrap()).unwrap();
    assert_eq!((side["t"].as_f64(), side["l_minus"].as_i64(), side["l_plus"].as_i64()), (Some(0.0), Some(0), Some(1)));
}

#[test]
fn exact_breather_vanishes_at_the_ends() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    ok(sg().args(["exact", "breather", "--beta", "0.5", "--v", "-0.2", "--grid=-40:40:0.1", "--t", "3", "--out"]).arg(&out).output().unwrap());
    let r = rows(&out);
    for row in [&r[0], &r[r.len() - 1]] {
        assert!(row[1].abs() < 1e-6 && row[2].abs() < 1e-6, "{row:?}");
    }
}

#[test]
fn nsoliton_and_invert_agree_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.json");
    two_soliton(&data);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    ok(sg().args(["exact", "nsoliton", "--grid=-15:15:0.1", "--t", "1.5", "--spec"]).arg(&data).arg("--out").arg(&a).output().unwrap());
    ok(sg().args(["invert", "--grid=-15:15:0.1", "--t", "1.5", "--data"]).arg(&data).arg("--out").arg(&b).output().unwrap());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn reruns_and_thread_counts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.json");
    two_soliton(&data);
    let mut outs = Vec::new();
    for (k, threads) in ["1", "4", "4"].iter().enumerate() {
        let out = dir.path().join(format!("{k}.csv"));
        ok(sg().env("SG_IST_THREADS", threads).args(["invert", "--grid=-10:10:0.05", "--data"]).arg(&data).arg("--out").arg(&out).output().unwrap());
        outs.push(fs::read(&out).unwrap());
    }
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
    let bad = sg().env("SG_IST_THREADS", "many").args(["invert", "--grid=-1:1:0.5", "--data"]).arg(&data).arg("--out").arg(dir.path().join("x.csv")).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("SG_IST_THREADS"));
}

#[test]
fn configuration_printing_and_overrides() {
    let out = ok(sg().arg("--print-config").output().unwrap());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("pde.dt = 0.025") && text.contains("# leapfrog time step"));
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    fs::write(&file, "# a comment\npde.dt = 0.01\n\ncompare.v=0.5\n").unwrap();
    let out = ok(sg().arg("--config").arg(&file).args(["--set", "compare.v=0.7", "--print-config"]).output().unwrap());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("pde.dt = 0.01") && text.contains("compare.v = 0.7"));
    fs::write(&file, "pde.dtt = 0.01\n").unwrap();
    let bad = sg().arg("--config").arg(&file).arg("--print-config").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn scatter_then_asymptote() {
    let dir = tempfile::tempdir().unwrap();
    let (kink, data, asym) = (dir.path().join("k.csv"), dir.path().join("k.json.out"), dir.path().join("as.csv"));
    ok(sg().args(["exact", "kink", "--beta", "0.3", "--grid=-30:30:0.05", "--out"]).arg(&kink).output().unwrap());
    ok(sg().arg("scatter").arg("--input").arg(&kink).arg("--out").arg(&data).output().unwrap());
    let d = io::read_scattering_json(&data).unwrap();
    assert_eq!((d.kinks.len(), d.breathers.len()), (1, 0));
    assert!((d.kinks[0].velocity() - 0.3).abs() < 1e-6);
    ok(sg().args(["asymptote", "--grid=-20:20:10", "--t", "40", "--data"]).arg(&data).arg("--out").arg(&asym).output().unwrap());
    let text = fs::read_to_string(&asym).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,t,frame,cos_lead,sin_lead,R_cos,R_sin,cos_total,sin_total");
    assert_eq!(lines.count(), 5);
}

#[test]
fn evolve_writes_checkpoints_and_energy() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("b.csv");
    ok(sg().args(["exact", "breather", "--beta", "0.5", "--grid=-30:30:0.05", "--out"]).arg(&b).output().unwrap());
    let run = dir.path().join("run");
    ok(sg().arg("evolve").arg("--input").arg(&b).args(["--times", "0,1,2"]).arg("--out-dir").arg(&run).output().unwrap());
    let energy = fs::read_to_string(run.join("energy.csv")).unwrap();
    assert_eq!(energy.lines().next().unwrap(), "t,E,P");
    let e = rows(&run.join("energy.csv"));
    assert_eq!(e.len(), 3);
    // the logged energy is conserved up to O(dt⁴) at the default step
    assert!(e.iter().all(|r| ((r[1] - e[0][1]) / e[0][1]).abs() < 1e-6));
    let last = io::read_field_csv(&run.join("state_002.csv")).unwrap();
    assert!((last.t - 2.0).abs() < 1e-12);
}

#[test]
fn norms_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    ok(sg().args(["exact", "kink", "--grid=-30:30:0.01", "--out"]).arg(&a).output().unwrap());
    ok(sg().args(["exact", "kink", "--x0", "0.5", "--grid=-30:30:0.01", "--out"]).arg(&b).output().unwrap());
    let m = dir.path().join("m.json");
    let out = ok(sg().arg("norms").arg("--input").arg(&a).arg("--against").arg(&b).args(["--window=-5:5", "--out"]).arg(&m).output().unwrap());
    // s = 0 norm of the static kink is 10
    let text = String::from_utf8(out.stdout).unwrap();
    let v: f64 = text.split("norm_sq=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!((v - 10.0).abs() < 1e-8, "{text}");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
    for key in ["max", "l2", "windowed_l2", "slope", "stderr"] {
        assert!(json.get(key).is_some(), "{key} missing");
    }
    assert!(json["windowed_l2"].as_f64().unwrap() <= json["l2"].as_f64().unwrap());
}

#[test]
fn failed_gate_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let st = dir.path().join("bump.csv");
    let xs = sg_ist::field::uniform_grid(-60.0, 60.0, 0.1).unwrap();
    let f = xs.iter().map(|x| 0.2 / (1.0 + x * x)).collect();
    let state = sg_ist::field::FieldState::new(xs.clone(), f, vec![0.0; xs.len()], 0.0).unwrap();
    io::write_field_csv(&st, &state).unwrap();
    let run = |slope: &str| {
        sg().arg("compare").arg("--input").arg(&st).args(["--mode", "exterior", "--v", "2"]).arg("--out-dir").arg(dir.path().join(slope))
            .args(["--set", "compare.times=5,10,20", "--set", "pde.h=0.1", "--set", "pde.dt=0.05"])
            .args(["--set", &format!("gate.exterior_slope={slope}")])
            .output()
            .unwrap()
    };
    let fail = run("-100");
    assert_eq!(fail.status.code(), Some(3), "{}", String::from_utf8_lossy(&fail.stderr));
    assert!(String::from_utf8_lossy(&fail.stdout).starts_with("FAIL exterior-slope"));
    let pass = ok(run("100"));
    assert!(String::from_utf8_lossy(&pass.stdout).starts_with("PASS exterior-slope"));
    for f in ["energy.csv", "compare.csv", "metrics.json"] {
        assert!(dir.path().join("100").join(f).exists(), "{f}");
    }
}
