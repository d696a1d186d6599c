mod common;

use std::fs;

use common::*;
use milac::cli::format::parse_matrix_bytes;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn every_subcommand_is_deterministic() {
    for mode in ["digital", "analog"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for (sa, sb) in scenarios(a.path(), mode).iter().zip(scenarios(b.path(), mode).iter()) {
            let (ca, ba) = run_scenario(sa, a.path());
            let (cb, bb) = run_scenario(sb, b.path());
            assert_eq!(ca, 0, "{} ({mode}) failed", sa.name);
            assert_eq!(ca, cb);
            assert_eq!(ba, bb, "{} ({mode}) differs between runs", sa.name);
        }
    }
}

#[test]
fn modes_agree_on_fixtures() {
    let d = tempfile::tempdir().unwrap();
    let g = tempfile::tempdir().unwrap();
    for (sd, sg) in scenarios(d.path(), "digital").iter().filter(|s| s.name != "simulate").zip(scenarios(g.path(), "analog").iter()) {
        assert_eq!(sd.name, sg.name);
        assert_eq!(run_scenario(sd, d.path()).0, 0);
        assert_eq!(run_scenario(sg, g.path()).0, 0);
        for rel in &sd.outputs {
            let x = numbers(&fs::read(d.path().join(rel)).unwrap());
            let y = numbers(&fs::read(g.path().join(rel)).unwrap());
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            let worst = x.iter().zip(&y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            assert_eq!(x.len(), y.len());
            assert!(worst / scale <= 1e-8, "{} {rel}: {worst:e}", sd.name);
        }
    }
}

#[test]
fn invert_identity_reproduces_input() {
    let dir = tempfile::tempdir().unwrap();
    for mode in ["digital", "analog"] {
        let out = dir.path().join("inv.cmx");
        let run = milac(&["invert", "--matrix", s(&fixture("identity3.cmx")), "--mode", mode, "--out", s(&out)]);
        assert_eq!(code(&run), 0, "{}", stderr(&run));
        assert_eq!(fs::read(&out).unwrap(), fs::read(fixture("identity3.cmx")).unwrap(), "{mode}");
    }
}

#[test]
fn lossless_scalar_fixture() {
    let run = milac(&["lossless-verify", "--y", s(&fixture("scalar_j.cmx")), "--n", "1", "--y0", "1", "--input", s(&fixture("one.cvec"))]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let text = stdout(&run);
    let dev: f64 = text.lines().find_map(|l| l.strip_prefix("deviation=")).unwrap().parse().unwrap();
    assert!(dev <= 1e-12);
    assert!(text.contains("result=pass"));
}

#[test]
fn tolerance_from_environment_and_flag() {
    let (y, u) = (fixture("y_lossless.cmx"), fixture("u2.cvec"));
    let args = vec!["lossless-verify", "--y", s(&y), "--n", "2", "--input", s(&u)];
    assert_eq!(code(&milac(&args)), 0);
    let strict = milac_env(&args, &[("MILAC_TOL", "1e-300")]);
    assert_eq!(code(&strict), 1, "{}", stdout(&strict));
    assert!(stdout(&strict).contains("tol=1e-300"));
    let mut with_flag = args.clone();
    with_flag.extend(["--tol", "1e-6"]);
    assert_eq!(code(&milac_env(&with_flag, &[("MILAC_TOL", "1e-300")])), 0);
    assert_eq!(code(&milac_env(&args, &[("MILAC_TOL", "soon")])), 2);
}

#[test]
fn complexity_single_row() {
    let run = milac(&["complexity", "--op", "invert", "--sizes", "8192:8192:x2"]);
    assert_eq!(code(&run), 0);
    let text = stdout(&run);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "size,digital_ops,milac_ops,ratio");
    let ratio: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!((ratio - 5461.0).abs() < 1.0);
}

#[test]
fn cost_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.cvec");
    let run = milac(&[
        "lmmse", "--h", s(&fixture("h.cmx")), "--cx", s(&fixture("cx.cmx")), "--cn", s(&fixture("cn.cmx")),
        "--y", s(&fixture("y3.cvec")), "--mode", "analog", "--sign", "minus", "--out", s(&out), "--cost",
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let text = stdout(&run);
    for key in ["adds=", "subs=", "muls=", "divs=", "total=", "offline_total=", "physics_total="] {
        assert!(text.lines().any(|l| l.starts_with(key)), "{key} missing in {text}");
    }
    // 6XY + 3(X+Y) with X = 2, Y = 3.
    assert!(text.lines().any(|l| l == "total=51"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.cmx");
    let singular = milac(&["invert", "--matrix", s(&fixture("singular.cmx")), "--out", s(&out)]);
    assert_eq!(code(&singular), 1, "{}", stderr(&singular));
    assert!(stderr(&singular).contains("singular"));
    let singular_analog = milac(&["invert", "--matrix", s(&fixture("singular.cmx")), "--mode", "analog", "--out", s(&out)]);
    assert_eq!(code(&singular_analog), 1);

    let bad = dir.path().join("bad.cmx");
    fs::write(&bad, "2 2\n1 0 0 0\n0 0 x 0\n").unwrap();
    let parse = milac(&["invert", "--matrix", s(&bad), "--out", s(&out)]);
    assert_eq!(code(&parse), 2);
    assert!(stderr(&parse).contains("line 3, column 5"), "{}", stderr(&parse));

    assert_eq!(code(&milac(&["invert", "--matrix", "/nonexistent/p.cmx", "--out", s(&out)])), 2);
    assert_eq!(code(&milac(&["invert"])), 2);
    assert_eq!(code(&milac(&["frobnicate"])), 2);
    assert_eq!(code(&milac(&["complexity", "--op", "invert", "--sizes", "9:3:x2"])), 2);
    assert_eq!(code(&milac(&["--help"])), 0);

    // Covariance that is not positive definite is an input error.
    let cx = dir.path().join("cx.cmx");
    fs::write(&cx, "2 2\n1 0 2 0\n2 0 1 0\n").unwrap();
    let run = milac(&["cov", "--h", s(&fixture("h.cmx")), "--cx", s(&cx), "--cn", s(&fixture("cn.cmx")), "--out", s(&out)]);
    assert_eq!(code(&run), 2);
}

#[test]
fn kalman_reads_all_observations_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let f = |n: &str| fixture(n).display().to_string();
    let traj = dir.path().join("t");
    let run = milac(&[
        "kalman", "--a", &f("kalman/a.cmx"), "--h", &f("kalman/h.cmx"), "--m", &f("kalman/m.cmx"),
        "--ncov", &f("kalman/n.cmx"), "--x0", &f("kalman/x0.cvec"), "--r0", &f("kalman/r0.cmx"),
        "--obs", &f("kalman/obs"), "--out", s(&traj),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert!(traj.join("xhat_0005.cvec").exists());
    assert!(!traj.join("xhat_0006.cvec").exists());
}

#[test]
fn fuzzed_inputs_never_crash() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.cmx");
    let input = dir.path().join("in.cmx");
    let seed_file = fs::read(fixture("dense4.cmx")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..150 {
        let mut bytes = seed_file.clone();
        for _ in 0..rng.random_range(1..4) {
            let i = rng.random_range(0..bytes.len());
            match rng.random_range(0..3) {
                0 => bytes[i] = rng.random(),
                1 => {
                    bytes.remove(i);
                }
                _ => bytes.insert(i, rng.random()),
            }
        }
        fs::write(&input, &bytes).unwrap();
        let run = milac(&["invert", "--matrix", s(&input), "--out", s(&out)]);
        let c = code(&run);
        assert!(matches!(c, 0..=2), "crash with code {c}: {}", stderr(&run));
        if parse_matrix_bytes(&bytes).is_err() {
            assert_eq!(c, 2);
            assert!(stderr(&run).contains("line "), "{}", stderr(&run));
        }
    }
}
