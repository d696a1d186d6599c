#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn milac(args: &[&str]) -> Output {
    milac_env(args, &[])
}

pub fn milac_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_milac"));
    cmd.args(args).env_remove("MILAC_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn milac")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Invocation of one subcommand on the bundled fixtures, writing into `dir`.
pub struct Scenario {
    pub name: &'static str,
    pub args: Vec<String>,
    /// Output paths relative to `dir`.
    pub outputs: Vec<&'static str>,
}

pub fn scenarios(dir: &Path, mode: &str) -> Vec<Scenario> {
    let f = |n: &str| fixture(n).display().to_string();
    let o = |n: &str| dir.join(n).display().to_string();
    let strs = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut list = vec![
        Scenario {
            name: "simulate",
            args: strs(&["simulate", "--network", &f("grid4.cmx"), "--y0", "0.02", "--n", "2", "--input", &f("u2.cvec"), "--out", &o("v.cvec"), "--cost"]),
            outputs: vec!["v.cvec"],
        },
        Scenario {
            name: "lmmse",
            args: strs(&["lmmse", "--h", &f("h.cmx"), "--cx", &f("cx.cmx"), "--cn", &f("cn.cmx"), "--y", &f("y3.cvec"), "--mode", mode, "--out", &o("xhat.cvec"), "--cost"]),
            outputs: vec!["xhat.cvec"],
        },
        Scenario {
            name: "cov",
            args: strs(&["cov", "--h", &f("h.cmx"), "--cx", &f("cx.cmx"), "--cn", &f("cn.cmx"), "--mode", mode, "--out", &o("ce.cmx"), "--cost"]),
            outputs: vec!["ce.cmx"],
        },
        Scenario {
            name: "invert",
            args: strs(&["invert", "--matrix", &f("dense4.cmx"), "--mode", mode, "--out", &o("pinv.cmx"), "--cost"]),
            outputs: vec!["pinv.cmx"],
        },
        Scenario {
            name: "kalman",
            args: strs(&[
                "kalman", "--a", &f("kalman/a.cmx"), "--h", &f("kalman/h.cmx"), "--m", &f("kalman/m.cmx"),
                "--ncov", &f("kalman/n.cmx"), "--x0", &f("kalman/x0.cvec"), "--r0", &f("kalman/r0.cmx"),
                "--obs", &f("kalman/obs"), "--steps", "5", "--mode", mode, "--out", &o("traj"), "--cost",
            ]),
            outputs: vec!["traj/xhat_0001.cvec", "traj/xhat_0005.cvec", "traj/r_0001.cmx", "traj/r_0005.cmx"],
        },
        Scenario {
            name: "lossless-verify",
            args: strs(&["lossless-verify", "--y", &f("y_lossless.cmx"), "--n", "2", "--y0", "0.02", "--input", &f("u2.cvec"), "--tol", "1e-9"]),
            outputs: vec![],
        },
        Scenario {
            name: "complexity",
            args: strs(&["complexity", "--op", "kalman", "--sizes", "16:8192:x2", "--out", &o("table.csv")]),
            outputs: vec!["table.csv"],
        },
    ];
    if mode == "analog" {
        list.retain(|s| !matches!(s.name, "simulate" | "lossless-verify" | "complexity"));
    }
    list
}

/// Stdout plus the bytes of every declared output.
pub fn run_scenario(sc: &Scenario, dir: &Path) -> (i32, Vec<u8>) {
    let args: Vec<&str> = sc.args.iter().map(String::as_str).collect();
    let out = milac(&args);
    let mut bytes = out.stdout.clone();
    for rel in &sc.outputs {
        bytes.extend(std::fs::read(dir.join(rel)).unwrap_or_default());
    }
    (code(&out), bytes)
}

/// Parses every numeric token of a text file in order.
pub fn numbers(bytes: &[u8]) -> Vec<f64> {
    String::from_utf8_lossy(bytes)
        .lines()
        .skip(1)
        .flat_map(|l| l.split_whitespace().map(|t| t.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .collect()
}
