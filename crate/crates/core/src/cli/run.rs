use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::format::{parse_matrix, parse_vector, write_matrix_string, write_vector_string};
use super::{CliError, Command, Mode, ModelFiles, OpArg, SignArg, DEFAULT_TOL, TOL_ENV};
use crate::costmodel::{parse_sizes, speedup_table, table_csv, CostOp};
use crate::estimation::{
    cov_digital, cov_via_milac, invert_via_milac, lmmse_digital, lmmse_via_milac, Form, LinearObservationModel,
    Sign,
};
use crate::kalman::{kalman_run, DynamicalModel, FilterMode, FilterState, KalmanMeters};
use crate::lossless::{build_susceptance, extract_and_verify, permutation_identity_defect, simulate_lossless};
use crate::network::{simulate, ComponentGrid, MilacNetwork};
use crate::numerics::{gauss_invert, ComplexVector, CostMeter};

type Result<T> = std::result::Result<T, CliError>;

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be a positive finite number, got {v}")))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn print(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
}

fn print_cost(out: &mut dyn Write, enabled: bool, meter: &CostMeter, extra: &[(&str, &CostMeter)]) -> Result<()> {
    if !enabled {
        return Ok(());
    }
    let mut text = meter.summary_lines();
    for (name, m) in extra {
        text.push_str(&format!("{name}_total={}\n", m.total()));
    }
    print(out, &text)
}

fn load_model(files: &ModelFiles) -> Result<LinearObservationModel> {
    LinearObservationModel::new(parse_matrix(&files.h)?, parse_matrix(&files.cx)?, parse_matrix(&files.cn)?)
        .map_err(input_error)
}

/// Shape and definiteness problems in the inputs are usage errors.
fn input_error(e: crate::error::MilacError) -> CliError {
    if e.is_singular() {
        CliError::Numerical(e)
    } else {
        CliError::Usage(e.to_string())
    }
}

fn form(v: u8) -> Form {
    if v == 2 {
        Form::Two
    } else {
        Form::One
    }
}

fn sign(s: SignArg) -> Sign {
    match s {
        SignArg::Plus => Sign::Plus,
        SignArg::Minus => Sign::Minus,
    }
}

fn resolve_tol(explicit: Option<f64>) -> Result<f64> {
    if let Some(t) = explicit {
        return positive("tol", t);
    }
    match std::env::var(TOL_ENV) {
        Ok(raw) => raw
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| CliError::Usage(format!("{TOL_ENV}='{raw}' is not a positive number"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn numbered(dir: &Path, prefix: &str, t: usize, ext: &str) -> PathBuf {
    dir.join(format!("{prefix}_{t:04}.{ext}"))
}

fn count_observations(dir: &Path) -> Result<usize> {
    let entries = fs::read_dir(dir).map_err(|source| {
        CliError::Load(super::LoadError::Io { path: dir.display().to_string(), source })
    })?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("obs_") && n.ends_with(".cvec"))
        .collect();
    names.sort();
    Ok(names.len())
}

pub(super) fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Simulate { network, y0, n, input, out: dest, cost } => {
            let y0 = positive("y0", y0)?;
            let grid = ComponentGrid::new(parse_matrix(&network)?).map_err(input_error)?;
            let u = parse_vector(&input)?;
            let net = MilacNetwork::new(n, y0, grid).map_err(input_error)?;
            if u.len() != n {
                return Err(CliError::Usage(format!("input has length {}, expected {n}", u.len())));
            }
            let mut physics = CostMeter::new();
            let sol = simulate(&net, &u, &mut physics)?;
            write_file(&dest, &write_vector_string(&sol.v))?;
            print_cost(out, cost, &physics, &[])
        }
        Command::Lmmse { model, y, mode, sign: s, form: f, y0, out: dest, cost } => {
            let y0 = positive("y0", y0)?;
            let model = load_model(&model)?;
            let obs = parse_vector(&y)?;
            if obs.len() != model.y_dim() {
                return Err(CliError::Usage(format!("y has length {}, expected {}", obs.len(), model.y_dim())));
            }
            let result = match mode {
                Mode::Digital => lmmse_digital(&model, &obs, form(f))?,
                Mode::Analog => lmmse_via_milac(&model, &obs, sign(s), y0)?,
            };
            write_file(&dest, &write_vector_string(&result.xhat))?;
            let extra: &[(&str, &CostMeter)] = match mode {
                Mode::Digital => &[],
                Mode::Analog => &[("offline", &result.offline), ("physics", &result.physics)],
            };
            print_cost(out, cost, &result.meter, extra)
        }
        Command::Cov { model, mode, form: f, y0, out: dest, cost } => {
            let y0 = positive("y0", y0)?;
            let model = load_model(&model)?;
            let result = match mode {
                Mode::Digital => cov_digital(&model, form(f))?,
                Mode::Analog => cov_via_milac(&model, y0)?,
            };
            write_file(&dest, &write_matrix_string(&result.ce))?;
            let extra: &[(&str, &CostMeter)] = match mode {
                Mode::Digital => &[],
                Mode::Analog => &[("offline", &result.offline), ("physics", &result.physics)],
            };
            print_cost(out, cost, &result.meter, extra)
        }
        Command::Invert { matrix, mode, y0, out: dest, cost } => {
            let y0 = positive("y0", y0)?;
            let p = parse_matrix(&matrix)?;
            if !p.is_square() {
                return Err(CliError::Usage(format!("matrix is {}x{}, expected square", p.rows(), p.cols())));
            }
            match mode {
                Mode::Digital => {
                    let mut meter = CostMeter::new();
                    let inv = gauss_invert(&p, &mut meter)?;
                    write_file(&dest, &write_matrix_string(&inv))?;
                    print_cost(out, cost, &meter, &[])
                }
                Mode::Analog => {
                    let r = invert_via_milac(&p, y0)?;
                    write_file(&dest, &write_matrix_string(&r.inverse))?;
                    print_cost(out, cost, &r.meter, &[("physics", &r.physics)])
                }
            }
        }
        Command::Kalman { a, h, m, ncov, x0, r0, obs, steps, mode, y0, out: dest, cost } => {
            let y0 = positive("y0", y0)?;
            let model = DynamicalModel::new(parse_matrix(&a)?, parse_matrix(&m)?, parse_matrix(&h)?, parse_matrix(&ncov)?)
                .map_err(input_error)?;
            let x0 = parse_vector(&x0)?;
            let r0 = parse_matrix(&r0)?;
            if x0.len() != model.x_dim() || r0.shape() != (model.x_dim(), model.x_dim()) {
                return Err(CliError::Usage("initial state does not match the state dimension".into()));
            }
            let steps = match steps {
                Some(t) => t,
                None => count_observations(&obs)?,
            };
            let observations = (1..=steps)
                .map(|t| parse_vector(&numbered(&obs, "obs", t, "cvec")))
                .collect::<std::result::Result<Vec<ComplexVector>, _>>()?;
            if let Some((t, bad)) = observations.iter().enumerate().find(|(_, o)| o.len() != model.y_dim()) {
                return Err(CliError::Usage(format!(
                    "observation {} has length {}, expected {}",
                    t + 1,
                    bad.len(),
                    model.y_dim()
                )));
            }
            let initial = match mode {
                Mode::Digital => FilterState::with_covariance(x0, r0),
                Mode::Analog => FilterState::with_both(x0, r0)?,
            };
            let filter_mode = match mode {
                Mode::Digital => FilterMode::Digital,
                Mode::Analog => FilterMode::Milac,
            };
            let run = kalman_run(std::slice::from_ref(&model), &initial, &observations, filter_mode, y0)?;
            fs::create_dir_all(&dest).map_err(|source| CliError::Write { path: dest.display().to_string(), source })?;
            for (t, state) in run.states.iter().enumerate() {
                write_file(&numbered(&dest, "xhat", t + 1, "cvec"), &write_vector_string(&state.xhat))?;
                if let Some(r) = &state.r {
                    write_file(&numbered(&dest, "r", t + 1, "cmx"), &write_matrix_string(r))?;
                }
            }
            let KalmanMeters { algorithmic, offline, physics } = run.meters;
            let extra: &[(&str, &CostMeter)] = match mode {
                Mode::Digital => &[],
                Mode::Analog => &[("offline", &offline), ("physics", &physics)],
            };
            print_cost(out, cost, &algorithmic, extra)
        }
        Command::LosslessVerify { y, n, y0, input, tol } => {
            let y0 = positive("y0", y0)?;
            let tol = resolve_tol(tol)?;
            let ymat = parse_matrix(&y)?;
            let u = parse_vector(&input)?;
            if u.len() != n {
                return Err(CliError::Usage(format!("input has length {}, expected {n}", u.len())));
            }
            let sus = build_susceptance(&ymat, n, y0).map_err(input_error)?;
            let grid = crate::network::components_from_y(&ymat).map_err(input_error)?;
            let net = MilacNetwork::new(n, y0, grid).map_err(input_error)?;
            let reference = simulate(&net, &u, &mut CostMeter::new())?;
            let lifted = simulate_lossless(&sus, &u, y0)?;
            let report = extract_and_verify(&sus, &lifted, &reference.v, y0, tol);
            let identity = permutation_identity_defect(&sus, &ymat, y0);
            let text = format!(
                "deviation={:e}\nrelative_deviation={:e}\npermuted_structure={}\nsusceptance_real={}\n\
                 components_lossless={}\ncomponents={}\npermutation_identity_defect={:e}\nasymmetry={:e}\n\
                 tol={:e}\nresult={}\n",
                report.deviation,
                report.relative_deviation,
                report.permuted_structure_ok,
                report.susceptance_real,
                report.components_lossless,
                report.component_count,
                identity,
                report.asymmetry,
                tol,
                if report.pass { "pass" } else { "fail" },
            );
            print(out, &text)?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "relative deviation {:e} exceeds {tol:e} or structure check failed",
                    report.relative_deviation
                )))
            }
        }
        Command::Complexity { op, sizes, out: dest } => {
            let sizes = parse_sizes(&sizes).map_err(|e| CliError::Usage(e.to_string()))?;
            let op = match op {
                OpArg::Lmmse => CostOp::Lmmse,
                OpArg::Invert => CostOp::Invert,
                OpArg::Kalman => CostOp::Kalman,
            };
            let rows = speedup_table(op, &sizes).map_err(|e| CliError::Usage(e.to_string()))?;
            let csv = table_csv(&rows);
            match dest {
                Some(path) => write_file(&path, &csv),
                None => print(out, &csv),
            }
        }
    }
}
