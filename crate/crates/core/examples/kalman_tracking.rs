//! Track a random linear system with the digital filter and with the
//! network-assisted filter, then compare trajectories and per-step costs.

use milac::costmodel::{kalman_costs, to_f64};
use milac::kalman::{kalman_run, simulate_system, trajectory_deviation, FilterMode, FilterState};
use milac::network::DEFAULT_Y0;
use milac::numerics::{ComplexMatrix, ComplexVector};
use milac::synth;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (x, y, steps) = (5usize, 5usize, 40usize);
    let model = synth::dynamical_model(x, y, &mut rng);
    let x_true0 = synth::random_vector(x, &mut rng);
    let (truth, obs) = simulate_system(&model, &x_true0, steps, &mut rng)?;

    let init = FilterState::with_covariance(ComplexVector::zeros(x), ComplexMatrix::identity(x));
    let models = [model];
    let digital = kalman_run(&models, &init, &obs, FilterMode::Digital, DEFAULT_Y0)?;
    let analog = kalman_run(&models, &init, &obs, FilterMode::Milac, DEFAULT_Y0)?;
    println!("trajectory deviation {:.3e}", trajectory_deviation(&digital.states, &analog.states));

    let last = digital.states.last().expect("nonempty run");
    let err = last.xhat.minus(truth.last().expect("nonempty truth")).norm();
    println!("final tracking error {err:.4}");

    let per_step_digital = digital.meters.algorithmic.total() as f64 / steps as f64;
    let per_step_analog = analog.meters.algorithmic.total() as f64 / steps as f64;
    let formula = kalman_costs(x as u64, y as u64)?;
    println!(
        "per step: digital {per_step_digital:.0} (formula {:.0}), network {per_step_analog:.0} (formula {:.0})",
        to_f64(formula.digital),
        to_f64(formula.milac)
    );
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
