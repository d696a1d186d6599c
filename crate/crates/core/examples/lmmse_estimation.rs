//! LMMSE estimation and error covariance, digitally and through the network,
//! with the cost of each route and an empirical MSE check.

use milac::estimation::{
    cov_digital, cov_via_milac, lmmse_digital, lmmse_via_milac, monte_carlo_mse, trace_real, Form, Sign,
};
use milac::network::DEFAULT_Y0;
use milac::numerics::{relative_error, relative_error_vec};
use milac::synth;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (x, y) = (6, 10);
    let model = synth::observation_model(x, y, &mut rng);
    let obs = synth::random_vector(y, &mut rng);

    let digital = lmmse_digital(&model, &obs, Form::Two)?;
    for sign in [Sign::Plus, Sign::Minus] {
        let analog = lmmse_via_milac(&model, &obs, sign, DEFAULT_Y0)?;
        let err = relative_error_vec(&analog.xhat, &digital.xhat);
        println!(
            "estimate ({sign:?}): deviation {err:.3e}, online ops {} (6XY = {}), digital ops {}",
            analog.meter.total(),
            6 * x * y,
            digital.meter.total()
        );
    }

    let ce = cov_digital(&model, Form::One)?.ce;
    let analog = cov_via_milac(&model, DEFAULT_Y0)?;
    println!("covariance deviation {:.3e}", relative_error(&analog.ce, &ce));

    let small = synth::observation_model(4, 4, &mut rng);
    let mse = monte_carlo_mse(&small, 20_000, &mut rng)?;
    let trace = trace_real(&cov_digital(&small, Form::One)?.ce);
    println!("empirical MSE {mse:.4} vs trace(Ce) {trace:.4}");
    if (mse - trace).abs() > 0.1 * trace {
        return Err("empirical MSE far from trace(Ce)".into());
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
