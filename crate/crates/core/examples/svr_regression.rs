//! Epsilon-insensitive SVR on lagged values of a noisy sine, then a
//! recursive forecast.

use windcast::svr::{embed, forecast_svr, train_svr, KernelSpec, SvrHyperparams};
use windcast::synth::sine_plus_ar;

fn main() -> windcast::Result<()> {
    let lag = 6;
    let x = sine_plus_ar(0.0, 1.0, 48.0, 0.3, 0.05, 600, 3);
    let (train, test) = x.split_at(500);

    let pairs = embed(train, lag)?;
    let hp = SvrHyperparams {
        c: 10.0,
        epsilon: 0.05,
        ..Default::default()
    };
    let model = train_svr(&pairs, KernelSpec::rbf_for_dim(lag), &hp)?;
    println!(
        "{} pairs, {} support vectors, converged {}, dual objective {:.4}",
        pairs.len(),
        model.support_vectors().len(),
        model.converged(),
        model.dual_objective()
    );

    let forecast = forecast_svr(&model, train, lag, 12)?;
    for (k, (p, a)) in forecast.iter().zip(test).enumerate() {
        println!("t+{:<2} predicted {p:+.3} actual {a:+.3}", k + 1);
    }
    Ok(())
}
