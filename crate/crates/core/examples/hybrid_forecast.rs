//! Fits the wavelet hybrid (AR on fine levels, SVR on coarse levels and
//! the smooth) and prints a six-hour forecast with its components.

use windcast::hybrid::{fit_hybrid, forecast_components, sum_components, HybridConfig};
use windcast::synth::{synth_generate, SynthKind};

fn main() -> windcast::Result<()> {
    let series = synth_generate(&SynthKind::daily_cycle(), 4320 + 36, 11)?;
    let (train, future) = series.values().split_at(4320);

    let config = HybridConfig::default();
    let model = fit_hybrid(train, &config)?;
    for (i, c) in model.components().iter().enumerate() {
        println!("component {i}: {:?}", c.kind());
    }

    let parts = forecast_components(&model, train, 36)?;
    let total = sum_components(&parts);
    let rmse = windcast::eval::rmse(&total, future)?;
    println!("6-hour forecast RMSE {rmse:.3} m/s");
    for k in (0..36).step_by(6) {
        println!("t+{:<2} {:.2} (actual {:.2})", k + 1, total[k], future[k]);
    }
    Ok(())
}
