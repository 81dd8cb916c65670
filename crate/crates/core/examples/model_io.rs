//! Saves a fitted hybrid model to text, reads it back and checks that the
//! forecasts agree bit for bit.

use windcast::hybrid::{fit_hybrid, forecast_hybrid, from_text, to_text, HybridConfig};
use windcast::synth::{synth_generate, SynthKind};
use windcast::wavelet::{make_filter, Boundary, DecompositionSpec};

fn main() -> windcast::Result<()> {
    let series = synth_generate(&SynthKind::daily_cycle(), 1200, 5)?;
    let config = HybridConfig {
        decomposition: Some(DecompositionSpec::new(make_filter("db2")?, 4, Boundary::Reflect)?),
        history_window: 512,
        ..Default::default()
    };
    let model = fit_hybrid(series.values(), &config)?;
    let text = to_text(&model);
    println!("{} bytes, header: {}", text.len(), text.lines().next().unwrap_or(""));

    let restored = from_text(&text)?;
    let a = forecast_hybrid(&model, series.values(), 12)?;
    let b = forecast_hybrid(&restored, series.values(), 12)?;
    assert_eq!(a, b);
    println!("restored model forecasts match: {:.3?}", &a[..4]);
    Ok(())
}
