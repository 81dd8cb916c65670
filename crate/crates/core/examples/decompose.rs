//! Causal wavelet decomposition of a synthetic wind series and its exact
//! reconstruction.

use windcast::synth::{synth_generate, SynthKind};
use windcast::wavelet::{decompose, make_filter, max_levels, reconstruct, Boundary, DecompositionSpec};

fn main() -> windcast::Result<()> {
    let series = synth_generate(&SynthKind::daily_cycle(), 2048, 1)?;
    let values = series.values();

    let filter = make_filter("db4")?;
    println!("db4: {} taps, up to {} levels for n = {}", filter.len(), max_levels(values.len(), filter.len()), values.len());

    let spec = DecompositionSpec::new(filter, 6, Boundary::Reflect)?;
    let d = decompose(values, &spec)?;
    for (j, detail) in d.details().iter().enumerate() {
        let energy: f64 = detail.iter().map(|v| v * v).sum::<f64>() / detail.len() as f64;
        println!("d{}: mean square {energy:.4}", j + 1);
    }
    let smooth = d.smooth();
    println!("smooth: first {:.3}, last {:.3}", smooth[0], smooth[smooth.len() - 1]);

    let back = reconstruct(&d)?;
    let err = back.iter().zip(values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max reconstruction error {err:.2e}");
    Ok(())
}
