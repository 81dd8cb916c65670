//! Seeded synthetic generators and CSV output.

use windcast::synth::{synth_generate, SynthKind};

fn main() -> windcast::Result<()> {
    let kinds = [
        SynthKind::constant(5.0),
        SynthKind::Ar {
            coefficients: vec![0.75, -0.5],
            sigma: 1.0,
            mean: 7.0,
        },
        SynthKind::daily_cycle(),
        SynthKind::mackey_glass(),
    ];
    for kind in &kinds {
        let a = synth_generate(kind, 500, 9)?;
        let b = synth_generate(kind, 500, 9)?;
        assert_eq!(a.values(), b.values());
        let v = a.values();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        println!("{:<13} mean {mean:.3}, first {:.3}", kind.name(), v[0]);
    }
    let csv = synth_generate(&SynthKind::daily_cycle(), 3, 9)?.to_csv();
    print!("{csv}");
    Ok(())
}
