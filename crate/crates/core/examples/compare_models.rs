//! Side-by-side comparison of the hybrid, standalone AR and standalone SVR
//! on identical origins, with a forecast trace for the first origin.

use windcast::eval::{compare, summary_csv, trace_csv, ArRecipe, EvalConfig, HybridRecipe, Recipe, SvrRecipe, TrainingWindow};
use windcast::hybrid::{ArConfig, HybridConfig, SvrConfig};
use windcast::synth::{synth_generate, SynthKind};

fn main() -> windcast::Result<()> {
    let series = synth_generate(&SynthKind::daily_cycle(), 4000, 2)?;
    let cfg = EvalConfig {
        training: TrainingWindow::Samples(2200),
        stride: 288,
        ..Default::default()
    };
    let hybrid = HybridRecipe {
        label: "hybrid".into(),
        config: HybridConfig::default(),
    };
    let ar = ArRecipe {
        label: "ar".into(),
        config: ArConfig::default(),
    };
    let svr = SvrRecipe {
        label: "svr".into(),
        config: SvrConfig::default(),
    };
    let recipes: [&dyn Recipe; 3] = [&hybrid, &ar, &svr];
    let cmp = compare(&series, &recipes, &cfg, 0)?;
    print!("{}", summary_csv(&cmp.summaries));
    let trace = trace_csv(&cmp.trace);
    for line in trace.lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
