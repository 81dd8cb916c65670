//! Rolling-origin evaluation of a standalone AR model: fit once on the
//! first month, then forecast 36 steps from weekly origins.

use windcast::eval::{rolling_evaluate, summarize, ArRecipe, EvalConfig};
use windcast::hybrid::ArConfig;
use windcast::synth::{synth_generate, SynthKind};

fn main() -> windcast::Result<()> {
    // Two months of ten-minute data.
    let series = synth_generate(&SynthKind::daily_cycle(), 61 * 144, 4)?;
    let recipe = ArRecipe {
        label: "ar".into(),
        config: ArConfig::default(),
    };
    let cfg = EvalConfig::default();
    let rows = rolling_evaluate(&series, &recipe, &cfg)?;
    for row in &rows {
        println!("{} rmse {:.3}", windcast::series::format_timestamp(row.origin_time), row.rmse.unwrap_or(f64::NAN));
    }
    let s = summarize("ar", &rows)?;
    println!("{} origins, mean {:.3} ± {:.3}", s.n_origins, s.mean_rmse, s.standard_error);
    Ok(())
}
