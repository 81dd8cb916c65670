//! Burg estimation of an AR(2) process, AIC order selection and a
//! recursive multi-step forecast.

use windcast::ar::{fit_burg, forecast_ar, select_order};
use windcast::synth::ar_process;

fn main() -> windcast::Result<()> {
    let x = ar_process(&[0.75, -0.5], 1.0, 0.0, 10_000, 42);

    let order = select_order(&x, 10)?;
    println!("AIC order: {order}");

    let model = fit_burg(&x, 2)?;
    println!("coefficients {:?} (true [0.75, -0.5])", model.coefficients());
    println!("reflection {:?}, stationary {}", model.reflection_coefficients(), model.is_stationary());
    println!("innovation variance {:.4}", model.innovation_variance());

    let forecast = forecast_ar(&model, &x, 6)?;
    println!("last two samples {:.3} {:.3}", x[x.len() - 2], x[x.len() - 1]);
    println!("next six {:.3?}", forecast);
    Ok(())
}
