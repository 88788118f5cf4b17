//! Regularization sweep on the unequal-diffusivity experiment: interface
//! diagnostics as `δ → 0`. Runs execute concurrently.
//!
//! ```text
//! cargo run --release --example delta_sweep
//! ```

use crossdiff::config::{parse_config, EXP2};
use crossdiff::driver::sweep_delta;

fn main() -> crossdiff::Result<()> {
    let mut c = parse_config(EXP2)?;
    c.time.t_final = 0.01;
    let rows = sweep_delta(&c, &[1e-2, 3e-3, 1e-3, 3e-4, 1e-4])?;
    println!("   delta    contact    jump      segregation");
    for r in rows {
        println!(
            "{:8.0e}  {:.5}  {:9.4}  {:.3e}",
            r.delta,
            r.contact_point.unwrap_or(f64::NAN),
            r.gradient_jump.unwrap_or(f64::NAN),
            r.segregation_defect
        );
    }
    Ok(())
}
