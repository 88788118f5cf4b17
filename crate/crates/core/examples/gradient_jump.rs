//! Equal against unequal diffusivities: the kink of `u1 + u2` at the contact
//! point over the course of the two built-in experiments.
//!
//! ```text
//! cargo run --release --example gradient_jump
//! ```

use crossdiff::config::{parse_config, EXP1, EXP2};
use crossdiff::driver::run_config;

fn main() -> crossdiff::Result<()> {
    let times: Vec<f64> = (0..=8).map(|k| 0.005 + 0.0025 * k as f64).collect();
    let mut columns = Vec::new();
    for text in [EXP1, EXP2] {
        let mut c = parse_config(text)?;
        c.time.t_final = *times.last().unwrap();
        c.output.snapshots = times.clone();
        columns.push(run_config(&c)?.snapshots);
    }
    let show = |v: Option<f64>| v.map_or("       none".to_string(), |v| format!("{v:11.3e}"));
    println!("     t    contact(a2=1)  jump(a2=1)   contact(a2=3)  jump(a2=3)");
    for (a, b) in columns[0].iter().zip(&columns[1]).skip(1) {
        println!(
            "{:7.4}  {}  {}  {}  {}",
            a.t,
            show(a.contact_point),
            show(a.gradient_jump),
            show(b.contact_point),
            show(b.gradient_jump)
        );
    }
    Ok(())
}
