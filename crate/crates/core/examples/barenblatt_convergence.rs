//! Single-species porous-medium run started from the Barenblatt profile,
//! compared against the closed form under mesh refinement.
//!
//! ```text
//! cargo run --release --example barenblatt_convergence
//! ```

use std::time::Instant;

use crossdiff::diagnostics::{sup_error, JumpEstimator};
use crossdiff::oracle::{barenblatt, BarenblattProfile};
use crossdiff::scheme::{run, State, TimeStepping};
use crossdiff::{FeField, Mesh1D, ModelParams};

fn main() -> crossdiff::Result<()> {
    let profile = BarenblattProfile::new(1.0)?;
    let t_final = 0.5;
    let mut previous: Option<f64> = None;
    for (n, tau) in [(500, 2e-5), (1000, 1e-5), (2000, 5e-6)] {
        let started = Instant::now();
        let mesh = Mesh1D::uniform(-6.0, 6.0, n)?;
        let u1 = FeField::from_fn(mesh, |x| barenblatt(x, 0.0, &profile))?;
        let init = State::new(0.0, u1, FeField::zeros(mesh))?;
        let params = ModelParams::porous_medium(1.0, 0.0, 1e-3);
        let ts = TimeStepping::new(tau, t_final, 1e-10);
        let out = run(init, &params, &ts, &[], JumpEstimator::default())?;
        let exact = FeField::from_fn(mesh, |x| barenblatt(x, t_final, &profile))?;
        let nodal = out.final_state.u1.max_abs_diff(&exact)?;
        let r = profile.support_radius(t_final);
        let err = sup_error(&out.final_state.u1, |x| barenblatt(x, t_final, &profile), 32, &[-r, r]);
        let ratio = previous.map(|p| err / p);
        println!(
            "n = {n:5}  tau = {tau:.0e}  Linf error = {err:.3e} (nodal {nodal:.3e})  ratio = {}  max k = {}  ({:.1?})",
            ratio.map_or("-".to_string(), |r| format!("{r:.3}")),
            out.max_iterations,
            started.elapsed()
        );
        previous = Some(err);
    }
    Ok(())
}
