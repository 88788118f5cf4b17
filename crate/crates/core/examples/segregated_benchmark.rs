//! Two species split at a point of the Barenblatt profile: the regularized
//! Eulerian solver against the exact segregated solution.
//!
//! ```text
//! cargo run --release --example segregated_benchmark [delta]
//! ```

use crossdiff::diagnostics::JumpEstimator;
use crossdiff::oracle::{barenblatt, explicit_segregated, InterfaceTrajectory};
use crossdiff::scheme::{run, State, TimeStepping};
use crossdiff::{FeField, Mesh1D, ModelParams};

fn main() -> crossdiff::Result<()> {
    let traj = InterfaceTrajectory::new(0.5, 1.0)?;
    let profile = traj.profile();
    let mesh = Mesh1D::uniform(-6.0, 6.0, 2000)?;
    let u1 = FeField::from_fn(mesh, |x| explicit_segregated(x, 0.0, &traj, &profile).0)?;
    let u2 = FeField::from_fn(mesh, |x| explicit_segregated(x, 0.0, &traj, &profile).1)?;
    let delta: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let params = ModelParams::porous_medium(1.0, delta, 1e-3);
    let ts = TimeStepping::new(1e-5, 0.25, 1e-8);
    let times: Vec<f64> = (1..=10).map(|k| 0.025 * k as f64).collect();
    let out = run(State::new(0.0, u1, u2)?, &params, &ts, &times, JumpEstimator::default())?;

    println!("    t      eta(t)   contact   |diff|/h   Linf(sum-B)  segregation");
    for s in &out.snapshots {
        let exact = FeField::from_fn(mesh, |x| barenblatt(x, s.t, &profile))?;
        let sum_err = s.sum().max_abs_diff(&exact)?;
        let eta = traj.eta(s.t);
        let contact = s.contact_point.unwrap_or(f64::NAN);
        println!(
            "{:7.3}  {eta:.5}  {contact:.5}  {:8.3}  {sum_err:.3e}    {:.3e}",
            s.t,
            (contact - eta).abs() / mesh.h(),
            s.segregation_defect
        );
    }
    println!("max Picard iterations: {}", out.max_iterations);
    Ok(())
}
