//! The interface of the split Barenblatt solution moves with the profile:
//! `η' = −B_x(η, t)`. RK4 against `η(t) = x0 ((t + t*)/t*)^{1/3}`.
//!
//! ```text
//! cargo run --example interface_ode
//! ```

use crossdiff::oracle::{barenblatt_dx, eta_closed_form, integrate_interface_ode, InterfaceTrajectory};

fn main() -> crossdiff::Result<()> {
    let traj = InterfaceTrajectory::new(0.5, 1.0)?;
    let profile = traj.profile();
    println!("     dt      max |η_rk4 − η|");
    for dt in [1e-1, 5e-2, 2.5e-2, 1e-2, 1e-4] {
        let path = integrate_interface_ode(|x, t| barenblatt_dx(x, t, &profile), traj.x0(), 1.0, dt)?;
        let err = path
            .iter()
            .map(|&(t, x)| (x - eta_closed_form(t, &traj)).abs())
            .fold(0.0, f64::max);
        println!("{dt:8.1e}  {err:.3e}");
    }
    println!("η(1) = {:.12}", eta_closed_form(1.0, &traj));
    Ok(())
}
