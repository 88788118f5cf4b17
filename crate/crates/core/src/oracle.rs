//! Closed-form references for the porous-medium benchmark.
//!
//! The Barenblatt profile
//!
//! ```text
//! B(x, t) = 2 (t + t*)^(-1/3) [1 − x² (t + t*)^(-2/3) / 12]_+
//! ```
//!
//! solves `u_t = (u u_x)_x` with support radius `R(t) = √12 (t + t*)^(1/3)`.
//! Splitting it at a point `η(t)` moving with the local Darcy velocity
//! `η' = −B_x(η, t)` gives an exactly segregated two-species solution of
//! `∂t u_i = ∂x(u_i ∂x(u1 + u2))`: `u1` lives right of `η`, `u2` left of it.
//! The ODE integrates to `η(t) = x0 ((t + t*)/t*)^(1/3)`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarenblattProfile {
    t_star: f64,
}

impl BarenblattProfile {
    pub fn new(t_star: f64) -> Result<Self> {
        if !(t_star > 0.0 && t_star.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_star",
                reason: format!("must be > 0, got {t_star}"),
            });
        }
        Ok(Self { t_star })
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    pub fn support_radius(&self, t: f64) -> f64 {
        12f64.sqrt() * (t + self.t_star).cbrt()
    }

    /// Total mass `(8/3)√12`, the same for every `t*` and `t`.
    pub fn mass(&self) -> f64 {
        8.0 / 3.0 * 12f64.sqrt()
    }
}

pub fn barenblatt(x: f64, t: f64, p: &BarenblattProfile) -> f64 {
    let s = t + p.t_star;
    let bracket = 1.0 - x * x / (12.0 * s.powf(2.0 / 3.0));
    2.0 / s.cbrt() * bracket.max(0.0)
}

pub fn barenblatt_dx(x: f64, t: f64, p: &BarenblattProfile) -> f64 {
    if x.abs() >= p.support_radius(t) {
        0.0
    } else {
        -x / (3.0 * (t + p.t_star))
    }
}

/// Contact point of the segregated Barenblatt solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceTrajectory {
    x0: f64,
    t_star: f64,
}

impl InterfaceTrajectory {
    /// Requires the contact point to start inside the support, `|x0| < R(0)`.
    pub fn new(x0: f64, t_star: f64) -> Result<Self> {
        let profile = BarenblattProfile::new(t_star)?;
        if !(x0.abs() < profile.support_radius(0.0)) {
            return Err(Error::InvalidParameter {
                name: "x0",
                reason: format!(
                    "must lie inside the support (|x0| < {}), got {x0}",
                    profile.support_radius(0.0)
                ),
            });
        }
        Ok(Self { x0, t_star })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn profile(&self) -> BarenblattProfile {
        BarenblattProfile {
            t_star: self.t_star,
        }
    }

    pub fn eta(&self, t: f64) -> f64 {
        eta_closed_form(t, self)
    }
}

/// `η(t) = x0 ((t + t*)/t*)^(1/3)`, the solution of `η' = η / (3(t + t*))`
/// with `η(0) = x0`.
pub fn eta_closed_form(t: f64, traj: &InterfaceTrajectory) -> f64 {
    traj.x0 * ((t + traj.t_star) / traj.t_star).cbrt()
}

/// Classical RK4 for `η' = −G(η, t)`, `η(0) = x0`. Returns `(t, η)` samples
/// including both endpoints; the last step is shortened to land on `t_final`.
pub fn integrate_interface_ode<G>(g: G, x0: f64, t_final: f64, dt: f64) -> Result<Vec<(f64, f64)>>
where
    G: Fn(f64, f64) -> f64,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    let rhs = |x: f64, t: f64| {
        let v = -g(x, t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NanDetected("interface velocity"))
        }
    };
    let n_steps = ((t_final / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(n_steps + 1);
    let mut x = x0;
    out.push((0.0, x));
    for k in 0..n_steps {
        let t = k as f64 * dt;
        let step = if k + 1 == n_steps { t_final - t } else { dt };
        let k1 = rhs(x, t)?;
        let k2 = rhs(x + 0.5 * step * k1, t + 0.5 * step)?;
        let k3 = rhs(x + 0.5 * step * k2, t + 0.5 * step)?;
        let k4 = rhs(x + step * k3, t + step)?;
        x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((if k + 1 == n_steps { t_final } else { t + step }, x));
    }
    Ok(out)
}

/// Piecewise-linear regularization of the Heaviside step: `1` left of
/// `−ε`, `½(1 − x/ε)` on `[−ε, ε]`, `0` right of `ε`.
pub fn mollified_heaviside(x: f64, epsilon: f64) -> f64 {
    if x < -epsilon {
        1.0
    } else if x > epsilon {
        0.0
    } else {
        0.5 * (1.0 - x / epsilon)
    }
}

fn sharp_heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// `(u1, u2) = (H(x − η) B, H(η − x) B)` with `H(0) = ½`.
pub fn explicit_segregated(
    x: f64,
    t: f64,
    traj: &InterfaceTrajectory,
    p: &BarenblattProfile,
) -> (f64, f64) {
    let b = barenblatt(x, t, p);
    let eta = traj.eta(t);
    (sharp_heaviside(x - eta) * b, sharp_heaviside(eta - x) * b)
}
