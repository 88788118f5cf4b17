//! Eulerian solver: semi-implicit Euler in time, P1 elements in space.
//!
//! Each time slice solves the nonlinear discrete problem by Picard
//! iteration. Iterate `k` freezes the flux coefficients and the quadratic
//! reaction losses at iterate `k − 1` and solves one block-tridiagonal
//! system for `(u1, u2)`:
//!
//! ```text
//! (u_i^k − u_i^{n−1}, χ)/τ + (J_i(ū^{k−1}; ∂x u^k), χ')
//!     = (α_i u_i^k − λ(u_i^{k−1})(β_i1 λ(u1^{n−1}) + β_i2 λ(u2^{n−1})), χ)
//! ```
//!
//! All products are lumped, and the zero-flux boundary needs no special rows.

use crate::diagnostics::{JumpEstimator, Snapshot};
use crate::error::{Error, Result};
use crate::linsolve::{solve_block_thomas, Block2, BlockTridiagonal};
use crate::mesh::{check_same_mesh, FeField};
use crate::model::{cutoff, regularized_flux_coefficients, ModelParams};

pub const DEFAULT_K_MAX: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeStepping {
    pub tau: f64,
    pub t_final: f64,
    /// Picard stopping threshold on `max_i ‖u_i^k − u_i^{k−1}‖_∞`.
    pub tol: f64,
    pub k_max: usize,
}

impl TimeStepping {
    pub fn new(tau: f64, t_final: f64, tol: f64) -> Self {
        Self {
            tau,
            t_final,
            tol,
            k_max: DEFAULT_K_MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad("tau", format!("must be > 0, got {}", self.tau));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad("t_final", format!("must be ≥ 0, got {}", self.t_final));
        }
        // tol = 0 is allowed: it simply never converges
        if !(self.tol >= 0.0) {
            return bad("tol", format!("must be ≥ 0, got {}", self.tol));
        }
        if self.k_max == 0 {
            return bad("k_max", "must be ≥ 1".into());
        }
        Ok(())
    }

    /// Number of steps of size `tau` needed to reach `t_final`.
    pub fn n_steps(&self) -> usize {
        steps_to_reach(self.t_final, self.tau)
    }
}

fn steps_to_reach(t: f64, tau: f64) -> usize {
    (t / tau - 1e-9).ceil().max(0.0) as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub u1: FeField,
    pub u2: FeField,
}

impl State {
    pub fn new(t: f64, u1: FeField, u2: FeField) -> Result<Self> {
        check_same_mesh(&u1, &u2)?;
        Ok(Self { t, u1, u2 })
    }

    fn max_change(&self, other: &State) -> f64 {
        self.u1
            .max_abs_diff(&other.u1)
            .unwrap_or(f64::INFINITY)
            .max(self.u2.max_abs_diff(&other.u2).unwrap_or(f64::INFINITY))
    }
}

/// Linear system for one Picard iterate.
pub fn assemble_step_system(
    prev: &State,
    frozen: (&FeField, &FeField),
    params: &ModelParams,
    tau: f64,
) -> Result<(BlockTridiagonal, Vec<[f64; 2]>)> {
    let (f1, f2) = frozen;
    check_same_mesh(&prev.u1, f1)?;
    check_same_mesh(&prev.u1, f2)?;
    let mesh = *prev.u1.mesh();
    let n = mesh.n_nodes();
    let eps = params.epsilon;
    let lv = &params.lv;

    let mut a = BlockTridiagonal::zeros(n);
    let mut rhs = vec![[0.0; 2]; n];
    let (p1, p2) = (prev.u1.values(), prev.u2.values());
    let (k1, k2) = (f1.values(), f2.values());
    for m in 0..n {
        let w = mesh.lumped_weight(m);
        a.diag[m] = Block2::diag(w * (1.0 / tau - lv.alpha[0]), w * (1.0 / tau - lv.alpha[1]));
        let lagged = [cutoff(p1[m], eps), cutoff(p2[m], eps)];
        let frozen_i = [cutoff(k1[m], eps), cutoff(k2[m], eps)];
        let prev_i = [p1[m], p2[m]];
        for i in 0..2 {
            let loss = frozen_i[i] * (lv.beta[i][0] * lagged[0] + lv.beta[i][1] * lagged[1]);
            rhs[m][i] = w * (prev_i[i] / tau - loss);
        }
    }

    let blocks = regularized_flux_coefficients(f1, f2, params)?;
    let inv_h = 1.0 / mesh.h();
    for (e, b) in blocks.iter().enumerate() {
        let c = Block2(b.d).scale(inv_h);
        a.diag[e] = a.diag[e] + c;
        a.diag[e + 1] = a.diag[e + 1] + c;
        a.sup[e] = a.sup[e] - c;
        a.sub[e] = a.sub[e] - c;
        // known drift flux moves to the right-hand side: (g, χ') = ∓g
        for i in 0..2 {
            rhs[e][i] += b.drift[i];
            rhs[e + 1][i] -= b.drift[i];
        }
    }
    Ok((a, rhs))
}

fn solve_iterate(
    prev: &State,
    frozen: &State,
    params: &ModelParams,
    tau: f64,
) -> Result<State> {
    let (a, rhs) = assemble_step_system(prev, (&frozen.u1, &frozen.u2), params, tau)?;
    let x = solve_block_thomas(&a, &rhs)?;
    let mesh = *prev.u1.mesh();
    let u1 = FeField::new(mesh, x.iter().map(|v| v[0]).collect())
        .map_err(|_| Error::NanDetected("Picard iterate"))?;
    let u2 = FeField::new(mesh, x.iter().map(|v| v[1]).collect())
        .map_err(|_| Error::NanDetected("Picard iterate"))?;
    Ok(State {
        t: prev.t + tau,
        u1,
        u2,
    })
}

/// Advances one time slice. Returns the converged state and the number of
/// Picard iterations used.
pub fn inner_fixed_point(
    prev: &State,
    params: &ModelParams,
    ts: &TimeStepping,
) -> Result<(State, usize)> {
    let mut frozen = prev.clone();
    let mut residual = f64::INFINITY;
    for k in 1..=ts.k_max {
        let next = solve_iterate(prev, &frozen, params, ts.tau)?;
        residual = next.max_change(&frozen);
        if residual < ts.tol {
            return Ok((next, k));
        }
        frozen = next;
    }
    Err(Error::NoConvergence {
        iterations: ts.k_max,
        residual,
    })
}

/// Snapshots and iteration statistics of a run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub final_state: State,
    pub steps: usize,
    pub max_iterations: usize,
    pub total_iterations: usize,
}

/// Advances with fixed `τ` to `t_final`. The initial state is always
/// reported; each requested time is reported at the first step reaching it.
pub fn run(
    initial: State,
    params: &ModelParams,
    ts: &TimeStepping,
    snapshot_times: &[f64],
    jump: JumpEstimator,
) -> Result<RunOutput> {
    run_with(initial, params, ts, snapshot_times, jump, |_, _| {})
}

/// Like [`run`], calling `observe(state, iterations)` after every step.
pub fn run_with(
    initial: State,
    params: &ModelParams,
    ts: &TimeStepping,
    snapshot_times: &[f64],
    jump: JumpEstimator,
    mut observe: impl FnMut(&State, usize),
) -> Result<RunOutput> {
    params.validate()?;
    ts.validate()?;
    let t0 = initial.t;
    let mut targets: Vec<(usize, f64)> = Vec::new();
    for &t in snapshot_times {
        if !(t >= t0 && t <= t0 + ts.t_final + 1e-12) {
            return Err(Error::Validation {
                key: "snapshot_times".into(),
                message: format!("{t} lies outside [{t0}, {}]", t0 + ts.t_final),
            });
        }
        let step = steps_to_reach(t - t0, ts.tau);
        if step > 0 {
            targets.push((step, t));
        }
    }
    targets.sort_by_key(|p| p.0);
    targets.dedup_by_key(|p| p.0);

    let mut snapshots = vec![Snapshot::capture(
        t0,
        initial.u1.clone(),
        initial.u2.clone(),
        jump,
    )?];
    let n_steps = ts.n_steps();
    let mut state = initial;
    let (mut max_it, mut total_it) = (0, 0);
    let mut next_target = targets.iter().peekable();
    for step in 1..=n_steps {
        let (mut next, k) =
            inner_fixed_point(&state, params, ts).map_err(|e| e.at_step(step))?;
        next.t = t0 + step as f64 * ts.tau;
        max_it = max_it.max(k);
        total_it += k;
        observe(&next, k);
        state = next;
        while let Some(&&(s, _)) = next_target.peek() {
            if s > step {
                break;
            }
            snapshots.push(Snapshot::capture(
                state.t,
                state.u1.clone(),
                state.u2.clone(),
                jump,
            )?);
            next_target.next();
        }
    }
    Ok(RunOutput {
        snapshots,
        final_state: state,
        steps: n_steps,
        max_iterations: max_it,
        total_iterations: total_it,
    })
}
