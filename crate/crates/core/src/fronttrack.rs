//! Lagrangian interface tracking.
//!
//! Each side of the interface `η` carries exactly one species on its own
//! array of moving nodes `X(y, t)`, labelled by their initial positions `y`.
//! Densities are never stored: they are recovered from the reference density
//! through `w |J| = w0`, so with no reaction the mass of each side is fixed by
//! construction. Nodes move with the Darcy velocity `v = −a w_x + p_x`, where
//! the pressure solves `−(w p_x)_x = f(w)` with `p = 0` at both ends of the
//! side. The interface node is shared by both sides and moves with the
//! plus-side velocity; the outer nodes stay put unless the state is built
//! with [`OuterBoundary::Free`].
//!
//! Node arrays are stored in increasing `x` on both sides, so the interface
//! is the first plus node and the last minus node.

use crate::error::{Error, Result};
use crate::mesh::{FeField, Mesh1D};
use crate::model::{lv_reaction, ModelParams, Species};
use crate::oracle::{barenblatt, InterfaceTrajectory};

/// Local spacing below this fraction of the reference spacing is degenerate.
pub const MIN_SPACING_RATIO: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `x < η`.
    Minus,
    /// `x > η`.
    Plus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Minus, Side::Plus];

    fn index(self) -> usize {
        match self {
            Side::Minus => 0,
            Side::Plus => 1,
        }
    }
}

/// What the outermost node of a side does.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OuterBoundary {
    /// Held at its initial position.
    #[default]
    Pinned,
    /// Moves with its own one-sided velocity. Meant for a side whose density
    /// vanishes at the edge of a compact support.
    Free,
}

/// Which way round the pressure equation is written.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PressureSign {
    /// `−(w p_x)_x = f(w)`.
    #[default]
    Elliptic,
    /// `(w p_x)_x = f(w)`.
    Darcy,
}

#[derive(Clone, Debug, PartialEq)]
struct SideNodes {
    nodes: Vec<f64>,
    labels: Vec<f64>,
    ref_density: Vec<f64>,
    ref_spacing: f64,
}

impl SideNodes {
    fn uniform(x_from: f64, x_to: f64, n_nodes: usize, density: &impl Fn(f64) -> f64) -> Self {
        let ref_spacing = (x_to - x_from) / (n_nodes - 1) as f64;
        let labels: Vec<f64> = (0..n_nodes)
            .map(|i| {
                if i + 1 == n_nodes {
                    x_to
                } else {
                    x_from + i as f64 * ref_spacing
                }
            })
            .collect();
        let ref_density = labels.iter().map(|&y| density(y)).collect();
        SideNodes {
            nodes: labels.clone(),
            labels,
            ref_density,
            ref_spacing,
        }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Discrete Jacobian per node: ratio of current to reference dual-cell width.
    fn jacobian(&self) -> Result<Vec<f64>> {
        let n = self.len();
        for i in 0..n - 1 {
            let dx = self.nodes[i + 1] - self.nodes[i];
            if dx <= MIN_SPACING_RATIO * self.ref_spacing {
                return Err(Error::DegenerateJacobian { node: i, spacing: dx });
            }
        }
        Ok((0..n)
            .map(|i| {
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(n - 1);
                (self.nodes[hi] - self.nodes[lo]) / (self.labels[hi] - self.labels[lo])
            })
            .collect())
    }

    fn density(&self) -> Result<Vec<f64>> {
        let jac = self.jacobian()?;
        Ok(self.ref_density.iter().zip(&jac).map(|(w0, j)| w0 / j).collect())
    }

    /// Densities with the end-node Jacobian extrapolated from the two
    /// adjacent cells, so that slopes taken at and next to the end nodes stay
    /// consistent when the deformation is not uniform.
    fn density_for_slopes(&self) -> Result<Vec<f64>> {
        let mut w = self.density()?;
        let n = self.len();
        if n >= 3 {
            let cell = |i: usize| (self.nodes[i + 1] - self.nodes[i]) / (self.labels[i + 1] - self.labels[i]);
            let j0 = 1.5 * cell(0) - 0.5 * cell(1);
            let jn = 1.5 * cell(n - 2) - 0.5 * cell(n - 3);
            if j0 > 0.0 {
                w[0] = self.ref_density[0] / j0;
            }
            if jn > 0.0 {
                w[n - 1] = self.ref_density[n - 1] / jn;
            }
        }
        Ok(w)
    }

    fn dual_widths(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(n - 1);
                0.5 * (self.nodes[hi] - self.nodes[lo])
            })
            .collect()
    }
}

/// Nodal slopes: centered inside, three-point one-sided at the ends.
fn slopes(x: &[f64], v: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 2 {
        let s = (v[1] - v[0]) / (x[1] - x[0]);
        return vec![s, s];
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i - 1]) / (x[i + 1] - x[i - 1]);
    }
    let one_sided = |v0: f64, v1: f64, v2: f64, h1: f64, h2: f64| {
        -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * v0 + (h1 + h2) / (h1 * h2) * v1 - h1 / (h2 * (h1 + h2)) * v2
    };
    out[0] = one_sided(v[0], v[1], v[2], x[1] - x[0], x[2] - x[1]);
    out[n - 1] = -one_sided(v[n - 1], v[n - 2], v[n - 3], x[n - 1] - x[n - 2], x[n - 2] - x[n - 3]);
    out
}

fn cumulative_trapezoid(x: &[f64], g: &[f64]) -> Vec<f64> {
    let mut acc = Vec::with_capacity(x.len());
    acc.push(0.0);
    for i in 1..x.len() {
        let prev = acc[i - 1];
        acc.push(prev + 0.5 * (x[i] - x[i - 1]) * (g[i] + g[i - 1]));
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrontState {
    t: f64,
    eta: f64,
    sides: [SideNodes; 2],
    plus_species: Species,
    outer: OuterBoundary,
}

impl FrontState {
    /// Segregated data `density` on `(x_left, x_right)` split at `eta`, with
    /// `nodes_per_side` uniformly spaced nodes on each side. `plus_species`
    /// occupies `x > eta`.
    pub fn new(
        eta: f64,
        x_left: f64,
        x_right: f64,
        nodes_per_side: usize,
        plus_species: Species,
        density: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if !(x_left < eta && eta < x_right) {
            return Err(Error::InvalidRange(format!(
                "interface {eta} must lie strictly inside ({x_left}, {x_right})"
            )));
        }
        if nodes_per_side < 3 {
            return Err(Error::InvalidParameter {
                name: "nodes_per_side",
                reason: format!("need at least 3, got {nodes_per_side}"),
            });
        }
        let minus = SideNodes::uniform(x_left, eta, nodes_per_side, &density);
        let plus = SideNodes::uniform(eta, x_right, nodes_per_side, &density);
        if minus.ref_density.iter().chain(&plus.ref_density).any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter {
                name: "density",
                reason: "must be finite and nonnegative".into(),
            });
        }
        Ok(FrontState {
            t: 0.0,
            eta,
            sides: [minus, plus],
            plus_species,
            outer: OuterBoundary::Pinned,
        })
    }

    /// The Barenblatt profile at `t = 0` split at `x0`, with `u1` on the right.
    ///
    /// Each side ends at the edge of the support when that lies inside
    /// `(x_left, x_right)`, and the edge node is then left free to follow the
    /// spreading support.
    pub fn barenblatt_split(
        traj: &InterfaceTrajectory,
        x_left: f64,
        x_right: f64,
        nodes_per_side: usize,
    ) -> Result<Self> {
        let profile = traj.profile();
        let r = profile.support_radius(0.0);
        let inside = x_left < -r && r < x_right;
        let (lo, hi) = if inside { (-r, r) } else { (x_left, x_right) };
        let state = Self::new(traj.x0(), lo, hi, nodes_per_side, Species::U1, |x| {
            barenblatt(x, 0.0, &profile)
        })?;
        Ok(state.with_outer_boundary(if inside {
            OuterBoundary::Free
        } else {
            OuterBoundary::Pinned
        }))
    }

    pub fn with_outer_boundary(mut self, outer: OuterBoundary) -> Self {
        self.outer = outer;
        self
    }

    pub fn outer_boundary(&self) -> OuterBoundary {
        self.outer
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    fn side(&self, side: Side) -> &SideNodes {
        &self.sides[side.index()]
    }

    pub fn nodes(&self, side: Side) -> &[f64] {
        &self.side(side).nodes
    }

    pub fn ref_density(&self, side: Side) -> &[f64] {
        &self.side(side).ref_density
    }

    pub fn ref_spacing(&self, side: Side) -> f64 {
        self.side(side).ref_spacing
    }

    pub fn species(&self, side: Side) -> Species {
        match side {
            Side::Plus => self.plus_species,
            Side::Minus => self.plus_species.other(),
        }
    }

    /// Lagrangian mass of one side, `Σ w_i |dual cell_i|`.
    pub fn side_mass(&self, side: Side) -> Result<f64> {
        let s = self.side(side);
        let w = s.density()?;
        Ok(w.iter().zip(s.dual_widths()).map(|(w, d)| w * d).sum())
    }

    /// Mass the side was given at its reference configuration.
    pub fn reference_mass(&self, side: Side) -> f64 {
        let s = self.side(side);
        let n = s.len();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(n - 1);
                s.ref_density[i] * 0.5 * (s.labels[hi] - s.labels[lo])
            })
            .sum()
    }

    /// Samples both species onto `mesh` by linear interpolation between
    /// tracked nodes. A mesh node exactly at `η` belongs to the plus side.
    pub fn to_fields(&self, mesh: &Mesh1D) -> Result<(FeField, FeField)> {
        let minus = current_density(self, Side::Minus)?;
        let plus = current_density(self, Side::Plus)?;
        let mut vals = [vec![0.0; mesh.n_nodes()], vec![0.0; mesh.n_nodes()]];
        for (k, x) in mesh.nodes().enumerate() {
            let (side, w) = if x >= self.eta { (Side::Plus, &plus) } else { (Side::Minus, &minus) };
            vals[self.species(side).index()][k] = interpolate(self.nodes(side), w, x);
        }
        let [u1, u2] = vals;
        Ok((FeField::new(*mesh, u1)?, FeField::new(*mesh, u2)?))
    }
}

fn interpolate(x: &[f64], v: &[f64], at: f64) -> f64 {
    if at < x[0] || at > x[x.len() - 1] {
        return 0.0;
    }
    let i = x.partition_point(|&xi| xi <= at).clamp(1, x.len() - 1);
    let theta = (at - x[i - 1]) / (x[i] - x[i - 1]);
    (1.0 - theta) * v[i - 1] + theta * v[i]
}

#[derive(Clone, Debug, PartialEq)]
pub struct PressureSolution {
    pub side: Side,
    pub values: Vec<f64>,
}

/// `w_i = w0_i / J_i` on the nodes of `side`.
pub fn current_density(state: &FrontState, side: Side) -> Result<Vec<f64>> {
    state.side(side).density()
}

/// Reaction of the side's species at its current density, the other species
/// being absent.
pub fn side_reaction(state: &FrontState, side: Side, params: &ModelParams) -> Result<Vec<f64>> {
    let species = state.species(side);
    Ok(current_density(state, side)?
        .into_iter()
        .map(|w| match species {
            Species::U1 => lv_reaction(species, w, 0.0, &params.lv),
            Species::U2 => lv_reaction(species, 0.0, w, &params.lv),
        })
        .collect())
}

/// Solves the side's pressure problem with `p = 0` at both end nodes.
///
/// In 1D the flux `w p_x` is `C − F` with `F` the running integral of `f`;
/// `C` is chosen so that `p_x` integrates to zero over the side.
pub fn solve_pressure(
    state: &FrontState,
    side: Side,
    reaction: &[f64],
    sign: PressureSign,
) -> Result<PressureSolution> {
    let x = state.nodes(side);
    if reaction.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: reaction.len(),
        });
    }
    if reaction.iter().all(|&f| f == 0.0) {
        return Ok(PressureSolution {
            side,
            values: vec![0.0; x.len()],
        });
    }
    let w = current_density(state, side)?;
    let min = w.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 || !min.is_finite() {
        return Err(Error::DegenerateDensity { min });
    }
    let s = match sign {
        PressureSign::Elliptic => 1.0,
        PressureSign::Darcy => -1.0,
    };
    let big_f = cumulative_trapezoid(x, reaction);
    let inv_w: Vec<f64> = w.iter().map(|w| 1.0 / w).collect();
    let f_over_w: Vec<f64> = big_f.iter().zip(&w).map(|(f, w)| f / w).collect();
    let int_inv = *cumulative_trapezoid(x, &inv_w).last().unwrap();
    let int_fw = *cumulative_trapezoid(x, &f_over_w).last().unwrap();
    let c = s * int_fw / int_inv;
    let p_x: Vec<f64> = big_f.iter().zip(&w).map(|(f, w)| (c - s * f) / w).collect();
    let mut values = cumulative_trapezoid(x, &p_x);
    *values.last_mut().unwrap() = 0.0;
    if values.iter().any(|p| !p.is_finite()) {
        return Err(Error::NanDetected("pressure"));
    }
    Ok(PressureSolution { side, values })
}

/// Darcy velocity `−a w_x + p_x` at every node of `side`.
pub fn node_velocities(
    state: &FrontState,
    side: Side,
    pressure: &PressureSolution,
    a_side: f64,
) -> Result<Vec<f64>> {
    if pressure.side != side {
        return Err(Error::InvalidParameter {
            name: "pressure",
            reason: format!("solution belongs to the {:?} side, not {side:?}", pressure.side),
        });
    }
    let x = state.nodes(side);
    let w = state.side(side).density_for_slopes()?;
    let w_x = slopes(x, &w);
    let p_x = slopes(x, &pressure.values);
    Ok(w_x.iter().zip(&p_x).map(|(wx, px)| -a_side * wx + px).collect())
}

fn interface_index(state: &FrontState, side: Side) -> usize {
    match side {
        Side::Plus => 0,
        Side::Minus => state.nodes(Side::Minus).len() - 1,
    }
}

/// Velocity of the interface node as seen from `side`.
pub fn side_interface_velocity(
    state: &FrontState,
    side: Side,
    pressure: &PressureSolution,
    a_side: f64,
) -> Result<f64> {
    let v = node_velocities(state, side, pressure, a_side)?;
    Ok(v[interface_index(state, side)])
}

/// Interface velocity from the plus side: `−a₊ w_x + p_x` at `η`.
pub fn interface_velocity(state: &FrontState, plus_pressure: &PressureSolution, a_plus: f64) -> Result<f64> {
    side_interface_velocity(state, Side::Plus, plus_pressure, a_plus)
}

pub fn front_step(state: &FrontState, params: &ModelParams, dt: f64) -> Result<FrontState> {
    front_step_with(state, params, dt, PressureSign::default())
}

/// One explicit Euler step of node transport, with the reaction folded into
/// the reference density.
pub fn front_step_with(
    state: &FrontState,
    params: &ModelParams,
    dt: f64,
    sign: PressureSign,
) -> Result<FrontState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    let mut velocities = Vec::with_capacity(2);
    let mut sources = Vec::with_capacity(2);
    for side in Side::BOTH {
        let f = side_reaction(state, side, params)?;
        let p = solve_pressure(state, side, &f, sign)?;
        let a = params.species[state.species(side).index()].a;
        velocities.push(node_velocities(state, side, &p, a)?);
        sources.push(f);
    }
    let v_eta = velocities[Side::Plus.index()][0];
    let eta = state.eta + dt * v_eta;
    if !eta.is_finite() {
        return Err(Error::NanDetected("interface position"));
    }

    let mut next = state.clone();
    next.t = state.t + dt;
    next.eta = eta;
    for side in Side::BOTH {
        let k = side.index();
        let old = &state.sides[k];
        let jac = old.jacobian()?;
        let new = &mut next.sides[k];
        let n = new.len();
        let moving = match state.outer {
            OuterBoundary::Pinned => 1..n - 1,
            OuterBoundary::Free => match side {
                Side::Minus => 0..n - 1,
                Side::Plus => 1..n,
            },
        };
        for i in moving {
            new.nodes[i] = old.nodes[i] + dt * velocities[k][i];
        }
        new.nodes[interface_index(state, side)] = eta;
        for i in 0..n {
            new.ref_density[i] = old.ref_density[i] + dt * sources[k][i] * jac[i];
        }
        if let Some(node) = (0..n - 1).find(|&i| !(new.nodes[i + 1] > new.nodes[i])) {
            return Err(Error::TangledMesh { node });
        }
    }
    Ok(next)
}

/// `(t, η)` after every step, starting from the initial state.
pub fn track(
    initial: FrontState,
    params: &ModelParams,
    dt: f64,
    n_steps: usize,
    sign: PressureSign,
    mut observe: impl FnMut(&FrontState),
) -> Result<(FrontState, Vec<(f64, f64)>)> {
    let mut trajectory = Vec::with_capacity(n_steps + 1);
    trajectory.push((initial.t, initial.eta));
    observe(&initial);
    let mut state = initial;
    for step in 1..=n_steps {
        state = front_step_with(&state, params, dt, sign).map_err(|e| e.at_step(step))?;
        trajectory.push((state.t, state.eta));
        observe(&state);
    }
    Ok((state, trajectory))
}
