//! Problem data for the two-species system
//!
//! ```text
//! ∂t u_i − ∂x J_i = f_i(u1, u2),
//! J_i = a_i u_i ∂x(u1 + u2) + b_i q u_i + c_i ∂x u_i + (δ/2) ∂x(u_i (u1 + u2)),
//! f_i = u_i (α_i − β_i1 u1 − β_i2 u2).
//! ```

use crate::error::{Error, Result};
use crate::mesh::{check_same_mesh, element_average, FeField, Mesh1D};

/// The two populations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Species {
    U1,
    U2,
}

impl Species {
    pub const BOTH: [Species; 2] = [Species::U1, Species::U2];

    pub fn index(self) -> usize {
        match self {
            Species::U1 => 0,
            Species::U2 => 1,
        }
    }

    pub fn other(self) -> Species {
        match self {
            Species::U1 => Species::U2,
            Species::U2 => Species::U1,
        }
    }
}

/// Per-species transport coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transport {
    /// Cross-diffusivity multiplying `u_i ∂x(u1 + u2)`.
    pub a: f64,
    /// Drift coefficient multiplying `q u_i`.
    pub b: f64,
    /// Linear diffusivity.
    pub c: f64,
}

impl Transport {
    pub fn porous(a: f64) -> Self {
        Self { a, b: 0.0, c: 0.0 }
    }
}

/// Logistic competition `f_i = u_i (α_i − β_i1 u1 − β_i2 u2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LotkaVolterra {
    pub alpha: [f64; 2],
    /// `beta[i][j]` is the loss of species `i` due to species `j`.
    pub beta: [[f64; 2]; 2],
}

impl LotkaVolterra {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Competition coefficients of the two-bump experiments.
    pub fn experiment() -> Self {
        Self {
            alpha: [1.0, 5.0],
            beta: [[1.0, 0.5], [1.0, 2.0]],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().chain(self.beta.iter().flatten()).all(|&c| c == 0.0)
    }
}

pub fn lv_reaction(species: Species, u1: f64, u2: f64, lv: &LotkaVolterra) -> f64 {
    let i = species.index();
    let ui = [u1, u2][i];
    ui * (lv.alpha[i] - lv.beta[i][0] * u1 - lv.beta[i][1] * u2)
}

/// Clamp to `[0, 1/ε]`, used both for reaction arguments and frozen
/// diffusion coefficients.
pub fn cutoff(s: f64, epsilon: f64) -> f64 {
    s.clamp(0.0, 1.0 / epsilon)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub species: [Transport; 2],
    /// Drift profile `q`; `None` means `q ≡ 0`.
    pub q_field: Option<FeField>,
    pub lv: LotkaVolterra,
    /// Weight of the regularizing flux `(δ/2) ∂x(u_i u)`.
    pub delta: f64,
    /// Cutoff parameter; values are clamped to `[0, 1/ε]`.
    pub epsilon: f64,
}

impl ModelParams {
    /// Two-bump experiment with cross-diffusivities `a1`, `a2`.
    pub fn experiment(a1: f64, a2: f64) -> Self {
        Self {
            species: [Transport::porous(a1), Transport::porous(a2)],
            q_field: None,
            lv: LotkaVolterra::experiment(),
            delta: 1e-3,
            epsilon: 1e-3,
        }
    }

    /// Pure porous-medium transport `J_i = a u_i ∂x(u1+u2)`, no reaction.
    pub fn porous_medium(a: f64, delta: f64, epsilon: f64) -> Self {
        Self {
            species: [Transport::porous(a); 2],
            q_field: None,
            lv: LotkaVolterra::zero(),
            delta,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.species {
            if !(t.a >= 0.0 && t.a.is_finite()) {
                return Err(invalid("a", format!("must be finite and ≥ 0, got {}", t.a)));
            }
            if !(t.c >= 0.0 && t.c.is_finite()) {
                return Err(invalid("c", format!("must be finite and ≥ 0, got {}", t.c)));
            }
            if !t.b.is_finite() {
                return Err(invalid("b", "must be finite".into()));
            }
        }
        if self
            .lv
            .alpha
            .iter()
            .chain(self.lv.beta.iter().flatten())
            .any(|c| !c.is_finite())
        {
            return Err(invalid("lotka-volterra", "coefficients must be finite".into()));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(invalid("delta", format!("must be ≥ 0, got {}", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon", format!("must be > 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Element value of the drift profile.
    fn q_elem(&self, e: usize) -> f64 {
        match &self.q_field {
            Some(q) => 0.5 * (q.values()[e] + q.values()[e + 1]),
            None => 0.0,
        }
    }
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

/// Frozen flux coefficients on one element: species `i` has flux
/// `Σ_j d[i][j] ∂x u_j + drift[i]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxBlock {
    pub d: [[f64; 2]; 2],
    pub drift: [f64; 2],
}

impl FluxBlock {
    /// Eigenvalues of `D` in ascending order, `None` when they are complex.
    ///
    /// `D = diag(ū)(a + δ/2)1ᵀ + (δ/2)ū I` is a rank-one matrix plus a
    /// multiple of the identity, so for nonnegative densities the spectrum
    /// is real and bounded below by `(δ/2)(ū1 + ū2)`.
    pub fn eigenvalues(&self) -> Option<(f64, f64)> {
        let tr = self.d[0][0] + self.d[1][1];
        let det = self.d[0][0] * self.d[1][1] - self.d[0][1] * self.d[1][0];
        let disc = 0.25 * tr * tr - det;
        if disc < -1e-14 * (1.0 + tr * tr) {
            return None;
        }
        let rad = disc.max(0.0).sqrt();
        Some((0.5 * tr - rad, 0.5 * tr + rad))
    }

    /// Smallest eigenvalue of the symmetric part `(D + Dᵀ)/2`.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        let a = self.d[0][0];
        let c = self.d[1][1];
        let b = 0.5 * (self.d[0][1] + self.d[1][0]);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        0.5 * (a + c) - rad
    }
}

/// Per-element diffusion blocks and drifts, frozen at the given densities.
pub fn regularized_flux_coefficients(
    u1: &FeField,
    u2: &FeField,
    params: &ModelParams,
) -> Result<Vec<FluxBlock>> {
    check_same_mesh(u1, u2)?;
    if let Some(q) = &params.q_field {
        check_same_mesh(u1, q)?;
    }
    let eps = params.epsilon;
    let bar1 = element_average(u1.values());
    let bar2 = element_average(u2.values());
    let half_delta = 0.5 * params.delta;
    Ok(bar1
        .iter()
        .zip(&bar2)
        .enumerate()
        .map(|(e, (&m1, &m2))| {
            let ubar = [cutoff(m1, eps), cutoff(m2, eps)];
            let total = ubar[0] + ubar[1];
            let q = params.q_elem(e);
            let mut d = [[0.0; 2]; 2];
            let mut drift = [0.0; 2];
            for i in 0..2 {
                let t = &params.species[i];
                for j in 0..2 {
                    d[i][j] = t.a * ubar[i] + half_delta * ubar[i];
                }
                d[i][i] += t.c + half_delta * total;
                drift[i] = t.b * q * ubar[i];
            }
            FluxBlock { d, drift }
        })
        .collect())
}

/// Nodal samples of `exp(−(x − x_center)² / width)`.
pub fn gaussian_bump_initial(x_center: f64, width: f64, mesh: &Mesh1D) -> Result<FeField> {
    if !(width > 0.0) {
        return Err(invalid("width", format!("must be > 0, got {width}")));
    }
    FeField::from_fn(*mesh, |x| (-(x - x_center).powi(2) / width).exp())
}
