//! Uniform 1D meshes and continuous piecewise-linear (P1) fields.
//!
//! Inner products use nodal (trapezoid) quadrature, i.e. a lumped mass
//! matrix. With that choice the discrete integral of a field is a plain
//! weighted sum of nodal values and zero-flux P1 schemes conserve it exactly.

use crate::error::{Error, Result};

/// Uniform partition of `[x_left, x_right]` into `n_elements` elements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mesh1D {
    x_left: f64,
    x_right: f64,
    n_elements: usize,
    h: f64,
}

impl Mesh1D {
    pub fn uniform(x_left: f64, x_right: f64, n_elements: usize) -> Result<Self> {
        if !(x_left.is_finite() && x_right.is_finite()) || x_left >= x_right {
            return Err(Error::InvalidRange(format!(
                "need x_left < x_right, got [{x_left}, {x_right}]"
            )));
        }
        if n_elements < 2 {
            return Err(Error::InvalidRange(format!(
                "need at least 2 elements, got {n_elements}"
            )));
        }
        Ok(Self {
            x_left,
            x_right,
            n_elements,
            h: (x_right - x_left) / n_elements as f64,
        })
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    /// Element length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_elements {
            self.x_right
        } else {
            self.x_left + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(|i| self.node(i))
    }

    /// Trapezoid weight of node `i`: `h/2` at the ends, `h` inside.
    pub fn lumped_weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n_elements {
            0.5 * self.h
        } else {
            self.h
        }
    }

    /// Index of the element containing `x` (clamped to the mesh).
    pub fn element_of(&self, x: f64) -> usize {
        let e = ((x - self.x_left) / self.h).floor();
        if e <= 0.0 {
            0
        } else {
            (e as usize).min(self.n_elements - 1)
        }
    }
}

/// Nodal values of a P1 finite-element function.
#[derive(Clone, Debug, PartialEq)]
pub struct FeField {
    mesh: Mesh1D,
    values: Vec<f64>,
}

impl FeField {
    pub fn new(mesh: Mesh1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_nodes() {
            return Err(Error::LengthMismatch {
                expected: mesh.n_nodes(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NanDetected("field values"));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Mesh1D) -> Self {
        Self::constant(mesh, 0.0)
    }

    pub fn constant(mesh: Mesh1D, c: f64) -> Self {
        Self {
            mesh,
            values: vec![c; mesh.n_nodes()],
        }
    }

    /// Nodal interpolant of `f`.
    pub fn from_fn(mesh: Mesh1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(mesh, mesh.nodes().map(f).collect())
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Evaluates the piecewise-linear interpolant; zero outside the mesh.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.mesh.x_left || x > self.mesh.x_right {
            return 0.0;
        }
        let e = self.mesh.element_of(x);
        let s = (x - self.mesh.node(e)) / self.mesh.h;
        (1.0 - s) * self.values[e] + s * self.values[e + 1]
    }

    pub fn max_abs_diff(&self, other: &FeField) -> Result<f64> {
        check_same_mesh(self, other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Nodewise combination of two fields on the same mesh.
    pub fn zip_with(&self, other: &FeField, f: impl Fn(f64, f64) -> f64) -> Result<FeField> {
        check_same_mesh(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        FeField::new(self.mesh, values)
    }
}

pub(crate) fn check_same_mesh(f: &FeField, g: &FeField) -> Result<()> {
    if f.mesh != g.mesh {
        Err(Error::MeshMismatch)
    } else {
        Ok(())
    }
}

/// Discrete inner product `Σ w_i f_i g_i` with trapezoid weights.
pub fn lumped_inner_product(f: &FeField, g: &FeField) -> Result<f64> {
    check_same_mesh(f, g)?;
    let mesh = f.mesh;
    Ok(f
        .values
        .iter()
        .zip(&g.values)
        .enumerate()
        .map(|(i, (a, b))| mesh.lumped_weight(i) * a * b)
        .sum())
}

/// Piecewise-constant derivative, one entry per element.
pub fn element_gradient(f: &FeField) -> Vec<f64> {
    let h = f.mesh.h;
    f.values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

/// Element averages of the nodal values.
pub fn element_average(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Scalar tridiagonal matrix stored by diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            sub: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            sup: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.sup[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i > 0 {
                a[i][i - 1] = self.sub[i - 1];
            }
            if i + 1 < n {
                a[i][i + 1] = self.sup[i];
            }
        }
        a
    }
}

/// Stiffness matrix of `(w u', χ')` with a piecewise-constant weight.
pub fn assemble_weighted_stiffness(w_elem: &[f64], mesh: &Mesh1D) -> Result<Tridiagonal> {
    if w_elem.len() != mesh.n_elements() {
        return Err(Error::LengthMismatch {
            expected: mesh.n_elements(),
            got: w_elem.len(),
        });
    }
    let mut k = Tridiagonal::zeros(mesh.n_nodes());
    let inv_h = 1.0 / mesh.h();
    for (e, &w) in w_elem.iter().enumerate() {
        let c = w * inv_h;
        k.diag[e] += c;
        k.diag[e + 1] += c;
        k.sup[e] -= c;
        k.sub[e] -= c;
    }
    Ok(k)
}
