//! Field diagnostics shared by the Eulerian and Lagrangian solvers.

use crate::error::{Error, Result};
use crate::mesh::{check_same_mesh, FeField};

/// Lumped integral `∫ u`.
pub fn mass(u: &FeField) -> f64 {
    let mesh = u.mesh();
    u.values()
        .iter()
        .enumerate()
        .map(|(i, v)| mesh.lumped_weight(i) * v)
        .sum()
}

/// Lumped integral of `u1·u2`; zero for segregated pairs.
pub fn segregation_defect(u1: &FeField, u2: &FeField) -> Result<f64> {
    crate::mesh::lumped_inner_product(u1, u2)
}

/// Differences `|u1 − u2|` below this fraction of `max(u1 + u2)` carry no
/// sign, so round-off in empty regions does not create spurious crossings.
pub const CONTACT_FLOOR: f64 = 1e-8;

/// Abscissa where `u1 − u2` changes sign, by linear interpolation between
/// the bracketing nodes. `None` if there is no sign change or more than one.
pub fn contact_point(u1: &FeField, u2: &FeField) -> Result<Option<f64>> {
    check_same_mesh(u1, u2)?;
    let mesh = u1.mesh();
    let scale = u1
        .values()
        .iter()
        .zip(u2.values())
        .map(|(a, b)| a.abs() + b.abs())
        .fold(0.0, f64::max);
    let floor = CONTACT_FLOOR * scale;

    let mut last: Option<(usize, f64)> = None;
    let mut crossing = None;
    for (i, (a, b)) in u1.values().iter().zip(u2.values()).enumerate() {
        let d = a - b;
        if d.abs() <= floor {
            continue;
        }
        if let Some((j, dj)) = last {
            if dj.signum() != d.signum() {
                if crossing.is_some() {
                    return Ok(None);
                }
                // zero of the linear interpolant between nodes j and i
                let (xj, xi) = (mesh.node(j), mesh.node(i));
                crossing = Some(xj + (xi - xj) * dj / (dj - d));
            }
        }
        last = Some((i, d));
    }
    Ok(crossing)
}

/// `sup_x |u_h(x) − f(x)|` over the mesh interval, with `u_h` the P1
/// interpolant. Each element is sampled at `per_element` equispaced points;
/// `kinks` adds abscissas where `f` is not smooth.
pub fn sup_error(u_h: &FeField, f: impl Fn(f64) -> f64, per_element: usize, kinks: &[f64]) -> f64 {
    let mesh = u_h.mesh();
    let per_element = per_element.max(1);
    let mut worst: f64 = 0.0;
    for e in 0..mesh.n_elements() {
        for s in 0..per_element {
            let x = mesh.node(e) + mesh.h() * s as f64 / per_element as f64;
            worst = worst.max((u_h.eval(x) - f(x)).abs());
        }
    }
    let last = mesh.x_right();
    worst = worst.max((u_h.eval(last) - f(last)).abs());
    for &x in kinks {
        if x >= mesh.x_left() && x <= mesh.x_right() {
            worst = worst.max((u_h.eval(x) - f(x)).abs());
        }
    }
    worst
}

/// Elements skipped on each side of the contact point by default.
pub const DEFAULT_SKIP: usize = 2;

/// Jump `(right slope) − (left slope)` of `u_sum` at `x_c`. Each one-sided
/// slope comes from a least-squares parabola through the nodes of
/// `stencil_width` elements on its side, after skipping [`DEFAULT_SKIP`]
/// elements next to `x_c`, differentiated at `x_c` itself; a straight-line
/// fit would instead report the slope at the stencil centre and turn plain
/// curvature into a spurious jump.
pub fn gradient_jump(u_sum: &FeField, x_c: f64, stencil_width: usize) -> Result<f64> {
    gradient_jump_with_skip(u_sum, x_c, stencil_width, DEFAULT_SKIP)
}

pub fn gradient_jump_with_skip(
    u_sum: &FeField,
    x_c: f64,
    stencil_width: usize,
    skip: usize,
) -> Result<f64> {
    let mesh = u_sum.mesh();
    let out = || Error::StencilOutOfBounds { x_c };
    if stencil_width < 2 || !(x_c > mesh.x_left() && x_c < mesh.x_right()) {
        return Err(out());
    }
    // nodes bracketing x_c: left ≤ x_c < right
    let left = ((x_c - mesh.x_left()) / mesh.h()).floor() as usize;
    let right = left + 1;
    let l_end = left.checked_sub(skip).ok_or_else(out)?;
    let l_start = l_end.checked_sub(stencil_width).ok_or_else(out)?;
    let r_start = right + skip;
    let r_end = r_start + stencil_width;
    if r_end >= mesh.n_nodes() {
        return Err(out());
    }
    let v = u_sum.values();
    let slope = |from: usize, to: usize| {
        let s: Vec<f64> = (from..=to).map(|i| (mesh.node(i) - x_c) / mesh.h()).collect();
        parabola_slope_at_zero(&s, &v[from..=to]) / mesh.h()
    };
    Ok(slope(r_start, r_end) - slope(l_start, l_end))
}

/// Linear coefficient of the least-squares fit `y ≈ c0 + c1 s + c2 s²`.
fn parabola_slope_at_zero(s: &[f64], y: &[f64]) -> f64 {
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for (si, yi) in s.iter().zip(y) {
        let p = [1.0, *si, si * si];
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] += p[a] * p[b];
            }
            r[a] += p[a] * yi;
        }
    }
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let mut m1 = m;
    for a in 0..3 {
        m1[a][1] = r[a];
    }
    det3(&m1) / det3(&m)
}

/// Estimator settings used when a [`Snapshot`] is captured.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpEstimator {
    pub stencil_width: usize,
    pub skip: usize,
}

impl Default for JumpEstimator {
    fn default() -> Self {
        Self {
            stencil_width: 10,
            skip: DEFAULT_SKIP,
        }
    }
}

/// Time-stamped pair of densities with derived diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u1: FeField,
    pub u2: FeField,
    pub mass1: f64,
    pub mass2: f64,
    pub segregation_defect: f64,
    pub contact_point: Option<f64>,
    pub gradient_jump: Option<f64>,
}

impl Snapshot {
    pub fn capture(t: f64, u1: FeField, u2: FeField, jump: JumpEstimator) -> Result<Self> {
        let segregation = segregation_defect(&u1, &u2)?;
        let contact = contact_point(&u1, &u2)?;
        let gradient_jump = match contact {
            Some(x_c) => {
                let sum = u1.zip_with(&u2, |a, b| a + b)?;
                gradient_jump_with_skip(&sum, x_c, jump.stencil_width, jump.skip).ok()
            }
            None => None,
        };
        Ok(Self {
            t,
            mass1: mass(&u1),
            mass2: mass(&u2),
            segregation_defect: segregation,
            contact_point: contact,
            gradient_jump,
            u1,
            u2,
        })
    }

    pub fn sum(&self) -> FeField {
        self.u1
            .zip_with(&self.u2, |a, b| a + b)
            .expect("snapshot fields share a mesh")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh1D;
    use crate::oracle::{barenblatt, explicit_segregated, BarenblattProfile, InterfaceTrajectory};
    use proptest::prelude::*;

    fn unit(n: usize) -> Mesh1D {
        Mesh1D::uniform(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn masses() {
        assert!((mass(&FeField::constant(unit(10), 1.0)) - 1.0).abs() < 1e-14);
        assert_eq!(mass(&FeField::zeros(unit(10))), 0.0);

        let mesh = Mesh1D::uniform(-6.0, 6.0, 10_000).unwrap();
        let p = BarenblattProfile::new(1.0).unwrap();
        let b = FeField::from_fn(mesh, |x| barenblatt(x, 0.0, &p)).unwrap();
        let exact = 8.0 / 3.0 * 12f64.sqrt();
        assert!((mass(&b) - exact).abs() < 1e-3);
    }

    #[test]
    fn segregation() {
        let m = unit(10);
        let left = FeField::from_fn(m, |x| if x < 0.45 { 1.0 } else { 0.0 }).unwrap();
        let right = FeField::from_fn(m, |x| if x > 0.55 { 2.0 } else { 0.0 }).unwrap();
        assert_eq!(segregation_defect(&left, &right).unwrap(), 0.0);
        let one = FeField::constant(m, 1.0);
        assert!((segregation_defect(&one, &one).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn segregation_of_explicit_solution_is_single_node() {
        let mesh = Mesh1D::uniform(-6.0, 6.0, 1200).unwrap();
        let p = BarenblattProfile::new(1.0).unwrap();
        let traj = InterfaceTrajectory::new(0.5, 1.0).unwrap();
        let u1 = FeField::from_fn(mesh, |x| explicit_segregated(x, 0.0, &traj, &p).0).unwrap();
        let u2 = FeField::from_fn(mesh, |x| explicit_segregated(x, 0.0, &traj, &p).1).unwrap();
        let bmax: f64 = 2.0;
        let d = segregation_defect(&u1, &u2).unwrap();
        assert!(d <= bmax * bmax * mesh.h());
    }

    #[test]
    fn contact_points() {
        let m = unit(1000);
        let u1 = FeField::from_fn(m, |x| if x > 0.5 { 1.0 } else { 0.0 }).unwrap();
        let u2 = FeField::from_fn(m, |x| if x < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let c = contact_point(&u1, &u2).unwrap().unwrap();
        assert!((c - 0.5).abs() <= m.h());

        let one = FeField::constant(m, 1.0);
        assert_eq!(contact_point(&one, &FeField::zeros(m)).unwrap(), None);

        // two crossings
        let w = FeField::from_fn(m, |x| if (0.3..0.6).contains(&x) { 1.0 } else { 0.0 }).unwrap();
        let z = FeField::constant(m, 0.5);
        assert_eq!(contact_point(&w, &z).unwrap(), None);
    }

    #[test]
    fn contact_point_of_explicit_solution() {
        let mesh = Mesh1D::uniform(-6.0, 6.0, 2000).unwrap();
        let p = BarenblattProfile::new(1.0).unwrap();
        let traj = InterfaceTrajectory::new(0.5, 1.0).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let u1 = FeField::from_fn(mesh, |x| explicit_segregated(x, t, &traj, &p).0).unwrap();
            let u2 = FeField::from_fn(mesh, |x| explicit_segregated(x, t, &traj, &p).1).unwrap();
            let c = contact_point(&u1, &u2).unwrap().unwrap();
            assert!((c - traj.eta(t)).abs() <= mesh.h(), "t = {t}: {c}");
        }
    }

    #[test]
    fn sup_error_sees_between_nodes() {
        let m = unit(4);
        let f = FeField::zeros(m);
        // hat of height 1 centred between nodes
        let hat = |x: f64| (1.0 - (x - 0.375).abs() / 0.125).max(0.0);
        assert!(f.max_abs_diff(&FeField::from_fn(m, hat).unwrap()).unwrap() < 1e-15);
        // samples at 0.25 + k/12 miss the peak
        assert!((sup_error(&f, hat, 3, &[]) - 2.0 / 3.0).abs() < 1e-12);
        assert!((sup_error(&f, hat, 3, &[0.375]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kink_jump() {
        let m = unit(1000);
        let f = FeField::from_fn(m, |x| (x - 0.4567).abs()).unwrap();
        let j = gradient_jump(&f, 0.4567, 10).unwrap();
        assert!((j - 2.0).abs() < 1e-10, "{j}");

        let affine = FeField::from_fn(m, |x| 3.0 * x - 1.0).unwrap();
        assert!(gradient_jump(&affine, 0.5, 10).unwrap().abs() < 1e-9);
    }

    #[test]
    fn jump_stencil_bounds() {
        let m = unit(100);
        let f = FeField::zeros(m);
        assert!(matches!(
            gradient_jump(&f, 0.05, 10),
            Err(Error::StencilOutOfBounds { .. })
        ));
        assert!(matches!(
            gradient_jump(&f, 0.95, 10),
            Err(Error::StencilOutOfBounds { .. })
        ));
        assert!(gradient_jump(&f, 1.5, 3).is_err());
        assert!(gradient_jump(&f, 0.5, 10).is_ok());
    }

    #[test]
    fn quadratic_interior_has_no_jump() {
        let p = BarenblattProfile::new(1.0).unwrap();
        let mesh = Mesh1D::uniform(-2.0, 2.0, 400).unwrap();
        let b = FeField::from_fn(mesh, |x| barenblatt(x, 0.0, &p)).unwrap();
        assert!(gradient_jump(&b, 0.5003, 8).unwrap().abs() < 1e-9);
    }

    #[test]
    fn smooth_jump_vanishes_under_refinement() {
        // halving study on a non-polynomial profile; the fitted parabolas
        // miss only cubic and higher terms, so the decay beats O(h)
        let jump_at = |n: usize| {
            let mesh = Mesh1D::uniform(0.0, 1.0, n).unwrap();
            let f = FeField::from_fn(mesh, |x| (3.0 * x).sin() + (2.0 * x).exp()).unwrap();
            (gradient_jump(&f, 0.4321, 10).unwrap().abs(), mesh.h())
        };
        let runs: Vec<(f64, f64)> = [200, 400, 800, 1600].into_iter().map(jump_at).collect();
        let c = runs[0].0 / runs[0].1;
        assert!(runs.iter().all(|(j, h)| *j <= c * h), "{runs:?}");
        assert!(runs[3].0 < 0.05 * runs[0].0, "{runs:?}");
    }

    proptest! {
        #[test]
        fn jump_invariant_under_affine(a in -5.0f64..5.0, b in -5.0f64..5.0, xc in 0.3f64..0.7) {
            let m = unit(400);
            let f = FeField::from_fn(m, |x| (x - 0.5).powi(2) + (x - xc).abs()).unwrap();
            let g = FeField::from_fn(m, |x| (x - 0.5).powi(2) + (x - xc).abs() + a * x + b).unwrap();
            let jf = gradient_jump(&f, xc, 6).unwrap();
            let jg = gradient_jump(&g, xc, 6).unwrap();
            prop_assert!((jf - jg).abs() < 1e-8);
        }

        #[test]
        fn mass_linear_defect_symmetric(
            f in prop::collection::vec(0.0f64..5.0, 11),
            g in prop::collection::vec(0.0f64..5.0, 11),
            s in -2.0f64..2.0,
        ) {
            let m = unit(10);
            let ff = FeField::new(m, f).unwrap();
            let gg = FeField::new(m, g).unwrap();
            let comb = ff.zip_with(&gg, |x, y| x + s * y).unwrap();
            prop_assert!((mass(&comb) - mass(&ff) - s * mass(&gg)).abs() < 1e-12);
            let d = segregation_defect(&ff, &gg).unwrap();
            prop_assert!(d >= 0.0);
            prop_assert!((d - segregation_defect(&gg, &ff).unwrap()).abs() < 1e-14);
        }
    }
}
