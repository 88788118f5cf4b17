//! Block Thomas algorithm for block-tridiagonal systems with 2×2 blocks.
//!
//! No pivoting is done across block rows. Each 2×2 pivot is inverted in
//! closed form and rejected when its determinant is negligible relative to
//! the size of its entries.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Relative determinant threshold for pivot blocks.
pub const PIVOT_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Block2(pub [[f64; 2]; 2]);

impl Block2 {
    pub const ZERO: Block2 = Block2([[0.0; 2]; 2]);
    pub const IDENTITY: Block2 = Block2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn diag(a: f64, b: f64) -> Self {
        Block2([[a, 0.0], [0.0, b]])
    }

    pub fn scale(self, s: f64) -> Self {
        let m = self.0;
        Block2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn det(&self) -> f64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn mul_vec(&self, x: [f64; 2]) -> [f64; 2] {
        let m = self.0;
        [
            m[0][0] * x[0] + m[0][1] * x[1],
            m[1][0] * x[0] + m[1][1] * x[1],
        ]
    }

    /// Inverse, or `None` when `|det| ≤ PIVOT_TOL · max_abs²`.
    pub fn try_inverse(&self) -> Option<Block2> {
        let det = self.det();
        let scale = self.max_abs();
        if !(det.abs() > PIVOT_TOL * scale * scale) {
            return None;
        }
        let m = self.0;
        let inv = 1.0 / det;
        Some(Block2([
            [m[1][1] * inv, -m[0][1] * inv],
            [-m[1][0] * inv, m[0][0] * inv],
        ]))
    }
}

impl Add for Block2 {
    type Output = Block2;
    fn add(self, rhs: Block2) -> Block2 {
        let (a, b) = (self.0, rhs.0);
        Block2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Block2 {
    type Output = Block2;
    fn sub(self, rhs: Block2) -> Block2 {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Block2 {
    type Output = Block2;
    fn mul(self, rhs: Block2) -> Block2 {
        let (a, b) = (self.0, rhs.0);
        let mut c = [[0.0; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Block2(c)
    }
}

/// Block-tridiagonal matrix; `sub[i]` couples row `i + 1` to column `i`,
/// `sup[i]` couples row `i` to column `i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTridiagonal {
    pub sub: Vec<Block2>,
    pub diag: Vec<Block2>,
    pub sup: Vec<Block2>,
}

impl BlockTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            sub: vec![Block2::ZERO; n.saturating_sub(1)],
            diag: vec![Block2::ZERO; n],
            sup: vec![Block2::ZERO; n.saturating_sub(1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n);
        a.diag.fill(Block2::IDENTITY);
        a
    }

    pub fn n_block_rows(&self) -> usize {
        self.diag.len()
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.n_block_rows();
        let off = n.saturating_sub(1);
        for len in [self.sub.len(), self.sup.len()] {
            if len != off {
                return Err(Error::LengthMismatch {
                    expected: off,
                    got: len,
                });
            }
        }
        let finite = self
            .sub
            .iter()
            .chain(&self.diag)
            .chain(&self.sup)
            .all(|b| b.0.iter().flatten().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::NanDetected("block-tridiagonal matrix"));
        }
        Ok(())
    }

    pub fn mul_vec(&self, x: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let n = self.n_block_rows();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i].mul_vec(x[i]);
                if i > 0 {
                    let s = self.sub[i - 1].mul_vec(x[i - 1]);
                    y = [y[0] + s[0], y[1] + s[1]];
                }
                if i + 1 < n {
                    let s = self.sup[i].mul_vec(x[i + 1]);
                    y = [y[0] + s[0], y[1] + s[1]];
                }
                y
            })
            .collect()
    }

    /// Expanded `2n × 2n` dense matrix, unknowns interleaved per block row.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n_block_rows();
        let mut a = vec![vec![0.0; 2 * n]; 2 * n];
        let mut put = |bi: usize, bj: usize, b: &Block2| {
            for r in 0..2 {
                for c in 0..2 {
                    a[2 * bi + r][2 * bj + c] = b.0[r][c];
                }
            }
        };
        for i in 0..n {
            put(i, i, &self.diag[i]);
            if i > 0 {
                put(i, i - 1, &self.sub[i - 1]);
            }
            if i + 1 < n {
                put(i, i + 1, &self.sup[i]);
            }
        }
        a
    }
}

/// Max-norm residual `‖A x − b‖_∞`.
pub fn residual_inf(a: &BlockTridiagonal, x: &[[f64; 2]], rhs: &[[f64; 2]]) -> f64 {
    a.mul_vec(x)
        .iter()
        .zip(rhs)
        .flat_map(|(y, b)| [(y[0] - b[0]).abs(), (y[1] - b[1]).abs()])
        .fold(0.0, f64::max)
}

/// Solves `A x = rhs` by forward block elimination and back substitution.
pub fn solve_block_thomas(a: &BlockTridiagonal, rhs: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    a.check_shape()?;
    let n = a.n_block_rows();
    if rhs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    // c'[i] = P_i⁻¹ sup[i], d'[i] = P_i⁻¹ (rhs[i] − sub[i−1] d'[i−1]),
    // with pivot P_i = diag[i] − sub[i−1] c'[i−1].
    let mut c_prime = Vec::with_capacity(n.saturating_sub(1));
    let mut d_prime: Vec<[f64; 2]> = Vec::with_capacity(n);
    for i in 0..n {
        let (pivot, r) = if i == 0 {
            (a.diag[0], rhs[0])
        } else {
            let l = a.sub[i - 1];
            let t = l.mul_vec(d_prime[i - 1]);
            (
                a.diag[i] - l * c_prime[i - 1],
                [rhs[i][0] - t[0], rhs[i][1] - t[1]],
            )
        };
        let inv = pivot.try_inverse().ok_or(Error::SingularPivot {
            row: i,
            det: pivot.det(),
        })?;
        if i + 1 < n {
            c_prime.push(inv * a.sup[i]);
        }
        d_prime.push(inv.mul_vec(r));
    }

    let mut x = d_prime;
    for i in (0..n - 1).rev() {
        let t = c_prime[i].mul_vec(x[i + 1]);
        x[i] = [x[i][0] - t[0], x[i][1] - t[1]];
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NanDetected("block Thomas solution"));
    }
    Ok(x)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Dense Gaussian elimination with partial pivoting, independent of
    /// the block structure.
    pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    pub fn random_dominant(rng: &mut StdRng, n: usize) -> (BlockTridiagonal, Vec<[f64; 2]>) {
        let rand_block = |rng: &mut StdRng| {
            Block2([
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            ])
        };
        let mut a = BlockTridiagonal::zeros(n);
        for i in 0..n.saturating_sub(1) {
            a.sub[i] = rand_block(rng);
            a.sup[i] = rand_block(rng);
        }
        for i in 0..n {
            let mut d = rand_block(rng);
            // row sums of off-diagonal magnitudes are at most 5
            d.0[0][0] += 6.0 * rng.gen_range(1.0..2.0);
            d.0[1][1] += 6.0 * rng.gen_range(1.0..2.0);
            a.diag[i] = d;
        }
        let rhs = (0..n)
            .map(|_| [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)])
            .collect();
        (a, rhs)
    }

    fn flat(x: &[[f64; 2]]) -> Vec<f64> {
        x.iter().flatten().copied().collect()
    }

    #[test]
    fn identity_system() {
        let a = BlockTridiagonal::identity(5);
        let b: Vec<[f64; 2]> = (0..5).map(|i| [i as f64, -(i as f64) * 0.5]).collect();
        assert_eq!(solve_block_thomas(&a, &b).unwrap(), b);
    }

    #[test]
    fn matches_dense_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        let (a, rhs) = random_dominant(&mut rng, 8);
        let x = solve_block_thomas(&a, &rhs).unwrap();
        let x_ref = dense_solve(a.to_dense(), flat(&rhs));
        for (u, v) in flat(&x).iter().zip(&x_ref) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let mut a = BlockTridiagonal::identity(3);
        a.diag[0] = Block2::ZERO;
        assert!(matches!(
            solve_block_thomas(&a, &[[1.0, 1.0]; 3]),
            Err(Error::SingularPivot { row: 0, .. })
        ));

        // singular only after elimination
        let mut a = BlockTridiagonal::identity(2);
        a.sup[0] = Block2::IDENTITY;
        a.sub[0] = Block2::IDENTITY;
        assert!(matches!(
            solve_block_thomas(&a, &[[1.0, 1.0]; 2]),
            Err(Error::SingularPivot { row: 1, .. })
        ));
    }

    #[test]
    fn shape_errors() {
        let a = BlockTridiagonal::identity(3);
        assert!(matches!(
            solve_block_thomas(&a, &[[1.0, 1.0]; 2]),
            Err(Error::LengthMismatch { .. })
        ));
        let mut bad = BlockTridiagonal::identity(3);
        bad.sup.pop();
        assert!(solve_block_thomas(&bad, &[[1.0, 1.0]; 3]).is_err());
    }

    fn block_strategy() -> impl Strategy<Value = Block2> {
        prop::array::uniform2(prop::array::uniform2(-1.0f64..1.0)).prop_map(Block2)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Diagonal blocks with a positive definite symmetric part that
        // dominates the couplings.
        #[test]
        fn residual_contract(
            n in 1usize..=64,
            seed_blocks in prop::collection::vec((block_strategy(), block_strategy(), block_strategy(), 4.5f64..8.0), 64),
            rhs in prop::collection::vec(prop::array::uniform2(-100.0f64..100.0), 64),
        ) {
            let mut a = BlockTridiagonal::zeros(n);
            for i in 0..n {
                let (l, d, u, s) = seed_blocks[i];
                a.diag[i] = Block2::diag(s, s) + d.scale(0.5);
                if i + 1 < n {
                    a.sub[i] = l;
                    a.sup[i] = u;
                }
            }
            let rhs = &rhs[..n];
            let x = solve_block_thomas(&a, rhs).unwrap();
            let bnorm = rhs.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(residual_inf(&a, &x, rhs) <= 1e-10 * (1.0 + bnorm));
            let x_ref = dense_solve(a.to_dense(), flat(rhs));
            for (u, v) in flat(&x).iter().zip(&x_ref) {
                prop_assert!((u - v).abs() <= 1e-10 * (1.0 + v.abs()));
            }
        }
    }
}
