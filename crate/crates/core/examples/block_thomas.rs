//! Block-tridiagonal solve with 2×2 blocks on a coupled diffusion operator,
//! checked by its residual.
//!
//! ```text
//! cargo run --example block_thomas
//! ```

use crossdiff::linsolve::{residual_inf, solve_block_thomas, Block2, BlockTridiagonal};

fn main() -> crossdiff::Result<()> {
    let n = 64;
    let h = 1.0 / (n - 1) as f64;
    let coupling = Block2([[1.0, 0.5], [0.25, 3.0]]).scale(1.0 / (h * h));
    let mut a = BlockTridiagonal::zeros(n);
    for i in 0..n {
        let neighbours = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
        a.diag[i] = Block2::IDENTITY + coupling.scale(neighbours);
    }
    for i in 0..n - 1 {
        a.sub[i] = coupling.scale(-1.0);
        a.sup[i] = coupling.scale(-1.0);
    }
    let rhs: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let x = i as f64 * h;
            [(std::f64::consts::PI * x).cos(), x * (1.0 - x)]
        })
        .collect();
    let x = solve_block_thomas(&a, &rhs)?;
    println!("x[0] = {:?}, x[{}] = {:?}", x[0], n - 1, x[n - 1]);
    println!("residual = {:.3e}", residual_inf(&a, &x, &rhs));
    Ok(())
}
