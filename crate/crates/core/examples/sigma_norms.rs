//! Operator norms of a diffusion matrix and its inverse.

use weak_em::SigmaSpec;

fn main() -> weak_em::Result<()> {
    let cases = [
        vec![vec![2.0]],
        vec![vec![1.0, 0.0], vec![0.0, 3.0]],
        vec![vec![1.0, 0.5], vec![0.0, 2.0]],
    ];
    for rows in cases {
        let s = SigmaSpec::from_rows(&rows)?;
        println!(
            "{:?}: |σ| = {:.6}, |σ⁻¹| = {:.6}, condition = {:.6}, det(σσᵀ) = {:.6}",
            rows,
            s.op_norm(),
            s.inv_op_norm(),
            s.op_norm() * s.inv_op_norm(),
            s.det_gram()
        );
    }
    match SigmaSpec::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]) {
        Ok(_) => println!("singular matrix accepted?"),
        Err(e) => println!("singular matrix rejected: {e}"),
    }
    Ok(())
}
