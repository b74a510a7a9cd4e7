//! ∇J after a conformal change e^f g, predicted from ∇J and df versus
//! recomputed from the new Christoffel symbols.

use hermitian_weyl::catalog::builtin;
use hermitian_weyl::conditions::conformal_check;
use hermitian_weyl::exprjet::parse_expression;

fn main() -> hermitian_weyl::Result<()> {
    for id in ["kodaira_thurston", "fubini_study_cp2", "perturbed_j"] {
        let spec = builtin(id)?;
        let f = parse_expression(
            &format!("0.2*{} + 0.1*{}^2", spec.coords[0], spec.coords[1]),
            &spec.coords,
        )?;
        let worst = spec
            .sample_points(10, 0)
            .iter()
            .map(|p| conformal_check(&spec, p, &f).map(|c| c.rel_residual))
            .collect::<hermitian_weyl::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("{id}: largest relative mismatch {worst:.2e}");
    }
    Ok(())
}
