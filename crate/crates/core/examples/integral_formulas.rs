//! Both integral formulas over compact fundamental domains, and a plain
//! volume integral.

use hermitian_weyl::catalog::builtin;
use hermitian_weyl::conditions::{check_integral_formulas, integrate_density, QuadratureSpec};

fn main() -> hermitian_weyl::Result<()> {
    let quad = QuadratureSpec::default();
    for id in ["flat_torus", "kodaira_thurston"] {
        let spec = builtin(id)?;
        let r = check_integral_formulas(&spec, &quad)?;
        println!("{id} ({}): volume {:.6}, Q(J) {:.6}", r.method, r.volume, r.q);
        println!(
            "  eq117 {:+.3e}  eq118 {:+.3e}  eq117 - eq118 + eq116/2 {:+.3e}",
            r.eq117, r.eq118, r.combination_residual
        );
    }
    let torus = builtin("flat_torus")?;
    let bump = integrate_density(&torus, |p| Ok(vec![1.0 + p[0].cos() * p[1].sin().powi(2)]), &quad)?;
    println!(
        "flat torus, 1 + cos x sin^2 y: {:.10} ± {:.1e} ({})",
        bump.value[0], bump.error_estimate[0], bump.method
    );
    Ok(())
}
