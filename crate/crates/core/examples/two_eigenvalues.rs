//! Four equivalent ways to say that W₊ has a repeated eigenvalue, evaluated
//! side by side on a Kähler metric and on the nilmanifold.

use hermitian_weyl::catalog::builtin;
use hermitian_weyl::conditions::prop21_equivalence;

fn main() -> hermitian_weyl::Result<()> {
    for id in ["kahler_potential_generic", "kodaira_thurston"] {
        let r = prop21_equivalence(&builtin(id)?, 5, 0)?;
        println!("{id}: coherent {}", r.coherent);
        for p in &r.points {
            let [a, b, c, d] = p.residuals;
            println!("  spectrum {a:.2e}  norm {b:.2e}  projector {c:.2e}  Ric*/R~ {d:.2e}");
        }
    }
    Ok(())
}
