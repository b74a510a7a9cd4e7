//! The Kodaira-Thurston nilmanifold: dΩ = 0 but N_J ≠ 0, so the Kähler
//! conditions fail by a definite margin while the almost Kähler identities hold.

use hermitian_weyl::catalog::builtin;
use hermitian_weyl::conditions::{classify_structure, run_suite, SuiteSettings, Tolerances};

fn main() -> hermitian_weyl::Result<()> {
    let spec = builtin("kodaira_thurston")?;
    let c = classify_structure(&spec, 20, 0, &Tolerances::default())?;
    println!("classification: {}", c.verdict);
    println!(
        "  |nabla J|/sqrt(c) {:.3}, |dOmega|/sqrt(c) {:.1e}, |N_J|/sqrt(c) {:.3}",
        c.r_nabla_j, c.r_d_omega, c.r_nijenhuis
    );
    let settings = SuiteSettings {
        points: 20,
        identities: ["EQ01", "EQ02", "EQ116", "EQ126", "EQ130"].map(String::from).to_vec(),
        ..SuiteSettings::default()
    };
    let report = run_suite(&spec, &settings)?;
    for i in &report.identities {
        println!(
            "{:<6} max rel {:>9.2e}  min (lhs-rhs)/scale {:>9}  {}",
            i.id,
            i.max_rel_residual.unwrap_or(f64::NAN),
            i.min_signed.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into()),
            i.verdict
        );
    }
    Ok(())
}
