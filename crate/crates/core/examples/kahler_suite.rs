//! The identity suite on the Kähler entries of the catalog, as text reports.

use hermitian_weyl::catalog::builtin;
use hermitian_weyl::conditions::{run_suite, write_text, SuiteSettings};

fn main() -> hermitian_weyl::Result<()> {
    let settings = SuiteSettings {
        points: 25,
        seed: 1,
        ..SuiteSettings::default()
    };
    let mut out = std::io::stdout().lock();
    for id in ["fubini_study_cp2", "complex_hyperbolic_ch2", "kahler_potential_generic"] {
        let report = run_suite(&builtin(id)?, &settings)?;
        write_text(&mut out, &report)?;
        println!();
    }
    Ok(())
}
