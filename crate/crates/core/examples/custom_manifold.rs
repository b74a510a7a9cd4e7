//! A manifold from config text: a product of a curved surface and a flat
//! plane, which is Kähler for the product complex structure.

use hermitian_weyl::catalog::parse_manifold_config;
use hermitian_weyl::conditions::{run_suite, write_text, SuiteSettings};

const CONFIG: &str = "\
[manifold]
id = surface_times_plane
coords = x, y, z, t
domain = [-1, 1], [-1, 1], [-1, 1], [-1, 1]
description = e^{0.3 x^2}(dx^2 + dy^2) + dz^2 + dt^2
[metric]
g_11 = exp(0.3*x^2)
g_22 = exp(0.3*x^2)
g_33 = 1
g_44 = 1
[structure]
J_2_1 = 1
J_1_2 = -1
J_4_3 = 1
J_3_4 = -1
[tags]
kahler, almost-kahler
";

fn main() -> hermitian_weyl::Result<()> {
    let spec = parse_manifold_config(CONFIG)?;
    let report = run_suite(&spec, &SuiteSettings::default())?;
    write_text(&mut std::io::stdout().lock(), &report)?;
    Ok(())
}
