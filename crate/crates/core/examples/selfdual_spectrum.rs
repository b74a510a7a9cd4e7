//! Spectrum of the self-dual Weyl operator on the Fubini-Study metric and on
//! the Kodaira-Thurston nilmanifold.

use hermitian_weyl::catalog::builtin;
use hermitian_weyl::conditions::{FrameSeed, PointAnalysis};
use hermitian_weyl::pointgeom::Vec4;

fn main() -> hermitian_weyl::Result<()> {
    let seed = Vec4::from(FrameSeed::default().seed);
    for id in ["fubini_study_cp2", "kodaira_thurston"] {
        let spec = builtin(id)?;
        let a = PointAnalysis::compute(&spec, &[0.2, 0.3, 0.1, 0.4], &seed, 0.0)?;
        let s = a.s();
        let ev = a.wplus.eigenvalues;
        println!("{id}: S = {s:.6}, S* = {:.6}", a.star.s_star);
        println!("  W+ eigenvalues  {:+.6} {:+.6} {:+.6}", ev[0], ev[1], ev[2]);
        println!("  (S/3, -S/6, -S/6) {:+.6} {:+.6} {:+.6}", s / 3.0, -s / 6.0, -s / 6.0);
        println!("  |W+|^2 = {:.6}, S^2/6 = {:.6}", a.wplus.norm2, s * s / 6.0);
    }
    Ok(())
}
