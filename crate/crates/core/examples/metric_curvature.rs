//! Riemann, Ricci and scalar curvature of a metric typed as expressions.
//!
//! Run with `cargo run --example metric_curvature`.

use hermitian_weyl::curvature::CurvatureBundle;
use hermitian_weyl::exprjet::{coord_names, eval_jet, parse_expression};
use hermitian_weyl::pointgeom::MetricPoint;

fn main() -> hermitian_weyl::Result<()> {
    let coords = coord_names(["x", "y", "z", "t"]);
    // round S^4 in stereographic coordinates
    let conf = parse_expression("4 / (1 + x^2 + y^2 + z^2 + t^2)^2", &coords)?;
    let zero = parse_expression("0", &coords)?;
    let p = [0.3, -0.1, 0.2, 0.4];
    let jets = std::array::from_fn(|i| {
        std::array::from_fn(|j| eval_jet(if i == j { &conf } else { &zero }, &p, 4).expect("jet"))
    });
    let mp = MetricPoint::from_jets(p, jets)?;
    let b = CurvatureBundle::compute(&mp)?;
    println!("point {p:?}");
    println!("scalar curvature S = {:.12} (round unit sphere: 12)", b.s);
    println!("|Riem|^2 = {:.12} (constant curvature 1: 24)", b.riemann_norm2(&mp));
    println!("Ricci endomorphism (should be 3 Id):\n{:.9}", b.ric);
    Ok(())
}
