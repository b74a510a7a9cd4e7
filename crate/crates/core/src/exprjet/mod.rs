//! Coordinate expressions and their Taylor jets.

pub mod expr;
pub mod jet;
pub mod series;

pub use expr::{coord_names, parse_expression, Expr, Func};
pub use jet::{coeff_count, multi_index_at, multi_index_position, Jet, MAX_ORDER, NVARS};

use crate::error::{GeomError, Result};
use expr::integer_exponent;

/// Evaluates `expr` at `point` together with all partials up to `order`.
pub fn eval_jet(expr: &Expr, point: &[f64; 4], order: usize) -> Result<Jet> {
    if order > MAX_ORDER {
        return Err(GeomError::OrderOutOfRange(order));
    }
    eval_rec(expr, point, order)
}

fn eval_rec(e: &Expr, p: &[f64; 4], order: usize) -> Result<Jet> {
    Ok(match e {
        Expr::Num(v) => Jet::constant(*v, order),
        Expr::Var(i) => Jet::variable(*i, p[*i], order),
        Expr::Neg(a) => -eval_rec(a, p, order)?,
        Expr::Add(a, b) => eval_rec(a, p, order)? + eval_rec(b, p, order)?,
        Expr::Sub(a, b) => eval_rec(a, p, order)? - eval_rec(b, p, order)?,
        Expr::Mul(a, b) => eval_rec(a, p, order)? * eval_rec(b, p, order)?,
        Expr::Div(a, b) => eval_rec(a, p, order)?.div(&eval_rec(b, p, order)?)?,
        Expr::Pow(a, b) => {
            let base = eval_rec(a, p, order)?;
            if let Some(n) = integer_exponent(b) {
                base.powi(n)?
            } else if let Expr::Num(x) = **b {
                base.powf(x)?
            } else {
                let ex = eval_rec(b, p, order)?;
                (&ex * &base.ln()?).exp()
            }
        }
        Expr::Call(f, a) => {
            let x = eval_rec(a, p, order)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan()?,
                Func::Exp => x.exp(),
                Func::Log => x.ln()?,
                Func::Sqrt => x.sqrt()?,
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Tanh => x.tanh(),
                Func::Atan => x.atan(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyzt() -> [String; 4] {
        coord_names(["x", "y", "z", "t"])
    }

    #[test]
    fn square_at_three() {
        let e = parse_expression("x^2", &xyzt()).unwrap();
        let j = eval_jet(&e, &[3.0, 0.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(j.value(), 9.0);
        assert_eq!(j.d1(0), 6.0);
        assert_eq!(j.d2(0, 0), 2.0);
    }

    #[test]
    fn sine_at_zero() {
        let e = parse_expression("sin(x)", &xyzt()).unwrap();
        let j = eval_jet(&e, &[0.0; 4], 3).unwrap();
        let d = |k: u8| j.derivative([k, 0, 0, 0]).unwrap();
        assert_eq!([d(0), d(1), d(2), d(3)], [0.0, 1.0, 0.0, -1.0]);
    }

    #[test]
    fn order_and_domain_errors() {
        let e = parse_expression("log(x)", &xyzt()).unwrap();
        assert!(matches!(eval_jet(&e, &[1.0; 4], 5), Err(GeomError::OrderOutOfRange(5))));
        assert!(matches!(eval_jet(&e, &[-1.0; 4], 1), Err(GeomError::Domain(_))));
    }

    #[test]
    fn symbolic_exponent() {
        let e = parse_expression("x^y", &xyzt()).unwrap();
        let j = eval_jet(&e, &[2.0, 3.0, 0.0, 0.0], 1).unwrap();
        assert!((j.value() - 8.0).abs() < 1e-14);
        assert!((j.d1(0) - 12.0).abs() < 1e-13);
        assert!((j.d1(1) - 8.0 * 2f64.ln()).abs() < 1e-13);
    }
}
