//! Univariate Taylor coefficients of the elementary functions, used to lift
//! them onto multivariate jets by composition.

use super::jet::MAX_ORDER;

const LEN: usize = MAX_ORDER + 1;

/// Coefficients `a_k` with `f(v + t) = Σ a_k t^k + O(t^{order+1})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series {
    a: [f64; LEN],
    order: usize,
}

impl Series {
    fn from_fn(order: usize, f: impl Fn(usize) -> f64) -> Self {
        let order = order.min(MAX_ORDER);
        let mut a = [0.0; LEN];
        for (k, x) in a.iter_mut().enumerate().take(order + 1) {
            *x = f(k);
        }
        Series { a, order }
    }

    pub fn coeff(&self, k: usize) -> f64 {
        if k <= self.order {
            self.a[k]
        } else {
            0.0
        }
    }

    fn mul(&self, other: &Series) -> Series {
        let order = self.order.min(other.order);
        Series::from_fn(order, |k| (0..=k).map(|i| self.a[i] * other.a[k - i]).sum())
    }

    fn div(&self, other: &Series) -> Series {
        let order = self.order.min(other.order);
        let mut q = [0.0; LEN];
        for k in 0..=order {
            let mut s = self.a[k];
            for i in 0..k {
                s -= q[i] * other.a[k - i];
            }
            q[k] = s / other.a[0];
        }
        Series { a: q, order }
    }

    /// Antiderivative with the given constant term.
    fn integrate(&self, c0: f64) -> Series {
        let order = (self.order + 1).min(MAX_ORDER);
        Series::from_fn(order, |k| if k == 0 { c0 } else { self.a[k - 1] / k as f64 })
    }

    fn factorial(k: usize) -> f64 {
        (1..=k).map(|i| i as f64).product()
    }

    pub fn exp_at(v: f64, order: usize) -> Self {
        let e = v.exp();
        Self::from_fn(order, |k| e / Self::factorial(k))
    }

    pub fn ln_at(v: f64, order: usize) -> Self {
        Self::from_fn(order, |k| {
            if k == 0 {
                v.ln()
            } else {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign / (k as f64 * v.powi(k as i32))
            }
        })
    }

    pub fn recip_at(v: f64, order: usize) -> Self {
        Self::from_fn(order, |k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / v.powi(k as i32 + 1)
        })
    }

    /// Binomial series of `(v + t)^p` for `v > 0`.
    pub fn pow_at(v: f64, p: f64, order: usize) -> Self {
        let base = v.powf(p);
        Self::from_fn(order, |k| {
            let mut binom = 1.0;
            for i in 0..k {
                binom *= (p - i as f64) / (i as f64 + 1.0);
            }
            base * binom / v.powi(k as i32)
        })
    }

    pub fn sqrt_at(v: f64, order: usize) -> Self {
        Self::pow_at(v, 0.5, order)
    }

    pub fn sin_at(v: f64, order: usize) -> Self {
        let (s, c) = v.sin_cos();
        // k-th derivative of sin cycles through sin, cos, -sin, -cos
        Self::from_fn(order, |k| {
            let d = match k % 4 {
                0 => s,
                1 => c,
                2 => -s,
                _ => -c,
            };
            d / Self::factorial(k)
        })
    }

    pub fn cos_at(v: f64, order: usize) -> Self {
        let (s, c) = v.sin_cos();
        Self::from_fn(order, |k| {
            let d = match k % 4 {
                0 => c,
                1 => -s,
                2 => -c,
                _ => s,
            };
            d / Self::factorial(k)
        })
    }

    pub fn tan_at(v: f64, order: usize) -> Self {
        Self::sin_at(v, order).div(&Self::cos_at(v, order))
    }

    pub fn sinh_at(v: f64, order: usize) -> Self {
        let (s, c) = (v.sinh(), v.cosh());
        Self::from_fn(order, |k| if k % 2 == 0 { s } else { c } / Self::factorial(k))
    }

    pub fn cosh_at(v: f64, order: usize) -> Self {
        let (s, c) = (v.sinh(), v.cosh());
        Self::from_fn(order, |k| if k % 2 == 0 { c } else { s } / Self::factorial(k))
    }

    pub fn tanh_at(v: f64, order: usize) -> Self {
        Self::sinh_at(v, order).div(&Self::cosh_at(v, order))
    }

    pub fn atan_at(v: f64, order: usize) -> Self {
        if order == 0 {
            return Self::from_fn(0, |_| v.atan());
        }
        // atan' = 1 / (1 + (v + t)²)
        let shifted = Self::from_fn(order - 1, |k| match k {
            0 => v,
            1 => 1.0,
            _ => 0.0,
        });
        let denom = shifted.mul(&shifted);
        let denom = Self::from_fn(order - 1, |k| denom.coeff(k) + if k == 0 { 1.0 } else { 0.0 });
        let one = Self::from_fn(order - 1, |k| if k == 0 { 1.0 } else { 0.0 });
        one.div(&denom).integrate(v.atan())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-13 * (1.0 + b.abs())
    }

    #[test]
    fn tan_matches_known_derivatives_at_zero() {
        // tan t = t + t³/3 + ...
        let s = Series::tan_at(0.0, 4);
        let expect = [0.0, 1.0, 0.0, 1.0 / 3.0, 0.0];
        for k in 0..=4 {
            assert!(close(s.coeff(k), expect[k]), "k={k}");
        }
    }

    #[test]
    fn atan_matches_known_derivatives_at_one() {
        // d/dx atan = 1/(1+x²) = 1/2 at 1; second derivative -2x/(1+x²)² = -1/2
        let s = Series::atan_at(1.0, 4);
        assert!(close(s.coeff(0), std::f64::consts::FRAC_PI_4));
        assert!(close(s.coeff(1), 0.5));
        assert!(close(s.coeff(2), -0.25));
        // third derivative (6x² − 2)/(1+x²)³ = 4/8 = 1/2, over 3!
        assert!(close(s.coeff(3), 0.5 / 6.0));
    }

    #[test]
    fn tanh_odd_series() {
        let s = Series::tanh_at(0.0, 4);
        assert!(close(s.coeff(1), 1.0));
        assert!(close(s.coeff(3), -1.0 / 3.0));
    }

    #[test]
    fn sqrt_binomial() {
        let s = Series::sqrt_at(4.0, 2);
        assert!(close(s.coeff(0), 2.0));
        assert!(close(s.coeff(1), 0.25));
        assert!(close(s.coeff(2), -1.0 / 64.0));
    }
}
