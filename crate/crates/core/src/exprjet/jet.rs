//! Truncated multivariate Taylor arithmetic in the four chart coordinates.
//!
//! A [`Jet`] of order `N` stores the Taylor coefficients `c_α = ∂^α f / α!`
//! for every multi-index `α` with `|α| ≤ N`. Multi-indices are laid out in
//! graded order, so a jet of lower order is a prefix of a jet of higher order
//! and truncation is a matter of shortening the active length.
//!
//! Multiplication is truncated polynomial multiplication; elementary functions
//! are composed through their univariate Taylor series (see [`super::series`]).
//! Mixed partials are symmetric by construction because only one coefficient
//! per multi-index exists.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use super::series::Series;
use crate::error::GeomError;

/// Number of chart coordinates.
pub const NVARS: usize = 4;
/// Highest supported jet order.
pub const MAX_ORDER: usize = 4;
/// Number of multi-indices of degree ≤ `MAX_ORDER` in four variables.
pub const MAX_COEFFS: usize = 70;

const INVALID: u8 = u8::MAX;

/// Number of coefficients of a jet of the given order: C(order + 4, 4).
pub const fn coeff_count(order: usize) -> usize {
    match order {
        0 => 1,
        1 => 5,
        2 => 15,
        3 => 35,
        _ => 70,
    }
}

struct Tables {
    exps: Vec<[u8; NVARS]>,
    lookup: [u8; 625],
    inv_factorial: Vec<f64>,
    factorial: Vec<f64>,
    // mul[order] = (a, b, c) with c = index(a + b), deg(c) <= order
    mul: Vec<Vec<(u8, u8, u8)>>,
    // shift[var][idx] = index(idx + e_var) or INVALID
    shift: [[u8; MAX_COEFFS]; NVARS],
}

fn lookup_key(e: &[u8; NVARS]) -> usize {
    e.iter().fold(0usize, |acc, &x| acc * 5 + x as usize)
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exps = Vec::with_capacity(MAX_COEFFS);
        for deg in 0..=MAX_ORDER as u8 {
            // lexicographic descending within a degree
            for a in (0..=deg).rev() {
                for b in (0..=deg - a).rev() {
                    for c in (0..=deg - a - b).rev() {
                        let d = deg - a - b - c;
                        exps.push([a, b, c, d]);
                    }
                }
            }
        }
        debug_assert_eq!(exps.len(), MAX_COEFFS);

        let mut lookup = [INVALID; 625];
        for (i, e) in exps.iter().enumerate() {
            lookup[lookup_key(e)] = i as u8;
        }

        let fact = |n: u8| (1..=n as u32).map(f64::from).product::<f64>();
        let factorial: Vec<f64> = exps.iter().map(|e| e.iter().map(|&k| fact(k)).product()).collect();
        let inv_factorial = factorial.iter().map(|f| 1.0 / f).collect();

        let deg = |e: &[u8; NVARS]| e.iter().map(|&x| x as usize).sum::<usize>();
        let mut mul = Vec::with_capacity(MAX_ORDER + 1);
        for order in 0..=MAX_ORDER {
            let n = coeff_count(order);
            let mut table = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    let ea = exps[a];
                    let eb = exps[b];
                    if deg(&ea) + deg(&eb) > order {
                        continue;
                    }
                    let sum = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                    table.push((a as u8, b as u8, lookup[lookup_key(&sum)]));
                }
            }
            mul.push(table);
        }

        let mut shift = [[INVALID; MAX_COEFFS]; NVARS];
        for (v, row) in shift.iter_mut().enumerate() {
            for (i, e) in exps.iter().enumerate() {
                if deg(e) < MAX_ORDER {
                    let mut s = *e;
                    s[v] += 1;
                    row[i] = lookup[lookup_key(&s)];
                }
            }
        }

        Tables {
            exps,
            lookup,
            inv_factorial,
            factorial,
            mul,
            shift,
        }
    })
}

/// Position of a multi-index in the graded layout, if its degree is ≤ 4.
pub fn multi_index_position(alpha: [u8; NVARS]) -> Option<usize> {
    if alpha.iter().any(|&a| a as usize > MAX_ORDER) {
        return None;
    }
    match tables().lookup[lookup_key(&alpha)] {
        INVALID => None,
        i => Some(i as usize),
    }
}

/// Multi-index stored at a given position.
pub fn multi_index_at(pos: usize) -> [u8; NVARS] {
    tables().exps[pos]
}

/// Truncated Taylor expansion of a scalar field at a chart point.
#[derive(Clone, PartialEq)]
pub struct Jet {
    order: u8,
    c: [f64; MAX_COEFFS],
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl Jet {
    /// Constant field.
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = [0.0; MAX_COEFFS];
        c[0] = value;
        Jet {
            order: order.min(MAX_ORDER) as u8,
            c,
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    /// The coordinate function `x_var` expanded at `value`.
    pub fn variable(var: usize, value: f64, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order >= 1 {
            j.c[1 + var] = 1.0;
        }
        j
    }

    /// Builds a jet from Taylor coefficients in the graded layout.
    pub fn from_taylor(order: usize, coeffs: &[f64]) -> Self {
        let mut j = Self::zero(order);
        let n = coeff_count(j.order());
        j.c[..n.min(coeffs.len())].copy_from_slice(&coeffs[..n.min(coeffs.len())]);
        j
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn len(&self) -> usize {
        coeff_count(self.order())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Taylor coefficients `∂^α f / α!`, graded layout.
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.len()]
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Mixed partial derivative `∂^α f` at the expansion point.
    pub fn derivative(&self, alpha: [u8; NVARS]) -> Option<f64> {
        let deg: usize = alpha.iter().map(|&a| a as usize).sum();
        if deg > self.order() {
            return None;
        }
        let pos = multi_index_position(alpha)?;
        Some(self.c[pos] * tables().factorial[pos])
    }

    /// First partial `∂f/∂x_var`.
    pub fn d1(&self, var: usize) -> f64 {
        if self.order == 0 {
            return 0.0;
        }
        self.c[1 + var]
    }

    /// Second partial `∂²f/∂x_a∂x_b`.
    pub fn d2(&self, a: usize, b: usize) -> f64 {
        let mut alpha = [0u8; NVARS];
        alpha[a] += 1;
        alpha[b] += 1;
        self.derivative(alpha).unwrap_or(0.0)
    }

    /// Gradient (first partials).
    pub fn gradient(&self) -> [f64; NVARS] {
        std::array::from_fn(|i| self.d1(i))
    }

    /// Truncates to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        let mut j = self.clone();
        j.order = order as u8;
        let n = coeff_count(order);
        j.c[n..].fill(0.0);
        j
    }

    /// Coordinate partial derivative as a jet of one lower order.
    pub fn partial(&self, var: usize) -> Result<Self, GeomError> {
        if self.order == 0 {
            return Err(GeomError::InsufficientJetOrder {
                needed: 1,
                available: 0,
            });
        }
        let t = tables();
        let order = self.order() - 1;
        let mut out = Self::zero(order);
        for i in 0..coeff_count(order) {
            let s = t.shift[var][i] as usize;
            let k = t.exps[s][var] as f64;
            out.c[i] = k * self.c[s];
        }
        Ok(out)
    }

    /// Value of every first partial as a jet (one order lower).
    pub fn partials(&self) -> Result<[Jet; NVARS], GeomError> {
        Ok([self.partial(0)?, self.partial(1)?, self.partial(2)?, self.partial(3)?])
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        let n = self.len();
        for x in &mut out.c[..n] {
            *x *= s;
        }
        out
    }

    pub fn add_const(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    /// `self += a * other`, truncating to the lower order.
    pub fn axpy(&mut self, a: f64, other: &Jet) {
        if other.order < self.order {
            *self = self.truncate(other.order());
        }
        let n = self.len();
        for (x, y) in self.c[..n].iter_mut().zip(&other.c[..n]) {
            *x += a * y;
        }
    }

    /// `self += a * b`, truncating to the lowest order involved.
    pub fn add_product(&mut self, a: &Jet, b: &Jet) {
        let order = self.order.min(a.order).min(b.order);
        if order < self.order {
            *self = self.truncate(order as usize);
        }
        for &(i, j, k) in &tables().mul[order as usize] {
            self.c[k as usize] += a.c[i as usize] * b.c[j as usize];
        }
    }

    fn product(a: &Jet, b: &Jet) -> Jet {
        let mut out = Jet::zero(a.order.min(b.order) as usize);
        out.add_product(a, b);
        out
    }

    /// The non-constant remainder `self − self(0)`.
    fn increment(&self) -> Jet {
        let mut h = self.clone();
        h.c[0] = 0.0;
        h
    }

    /// Composes a univariate series (coefficients at this jet's value) with
    /// this jet's increment: `Σ_k a_k h^k`.
    pub fn compose(&self, series: &Series) -> Jet {
        let order = self.order();
        let h = self.increment();
        let mut acc = Jet::constant(series.coeff(order), order);
        for k in (0..order).rev() {
            acc = Jet::product(&acc, &h);
            acc.c[0] += series.coeff(k);
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet, GeomError> {
        let v = self.value();
        if v == 0.0 || !v.is_finite() {
            return Err(GeomError::Domain(format!("division by {v}")));
        }
        Ok(self.compose(&Series::recip_at(v, self.order())))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet, GeomError> {
        Ok(self * &other.recip()?)
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: i32) -> Result<Jet, GeomError> {
        if n == 0 {
            return Ok(Jet::constant(1.0, self.order()));
        }
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Real power `exp(p · log b)`, requires a positive base.
    pub fn powf(&self, p: f64) -> Result<Jet, GeomError> {
        Ok(self.ln()?.scale(p).exp())
    }

    pub fn exp(&self) -> Jet {
        self.compose(&Series::exp_at(self.value(), self.order()))
    }

    pub fn ln(&self) -> Result<Jet, GeomError> {
        let v = self.value();
        if v <= 0.0 || !v.is_finite() {
            return Err(GeomError::Domain(format!("log of non-positive value {v}")));
        }
        Ok(self.compose(&Series::ln_at(v, self.order())))
    }

    pub fn sqrt(&self) -> Result<Jet, GeomError> {
        let v = self.value();
        if v < 0.0 || (v == 0.0 && self.order > 0) || !v.is_finite() {
            return Err(GeomError::Domain(format!("sqrt of non-positive value {v}")));
        }
        if self.order == 0 {
            return Ok(Jet::constant(v.sqrt(), 0));
        }
        Ok(self.compose(&Series::sqrt_at(v, self.order())))
    }

    pub fn sin(&self) -> Jet {
        self.compose(&Series::sin_at(self.value(), self.order()))
    }

    pub fn cos(&self) -> Jet {
        self.compose(&Series::cos_at(self.value(), self.order()))
    }

    pub fn tan(&self) -> Result<Jet, GeomError> {
        let v = self.value();
        if v.cos() == 0.0 {
            return Err(GeomError::Domain(format!("tan pole at {v}")));
        }
        Ok(self.compose(&Series::tan_at(v, self.order())))
    }

    pub fn sinh(&self) -> Jet {
        self.compose(&Series::sinh_at(self.value(), self.order()))
    }

    pub fn cosh(&self) -> Jet {
        self.compose(&Series::cosh_at(self.value(), self.order()))
    }

    pub fn tanh(&self) -> Jet {
        self.compose(&Series::tanh_at(self.value(), self.order()))
    }

    pub fn atan(&self) -> Jet {
        self.compose(&Series::atan_at(self.value(), self.order()))
    }

    /// Largest absolute coefficient difference (in Taylor normalization).
    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        let n = coeff_count(self.order().min(other.order()));
        self.c[..n]
            .iter()
            .zip(&other.c[..n])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Scales the coefficient of multi-index α back by α! (for tests and I/O).
    pub fn derivative_vector(&self) -> Vec<f64> {
        let t = tables();
        self.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * t.factorial[i])
            .collect()
    }

    /// Inverse of [`Jet::derivative_vector`].
    pub fn from_derivatives(order: usize, derivs: &[f64]) -> Self {
        let t = tables();
        let mut j = Self::zero(order);
        let n = j.len();
        for i in 0..n.min(derivs.len()) {
            j.c[i] = derivs[i] * t.inv_factorial[i];
        }
        j
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let mut out = self.truncate(rhs.order());
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let mut out = self.truncate(rhs.order());
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        Jet::product(self, rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_counts_match_multi_indices() {
        for order in 0..=MAX_ORDER {
            let n = (0..MAX_COEFFS)
                .filter(|&i| multi_index_at(i).iter().map(|&x| x as usize).sum::<usize>() <= order)
                .count();
            assert_eq!(n, coeff_count(order));
        }
    }

    #[test]
    fn square_at_three() {
        let x = Jet::variable(0, 3.0, 2);
        let sq = &x * &x;
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.d1(0), 6.0);
        assert_eq!(sq.d2(0, 0), 2.0);
        assert_eq!(sq.d2(0, 1), 0.0);
    }

    #[test]
    fn sine_series_at_zero() {
        let s = Jet::variable(0, 0.0, 3).sin();
        let d: Vec<f64> = (0..=3u8).map(|k| s.derivative([k, 0, 0, 0]).unwrap()).collect();
        assert_eq!(d, vec![0.0, 1.0, 0.0, -1.0]);
    }

    #[test]
    fn partial_lowers_order() {
        let x = Jet::variable(0, 2.0, 4);
        let y = Jet::variable(1, -1.0, 4);
        let f = &(&x * &x) * &y; // x² y
        let fx = f.partial(0).unwrap();
        assert_eq!(fx.order(), 3);
        assert!((fx.value() - (-4.0)).abs() < 1e-15);
        assert!((fx.d1(1) - 4.0).abs() < 1e-15);
        assert!((fx.d2(0, 1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_domain_error() {
        assert!(Jet::constant(-1.0, 2).ln().is_err());
        assert!(Jet::constant(0.0, 1).sqrt().is_err());
        assert!(Jet::constant(0.0, 0).sqrt().is_ok());
    }

    #[test]
    fn reciprocal_series() {
        let x = Jet::variable(0, 2.0, 4);
        let r = x.recip().unwrap();
        // d^k/dx^k (1/x) = (-1)^k k! / x^{k+1}
        let expect = [0.5, -0.25, 0.25, -0.375, 0.75];
        for (k, e) in expect.iter().enumerate() {
            let d = r.derivative([k as u8, 0, 0, 0]).unwrap();
            assert!((d - e).abs() < 1e-14, "k={k}: {d} vs {e}");
        }
    }
}
