//! Scalar abstraction shared by the exact-rational, floating-point, and
//! automatic-differentiation backends.
//!
//! `Scalar` carries the ring operations every coefficient type must support;
//! `AdScalar` adds the analytic operations (sin, cos, exp, reciprocal) needed
//! on charts, plus conversion to and from `Complex<f64>`. Forward-mode
//! derivatives are provided by [`Jet`], which nests (`Jet<Jet<Complex64>>`)
//! for second derivatives.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Ring operations for multivector and spinor coefficients.
///
/// Methods take references so that arbitrary-precision types avoid copies.
pub trait Scalar: Clone + std::fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Complex conjugation; the identity on real scalar types.
    fn conj(&self) -> Self;
    fn from_i64(v: i64) -> Self;
    /// The element 1/2, exact in every backend (rationals and binary floats).
    fn half() -> Self;
    /// Whether conjugation can act nontrivially (true only for complex-based types).
    fn supports_conj() -> bool;
}

/// Scalars on which charts can be built: analytic functions plus an embedding
/// of `Complex64` values (used to lift frozen matrix representations into
/// derivative-carrying computations).
pub trait AdScalar: Scalar {
    fn from_c(v: Complex64) -> Self;
    /// The underlying complex value, discarding any derivative content.
    fn value_c(&self) -> Complex64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    /// Multiplicative inverse.
    fn inv(&self) -> Self;
    fn from_f64(v: f64) -> Self {
        Self::from_c(Complex64::new(v, 0.0))
    }
    /// Magnitude of the underlying value, ignoring derivatives.
    fn abs_val(&self) -> f64 {
        self.value_c().norm()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        *self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn half() -> Self {
        0.5
    }
    fn supports_conj() -> bool {
        false
    }
}

impl AdScalar for f64 {
    /// Real scalars can only absorb real values; chart geometry (frames,
    /// connections, curvature) is real and may run on f64 / Jet<f64>.
    fn from_c(v: Complex64) -> Self {
        debug_assert!(
            v.im == 0.0,
            "lifting a complex value {v} into a real scalar"
        );
        v.re
    }
    fn value_c(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn inv(&self) -> Self {
        1.0 / self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::ZERO
    }
    fn one() -> Self {
        Complex64::ONE
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn half() -> Self {
        Complex64::new(0.5, 0.0)
    }
    fn supports_conj() -> bool {
        true
    }
}

impl AdScalar for Complex64 {
    fn from_c(v: Complex64) -> Self {
        v
    }
    fn value_c(&self) -> Complex64 {
        *self
    }
    fn sin(&self) -> Self {
        Complex64::sin(*self)
    }
    fn cos(&self) -> Self {
        Complex64::cos(*self)
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn inv(&self) -> Self {
        Complex64::ONE / self
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        <BigRational as Zero>::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn half() -> Self {
        BigRational::new(1.into(), 2.into())
    }
    fn supports_conj() -> bool {
        false
    }
}

/// Returns `|v|` as `f64` for convergence checks on exact rationals.
pub fn rational_abs_f64(v: &BigRational) -> f64 {
    let a = v.abs();
    let num: f64 = approx_big(&a.numer().clone());
    let den: f64 = approx_big(&a.denom().clone());
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

fn approx_big(v: &num_bigint::BigInt) -> f64 {
    // Good enough for tolerance checks; exact tests compare rationals directly.
    let s = v.to_string();
    s.parse::<f64>().unwrap_or(f64::INFINITY)
}

/// Forward-mode dual number carrying a value and its partial derivatives.
///
/// An empty partials vector denotes a constant broadcast against any seeding
/// width, so representation matrices and other frozen data can enter
/// derivative-carrying arithmetic without knowing the seed dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T: Scalar> {
    pub val: T,
    pub d: Vec<T>,
}

impl<T: Scalar> Jet<T> {
    pub fn constant(val: T) -> Self {
        Jet { val, d: Vec::new() }
    }

    /// A coordinate value seeded with derivative 1 in slot `slot` of `width`.
    pub fn variable(val: T, slot: usize, width: usize) -> Self {
        let mut d = vec![T::zero(); width];
        d[slot] = T::one();
        Jet { val, d }
    }

    pub fn width(&self) -> usize {
        self.d.len()
    }

    /// Partial derivative in slot `slot`; zero for constants.
    pub fn partial(&self, slot: usize) -> T {
        self.d.get(slot).cloned().unwrap_or_else(T::zero)
    }

    fn zip<F: Fn(&T, &T) -> T>(a: &[T], b: &[T], f: F) -> Vec<T> {
        let w = a.len().max(b.len());
        let zero = T::zero();
        (0..w)
            .map(|i| f(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
            .collect()
    }
}

impl<T: Scalar> Scalar for Jet<T> {
    fn zero() -> Self {
        Jet::constant(T::zero())
    }
    fn one() -> Self {
        Jet::constant(T::one())
    }
    fn is_zero(&self) -> bool {
        self.val.is_zero() && self.d.iter().all(|p| p.is_zero())
    }
    fn add(&self, other: &Self) -> Self {
        Jet {
            val: self.val.add(&other.val),
            d: Jet::<T>::zip(&self.d, &other.d, |a, b| a.add(b)),
        }
    }
    fn sub(&self, other: &Self) -> Self {
        Jet {
            val: self.val.sub(&other.val),
            d: Jet::<T>::zip(&self.d, &other.d, |a, b| a.sub(b)),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let w = self.d.len().max(other.d.len());
        let zero = T::zero();
        let d = (0..w)
            .map(|i| {
                let da = self.d.get(i).unwrap_or(&zero);
                let db = other.d.get(i).unwrap_or(&zero);
                da.mul(&other.val).add(&self.val.mul(db))
            })
            .collect();
        Jet {
            val: self.val.mul(&other.val),
            d,
        }
    }
    fn neg(&self) -> Self {
        Jet {
            val: self.val.neg(),
            d: self.d.iter().map(|p| p.neg()).collect(),
        }
    }
    fn conj(&self) -> Self {
        // Coordinates are real, so conjugation commutes with differentiation.
        Jet {
            val: self.val.conj(),
            d: self.d.iter().map(|p| p.conj()).collect(),
        }
    }
    fn from_i64(v: i64) -> Self {
        Jet::constant(T::from_i64(v))
    }
    fn half() -> Self {
        Jet::constant(T::half())
    }
    fn supports_conj() -> bool {
        T::supports_conj()
    }
}

impl<T: AdScalar> AdScalar for Jet<T> {
    fn from_c(v: Complex64) -> Self {
        Jet::constant(T::from_c(v))
    }
    fn value_c(&self) -> Complex64 {
        self.val.value_c()
    }
    fn sin(&self) -> Self {
        let c = self.val.cos();
        Jet {
            val: self.val.sin(),
            d: self.d.iter().map(|p| p.mul(&c)).collect(),
        }
    }
    fn cos(&self) -> Self {
        let ms = self.val.sin().neg();
        Jet {
            val: self.val.cos(),
            d: self.d.iter().map(|p| p.mul(&ms)).collect(),
        }
    }
    fn exp(&self) -> Self {
        let e = self.val.exp();
        Jet {
            val: e.clone(),
            d: self.d.iter().map(|p| p.mul(&e)).collect(),
        }
    }
    fn inv(&self) -> Self {
        let iv = self.val.inv();
        let m = iv.mul(&iv).neg();
        Jet {
            val: iv,
            d: self.d.iter().map(|p| p.mul(&m)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type J = Jet<Complex64>;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn jet_product_rule() {
        let x = J::variable(c(2.0), 0, 2);
        let y = J::variable(c(3.0), 1, 2);
        let f = x.mul(&y).add(&x.sin());
        assert!((f.val - (c(6.0) + c(2.0).sin())).norm() < 1e-15);
        assert!((f.partial(0) - (c(3.0) + c(2.0).cos())).norm() < 1e-15);
        assert!((f.partial(1) - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_broadcast_against_seeded() {
        let k = J::from_c(c(5.0));
        let x = J::variable(c(1.5), 0, 1);
        let f = k.mul(&x);
        assert_eq!(f.partial(0), c(5.0));
        assert_eq!(k.width(), 0);
    }

    #[test]
    fn nested_jets_give_second_derivatives() {
        // f(x) = sin(x); f''(x) = -sin(x) at x = 0.7.
        let x0 = 0.7;
        let inner = Jet::<Complex64>::variable(c(x0), 0, 1);
        let outer = Jet::<Jet<Complex64>>::variable(inner, 0, 1);
        let f = outer.sin();
        let d2 = f.partial(0).partial(0);
        assert!((d2 - (-c(x0).sin())).norm() < 1e-14);
    }

    #[test]
    fn inverse_derivative() {
        let x = J::variable(c(4.0), 0, 1);
        let f = x.inv();
        assert!((f.val - c(0.25)).norm() < 1e-15);
        assert!((f.partial(0) - c(-1.0 / 16.0)).norm() < 1e-15);
    }

    #[test]
    fn rational_magnitude_estimate() {
        let r = BigRational::new((-3).into(), 4.into());
        assert!((rational_abs_f64(&r) - 0.75).abs() < 1e-15);
    }
}
