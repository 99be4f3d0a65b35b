//! Forward-mode second-order jets.
//!
//! A [`Jet2`] carries a value together with first and second derivatives with
//! respect to a single scalar parameter, and every arithmetic operation
//! propagates them by the truncated Taylor rules, e.g.
//!
//! ```text
//! (f*g).d1 = f.d1*g.val + f.val*g.d1
//! (f*g).d2 = f.d2*g.val + 2*f.d1*g.d1 + f.val*g.d2
//! ```
//!
//! The component type is generic over [`JetNum`], so jets nest: a
//! `Jet2<Jet2<f64>>` evaluated on the seed returned by [`nested_seed`]
//! exposes derivatives up to third order of a univariate function written
//! once in generic arithmetic. That is how the scalar pipeline obtains
//! phi''' without a dedicated third-order type.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar types jets can be built from: `f64` and jets themselves.
pub trait JetNum:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    /// Real power with a constant exponent.
    fn powf(self, p: f64) -> Self;
}

impl JetNum for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
}

/// Value, first and second derivative with respect to one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2<T = f64> {
    pub val: T,
    pub d1: T,
    pub d2: T,
}

impl<T: JetNum> Jet2<T> {
    pub fn new(val: T, d1: T, d2: T) -> Self {
        Self { val, d1, d2 }
    }

    /// Seed for the differentiation variable itself.
    pub fn variable(x: T) -> Self {
        Self {
            val: x,
            d1: T::one(),
            d2: T::zero(),
        }
    }

    pub fn constant(x: T) -> Self {
        Self {
            val: x,
            d1: T::zero(),
            d2: T::zero(),
        }
    }
}

impl<T: JetNum> Add for Jet2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            val: self.val + rhs.val,
            d1: self.d1 + rhs.d1,
            d2: self.d2 + rhs.d2,
        }
    }
}

impl<T: JetNum> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            val: self.val - rhs.val,
            d1: self.d1 - rhs.d1,
            d2: self.d2 - rhs.d2,
        }
    }
}

impl<T: JetNum> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            val: -self.val,
            d1: -self.d1,
            d2: -self.d2,
        }
    }
}

impl<T: JetNum> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            val: self.val * rhs.val,
            d1: self.d1 * rhs.val + self.val * rhs.d1,
            d2: self.d2 * rhs.val + T::from_f64(2.0) * self.d1 * rhs.d1 + self.val * rhs.d2,
        }
    }
}

impl<T: JetNum> Div for Jet2<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        // q = f/g propagated by solving f = q g order by order.
        let q = self.val / rhs.val;
        let q1 = (self.d1 - q * rhs.d1) / rhs.val;
        let q2 = (self.d2 - T::from_f64(2.0) * q1 * rhs.d1 - q * rhs.d2) / rhs.val;
        Self {
            val: q,
            d1: q1,
            d2: q2,
        }
    }
}

impl<T: JetNum> JetNum for Jet2<T> {
    fn from_f64(x: f64) -> Self {
        Self::constant(T::from_f64(x))
    }

    fn powf(self, p: f64) -> Self {
        let u = self.val;
        let f = u.powf(p);
        let fp = T::from_f64(p) * u.powf(p - 1.0);
        let fpp = T::from_f64(p * (p - 1.0)) * u.powf(p - 2.0);
        Self {
            val: f,
            d1: fp * self.d1,
            d2: fpp * self.d1 * self.d1 + fp * self.d2,
        }
    }
}

/// Seed whose evaluation under a generic univariate function yields value and
/// first three derivatives; see [`extract_jet3`].
pub fn nested_seed(s: f64) -> Jet2<Jet2<f64>> {
    Jet2 {
        val: Jet2::variable(s),
        d1: Jet2::constant(1.0),
        d2: Jet2::constant(0.0),
    }
}

/// Reads `[f, f', f'', f''']` off the result of evaluating a function at
/// [`nested_seed`]. The inner jet of the outer `d1` slot carries the jet of
/// f', whose own second derivative is f'''.
pub fn extract_jet3(r: Jet2<Jet2<f64>>) -> [f64; 4] {
    [r.val.val, r.val.d1, r.val.d2, r.d1.d2]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(x: f64) -> Jet2 {
        Jet2::variable(x)
    }

    #[test]
    fn product_rule() {
        // f(x) = x^2 * (x + 3) at x = 2: f = 20, f' = 3x^2 + 6x = 24, f'' = 6x + 6 = 18
        let x = var(2.0);
        let f = x * x * (x + Jet2::from_f64(3.0));
        assert_eq!(f.val, 20.0);
        assert_eq!(f.d1, 24.0);
        assert_eq!(f.d2, 18.0);
    }

    #[test]
    fn quotient_rule() {
        // f(x) = 1/(1+x) at x = 1: f = 1/2, f' = -1/4, f'' = 1/4
        let x = var(1.0);
        let f = Jet2::from_f64(1.0) / (Jet2::from_f64(1.0) + x);
        assert!((f.val - 0.5).abs() < 1e-15);
        assert!((f.d1 + 0.25).abs() < 1e-15);
        assert!((f.d2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn powf_matches_hand_derivatives() {
        // f(x) = x^(-2) at x = 0.5: (4, -16, 96)
        let f = var(0.5).powf(-2.0);
        assert_eq!(f.val, 4.0);
        assert_eq!(f.d1, -16.0);
        assert_eq!(f.d2, 96.0);
    }

    #[test]
    fn nested_jet_gives_third_derivative() {
        // f(x) = x^(-2): f''' = -24 x^(-5) = -768 at x = 0.5
        let r = nested_seed(0.5).powf(-2.0);
        let [f, f1, f2, f3] = extract_jet3(r);
        assert_eq!(f, 4.0);
        assert_eq!(f1, -16.0);
        assert_eq!(f2, 96.0);
        assert_eq!(f3, -768.0);
    }

    #[test]
    fn nested_division_third_derivative() {
        // f(x) = 1/(1+x): f''' = -6/(1+x)^4 = -6/16 at x = 1
        let x = nested_seed(1.0);
        let one = Jet2::<Jet2<f64>>::from_f64(1.0);
        let [f, f1, f2, f3] = extract_jet3(one / (one + x));
        assert!((f - 0.5).abs() < 1e-15);
        assert!((f1 + 0.25).abs() < 1e-15);
        assert!((f2 - 0.25).abs() < 1e-15);
        assert!((f3 + 6.0 / 16.0).abs() < 1e-15);
    }
}
