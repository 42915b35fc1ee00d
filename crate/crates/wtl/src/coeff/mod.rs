//! Coefficient fields: exact rationals, arbitrary-precision floats,
//! first-order jets, and quadratic extensions.

mod float;
mod jet;
mod quad;
mod rat;

pub use float::{precision_bits, precision_digits, set_precision_digits, Mpf};
pub use jet::Jet;
pub use quad::Quad;
pub use rat::Rat;

use crate::{Error, Result};
use std::fmt::{Debug, Display};

/// A field of coefficients for series arithmetic.
///
/// All engine computations are generic over an implementation of this trait.
/// Arithmetic methods take references and never mutate; failures (inverting
/// zero, roots that do not exist in the field) surface as errors rather than
/// panics.
pub trait Coeff: Clone + PartialEq + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    /// The field element n/d; `d` must be nonzero.
    fn from_ratio(n: i64, d: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;

    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// Integer power; negative exponents invert first.
    fn pow_int(&self, n: i64) -> Result<Self> {
        if n < 0 {
            let m = n
                .checked_neg()
                .ok_or_else(|| Error::Invalid("exponent overflow".into()))?;
            return self.inv()?.pow_int(m);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// An n-th root of `self` (principal where a choice exists); errors when
    /// no root is representable in the field.
    fn nth_root(&self, n: u32) -> Result<Self>;

    /// Crude magnitude estimate used for tolerances and report formatting.
    fn mag(&self) -> f64;

    /// Exact textual form; parseable by [`Coeff::parse`] where supported.
    fn repr(&self) -> String {
        format!("{self}")
    }

    fn parse(s: &str) -> Result<Self>;
}

/// n! as a field element.
pub fn factorial<F: Coeff>(n: u64) -> F {
    let mut acc = F::one();
    for k in 2..=n {
        acc = acc.mul(&F::from_int(k as i64));
    }
    acc
}

/// 1/n! as a field element.
pub fn inv_factorial<F: Coeff>(n: u64) -> F {
    factorial::<F>(n).inv().expect("factorial is nonzero")
}
