//! Exact quadratic-extension coefficients `a + b√d` over the rationals.
//!
//! All values in one computation must live in a single extension field:
//! mixing two different nonzero radicands panics. The radicand `d = 0`
//! acts as a wildcard carried by purely rational values.

use super::{Coeff, Rat};
use crate::{Error, Result};
use num_traits::ToPrimitive;
use std::fmt;

/// Element `a + b√d` of a real quadratic field.
#[derive(Clone, Debug)]
pub struct Quad {
    pub a: Rat,
    pub b: Rat,
    /// Radicand; `0` means "no radical in play" and unifies with anything.
    pub d: i64,
}

impl Quad {
    pub fn new(a: Rat, b: Rat, d: i64) -> Self {
        assert!(!(d == 0 && !b.is_zero()), "radical part with zero radicand");
        Quad { a, b, d }
    }

    /// Purely rational element tagged with the ambient radicand.
    pub fn rational(a: Rat, d: i64) -> Self {
        Quad {
            a,
            b: Rat::zero(),
            d,
        }
    }

    /// `√d` itself.
    pub fn root(d: i64) -> Self {
        assert!(d != 0, "radicand must be nonzero");
        Quad {
            a: Rat::zero(),
            b: Rat::one(),
            d,
        }
    }

    fn unify(&self, rhs: &Self) -> i64 {
        match (self.d, rhs.d) {
            (0, d) | (d, 0) => d,
            (x, y) if x == y => x,
            (x, y) => panic!("mixed radicands: sqrt({x}) vs sqrt({y})"),
        }
    }

    fn rat_f64(r: &Rat) -> f64 {
        match r.0.to_f64() {
            Some(x) if x.is_finite() => x,
            _ => {
                let m = r.mag();
                if r.is_negative() {
                    -m
                } else {
                    m
                }
            }
        }
    }
}

impl PartialEq for Quad {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
            && self.b == other.b
            && (self.b.is_zero() || self.d == 0 || other.d == 0 || self.d == other.d)
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "({})*sqrt({})", self.b, self.d)
        } else {
            write!(f, "{} + ({})*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl Coeff for Quad {
    fn zero() -> Self {
        Self::rational(Rat::zero(), 0)
    }

    fn one() -> Self {
        Self::rational(Rat::one(), 0)
    }

    fn from_int(n: i64) -> Self {
        Self::rational(Rat::from_int(n), 0)
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::rational(Rat::new(n, d), 0)
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        let d = self.unify(rhs);
        Quad {
            a: self.a.add(&rhs.a),
            b: self.b.add(&rhs.b),
            d,
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        let d = self.unify(rhs);
        Quad {
            a: self.a.sub(&rhs.a),
            b: self.b.sub(&rhs.b),
            d,
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let d = self.unify(rhs);
        let dd = Rat::from_int(d);
        Quad {
            a: self.a.mul(&rhs.a).add(&self.b.mul(&rhs.b).mul(&dd)),
            b: self.a.mul(&rhs.b).add(&self.b.mul(&rhs.a)),
            d,
        }
    }

    fn neg(&self) -> Self {
        Quad {
            a: self.a.neg(),
            b: self.b.neg(),
            d: self.d,
        }
    }

    fn inv(&self) -> Result<Self> {
        // (a + b√d)^{-1} = (a - b√d)/(a² - b²d)
        let dd = Rat::from_int(self.d);
        let norm = self.a.mul(&self.a).sub(&self.b.mul(&self.b).mul(&dd));
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let ni = norm.inv()?;
        Ok(Quad {
            a: self.a.mul(&ni),
            b: self.b.mul(&ni).neg(),
            d: self.d,
        })
    }

    fn nth_root(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("0th root".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        if !self.b.is_zero() {
            return Err(Error::RootUnavailable {
                degree: n,
                value: format!("{self}"),
            });
        }
        if let Ok(r) = self.a.nth_root(n) {
            return Ok(Self::rational(r, self.d));
        }
        // √(q²·d) = q·√d when the ambient radicand divides cleanly.
        if n == 2 && self.d != 0 {
            let q2 = self.a.div(&Rat::from_int(self.d))?;
            if let Ok(q) = q2.nth_root(2) {
                return Ok(Quad {
                    a: Rat::zero(),
                    b: q,
                    d: self.d,
                });
            }
        }
        Err(Error::RootUnavailable {
            degree: n,
            value: format!("{self}"),
        })
    }

    fn mag(&self) -> f64 {
        let af = Self::rat_f64(&self.a);
        let bf = Self::rat_f64(&self.b);
        if self.d >= 0 {
            (af + bf * (self.d as f64).sqrt()).abs()
        } else {
            af.hypot(bf * (-self.d as f64).sqrt())
        }
    }

    fn parse(s: &str) -> Result<Self> {
        // Rational literals only; radical values are built programmatically.
        Ok(Self::rational(Rat::parse(s)?, 0))
    }
}
