//! Arbitrary-precision binary floating point backed by `astro-float`.
//!
//! Precision is a process-wide setting expressed in decimal digits; all
//! operations round to the current precision with round-to-even.

use super::Coeff;
use crate::{Error, Result};
use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use std::cell::RefCell;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

static PRECISION_BITS: AtomicUsize = AtomicUsize::new(256);
static PRECISION_DIGITS: AtomicUsize = AtomicUsize::new(64);

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Current working precision in bits.
pub fn precision_bits() -> usize {
    PRECISION_BITS.load(Ordering::Relaxed)
}

/// Current working precision in decimal digits.
pub fn precision_digits() -> usize {
    PRECISION_DIGITS.load(Ordering::Relaxed)
}

/// Sets the working precision in decimal digits (minimum 1). The binary
/// precision is chosen with 32 guard bits, rounded up to a whole word.
pub fn set_precision_digits(digits: usize) {
    let digits = digits.max(1);
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32;
    let bits = (bits + 63) / 64 * 64;
    PRECISION_DIGITS.store(digits, Ordering::Relaxed);
    PRECISION_BITS.store(bits, Ordering::Relaxed);
}

/// Multiple-precision float.
#[derive(Clone, Debug)]
pub struct Mpf(pub BigFloat);

impl PartialEq for Mpf {
    fn eq(&self, other: &Self) -> bool {
        matches!(self.0.cmp(&other.0), Some(0))
    }
}

impl fmt::Display for Mpf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Mpf {
    pub fn from_f64(x: f64) -> Self {
        Mpf(BigFloat::from_f64(x, precision_bits()))
    }

    pub fn is_nan(&self) -> bool {
        self.0.is_nan()
    }

    /// Signed `f64` approximation (saturating on overflow).
    pub fn to_f64(&self) -> f64 {
        let m = self.mag();
        if self.0.is_negative() {
            -m
        } else {
            m
        }
    }
}

impl Coeff for Mpf {
    fn zero() -> Self {
        Mpf(BigFloat::new(precision_bits()))
    }

    fn one() -> Self {
        Self::from_int(1)
    }

    fn from_int(n: i64) -> Self {
        Mpf(BigFloat::from_i64(n, precision_bits()))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        let p = precision_bits();
        Mpf(BigFloat::from_i64(n, p).div(&BigFloat::from_i64(d, p), p, RM))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        Mpf(self.0.add(&rhs.0, precision_bits(), RM))
    }

    fn sub(&self, rhs: &Self) -> Self {
        Mpf(self.0.sub(&rhs.0, precision_bits(), RM))
    }

    fn mul(&self, rhs: &Self) -> Self {
        Mpf(self.0.mul(&rhs.0, precision_bits(), RM))
    }

    fn neg(&self) -> Self {
        Mpf(self.0.neg())
    }

    fn inv(&self) -> Result<Self> {
        if self.0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Mpf(self.0.reciprocal(precision_bits(), RM)))
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Mpf(self.0.div(&rhs.0, precision_bits(), RM)))
    }

    fn nth_root(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("0th root".into()));
        }
        if n == 1 || self.0.is_zero() {
            return Ok(self.clone());
        }
        let p = precision_bits();
        let negative = self.0.is_negative();
        if negative && n % 2 == 0 {
            return Err(Error::RootUnavailable {
                degree: n,
                value: self.repr(),
            });
        }
        let abs = if negative { self.0.neg() } else { self.0.clone() };
        let root = match n {
            2 => abs.sqrt(p, RM),
            3 => abs.cbrt(p, RM),
            _ => CONSTS.with(|c| {
                let cc = &mut *c.borrow_mut();
                let exp = BigFloat::from_i64(1, p).div(&BigFloat::from_i64(n as i64, p), p, RM);
                abs.pow(&exp, p, RM, cc)
            }),
        };
        if root.is_nan() {
            return Err(Error::RootUnavailable {
                degree: n,
                value: self.repr(),
            });
        }
        Ok(Mpf(if negative { root.neg() } else { root }))
    }

    fn mag(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() || self.0.is_inf() {
            return f64::INFINITY;
        }
        // Value is m * 2^e with |m| in [1/2, 1); use the midpoint estimate
        // refined by the top mantissa bits when available.
        match self.0.exponent() {
            Some(e) => {
                let m = self
                    .0
                    .mantissa_digits()
                    .and_then(|d| d.last().copied())
                    .map(|w| w as f64 / (u64::MAX as f64 + 1.0))
                    .unwrap_or(0.75);
                m * (e as f64).exp2()
            }
            None => f64::INFINITY,
        }
    }

    fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        if let Some((a, b)) = t.split_once('/') {
            let n = Self::parse(a)?;
            let d = Self::parse(b)?;
            return n.div(&d);
        }
        let p = precision_bits();
        let v = CONSTS.with(|c| BigFloat::parse(t, Radix::Dec, p, RM, &mut c.borrow_mut()));
        if v.is_nan() {
            return Err(Error::Parse(format!("not a number: {t:?}")));
        }
        Ok(Mpf(v))
    }
}
