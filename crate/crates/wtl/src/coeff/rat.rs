//! Exact rational coefficients backed by arbitrary-precision integers.

use super::Coeff;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// Exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_big(n: BigInt, d: BigInt) -> Self {
        Rat(BigRational::new(n, d))
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Coeff for Rat {
    fn zero() -> Self {
        Rat(BigRational::zero())
    }

    fn one() -> Self {
        Rat(BigRational::one())
    }

    fn from_int(n: i64) -> Self {
        Rat(BigRational::from(BigInt::from(n)))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::new(n, d)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        Rat(&self.0 + &rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Rat(&self.0 - &rhs.0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Rat(&self.0 * &rhs.0)
    }

    fn neg(&self) -> Self {
        Rat(-&self.0)
    }

    fn inv(&self) -> Result<Self> {
        if self.0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(self.0.recip()))
    }

    fn nth_root(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("0th root".into()));
        }
        if n == 1 || self.0.is_zero() {
            return Ok(self.clone());
        }
        if self.0.is_negative() && n % 2 == 0 {
            return Err(Error::RootUnavailable {
                degree: n,
                value: self.repr(),
            });
        }
        let rn = self.0.numer().nth_root(n);
        let rd = self.0.denom().nth_root(n);
        if &rn.clone().pow(n) == self.0.numer() && &rd.clone().pow(n) == self.0.denom() {
            Ok(Rat(BigRational::new(rn, rd)))
        } else {
            Err(Error::RootUnavailable {
                degree: n,
                value: self.repr(),
            })
        }
    }

    fn mag(&self) -> f64 {
        match self.0.to_f64() {
            Some(x) if x.is_finite() => x.abs(),
            _ => {
                let nb = self.0.numer().bits() as f64;
                let db = self.0.denom().bits() as f64;
                (nb - db).exp2()
            }
        }
    }

    fn parse(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

fn bad(s: &str) -> Error {
    Error::Parse(format!("not a rational number: {s:?}"))
}

/// Accepts integers ("-12"), fractions ("3/4"), and decimal notation
/// ("1.25", "2.5e-3"), all parsed exactly.
pub(crate) fn parse_rational(s: &str) -> Result<Rat> {
    let t = s.trim();
    if t.is_empty() {
        return Err(bad(s));
    }
    if let Some((a, b)) = t.split_once('/') {
        let n = BigInt::from_str(a.trim()).map_err(|_| bad(s))?;
        let d = BigInt::from_str(b.trim()).map_err(|_| bad(s))?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(Rat(BigRational::new(n, d)));
    }
    if let Ok(n) = BigInt::from_str(t) {
        return Ok(Rat(BigRational::from(n)));
    }
    // Decimal: [sign] digits [. digits] [e[sign]digits]
    let (mant, exp10) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad(s))?),
        None => (t, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if frac_part.is_empty() && int_part.is_empty() {
        return Err(bad(s));
    }
    let digits = format!("{int_part}{frac_part}");
    let n = BigInt::from_str(&digits).map_err(|_| bad(s))?;
    let scale = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from(n * ten.pow(scale as u32))
    } else {
        BigRational::new(n, ten.pow((-scale) as u32))
    };
    Ok(Rat(r))
}
