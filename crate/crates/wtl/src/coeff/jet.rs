//! First-order jets: a value together with tagged infinitesimal parts.
//!
//! A jet `v + Σ_t d_t ε_t` carries one derivative slot per tag `t`, with
//! `ε_t ε_s = 0` for all tags. Arithmetic propagates the parts by the
//! product, quotient, and chain rules, which turns any coefficient-level
//! computation into a directional-derivative computation for free.

use super::Coeff;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// First-order jet over a base coefficient field.
#[derive(Clone, Debug)]
pub struct Jet<F: Coeff> {
    /// Scalar value.
    pub val: F,
    /// Derivative parts keyed by tag; missing tags are zero.
    pub parts: BTreeMap<u32, F>,
}

impl<F: Coeff> Jet<F> {
    /// Jet with no infinitesimal parts.
    pub fn constant(val: F) -> Self {
        Jet {
            val,
            parts: BTreeMap::new(),
        }
    }

    /// Jet `val + ε_tag`.
    pub fn var(val: F, tag: u32) -> Self {
        let mut parts = BTreeMap::new();
        parts.insert(tag, F::one());
        Jet { val, parts }
    }

    /// The derivative part for `tag` (zero if absent).
    pub fn part(&self, tag: u32) -> F {
        self.parts.get(&tag).cloned().unwrap_or_else(F::zero)
    }

    /// A jet with one explicit derivative part (dropped when zero).
    pub fn with_part(val: F, tag: u32, part: F) -> Self {
        let mut parts = BTreeMap::new();
        if !part.is_zero() {
            parts.insert(tag, part);
        }
        Jet { val, parts }
    }

    fn binary(&self, rhs: &Self, v: F, df: impl Fn(&F, &F) -> F) -> Self {
        let mut parts = BTreeMap::new();
        let zero = F::zero();
        for tag in self.parts.keys().chain(rhs.parts.keys()) {
            if parts.contains_key(tag) {
                continue;
            }
            let a = self.parts.get(tag).unwrap_or(&zero);
            let b = rhs.parts.get(tag).unwrap_or(&zero);
            parts.insert(*tag, df(a, b));
        }
        Jet { val: v, parts }
    }

    fn map_parts(&self, v: F, df: impl Fn(&F) -> F) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|(t, a)| (*t, df(a)))
            .collect::<BTreeMap<_, _>>();
        Jet { val: v, parts }
    }
}

impl<F: Coeff> PartialEq for Jet<F> {
    fn eq(&self, other: &Self) -> bool {
        if self.val != other.val {
            return false;
        }
        let zero = F::zero();
        for tag in self.parts.keys().chain(other.parts.keys()) {
            let a = self.parts.get(tag).unwrap_or(&zero);
            let b = other.parts.get(tag).unwrap_or(&zero);
            if a != b {
                return false;
            }
        }
        true
    }
}

impl<F: Coeff> fmt::Display for Jet<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.val)?;
        for (t, a) in &self.parts {
            if !a.is_zero() {
                write!(f, " + ({a})e{t}")?;
            }
        }
        Ok(())
    }
}

impl<F: Coeff> Coeff for Jet<F> {
    fn zero() -> Self {
        Self::constant(F::zero())
    }

    fn one() -> Self {
        Self::constant(F::one())
    }

    fn from_int(n: i64) -> Self {
        Self::constant(F::from_int(n))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::constant(F::from_ratio(n, d))
    }

    fn is_zero(&self) -> bool {
        self.val.is_zero() && self.parts.values().all(|a| a.is_zero())
    }

    fn add(&self, rhs: &Self) -> Self {
        self.binary(rhs, self.val.add(&rhs.val), |a, b| a.add(b))
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.binary(rhs, self.val.sub(&rhs.val), |a, b| a.sub(b))
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.binary(rhs, self.val.mul(&rhs.val), |a, b| {
            a.mul(&rhs.val).add(&self.val.mul(b))
        })
    }

    fn neg(&self) -> Self {
        self.map_parts(self.val.neg(), |a| a.neg())
    }

    fn inv(&self) -> Result<Self> {
        let iv = self.val.inv()?;
        let m = iv.mul(&iv).neg();
        Ok(self.map_parts(iv, |a| a.mul(&m)))
    }

    fn nth_root(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("0th root".into()));
        }
        let r = self.val.nth_root(n)?;
        if self.val.is_zero() {
            if self.parts.values().all(|a| a.is_zero()) {
                return Ok(Self::zero());
            }
            return Err(Error::RootUnavailable {
                degree: n,
                value: format!("{self}"),
            });
        }
        // d(v^{1/n}) = dv * r / (n v)
        let scale = r.div(&F::from_int(n as i64).mul(&self.val))?;
        Ok(self.map_parts(r, |a| a.mul(&scale)))
    }

    fn mag(&self) -> f64 {
        self.val.mag()
    }

    fn parse(_s: &str) -> Result<Self> {
        Err(Error::Parse("jets have no literal syntax".into()))
    }
}
