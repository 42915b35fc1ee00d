//! Rational functions on the sphere in partial-fraction form.
//!
//! A [`GlobalRational`] is a polynomial plus finitely many principal parts
//! at distinct finite poles — the exact, global counterpart of a local
//! series. It supports the linear operations, exact expansion at any
//! center, differentiation, evaluation and residues; products are left to
//! the series layer, where truncation windows account for them honestly.

use crate::coeff::Coeff;
use crate::series::{Center, LaurentSeries};
use crate::{Error, Result};
use std::fmt;

/// `poly(z) + Σ_k Σ_j parts[k].1[j−1] · (z − parts[k].0)^{−j}`.
///
/// `poly` is ascending in `z`; each part stores its pole location and the
/// principal-part coefficients `[c_{-1}, c_{-2}, …]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalRational<F> {
    pub poly: Vec<F>,
    pub parts: Vec<(F, Vec<F>)>,
}

impl<F: Coeff> GlobalRational<F> {
    pub fn new(poly: Vec<F>, parts: Vec<(F, Vec<F>)>) -> Self {
        let mut out = GlobalRational {
            poly,
            parts: Vec::new(),
        };
        for (loc, cs) in parts {
            out.merge_part(loc, cs);
        }
        out.normalize();
        out
    }

    pub fn zero() -> Self {
        GlobalRational {
            poly: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn from_poly(poly: Vec<F>) -> Self {
        Self::new(poly, Vec::new())
    }

    pub fn from_part(loc: F, coeffs: Vec<F>) -> Self {
        Self::new(Vec::new(), vec![(loc, coeffs)])
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty() && self.parts.is_empty()
    }

    fn merge_part(&mut self, loc: F, cs: Vec<F>) {
        if let Some((_, have)) = self.parts.iter_mut().find(|(p, _)| *p == loc) {
            if have.len() < cs.len() {
                have.resize(cs.len(), F::zero());
            }
            for (j, c) in cs.into_iter().enumerate() {
                have[j] = have[j].add(&c);
            }
        } else {
            self.parts.push((loc, cs));
        }
    }

    fn normalize(&mut self) {
        while self.poly.last().is_some_and(|c| c.is_zero()) {
            self.poly.pop();
        }
        for (_, cs) in &mut self.parts {
            while cs.last().is_some_and(|c| c.is_zero()) {
                cs.pop();
            }
        }
        self.parts.retain(|(_, cs)| !cs.is_empty());
    }

    /// Extracts the polynomial part of a series at infinity (the terms with
    /// nonnegative natural exponent). The window must cover them all.
    pub fn polynomial_part(s: &LaurentSeries<F>) -> Result<Self> {
        if !matches!(s.center(), Center::Infinity) {
            return Err(Error::Invalid(
                "polynomial part is read off at infinity".into(),
            ));
        }
        if s.denom() != 1 {
            return Err(Error::Puiseux("polynomial part of fractional exponents".into()));
        }
        let mut poly = Vec::new();
        let deg = -s.low();
        for k in 0..=deg.max(-1) {
            poly.push(s.coeff_int(-k)?);
        }
        Ok(Self::new(poly, Vec::new()))
    }

    /// Extracts the principal part of a series at its own finite center.
    /// The window must cover all negative exponents.
    pub fn principal_part_at(s: &LaurentSeries<F>) -> Result<Self> {
        let loc = match s.center() {
            Center::Finite(p) => p.clone(),
            Center::Infinity => {
                return Err(Error::Invalid(
                    "principal parts are read off at finite centers".into(),
                ))
            }
        };
        if s.denom() != 1 {
            return Err(Error::Puiseux("principal part of fractional exponents".into()));
        }
        let mut cs = Vec::new();
        for j in 1..=(-s.low()).max(0) {
            cs.push(s.coeff_int(-j)?);
        }
        Ok(Self::new(Vec::new(), vec![(loc, cs)]))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut poly = self.poly.clone();
        if poly.len() < rhs.poly.len() {
            poly.resize(rhs.poly.len(), F::zero());
        }
        for (k, c) in rhs.poly.iter().enumerate() {
            poly[k] = poly[k].add(c);
        }
        let mut out = GlobalRational {
            poly,
            parts: self.parts.clone(),
        };
        for (loc, cs) in &rhs.parts {
            out.merge_part(loc.clone(), cs.clone());
        }
        out.normalize();
        out
    }

    pub fn neg(&self) -> Self {
        GlobalRational {
            poly: self.poly.iter().map(|c| c.neg()).collect(),
            parts: self
                .parts
                .iter()
                .map(|(p, cs)| (p.clone(), cs.iter().map(|c| c.neg()).collect()))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = GlobalRational {
            poly: self.poly.iter().map(|x| x.mul(c)).collect(),
            parts: self
                .parts
                .iter()
                .map(|(p, cs)| (p.clone(), cs.iter().map(|x| x.mul(c)).collect()))
                .collect(),
        };
        out.normalize();
        out
    }

    /// Derivative with respect to `z`.
    pub fn derive(&self) -> Self {
        let mut poly = Vec::new();
        for (k, c) in self.poly.iter().enumerate().skip(1) {
            poly.push(c.mul(&F::from_int(k as i64)));
        }
        let parts = self
            .parts
            .iter()
            .map(|(p, cs)| {
                let mut out = vec![F::zero()];
                for (i, c) in cs.iter().enumerate() {
                    // c (z−p)^{−(i+1)} ↦ −(i+1) c (z−p)^{−(i+2)}
                    out.push(c.mul(&F::from_int(-(i as i64 + 1))));
                }
                (p.clone(), out)
            })
            .collect();
        Self::new(poly, parts)
    }

    /// The pullback under `z ↦ −z`.
    pub fn reflect(&self) -> Self {
        let mut poly = Vec::new();
        for (k, c) in self.poly.iter().enumerate() {
            poly.push(if k % 2 == 1 { c.neg() } else { c.clone() });
        }
        let parts = self
            .parts
            .iter()
            .map(|(p, cs)| {
                let flipped = cs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 0 { c.neg() } else { c.clone() })
                    .collect();
                (p.neg(), flipped)
            })
            .collect();
        Self::new(poly, parts)
    }

    /// Evaluates at a finite point (which must not be a pole).
    pub fn eval_at(&self, x: &F) -> Result<F> {
        let mut acc = F::zero();
        for c in self.poly.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        for (p, cs) in &self.parts {
            let diff = x.sub(p);
            let inv = diff.inv()?;
            let mut pw = F::one();
            for c in cs {
                pw = pw.mul(&inv);
                acc = acc.add(&c.mul(&pw));
            }
        }
        Ok(acc)
    }

    /// Residue at a center; exact in all cases. At infinity this is
    /// `−[z^{-1}]`, so that residues over all centers sum to zero.
    pub fn residue_at(&self, center: &Center<F>) -> F {
        match center {
            Center::Finite(x) => self
                .parts
                .iter()
                .find(|(p, _)| p == x)
                .map(|(_, cs)| cs[0].clone())
                .unwrap_or_else(F::zero),
            Center::Infinity => {
                let mut acc = F::zero();
                for (_, cs) in &self.parts {
                    acc = acc.sub(&cs[0]);
                }
                acc
            }
        }
    }

    /// Sum of residues over every pole and infinity, composed from
    /// individual [`GlobalRational::residue_at`] calls (identically zero for
    /// honest data — kept as a checkable identity, not an assumption).
    pub fn residue_sum(&self) -> F {
        let mut acc = self.residue_at(&Center::Infinity);
        for (p, _) in &self.parts {
            acc = acc.add(&self.residue_at(&Center::Finite(p.clone())));
        }
        acc
    }

    /// Expands at a center. `known` has the same meaning as in
    /// [`LaurentSeries::from_terms`]: at a finite center all natural
    /// exponents `< known` are produced, at infinity all `> known`. At one
    /// of its own poles the principal part is reproduced verbatim and the
    /// regular remainder is expanded.
    pub fn expand_at(&self, center: &Center<F>, known: i64) -> Result<LaurentSeries<F>> {
        match center {
            Center::Infinity => self.expand_at_infinity(-known),
            Center::Finite(c) => self.expand_at_finite(c, known),
        }
    }

    fn expand_at_infinity(&self, target: i64) -> Result<LaurentSeries<F>> {
        let center = Center::<F>::Infinity;
        let mut acc = LaurentSeries::zero_window(center.clone(), 1, target);
        // polynomial: z^k at internal exponent −k
        if !self.poly.is_empty() {
            let low = -(self.poly.len() as i64 - 1);
            if target > low {
                let mut coeffs = vec![F::zero(); (target - low) as usize];
                for (k, c) in self.poly.iter().enumerate() {
                    let e = -(k as i64);
                    if e < target {
                        coeffs[(e - low) as usize] = c.clone();
                    }
                }
                acc = acc.add(&LaurentSeries::from_parts(center.clone(), 1, low, coeffs))?;
            }
        }
        // each pole: 1/(z−p) = Σ_{k≥1} p^{k−1} z^{−k}
        for (p, cs) in &self.parts {
            let depth = (target - 1).max(0) as usize;
            let mut base = Vec::with_capacity(depth);
            let mut pw = F::one();
            for _ in 0..depth {
                base.push(pw.clone());
                pw = pw.mul(p);
            }
            let base = LaurentSeries::from_parts(center.clone(), 1, 1, base);
            let mut power = base.clone();
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    power = power.mul(&base)?;
                }
                if !c.is_zero() {
                    acc = acc.add(&power.scale(c))?;
                }
            }
        }
        Ok(acc.truncate_to(target))
    }

    fn expand_at_finite(&self, c: &F, target: i64) -> Result<LaurentSeries<F>> {
        let center = Center::Finite(c.clone());
        let mut acc = LaurentSeries::zero_window(center.clone(), 1, target);
        // polynomial in w = z − c via repeated multiplication by (w + c)
        if !self.poly.is_empty() {
            let len = target.max(1) as usize;
            let mut zc = vec![F::zero(); len.max(2)];
            zc[0] = c.clone();
            zc[1] = F::one();
            let z_series = LaurentSeries::from_parts(center.clone(), 1, 0, zc);
            let mut ones = vec![F::zero(); len];
            ones[0] = F::one();
            let mut power = LaurentSeries::from_parts(center.clone(), 1, 0, ones);
            for (k, pk) in self.poly.iter().enumerate() {
                if k > 0 {
                    power = power.mul(&z_series)?;
                }
                if !pk.is_zero() {
                    acc = acc.add(&power.scale(pk))?;
                }
            }
        }
        for (p, cs) in &self.parts {
            let u = c.sub(p);
            if u.is_zero() {
                // own pole: principal part is exact
                let j_max = cs.len() as i64;
                let mut coeffs = vec![F::zero(); (target + j_max).max(0) as usize];
                for (i, x) in cs.iter().enumerate() {
                    let e = -(i as i64 + 1);
                    if e < target {
                        coeffs[(e + j_max) as usize] = x.clone();
                    }
                }
                acc = acc.add(&LaurentSeries::from_parts(
                    center.clone(),
                    1,
                    -j_max,
                    coeffs,
                ))?;
                continue;
            }
            // 1/(z−p) = 1/(w+u) = Σ_k (−1)^k u^{−k−1} w^k
            let ui = u.inv()?;
            let len = target.max(0) as usize;
            let mut base = Vec::with_capacity(len);
            let mut pw = ui.clone();
            for k in 0..len {
                base.push(if k % 2 == 0 { pw.clone() } else { pw.neg() });
                pw = pw.mul(&ui);
            }
            let base = LaurentSeries::from_parts(center.clone(), 1, 0, base);
            let mut power = base.clone();
            for (i, x) in cs.iter().enumerate() {
                if i > 0 {
                    power = power.mul(&base)?;
                }
                if !x.is_zero() {
                    acc = acc.add(&power.scale(x))?;
                }
            }
        }
        Ok(acc.truncate_to(target))
    }
}

impl<F: Coeff> fmt::Display for GlobalRational<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            if k == 0 {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})z^{k}")?;
            }
            wrote = true;
        }
        for (p, cs) in &self.parts {
            for (i, c) in cs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if wrote {
                    write!(f, " + ")?;
                }
                write!(f, "({c})(z - {p})^-{}", i + 1)?;
                wrote = true;
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn principal_and_polynomial_extraction() {
        // (z−φ)^{-2} + 3 + (z−φ) at φ = 5: principal part {5: [0, 1]}
        let s = LaurentSeries::from_terms(
            Center::Finite(r(5)),
            &[(-2, r(1)), (0, r(3)), (1, r(1))],
            4,
        );
        let p = GlobalRational::principal_part_at(&s).unwrap();
        assert_eq!(p.poly, vec![]);
        assert_eq!(p.parts, vec![(r(5), vec![r(0), r(1)])]);

        // polynomial part of z + 6/(2z) style data: (z² + 6)^{1/2} ↦ z
        let f = LaurentSeries::from_terms(Center::Infinity, &[(2, r(1)), (0, r(6))], -7);
        let root = f.pow_ratio(1, 2, None).unwrap();
        let q = GlobalRational::polynomial_part(&root).unwrap();
        assert_eq!(q.poly, vec![r(0), r(1)]);
        assert!(q.parts.is_empty());
    }

    #[test]
    fn expansion_at_infinity_and_elsewhere() {
        // 1/(z−1): at ∞ → z^{-1} + z^{-2} + …; at 0 → −1 − z − z² − …
        let g = GlobalRational::from_part(r(1), vec![r(1)]);
        let at_inf = g.expand_at(&Center::Infinity, -5).unwrap();
        for k in 1..5 {
            assert_eq!(at_inf.coeff_nat(-k).unwrap(), r(1));
        }
        assert_eq!(at_inf.coeff_nat(0).unwrap(), r(0));
        let at_zero = g.expand_at(&Center::Finite(r(0)), 4).unwrap();
        for k in 0..4 {
            assert_eq!(at_zero.coeff_nat(k).unwrap(), r(-1));
        }
        // (z−2)^{-1} at 3 → 1 − (z−3) + (z−3)² − …
        let h = GlobalRational::from_part(r(2), vec![r(1)]);
        let at_three = h.expand_at(&Center::Finite(r(3)), 3).unwrap();
        assert_eq!(at_three.coeff_nat(0).unwrap(), r(1));
        assert_eq!(at_three.coeff_nat(1).unwrap(), r(-1));
        assert_eq!(at_three.coeff_nat(2).unwrap(), r(1));
    }

    #[test]
    fn own_pole_expansion_is_verbatim() {
        // z² + 4/(z−1)² near 1: principal exact plus polynomial re-expansion
        let g = GlobalRational::new(
            vec![r(0), r(0), r(1)],
            vec![(r(1), vec![r(0), r(4)])],
        );
        let s = g.expand_at(&Center::Finite(r(1)), 3).unwrap();
        assert_eq!(s.coeff_nat(-2).unwrap(), r(4));
        assert_eq!(s.coeff_nat(-1).unwrap(), r(0));
        assert_eq!(s.coeff_nat(0).unwrap(), r(1)); // (w+1)²
        assert_eq!(s.coeff_nat(1).unwrap(), r(2));
        assert_eq!(s.coeff_nat(2).unwrap(), r(1));
    }

    #[test]
    fn residues_sum_to_zero() {
        // 1/(z(z−1)) = −1/z + 1/(z−1): residues −1, 1, and 0 at ∞
        let g = GlobalRational::new(
            Vec::new(),
            vec![(r(0), vec![r(-1)]), (r(1), vec![r(1)])],
        );
        assert_eq!(g.residue_at(&Center::Finite(r(0))), r(-1));
        assert_eq!(g.residue_at(&Center::Finite(r(1))), r(1));
        assert_eq!(g.residue_at(&Center::Infinity), r(0));
        assert_eq!(g.residue_sum(), r(0));
        // and the expansions agree with the exact residues
        let e0 = g.expand_at(&Center::Finite(r(0)), 1).unwrap();
        assert_eq!(e0.residue().unwrap(), r(-1));
        let einf = g.expand_at(&Center::Infinity, -3).unwrap();
        assert_eq!(einf.residue().unwrap(), r(0));
    }

    #[test]
    fn derivative_and_evaluation() {
        // d/dz [c/(z−p)] = −c/(z−p)², derivative of z³ = 3z²
        let g = GlobalRational::new(vec![r(0), r(0), r(0), r(1)], vec![(r(2), vec![r(5)])]);
        let d = g.derive();
        assert_eq!(d.poly, vec![r(0), r(0), r(3)]);
        assert_eq!(d.parts, vec![(r(2), vec![r(0), r(-5)])]);
        // value at z = 3: 27 + 5/1 = 32; derivative: 27 − 5 = 22
        assert_eq!(g.eval_at(&r(3)).unwrap(), r(32));
        assert_eq!(d.eval_at(&r(3)).unwrap(), r(22));
        assert!(g.eval_at(&r(2)).is_err());
    }

    #[test]
    fn reflection() {
        // f(z) = z + 1/(z−1) ↦ f(−z) = −z − 1/(z+1)
        let g = GlobalRational::new(vec![r(0), r(1)], vec![(r(1), vec![r(1)])]);
        let h = g.reflect();
        assert_eq!(h.poly, vec![r(0), r(-1)]);
        assert_eq!(h.parts, vec![(r(-1), vec![r(-1)])]);
        // (z−1)^{-2} picks up no sign: (−z−1)^{-2} = (z+1)^{-2}
        let g2 = GlobalRational::from_part(r(1), vec![r(0), r(1)]);
        assert_eq!(g2.reflect().parts, vec![(r(-1), vec![r(0), r(1)])]);
        for x in [3, 4, -5] {
            assert_eq!(
                g.eval_at(&r(-x)).unwrap(),
                g.reflect().eval_at(&r(x)).unwrap()
            );
        }
    }

    #[test]
    fn linear_ops_and_merging() {
        let g = GlobalRational::from_part(r(1), vec![r(2)]);
        let h = GlobalRational::new(vec![r(3)], vec![(r(1), vec![r(-2), r(1)])]);
        let s = g.add(&h);
        assert_eq!(s.poly, vec![r(3)]);
        assert_eq!(s.parts, vec![(r(1), vec![r(0), r(1)])]);
        let z = s.sub(&s);
        assert!(z.is_zero());
    }
}
