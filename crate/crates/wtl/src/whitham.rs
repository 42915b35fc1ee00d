//! Points of the genus-zero formal moduli space, their flat coordinates,
//! and the two-point correlators of the associated tau structure.
//!
//! A point carries one series `λ₀ = z + a₁ z⁻¹ + …` at infinity and, for
//! each finite puncture `φ_k`, a series `λ_k = â_{k,-1} (z−φ_k)⁻¹ + …` with
//! a simple pole. All quantities are formal: every series knows a finite
//! window, and a computation that outruns the data reports insufficient
//! truncation rather than inventing zeros.

use crate::coeff::{inv_factorial, Coeff, Jet};
use crate::ratfun::GlobalRational;
use crate::series::{Center, LaurentSeries};
use crate::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// A point of the formal moduli space with `m` finite punctures.
#[derive(Clone, Debug)]
pub struct WhithamPoint<F: Coeff> {
    lambda0: LaurentSeries<F>,
    lambda: Vec<LaurentSeries<F>>,
}

impl<F: Coeff> WhithamPoint<F> {
    /// Validates the defining shapes: `λ₀` monic at infinity with no
    /// constant term, each `λ_k` a simple pole at a finite center with
    /// nonzero leading coefficient, and all centers distinct.
    pub fn new(lambda0: LaurentSeries<F>, lambda: Vec<LaurentSeries<F>>) -> Result<Self> {
        if !matches!(lambda0.center(), Center::Infinity) || lambda0.denom() != 1 {
            return Err(Error::Invalid(
                "the series at infinity must be an integer-exponent expansion there".into(),
            ));
        }
        if lambda0.low() != -1 || lambda0.coeff_nat(1)? != F::one() {
            return Err(Error::Invalid(
                "the series at infinity must be monic in z".into(),
            ));
        }
        if !lambda0.coeff_nat(0)?.is_zero() {
            return Err(Error::Invalid(
                "the series at infinity must have no constant term".into(),
            ));
        }
        for s in &lambda {
            let Center::Finite(_) = s.center() else {
                return Err(Error::Invalid(
                    "puncture series must live at finite centers".into(),
                ));
            };
            if s.denom() != 1 || s.low() != -1 || s.coeff_nat(-1)?.is_zero() {
                return Err(Error::Invalid(
                    "each puncture series must have a simple pole with nonzero residue".into(),
                ));
            }
        }
        for i in 0..lambda.len() {
            for j in (i + 1)..lambda.len() {
                if lambda[i].center() == lambda[j].center() {
                    return Err(Error::Invalid("puncture locations must be distinct".into()));
                }
            }
        }
        Ok(Self { lambda0, lambda })
    }

    /// Number of finite punctures.
    pub fn m(&self) -> usize {
        self.lambda.len()
    }

    /// The series at infinity.
    pub fn lambda0(&self) -> &LaurentSeries<F> {
        &self.lambda0
    }

    /// The series at the `k`-th puncture, `k = 1..=m`.
    pub fn lambda_at(&self, k: usize) -> Result<&LaurentSeries<F>> {
        self.lambda
            .get(k - 1)
            .ok_or_else(|| Error::Invalid(format!("puncture index {k} out of range")))
    }

    /// Location of the `k`-th puncture.
    pub fn phi(&self, k: usize) -> Result<&F> {
        match self.lambda_at(k)?.center() {
            Center::Finite(x) => Ok(x),
            Center::Infinity => unreachable!("validated at construction"),
        }
    }
}

/// Flat coordinates of a point: `u0[i] = u_{0,i+1}` from the expansion at
/// infinity and `u[k-1][j] = u_{k,j}` from the `k`-th puncture (`u_{k,0}`
/// is its location).
#[derive(Clone, Debug, PartialEq)]
pub struct UCoords<F> {
    pub u0: Vec<F>,
    pub u: Vec<Vec<F>>,
}

/// One sector of flow directions: the puncture at infinity (`E`), the
/// descendent family at puncture `k` (`H0(k)`), or the logarithmic family
/// there (`H1(k)`, level 0 only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    E,
    H0(usize),
    H1(usize),
}

impl Sector {
    /// The puncture index the sector is attached to, if any.
    pub fn pole(&self) -> Option<usize> {
        match self {
            Sector::E => None,
            Sector::H0(k) | Sector::H1(k) => Some(*k),
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::E => write!(f, "e"),
            Sector::H0(k) => write!(f, "h0({k})"),
            Sector::H1(k) => write!(f, "h1({k})"),
        }
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "e" {
            return Ok(Sector::E);
        }
        let parse_k = |inner: &str| -> Result<usize> {
            inner
                .parse()
                .map_err(|_| Error::Parse(format!("bad sector index in {s:?}")))
        };
        if let Some(rest) = t.strip_prefix("h0(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Sector::H0(parse_k(rest)?));
        }
        if let Some(rest) = t.strip_prefix("h1(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Sector::H1(parse_k(rest)?));
        }
        Err(Error::Parse(format!(
            "expected e, h0(k), or h1(k), got {s:?}"
        )))
    }
}

/// A correlator value: an ordinary field element, or the formal logarithm
/// of a nonzero argument for entries involving the logarithmic sectors.
#[derive(Clone, Debug, PartialEq)]
pub enum OmegaValue<F> {
    Scalar(F),
    Log(F),
}

impl<F: Coeff> OmegaValue<F> {
    pub fn scalar(&self) -> Option<&F> {
        match self {
            OmegaValue::Scalar(x) => Some(x),
            OmegaValue::Log(_) => None,
        }
    }

    pub fn log_arg(&self) -> Option<&F> {
        match self {
            OmegaValue::Log(x) => Some(x),
            OmegaValue::Scalar(_) => None,
        }
    }
}

impl<F: Coeff> fmt::Display for OmegaValue<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaValue::Scalar(x) => write!(f, "{x}"),
            OmegaValue::Log(x) => write!(f, "log({x})"),
        }
    }
}

/// Reads the flat coordinates off a point by reverting each defining
/// series. The returned vector lengths reflect exactly what the windows
/// determine.
pub fn u_coords<F: Coeff>(pt: &WhithamPoint<F>) -> Result<UCoords<F>> {
    let z_of_a = pt.lambda0().revert()?;
    let mut u0 = Vec::new();
    for j in 1..z_of_a.order() {
        u0.push(z_of_a.coeff_nat(-j)?.neg());
    }
    let mut u = Vec::new();
    for k in 1..=pt.m() {
        let z_of_h = pt.lambda_at(k)?.revert()?;
        let mut uk = Vec::new();
        for j in 0..z_of_h.order() {
            uk.push(z_of_h.coeff_nat(-j)?);
        }
        u.push(uk);
    }
    Ok(UCoords { u0, u })
}

/// Rebuilds a point from flat coordinates. Vector lengths set the series
/// windows: appending explicit zeros widens what the point is known to.
/// Each puncture needs `u_{k,0}`, and `u_{k,1}` must be nonzero.
pub fn point_of_u<F: Coeff>(u: &UCoords<F>) -> Result<WhithamPoint<F>> {
    let mut coeffs = Vec::with_capacity(u.u0.len() + 2);
    coeffs.push(F::one());
    coeffs.push(F::zero());
    for x in &u.u0 {
        coeffs.push(x.neg());
    }
    let z_of_a = LaurentSeries::from_parts(Center::Infinity, 1, -1, coeffs);
    let lambda0 = z_of_a.revert()?;
    let mut lambda = Vec::with_capacity(u.u.len());
    for uk in &u.u {
        if uk.len() < 2 || uk[1].is_zero() {
            return Err(Error::Invalid(
                "puncture coordinates need a nonzero u_{k,1}".into(),
            ));
        }
        let z_of_h = LaurentSeries::from_parts(Center::Infinity, 1, 0, uk.clone());
        lambda.push(z_of_h.revert()?);
    }
    WhithamPoint::new(lambda0, lambda)
}

fn check_pole<F: Coeff>(pt: &WhithamPoint<F>, k: usize) -> Result<()> {
    if k == 0 || k > pt.m() {
        return Err(Error::Invalid(format!("puncture index {k} out of range")));
    }
    Ok(())
}

/// First derivatives of the free energy: `θ_{e,p} = −Res_∞ λ₀^{p+1}/(p+1)!`,
/// `θ_{h_{k,0},p} = Res_{φ_k} λ_k^{p+1}/(p+1)!`, and `θ_{h_{k,1},0} = φ_k`.
/// Logarithmic sectors at positive level are not part of the structure.
pub fn theta<F: Coeff>(pt: &WhithamPoint<F>, alpha: Sector, p: usize) -> Result<F> {
    match alpha {
        Sector::E => {
            let pw = pt.lambda0().pow_int(p as i64 + 1)?;
            Ok(pw.residue()?.neg().mul(&inv_factorial(p as u64 + 1)))
        }
        Sector::H0(k) => {
            check_pole(pt, k)?;
            let pw = pt.lambda_at(k)?.pow_int(p as i64 + 1)?;
            Ok(pw.residue()?.mul(&inv_factorial(p as u64 + 1)))
        }
        Sector::H1(k) => {
            check_pole(pt, k)?;
            if p > 0 {
                return Err(Error::Unsupported(
                    "logarithmic sectors carry a single level".into(),
                ));
            }
            Ok(pt.phi(k)?.clone())
        }
    }
}

/// Residue at the center of `w` of `expand(g) · w`, with the expansion
/// window sized so only `w`'s own window can limit the result.
pub(crate) fn pair_residue<F: Coeff>(g: &GlobalRational<F>, w: &LaurentSeries<F>) -> Result<F> {
    let target = match w.center() {
        Center::Infinity => 1,
        Center::Finite(_) => -1,
    };
    let expansion_order = target + 1 - w.low();
    let known = match w.center() {
        Center::Infinity => -expansion_order,
        Center::Finite(_) => expansion_order,
    };
    let e = g.expand_at(w.center(), known)?;
    e.mul(w)?.residue()
}

/// Internal exponent of the lowest term `g` can contribute when expanded at
/// `center`; `None` when `g` is identically zero.
fn structural_low<F: Coeff>(g: &GlobalRational<F>, center: &Center<F>) -> Option<i64> {
    if g.is_zero() {
        return None;
    }
    match center {
        Center::Infinity => {
            if !g.poly.is_empty() {
                Some(-(g.poly.len() as i64 - 1))
            } else {
                Some(1)
            }
        }
        Center::Finite(x) => {
            for (loc, coeffs) in &g.parts {
                if loc == x {
                    return Some(-(coeffs.len() as i64));
                }
            }
            Some(0)
        }
    }
}

/// Residue at `center` of the product of two global rational functions,
/// computed through matched local expansions.
fn residue_product_at<F: Coeff>(
    g1: &GlobalRational<F>,
    g2: &GlobalRational<F>,
    center: &Center<F>,
) -> Result<F> {
    let target: i64 = match center {
        Center::Infinity => 1,
        Center::Finite(_) => -1,
    };
    let (Some(l1), Some(l2)) = (structural_low(g1, center), structural_low(g2, center)) else {
        return Ok(F::zero());
    };
    let to_known = |order: i64| match center {
        Center::Infinity => -order,
        Center::Finite(_) => order,
    };
    let e1 = g1.expand_at(center, to_known(target + 1 - l2))?;
    let e2 = g2.expand_at(center, to_known(target + 1 - l1))?;
    e1.mul(&e2)?.residue()
}

fn projection<F: Coeff>(
    pt: &WhithamPoint<F>,
    alpha: Sector,
    p: usize,
) -> Result<GlobalRational<F>> {
    match alpha {
        Sector::E => {
            let pw = pt.lambda0().pow_int(p as i64 + 1)?;
            GlobalRational::polynomial_part(&pw)
        }
        Sector::H0(j) => {
            check_pole(pt, j)?;
            let pw = pt.lambda_at(j)?.pow_int(p as i64 + 1)?;
            GlobalRational::principal_part_at(&pw)
        }
        Sector::H1(_) => unreachable!("log sectors have no power projection"),
    }
}

/// The two-point correlator `Ω_{α,p;β,q}`, realized by local residues of
/// the projected powers against the exact one-forms `d λ^{q+1}/(q+1)!`.
/// Entries with one logarithmic index are scalars; entries with two are
/// formal logarithms returned through their arguments.
pub fn omega<F: Coeff>(
    pt: &WhithamPoint<F>,
    alpha: Sector,
    p: usize,
    beta: Sector,
    q: usize,
) -> Result<OmegaValue<F>> {
    if matches!(alpha, Sector::H1(_)) && p > 0 || matches!(beta, Sector::H1(_)) && q > 0 {
        return Err(Error::Unsupported(
            "logarithmic sectors carry a single level".into(),
        ));
    }
    let cpq: F = inv_factorial::<F>(p as u64 + 1).mul(&inv_factorial(q as u64 + 1));
    match (alpha, beta) {
        (Sector::H1(j), Sector::H1(k)) => {
            check_pole(pt, j)?;
            check_pole(pt, k)?;
            let arg = if j == k {
                pt.lambda_at(k)?.coeff_nat(-1)?
            } else {
                pt.phi(j)?.sub(pt.phi(k)?)
            };
            if arg.is_zero() {
                return Err(Error::Invalid("vanishing logarithm argument".into()));
            }
            Ok(OmegaValue::Log(arg))
        }
        (Sector::H1(_), _) => omega(pt, beta, q, alpha, p),
        (_, Sector::H1(k)) => {
            check_pole(pt, k)?;
            let field = GlobalRational::from_part(pt.phi(k)?.clone(), vec![F::one()]);
            let c = inv_factorial::<F>(p as u64 + 1);
            let val = match alpha {
                Sector::E => {
                    let pw = pt.lambda0().pow_int(p as i64 + 1)?;
                    pair_residue(&field, &pw)?.mul(&c).neg()
                }
                Sector::H0(j) => {
                    check_pole(pt, j)?;
                    let pw = pt.lambda_at(j)?.pow_int(p as i64 + 1)?;
                    pair_residue(&field, &pw)?.mul(&c)
                }
                Sector::H1(_) => unreachable!(),
            };
            Ok(OmegaValue::Scalar(val))
        }
        (_, _) => {
            let g = projection(pt, alpha, p)?;
            let weight = match beta {
                Sector::E => pt.lambda0().pow_int(q as i64 + 1)?.derive(),
                Sector::H0(k) => {
                    check_pole(pt, k)?;
                    pt.lambda_at(k)?.pow_int(q as i64 + 1)?.derive()
                }
                Sector::H1(_) => unreachable!(),
            };
            let same_side = matches!(
                (alpha, beta),
                (Sector::E, Sector::E) | (Sector::H0(_), Sector::H0(_))
            );
            let r = pair_residue(&g, &weight)?.mul(&cpq);
            Ok(OmegaValue::Scalar(if same_side { r } else { r.neg() }))
        }
    }
}

/// An independent route to [`omega`]: each entry is moved to the opposite
/// side of the pole–infinity split using that all residues of a rational
/// function sum to zero. Rows that have no such counterpart (both indices
/// logarithmic at one puncture, or a logarithmic first index) are reported
/// as unsupported.
pub fn omega_alt<F: Coeff>(
    pt: &WhithamPoint<F>,
    alpha: Sector,
    p: usize,
    beta: Sector,
    q: usize,
) -> Result<OmegaValue<F>> {
    if matches!(alpha, Sector::H1(_)) && p > 0 || matches!(beta, Sector::H1(_)) && q > 0 {
        return Err(Error::Unsupported(
            "logarithmic sectors carry a single level".into(),
        ));
    }
    let cpq: F = inv_factorial::<F>(p as u64 + 1).mul(&inv_factorial(q as u64 + 1));
    let unsupported =
        || -> Result<OmegaValue<F>> { Err(Error::Unsupported("no transferred form".into())) };
    match (alpha, beta) {
        (Sector::E, Sector::E) => {
            let gp = projection(pt, alpha, p)?;
            let pw = pt.lambda0().pow_int(q as i64 + 1)?;
            let gq = projection(pt, beta, q)?;
            let eq = gq.expand_at(&Center::Infinity, -pw.order())?;
            let tail = pw.sub(&eq)?.derive();
            Ok(OmegaValue::Scalar(pair_residue(&gp, &tail)?.mul(&cpq)))
        }
        (Sector::E, Sector::H0(k)) => {
            check_pole(pt, k)?;
            let gp = projection(pt, alpha, p)?;
            let gq = projection(pt, beta, q)?.derive();
            let r = residue_product_at(&gp, &gq, &Center::Infinity)?;
            Ok(OmegaValue::Scalar(r.mul(&cpq)))
        }
        (Sector::H0(j), Sector::E) => {
            check_pole(pt, j)?;
            let gp = projection(pt, alpha, p)?;
            let gq = projection(pt, beta, q)?.derive();
            let here = Center::Finite(pt.phi(j)?.clone());
            let r = residue_product_at(&gp, &gq, &here)?;
            Ok(OmegaValue::Scalar(r.mul(&cpq)))
        }
        (Sector::H0(j), Sector::H0(k)) if j != k => {
            check_pole(pt, j)?;
            check_pole(pt, k)?;
            let gp = projection(pt, alpha, p)?;
            let gq = projection(pt, beta, q)?.derive();
            let at_inf = residue_product_at(&gp, &gq, &Center::Infinity)?;
            let here = Center::Finite(pt.phi(j)?.clone());
            let at_j = residue_product_at(&gp, &gq, &here)?;
            Ok(OmegaValue::Scalar(at_inf.add(&at_j).neg().mul(&cpq)))
        }
        (Sector::H0(j), Sector::H0(k)) => {
            check_pole(pt, k)?;
            let gp = projection(pt, alpha, p)?;
            let gq = projection(pt, beta, q)?;
            let at_inf = residue_product_at(&gp, &gq.derive(), &Center::Infinity)?;
            let pw = pt.lambda_at(k)?.pow_int(q as i64 + 1)?;
            let here = Center::Finite(pt.phi(j)?.clone());
            let eq = gq.expand_at(&here, pw.order())?;
            let tail = pw.sub(&eq)?.derive();
            let regular = pair_residue(&gp, &tail)?;
            Ok(OmegaValue::Scalar(at_inf.neg().add(&regular).mul(&cpq)))
        }
        (Sector::E, Sector::H1(k)) => {
            check_pole(pt, k)?;
            let gp = projection(pt, alpha, p)?;
            let val = gp.eval_at(pt.phi(k)?)?.mul(&inv_factorial(p as u64 + 1));
            Ok(OmegaValue::Scalar(val))
        }
        (Sector::H0(j), Sector::H1(k)) if j != k => {
            check_pole(pt, j)?;
            check_pole(pt, k)?;
            let gp = projection(pt, alpha, p)?;
            let val = gp.eval_at(pt.phi(k)?)?.mul(&inv_factorial(p as u64 + 1));
            Ok(OmegaValue::Scalar(val.neg()))
        }
        _ => unsupported(),
    }
}

/// The finite set of flat coordinates `(k, j) ↦ u_{k,j}` (with `k = 0` for
/// the family at infinity) that a correlator entry can depend on.
pub fn dependence_indices(
    alpha: Sector,
    p: usize,
    beta: Sector,
    q: usize,
) -> Result<BTreeSet<(usize, usize)>> {
    if matches!(alpha, Sector::H1(_)) && p > 0 || matches!(beta, Sector::H1(_)) && q > 0 {
        return Err(Error::Unsupported(
            "logarithmic sectors carry a single level".into(),
        ));
    }
    fn span(set: &mut BTreeSet<(usize, usize)>, k: usize, lo: usize, hi: usize) {
        for j in lo..=hi {
            set.insert((k, j));
        }
    }
    let mut set = BTreeSet::new();
    let s = &mut set;
    match (alpha, beta) {
        (Sector::E, Sector::E) => span(s, 0, 1, p + q + 1),
        (Sector::E, Sector::H0(k)) => {
            if p >= 1 {
                span(s, 0, 1, p);
            }
            span(s, k, 0, q + 1);
        }
        (Sector::H0(k), Sector::E) => {
            if q >= 1 {
                span(s, 0, 1, q);
            }
            span(s, k, 0, p + 1);
        }
        (Sector::H0(j), Sector::H0(k)) if j == k => span(s, k, 0, p + q + 3),
        (Sector::H0(j), Sector::H0(k)) => {
            span(s, j, 0, p + 1);
            span(s, k, 0, q + 1);
        }
        (Sector::E, Sector::H1(k)) => {
            s.insert((k, 0));
            if p >= 1 {
                span(s, 0, 1, p);
            }
        }
        (Sector::H1(k), Sector::E) => {
            s.insert((k, 0));
            if q >= 1 {
                span(s, 0, 1, q);
            }
        }
        (Sector::H0(j), Sector::H1(k)) if j == k => span(s, k, 0, p + 2),
        (Sector::H0(j), Sector::H1(k)) => {
            s.insert((k, 0));
            span(s, j, 0, p + 1);
        }
        (Sector::H1(j), Sector::H0(k)) if j == k => span(s, k, 0, q + 2),
        (Sector::H1(j), Sector::H0(k)) => {
            s.insert((j, 0));
            span(s, k, 0, q + 1);
        }
        (Sector::H1(j), Sector::H1(k)) if j == k => {
            s.insert((k, 1));
        }
        (Sector::H1(j), Sector::H1(k)) => {
            s.insert((j, 0));
            s.insert((k, 0));
        }
    }
    Ok(set)
}

/// The flat vector field of a puncture sector, as the global rational
/// function giving `∂λ/∂t` at fixed `z`: `−(λ_k′)_{≤ −1}` for `h_{k,0}` and
/// `(z−φ_k)⁻¹` for `h_{k,1}`.
pub fn flat_field<F: Coeff>(pt: &WhithamPoint<F>, alpha: Sector) -> Result<GlobalRational<F>> {
    match alpha {
        Sector::H0(k) => {
            check_pole(pt, k)?;
            let d = pt.lambda_at(k)?.derive();
            Ok(GlobalRational::principal_part_at(&d)?.neg())
        }
        Sector::H1(k) => {
            check_pole(pt, k)?;
            Ok(GlobalRational::from_part(
                pt.phi(k)?.clone(),
                vec![F::one()],
            ))
        }
        Sector::E => Err(Error::Unsupported(
            "the sector at infinity is not a single rational field".into(),
        )),
    }
}

/// Lifts the series at infinity by a decaying increment: the result has
/// jet coefficients whose `tag` parts carry the increment.
pub(crate) fn lift_inf_core<F: Coeff>(
    l0: &LaurentSeries<F>,
    d: &LaurentSeries<F>,
    tag: u32,
) -> Result<LaurentSeries<Jet<F>>> {
    if d.low() < 1 {
        return Err(Error::Invalid(
            "a tangent at infinity must decay there".into(),
        ));
    }
    let order = l0.order().min(d.order());
    let mut coeffs = Vec::new();
    for e in l0.low()..order {
        coeffs.push(Jet::with_part(l0.coeff_int(e)?, tag, d.coeff_int(e)?));
    }
    Ok(LaurentSeries::from_parts(
        Center::Infinity,
        1,
        l0.low(),
        coeffs,
    ))
}

/// Lifts a puncture series by an increment given at fixed `z`: the double
/// pole of the increment is absorbed into motion of the puncture, so the
/// lifted series keeps an exact simple-pole shape around a jet-valued
/// center.
pub(crate) fn lift_pole_core<F: Coeff>(
    lk: &LaurentSeries<F>,
    d: &LaurentSeries<F>,
    tag: u32,
) -> Result<LaurentSeries<Jet<F>>> {
    let Center::Finite(phi) = lk.center() else {
        return Err(Error::Invalid("expected a finite center".into()));
    };
    let c_pole = lk.coeff_nat(-1)?;
    let phi_dot = d.coeff_int(-2)?.div(&c_pole)?;
    let incr = d.add(&lk.derive().scale(&phi_dot))?;
    if incr.low() < -1 {
        return Err(Error::Invalid(
            "the increment keeps a higher-order pole after recentering".into(),
        ));
    }
    let mut coeffs = Vec::new();
    for e in lk.low()..incr.order() {
        coeffs.push(Jet::with_part(lk.coeff_int(e)?, tag, incr.coeff_int(e)?));
    }
    let jet_phi = Jet::with_part(phi.clone(), tag, phi_dot);
    Ok(LaurentSeries::from_parts(
        Center::Finite(jet_phi),
        1,
        lk.low(),
        coeffs,
    ))
}

/// Moves a point infinitesimally along a rational vector field: the result
/// is the same point over first-order jets, with the given tag carrying the
/// increment. Puncture motion is split off so each pole keeps its exact
/// simple-pole shape.
pub fn lift_point<F: Coeff>(
    pt: &WhithamPoint<F>,
    field: &GlobalRational<F>,
    tag: u32,
) -> Result<WhithamPoint<Jet<F>>> {
    if !field.poly.is_empty() {
        return Err(Error::Invalid(
            "a tangent field must vanish at infinity".into(),
        ));
    }
    let l0 = pt.lambda0();
    let d_inf = field.expand_at(&Center::Infinity, -l0.order())?;
    let lambda0 = lift_inf_core(l0, &d_inf, tag)?;
    let mut lambda = Vec::with_capacity(pt.m());
    for k in 1..=pt.m() {
        let lk = pt.lambda_at(k)?;
        let phi = pt.phi(k)?.clone();
        let d_here = field.expand_at(&Center::Finite(phi), lk.order())?;
        lambda.push(lift_pole_core(lk, &d_here, tag)?);
    }
    WhithamPoint::new(lambda0, lambda)
}
