//! Lax form of the hierarchy flows and the compatibility residual tying
//! them to the correlators.
//!
//! A flowing point is represented over first-order jets: one tag carries
//! the spatial derivative of every coefficient and of every puncture
//! location. Flows act by the Poisson bracket
//! `{f, λ} = ∂_z f ∂_x λ − ∂_x f ∂_z λ` with generators cut out of powers
//! of the point's own series, and the tau structure makes the spatial
//! derivative of every correlator equal the flow derivative of the matching
//! first-order quantity.

use crate::coeff::{inv_factorial, Coeff, Jet};
use crate::ratfun::GlobalRational;
use crate::series::{Center, LaurentSeries};
use crate::whitham::{
    lift_inf_core, lift_pole_core, omega, theta, OmegaValue, Sector, WhithamPoint,
};
use crate::{Error, Result};

/// Conventional jet tag for the spatial derivative of a point.
pub const TAG_X: u32 = 0;

/// Forgets the jet structure: values of the coefficients, value of the
/// center.
pub fn strip<F: Coeff>(s: &LaurentSeries<Jet<F>>) -> LaurentSeries<F> {
    let center = match s.center() {
        Center::Infinity => Center::Infinity,
        Center::Finite(j) => Center::Finite(j.val.clone()),
    };
    let coeffs = s.coeffs().iter().map(|c| c.val.clone()).collect();
    LaurentSeries::from_parts(center, s.denom(), s.low(), coeffs)
}

fn mapx_series<F: Coeff>(s: &LaurentSeries<Jet<F>>, tag: u32) -> LaurentSeries<Jet<F>> {
    let coeffs = s
        .coeffs()
        .iter()
        .map(|c| Jet::constant(c.part(tag)))
        .collect();
    LaurentSeries::from_parts(s.center().clone(), s.denom(), s.low(), coeffs)
}

/// `∂_x` of a series in `z` whose coefficients and center carry their own
/// spatial derivatives in the `tag` parts: the coefficientwise derivative
/// minus the center motion times `∂_z`.
pub fn lambda_x<F: Coeff>(
    pt: &WhithamPoint<Jet<F>>,
    i: usize,
    tag: u32,
) -> Result<LaurentSeries<Jet<F>>> {
    if i == 0 {
        return Ok(mapx_series(pt.lambda0(), tag));
    }
    let li = pt.lambda_at(i)?;
    let phi_dot = Jet::constant(pt.phi(i)?.part(tag));
    mapx_series(li, tag).sub(&li.derive().scale(&phi_dot))
}

/// `∂_x` of a global rational function with jet coefficients and jet pole
/// locations, at fixed `z`.
fn rational_x<F: Coeff>(g: &GlobalRational<Jet<F>>, tag: u32) -> GlobalRational<Jet<F>> {
    let poly = g
        .poly
        .iter()
        .map(|c| Jet::constant(c.part(tag)))
        .collect();
    let mut out = GlobalRational::new(poly, Vec::new());
    for (loc, coeffs) in &g.parts {
        let mapped = coeffs.iter().map(|c| Jet::constant(c.part(tag))).collect();
        out = out.add(&GlobalRational::from_part(loc.clone(), mapped));
        let phi_dot = loc.part(tag);
        if !phi_dot.is_zero() {
            let single = GlobalRational::from_part(loc.clone(), coeffs.clone());
            let motion = single.derive().scale(&Jet::constant(phi_dot).neg());
            out = out.add(&motion);
        }
    }
    out
}

fn generator<F: Coeff>(
    pt: &WhithamPoint<Jet<F>>,
    j: usize,
    k: usize,
) -> Result<GlobalRational<Jet<F>>> {
    if j == 0 {
        let pw = pt.lambda0().pow_int(k as i64)?;
        GlobalRational::polynomial_part(&pw)
    } else {
        let pw = pt.lambda_at(j)?.pow_int(k as i64)?;
        Ok(GlobalRational::principal_part_at(&pw)?.neg())
    }
}

/// Right-hand side of the hierarchy flow `σ^{j,k}` applied to the `i`-th
/// series (`i = 0` for the series at infinity): the Poisson bracket of the
/// flow's generator with `λ_i`, expanded at the series' own center. The
/// generator is the polynomial part of `λ₀^k` for `j = 0`, minus the
/// principal part of `λ_j^k` for punctures, and `log(z − φ_j)` for `k = 0`.
pub fn lax_rhs<F: Coeff>(
    pt: &WhithamPoint<Jet<F>>,
    j: usize,
    k: usize,
    i: usize,
    tag: u32,
) -> Result<LaurentSeries<F>> {
    if j > pt.m() || i > pt.m() {
        return Err(Error::Invalid("puncture index out of range".into()));
    }
    if j == 0 && k == 0 {
        return Err(Error::Invalid(
            "the family at infinity starts at level one".into(),
        ));
    }
    let li = if i == 0 {
        pt.lambda0()
    } else {
        pt.lambda_at(i)?
    };
    let known = match li.center() {
        Center::Infinity => -li.order(),
        Center::Finite(_) => li.order(),
    };
    let l_z = li.derive();
    let l_x = lambda_x(pt, i, tag)?;
    let (s_z, s_x) = if k == 0 {
        let loc = pt.phi(j)?.clone();
        let field = GlobalRational::from_part(loc.clone(), vec![Jet::one()]);
        let s_z = field.expand_at(li.center(), known)?;
        let s_x = s_z.scale(&Jet::constant(loc.part(tag)).neg());
        (s_z, s_x)
    } else {
        let s = generator(pt, j, k)?;
        let s_z = s.derive().expand_at(li.center(), known)?;
        let s_x = rational_x(&s, tag).expand_at(li.center(), known)?;
        (s_z, s_x)
    };
    let bracket = s_z.mul(&l_x)?.sub(&s_x.mul(&l_z)?)?;
    Ok(strip(&bracket))
}

/// The flow-compatibility residual of the tau structure: the derivative of
/// `θ_{β,q}` along the `(α,p)`-flow minus the spatial derivative of
/// `Ω_{α,p;β,q}`, both evaluated on a point whose `tag_x` jet parts carry
/// its spatial motion. The result is exactly zero when the structure
/// closes.
pub fn tau_flow_residual<F: Coeff>(
    pt: &WhithamPoint<Jet<F>>,
    alpha: Sector,
    p: usize,
    beta: Sector,
    q: usize,
    tag_x: u32,
) -> Result<F> {
    let (j, k, factor): (usize, usize, F) = match alpha {
        Sector::E => (0, p + 1, inv_factorial(p as u64 + 1)),
        Sector::H0(i) => (i, p + 1, inv_factorial(p as u64 + 1)),
        Sector::H1(i) => {
            if p > 0 {
                return Err(Error::Unsupported(
                    "logarithmic sectors carry a single level".into(),
                ));
            }
            (i, 0, F::one())
        }
    };
    let tag_t = tag_x.wrapping_add(1);
    let d0 = lax_rhs(pt, j, k, 0, tag_x)?.scale(&factor);
    let lambda0 = lift_inf_core(&strip(pt.lambda0()), &d0, tag_t)?;
    let mut lambda = Vec::with_capacity(pt.m());
    for i in 1..=pt.m() {
        let di = lax_rhs(pt, j, k, i, tag_x)?.scale(&factor);
        lambda.push(lift_pole_core(&strip(pt.lambda_at(i)?), &di, tag_t)?);
    }
    let flowed = WhithamPoint::new(lambda0, lambda)?;
    let term1 = theta(&flowed, beta, q)?.part(tag_t);
    let term2 = match omega(pt, alpha, p, beta, q)? {
        OmegaValue::Scalar(v) => v.part(tag_x),
        OmegaValue::Log(arg) => arg.part(tag_x).div(&arg.val)?,
    };
    Ok(term1.sub(&term2))
}
