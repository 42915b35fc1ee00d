//! JSON schemas for the library's values.
//!
//! Every coefficient travels as a string in the backend's exact textual
//! form (`"p/q"` for rationals, decimal strings for floats), so files are
//! backend-agnostic and survive round trips without loss.
//!
//! Schemas:
//!
//! * series — `{center, denom, low, order, coeffs: [..]}`. `center` is
//!   `"infinity"` or the coefficient string of a finite point. `coeffs`
//!   ascend in the internal exponent of the local parameter, which is
//!   `1/z` at infinity and `z − φ` at a finite point: **at infinity,
//!   ascending internal exponent means descending powers of `z`** — the
//!   leading behavior comes first. `low` is the first internal exponent,
//!   `order` the first unknown one, and exponent `e` means the local
//!   parameter to the power `e/denom`.
//! * rational function — `{poly: [..], parts: {"loc": [c₋₁, c₋₂, ..]}}`:
//!   polynomial coefficients ascending in `z`, and principal-part
//!   coefficients per location, ascending in pole depth.
//! * point — `{m, phi: [..], series: [..]}` with `m + 1` series entries:
//!   the expansion at infinity first, then one per puncture. `phi` must
//!   repeat the finite centers; the redundancy is validated on load.
//! * superpotential — `{n: [..], a0: [..], poles: [{loc, coeffs, root?}]}`
//!   with profile `n = (n₀; n₁, …)`. The optional `root` supplies the
//!   `n_i`-th root of the top coefficient that exact backends cannot
//!   compute on their own; it is required there whenever a fractional
//!   power of the pole's expansion is taken.
//! * even superpotential — `{n: [..], b0: [..], b1: [..], root1?,
//!   blocks: [{loc2, coeffs, root?, branch?}]}` mirroring the
//!   `z²`-profile: `n` lists `(n₀′; n₁′, pair depths…)`, `b0` the `z^{2j}`
//!   coefficients, `b1` the central `z^{−2j}` coefficients, and each block
//!   one mirror pair in powers of `(z² − loc2)^{−1}`.
//!
//! Unknown fields are rejected, so typos fail loudly instead of being
//! ignored.

use crate::coeff::Coeff;
use crate::even::{EvenBlock, EvenHurwitzData};
use crate::hurwitz::{HurwitzData, HurwitzPole};
use crate::ratfun::GlobalRational;
use crate::series::{Center, LaurentSeries};
use crate::whitham::WhithamPoint;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

const INFINITY: &str = "infinity";

fn center_to_string<F: Coeff>(c: &Center<F>) -> String {
    match c {
        Center::Infinity => INFINITY.to_string(),
        Center::Finite(x) => x.repr(),
    }
}

fn center_from_string<F: Coeff>(s: &str) -> Result<Center<F>> {
    if s == INFINITY {
        Ok(Center::Infinity)
    } else {
        Ok(Center::Finite(F::parse(s)?))
    }
}

fn parse_all<F: Coeff>(xs: &[String]) -> Result<Vec<F>> {
    xs.iter().map(|x| F::parse(x)).collect()
}

fn repr_all<F: Coeff>(xs: &[F]) -> Vec<String> {
    xs.iter().map(|x| x.repr()).collect()
}

fn opt_parse<F: Coeff>(x: &Option<String>) -> Result<Option<F>> {
    x.as_ref().map(|s| F::parse(s)).transpose()
}

/// JSON form of a [`LaurentSeries`]; see the module docs for the field
/// conventions.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub center: String,
    pub denom: i64,
    pub low: i64,
    pub order: i64,
    pub coeffs: Vec<String>,
}

/// Serializes a series; the window `low..order` is written in full.
pub fn series_to_json<F: Coeff>(s: &LaurentSeries<F>) -> Result<SeriesJson> {
    let mut coeffs = Vec::with_capacity((s.order() - s.low()).max(0) as usize);
    for e in s.low()..s.order() {
        coeffs.push(s.coeff_int(e)?.repr());
    }
    Ok(SeriesJson {
        center: center_to_string(s.center()),
        denom: s.denom(),
        low: s.low(),
        order: s.order(),
        coeffs,
    })
}

/// Rebuilds a series. The declared window must be consistent; leading
/// zero coefficients are trimmed exactly as at construction.
pub fn series_from_json<F: Coeff>(j: &SeriesJson) -> Result<LaurentSeries<F>> {
    if j.denom < 1 {
        return Err(Error::Parse(format!(
            "series denom must be positive, got {}",
            j.denom
        )));
    }
    if j.order - j.low != j.coeffs.len() as i64 {
        return Err(Error::Parse(format!(
            "series window {}..{} holds {} exponents but {} coefficients were given",
            j.low,
            j.order,
            j.order - j.low,
            j.coeffs.len()
        )));
    }
    let center = center_from_string(&j.center)?;
    Ok(LaurentSeries::from_parts(
        center,
        j.denom,
        j.low,
        parse_all(&j.coeffs)?,
    ))
}

/// JSON form of a [`GlobalRational`]: the polynomial part plus principal
/// parts keyed by their location strings (sorted, so output is canonical).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalJson {
    pub poly: Vec<String>,
    pub parts: BTreeMap<String, Vec<String>>,
}

pub fn rational_to_json<F: Coeff>(g: &GlobalRational<F>) -> RationalJson {
    let mut parts = BTreeMap::new();
    for (loc, cs) in &g.parts {
        parts.insert(loc.repr(), repr_all(cs));
    }
    RationalJson {
        poly: repr_all(&g.poly),
        parts,
    }
}

pub fn rational_from_json<F: Coeff>(j: &RationalJson) -> Result<GlobalRational<F>> {
    let mut parts = Vec::with_capacity(j.parts.len());
    for (loc, cs) in &j.parts {
        parts.push((F::parse(loc)?, parse_all(cs)?));
    }
    Ok(GlobalRational::new(parse_all(&j.poly)?, parts))
}

/// JSON form of a [`WhithamPoint`]; see the module docs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub m: usize,
    pub phi: Vec<String>,
    pub series: Vec<SeriesJson>,
}

pub fn point_to_json<F: Coeff>(pt: &WhithamPoint<F>) -> Result<PointJson> {
    let mut phi = Vec::with_capacity(pt.m());
    let mut series = vec![series_to_json(pt.lambda0())?];
    for k in 1..=pt.m() {
        phi.push(pt.phi(k)?.repr());
        series.push(series_to_json(pt.lambda_at(k)?)?);
    }
    Ok(PointJson {
        m: pt.m(),
        phi,
        series,
    })
}

pub fn point_from_json<F: Coeff>(j: &PointJson) -> Result<WhithamPoint<F>> {
    if j.series.len() != j.m + 1 {
        return Err(Error::Parse(format!(
            "a point with m = {} needs {} series entries, got {}",
            j.m,
            j.m + 1,
            j.series.len()
        )));
    }
    if j.phi.len() != j.m {
        return Err(Error::Parse(format!(
            "a point with m = {} needs {} phi entries, got {}",
            j.m,
            j.m,
            j.phi.len()
        )));
    }
    let lambda0 = series_from_json::<F>(&j.series[0])?;
    let mut lambda = Vec::with_capacity(j.m);
    for (k, sj) in j.series[1..].iter().enumerate() {
        let s = series_from_json::<F>(sj)?;
        let declared = F::parse(&j.phi[k])?;
        match s.center() {
            Center::Finite(c) if *c == declared => {}
            _ => {
                return Err(Error::Parse(format!(
                    "phi[{k}] = {} does not match the center of series {}",
                    j.phi[k],
                    k + 1
                )))
            }
        }
        lambda.push(s);
    }
    WhithamPoint::new(lambda0, lambda)
}

/// JSON form of one pole block of a superpotential.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleJson {
    pub loc: String,
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
}

/// JSON form of a [`HurwitzData`]; see the module docs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HurwitzJson {
    pub n: Vec<usize>,
    pub a0: Vec<String>,
    pub poles: Vec<PoleJson>,
}

pub fn hurwitz_to_json<F: Coeff>(data: &HurwitzData<F>) -> Result<HurwitzJson> {
    let mut n = vec![data.n(0)];
    let mut poles = Vec::with_capacity(data.m());
    for i in 1..=data.m() {
        let p = data.pole(i)?;
        n.push(data.n(i));
        poles.push(PoleJson {
            loc: p.loc.repr(),
            coeffs: repr_all(&p.coeffs),
            root: p.root.as_ref().map(|r| r.repr()),
        });
    }
    Ok(HurwitzJson {
        n,
        a0: repr_all(data.a0()),
        poles,
    })
}

pub fn hurwitz_from_json<F: Coeff>(j: &HurwitzJson) -> Result<HurwitzData<F>> {
    if j.n.is_empty() {
        return Err(Error::Parse("profile list n must not be empty".into()));
    }
    if j.n.len() != j.poles.len() + 1 {
        return Err(Error::Parse(format!(
            "profile lists {} entries but there are {} pole blocks",
            j.n.len(),
            j.poles.len()
        )));
    }
    if j.n[0] != j.a0.len() + 1 {
        return Err(Error::Parse(format!(
            "degree n₀ = {} needs {} polynomial coefficients, got {}",
            j.n[0],
            j.n[0].saturating_sub(1),
            j.a0.len()
        )));
    }
    let mut poles = Vec::with_capacity(j.poles.len());
    for (k, pj) in j.poles.iter().enumerate() {
        if j.n[k + 1] != pj.coeffs.len() {
            return Err(Error::Parse(format!(
                "pole {} declares depth {} but lists {} coefficients",
                k + 1,
                j.n[k + 1],
                pj.coeffs.len()
            )));
        }
        poles.push(HurwitzPole {
            loc: F::parse(&pj.loc)?,
            coeffs: parse_all(&pj.coeffs)?,
            root: opt_parse(&pj.root)?,
        });
    }
    HurwitzData::new(j.n[0], parse_all(&j.a0)?, poles)
}

/// JSON form of one mirror-pair block of an even superpotential.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvenBlockJson {
    pub loc2: String,
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
}

/// JSON form of an [`EvenHurwitzData`]; see the module docs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvenJson {
    pub n: Vec<usize>,
    pub b0: Vec<String>,
    pub b1: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root1: Option<String>,
    pub blocks: Vec<EvenBlockJson>,
}

pub fn even_to_json<F: Coeff>(data: &EvenHurwitzData<F>) -> EvenJson {
    let mut n = vec![data.n0_prime()];
    for i in 1..=data.m_prime() {
        n.push(data.n_prime(i));
    }
    EvenJson {
        n,
        b0: repr_all(data.b0()),
        b1: repr_all(data.b1()),
        root1: data.root1().map(|r| r.repr()),
        blocks: data
            .blocks()
            .iter()
            .map(|b| EvenBlockJson {
                loc2: b.loc2.repr(),
                coeffs: repr_all(&b.coeffs),
                root: b.root.as_ref().map(|r| r.repr()),
                branch: b.branch.as_ref().map(|r| r.repr()),
            })
            .collect(),
    }
}

pub fn even_from_json<F: Coeff>(j: &EvenJson) -> Result<EvenHurwitzData<F>> {
    if j.n.len() != j.blocks.len() + 2 {
        return Err(Error::Parse(format!(
            "even profile lists {} entries but there are {} pair blocks",
            j.n.len(),
            j.blocks.len()
        )));
    }
    if j.n[0] != j.b0.len() || j.n[1] != j.b1.len() {
        return Err(Error::Parse(
            "even profile entries must match the coefficient block lengths".into(),
        ));
    }
    let mut blocks = Vec::with_capacity(j.blocks.len());
    for (k, bj) in j.blocks.iter().enumerate() {
        if j.n[k + 2] != bj.coeffs.len() {
            return Err(Error::Parse(format!(
                "pair block {} declares depth {} but lists {} coefficients",
                k + 1,
                j.n[k + 2],
                bj.coeffs.len()
            )));
        }
        blocks.push(EvenBlock {
            loc2: F::parse(&bj.loc2)?,
            coeffs: parse_all(&bj.coeffs)?,
            root: opt_parse(&bj.root)?,
            branch: opt_parse(&bj.branch)?,
        });
    }
    EvenHurwitzData::new(
        j.n[0],
        parse_all(&j.b0)?,
        parse_all(&j.b1)?,
        opt_parse(&j.root1)?,
        blocks,
    )
}

/// One of the three input payloads a command file can hold, recognized by
/// its distinguishing field: `series` for a point, `poles` for a
/// superpotential, `blocks` for an even superpotential.
#[derive(Clone, Debug)]
pub enum InputPayload {
    Point(PointJson),
    Hurwitz(HurwitzJson),
    Even(EvenJson),
}

/// Parses an input file's text into whichever payload it holds.
pub fn detect_payload(text: &str) -> Result<InputPayload> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("input must be a JSON object".into()))?;
    if obj.contains_key("series") {
        Ok(InputPayload::Point(serde_json::from_value(value)?))
    } else if obj.contains_key("poles") {
        Ok(InputPayload::Hurwitz(serde_json::from_value(value)?))
    } else if obj.contains_key("blocks") {
        Ok(InputPayload::Even(serde_json::from_value(value)?))
    } else {
        Err(Error::Parse(
            "unrecognized input: expected a point (series), a superpotential (poles), \
             or an even superpotential (blocks)"
                .into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Rat;
    use crate::hurwitz;
    use crate::whitham::point_of_u;
    use crate::whitham::UCoords;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rr(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    #[test]
    fn series_round_trip_preserves_window_and_grid() {
        let s = LaurentSeries::from_parts(
            Center::Finite(rr(1, 2)),
            1,
            -2,
            vec![r(3), r(0), rr(-7, 5), r(1)],
        );
        let j = series_to_json(&s).unwrap();
        assert_eq!(j.center, "1/2");
        assert_eq!((j.low, j.order), (-2, 2));
        assert_eq!(j.coeffs, vec!["3", "0", "-7/5", "1"]);
        let back: LaurentSeries<Rat> = series_from_json(&j).unwrap();
        assert!(back.sub(&s).unwrap().is_empty());

        // A fractional grid survives: deg-3 λ^{1/2} at infinity has denom 2.
        let f =
            LaurentSeries::from_parts(Center::<Rat>::Infinity, 1, -3, vec![r(1), r(0), r(0), r(4)]);
        let half = f.pow_ratio(1, 2, None).unwrap();
        let jj = series_to_json(&half).unwrap();
        assert_eq!(jj.denom, 2);
        let back: LaurentSeries<Rat> = series_from_json(&jj).unwrap();
        assert!(back.sub(&half).unwrap().is_empty());

        // Inconsistent windows and bad grids are rejected.
        let mut broken = series_to_json(&s).unwrap();
        broken.order += 1;
        assert!(series_from_json::<Rat>(&broken).is_err());
        let mut broken = series_to_json(&s).unwrap();
        broken.denom = 0;
        assert!(series_from_json::<Rat>(&broken).is_err());
    }

    #[test]
    fn rational_round_trip_is_canonical() {
        let g = GlobalRational::new(
            vec![r(2), r(0), r(1)],
            vec![(r(3), vec![r(5), r(-1)]), (r(-2), vec![rr(1, 3)])],
        );
        let j = rational_to_json(&g);
        // Keys sort canonically regardless of construction order.
        assert_eq!(j.parts.keys().cloned().collect::<Vec<_>>(), vec!["-2", "3"]);
        let back: GlobalRational<Rat> = rational_from_json(&j).unwrap();
        assert!(back.sub(&g).is_zero());
        let text = serde_json::to_string(&j).unwrap();
        let again: RationalJson = serde_json::from_str(&text).unwrap();
        assert!(rational_from_json::<Rat>(&again).unwrap().sub(&g).is_zero());
    }

    #[test]
    fn point_round_trip_and_phi_validation() {
        let pt = point_of_u(&UCoords {
            u0: vec![r(2), r(5), r(0), r(1)],
            u: vec![
                vec![r(1), r(3), r(0), r(2), r(0), r(0)],
                vec![r(-2), r(1), r(4), r(0), r(0), r(0)],
            ],
        })
        .unwrap();
        let j = point_to_json(&pt).unwrap();
        assert_eq!(j.m, 2);
        assert_eq!(j.phi, vec!["1", "-2"]);
        assert_eq!(j.series.len(), 3);
        let back: WhithamPoint<Rat> = point_from_json(&j).unwrap();
        assert_eq!(back.m(), 2);
        assert_eq!(back.phi(2).unwrap(), &r(-2));
        assert!(back
            .lambda0()
            .sub(pt.lambda0())
            .unwrap()
            .is_empty());

        let mut bad = point_to_json(&pt).unwrap();
        bad.phi[0] = "7".into();
        assert!(matches!(point_from_json::<Rat>(&bad), Err(Error::Parse(_))));
        let mut bad = point_to_json(&pt).unwrap();
        bad.series.pop();
        assert!(matches!(point_from_json::<Rat>(&bad), Err(Error::Parse(_))));
    }

    #[test]
    fn hurwitz_round_trip_keeps_roots() {
        let data = HurwitzData::new(
            3,
            vec![r(1), r(-2)],
            vec![
                HurwitzPole {
                    loc: r(2),
                    coeffs: vec![r(3), r(4)],
                    root: Some(r(2)),
                },
                HurwitzPole {
                    loc: r(-1),
                    coeffs: vec![r(7)],
                    root: None,
                },
            ],
        )
        .unwrap();
        let j = hurwitz_to_json(&data).unwrap();
        assert_eq!(j.n, vec![3, 2, 1]);
        assert_eq!(j.poles[0].root.as_deref(), Some("2"));
        assert_eq!(j.poles[1].root, None);
        let back: HurwitzData<Rat> = hurwitz_from_json(&j).unwrap();
        assert!(back.rational().sub(&data.rational()).is_zero());
        assert_eq!(back.root_value(1).unwrap(), r(2));

        let mut bad = hurwitz_to_json(&data).unwrap();
        bad.n[1] = 5;
        assert!(matches!(hurwitz_from_json::<Rat>(&bad), Err(Error::Parse(_))));
    }

    #[test]
    fn even_round_trip_mirrors_the_squared_profile() {
        let data = EvenHurwitzData::new(
            2,
            vec![r(-2), r(3)],
            vec![r(9)],
            Some(r(3)),
            vec![EvenBlock {
                loc2: r(4),
                coeffs: vec![r(5)],
                root: Some(r(2)),
                branch: None,
            }],
        )
        .unwrap();
        let j = even_to_json(&data);
        assert_eq!(j.n, vec![2, 1, 1]);
        assert_eq!(j.root1.as_deref(), Some("3"));
        let back: EvenHurwitzData<Rat> = even_from_json(&j).unwrap();
        let full = crate::even::expand_even(&back).unwrap();
        let orig = crate::even::expand_even(&data).unwrap();
        assert!(full.rational().sub(&orig.rational()).is_zero());

        let mut bad = even_to_json(&data);
        bad.n.pop();
        assert!(matches!(even_from_json::<Rat>(&bad), Err(Error::Parse(_))));
    }

    #[test]
    fn payloads_are_detected_by_shape() {
        let data = hurwitz::HurwitzData::new(2, vec![r(0)], vec![]).unwrap();
        let h = serde_json::to_string(&hurwitz_to_json(&data).unwrap()).unwrap();
        assert!(matches!(
            detect_payload(&h).unwrap(),
            InputPayload::Hurwitz(_)
        ));

        let pt = point_of_u(&UCoords {
            u0: vec![r(1)],
            u: vec![vec![r(0), r(2), r(0)]],
        })
        .unwrap();
        let p = serde_json::to_string(&point_to_json(&pt).unwrap()).unwrap();
        assert!(matches!(detect_payload(&p).unwrap(), InputPayload::Point(_)));

        assert!(detect_payload("{\"nope\": 1}").is_err());
        assert!(detect_payload("not json at all").is_err());
        // Unknown fields fail loudly rather than being dropped.
        let mut v: serde_json::Value = serde_json::from_str(&h).unwrap();
        v.as_object_mut()
            .unwrap()
            .insert("extra".into(), serde_json::json!(1));
        assert!(detect_payload(&v.to_string()).is_err());
    }
}
