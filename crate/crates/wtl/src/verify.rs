//! Seeded, deterministic verification suites.
//!
//! Each suite checks the invariants of one module on randomly generated
//! inputs, exactly on the rational backend: ring and calculus laws of the
//! series engine, residue identities of the rational layer, correlator
//! symmetry, dual-path agreement and dependence windows of the hierarchy,
//! the prepotential table identities, and the provable rows of every
//! stabilization report.
//!
//! Runs are reproducible: the same seed yields the same cases, inputs,
//! and failure dumps, regardless of scheduling. Cheap algebraic laws run
//! the full requested case count; invariants that build whole tables or
//! reports run a tenth of it (clamped to `3..=50`), which the per-result
//! [`CheckResult::cases`] field records.
//!
//! Setting the `WTL_TEST_CORRUPT` environment variable (to any non-empty
//! value) injects one deliberately failing case into every invariant — a
//! negative control proving the harness can detect failures.

use crate::coeff::{Coeff, Jet, Rat};
use crate::even::{
    check_even_data, even_open_report, even_stabilization_report, expand_even, EvenBlock,
    EvenHurwitzData,
};
use crate::hurwitz::{
    c_symmetry_defect, c_tensor, flat_coords, metric_matrix, omega_h, stabilization_report,
    wdvv_residual, HurwitzData, HurwitzOmega, HurwitzPole,
};
use crate::lax::{strip, tau_flow_residual, TAG_X};
use crate::open::{open_mixed_partials_defect, open_stabilization_report, open_wdvv_residual};
use crate::ratfun::GlobalRational;
use crate::series::{Center, LaurentSeries};
use crate::whitham::{
    dependence_indices, omega, omega_alt, point_of_u, OmegaValue, Sector, UCoords, WhithamPoint,
};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// The suite names [`run_suite`] accepts (besides `"all"`).
pub const SUITES: &[&str] = &["series", "ratfun", "whitham", "hurwitz", "open", "even"];

/// Outcome of one invariant's run: how many cases were tried, how many
/// failed, and a JSON dump of the first failing case.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub invariant: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Whether the `WTL_TEST_CORRUPT` negative control is active.
pub fn corruption_requested() -> bool {
    std::env::var("WTL_TEST_CORRUPT").map_or(false, |v| !v.is_empty())
}

/// A deterministic stream: one generator per (seed, case) pair, so
/// invariants neither share state nor depend on execution order, and the
/// same seed reproduces the same inputs on every platform.
fn stream(seed: u64, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(salt);
    rng
}

fn heavy(cases: usize) -> usize {
    (cases / 10).clamp(3, 50)
}

/// Runs `f` for each case index; `Ok(None)` passes, `Ok(Some(dump))`
/// fails with the dump recorded, `Err` fails with the error recorded.
fn run_cases(
    suite: &'static str,
    invariant: &'static str,
    cases: usize,
    mut f: impl FnMut(usize) -> Result<Option<String>>,
) -> CheckResult {
    let mut failures = 0;
    let mut first_failure = None;
    for case in 0..cases {
        match f(case) {
            Ok(None) => {}
            Ok(Some(dump)) => {
                failures += 1;
                first_failure.get_or_insert(dump);
            }
            Err(e) => {
                failures += 1;
                first_failure.get_or_insert_with(|| {
                    serde_json::json!({ "case": case, "error": e.to_string() }).to_string()
                });
            }
        }
    }
    if corruption_requested() {
        failures += 1;
        first_failure.get_or_insert_with(|| {
            serde_json::json!({ "injected": "WTL_TEST_CORRUPT" }).to_string()
        });
    }
    CheckResult {
        suite,
        invariant,
        cases,
        failures,
        first_failure,
    }
}

fn dump(case: usize, what: &str, detail: String) -> Option<String> {
    Some(serde_json::json!({ "case": case, "invariant": what, "detail": detail }).to_string())
}

// ---------------------------------------------------------------------
// Random input generators (the verification vocabulary: numerators in
// −9..=9, denominators in 1..=9, locations at small distinct integers).
// ---------------------------------------------------------------------

/// Random rational with numerator in `−9..=9`, denominator in `1..=9`.
pub fn random_rat(rng: &mut impl Rng) -> Rat {
    Rat::new(rng.gen_range(-9..=9), rng.gen_range(1..=9))
}

/// Like [`random_rat`] but never zero.
pub fn random_nonzero(rng: &mut impl Rng) -> Rat {
    loop {
        let x = random_rat(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Random windowed Laurent series at the given center: `low` in `−3..=1`,
/// 4–8 known coefficients, nonzero leading coefficient.
pub fn random_series(rng: &mut impl Rng, center: Center<Rat>) -> LaurentSeries<Rat> {
    let low = rng.gen_range(-3..=1);
    let len = rng.gen_range(4..=8);
    let mut coeffs = vec![random_nonzero(rng)];
    for _ in 1..len {
        coeffs.push(random_rat(rng));
    }
    LaurentSeries::from_parts(center, 1, low, coeffs)
}

fn random_center(rng: &mut impl Rng) -> Center<Rat> {
    if rng.gen_bool(0.5) {
        Center::Infinity
    } else {
        Center::Finite(random_rat(rng))
    }
}

/// Random rational function: polynomial of degree at most 2 plus one or
/// two principal parts of depth at most 3 at distinct small integers.
pub fn random_rational(rng: &mut impl Rng) -> GlobalRational<Rat> {
    let deg = rng.gen_range(0..=2);
    let poly: Vec<Rat> = (0..=deg).map(|_| random_rat(rng)).collect();
    let nparts = rng.gen_range(1..=2);
    let mut locs: Vec<i64> = Vec::new();
    while locs.len() < nparts {
        let l = rng.gen_range(-4..=4);
        if !locs.contains(&l) {
            locs.push(l);
        }
    }
    let parts = locs
        .into_iter()
        .map(|l| {
            let d = rng.gen_range(1..=3);
            let mut cs: Vec<Rat> = (0..d).map(|_| random_rat(rng)).collect();
            if cs[d - 1].is_zero() {
                cs[d - 1] = Rat::from_int(1);
            }
            (Rat::from_int(l), cs)
        })
        .collect();
    GlobalRational::new(poly, parts)
}

fn distinct_locations(rng: &mut impl Rng, m: usize) -> Vec<i64> {
    let mut locs: Vec<i64> = Vec::new();
    while locs.len() < m {
        let l = rng.gen_range(-4..=4);
        if !locs.contains(&l) {
            locs.push(l);
        }
    }
    locs
}

/// Random flat coordinates: `width` entries at infinity, `width + 2` per
/// puncture, punctures at distinct small integers with nonzero residues.
pub fn random_ucoords(rng: &mut impl Rng, m: usize, width: usize) -> UCoords<Rat> {
    let u0 = (0..width).map(|_| random_rat(rng)).collect();
    let u = distinct_locations(rng, m)
        .into_iter()
        .map(|phi| {
            let mut uk = vec![Rat::from_int(phi), random_nonzero(rng)];
            for _ in 2..width + 2 {
                uk.push(random_rat(rng));
            }
            uk
        })
        .collect();
    UCoords { u0, u }
}

/// Random moduli point with `m` punctures, built from [`random_ucoords`].
pub fn random_point(rng: &mut impl Rng, m: usize, width: usize) -> Result<WhithamPoint<Rat>> {
    point_of_u(&random_ucoords(rng, m, width))
}

/// Random superpotential with the given profile (`profile[0]` = degree at
/// infinity, the rest pole depths). Tops of poles deeper than 1 are
/// perfect powers with the root supplied, so all fractional powers stay
/// rational.
pub fn random_hurwitz(rng: &mut impl Rng, profile: &[usize]) -> Result<HurwitzData<Rat>> {
    let n0 = profile[0];
    let a0 = (0..n0.saturating_sub(1)).map(|_| random_rat(rng)).collect();
    let locs = distinct_locations(rng, profile.len() - 1);
    let poles = profile[1..]
        .iter()
        .zip(locs)
        .map(|(&nk, loc)| {
            let mut coeffs: Vec<Rat> = (0..nk).map(|_| random_rat(rng)).collect();
            let root = if nk == 1 {
                if coeffs[0].is_zero() {
                    coeffs[0] = Rat::from_int(1);
                }
                None
            } else {
                let t = random_nonzero(rng);
                coeffs[nk - 1] = t.pow_int(nk as i64).expect("integer power");
                Some(t)
            };
            HurwitzPole {
                loc: Rat::from_int(loc),
                coeffs,
                root,
            }
        })
        .collect();
    HurwitzData::new(n0, a0, poles)
}

/// Random even profile `(n₀′; n₁′, …)` with rational mirror data: squared
/// locations are perfect squares and every top is a perfect power, so the
/// expansion stays inside the rationals.
pub fn random_even(
    rng: &mut impl Rng,
    n0p: usize,
    n1p: usize,
    pair_depths: &[usize],
) -> Result<EvenHurwitzData<Rat>> {
    let b0 = (0..n0p).map(|_| random_rat(rng)).collect();
    let mut b1: Vec<Rat> = (0..n1p).map(|_| random_rat(rng)).collect();
    let t = random_nonzero(rng);
    b1[n1p - 1] = t.pow_int(2 * n1p as i64).expect("integer power");
    let mut rs: Vec<i64> = Vec::new();
    while rs.len() < pair_depths.len() {
        let r = rng.gen_range(1..=4);
        if !rs.contains(&r) {
            rs.push(r);
        }
    }
    let blocks = pair_depths
        .iter()
        .zip(rs)
        .map(|(&d, r)| {
            let mut coeffs: Vec<Rat> = (0..d).map(|_| random_rat(rng)).collect();
            let branch = if d == 1 {
                if coeffs[0].is_zero() {
                    coeffs[0] = Rat::from_int(1);
                }
                None
            } else {
                let c = random_nonzero(rng);
                let tworc = Rat::from_int(2 * r).mul(&c);
                coeffs[d - 1] = tworc.pow_int(d as i64).expect("integer power");
                Some(c)
            };
            EvenBlock {
                loc2: Rat::from_int(r * r),
                coeffs,
                root: Some(Rat::from_int(r)),
                branch,
            }
        })
        .collect();
    EvenHurwitzData::new(n0p, b0, b1, Some(t), blocks)
}

fn series_agree(a: &LaurentSeries<Rat>, b: &LaurentSeries<Rat>) -> Result<bool> {
    Ok(a.sub(b)?.is_empty())
}

// ---------------------------------------------------------------------
// series suite
// ---------------------------------------------------------------------

fn series_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();

    out.push(run_cases("series", "ring-laws", cases, |case| {
        let rng = &mut stream(seed, 0x0101 + case as u64);
        let center = random_center(rng);
        let f = random_series(rng, center.clone());
        let g = random_series(rng, center.clone());
        let h = random_series(rng, center);
        let comm_add = series_agree(&f.add(&g)?, &g.add(&f)?)?;
        let assoc_add = series_agree(&f.add(&g)?.add(&h)?, &f.add(&g.add(&h)?)?)?;
        let comm_mul = series_agree(&f.mul(&g)?, &g.mul(&f)?)?;
        let assoc_mul = series_agree(&f.mul(&g)?.mul(&h)?, &f.mul(&g.mul(&h)?)?)?;
        let distr = series_agree(&f.mul(&g.add(&h)?)?, &f.mul(&g)?.add(&f.mul(&h)?)?)?;
        if comm_add && assoc_add && comm_mul && assoc_mul && distr {
            Ok(None)
        } else {
            Ok(dump(case, "ring-laws", format!("f = {f}, g = {g}, h = {h}")))
        }
    }));

    out.push(run_cases("series", "invert-round-trip", cases, |case| {
        let rng = &mut stream(seed, 0x0102 + case as u64);
        let center = random_center(rng);
        let f = random_series(rng, center);
        let p = f.mul(&f.invert()?)?;
        for e in p.low()..p.order() {
            let want = if e == 0 { Rat::from_int(1) } else { Rat::from_int(0) };
            if p.coeff_int(e)? != want {
                return Ok(dump(case, "invert-round-trip", format!("f = {f}")));
            }
        }
        Ok(None)
    }));

    out.push(run_cases("series", "reversion-round-trip", cases, |case| {
        let rng = &mut stream(seed, 0x0103 + case as u64);
        // Monic at infinity: f(z(a)) must be the identity series a.
        let len = rng.gen_range(5..=9);
        let mut coeffs = vec![Rat::from_int(1)];
        for _ in 1..len {
            coeffs.push(random_rat(rng));
        }
        let f = LaurentSeries::from_parts(Center::Infinity, 1, -1, coeffs);
        let z = f.revert()?;
        let round = f.compose(&z)?;
        for e in round.low()..round.order() {
            let want = if e == -1 { Rat::from_int(1) } else { Rat::from_int(0) };
            if round.coeff_int(e)? != want {
                return Ok(dump(case, "reversion-round-trip", format!("f = {f}")));
            }
        }
        // A simple pole at a finite center: revert twice and compare.
        let mut pole = vec![random_nonzero(rng)];
        for _ in 1..len {
            pole.push(random_rat(rng));
        }
        let g = LaurentSeries::from_parts(Center::Finite(random_rat(rng)), 1, -1, pole);
        let back = g.revert()?.revert()?;
        let hi = back.order().min(g.order());
        for e in g.low()..hi {
            if back.coeff_int(e)? != g.coeff_int(e)? {
                return Ok(dump(case, "reversion-round-trip", format!("g = {g}")));
            }
        }
        Ok(None)
    }));

    out.push(run_cases("series", "derivative-leibniz", cases, |case| {
        let rng = &mut stream(seed, 0x0104 + case as u64);
        let center = random_center(rng);
        let f = random_series(rng, center.clone());
        let g = random_series(rng, center);
        let lhs = f.mul(&g)?.derive();
        let rhs = f.derive().mul(&g)?.add(&f.mul(&g.derive())?)?;
        if series_agree(&lhs, &rhs)? {
            Ok(None)
        } else {
            Ok(dump(case, "derivative-leibniz", format!("f = {f}, g = {g}")))
        }
    }));

    out.push(run_cases("series", "residue-of-derivative", cases, |case| {
        let rng = &mut stream(seed, 0x0105 + case as u64);
        let center = random_center(rng);
        let f = random_series(rng, center);
        if f.derive().residue()?.is_zero() {
            Ok(None)
        } else {
            Ok(dump(case, "residue-of-derivative", format!("f = {f}")))
        }
    }));

    out.push(run_cases("series", "power-consistency", cases, |case| {
        let rng = &mut stream(seed, 0x0106 + case as u64);
        let center = random_center(rng);
        let f = random_series(rng, center);
        let cube = series_agree(&f.pow_int(3)?, &f.mul(&f)?.mul(&f)?)?;
        let inv2 = series_agree(&f.pow_int(-2)?, &f.invert()?.mul(&f.invert()?)?)?;
        if cube && inv2 {
            Ok(None)
        } else {
            Ok(dump(case, "power-consistency", format!("f = {f}")))
        }
    }));

    out.push(run_cases("series", "jet-leibniz", cases, |case| {
        let rng = &mut stream(seed, 0x0107 + case as u64);
        let tag = 3u32;
        let jet_series = |rng: &mut ChaCha8Rng| {
            let low = rng.gen_range(-3..=1);
            let len = rng.gen_range(4..=7);
            let mut coeffs = vec![Jet::with_part(
                random_nonzero(rng),
                tag,
                random_rat(rng),
            )];
            for _ in 1..len {
                coeffs.push(Jet::with_part(random_rat(rng), tag, random_rat(rng)));
            }
            LaurentSeries::from_parts(Center::<Jet<Rat>>::Infinity, 1, low, coeffs)
        };
        let part_of = |s: &LaurentSeries<Jet<Rat>>| -> Result<LaurentSeries<Rat>> {
            let mut coeffs = Vec::new();
            for e in s.low()..s.order() {
                coeffs.push(s.coeff_int(e)?.part(tag));
            }
            Ok(LaurentSeries::from_parts(
                Center::Infinity,
                1,
                s.low(),
                coeffs,
            ))
        };
        let fj = jet_series(rng);
        let gj = jet_series(rng);
        let prod = fj.mul(&gj)?;
        let lhs = part_of(&prod)?;
        let rhs = part_of(&fj)?
            .mul(&strip(&gj))?
            .add(&strip(&fj).mul(&part_of(&gj)?)?)?;
        if series_agree(&lhs, &rhs)? {
            Ok(None)
        } else {
            Ok(dump(case, "jet-leibniz", format!("case {case}")))
        }
    }));

    out
}

// ---------------------------------------------------------------------
// ratfun suite
// ---------------------------------------------------------------------

fn ratfun_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();

    out.push(run_cases("ratfun", "residue-sum-zero", cases, |case| {
        let rng = &mut stream(seed, 0x0201 + case as u64);
        let f = random_rational(rng);
        if f.residue_sum().is_zero() {
            Ok(None)
        } else {
            Ok(dump(case, "residue-sum-zero", format!("f = {f}")))
        }
    }));

    out.push(run_cases("ratfun", "linearity", cases, |case| {
        let rng = &mut stream(seed, 0x0202 + case as u64);
        let f = random_rational(rng);
        let g = random_rational(rng);
        let c = random_rat(rng);
        // Probes outside −4..=4 can never hit a pole.
        let x = Rat::from_int(rng.gen_range(10..=30));
        let sum_ok = f.add(&g).eval_at(&x)? == f.eval_at(&x)?.add(&g.eval_at(&x)?);
        let scale_ok = f.scale(&c).eval_at(&x)? == c.mul(&f.eval_at(&x)?);
        let cancel_ok = f.sub(&f).is_zero();
        if sum_ok && scale_ok && cancel_ok {
            Ok(None)
        } else {
            Ok(dump(case, "linearity", format!("f = {f}, g = {g}, x = {x}")))
        }
    }));

    out.push(run_cases("ratfun", "derive-expand-commute", cases, |case| {
        let rng = &mut stream(seed, 0x0203 + case as u64);
        let f = random_rational(rng);
        let center = if rng.gen_bool(0.5) || f.parts.is_empty() {
            Center::Infinity
        } else {
            Center::Finite(f.parts[rng.gen_range(0..f.parts.len())].0.clone())
        };
        let known = match center {
            Center::Infinity => -8,
            Center::Finite(_) => 8,
        };
        let lhs = f.derive().expand_at(&center, known)?;
        let rhs = f.expand_at(&center, known)?.derive();
        if series_agree(&lhs, &rhs)? {
            Ok(None)
        } else {
            Ok(dump(case, "derive-expand-commute", format!("f = {f}")))
        }
    }));

    out.push(run_cases("ratfun", "reflect-involution", cases, |case| {
        let rng = &mut stream(seed, 0x0204 + case as u64);
        let f = random_rational(rng);
        let x = Rat::from_int(rng.gen_range(10..=30));
        let invol = f.reflect().reflect().sub(&f).is_zero();
        let pullback = f.reflect().eval_at(&x)? == f.eval_at(&x.neg())?;
        if invol && pullback {
            Ok(None)
        } else {
            Ok(dump(case, "reflect-involution", format!("f = {f}, x = {x}")))
        }
    }));

    out.push(run_cases("ratfun", "partial-fraction-resynthesis", cases, |case| {
        let rng = &mut stream(seed, 0x0205 + case as u64);
        let f = random_rational(rng);
        let mut rebuilt = GlobalRational::polynomial_part(&f.expand_at(&Center::Infinity, -1)?)?;
        for (loc, _) in &f.parts {
            let local = f.expand_at(&Center::Finite(loc.clone()), 1)?;
            rebuilt = rebuilt.add(&GlobalRational::principal_part_at(&local)?);
        }
        if rebuilt.sub(&f).is_zero() {
            Ok(None)
        } else {
            Ok(dump(case, "partial-fraction-resynthesis", format!("f = {f}")))
        }
    }));

    out.push(run_cases("ratfun", "residue-matches-expansion", cases, |case| {
        let rng = &mut stream(seed, 0x0206 + case as u64);
        let f = random_rational(rng);
        let mut centers = vec![Center::Infinity];
        for (loc, _) in &f.parts {
            centers.push(Center::Finite(loc.clone()));
        }
        for center in centers {
            let known = match center {
                Center::Infinity => -3,
                Center::Finite(_) => 3,
            };
            if f.residue_at(&center) != f.expand_at(&center, known)?.residue()? {
                return Ok(dump(case, "residue-matches-expansion", format!("f = {f}")));
            }
        }
        Ok(None)
    }));

    out
}

// ---------------------------------------------------------------------
// whitham suite
// ---------------------------------------------------------------------

fn sector_level(rng: &mut impl Rng, m: usize, pmax: usize) -> (Sector, usize) {
    match rng.gen_range(0..3) {
        0 => (Sector::E, rng.gen_range(0..=pmax)),
        1 => (Sector::H0(rng.gen_range(1..=m)), rng.gen_range(0..=pmax)),
        _ => (Sector::H1(rng.gen_range(1..=m)), 0),
    }
}

fn omega_values_match(a: &OmegaValue<Rat>, b: &OmegaValue<Rat>, antisym_log: bool) -> bool {
    match (a, b) {
        (OmegaValue::Scalar(x), OmegaValue::Scalar(y)) => x == y,
        (OmegaValue::Log(x), OmegaValue::Log(y)) => {
            if antisym_log {
                *x == y.neg()
            } else {
                x == y
            }
        }
        _ => false,
    }
}

fn whitham_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let n = heavy(cases);

    out.push(run_cases("whitham", "correlator-symmetry", n, |case| {
        let rng = &mut stream(seed, 0x0301 + case as u64);
        let m = rng.gen_range(1..=2);
        let pt = random_point(rng, m, 12)?;
        for _ in 0..6 {
            let (alpha, p) = sector_level(rng, m, 2);
            let (beta, q) = sector_level(rng, m, 2);
            let ab = omega(&pt, alpha, p, beta, q)?;
            let ba = omega(&pt, beta, q, alpha, p)?;
            // Logarithm arguments between distinct punctures negate
            // under exchange; everything else matches on the nose.
            let anti = matches!((alpha, beta),
                (Sector::H1(j), Sector::H1(k)) if j != k);
            if !omega_values_match(&ab, &ba, anti) {
                return Ok(dump(
                    case,
                    "correlator-symmetry",
                    format!("{alpha} {p} ; {beta} {q}: {ab} vs {ba}"),
                ));
            }
        }
        Ok(None)
    }));

    out.push(run_cases("whitham", "dual-path-agreement", n, |case| {
        let rng = &mut stream(seed, 0x0302 + case as u64);
        let m = rng.gen_range(1..=2);
        let pt = random_point(rng, m, 12)?;
        for _ in 0..6 {
            let (alpha, p) = sector_level(rng, m, 2);
            let (beta, q) = sector_level(rng, m, 2);
            let alt = match omega_alt(&pt, alpha, p, beta, q) {
                Ok(v) => v,
                Err(Error::Unsupported(_)) => continue,
                Err(e) => return Err(e),
            };
            let direct = omega(&pt, alpha, p, beta, q)?;
            if !omega_values_match(&direct, &alt, false) {
                return Ok(dump(
                    case,
                    "dual-path-agreement",
                    format!("{alpha} {p} ; {beta} {q}: {direct} vs {alt}"),
                ));
            }
        }
        Ok(None)
    }));

    out.push(run_cases("whitham", "dependence-window", n, |case| {
        let rng = &mut stream(seed, 0x0303 + case as u64);
        let m = rng.gen_range(1..=2);
        let width = 12usize;
        let uc = random_ucoords(rng, m, width);
        let pt = point_of_u(&uc)?;
        let (alpha, p) = sector_level(rng, m, 2);
        let (beta, q) = sector_level(rng, m, 2);
        let deps = dependence_indices(alpha, p, beta, q)?;
        let mut outside: Vec<(usize, usize)> = Vec::new();
        for j in 1..=uc.u0.len() {
            if !deps.contains(&(0, j)) {
                outside.push((0, j));
            }
        }
        for (k, uk) in uc.u.iter().enumerate() {
            for j in 0..uk.len() {
                if !deps.contains(&(k + 1, j)) {
                    outside.push((k + 1, j));
                }
            }
        }
        if outside.is_empty() {
            return Ok(None);
        }
        let (pi, pj) = outside[rng.gen_range(0..outside.len())];
        let mut u2 = UCoords {
            u0: uc.u0.clone(),
            u: uc.u.clone(),
        };
        let bump = Rat::from_int(rng.gen_range(1..=3));
        let slot = if pi == 0 {
            &mut u2.u0[pj - 1]
        } else {
            &mut u2.u[pi - 1][pj]
        };
        *slot = slot.add(&bump);
        if pi > 0 && pj == 1 && slot.is_zero() {
            *slot = slot.add(&Rat::from_int(1));
        }
        if pi > 0 && pj == 0 {
            // A moved puncture must not land on another one.
            let taken: Vec<Rat> = (0..m).filter(|&k| k != pi - 1).map(|k| uc.u[k][0].clone()).collect();
            while taken.contains(&u2.u[pi - 1][0]) {
                u2.u[pi - 1][0] = u2.u[pi - 1][0].add(&Rat::from_int(1));
            }
        }
        let pt2 = point_of_u(&u2)?;
        let before = omega(&pt, alpha, p, beta, q)?;
        let after = omega(&pt2, alpha, p, beta, q)?;
        if omega_values_match(&before, &after, false) {
            Ok(None)
        } else {
            Ok(dump(
                case,
                "dependence-window",
                format!("{alpha} {p} ; {beta} {q} perturbed at ({pi},{pj}): {before} vs {after}"),
            ))
        }
    }));

    out.push(run_cases("whitham", "flow-compatibility", n, |case| {
        let rng = &mut stream(seed, 0x0304 + case as u64);
        let m = rng.gen_range(1..=2);
        let small = |rng: &mut ChaCha8Rng| {
            Jet::with_part(
                random_rat(rng),
                TAG_X,
                Rat::from_int(rng.gen_range(-3..=3)),
            )
        };
        let mut terms = vec![(1i64, Jet::constant(Rat::from_int(1)))];
        for e in 1..=3 {
            terms.push((-e, small(rng)));
        }
        let lambda0 = LaurentSeries::from_terms(Center::Infinity, &terms, -16);
        let locs = distinct_locations(rng, m);
        let mut lambda = Vec::new();
        for phi in locs {
            let center = Center::Finite(Jet::with_part(
                Rat::from_int(phi),
                TAG_X,
                Rat::from_int(rng.gen_range(-3..=3)),
            ));
            let mut terms = vec![(-1i64, Jet::with_part(random_nonzero(rng), TAG_X, random_rat(rng)))];
            for e in 0..=2 {
                terms.push((e, small(rng)));
            }
            lambda.push(LaurentSeries::from_terms(center, &terms, 16));
        }
        let pt = WhithamPoint::new(lambda0, lambda)?;
        let (alpha, p) = sector_level(rng, m, 1);
        let (beta, q) = sector_level(rng, m, 1);
        let r = tau_flow_residual(&pt, alpha, p, beta, q, TAG_X)?;
        if r.is_zero() {
            Ok(None)
        } else {
            Ok(dump(
                case,
                "flow-compatibility",
                format!("{alpha} {p} ; {beta} {q}: residual {r}"),
            ))
        }
    }));

    out
}

// ---------------------------------------------------------------------
// hurwitz suite
// ---------------------------------------------------------------------

fn random_profile(rng: &mut impl Rng) -> Vec<usize> {
    match rng.gen_range(0..5) {
        0 => vec![rng.gen_range(2..=4)],
        1 => vec![2, 1],
        2 => vec![2, 2],
        3 => vec![3, 1],
        _ => vec![2, 1, 1],
    }
}

fn hurwitz_slots(data: &HurwitzData<Rat>) -> Vec<(usize, usize)> {
    let mut slots: Vec<(usize, usize)> = (1..data.n(0)).map(|j| (0, j)).collect();
    for k in 1..=data.m() {
        for j in 0..=data.n(k) {
            slots.push((k, j));
        }
    }
    slots
}

fn hurwitz_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let n = heavy(cases);

    out.push(run_cases("hurwitz", "table-symmetry", n, |case| {
        let rng = &mut stream(seed, 0x0401 + case as u64);
        let profile = random_profile(rng);
        let data = random_hurwitz(rng, &profile)?;
        let slots = hurwitz_slots(&data);
        for _ in 0..6 {
            let a = slots[rng.gen_range(0..slots.len())];
            let b = slots[rng.gen_range(0..slots.len())];
            let ab = omega_h(&data, a, b)?;
            let ba = omega_h(&data, b, a)?;
            let ok = match (&ab, &ba) {
                (HurwitzOmega::Scalar(x), HurwitzOmega::Scalar(y)) => x == y,
                (
                    HurwitzOmega::Log { scale: s1, arg: a1 },
                    HurwitzOmega::Log { scale: s2, arg: a2 },
                ) => s1 == s2 && if a == b { a1 == a2 } else { *a1 == a2.neg() },
                _ => false,
            };
            if !ok {
                return Ok(dump(
                    case,
                    "table-symmetry",
                    format!("slots {a:?} {b:?}: {ab:?} vs {ba:?}"),
                ));
            }
        }
        Ok(None)
    }));

    out.push(run_cases("hurwitz", "provable-rows-exact", n, |case| {
        let rng = &mut stream(seed, 0x0402 + case as u64);
        let profile = random_profile(rng);
        let data = random_hurwitz(rng, &profile)?;
        for row in stabilization_report(&data, 2, 2)? {
            if row.threshold_ok && row.deviation != 0.0 {
                return Ok(dump(
                    case,
                    "provable-rows-exact",
                    format!(
                        "{} ({},{};{},{}): deviation {}",
                        row.family, row.i, row.p, row.j, row.q, row.deviation
                    ),
                ));
            }
        }
        Ok(None)
    }));

    out.push(run_cases("hurwitz", "associativity", n, |case| {
        let rng = &mut stream(seed, 0x0403 + case as u64);
        let profile = if rng.gen_bool(0.5) { vec![2, 1] } else { vec![2, 2] };
        let data = random_hurwitz(rng, &profile)?;
        let res = wdvv_residual(&data)?;
        let sym = c_symmetry_defect(&c_tensor(&data)?);
        if res == 0.0 && sym == 0.0 {
            Ok(None)
        } else {
            Ok(dump(
                case,
                "associativity",
                format!("profile {profile:?}: wdvv {res}, symmetry {sym}"),
            ))
        }
    }));

    out.push(run_cases("hurwitz", "metric-constancy", n, |case| {
        let rng = &mut stream(seed, 0x0404 + case as u64);
        let profile = random_profile(rng);
        let a = random_hurwitz(rng, &profile)?;
        let b = random_hurwitz(rng, &profile)?;
        if metric_matrix(&a)? == metric_matrix(&b)? {
            Ok(None)
        } else {
            Ok(dump(case, "metric-constancy", format!("profile {profile:?}")))
        }
    }));

    out
}

// ---------------------------------------------------------------------
// open suite
// ---------------------------------------------------------------------

fn open_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let n = heavy(cases);

    out.push(run_cases("open", "provable-rows-exact", n, |case| {
        let rng = &mut stream(seed, 0x0501 + case as u64);
        let profile = random_profile(rng);
        let data = random_hurwitz(rng, &profile)?;
        for row in open_stabilization_report(&data, 3)? {
            if row.threshold_ok && row.max_coeff_dev != 0.0 {
                return Ok(dump(
                    case,
                    "provable-rows-exact",
                    format!("{} i={} p={}: deviation {}", row.family, row.i, row.p, row.max_coeff_dev),
                ));
            }
        }
        Ok(None)
    }));

    out.push(run_cases("open", "open-associativity", n, |case| {
        let rng = &mut stream(seed, 0x0502 + case as u64);
        let profile = if rng.gen_bool(0.5) { vec![2, 1] } else { vec![2, 2] };
        let data = random_hurwitz(rng, &profile)?;
        let s = Rat::from_int(rng.gen_range(11..=30));
        let res = open_wdvv_residual(&data, &s)?;
        if res == 0.0 {
            Ok(None)
        } else {
            Ok(dump(
                case,
                "open-associativity",
                format!("profile {profile:?}, s = {s}: residual {res}"),
            ))
        }
    }));

    out.push(run_cases("open", "mixed-partials", n, |case| {
        let rng = &mut stream(seed, 0x0503 + case as u64);
        let profile = random_profile(rng);
        let data = random_hurwitz(rng, &profile)?;
        let s = Rat::from_int(rng.gen_range(11..=30));
        let defect = open_mixed_partials_defect(&data, &s)?;
        if defect == 0.0 {
            Ok(None)
        } else {
            Ok(dump(case, "mixed-partials", format!("s = {s}: defect {defect}")))
        }
    }));

    out
}

// ---------------------------------------------------------------------
// even suite
// ---------------------------------------------------------------------

fn random_even_shape(rng: &mut impl Rng) -> (usize, usize, Vec<usize>) {
    let n0p = rng.gen_range(1..=2);
    let n1p = rng.gen_range(1..=2);
    let pairs = match rng.gen_range(0..3) {
        0 => vec![],
        1 => vec![rng.gen_range(1..=2)],
        _ => vec![1, rng.gen_range(1..=2)],
    };
    (n0p, n1p, pairs)
}

fn even_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let n = heavy(cases);

    out.push(run_cases("even", "parity", cases, |case| {
        let rng = &mut stream(seed, 0x0601 + case as u64);
        let (n0p, n1p, pairs) = random_even_shape(rng);
        let data = random_even(rng, n0p, n1p, &pairs)?;
        let full = expand_even(&data)?;
        check_even_data(&full)?;
        let rat = full.rational();
        if rat.reflect().sub(&rat).is_zero() {
            Ok(None)
        } else {
            Ok(dump(case, "parity", format!("profile ({n0p}; {n1p}, {pairs:?})")))
        }
    }));

    out.push(run_cases("even", "flat-constraints", n, |case| {
        let rng = &mut stream(seed, 0x0602 + case as u64);
        let (n0p, n1p, pairs) = random_even_shape(rng);
        let data = random_even(rng, n0p, n1p, &pairs)?;
        let full = expand_even(&data)?;
        let vc = flat_coords(&full)?;
        for (j, v) in vc.v0.iter().enumerate() {
            if (j + 1) % 2 == 0 && !v.is_zero() {
                return Ok(dump(case, "flat-constraints", format!("v0[{}] nonzero", j + 1)));
            }
        }
        for (j, v) in vc.v[0].iter().enumerate() {
            if j % 2 == 0 && !v.is_zero() {
                return Ok(dump(case, "flat-constraints", format!("central v[{j}] nonzero")));
            }
        }
        for k in 0..pairs.len() {
            let plus = &vc.v[1 + 2 * k];
            let minus = &vc.v[2 + 2 * k];
            for j in 0..plus.len() {
                if plus[j] != minus[j].neg() {
                    return Ok(dump(
                        case,
                        "flat-constraints",
                        format!("pair {} slot {j} does not mirror", k + 2),
                    ));
                }
            }
        }
        Ok(None)
    }));

    out.push(run_cases("even", "provable-rows-exact", n, |case| {
        let rng = &mut stream(seed, 0x0603 + case as u64);
        let (n0p, n1p, pairs) = random_even_shape(rng);
        let data = random_even(rng, n0p, n1p, &pairs)?;
        for row in even_stabilization_report(&data, 2, 2)? {
            if row.threshold_ok && row.deviation != 0.0 {
                return Ok(dump(
                    case,
                    "provable-rows-exact",
                    format!(
                        "{} ({},{};{},{}): deviation {}",
                        row.family, row.i, row.p, row.j, row.q, row.deviation
                    ),
                ));
            }
        }
        Ok(None)
    }));

    out.push(run_cases("even", "open-rows-exact", n, |case| {
        let rng = &mut stream(seed, 0x0604 + case as u64);
        let (n0p, n1p, pairs) = random_even_shape(rng);
        let data = random_even(rng, n0p, n1p, &pairs)?;
        for row in even_open_report(&data, 3)? {
            if row.threshold_ok && row.max_coeff_dev != 0.0 {
                return Ok(dump(
                    case,
                    "open-rows-exact",
                    format!("{} i={} p={}: deviation {}", row.family, row.i, row.p, row.max_coeff_dev),
                ));
            }
        }
        Ok(None)
    }));

    out
}

// ---------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------

/// Runs one named suite (or `"all"`). `cases` is the requested case count
/// per invariant; see the module docs for how table-building invariants
/// scale it down.
pub fn run_suite(name: &str, seed: u64, cases: usize) -> Result<Vec<CheckResult>> {
    match name {
        "series" => Ok(series_suite(seed, cases)),
        "ratfun" => Ok(ratfun_suite(seed, cases)),
        "whitham" => Ok(whitham_suite(seed, cases)),
        "hurwitz" => Ok(hurwitz_suite(seed, cases)),
        "open" => Ok(open_suite(seed, cases)),
        "even" => Ok(even_suite(seed, cases)),
        "all" => Ok(run_all(seed, cases)),
        other => Err(Error::Invalid(format!(
            "unknown suite '{other}': expected one of series, ratfun, whitham, hurwitz, open, even, all"
        ))),
    }
}

/// Runs every suite in order.
pub fn run_all(seed: u64, cases: usize) -> Vec<CheckResult> {
    SUITES
        .iter()
        .flat_map(|s| run_suite(s, seed, cases).expect("known suite"))
        .collect()
}
