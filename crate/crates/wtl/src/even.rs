//! Parity-symmetric reduction: superpotentials that are even functions of
//! `z`, moduli points fixed by the mirror `z ↦ −z`, the pairing tables of
//! the fixed locus, and the reduced stabilization and open comparisons.
//!
//! An even superpotential is stored through its `z²`-profile — a
//! polynomial in `z²`, a pole block in `z^{−2}`, and pole blocks in
//! `(z² − b)^{−1}` — and expanded into the generic machinery by partial
//! fractions. The expansion keeps both members of every mirror pair of
//! poles explicitly, with branch roots chosen in mirrored pairs `±ρ`, so
//! that every fractional-power computation downstream respects the
//! symmetry: the flat coordinates of the two members negate each other
//! slot by slot, and the surviving rows of the pairing tables are signed
//! combinations of the generic rows.

use crate::coeff::{factorial, Coeff};
use crate::hurwitz::{omega_h, zero_extension, HurwitzData, HurwitzOmega, HurwitzPole, StabRow};
use crate::open::{self, OpenStabRow};
use crate::series::LaurentSeries;
use crate::whitham::{omega, OmegaValue, Sector, WhithamPoint};
use crate::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// One mirror pair of poles, stored through its `z²`-profile: the block
/// contributes `Σ_j coeffs[j−1] (z² − loc2)^{−j}` to the superpotential.
/// `root` optionally fixes the square root of `loc2` (required on exact
/// backends whose elements have no square roots); `branch` optionally
/// fixes the branch root `ρ` with `ρ^{n′}` equal to the top principal
/// coefficient at the positive member `+√loc2` (required for fractional
/// powers when the depth `n′` is at least 2 and the backend cannot take
/// the root itself).
#[derive(Clone, Debug, PartialEq)]
pub struct EvenBlock<F> {
    pub loc2: F,
    pub coeffs: Vec<F>,
    pub root: Option<F>,
    pub branch: Option<F>,
}

/// An even superpotential
///
/// `λ(z) = z^{2n₀′} + Σ_{j<n₀′} b_{0,j} z^{2j} + Σ_{j≤n₁′} b_{1,j} z^{−2j}
///         + Σ_{i,j} b_{i,j} (z² − b_{i,0})^{−j}`,
///
/// an even function of `z`. The profile is written `(n₀′; n₁′, …, n_{m′}′)`;
/// expansion doubles the degree at infinity and the central depth and
/// splits every block into a mirror pair of poles at `±√b_{i,0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenHurwitzData<F: Coeff> {
    n0p: usize,
    b0: Vec<F>,
    b1: Vec<F>,
    root1: Option<F>,
    blocks: Vec<EvenBlock<F>>,
}

impl<F: Coeff> EvenHurwitzData<F> {
    /// Validates the profile: `b0` lists the `z^{2j}` coefficients for
    /// `j = 0..n₀′−1`, `b1` the `z^{−2j}` coefficients for `j = 1..=n₁′`
    /// (top nonzero), `root1` an optional branch root for the central
    /// fractional powers (`root1^{2n₁′}` must recover the top), and each
    /// block a mirror pair with nonzero squared location distinct from
    /// the others and from zero.
    pub fn new(
        n0p: usize,
        b0: Vec<F>,
        b1: Vec<F>,
        root1: Option<F>,
        blocks: Vec<EvenBlock<F>>,
    ) -> Result<Self> {
        if n0p == 0 {
            return Err(Error::Invalid(
                "the degree at infinity must be positive".into(),
            ));
        }
        if b0.len() != n0p {
            return Err(Error::Invalid(format!(
                "expected {} polynomial coefficients, got {}",
                n0p,
                b0.len()
            )));
        }
        if b1.is_empty() || b1.last().is_some_and(|c| c.is_zero()) {
            return Err(Error::Invalid(
                "the central block needs a nonzero top coefficient".into(),
            ));
        }
        for blk in &blocks {
            if blk.coeffs.is_empty() || blk.coeffs.last().is_some_and(|c| c.is_zero()) {
                return Err(Error::Invalid(
                    "every pair block needs a nonzero top coefficient".into(),
                ));
            }
            if blk.loc2.is_zero() {
                return Err(Error::Invalid(
                    "a vanishing squared location collides with the central pole".into(),
                ));
            }
            if let Some(r) = &blk.root {
                let sq = r.mul(r);
                if sq != blk.loc2 && sq.sub(&blk.loc2).mag() > 1e-12 * blk.loc2.mag().max(1.0) {
                    return Err(Error::Invalid(
                        "the supplied root does not square to the location".into(),
                    ));
                }
            }
        }
        for (i, a) in blocks.iter().enumerate() {
            for b in blocks.iter().skip(i + 1) {
                if a.loc2 == b.loc2 {
                    return Err(Error::Invalid(
                        "pair blocks must have distinct squared locations".into(),
                    ));
                }
            }
        }
        Ok(EvenHurwitzData {
            n0p,
            b0,
            b1,
            root1,
            blocks,
        })
    }

    /// Number of profile entries `m′` (1 plus the number of pair blocks).
    pub fn m_prime(&self) -> usize {
        1 + self.blocks.len()
    }

    /// Half-degree at infinity `n₀′`.
    pub fn n0_prime(&self) -> usize {
        self.n0p
    }

    /// Profile entry `n_i′` for `i = 1..=m′` (central half-depth, then
    /// pair depths).
    pub fn n_prime(&self, i: usize) -> usize {
        if i == 1 {
            self.b1.len()
        } else {
            self.blocks[i - 2].coeffs.len()
        }
    }

    /// The `z^{2j}` coefficients, ascending in `j`.
    pub fn b0(&self) -> &[F] {
        &self.b0
    }

    /// The `z^{−2j}` coefficients, ascending in `j ≥ 1`.
    pub fn b1(&self) -> &[F] {
        &self.b1
    }

    /// The optional central branch root.
    pub fn root1(&self) -> Option<&F> {
        self.root1.as_ref()
    }

    /// The mirror pair blocks, in order.
    pub fn blocks(&self) -> &[EvenBlock<F>] {
        &self.blocks
    }

    /// Dimension of the fixed locus: `Σ n_i′ + m′ − 1`.
    pub fn dim(&self) -> usize {
        let mut d = self.n0p + self.b1.len();
        for blk in &self.blocks {
            d += blk.coeffs.len() + 1;
        }
        d
    }
}

/// Binomial coefficient `C(n, k)` as a backend element.
fn binom<F: Coeff>(n: i64, k: i64) -> F {
    let mut acc = F::one();
    for t in 1..=k {
        acc = acc.mul(&F::from_ratio(n - k + t, t));
    }
    acc
}

/// The square root of a block's squared location: the stored one, or the
/// backend's principal root.
fn sqrt_loc<F: Coeff>(blk: &EvenBlock<F>) -> Result<F> {
    match &blk.root {
        Some(r) => Ok(r.clone()),
        None => blk.loc2.nth_root(2),
    }
}

/// Expands the `z²`-profile into a generic superpotential by partial
/// fractions. Each block `Σ_j b_j (z² − b₀)^{−j}` splits over the two
/// simple factors of `z² − b₀ = (z − r)(z + r)`:
///
/// `(z² − b₀)^{−j} = Σ_{t=1}^{j} (−1)^{j−t} C(2j−t−1, j−t) (2r)^{t−2j}
///                   [(z − r)^{−t} + (−1)^t (z + r)^{−t}]`,
///
/// with no polynomial remainder. The pole list is: the central pole at 0
/// (even depths only), then for each block the positive member followed
/// by the negative member. Both members always carry explicit branch
/// roots `±ρ`, so the local inverse series at the two members are exact
/// negatives of each other.
pub fn expand_even<F: Coeff>(data: &EvenHurwitzData<F>) -> Result<HurwitzData<F>> {
    let n0 = 2 * data.n0p;
    let mut a0 = vec![F::zero(); n0 - 1];
    for (j, c) in data.b0.iter().enumerate() {
        a0[2 * j] = c.clone();
    }
    let n1 = 2 * data.b1.len();
    let mut c1 = vec![F::zero(); n1];
    for (j, c) in data.b1.iter().enumerate() {
        c1[2 * j + 1] = c.clone();
    }
    let mut poles = vec![HurwitzPole {
        loc: F::zero(),
        coeffs: c1,
        root: data.root1.clone(),
    }];
    for blk in &data.blocks {
        let r = sqrt_loc(blk)?;
        let np = blk.coeffs.len();
        let two_r = r.add(&r);
        let mut plus = Vec::with_capacity(np);
        for t in 1..=np as i64 {
            let mut acc = F::zero();
            for j in t..=np as i64 {
                let term = blk.coeffs[j as usize - 1]
                    .mul(&binom::<F>(2 * j - t - 1, j - t))
                    .mul(&two_r.pow_int(t - 2 * j)?);
                acc = if (j - t) % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            plus.push(acc);
        }
        let minus: Vec<F> = plus
            .iter()
            .enumerate()
            .map(|(idx, c)| if idx % 2 == 1 { c.clone() } else { c.neg() })
            .collect();
        let top = plus[np - 1].clone();
        let rho = match &blk.branch {
            Some(b) => {
                let pw = b.pow_int(np as i64)?;
                if pw != top && pw.sub(&top).mag() > 1e-12 * top.mag().max(1.0) {
                    return Err(Error::Invalid(
                        "the supplied branch root does not recover the top principal coefficient"
                            .into(),
                    ));
                }
                b.clone()
            }
            None => top.nth_root(np as u32)?,
        };
        poles.push(HurwitzPole {
            loc: r.clone(),
            coeffs: plus,
            root: Some(rho.clone()),
        });
        poles.push(HurwitzPole {
            loc: r.neg(),
            coeffs: minus,
            root: Some(rho.neg()),
        });
    }
    HurwitzData::new(n0, a0, poles)
}

/// The superpotential `λ(−z)` of the same shape. Defined for even degree
/// at infinity (otherwise the reflection breaks the monic normalization).
/// Pole order is preserved: each pole moves to the negated location with
/// depth-alternating coefficient signs, and a stored branch root maps to
/// its negative — the branch of the reflected function induced by the
/// original branch.
pub fn reflect_data<F: Coeff>(data: &HurwitzData<F>) -> Result<HurwitzData<F>> {
    let n0 = data.n(0);
    if n0 % 2 != 0 {
        return Err(Error::Invalid(
            "reflection keeps the normalization only for even degree at infinity".into(),
        ));
    }
    let a0 = data
        .a0()
        .iter()
        .enumerate()
        .map(|(l, c)| if l % 2 == 1 { c.neg() } else { c.clone() })
        .collect();
    let mut poles = Vec::new();
    for i in 1..=data.m() {
        let p = data.pole(i)?;
        let coeffs = p
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| if idx % 2 == 0 { c.neg() } else { c.clone() })
            .collect();
        poles.push(HurwitzPole {
            loc: p.loc.neg(),
            coeffs,
            root: p.root.as_ref().map(|r| r.neg()),
        });
    }
    HurwitzData::new(n0, a0, poles)
}

/// Verifies that a superpotential is an even function, `λ(z) = λ(−z)`,
/// in the canonical layout produced by [`expand_even`]: even degree at
/// infinity with vanishing odd polynomial coefficients; the first pole
/// central at `z = 0`, of even depth, with vanishing odd-depth
/// coefficients; the remaining poles in adjacent mirror pairs
/// `(2, 3), (4, 5), …` with negated locations, depth-alternating
/// coefficients, and mirrored branch roots (required explicitly whenever
/// the pair depth is at least 2, so that fractional powers stay
/// symmetric).
pub fn check_even_data<F: Coeff>(data: &HurwitzData<F>) -> Result<()> {
    if data.n(0) % 2 != 0 {
        return Err(Error::Invalid(
            "an even superpotential has even degree at infinity".into(),
        ));
    }
    for (l, c) in data.a0().iter().enumerate() {
        if l % 2 == 1 && !c.is_zero() {
            return Err(Error::Invalid(
                "odd polynomial coefficients must vanish".into(),
            ));
        }
    }
    if data.m() % 2 != 1 {
        return Err(Error::Invalid(
            "an even superpotential has an odd number of poles (central plus mirror pairs)".into(),
        ));
    }
    let central = data.pole(1)?;
    if !central.loc.is_zero() {
        return Err(Error::Invalid("the first pole must sit at the origin".into()));
    }
    if central.coeffs.len() % 2 != 0 {
        return Err(Error::Invalid("the central pole must have even depth".into()));
    }
    for (idx, c) in central.coeffs.iter().enumerate() {
        if idx % 2 == 0 && !c.is_zero() {
            return Err(Error::Invalid(
                "odd-depth central coefficients must vanish".into(),
            ));
        }
    }
    for k in (2..data.m()).step_by(2) {
        let p = data.pole(k)?;
        let q = data.pole(k + 1)?;
        if !q.loc.add(&p.loc).is_zero() {
            return Err(Error::Invalid(
                "mirror pair locations must be negatives of each other".into(),
            ));
        }
        if p.coeffs.len() != q.coeffs.len() {
            return Err(Error::Invalid("mirror pair depths must agree".into()));
        }
        for (idx, c) in p.coeffs.iter().enumerate() {
            let want = if idx % 2 == 1 { c.clone() } else { c.neg() };
            if q.coeffs[idx] != want {
                return Err(Error::Invalid(
                    "mirror pair coefficients must alternate in sign with depth".into(),
                ));
            }
        }
        match (&p.root, &q.root) {
            (Some(a), Some(b)) => {
                if !a.add(b).is_zero() {
                    return Err(Error::Invalid(
                        "mirror branch roots must be negatives of each other".into(),
                    ));
                }
            }
            (None, None) => {
                if p.coeffs.len() >= 2 {
                    return Err(Error::Invalid(
                        "mirror pairs of depth at least 2 need explicit branch roots".into(),
                    ));
                }
            }
            _ => {
                return Err(Error::Invalid(
                    "mirror pair members must both carry a branch root or neither".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Verifies that a moduli point lies on the mirror-fixed locus: the
/// series at infinity and the central series are odd functions of `z`
/// (`−λ₀(z) = λ₀(−z)`, central puncture at the origin with
/// `−λ₁(z) = λ₁(−z)`), and the remaining punctures form adjacent mirror
/// pairs with `λ_{2j−1}(z) = λ_{2j−2}(−z)` coefficient by coefficient
/// over the shared window.
pub fn check_even_point<F: Coeff>(pt: &WhithamPoint<F>) -> Result<()> {
    let l0 = pt.lambda0();
    for e in l0.low()..l0.order() {
        if e % 2 == 0 && !l0.coeff_int(e)?.is_zero() {
            return Err(Error::Invalid(
                "the series at infinity must be an odd function of z".into(),
            ));
        }
    }
    if pt.m() % 2 != 1 {
        return Err(Error::Invalid(
            "a mirror-fixed point has an odd number of punctures".into(),
        ));
    }
    if !pt.phi(1)?.is_zero() {
        return Err(Error::Invalid(
            "the first puncture must sit at the origin".into(),
        ));
    }
    let l1 = pt.lambda_at(1)?;
    for e in l1.low()..l1.order() {
        if e % 2 == 0 && !l1.coeff_int(e)?.is_zero() {
            return Err(Error::Invalid(
                "the central series must be an odd function of z".into(),
            ));
        }
    }
    let mp = (pt.m() + 1) / 2;
    for k in 2..=mp {
        let a = pt.lambda_at(2 * k - 2)?;
        let b = pt.lambda_at(2 * k - 1)?;
        if !pt.phi(2 * k - 1)?.add(pt.phi(2 * k - 2)?).is_zero() {
            return Err(Error::Invalid(
                "mirror punctures must sit at negated locations".into(),
            ));
        }
        let hi = a.order().min(b.order());
        for e in a.low().max(b.low())..hi {
            let c = a.coeff_int(e)?;
            let want = if e.rem_euclid(2) == 0 { c } else { c.neg() };
            if b.coeff_int(e)? != want {
                return Err(Error::Invalid(
                    "mirror puncture series must match under z ↦ −z".into(),
                ));
            }
        }
    }
    Ok(())
}

/// A moduli point on the mirror-fixed locus, validated at construction.
#[derive(Clone, Debug)]
pub struct EvenWhithamPoint<F: Coeff>(WhithamPoint<F>);

impl<F: Coeff> EvenWhithamPoint<F> {
    pub fn new(pt: WhithamPoint<F>) -> Result<Self> {
        check_even_point(&pt)?;
        Ok(EvenWhithamPoint(pt))
    }

    /// The underlying point.
    pub fn point(&self) -> &WhithamPoint<F> {
        &self.0
    }

    /// Number of puncture families on the fixed locus (central plus
    /// pairs): `m′ = (m + 1)/2`.
    pub fn m_prime(&self) -> usize {
        (self.0.m() + 1) / 2
    }
}

/// The squared-series transform identifying the fixed locus with series
/// in `z²`: returns `(λ₀², λ₁²)` after checking the point is
/// mirror-fixed, and verifies both squares are even series. Used as a
/// validation transform only; the reduced tables are computed on the
/// unsquared series.
pub fn hat_transform<F: Coeff>(
    pt: &WhithamPoint<F>,
) -> Result<(LaurentSeries<F>, LaurentSeries<F>)> {
    check_even_point(pt)?;
    let h0 = pt.lambda0().pow_int(2)?;
    let h1 = pt.lambda_at(1)?.pow_int(2)?;
    for s in [&h0, &h1] {
        for e in s.low()..s.order() {
            if e.rem_euclid(2) == 1 && !s.coeff_int(e)?.is_zero() {
                return Err(Error::Invalid(
                    "the squared series failed the parity check".into(),
                ));
            }
        }
    }
    Ok((h0, h1))
}

/// A flat slot of the reduced rational-side table: a surviving odd slot
/// at infinity or at the central pole, or a difference slot of a mirror
/// pair (`j = n_k′` is the pair's logarithmic slot).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvenIndex {
    /// `v_{0,j}` with `j` odd.
    Inf(usize),
    /// `v_{1,j}` with `j` odd.
    Central(usize),
    /// The difference slot of pair `k = 2..=m′` at depth `j = 0..=n_k′`.
    Pair(usize, usize),
}

impl fmt::Display for EvenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvenIndex::Inf(j) => write!(f, "v0({j})"),
            EvenIndex::Central(j) => write!(f, "v1({j})"),
            EvenIndex::Pair(k, j) => write!(f, "pair({k},{j})"),
        }
    }
}

/// Flow family of the reduced puncture-side table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvenSector {
    /// The puncture at infinity (even levels only).
    E,
    /// The descendent family at the central puncture (even levels only).
    H10,
    /// The difference family of pair `k = 2..=m′` (all levels).
    Pair(usize),
    /// The logarithmic difference family of pair `k` (level 0 only).
    PairLog(usize),
}

impl fmt::Display for EvenSector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvenSector::E => write!(f, "e"),
            EvenSector::H10 => write!(f, "h0(1)"),
            EvenSector::Pair(k) => write!(f, "pair({k})"),
            EvenSector::PairLog(k) => write!(f, "plog({k})"),
        }
    }
}

fn parse_args(s: &str, prefix: &str) -> Option<Vec<usize>> {
    let rest = s
        .strip_prefix(prefix)?
        .strip_prefix('(')?
        .strip_suffix(')')?;
    rest.split(',')
        .map(|t| t.trim().parse::<usize>().ok())
        .collect()
}

impl FromStr for EvenSector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" {
            return Ok(EvenSector::E);
        }
        if s == "h0(1)" {
            return Ok(EvenSector::H10);
        }
        if let Some(a) = parse_args(s, "pair") {
            if a.len() == 1 {
                return Ok(EvenSector::Pair(a[0]));
            }
        }
        if let Some(a) = parse_args(s, "plog") {
            if a.len() == 1 {
                return Ok(EvenSector::PairLog(a[0]));
            }
        }
        Err(Error::Parse(format!(
            "unknown reduced sector '{s}': expected e, h0(1), pair(k), or plog(k)"
        )))
    }
}

impl FromStr for EvenIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(a) = parse_args(s, "v0") {
            if a.len() == 1 {
                return Ok(EvenIndex::Inf(a[0]));
            }
        }
        if let Some(a) = parse_args(s, "v1") {
            if a.len() == 1 {
                return Ok(EvenIndex::Central(a[0]));
            }
        }
        if let Some(a) = parse_args(s, "pair") {
            if a.len() == 2 {
                return Ok(EvenIndex::Pair(a[0], a[1]));
            }
        }
        Err(Error::Parse(format!(
            "unknown reduced slot '{s}': expected v0(j), v1(j), or pair(k,j)"
        )))
    }
}

/// The generic flat slots a reduced slot combines, with signs: a single
/// positive slot for the surviving odd slots, the signed pair of member
/// slots for a difference slot.
fn h_slots<F: Coeff>(
    data: &EvenHurwitzData<F>,
    idx: EvenIndex,
) -> Result<Vec<((usize, usize), bool)>> {
    match idx {
        EvenIndex::Inf(j) => {
            let n0 = 2 * data.n0_prime();
            if j % 2 == 0 || j >= n0 {
                return Err(Error::Invalid(format!(
                    "v0({j}) is not a slot of the fixed locus: odd 1..={} required",
                    n0 - 1
                )));
            }
            Ok(vec![((0, j), true)])
        }
        EvenIndex::Central(j) => {
            let n1 = 2 * data.n_prime(1);
            if j % 2 == 0 || j >= n1 {
                return Err(Error::Invalid(format!(
                    "v1({j}) is not a slot of the fixed locus: odd 1..={} required",
                    n1 - 1
                )));
            }
            Ok(vec![((1, j), true)])
        }
        EvenIndex::Pair(k, j) => {
            if k < 2 || k > data.m_prime() {
                return Err(Error::Invalid(format!(
                    "no pair {k}: pairs range over 2..={}",
                    data.m_prime()
                )));
            }
            let np = data.n_prime(k);
            if j > np {
                return Err(Error::Invalid(format!(
                    "pair({k},{j}) out of range: depths run 0..={np}"
                )));
            }
            Ok(vec![((2 * k - 2, j), true), ((2 * k - 1, j), false)])
        }
    }
}

/// Is the slot the logarithmic slot of a pair?
fn is_pair_log<F: Coeff>(data: &EvenHurwitzData<F>, idx: EvenIndex) -> bool {
    matches!(idx, EvenIndex::Pair(k, j) if k >= 2 && k <= data.m_prime() && j == data.n_prime(k))
}

/// The reduced rational-side pairing on an already expanded
/// superpotential: signed combination of the generic entries over the
/// member slots. Logarithmic entries combine multiplicatively on the
/// arguments (all member entries share the scale because paired poles
/// have equal depth).
fn omega_even_h_on<F: Coeff>(
    full: &HurwitzData<F>,
    data: &EvenHurwitzData<F>,
    a: EvenIndex,
    b: EvenIndex,
) -> Result<HurwitzOmega<F>> {
    let sa = h_slots(data, a)?;
    let sb = h_slots(data, b)?;
    if is_pair_log(data, a) && is_pair_log(data, b) {
        let mut num = F::one();
        let mut den = F::one();
        let mut scale = 1i64;
        for (slot_a, pos_a) in &sa {
            for (slot_b, pos_b) in &sb {
                match omega_h(full, *slot_a, *slot_b)? {
                    HurwitzOmega::Log { scale: s, arg } => {
                        scale = s;
                        if pos_a == pos_b {
                            num = num.mul(&arg);
                        } else {
                            den = den.mul(&arg);
                        }
                    }
                    HurwitzOmega::Scalar(_) => {
                        return Err(Error::Invalid("expected a logarithmic entry".into()))
                    }
                }
            }
        }
        let arg = num.div(&den)?;
        if arg.is_zero() {
            return Err(Error::Invalid("vanishing logarithm argument".into()));
        }
        Ok(HurwitzOmega::Log { scale, arg })
    } else {
        let mut acc = F::zero();
        for (slot_a, pos_a) in &sa {
            for (slot_b, pos_b) in &sb {
                let v = omega_h(full, *slot_a, *slot_b)?.scalar()?.clone();
                acc = if pos_a == pos_b {
                    acc.add(&v)
                } else {
                    acc.sub(&v)
                };
            }
        }
        Ok(HurwitzOmega::Scalar(acc))
    }
}

/// The reduced second-derivative table of the fixed locus, rational
/// side: `Ω^{even}` at two reduced slots. Slots at infinity and at the
/// central pole keep their generic values; a difference slot contributes
/// the signed two-term (one pair leg) or four-term (two pair legs)
/// combination of generic entries.
pub fn omega_even_h<F: Coeff>(
    data: &EvenHurwitzData<F>,
    a: EvenIndex,
    b: EvenIndex,
) -> Result<HurwitzOmega<F>> {
    let full = expand_even(data)?;
    omega_even_h_on(&full, data, a, b)
}

fn level_guard(s: EvenSector, p: usize) -> Result<()> {
    match s {
        EvenSector::E | EvenSector::H10 if p % 2 != 0 => Err(Error::Unsupported(
            "only even levels descend to the fixed locus at infinity and at the central puncture"
                .into(),
        )),
        EvenSector::PairLog(_) if p > 0 => Err(Error::Unsupported(
            "the logarithmic pair family carries level 0 only".into(),
        )),
        _ => Ok(()),
    }
}

fn sector_rank(s: EvenSector) -> u8 {
    match s {
        EvenSector::E | EvenSector::H10 => 0,
        EvenSector::Pair(_) => 1,
        EvenSector::PairLog(_) => 2,
    }
}

fn base_sector(s: EvenSector) -> Option<Sector> {
    match s {
        EvenSector::E => Some(Sector::E),
        EvenSector::H10 => Some(Sector::H0(1)),
        _ => None,
    }
}

fn pair_members(m: usize, k: usize) -> Result<(usize, usize)> {
    let mp = (m + 1) / 2;
    if k < 2 || k > mp {
        return Err(Error::Invalid(format!(
            "no puncture pair {k}: pairs range over 2..={mp}"
        )));
    }
    Ok((2 * k - 2, 2 * k - 1))
}

fn scalar_of<F: Coeff>(v: &OmegaValue<F>) -> Result<F> {
    v.scalar()
        .cloned()
        .ok_or_else(|| Error::Unsupported("entry is a formal logarithm, not a scalar".into()))
}

fn log_of<F: Coeff>(v: &OmegaValue<F>) -> Result<F> {
    v.log_arg()
        .cloned()
        .ok_or_else(|| Error::Invalid("expected a logarithmic entry".into()))
}

fn omega_even_m_unchecked<F: Coeff>(
    pt: &WhithamPoint<F>,
    alpha: EvenSector,
    p: usize,
    beta: EvenSector,
    q: usize,
) -> Result<OmegaValue<F>> {
    level_guard(alpha, p)?;
    level_guard(beta, q)?;
    if sector_rank(alpha) > sector_rank(beta) {
        return omega_even_m_unchecked(pt, beta, q, alpha, p);
    }
    use EvenSector::{Pair, PairLog};
    match (alpha, beta) {
        (EvenSector::E | EvenSector::H10, EvenSector::E | EvenSector::H10) => omega(
            pt,
            base_sector(alpha).expect("base sector"),
            p,
            base_sector(beta).expect("base sector"),
            q,
        ),
        (EvenSector::E | EvenSector::H10, Pair(k)) => {
            let (kp, km) = pair_members(pt.m(), k)?;
            let a = base_sector(alpha).expect("base sector");
            let plus = scalar_of(&omega(pt, a, p, Sector::H0(kp), q)?)?;
            let minus = scalar_of(&omega(pt, a, p, Sector::H0(km), q)?)?;
            Ok(OmegaValue::Scalar(plus.sub(&minus)))
        }
        (EvenSector::E | EvenSector::H10, PairLog(k)) => {
            let (kp, km) = pair_members(pt.m(), k)?;
            let a = base_sector(alpha).expect("base sector");
            let plus = scalar_of(&omega(pt, a, p, Sector::H1(kp), 0)?)?;
            let minus = scalar_of(&omega(pt, a, p, Sector::H1(km), 0)?)?;
            Ok(OmegaValue::Scalar(plus.sub(&minus)))
        }
        (Pair(k), Pair(l)) => {
            let (kp, km) = pair_members(pt.m(), k)?;
            let (lp, lm) = pair_members(pt.m(), l)?;
            let pp = scalar_of(&omega(pt, Sector::H0(kp), p, Sector::H0(lp), q)?)?;
            let pm = scalar_of(&omega(pt, Sector::H0(kp), p, Sector::H0(lm), q)?)?;
            let mp = scalar_of(&omega(pt, Sector::H0(km), p, Sector::H0(lp), q)?)?;
            let mm = scalar_of(&omega(pt, Sector::H0(km), p, Sector::H0(lm), q)?)?;
            Ok(OmegaValue::Scalar(pp.sub(&pm).sub(&mp).add(&mm)))
        }
        (Pair(k), PairLog(l)) => {
            let (kp, km) = pair_members(pt.m(), k)?;
            let (lp, lm) = pair_members(pt.m(), l)?;
            let pp = scalar_of(&omega(pt, Sector::H0(kp), p, Sector::H1(lp), 0)?)?;
            let pm = scalar_of(&omega(pt, Sector::H0(kp), p, Sector::H1(lm), 0)?)?;
            let mp = scalar_of(&omega(pt, Sector::H0(km), p, Sector::H1(lp), 0)?)?;
            let mm = scalar_of(&omega(pt, Sector::H0(km), p, Sector::H1(lm), 0)?)?;
            Ok(OmegaValue::Scalar(pp.sub(&pm).sub(&mp).add(&mm)))
        }
        (PairLog(k), PairLog(l)) => {
            let (kp, km) = pair_members(pt.m(), k)?;
            let (lp, lm) = pair_members(pt.m(), l)?;
            let pp = log_of(&omega(pt, Sector::H1(kp), 0, Sector::H1(lp), 0)?)?;
            let pm = log_of(&omega(pt, Sector::H1(kp), 0, Sector::H1(lm), 0)?)?;
            let mp = log_of(&omega(pt, Sector::H1(km), 0, Sector::H1(lp), 0)?)?;
            let mm = log_of(&omega(pt, Sector::H1(km), 0, Sector::H1(lm), 0)?)?;
            let arg = pp.mul(&mm).div(&pm.mul(&mp))?;
            if arg.is_zero() {
                return Err(Error::Invalid("vanishing logarithm argument".into()));
            }
            Ok(OmegaValue::Log(arg))
        }
        _ => unreachable!("argument order is canonicalized above"),
    }
}

/// The reduced second-derivative table of the fixed locus, puncture
/// side: `Ω^{even}` of two reduced flow families at a mirror-fixed
/// point. The point's symmetry constraints are checked before any
/// computation. Families at infinity and at the central puncture keep
/// their generic values at even levels; difference families contribute
/// signed two-term or four-term combinations, and two logarithmic pair
/// legs combine multiplicatively on the arguments.
pub fn omega_even_m<F: Coeff>(
    pt: &WhithamPoint<F>,
    alpha: EvenSector,
    p: usize,
    beta: EvenSector,
    q: usize,
) -> Result<OmegaValue<F>> {
    check_even_point(pt)?;
    omega_even_m_unchecked(pt, alpha, p, beta, q)
}

/// One flow family of the reduced dictionary, with the data needed to
/// form its rows.
struct SigmaFamily {
    /// Reduced flow label: 0 at infinity, 1 central, `2k−2` for pair `k`.
    label: usize,
    sector: EvenSector,
    /// `Some(k)` for the pair families.
    pair: Option<usize>,
    /// Weight entering slots, rescaling, and thresholds: `n₀`, `n₁`, or
    /// `n_k′`.
    nscale: usize,
}

impl SigmaFamily {
    /// Levels with existing slots, capped at `cap`: odd levels for the
    /// families at infinity and at the central pole, all levels for the
    /// pair families.
    fn levels(&self, cap: usize) -> Vec<usize> {
        let top = match self.pair {
            None if self.label == 0 => self.nscale - 1,
            None => self.nscale,
            Some(_) => self.nscale,
        };
        (1..=cap.min(top))
            .filter(|p| self.pair.is_some() || p % 2 == 1)
            .collect()
    }

    fn slot(&self, p: usize) -> EvenIndex {
        match self.pair {
            None if self.label == 0 => EvenIndex::Inf(self.nscale - p),
            None => EvenIndex::Central(self.nscale - p),
            Some(k) => EvenIndex::Pair(k, self.nscale - p),
        }
    }
}

fn scalar_family(a: &SigmaFamily, b: &SigmaFamily) -> &'static str {
    match (a.pair, b.pair) {
        (None, None) => match (a.label.min(b.label), a.label.max(b.label)) {
            (0, 0) => "ee",
            (0, 1) => "e-h1",
            _ => "h1-h1",
        },
        (None, Some(_)) => {
            if a.label == 0 {
                "e-pair"
            } else {
                "h1-pair"
            }
        }
        (Some(_), None) => {
            if b.label == 0 {
                "e-pair"
            } else {
                "h1-pair"
            }
        }
        (Some(k), Some(l)) => {
            if k == l {
                "pair-pair-same"
            } else {
                "pair-pair-cross"
            }
        }
    }
}

/// Inherited truncation threshold of a scalar row: the conjunction of
/// the generic thresholds of the combined entries.
fn scalar_threshold(a: &SigmaFamily, p: usize, b: &SigmaFamily, q: usize) -> bool {
    match (a.pair, b.pair) {
        (None, None) => match (a.label, b.label) {
            (0, 0) => a.nscale >= p + q,
            (1, 1) => a.nscale >= p + q + 1,
            _ => a.nscale >= p && b.nscale >= q,
        },
        (Some(k), Some(l)) if k == l => a.nscale >= p + q + 1,
        _ => a.nscale >= p && b.nscale >= q,
    }
}

/// Compares the reduced rational-side table against the reduced
/// puncture-side table on the zero-extension of the flat coordinates,
/// one row per pair of reduced flows with levels up to `pmax`/`qmax`
/// (odd levels at infinity and at the central pole, all levels for pair
/// families, level 0 for the logarithmic rows):
///
/// `(1/(n_i n_j)) Ω^{even}_H` against `(p−1)!(q−1)! Ω^{even}_M`.
///
/// Rows above the inherited truncation thresholds are provably exact;
/// logarithmic rows compare the logarithm arguments and are exact
/// unconditionally. The zero-extension of an even superpotential is
/// itself mirror-fixed, which is re-checked before any row is formed.
pub fn even_stabilization_report<F: Coeff>(
    data: &EvenHurwitzData<F>,
    pmax: usize,
    qmax: usize,
) -> Result<Vec<StabRow<F>>> {
    let full = expand_even(data)?;
    let mpt = zero_extension(&full, pmax + qmax)?;
    check_even_point(&mpt)?;
    let mp = data.m_prime();
    let mut fams = vec![
        SigmaFamily {
            label: 0,
            sector: EvenSector::E,
            pair: None,
            nscale: 2 * data.n0_prime(),
        },
        SigmaFamily {
            label: 1,
            sector: EvenSector::H10,
            pair: None,
            nscale: 2 * data.n_prime(1),
        },
    ];
    for k in 2..=mp {
        fams.push(SigmaFamily {
            label: 2 * k - 2,
            sector: EvenSector::Pair(k),
            pair: Some(k),
            nscale: data.n_prime(k),
        });
    }
    let fct = |p: usize| factorial::<F>(p as u64 - 1);
    let mut rows = Vec::new();
    for (fi, fa) in fams.iter().enumerate() {
        for fb in fams.iter().skip(fi) {
            for &p in &fa.levels(pmax) {
                for &q in &fb.levels(qmax) {
                    let lhs = omega_even_h_on(&full, data, fa.slot(p), fb.slot(q))?
                        .scalar()?
                        .mul(&F::from_ratio(1, (fa.nscale * fb.nscale) as i64));
                    let rv = omega_even_m_unchecked(&mpt, fa.sector, p - 1, fb.sector, q - 1)?;
                    let rhs = scalar_of(&rv)?.mul(&fct(p)).mul(&fct(q));
                    rows.push(StabRow::new(
                        scalar_family(fa, fb),
                        (fa.label, p, fb.label, q),
                        scalar_threshold(fa, p, fb, q),
                        lhs,
                        rhs,
                    ));
                }
            }
        }
    }
    for fa in &fams {
        for &p in &fa.levels(pmax) {
            for l in 2..=mp {
                let nl = data.n_prime(l);
                let lhs = omega_even_h_on(&full, data, fa.slot(p), EvenIndex::Pair(l, nl))?
                    .scalar()?
                    .mul(&F::from_ratio(1, (fa.nscale * nl) as i64));
                let rv =
                    omega_even_m_unchecked(&mpt, fa.sector, p - 1, EvenSector::PairLog(l), 0)?;
                let rhs = scalar_of(&rv)?.mul(&fct(p));
                let (name, ok) = match fa.pair {
                    None if fa.label == 0 => ("e-plog", fa.nscale >= p + 1),
                    None => ("h1-plog", fa.nscale >= p),
                    Some(k) if k == l => ("pair-plog-same", fa.nscale >= p + 1),
                    Some(_) => ("pair-plog-cross", fa.nscale >= p),
                };
                rows.push(StabRow::new(name, (fa.label, p, 2 * l - 2, 0), ok, lhs, rhs));
            }
        }
    }
    for k in 2..=mp {
        for l in k..=mp {
            let lv = omega_even_h_on(
                &full,
                data,
                EvenIndex::Pair(k, data.n_prime(k)),
                EvenIndex::Pair(l, data.n_prime(l)),
            )?;
            let HurwitzOmega::Log { arg: la, .. } = lv else {
                return Err(Error::Invalid("expected a logarithmic entry".into()));
            };
            let rv =
                omega_even_m_unchecked(&mpt, EvenSector::PairLog(k), 0, EvenSector::PairLog(l), 0)?;
            let ra = log_of(&rv)?;
            rows.push(StabRow::new(
                "plog-plog",
                (2 * k - 2, 0, 2 * l - 2, 0),
                true,
                la,
                ra,
            ));
        }
    }
    Ok(rows)
}

/// Compares the reduced open densities of the rational side against the
/// puncture-side densities on the zero-extension: odd levels of the
/// family at infinity and of the central pole family, all levels of the
/// pair families (both members compared, worst deviation reported), and
/// the pair logarithmic rows. Thresholds are inherited from the generic
/// open comparison; rows above them are provably exact. The generic
/// structural limitation on the flows covered applies unchanged
/// ([`crate::open::OPEN_SIGMA_LIMITATION`]).
pub fn even_open_report<F: Coeff>(
    data: &EvenHurwitzData<F>,
    pmax: usize,
) -> Result<Vec<OpenStabRow>> {
    let full = expand_even(data)?;
    let mpt = zero_extension(&full, pmax + 4)?;
    check_even_point(&mpt)?;
    let mut rows = Vec::new();
    let n0 = full.n(0);
    for p in (1..=pmax).step_by(2) {
        let (dev, floor) = open::e_row_dev(&full, &mpt, p)?;
        rows.push(OpenStabRow {
            family: "e",
            i: 0,
            p,
            threshold_ok: n0 >= p,
            max_coeff_dev: dev,
            s_trunc_order: floor,
        });
    }
    let n1 = full.n(1);
    for p in (1..=pmax).step_by(2) {
        let (dev, ceil) = open::h_row_dev(&full, &mpt, 1, p)?;
        rows.push(OpenStabRow {
            family: "h1",
            i: 1,
            p,
            threshold_ok: n1 >= p,
            max_coeff_dev: dev,
            s_trunc_order: ceil,
        });
    }
    for k in 2..=data.m_prime() {
        let np = data.n_prime(k);
        for p in 1..=pmax {
            let (dp, cp) = open::h_row_dev(&full, &mpt, 2 * k - 2, p)?;
            let (dm, cm) = open::h_row_dev(&full, &mpt, 2 * k - 1, p)?;
            rows.push(OpenStabRow {
                family: "pair",
                i: 2 * k - 2,
                p,
                threshold_ok: np >= p,
                max_coeff_dev: dp.max(dm),
                s_trunc_order: cp.min(cm),
            });
        }
        let dp = open::log_row_dev(&full, &mpt, 2 * k - 2)?;
        let dm = open::log_row_dev(&full, &mpt, 2 * k - 1)?;
        rows.push(OpenStabRow {
            family: "pair-log",
            i: 2 * k - 2,
            p: 0,
            threshold_ok: true,
            max_coeff_dev: dp.max(dm),
            s_trunc_order: 0,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{Quad, Rat};
    use crate::hurwitz::{self, flat_coords};
    use crate::open::{theta_tilde_h, OpenSlot};
    use crate::series::Center;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn q(n: i64) -> Quad {
        Quad::from_int(n)
    }

    fn q5() -> Quad {
        Quad::root(5)
    }

    fn qr(n: i64, d: i64) -> Quad {
        Quad::rational(Rat::new(n, d), 5)
    }

    /// λ = z² + 7 + 4 z^{−2}: the smallest even profile, over ℚ.
    fn minimal() -> EvenHurwitzData<Rat> {
        EvenHurwitzData::new(1, vec![r(7)], vec![r(4)], Some(r(2)), vec![]).unwrap()
    }

    /// λ = z⁴ − 2z² + 3 + 9 z^{−2}, over ℚ.
    fn quartic() -> EvenHurwitzData<Rat> {
        EvenHurwitzData::new(2, vec![r(3), r(-2)], vec![r(9)], Some(r(3)), vec![]).unwrap()
    }

    /// λ = z² + 7 + 4 z^{−2} + 3 (z² − 5)^{−1}, over ℚ(√5).
    fn simple_pair() -> EvenHurwitzData<Quad> {
        EvenHurwitzData::new(
            1,
            vec![q(7)],
            vec![q(4)],
            Some(q(2)),
            vec![EvenBlock {
                loc2: q(5),
                coeffs: vec![q(3)],
                root: Some(q5()),
                branch: None,
            }],
        )
        .unwrap()
    }

    /// λ = z⁴ − 2z² + 3 + 9 z^{−2} + 6 (z²−5)^{−1} + 80 (z²−5)^{−2}.
    fn deep_pair() -> EvenHurwitzData<Quad> {
        EvenHurwitzData::new(
            2,
            vec![q(3), q(-2)],
            vec![q(9)],
            Some(q(3)),
            vec![EvenBlock {
                loc2: q(5),
                coeffs: vec![q(6), q(80)],
                root: Some(q5()),
                branch: Some(q(2)),
            }],
        )
        .unwrap()
    }

    /// λ = z⁴ − 2z² + 3 + 5 z^{−2} + 16 z^{−4} + 3 (z²−5)^{−1}.
    fn deep_center() -> EvenHurwitzData<Quad> {
        EvenHurwitzData::new(
            2,
            vec![q(3), q(-2)],
            vec![q(5), q(16)],
            Some(q(2)),
            vec![EvenBlock {
                loc2: q(5),
                coeffs: vec![q(3)],
                root: Some(q5()),
                branch: None,
            }],
        )
        .unwrap()
    }

    #[test]
    fn expansion_matches_partial_fractions() {
        // First-order block: (z² − b)^{−1} = (1/2r)[(z−r)^{−1} − (z+r)^{−1}].
        let full = expand_even(&simple_pair()).unwrap();
        assert_eq!(full.n(0), 2);
        assert_eq!(full.a0(), &[q(7)]);
        assert_eq!(full.m(), 3);
        let c = full.pole(1).unwrap();
        assert!(c.loc.is_zero());
        assert_eq!(c.coeffs, vec![q(0), q(4)]);
        assert_eq!(c.root, Some(q(2)));
        let plus = full.pole(2).unwrap();
        let minus = full.pole(3).unwrap();
        assert_eq!(plus.loc, q5());
        assert_eq!(minus.loc, q5().neg());
        let res = Quad::new(Rat::new(0, 1), Rat::new(3, 10), 5); // 3/(2√5)
        assert_eq!(plus.coeffs, vec![res.clone()]);
        assert_eq!(minus.coeffs, vec![res.neg()]);

        // Second-order block with cross terms: depth-2 coefficient
        // 80/(2√5)² = 4, depth-1 coefficient 6/(2√5) − 2·80/(2√5)³ = −√5/5.
        let full = expand_even(&deep_pair()).unwrap();
        let plus = full.pole(2).unwrap();
        let res = Quad::new(Rat::new(0, 1), Rat::new(-1, 5), 5);
        assert_eq!(plus.coeffs, vec![res.clone(), q(4)]);
        assert_eq!(plus.root, Some(q(2)));
        let minus = full.pole(3).unwrap();
        assert_eq!(minus.coeffs, vec![res.neg(), q(4)]);
        assert_eq!(minus.root, Some(q(-2)));
        // Whole-function probe: λ(3) = 81 − 18 + 3 + 1 + 6/4 + 80/16.
        assert_eq!(full.rational().eval_at(&q(3)).unwrap(), qr(147, 2));

        // The rational backend can expand blocks with square locations.
        let sq = EvenHurwitzData::new(
            1,
            vec![r(7)],
            vec![r(4)],
            None,
            vec![EvenBlock {
                loc2: r(4),
                coeffs: vec![r(3)],
                root: None,
                branch: None,
            }],
        )
        .unwrap();
        let full = expand_even(&sq).unwrap();
        assert_eq!(full.pole(2).unwrap().loc, r(2));
        assert_eq!(full.pole(2).unwrap().coeffs, vec![Rat::new(3, 4)]);

        // Rejections: vanishing squared location, duplicate locations,
        // mismatched roots, missing roots on an exact backend.
        let blk = |loc2: Rat, root: Option<Rat>| EvenBlock {
            loc2,
            coeffs: vec![r(3)],
            root,
            branch: None,
        };
        assert!(EvenHurwitzData::new(1, vec![r(7)], vec![r(4)], None, vec![blk(r(0), None)])
            .is_err());
        assert!(EvenHurwitzData::new(
            1,
            vec![r(7)],
            vec![r(4)],
            None,
            vec![blk(r(5), None), blk(r(5), None)]
        )
        .is_err());
        assert!(
            EvenHurwitzData::new(1, vec![r(7)], vec![r(4)], None, vec![blk(r(5), Some(r(3)))])
                .is_err()
        );
        let noroot =
            EvenHurwitzData::new(1, vec![r(7)], vec![r(4)], None, vec![blk(r(5), None)]).unwrap();
        assert!(matches!(
            expand_even(&noroot),
            Err(Error::RootUnavailable { .. })
        ));
        // A branch root that does not recover the top coefficient.
        let bad_branch = EvenHurwitzData::new(
            2,
            vec![q(3), q(-2)],
            vec![q(9)],
            Some(q(3)),
            vec![EvenBlock {
                loc2: q(5),
                coeffs: vec![q(6), q(80)],
                root: Some(q5()),
                branch: Some(q(3)),
            }],
        )
        .unwrap();
        assert!(expand_even(&bad_branch).is_err());
    }

    #[test]
    fn parity_and_fixed_locus_constraints() {
        // Expanded data is an even function and the flat coordinates
        // satisfy the fixed-locus constraints.
        let full = expand_even(&quartic()).unwrap();
        check_even_data(&full).unwrap();
        let rat = full.rational();
        assert!(rat.reflect().sub(&rat).is_zero());
        let vc = flat_coords(&full).unwrap();
        assert!(vc.v0[1].is_zero()); // v_{0,2}
        assert!(!vc.v0[0].is_zero());
        assert!(vc.v[0][0].is_zero()); // v_{1,0}
        assert!(vc.v[0][2].is_zero()); // v_{1,2}: the logarithmic slot
        assert!(!vc.v[0][1].is_zero());

        let full = expand_even(&deep_pair()).unwrap();
        check_even_data(&full).unwrap();
        let rat = full.rational();
        assert!(rat.reflect().sub(&rat).is_zero());
        let vc = flat_coords(&full).unwrap();
        assert!(vc.v0[1].is_zero());
        for j in 0..=2 {
            // Pair members negate slot by slot, including location,
            // branch, and logarithmic slots.
            assert_eq!(vc.v[1][j], vc.v[2][j].neg());
        }

        // Reflection reverses the argument on an asymmetric function.
        let skew = HurwitzData::new(
            2,
            vec![r(3)],
            vec![HurwitzPole {
                loc: r(1),
                coeffs: vec![r(1), r(4)],
                root: Some(r(2)),
            }],
        )
        .unwrap();
        let refl = reflect_data(&skew).unwrap();
        assert_eq!(
            refl.rational().eval_at(&r(2)).unwrap(),
            skew.rational().eval_at(&r(-2)).unwrap()
        );
        assert!(check_even_data(&skew).is_err());
        let odd = HurwitzData::new(3, vec![r(0), r(0)], vec![]).unwrap();
        assert!(reflect_data(&odd).is_err());

        // Violations detected coefficient by coefficient.
        let central = |coeffs: Vec<Rat>| HurwitzPole {
            loc: r(0),
            coeffs,
            root: Some(r(2)),
        };
        let odd_poly = HurwitzData::new(4, vec![r(1), r(2), r(0)], vec![central(vec![r(0), r(4)])])
            .unwrap();
        assert!(check_even_data(&odd_poly).is_err());
        let odd_depth =
            HurwitzData::new(2, vec![r(1)], vec![central(vec![r(1), r(4)])]).unwrap();
        assert!(check_even_data(&odd_depth).is_err());
        // A depth-2 mirror pair without stored branch roots is rejected:
        // the principal roots of the two members would not mirror.
        let pairless = HurwitzData::new(
            2,
            vec![r(3)],
            vec![
                central(vec![r(0), r(4)]),
                HurwitzPole {
                    loc: r(2),
                    coeffs: vec![r(1), r(4)],
                    root: None,
                },
                HurwitzPole {
                    loc: r(-2),
                    coeffs: vec![r(-1), r(4)],
                    root: None,
                },
            ],
        )
        .unwrap();
        assert!(check_even_data(&pairless).is_err());
    }

    #[test]
    fn fixed_point_validation_and_squared_transform() {
        let full = expand_even(&deep_pair()).unwrap();
        let mpt = zero_extension(&full, 6).unwrap();
        check_even_point(&mpt).unwrap();
        let ev = EvenWhithamPoint::new(mpt.clone()).unwrap();
        assert_eq!(ev.m_prime(), 2);

        // The squared transform produces even series in z².
        let (h0, h1) = hat_transform(&mpt).unwrap();
        assert_eq!(h0.coeff_nat(2).unwrap(), q(1));
        for e in h0.low()..h0.order() {
            if e.rem_euclid(2) == 1 {
                assert!(h0.coeff_int(e).unwrap().is_zero());
            }
        }
        for e in h1.low()..h1.order() {
            if e.rem_euclid(2) == 1 {
                assert!(h1.coeff_int(e).unwrap().is_zero());
            }
        }
        assert_eq!(h1.low(), -2);

        // An asymmetric point is rejected: even coefficient at infinity.
        let l0 = LaurentSeries::from_parts(
            Center::<Rat>::Infinity,
            1,
            -1,
            vec![r(1), r(0), r(1), r(2), r(0), r(0), r(0)],
        );
        let l1 = LaurentSeries::from_parts(Center::Finite(r(0)), 1, -1, vec![r(1), r(0), r(3), r(0)]);
        let skew = WhithamPoint::new(l0, vec![l1.clone()]).unwrap();
        assert!(check_even_point(&skew).is_err());
        assert!(EvenWhithamPoint::new(skew.clone()).is_err());
        assert!(hat_transform(&skew).is_err());
        assert!(omega_even_m(&skew, EvenSector::E, 0, EvenSector::E, 0).is_err());

        // Odd series but even puncture count.
        let l0 = LaurentSeries::from_parts(
            Center::<Rat>::Infinity,
            1,
            -1,
            vec![r(1), r(0), r(1), r(0), r(0), r(0), r(0)],
        );
        let away = LaurentSeries::from_parts(Center::Finite(r(1)), 1, -1, vec![r(1), r(0), r(3)]);
        let two = WhithamPoint::new(l0.clone(), vec![l1.clone(), away.clone()]).unwrap();
        assert!(check_even_point(&two).is_err());

        // Central puncture away from the origin.
        let off = WhithamPoint::new(l0.clone(), vec![away.clone()]).unwrap();
        assert!(check_even_point(&off).is_err());

        // A broken mirror pair: locations negate but coefficients do not
        // alternate.
        let pp = LaurentSeries::from_parts(Center::Finite(r(2)), 1, -1, vec![r(1), r(0), r(3)]);
        let pm = LaurentSeries::from_parts(Center::Finite(r(-2)), 1, -1, vec![r(1), r(0), r(3)]);
        let broken = WhithamPoint::new(l0, vec![l1, pp, pm]).unwrap();
        assert!(check_even_point(&broken).is_err());
    }

    #[test]
    fn mirror_antisymmetry_cancels_discarded_entries() {
        let full = expand_even(&deep_pair()).unwrap();
        let mpt = zero_extension(&full, 8).unwrap();
        let sc = |v: OmegaValue<Quad>| v.scalar().unwrap().clone();

        // Entries pairing an even level at infinity with the two pair
        // members are antisymmetric: the discarded sums vanish.
        let mut saw_nonzero = false;
        for qq in 0..=2 {
            let plus = sc(omega(&mpt, Sector::E, 2, Sector::H0(2), qq).unwrap());
            let minus = sc(omega(&mpt, Sector::E, 2, Sector::H0(3), qq).unwrap());
            assert!(plus.add(&minus).is_zero());
            saw_nonzero |= !plus.is_zero();
        }
        assert!(saw_nonzero);

        // At an odd level the members agree instead: the difference rows
        // the reduction would form there vanish identically.
        let plus = sc(omega(&mpt, Sector::E, 1, Sector::H0(2), 1).unwrap());
        let minus = sc(omega(&mpt, Sector::E, 1, Sector::H0(3), 1).unwrap());
        assert!(plus.sub(&minus).is_zero());

        // Mixed-parity entries among the mirror-fixed punctures vanish
        // outright.
        assert!(sc(omega(&mpt, Sector::E, 0, Sector::E, 1).unwrap()).is_zero());
        assert!(sc(omega(&mpt, Sector::E, 1, Sector::H0(1), 0).unwrap()).is_zero());
        assert!(sc(omega(&mpt, Sector::H0(1), 0, Sector::H0(1), 1).unwrap()).is_zero());

        // Central × pair members at even central level: the sum cancels.
        let plus = sc(omega(&mpt, Sector::H0(1), 0, Sector::H0(2), 1).unwrap());
        let minus = sc(omega(&mpt, Sector::H0(1), 0, Sector::H0(3), 1).unwrap());
        assert!(plus.add(&minus).is_zero());
    }

    #[test]
    fn reduced_tables_combine_both_paths() {
        let data = deep_pair();
        let full = expand_even(&data).unwrap();

        // Rational side: by mirror antisymmetry the difference row equals
        // twice its positive member.
        let both = omega_even_h(&data, EvenIndex::Pair(2, 1), EvenIndex::Inf(1)).unwrap();
        let HurwitzOmega::Scalar(b) = both else {
            panic!("expected scalar")
        };
        let HurwitzOmega::Scalar(p) = omega_h(&full, (2, 1), (0, 1)).unwrap() else {
            panic!("expected scalar")
        };
        assert!(!p.is_zero());
        assert_eq!(b, p.add(&p));

        // Diagonal logarithmic combination: the four arguments
        // ρ, 2√b, −2√b, −ρ combine to ρ²/(4b) = 4/20.
        let HurwitzOmega::Log { scale, arg } =
            omega_even_h(&data, EvenIndex::Pair(2, 2), EvenIndex::Pair(2, 2)).unwrap()
        else {
            panic!("expected logarithm")
        };
        assert_eq!(scale, 4);
        assert_eq!(arg, qr(1, 5));

        // Puncture side agrees exactly.
        let mpt = zero_extension(&full, 6).unwrap();
        let rv = omega_even_m(&mpt, EvenSector::PairLog(2), 0, EvenSector::PairLog(2), 0).unwrap();
        assert_eq!(rv.log_arg().unwrap().clone(), qr(1, 5));
        let d = omega_even_m(&mpt, EvenSector::Pair(2), 1, EvenSector::E, 0).unwrap();
        let s = omega(&mpt, Sector::H0(2), 1, Sector::E, 0).unwrap();
        let sv = s.scalar().unwrap();
        assert_eq!(d.scalar().unwrap().clone(), sv.add(sv));

        // Level guards and slot validation.
        assert!(matches!(
            omega_even_m(&mpt, EvenSector::E, 1, EvenSector::E, 0),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            omega_even_m(&mpt, EvenSector::PairLog(2), 1, EvenSector::E, 0),
            Err(Error::Unsupported(_))
        ));
        assert!(omega_even_m(&mpt, EvenSector::Pair(5), 1, EvenSector::E, 0).is_err());
        assert!(omega_even_h(&data, EvenIndex::Inf(2), EvenIndex::Inf(1)).is_err());
        assert!(omega_even_h(&data, EvenIndex::Central(2), EvenIndex::Inf(1)).is_err());
        assert!(omega_even_h(&data, EvenIndex::Pair(2, 3), EvenIndex::Inf(1)).is_err());
        assert!(omega_even_h(&data, EvenIndex::Pair(1, 0), EvenIndex::Inf(1)).is_err());
    }

    #[test]
    fn sector_and_index_round_trip_through_strings() {
        for s in [
            EvenSector::E,
            EvenSector::H10,
            EvenSector::Pair(2),
            EvenSector::PairLog(3),
        ] {
            assert_eq!(s.to_string().parse::<EvenSector>().unwrap(), s);
        }
        for i in [
            EvenIndex::Inf(1),
            EvenIndex::Central(3),
            EvenIndex::Pair(2, 0),
        ] {
            assert_eq!(i.to_string().parse::<EvenIndex>().unwrap(), i);
        }
        assert!("pairlog".parse::<EvenSector>().is_err());
        assert!("v2(1)".parse::<EvenIndex>().is_err());
    }

    #[test]
    fn stabilization_rows_reduce_exactly() {
        // The pair-free profile: every provable row is exact over ℚ.
        let rows = even_stabilization_report(&minimal(), 3, 3).unwrap();
        assert!(rows.iter().filter(|r| r.threshold_ok).count() >= 2);
        for row in &rows {
            if row.threshold_ok {
                assert_eq!(row.lhs, row.rhs);
                assert_eq!(row.deviation, 0.0);
            }
        }

        for data in [deep_pair(), deep_center()] {
            let rows = even_stabilization_report(&data, 3, 3).unwrap();
            for row in &rows {
                if row.threshold_ok {
                    assert_eq!(row.lhs, row.rhs, "row {} {:?}", row.family, (row.i, row.p, row.j, row.q));
                    assert_eq!(row.deviation, 0.0);
                }
            }
            assert!(rows.iter().any(|r| !r.threshold_ok));
        }

        let rows = even_stabilization_report(&deep_pair(), 3, 3).unwrap();
        let find = |fam: &str, legs: (usize, usize, usize, usize)| {
            rows.iter()
                .find(|r| r.family == fam && (r.i, r.p, r.j, r.q) == legs)
                .unwrap()
        };
        assert!(find("ee", (0, 1, 0, 1)).threshold_ok); // n₀ = 4 ≥ 2
        assert!(!find("ee", (0, 3, 0, 3)).threshold_ok); // 4 < 6
        assert!(!find("h1-h1", (1, 1, 1, 1)).threshold_ok); // n₁ = 2 < 3
        assert!(find("e-pair", (0, 1, 2, 1)).threshold_ok); // 4 ≥ 1, 2 ≥ 1
        assert!(!find("pair-pair-same", (2, 1, 2, 1)).threshold_ok); // 2 < 3
        assert!(find("pair-plog-same", (2, 1, 2, 0)).threshold_ok); // 2 ≥ 2
        let ll = find("plog-plog", (2, 0, 2, 0));
        assert_eq!(ll.lhs, qr(1, 5));
        assert_eq!(ll.rhs, qr(1, 5));
        // No odd puncture-side levels are formed: every row has odd σ
        // level for the families at infinity and at the center.
        assert!(rows
            .iter()
            .filter(|r| r.i == 0 || (r.i == 1 && r.family != "plog-plog"))
            .all(|r| r.p % 2 == 1));

        // A deeper center clears the same-family central threshold.
        let rows = even_stabilization_report(&deep_center(), 3, 3).unwrap();
        let row = rows
            .iter()
            .find(|r| r.family == "h1-h1" && (r.p, r.q) == (1, 1))
            .unwrap();
        assert!(row.threshold_ok); // n₁ = 4 ≥ 3
        assert_eq!(row.lhs, row.rhs);
    }

    #[test]
    fn open_rows_and_log_pairs_reduce() {
        let rows = even_open_report(&deep_pair(), 4).unwrap();
        // Only odd levels appear for the non-pair families.
        assert!(rows
            .iter()
            .all(|r| r.family == "pair" || r.family == "pair-log" || r.p % 2 == 1));
        for row in &rows {
            if row.threshold_ok {
                assert_eq!(row.max_coeff_dev, 0.0, "row {} p={}", row.family, row.p);
            }
        }
        let pair_ok: Vec<bool> = rows
            .iter()
            .filter(|r| r.family == "pair")
            .map(|r| r.threshold_ok)
            .collect();
        assert_eq!(pair_ok, vec![true, true, false, false]); // n₂′ = 2
        let h1: Vec<_> = rows.iter().filter(|r| r.family == "h1").collect();
        assert_eq!(h1.len(), 2); // p = 1, 3
        assert!(h1[0].threshold_ok && !h1[1].threshold_ok); // n₁ = 2
        assert!(rows
            .iter()
            .any(|r| r.family == "pair-log" && r.max_coeff_dev == 0.0));

        let rows = even_open_report(&minimal(), 3).unwrap();
        assert!(rows.iter().filter(|r| r.threshold_ok).count() >= 2);
        for row in &rows {
            if row.threshold_ok {
                assert_eq!(row.max_coeff_dev, 0.0);
            }
        }

        // The boundary density is the superpotential itself and is even
        // in s.
        let full = expand_even(&deep_pair()).unwrap();
        let th = theta_tilde_h(&full, OpenSlot::S).unwrap();
        let s = th.series().unwrap();
        assert_eq!(s.coeff_nat(4).unwrap(), q(1));
        assert_eq!(s.coeff_nat(2).unwrap(), q(-2));
        assert_eq!(s.coeff_nat(0).unwrap(), q(3));
        for e in s.low()..s.order() {
            if e.rem_euclid(2) == 1 {
                assert!(s.coeff_int(e).unwrap().is_zero());
            }
        }

        // Derivative oracle for the pair logarithm family: the reduced
        // logarithmic density n′[log(s−√b) − log(s+√b)] and the
        // puncture-side combination have equal derivatives as rational
        // functions of s; the probes pin the member-to-sign convention.
        let mpt = zero_extension(&full, 6).unwrap();
        let r5 = q5();
        let php = mpt.phi(2).unwrap().clone();
        let phm = mpt.phi(3).unwrap().clone();
        for probe in [q(3), q(7)] {
            let lhs = probe
                .sub(&r5)
                .inv()
                .unwrap()
                .sub(&probe.add(&r5).inv().unwrap());
            let rhs = probe
                .sub(&php)
                .inv()
                .unwrap()
                .sub(&probe.sub(&phm).inv().unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn reduced_data_keeps_closed_structure() {
        // The expanded superpotential carries the generic structures: the
        // associativity residual and third-derivative symmetry vanish.
        let full = expand_even(&minimal()).unwrap();
        assert_eq!(hurwitz::wdvv_residual(&full).unwrap(), 0.0);
        let c = hurwitz::c_tensor(&full).unwrap();
        assert_eq!(hurwitz::c_symmetry_defect(&c), 0.0);
        let full = expand_even(&simple_pair()).unwrap();
        assert_eq!(open::open_wdvv_residual(&full, &q(7)).unwrap(), 0.0);
    }
}
