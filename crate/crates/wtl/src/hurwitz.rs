//! Hurwitz-type superpotentials: flat coordinate systems, prepotential
//! derivative tables, the Frobenius pairing, and the comparison of the
//! finite-dimensional tables against the puncture correlators of
//! [`crate::whitham`] under truncation of the coordinate tails.

use crate::coeff::{factorial, Coeff, Jet};
use crate::ratfun::GlobalRational;
use crate::series::{Center, LaurentSeries};
use crate::whitham::{omega, pair_residue, point_of_u, OmegaValue, Sector, UCoords, WhithamPoint};
use crate::{Error, Result};

/// One pole block of a superpotential: the location `a_{i,0}`, the
/// principal-part coefficients `a_{i,1..n_i}` (ascending depth, top
/// nonzero), and optionally a chosen `n_i`-th root of the top coefficient.
/// Fractional powers branch through that root; on exact backends it must
/// be supplied whenever the top coefficient is not a perfect power.
#[derive(Clone, Debug, PartialEq)]
pub struct HurwitzPole<F> {
    pub loc: F,
    pub coeffs: Vec<F>,
    pub root: Option<F>,
}

/// A genus-zero superpotential with marked profile `(n₀; n₁, …, n_m)`:
///
/// `λ(z) = z^{n₀} + a_{0,n₀−2} z^{n₀−2} + … + a_{0,0}
///        + Σ_{i=1}^m Σ_{j=1}^{n_i} a_{i,j} (z − a_{i,0})^{−j}`.
///
/// The subleading coefficient `a_{0,n₀−1}` is normalized away. Pole
/// locations are pairwise distinct and every top coefficient `a_{i,n_i}`
/// is nonzero.
#[derive(Clone, Debug)]
pub struct HurwitzData<F: Coeff> {
    n0: usize,
    a0: Vec<F>,
    poles: Vec<HurwitzPole<F>>,
}

impl<F: Coeff> HurwitzData<F> {
    /// Validates the shape. `a0` lists `a_{0,0..n₀−2}` ascending (empty
    /// for `n₀ = 1`), and each pole block must have a nonzero top
    /// coefficient; a supplied root must reproduce the top coefficient.
    pub fn new(n0: usize, a0: Vec<F>, poles: Vec<HurwitzPole<F>>) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::Invalid("the degree at infinity must be positive".into()));
        }
        if a0.len() + 1 != n0 {
            return Err(Error::Invalid(format!(
                "degree {n0} at infinity takes {} polynomial coefficients, got {}",
                n0 - 1,
                a0.len()
            )));
        }
        for (i, p) in poles.iter().enumerate() {
            let ni = p.coeffs.len();
            if ni == 0 {
                return Err(Error::Invalid("every pole needs a principal part".into()));
            }
            if p.coeffs[ni - 1].is_zero() {
                return Err(Error::Invalid("top pole coefficients must be nonzero".into()));
            }
            if let Some(r) = &p.root {
                let pw = r.pow_int(ni as i64)?;
                let dev = pw.sub(&p.coeffs[ni - 1]).mag();
                if pw != p.coeffs[ni - 1] && dev > 1e-12 * p.coeffs[ni - 1].mag().max(1.0) {
                    return Err(Error::Invalid(format!(
                        "supplied root {r} does not recover the top coefficient"
                    )));
                }
            }
            for q in &poles[..i] {
                if q.loc == p.loc {
                    return Err(Error::Invalid("pole locations must be pairwise distinct".into()));
                }
            }
        }
        Ok(HurwitzData { n0, a0, poles })
    }

    /// Number of finite poles.
    pub fn m(&self) -> usize {
        self.poles.len()
    }

    /// Profile entry: `n(0) = n₀`, `n(i) = n_i` for `i = 1..=m`.
    pub fn n(&self, i: usize) -> usize {
        if i == 0 {
            self.n0
        } else {
            self.poles[i - 1].coeffs.len()
        }
    }

    /// Polynomial coefficients `a_{0,0..n₀−2}`.
    pub fn a0(&self) -> &[F] {
        &self.a0
    }

    /// The `i`-th pole block, `i = 1..=m`.
    pub fn pole(&self, i: usize) -> Result<&HurwitzPole<F>> {
        self.poles
            .get(i.wrapping_sub(1))
            .ok_or_else(|| Error::Invalid(format!("pole index {i} out of range")))
    }

    /// Dimension of the flat coordinate system:
    /// `(n₀ − 1) + Σ_i (n_i + 1)`.
    pub fn dim(&self) -> usize {
        self.n0 - 1 + self.poles.iter().map(|p| p.coeffs.len() + 1).sum::<usize>()
    }

    /// The branch `ρ_i` with `ρ_i^{n_i} = a_{i,n_i}`: the supplied root if
    /// present, the field's principal root otherwise.
    pub fn root_value(&self, i: usize) -> Result<F> {
        let p = self.pole(i)?;
        match &p.root {
            Some(r) => Ok(r.clone()),
            None => p.coeffs[p.coeffs.len() - 1].nth_root(p.coeffs.len() as u32),
        }
    }

    /// The superpotential as an exact rational function.
    pub fn rational(&self) -> GlobalRational<F> {
        let mut poly = self.a0.clone();
        poly.push(F::zero());
        poly.push(F::one());
        let parts = self
            .poles
            .iter()
            .map(|p| (p.loc.clone(), p.coeffs.clone()))
            .collect();
        GlobalRational::new(poly, parts)
    }

    fn nmax(&self) -> usize {
        (0..=self.m()).map(|i| self.n(i)).max().unwrap_or(1)
    }
}

/// Flat coordinates of a superpotential: `v0[j−1] = v_{0,j}` for
/// `j = 1..n₀−1` from the expansion at infinity, and
/// `v[i−1][j] = v_{i,j}` for `j = 0..=n_i` from the expansion at the
/// `i`-th pole, with `v_{i,0}` the pole location and `v_{i,1}` the chosen
/// root of the top coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatCoordsH<F> {
    pub v0: Vec<F>,
    pub v: Vec<Vec<F>>,
}

/// A prepotential second derivative: a scalar, or the formal logarithm
/// `scale · log(arg)`.
#[derive(Clone, Debug, PartialEq)]
pub enum HurwitzOmega<F> {
    Scalar(F),
    Log { scale: i64, arg: F },
}

impl<F: Coeff> HurwitzOmega<F> {
    /// The scalar value; logarithmic entries are reported as errors.
    pub fn scalar(&self) -> Result<&F> {
        match self {
            HurwitzOmega::Scalar(v) => Ok(v),
            HurwitzOmega::Log { .. } => Err(Error::Unsupported(
                "entry is a formal logarithm, not a scalar".into(),
            )),
        }
    }
}

impl<F: Coeff> std::fmt::Display for HurwitzOmega<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HurwitzOmega::Scalar(v) => write!(f, "{v}"),
            HurwitzOmega::Log { scale, arg } => write!(f, "{scale}·log({arg})"),
        }
    }
}

/// Is `(i, j)` the logarithmic slot at pole `i`?
fn is_log<F: Coeff>(data: &HurwitzData<F>, i: usize, j: usize) -> bool {
    i >= 1 && j == data.n(i)
}

/// Validates a flat index: `1 ≤ j ≤ n₀−1` at infinity, `0 ≤ j ≤ n_i` at
/// pole `i` (with `j = n_i` logarithmic).
fn check_index<F: Coeff>(data: &HurwitzData<F>, i: usize, j: usize) -> Result<()> {
    if i == 0 {
        if j == 0 || j >= data.n0 {
            return Err(Error::Invalid(format!(
                "index (0, {j}) outside 1..={}",
                data.n0 - 1
            )));
        }
        return Ok(());
    }
    data.pole(i)?;
    if j > data.n(i) {
        return Err(Error::Invalid(format!(
            "index ({i}, {j}) outside 0..={}",
            data.n(i)
        )));
    }
    Ok(())
}

/// Exact expansion of the superpotential at infinity (`i = 0`) or at the
/// `i`-th pole, with `width` exponents from the leading term.
pub fn superpotential<F: Coeff>(
    data: &HurwitzData<F>,
    i: usize,
    width: i64,
) -> Result<LaurentSeries<F>> {
    let g = data.rational();
    let ni = data.n(i) as i64;
    if i == 0 {
        g.expand_at(&Center::Infinity, ni - width)
    } else {
        g.expand_at(&Center::Finite(data.pole(i)?.loc.clone()), width - ni)
    }
}

/// `λ^{num/n_i}` expanded at the `i`-th center. Integer powers never
/// branch; fractional ones go through the chosen root of the top
/// coefficient.
pub(crate) fn lambda_power<F: Coeff>(
    data: &HurwitzData<F>,
    i: usize,
    num: i64,
    width: i64,
) -> Result<LaurentSeries<F>> {
    let e = superpotential(data, i, width)?;
    let den = data.n(i) as i64;
    if num % den == 0 {
        return e.pow_int(num / den);
    }
    let root = if i == 0 { None } else { Some(data.root_value(i)?) };
    e.pow_ratio(num, den, root.as_ref())
}

/// Flat coordinates: reversion of `λ^{1/n₀}` at infinity (with the minus
/// convention `z = k − v_{0,1} k^{−1} − …`) and of `λ^{1/n_i}` at each
/// pole (`z = v_{i,0} + v_{i,1} k^{−1} + …`).
pub fn flat_coords<F: Coeff>(data: &HurwitzData<F>) -> Result<FlatCoordsH<F>> {
    let k0 = lambda_power(data, 0, 1, data.n0 as i64 + 3)?;
    let z0 = k0.revert()?;
    let mut v0 = Vec::with_capacity(data.n0 - 1);
    for j in 1..data.n0 as i64 {
        v0.push(z0.coeff_nat(-j)?.neg());
    }
    let mut v = Vec::with_capacity(data.m());
    for i in 1..=data.m() {
        let ni = data.n(i) as i64;
        let ki = lambda_power(data, i, 1, ni + 3)?;
        let zi = ki.revert()?;
        let mut vi = Vec::with_capacity(data.n(i) + 1);
        for j in 0..=ni {
            vi.push(zi.coeff_nat(-j)?);
        }
        v.push(vi);
    }
    Ok(FlatCoordsH { v0, v })
}

/// The coordinate vector field `∂λ/∂v_{i,j}` at fixed `z`, as an exact
/// rational function: the projection of `λ^{−j/n_i} λ′` onto its
/// polynomial part (`i = 0`) or minus its principal part at the pole
/// (`i ≥ 1`, including the logarithmic slot `j = n_i`).
pub fn dlambda_dv<F: Coeff>(data: &HurwitzData<F>, i: usize, j: usize) -> Result<GlobalRational<F>> {
    check_index(data, i, j)?;
    let ni = data.n(i) as i64;
    let w = 2 * ni + 6;
    let lp = data.rational().derive();
    if i == 0 {
        let e = lp.expand_at(&Center::Infinity, -w)?;
        let prod = lambda_power(data, 0, -(j as i64), w)?.mul(&e)?;
        GlobalRational::polynomial_part(&prod.reduce_grid())
    } else {
        let here = Center::Finite(data.pole(i)?.loc.clone());
        let e = lp.expand_at(&here, w - ni)?;
        let prod = if j == 0 {
            e
        } else {
            lambda_power(data, i, -(j as i64), w)?.mul(&e)?
        };
        Ok(GlobalRational::principal_part_at(&prod.reduce_grid())?.neg())
    }
}

/// `Γ(1 − j/n) / Γ(2 + p − j/n) = Π_{t=1}^{p+1} (t − j/n)^{−1}` as an
/// exact field element.
fn gamma_ratio<F: Coeff>(j: i64, n: i64, p: i64) -> F {
    let mut acc = F::one();
    for t in 1..=(p + 1) {
        acc = acc.mul(&F::from_ratio(n, t * n - j));
    }
    acc
}

/// The level-`p` density coefficient of the flat direction `v_{i,j}`:
/// a residue of `λ^{1+p−j/n_i}` weighted by an exact ratio of Gamma
/// values. The logarithmic slots fall outside this table.
pub fn theta_h<F: Coeff>(data: &HurwitzData<F>, i: usize, j: usize, p: usize) -> Result<F> {
    check_index(data, i, j)?;
    if is_log(data, i, j) {
        return Err(Error::Unsupported(
            "logarithmic densities are only defined through the pairing table".into(),
        ));
    }
    let n = data.n(i) as i64;
    let num = (p as i64 + 1) * n - j as i64;
    let pw = lambda_power(data, i, num, num + 4)?;
    let r = pw.residue()?;
    let pref = gamma_ratio::<F>(j as i64, n, p as i64);
    Ok(if i == 0 { r.mul(&pref).neg() } else { r.mul(&pref) })
}

/// The projection of `λ^{(n_i−j)/n_i}` onto its polynomial part at
/// infinity (`i = 0`) or its principal part at the `i`-th pole.
fn power_projection<F: Coeff>(
    data: &HurwitzData<F>,
    i: usize,
    j: usize,
    width: i64,
) -> Result<GlobalRational<F>> {
    let num = data.n(i) as i64 - j as i64;
    let pw = lambda_power(data, i, num, width)?;
    if i == 0 {
        GlobalRational::polynomial_part(&pw)
    } else {
        GlobalRational::principal_part_at(&pw)
    }
}

/// The prepotential second derivative `∂²F/∂v_{i,j} ∂v_{k,l}`, realized
/// by local residues of projected fractional powers of `λ` against exact
/// one-forms. Entries with one logarithmic index are scalars; entries
/// with two are formal logarithms `n_i n_k · log(a_{i,0} − a_{k,0})` off
/// the diagonal and `n_k² · log v_{k,1}` on it.
pub fn omega_h<F: Coeff>(
    data: &HurwitzData<F>,
    first: (usize, usize),
    second: (usize, usize),
) -> Result<HurwitzOmega<F>> {
    let (i, j) = first;
    let (k, l) = second;
    check_index(data, i, j)?;
    check_index(data, k, l)?;
    match (is_log(data, i, j), is_log(data, k, l)) {
        (true, true) => {
            let scale = (data.n(i) * data.n(k)) as i64;
            let arg = if i == k {
                data.root_value(i)?
            } else {
                data.pole(i)?.loc.sub(&data.pole(k)?.loc)
            };
            if arg.is_zero() {
                return Err(Error::Invalid("vanishing logarithm argument".into()));
            }
            Ok(HurwitzOmega::Log { scale, arg })
        }
        (true, false) => omega_h(data, second, first),
        (false, true) => {
            let ni = data.n(i) as i64;
            let nk = data.n(k) as i64;
            let num = ni - j as i64;
            let pw = lambda_power(data, i, num, ni + nk + num + 6)?;
            let field = GlobalRational::from_part(data.pole(k)?.loc.clone(), vec![F::one()]);
            let r = pair_residue(&field, &pw)?;
            let v = r.mul(&F::from_ratio(ni * nk, num));
            Ok(HurwitzOmega::Scalar(if i == 0 { v.neg() } else { v }))
        }
        (false, false) => {
            let ni = data.n(i) as i64;
            let nk = data.n(k) as i64;
            let w = 2 * (ni + nk) + 8;
            let g = power_projection(data, i, j, w)?;
            let weight = lambda_power(data, k, nk - l as i64, w)?.derive();
            let r = pair_residue(&g, &weight)?;
            let scale = F::from_ratio(ni * nk, (ni - j as i64) * (nk - l as i64));
            let v = r.mul(&scale);
            let same_side = (i == 0) == (k == 0);
            Ok(HurwitzOmega::Scalar(if same_side { v } else { v.neg() }))
        }
    }
}

/// The flat pairing `η(∂_{v_{i,j}}, ∂_{v_{k,l}})`: the sum of residues of
/// `∂′λ ∂″λ / λ′` over the critical points of `λ`, computed without
/// locating them by transferring the sum to the marked centers.
pub fn metric_h<F: Coeff>(
    data: &HurwitzData<F>,
    first: (usize, usize),
    second: (usize, usize),
) -> Result<F> {
    let d1 = dlambda_dv(data, first.0, first.1)?;
    let d2 = dlambda_dv(data, second.0, second.1)?;
    let lp = data.rational().derive();
    let w = 3 * data.nmax() as i64 + 9;
    let mut acc = F::zero();
    for i in 0..=data.m() {
        let (center, known) = if i == 0 {
            (Center::Infinity, -w)
        } else {
            (Center::Finite(data.pole(i)?.loc.clone()), w)
        };
        let e1 = d1.expand_at(&center, known)?;
        let e2 = d2.expand_at(&center, known)?;
        let e3 = lp.expand_at(&center, known)?;
        let r = e1.mul(&e2)?.mul(&e3.invert()?)?.residue()?;
        acc = acc.add(&r);
    }
    Ok(acc.neg())
}

/// The puncture-resolved point with `λ₀ = λ^{1/n₀}` at infinity and
/// `λ_i = λ^{1/n_i}` at each pole, all windows `width` terms deep.
pub fn embed<F: Coeff>(data: &HurwitzData<F>, width: i64) -> Result<WhithamPoint<F>> {
    let l0 = lambda_power(data, 0, 1, width)?;
    let mut ls = Vec::with_capacity(data.m());
    for i in 1..=data.m() {
        ls.push(lambda_power(data, i, 1, width)?);
    }
    WhithamPoint::new(l0, ls)
}

/// All flat directions in report order: `(0, 1..n₀−1)`, then for each
/// pole `(i, 0..=n_i)` with the logarithmic slot last.
pub fn flat_directions<F: Coeff>(data: &HurwitzData<F>) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(data.dim());
    for j in 1..data.n0 {
        out.push((0, j));
    }
    for i in 1..=data.m() {
        for j in 0..=data.n(i) {
            out.push((i, j));
        }
    }
    out
}

/// Jet-lift of the data along the flat direction `dir`: the coefficient
/// increments are read off the rational field `∂λ/∂v_dir`, converting the
/// motion of each pole location into increments of the principal-part
/// coefficients (and of the chosen root).
pub fn lift_data<F: Coeff>(
    data: &HurwitzData<F>,
    dir: (usize, usize),
    tag: u32,
) -> Result<HurwitzData<Jet<F>>> {
    let field = dlambda_dv(data, dir.0, dir.1)?;
    if field.poly.len() + 1 > data.n0 {
        return Err(Error::Invalid(
            "direction field exceeds the polynomial profile".into(),
        ));
    }
    let mut a0 = Vec::with_capacity(data.a0.len());
    for (l, c) in data.a0.iter().enumerate() {
        let d = field.poly.get(l).cloned().unwrap_or_else(F::zero);
        a0.push(Jet::with_part(c.clone(), tag, d));
    }
    let mut poles = Vec::with_capacity(data.m());
    for i in 1..=data.m() {
        let pole = data.pole(i)?;
        let n = data.n(i);
        let bs = field
            .parts
            .iter()
            .find(|(loc, _)| *loc == pole.loc)
            .map(|(_, cs)| cs.clone())
            .unwrap_or_default();
        if bs.len() > n + 1 {
            return Err(Error::Invalid(
                "direction field exceeds the pole profile".into(),
            ));
        }
        let b = |l: usize| bs.get(l - 1).cloned().unwrap_or_else(F::zero);
        let top = &pole.coeffs[n - 1];
        let dloc = b(n + 1).div(&top.mul(&F::from_int(n as i64)))?;
        let mut coeffs = Vec::with_capacity(n);
        let mut dtop = F::zero();
        for l in 1..=n {
            let mut d = b(l);
            if l >= 2 {
                let prev = &pole.coeffs[l - 2];
                d = d.sub(&F::from_int(l as i64 - 1).mul(prev).mul(&dloc));
            }
            if l == n {
                dtop = d.clone();
            }
            coeffs.push(Jet::with_part(pole.coeffs[l - 1].clone(), tag, d));
        }
        let rho = data.root_value(i)?;
        let drho = dtop.mul(&rho).div(&F::from_int(n as i64).mul(top))?;
        poles.push(HurwitzPole {
            loc: Jet::with_part(pole.loc.clone(), tag, dloc),
            coeffs,
            root: Some(Jet::with_part(rho, tag, drho)),
        });
    }
    HurwitzData::new(data.n0, a0, poles)
}

/// First-order part of a pairing entry: the derivative of the scalar, or
/// `scale · arg′/arg` for a formal logarithm.
fn omega_part<F: Coeff>(v: HurwitzOmega<Jet<F>>, tag: u32) -> Result<F> {
    match v {
        HurwitzOmega::Scalar(x) => Ok(x.part(tag)),
        HurwitzOmega::Log { scale, arg } => {
            arg.part(tag).mul(&F::from_int(scale)).div(&arg.val)
        }
    }
}

/// The symmetric tensor `c[a][b][g] = ∂³F/∂v_a ∂v_b ∂v_g` over the flat
/// directions of [`flat_directions`], computed by differentiating the
/// pairing table along jet-lifted data.
pub fn c_tensor<F: Coeff>(data: &HurwitzData<F>) -> Result<Vec<Vec<Vec<F>>>> {
    let dirs = flat_directions(data);
    let nn = dirs.len();
    let tag = 0u32;
    let mut c = vec![vec![vec![F::zero(); nn]; nn]; nn];
    for g in 0..nn {
        let lifted = lift_data(data, dirs[g], tag)?;
        for a in 0..nn {
            for b in 0..nn {
                if b < a {
                    c[a][b][g] = c[b][a][g].clone();
                    continue;
                }
                let v = omega_h(&lifted, dirs[a], dirs[b])?;
                c[a][b][g] = omega_part(v, tag)?;
            }
        }
    }
    Ok(c)
}

/// The Gram matrix of [`metric_h`] over the flat directions.
pub fn metric_matrix<F: Coeff>(data: &HurwitzData<F>) -> Result<Vec<Vec<F>>> {
    let dirs = flat_directions(data);
    let nn = dirs.len();
    let mut eta = vec![vec![F::zero(); nn]; nn];
    for a in 0..nn {
        for b in a..nn {
            let v = metric_h(data, dirs[a], dirs[b])?;
            eta[b][a] = v.clone();
            eta[a][b] = v;
        }
    }
    Ok(eta)
}

/// Matrix inverse by Gauss–Jordan elimination with magnitude pivoting.
pub(crate) fn invert_matrix<F: Coeff>(mat: &[Vec<F>]) -> Result<Vec<Vec<F>>> {
    let n = mat.len();
    let mut a: Vec<Vec<F>> = mat.to_vec();
    let mut inv: Vec<Vec<F>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| if r == c { F::one() } else { F::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r1, &r2| {
                a[r1][col]
                    .mag()
                    .partial_cmp(&a[r2][col].mag())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or_else(|| Error::Invalid("singular pairing matrix".into()))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let s = a[col][col].inv()?;
        for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *x = x.mul(&s);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let t = a[col][c].mul(&f);
                a[r][c] = a[r][c].sub(&t);
                let t = inv[col][c].mul(&f);
                inv[r][c] = inv[r][c].sub(&t);
            }
        }
    }
    Ok(inv)
}

/// Largest deviation of the tensor from total symmetry.
pub fn c_symmetry_defect<F: Coeff>(c: &[Vec<Vec<F>>]) -> f64 {
    let nn = c.len();
    let mut worst = 0f64;
    for a in 0..nn {
        for b in 0..nn {
            for g in 0..nn {
                let x = &c[a][b][g];
                for y in [&c[a][g][b], &c[b][a][g], &c[g][b][a]] {
                    worst = worst.max(x.sub(y).mag());
                }
            }
        }
    }
    worst
}

/// Largest associativity defect
/// `max |Σ c_{abe} η^{ev} c_{vsm} − c_{ase} η^{ev} c_{vbm}|` of the
/// product structure defined by [`c_tensor`] and [`metric_matrix`].
pub fn wdvv_residual<F: Coeff>(data: &HurwitzData<F>) -> Result<f64> {
    let c = c_tensor(data)?;
    let eta_inv = invert_matrix(&metric_matrix(data)?)?;
    let nn = c.len();
    let mut worst = 0f64;
    for al in 0..nn {
        for be in 0..nn {
            for si in 0..al {
                for mu in 0..nn {
                    let mut dev = F::zero();
                    for e in 0..nn {
                        for v in 0..nn {
                            if eta_inv[e][v].is_zero() {
                                continue;
                            }
                            let lhs = c[al][be][e].mul(&eta_inv[e][v]).mul(&c[v][si][mu]);
                            let rhs = c[al][si][e].mul(&eta_inv[e][v]).mul(&c[v][be][mu]);
                            dev = dev.add(&lhs.sub(&rhs));
                        }
                    }
                    worst = worst.max(dev.mag());
                }
            }
        }
    }
    Ok(worst)
}

/// One comparison row: the table entry for the rescaled directions
/// `v̂_{i,p}, v̂_{j,q}` against the corresponding puncture correlator on
/// the zero-extended coordinate point, with the truncation threshold that
/// guarantees agreement. For the `log-log` family the compared values are
/// the logarithm arguments.
#[derive(Clone, Debug)]
pub struct StabRow<F: Coeff> {
    pub family: &'static str,
    pub i: usize,
    pub p: usize,
    pub j: usize,
    pub q: usize,
    pub threshold_ok: bool,
    pub lhs: F,
    pub rhs: F,
    pub deviation: f64,
}

impl<F: Coeff> StabRow<F> {
    pub(crate) fn new(
        family: &'static str,
        legs: (usize, usize, usize, usize),
        threshold_ok: bool,
        lhs: F,
        rhs: F,
    ) -> Self {
        let deviation = lhs.sub(&rhs).mag() / lhs.mag().max(1.0);
        StabRow {
            family,
            i: legs.0,
            p: legs.1,
            j: legs.2,
            q: legs.3,
            threshold_ok,
            lhs,
            rhs,
            deviation,
        }
    }
}

/// The zero-extension of the flat coordinates to a coordinate point of
/// the puncture hierarchy: `u_{i,j} = v_{i,j}` on the shared range and
/// zero beyond it.
pub fn zero_extension<F: Coeff>(
    data: &HurwitzData<F>,
    depth: usize,
) -> Result<WhithamPoint<F>> {
    let vc = flat_coords(data)?;
    let mut u0 = vc.v0.clone();
    u0.resize(u0.len().max(depth + 3), F::zero());
    let mut u = Vec::with_capacity(data.m());
    for vk in &vc.v {
        let mut uk = vk.clone();
        uk.resize(uk.len().max(depth + 6), F::zero());
        u.push(uk);
    }
    point_of_u(&UCoords { u0, u })
}

/// Compares every prepotential second derivative of the rescaled flat
/// directions `v̂_{i,p} = n_i v_{i,n_i−p}` (levels `p ≤ pmax`, `q ≤ qmax`,
/// logarithmic slots at level zero) against the matching puncture
/// correlator on the zero-extended point. Each row records whether the
/// profile clears the truncation threshold that makes the two sides
/// provably equal; below the threshold the deviation is reported but not
/// guaranteed to vanish.
pub fn stabilization_report<F: Coeff>(
    data: &HurwitzData<F>,
    pmax: usize,
    qmax: usize,
) -> Result<Vec<StabRow<F>>> {
    let n0 = data.n(0);
    let m = data.m();
    let mpt = zero_extension(data, pmax + qmax)?;
    let inv_n = |a: usize, b: usize| F::from_ratio(1, (data.n(a) * data.n(b)) as i64);
    let fct = |p: usize| factorial::<F>(p as u64 - 1);
    let as_scalar = |v: OmegaValue<F>| -> Result<F> {
        v.scalar()
            .cloned()
            .ok_or_else(|| Error::Unsupported("expected a scalar entry".into()))
    };
    let mut rows = Vec::new();

    for p in 1..=pmax {
        for q in 1..=qmax {
            let ff = fct(p).mul(&fct(q));
            // e–e rows.
            if p < n0 && q < n0 {
                let lhs = omega_h(data, (0, n0 - p), (0, n0 - q))?
                    .scalar()?
                    .mul(&inv_n(0, 0));
                let rhs = as_scalar(omega(&mpt, Sector::E, p - 1, Sector::E, q - 1)?)?.mul(&ff);
                rows.push(StabRow::new("ee", (0, p, 0, q), n0 >= p + q, lhs, rhs));
            }
            // e–h rows.
            for k in 1..=m {
                if p < n0 && q <= data.n(k) {
                    let lhs = omega_h(data, (0, n0 - p), (k, data.n(k) - q))?
                        .scalar()?
                        .mul(&inv_n(0, k));
                    let rhs =
                        as_scalar(omega(&mpt, Sector::E, p - 1, Sector::H0(k), q - 1)?)?.mul(&ff);
                    let ok = n0 >= p && data.n(k) >= q;
                    rows.push(StabRow::new("eh", (0, p, k, q), ok, lhs, rhs));
                }
            }
            // h–h rows.
            for k in 1..=m {
                for k2 in k..=m {
                    if p > data.n(k) || q > data.n(k2) {
                        continue;
                    }
                    let lhs = omega_h(data, (k, data.n(k) - p), (k2, data.n(k2) - q))?
                        .scalar()?
                        .mul(&inv_n(k, k2));
                    let rhs = as_scalar(omega(&mpt, Sector::H0(k), p - 1, Sector::H0(k2), q - 1)?)?
                        .mul(&ff);
                    let (family, ok) = if k == k2 {
                        ("hh-same", data.n(k) >= p + q + 1)
                    } else {
                        ("hh-cross", data.n(k) >= p && data.n(k2) >= q)
                    };
                    rows.push(StabRow::new(family, (k, p, k2, q), ok, lhs, rhs));
                }
            }
        }
    }
    // Rows with one logarithmic leg.
    for p in 1..=pmax {
        let f1 = fct(p);
        for k2 in 1..=m {
            if p < n0 {
                let lhs = omega_h(data, (0, n0 - p), (k2, data.n(k2)))?
                    .scalar()?
                    .mul(&inv_n(0, k2));
                let rhs = as_scalar(omega(&mpt, Sector::E, p - 1, Sector::H1(k2), 0)?)?.mul(&f1);
                rows.push(StabRow::new("e-log", (0, p, k2, 0), n0 >= p + 1, lhs, rhs));
            }
            for k in 1..=m {
                if p > data.n(k) {
                    continue;
                }
                let lhs = omega_h(data, (k, data.n(k) - p), (k2, data.n(k2)))?
                    .scalar()?
                    .mul(&inv_n(k, k2));
                let rhs =
                    as_scalar(omega(&mpt, Sector::H0(k), p - 1, Sector::H1(k2), 0)?)?.mul(&f1);
                let (family, ok) = if k == k2 {
                    ("h-log-same", data.n(k) >= p + 1)
                } else {
                    ("h-log-cross", data.n(k) >= p)
                };
                rows.push(StabRow::new(family, (k, p, k2, 0), ok, lhs, rhs));
            }
        }
    }
    // Rows with two logarithmic legs: the arguments are compared after
    // normalizing the scale.
    for k in 1..=m {
        for k2 in k..=m {
            let lhs = match omega_h(data, (k, data.n(k)), (k2, data.n(k2)))? {
                HurwitzOmega::Log { scale, arg } => {
                    debug_assert_eq!(scale as usize, data.n(k) * data.n(k2));
                    arg
                }
                HurwitzOmega::Scalar(_) => unreachable!("both legs logarithmic"),
            };
            let rhs = match omega(&mpt, Sector::H1(k), 0, Sector::H1(k2), 0)? {
                OmegaValue::Log(arg) => arg,
                OmegaValue::Scalar(_) => unreachable!("both legs logarithmic"),
            };
            rows.push(StabRow::new("log-log", (k, 0, k2, 0), true, lhs, rhs));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Rat;
    use crate::whitham::u_coords;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    /// λ = z + 5/(z − 2).
    fn one_pole() -> HurwitzData<Rat> {
        HurwitzData::new(
            1,
            vec![],
            vec![HurwitzPole {
                loc: r(2),
                coeffs: vec![r(5)],
                root: None,
            }],
        )
        .unwrap()
    }

    /// λ = z² + a₀₀.
    fn a1(a00: i64) -> HurwitzData<Rat> {
        HurwitzData::new(2, vec![r(a00)], vec![]).unwrap()
    }

    /// λ = z³ + a₀₁ z + a₀₀.
    fn a2(a00: i64, a01: i64) -> HurwitzData<Rat> {
        HurwitzData::new(3, vec![r(a00), r(a01)], vec![]).unwrap()
    }

    /// λ = z² + 3 + (z − 1)^{-1} + 4 (z − 1)^{-2}, top a perfect square.
    fn two_two() -> HurwitzData<Rat> {
        HurwitzData::new(
            2,
            vec![r(3)],
            vec![HurwitzPole {
                loc: r(1),
                coeffs: vec![r(1), r(4)],
                root: Some(r(2)),
            }],
        )
        .unwrap()
    }

    #[test]
    fn superpotential_expansions_match_hand_values() {
        let d = one_pole();
        let at_inf = superpotential(&d, 0, 5).unwrap();
        // z + 5 z^{-1} + 10 z^{-2} + 20 z^{-3}
        assert_eq!(at_inf.coeff_nat(1).unwrap(), r(1));
        assert_eq!(at_inf.coeff_nat(0).unwrap(), r(0));
        assert_eq!(at_inf.coeff_nat(-1).unwrap(), r(5));
        assert_eq!(at_inf.coeff_nat(-2).unwrap(), r(10));
        assert_eq!(at_inf.coeff_nat(-3).unwrap(), r(20));
        let at_pole = superpotential(&d, 1, 4).unwrap();
        // 5 w^{-1} + 2 + w
        assert_eq!(at_pole.coeff_nat(-1).unwrap(), r(5));
        assert_eq!(at_pole.coeff_nat(0).unwrap(), r(2));
        assert_eq!(at_pole.coeff_nat(1).unwrap(), r(1));

        assert!(HurwitzData::<Rat>::new(2, vec![], vec![]).is_err());
        assert!(HurwitzData::new(
            1,
            vec![],
            vec![HurwitzPole { loc: r(0), coeffs: vec![r(0)], root: None }]
        )
        .is_err());
        assert!(HurwitzData::new(
            1,
            vec![],
            vec![
                HurwitzPole { loc: r(1), coeffs: vec![r(2)], root: None },
                HurwitzPole { loc: r(1), coeffs: vec![r(3)], root: None },
            ]
        )
        .is_err());
        assert!(HurwitzData::new(
            1,
            vec![],
            vec![HurwitzPole { loc: r(0), coeffs: vec![r(8)], root: Some(r(3)) }]
        )
        .is_err());
    }

    #[test]
    fn flat_coordinates_fixtures() {
        // Cubic at infinity: v_{0,1} = a₀₁/3, v_{0,2} = a₀₀/3.
        let vc = flat_coords(&a2(9, 6)).unwrap();
        assert_eq!(vc.v0, vec![r(2), r(3)]);
        // Quadratic: v_{0,1} = a₀₀/2.
        let vc = flat_coords(&a1(4)).unwrap();
        assert_eq!(vc.v0, vec![r(2)]);
        // Simple pole: v_{1,0} the location, v_{1,1} the residue.
        let vc = flat_coords(&one_pole()).unwrap();
        assert!(vc.v0.is_empty());
        assert_eq!(vc.v[0], vec![r(2), r(5)]);
        // Double pole: v_{1,1} is the chosen square root of the top
        // coefficient, branch respected.
        let mut d = two_two();
        let vc = flat_coords(&d).unwrap();
        assert_eq!(vc.v[0][0], r(1));
        assert_eq!(vc.v[0][1], r(2));
        d.poles[0].root = Some(r(-2));
        let vc = flat_coords(&d).unwrap();
        assert_eq!(vc.v[0][1], r(-2));
        // Fractional powers of a non-perfect power need a supplied root.
        d.poles[0].root = None;
        d.poles[0].coeffs[1] = r(5);
        assert!(flat_coords(&d).is_err());
    }

    #[test]
    fn coordinate_fields_fixtures() {
        // ∂λ/∂v_{0,1} = 2 for the quadratic.
        let f = dlambda_dv(&a1(4), 0, 1).unwrap();
        assert_eq!(f, GlobalRational::from_poly(vec![r(2)]));
        // ∂λ/∂v_{1,0} = a₁₁ (z − a₁₀)^{-2} for the simple pole.
        let f = dlambda_dv(&one_pole(), 1, 0).unwrap();
        assert_eq!(f, GlobalRational::from_part(r(2), vec![r(0), r(5)]));
        // ∂λ/∂v_{1,1} = (z − a₁₀)^{-1}: the residue is a flat coordinate.
        let f = dlambda_dv(&one_pole(), 1, 1).unwrap();
        assert_eq!(f, GlobalRational::from_part(r(2), vec![r(1)]));
    }

    #[test]
    fn lifted_data_moves_flat_coordinates_by_unit_tangents() {
        let tag = 3u32;
        for data in [two_two(), a2(2, -3)] {
            let dirs = flat_directions(&data);
            for dir in &dirs {
                let lifted = lift_data(&data, *dir, tag).unwrap();
                let vc = flat_coords(&lifted).unwrap();
                let mut slots: Vec<((usize, usize), Jet<Rat>)> = Vec::new();
                for (j, v) in vc.v0.iter().enumerate() {
                    slots.push(((0, j + 1), v.clone()));
                }
                for (i, vi) in vc.v.iter().enumerate() {
                    for (j, v) in vi.iter().enumerate() {
                        slots.push(((i + 1, j), v.clone()));
                    }
                }
                for (slot, v) in slots {
                    let want = if slot == *dir { r(1) } else { r(0) };
                    assert_eq!(v.part(tag), want, "∂v{slot:?}/∂v{dir:?}");
                }
            }
        }
    }

    #[test]
    fn theta_fixtures() {
        // Quadratic: θ_{v₀₁,0} = a₀₀ and θ_{v₀₁,1} = a₀₀²/2.
        assert_eq!(theta_h(&a1(4), 0, 1, 0).unwrap(), r(4));
        assert_eq!(theta_h(&a1(4), 0, 1, 1).unwrap(), r(8));
        // Simple pole: θ_{v₁₀,0} = a₁₁, θ_{v₁₀,1} = a₁₀ a₁₁.
        assert_eq!(theta_h(&one_pole(), 1, 0, 0).unwrap(), r(5));
        assert_eq!(theta_h(&one_pole(), 1, 0, 1).unwrap(), r(10));
        // Logarithmic slots have no density at positive level.
        assert!(theta_h(&one_pole(), 1, 1, 0).is_err());
        assert!(theta_h(&a1(4), 0, 2, 0).is_err());
    }

    #[test]
    fn pairing_table_fixtures() {
        // Quadratic diagonal: Ω_{v₀₁,v₀₁} = 2 a₀₀ = 4 v₀₁.
        let v = omega_h(&a1(4), (0, 1), (0, 1)).unwrap();
        assert_eq!(v, HurwitzOmega::Scalar(r(8)));
        // Two simple poles at 2 and 0: the log–log entry is log(2 − 0).
        let d = HurwitzData::new(
            1,
            vec![],
            vec![
                HurwitzPole { loc: r(2), coeffs: vec![r(1)], root: None },
                HurwitzPole { loc: r(0), coeffs: vec![r(1)], root: None },
            ],
        )
        .unwrap();
        let v = omega_h(&d, (1, 1), (2, 1)).unwrap();
        assert_eq!(v, HurwitzOmega::Log { scale: 1, arg: r(2) });
        // Diagonal log–log entry: n₁² log v_{1,1}.
        let v = omega_h(&two_two(), (1, 2), (1, 2)).unwrap();
        assert_eq!(v, HurwitzOmega::Log { scale: 4, arg: r(2) });
    }

    #[test]
    fn pairing_table_is_symmetric() {
        let d = two_two();
        let dirs = flat_directions(&d);
        assert_eq!(dirs, vec![(0, 1), (1, 0), (1, 1), (1, 2)]);
        for a in &dirs {
            for b in &dirs {
                let ab = omega_h(&d, *a, *b).unwrap();
                let ba = omega_h(&d, *b, *a).unwrap();
                match (ab, ba) {
                    (HurwitzOmega::Scalar(x), HurwitzOmega::Scalar(y)) => assert_eq!(x, y),
                    (
                        HurwitzOmega::Log { scale: s1, arg: a1 },
                        HurwitzOmega::Log { scale: s2, arg: a2 },
                    ) => {
                        assert_eq!(s1, s2);
                        assert_eq!(a1, a2);
                    }
                    _ => panic!("mixed kinds under index swap"),
                }
            }
        }
    }

    #[test]
    fn metric_fixtures() {
        // ⟨∂_{v₀₁}, ∂_{v₀₁}⟩ = 2 for the quadratic.
        assert_eq!(metric_h(&a1(4), (0, 1), (0, 1)).unwrap(), r(2));
        // Polynomial superpotentials: η_{jl} = n₀ δ_{j+l,n₀}, constant in
        // the coefficients.
        for data in [a2(2, 5), a2(-1, 7)] {
            for j in 1..=2usize {
                for l in 1..=2usize {
                    let want = if j + l == 3 { r(3) } else { r(0) };
                    assert_eq!(metric_h(&data, (0, j), (0, l)).unwrap(), want);
                }
            }
        }
        // Simple pole: the critical points of z + a₁₁/(z−a₁₀) sit at
        // a₁₀ ± √a₁₁ and the residue sum there gives the constant matrix
        // [[0, 1], [1, 0]] in the coordinates (v₁₀, v₁₁).
        for d in [one_pole(), HurwitzData::new(
            1,
            vec![],
            vec![HurwitzPole { loc: r(0), coeffs: vec![r(1)], root: None }],
        )
        .unwrap()]
        {
            assert_eq!(metric_h(&d, (1, 0), (1, 0)).unwrap(), r(0));
            assert_eq!(metric_h(&d, (1, 0), (1, 1)).unwrap(), r(1));
            assert_eq!(metric_h(&d, (1, 1), (1, 1)).unwrap(), r(0));
        }
    }

    #[test]
    fn embedding_matches_flat_coordinates() {
        for data in [two_two(), one_pole(), a2(4, -2)] {
            let pt = embed(&data, 12).unwrap();
            let uc = u_coords(&pt).unwrap();
            let vc = flat_coords(&data).unwrap();
            for (j, v) in vc.v0.iter().enumerate() {
                assert_eq!(uc.u0[j], *v, "u0[{j}]");
            }
            for (i, vi) in vc.v.iter().enumerate() {
                for (j, v) in vi.iter().enumerate() {
                    assert_eq!(uc.u[i][j], *v, "u[{i}][{j}]");
                }
            }
        }
        // Beyond the shared range the embedding has nonzero tails: for
        // λ = z² + 4, u_{0,3} = a₀₀²/8 = 2 while the zero-extension pads
        // with zeros. That distinction is what the truncation thresholds
        // in the stabilization report are about.
        let pt = embed(&a1(4), 12).unwrap();
        let uc = u_coords(&pt).unwrap();
        assert_eq!(uc.u0[0], r(2));
        assert_eq!(uc.u0[1], r(0));
        assert_eq!(uc.u0[2], r(2));
    }

    #[test]
    fn stabilization_rows_agree_above_threshold() {
        let d = HurwitzData::new(
            3,
            vec![r(2), r(-1)],
            vec![HurwitzPole { loc: r(1), coeffs: vec![r(3), r(-2), r(8)], root: Some(r(2)) }],
        )
        .unwrap();
        let rows = stabilization_report(&d, 3, 3).unwrap();
        for row in &rows {
            if row.threshold_ok {
                assert_eq!(row.lhs, row.rhs, "{} {:?}", row.family, (row.i, row.p, row.j, row.q));
                assert_eq!(row.deviation, 0.0);
            }
        }
        let find = |fam: &str, legs: (usize, usize, usize, usize)| {
            rows.iter()
                .find(|r| r.family == fam && (r.i, r.p, r.j, r.q) == legs)
                .unwrap_or_else(|| panic!("missing row {fam} {legs:?}"))
        };
        assert!(find("ee", (0, 1, 0, 1)).threshold_ok); // n₀ = 3 ≥ 2
        assert!(!find("ee", (0, 2, 0, 2)).threshold_ok); // 3 < 4
        assert!(find("hh-same", (1, 1, 1, 1)).threshold_ok); // n₁ = 3 ≥ 3
        assert!(!find("hh-same", (1, 2, 1, 2)).threshold_ok); // 3 < 5
        assert!(find("eh", (0, 2, 1, 2)).threshold_ok);
        assert!(find("e-log", (0, 2, 1, 0)).threshold_ok); // 3 ≥ 3
        assert!(!find("h-log-same", (1, 3, 1, 0)).threshold_ok); // 3 < 4
        let ll = find("log-log", (1, 0, 1, 0));
        assert!(ll.threshold_ok);
        assert_eq!(ll.lhs, r(2)); // v_{1,1} = ρ on both sides
    }

    #[test]
    fn associativity_holds_exactly_on_rational_data() {
        for data in [a1(4), a2(2, -3), two_two()] {
            let c = c_tensor(&data).unwrap();
            assert_eq!(c_symmetry_defect(&c), 0.0);
            assert_eq!(wdvv_residual(&data).unwrap(), 0.0);
        }
    }
}
