//! Truncated Laurent (and Puiseux) series with honest truncation windows.
//!
//! A series is anchored at a *center*: either a finite point `φ`, with local
//! parameter `w = z − φ`, or the point at infinity, with local parameter
//! `w = 1/z`. Internally every series is a finite coefficient window in
//! ascending powers of `w^(1/denom)`:
//!
//! * `low` — the smallest internal exponent carried; exponents below it are
//!   *known to vanish*;
//! * `order` — the exclusive upper bound of knowledge: all internal
//!   exponents `< order` are determined, everything at or beyond it is
//!   unknown;
//! * `coeffs[i]` — the coefficient of `w^((low + i)/denom)`, so
//!   `coeffs.len() == order − low`.
//!
//! Natural exponents (powers of `z − φ`, or of `z` at infinity) relate to
//! internal ones by `nat = int/denom` at a finite center and
//! `nat = −int/denom` at infinity, so that ascending internal order always
//! means "towards the center". Every operation recomputes the output window
//! from the input windows; reading past the window raises
//! [`crate::Error::InsufficientTruncation`] rather than returning a wrong
//! coefficient.

use crate::coeff::Coeff;
use crate::{Error, Result};
use num_integer::Integer;
use std::fmt;

/// Expansion center of a series.
#[derive(Clone, Debug, PartialEq)]
pub enum Center<F> {
    /// The point at infinity; local parameter `1/z`.
    Infinity,
    /// A finite point `φ`; local parameter `z − φ`.
    Finite(F),
}

impl<F: Coeff> Center<F> {
    pub(crate) fn describe(&self) -> String {
        match self {
            Center::Infinity => "infinity".to_string(),
            Center::Finite(p) => format!("{p}"),
        }
    }
}

impl<F: Coeff> fmt::Display for Center<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

/// Truncated Laurent/Puiseux series at a fixed center.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<F> {
    center: Center<F>,
    denom: i64,
    low: i64,
    order: i64,
    coeffs: Vec<F>,
}

impl<F: Coeff> LaurentSeries<F> {
    /// Builds a series directly from its internal representation.
    ///
    /// `coeffs[i]` is the coefficient of `w^((low + i)/denom)` and the
    /// window claim is that all internal exponents below `low + coeffs.len()`
    /// are determined. Leading zeros are trimmed away.
    pub fn from_parts(center: Center<F>, denom: i64, low: i64, coeffs: Vec<F>) -> Self {
        assert!(denom >= 1, "denominator must be positive");
        let order = low + coeffs.len() as i64;
        let mut s = LaurentSeries {
            center,
            denom,
            low,
            order,
            coeffs,
        };
        s.trim();
        s
    }

    /// The zero series, known to vanish below internal exponent `order`.
    pub fn zero_window(center: Center<F>, denom: i64, order: i64) -> Self {
        assert!(denom >= 1, "denominator must be positive");
        LaurentSeries {
            center,
            denom,
            low: order,
            order,
            coeffs: Vec::new(),
        }
    }

    /// Builds a series from terms in *natural* exponents (powers of `z − φ`,
    /// or of `z` at infinity; integer exponents only).
    ///
    /// `known` bounds the window in natural terms: at a finite center all
    /// natural exponents `< known` are determined; at infinity all natural
    /// exponents `> known` are determined. Terms outside the window panic.
    pub fn from_terms(center: Center<F>, terms: &[(i64, F)], known: i64) -> Self {
        let at_inf = matches!(center, Center::Infinity);
        let order = if at_inf { -known } else { known };
        let mut low = order;
        for (n, _) in terms {
            let e = if at_inf { -n } else { *n };
            assert!(e < order, "term exponent {n} outside the known window");
            low = low.min(e);
        }
        let mut coeffs = vec![F::zero(); (order - low) as usize];
        for (n, c) in terms {
            let e = if at_inf { -n } else { *n };
            let slot = &mut coeffs[(e - low) as usize];
            *slot = slot.add(c);
        }
        Self::from_parts(center, 1, low, coeffs)
    }

    /// The constant series `c`, with the same window convention as
    /// [`LaurentSeries::from_terms`].
    pub fn constant(center: Center<F>, c: F, known: i64) -> Self {
        Self::from_terms(center, &[(0, c)], known)
    }

    pub fn center(&self) -> &Center<F> {
        &self.center
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    /// Smallest internal exponent carried (everything below is known zero).
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Exclusive internal bound of knowledge.
    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// True when no nonzero coefficient is known.
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trim(&mut self) {
        let lead = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
    }

    fn window_error(&self, internal: i64) -> Error {
        let (num, den) = match self.center {
            Center::Infinity => (-internal, self.denom),
            Center::Finite(_) => (internal, self.denom),
        };
        let needed = if den == 1 {
            format!("{num}")
        } else {
            format!("{num}/{den}")
        };
        let order = if self.denom == 1 {
            format!("{}", self.order)
        } else {
            format!("{}/{}", self.order, self.denom)
        };
        Error::InsufficientTruncation {
            center: self.center.describe(),
            needed,
            order,
        }
    }

    /// Coefficient at an internal exponent.
    pub fn coeff_int(&self, e: i64) -> Result<F> {
        if e < self.low {
            Ok(F::zero())
        } else if e < self.order {
            Ok(self.coeffs[(e - self.low) as usize].clone())
        } else {
            Err(self.window_error(e))
        }
    }

    /// Coefficient at an integer natural exponent.
    pub fn coeff_nat(&self, n: i64) -> Result<F> {
        let e = match self.center {
            Center::Infinity => -n * self.denom,
            Center::Finite(_) => n * self.denom,
        };
        self.coeff_int(e)
    }

    /// Residue `Res f dz` at the series' own center. At infinity this is
    /// `−[z^{-1}] f`, matching `Res_∞ = −Res_0` under `z ↦ 1/z` with the
    /// orientation that makes all residues of a rational function sum to 0.
    pub fn residue(&self) -> Result<F> {
        let c = self.coeff_nat(-1)?;
        Ok(match self.center {
            Center::Infinity => c.neg(),
            Center::Finite(_) => c,
        })
    }

    fn require_same_center(&self, rhs: &Self) -> Result<()> {
        if self.center != rhs.center {
            return Err(Error::CenterMismatch {
                left: self.center.describe(),
                right: rhs.center.describe(),
            });
        }
        Ok(())
    }

    /// Regrids onto a denominator that is a multiple of the current one.
    fn regrid(&self, denom: i64) -> Self {
        debug_assert!(denom % self.denom == 0);
        let f = denom / self.denom;
        if f == 1 {
            return self.clone();
        }
        let mut coeffs = vec![F::zero(); (self.coeffs.len() as i64 * f) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * f as usize] = c.clone();
        }
        LaurentSeries {
            center: self.center.clone(),
            denom,
            low: self.low * f,
            order: self.order * f,
            coeffs,
        }
    }

    fn aligned(&self, rhs: &Self) -> (Self, Self) {
        let d = self.denom.lcm(&rhs.denom);
        (self.regrid(d), rhs.regrid(d))
    }

    /// Divides the exponent grid by any common factor, e.g. turning a
    /// formally fractional-exponent series whose support is integral back
    /// into an ordinary Laurent series.
    pub fn reduce_grid(mut self) -> Self {
        let mut g = self.denom.gcd(&self.low).gcd(&self.order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                g = g.gcd(&(self.low + i as i64));
            }
            if g == 1 {
                break;
            }
        }
        if g <= 1 {
            return self;
        }
        let low = self.low / g;
        let order = self.order / g;
        let mut coeffs = vec![F::zero(); (order - low) as usize];
        for (i, c) in self.coeffs.drain(..).enumerate() {
            let e = self.low + i as i64;
            if e % g == 0 {
                coeffs[((e / g) - low) as usize] = c;
            }
        }
        LaurentSeries {
            center: self.center,
            denom: self.denom / g,
            low,
            order,
            coeffs,
        }
    }

    /// Restricts the window to internal exponents `< order`.
    pub fn truncate_to(&self, order: i64) -> Self {
        if order >= self.order {
            return self.clone();
        }
        if order <= self.low {
            return Self::zero_window(self.center.clone(), self.denom, order);
        }
        let mut out = self.clone();
        out.coeffs.truncate((order - out.low) as usize);
        out.order = order;
        out.trim();
        out
    }

    /// Splits the series as `f = f_{≥0} + f_{<0}` by the sign of the
    /// natural exponent: at infinity the first half is the polynomial
    /// part and the second the decaying tail, at a finite center they are
    /// the regular and the principal part. Both halves keep the original
    /// window, so the split is exact on every determined coefficient.
    pub fn split_nonnegative(&self) -> (Self, Self) {
        // Natural exponent ≥ 0 means internal exponent ≤ 0 at infinity
        // and ≥ 0 at a finite center.
        let at_inf = matches!(self.center, Center::Infinity);
        let mut nonneg = self.coeffs.clone();
        let mut negative = self.coeffs.clone();
        for idx in 0..self.coeffs.len() {
            let e = self.low + idx as i64;
            let keep = if at_inf { e <= 0 } else { e >= 0 };
            if keep {
                negative[idx] = F::zero();
            } else {
                nonneg[idx] = F::zero();
            }
        }
        (
            Self::from_parts(self.center.clone(), self.denom, self.low, nonneg),
            Self::from_parts(self.center.clone(), self.denom, self.low, negative),
        )
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.require_same_center(rhs)?;
        let (a, b) = self.aligned(rhs);
        let order = a.order.min(b.order);
        let low = a.low.min(b.low).min(order);
        let mut coeffs = Vec::with_capacity((order - low) as usize);
        for e in low..order {
            // Both reads are inside the respective windows or below them.
            coeffs.push(a.coeff_int(e).unwrap().add(&b.coeff_int(e).unwrap()));
        }
        Ok(Self::from_parts(a.center, a.denom, low, coeffs))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = c.neg();
        }
        out
    }

    /// Multiplies every coefficient by a scalar.
    pub fn scale(&self, c: &F) -> Self {
        let mut out = self.clone();
        for x in &mut out.coeffs {
            *x = x.mul(c);
        }
        out.trim();
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.require_same_center(rhs)?;
        let (a, b) = self.aligned(rhs);
        // A product coefficient at n is complete while no unknown exponent
        // (≥ order) of either factor can pair with a known one of the other.
        let order = (a.order + b.low).min(b.order + a.low);
        let low = a.low + b.low;
        if a.coeffs.is_empty() || b.coeffs.is_empty() || order <= low {
            return Ok(Self::zero_window(a.center, a.denom, order));
        }
        let mut coeffs = vec![F::zero(); (order - low) as usize];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let ea = a.low + i as i64;
            for (j, y) in b.coeffs.iter().enumerate() {
                let n = ea + b.low + j as i64;
                if n >= order {
                    break;
                }
                let slot = &mut coeffs[(n - low) as usize];
                *slot = slot.add(&x.mul(y));
            }
        }
        Ok(Self::from_parts(a.center, a.denom, low, coeffs))
    }

    /// Multiplicative inverse. Requires a known nonzero leading coefficient;
    /// the window shrinks to `order − 2·low`.
    pub fn invert(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let n = self.coeffs.len();
        let lead = self.coeffs[0].inv()?;
        // Relative inversion: (Σ a_i w^i)^{-1} with a_0 = leading.
        let mut out = Vec::with_capacity(n);
        out.push(lead.clone());
        for k in 1..n {
            let mut acc = F::zero();
            for j in 1..=k {
                acc = acc.add(&self.coeffs[j].mul(&out[k - j]));
            }
            out.push(acc.mul(&lead).neg());
        }
        Ok(Self::from_parts(self.center.clone(), self.denom, -self.low, out))
    }

    /// Derivative with respect to `z` (not the local parameter).
    pub fn derive(&self) -> Self {
        let at_inf = matches!(self.center, Center::Infinity);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.low + i as i64;
            // d/dz w^(e/d) = (e/d) w^(e/d − 1) at a finite center and
            // −(e/d) w^(e/d + 1) at infinity (w = 1/z).
            let factor = if at_inf {
                F::from_ratio(-e, self.denom)
            } else {
                F::from_ratio(e, self.denom)
            };
            coeffs.push(c.mul(&factor));
        }
        let step = if at_inf { self.denom } else { -self.denom };
        Self::from_parts(self.center.clone(), self.denom, self.low + step, coeffs)
    }

    /// Integer power via the rational-power recurrence.
    pub fn pow_int(&self, n: i64) -> Result<Self> {
        if n == 1 {
            return Ok(self.clone());
        }
        if self.coeffs.is_empty() {
            if n >= 1 {
                return Ok(Self::zero_window(
                    self.center.clone(),
                    self.denom,
                    self.order * n,
                ));
            }
            return Err(Error::DivisionByZero);
        }
        self.pow_ratio(n, 1, None)
    }

    /// Raises the series to the power `num/den` (no reduction is applied:
    /// `den` names the root being taken). The leading coefficient must
    /// admit a `den`-th root; one may be supplied explicitly, which is how
    /// exact backends choose a branch that is not a perfect power.
    pub fn pow_ratio(&self, num: i64, den: i64, root: Option<&F>) -> Result<Self> {
        assert!(den >= 1, "root degree must be positive");
        if self.coeffs.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let lead = &self.coeffs[0];
        let rho = match root {
            Some(r) => {
                let p = r.pow_int(den)?;
                let dev = p.sub(lead).mag();
                if p != *lead && dev > 1e-12 * lead.mag().max(1.0) {
                    return Err(Error::Invalid(format!(
                        "supplied root {r} is not a {den}th root of {lead}"
                    )));
                }
                r.clone()
            }
            None => lead.nth_root(den as u32)?,
        };
        let scale = rho.pow_int(num)?;
        // g = (1 + h)^r with h the relative tail; Miller's recurrence
        // n g_n = Σ_{j=1}^{n} ((r+1) j − n) h_j g_{n−j}.
        let inv_lead = lead.inv()?;
        let nrel = self.coeffs.len();
        let mut h = Vec::with_capacity(nrel);
        for c in &self.coeffs {
            h.push(c.mul(&inv_lead));
        }
        let mut g = Vec::with_capacity(nrel);
        g.push(F::one());
        for n in 1..nrel {
            let mut acc = F::zero();
            for j in 1..=n {
                if h[j].is_zero() {
                    continue;
                }
                let c = F::from_ratio((num + den) * j as i64 - n as i64 * den, den * n as i64);
                acc = acc.add(&c.mul(&h[j]).mul(&g[n - j]));
            }
            g.push(acc);
        }
        // Output grid: exponents low·num + j·den over denom·den.
        let d_out = self.denom * den;
        let low_out = self.low * num;
        let order_out = low_out + nrel as i64 * den;
        let mut coeffs = vec![F::zero(); (order_out - low_out) as usize];
        for (j, c) in g.into_iter().enumerate() {
            coeffs[j * den as usize] = c.mul(&scale);
        }
        Ok(
            Self::from_parts(self.center.clone(), d_out, low_out, coeffs)
                .truncate_to(order_out)
                .reduce_grid(),
        )
    }

    /// Substitutes `inner` for the variable of `self`. The inner series must
    /// approach this series' center: after recentering (subtracting `φ`, or
    /// inverting at infinity) its leading exponent must be positive. The
    /// result lives at the inner series' center.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.denom != 1 {
            return Err(Error::Puiseux(
                "composition of fractional-exponent series".into(),
            ));
        }
        let s = match &self.center {
            Center::Finite(phi) => {
                let c = LaurentSeries::constant(inner.center.clone(), phi.clone(), {
                    // A constant is exact; give it a window matching inner.
                    match inner.center {
                        Center::Infinity => -(inner.order + 1),
                        Center::Finite(_) => inner.order + 1,
                    }
                });
                inner.sub(&c)?
            }
            Center::Infinity => inner.invert()?,
        };
        if !s.coeffs.is_empty() && s.low <= 0 {
            return Err(Error::Invalid(
                "inner series does not approach the outer center".into(),
            ));
        }
        let ls = s.low.max(1);
        let cap = self.order.saturating_mul(ls);
        let mut acc = Self::zero_window(s.center.clone(), 1, (self.low - 1) * ls + s.order);
        let mut power = s.pow_int(self.low)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.mul(&s)?;
            }
            if !c.is_zero() {
                acc = acc.add(&power.scale(c))?;
            }
        }
        Ok(acc.truncate_to(cap.min(acc.order)))
    }

    /// Functional inverse. Three shapes are supported:
    ///
    /// * at infinity, a monic `a = z + c_0 + c_{-1}/z + …` (leading
    ///   coefficient one at natural exponent 1) yields `z(a)` as a series at
    ///   infinity in `a` with the same window;
    /// * at a finite center, a simple pole `â = c_{-1}/w + c_0 + …` yields
    ///   `z(â) = φ + w(â)` as a series at infinity in `â` (constant term
    ///   included), with window `order + 2`;
    /// * at infinity with leading natural exponent 0, i.e.
    ///   `f = c_0 + c_1/v + …` with `c_1 ≠ 0`, the inverse of the previous
    ///   shape: the result is a simple pole at the finite center `c_0`, with
    ///   window `order − 2`.
    pub fn revert(&self) -> Result<Self> {
        if self.denom != 1 {
            return Err(Error::Puiseux("reversion of fractional exponents".into()));
        }
        if matches!(self.center, Center::Infinity) && (self.low == 0 || self.low == 1) {
            // `low == 1` is shape three with a trimmed zero constant term:
            // the inverse has its pole at the origin.
            return self.revert_to_pole();
        }
        if self.low != -1 || self.coeffs.is_empty() {
            return Err(Error::Invalid(
                "reversion requires a simple pole in the local parameter".into(),
            ));
        }
        if matches!(self.center, Center::Infinity) && self.coeffs[0] != F::one() {
            return Err(Error::Invalid(
                "reversion at infinity requires a monic series".into(),
            ));
        }
        let g = self.invert()?;
        debug_assert_eq!(g.low, 1);
        let b = g.coeffs.clone();
        let rev = revert_power_series(&b)?;
        let inner = Self::from_parts(Center::Infinity, 1, 1, rev);
        let inner = inner.truncate_to(g.order);
        match &self.center {
            Center::Infinity => inner.invert(),
            Center::Finite(phi) => {
                let c = Self::constant(Center::Infinity, phi.clone(), -g.order);
                inner.add(&c)
            }
        }
    }

    /// Shape three of [`revert`](Self::revert): `f = c_0 + c_1/v + …` at
    /// infinity becomes `v(f)`, a simple pole at the finite center `c_0`.
    fn revert_to_pole(&self) -> Result<Self> {
        debug_assert!(self.low == 0 || self.low == 1);
        if self.coeffs.is_empty() {
            return Err(Error::Invalid(
                "reversion requires a nonempty window".into(),
            ));
        }
        let (loc, b) = if self.low == 0 {
            (self.coeffs[0].clone(), self.coeffs[1..].to_vec())
        } else {
            (F::zero(), self.coeffs.clone())
        };
        // y = f − c_0 = c_1/v + c_2/v² + … as coefficients of a power series
        // in 1/v; its reversion gives 1/v as a power series in y = z − c_0.
        let tail = Self::from_parts(Center::Infinity, 1, 1, b);
        if tail.is_empty() || tail.low != 1 {
            return Err(Error::Invalid(
                "reversion requires a nonzero subleading coefficient".into(),
            ));
        }
        let rev = revert_power_series(&tail.coeffs)?;
        let inner = Self::from_parts(Center::Finite(loc), 1, 1, rev);
        let inner = inner.truncate_to(tail.order);
        inner.invert()
    }
}

/// Reverts `t ↦ b(t) = b_1 t + b_2 t² + …` (`b[0] = b_1 ≠ 0`), returning
/// `B` with `t = B_1 b + B_2 b² + …` to the same length.
fn revert_power_series<F: Coeff>(b: &[F]) -> Result<Vec<F>> {
    let n = b.len();
    let mut out: Vec<F> = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let b1_inv = b[0].inv()?;
    // powers[k][m] = [t^{m+1}] b(t)^{k+1}, triangular table.
    let mut powers: Vec<Vec<F>> = vec![b.to_vec()];
    for k in 1..n {
        let prev = &powers[k - 1];
        let mut next = vec![F::zero(); n];
        for (i, x) in prev.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let m = i + j + 1;
                if m >= n {
                    break;
                }
                next[m] = next[m].add(&x.mul(y));
            }
        }
        powers.push(next);
    }
    let mut lead_pow = b1_inv.clone();
    for m in 0..n {
        // [t^{m+1}] t = δ_{m,0} = Σ_{k≤m} B_{k+1} [t^{m+1}] b^{k+1}
        let mut acc = if m == 0 { F::one() } else { F::zero() };
        for (k, bk) in out.iter().enumerate() {
            acc = acc.sub(&bk.mul(&powers[k][m]));
        }
        out.push(acc.mul(&lead_pow));
        lead_pow = lead_pow.mul(&b1_inv);
    }
    Ok(out)
}

impl<F: Coeff> fmt::Display for LaurentSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match &self.center {
            Center::Infinity => "z".to_string(),
            Center::Finite(p) if p.is_zero() => "z".to_string(),
            Center::Finite(p) => format!("(z - {p})"),
        };
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.low + i as i64;
            let nat_num = if matches!(self.center, Center::Infinity) {
                -e
            } else {
                e
            };
            if wrote {
                write!(f, " + ")?;
            }
            if nat_num == 0 {
                write!(f, "({c})")?;
            } else if self.denom == 1 {
                write!(f, "({c}){var}^{nat_num}")?;
            } else {
                write!(f, "({c}){var}^({nat_num}/{})", self.denom)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        let onum = if matches!(self.center, Center::Infinity) {
            -self.order
        } else {
            self.order
        };
        if self.denom == 1 {
            write!(f, " + O({var}^{onum})")
        } else {
            write!(f, " + O({var}^({onum}/{}))", self.denom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rr(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn at_inf(terms: &[(i64, i64)], known: i64) -> LaurentSeries<Rat> {
        let t: Vec<(i64, Rat)> = terms.iter().map(|(e, c)| (*e, r(*c))).collect();
        LaurentSeries::from_terms(Center::Infinity, &t, known)
    }

    fn at_zero(terms: &[(i64, i64)], known: i64) -> LaurentSeries<Rat> {
        let t: Vec<(i64, Rat)> = terms.iter().map(|(e, c)| (*e, r(*c))).collect();
        LaurentSeries::from_terms(Center::Finite(r(0)), &t, known)
    }

    #[test]
    fn windows_and_access() {
        let s = at_inf(&[(1, 1), (-1, 3)], -5);
        assert_eq!(s.low(), -1);
        assert_eq!(s.order(), 5);
        assert_eq!(s.coeff_nat(1).unwrap(), r(1));
        assert_eq!(s.coeff_nat(0).unwrap(), r(0));
        assert_eq!(s.coeff_nat(-1).unwrap(), r(3));
        assert_eq!(s.coeff_nat(-4).unwrap(), r(0));
        assert_eq!(s.coeff_nat(7).unwrap(), r(0));
        assert!(matches!(
            s.coeff_nat(-5),
            Err(Error::InsufficientTruncation { .. })
        ));
    }

    #[test]
    fn residue_orientation() {
        // a = z + a1/z + a2/z²  →  a² = z² + 2a1 + 2a2/z + …
        let a = at_inf(&[(1, 1), (-1, 7), (-2, 5)], -9);
        let a2 = a.mul(&a).unwrap();
        assert_eq!(a2.coeff_nat(2).unwrap(), r(1));
        assert_eq!(a2.coeff_nat(0).unwrap(), r(14));
        assert_eq!(a2.coeff_nat(-1).unwrap(), r(10));
        // Res_∞(a²) = −2 a2
        assert_eq!(a2.residue().unwrap(), r(-10));
        // finite-center residue is the plain coefficient
        let p = at_zero(&[(-1, 4), (2, 1)], 5);
        assert_eq!(p.residue().unwrap(), r(4));
    }

    #[test]
    fn mul_window_bookkeeping() {
        // (z + … + O(z^{-3})) · (z² + O(z^{-1}))
        let a = at_inf(&[(1, 1)], -3); // internal low -1, order 3
        let b = at_inf(&[(2, 1)], 1); // internal low -2, order -1
        let p = a.mul(&b).unwrap();
        // order = min(3 + (-2), -1 + (-1)) = -2 → natural: O(z^{2})
        assert_eq!(p.order(), -2);
        assert_eq!(p.low(), -3);
        assert_eq!(p.coeff_nat(3).unwrap(), r(1));
        assert!(p.coeff_nat(2).is_err());
    }

    #[test]
    fn inversion() {
        // 1/(z − 1) at infinity = z^{-1} + z^{-2} + …
        let f = at_inf(&[(1, 1), (0, -1)], -5);
        let g = f.invert().unwrap();
        assert_eq!(g.low(), 1);
        assert_eq!(g.order(), 7);
        for k in 1..7 {
            assert_eq!(g.coeff_nat(-k).unwrap(), r(1));
        }
        let prod = f.mul(&g).unwrap();
        assert_eq!(prod.coeff_nat(0).unwrap(), r(1));
        for k in 1..5 {
            assert_eq!(prod.coeff_nat(-k).unwrap(), r(0));
        }
    }

    #[test]
    fn sqrt_finite_center() {
        // (1 + 2w)^{1/2} = 1 + w − w²/2 + w³/2 − …
        let f = at_zero(&[(0, 1), (1, 2)], 6);
        let s = f.pow_ratio(1, 2, None).unwrap();
        assert_eq!(s.denom(), 1);
        assert_eq!(s.coeff_nat(0).unwrap(), r(1));
        assert_eq!(s.coeff_nat(1).unwrap(), r(1));
        assert_eq!(s.coeff_nat(2).unwrap(), rr(-1, 2));
        assert_eq!(s.coeff_nat(3).unwrap(), rr(1, 2));
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq.coeff_nat(0).unwrap(), r(1));
        assert_eq!(sq.coeff_nat(1).unwrap(), r(2));
        assert_eq!(sq.coeff_nat(2).unwrap(), r(0));
    }

    #[test]
    fn sqrt_at_infinity() {
        // (z² + a)^{1/2} = z + (a/2) z^{-1} − (a²/8) z^{-3} + …, with a = 6
        let f = at_inf(&[(2, 1), (0, 6)], -9);
        let s = f.pow_ratio(1, 2, None).unwrap();
        assert_eq!(s.denom(), 1);
        assert_eq!(s.coeff_nat(1).unwrap(), r(1));
        assert_eq!(s.coeff_nat(0).unwrap(), r(0));
        assert_eq!(s.coeff_nat(-1).unwrap(), r(3));
        assert_eq!(s.coeff_nat(-2).unwrap(), r(0));
        assert_eq!(s.coeff_nat(-3).unwrap(), rr(-9, 2));
    }

    #[test]
    fn rational_power_with_supplied_root() {
        // (4 + w)^{1/2} with root −2: branch choice is honored.
        let f = at_zero(&[(0, 4), (1, 1)], 4);
        let s = f.pow_ratio(1, 2, Some(&r(-2))).unwrap();
        assert_eq!(s.coeff_nat(0).unwrap(), r(-2));
        assert_eq!(s.coeff_nat(1).unwrap(), rr(-1, 4));
        assert!(f.pow_ratio(1, 2, Some(&r(3))).is_err());
    }

    #[test]
    fn negative_powers_match_inversion() {
        let f = at_inf(&[(1, 1), (0, -1)], -5);
        let a = f.pow_int(-1).unwrap();
        let b = f.invert().unwrap();
        assert_eq!(a, b);
        let c = f.pow_int(-2).unwrap();
        let d = b.mul(&b).unwrap();
        assert_eq!(c.coeff_nat(-2).unwrap(), d.coeff_nat(-2).unwrap());
        assert_eq!(c.coeff_nat(-4).unwrap(), d.coeff_nat(-4).unwrap());
    }

    #[test]
    fn derivative_both_centers() {
        let f = at_inf(&[(2, 3), (-1, 5)], -4);
        let d = f.derive();
        assert_eq!(d.coeff_nat(1).unwrap(), r(6));
        assert_eq!(d.coeff_nat(-2).unwrap(), r(-5));
        assert_eq!(d.order(), 5);
        let g = at_zero(&[(-1, 2), (3, 1)], 5);
        let dg = g.derive();
        assert_eq!(dg.coeff_nat(-2).unwrap(), r(-2));
        assert_eq!(dg.coeff_nat(2).unwrap(), r(3));
    }

    #[test]
    fn derivative_kills_residue_content() {
        // residue of an exact derivative vanishes at both kinds of center
        let f = at_inf(&[(2, 3), (1, 1), (-1, 5), (-3, 2)], -6);
        assert_eq!(f.derive().residue().unwrap(), r(0));
        let g = at_zero(&[(-2, 7), (0, 1), (2, 4)], 6);
        assert_eq!(g.derive().residue().unwrap(), r(0));
    }

    #[test]
    fn reversion_at_infinity() {
        // a = z + 3/z + 5/z²  →  z(a) = a − 3/a − 5/a² − 9/a³ + …
        let f = at_inf(&[(1, 1), (-1, 3), (-2, 5)], -7);
        let z = f.revert().unwrap();
        assert_eq!(z.coeff_nat(1).unwrap(), r(1));
        assert_eq!(z.coeff_nat(0).unwrap(), r(0));
        assert_eq!(z.coeff_nat(-1).unwrap(), r(-3));
        assert_eq!(z.coeff_nat(-2).unwrap(), r(-5));
        assert_eq!(z.coeff_nat(-3).unwrap(), r(-9));
        // round trip: f(z(a)) = a
        let round = f.compose(&z).unwrap();
        assert_eq!(round.coeff_nat(1).unwrap(), r(1));
        for n in (-4..=0).rev() {
            assert_eq!(round.coeff_nat(n).unwrap(), r(0), "coefficient at {n}");
        }
    }

    #[test]
    fn reversion_at_simple_pole() {
        // â = 3/(z−2) + 5 near φ=2 → z(â) = 2 + 3/â + 15/â² + 75/â³ + …
        let f = LaurentSeries::from_terms(
            Center::Finite(r(2)),
            &[(-1, r(3)), (0, r(5))],
            6,
        );
        let z = f.revert().unwrap();
        assert!(matches!(z.center(), Center::Infinity));
        assert_eq!(z.coeff_nat(0).unwrap(), r(2));
        assert_eq!(z.coeff_nat(-1).unwrap(), r(3));
        assert_eq!(z.coeff_nat(-2).unwrap(), r(15));
        assert_eq!(z.coeff_nat(-3).unwrap(), r(75));
    }

    #[test]
    fn reversion_back_to_simple_pole() {
        // z(â) = 2 + 3/â + 15/â² + 75/â³ + … inverts to â = 3/(z−2) + 5,
        // the round trip of the previous fixture.
        let f = LaurentSeries::from_terms(
            Center::Finite(r(2)),
            &[(-1, r(3)), (0, r(5))],
            6,
        );
        let z = f.revert().unwrap();
        let back = z.revert().unwrap();
        assert!(matches!(back.center(), Center::Finite(c) if *c == r(2)));
        assert_eq!(back.coeff_nat(-1).unwrap(), r(3));
        assert_eq!(back.coeff_nat(0).unwrap(), r(5));
        assert_eq!(back.coeff_nat(1).unwrap(), r(0));
        assert_eq!(back.coeff_nat(2).unwrap(), r(0));
        // A vanishing subleading coefficient is rejected.
        let flat = LaurentSeries::from_terms(Center::Infinity, &[(0, r(2))], -5);
        assert!(flat.revert().is_err());
    }

    #[test]
    fn reversion_to_pole_at_origin() {
        // A vanishing constant term puts the pole of the inverse at the
        // origin: z(â) = 2/â + 3/â³ inverts to â = 2/z + (3/4)z + … .
        let f = LaurentSeries::from_terms(
            Center::Infinity,
            &[(0, r(0)), (-1, r(2)), (-3, r(3))],
            -6,
        );
        assert_eq!(f.low(), 1); // the zero constant term is trimmed away
        let back = f.revert().unwrap();
        assert!(matches!(back.center(), Center::Finite(c) if c.is_zero()));
        assert_eq!(back.coeff_nat(-1).unwrap(), r(2));
        assert_eq!(back.coeff_nat(0).unwrap(), r(0));
        assert_eq!(back.coeff_nat(1).unwrap(), Rat::new(3, 4));
        // Round trip through the pole recovers the original coefficients.
        let z = back.revert().unwrap();
        for n in [-1i64, -2, -3, -4] {
            assert_eq!(z.coeff_nat(n).unwrap(), f.coeff_nat(n).unwrap());
        }
    }

    #[test]
    fn composition_windows() {
        // f = w^{-1} + w at center 0, composed with t(z) = 1/z at infinity
        // (i.e. t → 0), gives z + 1/z.
        let f = at_zero(&[(-1, 1), (1, 1)], 4);
        let t = at_inf(&[(-1, 1)], -6);
        let g = f.compose(&t).unwrap();
        assert_eq!(g.coeff_nat(1).unwrap(), r(1));
        assert_eq!(g.coeff_nat(-1).unwrap(), r(1));
        assert_eq!(g.coeff_nat(0).unwrap(), r(0));
    }

    #[test]
    fn add_respects_windows() {
        let a = at_inf(&[(1, 1)], -2);
        let b = at_inf(&[(1, 2), (-1, 1)], -6);
        let s = a.add(&b).unwrap();
        assert_eq!(s.coeff_nat(1).unwrap(), r(3));
        assert_eq!(s.coeff_nat(-1).unwrap(), r(1));
        assert!(s.coeff_nat(-2).is_err());
        assert!(a.add(&at_zero(&[(0, 1)], 3)).is_err());
    }

    #[test]
    fn split_by_exponent_sign() {
        // f = z² + 3 + 5/z + O(z^{-4}) at infinity
        let f = at_inf(&[(2, 1), (0, 3), (-1, 5)], -4);
        let (reg, tail) = f.split_nonnegative();
        assert_eq!(reg.coeff_nat(2).unwrap(), r(1));
        assert_eq!(reg.coeff_nat(0).unwrap(), r(3));
        assert_eq!(reg.coeff_nat(-1).unwrap(), r(0));
        assert_eq!(tail.coeff_nat(-1).unwrap(), r(5));
        assert_eq!(tail.coeff_nat(2).unwrap(), r(0));
        // halves reconstruct the original over the full window
        let back = reg.add(&tail).unwrap();
        for e in -3..=2 {
            assert_eq!(back.coeff_nat(e).unwrap(), f.coeff_nat(e).unwrap());
        }
        assert!(back.coeff_nat(-4).is_err());
        // at a finite center the second half is the principal part
        let g = at_zero(&[(-2, 4), (0, 7), (1, 2)], 3);
        let (r0, pr) = g.split_nonnegative();
        assert_eq!(pr.coeff_nat(-2).unwrap(), r(4));
        assert_eq!(pr.coeff_nat(0).unwrap(), r(0));
        assert_eq!(r0.coeff_nat(0).unwrap(), r(7));
        assert_eq!(r0.coeff_nat(1).unwrap(), r(2));
    }

    #[test]
    fn puiseux_grid_reduction() {
        // λ = w^{-2} (pole of order 2): λ^{1/2} has integer exponents again.
        let f = LaurentSeries::from_terms(Center::Finite(r(1)), &[(-2, r(4)), (0, r(1))], 3);
        let s = f.pow_ratio(1, 2, None).unwrap();
        assert_eq!(s.denom(), 1);
        assert_eq!(s.coeff_nat(-1).unwrap(), r(2));
        assert_eq!(s.coeff_nat(1).unwrap(), rr(1, 4));
        // and a genuinely fractional case keeps denom 2
        let g = LaurentSeries::from_terms(Center::Finite(r(1)), &[(-1, r(4)), (0, r(1))], 3);
        let t = g.pow_ratio(1, 2, None).unwrap();
        assert_eq!(t.denom(), 2);
    }

    #[test]
    fn zero_handling() {
        let z = LaurentSeries::<Rat>::zero_window(Center::Infinity, 1, 4);
        assert!(z.is_empty());
        assert_eq!(z.coeff_int(3).unwrap(), r(0));
        assert!(z.coeff_int(4).is_err());
        let s = at_inf(&[(1, 1)], -2);
        let sum = s.add(&s.neg()).unwrap();
        assert!(sum.is_empty());
        assert_eq!(sum.order(), 2);
        let prod = z.mul(&s).unwrap();
        assert!(prod.is_empty());
        assert_eq!(prod.order(), 4 + s.low());
    }
}
