//! Truncated multivariate Taylor series with weighted order tracking.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::space::{JetSpace, NONE};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A polynomial in the active variables of a [`JetSpace`] whose coefficients
/// are exact for every monomial of weighted degree `<= order`.
///
/// `order` may be negative, meaning nothing is known. Only nonzero
/// coefficients are stored, sorted by monomial index (hence by degree).
#[derive(Clone)]
pub struct MultiJet<S: Scalar> {
    space: Arc<JetSpace<S>>,
    order: i32,
    terms: Vec<(u32, S)>,
}

impl<S: Scalar> fmt::Debug for MultiJet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiJet(order {}; ", self.order)?;
        for (k, (i, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{:?}", c, self.space.exponents(*i))?;
        }
        write!(f, ")")
    }
}

impl<S: Scalar> MultiJet<S> {
    /// The zero jet known through `order`.
    pub fn zero(space: &Arc<JetSpace<S>>, order: i32) -> Self {
        MultiJet { space: space.clone(), order: order.min(space.max_order()), terms: Vec::new() }
    }

    /// Exact zero (known to the space's full order).
    pub fn exact_zero(space: &Arc<JetSpace<S>>) -> Self {
        Self::zero(space, space.max_order())
    }

    pub fn constant(space: &Arc<JetSpace<S>>, c: S) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(0u32, c)] };
        MultiJet { space: space.clone(), order: space.max_order(), terms }
    }

    pub fn from_i64(space: &Arc<JetSpace<S>>, v: i64) -> Self {
        Self::constant(space, S::from_i64(space.ctx(), v))
    }

    /// The single monomial `c * m` with exponent vector `e`.
    pub fn monomial(space: &Arc<JetSpace<S>>, e: &[u8], c: S) -> Result<Self> {
        let idx = space
            .lookup(e)
            .ok_or_else(|| Error::InsufficientOrder(format!("monomial {e:?} beyond jet order")))?;
        let terms = if c.is_zero() { Vec::new() } else { vec![(idx, c)] };
        Ok(MultiJet { space: space.clone(), order: space.max_order(), terms })
    }

    /// Shifted coordinate `x0 + y`, where `y` is the jet variable of base
    /// coordinate `i`. Inactive coordinates give the constant `x0`.
    pub fn coordinate(space: &Arc<JetSpace<S>>, i: usize, x0: S) -> Self {
        let mut j = Self::constant(space, x0);
        if let Some(v) = space.coord_var(i) {
            let mut e = vec![0u8; space.n_vars()];
            e[v] = 1;
            if let Some(idx) = space.lookup(&e) {
                j.terms.push((idx, S::one(space.ctx())));
            }
        }
        j
    }

    /// The jet `ρ`.
    pub fn rho(space: &Arc<JetSpace<S>>) -> Result<Self> {
        let v = space.rho_var().ok_or_else(|| Error::Shape("space has no rho variable".into()))?;
        let mut e = vec![0u8; space.n_vars()];
        e[v] = 1;
        Self::monomial(space, &e, S::one(space.ctx()))
    }

    pub(crate) fn from_parts(space: &Arc<JetSpace<S>>, order: i32, terms: Vec<(u32, S)>) -> Self {
        let order = order.min(space.max_order());
        let lim = space.count_upto(order) as u32;
        let terms = terms.into_iter().filter(|(i, c)| *i < lim && !c.is_zero()).collect();
        MultiJet { space: space.clone(), order, terms }
    }

    pub fn space(&self) -> &Arc<JetSpace<S>> {
        &self.space
    }

    pub fn ctx(&self) -> &S::Ctx {
        self.space.ctx()
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn terms(&self) -> &[(u32, S)] {
        &self.terms
    }

    /// True when no nonzero coefficient is stored.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lower bound on the weighted valuation of the true series.
    pub fn valuation(&self) -> i32 {
        match self.terms.first() {
            Some((i, _)) => self.space.degree(*i),
            None => (self.order + 1).max(0),
        }
    }

    fn unknown_start(&self) -> i32 {
        (self.order + 1).max(self.valuation())
    }

    /// Coefficient of the monomial `e`; errors if beyond the known order.
    pub fn coeff(&self, e: &[u8]) -> Result<S> {
        let idx = self
            .space
            .lookup(e)
            .ok_or_else(|| Error::InsufficientOrder(format!("monomial {e:?} beyond space")))?;
        if self.space.degree(idx) > self.order {
            return Err(Error::InsufficientOrder(format!(
                "monomial {e:?} beyond jet order {}",
                self.order
            )));
        }
        Ok(self.coeff_idx(idx))
    }

    pub(crate) fn coeff_idx(&self, idx: u32) -> S {
        match self.terms.binary_search_by_key(&idx, |t| t.0) {
            Ok(p) => self.terms[p].1.clone(),
            Err(_) => S::zero(self.space.ctx()),
        }
    }

    /// Value at the base point.
    pub fn constant_term(&self) -> Result<S> {
        if self.order < 0 {
            return Err(Error::InsufficientOrder("value at base point unknown".into()));
        }
        Ok(self.coeff_idx(0))
    }

    /// Drops everything above `order`.
    pub fn truncate(&self, order: i32) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self::from_parts(&self.space, order, self.terms.clone())
    }

    pub fn with_order(mut self, order: i32) -> Self {
        if order < self.order {
            self = self.truncate(order);
        }
        self
    }

    pub fn neg(&self) -> Self {
        MultiJet {
            space: self.space.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(i, c)| (*i, c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(&self.space, self.space.max_order());
        }
        MultiJet {
            space: self.space.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(i, a)| (*i, a.mul(c))).collect(),
        }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&S::from_i64(self.ctx(), k))
    }

    fn combine(&self, o: &Self, sign: bool) -> Self {
        let order = self.order.min(o.order);
        let lim = self.space.count_upto(order) as u32;
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (a, b) = (&self.terms, &o.terms);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                i += 1;
                (a[i - 1].0, a[i - 1].1.clone())
            } else if i == a.len() || b[j].0 < a[i].0 {
                j += 1;
                (b[j - 1].0, if sign { b[j - 1].1.clone() } else { b[j - 1].1.neg() })
            } else {
                i += 1;
                j += 1;
                let (x, y) = (&a[i - 1].1, &b[j - 1].1);
                (a[i - 1].0, if sign { x.add(y) } else { x.sub(y) })
            };
            if next.0 >= lim {
                break;
            }
            if !next.1.is_zero() {
                out.push(next);
            }
        }
        MultiJet { space: self.space.clone(), order, terms: out }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    /// Order of a product: the first degree at which an unknown coefficient of
    /// either factor can meet a nonzero coefficient of the other.
    pub fn product_order(&self, o: &Self) -> i32 {
        let a = self.unknown_start() + o.valuation();
        let b = o.unknown_start() + self.valuation();
        (a.min(b) - 1).min(self.space.max_order())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = self.product_order(o);
        let sp = &self.space;
        if order < 0 || self.terms.is_empty() || o.terms.is_empty() {
            return Self::zero(sp, order);
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            return o.scale(&self.terms[0].1).with_order(order);
        }
        if o.terms.len() == 1 && o.terms[0].0 == 0 {
            return self.scale(&o.terms[0].1).with_order(order);
        }
        let n = sp.count_upto(order);
        let mut acc: Vec<Option<S>> = vec![None; n];
        for (i, ai) in &self.terms {
            let di = sp.degree(*i);
            if di > order {
                break;
            }
            let lim = sp.count_upto(order - di) as u32;
            let row = sp.mul_row(*i);
            for (j, bj) in &o.terms {
                if *j >= lim {
                    break;
                }
                let k = row[*j as usize] as usize;
                match &mut acc[k] {
                    Some(s) => s.add_mul(ai, bj),
                    slot @ None => *slot = Some(ai.mul(bj)),
                }
            }
        }
        let terms = acc
            .into_iter()
            .enumerate()
            .filter_map(|(k, c)| c.filter(|c| !c.is_zero()).map(|c| (k as u32, c)))
            .collect();
        MultiJet { space: sp.clone(), order, terms }
    }

    /// Derivative with respect to jet variable `v`.
    pub fn partial_var(&self, v: usize) -> Self {
        let sp = &self.space;
        let order = self.order - sp.weight(v);
        let row = sp.deriv_row(v);
        let mut terms: Vec<(u32, S)> = Vec::with_capacity(self.terms.len());
        for (i, c) in &self.terms {
            let t = row[*i as usize];
            if t == NONE {
                continue;
            }
            let e = sp.exponents(*i)[v] as i64;
            terms.push((t, c.scale_i64(e)));
        }
        terms.sort_by_key(|t| t.0);
        Self::from_parts(sp, order, terms)
    }

    /// Derivative along base coordinate `i` (exactly zero if inactive).
    pub fn partial_x(&self, i: usize) -> Self {
        match self.space.coord_var(i) {
            Some(v) => self.partial_var(v),
            None => Self::exact_zero(&self.space),
        }
    }

    /// Derivative along `ρ`.
    pub fn partial_rho(&self) -> Self {
        match self.space.rho_var() {
            Some(v) => self.partial_var(v),
            None => Self::exact_zero(&self.space),
        }
    }

    /// Division by `ρ`; fails if a stored monomial has no factor of `ρ`.
    pub fn div_rho(&self) -> Result<Self> {
        let sp = &self.space;
        let Some(v) = sp.rho_var() else {
            return Err(Error::Valuation("division by rho in a space without rho".into()));
        };
        let row = sp.deriv_row(v);
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, c) in &self.terms {
            let t = row[*i as usize];
            if t == NONE {
                return Err(Error::Valuation(format!(
                    "term {:?} not divisible by rho",
                    sp.exponents(*i)
                )));
            }
            terms.push((t, c.clone()));
        }
        terms.sort_by_key(|t| t.0);
        Ok(Self::from_parts(sp, self.order - 2, terms))
    }

    /// Multiplication by `ρ^k`.
    pub fn mul_rho_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        let sp = &self.space;
        let v = sp.rho_var().ok_or_else(|| Error::Shape("space has no rho variable".into()))?;
        let order = (self.order + 2 * k as i32).min(sp.max_order());
        let lim = sp.count_upto(order) as u32;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, c) in &self.terms {
            let mut e = sp.exponents(*i).to_vec();
            e[v] += k as u8;
            if let Some(t) = sp.lookup(&e) {
                if t < lim {
                    terms.push((t, c.clone()));
                }
            }
        }
        terms.sort_by_key(|t| t.0);
        Ok(MultiJet { space: sp.clone(), order, terms })
    }

    /// Coefficient of `ρ^k` as a jet in the remaining variables.
    pub fn rho_coeff(&self, k: u32) -> Self {
        let sp = &self.space;
        let order = self.order - 2 * k as i32;
        let Some(v) = sp.rho_var() else {
            return if k == 0 { self.clone() } else { Self::zero(sp, sp.max_order()) };
        };
        let mut terms = Vec::new();
        for (i, c) in &self.terms {
            let e = sp.exponents(*i);
            if e[v] as u32 == k {
                let mut f = e.to_vec();
                f[v] = 0;
                terms.push((sp.lookup(&f).expect("lower monomial exists"), c.clone()));
            }
        }
        terms.sort_by_key(|t| t.0);
        Self::from_parts(sp, order, terms)
    }

    /// Largest power of `ρ` present, if any.
    pub fn max_rho_power(&self) -> u32 {
        self.terms.iter().map(|(i, _)| self.space.rho_exp(*i) as u32).max().unwrap_or(0)
    }

    /// Smallest power of `ρ` among stored terms.
    pub fn min_rho_power(&self) -> Option<u32> {
        self.terms.iter().map(|(i, _)| self.space.rho_exp(*i) as u32).min()
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.constant_term()?;
        let inv0 = S::one(self.ctx())
            .div(&a0)
            .ok_or_else(|| Error::Singular("jet with zero constant term".into()))?;
        let one = Self::constant(&self.space, S::one(self.ctx()));
        let u = self.scale(&inv0).sub(&one);
        let mut result = one.clone();
        let mut term = one;
        let mu = u.neg();
        for _ in 0..=self.space.max_order() {
            term = term.mul(&mu);
            if term.is_zero() && term.order >= result.order {
                break;
            }
            result = result.add(&term);
        }
        Ok(result.with_order(self.order).scale(&inv0))
    }

    /// `self^k` for integer `k`; negative powers need a unit.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        let mut base = self.clone();
        let mut acc = Self::constant(&self.space, S::one(self.ctx()));
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Applies a power series `Σ c_k u^k` to `u = self - self(0)`.
    fn compose_series(&self, coeffs: impl Fn(usize) -> S) -> Self {
        let c0 = self.coeff_idx(0);
        let u = self.sub(&Self::constant(&self.space, c0));
        let mut result = Self::constant(&self.space, coeffs(0));
        let mut pw = Self::constant(&self.space, S::one(self.ctx()));
        for k in 1..=(self.space.max_order().max(0) as usize) {
            pw = pw.mul(&u);
            if pw.is_zero() && pw.order >= self.order {
                break;
            }
            result = result.add(&pw.scale(&coeffs(k)));
        }
        result.with_order(self.order)
    }

    /// Square root with positive constant term; exact mode needs a rational
    /// square at the base point.
    pub fn sqrt(&self) -> Result<Self> {
        let a0 = self.constant_term()?;
        if a0.sign() != std::cmp::Ordering::Greater {
            return Err(Error::Domain("square root of a jet with nonpositive value".into()));
        }
        let r0 = a0
            .sqrt()
            .ok_or_else(|| Error::Domain(format!("{a0} is not a square in exact arithmetic")))?;
        let ctx = self.ctx().clone();
        let normalized = self.scale(&S::one(&ctx).div(&a0).expect("nonzero"));
        // binomial series of (1 + u)^(1/2)
        let mut coeffs = vec![S::one(&ctx)];
        for k in 1..=(self.space.max_order().max(0) as i64 + 1) {
            let prev = coeffs[k as usize - 1].clone();
            let f = S::from_ratio(&ctx, 1 - 2 * (k - 1), 2 * k);
            coeffs.push(prev.mul(&f));
        }
        Ok(normalized.compose_series(|k| coeffs[k].clone()).scale(&r0))
    }

    /// `exp`, `sin`, `cos` of a jet; only in float mode.
    pub fn transcendental(&self, name: &str) -> Result<Self> {
        if S::EXACT {
            return Err(Error::Transcendental(name.to_string()));
        }
        let a0 = self.constant_term()?;
        let ctx = self.ctx().clone();
        let (e0, s0, c0) = (a0.exp(), a0.sin(), a0.cos());
        let fact = |k: usize| -> S {
            let mut f = S::one(&ctx);
            for j in 2..=k {
                f = f.scale_i64(j as i64);
            }
            S::one(&ctx).div(&f).expect("nonzero")
        };
        let coeffs: Vec<S> = match name {
            "exp" => {
                let e0 = e0.ok_or_else(|| Error::Transcendental(name.into()))?;
                (0..=self.space.max_order().max(0) as usize + 1).map(|k| e0.mul(&fact(k))).collect()
            }
            "sin" | "cos" => {
                let (s0, c0) = (
                    s0.ok_or_else(|| Error::Transcendental(name.into()))?,
                    c0.ok_or_else(|| Error::Transcendental(name.into()))?,
                );
                // derivatives cycle through sin, cos, -sin, -cos
                let cyc = if name == "sin" {
                    [s0.clone(), c0.clone(), s0.neg(), c0.neg()]
                } else {
                    [c0.clone(), s0.neg(), c0.neg(), s0.clone()]
                };
                (0..=self.space.max_order().max(0) as usize + 1)
                    .map(|k| cyc[k % 4].mul(&fact(k)))
                    .collect()
            }
            _ => return Err(Error::UnknownIdentifier(name.to_string())),
        };
        Ok(self.compose_series(|k| coeffs[k].clone()))
    }

    /// `f(x)` with `x^i` replaced by `-x^i`.
    pub fn reflect(&self, i: usize) -> Self {
        let Some(v) = self.space.coord_var(i) else {
            return self.clone();
        };
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| if self.space.exponents(*k)[v] % 2 == 1 { (*k, c.neg()) } else { (*k, c.clone()) })
            .collect();
        MultiJet { space: self.space.clone(), order: self.order, terms }
    }

    /// Exact equality of all coefficients through the smaller order.
    pub fn agrees_with(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// Equality up to relative tolerance in float mode (exact otherwise).
    pub fn close_to(&self, o: &Self, rel: f64) -> bool {
        if S::EXACT {
            return self.agrees_with(o);
        }
        let order = self.order.min(o.order);
        let lim = self.space.count_upto(order) as u32;
        for idx in 0..lim {
            let a = self.coeff_idx(idx);
            let b = o.coeff_idx(idx);
            if !a.close_to(&b, rel) {
                return false;
            }
        }
        true
    }

    /// Largest coefficient magnitude (as `f64`), for tolerance scales.
    pub fn max_abs_f64(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Re-expresses the jet in another space with the same variables.
    pub fn to_space(&self, target: &Arc<JetSpace<S>>) -> Result<Self> {
        if Arc::ptr_eq(&self.space, target) {
            return Ok(self.clone());
        }
        let sp = &self.space;
        let mut map = vec![None; sp.n_vars()];
        for i in 0..sp.dim() {
            if let Some(v) = sp.coord_var(i) {
                map[v] = Some(target.coord_var(i).ok_or_else(|| {
                    Error::Shape(format!("coordinate {i} inactive in target space"))
                })?);
            }
        }
        if let Some(v) = sp.rho_var() {
            map[v] = Some(target.rho_var().ok_or_else(|| Error::Shape("target lacks rho".into()))?);
        }
        let order = self.order.min(target.max_order());
        let mut terms = Vec::new();
        let mut e = vec![0u8; target.n_vars()];
        for (i, c) in &self.terms {
            e.iter_mut().for_each(|x| *x = 0);
            for (v, &x) in sp.exponents(*i).iter().enumerate() {
                if x > 0 {
                    e[map[v].expect("mapped")] = x;
                }
            }
            if let Some(t) = target.lookup(&e) {
                terms.push((t, c.clone()));
            }
        }
        terms.sort_by_key(|t| t.0);
        Ok(Self::from_parts(target, order, terms))
    }
}

impl<S: Scalar> PartialEq for MultiJet<S> {
    fn eq(&self, o: &Self) -> bool {
        self.order == o.order && self.terms == o.terms
    }
}

impl<'a, S: Scalar> Add for &'a MultiJet<S> {
    type Output = MultiJet<S>;
    fn add(self, o: Self) -> MultiJet<S> {
        MultiJet::add(self, o)
    }
}

impl<'a, S: Scalar> Sub for &'a MultiJet<S> {
    type Output = MultiJet<S>;
    fn sub(self, o: Self) -> MultiJet<S> {
        MultiJet::sub(self, o)
    }
}

impl<'a, S: Scalar> Mul for &'a MultiJet<S> {
    type Output = MultiJet<S>;
    fn mul(self, o: Self) -> MultiJet<S> {
        MultiJet::mul(self, o)
    }
}

impl<'a, S: Scalar> Neg for &'a MultiJet<S> {
    type Output = MultiJet<S>;
    fn neg(self) -> MultiJet<S> {
        MultiJet::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn space(order: u32) -> Arc<JetSpace<Q>> {
        JetSpace::new((), 2, &[0, 1], true, order).unwrap()
    }

    fn x(sp: &Arc<JetSpace<Q>>, i: usize) -> MultiJet<Q> {
        MultiJet::coordinate(sp, i, Q::int(0))
    }

    #[test]
    fn product_truncates_by_weight() {
        let sp = space(4);
        let r = MultiJet::rho(&sp).unwrap();
        let a = x(&sp, 0).add(&r);
        let sq = a.mul(&a);
        // x^2 + 2 x rho + rho^2: all of weighted degree <= 4
        assert_eq!(sq.coeff(&[2, 0, 0]).unwrap(), Q::int(1));
        assert_eq!(sq.coeff(&[1, 0, 1]).unwrap(), Q::int(2));
        assert_eq!(sq.coeff(&[0, 0, 2]).unwrap(), Q::int(1));
        let cube = sq.mul(&a);
        assert!(cube.coeff(&[1, 0, 2]).is_err());
        assert_eq!(cube.coeff(&[2, 0, 1]).unwrap(), Q::int(3));
    }

    #[test]
    fn geometric_inverse() {
        let sp = space(6);
        let one = MultiJet::from_i64(&sp, 1);
        let a = one.sub(&x(&sp, 0));
        let inv = a.inverse().unwrap();
        for k in 0..=6u8 {
            assert_eq!(inv.coeff(&[k, 0, 0]).unwrap(), Q::int(1));
        }
        assert!(inv.mul(&a).agrees_with(&one));
    }

    #[test]
    fn order_tracks_unknown_tail() {
        let sp = space(6);
        let a = x(&sp, 0).with_order(2);
        let b = x(&sp, 1).mul(&x(&sp, 1));
        // a = x + O(3), b = y^2 exact: product known through 2 + 3 = 5... minus 1
        let p = a.mul(&b);
        assert_eq!(p.order(), 4 + 0);
        let d = a.partial_rho();
        assert_eq!(d.order(), 0);
    }

    #[test]
    fn zero_times_unknown_is_known_at_base() {
        let sp = space(6);
        let a = MultiJet::<Q>::zero(&sp, -4);
        let b = MultiJet::rho(&sp).unwrap().with_order(3);
        let p = a.mul(&b);
        assert!(p.order() >= 0);
        assert_eq!(p.constant_term().unwrap(), Q::int(0));
    }

    #[test]
    fn sqrt_squares_back() {
        let sp = space(5);
        let a = MultiJet::from_i64(&sp, 4).add(&x(&sp, 0)).add(&x(&sp, 1).mul(&x(&sp, 0)));
        let r = a.sqrt().unwrap();
        assert!(r.mul(&r).agrees_with(&a));
        let bad = MultiJet::from_i64(&sp, 2);
        assert!(bad.sqrt().is_err());
    }

    #[test]
    fn rho_division_checks_valuation() {
        let sp = space(4);
        let r = MultiJet::rho(&sp).unwrap();
        let a = r.mul(&x(&sp, 0));
        assert!(a.div_rho().unwrap().agrees_with(&x(&sp, 0)));
        assert!(x(&sp, 0).div_rho().is_err());
    }
}
