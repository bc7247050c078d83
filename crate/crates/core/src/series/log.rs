//! Series in `x`, `ρ` and the logarithmic variable `Λ`.
//!
//! A [`LogSeries`] stores `Σ_{N=0}^{nmax} a_N(x, ρ) Λ^N`. Levels above `nmax`
//! are not stored; `tail` is a lower bound for their weighted valuation, and
//! every operation that can pull such a level down (a `ρ` or `Λ` derivative)
//! lowers the known order of the top stored level accordingly.

use std::sync::Arc;

use super::jet::MultiJet;
use super::space::JetSpace;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tail bound meaning "no level above `nmax` exists".
pub const NO_TAIL: i32 = i32::MAX / 4;

#[derive(Clone, Debug)]
pub struct LogSeries<S: Scalar> {
    levels: Vec<MultiJet<S>>,
    tail: i32,
}

impl<S: Scalar> LogSeries<S> {
    pub fn new(levels: Vec<MultiJet<S>>, tail: i32) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Shape("log series needs at least one level".into()));
        }
        Ok(LogSeries { levels, tail })
    }

    /// A log-free series.
    pub fn smooth(a: MultiJet<S>, nmax: usize) -> Self {
        let sp = a.space().clone();
        let mut levels = vec![a];
        levels.extend((0..nmax).map(|_| MultiJet::exact_zero(&sp)));
        LogSeries { levels, tail: NO_TAIL }
    }

    pub fn zero(space: &Arc<JetSpace<S>>, nmax: usize) -> Self {
        Self::smooth(MultiJet::exact_zero(space), nmax)
    }

    pub fn constant(space: &Arc<JetSpace<S>>, c: S, nmax: usize) -> Self {
        Self::smooth(MultiJet::constant(space, c), nmax)
    }

    pub fn space(&self) -> &Arc<JetSpace<S>> {
        self.levels[0].space()
    }

    pub fn nmax(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn tail(&self) -> i32 {
        self.tail
    }

    pub fn with_tail(mut self, tail: i32) -> Self {
        self.tail = tail;
        self.cap_top();
        self
    }

    pub fn levels(&self) -> &[MultiJet<S>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &MultiJet<S> {
        &self.levels[n]
    }

    pub fn set_level(&mut self, n: usize, a: MultiJet<S>) {
        self.levels[n] = a;
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|l| l.is_zero()) && self.tail >= NO_TAIL / 2
    }

    /// True when every stored level above zero vanishes.
    pub fn is_log_free(&self) -> bool {
        self.levels[1..].iter().all(|l| l.is_zero())
    }

    /// Minimum known order over all levels.
    pub fn order(&self) -> i32 {
        self.levels.iter().map(|l| l.order()).min().unwrap_or(i32::MIN)
    }

    fn min_val(&self) -> i32 {
        let v = self.levels.iter().map(|l| l.valuation()).min().unwrap_or(NO_TAIL);
        v.min(self.tail)
    }

    fn cap_top(&mut self) {
        if self.tail < NO_TAIL / 2 {
            let top = self.levels.len() - 1;
            let cap = self.tail - 1;
            if self.levels[top].order() > cap {
                self.levels[top] = self.levels[top].truncate(cap);
            }
        }
    }

    fn pad(&self, nmax: usize) -> Vec<MultiJet<S>> {
        let mut v = self.levels.clone();
        while v.len() <= nmax {
            v.push(MultiJet::exact_zero(self.space()));
        }
        v
    }

    fn zip(&self, o: &Self, f: impl Fn(&MultiJet<S>, &MultiJet<S>) -> MultiJet<S>) -> Self {
        let nmax = self.nmax().max(o.nmax());
        let (a, b) = (self.pad(nmax), o.pad(nmax));
        LogSeries { levels: a.iter().zip(&b).map(|(x, y)| f(x, y)).collect(), tail: self.tail.min(o.tail) }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |x, y| x.add(y))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |x, y| x.sub(y))
    }

    pub fn neg(&self) -> Self {
        LogSeries { levels: self.levels.iter().map(|l| l.neg()).collect(), tail: self.tail }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.space(), self.nmax());
        }
        LogSeries { levels: self.levels.iter().map(|l| l.scale(c)).collect(), tail: self.tail }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&S::from_i64(self.space().ctx(), k))
    }

    /// Multiplication by a log-free jet.
    pub fn mul_jet(&self, a: &MultiJet<S>) -> Self {
        let tail = if self.tail >= NO_TAIL / 2 { NO_TAIL } else { self.tail + a.valuation() };
        LogSeries { levels: self.levels.iter().map(|l| l.mul(a)).collect(), tail }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let nmax = self.nmax().max(o.nmax());
        let (a, b) = (self.pad(nmax), o.pad(nmax));
        let sp = self.space();
        let mut levels = Vec::with_capacity(nmax + 1);
        for k in 0..=nmax {
            let mut acc: Option<MultiJet<S>> = None;
            for i in 0..=k {
                let (x, y) = (&a[i], &b[k - i]);
                let p = if x.is_zero() && x.order() >= sp.max_order()
                    || y.is_zero() && y.order() >= sp.max_order()
                {
                    MultiJet::exact_zero(sp)
                } else {
                    x.mul(y)
                };
                acc = Some(match acc {
                    None => p,
                    Some(s) => s.add(&p),
                });
            }
            levels.push(acc.expect("nonempty"));
        }
        let mut tail = NO_TAIL;
        for i in 0..=nmax {
            for j in (nmax + 1 - i)..=nmax {
                if !(a[i].is_zero() && a[i].order() >= sp.max_order())
                    && !(b[j].is_zero() && b[j].order() >= sp.max_order())
                {
                    tail = tail.min(a[i].valuation() + b[j].valuation());
                }
            }
        }
        if self.tail < NO_TAIL / 2 {
            tail = tail.min(self.tail + o.min_val());
        }
        if o.tail < NO_TAIL / 2 {
            tail = tail.min(o.tail + self.min_val());
        }
        LogSeries { levels, tail }
    }

    /// Derivative along base coordinate `i`.
    pub fn partial_x(&self, i: usize) -> Self {
        if self.space().coord_var(i).is_none() {
            return Self::zero(self.space(), self.nmax());
        }
        let tail = if self.tail >= NO_TAIL / 2 { NO_TAIL } else { self.tail - 1 };
        LogSeries { levels: self.levels.iter().map(|l| l.partial_x(i)).collect(), tail }
    }

    /// `∂/∂Λ`.
    pub fn partial_lambda(&self) -> Self {
        let nmax = self.nmax();
        let sp = self.space();
        let mut levels = Vec::with_capacity(nmax + 1);
        for k in 0..=nmax {
            if k < nmax {
                levels.push(self.levels[k + 1].scale_i64(k as i64 + 1));
            } else {
                levels.push(MultiJet::exact_zero(sp));
            }
        }
        let mut out = LogSeries { levels, tail: self.tail };
        out.cap_top();
        out
    }

    /// `∂/∂ρ` with `∂Λ/∂ρ = 1/ρ`.
    pub fn partial_rho(&self) -> Result<Self> {
        let nmax = self.nmax();
        let mut levels = Vec::with_capacity(nmax + 1);
        for k in 0..=nmax {
            let mut d = self.levels[k].partial_rho();
            if k < nmax && !self.levels[k + 1].is_zero() {
                let q = self.levels[k + 1].div_rho().map_err(|e| match e {
                    Error::Valuation(m) => Error::Valuation(format!("log level {}: {m}", k + 1)),
                    other => other,
                })?;
                d = d.add(&q.scale_i64(k as i64 + 1));
            } else if k < nmax {
                d = d.with_order(self.levels[k + 1].order() - 2);
            }
            levels.push(d);
        }
        let tail = if self.tail >= NO_TAIL / 2 { NO_TAIL } else { self.tail - 2 };
        let mut out = LogSeries { levels, tail };
        if self.tail < NO_TAIL / 2 {
            let top = out.levels.len() - 1;
            let cap = self.tail - 3;
            if out.levels[top].order() > cap {
                out.levels[top] = out.levels[top].truncate(cap);
            }
        }
        Ok(out)
    }

    /// Coefficient of `ρ^k Λ^n` as a jet in `x`.
    pub fn coeff(&self, k: u32, n: usize) -> Result<MultiJet<S>> {
        if n > self.nmax() {
            let order = self.tail - 2 * k as i32 - 1;
            return Ok(MultiJet::zero(self.space(), order));
        }
        Ok(self.levels[n].rho_coeff(k))
    }

    /// Multiplicative inverse of a unit (nonzero constant term in level 0).
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.levels[0].constant_term()?;
        let ctx = self.space().ctx().clone();
        let inv0 = S::one(&ctx)
            .div(&a0)
            .ok_or_else(|| Error::Singular("log series with zero constant term".into()))?;
        let one = Self::constant(self.space(), S::one(&ctx), self.nmax());
        let mu = one.sub(&self.scale(&inv0));
        let mut result = one.clone();
        let mut term = one;
        let bound = self.space().max_order() as usize + self.nmax() + 2;
        for _ in 0..bound {
            term = term.mul(&mu);
            if term.is_zero() {
                break;
            }
            result = result.add(&term);
        }
        let order = self.order();
        let mut out = result.scale(&inv0);
        for l in out.levels.iter_mut() {
            if l.order() > order {
                *l = l.truncate(order);
            }
        }
        out.tail = out.tail.min(self.tail);
        Ok(out)
    }

    pub fn to_space(&self, target: &Arc<JetSpace<S>>) -> Result<Self> {
        Ok(LogSeries {
            levels: self.levels.iter().map(|l| l.to_space(target)).collect::<Result<_>>()?,
            tail: self.tail,
        })
    }

    /// Truncates every level at `order`.
    pub fn truncate(&self, order: i32) -> Self {
        LogSeries { levels: self.levels.iter().map(|l| l.truncate(order)).collect(), tail: self.tail }
    }

    pub fn agrees_with(&self, o: &Self) -> bool {
        self.sub(o).levels.iter().all(|l| l.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn space() -> Arc<JetSpace<Q>> {
        JetSpace::new((), 1, &[0], true, 8).unwrap()
    }

    #[test]
    fn rho_derivative_of_rho_log() {
        let sp = space();
        let r = MultiJet::rho(&sp).unwrap();
        let mut s = LogSeries::zero(&sp, 2);
        s.set_level(1, r.clone());
        let d = s.partial_rho().unwrap();
        // d/drho (rho Lambda) = Lambda + 1
        assert!(d.level(0).agrees_with(&MultiJet::from_i64(&sp, 1)));
        assert!(d.level(1).agrees_with(&MultiJet::from_i64(&sp, 1)));
        assert!(d.level(2).is_zero());
    }

    #[test]
    fn log_level_without_rho_is_rejected() {
        let sp = space();
        let mut s = LogSeries::zero(&sp, 1);
        s.set_level(1, MultiJet::from_i64(&sp, 1));
        assert!(matches!(s.partial_rho(), Err(Error::Valuation(_))));
    }

    #[test]
    fn tail_limits_top_level_after_derivatives() {
        let sp = space();
        let r = MultiJet::rho(&sp).unwrap();
        let mut s = LogSeries::zero(&sp, 1).with_tail(6);
        s.set_level(1, r.clone());
        let d = s.partial_rho().unwrap();
        assert_eq!(d.level(1).order(), 3);
        let l = s.partial_lambda();
        assert_eq!(l.level(1).order(), 5);
    }

    #[test]
    fn product_of_log_series() {
        let sp = space();
        let r = MultiJet::rho(&sp).unwrap();
        let mut a = LogSeries::constant(&sp, Q::int(1), 2);
        a.set_level(1, r.clone());
        let sq = a.mul(&a);
        // (1 + rho L)^2 = 1 + 2 rho L + rho^2 L^2
        assert!(sq.level(1).agrees_with(&r.scale_i64(2)));
        assert!(sq.level(2).agrees_with(&r.mul(&r)));
        let inv = a.inverse().unwrap();
        let one = inv.mul(&a);
        assert!(one.level(0).agrees_with(&MultiJet::from_i64(&sp, 1)));
        assert!(one.level(1).is_zero());
        assert!(one.level(2).is_zero());
    }
}
