//! Ambient components `t^h F(x, ρ, Λ)` with `Λ = log|2ρt²|`.
//!
//! Ambient coordinates are indexed `0 = t`, `1..=n` for `x^i`, `n + 1 = ρ`.
//! Since `∂_t Λ = 2/t`, the `t`-derivative is
//! `∂_t(t^h F) = t^{h-1}(h F + 2 ∂_Λ F)`.

use std::sync::Arc;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::series::{JetSpace, LogSeries, MultiJet, NO_TAIL};
use crate::tensor::{Component, Tensor};

#[derive(Clone, Debug)]
pub struct AmbComp<S: Scalar> {
    pub h: i32,
    pub f: LogSeries<S>,
}

pub type AmbTensor<S> = Tensor<AmbComp<S>>;

impl<S: Scalar> AmbComp<S> {
    pub fn new(h: i32, f: LogSeries<S>) -> Self {
        AmbComp { h, f }
    }

    pub fn smooth(h: i32, a: MultiJet<S>, nmax: usize) -> Self {
        AmbComp { h, f: LogSeries::smooth(a, nmax) }
    }

    pub fn zero(space: &Arc<JetSpace<S>>, nmax: usize) -> Self {
        AmbComp { h: 0, f: LogSeries::zero(space, nmax) }
    }

    pub fn space(&self) -> &Arc<JetSpace<S>> {
        self.f.space()
    }

    fn stored_zero(&self) -> bool {
        self.f.levels().iter().all(|l| l.is_zero())
    }

    /// Value of `F` at `ρ = 0`, as an x-jet (level 0; errors on logs).
    pub fn at_rho0(&self) -> MultiJet<S> {
        self.f.level(0).rho_coeff(0)
    }
}

impl<S: Scalar> Component for AmbComp<S> {
    type Scalar = S;

    fn zero_like(&self) -> Self {
        AmbComp { h: self.h, f: LogSeries::zero(self.f.space(), self.f.nmax()) }
    }
    fn is_zero(&self) -> bool {
        self.stored_zero()
    }
    fn is_exact_zero(&self) -> bool {
        let max = self.f.space().max_order();
        self.f.tail() >= NO_TAIL / 2 && self.f.levels().iter().all(|l| l.is_zero() && l.order() >= max)
    }
    fn add(&self, o: &Self) -> Self {
        let h = pick_h(self, o);
        AmbComp { h, f: self.f.add(&o.f) }
    }
    fn sub(&self, o: &Self) -> Self {
        let h = pick_h(self, o);
        AmbComp { h, f: self.f.sub(&o.f) }
    }
    fn neg(&self) -> Self {
        AmbComp { h: self.h, f: self.f.neg() }
    }
    fn mul(&self, o: &Self) -> Self {
        AmbComp { h: self.h + o.h, f: self.f.mul(&o.f) }
    }
    fn scale(&self, c: &S) -> Self {
        AmbComp { h: self.h, f: self.f.scale(c) }
    }
    fn partial(&self, coord: usize) -> Result<Self> {
        let n = self.f.space().dim();
        if coord == 0 {
            let f = self.f.scale_i64(self.h as i64).add(&self.f.partial_lambda().scale_i64(2));
            Ok(AmbComp { h: self.h - 1, f })
        } else if coord <= n {
            Ok(AmbComp { h: self.h, f: self.f.partial_x(coord - 1) })
        } else {
            Ok(AmbComp { h: self.h, f: self.f.partial_rho()? })
        }
    }
    fn constant_like(&self, c: &S) -> Self {
        AmbComp { h: 0, f: LogSeries::constant(self.f.space(), c.clone(), self.f.nmax()) }
    }
    fn ctx(&self) -> S::Ctx {
        self.f.space().ctx().clone()
    }
}

fn pick_h<S: Scalar>(a: &AmbComp<S>, b: &AmbComp<S>) -> i32 {
    if a.h == b.h || b.stored_zero() {
        a.h
    } else if a.stored_zero() {
        b.h
    } else {
        panic!("adding ambient components of homogeneity {} and {}", a.h, b.h)
    }
}

/// Index of `ρ` in ambient coordinates for base dimension `n`.
pub fn rho_index(n: usize) -> usize {
    n + 1
}

/// Strength of an ambient index: 0 for `t`, 1 for `x^i`, 2 for `ρ`.
pub fn index_strength(n: usize, i: usize) -> u32 {
    if i == 0 {
        0
    } else if i <= n {
        1
    } else {
        2
    }
}

/// Inverse of an ambient metric whose components scale as
/// `g̃_{IJ} = t^{s_I + s_J} M_{IJ}` with `s_0 = 0` and `s = 1` otherwise.
pub fn ambient_inverse<S: Scalar>(g: &AmbTensor<S>) -> Result<AmbTensor<S>> {
    let d = g.dim;
    let s = |i: usize| if i == 0 { 0 } else { 1 };
    let m: Vec<AmbComp<S>> = g
        .indices()
        .map(|ix| {
            let c = g.get(&ix);
            debug_assert!(c.is_zero() || c.h == s(ix[0]) + s(ix[1]));
            AmbComp { h: 0, f: c.f.clone() }
        })
        .collect();
    let inv = crate::tensor::invert_matrix(
        &m,
        d,
        |c| c.f.level(0).order() >= 0 && !c.f.level(0).coeff_idx(0).is_zero(),
        |c| Ok(AmbComp { h: 0, f: c.f.inverse()? }),
    )?;
    let mut out = Tensor { dim: d, rank: 2, comps: inv };
    for i in 0..d {
        for j in 0..d {
            let idx = out.flat(&[i, j]);
            out.comps[idx].h = -(s(i) + s(j));
        }
    }
    Ok(out)
}
