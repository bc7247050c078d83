//! Conformal invariants from the smooth part `g̃^(0)` of the ambient metric.
//!
//! Ambient tensors are evaluated on `𝒢` at `ρ = 0`, `t = 1`; their
//! `t`-homogeneity degree is carried alongside, so a complete contraction of
//! degree `w` is a conformal invariant of weight `w`. Volume forms, the
//! tractor `D` operator and transformation-law checks live in submodules.

pub mod base;
mod schema;
mod tractor;

use std::sync::{Arc, Mutex};

pub use schema::{
    evaluate_contraction, library, ContractionSchema, Factor, Invariant, Parity, SchemaFile, TensorName,
};
pub use tractor::{
    check_a_transform, check_tractor_law, exceptional_n4, log_derivative, p_matrix, tractor_d, ATransformReport,
    LawReport,
};

use crate::ambient::{
    extend_inhomogeneous, index_strength, rho_index, solve_smooth, AmbComp, AmbTensor, AmbientGeometry,
    NormalFormAmbient,
};
use crate::error::{Error, Result};
use crate::riemann::{JetTensor, MetricData};
use crate::scalar::Scalar;
use crate::series::{JetSpace, LogSeries, MultiJet};
use crate::tensor::{Component, Tensor};

/// The first exceptional invariant equals `k (|W⁺|² - |W⁻|²)` with this `k`.
pub const PONTRYAGIN_RATIO: i64 = 2;

/// `‖I…J‖`: the sum of index strengths (`t ↦ 0`, `x^i ↦ 1`, `ρ ↦ 2`).
pub fn strength(n: usize, idx: &[usize]) -> u32 {
    idx.iter().map(|&i| index_strength(n, i)).sum()
}

/// A covariant ambient tensor restricted to `ρ = 0`, `t = 1`.
#[derive(Clone, Debug)]
pub struct AmbientTensorAtG<S: Scalar> {
    pub n: usize,
    /// Components over ambient indices `0..=n+1`, as jets on `M`.
    pub comps: JetTensor<S>,
    /// Homogeneity degree in `t` of the ambient field.
    pub degree: i32,
}

impl<S: Scalar> AmbientTensorAtG<S> {
    pub fn rank(&self) -> usize {
        self.comps.rank
    }

    pub fn get(&self, idx: &[usize]) -> &MultiJet<S> {
        self.comps.get(idx)
    }

    /// Components of strength at most `n + 1` define natural tensors on `M`.
    pub fn is_natural(&self, idx: &[usize]) -> bool {
        strength(self.n, idx) as usize <= self.n + 1
    }

    /// The components on `x`-indices only, as a tensor on `M`.
    pub fn tangential(&self) -> JetTensor<S> {
        let mut full = vec![0; self.rank()];
        Tensor::from_fn(self.n, self.rank(), |idx| {
            for (f, &i) in full.iter_mut().zip(idx) {
                *f = i + 1;
            }
            self.comps.get(&full).clone()
        })
    }
}

/// The smooth part of the ambient metric of `(g, A)` with its geometry and
/// cached curvature derivatives.
pub struct SmoothAmbient<S: Scalar> {
    metric: MetricData<S>,
    amb: NormalFormAmbient<S>,
    geo: AmbientGeometry<S>,
    curv: Mutex<Vec<Arc<AmbTensor<S>>>>,
    obs: Mutex<Vec<Arc<AmbTensor<S>>>>,
}

impl<S: Scalar> SmoothAmbient<S> {
    /// Solves through the full weight of `g`'s jet space: the log extension
    /// in even dimension (keeping level 0), the smooth expansion otherwise.
    pub fn new(g: &MetricData<S>, a: Option<&[MultiJet<S>]>) -> Result<Self> {
        let n = g.dim();
        let amb = if n % 2 == 0 {
            extend_inhomogeneous(g, a, 0)?.smooth_part()
        } else {
            if a.is_some() {
                return Err(Error::Input("an ambiguity tensor needs even n".into()));
            }
            solve_smooth(g, (g.order().max(0) / 2) as u32, None)?
        };
        let geo = amb.geometry()?;
        Ok(SmoothAmbient { metric: g.clone(), amb, geo, curv: Mutex::new(Vec::new()), obs: Mutex::new(Vec::new()) })
    }

    pub fn n(&self) -> usize {
        self.metric.dim()
    }

    /// The representative `g` in the caller's jet space.
    pub fn metric(&self) -> &MetricData<S> {
        &self.metric
    }

    pub fn ambient(&self) -> &NormalFormAmbient<S> {
        &self.amb
    }

    pub fn geometry(&self) -> &AmbientGeometry<S> {
        &self.geo
    }

    /// Restriction of an ambient tensor to `ρ = 0`, `t = 1`.
    pub fn restrict(&self, t: &AmbTensor<S>) -> Result<JetTensor<S>> {
        let comps = t
            .comps
            .iter()
            .map(|c| {
                for l in 1..=c.f.nmax() {
                    if !c.f.level(l).rho_coeff(0).is_zero() {
                        return Err(Error::Inconsistent("log terms survive at ρ = 0".into()));
                    }
                }
                self.amb.export(&c.at_rho0())
            })
            .collect::<Result<_>>()?;
        Ok(Tensor { dim: t.dim, rank: t.rank, comps })
    }

    pub fn at_g(&self, t: &AmbTensor<S>, degree: i32) -> Result<AmbientTensorAtG<S>> {
        Ok(AmbientTensorAtG { n: self.n(), comps: self.restrict(t)?, degree })
    }

    /// `g̃^{IJ}` at `ρ = 0`, `t = 1`.
    pub fn inverse_at_g(&self) -> Result<JetTensor<S>> {
        self.restrict(&self.geo.ginv)
    }

    /// `∇̃^r R̃` as an ambient field (derivative indices appended last).
    pub fn curvature_field(&self, r: usize) -> Result<Arc<AmbTensor<S>>> {
        let mut cache = self.curv.lock().expect("curvature cache");
        if cache.is_empty() {
            cache.push(Arc::new(self.geo.riemann()?));
        }
        while cache.len() <= r {
            let next = self.geo.cov_deriv(cache.last().expect("nonempty"))?;
            cache.push(Arc::new(next));
        }
        Ok(cache[r].clone())
    }

    /// `∇̃^r R̃^(0)|_{ρ=0, t=1}` with naturality bookkeeping.
    pub fn ambient_curv_derivs(&self, r: usize) -> Result<AmbientTensorAtG<S>> {
        self.at_g(&*self.curvature_field(r)?, 2)
    }

    /// `∇̃^r Õ` with `Õ_IJ = Δ̃^{n/2-1} R̃_IJ / (n - 2)`.
    pub fn obstruction_field(&self, r: usize) -> Result<Arc<AmbTensor<S>>> {
        let n = self.n();
        if n % 2 == 1 || n < 4 {
            return Err(Error::Input(format!("the ambient obstruction needs even n ≥ 4, got {n}")));
        }
        let mut cache = self.obs.lock().expect("obstruction cache");
        if cache.is_empty() {
            let mut o = self.geo.ricci()?;
            for _ in 0..(n / 2 - 1) {
                o = self.geo.laplacian(&o)?;
            }
            cache.push(Arc::new(o.map(|c| c.scale_ratio(1, n as i64 - 2))));
        }
        while cache.len() <= r {
            let next = self.geo.cov_deriv(cache.last().expect("nonempty"))?;
            cache.push(Arc::new(next));
        }
        Ok(cache[r].clone())
    }

    /// `∇̃^r Õ|_{ρ=0, t=1}`.
    pub fn ambient_obstruction(&self, r: usize) -> Result<AmbientTensorAtG<S>> {
        self.at_g(&*self.obstruction_field(r)?, 2 - self.n() as i32)
    }

    /// `√|det g|` on `M`.
    pub fn volume_density(&self) -> Result<MultiJet<S>> {
        let n = self.n();
        let det = jet_determinant(&self.metric.g.comps, n);
        let sign = if self.metric.signature.1 % 2 == 0 { 1 } else { -1 };
        det.scale_i64(sign).sqrt().map_err(|e| match e {
            Error::Domain(m) => Error::Domain(format!("volume form: {m}; use float mode")),
            e => e,
        })
    }

    /// `μ̃`, `μ̃₀ = T⨼μ̃` or `η = t^{-2}∂_ρ⨼μ̃₀` at `ρ = 0`, `t = 1`, for
    /// the coordinate orientation `(t, x^1, …, x^n, ρ)`.
    pub fn volume_form(&self, kind: VolumeForm) -> Result<AmbientTensorAtG<S>> {
        let n = self.n();
        let d = n + 2;
        let (support, sign, degree): (Vec<usize>, i64, i32) = match kind {
            VolumeForm::Mu => ((0..d).collect(), 1, d as i32),
            VolumeForm::Mu0 => ((1..d).collect(), 1, d as i32),
            VolumeForm::Eta => ((1..=n).collect(), if n % 2 == 0 { 1 } else { -1 }, n as i32),
        };
        let rank = support.len();
        if (d as u64).pow(rank as u32) > DENSE_LIMIT {
            return Err(Error::Input(format!("the {kind:?} form has too many components in dimension {n}")));
        }
        let v = self.volume_density()?.scale_i64(sign);
        let zero = MultiJet::exact_zero(v.space());
        let comps = Tensor::from_fn(d, rank, |idx| match permutation_sign(&support, idx) {
            Some(1) => v.clone(),
            Some(_) => v.neg(),
            None => zero.clone(),
        });
        Ok(AmbientTensorAtG { n, comps, degree })
    }

    /// `η` as an ambient field: `η_{i…j} = (-1)^n t^n √|det M| ε_{i…j}`,
    /// where `g̃ = t^{s_I + s_J} M_IJ`.
    pub fn eta_field(&self) -> Result<AmbTensor<S>> {
        let n = self.n();
        let d = n + 2;
        let m: Vec<MultiJet<S>> = self.geo.g.comps.iter().map(|c| c.f.level(0).clone()).collect();
        let det = jet_determinant(&m, d);
        let sign = if self.metric.signature.1 % 2 == 0 { -1 } else { 1 };
        let v = det.scale_i64(sign).sqrt()?.scale_i64(if n % 2 == 0 { 1 } else { -1 });
        let support: Vec<usize> = (1..=n).collect();
        let zero = AmbComp::zero(self.amb.space(), 0);
        Ok(Tensor::from_fn(d, n, |idx| match permutation_sign(&support, idx) {
            Some(s) => AmbComp::smooth(n as i32, v.scale_i64(s), 0),
            None => zero.clone(),
        }))
    }

    /// The working (lifted) jet space of the ambient calculus.
    pub fn space(&self) -> &Arc<JetSpace<S>> {
        self.amb.space()
    }

    /// `2ρt²` as an ambient function.
    pub fn r_sharp(&self) -> Result<AmbComp<S>> {
        let sp = self.space();
        Ok(AmbComp::new(2, LogSeries::smooth(MultiJet::rho(sp)?.scale_i64(2), 0)))
    }

    /// `ρ` index of the ambient coordinates.
    pub fn infinity(&self) -> usize {
        rho_index(self.n())
    }
}

/// Which volume form a factor refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VolumeForm {
    Mu,
    Mu0,
    Eta,
}

const DENSE_LIMIT: u64 = 2_000_000;

/// Sign of `idx` as a permutation of `support`, or `None` if it is not one.
pub fn permutation_sign(support: &[usize], idx: &[usize]) -> Option<i64> {
    if idx.len() != support.len() {
        return None;
    }
    let mut pos: Vec<usize> = Vec::with_capacity(idx.len());
    for i in idx {
        let p = support.iter().position(|s| s == i)?;
        if pos.contains(&p) {
            return None;
        }
        pos.push(p);
    }
    let mut sign = 1;
    for a in 0..pos.len() {
        for b in (a + 1)..pos.len() {
            if pos[a] > pos[b] {
                sign = -sign;
            }
        }
    }
    Some(sign)
}

/// Equality of two jets through their common order: exact in rational mode,
/// and in float mode up to `1e-9` relative to the larger coefficient of
/// either jet. Fails when no order is known.
pub fn jets_match<S: Scalar>(a: &MultiJet<S>, b: &MultiJet<S>) -> bool {
    if a.order().min(b.order()) < 0 {
        return false;
    }
    if S::EXACT {
        return a.agrees_with(b);
    }
    let scale = a.max_abs_f64().max(b.max_abs_f64());
    a.sub(b).max_abs_f64() <= 1e-9 * scale
}

/// [`jets_match`] with the float tolerance taken relative to at least
/// `scale`. Callers pass the largest coefficient of the tensor being
/// compared, floored at 1 so that components which vanish identically are
/// compared against the size of the metric rather than against rounding
/// noise.
pub fn jets_match_within<S: Scalar>(a: &MultiJet<S>, b: &MultiJet<S>, scale: f64) -> bool {
    if a.order().min(b.order()) < 0 {
        return false;
    }
    if S::EXACT {
        return a.agrees_with(b);
    }
    let scale = a.max_abs_f64().max(b.max_abs_f64()).max(scale);
    a.sub(b).max_abs_f64() <= 1e-9 * scale
}

/// Largest coefficient magnitude over a list of jets.
pub fn max_abs<S: Scalar>(xs: &[MultiJet<S>]) -> f64 {
    xs.iter().map(|x| x.max_abs_f64()).fold(0.0, f64::max)
}

/// Determinant by cofactor expansion, skipping exact zeros.
pub fn jet_determinant<S: Scalar>(m: &[MultiJet<S>], n: usize) -> MultiJet<S> {
    fn rec<S: Scalar>(m: &[MultiJet<S>], n: usize, row: usize, cols: &mut Vec<usize>) -> MultiJet<S> {
        if cols.is_empty() {
            return MultiJet::constant(m[0].space(), S::one(m[0].ctx()));
        }
        let mut acc: Option<MultiJet<S>> = None;
        for k in 0..cols.len() {
            let e = &m[row * n + cols[k]];
            if Component::is_exact_zero(e) {
                continue;
            }
            let c = cols.remove(k);
            let minor = rec(m, n, row + 1, cols);
            cols.insert(k, c);
            let term = e.mul(&minor);
            let term = if k % 2 == 1 { term.neg() } else { term };
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        acc.unwrap_or_else(|| MultiJet::exact_zero(m[0].space()))
    }
    rec(m, n, 0, &mut (0..n).collect())
}

#[cfg(test)]
pub(crate) mod tests;
