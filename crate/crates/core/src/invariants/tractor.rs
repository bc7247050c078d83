//! The tractor `D` operator, the exceptional invariants in dimension four and
//! the conformal transformation laws of ambient curvature on `𝒢`.

use super::{jets_match_within, max_abs, strength, SmoothAmbient};
use crate::ambient::derived::k_tensor;
use crate::ambient::{AmbComp, AmbTensor, AmbientGeometry};
use crate::error::{Error, Result};
use crate::riemann::{JetTensor, MetricData};
use crate::scalar::Scalar;
use crate::series::MultiJet;
use crate::tensor::{contract_product, Component, Tensor};

/// `Df = ∇̃f - dr_# ⊗ Δ̃f / (2(n + 2(w - p - 1)))` for a covariant field `f` of
/// rank `p` and weight `w`; the new index comes first.
pub fn tractor_d<S: Scalar>(geo: &AmbientGeometry<S>, f: &AmbTensor<S>, w: i32) -> Result<AmbTensor<S>> {
    let d = geo.dim();
    let n = d as i32 - 2;
    let p = f.rank as i32;
    let den = 2 * (n + 2 * (w - p - 1));
    if den == 0 {
        return Err(Error::Domain(format!("D is undefined at weight w = p + 1 - n/2 = {w}")));
    }
    let mut perm = vec![f.rank];
    perm.extend(0..f.rank);
    let grad = geo.cov_deriv(f)?.permute(&perm);
    let lap = geo.laplacian(f)?;
    let sp = f.comps[0].space().clone();
    let nmax = f.comps[0].f.nmax();
    let rho = MultiJet::rho(&sp)?;
    let dr = |a: usize| -> Option<AmbComp<S>> {
        if a == 0 {
            Some(AmbComp::smooth(1, rho.scale_i64(4), nmax))
        } else if a == d - 1 {
            Some(AmbComp::smooth(2, MultiJet::from_i64(&sp, 2), nmax))
        } else {
            None
        }
    };
    let ctx = sp.ctx().clone();
    let c = S::from_ratio(&ctx, -1, den as i64);
    let mut out = grad;
    for idx in out.indices().collect::<Vec<_>>() {
        if let Some(v) = dr(idx[0]) {
            let l = lap.get(&idx[1..]);
            if l.is_exact_zero() {
                continue;
            }
            let k = out.flat(&idx);
            out.comps[k] = out.comps[k].add(&v.mul(l).scale(&c));
        }
    }
    Ok(out)
}

/// The two exceptional odd invariants in dimension four:
/// `η^{IJKL}R̃_{IJ}{}^{AB}R̃_{KLAB}` and `D^A D^B L_(AB)` with
/// `L_AB = η^{IJKL}R̃_{IJAC}R̃_{KLB}{}^C`.
pub fn exceptional_n4<S: Scalar>(sm: &SmoothAmbient<S>) -> Result<(MultiJet<S>, MultiJet<S>)> {
    if sm.n() != 4 {
        return Err(Error::Input(format!("the exceptional invariants need n = 4, got {}", sm.n())));
    }
    let first = super::evaluate_contraction(super::library().find("pontryagin").expect("library entry"), sm)?;
    let geo = sm.geometry();
    let r = sm.curvature_field(0)?;
    let mut eta_up = sm.eta_field()?;
    for s in 0..4 {
        eta_up = geo.raise(&eta_up, s);
    }
    let r_mixed = geo.raise(&r, 3);
    // P^{IJ}{}_B{}^C = η^{IJKL} R̃_{KLB}{}^C
    let p = contract_product(&eta_up, &r_mixed, &[(2, 0), (3, 1)]);
    let l = contract_product(&r, &p, &[(0, 0), (1, 1), (3, 3)]);
    let l_sym = l.add(&l.permute(&[1, 0])).map(|c| c.scale_ratio(1, 2));
    let dl = tractor_d(geo, &l_sym, -2)?;
    let ddl = tractor_d(geo, &dl, -2)?;
    let inner = geo.contract(&ddl, 1, 3);
    let second = geo.contract(&inner, 0, 1);
    let second = sm.restrict(&second)?.comps.remove(0);
    let first = first.value.comps[0].clone();
    Ok((first, second))
}

/// `Υ_i = ∂_i ω / ω` for `ω = e^Υ`.
pub fn log_derivative<S: Scalar>(omega: &MultiJet<S>) -> Result<Vec<MultiJet<S>>> {
    let inv = omega.inverse().map_err(|_| Error::Domain("ω must be a unit at the base point".into()))?;
    let n = omega.space().dim();
    Ok((0..n).map(|i| omega.partial_x(i).mul(&inv)).collect())
}

/// `p^A{}_I` (row `A`, column `I`) for `ĝ = e^{2Υ} g`:
/// `(1, Υ_i, -½Υ_kΥ^k; 0, δ^a_i, -Υ^a; 0, 0, 1)`.
pub fn p_matrix<S: Scalar>(g: &MetricData<S>, upsilon: &[MultiJet<S>]) -> JetTensor<S> {
    let n = g.dim();
    let sp = g.space().clone();
    let up: Vec<MultiJet<S>> = (0..n)
        .map(|a| {
            let mut acc = MultiJet::exact_zero(&sp);
            for (b, u) in upsilon.iter().enumerate() {
                acc = acc.add(&g.ginv.get(&[a, b]).mul(u));
            }
            acc
        })
        .collect();
    let mut norm = MultiJet::exact_zero(&sp);
    for (u, v) in upsilon.iter().zip(&up) {
        norm = norm.add(&u.mul(v));
    }
    let one = MultiJet::from_i64(&sp, 1);
    let zero = MultiJet::exact_zero(&sp);
    Tensor::from_fn(n + 2, 2, |ix| {
        let (a, i) = (ix[0], ix[1]);
        let inf = n + 1;
        match (a, i) {
            (0, 0) => one.clone(),
            (0, i) if i == inf => norm.scale_ratio(-1, 2),
            (0, i) => upsilon[i - 1].clone(),
            (a, i) if a == inf && i == inf => one.clone(),
            (a, i) if a < inf && i == inf => up[a - 1].neg(),
            (a, i) if a < inf && a == i => one.clone(),
            _ => zero.clone(),
        }
    })
}

/// `v_{A…} p^A{}_I ⋯` over every slot.
fn transform_all<S: Scalar>(v: &JetTensor<S>, p: &JetTensor<S>) -> JetTensor<S> {
    let pt = p.permute(&[1, 0]);
    (0..v.rank).fold(v.clone(), |t, s| t.transform_slot(&pt, s))
}

/// Outcome of a transformation-law check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 8 {
            self.failures.push(what());
        }
    }
}

/// Checks the cotractor law `v̂_{I…} = ω^{w+p-2#∞} v_{A…} p^A{}_I ⋯` of
/// rank `p = 4 + r` and weight `w = -2 - r` for the natural components of
/// `∇̃^r R̃|_{ρ=0,t=1}` under `ĝ = ω² g`.
pub fn check_tractor_law<S: Scalar>(
    g: &MetricData<S>,
    omega: &MultiJet<S>,
    r: usize,
    a: Option<(&[MultiJet<S>], &[MultiJet<S>])>,
) -> Result<LawReport> {
    let n = g.dim();
    let ups = log_derivative(omega)?;
    let g_hat = g.conformal_rescale(omega)?;
    let sm = SmoothAmbient::new(g, a.map(|x| x.0))?;
    let sm_hat = SmoothAmbient::new(&g_hat, a.map(|x| x.1))?;
    let v = sm.ambient_curv_derivs(r)?;
    let v_hat = sm_hat.ambient_curv_derivs(r)?;
    let moved = transform_all(&v.comps, &p_matrix(g, &ups));
    let inf = n + 1;
    let scale = max_abs(&v_hat.comps.comps).max(1.0);
    let mut report = LawReport::default();
    for idx in moved.indices() {
        if !v.is_natural(&idx) {
            continue;
        }
        let infs = idx.iter().filter(|&&i| i == inf).count() as i64;
        let e = (2 - 2 * infs) as i64;
        let want = moved.get(&idx).mul(&omega.pow(e)?);
        let got = v_hat.get(&idx);
        report.record(jets_match_within(got, &want, scale), || format!("component {idx:?} (strength {})", strength(n, &idx)));
    }
    Ok(report)
}

/// Result of [`check_a_transform`].
#[derive(Clone, Debug)]
pub struct ATransformReport<S: Scalar> {
    /// `𝐀 = 2R̃_{∞ij∞}|₀` for `g`.
    pub a_mod: JetTensor<S>,
    /// `𝐀 + 2Σ′`, which the law sets equal to `ω²𝐀̂`.
    pub law_rhs: JetTensor<S>,
    /// The explicit four-dimensional display.
    pub display_rhs: JetTensor<S>,
    /// `Â = 𝐀̂ - K̂`, the ambiguity tensor for `ĝ` implied by the law.
    pub a_hat: JetTensor<S>,
    pub display_agrees: bool,
    /// `2R̃̂_{∞ij∞}|₀` recomputed from `(ĝ, Â)` equals `𝐀̂`.
    pub resolve_agrees: bool,
    /// Natural curvature components obey the cotractor law.
    pub natural: LawReport,
}

impl<S: Scalar> ATransformReport<S> {
    pub fn passed(&self) -> bool {
        self.display_agrees && self.resolve_agrees && self.natural.passed()
    }
}

/// The transformation law of `𝐀` in dimension four under `ĝ = ω² g`:
/// `ω²𝐀̂_ij = 𝐀_ij + 2Σ′ R̃_{ABCD} p^A{}_∞ p^B{}_i p^C{}_j p^D{}_∞`, the
/// primed sum omitting `ABCD = ∞ij∞`, compared with
/// `𝐀_ij - 2Υ^l(C_ijl + C_jil) + 2Υ^kΥ^l W_kijl`.
pub fn check_a_transform<S: Scalar>(
    g: &MetricData<S>,
    a: &[MultiJet<S>],
    omega: &MultiJet<S>,
) -> Result<ATransformReport<S>> {
    let n = g.dim();
    if n != 4 {
        return Err(Error::Input(format!("the explicit 𝐀 law is for n = 4, got {n}")));
    }
    let inf = n + 1;
    let ups = log_derivative(omega)?;
    let sm = SmoothAmbient::new(g, Some(a))?;
    let rc = sm.ambient_curv_derivs(0)?;
    let moved = transform_all(&rc.comps, &p_matrix(g, &ups));
    let a_mod = Tensor::from_fn(n, 2, |ix| rc.get(&[inf, ix[0] + 1, ix[1] + 1, inf]).scale_i64(2));
    let law_rhs = Tensor::from_fn(n, 2, |ix| moved.get(&[inf, ix[0] + 1, ix[1] + 1, inf]).scale_i64(2));
    let display_rhs = super::base::a_transform_display(g, &a_mod, &ups)?;
    let scale = max_abs(&law_rhs.comps).max(1.0);
    let display_agrees = law_rhs.comps.iter().zip(&display_rhs.comps).all(|(x, y)| jets_match_within(x, y, scale));

    let g_hat = g.conformal_rescale(omega)?;
    let inv_w2 = omega.mul(omega).inverse()?;
    let a_mod_hat = law_rhs.map(|c| c.mul(&inv_w2));
    let k_hat = k_tensor(&g_hat)?;
    let a_hat = a_mod_hat.sub(&k_hat);
    let sm_hat = SmoothAmbient::new(&g_hat, Some(&a_hat.comps))?;
    let rc_hat = sm_hat.ambient_curv_derivs(0)?;
    let resolve_agrees = (0..n).all(|i| {
        (0..n).all(|j| jets_match_within(&rc_hat.get(&[inf, i + 1, j + 1, inf]).scale_i64(2), a_mod_hat.get(&[i, j]), scale))
    });
    let scale = max_abs(&rc_hat.comps.comps).max(1.0);
    let mut natural = LawReport::default();
    for idx in moved.indices() {
        if !rc.is_natural(&idx) {
            continue;
        }
        let infs = idx.iter().filter(|&&i| i == inf).count() as i64;
        let want = moved.get(&idx).mul(&omega.pow(2 - 2 * infs)?);
        natural.record(jets_match_within(rc_hat.get(&idx), &want, scale), || format!("component {idx:?}"));
    }
    Ok(ATransformReport { a_mod, law_rhs, display_rhs, a_hat, display_agrees, resolve_agrees, natural })
}
