//! Base-side expressions of the invariants, computed from the curvature of
//! `g` without the ambient metric.

use crate::error::{Error, Result};
use crate::riemann::{JetTensor, MetricData};
use crate::scalar::Scalar;
use crate::series::MultiJet;
use crate::tensor::{contract_product, Component, Tensor};

/// `T` with the listed slots raised by `g^{-1}`.
pub fn raise_slots<S: Scalar>(g: &MetricData<S>, t: &JetTensor<S>, slots: &[usize]) -> JetTensor<S> {
    slots.iter().fold(t.clone(), |acc, &s| g.raise(&acc, s))
}

/// `T_{a…} U^{a…}` for tensors of equal rank.
pub fn inner<S: Scalar>(g: &MetricData<S>, t: &JetTensor<S>, u: &JetTensor<S>) -> MultiJet<S> {
    let all: Vec<usize> = (0..u.rank).collect();
    let up = raise_slots(g, u, &all);
    let pairs: Vec<(usize, usize)> = all.iter().map(|&s| (s, s)).collect();
    contract_product(t, &up, &pairs).comps.remove(0)
}

/// `W^{ijka} W_{ijk}{}^b 𝒪_ab`.
pub fn weyl_weyl_obstruction<S: Scalar>(g: &MetricData<S>, o: &JetTensor<S>) -> Result<MultiJet<S>> {
    let w = g.weyl()?;
    let w_up = raise_slots(g, &w, &[0, 1, 2]);
    let x = contract_product(&w_up, &w, &[(0, 0), (1, 1), (2, 2)]);
    Ok(inner(g, &x, o))
}

/// `W^{ijkl}𝒪_{ik,jl} - (n-1)W^{ijkl}P_{ik}𝒪_{jl} + 2n C^{jkl}𝒪_{jk,l} + c E^{jk}𝒪_{jk}`
/// with `c E = n(n-1)/(n-4) B` for `n ≠ 4`, and `c E = -½n(n-1)𝐀` at `n = 4`.
pub fn curvature_obstruction_hessian<S: Scalar>(
    g: &MetricData<S>,
    o: &JetTensor<S>,
    a_mod: Option<&JetTensor<S>>,
) -> Result<MultiJet<S>> {
    let n = g.dim() as i64;
    let w_up = raise_slots(g, &g.weyl()?, &[0, 1, 2, 3]);
    let p = g.schouten()?;
    let c_up = raise_slots(g, &g.cotton()?, &[0, 1, 2]);
    let o1 = g.cov_deriv(o)?;
    let o2 = g.cov_deriv(&o1)?;
    // o2 slots: (i, k, j, l) for 𝒪_{ik,jl}
    let t1 = contract_product(&w_up, &o2, &[(0, 0), (1, 2), (2, 1), (3, 3)]).comps.remove(0);
    let wp = contract_product(&w_up, &p, &[(0, 0), (2, 1)]);
    let t2 = contract_product(&wp, o, &[(0, 0), (1, 1)]).comps.remove(0);
    let t3 = contract_product(&c_up, &o1, &[(0, 0), (1, 1), (2, 2)]).comps.remove(0);
    let t4 = if n == 4 {
        let a = a_mod.ok_or_else(|| Error::Input("n = 4 needs the modified ambiguity tensor".into()))?;
        inner(g, a, o).scale_ratio(-n * (n - 1), 2)
    } else {
        inner(g, &g.bach()?, o).scale_ratio(n * (n - 1), n - 4)
    };
    Ok(t1.sub(&t2.scale_i64(n - 1)).add(&t3.scale_i64(2 * n)).add(&t4))
}

/// `|W⁺|² - |W⁻|² = ½ ε^{ijab} W_{abkl} W_{ij}{}^{kl}` in dimension four,
/// for the coordinate orientation.
pub fn self_dual_difference<S: Scalar>(g: &MetricData<S>, volume: &MultiJet<S>) -> Result<MultiJet<S>> {
    let n = g.dim();
    if n != 4 {
        return Err(Error::Input("self-duality needs n = 4".into()));
    }
    let zero = MultiJet::exact_zero(volume.space());
    let eps = Tensor::from_fn(n, n, |idx| match super::permutation_sign(&[0, 1, 2, 3], idx) {
        Some(s) => volume.scale_i64(s),
        None => zero.clone(),
    });
    let eps_up = raise_slots(g, &eps, &[0, 1, 2, 3]);
    let w = g.weyl()?;
    let w_mixed = raise_slots(g, &w, &[2, 3]);
    let x = contract_product(&eps_up, &w, &[(2, 0), (3, 1)]);
    Ok(contract_product(&x, &w_mixed, &[(0, 0), (1, 1), (2, 2), (3, 3)]).comps.remove(0).scale_ratio(1, 2))
}

/// `𝐀_ij - 2Υ^l(C_ijl + C_jil) + 2Υ^kΥ^l W_kijl`.
pub fn a_transform_display<S: Scalar>(
    g: &MetricData<S>,
    a_mod: &JetTensor<S>,
    upsilon: &[MultiJet<S>],
) -> Result<JetTensor<S>> {
    let n = g.dim();
    let c = g.cotton()?;
    let w = g.weyl()?;
    let ups = Tensor { dim: n, rank: 1, comps: upsilon.to_vec() };
    let up = g.raise(&ups, 0);
    let cu = contract_product(&c, &up, &[(2, 0)]);
    let wu = contract_product(&contract_product(&w, &up, &[(0, 0)]), &up, &[(2, 0)]);
    Ok(Tensor::from_fn(n, 2, |ix| {
        let (i, j) = (ix[0], ix[1]);
        a_mod
            .get(&[i, j])
            .sub(&cu.get(&[i, j]).add(cu.get(&[j, i])).scale_i64(2))
            .add(&wu.get(&[i, j]).scale_i64(2))
    }))
}
