//! Curvature of the base metric as jets at the base point.
//!
//! Conventions follow [`crate::tensor`]: `R_{ijkl}` has the round sphere
//! `R_{ijkl} = g_{ik} g_{jl} - g_{il} g_{jk}`, Schouten
//! `P = (Ric - R g / (2(n-1))) / (n-2)`, Cotton `C_{ijk} = P_{ij,k} - P_{ik,j}`,
//! Weyl `W = R - P ⊙ g`, Bach `B_{ij} = C_{ijk,}{}^k - P^{kl} W_{kijl}`.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::levi_civita::{self, Connection};
use crate::scalar::Scalar;
use crate::series::{JetSpace, MultiJet};
use crate::tensor::{invert_matrix, Component, Tensor};

pub type JetTensor<S> = Tensor<MultiJet<S>>;

/// A pseudo-Riemannian metric as jets at the base point.
#[derive(Clone, Debug)]
pub struct MetricData<S: Scalar> {
    pub g: JetTensor<S>,
    pub ginv: JetTensor<S>,
    pub signature: (usize, usize),
    conn: Connection<MultiJet<S>>,
}

/// Signature `(p, q)` of a constant symmetric matrix by exact elimination.
pub fn signature_of<S: Scalar>(m: &[S], n: usize) -> Result<(usize, usize)> {
    let mut a: Vec<Vec<S>> = (0..n).map(|i| m[i * n..(i + 1) * n].to_vec()).collect();
    let (mut p, mut q) = (0, 0);
    let mut size = n;
    while size > 0 {
        // find a nonzero diagonal pivot, or create one from an off-diagonal entry
        let piv = (0..size).find(|&i| !a[i][i].is_zero());
        let k = match piv {
            Some(k) => k,
            None => {
                let Some((i, j)) = (0..size)
                    .flat_map(|i| (0..size).map(move |j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero())
                else {
                    return Err(Error::InvalidMetric("degenerate at base point".into()));
                };
                // replace e_i by e_i + e_j: a_ii becomes 2 a_ij
                for c in 0..size {
                    let v = a[j][c].clone();
                    a[i][c].add_assign(&v);
                }
                for r in 0..size {
                    let v = a[r][j].clone();
                    a[r][i].add_assign(&v);
                }
                i
            }
        };
        match a[k][k].sign() {
            Ordering::Greater => p += 1,
            Ordering::Less => q += 1,
            Ordering::Equal => unreachable!(),
        }
        let pivot = a[k][k].clone();
        let row = a[k].clone();
        let mut next = Vec::with_capacity(size - 1);
        for r in (0..size).filter(|&r| r != k) {
            let f = a[r][k].div(&pivot).expect("nonzero pivot");
            let new_row: Vec<S> = (0..size).filter(|&c| c != k).map(|c| a[r][c].sub(&f.mul(&row[c]))).collect();
            next.push(new_row);
        }
        a = next;
        size -= 1;
    }
    Ok((p, q))
}

impl<S: Scalar> MetricData<S> {
    /// Validates symmetry, nondegeneracy and signature, then inverts.
    pub fn new(comps: Vec<MultiJet<S>>, signature: (usize, usize)) -> Result<Self> {
        let n2 = comps.len();
        let n = (n2 as f64).sqrt().round() as usize;
        if n * n != n2 || n == 0 {
            return Err(Error::Shape("metric needs n*n components".into()));
        }
        if signature.0 + signature.1 != n {
            return Err(Error::InvalidMetric(format!("signature {signature:?} does not match dimension {n}")));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !comps[i * n + j].agrees_with(&comps[j * n + i]) {
                    return Err(Error::InvalidMetric(format!("not symmetric in ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let at0: Vec<S> = comps.iter().map(|c| c.constant_term()).collect::<Result<_>>()?;
        let sig = signature_of(&at0, n)?;
        if sig != signature {
            return Err(Error::InvalidMetric(format!(
                "declared signature {signature:?} but the metric has {sig:?} at the base point"
            )));
        }
        let g = Tensor { dim: n, rank: 2, comps };
        let ginv_comps = invert_jet_matrix(&g.comps, n)?;
        let ginv = Tensor { dim: n, rank: 2, comps: ginv_comps };
        let conn = levi_civita::connection(&g, &ginv)?;
        Ok(MetricData { g, ginv, signature, conn })
    }

    pub fn dim(&self) -> usize {
        self.g.dim
    }

    /// The same data in a space whose jet order is larger by `extra`; the
    /// metric keeps its known order.
    pub fn lift(&self, extra: u32) -> Result<Self> {
        let sp = self.space();
        let target = JetSpace::new(
            sp.ctx().clone(),
            sp.dim(),
            &sp.active(),
            sp.rho_var().is_some(),
            (sp.max_order() + extra as i32) as u32,
        )?;
        let comps = self.g.comps.iter().map(|c| c.to_space(&target)).collect::<Result<_>>()?;
        Self::new(comps, self.signature)
    }

    pub fn space(&self) -> &Arc<JetSpace<S>> {
        self.g.comps[0].space()
    }

    pub fn order(&self) -> i32 {
        self.g.comps.iter().map(|c| c.order()).min().unwrap_or(0)
    }

    fn zero(&self) -> MultiJet<S> {
        MultiJet::exact_zero(self.space())
    }

    fn need_order(&self, k: i32, what: &str) -> Result<()> {
        if self.order() < k {
            return Err(Error::InsufficientOrder(format!("{what} needs jet order {k}, metric has {}", self.order())));
        }
        Ok(())
    }

    /// `Γ^k_{ij}` as a rank-3 tensor indexed `[k, i, j]`.
    pub fn christoffel(&self) -> &JetTensor<S> {
        &self.conn.upper
    }

    pub fn riemann(&self) -> Result<JetTensor<S>> {
        self.need_order(2, "curvature")?;
        levi_civita::riemann(&self.conn)
    }

    pub fn ricci(&self) -> Result<JetTensor<S>> {
        self.need_order(2, "Ricci curvature")?;
        levi_civita::ricci(&self.conn)
    }

    pub fn scalar_curvature(&self) -> Result<MultiJet<S>> {
        Ok(self.trace(&self.ricci()?))
    }

    /// `g^{ij} T_{ij}`.
    pub fn trace(&self, t: &JetTensor<S>) -> MultiJet<S> {
        let n = self.dim();
        let mut acc = self.zero();
        for i in 0..n {
            for j in 0..n {
                let h = self.ginv.get(&[i, j]);
                if !h.is_exact_zero() {
                    acc = acc.add(&h.mul(t.get(&[i, j])));
                }
            }
        }
        acc
    }

    /// Trace-free part of a symmetric 2-tensor.
    pub fn trace_free(&self, t: &JetTensor<S>) -> JetTensor<S> {
        let n = self.dim() as i64;
        let tr = self.trace(t).scale(&S::from_ratio(self.space().ctx(), 1, n));
        t.sub(&self.g.map(|gij| gij.mul(&tr)))
    }

    pub fn schouten(&self) -> Result<JetTensor<S>> {
        let n = self.dim() as i64;
        if n < 3 {
            return Err(Error::Domain("Schouten tensor needs n >= 3".into()));
        }
        let ric = self.ricci()?;
        let r = self.trace(&ric);
        let ctx = self.space().ctx().clone();
        let c = r.scale(&S::from_ratio(&ctx, 1, 2 * (n - 1)));
        Ok(ric.sub(&self.g.map(|gij| gij.mul(&c))).scale(&S::from_ratio(&ctx, 1, n - 2)))
    }

    /// Covariant derivative of a covariant tensor (derivative index last).
    pub fn cov_deriv(&self, t: &JetTensor<S>) -> Result<JetTensor<S>> {
        levi_civita::covariant_derivative(t, &vec![false; t.rank], &self.conn)
    }

    /// Covariant derivative with explicit slot variance.
    pub fn cov_deriv_mixed(&self, t: &JetTensor<S>, upper: &[bool]) -> Result<JetTensor<S>> {
        levi_civita::covariant_derivative(t, upper, &self.conn)
    }

    pub fn raise(&self, t: &JetTensor<S>, slot: usize) -> JetTensor<S> {
        t.transform_slot(&self.ginv, slot)
    }

    pub fn lower(&self, t: &JetTensor<S>, slot: usize) -> JetTensor<S> {
        t.transform_slot(&self.g, slot)
    }

    /// Contraction of slots `a` and `b` with `g^{-1}`.
    pub fn contract(&self, t: &JetTensor<S>, a: usize, b: usize) -> JetTensor<S> {
        t.trace_with(&self.ginv, a, b)
    }

    /// `∇^k T_{..k}` on the last slot.
    pub fn divergence(&self, t: &JetTensor<S>) -> Result<JetTensor<S>> {
        let d = self.cov_deriv(t)?;
        Ok(self.contract(&d, t.rank - 1, t.rank))
    }

    /// Rough Laplacian `g^{ab} T_{..,ab}`.
    pub fn laplacian(&self, t: &JetTensor<S>) -> Result<JetTensor<S>> {
        let dd = self.cov_deriv(&self.cov_deriv(t)?)?;
        Ok(self.contract(&dd, t.rank, t.rank + 1))
    }

    pub fn cotton(&self) -> Result<JetTensor<S>> {
        let dp = self.cov_deriv(&self.schouten()?)?;
        Ok(Tensor::from_fn(self.dim(), 3, |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            dp.get(&[i, j, k]).sub(dp.get(&[i, k, j]))
        }))
    }

    /// `P ⊙ g` in the decomposition `R = W + P ⊙ g`.
    pub fn kulkarni_schouten(&self, p: &JetTensor<S>) -> JetTensor<S> {
        let g = &self.g;
        Tensor::from_fn(self.dim(), 4, |ix| {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            p.get(&[i, k])
                .mul(g.get(&[j, l]))
                .add(&p.get(&[j, l]).mul(g.get(&[i, k])))
                .sub(&p.get(&[i, l]).mul(g.get(&[j, k])))
                .sub(&p.get(&[j, k]).mul(g.get(&[i, l])))
        })
    }

    pub fn weyl(&self) -> Result<JetTensor<S>> {
        let r = self.riemann()?;
        Ok(r.sub(&self.kulkarni_schouten(&self.schouten()?)))
    }

    pub fn bach(&self) -> Result<JetTensor<S>> {
        let n = self.dim();
        let c = self.cotton()?;
        let div_c = self.divergence(&c)?;
        let p_up = self.raise(&self.raise(&self.schouten()?, 0), 1);
        let w = self.weyl()?;
        Ok(Tensor::from_fn(n, 2, |ix| {
            let (i, j) = (ix[0], ix[1]);
            let mut v = div_c.get(&[i, j]).clone();
            for k in 0..n {
                for l in 0..n {
                    let pk = p_up.get(&[k, l]);
                    let wk = w.get(&[k, i, j, l]);
                    if pk.is_exact_zero() || wk.is_exact_zero() {
                        continue;
                    }
                    v = v.sub(&pk.mul(wk));
                }
            }
            v
        }))
    }

    /// The pullback under the reflection `x^i ↦ -x^i`, which reverses the
    /// coordinate orientation.
    pub fn reflect(&self, i: usize) -> Result<MetricData<S>> {
        let n = self.dim();
        let comps = (0..n * n)
            .map(|k| {
                let (a, b) = (k / n, k % n);
                let c = self.g.comps[k].reflect(i);
                if (a == i) != (b == i) {
                    c.neg()
                } else {
                    c
                }
            })
            .collect();
        MetricData::new(comps, self.signature)
    }

    /// `ω² g` for a unit jet `ω`.
    pub fn conformal_rescale(&self, omega: &MultiJet<S>) -> Result<MetricData<S>> {
        omega.inverse().map_err(|_| Error::Domain("conformal factor vanishes at the base point".into()))?;
        let w2 = omega.mul(omega);
        MetricData::new(self.g.comps.iter().map(|c| c.mul(&w2)).collect(), self.signature)
    }
}

/// Inverse of a matrix of jets with invertible value at the base point.
pub fn invert_jet_matrix<S: Scalar>(m: &[MultiJet<S>], n: usize) -> Result<Vec<MultiJet<S>>> {
    invert_matrix(
        m,
        n,
        |c| c.order() >= 0 && !c.coeff_idx(0).is_zero(),
        |c| c.inverse(),
    )
    .map_err(|_| Error::InvalidMetric("degenerate at base point".into()))
}

/// Constant values at the base point of a tensor.
pub fn base_values<S: Scalar>(t: &JetTensor<S>) -> Result<Vec<S>> {
    t.comps.iter().map(|c| c.constant_term()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::MetricSpec;
    use crate::scalar::Q;

    fn sphere(n: usize, order: u32) -> MetricData<Q> {
        let r2: Vec<String> = (1..=n).map(|i| format!("x{i}^2")).collect();
        let f = format!("4/(1 + {})^2", r2.join(" + "));
        let rows: Vec<Vec<String>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { f.clone() } else { "0".into() }).collect()).collect();
        let refs: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
        let rr: Vec<&[&str]> = refs.iter().map(|r| r.as_slice()).collect();
        let spec = MetricSpec::from_strings((n, 0), &rr).unwrap();
        let act: Vec<usize> = (0..n).collect();
        let sp = JetSpace::new((), n, &act, false, order).unwrap();
        MetricData::new(spec.jets(&sp).unwrap(), (n, 0)).unwrap()
    }

    #[test]
    fn sphere_curvature_signs() {
        let n = 3;
        let m = sphere(n, 4);
        let ric = m.ricci().unwrap();
        for i in 0..n {
            for j in 0..n {
                let expect = m.g.get(&[i, j]).scale_i64(n as i64 - 1);
                assert!(ric.get(&[i, j]).agrees_with(&expect), "Ric[{i}][{j}]");
            }
        }
        let r = m.riemann().unwrap();
        let g = &m.g;
        let expect = g.get(&[0, 0]).mul(g.get(&[1, 1]));
        assert!(r.get(&[0, 1, 0, 1]).agrees_with(&expect));
        let w = m.weyl().unwrap();
        assert!(w.comps.iter().all(|c| c.is_zero()));
        let p = m.schouten().unwrap();
        assert!(p.get(&[0, 0]).agrees_with(&g.get(&[0, 0]).scale(&Q::new(1, 2))));
    }

    #[test]
    fn signature_detection() {
        let m = [Q::int(0), Q::int(1), Q::int(1), Q::int(0)];
        assert_eq!(signature_of(&m, 2).unwrap(), (1, 1));
        let d = [Q::int(2), Q::int(0), Q::int(0), Q::int(3)];
        assert_eq!(signature_of(&d, 2).unwrap(), (2, 0));
        let z = [Q::int(1), Q::int(1), Q::int(1), Q::int(1)];
        assert!(signature_of(&z, 2).is_err());
    }
}
