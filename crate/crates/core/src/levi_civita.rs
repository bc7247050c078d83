//! Christoffel symbols, curvature and covariant derivatives of a metric given
//! in coordinates, generic over the component ring.

use crate::error::Result;
use crate::tensor::{dot, Component, Tensor};

/// Connection data: lowered symbols `Γ_{l i j}` and raised `Γ^k_{i j}`.
#[derive(Clone, Debug)]
pub struct Connection<C> {
    pub lower: Tensor<C>,
    pub upper: Tensor<C>,
}

/// `Γ_{lij} = ½(∂_i g_{jl} + ∂_j g_{il} - ∂_l g_{ij})`, `Γ^k_{ij} = g^{kl} Γ_{lij}`.
pub fn connection<C: Component>(g: &Tensor<C>, ginv: &Tensor<C>) -> Result<Connection<C>> {
    let n = g.dim;
    let zero = g.comps[0].zero_like();
    // dg[l][i][j] = ∂_l g_ij
    let mut dg = Tensor::from_fn(n, 3, |_| zero.clone());
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let d = g.get(&[i, j]).partial(l)?;
                dg.set(&[l, i, j], d.clone());
                dg.set(&[l, j, i], d);
            }
        }
    }
    let mut lower = Tensor::from_fn(n, 3, |_| zero.clone());
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = dg.get(&[i, j, l]).add(dg.get(&[j, i, l])).sub(dg.get(&[l, i, j])).scale_ratio(1, 2);
                lower.set(&[l, i, j], v.clone());
                lower.set(&[l, j, i], v);
            }
        }
    }
    let mut upper = Tensor::from_fn(n, 3, |_| zero.clone());
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let pairs = (0..n)
                    .filter(|&l| !ginv.get(&[k, l]).is_exact_zero() && !lower.get(&[l, i, j]).is_exact_zero())
                    .map(|l| (ginv.get(&[k, l]).clone(), lower.get(&[l, i, j]).clone()));
                let v = dot(pairs, &zero);
                upper.set(&[k, i, j], v.clone());
                upper.set(&[k, j, i], v);
            }
        }
    }
    Ok(Connection { lower, upper })
}

/// Fully lowered curvature `R_{ijkl}`.
pub fn riemann<C: Component>(conn: &Connection<C>) -> Result<Tensor<C>> {
    let (lo, up) = (&conn.lower, &conn.upper);
    let n = lo.dim;
    let zero = lo.comps[0].zero_like();
    let mut r = Tensor::from_fn(n, 4, |_| zero.clone());
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect();
    for (pi, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[pi..] {
            // R_ijkl = ∂_k Γ_{ilj} - ∂_l Γ_{ikj} - Γ_{mki} Γ^m_{lj} + Γ_{mli} Γ^m_{kj}
            let mut v = lo.get(&[i, l, j]).partial(k)?.sub(&lo.get(&[i, k, j]).partial(l)?);
            for m in 0..n {
                let (a, b) = (lo.get(&[m, k, i]), up.get(&[m, l, j]));
                if !a.is_exact_zero() && !b.is_exact_zero() {
                    v = v.sub(&a.mul(b));
                }
                let (a, b) = (lo.get(&[m, l, i]), up.get(&[m, k, j]));
                if !a.is_exact_zero() && !b.is_exact_zero() {
                    v = v.add(&a.mul(b));
                }
            }
            let nv = v.neg();
            r.set(&[i, j, k, l], v.clone());
            r.set(&[j, i, l, k], v.clone());
            r.set(&[j, i, k, l], nv.clone());
            r.set(&[i, j, l, k], nv.clone());
            r.set(&[k, l, i, j], v.clone());
            r.set(&[l, k, j, i], v);
            r.set(&[l, k, i, j], nv.clone());
            r.set(&[k, l, j, i], nv);
        }
    }
    Ok(r)
}

/// `Ric_{jl} = ∂_k Γ^k_{lj} - ∂_l Γ^k_{kj} + Γ^k_{kp} Γ^p_{lj} - Γ^k_{lp} Γ^p_{kj}`.
pub fn ricci<C: Component>(conn: &Connection<C>) -> Result<Tensor<C>> {
    let up = &conn.upper;
    let n = up.dim;
    let zero = up.comps[0].zero_like();
    let mut trace = Vec::with_capacity(n);
    for p in 0..n {
        let mut acc = zero.clone();
        for k in 0..n {
            let c = up.get(&[k, k, p]);
            if !c.is_exact_zero() {
                acc = acc.add(c);
            }
        }
        trace.push(acc);
    }
    let mut ric = Tensor::from_fn(n, 2, |_| zero.clone());
    for j in 0..n {
        for l in j..n {
            let mut v = trace[j].partial(l)?.neg();
            for k in 0..n {
                let c = up.get(&[k, l, j]);
                if !c.is_exact_zero() {
                    v = v.add(&c.partial(k)?);
                }
            }
            for p in 0..n {
                let b = up.get(&[p, l, j]);
                if !b.is_exact_zero() && !trace[p].is_exact_zero() {
                    v = v.add(&trace[p].mul(b));
                }
                for k in 0..n {
                    let (a, b) = (up.get(&[k, l, p]), up.get(&[p, k, j]));
                    if !a.is_exact_zero() && !b.is_exact_zero() {
                        v = v.sub(&a.mul(b));
                    }
                }
            }
            ric.set(&[j, l], v.clone());
            ric.set(&[l, j], v);
        }
    }
    Ok(ric)
}

/// Covariant derivative of a tensor; `upper[s]` marks contravariant slots.
/// The derivative index is appended last.
pub fn covariant_derivative<C: Component>(t: &Tensor<C>, upper: &[bool], conn: &Connection<C>) -> Result<Tensor<C>> {
    let n = t.dim;
    let r = t.rank;
    let gam = &conn.upper;
    let mut src = vec![0usize; r];
    Tensor::try_from_fn(n, r + 1, |idx| {
        let c = idx[r];
        let base = &idx[..r];
        let mut v = t.get(base).partial(c)?;
        for s in 0..r {
            src.copy_from_slice(base);
            for m in 0..n {
                src[s] = m;
                let tv = t.get(&src);
                if tv.is_exact_zero() {
                    continue;
                }
                if upper[s] {
                    let g = gam.get(&[base[s], c, m]);
                    if !g.is_exact_zero() {
                        v = v.add(&g.mul(tv));
                    }
                } else {
                    let g = gam.get(&[m, c, base[s]]);
                    if !g.is_exact_zero() {
                        v = v.sub(&g.mul(tv));
                    }
                }
            }
        }
        Ok(v)
    })
}

/// Raises slot `s` with the inverse metric.
pub fn raise<C: Component>(t: &Tensor<C>, ginv: &Tensor<C>, s: usize) -> Tensor<C> {
    t.transform_slot(ginv, s)
}
