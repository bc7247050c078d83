//! Coordinate tensor calculus over an abstract component ring.
//!
//! The same Levi-Civita formulas serve the base manifold (components are
//! [`MultiJet`]s) and the ambient space (components carry a power of `t` and
//! a [`LogSeries`](crate::series::LogSeries)).
//!
//! Curvature convention: `R_{ijkl} = g(R(∂_k, ∂_l)∂_j, ∂_i)` with
//! `R(X, Y) = ∇_X∇_Y - ∇_Y∇_X - ∇_[X,Y]`, and `Ric_{jl} = g^{ik} R_{ijkl}`.
//! The round sphere has positive Ricci curvature. Covariant derivative
//! indices are appended last: `T_{ab,c} = (∇_c T)_{ab}`.

use crate::error::Result;
use crate::series::MultiJet;
use crate::scalar::Scalar;

/// A commutative ring of coordinate functions with partial derivatives.
pub trait Component: Clone + std::fmt::Debug {
    type Scalar: Scalar;

    /// Zero of the same kind as `self`.
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Zero known to the full working order, so products with it can be
    /// skipped without losing order information.
    fn is_exact_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &Self::Scalar) -> Self;
    fn partial(&self, coord: usize) -> Result<Self>;
    /// The constant `c` as a component of the same kind as `self`.
    fn constant_like(&self, c: &Self::Scalar) -> Self;

    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        let ctx = self.ctx();
        self.scale(&Self::Scalar::from_ratio(&ctx, num, den))
    }

    fn ctx(&self) -> <Self::Scalar as Scalar>::Ctx;
}

impl<S: Scalar> Component for MultiJet<S> {
    type Scalar = S;

    fn zero_like(&self) -> Self {
        MultiJet::exact_zero(self.space())
    }
    fn is_zero(&self) -> bool {
        MultiJet::is_zero(self)
    }
    fn is_exact_zero(&self) -> bool {
        MultiJet::is_zero(self) && self.order() >= self.space().max_order()
    }
    fn add(&self, o: &Self) -> Self {
        MultiJet::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        MultiJet::sub(self, o)
    }
    fn neg(&self) -> Self {
        MultiJet::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        MultiJet::mul(self, o)
    }
    fn scale(&self, c: &S) -> Self {
        MultiJet::scale(self, c)
    }
    fn partial(&self, coord: usize) -> Result<Self> {
        Ok(self.partial_x(coord))
    }
    fn constant_like(&self, c: &S) -> Self {
        MultiJet::constant(self.space(), c.clone())
    }
    fn ctx(&self) -> S::Ctx {
        MultiJet::ctx(self).clone()
    }
}

/// Sum of products.
pub fn dot<C: Component>(pairs: impl IntoIterator<Item = (C, C)>, zero: &C) -> C {
    let mut acc: Option<C> = None;
    for (a, b) in pairs {
        let p = a.mul(&b);
        acc = Some(match acc {
            None => p,
            Some(s) => s.add(&p),
        });
    }
    acc.unwrap_or_else(|| zero.zero_like())
}

/// Dense tensor of components with all indices of one dimension.
#[derive(Clone, Debug)]
pub struct Tensor<C> {
    pub dim: usize,
    pub rank: usize,
    pub comps: Vec<C>,
}

impl<C: Component> Tensor<C> {
    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> C) -> Self {
        let total = dim.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let mut comps = Vec::with_capacity(total);
        for flat in 0..total {
            let mut r = flat;
            for s in (0..rank).rev() {
                idx[s] = r % dim;
                r /= dim;
            }
            comps.push(f(&idx));
        }
        Tensor { dim, rank, comps }
    }

    pub fn try_from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Result<C>) -> Result<Self> {
        let total = dim.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let mut comps = Vec::with_capacity(total);
        for flat in 0..total {
            let mut r = flat;
            for s in (0..rank).rev() {
                idx[s] = r % dim;
                r /= dim;
            }
            comps.push(f(&idx)?);
        }
        Ok(Tensor { dim, rank, comps })
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &C {
        &self.comps[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], c: C) {
        let f = self.flat(idx);
        self.comps[f] = c;
    }

    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        Tensor { dim: self.dim, rank: self.rank, comps: self.comps.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Tensor { dim: self.dim, rank: self.rank, comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Tensor { dim: self.dim, rank: self.rank, comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &C::Scalar) -> Self {
        self.map(|a| a.scale(c))
    }

    /// Iterates over all multi-indices of the tensor.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let (dim, rank) = (self.dim, self.rank);
        (0..dim.pow(rank as u32)).map(move |flat| {
            let mut idx = vec![0usize; rank];
            let mut r = flat;
            for s in (0..rank).rev() {
                idx[s] = r % dim;
                r /= dim;
            }
            idx
        })
    }

    /// Permutes slots: result slot `s` is input slot `perm[s]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut src = vec![0usize; self.rank];
        Tensor::from_fn(self.dim, self.rank, |idx| {
            for (s, &p) in perm.iter().enumerate() {
                src[p] = idx[s];
            }
            self.get(&src).clone()
        })
    }

    /// Contracts slot `a` of `self` against slot `b` using the symmetric
    /// bilinear form `h` (a rank-2 tensor, typically an inverse metric).
    /// The two slots are removed; remaining slots keep their order.
    pub fn trace_with(&self, h: &Tensor<C>, a: usize, b: usize) -> Self {
        assert!(a != b && self.rank >= 2);
        let zero = self.comps[0].zero_like();
        let rest: Vec<usize> = (0..self.rank).filter(|&s| s != a && s != b).collect();
        let mut full = vec![0usize; self.rank];
        Tensor::from_fn(self.dim, self.rank - 2, |idx| {
            for (k, &s) in rest.iter().enumerate() {
                full[s] = idx[k];
            }
            let mut pairs = Vec::new();
            for p in 0..self.dim {
                for q in 0..self.dim {
                    let hpq = h.get(&[p, q]);
                    if hpq.is_exact_zero() {
                        continue;
                    }
                    full[a] = p;
                    full[b] = q;
                    let t = self.get(&full);
                    if t.is_exact_zero() {
                        continue;
                    }
                    pairs.push((hpq.clone(), t.clone()));
                }
            }
            dot(pairs, &zero)
        })
    }

    /// Applies `h` to slot `s`: `T'_{..a..} = h_{ab} T_{..b..}`.
    pub fn transform_slot(&self, h: &Tensor<C>, s: usize) -> Self {
        let zero = self.comps[0].zero_like();
        let mut src = vec![0usize; self.rank];
        Tensor::from_fn(self.dim, self.rank, |idx| {
            src.copy_from_slice(idx);
            let mut pairs = Vec::new();
            for b in 0..self.dim {
                let hab = h.get(&[idx[s], b]);
                if hab.is_exact_zero() {
                    continue;
                }
                src[s] = b;
                let t = self.get(&src);
                if t.is_exact_zero() {
                    continue;
                }
                pairs.push((hab.clone(), t.clone()));
            }
            dot(pairs, &zero)
        })
    }
}

/// `Σ a_{..I..} b_{..I..}` over the slot pairs `(sa, sb)`: the result has the
/// free slots of `a` in order, followed by the free slots of `b`. Indices are
/// summed directly, so one slot of each pair should already be raised.
pub fn contract_product<C: Component>(a: &Tensor<C>, b: &Tensor<C>, pairs: &[(usize, usize)]) -> Tensor<C> {
    assert_eq!(a.dim, b.dim);
    let dim = a.dim;
    let free_a: Vec<usize> = (0..a.rank).filter(|s| !pairs.iter().any(|p| p.0 == *s)).collect();
    let free_b: Vec<usize> = (0..b.rank).filter(|s| !pairs.iter().any(|p| p.1 == *s)).collect();
    let zero = a.comps[0].zero_like();
    let k = pairs.len();
    let mut ia = vec![0usize; a.rank];
    let mut ib = vec![0usize; b.rank];
    Tensor::from_fn(dim, free_a.len() + free_b.len(), |out| {
        for (x, &s) in free_a.iter().enumerate() {
            ia[s] = out[x];
        }
        for (x, &s) in free_b.iter().enumerate() {
            ib[s] = out[free_a.len() + x];
        }
        let mut terms = Vec::new();
        for c in 0..dim.pow(k as u32) {
            let mut r = c;
            for &(sa, sb) in pairs.iter().rev() {
                ia[sa] = r % dim;
                ib[sb] = r % dim;
                r /= dim;
            }
            let (x, y) = (a.get(&ia), b.get(&ib));
            if x.is_exact_zero() || y.is_exact_zero() {
                continue;
            }
            terms.push((x.clone(), y.clone()));
        }
        dot(terms, &zero)
    })
}

/// Inverse of a square matrix of components by Gauss-Jordan elimination,
/// pivoting on entries for which `is_unit` holds.
pub fn invert_matrix<C: Component>(
    m: &[C],
    dim: usize,
    is_unit: impl Fn(&C) -> bool,
    inverse: impl Fn(&C) -> Result<C>,
) -> Result<Vec<C>> {
    let mut a: Vec<Vec<C>> = (0..dim).map(|i| m[i * dim..(i + 1) * dim].to_vec()).collect();
    let one = m[0].constant_like(&C::Scalar::one(&m[0].ctx()));
    let mut inv: Vec<Vec<C>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { one.clone() } else { one.zero_like() }).collect())
        .collect();
    for col in 0..dim {
        let piv = (col..dim)
            .find(|&r| is_unit(&a[r][col]))
            .ok_or_else(|| crate::error::Error::Singular(format!("no unit pivot in column {col}")))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = inverse(&a[col][col])?;
        for j in 0..dim {
            a[col][j] = a[col][j].mul(&p);
            inv[col][j] = inv[col][j].mul(&p);
        }
        for r in 0..dim {
            if r == col || a[r][col].is_exact_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..dim {
                if !a[col][j].is_exact_zero() {
                    a[r][j] = a[r][j].sub(&f.mul(&a[col][j]));
                }
                if !inv[col][j].is_exact_zero() {
                    inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j]));
                }
            }
        }
    }
    Ok(inv.into_iter().flatten().collect())
}
