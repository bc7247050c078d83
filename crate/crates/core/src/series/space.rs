//! Monomial bookkeeping shared by every jet of one computation.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sentinel for "no such monomial" in derivative tables.
pub(crate) const NONE: u32 = u32::MAX;

/// The monomial basis of weighted-truncated polynomials in the active
/// coordinates `x^i` (weight 1) and optionally `ρ` (weight 2).
///
/// Only coordinates the inputs actually depend on are active; a derivative in
/// an inactive direction is exactly zero.
#[derive(Debug)]
pub struct JetSpace<S: Scalar> {
    ctx: S::Ctx,
    dim: usize,
    coord_var: Vec<Option<usize>>,
    rho_var: Option<usize>,
    weights: Vec<u8>,
    max_order: i32,
    exps: Vec<Vec<u8>>,
    degs: Vec<i32>,
    upto: Vec<usize>,
    index: HashMap<Vec<u8>, u32>,
    mul: Vec<Vec<u32>>,
    deriv: Vec<Vec<u32>>,
}

impl<S: Scalar> JetSpace<S> {
    /// Builds the space for base dimension `dim` with the listed active
    /// coordinates (0-based), optionally including `ρ`, truncated at weighted
    /// degree `max_order`.
    pub fn new(
        ctx: S::Ctx,
        dim: usize,
        active: &[usize],
        with_rho: bool,
        max_order: u32,
    ) -> Result<Arc<Self>> {
        if max_order > 60 {
            return Err(Error::Input(format!("jet order {max_order} too large")));
        }
        let mut act: Vec<usize> = active.to_vec();
        act.sort_unstable();
        act.dedup();
        if let Some(&bad) = act.iter().find(|&&i| i >= dim) {
            return Err(Error::Shape(format!("coordinate {bad} outside dimension {dim}")));
        }
        let mut coord_var = vec![None; dim];
        let mut weights = Vec::new();
        for (v, &i) in act.iter().enumerate() {
            coord_var[i] = Some(v);
            weights.push(1u8);
        }
        let rho_var = if with_rho {
            weights.push(2);
            Some(weights.len() - 1)
        } else {
            None
        };
        let nv = weights.len();
        let w = max_order as i32;

        let mut exps: Vec<Vec<u8>> = Vec::new();
        let mut cur = vec![0u8; nv];
        enumerate(&weights, 0, w, &mut cur, &mut exps);
        let deg = |e: &[u8]| -> i32 { e.iter().zip(&weights).map(|(&a, &b)| a as i32 * b as i32).sum() };
        exps.sort_by(|a, b| deg(a).cmp(&deg(b)).then_with(|| b.cmp(a)));
        let degs: Vec<i32> = exps.iter().map(|e| deg(e)).collect();
        let mut upto = vec![0usize; w as usize + 1];
        for d in 0..=w {
            upto[d as usize] = degs.iter().take_while(|&&x| x <= d).count();
        }
        let index: HashMap<Vec<u8>, u32> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();

        let mut mul = Vec::with_capacity(exps.len());
        let mut buf = vec![0u8; nv];
        for (i, ei) in exps.iter().enumerate() {
            let lim = upto[(w - degs[i]) as usize];
            let row: Vec<u32> = (0..lim)
                .map(|j| {
                    for k in 0..nv {
                        buf[k] = ei[k] + exps[j][k];
                    }
                    index[&buf]
                })
                .collect();
            mul.push(row);
        }
        let mut deriv = Vec::with_capacity(nv);
        for v in 0..nv {
            let row: Vec<u32> = exps
                .iter()
                .map(|e| {
                    if e[v] == 0 {
                        NONE
                    } else {
                        let mut f = e.clone();
                        f[v] -= 1;
                        index[&f]
                    }
                })
                .collect();
            deriv.push(row);
        }
        Ok(Arc::new(JetSpace {
            ctx,
            dim,
            coord_var,
            rho_var,
            weights,
            max_order: w,
            exps,
            degs,
            upto,
            index,
            mul,
            deriv,
        }))
    }

    pub fn ctx(&self) -> &S::Ctx {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> i32 {
        self.max_order
    }

    pub fn n_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn n_monomials(&self) -> usize {
        self.exps.len()
    }

    pub fn coord_var(&self, i: usize) -> Option<usize> {
        self.coord_var.get(i).copied().flatten()
    }

    /// Active base coordinates.
    pub fn active(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.coord_var[i].is_some()).collect()
    }

    pub fn rho_var(&self) -> Option<usize> {
        self.rho_var
    }

    pub fn weight(&self, v: usize) -> i32 {
        self.weights[v] as i32
    }

    pub fn exponents(&self, idx: u32) -> &[u8] {
        &self.exps[idx as usize]
    }

    pub fn degree(&self, idx: u32) -> i32 {
        self.degs[idx as usize]
    }

    /// Number of monomials of weighted degree `<= d` (0 for negative `d`).
    pub fn count_upto(&self, d: i32) -> usize {
        if d < 0 {
            0
        } else {
            self.upto[d.min(self.max_order) as usize]
        }
    }

    pub fn lookup(&self, e: &[u8]) -> Option<u32> {
        self.index.get(e).copied()
    }

    /// Exponent of `ρ` in a monomial.
    pub fn rho_exp(&self, idx: u32) -> u8 {
        self.rho_var.map(|v| self.exps[idx as usize][v]).unwrap_or(0)
    }

    #[inline]
    pub(crate) fn mul_row(&self, i: u32) -> &[u32] {
        &self.mul[i as usize]
    }

    #[inline]
    pub(crate) fn deriv_row(&self, v: usize) -> &[u32] {
        &self.deriv[v]
    }

    /// Same monomials, different scalar context.
    pub fn same_shape(&self, other: &JetSpace<S>) -> bool {
        self.dim == other.dim
            && self.coord_var == other.coord_var
            && self.rho_var == other.rho_var
            && self.max_order == other.max_order
    }
}

fn enumerate(weights: &[u8], v: usize, left: i32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if v == weights.len() {
        out.push(cur.clone());
        return;
    }
    let w = weights[v] as i32;
    let mut e = 0;
    while e * w <= left {
        cur[v] = e as u8;
        enumerate(weights, v + 1, left - e * w, cur, out);
        e += 1;
    }
    cur[v] = 0;
}
