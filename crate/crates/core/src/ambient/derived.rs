//! Tensors read off the ambient expansion: the obstruction tensor, `D_i`,
//! `K_ij`, `𝐀_ij` and the log coefficients.

use malachite_q::Rational;

use super::{negligible, smooth_polynomial, AmbTensor, AmbientGeometry, Block, NormalFormAmbient};
use crate::error::{Error, Result};
use crate::riemann::{JetTensor, MetricData};
use crate::scalar::{factorial, Scalar};
use crate::series::MultiJet;
use crate::tensor::{Component, Tensor};

fn require_even(n: usize) -> Result<()> {
    if n % 2 == 1 || n < 4 {
        return Err(Error::Input(format!("n must be even and at least 4 (got {n})")));
    }
    Ok(())
}

/// In dimension four, `g^(1)_ij|₀ = c₁ 𝒪_ij` with `c₁ = -1/2`.
pub const FIRST_LOG_OBSTRUCTION: (i64, i64) = (-1, 2);
/// In dimension four, `g^(1)_{i∞}|₀ = c₂ (A_ij,^j - D_i)` with `c₂ = 1/4`.
pub const FIRST_LOG_DIVERGENCE: (i64, i64) = (1, 4);
/// In dimension four, `g^(2)_{∞∞}|₀ = c 𝒪_ij 𝒪^ij` with `c = -1/24`.
pub const SECOND_LOG_NORM: (i64, i64) = (-1, 24);

/// `c_n = (-1)^{n/2-1} 2^{n-2} (n/2-1)!² / (n-2)`.
pub fn obstruction_constant(n: usize) -> Rational {
    let h = (n / 2 - 1) as u32;
    let f = factorial(h);
    let mut c = Rational::from(1u64 << (n - 2)) * &f * &f / Rational::from((n - 2) as u64);
    if h % 2 == 1 {
        c = -c;
    }
    c
}

/// The polynomial of degree `n/2` in `ρ` solving through `ρ^{n/2-1}`, whose
/// `ρ^{n/2}` coefficient is pure trace plus `A / (n/2)!` when an ambiguity is
/// given; `g_i∞ = g_∞∞ = 0`.
pub fn expand<S: Scalar>(base: &MetricData<S>, a: Option<&[MultiJet<S>]>) -> Result<NormalFormAmbient<S>> {
    let n = base.dim();
    require_even(n)?;
    smooth_polynomial(base, (n / 2 - 1) as u32, a)
}

/// `𝒪_ij = c_n 2^{1-n/2} [ρ^{n/2-1}] Ric_ij` at `t = 1`, from the ambient
/// Ricci tensor of an expansion through `ρ^{n/2-1}`.
pub fn obstruction_from_ricci<S: Scalar>(ric: &AmbTensor<S>) -> Result<JetTensor<S>> {
    let n = ric.dim - 2;
    require_even(n)?;
    let ctx = ric.comps[0].ctx();
    let c = obstruction_constant(n) / Rational::from(1u64 << (n / 2 - 1));
    let c = S::from_rational(&ctx, &c);
    let k = (n / 2 - 1) as u32;
    Tensor::try_from_fn(n, 2, |ix| Ok(ric.get(&[ix[0] + 1, ix[1] + 1]).f.coeff(k, 0)?.scale(&c)))
}

/// The obstruction tensor of `g`.
pub fn obstruction<S: Scalar>(base: &MetricData<S>) -> Result<JetTensor<S>> {
    let amb = expand(base, None)?;
    amb.export_tensor(&obstruction_from_ricci(&amb.ricci()?)?)
}

/// `D_i = -2 (n/2-1)! [ρ^{n/2-1}] R̃_{i∞}` at `t = 1`.
pub fn d_from_ricci<S: Scalar>(ric: &AmbTensor<S>) -> Result<Vec<MultiJet<S>>> {
    let n = ric.dim - 2;
    require_even(n)?;
    let k = (n / 2 - 1) as u32;
    let ctx = ric.comps[0].ctx();
    let c = S::from_rational(&ctx, &(factorial(k) * Rational::from(-2)));
    (0..n).map(|i| Ok(ric.get(&[i + 1, n + 1]).f.coeff(k, 0)?.scale(&c))).collect()
}

/// `D_i` of `g`.
pub fn d_form<S: Scalar>(base: &MetricData<S>) -> Result<Vec<MultiJet<S>>> {
    let amb = expand(base, None)?;
    d_from_ricci(&amb.ricci()?)?.iter().map(|c| amb.export(c)).collect()
}

/// `∇_∞` applied to every component of a covariant tensor. In normal form
/// `Γ̃^M_{∞∞} = 0`, so iterating this gives `T_{…,∞∞…}`.
pub fn rho_derivative<S: Scalar>(geo: &AmbientGeometry<S>, t: &AmbTensor<S>) -> Result<AmbTensor<S>> {
    let d = geo.dim();
    let inf = d - 1;
    for m in 0..d {
        if !geo.conn.upper.get(&[m, inf, inf]).is_zero() {
            return Err(Error::Inconsistent("ρ-lines are not geodesics".into()));
        }
    }
    let gam = &geo.conn.upper;
    let r = t.rank;
    let mut src = vec![0usize; r];
    Tensor::try_from_fn(d, r, |idx| {
        let mut v = t.get(idx).partial(inf)?;
        for s in 0..r {
            src.copy_from_slice(idx);
            for m in 0..d {
                let g = gam.get(&[m, inf, idx[s]]);
                if g.is_exact_zero() {
                    continue;
                }
                src[s] = m;
                let tv = t.get(&src);
                if !tv.is_exact_zero() {
                    v = v.sub(&g.mul(tv));
                }
            }
        }
        Ok(v)
    })
}

/// `R̃_{∞ij∞,∞…∞}` (with `n/2 - 2` trailing `∞`) at `ρ = 0`, `t = 1` for the
/// expansion carrying ambiguity `a`.
pub fn curvature_infinity<S: Scalar>(base: &MetricData<S>, a: Option<&[MultiJet<S>]>) -> Result<JetTensor<S>> {
    let n = base.dim();
    let amb = expand(base, a)?;
    let geo = amb.geometry()?;
    let mut r = geo.riemann()?;
    for _ in 0..(n / 2 - 2) {
        r = rho_derivative(&geo, &r)?;
    }
    let inf = n + 1;
    Tensor::try_from_fn(n, 2, |ix| amb.export(&r.get(&[inf, ix[0] + 1, ix[1] + 1, inf]).f.coeff(0, 0)?))
}

/// `K_ij = 2 R̃_{∞ij∞,∞…∞}` with `A = 0`.
pub fn k_tensor<S: Scalar>(base: &MetricData<S>) -> Result<JetTensor<S>> {
    let ctx = base.space().ctx().clone();
    Ok(curvature_infinity(base, None)?.scale(&S::from_i64(&ctx, 2)))
}

/// `𝐀 = A + K`.
pub fn modified_ambiguity<S: Scalar>(base: &MetricData<S>, a: &[MultiJet<S>]) -> Result<JetTensor<S>> {
    let n = base.dim();
    let k = k_tensor(base)?;
    Ok(Tensor::from_fn(n, 2, |ix| k.get(ix).add(&a[ix[0] * n + ix[1]])))
}

/// `g^(N)_{IJ}|_{ρ=0}`: the coefficient of `ρ^{(n/2-1)N+1} Λ^N`.
pub fn log_coefficient<S: Scalar>(amb: &NormalFormAmbient<S>, block: Block, i: usize, j: usize, level: usize) -> Result<MultiJet<S>> {
    let n = amb.n();
    require_even(n)?;
    let s = ((n / 2 - 1) * level + 1) as u32;
    if level > amb.nmax() {
        return Err(Error::InsufficientOrder(format!("log level {level} was not computed")));
    }
    let c = amb.coeff(block, i, j, s, level)?;
    if c.order() < 0 {
        return Err(Error::InsufficientOrder(format!(
            "the ρ^{s} Λ^{level} coefficient needs weight {} (jet order {})",
            2 * s as i32 + block.strength() - 2,
            amb.outer_space().max_order()
        )));
    }
    amb.export(&c)
}

/// `g^(1)_ij|₀` as a tensor.
pub fn first_log_ij<S: Scalar>(amb: &NormalFormAmbient<S>) -> Result<JetTensor<S>> {
    let n = amb.n();
    Tensor::try_from_fn(n, 2, |ix| log_coefficient(amb, Block::Ij, ix[0], ix[1], 1))
}

/// `g^(1)_{i∞}|₀`.
pub fn first_log_i_inf<S: Scalar>(amb: &NormalFormAmbient<S>) -> Result<Vec<MultiJet<S>>> {
    (0..amb.n()).map(|i| log_coefficient(amb, Block::IInf, i, 0, 1)).collect()
}

/// The `(log)²` data: `g^(2)_{∞∞}|₀`, after checking that `g^(2)_ij|₀` and
/// `g^(2)_{i∞}|₀` vanish.
pub fn second_log_infinity<S: Scalar>(amb: &NormalFormAmbient<S>) -> Result<MultiJet<S>> {
    let n = amb.n();
    let g2 = log_coefficient(amb, Block::InfInf, 0, 0, 2)?;
    let scale = crate::invariants::max_abs(&amb.base().g.comps).max(g2.max_abs_f64());
    for i in 0..n {
        if !negligible(&log_coefficient(amb, Block::IInf, i, 0, 2)?, scale) {
            return Err(Error::Inconsistent(format!("g^(2)_{{{}∞}} does not vanish at ρ = 0", i + 1)));
        }
        for j in 0..n {
            if !negligible(&log_coefficient(amb, Block::Ij, i, j, 2)?, scale) {
                return Err(Error::Inconsistent(format!("g^(2)_{{{}{}}} does not vanish at ρ = 0", i + 1, j + 1)));
            }
        }
    }
    Ok(g2)
}

/// `A_ij,^j`.
pub fn ambiguity_divergence<S: Scalar>(base: &MetricData<S>, a: &[MultiJet<S>]) -> Result<Vec<MultiJet<S>>> {
    let n = base.dim();
    let t = Tensor { dim: n, rank: 2, comps: a.to_vec() };
    Ok(base.divergence(&t)?.comps)
}
