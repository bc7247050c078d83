//! Ambient metrics in normal form relative to a representative `g`:
//!
//! ```text
//!        ⎛ 2ρ   0          t        ⎞
//! g̃  =  ⎜ 0    t² g_ij    t² g_i∞   ⎟
//!        ⎝ t    t² g_j∞    t² g_∞∞   ⎠
//! ```
//!
//! with `g_ij`, `g_i∞`, `g_∞∞` log series in `(x, ρ, Λ)`.
//!
//! Grading: the coefficient of `ρ^s` in the `IJ` entry has weight
//! `2s + ‖IJ‖ - 2`, and the coefficient of `ρ^k` in `Ric_IJ` has weight
//! `2k + ‖IJ‖`, where `‖0‖ = 0`, `‖i‖ = 1`, `‖∞‖ = 2`. A row of weight `w`
//! depends on unknowns of weight at most `w`, and linearly (with coefficients
//! depending only on `g(x)`) on those of weight exactly `w`. Jets use the
//! matching weighted truncation, so a space of order `W` holds every
//! coefficient of weight at most `W`. The ambient calculus runs in a space of
//! order `W + 2`, where `g̃_00 = 2ρ` is exact and each component's known order
//! is `W + 2` minus its index strength.

mod comp;
pub mod derived;
mod solver;

use std::sync::Arc;

pub use comp::{ambient_inverse, index_strength, rho_index, AmbComp, AmbTensor};
pub use solver::{
    check_ambiguity, extend_inhomogeneous, levels_needed, smooth_polynomial, solve_smooth, SolveReport, StageReport,
};

use crate::error::{Error, Result};
use crate::levi_civita;
use crate::riemann::{JetTensor, MetricData};
use crate::scalar::Scalar;
use crate::series::{JetSpace, LogSeries, MultiJet, NO_TAIL};
use crate::tensor::{Component, Tensor};

/// Which metric block an entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    /// `g_ij`
    Ij,
    /// `g_i∞`
    IInf,
    /// `g_∞∞`
    InfInf,
}

impl Block {
    /// `‖IJ‖` of the block.
    pub fn strength(self) -> i32 {
        match self {
            Block::Ij => 2,
            Block::IInf => 3,
            Block::InfInf => 4,
        }
    }
}

/// A normal-form ambient metric.
#[derive(Clone, Debug)]
pub struct NormalFormAmbient<S: Scalar> {
    n: usize,
    base: MetricData<S>,
    outer: Arc<JetSpace<S>>,
    gij: Vec<LogSeries<S>>,
    gi: Vec<LogSeries<S>>,
    ginf: LogSeries<S>,
    /// Highest weight through which every coefficient is determined.
    order: i32,
    report: SolveReport<S>,
}

impl<S: Scalar> NormalFormAmbient<S> {
    /// The candidate `g_ij = g(x)`, `g_i∞ = g_∞∞ = 0` with `nmax` log levels.
    /// The smooth parts of `g_i∞` and `g_∞∞` are exactly zero.
    pub fn initial(base: &MetricData<S>, nmax: usize) -> Result<Self> {
        let n = base.dim();
        let outer = base.space().clone();
        let w = outer.max_order();
        let base = base.lift(2)?;
        let sp = base.space().clone();
        let gij = base.g.comps.iter().map(|c| LogSeries::smooth(c.clone(), nmax)).collect();
        let zero = |ord: i32| {
            let levels = (0..=nmax)
                .map(|l| if l == 0 { MultiJet::exact_zero(&sp) } else { MultiJet::zero(&sp, ord) })
                .collect();
            LogSeries::new(levels, NO_TAIL).expect("levels")
        };
        let gi = (0..n).map(|_| zero(w - 1)).collect();
        let ginf = zero(w - 2);
        Ok(NormalFormAmbient { n, base, outer, gij, gi, ginf, order: 0, report: SolveReport::default() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &MetricData<S> {
        &self.base
    }

    /// The working space, two orders above the caller's.
    pub fn space(&self) -> &Arc<JetSpace<S>> {
        self.base.space()
    }

    /// The space of the metric the expansion was built from.
    pub fn outer_space(&self) -> &Arc<JetSpace<S>> {
        &self.outer
    }

    /// Moves a jet from the working space to the caller's space.
    pub fn export(&self, j: &MultiJet<S>) -> Result<MultiJet<S>> {
        j.to_space(&self.outer)
    }

    pub fn export_tensor(&self, t: &JetTensor<S>) -> Result<JetTensor<S>> {
        Ok(Tensor { dim: t.dim, rank: t.rank, comps: t.comps.iter().map(|c| self.export(c)).collect::<Result<_>>()? })
    }

    /// Number of stored log levels above the smooth part.
    pub fn nmax(&self) -> usize {
        self.ginf.nmax()
    }

    /// Weight through which the expansion is determined.
    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn report(&self) -> &SolveReport<S> {
        &self.report
    }

    pub fn entry(&self, block: Block, i: usize, j: usize) -> &LogSeries<S> {
        match block {
            Block::Ij => &self.gij[i * self.n + j],
            Block::IInf => &self.gi[i],
            Block::InfInf => &self.ginf,
        }
    }

    fn entry_mut(&mut self, block: Block, i: usize, j: usize) -> &mut LogSeries<S> {
        match block {
            Block::Ij => &mut self.gij[i * self.n + j],
            Block::IInf => &mut self.gi[i],
            Block::InfInf => &mut self.ginf,
        }
    }

    /// Adds `ρ^s Λ^level · u` to an entry (and its mirror in the `ij` block).
    fn add_term(&mut self, block: Block, i: usize, j: usize, s: u32, level: usize, u: &MultiJet<S>) -> Result<()> {
        let term = u.mul_rho_pow(s)?;
        let targets: Vec<(usize, usize)> =
            if block == Block::Ij && i != j { vec![(i, j), (j, i)] } else { vec![(i, j)] };
        for (a, b) in targets {
            let e = self.entry_mut(block, a, b);
            let new = e.level(level).add(&term);
            e.set_level(level, new);
        }
        Ok(())
    }

    /// Coefficient of `ρ^s Λ^level` of an entry, as a jet in `x`.
    pub fn coeff(&self, block: Block, i: usize, j: usize, s: u32, level: usize) -> Result<MultiJet<S>> {
        self.entry(block, i, j).coeff(s, level)
    }

    /// `∂_ρ^m g_ij|_{ρ=0}` at log level 0.
    pub fn taylor_ij(&self, m: u32) -> Result<JetTensor<S>> {
        let f = S::from_rational(self.space().ctx(), &crate::scalar::factorial(m));
        let n = self.n;
        Tensor::try_from_fn(n, 2, |ix| self.export(&self.coeff(Block::Ij, ix[0], ix[1], m, 0)?.scale(&f)))
    }

    /// Truncates every entry so that only coefficients of weight at most
    /// `w` remain.
    pub fn truncate_weight(&mut self, w: i32) {
        for (block, list) in [(Block::Ij, &mut self.gij), (Block::IInf, &mut self.gi)] {
            for e in list.iter_mut() {
                *e = e.truncate(w - block.strength() + 2);
            }
        }
        self.ginf = self.ginf.truncate(w - 2);
        self.order = self.order.min(w);
    }

    /// The smooth part (log level 0 only).
    pub fn smooth_part(&self) -> Self {
        let strip = |e: &LogSeries<S>| LogSeries::smooth(e.level(0).clone(), 0);
        NormalFormAmbient {
            n: self.n,
            base: self.base.clone(),
            outer: self.outer.clone(),
            gij: self.gij.iter().map(strip).collect(),
            gi: self.gi.iter().map(strip).collect(),
            ginf: strip(&self.ginf),
            order: self.order,
            report: self.report.clone(),
        }
    }

    /// True when every stored log level vanishes.
    pub fn is_log_free(&self) -> bool {
        self.gij.iter().chain(&self.gi).chain(std::iter::once(&self.ginf)).all(|e| e.is_log_free())
    }

    /// The full `(n+2) × (n+2)` metric.
    pub fn metric(&self) -> AmbTensor<S> {
        assemble(self.n, self.space(), &self.gij, &self.gi, &self.ginf)
    }

    /// Metric, inverse and connection.
    pub fn geometry(&self) -> Result<AmbientGeometry<S>> {
        AmbientGeometry::new(self.metric())
    }

    pub fn ricci(&self) -> Result<AmbTensor<S>> {
        let geo = self.geometry()?;
        levi_civita::ricci(&geo.conn)
    }
}

/// Builds the normal-form matrix from its free blocks.
pub(crate) fn assemble<S: Scalar>(
    n: usize,
    sp: &Arc<JetSpace<S>>,
    gij: &[LogSeries<S>],
    gi: &[LogSeries<S>],
    ginf: &LogSeries<S>,
) -> AmbTensor<S> {
    let nmax = ginf.nmax();
    let inf = rho_index(n);
    let ctx = sp.ctx();
    Tensor::from_fn(n + 2, 2, |ix| {
        let (i, j) = (ix[0].min(ix[1]), ix[0].max(ix[1]));
        if i == 0 {
            if j == 0 {
                let two_rho = MultiJet::rho(sp).expect("ρ is a coordinate").scale(&S::from_i64(ctx, 2));
                AmbComp::smooth(0, two_rho, nmax)
            } else if j == inf {
                AmbComp::smooth(1, MultiJet::constant(sp, S::one(ctx)), nmax)
            } else {
                AmbComp { h: 1, f: LogSeries::zero(sp, nmax) }
            }
        } else if j == inf {
            if i == inf {
                AmbComp::new(2, ginf.clone())
            } else {
                AmbComp::new(2, gi[i - 1].clone())
            }
        } else {
            AmbComp::new(2, gij[(i - 1) * n + (j - 1)].clone())
        }
    })
}

/// Metric, inverse and Levi-Civita connection of an ambient metric.
#[derive(Clone, Debug)]
pub struct AmbientGeometry<S: Scalar> {
    pub g: AmbTensor<S>,
    pub ginv: AmbTensor<S>,
    pub conn: levi_civita::Connection<AmbComp<S>>,
}

impl<S: Scalar> AmbientGeometry<S> {
    pub fn new(g: AmbTensor<S>) -> Result<Self> {
        let ginv = ambient_inverse(&g)?;
        let conn = levi_civita::connection(&g, &ginv)?;
        Ok(AmbientGeometry { g, ginv, conn })
    }

    pub fn dim(&self) -> usize {
        self.g.dim
    }

    pub fn riemann(&self) -> Result<AmbTensor<S>> {
        levi_civita::riemann(&self.conn)
    }

    pub fn ricci(&self) -> Result<AmbTensor<S>> {
        levi_civita::ricci(&self.conn)
    }

    /// Covariant derivative of a covariant tensor (derivative index last).
    pub fn cov_deriv(&self, t: &AmbTensor<S>) -> Result<AmbTensor<S>> {
        levi_civita::covariant_derivative(t, &vec![false; t.rank], &self.conn)
    }

    /// `g̃^{IJ} T_{..I..J..}` over slots `a`, `b`.
    pub fn contract(&self, t: &AmbTensor<S>, a: usize, b: usize) -> AmbTensor<S> {
        t.trace_with(&self.ginv, a, b)
    }

    pub fn raise(&self, t: &AmbTensor<S>, slot: usize) -> AmbTensor<S> {
        t.transform_slot(&self.ginv, slot)
    }

    /// `Δ̃ T = g̃^{IJ} ∇_I ∇_J T` for a covariant tensor.
    pub fn laplacian(&self, t: &AmbTensor<S>) -> Result<AmbTensor<S>> {
        let dd = self.cov_deriv(&self.cov_deriv(t)?)?;
        let r = t.rank;
        Ok(self.contract(&dd, r, r + 1))
    }
}

/// First failure found by [`is_oplus`], if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OplusWitness {
    pub holds: bool,
    /// `(I, J, ρ-power, log level)` of the first offending coefficient.
    pub failure: Option<(usize, usize, u32, usize)>,
    pub detail: String,
}

/// Zero exactly, or below `1e-9 · scale` in float mode.
pub(crate) fn negligible<S: Scalar>(c: &MultiJet<S>, scale: f64) -> bool {
    if S::EXACT {
        c.is_zero()
    } else {
        c.max_abs_f64() <= 1e-9 * scale
    }
}

fn first_nonzero<S: Scalar>(f: &LogSeries<S>, below: u32, scale: f64) -> Result<Option<(u32, usize)>> {
    for k in 0..below {
        for lvl in 0..=f.nmax() {
            let c = f.coeff(k, lvl)?;
            if c.order() < 0 {
                return Err(Error::InsufficientOrder(format!("coefficient of ρ^{k} is not determined")));
            }
            if !negligible(&c, scale) {
                return Ok(Some((k, lvl)));
            }
        }
    }
    Ok(None)
}

/// Checks `S_IJ = O⁺_IJ(ρ^m)`: every component is `O(ρ^m)` and `S_00`,
/// `S_0i`, `g^{ij} S_ij` are `O(ρ^{m+1})`. In float mode a coefficient
/// counts as zero below `1e-9` times the largest coefficient of `S` or `g`.
pub fn is_oplus<S: Scalar>(s: &AmbTensor<S>, base: &MetricData<S>, m: u32) -> Result<OplusWitness> {
    let d = s.dim;
    let n = d - 2;
    let scale = s
        .comps
        .iter()
        .flat_map(|c| c.f.levels().iter().map(|l| l.max_abs_f64()))
        .fold(crate::invariants::max_abs(&base.g.comps), f64::max);
    let fail = |i: usize, j: usize, k: u32, l: usize, what: &str| OplusWitness {
        holds: false,
        failure: Some((i, j, k, l)),
        detail: format!("{what}: component ({i}, {j}) has a ρ^{k} Λ^{l} term"),
    };
    for i in 0..d {
        for j in i..d {
            let bound = if i == 0 && j <= n { m + 1 } else { m };
            if let Some((k, l)) = first_nonzero(&s.get(&[i, j]).f, bound, scale)? {
                return Ok(fail(i, j, k, l, "order"));
            }
        }
    }
    let nmax = s.comps[0].f.nmax();
    let sp = s.comps[0].space();
    let mut tr = LogSeries::zero(sp, nmax);
    for i in 0..n {
        for j in 0..n {
            let gij = base.ginv.get(&[i, j]).to_space(sp)?;
            if !gij.is_exact_zero() {
                tr = tr.add(&s.get(&[i + 1, j + 1]).f.mul_jet(&gij));
            }
        }
    }
    if let Some((k, l)) = first_nonzero(&tr, m + 1, scale)? {
        return Ok(OplusWitness {
            holds: false,
            failure: Some((1, 1, k, l)),
            detail: format!("trace: g^ij S_ij has a ρ^{k} Λ^{l} term"),
        });
    }
    Ok(OplusWitness { holds: true, failure: None, detail: "ok".into() })
}

/// Result of the structural checks on an ambient metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub ok: bool,
    pub messages: Vec<String>,
}

/// Straightness: `∇̃_T T = T` with `T = t ∂_t`, equivalently `Γ̃^K_{00} = 0`.
pub fn check_straight<S: Scalar>(g: &AmbTensor<S>) -> Result<StructureReport> {
    let geo = AmbientGeometry::new(g.clone())?;
    let mut messages = Vec::new();
    for k in 0..g.dim {
        let c = geo.conn.upper.get(&[k, 0, 0]);
        if !c.is_zero() {
            messages.push(format!("∇_T T - T has a nonzero component {k}"));
        }
    }
    Ok(StructureReport { ok: messages.is_empty(), messages })
}

/// `g̃(T, T) = 2ρt²` exactly and `T ⨼ g̃` free of logarithms.
pub fn check_t_smooth<S: Scalar>(g: &AmbTensor<S>) -> Result<StructureReport> {
    let mut messages = Vec::new();
    let g00 = g.get(&[0, 0]);
    let sp = g00.space().clone();
    let two_rho = MultiJet::rho(&sp)?.scale(&S::from_i64(sp.ctx(), 2));
    let expect = LogSeries::smooth(two_rho, g00.f.nmax());
    if g00.h != 0 || !g00.f.agrees_with(&expect) || !g00.f.is_zero() && g00.f.order() < sp.max_order() {
        messages.push("g̃(T, T) differs from 2ρt²".into());
    }
    for j in 0..g.dim {
        if !g.get(&[0, j]).f.is_log_free() {
            messages.push(format!("T ⨼ g̃ has a log term in component {j}"));
        }
    }
    Ok(StructureReport { ok: messages.is_empty(), messages })
}

/// A copy of `g` with `ρΛ` added to the `0i` entries (a metric that is not
/// of the required form, for negative controls).
pub fn corrupt_t_column<S: Scalar>(g: &AmbTensor<S>, i: usize) -> Result<AmbTensor<S>> {
    let sp = g.comps[0].space().clone();
    let nmax = g.comps[0].f.nmax().max(1);
    let mut levels = vec![MultiJet::exact_zero(&sp); nmax + 1];
    levels[1] = MultiJet::rho(&sp)?;
    let bump = AmbComp { h: 1, f: LogSeries::new(levels, NO_TAIL)? };
    let mut out = g.clone();
    for (a, b) in [(0, i), (i, 0)] {
        let c = out.get(&[a, b]).add(&bump);
        out.set(&[a, b], c);
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::expr::MetricSpec;
    use crate::scalar::Q;

    pub(crate) fn diag(n: usize, f: &str) -> MetricSpec {
        let rows: Vec<Vec<String>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { f.to_string() } else { "0".into() }).collect()).collect();
        let refs: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
        let rr: Vec<&[&str]> = refs.iter().map(|r| r.as_slice()).collect();
        MetricSpec::from_strings((n, 0), &rr).unwrap()
    }

    pub(crate) fn metric(n: usize, cells: &[(usize, usize, &str)], order: u32) -> MetricData<Q> {
        metric_in(n, cells, order, &[])
    }

    pub(crate) fn metric_in(n: usize, cells: &[(usize, usize, &str)], order: u32, extra: &[usize]) -> MetricData<Q> {
        let mut rows: Vec<Vec<String>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { "1".to_string() } else { "0".into() }).collect()).collect();
        for &(i, j, e) in cells {
            rows[i][j] = e.to_string();
            rows[j][i] = e.to_string();
        }
        let refs: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
        let rr: Vec<&[&str]> = refs.iter().map(|r| r.as_slice()).collect();
        MetricSpec::from_strings((n, 0), &rr).unwrap().metric_data((), order, extra).unwrap()
    }

    /// Polynomial 4-metrics with no special structure.
    pub(crate) fn random_four(k: usize, order: u32) -> MetricData<Q> {
        let cells: &[(usize, usize, &str)] = match k {
            0 => &[(0, 0, "1 + x2^2 - x1*x3/2"), (0, 1, "x3^2 + x1*x2*x3"), (2, 3, "x1^2/3 - x2^3"), (1, 1, "1 + x3*x1")],
            1 => &[(0, 2, "x2*x4 - 2*x1^2"), (1, 1, "2 + x1*x4^2"), (3, 3, "1 - x2*x3/5 + x1^3"), (1, 3, "x3^2/2")],
            _ => &[(0, 0, "3 + x4^2 + x1*x2"), (0, 3, "x2^2 - x3*x1"), (1, 2, "1/2 + x1*x4"), (2, 2, "1 + x2^3/7")],
        };
        metric_in(4, cells, order, &[0, 1, 2, 3])
    }

    /// A trace-free symmetric tensor with respect to `m`.
    pub(crate) fn trace_free_sample(m: &MetricData<Q>) -> Vec<MultiJet<Q>> {
        let h = metric_in(4, &[(0, 1, "x1 - 2*x3"), (2, 2, "3 + x4"), (3, 3, "1 + x2^2")], 6, &[0, 1, 2, 3]);
        let h: Vec<MultiJet<Q>> = h.g.comps.iter().map(|c| c.to_space(m.space()).unwrap()).collect();
        m.trace_free(&Tensor { dim: 4, rank: 2, comps: h }).comps
    }

    #[test]
    fn obstruction_is_bach_in_dimension_four() {
        let m = random_four(0, 5);
        let o = derived::obstruction(&m).unwrap();
        let b = m.bach().unwrap();
        for (x, y) in o.comps.iter().zip(&b.comps) {
            assert!(x.order() >= 1);
            assert!(x.truncate(1).agrees_with(&y.truncate(1)), "{x:?} vs {y:?}");
        }
        assert!(o.comps.iter().any(|c| !c.is_zero()));
    }

    #[test]
    fn flat_expansion_is_trivial() {
        let m = diag(4, "1").metric_data::<Q>((), 5, &[0, 1]).unwrap();
        let amb = solve_smooth(&m, 1, None).unwrap();
        for k in 1..=2 {
            assert!(amb.taylor_ij(k).unwrap().comps.iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn sphere_expansion_is_a_square() {
        let n = 3;
        let m = diag(n, "4/(1 + x1^2 + x2^2 + x3^2)^2").metric_data::<Q>((), 7, &[]).unwrap();
        let amb = solve_smooth(&m, 2, None).unwrap();
        let g = &m.g;
        let g1 = amb.taylor_ij(1).unwrap();
        let g2 = amb.taylor_ij(2).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!(g1.get(&[i, j]).agrees_with(g.get(&[i, j])), "g' = g");
                assert!(g2.get(&[i, j]).agrees_with(&g.get(&[i, j]).scale(&Q::new(1, 2))), "g'' = g/2");
            }
        }
    }

    #[test]
    fn six_dimensional_obstruction_is_trace_and_divergence_free() {
        let m = metric(6, &[(0, 0, "1 + x2^2 - x1*x3/2"), (0, 1, "x3^2 + x1*x2"), (2, 3, "x1^2/3 - x2^3"), (4, 5, "x1*x3"), (5, 5, "1 + x2*x3")], 7);
        let o = derived::obstruction(&m).unwrap();
        assert!(o.comps.iter().all(|c| c.order() >= 1));
        assert!(o.comps.iter().any(|c| !c.is_zero()));
        assert!(m.trace(&o).is_zero());
        assert!(m.divergence(&o).unwrap().comps.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn residuals_have_the_expected_valuation() {
        let m5 = metric(5, &[(0, 0, "1 + x2^2 - x1*x2/2"), (0, 1, "x2^2 + x1*x2"), (2, 3, "x1^2/3 - x2^3"), (4, 4, "1 + x1*x2")], 10);
        let amb = solve_smooth(&m5, 4, None).unwrap();
        let w = is_oplus(&amb.ricci().unwrap(), &m5, 4).unwrap();
        assert!(w.holds, "{}", w.detail);
        let m4 = random_four(2, 5);
        let amb = solve_smooth(&m4, 1, None).unwrap();
        let ric = amb.ricci().unwrap();
        assert!(is_oplus(&ric, &m4, 1).unwrap().holds);
        let w = is_oplus(&ric, &m4, 2).unwrap();
        assert!(!w.holds && w.failure.is_some());
    }

    #[test]
    fn oplus_accepts_trace_free_ij_terms_only() {
        let m = metric_in(4, &[], 4, &[0, 1]);
        let amb = NormalFormAmbient::initial(&m, 0).unwrap();
        let sp = amb.space().clone();
        let zero = Tensor::from_fn(6, 2, |_| AmbComp::zero(&sp, 0));
        assert!(is_oplus(&zero, &m, 3).unwrap().holds);
        let rho = MultiJet::rho(&sp).unwrap();
        let mut s = zero.clone();
        for (i, j) in [(1, 2), (2, 1)] {
            s.set(&[i, j], AmbComp::smooth(0, rho.clone(), 0));
        }
        assert!(is_oplus(&s, &m, 1).unwrap().holds);
        s.set(&[1, 1], AmbComp::smooth(0, rho.clone(), 0));
        let w = is_oplus(&s, &m, 1).unwrap();
        assert!(!w.holds);
        assert!(w.detail.contains("trace"));
    }

    #[test]
    fn solver_outputs_are_straight_with_smooth_t() {
        let m = random_four(1, 6);
        let amb = extend_inhomogeneous(&m, None, 1).unwrap();
        let g = amb.metric();
        assert!(check_straight(&g).unwrap().ok);
        assert!(check_t_smooth(&g).unwrap().ok);
        let bad = corrupt_t_column(&g, 2).unwrap();
        let r1 = check_straight(&bad).unwrap();
        let r2 = check_t_smooth(&bad).unwrap();
        assert!(!r1.ok || !r2.ok);
        assert!(!r2.ok);
    }
}
