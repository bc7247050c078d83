//! Weight-by-weight solution of `Ric(g̃) = 0` in normal form.
//!
//! At weight `w` the Ricci rows are affine in the unknown coefficients of
//! weight `w`, with a linear part that only depends on `g(x)`. The linear
//! part is probed once on the constant metric `g0 = g(0)` and carried to
//! every point by the frame `S = (g0⁻¹ g)^{1/2}`, which satisfies
//! `Sᵀ g0 S = g`: natural equations commute with the change of frame.

use super::{assemble, AmbTensor, Block, NormalFormAmbient};
use crate::error::{Error, Result};
use crate::linalg;
use crate::riemann::MetricData;
use crate::scalar::Scalar;
use crate::series::{JetSpace, LogSeries, MultiJet};
use crate::tensor::Component;

/// Summary of one solved weight.
#[derive(Clone, Debug)]
pub struct StageReport<S> {
    pub weight: u32,
    pub unknowns: usize,
    pub candidate_rows: usize,
    /// For a full solve of `g_ij` at `ρ^m`: the linear map on the `ρ^{m-1}`
    /// Ricci coefficient is `X ↦ c1 X + c2 tr(X) g`.
    pub c1: Option<S>,
    pub c2: Option<S>,
}

#[derive(Clone, Debug)]
pub struct SolveReport<S> {
    pub stages: Vec<StageReport<S>>,
}

impl<S> Default for SolveReport<S> {
    fn default() -> Self {
        SolveReport { stages: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Full,
    Trace,
}

#[derive(Clone, Copy, Debug)]
struct Unknown {
    block: Block,
    s: u32,
    level: usize,
    shape: Shape,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RowKind {
    Ij,
    TraceIj,
    IInf,
    InfInf,
    T0,
    TI,
    TInf,
}

impl RowKind {
    const ALL: [RowKind; 6] = [RowKind::Ij, RowKind::IInf, RowKind::InfInf, RowKind::T0, RowKind::TI, RowKind::TInf];

    fn strength(self) -> u32 {
        match self {
            RowKind::T0 => 0,
            RowKind::TI => 1,
            RowKind::Ij | RowKind::TraceIj | RowKind::TInf => 2,
            RowKind::IInf => 3,
            RowKind::InfInf => 4,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Row {
    kind: RowKind,
    k: u32,
    level: usize,
}

fn rows_of_weight(w: u32, nmax: usize) -> Vec<Row> {
    let mut out = Vec::new();
    for kind in RowKind::ALL {
        let st = kind.strength();
        if w >= st && (w - st) % 2 == 0 {
            for level in 0..=nmax {
                out.push(Row { kind, k: (w - st) / 2, level });
            }
        }
    }
    out
}

/// Frame data carrying the probe at `g0` to the metric `g(x)`.
struct Frame<S: Scalar> {
    n: usize,
    g0inv: Vec<S>,
    s: Vec<MultiJet<S>>,
    sinv: Vec<MultiJet<S>>,
}

fn mat_mul<S: Scalar>(a: &[MultiJet<S>], b: &[MultiJet<S>], n: usize) -> Vec<MultiJet<S>> {
    let sp = a[0].space();
    (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let mut acc = MultiJet::exact_zero(sp);
            for k in 0..n {
                let (x, y) = (&a[i * n + k], &b[k * n + j]);
                if !x.is_exact_zero() && !y.is_exact_zero() {
                    acc = acc.add(&x.mul(y));
                }
            }
            acc
        })
        .collect()
}

/// `(I + H)^a` by the binomial series, for `H` vanishing at the base point.
fn binomial_power<S: Scalar>(h: &[MultiJet<S>], n: usize, num: i64, den: i64) -> Vec<MultiJet<S>> {
    let sp = h[0].space().clone();
    let ctx = sp.ctx().clone();
    let ident: Vec<MultiJet<S>> = (0..n * n)
        .map(|ij| if ij / n == ij % n { MultiJet::constant(&sp, S::one(&ctx)) } else { MultiJet::exact_zero(&sp) })
        .collect();
    let mut acc = ident.clone();
    let mut power = ident;
    let mut coef = S::one(&ctx);
    for k in 0..=(sp.max_order() as i64) {
        power = mat_mul(&power, h, n);
        if power.iter().all(|p| p.is_zero()) {
            break;
        }
        // binom(a, k+1) = binom(a, k) (a - k) / (k + 1)
        let f = S::from_ratio(&ctx, num - k * den, den * (k + 1));
        coef = coef.mul(&f);
        for (a, p) in acc.iter_mut().zip(&power) {
            *a = a.add(&p.scale(&coef));
        }
    }
    acc
}

impl<S: Scalar> Frame<S> {
    fn new(base: &MetricData<S>) -> Result<Self> {
        let n = base.dim();
        let sp = base.space().clone();
        let g0: Vec<S> = base.g.comps.iter().map(|c| c.constant_term()).collect::<Result<_>>()?;
        let g0m: Vec<Vec<S>> = (0..n).map(|i| g0[i * n..(i + 1) * n].to_vec()).collect();
        let g0inv: Vec<S> = linalg::invert(&g0m)?.into_iter().flatten().collect();
        let g0inv_j: Vec<MultiJet<S>> = g0inv.iter().map(|c| MultiJet::constant(&sp, c.clone())).collect();
        let mut h = mat_mul(&g0inv_j, &base.g.comps, n);
        for i in 0..n {
            h[i * n + i] = h[i * n + i].sub(&MultiJet::constant(&sp, S::one(sp.ctx())));
        }
        let s = binomial_power(&h, n, 1, 2);
        let sinv = binomial_power(&h, n, -1, 2);
        Ok(Frame { n, g0inv, s, sinv })
    }

    /// `r̃ = S^{-T} r S^{-1}` for a symmetric row matrix.
    fn pull_sym(&self, r: &[MultiJet<S>]) -> Vec<MultiJet<S>> {
        let n = self.n;
        let sinv_t: Vec<MultiJet<S>> = (0..n * n).map(|ij| self.sinv[(ij % n) * n + ij / n].clone()).collect();
        mat_mul(&mat_mul(&sinv_t, r, n), &self.sinv, n)
    }

    /// `r̃ = S^{-T} r` for a covector row.
    fn pull_vec(&self, r: &[MultiJet<S>]) -> Vec<MultiJet<S>> {
        let n = self.n;
        let sp = r[0].space();
        (0..n)
            .map(|a| {
                let mut acc = MultiJet::exact_zero(sp);
                for i in 0..n {
                    acc = acc.add(&self.sinv[i * n + a].mul(&r[i]));
                }
                acc
            })
            .collect()
    }

    /// `u = Sᵀ ũ S`.
    fn push_sym(&self, u: &[MultiJet<S>]) -> Vec<MultiJet<S>> {
        let n = self.n;
        let s_t: Vec<MultiJet<S>> = (0..n * n).map(|ij| self.s[(ij % n) * n + ij / n].clone()).collect();
        mat_mul(&mat_mul(&s_t, u, n), &self.s, n)
    }

    /// `u = Sᵀ ũ` for a covector.
    fn push_vec(&self, u: &[MultiJet<S>]) -> Vec<MultiJet<S>> {
        let n = self.n;
        let sp = u[0].space();
        (0..n)
            .map(|i| {
                let mut acc = MultiJet::exact_zero(sp);
                for a in 0..n {
                    acc = acc.add(&self.s[a * n + i].mul(&u[a]));
                }
                acc
            })
            .collect()
    }
}

/// Scalar rows of a Ricci tensor, optionally pulled back to the `g0` frame.
fn row_values<S: Scalar>(ric: &AmbTensor<S>, row: Row, frame: Option<&Frame<S>>, g0inv: &[S]) -> Result<Vec<MultiJet<S>>> {
    let n = ric.dim - 2;
    let inf = n + 1;
    let c = |i: usize, j: usize| ric.get(&[i, j]).f.coeff(row.k, row.level);
    match row.kind {
        RowKind::Ij | RowKind::TraceIj => {
            let mut r = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    r.push(c(a + 1, b + 1)?);
                }
            }
            if let Some(f) = frame {
                r = f.pull_sym(&r);
            }
            if row.kind == RowKind::Ij {
                Ok((0..n).flat_map(|a| (a..n).map(move |b| (a, b))).map(|(a, b)| r[a * n + b].clone()).collect())
            } else {
                let sp = r[0].space().clone();
                let mut tr = MultiJet::exact_zero(&sp);
                for (idx, gi) in g0inv.iter().enumerate() {
                    if !gi.is_zero() {
                        tr = tr.add(&r[idx].scale(gi));
                    }
                }
                Ok(vec![tr])
            }
        }
        RowKind::IInf | RowKind::TI => {
            let r: Vec<MultiJet<S>> = (0..n)
                .map(|a| if row.kind == RowKind::IInf { c(a + 1, inf) } else { c(0, a + 1) })
                .collect::<Result<_>>()?;
            Ok(match frame {
                Some(f) => f.pull_vec(&r),
                None => r,
            })
        }
        RowKind::InfInf => Ok(vec![c(inf, inf)?]),
        RowKind::T0 => Ok(vec![c(0, 0)?]),
        RowKind::TInf => Ok(vec![c(0, inf)?]),
    }
}

fn columns(u: &Unknown, n: usize) -> usize {
    match (u.block, u.shape) {
        (Block::Ij, Shape::Full) => n * (n + 1) / 2,
        (Block::Ij, Shape::Trace) => 1,
        (Block::IInf, _) => n,
        (Block::InfInf, _) => 1,
    }
}

fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect()
}

/// Response of every row to each basis perturbation, at the constant metric.
fn probe<S: Scalar>(
    g0: &[S],
    g0inv: &[S],
    unknowns: &[Unknown],
    rows: &[Row],
    w: u32,
    nmax: usize,
) -> Result<Vec<Vec<S>>> {
    let n = (g0.len() as f64).sqrt().round() as usize;
    let ctx = g0[0].ctx();
    let sp = JetSpace::<S>::new(ctx.clone(), n, &[], true, w + 2)?;
    let smooth = |c: MultiJet<S>| LogSeries::smooth(c, nmax);
    let gij0: Vec<LogSeries<S>> = g0.iter().map(|c| smooth(MultiJet::constant(&sp, c.clone()))).collect();
    let zero = LogSeries::zero(&sp, nmax);
    let nrows: usize = rows.iter().map(|r| row_width(r.kind, n)).sum();
    let ncols: usize = unknowns.iter().map(|u| columns(u, n)).sum();
    let mut l = vec![vec![S::zero(&ctx); ncols]; nrows];
    let mut col = 0;
    for u in unknowns {
        for c in 0..columns(u, n) {
            let mut gij = gij0.clone();
            let mut gi = vec![zero.clone(); n];
            let mut ginf = zero.clone();
            let mono = MultiJet::constant(&sp, S::one(&ctx)).mul_rho_pow(u.s)?;
            let bump = |e: &mut LogSeries<S>, coef: &S| {
                let v = e.level(u.level).add(&mono.scale(coef));
                e.set_level(u.level, v);
            };
            let one = S::one(&ctx);
            match (u.block, u.shape) {
                (Block::Ij, Shape::Full) => {
                    let (a, b) = sym_pairs(n)[c];
                    bump(&mut gij[a * n + b], &one);
                    if a != b {
                        bump(&mut gij[b * n + a], &one);
                    }
                }
                (Block::Ij, Shape::Trace) => {
                    for (idx, e) in gij.iter_mut().enumerate() {
                        if !g0[idx].is_zero() {
                            bump(e, &g0[idx]);
                        }
                    }
                }
                (Block::IInf, _) => bump(&mut gi[c], &one),
                (Block::InfInf, _) => bump(&mut ginf, &one),
            }
            let metric = assemble(n, &sp, &gij, &gi, &ginf);
            let ric = super::AmbientGeometry::new(metric)?.ricci()?;
            let mut r = 0;
            for row in rows {
                for v in row_values(&ric, *row, None, g0inv)? {
                    l[r][col] = v.constant_term()?;
                    r += 1;
                }
            }
            col += 1;
        }
    }
    Ok(l)
}

fn row_width(kind: RowKind, n: usize) -> usize {
    match kind {
        RowKind::Ij => n * (n + 1) / 2,
        RowKind::IInf | RowKind::TI => n,
        _ => 1,
    }
}

/// Which unknowns and equations belong to one weight.
struct Stage {
    unknowns: Vec<Unknown>,
    candidates: Vec<Row>,
    required: Vec<Row>,
}

/// Smallest `ρ`-power admitted at log level `level ≥ 1`.
fn log_min_power(n: usize, level: usize) -> u32 {
    ((n / 2 - 1) * level + 1) as u32
}

fn smooth_stage(w: u32, m: u32, nmax: usize) -> Option<Stage> {
    let all = rows_of_weight(w, nmax);
    if w <= 2 * m + 1 {
        let unknowns = if w % 2 == 0 {
            vec![Unknown { block: Block::Ij, s: w / 2, level: 0, shape: Shape::Full }]
        } else {
            Vec::new()
        };
        return Some(Stage { unknowns, candidates: all.clone(), required: all });
    }
    if w == 2 * m + 2 {
        let mut rows = vec![Row { kind: RowKind::TraceIj, k: m, level: 0 }];
        if m >= 1 {
            rows.push(Row { kind: RowKind::InfInf, k: m - 1, level: 0 });
        }
        let unknowns = vec![Unknown { block: Block::Ij, s: m + 1, level: 0, shape: Shape::Trace }];
        return Some(Stage { unknowns, candidates: rows.clone(), required: rows });
    }
    None
}

fn log_stage(w: u32, n: usize, nmax: usize) -> Stage {
    let half = (n / 2) as u32;
    let all = rows_of_weight(w, nmax);
    let mut unknowns = Vec::new();
    if w < n as u32 {
        if w % 2 == 0 {
            unknowns.push(Unknown { block: Block::Ij, s: w / 2, level: 0, shape: Shape::Full });
        }
    } else if w == n as u32 {
        unknowns.push(Unknown { block: Block::Ij, s: half, level: 0, shape: Shape::Trace });
        for level in 1..=nmax {
            if log_min_power(n, level) <= half {
                unknowns.push(Unknown { block: Block::Ij, s: half, level, shape: Shape::Full });
            }
        }
    } else if w % 2 == 0 {
        let s = w / 2;
        unknowns.push(Unknown { block: Block::Ij, s, level: 0, shape: Shape::Full });
        for level in 1..=nmax {
            if log_min_power(n, level) <= s {
                unknowns.push(Unknown { block: Block::Ij, s, level, shape: Shape::Full });
            }
            if log_min_power(n, level) <= s - 1 {
                unknowns.push(Unknown { block: Block::InfInf, s: s - 1, level, shape: Shape::Full });
            }
        }
    } else {
        let s = (w - 1) / 2;
        for level in 1..=nmax {
            if log_min_power(n, level) <= s {
                unknowns.push(Unknown { block: Block::IInf, s, level, shape: Shape::Full });
            }
        }
    }
    Stage { unknowns, candidates: all.clone(), required: all }
}

/// Runs every stage in turn; `prescribe` may add known terms before a stage.
fn run<S: Scalar>(
    amb: &mut NormalFormAmbient<S>,
    last: u32,
    stage_of: impl Fn(u32) -> Option<Stage>,
    mut prescribe: impl FnMut(u32, &mut NormalFormAmbient<S>) -> Result<()>,
) -> Result<()> {
    let nmax = amb.nmax();
    let frame = Frame::new(&amb.base)?;
    let g0: Vec<S> = amb.base.g.comps.iter().map(|c| c.constant_term()).collect::<Result<_>>()?;
    let mut pending: Option<(u32, Vec<Row>)> = None;
    for w in 1..=last {
        let Some(stage) = stage_of(w) else { break };
        prescribe(w, amb)?;
        let ric = amb.ricci()?;
        if let Some((pw, req)) = pending.take() {
            verify(&ric, &req, &frame, pw)?;
        }
        let report = solve_stage(amb, &ric, &stage, &frame, &g0, w, nmax)?;
        amb.report.stages.push(report);
        amb.order = w as i32;
        pending = Some((w, stage.required));
    }
    if let Some((pw, req)) = pending {
        let ric = amb.ricci()?;
        verify(&ric, &req, &frame, pw)?;
    }
    Ok(())
}

fn verify<S: Scalar>(ric: &AmbTensor<S>, rows: &[Row], frame: &Frame<S>, w: u32) -> Result<()> {
    for row in rows {
        for v in row_values(ric, *row, Some(frame), &frame.g0inv)? {
            if !v.is_zero() && !(!S::EXACT && v.max_abs_f64() < 1e-30) {
                return Err(Error::Inconsistent(format!(
                    "weight {w}: Ricci row {:?} at ρ^{} Λ^{} does not vanish after solving",
                    row.kind, row.k, row.level
                )));
            }
        }
    }
    Ok(())
}

fn solve_stage<S: Scalar>(
    amb: &mut NormalFormAmbient<S>,
    ric: &AmbTensor<S>,
    stage: &Stage,
    frame: &Frame<S>,
    g0: &[S],
    w: u32,
    nmax: usize,
) -> Result<StageReport<S>> {
    let n = amb.n;
    let ncols: usize = stage.unknowns.iter().map(|u| columns(u, n)).sum();
    let mut report = StageReport { weight: w, unknowns: ncols, candidate_rows: 0, c1: None, c2: None };
    if ncols == 0 {
        return Ok(report);
    }
    let mut residual = Vec::new();
    for row in &stage.candidates {
        residual.extend(row_values(ric, *row, Some(frame), &frame.g0inv)?);
    }
    report.candidate_rows = residual.len();
    let l = probe(g0, &frame.g0inv, &stage.unknowns, &stage.candidates, w, nmax)?;
    if stage.unknowns.len() == 1 && stage.unknowns[0].shape == Shape::Full && stage.unknowns[0].block == Block::Ij {
        let (c1, c2) = trace_split(&l, &stage.candidates, g0, n)?;
        report.c1 = Some(c1);
        report.c2 = Some(c2);
    }
    let mut order: Vec<usize> = (0..residual.len()).collect();
    order.sort_by_key(|&r| std::cmp::Reverse(residual[r].order()));
    let sel = linalg::select_rows(&l, &order, ncols).ok_or_else(|| {
        Error::Inconsistent(format!("weight {w}: the linearized equations do not determine the {ncols} unknowns"))
    })?;
    let square: Vec<Vec<S>> = sel.iter().map(|&r| l[r].clone()).collect();
    let inv = linalg::invert(&square)?;
    let sp = amb.space().clone();
    let solution: Vec<MultiJet<S>> = (0..ncols)
        .map(|c| {
            let mut acc = MultiJet::exact_zero(&sp);
            for (j, &r) in sel.iter().enumerate() {
                if !inv[c][j].is_zero() {
                    acc = acc.sub(&residual[r].scale(&inv[c][j]));
                }
            }
            acc
        })
        .collect();
    let mut col = 0;
    for u in &stage.unknowns {
        let k = columns(u, n);
        let vals = &solution[col..col + k];
        col += k;
        apply(amb, u, vals, frame)?;
    }
    Ok(report)
}

fn apply<S: Scalar>(amb: &mut NormalFormAmbient<S>, u: &Unknown, vals: &[MultiJet<S>], frame: &Frame<S>) -> Result<()> {
    let n = amb.n;
    match (u.block, u.shape) {
        (Block::Ij, Shape::Full) => {
            let sp = vals[0].space().clone();
            let mut m = vec![MultiJet::exact_zero(&sp); n * n];
            for (idx, &(a, b)) in sym_pairs(n).iter().enumerate() {
                m[a * n + b] = vals[idx].clone();
                m[b * n + a] = vals[idx].clone();
            }
            let full = frame.push_sym(&m);
            for (a, b) in sym_pairs(n) {
                amb.add_term(Block::Ij, a, b, u.s, u.level, &full[a * n + b])?;
            }
        }
        (Block::Ij, Shape::Trace) => {
            let g = amb.base.g.comps.clone();
            for (a, b) in sym_pairs(n) {
                amb.add_term(Block::Ij, a, b, u.s, u.level, &vals[0].mul(&g[a * n + b]))?;
            }
        }
        (Block::IInf, _) => {
            let full = frame.push_vec(vals);
            for (i, v) in full.iter().enumerate() {
                amb.add_term(Block::IInf, i, 0, u.s, u.level, v)?;
            }
        }
        (Block::InfInf, _) => amb.add_term(Block::InfInf, 0, 0, u.s, u.level, &vals[0])?,
    }
    Ok(())
}

/// Splits the probed map on the `Ij` rows as `X ↦ c1 X + c2 tr_{g0}(X) g0`
/// and checks that this form reproduces every column.
fn trace_split<S: Scalar>(l: &[Vec<S>], rows: &[Row], g0: &[S], n: usize) -> Result<(S, S)> {
    let start: usize = rows.iter().take_while(|r| r.kind != RowKind::Ij).map(|r| row_width(r.kind, n)).sum();
    if !rows.iter().any(|r| r.kind == RowKind::Ij && r.level == 0) {
        return Err(Error::Inconsistent("no Ricci ij rows in a full stage".into()));
    }
    let pairs = sym_pairs(n);
    let ctx = g0[0].ctx();
    let g0m: Vec<Vec<S>> = (0..n).map(|i| g0[i * n..(i + 1) * n].to_vec()).collect();
    let g0inv: Vec<S> = linalg::invert(&g0m)?.into_iter().flatten().collect();
    // basis matrices E_ab and their g0-traces
    let e_of = |c: usize| {
        let (a, b) = pairs[c];
        let mut e = vec![S::zero(&ctx); n * n];
        e[a * n + b] = S::one(&ctx);
        e[b * n + a] = S::one(&ctx);
        e
    };
    let tr = |e: &[S]| {
        let mut t = S::zero(&ctx);
        for (x, y) in e.iter().zip(&g0inv) {
            t = t.add(&x.mul(y));
        }
        t
    };
    let image = |c: usize| -> Vec<S> {
        let mut m = vec![S::zero(&ctx); n * n];
        for (idx, &(a, b)) in pairs.iter().enumerate() {
            m[a * n + b] = l[start + idx][c].clone();
            m[b * n + a] = l[start + idx][c].clone();
        }
        m
    };
    // a traceless combination: E_c - tr(E_c)/n g0 for a column with E_c not a multiple of g0
    let nn = S::from_i64(&ctx, n as i64);
    let g0_image = {
        let mut acc = vec![S::zero(&ctx); n * n];
        for (c, &(a, b)) in pairs.iter().enumerate() {
            let coef = g0[a * n + b].clone();
            if coef.is_zero() {
                continue;
            }
            for (x, y) in acc.iter_mut().zip(image(c)) {
                *x = x.add(&coef.mul(&y));
            }
        }
        acc
    };
    let pivot = (0..n * n).find(|&i| !g0[i].is_zero()).expect("nondegenerate g0");
    let alpha = g0_image[pivot].div(&g0[pivot]).expect("nonzero");
    let mut c1 = None;
    for c in 0..pairs.len() {
        let e = e_of(c);
        let t = tr(&e).div(&nn).expect("n > 0");
        let x0: Vec<S> = e.iter().zip(g0).map(|(x, g)| x.sub(&t.mul(g))).collect();
        let img: Vec<S> = image(c).iter().zip(&g0_image).map(|(x, y)| x.sub(&t.mul(y))).collect();
        if let Some(i) = (0..n * n).find(|&i| !linalg::negligible(&x0[i], 1.0)) {
            c1 = Some(img[i].div(&x0[i]).expect("nonzero"));
            break;
        }
    }
    let c1 = c1.ok_or_else(|| Error::Inconsistent("no trace-free probe direction".into()))?;
    let c2 = alpha.sub(&c1).div(&nn).expect("n > 0");
    for c in 0..pairs.len() {
        let e = e_of(c);
        let t = tr(&e);
        let img = image(c);
        for i in 0..n * n {
            let want = c1.mul(&e[i]).add(&c2.mul(&t).mul(&g0[i]));
            let d = img[i].sub(&want);
            if !linalg::negligible(&d, 1.0) {
                return Err(Error::Inconsistent(
                    "the linearized ij equation is not of the form c1 X + c2 tr(X) g".into(),
                ));
            }
        }
    }
    Ok((c1, c2))
}

/// The smooth normal-form solution through `ρ^m`, together with the trace
/// of the `ρ^{m+1}` coefficient (whose trace-free part is set to `a_top`,
/// zero when absent). For even `n` this requires `m ≤ n/2 - 1`.
pub fn solve_smooth<S: Scalar>(
    base: &MetricData<S>,
    m: u32,
    a_top: Option<&[MultiJet<S>]>,
) -> Result<NormalFormAmbient<S>> {
    let mut amb = smooth_polynomial(base, m, a_top)?;
    let last = (base.space().max_order() as u32).min(2 * m + 3);
    amb.truncate_weight(last as i32);
    Ok(amb)
}

/// Like [`solve_smooth`], but keeps the result as a polynomial of degree
/// `m + 1` in `ρ`: higher coefficients are taken to be zero rather than
/// unknown.
pub fn smooth_polynomial<S: Scalar>(
    base: &MetricData<S>,
    m: u32,
    a_top: Option<&[MultiJet<S>]>,
) -> Result<NormalFormAmbient<S>> {
    let n = base.dim();
    if n % 2 == 0 && m + 1 > (n / 2) as u32 {
        return Err(Error::Input(format!("in even dimension {n} the smooth expansion stops at ρ-order {}", n / 2 - 1)));
    }
    if a_top.is_some() && (n % 2 == 1 || m + 1 != (n / 2) as u32) {
        return Err(Error::Input("an ambiguity tensor enters at ρ-order n/2 in even dimension only".into()));
    }
    let mut amb = NormalFormAmbient::initial(base, 0)?;
    let w_max = base.space().max_order();
    let last = (w_max as u32).min(2 * m + 3);
    let half = (n / 2) as u32;
    run(&mut amb, last, |w| smooth_stage(w, m, 0).or_else(|| (w == 2 * m + 3).then(|| odd_tail(w))), |w, a| {
        if let Some(top) = a_top {
            if w == 2 * half {
                prescribe_ambiguity(a, top)?;
            }
        }
        Ok(())
    })?;
    amb.order = w_max;
    Ok(amb)
}

/// The last odd weight carries no unknowns and no required equations.
fn odd_tail(_w: u32) -> Stage {
    Stage { unknowns: Vec::new(), candidates: Vec::new(), required: Vec::new() }
}

fn prescribe_ambiguity<S: Scalar>(amb: &mut NormalFormAmbient<S>, a: &[MultiJet<S>]) -> Result<()> {
    let n = amb.n;
    let half = (n / 2) as u32;
    let f = crate::scalar::factorial(half);
    let ctx = amb.space().ctx().clone();
    let inv = S::from_rational(&ctx, &(malachite_q::Rational::from(1) / f));
    for (i, j) in sym_pairs(n) {
        amb.add_term(Block::Ij, i, j, half, 0, &a[i * n + j].to_space(amb.space())?.scale(&inv))?;
    }
    Ok(())
}

/// Checks `g^{ij} A_ij = 0` and symmetry.
pub fn check_ambiguity<S: Scalar>(base: &MetricData<S>, a: &[MultiJet<S>]) -> Result<()> {
    let n = base.dim();
    if a.len() != n * n {
        return Err(Error::InvalidAmbiguity(format!("A must be {n}x{n}")));
    }
    let scale = crate::invariants::max_abs(a).max(1.0);
    let mut tr = MultiJet::exact_zero(base.space());
    for i in 0..n {
        for j in 0..n {
            if !crate::invariants::jets_match_within(&a[i * n + j], &a[j * n + i], scale) {
                return Err(Error::InvalidAmbiguity("A is not symmetric".into()));
            }
            tr = tr.add(&base.ginv.get(&[i, j]).mul(&a[i * n + j]));
        }
    }
    let ok = if S::EXACT { tr.is_zero() } else { tr.max_abs_f64() <= 1e-9 * scale };
    if !ok {
        return Err(Error::InvalidAmbiguity("A is not trace-free with respect to g".into()));
    }
    Ok(())
}

/// Number of log levels that can carry terms of weight at most `w`.
pub fn levels_needed(n: usize, w: i32) -> usize {
    if n % 2 == 1 || n < 4 {
        return 0;
    }
    let mut level = 0;
    while 2 * log_min_power(n, level + 1) as i32 <= w {
        level += 1;
    }
    level
}

/// The inhomogeneous (log) ambient metric with ambiguity tensor `a`,
/// solved through every weight of the jet space.
pub fn extend_inhomogeneous<S: Scalar>(
    base: &MetricData<S>,
    a: Option<&[MultiJet<S>]>,
    nmax: usize,
) -> Result<NormalFormAmbient<S>> {
    let n = base.dim();
    if n % 2 == 1 || n < 4 {
        return Err(Error::Input(format!("the log expansion needs even n ≥ 4, got {n}")));
    }
    if let Some(a) = a {
        check_ambiguity(base, a)?;
    }
    let w_max = base.space().max_order();
    let levels = nmax.max(levels_needed(n, w_max));
    let mut amb = NormalFormAmbient::initial(base, levels)?;
    let half = (n / 2) as u32;
    run(&mut amb, w_max as u32, |w| Some(log_stage(w, n, levels)), |w, amb| {
        if w == 2 * half {
            if let Some(a) = a {
                prescribe_ambiguity(amb, a)?;
            }
        }
        Ok(())
    })?;
    Ok(amb)
}
