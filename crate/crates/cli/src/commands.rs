//! The four subcommands, generic over the scalar type.

use ambient_core::ambient::derived::obstruction;
use ambient_core::ambient::{extend_inhomogeneous, solve_smooth, Block, NormalFormAmbient};
use ambient_core::expr::Mode;
use ambient_core::invariants::{base, evaluate_contraction, exceptional_n4, library, ContractionSchema, Parity, SchemaFile, SmoothAmbient};
use ambient_core::riemann::MetricData;
use ambient_core::suite::{run_suite, Status, SuiteConfig};
use ambient_core::{Error, MultiJet, Scalar};
use serde_json::{json, Map, Value};

use crate::config::{Command, RunConfig};
use crate::report::{jet, negligible, tensor};

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad files, flags or truncation orders (exit 2).
    Input(String),
    /// A mathematical check failed (exit 1).
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() || matches!(e, Error::InsufficientOrder(_)) {
            Failure::Input(e.to_string())
        } else {
            Failure::Mismatch(e.to_string())
        }
    }
}

/// A finished report, and the first failed check if any.
pub struct Outcome {
    pub report: Value,
    pub mismatch: Option<String>,
}

pub fn run<S: Scalar>(cfg: &RunConfig, ctx: S::Ctx) -> Result<Outcome, Failure> {
    let mut report = header(cfg);
    let mut mismatch = None;
    let body = match cfg.command {
        Command::Expand => expand::<S>(cfg, ctx)?,
        Command::Obstruction => obstruction_report::<S>(cfg, ctx)?,
        Command::Invariant => invariants::<S>(cfg, ctx)?,
        Command::Check => {
            let (body, first) = check::<S>(cfg, ctx)?;
            mismatch = first;
            body
        }
    };
    report.extend(body);
    Ok(Outcome { report: Value::Object(report), mismatch })
}

fn header(cfg: &RunConfig) -> Map<String, Value> {
    let spec = &cfg.metric;
    let mut h = Map::new();
    h.insert("command".into(), json!(cfg.command.as_str()));
    h.insert("dimension".into(), json!(spec.dim));
    h.insert("signature".into(), json!([spec.signature.0, spec.signature.1]));
    h.insert("base_point".into(), json!(spec.base_point.iter().map(|q| q.to_string()).collect::<Vec<_>>()));
    h.insert("mode".into(), json!(cfg.mode.as_str()));
    if cfg.mode == Mode::Float {
        h.insert("precision_bits".into(), json!(spec.precision_bits));
    }
    h.insert("x_order".into(), json!(cfg.x_order));
    h.insert("ambiguity".into(), json!(cfg.ambiguity.is_some()));
    h
}

struct Inputs<S: Scalar> {
    m: MetricData<S>,
    a: Option<Vec<MultiJet<S>>>,
}

fn inputs<S: Scalar>(cfg: &RunConfig, ctx: S::Ctx) -> Result<Inputs<S>, Failure> {
    let spec = &cfg.metric;
    let all: Vec<usize> = (0..spec.dim).collect();
    let base_pt = spec.base_point_scalars::<S>(&ctx);
    let m = spec.metric_data::<S>(ctx, cfg.x_order, &all)?;
    let a = match &cfg.ambiguity {
        Some(a) => Some(a.jets(m.space(), &base_pt)?),
        None => None,
    };
    Ok(Inputs { m, a })
}

fn expand<S: Scalar>(cfg: &RunConfig, ctx: S::Ctx) -> Result<Map<String, Value>, Failure> {
    let Inputs { m, a } = inputs::<S>(cfg, ctx)?;
    let n = m.dim();
    let even = n % 2 == 0 && n >= 4;
    let logs = even && (cfg.rho_order >= (n / 2) as u32 || a.is_some());
    let amb = if logs { extend_inhomogeneous(&m, a.as_deref(), cfg.log_order)? } else { solve_smooth(&m, cfg.rho_order, None)? };
    let mut out = Map::new();
    out.insert("rho_order".into(), json!(cfg.rho_order));
    out.insert("log_order".into(), json!(if logs { cfg.log_order.min(amb.nmax()) } else { 0 }));
    out.insert("log_free".into(), json!(amb.is_log_free()));
    out.insert("coefficients".into(), Value::Array(coefficients(&amb, cfg)?));
    if even {
        let o = obstruction(&m)?;
        let scale = o.comps.iter().map(|c| c.max_abs_f64()).fold(0.0, f64::max);
        out.insert(
            "obstruction".into(),
            json!({ "components": tensor(&o, true), "vanishes": negligible(&o.comps, scale) }),
        );
    }
    Ok(out)
}

fn coefficients<S: Scalar>(amb: &NormalFormAmbient<S>, cfg: &RunConfig) -> Result<Vec<Value>, Failure> {
    let n = amb.n();
    let mut entries: Vec<(Block, &str, Vec<usize>)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            entries.push((Block::Ij, "ij", vec![i, j]));
        }
    }
    for i in 0..n {
        entries.push((Block::IInf, "i_inf", vec![i]));
    }
    entries.push((Block::InfInf, "inf_inf", vec![]));
    let levels = cfg.log_order.min(amb.nmax());
    let mut out = Vec::new();
    for (block, name, ix) in entries {
        let (i, j) = (ix.first().copied().unwrap_or(0), ix.get(1).copied().unwrap_or(0));
        for s in 0..=cfg.rho_order {
            for level in 0..=levels {
                let c = amb.coeff(block, i, j, s, level)?;
                if c.order() < 0 {
                    continue;
                }
                let one_based: Vec<usize> = ix.iter().map(|k| k + 1).collect();
                out.push(json!({
                    "block": name,
                    "index": one_based,
                    "rho": s,
                    "log": level,
                    "jet": jet(&amb.export(&c)?),
                }));
            }
        }
    }
    Ok(out)
}

fn obstruction_report<S: Scalar>(cfg: &RunConfig, ctx: S::Ctx) -> Result<Map<String, Value>, Failure> {
    let Inputs { m, .. } = inputs::<S>(cfg, ctx)?;
    let o = obstruction(&m)?;
    let scale = o.comps.iter().map(|c| c.max_abs_f64()).fold(0.0, f64::max);
    let mut out = Map::new();
    out.insert("obstruction".into(), tensor(&o, true));
    out.insert("vanishes".into(), json!(negligible(&o.comps, scale)));
    out.insert("norm".into(), jet(&base::inner(&m, &o, &o)));
    out.insert("trace_free".into(), json!(negligible(&[m.trace(&o)], scale)));
    out.insert("divergence_free".into(), json!(negligible(&m.divergence(&o)?.comps, scale)));
    Ok(out)
}

fn parity(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

fn invariants<S: Scalar>(cfg: &RunConfig, ctx: S::Ctx) -> Result<Map<String, Value>, Failure> {
    let Inputs { m, a } = inputs::<S>(cfg, ctx)?;
    let n = m.dim();
    let (schemas, from_file): (Vec<ContractionSchema>, bool) = match &cfg.schema {
        Some(p) => {
            let src = std::fs::read_to_string(p)
                .map_err(|e| Failure::Input(format!("{}: cannot read schema file: {e}", p.display())))?;
            let file = SchemaFile::from_toml(&src).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            for s in &file.invariants {
                s.validate(n).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            }
            (file.invariants, true)
        }
        None => (library().invariants.iter().filter(|s| s.dimension.map_or(true, |d| d == n)).cloned().collect(), false),
    };
    let sm = SmoothAmbient::new(&m, a.as_deref())?;
    let mut list = Vec::new();
    for schema in &schemas {
        match evaluate_contraction(schema, &sm) {
            Ok(v) => {
                let value = if v.value.rank == 0 { jet(&v.value.comps[0]) } else { tensor(&v.value, false) };
                list.push(json!({
                    "name": v.name,
                    "description": schema.description,
                    "weight": v.weight,
                    "parity": parity(v.parity),
                    "rank": v.value.rank,
                    "value": value,
                }));
            }
            Err(e @ Error::Domain(_)) if !from_file => {
                list.push(json!({ "name": schema.name, "skipped": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if n == 4 && !from_file {
        match exceptional_n4(&sm) {
            Ok((_, second)) => list.push(json!({
                "name": "exceptional_tractor",
                "description": "D^A D^B L_(AB) with L_AB = η^{IJKL} R_{IJAC} R_{KLB}^C",
                "weight": -4,
                "parity": "odd",
                "rank": 0,
                "value": jet(&second),
            })),
            Err(e @ Error::Domain(_)) => list.push(json!({ "name": "exceptional_tractor", "skipped": e.to_string() })),
            Err(e) => return Err(e.into()),
        }
    }
    let mut out = Map::new();
    out.insert("invariants".into(), Value::Array(list));
    Ok(out)
}

fn check<S: Scalar>(cfg: &RunConfig, ctx: S::Ctx) -> Result<(Map<String, Value>, Option<String>), Failure> {
    let suite = SuiteConfig { order: cfg.x_order, rho_order: cfg.rho_order };
    let checks = run_suite::<S>(&ctx, &cfg.metric, cfg.ambiguity.as_ref(), suite)?;
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let first = checks
        .iter()
        .find(|c| c.status == Status::Fail)
        .map(|c| format!("check `{}` failed: {}", c.name, c.detail));
    let list: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "name": c.name, "status": c.status.as_str(), "detail": c.detail }))
        .collect();
    let mut out = Map::new();
    out.insert("rho_order".into(), json!(cfg.rho_order));
    out.insert("checks".into(), Value::Array(list));
    out.insert("passed".into(), json!(count(Status::Pass)));
    out.insert("failed".into(), json!(count(Status::Fail)));
    out.insert("skipped".into(), json!(count(Status::Skip)));
    Ok((out, first))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_exit_classes() {
        assert!(matches!(Failure::from(Error::Input("x".into())), Failure::Input(_)));
        assert!(matches!(Failure::from(Error::InsufficientOrder("x".into())), Failure::Input(_)));
        assert!(matches!(Failure::from(Error::Inconsistent("x".into())), Failure::Mismatch(_)));
        assert!(matches!(Failure::from(Error::Valuation("x".into())), Failure::Mismatch(_)));
    }
}
