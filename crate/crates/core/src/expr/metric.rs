//! Input documents: metric and ambiguity-tensor files.
//!
//! ```toml
//! dim = 4
//! signature = [4, 0]
//! base_point = ["0", "0", "0", "0"]
//! mode = "exact"
//! g = [["1 + x1^2", "0", "0", "0"], ...]
//! ```

use std::collections::BTreeSet;
use std::sync::Arc;

use malachite_q::Rational;
use serde::Deserialize;

use super::Expr;
use crate::error::{Error, Result};
use crate::riemann::MetricData;
use crate::scalar::Scalar;
use crate::series::{JetSpace, MultiJet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Input(format!("unknown mode `{other}` (expected exact or float)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    dim: usize,
    signature: [usize; 2],
    #[serde(default)]
    base_point: Option<Vec<Number>>,
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    precision_bits: Option<usize>,
    g: Vec<Vec<Number>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAmbiguity {
    #[serde(rename = "A")]
    a: Vec<Vec<Number>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    fn text(&self) -> String {
        match self {
            Number::Int(i) => i.to_string(),
            Number::Text(s) => s.clone(),
        }
    }
}

/// A parsed metric file.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec {
    pub dim: usize,
    /// `(p, q)`: `p` positive and `q` negative directions.
    pub signature: (usize, usize),
    pub base_point: Vec<Rational>,
    pub mode: Mode,
    pub precision_bits: usize,
    pub g: Vec<Vec<Expr>>,
}

fn parse_matrix(rows: &[Vec<Number>], dim: usize, what: &str) -> Result<Vec<Vec<Expr>>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Input(format!("{what} must be a {dim}x{dim} array")));
    }
    let mut out = Vec::with_capacity(dim);
    for (i, row) in rows.iter().enumerate() {
        let mut r = Vec::with_capacity(dim);
        for (j, cell) in row.iter().enumerate() {
            let e = Expr::parse(&cell.text(), dim).map_err(|e| match e {
                Error::Parse { line, col, msg } => Error::Parse {
                    line,
                    col,
                    msg: format!("{what}[{}][{}]: {msg}", i + 1, j + 1),
                },
                other => other,
            })?;
            r.push(e);
        }
        out.push(r);
    }
    Ok(out)
}

fn toml_error(e: toml::de::Error, src: &str) -> Error {
    let (line, col) = e
        .span()
        .map(|s| {
            let before = &src[..s.start.min(src.len())];
            (before.matches('\n').count() + 1, before.rsplit('\n').next().map(|l| l.len()).unwrap_or(0) + 1)
        })
        .unwrap_or((0, 0));
    Error::Parse { line, col, msg: e.message().to_string() }
}

impl MetricSpec {
    pub fn from_toml(src: &str) -> Result<MetricSpec> {
        let raw: RawMetric = toml::from_str(src).map_err(|e| toml_error(e, src))?;
        let dim = raw.dim;
        if dim < 2 {
            return Err(Error::InvalidMetric("dimension must be at least 2".into()));
        }
        if raw.signature[0] + raw.signature[1] != dim {
            return Err(Error::InvalidMetric(format!(
                "signature ({}, {}) does not add up to dimension {dim}",
                raw.signature[0], raw.signature[1]
            )));
        }
        let g = parse_matrix(&raw.g, dim, "g")?;
        let base_point = match raw.base_point {
            None => vec![Rational::from(0); dim],
            Some(v) => {
                if v.len() != dim {
                    return Err(Error::Input(format!("base_point needs {dim} entries")));
                }
                v.iter()
                    .map(|n| {
                        Expr::parse(&n.text(), dim)?
                            .constant_value()
                            .ok_or_else(|| Error::Input(format!("base point entry `{}` is not a number", n.text())))
                    })
                    .collect::<Result<_>>()?
            }
        };
        let mode = Mode::parse(raw.mode.as_deref().unwrap_or("exact"))?;
        Ok(MetricSpec {
            dim,
            signature: (raw.signature[0], raw.signature[1]),
            base_point,
            mode,
            precision_bits: raw.precision_bits.unwrap_or(256),
            g,
        })
    }

    /// Builds a spec from component strings (mostly for tests and fixtures).
    pub fn from_strings(signature: (usize, usize), g: &[&[&str]]) -> Result<MetricSpec> {
        let dim = g.len();
        let rows: Vec<Vec<Number>> =
            g.iter().map(|r| r.iter().map(|s| Number::Text(s.to_string())).collect()).collect();
        Ok(MetricSpec {
            dim,
            signature,
            base_point: vec![Rational::from(0); dim],
            mode: Mode::Exact,
            precision_bits: 256,
            g: parse_matrix(&rows, dim, "g")?,
        })
    }

    /// Base coordinates appearing in any component.
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for row in &self.g {
            for e in row {
                e.variables(&mut s);
            }
        }
        s
    }

    pub fn check_mode<S: Scalar>(&self) -> Result<()> {
        if S::EXACT && self.g.iter().flatten().any(|e| e.uses_transcendental()) {
            return Err(Error::Transcendental("exp/sin/cos".into()));
        }
        Ok(())
    }

    pub fn base_point_scalars<S: Scalar>(&self, ctx: &S::Ctx) -> Vec<S> {
        self.base_point.iter().map(|q| S::from_rational(ctx, q)).collect()
    }

    /// Component jets in `space`, after checking symmetry.
    pub fn jets<S: Scalar>(&self, space: &Arc<JetSpace<S>>) -> Result<Vec<MultiJet<S>>> {
        self.check_mode::<S>()?;
        let base = self.base_point_scalars::<S>(space.ctx());
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.g[i][j].to_jet(space, &base)?);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !out[i * n + j].agrees_with(&out[j * n + i]) {
                    return Err(Error::InvalidMetric(format!(
                        "g[{}][{}] and g[{}][{}] differ",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Builds the metric on a jet space of weighted order `order` over the
    /// coordinates it uses plus `extra`, with `ρ` as an extra variable.
    pub fn metric_data<S: Scalar>(&self, ctx: S::Ctx, order: u32, extra: &[usize]) -> Result<MetricData<S>> {
        let mut active: Vec<usize> = self.variables().into_iter().collect();
        active.extend_from_slice(extra);
        let sp = JetSpace::new(ctx, self.dim, &active, true, order)?;
        MetricData::new(self.jets(&sp)?, self.signature)
    }

    /// Renders the spec back to the file format.
    pub fn to_toml(&self) -> String {
        let mut s = format!(
            "dim = {}\nsignature = [{}, {}]\nbase_point = [{}]\nmode = \"{}\"\n",
            self.dim,
            self.signature.0,
            self.signature.1,
            self.base_point.iter().map(|q| format!("\"{q}\"")).collect::<Vec<_>>().join(", "),
            self.mode.as_str()
        );
        if self.mode == Mode::Float {
            s.push_str(&format!("precision_bits = {}\n", self.precision_bits));
        }
        s.push_str("g = [\n");
        for row in &self.g {
            let cells: Vec<String> = row.iter().map(|e| format!("\"{e}\"")).collect();
            s.push_str(&format!("  [{}],\n", cells.join(", ")));
        }
        s.push_str("]\n");
        s
    }
}

/// A parsed ambiguity-tensor file (`A = [[...]]`).
#[derive(Clone, Debug, PartialEq)]
pub struct AmbiguitySpec {
    pub a: Vec<Vec<Expr>>,
}

impl AmbiguitySpec {
    pub fn from_toml(src: &str, dim: usize) -> Result<AmbiguitySpec> {
        let raw: RawAmbiguity = toml::from_str(src).map_err(|e| toml_error(e, src))?;
        Ok(AmbiguitySpec { a: parse_matrix(&raw.a, dim, "A")? })
    }

    pub fn from_strings(a: &[&[&str]]) -> Result<AmbiguitySpec> {
        let dim = a.len();
        let rows: Vec<Vec<Number>> =
            a.iter().map(|r| r.iter().map(|s| Number::Text(s.to_string())).collect()).collect();
        Ok(AmbiguitySpec { a: parse_matrix(&rows, dim, "A")? })
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for e in self.a.iter().flatten() {
            e.variables(&mut s);
        }
        s
    }

    pub fn jets<S: Scalar>(&self, space: &Arc<JetSpace<S>>, base: &[S]) -> Result<Vec<MultiJet<S>>> {
        if S::EXACT && self.a.iter().flatten().any(|e| e.uses_transcendental()) {
            return Err(Error::Transcendental("exp/sin/cos".into()));
        }
        let n = self.a.len();
        let mut out = Vec::with_capacity(n * n);
        for row in &self.a {
            for e in row {
                out.push(e.to_jet(space, base)?);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !out[i * n + j].agrees_with(&out[j * n + i]) {
                    return Err(Error::InvalidAmbiguity(format!("A[{}][{}] and A[{}][{}] differ", i + 1, j + 1, j + 1, i + 1)));
                }
            }
        }
        Ok(out)
    }

    pub fn to_toml(&self) -> String {
        let mut s = String::from("A = [\n");
        for row in &self.a {
            let cells: Vec<String> = row.iter().map(|e| format!("\"{e}\"")).collect();
            s.push_str(&format!("  [{}],\n", cells.join(", ")));
        }
        s.push_str("]\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_metric_file() {
        let src = r#"
dim = 2
signature = [2, 0]
base_point = ["1/2", 0]
g = [["1 + x1^2", "x1*x2"], ["x1*x2", 1]]
"#;
        let m = MetricSpec::from_toml(src).unwrap();
        assert_eq!(m.dim, 2);
        assert_eq!(m.base_point[0], Rational::from_signeds(1, 2));
        assert_eq!(m.mode, Mode::Exact);
        let again = MetricSpec::from_toml(&m.to_toml()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn rejects_bad_files() {
        let bad_sig = "dim = 2\nsignature = [1, 0]\ng = [[\"1\", \"0\"], [\"0\", \"1\"]]\n";
        assert!(matches!(MetricSpec::from_toml(bad_sig), Err(Error::InvalidMetric(_))));
        let syntax = "dim = 2\nsignature = [2, 0\n";
        assert!(matches!(MetricSpec::from_toml(syntax), Err(Error::Parse { .. })));
        let expr = "dim = 1\nsignature = [1, 0]\ng = [[\"1 + * x1\"]]\n";
        assert!(MetricSpec::from_toml(expr).is_err());
    }
}
