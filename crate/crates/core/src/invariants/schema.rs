//! Declarative complete and partial contractions of ambient tensors.
//!
//! A schema lists factors and pairs of global slot numbers; slots are
//! numbered consecutively across factors. Each pair is contracted with
//! `g̃^{-1}`; unpaired slots stay free (covariant, in increasing order).

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{AmbientTensorAtG, SmoothAmbient, VolumeForm};
use crate::error::{Error, Result};
use crate::riemann::JetTensor;
use crate::scalar::Scalar;
use crate::tensor::contract_product;

/// An ambient tensor that can appear as a factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorName {
    /// `∇̃^r R̃`
    Curvature,
    /// `∇̃^r Õ`
    Obstruction,
    /// `μ̃`
    Mu,
    /// `μ̃₀ = T⨼μ̃`
    Mu0,
    /// `η = t^{-2}∂_ρ⨼μ̃₀`
    Eta,
}

impl TensorName {
    pub fn is_volume_form(self) -> bool {
        matches!(self, TensorName::Mu | TensorName::Mu0 | TensorName::Eta)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    pub tensor: TensorName,
    #[serde(default)]
    pub derivatives: usize,
}

impl Factor {
    pub fn slots(&self, n: usize) -> usize {
        match self.tensor {
            TensorName::Curvature => 4 + self.derivatives,
            TensorName::Obstruction => 2 + self.derivatives,
            TensorName::Mu => n + 2,
            TensorName::Mu0 => n + 1,
            TensorName::Eta => n,
        }
    }

    /// Homogeneity degree in `t` of the covariant field.
    pub fn degree(&self, n: usize) -> i32 {
        match self.tensor {
            TensorName::Curvature => 2,
            TensorName::Obstruction => 2 - n as i32,
            TensorName::Mu | TensorName::Mu0 => n as i32 + 2,
            TensorName::Eta => n as i32,
        }
    }
}

/// Behaviour under orientation reversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionSchema {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Restricts the schema to one base dimension.
    #[serde(default)]
    pub dimension: Option<usize>,
    pub factors: Vec<Factor>,
    #[serde(default)]
    pub pairs: Vec<[usize; 2]>,
    /// Declared parity, checked against the number of volume-form factors.
    #[serde(default)]
    pub parity: Option<Parity>,
}

/// A file of schemas: `[[invariant]]` tables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaFile {
    #[serde(default, rename = "invariant")]
    pub invariants: Vec<ContractionSchema>,
}

impl SchemaFile {
    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Input(format!("schema file: {}", e.message())))
    }

    pub fn find(&self, name: &str) -> Option<&ContractionSchema> {
        self.invariants.iter().find(|s| s.name == name)
    }
}

/// The shipped schema library.
pub fn library() -> &'static SchemaFile {
    static LIB: OnceLock<SchemaFile> = OnceLock::new();
    LIB.get_or_init(|| SchemaFile::from_toml(include_str!("../../schemas/library.toml")).expect("library parses"))
}

impl ContractionSchema {
    pub fn total_slots(&self, n: usize) -> usize {
        self.factors.iter().map(|f| f.slots(n)).sum()
    }

    pub fn parity(&self) -> Parity {
        if self.factors.iter().filter(|f| f.tensor.is_volume_form()).count() % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Conformal weight of the resulting invariant.
    pub fn weight(&self, n: usize) -> i32 {
        self.factors.iter().map(|f| f.degree(n)).sum::<i32>() - 2 * self.pairs.len() as i32
    }

    pub fn free_slots(&self, n: usize) -> Vec<usize> {
        (0..self.total_slots(n)).filter(|s| !self.pairs.iter().any(|p| p.contains(s))).collect()
    }

    /// Checks the pairing and the declared parity in base dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let err = |m: String| Err(Error::Input(format!("schema `{}`: {m}", self.name)));
        if let Some(d) = self.dimension {
            if d != n {
                return err(format!("defined for n = {d}, got n = {n}"));
            }
        }
        if self.factors.is_empty() {
            return err("no factors".into());
        }
        for f in &self.factors {
            if f.tensor.is_volume_form() && f.derivatives > 0 {
                return err("volume forms are parallel; derivatives must be 0".into());
            }
        }
        let total = self.total_slots(n);
        let mut used = vec![false; total];
        for &[a, b] in &self.pairs {
            if a == b {
                return err(format!("slot {a} is paired with itself"));
            }
            for s in [a, b] {
                if s >= total {
                    return err(format!("slot {s} out of range (there are {total})"));
                }
                if used[s] {
                    return err(format!("slot {s} appears in two pairs"));
                }
                used[s] = true;
            }
        }
        if let Some(p) = self.parity {
            if p != self.parity() {
                return err(format!("declared {p:?} but the volume-form count gives {:?}", self.parity()));
            }
        }
        Ok(())
    }
}

/// The value of a schema on `g`.
#[derive(Clone, Debug)]
pub struct Invariant<S: Scalar> {
    pub name: String,
    pub weight: i32,
    pub parity: Parity,
    /// Rank = number of free slots; rank 0 for a complete contraction.
    pub value: JetTensor<S>,
}

impl<S: Scalar> Invariant<S> {
    /// The scalar value of a complete contraction.
    pub fn scalar(&self) -> Option<&crate::series::MultiJet<S>> {
        (self.value.rank == 0).then(|| &self.value.comps[0])
    }
}

fn factor_at_g<S: Scalar>(sm: &SmoothAmbient<S>, f: &Factor) -> Result<AmbientTensorAtG<S>> {
    match f.tensor {
        TensorName::Curvature => sm.ambient_curv_derivs(f.derivatives),
        TensorName::Obstruction => sm.ambient_obstruction(f.derivatives),
        TensorName::Mu => sm.volume_form(VolumeForm::Mu),
        TensorName::Mu0 => sm.volume_form(VolumeForm::Mu0),
        TensorName::Eta => sm.volume_form(VolumeForm::Eta),
    }
}

/// Evaluates a schema at `ρ = 0`, `t = 1`.
pub fn evaluate_contraction<S: Scalar>(schema: &ContractionSchema, sm: &SmoothAmbient<S>) -> Result<Invariant<S>> {
    let n = sm.n();
    schema.validate(n)?;
    let ginv = sm.inverse_at_g()?;
    let mut owner = Vec::new();
    for (k, f) in schema.factors.iter().enumerate() {
        owner.extend(std::iter::repeat(k).take(f.slots(n)));
    }
    // (tensor, global slot labels)
    let mut parts: Vec<(JetTensor<S>, Vec<usize>)> = Vec::new();
    let mut start = 0;
    for f in &schema.factors {
        let t = factor_at_g(sm, f)?.comps;
        let k = f.slots(n);
        parts.push((t, (start..start + k).collect()));
        start += k;
    }
    for &[a, b] in &schema.pairs {
        let (fa, fb) = (owner[a], owner[b]);
        if fa == fb {
            let (t, labels) = &mut parts[fa];
            let (la, lb) = (pos(labels, a), pos(labels, b));
            *t = t.trace_with(&ginv, la, lb);
            labels.retain(|&s| s != a && s != b);
        } else {
            let raise_a = schema.factors[fb].tensor.is_volume_form() && !schema.factors[fa].tensor.is_volume_form();
            let (f, s) = if raise_a { (fa, a) } else { (fb, b) };
            let (t, labels) = &mut parts[f];
            *t = t.transform_slot(&ginv, pos(labels, s));
        }
    }
    let mut iter = parts.into_iter();
    let (mut acc, mut labels) = iter.next().expect("validated nonempty");
    for (t, tl) in iter {
        let mut pairs = Vec::new();
        for &[a, b] in &schema.pairs {
            if let (Some(x), Some(y)) = (labels.iter().position(|&s| s == a), tl.iter().position(|&s| s == b)) {
                pairs.push((x, y));
            } else if let (Some(x), Some(y)) = (labels.iter().position(|&s| s == b), tl.iter().position(|&s| s == a)) {
                pairs.push((x, y));
            }
        }
        acc = contract_product(&acc, &t, &pairs);
        let mut next: Vec<usize> = labels.iter().enumerate().filter(|(i, _)| !pairs.iter().any(|p| p.0 == *i)).map(|(_, &s)| s).collect();
        next.extend(tl.iter().enumerate().filter(|(i, _)| !pairs.iter().any(|p| p.1 == *i)).map(|(_, &s)| s));
        labels = next;
    }
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by_key(|&i| labels[i]);
    let value = if order.iter().enumerate().all(|(i, &o)| i == o) { acc } else { acc.permute(&order) };
    Ok(Invariant { name: schema.name.clone(), weight: schema.weight(n), parity: schema.parity(), value })
}

fn pos(labels: &[usize], s: usize) -> usize {
    labels.iter().position(|&x| x == s).expect("slot label present")
}
