use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::particles::Norm;

use super::decomposition::{build_decomposition, DecomposedPotential, DecompositionParams};
use super::potts::PottsPotential;
use super::well_behaved::{Cubic, WellBehavedFn};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// A number or the string `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointValue {
    Number(f64),
    Text(String),
}

/// One spin pair. Pairs not listed do not interact (apart from the
/// diagonal); a pair and its mirror image may be listed once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub spins: [u16; 2],
    pub breakpoints: Vec<f64>,
    #[serde(default)]
    pub pieces: Vec<[f64; 4]>,
    pub point_values: Vec<PointValue>,
}

/// On-disk model description: norm, spin count, interaction table and the
/// decomposition parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub norm: Norm,
    pub spins: u16,
    pub pairs: Vec<PairSpec>,
    pub eps: Option<f64>,
    pub mollify_width: Option<f64>,
    pub activity: f64,
    #[serde(default = "one")]
    pub ruelle: f64,
}

fn one() -> f64 {
    1.0
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { field: field.into(), message: message.into() }
}

impl PairSpec {
    fn from_fn(a: u16, b: u16, f: &WellBehavedFn) -> Self {
        PairSpec {
            spins: [a, b],
            breakpoints: f.breakpoints().to_vec(),
            pieces: f.pieces().iter().map(|p| p.0).collect(),
            point_values: f
                .point_values()
                .iter()
                .map(|v| match v {
                    ExtReal::PosInf => PointValue::Text("inf".into()),
                    ExtReal::Finite(x) => PointValue::Number(*x),
                })
                .collect(),
        }
    }

    fn to_fn(&self, field: &str) -> Result<WellBehavedFn> {
        let values = self
            .point_values
            .iter()
            .map(|v| match v {
                PointValue::Number(x) => Ok(ExtReal::Finite(*x)),
                PointValue::Text(t) if matches!(t.as_str(), "inf" | "+inf" | "infinity") => Ok(ExtReal::PosInf),
                PointValue::Text(t) => Err(schema(format!("{field}.point_values"), format!("unrecognised value {t:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        WellBehavedFn::new(self.breakpoints.clone(), self.pieces.iter().map(|c| Cubic(*c)).collect(), values)
            .map_err(|e| schema(field, e.to_string()))
    }
}

impl ModelSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(s).map_err(|e| schema("model", e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ModelSpec::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(schema(
                "schema_version",
                format!("expected {MODEL_SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        self.potential().map(|_| ())
    }

    pub fn table(&self) -> Result<Vec<WellBehavedFn>> {
        let s = self.spins as usize;
        if s == 0 {
            return Err(schema("spins", "must be at least 1"));
        }
        let mut table: Vec<Option<WellBehavedFn>> = vec![None; s * s];
        for (k, p) in self.pairs.iter().enumerate() {
            let field = format!("pairs[{k}]");
            let [a, b] = p.spins;
            if a as usize >= s || b as usize >= s {
                return Err(schema(&field, format!("spin pair {a},{b} outside 0..{s}")));
            }
            let f = p.to_fn(&field)?;
            for (i, j) in [(a as usize, b as usize), (b as usize, a as usize)] {
                match &table[i * s + j] {
                    Some(g) if *g != f => {
                        return Err(schema(&field, format!("conflicts with an earlier entry for ({i}, {j}): table must be symmetric")))
                    }
                    _ => table[i * s + j] = Some(f.clone()),
                }
            }
        }
        Ok(table.into_iter().map(|f| f.unwrap_or_else(WellBehavedFn::zero)).collect())
    }

    /// The enlargement width, defaulting to `0.05·min r₀`.
    pub fn eps_or_default(&self) -> Result<f64> {
        let table = self.table()?;
        Ok(self.eps.unwrap_or_else(|| {
            0.05 * table.iter().map(|f| f.r0()).filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min).min(20.0)
        }))
    }

    pub fn potential(&self) -> Result<PottsPotential> {
        let eps = self.eps_or_default()?;
        PottsPotential::new(self.norm, self.spins as usize, self.table()?, eps).map_err(|e| schema("model", e.to_string()))
    }

    pub fn params(&self) -> Result<DecompositionParams> {
        Ok(DecompositionParams {
            eps: Some(self.eps_or_default()?),
            mollify_width: self.mollify_width,
            activity: self.activity,
            ruelle: self.ruelle,
        })
    }

    pub fn build(&self) -> Result<DecomposedPotential> {
        build_decomposition(&self.potential()?, self.params()?)
    }

    pub fn from_potential(name: &str, pot: &PottsPotential, params: DecompositionParams) -> Self {
        let s = pot.spins() as u16;
        let mut pairs = Vec::new();
        for a in 0..s {
            for b in a..s {
                let f = pot.entry(a as usize, b as usize);
                if *f != WellBehavedFn::zero() {
                    pairs.push(PairSpec::from_fn(a, b, f));
                }
            }
        }
        ModelSpec {
            schema_version: MODEL_SCHEMA_VERSION,
            name: name.to_string(),
            norm: *pot.norm(),
            spins: s,
            pairs,
            eps: params.eps.or(Some(pot.eps())),
            mollify_width: params.mollify_width,
            activity: params.activity,
            ruelle: params.ruelle,
        }
    }

    /// No interaction at all; the Gibbs measure is the Poisson process.
    pub fn zero(spins: u16, activity: f64) -> Self {
        ModelSpec {
            schema_version: MODEL_SCHEMA_VERSION,
            name: "zero".into(),
            norm: Norm::Euclidean,
            spins,
            pairs: Vec::new(),
            eps: Some(0.1),
            mollify_width: None,
            activity,
            ruelle: 1.0,
        }
    }

    /// Two-spin Widom–Rowlinson model with unlike hard-core radius `r0`.
    pub fn widom_rowlinson(r0: f64, activity: f64) -> Self {
        let pot = PottsPotential::widom_rowlinson(r0, Norm::Euclidean, 0.05 * r0).expect("valid radius");
        ModelSpec::from_potential(
            "widom-rowlinson",
            &pot,
            DecompositionParams { eps: Some(0.05 * r0), mollify_width: None, activity, ruelle: 1.0 },
        )
    }
}
