//! JSON file formats for loss sequences.
//!
//! A loss sequence is an array of `{"kind": ..., "params": {...}}` records:
//!
//! ```json
//! [
//!   {"kind": "linear", "params": {"ell": [1.0, 0.0, 0.0]}},
//!   {"kind": "quadratic", "params": {"a": [[1.0, 0.0], [0.0, 1.0]], "b": [0.0, 0.5], "c": 0.0}}
//! ]
//! ```
//!
//! The quadratic record stands for `xᵀ A x + bᵀ x + c`. Floats round-trip
//! exactly, so a written sequence replays bit for bit.

use std::fs;
use std::path::Path;

use altreg_core::losses::LossFn;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LossRecord {
    Linear { ell: Vec<f64> },
    Quadratic { a: Vec<Vec<f64>>, b: Vec<f64>, c: f64 },
}

impl LossRecord {
    pub fn from_loss(f: &LossFn) -> Result<Self> {
        match f {
            LossFn::Linear(ell) => Ok(LossRecord::Linear { ell: ell.clone() }),
            LossFn::Quadratic(q) => Ok(LossRecord::Quadratic {
                a: q.a().rows(),
                b: q.b().to_vec(),
                c: q.c(),
            }),
            LossFn::BlackBox(_) => Err(HarnessError::validation(
                "losses",
                "black-box losses have no file representation",
            )),
        }
    }

    pub fn to_loss(&self) -> altreg_core::Result<LossFn> {
        match self {
            LossRecord::Linear { ell } => Ok(LossFn::linear(ell.clone())),
            LossRecord::Quadratic { a, b, c } => LossFn::quadratic(a, b.clone(), *c),
        }
    }
}

pub fn parse_losses(text: &str, origin: &str) -> Result<Vec<LossFn>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let records: Vec<LossRecord> = serde_path_to_error::deserialize(de)
        .map_err(|e| HarnessError::validation(format!("{origin}:{}", e.path()), e.inner().to_string()))?;
    if records.is_empty() {
        return Err(HarnessError::validation(origin, "loss sequence is empty"));
    }
    let dim = records[0].to_loss().map_err(|e| HarnessError::validation(format!("{origin}:[0]"), e.to_string()))?.dim();
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let f = r
                .to_loss()
                .map_err(|e| HarnessError::validation(format!("{origin}:[{i}]"), e.to_string()))?;
            if f.dim() != dim {
                return Err(HarnessError::validation(
                    format!("{origin}:[{i}]"),
                    format!("dimension {} differs from the first loss ({dim})", f.dim()),
                ));
            }
            Ok(f)
        })
        .collect()
}

pub fn read_losses(path: &Path) -> Result<Vec<LossFn>> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_losses(&text, &path.display().to_string())
}

pub fn losses_to_json(losses: &[LossFn]) -> Result<String> {
    let records = losses.iter().map(LossRecord::from_loss).collect::<Result<Vec<_>>>()?;
    Ok(serde_json::to_string_pretty(&records)?)
}

pub fn write_losses(path: &Path, losses: &[LossFn]) -> Result<()> {
    let text = losses_to_json(losses)?;
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}
