//! JSON instance files.
//!
//! ```json
//! {"n": 3, "left_masks": ["5", "0"], "right_masks": ["2"], "params": {...}, "seed": 1}
//! ```
//! Masks are lowercase hex, most-significant nibble first, padded to
//! `ceil(n/4)` digits (at least one). `params` and `seed` are optional.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClauseSystem, Side};
use crate::mask::Mask;
use crate::random::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    left_masks: Vec<String>,
    right_masks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<ModelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub system: ClauseSystem,
    pub params: Option<ModelParams>,
    pub seed: Option<u64>,
}

impl Instance {
    pub fn new(system: ClauseSystem) -> Self {
        Instance {
            system,
            params: None,
            seed: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let cs = &self.system;
        let hex = |side| {
            cs.masks(side)
                .iter()
                .map(|m| m.to_hex(cs.n()))
                .collect::<Vec<_>>()
        };
        let file = InstanceFile {
            n: cs.n(),
            left_masks: hex(Side::Left),
            right_masks: hex(Side::Right),
            params: self.params.clone(),
            seed: self.seed,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let parse = |masks: &[String]| {
            masks
                .iter()
                .map(|s| Mask::from_hex(s, file.n))
                .collect::<Result<Vec<_>>>()
        };
        let system = ClauseSystem::new(file.n, &parse(&file.left_masks)?, &parse(&file.right_masks)?)?;
        if let Some(p) = &file.params {
            if p.n_left != system.n_left() || p.n_right != system.n_right() {
                return Err(Error::Parse(format!(
                    "params declare {}x{} vertices but masks give {}x{}",
                    p.n_left,
                    p.n_right,
                    system.n_left(),
                    system.n_right()
                )));
            }
        }
        Ok(Instance {
            system,
            params: file.params,
            seed: file.seed,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
