//! Run configuration: a TOML file merged with command-line overrides
//! (flags win).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use patchwarp::erase::EraseParams;
use patchwarp::layout::{LayoutParams, PatchSlot};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Output canvas as (width, height); retargeting renders onto the
    /// target person's canvas unless this is explicitly overridden.
    pub canvas: (u32, u32),
    pub seed: u64,
    pub alpha: f64,
    pub jobs: usize,
    /// Root directory that batch job person ids resolve against.
    pub data_root: PathBuf,
    pub layout: LayoutParams,
    pub erase: EraseParams,
    /// Stitch z-order override, bottom to top, as slot names.
    pub z_order: Option<Vec<String>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            canvas: (512, 320),
            seed: 0,
            alpha: 0.9,
            jobs: 1,
            data_root: PathBuf::from("."),
            layout: LayoutParams::default(),
            erase: EraseParams::default(),
            z_order: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            bail!("alpha {} outside [0, 1]", self.alpha);
        }
        if self.jobs == 0 {
            bail!("jobs must be >= 1");
        }
        if self.canvas.0 == 0 || self.canvas.1 == 0 {
            bail!("canvas dimensions must be positive");
        }
        self.layout
            .validate()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        self.erase
            .validate()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        if let Some(names) = &self.z_order {
            for name in names {
                if PatchSlot::from_name(name).is_none() {
                    bail!("unknown slot {name:?} in z_order");
                }
            }
        }
        Ok(())
    }

    /// The stitch order to use, resolved from the override or the default.
    pub fn z_order_slots(&self) -> Vec<PatchSlot> {
        match &self.z_order {
            Some(names) => names
                .iter()
                .filter_map(|n| PatchSlot::from_name(n))
                .collect(),
            None => patchwarp::warp::DEFAULT_Z_ORDER.to_vec(),
        }
    }
}

/// Parses a `WxH` canvas argument.
pub fn parse_canvas(text: &str) -> Result<(u32, u32)> {
    let (w, h) = text
        .split_once(['x', 'X'])
        .with_context(|| format!("canvas {text:?} is not WxH"))?;
    Ok((
        w.trim().parse().context("canvas width")?,
        h.trim().parse().context("canvas height")?,
    ))
}
