//! Run configuration: one TOML document covering every subcommand.
//!
//! Values come from defaults, then the `--config` file, then command-line
//! flags. The fully resolved document is written next to every output.

use std::path::{Path, PathBuf};

use glcc::data::{SplitSpec, SyntheticSpec, TextFormat};
use glcc::eval::{GridSpec, SweepSpec};
use glcc::model::TrainConfig;
use glcc::GlccError;
use serde::{Deserialize, Serialize};

pub const RESOLVED_CONFIG: &str = "resolved_config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed. Copied into every seeded section when resolving, so a
    /// run's randomness is fixed by this one value.
    pub seed: u64,
    pub out: PathBuf,
    pub paths: Paths,
    pub format: TextFormat,
    pub train: TrainConfig,
    pub split: SplitSpec,
    pub synth: SyntheticSpec,
    pub sweep: SweepSpec,
    pub grid: GridSpec,
}

/// Input files. Unused entries are left out of the resolved file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub views: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graphs: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predictions: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out: PathBuf::from("glcc-out"),
            paths: Paths::default(),
            format: TextFormat::default(),
            train: TrainConfig::default(),
            split: SplitSpec::default(),
            synth: SyntheticSpec::default(),
            sweep: SweepSpec::default(),
            grid: GridSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, GlccError> {
        let text = std::fs::read_to_string(path).map_err(|e| GlccError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        toml::from_str(&text).map_err(|e| GlccError::Param(format!("{}: {e}", path.display())))
    }

    /// Propagates the master seed.
    pub fn resolve(mut self) -> Self {
        self.train.seed = self.seed;
        self.split.seed = self.seed;
        self.synth.seed = self.seed;
        self.sweep.seed = self.seed;
        self.grid.split.seed = self.seed;
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Creates the output directory and writes the resolved config into it.
    pub fn prepare_out_dir(&self) -> Result<&Path, GlccError> {
        std::fs::create_dir_all(&self.out).map_err(|e| GlccError::Io {
            path: self.out.clone(),
            source: e,
        })?;
        write_file(&self.out.join(RESOLVED_CONFIG), &self.to_toml())?;
        Ok(&self.out)
    }

    pub fn require_views(&self) -> Result<&[PathBuf], GlccError> {
        if self.paths.views.is_empty() {
            return Err(GlccError::Param(
                "no view files given (--views or paths.views)".into(),
            ));
        }
        Ok(&self.paths.views)
    }
}

/// Fetches an optional path or reports which flag is missing.
pub fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, GlccError> {
    value
        .as_deref()
        .ok_or_else(|| GlccError::Param(format!("missing input: pass {flag}")))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), GlccError> {
    std::fs::write(path, text).map_err(|e| GlccError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
