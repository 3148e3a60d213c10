//! Flat `key=value` run configuration.
//!
//! Besides every hyperparameter key, recognised keys are `train`, `dev`,
//! `test`, `lexicon`, `frequencies`, `model`, `cache` (paths), `augment`
//! (a preset name), `autoencoder` and `transducer` (counts),
//! `augment_seed`, `workers` and `no_cache_ambiguous`. Lines starting with
//! `#` are comments.

use std::fs;
use std::path::{Path, PathBuf};

use crate::augment::AugmentationPlan;
use crate::error::{Error, Result};
use crate::model::HyperParams;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub hyper: HyperParams,
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub frequencies: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub augment: AugmentationPlan,
    pub workers: usize,
    pub no_cache_ambiguous: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let hyper = HyperParams::default();
        RunConfig {
            augment: AugmentationPlan {
                seed: hyper.seed,
                ..AugmentationPlan::default()
            },
            hyper,
            train: None,
            dev: None,
            test: None,
            lexicon: None,
            frequencies: None,
            model: None,
            cache: None,
            workers: 1,
            no_cache_ambiguous: false,
        }
    }
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::invalid(format!("bad boolean {value:?} for {key}"))),
    }
}

fn count(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("bad value {value:?} for {key}")))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let path = || Some(PathBuf::from(value));
        match key {
            "train" => self.train = path(),
            "dev" => self.dev = path(),
            "test" => self.test = path(),
            "lexicon" => self.lexicon = path(),
            "frequencies" => self.frequencies = path(),
            "model" => self.model = path(),
            "cache" => self.cache = path(),
            "augment" => {
                let seed = self.augment.seed;
                self.augment = AugmentationPlan::preset(value, seed)?;
            }
            "autoencoder" => self.augment.autoencoder = count(key, value)?,
            "transducer" => self.augment.transducer = count(key, value)?,
            "augment_seed" => {
                self.augment.seed = value
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad value {value:?} for {key}")))?
            }
            "workers" => self.workers = count(key, value)?.max(1),
            "no_cache_ambiguous" => self.no_cache_ambiguous = flag(key, value)?,
            _ => {
                self.hyper.set(key, value)?;
                if key == "seed" {
                    self.augment.seed = self.hyper.seed;
                }
            }
        }
        Ok(())
    }

    /// Apply `key=value` assignments in order.
    pub fn apply(&mut self, text: &str, source_name: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source_name, i + 1, "expected key=value"))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply(text, source_name)?;
        c.hyper.validate()?;
        Ok(c)
    }

    pub fn load_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&fs::read_to_string(path)?, &path.display().to_string())
    }

    /// A path that must be set and exist.
    pub fn require<'a>(&self, field: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
        let p = field
            .as_deref()
            .ok_or_else(|| Error::invalid(format!("config key {name} is required")))?;
        if !p.exists() {
            return Err(Error::invalid(format!("{name}: {} does not exist", p.display())));
        }
        Ok(p)
    }
}
