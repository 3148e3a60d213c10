use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HyperParams {
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub dropout: f64,
    pub lr: f64,
    pub lr_decay: f64,
    /// Last epoch trained at the initial learning rate.
    pub decay_start_epoch: usize,
    pub epochs: usize,
    /// Fixed minibatch size; derived from the training sentence count when
    /// unset.
    pub batch_size: Option<usize>,
    pub beam_size: usize,
    pub seed: u64,
    pub init_range: f64,
    pub clip_norm: f64,
    /// Characters rarer than this are mapped to UNK.
    pub min_char_frequency: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            embedding_dim: 500,
            hidden_dim: 500,
            dropout: 0.3,
            lr: 0.0005,
            lr_decay: 0.9,
            decay_start_epoch: 20,
            epochs: 50,
            batch_size: None,
            beam_size: 5,
            seed: 1,
            init_range: 0.1,
            clip_norm: 5.0,
            min_char_frequency: 2,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::invalid(format!("hyperparameters: {m}")));
        if self.embedding_dim == 0 || self.hidden_dim == 0 {
            return fail("dimensions must be positive");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail("dropout must be in [0, 1)");
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return fail("lr_decay must be in (0, 1]");
        }
        if self.lr <= 0.0 {
            return fail("lr must be positive");
        }
        if self.epochs == 0 || self.beam_size == 0 || self.batch_size == Some(0) {
            return fail("epochs, beam_size and batch_size must be positive");
        }
        Ok(())
    }

    /// `key=value` lines in a fixed order.
    pub fn to_kv(&self) -> String {
        let batch = self
            .batch_size
            .map_or_else(|| "auto".to_owned(), |b| b.to_string());
        [
            format!("embedding_dim={}", self.embedding_dim),
            format!("hidden_dim={}", self.hidden_dim),
            format!("dropout={}", self.dropout),
            format!("lr={}", self.lr),
            format!("lr_decay={}", self.lr_decay),
            format!("decay_start_epoch={}", self.decay_start_epoch),
            format!("epochs={}", self.epochs),
            format!("batch_size={batch}"),
            format!("beam_size={}", self.beam_size),
            format!("seed={}", self.seed),
            format!("init_range={}", self.init_range),
            format!("clip_norm={}", self.clip_norm),
            format!("min_char_frequency={}", self.min_char_frequency),
        ]
        .join("\n")
            + "\n"
    }

    /// Set one field from its `key=value` name. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::invalid(format!("bad value {v:?} for {key}")))
        }
        match key {
            "embedding_dim" => self.embedding_dim = num(key, value)?,
            "hidden_dim" => self.hidden_dim = num(key, value)?,
            "dropout" => self.dropout = num(key, value)?,
            "lr" => self.lr = num(key, value)?,
            "lr_decay" => self.lr_decay = num(key, value)?,
            "decay_start_epoch" => self.decay_start_epoch = num(key, value)?,
            "epochs" => self.epochs = num(key, value)?,
            "batch_size" => {
                self.batch_size = match value {
                    "auto" => None,
                    v => Some(num(key, v)?),
                }
            }
            "beam_size" => self.beam_size = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "init_range" => self.init_range = num(key, value)?,
            "clip_norm" => self.clip_norm = num(key, value)?,
            "min_char_frequency" => self.min_char_frequency = num(key, value)?,
            _ => return Err(Error::invalid(format!("unknown hyperparameter {key:?}"))),
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut h = HyperParams::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got {line:?}")))?;
            h.set(k.trim(), v.trim())?;
        }
        Ok(h)
    }
}
