//! Flat key/value run configuration.
//!
//! A user file only needs the keys it changes: it is merged over the shipped
//! defaults before parsing, and unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detectors::{CrcddPolarity, DetectorConfig, DetectorKind, DftDenominator};
use crate::embedding::EmbeddingParams;
use crate::error::{invalid, Result};
use crate::indicator::IndicatorConfig;

const SHIPPED: &str = include_str!("../config/defaults.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub config_version: u32,
    pub seed: u64,
    pub window_n: usize,
    pub embedding_m: usize,
    pub embedding_tau: usize,
    pub cusum_lambda: f64,
    pub cusum_negative: bool,
    pub pht_lambda: f64,
    pub adwin_lambda: f64,
    pub adwin_stride: usize,
    pub udft_lambda: f64,
    pub udft_denominator: DftDenominator,
    pub crcdd_lambda: f64,
    pub crcdd_polarity: CrcddPolarity,
    pub indicator_lambda: f64,
    pub indicator_eta: f64,
    pub indicator_accumulate: bool,
    pub detectors: Vec<DetectorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl RunConfig {
    pub fn shipped() -> Self {
        toml::from_str(SHIPPED).expect("bundled defaults.toml is valid")
    }

    /// Parses `text` as a partial configuration over the shipped defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let user: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| invalid(format!("config: {}", e.message())))?;
        let mut merged: toml::Table = SHIPPED.parse().expect("bundled defaults.toml is valid");
        merged.extend(user);
        let cfg: RunConfig = merged
            .try_into()
            .map_err(|e: toml::de::Error| invalid(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn embedding(&self) -> EmbeddingParams {
        EmbeddingParams {
            m: self.embedding_m,
            tau: self.embedding_tau,
        }
    }

    pub fn indicator(&self) -> IndicatorConfig {
        IndicatorConfig {
            lambda: self.indicator_lambda,
            eta: self.indicator_eta,
            accumulate: self.indicator_accumulate,
        }
    }

    pub fn lambda(&self, kind: DetectorKind) -> f64 {
        match kind {
            DetectorKind::Cusum => self.cusum_lambda,
            DetectorKind::Pht => self.pht_lambda,
            DetectorKind::Adwin => self.adwin_lambda,
            DetectorKind::Udft => self.udft_lambda,
            DetectorKind::Crcdd => self.crcdd_lambda,
        }
    }

    pub fn set_lambda(&mut self, kind: DetectorKind, lambda: f64) {
        let slot = match kind {
            DetectorKind::Cusum => &mut self.cusum_lambda,
            DetectorKind::Pht => &mut self.pht_lambda,
            DetectorKind::Adwin => &mut self.adwin_lambda,
            DetectorKind::Udft => &mut self.udft_lambda,
            DetectorKind::Crcdd => &mut self.crcdd_lambda,
        };
        *slot = lambda;
    }

    pub fn detector(&self, kind: DetectorKind) -> DetectorConfig {
        DetectorConfig {
            kind,
            lambda: self.lambda(kind),
            window_n: self.window_n,
            embedding: self.embedding(),
            negative_mode: self.cusum_negative,
            adwin_stride: self.adwin_stride,
            crcdd_polarity: self.crcdd_polarity,
            dft_denominator: self.udft_denominator,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_n == 0 {
            return Err(invalid("window_n must be at least 1"));
        }
        self.embedding().validate()?;
        self.indicator().validate()?;
        for kind in DetectorKind::ALL {
            self.detector(kind).validate()?;
        }
        Ok(())
    }
}
