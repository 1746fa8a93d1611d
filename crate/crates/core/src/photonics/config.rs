//! Simulation settings and their `key = value` text form.

use serde::Serialize;

use super::encoding::{ConvolutionKernel, SubspacePlan};
use super::noise::{extinction_floor, NoiseModel};
use crate::contextuality::DEFAULT_REFUTATION_SIGMAS;
use crate::error::{Error, Result};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_SEED: u64 = 7;

/// Lock-measure cycle of the stabilization loop. Recorded as metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunMetadata {
    pub pulse_rate_hz: f64,
    pub bin_width_s: f64,
    pub carrier_scale: f64,
    pub cycle_rate_hz: f64,
    pub lock_period_s: f64,
    pub measure_period_s: f64,
}

impl Default for RunMetadata {
    fn default() -> Self {
        Self {
            pulse_rate_hz: super::PULSE_RATE_HZ,
            bin_width_s: super::BIN_WIDTH_S,
            carrier_scale: super::ALPHA_TILDE,
            cycle_rate_hz: 10e3,
            lock_period_s: 98.5e-6,
            measure_period_s: 1.5e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub noise: NoiseModel,
    pub kernel: ConvolutionKernel,
    pub plan: SubspacePlan,
    pub trials: usize,
    pub seed: u64,
    /// Standard errors by which the total must exceed the corrected bound.
    pub refutation_sigmas: f64,
    pub metadata: RunMetadata,
}

impl Default for SimConfig {
    fn default() -> Self {
        let kernel = ConvolutionKernel::calibrated();
        let plan = SubspacePlan::default_for(&kernel).expect("default plan fits the calibrated kernel");
        Self {
            noise: NoiseModel::default(),
            kernel,
            plan,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            refutation_sigmas: DEFAULT_REFUTATION_SIGMAS,
            metadata: RunMetadata::default(),
        }
    }
}

impl SimConfig {
    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    ///
    /// Keys: sigma_ring_deg, sigma_lo_deg, reject_deg, extinction_db,
    /// visibility, trials, seed, block_sizes, kernel, refutation_sigmas,
    /// retry_budget. Lists are comma separated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut sizes: Option<Vec<usize>> = None;
        let mut kernel: Option<Vec<f64>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let err = |message: String| Error::Parse { line, message };
            let float = || {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(format!("{key}: `{value}` is not a number")))
            };
            let integer = || {
                value
                    .parse::<u64>()
                    .map_err(|_| err(format!("{key}: `{value}` is not a non-negative integer")))
            };
            match key {
                "sigma_ring_deg" => cfg.noise.sigma_ring = float()?.to_radians(),
                "sigma_lo_deg" => cfg.noise.sigma_lo = float()?.to_radians(),
                "reject_deg" => cfg.noise.reject_threshold = float()?.to_radians(),
                "extinction_db" => cfg.noise.extinction_floor = extinction_floor(float()?),
                "visibility" => cfg.noise.visibility = float()?,
                "retry_budget" => cfg.noise.retry_budget = integer()? as usize,
                "trials" => cfg.trials = integer()? as usize,
                "seed" => cfg.seed = integer()?,
                "refutation_sigmas" => cfg.refutation_sigmas = float()?,
                "block_sizes" => {
                    let parsed = value
                        .split(',')
                        .map(|s| s.trim().parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| err(format!("block_sizes: `{value}` is not a list of integers")))?;
                    sizes = Some(parsed);
                }
                "kernel" => {
                    let parsed = value
                        .split(',')
                        .map(|s| s.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| err(format!("kernel: `{value}` is not a list of numbers")))?;
                    kernel = Some(parsed);
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        if let Some(k) = kernel {
            cfg.kernel = ConvolutionKernel::new(k)?;
        }
        // The block sizes fix the dimension; the campaign checks it against the rays.
        let sizes = sizes.unwrap_or_else(|| cfg.plan.sizes().to_vec());
        let dimension = sizes.iter().sum();
        cfg.plan = SubspacePlan::new(sizes, dimension, &cfg.kernel)?;
        cfg.noise.validate()?;
        if !(cfg.refutation_sigmas >= 0.0) {
            return Err(Error::Invalid("refutation_sigmas must be non-negative".into()));
        }
        Ok(cfg)
    }

    /// The settings in the same text form accepted by [`SimConfig::parse`].
    pub fn to_text(&self) -> String {
        let join = |xs: Vec<String>| xs.join(", ");
        let db = -20.0 * self.noise.extinction_floor.log10();
        format!(
            "sigma_ring_deg = {}\nsigma_lo_deg = {}\nreject_deg = {}\nextinction_db = {}\n\
             visibility = {}\nretry_budget = {}\ntrials = {}\nseed = {}\nrefutation_sigmas = {}\n\
             block_sizes = {}\nkernel = {}\n",
            self.noise.sigma_ring.to_degrees(),
            self.noise.sigma_lo.to_degrees(),
            self.noise.reject_threshold.to_degrees(),
            if db.is_finite() { db } else { 1e3 },
            self.noise.visibility,
            self.noise.retry_budget,
            self.trials,
            self.seed,
            self.refutation_sigmas,
            join(self.plan.sizes().iter().map(|s| s.to_string()).collect()),
            join(self.kernel.coefficients().iter().map(|c| c.to_string()).collect()),
        )
    }
}
