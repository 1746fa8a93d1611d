//! Phase-noise, extinction and visibility model of the optical setup.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};

pub const SIGMA_RING_DEG: f64 = 2.74;
pub const SIGMA_LO_DEG: f64 = 3.94;
pub const REJECT_DEG: f64 = 7.5;
pub const EXTINCTION_DB: f64 = 28.0;
pub const DEFAULT_RETRY_BUDGET: usize = 1000;

/// Converts a power extinction ratio in dB to an amplitude floor.
pub fn extinction_floor(db: f64) -> f64 {
    10f64.powf(-db / 20.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    /// Standard deviation of the ring phase error, radians.
    pub sigma_ring: f64,
    /// Standard deviation of the local-oscillator phase error, radians.
    pub sigma_lo: f64,
    /// Draws with either |phase| above this are discarded and redrawn, radians.
    pub reject_threshold: f64,
    /// Residual amplitude, relative to full scale, on nominally dark pulses.
    pub extinction_floor: f64,
    /// Amplitude factor applied per ring round trip.
    pub visibility: f64,
    /// Redraws allowed per measurement before giving up.
    pub retry_budget: usize,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            sigma_ring: SIGMA_RING_DEG.to_radians(),
            sigma_lo: SIGMA_LO_DEG.to_radians(),
            reject_threshold: REJECT_DEG.to_radians(),
            extinction_floor: extinction_floor(EXTINCTION_DB),
            visibility: 1.0,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            sigma_ring: 0.0,
            sigma_lo: 0.0,
            extinction_floor: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(format!("noise model: {what}")));
        if !(self.sigma_ring >= 0.0 && self.sigma_lo >= 0.0) {
            return bad("phase deviations must be non-negative");
        }
        if !(self.reject_threshold > 0.0) {
            return bad("rejection threshold must be positive");
        }
        if !(0.0..1.0).contains(&self.extinction_floor) {
            return bad("extinction floor must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return bad("visibility must lie in [0, 1]");
        }
        if self.retry_budget == 0 {
            return bad("retry budget must be positive");
        }
        Ok(())
    }

    /// Draws (phi_ring, phi_lo), redrawing rejected pairs. Returns the
    /// accepted pair and the number of rejected draws.
    pub fn draw_phases<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, f64, usize)> {
        if self.sigma_ring == 0.0 && self.sigma_lo == 0.0 {
            return Ok((0.0, 0.0, 0));
        }
        let ring = Normal::new(0.0, self.sigma_ring).expect("validated deviation");
        let lo = Normal::new(0.0, self.sigma_lo).expect("validated deviation");
        for rejected in 0..self.retry_budget {
            let (r, l) = (ring.sample(rng), lo.sample(rng));
            if r.abs() <= self.reject_threshold && l.abs() <= self.reject_threshold {
                return Ok((r, l, rejected));
            }
        }
        Err(Error::RetryBudget(self.retry_budget))
    }
}
