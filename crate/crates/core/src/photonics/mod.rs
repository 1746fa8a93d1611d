//! Time-bin encoding of real vectors, the fiber-ring inner-product
//! measurement and the noisy prepare-and-measure campaign.

pub mod config;
pub mod encoding;
pub mod experiment;
pub mod noise;
pub mod ring;

pub use config::{RunMetadata, SimConfig, DEFAULT_SEED, DEFAULT_TRIALS};
pub use encoding::{
    encode_state, modulation_plan, sort_basis, ConvolutionKernel, PulseTrain, SortedBlock, SubspacePlan,
    CALIBRATED_TERMS, KERNEL_DECAY, MEASURED_KERNEL,
};
pub use experiment::{
    complete_context_basis, ideal_distributions, run_experiment, run_projection, DrawStats, ExperimentOutcome,
    TrialTrace,
};
pub use noise::{extinction_floor, NoiseModel};
pub use ring::{homodyne_read, phase_error_readout, phase_readout_forward, ring_convolve, HomodyneRecord};

/// Coherent displacement of a unit-amplitude pulse.
pub const ALPHA_TILDE: f64 = 1.014e4;
/// Repetition rate of the pulsed source.
pub const PULSE_RATE_HZ: f64 = 75.91e6;
/// One time bin spans three pulse periods.
pub const BIN_WIDTH_S: f64 = 3.0 / PULSE_RATE_HZ;
