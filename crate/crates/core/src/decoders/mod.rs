//! Global BP+OSD decoding over space-time graphs and passive greedy
//! decoding.

pub mod bp;
pub mod glauber;
pub mod memory;
pub mod osd;
pub mod spacetime;
pub mod sweep;

pub use bp::{bp_min_sum, min_sum_posteriors, DecodeResult};
pub use glauber::{flip_delta, glauber_flip_probability, glauber_step, GlauberState};
pub use memory::{
    per_cycle_rate, per_logical_rate, run_global_memory, run_passive_memory, CorruptMode, DecoderConfig,
    GlobalExperiment, MemoryError, MemoryStats, PassiveExperiment,
};
pub use osd::{bp_osd, osd_combination_sweep, prior_weight, DecodeError};
pub use spacetime::{build_spacetime_matrix, detectors, DecodingMatrix, Variable};
pub use sweep::{greedy_flip_sweep, majority_decision, sweep_batch, SweepError, SweepSchedule};
