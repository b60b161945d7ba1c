//! Noisy syndrome-extraction circuits and Pauli-frame Monte Carlo.

pub mod circuit;
pub mod frame;
pub mod hook;

pub use circuit::{apply_noise_model, build_se_round, noise_site_counts, CircuitError, CzSchedule, NoisyCircuit, Op};
pub use frame::{
    batch_rng, data_error_marginals, enumerate_faults, run_batch, run_with_faults, sample_memory_batch, sample_shot,
    BatchFrame, ExperimentRecord, Fault, MemoryBatch, PauliFrame, LANES,
};
pub use hook::{enumerate_hook_errors, reduce_by_checks, HookError};
