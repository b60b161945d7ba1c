//! Memory experiments: noisy cycles, decoding, logical readout.

use serde::Serialize;

use crate::code::{CheckType, CssCode};
use crate::gf2::BitVec;
use crate::graph::ColoringStrategy;
use crate::noise::frame::{batch_rng, lane_bits, run_batch, sample_memory_batch, BatchFrame, LANES};
use crate::noise::{apply_noise_model, build_se_round, data_error_marginals, CircuitError, CzSchedule, NoisyCircuit};
use crate::par;

use super::osd::{bp_osd, DecodeError};
use super::spacetime::{build_spacetime_matrix, DecodingMatrix};
use super::sweep::{sweep_batch, SweepSchedule};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MemoryError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("code has no logical qubits")]
    NoLogicals,
}

/// How passive decisions are corrupted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptMode {
    /// Each apply/skip decision is inverted with probability `p`.
    Decision,
    /// Decisions are applied as computed.
    Off,
}

impl std::str::FromStr for CorruptMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "decision" => Ok(Self::Decision),
            "off" | "none" => Ok(Self::Off),
            other => Err(format!("unknown corrupt mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoderConfig {
    pub bp_iters: usize,
    pub osd_depth: usize,
    pub sweep_strategy: ColoringStrategy,
    pub corrupt_mode: CorruptMode,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            bp_iters: 1000,
            osd_depth: 5,
            sweep_strategy: ColoringStrategy::Sequential,
            corrupt_mode: CorruptMode::Decision,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryStats {
    pub code: String,
    pub p: f64,
    /// Rounds for global decoding, cycles for passive decoding.
    pub d_or_cycles: usize,
    pub shots: usize,
    pub failures: usize,
    pub bler: f64,
    pub stderr: f64,
    /// Per-cycle rate; only for passive runs.
    pub bler_per_cycle: Option<f64>,
    pub bler_per_cycle_stderr: Option<f64>,
    /// Single-logical-qubit rate `1 - (1 - bler)^(1/k)`.
    pub per_logical: f64,
    pub seed: u64,
}

impl MemoryStats {
    fn new(code: &CssCode, p: f64, d_or_cycles: usize, shots: usize, failures: usize, seed: u64) -> Self {
        let bler = if shots == 0 {
            0.0
        } else {
            failures as f64 / shots as f64
        };
        let stderr = if shots == 0 {
            0.0
        } else {
            (bler * (1.0 - bler) / shots as f64).sqrt()
        };
        Self {
            code: code.name.clone(),
            p,
            d_or_cycles,
            shots,
            failures,
            bler,
            stderr,
            bler_per_cycle: None,
            bler_per_cycle_stderr: None,
            per_logical: per_logical_rate(bler, code.k()),
            seed,
        }
    }
}

/// `1 - (1 - bler)^(1/k)`.
pub fn per_logical_rate(bler: f64, k: usize) -> f64 {
    if k == 0 {
        return bler;
    }
    1.0 - (1.0 - bler).powf(1.0 / k as f64)
}

/// `1 - (1 - bler)^(1/cycles)` and its first-order standard error.
pub fn per_cycle_rate(bler: f64, stderr: f64, cycles: usize) -> (f64, f64) {
    let c = cycles.max(1) as f64;
    let rate = 1.0 - (1.0 - bler).powf(1.0 / c);
    let slope = if bler < 1.0 {
        (1.0 - bler).powf(1.0 / c - 1.0) / c
    } else {
        0.0
    };
    (rate, stderr * slope)
}

fn noisy_round(code: &CssCode, p: f64) -> Result<NoisyCircuit, CircuitError> {
    apply_noise_model(&build_se_round(code, &CzSchedule::for_code(code)), p)
}

/// Lanes of a batch that are real shots.
fn lanes_in(batch: usize, shots: usize) -> usize {
    (shots - batch * LANES).min(LANES)
}

/// Per-check syndrome words of a Z-check matrix applied to per-qubit words.
fn syndrome_words(supports: &[Vec<usize>], data: &[u64]) -> Vec<u64> {
    supports
        .iter()
        .map(|s| s.iter().fold(0, |acc, &q| acc ^ data[q]))
        .collect()
}

fn logical_failure(code: &CssCode, residual: &BitVec) -> bool {
    (0..code.logical_z.rows()).any(|r| code.logical_z.row(r).dot(residual))
}

/// Decodes the final noiseless syndrome of one lane and reports a logical
/// failure of the residual.
fn final_readout(
    code: &CssCode,
    matrix: &DecodingMatrix,
    data: &[u64],
    lane: usize,
    cfg: &DecoderConfig,
) -> Result<bool, DecodeError> {
    let x = lane_bits(data, lane);
    let s = code.h_z.mul_vec(&x);
    if s.is_zero() {
        return Ok(logical_failure(code, &x));
    }
    let result = bp_osd(matrix, &s, cfg.bp_iters, cfg.osd_depth)?;
    Ok(logical_failure(
        code,
        &x.xor(&matrix.data_correction(&result.correction)),
    ))
}

/// Prepared global-decoding experiment, reusable across shot ranges.
pub struct GlobalExperiment<'a> {
    pub code: &'a CssCode,
    pub circuit: NoisyCircuit,
    pub matrix: DecodingMatrix,
    pub rounds: usize,
    pub p: f64,
    pub config: DecoderConfig,
}

impl<'a> GlobalExperiment<'a> {
    pub fn new(code: &'a CssCode, p: f64, rounds: usize, config: DecoderConfig) -> Result<Self, MemoryError> {
        if code.k() == 0 {
            return Err(MemoryError::NoLogicals);
        }
        let circuit = noisy_round(code, p)?;
        let mut matrix = build_spacetime_matrix(code, CheckType::Z, rounds);
        let (data_x, _) = data_error_marginals(&circuit);
        matrix.set_priors(&data_x, p);
        Ok(Self {
            code,
            circuit,
            matrix,
            rounds,
            p,
            config,
        })
    }

    /// Failures among the live lanes of batch `batch`.
    pub fn run_batch(&self, seed: u64, batch: usize, lanes: usize) -> Result<usize, DecodeError> {
        let code = self.code;
        let mx = self.circuit.x_checks;
        let mz = self.circuit.z_checks;
        let n = code.n();
        let mb = sample_memory_batch(&self.circuit, self.rounds, seed, batch);
        let data = &mb.frame.x[..n];
        let final_s = syndrome_words(&code.check_supports(CheckType::Z), data);
        // Detector words, block by block.
        let mut det = Vec::with_capacity((self.rounds + 1) * mz);
        let mut prev = vec![0u64; mz];
        for s in mb
            .rounds
            .iter()
            .map(|r| &r[mx..mx + mz])
            .chain(std::iter::once(&final_s[..]))
        {
            det.extend(s.iter().zip(&prev).map(|(a, b)| a ^ b));
            prev.copy_from_slice(s);
        }
        let mut failures = 0;
        for lane in 0..lanes {
            let x = lane_bits(data, lane);
            let d = lane_bits(&det, lane);
            let residual = if d.is_zero() {
                x
            } else {
                let r = bp_osd(&self.matrix, &d, self.config.bp_iters, self.config.osd_depth)?;
                x.xor(&self.matrix.data_correction(&r.correction))
            };
            debug_assert!(code.h_z.mul_vec(&residual).is_zero());
            failures += usize::from(logical_failure(code, &residual));
        }
        Ok(failures)
    }

    pub fn run(&self, shots: usize, seed: u64) -> Result<MemoryStats, DecodeError> {
        let batches = shots.div_ceil(LANES);
        let results = par::map_range(batches, |b| self.run_batch(seed, b, lanes_in(b, shots)));
        let mut failures = 0;
        for r in results {
            failures += r?;
        }
        Ok(MemoryStats::new(self.code, self.p, self.rounds, shots, failures, seed))
    }
}

/// `rounds` noisy cycles, then BP+OSD over all `rounds + 1` Z-syndromes.
/// Only X errors are decoded: they alone decide the Z-basis readout.
pub fn run_global_memory(
    code: &CssCode,
    p: f64,
    rounds: usize,
    shots: usize,
    seed: u64,
    config: &DecoderConfig,
) -> Result<MemoryStats, MemoryError> {
    let exp = GlobalExperiment::new(code, p, rounds, *config)?;
    Ok(exp.run(shots, seed)?)
}

/// Prepared passive-decoding experiment.
pub struct PassiveExperiment<'a> {
    pub code: &'a CssCode,
    pub circuit: NoisyCircuit,
    pub final_matrix: DecodingMatrix,
    pub z_schedule: SweepSchedule,
    pub x_schedule: SweepSchedule,
    z_qubit_checks: Vec<Vec<usize>>,
    x_qubit_checks: Vec<Vec<usize>>,
    pub cycles: usize,
    pub p: f64,
    pub config: DecoderConfig,
}

impl<'a> PassiveExperiment<'a> {
    pub fn new(code: &'a CssCode, p: f64, cycles: usize, config: DecoderConfig) -> Result<Self, MemoryError> {
        if code.k() == 0 {
            return Err(MemoryError::NoLogicals);
        }
        let circuit = noisy_round(code, p)?;
        let mut final_matrix = build_spacetime_matrix(code, CheckType::Z, 0);
        let (data_x, _) = data_error_marginals(&circuit);
        final_matrix.set_priors(&data_x, p);
        Ok(Self {
            code,
            circuit,
            final_matrix,
            z_schedule: SweepSchedule::from_coloring(code, CheckType::Z, config.sweep_strategy, 0),
            x_schedule: SweepSchedule::from_coloring(code, CheckType::X, config.sweep_strategy, 0),
            z_qubit_checks: code.qubit_checks(CheckType::Z),
            x_qubit_checks: code.qubit_checks(CheckType::X),
            cycles,
            p,
            config,
        })
    }

    fn corrupt_p(&self) -> f64 {
        match self.config.corrupt_mode {
            CorruptMode::Decision => self.p,
            CorruptMode::Off => 0.0,
        }
    }

    /// Runs the cycles of one batch and returns the final data frame.
    pub fn evolve_batch(&self, seed: u64, batch: usize) -> BatchFrame {
        let n = self.code.n();
        let mx = self.circuit.x_checks;
        let mz = self.circuit.z_checks;
        let mut rng = batch_rng(seed, batch);
        let mut frame = BatchFrame::zeros(self.circuit.num_qubits());
        let mut record = Vec::with_capacity(self.circuit.num_measurements());
        let corrupt = self.corrupt_p();
        for _ in 0..self.cycles {
            record.clear();
            run_batch(&self.circuit, &mut frame, &mut rng, &mut record);
            let mut sz = record[mx..mx + mz].to_vec();
            sweep_batch(
                &self.z_qubit_checks,
                &self.z_schedule,
                &mut sz,
                &mut frame.x[..n],
                corrupt,
                &mut rng,
            );
            let mut sx = record[..mx].to_vec();
            sweep_batch(
                &self.x_qubit_checks,
                &self.x_schedule,
                &mut sx,
                &mut frame.z[..n],
                corrupt,
                &mut rng,
            );
        }
        frame
    }

    pub fn run_batch(&self, seed: u64, batch: usize, lanes: usize) -> Result<usize, DecodeError> {
        let frame = self.evolve_batch(seed, batch);
        let data = &frame.x[..self.code.n()];
        let mut failures = 0;
        for lane in 0..lanes {
            failures += usize::from(final_readout(self.code, &self.final_matrix, data, lane, &self.config)?);
        }
        Ok(failures)
    }

    pub fn run(&self, shots: usize, seed: u64) -> Result<MemoryStats, DecodeError> {
        let batches = shots.div_ceil(LANES);
        let results = par::map_range(batches, |b| self.run_batch(seed, b, lanes_in(b, shots)));
        let mut failures = 0;
        for r in results {
            failures += r?;
        }
        let mut stats = MemoryStats::new(self.code, self.p, self.cycles, shots, failures, seed);
        let (rate, err) = per_cycle_rate(stats.bler, stats.stderr, self.cycles);
        stats.bler_per_cycle = Some(rate);
        stats.bler_per_cycle_stderr = Some(err);
        Ok(stats)
    }
}

/// `cycles` noisy cycles, each followed by one greedy sweep per check
/// type, then BP+OSD on the final noiseless Z-syndrome.
pub fn run_passive_memory(
    code: &CssCode,
    p: f64,
    cycles: usize,
    shots: usize,
    seed: u64,
    config: &DecoderConfig,
) -> Result<MemoryStats, MemoryError> {
    let exp = PassiveExperiment::new(code, p, cycles, *config)?;
    Ok(exp.run(shots, seed)?)
}
