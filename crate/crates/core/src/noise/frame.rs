//! Bit-sliced Pauli-frame sampling: each `u64` carries 64 independent shots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::CssCode;
use crate::gf2::BitVec;

use super::circuit::{NoisyCircuit, Op};

pub const LANES: usize = 64;

/// RNG for batch `batch` of a run; independent of how batches are spread
/// over workers.
pub fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// X and Z error components of a single shot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliFrame {
    pub x: BitVec,
    pub z: BitVec,
}

/// 64 Pauli frames side by side; bit `l` of word `q` is lane `l` on qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchFrame {
    pub x: Vec<u64>,
    pub z: Vec<u64>,
}

impl BatchFrame {
    pub fn zeros(qubits: usize) -> Self {
        Self {
            x: vec![0; qubits],
            z: vec![0; qubits],
        }
    }

    pub fn qubits(&self) -> usize {
        self.x.len()
    }

    pub fn lane(&self, lane: usize) -> PauliFrame {
        PauliFrame {
            x: lane_bits(&self.x, lane),
            z: lane_bits(&self.z, lane),
        }
    }

    pub fn set_lane(&mut self, lane: usize, frame: &PauliFrame) {
        let bit = 1u64 << lane;
        for q in 0..self.qubits() {
            self.x[q] = (self.x[q] & !bit) | (u64::from(frame.x.get(q)) << lane);
            self.z[q] = (self.z[q] & !bit) | (u64::from(frame.z.get(q)) << lane);
        }
    }
}

/// Bit `lane` of every word.
pub fn lane_bits(words: &[u64], lane: usize) -> BitVec {
    let mut v = BitVec::zeros(words.len());
    for (i, w) in words.iter().enumerate() {
        if w >> lane & 1 == 1 {
            v.set(i, true);
        }
    }
    v
}

/// Skip lengths between successes of independent Bernoulli(p) trials.
struct Geometric {
    log_q: f64,
}

impl Geometric {
    fn new(p: f64) -> Self {
        Self { log_q: (1.0 - p).ln() }
    }

    fn skip(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let s = (1.0 - u).ln() / self.log_q;
        if s >= usize::MAX as f64 {
            usize::MAX
        } else {
            s as usize
        }
    }
}

/// Calls `hit(slot)` for each of `slots` Bernoulli(p) trials that succeed.
pub(crate) fn for_each_hit(slots: usize, p: f64, rng: &mut impl Rng, mut hit: impl FnMut(usize)) {
    if p <= 0.0 || slots == 0 {
        return;
    }
    let geo = Geometric::new(p.min(1.0));
    let mut pos = geo.skip(rng);
    while pos < slots {
        hit(pos);
        pos = pos.saturating_add(1).saturating_add(geo.skip(rng));
    }
}

fn apply_noise(op: &Op, frame: &mut BatchFrame, rng: &mut ChaCha8Rng) {
    match op {
        Op::Depolarize1 { targets, p } => {
            let mut hits = Vec::new();
            for_each_hit(targets.len() * LANES, *p, rng, |slot| hits.push(slot));
            for slot in hits {
                let k = rng.random_range(1..4u32);
                let q = targets[slot / LANES] as usize;
                let bit = 1u64 << (slot % LANES);
                if k & 1 == 1 {
                    frame.x[q] ^= bit;
                }
                if k & 2 == 2 {
                    frame.z[q] ^= bit;
                }
            }
        }
        Op::Depolarize2 { pairs, p } => {
            let mut hits = Vec::new();
            for_each_hit(pairs.len() * LANES, *p, rng, |slot| hits.push(slot));
            for slot in hits {
                // k in 1..16 enumerates the 15 non-identity two-qubit Paulis;
                // low two bits act on the first qubit.
                let k = rng.random_range(1..16u32);
                let (a, b) = pairs[slot / LANES];
                let bit = 1u64 << (slot % LANES);
                for (q, pk) in [(a as usize, k & 3), (b as usize, k >> 2)] {
                    if pk & 1 == 1 {
                        frame.x[q] ^= bit;
                    }
                    if pk & 2 == 2 {
                        frame.z[q] ^= bit;
                    }
                }
            }
        }
        Op::XError { targets, p } => {
            let mut hits = Vec::new();
            for_each_hit(targets.len() * LANES, *p, rng, |slot| hits.push(slot));
            for slot in hits {
                frame.x[targets[slot / LANES] as usize] ^= 1u64 << (slot % LANES);
            }
        }
        _ => {}
    }
}

/// Applies a noiseless Clifford, reset or measurement op. Measurement
/// outcomes (flip-free) are appended to `record`.
fn apply_gate(op: &Op, frame: &mut BatchFrame, record: &mut Vec<u64>) {
    match op {
        Op::Reset(t) => {
            for &q in t {
                frame.x[q as usize] = 0;
                frame.z[q as usize] = 0;
            }
        }
        Op::H(t) => {
            for &q in t {
                let q = q as usize;
                std::mem::swap(&mut frame.x[q], &mut frame.z[q]);
            }
        }
        Op::Cz(pairs) => {
            for &(a, b) in pairs {
                let (a, b) = (a as usize, b as usize);
                frame.z[a] ^= frame.x[b];
                frame.z[b] ^= frame.x[a];
            }
        }
        Op::Cx(pairs) => {
            for &(c, t) in pairs {
                let (c, t) = (c as usize, t as usize);
                frame.x[t] ^= frame.x[c];
                frame.z[c] ^= frame.z[t];
            }
        }
        Op::Measure { targets, .. } => {
            record.extend(targets.iter().map(|&q| frame.x[q as usize]));
        }
        _ => {}
    }
}

/// Runs one pass of `circuit` on 64 shots, appending measurement words.
pub fn run_batch(circuit: &NoisyCircuit, frame: &mut BatchFrame, rng: &mut ChaCha8Rng, record: &mut Vec<u64>) {
    for op in &circuit.ops {
        match op {
            Op::Measure { targets, flip } => {
                let start = record.len();
                apply_gate(op, frame, record);
                let mut hits = Vec::new();
                for_each_hit(targets.len() * LANES, *flip, rng, |slot| hits.push(slot));
                for slot in hits {
                    record[start + slot / LANES] ^= 1u64 << (slot % LANES);
                }
            }
            Op::Depolarize1 { .. } | Op::Depolarize2 { .. } | Op::XError { .. } => apply_noise(op, frame, rng),
            Op::Tick => {}
            gate => apply_gate(gate, frame, record),
        }
    }
}

/// Per-shot outcome of a memory experiment: noiseless codespace
/// preparation, `rounds` noisy cycles, then noiseless transversal
/// Z-measurement of the data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub x_syndromes: Vec<BitVec>,
    pub z_syndromes: Vec<BitVec>,
    /// Data outcomes relative to the noiseless reference (1 = flipped).
    pub final_data: BitVec,
    pub frame: PauliFrame,
    pub seed: u64,
}

impl ExperimentRecord {
    /// Noiseless Z-syndrome inferred from the data outcomes.
    pub fn final_z_syndrome(&self, code: &CssCode) -> BitVec {
        code.h_z.mul_vec(&self.final_data)
    }
}

/// Measurement words of a 64-shot memory experiment.
#[derive(Debug, Clone)]
pub struct MemoryBatch {
    /// Per round, one word per measurement (X-checks first).
    pub rounds: Vec<Vec<u64>>,
    pub frame: BatchFrame,
}

impl MemoryBatch {
    pub fn record(&self, circuit: &NoisyCircuit, lane: usize, seed: u64) -> ExperimentRecord {
        let mx = circuit.x_checks;
        let mz = circuit.z_checks;
        let frame = self.frame.lane(lane);
        ExperimentRecord {
            x_syndromes: self.rounds.iter().map(|r| lane_bits(&r[..mx], lane)).collect(),
            z_syndromes: self.rounds.iter().map(|r| lane_bits(&r[mx..mx + mz], lane)).collect(),
            final_data: lane_bits(&self.frame.x[..circuit.num_data], lane),
            frame,
            seed,
        }
    }
}

/// Samples batch `batch` of a memory experiment.
pub fn sample_memory_batch(circuit: &NoisyCircuit, rounds: usize, seed: u64, batch: usize) -> MemoryBatch {
    let mut rng = batch_rng(seed, batch);
    let mut frame = BatchFrame::zeros(circuit.num_qubits());
    let mut out = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let mut record = Vec::with_capacity(circuit.num_measurements());
        run_batch(circuit, &mut frame, &mut rng, &mut record);
        out.push(record);
    }
    MemoryBatch { rounds: out, frame }
}

/// One shot of a memory experiment, replayable from `(seed, shot)`.
pub fn sample_shot(circuit: &NoisyCircuit, rounds: usize, seed: u64, shot: usize) -> ExperimentRecord {
    sample_memory_batch(circuit, rounds, seed, shot / LANES).record(circuit, shot % LANES, seed)
}

/// A single fault: Pauli components injected right after op `after_op`,
/// or a flip of the `flip`-th outcome of the measurement op `after_op`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fault {
    pub after_op: usize,
    /// `(qubit, x, z)` components.
    pub paulis: Vec<(u32, bool, bool)>,
    pub flip: Option<usize>,
    pub prob: f64,
    /// Faults sharing a site are mutually exclusive.
    pub site: usize,
}

/// Every elementary fault of the annotated circuit with its probability.
pub fn enumerate_faults(circuit: &NoisyCircuit) -> Vec<Fault> {
    let mut out = Vec::new();
    let mut site = 0;
    let paulis1 = [(true, false), (false, true), (true, true)];
    for (i, op) in circuit.ops.iter().enumerate() {
        match op {
            Op::Depolarize1 { targets, p } if *p > 0.0 => {
                for &q in targets {
                    for (x, z) in paulis1 {
                        out.push(Fault {
                            after_op: i,
                            paulis: vec![(q, x, z)],
                            flip: None,
                            prob: p / 3.0,
                            site,
                        });
                    }
                    site += 1;
                }
            }
            Op::Depolarize2 { pairs, p } if *p > 0.0 => {
                for &(a, b) in pairs {
                    for k in 1..16u32 {
                        let (ka, kb) = (k & 3, k >> 2);
                        let mut paulis = Vec::new();
                        if ka != 0 {
                            paulis.push((a, ka & 1 == 1, ka & 2 == 2));
                        }
                        if kb != 0 {
                            paulis.push((b, kb & 1 == 1, kb & 2 == 2));
                        }
                        out.push(Fault {
                            after_op: i,
                            paulis,
                            flip: None,
                            prob: p / 15.0,
                            site,
                        });
                    }
                    site += 1;
                }
            }
            Op::XError { targets, p } if *p > 0.0 => {
                for &q in targets {
                    out.push(Fault {
                        after_op: i,
                        paulis: vec![(q, true, false)],
                        flip: None,
                        prob: *p,
                        site,
                    });
                    site += 1;
                }
            }
            Op::Measure { targets, flip } if *flip > 0.0 => {
                for k in 0..targets.len() {
                    out.push(Fault {
                        after_op: i,
                        paulis: Vec::new(),
                        flip: Some(k),
                        prob: *flip,
                        site,
                    });
                    site += 1;
                }
            }
            _ => {}
        }
    }
    out
}

/// Noiseless run of one circuit pass where lane `l` carries the faults
/// `lanes[l]` (at most 64 lanes). Starts from `frame`.
pub fn run_with_faults(circuit: &NoisyCircuit, frame: &mut BatchFrame, lanes: &[Vec<&Fault>], record: &mut Vec<u64>) {
    assert!(lanes.len() <= LANES);
    let mut by_op: Vec<Vec<(usize, &Fault)>> = vec![Vec::new(); circuit.ops.len()];
    for (l, faults) in lanes.iter().enumerate() {
        for f in faults {
            by_op[f.after_op].push((l, f));
        }
    }
    for (i, op) in circuit.ops.iter().enumerate() {
        let start = record.len();
        apply_gate(op, frame, record);
        for &(l, f) in &by_op[i] {
            let bit = 1u64 << l;
            for &(q, x, z) in &f.paulis {
                if x {
                    frame.x[q as usize] ^= bit;
                }
                if z {
                    frame.z[q as usize] ^= bit;
                }
            }
            if let Some(k) = f.flip {
                record[start + k] ^= bit;
            }
        }
    }
}

/// Per-data-qubit probability that the faults of one pass leave an odd
/// number of X (`.0`) and Z (`.1`) flips on it, treating distinct sites as
/// independent.
pub fn data_error_marginals(circuit: &NoisyCircuit) -> (Vec<f64>, Vec<f64>) {
    let n = circuit.num_data;
    let faults = enumerate_faults(circuit);
    // Per site, accumulated probability of flipping each data qubit.
    let mut log_x = vec![0f64; n];
    let mut log_z = vec![0f64; n];
    let mut site_x: Vec<(usize, f64)> = Vec::new();
    let mut site_z: Vec<(usize, f64)> = Vec::new();
    let mut current_site = usize::MAX;
    let flush = |sx: &mut Vec<(usize, f64)>, acc: &mut Vec<f64>| {
        sx.sort_unstable_by_key(|e| e.0);
        let mut i = 0;
        while i < sx.len() {
            let q = sx[i].0;
            let mut total = 0.0;
            while i < sx.len() && sx[i].0 == q {
                total += sx[i].1;
                i += 1;
            }
            acc[q] += (1.0 - 2.0 * total).abs().max(f64::MIN_POSITIVE).ln();
        }
        sx.clear();
    };
    for chunk in faults.chunks(LANES) {
        let lanes: Vec<Vec<&Fault>> = chunk.iter().map(|f| vec![f]).collect();
        let mut frame = BatchFrame::zeros(circuit.num_qubits());
        let mut record = Vec::new();
        run_with_faults(circuit, &mut frame, &lanes, &mut record);
        for (l, f) in chunk.iter().enumerate() {
            if f.site != current_site {
                flush(&mut site_x, &mut log_x);
                flush(&mut site_z, &mut log_z);
                current_site = f.site;
            }
            for q in 0..n {
                if frame.x[q] >> l & 1 == 1 {
                    site_x.push((q, f.prob));
                }
                if frame.z[q] >> l & 1 == 1 {
                    site_z.push((q, f.prob));
                }
            }
        }
    }
    flush(&mut site_x, &mut log_x);
    flush(&mut site_z, &mut log_z);
    let to_prob = |acc: Vec<f64>| acc.into_iter().map(|s| (1.0 - s.exp()) / 2.0).collect();
    (to_prob(log_x), to_prob(log_z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_hits_are_binomial() {
        let mut rng = batch_rng(7, 0);
        let p = 0.01;
        let slots = 1_000_000;
        let mut count = 0usize;
        for_each_hit(slots, p, &mut rng, |_| count += 1);
        let mean = p * slots as f64;
        let sd = (mean * (1.0 - p)).sqrt();
        assert!((count as f64 - mean).abs() < 4.0 * sd, "{count}");
    }

    #[test]
    fn certain_and_impossible_noise() {
        let mut rng = batch_rng(1, 0);
        let mut count = 0;
        for_each_hit(100, 1.0, &mut rng, |_| count += 1);
        assert_eq!(count, 100);
        for_each_hit(100, 0.0, &mut rng, |_| count += 1);
        assert_eq!(count, 100);
    }

    #[test]
    fn lane_round_trip() {
        let mut f = BatchFrame::zeros(5);
        let pf = PauliFrame {
            x: BitVec::from_support(5, &[1, 4]),
            z: BitVec::from_support(5, &[0]),
        };
        f.set_lane(9, &pf);
        assert_eq!(f.lane(9), pf);
        assert!(f.lane(8).x.is_zero());
    }
}
