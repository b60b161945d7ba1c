//! Local greedy flip sweeps over a coloring of the data qubits.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::code::{CheckType, CssCode};
use crate::gf2::BitVec;
use crate::graph::{greedy_coloring, qubit_adjacency, ColoringStrategy};
use crate::noise::frame::{for_each_hit, LANES};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("qubits {0} and {1} share a check but have the same color")]
    Conflict(usize, usize),
    #[error("qubit {0} is missing from the schedule")]
    Missing(usize),
    #[error("qubit degree {0} exceeds the supported maximum of 15")]
    Degree(usize),
}

/// Qubits grouped into colors so that no two qubits of a color share a
/// check of the swept type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSchedule {
    pub side: CheckType,
    pub colors: Vec<Vec<usize>>,
}

impl SweepSchedule {
    pub fn from_coloring(code: &CssCode, side: CheckType, strategy: ColoringStrategy, seed: u64) -> Self {
        let g = qubit_adjacency(code, side);
        let colors = greedy_coloring(&g, strategy, seed).classes();
        Self { side, colors }
    }

    pub fn validate(&self, code: &CssCode) -> Result<(), SweepError> {
        let checks = code.qubit_checks(self.side);
        let mut seen = vec![false; code.n()];
        for color in &self.colors {
            let mut owner = vec![usize::MAX; code.checks(self.side).rows()];
            for &q in color {
                seen[q] = true;
                for &c in &checks[q] {
                    if owner[c] != usize::MAX {
                        return Err(SweepError::Conflict(owner[c], q));
                    }
                    owner[c] = q;
                }
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(q) => Err(SweepError::Missing(q)),
            None => Ok(()),
        }
    }
}

/// Majority rule on the checks around one qubit: `Some(flip)`, or `None`
/// on an exact tie.
pub fn majority_decision(unsatisfied: usize, degree: usize) -> Option<bool> {
    match (2 * unsatisfied).cmp(&degree) {
        std::cmp::Ordering::Greater => Some(true),
        std::cmp::Ordering::Less => Some(false),
        std::cmp::Ordering::Equal => None,
    }
}

/// One sweep on 64 shots at once. `syndrome[c]` and `errors[q]` hold one
/// lane per bit; decisions flip `errors` and update `syndrome` after each
/// color. Returns the per-qubit flip words.
pub fn sweep_batch(
    qubit_checks: &[Vec<usize>],
    schedule: &SweepSchedule,
    syndrome: &mut [u64],
    errors: &mut [u64],
    corrupt_p: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<u64> {
    let mut applied = vec![0u64; errors.len()];
    for color in &schedule.colors {
        let mut decisions = vec![0u64; color.len()];
        for (i, &q) in color.iter().enumerate() {
            let checks = &qubit_checks[q];
            let deg = checks.len();
            assert!(deg <= 15, "qubit degree {deg} unsupported");
            // Bit-sliced count of unsatisfied checks.
            let mut planes = [0u64; 4];
            for &c in checks {
                let mut carry = syndrome[c];
                for p in planes.iter_mut() {
                    let next = *p & carry;
                    *p ^= carry;
                    carry = next;
                }
            }
            let mut flip = 0u64;
            for v in 0..=deg {
                let eq = (0..4).fold(!0u64, |acc, b| {
                    acc & if v >> b & 1 == 1 { planes[b] } else { !planes[b] }
                });
                match majority_decision(v, deg) {
                    Some(true) => flip |= eq,
                    Some(false) => {}
                    None => flip |= eq & rng.random::<u64>(),
                }
            }
            decisions[i] = flip;
        }
        if corrupt_p > 0.0 {
            for_each_hit(color.len() * LANES, corrupt_p, rng, |slot| {
                decisions[slot / LANES] ^= 1u64 << (slot % LANES);
            });
        }
        for (i, &q) in color.iter().enumerate() {
            let d = decisions[i];
            if d == 0 {
                continue;
            }
            errors[q] ^= d;
            applied[q] ^= d;
            for &c in &qubit_checks[q] {
                syndrome[c] ^= d;
            }
        }
    }
    applied
}

/// Single-shot sweep: updates `syndrome` in place and returns the applied
/// correction.
pub fn greedy_flip_sweep(
    code: &CssCode,
    syndrome: &mut BitVec,
    schedule: &SweepSchedule,
    corrupt_p: f64,
    rng: &mut ChaCha8Rng,
) -> BitVec {
    let qubit_checks = code.qubit_checks(schedule.side);
    let mut s: Vec<u64> = (0..syndrome.len()).map(|c| u64::from(syndrome.get(c))).collect();
    let mut e = vec![0u64; code.n()];
    let applied = sweep_batch(&qubit_checks, schedule, &mut s, &mut e, corrupt_p, rng);
    for (c, w) in s.iter().enumerate() {
        syndrome.set(c, w & 1 == 1);
    }
    BitVec::from_bools(&applied.iter().map(|w| w & 1 == 1).collect::<Vec<_>>())
}
