//! Heat-bath (Glauber) dynamics on the check-violation energy.

use rand::Rng;

use crate::gf2::{BitMatrix, BitVec};

/// Error configuration with its syndrome kept in sync.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlauberState {
    pub error: BitVec,
    pub syndrome: BitVec,
}

impl GlauberState {
    pub fn new(checks: &BitMatrix, error: BitVec) -> Self {
        let syndrome = checks.mul_vec(&error);
        Self { error, syndrome }
    }

    /// Number of unsatisfied checks.
    pub fn energy(&self) -> usize {
        self.syndrome.weight()
    }
}

/// `1 / (1 + exp(beta * delta))`, with the zero-temperature limit and
/// zero-energy moves handled exactly.
pub fn glauber_flip_probability(delta: i64, beta: f64) -> f64 {
    if delta == 0 || beta == 0.0 {
        return 0.5;
    }
    if beta.is_infinite() {
        return if delta < 0 { 1.0 } else { 0.0 };
    }
    1.0 / (1.0 + (beta * delta as f64).exp())
}

/// Energy change from flipping `qubit`.
pub fn flip_delta(state: &GlauberState, qubit_checks: &[usize]) -> i64 {
    qubit_checks
        .iter()
        .map(|&c| if state.syndrome.get(c) { -1 } else { 1 })
        .sum()
}

/// Picks a uniform qubit and flips it with the Glauber probability.
/// Returns the qubit and whether it flipped.
pub fn glauber_step(
    qubit_checks: &[Vec<usize>],
    state: &mut GlauberState,
    beta: f64,
    rng: &mut impl Rng,
) -> (usize, bool) {
    assert!(beta >= 0.0, "beta must be non-negative");
    let q = rng.random_range(0..qubit_checks.len());
    let p = glauber_flip_probability(flip_delta(state, &qubit_checks[q]), beta);
    let flip = rng.random::<f64>() < p;
    if flip {
        state.error.flip(q);
        for &c in &qubit_checks[q] {
            state.syndrome.flip(c);
        }
    }
    (q, flip)
}
