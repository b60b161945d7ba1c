//! Randomized information-set upper bounds on code distance, and random
//! search over three-term polynomial codes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::code::{build_two_block, CheckType, CodeFixture, CssCode};
use crate::gf2::{parity_and, BitMatrix, BitVec};
use crate::group::{GroupAlgebraElement, GroupSpec};
use crate::par;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistanceError {
    #[error("code has no logical qubits")]
    NoLogicals,
    #[error("nullspace is trivial; no nonzero codewords")]
    EmptyCode,
    #[error("no valid group in the requested ranges")]
    EmptySearchSpace,
    #[error("exhaustive enumeration limited to 24 generators, got {0}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceEstimate {
    /// Minimum weight found; an upper bound on the distance.
    pub weight: usize,
    #[serde(skip)]
    pub witness: BitVec,
    pub trials: usize,
    pub seed: u64,
}

/// Trial-indexed RNG: trial `t` sees the same stream whatever the worker
/// count or the total number of trials.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Lowest-weight vector among the rows of a randomly column-permuted
/// echelon form and their pairwise sums that passes `accept`.
fn information_set_trial(
    generators: &BitMatrix,
    rng: &mut ChaCha8Rng,
    accept: &(dyn Fn(&[u64]) -> bool + Sync),
) -> Option<(usize, BitVec)> {
    let n = generators.cols();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut m = generators.clone();
    let rank = m.reduce_in_place(Some(&order)).len();
    let words = generators.row_words(0).len();
    let mut best: Option<(usize, Vec<u64>)> = None;
    let mut consider = |v: &[u64]| {
        let w: usize = v.iter().map(|x| x.count_ones() as usize).sum();
        if w == 0 || best.as_ref().is_some_and(|(b, _)| w >= *b) {
            return;
        }
        if accept(v) {
            best = Some((w, v.to_vec()));
        }
    };
    let mut buf = vec![0u64; words];
    for r in 0..rank {
        consider(m.row_words(r));
        for s in r + 1..rank {
            for (d, (a, b)) in buf.iter_mut().zip(m.row_words(r).iter().zip(m.row_words(s))) {
                *d = a ^ b;
            }
            consider(&buf);
        }
    }
    best.map(|(w, words)| (w, BitVec::from_words(n, words)))
}

fn run_trials(
    generators: &BitMatrix,
    trials: usize,
    seed: u64,
    accept: &(dyn Fn(&[u64]) -> bool + Sync),
) -> Option<(usize, BitVec)> {
    let results = par::map_range(trials, |t| {
        let mut rng = trial_rng(seed, t);
        information_set_trial(generators, &mut rng, accept)
    });
    // First trial reaching the minimum wins, so the witness is deterministic.
    let mut best: Option<(usize, BitVec)> = None;
    for (w, v) in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, v));
        }
    }
    best
}

/// Upper bound on the weight of a nontrivial logical of the given Pauli
/// type: `side = Z` searches `ker(h_x) \ rowspace(h_z)`.
pub fn estimate_distance(
    code: &CssCode,
    side: CheckType,
    trials: usize,
    seed: u64,
) -> Result<DistanceEstimate, DistanceError> {
    if code.k() == 0 {
        return Err(DistanceError::NoLogicals);
    }
    let other = code.checks(side.dual());
    let dual_logicals = code.logicals(side.dual());
    let generators = other.nullspace();
    // A kernel vector is a nontrivial logical iff it anticommutes with some
    // dual logical.
    let accept = |v: &[u64]| (0..dual_logicals.rows()).any(|r| parity_and(dual_logicals.row_words(r), v));
    let (weight, witness) = run_trials(&generators, trials.max(1), seed, &accept)
        .expect("a basis vector of a nontrivial quotient always anticommutes with some logical");
    debug_assert!(other.mul_vec(&witness).is_zero());
    debug_assert!(!code.checks(side).row_space_contains(&witness));
    Ok(DistanceEstimate {
        weight,
        witness,
        trials: trials.max(1),
        seed,
    })
}

/// Minimum weight over both logical types.
pub fn estimate_code_distance(code: &CssCode, trials: usize, seed: u64) -> Result<usize, DistanceError> {
    let x = estimate_distance(code, CheckType::X, trials, seed)?;
    let z = estimate_distance(code, CheckType::Z, trials, seed.wrapping_add(1))?;
    Ok(x.weight.min(z.weight))
}

/// Upper bound on the minimum weight of a nonzero vector in `ker(h)`.
pub fn estimate_classical_distance(h: &BitMatrix, trials: usize, seed: u64) -> Result<DistanceEstimate, DistanceError> {
    let generators = h.nullspace();
    if generators.rows() == 0 {
        return Err(DistanceError::EmptyCode);
    }
    let accept = |_: &[u64]| true;
    let (weight, witness) =
        run_trials(&generators, trials.max(1), seed, &accept).expect("nonempty nullspace has nonzero rows");
    Ok(DistanceEstimate {
        weight,
        witness,
        trials: trials.max(1),
        seed,
    })
}

/// Exact distance by enumerating every combination of kernel generators.
pub fn exact_distance(code: &CssCode, side: CheckType) -> Result<usize, DistanceError> {
    if code.k() == 0 {
        return Err(DistanceError::NoLogicals);
    }
    let generators = code.checks(side.dual()).nullspace();
    let dim = generators.rows();
    if dim > 24 {
        return Err(DistanceError::TooLarge(dim));
    }
    let dual_logicals = code.logicals(side.dual());
    let mut best = usize::MAX;
    let mut v = BitVec::zeros(code.n());
    // Gray-code walk over all 2^dim combinations.
    for t in 1u64..(1u64 << dim) {
        let bit = t.trailing_zeros() as usize;
        v.xor_assign(&generators.row(bit));
        let w = v.weight();
        let nontrivial = (0..dual_logicals.rows()).any(|r| parity_and(dual_logicals.row_words(r), v.words()));
        if w < best && nontrivial {
            best = w;
        }
    }
    Ok(best)
}

/// Ranges of group parameters to sample from; bounds inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    pub ell: (u32, u32),
    pub m: (u32, u32),
    pub q: (u32, u32),
}

impl SearchSpace {
    pub fn single(ell: u32, m: u32, q: u32) -> Self {
        Self {
            ell: (ell, ell),
            m: (m, m),
            q: (q, q),
        }
    }

    pub fn groups(&self) -> Vec<GroupSpec> {
        let mut out = Vec::new();
        for ell in self.ell.0..=self.ell.1 {
            for m in self.m.0..=self.m.1 {
                for q in self.q.0..=self.q.1 {
                    // Skip q values that merely alias a smaller twist.
                    if ell > 1 && q >= ell {
                        continue;
                    }
                    if let Ok(s) = GroupSpec::new(ell, m, q) {
                        if !out.contains(&s) {
                            out.push(s);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub space: SearchSpace,
    pub samples: usize,
    pub k_min: usize,
    pub d_min: usize,
    /// Information-set trials per candidate and per side.
    pub trials: usize,
    pub seed: u64,
    /// Stop after this many hits.
    pub max_results: Option<usize>,
    /// Pin either polynomial instead of sampling it.
    pub fixed_a: Option<String>,
    pub fixed_b: Option<String>,
}

/// Samples `weight`-term polynomials over random groups of the search
/// space and keeps codes with `k >= k_min` and distance bound `>= d_min`.
pub fn search_codes(config: &SearchConfig, weight: usize) -> Result<Vec<CodeFixture>, DistanceError> {
    let groups = config.space.groups();
    if groups.is_empty() {
        return Err(DistanceError::EmptySearchSpace);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut hits = Vec::new();
    for sample in 0..config.samples {
        let spec = groups[rng.random_range(0..groups.len())];
        let mut pick = |fixed: &Option<String>| -> Option<GroupAlgebraElement> {
            match fixed {
                Some(text) => GroupAlgebraElement::parse(spec, text).ok(),
                None => {
                    let mut idx: Vec<usize> = Vec::with_capacity(weight);
                    while idx.len() < weight.min(spec.order()) {
                        let t = rng.random_range(0..spec.order());
                        if !idx.contains(&t) {
                            idx.push(t);
                        }
                    }
                    GroupAlgebraElement::from_monomials(spec, idx.into_iter().map(|t| spec.from_index(t))).ok()
                }
            }
        };
        let (Some(a), Some(b)) = (pick(&config.fixed_a), pick(&config.fixed_b)) else {
            continue;
        };
        let Ok(code) = build_two_block("candidate", spec, a.clone(), b.clone()) else {
            continue;
        };
        if code.k() < config.k_min || code.k() == 0 {
            continue;
        }
        let d = estimate_code_distance(&code, config.trials, config.seed ^ sample as u64)?;
        if d < config.d_min {
            continue;
        }
        let family = if spec.q() == 1 { "BB" } else { "ZSZ" };
        hits.push(CodeFixture {
            name: format!("{family}{}-s{sample}", code.n()),
            ell: spec.ell(),
            m: spec.m(),
            q: spec.q(),
            a: a.to_string().replace(' ', ""),
            b: b.to_string().replace(' ', ""),
            n: code.n(),
            k: code.k(),
            d_bound: d,
        });
        if config.max_results.is_some_and(|cap| hits.len() >= cap) {
            break;
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeFamily;

    #[test]
    fn repetition_code_distance() {
        let h = BitMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let est = estimate_classical_distance(&h, 5, 0).unwrap();
        assert_eq!(est.weight, 3);
        assert!(h.mul_vec(&est.witness).is_zero());
    }

    #[test]
    fn no_logicals_is_an_error() {
        let code = CssCode::from_checks(
            "trivial",
            CodeFamily::Custom,
            BitMatrix::identity(2),
            BitMatrix::zeros(0, 2),
        )
        .unwrap();
        assert_eq!(
            estimate_distance(&code, CheckType::Z, 3, 0),
            Err(DistanceError::NoLogicals)
        );
    }

    #[test]
    fn search_space_enumeration() {
        let s = SearchSpace {
            ell: (7, 7),
            m: (3, 3),
            q: (1, 6),
        };
        let qs: Vec<u32> = s.groups().iter().map(|g| g.q()).collect();
        assert_eq!(qs, vec![1, 2, 4]);
    }
}
