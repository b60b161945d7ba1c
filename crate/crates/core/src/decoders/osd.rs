//! Ordered-statistics post-processing with a combination sweep.

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec};

use super::bp::{bp_min_sum, llr, DecodeResult};
use super::spacetime::DecodingMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("syndrome is not in the column space of the decoding matrix")]
    Inconsistent,
    #[error("syndrome has length {got}, expected {expected}")]
    SyndromeLength { expected: usize, got: usize },
}

/// Prior-weighted cost of a correction: sum of `ln((1-p)/p)` over its support.
pub fn prior_weight(matrix: &DecodingMatrix, correction: &BitVec) -> f64 {
    correction.iter_ones().map(|v| llr(matrix.priors[v])).sum()
}

/// Orders variables most-likely-flipped first, eliminates in that order to
/// get an information set, then tries the OSD-0 solution plus every single
/// and pair flip among the first `depth` variables outside the set.
pub fn osd_combination_sweep(
    matrix: &DecodingMatrix,
    syndrome: &BitVec,
    posteriors: &[f64],
    depth: usize,
) -> Result<DecodeResult, DecodeError> {
    if syndrome.len() != matrix.rows {
        return Err(DecodeError::SyndromeLength {
            expected: matrix.rows,
            got: syndrome.len(),
        });
    }
    let nv = matrix.num_vars();
    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by(|&a, &b| posteriors[a].total_cmp(&posteriors[b]));
    // Augmented [H | s]; the last column never pivots.
    let mut aug = BitMatrix::zeros(matrix.rows, nv + 1);
    for (v, rows) in matrix.var_rows.iter().enumerate() {
        for &r in rows {
            aug.flip(r as usize, v);
        }
    }
    for r in syndrome.iter_ones() {
        aug.set(r, nv, true);
    }
    let pivots = aug.reduce_in_place(Some(&order));
    let rank = pivots.len();
    if (rank..matrix.rows).any(|r| aug.get(r, nv)) {
        return Err(DecodeError::Inconsistent);
    }
    let mut in_set = vec![false; nv];
    for &p in &pivots {
        in_set[p] = true;
    }
    let outside: Vec<usize> = order.iter().copied().filter(|&v| !in_set[v]).take(depth).collect();
    let solve = |flips: &[usize]| -> BitVec {
        let mut x = BitVec::zeros(nv);
        for &f in flips {
            x.set(f, true);
        }
        for (r, &p) in pivots.iter().enumerate() {
            let mut bit = aug.get(r, nv);
            for &f in flips {
                bit ^= aug.get(r, f);
            }
            x.set(p, bit);
        }
        x
    };
    let mut best = solve(&[]);
    let mut best_cost = prior_weight(matrix, &best);
    let mut consider = |flips: &[usize]| {
        let x = solve(flips);
        let c = prior_weight(matrix, &x);
        if c < best_cost {
            best = x;
            best_cost = c;
        }
    };
    for (i, &a) in outside.iter().enumerate() {
        consider(&[a]);
        for &b in &outside[i + 1..] {
            consider(&[a, b]);
        }
    }
    assert_eq!(
        matrix.syndrome(&best),
        *syndrome,
        "OSD solution must satisfy the syndrome"
    );
    Ok(DecodeResult {
        correction: best,
        converged: false,
        iterations: 0,
        posteriors: posteriors.to_vec(),
    })
}

/// BP first; OSD only if BP does not reproduce the syndrome.
pub fn bp_osd(
    matrix: &DecodingMatrix,
    syndrome: &BitVec,
    bp_iters: usize,
    osd_depth: usize,
) -> Result<DecodeResult, DecodeError> {
    if syndrome.len() != matrix.rows {
        return Err(DecodeError::SyndromeLength {
            expected: matrix.rows,
            got: syndrome.len(),
        });
    }
    let bp = bp_min_sum(matrix, syndrome, bp_iters);
    if bp.converged {
        return Ok(bp);
    }
    let mut out = osd_combination_sweep(matrix, syndrome, &bp.posteriors, osd_depth)?;
    out.iterations = bp.iterations;
    Ok(out)
}
