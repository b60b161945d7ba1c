//! Flooding min-sum belief propagation.

use crate::gf2::BitVec;

use super::spacetime::DecodingMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub correction: BitVec,
    pub converged: bool,
    pub iterations: usize,
    /// Posterior log-likelihood ratios, `ln(P(0) / P(1))`.
    pub posteriors: Vec<f64>,
}

pub(crate) fn llr(p: f64) -> f64 {
    let p = p.clamp(1e-15, 1.0 - 1e-15);
    ((1.0 - p) / p).ln()
}

/// Min-sum BP, stopping as soon as the hard decision reproduces `syndrome`.
pub fn bp_min_sum(matrix: &DecodingMatrix, syndrome: &BitVec, max_iters: usize) -> DecodeResult {
    run(matrix, syndrome, max_iters, true)
}

/// Posterior LLRs after exactly `iters` flooding iterations. On a tree,
/// enough iterations give the exact min-cost (max-product) log ratios.
pub fn min_sum_posteriors(matrix: &DecodingMatrix, syndrome: &BitVec, iters: usize) -> Vec<f64> {
    run(matrix, syndrome, iters, false).posteriors
}

fn run(matrix: &DecodingMatrix, syndrome: &BitVec, max_iters: usize, early_stop: bool) -> DecodeResult {
    assert_eq!(syndrome.len(), matrix.rows, "syndrome length");
    let nv = matrix.num_vars();
    let prior: Vec<f64> = matrix.priors.iter().map(|&p| llr(p)).collect();
    let mut posteriors = prior.clone();
    if early_stop && syndrome.is_zero() {
        return DecodeResult {
            correction: BitVec::zeros(nv),
            converged: true,
            iterations: 0,
            posteriors,
        };
    }
    let layout = &matrix.edges;
    let ne = layout.edge_var.len();
    let mut v2c: Vec<f32> = layout.edge_var.iter().map(|&v| prior[v as usize] as f32).collect();
    let mut c2v = vec![0f32; ne];
    let mut hard = vec![false; nv];
    let s_bits: Vec<bool> = (0..matrix.rows).map(|r| syndrome.get(r)).collect();
    for it in 1..=max_iters {
        for r in 0..matrix.rows {
            let (lo, hi) = (layout.row_start[r] as usize, layout.row_start[r + 1] as usize);
            let mut sign = s_bits[r];
            let (mut min1, mut min2, mut arg) = (f32::INFINITY, f32::INFINITY, usize::MAX);
            for (e, &m) in v2c[lo..hi].iter().enumerate() {
                sign ^= m < 0.0;
                let a = m.abs();
                let below = a < min1;
                min2 = if below { min1 } else { min2.min(a) };
                arg = if below { e } else { arg };
                min1 = min1.min(a);
            }
            for (e, (out, &m)) in c2v[lo..hi].iter_mut().zip(&v2c[lo..hi]).enumerate() {
                let mag = if e == arg { min2 } else { min1 };
                *out = if sign ^ (m < 0.0) { -mag } else { mag };
            }
        }
        for v in 0..nv {
            let edges = &layout.var_edge[layout.var_start[v] as usize..layout.var_start[v + 1] as usize];
            let total = prior[v] as f32 + edges.iter().map(|&e| c2v[e as usize]).sum::<f32>();
            posteriors[v] = f64::from(total);
            for &e in edges {
                v2c[e as usize] = total - c2v[e as usize];
            }
            hard[v] = total < 0.0;
        }
        let satisfied = (0..matrix.rows).all(|r| {
            let vars = &layout.edge_var[layout.row_start[r] as usize..layout.row_start[r + 1] as usize];
            vars.iter().fold(false, |acc, &v| acc ^ hard[v as usize]) == s_bits[r]
        });
        if early_stop && satisfied {
            return DecodeResult {
                correction: BitVec::from_bools(&hard),
                converged: true,
                iterations: it,
                posteriors,
            };
        }
    }
    let correction = BitVec::from_bools(&hard);
    let converged = matrix.syndrome(&correction) == *syndrome;
    DecodeResult {
        correction,
        converged,
        iterations: max_iters,
        posteriors,
    }
}
