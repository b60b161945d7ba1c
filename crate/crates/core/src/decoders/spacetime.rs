//! Phenomenological space-time decoding graph: `d + 1` copies of one
//! side's Tanner graph joined by measurement-error variables.

use crate::code::{CheckType, CssCode};
use crate::gf2::{BitMatrix, BitVec};

/// Where a fault variable comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    /// Data error on `qubit` that first shows up in detector block `round`.
    Data { round: usize, qubit: usize },
    /// Wrong outcome of `check` in measurement round `round`.
    Measurement { round: usize, check: usize },
}

/// Flat edge layout for message passing: edges in row order, plus for
/// each variable the slice of its edge ids.
#[derive(Debug, Clone)]
pub(crate) struct EdgeLayout {
    pub row_start: Vec<u32>,
    pub edge_var: Vec<u32>,
    pub var_start: Vec<u32>,
    pub var_edge: Vec<u32>,
}

impl EdgeLayout {
    fn new(row_vars: &[Vec<u32>], vars: usize) -> Self {
        let mut row_start = vec![0u32];
        let mut edge_var = Vec::new();
        for r in row_vars {
            edge_var.extend_from_slice(r);
            row_start.push(edge_var.len() as u32);
        }
        let mut count = vec![0u32; vars + 1];
        for &v in &edge_var {
            count[v as usize + 1] += 1;
        }
        for i in 0..vars {
            count[i + 1] += count[i];
        }
        let var_start = count.clone();
        let mut fill = count;
        let mut var_edge = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edge[fill[v as usize] as usize] = e as u32;
            fill[v as usize] += 1;
        }
        Self {
            row_start,
            edge_var,
            var_start,
            var_edge,
        }
    }
}

/// Sparse parity-check matrix over fault variables with priors.
#[derive(Debug, Clone)]
pub struct DecodingMatrix {
    pub rows: usize,
    pub row_vars: Vec<Vec<u32>>,
    pub var_rows: Vec<Vec<u32>>,
    /// Prior flip probability per variable.
    pub priors: Vec<f64>,
    pub variables: Vec<Variable>,
    /// Data qubits and checks per block.
    pub n: usize,
    pub checks: usize,
    pub rounds: usize,
    pub(crate) edges: EdgeLayout,
}

impl DecodingMatrix {
    /// Builds from a list of per-variable row supports.
    pub fn from_columns(rows: usize, columns: Vec<Vec<u32>>, priors: Vec<f64>, variables: Vec<Variable>) -> Self {
        assert_eq!(columns.len(), priors.len());
        let mut row_vars = vec![Vec::new(); rows];
        for (v, col) in columns.iter().enumerate() {
            for &r in col {
                row_vars[r as usize].push(v as u32);
            }
        }
        let n = variables
            .iter()
            .filter(|v| matches!(v, Variable::Data { round: 0, .. }))
            .count();
        let edges = EdgeLayout::new(&row_vars, columns.len());
        Self {
            edges,
            rows,
            row_vars,
            var_rows: columns,
            priors,
            variables,
            n,
            checks: rows,
            rounds: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_rows.len()
    }

    pub fn syndrome(&self, correction: &BitVec) -> BitVec {
        let mut s = BitVec::zeros(self.rows);
        for v in correction.iter_ones() {
            for &r in &self.var_rows[v] {
                s.flip(r as usize);
            }
        }
        s
    }

    pub fn to_dense(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, self.num_vars());
        for (v, rows) in self.var_rows.iter().enumerate() {
            for &r in rows {
                m.flip(r as usize, v);
            }
        }
        m
    }

    /// Sets data priors per qubit (same in every block) and one
    /// measurement prior.
    pub fn set_priors(&mut self, data: &[f64], measurement: f64) {
        for (v, var) in self.variables.iter().enumerate() {
            self.priors[v] = match *var {
                Variable::Data { qubit, .. } => data[qubit],
                Variable::Measurement { .. } => measurement,
            };
        }
    }

    /// Net data error of a correction, summed over blocks.
    pub fn data_correction(&self, correction: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.n);
        for v in correction.iter_ones() {
            if let Variable::Data { qubit, .. } = self.variables[v] {
                out.flip(qubit);
            }
        }
        out
    }
}

/// Detector rows `(d + 1) * m`: block `r < d` compares rounds `r` and
/// `r - 1`, block `d` compares the noiseless final syndrome with round
/// `d - 1`. Data variables sit in every block; measurement variables join
/// blocks `r` and `r + 1` for `r < d`. `rounds = 0` gives the plain
/// single-shot Tanner graph.
pub fn build_spacetime_matrix(code: &CssCode, side: CheckType, rounds: usize) -> DecodingMatrix {
    let h = code.checks(side);
    let m = h.rows();
    let n = code.n();
    let supports = h.col_supports();
    let mut columns = Vec::new();
    let mut variables = Vec::new();
    for r in 0..=rounds {
        for (q, sup) in supports.iter().enumerate() {
            columns.push(sup.iter().map(|&c| (r * m + c) as u32).collect());
            variables.push(Variable::Data { round: r, qubit: q });
        }
    }
    for r in 0..rounds {
        for c in 0..m {
            columns.push(vec![(r * m + c) as u32, ((r + 1) * m + c) as u32]);
            variables.push(Variable::Measurement { round: r, check: c });
        }
    }
    let priors = vec![0.01; columns.len()];
    let mut out = DecodingMatrix::from_columns((rounds + 1) * m, columns, priors, variables);
    out.n = n;
    out.checks = m;
    out.rounds = rounds;
    out
}

/// Detector vector from `rounds` measured syndromes and the final
/// noiseless one.
pub fn detectors(measured: &[BitVec], final_syndrome: &BitVec) -> BitVec {
    let m = final_syndrome.len();
    let mut out = BitVec::zeros((measured.len() + 1) * m);
    let mut prev = BitVec::zeros(m);
    for (r, s) in measured.iter().chain(std::iter::once(final_syndrome)).enumerate() {
        for c in s.xor(&prev).iter_ones() {
            out.set(r * m + c, true);
        }
        prev = s.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeFamily;

    fn single_check() -> CssCode {
        CssCode::from_checks(
            "toy",
            CodeFamily::Custom,
            BitMatrix::zeros(0, 2),
            BitMatrix::from_dense(&[vec![1, 1]]),
        )
        .unwrap()
    }

    #[test]
    fn single_round_toy_by_hand() {
        let m = build_spacetime_matrix(&single_check(), CheckType::Z, 1);
        // Columns: data (r0,q0), (r0,q1), (r1,q0), (r1,q1), meas (r0).
        let expected = BitMatrix::from_dense(&[vec![1, 1, 0, 0, 1], vec![0, 0, 1, 1, 1]]);
        assert_eq!(m.to_dense(), expected);
        assert_eq!(m.rows, 2);
    }

    #[test]
    fn detector_differences() {
        let s = |b: &[u8]| BitVec::from_bools(&b.iter().map(|&x| x == 1).collect::<Vec<_>>());
        let d = detectors(&[s(&[1, 0]), s(&[1, 1])], &s(&[0, 1]));
        assert_eq!(d, s(&[1, 0, 0, 1, 1, 0]));
    }
}
