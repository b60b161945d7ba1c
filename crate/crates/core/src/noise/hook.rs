//! Hook errors: data errors left behind by a single ancilla fault inside a
//! check's CZ block.

use crate::code::{CheckType, CssCode};
use crate::gf2::{BitMatrix, BitVec};

use super::circuit::{build_se_round, CzSchedule, NoisyCircuit};
use super::frame::{run_with_faults, BatchFrame, Fault};

/// Residual data error of one ancilla fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HookError {
    /// Number of CZ layers completed before the fault.
    pub layer: usize,
    /// Pauli on the ancilla as `(x, z)`.
    pub pauli: (bool, bool),
    /// Data error of the check's own type, reduced modulo that type's checks.
    pub residual: BitVec,
}

/// Lowers the weight of `v` by adding rows of `checks` while that helps.
pub fn reduce_by_checks(v: &BitVec, checks: &BitMatrix) -> BitVec {
    let mut v = v.clone();
    loop {
        let w = v.weight();
        let best = (0..checks.rows())
            .map(|r| (r, v.xor(&checks.row(r)).weight()))
            .min_by_key(|&(_, w)| w);
        match best {
            Some((r, nw)) if nw < w => v.xor_assign(&checks.row(r)),
            _ => return v,
        }
    }
}

/// Propagates each single-Pauli fault on the ancilla of `check` at every
/// position of its stage's CZ block through the rest of the cycle.
pub fn enumerate_hook_errors(code: &CssCode, schedule: &CzSchedule, check: usize, stage: CheckType) -> Vec<HookError> {
    let round = build_se_round(code, schedule);
    hook_errors_in(&round, code, check, stage)
}

pub(crate) fn hook_errors_in(round: &NoisyCircuit, code: &CssCode, check: usize, stage: CheckType) -> Vec<HookError> {
    let n = code.n();
    let ancilla = (n + check) as u32;
    let layers = (0..).take_while(|&t| round.cz_boundary(stage, t).is_some()).count();
    let mut faults = Vec::new();
    for t in 0..layers {
        let after_op = round.cz_boundary(stage, t).expect("counted above");
        for (x, z) in [(true, false), (true, true), (false, true)] {
            faults.push((
                t,
                (x, z),
                Fault {
                    after_op,
                    paulis: vec![(ancilla, x, z)],
                    flip: None,
                    prob: 1.0,
                    site: 0,
                },
            ));
        }
    }
    let checks = code.checks(stage);
    let mut out = Vec::with_capacity(faults.len());
    for chunk in faults.chunks(64) {
        let lanes: Vec<Vec<&Fault>> = chunk.iter().map(|(_, _, f)| vec![f]).collect();
        let mut frame = BatchFrame::zeros(round.num_qubits());
        run_with_faults(round, &mut frame, &lanes, &mut Vec::new());
        for (l, (t, pauli, _)) in chunk.iter().enumerate() {
            // X-stage faults leave X errors on data; Z-stage faults Z errors.
            let words = match stage {
                CheckType::X => &frame.x[..n],
                CheckType::Z => &frame.z[..n],
            };
            let raw = super::frame::lane_bits(words, l);
            out.push(HookError {
                layer: *t,
                pauli: *pauli,
                residual: reduce_by_checks(&raw, checks),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_from_text;

    #[test]
    fn boundary_faults_leave_nothing() {
        let code = build_from_text("demo", 9, 6, 2, "1+x^2+y^2", "1+x^5+y").unwrap();
        let schedule = CzSchedule::for_code(&code);
        for stage in [CheckType::X, CheckType::Z] {
            let hooks = enumerate_hook_errors(&code, &schedule, 5, stage);
            assert_eq!(hooks.len(), 7 * 3);
            for h in &hooks {
                if h.layer == 0 || h.layer == 6 || h.pauli == (false, true) {
                    assert!(h.residual.is_zero(), "{h:?}");
                }
                assert!(h.residual.weight() <= 3);
            }
        }
    }
}
