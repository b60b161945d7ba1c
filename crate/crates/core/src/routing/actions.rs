//! Left and right group actions as move scripts, and full syndrome
//! extraction rounds built from them.

use serde::Serialize;

use crate::code::{CheckType, CssCode};
use crate::group::{GroupElement, GroupSpec};
use crate::noise::CzSchedule;
use crate::par;

use super::grid::{GridTransfer, MoveScript, RoutingError, ScriptSummary};
use super::shuffle::permute_columns;

/// Routing capabilities beyond plain grid transfers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RouteOptions {
    /// Per-row shifts of the right action are split into binary stages
    /// (one transfer per bit) instead of sequential row drop-offs.
    pub selective_transfers: bool,
}

fn check_range(spec: &GroupSpec, alpha: u32, beta: u32) -> Result<(), RoutingError> {
    if alpha >= spec.ell() || beta >= spec.m() {
        return Err(RoutingError::MonomialRange {
            alpha,
            beta,
            ell: spec.ell(),
            m: spec.m(),
        });
    }
    Ok(())
}

fn all(n: usize) -> Vec<i32> {
    (0..n as i32).collect()
}

/// Cyclic shift of all rows by `beta` using at most `floor(m/2)` scratch
/// rows on top.
fn vertical_shift(script: &mut MoveScript, beta: usize) {
    let (w, m) = (script.width, script.height);
    if beta == 0 {
        return;
    }
    let cols = all(w);
    let short = beta.min(m - beta) as i32;
    let m = m as i32;
    if short as usize == beta {
        script
            .transfers
            .push(GridTransfer::translate(all(m as usize), cols.clone(), 0, short));
        script
            .transfers
            .push(GridTransfer::translate((m..m + short).collect(), cols, 0, -m));
    } else {
        script
            .transfers
            .push(GridTransfer::translate((0..short).collect(), cols.clone(), 0, m));
        script
            .transfers
            .push(GridTransfer::translate((short..m + short).collect(), cols, 0, -short));
    }
}

/// Cyclic shift of all columns by `alpha` using at most `floor(ell/2)`
/// scratch columns on the right.
fn horizontal_shift(script: &mut MoveScript, alpha: usize) {
    let (ell, m) = (script.width, script.height);
    if alpha == 0 {
        return;
    }
    let rows = all(m);
    let short = alpha.min(ell - alpha) as i32;
    let ell = ell as i32;
    if short as usize == alpha {
        script
            .transfers
            .push(GridTransfer::translate(rows.clone(), all(ell as usize), short, 0));
        script
            .transfers
            .push(GridTransfer::translate(rows, (ell..ell + short).collect(), -ell, 0));
    } else {
        script
            .transfers
            .push(GridTransfer::translate(rows.clone(), (0..short).collect(), ell, 0));
        script
            .transfers
            .push(GridTransfer::translate(rows, (short..ell + short).collect(), -short, 0));
    }
}

/// Atom at site `h` ends on site `x^alpha y^beta * h`: a column
/// permutation `i -> q^beta i`, then a vertical and a horizontal cyclic
/// shift.
pub fn route_left_action(spec: &GroupSpec, alpha: u32, beta: u32) -> Result<MoveScript, RoutingError> {
    check_range(spec, alpha, beta)?;
    let (ell, m) = (spec.ell() as usize, spec.m() as usize);
    let sigma: Vec<usize> = (0..ell).map(|i| spec.twist(beta as u64, i as u64) as usize).collect();
    let mut script = permute_columns(&sigma, m)?;
    vertical_shift(&mut script, beta as usize);
    horizontal_shift(&mut script, alpha as usize);
    Ok(script)
}

/// Atom at site `h` ends on site `h * x^alpha y^beta`: row `j` shifts
/// right by `q^j alpha`, the overflow merges back from scratch, then a
/// vertical cyclic shift.
pub fn route_right_action(
    spec: &GroupSpec,
    alpha: u32,
    beta: u32,
    opts: RouteOptions,
) -> Result<MoveScript, RoutingError> {
    check_range(spec, alpha, beta)?;
    let (ell, m) = (spec.ell() as usize, spec.m() as usize);
    let mut script = MoveScript::new(ell, m);
    let shifts: Vec<usize> = (0..m).map(|j| spec.twist(j as u64, alpha as u64) as usize).collect();
    let width = all(2 * ell);
    if opts.selective_transfers {
        let bits = usize::BITS - ell.saturating_sub(1).leading_zeros();
        for b in 0..bits {
            let rows: Vec<i32> = (0..m).filter(|&j| shifts[j] >> b & 1 == 1).map(|j| j as i32).collect();
            if !rows.is_empty() {
                script
                    .transfers
                    .push(GridTransfer::translate(rows, width.clone(), 1 << b, 0));
                script.row_stages += 1;
            }
        }
    } else {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&j| (shifts[j], j));
        let mut remaining: Vec<bool> = vec![true; m];
        let mut offset = 0;
        for &j in &order {
            if shifts[j] > offset {
                let rows: Vec<i32> = (0..m).filter(|&r| remaining[r]).map(|r| r as i32).collect();
                let cols: Vec<i32> = (offset as i32..(offset + ell) as i32).collect();
                script
                    .transfers
                    .push(GridTransfer::translate(rows, cols, (shifts[j] - offset) as i32, 0));
                script.row_stages += 1;
                offset = shifts[j];
            }
            remaining[j] = false;
        }
    }
    if shifts.iter().any(|&s| s > 0) {
        let ell = ell as i32;
        script
            .transfers
            .push(GridTransfer::translate(all(m), (ell..2 * ell).collect(), -ell, 0));
    }
    vertical_shift(&mut script, beta as usize);
    Ok(script)
}

/// Which half of the data qubits moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// Qubits `0..n/2`.
    Horizontal,
    /// Qubits `n/2..n`.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Left,
    Right,
}

/// Couples one monomial: the sector's data array moves onto the static
/// ancilla array, then moves back home.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialRoute {
    pub sector: Sector,
    pub action: Action,
    /// Group element applied to the data array.
    pub element: GroupElement,
    pub forward: MoveScript,
    pub back: MoveScript,
}

impl MonomialRoute {
    fn new(sector: Sector, action: Action, element: GroupElement, opts: RouteOptions) -> Result<Self, RoutingError> {
        let spec = element.spec();
        let inv = element.inverse();
        let route = |g: GroupElement| match action {
            Action::Left => route_left_action(spec, g.i(), g.j()),
            Action::Right => route_right_action(spec, g.i(), g.j(), opts),
        };
        Ok(Self {
            sector,
            action,
            element,
            forward: route(element)?,
            back: route(inv)?,
        })
    }
}

/// All couplings of one check type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRoute {
    pub side: CheckType,
    pub steps: Vec<MonomialRoute>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundSummary {
    pub side: String,
    pub verified: bool,
    pub monomials: usize,
    pub left_moves: usize,
    pub right_moves: usize,
    pub total_moves: usize,
    pub riffles: usize,
    pub scratch_cols: usize,
    pub scratch_rows: usize,
    /// Every step is a plain cyclic shift (no column permutation and a
    /// single row-shift stage).
    pub cyclic_only: bool,
}

impl RoundRoute {
    pub fn total_moves(&self) -> usize {
        self.steps.iter().map(|s| s.forward.len() + s.back.len()).sum()
    }

    pub fn cyclic_only(&self) -> bool {
        self.steps
            .iter()
            .flat_map(|s| [&s.forward, &s.back])
            .all(|sc| sc.riffles == 0 && sc.row_stages <= 1)
    }

    pub fn summary(&self, verified: bool) -> Result<RoundSummary, RoutingError> {
        let mut out = RoundSummary {
            side: format!("{:?}", self.side),
            verified,
            monomials: self.steps.len(),
            left_moves: 0,
            right_moves: 0,
            total_moves: self.total_moves(),
            riffles: 0,
            scratch_cols: 0,
            scratch_rows: 0,
            cyclic_only: self.cyclic_only(),
        };
        for step in &self.steps {
            for sc in [&step.forward, &step.back] {
                let s: ScriptSummary = sc.summary()?;
                match step.action {
                    Action::Left => out.left_moves += s.moves,
                    Action::Right => out.right_moves += s.moves,
                }
                out.riffles += s.riffles;
                out.scratch_cols = out.scratch_cols.max(s.scratch_cols);
                out.scratch_rows = out.scratch_rows.max(s.scratch_rows);
            }
        }
        Ok(out)
    }

    /// Full move script in execution order.
    pub fn script(&self) -> MoveScript {
        let mut out = match self.steps.first() {
            Some(s) => MoveScript::new(s.forward.width, s.forward.height),
            None => MoveScript::default(),
        };
        for s in &self.steps {
            out.extend(s.forward.clone());
            out.extend(s.back.clone());
        }
        out
    }
}

/// Routes one side's syndrome extraction. X checks: `a` by left action on
/// the horizontal data, then `b` by right action on the vertical data. Z
/// checks use inverted monomials with the sectors swapped.
pub fn route_se_round(code: &CssCode, side: CheckType, opts: RouteOptions) -> Result<RoundRoute, RoutingError> {
    let tb = code.two_block.as_ref().ok_or(RoutingError::NotTwoBlock)?;
    let mut steps = Vec::new();
    for g in tb.a.monomials() {
        steps.push(match side {
            CheckType::X => MonomialRoute::new(Sector::Horizontal, Action::Left, *g, opts)?,
            CheckType::Z => MonomialRoute::new(Sector::Vertical, Action::Left, g.inverse(), opts)?,
        });
    }
    for g in tb.b.monomials() {
        steps.push(match side {
            CheckType::X => MonomialRoute::new(Sector::Vertical, Action::Right, *g, opts)?,
            CheckType::Z => MonomialRoute::new(Sector::Horizontal, Action::Right, g.inverse(), opts)?,
        });
    }
    Ok(RoundRoute { side, steps })
}

/// Replays the round and checks that ancilla `c` meets exactly the data
/// qubits of its check, in the CZ schedule order, and that every step
/// returns the data home.
pub fn verify_se_round(code: &CssCode, route: &RoundRoute) -> Result<(), RoutingError> {
    let tb = code.two_block.as_ref().ok_or(RoutingError::NotTwoBlock)?;
    let half = tb.spec.order();
    let mut visits = vec![Vec::new(); half];
    for step in &route.steps {
        let fwd = step.forward.permutation()?;
        let back = step.back.permutation()?;
        let offset = match step.sector {
            Sector::Horizontal => 0,
            Sector::Vertical => half,
        };
        let mut at_site = vec![0usize; half];
        for (atom, &site) in fwd.iter().enumerate() {
            at_site[site] = atom;
        }
        for (c, v) in visits.iter_mut().enumerate() {
            v.push(offset + at_site[c]);
        }
        if let Some(c) = (0..half).find(|&a| back[fwd[a]] != a) {
            return Err(RoutingError::Verification { check: c });
        }
    }
    let schedule = CzSchedule::monomial_order(code).ok_or(RoutingError::NotTwoBlock)?;
    let supports = code.check_supports(route.side);
    let bad = par::map_range(half, |c| {
        let order = schedule.check_order(route.side, c);
        let mut sorted = visits[c].clone();
        sorted.sort_unstable();
        visits[c] != order || sorted != supports[c]
    });
    match bad.iter().position(|&b| b) {
        Some(check) => Err(RoutingError::Verification { check }),
        None => Ok(()),
    }
}
