//! Riffle shuffles and 1D permutations of whole columns.

use super::grid::{GridTransfer, MoveScript, RoutingError};

/// Column-level move: `cols[k]` lands on `dest[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ColumnMove {
    pub cols: Vec<i32>,
    pub dest: Vec<i32>,
}

impl ColumnMove {
    fn lift(&self, rows: &[i32]) -> GridTransfer {
        GridTransfer {
            rows: rows.to_vec(),
            cols: self.cols.clone(),
            row_dest: rows.to_vec(),
            col_dest: self.dest.clone(),
        }
    }
}

fn sorted_distinct_in(v: &[usize], n: usize) -> bool {
    v.windows(2).all(|w| w[0] < w[1]) && v.last().is_none_or(|&x| x < n)
}

/// Three-phase riffle on `n` columns: `selection` goes to scratch, the
/// rest compact onto the complement of `targets`, then the scratch
/// columns drop onto `targets`. Both lists are sorted positions.
pub(crate) fn riffle_moves(n: usize, selection: &[usize], targets: &[usize]) -> Result<Vec<ColumnMove>, RoutingError> {
    if selection.len() != targets.len() || !sorted_distinct_in(selection, n) || !sorted_distinct_in(targets, n) {
        return Err(RoutingError::BadSelection);
    }
    let s = selection.len();
    if s > n / 2 {
        return Err(RoutingError::SelectionTooLarge {
            selected: s,
            capacity: n / 2,
        });
    }
    if selection == targets {
        return Ok(Vec::new());
    }
    let as_i32 = |v: &[usize]| v.iter().map(|&x| x as i32).collect::<Vec<_>>();
    let mut in_sel = vec![false; n];
    let mut in_tgt = vec![false; n];
    selection.iter().for_each(|&x| in_sel[x] = true);
    targets.iter().for_each(|&x| in_tgt[x] = true);
    let rest: Vec<usize> = (0..n).filter(|&x| !in_sel[x]).collect();
    let rest_dest: Vec<usize> = (0..n).filter(|&x| !in_tgt[x]).collect();
    let scratch: Vec<i32> = (0..s).map(|k| (n + k) as i32).collect();
    let mut moves = vec![ColumnMove {
        cols: as_i32(selection),
        dest: scratch.clone(),
    }];
    if rest != rest_dest {
        moves.push(ColumnMove {
            cols: as_i32(&rest),
            dest: as_i32(&rest_dest),
        });
    }
    moves.push(ColumnMove {
        cols: scratch,
        dest: as_i32(targets),
    });
    Ok(moves)
}

/// Riffle shuffle of a single row of `n` atoms.
pub fn riffle_shuffle(n: usize, selection: &[usize], targets: &[usize]) -> Result<MoveScript, RoutingError> {
    let moves = riffle_moves(n, selection, targets)?;
    let mut script = MoveScript::new(n, 1);
    if !moves.is_empty() {
        script.riffles = 1;
    }
    script.transfers = moves.iter().map(|m| m.lift(&[0])).collect();
    Ok(script)
}

/// Stable partition by one destination bit per pass, least significant
/// first, so at most `ceil(log2 n)` riffles. Each pass sends the smaller
/// class to scratch.
pub(crate) fn permute_moves(sigma: &[usize]) -> Result<Vec<Vec<ColumnMove>>, RoutingError> {
    let n = sigma.len();
    let mut seen = vec![false; n];
    for &d in sigma {
        if d >= n || std::mem::replace(&mut seen[d], true) {
            return Err(RoutingError::NotAPermutation(n));
        }
    }
    let bits = usize::BITS - n.saturating_sub(1).leading_zeros();
    // order[pos] = destination of the column now at pos.
    let mut order = sigma.to_vec();
    let mut passes = Vec::new();
    for b in 0..bits {
        if order.iter().enumerate().all(|(p, &d)| p == d) {
            break;
        }
        let key = |d: usize| d >> b & 1 == 1;
        let zeros: Vec<usize> = (0..n).filter(|&p| !key(order[p])).collect();
        let ones: Vec<usize> = (0..n).filter(|&p| key(order[p])).collect();
        let z = zeros.len();
        if ones.iter().all(|&p| p >= z) {
            continue;
        }
        let moves = if ones.len() <= n / 2 {
            riffle_moves(n, &ones, &(z..n).collect::<Vec<_>>())?
        } else {
            riffle_moves(n, &zeros, &(0..z).collect::<Vec<_>>())?
        };
        passes.push(moves);
        order = zeros.iter().chain(&ones).map(|&p| order[p]).collect();
    }
    Ok(passes)
}

/// Column permutation lifted to every row of a `width x height` core.
pub(crate) fn permute_columns(sigma: &[usize], height: usize) -> Result<MoveScript, RoutingError> {
    let passes = permute_moves(sigma)?;
    let rows: Vec<i32> = (0..height as i32).collect();
    let mut script = MoveScript::new(sigma.len(), height);
    script.riffles = passes.len();
    script.transfers = passes.iter().flatten().map(|m| m.lift(&rows)).collect();
    Ok(script)
}

/// Moves the atom at position `i` to `sigma[i]` on a single row.
pub fn permute_1d(sigma: &[usize]) -> Result<MoveScript, RoutingError> {
    permute_columns(sigma, 1)
}
