//! Site lattice, grid transfers and move scripts.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RoutingError {
    #[error("selection of {selected} atoms exceeds the {capacity} scratch sites")]
    SelectionTooLarge { selected: usize, capacity: usize },
    #[error("selection and target lists differ in length or are not sorted, distinct and in range")]
    BadSelection,
    #[error("input is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("monomial exponents ({alpha}, {beta}) out of range for ell={ell}, m={m}")]
    MonomialRange { alpha: u32, beta: u32, ell: u32, m: u32 },
    #[error("transfer {0} reorders picked rows or columns")]
    OrderViolation(usize),
    #[error("transfer {transfer} drops an atom on occupied site ({x}, {y})")]
    Collision { transfer: usize, x: i32, y: i32 },
    #[error("transfer {transfer} moves an atom off the lattice to ({x}, {y})")]
    OutOfBounds { transfer: usize, x: i32, y: i32 },
    #[error("script leaves atoms outside the core region")]
    Unfinished,
    #[error("routing does not match the check supports, first mismatch at check {check}")]
    Verification { check: usize },
    #[error("code has no two-block group structure")]
    NotTwoBlock,
}

/// Rectangular array of trap sites. The core occupies columns `0..width`
/// and rows `0..height`; scratch columns extend to the right and scratch
/// rows upwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    pub width: usize,
    pub height: usize,
    pub scratch_cols: usize,
    pub scratch_rows: usize,
    sites: Vec<Option<u32>>,
}

impl Lattice {
    /// Core filled with atoms labeled `y * width + x`.
    pub fn filled(width: usize, height: usize, scratch_cols: usize, scratch_rows: usize) -> Self {
        let mut out = Self {
            width,
            height,
            scratch_cols,
            scratch_rows,
            sites: vec![None; (width + scratch_cols) * (height + scratch_rows)],
        };
        for y in 0..height {
            for x in 0..width {
                let s = out.slot(x, y);
                out.sites[s] = Some((y * width + x) as u32);
            }
        }
        out
    }

    pub fn total_width(&self) -> usize {
        self.width + self.scratch_cols
    }

    pub fn total_height(&self) -> usize {
        self.height + self.scratch_rows
    }

    fn slot(&self, x: usize, y: usize) -> usize {
        y * self.total_width() + x
    }

    fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.total_width() && (y as usize) < self.total_height()
    }

    pub fn get(&self, x: usize, y: usize) -> Option<u32> {
        self.sites[self.slot(x, y)]
    }

    /// Final site index `y * width + x` of every atom, if all are in the core.
    pub fn core_positions(&self) -> Option<Vec<usize>> {
        let mut out = vec![usize::MAX; self.width * self.height];
        for y in 0..self.total_height() {
            for x in 0..self.total_width() {
                if let Some(a) = self.get(x, y) {
                    if x >= self.width || y >= self.height {
                        return None;
                    }
                    out[a as usize] = y * self.width + x;
                }
            }
        }
        Some(out)
    }

    /// Scratch columns and rows currently holding atoms.
    fn scratch_extent(&self) -> (usize, usize) {
        let (mut cols, mut rows) = (0, 0);
        for y in 0..self.total_height() {
            for x in 0..self.total_width() {
                if self.get(x, y).is_some() {
                    cols = cols.max((x + 1).saturating_sub(self.width));
                    rows = rows.max((y + 1).saturating_sub(self.height));
                }
            }
        }
        (cols, rows)
    }

    /// Text grid, top row first; atoms by id, empty sites as `.`.
    pub fn render(&self) -> String {
        let w = (self.width * self.height).max(1).to_string().len();
        let mut out = String::new();
        for y in (0..self.total_height()).rev() {
            let cells: Vec<String> = (0..self.total_width())
                .map(|x| match self.get(x, y) {
                    Some(a) => format!("{a:>w$}"),
                    None => format!("{:>w$}", "."),
                })
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

/// One pickup-move-dropoff of the atoms in `rows x cols`. Row `rows[k]`
/// lands on `row_dest[k]` and column `cols[k]` on `col_dest[k]`; both
/// lists must stay strictly increasing so AOD lines never cross.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridTransfer {
    pub rows: Vec<i32>,
    pub cols: Vec<i32>,
    pub row_dest: Vec<i32>,
    pub col_dest: Vec<i32>,
}

fn strictly_increasing(v: &[i32]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl GridTransfer {
    /// Rigid translation of a subgrid.
    pub fn translate(rows: Vec<i32>, cols: Vec<i32>, dx: i32, dy: i32) -> Self {
        let row_dest = rows.iter().map(|r| r + dy).collect();
        let col_dest = cols.iter().map(|c| c + dx).collect();
        Self {
            rows,
            cols,
            row_dest,
            col_dest,
        }
    }

    pub fn preserves_order(&self) -> bool {
        self.rows.len() == self.row_dest.len()
            && self.cols.len() == self.col_dest.len()
            && strictly_increasing(&self.rows)
            && strictly_increasing(&self.cols)
            && strictly_increasing(&self.row_dest)
            && strictly_increasing(&self.col_dest)
    }

    fn apply(&self, lattice: &mut Lattice, index: usize) -> Result<(), RoutingError> {
        if !self.preserves_order() {
            return Err(RoutingError::OrderViolation(index));
        }
        let mut carried = Vec::new();
        for (ri, &y) in self.rows.iter().enumerate() {
            for (ci, &x) in self.cols.iter().enumerate() {
                if !lattice.in_bounds(x, y) {
                    continue;
                }
                let slot = lattice.slot(x as usize, y as usize);
                if let Some(a) = lattice.sites[slot].take() {
                    carried.push((a, self.col_dest[ci], self.row_dest[ri]));
                }
            }
        }
        for (a, x, y) in carried {
            if !lattice.in_bounds(x, y) {
                return Err(RoutingError::OutOfBounds { transfer: index, x, y });
            }
            let slot = lattice.slot(x as usize, y as usize);
            if lattice.sites[slot].is_some() {
                return Err(RoutingError::Collision { transfer: index, x, y });
            }
            lattice.sites[slot] = Some(a);
        }
        Ok(())
    }

    /// `rows=<set> cols=<set> dy=<deltas> dx=<deltas>`.
    pub fn to_line(&self) -> String {
        let dy: Vec<i32> = self.rows.iter().zip(&self.row_dest).map(|(a, b)| b - a).collect();
        let dx: Vec<i32> = self.cols.iter().zip(&self.col_dest).map(|(a, b)| b - a).collect();
        format!(
            "move rows={} cols={} dy={} dx={}",
            compact_set(&self.rows),
            compact_set(&self.cols),
            compact_deltas(&dy),
            compact_deltas(&dx)
        )
    }
}

fn compact_set(v: &[i32]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[j] + 1 {
            j += 1;
        }
        parts.push(if j > i {
            format!("{}-{}", v[i], v[j])
        } else {
            v[i].to_string()
        });
        i = j + 1;
    }
    parts.join(",")
}

fn compact_deltas(d: &[i32]) -> String {
    if d.windows(2).all(|w| w[0] == w[1]) {
        d.first().map_or("0".into(), |x| format!("{x:+}"))
    } else {
        d.iter().map(|x| format!("{x:+}")).collect::<Vec<_>>().join(",")
    }
}

/// Counts and scratch use of a script, for cost models and JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScriptSummary {
    pub moves: usize,
    pub riffles: usize,
    pub row_stages: usize,
    pub scratch_cols: usize,
    pub scratch_rows: usize,
}

/// Ordered grid transfers on a `width x height` core.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MoveScript {
    pub width: usize,
    pub height: usize,
    pub transfers: Vec<GridTransfer>,
    /// Riffle shuffles used by column permutations.
    pub riffles: usize,
    /// Distinct per-row shift stages of right actions.
    pub row_stages: usize,
}

impl MoveScript {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.transfers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transfers.is_empty()
    }

    pub fn extend(&mut self, other: MoveScript) {
        self.transfers.extend(other.transfers);
        self.riffles += other.riffles;
        self.row_stages += other.row_stages;
    }

    /// Lattice with enough scratch for any script in this module.
    pub fn fresh_lattice(&self) -> Lattice {
        Lattice::filled(self.width, self.height, self.width, self.height)
    }

    /// Runs every transfer, returning the scratch high-water mark
    /// (columns, rows).
    pub fn execute(&self, lattice: &mut Lattice) -> Result<(usize, usize), RoutingError> {
        let mut high = lattice.scratch_extent();
        for (i, t) in self.transfers.iter().enumerate() {
            t.apply(lattice, i)?;
            let (c, r) = lattice.scratch_extent();
            high = (high.0.max(c), high.1.max(r));
        }
        Ok(high)
    }

    /// `perm[a]` is the final core site of the atom starting at site `a`.
    pub fn permutation(&self) -> Result<Vec<usize>, RoutingError> {
        let mut lattice = self.fresh_lattice();
        self.execute(&mut lattice)?;
        lattice.core_positions().ok_or(RoutingError::Unfinished)
    }

    pub fn summary(&self) -> Result<ScriptSummary, RoutingError> {
        let mut lattice = self.fresh_lattice();
        let (scratch_cols, scratch_rows) = self.execute(&mut lattice)?;
        Ok(ScriptSummary {
            moves: self.len(),
            riffles: self.riffles,
            row_stages: self.row_stages,
            scratch_cols,
            scratch_rows,
        })
    }

    /// One line per transfer.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.transfers {
            let _ = writeln!(out, "{}", t.to_line());
        }
        out
    }

    /// Occupancy grid before the first transfer and after each one.
    pub fn frames(&self) -> Result<Vec<String>, RoutingError> {
        let mut lattice = self.fresh_lattice();
        let mut out = vec![lattice.render()];
        for (i, t) in self.transfers.iter().enumerate() {
            t.apply(&mut lattice, i)?;
            out.push(lattice.render());
        }
        Ok(out)
    }
}
