//! Syndrome-extraction circuits with layered noise annotations.

use std::fmt::Write as _;

use thiserror::Error;

use crate::code::{CheckType, CssCode};

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
}

/// One circuit instruction. Qubits `0..n` are data, `n..` ancillas.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    /// Reset to `|0>`.
    Reset(Vec<u32>),
    H(Vec<u32>),
    Cz(Vec<(u32, u32)>),
    /// Control first.
    Cx(Vec<(u32, u32)>),
    /// Z-basis measurement; each outcome is flipped with probability `flip`.
    Measure {
        targets: Vec<u32>,
        flip: f64,
    },
    Depolarize1 {
        targets: Vec<u32>,
        p: f64,
    },
    Depolarize2 {
        pairs: Vec<(u32, u32)>,
        p: f64,
    },
    XError {
        targets: Vec<u32>,
        p: f64,
    },
    /// Layer boundary.
    Tick,
}

impl Op {
    fn touched(&self) -> Vec<u32> {
        match self {
            Op::Reset(t) | Op::H(t) => t.clone(),
            Op::Measure { targets, .. } => targets.clone(),
            Op::Cz(pairs) | Op::Cx(pairs) => pairs.iter().flat_map(|&(a, b)| [a, b]).collect(),
            _ => Vec::new(),
        }
    }
}

/// Per-stage CZ layers as `(check, data qubit)` pairs. Each layer touches
/// every check and data qubit at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzSchedule {
    pub x_layers: Vec<Vec<(usize, usize)>>,
    pub z_layers: Vec<Vec<(usize, usize)>>,
}

impl CzSchedule {
    /// Monomial order of a two-block code: layer `t` couples every check to
    /// the qubit reached through monomial `t`, taking `a`'s monomials first.
    pub fn monomial_order(code: &CssCode) -> Option<Self> {
        let tb = code.two_block.as_ref()?;
        let spec = tb.spec;
        let half = spec.order();
        let mut x_layers = Vec::new();
        let mut z_layers = Vec::new();
        for g in tb.a.monomials() {
            let gi = g.inverse();
            // X-check c meets horizontal qubit g^-1 c; Z-check c meets
            // vertical qubit g c.
            x_layers.push(spec.elements().map(|c| (c.index(), (gi * c).index())).collect());
            z_layers.push(spec.elements().map(|c| (c.index(), half + (*g * c).index())).collect());
        }
        for g in tb.b.monomials() {
            let gi = g.inverse();
            x_layers.push(spec.elements().map(|c| (c.index(), half + (c * gi).index())).collect());
            z_layers.push(spec.elements().map(|c| (c.index(), (c * *g).index())).collect());
        }
        Some(Self { x_layers, z_layers })
    }

    /// Proper edge coloring of each Tanner graph with max-degree colors.
    pub fn edge_coloring(code: &CssCode) -> Self {
        Self {
            x_layers: color_tanner_edges(&code.check_supports(CheckType::X), code.n()),
            z_layers: color_tanner_edges(&code.check_supports(CheckType::Z), code.n()),
        }
    }

    /// Monomial order when available, otherwise edge coloring.
    pub fn for_code(code: &CssCode) -> Self {
        Self::monomial_order(code).unwrap_or_else(|| Self::edge_coloring(code))
    }

    pub fn layers(&self, side: CheckType) -> &[Vec<(usize, usize)>] {
        match side {
            CheckType::X => &self.x_layers,
            CheckType::Z => &self.z_layers,
        }
    }

    /// Data qubits visited by `check`, in gate order.
    pub fn check_order(&self, side: CheckType, check: usize) -> Vec<usize> {
        self.layers(side)
            .iter()
            .flat_map(|layer| layer.iter().filter(|&&(c, _)| c == check).map(|&(_, q)| q))
            .collect()
    }
}

/// Bipartite edge coloring by alternating-path recoloring; uses exactly
/// the maximum degree many colors.
fn color_tanner_edges(supports: &[Vec<usize>], n: usize) -> Vec<Vec<(usize, usize)>> {
    let checks = supports.len();
    let mut degree = vec![0usize; n];
    for s in supports {
        for &q in s {
            degree[q] += 1;
        }
    }
    let colors = supports
        .iter()
        .map(Vec::len)
        .chain(degree.iter().copied())
        .max()
        .unwrap_or(0);
    // Vertices: checks are 0..checks, qubits checks..checks+n.
    let total = checks + n;
    let mut at = vec![vec![usize::MAX; colors]; total];
    for (c, s) in supports.iter().enumerate() {
        for &q in s {
            let (u, v) = (c, checks + q);
            let a = (0..colors).find(|&k| at[u][k] == usize::MAX).unwrap();
            let b = (0..colors).find(|&k| at[v][k] == usize::MAX).unwrap();
            if at[v][a] != usize::MAX {
                // Swap colors a and b along the path starting at v.
                let mut path = Vec::new();
                let mut x = v;
                let mut col = a;
                while at[x][col] != usize::MAX {
                    let y = at[x][col];
                    path.push((x, y, col));
                    x = y;
                    col = if col == a { b } else { a };
                }
                for &(x, y, _) in &path {
                    if at[x][a] == y {
                        at[x][a] = usize::MAX;
                    }
                    if at[x][b] == y {
                        at[x][b] = usize::MAX;
                    }
                    if at[y][a] == x {
                        at[y][a] = usize::MAX;
                    }
                    if at[y][b] == x {
                        at[y][b] = usize::MAX;
                    }
                }
                for &(x, y, col) in &path {
                    let new = if col == a { b } else { a };
                    at[x][new] = y;
                    at[y][new] = x;
                }
            }
            at[u][a] = v;
            at[v][a] = u;
        }
    }
    let mut layers = vec![Vec::new(); colors];
    for (c, slots) in at.iter().take(checks).enumerate() {
        for (k, &v) in slots.iter().enumerate() {
            if v != usize::MAX {
                layers[k].push((c, v - checks));
            }
        }
    }
    layers
}

/// A layered syndrome-extraction circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyCircuit {
    pub ops: Vec<Op>,
    pub num_data: usize,
    pub num_ancilla: usize,
    pub x_checks: usize,
    pub z_checks: usize,
}

impl NoisyCircuit {
    pub fn num_qubits(&self) -> usize {
        self.num_data + self.num_ancilla
    }

    /// Measurements per execution, X-check outcomes first.
    pub fn num_measurements(&self) -> usize {
        self.ops
            .iter()
            .map(|op| match op {
                Op::Measure { targets, .. } => targets.len(),
                _ => 0,
            })
            .sum()
    }

    /// Line-per-instruction dump in a stim-like syntax.
    pub fn to_text(&self) -> String {
        fn list(s: &mut String, t: &[u32]) {
            for q in t {
                let _ = write!(s, " {q}");
            }
        }
        fn pairs(s: &mut String, t: &[(u32, u32)]) {
            for (a, b) in t {
                let _ = write!(s, " {a} {b}");
            }
        }
        let mut s = String::new();
        for op in &self.ops {
            match op {
                Op::Reset(t) => {
                    s.push('R');
                    list(&mut s, t);
                }
                Op::H(t) => {
                    s.push('H');
                    list(&mut s, t);
                }
                Op::Cz(p) => {
                    s.push_str("CZ");
                    pairs(&mut s, p);
                }
                Op::Cx(p) => {
                    s.push_str("CX");
                    pairs(&mut s, p);
                }
                Op::Measure { targets, flip } => {
                    if *flip > 0.0 {
                        let _ = write!(s, "M({flip})");
                    } else {
                        s.push('M');
                    }
                    list(&mut s, targets);
                }
                Op::Depolarize1 { targets, p } => {
                    let _ = write!(s, "DEPOLARIZE1({p})");
                    list(&mut s, targets);
                }
                Op::Depolarize2 { pairs: pr, p } => {
                    let _ = write!(s, "DEPOLARIZE2({p})");
                    pairs(&mut s, pr);
                }
                Op::XError { targets, p } => {
                    let _ = write!(s, "X_ERROR({p})");
                    list(&mut s, targets);
                }
                Op::Tick => s.push_str("TICK"),
            }
            s.push('\n');
        }
        s
    }

    /// Op index after which a fault sits between CZ layers `t` and `t + 1`
    /// of a stage (`t = 0`: before the first CZ layer).
    pub fn cz_boundary(&self, stage: CheckType, t: usize) -> Option<usize> {
        let measures: Vec<usize> = self
            .ops
            .iter()
            .enumerate()
            .filter(|(_, op)| matches!(op, Op::Measure { .. }))
            .map(|(i, _)| i)
            .collect();
        let (start, end) = match stage {
            CheckType::X => (0, *measures.first()?),
            CheckType::Z => (*measures.first()?, *measures.get(1)?),
        };
        let czs: Vec<usize> = (start..end).filter(|&i| matches!(self.ops[i], Op::Cz(_))).collect();
        if czs.is_empty() || t > czs.len() {
            return None;
        }
        Some(if t == 0 { czs[0] - 1 } else { czs[t - 1] })
    }
}

/// One noiseless cycle: X-stage then Z-stage, ancillas shared between the
/// two stages.
pub fn build_se_round(code: &CssCode, schedule: &CzSchedule) -> NoisyCircuit {
    let n = code.n();
    let mx = code.h_x.rows();
    let mz = code.h_z.rows();
    let na = mx.max(mz);
    let anc = |c: usize| (n + c) as u32;
    let data: Vec<u32> = (0..n as u32).collect();
    let mut ops = Vec::new();
    let layer = |ops: &mut Vec<Op>, op: Op| {
        ops.push(op);
        ops.push(Op::Tick);
    };
    for stage in [CheckType::X, CheckType::Z] {
        let m = if stage == CheckType::X { mx } else { mz };
        let ancillas: Vec<u32> = (0..m).map(anc).collect();
        let rotated: Vec<u32> = if stage == CheckType::X {
            ancillas.iter().chain(&data).copied().collect()
        } else {
            ancillas.clone()
        };
        layer(&mut ops, Op::Reset(ancillas.clone()));
        layer(&mut ops, Op::H(rotated.clone()));
        for cz in schedule.layers(stage) {
            layer(&mut ops, Op::Cz(cz.iter().map(|&(c, q)| (anc(c), q as u32)).collect()));
        }
        layer(&mut ops, Op::H(rotated));
        layer(
            &mut ops,
            Op::Measure {
                targets: ancillas,
                flip: 0.0,
            },
        );
    }
    NoisyCircuit {
        ops,
        num_data: n,
        num_ancilla: na,
        x_checks: mx,
        z_checks: mz,
    }
}

/// Annotates a layered circuit with the standard depolarizing model:
/// `p/10` on every 1q gate and idle qubit per layer, `p` on every 2q gate,
/// and `p` flips on measurements and resets.
pub fn apply_noise_model(circuit: &NoisyCircuit, p: f64) -> Result<NoisyCircuit, CircuitError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CircuitError::Probability(p));
    }
    let mut out = NoisyCircuit {
        ops: Vec::new(),
        ..circuit.clone()
    };
    if p == 0.0 {
        out.ops = circuit.ops.clone();
        return Ok(out);
    }
    let total = circuit.num_qubits();
    let single = p / 10.0;
    let mut touched = vec![false; total];
    let mut pending: Vec<Op> = Vec::new();
    let flush = |out: &mut NoisyCircuit, pending: &mut Vec<Op>, touched: &mut Vec<bool>| {
        let mut noise = Vec::new();
        for op in pending.iter() {
            match op {
                Op::Reset(t) => {
                    noise.push(Op::XError { targets: t.clone(), p });
                }
                Op::H(t) => noise.push(Op::Depolarize1 {
                    targets: t.clone(),
                    p: single,
                }),
                Op::Cz(pr) | Op::Cx(pr) => noise.push(Op::Depolarize2 { pairs: pr.clone(), p }),
                _ => {}
            }
        }
        let idle: Vec<u32> = (0..total as u32).filter(|&q| !touched[q as usize]).collect();
        // Idle noise lands before a measurement so it can affect it.
        let has_measure = pending.iter().any(|op| matches!(op, Op::Measure { .. }));
        if has_measure && !idle.is_empty() {
            out.ops.push(Op::Depolarize1 {
                targets: idle.clone(),
                p: single,
            });
        }
        for op in pending.drain(..) {
            out.ops.push(match op {
                Op::Measure { targets, .. } => Op::Measure { targets, flip: p },
                other => other,
            });
        }
        out.ops.extend(noise);
        if !has_measure && !idle.is_empty() {
            out.ops.push(Op::Depolarize1 {
                targets: idle,
                p: single,
            });
        }
        out.ops.push(Op::Tick);
        touched.iter_mut().for_each(|t| *t = false);
    };
    for op in &circuit.ops {
        match op {
            Op::Tick => flush(&mut out, &mut pending, &mut touched),
            gate => {
                for q in gate.touched() {
                    touched[q as usize] = true;
                }
                pending.push(gate.clone());
            }
        }
    }
    if !pending.is_empty() {
        flush(&mut out, &mut pending, &mut touched);
    }
    Ok(out)
}

/// Counts of noise sites per kind: (1q depolarize, 2q depolarize,
/// measurement flips, reset flips).
pub fn noise_site_counts(circuit: &NoisyCircuit) -> (usize, usize, usize, usize) {
    let mut counts = (0, 0, 0, 0);
    for op in &circuit.ops {
        match op {
            Op::Depolarize1 { targets, .. } => counts.0 += targets.len(),
            Op::Depolarize2 { pairs, .. } => counts.1 += pairs.len(),
            Op::Measure { targets, flip } if *flip > 0.0 => counts.2 += targets.len(),
            Op::XError { targets, .. } => counts.3 += targets.len(),
            _ => {}
        }
    }
    counts
}
