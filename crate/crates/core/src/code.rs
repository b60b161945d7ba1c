//! CSS codes: two-block group-algebra codes, the 4D toric code and the
//! shipped fixture table.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec};
use crate::group::{left_regular, right_regular, GroupAlgebraElement, GroupError, GroupSpec};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("h_x and h_z have {0} and {1} columns")]
    ColumnMismatch(usize, usize),
    #[error("h_x * h_z^T is nonzero; not a CSS code")]
    NotOrthogonal,
    #[error("unknown fixture '{0}'")]
    UnknownFixture(String),
    #[error("fixture {name}: built [[{got_n},{got_k}]] but table lists [[{n},{k}]]")]
    FixtureIntegrity {
        name: String,
        n: usize,
        k: usize,
        got_n: usize,
        got_k: usize,
    },
    #[error("malformed fixture line '{line}': {reason}")]
    FixtureFormat { line: String, reason: String },
    #[error("4D toric code needs L >= 2 (got {0})")]
    ToricSize(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeFamily {
    Zsz,
    Bb,
    Toric4d,
    Custom,
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeFamily::Zsz => "zsz",
            CodeFamily::Bb => "bb",
            CodeFamily::Toric4d => "toric4d",
            CodeFamily::Custom => "custom",
        })
    }
}

/// Construction data for `H_X = (L[a] | R[b])`, `H_Z = (R[b]^T | L[a]^T)`.
#[derive(Debug, Clone)]
pub struct TwoBlock {
    pub spec: GroupSpec,
    pub a: GroupAlgebraElement,
    pub b: GroupAlgebraElement,
}

/// Which parity checks a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CheckType {
    X,
    Z,
}

impl CheckType {
    pub fn dual(self) -> CheckType {
        match self {
            CheckType::X => CheckType::Z,
            CheckType::Z => CheckType::X,
        }
    }
}

impl std::str::FromStr for CheckType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "X" | "x" => Ok(CheckType::X),
            "Z" | "z" => Ok(CheckType::Z),
            other => Err(format!("check type must be X or Z, got '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CssCode {
    pub name: String,
    pub family: CodeFamily,
    pub h_x: BitMatrix,
    pub h_z: BitMatrix,
    /// `k x n`; row `i` pairs with row `i` of `logical_z`.
    pub logical_x: BitMatrix,
    pub logical_z: BitMatrix,
    pub two_block: Option<TwoBlock>,
    pub toric_size: Option<usize>,
}

impl CssCode {
    /// Validates orthogonality and computes logical bases.
    pub fn from_checks(
        name: impl Into<String>,
        family: CodeFamily,
        h_x: BitMatrix,
        h_z: BitMatrix,
    ) -> Result<Self, CodeError> {
        if h_x.cols() != h_z.cols() {
            return Err(CodeError::ColumnMismatch(h_x.cols(), h_z.cols()));
        }
        if !h_x.matmul(&h_z.transpose())?.is_zero() {
            return Err(CodeError::NotOrthogonal);
        }
        let (logical_x, logical_z) = compute_logicals(&h_x, &h_z);
        Ok(Self {
            name: name.into(),
            family,
            h_x,
            h_z,
            logical_x,
            logical_z,
            two_block: None,
            toric_size: None,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.h_x.cols()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.logical_x.rows()
    }

    pub fn checks(&self, side: CheckType) -> &BitMatrix {
        match side {
            CheckType::X => &self.h_x,
            CheckType::Z => &self.h_z,
        }
    }

    /// Logical operators of the given Pauli type.
    pub fn logicals(&self, side: CheckType) -> &BitMatrix {
        match side {
            CheckType::X => &self.logical_x,
            CheckType::Z => &self.logical_z,
        }
    }

    /// Qubit supports of every check row.
    pub fn check_supports(&self, side: CheckType) -> Vec<Vec<usize>> {
        let h = self.checks(side);
        (0..h.rows()).map(|r| h.row_support(r)).collect()
    }

    /// Check indices touching each qubit.
    pub fn qubit_checks(&self, side: CheckType) -> Vec<Vec<usize>> {
        self.checks(side).col_supports()
    }

    /// `(min, max)` over row weights.
    pub fn check_weight_range(&self, side: CheckType) -> (usize, usize) {
        let h = self.checks(side);
        let w: Vec<usize> = (0..h.rows()).map(|r| h.row_weight(r)).collect();
        (
            w.iter().copied().min().unwrap_or(0),
            w.iter().copied().max().unwrap_or(0),
        )
    }

    /// `(min, max)` over qubit degrees.
    pub fn qubit_degree_range(&self, side: CheckType) -> (usize, usize) {
        let w = self.checks(side).col_weights();
        (
            w.iter().copied().min().unwrap_or(0),
            w.iter().copied().max().unwrap_or(0),
        )
    }

    /// Whether an `X`-type (`side = X`) or `Z`-type data error commutes
    /// with every logical of the opposite type.
    pub fn is_logically_trivial(&self, side: CheckType, error: &BitVec) -> bool {
        let logicals = self.logicals(side.dual());
        (0..logicals.rows()).all(|r| !crate::gf2::parity_and(logicals.row_words(r), error.words()))
    }

    pub fn summary(&self) -> CodeSummary {
        let (wx_min, wx_max) = self.check_weight_range(CheckType::X);
        let (wz_min, wz_max) = self.check_weight_range(CheckType::Z);
        let (dx_min, dx_max) = self.qubit_degree_range(CheckType::X);
        let (dz_min, dz_max) = self.qubit_degree_range(CheckType::Z);
        CodeSummary {
            name: self.name.clone(),
            family: self.family,
            n: self.n(),
            k: self.k(),
            x_checks: self.h_x.rows(),
            z_checks: self.h_z.rows(),
            x_check_weight: [wx_min, wx_max],
            z_check_weight: [wz_min, wz_max],
            qubit_x_degree: [dx_min, dx_max],
            qubit_z_degree: [dz_min, dz_max],
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CodeSummary {
    pub name: String,
    pub family: CodeFamily,
    pub n: usize,
    pub k: usize,
    pub x_checks: usize,
    pub z_checks: usize,
    pub x_check_weight: [usize; 2],
    pub z_check_weight: [usize; 2],
    pub qubit_x_degree: [usize; 2],
    pub qubit_z_degree: [usize; 2],
}

impl From<crate::gf2::Gf2Error> for CodeError {
    fn from(e: crate::gf2::Gf2Error) -> Self {
        match e {
            crate::gf2::Gf2Error::Shape(_) => CodeError::NotOrthogonal,
            crate::gf2::Gf2Error::Parse(s) => CodeError::FixtureFormat {
                line: String::new(),
                reason: s,
            },
        }
    }
}

/// Two-block code with `A = L[a]`, `B = R[b]`.
pub fn build_two_block(
    name: impl Into<String>,
    spec: GroupSpec,
    a: GroupAlgebraElement,
    b: GroupAlgebraElement,
) -> Result<CssCode, CodeError> {
    if *a.spec() != spec || *b.spec() != spec {
        return Err(GroupError::SpecMismatch.into());
    }
    let la = left_regular(&a);
    let rb = right_regular(&b);
    let h_x = la.hstack(&rb)?;
    let h_z = rb.transpose().hstack(&la.transpose())?;
    let family = if spec.is_abelian() {
        CodeFamily::Bb
    } else {
        CodeFamily::Zsz
    };
    let mut code = CssCode::from_checks(name, family, h_x, h_z)?;
    code.two_block = Some(TwoBlock { spec, a, b });
    Ok(code)
}

/// Parses polynomials and builds a two-block code.
pub fn build_from_text(
    name: impl Into<String>,
    ell: u32,
    m: u32,
    q: u32,
    a: &str,
    b: &str,
) -> Result<CssCode, CodeError> {
    let spec = GroupSpec::new(ell, m, q)?;
    let a = GroupAlgebraElement::parse(spec, a)?;
    let b = GroupAlgebraElement::parse(spec, b)?;
    build_two_block(name, spec, a, b)
}

/// 4D toric code on the periodic `L^4` lattice: qubits on plaquettes,
/// X-checks on edges, Z-checks on cubes.
pub fn build_toric_4d(size: usize) -> Result<CssCode, CodeError> {
    if size < 2 {
        return Err(CodeError::ToricSize(size));
    }
    let l = size;
    let cells = l.pow(4);
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
    let pair_index = |a: usize, b: usize| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        pairs.iter().position(|&p| p == (a, b)).unwrap()
    };
    let shift = |v: usize, dir: usize| {
        let stride = l.pow(dir as u32);
        let coord = (v / stride) % l;
        v - coord * stride + ((coord + 1) % l) * stride
    };
    let face = |v: usize, a: usize, b: usize| pair_index(a, b) * cells + v;
    let n = 6 * cells;

    // Edge (v, a) lies on faces (v, {a,b}) and (v - e_b, {a,b}).
    let mut h_x = BitMatrix::zeros(4 * cells, n);
    // Cube (v, missing direction) has faces (v, pair) and (v + e_r, pair).
    let mut h_z = BitMatrix::zeros(4 * cells, n);
    for v in 0..cells {
        for (a, b) in pairs.iter().copied() {
            let f = face(v, a, b);
            h_x.flip(a * cells + v, f);
            h_x.flip(a * cells + shift(v, b), f);
            h_x.flip(b * cells + v, f);
            h_x.flip(b * cells + shift(v, a), f);
        }
        for missing in 0..4 {
            let dirs: Vec<usize> = (0..4).filter(|&d| d != missing).collect();
            let row = missing * cells + v;
            for &r in &dirs {
                let (a, b) = {
                    let rest: Vec<usize> = dirs.iter().copied().filter(|&d| d != r).collect();
                    (rest[0], rest[1])
                };
                h_z.flip(row, face(v, a, b));
                h_z.flip(row, face(shift(v, r), a, b));
            }
        }
    }
    let mut code = CssCode::from_checks(format!("Toric4D-L{l}"), CodeFamily::Toric4d, h_x, h_z)?;
    code.toric_size = Some(l);
    Ok(code)
}

/// Row-echelon basis that can reduce vectors against its span.
struct SpanReducer {
    rows: Vec<(usize, BitVec)>,
}

impl SpanReducer {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn reduce(&self, v: &mut BitVec) {
        for (pivot, row) in &self.rows {
            if v.get(*pivot) {
                v.xor_assign(row);
            }
        }
    }

    /// Inserts `v` if independent; returns whether it was.
    fn insert(&mut self, v: &BitVec) -> bool {
        let mut r = v.clone();
        self.reduce(&mut r);
        match r.first_one() {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }
}

/// Representatives of `ker(other)` independent modulo `rowspace(stab)`.
fn quotient_basis(other: &BitMatrix, stab: &BitMatrix) -> Vec<BitVec> {
    let kernel = other.nullspace();
    let mut span = SpanReducer::new();
    for r in 0..stab.rows() {
        span.insert(&stab.row(r));
    }
    let mut out = Vec::new();
    for r in 0..kernel.rows() {
        let v = kernel.row(r);
        if span.insert(&v) {
            out.push(v);
        }
    }
    out
}

/// Logical bases `(logical_x, logical_z)` with `logical_x * logical_z^T = I`.
///
/// `logical_z` spans `ker(h_x) / rowspace(h_z)` and `logical_x` spans
/// `ker(h_z) / rowspace(h_x)`.
pub fn compute_logicals(h_x: &BitMatrix, h_z: &BitMatrix) -> (BitMatrix, BitMatrix) {
    let n = h_x.cols();
    let zs = quotient_basis(h_x, h_z);
    let xs = quotient_basis(h_z, h_x);
    assert_eq!(zs.len(), xs.len(), "logical counts disagree");
    let logical_z = BitMatrix::from_rows(n, &zs);
    let raw_x = BitMatrix::from_rows(n, &xs);
    let pairing = raw_x.matmul(&logical_z.transpose()).expect("same column count");
    let inv = pairing
        .inverse()
        .expect("symplectic pairing of logical bases is nondegenerate");
    let logical_x = inv.matmul(&raw_x).expect("square pairing");
    (logical_x, logical_z)
}

/// One row of the shipped code table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeFixture {
    pub name: String,
    pub ell: u32,
    pub m: u32,
    pub q: u32,
    pub a: String,
    pub b: String,
    pub n: usize,
    pub k: usize,
    pub d_bound: usize,
}

const FIXTURE_TABLE: &str = include_str!("fixtures.txt");

impl CodeFixture {
    pub fn parse_line(line: &str) -> Result<Self, CodeError> {
        let bad = |reason: &str| CodeError::FixtureFormat {
            line: line.to_string(),
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let [name, params, a, b, nkd] = fields[..] else {
            return Err(bad("expected 5 '|'-separated fields"));
        };
        let nums = |s: &str| -> Result<Vec<usize>, CodeError> {
            s.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad("non-numeric parameter")))
                .collect()
        };
        let p = nums(params)?;
        let c = nums(nkd)?;
        let (&[ell, m, q], &[n, k, d_bound]) = (&p[..], &c[..]) else {
            return Err(bad("expected 'ell m q' and 'n k d_bound'"));
        };
        Ok(Self {
            name: name.to_string(),
            ell: ell as u32,
            m: m as u32,
            q: q as u32,
            a: a.to_string(),
            b: b.to_string(),
            n,
            k,
            d_bound,
        })
    }

    pub fn to_line(&self) -> String {
        format!(
            "{} | {} {} {} | {} | {} | {} {} {}",
            self.name, self.ell, self.m, self.q, self.a, self.b, self.n, self.k, self.d_bound
        )
    }

    /// Builds the code without checking the listed parameters.
    pub fn build_unchecked(&self) -> Result<CssCode, CodeError> {
        build_from_text(&self.name, self.ell, self.m, self.q, &self.a, &self.b)
    }

    /// Builds the code and checks `(n, k)` against the listed values.
    pub fn build(&self) -> Result<CssCode, CodeError> {
        let code = self.build_unchecked()?;
        if code.n() != self.n || code.k() != self.k {
            return Err(CodeError::FixtureIntegrity {
                name: self.name.clone(),
                n: self.n,
                k: self.k,
                got_n: code.n(),
                got_k: code.k(),
            });
        }
        Ok(code)
    }
}

/// Parses a fixture file: one record per line, `#` comments.
pub fn parse_fixtures(text: &str) -> Result<Vec<CodeFixture>, CodeError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(CodeFixture::parse_line)
        .collect()
}

/// Every shipped fixture, ZSZ codes first.
pub fn fixtures() -> Vec<CodeFixture> {
    parse_fixtures(FIXTURE_TABLE).expect("shipped fixture table is well formed")
}

pub fn fixture(name: &str) -> Result<CodeFixture, CodeError> {
    fixtures()
        .into_iter()
        .find(|f| f.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| CodeError::UnknownFixture(name.to_string()))
}

pub fn load_fixture(name: &str) -> Result<CssCode, CodeError> {
    fixture(name)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_table_round_trips() {
        for f in fixtures() {
            assert_eq!(CodeFixture::parse_line(&f.to_line()).unwrap(), f);
        }
        assert_eq!(fixtures().len(), 16);
        assert!(matches!(fixture("NOPE"), Err(CodeError::UnknownFixture(_))));
        assert!(CodeFixture::parse_line("a | 1 2 | x | y | 1 2 3").is_err());
    }

    #[test]
    fn integrity_error_reported() {
        let mut f = fixture("ZSZ80").unwrap();
        f.k = 4;
        assert!(matches!(f.build(), Err(CodeError::FixtureIntegrity { .. })));
    }

    #[test]
    fn trivial_code_has_no_logicals() {
        let id = BitMatrix::identity(2);
        let (lx, lz) = compute_logicals(&id, &BitMatrix::zeros(0, 2));
        // h_x = I leaves no Z logicals; with no Z checks there are no X
        // logicals outside rowspace(h_x) either.
        assert_eq!((lx.rows(), lz.rows()), (0, 0));
    }

    #[test]
    fn four_qubit_code_matches_enumeration() {
        let h = BitMatrix::from_dense(&[vec![1, 1, 1, 1]]);
        let code = CssCode::from_checks("C4", CodeFamily::Custom, h.clone(), h).unwrap();
        assert_eq!(code.k(), 2);
        let pairing = code.logical_x.matmul(&code.logical_z.transpose()).unwrap();
        assert_eq!(pairing, BitMatrix::identity(2));
        // Brute force: Z-type logicals are even-weight vectors except 0000
        // and 1111, so the minimum weight is 2.
        let mut best = usize::MAX;
        for bits in 1u32..16 {
            let v = BitVec::from_bools(&(0..4).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>());
            if code.h_x.mul_vec(&v).is_zero() && !code.h_z.row_space_contains(&v) {
                best = best.min(v.weight());
            }
        }
        assert_eq!(best, 2);
        for r in 0..2 {
            assert!(code.h_x.mul_vec(&code.logical_z.row(r)).is_zero());
            assert!(code.h_z.mul_vec(&code.logical_x.row(r)).is_zero());
        }
    }

    #[test]
    fn non_orthogonal_rejected() {
        let hx = BitMatrix::from_dense(&[vec![1, 1, 0]]);
        let hz = BitMatrix::from_dense(&[vec![0, 1, 1]]);
        assert!(matches!(
            CssCode::from_checks("bad", CodeFamily::Custom, hx, hz),
            Err(CodeError::NotOrthogonal)
        ));
    }

    #[test]
    fn small_toric_code() {
        let code = build_toric_4d(2).unwrap();
        assert_eq!((code.n(), code.k()), (96, 6));
        assert!(build_toric_4d(1).is_err());
    }
}
