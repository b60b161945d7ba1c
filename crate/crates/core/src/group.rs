//! The split metacyclic group `Z_ell ⋊_q Z_m` and its GF(2) group algebra.
//!
//! Elements are kept in the canonical form `x^i y^j`. Multiplication uses
//! `y^j x^a = x^(q^j a) y^j`, so every product is a single modular
//! exponentiation away from canonical form.

use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::gf2::BitMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("ell and m must be positive (got ell={ell}, m={m})")]
    NonPositive { ell: u64, m: u64 },
    #[error("twist q must be nonzero")]
    ZeroTwist,
    #[error("q^m mod ell must be 1 (q={q}, m={m}, ell={ell}: got {residue})")]
    NotAnAutomorphism { ell: u64, m: u64, q: u64, residue: u64 },
    #[error("elements belong to different groups")]
    SpecMismatch,
    #[error("cannot parse polynomial '{text}': {reason}")]
    Parse { text: String, reason: String },
}

/// Parameters `(ell, m, q)` of a valid semidirect product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    ell: u32,
    m: u32,
    q: u32,
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % modulus;
        }
        b = b * b % modulus;
        exp >>= 1;
    }
    acc
}

impl GroupSpec {
    pub fn new(ell: u32, m: u32, q: u32) -> Result<Self, GroupError> {
        if ell == 0 || m == 0 {
            return Err(GroupError::NonPositive {
                ell: ell as u64,
                m: m as u64,
            });
        }
        if q == 0 {
            return Err(GroupError::ZeroTwist);
        }
        // In the trivial group Z_1 every q acts as the identity.
        let reduced = if ell == 1 { 1 } else { q % ell };
        let residue = if ell == 1 {
            0
        } else {
            pow_mod(reduced as u64, m as u64, ell as u64)
        };
        if ell > 1 && residue != 1 {
            return Err(GroupError::NotAnAutomorphism {
                ell: ell as u64,
                m: m as u64,
                q: q as u64,
                residue,
            });
        }
        Ok(Self { ell, m, q: reduced })
    }

    /// Abelian `Z_ell x Z_m`, the bivariate-bicycle case.
    pub fn abelian(ell: u32, m: u32) -> Result<Self, GroupError> {
        Self::new(ell, m, 1)
    }

    #[inline]
    pub fn ell(&self) -> u32 {
        self.ell
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.ell as usize * self.m as usize
    }

    pub fn is_abelian(&self) -> bool {
        self.q == 1 || self.ell <= 2
    }

    /// `q^j * alpha mod ell`.
    pub fn twist(&self, j: u64, alpha: u64) -> u32 {
        power_mod_twist(j, alpha, self)
    }

    /// Element `x^i y^j` with exponents reduced modulo `ell` and `m`.
    pub fn element(&self, i: i64, j: i64) -> GroupElement {
        GroupElement {
            i: i.rem_euclid(self.ell as i64) as u32,
            j: j.rem_euclid(self.m as i64) as u32,
            spec: *self,
        }
    }

    pub fn identity(&self) -> GroupElement {
        self.element(0, 0)
    }

    pub fn x(&self) -> GroupElement {
        self.element(1, 0)
    }

    pub fn y(&self) -> GroupElement {
        self.element(0, 1)
    }

    /// Inverse of [`GroupElement::index`].
    pub fn from_index(&self, index: usize) -> GroupElement {
        assert!(index < self.order(), "index {index} out of range");
        let ell = self.ell as usize;
        GroupElement {
            i: (index % ell) as u32,
            j: (index / ell) as u32,
            spec: *self,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(|k| self.from_index(k))
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{} x|_{} Z_{}", self.ell, self.q, self.m)
    }
}

/// `q^j * alpha mod ell` by modular exponentiation.
pub fn power_mod_twist(j: u64, alpha: u64, spec: &GroupSpec) -> u32 {
    let ell = spec.ell as u64;
    (pow_mod(spec.q as u64, j, ell) * (alpha % ell) % ell) as u32
}

/// A group element `x^i y^j` in canonical form.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElement {
    i: u32,
    j: u32,
    spec: GroupSpec,
}

impl GroupElement {
    #[inline]
    pub fn i(&self) -> u32 {
        self.i
    }

    #[inline]
    pub fn j(&self) -> u32 {
        self.j
    }

    #[inline]
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Position in the `ell x m` layout: row `j`, column `i`.
    #[inline]
    pub fn index(&self) -> usize {
        self.j as usize * self.spec.ell as usize + self.i as usize
    }

    pub fn is_identity(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        if self.spec != other.spec {
            return Err(GroupError::SpecMismatch);
        }
        let s = &self.spec;
        let i = (self.i + s.twist(self.j as u64, other.i as u64)) % s.ell;
        let j = (self.j + other.j) % s.m;
        Ok(GroupElement { i, j, spec: *s })
    }

    pub fn inverse(&self) -> GroupElement {
        let s = &self.spec;
        // (x^i y^j)^-1 = y^-j x^-i = x^(-q^(m-j) i) y^(m-j)
        let jinv = (s.m - self.j) % s.m;
        let shifted = s.twist(jinv as u64, self.i as u64);
        GroupElement {
            i: (s.ell - shifted) % s.ell,
            j: jinv,
            spec: *s,
        }
    }

    pub fn pow(&self, e: u64) -> GroupElement {
        let mut acc = self.spec.identity();
        let mut base = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;

    /// Panics when the operands come from different groups; use
    /// [`GroupElement::multiply`] for a fallible product.
    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.multiply(&rhs).expect("group mismatch in product")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.i, self.j) {
            (0, 0) => write!(f, "1"),
            (i, 0) => write!(f, "{}", power("x", i)),
            (0, j) => write!(f, "{}", power("y", j)),
            (i, j) => write!(f, "{}*{}", power("x", i), power("y", j)),
        }
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn power(sym: &str, e: u32) -> String {
    if e == 1 {
        sym.to_string()
    } else {
        format!("{sym}^{e}")
    }
}

/// Sparse element of `F_2[G]`: a set of monomials.
///
/// Insertion order is preserved because the order in which monomials are
/// written fixes the CZ schedule of syndrome extraction.
#[derive(Clone)]
pub struct GroupAlgebraElement {
    spec: GroupSpec,
    monomials: Vec<GroupElement>,
}

impl GroupAlgebraElement {
    pub fn zero(spec: GroupSpec) -> Self {
        Self {
            spec,
            monomials: Vec::new(),
        }
    }

    /// Sums monomials over GF(2): repeated terms cancel in pairs.
    pub fn from_monomials(
        spec: GroupSpec,
        monomials: impl IntoIterator<Item = GroupElement>,
    ) -> Result<Self, GroupError> {
        let mut out = Self::zero(spec);
        for g in monomials {
            if g.spec != spec {
                return Err(GroupError::SpecMismatch);
            }
            out.toggle(g);
        }
        Ok(out)
    }

    fn toggle(&mut self, g: GroupElement) {
        if let Some(pos) = self.monomials.iter().position(|&h| h == g) {
            self.monomials.remove(pos);
        } else {
            self.monomials.push(g);
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn monomials(&self) -> &[GroupElement] {
        &self.monomials
    }

    pub fn weight(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.monomials.contains(g)
    }

    /// The antipode `sum g^-1`, whose representations are the transposes.
    pub fn antipode(&self) -> Self {
        Self {
            spec: self.spec,
            monomials: self.monomials.iter().map(GroupElement::inverse).collect(),
        }
    }

    /// Convolution product in the group algebra.
    pub fn multiply(&self, other: &Self) -> Result<Self, GroupError> {
        if self.spec != other.spec {
            return Err(GroupError::SpecMismatch);
        }
        let mut out = Self::zero(self.spec);
        for &g in &self.monomials {
            for &h in &other.monomials {
                out.toggle(g * h);
            }
        }
        Ok(out)
    }

    /// Parses text such as `"x^2*y^3 + 1 + x*y"`.
    ///
    /// Terms are words in `x` and `y` multiplied left to right, so `y*x`
    /// reduces to `x^q*y`. Exponents may be negative or wrapped in braces,
    /// `*` is optional and a lone `0` denotes the empty sum.
    pub fn parse(spec: GroupSpec, text: &str) -> Result<Self, GroupError> {
        let err = |reason: &str| GroupError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty polynomial"));
        }
        let mut out = Self::zero(spec);
        for term in compact.split('+') {
            if term.is_empty() {
                return Err(err("empty term"));
            }
            if term == "0" {
                continue;
            }
            out.toggle(parse_word(&spec, term).map_err(|r| err(&r))?);
        }
        Ok(out)
    }
}

fn parse_word(spec: &GroupSpec, term: &str) -> Result<GroupElement, String> {
    let chars: Vec<char> = term.chars().collect();
    let mut pos = 0;
    let mut acc = spec.identity();
    let mut seen_factor = false;
    while pos < chars.len() {
        match chars[pos] {
            '*' if seen_factor => {
                pos += 1;
                continue;
            }
            '1' if !seen_factor && (pos + 1 == chars.len() || chars[pos + 1] == '*') => {
                pos += 1;
                seen_factor = true;
                continue;
            }
            'x' | 'X' | 'y' | 'Y' => {}
            c => return Err(format!("unexpected '{c}' in term '{term}'")),
        }
        let sym = chars[pos].to_ascii_lowercase();
        pos += 1;
        let mut exp: i64 = 1;
        if pos < chars.len() && chars[pos] == '^' {
            pos += 1;
            let braced = pos < chars.len() && chars[pos] == '{';
            if braced {
                pos += 1;
            }
            let start = pos;
            if pos < chars.len() && chars[pos] == '-' {
                pos += 1;
            }
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            let digits: String = chars[start..pos].iter().collect();
            exp = digits.parse().map_err(|_| format!("bad exponent in term '{term}'"))?;
            if braced {
                if pos >= chars.len() || chars[pos] != '}' {
                    return Err(format!("unclosed brace in term '{term}'"));
                }
                pos += 1;
            }
        }
        let factor = if sym == 'x' {
            spec.element(exp, 0)
        } else {
            spec.element(0, exp)
        };
        acc = acc * factor;
        seen_factor = true;
    }
    if !seen_factor {
        return Err(format!("empty term '{term}'"));
    }
    Ok(acc)
}

impl PartialEq for GroupAlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
            && self.monomials.len() == other.monomials.len()
            && self.monomials.iter().all(|g| other.monomials.contains(g))
    }
}

impl Eq for GroupAlgebraElement {}

impl Hash for GroupAlgebraElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.spec.hash(state);
        let mut idx: Vec<usize> = self.monomials.iter().map(GroupElement::index).collect();
        idx.sort_unstable();
        idx.hash(state);
    }
}

impl fmt::Display for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (t, g) in self.monomials.iter().enumerate() {
            if t > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `perm[index(h)] = index(g * h)`.
pub fn left_permutation(g: &GroupElement) -> Vec<usize> {
    g.spec.elements().map(|h| (*g * h).index()).collect()
}

/// `perm[index(h)] = index(h * g)`.
pub fn right_permutation(g: &GroupElement) -> Vec<usize> {
    g.spec.elements().map(|h| (h * *g).index()).collect()
}

fn representation(a: &GroupAlgebraElement, perm: impl Fn(&GroupElement) -> Vec<usize>) -> BitMatrix {
    let n = a.spec.order();
    let mut out = BitMatrix::zeros(n, n);
    for g in &a.monomials {
        for (col, row) in perm(g).into_iter().enumerate() {
            out.flip(row, col);
        }
    }
    out
}

/// Left-regular representation: `L[g]` has a one at `(index(g h), index(h))`.
pub fn left_regular(a: &GroupAlgebraElement) -> BitMatrix {
    representation(a, left_permutation)
}

/// Right-regular representation: `R[g]` has a one at `(index(h g), index(h))`.
pub fn right_regular(b: &GroupAlgebraElement) -> BitMatrix {
    representation(b, right_permutation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(ell: u32, m: u32, q: u32) -> GroupSpec {
        GroupSpec::new(ell, m, q).unwrap()
    }

    /// Rewrites a word over {x, y} with x^ell = y^m = 1 and yx = x^q y until
    /// no rule applies, then reads off the exponents.
    fn rewrite_word(s: &GroupSpec, word: &str) -> (u32, u32) {
        let mut w: Vec<char> = word.chars().collect();
        loop {
            if let Some(p) = w.windows(2).position(|p| p == ['y', 'x']) {
                let mut repl = vec!['x'; s.q() as usize];
                repl.push('y');
                w.splice(p..p + 2, repl);
                continue;
            }
            break;
        }
        let xs = w.iter().filter(|&&c| c == 'x').count() as u32;
        let ys = w.iter().filter(|&&c| c == 'y').count() as u32;
        assert!(w.iter().position(|&c| c == 'y').map_or(true, |p| p == xs as usize));
        (xs % s.ell(), ys % s.m())
    }

    fn spelled(g: &GroupElement) -> String {
        "x".repeat(g.i() as usize) + &"y".repeat(g.j() as usize)
    }

    #[test]
    fn validation() {
        assert!(GroupSpec::new(9, 6, 2).is_ok());
        assert!(matches!(GroupSpec::new(9, 6, 0), Err(GroupError::ZeroTwist)));
        assert!(matches!(
            GroupSpec::new(9, 5, 2),
            Err(GroupError::NotAnAutomorphism { .. })
        ));
        assert!(GroupSpec::new(0, 3, 1).is_err());
        assert_eq!(spec(7, 3, 9).q(), 2);
        assert_eq!(spec(1, 4, 5).q(), 1);
        assert_eq!(spec(5, 8, 2).order(), 40);
    }

    #[test]
    fn twist_relation() {
        let s = spec(9, 6, 2);
        assert_eq!(s.y() * s.x(), s.element(2, 1));
        let g = s.element(4, 3);
        assert_eq!(g * s.identity(), g);
        assert_eq!(s.identity() * g, g);
    }

    #[test]
    fn product_matches_word_rewriting() {
        let s = spec(7, 3, 2);
        let g = s.element(3, 2);
        let word = spelled(&g).repeat(2);
        let (i, j) = rewrite_word(&s, &word);
        assert_eq!(g * g, s.element(i as i64, j as i64));
        for g in s.elements() {
            for h in s.elements() {
                let (i, j) = rewrite_word(&s, &(spelled(&g) + &spelled(&h)));
                assert_eq!(g * h, s.element(i as i64, j as i64), "{g} * {h}");
            }
        }
    }

    #[test]
    fn inverses_exhaustive() {
        let s = spec(7, 3, 2);
        assert_eq!(s.identity().inverse(), s.identity());
        for g in s.elements() {
            assert!((g * g.inverse()).is_identity());
            assert!((g.inverse() * g).is_identity());
        }
        let s = spec(9, 6, 2);
        assert_eq!(s.x().inverse(), s.element(8, 0));
    }

    #[test]
    fn power_mod_twist_examples() {
        let s = spec(9, 6, 2);
        assert_eq!(power_mod_twist(0, 5, &s), 5);
        assert_eq!(power_mod_twist(1, 1, &s), 2);
        let s = spec(12, 6, 5);
        let mut expected = 7u64;
        for _ in 0..3 {
            expected = expected * 5 % 12;
        }
        assert_eq!(power_mod_twist(3, 7, &s) as u64, expected);
    }

    #[test]
    fn mismatched_specs_rejected() {
        let a = spec(7, 3, 2).x();
        let b = spec(7, 3, 4).x();
        assert_eq!(a.multiply(&b), Err(GroupError::SpecMismatch));
    }

    #[test]
    fn parse_forms() {
        let s = spec(9, 6, 2);
        let p = GroupAlgebraElement::parse(s, "x^2*y^3 + 1 + x*y").unwrap();
        assert_eq!(p.monomials(), &[s.element(2, 3), s.identity(), s.element(1, 1)]);
        let q = GroupAlgebraElement::parse(s, " x y + x^{2}y^3+1").unwrap();
        assert_eq!(p, q);
        assert_eq!(
            GroupAlgebraElement::parse(s, "y*x").unwrap().monomials(),
            &[s.element(2, 1)]
        );
        assert_eq!(
            GroupAlgebraElement::parse(s, "x^-1").unwrap().monomials(),
            &[s.element(8, 0)]
        );
        assert!(GroupAlgebraElement::parse(s, "x + x").unwrap().is_zero());
        assert!(GroupAlgebraElement::parse(s, "0").unwrap().is_zero());
        assert!(GroupAlgebraElement::parse(s, "x + + y").is_err());
        assert!(GroupAlgebraElement::parse(s, "z").is_err());
        assert!(GroupAlgebraElement::parse(s, "x^").is_err());
        let shown = p.to_string();
        assert_eq!(GroupAlgebraElement::parse(s, &shown).unwrap(), p);
    }

    #[test]
    fn repetition_code_from_z3() {
        let s = spec(3, 1, 1);
        let a = GroupAlgebraElement::parse(s, "1+x").unwrap();
        let l = left_regular(&a);
        let printed = BitMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        // Relabel basis element x^i as x^-i.
        let mut relabeled = BitMatrix::zeros(3, 3);
        for r in 0..3 {
            for c in 0..3 {
                if l.get(r, c) {
                    relabeled.set((3 - r) % 3, (3 - c) % 3, true);
                }
            }
        }
        assert_eq!(relabeled, printed);
        assert_eq!(l.rank(), 2);
    }

    #[test]
    fn identity_represents_identity() {
        let s = spec(9, 6, 2);
        let one = GroupAlgebraElement::parse(s, "1").unwrap();
        assert_eq!(left_regular(&one), BitMatrix::identity(54));
        assert_eq!(right_regular(&one), BitMatrix::identity(54));
    }

    #[test]
    fn layout_supports_match_brute_force() {
        let s = spec(9, 6, 2);
        let a = GroupAlgebraElement::parse(s, "1+x^2+y^2").unwrap();
        let b = GroupAlgebraElement::parse(s, "1+x^5+y").unwrap();
        let la = left_regular(&a);
        let rb = right_regular(&b);
        for c in s.elements() {
            let mut left: Vec<usize> = s
                .elements()
                .filter(|h| a.monomials().iter().any(|g| *g * *h == c))
                .map(|h| h.index())
                .collect();
            left.sort_unstable();
            assert_eq!(la.row_support(c.index()), left);
            let mut right: Vec<usize> = s
                .elements()
                .filter(|h| b.monomials().iter().any(|g| *h * *g == c))
                .map(|h| h.index())
                .collect();
            right.sort_unstable();
            assert_eq!(rb.row_support(c.index()), right);
        }
    }

    fn valid_specs() -> Vec<GroupSpec> {
        let mut out = Vec::new();
        for ell in 1..=16u32 {
            for m in 1..=8u32 {
                for q in 1..ell.max(2) {
                    if let Ok(s) = GroupSpec::new(ell, m, q) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    fn random_algebra(rng: &mut impl Rng, s: GroupSpec, terms: usize) -> GroupAlgebraElement {
        GroupAlgebraElement::from_monomials(s, (0..terms).map(|_| s.from_index(rng.random_range(0..s.order()))))
            .unwrap()
    }

    #[test]
    fn left_and_right_commute() {
        let specs = valid_specs();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = specs[rng.random_range(0..specs.len())];
            let a = random_algebra(&mut rng, s, 3);
            let b = random_algebra(&mut rng, s, 3);
            let la = left_regular(&a);
            let rb = right_regular(&b);
            assert_eq!(la.matmul(&rb).unwrap(), rb.matmul(&la).unwrap(), "{s}");
        }
    }

    #[test]
    fn antipode_transposes() {
        let s = spec(7, 3, 2);
        let a = GroupAlgebraElement::parse(s, "1 + x^3*y + x*y^2").unwrap();
        assert_eq!(left_regular(&a.antipode()), left_regular(&a).transpose());
        assert_eq!(right_regular(&a.antipode()), right_regular(&a).transpose());
    }

    fn arb_spec_and_triple() -> impl Strategy<Value = (GroupSpec, [usize; 3])> {
        let specs = valid_specs();
        (0..specs.len()).prop_flat_map(move |k| {
            let s = specs[k];
            let n = s.order();
            (Just(s), [0..n, 0..n, 0..n])
        })
    }

    proptest! {
        #[test]
        fn associative((s, idx) in arb_spec_and_triple()) {
            let [g, h, k] = idx.map(|t| s.from_index(t));
            prop_assert_eq!((g * h) * k, g * (h * k));
        }

        #[test]
        fn representations_are_permutations((s, idx) in arb_spec_and_triple()) {
            let g = s.from_index(idx[0]);
            for perm in [left_permutation(&g), right_permutation(&g)] {
                let mut seen = vec![false; s.order()];
                for &p in &perm {
                    prop_assert!(!seen[p]);
                    seen[p] = true;
                }
            }
        }

        #[test]
        fn abelian_case_adds_componentwise(ell in 1u32..20, m in 1u32..10, a in 0i64..400, b in 0i64..400, c in 0i64..400, d in 0i64..400) {
            let s = GroupSpec::abelian(ell, m).unwrap();
            prop_assert_eq!(s.element(a, b) * s.element(c, d), s.element(a + c, b + d));
        }
    }
}
