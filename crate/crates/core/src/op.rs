//! Rectangular operators between level spaces.
//!
//! The level-k space V_k is spanned by the normalized cylinder indicators
//! `e_f`, one per word of length k, ordered with the first letter most
//! significant. Operators live between explicit levels — a map V_k → V_l is
//! an N^l × N^k matrix — and every theorem is stated level-consistently.
//! Entries are [`Exact`] scalars, so algebraic identities are checked with
//! equality, not tolerances.

use std::collections::BTreeMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{Exact, Rat};
use crate::symbolic::Alphabet;

/// Sparse exact matrix V_source → V_target.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    alphabet: Alphabet,
    source_level: usize,
    target_level: usize,
    /// (row, col) → entry; zero entries are absent.
    entries: BTreeMap<(usize, usize), Exact>,
}

impl TruncatedOperator {
    pub fn zero(alphabet: Alphabet, source_level: usize, target_level: usize) -> Self {
        TruncatedOperator { alphabet, source_level, target_level, entries: BTreeMap::new() }
    }

    pub fn identity(alphabet: Alphabet, level: usize) -> Self {
        let dim = alphabet.words_at_level(level);
        let entries = (0..dim).map(|i| ((i, i), Exact::one())).collect();
        TruncatedOperator { alphabet, source_level: level, target_level: level, entries }
    }

    pub fn from_entries(
        alphabet: Alphabet,
        source_level: usize,
        target_level: usize,
        entries: impl IntoIterator<Item = ((usize, usize), Exact)>,
    ) -> Self {
        let entries = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        TruncatedOperator { alphabet, source_level, target_level, entries }
    }

    pub fn diagonal(alphabet: Alphabet, level: usize, values: &[Exact]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| ((i, i), v.clone()))
            .collect();
        TruncatedOperator { alphabet, source_level: level, target_level: level, entries }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn source_level(&self) -> usize {
        self.source_level
    }

    pub fn target_level(&self) -> usize {
        self.target_level
    }

    pub fn is_square(&self) -> bool {
        self.source_level == self.target_level
    }

    pub fn rows(&self) -> usize {
        self.alphabet.words_at_level(self.target_level)
    }

    pub fn cols(&self) -> usize {
        self.alphabet.words_at_level(self.source_level)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, row: usize, col: usize) -> Exact {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Exact::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Exact)> {
        self.entries.iter()
    }

    pub fn set(&mut self, row: usize, col: usize, value: Exact) {
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    /// Matrix product `self ∘ rhs`; levels must align.
    pub fn compose(&self, rhs: &TruncatedOperator) -> Result<TruncatedOperator> {
        if rhs.target_level != self.source_level {
            return Err(Error::LevelMismatch(rhs.target_level, self.source_level));
        }
        let mut acc: BTreeMap<(usize, usize), Exact> = BTreeMap::new();
        // group lhs entries by column for the inner index
        let mut by_col: BTreeMap<usize, Vec<(usize, &Exact)>> = BTreeMap::new();
        for (&(r, c), v) in &self.entries {
            by_col.entry(c).or_default().push((r, v));
        }
        for (&(mid, c), bv) in &rhs.entries {
            if let Some(rows) = by_col.get(&mid) {
                for (r, av) in rows {
                    let prod = av.mul(bv)?;
                    if prod.is_zero() {
                        continue;
                    }
                    let slot = acc.entry((*r, c)).or_insert_with(Exact::zero);
                    *slot = slot.try_add(&prod)?;
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(TruncatedOperator {
            alphabet: self.alphabet,
            source_level: rhs.source_level,
            target_level: self.target_level,
            entries: acc,
        })
    }

    /// Conjugate transpose; flips the levels.
    pub fn adjoint(&self) -> TruncatedOperator {
        let entries = self
            .entries
            .iter()
            .map(|(&(r, c), v)| ((c, r), v.conj()))
            .collect();
        TruncatedOperator {
            alphabet: self.alphabet,
            source_level: self.target_level,
            target_level: self.source_level,
            entries,
        }
    }

    pub fn try_add(&self, rhs: &TruncatedOperator) -> Result<TruncatedOperator> {
        if self.source_level != rhs.source_level {
            return Err(Error::LevelMismatch(self.source_level, rhs.source_level));
        }
        if self.target_level != rhs.target_level {
            return Err(Error::LevelMismatch(self.target_level, rhs.target_level));
        }
        let mut acc = self.entries.clone();
        for (k, v) in &rhs.entries {
            let slot = acc.entry(*k).or_insert_with(Exact::zero);
            *slot = slot.try_add(v)?;
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(TruncatedOperator {
            alphabet: self.alphabet,
            source_level: self.source_level,
            target_level: self.target_level,
            entries: acc,
        })
    }

    pub fn try_sub(&self, rhs: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.try_add(&rhs.scale(&Exact::from_i64(-1)))
    }

    pub fn scale(&self, s: &Exact) -> TruncatedOperator {
        if s.is_zero() {
            return TruncatedOperator::zero(self.alphabet, self.source_level, self.target_level);
        }
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| (*k, v.mul(s).expect("scalar product stays in the ring")))
            .collect();
        TruncatedOperator {
            alphabet: self.alphabet,
            source_level: self.source_level,
            target_level: self.target_level,
            entries,
        }
    }

    /// `P² = P = P*`, exactly.
    pub fn is_projection(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        if self.adjoint() != *self {
            return false;
        }
        match self.compose(self) {
            Ok(sq) => sq == *self,
            Err(_) => false,
        }
    }

    /// Largest entry magnitude, for deviation reports (0.0 for the zero
    /// operator).
    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .map(|v| v.to_complex().norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &ExactVector) -> Result<ExactVector> {
        if v.level != self.source_level {
            return Err(Error::LevelMismatch(v.level, self.source_level));
        }
        let mut out: BTreeMap<usize, Exact> = BTreeMap::new();
        for (&(r, c), m) in &self.entries {
            if let Some(x) = v.entries.get(&c) {
                let prod = m.mul(x)?;
                if prod.is_zero() {
                    continue;
                }
                let slot = out.entry(r).or_insert_with(Exact::zero);
                *slot = slot.try_add(&prod)?;
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(ExactVector { alphabet: self.alphabet, level: self.target_level, entries: out })
    }

    /// Exact rank via fraction-free Gaussian elimination. Requires rational
    /// entries.
    pub fn rank(&self) -> Result<usize> {
        let rows = self.rows();
        let cols = self.cols();
        let mut m: Vec<Vec<Rat>> = vec![vec![Rat::from_integer(0.into()); cols]; rows];
        for (&(r, c), v) in &self.entries {
            m[r][c] = v.as_rat().ok_or(Error::InexactSum)?;
        }
        Ok(rational_rank(m))
    }

    /// Per the operator-dump interface: levels plus entries as fraction
    /// strings, or `[magnitude, phase-in-turns]` pairs for non-rational
    /// scalars.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(&(r, c), v)| json!({"row": r, "col": c, "value": v.to_json()}))
            .collect();
        json!({
            "sourceLevel": self.source_level,
            "targetLevel": self.target_level,
            "entries": entries,
        })
    }
}

/// Exact Gaussian elimination rank of a dense rational matrix.
pub fn rational_rank(mut m: Vec<Vec<Rat>>) -> usize {
    use num_traits::Zero;
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let Some(pivot) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pivot);
        let p = m[row][col].clone();
        for r in row + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            for c in col..cols {
                let delta = &factor * &m[row][c];
                m[r][c] -= delta;
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}

/// Sparse vector in V_level with exact entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactVector {
    alphabet: Alphabet,
    level: usize,
    entries: BTreeMap<usize, Exact>,
}

impl ExactVector {
    pub fn zero(alphabet: Alphabet, level: usize) -> Self {
        ExactVector { alphabet, level, entries: BTreeMap::new() }
    }

    pub fn basis(alphabet: Alphabet, level: usize, index: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(index, Exact::one());
        ExactVector { alphabet, level, entries }
    }

    pub fn from_entries(
        alphabet: Alphabet,
        level: usize,
        entries: impl IntoIterator<Item = (usize, Exact)>,
    ) -> Self {
        let entries = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        ExactVector { alphabet, level, entries }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn entries(&self) -> impl Iterator<Item = (&usize, &Exact)> {
        self.entries.iter()
    }

    pub fn get(&self, index: usize) -> Exact {
        self.entries.get(&index).cloned().unwrap_or_else(Exact::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &ExactVector) -> Result<Exact> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let mut acc = Exact::zero();
        for (i, a) in &self.entries {
            if let Some(b) = other.entries.get(i) {
                acc = acc.try_add(&a.conj().mul(b)?)?;
            }
        }
        Ok(acc)
    }

    /// `‖v‖²`, always rational.
    pub fn norm_sq(&self) -> Rat {
        self.entries.values().map(|v| v.abs_sq()).sum()
    }

    pub fn try_add(&self, other: &ExactVector) -> Result<ExactVector> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let mut acc = self.entries.clone();
        for (i, v) in &other.entries {
            let slot = acc.entry(*i).or_insert_with(Exact::zero);
            *slot = slot.try_add(v)?;
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(ExactVector { alphabet: self.alphabet, level: self.level, entries: acc })
    }

    pub fn scale(&self, s: &Exact) -> ExactVector {
        if s.is_zero() {
            return ExactVector::zero(self.alphabet, self.level);
        }
        let entries = self
            .entries
            .iter()
            .map(|(i, v)| (*i, v.mul(s).expect("scalar product stays in the ring")))
            .collect();
        ExactVector { alphabet: self.alphabet, level: self.level, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn a2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn identity_and_compose() {
        let i2 = TruncatedOperator::identity(a2(), 2);
        assert_eq!(i2.compose(&i2).unwrap(), i2);
        assert_eq!(i2.rank().unwrap(), 4);
        assert!(i2.is_projection());
    }

    #[test]
    fn adjoint_flips_levels() {
        let mut s = TruncatedOperator::zero(a2(), 1, 2);
        s.set(0, 0, Exact::one());
        s.set(1, 1, Exact::phase(rat(1, 3)));
        let st = s.adjoint();
        assert_eq!(st.source_level(), 2);
        assert_eq!(st.target_level(), 1);
        // S*S = I on the source
        assert_eq!(st.compose(&s).unwrap(), TruncatedOperator::identity(a2(), 1));
    }

    #[test]
    fn rank_of_singular_matrix() {
        let mut t = TruncatedOperator::zero(a2(), 1, 1);
        t.set(0, 0, Exact::from_i64(1));
        t.set(0, 1, Exact::from_i64(2));
        t.set(1, 0, Exact::from_i64(2));
        t.set(1, 1, Exact::from_i64(4));
        assert_eq!(t.rank().unwrap(), 1);
    }

    #[test]
    fn vector_algebra() {
        let v = ExactVector::from_entries(
            a2(),
            1,
            [(0, Exact::sqrt_of(&rat(1, 2)).unwrap()), (1, Exact::sqrt_of(&rat(1, 2)).unwrap())],
        );
        assert_eq!(v.norm_sq(), rat(1, 1));
        let w = ExactVector::basis(a2(), 1, 0);
        let ip = v.inner(&w).unwrap();
        assert_eq!(ip, Exact::sqrt_of(&rat(1, 2)).unwrap());
    }

    #[test]
    fn json_dump_shape() {
        let mut s = TruncatedOperator::zero(a2(), 0, 1);
        s.set(1, 0, Exact::one());
        let j = s.to_json();
        assert_eq!(j["sourceLevel"], 0);
        assert_eq!(j["targetLevel"], 1);
        assert_eq!(j["entries"][0]["value"], "1");
    }
}
