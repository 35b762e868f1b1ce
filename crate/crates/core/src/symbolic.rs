//! Words over a finite alphabet and the symbolic path space.
//!
//! The path space Ω_N is the set of infinite words over `{0, …, N−1}`. At
//! desk scale we work with [`InfiniteWord`]s that are eventually periodic, so
//! equality, the N-adic metric, and encoding fixed points are all exactly
//! decidable, while arbitrary points of Ω_N remain reachable through prefix
//! queries.
//!
//! Letters are `{0, …, N−1}` (the cyclic group ℤ_N), which gives finite and
//! infinite words the group structure used by the duality pairing.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{rat_int, Rat};

/// A finite alphabet `{0, …, N−1}` with `N ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::AlphabetTooSmall(size));
        }
        Ok(Alphabet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn check_letter(&self, letter: u8) -> Result<()> {
        if (letter as usize) < self.size {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange { letter, size: self.size })
        }
    }

    /// Number of words of length `k`, i.e. `N^k`.
    pub fn words_at_level(&self, k: usize) -> usize {
        self.size.pow(k as u32)
    }
}

/// A finite word; the empty word denotes the whole path space in the measure
/// context.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn letter(&self, i: usize) -> u8 {
        self.letters[i]
    }

    pub fn first(&self) -> Option<u8> {
        self.letters.first().copied()
    }

    /// Drops the first letter (the one-sided shift σ on finite words).
    pub fn shift(&self) -> Word {
        Word { letters: self.letters.iter().skip(1).copied().collect() }
    }

    pub fn prepend(&self, letter: u8) -> Word {
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(letter);
        letters.extend_from_slice(&self.letters);
        Word { letters }
    }

    pub fn append(&self, letter: u8) -> Word {
        let mut letters = self.letters.clone();
        letters.push(letter);
        Word { letters }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.letters.len() >= self.letters.len()
            && other.letters[..self.letters.len()] == self.letters[..]
    }

    /// Index of the word in the lexicographic enumeration of all words of its
    /// length, with the first letter most significant.
    pub fn index(&self, alphabet: Alphabet) -> usize {
        let mut idx = 0usize;
        for &l in &self.letters {
            idx = idx * alphabet.size() + l as usize;
        }
        idx
    }

    /// Inverse of [`Word::index`]: the `idx`-th word of length `k`.
    pub fn from_index(alphabet: Alphabet, mut idx: usize, k: usize) -> Word {
        let mut letters = vec![0u8; k];
        for slot in letters.iter_mut().rev() {
            *slot = (idx % alphabet.size()) as u8;
            idx /= alphabet.size();
        }
        Word { letters }
    }

    pub fn validate(&self, alphabet: Alphabet) -> Result<()> {
        for &l in &self.letters {
            alphabet.check_letter(l)?;
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    /// Comma-free digit string, e.g. `0120`. Empty word prints as `""`-like
    /// empty output; callers that need a marker should wrap it.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.trim().chars() {
            let d = c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad word digit {c:?}")))?;
            if d > 255 {
                return Err(Error::Parse(format!("letter {d} too large")));
            }
            letters.push(d as u8);
        }
        Ok(Word { letters })
    }
}

/// An eventually periodic infinite word `pre · per · per · …`.
///
/// The periodic part is non-empty, so `letter(k)` is defined for every `k`
/// and expansion equality is decidable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InfiniteWord {
    preperiod: Word,
    period: Word,
}

impl InfiniteWord {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(InfiniteWord { preperiod, period })
    }

    /// The constant word `j j j …`.
    pub fn constant(j: u8) -> Self {
        InfiniteWord { preperiod: Word::empty(), period: Word::new(vec![j]) }
    }

    /// Purely periodic word with the given period.
    pub fn periodic(period: Word) -> Result<Self> {
        InfiniteWord::new(Word::empty(), period)
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.preperiod.is_empty()
    }

    /// Letter at (0-based) position `i` of the expansion.
    pub fn letter(&self, i: usize) -> u8 {
        if i < self.preperiod.len() {
            self.preperiod.letter(i)
        } else {
            self.period.letter((i - self.preperiod.len()) % self.period.len())
        }
    }

    /// The k-truncated finite word `ω|_k`.
    pub fn prefix(&self, k: usize) -> Word {
        Word::new((0..k).map(|i| self.letter(i)).collect())
    }

    /// Drops the first letter (the shift σ).
    pub fn shift(&self) -> InfiniteWord {
        if self.preperiod.is_empty() {
            // rotate the period
            let mut letters = self.period.letters().to_vec();
            letters.rotate_left(1);
            InfiniteWord { preperiod: Word::empty(), period: Word::new(letters) }
        } else {
            InfiniteWord { preperiod: self.preperiod.shift(), period: self.period.clone() }
        }
    }

    /// Inserts `j` in front (the map τ̂_j); inverse of [`InfiniteWord::shift`].
    pub fn prepend(&self, j: u8) -> InfiniteWord {
        InfiniteWord { preperiod: self.preperiod.prepend(j), period: self.period.clone() }
    }

    /// Two eventually periodic specs expand to the same point of Ω_N iff
    /// they agree on the first `max(preperiods) + lcm(periods)` letters.
    pub fn expands_equal(&self, other: &InfiniteWord) -> bool {
        let p = self.preperiod.len().max(other.preperiod.len());
        let l = self.period.len().lcm(&other.period.len());
        (0..p + l).all(|i| self.letter(i) == other.letter(i))
    }

    /// Length of the longest common prefix; `None` when the expansions are
    /// identical (infinite agreement).
    pub fn common_prefix_len(&self, other: &InfiniteWord) -> Option<usize> {
        if self.expands_equal(other) {
            return None;
        }
        let p = self.preperiod.len().max(other.preperiod.len());
        let l = self.period.len().lcm(&other.period.len());
        (0..p + l).find(|&i| self.letter(i) != other.letter(i))
    }

    /// The N-adic metric `d_N(ω, ω') = N^{−k}` where `k` is the length of the
    /// longest common prefix; zero exactly when the expansions agree.
    pub fn distance(&self, other: &InfiniteWord, alphabet: Alphabet) -> Result<Rat> {
        self.preperiod.validate(alphabet)?;
        self.period.validate(alphabet)?;
        other.preperiod.validate(alphabet)?;
        other.period.validate(alphabet)?;
        match self.common_prefix_len(other) {
            None => Ok(Rat::zero()),
            Some(k) => {
                let n = rat_int(alphabet.size() as i64);
                let mut d = Rat::one();
                for _ in 0..k {
                    d /= &n;
                }
                Ok(d)
            }
        }
    }

    /// Group sum in Ω_N under the identification of infinite words with
    /// N-adic expansions (position 1 least significant, carries propagate to
    /// the right). The sum of eventually periodic words is again eventually
    /// periodic; the carry state machine is finite, so the representation is
    /// found exactly.
    pub fn group_add(&self, other: &InfiniteWord, alphabet: Alphabet) -> InfiniteWord {
        let n = alphabet.size() as u16;
        let p = self.preperiod.len().max(other.preperiod.len());
        let l = self.period.len().lcm(&other.period.len());
        let mut digits: Vec<u8> = Vec::new();
        let mut carry = 0u16;
        let mut seen: std::collections::HashMap<(usize, u16), usize> =
            std::collections::HashMap::new();
        let mut k = 0usize;
        loop {
            if k >= p {
                let state = ((k - p) % l, carry);
                if let Some(&start) = seen.get(&state) {
                    let pre = Word::new(digits[..start].to_vec());
                    let per = Word::new(digits[start..k].to_vec());
                    return InfiniteWord { preperiod: pre, period: per };
                }
                seen.insert(state, k);
            }
            let s = self.letter(k) as u16 + other.letter(k) as u16 + carry;
            digits.push((s % n) as u8);
            carry = s / n;
            k += 1;
        }
    }
}

impl fmt::Display for InfiniteWord {
    /// `pre(per)`, e.g. `01(20)` for `0 1 2 0 2 0 2 0 …`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.preperiod, self.period)
    }
}

impl FromStr for InfiniteWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| Error::Parse(format!("missing '(' in {s:?}")))?;
        if !s.ends_with(')') {
            return Err(Error::Parse(format!("missing ')' in {s:?}")));
        }
        let pre: Word = s[..open].parse()?;
        let per: Word = s[open + 1..s.len() - 1].parse()?;
        InfiniteWord::new(pre, per)
    }
}

/// A basic cylinder set `E_f`: all infinite words starting with `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    base: Word,
}

impl Cylinder {
    pub fn new(base: Word) -> Self {
        Cylinder { base }
    }

    /// The whole space `Ω_N = E_[]`.
    pub fn whole() -> Self {
        Cylinder { base: Word::empty() }
    }

    pub fn base(&self) -> &Word {
        &self.base
    }

    /// Product measure of the cylinder, `p_{f_1} ⋯ p_{f_k}`, exactly.
    pub fn measure(&self, weights: &WeightVector) -> Result<Rat> {
        weights.word_measure(&self.base)
    }

    /// Intersection of two basic cylinders: the one with the longer base when
    /// one base prefixes the other, empty (`None`) otherwise.
    pub fn intersect(&self, other: &Cylinder) -> Option<Cylinder> {
        if self.base.is_prefix_of(&other.base) {
            Some(other.clone())
        } else if other.base.is_prefix_of(&self.base) {
            Some(self.clone())
        } else {
            None
        }
    }

    pub fn contains_word(&self, w: &InfiniteWord) -> bool {
        w.prefix(self.base.len()) == self.base
    }
}

/// Strictly positive weights `p_0, …, p_{N−1}` summing to one; determines the
/// infinite product measure on path space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    weights: Vec<Rat>,
}

impl WeightVector {
    pub fn new(weights: Vec<Rat>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::AlphabetTooSmall(weights.len()));
        }
        if weights.iter().any(|p| *p <= Rat::zero()) {
            return Err(Error::InvalidWeights);
        }
        let total: Rat = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidWeights);
        }
        Ok(WeightVector { weights })
    }

    /// Uniform weights `1/N`.
    pub fn uniform(n: usize) -> Result<Self> {
        let p = Rat::new(1.into(), (n as i64).into());
        WeightVector::new(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet { size: self.weights.len() }
    }

    pub fn get(&self, letter: u8) -> Result<&Rat> {
        self.weights.get(letter as usize).ok_or(Error::LetterOutOfRange {
            letter,
            size: self.weights.len(),
        })
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    /// `p_f = p_{f_1} ⋯ p_{f_k}`; the empty word has measure one.
    pub fn word_measure(&self, f: &Word) -> Result<Rat> {
        let mut m = Rat::one();
        for &l in f.letters() {
            m *= self.get(l)?;
        }
        Ok(m)
    }
}

/// Phase of the duality pairing `⟨x, y⟩ = e^{2πi·x̃·ỹ}`, returned exactly in
/// turns (multiples of 2π), reduced mod 1.
///
/// A finite word `y = (y_1, …, y_m)` is identified with the rational
/// `ỹ = Σ_j y_j N^{−j} ∈ N^{−m}ℤ/ℤ` and an infinite word `x` with its
/// N-adic expansion `x̃ = Σ_k x_k N^{k−1}`, of which only `x̃ mod N^m`
/// matters. This is the Pontryagin pairing of the two groups, so it is a
/// bicharacter for the carry group operations exactly.
pub fn pairing_turns(x: &InfiniteWord, y: &Word, alphabet: Alphabet) -> Result<Rat> {
    use num_bigint::BigInt;
    y.validate(alphabet)?;
    let n = BigInt::from(alphabet.size());
    let m = y.len();
    // x̃ mod N^m = Σ_{k=1..m} x_k N^{k−1}
    let mut x_val = BigInt::from(0);
    let mut pow = BigInt::from(1);
    for i in 0..m {
        alphabet.check_letter(x.letter(i))?;
        x_val += BigInt::from(x.letter(i)) * &pow;
        pow *= &n;
    }
    // ỹ = (Σ_j y_j N^{m−1−j}) / N^m; `pow` is now N^m
    let mut y_num = BigInt::from(0);
    for &l in y.letters() {
        y_num = y_num * &n + BigInt::from(l);
    }
    let turns = Rat::new(x_val * y_num, pow);
    let f = turns.floor();
    Ok(turns - f)
}

/// Group sum of two finite words under the identification with
/// `N^{−m}ℤ/ℤ` (rational addition mod 1, re-expanded to `max(|y|,|y'|)`
/// digits).
pub fn word_group_add(y: &Word, y2: &Word, alphabet: Alphabet) -> Result<Word> {
    use num_bigint::BigInt;
    y.validate(alphabet)?;
    y2.validate(alphabet)?;
    let n = BigInt::from(alphabet.size());
    let m = y.len().max(y2.len());
    let expand = |w: &Word| -> BigInt {
        let mut v = BigInt::from(0);
        for i in 0..m {
            let digit = if i < w.len() { w.letter(i) } else { 0 };
            v = v * &n + BigInt::from(digit);
        }
        v
    };
    let modulus = num_traits::pow::pow(n.clone(), m);
    let mut total = (expand(y) + expand(y2)) % &modulus;
    let mut letters = vec![0u8; m];
    for slot in letters.iter_mut().rev() {
        let digit = &total % &n;
        *slot = num_traits::ToPrimitive::to_u8(&digit).unwrap_or(0);
        total /= &n;
    }
    Ok(Word::new(letters))
}

/// The duality pairing as a unit-modulus complex number.
pub fn duality_pairing(x: &InfiniteWord, y: &Word, alphabet: Alphabet) -> Result<Complex64> {
    let t = pairing_turns(x, y, alphabet)?;
    let ang = 2.0 * std::f64::consts::PI * crate::exact::rat_to_f64(&t);
    Ok(Complex64::from_polar(1.0, ang))
}

/// The scalar by which the gauge action at `x` rescales the generator `S_y`.
///
/// Identical to the duality pairing; range projections `S_y S_y*` are fixed
/// since the scalar is unimodular.
pub fn gauge_character(x: &InfiniteWord, y: &Word, alphabet: Alphabet) -> Result<Complex64> {
    duality_pairing(x, y, alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn iw(s: &str) -> InfiniteWord {
        s.parse().unwrap()
    }

    #[test]
    fn prefix_expansion() {
        assert_eq!(iw("(0)").prefix(3), w("000"));
        assert_eq!(iw("1(02)").prefix(5), w("10202"));
        assert_eq!(iw("(1)").prefix(0), Word::empty());
    }

    #[test]
    fn metric_values() {
        let a2 = Alphabet::new(2).unwrap();
        // (0,0,0,…) vs (0,0,1,1,…): common prefix length 2
        assert_eq!(iw("(0)").distance(&iw("00(1)"), a2).unwrap(), rat(1, 4));
        // same expansion written with different preperiods
        assert_eq!(iw("0(10)").distance(&iw("01(01)"), a2).unwrap(), Rat::zero());
        let a3 = Alphabet::new(3).unwrap();
        assert_eq!(iw("(1)").distance(&iw("(2)"), a3).unwrap(), rat(1, 1));
    }

    #[test]
    fn shift_prepend_inverse() {
        let x = iw("(0)");
        assert!(x.prepend(1).shift().expands_equal(&x));
        assert!(iw("(1)").prepend(2).expands_equal(&iw("2(1)")));
        // shift of a purely periodic word rotates the period
        assert!(iw("(10)").shift().expands_equal(&iw("(01)")));
    }

    #[test]
    fn cylinder_measure_and_intersection() {
        let p = WeightVector::new(vec![rat(1, 3), rat(2, 3)]).unwrap();
        assert_eq!(Cylinder::new(w("001")).measure(&p).unwrap(), rat(2, 27));
        assert_eq!(Cylinder::whole().measure(&p).unwrap(), rat(1, 1));
        let half = WeightVector::uniform(2).unwrap();
        assert_eq!(Cylinder::new(w("01")).measure(&half).unwrap(), rat(1, 4));

        let c0 = Cylinder::new(w("0"));
        let c01 = Cylinder::new(w("01"));
        assert_eq!(c0.intersect(&c01), Some(c01.clone()));
        assert_eq!(c0.intersect(&Cylinder::new(w("1"))), None);
        assert_eq!(c01.intersect(&c01), Some(c01));
    }

    #[test]
    fn cylinder_additivity() {
        let p = WeightVector::new(vec![rat(1, 5), rat(3, 10), rat(1, 2)]).unwrap();
        let f = w("120");
        let total: Rat = (0..3u8)
            .map(|i| Cylinder::new(f.append(i)).measure(&p).unwrap())
            .sum();
        assert_eq!(total, Cylinder::new(f).measure(&p).unwrap());
    }

    #[test]
    fn pairing_basics() {
        let a2 = Alphabet::new(2).unwrap();
        // all-zeros word pairs to 1 with everything
        assert_eq!(pairing_turns(&iw("(0)"), &w("101"), a2).unwrap(), Rat::zero());
        // x = (1,0,0,…), y = (1): exp(2πi/2) = −1
        let t = pairing_turns(&iw("1(0)"), &w("1"), a2).unwrap();
        assert_eq!(t, rat(1, 2));
        let z = duality_pairing(&iw("1(0)"), &w("1"), a2).unwrap();
        assert!((z.re + 1.0).abs() < 1e-12 && z.im.abs() < 1e-12);
        // empty y pairs to 1
        assert_eq!(pairing_turns(&iw("1(0)"), &Word::empty(), a2).unwrap(), Rat::zero());
    }

    #[test]
    fn bicharacter_laws_exact() {
        let a3 = Alphabet::new(3).unwrap();
        let xs = [iw("1(02)"), iw("(21)"), iw("02(1)")];
        let ys = [w("12"), w("201"), w("0012")];
        for x in &xs {
            for x2 in &xs {
                for y in &ys {
                    // ⟨x+x', y⟩ = ⟨x,y⟩⟨x',y⟩ as exact turns mod 1
                    let lhs = pairing_turns(&x.group_add(x2, a3), y, a3).unwrap();
                    let sum = pairing_turns(x, y, a3).unwrap() + pairing_turns(x2, y, a3).unwrap();
                    assert_eq!(lhs, &sum - sum.floor());
                }
            }
        }
        // ⟨x, y+y'⟩ = ⟨x,y⟩⟨x,y'⟩ for the group sum of finite words
        let x = iw("2(01)");
        for (s1, s2) in [("120", "211"), ("22", "0012"), ("1", "2")] {
            let y1 = w(s1);
            let y2 = w(s2);
            let y_sum = word_group_add(&y1, &y2, a3).unwrap();
            let lhs = pairing_turns(&x, &y_sum, a3).unwrap();
            let sum = pairing_turns(&x, &y1, a3).unwrap() + pairing_turns(&x, &y2, a3).unwrap();
            assert_eq!(lhs, &sum - sum.floor());
        }
    }

    #[test]
    fn word_string_round_trip() {
        for s in ["0120", "", "101"] {
            assert_eq!(w(s).to_string(), s);
        }
        assert_eq!(iw("01(20)").to_string(), "01(20)");
        assert!("01".parse::<InfiniteWord>().is_err());
        assert!("(())".parse::<InfiniteWord>().is_err());
        assert!(InfiniteWord::new(Word::empty(), Word::empty()).is_err());
    }

    #[test]
    fn word_index_round_trip() {
        let a3 = Alphabet::new(3).unwrap();
        for idx in 0..27 {
            let word = Word::from_index(a3, idx, 3);
            assert_eq!(word.index(a3), idx);
        }
        // first letter is most significant: prepending i adds i·N^k
        let f = w("12");
        assert_eq!(f.prepend(2).index(a3), 2 * 9 + f.index(a3));
    }
}
