//! Exact scalars for the truncated operator model.
//!
//! Everything the operator identities assert exactly is computed in one of
//! two small rings:
//!
//! * [`Exact`] — a single term `q · √r · e^{2πi·t}` with `q`, `t` rational and
//!   `r` a square-free positive integer. Closed under multiplication and
//!   conjugation; addition is defined only between compatible terms (same
//!   radicand and phase up to sign) and errors out otherwise instead of
//!   silently rounding.
//! * [`ExactReal`] — a finite sum `Σ q_r · √r`, closed under addition and
//!   multiplication. Used where half-densities of distinct measures mix.
//!
//! Rationals are [`num_rational::BigRational`] throughout; `√r` terms keep
//! weight embeddings like `e_f ↦ Σ_i √p_i e_{(f i)}` exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Shorthand rational constructor.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders `a/b` with the denominator omitted when it is 1, e.g. `3/8`, `1`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a/b` or a bare integer.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let denom: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if denom.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(numer, denom))
}

/// Reduces a rational phase (in turns, i.e. multiples of 2π) to `[0, 1)`.
fn reduce_turns(t: &Rat) -> Rat {
    let f = t.floor();
    t - f
}

/// Splits `n` into `(s, r)` with `n = s²·r`, `r` square-free.
fn square_free_split(n: &BigUint) -> Result<(BigUint, BigUint)> {
    if n.is_zero() {
        return Ok((BigUint::zero(), BigUint::one()));
    }
    let mut m = n.to_u64().ok_or(Error::RadicandOverflow)?;
    let mut square_part: u64 = 1;
    let mut free: u64 = 1;
    let mut p: u64 = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            for _ in 0..e / 2 {
                square_part = square_part.checked_mul(p).ok_or(Error::RadicandOverflow)?;
            }
            if e % 2 == 1 {
                free = free.checked_mul(p).ok_or(Error::RadicandOverflow)?;
            }
        }
        p += 1;
    }
    // leftover m is prime
    if m > 1 {
        free = free.checked_mul(m).ok_or(Error::RadicandOverflow)?;
    }
    Ok((BigUint::from(square_part), BigUint::from(free)))
}

/// A scalar `coeff · √radicand · e^{2πi·turns}` in canonical form:
/// radicand square-free and positive, turns in `[0, 1/2)` (a half turn is
/// folded into the sign of `coeff`), and zero is `(0, 1, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exact {
    coeff: Rat,
    radicand: BigUint,
    turns: Rat,
}

impl Exact {
    pub fn zero() -> Self {
        Exact { coeff: Rat::zero(), radicand: BigUint::one(), turns: Rat::zero() }
    }

    pub fn one() -> Self {
        Exact::from_rat(Rat::one())
    }

    pub fn from_rat(q: Rat) -> Self {
        Exact { coeff: q, radicand: BigUint::one(), turns: Rat::zero() }.normalized()
    }

    pub fn from_i64(n: i64) -> Self {
        Exact::from_rat(rat_int(n))
    }

    /// `√r` for a non-negative rational `r`.
    pub fn sqrt_of(r: &Rat) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Parse("square root of a negative rational".into()));
        }
        // √(a/b) = √(a·b) / b
        let a = r.numer().magnitude().clone();
        let b = r.denom().magnitude().clone();
        let prod = &a * &b;
        let (s, free) = square_free_split(&prod)?;
        let coeff = Rat::new(BigInt::from(s), BigInt::from(b));
        Ok(Exact { coeff, radicand: free, turns: Rat::zero() }.normalized())
    }

    /// Unimodular scalar `e^{2πi·turns}`.
    pub fn phase(turns: Rat) -> Self {
        Exact { coeff: Rat::one(), radicand: BigUint::one(), turns }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.coeff.is_zero() {
            return Exact::zero();
        }
        self.turns = reduce_turns(&self.turns);
        if self.turns >= rat(1, 2) {
            self.turns -= rat(1, 2);
            self.coeff = -self.coeff;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.radicand.is_one() && self.turns.is_zero()
    }

    /// The underlying rational when the scalar is real rational.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.radicand.is_one() && self.turns.is_zero() {
            Some(self.coeff.clone())
        } else {
            None
        }
    }

    pub fn mul(&self, other: &Exact) -> Result<Exact> {
        if self.is_zero() || other.is_zero() {
            return Ok(Exact::zero());
        }
        let prod = &self.radicand * &other.radicand;
        let (s, free) = square_free_split(&prod)?;
        Ok(Exact {
            coeff: &self.coeff * &other.coeff * Rat::from_integer(BigInt::from(s)),
            radicand: free,
            turns: &self.turns + &other.turns,
        }
        .normalized())
    }

    /// Addition inside the ring fragment. Errors when the two terms are not
    /// compatible (different radicand or phase), which in the operator model
    /// signals a bookkeeping bug rather than a numerical condition.
    pub fn try_add(&self, other: &Exact) -> Result<Exact> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.radicand == other.radicand && self.turns == other.turns {
            return Ok(Exact {
                coeff: &self.coeff + &other.coeff,
                radicand: self.radicand.clone(),
                turns: self.turns.clone(),
            }
            .normalized());
        }
        Err(Error::InexactSum)
    }

    pub fn neg(&self) -> Exact {
        Exact {
            coeff: -self.coeff.clone(),
            radicand: self.radicand.clone(),
            turns: self.turns.clone(),
        }
        .normalized()
    }

    pub fn conj(&self) -> Exact {
        Exact {
            coeff: self.coeff.clone(),
            radicand: self.radicand.clone(),
            turns: -self.turns.clone(),
        }
        .normalized()
    }

    /// `|x|²`, always rational.
    pub fn abs_sq(&self) -> Rat {
        &self.coeff * &self.coeff * Rat::from_integer(BigInt::from(self.radicand.clone()))
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let mag = rat_to_f64(&self.coeff)
            * BigInt::from(self.radicand.clone()).to_f64().unwrap_or(f64::NAN).sqrt();
        let ang = 2.0 * std::f64::consts::PI * rat_to_f64(&self.turns);
        Complex64::from_polar(mag.abs(), ang + if mag < 0.0 { std::f64::consts::PI } else { 0.0 })
    }

    /// Serialization for operator dumps: a plain fraction string for rational
    /// entries, otherwise `(coeff√radicand, turns)` as a two-element array
    /// with the phase given as a fraction of a full 2π turn.
    pub fn to_json(&self) -> serde_json::Value {
        if let Some(q) = self.as_rat() {
            serde_json::Value::String(format_rat(&q))
        } else {
            let mag = if self.radicand.is_one() {
                format_rat(&self.coeff)
            } else {
                format!("{}*sqrt({})", format_rat(&self.coeff), self.radicand)
            };
            serde_json::json!([mag, format_rat(&self.turns)])
        }
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", format_rat(&self.coeff))?;
        if !self.radicand.is_one() {
            write!(f, "·√{}", self.radicand)?;
        }
        if !self.turns.is_zero() {
            write!(f, "·e({})", format_rat(&self.turns))?;
        }
        Ok(())
    }
}

/// A finite sum `Σ_r q_r √r` over square-free positive integers `r`.
///
/// Distinct square roots are linearly independent over the rationals, so the
/// normalized term map gives exact equality and zero tests.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExactReal {
    terms: BTreeMap<BigUint, Rat>,
}

impl ExactReal {
    pub fn zero() -> Self {
        ExactReal { terms: BTreeMap::new() }
    }

    pub fn from_rat(q: Rat) -> Self {
        let mut s = ExactReal::zero();
        s.add_term(q, BigUint::one());
        s
    }

    pub fn from_i64(n: i64) -> Self {
        ExactReal::from_rat(rat_int(n))
    }

    /// `q·√r` for rational `r ≥ 0`.
    pub fn term(q: Rat, r: &Rat) -> Result<Self> {
        let e = Exact::sqrt_of(r)?;
        let mut s = ExactReal::zero();
        s.add_term(q * e.coeff, e.radicand);
        Ok(s)
    }

    pub fn sqrt_of(r: &Rat) -> Result<Self> {
        ExactReal::term(Rat::one(), r)
    }

    fn add_term(&mut self, q: Rat, radicand: BigUint) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(radicand.clone()).or_insert_with(Rat::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&radicand);
        }
    }

    pub fn add(&self, other: &ExactReal) -> ExactReal {
        let mut out = self.clone();
        for (r, q) in &other.terms {
            out.add_term(q.clone(), r.clone());
        }
        out
    }

    pub fn sub(&self, other: &ExactReal) -> ExactReal {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExactReal {
        ExactReal { terms: self.terms.iter().map(|(r, q)| (r.clone(), -q.clone())).collect() }
    }

    pub fn mul(&self, other: &ExactReal) -> Result<ExactReal> {
        let mut out = ExactReal::zero();
        for (r1, q1) in &self.terms {
            for (r2, q2) in &other.terms {
                let prod = r1 * r2;
                let (s, free) = square_free_split(&prod)?;
                out.add_term(q1 * q2 * Rat::from_integer(BigInt::from(s)), free);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, q: &Rat) -> ExactReal {
        if q.is_zero() {
            return ExactReal::zero();
        }
        ExactReal { terms: self.terms.iter().map(|(r, c)| (r.clone(), c * q)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rat(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (r, q) = self.terms.iter().next().unwrap();
                if r.is_one() {
                    Some(q.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, q)| {
                rat_to_f64(q) * BigInt::from(r.clone()).to_f64().unwrap_or(f64::NAN).sqrt()
            })
            .sum()
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(r, q)| {
                if r.is_one() {
                    format_rat(q)
                } else {
                    format!("{}√{}", format_rat(q), r)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_free_normalization() {
        let x = Exact::sqrt_of(&rat(8, 1)).unwrap();
        // √8 = 2√2
        assert_eq!(x, Exact::sqrt_of(&rat(2, 1)).unwrap().mul(&Exact::from_i64(2)).unwrap());
        let y = Exact::sqrt_of(&rat(1, 2)).unwrap();
        // √(1/2)·√(1/2) = 1/2
        assert_eq!(y.mul(&y).unwrap().as_rat(), Some(rat(1, 2)));
    }

    #[test]
    fn phase_folding() {
        let minus_one = Exact::phase(rat(1, 2));
        assert_eq!(minus_one.as_rat(), Some(rat(-1, 1)));
        let i = Exact::phase(rat(1, 4));
        assert_eq!(i.mul(&i).unwrap().as_rat(), Some(rat(-1, 1)));
        assert!(i.mul(&i.conj()).unwrap().is_one());
    }

    #[test]
    fn incompatible_sum_is_an_error() {
        let a = Exact::sqrt_of(&rat(2, 1)).unwrap();
        let b = Exact::sqrt_of(&rat(3, 1)).unwrap();
        assert_eq!(a.try_add(&b), Err(Error::InexactSum));
        // but q√2 - q√2 = 0 works
        assert!(a.try_add(&a.neg()).unwrap().is_zero());
    }

    #[test]
    fn exact_real_arithmetic() {
        let a = ExactReal::sqrt_of(&rat(2, 1)).unwrap();
        let b = ExactReal::sqrt_of(&rat(3, 1)).unwrap();
        let s = a.add(&b);
        // (√2+√3)² = 5 + 2√6
        let sq = s.mul(&s).unwrap();
        let expect =
            ExactReal::from_rat(rat(5, 1)).add(&ExactReal::term(rat(2, 1), &rat(6, 1)).unwrap());
        assert_eq!(sq, expect);
        assert!(s.sub(&s).is_zero());
        assert!((s.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn fraction_strings_round_trip() {
        for s in ["3/8", "-2/27", "1", "0", "-5"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
    }
}
