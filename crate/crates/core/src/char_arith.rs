//! Tame characters as exponent residues modulo `p^m - 1`.
//!
//! A character at level `m` is a power of the fundamental character of index 0.
//! The character of index `i` is `omega_0^(p^(m-i))`, so an exponent tuple
//! `(a_0, ..., a_{m-1})` collapses to `sum a_i p^(m-i)`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_odd_prime(p: u32) -> Result<()> {
    if p == 2 || !is_prime(p as u64) {
        return Err(Error::InvalidPrime(p as u64));
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharExp {
    prime: u32,
    level: u32,
    residue: BigUint,
}

impl CharExp {
    pub fn new(prime: u32, level: u32, exponent: impl Into<BigInt>) -> Result<Self> {
        if !is_prime(prime as u64) {
            return Err(Error::InvalidPrime(prime as u64));
        }
        if level == 0 {
            return Err(Error::InvalidParameter("character level must be positive".into()));
        }
        let modulus = BigInt::from(modulus(prime, level));
        let residue = exponent.into().mod_floor(&modulus);
        Ok(Self {
            prime,
            level,
            residue: residue.to_biguint().expect("mod_floor is non-negative"),
        })
    }

    pub fn trivial(prime: u32, level: u32) -> Result<Self> {
        Self::new(prime, level, 0)
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn residue_i64(&self) -> Option<i64> {
        self.residue.to_i64()
    }

    /// `p^level - 1`.
    pub fn modulus(&self) -> BigUint {
        modulus(self.prime, self.level)
    }

    pub fn is_trivial(&self) -> bool {
        self.residue.is_zero()
    }

    /// Product of characters.
    pub fn mul(&self, other: &CharExp) -> CharExp {
        assert_eq!(
            (self.prime, self.level),
            (other.prime, other.level),
            "characters of different level"
        );
        let residue = (&self.residue + &other.residue) % self.modulus();
        CharExp { residue, ..self.clone() }
    }

    pub fn pow(&self, k: impl Into<BigInt>) -> CharExp {
        let e = BigInt::from(self.residue.clone()) * k.into();
        CharExp::new(self.prime, self.level, e).expect("parameters already validated")
    }

    pub fn inverse(&self) -> CharExp {
        self.pow(-1)
    }

    /// Exponent tuple with entries in `[0, p-1]` collapsing to this character:
    /// the base-`p` digits of the residue, read in collapse order.
    pub fn digits(&self) -> Vec<i64> {
        let m = self.level as usize;
        let p = BigUint::from(self.prime);
        let mut base = Vec::with_capacity(m);
        let mut r = self.residue.clone();
        for _ in 0..m {
            let (q, d) = r.div_rem(&p);
            base.push(d.to_i64().unwrap());
            r = q;
        }
        (0..m).map(|i| base[(m - i) % m]).collect()
    }
}

impl fmt::Debug for CharExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CharExp({} mod {}^{}-1)", self.residue, self.prime, self.level)
    }
}

impl fmt::Display for CharExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

pub fn modulus(p: u32, level: u32) -> BigUint {
    BigUint::from(p).pow(level) - BigUint::one()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentTuple {
    pub prime: u32,
    pub entries: Vec<BigInt>,
}

impl ExponentTuple {
    pub fn new<T: Into<BigInt>>(prime: u32, entries: impl IntoIterator<Item = T>) -> Self {
        Self {
            prime,
            entries: entries.into_iter().map(Into::into).collect(),
        }
    }

    pub fn level(&self) -> u32 {
        self.entries.len() as u32
    }
}

/// Residue of `prod_i omega'_i^(a_i)`; index 0 has weight 1.
pub fn collapse_char_exponents(a: &ExponentTuple) -> Result<CharExp> {
    let m = a.level();
    if m == 0 {
        return Err(Error::InvalidParameter("empty exponent tuple".into()));
    }
    let p = BigInt::from(a.prime);
    let mut total = BigInt::zero();
    for (i, e) in a.entries.iter().enumerate() {
        let weight = p.pow((m - i as u32) % m);
        total += e * weight;
    }
    CharExp::new(a.prime, m, total)
}

/// Convenience for small tuples.
pub fn collapse(p: u32, entries: &[i64]) -> Result<CharExp> {
    collapse_char_exponents(&ExponentTuple::new(p, entries.iter().copied()))
}

/// The unique character at level `f` whose composite with the norm is `e`,
/// if there is one.
pub fn factor_through_norm(e: &CharExp) -> Result<Option<CharExp>> {
    if !e.level.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "norm descent needs an even level, got {}",
            e.level
        )));
    }
    let f = e.level / 2;
    let norm = BigUint::from(e.prime).pow(f) + BigUint::one();
    let (q, r) = e.residue.div_rem(&norm);
    if !r.is_zero() {
        return Ok(None);
    }
    CharExp::new(e.prime, f, BigInt::from(q)).map(Some)
}

/// Membership in the lattice of exponent shifts with trivial character.
pub fn lambda_membership(lambda: &ExponentTuple) -> Result<bool> {
    Ok(collapse_char_exponents(lambda)?.is_trivial())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapse_examples() {
        assert_eq!(collapse(5, &[0, 4]).unwrap().residue_i64(), Some(20));
        assert_eq!(collapse(3, &[1, 1]).unwrap().residue_i64(), Some(4));
        assert!(collapse(7, &[0, 0, 0]).unwrap().is_trivial());
    }

    #[test]
    fn residue_normalization() {
        assert!(CharExp::new(3, 2, 8).unwrap().is_trivial());
        assert!(!CharExp::new(3, 2, 1).unwrap().is_trivial());
        assert_eq!(CharExp::new(3, 2, -1).unwrap().residue_i64(), Some(7));
    }

    #[test]
    fn norm_descent_examples() {
        let e = CharExp::new(3, 2, 4).unwrap();
        assert_eq!(factor_through_norm(&e).unwrap().unwrap().residue_i64(), Some(1));
        let e = CharExp::new(3, 2, 1).unwrap();
        assert_eq!(factor_through_norm(&e).unwrap(), None);
        let e = CharExp::new(5, 4, 0).unwrap();
        assert!(factor_through_norm(&e).unwrap().unwrap().is_trivial());
    }

    #[test]
    fn lambda_examples() {
        let t = |v: &[i64]| ExponentTuple::new(3, v.iter().copied());
        assert!(lambda_membership(&t(&[0, 0])).unwrap());
        assert!(lambda_membership(&t(&[8, 0])).unwrap());
        assert!(!lambda_membership(&t(&[1, 0])).unwrap());
    }

    #[test]
    fn digits_collapse_back() {
        for r in 0..80 {
            let c = CharExp::new(3, 4, r).unwrap();
            let d = c.digits();
            assert!(d.iter().all(|&x| (0..3).contains(&x)));
            assert_eq!(collapse(3, &d).unwrap(), c);
        }
    }

    #[test]
    fn rejects_composite_prime() {
        assert!(CharExp::new(9, 1, 0).is_err());
    }
}
