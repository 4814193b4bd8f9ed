//! Small finite fields `F_{p^m}` with table arithmetic.
//!
//! Elements are encoded as integers `sum c_j p^j` over the polynomial basis
//! `1, x, ..., x^(m-1)` modulo the lexicographically least monic irreducible
//! polynomial (compared from the `x^(m-1)` coefficient down).

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use crate::char_arith::is_prime;
use crate::error::{Error, Result};

pub const MAX_FIELD_SIZE: u32 = 1024;

pub struct FiniteField {
    p: u32,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.degree)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree
    }
}

impl Eq for FiniteField {}

fn registry() -> &'static Mutex<HashMap<(u32, u32), &'static FiniteField>> {
    static REG: OnceLock<Mutex<HashMap<(u32, u32), &'static FiniteField>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

fn to_poly(mut v: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for c in out.iter_mut() {
        *c = v % p;
        v /= p;
    }
    out
}

fn from_poly(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Remainder of `a` modulo the monic polynomial `m` (low to high coefficients).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &mj) in m.iter().enumerate() {
                let t = &mut r[shift + j];
                *t = (*t + p - lead * mj % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let n = m.len() - 1;
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut g = to_poly(low as u32, p, d);
            g.push(1);
            if poly_rem(m, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible of the given degree, ordered by the coefficient
/// tuple `(c_{m-1}, ..., c_0)`.
pub fn least_irreducible(p: u32, degree: u32) -> Vec<u32> {
    let d = degree as usize;
    let count = p.pow(degree);
    for code in 0..count {
        // code read big-endian in base p gives (c_{m-1}, ..., c_0)
        let mut poly = to_poly(code, p, d);
        if d == 1 || poly[0] != 0 {
            poly.push(1);
            if is_irreducible(&poly, p) {
                return poly;
            }
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FiniteField {
    pub fn get(p: u32, degree: u32) -> Result<&'static FiniteField> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidPrime(p as u64));
        }
        if degree == 0 {
            return Err(Error::InvalidParameter("field degree must be positive".into()));
        }
        match (p as u64).checked_pow(degree) {
            Some(q) if q <= MAX_FIELD_SIZE as u64 => {}
            _ => return Err(Error::FieldTooLarge { p, degree }),
        }
        let mut reg = registry().lock().unwrap();
        if let Some(f) = reg.get(&(p, degree)) {
            return Ok(f);
        }
        let field: &'static FiniteField = Box::leak(Box::new(Self::build(p, degree)));
        reg.insert((p, degree), field);
        Ok(field)
    }

    fn build(p: u32, degree: u32) -> Self {
        let d = degree as usize;
        let size = p.pow(degree);
        let modulus = least_irreducible(p, degree);
        let q = size as usize;
        let polys: Vec<Vec<u32>> = (0..size).map(|v| to_poly(v, p, d)).collect();
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for x in 0..q {
            for y in 0..q {
                let s: Vec<u32> = (0..d).map(|j| (polys[x][j] + polys[y][j]) % p).collect();
                add[x * q + y] = from_poly(&s, p);
                let mut prod = vec![0u32; 2 * d - 1];
                for i in 0..d {
                    for j in 0..d {
                        prod[i + j] = (prod[i + j] + polys[x][i] * polys[y][j]) % p;
                    }
                }
                mul[x * q + y] = from_poly(&poly_rem(&prod, &modulus, p), p);
            }
        }
        let neg = (0..q)
            .map(|x| {
                let n: Vec<u32> = polys[x].iter().map(|&c| (p - c) % p).collect();
                from_poly(&n, p)
            })
            .collect();
        let mut inv = vec![0; q];
        for x in 1..q {
            if d == 1 {
                inv[x] = inv_mod_p(x as u32, p);
            } else {
                inv[x] = (1..q as u32).find(|&y| mul[x * q + y as usize] == 1).unwrap();
            }
        }
        FiniteField { p, degree, size, modulus, add, mul, neg, inv }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Defining polynomial, coefficients from constant term up.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_string(&self) -> String {
        join(self.modulus.iter())
    }

    pub fn zero(&'static self) -> Fq {
        Fq { field: self, value: 0 }
    }

    pub fn one(&'static self) -> Fq {
        Fq { field: self, value: 1 }
    }

    pub fn element(&'static self, value: u32) -> Fq {
        assert!(value < self.size, "element code {value} out of range for {self:?}");
        Fq { field: self, value }
    }

    pub fn from_int(&'static self, n: i64) -> Fq {
        self.element(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&'static self, coeffs: &[u32]) -> Result<Fq> {
        if coeffs.len() > self.degree as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidParameter(format!(
                "{coeffs:?} is not an element of {self:?}"
            )));
        }
        Ok(self.element(from_poly(coeffs, self.p)))
    }

    pub fn elements(&'static self) -> impl Iterator<Item = Fq> {
        (0..self.size).map(move |v| self.element(v))
    }

    pub fn units(&'static self) -> impl Iterator<Item = Fq> {
        (1..self.size).map(move |v| self.element(v))
    }
}

fn join<T: fmt::Display>(it: impl Iterator<Item = T>) -> String {
    it.map(|x| x.to_string()).collect::<Vec<_>>().join(".")
}

#[derive(Clone, Copy)]
pub struct Fq {
    field: &'static FiniteField,
    value: u32,
}

impl Fq {
    pub fn field(&self) -> &'static FiniteField {
        self.field
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    pub fn inv(&self) -> Option<Fq> {
        (self.value != 0).then(|| Fq { field: self.field, value: self.field.inv[self.value as usize] })
    }

    pub fn pow(&self, mut e: u64) -> Fq {
        let mut base = *self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `self^k` for any integer `k`; panics on `0^k` with `k < 0`.
    pub fn powi(&self, k: i64) -> Fq {
        if k >= 0 {
            self.pow(k as u64)
        } else {
            self.inv().expect("negative power of zero").pow(k.unsigned_abs())
        }
    }

    /// Coefficients in the polynomial basis, constant term first.
    pub fn coeffs(&self) -> Vec<u32> {
        to_poly(self.value, self.field.p, self.field.degree as usize)
    }

    fn idx(&self, other: &Fq) -> usize {
        debug_assert!(std::ptr::eq(self.field, other.field), "mixed fields");
        self.value as usize * self.field.size as usize + other.value as usize
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field == other.field
    }
}

impl Eq for Fq {}

impl Hash for Fq {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.field.p, self.field.degree, self.value).hash(state);
    }
}

impl PartialOrd for Fq {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fq {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.field.p, self.field.degree, self.value).cmp(&(other.field.p, other.field.degree, other.value))
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Prime-field elements print as integers; others as dot-separated
/// coefficient lists, constant term first.
impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree == 1 {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{}", join(self.coeffs().iter()))
        }
    }
}

impl Add for Fq {
    type Output = Fq;
    fn add(self, rhs: Fq) -> Fq {
        Fq { field: self.field, value: self.field.add[self.idx(&rhs)] }
    }
}

impl Sub for Fq {
    type Output = Fq;
    fn sub(self, rhs: Fq) -> Fq {
        self + (-rhs)
    }
}

impl Neg for Fq {
    type Output = Fq;
    fn neg(self) -> Fq {
        Fq { field: self.field, value: self.field.neg[self.value as usize] }
    }
}

impl Mul for Fq {
    type Output = Fq;
    fn mul(self, rhs: Fq) -> Fq {
        Fq { field: self.field, value: self.field.mul[self.idx(&rhs)] }
    }
}

impl Div for Fq {
    type Output = Fq;
    fn div(self, rhs: Fq) -> Fq {
        self * rhs.inv().expect("division by zero in a finite field")
    }
}

impl AddAssign for Fq {
    fn add_assign(&mut self, rhs: Fq) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fq {
    fn sub_assign(&mut self, rhs: Fq) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fq {
    fn mul_assign(&mut self, rhs: Fq) {
        *self = *self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_irreducibles() {
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(least_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(least_irreducible(5, 1), vec![0, 1]);
    }

    #[test]
    fn field_axioms_small() {
        for (p, m) in [(3, 1), (3, 2), (5, 2), (2, 4), (7, 1)] {
            let k = FiniteField::get(p, m).unwrap();
            for a in k.elements() {
                assert_eq!(a + (-a), k.zero());
                if !a.is_zero() {
                    assert_eq!(a * a.inv().unwrap(), k.one());
                    assert_eq!(a.pow((k.size() - 1) as u64), k.one());
                }
                for b in k.elements() {
                    assert_eq!(a * b, b * a);
                    assert_eq!(a + b, b + a);
                }
            }
        }
    }

    #[test]
    fn frobenius_is_additive() {
        let k = FiniteField::get(3, 3).unwrap();
        for a in k.elements() {
            for b in k.elements().step_by(5) {
                assert_eq!((a + b).pow(3), a.pow(3) + b.pow(3));
            }
        }
    }

    #[test]
    fn rejects_large_fields() {
        assert!(FiniteField::get(3, 7).is_err());
        assert!(FiniteField::get(4, 1).is_err());
    }

    #[test]
    fn cached_instances_are_shared() {
        let a = FiniteField::get(5, 2).unwrap();
        let b = FiniteField::get(5, 2).unwrap();
        assert!(std::ptr::eq(a, b));
    }
}
