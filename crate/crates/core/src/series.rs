//! Truncated Laurent series over a finite field.
//!
//! A series is a finite set of nonzero terms together with an absolute
//! precision: `Some(n)` means the coefficients of `x^k` for `k < n` are known
//! and everything from `x^n` on is unknown; `None` means the series is exact.
//! The variable is either `u` or `v = u^(e')`; the two are separate types so
//! that mixing them does not compile.

use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::field::{FiniteField, Fq};

pub trait Scale: Copy + Clone + fmt::Debug + PartialEq + Eq + 'static {
    const VAR: &'static str;
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct UScale;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct VScale;

impl Scale for UScale {
    const VAR: &'static str = "u";
}

impl Scale for VScale {
    const VAR: &'static str = "v";
}

pub type USeries = Series<UScale>;
pub type VSeries = Series<VScale>;

const DENSE_SPAN_LIMIT: i64 = 1 << 22;

#[derive(Clone)]
pub struct Series<S: Scale> {
    field: &'static FiniteField,
    terms: Vec<(i64, Fq)>,
    prec: Option<i64>,
    _scale: PhantomData<S>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<S: Scale> Series<S> {
    fn raw(field: &'static FiniteField, terms: Vec<(i64, Fq)>, prec: Option<i64>) -> Self {
        Series { field, terms, prec, _scale: PhantomData }
    }

    /// Builds a series from arbitrary terms; repeated exponents are summed.
    pub fn from_terms(
        field: &'static FiniteField,
        terms: impl IntoIterator<Item = (i64, Fq)>,
        prec: Option<i64>,
    ) -> Self {
        let mut t: Vec<(i64, Fq)> = terms
            .into_iter()
            .filter(|(e, c)| !c.is_zero() && prec.is_none_or(|n| *e < n))
            .collect();
        t.sort_by_key(|(e, _)| *e);
        let mut out: Vec<(i64, Fq)> = Vec::with_capacity(t.len());
        for (e, c) in t {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Self::raw(field, out, prec)
    }

    /// `sum_j coeffs[j] x^(valuation + j) + O(x^prec)`.
    pub fn from_dense(field: &'static FiniteField, valuation: i64, coeffs: &[Fq], prec: Option<i64>) -> Self {
        Self::from_terms(
            field,
            coeffs.iter().enumerate().map(|(j, &c)| (valuation + j as i64, c)),
            prec,
        )
    }

    pub fn zero(field: &'static FiniteField, prec: Option<i64>) -> Self {
        Self::raw(field, Vec::new(), prec)
    }

    pub fn exact_zero(field: &'static FiniteField) -> Self {
        Self::zero(field, None)
    }

    pub fn one(field: &'static FiniteField) -> Self {
        Self::monomial(field.one(), 0)
    }

    /// Exact `c x^exp`.
    pub fn monomial(c: Fq, exp: i64) -> Self {
        Self::from_terms(c.field(), [(exp, c)], None)
    }

    pub fn field(&self) -> &'static FiniteField {
        self.field
    }

    pub fn terms(&self) -> &[(i64, Fq)] {
        &self.terms
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Zero as far as the known coefficients go.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn leading(&self) -> Option<(i64, Fq)> {
        self.terms.first().copied()
    }

    pub fn coeff(&self, exp: i64) -> Fq {
        match self.terms.binary_search_by_key(&exp, |(e, _)| *e) {
            Ok(i) => self.terms[i].1,
            Err(_) => self.field.zero(),
        }
    }

    /// Lower bound for the valuation that is valid whatever the unknown tail is.
    fn valuation_bound(&self) -> Option<i64> {
        self.valuation().or(self.prec)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let p = min_prec(self.prec, Some(prec));
        Self::from_terms(self.field, self.terms.iter().copied(), p)
    }

    pub fn scale(&self, c: Fq) -> Self {
        if c.is_zero() {
            return Self::exact_zero(self.field);
        }
        Self::raw(self.field, self.terms.iter().map(|&(e, x)| (e, x * c)).collect(), self.prec)
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::raw(
            self.field,
            self.terms.iter().map(|&(e, c)| (e + k, c)).collect(),
            self.prec.map(|n| n + k),
        )
    }

    /// Substitution `x -> x^p`; coefficients are fixed.
    pub fn frobenius(&self) -> Self {
        let p = self.field.characteristic() as i64;
        self.frobenius_power(p)
    }

    /// Substitution `x -> x^q` for a positive integer `q`.
    pub fn frobenius_power(&self, q: i64) -> Self {
        assert!(q > 0);
        Self::raw(
            self.field,
            self.terms.iter().map(|&(e, c)| (e * q, c)).collect(),
            self.prec.map(|n| n * q),
        )
    }

    /// Equality of the coefficients both operands know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = min_prec(self.prec, other.prec);
        let cut = |s: &Self| -> Vec<(i64, Fq)> {
            s.terms.iter().copied().filter(|(e, _)| n.is_none_or(|n| *e < n)).collect()
        };
        cut(self) == cut(other)
    }

    /// `Some(k)` when the series is exactly `c x^k`.
    pub fn as_monomial(&self) -> Option<(i64, Fq)> {
        (self.prec.is_none() && self.terms.len() == 1).then(|| self.terms[0])
    }

    pub fn neg(&self) -> Self {
        Self::raw(self.field, self.terms.iter().map(|&(e, c)| (e, -c)).collect(), self.prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = min_prec(self.prec, other.prec);
        Self::from_terms(self.field, self.terms.iter().chain(other.terms.iter()).copied(), prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let field = self.field;
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (Some(pa), None) => other.valuation().map(|vb| vb + pa),
            (None, Some(pb)) => self.valuation().map(|va| va + pb),
            (Some(pa), Some(pb)) => {
                let va = self.valuation_bound().unwrap();
                let vb = other.valuation_bound().unwrap();
                Some((va + pb).min(vb + pa))
            }
        };
        if self.terms.is_empty() || other.terms.is_empty() {
            // An exact zero factor makes the product exactly zero.
            let exact_zero = (self.terms.is_empty() && self.prec.is_none())
                || (other.terms.is_empty() && other.prec.is_none());
            return Self::zero(field, if exact_zero { None } else { prec });
        }
        let lo = self.terms[0].0 + other.terms[0].0;
        let mut hi = self.terms.last().unwrap().0 + other.terms.last().unwrap().0;
        if let Some(n) = prec {
            hi = hi.min(n - 1);
        }
        if hi < lo {
            return Self::zero(field, prec);
        }
        let span = hi - lo + 1;
        if span <= DENSE_SPAN_LIMIT {
            let mut acc = vec![field.zero(); span as usize];
            for &(ea, ca) in &self.terms {
                if ea + other.terms[0].0 > hi {
                    break;
                }
                for &(eb, cb) in &other.terms {
                    let e = ea + eb;
                    if e > hi {
                        break;
                    }
                    let slot = &mut acc[(e - lo) as usize];
                    *slot += ca * cb;
                }
            }
            let terms = acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (lo + j as i64, c))
                .collect();
            Self::raw(field, terms, prec)
        } else {
            let mut prods = Vec::new();
            for &(ea, ca) in &self.terms {
                for &(eb, cb) in &other.terms {
                    if ea + eb <= hi {
                        prods.push((ea + eb, ca * cb));
                    }
                }
            }
            Self::from_terms(field, prods, prec)
        }
    }

    /// Multiplicative inverse. Exact monomials invert exactly; other exact
    /// series have no finite inverse and are rejected.
    pub fn inv(&self) -> Result<Self> {
        let (v, c) = self.leading().ok_or(Error::NotInvertible)?;
        let cinv = c.inv().unwrap();
        let abs = match self.prec {
            None if self.terms.len() == 1 => return Ok(Self::monomial(cinv, -v)),
            None => {
                return Err(Error::Precision(
                    "inverse of an exact non-monomial series needs a truncation".into(),
                ))
            }
            Some(n) => n,
        };
        let rel = abs - v;
        let g = self.terms.iter().fold(rel, |g, &(e, _)| g.gcd(&(e - v)));
        let g = g.max(1);
        let len = ((rel + g - 1) / g) as usize;
        let mut a = vec![self.field.zero(); len];
        for &(e, x) in &self.terms {
            let j = ((e - v) / g) as usize;
            if j < len {
                a[j] = x;
            }
        }
        let mut b = vec![self.field.zero(); len];
        b[0] = cinv;
        for n in 1..len {
            let mut s = self.field.zero();
            for k in 1..=n {
                if !a[k].is_zero() && !b[n - k].is_zero() {
                    s += a[k] * b[n - k];
                }
            }
            b[n] = -(s * cinv);
        }
        let terms = b.into_iter().enumerate().map(|(j, x)| (-v + g * j as i64, x));
        Ok(Self::from_terms(self.field, terms, Some(abs - 2 * v)))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.field);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl VSeries {
    /// Rewrite in the variable `u`, where `v = u^scale`.
    pub fn to_u(&self, scale: i64) -> USeries {
        Series::raw(
            self.field,
            self.terms.iter().map(|&(e, c)| (e * scale, c)).collect(),
            self.prec.map(|n| n * scale),
        )
    }
}

impl USeries {
    /// Rewrite in `v = u^scale`; fails when a term is off the lattice.
    pub fn to_v(&self, scale: i64) -> Result<VSeries> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(e, c) in &self.terms {
            if e.rem_euclid(scale) != 0 {
                return Err(Error::MalformedGrading { exponent: e });
            }
            terms.push((e / scale, c));
        }
        let prec = self.prec.map(|n| -((-n).div_euclid(scale)));
        Ok(Series::raw(self.field, terms, prec))
    }

    /// The exponent classes modulo `modulus` that occur.
    pub fn exponent_classes(&self, modulus: i64) -> Vec<i64> {
        let mut out: Vec<i64> = self.terms.iter().map(|(e, _)| e.rem_euclid(modulus)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl<S: Scale> PartialEq for Series<S> {
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec && self.terms == other.terms
    }
}

impl<S: Scale> Eq for Series<S> {}

impl<S: Scale> fmt::Debug for Series<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<S: Scale> fmt::Display for Series<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}){}^{e}", S::VAR)?;
        }
        if let Some(n) = self.prec {
            write!(f, " + O({}^{n})", S::VAR)?;
        }
        Ok(())
    }
}

impl<S: Scale> Add for &Series<S> {
    type Output = Series<S>;
    fn add(self, rhs: Self) -> Series<S> {
        Series::add(self, rhs)
    }
}

impl<S: Scale> Sub for &Series<S> {
    type Output = Series<S>;
    fn sub(self, rhs: Self) -> Series<S> {
        Series::sub(self, rhs)
    }
}

impl<S: Scale> Mul for &Series<S> {
    type Output = Series<S>;
    fn mul(self, rhs: Self) -> Series<S> {
        Series::mul(self, rhs)
    }
}

impl<S: Scale> Neg for &Series<S> {
    type Output = Series<S>;
    fn neg(self) -> Series<S> {
        Series::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> &'static FiniteField {
        FiniteField::get(3, 1).unwrap()
    }

    fn dense(c: &[i64], prec: Option<i64>) -> VSeries {
        let k = f3();
        let coeffs: Vec<Fq> = c.iter().map(|&x| k.from_int(x)).collect();
        VSeries::from_dense(k, 0, &coeffs, prec)
    }

    #[test]
    fn laurent_times_monomial() {
        let k = f3();
        let x = VSeries::from_terms(k, [(-1, k.one()), (0, k.one())], None);
        let y = VSeries::monomial(k.one(), 1);
        assert_eq!(x.mul(&y), dense(&[1, 1], None));
    }

    #[test]
    fn geometric_inverse() {
        let inv = dense(&[1, 1], Some(3)).inv().unwrap();
        assert_eq!(inv, dense(&[1, 2, 1], Some(3)));
    }

    #[test]
    fn frobenius_substitution() {
        let k = f3();
        let x = dense(&[1, 1], Some(5));
        let y = x.frobenius();
        assert_eq!(y.terms(), &[(0, k.one()), (3, k.one())]);
        assert_eq!(y.precision(), Some(15));
    }

    #[test]
    fn product_precision_tracks_valuations() {
        let a = dense(&[0, 1], Some(10)); // v + O(v^10)
        let b = dense(&[0, 0, 1], Some(7)); // v^2 + O(v^7)
        assert_eq!(a.mul(&b).precision(), Some(8));
    }

    #[test]
    fn inverse_of_exact_polynomial_is_refused() {
        assert!(dense(&[1, 1], None).inv().is_err());
        assert!(dense(&[0], Some(4)).inv().is_err());
    }

    #[test]
    fn scale_conversion_roundtrip() {
        let a = dense(&[1, 2, 0, 1], Some(6));
        let u = a.to_u(8);
        assert_eq!(u.precision(), Some(48));
        assert_eq!(u.to_v(8).unwrap(), a);
        let off = USeries::monomial(f3().one(), 3);
        assert!(off.to_v(8).is_err());
    }

    #[test]
    fn sparse_inverse_uses_the_lattice() {
        let k = f3();
        let x = USeries::from_terms(k, [(8, k.one()), (16, k.one())], Some(8 * 40));
        let y = x.inv().unwrap();
        let prod = x.mul(&y);
        assert!(prod.agrees_with(&USeries::one(k)));
        assert_eq!(prod.precision(), Some(8 * 40 - 8));
    }
}
