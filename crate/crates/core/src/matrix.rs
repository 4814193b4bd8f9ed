//! 2x2 matrices of truncated Laurent series.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FiniteField, Fq};
use crate::series::{Scale, Series, UScale, VScale};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat2<S: Scale> {
    pub e: [[Series<S>; 2]; 2],
}

pub type UMat = Mat2<UScale>;
pub type VMat = Mat2<VScale>;

impl<S: Scale> Mat2<S> {
    pub fn new(a: Series<S>, b: Series<S>, c: Series<S>, d: Series<S>) -> Self {
        Mat2 { e: [[a, b], [c, d]] }
    }

    pub fn identity(field: &'static FiniteField) -> Self {
        Self::diag(Series::one(field), Series::one(field))
    }

    pub fn diag(x: Series<S>, y: Series<S>) -> Self {
        let z = Series::exact_zero(x.field());
        Self::new(x, z.clone(), z, y)
    }

    /// `diag(x^i, x^j)`, exact.
    pub fn diag_monomial(field: &'static FiniteField, i: i64, j: i64) -> Self {
        Self::diag(Series::monomial(field.one(), i), Series::monomial(field.one(), j))
    }

    /// The swap matrix `((0,1),(1,0))`.
    pub fn swap(field: &'static FiniteField) -> Self {
        let z = Series::exact_zero(field);
        let o = Series::one(field);
        Self::new(z.clone(), o.clone(), o, z)
    }

    pub fn field(&self) -> &'static FiniteField {
        self.e[0][0].field()
    }

    pub fn get(&self, r: usize, c: usize) -> &Series<S> {
        &self.e[r][c]
    }

    pub fn entries(&self) -> impl Iterator<Item = &Series<S>> {
        self.e.iter().flatten()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = |r: usize, c: usize| self.e[r][0].mul(&o.e[0][c]).add(&self.e[r][1].mul(&o.e[1][c]));
        Mat2 { e: [[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]] }
    }

    pub fn add(&self, o: &Self) -> Self {
        let m = |r: usize, c: usize| self.e[r][c].add(&o.e[r][c]);
        Mat2 { e: [[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]] }
    }

    pub fn map(&self, f: impl Fn(&Series<S>) -> Series<S>) -> Self {
        Mat2 { e: [[f(&self.e[0][0]), f(&self.e[0][1])], [f(&self.e[1][0]), f(&self.e[1][1])]] }
    }

    pub fn scale(&self, c: Fq) -> Self {
        self.map(|x| x.scale(c))
    }

    /// Multiply every entry by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        self.map(|x| x.shift(k))
    }

    pub fn frobenius(&self) -> Self {
        self.map(|x| x.frobenius())
    }

    pub fn truncate(&self, prec: i64) -> Self {
        self.map(|x| x.truncate(prec))
    }

    pub fn det(&self) -> Series<S> {
        self.e[0][0].mul(&self.e[1][1]).sub(&self.e[0][1].mul(&self.e[1][0]))
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.e[0][0].clone(), self.e[1][0].clone(), self.e[0][1].clone(), self.e[1][1].clone())
    }

    pub fn adjugate(&self) -> Self {
        Self::new(self.e[1][1].clone(), self.e[0][1].neg(), self.e[1][0].neg(), self.e[0][0].clone())
    }

    pub fn inv(&self) -> Result<Self> {
        let dinv = self.det().inv()?;
        Ok(self.adjugate().map(|x| x.mul(&dinv)))
    }

    /// Conjugation by the swap matrix: `(a,b,c,d) -> (d,c,b,a)`.
    pub fn conj_swap(&self) -> Self {
        Self::new(self.e[1][1].clone(), self.e[1][0].clone(), self.e[0][1].clone(), self.e[0][0].clone())
    }

    pub fn swap_rows(&self) -> Self {
        Self::new(self.e[1][0].clone(), self.e[1][1].clone(), self.e[0][0].clone(), self.e[0][1].clone())
    }

    pub fn swap_cols(&self) -> Self {
        Self::new(self.e[0][1].clone(), self.e[0][0].clone(), self.e[1][1].clone(), self.e[1][0].clone())
    }

    pub fn agrees_with(&self, o: &Self) -> bool {
        self.entries().zip(o.entries()).all(|(x, y)| x.agrees_with(y))
    }

    /// Smallest absolute precision among the entries.
    pub fn precision(&self) -> Option<i64> {
        self.entries().filter_map(|x| x.precision()).min()
    }
}

impl UMat {
    pub fn to_v(&self, scale: i64) -> Result<VMat> {
        Ok(Mat2 {
            e: [
                [self.e[0][0].to_v(scale)?, self.e[0][1].to_v(scale)?],
                [self.e[1][0].to_v(scale)?, self.e[1][1].to_v(scale)?],
            ],
        })
    }
}

impl VMat {
    pub fn to_u(&self, scale: i64) -> UMat {
        Mat2 {
            e: [
                [self.e[0][0].to_u(scale), self.e[0][1].to_u(scale)],
                [self.e[1][0].to_u(scale), self.e[1][1].to_u(scale)],
            ],
        }
    }

    /// Whether the matrix lies in `GL_2(F[[v]])`. Fails when an entry or the
    /// determinant is not known to nonnegative order.
    pub fn is_unit(&self) -> Result<bool> {
        for x in self.entries() {
            match (x.valuation(), x.precision()) {
                (Some(v), _) if v < 0 => return Ok(false),
                (None, Some(n)) if n < 0 => {
                    return Err(Error::Precision("matrix entry unknown below degree 0".into()))
                }
                _ => {}
            }
        }
        let det = self.det();
        match (det.valuation(), det.precision()) {
            (Some(v), _) => Ok(v == 0),
            (None, Some(n)) if n <= 0 => Err(Error::Precision("determinant unknown at degree 0".into())),
            (None, _) => Ok(false),
        }
    }

    /// Reduction modulo `v` as a matrix over the coefficient field, assuming
    /// integral entries.
    pub fn constant_terms(&self) -> [[Fq; 2]; 2] {
        let c = |r: usize, s: usize| self.e[r][s].coeff(0);
        [[c(0, 0), c(0, 1)], [c(1, 0), c(1, 1)]]
    }
}

impl<S: Scale> fmt::Debug for Mat2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1]
        )
    }
}
