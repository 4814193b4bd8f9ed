//! Rank-2 Breuil-Kisin modules with tame descent data over a finite field,
//! written in an eigenbasis.
//!
//! A module is stored by its coefficient quadruples `(a_i, b_i, c_i, d_i)` in
//! `F'[[v]]`, one per `i` in `Z/f'`; the partial Frobenius matrix in the
//! eigenbasis is `C_i = ((a, u^l'_i b), (u^l_i c, d))`.

pub mod descend;
pub mod extension;
pub mod operator_basis;
pub mod sample;

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::matrix::{UMat, VMat};
use crate::series::{USeries, VSeries};
use crate::tame::{enumerate_profiles, Profile, TameType, TypeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisForm {
    /// Coefficients `(a, b, c, d)` of an eigenbasis matrix.
    Eigenbasis,
    /// `A = ((a, b), (v c, d))`.
    DescentRemoved,
    /// Partial Frobenius of the descended module over `k`.
    Descended,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobMatrix {
    pub index: usize,
    pub form: BasisForm,
    pub matrix: VMat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BKModule {
    tau: TameType,
    field: &'static FiniteField,
    coeffs: Vec<VMat>,
}

fn u_monomial(field: &'static FiniteField, e: i64) -> USeries {
    USeries::monomial(field.one(), e)
}

impl BKModule {
    /// Validates the length and, for cuspidal types, the linkage
    /// `(a,b,c,d)_{i+f} = (d,c,b,a)_i`.
    pub fn new(tau: TameType, coeffs: Vec<VMat>) -> Result<Self> {
        let n = tau.f_prime() as usize;
        if coeffs.len() != n {
            return Err(Error::InvalidParameter(format!("expected {n} matrices, got {}", coeffs.len())));
        }
        let field = coeffs[0].field();
        if field.characteristic() != tau.p() || coeffs.iter().any(|m| m.field() != field) {
            return Err(Error::InvalidParameter("coefficient field does not match the type".into()));
        }
        if tau.kind() == TypeKind::Cuspidal {
            let f = tau.f() as usize;
            for i in 0..f {
                if !coeffs[i + f].agrees_with(&coeffs[i].conj_swap()) {
                    return Err(Error::DescentMismatch { index: i });
                }
            }
        }
        Ok(BKModule { tau, field, coeffs })
    }

    /// Reads eigenbasis matrices written in `u`; fails on a wrong grading.
    pub fn from_c_matrices(tau: TameType, c: &[UMat]) -> Result<Self> {
        let e = tau.e_prime();
        let mut coeffs = Vec::with_capacity(c.len());
        for (i, m) in c.iter().enumerate() {
            let i = i as i64;
            let a = m.get(0, 0).to_v(e)?;
            let b = m.get(0, 1).shift(-tau.ell_prime(i)).to_v(e)?;
            let cc = m.get(1, 0).shift(-tau.ell(i)).to_v(e)?;
            let d = m.get(1, 1).to_v(e)?;
            coeffs.push(VMat::new(a, b, cc, d));
        }
        Self::new(tau, coeffs)
    }

    pub fn tau(&self) -> &TameType {
        &self.tau
    }

    pub fn field(&self) -> &'static FiniteField {
        self.field
    }

    pub fn coeffs(&self) -> &[VMat] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn precision(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|m| m.precision()).min()
    }

    pub fn frob_matrices(&self) -> Vec<FrobMatrix> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(index, m)| FrobMatrix { index, form: BasisForm::Eigenbasis, matrix: m.clone() })
            .collect()
    }

    /// `C_i` in the variable `u`.
    pub fn c_matrix(&self, i: usize) -> UMat {
        let m = &self.coeffs[i];
        let e = self.tau.e_prime();
        let t = &self.tau;
        UMat::new(
            m.get(0, 0).to_u(e),
            m.get(0, 1).to_u(e).shift(t.ell_prime(i as i64)),
            m.get(1, 0).to_u(e).shift(t.ell(i as i64)),
            m.get(1, 1).to_u(e),
        )
    }

    /// `A_i = ((a, b), (v c, d))`, computed by conjugating `C_i`.
    pub fn a_matrix(&self, i: usize) -> Result<VMat> {
        remove_descent_data(&self.tau, i, &self.c_matrix(i))
    }

    pub fn a_matrices(&self) -> Result<Vec<FrobMatrix>> {
        (0..self.len())
            .map(|i| Ok(FrobMatrix { index: i, form: BasisForm::DescentRemoved, matrix: self.a_matrix(i)? }))
            .collect()
    }
}

/// `Ad(diag(u^-l'_i, 1))(C_i)`, read in `v`.
pub fn remove_descent_data(tau: &TameType, i: usize, c: &UMat) -> Result<VMat> {
    let field = c.field();
    let l = tau.ell_prime(i as i64);
    let conj = UMat::diag(u_monomial(field, -l), USeries::one(field));
    let back = UMat::diag(u_monomial(field, l), USeries::one(field));
    conj.mul(c).mul(&back).to_v(tau.e_prime())
}

/// Inverse of [`remove_descent_data`].
pub fn restore_descent_data(tau: &TameType, i: usize, a: &VMat) -> UMat {
    let field = a.field();
    let l = tau.ell_prime(i as i64);
    let conj = UMat::diag(u_monomial(field, l), USeries::one(field));
    let back = UMat::diag(u_monomial(field, -l), USeries::one(field));
    conj.mul(&a.to_u(tau.e_prime())).mul(&back)
}

fn divisible_by_v(x: &VSeries) -> Result<bool> {
    match (x.valuation(), x.precision()) {
        (Some(v), _) => Ok(v >= 1),
        (None, Some(n)) if n < 1 => Err(Error::Precision("entry unknown at degree 0".into())),
        (None, _) => Ok(true),
    }
}

/// `v`-adic valuation of `det C_i` for each `i`; a determinant that vanishes
/// to the known precision reports that precision.
pub fn determinant_valuations(m: &BKModule) -> Result<Vec<i64>> {
    (0..m.len())
        .map(|i| {
            let det = m.coeffs[i].get(0, 0).mul(m.coeffs[i].get(1, 1)).sub(
                &m.coeffs[i].get(0, 1).mul(m.coeffs[i].get(1, 0)).shift(1),
            );
            match (det.valuation(), det.precision()) {
                (Some(v), _) => Ok(v),
                (None, Some(n)) if n <= 1 => Err(Error::Precision(format!("determinant at {i} unknown below v^2"))),
                (None, Some(n)) => Ok(n),
                (None, None) => Ok(i64::MAX),
            }
        })
        .collect()
}

/// Every `det C_i` is `v` (that is, `u^e'`) times a unit.
pub fn strong_det_check(m: &BKModule) -> Result<bool> {
    Ok(determinant_valuations(m)?.iter().all(|&v| v == 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    IEta,
    IEtaPrime,
    II,
}

impl Shape {
    pub fn as_str(&self) -> &'static str {
        match self {
            Shape::IEta => "I_eta",
            Shape::IEtaPrime => "I_eta'",
            Shape::II => "II",
        }
    }

    fn swapped(&self) -> Shape {
        match self {
            Shape::IEta => Shape::IEtaPrime,
            Shape::IEtaPrime => Shape::IEta,
            Shape::II => Shape::II,
        }
    }

    /// Whether the shape is allowed at `i` for a profile with `i in J` given by `member`.
    pub fn allows(&self, member: bool) -> bool {
        match self {
            Shape::II => true,
            Shape::IEta => member,
            Shape::IEtaPrime => !member,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Divisibility pattern of the diagonal, without the determinant hypothesis;
/// `None` where neither entry is divisible by `v`.
pub fn raw_shapes(m: &BKModule) -> Result<Vec<Option<Shape>>> {
    m.coeffs
        .iter()
        .map(|c| {
            let a = divisible_by_v(c.get(0, 0))?;
            let d = divisible_by_v(c.get(1, 1))?;
            Ok(match (a, d) {
                (true, true) => Some(Shape::II),
                (true, false) => Some(Shape::IEta),
                (false, true) => Some(Shape::IEtaPrime),
                (false, false) => None,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeReport {
    pub shapes: Vec<Shape>,
    pub profiles: Vec<Profile>,
}

pub fn classify_shape(m: &BKModule) -> Result<ShapeReport> {
    let vals = determinant_valuations(m)?;
    if let Some(index) = vals.iter().position(|&v| v != 1) {
        return Err(Error::StrongDetFailed { index });
    }
    let raw = raw_shapes(m)?;
    let mut shapes = Vec::with_capacity(raw.len());
    for (index, s) in raw.into_iter().enumerate() {
        shapes.push(s.ok_or(Error::NoShape { index })?);
    }
    let tau = m.tau();
    if tau.kind() == TypeKind::Cuspidal {
        let f = tau.f() as usize;
        for i in 0..f {
            if shapes[i + f] != shapes[i].swapped() {
                return Err(Error::DescentMismatch { index: i });
            }
        }
    }
    let profiles = enumerate_profiles(tau)
        .into_iter()
        .filter(|j| shapes.iter().enumerate().all(|(i, s)| s.allows(j.contains(i as i64))))
        .collect();
    Ok(ShapeReport { shapes, profiles })
}

/// The matrices `B'_i` with `A_i = B'_i diag(v,1)` for `i in J` and
/// `A_i = diag(1,v) B'_i` otherwise, when all of them are units.
pub fn component_normal_form(m: &BKModule, j: &Profile) -> Result<Vec<VMat>> {
    let mut out = Vec::with_capacity(m.len());
    for (i, c) in m.coeffs.iter().enumerate() {
        let (a, b, cc, d) = (c.get(0, 0), c.get(0, 1), c.get(1, 0), c.get(1, 1));
        let bp = if j.contains(i as i64) {
            if !divisible_by_v(a)? {
                return Err(Error::NotInComponent);
            }
            VMat::new(a.shift(-1), b.clone(), cc.clone(), d.clone())
        } else {
            if !divisible_by_v(d)? {
                return Err(Error::NotInComponent);
            }
            VMat::new(a.clone(), b.clone(), cc.clone(), d.shift(-1))
        };
        if !bp.is_unit()? {
            return Err(Error::NotInComponent);
        }
        out.push(bp);
    }
    Ok(out)
}

/// Replaces the eigenbasis by `beta_i U_i`, where `U_i` has coefficient
/// quadruple `(x, y, z, w)`, i.e. `U_i = ((x, u^l' y), (u^l z, w))`.
pub fn change_eigenbasis(m: &BKModule, u: &[VMat]) -> Result<BKModule> {
    let tau = m.tau().clone();
    let units = BKModule::new(tau.clone(), u.to_vec())?;
    for (index, x) in u.iter().enumerate() {
        let c = x.constant_terms();
        if (c[0][0] * c[1][1]).is_zero() {
            return Err(Error::NotUnit { index });
        }
    }
    let n = m.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let ui = units.c_matrix(i);
        let prev = units.c_matrix((i + n - 1) % n);
        out.push(ui.inv()?.mul(&m.c_matrix(i)).mul(&prev.frobenius()));
    }
    BKModule::from_c_matrices(tau, &out)
}

/// The same change of basis computed on the descent-removed matrices:
/// `A'_i = U~_i^-1 A_i Ad(diag(v^(p-1-gamma_i), 1))(phi(U~_{i-1}))` with
/// `U~ = ((x, y), (v z, w))`.
pub fn change_eigenbasis_a_form(m: &BKModule, u: &[VMat]) -> Result<Vec<VMat>> {
    let tau = m.tau();
    let field = m.field();
    let n = m.len();
    let p = tau.p() as i64;
    let tilde = |x: &VMat| VMat::new(x.get(0, 0).clone(), x.get(0, 1).clone(), x.get(1, 0).shift(1), x.get(1, 1).clone());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let g = p - 1 - tau.gamma(i as i64);
        let left = VMat::diag(VSeries::monomial(field.one(), g), VSeries::one(field));
        let right = VMat::diag(VSeries::monomial(field.one(), -g), VSeries::one(field));
        let prev = tilde(&u[(i + n - 1) % n]).frobenius();
        let a = m.a_matrix(i)?;
        out.push(tilde(&u[i]).inv()?.mul(&a).mul(&left.mul(&prev).mul(&right)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tame::TypeKind;

    fn setup() -> (TameType, &'static FiniteField) {
        (
            TameType::from_gamma(3, TypeKind::PrincipalSeries, &[1, 2], 0).unwrap(),
            FiniteField::get(3, 1).unwrap(),
        )
    }

    fn mono(k: &'static FiniteField, e: Option<i64>) -> VSeries {
        match e {
            Some(e) => VSeries::monomial(k.one(), e),
            None => VSeries::exact_zero(k),
        }
    }

    fn module(tau: &TameType, k: &'static FiniteField, a: Option<i64>, d: Option<i64>) -> BKModule {
        let m = VMat::new(mono(k, a), mono(k, None), mono(k, None), mono(k, d));
        BKModule::new(tau.clone(), vec![m.clone(), m]).unwrap()
    }

    #[test]
    fn strong_det_examples() {
        let (tau, k) = setup();
        assert!(strong_det_check(&module(&tau, k, Some(1), Some(0))).unwrap());
        assert!(!strong_det_check(&module(&tau, k, Some(0), Some(0))).unwrap());
        assert!(!strong_det_check(&module(&tau, k, Some(1), Some(1))).unwrap());
    }

    #[test]
    fn shape_examples() {
        let (tau, k) = setup();
        let rep = classify_shape(&module(&tau, k, Some(1), Some(0))).unwrap();
        assert_eq!(rep.shapes, vec![Shape::IEta, Shape::IEta]);
        assert_eq!(rep.profiles.len(), 1);
        assert_eq!(rep.profiles[0].members(), vec![0, 1]);
        let m = module(&tau, k, Some(0), Some(0));
        assert_eq!(raw_shapes(&m).unwrap(), vec![None, None]);
        // a = v, d = v with b = c = 1 has det v^2 - v and shape II.
        let ii = VMat::new(mono(k, Some(1)), mono(k, Some(0)), mono(k, Some(0)), mono(k, Some(1)));
        let m = BKModule::new(tau.clone(), vec![ii.clone(), ii]).unwrap();
        let rep = classify_shape(&m).unwrap();
        assert_eq!(rep.shapes, vec![Shape::II, Shape::II]);
        assert_eq!(rep.profiles.len(), 4);
    }

    #[test]
    fn descent_data_removal() {
        let (tau, k) = setup();
        let c = VMat::new(mono(k, Some(1)), mono(k, Some(2)), mono(k, Some(3)), mono(k, Some(0)));
        let m = BKModule::new(tau.clone(), vec![c.clone(), c]).unwrap();
        let a = m.a_matrix(0).unwrap();
        assert_eq!(a, VMat::new(mono(k, Some(1)), mono(k, Some(2)), mono(k, Some(4)), mono(k, Some(0))));
        assert_eq!(restore_descent_data(&tau, 0, &a), m.c_matrix(0));
    }

    #[test]
    fn cuspidal_linkage_enforced() {
        let tau = TameType::from_gamma(3, TypeKind::Cuspidal, &[1], 0).unwrap();
        let k = FiniteField::get(3, 1).unwrap();
        let c = VMat::new(mono(k, Some(1)), mono(k, None), mono(k, None), mono(k, Some(0)));
        assert!(BKModule::new(tau.clone(), vec![c.clone(), c.clone()]).is_err());
        assert!(BKModule::new(tau, vec![c.clone(), c.conj_swap()]).is_ok());
    }
}
