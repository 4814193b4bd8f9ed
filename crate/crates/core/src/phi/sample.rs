//! Random series, unit matrices and modules for property checks.

use rand::Rng;

use crate::error::Result;
use crate::field::{FiniteField, Fq};
use crate::matrix::VMat;
use crate::series::VSeries;
use crate::tame::{Profile, TameType, TypeKind};

use super::BKModule;

pub fn random_element<R: Rng + ?Sized>(field: &'static FiniteField, rng: &mut R) -> Fq {
    field.element(rng.gen_range(0..field.size()))
}

pub fn random_unit_element<R: Rng + ?Sized>(field: &'static FiniteField, rng: &mut R) -> Fq {
    field.element(rng.gen_range(1..field.size()))
}

/// `sum_{k < prec} c_k v^k` with random coefficients.
pub fn random_series<R: Rng + ?Sized>(field: &'static FiniteField, prec: i64, rng: &mut R) -> VSeries {
    let coeffs: Vec<Fq> = (0..prec).map(|_| random_element(field, rng)).collect();
    VSeries::from_dense(field, 0, &coeffs, Some(prec))
}

pub fn random_unit_series<R: Rng + ?Sized>(field: &'static FiniteField, prec: i64, rng: &mut R) -> VSeries {
    let mut coeffs: Vec<Fq> = (0..prec).map(|_| random_element(field, rng)).collect();
    coeffs[0] = random_unit_element(field, rng);
    VSeries::from_dense(field, 0, &coeffs, Some(prec))
}

/// A random element of `GL_2(F'[[v]])`.
pub fn random_unit_matrix<R: Rng + ?Sized>(field: &'static FiniteField, prec: i64, rng: &mut R) -> VMat {
    loop {
        let m = VMat::new(
            random_series(field, prec, rng),
            random_series(field, prec, rng),
            random_series(field, prec, rng),
            random_series(field, prec, rng),
        );
        let c = m.constant_terms();
        if !(c[0][0] * c[1][1] - c[0][1] * c[1][0]).is_zero() {
            return m;
        }
    }
}

/// Coefficient quadruples of a random eigenbasis change: `x`, `w` units.
pub fn random_eigenbasis_change<R: Rng + ?Sized>(tau: &TameType, field: &'static FiniteField, prec: i64, rng: &mut R) -> Vec<VMat> {
    let f = tau.f() as usize;
    let mut out: Vec<VMat> = (0..f)
        .map(|_| {
            VMat::new(
                random_unit_series(field, prec, rng),
                random_series(field, prec, rng),
                random_series(field, prec, rng),
                random_unit_series(field, prec, rng),
            )
        })
        .collect();
    if tau.kind() == TypeKind::Cuspidal {
        for i in 0..f {
            let m = out[i].conj_swap();
            out.push(m);
        }
    }
    out
}

/// Coefficients for `A_i = diag(1, v^[i not in J]) B'_i diag(v^[i in J], 1)`.
pub fn coefficients_in_component(b: &VMat, member: bool) -> VMat {
    if member {
        VMat::new(b.get(0, 0).shift(1), b.get(0, 1).clone(), b.get(1, 0).clone(), b.get(1, 1).clone())
    } else {
        VMat::new(b.get(0, 0).clone(), b.get(0, 1).clone(), b.get(1, 0).clone(), b.get(1, 1).shift(1))
    }
}

/// A module in `C^tau(J)` built from the given units `B'_i`, `i < f`.
pub fn module_from_units(tau: &TameType, j: &Profile, units: &[VMat]) -> Result<BKModule> {
    let f = tau.f() as usize;
    let mut coeffs: Vec<VMat> = (0..f).map(|i| coefficients_in_component(&units[i], j.contains(i as i64))).collect();
    if tau.kind() == TypeKind::Cuspidal {
        for i in 0..f {
            let m = coeffs[i].conj_swap();
            coeffs.push(m);
        }
    }
    BKModule::new(tau.clone(), coeffs)
}

pub fn random_module_in_component<R: Rng + ?Sized>(
    tau: &TameType,
    j: &Profile,
    field: &'static FiniteField,
    prec: i64,
    rng: &mut R,
) -> Result<BKModule> {
    let units: Vec<VMat> = (0..tau.f()).map(|_| random_unit_matrix(field, prec, rng)).collect();
    module_from_units(tau, j, &units)
}

/// Series `v^k * unit` with `k` in `0..=2`, or zero.
fn random_entry<R: Rng + ?Sized>(field: &'static FiniteField, prec: i64, rng: &mut R) -> VSeries {
    match rng.gen_range(0..5) {
        0 => VSeries::zero(field, Some(prec)),
        k => random_unit_series(field, prec, rng).shift((k as i64 - 1).min(2)).truncate(prec),
    }
}

/// Unconstrained coefficient quadruples; about half the samples satisfy the
/// determinant condition.
pub fn random_module<R: Rng + ?Sized>(tau: &TameType, field: &'static FiniteField, prec: i64, rng: &mut R) -> Result<BKModule> {
    let f = tau.f() as usize;
    let mut coeffs: Vec<VMat> = (0..f)
        .map(|_| {
            VMat::new(
                random_entry(field, prec, rng),
                random_entry(field, prec, rng),
                random_entry(field, prec, rng),
                random_entry(field, prec, rng),
            )
        })
        .collect();
    if tau.kind() == TypeKind::Cuspidal {
        for i in 0..f {
            let m = coeffs[i].conj_swap();
            coeffs.push(m);
        }
    }
    BKModule::new(tau.clone(), coeffs)
}
