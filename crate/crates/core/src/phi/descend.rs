//! Passage from a module in `C^tau(J)` to the partial Frobenius matrices of
//! its Galois invariants, and back.

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::matrix::{UMat, VMat};
use crate::series::{USeries, VSeries};
use crate::tame::{profile_data, Profile, ProfileData, TameType, TypeKind};

use super::{component_normal_form, BKModule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descended {
    pub profile: Profile,
    /// `s_{J,i}` for `i < f`.
    pub s: Vec<i64>,
    /// `theta_{J,i}` for `i < f`.
    pub theta: Vec<i64>,
    /// Partial Frobenius matrices on the invariants, `i < f`.
    pub matrices: Vec<VMat>,
    /// The unit factors `B_i`.
    pub units: Vec<VMat>,
    /// `xi_i` for `i < f` in the cuspidal case, empty otherwise.
    pub xi: Vec<i64>,
}

fn d(b: bool) -> i64 {
    b as i64
}

/// `diag(u^l'_i, v^[i not in J]) u^-k'_i v^(nu_i - 1)`.
fn frame(tau: &TameType, j: &Profile, nu: &[i64], i: usize, field: &'static FiniteField) -> UMat {
    let mono = |e: i64| USeries::monomial(field.one(), e);
    let e = tau.e_prime();
    let ii = i as i64;
    let common = -tau.k_prime(ii) + e * (nu[i] - 1);
    UMat::diag(mono(tau.ell_prime(ii) + common), mono(e * d(!j.contains(ii)) + common))
}

fn frames(tau: &TameType, j: &Profile, nu: &[i64], field: &'static FiniteField) -> Vec<UMat> {
    (0..tau.f_prime() as usize).map(|i| frame(tau, j, nu, i, field)).collect()
}

fn swap_if(m: &VMat, left: bool, right: bool) -> VMat {
    let mut out = m.clone();
    if left {
        out = out.swap_rows();
    }
    if right {
        out = out.swap_cols();
    }
    out
}

fn v_diag(field: &'static FiniteField, x: i64, y: i64) -> VMat {
    VMat::diag(VSeries::monomial(field.one(), x), VSeries::monomial(field.one(), y))
}

/// `xi_i = (l'_i + k_i - k'_i)/e' + nu_i - nu_{i+f} - [i in J]`.
pub fn xi_values(tau: &TameType, j: &Profile, data: &ProfileData) -> Result<Vec<i64>> {
    let f = tau.f() as usize;
    let n = tau.f_prime() as usize;
    let e = tau.e_prime();
    (0..f)
        .map(|i| {
            let ii = i as i64;
            let num = tau.ell_prime(ii) + tau.k(ii) - tau.k_prime(ii);
            if num % e != 0 {
                return Err(Error::Internal(format!("xi_{i} is not integral")));
            }
            Ok(num / e + data.nu[i] - data.nu[(i + f) % n] - d(j.contains(ii)))
        })
        .collect()
}

/// The matrices `X_i` of the module in the basis `(m_i, n_i)`.
fn invariant_basis_matrices(m: &BKModule, j: &Profile, data: &ProfileData) -> Result<Vec<VMat>> {
    let tau = m.tau();
    let n = m.len();
    let fr = frames(tau, j, &data.nu, m.field());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = fr[i].inv()?.mul(&m.c_matrix(i)).mul(&fr[(i + n - 1) % n].frobenius());
        out.push(x.to_v(tau.e_prime()).map_err(|e| Error::Internal(format!("invariant basis at {i}: {e}")))?);
    }
    Ok(out)
}

pub fn descend_to_k(m: &BKModule, j: &Profile) -> Result<Descended> {
    let tau = m.tau();
    let field = m.field();
    let data = profile_data(tau, j)?;
    let bprime = component_normal_form(m, j)?;
    let x = invariant_basis_matrices(m, j, &data)?;
    let p = tau.p() as i64;
    let n = m.len();
    let f = tau.f() as usize;
    for i in 0..n {
        let ii = i as i64;
        let t = data.t[i];
        let th = data.theta[i % f];
        let expect = bprime[i].mul(&v_diag(
            field,
            d(j.contains(ii)) - tau.gamma(ii) + t - th,
            p * d(!j.contains(ii - 1)) - (p - 1) + t - th,
        ));
        if !x[i].agrees_with(&expect) {
            return Err(Error::Internal(format!("invariant-basis matrix at {i} differs from the predicted form")));
        }
    }
    let mut xi = Vec::new();
    if tau.kind() == TypeKind::Cuspidal {
        for i in 0..f {
            if !x[i + f].agrees_with(&x[i].conj_swap()) {
                return Err(Error::DescentMismatch { index: i });
            }
        }
        xi = xi_values(tau, j, &data)?;
        if let Some(index) = xi.iter().position(|&v| v != 0) {
            return Err(Error::NonzeroXi { index, value: xi[index] });
        }
    }
    let mut matrices = Vec::with_capacity(f);
    let mut units = Vec::with_capacity(f);
    for i in 0..f {
        let ii = i as i64;
        let fi = swap_if(&x[i], !j.contains(ii), !j.contains(ii - 1));
        let b = fi.mul(&v_diag(field, -1 + data.theta[i], data.s[i] + data.theta[i]));
        if !b.is_unit()? {
            return Err(Error::NotUnit { index: i });
        }
        matrices.push(fi);
        units.push(b);
    }
    Ok(Descended {
        profile: *j,
        s: data.s[..f].to_vec(),
        theta: data.theta.clone(),
        matrices,
        units,
        xi,
    })
}

/// Rebuilds the module from the units `B_i` by reversing every step of
/// [`descend_to_k`].
pub fn ascend(tau: &TameType, j: &Profile, units: &[VMat]) -> Result<BKModule> {
    let data = profile_data(tau, j)?;
    let f = tau.f() as usize;
    let n = tau.f_prime() as usize;
    if units.len() != f {
        return Err(Error::InvalidParameter(format!("expected {f} unit matrices")));
    }
    let field = units[0].field();
    let mut x: Vec<VMat> = (0..f)
        .map(|i| {
            let ii = i as i64;
            let fi = units[i].mul(&v_diag(field, 1 - data.theta[i], -data.s[i] - data.theta[i]));
            swap_if(&fi, !j.contains(ii), !j.contains(ii - 1))
        })
        .collect();
    if tau.kind() == TypeKind::Cuspidal {
        for i in 0..f {
            let m = x[i].conj_swap();
            x.push(m);
        }
    }
    let fr = frames(tau, j, &data.nu, field);
    let c: Vec<UMat> = (0..n)
        .map(|i| Ok(fr[i].mul(&x[i].to_u(tau.e_prime())).mul(&fr[(i + n - 1) % n].frobenius().inv()?)))
        .collect::<Result<_>>()?;
    BKModule::from_c_matrices(tau.clone(), &c)
}

/// Inverse transpose of each partial Frobenius matrix.
pub fn dual_module(matrices: &[VMat]) -> Result<Vec<VMat>> {
    matrices.iter().map(|m| Ok(m.inv()?.transpose())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::sample::random_module_in_component;
    use crate::tame::enumerate_profiles;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn descend_all_profiles_small() {
        let k = FiniteField::get(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [TypeKind::PrincipalSeries, TypeKind::Cuspidal] {
            for tau in TameType::enumerate(3, 2, kind).unwrap() {
                for j in enumerate_profiles(&tau) {
                    let m = random_module_in_component(&tau, &j, k, 16, &mut rng).unwrap();
                    let out = descend_to_k(&m, &j).unwrap();
                    let back = ascend(&tau, &j, &out.units).unwrap();
                    for i in 0..m.len() {
                        assert!(back.coeffs()[i].agrees_with(&m.coeffs()[i]));
                    }
                }
            }
        }
    }

    #[test]
    fn dual_of_diagonal() {
        let k = FiniteField::get(3, 1).unwrap();
        let m = v_diag(k, 1, 0);
        assert_eq!(dual_module(&[m]).unwrap(), vec![v_diag(k, -1, 0)]);
    }
}
