//! The changes of basis realizing `theta_j`, `mu_j` and `nu_j` on families
//! `F_i = B_i diag(v^x_i, v^y_i)` of partial Frobenius matrices over `k`.

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::hodge::HodgeType;
use crate::matrix::VMat;
use crate::operators::{apply_operator, check_operator, WeightOperator};
use crate::series::VSeries;

use super::descend::Descended;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeFamily {
    pub units: Vec<VMat>,
    /// Diagonal exponents in the order they multiply `B_i`.
    pub exponents: Vec<(i64, i64)>,
}

fn v_diag(field: &'static FiniteField, x: i64, y: i64) -> VMat {
    VMat::diag(VSeries::monomial(field.one(), x), VSeries::monomial(field.one(), y))
}

impl HodgeFamily {
    pub fn new(units: Vec<VMat>, exponents: Vec<(i64, i64)>) -> Result<Self> {
        if units.len() != exponents.len() || units.is_empty() {
            return Err(Error::InvalidParameter("family needs one unit per exponent pair".into()));
        }
        for (index, b) in units.iter().enumerate() {
            if !b.is_unit()? {
                return Err(Error::NotUnit { index });
            }
        }
        Ok(HodgeFamily { units, exponents })
    }

    pub fn from_descended(d: &Descended) -> Result<Self> {
        let exps = d.s.iter().zip(&d.theta).map(|(&s, &t)| (1 - t, -s - t)).collect();
        Self::new(d.units.clone(), exps)
    }

    pub fn field(&self) -> &'static FiniteField {
        self.units[0].field()
    }

    pub fn hodge_type(&self) -> HodgeType {
        HodgeType::new(self.exponents.iter().copied())
    }

    pub fn matrices(&self) -> Vec<VMat> {
        let k = self.field();
        self.units.iter().zip(&self.exponents).map(|(b, &(x, y))| b.mul(&v_diag(k, x, y))).collect()
    }

    /// Factors arbitrary matrices against the given exponent pairs, trying
    /// both orders of each pair.
    pub fn factor(matrices: &[VMat], pairs: &[(i64, i64)]) -> Result<Self> {
        let k = matrices[0].field();
        let mut units = Vec::with_capacity(matrices.len());
        let mut exponents = Vec::with_capacity(matrices.len());
        for (index, (m, &(x, y))) in matrices.iter().zip(pairs).enumerate() {
            let mut found = false;
            for (a, b) in [(x, y), (y, x)] {
                let u = m.mul(&v_diag(k, -a, -b));
                if u.is_unit()? {
                    units.push(u);
                    exponents.push((a, b));
                    found = true;
                    break;
                }
                if x == y {
                    break;
                }
            }
            if !found {
                return Err(Error::NotUnit { index });
            }
        }
        Ok(HodgeFamily { units, exponents })
    }
}

/// Matrices after replacing the basis at `i` by `basis_i Q_i`:
/// `F'_i = Q_i^-1 F_i phi(Q_{i-1})`.
pub fn change_basis(matrices: &[VMat], q: &[VMat]) -> Result<Vec<VMat>> {
    let n = matrices.len();
    (0..n)
        .map(|i| Ok(q[i].inv()?.mul(&matrices[i]).mul(&q[(i + n - 1) % n].frobenius())))
        .collect()
}

/// Reorders every pair so the larger exponent comes first, swapping the
/// previous basis vectors where needed.
pub fn sort_diagonals(fam: &HodgeFamily) -> Result<HodgeFamily> {
    let n = fam.units.len();
    let k = fam.field();
    let mut q = vec![VMat::identity(k); n];
    for i in 0..n {
        let (x, y) = fam.exponents[i];
        if x < y {
            q[(i + n - 1) % n] = VMat::swap(k);
        }
    }
    let m = change_basis(&fam.matrices(), &q)?;
    let pairs: Vec<(i64, i64)> = fam.exponents.iter().map(|&(x, y)| (x.max(y), x.min(y))).collect();
    let mut out = HodgeFamily::factor(&m, &pairs)?;
    // Factor may pick either order when both work; insist on the sorted one.
    for i in 0..n {
        if out.exponents[i] != pairs[i] {
            return Err(Error::Internal(format!("sorting the diagonal at {i} failed")));
        }
    }
    out.exponents = pairs;
    Ok(out)
}

/// The basis change of the operator at `j`, as the matrices `Q_i`.
pub fn operator_basis_change(op: WeightOperator, j: usize, fam: &HodgeFamily) -> Result<Vec<VMat>> {
    let n = fam.units.len();
    let k = fam.field();
    let prev = (j + n - 1) % n;
    let mut q = vec![VMat::identity(k); n];
    match op {
        WeightOperator::Theta => q[prev] = fam.units[prev].mul(&v_diag(k, 0, 1)),
        WeightOperator::Mu => q[prev] = fam.units[prev].mul(&v_diag(k, 1, 0)),
        WeightOperator::Nu => {
            q[prev] = fam.units[j].inv()?;
            q[j] = v_diag(k, 0, 1);
        }
    }
    Ok(q)
}

/// Applies the operator to a family whose exponents form a `p`-bounded
/// Hodge type irregular at `j`; the result is factored against
/// `apply_operator(op, j, r)`.
pub fn apply_weight_operator_basis(op: WeightOperator, j: usize, fam: &HodgeFamily, p: u32) -> Result<HodgeFamily> {
    let r = fam.hodge_type();
    check_operator(op, j, &r, p)?;
    let sorted = sort_diagonals(fam)?;
    let q = operator_basis_change(op, j, &sorted)?;
    let m = change_basis(&sorted.matrices(), &q)?;
    let target = apply_operator(op, j, &r, p)?;
    let out = HodgeFamily::factor(&m, target.pairs())?;
    if out.hodge_type() != target {
        return Err(Error::Internal("operator image has the wrong exponents".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_family(k: &'static FiniteField, pairs: &[(i64, i64)]) -> HodgeFamily {
        HodgeFamily::new(vec![VMat::identity(k); pairs.len()], pairs.to_vec()).unwrap()
    }

    #[test]
    fn nu_on_identity_family() {
        let k = FiniteField::get(5, 1).unwrap();
        let fam = identity_family(k, &[(3, 3), (4, 2)]);
        let out = apply_weight_operator_basis(WeightOperator::Nu, 0, &fam, 5).unwrap();
        assert_eq!(out.hodge_type(), HodgeType::new([(3, 2), (7, 4)]));
    }

    #[test]
    fn theta_touches_two_indices() {
        let k = FiniteField::get(3, 1).unwrap();
        let fam = identity_family(k, &[(2, 2), (1, 0), (3, 1)]);
        let sorted = sort_diagonals(&fam).unwrap();
        let q = operator_basis_change(WeightOperator::Theta, 0, &sorted).unwrap();
        let before = sorted.matrices();
        let after = change_basis(&before, &q).unwrap();
        assert_eq!(after[1], before[1]);
        assert_ne!(after[2], before[2]);
        assert_ne!(after[0], before[0]);
        let out = apply_weight_operator_basis(WeightOperator::Theta, 0, &fam, 3).unwrap();
        assert_eq!(out.hodge_type(), HodgeType::new([(5, 2), (1, 0), (3, 0)]));
    }
}
