//! Hodge types, their equivalence under the lattice of trivial-reduction
//! shifts, the type `r(tau, J)`, and the inverse construction producing a
//! type and profile for a given Hodge type.

use std::collections::BTreeMap;
use std::fmt;

use crate::char_arith::{check_odd_prime, collapse, lambda_membership, ExponentTuple};
use crate::error::{Error, Result};
use crate::tame::{profile_data, Profile, ProfileData, TameType, TypeKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HodgeType {
    pairs: Vec<(i64, i64)>,
}

impl HodgeType {
    /// Each pair is sorted so that the first weight is the larger one.
    pub fn new(pairs: impl IntoIterator<Item = (i64, i64)>) -> Self {
        HodgeType {
            pairs: pairs.into_iter().map(|(a, b)| if a >= b { (a, b) } else { (b, a) }).collect(),
        }
    }

    /// `r_{i,2} = 0` and `r_{i,1} = d_i`.
    pub fn from_differences(d: &[i64]) -> Self {
        Self::new(d.iter().map(|&x| (x, 0)))
    }

    pub fn f(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    pub fn pair(&self, i: i64) -> (i64, i64) {
        self.pairs[i.rem_euclid(self.f() as i64) as usize]
    }

    pub fn difference(&self, i: i64) -> i64 {
        let (a, b) = self.pair(i);
        a - b
    }

    pub fn differences(&self) -> Vec<i64> {
        self.pairs.iter().map(|(a, b)| a - b).collect()
    }

    pub fn is_p_bounded(&self, p: u32) -> bool {
        self.pairs.iter().all(|(a, b)| a - b <= p as i64)
    }

    pub fn is_steinberg(&self, p: u32) -> bool {
        self.pairs.iter().all(|(a, b)| a - b == p as i64)
    }

    pub fn is_regular(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a > b)
    }

    pub fn is_irregular_at(&self, j: i64) -> bool {
        self.difference(j) == 0
    }

    pub fn irregular_set(&self) -> Vec<usize> {
        (0..self.f()).filter(|&i| self.pairs[i].0 == self.pairs[i].1).collect()
    }

    pub fn translate(&self, lambda: &[i64]) -> HodgeType {
        assert_eq!(lambda.len(), self.f());
        HodgeType::new(self.pairs.iter().zip(lambda).map(|(&(a, b), &l)| (a + l, b + l)))
    }

    /// Representative with `r_{i,2} = 0` for `i > 0` and `r_{0,2}` the least
    /// nonnegative residue of the collapsed second weights.
    pub fn canonical(&self, p: u32) -> HodgeType {
        let second: Vec<i64> = self.pairs.iter().map(|x| x.1).collect();
        let shift = collapse(p, &second).expect("valid prime").residue_i64().expect("small level");
        HodgeType::new(
            self.pairs
                .iter()
                .enumerate()
                .map(|(i, (a, b))| if i == 0 { (a - b + shift, shift) } else { (a - b, 0) }),
        )
    }
}

impl fmt::Display for HodgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl std::str::FromStr for HodgeType {
    type Err = Error;

    /// Accepts `"a,b;c,d"` or `"(a,b),(c,d)"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse Hodge type {s:?}"));
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let nums: Vec<i64> = cleaned
            .split([',', ';', '(', ')'])
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<i64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if nums.is_empty() || !nums.len().is_multiple_of(2) {
            return Err(bad());
        }
        Ok(HodgeType::new(nums.chunks(2).map(|c| (c[0], c[1]))))
    }
}

/// `r(tau, J)_i = (1 - theta_i, -s_i - theta_i)` with the digit representative
/// of `theta`.
pub fn hodge_type_of(tau: &TameType, j: &Profile) -> Result<HodgeType> {
    Ok(hodge_from_data(tau, &profile_data(tau, j)?))
}

pub fn hodge_from_data(tau: &TameType, data: &ProfileData) -> HodgeType {
    let f = tau.f() as usize;
    HodgeType::new((0..f).map(|i| (1 - data.theta[i], -data.s[i] - data.theta[i])))
}

pub fn hodge_equiv(p: u32, r: &HodgeType, r2: &HodgeType) -> bool {
    if r.f() != r2.f() {
        return false;
    }
    let mut lambda = Vec::with_capacity(r.f());
    for (&(a, b), &(c, d)) in r.pairs().iter().zip(r2.pairs()) {
        if c - a != d - b {
            return false;
        }
        lambda.push(c - a);
    }
    lambda_membership(&ExponentTuple::new(p, lambda)).expect("valid prime")
}

/// Preferences for `(i-1, i)` being a transition, by index in `Z/f`.
pub type TransitionConstraint = BTreeMap<usize, bool>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistenceWitness {
    pub tau: TameType,
    pub profile: Profile,
    /// Transition pattern on `Z/f` that was realized.
    pub transitions: Vec<bool>,
}

pub fn find_type_profile(r: &HodgeType, p: u32, constraint: &TransitionConstraint) -> Result<(TameType, Profile)> {
    let w = find_type_profile_witness(r, p, constraint)?;
    Ok((w.tau, w.profile))
}

pub fn find_type_profile_witness(r: &HodgeType, p: u32, constraint: &TransitionConstraint) -> Result<ExistenceWitness> {
    check_odd_prime(p)?;
    let f = r.f();
    if f == 0 {
        return Err(Error::InvalidParameter("empty Hodge type".into()));
    }
    if let Some(&j) = constraint.keys().find(|&&j| j >= f) {
        return Err(Error::InvalidParameter(format!("constraint index {j} outside Z/{f}")));
    }
    let pi = p as i64;
    let s: Vec<i64> = r.differences().iter().map(|d| d - 1).collect();
    if let Some(index) = s.iter().position(|&x| x > pi - 1 || x < -1) {
        return Err(Error::NotPBounded { index });
    }
    if r.is_steinberg(p) {
        return Err(Error::Steinberg);
    }
    let mut trans = vec![false; f];
    let mut free = vec![false; f];
    for i in 0..f {
        let wanted = constraint.get(&i).copied();
        if s[i] == -1 {
            if wanted == Some(false) {
                return Err(Error::ForcedTransition { index: i });
            }
            trans[i] = true;
        } else if s[i] == pi - 1 {
            if wanted == Some(true) {
                return Err(Error::ForcedNonTransition { index: i });
            }
        } else {
            free[i] = true;
            trans[i] = wanted.unwrap_or(false);
        }
    }
    let mut walk = walk_transitions(&s, &trans, p);
    if walk.is_scalar_ps(p) {
        let flippable = (0..f).find(|&i| free[i] && !constraint.contains_key(&i));
        match flippable {
            Some(i) => {
                trans[i] = !trans[i];
                walk = walk_transitions(&s, &trans, p);
            }
            None => {
                let constrained: Vec<usize> = (0..f).filter(|&i| free[i]).collect();
                return Err(match constrained.as_slice() {
                    [i] if !trans[*i] => Error::ForcedTransition { index: *i },
                    [i] => Error::ForcedNonTransition { index: *i },
                    _ => Error::Unsatisfiable,
                });
            }
        }
    }
    if walk.is_scalar_ps(p) {
        return Err(Error::Internal("scalar type after parity fix".into()));
    }
    let (tau, profile) = realize(r, p, &s, &walk)?;
    Ok(ExistenceWitness { tau, profile, transitions: trans })
}

struct Walk {
    /// Membership of `0..f` in `J`, starting from `-1` not in `J`.
    member: Vec<bool>,
    gamma: Vec<i64>,
    cuspidal: bool,
}

impl Walk {
    fn is_scalar_ps(&self, p: u32) -> bool {
        !self.cuspidal
            && (self.gamma.iter().all(|&g| g == 0) || self.gamma.iter().all(|&g| g == p as i64 - 1))
    }
}

fn walk_transitions(s: &[i64], trans: &[bool], p: u32) -> Walk {
    let pi = p as i64;
    let f = s.len();
    let mut member = Vec::with_capacity(f);
    let mut gamma = Vec::with_capacity(f);
    let mut prev = false;
    for i in 0..f {
        let cur = prev ^ trans[i];
        let g = if prev {
            pi - 1 - s[i] - (!cur) as i64
        } else {
            s[i] + cur as i64
        };
        member.push(cur);
        gamma.push(g);
        prev = cur;
    }
    // The walk started with -1 (= f-1, or 2f-1) outside J.
    let cuspidal = member[f - 1];
    Walk { member, gamma, cuspidal }
}

fn realize(r: &HodgeType, p: u32, s: &[i64], walk: &Walk) -> Result<(TameType, Profile)> {
    let f = s.len() as u32;
    let kind = if walk.cuspidal { TypeKind::Cuspidal } else { TypeKind::PrincipalSeries };
    let low: u64 = walk.member.iter().enumerate().map(|(i, &m)| (m as u64) << i).sum();
    let profile = Profile::lift(kind, f, low)?;
    let base = TameType::from_gamma(p, kind, &walk.gamma, 0)?;
    let data = profile_data(&base, &profile)?;
    if data.s[..f as usize] != *s {
        return Err(Error::Internal(format!("recipe gives s = {:?}, wanted {:?}", data.s, s)));
    }
    let first: Vec<i64> = r.pairs().iter().map(|x| 1 - x.0).collect();
    let target = collapse(p, &first)?;
    let shift = target.mul(&data.theta_char.inverse()).residue_i64().unwrap();
    let tau = TameType::from_gamma(p, kind, &walk.gamma, shift)?;
    let got = hodge_type_of(&tau, &profile)?;
    if !hodge_equiv(p, r, &got) {
        return Err(Error::Internal(format!("constructed type has Hodge type {got}, wanted {r}")));
    }
    Ok((tau, profile))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_hodge_example() {
        let tau = TameType::from_gamma(5, TypeKind::PrincipalSeries, &[2, 3], 0).unwrap();
        let j = Profile::for_type(&tau, &[0]).unwrap();
        let r = hodge_type_of(&tau, &j).unwrap();
        assert_eq!(r, HodgeType::new([(1, -1), (-3, -4)]));
        assert_eq!(r.canonical(5), HodgeType::new([(5, 3), (1, 0)]));
        assert!(hodge_equiv(5, &r, &r.canonical(5)));
    }

    #[test]
    fn equivalence_examples() {
        let r = HodgeType::new([(2, 0), (1, 1)]);
        assert!(hodge_equiv(3, &r, &r));
        assert!(hodge_equiv(3, &r, &r.translate(&[8, 0])));
        assert!(!hodge_equiv(3, &r, &r.translate(&[1, 0])));
        assert!(!hodge_equiv(3, &r, &HodgeType::new([(3, 0), (1, 1)])));
    }

    #[test]
    fn parse_forms() {
        let a: HodgeType = "1,0;3,3".parse().unwrap();
        let b: HodgeType = "(1,0),(3,3)".parse().unwrap();
        assert_eq!(a, b);
        assert!("1,2,3".parse::<HodgeType>().is_err());
    }

    #[test]
    fn remark_exception_one() {
        let r = HodgeType::from_differences(&[1]);
        let c = TransitionConstraint::from([(0, false)]);
        assert_eq!(find_type_profile(&r, 5, &c), Err(Error::ForcedTransition { index: 0 }));
        assert!(find_type_profile(&r, 5, &TransitionConstraint::new()).is_ok());
    }

    #[test]
    fn remark_exception_two() {
        let p = 5;
        let r = HodgeType::from_differences(&[4, 0, 5]);
        let c = TransitionConstraint::from([(0, true)]);
        assert_eq!(find_type_profile(&r, p, &c), Err(Error::ForcedNonTransition { index: 0 }));
    }

    #[test]
    fn roundtrip_example() {
        let r = HodgeType::new([(1, -1), (-3, -4)]);
        let (tau, j) = find_type_profile(&r, 5, &TransitionConstraint::new()).unwrap();
        assert!(hodge_equiv(5, &r, &hodge_type_of(&tau, &j).unwrap()));
    }

    #[test]
    fn steinberg_and_unbounded_rejected() {
        let c = TransitionConstraint::new();
        assert_eq!(find_type_profile(&HodgeType::from_differences(&[3, 3]), 3, &c), Err(Error::Steinberg));
        assert!(matches!(
            find_type_profile(&HodgeType::from_differences(&[4, 1]), 3, &c),
            Err(Error::NotPBounded { index: 0 })
        ));
    }
}
