//! Tame types, profiles, and the recipe producing `s_J`, `t_J`, `Theta_J`
//! and the Serre weights attached to a type.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use crate::char_arith::{check_odd_prime, collapse, factor_through_norm, CharExp};
use crate::error::{Error, Result};

/// Largest `p^(f')` accepted; keeps every derived exponent (and the u-adic
/// exponents of the series engine) comfortably inside `i64`.
pub const MAX_TYPE_MODULUS: i64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeKind {
    PrincipalSeries,
    Cuspidal,
}

impl TypeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TypeKind::PrincipalSeries => "ps",
            TypeKind::Cuspidal => "cuspidal",
        }
    }

    pub fn level(&self, f: u32) -> u32 {
        match self {
            TypeKind::PrincipalSeries => f,
            TypeKind::Cuspidal => 2 * f,
        }
    }
}

impl fmt::Display for TypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TypeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ps" | "principal-series" => Ok(TypeKind::PrincipalSeries),
            "cuspidal" | "cusp" => Ok(TypeKind::Cuspidal),
            _ => Err(Error::InvalidParameter(format!("unknown type kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TameType {
    p: u32,
    f: u32,
    kind: TypeKind,
    eta: CharExp,
    eta_prime: CharExp,
    e_prime: i64,
    k: Vec<i64>,
    k_prime: Vec<i64>,
    ell: Vec<i64>,
    ell_prime: Vec<i64>,
    gamma: Vec<i64>,
    mu: Vec<i64>,
}

fn pow_i64(p: u32, e: u32) -> Option<i64> {
    (p as i64).checked_pow(e)
}

pub fn make_type(p: u32, f: u32, kind: TypeKind, eta: CharExp, eta_prime: CharExp) -> Result<TameType> {
    check_odd_prime(p)?;
    if f == 0 {
        return Err(Error::InvalidParameter("f must be positive".into()));
    }
    let level = kind.level(f);
    for c in [&eta, &eta_prime] {
        if c.prime() != p || c.level() != level {
            return Err(Error::InvalidParameter(format!(
                "character {c:?} is not at level {level} for p = {p}"
            )));
        }
    }
    let q = match pow_i64(p, level) {
        Some(q) if q <= MAX_TYPE_MODULUS => q,
        _ => return Err(Error::ExponentOverflow { level }),
    };
    let e_prime = q - 1;
    if kind == TypeKind::Cuspidal && eta_prime != eta.pow(BigInt::from(p).pow(f)) {
        return Err(Error::NotCuspidalPair);
    }
    let big = eta.residue_i64().unwrap();
    let big_prime = eta_prime.residue_i64().unwrap();
    let n = level as usize;
    let mut k = Vec::with_capacity(n);
    let mut k_prime = Vec::with_capacity(n);
    let mut pi: i128 = 1;
    for _ in 0..n {
        k.push((big as i128 * pi % e_prime as i128) as i64);
        k_prime.push((big_prime as i128 * pi % e_prime as i128) as i64);
        pi = pi * p as i128 % e_prime as i128;
    }
    let ell: Vec<i64> = (0..n).map(|i| (k[i] - k_prime[i]).rem_euclid(e_prime)).collect();
    let ell_prime: Vec<i64> = (0..n).map(|i| (k_prime[i] - k[i]).rem_euclid(e_prime)).collect();
    if let Some(index) = ell.iter().position(|&l| l == 0) {
        return Err(Error::ScalarType { index });
    }
    let gamma = eta.mul(&eta_prime.inverse()).digits();
    let mu = eta_prime.digits();
    let tau = TameType { p, f, kind, eta, eta_prime, e_prime, k, k_prime, ell, ell_prime, gamma, mu };
    let bad = tau.invariant_violations();
    if !bad.is_empty() {
        return Err(Error::Internal(bad.join("; ")));
    }
    Ok(tau)
}

impl TameType {
    /// The type whose `gamma` restricted to `Z/f` is `gamma`; `twist` adds a
    /// common character (a multiple of `1 + p^f` on `eta` in the cuspidal case).
    pub fn from_gamma(p: u32, kind: TypeKind, gamma: &[i64], twist: i64) -> Result<TameType> {
        check_odd_prime(p)?;
        let f = gamma.len() as u32;
        if f == 0 {
            return Err(Error::InvalidParameter("gamma must be nonempty".into()));
        }
        if let Some(g) = gamma.iter().find(|&&g| !(0..p as i64).contains(&g)) {
            return Err(Error::InvalidParameter(format!("gamma entry {g} outside [0, p-1]")));
        }
        let level = kind.level(f);
        if pow_i64(p, level).is_none_or(|q| q > MAX_TYPE_MODULUS) {
            return Err(Error::ExponentOverflow { level });
        }
        match kind {
            TypeKind::PrincipalSeries => {
                let e = collapse(p, gamma)?;
                let eta_prime = CharExp::new(p, f, twist)?;
                make_type(p, f, kind, e.mul(&eta_prime), eta_prime)
            }
            TypeKind::Cuspidal => {
                let full: Vec<i64> = gamma.iter().copied().chain(gamma.iter().map(|g| p as i64 - 1 - g)).collect();
                let e = collapse(p, &full)?.residue_i64().unwrap();
                let pf = pow_i64(p, f).unwrap();
                if e % (pf - 1) != 0 {
                    return Err(Error::Internal(format!("cuspidal gamma residue {e} not divisible by p^f-1")));
                }
                let base = (-(e / (pf - 1))).rem_euclid(pf + 1);
                let eta = CharExp::new(p, level, BigInt::from(base) + BigInt::from(twist) * (pf + 1))?;
                let eta_prime = eta.pow(pf);
                make_type(p, f, kind, eta, eta_prime)
            }
        }
    }

    /// Every non-scalar type at `(p, f, kind)`, ordered by `(eta, eta')`.
    pub fn enumerate(p: u32, f: u32, kind: TypeKind) -> Result<Vec<TameType>> {
        check_odd_prime(p)?;
        let level = kind.level(f);
        let q = pow_i64(p, level).filter(|&q| q <= MAX_TYPE_MODULUS).ok_or(Error::ExponentOverflow { level })?;
        let pf = pow_i64(p, f).unwrap();
        let mut out = Vec::new();
        for big in 0..q - 1 {
            match kind {
                TypeKind::PrincipalSeries => {
                    for big_prime in 0..q - 1 {
                        if big != big_prime {
                            out.push(make_type(
                                p,
                                f,
                                kind,
                                CharExp::new(p, level, big)?,
                                CharExp::new(p, level, big_prime)?,
                            )?);
                        }
                    }
                }
                TypeKind::Cuspidal => {
                    let eta = CharExp::new(p, level, big)?;
                    let eta_prime = eta.pow(pf);
                    if eta != eta_prime {
                        out.push(make_type(p, f, kind, eta, eta_prime)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Violated structural identities, empty when the type is consistent.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let p = self.p as i64;
        let n = self.f_prime() as i64;
        for i in 0..n {
            if self.ell(i) + self.ell_prime(i) != self.e_prime {
                out.push(format!("ell_{i} + ell'_{i} != e'"));
            }
            let lhs = p * self.ell_prime(i - 1) - self.ell_prime(i);
            if lhs != self.e_prime * (p - 1 - self.gamma(i)) {
                out.push(format!("useful-k identity fails at {i}"));
            }
            if p * self.k_prime(i - 1) - self.k_prime(i) != self.e_prime * self.mu(i) {
                out.push(format!("mu_{i} does not match k'"));
            }
            if !(0..p).contains(&self.gamma(i)) {
                out.push(format!("gamma_{i} out of range"));
            }
        }
        if self.kind == TypeKind::Cuspidal {
            for i in 0..self.f as i64 {
                if self.gamma(i) + self.gamma(i + self.f as i64) != p - 1 {
                    out.push(format!("gamma_{i} + gamma_{{i+f}} != p-1"));
                }
            }
        }
        out
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn f_prime(&self) -> u32 {
        self.kind.level(self.f)
    }

    pub fn kind(&self) -> TypeKind {
        self.kind
    }

    pub fn eta(&self) -> &CharExp {
        &self.eta
    }

    pub fn eta_prime(&self) -> &CharExp {
        &self.eta_prime
    }

    /// `p^(f') - 1`.
    pub fn e_prime(&self) -> i64 {
        self.e_prime
    }

    pub fn idx(&self, i: i64) -> usize {
        i.rem_euclid(self.f_prime() as i64) as usize
    }

    pub fn k(&self, i: i64) -> i64 {
        self.k[self.idx(i)]
    }

    pub fn k_prime(&self, i: i64) -> i64 {
        self.k_prime[self.idx(i)]
    }

    pub fn ell(&self, i: i64) -> i64 {
        self.ell[self.idx(i)]
    }

    pub fn ell_prime(&self, i: i64) -> i64 {
        self.ell_prime[self.idx(i)]
    }

    pub fn gamma(&self, i: i64) -> i64 {
        self.gamma[self.idx(i)]
    }

    /// Digits of `eta'` in collapse order: `p k'_{i-1} - k'_i = e' mu_i`.
    pub fn mu(&self, i: i64) -> i64 {
        self.mu[self.idx(i)]
    }

    pub fn gammas(&self) -> &[i64] {
        &self.gamma
    }

    /// Twist both characters by the same character at level `f'`.
    pub fn twisted(&self, by: &CharExp) -> Result<TameType> {
        make_type(self.p, self.f, self.kind, self.eta.mul(by), self.eta_prime.mul(by))
    }
}

impl fmt::Display for TameType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(p={}, f={}, eta={}, eta'={})", self.kind, self.p, self.f, self.eta, self.eta_prime)
    }
}

/// A subset of `Z/f'` stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    kind: TypeKind,
    f: u32,
    bits: u64,
}

impl Profile {
    pub fn from_bits(kind: TypeKind, f: u32, bits: u64) -> Result<Profile> {
        let n = kind.level(f);
        if n > 62 || bits >> n != 0 {
            return Err(Error::BadProfile(format!("{bits:#b}")));
        }
        let prof = Profile { kind, f, bits };
        if kind == TypeKind::Cuspidal {
            for i in 0..f as i64 {
                if prof.contains(i) == prof.contains(i + f as i64) {
                    return Err(Error::BadProfile(prof.to_string()));
                }
            }
        }
        Ok(prof)
    }

    pub fn from_members(kind: TypeKind, f: u32, members: &[usize]) -> Result<Profile> {
        let n = kind.level(f) as usize;
        let mut bits = 0u64;
        for &m in members {
            if m >= n {
                return Err(Error::BadProfile(format!("member {m} outside Z/{n}")));
            }
            bits |= 1 << m;
        }
        Self::from_bits(kind, f, bits)
    }

    /// The profile whose intersection with `{0, .., f-1}` is `low`; in the
    /// cuspidal case the upper half is forced by the pairing rule.
    pub fn lift(kind: TypeKind, f: u32, low: u64) -> Result<Profile> {
        let mask = (1u64 << f) - 1;
        if low & !mask != 0 {
            return Err(Error::BadProfile(format!("{low:#b}")));
        }
        match kind {
            TypeKind::PrincipalSeries => Self::from_bits(kind, f, low),
            TypeKind::Cuspidal => Self::from_bits(kind, f, low | ((!low & mask) << f)),
        }
    }

    pub fn for_type(tau: &TameType, members: &[usize]) -> Result<Profile> {
        Self::from_members(tau.kind(), tau.f(), members)
    }

    pub fn kind(&self) -> TypeKind {
        self.kind
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// The restriction to `{0, .., f-1}`, which determines the profile.
    pub fn low_bits(&self) -> u64 {
        self.bits & ((1u64 << self.f) - 1)
    }

    pub fn modulus(&self) -> i64 {
        self.kind.level(self.f) as i64
    }

    pub fn contains(&self, i: i64) -> bool {
        let j = i.rem_euclid(self.modulus());
        self.bits >> j & 1 == 1
    }

    /// `(i-1, i)` is a transition when exactly one of them lies in `J`.
    pub fn is_transition(&self, i: i64) -> bool {
        self.contains(i - 1) != self.contains(i)
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.modulus() as usize).filter(|&i| self.bits >> i & 1 == 1).collect()
    }

    /// `J xor lift(D)` for `D` a subset of `Z/f` (given as bits).
    pub fn flip(&self, low: u64) -> Profile {
        let bits = match self.kind {
            TypeKind::PrincipalSeries => self.bits ^ low,
            TypeKind::Cuspidal => self.bits ^ low ^ (low << self.f),
        };
        Profile { bits, ..*self }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(self.members()))
    }
}

pub(crate) fn join<T: fmt::Display>(it: impl IntoIterator<Item = T>) -> String {
    it.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn enumerate_profiles(tau: &TameType) -> Vec<Profile> {
    (0..1u64 << tau.f())
        .map(|low| Profile::lift(tau.kind(), tau.f(), low).expect("lift of a valid mask"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileData {
    /// `s_{J,i}` on `Z/f'`.
    pub s: Vec<i64>,
    /// `t_{J,i}` on `Z/f'`.
    pub t: Vec<i64>,
    /// Digits of `Theta_J` in collapse order, length `f`.
    pub theta: Vec<i64>,
    pub theta_char: CharExp,
    /// `nu_i` on `Z/f'`.
    pub nu: Vec<i64>,
    /// Indices in `Z/f` with `s_{J,i} = -1`.
    pub bad_set: Vec<usize>,
    pub in_p_tau: bool,
}

fn delta(b: bool) -> i64 {
    b as i64
}

/// `s_{J,i}` and `t_{J,i}` at a single index.
pub fn recipe_at(tau: &TameType, j: &Profile, i: i64) -> (i64, i64) {
    let p = tau.p() as i64;
    let g = tau.gamma(i);
    if j.contains(i - 1) {
        let d = delta(!j.contains(i));
        (p - 1 - g - d, g + d)
    } else {
        (g - delta(j.contains(i)), 0)
    }
}

pub fn check_profile(tau: &TameType, j: &Profile) -> Result<()> {
    if j.kind() != tau.kind() || j.f() != tau.f() {
        return Err(Error::BadProfile(format!("{j} does not belong to {tau}")));
    }
    Ok(())
}

pub fn profile_data(tau: &TameType, j: &Profile) -> Result<ProfileData> {
    check_profile(tau, j)?;
    let f = tau.f() as usize;
    let n = tau.f_prime() as usize;
    let (s, t): (Vec<i64>, Vec<i64>) = (0..n as i64).map(|i| recipe_at(tau, j, i)).unzip();
    let theta_char = theta_character(tau, &t)?;
    let theta = theta_char.digits();
    let nu = solve_nu(tau, &theta, &t)?;
    let bad_set: Vec<usize> = (0..f).filter(|&i| s[i] == -1).collect();
    let in_p_tau = bad_set.is_empty();
    Ok(ProfileData { s, t, theta, theta_char, nu, bad_set, in_p_tau })
}

/// `Theta_J` at level `f`, from `Theta_J o N = eta' prod kappa'_i^(t_i)`.
pub fn theta_character(tau: &TameType, t: &[i64]) -> Result<CharExp> {
    let p = tau.p();
    let level = tau.f_prime();
    let on_norm = tau.eta_prime().mul(&collapse(p, t)?);
    match tau.kind() {
        TypeKind::PrincipalSeries => Ok(on_norm),
        TypeKind::Cuspidal => factor_through_norm(&on_norm)?
            .ok_or_else(|| Error::NormDescentFailed { residue: format!("{on_norm} at level {level}") }),
    }
}

/// Solves `theta_i = mu_i + t_i + nu_i - p nu_{i-1}` on `Z/f'`, with `theta`
/// extended `f`-periodically.
pub fn solve_nu(tau: &TameType, theta: &[i64], t: &[i64]) -> Result<Vec<i64>> {
    let n = tau.f_prime() as usize;
    let f = tau.f() as usize;
    let p = tau.p() as i128;
    let d: Vec<i128> = (0..n).map(|i| (theta[i % f] - tau.mu(i as i64) - t[i]) as i128).collect();
    let e = tau.e_prime() as i128;
    let mut nu = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc: i128 = 0;
        let mut pk: i128 = 1;
        for k in 0..n {
            acc += pk * d[(i + n - k) % n];
            pk *= p;
        }
        if acc % e != 0 {
            return Err(Error::Internal(format!("nu_{i} is not integral")));
        }
        nu.push((-acc / e) as i64);
    }
    for i in 0..n {
        let lhs = theta[i % f] as i128;
        let rhs = tau.mu(i as i64) as i128 + t[i] as i128 + nu[i] as i128 - p * nu[(i + n - 1) % n] as i128;
        if lhs != rhs {
            return Err(Error::Internal(format!("nu equation fails at {i}")));
        }
    }
    Ok(nu)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SerreWeight {
    pub t: Vec<i64>,
    pub s: Vec<i64>,
}

impl SerreWeight {
    pub fn is_steinberg(&self, p: u32) -> bool {
        self.s.iter().all(|&x| x == p as i64 - 1)
    }

    /// Hodge type `{-s_j - t_j, 1 - t_j}` of the crystalline lifts attached
    /// to the weight.
    pub fn hodge_pairs(&self) -> Vec<(i64, i64)> {
        self.s.iter().zip(&self.t).map(|(&s, &t)| (1 - t, -s - t)).collect()
    }
}

impl fmt::Display for SerreWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t=({}) s=({})", join(&self.t), join(&self.s))
    }
}

pub fn serre_weight(tau: &TameType, j: &Profile) -> Result<SerreWeight> {
    let data = profile_data(tau, j)?;
    weight_from_data(tau, &data)
}

pub fn weight_from_data(tau: &TameType, data: &ProfileData) -> Result<SerreWeight> {
    if !data.in_p_tau {
        return Err(Error::NotInPTau { indices: data.bad_set.clone() });
    }
    let f = tau.f() as usize;
    let t = data.theta.clone();
    if t.iter().all(|&x| x == tau.p() as i64 - 1) {
        return Err(Error::Internal("theta digits are all p-1".into()));
    }
    Ok(SerreWeight { t, s: data.s[..f].to_vec() })
}

pub fn jordan_holder_set(tau: &TameType) -> Result<BTreeSet<SerreWeight>> {
    let mut out = BTreeSet::new();
    for j in enumerate_profiles(tau) {
        let data = profile_data(tau, &j)?;
        if data.in_p_tau {
            out.insert(weight_from_data(tau, &data)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cuspidal_example_gamma() {
        let eta = CharExp::new(5, 2, 7).unwrap();
        let eta_prime = eta.pow(5);
        let tau = make_type(5, 1, TypeKind::Cuspidal, eta, eta_prime).unwrap();
        assert_eq!(tau.gammas(), &[0, 4]);
    }

    #[test]
    fn scalar_types_rejected() {
        let eta = CharExp::new(3, 2, 5).unwrap();
        assert!(matches!(
            make_type(3, 2, TypeKind::PrincipalSeries, eta.clone(), eta),
            Err(Error::ScalarType { .. })
        ));
    }

    #[test]
    fn gamma_roundtrip() {
        let tau = TameType::from_gamma(5, TypeKind::PrincipalSeries, &[2, 3], 0).unwrap();
        assert_eq!(tau.gammas(), &[2, 3]);
        let tau = TameType::from_gamma(5, TypeKind::Cuspidal, &[2, 3], 4).unwrap();
        assert_eq!(tau.gammas(), &[2, 3, 2, 1]);
    }

    #[test]
    fn non_cuspidal_pair_rejected() {
        let eta = CharExp::new(3, 2, 1).unwrap();
        let other = CharExp::new(3, 2, 2).unwrap();
        assert_eq!(make_type(3, 1, TypeKind::Cuspidal, eta, other), Err(Error::NotCuspidalPair));
    }

    #[test]
    fn profile_counts() {
        let ps = TameType::from_gamma(3, TypeKind::PrincipalSeries, &[1, 1], 0).unwrap();
        let members: Vec<Vec<usize>> = enumerate_profiles(&ps).iter().map(|j| j.members()).collect();
        assert_eq!(members, vec![vec![], vec![0], vec![1], vec![0, 1]]);
        let c1 = TameType::from_gamma(3, TypeKind::Cuspidal, &[1], 0).unwrap();
        let members: Vec<Vec<usize>> = enumerate_profiles(&c1).iter().map(|j| j.members()).collect();
        assert_eq!(members, vec![vec![1], vec![0]]);
        assert!(Profile::from_members(TypeKind::Cuspidal, 2, &[0, 2]).is_err());
    }

    #[test]
    fn recipe_examples() {
        let tau = TameType::from_gamma(5, TypeKind::PrincipalSeries, &[2, 3], 0).unwrap();
        let d = profile_data(&tau, &Profile::for_type(&tau, &[0]).unwrap()).unwrap();
        assert_eq!((d.s.clone(), d.t.clone(), d.theta.clone()), (vec![1, 0], vec![0, 4], vec![0, 4]));

        let tau = TameType::from_gamma(3, TypeKind::Cuspidal, &[1], 0).unwrap();
        let d = profile_data(&tau, &Profile::for_type(&tau, &[0]).unwrap()).unwrap();
        assert_eq!((d.s, d.t), (vec![0, 0], vec![0, 2]));

        let tau = TameType::from_gamma(3, TypeKind::PrincipalSeries, &[1, 1], 0).unwrap();
        let d = profile_data(&tau, &Profile::for_type(&tau, &[0, 1]).unwrap()).unwrap();
        assert_eq!((d.s, d.t), (vec![1, 1], vec![1, 1]));
    }

    #[test]
    fn serre_weight_examples() {
        let tau = TameType::from_gamma(5, TypeKind::PrincipalSeries, &[2], 0).unwrap();
        let empty = Profile::for_type(&tau, &[]).unwrap();
        let full = Profile::for_type(&tau, &[0]).unwrap();
        assert_eq!(serre_weight(&tau, &empty).unwrap(), SerreWeight { t: vec![0], s: vec![2] });
        assert_eq!(serre_weight(&tau, &full).unwrap(), SerreWeight { t: vec![2], s: vec![2] });
        assert_eq!(jordan_holder_set(&tau).unwrap().len(), 2);
    }

    #[test]
    fn fake_weights_rejected() {
        // gamma = (0, 1): J = {0} has s_0 = gamma_0 - 1 = -1.
        let tau = TameType::from_gamma(3, TypeKind::PrincipalSeries, &[0, 1], 0).unwrap();
        let j = Profile::for_type(&tau, &[0]).unwrap();
        assert!(matches!(serre_weight(&tau, &j), Err(Error::NotInPTau { .. })));
    }
}
