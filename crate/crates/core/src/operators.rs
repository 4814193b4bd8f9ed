//! The weight operators `theta_j`, `mu_j`, `nu_j` on irregular Hodge types,
//! and the non-cyclotomic lemma for irregular ratios.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::char_arith::{check_odd_prime, collapse, CharExp};
use crate::error::{Error, Result};
use crate::hodge::{hodge_equiv, HodgeType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightOperator {
    Theta,
    Mu,
    Nu,
}

impl WeightOperator {
    pub const ALL: [WeightOperator; 3] = [WeightOperator::Theta, WeightOperator::Mu, WeightOperator::Nu];

    pub fn as_str(&self) -> &'static str {
        match self {
            WeightOperator::Theta => "theta",
            WeightOperator::Mu => "mu",
            WeightOperator::Nu => "nu",
        }
    }
}

impl fmt::Display for WeightOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for WeightOperator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(WeightOperator::Theta),
            "mu" => Ok(WeightOperator::Mu),
            "nu" => Ok(WeightOperator::Nu),
            _ => Err(Error::InvalidParameter(format!("unknown operator {s:?}"))),
        }
    }
}

/// Checks the preconditions shared by the combinatorial operator and its
/// basis-level realization.
pub fn check_operator(op: WeightOperator, j: usize, r: &HodgeType, p: u32) -> Result<()> {
    let f = r.f();
    if f < 2 {
        return Err(Error::OperatorNeedsTwoEmbeddings);
    }
    if j >= f {
        return Err(Error::InvalidParameter(format!("index {j} outside Z/{f}")));
    }
    if let Some(index) = (0..f).find(|&i| r.difference(i as i64) > p as i64) {
        return Err(Error::NotPBounded { index });
    }
    if !r.is_irregular_at(j as i64) {
        return Err(Error::NotIrregular { index: j });
    }
    if op == WeightOperator::Theta && r.difference(j as i64 - 1) == p as i64 {
        return Err(Error::ThetaOutOfRange { index: j });
    }
    Ok(())
}

pub fn apply_operator(op: WeightOperator, j: usize, r: &HodgeType, p: u32) -> Result<HodgeType> {
    check_operator(op, j, r, p)?;
    let f = r.f();
    let pi = p as i64;
    let prev = (j + f - 1) % f;
    let next = (j + 1) % f;
    let mut pairs = r.pairs().to_vec();
    match op {
        WeightOperator::Theta => {
            pairs[prev].1 -= 1;
            pairs[j].0 += pi;
        }
        WeightOperator::Mu => {
            pairs[prev].0 -= 1;
            pairs[j].0 += pi;
        }
        WeightOperator::Nu => {
            pairs[j].1 -= 1;
            let (a, b) = pairs[next];
            pairs[next] = (b + pi, a);
        }
    }
    Ok(HodgeType::new(pairs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub op: WeightOperator,
    pub index: usize,
    pub target: HodgeType,
}

/// Operator images of `r` at every irregular index, one per equivalence class.
pub fn predicted_inclusions(r: &HodgeType, p: u32) -> Result<Vec<Inclusion>> {
    check_odd_prime(p)?;
    if !r.is_p_bounded(p) {
        return Err(Error::NotPBounded { index: (0..r.f()).find(|&i| r.difference(i as i64) > p as i64).unwrap() });
    }
    let mut out: Vec<Inclusion> = Vec::new();
    if r.f() < 2 {
        return Ok(out);
    }
    for j in r.irregular_set() {
        for op in WeightOperator::ALL {
            match apply_operator(op, j, r, p) {
                Ok(target) => {
                    if !out.iter().any(|x| hodge_equiv(p, &x.target, &target)) {
                        out.push(Inclusion { op, index: j, target });
                    }
                }
                Err(Error::ThetaOutOfRange { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Canonical forms reachable from `r` by repeatedly applying operators.
pub fn operator_closure(r: &HodgeType, p: u32) -> Result<BTreeSet<HodgeType>> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([r.canonical(p)]);
    while let Some(x) = queue.pop_front() {
        if !seen.insert(x.clone()) {
            continue;
        }
        for inc in predicted_inclusions(&x, p)? {
            let c = inc.target.canonical(p);
            if !seen.contains(&c) {
                queue.push_back(c);
            }
        }
    }
    Ok(seen)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicSearch {
    pub tuples_checked: u64,
    pub counterexamples: Vec<Vec<i64>>,
}

/// Searches `t` in `[-p, p]^f` with some `t_j = 0` for `prod omega_i^(t_i)`
/// equal to the cyclotomic character on inertia.
pub fn cyclotomic_search(p: u32, f: u32) -> Result<CyclotomicSearch> {
    check_odd_prime(p)?;
    if f == 0 {
        return Err(Error::InvalidParameter("f must be positive".into()));
    }
    let cyclotomic = collapse(p, &vec![1; f as usize])?;
    let modulus = cyclotomic.modulus();
    let m: i128 = modulus.to_string().parse().map_err(|_| Error::ExponentOverflow { level: f })?;
    let target: i128 = cyclotomic.residue().to_string().parse().unwrap();
    let weights: Vec<i128> = (0..f).map(|i| (p as i128).pow((f - i) % f)).collect();
    let pi = p as i64;
    let width = (2 * pi + 1) as u64;
    let total = width.pow(f);
    let mut checked = 0u64;
    let mut counterexamples = Vec::new();
    let mut t = vec![0i64; f as usize];
    for code in 0..total {
        let mut c = code;
        for x in t.iter_mut() {
            *x = (c % width) as i64 - pi;
            c /= width;
        }
        if !t.contains(&0) {
            continue;
        }
        checked += 1;
        let v: i128 = t.iter().zip(&weights).map(|(&x, &w)| x as i128 * w).sum();
        if v.rem_euclid(m) == target {
            counterexamples.push(t.clone());
        }
    }
    Ok(CyclotomicSearch { tuples_checked: checked, counterexamples })
}

pub fn irregular_ratio_never_cyclotomic(p: u32, f: u32) -> Result<bool> {
    Ok(cyclotomic_search(p, f)?.counterexamples.is_empty())
}

/// Exponent of the cyclotomic character on inertia at level `f`.
pub fn cyclotomic_exponent(p: u32, f: u32) -> Result<CharExp> {
    collapse(p, &vec![1; f as usize])
}
