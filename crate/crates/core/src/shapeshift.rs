//! Circular intervals in `Z/f` and the profiles reachable by shape-shifting.

use std::fmt;

use crate::error::Result;
use crate::tame::{profile_data, Profile, TameType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
    pub f: usize,
}

impl Interval {
    pub fn is_full(&self) -> bool {
        self.len == self.f
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.len).map(|k| (self.start + k) % self.f).collect()
    }

    /// The element just before the interval, absent for all of `Z/f`.
    pub fn m(&self) -> Option<usize> {
        (!self.is_full()).then(|| (self.start + self.f - 1) % self.f)
    }

    /// `I u (I - 1)`.
    pub fn extended(&self) -> Interval {
        if self.is_full() {
            *self
        } else {
            Interval { start: (self.start + self.f - 1) % self.f, len: self.len + 1, f: self.f }
        }
    }

    pub fn bits(&self) -> u64 {
        self.members().iter().map(|&i| 1u64 << i).sum()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

/// Maximal circular intervals of `S` (given as bits over `Z/f`), ordered by
/// starting point.
pub fn interval_decomposition(s: u64, f: usize) -> Vec<Interval> {
    let has = |i: usize| s >> (i % f) & 1 == 1;
    if s == 0 {
        return Vec::new();
    }
    if (0..f).all(has) {
        return vec![Interval { start: 0, len: f, f }];
    }
    let mut out = Vec::new();
    for start in 0..f {
        if has(start) && !has(start + f - 1) {
            let mut len = 0;
            while has(start + len) {
                len += 1;
            }
            out.push(Interval { start, len, f });
        }
    }
    out
}

pub fn bits_of(members: &[usize]) -> u64 {
    members.iter().map(|&i| 1u64 << i).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeShift {
    pub intervals: Vec<Interval>,
    /// `I'` for each interval.
    pub primed: Vec<Interval>,
    /// `S^tau(J)'` as bits over `Z/f`.
    pub primed_set: u64,
    /// Targets `J'` together with `J xor J'` restricted to `Z/f`.
    pub targets: Vec<(Profile, u64)>,
}

pub fn shapeshift(tau: &TameType, j: &Profile) -> Result<ShapeShift> {
    let f = tau.f() as usize;
    let data = profile_data(tau, j)?;
    let s = bits_of(&data.bad_set);
    let intervals = interval_decomposition(s, f);
    let primed: Vec<Interval> = intervals
        .iter()
        .map(|iv| match iv.m() {
            Some(m) if j.is_transition(m as i64) => iv.extended(),
            _ => *iv,
        })
        .collect();
    let primed_set: u64 = primed.iter().map(|iv| iv.bits()).fold(0, |a, b| a | b);
    let full = intervals.len() == 1 && intervals[0].is_full();
    let forbidden: Vec<u64> = if full { Vec::new() } else { intervals.iter().map(|iv| iv.extended().bits()).collect() };
    let mut targets = Vec::new();
    // Enumerate subsets of primed_set in increasing order.
    let mut d: u64 = 0;
    loop {
        if forbidden.iter().all(|&e| d & e != e) {
            targets.push((j.flip(d), d));
        }
        if d == primed_set {
            break;
        }
        d = (d.wrapping_sub(primed_set)) & primed_set;
    }
    Ok(ShapeShift { intervals, primed, primed_set, targets })
}

pub fn shapeshift_targets(tau: &TameType, j: &Profile) -> Result<Vec<Profile>> {
    Ok(shapeshift(tau, j)?.targets.into_iter().map(|(p, _)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tame::TypeKind;

    #[test]
    fn decomposition_example() {
        let iv = interval_decomposition(bits_of(&[0, 1, 3]), 6);
        assert_eq!(iv.len(), 2);
        assert_eq!(iv[0].members(), vec![0, 1]);
        assert_eq!(iv[1].members(), vec![3]);
        assert_eq!(iv[0].extended().members(), vec![5, 0, 1]);
        assert_eq!(iv[0].m(), Some(5));
    }

    #[test]
    fn wraparound_and_full() {
        let iv = interval_decomposition(bits_of(&[0, 4]), 5);
        assert_eq!(iv, vec![Interval { start: 4, len: 2, f: 5 }]);
        let full = interval_decomposition(bits_of(&[0, 1, 2]), 3);
        assert!(full[0].is_full());
        assert_eq!(full[0].extended(), full[0]);
        assert_eq!(interval_decomposition(bits_of(&[2]), 4)[0].m(), Some(1));
    }

    #[test]
    fn regular_profiles_only_target_themselves() {
        let tau = TameType::from_gamma(5, TypeKind::PrincipalSeries, &[2, 3], 0).unwrap();
        let j = Profile::for_type(&tau, &[0]).unwrap();
        assert_eq!(shapeshift_targets(&tau, &j).unwrap(), vec![j]);
    }

    #[test]
    fn single_bad_index_with_transition() {
        // gamma = (1,0,1), J = {1,2}: s_1 = -1, and (2, 0) is a transition.
        let tau = TameType::from_gamma(3, TypeKind::PrincipalSeries, &[1, 0, 1], 0).unwrap();
        let j = Profile::for_type(&tau, &[1, 2]).unwrap();
        let sh = shapeshift(&tau, &j).unwrap();
        assert_eq!(sh.intervals.len(), 1);
        assert_eq!(sh.intervals[0].members(), vec![1]);
        assert_eq!(sh.primed[0].members(), vec![0, 1]);
        let flips: Vec<u64> = sh.targets.iter().map(|t| t.1).collect();
        assert_eq!(flips, vec![0, 1, 2]);
    }
}
