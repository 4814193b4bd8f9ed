//! Extensions of the rank-one modules `M(J)_a` by `N(J)_b`, and the subspace
//! of extension classes that split after inverting `u`.
//!
//! Writing a splitting as `m_i -> m_i + g_i n_i`, the condition is
//! `g_i a_i u^r_i = h_i u^delta_i + b_i u^s_i phi(g_{i-1})`. Composing once
//! around `Z/f` gives `g_0 = A + c u^E phi^f(g_0)` with `A` a finite sum of
//! monomials. The map `k -> q k + E` (`q = p^f`) fixes `k* = -E/(q-1)`;
//! coefficients above `k*` are determined, and each chain of exponents
//! below `k*` imposes one linear condition on `h`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FiniteField, Fq};
use crate::linalg::{nullspace, rank, rref};
use crate::matrix::UMat;
use crate::series::USeries;
use crate::shapeshift::{bits_of, interval_decomposition};
use crate::tame::{profile_data, Profile, TameType};

use super::BKModule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionExponents {
    pub c: Vec<i64>,
    pub d: Vec<i64>,
    pub r: Vec<i64>,
    pub s: Vec<i64>,
    pub delta: Vec<i64>,
    pub transition: Vec<bool>,
}

/// The exponent data on `Z/f'`.
pub fn extension_exponents(tau: &TameType, j: &Profile) -> ExtensionExponents {
    let n = tau.f_prime() as usize;
    let e = tau.e_prime();
    let mut x = ExtensionExponents {
        c: Vec::with_capacity(n),
        d: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        s: Vec::with_capacity(n),
        delta: Vec::with_capacity(n),
        transition: Vec::with_capacity(n),
    };
    for i in 0..n as i64 {
        let (c, d) = if j.contains(i) { (tau.k(i), tau.k_prime(i)) } else { (tau.k_prime(i), tau.k(i)) };
        let tr = j.is_transition(i);
        let (r, s, delta) = if tr {
            ((d - c).rem_euclid(e), (c - d).rem_euclid(e), 0)
        } else {
            (e, 0, (c - d).rem_euclid(e))
        };
        x.c.push(c);
        x.d.push(d);
        x.r.push(r);
        x.s.push(s);
        x.delta.push(delta);
        x.transition.push(tr);
    }
    x
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionPoint {
    pub tau: TameType,
    pub profile: Profile,
    pub a: Fq,
    pub b: Fq,
    /// One class parameter per `i < f`; the cuspidal linkage repeats them.
    pub h: Vec<Fq>,
}

/// Data of the composed fixpoint equation `g_0 = A + c u^E phi^f(g_0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Fixpoint {
    q: i64,
    e: i64,
    c: Fq,
    /// Terms of `A`, keyed by exponent.
    terms: BTreeMap<i64, Fq>,
}

impl Fixpoint {
    /// `k* = -E/(q-1)` when it is an integer.
    fn k_star(&self) -> Option<i64> {
        (self.e % (self.q - 1) == 0).then(|| -self.e / (self.q - 1))
    }

    /// Sign of `k - k*` without division.
    fn cmp_star(&self, k: i64) -> std::cmp::Ordering {
        (k as i128 * (self.q as i128 - 1)).cmp(&(-(self.e as i128)))
    }

    /// Chain root of an exponent below `k*`, with its depth.
    fn root(&self, mut k: i64) -> (i64, u32) {
        let mut depth = 0;
        while (k - self.e) % self.q == 0 {
            k = (k - self.e) / self.q;
            depth += 1;
        }
        (k, depth)
    }

    /// Linear conditions for a splitting, one per chain root (and one at
    /// `k*` when `c = 1`).
    fn obstructions(&self) -> BTreeMap<i64, Fq> {
        let one = self.c.field().one();
        let cinv = self.c.inv().expect("c is a unit");
        let mut out: BTreeMap<i64, Fq> = BTreeMap::new();
        for (&k, &x) in &self.terms {
            match self.cmp_star(k) {
                std::cmp::Ordering::Less => {
                    let (root, depth) = self.root(k);
                    *out.entry(root).or_insert(self.c.field().zero()) += x * cinv.pow(depth as u64);
                }
                std::cmp::Ordering::Equal if self.c == one => {
                    *out.entry(k).or_insert(self.c.field().zero()) += x;
                }
                _ => {}
            }
        }
        out
    }

    /// `g_0` on `[lo, hi)`, assuming every obstruction vanishes.
    fn solve(&self, hi: i64) -> USeries {
        let field = self.c.field();
        let one = field.one();
        let mut out: Vec<(i64, Fq)> = Vec::new();
        let lo = self.terms.keys().next().copied().unwrap_or(hi);
        for (&k, &x) in &self.terms {
            match self.cmp_star(k) {
                std::cmp::Ordering::Equal => {
                    if self.c != one {
                        out.push((k, x * (one - self.c).inv().unwrap()));
                    }
                }
                _ => {
                    let mut e = k;
                    let mut w = x;
                    while e >= lo && e < hi {
                        out.push((e, w));
                        e = self.q * e + self.e;
                        w *= self.c;
                    }
                }
            }
        }
        USeries::from_terms(field, out, Some(hi))
    }
}

impl ExtensionPoint {
    pub fn new(tau: TameType, profile: Profile, a: Fq, b: Fq, h: Vec<Fq>) -> Result<Self> {
        if h.len() != tau.f() as usize {
            return Err(Error::InvalidParameter(format!("expected {} class parameters", tau.f())));
        }
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidParameter("twist parameters must be nonzero".into()));
        }
        if a.field() != b.field() || h.iter().any(|x| x.field() != a.field()) {
            return Err(Error::InvalidParameter("parameters live in different fields".into()));
        }
        if a == b && is_exceptional(&tau, &profile)? {
            return Err(Error::ExceptionalTwist);
        }
        Ok(ExtensionPoint { tau, profile, a, b, h })
    }

    pub fn field(&self) -> &'static FiniteField {
        self.a.field()
    }

    pub fn exponents(&self) -> ExtensionExponents {
        extension_exponents(&self.tau, &self.profile)
    }

    fn twist(&self, i: usize) -> (Fq, Fq) {
        let one = self.field().one();
        if i.is_multiple_of(self.tau.f() as usize) {
            (self.a, self.b)
        } else {
            (one, one)
        }
    }

    fn fixpoint(&self) -> Fixpoint {
        let f = self.tau.f() as usize;
        let x = self.exponents();
        let p = self.tau.p() as i64;
        let mut terms: BTreeMap<i64, Fq> = BTreeMap::new();
        let mut coef = self.field().one();
        let mut shift = 0i64;
        let mut pl = 1i64;
        for l in 0..f {
            let i = (f - l) % f;
            let (a, b) = self.twist(i);
            let ainv = a.inv().unwrap();
            let alpha = self.h[i] * ainv;
            if !alpha.is_zero() {
                *terms.entry(shift + pl * (x.delta[i] - x.r[i])).or_insert(self.field().zero()) += coef * alpha;
            }
            coef *= b * ainv;
            shift += pl * (x.s[i] - x.r[i]);
            pl *= p;
        }
        terms.retain(|_, v| !v.is_zero());
        Fixpoint { q: pl, e: shift, c: coef, terms }
    }
}

/// Whether `M(J)[1/u]` and `N(J)[1/u]` become isomorphic for `a = b`: the
/// homogeneous equation has a solution at `k*` in the exponent class of
/// maps `m_0 -> n_0`.
pub fn is_exceptional(tau: &TameType, j: &Profile) -> Result<bool> {
    let k = FiniteField::get(tau.p(), 1)?;
    let h = vec![k.zero(); tau.f() as usize];
    let x = ExtensionPoint { tau: tau.clone(), profile: *j, a: k.one(), b: k.one(), h };
    let fp = x.fixpoint();
    let ex = x.exponents();
    Ok(match fp.k_star() {
        Some(ks) => (ks - (ex.c[0] - ex.d[0])).rem_euclid(tau.e_prime()) == 0,
        None => false,
    })
}

/// Partial Frobenius of the extension in the eigenbasis `(m_i, n_i)` for
/// `i in J`, `(n_i, m_i)` otherwise.
pub fn build_extension(x: &ExtensionPoint) -> Result<BKModule> {
    let tau = &x.tau;
    let n = tau.f_prime() as usize;
    let f = tau.f() as usize;
    let ex = x.exponents();
    let field = x.field();
    let mono = |c: Fq, e: i64| USeries::monomial(c, e);
    let mut cs = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = x.twist(i);
        let m = UMat::new(
            mono(a, ex.r[i]),
            USeries::exact_zero(field),
            mono(x.h[i % f], ex.delta[i]),
            mono(b, ex.s[i]),
        );
        let mut c = m;
        if !x.profile.contains(i as i64) {
            c = c.swap_rows();
        }
        if !x.profile.contains(i as i64 - 1) {
            c = c.swap_cols();
        }
        cs.push(c);
    }
    BKModule::from_c_matrices(tau.clone(), &cs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub split: bool,
    /// `k*` as the pair `(-E, q - 1)`.
    pub fixed_point: (i64, i64),
    /// Lowest exponent a splitting can involve.
    pub valuation_bound: Option<i64>,
    /// Exponent window `[valuation_bound, window)` of the computed `g_0`.
    pub window: i64,
    pub terms: usize,
    /// Nonzero chain conditions when the class does not split.
    pub obstructions: Vec<(i64, Fq)>,
}

/// Decides whether the extension splits over `F'((u))`; a positive answer
/// is confirmed by substituting the section back into the recursion.
pub fn splits_after_inverting_u(x: &ExtensionPoint, precision: i64) -> Result<SplitReport> {
    let fp = x.fixpoint();
    let tau = &x.tau;
    let f = tau.f() as usize;
    let e = tau.e_prime();
    let obstructions: Vec<(i64, Fq)> = fp.obstructions().into_iter().filter(|(_, v)| !v.is_zero()).collect();
    let top = fp.terms.keys().last().copied().unwrap_or(0);
    let window = (precision * e).max(top + 1).max(fp.k_star().unwrap_or(0) + 1);
    let mut report = SplitReport {
        split: obstructions.is_empty(),
        fixed_point: (-fp.e, fp.q - 1),
        valuation_bound: fp.terms.keys().next().copied(),
        window,
        terms: 0,
        obstructions,
    };
    if !report.split {
        return Ok(report);
    }
    let ex = x.exponents();
    let mut g = vec![fp.solve(window)];
    for i in 1..f {
        let (a, b) = x.twist(i);
        let ainv = a.inv().unwrap();
        let next = USeries::monomial(x.h[i] * ainv, ex.delta[i] - ex.r[i])
            .add(&g[i - 1].frobenius().shift(ex.s[i] - ex.r[i]).scale(b * ainv));
        g.push(next);
    }
    report.terms = g[0].terms().len();
    let needed = (0..f).map(|i| ex.delta[i].max(ex.r[i])).max().unwrap_or(0) + 1;
    for i in 0..f {
        let (a, b) = x.twist(i);
        let prev = &g[(i + f - 1) % f];
        let residual = g[i]
            .shift(ex.r[i])
            .scale(a)
            .sub(&USeries::monomial(x.h[i], ex.delta[i]))
            .sub(&prev.frobenius().shift(ex.s[i]).scale(b));
        if !residual.is_zero() {
            return Err(Error::Internal(format!("splitting fails substitution at {i}")));
        }
        if residual.precision().is_some_and(|n| n < needed) {
            return Err(Error::Inconclusive(format!("residual known only below u^{}", residual.precision().unwrap())));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub support: Vec<usize>,
    pub coefficients: Vec<Fq>,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KextReport {
    pub dimension: usize,
    pub expected: usize,
    /// Basis of the splitting classes.
    pub basis: Vec<Vec<Fq>>,
    pub hyperplanes: Vec<Hyperplane>,
}

fn obstruction_matrix(tau: &TameType, j: &Profile, a: Fq, b: Fq) -> Result<Vec<Vec<Fq>>> {
    let f = tau.f() as usize;
    let field = a.field();
    let mut columns: Vec<BTreeMap<i64, Fq>> = Vec::with_capacity(f);
    for i in 0..f {
        let mut h = vec![field.zero(); f];
        h[i] = field.one();
        let x = ExtensionPoint::new(tau.clone(), *j, a, b, h)?;
        columns.push(x.fixpoint().obstructions());
    }
    let mut roots: Vec<i64> = columns.iter().flat_map(|c| c.keys().copied()).collect();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots
        .iter()
        .map(|r| columns.iter().map(|c| c.get(r).copied().unwrap_or(field.zero())).collect())
        .collect())
}

/// Splitting classes as a subspace of `F'^f`, together with the hyperplanes
/// recovered on each extended interval of `S^tau(J)`.
pub fn kext_analysis(tau: &TameType, j: &Profile, a: Fq, b: Fq) -> Result<KextReport> {
    let f = tau.f() as usize;
    let field = a.field();
    let rows = obstruction_matrix(tau, j, a, b)?;
    let basis = nullspace(field, &rows, f);
    let data = profile_data(tau, j)?;
    let expected = data.bad_set.len();
    let mut hyperplanes = Vec::new();
    if expected > 0 && expected < f {
        for iv in interval_decomposition(bits_of(&data.bad_set), f) {
            let support = iv.extended().members();
            let mut sys = rows.clone();
            for i in 0..f {
                if !support.contains(&i) {
                    let mut r = vec![field.zero(); f];
                    r[i] = field.one();
                    sys.push(r);
                }
            }
            let dimension = f - rank(&sys, f);
            let mut restricted: Vec<Vec<Fq>> = rows.iter().map(|r| support.iter().map(|&i| r[i]).collect()).collect();
            let piv = rref(&mut restricted, support.len());
            let coefficients = if piv.len() == 1 { restricted[0].clone() } else { Vec::new() };
            hyperplanes.push(Hyperplane { support, coefficients, dimension });
        }
    }
    Ok(KextReport { dimension: basis.len(), expected, basis, hyperplanes })
}

pub fn kext_dimension(tau: &TameType, j: &Profile, a: Fq, b: Fq) -> Result<usize> {
    Ok(kext_analysis(tau, j, a, b)?.dimension)
}

impl KextReport {
    /// Dimension equals `|S^tau(J)|`, and when `S^tau(J)` is a proper
    /// nonempty subset each hyperplane has codimension one in its support,
    /// all coefficients nonzero, and the hyperplanes span the whole space.
    pub fn consistent(&self) -> bool {
        if self.dimension != self.expected {
            return false;
        }
        if self.hyperplanes.is_empty() {
            return true;
        }
        let total: usize = self.hyperplanes.iter().map(|h| h.dimension).sum();
        total == self.dimension
            && self.hyperplanes.iter().all(|h| {
                h.dimension + 1 == h.support.len()
                    && h.coefficients.len() == h.support.len()
                    && h.coefficients.iter().all(|c| !c.is_zero())
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::{classify_shape, Shape};
    use crate::tame::{enumerate_profiles, TypeKind};

    #[test]
    fn non_transition_exponents() {
        let tau = TameType::from_gamma(3, TypeKind::PrincipalSeries, &[1, 0], 0).unwrap();
        let j = Profile::for_type(&tau, &[0, 1]).unwrap();
        let x = extension_exponents(&tau, &j);
        for i in 0..2 {
            assert_eq!(x.r[i], 8);
            assert_eq!(x.s[i], 0);
            assert_eq!(x.delta[i], (x.c[i] - x.d[i]).rem_euclid(8));
        }
    }

    #[test]
    fn zero_class_splits_and_shapes_follow_transitions() {
        let k = FiniteField::get(3, 1).unwrap();
        for kind in [TypeKind::PrincipalSeries, TypeKind::Cuspidal] {
            for tau in TameType::enumerate(3, 2, kind).unwrap() {
                for j in enumerate_profiles(&tau) {
                    let x = ExtensionPoint::new(tau.clone(), j, k.one(), k.from_int(2), vec![k.zero(); 2]).unwrap();
                    assert!(splits_after_inverting_u(&x, 8).unwrap().split);
                    let m = build_extension(&x).unwrap();
                    let shapes = classify_shape(&m).unwrap().shapes;
                    for (i, s) in shapes.iter().enumerate() {
                        assert_eq!(*s == Shape::II, j.is_transition(i as i64));
                    }
                }
            }
        }
    }

    #[test]
    fn kext_matches_bad_set() {
        let k = FiniteField::get(3, 1).unwrap();
        for kind in [TypeKind::PrincipalSeries, TypeKind::Cuspidal] {
            for tau in TameType::enumerate(3, 2, kind).unwrap() {
                for j in enumerate_profiles(&tau) {
                    let rep = kext_analysis(&tau, &j, k.one(), k.from_int(2)).unwrap();
                    assert!(rep.consistent(), "{tau:?} {j}: {rep:?}");
                }
            }
        }
    }
}
