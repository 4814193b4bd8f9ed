//! Property checks binding the combinatorics to the module engine. Every
//! check is deterministic given the seed.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use tameshape_core::field::{FiniteField, Fq};
use tameshape_core::hodge::{find_type_profile_witness, hodge_equiv, hodge_type_of, HodgeType, TransitionConstraint};
use tameshape_core::linalg::rank;
use tameshape_core::matrix::VMat;
use tameshape_core::operators::{apply_operator, irregular_ratio_never_cyclotomic, WeightOperator};
use tameshape_core::phi::descend::{ascend, descend_to_k, dual_module, xi_values};
use tameshape_core::phi::extension::{build_extension, kext_analysis, splits_after_inverting_u, ExtensionPoint};
use tameshape_core::phi::operator_basis::{apply_weight_operator_basis, HodgeFamily};
use tameshape_core::phi::sample::{
    random_eigenbasis_change, random_element, random_module, random_module_in_component, random_unit_element,
    random_unit_matrix,
};
use tameshape_core::phi::{
    change_eigenbasis, change_eigenbasis_a_form, classify_shape, component_normal_form, determinant_valuations,
    raw_shapes, strong_det_check, Shape,
};
use tameshape_core::series::VSeries;
use tameshape_core::shapeshift::shapeshift;
use tameshape_core::tame::{enumerate_profiles, profile_data, serre_weight, Profile, TameType, TypeKind};
use tameshape_core::Error;

const MAX_COUNTEREXAMPLES: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: u64,
    pub failures: Vec<String>,
    pub failure_count: u64,
}

impl CheckResult {
    fn new(name: &'static str) -> Self {
        CheckResult { name, cases: 0, failures: Vec::new(), failure_count: 0 }
    }

    fn case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_COUNTEREXAMPLES {
                self.failures.push(describe());
            }
        }
    }

    fn error(&mut self, what: impl fmt::Display) {
        self.case(false, || what.to_string());
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub p: u32,
    pub f: u32,
    pub seed: u64,
    pub precision: i64,
    /// Random modules in the shape check.
    pub shape_trials: usize,
    /// Random unit families per operator application.
    pub operator_trials: usize,
    /// Cap on `(tau, J)` pairs per module-level check; larger sets are sampled.
    pub max_pairs: usize,
    /// Perturbs one `s_{J,i}` so the harness can be seen to fail.
    pub inject_fault: bool,
}

impl VerifyConfig {
    pub fn new(p: u32, f: u32, seed: u64, precision: i64) -> Self {
        VerifyConfig {
            p,
            f,
            seed,
            precision,
            shape_trials: 200,
            operator_trials: 5,
            max_pairs: 1000,
            inject_fault: false,
        }
    }
}

fn types(p: u32, f: u32) -> Result<Vec<TameType>, Error> {
    let mut out = TameType::enumerate(p, f, TypeKind::PrincipalSeries)?;
    out.extend(TameType::enumerate(p, f, TypeKind::Cuspidal)?);
    Ok(out)
}

fn pairs(p: u32, f: u32) -> Result<Vec<(TameType, Profile)>, Error> {
    Ok(types(p, f)?
        .into_iter()
        .flat_map(|t| enumerate_profiles(&t).into_iter().map(move |j| (t.clone(), j)))
        .collect())
}

fn capped_pairs(p: u32, f: u32, cap: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(TameType, Profile)>, Error> {
    let mut all = pairs(p, f)?;
    if all.len() > cap {
        all.shuffle(rng);
        all.truncate(cap);
    }
    Ok(all)
}

fn describe(tau: &TameType, j: &Profile) -> String {
    format!("kind={} eta={} eta_prime={} J={{{j}}}", tau.kind(), tau.eta(), tau.eta_prime())
}

/// Bounds on `s_J`, `t_J`, periodicity, the structural identities of the
/// type, and norm descent of `Theta_J`.
pub fn check_recipe_bounds(p: u32, f: u32, inject_fault: bool) -> CheckResult {
    let mut res = CheckResult::new("recipe-bounds");
    let ts = match types(p, f) {
        Ok(t) => t,
        Err(e) => {
            res.error(e);
            return res;
        }
    };
    let pi = p as i64;
    let mut faulted = !inject_fault;
    for tau in &ts {
        let bad = tau.invariant_violations();
        res.case(bad.is_empty(), || format!("{}: {}", describe(tau, &Profile::lift(tau.kind(), f, 0).unwrap()), bad.join("; ")));
        for j in enumerate_profiles(tau) {
            let mut data = match profile_data(tau, &j) {
                Ok(d) => d,
                Err(e) => {
                    res.error(format!("{}: {e}", describe(tau, &j)));
                    continue;
                }
            };
            if !faulted {
                data.s[0] = pi;
                faulted = true;
            }
            let n = data.s.len();
            let fu = f as usize;
            let ok = data.s.iter().all(|&s| (-1..pi).contains(&s))
                && data.t.iter().all(|&t| (0..=pi).contains(&t))
                && (0..n).all(|i| data.s[i] == data.s[i % fu]);
            res.case(ok, || format!("{} s=({}) t=({})", describe(tau, &j), join(&data.s), join(&data.t)));
        }
    }
    res
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// The Hodge type read off the Serre weight is equivalent to `r(tau, J)`.
pub fn check_convention_coherence(p: u32, f: u32, inject_fault: bool) -> CheckResult {
    let mut res = CheckResult::new("convention-coherence");
    let all = match pairs(p, f) {
        Ok(x) => x,
        Err(e) => {
            res.error(e);
            return res;
        }
    };
    let mut faulted = !inject_fault;
    for (tau, j) in all {
        let data = match profile_data(&tau, &j) {
            Ok(d) => d,
            Err(e) => {
                res.error(e);
                continue;
            }
        };
        if !data.in_p_tau {
            continue;
        }
        let mut w = match serre_weight(&tau, &j) {
            Ok(w) => w,
            Err(e) => {
                res.error(e);
                continue;
            }
        };
        if !faulted {
            w.s[0] += 1;
            faulted = true;
        }
        let from_weight = HodgeType::new(w.hodge_pairs());
        let r = hodge_type_of(&tau, &j).unwrap();
        res.case(hodge_equiv(p, &from_weight, &r), || format!("{} weight gives ({from_weight}), r = ({r})", describe(&tau, &j)));
    }
    res
}

/// Every canonical `p`-bounded Hodge type, Steinberg included.
pub fn canonical_hodge_types(p: u32, f: u32) -> Vec<HodgeType> {
    let pi = p as i64;
    let modulus = pi.pow(f) - 1;
    let mut out = Vec::new();
    let width = (pi + 1).pow(f);
    for code in 0..width {
        let mut c = code;
        let d: Vec<i64> = (0..f)
            .map(|_| {
                let x = c % (pi + 1);
                c /= pi + 1;
                x
            })
            .collect();
        for shift in 0..modulus {
            let pairs = d.iter().enumerate().map(|(i, &x)| if i == 0 { (x + shift, shift) } else { (x, 0) });
            out.push(HodgeType::new(pairs));
        }
    }
    out
}

/// Whether the remark's exception forbids the requested choice at `j`.
pub fn remark_exception(r: &HodgeType, p: u32, j: usize, want_transition: bool) -> bool {
    let f = r.f();
    let d = r.differences();
    let pi = p as i64;
    if f == 1 {
        return d[j] == 1 && !want_transition;
    }
    want_transition
        && (0..f).all(|i| {
            let expect = if i == j {
                pi - 1
            } else if i == (j + 1) % f {
                0
            } else {
                pi
            };
            d[i] == expect
        })
}

/// `find_type_profile` inverts `r(tau, J)`, and transition preferences at
/// indices with difference in `[1, p-1]` fail exactly on the two exceptional
/// patterns.
pub fn check_existence(p: u32, f: u32) -> (CheckResult, CheckResult) {
    let mut found = CheckResult::new("existence-roundtrip");
    let mut remark = CheckResult::new("transition-exceptions");
    let pi = p as i64;
    for r in canonical_hodge_types(p, f) {
        if r.is_steinberg(p) {
            continue;
        }
        match find_type_profile_witness(&r, p, &TransitionConstraint::new()) {
            Ok(w) => {
                let back = hodge_type_of(&w.tau, &w.profile).unwrap();
                found.case(hodge_equiv(p, &r, &back), || format!("r=({r}) gave ({back})"));
            }
            Err(e) => found.error(format!("r=({r}): {e}")),
        }
        let d = r.differences();
        for j in 0..f as usize {
            if !(1..pi).contains(&d[j]) {
                continue;
            }
            for want in [true, false] {
                let c: TransitionConstraint = [(j, want)].into_iter().collect();
                let exc = remark_exception(&r, p, j, want);
                match find_type_profile_witness(&r, p, &c) {
                    Ok(w) => {
                        let back = hodge_type_of(&w.tau, &w.profile).unwrap();
                        let ok = !exc && w.profile.is_transition(j as i64) == want && hodge_equiv(p, &r, &back);
                        remark.case(ok, || format!("r=({r}) j={j} transition={want} accepted"));
                    }
                    Err(Error::ForcedTransition { index }) => {
                        remark.case(exc && !want && index == j, || format!("r=({r}) j={j}: forced transition"));
                    }
                    Err(Error::ForcedNonTransition { index }) => {
                        remark.case(exc && want && index == j, || format!("r=({r}) j={j}: forced non-transition"));
                    }
                    Err(e) => remark.error(format!("r=({r}) j={j}: {e}")),
                }
            }
        }
    }
    (found, remark)
}

pub fn check_cyclotomic_lemma(p: u32, f_max: u32) -> CheckResult {
    let mut res = CheckResult::new("irregular-ratio-not-cyclotomic");
    for f in 1..=f_max {
        match irregular_ratio_never_cyclotomic(p, f) {
            Ok(ok) => res.case(ok, || format!("p={p} f={f}")),
            Err(e) => res.error(e),
        }
    }
    res
}

fn random_type(p: u32, f: u32, rng: &mut ChaCha8Rng) -> Result<TameType, Error> {
    let kind = if rng.gen_bool(0.5) { TypeKind::PrincipalSeries } else { TypeKind::Cuspidal };
    let ts = TameType::enumerate(p, f, kind)?;
    Ok(ts.choose(rng).unwrap().clone())
}

/// Strong determinant against shape existence, shape invariance under
/// eigenbasis changes, and component membership against the shape vector.
pub fn check_shapes(p: u32, f: u32, trials: usize, precision: i64, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut det_shape = CheckResult::new("strong-det-vs-shape");
    let mut invariance = CheckResult::new("shape-invariance");
    let mut membership = CheckResult::new("component-membership");
    let k = FiniteField::get(p, 1).unwrap();
    for t in 0..trials {
        let mut run = || -> Result<(), Error> {
            let tau = random_type(p, f, rng)?;
            let m = if t % 2 == 0 {
                random_module(&tau, k, precision, rng)?
            } else {
                let profs = enumerate_profiles(&tau);
                let j = profs.choose(rng).unwrap();
                random_module_in_component(&tau, j, k, precision, rng)?
            };
            let det = strong_det_check(&m)?;
            let raw = raw_shapes(&m)?;
            let has_shape = raw.iter().all(|s| s.is_some());
            let small_det = determinant_valuations(&m)?.iter().all(|&v| v <= 1);
            // Strong determinant implies a shape; on modules whose
            // determinants have valuation at most one the converse holds.
            det_shape.case((!det || has_shape) && (!(has_shape && small_det) || det), || {
                format!("trial {t}: det={det} shapes={raw:?}")
            });
            if !det {
                return Ok(());
            }
            let before = classify_shape(&m)?;
            let u = random_eigenbasis_change(&tau, k, precision, rng);
            let moved = change_eigenbasis(&m, &u)?;
            let after = classify_shape(&moved)?;
            let a_form = change_eigenbasis_a_form(&m, &u)?;
            let a_ok = (0..moved.len()).all(|i| moved.a_matrix(i).map(|a| a.agrees_with(&a_form[i])).unwrap_or(false));
            invariance.case(before == after && a_ok, || format!("trial {t}: {:?} -> {:?}", before.shapes, after.shapes));
            let direct: Vec<Profile> =
                enumerate_profiles(&tau).into_iter().filter(|j| component_normal_form(&m, j).is_ok()).collect();
            membership.case(direct == before.profiles, || format!("trial {t}: shapes give {:?}", before.profiles));
            Ok(())
        };
        if let Err(e) = run() {
            det_shape.error(format!("trial {t}: {e}"));
        }
    }
    vec![det_shape, invariance, membership]
}

fn v_diag(k: &'static FiniteField, x: i64, y: i64) -> VMat {
    VMat::diag(VSeries::monomial(k.one(), x), VSeries::monomial(k.one(), y))
}

/// `descend_to_k` produces `B_i diag(v, v^-s) v^-theta` with unit `B_i`,
/// `xi = 0` in the cuspidal case, and ascends back to the input.
pub fn check_descent(p: u32, f: u32, precision: i64, cap: usize, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut res = CheckResult::new("descent");
    let k = FiniteField::get(p, 1).unwrap();
    let all = match capped_pairs(p, f, cap, rng) {
        Ok(x) => x,
        Err(e) => {
            res.error(e);
            return res;
        }
    };
    for (tau, j) in all {
        let run = |rng: &mut ChaCha8Rng| -> Result<bool, Error> {
            let data = profile_data(&tau, &j)?;
            let m = random_module_in_component(&tau, &j, k, precision, rng)?;
            let out = descend_to_k(&m, &j)?;
            let fu = f as usize;
            let mut ok = out.s == data.s[..fu] && out.theta == data.theta;
            for i in 0..fu {
                let want = out.units[i].mul(&v_diag(k, 1 - data.theta[i], -data.s[i] - data.theta[i]));
                ok &= out.matrices[i].agrees_with(&want) && out.units[i].is_unit()?;
            }
            if tau.kind() == TypeKind::Cuspidal {
                ok &= xi_values(&tau, &j, &data)?.iter().all(|&x| x == 0);
            }
            let back = ascend(&tau, &j, &out.units)?;
            ok &= (0..m.len()).all(|i| back.coeffs()[i].agrees_with(&m.coeffs()[i]));
            let dd = dual_module(&dual_module(&out.matrices)?)?;
            ok &= dd.iter().zip(&out.matrices).all(|(a, b)| a.agrees_with(b));
            Ok(ok)
        };
        match run(rng) {
            Ok(ok) => res.case(ok, || describe(&tau, &j)),
            Err(e) => res.error(format!("{}: {e}", describe(&tau, &j))),
        }
    }
    res
}

/// The basis-level operators realize `apply_operator` on random unit
/// families, for every canonical `p`-bounded type and irregular index.
pub fn check_operator_basis(p: u32, f: u32, trials: usize, precision: i64, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut res = CheckResult::new("operator-basis");
    if f < 2 {
        return res;
    }
    let k = FiniteField::get(p, 1).unwrap();
    for r in canonical_hodge_types(p, f) {
        for j in r.irregular_set() {
            for op in WeightOperator::ALL {
                let Ok(target) = apply_operator(op, j, &r, p) else { continue };
                for _ in 0..trials {
                    let units: Vec<VMat> = (0..f).map(|_| random_unit_matrix(k, precision, rng)).collect();
                    let out = HodgeFamily::new(units, r.pairs().to_vec())
                        .and_then(|fam| apply_weight_operator_basis(op, j, &fam, p));
                    match out {
                        Ok(fam) => res.case(fam.hodge_type() == target, || format!("{op}_{j} on ({r})")),
                        Err(e) => res.error(format!("{op}_{j} on ({r}): {e}")),
                    }
                }
            }
        }
    }
    res
}

fn random_twists(k: &'static FiniteField, rng: &mut ChaCha8Rng) -> (Fq, Fq) {
    let a = random_unit_element(k, rng);
    loop {
        let b = random_unit_element(k, rng);
        if b != a {
            return (a, b);
        }
    }
}

fn in_span(k: &'static FiniteField, basis: &[Vec<Fq>], h: &[Fq]) -> bool {
    let mut rows = basis.to_vec();
    let r0 = rank(&rows, h.len());
    rows.push(h.to_vec());
    let _ = k;
    rank(&rows, h.len()) == r0
}

/// kExt dimension and hyperplanes, linearity of splitting, and the shape-II
/// law for extension families.
pub fn check_extensions(p: u32, f: u32, precision: i64, cap: usize, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut kext = CheckResult::new("kext-dimension");
    let mut split = CheckResult::new("split-subspace");
    let mut law = CheckResult::new("extension-shape-law");
    let k = FiniteField::get(p, 1).unwrap();
    let all = match capped_pairs(p, f, cap, rng) {
        Ok(x) => x,
        Err(e) => {
            kext.error(e);
            return vec![kext, split, law];
        }
    };
    let fu = f as usize;
    for (tau, j) in all {
        let (a, b) = random_twists(k, rng);
        let mut run = || -> Result<(), Error> {
            let rep = kext_analysis(&tau, &j, a, b)?;
            kext.case(rep.consistent(), || format!("{}: dim {} expected {}", describe(&tau, &j), rep.dimension, rep.expected));
            // A random combination of splitting classes splits; a random
            // class splits exactly when it lies in the span.
            let mut h1 = vec![k.zero(); fu];
            for v in &rep.basis {
                let c = random_element(k, rng);
                for i in 0..fu {
                    h1[i] += c * v[i];
                }
            }
            let h2: Vec<Fq> = (0..fu).map(|_| random_element(k, rng)).collect();
            for (h, expect) in [(h1.clone(), true), (h2.clone(), in_span(k, &rep.basis, &h2))] {
                let x = ExtensionPoint::new(tau.clone(), j, a, b, h.clone())?;
                let s = splits_after_inverting_u(&x, precision)?;
                split.case(s.split == expect, || format!("{}: h={h:?}", describe(&tau, &j)));
            }
            for h in [vec![k.zero(); fu], h2] {
                let x = ExtensionPoint::new(tau.clone(), j, a, b, h.clone())?;
                let m = build_extension(&x)?;
                let shapes = classify_shape(&m)?.shapes;
                let ok = shapes
                    .iter()
                    .enumerate()
                    .all(|(i, s)| (*s == Shape::II) == (j.is_transition(i as i64) && h[i % fu].is_zero()));
                law.case(ok, || format!("{}: h={h:?} shapes={shapes:?}", describe(&tau, &j)));
            }
            Ok(())
        };
        if let Err(e) = run() {
            kext.error(format!("{}: {e}", describe(&tau, &j)));
        }
    }
    vec![kext, split, law]
}

/// For each shape-shifting target `J'`, the extension with `h = 0` on
/// `J xor J'` lies in `C^tau(J')`.
pub fn check_shapeshift(p: u32, f: u32, cap: usize, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut res = CheckResult::new("shape-shifting");
    let k = FiniteField::get(p, 1).unwrap();
    let all = match capped_pairs(p, f, cap, rng) {
        Ok(x) => x,
        Err(e) => {
            res.error(e);
            return res;
        }
    };
    for (tau, j) in all {
        let (a, b) = random_twists(k, rng);
        let mut run = || -> Result<(), Error> {
            for (target, flips) in shapeshift(&tau, &j)?.targets {
                let h: Vec<Fq> = (0..f as usize)
                    .map(|i| if flips >> i & 1 == 1 { k.zero() } else { random_unit_element(k, rng) })
                    .collect();
                let x = ExtensionPoint::new(tau.clone(), j, a, b, h)?;
                let rep = classify_shape(&build_extension(&x)?)?;
                res.case(rep.profiles.contains(&target), || format!("{} -> {{{target}}}", describe(&tau, &j)));
            }
            Ok(())
        };
        if let Err(e) = run() {
            res.error(format!("{}: {e}", describe(&tau, &j)));
        }
    }
    res
}

/// The profile flips behind the operators: flipping an irregular `j` gives
/// `nu_j`; flipping `j-1` gives `theta_j` after a transition at `j-1` and
/// `mu_j` otherwise, the latter shrinking the bad set by `[d_{j-1} > 1]`.
pub fn check_operator_flips(p: u32, f: u32) -> CheckResult {
    let mut res = CheckResult::new("operator-profile-flips");
    if f < 2 {
        return res;
    }
    let all = match pairs(p, f) {
        Ok(x) => x,
        Err(e) => {
            res.error(e);
            return res;
        }
    };
    let n = f as usize;
    for (tau, j) in all {
        let r = hodge_type_of(&tau, &j).unwrap();
        let bad = profile_data(&tau, &j).unwrap().bad_set;
        for &i in &bad {
            let prev = (i + n - 1) % n;
            let moved = |at: usize| {
                let jj = j.flip(1 << at);
                (hodge_type_of(&tau, &jj).unwrap(), profile_data(&tau, &jj).unwrap().bad_set.len())
            };
            let (r_nu, _) = moved(i);
            let nu = apply_operator(WeightOperator::Nu, i, &r, p).unwrap();
            res.case(hodge_equiv(p, &nu, &r_nu), || format!("{} nu_{i}", describe(&tau, &j)));
            if bad.contains(&prev) {
                continue;
            }
            let (r_prev, bad_prev) = moved(prev);
            if j.is_transition(prev as i64) {
                if let Ok(theta) = apply_operator(WeightOperator::Theta, i, &r, p) {
                    res.case(hodge_equiv(p, &theta, &r_prev), || format!("{} theta_{i}", describe(&tau, &j)));
                }
            } else {
                let mu = apply_operator(WeightOperator::Mu, i, &r, p).unwrap();
                let shrink = (r.difference(prev as i64) > 1) as usize;
                res.case(hodge_equiv(p, &mu, &r_prev) && bad_prev + shrink == bad.len(), || {
                    format!("{} mu_{i}", describe(&tau, &j))
                });
            }
        }
    }
    res
}

pub fn run_suite(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (p, f) = (cfg.p, cfg.f);
    let mut out = vec![
        check_recipe_bounds(p, f, cfg.inject_fault),
        check_convention_coherence(p, f, cfg.inject_fault),
    ];
    let (a, b) = check_existence(p, f);
    out.push(a);
    out.push(b);
    out.push(check_cyclotomic_lemma(p, f));
    out.push(check_operator_flips(p, f));
    out.extend(check_shapes(p, f, cfg.shape_trials, cfg.precision, &mut rng));
    out.push(check_descent(p, f, cfg.precision, cfg.max_pairs, &mut rng));
    out.push(check_operator_basis(p, f, cfg.operator_trials, cfg.precision, &mut rng));
    out.extend(check_extensions(p, f, cfg.precision, cfg.max_pairs, &mut rng));
    out.push(check_shapeshift(p, f, cfg.max_pairs, &mut rng));
    out
}
