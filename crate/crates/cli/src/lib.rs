//! Command-line front end for `tameshape-core`: line-delimited records on
//! stdout, diagnostics on stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use tameshape_core::char_arith::CharExp;
use tameshape_core::field::FiniteField;
use tameshape_core::hodge::{find_type_profile_witness, hodge_type_of, HodgeType, TransitionConstraint};
use tameshape_core::operators::{apply_operator, predicted_inclusions, WeightOperator};
use tameshape_core::phi::descend::descend_to_k;
use tameshape_core::phi::extension::{build_extension, kext_analysis, splits_after_inverting_u, ExtensionPoint};
use tameshape_core::phi::sample::{random_module, random_module_in_component};
use tameshape_core::phi::{classify_shape, determinant_valuations, raw_shapes};
use tameshape_core::tame::{
    enumerate_profiles, jordan_holder_set, make_type, profile_data, weight_from_data, Profile, TameType, TypeKind,
};

pub mod records;
pub mod verify;

use records::{header, list, parse_element, parse_list, read_module, series_token, write_module, Record, SweepRecord};

pub const PRECISION_ENV: &str = "TAMESHAPE_PRECISION";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] tameshape_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) | CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "tameshape", version, about = "Tame types, Serre weights and Breuil-Kisin shapes")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Truncation precision (in powers of v) for series computations.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 64)]
    pub precision: i64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Ps,
    Cuspidal,
}

impl From<KindArg> for TypeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ps => TypeKind::PrincipalSeries,
            KindArg::Cuspidal => TypeKind::Cuspidal,
        }
    }
}

/// A tame type, either from `gamma` digits plus a twist or from the two
/// character exponents directly.
#[derive(Args, Debug, Clone)]
pub struct TypeArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub f: Option<u32>,
    #[arg(long, value_enum, default_value_t = KindArg::Ps)]
    pub kind: KindArg,
    /// Digits of eta/eta' on the first f embeddings, comma separated.
    #[arg(long, conflicts_with_all = ["eta", "eta_prime"])]
    pub gamma: Option<String>,
    #[arg(long, default_value_t = 0, requires = "gamma")]
    pub twist: i64,
    #[arg(long, requires = "eta_prime")]
    pub eta: Option<i64>,
    #[arg(long, requires = "eta")]
    pub eta_prime: Option<i64>,
}

impl TypeArgs {
    pub fn build(&self) -> Result<TameType> {
        let kind: TypeKind = self.kind.into();
        if let Some(g) = &self.gamma {
            let gamma: Vec<i64> = parse_list(g)?;
            if let Some(f) = self.f {
                if f as usize != gamma.len() {
                    return Err(CliError::Usage(format!("--gamma has {} entries but --f is {f}", gamma.len())));
                }
            }
            return Ok(TameType::from_gamma(self.p, kind, &gamma, self.twist)?);
        }
        let (Some(eta), Some(eta_prime)) = (self.eta, self.eta_prime) else {
            return Err(CliError::Usage("give either --gamma or both --eta and --eta-prime".into()));
        };
        let f = self.f.ok_or_else(|| CliError::Usage("--f is required with --eta".into()))?;
        let level = kind.level(f);
        let e = CharExp::new(self.p, level, eta)?;
        let e2 = CharExp::new(self.p, level, eta_prime)?;
        Ok(make_type(self.p, f, kind, e, e2)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExtAction {
    Build,
    Split,
    Kext,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Every profile with its s, t, theta and bad set.
    Profiles(TypeArgs),
    /// Serre weights of the profiles in P_tau and the Jordan-Holder set.
    Weights(TypeArgs),
    /// Hodge types r(tau, J).
    Hodge {
        #[command(flatten)]
        ty: TypeArgs,
        /// Members of J in {0, .., f-1}; all profiles when omitted.
        #[arg(long)]
        profile: Option<String>,
    },
    /// A type and profile realizing a Hodge type.
    FindType {
        #[arg(long)]
        p: u32,
        /// Number of embeddings; must match `--r` when given.
        #[arg(long)]
        f: Option<usize>,
        /// Pairs `a,b;c,d` or `(a,b),(c,d)`.
        #[arg(long)]
        r: String,
        /// Indices required to be transitions.
        #[arg(long, value_delimiter = ',')]
        transition: Vec<usize>,
        /// Indices required to be non-transitions.
        #[arg(long, value_delimiter = ',')]
        no_transition: Vec<usize>,
    },
    /// Weight operators at every irregular index.
    Operators {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        r: String,
    },
    /// Predicted inclusions of crystalline loci.
    Inclusions {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        r: String,
    },
    /// Writes a random module, in a given component if `--profile` is set.
    Sample {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classifies the shape of a module file.
    Shape {
        #[arg(long)]
        file: PathBuf,
    },
    /// Partial Frobenius matrices on the invariants of a module file.
    Descend {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        profile: String,
    },
    /// Extension families of rank-one modules.
    Ext {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        profile: String,
        #[arg(long, value_enum, default_value_t = ExtAction::Kext)]
        action: ExtAction,
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value = "2")]
        b: String,
        /// Extension parameters on Z/f; zero when omitted.
        #[arg(long)]
        h: Option<String>,
        #[arg(long, default_value_t = 1)]
        degree: u32,
    },
    /// Exhaustive table of every type and profile.
    Sweep {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        f: u32,
        /// Restrict to one kind; both when omitted.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Runs the property suite.
    Verify {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        f: u32,
        #[arg(long, default_value_t = 200)]
        shape_trials: usize,
        #[arg(long, default_value_t = 5)]
        operator_trials: usize,
        #[arg(long, default_value_t = 1000)]
        max_pairs: usize,
        /// Corrupts one s_J,i to exercise the failure path.
        #[arg(long)]
        inject_fault: bool,
    },
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn profile_from_members(tau: &TameType, s: &str) -> Result<Profile> {
    let members: Vec<usize> = parse_list(s)?;
    let f = tau.f() as usize;
    if let Some(m) = members.iter().find(|&&m| m >= f) {
        return Err(CliError::Usage(format!("profile member {m} outside 0..{f}")));
    }
    let low = members.iter().fold(0u64, |acc, &m| acc | 1 << m);
    Ok(Profile::lift(tau.kind(), tau.f(), low)?)
}

fn type_fields(rec: Record, tau: &TameType) -> Record {
    rec.with("kind", tau.kind()).with("eta", tau.eta()).with("eta_prime", tau.eta_prime())
}

fn line(out: &mut dyn Write, rec: Record) -> Result<()> {
    writeln!(out, "{rec}")?;
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let prec = cli.precision;
    if prec < 1 {
        return Err(CliError::Usage("--precision must be positive".into()));
    }
    match &cli.command {
        Command::Profiles(ty) => {
            let tau = ty.build()?;
            for j in enumerate_profiles(&tau) {
                let rec = SweepRecord::from_data(&tau, &j, &profile_data(&tau, &j)?).to_record();
                line(out, Record { tag: "profile".into(), fields: rec.fields })?;
            }
        }
        Command::Weights(ty) => {
            let tau = ty.build()?;
            for j in enumerate_profiles(&tau) {
                let data = profile_data(&tau, &j)?;
                if !data.in_p_tau {
                    continue;
                }
                let w = weight_from_data(&tau, &data)?;
                let rec = Record::new("weight").with("profile", j.bits()).with("t", list(&w.t)).with("s", list(&w.s));
                line(out, rec.with("steinberg", w.is_steinberg(tau.p()) as u8))?;
            }
            let jh = jordan_holder_set(&tau)?;
            line(out, type_fields(Record::new("jh"), &tau).with("size", jh.len()))?;
            for w in jh {
                line(out, Record::new("jh_weight").with("t", list(&w.t)).with("s", list(&w.s)))?;
            }
        }
        Command::Hodge { ty, profile } => {
            let tau = ty.build()?;
            let profiles = match profile {
                Some(s) => vec![profile_from_members(&tau, s)?],
                None => enumerate_profiles(&tau),
            };
            for j in profiles {
                let r = hodge_type_of(&tau, &j)?;
                let rec = Record::new("hodge").with("profile", j.bits()).with("members", j);
                line(out, rec.with("hodge", format!("({r})")).with("canonical", format!("({})", r.canonical(tau.p()))))?;
            }
        }
        Command::FindType { p, f, r, transition, no_transition } => {
            let r: HodgeType = r.parse()?;
            if f.is_some_and(|f| f != r.f()) {
                return Err(CliError::Usage(format!("--r has {} embeddings but --f is {}", r.f(), f.unwrap())));
            }
            let mut c = TransitionConstraint::new();
            for &i in transition {
                c.insert(i, true);
            }
            for &i in no_transition {
                if c.insert(i, false) == Some(true) {
                    return Err(CliError::Usage(format!("index {i} asked to be both a transition and not")));
                }
            }
            let w = find_type_profile_witness(&r, *p, &c)?;
            let rec = type_fields(Record::new("type").with("p", p).with("f", w.tau.f()), &w.tau);
            let trans: Vec<u8> = w.transitions.iter().map(|&b| b as u8).collect();
            line(out, rec.with("profile", w.profile.bits()).with("transitions", list(&trans)))?;
        }
        Command::Operators { p, r } => {
            let r: HodgeType = r.parse()?;
            for j in r.irregular_set() {
                for op in WeightOperator::ALL {
                    let rec = Record::new("operator").with("op", op).with("j", j);
                    let rec = match apply_operator(op, j, &r, *p) {
                        Ok(t) => rec.with("target", format!("({t})")),
                        Err(e @ tameshape_core::Error::ThetaOutOfRange { .. }) => {
                            rec.with("target", "none").with("reason", format!("{e}").replace(' ', "_"))
                        }
                        Err(e) => return Err(e.into()),
                    };
                    line(out, rec)?;
                }
            }
        }
        Command::Inclusions { p, r } => {
            let r: HodgeType = r.parse()?;
            for inc in predicted_inclusions(&r, *p)? {
                let rec = Record::new("inclusion").with("op", inc.op).with("j", inc.index);
                line(out, rec.with("target", format!("({})", inc.target)).with("canonical", format!("({})", inc.target.canonical(*p))))?;
            }
        }
        Command::Sample { ty, profile, degree, out: path } => {
            let tau = ty.build()?;
            let field = FiniteField::get(tau.p(), *degree)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let m = match profile {
                Some(s) => random_module_in_component(&tau, &profile_from_members(&tau, s)?, field, prec, &mut rng)?,
                None => random_module(&tau, field, prec, &mut rng)?,
            };
            let text = write_module(&m);
            match path {
                Some(p) => std::fs::write(p, text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Shape { file } => {
            let m = read_module(&std::fs::read_to_string(file)?)?;
            let dets = determinant_valuations(&m)?;
            for (i, (s, d)) in raw_shapes(&m)?.iter().zip(&dets).enumerate() {
                let shape = s.map(|s| s.as_str()).unwrap_or("none");
                line(out, Record::new("index").with("i", i).with("shape", shape).with("det_valuation", d))?;
            }
            let rep = classify_shape(&m)?;
            let bits: Vec<u64> = rep.profiles.iter().map(|j| j.bits()).collect();
            line(out, Record::new("components").with("count", bits.len()).with("profiles", list(&bits)))?;
        }
        Command::Descend { file, profile } => {
            let m = read_module(&std::fs::read_to_string(file)?)?;
            let j = profile_from_members(m.tau(), profile)?;
            let d = descend_to_k(&m, &j)?;
            for i in 0..d.units.len() {
                let u = &d.units[i];
                let rec = Record::new("descended").with("i", i).with("s", d.s[i]).with("theta", d.theta[i]);
                let rec = rec
                    .with("a", series_token(u.get(0, 0)))
                    .with("b", series_token(u.get(0, 1)))
                    .with("c", series_token(u.get(1, 0)))
                    .with("d", series_token(u.get(1, 1)));
                line(out, rec)?;
            }
            if !d.xi.is_empty() {
                line(out, Record::new("xi").with("values", list(&d.xi)))?;
            }
        }
        Command::Ext { ty, profile, action, a, b, h, degree } => {
            let tau = ty.build()?;
            let j = profile_from_members(&tau, profile)?;
            let field = FiniteField::get(tau.p(), *degree)?;
            let a = parse_element(field, a)?;
            let b = parse_element(field, b)?;
            match action {
                ExtAction::Kext => {
                    let rep = kext_analysis(&tau, &j, a, b)?;
                    let rec = Record::new("kext").with("dimension", rep.dimension).with("expected", rep.expected);
                    line(out, rec.with("consistent", rep.consistent() as u8))?;
                    for v in &rep.basis {
                        let vals: Vec<String> = v.iter().map(|&x| records::element_token(x)).collect();
                        line(out, Record::new("basis").with("h", vals.join(",")))?;
                    }
                    for hp in &rep.hyperplanes {
                        let cs: Vec<String> = hp.coefficients.iter().map(|&x| records::element_token(x)).collect();
                        let rec = Record::new("hyperplane").with("support", list(&hp.support));
                        line(out, rec.with("coefficients", cs.join(",")).with("dimension", hp.dimension))?;
                    }
                }
                ExtAction::Build | ExtAction::Split => {
                    let f = tau.f() as usize;
                    let hv = match h {
                        Some(s) => s.split(',').map(|x| parse_element(field, x.trim())).collect::<Result<Vec<_>>>()?,
                        None => vec![field.zero(); f],
                    };
                    if hv.len() != f {
                        return Err(CliError::Usage(format!("--h needs {f} entries")));
                    }
                    let x = ExtensionPoint::new(tau.clone(), j, a, b, hv)?;
                    if *action == ExtAction::Build {
                        out.write_all(write_module(&build_extension(&x)?).as_bytes())?;
                    } else {
                        let s = splits_after_inverting_u(&x, prec)?;
                        let obs: Vec<String> =
                            s.obstructions.iter().map(|(k, c)| format!("{k}:{}", records::element_token(*c))).collect();
                        let rec = Record::new("split").with("split", s.split as u8).with("terms", s.terms);
                        line(out, rec.with("obstructions", obs.join(",")))?;
                    }
                }
            }
        }
        Command::Sweep { p, f, kind, out: path, jobs } => {
            let rows = sweep(*p, *f, kind.map(Into::into), *jobs)?;
            let field = FiniteField::get(*p, 1)?;
            let mut text = header(*p, *f, field, prec);
            text.push('\n');
            for r in &rows {
                text += &r.to_record().to_string();
                text.push('\n');
            }
            match path {
                Some(path) => {
                    std::fs::write(path, &text)?;
                    line(out, Record::new("sweep_written").with("rows", rows.len()))?;
                }
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Verify { p, f, shape_trials, operator_trials, max_pairs, inject_fault } => {
            let mut cfg = verify::VerifyConfig::new(*p, *f, cli.seed, prec);
            cfg.shape_trials = *shape_trials;
            cfg.operator_trials = *operator_trials;
            cfg.max_pairs = *max_pairs;
            cfg.inject_fault = *inject_fault;
            let field = FiniteField::get(*p, 1)?;
            if *f == 0 {
                return Err(CliError::Usage("--f must be positive".into()));
            }
            let results = verify::run_suite(&cfg);
            writeln!(out, "{}", header(*p, *f, field, prec))?;
            let mut failed = Vec::new();
            for r in &results {
                let status = if r.passed() { "pass" } else { "fail" };
                let rec = Record::new("check").with("name", r.name).with("status", status);
                line(out, rec.with("cases", r.cases).with("failures", r.failure_count))?;
                for c in &r.failures {
                    writeln!(out, "counterexample check={} detail=\"{c}\"", r.name)?;
                }
                if !r.passed() {
                    failed.push(r.name);
                }
            }
            let status = if failed.is_empty() { "pass" } else { "fail" };
            line(out, Record::new("verify").with("status", status).with("checks", results.len()))?;
            if !failed.is_empty() {
                return Err(CliError::VerifyFailed(failed.join(", ")));
            }
        }
    }
    Ok(())
}

/// Every (type, profile) row at `(p, f)`, sorted by key. With `jobs > 1` the
/// types are split across threads; the order of the output does not depend
/// on scheduling.
pub fn sweep(p: u32, f: u32, kind: Option<TypeKind>, jobs: usize) -> Result<Vec<SweepRecord>> {
    let kinds = match kind {
        Some(k) => vec![k],
        None => vec![TypeKind::PrincipalSeries, TypeKind::Cuspidal],
    };
    let mut types = Vec::new();
    for k in kinds {
        types.extend(TameType::enumerate(p, f, k)?);
    }
    let rows_for = |ts: &[TameType]| -> Result<Vec<SweepRecord>> {
        let mut rows = Vec::new();
        for tau in ts {
            for j in enumerate_profiles(tau) {
                rows.push(SweepRecord::from_data(tau, &j, &profile_data(tau, &j)?));
            }
        }
        Ok(rows)
    };
    let jobs = jobs.max(1);
    let mut rows = if jobs == 1 {
        rows_for(&types)?
    } else {
        let chunk = types.len().div_ceil(jobs).max(1);
        std::thread::scope(|s| {
            let handles: Vec<_> = types.chunks(chunk).map(|c| s.spawn(move || rows_for(c))).collect();
            let mut all = Vec::new();
            for h in handles {
                all.extend(h.join().expect("sweep worker panicked")?);
            }
            Ok::<_, CliError>(all)
        })?
    };
    rows.sort();
    Ok(rows)
}
