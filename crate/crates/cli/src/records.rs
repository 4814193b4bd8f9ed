//! Line-delimited records: `tag key=value key=value ...`, one per line.
//! Integers are decimal, sets and tuples are comma lists, Hodge types are
//! `((a,b),(c,d))`.

use std::fmt;
use std::str::FromStr;

use tameshape_core::field::{FiniteField, Fq};
use tameshape_core::hodge::{hodge_from_data, HodgeType};
use tameshape_core::matrix::VMat;
use tameshape_core::phi::BKModule;
use tameshape_core::series::VSeries;
use tameshape_core::tame::{make_type, Profile, ProfileData, TameType, TypeKind};
use tameshape_core::char_arith::CharExp;

use crate::CliError;

pub const RECORD_VERSION: &str = "tameshape-records v1";
pub const MODULE_VERSION: &str = "tameshape-module v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub tag: String,
    pub fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(tag: &str) -> Self {
        Record { tag: tag.to_string(), fields: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Result<&str, CliError> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| CliError::Parse(format!("record {} has no field {key}", self.tag)))
    }

    pub fn parse_field<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        let v = self.get(key)?;
        v.parse().map_err(|_| CliError::Parse(format!("bad value {v:?} for {key}")))
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag)?;
        for (k, v) in &self.fields {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for Record {
    type Err = CliError;
    fn from_str(line: &str) -> Result<Self, CliError> {
        let mut parts = line.split_whitespace();
        let tag = parts.next().ok_or_else(|| CliError::Parse("empty record".into()))?;
        let mut rec = Record::new(tag);
        for p in parts {
            let (k, v) = p.split_once('=').ok_or_else(|| CliError::Parse(format!("field without '=': {p}")))?;
            rec.fields.push((k.to_string(), v.to_string()));
        }
        Ok(rec)
    }
}

pub fn header(p: u32, f: u32, field: &FiniteField, precision: i64) -> String {
    format!("# {RECORD_VERSION} p={p} f={f} field={} precision={precision}", field.modulus_string())
}

pub fn list<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::Parse(format!("bad list entry {x:?}"))))
        .collect()
}

pub fn hodge_token(r: &HodgeType) -> String {
    format!("({r})")
}

/// One row of an enumeration sweep.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SweepRecord {
    pub p: u32,
    pub f: u32,
    pub kind: TypeKind,
    pub eta: u64,
    pub eta_prime: u64,
    pub profile: u64,
    pub s: Vec<i64>,
    pub t: Vec<i64>,
    pub theta: Vec<i64>,
    pub bad: Vec<usize>,
    pub hodge: HodgeType,
    pub in_p_tau: bool,
}

impl SweepRecord {
    pub fn from_data(tau: &TameType, j: &Profile, data: &ProfileData) -> Self {
        SweepRecord {
            p: tau.p(),
            f: tau.f(),
            kind: tau.kind(),
            eta: tau.eta().residue_i64().unwrap() as u64,
            eta_prime: tau.eta_prime().residue_i64().unwrap() as u64,
            profile: j.bits(),
            s: data.s.clone(),
            t: data.t.clone(),
            theta: data.theta.clone(),
            bad: data.bad_set.clone(),
            hodge: hodge_from_data(tau, data),
            in_p_tau: data.in_p_tau,
        }
    }

    pub fn to_record(&self) -> Record {
        Record::new("sweep")
            .with("p", self.p)
            .with("f", self.f)
            .with("kind", self.kind)
            .with("eta", self.eta)
            .with("eta_prime", self.eta_prime)
            .with("profile", self.profile)
            .with("s", list(&self.s))
            .with("t", list(&self.t))
            .with("theta", list(&self.theta))
            .with("bad", list(&self.bad))
            .with("hodge", hodge_token(&self.hodge))
            .with("p_tau", self.in_p_tau as u8)
    }

    pub fn from_record(r: &Record) -> Result<Self, CliError> {
        if r.tag != "sweep" {
            return Err(CliError::Parse(format!("expected a sweep record, got {}", r.tag)));
        }
        let kind: TypeKind = r.get("kind")?.parse()?;
        Ok(SweepRecord {
            p: r.parse_field("p")?,
            f: r.parse_field("f")?,
            kind,
            eta: r.parse_field("eta")?,
            eta_prime: r.parse_field("eta_prime")?,
            profile: r.parse_field("profile")?,
            s: parse_list(r.get("s")?)?,
            t: parse_list(r.get("t")?)?,
            theta: parse_list(r.get("theta")?)?,
            bad: parse_list(r.get("bad")?)?,
            hodge: r.get("hodge")?.parse()?,
            in_p_tau: r.parse_field::<u8>("p_tau")? == 1,
        })
    }
}

/// Reads sweep records, skipping comment lines.
pub fn read_sweep(text: &str) -> Result<Vec<SweepRecord>, CliError> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| SweepRecord::from_record(&l.parse()?))
        .collect()
}

pub fn element_token(x: Fq) -> String {
    if x.field().degree() == 1 {
        x.value().to_string()
    } else {
        x.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(".")
    }
}

pub fn parse_element(field: &'static FiniteField, s: &str) -> Result<Fq, CliError> {
    let coeffs: Vec<u32> = s
        .split('.')
        .map(|c| c.parse().map_err(|_| CliError::Parse(format!("bad field element {s:?}"))))
        .collect::<Result<_, _>>()?;
    if field.degree() == 1 && coeffs.len() == 1 {
        return Ok(field.from_int(coeffs[0] as i64));
    }
    Ok(field.from_coeffs(&coeffs)?)
}

/// `<val>:<c0>/<c1>/...@<prec>`; `0` or `0@<prec>` for zero; `@<prec>` is
/// omitted for exact series.
pub fn series_token(x: &VSeries) -> String {
    let prec = x.precision().map(|n| format!("@{n}")).unwrap_or_default();
    match x.valuation() {
        None => format!("0{prec}"),
        Some(v) => {
            let last = x.terms().last().unwrap().0;
            let coeffs: Vec<String> = (v..=last).map(|e| element_token(x.coeff(e))).collect();
            format!("{v}:{}{prec}", coeffs.join("/"))
        }
    }
}

pub fn parse_series(field: &'static FiniteField, s: &str) -> Result<VSeries, CliError> {
    let (body, prec) = match s.split_once('@') {
        Some((b, n)) => (b, Some(n.parse::<i64>().map_err(|_| CliError::Parse(format!("bad precision in {s:?}")))?)),
        None => (s, None),
    };
    if body == "0" {
        return Ok(VSeries::zero(field, prec));
    }
    let (v, coeffs) = body.split_once(':').ok_or_else(|| CliError::Parse(format!("bad series {s:?}")))?;
    let v: i64 = v.parse().map_err(|_| CliError::Parse(format!("bad valuation in {s:?}")))?;
    let coeffs: Vec<Fq> = coeffs.split('/').map(|c| parse_element(field, c)).collect::<Result<_, _>>()?;
    Ok(VSeries::from_dense(field, v, &coeffs, prec))
}

pub fn type_record(tau: &TameType) -> Record {
    Record::new("type")
        .with("p", tau.p())
        .with("f", tau.f())
        .with("kind", tau.kind())
        .with("eta", tau.eta())
        .with("eta_prime", tau.eta_prime())
}

pub fn type_from_record(r: &Record) -> Result<TameType, CliError> {
    let p: u32 = r.parse_field("p")?;
    let f: u32 = r.parse_field("f")?;
    let kind: TypeKind = r.get("kind")?.parse()?;
    let level = kind.level(f);
    let eta = CharExp::new(p, level, r.parse_field::<i64>("eta")?)?;
    let eta_prime = CharExp::new(p, level, r.parse_field::<i64>("eta_prime")?)?;
    Ok(make_type(p, f, kind, eta, eta_prime)?)
}

pub fn write_module(m: &BKModule) -> String {
    let mut out = format!("# {MODULE_VERSION}\n");
    let field = m.field();
    out += &type_record(m.tau()).with("degree", field.degree()).with("field", field.modulus_string()).to_string();
    out.push('\n');
    for (i, c) in m.coeffs().iter().enumerate() {
        let rec = Record::new("matrix")
            .with("i", i)
            .with("a", series_token(c.get(0, 0)))
            .with("b", series_token(c.get(0, 1)))
            .with("c", series_token(c.get(1, 0)))
            .with("d", series_token(c.get(1, 1)));
        out += &rec.to_string();
        out.push('\n');
    }
    out
}

pub fn read_module(text: &str) -> Result<BKModule, CliError> {
    let mut recs = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).map(|l| l.parse::<Record>());
    let head = recs.next().ok_or_else(|| CliError::Parse("empty module file".into()))??;
    let tau = type_from_record(&head)?;
    let degree: u32 = head.parse_field("degree").unwrap_or(1);
    let field = FiniteField::get(tau.p(), degree)?;
    let mut coeffs = Vec::new();
    for r in recs {
        let r = r?;
        if r.parse_field::<usize>("i")? != coeffs.len() {
            return Err(CliError::Parse("matrix records out of order".into()));
        }
        let s = |k: &str| parse_series(field, r.get(k)?);
        coeffs.push(VMat::new(s("a")?, s("b")?, s("c")?, s("d")?));
    }
    Ok(BKModule::new(tau, coeffs)?)
}
