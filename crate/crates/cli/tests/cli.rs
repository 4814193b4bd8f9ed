use std::process::Command;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tameshape::records::{parse_series, read_module, read_sweep, series_token, write_module, SweepRecord};
use tameshape::{run, sweep};
use tameshape_core::field::FiniteField;
use tameshape_core::phi::sample::{random_module, random_series};
use tameshape_core::tame::{TameType, TypeKind};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tameshape").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn hodge_record() {
    let (code, out, _) = call(&["hodge", "--p", "5", "--f", "2", "--gamma", "2,3", "--profile", "0"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(out.contains("hodge=((1,-1),(-3,-4))"), "{out}");
}

#[test]
fn forced_transition_is_a_usage_failure() {
    let (code, out, err) = call(&["find-type", "--p", "5", "--f", "1", "--r", "1,0", "--no-transition", "0"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("forced to be a transition"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["no-such-command"]).0, 2);
    assert_eq!(call(&["hodge", "--p", "5"]).0, 2);
    assert_eq!(call(&["hodge", "--p", "4", "--gamma", "1"]).0, 2);
    assert_eq!(call(&["find-type", "--p", "5", "--f", "2", "--r", "1,0"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn verify_passes_at_three_two() {
    let (code, out, _) = call(&["verify", "--p", "3", "--f", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().last().unwrap().starts_with("verify status=pass"));
    assert!(!out.contains("status=fail"));
}

#[test]
fn verify_at_five_one_exercises_the_exception() {
    let (code, out, _) = call(&["verify", "--p", "5", "--f", "1"]);
    assert_eq!(code, 0, "{out}");
    let line = out.lines().find(|l| l.contains("name=transition-exceptions")).unwrap();
    assert!(line.contains("status=pass"));
    assert!(!line.contains("cases=0 "));
}

#[test]
fn injected_fault_is_reported() {
    let (code, out, err) = call(&["verify", "--p", "3", "--f", "2", "--inject-fault"]);
    assert_eq!(code, 1);
    assert!(out.contains("check name=recipe-bounds status=fail"), "{out}");
    assert!(out.contains("counterexample check=recipe-bounds"));
    assert!(err.contains("recipe-bounds"));
}

#[test]
fn sweep_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.txt");
    let (code, _, _) = call(&["sweep", "--p", "3", "--f", "2", "--out", path.to_str().unwrap(), "--jobs", "4"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# tameshape-records v1 p=3 f=2 "));
    let rows = read_sweep(&text).unwrap();
    assert_eq!(rows, sweep(3, 2, None, 1).unwrap());
    let again: String = rows.iter().map(|r| format!("{}\n", r.to_record())).collect();
    assert_eq!(text.split_once('\n').unwrap().1, again);
    let mut keys: Vec<_> = rows.iter().map(|r| (r.kind, r.eta, r.eta_prime, r.profile)).collect();
    let n = keys.len();
    keys.dedup();
    assert_eq!(keys.len(), n);
}

#[test]
fn sweep_record_parse() {
    let line = "sweep p=3 f=1 kind=cuspidal eta=2 eta_prime=6 profile=1 s=0,0 t=0,2 theta=1 bad= hodge=((0,-1)) p_tau=1";
    let rec = SweepRecord::from_record(&line.parse().unwrap()).unwrap();
    assert_eq!(rec.kind, TypeKind::Cuspidal);
    assert!(rec.bad.is_empty());
    assert_eq!(rec.to_record().to_string(), line);
}

#[test]
fn module_files_roundtrip_and_classify() {
    let k = FiniteField::get(5, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tau = TameType::from_gamma(5, TypeKind::Cuspidal, &[1, 3], 0).unwrap();
    let m = random_module(&tau, k, 12, &mut rng).unwrap();
    let text = write_module(&m);
    let back = read_module(&text).unwrap();
    assert_eq!(back, m);
    assert_eq!(write_module(&back), text);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    let p = path.to_str().unwrap();
    let (code, _, err) = call(&["--seed", "9", "sample", "--p", "3", "--gamma", "1,2", "--profile", "1", "--out", p]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = call(&["shape", "--file", p]);
    assert_eq!(code, 0);
    let comps = out.lines().last().unwrap();
    assert!(comps.contains("profiles=") && comps.contains('2'), "{out}");
    let (code, out, _) = call(&["descend", "--file", p, "--profile", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("descended")).count(), 2);
}

#[test]
fn ext_actions() {
    let base = ["ext", "--p", "3", "--gamma", "1,2", "--profile", "0"];
    let with = |extra: &[&str]| call(&[&base[..], extra].concat());
    let (code, out, _) = with(&["--action", "kext"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("kext dimension=1 expected=1 consistent=1"), "{out}");
    let (code, out, _) = with(&["--action", "split", "--h", "0,0"]);
    assert_eq!(code, 0);
    assert!(out.contains("split=1"));
    let (code, out, _) = with(&["--action", "build", "--h", "1,1"]);
    assert_eq!(code, 0);
    assert!(read_module(&out).is_ok());
}

#[test]
fn precision_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_tameshape"))
        .args(["sample", "--p", "3", "--gamma", "1,2"])
        .env("TAMESHAPE_PRECISION", "7")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("@7"), "{text}");
    assert!(!text.contains("@64"));
}

proptest! {
    #[test]
    fn series_tokens_roundtrip(seed in any::<u64>(), prec in 1i64..30, degree in 1u32..=2) {
        let k = FiniteField::get(3, degree).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_series(k, prec, &mut rng);
        let tok = series_token(&x);
        prop_assert_eq!(parse_series(k, &tok).unwrap(), x);
    }
}
