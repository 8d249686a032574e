use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&d).unwrap();
    d.join(name)
}

fn gos<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_gos")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json", "-"];
    all.extend_from_slice(args);
    serde_json::from_slice(&gos(all).stdout).unwrap()
}

#[test]
fn commutator_is_not_primitive() {
    let o = gos(["primitive", "abAB", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "not primitive, minimal length 4");
    let o = gos(["primitive", "abb", "2"]);
    assert_eq!(stdout(&o).trim(), "primitive");
}

#[test]
fn theorem_on_ab_squared() {
    let o = gos([Path::new("theorem").as_os_str(), corpus("root-ab-k2.json").as_os_str()]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("edge spaces: trees"), "{s}");
    assert!(s.contains("factor: ⟨ab⟩ primitive"), "{s}");
}

#[test]
fn corollary_on_conjugate_generators() {
    let o = gos([Path::new("corollary").as_os_str(), corpus("hnn-tat-b.json").as_os_str()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("F = ⟨bAB⟩ * ⟨a⟩"), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    let run = |cmd: &str, file: &str| code(&gos([Path::new(cmd).as_os_str(), corpus(file).as_os_str()]));
    assert_eq!(run("validate", "malformed-cover.json"), 2);
    assert_eq!(run("validate", "identity-torus.json"), 0);
    assert_eq!(run("corollary", "root-ab-k2.json"), 2);
    assert_eq!(run("uot", "identity-torus.json"), 2);
    assert_eq!(run("theorem", "root-commutator-k2.json"), 2);
    let bad = scratch("truncated.json");
    fs::write(&bad, "{").unwrap();
    assert_eq!(code(&gos([Path::new("validate").as_os_str(), bad.as_os_str()])), 3);
    fs::write(&bad, r#"{"formatVersion": 99, "kind": "raw-gos", "payload": {}}"#).unwrap();
    assert_eq!(code(&gos([Path::new("validate").as_os_str(), bad.as_os_str()])), 3);
    assert_eq!(code(&gos(["gen", "--kind", "nonsense"])), 3);
}

#[test]
fn validate_reports_the_violation() {
    let o = gos([Path::new("validate").as_os_str(), corpus("malformed-cover.json").as_os_str()]);
    assert!(stdout(&o).starts_with("violation: "), "{}", stdout(&o));
}

#[test]
fn gen_is_deterministic_and_valid() {
    for kind in ["raw-gos", "adjoin-root", "union-of-trees"] {
        let a = gos(["gen", "--kind", kind, "--seed", "5"]);
        let b = gos(["gen", "--kind", kind, "--seed", "5"]);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{kind}");
        let f = scratch(&format!("gen-{kind}.json"));
        fs::write(&f, &a.stdout).unwrap();
        let o = gos([Path::new("validate").as_os_str(), f.as_os_str()]);
        assert_eq!(code(&o), 0, "{kind}: {}", stdout(&o));
    }
}

#[test]
fn reports_carry_a_rerunnable_instance() {
    for (cmd, file) in [
        ("theorem", "root-ab-k2.json"),
        ("corollary", "hnn-swap.json"),
        ("uot", "uot-tripod-fold.json"),
        ("minimize", "flip-torus.json"),
    ] {
        let path = corpus(file);
        let first = report(&[cmd, path.to_str().unwrap()]);
        let again = scratch(&format!("again-{file}"));
        fs::write(&again, serde_json::to_string(&first["instance"]).unwrap()).unwrap();
        let second = report(&[cmd, again.to_str().unwrap()]);
        assert_eq!(first["verdict"], second["verdict"], "{cmd}");
        assert_eq!(first["summary"], second["summary"], "{cmd}");
        assert_eq!(first["claims"], second["claims"], "{cmd}");
        assert_eq!(first["instance"], second["instance"], "{cmd}");
    }
}

#[test]
fn timings_only_on_request() {
    let path = corpus("identity-torus.json");
    let plain = report(&["validate", path.to_str().unwrap()]);
    assert!(plain.get("timingsMs").is_none());
    let timed = report(&["--timings", "validate", path.to_str().unwrap()]);
    assert!(timed["timingsMs"]["total"].is_u64());
}

#[test]
fn corank_search_bounds() {
    let path = corpus("root-commutator-k2.json");
    let o = gos([Path::new("corank-search").as_os_str(), "--max-length".as_ref(), "4".as_ref(), path.as_os_str()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("none up to length 4"), "{}", stdout(&o));
    let o = gos([Path::new("corank-search").as_os_str(), corpus("root-ab-k2.json").as_os_str()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("witness: a ↦"), "{}", stdout(&o));
}

#[test]
fn dot_side_files() {
    let dir = scratch("dot");
    let _ = fs::remove_dir_all(&dir);
    let o = gos([
        Path::new("--dot").as_os_str(),
        dir.as_os_str(),
        "cylinders".as_ref(),
        corpus("identity-torus.json").as_os_str(),
    ]);
    assert_eq!(code(&o), 0);
    let n = fs::read_dir(&dir).unwrap().count();
    assert!(n >= 1);
    for e in fs::read_dir(&dir).unwrap() {
        let body = fs::read_to_string(e.unwrap().path()).unwrap();
        assert!(body.trim_end().ends_with('}'));
    }
}

#[test]
fn word_oracles_are_green() {
    let o = gos(["oracle", "--module", "words"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 2);
    assert!(s.lines().all(|l| l.starts_with("ok")), "{s}");
}

#[test]
fn mutated_fold_is_pinpointed() {
    let o = gos(["oracle", "--module", "gos", "--fault", "mutated-fold"]);
    assert_eq!(code(&o), 1);
    let s = stdout(&o);
    let row = s.lines().find(|l| l.contains("round trip")).unwrap();
    assert!(row.starts_with("FAIL"), "{s}");
    assert!(row.contains("first failure: gos seed 0, vertex 0, J = [0]"), "{row}");
}
