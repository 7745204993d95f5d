use std::path::PathBuf;
use std::process::{Command, Output};

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

fn opmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opmc")).args(args).output().expect("run opmc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_the_bundled_instances() {
    for name in ["ass_z2.instance", "ass_z.instance", "e1_z2.instance"] {
        let o = opmc(&["validate", path(&instance(name))]);
        assert!(o.status.success(), "{name}: {}", stdout(&o));
        assert!(!stdout(&o).contains("[FAIL]"));
    }
}

#[test]
fn char_two_mc_set() {
    let ass = instance("ass_z2.instance");
    let o = opmc(&["mc", path(&ass), "--enumerate"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "{0, x}");
    let o = opmc(&["mc", path(&instance("ass_z.instance")), "--element", "x"]);
    assert!(stdout(&o).contains("residual: 2·y"));
    assert!(stdout(&o).contains("maurer-cartan: no"));
}

#[test]
fn twisting_by_zero_is_the_identity() {
    for name in ["ass_z.instance", "e1_z2.instance"] {
        let exported = opmc(&["export", path(&instance(name))]);
        let twisted = opmc(&["twist", path(&instance(name)), "--element", "0"]);
        assert!(twisted.status.success());
        assert_eq!(stdout(&exported), stdout(&twisted));
    }
}

#[test]
fn export_is_a_fixed_point_and_deterministic() {
    let src = instance("e1_z2.instance");
    let first = opmc(&["export", path(&src)]);
    assert_eq!(stdout(&first), stdout(&opmc(&["export", path(&src)])));
    let out = scratch("export.instance");
    std::fs::write(&out, first.stdout.clone()).unwrap();
    assert_eq!(stdout(&first), stdout(&opmc(&["export", path(&out)])));
}

#[test]
fn twisted_instance_round_trips() {
    let out = scratch("twisted.instance");
    let o = opmc(&["twist", path(&instance("ass_z.instance")), "--element", "x", "--output", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = opmc(&["validate", path(&out)]);
    assert!(v.status.success());
    assert!(stdout(&v).contains("curvature: 2·y"));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout(&opmc(&["export", path(&out)])));
}

#[test]
fn weight_violation_is_a_completeness_error() {
    let text = std::fs::read_to_string(instance("ass_z.instance")).unwrap();
    // y drops to weight 1, below the weight 2 of x ⊗ x
    let bad = text.replace(r#""degree": -1, "weight": 2"#, r#""degree": -1, "weight": 1"#);
    assert_ne!(bad, text);
    let out = scratch("bad_weight.instance");
    std::fs::write(&out, bad).unwrap();
    let o = opmc(&["validate", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[completeness]"), "{}", stderr(&o));
}

#[test]
fn horn_filler_is_reverifiable() {
    let e1 = instance("e1_z2.instance");
    let horn = scratch("horn.json");
    std::fs::write(
        &horn,
        r#"{ "schema": "opmc-simplex/1", "n": 2, "k": 0,
             "values": { "e0": {"x":"1"}, "e1": {"x":"1"}, "e2": {"x":"1"}, "e01": {"a":"1"} } }"#,
    )
    .unwrap();
    let filled = scratch("filled.json");
    let o = opmc(&["horn-fill", path(&e1), "--n", "2", "--k", "0", "--horn", path(&horn), "--output", path(&filled)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let check = opmc(&["mc-simplicial", path(&e1), "--n", "2", "--simplex", path(&filled)]);
    assert!(check.status.success());
    let text = stdout(&check);
    assert!(text.contains("maurer-cartan: yes"));
    // the filler restricts back to the horn on d1 and d2
    assert!(text.contains("d1: e0 ↦ x, e1 ↦ x\n"));
    assert!(text.contains("d2: e0 ↦ x, e1 ↦ x, e01 ↦ a\n"));
}

#[test]
fn horn_with_a_foreign_face_is_rejected() {
    let horn = scratch("foreign.json");
    std::fs::write(&horn, r#"{ "schema": "opmc-simplex/1", "n": 2, "values": { "e12": {"a":"1"} } }"#).unwrap();
    let o = opmc(&["horn-fill", path(&instance("e1_z2.instance")), "--n", "2", "--k", "0", "--horn", path(&horn)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[shape]"));
}

#[test]
fn kan_check_is_reproducible() {
    let e1 = instance("e1_z2.instance");
    let a = opmc(&["kan-check", path(&e1), "--trials", "8", "--seed", "7"]);
    assert!(a.status.success());
    assert!(stdout(&a).starts_with("attempted 8 filled 8"));
    assert_eq!(a.stdout, opmc(&["kan-check", path(&e1), "--trials", "8", "--seed", "7"]).stdout);
}

#[test]
fn simplicial_commands_need_barratt_eccles() {
    let o = opmc(&["mc-simplicial", path(&instance("ass_z2.instance")), "--n", "1", "--enumerate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[unsupported]"));
}

#[test]
fn decompose_simplex_is_deterministic() {
    let args = ["decompose-simplex", "--n", "2", "--max-arity", "2", "--max-dim", "1", "--face", "e01", "--arity", "2"];
    let a = opmc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, opmc(&args).stdout);
    assert!(stdout(&a).contains("1 (12)^ ⊗ e0 ⊗ e01\n"));
}

#[test]
fn errors_and_usage() {
    assert_eq!(opmc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(opmc(&["mc"]).status.code(), Some(2));
    let o = opmc(&["export", "does-not-exist.instance"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[io]: does-not-exist.instance"));
    let o = opmc(&["build-cooperad", "--builder", "com", "--max-arity", "3"]);
    assert!(stderr(&o).starts_with("error[ring-requirement]"));
    let o = opmc(&["mc", path(&instance("ass_z2.instance")), "--element", "z"]);
    assert!(stderr(&o).starts_with("error[parse]"));
}
