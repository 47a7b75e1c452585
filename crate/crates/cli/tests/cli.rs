use bv_core::{parse_structure, Prover, RuleId, System};
use std::io::Write;
use std::process::{Command, Stdio};

fn bv(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_bv"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn accepted(cert: &str) {
    let (code, out, err) = bv(&["check"], Some(cert));
    assert_eq!(code, 0, "{out}{err}");
}

#[test]
fn prove_interaction() {
    let (code, out, _) = bv(&["prove", "[a,~a]", "--system", "BV", "--format", "json"], None);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
    accepted(&out);
}

#[test]
fn prove_negative_and_unknown() {
    assert_eq!(bv(&["prove", "[a,b]"], None).0, 1);
    assert_eq!(bv(&["prove", "[a,b]", "--system", "SBV"], None).0, 2);
}

#[test]
fn derive_separation() {
    let args = ["derive", "--from", "(<a;c>,b)", "--to", "<(a,b);c>"];
    assert_eq!(bv(&[&args[..], &["--system", "q↓,s"]].concat(), None).0, 1);
    let (code, out, _) = bv(&[&args[..], &["--system", "q↑", "--format", "json"]].concat(), None);
    assert_eq!(code, 0);
    accepted(&out);
}

#[test]
fn derive_needs_bound_when_growing() {
    assert_eq!(bv(&["derive", "--from", "o", "--to", "[a,~a]", "--system", "ai↑,s"], None).0, 3);
}

#[test]
fn merge_listing() {
    let (code, out, _) = bv(&["merge", "[a,b]", "[c,d]"], None);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(!lines.contains(&"[<a;c>,<b;d>]"));
    assert!(lines.contains(&"[a,b,c,d]"));
    let mut sorted: Vec<_> = lines.iter().map(|l| parse_structure(l).unwrap()).collect();
    sorted.sort();
    let printed: Vec<String> = sorted.iter().map(|s| s.to_string()).collect();
    assert_eq!(printed, lines);
    let (_, sem, _) = bv(&["merge", "[a,b]", "[c,d]", "--semantic"], None);
    assert_eq!(sem, out);
}

#[test]
fn web_roundtrip() {
    for s in ["<a;[b,~c]>", "[a,b,(~b,[(~a,c),~c])]", "a"] {
        let (code, web, _) = bv(&["web", s, "--format", "json"], None);
        assert_eq!(code, 0);
        let (code, back, _) = bv(&["reconstruct"], Some(&web));
        assert_eq!(code, 0);
        assert_eq!(back.trim(), parse_structure(s).unwrap().to_string());
    }
}

#[test]
fn reconstruct_rejects_bad_web() {
    let web = r#"{"occurrences":[{"index":0,"name":"a","polarity":"positive"},{"index":1,"name":"b","polarity":"positive"},
        {"index":2,"name":"c","polarity":"positive"},{"index":3,"name":"d","polarity":"positive"}],
        "pairs":[{"i":0,"j":1,"rel":"par"},{"i":1,"j":2,"rel":"par"},{"i":2,"j":3,"rel":"par"},
        {"i":0,"j":2,"rel":"copar"},{"i":0,"j":3,"rel":"copar"},{"i":1,"j":3,"rel":"copar"}]}"#;
    assert_eq!(bv(&["reconstruct"], Some(web)).0, 1);
}

#[test]
fn split_outputs_check() {
    let (code, out, _) = bv(&["split", "a", "~b", "[~a,b]", "--kind", "copar", "--format", "json"], None);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for k in ["bridge", "left_proof", "right_proof"] {
        accepted(&v[k].to_string());
    }
    assert_eq!(bv(&["split", "a", "b", "o"], None).0, 1);
}

#[test]
fn eliminate_up_roundtrip() {
    let s = parse_structure("[<(a,b);c>,~b,<~a;~c>]").unwrap();
    let proof = Prover::new(System::bv().with(&[RuleId::QUp])).prove_with_up(&s).unwrap();
    assert!(proof.count(RuleId::QUp) > 0);
    let cert = serde_json::to_string(&proof.to_json("BV,q↑")).unwrap();
    accepted(&cert);
    let (code, out, _) = bv(&["eliminate-up", "--format", "json"], Some(&cert));
    assert_eq!(code, 0);
    assert!(!out.contains('↑'));
    let (code, _, _) = bv(&["check", "--system", "BV"], Some(&out));
    assert_eq!(code, 0);
}

#[test]
fn check_rejects_tampered_certificate() {
    let (_, out, _) = bv(&["prove", "[a,b,(~b,[(~a,c),~c])]", "--format", "json"], None);
    let mut v: serde_json::Value = serde_json::from_str(&out).unwrap();
    v["conclusion"] = "[a,b,(~b,[(~a,c),c])]".into();
    assert_eq!(bv(&["check"], Some(&v.to_string())).0, 1);
    let (_, seq, _) = bv(&["prove", "[<a;b>,<~a;~b>]", "--format", "json"], None);
    accepted(&seq);
    assert_eq!(bv(&["check", "--system", "FBV"], Some(&seq)).0, 1);
}

#[test]
fn mll_commands() {
    let seq = "|- a | (b | (~b * ((~a * c) | ~c)))";
    let (code, out, _) = bv(&["mll-prove", seq, "--format", "json"], None);
    assert_eq!(code, 0);
    accepted(&out);
    let (code, out, _) = bv(&["mll-prove", seq, "--simulate", "--format", "json"], None);
    assert_eq!(code, 0);
    assert!(out.contains("\"system\": \"FBV\""));
    accepted(&out);
    assert_eq!(bv(&["mll-prove", "|- a * ~a"], None).0, 1);
    assert_eq!(bv(&["mll-prove", "|- 1 * 1, bot"], None).0, 3);
    assert_eq!(bv(&["mll-prove", "|- 1 * 1, bot", "--units"], None).0, 0);
    let (_, s, _) = bv(&["translate", "|- a * b, ~a"], None);
    assert_eq!(s.trim(), "[~a,(a,b)]");
    let (_, f, _) = bv(&["translate", "--reverse", "[(a,b),~c]"], None);
    let (_, again, _) = bv(&["translate", f.trim()], None);
    assert_eq!(again.trim(), "[~c,(a,b)]");
    assert_eq!(bv(&["translate", "--reverse", "<a;b>"], None).0, 1);
}

#[test]
fn equiv_and_consistency() {
    assert_eq!(bv(&["equiv", "<a;[o,b]>", "<a;b>"], None).0, 0);
    assert_eq!(bv(&["equiv", "<a;b>", "<b;a>"], None).0, 1);
    assert_eq!(bv(&["consistency", "[a,~a]"], None).0, 0);
    assert_eq!(bv(&["consistency", "o"], None).0, 0);
}

#[test]
fn usage_errors() {
    assert_eq!(bv(&["prove", "[a,"], None).0, 3);
    let (code, _, err) = bv(&["prove", "[a,"], None);
    assert_eq!(code, 3);
    assert!(err.contains("column"));
    assert_eq!(bv(&["frobnicate"], None).0, 3);
    assert_eq!(bv(&["prove", "a", "--system", "nonsense"], None).0, 3);
    assert_eq!(bv(&["suite", "--only", "11"], None).0, 3);
    assert_eq!(bv(&["--help"], None).0, 0);
}

#[test]
fn suite_report_is_stable() {
    let args = ["suite", "--max-size", "3", "--only", "1,2,7", "--format", "json"];
    let (code, first, _) = bv(&args, None);
    assert_eq!(code, 0);
    let (_, second, _) = bv(&args, None);
    assert_eq!(first, second);
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 3);
}
