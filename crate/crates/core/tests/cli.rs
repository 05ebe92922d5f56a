use std::fs;
use std::process::{Command, Output};

fn pathrule(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathrule")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = pathrule(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = pathrule(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, contents: &str) -> String {
        let p = self.dir.path().join(name);
        fs::write(&p, contents).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }
}

const TOY: &str = "a\tborn_in\tparis\na\tlives_in\tparis\nparis\tlocated_in\tfrance\n";

/// Five grandparent chains; the test asks for a sixth.
fn family(ws: &Workspace) -> (String, String) {
    let mut train = String::new();
    for i in 0..5 {
        train.push_str(&format!("p{i}\tparent\tc{i}\nc{i}\tparent\tg{i}\np{i}\tgrand\tg{i}\n"));
    }
    train.push_str("p5\tparent\tc5\nc5\tparent\tg5\n");
    (ws.file("train.txt", &train), ws.file("test.txt", "p5\tgrand\tg5\n"))
}

#[test]
fn minimal_mine_is_deterministic_and_tiny() {
    let ws = Workspace::new();
    let train = ws.file("toy.txt", TOY);
    let (a, b) = (ws.path("a.tsv"), ws.path("b.tsv"));
    ok(&["mine", "--train", &train, "--rules", &a, "--alpha", "1", "--max-len", "2"]);
    ok(&["mine", "--train", &train, "--rules", &b, "--alpha", "1", "--max-len", "2"]);
    let rules = fs::read_to_string(&a).unwrap();
    assert_eq!(rules, fs::read_to_string(&b).unwrap());
    assert_eq!(
        rules,
        "1\tborn_in\tlives_in\n1\tlives_in\tborn_in\n1\tINV_born_in\tINV_lives_in\n1\tINV_lives_in\tINV_born_in\n"
    );
}

#[test]
fn timing_report_fields() {
    let ws = Workspace::new();
    let train = ws.file("toy.txt", TOY);
    let timing = ws.path("t.json");
    ok(&["mine", "--train", &train, "--rules", &ws.path("r.tsv"), "--timing-out", &timing]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(timing).unwrap()).unwrap();
    for key in ["wall_seconds", "load_seconds", "mine_seconds", "normalize_seconds"] {
        assert!(v[key].as_f64().unwrap() >= 0.0, "{key}");
    }
    assert_eq!(v["facts_sampled"], 6);
    assert_eq!(v["rules_found"], 4);
}

#[test]
fn perfect_rules_give_perfect_metrics() {
    let ws = Workspace::new();
    let (train, test) = family(&ws);
    let (rules, metrics) = (ws.path("r.tsv"), ws.path("m.json"));
    ok(&["mine", "--train", &train, "--rules", &rules]);
    let table = ok(&["eval", "--train", &train, "--test", &test, "--rules", &rules, "--metrics-out", &metrics]);
    assert!(table.contains("MRR"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(metrics).unwrap()).unwrap();
    assert_eq!(v["mrr"], 1.0);
    assert_eq!(v["hits"]["1"], 1.0);
    assert_eq!(v["hits"]["10"], 1.0);
    assert_eq!(v["queries"], 2);
    assert_eq!(v["config"]["top_k"], 300);
}

#[test]
fn both_aggregation_modes_run() {
    let ws = Workspace::new();
    let (train, test) = family(&ws);
    let rules = ws.path("r.tsv");
    ok(&["mine", "--train", &train, "--rules", &rules]);
    for mode in ["sum", "max"] {
        let out = ws.path(&format!("{mode}.json"));
        ok(&["eval", "--train", &train, "--test", &test, "--rules", &rules, "--mode", mode, "--metrics-out", &out]);
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
        let mrr = v["mrr"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&mrr));
        assert_eq!(v["config"]["mode"], mode);
    }
}

#[test]
fn unknown_relations_are_listed() {
    let ws = Workspace::new();
    let (train, test) = family(&ws);
    let rules = ws.file("r.tsv", "0.5\tgrand\tparent,cousin\n0.2\tsibling\tparent\n");
    let err = fails(&["eval", "--train", &train, "--test", &test, "--rules", &rules]);
    assert!(err.contains("cousin") && err.contains("sibling"), "{err}");
}

#[test]
fn missing_input_and_unwritable_output_fail() {
    let ws = Workspace::new();
    let err = fails(&["mine", "--train", &ws.path("absent.txt"), "--rules", &ws.path("r.tsv")]);
    assert!(err.contains("absent.txt"), "{err}");
    let train = ws.file("toy.txt", TOY);
    let err = fails(&["mine", "--train", &train, "--rules", &ws.path("no/such/dir/r.tsv")]);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn malformed_input_reports_line() {
    let ws = Workspace::new();
    let train = ws.file("bad.txt", "a\tr\tb\nonly two\n");
    let err = fails(&["mine", "--train", &train, "--rules", &ws.path("r.tsv")]);
    assert!(err.contains('2'), "{err}");
}

#[test]
fn unknown_flags_fail() {
    fails(&["mine", "--lenght", "3"]);
    fails(&["frobnicate"]);
    fails(&["mine", "--alpha", "0", "--train", "x", "--rules", "y"]);
}

#[test]
fn help_documents_every_flag() {
    let help = ok(&["mine", "--help"]);
    for flag in [
        "--config",
        "--train",
        "--valid",
        "--test",
        "--columns",
        "--rules",
        "--max-len",
        "--alpha",
        "--beta",
        "--answer-cap",
        "--top-k",
        "--mode",
        "--seed",
        "--path-weight",
        "--workers",
        "--timing-out",
    ] {
        let line = help.lines().position(|l| l.contains(flag)).unwrap_or_else(|| panic!("{flag} missing"));
        let doc = help.lines().nth(line + 1).unwrap_or("");
        assert!(!doc.trim().is_empty(), "{flag} undocumented");
    }
    for sub in ["mine", "eval", "sweep", "ablate", "explain"] {
        assert!(ok(&["--help"]).contains(sub));
        ok(&[sub, "--help"]);
    }
}

#[test]
fn flags_override_config_file() {
    let ws = Workspace::new();
    let (train, _) = family(&ws);
    let config = ws.file("run.toml", &format!("train = {train:?}\nmax_len = 1\nrules = {:?}\n", ws.path("r.tsv")));
    ok(&["mine", "--config", &config]);
    let short = fs::read_to_string(ws.path("r.tsv")).unwrap();
    assert!(!short.contains("parent,parent"), "{short}");

    ok(&["mine", "--config", &config, "--max-len", "2"]);
    let long = fs::read_to_string(ws.path("r.tsv")).unwrap();
    assert!(long.contains("1\tgrand\tparent,parent"), "{long}");
}

#[test]
fn bad_config_fails() {
    let ws = Workspace::new();
    let config = ws.file("run.toml", "max_lenght = 3\n");
    let err = fails(&["mine", "--config", &config]);
    assert!(err.contains("max_lenght"), "{err}");
}

#[test]
fn explain_names_rule_and_path() {
    let ws = Workspace::new();
    let (train, _) = family(&ws);
    let rules = ws.path("r.tsv");
    ok(&["mine", "--train", &train, "--rules", &rules]);
    let out = ok(&["explain", "--train", &train, "--rules", &rules, "--subject", "p5", "--relation", "grand"]);
    assert!(out.contains("g5\t1"), "{out}");
    assert!(out.contains("parent(x, z1) ∧ parent(z1, y) ⇒ grand(x, y)"), "{out}");
    assert!(out.contains("p5 -parent-> c5 -parent-> g5"), "{out}");

    let inverse = ok(&[
        "explain", "--train", &train, "--rules", &rules, "--subject", "g5", "--relation", "INV_grand", "--candidate", "p5",
    ]);
    assert!(inverse.contains("g5 -INV_parent-> c5 -INV_parent-> p5"), "{inverse}");
}

#[test]
fn sweep_and_ablate_write_csv() {
    let ws = Workspace::new();
    let (train, test) = family(&ws);
    let csv = ws.path("sweep.csv");
    ok(&["sweep", "--train", &train, "--test", &test, "--parameter", "alpha", "--values", "1,unlimited", "--out", &csv]);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "value,mrr,hits1,hits10");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("unlimited,"));

    let out = ok(&["ablate", "--train", &train, "--test", &test, "--budgets", "1,10"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "variant,k,mrr,hits1,hits10");
    assert_eq!(lines.len(), 1 + 3 * 2);
}

#[test]
fn column_order_is_respected() {
    let ws = Workspace::new();
    let train = ws.file("sor.txt", "a\tparis\tborn_in\na\tparis\tlives_in\n");
    let rules = ws.path("r.tsv");
    ok(&["mine", "--train", &train, "--rules", &rules, "--columns", "sor"]);
    assert!(fs::read_to_string(&rules).unwrap().contains("1\tborn_in\tlives_in"));
}
