#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use regcalc_cli::dsl::tuple_text;
use regcalc_cli::{ingest_csv, parse_dsl, run, DslErrorKind, Workspace};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "rgl"))
        .collect();
    files.sort();
    files
}

fn load(path: &Path) -> Workspace {
    let mut ws = Workspace::default();
    ws.load(&fs::read_to_string(path).unwrap(), path.parent())
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    ws
}

fn cli(args: &[&str]) -> regcalc_cli::Outcome {
    run(std::iter::once("regcalc").chain(args.iter().copied()))
}

fn corpus_arg(name: &str) -> String {
    corpus().join(name).to_string_lossy().into_owned()
}

/// Oracle output for every term of a corpus file: a `term <name>` line
/// followed by the sorted tuples from brute-force evaluation.
fn oracle_expectations(ws: &Workspace) -> String {
    let m = ws.model().expect("file has a model");
    let mut s = String::new();
    for name in ws.terms().keys() {
        s.push_str(&format!("term {name}\n"));
        for t in common::naive_eval(m, &ws.term(name).unwrap()) {
            s.push_str(&tuple_text(&t));
            s.push('\n');
        }
    }
    s
}

fn expectation_path(file: &Path) -> PathBuf {
    let stem = file.file_stem().unwrap().to_string_lossy();
    corpus().join("expected").join(format!("{stem}.eval"))
}

#[test]
#[ignore = "rewrites the committed expectations"]
fn regenerate_eval_expectations() {
    for file in corpus_files() {
        let ws = load(&file);
        if ws.model().is_some() && !ws.terms().is_empty() {
            fs::write(expectation_path(&file), oracle_expectations(&ws)).unwrap();
        }
    }
}

#[test]
fn corpus_is_large_enough() {
    assert!(corpus_files().len() >= 20);
}

#[test]
fn corpus_printing_is_idempotent() {
    for file in corpus_files() {
        let ws = load(&file);
        let once = ws.to_string();
        let reparsed = parse_dsl(&once).unwrap_or_else(|e| panic!("{}: {e}\n{once}", file.display()));
        assert_eq!(reparsed.to_string(), once, "{}", file.display());
        for (name, w) in ws.diagrams() {
            assert_eq!(reparsed.diagram(name), Some(w), "{}: {name}", file.display());
        }
        for name in ws.terms().keys() {
            assert_eq!(reparsed.term(name), ws.term(name), "{}: {name}", file.display());
        }
    }
}

#[test]
fn eval_matches_committed_expectations() {
    let mut checked = 0;
    for file in corpus_files() {
        let path = expectation_path(&file);
        if !path.exists() {
            continue;
        }
        let expected = fs::read_to_string(&path).unwrap();
        let mut actual = String::new();
        let f = file.to_string_lossy();
        for name in load(&file).terms().keys() {
            let out = cli(&[&f, "eval", name]);
            assert_eq!(out.code, 0, "{f} {name}: {}", out.stderr);
            actual.push_str(&format!("term {name}\n{}", out.stdout));
            checked += 1;
        }
        assert_eq!(actual, expected, "{f}");
    }
    assert!(checked >= 20, "only {checked} terms checked");
}

#[test]
fn committed_expectations_agree_with_the_oracle() {
    for file in corpus_files() {
        let path = expectation_path(&file);
        if path.exists() {
            let ws = load(&file);
            assert_eq!(fs::read_to_string(&path).unwrap(), oracle_expectations(&ws), "{}", path.display());
        }
    }
}

#[test]
fn exit_codes() {
    let breaking = corpus_arg("example_breaking.rgl");
    let rr = corpus_arg("composite_rr.rgl");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec![&breaking, "leq", "connected", "broken"], 0),
        (vec![&breaking, "leq", "broken", "connected"], 1),
        (vec![&breaking, "leq", "labelled", "plain"], 0),
        (vec![&breaking, "leq", "plain", "labelled"], 1),
        (vec![&breaking, "leq", "connected", "plain"], 2),
        (vec![&breaking, "eval", "connected"], 2),
        (vec![&rr, "contains", "composite_RR", "composite_RR"], 0),
        (vec![&rr, "contains", "R", "composite_RR"], 1),
        (vec![&rr, "entail", "composite_RR", "R"], 0),
        (vec![&rr, "entail", "R", "composite_RR"], 1),
        (vec![&rr, "eval", "composite_RR"], 0),
        (vec![&rr, "eval", "missing"], 2),
        (vec![&rr, "compose", "compose2", "0", "compose2"], 2),
        (vec![&rr, "validate"], 0),
        (vec!["/nonexistent/file.rgl", "validate"], 2),
        (vec![&rr, "frobnicate"], 2),
        (vec!["--help"], 0),
    ];
    for (args, code) in cases {
        let out = cli(&args);
        assert_eq!(out.code, code, "{args:?}: {}{}", out.stdout, out.stderr);
        if code == 2 {
            assert!(!out.stderr.is_empty(), "{args:?}");
        }
    }
}

#[test]
fn composite_of_single_pair_is_empty() {
    let out = cli(&[&corpus_arg("composite_rr.rgl"), "eval", "composite_RR"]);
    assert_eq!((out.code, out.stdout.as_str()), (0, ""));
}

#[test]
fn eval_json_schema() {
    let out = cli(&[&corpus_arg("paths.rgl"), "--json", "eval", "path2"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["context"], serde_json::json!(["node", "node"]));
    assert_eq!(v["support"], serde_json::json!(["node"]));
    let tuples: Vec<Vec<String>> = serde_json::from_value(v["tuples"].clone()).unwrap();
    assert!(tuples.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(tuples[0], ["n1", "n3"]);
}

#[test]
fn separate_model_file() {
    let out = cli(&[
        &corpus_arg("signature_only.rgl"),
        "--model",
        &corpus_arg("data/path_model.rgl"),
        "eval",
        "path2",
    ]);
    assert_eq!(out.stdout, "(n1, n3)\n(n2, n3)\n(n3, n3)\n");
    let out = cli(&[&corpus_arg("signature_only.rgl"), "eval", "path2"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("model"));
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.rgl");
    fs::write(
        &path,
        "type x;\ncontext G1 = (x, x, x);\ndiagram w : (G1) -> () {\n    dot d1 : x;\n    wire G1.4 -> d1;\n}\n",
    )
    .unwrap();
    let out = cli(&[path.to_str().unwrap(), "validate"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("bad.rgl:5:"), "{}", out.stderr);
}

#[test]
fn error_kinds() {
    let cases = [
        ("type x; type x;", DslErrorKind::Duplicate),
        ("type x; pred P : (y);", DslErrorKind::Undefined),
        ("type x; pred P : (x); context P = (x);", DslErrorKind::Duplicate),
        ("type x; diagram d = frob((x));", DslErrorKind::Undefined),
        ("type x; diagram d : ((x)) -> () { dot a : x; }", DslErrorKind::Invalid),
        ("type x; pred P : (x) relation", DslErrorKind::Syntax),
        ("type x; pred P : (x); diagram d : ((x, x)) -> () { dot a : x; wire 1.1, 1.2 -> a; } term t = d(P);", DslErrorKind::Invalid),
        ("type x; pred P : (x); domain x = {a}; relation P = {(a, a)};", DslErrorKind::Invalid),
        ("type x; domain x = {a, a};", DslErrorKind::Invalid),
        ("\"unterminated", DslErrorKind::Syntax),
    ];
    for (src, kind) in cases {
        let e = parse_dsl(src).unwrap_err();
        assert_eq!(e.kind, kind, "{src}: {e}");
    }
}

#[test]
fn csv_loading() {
    let dir = tempfile::tempdir().unwrap();
    let unary = dir.path().join("p.csv");
    fs::write(&unary, "b\na\nb\n").unwrap();
    let mut ws = parse_dsl("type x;\npred P : (x);\npred R : (x, x);\ndomain x = {a, b, c};\n").unwrap();
    assert_eq!(ingest_csv(&mut ws, "P", &unary).unwrap(), 2);
    assert_eq!(ingest_csv(&mut ws, "P", &unary).unwrap(), 0);
    assert_eq!(ws.model().unwrap().relation_of("P").unwrap().len(), 2);

    let bad = dir.path().join("r.csv");
    fs::write(&bad, "a,b\nb,c\nc,z\n").unwrap();
    let e = ingest_csv(&mut ws, "R", &bad).unwrap_err().to_string();
    assert!(e.contains("row 3") && e.contains("`z`"), "{e}");
    assert!(ws.model().unwrap().relation_of("R").unwrap().is_empty());

    let short = dir.path().join("s.csv");
    fs::write(&short, "a,b\nc\n").unwrap();
    assert!(ingest_csv(&mut ws, "R", &short).unwrap_err().to_string().contains("row 2"));
}

#[test]
fn csv_support_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    fs::write(&path, "a\n").unwrap();
    let mut ws = parse_dsl("type x, w;\npred P : (x) supp {w};\ndomain x = {a};\n").unwrap();
    let e = ingest_csv(&mut ws, "P", &path).unwrap_err().to_string();
    assert!(e.contains("support"), "{e}");
}

#[test]
fn loading_the_same_file_twice_in_source() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("e.csv"), "src,dst\na,b\n").unwrap();
    let src = "type x;\npred E : (x, x);\ndomain x = {a, b};\nload E \"e.csv\";\nload E \"e.csv\";\n";
    let mut ws = Workspace::default();
    ws.load(src, Some(dir.path())).unwrap();
    assert_eq!(ws.relations()["E"].len(), 1);
    assert!(ws.to_string().contains("relation E = {(a, b)};"));
}

#[test]
fn csv_corpus_file_loads_relative_paths() {
    let out = cli(&[&corpus_arg("csv_load.rgl"), "eval", "Link"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 4);
    assert!(out.stdout.contains("(Trondheim, E6, \"Mo i Rana\")"));
}

#[test]
fn dot_output() {
    let f = corpus_arg("example_morphism.rgl");
    let a = cli(&[&f, "dot", "omega"]);
    let b = cli(&[&f, "dot", "omega"]);
    assert_eq!(a, b);
    let dots = a.stdout.lines().filter(|l| l.trim_start().starts_with('d') && l.contains("fillcolor=black")).count();
    assert_eq!(dots, 7);
    assert!(a.stdout.contains("white [shape=circle, style=solid, label=\"{v, w}\"]"));
    let t = cli(&[&f, "dot", "psi"]);
    assert!(t.stdout.contains("label=\"1 T1\""));

    let id = cli(&[&corpus_arg("example_context.rgl"), "dot", "idG"]);
    assert_eq!(id.stdout.matches(" -- ").count(), 6);
    assert_eq!(id.stdout.matches("fillcolor=black").count(), 3);
}

#[test]
fn normalize_and_compose_print_reloadable_diagrams() {
    let f = corpus_arg("example_substitution.rgl");
    let out = cli(&[&f, "compose", "outer", "1", "inner"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut ws = load(Path::new(&f));
    ws.load(&out.stdout, None).unwrap();
    assert_eq!(ws.diagram("composite"), ws.diagram("nested"));

    let out = cli(&[&f, "normalize", "chained"]);
    let src = format!("type x, y, z;\ncontext A = (x, y);\ncontext B = (x);\n{}", out.stdout);
    let reparsed = parse_dsl(&src).unwrap();
    assert_eq!(reparsed.diagram("chained"), ws.diagram("chained"));
    assert_eq!(ws.diagram("chained").unwrap().white_labels().len(), 1);
}

#[test]
fn minimize_output_is_equivalent() {
    let f = corpus_arg("minimize_redundant.rgl");
    let out = cli(&[&f, "minimize", "q"]);
    let mut ws = load(Path::new(&f));
    ws.load(&out.stdout, None).unwrap();
    let core = ws.term("q_core").unwrap();
    assert_eq!(core.cells().len(), 1);
    assert_eq!(cli(&[&f, "contains", "q", "core"]).code, 0);
    assert_eq!(cli(&[&f, "contains", "core", "q"]).code, 0);
    let out = cli(&[&f, "minimize", "q2"]);
    assert!(out.stdout.contains("term q2_core = q2_core_wiring(E, E);"));
}

#[test]
fn formula_rendering() {
    let out = cli(&[&corpus_arg("composite_rr.rgl"), "formula", "composite_RR"]);
    assert_eq!(out.stdout, "(v1:x, v3:x) ↦ ∃v2:x. R(v1,v2) ∧ R(v2,v3)\n");
}

#[test]
fn axioms_and_fundamental_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.rgl");
    fs::write(
        &path,
        "type x, y;\npred R : (x, y);\ndomain x = {0, 1};\ndomain y = {a};\nrelation R = {(0, a)};\n",
    )
    .unwrap();
    let f = path.to_str().unwrap();
    let out = cli(&[f, "--bound", "1", "axioms"]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 10);

    let out = cli(&[f, "fundamental", "x", "y"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    // subsets of a 2 × 1 product, and the single map into a singleton
    assert_eq!(v["relations"], 4);
    assert_eq!(v["functions"], 1);
    assert_eq!(cli(&[f, "fundamental", "x", "q"]).code, 2);
}

#[test]
fn binary_follows_the_exit_contract() {
    let bin = env!("CARGO_BIN_EXE_regcalc");
    let breaking = corpus_arg("example_breaking.rgl");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&[&breaking, "leq", "connected", "broken"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "holds\n");
    assert_eq!(status(&[&breaking, "leq", "broken", "connected"]).status.code(), Some(1));
    let err = status(&[&breaking, "leq", "nothing", "broken"]);
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).contains("nothing"));
}
