//! End-to-end tests of the command-line interface, driving the built
//! binary on the checked-in definition files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(file)
        .display()
        .to_string()
}

fn treelang(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treelang"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = treelang(args);
    assert!(
        out.status.success(),
        "command failed: {:?}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn run_reports_state_and_acceptance() {
    let out = stdout_of(&[
        "run",
        "--file",
        &data("expressions.tl"),
        "--fta",
        "Mod4",
        "--tree",
        "+[+[0 7] *[2 *[7 3]]]",
    ]);
    assert_eq!(out, "state: 1\naccepted: yes\n");
}

#[test]
fn transduce_prints_the_derivative() {
    let out = stdout_of(&[
        "transduce",
        "--file",
        &data("derivative.tl"),
        "--ftt",
        "Deriv",
        "--tree",
        "*[+[a b] -[a]]",
    ]);
    assert_eq!(out, "+[*[+[1 0] -[a]] *[+[a b] -[1]]]\n");
}

#[test]
fn structural_equivalence_verdicts() {
    let file = data("grammars.tl");
    let yes = stdout_of(&[
        "struct-equiv",
        "--file",
        &file,
        "--cfg",
        "AnBn",
        "--cfg",
        "AnBnRenamed",
    ]);
    assert_eq!(yes, "yes\n");
    let no = stdout_of(&[
        "struct-equiv",
        "--file",
        &file,
        "--cfg",
        "AnBn",
        "--cfg",
        "AnBnSwapped",
    ]);
    assert_eq!(no, "no\n");
}

#[test]
fn decision_commands_answer_yes_or_no() {
    let file = data("combs.tl");
    assert_eq!(
        stdout_of(&["empty", "--file", &file, "--fta", "CombCheck"]),
        "no\nwitness: b[a a]\n"
    );
    assert_eq!(
        stdout_of(&["empty", "--file", &file, "--fta", "NoTrees"]),
        "yes\n"
    );
    assert_eq!(
        stdout_of(&["finite", "--file", &file, "--fta", "CombCheck"]),
        "no\n"
    );
    assert_eq!(
        stdout_of(&["subset", "--file", &file, "--fta", "NoTrees", "--fta", "CombCheck"]),
        "yes\n"
    );
    assert_eq!(
        stdout_of(&["equiv", "--file", &file, "--fta", "CombCheck", "--fta", "NoTrees"]),
        "no\n"
    );
}

#[test]
fn enumerate_prints_canonical_order() {
    let out = stdout_of(&[
        "enumerate",
        "--file",
        &data("combs.tl"),
        "--rtg",
        "Combs",
        "--max-height",
        "2",
    ]);
    assert_eq!(out, "a\nb[a a]\nb[a b[a a]]\n");
}

#[test]
fn pump_decomposes_a_comb() {
    let out = stdout_of(&[
        "pump",
        "--file",
        &data("combs.tl"),
        "--dfta",
        "CombCheck",
        "--tree",
        "b[a b[a b[a b[a a]]]]",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("outer: "));
    assert!(lines[1].starts_with("cycle: "));
    assert!(lines[2].starts_with("base: "));
}

#[test]
fn kleene_expression_of_the_comb_grammar() {
    let out = stdout_of(&["kleene", "--file", &data("combs.tl"), "--rtg", "Combs"]);
    assert_eq!(out, "((LIT{b[a S]} *S) .S LIT{a})\n");
}

#[test]
fn chain_and_target_decisions() {
    let file = data("doubling.tl");
    assert_eq!(
        stdout_of(&["chain-member", "--file", &file, "--chain", "Doubled", "--tree", "b[b[a a] b[a a]]"]),
        "yes\n"
    );
    assert_eq!(
        stdout_of(&["chain-member", "--file", &file, "--chain", "Doubled", "--tree", "b[a b[a a]]"]),
        "no\n"
    );
    assert_eq!(
        stdout_of(&["chain-empty", "--file", &file, "--chain", "DoubledEmpty"]),
        "yes\n"
    );
    assert_eq!(
        stdout_of(&["chain-finite", "--file", &file, "--chain", "Doubled"]),
        "no\n"
    );
    assert_eq!(
        stdout_of(&["target-member", "--file", &file, "--chain", "Doubled", "--word", "aaaa"]),
        "yes\n"
    );
    assert_eq!(
        stdout_of(&["target-member", "--file", &file, "--chain", "Doubled", "--word", "aaa"]),
        "no\n"
    );
    assert_eq!(
        stdout_of(&["target-finite", "--file", &file, "--chain", "Doubled"]),
        "no\n"
    );
    assert_eq!(
        stdout_of(&["target-empty", "--file", &file, "--chain", "DoubledEmpty"]),
        "yes\n"
    );
}

#[test]
fn lookahead_transducers_load_and_apply() {
    let out = stdout_of(&[
        "transduce",
        "--file",
        &data("tail.tl"),
        "--ftt",
        "TailCheckerLa",
        "--tree",
        "a[b[b[c]] c]",
    ]);
    assert_eq!(out, "a[b[b[c]]]\n");
    // bottom-up and look-ahead versions agree
    let out2 = stdout_of(&[
        "transduce",
        "--file",
        &data("tail.tl"),
        "--ftt",
        "TailChecker",
        "--tree",
        "a[b[b[c]] c]",
    ]);
    assert_eq!(out, out2);
}

#[test]
fn constructions_emit_parseable_blocks() {
    let out = stdout_of(&[
        "determinize",
        "--file",
        &data("doubling.tl"),
        "--fta",
        "AllSpines",
    ]);
    assert!(out.starts_with("dfta result {"));
    let out = stdout_of(&["domain", "--file", &data("tail.tl"), "--ftt", "TailChecker"]);
    assert!(out.starts_with("fta result {"));
    let out = stdout_of(&[
        "decompose",
        "--file",
        &data("derivative.tl"),
        "--ftt",
        "Deriv",
        "--scheme",
        "td_copy_hom_lt",
    ]);
    assert!(out.contains("map +/2 -> +[x1 x1 x2 x2]"));
}

#[test]
fn identical_invocations_produce_identical_bytes() {
    let args = [
        "determinize",
        "--file",
        &data("combs.tl"),
        "--fta",
        "CombCheck",
    ];
    let a = stdout_of(&args.clone());
    let b = stdout_of(&args);
    assert_eq!(a, b);
}

#[test]
fn error_reporting_uses_distinct_exit_codes() {
    // unknown name
    let out = treelang(&["empty", "--file", &data("combs.tl"), "--fta", "Nope"]);
    assert_eq!(out.status.code(), Some(5));
    // syntax error in a tree
    let out = treelang(&[
        "parse",
        "--tree",
        "b[a",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    // flag violation: converting a copying transducer linearly
    let out = treelang(&[
        "convert",
        "--file",
        &data("derivative.tl"),
        "--ftt",
        "Deriv",
        "--scheme",
        "nlt_to_nlb",
    ]);
    assert_eq!(out.status.code(), Some(6));
    // unknown rtg
    let out = treelang(&["normalize", "--file", &data("combs.tl"), "--rtg", "Nope"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn tree_utilities() {
    assert_eq!(
        stdout_of(&["parse", "--tree", "+[-[a -[b]] a]"]),
        "+[-[a -[b]] a]\n"
    );
    assert_eq!(stdout_of(&["yield", "--tree", "b[a b[a a]]"]), "aaa\n");
    assert_eq!(stdout_of(&["height", "--tree", "+[-[a -[b]] a]"]), "3\n");
    assert_eq!(
        stdout_of(&["paths", "--tree", "a[b a[c c]]"]),
        "aac\nab\n"
    );
}

#[test]
fn apply_hom_and_images() {
    let file = data("doubling.tl");
    assert_eq!(
        stdout_of(&["apply-hom", "--file", &file, "--hom", "Double", "--tree", "b[b[a]]"]),
        "b[b[a a] b[a a]]\n"
    );
    let out = stdout_of(&["classify", "--file", &file, "--ftt", "Doubler"]);
    assert!(out.contains("linear: no"));
    assert!(out.contains("total_deterministic: yes"));
}
