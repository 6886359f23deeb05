//! Golden-file tests for the command-line front end. Each case stores the
//! exit code, stdout and stderr. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::{Path, PathBuf};

use quadratize::cli;

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(sub)
}

/// Arguments naming a fixture are written as `@name`.
fn invoke(args: &[&str]) -> String {
    let mut argv = vec!["quadratize".to_string()];
    for a in args {
        argv.push(match a.strip_prefix('@') {
            Some(name) => dir("fixtures").join(name).to_string_lossy().into_owned(),
            None => a.to_string(),
        });
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(&argv, &mut out, &mut err);
    let err = String::from_utf8(err).unwrap().replace(
        &dir("fixtures").to_string_lossy().into_owned(),
        "<fixtures>",
    );
    format!(
        "exit {code}\n--- stdout\n{}--- stderr\n{err}",
        String::from_utf8(out).unwrap()
    )
}

fn golden(name: &str, args: &[&str]) {
    let got = invoke(args);
    let path = dir("golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &got).unwrap();
        return;
    }
    let want = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(
        got,
        want,
        "output of {args:?} differs from {}",
        path.display()
    );
}

#[test]
fn check() {
    golden("check_g6", &["check", "@g6.pbf"]);
    golden("check_pos_pair", &["check", "@pos_pair.pbf"]);
}

#[test]
fn minimize() {
    golden("minimize_quad", &["minimize", "@quad.pbf"]);
    golden("minimize_not_submodular", &["minimize", "@pos_pair.pbf"]);
    golden("minimize_not_quadratic", &["minimize", "@g6.pbf"]);
}

#[test]
fn reduce() {
    golden("reduce_g6", &["reduce", "@g6.pbf", "--k", "3"]);
    golden(
        "reduce_neg_cubic_file_tables",
        &[
            "reduce",
            "@neg_cubic.pbf",
            "--k",
            "3",
            "--mbfs",
            "@at_least_two.txt",
        ],
    );
    golden("reduce_g10_generators", &["reduce", "@g10.pbf", "--k", "4"]);
    golden(
        "reduce_all_needs_flag",
        &["reduce", "@g10.pbf", "--k", "4", "--mbfs", "all"],
    );
    golden("reduce_k_too_small", &["reduce", "@g10.pbf", "--k", "3"]);
    golden(
        "reduce_dump_lp",
        &[
            "reduce",
            "@neg_cubic.pbf",
            "--k",
            "3",
            "--mbfs",
            "@at_least_two.txt",
            "--dump-lp",
        ],
    );
}

#[test]
fn nearest_and_overestimate() {
    golden(
        "nearest_g10",
        &["nearest", "@g10.pbf", "--k", "4", "--mbfs", "generators"],
    );
    golden(
        "overestimate_g10",
        &["overestimate", "@g10.pbf", "--k", "4"],
    );
    golden(
        "overestimate_neg_cubic_anchor",
        &[
            "overestimate",
            "@neg_cubic.pbf",
            "--k",
            "3",
            "--anchor",
            "1,2,3",
        ],
    );
}

#[test]
fn reduce4() {
    golden("reduce4_g6", &["reduce4", "@g6.pbf"]);
    golden("reduce4_g10", &["reduce4", "@g10.pbf"]);
    golden("reduce4_g10_nearest", &["reduce4", "@g10.pbf", "--nearest"]);
    golden("reduce4_not_submodular", &["reduce4", "@pos_pair.pbf"]);
    golden("reduce4_dump_lp", &["reduce4", "@g6.pbf", "--dump-lp"]);
}

#[test]
fn verify() {
    golden(
        "verify_pass",
        &["verify", "@neg_cubic.pbf", "@neg_cubic_h.pbf", "--avs", "1"],
    );
    golden(
        "verify_fail",
        &["verify", "@neg_cubic.pbf", "@zero.pbf", "--avs", "0"],
    );
}

#[test]
fn tables() {
    golden("mbf_count_4", &["mbf-count", "4"]);
    golden("mbf_count_6", &["mbf-count", "6"]);
    golden("mbf_dump_2", &["mbf-dump", "2"]);
}

#[test]
fn gen_table() {
    golden("gen_table_g9", &["gen-table", "9", "1", "3", "2", "4"]);
    golden("gen_table_g10", &["gen-table", "10", "4", "3", "2", "1"]);
    golden(
        "gen_table_bad_group",
        &["gen-table", "11", "1", "2", "3", "4"],
    );
    golden(
        "gen_table_bad_pattern",
        &["gen-table", "2", "1", "1", "3", "4"],
    );
}

#[test]
fn input_errors() {
    golden("parse_error_coefficient", &["check", "@bad_coef.pbf"]);
    golden("parse_error_index", &["check", "@bad_index.pbf"]);
    golden("missing_file", &["check", "@absent.pbf"]);
    golden("unknown_flag", &["check", "@g6.pbf", "--fast"]);
}

#[test]
fn output_is_stable_across_runs() {
    let args = ["reduce", "@g6.pbf", "--k", "3"];
    assert_eq!(invoke(&args), invoke(&args));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_quadratize");
    let run = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap();
    let ok = run(&["mbf-count", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "RESULT count=168\n");
    let g10 = dir("fixtures").join("g10.pbf");
    let no = run(&["reduce4", g10.to_str().unwrap()]);
    assert_eq!(no.status.code(), Some(2));
    assert_eq!(
        String::from_utf8_lossy(&no.stdout),
        "RESULT representable=false\n"
    );
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
}
