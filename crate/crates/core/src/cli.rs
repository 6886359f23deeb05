//! Command-line front end. Result lines start with `RESULT `; tables and
//! polynomials are printed in the plain-text format so outputs can be
//! compared byte for byte.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 not representable or
//! verification failure, 3 internal invariant breach.

use std::fs;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::mbf::{enumerate_mbfs, prune_mbf_set, AvParams, MbfTable};
use crate::oracle::{verify_reduction, VerificationReport};
use crate::pbf::{MultilinearPoly, QuadraticPoly, SubsetMask};
use crate::reduce_general::{
    build_reduction_lp, nearest_quadratic, overestimate, ProblemOptions, ReductionProblem,
    ReductionResult,
};
use crate::reduce_quartic::{
    build_quartic_lp, generator_catalog, nearest_quartic, reduce_quartic, JointQuadratic,
    QuarticFunction, QuarticReduction, PAIRS,
};

#[derive(Parser, Debug)]
#[command(
    name = "quadratize",
    version,
    about = "Reduce higher-order submodular functions to graph-cut quadratics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test a polynomial for submodularity.
    Check { file: String },
    /// Minimize a submodular quadratic by max-flow.
    Minimize { file: String },
    /// Exact reduction with one auxiliary per table; fails when the distance is positive.
    Reduce {
        file: String,
        #[command(flatten)]
        tables: TableArgs,
    },
    /// Closest representable function in L1 distance.
    Nearest {
        file: String,
        #[command(flatten)]
        tables: TableArgs,
    },
    /// Closest representable function that never lies below the input.
    Overestimate {
        file: String,
        #[command(flatten)]
        tables: TableArgs,
        /// Labeling (comma-separated 1-based indices) where the two must agree.
        #[arg(long, default_value = "")]
        anchor: String,
    },
    /// Two-auxiliary reduction of a function of four variables.
    Reduce4 {
        file: String,
        /// Report the nearest representable function instead of failing.
        #[arg(long)]
        nearest: bool,
        /// Write the program to stderr.
        #[arg(long)]
        dump_lp: bool,
    },
    /// Compare a function with the auxiliary minimum of a quadratic.
    Verify {
        f_file: String,
        h_file: String,
        /// Number of trailing variables of the quadratic that are auxiliary.
        #[arg(long)]
        avs: usize,
    },
    /// Number of monotone Boolean functions of k variables.
    MbfCount { k: usize },
    /// Every monotone table of k variables as a bit string (variable 1 is the low bit).
    MbfDump { k: usize },
    /// Print a generator row for a 1-based index pattern.
    GenTable {
        group: u8,
        #[arg(num_args = 4, required = true)]
        pattern: Vec<usize>,
    },
}

#[derive(clap::Args, Debug)]
struct TableArgs {
    /// Number of original variables.
    #[arg(long)]
    k: usize,
    /// `all`, `pruned`, `generators`, or a file of bit strings.
    #[arg(long)]
    mbfs: Option<String>,
    /// Lift the guard on the number of tables.
    #[arg(long)]
    allow_large: bool,
    /// Write the full flow program to stderr.
    #[arg(long)]
    dump_lp: bool,
}

/// Runs one command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let to_out = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if to_out {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            return 1;
        }
    };
    let (mut buf, mut diag) = (String::new(), String::new());
    let result = dispatch(cli.command, &mut buf, &mut diag);
    let _ = out.write_all(buf.as_bytes());
    let _ = err.write_all(diag.as_bytes());
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotRepresentable | Error::AnchorInfeasible => 2,
        Error::Invariant(_) => 3,
        _ => 1,
    }
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {path}: {e}")))
}

fn dispatch(cmd: Command, out: &mut String, diag: &mut String) -> Result<i32> {
    match cmd {
        Command::Check { file } => {
            let f = MultilinearPoly::parse(&read(&file)?, 0)?;
            line(out, format!("RESULT submodular={}", f.is_submodular()?));
            Ok(0)
        }
        Command::Minimize { file } => {
            let text = read(&file)?;
            let h = QuadraticPoly::parse(&text, 0, 0)?;
            let h = QuadraticPoly::parse(&text, h.n_vars(), 0)?;
            h.check_submodular()?;
            let (min, argmin) = crate::maxflow::minimize_quadratic(&h)?;
            line(out, format!("RESULT min={min}"));
            line(out, format!("RESULT argmin={}", index_list(argmin)));
            Ok(0)
        }
        Command::Reduce { file, tables } => {
            let p = problem(&file, &tables, diag)?;
            let r = nearest_quadratic(&p)?;
            print_reduction(out, &p, &r);
            Ok(if r.l1_distance.is_zero() { 0 } else { 2 })
        }
        Command::Nearest { file, tables } => {
            let p = problem(&file, &tables, diag)?;
            let r = nearest_quadratic(&p)?;
            print_reduction(out, &p, &r);
            Ok(0)
        }
        Command::Overestimate {
            file,
            tables,
            anchor,
        } => {
            let p = problem(&file, &tables, diag)?;
            let anchor = parse_index_list(&anchor, p.k())?;
            let r = overestimate(&p, anchor)?;
            line(out, format!("RESULT anchor={}", index_list(anchor)));
            print_reduction(out, &p, &r);
            Ok(0)
        }
        Command::Reduce4 {
            file,
            nearest,
            dump_lp,
        } => {
            let f = MultilinearPoly::parse(&read(&file)?, 4)?;
            let q = QuarticFunction::from_poly(&f)?;
            if dump_lp {
                diag.push_str(&build_quartic_lp(&q, !nearest)?.dump());
            }
            let result = if nearest {
                nearest_quartic(&q)
            } else {
                reduce_quartic(&q)
            };
            match result {
                Ok(r) => {
                    print_quartic(out, &r);
                    Ok(if r.distance.is_zero() { 0 } else { 2 })
                }
                Err(Error::NotRepresentable) => {
                    line(out, "RESULT representable=false".into());
                    Ok(2)
                }
                Err(e) => Err(e),
            }
        }
        Command::Verify {
            f_file,
            h_file,
            avs,
        } => {
            let f = MultilinearPoly::parse(&read(&f_file)?, 0)?;
            let h_text = read(&h_file)?;
            let width = QuadraticPoly::parse(&h_text, 0, 0)?.n_vars();
            let n_x = f.n_vars().max(width.saturating_sub(avs));
            let h = QuadraticPoly::parse(&h_text, n_x, avs)?;
            if h.n_vars() != n_x + avs {
                return Err(Error::Precondition(format!(
                    "quadratic uses {} variables, expected {} original and {avs} auxiliary",
                    h.n_vars(),
                    n_x
                )));
            }
            let report = verify_reduction(&f.with_n_vars(n_x)?, &h)?;
            print_report(out, &report);
            line(out, format!("RESULT l1_gap={}", report.l1_gap()));
            if let Some(m) = report.aux_states_monotone {
                line(out, format!("RESULT aux_states_monotone={m}"));
            }
            line(out, format!("RESULT pass={}", report.pass));
            Ok(if report.pass { 0 } else { 2 })
        }
        Command::MbfCount { k } => {
            line(out, format!("RESULT count={}", enumerate_mbfs(k)?.len()));
            Ok(0)
        }
        Command::MbfDump { k } => {
            let all = enumerate_mbfs(k)?;
            for t in &all {
                line(out, t.to_bit_string());
            }
            line(out, format!("RESULT count={}", all.len()));
            Ok(0)
        }
        Command::GenTable { group, pattern } => {
            let mut p = [0; 4];
            for (slot, &i) in p.iter_mut().zip(&pattern) {
                if !(1..=4).contains(&i) {
                    return Err(Error::InvalidGenerator(format!(
                        "index {i} (expected 1 to 4)"
                    )));
                }
                *slot = i - 1;
            }
            let e = generator_catalog(group, p)?;
            line(
                out,
                format!(
                    "# group {group}, pattern {}",
                    pattern
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
            );
            line(out, "# function".into());
            out.push_str(&e.function.to_text());
            match &e.quadratic {
                Some(h) => {
                    line(
                        out,
                        format!("# quadratic, auxiliaries from 5 ({} of them)", h.n_aux()),
                    );
                    out.push_str(&h.to_text());
                }
                None => line(out, "# no quadratic with auxiliaries".into()),
            }
            if let Some(printed) = &e.printed_function {
                line(out, "# function as originally printed".into());
                out.push_str(&printed.to_text());
            }
            line(
                out,
                format!("RESULT representable={}", e.quadratic.is_some()),
            );
            Ok(0)
        }
    }
}

fn line(out: &mut String, s: String) {
    out.push_str(&s);
    out.push('\n');
}

fn problem(file: &str, t: &TableArgs, diag: &mut String) -> Result<ReductionProblem> {
    let f = MultilinearPoly::parse(&read(file)?, t.k)?;
    if f.n_vars() > t.k {
        return Err(Error::Precondition(format!(
            "input uses variable {} but --k is {}",
            f.n_vars(),
            t.k
        )));
    }
    let tables = table_set(t)?;
    let options = ProblemOptions {
        allow_degenerate: false,
        allow_large: t.allow_large,
    };
    let p = ReductionProblem::with_options(&f, t.k, tables, options)?;
    if t.dump_lp {
        diag.push_str(&build_reduction_lp(&p).dump());
    }
    Ok(p)
}

/// Pruned full set up to three variables, the threshold generators beyond.
fn table_set(t: &TableArgs) -> Result<Vec<MbfTable>> {
    let k = t.k;
    let default = if k <= 3 { "pruned" } else { "generators" };
    match t.mbfs.as_deref().unwrap_or(default) {
        "all" => {
            if !t.allow_large {
                return Err(Error::Precondition(
                    "`--mbfs all` needs --allow-large".into(),
                ));
            }
            Ok(prune_mbf_set(&enumerate_mbfs(k)?))
        }
        "pruned" => Ok(prune_mbf_set(&enumerate_mbfs(k)?)),
        "generators" => Ok((2..k).map(|r| MbfTable::at_least(k, r)).collect()),
        path => {
            let mut out = Vec::new();
            for raw in read(path)?.lines() {
                let s = raw.split('#').next().unwrap_or("").trim();
                if !s.is_empty() {
                    out.push(MbfTable::from_bit_string(s)?);
                }
            }
            Ok(out)
        }
    }
}

fn index_list(m: SubsetMask) -> String {
    m.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_index_list(s: &str, n: usize) -> Result<SubsetMask> {
    let mut m = SubsetMask::default();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let i: usize = tok
            .parse()
            .map_err(|_| Error::Precondition(format!("bad index `{tok}`")))?;
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        m = m.with(i - 1);
    }
    Ok(m)
}

fn set_label(m: SubsetMask) -> String {
    format!("{{{}}}", index_list(m))
}

fn print_reduction(out: &mut String, p: &ReductionProblem, r: &ReductionResult) {
    line(out, format!("RESULT distance={}", r.l1_distance));
    let used = (p.k()..r.quadratic.n_vars())
        .filter(|&a| r.quadratic.aux_is_used(a))
        .count();
    line(out, format!("RESULT tables={}", p.mbf_set().len()));
    line(out, format!("RESULT avs_used={used}"));
    line(
        out,
        format!(
            "# quadratic: variables 1 to {} original, {} onward auxiliary",
            p.k(),
            p.k() + 1
        ),
    );
    out.push_str(&r.quadratic.to_text());
    line(out, "# labeling gap".into());
    for (x, gap) in &r.per_labeling_gap {
        line(out, format!("{} {gap}", set_label(*x)));
    }
}

fn av_text(a: &AvParams) -> String {
    let w: Vec<String> = a.weights.iter().map(|w| w.to_string()).collect();
    format!("bias={} weights={}", a.bias, w.join(","))
}

fn print_joint(out: &mut String, j: &JointQuadratic) {
    line(out, format!("constant {}", j.constant));
    let lin: Vec<String> = j.linear.iter().map(|c| c.to_string()).collect();
    line(out, format!("linear {}", lin.join(" ")));
    let pairs: Vec<String> = PAIRS
        .iter()
        .zip(&j.pair_magnitudes)
        .map(|((a, b), c)| format!("{}{}:{}", a + 1, b + 1, -c))
        .collect();
    line(out, format!("pairs {}", pairs.join(" ")));
    line(out, format!("forward {}", av_text(&j.forward)));
    line(out, format!("backward {}", av_text(&j.backward)));
    line(out, format!("interaction {}", -&j.interaction));
}

fn print_quartic(out: &mut String, r: &QuarticReduction) {
    line(
        out,
        format!("RESULT representable={}", r.distance.is_zero()),
    );
    line(out, format!("RESULT distance={}", r.distance));
    line(
        out,
        "# joint quadratic: variable 5 forward, 6 backward".into(),
    );
    print_joint(out, &r.joint);
    line(out, "# quadratic".into());
    out.push_str(&r.quadratic.to_text());
    print_report(out, &r.report);
}

fn print_report(out: &mut String, r: &VerificationReport) {
    line(out, "# labeling f min_h gap argmin_z".into());
    for row in &r.rows {
        let z = SubsetMask::from_indices(row.argmin_z.iter().map(|i| i + r.k));
        line(
            out,
            format!(
                "{} {} {} {} {}",
                set_label(row.x),
                row.f,
                row.min_h,
                row.gap,
                set_label(z)
            ),
        );
    }
}
