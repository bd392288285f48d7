//! The `mallterm` command line: argument parsing, subcommands and exit codes.
//!
//! Exit codes: 0 success (or equivalent), 1 semantic failure (or
//! inequivalent), 2 inconclusive, 64 usage, 65 parse error, 66 missing file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::checker::{check, TypedTerm};
use crate::core::{Signature, Term};
use crate::equiv::{decide, EquivCertificate, DEFAULT_BUDGET};
use crate::generate::atoms_only;
use crate::lawcheck::{check_diagrams, exhaustive_corpus, sweep, DiagramVerdict, Law, Verdict, DEFAULT_MAX_FORMULA};
use crate::measure::{cut_bag, height};
use crate::rewriter::normalize;
use crate::surface::{parse_paired, parse_signature, parse_term, print_term, sniff_syntax, SyntaxKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_MISSING: i32 = 66;

#[derive(Parser, Debug)]
#[command(name = "mallterm", version, about = "Typecheck, normalize and compare MALL process terms")]
struct Cli {
    /// Print one JSON object {command, verdict, data} instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Syntax {
    Prog,
    Term,
}

impl From<Syntax> for SyntaxKind {
    fn from(s: Syntax) -> SyntaxKind {
        match s {
            Syntax::Prog => SyntaxKind::ProgLang,
            Syntax::Term => SyntaxKind::TermCalc,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a term (or a `sequent --- term` file) and print it back.
    Parse {
        file: PathBuf,
        #[arg(long)]
        syntax: Option<Syntax>,
        /// Print in this syntax instead of the input's.
        #[arg(long)]
        to: Option<Syntax>,
    },
    /// Typecheck a `sequent --- term` file.
    Check {
        file: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long)]
        syntax: Option<Syntax>,
    },
    /// Print the normal form.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Also print every step with its rule and cut bags.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: usize,
    },
    /// Decide whether two terms of one sequent are equivalent.
    Equiv {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Print the height and the cut-height bag.
    Measure { file: PathBuf },
    /// Run the law checks on generated instances.
    Laws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Largest generated formula.
        #[arg(long, default_value_t = DEFAULT_MAX_FORMULA)]
        max_size: usize,
        /// Only these laws (identity, assoc, interchange, poly-sum,
        /// representability, injection).
        #[arg(long = "law")]
        laws: Vec<String>,
    },
    /// Enumerate divergences over every small term and resolve them.
    Pairs {
        /// Bound on subformula occurrences, cut formulas included.
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        /// Reductions allowed on each side of a convergence.
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
}

/// What a run printed and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

/// A command's verdict, its exit code, human text and JSON payload.
struct Report {
    verdict: &'static str,
    code: i32,
    text: String,
    data: Value,
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                EXIT_OK
            } else {
                EXIT_USAGE
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let name = command_name(&cli.command);
    match dispatch(cli.command) {
        Ok(r) => {
            let stdout = if cli.json {
                format!("{}\n", json!({"command": name, "verdict": r.verdict, "data": r.data}))
            } else {
                r.text
            };
            Outcome { code: r.code, stdout, stderr: String::new() }
        }
        Err(f) => {
            let verdict = match f.code {
                EXIT_PARSE => "parse-error",
                EXIT_MISSING => "missing-file",
                EXIT_USAGE => "usage-error",
                _ => "error",
            };
            let stdout = if cli.json {
                format!("{}\n", json!({"command": name, "verdict": verdict, "data": {"message": f.message}}))
            } else {
                String::new()
            };
            Outcome { code: f.code, stdout, stderr: format!("mallterm {name}: {}\n", f.message) }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse { .. } => "parse",
        Command::Check { .. } => "check",
        Command::Normalize { .. } => "normalize",
        Command::Equiv { .. } => "equiv",
        Command::Measure { .. } => "measure",
        Command::Laws { .. } => "laws",
        Command::Pairs { .. } => "pairs",
    }
}

fn dispatch(c: Command) -> Result<Report, Failure> {
    match c {
        Command::Parse { file, syntax, to } => parse_cmd(&file, syntax.map(Into::into), to.map(Into::into)),
        Command::Check { file, sig, syntax } => check_cmd(&file, sig.as_deref(), syntax.map(Into::into)),
        Command::Normalize { file, sig, trace, max_steps } => normalize_cmd(&file, sig.as_deref(), trace, max_steps),
        Command::Equiv { file1, file2, sig, budget } => equiv_cmd(&file1, &file2, sig.as_deref(), budget),
        Command::Measure { file } => measure_cmd(&file),
        Command::Laws { seed, count, max_size, laws } => laws_cmd(seed, count, max_size, &laws),
        Command::Pairs { max_size, depth } => pairs_cmd(max_size, depth),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(EXIT_MISSING, format!("{}: {e}", path.display())))
}

fn is_paired(text: &str) -> bool {
    text.lines().any(|l| l.trim() == "---")
}

fn load_sig(path: Option<&Path>) -> Result<Signature, Failure> {
    match path {
        None => Ok(Signature::empty()),
        Some(p) => parse_signature(&read(p)?).map_err(|e| fail(EXIT_PARSE, format!("{}:{e}", p.display()))),
    }
}

/// Reads and typechecks a paired file. Type errors exit 1.
fn load_typed(path: &Path, sig: &Signature, kind: Option<SyntaxKind>) -> Result<TypedTerm, Failure> {
    let text = read(path)?;
    let p = parse_paired(&text, kind).map_err(|e| fail(EXIT_PARSE, format!("{}:{e}", path.display())))?;
    check(&p.term, &p.sequent, sig).map_err(|e| fail(EXIT_FAIL, format!("{}:{}", path.display(), e.located(&p.spans))))
}

fn ok(verdict: &'static str, text: String, data: Value) -> Result<Report, Failure> {
    Ok(Report { verdict, code: EXIT_OK, text, data })
}

fn parse_cmd(path: &Path, kind: Option<SyntaxKind>, to: Option<SyntaxKind>) -> Result<Report, Failure> {
    let text = read(path)?;
    let perr = |e: crate::surface::ParseError| fail(EXIT_PARSE, format!("{}:{e}", path.display()));
    let (seq, term, from): (Option<String>, Term, SyntaxKind) = if is_paired(&text) {
        let p = parse_paired(&text, kind).map_err(perr)?;
        (Some(p.sequent.to_string()), p.term, p.kind)
    } else {
        let k = kind.unwrap_or_else(|| sniff_syntax(&text));
        (None, parse_term(&text, k).map_err(perr)?, k)
    };
    let out = to.unwrap_or(from);
    let printed = print_term(&term, out);
    let text = match &seq {
        Some(s) => format!("{s}\n---\n{printed}\n"),
        None => format!("{printed}\n"),
    };
    ok("parsed", text, json!({"sequent": seq, "term": printed, "syntax": match out { SyntaxKind::ProgLang => "prog", SyntaxKind::TermCalc => "term" }}))
}

fn check_cmd(path: &Path, sig: Option<&Path>, kind: Option<SyntaxKind>) -> Result<Report, Failure> {
    let sig = load_sig(sig)?;
    let text = read(path)?;
    let p = parse_paired(&text, kind).map_err(|e| fail(EXIT_PARSE, format!("{}:{e}", path.display())))?;
    match check(&p.term, &p.sequent, &sig) {
        Ok(t) => ok("well-typed", format!("ok: {}\n", t.seq), json!({"sequent": t.seq.to_string()})),
        Err(e) => {
            let e = e.located(&p.spans);
            Ok(Report {
                verdict: "ill-typed",
                code: EXIT_FAIL,
                text: format!("type error: {e}\n"),
                data: json!({"error": e, "message": e.to_string()}),
            })
        }
    }
}

fn normalize_cmd(path: &Path, sig: Option<&Path>, trace: bool, max_steps: usize) -> Result<Report, Failure> {
    let sig = load_sig(sig)?;
    let t = load_typed(path, &sig, None)?;
    let (nf, tr) = normalize(&t, max_steps).map_err(|e| fail(EXIT_FAIL, e.to_string()))?;
    let mut text = String::new();
    if trace {
        for (i, s) in tr.steps.iter().enumerate() {
            let _ = writeln!(text, "{}. {} at {:?}: {} -> {}", i + 1, s.redex.rule, s.redex.path, s.bag_before, s.bag_after);
        }
    }
    let _ = writeln!(text, "{}", nf.print(SyntaxKind::TermCalc));
    let mut data = json!({"term": nf.print(SyntaxKind::TermCalc), "steps": tr.steps.len()});
    if trace {
        data["trace"] = tr.to_json();
    }
    ok("normalized", text, data)
}

fn equiv_cmd(a: &Path, b: &Path, sig: Option<&Path>, budget: usize) -> Result<Report, Failure> {
    let sig = load_sig(sig)?;
    let (t1, t2) = (load_typed(a, &sig, None)?, load_typed(b, &sig, None)?);
    let cert = decide(&t1, &t2, budget).map_err(|e| fail(EXIT_FAIL, e.to_string()))?;
    let mut text = String::new();
    let (verdict, code) = match &cert {
        EquivCertificate::Equivalent(chain) => {
            let _ = writeln!(text, "equivalent");
            let _ = writeln!(text, "  {}", print_term(&chain.start, SyntaxKind::TermCalc));
            for s in &chain.steps {
                let by = s.conversion.as_ref().map(|c| c.rule.to_string()).unwrap_or_else(|| "wiring".into());
                let _ = writeln!(text, "  ~{by} {}", print_term(&s.term, SyntaxKind::TermCalc));
            }
            ("equivalent", EXIT_OK)
        }
        EquivCertificate::Inequivalent { left, right } => {
            let _ = writeln!(text, "inequivalent");
            let _ = writeln!(text, "  {}", print_term(left, SyntaxKind::TermCalc));
            let _ = writeln!(text, "  {}", print_term(right, SyntaxKind::TermCalc));
            ("inequivalent", EXIT_FAIL)
        }
        EquivCertificate::Inconclusive { explored, reason } => {
            let _ = writeln!(text, "inconclusive after {explored} class members: {reason}");
            ("inconclusive", EXIT_INCONCLUSIVE)
        }
    };
    let data = serde_json::to_value(&cert).expect("certificates serialize");
    Ok(Report { verdict, code, text, data })
}

fn measure_cmd(path: &Path) -> Result<Report, Failure> {
    let text = read(path)?;
    let perr = |e: crate::surface::ParseError| fail(EXIT_PARSE, format!("{}:{e}", path.display()));
    let term = if is_paired(&text) {
        parse_paired(&text, None).map_err(perr)?.term
    } else {
        parse_term(&text, sniff_syntax(&text)).map_err(perr)?
    };
    let (h, bag) = (height(&term), cut_bag(&term));
    ok("measured", format!("height={h} bag={bag}\n"), json!({"height": h, "bag": bag.to_string()}))
}

fn laws_cmd(seed: u64, count: usize, max_size: usize, names: &[String]) -> Result<Report, Failure> {
    let laws: Vec<Law> = if names.is_empty() {
        Law::ALL.to_vec()
    } else {
        names.iter().map(|n| Law::from_name(n).ok_or_else(|| fail(EXIT_USAGE, format!("unknown law `{n}`")))).collect::<Result<_, _>>()?
    };
    if max_size == 0 {
        return Err(fail(EXIT_USAGE, "--max-size must be at least 1"));
    }
    let mut text = String::new();
    let mut summary = Vec::new();
    let mut lines = Vec::new();
    let mut failed = false;
    for law in laws {
        let reports = sweep(law, seed, count, max_size);
        let tally = |v: fn(&Verdict) -> bool| reports.iter().filter(|r| v(&r.verdict)).count();
        let pass = tally(|v| *v == Verdict::Pass);
        let skip = tally(|v| *v == Verdict::Skip);
        let bad = reports.len() - pass - skip;
        failed |= bad > 0;
        for r in &reports {
            let v = match &r.verdict {
                Verdict::Error(e) => format!("error: {e}"),
                v => serde_json::to_value(v).expect("verdicts serialize").as_str().unwrap_or_default().to_string(),
            };
            let _ = writeln!(text, "{} seed={} instance={} {v}", r.law, r.seed, if r.instance.is_empty() { "-" } else { &r.instance });
            if let Some(d) = r.detail.as_ref().filter(|_| r.verdict != Verdict::Skip) {
                for l in d.lines() {
                    let _ = writeln!(text, "    {l}");
                }
            }
        }
        summary.push(json!({"law": law, "pass": pass, "skip": skip, "fail": bad}));
        let _ = writeln!(text, "{law}: {pass} pass, {skip} skip, {bad} fail");
        lines.extend(reports);
    }
    let verdict = if failed { "fail" } else { "pass" };
    let data = json!({"summary": summary, "reports": lines});
    Ok(Report { verdict, code: if failed { EXIT_FAIL } else { EXIT_OK }, text, data })
}

fn pairs_cmd(max_size: usize, depth: usize) -> Result<Report, Failure> {
    let sig = atoms_only();
    let corpus = exhaustive_corpus(max_size, &["A", "B"], 2, &sig, 200_000);
    let reports: Vec<_> = corpus.terms.par_iter().flat_map(|t| check_diagrams(t, depth)).collect();
    let resolved = reports.iter().filter(|r| r.verdict == DiagramVerdict::Resolved).count();
    let decreased = reports.iter().filter(|r| r.decreased).count();
    let mut text = String::new();
    let bad: Vec<_> = reports.iter().filter(|r| r.verdict != DiagramVerdict::Resolved || !r.decreased).collect();
    for r in &bad {
        let what = match r.verdict {
            DiagramVerdict::Resolved => "no decrease",
            DiagramVerdict::ConversionsOnly => "joined by conversions only",
            DiagramVerdict::Unresolved => "unresolved",
        };
        let _ = writeln!(text, "{what}: {}", r.divergence);
    }
    let _ = writeln!(
        text,
        "{} terms{}, {} divergences, {resolved} resolved, {decreased} with the measure decreasing",
        corpus.terms.len(),
        if corpus.complete { "" } else { " (enumeration incomplete)" },
        reports.len()
    );
    let failed = !bad.is_empty();
    let data = json!({
        "terms": corpus.terms.len(),
        "complete": corpus.complete,
        "divergences": reports.len(),
        "resolved": resolved,
        "decreased": decreased,
        "failures": bad,
    });
    Ok(Report { verdict: if failed { "fail" } else { "pass" }, code: if failed { EXIT_FAIL } else { EXIT_OK }, text, data })
}
