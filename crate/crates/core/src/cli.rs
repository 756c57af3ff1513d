//! Command-line front end. Results go to `out`, diagnostics to `err`.
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage
//! or input error.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::dispatch;
use crate::dynamic::{AnyExpr, AnyWfa};
use crate::error::Rejection;
use crate::expr::{render_expr, snf_convert_boolean, KExpr};
use crate::glushkov::{build_wfa, wfa_to_kgraph};
use crate::orbit::recover_expression;
use crate::reduce::ScanOrder;
use crate::semiring::{Semiring, SemiringKind};
use crate::series::{equivalent_up_to, expr_coeff, SeriesSource};
use crate::wfa::Wfa;

#[derive(Debug, Parser)]
#[command(name = "kglushkov", version, about = "Glushkov automata of weighted regular expressions, and back")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the Glushkov WFA of an expression (JSON, or DOT with --dot).
    Build {
        #[command(flatten)]
        input: ExprInput,
        /// Print the K-graph in Graphviz format instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Recover an expression from a WFA, or report why none exists.
    Recover {
        #[command(flatten)]
        input: WfaInput,
        #[arg(long, default_value_t = 6)]
        verify_len: usize,
        /// Also print the rule applications.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a WFA is the Glushkov automaton of an SNF expression.
    Check {
        #[command(flatten)]
        input: WfaInput,
        #[arg(long, default_value_t = 6)]
        verify_len: usize,
    },
    /// Properness, ENF and SNF of an expression; boolean inputs are also
    /// converted to star normal form.
    Snf {
        #[command(flatten)]
        input: ExprInput,
    },
    /// Erase weights from an expression or a WFA.
    Cast {
        #[command(flatten)]
        input: AnyInput,
    },
    /// Coefficient of one word.
    Eval {
        #[command(flatten)]
        input: AnyInput,
        /// The word; empty or `eps` for the empty word.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Compare two series on all words up to a length.
    Equiv {
        #[arg(long, value_parser = parse_kind)]
        semiring: Option<SemiringKind>,
        /// Expression operand; may be repeated.
        #[arg(long = "expr", allow_hyphen_values = true)]
        exprs: Vec<String>,
        /// WFA operand; may be repeated.
        #[arg(long = "wfa")]
        wfas: Vec<PathBuf>,
        #[arg(long, default_value_t = 6)]
        verify_len: usize,
    },
}

fn parse_kind(s: &str) -> Result<SemiringKind, String> {
    s.parse().map_err(|e: crate::error::SemiringError| e.to_string())
}

#[derive(Debug, Args)]
pub struct ExprInput {
    #[arg(long, value_parser = parse_kind)]
    semiring: SemiringKind,
    /// Expression text, or `-` for standard input.
    #[arg(long, allow_hyphen_values = true)]
    expr: String,
}

#[derive(Debug, Args)]
pub struct WfaInput {
    /// Must match the document if given.
    #[arg(long, value_parser = parse_kind)]
    semiring: Option<SemiringKind>,
    #[arg(long)]
    wfa: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnyInput {
    #[arg(long, value_parser = parse_kind)]
    semiring: Option<SemiringKind>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "wfa", required_unless_present = "wfa")]
    expr: Option<String>,
    #[arg(long)]
    wfa: Option<PathBuf>,
}

/// An input problem; reported with exit code 2.
struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(e.to_string())
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn expr(&mut self, kind: SemiringKind, src: &str) -> Result<AnyExpr, Fail> {
        let text = if src == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s)?;
            s
        } else {
            src.to_string()
        };
        let (e, warnings) = AnyExpr::parse(kind, text.trim())?;
        for w in warnings {
            writeln!(self.err, "warning: {w}")?;
        }
        Ok(e)
    }

    fn wfa(&mut self, path: &PathBuf, kind: Option<SemiringKind>) -> Result<AnyWfa, Fail> {
        let text = std::fs::read_to_string(path).map_err(|e| Fail(format!("{}: {e}", path.display())))?;
        AnyWfa::from_json(&text, kind).map_err(|e| Fail(format!("{}: {e}", path.display())))
    }
}

/// Parses `args` and runs the command. Clap usage errors are printed to
/// `err` and return 2.
pub fn run_with_args<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, stdin, out, err),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            code
        }
    }
}

pub fn run(cli: Cli, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut io = Io { stdin, out, err };
    match execute(cli.command, &mut io) {
        Ok(code) => code,
        Err(Fail(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            2
        }
    }
}

fn rejection_json(r: &Rejection) -> String {
    json!({"ok": false, "reason": r.reason, "orbit": r.orbit, "step": r.step}).to_string()
}

fn execute(cmd: Command, io: &mut Io<'_>) -> Result<i32, Fail> {
    match cmd {
        Command::Build { input, dot } => {
            let e = io.expr(input.semiring, &input.expr)?;
            dispatch!(AnyExpr::e, |e: K| build(&e, dot, io))
        }
        Command::Recover {
            input,
            verify_len,
            trace,
            json,
        } => {
            let m = io.wfa(&input.wfa, input.semiring)?;
            dispatch!(AnyWfa::m, |m: K| recover(&m, verify_len, trace, json, io))
        }
        Command::Check { input, verify_len } => {
            let m = io.wfa(&input.wfa, input.semiring)?;
            let verdict = dispatch!(AnyWfa::m, |m: K| recover_expression(&m, verify_len, ScanOrder::Canonical).map(|_| ()));
            let doc = match &verdict {
                Ok(()) => json!({"glushkov_snf": true, "reason": null}),
                Err(r) => {
                    writeln!(io.err, "{r}")?;
                    json!({"glushkov_snf": false, "reason": r.reason, "orbit": r.orbit, "step": r.step})
                }
            };
            writeln!(io.out, "{doc}")?;
            Ok(if verdict.is_ok() { 0 } else { 1 })
        }
        Command::Snf { input } => {
            let e = io.expr(input.semiring, &input.expr)?;
            dispatch!(AnyExpr::e, |e: K| snf(&e, io))
        }
        Command::Cast { input } => {
            if let Some(src) = &input.expr {
                let kind = input.semiring.ok_or_else(|| Fail("--semiring is required with --expr".into()))?;
                let e = io.expr(kind, src)?;
                let text = dispatch!(AnyExpr::e, |e: K| render_expr(&e.cast()));
                writeln!(io.out, "{text}")?;
            } else {
                let m = io.wfa(input.wfa.as_ref().expect("clap"), input.semiring)?;
                let text = dispatch!(AnyWfa::m, |m: K| m.cast().to_json());
                writeln!(io.out, "{text}")?;
            }
            Ok(0)
        }
        Command::Eval { input, word } => {
            let w: Vec<char> = if word == "eps" { Vec::new() } else { word.chars().collect() };
            let value = if let Some(src) = &input.expr {
                let kind = input.semiring.ok_or_else(|| Fail("--semiring is required with --expr".into()))?;
                let e = io.expr(kind, src)?;
                dispatch!(AnyExpr::e, |e: K| expr_coeff(&e, &w)?.to_string())
            } else {
                let m = io.wfa(input.wfa.as_ref().expect("clap"), input.semiring)?;
                dispatch!(AnyWfa::m, |m: K| m.coefficient(&w).to_string())
            };
            writeln!(io.out, "{value}")?;
            Ok(0)
        }
        Command::Equiv {
            semiring,
            exprs,
            wfas,
            verify_len,
        } => equiv(semiring, &exprs, &wfas, verify_len, io),
    }
}

fn build<K: Semiring>(e: &KExpr<K>, dot: bool, io: &mut Io<'_>) -> Result<i32, Fail> {
    let m = build_wfa(e)?;
    if dot {
        let g = wfa_to_kgraph(&m)?;
        write!(io.out, "{}", g.to_dot())?;
    } else {
        writeln!(io.out, "{}", m.to_json())?;
    }
    Ok(0)
}

fn recover<K: Semiring>(
    m: &Wfa<K>,
    verify_len: usize,
    trace: bool,
    as_json: bool,
    io: &mut Io<'_>,
) -> Result<i32, Fail> {
    match recover_expression(m, verify_len, ScanOrder::Canonical) {
        Ok(rec) => {
            if as_json {
                let mut doc = json!({"ok": true, "expr": rec.text(), "verified": rec.verified});
                if trace {
                    doc["trace"] = json!(rec.trace());
                }
                writeln!(io.out, "{doc}")?;
            } else {
                writeln!(io.out, "{}", rec.text())?;
                if let Some(v) = rec.verified {
                    writeln!(io.out, "verified: {v}")?;
                }
                if trace {
                    for line in rec.trace() {
                        writeln!(io.out, "{line}")?;
                    }
                }
            }
            Ok(0)
        }
        Err(r) => {
            writeln!(io.err, "{r}")?;
            writeln!(io.out, "{}", rejection_json(&r))?;
            Ok(1)
        }
    }
}

fn snf<K: Semiring>(e: &KExpr<K>, io: &mut Io<'_>) -> Result<i32, Fail> {
    let c = e.classify();
    let mut doc = json!({
        "proper": c.proper,
        "enf": c.enf,
        "snf": c.snf,
        "null": c.null_coeff.to_string(),
    });
    if K::KIND == SemiringKind::Boolean {
        let b = e.cast();
        doc["converted"] = json!(render_expr(&snf_convert_boolean(&b)));
    }
    writeln!(io.out, "{doc}")?;
    Ok(if c.snf { 0 } else { 1 })
}

fn equiv(
    semiring: Option<SemiringKind>,
    exprs: &[String],
    wfas: &[PathBuf],
    maxlen: usize,
    io: &mut Io<'_>,
) -> Result<i32, Fail> {
    if exprs.len() + wfas.len() != 2 {
        return Err(Fail("equiv takes exactly two operands".into()));
    }
    let mut ws = Vec::new();
    for p in wfas {
        ws.push(io.wfa(p, semiring)?);
    }
    let kind = match (semiring, ws.first()) {
        (Some(k), _) => k,
        (None, Some(m)) => dispatch!(AnyWfa::m, |_m: K| K::KIND),
        (None, None) => return Err(Fail("--semiring is required for two expressions".into())),
    };
    let mut es = Vec::new();
    for s in exprs {
        es.push(io.expr(kind, s)?);
    }
    for m in &ws {
        let k = dispatch!(AnyWfa::m, |_m: K| K::KIND);
        if k != kind {
            return Err(Fail(format!("operands over {k} and {kind}")));
        }
    }
    macro_rules! compare {
        ($any_e:ident, $any_w:ident) => {{
            let mut ops: Vec<Box<dyn SeriesSource<_>>> = Vec::new();
            for e in es {
                if let AnyExpr::$any_e(e) = e {
                    ops.push(Box::new(e));
                }
            }
            for m in ws {
                if let AnyWfa::$any_w(m) = m {
                    ops.push(Box::new(m));
                }
            }
            equivalent_up_to(ops[0].as_ref(), ops[1].as_ref(), maxlen).map_err(|d| d.to_string())
        }};
    }
    let verdict = match kind {
        SemiringKind::Boolean => compare!(Boolean, Boolean),
        SemiringKind::Naturals => compare!(Natural, Natural),
        SemiringKind::Tropical => compare!(Tropical, Tropical),
        SemiringKind::Rationals => compare!(Rational, Rational),
    };
    match verdict {
        Ok(()) => {
            writeln!(io.out, "equivalent up to length {maxlen}: true")?;
            Ok(0)
        }
        Err(d) => {
            writeln!(io.out, "equivalent up to length {maxlen}: false")?;
            writeln!(io.out, "{d}")?;
            Ok(1)
        }
    }
}
