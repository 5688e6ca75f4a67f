//! Command-line front end. `main.rs` only forwards to [`run_from`].

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::parse;
use crate::haar::{parse_monomial, HaarTable};
use crate::ncalg::{normal_form_budget, normal_form_with_strategy, z_letters, Gen, NcElement, Strategy, Word};
use crate::qdet::{det_q, quantum_minor, IndexSet};
use crate::shilov::{boundary_relation, rect_boundary_relation, restrict, RectConfig};
use crate::szego::{verify_reproduction, Emission, Shape};

pub const CACHE_ENV: &str = "QBALL_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qball", version, about = "Exact computations on the quantum matrix ball")]
pub struct Cli {
    /// Matrix size.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: u8,
    /// Number of rows of the rectangular block (1 <= m < n).
    #[arg(long, global = true)]
    pub m: Option<u8>,
    /// Degree bound for verification and benchmarks.
    #[arg(long, global = true, default_value_t = 2)]
    pub degree: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Haar value cache, loaded before and written after integration.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache_path: Option<PathBuf>,
    /// Also evaluate residuals at this rational value of q, e.g. 1/2.
    #[arg(long, global = true)]
    pub q_probe: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form in Pol(Mat_n)_q.
    Normalize { expr: String },
    /// Involution in Pol(Mat_n)_q.
    Star { expr: String },
    /// Quantum minor with the given rows and columns, e.g. --rows 1,2.
    Minor {
        #[arg(long, value_delimiter = ',')]
        rows: Vec<u8>,
        #[arg(long, value_delimiter = ',')]
        cols: Vec<u8>,
    },
    /// The quantum determinant.
    Det,
    /// Invariant integral over the Shilov boundary.
    Integrate { expr: String },
    /// Inner product (f, g) of two elements of C[Mat_n]_q.
    Inner { f: String, g: String },
    /// Boundary relations vanish and restriction respects the mixed relations.
    ShilovCheck,
    /// Boundary relations of the rectangular block vanish.
    RectCheck,
    /// Haar functional of C[U_n]_q on one monomial, e.g. "z[1,1] z[2,2] detinv".
    Haar {
        #[arg(long)]
        monomial: String,
    },
    /// Check that the Cauchy-Szegő integral reproduces every basis monomial.
    SzegoVerify,
    /// Normal-ordering cost under growing degree.
    BenchRewrite,
}

/// Exit status and rendered report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: i32,
    pub output: String,
}

pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => Outcome { status: if e.use_stderr() { 2 } else { 0 }, output: e.to_string() },
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok((pass, report)) => Outcome { status: if pass { 0 } else { 1 }, output: render(cli, &report) },
        Err(e) => {
            let output = match cli.format {
                Format::Text => format!("error: {e}"),
                Format::Json => json!({ "schema": 1, "error": e.to_string() }).to_string(),
            };
            Outcome { status: 2, output }
        }
    }
}

struct Report {
    command: &'static str,
    text: String,
    json: Value,
}

fn render(cli: &Cli, r: &Report) -> String {
    match cli.format {
        Format::Text => r.text.clone(),
        Format::Json => {
            let mut v = json!({ "schema": 1, "command": r.command, "n": cli.n });
            if let Some(m) = cli.m {
                v["m"] = json!(m);
            }
            if let (Value::Object(dst), Value::Object(src)) = (&mut v, &r.json) {
                dst.extend(src.clone());
            }
            serde_json::to_string_pretty(&v).expect("serializable")
        }
    }
}

fn value_report(command: &'static str, value: String) -> Report {
    Report { command, json: json!({ "result": value }), text: value }
}

fn check_table(command: &'static str, rows: Vec<(String, bool)>) -> (bool, Report) {
    let pass = rows.iter().all(|r| r.1);
    let mut text: String = rows
        .iter()
        .map(|(name, ok)| format!("{}  {name}\n", if *ok { "PASS" } else { "FAIL" }))
        .collect();
    let failed = rows.iter().filter(|r| !r.1).count();
    text.push_str(&format!("{} checks, {} failed", rows.len(), failed));
    let json = json!({
        "checks": rows.iter().map(|(name, ok)| json!({ "check": name, "pass": ok })).collect::<Vec<_>>(),
        "pass": pass,
    });
    (pass, Report { command, text, json })
}

fn rect_config(cli: &Cli) -> Result<Option<RectConfig>> {
    cli.m.map(|m| RectConfig::new(m, cli.n)).transpose()
}

fn parse_pol(cli: &Cli, text: &str) -> Result<NcElement> {
    let e = parse(text)?;
    e.validate(cli.n, cli.m)?;
    e.eval_pol(cli.n)
}

fn with_table<T>(cli: &Cli, f: impl FnOnce(&HaarTable) -> Result<T>) -> Result<T> {
    let table = HaarTable::new();
    if let Some(p) = &cli.cache_path {
        table.load(p)?;
    }
    let before = table.len();
    let out = f(&table)?;
    if let Some(p) = &cli.cache_path {
        if table.len() != before {
            table.save(p)?;
        }
    }
    Ok(out)
}

fn q_probe(cli: &Cli) -> Result<Option<BigRational>> {
    cli.q_probe
        .as_deref()
        .map(|s| BigRational::from_str(s.trim()).map_err(|_| Error::Config(format!("--q-probe: not a rational number: {s}"))))
        .transpose()
}

fn dispatch(cli: &Cli) -> Result<(bool, Report)> {
    if cli.n == 0 {
        return Err(Error::Config("--n must be at least 1".into()));
    }
    rect_config(cli)?;
    let n = cli.n;
    Ok(match &cli.command {
        Command::Normalize { expr } => (true, value_report("normalize", parse_pol(cli, expr)?.to_string())),
        Command::Star { expr } => (true, value_report("star", parse_pol(cli, expr)?.star().to_string())),
        Command::Minor { rows, cols } => {
            let r = IndexSet::new(rows.clone(), n)?;
            let c = IndexSet::new(cols.clone(), n)?;
            (true, value_report("minor", quantum_minor(n, &r, &c)?.to_string()))
        }
        Command::Det => (true, value_report("det", det_q(n).to_string())),
        Command::Integrate { expr } => {
            let e = parse(expr)?;
            e.validate(n, cli.m)?;
            let b = e.eval_boundary(n)?;
            let v = with_table(cli, |t| t.integrate(&b))?;
            (true, value_report("integrate", v.to_string()))
        }
        Command::Inner { f, g } => {
            let f = parse_pol(cli, f)?;
            let g = parse_pol(cli, g)?;
            let v = with_table(cli, |t| t.inner_product(&f, &g))?;
            (true, value_report("inner", v.to_string()))
        }
        Command::ShilovCheck => {
            if cli.m.is_some() {
                return Err(Error::Config("shilov-check is for the square case; use rect-check".into()));
            }
            check_table("shilov-check", shilov_rows(n)?)
        }
        Command::RectCheck => {
            let cfg = rect_config(cli)?.ok_or_else(|| Error::Config("rect-check needs --m".into()))?;
            let mut rows = Vec::new();
            for a in cfg.rows() {
                for b in cfg.rows() {
                    let rel = rect_boundary_relation(&cfg, a, b)?;
                    rows.push((format!("boundary relation ({a},{b}) restricts to 0"), restrict(&rel)?.is_zero()));
                }
            }
            check_table("rect-check", rows)
        }
        Command::Haar { monomial } => {
            let (w, k) = match parse_monomial(monomial) {
                Ok((w, k)) if w.letters().iter().all(|g| !g.starred) => (w, k),
                _ => {
                    let g = parse(monomial)?.eval_gl(n)?;
                    return haar_element(cli, &g);
                }
            };
            for g in w.letters() {
                g.check(n)?;
            }
            let g = crate::qdet::GlElement::new(NcElement::from_word(n, w)?, k)?;
            haar_element(cli, &g)?
        }
        Command::SzegoVerify => {
            let shape = Shape::new(n, cli.m)?;
            let probe = q_probe(cli)?;
            let report = with_table(cli, |t| verify_reproduction(shape, cli.degree, t, Emission::AsIs, probe.as_ref()))?;
            let mut text: String = report
                .per_monomial
                .iter()
                .map(|r| {
                    format!(
                        "{}  {:<40} terms {:>4}  {:>6} ms{}\n",
                        if r.pass { "PASS" } else { "FAIL" },
                        r.monomial,
                        r.terms,
                        r.millis,
                        r.error.as_ref().map(|e| format!("  {e}")).unwrap_or_default()
                    )
                })
                .collect();
            text.push_str(&format!(
                "{} monomials, {} passed, {} failed, kernel {} terms, {} ms",
                report.totals.monomials,
                report.totals.passed,
                report.totals.failed,
                report.totals.kernel_terms,
                report.totals.millis
            ));
            let json = serde_json::to_value(&report).expect("serializable");
            (report.all_pass(), Report { command: "szego-verify", text, json })
        }
        Command::BenchRewrite => bench_rewrite(cli)?,
    })
}

fn haar_element(cli: &Cli, g: &crate::qdet::GlElement) -> Result<(bool, Report)> {
    let n = cli.n;
    let (value, left_ok) = with_table(cli, |t| {
        let v = t.haar(g)?;
        let mut ok = true;
        for w in g.body().terms().keys() {
            ok &= t.left_invariant_at(n, w, g.detpow())?;
        }
        Ok((v, ok))
    })?;
    let text = format!("{value}\n{}  left invariance", if left_ok { "PASS" } else { "FAIL" });
    let json = json!({ "result": value.to_string(), "left_invariant": left_ok });
    Ok((left_ok, Report { command: "haar", text, json }))
}

fn shilov_rows(n: u8) -> Result<Vec<(String, bool)>> {
    let mut rows = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            let rel = boundary_relation(n, a, b)?;
            rows.push((format!("boundary relation ({a},{b}) restricts to 0"), restrict(&rel)?.is_zero()));
        }
    }
    for b in 1..=n {
        for beta in 1..=n {
            for a in 1..=n {
                for alpha in 1..=n {
                    let s = NcElement::zs(n, b, beta)?;
                    let z = NcElement::z(n, a, alpha)?;
                    let lhs = restrict(&s)?.multiply(&restrict(&z)?)?;
                    let rhs = restrict(&s.multiply(&z)?)?;
                    rows.push((format!("restriction respects zs[{b},{beta}] z[{a},{alpha}]"), lhs == rhs));
                }
            }
        }
    }
    Ok(rows)
}

/// A word of length `d` alternating starred and unstarred letters in
/// descending order, which is as far from normal order as possible.
pub fn bench_word(n: u8, d: usize) -> Word {
    let letters: Vec<Gen> = z_letters(n).into_iter().rev().collect();
    Word(
        (0..d)
            .map(|i| {
                let g = letters[(i / 2) % letters.len()];
                if i % 2 == 0 {
                    g.star()
                } else {
                    g
                }
            })
            .collect(),
    )
}

fn bench_rewrite(cli: &Cli) -> Result<(bool, Report)> {
    let n = cli.n;
    let mut rows = Vec::new();
    let mut text = format!("{:>6} {:>8} {:>12} {:>12}\n", "degree", "terms", "memo ms", "plain ms");
    for d in 1..=cli.degree {
        let w = bench_word(n, d);
        let t0 = Instant::now();
        let memo = normal_form_budget(n, [(w.clone(), crate::scalar::Scalar::one())], crate::ncalg::DEFAULT_BUDGET)?;
        let memo_ms = t0.elapsed().as_secs_f64() * 1e3;
        let t1 = Instant::now();
        let plain = normal_form_with_strategy(n, [(w.clone(), crate::scalar::Scalar::one())], Strategy::Leftmost, crate::ncalg::DEFAULT_BUDGET)?;
        let plain_ms = t1.elapsed().as_secs_f64() * 1e3;
        let agree = memo == plain;
        text.push_str(&format!("{d:>6} {:>8} {memo_ms:>12.3} {plain_ms:>12.3}{}\n", memo.len(), if agree { "" } else { "  MISMATCH" }));
        rows.push(json!({ "degree": d, "word": w.to_string(), "terms": memo.len(), "memo_ms": memo_ms, "plain_ms": plain_ms, "agree": agree }));
    }
    let pass = rows.iter().all(|r| r["agree"] == json!(true));
    text.push_str(&format!("memo entries {}", crate::ncalg::memo_size()));
    Ok((pass, Report { command: "bench-rewrite", text, json: json!({ "rows": rows, "memo_entries": crate::ncalg::memo_size() }) }))
}
