//! `qhilb`: invariants, quantum products, relation checks and hyperelliptic
//! counts for the Hilbert scheme of two points on `P1 x P1`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qhilb::chow::{CODIM, NUM_BASIS};
use qhilb::export;
use qhilb::gw_engine::format_seed_line;
use qhilb::hyperelliptic::{hyperelliptic_table, HyperError};
use qhilb::quantum::{gamma, QuantumError, Y_INDICES};
use qhilb::{
    standard_relations, CurveClass, Engine, EngineConfig, EngineError, HyperellipticQuery, InvariantValue,
    QCohVector, SeedGroup, SeedTable, SmallQuantum,
};

const EXIT_USAGE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "qhilb", version, about = "Quantum cohomology of Hilb^2(P1 x P1) and hyperelliptic counts")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Largest power of q3 kept.
    #[arg(long = "cmax", global = true, default_value_t = 6)]
    c_max: u32,
    /// Largest total y-degree for gamma series.
    #[arg(long = "ytrunc", global = true, default_value_t = 2)]
    y_trunc: u32,
    /// Seed override file, lines `a,b,c | i1 i2 ... | p/q | citation`.
    #[arg(long, global = true, env = "QHILB_SEEDS")]
    seeds: Option<PathBuf>,
    /// Treat pure T4 invariants of bidegrees with d1 d2 - d1 - d2 - 1 < 0 as zero.
    #[arg(long, global = true)]
    enable_bidegree_vanishing: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print every WDVV instance used, on stderr.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute one invariant.
    Invariant {
        #[arg(long)]
        beta: String,
        /// Insertions such as "T4^5 T13".
        #[arg(long, allow_hyphen_values = true)]
        ins: String,
    },
    /// Small quantum product of two basis classes.
    Product { x: String, y: String },
    /// Check the relations of the presentation.
    Verify {
        #[arg(long, conflicts_with = "id")]
        all: bool,
        #[arg(long, num_args = 1..)]
        id: Vec<u32>,
    },
    /// Hyperelliptic counts for a bidegree.
    Hyper {
        #[arg(long)]
        d1: u32,
        #[arg(long)]
        d2: u32,
        #[arg(long)]
        l: u32,
        /// Smallest genus reported.
        #[arg(long, default_value_t = 0)]
        gmin: u32,
    },
    /// Coefficients of the series Gamma_ijk.
    Gamma { i: String, j: String, k: String },
    /// Base invariants for every class with a + b <= 2.
    Table,
    /// Full JSON export of tables, products and residuals.
    Export,
    #[command(subcommand)]
    Seeds(SeedsCmd),
}

#[derive(Subcommand)]
enum SeedsCmd {
    /// Print the active seed table in override-file format.
    Export,
    /// Load an override file and report problems.
    Check { path: PathBuf },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, msg: msg.into() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Inconsistent { .. } => Failure { code: EXIT_VERIFY, msg: e.to_string() },
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<QuantumError> for Failure {
    fn from(e: QuantumError) -> Self {
        match e {
            QuantumError::Missing { .. } | QuantumError::Coeff(_) => Failure { code: EXIT_UNKNOWN, msg: e.to_string() },
            QuantumError::Engine(e) => e.into(),
        }
    }
}

impl From<HyperError> for Failure {
    fn from(e: HyperError) -> Self {
        match e {
            HyperError::Engine(e) => e.into(),
            e => Failure::usage(e.to_string()),
        }
    }
}

fn parse_class(tok: &str) -> Result<usize, Failure> {
    let t = tok.trim();
    let n = t.strip_prefix('T').or_else(|| t.strip_prefix('t')).unwrap_or(t);
    match n.parse::<usize>() {
        Ok(i) if i < NUM_BASIS => Ok(i),
        _ => Err(Failure::usage(format!("`{tok}` is not a basis class T0..T13"))),
    }
}

/// Parses "T4^5 T13" (commas allowed) into a list of indices.
fn parse_insertions(text: &str) -> Result<Vec<usize>, Failure> {
    let mut out = Vec::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        let (cls, exp) = match tok.split_once('^') {
            Some((c, e)) => {
                let e: usize = e.parse().map_err(|_| Failure::usage(format!("bad exponent in `{tok}`")))?;
                (c, e)
            }
            None => (tok, 1),
        };
        let i = parse_class(cls)?;
        out.extend(std::iter::repeat_n(i, exp));
    }
    if out.is_empty() {
        return Err(Failure::usage("no insertions given"));
    }
    Ok(out)
}

fn build_engine(g: &Global) -> Result<Engine, Failure> {
    let cfg = EngineConfig {
        c_max: g.c_max,
        bidegree_vanishing: g.enable_bidegree_vanishing,
        excluded_seeds: BTreeSet::new(),
        trace: g.trace,
    };
    let mut seeds = SeedTable::standard(g.c_max, g.enable_bidegree_vanishing);
    if let Some(path) = &g.seeds {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        seeds.load_overrides(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    Ok(Engine::with_seeds(cfg, seeds))
}

fn dump_trace(g: &Global, engine: &Engine) {
    if g.trace {
        for line in engine.trace() {
            eprintln!("{line}");
        }
    }
}

fn provenance_text(labels: &[&str]) -> String {
    let descr: Vec<String> = labels
        .iter()
        .map(|l| match SeedGroup::from_label(l) {
            Some(g) => format!("{l} ({})", g.description()),
            None => l.to_string(),
        })
        .collect();
    if descr.is_empty() {
        "axioms only".into()
    } else {
        descr.join("; ")
    }
}

fn csv_field(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn cmd_invariant(g: &Global, beta: &str, ins: &str) -> Result<(String, u8), Failure> {
    let beta: CurveClass = beta.parse().map_err(Failure::usage)?;
    let ins = parse_insertions(ins)?;
    let engine = build_engine(g)?;
    let d = engine.derivation(beta, &ins)?;
    dump_trace(g, &engine);
    let code = if d.value.is_known() { 0 } else { EXIT_UNKNOWN };
    let labels = d.provenance();
    let out = match g.format {
        Format::Json => export::render(&export::derivation_json(&beta, &ins, &d)),
        Format::Csv => {
            let ins_s: Vec<String> = ins.iter().map(|i| format!("T{i}")).collect();
            let v = match &d.value {
                InvariantValue::Known(x) => x.to_string(),
                InvariantValue::Unknown(_) => "UNKNOWN".into(),
            };
            format!(
                "a,b,c,insertions,value,provenance\n{},{},{},{},{v},{}\n",
                beta.a,
                beta.b,
                beta.c,
                ins_s.join(" "),
                csv_field(&labels.join("+"))
            )
        }
        Format::Text => match &d.value {
            InvariantValue::Known(x) => {
                format!("{x}\nprovenance: {}\nwdvv steps: {}\n", provenance_text(&labels), d.steps)
            }
            InvariantValue::Unknown(r) => format!("UNKNOWN\nreason: {r}\n"),
        },
    };
    Ok((out, code))
}

fn cmd_product(g: &Global, x: &str, y: &str) -> Result<(String, u8), Failure> {
    let (i, j) = (parse_class(x)?, parse_class(y)?);
    let engine = build_engine(g)?;
    let qh = SmallQuantum::new(&engine);
    let p = qh.basis_product(i, j)?;
    dump_trace(g, &engine);
    let out = match g.format {
        Format::Json => export::render(&json!({
            "i": i, "j": j, "c_max": g.c_max, "product": p.to_string(), "terms": export::qvector_json(&p),
        })),
        Format::Csv => {
            let mut s = String::from("q1,q2,q3,basis,coeff\n");
            for (m, b, c) in p.entries() {
                let _ = writeln!(s, "{},{},{},T{b},{c}", m.e1, m.e2, m.e3);
            }
            s
        }
        Format::Text => format!("{p}\n"),
    };
    Ok((out, 0))
}

fn residual_diff(res: &QCohVector) -> Vec<String> {
    res.entries()
        .into_iter()
        .map(|(m, b, c)| {
            let q = if m.is_one() { String::new() } else { format!("{m} ") };
            format!("{q}T{b}: {c}")
        })
        .collect()
}

fn cmd_verify(g: &Global, all: bool, ids: &[u32]) -> Result<(String, u8), Failure> {
    let rels = standard_relations();
    let chosen: Vec<_> = if all || ids.is_empty() {
        rels.iter().collect()
    } else {
        let mut v = Vec::new();
        for id in ids {
            v.push(rels.iter().find(|r| r.id == *id).ok_or_else(|| Failure::usage(format!("no relation {id}")))?);
        }
        v
    };
    let engine = build_engine(g)?;
    let qh = SmallQuantum::new(&engine);
    let mut rows = Vec::new();
    for r in &chosen {
        rows.push((*r, qh.verify_relation(r)?));
    }
    dump_trace(g, &engine);
    let passed = rows.iter().filter(|(_, res)| res.is_zero()).count();
    let code = if passed == rows.len() { 0 } else { EXIT_VERIFY };
    let out = match g.format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(r, res)| {
                    json!({
                        "id": r.id,
                        "relation": r.to_string(),
                        "pass": res.is_zero(),
                        "residual": res.to_string(),
                        "terms": export::qvector_json(res),
                    })
                })
                .collect();
            export::render(&json!({ "c_max": g.c_max, "passed": passed, "total": rows.len(), "relations": items }))
        }
        Format::Csv => {
            let mut s = String::from("id,pass,residual\n");
            for (r, res) in &rows {
                let _ = writeln!(s, "{},{},{}", r.id, res.is_zero(), csv_field(&res.to_string()));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (r, res) in &rows {
                if res.is_zero() {
                    let _ = writeln!(s, "f{}: pass", r.id);
                } else {
                    let _ = writeln!(s, "f{}: FAIL", r.id);
                    for line in residual_diff(res) {
                        let _ = writeln!(s, "    {line}");
                    }
                }
            }
            let _ = writeln!(s, "{passed}/{} pass (c_max = {})", rows.len(), g.c_max);
            s
        }
    };
    Ok((out, code))
}

fn cmd_hyper(g: &Global, d1: u32, d2: u32, l: u32, gmin: u32) -> Result<(String, u8), Failure> {
    let q = HyperellipticQuery::new(d1, d2, l)?;
    if gmin > q.h_max() {
        return Err(Failure::usage(format!("--gmin {gmin} exceeds the largest genus {}", q.h_max())));
    }
    let engine = build_engine(g)?;
    let t = hyperelliptic_table(&engine, &q, gmin)?;
    dump_trace(g, &engine);
    let code = if t.counts.values().all(InvariantValue::is_known) { 0 } else { EXIT_UNKNOWN };
    let out = match g.format {
        Format::Json => export::render(&export::hyper_json(&t)),
        Format::Csv => t.to_csv(),
        Format::Text => {
            let mut s = format!("bidegree ({d1},{d2}), l = {l}, r = {}, k = {}\n", q.r(), q.k());
            for (h, v) in &t.counts {
                let prov = t.provenance.get(h).map_or("", String::as_str);
                let count = match v {
                    InvariantValue::Known(x) => x.to_string(),
                    InvariantValue::Unknown(_) => "UNKNOWN".into(),
                };
                let _ = writeln!(s, "h = {h}: {count}  [{prov}]");
            }
            s
        }
    };
    Ok((out, code))
}

fn cmd_gamma(g: &Global, i: &str, j: &str, k: &str) -> Result<(String, u8), Failure> {
    let (i, j, k) = (parse_class(i)?, parse_class(j)?, parse_class(k)?);
    let engine = build_engine(g)?;
    let series = gamma(&engine, i, j, k, g.y_trunc, g.c_max)?;
    dump_trace(g, &engine);
    let code = if series.terms.values().all(InvariantValue::is_known) { 0 } else { EXIT_UNKNOWN };
    let mono = |nu: &[u8; 10]| -> String {
        let parts: Vec<String> = nu
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(p, &e)| {
                let idx = Y_INDICES.start + p;
                if e == 1 { format!("y{idx}") } else { format!("y{idx}^{e}") }
            })
            .collect();
        if parts.is_empty() { "1".into() } else { parts.join(" ") }
    };
    let out = match g.format {
        Format::Json => {
            let terms: Vec<Value> = series
                .terms
                .iter()
                .map(|((b, nu), v)| json!({ "beta": export::beta_json(b), "y": nu.to_vec(), "coeff": export::value_json(v) }))
                .collect();
            export::render(&json!({ "ijk": [i, j, k], "y_truncation": g.y_trunc, "c_max": g.c_max, "terms": terms }))
        }
        Format::Csv => {
            let mut s = String::from("a,b,c,y,coeff\n");
            for ((b, nu), v) in &series.terms {
                let v = v.known().map_or("UNKNOWN".into(), |x| x.to_string());
                let _ = writeln!(s, "{},{},{},{},{v}", b.a, b.b, b.c, mono(nu));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for ((b, nu), v) in &series.terms {
                let _ = writeln!(s, "{b} {}: {v}", mono(nu));
            }
            if s.is_empty() {
                s.push_str("0\n");
            }
            s
        }
    };
    Ok((out, code))
}

fn cmd_table(g: &Global) -> Result<(String, u8), Failure> {
    let engine = build_engine(g)?;
    let table = engine.derive_two_point_table()?;
    dump_trace(g, &engine);
    let out = match g.format {
        Format::Json => {
            let rows: Vec<Value> = table.iter().map(|t| export::key_json(&t.key, &t.derivation)).collect();
            export::render(&json!({ "c_max": g.c_max, "entries": rows }))
        }
        Format::Text | Format::Csv => {
            let mut s = String::new();
            for t in &table {
                let prov = t.derivation.provenance().join("+");
                let line = match &t.derivation.value {
                    InvariantValue::Known(v) => format_seed_line(&t.key, v, &prov),
                    InvariantValue::Unknown(r) => {
                        let ins: Vec<String> = t.key.insertions.iter().map(|i| i.to_string()).collect();
                        let b = t.key.beta;
                        format!("# {},{},{} | {} | UNKNOWN | {r}", b.a, b.b, b.c, ins.join(" "))
                    }
                };
                s.push_str(&line);
                s.push('\n');
            }
            s
        }
    };
    Ok((out, 0))
}

fn cmd_seeds(g: &Global, sub: &SeedsCmd) -> Result<(String, u8), Failure> {
    match sub {
        SeedsCmd::Export => {
            let engine = build_engine(g)?;
            let lines = engine.seeds().to_lines();
            Ok(match g.format {
                Format::Json => (export::render(&json!({ "seeds": lines })), 0),
                _ => (lines.join("\n") + "\n", 0),
            })
        }
        SeedsCmd::Check { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let mut t = SeedTable::empty();
            let n = t.load_overrides(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let bad: Vec<String> = t
                .entries()
                .filter(|(k, _)| k.insertions.iter().any(|&i| CODIM[i as usize] < 2))
                .map(|(k, _)| k.to_string())
                .collect();
            if !bad.is_empty() {
                return Err(Failure::usage(format!("divisor insertions in {}", bad.join(", "))));
            }
            Ok((format!("{n} seed lines ok ({} keys with involution images)\n", t.len()), 0))
        }
    }
}

fn run(cli: &Cli) -> Result<(String, u8), Failure> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Invariant { beta, ins } => cmd_invariant(g, beta, ins),
        Cmd::Product { x, y } => cmd_product(g, x, y),
        Cmd::Verify { all, id } => cmd_verify(g, *all, id),
        Cmd::Hyper { d1, d2, l, gmin } => cmd_hyper(g, *d1, *d2, *l, *gmin),
        Cmd::Gamma { i, j, k } => cmd_gamma(g, i, j, k),
        Cmd::Table => cmd_table(g),
        Cmd::Export => {
            let engine = build_engine(g)?;
            let v = export::full_export(&engine)?;
            Ok((export::render(&v), 0))
        }
        Cmd::Seeds(sub) => cmd_seeds(g, sub),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            if cli.global.format == Format::Json {
                println!("{}", json!({ "error": f.msg, "exit_code": f.code }));
            }
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
