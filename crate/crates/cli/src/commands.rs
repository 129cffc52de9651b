use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use rfgrowth_core::fp_quotients::{
    minimal_detecting_quotient, CyclicOracle, DetectionReport, FreeAbelianOracle, FreeOracle,
    GroupOracle, IntegersOracle, Presentation, QuotientError, SearchLimits,
};
use rfgrowth_core::growth::GrowthFunction;
use rfgrowth_core::neumann::{
    detection_matrix, growth_certificate, is_diagonal_pattern, validate_certificate,
    GrowthCertificate, ModelError,
};
use rfgrowth_core::rf_growth::{element_reports, rf_growth, GrowthRow};
use rfgrowth_core::sequences::{build, verify_clauses, SequenceError, SequenceTable};
use rfgrowth_core::word::Word;

use crate::{Cli, Command, Format, Global, OracleChoice};

pub const EXIT_CHECK: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SHALLOW: u8 = 3;
pub const EXIT_ORACLE: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn config(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.to_string(),
    }
}

type Outcome = Result<u8, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    if g.levels == 0 {
        return Err(config("--K must be at least 1"));
    }
    if g.max_degree == 0 || g.max_order == 0 {
        return Err(config("--max-degree and --max-order must be positive"));
    }
    match &cli.command {
        Command::Sequences => cmd_sequences(g),
        Command::Verify { table } => cmd_verify(g, table.as_deref()),
        Command::Certificate { check } => cmd_certificate(g, check.as_deref()),
        Command::Rfgrowth {
            presentation,
            oracle,
        } => cmd_rfgrowth(g, presentation, *oracle),
        Command::Quotients {
            presentation,
            elements,
            exhaustive,
            unpruned,
        } => cmd_quotients(g, presentation, elements, *exhaustive, *unpruned),
    }
}

fn emit(g: &Global, text: &str) -> Result<(), Failure> {
    match &g.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| config(format!("cannot write output: {e}")))
        }
    }
}

/// Deterministic `result` plus a separate `timing` object.
fn emit_json(g: &Global, command: &str, result: Value, started: Instant) -> Result<(), Failure> {
    let doc = json!({
        "command": command,
        "result": result,
        "timing": { "elapsed_ms": started.elapsed().as_millis() },
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    emit(g, &text)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn growth(g: &Global) -> Result<GrowthFunction, Failure> {
    GrowthFunction::parse(&g.f).map_err(config)
}

fn build_table(g: &Global, f: &GrowthFunction) -> Result<SequenceTable, Failure> {
    build(f, g.levels).map_err(|e| match e {
        SequenceError::InvalidLevel => config(e),
        other => config(format!(
            "cannot build the table for {f} at K = {}: {other}",
            g.levels
        )),
    })
}

fn require_json(g: &Global, command: &str) -> Result<(), Failure> {
    if g.format == Format::Csv {
        return Err(config(format!("{command} only writes json")));
    }
    Ok(())
}

fn cmd_sequences(g: &Global) -> Outcome {
    let started = Instant::now();
    let f = growth(g)?;
    let table = build_table(g, &f)?;
    let report = verify_clauses(&table, &f);
    match g.format {
        Format::Json => emit_json(
            g,
            "sequences",
            json!({ "f": f.to_string(), "table": to_value(&table), "clauses": to_value(&report) }),
            started,
        )?,
        Format::Csv => {
            let mut text = String::from("k,p,q,d\n");
            for k in 1..=table.levels {
                text.push_str(&format!(
                    "{k},{},{},{}\n",
                    table.p(k),
                    table.q(k),
                    table.d(k)
                ));
            }
            text.push_str(&format!(
                "{},{},,\n",
                table.levels + 1,
                table.p(table.levels + 1)
            ));
            emit(g, &text)?;
        }
    }
    for c in report.failures() {
        eprintln!(
            "clause {:?} fails at k = {}: {}",
            c.clause,
            c.k,
            c.detail.as_deref().unwrap_or("")
        );
    }
    Ok(if report.pass { 0 } else { EXIT_CHECK })
}

/// Accepts a bare table or a whole `sequences` report.
fn load_table(path: &Path) -> Result<SequenceTable, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
    let inner = value
        .pointer("/result/table")
        .or_else(|| value.get("table"))
        .unwrap_or(&value)
        .clone();
    serde_json::from_value(inner).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn cmd_verify(g: &Global, table_path: Option<&Path>) -> Outcome {
    require_json(g, "verify")?;
    let started = Instant::now();
    let f = growth(g)?;
    let table = match table_path {
        Some(p) => load_table(p)?,
        None => build_table(g, &f)?,
    };
    let clauses = verify_clauses(&table, &f);
    let matrix = detection_matrix(&table).map_err(config)?;
    let diagonal = is_diagonal_pattern(&matrix);
    let rows: Vec<String> = matrix
        .iter()
        .map(|r| {
            r.iter()
                .map(|&trivial| if trivial { '.' } else { 'X' })
                .collect()
        })
        .collect();
    emit_json(
        g,
        "verify",
        json!({
            "f": f.to_string(),
            "K": table.levels,
            "clauses_pass": clauses.pass,
            "clause_failures": clauses.failures().collect::<Vec<_>>(),
            "trivial": matrix,
            "pattern": rows,
            "diagonal": diagonal,
        }),
        started,
    )?;
    if !diagonal {
        eprintln!("detection matrix is not diagonal");
    }
    if !clauses.pass {
        eprintln!("table fails its clause checks");
    }
    Ok(if diagonal && clauses.pass {
        0
    } else {
        EXIT_CHECK
    })
}

fn cmd_certificate(g: &Global, check: Option<&Path>) -> Outcome {
    require_json(g, "certificate")?;
    let started = Instant::now();
    let f = growth(g)?;
    if let Some(path) = check {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text).map_err(config)?;
        let inner = value
            .pointer("/result/certificate")
            .unwrap_or(&value)
            .clone();
        let cert: GrowthCertificate = serde_json::from_value(inner).map_err(config)?;
        let table = build_table(g, &f)?;
        let verdict = validate_certificate(&cert, &f, &table);
        let problems = verdict.as_ref().err().cloned().unwrap_or_default();
        emit_json(
            g,
            "certificate",
            json!({ "valid": verdict.is_ok(), "problems": problems }),
            started,
        )?;
        return Ok(if verdict.is_ok() { 0 } else { EXIT_CHECK });
    }
    let n = g.n.ok_or_else(|| config("certificate needs --n"))?;
    if n < 8 {
        return Err(config(format!("--n {n} is below 8")));
    }
    let table = build_table(g, &f)?;
    let cert = match growth_certificate(n, &f, &table) {
        Ok(c) => c,
        Err(e @ ModelError::TableTooShallow { .. }) => {
            return Err(Failure {
                code: EXIT_SHALLOW,
                message: e.to_string(),
            })
        }
        Err(e) => return Err(config(e)),
    };
    let verdict = validate_certificate(&cert, &f, &table);
    let problems = verdict.as_ref().err().cloned().unwrap_or_default();
    emit_json(
        g,
        "certificate",
        json!({ "certificate": to_value(&cert), "valid": verdict.is_ok(), "problems": problems }),
        started,
    )?;
    Ok(if verdict.is_ok() { 0 } else { EXIT_CHECK })
}

/// `N`, `a..b` (inclusive) or a comma list.
pub fn parse_radii(spec: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("bad radius spec {spec:?}");
    let radii: Vec<usize> = if let Some((a, b)) = spec.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if radii.is_empty() || radii.contains(&0) {
        return Err(bad());
    }
    Ok(radii)
}

fn load_presentation(path: &Path) -> Result<Presentation, Failure> {
    Presentation::load(path).map_err(config)
}

fn oracle_unavailable(message: String) -> Failure {
    Failure {
        code: EXIT_ORACLE,
        message,
    }
}

/// `Some(n)` when the presentation is `⟨a | a^n⟩`.
fn cyclic_order(p: &Presentation) -> Option<i64> {
    match p.relators() {
        [r] if p.rank() == 1 => {
            let sum = r.exponent_sums(1)[0];
            (r.len() as i64 == sum.abs()).then_some(sum.abs())
        }
        _ => None,
    }
}

/// True when the relators are exactly the commutators of generator pairs.
fn is_free_abelian(p: &Presentation) -> bool {
    let rank = p.rank();
    let mut pairs = Vec::new();
    for r in p.relators() {
        let l = r.letters();
        if l.len() != 4 || r.exponent_sums(rank).iter().any(|&v| v != 0) {
            return false;
        }
        let (x, y) = (l[0].gen(), l[1].gen());
        if x == y || l[2] != l[0].inverse() || l[3] != l[1].inverse() {
            return false;
        }
        pairs.push((x.min(y), x.max(y)));
    }
    pairs.sort();
    pairs.dedup();
    pairs.len() == rank * (rank - 1) / 2
}

fn select_oracle(p: &Presentation, choice: OracleChoice) -> Result<Box<dyn GroupOracle>, Failure> {
    let free = p.relators().is_empty();
    let picked: Option<Box<dyn GroupOracle>> = match choice {
        OracleChoice::Auto => {
            if free && p.rank() == 1 {
                Some(Box::new(IntegersOracle))
            } else if free {
                Some(Box::new(FreeOracle { rank: p.rank() }))
            } else if let Some(n) = cyclic_order(p) {
                Some(Box::new(CyclicOracle { n }))
            } else if is_free_abelian(p) {
                FreeAbelianOracle::new(p.rank())
                    .ok()
                    .map(|o| Box::new(o) as Box<dyn GroupOracle>)
            } else {
                None
            }
        }
        OracleChoice::Free => {
            free.then(|| Box::new(FreeOracle { rank: p.rank() }) as Box<dyn GroupOracle>)
        }
        OracleChoice::Integers => {
            (free && p.rank() == 1).then(|| Box::new(IntegersOracle) as Box<dyn GroupOracle>)
        }
        OracleChoice::Cyclic => {
            cyclic_order(p).map(|n| Box::new(CyclicOracle { n }) as Box<dyn GroupOracle>)
        }
        OracleChoice::Abelian => is_free_abelian(p)
            .then(|| FreeAbelianOracle::new(p.rank()).ok())
            .flatten()
            .map(|o| Box::new(o) as Box<dyn GroupOracle>),
    };
    picked.ok_or_else(|| {
        oracle_unavailable(format!(
            "no {} word-problem oracle matches this presentation",
            format!("{choice:?}").to_lowercase()
        ))
    })
}

fn limits(g: &Global) -> SearchLimits {
    SearchLimits {
        max_degree: g.max_degree,
        max_order: g.max_order,
        ..SearchLimits::default()
    }
}

fn quotient_failure(e: QuotientError) -> Failure {
    match e {
        QuotientError::Oracle(o) => oracle_unavailable(o.to_string()),
        other => config(other),
    }
}

fn cmd_rfgrowth(g: &Global, path: &Path, choice: OracleChoice) -> Outcome {
    let started = Instant::now();
    let radii = parse_radii(&g.radius).map_err(config)?;
    let p = load_presentation(path)?;
    let oracle = select_oracle(&p, choice)?;
    let lim = limits(g);
    let mut results = Vec::new();
    let mut timings = Vec::new();
    let mut csv = format!("{}\n", GrowthRow::CSV_HEADER);
    for &n in &radii {
        let v = rf_growth(&p, oracle.as_ref(), n, &lim).map_err(quotient_failure)?;
        let row = GrowthRow::new(&p, &v);
        csv.push_str(&row.to_csv());
        csv.push('\n');
        timings.push(json!({ "n": n, "elapsed_ms": row.elapsed_ms }));
        let elements: Vec<Value> = v
            .per_element
            .iter()
            .zip(element_reports(&p, &v))
            .map(|(e, r)| match r {
                Some(r) => to_value(&r),
                None => json!({ "element": p.render(&e.element), "min_order": null }),
            })
            .collect();
        results.push(json!({
            "n": n,
            "D": row.d,
            "witness_element": row.witness_element,
            "witness_min_order": row.witness_min_order,
            "certified": v.certified(),
            "elements": elements,
        }));
        if v.value.is_none() {
            eprintln!("n = {n}: some element is not detected within the search limits");
        }
    }
    match g.format {
        Format::Csv => emit(g, &csv)?,
        Format::Json => {
            let doc = json!({
                "command": "rfgrowth",
                "result": { "oracle": oracle.name(), "presentation": p.to_string(), "radii": results },
                "timing": { "elapsed_ms": started.elapsed().as_millis(), "per_radius": timings },
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            emit(g, &text)?;
        }
    }
    Ok(0)
}

fn cmd_quotients(
    g: &Global,
    path: &Path,
    elements: &[String],
    exhaustive: bool,
    unpruned: bool,
) -> Outcome {
    require_json(g, "quotients")?;
    let started = Instant::now();
    let p = load_presentation(path)?;
    let lim = SearchLimits {
        exhaustive,
        pruned: !unpruned,
        ..limits(g)
    };
    let words: Vec<Word> = elements
        .iter()
        .map(|e| p.parse_word(e).map_err(config))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for w in &words {
        let found = minimal_detecting_quotient(&p, w, &lim).map_err(quotient_failure)?;
        out.push(match found {
            Some(d) => to_value(&DetectionReport::new(&p, w, &d)),
            None => json!({ "element": p.render(w), "min_order": null }),
        });
    }
    emit_json(g, "quotients", Value::Array(out), started)?;
    Ok(0)
}
