//! JSON and table rendering of reductions, and the reproduction corpus runner.

use std::path::Path;
use std::time::Instant;

use crysred::{compute_reduction, Error, GaloisRep, Limits, Rational, Reduction, StepOutcome};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 3;
pub const EXIT_RESOURCE_LIMIT: i32 = 4;
pub const EXIT_UNDETERMINED: i32 = 5;
pub const EXIT_INTERNAL: i32 = 6;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Parse(_) | Error::NotASquare(_) | Error::NotEisenstein(_) | Error::UnsupportedExtension(_) => {
            EXIT_INVALID_INPUT
        }
        Error::ResourceLimit(_) | Error::PrecisionExhausted(_) => EXIT_RESOURCE_LIMIT,
        _ => EXIT_INTERNAL,
    }
}

fn outcome_json(o: &StepOutcome) -> (&'static str, Value) {
    match *o {
        StepOutcome::Zero => ("zero", Value::Null),
        StepOutcome::Linear(l) => ("linear", json!(l)),
        StepOutcome::Quadratic(m) => ("quadratic", json!(m)),
        StepOutcome::Unknown => ("unknown", Value::Null),
        StepOutcome::SkippedByVanishing => ("skipped_by_vanishing", Value::Null),
    }
}

pub fn galois_json(g: &GaloisRep) -> Value {
    let mut params = serde_json::to_value(g).expect("serializable");
    let kind = params.as_object_mut().and_then(|m| m.remove("kind")).unwrap_or(Value::Null);
    json!({ "kind": kind, "params": params, "display": g.display() })
}

/// The machine-readable report. `timings` adds wall-clock fields, which makes
/// the output run-dependent.
pub fn reduction_json(red: &Reduction, timings: bool) -> Value {
    let outcomes: Vec<Value> = red
        .outcomes
        .iter()
        .map(|s| {
            let (kind, value) = outcome_json(&s.outcome);
            json!({ "i": s.i, "a": s.a, "b": s.b, "kind": kind, "value": value })
        })
        .collect();
    let jh: Option<Vec<String>> = red.jh.as_ref().map(|s| s.factors.iter().map(|f| f.display(red.p)).collect());
    let constancy = red.constancy.as_ref().map(|c| {
        json!({
            "ap_radius": c.ap_radius,
            "weight_modulus": c.weight.as_ref().map(|w| w.modulus.clone()),
            "reason": c.reason,
        })
    });
    json!({
        "p": red.p,
        "k": red.k,
        "ap": red.ap,
        "field": { "e": red.e, "eisenstein": red.eisenstein },
        "root": if red.conjugate { "conjugate" } else { "canonical" },
        "v_ap": red.v_ap.to_string(),
        "n_used": red.n_used,
        "d_used": red.d_used,
        "delta": red.delta.to_string(),
        "outcomes": outcomes,
        "jh": jh,
        "galois": red.galois.as_ref().map(galois_json),
        "constancy": constancy,
        "timings_ms": if timings {
            json!({ "relations": red.timings.relations_ms, "analysis": red.timings.analysis_ms, "total": red.timings.total_ms })
        } else {
            Value::Null
        },
    })
}

pub fn outcome_text(o: &StepOutcome) -> String {
    match *o {
        StepOutcome::Zero => "0".into(),
        StepOutcome::Linear(l) => format!("linear, lambda = {l}"),
        StepOutcome::Quadratic(m) => format!("quadratic, mu = {m}"),
        StepOutcome::Unknown => "unknown".into(),
        StepOutcome::SkippedByVanishing => "0 (vanishing)".into(),
    }
}

pub fn reduction_table(red: &Reduction, timings: bool) -> String {
    let mut s = String::new();
    let galois = red.galois.map_or("undetermined".to_string(), |g| g.display());
    s += &format!("p = {}, k = {}, a_p = {}\n", red.p, red.k, red.ap);
    s += &format!("field: e = {}, {}\n", red.e, red.eisenstein);
    if red.used_hensel {
        s += &format!("root: {}\n", if red.conjugate { "conjugate" } else { "canonical" });
    }
    s += &format!("v(a_p) = {}\n", red.v_ap);
    s += &format!("reduction: {galois}\n");
    s += &format!("delta = {}  (n = {}, d = {})\n", red.delta, red.n_used, red.d_used);
    s += "steps:\n";
    for o in &red.outcomes {
        s += &format!("  F_{:<3} sigma_{}({})  {}\n", o.i, o.a, o.b, outcome_text(&o.outcome));
    }
    if let Some(jh) = &red.jh {
        let f: Vec<String> = jh.factors.iter().map(|f| f.display(red.p)).collect();
        s += &format!("JH: {{{}}}  (item {})\n", f.join(", "), jh.item.number(red.p));
    }
    if let Some(c) = &red.constancy {
        s += &format!("constant for {}\n", c.ap_radius);
        match (&c.weight, &c.reason) {
            (Some(w), _) => s += &format!("constant for k' = k mod {}\n", w.modulus),
            (None, Some(r)) => s += &format!("no weight radius: {r}\n"),
            _ => {}
        }
    }
    if timings {
        s += &format!(
            "time: relations {} ms, analysis {} ms, total {} ms\n",
            red.timings.relations_ms, red.timings.analysis_ms, red.timings.total_ms
        );
    }
    s
}

/// Expected kind of a nonzero graded piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepCode {
    Linear(u64),
    Quadratic(u64),
    Any,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusRow {
    pub line: usize,
    pub p: u64,
    pub k: u64,
    pub ap: String,
    pub galois: String,
    pub delta: Rational,
    pub n: u32,
    pub slow: bool,
    pub steps: Vec<(usize, StepCode)>,
    /// Replacement for a table value that fails the determinant condition.
    pub erratum: Option<String>,
}

fn parse_code(s: &str) -> Option<(usize, StepCode)> {
    let (f, c) = s.split_once('=')?;
    let i = f.strip_prefix('F')?.parse().ok()?;
    let code = match c.split_at(1) {
        ("*", "") => StepCode::Any,
        ("L", l) => StepCode::Linear(l.parse().ok()?),
        ("Q", m) => StepCode::Quadratic(m.parse().ok()?),
        _ => return None,
    };
    Some((i, code))
}

fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((a, b)) => Some(Rational::new(a.trim().parse().ok()?, b.trim().parse().ok()?)),
        None => Some(Rational::from_integer(s.trim().parse().ok()?)),
    }
}

pub fn parse_corpus(text: &str) -> crysred::Result<Vec<CorpusRow>> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Parse(format!("corpus line {}: {line:?}", ln + 1));
        let f: Vec<&str> = line.split(';').map(str::trim).collect();
        if f.len() < 7 {
            return Err(bad());
        }
        let mut steps = Vec::new();
        let mut erratum = None;
        for extra in &f[7..] {
            if let Some(e) = extra.strip_prefix("erratum:") {
                erratum = Some(e.trim().to_string());
            } else {
                for code in extra.split_whitespace() {
                    steps.push(parse_code(code).ok_or_else(bad)?);
                }
            }
        }
        rows.push(CorpusRow {
            line: ln + 1,
            p: f[0].parse().map_err(|_| bad())?,
            k: f[1].parse().map_err(|_| bad())?,
            ap: f[2].to_string(),
            galois: f[3].to_string(),
            delta: parse_rational(f[4]).ok_or_else(bad)?,
            n: f[5].parse().map_err(|_| bad())?,
            slow: match f[6] {
                "slow" => true,
                "fast" => false,
                _ => return Err(bad()),
            },
            steps,
            erratum,
        });
    }
    Ok(rows)
}

pub fn load_corpus(path: &Path) -> crysred::Result<Vec<CorpusRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    parse_corpus(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    Fast,
    Slow,
    All,
}

impl std::str::FromStr for Filter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fast" => Ok(Filter::Fast),
            "slow" => Ok(Filter::Slow),
            "all" => Ok(Filter::All),
            _ => Err(format!("unknown filter {s:?}")),
        }
    }
}

impl Filter {
    pub fn keeps(&self, row: &CorpusRow) -> bool {
        match self {
            Filter::Fast => !row.slow,
            Filter::Slow => row.slow,
            Filter::All => true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RowCheck {
    pub galois: bool,
    /// The table value fails the determinant condition and the erratum matched.
    pub by_erratum: bool,
    pub delta: bool,
    pub n: bool,
    pub steps: bool,
}

impl RowCheck {
    pub fn pass(&self) -> bool {
        self.galois && self.delta && self.n && self.steps
    }
}

#[derive(Debug, Clone)]
pub struct RowResult {
    pub row: CorpusRow,
    pub result: Result<Reduction, Error>,
    pub check: Option<RowCheck>,
    pub seconds: f64,
}

impl RowResult {
    pub fn pass(&self) -> bool {
        self.check.as_ref().is_some_and(RowCheck::pass)
    }

    pub fn line(&self) -> String {
        let r = &self.row;
        let head = format!("p={} k={} ap={}", r.p, r.k, r.ap);
        match (&self.result, &self.check) {
            (Err(e), _) => format!("FAIL {head}: error: {e}"),
            (Ok(red), Some(c)) => {
                let got = red.galois.map_or("undetermined".into(), |g| g.display());
                let mut why = Vec::new();
                if !c.galois {
                    why.push(format!("galois {got} != {}", r.galois));
                }
                if !c.delta {
                    why.push(format!("delta {} != {}", red.delta, r.delta));
                }
                if !c.n {
                    why.push(format!("n {} > {}", red.n_used, r.n));
                }
                if !c.steps {
                    let s: Vec<String> = red
                        .outcomes
                        .iter()
                        .filter(|o| !matches!(o.outcome, StepOutcome::Zero | StepOutcome::SkippedByVanishing))
                        .map(|o| format!("F{}={}", o.i, outcome_text(&o.outcome)))
                        .collect();
                    why.push(format!("steps [{}]", s.join(", ")));
                }
                let root = if red.used_hensel { if red.conjugate { " root=conjugate" } else { " root=canonical" } } else { "" };
                let note = if c.by_erratum { format!(" (table value {} corrected to {})", r.galois, got) } else { String::new() };
                let status = if c.pass() { "PASS" } else { "FAIL" };
                let tail = if why.is_empty() { String::new() } else { format!(": {}", why.join("; ")) };
                format!(
                    "{status} {head}: {got}, delta {}, n {}{root}{note} [{:.1}s]{tail}",
                    red.delta, red.n_used, self.seconds
                )
            }
            (Ok(_), None) => format!("FAIL {head}: unchecked"),
        }
    }
}

fn check_row(row: &CorpusRow, red: &Reduction) -> crysred::Result<RowCheck> {
    let expected = GaloisRep::parse(row.p, &row.galois)?;
    let mut galois = red.galois == Some(expected);
    let mut by_erratum = false;
    if !galois && expected.check_determinant(row.p, row.k).is_err() {
        if let Some(e) = &row.erratum {
            by_erratum = red.galois == Some(GaloisRep::parse(row.p, e)?);
            galois = by_erratum;
        }
    }
    let steps = red.outcomes.iter().all(|o| {
        let want = row.steps.iter().find(|s| s.0 == o.i).map(|s| s.1);
        match (want, o.outcome) {
            (None, StepOutcome::Zero | StepOutcome::SkippedByVanishing) => true,
            (Some(StepCode::Any), StepOutcome::Linear(_) | StepOutcome::Quadratic(_)) => true,
            (Some(StepCode::Linear(l)), StepOutcome::Linear(x)) => l == x,
            (Some(StepCode::Quadratic(m)), StepOutcome::Quadratic(x)) => m == x,
            _ => false,
        }
    }) && row.steps.iter().all(|s| red.outcomes.iter().any(|o| o.i == s.0));
    Ok(RowCheck { galois, by_erratum, delta: red.delta == row.delta, n: red.n_used <= row.n, steps })
}

/// Runs one row with the canonical root, and with the conjugate root when a
/// Hensel root entered `a_p` and the first run does not match.
pub fn run_row(row: &CorpusRow, limits: &Limits) -> RowResult {
    let t = Instant::now();
    let mut limits = limits.clone();
    limits.conjugate = false;
    let attempt = |limits: &Limits| -> (Result<Reduction, Error>, Option<RowCheck>) {
        match compute_reduction(row.p, row.k, &row.ap, limits) {
            Ok(red) => match check_row(row, &red) {
                Ok(c) => (Ok(red), Some(c)),
                Err(e) => (Err(e), None),
            },
            Err(e) => (Err(e), None),
        }
    };
    let (mut result, mut check) = attempt(&limits);
    let retry = matches!(&result, Ok(red) if red.used_hensel) && !check.as_ref().is_some_and(|c| c.galois);
    if retry {
        limits.conjugate = true;
        let (r2, c2) = attempt(&limits);
        if c2.as_ref().is_some_and(|c| c.galois) {
            (result, check) = (r2, c2);
        }
    }
    RowResult { row: row.clone(), result, check, seconds: t.elapsed().as_secs_f64() }
}

/// Runs the rows in parallel on the current rayon pool, keeping file order.
pub fn run_corpus(rows: &[CorpusRow], limits: &Limits) -> Vec<RowResult> {
    use rayon::prelude::*;
    rows.par_iter().map(|r| run_row(r, limits)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_lines() {
        let rows = parse_corpus("# c\n5; 24; 2*5; ind w2^3; 2; 2; fast; F0=*\n\n5; 27; x; ind w2^8; 4; 3; slow; F2=L0; erratum: ind w2^2\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].steps, vec![(0, StepCode::Any)]);
        assert_eq!(rows[1].erratum.as_deref(), Some("ind w2^2"));
        assert!(rows[1].slow);
        assert_eq!(rows[1].line, 4);
        assert!(parse_corpus("5; 24; 2*5; ind w2^3; 2; 2; quick").is_err());
    }
}
