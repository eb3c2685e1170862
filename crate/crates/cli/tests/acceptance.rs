//! One PASS/FAIL line per acceptance criterion. Exits nonzero on a FAIL only
//! when ACCEPTANCE_STRICT is set.

#[allow(dead_code)]
#[path = "../../core/tests/oracles/hecke.rs"]
mod hecke;
#[allow(dead_code)]
#[path = "../../core/tests/oracles/binomial.rs"]
mod binomial;
#[allow(dead_code)]
#[path = "../../core/tests/oracles/smith.rs"]
mod smith;
#[allow(dead_code)]
#[path = "../../core/tests/oracles/theta.rs"]
mod theta;

use std::time::Instant;

use crysred::engine::{denominator_step, run_pass, vanishing_start};
use crysred::linalg::FpEchelon;
use crysred::padic::ApExpression;
use crysred::{compute_reduction, Limits, Mode, Rational, Reduction, StepOutcome};
use crysred_cli::{load_corpus, run_corpus, RowResult};

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, n: u32, title: &str, ok: bool, detail: String, t: Instant) {
        if !ok {
            self.failed += 1;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} criterion {n}: {title}: {detail} [{:.1}s]", t.elapsed().as_secs_f64());
    }
}

fn ok(r: &RowResult) -> Option<&Reduction> {
    r.result.as_ref().ok()
}

fn select<'a>(results: &'a [RowResult], keys: &[(u64, u64)]) -> Vec<&'a RowResult> {
    results.iter().filter(|r| keys.contains(&(r.row.p, r.row.k))).collect()
}

fn summary(rows: &[&RowResult], pass: impl Fn(&RowResult) -> bool) -> (bool, String) {
    let bad: Vec<String> = rows.iter().filter(|r| !pass(r)).map(|r| format!("line {} ({})", r.row.line, r.row.ap)).collect();
    let good = rows.len() - bad.len();
    let detail = if bad.is_empty() {
        format!("{good}/{} rows", rows.len())
    } else {
        format!("{good}/{} rows; failing: {}", rows.len(), bad.join(", "))
    };
    (bad.is_empty(), detail)
}

fn galois_delta(r: &RowResult) -> bool {
    r.check.as_ref().is_some_and(|c| c.galois && c.delta)
}

fn spans_agree(red: &Reduction) -> Result<bool, crysred::Error> {
    let expr: ApExpression = red.ap.parse()?;
    let limits = |mode| Limits { mode, conjugate: red.conjugate, ..Limits::default() };
    let a = run_pass(red.p, red.k, &expr, red.n_used, red.d_used, &limits(Mode::Baseline))?;
    let b = run_pass(red.p, red.k, &expr, red.n_used, red.d_used, &limits(Mode::Subtree))?;
    let mut ea = FpEchelon::new(red.p);
    for row in &a.span.rows {
        ea.insert(row);
    }
    let mut eb = FpEchelon::new(red.p);
    for row in &b.span.rows {
        eb.insert(row);
    }
    Ok(a.span.delta_units == b.span.delta_units
        && a.span.saw_zero == b.span.saw_zero
        && ea.rank() == eb.rank()
        && ea.pivot_columns() == eb.pivot_columns()
        && b.span.rows.iter().all(|row| ea.residual(row, 0).is_empty())
        && a.outcomes == b.outcomes)
}

fn main() {
    let strict = std::env::var_os("ACCEPTANCE_STRICT").is_some();
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/examples.txt");
    let rows = load_corpus(&path).expect("corpus");
    let mut report = Report { failed: 0 };

    let t = Instant::now();
    let results = run_corpus(&rows, &Limits::default());
    println!("corpus: {} rows in {:.1}s", results.len(), t.elapsed().as_secs_f64());
    for r in &results {
        println!("  {}", r.line());
    }

    let t = Instant::now();
    let (pass, detail) = summary(&select(&results, &[(5, 24), (5, 44)]), |r| {
        galois_delta(r) && r.check.as_ref().is_some_and(|c| c.n)
    });
    report.line(1, "slope 1, p = 5, k = 24 and 44 (reduction, delta, n)", pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = summary(&select(&results, &[(5, 17), (5, 25), (7, 47), (3, 23)]), |r| {
        galois_delta(r) && r.check.as_ref().is_some_and(|c| c.steps)
    });
    report.line(2, "slope 3/2 (reduction, delta, nonzero F_i)", pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = summary(&select(&results, &[(7, 31), (5, 27)]), RowResult::pass);
    report.line(3, "slope 5/2 (reduction, delta, n, nonzero F_i)", pass, detail, t);

    let t = Instant::now();
    let runs: Vec<&Reduction> = results.iter().filter_map(ok).collect();
    let bound = |red: &Reduction, m: u32| red.delta <= Rational::from_integer(((red.n_used + 1) * m) as i64);
    let within = runs.iter().filter(|r| bound(r, denominator_step(r.p, (r.k - 2) as usize))).count();
    let small = runs.iter().filter(|r| bound(r, 2)).count();
    report.line(
        4,
        "delta <= (n+1)*floor((r-1)/(p-1)) on every run",
        within == runs.len() && runs.len() == results.len(),
        format!("{within}/{} runs; delta <= 2(n+1) on {small}/{} (reported only)", results.len(), runs.len()),
        t,
    );

    let t = Instant::now();
    let (sc, sb) = smith::smith_mismatches(600);
    let (hc, hb) = hecke::hecke_mismatches(4, 1);
    let (tc, tb) = theta::theta_mismatches(200);
    let fast: Vec<&Reduction> = results.iter().filter(|r| !r.row.slow).filter_map(ok).collect();
    let mut modes_bad = Vec::new();
    for red in &fast {
        if !spans_agree(red).unwrap_or(false) {
            modes_bad.push(red.ap.clone());
        }
    }
    let fast_total = results.iter().filter(|r| !r.row.slow).count();
    report.line(
        5,
        "oracle equivalence",
        sb == 0 && hb == 0 && tb == 0 && modes_bad.is_empty() && fast.len() == fast_total && sc >= 500,
        format!(
            "smith {sb}/{sc} mismatches; hecke {hb}/{hc}; theta {tb}/{tc}; baseline vs subtree spans {}/{fast_total} fast rows agree{}",
            fast.len() - modes_bad.len(),
            if modes_bad.is_empty() { String::new() } else { format!(" (differ: {})", modes_bad.join(", ")) }
        ),
        t,
    );

    let t = Instant::now();
    let (uc, ub) = binomial::summodp_failures(300);
    let (dc, db) = binomial::determinant_failures();
    report.line(
        6,
        "binomial identities",
        ub == 0 && db == 0,
        format!("sum mod p {ub} failures in {uc}; determinant {db} failures in {dc}"),
        t,
    );

    let t = Instant::now();
    let picks = [(5u64, 24u64, "2*5"), (5, 17, "5*sqrt(5)*13*sqrt(7)"), (7, 31, "7^2*sqrt(7)"), (5, 27, "5^2*sqrt(5)*51 + 5^3")];
    let mut lines = Vec::new();
    let mut all = true;
    for (p, k, ap) in picks {
        let Some(base) = results.iter().find(|r| (r.row.p, r.row.k, r.row.ap.as_str()) == (p, k, ap)).and_then(ok) else {
            all = false;
            continue;
        };
        let e = base.delta.ceil().to_integer() + 1;
        let moved = format!("{ap} + 2*{p}^{e}");
        let limits = Limits { conjugate: base.conjugate, ..Limits::default() };
        let same = compute_reduction(p, k, &moved, &limits).is_ok_and(|r| r.galois == base.galois && r.galois.is_some());
        all &= same;
        lines.push(format!("{moved}: {}", if same { "same" } else { "differs" }));
    }
    report.line(7, "local constancy in a_p", all && lines.len() == picks.len(), lines.join("; "), t);

    let t = Instant::now();
    let det_ok = runs.iter().filter_map(|r| r.galois.map(|g| (g, r))).all(|(g, r)| g.check_determinant(r.p, r.k).is_ok());
    let step1 = runs.iter().all(|r| r.outcomes.iter().all(|s| s.i != 1 || s.outcome == StepOutcome::Zero));
    let mut skipped_ok = true;
    let mut computed = 0;
    for (p, k, ap) in [(5u64, 24u64, "2*5"), (5, 27, "5^2*sqrt(10)")] {
        let l = Limits { compute_skipped: true, ..Limits::default() };
        match compute_reduction(p, k, ap, &l) {
            Ok(red) => {
                let from = vanishing_start(p, (k - 2) as usize, red.v_ap.floor().to_integer()).unwrap_or(usize::MAX);
                for s in red.outcomes.iter().filter(|s| s.i == 1 || s.i >= from) {
                    computed += 1;
                    skipped_ok &= s.outcome == StepOutcome::Zero;
                }
            }
            Err(_) => skipped_ok = false,
        }
    }
    report.line(
        8,
        "structural invariants",
        det_ok && step1 && skipped_ok && computed > 0,
        format!(
            "determinant {}; step 1 zero {}; {computed} skipped steps computed in debug mode, all zero {}",
            det_ok, step1, skipped_ok
        ),
        t,
    );

    if report.failed > 0 {
        println!("{} criteria failed", report.failed);
        if strict {
            std::process::exit(1);
        }
    }
}
