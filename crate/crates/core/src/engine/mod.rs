//! Reduction of `V_{k,a_p}`: relations, per-step questions, Jordan–Hölder
//! assembly and the Galois side, with escalation in the radius and precision.

pub mod analysis;
pub mod jh;
pub mod relations;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{eval_ap, with_ring, ApExpression, ApValue, LocalRing, PrimeContext, RingVisitor};
use crate::tree::{CoordinateSpace, HeckeTables};
use crate::Rational;

pub use analysis::{analyze_filtration, eta_echelon, vanishing_start, EtaFrame, StepOutcome, StepReport};
pub use jh::{assemble_jh, jh_to_galois, GaloisRep, JhItem, JhSet, SmoothRepFactor};
pub use relations::{build_relations, Mode, RelationSpan};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Limits {
    pub n_max: u32,
    /// Fixed precision in p-digits minus one; no escalation in `d`.
    pub d_override: Option<u32>,
    pub mode: Mode,
    /// Use the other square root wherever a Hensel root enters `a_p`.
    pub conjugate: bool,
    /// Also answer the steps known to vanish, and step 1.
    pub compute_skipped: bool,
    pub experimental_p2: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { n_max: 6, d_override: None, mode: Mode::Subtree, conjugate: false, compute_skipped: false, experimental_p2: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRadius {
    pub c: u64,
    /// `(p − 1)·p^exponent`.
    pub exponent: u32,
    pub modulus: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub delta: Rational,
    pub ap_radius: String,
    pub weight: Option<WeightRadius>,
    pub reason: Option<String>,
}

fn floor_log(p: u64, c: u64) -> u32 {
    let mut e = 0;
    let mut q = p;
    while q <= c {
        q *= p;
        e += 1;
    }
    e
}

/// Radii of local constancy in `a_p` and in `k`.
pub fn constancy(delta: Rational, v_ap: Rational, k: u64, p: u64) -> ConstancyReport {
    let ap_radius = format!("v(a - a_p) > {delta}");
    let c = (v_ap + delta).floor().to_integer() as u64 + 1;
    if c * (p + 1) <= k.saturating_sub(2) {
        let exponent = 1 + delta.floor().to_integer() as u32 + floor_log(p, c);
        ConstancyReport {
            delta,
            ap_radius,
            weight: Some(WeightRadius { c, exponent, modulus: format!("{}*{p}^{exponent}", p - 1) }),
            reason: None,
        }
    } else {
        ConstancyReport {
            delta,
            ap_radius,
            weight: None,
            reason: Some(format!("c = {c} exceeds (k-2)/(p+1) = {}", Rational::new(k as i64 - 2, p as i64 + 1))),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timings {
    pub relations_ms: u64,
    pub analysis_ms: u64,
    pub total_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Reduction {
    pub p: u64,
    pub k: u64,
    pub ap: String,
    pub e: u32,
    pub eisenstein: String,
    pub v_ap: Rational,
    pub n_used: u32,
    pub d_used: u32,
    pub delta: Rational,
    pub outcomes: Vec<StepReport>,
    /// `None` when the limits were reached first.
    pub jh: Option<JhSet>,
    pub galois: Option<GaloisRep>,
    pub constancy: Option<ConstancyReport>,
    pub conjugate: bool,
    pub used_hensel: bool,
    pub timings: Timings,
}

impl Reduction {
    pub fn is_determined(&self) -> bool {
        self.galois.is_some()
    }
}

/// `⌊(r−1)/(p−1)⌋`, the bound on denominators per unit of radius.
pub fn denominator_step(p: u64, r: usize) -> u32 {
    if r == 0 {
        0
    } else {
        ((r as u64 - 1) / (p - 1)) as u32
    }
}

fn d_cap(p: u64, r: usize, n: u32) -> u32 {
    ((n + 1) * denominator_step(p, r)).max(1)
}

fn d_initial(p: u64, r: usize, n: u32) -> u32 {
    (2 * (n + 1)).min(d_cap(p, r, n))
}

struct RelVisitor<'a> {
    tab: &'a HeckeTables,
    ap: &'a ApValue,
    n: u32,
    mode: Mode,
}

impl RingVisitor for RelVisitor<'_> {
    type Output = Result<RelationSpan>;
    fn visit<R: LocalRing>(self, ring: R) -> Self::Output {
        let a = ring.from_field(&self.ap.value);
        build_relations(&ring, self.tab, a, self.n, self.mode)
    }
}

/// One pass at radius `n` and precision `p^{d+1}`.
pub struct Pass {
    pub span: RelationSpan,
    pub outcomes: Vec<StepReport>,
    pub relations_ms: u64,
    pub analysis_ms: u64,
}

pub fn run_pass(p: u64, k: u64, expr: &ApExpression, n: u32, d: u32, limits: &Limits) -> Result<Pass> {
    let r = (k - 2) as usize;
    let ctx = PrimeContext::new(p)?;
    let ap = eval_ap(expr, ctx, d + 1, limits.conjugate)?;
    let v = ap.valuation().ok_or_else(|| Error::InvalidInput("a_p vanishes at the working precision".into()))?;
    let tab = HeckeTables::new(p, r, d + 1)?;
    let t0 = Instant::now();
    let span = with_ring(&ap.field, RelVisitor { tab: &tab, ap: &ap, n, mode: limits.mode })??;
    let relations_ms = t0.elapsed().as_millis() as u64;
    let t1 = Instant::now();
    let space = CoordinateSpace::new(p, n + 1, r);
    let frame = EtaFrame::new(p, r, n + 1)?;
    let ech = eta_echelon(&frame, &space, &span.rows);
    let outcomes = analyze_filtration(&frame, &space, &ech, v.floor().to_integer(), limits.compute_skipped);
    Ok(Pass { span, outcomes, relations_ms, analysis_ms: t1.elapsed().as_millis() as u64 })
}

/// The Jordan–Hölder set determined by the outcomes, if any.
pub fn determine(p: u64, k: u64, outcomes: &[StepReport]) -> Result<Option<(JhSet, GaloisRep)>> {
    let mut cands = Vec::new();
    for s in outcomes {
        let o = match s.outcome {
            StepOutcome::SkippedByVanishing | StepOutcome::Zero => continue,
            StepOutcome::Unknown => return Ok(None),
            StepOutcome::Linear(l) => crate::linalg::Outcome::Linear(l),
            StepOutcome::Quadratic(m) => crate::linalg::Outcome::Quadratic(m),
        };
        match jh::outcome_factors(p, s.a, s.b, o)? {
            Some(f) => cands.extend(f),
            None => return Ok(None),
        }
    }
    let Some(set) = assemble_jh(p, &cands)? else { return Ok(None) };
    let g = jh_to_galois(p, k, &set)?;
    Ok(Some((set, g)))
}

/// Exact valuation of `a_p`; rejects `a_p = 0` and non-positive slopes.
pub fn ap_valuation(p: u64, expr: &ApExpression) -> Result<(Rational, ApValue)> {
    let ctx = PrimeContext::new(p)?;
    let ap = eval_ap(expr, ctx, ctx.cap, false)?;
    let v = ap.valuation().ok_or_else(|| {
        Error::InvalidInput("a_p = 0: this reduction is known in closed form and is not computed here".into())
    })?;
    if v <= Rational::from_integer(0) {
        return Err(Error::InvalidInput(format!("v(a_p) = {v} must be positive")));
    }
    Ok((v, ap))
}

pub fn compute_reduction(p: u64, k: u64, ap_text: &str, limits: &Limits) -> Result<Reduction> {
    let start = Instant::now();
    if k < 2 {
        return Err(Error::InvalidInput(format!("k = {k} must be at least 2")));
    }
    if p == 2 && !limits.experimental_p2 {
        return Err(Error::InvalidInput("p = 2 needs the experimental flag".into()));
    }
    let expr: ApExpression = ap_text.parse()?;
    let (v_ap, ap_full) = ap_valuation(p, &expr)?;
    let r = (k - 2) as usize;
    let steps = crate::symm::standard_filtration(p, r);
    let needs_q3 = steps.iter().any(|s| s.a + 2 == p && s.dim() > 0);
    let mut n = if needs_q3 { 2 } else { 1 }.min(limits.n_max);
    let mut d = limits.d_override.unwrap_or_else(|| d_initial(p, r, n));
    let mut timings = Timings::default();
    loop {
        let pass = run_pass(p, k, &expr, n, d, limits)?;
        timings.relations_ms += pass.relations_ms;
        timings.analysis_ms += pass.analysis_ms;
        if pass.span.saw_zero {
            if limits.d_override.is_some() {
                return Err(Error::PrecisionExhausted(format!("an elementary divisor exceeds d = {d}")));
            }
            let cap = d_cap(p, r, n);
            if d >= cap {
                return Err(Error::PrecisionExhausted(format!("an elementary divisor exceeds the bound {cap} at n = {n}")));
            }
            d = (d + 2).min(cap);
            continue;
        }
        let delta = Rational::new(pass.span.delta_units as i64, pass.span.ramification as i64);
        let found = determine(p, k, &pass.outcomes)?;
        if found.is_some() || n >= limits.n_max {
            timings.total_ms = start.elapsed().as_millis() as u64;
            let (jh, galois) = found.map_or((None, None), |(s, g)| (Some(s), Some(g)));
            let constancy = galois.map(|_| constancy(delta, v_ap, k, p));
            return Ok(Reduction {
                p,
                k,
                ap: ap_text.to_string(),
                e: ap_full.field.e,
                eisenstein: ap_full.field.eisenstein_string(),
                v_ap,
                n_used: n,
                d_used: d,
                delta,
                outcomes: pass.outcomes,
                jh,
                galois,
                constancy,
                conjugate: limits.conjugate,
                used_hensel: ap_full.used_hensel,
                timings,
            });
        }
        n += 1;
        if limits.d_override.is_none() {
            d = d.max(d_initial(p, r, n));
        }
    }
}
