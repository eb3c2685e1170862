//! Irreducible mod p representations of GL_2(Q_p), the table of possible
//! Jordan–Hölder sets, and the Galois side of the correspondence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Outcome;
use crate::padic::arith::invmod;

/// Exponent of ω modulo `p − 1`.
fn md(x: i64, p: u64) -> u64 {
    x.rem_euclid((p as i64 - 1).max(1)) as u64
}

fn inv(x: u64, p: u64) -> u64 {
    invmod(x, p).expect("nonzero")
}

/// `[x] ∈ {1, …, p−1}` with `[x] ≡ x mod p − 1`.
fn bracket(x: i64, p: u64) -> u64 {
    crate::symm::bracket(x, p)
}

/// An irreducible smooth representation over F_p, in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SmoothRepFactor {
    /// `π(r, λ, ω^b)`.
    Pi { r: u64, lambda: u64, b: u64 },
    /// `St ⊗ ω^b unr(λ)`, `λ = ±1`.
    Steinberg { lambda: u64, b: u64 },
    /// `ω^b unr(λ) ∘ det`, `λ = ±1`.
    Character { lambda: u64, b: u64 },
    /// `π(p−2, λ, ω^b) ⊕ π(p−2, λ^{−1}, ω^b)` with `λ ∉ F_p`, `λ + λ^{−1} = μ`.
    QuadraticPair { mu: u64, b: u64 },
}

/// Jordan–Hölder factors of `π(r, λ, ω^b)`.
pub fn pi_factors(p: u64, r: u64, lambda: u64, b: i64) -> Vec<SmoothRepFactor> {
    let lambda = lambda % p;
    let b = md(b, p);
    if lambda == 0 {
        let other = (p - 1 - r, md(b as i64 + r as i64, p));
        let (r, b) = (r, b).min(other);
        return vec![SmoothRepFactor::Pi { r, lambda: 0, b }];
    }
    if r == 0 || r == p - 1 {
        if lambda == 1 || lambda == p - 1 {
            return vec![SmoothRepFactor::Steinberg { lambda, b }, SmoothRepFactor::Character { lambda, b }];
        }
        return vec![SmoothRepFactor::Pi { r: 0, lambda, b }];
    }
    vec![SmoothRepFactor::Pi { r, lambda, b }]
}

/// Roots of `x² − μx + 1` in F_p.
pub fn quadratic_roots(p: u64, mu: u64) -> Option<(u64, u64)> {
    (1..p).find(|&x| (x * x % p + 1 + p * p - mu * x % p).is_multiple_of(p)).map(|x| (x, inv(x, p)))
}

fn chi(b: u64, lambda: u64, p: u64) -> String {
    let w = match b {
        0 => String::new(),
        1 => "w".to_string(),
        _ => format!("w^{b}"),
    };
    let u = if lambda == 1 || lambda == 0 { String::new() } else { format!("unr({lambda})") };
    match (w.is_empty(), u.is_empty()) {
        (true, true) => "1".into(),
        (false, true) => w,
        (true, false) => u,
        (false, false) => {
            let _ = p;
            format!("{w}*{u}")
        }
    }
}

impl SmoothRepFactor {
    pub fn display(&self, p: u64) -> String {
        match *self {
            SmoothRepFactor::Pi { r, lambda, b } => format!("pi({r},{lambda},{})", chi(b, 1, p)),
            SmoothRepFactor::Steinberg { lambda, b } => format!("St*{}", chi(b, lambda, p)),
            SmoothRepFactor::Character { lambda, b } => chi(b, lambda, p),
            SmoothRepFactor::QuadraticPair { mu, b } => {
                let t = match mu {
                    0 => "T^2+1".to_string(),
                    1 => "T^2-T+1".to_string(),
                    _ => format!("T^2-{mu}T+1"),
                };
                format!("I(sigma_{}({b}))/({t})", p.saturating_sub(2))
            }
        }
    }
}

/// An element of the table of possible Jordan–Hölder sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JhItem {
    /// `{π(r, 0, ω^b)}`.
    Supersingular { r: u64, b: u64 },
    /// `{π(r, λ, ω^b), π([p−3−r], λ^{−1}, ω^{b+r+1})}`.
    Pair { r: u64, lambda: u64, b: u64 },
    /// The irreducible-over-F_p pair at `r = p − 2`.
    Quadratic { mu: u64, b: u64 },
    /// `{St ⊗ ω^b unr(λ), ω^b unr(λ), π(p−3, λ, ω^{b+1})}` for `p > 3`, and the
    /// four-element analogue for `p = 3`.
    Special { lambda: u64, b: u64 },
    /// `p = 2`: Steinberg and trivial twice each.
    Dyadic { b: u64 },
}

impl JhItem {
    /// Number of the item in the table, 1 to 6.
    pub fn number(&self, p: u64) -> u8 {
        match self {
            JhItem::Supersingular { .. } => 1,
            JhItem::Pair { .. } => 2,
            JhItem::Quadratic { .. } => 3,
            JhItem::Special { .. } => {
                if p == 3 {
                    5
                } else {
                    4
                }
            }
            JhItem::Dyadic { .. } => 6,
        }
    }

    /// The multiset of factors, sorted.
    pub fn factors(&self, p: u64) -> Vec<SmoothRepFactor> {
        let mut out = match *self {
            JhItem::Supersingular { r, b } => pi_factors(p, r, 0, b as i64),
            JhItem::Pair { r, lambda, b } => {
                let mut v = pi_factors(p, r, lambda, b as i64);
                v.extend(pi_factors(p, bracket(p as i64 - 3 - r as i64, p), inv(lambda, p), b as i64 + r as i64 + 1));
                v
            }
            JhItem::Quadratic { mu, b } => vec![SmoothRepFactor::QuadraticPair { mu, b }],
            JhItem::Special { lambda, b } => {
                let mut v = pi_factors(p, 0, lambda, b as i64);
                if p == 3 {
                    v.extend(pi_factors(p, 0, lambda, b as i64 + 1));
                } else {
                    v.extend(pi_factors(p, p - 3, lambda, b as i64 + 1));
                }
                v
            }
            JhItem::Dyadic { b } => {
                let mut v = pi_factors(p, 0, 1, b as i64);
                v.extend(pi_factors(p, 0, 1, b as i64));
                v
            }
        };
        out.sort();
        out
    }

    /// The Galois representation attached by the correspondence.
    pub fn galois(&self, p: u64) -> GaloisRep {
        let q = p * p - 1;
        match *self {
            JhItem::Supersingular { r, b } => GaloisRep::induced(p, (r + 1 + b * (p + 1)) % q),
            JhItem::Pair { r, lambda, b } => {
                GaloisRep::reducible(p, md((r + 1 + b) as i64, p), lambda, b, inv(lambda, p))
            }
            JhItem::Quadratic { mu, b } => GaloisRep::Split { n: b, c: mu },
            JhItem::Special { lambda, b } => GaloisRep::reducible(p, md(b as i64 + 1, p), lambda, b, lambda),
            JhItem::Dyadic { b } => GaloisRep::Split { n: b, c: 0 },
        }
    }
}

/// Every table entry over F_p, one parameterization per distinct set.
pub fn jh_table(p: u64) -> Vec<(JhItem, Vec<SmoothRepFactor>)> {
    let nb = (p - 1).max(1);
    let mut items = Vec::new();
    for b in 0..nb {
        for r in 0..p {
            items.push(JhItem::Supersingular { r, b });
        }
        for lambda in 1..p {
            for r in 0..p {
                let pm = lambda == 1 || lambda == p - 1;
                let excluded = [0, p as i64 - 3, p as i64 - 1].contains(&(r as i64));
                if !excluded || !pm {
                    items.push(JhItem::Pair { r, lambda, b });
                }
            }
        }
        for mu in 0..p {
            if quadratic_roots(p, mu).is_none() {
                items.push(JhItem::Quadratic { mu, b });
            }
        }
        if p == 2 {
            items.push(JhItem::Dyadic { b });
        } else {
            for lambda in [1, p - 1] {
                items.push(JhItem::Special { lambda, b });
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for it in items {
        let f = it.factors(p);
        if seen.insert(f.clone()) {
            out.push((it, f));
        }
    }
    out
}

/// A determined Jordan–Hölder set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JhSet {
    pub item: JhItem,
    pub factors: Vec<SmoothRepFactor>,
}

/// Candidate factors contributed by one step with graded piece `σ_a(b)`.
pub fn outcome_factors(p: u64, a: u64, b: u64, outcome: Outcome) -> Result<Option<Vec<SmoothRepFactor>>> {
    Ok(Some(match outcome {
        Outcome::Zero => Vec::new(),
        Outcome::Unknown => return Ok(None),
        Outcome::Linear(lambda) => pi_factors(p, a, lambda, b as i64),
        Outcome::Quadratic(mu) => match quadratic_roots(p, mu) {
            Some((l1, l2)) => {
                let mut v = pi_factors(p, a, l1, b as i64);
                v.extend(pi_factors(p, a, l2, b as i64));
                v
            }
            None if a + 2 == p || p == 2 => vec![SmoothRepFactor::QuadraticPair { mu, b }],
            None => {
                return Err(Error::InconsistentTable(format!(
                    "T^2-{mu}T+1 is irreducible but σ_{a}({b}) is not σ_(p-2)"
                )))
            }
        },
    }))
}

fn contains(big: &[SmoothRepFactor], small: &[SmoothRepFactor]) -> bool {
    let mut pool = big.to_vec();
    small.iter().all(|f| match pool.iter().position(|g| g == f) {
        Some(k) => {
            pool.swap_remove(k);
            true
        }
        None => false,
    })
}

/// The unique table entry containing `f`.
pub fn enclosing_set(p: u64, f: SmoothRepFactor) -> Result<JhSet> {
    let mut hits = jh_table(p).into_iter().filter(|(_, fs)| fs.contains(&f));
    match (hits.next(), hits.next()) {
        (Some((item, factors)), None) => Ok(JhSet { item, factors }),
        (None, _) => Err(Error::InconsistentTable(f.display(p))),
        (Some(_), Some(_)) => Err(Error::InconsistentTable(format!("{} lies in two table entries", f.display(p)))),
    }
}

/// The unique table entry contained in the candidate multiset, if any.
pub fn assemble_jh(p: u64, candidates: &[SmoothRepFactor]) -> Result<Option<JhSet>> {
    let mut found: Vec<JhSet> = Vec::new();
    for &f in candidates {
        let s = enclosing_set(p, f)?;
        if contains(candidates, &s.factors) && !found.contains(&s) {
            found.push(s);
        }
    }
    Ok(if found.len() == 1 { found.pop() } else { None })
}

/// Semi-simple two-dimensional mod p representation with determinant a power of ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaloisRep {
    /// `ind ω_2^m`, with `m = min(m, pm mod p²−1)`.
    Induced { m: u64 },
    /// `ω^a unr(λ) ⊕ ω^b unr(μ)` with `a ≢ b`, ordered by `(a, λ)`.
    Reducible { a: u64, lambda: u64, b: u64, mu: u64 },
    /// `I_{n,c}`.
    Split { n: u64, c: u64 },
}

impl GaloisRep {
    pub fn induced(p: u64, m: u64) -> Self {
        let q = p * p - 1;
        let m = m % q;
        GaloisRep::Induced { m: m.min(m * p % q) }
    }

    pub fn reducible(p: u64, a: u64, lambda: u64, b: u64, mu: u64) -> Self {
        let (a, b) = (md(a as i64, p), md(b as i64, p));
        let (lambda, mu) = (lambda % p, mu % p);
        if a == b {
            return GaloisRep::Split { n: a, c: (lambda + mu) % p };
        }
        let ((a, lambda), (b, mu)) = if (a, lambda) <= (b, mu) { ((a, lambda), (b, mu)) } else { ((b, mu), (a, lambda)) };
        GaloisRep::Reducible { a, lambda, b, mu }
    }

    /// Exponent of the determinant as a power of ω, modulo `p − 1`.
    pub fn det_exponent(&self, p: u64) -> u64 {
        match *self {
            GaloisRep::Induced { m } => md(m as i64, p),
            GaloisRep::Reducible { a, b, .. } => md((a + b) as i64, p),
            GaloisRep::Split { n, .. } => md(2 * n as i64, p),
        }
    }

    /// Checks `det = ω^{k−1}` and that the unramified parts multiply to 1.
    pub fn check_determinant(&self, p: u64, k: u64) -> Result<()> {
        if self.det_exponent(p) != md(k as i64 - 1, p) {
            return Err(Error::DeterminantMismatch(format!("{} has det ω^{} but k−1 = {}", self.display(), self.det_exponent(p), k - 1)));
        }
        if let GaloisRep::Reducible { lambda, mu, .. } = *self {
            if lambda * mu % p != 1 {
                return Err(Error::DeterminantMismatch(format!("{}: unramified parts do not multiply to 1", self.display())));
            }
        }
        Ok(())
    }

    pub fn display(&self) -> String {
        match *self {
            GaloisRep::Induced { m } => format!("ind w2^{m}"),
            GaloisRep::Reducible { a, lambda, b, mu } => format!("{} + {}", chi(a, lambda, 0), chi(b, mu, 0)),
            GaloisRep::Split { n, c } => format!("I_{{{n},{c}}}"),
        }
    }

    /// Parses the text form with `p` known, normalizing exponents and `unr(−1)`.
    pub fn parse(p: u64, s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot read Galois representation {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(m) = t.strip_prefix("indw2^") {
            let m: u64 = m.trim_matches(|c| c == '{' || c == '}').parse().map_err(|_| bad())?;
            return Ok(GaloisRep::induced(p, m));
        }
        if let Some(rest) = t.strip_prefix("I_{").and_then(|x| x.strip_suffix('}')) {
            let (n, c) = rest.split_once(',').ok_or_else(bad)?;
            let n: i64 = n.parse().map_err(|_| bad())?;
            let c: i64 = c.parse().map_err(|_| bad())?;
            return Ok(GaloisRep::Split { n: md(n, p), c: c.rem_euclid(p as i64) as u64 });
        }
        let (x, y) = t.split_once('+').ok_or_else(bad)?;
        let term = |z: &str| -> Result<(u64, u64)> {
            let mut e = 0i64;
            let mut lam = 1i64;
            for part in z.split('*').filter(|q| !q.is_empty()) {
                if part == "1" {
                } else if part == "w" {
                    e = 1;
                } else if let Some(k) = part.strip_prefix("w^") {
                    e = k.trim_matches(|c| c == '{' || c == '}').parse().map_err(|_| bad())?;
                } else if let Some(l) = part.strip_prefix("unr(").and_then(|q| q.strip_suffix(')')) {
                    lam = l.parse().map_err(|_| bad())?;
                } else {
                    return Err(bad());
                }
            }
            Ok((md(e, p), lam.rem_euclid(p as i64) as u64))
        };
        let ((a, l), (b, m)) = (term(x)?, term(y)?);
        Ok(GaloisRep::reducible(p, a, l, b, m))
    }
}

impl fmt::Display for GaloisRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

/// `p`-independent parse for round trips of already canonical text.
impl FromStr for GaloisRep {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GaloisRep::parse(u64::MAX / 4, s)
    }
}

/// The Galois side of a determined set, with the determinant check.
pub fn jh_to_galois(p: u64, k: u64, s: &JhSet) -> Result<GaloisRep> {
    let g = s.item.galois(p);
    g.check_determinant(p, k)?;
    Ok(g)
}
