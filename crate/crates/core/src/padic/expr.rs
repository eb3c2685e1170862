//! Input syntax for a_p and its evaluation in a local field.

use std::collections::BTreeMap;
use std::fmt;

use super::arith::{exact_isqrt, invmod, reduce_i128, vp};
use super::field::{hensel_sqrt, make_field, FieldElement, LocalField, PrimeContext};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApExpression {
    Int(i128),
    P,
    Neg(Box<ApExpression>),
    Add(Box<ApExpression>, Box<ApExpression>),
    Sub(Box<ApExpression>, Box<ApExpression>),
    Mul(Box<ApExpression>, Box<ApExpression>),
    Pow(Box<ApExpression>, u32),
    Sqrt(Box<ApExpression>),
    Root(Box<ApExpression>, u32),
}

impl fmt::Display for ApExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ApExpression::*;
        match self {
            Int(n) => write!(f, "{n}"),
            P => write!(f, "p"),
            Neg(a) => write!(f, "-({a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "{a}*{b}"),
            Pow(a, k) => write!(f, "({a})^{k}"),
            Sqrt(a) => write!(f, "sqrt({a})"),
            Root(a, d) => write!(f, "root({a},{d})"),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn expr(&mut self) -> Result<ApExpression> {
        let mut lhs = if self.eat(b'-') {
            ApExpression::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                lhs = ApExpression::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = ApExpression::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ApExpression> {
        let mut lhs = self.factor()?;
        while self.eat(b'*') {
            lhs = ApExpression::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<ApExpression> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            let k = self.uint()?;
            let k = u32::try_from(k).map_err(|_| self.err("exponent too large"))?;
            base = ApExpression::Pow(Box::new(base), k);
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<i128> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse::<i128>()
            .map_err(|_| self.err("integer literal too large"))
    }

    fn word(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<ApExpression> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(ApExpression::Int(self.uint()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let w = self.word();
                match w.as_str() {
                    "p" => Ok(ApExpression::P),
                    "sqrt" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(ApExpression::Sqrt(Box::new(e)))
                    }
                    "root" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b',')?;
                        let d = self.uint()?;
                        self.expect(b')')?;
                        if !(2..=64).contains(&d) {
                            return Err(self.err("root degree must be between 2 and 64"));
                        }
                        Ok(ApExpression::Root(Box::new(e), d as u32))
                    }
                    _ => Err(self.err(&format!("unknown identifier '{w}'"))),
                }
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

impl std::str::FromStr for ApExpression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser { s: s.as_bytes(), pos: 0 };
        let e = parser.expr()?;
        if parser.peek().is_some() {
            return Err(parser.err("trailing input"));
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    sq: i128,
    root: Option<(i128, u32)>,
    rexp: u32,
}

/// Formal sum `Σ c·√sq·root^rexp`.
type Formal = BTreeMap<Key, i128>;

fn overflow() -> Error {
    Error::InvalidInput("integer overflow while expanding a_p".into())
}

fn formal_int(n: i128) -> Formal {
    let mut f = Formal::new();
    if n != 0 {
        f.insert(Key { sq: 1, root: None, rexp: 0 }, n);
    }
    f
}

fn as_int(f: &Formal) -> Option<i128> {
    match f.len() {
        0 => Some(0),
        1 => {
            let (k, &c) = f.iter().next().unwrap();
            (k.sq == 1 && k.rexp == 0).then_some(c)
        }
        _ => None,
    }
}

fn add_formal(a: &Formal, b: &Formal, sign: i128) -> Result<Formal> {
    let mut out = a.clone();
    for (k, &c) in b {
        let e = out.entry(*k).or_insert(0);
        *e = e.checked_add(c.checked_mul(sign).ok_or_else(overflow)?).ok_or_else(overflow)?;
        if *e == 0 {
            out.remove(k);
        }
    }
    Ok(out)
}

fn mul_key(a: Key, b: Key) -> Result<(Key, i128)> {
    let mut coeff = 1i128;
    let mut sq = a.sq.checked_mul(b.sq).ok_or_else(overflow)?;
    if let Some(r) = exact_isqrt(sq) {
        coeff = r;
        sq = 1;
    }
    let root = match (a.root, b.root) {
        (Some(x), Some(y)) if x != y => {
            return Err(Error::UnsupportedExtension("two different roots".into()))
        }
        (x, y) => x.or(y),
    };
    let mut rexp = a.rexp + b.rexp;
    if let Some((n, d)) = root {
        while rexp >= d {
            rexp -= d;
            coeff = coeff.checked_mul(n).ok_or_else(overflow)?;
        }
    }
    let root = if rexp == 0 { None } else { root };
    Ok((Key { sq, root, rexp }, coeff))
}

fn mul_formal(a: &Formal, b: &Formal) -> Result<Formal> {
    let mut out = Formal::new();
    for (ka, &ca) in a {
        for (kb, &cb) in b {
            let (k, c) = mul_key(*ka, *kb)?;
            let c = c.checked_mul(ca).and_then(|x| x.checked_mul(cb)).ok_or_else(overflow)?;
            let e = out.entry(k).or_insert(0);
            *e = e.checked_add(c).ok_or_else(overflow)?;
            if *e == 0 {
                out.remove(&k);
            }
        }
    }
    Ok(out)
}

fn expand(e: &ApExpression, p: i128) -> Result<Formal> {
    use ApExpression::*;
    Ok(match e {
        Int(n) => formal_int(*n),
        P => formal_int(p),
        Neg(a) => add_formal(&Formal::new(), &expand(a, p)?, -1)?,
        Add(a, b) => add_formal(&expand(a, p)?, &expand(b, p)?, 1)?,
        Sub(a, b) => add_formal(&expand(a, p)?, &expand(b, p)?, -1)?,
        Mul(a, b) => mul_formal(&expand(a, p)?, &expand(b, p)?)?,
        Pow(a, k) => {
            let base = expand(a, p)?;
            let mut acc = formal_int(1);
            for _ in 0..*k {
                acc = mul_formal(&acc, &base)?;
            }
            acc
        }
        Sqrt(a) => {
            let n = as_int(&expand(a, p)?)
                .ok_or_else(|| Error::UnsupportedExtension("sqrt of a non-integer".into()))?;
            if n == 0 {
                Formal::new()
            } else if let Some(r) = exact_isqrt(n) {
                formal_int(r)
            } else {
                let mut f = Formal::new();
                f.insert(Key { sq: n, root: None, rexp: 0 }, 1);
                f
            }
        }
        Root(a, d) => {
            let n = as_int(&expand(a, p)?)
                .ok_or_else(|| Error::UnsupportedExtension("root of a non-integer".into()))?;
            if n == 0 {
                Formal::new()
            } else {
                let mut f = Formal::new();
                f.insert(Key { sq: 1, root: Some((n, *d)), rexp: 1 }, 1);
                f
            }
        }
    })
}

/// a_p evaluated in the field it generates.
#[derive(Debug, Clone)]
pub struct ApValue {
    pub field: LocalField,
    pub value: FieldElement,
    /// Whether a Hensel square root entered the value (the sign choice matters).
    pub used_hensel: bool,
}

impl ApValue {
    pub fn valuation(&self) -> Option<Rational> {
        self.field.valuation(&self.value)
    }
}

enum Generator {
    None,
    Sqrt { unit: i128 },
    Root { d: u32, unit: i128, strip: u32 },
}

/// Evaluate `expr` with every coefficient known modulo `p^digits`.
/// `conjugate` selects the other Hensel square root everywhere.
pub fn eval_ap(expr: &ApExpression, ctx: PrimeContext, digits: u32, conjugate: bool) -> Result<ApValue> {
    let p = ctx.p as i128;
    let formal = expand(expr, p)?;
    let mut gen = Generator::None;
    for k in formal.keys() {
        if let Some((n, d)) = k.root {
            let v = vp(n, ctx.p);
            let strip = v / d;
            let rest = v % d;
            if rest != 1 {
                return Err(Error::UnsupportedExtension(format!(
                    "root({n},{d}) does not give an Eisenstein polynomial"
                )));
            }
            match gen {
                Generator::None => {
                    gen = Generator::Root { d, unit: n / p.pow(v), strip };
                }
                Generator::Root { .. } => {}
                Generator::Sqrt { .. } => {
                    return Err(Error::UnsupportedExtension("more than one ramified generator".into()))
                }
            }
        }
    }
    for k in formal.keys() {
        if k.sq != 1 && vp(k.sq, ctx.p) % 2 == 1 {
            match gen {
                Generator::None => {
                    let v = vp(k.sq, ctx.p);
                    gen = Generator::Sqrt { unit: k.sq / p.pow(v) };
                }
                Generator::Sqrt { .. } => {}
                Generator::Root { .. } => {
                    return Err(Error::UnsupportedExtension("more than one ramified generator".into()))
                }
            }
        }
    }
    let eis: Vec<i128> = match gen {
        Generator::None => vec![0, 1],
        Generator::Sqrt { unit } => vec![-(p * unit), 0, 1],
        Generator::Root { d, unit, .. } => {
            let mut v = vec![0; d as usize + 1];
            v[0] = -(p * unit);
            v[d as usize] = 1;
            v
        }
    };
    let e = eis.len() as u32 - 1;
    let field = make_field(ctx, &eis, e * digits)?;
    let m = ctx.modulus(digits);
    let mut used_hensel = false;
    let mut hensel = |u: i128| -> Result<FieldElement> {
        let root = hensel_sqrt(ctx, u, digits).map_err(|err| match err {
            Error::NotASquare(_) => Error::UnsupportedExtension(format!(
                "sqrt needs a residue field extension ({u} is not a square mod {p})"
            )),
            other => other,
        })?;
        used_hensel = true;
        let x = field.from_int(root as i128);
        Ok(if conjugate { field.neg(&x) } else { x })
    };
    let mut total = field.zero();
    for (k, &c) in &formal {
        let mut term = field.from_int(reduce_i128(c, m) as i128);
        if k.sq != 1 {
            let v = vp(k.sq, ctx.p);
            let u = k.sq / p.pow(v);
            let ppow = field.from_int(p.pow(v / 2));
            let root = if v.is_multiple_of(2) {
                field.mul(&ppow, &hensel(u)?)
            } else {
                let Generator::Sqrt { unit } = gen else { unreachable!() };
                let inv = invmod(reduce_i128(unit, m), m).expect("unit");
                let ratio = reduce_i128(u, m) as i128 * inv as i128 % m as i128;
                let h = if u == unit { field.from_int(1) } else { hensel(ratio)? };
                field.mul(&field.mul(&ppow, &h), &field.uniformizer())
            };
            term = field.mul(&term, &root);
        }
        if k.rexp > 0 {
            let Generator::Root { strip, .. } = gen else { unreachable!() };
            let rho = field.mul(&field.from_int(p.pow(strip)), &field.uniformizer());
            term = field.mul(&term, &field.pow(&rho, k.rexp));
        }
        total = field.add(&total, &term);
    }
    Ok(ApValue { field, value: total, used_hensel })
}
