use super::arith::{addmod, invmod, is_prime, mulmod, powmod, reduce_i128, submod, vp_residue};
use crate::error::{Error, Result};
use crate::Rational;

pub const MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeContext {
    pub p: u64,
    pub cap: u32,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let mut cap = 0;
        let mut q: u128 = 1;
        while q * p as u128 <= 1u128 << 62 {
            q *= p as u128;
            cap += 1;
        }
        Ok(PrimeContext { p, cap })
    }

    pub fn modulus(&self, n: u32) -> u64 {
        self.p.pow(n)
    }
}

/// `{0} ∪ μ_{p−1}` modulo `p^n`, indexed by residue mod p.
pub fn teichmuller_digits(ctx: PrimeContext, n: u32) -> Vec<u64> {
    assert!(n <= ctx.cap);
    let m = ctx.modulus(n);
    (0..ctx.p)
        .map(|k| {
            let mut x = k % m;
            for _ in 0..n {
                x = powmod(x, ctx.p, m);
            }
            x
        })
        .collect()
}

/// Square root of a unit `u` modulo `p^n` with reduction in `{1, …, ⌊p/2⌋}`.
pub fn hensel_sqrt(ctx: PrimeContext, u: i128, n: u32) -> Result<u64> {
    let p = ctx.p;
    let m = ctx.modulus(n);
    let um = reduce_i128(u, m);
    if um.is_multiple_of(p) {
        return Err(Error::InvalidInput(format!("{u} is not a p-adic unit")));
    }
    if p == 2 {
        if reduce_i128(u, 8) != 1 {
            return Err(Error::NotASquare(u));
        }
        let target = 1u128 << (n + 1);
        let uu = u.rem_euclid(1i128 << 100) as u128;
        let mut x: u128 = 1;
        let mut k = 3;
        while (1u128 << k) < target {
            let next = 1u128 << (k + 1);
            if (x * x) % next != uu % next {
                x += 1 << (k - 1);
            }
            k += 1;
        }
        let x = (x % m as u128) as u64;
        return Ok(if x % 4 == 1 { x } else { (m - x) % m });
    }
    let r0 = (1..=p / 2)
        .find(|&r| (r * r) % p == um % p)
        .ok_or(Error::NotASquare(u))?;
    let mut x = r0 % m;
    let mut prec = 1u32;
    while prec < n {
        prec = (prec * 2).min(n);
        let mk = ctx.modulus(prec);
        let f = submod(mulmod(x, x, mk), um % mk, mk);
        let inv = invmod(mulmod(2, x, mk), mk).expect("2x is a unit");
        x = submod(x % mk, mulmod(f, inv, mk), mk);
    }
    Ok(x % m)
}

/// Arithmetic on coefficient slices `Σ c_j ϖ^j` modulo `p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawField {
    pub p: u64,
    pub e: usize,
    pub n: u32,
    pub m: u64,
    rel: Vec<u64>,
    kappa: Vec<u64>,
    inv_eps_pows: Vec<Vec<u64>>,
}

impl RawField {
    /// `eis` holds the low coefficients `c_0..c_{e−1}` of the monic Eisenstein polynomial.
    fn new(p: u64, low: &[i128], n: u32) -> Self {
        let e = low.len();
        let m = p.pow(n);
        let rel: Vec<u64> = if e == 1 {
            vec![p % m]
        } else {
            low.iter().map(|&c| reduce_i128(-c, m)).collect()
        };
        let mut raw = RawField { p, e, n, m, rel, kappa: vec![0; e], inv_eps_pows: vec![] };
        let eps: Vec<u64> = if e == 1 {
            vec![1 % m]
        } else {
            low.iter().map(|&c| reduce_i128(-c / p as i128, m)).collect()
        };
        let inv_eps = raw.unit_inverse(&eps);
        let mut pows = vec![raw.one()];
        for q in 0..n as usize {
            let mut next = vec![0; e];
            raw.mul(&pows[q], &inv_eps, &mut next);
            pows.push(next);
        }
        raw.inv_eps_pows = pows;
        let mut kappa = vec![0; e];
        kappa[0] = 1 % m;
        for _ in 0..e - 1 {
            kappa = raw.mul_varpi(&kappa);
        }
        let mut k2 = vec![0; e];
        raw.mul(&kappa, &inv_eps, &mut k2);
        raw.kappa = k2;
        raw
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = vec![0; self.e];
        v[0] = 1 % self.m;
        v
    }

    pub fn mul(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let e = self.e;
        let m = self.m;
        if e == 1 {
            out[0] = mulmod(a[0], b[0], m);
            return;
        }
        let mut prod = [0u128; 2 * MAX_DEGREE];
        for i in 0..e {
            if a[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] += a[i] as u128 * b[j] as u128;
            }
        }
        let mm = m as u128;
        for x in prod.iter_mut().take(2 * e - 1) {
            *x %= mm;
        }
        for k in (e..2 * e - 1).rev() {
            let c = prod[k] % mm;
            if c == 0 {
                continue;
            }
            for j in 0..e {
                prod[k - e + j] += c * self.rel[j] as u128;
            }
        }
        for j in 0..e {
            out[j] = (prod[j] % mm) as u64;
        }
    }

    fn mul_varpi(&self, a: &[u64]) -> Vec<u64> {
        let e = self.e;
        let top = a[e - 1];
        let mut out = vec![0; e];
        for j in (1..e).rev() {
            out[j] = a[j - 1];
        }
        out[0] = 0;
        for j in 0..e {
            out[j] = addmod(out[j], mulmod(top, self.rel[j], self.m), self.m);
        }
        out
    }

    pub fn valuation(&self, a: &[u64]) -> Option<u32> {
        let mut best: Option<u32> = None;
        for (j, &c) in a.iter().enumerate() {
            if c != 0 {
                let v = self.e as u32 * vp_residue(c, self.p, self.n) + j as u32;
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        best
    }

    pub fn unit_inverse(&self, a: &[u64]) -> Vec<u64> {
        let e = self.e;
        let m = self.m;
        let r = invmod(a[0] % self.p, self.p).expect("unit");
        if e == 1 {
            return vec![invmod(a[0], m).expect("unit")];
        }
        let mut y = vec![0; e];
        y[0] = r % m;
        let target = e as u32 * self.n;
        let mut prec = 1u32;
        let mut t = vec![0; e];
        let mut y2 = vec![0; e];
        while prec < target {
            self.mul(a, &y, &mut t);
            for (j, c) in t.iter_mut().enumerate() {
                let two = if j == 0 { 2 % m } else { 0 };
                *c = submod(two, *c, m);
            }
            self.mul(&y, &t, &mut y2);
            std::mem::swap(&mut y, &mut y2);
            prec *= 2;
        }
        y
    }

    /// `y` with `y·ϖ^s ≡ a (mod p^n)`; requires `v(a) ≥ s`.
    pub fn shift_down(&self, a: &[u64], s: u32, out: &mut [u64]) {
        let e = self.e as u32;
        let q = s / e;
        let rem = s % e;
        let pq = self.p.pow(q);
        let scaled: Vec<u64> = a.iter().map(|&c| c / pq).collect();
        debug_assert!(a.iter().all(|&c| c % pq == 0));
        if self.e == 1 {
            out[0] = scaled[0];
            return;
        }
        let mut y = vec![0; self.e];
        self.mul(&scaled, &self.inv_eps_pows[q as usize], &mut y);
        for _ in 0..rem {
            let c0 = y[0] / self.p;
            debug_assert!(y[0].is_multiple_of(self.p));
            let mut next = vec![0; self.e];
            next[..(self.e - 1)].copy_from_slice(&y[1..]);
            for j in 0..self.e {
                next[j] = addmod(next[j], mulmod(c0, self.kappa[j], self.m), self.m);
            }
            y = next;
        }
        out.copy_from_slice(&y);
    }

    pub fn residue(&self, a: &[u64]) -> u64 {
        a[0] % self.p
    }

    pub fn add_into(&self, a: &mut [u64], b: &[u64]) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = addmod(*x, y, self.m);
        }
    }

    pub fn sub_into(&self, a: &mut [u64], b: &[u64]) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = submod(*x, y, self.m);
        }
    }

    pub fn varpi(&self) -> Vec<u64> {
        let mut v = vec![0; self.e];
        if self.e == 1 {
            v[0] = self.p % self.m;
        } else {
            v[1] = 1 % self.m;
        }
        v
    }
}

/// A totally ramified extension of Q_p given by an Eisenstein polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalField {
    pub ctx: PrimeContext,
    pub e: u32,
    /// Monic polynomial, coefficients from low to high degree.
    pub eis: Vec<i128>,
    /// Working precision in ϖ-units.
    pub precision: u32,
    raw: RawField,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    pub coeffs: Vec<u64>,
    /// Absolute precision in ϖ-units.
    pub known_precision: u32,
}

pub fn make_field(ctx: PrimeContext, eis: &[i128], m: u32) -> Result<LocalField> {
    let deg = eis.len().checked_sub(1).ok_or_else(|| Error::InvalidInput("empty polynomial".into()))?;
    if deg == 0 {
        return Err(Error::InvalidInput("constant polynomial".into()));
    }
    if eis[deg] != 1 {
        return Err(Error::NotEisenstein("not monic".into()));
    }
    if deg > MAX_DEGREE {
        return Err(Error::UnsupportedExtension(format!("degree {deg} exceeds {MAX_DEGREE}")));
    }
    let p = ctx.p as i128;
    if deg > 1 {
        if eis[..deg].iter().any(|c| c % p != 0) {
            return Err(Error::NotEisenstein("p does not divide every lower coefficient".into()));
        }
        if eis[0] % (p * p) == 0 {
            return Err(Error::NotEisenstein("p^2 divides the constant term".into()));
        }
    }
    let e = deg as u32;
    let n = m.div_ceil(e).max(1);
    if n > ctx.cap {
        return Err(Error::ResourceLimit(format!("precision p^{n} exceeds the word size")));
    }
    let low: Vec<i128> = if deg == 1 { vec![0] } else { eis[..deg].to_vec() };
    let raw = RawField::new(ctx.p, &low, n);
    Ok(LocalField { ctx, e, eis: eis.to_vec(), precision: m, raw })
}

impl LocalField {
    pub fn p(&self) -> u64 {
        self.ctx.p
    }

    /// Precision in p-digits of every coefficient.
    pub fn digits(&self) -> u32 {
        self.raw.n
    }

    pub fn raw(&self) -> &RawField {
        &self.raw
    }

    pub fn with_precision(&self, m: u32) -> Result<LocalField> {
        make_field(self.ctx, &self.eis, m)
    }

    pub fn is_ramified(&self) -> bool {
        self.e > 1
    }

    fn wrap(&self, coeffs: Vec<u64>) -> FieldElement {
        FieldElement { coeffs, known_precision: self.e * self.raw.n }
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(vec![0; self.e as usize])
    }

    pub fn from_int(&self, x: i128) -> FieldElement {
        let mut c = vec![0; self.e as usize];
        c[0] = reduce_i128(x, self.raw.m);
        self.wrap(c)
    }

    pub fn uniformizer(&self) -> FieldElement {
        self.wrap(self.raw.varpi())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut c = a.coeffs.clone();
        self.raw.add_into(&mut c, &b.coeffs);
        self.wrap(c)
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut c = a.coeffs.clone();
        self.raw.sub_into(&mut c, &b.coeffs);
        self.wrap(c)
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut c = vec![0; self.e as usize];
        self.raw.mul(&a.coeffs, &b.coeffs, &mut c);
        self.wrap(c)
    }

    pub fn pow(&self, a: &FieldElement, k: u32) -> FieldElement {
        let mut r = self.from_int(1);
        for _ in 0..k {
            r = self.mul(&r, a);
        }
        r
    }

    /// Valuation in ϖ-units, `None` for zero at working precision.
    pub fn valuation_units(&self, a: &FieldElement) -> Option<u32> {
        self.raw.valuation(&a.coeffs)
    }

    pub fn valuation(&self, a: &FieldElement) -> Option<Rational> {
        self.valuation_units(a).map(|v| Rational::new(v as i64, self.e as i64))
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    /// Divide by `u·ϖ^s` where `u` is a unit and `v(a) ≥ s`.
    pub fn div_varpi_unit(&self, a: &FieldElement, s: u32, u: &FieldElement) -> Result<FieldElement> {
        if let Some(v) = self.valuation_units(a) {
            if v < s {
                return Err(Error::InvalidInput(format!("valuation {v} below shift {s}")));
            }
        }
        if self.valuation_units(u) != Some(0) {
            return Err(Error::InvalidInput("divisor is not a unit times a power of the uniformizer".into()));
        }
        let mut y = vec![0; self.e as usize];
        self.raw.shift_down(&a.coeffs, s, &mut y);
        let inv = self.raw.unit_inverse(&u.coeffs);
        let mut out = vec![0; self.e as usize];
        self.raw.mul(&y, &inv, &mut out);
        Ok(FieldElement { coeffs: out, known_precision: a.known_precision - s })
    }

    /// `ϖ^{−v(x)}·x`.
    pub fn normalize(&self, a: &FieldElement) -> Option<FieldElement> {
        let v = self.valuation_units(a)?;
        let mut y = vec![0; self.e as usize];
        self.raw.shift_down(&a.coeffs, v, &mut y);
        Some(FieldElement { coeffs: y, known_precision: a.known_precision - v })
    }

    pub fn residue(&self, a: &FieldElement) -> u64 {
        self.raw.residue(&a.coeffs)
    }

    pub fn eisenstein_string(&self) -> String {
        let mut parts = vec![];
        for (i, &c) in self.eis.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            let mag = c.unsigned_abs();
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag == 1 {
                mono
            } else {
                format!("{mag}*{mono}")
            };
            if parts.is_empty() {
                parts.push(if c < 0 { format!("-{body}") } else { body });
            } else {
                parts.push(format!("{} {}", if c < 0 { "-" } else { "+" }, body));
            }
        }
        if self.e == 1 {
            return "x".into();
        }
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_examples() {
        let c2 = PrimeContext::new(2).unwrap();
        assert_eq!(teichmuller_digits(c2, 3), vec![0, 1]);
        let c3 = PrimeContext::new(3).unwrap();
        assert_eq!(teichmuller_digits(c3, 3), vec![0, 1, 26]);
        let c5 = PrimeContext::new(5).unwrap();
        assert_eq!(teichmuller_digits(c5, 2), vec![0, 1, 7, 18, 24]);
    }

    #[test]
    fn teichmuller_brute_force() {
        for p in [3u64, 5, 7, 11] {
            let ctx = PrimeContext::new(p).unwrap();
            for n in 1..5 {
                let m = p.pow(n);
                let mut roots: Vec<u64> =
                    (1..m).filter(|&x| powmod(x, p - 1, m) == 1).collect();
                roots.push(0);
                roots.sort();
                let mut got = teichmuller_digits(ctx, n);
                for (k, &d) in got.iter().enumerate() {
                    assert_eq!(d % p, k as u64);
                }
                got.sort();
                assert_eq!(got, roots);
            }
        }
    }

    #[test]
    fn hensel_examples() {
        let c5 = PrimeContext::new(5).unwrap();
        assert_eq!(hensel_sqrt(c5, 1, 7).unwrap(), 1);
        assert_eq!(hensel_sqrt(c5, 4, 3).unwrap(), 2);
        assert_eq!(hensel_sqrt(c5, 231, 2).unwrap(), 16);
        assert_eq!(hensel_sqrt(c5, 7, 2), Err(Error::NotASquare(7)));
        let c2 = PrimeContext::new(2).unwrap();
        let r = hensel_sqrt(c2, 17, 10).unwrap();
        assert_eq!((r * r) % 1024, 17);
        assert_eq!(hensel_sqrt(c2, 5, 10), Err(Error::NotASquare(5)));
    }

    #[test]
    fn hensel_refines() {
        for p in [3u64, 5, 7, 13] {
            let ctx = PrimeContext::new(p).unwrap();
            for u in 1..200i128 {
                let Ok(top) = hensel_sqrt(ctx, u, 12) else { continue };
                for n in 1..12 {
                    let m = p.pow(n);
                    let x = hensel_sqrt(ctx, u, n).unwrap();
                    assert_eq!(mulmod(x, x, m), reduce_i128(u, m));
                    assert_eq!(top % m, x);
                }
            }
        }
    }

    #[test]
    fn field_examples() {
        let c5 = PrimeContext::new(5).unwrap();
        let f = make_field(c5, &[0, 1], 8).unwrap();
        assert_eq!(f.e, 1);
        assert_eq!(f.digits(), 8);
        let g = make_field(c5, &[-35, 0, 1], 8).unwrap();
        let w = g.uniformizer();
        assert_eq!(g.valuation(&w), Some(Rational::new(1, 2)));
        assert_eq!(g.mul(&w, &w), g.from_int(35));
        let c7 = PrimeContext::new(7).unwrap();
        let h = make_field(c7, &[-7, 0, 0, 1], 9).unwrap();
        let w = h.uniformizer();
        assert_eq!(h.valuation(&w), Some(Rational::new(1, 3)));
        assert_eq!(h.pow(&w, 3), h.from_int(7));
        assert!(matches!(make_field(c5, &[-25, 0, 1], 8), Err(Error::NotEisenstein(_))));
        assert!(matches!(make_field(c5, &[-5, 1, 1], 8), Err(Error::NotEisenstein(_))));
    }

    #[test]
    fn division_by_uniformizer_powers() {
        let c5 = PrimeContext::new(5).unwrap();
        let g = make_field(c5, &[-10, 5, 1], 12).unwrap();
        let w = g.uniformizer();
        let u = g.add(&g.from_int(3), &w);
        for s in 0..7 {
            let x = g.mul(&g.pow(&w, s), &g.add(&g.from_int(7), &g.mul(&w, &g.from_int(2))));
            let y = g.div_varpi_unit(&x, s, &u).unwrap();
            let back = g.mul(&g.mul(&y, &u), &g.pow(&w, s));
            assert_eq!(back, x, "s = {s}");
        }
    }
}
