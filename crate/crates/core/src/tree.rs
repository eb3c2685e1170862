//! Vertices of the Bruhat–Tits tree of GL₂(Q_p), compactly induced vectors
//! and the Hecke operator T.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::arith::{mulmod, BinomialTable};
use crate::padic::{teichmuller_digits, LocalRing, PrimeContext};

/// `g^ε_{n,μ}`; `mu` packs the Teichmüller digit indices of `μ` as a base-p
/// integer whose most significant digit is the coefficient of `p^0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeVertex {
    pub eps: u8,
    pub n: u32,
    pub mu: u64,
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g^{}_{{{},{}}}", self.eps, self.n, self.mu)
    }
}

impl TreeVertex {
    pub const ORIGIN: TreeVertex = TreeVertex { eps: 0, n: 0, mu: 0 };

    pub fn new(eps: u8, n: u32, mu: u64) -> Self {
        TreeVertex { eps, n, mu }
    }

    /// Build from digit indices, `digits[k]` being the digit of `p^k`.
    pub fn from_digits(eps: u8, digits: &[u64], p: u64) -> Self {
        let mu = digits.iter().fold(0, |acc, &d| acc * p + d);
        TreeVertex { eps, n: digits.len() as u32, mu }
    }

    pub fn digits(&self, p: u64) -> Vec<u64> {
        let mut out = vec![0; self.n as usize];
        let mut mu = self.mu;
        for k in (0..self.n as usize).rev() {
            out[k] = mu % p;
            mu /= p;
        }
        out
    }

    pub fn digit(&self, p: u64, pos: u32) -> u64 {
        (self.mu / p.pow(self.n - 1 - pos)) % p
    }

    pub fn distance(&self) -> u32 {
        self.n + self.eps as u32
    }

    pub fn child(&self, p: u64, u: u64) -> Self {
        TreeVertex { eps: self.eps, n: self.n + 1, mu: self.mu * p + u }
    }

    /// `(λ̲, λ′)` with `λ = λ̲ + p^{n−1}λ′`.
    pub fn parent(&self, p: u64) -> (Self, u64) {
        (TreeVertex { eps: self.eps, n: self.n - 1, mu: self.mu / p }, self.mu % p)
    }
}

/// `B_n` in the order: distance, then ε, then digits.
pub fn enumerate_ball(p: u64, n: u32) -> Vec<TreeVertex> {
    let ball = Ball::new(p, n);
    (0..ball.len()).map(|i| ball.vertex(i)).collect()
}

/// Dense indexing of the vertices of `B_radius`.
#[derive(Debug, Clone)]
pub struct Ball {
    pub p: u64,
    pub radius: u32,
    offsets: Vec<usize>,
}

impl Ball {
    pub fn new(p: u64, radius: u32) -> Self {
        let mut offsets = vec![0, 1];
        for d in 1..=radius as usize {
            let circle = p.pow(d as u32) + p.pow(d as u32 - 1);
            offsets.push(offsets[d] + circle as usize);
        }
        Ball { p, radius, offsets }
    }

    pub fn len(&self) -> usize {
        self.offsets[self.radius as usize + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn circle_size(&self, d: u32) -> usize {
        self.offsets[d as usize + 1] - self.offsets[d as usize]
    }

    pub fn circle_start(&self, d: u32) -> usize {
        self.offsets[d as usize]
    }

    pub fn contains(&self, v: TreeVertex) -> bool {
        v.distance() <= self.radius
    }

    pub fn index(&self, v: TreeVertex) -> usize {
        let d = v.distance();
        let base = self.offsets[d as usize];
        if v.eps == 0 {
            base + v.mu as usize
        } else {
            base + self.p.pow(d) as usize + v.mu as usize
        }
    }

    pub fn vertex(&self, idx: usize) -> TreeVertex {
        let d = match self.offsets.binary_search(&idx) {
            Ok(d) => d,
            Err(d) => d - 1,
        } as u32;
        if d == 0 {
            return TreeVertex::ORIGIN;
        }
        let off = idx - self.offsets[d as usize];
        let full = self.p.pow(d) as usize;
        if off < full {
            TreeVertex::new(0, d, off as u64)
        } else {
            TreeVertex::new(1, d - 1, (off - full) as u64)
        }
    }
}

/// Coordinates `(vertex, i)` of `I_{B_radius}(Symm^r)` as dense integers.
#[derive(Debug, Clone)]
pub struct CoordinateSpace {
    pub ball: Ball,
    pub r: usize,
}

impl CoordinateSpace {
    pub fn new(p: u64, radius: u32, r: usize) -> Self {
        CoordinateSpace { ball: Ball::new(p, radius), r }
    }

    pub fn len(&self) -> usize {
        self.ball.len() * (self.r + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn id(&self, v: TreeVertex, i: usize) -> u32 {
        (self.ball.index(v) * (self.r + 1) + i) as u32
    }

    #[inline]
    pub fn split(&self, id: u32) -> (TreeVertex, usize) {
        let id = id as usize;
        (self.ball.vertex(id / (self.r + 1)), id % (self.r + 1))
    }
}

/// `(g^0_{n,μ}, i) = [g^0_{n,μ}, X^{r−i}Y^i]` and `(g^1_{n,μ}, i) = [g^1_{n,μ}, X^iY^{r−i}]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordinateIndex {
    pub vertex: TreeVertex,
    pub i: usize,
}

/// Integer coefficients of T on basis vectors, reduced modulo `p^digits`.
#[derive(Debug, Clone)]
pub struct HeckeTables {
    pub p: u64,
    pub r: usize,
    pub digits: u32,
    pub modulus: u64,
    pub teich: Vec<u64>,
    plus: Vec<u64>,
    minus: Vec<u64>,
}

impl HeckeTables {
    pub fn new(p: u64, r: usize, digits: u32) -> Result<Self> {
        let ctx = PrimeContext::new(p)?;
        if digits > ctx.cap {
            return Err(Error::ResourceLimit(format!("p^{digits} exceeds the word size")));
        }
        let m = ctx.modulus(digits);
        let teich = teichmuller_digits(ctx, digits);
        let binom = BinomialTable::new(r, m);
        let ppow: Vec<u64> = (0..=r)
            .map(|k| if (k as u32) < digits { p.pow(k as u32) % m } else { 0 })
            .collect();
        let pn = p as usize;
        let w = r + 1;
        let mut plus = vec![0; w * w * pn];
        let mut minus = vec![0; w * w * pn];
        for u in 0..pn {
            let t = teich[u];
            let neg = (m - t) % m;
            let mut pw_neg = vec![1 % m; w];
            let mut pw = vec![1 % m; w];
            for k in 1..w {
                pw_neg[k] = mulmod(pw_neg[k - 1], neg, m);
                pw[k] = mulmod(pw[k - 1], t, m);
            }
            for i in 0..w {
                for j in 0..=i {
                    let b = binom.get(i, j);
                    plus[(i * w + j) * pn + u] = mulmod(mulmod(ppow[j], b, m), pw_neg[i - j], m);
                    minus[(i * w + j) * pn + u] = mulmod(mulmod(ppow[r - i], b, m), pw[i - j], m);
                }
            }
        }
        Ok(HeckeTables { p, r, digits, modulus: m, teich, plus, minus })
    }

    /// `p^j C(i,j) (−[u])^{i−j}`.
    #[inline]
    pub fn plus_coeff(&self, i: usize, j: usize, u: u64) -> u64 {
        self.plus[(i * (self.r + 1) + j) * self.p as usize + u as usize]
    }

    /// `p^{r−i} C(i,j) [λ′]^{i−j}`.
    #[inline]
    pub fn minus_coeff(&self, i: usize, j: usize, lam: u64) -> u64 {
        self.minus[(i * (self.r + 1) + j) * self.p as usize + lam as usize]
    }

    /// `p^{r−i}` at the origin.
    pub fn origin_coeff(&self, i: usize) -> u64 {
        let k = (self.r - i) as u32;
        if k < self.digits {
            self.p.pow(k) % self.modulus
        } else {
            0
        }
    }

    /// Terms of `T⁺(v, i)` as `(vertex, j, coefficient mod p^digits)`.
    pub fn plus_terms(&self, v: TreeVertex, i: usize, out: &mut Vec<(TreeVertex, usize, u64)>) {
        for u in 0..self.p {
            let c = v.child(self.p, u);
            for j in 0..=i {
                let k = self.plus_coeff(i, j, u);
                if k != 0 {
                    out.push((c, j, k));
                }
            }
        }
    }

    /// Terms of `T⁻(v, i)`; at the origin this is the `g^{1−ε}_{0,0}` term.
    pub fn minus_terms(&self, v: TreeVertex, i: usize, out: &mut Vec<(TreeVertex, usize, u64)>) {
        if v.n == 0 {
            let k = self.origin_coeff(i);
            if k != 0 {
                out.push((TreeVertex::new(1 - v.eps, 0, 0), self.r - i, k));
            }
            return;
        }
        let (par, lam) = v.parent(self.p);
        for j in 0..=i {
            let k = self.minus_coeff(i, j, lam);
            if k != 0 {
                out.push((par, j, k));
            }
        }
    }
}

/// A finitely supported element of `I(Symm^r)`; each value is in the
/// coordinate convention of its vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedVector<T> {
    pub r: usize,
    pub entries: BTreeMap<TreeVertex, Vec<T>>,
}

impl<T: Copy + PartialEq> InducedVector<T> {
    pub fn new(r: usize) -> Self {
        InducedVector { r, entries: BTreeMap::new() }
    }

    pub fn support_radius(&self) -> Option<u32> {
        self.entries.keys().map(|v| v.distance()).max()
    }

    fn map_vertices(&self, mut f: impl FnMut(TreeVertex) -> Result<TreeVertex>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (v, c) in &self.entries {
            out.insert(f(*v)?, c.clone());
        }
        Ok(InducedVector { r: self.r, entries: out })
    }
}

impl<T> InducedVector<T> {
    pub fn basis(r: usize, v: TreeVertex, i: usize, zero: T, one: T) -> Self
    where
        T: Copy,
    {
        let mut c = vec![zero; r + 1];
        c[i] = one;
        let mut entries = BTreeMap::new();
        entries.insert(v, c);
        InducedVector { r, entries }
    }
}

/// Coefficients are reduced into `ring` from the tables.
fn apply<R: LocalRing>(
    ring: &R,
    tab: &HeckeTables,
    f: &InducedVector<R::Elem>,
    plus: bool,
    minus: bool,
) -> InducedVector<R::Elem> {
    let mut out: InducedVector<R::Elem> = InducedVector::new(f.r);
    let mut terms = Vec::new();
    for (v, coeffs) in &f.entries {
        for (i, &c) in coeffs.iter().enumerate() {
            if ring.is_zero(c) {
                continue;
            }
            terms.clear();
            if plus {
                tab.plus_terms(*v, i, &mut terms);
            }
            if minus {
                tab.minus_terms(*v, i, &mut terms);
            }
            for &(w, j, k) in &terms {
                let slot = out.entries.entry(w).or_insert_with(|| vec![ring.zero(); f.r + 1]);
                slot[j] = ring.add(slot[j], ring.mul(c, ring.from_i128(k as i128)));
            }
        }
    }
    out.entries.retain(|_, c| c.iter().any(|&x| !ring.is_zero(x)));
    out
}

pub fn t_plus<R: LocalRing>(ring: &R, tab: &HeckeTables, f: &InducedVector<R::Elem>) -> InducedVector<R::Elem> {
    apply(ring, tab, f, true, false)
}

pub fn t_minus<R: LocalRing>(ring: &R, tab: &HeckeTables, f: &InducedVector<R::Elem>) -> InducedVector<R::Elem> {
    apply(ring, tab, f, false, true)
}

/// `(T − a)f`.
pub fn hecke_t<R: LocalRing>(
    ring: &R,
    tab: &HeckeTables,
    f: &InducedVector<R::Elem>,
    a: R::Elem,
) -> InducedVector<R::Elem> {
    let mut out = apply(ring, tab, f, true, true);
    if !ring.is_zero(a) {
        for (v, coeffs) in &f.entries {
            let slot = out.entries.entry(*v).or_insert_with(|| vec![ring.zero(); f.r + 1]);
            for (s, &c) in slot.iter_mut().zip(coeffs) {
                *s = ring.sub(*s, ring.mul(a, c));
            }
        }
        out.entries.retain(|_, c| c.iter().any(|&x| !ring.is_zero(x)));
    }
    out
}

/// `t(u p^pos)` on a g^0 vertex whose digit at `pos` is zero.
pub fn translate_vertex(p: u64, v: TreeVertex, u: u64, pos: u32) -> Result<TreeVertex> {
    if u == 0 {
        return Ok(v);
    }
    if v.eps != 0 || v.n <= pos || v.digit(p, pos) != 0 {
        return Err(Error::CarryRequired(v.to_string()));
    }
    Ok(TreeVertex { mu: v.mu + u * p.pow(v.n - 1 - pos), ..v })
}

/// `w(g^0_{n,pμ}) = g^1_{n−1,μ}`.
pub fn w_vertex(p: u64, v: TreeVertex) -> Result<TreeVertex> {
    if v.eps != 0 || v.n == 0 || v.mu >= p.pow(v.n - 1) {
        return Err(Error::CarryRequired(v.to_string()));
    }
    Ok(TreeVertex::new(1, v.n - 1, v.mu))
}

pub fn beta_vertex(v: TreeVertex) -> TreeVertex {
    TreeVertex { eps: 1 - v.eps, ..v }
}

pub fn reindex_translate<T: Copy + PartialEq>(
    p: u64,
    f: &InducedVector<T>,
    u: u64,
    pos: u32,
) -> Result<InducedVector<T>> {
    f.map_vertices(|v| translate_vertex(p, v, u, pos))
}

pub fn reindex_w<T: Copy + PartialEq>(p: u64, f: &InducedVector<T>) -> Result<InducedVector<T>> {
    f.map_vertices(|v| w_vertex(p, v))
}

pub fn reindex_beta<T: Copy + PartialEq>(f: &InducedVector<T>) -> InducedVector<T> {
    f.map_vertices(|v| Ok(beta_vertex(v))).expect("β is total")
}
