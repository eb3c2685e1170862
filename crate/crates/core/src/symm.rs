//! `Symm^r`, the θ-filtration and its bases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::arith::{binomial, reduce_i128, BinomialTable};
use crate::tree::{InducedVector, TreeVertex};

/// `[n] ∈ {1, …, p−1}` with `[n] ≡ n mod p−1`.
pub fn bracket(n: i64, p: u64) -> u64 {
    let q = p as i64 - 1;
    let x = n.rem_euclid(q) as u64;
    if x == 0 {
        p - 1
    } else {
        x
    }
}

/// Coefficient `i` multiplies `X^{r−i}Y^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmVector {
    pub coeffs: Vec<i128>,
}

impl SymmVector {
    pub fn zero(r: usize) -> Self {
        SymmVector { coeffs: vec![0; r + 1] }
    }

    pub fn monomial(r: usize, i: usize) -> Self {
        let mut v = Self::zero(r);
        v.coeffs[i] = 1;
        v
    }

    pub fn r(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn reduce(&self, m: u64) -> Vec<u64> {
        self.coeffs.iter().map(|&c| reduce_i128(c, m)).collect()
    }
}

/// Indexing of the η basis: `η_{u,v}` sits at `u(p+1) + v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtaLayout {
    pub p: u64,
    pub r: usize,
    pub m: usize,
    pub t: usize,
}

impl EtaLayout {
    pub fn new(p: u64, r: usize) -> Self {
        let q = p as usize + 1;
        EtaLayout { p, r, m: r / q, t: r % q }
    }

    pub fn len(&self) -> usize {
        self.r + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_legal(&self, u: usize, v: usize) -> bool {
        (u < self.m && v <= self.p as usize) || (u == self.m && v <= self.t)
    }

    pub fn index(&self, u: usize, v: usize) -> usize {
        u * (self.p as usize + 1) + v
    }

    pub fn pair(&self, idx: usize) -> (usize, usize) {
        let q = self.p as usize + 1;
        (idx / q, idx % q)
    }

    /// Degree `r − u(p+1)` of the cofactor of `θ^u`.
    pub fn rest(&self, u: usize) -> usize {
        self.r - u * (self.p as usize + 1)
    }
}

/// `θ^u X^v Y^{r−u(p+1)−v}`, except `θ^u X^{r−u(p+1)}` for `v = p`, `u < m`.
pub fn eta_expand(p: u64, r: usize, u: usize, v: usize) -> Result<SymmVector> {
    let lay = EtaLayout::new(p, r);
    if u > lay.m || v > lay.rest(u) {
        return Err(Error::IndexOutOfRange(format!("η_{{{u},{v}}} for p={p}, r={r}")));
    }
    let rest = lay.rest(u);
    let xa = if u < lay.m && v == p as usize { rest } else { v };
    let pu = p as usize;
    let mut out = SymmVector::zero(r);
    for k in 0..=u {
        let xexp = pu * (u - k) + k + xa;
        let c = binomial(u as u64, k as u64) as i128;
        out.coeffs[r - xexp] += if k % 2 == 0 { c } else { -c };
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationStep {
    pub i: usize,
    pub a: u64,
    /// Twist exponent modulo `p − 1`.
    pub b: u64,
    pub eta_basis: Vec<(usize, usize)>,
    pub gen: (usize, usize),
}

impl FiltrationStep {
    pub fn dim(&self) -> usize {
        self.eta_basis.len()
    }
}

/// The standard filtration, steps listed as `J_0, J_1, …`.
pub fn standard_filtration(p: u64, r: usize) -> Vec<FiltrationStep> {
    let lay = EtaLayout::new(p, r);
    let pu = p as usize;
    let modb = |x: i64| x.rem_euclid((p as i64 - 1).max(1)) as u64;
    let mut steps = Vec::new();
    for u in 0..lay.m {
        let br = bracket(r as i64 - 2 * u as i64, p) as usize;
        steps.push(FiltrationStep {
            i: 2 * u,
            a: (pu - 1 - br) as u64,
            b: modb(r as i64 - u as i64),
            eta_basis: (br..pu).map(|v| (u, v)).collect(),
            gen: (u, pu - 1),
        });
        let mut basis: Vec<(usize, usize)> = (0..br).map(|v| (u, v)).collect();
        basis.push((u, pu));
        steps.push(FiltrationStep { i: 2 * u + 1, a: br as u64, b: modb(u as i64), eta_basis: basis, gen: (u, pu) });
    }
    let (m, t) = (lay.m, lay.t);
    if t < pu {
        steps.push(FiltrationStep {
            i: 2 * m,
            a: t as u64,
            b: modb(m as i64),
            eta_basis: (0..=t).map(|v| (m, v)).collect(),
            gen: (m, t),
        });
    } else {
        steps.push(FiltrationStep {
            i: 2 * m,
            a: p - 2,
            b: modb(m as i64 + 1),
            eta_basis: (1..pu).map(|v| (m, v)).collect(),
            gen: (m, pu - 1),
        });
        steps.push(FiltrationStep { i: 2 * m + 1, a: 1, b: modb(m as i64), eta_basis: vec![(m, 0), (m, pu)], gen: (m, pu) });
    }
    steps
}

/// Step index of every η basis element.
pub fn eta_steps(p: u64, r: usize) -> Vec<usize> {
    let lay = EtaLayout::new(p, r);
    let mut out = vec![usize::MAX; lay.len()];
    for s in standard_filtration(p, r) {
        for &(u, v) in &s.eta_basis {
            out[lay.index(u, v)] = s.i;
        }
    }
    out
}

/// Coordinates in the η basis, computed modulo `modulus`.
///
/// `θ^n X^a Y^{R−a}` with `p ≤ a < R` is rewritten as
/// `θ^{n+1} X^{a−p} Y^{R−a−1} + θ^n X^{a−p+1} Y^{R−a+p−1}` until every term is an η.
pub fn to_eta_coordinates(p: u64, r: usize, poly: &[u64], modulus: u64) -> Vec<u64> {
    let lay = EtaLayout::new(p, r);
    let pu = p as usize;
    let mut levels: Vec<Vec<u64>> = (0..=lay.m).map(|u| vec![0; lay.rest(u) + 1]).collect();
    for (i, &c) in poly.iter().enumerate() {
        levels[0][r - i] = c % modulus;
    }
    let mut out = vec![0; lay.len()];
    for u in 0..=lay.m {
        let rest = lay.rest(u);
        for a in (pu..rest).rev() {
            let c = levels[u][a];
            if c == 0 {
                continue;
            }
            levels[u][a] = 0;
            levels[u + 1][a - pu] = (levels[u + 1][a - pu] + c) % modulus;
            levels[u][a - pu + 1] = (levels[u][a - pu + 1] + c) % modulus;
        }
        for a in 0..=rest.min(pu - 1) {
            out[lay.index(u, a)] = levels[u][a];
        }
        if rest >= pu {
            out[lay.index(u, pu)] = levels[u][rest];
        }
    }
    out
}

/// Indexing of the basis `b_{n,i} = θ^n X^{R−i} Y^i` (`i ≤ p−1`, or `i = ∞` for
/// `θ^n Y^R`); `∞` is stored as `i = p`.
pub fn to_btheta_coordinates(p: u64, r: usize, poly: &[u64], modulus: u64) -> Vec<((usize, usize), u64)> {
    let lay = EtaLayout::new(p, r);
    let pu = p as usize;
    let mut levels: Vec<Vec<u64>> = (0..=lay.m).map(|u| vec![0; lay.rest(u) + 1]).collect();
    for (i, &c) in poly.iter().enumerate() {
        levels[0][i] = c % modulus;
    }
    let mut out = Vec::new();
    for n in 0..=lay.m {
        let rest = lay.rest(n);
        for j in (pu..rest).rev() {
            let c = levels[n][j];
            if c == 0 {
                continue;
            }
            levels[n][j] = 0;
            levels[n][j + 1 - pu] = (levels[n][j + 1 - pu] + c) % modulus;
            levels[n + 1][j - pu] = (levels[n + 1][j - pu] + modulus - c) % modulus;
        }
        for j in 0..=rest {
            let c = levels[n][j];
            if c == 0 {
                continue;
            }
            let key = if j == rest { (n, pu) } else { (n, j) };
            out.push((key, c));
        }
    }
    out.sort();
    out
}

/// Whether `θ^c` divides `poly` over F_p, by vanishing of the head and tail
/// coefficients and of the sums `Σ_{i ≡ a mod p−1} C(i,ℓ) α_i` for `ℓ < c`.
pub fn theta_divides(p: u64, poly: &[u64], c: usize) -> bool {
    let r = poly.len() - 1;
    let alpha: Vec<u64> = poly.iter().map(|&x| x % p).collect();
    if c == 0 {
        return true;
    }
    if c > r / (p as usize + 1) {
        return alpha.iter().all(|&x| x == 0);
    }
    if alpha[..c].iter().any(|&x| x != 0) || alpha[r + 1 - c..].iter().any(|&x| x != 0) {
        return false;
    }
    let q = (p - 1).max(1) as usize;
    let binom = BinomialTable::new(r, p);
    for a in 0..q {
        for l in 0..c {
            let mut s = 0u64;
            for i in (a..=r).step_by(q) {
                s = (s + binom.get(i, l) * alpha[i]) % p;
            }
            if s != 0 {
                return false;
            }
        }
    }
    true
}

/// Projection of monomial coordinates onto the η coordinates of steps `≤ i`,
/// over F_p.
#[derive(Debug, Clone)]
pub struct QuotientFrame {
    pub p: u64,
    pub r: usize,
    pub i: usize,
    /// Kept η indices in frame order.
    pub kept: Vec<usize>,
    /// For each monomial index, its image as `(frame slot, value)`.
    images: Vec<Vec<(usize, u64)>>,
}

impl QuotientFrame {
    pub fn new(p: u64, r: usize, i: usize) -> Self {
        let steps = eta_steps(p, r);
        let kept: Vec<usize> = (0..steps.len()).filter(|&k| steps[k] <= i).collect();
        let mut slot = vec![usize::MAX; steps.len()];
        for (s, &k) in kept.iter().enumerate() {
            slot[k] = s;
        }
        let images = (0..=r)
            .map(|j| {
                let mut mono = vec![0u64; r + 1];
                mono[j] = 1;
                to_eta_coordinates(p, r, &mono, p)
                    .into_iter()
                    .enumerate()
                    .filter(|&(k, c)| c != 0 && slot[k] != usize::MAX)
                    .map(|(k, c)| (slot[k], c))
                    .collect()
            })
            .collect();
        QuotientFrame { p, r, i, kept, images }
    }

    pub fn width(&self) -> usize {
        self.kept.len()
    }

    /// Image of a polynomial given in the coordinates of a vertex with the given ε.
    pub fn project(&self, eps: u8, coords: &[u64], out: &mut [u64]) {
        out.iter_mut().for_each(|x| *x = 0);
        for (k, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let j = if eps == 0 { k } else { self.r - k };
            for &(s, v) in &self.images[j] {
                out[s] = (out[s] + c * v) % self.p;
            }
        }
    }
}

/// `(v_i, w_{i,1}, w_{i,2})` over F_p in tree coordinates.
pub fn step_witnesses(
    p: u64,
    r: usize,
    step: &FiltrationStep,
) -> (InducedVector<u64>, InducedVector<u64>, InducedVector<u64>) {
    let e = eta_expand(p, r, step.gen.0, step.gen.1).expect("generator is legal").reduce(p);
    let rev: Vec<u64> = e.iter().rev().copied().collect();
    let put = |f: &mut InducedVector<u64>, v: TreeVertex| {
        let c = if v.eps == 0 { e.clone() } else { rev.clone() };
        f.entries.insert(v, c);
    };
    let mut v = InducedVector::new(r);
    put(&mut v, TreeVertex::ORIGIN);
    let mut w1 = InducedVector::new(r);
    for u in 0..p {
        put(&mut w1, TreeVertex::new(0, 1, u));
    }
    let mut w2 = InducedVector::new(r);
    for u in 0..p * p {
        put(&mut w2, TreeVertex::new(0, 2, u));
    }
    if step.a == 0 {
        put(&mut w1, TreeVertex::new(1, 0, 0));
        for u in 0..p {
            put(&mut w2, TreeVertex::new(1, 1, u));
        }
        put(&mut w2, TreeVertex::ORIGIN);
    }
    (v, w1, w2)
}
