//! Good bases over `R/ϖ^M` and linear algebra over F_p.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::padic::LocalRing;
use crate::Rational;

/// Sorted `(coordinate, value)` pairs with no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVector<E> {
    pub entries: Vec<(u32, E)>,
}

impl<E: Copy> SparseVector<E> {
    pub fn new() -> Self {
        SparseVector { entries: Vec::new() }
    }

    /// Builds from unsorted pairs, summing repeats and dropping zeros.
    pub fn from_pairs<R: LocalRing<Elem = E>>(ring: &R, mut pairs: Vec<(u32, E)>) -> Self {
        pairs.sort_by_key(|x| x.0);
        let mut entries: Vec<(u32, E)> = Vec::with_capacity(pairs.len());
        for (c, x) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == c => last.1 = ring.add(last.1, x),
                _ => entries.push((c, x)),
            }
        }
        entries.retain(|&(_, x)| !ring.is_zero(x));
        SparseVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, c: u32) -> Option<E> {
        self.entries.binary_search_by_key(&c, |x| x.0).ok().map(|k| self.entries[k].1)
    }

    /// Minimal valuation in ϖ-units, `None` for the zero vector.
    pub fn valuation<R: LocalRing<Elem = E>>(&self, ring: &R) -> Option<u32> {
        self.entries.iter().filter_map(|&(_, x)| ring.valuation(x)).min()
    }
}

impl<E: Copy> Default for SparseVector<E> {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone)]
pub struct Pivot<E> {
    pub vector: SparseVector<E>,
    pub col: u32,
    /// Valuation in ϖ-units.
    pub val: u32,
}

#[derive(Debug, Clone)]
pub struct GoodBasis<E> {
    pub ramification: u32,
    pub pivots: Vec<Pivot<E>>,
    pub saw_zero: bool,
}

impl<E> GoodBasis<E> {
    pub fn delta_units(&self) -> u32 {
        self.pivots.iter().map(|p| p.val).max().unwrap_or(0)
    }

    pub fn delta(&self) -> Rational {
        Rational::new(self.delta_units() as i64, self.ramification as i64)
    }

    /// Pivot valuations in ϖ-units, sorted.
    pub fn divisors(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.pivots.iter().map(|p| p.val).collect();
        v.sort_unstable();
        v
    }
}

/// Options for [`gauss_good_basis`].
#[derive(Default)]
pub struct GaussOptions<'a> {
    /// Coordinates that may not be used as pivots.
    pub excluded: Option<&'a (dyn Fn(u32) -> bool + Sync)>,
    /// Stop once every remaining vector has valuation above this (ϖ-units).
    pub d_bound: Option<u32>,
}

const PAR_BATCH: usize = 256;

struct Work<E> {
    rows: Vec<Vec<(u32, E)>>,
    val: Vec<u32>,
    active: Vec<bool>,
    blocked: Vec<bool>,
    cols: FxHashMap<u32, Vec<u32>>,
    queue: BTreeSet<(u32, u32, u32)>,
    parked: BTreeSet<(u32, u32)>,
}

fn row_valuation<R: LocalRing>(ring: &R, row: &[(u32, R::Elem)]) -> u32 {
    row.iter().filter_map(|&(_, x)| ring.valuation(x)).min().unwrap_or(u32::MAX)
}

/// `row − q·piv` with the pivot column removed, plus the columns newly filled.
fn eliminate<R: LocalRing>(
    ring: &R,
    row: &[(u32, R::Elem)],
    piv: &[(u32, R::Elem)],
    col: u32,
    q: R::Elem,
) -> (Vec<(u32, R::Elem)>, Vec<u32>) {
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let mut fills = Vec::new();
    let (mut a, mut b) = (0, 0);
    while a < row.len() || b < piv.len() {
        let ca = row.get(a).map_or(u32::MAX, |x| x.0);
        let cb = piv.get(b).map_or(u32::MAX, |x| x.0);
        if ca < cb {
            out.push(row[a]);
            a += 1;
        } else if cb < ca {
            let y = ring.neg(ring.mul(q, piv[b].1));
            if !ring.is_zero(y) {
                out.push((cb, y));
                fills.push(cb);
            }
            b += 1;
        } else {
            if ca != col {
                let y = ring.mul_sub(row[a].1, q, piv[b].1);
                if !ring.is_zero(y) {
                    out.push((ca, y));
                }
            }
            a += 1;
            b += 1;
        }
    }
    (out, fills)
}

impl<E: Copy + Send + Sync> Work<E> {
    fn enqueue(&mut self, id: u32) {
        self.queue.insert((self.val[id as usize], self.rows[id as usize].len() as u32, id));
    }

    fn dequeue(&mut self, id: u32) {
        let k = id as usize;
        if self.blocked[k] {
            self.blocked[k] = false;
            self.parked.remove(&(self.val[k], id));
        } else {
            self.queue.remove(&(self.val[k], self.rows[k].len() as u32, id));
        }
    }
}

/// Elimination over `R/ϖ^M` producing a good basis of the span of `vectors`.
///
/// Returns the basis and the vectors left unpivoted (those above `d_bound` and,
/// with excluded coordinates, those without an admissible pivot).
pub fn gauss_good_basis<R: LocalRing>(
    ring: &R,
    vectors: Vec<SparseVector<R::Elem>>,
    opts: &GaussOptions,
) -> (GoodBasis<R::Elem>, Vec<SparseVector<R::Elem>>) {
    let n = vectors.len();
    let mut saw_zero = false;
    let mut w = Work {
        rows: Vec::with_capacity(n),
        val: Vec::with_capacity(n),
        active: vec![true; n],
        blocked: vec![false; n],
        cols: FxHashMap::default(),
        queue: BTreeSet::new(),
        parked: BTreeSet::new(),
    };
    for (id, v) in vectors.into_iter().enumerate() {
        for &(c, _) in &v.entries {
            w.cols.entry(c).or_default().push(id as u32);
        }
        w.val.push(row_valuation(ring, &v.entries));
        w.rows.push(v.entries);
        if w.rows[id].is_empty() {
            saw_zero = true;
            w.active[id] = false;
        } else {
            w.enqueue(id as u32);
        }
    }

    let mut pivots = Vec::new();
    while let Some(&(v, _, id)) = w.queue.first() {
        if opts.d_bound.is_some_and(|d| v > d) {
            break;
        }
        w.queue.pop_first();
        let k = id as usize;
        let col = match choose_column(ring, &w, id, opts) {
            Some(c) => c,
            None => {
                w.blocked[k] = true;
                w.parked.insert((v, id));
                continue;
            }
        };
        w.active[k] = false;
        let piv = std::mem::take(&mut w.rows[k]);
        let unit = ring.unit_inverse(ring.shift_down(piv[piv.binary_search_by_key(&col, |x| x.0).unwrap()].1, v));

        let mut targets = w.cols.remove(&col).unwrap_or_default();
        targets.sort_unstable();
        targets.dedup();
        targets.retain(|&t| t != id && w.active[t as usize]);
        let task = |t: u32| {
            let row = &w.rows[t as usize];
            let x = row.binary_search_by_key(&col, |x| x.0).ok().map(|j| row[j].1)?;
            let q = ring.mul(ring.shift_down(x, v), unit);
            Some((t, eliminate(ring, row, &piv, col, q)))
        };
        let updates: Vec<_> = if targets.len() >= PAR_BATCH {
            targets.par_iter().filter_map(|&t| task(t)).collect()
        } else {
            targets.iter().filter_map(|&t| task(t)).collect()
        };
        for (t, (row, fills)) in updates {
            let tk = t as usize;
            w.dequeue(t);
            for c in fills {
                w.cols.entry(c).or_default().push(t);
            }
            w.rows[tk] = row;
            if w.rows[tk].is_empty() {
                saw_zero = true;
                w.active[tk] = false;
                continue;
            }
            w.val[tk] = row_valuation(ring, &w.rows[tk]);
            w.enqueue(t);
        }
        pivots.push(Pivot { vector: SparseVector { entries: piv }, col, val: v });
    }

    let remainder = (0..n)
        .filter(|&k| w.active[k])
        .map(|k| SparseVector { entries: std::mem::take(&mut w.rows[k]) })
        .collect();
    (GoodBasis { ramification: ring.ramification(), pivots, saw_zero }, remainder)
}

/// Highest admissible coordinate realizing the row valuation.
fn choose_column<R: LocalRing>(ring: &R, w: &Work<R::Elem>, id: u32, opts: &GaussOptions) -> Option<u32> {
    let row = &w.rows[id as usize];
    let v = w.val[id as usize];
    let floor = w.parked.first().map_or(u32::MAX, |x| x.0);
    for &(c, x) in row.iter().rev() {
        if ring.valuation(x) != Some(v) {
            continue;
        }
        if opts.excluded.is_some_and(|ex| ex(c)) {
            continue;
        }
        if floor < v && !column_min(ring, w, id, c, v) {
            continue;
        }
        return Some(c);
    }
    None
}

fn column_min<R: LocalRing>(ring: &R, w: &Work<R::Elem>, id: u32, c: u32, v: u32) -> bool {
    let Some(list) = w.cols.get(&c) else { return true };
    list.iter().all(|&t| {
        if t == id || !w.active[t as usize] || !w.blocked[t as usize] {
            return true;
        }
        let row = &w.rows[t as usize];
        match row.binary_search_by_key(&c, |x| x.0) {
            Ok(j) => ring.valuation(row[j].1).is_none_or(|x| x >= v),
            Err(_) => true,
        }
    })
}

/// Reductions mod ϖ of `ϖ^{−v(w)}w` for pivots with `v(w) ≤ d` (ϖ-units).
pub fn normalize_and_reduce<R: LocalRing>(ring: &R, basis: &GoodBasis<R::Elem>, d: u32) -> Vec<SparseVector<u64>> {
    basis
        .pivots
        .iter()
        .filter(|piv| piv.val <= d)
        .map(|piv| SparseVector {
            entries: piv
                .vector
                .entries
                .iter()
                .filter(|&&(_, x)| ring.valuation(x) == Some(piv.val))
                .map(|&(c, x)| (c, ring.residue(ring.shift_down(x, piv.val))))
                .filter(|&(_, y)| y != 0)
                .collect(),
        })
        .collect()
}

fn inv_p(a: u64, p: u64) -> u64 {
    crate::padic::arith::powmod(a, p - 2, p)
}

/// Row echelon form over F_p keyed by the highest coordinate of each row.
#[derive(Debug, Clone)]
pub struct FpEchelon {
    pub p: u64,
    rows: FxHashMap<u32, Vec<(u32, u64)>>,
}

impl FpEchelon {
    pub fn new(p: u64) -> Self {
        FpEchelon { p, rows: FxHashMap::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> BTreeSet<u32> {
        self.rows.keys().copied().collect()
    }

    /// Adds a vector to the span; returns whether the rank grew.
    pub fn insert(&mut self, x: &SparseVector<u64>) -> bool {
        let res = self.residual(x, 0);
        let Some(&(lead, a)) = res.entries.last() else { return false };
        let s = inv_p(a, self.p);
        let row = res.entries.iter().map(|&(c, y)| (c, y * s % self.p)).collect();
        self.rows.insert(lead, row);
        true
    }

    /// Normal form of `x` modulo the span, ignoring coordinates below `floor`.
    ///
    /// The result has no entry on a pivot coordinate, so it is zero exactly
    /// when `x` lies in the span plus the coordinates below `floor`.
    pub fn residual(&self, x: &SparseVector<u64>, floor: u32) -> SparseVector<u64> {
        let p = self.p;
        let mut acc: BTreeMap<u32, u64> = x.entries.iter().filter(|e| e.0 >= floor).map(|&(c, y)| (c, y % p)).collect();
        let mut out = Vec::new();
        while let Some((c, y)) = acc.pop_last() {
            if y == 0 {
                continue;
            }
            match self.rows.get(&c) {
                None => out.push((c, y)),
                Some(row) => {
                    let q = p - y;
                    for &(c2, z) in &row[..row.len() - 1] {
                        if c2 < floor {
                            continue;
                        }
                        let e = acc.entry(c2).or_insert(0);
                        *e = (*e + q * z) % p;
                    }
                }
            }
        }
        out.reverse();
        SparseVector { entries: out }
    }
}

fn fp_combine(p: u64, a: &SparseVector<u64>, s: u64, b: &SparseVector<u64>) -> SparseVector<u64> {
    let mut m: BTreeMap<u32, u64> = a.entries.iter().copied().collect();
    for &(c, y) in &b.entries {
        let e = m.entry(c).or_insert(0);
        *e = (*e + s * y) % p;
    }
    SparseVector { entries: m.into_iter().filter(|e| e.1 != 0).collect() }
}

/// `λ` with `y = λ·x`, for nonzero `x`.
fn fp_ratio(p: u64, y: &SparseVector<u64>, x: &SparseVector<u64>) -> Option<u64> {
    let &(c, a) = x.entries.first()?;
    let lam = y.get(c).unwrap_or(0) * inv_p(a, p) % p;
    fp_combine(p, y, (p - lam) % p, x).is_empty().then_some(lam)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Outcome {
    Zero,
    Linear(u64),
    Quadratic(u64),
    Unknown,
}

/// Answers the three questions for targets `(v, w_1, w_2)` in the quotient by
/// the span and the coordinates below `floor`.
pub fn membership_solve(echelon: &FpEchelon, floor: u32, targets: [&SparseVector<u64>; 3]) -> Outcome {
    let p = echelon.p;
    let t0 = echelon.residual(targets[0], floor);
    if t0.is_empty() {
        return Outcome::Zero;
    }
    let t1 = echelon.residual(targets[1], floor);
    if let Some(lam) = fp_ratio(p, &t1, &t0) {
        return Outcome::Linear(lam);
    }
    let t2 = echelon.residual(targets[2], floor);
    match fp_ratio(p, &fp_combine(p, &t2, 1, &t0), &t1) {
        Some(mu) => Outcome::Quadratic(mu),
        None => Outcome::Unknown,
    }
}
