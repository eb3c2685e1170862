//! The relation module `(T − a_p) I_{B_n}` inside `I_{B_{n+1}}`, reduced to
//! its F_p generators.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{gauss_good_basis, normalize_and_reduce, GaussOptions, GoodBasis, SparseVector};
use crate::padic::LocalRing;
use crate::tree::{translate_vertex, w_vertex, CoordinateSpace, HeckeTables, TreeVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Baseline,
    #[default]
    Subtree,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Mode::Baseline),
            "subtree" => Ok(Mode::Subtree),
            _ => Err(crate::Error::InvalidInput(format!("unknown mode {s:?}"))),
        }
    }
}

/// F_p generators of the saturated relation module, in the coordinates of
/// `CoordinateSpace(p, n+1, r)`.
#[derive(Debug, Clone)]
pub struct RelationSpan {
    pub rows: Vec<SparseVector<u64>>,
    /// Largest elementary divisor in ϖ-units.
    pub delta_units: u32,
    pub ramification: u32,
    /// Some relation vanished modulo the working precision.
    pub saw_zero: bool,
}

/// `(T − a)(v, i)` as a sparse vector.
pub fn relation_row<R: LocalRing>(
    ring: &R,
    tab: &HeckeTables,
    space: &CoordinateSpace,
    a: R::Elem,
    v: TreeVertex,
    i: usize,
) -> SparseVector<R::Elem> {
    let mut terms = Vec::with_capacity(2 * tab.p as usize * (i + 1));
    tab.plus_terms(v, i, &mut terms);
    tab.minus_terms(v, i, &mut terms);
    let mut pairs: Vec<(u32, R::Elem)> =
        terms.into_iter().map(|(w, j, k)| (space.id(w, j), ring.from_i128(k as i128))).collect();
    pairs.push((space.id(v, i), ring.neg(a)));
    SparseVector::from_pairs(ring, pairs)
}

fn relations_at<R: LocalRing>(
    ring: &R,
    tab: &HeckeTables,
    space: &CoordinateSpace,
    a: R::Elem,
    vertices: &[TreeVertex],
) -> Vec<SparseVector<R::Elem>> {
    vertices
        .par_iter()
        .flat_map_iter(|&v| (0..=space.r).map(move |i| relation_row(ring, tab, space, a, v, i)))
        .collect()
}

/// Relabels the vertices of a vector; `f` must be injective on its support.
fn map_row<E: Copy>(
    space: &CoordinateSpace,
    row: &SparseVector<E>,
    f: impl Fn(TreeVertex) -> Result<TreeVertex>,
) -> Result<SparseVector<E>> {
    let mut entries = Vec::with_capacity(row.len());
    for &(c, x) in &row.entries {
        let (v, i) = space.split(c);
        entries.push((space.id(f(v)?, i), x));
    }
    entries.sort_unstable_by_key(|e| e.0);
    Ok(SparseVector { entries })
}

fn translate(p: u64, v: TreeVertex, mu: &[(u32, u64)]) -> Result<TreeVertex> {
    mu.iter().try_fold(v, |v, &(pos, u)| translate_vertex(p, v, u, pos))
}

/// Every digit string on positions `0..len` as `(position, digit)` lists.
fn digit_strings(p: u64, len: u32) -> Vec<Vec<(u32, u64)>> {
    let mut out = vec![Vec::new()];
    for pos in 0..len {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..p).map(move |u| {
                    let mut t = s.clone();
                    t.push((pos, u));
                    t
                })
            })
            .collect();
    }
    out
}

struct Collector {
    rows: Vec<SparseVector<u64>>,
    delta_units: u32,
    saw_zero: bool,
}

impl Collector {
    fn absorb<E>(&mut self, b: &GoodBasis<E>) {
        self.delta_units = self.delta_units.max(b.delta_units());
        self.saw_zero |= b.saw_zero;
    }
}

/// Builds the F_p generators of the relation module for `B_n`.
///
/// The ring precision bounds what can be seen: every pivot is normalized, and
/// `saw_zero` reports a relation lost below the precision.
pub fn build_relations<R: LocalRing>(
    ring: &R,
    tab: &HeckeTables,
    a: R::Elem,
    n: u32,
    mode: Mode,
) -> Result<RelationSpan> {
    let p = ring.prime();
    let space = CoordinateSpace::new(p, n + 1, tab.r);
    let d_units = ring.precision().saturating_sub(1);
    let mut out = Collector { rows: Vec::new(), delta_units: 0, saw_zero: false };

    if mode == Mode::Baseline || n < 2 {
        let inner = crate::tree::Ball::new(p, n);
        let verts: Vec<TreeVertex> = (0..inner.len()).map(|k| inner.vertex(k)).collect();
        let (basis, _) = gauss_good_basis(ring, relations_at(ring, tab, &space, a, &verts), &GaussOptions::default());
        out.absorb(&basis);
        out.rows = normalize_and_reduce(ring, &basis, d_units);
        return Ok(finish(out, ring));
    }

    // S_m is the depth-m subtree under g^0_{n+1−m,0}.
    let mut rest: Vec<SparseVector<R::Elem>> = Vec::new();
    for m in 2..=n {
        let root_dist = n + 1 - m;
        let mid = root_dist + 1;
        let mut input = relations_at(
            ring,
            tab,
            &space,
            a,
            &(0..p).map(|u| TreeVertex::new(0, mid, u)).collect::<Vec<_>>(),
        );
        if m > 2 {
            // copies of the previous remainder under every child of the root
            for u in 0..p {
                for row in &rest {
                    input.push(map_row(&space, row, |v| translate_vertex(p, v, u, root_dist))?);
                }
            }
        }
        let ex = |c: u32| {
            let (v, _) = space.split(c);
            v.eps == 0 && (v.n == root_dist || v.n == mid)
        };
        let (basis, remainder) =
            gauss_good_basis(ring, input, &GaussOptions { excluded: Some(&ex), d_bound: None });
        out.absorb(&basis);
        let red = normalize_and_reduce(ring, &basis, d_units);
        replicate(&space, p, root_dist, &red, &mut out.rows)?;
        rest = remainder;
    }

    let mut input = Vec::new();
    for u in 0..p {
        for row in &rest {
            input.push(map_row(&space, row, |v| translate_vertex(p, v, u, 0))?);
        }
    }
    for row in &rest {
        input.push(map_row(&space, row, |v| w_vertex(p, v))?);
    }
    let mut verts = vec![TreeVertex::ORIGIN, TreeVertex::new(1, 0, 0)];
    verts.extend((0..p).map(|u| TreeVertex::new(0, 1, u)));
    input.extend(relations_at(ring, tab, &space, a, &verts));
    let (basis, _) = gauss_good_basis(ring, input, &GaussOptions::default());
    out.absorb(&basis);
    out.rows.extend(normalize_and_reduce(ring, &basis, d_units));
    Ok(finish(out, ring))
}

/// Copies of rows living under `g^0_{len,0}` to every `g^0_{len,μ}`, and
/// through `w` to the `g^1` side.
fn replicate(
    space: &CoordinateSpace,
    p: u64,
    len: u32,
    rows: &[SparseVector<u64>],
    out: &mut Vec<SparseVector<u64>>,
) -> Result<()> {
    let strings = digit_strings(p, len);
    let copies: Result<Vec<Vec<SparseVector<u64>>>> = strings
        .par_iter()
        .map(|mu| {
            let mut local = Vec::with_capacity(2 * rows.len());
            let to_w = mu.first().is_none_or(|&(_, u)| u == 0) && len > 0;
            for row in rows {
                local.push(map_row(space, row, |v| translate(p, v, mu))?);
                if to_w {
                    local.push(map_row(space, row, |v| w_vertex(p, translate(p, v, mu)?))?);
                }
            }
            Ok(local)
        })
        .collect();
    out.extend(copies?.into_iter().flatten());
    Ok(())
}

fn finish<R: LocalRing>(c: Collector, ring: &R) -> RelationSpan {
    RelationSpan { rows: c.rows, delta_units: c.delta_units, ramification: ring.ramification(), saw_zero: c.saw_zero }
}
