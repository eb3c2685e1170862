//! T from its double-coset definition, with exact rational matrices, against
//! the explicit formulas. At p = 3 the Teichmüller digits are 0, 1, −1, so every
//! representative is an integer matrix.

use crysred::padic::{LocalRing, Zpn};
use crysred::tree::{enumerate_ball, hecke_t, HeckeTables, InducedVector, TreeVertex};
use num_rational::Ratio;

type Q = Ratio<i128>;
type Mat = [[Q; 2]; 2];

const P: i128 = 3;
const TEICH: [i128; 3] = [0, 1, -1];

fn q(x: i128) -> Q {
    Q::from_integer(x)
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[q(0), q(0)], [q(0), q(0)]];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn inv(a: &Mat) -> Mat {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
}

fn vq(x: Q) -> Option<i32> {
    if x == q(0) {
        return None;
    }
    let (mut n, mut d) = (*x.numer(), *x.denom());
    let mut v = 0;
    while n % P == 0 {
        n /= P;
        v += 1;
    }
    while d % P == 0 {
        d /= P;
        v -= 1;
    }
    Some(v)
}

fn mu_value(v: TreeVertex) -> i128 {
    v.digits(3).iter().enumerate().map(|(k, &d)| TEICH[d as usize] * P.pow(k as u32)).sum()
}

fn rep(v: TreeVertex) -> Mat {
    let mu = mu_value(v);
    if v.eps == 0 {
        [[q(P.pow(v.n)), q(mu)], [q(0), q(1)]]
    } else {
        [[q(1), q(0)], [q(P * mu), q(P.pow(v.n + 1))]]
    }
}

/// `γ = g'·p^k·κ` with `κ ∈ GL₂(Z_3)`.
fn decompose(gamma: &Mat, reps: &[(TreeVertex, Mat)]) -> (TreeVertex, Mat) {
    let mut found = None;
    for (v, g) in reps {
        let m = mul(&inv(g), gamma);
        let k = m.iter().flatten().filter_map(|&x| vq(x)).min().unwrap();
        let s = if k >= 0 { q(P.pow(k as u32)) } else { Q::new(1, P.pow((-k) as u32)) };
        let kappa = [[m[0][0] / s, m[0][1] / s], [m[1][0] / s, m[1][1] / s]];
        let det = kappa[0][0] * kappa[1][1] - kappa[0][1] * kappa[1][0];
        if kappa.iter().flatten().all(|&x| vq(x).is_none_or(|v| v >= 0)) && vq(det) == Some(0) {
            assert!(found.is_none(), "two representatives for one coset");
            found = Some((*v, kappa));
        }
    }
    found.expect("representative in the enumerated ball")
}

/// Binary form coefficients, index i ↔ X^{r−i}Y^i.
fn subst(poly: &[Q], a: Q, b: Q, c: Q, d: Q) -> Vec<Q> {
    let r = poly.len() - 1;
    let pow = |x: Q, y: Q, k: usize| {
        let mut f = vec![q(1)];
        for _ in 0..k {
            let mut g = vec![q(0); f.len() + 1];
            for (i, &fi) in f.iter().enumerate() {
                g[i] += fi * x;
                g[i + 1] += fi * y;
            }
            f = g;
        }
        f
    };
    let mut out = vec![q(0); r + 1];
    for (i, &coef) in poly.iter().enumerate() {
        if coef == q(0) {
            continue;
        }
        let left = pow(a, c, r - i);
        let right = pow(b, d, i);
        for (s, &l) in left.iter().enumerate() {
            for (t, &rr) in right.iter().enumerate() {
                out[s + t] += coef * l * rr;
            }
        }
    }
    out
}

fn oracle_t(v: TreeVertex, i: usize, r: usize, reps: &[(TreeVertex, Mat)]) -> Vec<(TreeVertex, Vec<Q>)> {
    let mut poly = vec![q(0); r + 1];
    poly[if v.eps == 0 { i } else { r - i }] = q(1);
    let g = rep(v);
    let mut pieces: Vec<(Mat, Vec<Q>)> = Vec::new();
    for &u in &TEICH {
        let h = [[q(P), q(u)], [q(0), q(1)]];
        pieces.push((mul(&g, &h), subst(&poly, q(1), q(-u), q(0), q(P))));
    }
    let h = [[q(1), q(0)], [q(0), q(P)]];
    pieces.push((mul(&g, &h), subst(&poly, q(P), q(0), q(0), q(1))));
    let mut out = Vec::new();
    for (gamma, vpoly) in pieces {
        let (w, k) = decompose(&gamma, reps);
        let acted = subst(&vpoly, k[0][0], k[0][1], k[1][0], k[1][1]);
        let coords: Vec<Q> = if w.eps == 0 { acted } else { acted.into_iter().rev().collect() };
        out.push((w, coords));
    }
    out
}

/// Every basis vector `(v, i)` with `v` in `B_radius` and `r ≤ max_r`;
/// returns `(checked, mismatches)`.
pub fn hecke_mismatches(max_r: usize, radius: u32) -> (usize, usize) {
    let reps: Vec<(TreeVertex, Mat)> = enumerate_ball(3, radius + 2).into_iter().map(|v| (v, rep(v))).collect();
    let digits = 20;
    let ring = Zpn::new(3, digits);
    let m = 3i128.pow(digits);
    let mut mismatches = 0;
    let mut checked = 0;
    for r in 0..=max_r {
        let tab = HeckeTables::new(3, r, digits).unwrap();
        for v in enumerate_ball(3, radius) {
            for i in 0..=r {
                let f = InducedVector::basis(r, v, i, 0u64, 1u64);
                let got = hecke_t(&ring, &tab, &f, ring.zero());
                let mut want: InducedVector<u64> = InducedVector::new(r);
                for (w, coords) in oracle_t(v, i, r, &reps) {
                    let slot = want.entries.entry(w).or_insert_with(|| vec![0; r + 1]);
                    for (s, c) in slot.iter_mut().zip(coords) {
                        assert_eq!(*c.denom(), 1);
                        *s = ring.add(*s, c.numer().rem_euclid(m) as u64);
                    }
                }
                want.entries.retain(|_, c| c.iter().any(|&x| x != 0));
                checked += 1;
                if got != want {
                    mismatches += 1;
                }
            }
        }
    }
    (checked, mismatches)
}
