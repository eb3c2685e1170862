//! Elementary divisors against an exact Smith form over Z.

use crysred::linalg::{gauss_good_basis, GaussOptions, SparseVector};
use crysred::padic::{LocalRing, Zpn};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut out = Vec::new();
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { return out };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..m {
                let q = &a[i][t] / &a[t][t];
                for j in t..n {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..n {
                let q = &a[t][j] / &a[t][t];
                for i in t..m {
                    let s = &q * &a[i][t];
                    a[i][j] -= s;
                }
                clean &= a[t][j].is_zero();
            }
            if clean {
                out.push(a[t][t].clone());
                break;
            }
        }
    }
    out
}

pub fn vp(x: &BigInt, p: u64) -> u32 {
    let mut x = x.abs();
    let mut v = 0;
    let pb = BigInt::from(p);
    while (&x % &pb).is_zero() {
        x /= &pb;
        v += 1;
    }
    v
}

pub fn random_matrix(rng: &mut StdRng, p: u64) -> Vec<Vec<i64>> {
    let k = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=8);
    let n = rng.gen_range(1..=8);
    let b: Vec<Vec<i64>> = (0..m).map(|_| (0..k).map(|_| rng.gen_range(-4..=4)).collect()).collect();
    let c: Vec<Vec<i64>> = (0..k)
        .map(|_| {
            let s = (p as i64).pow(rng.gen_range(0..4));
            (0..n).map(|_| s * rng.gen_range(-4..=4)).collect()
        })
        .collect();
    (0..m).map(|i| (0..n).map(|j| (0..k).map(|l| b[i][l] * c[l][j]).sum()).collect()).collect()
}

pub fn expected(a: &[Vec<i64>], p: u64, m: u32, scale: u32) -> Vec<u32> {
    let big = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut v: Vec<u32> = diagonal(big).iter().map(|d| vp(d, p) * scale).filter(|&x| x < m).collect();
    v.sort_unstable();
    v
}

pub fn rows<R: LocalRing>(ring: &R, a: &[Vec<i64>], perm: &[usize]) -> Vec<SparseVector<R::Elem>> {
    a.iter()
        .map(|r| SparseVector::from_pairs(ring, perm.iter().enumerate().map(|(j, &c)| (c as u32, ring.from_i128(r[j] as i128))).collect()))
        .collect()
}

/// Random matrices of rank at most 6 over `Z/p^6`; returns `(cases, mismatches)`.
pub fn smith_mismatches(cases: usize) -> (usize, usize) {
    let mut rng = StdRng::seed_from_u64(7);
    let mut bad = 0;
    for case in 0..cases {
        let p = [2u64, 3, 5, 7][case % 4];
        let prec = 6;
        let a = random_matrix(&mut rng, p);
        let ring = Zpn::new(p, prec);
        let id: Vec<usize> = (0..a[0].len()).collect();
        let (basis, _) = gauss_good_basis(&ring, rows(&ring, &a, &id), &GaussOptions::default());
        let want = expected(&a, p, prec, 1);
        if basis.divisors() != want || basis.saw_zero != (a.len() > want.len()) {
            bad += 1;
        }
    }
    (cases, bad)
}
