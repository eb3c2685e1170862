//! θ^c-divisibility against exact division of `P(1, Y)` by `(Y − Y^p)^c`.

use crysred::symm::theta_divides;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// `θ^c` as a binary form, index `i` ↔ `X^{deg−i}Y^i`.
pub fn theta_power(p: u64, c: usize) -> Vec<u64> {
    let mut theta = vec![0; p as usize + 2];
    theta[1] = 1;
    theta[p as usize] = p - 1;
    (0..c).fold(vec![1], |acc, _| mul(p, &acc, &theta))
}

pub fn divides_by_division(p: u64, poly: &[u64], c: usize) -> bool {
    let r = poly.len() - 1;
    let mut rem: Vec<u64> = poly.iter().map(|x| x % p).collect();
    if c == 0 || rem.iter().all(|&x| x == 0) {
        return true;
    }
    let room = r as i64 - (c * (p as usize + 1)) as i64;
    if room < 0 {
        return false;
    }
    // (Y − Y^p)^c has degree pc and leading coefficient (−1)^c
    let div = theta_power(p, c);
    let dd = p as usize * c;
    let lead_inv = if c.is_multiple_of(2) { 1 } else { p - 1 };
    let mut qdeg = None;
    while let Some(top) = rem.iter().rposition(|&x| x != 0) {
        if top < dd {
            return false;
        }
        let s = top - dd;
        qdeg.get_or_insert(s);
        let f = rem[top] * lead_inv % p;
        for (j, &y) in div.iter().enumerate().take(dd + 1) {
            rem[s + j] = (rem[s + j] + p * p - f * y % p) % p;
        }
    }
    qdeg.is_none_or(|q| q as i64 <= room)
}

/// Random forms with `r ≤ 40`, `c ≤ 3`, half of them built as multiples of
/// `θ^c`; returns `(cases, disagreements)`.
pub fn theta_mismatches(cases: usize) -> (usize, usize) {
    let mut rng = StdRng::seed_from_u64(21);
    let mut bad = 0;
    for case in 0..cases {
        let p = [3u64, 5, 7][case % 3];
        let c = rng.gen_range(1..=3usize);
        let r = rng.gen_range(0..=40usize);
        let deg = r as i64 - (c * (p as usize + 1)) as i64;
        let poly: Vec<u64> = if case % 2 == 0 && deg >= 0 {
            let q: Vec<u64> = (0..=deg).map(|_| rng.gen_range(0..p)).collect();
            let mut f = mul(p, &theta_power(p, c), &q);
            if rng.gen_bool(0.3) {
                let k = rng.gen_range(0..=r);
                f[k] = (f[k] + 1) % p;
            }
            f
        } else {
            (0..=r).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..p) }).collect()
        };
        if theta_divides(p, &poly, c) != divides_by_division(p, &poly, c) {
            bad += 1;
        }
    }
    (cases, bad)
}
