//! Two binomial identities checked by direct computation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

fn bracket(r: u64, p: u64) -> u64 {
    let x = r % (p - 1);
    if x == 0 {
        p - 1
    } else {
        x
    }
}

/// `Σ_j C(r, j(p−1)+i) ≡ C([r], i)`, or `2` when `([r], i) = (p−1, 0)`, for
/// `1 ≤ r ≤ max_r`; Pascal rows mod p. Returns `(checked, failures)`.
pub fn summodp_failures(max_r: usize) -> (usize, usize) {
    let (mut checked, mut bad) = (0, 0);
    for p in [3u64, 5, 7] {
        let mut row = vec![1u64];
        let small: Vec<Vec<u64>> = (0..p).map(|n| (0..=n).map(|k| binom_small(n, k) % p).collect()).collect();
        for r in 1..=max_r {
            let mut next = vec![1u64; r + 1];
            for k in 1..r {
                next[k] = (row[k - 1] + row[k]) % p;
            }
            row = next;
            let br = bracket(r as u64, p);
            for i in 0..=(p - 2) as usize {
                let s = row.iter().skip(i).step_by((p - 1) as usize).fold(0, |a, &x| (a + x) % p);
                let want = if br == p - 1 && i == 0 { 2 % p } else { small[br as usize].get(i).copied().unwrap_or(0) };
                checked += 1;
                if s != want {
                    bad += 1;
                }
            }
        }
    }
    (checked, bad)
}

fn binom_small(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

/// `C(x, j)` for any integer `x`.
fn binom(x: i64, j: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..j {
        num *= BigInt::from(x - t as i64);
        den *= BigInt::from(t as i64 + 1);
    }
    num / den
}

/// Fraction-free elimination.
fn det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * prev
}

/// `det(C(b + m(p−1), j))_{0≤j,m≤n} = (p−1)^{n(n+1)/2}` for `|b| ≤ 10`,
/// `n ≤ 5`. Returns `(checked, failures)`.
pub fn determinant_failures() -> (usize, usize) {
    let (mut checked, mut bad) = (0, 0);
    for p in [3i64, 5, 7] {
        for b in -10..=10i64 {
            for n in 0..=5usize {
                let m: Vec<Vec<BigInt>> =
                    (0..=n).map(|j| (0..=n).map(|col| binom(b + col as i64 * (p - 1), j)).collect()).collect();
                let d = det(m);
                let want = BigInt::from(p - 1).pow((n * (n + 1) / 2) as u32);
                let unit = (&d % BigInt::from(p)).abs() != BigInt::zero();
                checked += 1;
                if d != want || !unit {
                    bad += 1;
                }
            }
        }
    }
    (checked, bad)
}
