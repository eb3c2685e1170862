//! Word-sized modular helpers shared by the ring implementations.

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

#[inline]
pub fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

pub fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn invmod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

pub fn reduce_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// p-adic valuation of a nonzero integer.
pub fn vp(mut x: i128, p: u64) -> u32 {
    assert!(x != 0);
    let p = p as i128;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Valuation of a residue modulo `p^n`; `n` for zero.
pub fn vp_residue(x: u64, p: u64, n: u32) -> u32 {
    if x == 0 {
        return n;
    }
    let mut x = x;
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Binomial coefficient reduced modulo `m`, computed with Pascal rows.
pub struct BinomialTable {
    rows: Vec<Vec<u64>>,
}

impl BinomialTable {
    pub fn new(n: usize, m: u64) -> Self {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = vec![1 % m; i + 1];
            for j in 1..i {
                row[j] = addmod(rows[i - 1][j - 1], rows[i - 1][j], m);
            }
            rows.push(row);
        }
        BinomialTable { rows }
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.rows[n][k]
        }
    }
}

/// Integer square root of a non-negative integer, if exact.
pub fn exact_isqrt(x: i128) -> Option<i128> {
    if x < 0 {
        return None;
    }
    let mut r = (x as f64).sqrt() as i128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    (r * r == x).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses() {
        for m in [7u64, 25, 243, 5u64.pow(20)] {
            for a in 1..50u64 {
                if a % 5 == 0 || a % 3 == 0 || a % 7 == 0 {
                    continue;
                }
                let i = invmod(a, m).unwrap();
                assert_eq!(mulmod(a, i, m), 1 % m);
            }
        }
        assert_eq!(invmod(5, 25), None);
    }

    #[test]
    fn small_helpers() {
        assert_eq!(vp(250, 5), 3);
        assert_eq!(vp_residue(0, 5, 4), 4);
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(exact_isqrt(231), None);
        assert_eq!(exact_isqrt(144), Some(12));
        let t = BinomialTable::new(10, 7);
        assert_eq!(t.get(10, 3), 120 % 7);
    }
}
