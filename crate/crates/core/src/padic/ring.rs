//! Fixed-precision rings used by the elimination kernels.

use std::fmt::Debug;

use super::arith::{addmod, invmod, mulmod, reduce_i128, submod, vp_residue};
use super::field::{FieldElement, LocalField, RawField};
use crate::error::{Error, Result};

/// `R/p^N` for the ring of integers `R` of a totally ramified extension.
pub trait LocalRing: Clone + Debug + Send + Sync {
    type Elem: Copy + Clone + Debug + PartialEq + Eq + Send + Sync;

    fn prime(&self) -> u64;
    fn ramification(&self) -> u32;
    /// Precision in ϖ-units.
    fn precision(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i128(&self, x: i128) -> Self::Elem;
    fn from_field(&self, x: &FieldElement) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem {
        self.sub(self.zero(), a)
    }
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// `dst − q·src`.
    fn mul_sub(&self, dst: Self::Elem, q: Self::Elem, src: Self::Elem) -> Self::Elem {
        self.sub(dst, self.mul(q, src))
    }
    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }
    /// Valuation in ϖ-units, `None` for zero.
    fn valuation(&self, a: Self::Elem) -> Option<u32>;
    fn uniformizer(&self) -> Self::Elem;
    /// `y` with `y·ϖ^s = a`; requires `v(a) ≥ s`.
    fn shift_down(&self, a: Self::Elem, s: u32) -> Self::Elem;
    fn unit_inverse(&self, a: Self::Elem) -> Self::Elem;
    /// Reduction modulo ϖ.
    fn residue(&self, a: Self::Elem) -> u64;
}

/// `Z/p^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zpn {
    p: u64,
    n: u32,
    m: u64,
    small: bool,
}

impl Zpn {
    pub fn new(p: u64, n: u32) -> Self {
        let m = p.pow(n);
        Zpn { p, n, m, small: m <= u32::MAX as u64 }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }
}

impl LocalRing for Zpn {
    type Elem = u64;

    fn prime(&self) -> u64 {
        self.p
    }
    fn ramification(&self) -> u32 {
        1
    }
    fn precision(&self) -> u32 {
        self.n
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.m
    }
    fn from_i128(&self, x: i128) -> u64 {
        reduce_i128(x, self.m)
    }
    fn from_field(&self, x: &FieldElement) -> u64 {
        x.coeffs[0] % self.m
    }
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        addmod(a, b, self.m)
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        submod(a, b, self.m)
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.small {
            (a * b) % self.m
        } else {
            mulmod(a, b, self.m)
        }
    }
    #[inline]
    fn mul_sub(&self, dst: u64, q: u64, src: u64) -> u64 {
        submod(dst, self.mul(q, src), self.m)
    }
    fn valuation(&self, a: u64) -> Option<u32> {
        (a != 0).then(|| vp_residue(a, self.p, self.n))
    }
    fn uniformizer(&self) -> u64 {
        self.p % self.m
    }
    fn shift_down(&self, a: u64, s: u32) -> u64 {
        a / self.p.pow(s)
    }
    fn unit_inverse(&self, a: u64) -> u64 {
        invmod(a, self.m).expect("unit")
    }
    fn residue(&self, a: u64) -> u64 {
        a % self.p
    }
}

/// `R/p^N` for a ramified `R` of degree `E`, elements as `Σ c_j ϖ^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ext<const E: usize> {
    raw: RawField,
}

impl<const E: usize> Ext<E> {
    pub fn new(field: &LocalField) -> Self {
        assert_eq!(field.e as usize, E);
        Ext { raw: field.raw().clone() }
    }
}

impl<const E: usize> LocalRing for Ext<E> {
    type Elem = [u64; E];

    fn prime(&self) -> u64 {
        self.raw.p
    }
    fn ramification(&self) -> u32 {
        E as u32
    }
    fn precision(&self) -> u32 {
        E as u32 * self.raw.n
    }
    fn zero(&self) -> [u64; E] {
        [0; E]
    }
    fn one(&self) -> [u64; E] {
        let mut x = [0; E];
        x[0] = 1 % self.raw.m;
        x
    }
    fn from_i128(&self, v: i128) -> [u64; E] {
        let mut x = [0; E];
        x[0] = reduce_i128(v, self.raw.m);
        x
    }
    fn from_field(&self, v: &FieldElement) -> [u64; E] {
        let mut x = [0; E];
        for j in 0..E {
            x[j] = v.coeffs[j] % self.raw.m;
        }
        x
    }
    fn add(&self, mut a: [u64; E], b: [u64; E]) -> [u64; E] {
        self.raw.add_into(&mut a, &b);
        a
    }
    fn sub(&self, mut a: [u64; E], b: [u64; E]) -> [u64; E] {
        self.raw.sub_into(&mut a, &b);
        a
    }
    fn mul(&self, a: [u64; E], b: [u64; E]) -> [u64; E] {
        let mut out = [0; E];
        self.raw.mul(&a, &b, &mut out);
        out
    }
    fn valuation(&self, a: [u64; E]) -> Option<u32> {
        self.raw.valuation(&a)
    }
    fn uniformizer(&self) -> [u64; E] {
        let mut x = [0; E];
        x.copy_from_slice(&self.raw.varpi());
        x
    }
    fn shift_down(&self, a: [u64; E], s: u32) -> [u64; E] {
        let mut out = [0; E];
        self.raw.shift_down(&a, s, &mut out);
        out
    }
    fn unit_inverse(&self, a: [u64; E]) -> [u64; E] {
        let mut x = [0; E];
        x.copy_from_slice(&self.raw.unit_inverse(&a));
        x
    }
    fn residue(&self, a: [u64; E]) -> u64 {
        a[0] % self.raw.p
    }
}

/// Callback run with the concrete ring matching a field.
pub trait RingVisitor {
    type Output;
    fn visit<R: LocalRing>(self, ring: R) -> Self::Output;
}

/// Instantiate the ring `R/p^N` for `field` (at its precision) and run `v` on it.
pub fn with_ring<V: RingVisitor>(field: &LocalField, v: V) -> Result<V::Output> {
    match field.e {
        1 => Ok(v.visit(Zpn::new(field.p(), field.digits()))),
        2 => Ok(v.visit(Ext::<2>::new(field))),
        3 => Ok(v.visit(Ext::<3>::new(field))),
        4 => Ok(v.visit(Ext::<4>::new(field))),
        e => Err(Error::UnsupportedExtension(format!("ramification index {e} is not supported by the elimination kernels"))),
    }
}
