//! Exact arithmetic in Z_p and in totally ramified extensions of Q_p.

pub mod arith;
mod expr;
mod field;
mod ring;

pub use expr::{eval_ap, ApExpression, ApValue};
pub use field::{hensel_sqrt, make_field, teichmuller_digits, FieldElement, LocalField, PrimeContext, RawField};
pub use ring::{with_ring, Ext, LocalRing, RingVisitor, Zpn};
