//! The arithmetic surface shared by every coefficient ring in the crate.
//!
//! Elements carry their own ring context (descriptor and precision), so
//! constants are produced from an existing element with the `*_like`
//! constructors instead of from a type-level zero.

use std::fmt;

use crate::witt::WittError;

pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// The image of an integer in the ring of `self`, at the precision of `self`.
    fn int_like(&self, value: i64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn inverse(&self) -> Option<Self>;

    /// The Frobenius lift of the ambient frame.
    fn frobenius(&self) -> Self;
    /// `y` with `p * y = self`, one level of precision lower.
    fn div_p_exact(&self) -> Result<Self, WittError>;
    /// Coefficientwise reduction into the residue ring (precision 1).
    fn reduce_mod_p(&self) -> Self;

    fn precision(&self) -> u32;
    /// Reduction to a lower precision. Panics if `prec` exceeds the current one.
    fn truncate(&self, prec: u32) -> Self;
    fn prime(&self) -> u64;

    fn is_one(&self) -> bool {
        self.sub(&self.one_like()).is_zero()
    }

    fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// `p * self`.
    fn times_p(&self) -> Self {
        self.mul(&self.int_like(self.prime() as i64))
    }

    fn is_divisible_by_p(&self) -> bool {
        self.reduce_mod_p().is_zero()
    }
}
