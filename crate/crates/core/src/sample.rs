//! Random elements of the coefficient rings, in the ring and precision of a
//! prototype element.

use rand::Rng;

use crate::scalar::Scalar;
use crate::witt::{PolyElem, RingElem};

/// t-degree bound for random polynomial entries.
pub const POLY_SAMPLE_DEGREE: usize = 2;

pub trait RandomScalar: Scalar {
    fn random_like<R: Rng + ?Sized>(&self, rng: &mut R) -> Self;

    fn random_unit_like<R: Rng + ?Sized>(&self, rng: &mut R) -> Self;

    fn random_p_multiple_like<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        self.random_like(rng).times_p()
    }
}

impl RandomScalar for RingElem {
    fn random_like<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        RingElem::random(self.ring(), self.precision(), rng)
    }

    fn random_unit_like<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        RingElem::random_unit(self.ring(), self.precision(), rng)
    }
}

impl RandomScalar for PolyElem {
    fn random_like<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        PolyElem::random(self.frame(), self.precision(), POLY_SAMPLE_DEGREE, rng)
    }

    /// A unit constant plus `p` times a random polynomial; these are exactly
    /// the units of `W_k(F_q)[t]` of bounded degree.
    fn random_unit_like<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let base = self.frame().base();
        let c = RingElem::random_unit(base, self.precision(), rng);
        PolyElem::constant(self.frame(), &c).add(&self.random_p_multiple_like(rng))
    }
}
