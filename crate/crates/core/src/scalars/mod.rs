//! Coefficient arithmetic: exact rationals, formal transcendental polynomials
//! and arbitrary-precision complex numerics.

mod numeric;
mod rat;
mod sym;

pub use numeric::{
    bernoulli, bigc_from_json, bigc_to_json, cabs, euler_gamma, euler_gamma_with_cutoff, eval_sym, zeta_value,
    BigC, Constants, Precision,
};
pub use rat::Rat;
pub use sym::{Gen, Monomial, SymScalar, DEFAULT_MAX_ZETA};

/// Coefficient ring used by cohomology classes.
///
/// Method names avoid clashing with `std::ops` so that both can be in scope.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rat(r: Rat) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, r: &Rat) -> Self;

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negated())
    }
}

impl Coeff for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, r: &Rat) -> Self {
        self * r
    }
}

impl Coeff for SymScalar {
    fn zero() -> Self {
        SymScalar::zero()
    }
    fn one() -> Self {
        SymScalar::one()
    }
    fn from_rat(r: Rat) -> Self {
        SymScalar::constant(r)
    }
    fn is_zero(&self) -> bool {
        SymScalar::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, r: &Rat) -> Self {
        self.scale(r)
    }
}
