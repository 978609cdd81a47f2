//! The common coefficient scalar: an exact rational or a polynomial over
//! rationals, plus the `Coeff` ring abstraction the series kernel is
//! generic over.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{render_rat, Rat};

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rat(Rat),
    Poly(Poly),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(<Rat as Zero>::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(<Rat as One>::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        Scalar::Rat(r)
    }

    pub fn var(name: &str) -> Self {
        Scalar::Poly(Poly::var(name))
    }

    /// Constant polynomials collapse back into the rational variant so the
    /// embedding Rational ⊂ Poly is an equality of canonical forms.
    fn canonical(p: Poly) -> Self {
        match p.as_constant() {
            Some(c) => Scalar::Rat(c),
            None => Scalar::Poly(p),
        }
    }

    pub fn to_poly(&self) -> Poly {
        match self {
            Scalar::Rat(r) => Poly::constant(r.clone()),
            Scalar::Poly(p) => p.clone(),
        }
    }

    pub fn as_rat(&self) -> Option<Rat> {
        match self {
            Scalar::Rat(r) => Some(r.clone()),
            Scalar::Poly(p) => p.as_constant(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => Zero::is_zero(r),
            Scalar::Poly(p) => p.is_zero(),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => Scalar::canonical(self.to_poly().add(&other.to_poly())),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => Scalar::canonical(self.to_poly().mul(&other.to_poly())),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Poly(p) => Scalar::Poly(p.neg()),
        }
    }

    pub fn mul_rat(&self, c: &Rat) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(r * c),
            Scalar::Poly(p) => Scalar::canonical(p.scale(c)),
        }
    }

    /// Division by a nonzero rational; division by a genuine polynomial is
    /// deliberately not offered on scalars.
    pub fn div_rat(&self, d: &Rat) -> Result<Scalar> {
        if Zero::is_zero(d) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.mul_rat(&d.recip()))
    }

    pub fn eval(&self, assignment: &BTreeMap<String, Rat>) -> Result<Rat> {
        match self {
            Scalar::Rat(r) => Ok(r.clone()),
            Scalar::Poly(p) => p.eval(assignment),
        }
    }

    pub fn subst(&self, var: &str, value: &Poly) -> Scalar {
        match self {
            Scalar::Rat(_) => self.clone(),
            Scalar::Poly(p) => Scalar::canonical(p.subst(var, value)),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{}", render_rat(r)),
            Scalar::Poly(p) => write!(f, "{p}"),
        }
    }
}

/// Exact coefficient ring the series kernel works over. Implemented for
/// plain rationals, the rational-or-polynomial `Scalar`, and the quotient
/// ring elements used by the analysis layer.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rat(r: Rat) -> Self;
    /// The value as a plain rational, when it has no symbolic content.
    fn as_rat(&self) -> Option<Rat>;
    fn mul_rat(&self, c: &Rat) -> Self;
    fn div_rat(&self, d: &Rat) -> Result<Self>;
    /// Embeds a scalar (possibly symbolic) into the ring; errors when the
    /// ring cannot represent it.
    fn from_scalar(s: &Scalar) -> Result<Self>;
}

impl Coeff for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn as_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
    fn mul_rat(&self, c: &Rat) -> Self {
        self * c
    }
    fn div_rat(&self, d: &Rat) -> Result<Self> {
        if Zero::is_zero(d) {
            return Err(Error::DivisionByZero);
        }
        Ok(self / d)
    }
    fn from_scalar(s: &Scalar) -> Result<Self> {
        s.as_rat()
            .ok_or_else(|| Error::SymbolicCoefficient(s.to_string()))
    }
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Scalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Scalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Scalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
    fn from_rat(r: Rat) -> Self {
        Scalar::Rat(r)
    }
    fn as_rat(&self) -> Option<Rat> {
        Scalar::as_rat(self)
    }
    fn mul_rat(&self, c: &Rat) -> Self {
        Scalar::mul_rat(self, c)
    }
    fn div_rat(&self, d: &Rat) -> Result<Self> {
        Scalar::div_rat(self, d)
    }
    fn from_scalar(s: &Scalar) -> Result<Self> {
        Ok(s.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn rational_poly_embedding() {
        let a1 = Scalar::var("a1");
        // a1 - a1 collapses back to the rational zero
        assert_eq!(a1.sub(&a1), Scalar::Rat(<Rat as Zero>::zero()));
        // (p + q)(p - q) = p^2 - q^2
        let p = Scalar::var("p");
        let q = Scalar::var("q");
        let lhs = p.add(&q).mul(&p.sub(&q));
        let rhs = p.mul(&p).sub(&q.mul(&q));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn div_rat_rejects_zero() {
        assert!(Scalar::var("a1").div_rat(&rat_int(0)).is_err());
        assert_eq!(
            Scalar::Rat(rat(1, 1134)).div_rat(&rat(1, 2)).unwrap(),
            Scalar::Rat(rat(2, 1134))
        );
    }
}
