//! Arbitrary-precision binary floating point, used by the numeric oracle
//! and the functional-equation residual checks.
//!
//! Thin context wrapper over `astro_float`: the context carries the working
//! precision (requested bits plus a guard) and the shared constants cache,
//! so precision is always an explicit argument and never ambient state.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::Rat;

const GUARD_BITS: usize = 16;

pub struct FloatCtx {
    /// Requested precision in bits (tolerances are judged against this).
    bits: usize,
    /// Working precision: requested plus guard.
    p: usize,
    rm: RoundingMode,
    cc: Consts,
}

impl FloatCtx {
    pub fn new(bits: usize) -> Self {
        let bits = bits.max(128);
        FloatCtx {
            bits,
            p: bits + GUARD_BITS,
            rm: RoundingMode::ToEven,
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn from_i64(&mut self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.p)
    }

    pub fn from_bigint(&mut self, n: &BigInt) -> BigFloat {
        let mag = n.abs().to_str_radix(16);
        let v = BigFloat::parse(&mag, Radix::Hex, self.p, self.rm, &mut self.cc);
        if n.is_negative() {
            v.neg()
        } else {
            v
        }
    }

    pub fn from_rat(&mut self, r: &Rat) -> BigFloat {
        let n = self.from_bigint(r.numer());
        let d = self.from_bigint(r.denom());
        n.div(&d, self.p, self.rm)
    }

    pub fn add(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, self.rm)
    }

    pub fn sub(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, self.rm)
    }

    pub fn mul(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, self.rm)
    }

    pub fn div(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, self.rm)
    }

    pub fn sqrt(&mut self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, self.rm)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, self.rm, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, self.rm, &mut self.cc)
    }

    pub fn asin(&mut self, a: &BigFloat) -> BigFloat {
        a.asin(self.p, self.rm, &mut self.cc)
    }

    pub fn atan(&mut self, a: &BigFloat) -> BigFloat {
        a.atan(self.p, self.rm, &mut self.cc)
    }

    pub fn asinh(&mut self, a: &BigFloat) -> BigFloat {
        a.asinh(self.p, self.rm, &mut self.cc)
    }

    /// a^e for an exact rational exponent; a must be positive. Computed as
    /// powi for integer exponents and exp(e ln a) otherwise — the library's
    /// own `pow` can stall in its rounding loop for bases very close to 1.
    pub fn pow_rat(&mut self, a: &BigFloat, e: &Rat) -> BigFloat {
        use num_traits::ToPrimitive;
        if e.is_integer() {
            if let Some(n) = e.numer().to_i64() {
                return self.pow_i64(a, n);
            }
        }
        let l = self.ln(a);
        let ef = self.from_rat(e);
        let y = self.mul(&l, &ef);
        self.exp(&y)
    }

    /// Integer power of either sign.
    pub fn pow_i64(&mut self, a: &BigFloat, e: i64) -> BigFloat {
        if e >= 0 {
            a.powi(e as usize, self.p, self.rm)
        } else {
            let p = a.powi((-e) as usize, self.p, self.rm);
            p.reciprocal(self.p, self.rm)
        }
    }

    pub fn abs(&self, a: &BigFloat) -> BigFloat {
        let mut v = a.clone();
        v.set_sign(Sign::Pos);
        v
    }

    pub fn neg(&self, a: &BigFloat) -> BigFloat {
        a.neg()
    }

    pub fn is_zero(&self, a: &BigFloat) -> bool {
        a.is_zero()
    }

    pub fn cmp(&self, a: &BigFloat, b: &BigFloat) -> std::cmp::Ordering {
        match a.cmp(b) {
            Some(s) if s < 0 => std::cmp::Ordering::Less,
            Some(s) if s > 0 => std::cmp::Ordering::Greater,
            Some(_) => std::cmp::Ordering::Equal,
            None => panic!("NaN in exact-domain computation"),
        }
    }

    /// |a - b| / |a|, with the convention 0 when both are zero.
    pub fn rel_err(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        let diff = self.sub(a, b);
        let diff = self.abs(&diff);
        if a.is_zero() {
            return diff;
        }
        let den = self.abs(a);
        self.div(&diff, &den)
    }

    /// 2^e as a float, handy for tolerance thresholds.
    pub fn pow2(&mut self, e: i64) -> BigFloat {
        let two = self.from_i64(2);
        self.pow_i64(&two, e)
    }

    /// Shortest-ish decimal rendering for reports.
    pub fn to_decimal_string(&mut self, a: &BigFloat) -> String {
        let mut v = a.clone();
        // round to the requested precision for display
        let _ = v.set_precision(self.bits, self.rm);
        v.format(Radix::Dec, self.rm, &mut self.cc)
            .unwrap_or_else(|_| "nan".to_string())
    }

    pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
        let s = self
            .to_decimal_string(a)
            .replace('e', "e");
        s.parse().unwrap_or(f64::NAN)
    }

    pub fn ensure_positive(&self, a: &BigFloat, what: &str) -> Result<()> {
        if a.is_negative() || a.is_zero() {
            return Err(Error::DomainError(format!("{what} must be positive")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rational_conversion_roundtrip() {
        let mut ctx = FloatCtx::new(192);
        let x = ctx.from_rat(&rat(-355, 113));
        let y = ctx.from_rat(&rat(355, 113));
        assert_eq!(ctx.cmp(&ctx.abs(&x), &y), std::cmp::Ordering::Equal);
    }

    #[test]
    fn asin_of_half_is_pi_over_six() {
        let mut ctx = FloatCtx::new(192);
        let half = ctx.from_rat(&rat(1, 2));
        let asin = ctx.asin(&half);
        let six = ctx.from_i64(6);
        let pi = ctx.mul(&asin, &six);
        // sin(pi) should be ~0; compare against known pi via exp/ln-free route:
        // check 6*asin(1/2) against atan(1)*4
        let one = ctx.from_i64(1);
        let pi2 = ctx.atan(&one);
        let four = ctx.from_i64(4);
        let pi2 = ctx.mul(&pi2, &four);
        let err = ctx.rel_err(&pi, &pi2);
        let tol = ctx.pow2(-180);
        assert_eq!(ctx.cmp(&err, &tol), std::cmp::Ordering::Less);
    }

    #[test]
    fn pow_rat_matches_sqrt() {
        let mut ctx = FloatCtx::new(256);
        let x = ctx.from_i64(2);
        let a = ctx.pow_rat(&x, &rat(1, 2));
        let b = ctx.sqrt(&x);
        let err = ctx.rel_err(&a, &b);
        let tol = ctx.pow2(-250);
        assert_eq!(ctx.cmp(&err, &tol), std::cmp::Ordering::Less);
    }
}
