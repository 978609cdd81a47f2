//! Helpers around arbitrary-precision rationals.
//!
//! `Rat` is a `num_rational::BigRational`, which already keeps the canonical
//! form gcd(|num|, den) = 1 with positive denominator after every operation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Shorthand for small rational constants.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact integer power, including negative exponents of nonzero values.
pub fn rat_pow(base: &Rat, exp: i64) -> Result<Rat> {
    if base.is_zero() {
        return match exp {
            0 => Ok(Rat::one()),
            e if e > 0 => Ok(Rat::zero()),
            _ => Err(Error::DivisionByZero),
        };
    }
    let p = base.pow(exp.unsigned_abs() as i32);
    Ok(if exp < 0 { p.recip() } else { p })
}

/// Parse "n", "n/d" or "-n/d" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator: {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator: {s:?}")))?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rat::new(n, d))
}

/// Render as "n/d", or just "n" for integers. This is the output contract
/// shared by the CLI and golden tests.
pub fn render_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Binomial coefficient with arbitrary rational (or integer) upper argument:
/// binom(r, k) = r(r-1)...(r-k+1)/k!.
pub fn binom_rat(r: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..k {
        acc *= r - rat_int(i as i64);
        acc /= rat_int(i as i64 + 1);
    }
    acc
}

/// Binomial coefficient with integer upper argument of arbitrary sign.
pub fn binom_int(n: i64, k: u32) -> Rat {
    binom_rat(&rat_int(n), k)
}

/// Splits a positive integer into square-free part and square root of the
/// rest: n = square_free * sq^2. Trial division; the radicands appearing in
/// the analysis layer are tiny.
pub fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive());
    let mut rest = n.clone();
    let mut sq = BigInt::one();
    let mut free = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut cnt = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            cnt += 1;
        }
        if cnt > 0 {
            for _ in 0..cnt / 2 {
                sq *= &p;
            }
            if cnt % 2 == 1 {
                free *= &p;
            }
        }
        p += 1;
    }
    free *= rest;
    (free, sq)
}
