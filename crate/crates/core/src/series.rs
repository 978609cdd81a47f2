//! Asymptotic power-series kernel.
//!
//! A `CoefSeq` holds the prefix a_0..a_N of a coefficient sequence, either of
//! a generic series Σ a_n x^{-n} or of a mean series Σ a_n t^{2n} x^{-2n+1}.
//! The central operation is the power recursion
//!
//!   P[0,r,a] = a_0^r,
//!   P[n,r,a] = 1/(n a_0) Σ_{k=1}^{n} [k(1+r) - n] a_k P[n-k,r,a],
//!
//! which turns a series with nonzero leading coefficient into its r-th
//! power. Every operation takes an explicit target order; nothing infers
//! lengths silently.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{rat_int, rat_pow, Rat};
use crate::scalar::{Coeff, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct CoefSeq<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> CoefSeq<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a coefficient sequence needs an order");
        CoefSeq { coeffs }
    }

    /// Sequence of the given order with all entries zero.
    pub fn zeros(order: usize) -> Self {
        CoefSeq {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    /// The Kronecker delta sequence (1, 0, ..., 0): identity of convolution.
    pub fn delta(order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = T::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn get(&self, i: usize) -> &T {
        &self.coeffs[i]
    }

    pub fn set(&mut self, i: usize, v: T) {
        self.coeffs[i] = v;
    }

    pub fn push(&mut self, v: T) {
        self.coeffs.push(v);
    }

    pub fn truncated(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::InsufficientOrder(format!(
                "have order {}, need {}",
                self.order(),
                order
            )));
        }
        Ok(CoefSeq {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    pub fn is_mean_normalized(&self) -> bool {
        self.coeffs[0].as_rat().map(|r| One::is_one(&r)).unwrap_or(false)
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> CoefSeq<U> {
        CoefSeq {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self, n_max: usize) -> Result<Self> {
        self.check_order(n_max)?;
        other.check_order(n_max)?;
        Ok(CoefSeq {
            coeffs: (0..=n_max)
                .map(|i| self.coeffs[i].add(&other.coeffs[i]))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self, n_max: usize) -> Result<Self> {
        self.check_order(n_max)?;
        other.check_order(n_max)?;
        Ok(CoefSeq {
            coeffs: (0..=n_max)
                .map(|i| self.coeffs[i].sub(&other.coeffs[i]))
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rat) -> Self {
        CoefSeq {
            coeffs: self.coeffs.iter().map(|x| x.mul_rat(c)).collect(),
        }
    }

    fn check_order(&self, n_max: usize) -> Result<()> {
        if self.order() < n_max {
            return Err(Error::InsufficientOrder(format!(
                "sequence order {} below requested {}",
                self.order(),
                n_max
            )));
        }
        Ok(())
    }
}

impl CoefSeq<Rat> {
    /// Test/fixture helper: build from (numerator, denominator) pairs.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        CoefSeq::new(pairs.iter().map(|&(n, d)| crate::rational::rat(n, d)).collect())
    }
}

/// The power `r` in the series power recursion: an integer of either sign, a
/// rational, or an expression linear in a single parameter (the recursion
/// only ever uses r inside the linear bracket k(1+r) - n).
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Int(i64),
    Rat(Rat),
    Sym(Poly),
}

impl Exponent {
    fn bracket(&self, k: usize, n: usize) -> Scalar {
        let k = rat_int(k as i64);
        let n = rat_int(n as i64);
        match self {
            Exponent::Int(r) => Scalar::Rat(&k * (rat_int(1 + r)) - n),
            Exponent::Rat(r) => Scalar::Rat(&k * (r + <Rat as One>::one()) - n),
            Exponent::Sym(p) => {
                let one_plus_r = p.add(&Poly::constant(<Rat as One>::one()));
                Scalar::Poly(one_plus_r.scale(&k).sub(&Poly::constant(n)))
            }
        }
    }
}

/// Coefficients of the r-th power of the series with coefficients `a`,
/// up to order `n_max` inclusive.
pub fn gould_power<T: Coeff>(a: &CoefSeq<T>, r: &Exponent, n_max: usize) -> Result<CoefSeq<T>> {
    if a.order() < n_max {
        return Err(Error::InsufficientOrder(format!(
            "base sequence order {} below requested {}",
            a.order(),
            n_max
        )));
    }
    let a0 = a
        .get(0)
        .as_rat()
        .ok_or_else(|| Error::SymbolicCoefficient("leading coefficient".into()))?;
    if Zero::is_zero(&a0) {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let p0 = match r {
        Exponent::Int(e) => T::from_rat(rat_pow(&a0, *e)?),
        _ => {
            if !One::is_one(&a0) {
                return Err(Error::UnsupportedExponent(
                    "non-integer exponent requires leading coefficient 1".into(),
                ));
            }
            T::one()
        }
    };
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(p0);
    for n in 1..=n_max {
        let mut sum = T::zero();
        for k in 1..=n {
            let factor = T::from_scalar(&r.bracket(k, n)).map_err(|_| {
                Error::UnsupportedExponent("symbolic exponent outside polynomial ring".into())
            })?;
            sum = sum.add(&factor.mul(a.get(k)).mul(&out[n - k]));
        }
        let div = rat_int(n as i64) * &a0;
        out.push(sum.div_rat(&div)?);
    }
    Ok(CoefSeq::new(out))
}

/// Memoized P[k, r, a] table for integer exponents, local to one top-level
/// computation so results stay reproducible.
pub struct PowerTable<T> {
    seq: CoefSeq<T>,
    rows: HashMap<i64, CoefSeq<T>>,
}

impl<T: Coeff> PowerTable<T> {
    pub fn new(seq: CoefSeq<T>) -> Self {
        PowerTable {
            seq,
            rows: HashMap::new(),
        }
    }

    pub fn p(&mut self, k: usize, r: i64) -> Result<T> {
        if !self.rows.contains_key(&r) {
            let row = gould_power(&self.seq, &Exponent::Int(r), self.seq.order())?;
            self.rows.insert(r, row);
        }
        let row = &self.rows[&r];
        if k > row.order() {
            return Err(Error::IndexOutOfRange(format!(
                "P[{k}, {r}, .] beyond table order {}",
                row.order()
            )));
        }
        Ok(row.get(k).clone())
    }
}

/// Auxiliary sequences g = (1, a1, 0, a2, 0, ...) and
/// h = (2, -1, a1, 0, a2, 0, ...) of a mean sequence, both of order 2N.
pub fn build_g_h<T: Coeff>(a: &CoefSeq<T>) -> Result<(CoefSeq<T>, CoefSeq<T>)> {
    if !a.is_mean_normalized() {
        return Err(Error::NotNormalized);
    }
    let n = a.order();
    let mut g = CoefSeq::zeros(2 * n);
    let mut h = CoefSeq::zeros(2 * n);
    g.set(0, T::one());
    h.set(0, T::from_rat(rat_int(2)));
    if 2 * n >= 1 {
        h.set(1, T::from_rat(rat_int(-1)));
    }
    for j in 1..=n {
        g.set(2 * j - 1, a.get(j).clone());
        if 2 * j <= 2 * n {
            h.set(2 * j, a.get(j).clone());
        }
    }
    Ok((g, h))
}

/// Mirror sequences g~ = (1, -a1, 0, -a2, ...) and h~ = (2, 1, a1, 0, a2, ...).
pub fn build_g_h_tilde<T: Coeff>(a: &CoefSeq<T>) -> Result<(CoefSeq<T>, CoefSeq<T>)> {
    let (g, mut h) = build_g_h(a)?;
    let g_t = g.map(|c| c.neg());
    let mut g_t = g_t;
    g_t.set(0, T::one());
    if h.order() >= 1 {
        h.set(1, T::one());
    }
    Ok((g_t, h))
}

/// Cauchy product c_n = Σ_{k=0}^{n} a_k b_{n-k}, up to order n_max.
pub fn convolve<T: Coeff>(a: &CoefSeq<T>, b: &CoefSeq<T>, n_max: usize) -> Result<CoefSeq<T>> {
    a.check_order(n_max)?;
    b.check_order(n_max)?;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut c = T::zero();
        for k in 0..=n {
            c = c.add(&a.get(k).mul(b.get(n - k)));
        }
        out.push(c);
    }
    Ok(CoefSeq::new(out))
}

/// Reduced D(m,n,k), S(m,n,k): the parity reduction makes D vanish for even
/// m and S vanish for odd m; the surviving branch is
/// ±2 P[k,2n,g] P[m-2n-k,-2n+1,h].
pub fn d_s_terms<T: Coeff>(
    m: usize,
    n: usize,
    k: usize,
    g: &CoefSeq<T>,
    h: &CoefSeq<T>,
) -> Result<(T, T)> {
    if n > m / 2 || k > m - 2 * n {
        return Err(Error::IndexOutOfRange(format!(
            "D/S indices m={m}, n={n}, k={k}"
        )));
    }
    let pg = gould_power(g, &Exponent::Int(2 * n as i64), k)?;
    let ph = gould_power(h, &Exponent::Int(-2 * (n as i64) + 1), m - 2 * n - k)?;
    let prod = pg.get(k).mul(ph.get(m - 2 * n - k)).mul_rat(&rat_int(2));
    if m % 2 == 0 {
        Ok((T::zero(), prod))
    } else {
        Ok((prod.neg(), T::zero()))
    }
}

/// exp of a series with zero constant term: e_0 = 1,
/// e_n = (1/n) Σ_{k=1}^{n} k s_k e_{n-k}.
pub fn series_exp<T: Coeff>(s: &CoefSeq<T>, n_max: usize) -> Result<CoefSeq<T>> {
    s.check_order(n_max)?;
    if !s.get(0).is_zero() {
        return Err(Error::NotNormalized);
    }
    let mut out: Vec<T> = Vec::with_capacity(n_max + 1);
    out.push(T::one());
    for n in 1..=n_max {
        let mut sum = T::zero();
        for k in 1..=n {
            sum = sum.add(&s.get(k).mul_rat(&rat_int(k as i64)).mul(&out[n - k]));
        }
        out.push(sum.div_rat(&rat_int(n as i64))?);
    }
    Ok(CoefSeq::new(out))
}
