//! Coefficient recursions for the resultant mean-map and its fixed points.
//!
//! For homogeneous symmetric means K, N, M with expansions
//! M(x-t, x+t) ~ Σ a_n^M t^{2n} x^{-2n+1}, the resultant
//! R = K(N(s, M(s,t)), N(M(s,t), t)) admits the same expansion shape. Its
//! coefficients are obtained by the power recursion applied to the auxiliary
//! sequences g/h of M and the midpoint sequences d/s of the inner pair
//! (N(s,M), N(M,t)). Imposing R = K = N = M, R = N, or R = M and solving for
//! the highest-index coefficient yields triangular recursions for stable,
//! stabilizable and stabilized means; all three run through one driver.

use astro_float::BigFloat;

use crate::bigfloat::FloatCtx;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{binom_int, rat, rat_int, rat_pow, Rat};
use crate::scalar::{Coeff, Scalar};
use crate::series::{build_g_h, CoefSeq, PowerTable};

/// The coefficient sequence (a_n) of a mean expansion, with the forced
/// normalization a_0 = 1, plus a free-text provenance label.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCoeffs<T> {
    seq: CoefSeq<T>,
    label: String,
}

impl<T: Coeff> MeanCoeffs<T> {
    pub fn new(seq: CoefSeq<T>, label: impl Into<String>) -> Result<Self> {
        if !seq.is_mean_normalized() {
            return Err(Error::NotNormalized);
        }
        Ok(MeanCoeffs {
            seq,
            label: label.into(),
        })
    }

    /// The arithmetic mean: A(x-t, x+t) = x, so all higher coefficients
    /// vanish.
    pub fn arithmetic(order: usize) -> Self {
        MeanCoeffs {
            seq: CoefSeq::delta(order),
            label: "arithmetic".into(),
        }
    }

    pub fn seq(&self) -> &CoefSeq<T> {
        &self.seq
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.seq.order()
    }

    pub fn coeff(&self, i: usize) -> &T {
        self.seq.get(i)
    }

    fn check_order(&self, m_max: usize) -> Result<()> {
        if self.order() < m_max {
            return Err(Error::InsufficientOrder(format!(
                "{} has order {}, need {}",
                self.label,
                self.order(),
                m_max
            )));
        }
        Ok(())
    }
}

impl MeanCoeffs<Rat> {
    pub fn from_pairs(pairs: &[(i64, i64)], label: impl Into<String>) -> Result<Self> {
        MeanCoeffs::new(CoefSeq::from_pairs(pairs), label)
    }

    pub fn to_symbolic(&self) -> MeanCoeffs<Scalar> {
        MeanCoeffs {
            seq: self.seq.map(|c| Scalar::Rat(c.clone())),
            label: self.label.clone(),
        }
    }
}

/// The midpoint sequences of Theorem 3.1's proof: the inner pair
/// (N(s,M), N(M,t)) written as X - T, X + T has
/// T ~ Σ d_m t^{2m+1} x^{-2m} and X ~ Σ s_m t^{2m} x^{-2m+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct DSSeqs<T> {
    pub d: CoefSeq<T>,
    pub s: CoefSeq<T>,
}

/// Zero-extends a sequence; entries beyond the known order are only ever
/// consulted where the surrounding formulas make them provably irrelevant
/// (delta rows, identity rows at odd h-indices).
fn zero_padded<T: Coeff>(a: &CoefSeq<T>, order: usize) -> CoefSeq<T> {
    let mut c = a.coeffs().to_vec();
    if c.len() < order + 1 {
        c.resize(order + 1, T::zero());
    }
    CoefSeq::new(c)
}

/// Memoized powers of the g/h pair of one mean sequence.
struct GhTables<T> {
    g: PowerTable<T>,
    h: PowerTable<T>,
}

impl<T: Coeff> GhTables<T> {
    /// Tables over g^M/h^M built from `a_m` padded to order `pad_to`
    /// (the tables then cover indices up to 2*pad_to).
    fn of(a_m: &CoefSeq<T>, pad_to: usize) -> Result<Self> {
        let (g, h) = build_g_h(&zero_padded(a_m, pad_to))?;
        Ok(GhTables {
            g: PowerTable::new(g),
            h: PowerTable::new(h),
        })
    }

    /// Σ_{k=0}^{top} P[k, 2n, g] P[top-k, -2n+1, h].
    fn sum(&mut self, top: usize, n: usize) -> Result<T> {
        let rg = 2 * n as i64;
        let rh = 1 - 2 * n as i64;
        let mut acc = T::zero();
        for k in 0..=top {
            acc = acc.add(&self.g.p(k, rg)?.mul(&self.h.p(top - k, rh)?));
        }
        Ok(acc)
    }
}

/// Memoized powers of the d/s pair.
struct DsTables<T> {
    d: PowerTable<T>,
    s: PowerTable<T>,
}

impl<T: Coeff> DsTables<T> {
    fn of(ds: DSSeqs<T>) -> Self {
        DsTables {
            d: PowerTable::new(ds.d),
            s: PowerTable::new(ds.s),
        }
    }

    /// Σ_{k=0}^{m-n} P[k, 2n, d] P[m-n-k, -2n+1, s].
    fn sum(&mut self, m: usize, n: usize) -> Result<T> {
        let rd = 2 * n as i64;
        let rs = 1 - 2 * n as i64;
        let mut acc = T::zero();
        for k in 0..=m - n {
            acc = acc.add(&self.d.p(k, rd)?.mul(&self.s.p(m - n - k, rs)?));
        }
        Ok(acc)
    }
}

/// d_m = -(1/2) Σ_{n=0}^{m} a_n^N Σ_k P[k,2n,g^M] P[2m+1-2n-k,-2n+1,h^M],
/// s_m = +(1/2) Σ_{n=0}^{m} a_n^N Σ_k P[k,2n,g^M] P[2m-2n-k,-2n+1,h^M].
/// The gh tables must cover index 2*m_max + 1.
fn d_s_raw<T: Coeff>(a_n: &CoefSeq<T>, gh: &mut GhTables<T>, m_max: usize) -> Result<DSSeqs<T>> {
    let mut d = Vec::with_capacity(m_max + 1);
    let mut s = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut dm = T::zero();
        let mut sm = T::zero();
        for n in 0..=m {
            let an = a_n.get(n);
            if an.is_zero() {
                continue;
            }
            dm = dm.add(&an.mul(&gh.sum(2 * m + 1 - 2 * n, n)?));
            sm = sm.add(&an.mul(&gh.sum(2 * m - 2 * n, n)?));
        }
        d.push(dm.mul_rat(&rat(-1, 2)));
        s.push(sm.mul_rat(&rat(1, 2)));
    }
    Ok(DSSeqs {
        d: CoefSeq::new(d),
        s: CoefSeq::new(s),
    })
}

/// Midpoint sequences d, s of the pair (N(s,M), N(M,t)) up to index m_max.
pub fn d_s_seqs<T: Coeff>(
    a_n: &MeanCoeffs<T>,
    a_m: &MeanCoeffs<T>,
    m_max: usize,
) -> Result<DSSeqs<T>> {
    a_n.check_order(m_max)?;
    a_m.check_order(m_max)?;
    let mut gh = GhTables::of(a_m.seq(), m_max + 1)?;
    d_s_raw(a_n.seq(), &mut gh, m_max)
}

/// Coefficients of the resultant mean-map R(K, N, M):
/// a_m^R = Σ_{n=0}^{m} a_n^K Σ_k P[k,2n,d] P[m-n-k,-2n+1,s].
pub fn resultant_coeffs<T: Coeff>(
    a_k: &MeanCoeffs<T>,
    a_n: &MeanCoeffs<T>,
    a_m: &MeanCoeffs<T>,
    m_max: usize,
) -> Result<MeanCoeffs<T>> {
    a_k.check_order(m_max)?;
    let mut ds = DsTables::of(d_s_seqs(a_n, a_m, m_max)?);
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut am = T::zero();
        for n in 0..=m {
            let ak = a_k.coeff(n);
            if ak.is_zero() {
                continue;
            }
            am = am.add(&ak.mul(&ds.sum(m, n)?));
        }
        out.push(am);
    }
    MeanCoeffs::new(
        CoefSeq::new(out),
        format!("R({}, {}, {})", a_k.label, a_n.label, a_m.label),
    )
}

/// Which sequence of R(K, N, M) is solved for; the remaining ones are given.
enum Unknown<'a, T> {
    /// K = N = M = R: stable mean with free first coefficient.
    Stable { a1: T },
    /// R = N unknown, K and M given.
    Stabilizable {
        a_k: &'a CoefSeq<T>,
        a_m: &'a CoefSeq<T>,
    },
    /// R = M unknown, K and N given.
    Stabilized {
        a_k: &'a CoefSeq<T>,
        a_n: &'a CoefSeq<T>,
    },
}

/// 2^p / (2^q - 1).
fn prefactor(p: i64, q: i64) -> Rat {
    let num = rat_pow(&rat_int(2), p).expect("positive exponent");
    let den = rat_pow(&rat_int(2), q).expect("positive exponent") - rat_int(1);
    num / den
}

/// One driver for Theorems 3.2-3.4. At step m every right-hand side only
/// involves indices of the unknown sequence below m (the n = m terms of the
/// original fixed-point identity have been moved to the left), so the
/// coefficients are filled in strictly increasing index order.
fn solve_triangular<T: Coeff>(unknown: Unknown<'_, T>, m_max: usize) -> Result<CoefSeq<T>> {
    let mut u: Vec<T> = vec![T::one()];
    if let Unknown::Stable { a1 } = &unknown {
        if m_max >= 1 {
            u.push(a1.clone());
        }
    }
    while u.len() <= m_max {
        let m = u.len();
        let useq = CoefSeq::new(u.clone());
        let (_a_k, a_n, a_m): (&CoefSeq<T>, &CoefSeq<T>, &CoefSeq<T>) = match &unknown {
            Unknown::Stable { .. } => (&useq, &useq, &useq),
            Unknown::Stabilizable { a_k, a_m } => (a_k, &useq, a_m),
            Unknown::Stabilized { a_k, a_n } => (a_k, a_n, &useq),
        };
        // g/h of M padded so indices up to 2m are covered; d/s to index m-1
        // (the step formulas read P[.,2n,d] only for n >= 1).
        let mut gh = GhTables::of(a_m, m)?;
        let mut ds = DsTables::of(d_s_raw(a_n, &mut gh, m - 1)?);

        let mut gh_part = T::zero();
        let mut ds_part = T::zero();
        let value = match &unknown {
            Unknown::Stable { .. } => {
                for n in 1..m {
                    let an = useq.get(n);
                    if an.is_zero() {
                        continue;
                    }
                    gh_part = gh_part.add(&an.mul(&gh.sum(2 * m - 2 * n, n)?));
                    ds_part = ds_part.add(&an.mul(&ds.sum(m, n)?));
                }
                let inner = gh_part.mul_rat(&rat(1, 2)).add(&ds_part);
                inner.mul_rat(&prefactor(2 * m as i64 - 1, 2 * m as i64 - 2))
            }
            Unknown::Stabilizable { a_k, .. } => {
                for n in 0..m {
                    let an = useq.get(n);
                    if !an.is_zero() {
                        gh_part = gh_part.add(&an.mul(&gh.sum(2 * m - 2 * n, n)?));
                    }
                }
                for n in 1..=m {
                    let ak = a_k.get(n);
                    if !ak.is_zero() {
                        ds_part = ds_part.add(&ak.mul(&ds.sum(m, n)?));
                    }
                }
                let inner = gh_part.mul_rat(&rat(1, 2)).add(&ds_part);
                inner.mul_rat(&prefactor(2 * m as i64, 2 * m as i64))
            }
            Unknown::Stabilized { a_k, a_n } => {
                for n in 1..=m {
                    let an = a_n.get(n);
                    if !an.is_zero() {
                        gh_part = gh_part.add(&an.mul(&gh.sum(2 * m - 2 * n, n)?));
                    }
                    let ak = a_k.get(n);
                    if !ak.is_zero() {
                        ds_part = ds_part.add(&ak.mul(&ds.sum(m, n)?));
                    }
                }
                gh_part.add(&ds_part.mul_rat(&rat_int(2)))
            }
        };
        u.push(value);
    }
    Ok(CoefSeq::new(u))
}

/// Coefficients of a stable mean with free first coefficient a1
/// (Theorem 3.2). With a symbolic a1 each a_m is a polynomial in a1.
pub fn stable_coeffs<T: Coeff>(a1: T, m_max: usize) -> Result<MeanCoeffs<T>> {
    let seq = solve_triangular(Unknown::Stable { a1 }, m_max)?;
    MeanCoeffs::new(seq, "stable")
}

/// Coefficients of the (K,M)-stabilizable mean N (Theorem 3.3): the unique
/// formal solution of R(K, N, M) = N.
pub fn stabilizable_coeffs<T: Coeff>(
    a_k: &MeanCoeffs<T>,
    a_m: &MeanCoeffs<T>,
    m_max: usize,
) -> Result<MeanCoeffs<T>> {
    a_k.check_order(m_max)?;
    a_m.check_order(m_max)?;
    let seq = solve_triangular(
        Unknown::Stabilizable {
            a_k: a_k.seq(),
            a_m: a_m.seq(),
        },
        m_max,
    )?;
    MeanCoeffs::new(seq, format!("({}, {})-stabilizable", a_k.label, a_m.label))
}

/// Coefficients of the (K,N)-stabilized mean M (Theorem 3.4): the unique
/// formal solution of R(K, N, M) = M.
pub fn stabilized_coeffs<T: Coeff>(
    a_k: &MeanCoeffs<T>,
    a_n: &MeanCoeffs<T>,
    m_max: usize,
) -> Result<MeanCoeffs<T>> {
    a_k.check_order(m_max)?;
    a_n.check_order(m_max)?;
    let seq = solve_triangular(
        Unknown::Stabilized {
            a_k: a_k.seq(),
            a_n: a_n.seq(),
        },
        m_max,
    )?;
    MeanCoeffs::new(seq, format!("({}, {})-stabilized", a_k.label, a_n.label))
}

/// Coefficient polynomials a_m(s, t) of the shifted expansion
/// M(x+s, x+t) ~ Σ a_m(s,t) x^{-m+1} (Proposition 3.1):
/// a_m(s,t) = 2^{-m} Σ_{n=0}^{⌊m/2⌋} a_n binom(1-2n, m-2n) (t-s)^{2n} (t+s)^{m-2n}.
/// The result lives in variables "s" and "t"; symbolic input coefficients
/// must not use those names.
pub fn shifted_coeffs(a: &MeanCoeffs<Scalar>, m_max: usize) -> Result<Vec<Poly>> {
    if a.order() < m_max.div_ceil(2) {
        return Err(Error::InsufficientOrder(format!(
            "shifted expansion to order {m_max} needs {} mean coefficients, have {}",
            m_max.div_ceil(2),
            a.order()
        )));
    }
    let s = Poly::var("s");
    let t = Poly::var("t");
    for c in a.seq().coeffs() {
        if let Scalar::Poly(p) = c {
            if p.vars().iter().any(|v| v == "s" || v == "t") {
                return Err(Error::SymbolicCoefficient(
                    "mean coefficients must not use the variables s, t".into(),
                ));
            }
        }
    }
    let t_plus_s = &t + &s;
    let t_minus_s = &t - &s;
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut acc = Poly::zero();
        for n in 0..=m / 2 {
            let b = binom_int(1 - 2 * n as i64, (m - 2 * n) as u32);
            if num_traits::Zero::is_zero(&b) {
                continue;
            }
            let term = a
                .coeff(n)
                .to_poly()
                .scale(&b)
                .mul(&t_minus_s.pow(2 * n as u32))
                .mul(&t_plus_s.pow((m - 2 * n) as u32));
            acc = acc.add(&term);
        }
        out.push(acc.scale(&rat_pow(&rat(1, 2), m as i64)?));
    }
    Ok(out)
}

/// Partial-sum evaluation Σ_{n=0}^{order} a_n t^{2n} x^{-2n+1} at exact
/// rational coefficients. Requires 0 <= t < x; t = 0 returns x exactly.
pub fn expansion_eval<T: Coeff>(
    a: &MeanCoeffs<T>,
    x: &BigFloat,
    t: &BigFloat,
    order: usize,
    ctx: &mut FloatCtx,
) -> Result<BigFloat> {
    a.check_order(order)?;
    ctx.ensure_positive(x, "x")?;
    if t.is_negative() {
        return Err(Error::DomainError("t must be nonnegative".into()));
    }
    if t.is_zero() {
        return Ok(x.clone());
    }
    if ctx.cmp(t, x) != std::cmp::Ordering::Less {
        return Err(Error::DomainError("expansion needs t < x".into()));
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    for i in 0..=order {
        coeffs.push(a.coeff(i).as_rat().ok_or_else(|| {
            Error::SymbolicCoefficient(format!("coefficient a_{i} of {}", a.label))
        })?);
    }
    // Horner in w = (t/x)^2; the series is x * Σ a_n w^n.
    let ratio = ctx.div(t, x);
    let w = ctx.mul(&ratio, &ratio);
    let mut acc = ctx.from_rat(&coeffs[order]);
    for i in (0..order).rev() {
        let c = ctx.from_rat(&coeffs[i]);
        acc = ctx.mul(&acc, &w);
        acc = ctx.add(&acc, &c);
    }
    Ok(ctx.mul(&acc, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: i64) -> Poly {
        Poly::constant(rat_int(x))
    }

    fn dr(p: Poly, d: i64) -> Poly {
        p.div_rat(&rat_int(d)).unwrap()
    }

    fn sym_mean(first: &str, names: &[&str]) -> MeanCoeffs<Scalar> {
        let mut coeffs = vec![Scalar::one()];
        coeffs.extend(names.iter().map(|n| Scalar::var(n)));
        MeanCoeffs::new(CoefSeq::new(coeffs), first).unwrap()
    }

    fn poly_of(m: &MeanCoeffs<Scalar>, i: usize) -> Poly {
        m.coeff(i).to_poly()
    }

    fn k1() -> Poly {
        Poly::var("k1")
    }
    fn k2() -> Poly {
        Poly::var("k2")
    }
    fn k3() -> Poly {
        Poly::var("k3")
    }
    fn m1() -> Poly {
        Poly::var("m1")
    }
    fn m2() -> Poly {
        Poly::var("m2")
    }
    fn m3() -> Poly {
        Poly::var("m3")
    }
    fn n1() -> Poly {
        Poly::var("n1")
    }
    fn n2() -> Poly {
        Poly::var("n2")
    }
    fn n3() -> Poly {
        Poly::var("n3")
    }
    fn a1() -> Poly {
        Poly::var("a1")
    }

    #[test]
    fn ds_of_arithmetic_midpoints() {
        let a = MeanCoeffs::<Rat>::arithmetic(3);
        let ds = d_s_seqs(&a, &a, 3).unwrap();
        assert_eq!(ds.d, CoefSeq::from_pairs(&[(1, 2), (0, 1), (0, 1), (0, 1)]));
        assert_eq!(ds.s, CoefSeq::from_pairs(&[(1, 1), (0, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn ds_first_order_symbolic() {
        // Hand expansion of the midpoints of (N(s,M), N(M,t)) to first order:
        //   s_1 = m1/2 + n1/4,
        //   d_1 = -n1/8 - n1*m1/2.
        let n = sym_mean("N", &["n1", "n2"]);
        let m = sym_mean("M", &["m1", "m2"]);
        let ds = d_s_seqs(&n, &m, 1).unwrap();
        assert_eq!(ds.d.get(0).as_rat(), Some(rat(1, 2)));
        assert_eq!(ds.s.get(0).as_rat(), Some(rat_int(1)));
        let s1 = dr(m1(), 2) + dr(n1(), 4);
        let d1 = dr(-n1(), 8) - dr(n1() * m1(), 2);
        assert_eq!(ds.s.get(1).to_poly(), s1);
        assert_eq!(ds.d.get(1).to_poly(), d1);
    }

    #[test]
    fn resultant_symbolic_first_coeffs() {
        let k = sym_mean("K", &["k1", "k2", "k3"]);
        let n = sym_mean("N", &["n1", "n2", "n3"]);
        let m = sym_mean("M", &["m1", "m2", "m3"]);
        let r = resultant_coeffs(&k, &n, &m, 3).unwrap();

        assert_eq!(poly_of(&r, 0), c(1));

        let r1 = dr(k1() + c(2) * m1() + n1(), 4);
        assert_eq!(poly_of(&r, 1), r1);

        let r2 = dr(
            k2() + c(8) * m2()
                + n1()
                + c(2) * m1() * (c(1) + c(2) * m1()) * n1()
                - k1() * (c(3) * n1() + m1() * (c(2) + c(8) * n1()))
                + n2(),
            16,
        );
        assert_eq!(poly_of(&r, 2), r2);

        let r3 = dr(
            k3() + c(32) * m3()
                + (c(1) - c(2) * m1() * (c(1) + c(2) * m1()).pow(2)
                    + c(8) * m2()
                    + c(32) * m1() * m2())
                    * n1()
                - k2() * (c(7) * n1() + c(2) * m1() * (c(3) + c(8) * n1()))
                + k1()
                    * (n1() * (c(-3) + c(4) * n1()) - c(8) * m2() * (c(1) + c(4) * n1())
                        + c(4) * m1().pow(2) * (c(1) + n1()) * (c(1) + c(4) * n1())
                        + c(2) * m1() * (n1() * (c(3) + c(8) * n1()) - c(8) * n2())
                        - c(7) * n2())
                + c(6) * n2()
                + c(6) * m1() * (c(3) + c(4) * m1()) * n2()
                + n3(),
            64,
        );
        assert_eq!(poly_of(&r, 3), r3);
    }

    #[test]
    fn resultant_of_arithmetic_is_arithmetic() {
        let a = MeanCoeffs::<Rat>::arithmetic(8);
        let r = resultant_coeffs(&a, &a, &a, 8).unwrap();
        assert_eq!(r.seq(), a.seq());
    }

    #[test]
    fn stable_symbolic_closed_forms() {
        let s = stable_coeffs(Scalar::var("a1"), 4).unwrap();
        let a2 = dr(a1() * (c(1) + a1()) * (c(1) - c(4) * a1()), 6);
        let a3 = dr(
            a1() * (c(1) + a1())
                * (c(6) - c(31) * a1() + c(36) * a1().pow(2) + c(64) * a1().pow(3)),
            90,
        );
        let a4 = dr(
            a1() * (c(1) + a1())
                * (c(90) - c(531) * a1() + c(937) * a1().pow(2) + c(568) * a1().pow(3)
                    - c(3088) * a1().pow(4)
                    - c(2176) * a1().pow(5)),
            2520,
        );
        assert_eq!(poly_of(&s, 2), a2);
        assert_eq!(poly_of(&s, 3), a3);
        assert_eq!(poly_of(&s, 4), a4);
    }

    #[test]
    fn stable_numeric_sequences() {
        // a1 = 0: the arithmetic mean.
        let s = stable_coeffs(rat_int(0), 8).unwrap();
        assert_eq!(s.seq(), MeanCoeffs::<Rat>::arithmetic(8).seq());

        // a1 = -1/2: the geometric mean.
        let s = stable_coeffs(rat(-1, 2), 5).unwrap();
        assert_eq!(
            s.seq(),
            &CoefSeq::from_pairs(&[(1, 1), (-1, 2), (-1, 8), (-1, 16), (-5, 128), (-7, 256)])
        );
    }

    #[test]
    fn stabilizable_symbolic_general() {
        let k = sym_mean("K", &["k1", "k2", "k3"]);
        let m = sym_mean("M", &["m1", "m2", "m3"]);
        let n = stabilizable_coeffs(&k, &m, 3).unwrap();

        assert_eq!(poly_of(&n, 1), dr(k1() + c(2) * m1(), 3));

        let n2e = dr(
            c(-2) * k1() * (c(6) * m1() + c(5)) * m1() - k1().pow(2) * (c(8) * m1() + c(3))
                + k1()
                + c(3) * k2()
                + c(8) * m1().pow(3)
                + c(4) * m1().pow(2)
                + c(2) * m1()
                + c(24) * m2(),
            45,
        );
        assert_eq!(poly_of(&n, 2), n2e);

        let n3e = dr(
            k1().pow(3) * (c(8) * m1() * (c(26) * m1() + c(23)) + c(41))
                + c(2) * k1().pow(2)
                    * (m1() * (c(4) * m1() * (c(40) * m1() + c(81)) + c(61))
                        - c(5) * (c(48) * m2() + c(7)))
                - k1()
                    * (c(18) * k2() * (c(16) * m1() + c(7))
                        + c(408) * m2()
                        + c(16) * m1()
                            * (c(2) * m1() * (m1() * (c(3) * m1() - c(7)) - c(1))
                                + c(54) * m2()
                                + c(11))
                        - c(21))
                - c(6) * k2() * (m1() * (c(68) * m1() + c(71)) - c(3))
                + c(45) * k3()
                + c(6) * m1()
                    * (c(32) * m1().pow(4) - c(12) * m1().pow(2)
                        + c(16) * (c(16) * m1() + c(7)) * m2()
                        + c(7))
                + c(144) * (m2() + c(10) * m3()),
            2835,
        );
        assert_eq!(poly_of(&n, 3), n3e);
    }

    #[test]
    fn stabilizable_with_stable_inputs() {
        let k = stable_coeffs(Scalar::var("k1"), 3).unwrap();
        let m = stable_coeffs(Scalar::var("m1"), 3).unwrap();
        let n = stabilizable_coeffs(&k, &m, 3).unwrap();

        let n2e = dr(
            -k1().pow(2) * (c(16) * m1() + c(9)) + k1() * (c(3) - c(4) * m1() * (c(6) * m1() + c(5)))
                - c(4) * k1().pow(3)
                - c(4) * m1() * (c(4) * m1() * (m1() + c(1)) - c(3)),
            90,
        );
        assert_eq!(poly_of(&n, 2), n2e);

        let n3e = dr(
            c(64) * k1().pow(5)
                + c(4) * k1().pow(4) * (c(67) + c(96) * m1())
                + c(12) * m1()
                    * (c(-1) + c(2) * m1())
                    * (c(3) + c(2) * m1())
                    * (c(-9) + c(8) * m1() * (c(1) + m1()))
                + c(3) * k1().pow(3) * (c(63) + c(8) * m1() * (c(51) + c(40) * m1()))
                + k1().pow(2)
                    * (c(-225) + c(2) * m1() * (c(207) + c(4) * m1() * (c(273) + c(160) * m1())))
                + c(2) * k1()
                    * (c(27)
                        + m1() * (c(-315) + c(8) * m1() * (c(3) + c(4) * m1() * (c(29) + c(15) * m1())))),
            5670,
        );
        assert_eq!(poly_of(&n, 3), n3e);
    }

    #[test]
    fn stabilizable_arithmetic_geometric_is_logarithmic() {
        // N with K = A, M = G matches the generalized logarithmic mean L_{-1}:
        // a1 = -1/3, a2 = -4/45.
        let k = MeanCoeffs::<Rat>::arithmetic(2);
        let m = stable_coeffs(rat(-1, 2), 2).unwrap();
        let n = stabilizable_coeffs(&k, &m, 2).unwrap();
        assert_eq!(n.coeff(1), &rat(-1, 3));
        assert_eq!(n.coeff(2), &rat(-4, 45));
    }

    #[test]
    fn stabilized_symbolic_general() {
        let k = sym_mean("K", &["k1", "k2", "k3"]);
        let n = sym_mean("N", &["n1", "n2", "n3"]);
        let m = stabilized_coeffs(&k, &n, 3).unwrap();

        assert_eq!(poly_of(&m, 1), dr(k1() + n1(), 2));

        let m2e = dr(
            k2() + n1() + n1().pow(2) + n1().pow(3)
                - k1() * n1() * (c(3) + c(2) * n1())
                - k1().pow(2) * (c(1) + c(3) * n1())
                + n2(),
            8,
        );
        assert_eq!(poly_of(&m, 2), m2e);

        let m3e = dr(
            k3() + k1().pow(3) * (c(1) + c(2) * n1()) * (c(2) + c(5) * n1())
                + k1().pow(2) * (n1() * (c(5) + c(6) * n1() * (c(3) + n1())) - c(2) * n2())
                - k1()
                    * (c(2) * k2() * (c(2) + c(5) * n1())
                        + n1() * (c(5) + n1() * (c(2) + n1() + c(2) * n1().pow(2)) - c(2) * n2())
                        - n2())
                + c(6) * n2()
                + n1()
                    * (c(1) - c(3) * k2() * (c(3) + c(2) * n1())
                        + c(10) * n2()
                        + n1() * (n1() + c(2) * n1().pow(2) * (c(1) + n1()) + c(8) * n2()))
                + n3(),
            32,
        );
        assert_eq!(poly_of(&m, 3), m3e);
    }

    #[test]
    fn stabilized_with_stable_inputs() {
        let k = stable_coeffs(Scalar::var("k1"), 3).unwrap();
        let n = stable_coeffs(Scalar::var("n1"), 3).unwrap();
        let m = stabilized_coeffs(&k, &n, 3).unwrap();

        let m2e = dr(
            c(-4) * k1().pow(3) - c(9) * k1().pow(2) * (c(1) + c(2) * n1())
                + k1() * (c(1) - c(6) * n1() * (c(3) + c(2) * n1()))
                + n1() * (c(7) + n1() * (c(3) + c(2) * n1())),
            48,
        );
        assert_eq!(poly_of(&m, 2), m2e);

        let m3e = dr(
            c(64) * k1().pow(5)
                + c(20) * k1().pow(4) * (c(17) + c(30) * n1())
                + c(5) * k1().pow(3) * (c(73) + c(36) * n1() * (c(10) + c(7) * n1()))
                + c(5) * k1().pow(2) * (c(-17) + c(3) * n1() * (c(45) + c(44) * n1() * (c(3) + n1())))
                - c(3) * k1()
                    * (c(-2) + c(5) * n1() * (c(38) + n1() * (c(19) + c(4) * n1() * (c(4) + c(5) * n1()))))
                - n1()
                    * (c(-186)
                        + n1() * (c(145) + n1() * (c(595) + c(4) * n1() * (c(170) + c(59) * n1())))),
            2880,
        );
        assert_eq!(poly_of(&m, 3), m3e);
    }

    #[test]
    fn stabilized_arithmetic_geometric_is_power_half() {
        // Solving M = A(G(s,M), G(M,t)) in closed form gives
        // M = ((√s+√t)/2)^2, the power mean with exponent 1/2, whose stable
        // first coefficient is (1/2 - 1)/2 = -1/4.
        let k = MeanCoeffs::<Rat>::arithmetic(6);
        let n = stable_coeffs(rat(-1, 2), 6).unwrap();
        let m = stabilized_coeffs(&k, &n, 6).unwrap();
        let b_half = stable_coeffs(rat(-1, 4), 6).unwrap();
        assert_eq!(m.seq(), b_half.seq());
    }

    #[test]
    fn stable_fixed_point_order_12() {
        for a1 in [rat_int(0), rat(1, 2), rat(-1, 2), rat_int(1)] {
            let s = stable_coeffs(a1, 12).unwrap();
            let r = resultant_coeffs(&s, &s, &s, 12).unwrap();
            assert_eq!(r.seq(), s.seq());
        }
    }

    #[test]
    fn stable_fixed_point_symbolic_order_12() {
        let s = stable_coeffs(Scalar::var("a1"), 12).unwrap();
        let r = resultant_coeffs(&s, &s, &s, 12).unwrap();
        assert_eq!(r.seq(), s.seq());
    }

    #[test]
    fn stabilizable_fixed_point_order_10() {
        let k = stable_coeffs(rat(1, 3), 10).unwrap();
        let m = stable_coeffs(rat(-1, 2), 10).unwrap();
        let n = stabilizable_coeffs(&k, &m, 10).unwrap();
        let r = resultant_coeffs(&k, &n, &m, 10).unwrap();
        assert_eq!(r.seq(), n.seq());
    }

    #[test]
    fn stabilized_fixed_point_order_10() {
        let k = stable_coeffs(rat(-2, 5), 10).unwrap();
        let n = stable_coeffs(rat(3, 4), 10).unwrap();
        let m = stabilized_coeffs(&k, &n, 10).unwrap();
        let r = resultant_coeffs(&k, &n, &m, 10).unwrap();
        assert_eq!(r.seq(), m.seq());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn stabilizable_fixed_point_random(
            kn in -8i64..=8, kd in 1i64..=6, mn in -8i64..=8, md in 1i64..=6,
        ) {
            let k = stable_coeffs(rat(kn, 2 * kd), 6).unwrap();
            let m = stable_coeffs(rat(mn, 2 * md), 6).unwrap();
            let n = stabilizable_coeffs(&k, &m, 6).unwrap();
            let r = resultant_coeffs(&k, &n, &m, 6).unwrap();
            prop_assert_eq!(r.seq(), n.seq());
        }

        #[test]
        fn stabilized_fixed_point_random(
            kn in -8i64..=8, kd in 1i64..=6, nn in -8i64..=8, nd in 1i64..=6,
        ) {
            let k = stable_coeffs(rat(kn, 2 * kd), 6).unwrap();
            let n = stable_coeffs(rat(nn, 2 * nd), 6).unwrap();
            let m = stabilized_coeffs(&k, &n, 6).unwrap();
            let r = resultant_coeffs(&k, &n, &m, 6).unwrap();
            prop_assert_eq!(r.seq(), m.seq());
        }
    }

    #[test]
    fn shifted_leading_polynomials() {
        let stable = stable_coeffs(Scalar::var("a1"), 2).unwrap();
        let sh = shifted_coeffs(&stable, 4).unwrap();
        let s = Poly::var("s");
        let t = Poly::var("t");
        assert_eq!(sh[0], c(1));
        assert_eq!(sh[1], dr(&s + &t, 2));
        assert_eq!(sh[2], dr(a1() * (&s - &t).pow(2), 4));
    }

    #[test]
    fn shifted_specializes_to_plain_coefficients() {
        // At s = -t the shifted expansion collapses back onto the symmetric
        // one: a_{2n}(-t, t) = a_n t^{2n} and odd coefficients vanish.
        let a = stable_coeffs(Scalar::var("a1"), 3).unwrap();
        let sh = shifted_coeffs(&a, 6).unwrap();
        let t = Poly::var("t");
        let neg_t = -&t;
        for (m, p) in sh.iter().enumerate() {
            let got = p.subst("s", &neg_t);
            if m % 2 == 0 {
                let expect = a.coeff(m / 2).to_poly().mul(&t.pow(m as u32));
                assert_eq!(got, expect, "m = {m}");
            } else {
                assert!(got.is_zero(), "m = {m}");
            }
        }
    }

    #[test]
    fn expansion_eval_arithmetic_and_degenerate() {
        let mut ctx = FloatCtx::new(192);
        let a = MeanCoeffs::<Rat>::arithmetic(4);
        let x = ctx.from_i64(7);
        let t = ctx.from_rat(&rat(3, 2));
        let v = expansion_eval(&a, &x, &t, 4, &mut ctx).unwrap();
        assert_eq!(ctx.cmp(&v, &x), std::cmp::Ordering::Equal);

        let zero = ctx.from_i64(0);
        let v = expansion_eval(&a, &x, &zero, 4, &mut ctx).unwrap();
        assert_eq!(ctx.cmp(&v, &x), std::cmp::Ordering::Equal);

        let bad = expansion_eval(&a, &t, &x, 4, &mut ctx);
        assert!(matches!(bad, Err(Error::DomainError(_))));
    }

    #[test]
    fn expansion_eval_geometric_partial_sum() {
        // G(x-t, x+t) = sqrt(x^2 - t^2); at x = 100, t = 1 the order-4
        // partial sum agrees with sqrt(9999) to well below 1e-16 relative.
        let mut ctx = FloatCtx::new(256);
        let g = stable_coeffs(rat(-1, 2), 4).unwrap();
        let x = ctx.from_i64(100);
        let t = ctx.from_i64(1);
        let approx = expansion_eval(&g, &x, &t, 4, &mut ctx).unwrap();
        let n9999 = ctx.from_i64(9999);
        let exact = ctx.sqrt(&n9999);
        let err = ctx.rel_err(&exact, &approx);
        let tol = ctx.pow2(-54); // ~1e-16.2
        assert_eq!(ctx.cmp(&err, &tol), std::cmp::Ordering::Less);
    }

    #[test]
    fn expansion_eval_rejects_symbolic() {
        let mut ctx = FloatCtx::new(192);
        let a = stable_coeffs(Scalar::var("a1"), 2).unwrap();
        let x = ctx.from_i64(10);
        let t = ctx.from_i64(1);
        assert!(matches!(
            expansion_eval(&a, &x, &t, 2, &mut ctx),
            Err(Error::SymbolicCoefficient(_))
        ));
    }
}
