//! Exact arithmetic with the algebraic numbers the analysis layer meets:
//! quadratic surds a + b√d, univariate root finding (rational roots exactly,
//! quadratics as surds, higher degree by sign-change isolation), and the
//! quotient ring ℚ[v]/(m(v)) used to evaluate coefficient conditions at a
//! root of its minimal polynomial without ever leaving exact arithmetic.

use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use astro_float::BigFloat;

use crate::bigfloat::FloatCtx;
use crate::error::{Error, Result};
use crate::rational::{rat_int, render_rat, square_free_split, Rat};
use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// Univariate polynomial helpers over exact rationals (ascending coefficients).
// ---------------------------------------------------------------------------

/// Horner evaluation.
pub fn poly_eval_uni(coeffs: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Drops trailing zero coefficients; the zero polynomial becomes `[0]`.
fn trim(mut coeffs: Vec<Rat>) -> Vec<Rat> {
    while coeffs.len() > 1 && coeffs.last().map(Zero::is_zero).unwrap_or(false) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        coeffs.push(Rat::zero());
    }
    coeffs
}

/// Synthetic division by (x - root); the root must be exact.
fn deflate(coeffs: &[Rat], root: &Rat) -> Vec<Rat> {
    let n = coeffs.len();
    debug_assert!(n >= 2);
    let mut out = vec![Rat::zero(); n - 1];
    let mut carry = Rat::zero();
    for i in (0..n - 1).rev() {
        carry = &coeffs[i + 1] + &carry * root;
        out[i] = carry.clone();
    }
    debug_assert!(Zero::is_zero(&(&coeffs[0] + &carry * root)));
    out
}

/// Integer-primitive form: scaled by the lcm of denominators, divided by the
/// gcd of the numerators, leading coefficient positive.
pub fn primitive_integer(coeffs: &[Rat]) -> Vec<BigInt> {
    let coeffs = trim(coeffs.to_vec());
    let mut lcm = BigInt::one();
    for c in &coeffs {
        lcm = lcm.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let mut gcd = BigInt::zero();
    for v in &ints {
        gcd = gcd.gcd(v);
    }
    if !gcd.is_zero() {
        for v in &mut ints {
            *v /= &gcd;
        }
    }
    if ints.last().map(Signed::is_negative).unwrap_or(false) {
        for v in &mut ints {
            *v = -v.clone();
        }
    }
    ints
}

/// All rational roots, with multiplicity, by the rational-root theorem on
/// the primitive integer form; returns the roots and the deflated cofactor.
pub fn rational_roots(coeffs: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rest = trim(coeffs.to_vec());
    let mut roots = Vec::new();
    // roots at zero first
    while rest.len() > 1 && Zero::is_zero(&rest[0]) {
        roots.push(Rat::zero());
        rest.remove(0);
    }
    'outer: while rest.len() > 1 {
        let ints = primitive_integer(&rest);
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        for p in divisors(&a0) {
            for q in divisors(&an) {
                for sign in [1i64, -1] {
                    let cand = Rat::new(&p * BigInt::from(sign), q.clone());
                    if Zero::is_zero(&poly_eval_uni(&rest, &cand)) {
                        rest = deflate(&rest, &cand);
                        roots.push(cand);
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    (roots, rest)
}

/// Positive divisors by trial division; the constants involved are tiny.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        // zero constant term is handled by the caller's x = 0 loop
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let other = n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Quadratic surds.
// ---------------------------------------------------------------------------

/// The real number a + b·√radicand with the radicand positive and
/// square-free; rational values carry radicand 1 and b = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSurd {
    pub a: Rat,
    pub b: Rat,
    pub radicand: BigInt,
}

impl QuadraticSurd {
    pub fn new(a: Rat, b: Rat, radicand: BigInt) -> Self {
        assert!(radicand.is_positive(), "radicand must be positive");
        let (free, sq) = square_free_split(&radicand);
        let b = b * Rat::from_integer(sq);
        if Zero::is_zero(&b) {
            QuadraticSurd::from_rat(a)
        } else if free.is_one() {
            QuadraticSurd::from_rat(a + b)
        } else {
            QuadraticSurd {
                a,
                b,
                radicand: free,
            }
        }
    }

    pub fn from_rat(a: Rat) -> Self {
        QuadraticSurd {
            a,
            b: Rat::zero(),
            radicand: BigInt::one(),
        }
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.b)
    }

    pub fn as_rat(&self) -> Option<Rat> {
        self.is_rational().then(|| self.a.clone())
    }

    pub fn conjugate(&self) -> Self {
        QuadraticSurd {
            a: self.a.clone(),
            b: -self.b.clone(),
            radicand: self.radicand.clone(),
        }
    }

    fn compatible(&self, other: &Self) -> BigInt {
        if self.is_rational() {
            other.radicand.clone()
        } else {
            assert!(
                other.is_rational() || other.radicand == self.radicand,
                "mixed radicands {} and {}",
                self.radicand,
                other.radicand
            );
            self.radicand.clone()
        }
    }

    /// Folds back to the rational form when the surd part cancels.
    fn canonical(a: Rat, b: Rat, radicand: BigInt) -> Self {
        if Zero::is_zero(&b) {
            QuadraticSurd::from_rat(a)
        } else {
            QuadraticSurd { a, b, radicand }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let radicand = self.compatible(other);
        Self::canonical(&self.a + &other.a, &self.b + &other.b, radicand)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QuadraticSurd {
            a: -self.a.clone(),
            b: -self.b.clone(),
            radicand: self.radicand.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let radicand = self.compatible(other);
        let d = Rat::from_integer(radicand.clone());
        Self::canonical(
            &self.a * &other.a + &self.b * &other.b * &d,
            &self.a * &other.b + &self.b * &other.a,
            radicand,
        )
    }

    /// Monic minimal polynomial over ℚ: x - a for rationals,
    /// x² - 2a x + (a² - b²d) otherwise (ascending coefficients).
    pub fn minimal_polynomial(&self) -> Vec<Rat> {
        if self.is_rational() {
            vec![-self.a.clone(), rat_int(1)]
        } else {
            let d = Rat::from_integer(self.radicand.clone());
            vec![
                &self.a * &self.a - &self.b * &self.b * d,
                rat_int(-2) * &self.a,
                rat_int(1),
            ]
        }
    }

    pub fn to_float(&self, ctx: &mut FloatCtx) -> BigFloat {
        let a = ctx.from_rat(&self.a);
        if self.is_rational() {
            return a;
        }
        let d = ctx.from_bigint(&self.radicand);
        let root = ctx.sqrt(&d);
        let b = ctx.from_rat(&self.b);
        let t = ctx.mul(&b, &root);
        ctx.add(&a, &t)
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", render_rat(&self.a));
        }
        let sign = if self.b.is_negative() { "-" } else { "+" };
        let mag = self.b.abs();
        if !Zero::is_zero(&self.a) {
            write!(f, "{} {} ", render_rat(&self.a), sign)?;
        } else if self.b.is_negative() {
            write!(f, "-")?;
        }
        if !mag.is_one() {
            write!(f, "{}*", render_rat(&mag))?;
        }
        write!(f, "sqrt({})", self.radicand)
    }
}

/// Exact real roots of a2 x² + a1 x + a0 as surds (lesser first);
/// None when the discriminant is negative.
pub fn solve_quadratic(a2: &Rat, a1: &Rat, a0: &Rat) -> Option<(QuadraticSurd, QuadraticSurd)> {
    assert!(!Zero::is_zero(a2), "not a quadratic");
    let disc = a1 * a1 - rat_int(4) * a2 * a0;
    if disc.is_negative() {
        return None;
    }
    // sqrt(n/d) = sqrt(n d)/d; split n d into square-free part f and square s².
    let nd = disc.numer() * disc.denom();
    let (free, sq) = square_free_split(&nd.max(BigInt::one()));
    let sqrt_rat = Rat::new(sq, disc.denom().clone());
    let two_a2 = rat_int(2) * a2;
    let mid = -a1 / &two_a2;
    let off = if Zero::is_zero(&disc) {
        Rat::zero()
    } else {
        &sqrt_rat / &two_a2
    };
    let r1 = QuadraticSurd::new(mid.clone(), -off.abs(), free.clone());
    let r2 = QuadraticSurd::new(mid, off.abs(), free.max(BigInt::one()));
    Some((r1, r2))
}

// ---------------------------------------------------------------------------
// Real roots of a univariate rational polynomial.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraicRoot {
    Rational(Rat),
    Surd(QuadraticSurd),
    /// A root only known by an isolating interval of its (deflated)
    /// polynomial; enough for the numeric follow-ups the analysis does.
    Isolated {
        polynomial: Vec<Rat>,
        low: Rat,
        high: Rat,
    },
}

impl AlgebraicRoot {
    pub fn to_float(&self, ctx: &mut FloatCtx) -> BigFloat {
        match self {
            AlgebraicRoot::Rational(r) => ctx.from_rat(r),
            AlgebraicRoot::Surd(s) => s.to_float(ctx),
            AlgebraicRoot::Isolated { low, high, .. } => {
                let l = ctx.from_rat(low);
                let h = ctx.from_rat(high);
                let sum = ctx.add(&l, &h);
                let two = ctx.from_i64(2);
                ctx.div(&sum, &two)
            }
        }
    }
}

impl fmt::Display for AlgebraicRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraicRoot::Rational(r) => write!(f, "{}", render_rat(r)),
            AlgebraicRoot::Surd(s) => write!(f, "{s}"),
            AlgebraicRoot::Isolated { low, high, .. } => {
                write!(f, "root in [{}, {}]", render_rat(low), render_rat(high))
            }
        }
    }
}

/// All real roots (with multiplicity for the rational ones): rational roots
/// exactly, a remaining quadratic as surds, anything beyond by sign-change
/// isolation refined to width 2^-bits. Clustered roots of the high-degree
/// fallback without a sign change are out of scope.
pub fn real_roots(coeffs: &[Rat], bits: usize) -> Result<Vec<AlgebraicRoot>> {
    let coeffs = trim(coeffs.to_vec());
    if coeffs.len() == 1 {
        return if Zero::is_zero(&coeffs[0]) {
            Err(Error::DomainError("zero polynomial has no root set".into()))
        } else {
            Ok(vec![])
        };
    }
    let (rationals, rest) = rational_roots(&coeffs);
    let mut out: Vec<AlgebraicRoot> = rationals.into_iter().map(AlgebraicRoot::Rational).collect();
    match rest.len() {
        1 | 2 => {}
        3 => {
            if let Some((r1, r2)) = solve_quadratic(&rest[2], &rest[1], &rest[0]) {
                out.push(AlgebraicRoot::Surd(r1));
                out.push(AlgebraicRoot::Surd(r2));
            }
        }
        _ => {
            for (low, high) in isolate_by_sign_changes(&rest, bits) {
                out.push(AlgebraicRoot::Isolated {
                    polynomial: rest.clone(),
                    low,
                    high,
                });
            }
        }
    }
    Ok(out)
}

fn isolate_by_sign_changes(coeffs: &[Rat], bits: usize) -> Vec<(Rat, Rat)> {
    // Cauchy bound on root magnitude.
    let lead = coeffs.last().unwrap();
    let mut bound = Rat::one();
    for c in &coeffs[..coeffs.len() - 1] {
        let q = (c / lead).abs();
        if q > bound {
            bound = q;
        }
    }
    bound += Rat::one();
    let step = Rat::new(BigInt::one(), BigInt::from(4));
    let mut brackets = Vec::new();
    let mut x = -bound.clone();
    let mut prev = poly_eval_uni(coeffs, &x);
    while x < bound {
        let nx = &x + &step;
        let cur = poly_eval_uni(coeffs, &nx);
        if (prev.is_negative() && cur.is_positive()) || (prev.is_positive() && cur.is_negative()) {
            brackets.push((x.clone(), nx.clone()));
        }
        x = nx;
        prev = cur;
    }
    let width = Rat::new(BigInt::one(), BigInt::from(2).pow(bits as u32));
    brackets
        .into_iter()
        .map(|(mut lo, mut hi)| {
            let mut f_lo = poly_eval_uni(coeffs, &lo);
            while &hi - &lo > width {
                let mid = (&lo + &hi) / rat_int(2);
                let f_mid = poly_eval_uni(coeffs, &mid);
                if Zero::is_zero(&f_mid) {
                    return (mid.clone(), mid);
                }
                if f_lo.is_negative() == f_mid.is_negative() {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            (lo, hi)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Quotient ring ℚ[v]/(m(v)).
// ---------------------------------------------------------------------------

/// A monic minimal polynomial defining the quotient ring, together with the
/// display name of its generator.
#[derive(Debug, PartialEq)]
pub struct Modulus {
    var: String,
    /// Monic, ascending; degree ≥ 1.
    coeffs: Vec<Rat>,
}

impl Modulus {
    pub fn new(var: impl Into<String>, coeffs: Vec<Rat>) -> Rc<Self> {
        let coeffs = trim(coeffs);
        assert!(coeffs.len() >= 2, "modulus must have degree >= 1");
        assert!(
            One::is_one(coeffs.last().unwrap()),
            "modulus must be monic"
        );
        Rc::new(Modulus {
            var: var.into(),
            coeffs,
        })
    }

    pub fn of_surd(var: impl Into<String>, s: &QuadraticSurd) -> Rc<Self> {
        Modulus::new(var, s.minimal_polynomial())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }
}

/// Element of ℚ[v]/(m(v)). Plain rationals are represented without a
/// modulus so the `Coeff` constructors (`zero`, `one`, `from_rat`) work;
/// every mixed operation adopts the moduled operand's ring.
#[derive(Debug, Clone)]
pub struct QuotientElem {
    rep: Vec<Rat>,
    modulus: Option<Rc<Modulus>>,
}

impl QuotientElem {
    pub fn constant(r: Rat) -> Self {
        QuotientElem {
            rep: vec![r],
            modulus: None,
        }
    }

    /// The generator v of the given ring.
    pub fn generator(m: &Rc<Modulus>) -> Self {
        let mut rep = vec![Rat::zero(); m.degree()];
        if m.degree() == 1 {
            // v is congruent to the negated constant term
            rep[0] = -m.coeffs()[0].clone();
        } else {
            rep[1] = Rat::one();
        }
        QuotientElem {
            rep,
            modulus: Some(Rc::clone(m)),
        }
    }

    /// Horner evaluation of a rational polynomial at this element.
    pub fn eval_poly(coeffs: &[Rat], at: &QuotientElem) -> Self {
        let mut acc = QuotientElem::constant(Rat::zero());
        for c in coeffs.iter().rev() {
            acc = crate::scalar::Coeff::mul(&acc, at);
            acc = crate::scalar::Coeff::add(&acc, &QuotientElem::constant(c.clone()));
        }
        acc
    }

    pub fn rep(&self) -> &[Rat] {
        &self.rep
    }

    /// Value as a surd when the ring is quadratic and the generator is the
    /// given surd.
    pub fn to_surd(&self, gen: &QuadraticSurd) -> QuadraticSurd {
        let mut acc = QuadraticSurd::from_rat(Rat::zero());
        let mut power = QuadraticSurd::from_rat(Rat::one());
        for c in &self.rep {
            let term = power.mul(&QuadraticSurd::from_rat(c.clone()));
            acc = acc.add(&term);
            power = power.mul(gen);
        }
        acc
    }

    fn ring_of(a: &Self, b: &Self) -> Option<Rc<Modulus>> {
        match (&a.modulus, &b.modulus) {
            (Some(m), Some(n)) => {
                assert!(
                    Rc::ptr_eq(m, n) || m == n,
                    "elements of different quotient rings"
                );
                Some(Rc::clone(m))
            }
            (Some(m), None) | (None, Some(m)) => Some(Rc::clone(m)),
            (None, None) => None,
        }
    }

    fn reduced(mut rep: Vec<Rat>, modulus: Option<Rc<Modulus>>) -> Self {
        if let Some(m) = &modulus {
            let deg = m.degree();
            while rep.len() > deg {
                let lead = rep.pop().unwrap();
                if Zero::is_zero(&lead) {
                    continue;
                }
                let k = rep.len() - deg;
                // subtract lead * v^k * m(v), whose leading term cancels
                for (i, c) in m.coeffs()[..deg].iter().enumerate() {
                    rep[k + i] = &rep[k + i] - &lead * c;
                }
            }
            rep.resize(deg, Rat::zero());
        }
        QuotientElem { rep, modulus }
    }
}

impl PartialEq for QuotientElem {
    fn eq(&self, other: &Self) -> bool {
        let n = self.rep.len().max(other.rep.len());
        (0..n).all(|i| {
            let a = self.rep.get(i).cloned().unwrap_or_else(Rat::zero);
            let b = other.rep.get(i).cloned().unwrap_or_else(Rat::zero);
            a == b
        })
    }
}

impl fmt::Display for QuotientElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self
            .modulus
            .as_ref()
            .map(|m| m.var.as_str())
            .unwrap_or("v");
        let mut wrote = false;
        for (i, c) in self.rep.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            if wrote {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match i {
                0 => write!(f, "{}", render_rat(&mag))?,
                _ => {
                    if !One::is_one(&mag) {
                        write!(f, "{}*", render_rat(&mag))?;
                    }
                    write!(f, "{var}")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl crate::scalar::Coeff for QuotientElem {
    fn zero() -> Self {
        QuotientElem::constant(<Rat as Zero>::zero())
    }
    fn one() -> Self {
        QuotientElem::constant(<Rat as One>::one())
    }
    fn is_zero(&self) -> bool {
        self.rep.iter().all(Zero::is_zero)
    }
    fn add(&self, other: &Self) -> Self {
        let ring = Self::ring_of(self, other);
        let n = self.rep.len().max(other.rep.len());
        let rep = (0..n)
            .map(|i| {
                let a = self.rep.get(i).cloned().unwrap_or_else(<Rat as Zero>::zero);
                let b = other.rep.get(i).cloned().unwrap_or_else(<Rat as Zero>::zero);
                a + b
            })
            .collect();
        Self::reduced(rep, ring)
    }
    fn sub(&self, other: &Self) -> Self {
        crate::scalar::Coeff::add(self, &crate::scalar::Coeff::neg(other))
    }
    fn mul(&self, other: &Self) -> Self {
        let ring = Self::ring_of(self, other);
        let mut rep = vec![<Rat as Zero>::zero(); self.rep.len() + other.rep.len() - 1];
        for (i, a) in self.rep.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in other.rep.iter().enumerate() {
                rep[i + j] = &rep[i + j] + a * b;
            }
        }
        Self::reduced(rep, ring)
    }
    fn neg(&self) -> Self {
        QuotientElem {
            rep: self.rep.iter().map(|c| -c.clone()).collect(),
            modulus: self.modulus.clone(),
        }
    }
    fn from_rat(r: Rat) -> Self {
        QuotientElem::constant(r)
    }
    fn as_rat(&self) -> Option<Rat> {
        if self.rep[1..].iter().all(Zero::is_zero) {
            Some(self.rep[0].clone())
        } else {
            None
        }
    }
    fn mul_rat(&self, c: &Rat) -> Self {
        QuotientElem {
            rep: self.rep.iter().map(|x| x * c).collect(),
            modulus: self.modulus.clone(),
        }
    }
    fn div_rat(&self, d: &Rat) -> Result<Self> {
        if Zero::is_zero(d) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.mul_rat(&d.recip()))
    }
    fn from_scalar(s: &Scalar) -> Result<Self> {
        s.as_rat()
            .map(QuotientElem::constant)
            .ok_or_else(|| Error::SymbolicCoefficient(s.to_string()))
    }
}
