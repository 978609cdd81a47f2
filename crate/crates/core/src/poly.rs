//! Sparse multivariate polynomials over exact rationals.
//!
//! Terms are keyed by exponent vectors aligned with a sorted variable list.
//! The canonical form stores no zero coefficients and no unused variables,
//! so equality is structural and a constant polynomial in any variable set
//! compares equal to the same constant with no variables at all.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{render_rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    /// Sorted, deduplicated variable names.
    vars: Vec<String>,
    /// Exponent vector (len == vars.len()) -> nonzero coefficient.
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            vars: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly {
            vars: Vec::new(),
            terms,
        }
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Rat::one());
        Poly {
            vars: vec![name.to_string()],
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns the constant value if the polynomial has no variable support.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.vars.is_empty() {
            Some(
                self.terms
                    .get(&Vec::new())
                    .cloned()
                    .unwrap_or_else(Rat::zero),
            )
        } else {
            None
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        match self.vars.iter().position(|v| v == var) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Drops zero coefficients and variables that no longer occur.
    fn canonicalize(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        if self.vars.is_empty() {
            return self;
        }
        let n = self.vars.len();
        let mut used = vec![false; n];
        for exps in self.terms.keys() {
            for (i, e) in exps.iter().enumerate() {
                if *e > 0 {
                    used[i] = true;
                }
            }
        }
        if used.iter().all(|u| *u) {
            return self;
        }
        let keep: Vec<usize> = (0..n).filter(|i| used[*i]).collect();
        let vars = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let terms = self
            .terms
            .into_iter()
            .map(|(e, c)| (keep.iter().map(|&i| e[i]).collect(), c))
            .collect();
        Poly { vars, terms }
    }

    /// Re-expresses both polynomials over the union of their variables.
    fn unify(a: &Poly, b: &Poly) -> (Vec<String>, BTreeMap<Vec<u32>, Rat>, BTreeMap<Vec<u32>, Rat>) {
        let mut vars: Vec<String> = a.vars.clone();
        for v in &b.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars.sort();
        let remap = |p: &Poly| -> BTreeMap<Vec<u32>, Rat> {
            let idx: Vec<usize> = p
                .vars
                .iter()
                .map(|v| vars.iter().position(|w| w == v).unwrap())
                .collect();
            p.terms
                .iter()
                .map(|(e, c)| {
                    let mut exps = vec![0u32; vars.len()];
                    for (i, &x) in e.iter().enumerate() {
                        exps[idx[i]] = x;
                    }
                    (exps, c.clone())
                })
                .collect()
        };
        let ta = remap(a);
        let tb = remap(b);
        (vars, ta, tb)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (vars, mut ta, tb) = Poly::unify(self, other);
        for (e, c) in tb {
            let entry = ta.entry(e).or_insert_with(Rat::zero);
            *entry += c;
        }
        Poly { vars, terms: ta }.canonicalize()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let (vars, ta, tb) = Poly::unify(self, other);
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (ea, ca) in &ta {
            for (eb, cb) in &tb {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = terms.entry(e).or_insert_with(Rat::zero);
                *entry += ca * cb;
            }
        }
        Poly { vars, terms }.canonicalize()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn div_rat(&self, d: &Rat) -> Result<Poly> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.scale(&d.recip()))
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(Rat::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact substitution of rationals for all variables.
    pub fn eval(&self, assignment: &BTreeMap<String, Rat>) -> Result<Rat> {
        for v in &self.vars {
            if !assignment.contains_key(v) {
                return Err(Error::MissingVariable(v.clone()));
            }
        }
        let vals: Vec<&Rat> = self.vars.iter().map(|v| &assignment[v]).collect();
        let mut acc = Rat::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in exps.iter().enumerate() {
                term *= vals[i].pow(e as i32);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Substitutes a polynomial for one variable, leaving others intact.
    pub fn subst(&self, var: &str, value: &Poly) -> Poly {
        let Some(pos) = self.vars.iter().position(|v| v == var) else {
            return self.clone();
        };
        let mut acc = Poly::zero();
        for (exps, c) in &self.terms {
            let mut rest = exps.clone();
            let e = rest[pos];
            rest[pos] = 0;
            let base = Poly {
                vars: self.vars.clone(),
                terms: BTreeMap::from([(rest, c.clone())]),
            }
            .canonicalize();
            acc = acc.add(&base.mul(&value.pow(e)));
        }
        acc
    }

    /// Leading term under graded lexicographic order.
    fn leading(terms: &BTreeMap<Vec<u32>, Rat>) -> Option<(&Vec<u32>, &Rat)> {
        terms.iter().max_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| a.cmp(b))
        })
    }

    /// Exact division in the polynomial ring; errors when the divisor does
    /// not divide exactly.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (vars, mut rem, td) = Poly::unify(self, divisor);
        rem.retain(|_, c| !c.is_zero());
        let (dlead_e, dlead_c) = Poly::leading(&td).expect("nonzero divisor");
        let dlead_e = dlead_e.clone();
        let dlead_c = dlead_c.clone();
        let mut quo: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        while !rem.is_empty() {
            let (rlead_e, rlead_c) = Poly::leading(&rem).unwrap();
            let rlead_e = rlead_e.clone();
            let rlead_c = rlead_c.clone();
            if rlead_e.iter().zip(&dlead_e).any(|(r, d)| r < d) {
                return Err(Error::InexactDivision);
            }
            let qe: Vec<u32> = rlead_e.iter().zip(&dlead_e).map(|(r, d)| r - d).collect();
            let qc = rlead_c / &dlead_c;
            // rem -= (qc * x^qe) * divisor
            for (e, c) in &td {
                let key: Vec<u32> = e.iter().zip(&qe).map(|(x, y)| x + y).collect();
                let entry = rem.entry(key).or_insert_with(Rat::zero);
                *entry -= &qc * c;
            }
            rem.retain(|_, c| !c.is_zero());
            quo.insert(qe, qc);
        }
        Ok(Poly { vars, terms: quo }.canonicalize())
    }

    /// Dense univariate coefficient list (index = degree). Errors if more
    /// than the given variable occurs.
    pub fn to_univariate(&self, var: &str) -> Result<Vec<Rat>> {
        for v in &self.vars {
            if v != var {
                return Err(Error::SymbolicCoefficient(format!(
                    "unexpected variable {v} (wanted univariate in {var})"
                )));
            }
        }
        let deg = self.degree_in(var) as usize;
        let mut coeffs = vec![Rat::zero(); deg + 1];
        for (exps, c) in &self.terms {
            let e = exps.first().copied().unwrap_or(0) as usize;
            coeffs[e] = c.clone();
        }
        Ok(coeffs)
    }

    /// Content: gcd-like rational unit making the primitive part have
    /// coprime integer coefficients with positive leading coefficient.
    pub fn content(&self) -> Rat {
        use num_bigint::BigInt;
        use num_integer::Integer;
        if self.is_zero() {
            return Rat::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = Rat::new(num_gcd, den_lcm);
        let lead = Poly::leading(&self.terms).unwrap().1;
        if lead.is_negative() {
            content = -content;
        }
        content
    }
}

// Operator sugar on references, mirroring the inherent methods. Mainly for
// readable construction of the large expected polynomials in tests.
impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::sub(self, rhs)
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

impl std::ops::Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        Poly::add(&self, &rhs)
    }
}

impl std::ops::Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        Poly::sub(&self, &rhs)
    }
}

impl std::ops::Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        Poly::mul(&self, &rhs)
    }
}

impl std::ops::Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(&self)
    }
}

impl fmt::Display for Poly {
    /// Expanded monomial form, graded-lex descending, with "/" rationals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut order: Vec<(&Vec<u32>, &Rat)> = self.terms.iter().collect();
        order.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (exps, c)) in order.iter().enumerate() {
            let mono: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(j, e)| {
                    if *e == 1 {
                        self.vars[j].clone()
                    } else {
                        format!("{}^{}", self.vars[j], e)
                    }
                })
                .collect();
            let abs = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mono.is_empty() {
                write!(f, "{}", render_rat(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", render_rat(&abs), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn p_var(name: &str) -> Poly {
        Poly::var(name)
    }

    #[test]
    fn ring_identities() {
        let p = p_var("p");
        let q = p_var("q");
        let lhs = p.add(&q).mul(&p.sub(&q));
        let rhs = p.mul(&p).sub(&q.mul(&q));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn absorbing_zero() {
        let a1 = p_var("a1");
        let z = a1.mul(&Poly::zero());
        assert!(z.is_zero());
        assert!(z.vars().is_empty());
    }

    #[test]
    fn constant_embedding() {
        // p - p collapses to a var-free constant equal to 0, and 7/3 + 0*p
        // compares equal to the plain constant.
        let p = p_var("p");
        let c = Poly::constant(rat(7, 3)).add(&p.sub(&p));
        assert_eq!(c, Poly::constant(rat(7, 3)));
        assert_eq!(c.as_constant(), Some(rat(7, 3)));
    }

    #[test]
    fn eval_examples() {
        // a1(1+a1)(1-4a1)/6 at a1 = -1/2 gives -1/8
        let a1 = p_var("a1");
        let one = Poly::constant(Rat::one());
        let expr = a1
            .mul(&one.add(&a1))
            .mul(&one.sub(&a1.scale(&rat_int(4))))
            .div_rat(&rat_int(6))
            .unwrap();
        let mut asg = BTreeMap::new();
        asg.insert("a1".to_string(), rat(-1, 2));
        assert_eq!(expr.eval(&asg).unwrap(), rat(-1, 8));

        // pr(p+r) at p=0 is 0
        let p = p_var("p");
        let r = p_var("r");
        let expr = p.mul(&r).mul(&p.add(&r));
        let mut asg = BTreeMap::new();
        asg.insert("p".to_string(), Rat::zero());
        asg.insert("r".to_string(), rat_int(5));
        assert_eq!(expr.eval(&asg).unwrap(), Rat::zero());

        // constant evaluates with the empty assignment
        assert_eq!(
            Poly::constant(rat(7, 3)).eval(&BTreeMap::new()).unwrap(),
            rat(7, 3)
        );
        // missing variable errors
        assert!(matches!(
            p.eval(&BTreeMap::new()),
            Err(Error::MissingVariable(_))
        ));
    }

    #[test]
    fn exact_division() {
        let p = p_var("p");
        let q = p_var("q");
        let r = p_var("r");
        let one = Poly::constant(Rat::one());

        // (p^2 - q^2)/(p - q) = p + q
        let num = p.mul(&p).sub(&q.mul(&q));
        assert_eq!(num.exact_div(&p.sub(&q)).unwrap(), p.add(&q));

        // (pr(p+r))/p = r(p+r)
        let num = p.mul(&r).mul(&p.add(&r));
        assert_eq!(num.exact_div(&p).unwrap(), r.mul(&p.add(&r)));

        // (p^2 + 1)/p is inexact
        let num = p.mul(&p).add(&one);
        assert!(matches!(num.exact_div(&p), Err(Error::InexactDivision)));
    }

    #[test]
    fn div_rat_examples() {
        let p = p_var("p");
        let one = Poly::constant(Rat::one());
        assert_eq!(
            p.scale(&rat_int(3)).div_rat(&rat(3, 2)).unwrap(),
            p.scale(&rat_int(2))
        );
        let p2m1 = p.mul(&p).sub(&one);
        assert_eq!(
            p2m1.div_rat(&rat_int(-1)).unwrap(),
            one.sub(&p.mul(&p))
        );
        assert!(p.div_rat(&Rat::zero()).is_err());
    }

    #[test]
    fn substitution() {
        // (p + q)^2 with p := 2 - 2q becomes (2 - q)^2
        let p = p_var("p");
        let q = p_var("q");
        let expr = p.add(&q).pow(2);
        let two = Poly::constant(rat_int(2));
        let got = expr.subst("p", &two.sub(&q.scale(&rat_int(2))));
        assert_eq!(got, two.sub(&q).pow(2));
    }

    #[test]
    fn display_format() {
        let p = p_var("p");
        let q = p_var("q");
        let e = p
            .mul(&p)
            .sub(&q.scale(&rat(1, 2)))
            .add(&Poly::constant(rat_int(3)));
        assert_eq!(e.to_string(), "p^2 - 1/2*q + 3");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn content_and_primitive() {
        let p = p_var("p");
        let e = p.scale(&rat(-2, 3)).add(&Poly::constant(rat(-4, 3)));
        let c = e.content();
        assert_eq!(c, rat(-2, 3));
        let prim = e.div_rat(&c).unwrap();
        assert_eq!(prim, p.add(&Poly::constant(rat_int(2))));
    }
}
