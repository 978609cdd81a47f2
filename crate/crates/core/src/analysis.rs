//! Stability analysis built on the expansion machinery: asymptotic
//! comparison verdicts, stability classification of parametric families,
//! stabilizability disproofs with exact surd arithmetic, sub-stabilizability
//! parameter optimization, simultaneity conditions, and numeric
//! functional-equation and compound-mean checks.
//!
//! All coefficient-based verdicts are necessary conditions only: finitely
//! many coefficients can refute stability properties but never prove them.

use std::collections::BTreeMap;
use std::fmt;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::algebraic::{
    poly_eval_uni, primitive_integer, real_roots, solve_quadratic, AlgebraicRoot, Modulus,
    QuadraticSurd, QuotientElem,
};
use crate::bigfloat::FloatCtx;
use crate::catalog::{exact_coeffs, exact_coeffs_symbolic, mean_eval, Family, MeanSpec};
use crate::error::{Error, Result};
use crate::expansion::{stabilizable_coeffs, stabilized_coeffs, stable_coeffs, MeanCoeffs};
use crate::poly::Poly;
use crate::rational::{rat_int, render_rat, Rat};
use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// Serializable report shape shared by every analysis operation.
// ---------------------------------------------------------------------------

/// Stable JSON shape of analysis findings. All values are canonical string
/// renderings, so serialization round-trips losslessly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Report {
    pub verdict: String,
    pub conditions: Vec<ReportCondition>,
    pub solutions: Vec<ReportSolution>,
    pub residuals: Vec<ReportResidual>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCondition {
    pub order: usize,
    pub polynomial: String,
    pub factors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSolution {
    pub p: String,
    pub q: String,
    pub representation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportResidual {
    pub order: usize,
    pub value: String,
}

/// A condition polynomial with its verified factorization:
/// poly = unit · Π factorᵢ^multᵢ exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionPoly {
    pub order: usize,
    pub poly: Poly,
    pub unit: Rat,
    pub factors: Vec<(Poly, u32)>,
}

impl ConditionPoly {
    fn to_report(&self) -> ReportCondition {
        let mut factors = Vec::new();
        if !self.factors.is_empty() {
            factors.push(render_rat(&self.unit));
            for (f, m) in &self.factors {
                factors.push(if *m == 1 {
                    format!("{f}")
                } else {
                    format!("({f})^{m}")
                });
            }
        }
        ReportCondition {
            order: self.order,
            polynomial: format!("{}", self.poly),
            factors,
        }
    }
}

// ---------------------------------------------------------------------------
// Asymptotic comparison (the ≻ relation on expansions).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareVerdict {
    AsymGreater,
    AsymLess,
    EqualToOrder,
    IdenticallyZeroToOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymCompareResult {
    pub verdict: CompareVerdict,
    pub first_nonzero_index: Option<usize>,
    pub first_nonzero_value: Option<Scalar>,
}

impl AsymCompareResult {
    pub fn to_report(&self, a_label: &str, b_label: &str) -> Report {
        let verdict = match self.verdict {
            CompareVerdict::AsymGreater => format!(
                "{a_label} - {b_label} ≻ 0 (first nonzero: {} at order {})",
                self.first_nonzero_value.as_ref().unwrap(),
                self.first_nonzero_index.unwrap()
            ),
            CompareVerdict::AsymLess => format!(
                "{a_label} - {b_label} ≺ 0 (first nonzero: {} at order {})",
                self.first_nonzero_value.as_ref().unwrap(),
                self.first_nonzero_index.unwrap()
            ),
            CompareVerdict::EqualToOrder => {
                format!("{a_label} = {b_label} to the compared order")
            }
            CompareVerdict::IdenticallyZeroToOrder => {
                format!("{a_label} - {b_label} is identically zero to the stored order")
            }
        };
        let residuals = match (&self.first_nonzero_index, &self.first_nonzero_value) {
            (Some(i), Some(v)) => vec![ReportResidual {
                order: *i,
                value: format!("{v}"),
            }],
            _ => vec![],
        };
        Report {
            verdict,
            residuals,
            ..Report::default()
        }
    }
}

/// Compares two expansions along the diagonal direction: the first nonzero
/// coefficient of the difference decides, since every monomial t^{2n}x^{1-2n}
/// is positive for x > t > 0. All-zero differences are `EqualToOrder`, or
/// `IdenticallyZeroToOrder` when the inputs carry identical coefficient data.
pub fn asym_compare(
    a: &MeanCoeffs<Scalar>,
    b: &MeanCoeffs<Scalar>,
    order: usize,
) -> Result<AsymCompareResult> {
    if a.order() < order || b.order() < order {
        return Err(Error::OrderTooLow(format!(
            "comparison to order {order} needs both expansions that far (have {}, {})",
            a.order(),
            b.order()
        )));
    }
    for n in 0..=order {
        let d = a.coeff(n).sub(b.coeff(n));
        if d.is_zero() {
            continue;
        }
        let Some(r) = d.as_rat() else {
            return Err(Error::SymbolicUndecidable(format!(
                "difference coefficient at order {n} is {d}"
            )));
        };
        let verdict = if r.is_positive() {
            CompareVerdict::AsymGreater
        } else {
            CompareVerdict::AsymLess
        };
        return Ok(AsymCompareResult {
            verdict,
            first_nonzero_index: Some(n),
            first_nonzero_value: Some(d),
        });
    }
    let verdict = if a.seq() == b.seq() {
        CompareVerdict::IdenticallyZeroToOrder
    } else {
        CompareVerdict::EqualToOrder
    };
    Ok(AsymCompareResult {
        verdict,
        first_nonzero_index: None,
        first_nonzero_value: None,
    })
}

// ---------------------------------------------------------------------------
// Factorization of condition polynomials.
// ---------------------------------------------------------------------------

/// Factors a condition polynomial into small-integer linear forms by trial
/// exact division (coefficients in -3..=3, canonicalized), leaving any
/// unfactored remainder as a final factor. The returned data always
/// satisfies poly = unit · Π factorᵢ^multᵢ exactly.
pub fn factor_condition(p: &Poly) -> (Rat, Vec<(Poly, u32)>) {
    if p.is_zero() {
        return (rat_int(0), vec![]);
    }
    let vars: Vec<String> = p.vars().to_vec();
    let mut rem = p.clone();
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    for cand in linear_candidates(&vars) {
        let mut mult = 0u32;
        while rem.as_constant().is_none() {
            match rem.exact_div(&cand) {
                Ok(q) => {
                    rem = q;
                    mult += 1;
                }
                Err(_) => break,
            }
        }
        if mult > 0 {
            factors.push((cand, mult));
        }
        if rem.as_constant().is_some() {
            break;
        }
    }
    match rem.as_constant() {
        Some(unit) => (unit, factors),
        None => {
            factors.push((rem, 1));
            (rat_int(1), factors)
        }
    }
}

/// Canonical small linear forms c₀ + Σ cᵢ·varᵢ: integer coefficients in
/// -3..=3, at least one variable coefficient nonzero, first nonzero variable
/// coefficient positive, gcd 1.
fn linear_candidates(vars: &[String]) -> Vec<Poly> {
    use num_integer::Integer;
    let mut out = Vec::new();
    let n = vars.len();
    let mut coeffs = vec![-3i64; n + 1]; // [var coeffs ..., constant]
    loop {
        let var_part = &coeffs[..n];
        let first = var_part.iter().find(|c| **c != 0);
        if let Some(&f) = first {
            let mut g = 0i64;
            for c in &coeffs {
                g = g.gcd(c);
            }
            if f > 0 && g == 1 {
                let mut p = Poly::constant(rat_int(coeffs[n]));
                for (i, v) in vars.iter().enumerate() {
                    p = p.add(&Poly::var(v).scale(&rat_int(coeffs[i])));
                }
                out.push(p);
            }
        }
        // odometer over -3..=3
        let mut i = 0;
        loop {
            if i > n {
                return out;
            }
            coeffs[i] += 1;
            if coeffs[i] <= 3 {
                break;
            }
            coeffs[i] = -3;
            i += 1;
        }
    }
}

fn condition(order: usize, poly: Poly) -> ConditionPoly {
    let (unit, factors) = factor_condition(&poly);
    ConditionPoly {
        order,
        poly,
        unit,
        factors,
    }
}

// ---------------------------------------------------------------------------
// Stability classification of parametric families.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub family: Family,
    /// First coefficient of the family as a polynomial in its parameters.
    pub a1: Scalar,
    pub conditions: Vec<ConditionPoly>,
    pub verdict: String,
}

impl StabilityReport {
    pub fn to_report(&self) -> Report {
        Report {
            verdict: self.verdict.clone(),
            conditions: self.conditions.iter().map(|c| c.to_report()).collect(),
            ..Report::default()
        }
    }
}

/// For each requested order m, the condition C_m = a_m(family) − a_m(stable
/// at the family's a₁): the family member is stable only where every C_m
/// vanishes (necessary conditions).
pub fn stability_conditions(family: Family, orders: &[usize]) -> Result<StabilityReport> {
    let m_max = orders.iter().copied().max().unwrap_or(2);
    let sym = exact_coeffs_symbolic(family, m_max)?;
    let a1 = sym.coeff(1).clone();
    let stable = stable_coeffs(a1.clone(), m_max)?;
    let mut conditions = Vec::new();
    for &m in orders {
        let c = sym.coeff(m).sub(stable.coeff(m)).to_poly();
        conditions.push(condition(m, c));
    }
    let verdict = format!(
        "{}(symbolic) is stable only where every listed condition vanishes \
         (necessary conditions from orders {:?})",
        family.name(),
        orders
    );
    Ok(StabilityReport {
        family,
        a1,
        conditions,
        verdict,
    })
}

/// Termwise test of the stable recursion: true iff the exact expansion
/// matches stable_coeffs at the mean's own a₁ up to the given order;
/// otherwise the first failing index is returned.
pub fn is_stable(spec: &MeanSpec, order: usize) -> Result<(bool, Option<usize>)> {
    let exact = exact_coeffs(spec, order)?;
    let st = stable_coeffs(exact.coeff(1).clone(), order)?;
    for n in 0..=order {
        if exact.coeff(n) != st.coeff(n) {
            return Ok((false, Some(n)));
        }
    }
    Ok((true, None))
}

// ---------------------------------------------------------------------------
// Stabilizability disproof.
// ---------------------------------------------------------------------------

/// An exact algebraic value, or a numeric stand-in when the underlying root
/// is only known by an isolating interval.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgValue {
    Exact(QuadraticSurd),
    Approximate(String),
}

impl AlgValue {
    pub fn is_zero(&self) -> bool {
        match self {
            AlgValue::Exact(s) => s.as_rat().map(|r| r == rat_int(0)).unwrap_or(false),
            AlgValue::Approximate(_) => false,
        }
    }
}

impl fmt::Display for AlgValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgValue::Exact(s) => write!(f, "{s}"),
            AlgValue::Approximate(s) => write!(f, "≈{s}"),
        }
    }
}

/// Evaluates a univariate rational polynomial exactly at an algebraic root;
/// isolated roots are approximated at the interval midpoint.
fn eval_at_root(coeffs: &[Rat], root: &AlgebraicRoot) -> AlgValue {
    match root {
        AlgebraicRoot::Rational(r) => {
            AlgValue::Exact(QuadraticSurd::from_rat(poly_eval_uni(coeffs, r)))
        }
        AlgebraicRoot::Surd(s) => {
            let m = Modulus::of_surd("v", s);
            let g = QuotientElem::generator(&m);
            AlgValue::Exact(QuotientElem::eval_poly(coeffs, &g).to_surd(s))
        }
        AlgebraicRoot::Isolated { low, high, .. } => {
            let mid = (low + high) / rat_int(2);
            let v = poly_eval_uni(coeffs, &mid);
            AlgValue::Approximate(format!("{:.6e}", v.to_f64().unwrap_or(f64::NAN)))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisproofCandidate {
    /// Root v = a₁ of the inner stable mean M.
    pub v: AlgebraicRoot,
    /// Eliminated u = a₁ of the outer stable mean K at this root.
    pub u: AlgValue,
    /// Order-3 residual; nonzero contradicts the candidate.
    pub residual: AlgValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisproofReport {
    pub target: String,
    /// u expressed from the linear order-1 condition, as a polynomial in v.
    pub elimination: Poly,
    /// Primitive integer minimal polynomial of v from the order-2 condition.
    pub minimal_polynomial: Vec<BigInt>,
    pub candidates: Vec<DisproofCandidate>,
    /// True when no candidate survives order 3.
    pub inconsistent: bool,
    pub verdict: String,
}

impl DisproofReport {
    pub fn to_report(&self) -> Report {
        let conditions = vec![ReportCondition {
            order: 2,
            polynomial: render_int_poly("v", &self.minimal_polynomial),
            factors: vec![],
        }];
        let solutions = self
            .candidates
            .iter()
            .map(|c| ReportSolution {
                p: format!("{}", c.u),
                q: format!("{}", c.v),
                representation: root_kind(&c.v).to_string(),
            })
            .collect();
        let residuals = self
            .candidates
            .iter()
            .map(|c| ReportResidual {
                order: 3,
                value: format!("{}", c.residual),
            })
            .collect();
        Report {
            verdict: self.verdict.clone(),
            conditions,
            solutions,
            residuals,
        }
    }
}

fn root_kind(r: &AlgebraicRoot) -> &'static str {
    match r {
        AlgebraicRoot::Rational(_) => "rational",
        AlgebraicRoot::Surd(_) => "quadratic_surd",
        AlgebraicRoot::Isolated { .. } => "isolated",
    }
}

/// Splits a polynomial that is linear in `var` into (coefficient, rest) with
/// poly = coefficient·var + rest; the coefficient must be a nonzero rational.
fn solve_linear(poly: &Poly, var: &str) -> Result<(Rat, Poly)> {
    if poly.degree_in(var) != 1 {
        return Err(Error::DomainError(format!(
            "condition is not linear in {var}: {poly}"
        )));
    }
    let at0 = poly.subst(var, &Poly::zero());
    let coeff = poly.subst(var, &Poly::constant(rat_int(1))).sub(&at0);
    let Some(c) = coeff.as_constant() else {
        return Err(Error::DomainError(format!(
            "coefficient of {var} is not constant in {poly}"
        )));
    };
    Ok((c, at0))
}

/// Tests whether the target can be (K,M)-stabilizable for stable K, M.
///
/// With u = a₁^K and v = a₁^M unknown, the order-1 condition is linear in u;
/// eliminating u turns the order-2 condition into a univariate polynomial in
/// v, whose real roots are the only candidates. Each candidate is checked
/// exactly against the order-3 condition in ℚ[v]/(minpoly).
pub fn stabilizable_disproof(target: &MeanSpec, order: usize) -> Result<DisproofReport> {
    if order < 3 {
        return Err(Error::OrderTooLow(format!(
            "stabilizability disproof needs order >= 3, got {order}"
        )));
    }
    let t = exact_coeffs(target, 3)?;
    let k = stable_coeffs(Scalar::var("u"), 3)?;
    let m = stable_coeffs(Scalar::var("v"), 3)?;
    let n = stabilizable_coeffs(&k, &m, 3)?;
    let cond = |i: usize| {
        n.coeff(i)
            .sub(&Scalar::from_rat(t.coeff(i).clone()))
            .to_poly()
    };
    let (cu, rest) = solve_linear(&cond(1), "u")?;
    let elimination = rest.scale(&(-cu.recip()));
    let c2 = cond(2).subst("u", &elimination).to_univariate("v")?;
    let minimal_polynomial = primitive_integer(&c2);
    let roots = real_roots(&c2, 128)?;
    let c3 = cond(3).subst("u", &elimination).to_univariate("v")?;
    let u_coeffs = elimination.to_univariate("v")?;
    let mut candidates = Vec::new();
    for v in roots {
        let u = eval_at_root(&u_coeffs, &v);
        let residual = eval_at_root(&c3, &v);
        candidates.push(DisproofCandidate { v, u, residual });
    }
    let inconsistent = candidates.iter().all(|c| !c.residual.is_zero());
    let verdict = if candidates.is_empty() {
        format!(
            "{}: not stabilizable by stable means — the order-2 condition has no real solution",
            t.label()
        )
    } else if inconsistent {
        format!(
            "{}: not stabilizable by stable means — every order-2 candidate is \
             contradicted by a nonzero order-3 residual",
            t.label()
        )
    } else {
        format!(
            "{}: candidates survive to order 3 (necessary conditions only)",
            t.label()
        )
    };
    Ok(DisproofReport {
        target: t.label().to_string(),
        elimination,
        minimal_polynomial,
        candidates,
        inconsistent,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Sub-stabilizability optimization with power-mean ansatz.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum SubStabOutcome {
    /// Double zero through order 2 with positive order-3 residual: the
    /// parameters are optimal and target ≻ R there.
    Optimal {
        /// (p, q) pairs.
        solutions: Vec<(QuadraticSurd, QuadraticSurd)>,
        residual: Rat,
        residual_order: usize,
    },
    /// No admissible double zero; the order-2 sign constraint is reported
    /// instead, as far as the analysis goes.
    Constraint { description: String },
}

/// Result of the numeric evidence sweep of target − R(B_p, target, B_q)
/// along the segment (s, 1−s) — evidence in the paper's own style, never a
/// proof of the global inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFinding {
    pub p: QuadraticSurd,
    pub q: QuadraticSurd,
    /// Minimum of the difference over the sweep grid, decimal rendering.
    pub min: String,
    /// Grid point attaining the minimum.
    pub min_at: Rat,
    /// Whether the minimum stays above the negative tolerance.
    pub nonnegative: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubStabReport {
    pub target: String,
    /// p from the linear order-1 condition, as a polynomial in q.
    pub p_of_q: Poly,
    /// Primitive integer order-2 condition in q (ascending).
    pub condition2: Vec<BigInt>,
    /// Numeric sweep at each double-zero parameter pair.
    pub sweep: Vec<SweepFinding>,
    pub outcome: SubStabOutcome,
    pub verdict: String,
}

impl SubStabReport {
    pub fn to_report(&self) -> Report {
        let conditions = vec![
            ReportCondition {
                order: 1,
                polynomial: format!("p - ({})", self.p_of_q),
                factors: vec![],
            },
            ReportCondition {
                order: 2,
                polynomial: render_int_poly("q", &self.condition2),
                factors: vec![],
            },
        ];
        let (solutions, residuals) = match &self.outcome {
            SubStabOutcome::Optimal {
                solutions,
                residual,
                residual_order,
            } => (
                solutions
                    .iter()
                    .map(|(p, q)| ReportSolution {
                        p: format!("{p}"),
                        q: format!("{q}"),
                        representation: "quadratic_surd".to_string(),
                    })
                    .collect(),
                vec![ReportResidual {
                    order: *residual_order,
                    value: render_rat(residual),
                }],
            ),
            SubStabOutcome::Constraint { .. } => (vec![], vec![]),
        };
        Report {
            verdict: self.verdict.clone(),
            conditions,
            solutions,
            residuals,
        }
    }
}

/// Sweep grid: s = k/SWEEP_STEPS for k = 1..SWEEP_STEPS on (s, 1−s), at
/// SWEEP_PRECISION bits; minima above −2^−SWEEP_TOL_BITS count as
/// nonnegative (the diagonal point is an exact zero).
const SWEEP_STEPS: i64 = 200;
const SWEEP_PRECISION: usize = 128;
const SWEEP_TOL_BITS: i64 = 64;

/// Rational approximation of a surd, good to about `bits` bits.
fn surd_to_rat(s: &QuadraticSurd, bits: usize) -> Rat {
    if let Some(r) = s.as_rat() {
        return r;
    }
    let scaled: BigInt = s.radicand.clone() << (2 * bits);
    let root = Rat::new(scaled.sqrt(), BigInt::from(1) << bits);
    &s.a + &s.b * root
}

/// Numeric sweep of target − R(B_p, target, B_q) on (s, 1−s): reports the
/// minimum over the fixed grid and whether it stays nonnegative within
/// tolerance. Surd parameters are approximated to working precision.
pub fn substab_sweep(
    target: &MeanSpec,
    p: &QuadraticSurd,
    q: &QuadraticSurd,
) -> Result<SweepFinding> {
    let mut ctx = FloatCtx::new(SWEEP_PRECISION);
    let bp = MeanSpec::power(surd_to_rat(p, ctx.bits()));
    let bq = MeanSpec::power(surd_to_rat(q, ctx.bits()));
    let mut min: Option<BigFloat> = None;
    let mut min_at = rat_int(0);
    for k in 1..SWEEP_STEPS {
        let s = Rat::new(BigInt::from(k), BigInt::from(SWEEP_STEPS));
        let t = rat_int(1) - &s;
        let sf = ctx.from_rat(&s);
        let tf = ctx.from_rat(&t);
        let tv = mean_eval(target, &sf, &tf, &mut ctx)?;
        let rv = resultant_eval(&bp, target, &bq, &sf, &tf, &mut ctx)?;
        let d = ctx.sub(&tv, &rv);
        if min
            .as_ref()
            .map(|m| ctx.cmp(&d, m) == std::cmp::Ordering::Less)
            .unwrap_or(true)
        {
            min = Some(d);
            min_at = s;
        }
    }
    let min = min.expect("nonempty sweep grid");
    let tol = ctx.pow2(-SWEEP_TOL_BITS);
    let neg_tol = ctx.neg(&tol);
    let nonnegative = ctx.cmp(&min, &neg_tol) != std::cmp::Ordering::Less;
    Ok(SweepFinding {
        p: p.clone(),
        q: q.clone(),
        min: ctx.to_decimal_string(&min),
        min_at,
        nonnegative,
    })
}

/// Power-mean coefficients with the symbolic parameter renamed to `var`.
fn power_coeffs_in(var: &str, m_max: usize) -> Result<MeanCoeffs<Scalar>> {
    let base = exact_coeffs_symbolic(Family::Power, m_max)?;
    let renamed = base.seq().map(|s| s.subst("r", &Poly::var(var)));
    MeanCoeffs::new(renamed, format!("B_{var}"))
}

/// Optimal (B_p, B_q)-sub-stabilizability parameters for the target: the
/// difference target − N(B_p, B_q) (N the stabilizable fixed point) is
/// forced to a double zero through order 2; the exact order-3 residual at
/// the surd parameters decides the verdict.
pub fn substab_optimize(target: &MeanSpec, order: usize) -> Result<SubStabReport> {
    if order < 3 {
        return Err(Error::OrderTooLow(format!(
            "sub-stabilizability optimization needs order >= 3, got {order}"
        )));
    }
    let t = exact_coeffs(target, 3)?;
    let bp = power_coeffs_in("p", 3)?;
    let bq = power_coeffs_in("q", 3)?;
    let n = stabilizable_coeffs(&bp, &bq, 3)?;
    let diff = |i: usize| {
        Scalar::from_rat(t.coeff(i).clone())
            .sub(n.coeff(i))
            .to_poly()
    };
    let (cp, rest) = solve_linear(&diff(1), "p")?;
    let p_of_q = rest.scale(&(-cp.recip()));
    let c2 = diff(2).subst("p", &p_of_q).to_univariate("q")?;
    let condition2 = primitive_integer(&c2);
    if condition2.len() != 3 {
        return Err(Error::DomainError(format!(
            "order-2 condition is not quadratic in q: {}",
            render_int_poly("q", &condition2)
        )));
    }
    let (a, b, c) = (
        Rat::from_integer(condition2[2].clone()),
        Rat::from_integer(condition2[1].clone()),
        Rat::from_integer(condition2[0].clone()),
    );
    let c3 = diff(3).subst("p", &p_of_q).to_univariate("q")?;
    let p_coeffs = p_of_q.to_univariate("q")?;
    let label = t.label().to_string();
    let roots = solve_quadratic(&a, &b, &c);
    let mut solutions = Vec::new();
    let mut residuals = Vec::new();
    if let Some((q1, q2)) = &roots {
        for q in [q1, q2] {
            let root = match q.as_rat() {
                Some(r) => AlgebraicRoot::Rational(r),
                None => AlgebraicRoot::Surd(q.clone()),
            };
            let p = match eval_at_root(&p_coeffs, &root) {
                AlgValue::Exact(s) => s,
                AlgValue::Approximate(_) => unreachable!("quadratic roots are exact"),
            };
            solutions.push((p, q.clone()));
            residuals.push(eval_at_root(&c3, &root));
        }
    }
    // A double zero is admissible only when the residual is an unambiguous
    // positive rational at both roots (the necessary direction of the
    // inequality target ≥ R) — and the numeric evidence sweep along
    // (s, 1-s) does not contradict the sign anywhere.
    let rational_residuals: Vec<Option<Rat>> = residuals
        .iter()
        .map(|r| match r {
            AlgValue::Exact(s) => s.as_rat(),
            AlgValue::Approximate(_) => None,
        })
        .collect();
    let asym_positive = roots.is_some()
        && rational_residuals.len() == 2
        && rational_residuals[0].is_some()
        && rational_residuals[0] == rational_residuals[1]
        && rational_residuals[0].as_ref().unwrap().is_positive();
    let mut sweep = Vec::new();
    if asym_positive {
        for (p, q) in &solutions {
            sweep.push(substab_sweep(target, p, q)?);
        }
    }
    let optimal = asym_positive && sweep.iter().all(|f| f.nonnegative);
    let (outcome, verdict) = if optimal {
        let residual = rational_residuals[0].clone().unwrap();
        let verdict = format!(
            "{label} ≻ N(B_p, B_q) at the optimal parameters with order-3 residual {} \
             (necessary conditions only; the numeric sweep is evidence, not proof)",
            render_rat(&residual)
        );
        (
            SubStabOutcome::Optimal {
                solutions,
                residual,
                residual_order: 3,
            },
            verdict,
        )
    } else {
        let disc = &b * &b - rat_int(4) * &a * &c;
        let description = format!(
            "|{}*q {} {}| >= sqrt({})",
            render_rat(&(rat_int(2) * &a)),
            if b.is_negative() { "-" } else { "+" },
            render_rat(&b.abs()),
            render_rat(&disc)
        );
        let reason = if asym_positive {
            "the difference goes negative along (s, 1-s) at the order-2 double zeros"
        } else {
            "the order-3 residual at the order-2 double zeros is not a positive rational"
        };
        let verdict = format!(
            "{label}: no admissible double zero ({reason}); the order-2 difference is \
             nonnegative exactly where {description}"
        );
        (SubStabOutcome::Constraint { description }, verdict)
    };
    Ok(SubStabReport {
        target: label,
        p_of_q,
        condition2,
        sweep,
        outcome,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Simultaneity conditions.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimultaneousCase {
    /// N both (K,M)- and (M,K)-stabilizable.
    StabilizableSwap,
    /// M both (K,N)- and (N,K)-stabilized.
    StabilizedSwap,
    /// M both (K,N)-stabilizable and (K,N)-stabilized.
    StabilizableAndStabilized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulBranch {
    /// Substituted variable and its value.
    pub var: String,
    pub value: Poly,
    /// Coefficients of the distinguished mean on this branch.
    pub coefficients: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulReport {
    pub case: SimultaneousCase,
    pub conditions: Vec<ConditionPoly>,
    pub branches: Vec<SimulBranch>,
    pub verdict: String,
}

impl SimulReport {
    pub fn to_report(&self) -> Report {
        let solutions = self
            .branches
            .iter()
            .map(|b| ReportSolution {
                p: b.var.clone(),
                q: format!("{}", b.value),
                representation: format!(
                    "coefficients: {}",
                    b.coefficients
                        .iter()
                        .map(|c| format!("{c}"))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            })
            .collect();
        Report {
            verdict: self.verdict.clone(),
            conditions: self.conditions.iter().map(|c| c.to_report()).collect(),
            solutions,
            ..Report::default()
        }
    }
}

fn branch(mean: &MeanCoeffs<Scalar>, var: &str, value: Poly, order: usize) -> SimulBranch {
    let coefficients = (0..=order)
        .map(|i| mean.coeff(i).subst(var, &value))
        .collect();
    SimulBranch {
        var: var.to_string(),
        value,
        coefficients,
    }
}

/// Necessary conditions for the three simultaneity cases, with the branch
/// coefficient lists obtained by substituting each factor's zero locus.
pub fn simultaneous_conditions(case: SimultaneousCase, order: usize) -> Result<SimulReport> {
    if order < 3 {
        return Err(Error::OrderTooLow(format!(
            "simultaneity analysis needs order >= 3, got {order}"
        )));
    }
    let k1 = Poly::var("k1");
    match case {
        SimultaneousCase::StabilizableSwap => {
            let k = stable_coeffs(Scalar::var("k1"), order)?;
            let m = stable_coeffs(Scalar::var("m1"), order)?;
            let lhs = stabilizable_coeffs(&k, &m, order)?;
            let rhs = stabilizable_coeffs(&m, &k, order)?;
            let conditions: Vec<ConditionPoly> = (1..=order)
                .map(|i| condition(i, lhs.coeff(i).sub(rhs.coeff(i)).to_poly()))
                .collect();
            let branches = vec![branch(&lhs, "m1", k1, order)];
            Ok(SimulReport {
                case,
                conditions,
                branches,
                verdict: "a1^N = a1^M = a1^K; on that branch the coefficients of N take \
                          the stable form, so N should itself be stable"
                    .to_string(),
            })
        }
        SimultaneousCase::StabilizedSwap => {
            let k = stable_coeffs(Scalar::var("k1"), order)?;
            let n = stable_coeffs(Scalar::var("n1"), order)?;
            let lhs = stabilized_coeffs(&k, &n, order)?;
            let rhs = stabilized_coeffs(&n, &k, order)?;
            let conditions: Vec<ConditionPoly> = (1..=order)
                .map(|i| condition(i, lhs.coeff(i).sub(rhs.coeff(i)).to_poly()))
                .collect();
            let minus_one_minus_k1 = Poly::constant(rat_int(-1)).sub(&k1);
            let branches = vec![
                branch(&lhs, "n1", k1.clone(), order),
                branch(&lhs, "n1", minus_one_minus_k1, order),
            ];
            Ok(SimulReport {
                case,
                conditions,
                branches,
                verdict: "either a1^K = a1^N (stable form for M) or a1^K + a1^N = -1, \
                          which pins M to the geometric-mean coefficients; then G \
                          satisfies the Gauss functional equation G = N ⊗ K"
                    .to_string(),
            })
        }
        SimultaneousCase::StabilizableAndStabilized => {
            let k = stable_coeffs(Scalar::var("k1"), order)?;
            let n = stable_coeffs(Scalar::var("n1"), order)?;
            let lhs = stabilizable_coeffs(&k, &n, order)?;
            let rhs = stabilized_coeffs(&k, &n, order)?;
            let conditions: Vec<ConditionPoly> = (1..=order)
                .map(|i| condition(i, lhs.coeff(i).sub(rhs.coeff(i)).to_poly()))
                .collect();
            let branches = vec![branch(&rhs, "n1", k1, order)];
            Ok(SimulReport {
                case,
                conditions,
                branches,
                verdict: "a1^K = a1^N = a1^M; on that branch the coefficients of M take \
                          the stable form, so M should be stable and asymptotically \
                          equal to K and N"
                    .to_string(),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Numeric functional-equation checks and the Gauss compound mean.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Stable,
    Stabilizable,
    Stabilized,
}

/// The resultant mean-map R(K, N, M)(s, t) = K(N(s, m̂), N(m̂, t)) with
/// m̂ = M(s, t), evaluated numerically.
pub fn resultant_eval(
    k: &MeanSpec,
    n: &MeanSpec,
    m: &MeanSpec,
    s: &BigFloat,
    t: &BigFloat,
    ctx: &mut FloatCtx,
) -> Result<BigFloat> {
    let mm = mean_eval(m, s, t, ctx)?;
    let left = mean_eval(n, s, &mm, ctx)?;
    let right = mean_eval(n, &mm, t, ctx)?;
    mean_eval(k, &left, &right, ctx)
}

/// Maximum relative residual |target − R(K,N,M)| / target of the defining
/// equation over the sample grid; the target is M for the stable and
/// stabilized relations and N for the stabilizable one.
pub fn functional_eq_residual(
    k: &MeanSpec,
    n: &MeanSpec,
    m: &MeanSpec,
    relation: Relation,
    samples: &[(Rat, Rat)],
    precision: usize,
) -> Result<BigFloat> {
    let mut ctx = FloatCtx::new(precision);
    let mut max = ctx.from_i64(0);
    for (s, t) in samples {
        let sf = ctx.from_rat(s);
        let tf = ctx.from_rat(t);
        let target_spec = match relation {
            Relation::Stable | Relation::Stabilized => m,
            Relation::Stabilizable => n,
        };
        let target = mean_eval(target_spec, &sf, &tf, &mut ctx)?;
        let r = resultant_eval(k, n, m, &sf, &tf, &mut ctx)?;
        let err = ctx.rel_err(&target, &r);
        if ctx.cmp(&err, &max) == std::cmp::Ordering::Greater {
            max = err;
        }
    }
    Ok(max)
}

/// Gauss compound mean K ⊗ N: the common limit of s ← K(s,t), t ← N(s,t),
/// iterated to relative gap 2^(16 − precision).
pub fn compound_mean(
    k: &MeanSpec,
    n: &MeanSpec,
    s: &Rat,
    t: &Rat,
    precision: usize,
) -> Result<BigFloat> {
    let mut ctx = FloatCtx::new(precision);
    let mut a = ctx.from_rat(s);
    let mut b = ctx.from_rat(t);
    ctx.ensure_positive(&a, "s")?;
    ctx.ensure_positive(&b, "t")?;
    let tol = ctx.pow2(16 - ctx.bits() as i64);
    let cap = 64 + 2 * ctx.bits();
    let mut gap = ctx.rel_err(&a, &b);
    for _ in 0..cap {
        if ctx.cmp(&gap, &tol) != std::cmp::Ordering::Greater {
            return Ok(a);
        }
        let na = mean_eval(k, &a, &b, &mut ctx)?;
        let nb = mean_eval(n, &a, &b, &mut ctx)?;
        a = na;
        b = nb;
        gap = ctx.rel_err(&a, &b);
    }
    Err(Error::NonConvergence(format!(
        "gap {} after {cap} iterations",
        ctx.to_decimal_string(&gap)
    )))
}

// ---------------------------------------------------------------------------
// Rendering helpers.
// ---------------------------------------------------------------------------

/// Descending display of an integer polynomial, e.g. "8*v^2 - 1".
pub fn render_int_poly(var: &str, coeffs: &[BigInt]) -> String {
    use num_traits::{One, Zero};
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let mag = c.abs();
        match i {
            0 => out.push_str(&mag.to_string()),
            _ => {
                if !mag.is_one() {
                    out.push_str(&format!("{mag}*"));
                }
                out.push_str(var);
                if i > 1 {
                    out.push_str(&format!("^{i}"));
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Exact rational evaluation of a condition polynomial at a parameter point,
/// used by cross-checks of the factored stability loci.
pub fn eval_condition(poly: &Poly, assignment: &[(&str, Rat)]) -> Result<Rat> {
    let map: BTreeMap<String, Rat> = assignment
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect();
    poly.eval(&map)
}
