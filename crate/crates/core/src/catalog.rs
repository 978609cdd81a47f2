//! Catalog of parametric bivariate means: power, Gini, Stolarsky, the
//! generalized logarithmic family, Seiffert-type means and a few classical
//! fixed means.
//!
//! Three independent routes to the same data live here and are kept
//! deliberately separate so they can verify each other:
//!
//!   * `mean_eval`   — high-precision evaluation of the closed forms,
//!   * `exact_coeffs` — exact expansion coefficients derived directly from
//!     the defining series in u = t/x (never through the stability
//!     recursions),
//!   * `oracle_coeffs` — a numeric fit of the expansion coefficients from
//!     closed-form samples alone.

use std::fmt;
use std::str::FromStr;

use astro_float::BigFloat;
use num_traits::Signed;

use crate::bigfloat::FloatCtx;
use crate::error::{Error, Result};
use crate::expansion::{expansion_eval, MeanCoeffs};
use crate::poly::Poly;
use crate::rational::{binom_rat, parse_rat, rat, rat_int, rat_pow, render_rat, Rat};
use crate::scalar::{Coeff, Scalar};
use crate::series::{convolve, gould_power, series_exp, CoefSeq, Exponent};

/// Series order used when a closed form degenerates near the diagonal; with
/// the switch threshold 2^{-bits/4} the truncation error of the order-6
/// partial sum is far below 2^{-bits} for every supported precision.
const NEAR_DIAG_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Power,
    Gini,
    Stolarsky,
    GenLog,
    Seiffert1,
    Seiffert2,
    NeumanSandor,
    Logarithmic,
    Identric,
    Geometric,
    Arithmetic,
    Harmonic,
    Heron,
}

impl Family {
    pub fn arity(&self) -> usize {
        match self {
            Family::Power | Family::GenLog => 1,
            Family::Gini | Family::Stolarsky => 2,
            _ => 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Power => "power",
            Family::Gini => "gini",
            Family::Stolarsky => "stolarsky",
            Family::GenLog => "genlog",
            Family::Seiffert1 => "seiffert1",
            Family::Seiffert2 => "seiffert2",
            Family::NeumanSandor => "ns",
            Family::Logarithmic => "logarithmic",
            Family::Identric => "identric",
            Family::Geometric => "geometric",
            Family::Arithmetic => "arithmetic",
            Family::Harmonic => "harmonic",
            Family::Heron => "heron",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Some(match s {
            "power" => Family::Power,
            "gini" => Family::Gini,
            "stolarsky" => Family::Stolarsky,
            "genlog" => Family::GenLog,
            "seiffert1" => Family::Seiffert1,
            "seiffert2" => Family::Seiffert2,
            "ns" | "neuman_sandor" | "neuman-sandor" => Family::NeumanSandor,
            "logarithmic" => Family::Logarithmic,
            "identric" => Family::Identric,
            "geometric" => Family::Geometric,
            "arithmetic" => Family::Arithmetic,
            "harmonic" => Family::Harmonic,
            "heron" => Family::Heron,
            _ => return None,
        })
    }
}

/// A mean from the catalog together with its exact rational parameters.
/// Limit cases (Stolarsky p = r or p = 0, Gini p = r) are valid specs; the
/// evaluators branch on them explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSpec {
    family: Family,
    params: Vec<Rat>,
}

impl MeanSpec {
    pub fn new(family: Family, params: Vec<Rat>) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(Error::Parse(format!(
                "{} takes {} parameter(s), got {}",
                family.name(),
                family.arity(),
                params.len()
            )));
        }
        Ok(MeanSpec { family, params })
    }

    pub fn simple(family: Family) -> Self {
        MeanSpec::new(family, vec![]).expect("nullary family")
    }

    pub fn power(r: Rat) -> Self {
        MeanSpec::new(Family::Power, vec![r]).expect("power arity")
    }

    pub fn gini(p: Rat, r: Rat) -> Self {
        MeanSpec::new(Family::Gini, vec![p, r]).expect("gini arity")
    }

    pub fn stolarsky(p: Rat, r: Rat) -> Self {
        MeanSpec::new(Family::Stolarsky, vec![p, r]).expect("stolarsky arity")
    }

    pub fn genlog(r: Rat) -> Self {
        MeanSpec::new(Family::GenLog, vec![r]).expect("genlog arity")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[Rat] {
        &self.params
    }

    fn param(&self, i: usize) -> &Rat {
        &self.params[i]
    }
}

impl fmt::Display for MeanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family.name())?;
        if !self.params.is_empty() {
            let rendered: Vec<String> = self.params.iter().map(render_rat).collect();
            write!(f, ":{}", rendered.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for MeanSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (s.trim(), None),
        };
        let family = Family::from_name(name)
            .ok_or_else(|| Error::Parse(format!("unknown mean family: {name:?}")))?;
        let params = match rest {
            None => vec![],
            Some(r) => r
                .split(',')
                .map(parse_rat)
                .collect::<Result<Vec<Rat>>>()?,
        };
        MeanSpec::new(family, params)
    }
}

// ---------------------------------------------------------------------------
// Exact expansion coefficients from the defining series in u = t/x.
// ---------------------------------------------------------------------------

/// Exact coefficients a_0..a_{m_max} of M(x-t, x+t) ~ Σ a_n t^{2n} x^{-2n+1},
/// derived from the closed form of the mean: with s = x(1-u), t = x(1+u) the
/// mean is x·F(u) by homogeneity, and a_n is the u^{2n} coefficient of F.
pub fn exact_coeffs(spec: &MeanSpec, m_max: usize) -> Result<MeanCoeffs<Rat>> {
    let n = 2 * m_max;
    let f = f_series(spec, n)?;
    // Symmetry of the mean makes F even; a nonzero odd coefficient would
    // mean the series derivation itself is wrong.
    for k in (1..=n).step_by(2) {
        assert!(
            Coeff::is_zero(f.get(k)),
            "odd series coefficient u^{k} of {spec} is nonzero"
        );
    }
    let coeffs: Vec<Rat> = (0..=m_max).map(|m| f.get(2 * m).clone()).collect();
    MeanCoeffs::new(CoefSeq::new(coeffs), spec.to_string())
}

/// The series F(u) of the given spec, to order `n` in u inclusive.
fn f_series(spec: &MeanSpec, n: usize) -> Result<CoefSeq<Rat>> {
    match spec.family {
        Family::Arithmetic => Ok(CoefSeq::delta(n)),
        Family::Geometric => Ok(geometric_series(n)),
        Family::Harmonic => f_power(&rat_int(-1), n),
        Family::Heron => {
            // (2 + sqrt(1 - u^2)) / 3
            let mut f = geometric_series(n).scale(&rat(1, 3));
            f.set(0, rat_int(1));
            Ok(f)
        }
        Family::Power => f_power(spec.param(0), n),
        Family::Gini => f_gini(spec.param(0), spec.param(1), n),
        Family::Stolarsky => f_stolarsky(spec.param(0), spec.param(1), n),
        Family::GenLog => {
            let r = spec.param(0);
            if r.is_zero() {
                f_stolarsky(&rat_int(1), &rat_int(1), n)
            } else if *r == rat_int(-1) {
                f_stolarsky(&rat_int(0), &rat_int(1), n)
            } else {
                f_stolarsky(&(r + rat_int(1)), &rat_int(1), n)
            }
        }
        Family::Logarithmic => f_stolarsky(&rat_int(0), &rat_int(1), n),
        Family::Identric => f_stolarsky(&rat_int(1), &rat_int(1), n),
        Family::Seiffert1 => recip_series(&asin_over_u(n), n),
        Family::Seiffert2 => recip_series(&atan_over_u(n), n),
        Family::NeumanSandor => recip_series(&asinh_over_u(n), n),
    }
}

/// Sequence with prescribed even entries and zero odd entries.
fn even_series(order: usize, f: impl Fn(usize) -> Rat) -> CoefSeq<Rat> {
    let mut s = CoefSeq::zeros(order);
    let mut j = 0;
    while 2 * j <= order {
        s.set(2 * j, f(j));
        j += 1;
    }
    s
}

/// sqrt(1 - u^2): the geometric mean's F.
fn geometric_series(order: usize) -> CoefSeq<Rat> {
    let half = rat(1, 2);
    even_series(order, |j| {
        let sign = if j % 2 == 0 { rat_int(1) } else { rat_int(-1) };
        binom_rat(&half, j as u32) * sign
    })
}

/// A_q(u) = ((1+u)^q + (1-u)^q)/2 = Σ binom(q, 2j) u^{2j}.
fn a_series(q: &Rat, order: usize) -> CoefSeq<Rat> {
    even_series(order, |j| binom_rat(q, 2 * j as u32))
}

/// D_q(u) = ((1+u)^q - (1-u)^q)/u = Σ 2 binom(q, 2j+1) u^{2j}.
fn d_series(q: &Rat, order: usize) -> CoefSeq<Rat> {
    even_series(order, |j| binom_rat(q, 2 * j as u32 + 1) * rat_int(2))
}

/// (ln(1+u) - ln(1-u))/u = Σ 2 u^{2j} / (2j+1).
fn lg_series(order: usize) -> CoefSeq<Rat> {
    even_series(order, |j| rat(2, 2 * j as i64 + 1))
}

/// (1+u)^q.
fn binom_plus(q: &Rat, order: usize) -> CoefSeq<Rat> {
    CoefSeq::new((0..=order).map(|k| binom_rat(q, k as u32)).collect())
}

/// ln(1+u).
fn ln1p_series(order: usize) -> CoefSeq<Rat> {
    CoefSeq::new(
        (0..=order)
            .map(|k| {
                if k == 0 {
                    Rat::zero()
                } else if k % 2 == 1 {
                    rat(1, k as i64)
                } else {
                    rat(-1, k as i64)
                }
            })
            .collect(),
    )
}

/// asin(u)/u = Σ C_j u^{2j} with C_j = (2j)! / (4^j (j!)^2 (2j+1)).
fn asin_over_u(order: usize) -> CoefSeq<Rat> {
    let mut c = Rat::from_integer(1.into());
    let mut coeffs = vec![Rat::zero(); order + 1];
    let mut j = 0usize;
    while 2 * j <= order {
        coeffs[2 * j] = c.clone();
        let jj = j as i64 + 1;
        c = c * rat((2 * jj - 1) * (2 * jj - 1), 2 * jj * (2 * jj + 1));
        j += 1;
    }
    CoefSeq::new(coeffs)
}

/// atan(u)/u = Σ (-1)^j u^{2j} / (2j+1).
fn atan_over_u(order: usize) -> CoefSeq<Rat> {
    even_series(order, |j| {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        rat(sign, 2 * j as i64 + 1)
    })
}

/// asinh(u)/u: the asin series with alternating signs.
fn asinh_over_u(order: usize) -> CoefSeq<Rat> {
    let asin = asin_over_u(order);
    let mut s = CoefSeq::zeros(order);
    let mut j = 0usize;
    while 2 * j <= order {
        let sign = if j % 2 == 0 { rat_int(1) } else { rat_int(-1) };
        s.set(2 * j, asin.get(2 * j) * sign);
        j += 1;
    }
    s
}

fn recip_series(a: &CoefSeq<Rat>, order: usize) -> Result<CoefSeq<Rat>> {
    gould_power(a, &Exponent::Int(-1), order)
}

fn f_power(r: &Rat, n: usize) -> Result<CoefSeq<Rat>> {
    if r.is_zero() {
        return Ok(geometric_series(n));
    }
    gould_power(&a_series(r, n), &Exponent::Rat(r.recip()), n)
}

fn f_gini(p: &Rat, r: &Rat, n: usize) -> Result<CoefSeq<Rat>> {
    if p == r {
        if p.is_zero() {
            return Ok(geometric_series(n));
        }
        // exp of S = [(1+u)^p ln(1+u) + (1-u)^p ln(1-u)] / [(1+u)^p + (1-u)^p]
        let prod = convolve(&binom_plus(p, n), &ln1p_series(n), n)?;
        let mut num = CoefSeq::zeros(n);
        let mut k = 0usize;
        while k <= n {
            num.set(k, prod.get(k) * rat_int(2));
            k += 2;
        }
        let den = a_series(p, n).scale(&rat_int(2));
        let s = convolve(&num, &recip_series(&den, n)?, n)?;
        return series_exp(&s, n);
    }
    let base = convolve(&a_series(p, n), &recip_series(&a_series(r, n), n)?, n)?;
    gould_power(&base, &Exponent::Rat((p - r).recip()), n)
}

fn f_stolarsky(p: &Rat, r: &Rat, n: usize) -> Result<CoefSeq<Rat>> {
    // E is symmetric in (p, r); put an eventual zero parameter first.
    let (p, r) = if r.is_zero() { (r, p) } else { (p, r) };
    if p == r {
        if p.is_zero() {
            return Ok(geometric_series(n));
        }
        // ln F = W(u)/D_p(u) - 1/p with
        // W(u) = ((1+u)^p ln(1+u) - (1-u)^p ln(1-u)) / u.
        let prod = convolve(&binom_plus(p, n + 1), &ln1p_series(n + 1), n + 1)?;
        let mut w = CoefSeq::zeros(n);
        let mut k = 0usize;
        while k <= n {
            w.set(k, prod.get(k + 1) * rat_int(2));
            k += 2;
        }
        let mut s = convolve(&w, &recip_series(&d_series(p, n), n)?, n)?;
        s.set(0, s.get(0) - p.recip());
        return series_exp(&s, n);
    }
    if p.is_zero() {
        // (D_r / (r Lg))^{1/r} with Lg the symmetric log-difference series.
        let den = lg_series(n).scale(r);
        let base = convolve(&d_series(r, n), &recip_series(&den, n)?, n)?;
        return gould_power(&base, &Exponent::Rat(r.recip()), n);
    }
    let num = d_series(p, n).scale(r);
    let den = d_series(r, n).scale(p);
    let base = convolve(&num, &recip_series(&den, n)?, n)?;
    gould_power(&base, &Exponent::Rat((p - r).recip()), n)
}

// ---------------------------------------------------------------------------
// Symbolic-parameter coefficients via exact interpolation.
// ---------------------------------------------------------------------------

/// Expansion coefficients of a parametric family as polynomials in its
/// parameters ("r" for power/genlog, "p" and "r" for gini/stolarsky).
///
/// The coefficients are polynomial in the parameters, so exact Lagrange
/// interpolation of `exact_coeffs` samples recovers them exactly once the
/// degree bound is high enough; held-out sample points certify the bound.
pub fn exact_coeffs_symbolic(family: Family, m_max: usize) -> Result<MeanCoeffs<Scalar>> {
    match family {
        Family::Power | Family::Gini | Family::Stolarsky | Family::GenLog => {}
        _ => {
            return Err(Error::DomainError(format!(
                "{} has no parameters to be symbolic in",
                family.name()
            )))
        }
    }
    let spec_of = |params: &[Rat]| -> Result<MeanSpec> { MeanSpec::new(family, params.to_vec()) };
    // Held-out verification points, chosen away from every limit case and
    // off the interpolation grids.
    let holdout: Vec<Vec<Rat>> = match family.arity() {
        1 => vec![vec![rat(-5, 2)], vec![rat(7, 3)]],
        _ => vec![vec![rat(-5, 2), rat(7, 3)], vec![rat(9, 4), rat(-2, 3)]],
    };

    for attempt in 0..3usize {
        let bound = 2 * m_max + 1 + 2 * attempt;
        let polys = interpolate_family(family, m_max, bound, &spec_of)?;
        let mut ok = true;
        'verify: for pt in &holdout {
            let expect = exact_coeffs(&spec_of(pt)?, m_max)?;
            let mut assignment = std::collections::BTreeMap::new();
            if family.arity() == 1 {
                assignment.insert("r".to_string(), pt[0].clone());
            } else {
                assignment.insert("p".to_string(), pt[0].clone());
                assignment.insert("r".to_string(), pt[1].clone());
            }
            for (m, poly) in polys.iter().enumerate() {
                if poly.eval(&assignment)? != *expect.coeff(m + 1) {
                    ok = false;
                    break 'verify;
                }
            }
        }
        if ok {
            let mut coeffs = vec![Scalar::one()];
            coeffs.extend(polys.into_iter().map(poly_to_scalar));
            return MeanCoeffs::new(
                CoefSeq::new(coeffs),
                format!("{}(symbolic)", family.name()),
            );
        }
    }
    Err(Error::DegreeBoundExceeded(format!(
        "{} coefficients exceed degree {} per parameter",
        family.name(),
        2 * m_max + 5
    )))
}

fn poly_to_scalar(p: Poly) -> Scalar {
    match p.as_constant() {
        Some(c) => Scalar::Rat(c),
        None => Scalar::Poly(p),
    }
}

/// Interpolated polynomials for a_1..a_{m_max}, with per-variable degree
/// bound `bound`.
fn interpolate_family(
    family: Family,
    m_max: usize,
    bound: usize,
    spec_of: &impl Fn(&[Rat]) -> Result<MeanSpec>,
) -> Result<Vec<Poly>> {
    let npts = bound + 1;
    if family.arity() == 1 {
        // Nodes 1..=npts avoid the limit cases r = 0 (power) and r = -1, 0
        // (genlog).
        let nodes: Vec<Rat> = (1..=npts as i64).map(rat_int).collect();
        let samples: Vec<MeanCoeffs<Rat>> = nodes
            .iter()
            .map(|r| exact_coeffs(&spec_of(std::slice::from_ref(r))?, m_max))
            .collect::<Result<_>>()?;
        (1..=m_max)
            .map(|m| {
                let pts: Vec<(Rat, Poly)> = nodes
                    .iter()
                    .zip(&samples)
                    .map(|(r, s)| (r.clone(), Poly::constant(s.coeff(m).clone())))
                    .collect();
                lagrange("r", &pts)
            })
            .collect()
    } else {
        // Integer p-nodes against half-integer r-nodes keep p ≠ r and both
        // nonzero on the whole grid.
        let p_nodes: Vec<Rat> = (1..=npts as i64).map(rat_int).collect();
        let r_nodes: Vec<Rat> = (1..=npts as i64).map(|j| rat(2 * j - 1, 2)).collect();
        let samples: Vec<Vec<MeanCoeffs<Rat>>> = p_nodes
            .iter()
            .map(|p| {
                r_nodes
                    .iter()
                    .map(|r| exact_coeffs(&spec_of(&[p.clone(), r.clone()])?, m_max))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        (1..=m_max)
            .map(|m| {
                let outer: Vec<(Rat, Poly)> = p_nodes
                    .iter()
                    .zip(&samples)
                    .map(|(p, row)| {
                        let pts: Vec<(Rat, Poly)> = r_nodes
                            .iter()
                            .zip(row)
                            .map(|(r, s)| (r.clone(), Poly::constant(s.coeff(m).clone())))
                            .collect();
                        Ok((p.clone(), lagrange("r", &pts)?))
                    })
                    .collect::<Result<_>>()?;
                lagrange("p", &outer)
            })
            .collect()
    }
}

/// Lagrange interpolation through (x_i, y_i) where the values may themselves
/// be polynomials in other variables.
fn lagrange(var: &str, pts: &[(Rat, Poly)]) -> Result<Poly> {
    let x = Poly::var(var);
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in pts.iter().enumerate() {
        let mut basis = Poly::constant(rat_int(1));
        let mut denom = rat_int(1);
        for (j, (xj, _)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = basis.mul(&x.sub(&Poly::constant(xj.clone())));
            denom *= xi - xj;
        }
        acc = acc.add(&basis.mul(yi).div_rat(&denom)?);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// High-precision evaluation of the closed forms.
// ---------------------------------------------------------------------------

/// Evaluates the mean at positive arguments with the context's precision.
/// Closed forms built on differences (Stolarsky/log-type, Seiffert-type)
/// switch to the exact series when |t-s|/(t+s) < 2^{-bits/4}, where the
/// difference quotients lose their significance.
pub fn mean_eval(spec: &MeanSpec, s: &BigFloat, t: &BigFloat, ctx: &mut FloatCtx) -> Result<BigFloat> {
    ctx.ensure_positive(s, "s")?;
    ctx.ensure_positive(t, "t")?;
    let (lo, hi) = match ctx.cmp(s, t) {
        std::cmp::Ordering::Equal => return Ok(s.clone()),
        std::cmp::Ordering::Less => (s.clone(), t.clone()),
        std::cmp::Ordering::Greater => (t.clone(), s.clone()),
    };
    eval_ordered(spec, &lo, &hi, ctx)
}

fn eval_ordered(spec: &MeanSpec, lo: &BigFloat, hi: &BigFloat, ctx: &mut FloatCtx) -> Result<BigFloat> {
    match spec.family {
        Family::Arithmetic => {
            let sum = ctx.add(lo, hi);
            let two = ctx.from_i64(2);
            Ok(ctx.div(&sum, &two))
        }
        Family::Geometric => {
            let prod = ctx.mul(lo, hi);
            Ok(ctx.sqrt(&prod))
        }
        Family::Harmonic => {
            let prod = ctx.mul(lo, hi);
            let two = ctx.from_i64(2);
            let num = ctx.mul(&two, &prod);
            let den = ctx.add(lo, hi);
            Ok(ctx.div(&num, &den))
        }
        Family::Heron => {
            let prod = ctx.mul(lo, hi);
            let g = ctx.sqrt(&prod);
            let sum = ctx.add(lo, hi);
            let num = ctx.add(&sum, &g);
            let three = ctx.from_i64(3);
            Ok(ctx.div(&num, &three))
        }
        Family::Power => eval_power(spec.param(0), lo, hi, ctx),
        Family::Gini => eval_gini(spec.param(0), spec.param(1), lo, hi, ctx),
        Family::Stolarsky => {
            eval_stolarsky(&spec.param(0).clone(), &spec.param(1).clone(), spec, lo, hi, ctx)
        }
        Family::GenLog => {
            let r = spec.param(0);
            let sub = if r.is_zero() {
                MeanSpec::stolarsky(rat_int(1), rat_int(1))
            } else if *r == rat_int(-1) {
                MeanSpec::stolarsky(rat_int(0), rat_int(1))
            } else {
                MeanSpec::stolarsky(r + rat_int(1), rat_int(1))
            };
            eval_ordered(&sub, lo, hi, ctx)
        }
        Family::Logarithmic => {
            let sub = MeanSpec::stolarsky(rat_int(0), rat_int(1));
            eval_ordered(&sub, lo, hi, ctx)
        }
        Family::Identric => {
            let sub = MeanSpec::stolarsky(rat_int(1), rat_int(1));
            eval_ordered(&sub, lo, hi, ctx)
        }
        Family::Seiffert1 | Family::Seiffert2 | Family::NeumanSandor => {
            eval_arc(spec, lo, hi, ctx)
        }
    }
}

fn eval_power(r: &Rat, lo: &BigFloat, hi: &BigFloat, ctx: &mut FloatCtx) -> Result<BigFloat> {
    if r.is_zero() {
        let prod = ctx.mul(lo, hi);
        return Ok(ctx.sqrt(&prod));
    }
    let lp = ctx.pow_rat(lo, r);
    let hp = ctx.pow_rat(hi, r);
    let sum = ctx.add(&lp, &hp);
    let two = ctx.from_i64(2);
    let avg = ctx.div(&sum, &two);
    Ok(ctx.pow_rat(&avg, &r.recip()))
}

fn eval_gini(p: &Rat, r: &Rat, lo: &BigFloat, hi: &BigFloat, ctx: &mut FloatCtx) -> Result<BigFloat> {
    if p == r {
        if p.is_zero() {
            let prod = ctx.mul(lo, hi);
            return Ok(ctx.sqrt(&prod));
        }
        // exp((lo^p ln lo + hi^p ln hi) / (lo^p + hi^p))
        let lp = ctx.pow_rat(lo, p);
        let hp = ctx.pow_rat(hi, p);
        let ll = ctx.ln(lo);
        let lh = ctx.ln(hi);
        let t1 = ctx.mul(&lp, &ll);
        let t2 = ctx.mul(&hp, &lh);
        let num = ctx.add(&t1, &t2);
        let den = ctx.add(&lp, &hp);
        let q = ctx.div(&num, &den);
        return Ok(ctx.exp(&q));
    }
    let num = {
        let a = ctx.pow_rat(lo, p);
        let b = ctx.pow_rat(hi, p);
        ctx.add(&a, &b)
    };
    let den = {
        let a = ctx.pow_rat(lo, r);
        let b = ctx.pow_rat(hi, r);
        ctx.add(&a, &b)
    };
    let base = ctx.div(&num, &den);
    Ok(ctx.pow_rat(&base, &(p - r).recip()))
}

fn eval_stolarsky(
    p: &Rat,
    r: &Rat,
    spec: &MeanSpec,
    lo: &BigFloat,
    hi: &BigFloat,
    ctx: &mut FloatCtx,
) -> Result<BigFloat> {
    let (p, r) = if r.is_zero() { (r, p) } else { (p, r) };
    if p == r && p.is_zero() {
        let prod = ctx.mul(lo, hi);
        return Ok(ctx.sqrt(&prod));
    }
    if near_diagonal(lo, hi, ctx) {
        return eval_near_diagonal(spec, lo, hi, ctx);
    }
    if p == r {
        // exp((hi^p ln hi - lo^p ln lo)/(hi^p - lo^p) - 1/p)
        let lp = ctx.pow_rat(lo, p);
        let hp = ctx.pow_rat(hi, p);
        let ll = ctx.ln(lo);
        let lh = ctx.ln(hi);
        let t1 = ctx.mul(&hp, &lh);
        let t2 = ctx.mul(&lp, &ll);
        let num = ctx.sub(&t1, &t2);
        let den = ctx.sub(&hp, &lp);
        let q = ctx.div(&num, &den);
        let inv_p = ctx.from_rat(&p.recip());
        let e = ctx.sub(&q, &inv_p);
        return Ok(ctx.exp(&e));
    }
    if p.is_zero() {
        // ((hi^r - lo^r)/(r (ln hi - ln lo)))^{1/r}
        let lr = ctx.pow_rat(lo, r);
        let hr = ctx.pow_rat(hi, r);
        let num = ctx.sub(&hr, &lr);
        let ll = ctx.ln(lo);
        let lh = ctx.ln(hi);
        let dln = ctx.sub(&lh, &ll);
        let rf = ctx.from_rat(r);
        let den = ctx.mul(&rf, &dln);
        let base = ctx.div(&num, &den);
        return Ok(ctx.pow_rat(&base, &r.recip()));
    }
    // (r (hi^p - lo^p) / (p (hi^r - lo^r)))^{1/(p-r)}
    let dp = {
        let a = ctx.pow_rat(lo, p);
        let b = ctx.pow_rat(hi, p);
        ctx.sub(&b, &a)
    };
    let dr = {
        let a = ctx.pow_rat(lo, r);
        let b = ctx.pow_rat(hi, r);
        ctx.sub(&b, &a)
    };
    let rf = ctx.from_rat(r);
    let pf = ctx.from_rat(p);
    let num = ctx.mul(&rf, &dp);
    let den = ctx.mul(&pf, &dr);
    let base = ctx.div(&num, &den);
    Ok(ctx.pow_rat(&base, &(p - r).recip()))
}

fn eval_arc(spec: &MeanSpec, lo: &BigFloat, hi: &BigFloat, ctx: &mut FloatCtx) -> Result<BigFloat> {
    if near_diagonal(lo, hi, ctx) {
        return eval_near_diagonal(spec, lo, hi, ctx);
    }
    let diff = ctx.sub(hi, lo);
    let sum = ctx.add(hi, lo);
    let u = ctx.div(&diff, &sum);
    let arc = match spec.family {
        Family::Seiffert1 => ctx.asin(&u),
        Family::Seiffert2 => ctx.atan(&u),
        Family::NeumanSandor => ctx.asinh(&u),
        _ => unreachable!("eval_arc on non-arc family"),
    };
    let two = ctx.from_i64(2);
    let den = ctx.mul(&two, &arc);
    Ok(ctx.div(&diff, &den))
}

fn near_diagonal(lo: &BigFloat, hi: &BigFloat, ctx: &mut FloatCtx) -> bool {
    let diff = ctx.sub(hi, lo);
    let sum = ctx.add(hi, lo);
    let u = ctx.div(&diff, &sum);
    let thresh = ctx.pow2(-(ctx.bits() as i64 / 4));
    ctx.cmp(&u, &thresh) == std::cmp::Ordering::Less
}

fn eval_near_diagonal(
    spec: &MeanSpec,
    lo: &BigFloat,
    hi: &BigFloat,
    ctx: &mut FloatCtx,
) -> Result<BigFloat> {
    let coeffs = exact_coeffs(spec, NEAR_DIAG_ORDER)?;
    let sum = ctx.add(lo, hi);
    let diff = ctx.sub(hi, lo);
    let two = ctx.from_i64(2);
    let x = ctx.div(&sum, &two);
    let tt = ctx.div(&diff, &two);
    expansion_eval(&coeffs, &x, &tt, NEAR_DIAG_ORDER, ctx)
}

// ---------------------------------------------------------------------------
// Numeric coefficient oracle.
// ---------------------------------------------------------------------------

/// Numeric approximations of a_0..a_{m_max} extracted from closed-form
/// samples alone: solve M(x_j - 1, x_j + 1)/x_j = Σ c_n z_j^n at the nodes
/// z_j = 4^{-j}, x_j = x_0 2^j, fitting two extra coefficients beyond m_max
/// so the truncated tail cannot bias the reported ones.
///
/// The Vandermonde system is solved through its exact rational inverse; the
/// samples are taken at an internally elevated precision that covers both
/// the x_0^{2n} rescaling and the growth of the inverse's entries.
pub fn oracle_coeffs(spec: &MeanSpec, m_max: usize, precision: usize) -> Result<Vec<BigFloat>> {
    const LOG2_X0: i64 = 20;
    let m_est = m_max + 2;
    let base = precision.max(64 + 12 * m_max);
    let work = base + 2 * LOG2_X0 as usize * (m_max + 3) + 64;
    let mut ctx = FloatCtx::new(work);

    let x0 = rat_pow(&rat_int(2), LOG2_X0)?;
    let n_nodes = m_est + 1;
    let mut matrix: Vec<Vec<Rat>> = Vec::with_capacity(n_nodes);
    let mut ys: Vec<BigFloat> = Vec::with_capacity(n_nodes);
    let one = ctx.from_i64(1);
    for j in 0..n_nodes {
        let xj = &x0 * rat_pow(&rat_int(2), j as i64)?;
        let xf = ctx.from_rat(&xj);
        let s = ctx.sub(&xf, &one);
        let t = ctx.add(&xf, &one);
        let m = mean_eval(spec, &s, &t, &mut ctx)?;
        ys.push(ctx.div(&m, &xf));
        let z = rat_pow(&rat(1, 4), j as i64)?;
        matrix.push(
            (0..n_nodes)
                .map(|n| rat_pow(&z, n as i64))
                .collect::<Result<_>>()?,
        );
    }
    let inv = invert_rat_matrix(matrix)?;
    let mut out = Vec::with_capacity(m_max + 1);
    for n in 0..=m_max {
        let mut acc = ctx.from_i64(0);
        for (k, y) in ys.iter().enumerate() {
            let w = ctx.from_rat(&inv[n][k]);
            let term = ctx.mul(&w, y);
            acc = ctx.add(&acc, &term);
        }
        let scale = ctx.from_rat(&rat_pow(&x0, 2 * n as i64)?);
        out.push(ctx.mul(&acc, &scale));
    }
    Ok(out)
}

/// Exact inverse by Gauss-Jordan elimination with partial pivoting.
fn invert_rat_matrix(mut a: Vec<Vec<Rat>>) -> Result<Vec<Vec<Rat>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { rat_int(1) } else { Rat::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()))
            .expect("nonempty pivot range");
        if a[piv][col].is_zero() {
            return Err(Error::IllConditioned(
                "singular sample matrix in the coefficient oracle".into(),
            ));
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col].clone();
        for k in 0..n {
            a[col][k] /= &d;
            inv[col][k] /= &d;
        }
        for row in 0..n {
            if row == col || a[row][col].is_zero() {
                continue;
            }
            let f = a[row][col].clone();
            for k in 0..n {
                let t = &a[col][k] * &f;
                a[row][k] -= t;
                let t = &inv[col][k] * &f;
                inv[row][k] -= t;
            }
        }
    }
    Ok(inv)
}
