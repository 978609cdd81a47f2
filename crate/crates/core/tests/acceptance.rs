//! Acceptance suite: the ten end-to-end criteria the library is built to
//! satisfy, run as one test with a pass/fail line per criterion. Exact
//! checks carry zero tolerance; numeric checks state their tolerance inline.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;

use meanasym::analysis::{
    functional_eq_residual, simultaneous_conditions, stability_conditions, stabilizable_disproof,
    substab_optimize, AlgValue, Relation, SimultaneousCase, SubStabOutcome,
};
use meanasym::catalog::{exact_coeffs, exact_coeffs_symbolic, oracle_coeffs, Family, MeanSpec};
use meanasym::expansion::{
    resultant_coeffs, stabilizable_coeffs, stabilized_coeffs, stable_coeffs, MeanCoeffs,
};
use meanasym::rational::{rat, rat_int, Rat};
use meanasym::series::CoefSeq;
use meanasym::{AlgebraicRoot, FloatCtx, Poly, QuadraticSurd, Scalar};

type Check = fn() -> Result<String, String>;

#[test]
fn acceptance() {
    let criteria: [(&str, Check); 10] = [
        ("stable expansion closed forms a2..a4", c1_stable_closed_forms),
        ("resultant coefficients, symbolic and stable-specialized", c2_resultant_lists),
        ("fixed-point suites to order 10, 20 random draws", c3_fixed_points),
        ("catalog coefficients vs reference lists", c4_catalog),
        ("oracle triangle < 1e-12 to order 6", c5_oracle_triangle),
        ("stability classification of parametric families", c6_classification),
        ("stabilizability disproofs", c7_disproofs),
        ("sub-stabilizability optimization", c8_substab),
        ("simultaneity conditions and branches", c9_simultaneity),
        ("functional-equation residuals < 1e-25", c10_functional_equations),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(extra) => println!("PASS {:2}. {name}{extra}", i + 1),
            Err(e) => {
                failures += 1;
                println!("FAIL {:2}. {name}: {e}", i + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}

// ---------------------------------------------------------------------------
// Small builders.
// ---------------------------------------------------------------------------

fn c(x: i64) -> Poly {
    Poly::constant(rat_int(x))
}

fn v(name: &str) -> Poly {
    Poly::var(name)
}

fn dr(p: Poly, d: i64) -> Poly {
    p.div_rat(&rat_int(d)).unwrap()
}

fn sym_mean(label: &str, names: &[&str]) -> MeanCoeffs<Scalar> {
    let mut coeffs = vec![Scalar::one()];
    coeffs.extend(names.iter().map(|n| Scalar::var(n)));
    MeanCoeffs::new(CoefSeq::new(coeffs), label).unwrap()
}

fn poly_of(m: &MeanCoeffs<Scalar>, i: usize) -> Poly {
    m.coeff(i).to_poly()
}

fn spec(s: &str) -> MeanSpec {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn lib<T>(r: meanasym::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// 1. Stable expansion closed forms.
// ---------------------------------------------------------------------------

fn c1_stable_closed_forms() -> Result<String, String> {
    let s = lib(stable_coeffs(Scalar::var("a1"), 4))?;
    let a1 = v("a1");
    let a2 = dr(&(&a1 * &(&c(1) + &a1)) * &(&c(1) - &a1.scale(&rat_int(4))), 6);
    let a3 = dr(
        &(&a1 * &(&c(1) + &a1))
            * &(&(&c(6) - &a1.scale(&rat_int(31))) + &(&a1.pow(2).scale(&rat_int(36)) + &a1.pow(3).scale(&rat_int(64)))),
        90,
    );
    let a4 = dr(
        &(&a1 * &(&c(1) + &a1))
            * &(&(&(&c(90) - &a1.scale(&rat_int(531))) + &(&a1.pow(2).scale(&rat_int(937)) + &a1.pow(3).scale(&rat_int(568))))
                - &(&a1.pow(4).scale(&rat_int(3088)) + &a1.pow(5).scale(&rat_int(2176)))),
        2520,
    );
    ensure(poly_of(&s, 2) == a2, "a2 mismatch")?;
    ensure(poly_of(&s, 3) == a3, "a3 mismatch")?;
    ensure(poly_of(&s, 4) == a4, "a4 mismatch")?;
    Ok(String::new())
}

// ---------------------------------------------------------------------------
// 2. Resultant coefficient lists.
// ---------------------------------------------------------------------------

fn c2_resultant_lists() -> Result<String, String> {
    // Fully symbolic inputs, a1^R..a3^R.
    let k = sym_mean("K", &["k1", "k2", "k3"]);
    let n = sym_mean("N", &["n1", "n2", "n3"]);
    let m = sym_mean("M", &["m1", "m2", "m3"]);
    let r = lib(resultant_coeffs(&k, &n, &m, 3))?;
    let (k1, k2, k3) = (v("k1"), v("k2"), v("k3"));
    let (n1, n2, n3) = (v("n1"), v("n2"), v("n3"));
    let (m1, m2, m3) = (v("m1"), v("m2"), v("m3"));

    let r1 = dr(&(&k1 + &m1.scale(&rat_int(2))) + &n1, 4);
    ensure(poly_of(&r, 1) == r1, "a1^R mismatch")?;

    let r2 = dr(
        &(&(&k2 + &m2.scale(&rat_int(8))) + &n1)
            + &(&(&(&m1.scale(&rat_int(2)) * &(&c(1) + &m1.scale(&rat_int(2)))) * &n1)
                - &(&k1 * &(&n1.scale(&rat_int(3)) + &(&m1 * &(&c(2) + &n1.scale(&rat_int(8))))))
                + n2.clone()),
        16,
    );
    ensure(poly_of(&r, 2) == r2, "a2^R mismatch")?;

    let t_m = &(&c(1) - &(&m1.scale(&rat_int(2)) * &(&c(1) + &m1.scale(&rat_int(2))).pow(2)))
        + &(&m2.scale(&rat_int(8)) + &(&m1 * &m2).scale(&rat_int(32)));
    let t_k2 = &k2 * &(&n1.scale(&rat_int(7)) + &(&m1.scale(&rat_int(2)) * &(&c(3) + &n1.scale(&rat_int(8)))));
    let t_k1 = &k1
        * &(&(&(&n1 * &(&c(-3) + &n1.scale(&rat_int(4))))
            - &(&m2.scale(&rat_int(8)) * &(&c(1) + &n1.scale(&rat_int(4)))))
            + &(&(&(&m1.pow(2).scale(&rat_int(4)) * &(&c(1) + &n1)) * &(&c(1) + &n1.scale(&rat_int(4))))
                + &(&(&m1.scale(&rat_int(2))
                    * &(&(&n1 * &(&c(3) + &n1.scale(&rat_int(8)))) - &n2.scale(&rat_int(8))))
                    - &n2.scale(&rat_int(7)))));
    let r3 = dr(
        &(&(&(&k3 + &m3.scale(&rat_int(32))) + &(&t_m * &n1)) - &t_k2)
            + &(&t_k1
                + &(&(&n2.scale(&rat_int(6))
                    + &(&(&m1.scale(&rat_int(6)) * &(&c(3) + &m1.scale(&rat_int(4)))) * &n2))
                    + &n3)),
        64,
    );
    ensure(poly_of(&r, 3) == r3, "a3^R mismatch")?;

    // One generic mean in all three slots: a0^R..a4^R.
    let a = sym_mean("A", &["a1", "a2", "a3", "a4"]);
    let r = lib(resultant_coeffs(&a, &a, &a, 4))?;
    let (a1, a2, a3, a4) = (v("a1"), v("a2"), v("a3"), v("a4"));
    ensure(poly_of(&r, 0) == c(1), "a0^R mismatch")?;
    ensure(poly_of(&r, 1) == a1, "a1^R (single mean) mismatch")?;
    let e2 = &dr(&(&a1 * &(&c(1) + &a1)) * &(&c(1) - &a1.scale(&rat_int(4))), 16)
        + &a2.scale(&rat(5, 8));
    ensure(poly_of(&r, 2) == e2, "a2^R stable-form mismatch")?;
    let inner3 = &(&a1
        * &(&(&c(1)
            + &(&a1.scale(&rat_int(2))
                * &(&(&c(-3) + &a1.scale(&rat_int(6))) + &a1.pow(2).scale(&rat_int(8)))))
            - &a2.scale(&rat_int(8))))
        + &a2.scale(&rat_int(6));
    let e3 = &dr(&(&c(1) + &a1) * &inner3, 64) + &a3.scale(&rat(17, 32));
    ensure(poly_of(&r, 3) == e3, "a3^R stable-form mismatch")?;
    let e4 = &dr(
        &(&(&(&a1.pow(5).scale(&rat_int(-56)) - &a1.pow(6).scale(&rat_int(48)))
            + &(&a2.pow(2).scale(&rat_int(33))
                + &(&a1.pow(4).scale(&rat_int(24)) * &(&c(1) + &a2.scale(&rat_int(10))))))
            + &(&(&a1.pow(3) * &(&c(22) + &a2.scale(&rat_int(300))))
                + &(&(&a2 + &a3).scale(&rat_int(15))
                    + &(&a1.pow(2).scale(&rat_int(3))
                        * &(&(&c(-3) + &a2.scale(&rat_int(8))) + &a3.scale(&rat_int(4)))))))
            + &(&a1
                * &(&(&c(1) + &(&a2.scale(&rat_int(3)) * &(&c(-7) + &a2.scale(&rat_int(32)))))
                    + &a3.scale(&rat_int(18)))),
        256,
    ) + &a4.scale(&rat(65, 128));
    ensure(poly_of(&r, 4) == e4, "a4^R stable-form mismatch")?;
    Ok(String::new())
}

// ---------------------------------------------------------------------------
// 3. Fixed-point suites with random rational draws.
// ---------------------------------------------------------------------------

/// Deterministic linear-congruential draws: small rationals in [-3, 3].
struct Lcg(u64);

impl Lcg {
    fn next_rat(&mut self) -> Rat {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let n = ((self.0 >> 33) % 13) as i64 - 6;
        let d = ((self.0 >> 49) % 4) as i64 + 1;
        rat(n, 2 * d)
    }
}

fn c3_fixed_points() -> Result<String, String> {
    let order = 10;
    let mut rng = Lcg(0x5eed);
    for draw in 0..20 {
        let u = rng.next_rat();
        let w = rng.next_rat();
        let k = lib(stable_coeffs(u.clone(), order))?;
        let m = lib(stable_coeffs(w.clone(), order))?;
        // R(S, S, S) = S.
        let r = lib(resultant_coeffs(&k, &k, &k, order))?;
        ensure(r.seq() == k.seq(), &format!("draw {draw}: R(S,S,S) != S"))?;
        // R(K, N, M) = N for the stabilizable mean.
        let n = lib(stabilizable_coeffs(&k, &m, order))?;
        let r = lib(resultant_coeffs(&k, &n, &m, order))?;
        ensure(r.seq() == n.seq(), &format!("draw {draw}: stabilizable fixed point"))?;
        // R(K, N, M) = M for the stabilized mean.
        let m2 = lib(stabilized_coeffs(&k, &m, order))?;
        let r = lib(resultant_coeffs(&k, &m, &m2, order))?;
        ensure(r.seq() == m2.seq(), &format!("draw {draw}: stabilized fixed point"))?;
    }
    Ok(" (order 10, 20 draws)".to_string())
}

// ---------------------------------------------------------------------------
// 4. Catalog coefficients.
// ---------------------------------------------------------------------------

fn c4_catalog() -> Result<String, String> {
    // Power mean, symbolic: a1 = (r-1)/2, a2 = -(r-1)(r+1)(2r-3)/24.
    let m = lib(exact_coeffs_symbolic(Family::Power, 2))?;
    let r = v("r");
    ensure(poly_of(&m, 1) == dr(&r - &c(1), 2), "power a1")?;
    let a2 = dr(
        &(&(&r - &c(1)) * &(&r + &c(1))) * &(&r.scale(&rat_int(2)) - &c(3)),
        -24,
    );
    ensure(poly_of(&m, 2) == a2, "power a2")?;

    // Seiffert P/T and ns lists, including signs.
    let lists: [(&str, &[(i64, i64)]); 3] = [
        ("seiffert1", &[(1, 1), (-1, 6), (-17, 360), (-367, 15120)]),
        ("seiffert2", &[(1, 1), (1, 3), (-4, 45), (44, 945)]),
        ("ns", &[(1, 1), (1, 6), (-17, 360), (367, 15120)]),
    ];
    for (name, want) in lists {
        let got = lib(exact_coeffs(&spec(name), 3))?;
        ensure(got.seq() == &CoefSeq::from_pairs(want), &format!("{name} list"))?;
    }

    // Gini, symbolic a1 and a2.
    let m = lib(exact_coeffs_symbolic(Family::Gini, 2))?;
    let (p, r) = (v("p"), v("r"));
    ensure(poly_of(&m, 1) == dr(&(&p + &r) - &c(1), 2), "gini a1")?;
    let a2 = dr(
        &(&(&(&c(-3) - &p.pow(3).scale(&rat_int(2))) + &(&p.pow(2) * &(&c(3) - &r.scale(&rat_int(2)))))
            + &(&r.scale(&rat_int(2)) + &(&(&c(3) - &r.scale(&rat_int(2))) * &r.pow(2))))
            + &(&p * &(&c(2) - &(&(&(&c(-3) + &r) * &r).scale(&rat_int(2))))),
        24,
    );
    ensure(poly_of(&m, 2) == a2, "gini a2")?;

    // Stolarsky, symbolic a1 and a2.
    let m = lib(exact_coeffs_symbolic(Family::Stolarsky, 2))?;
    ensure(poly_of(&m, 1) == dr(&(&p + &r) - &c(3), 6), "stolarsky a1")?;
    let a2 = dr(
        &(&(&(&c(-45) - &p.pow(3).scale(&rat_int(2))) + &(&p.pow(2) * &(&c(5) - &r.scale(&rat_int(2)))))
            + &(&r * &(&c(10) + &(&(&c(5) - &r.scale(&rat_int(2))) * &r))))
            - &(&p.scale(&rat_int(2)) * &(&c(-5) + &(&(&c(-5) + &r) * &r))),
        360,
    );
    ensure(poly_of(&m, 2) == a2, "stolarsky a2")?;

    // Generalized logarithmic, symbolic a1 and a2.
    let m = lib(exact_coeffs_symbolic(Family::GenLog, 2))?;
    ensure(poly_of(&m, 1) == dr(&r - &c(1), 6), "genlog a1")?;
    let a2 = dr(
        &(&r - &c(1))
            * &(&(&r.pow(2).scale(&rat_int(2)) + &r.scale(&rat_int(5))) - &c(13)),
        -360,
    );
    ensure(poly_of(&m, 2) == a2, "genlog a2")?;
    Ok(String::new())
}

// ---------------------------------------------------------------------------
// 5. Oracle triangle.
// ---------------------------------------------------------------------------

fn c5_oracle_triangle() -> Result<String, String> {
    let families = [
        "power:2", "power:-2", "seiffert1", "seiffert2", "ns", "genlog:-1", "stolarsky:1,3",
    ];
    let mut ctx = FloatCtx::new(256);
    let ten = ctx.from_i64(10);
    let tol = ctx.pow_i64(&ten, -12);
    let mut slowest = 0.0f64;
    for name in families {
        let t0 = Instant::now();
        let got = lib(oracle_coeffs(&spec(name), 6, 256))?;
        let exact = lib(exact_coeffs(&spec(name), 6))?;
        for (i, g) in got.iter().enumerate() {
            let want = ctx.from_rat(exact.coeff(i));
            let err = ctx.rel_err(&want, g);
            ensure(
                ctx.cmp(&err, &tol) == std::cmp::Ordering::Less,
                &format!("{name}: a_{i} relative error above 1e-12"),
            )?;
        }
        let dt = t0.elapsed().as_secs_f64();
        slowest = slowest.max(dt);
        ensure(dt < 5.0, &format!("{name}: oracle took {dt:.2}s >= 5s"))?;
    }
    Ok(format!(" (slowest family {slowest:.2}s)"))
}

// ---------------------------------------------------------------------------
// 6. Stability classification.
// ---------------------------------------------------------------------------

fn eval_poly(p: &Poly, assigns: &[(&str, Rat)]) -> Rat {
    let map: BTreeMap<String, Rat> = assigns
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect();
    p.eval(&map).unwrap()
}

fn c6_classification() -> Result<String, String> {
    // Gini: C2 = (1/6) p r (p + r).
    let rep = lib(stability_conditions(Family::Gini, &[2]))?;
    let cond = &rep.conditions[0];
    ensure(cond.unit == rat(1, 6), "gini unit != 1/6")?;
    let mut fs: Vec<Poly> = cond.factors.iter().map(|(f, _)| f.clone()).collect();
    fs.sort_by_key(|f| format!("{f}"));
    let mut want = vec![v("p"), v("r"), &v("p") + &v("r")];
    want.sort_by_key(|f| format!("{f}"));
    ensure(fs == want, "gini factors != {p, r, p+r}")?;

    // Stolarsky: three linear factors, each vanishing on a power-mean or
    // geometric-mean embedding of the family.
    let rep = lib(stability_conditions(Family::Stolarsky, &[2]))?;
    let cond = &rep.conditions[0];
    let mult: u32 = cond.factors.iter().map(|(_, m)| m).sum();
    ensure(
        mult == 3 && cond.factors.iter().all(|(f, _)| f.total_degree() == 1),
        "stolarsky C2 is not a product of three linear factors",
    )?;
    for r0 in [rat_int(2), rat(1, 2), rat_int(-3)] {
        for (p0, q0, what) in [
            (&r0 * rat_int(2), r0.clone(), "E(2r,r) = B_r"),
            (r0.clone(), &r0 * rat_int(2), "E(p,2p) = B_p"),
            (r0.clone(), -&r0, "E(p,-p) = G"),
        ] {
            let val = eval_poly(&cond.poly, &[("p", p0), ("r", q0)]);
            ensure(val == rat_int(0), &format!("stolarsky C2 nonzero on {what}"))?;
        }
    }

    // Generalized logarithmic: C2 roots exactly {1, -1/2, -2}.
    let rep = lib(stability_conditions(Family::GenLog, &[2]))?;
    let uni = lib(rep.conditions[0].poly.to_univariate("r"))?;
    let roots = lib(meanasym::real_roots(&uni, 64))?;
    let mut got: Vec<Rat> = roots
        .into_iter()
        .map(|r| match r {
            AlgebraicRoot::Rational(x) => Ok(x),
            other => Err(format!("non-rational genlog root {other}")),
        })
        .collect::<Result<_, _>>()?;
    got.sort();
    let mut want = vec![rat_int(1), rat(-1, 2), rat_int(-2)];
    want.sort();
    ensure(got == want, "genlog roots != {1, -1/2, -2}")?;
    Ok(String::new())
}

// ---------------------------------------------------------------------------
// 7. Stabilizability disproofs.
// ---------------------------------------------------------------------------

fn c7_disproofs() -> Result<String, String> {
    let rep = lib(stabilizable_disproof(&spec("seiffert1"), 3))?;
    // u = -1/2 - 2v from the order-1 condition.
    let want_u = &Poly::constant(rat(-1, 2)) - &v("v").scale(&rat_int(2));
    ensure(rep.elimination == want_u, "elimination != -1/2 - 2v")?;
    // Minimal polynomial 8v^2 - 1 (ascending -1, 0, 8).
    let want_mp: Vec<BigInt> = [-1, 0, 8].iter().map(|&x| BigInt::from(x)).collect();
    ensure(rep.minimal_polynomial == want_mp, "minimal polynomial != 8v^2 - 1")?;
    ensure(rep.candidates.len() == 2, "expected two roots")?;
    for cand in &rep.candidates {
        match &cand.residual {
            AlgValue::Exact(s) => ensure(!s.is_rational() || s.as_rat() != Some(rat_int(0)), "zero residual")?,
            AlgValue::Approximate(_) => return Err("residual not exact".into()),
        }
    }
    ensure(rep.inconsistent, "seiffert1 disproof not inconsistent")?;

    for name in ["seiffert2", "ns"] {
        let rep = lib(stabilizable_disproof(&spec(name), 3))?;
        ensure(rep.inconsistent, &format!("{name} disproof not inconsistent"))?;
    }
    Ok(String::new())
}

// ---------------------------------------------------------------------------
// 8. Sub-stabilizability optimization.
// ---------------------------------------------------------------------------

fn c8_substab() -> Result<String, String> {
    // Seiffert P: p = 2 - 2q, q = 1 ± sqrt(2)/2, residual 1/1134, verdict ≻.
    let rep = lib(substab_optimize(&spec("seiffert1"), 3))?;
    ensure(
        rep.p_of_q == (&c(2) - &v("q").scale(&rat_int(2))),
        "P: p(q) != 2 - 2q",
    )?;
    let mut sweep_note = String::new();
    match &rep.outcome {
        SubStabOutcome::Optimal { solutions, residual, residual_order } => {
            ensure(*residual == rat(1, 1134) && *residual_order == 3, "P residual != 1/1134")?;
            let want_q = [
                QuadraticSurd::new(rat_int(1), rat(-1, 2), BigInt::from(2)),
                QuadraticSurd::new(rat_int(1), rat(1, 2), BigInt::from(2)),
            ];
            let got_q: Vec<&QuadraticSurd> = solutions.iter().map(|(_, q)| q).collect();
            ensure(
                want_q.iter().all(|w| got_q.contains(&w)),
                "P: q roots != 1 ± sqrt(2)/2",
            )?;
        }
        SubStabOutcome::Constraint { .. } => return Err("P: expected optimal outcome".into()),
    }
    ensure(rep.sweep.iter().all(|f| f.nonnegative), "P sweep went negative")?;
    for f in &rep.sweep {
        sweep_note.push_str(&format!(" sweep min[P, q={}] = {};", f.q, f.min));
    }

    // Neuman–Sándor: p = 4 - 2q, q = 2 ± sqrt(7)/2, residual 79/3780.
    let rep = lib(substab_optimize(&spec("ns"), 3))?;
    ensure(
        rep.p_of_q == (&c(4) - &v("q").scale(&rat_int(2))),
        "NS: p(q) != 4 - 2q",
    )?;
    match &rep.outcome {
        SubStabOutcome::Optimal { solutions, residual, .. } => {
            ensure(*residual == rat(79, 3780), "NS residual != 79/3780")?;
            let want_q = [
                QuadraticSurd::new(rat_int(2), rat(-1, 2), BigInt::from(7)),
                QuadraticSurd::new(rat_int(2), rat(1, 2), BigInt::from(7)),
            ];
            let got_q: Vec<&QuadraticSurd> = solutions.iter().map(|(_, q)| q).collect();
            ensure(
                want_q.iter().all(|w| got_q.contains(&w)),
                "NS: q roots != 2 ± sqrt(7)/2",
            )?;
        }
        SubStabOutcome::Constraint { .. } => return Err("NS: expected optimal outcome".into()),
    }

    // Seiffert T: no admissible double zero; sign constraint |10q - 25| >= sqrt(185).
    let rep = lib(substab_optimize(&spec("seiffert2"), 3))?;
    match &rep.outcome {
        SubStabOutcome::Constraint { description } => ensure(
            description == "|10*q - 25| >= sqrt(185)",
            &format!("T constraint mismatch: {description}"),
        )?,
        SubStabOutcome::Optimal { .. } => return Err("T: expected constraint outcome".into()),
    }
    Ok(sweep_note)
}

// ---------------------------------------------------------------------------
// 9. Simultaneity conditions.
// ---------------------------------------------------------------------------

fn c9_simultaneity() -> Result<String, String> {
    let rep = lib(simultaneous_conditions(SimultaneousCase::StabilizedSwap, 5))?;
    let cond = rep
        .conditions
        .iter()
        .find(|c| c.order == 2)
        .ok_or("no order-2 condition")?;
    // C2 = -(1/8)(k1 - n1)(1 + k1 + n1)^2.
    ensure(cond.unit == rat(-1, 8), "unit != -1/8")?;
    let diff = &v("k1") - &v("n1");
    let sum1 = &(&c(1) + &v("k1")) + &v("n1");
    ensure(
        cond.factors.contains(&(diff, 1)) && cond.factors.contains(&(sum1, 2)),
        "factors != (k1 - n1)(1 + k1 + n1)^2",
    )?;

    // Branch k1 + n1 = -1: geometric-mean coefficients.
    let geo = [rat_int(1), rat(-1, 2), rat(-1, 8), rat(-1, 16), rat(-5, 128), rat(-7, 256)];
    let branch = rep
        .branches
        .iter()
        .find(|b| {
            b.coefficients
                .iter()
                .zip(geo.iter())
                .all(|(c, w)| c.as_rat().as_ref() == Some(w))
                && b.coefficients.len() == geo.len()
        })
        .ok_or("no branch with the geometric-mean coefficients")?;
    ensure(
        branch.value == (&Poly::constant(rat_int(-1)) - &v("k1")),
        "geometric branch is not k1 + n1 = -1",
    )?;
    Ok(String::new())
}

// ---------------------------------------------------------------------------
// 10. Functional-equation residuals.
// ---------------------------------------------------------------------------

fn c10_functional_equations() -> Result<String, String> {
    let grid: Vec<(Rat, Rat)> = [(1, 2), (1, 4), (3, 7), (1, 100)]
        .iter()
        .map(|&(a, b)| (rat_int(a), rat_int(b)))
        .collect();
    let mut ctx = FloatCtx::new(128);
    let ten = ctx.from_i64(10);
    let tol = ctx.pow_i64(&ten, -25);
    let (a, g, h, l) = ("power:1", "power:0", "power:-1", "logarithmic");
    let cases: Vec<(&str, &str, &str, Relation, String)> = vec![
        (a, l, g, Relation::Stabilizable, "L is (A,G)-stabilizable".into()),
        (h, l, a, Relation::Stabilizable, "L is (H,A)-stabilizable".into()),
        (a, h, g, Relation::Stabilized, "G is (A,H)-stabilized".into()),
        (h, a, g, Relation::Stabilized, "G is (H,A)-stabilized".into()),
    ];
    let mut cases = cases;
    for r in ["-2", "0", "1/2", "3"] {
        let br = format!("power:{r}");
        cases.push((
            Box::leak(br.clone().into_boxed_str()),
            Box::leak(br.clone().into_boxed_str()),
            Box::leak(br.into_boxed_str()),
            Relation::Stable,
            format!("B_{r} is stable"),
        ));
    }
    for (k, n, m, rel, what) in cases {
        let res = lib(functional_eq_residual(
            &spec(k),
            &spec(n),
            &spec(m),
            rel,
            &grid,
            128,
        ))?;
        ensure(
            ctx.cmp(&res, &tol) == std::cmp::Ordering::Less,
            &format!("{what}: residual above 1e-25"),
        )?;
    }
    Ok(String::new())
}
