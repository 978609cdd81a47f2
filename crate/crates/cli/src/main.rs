//! Command-line surface over the expansion and analysis library:
//! deterministic text, JSON, and LaTeX output for coefficient expansions,
//! stability verdicts, disproofs, parameter optimization, and numeric
//! verification. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use meanasym::analysis::{
    asym_compare, compound_mean, factor_condition, functional_eq_residual, is_stable,
    simultaneous_conditions, stability_conditions, stabilizable_disproof, substab_optimize,
    Relation, Report, SimultaneousCase,
};
use meanasym::catalog::{exact_coeffs, Family, MeanSpec};
use meanasym::expansion::{
    resultant_coeffs, stabilizable_coeffs, stabilized_coeffs, stable_coeffs, MeanCoeffs,
};
use meanasym::poly::Poly;
use meanasym::rational::{parse_rat, Rat};
use meanasym::scalar::Scalar;
use meanasym::{Error, FloatCtx};

#[derive(Parser)]
#[command(name = "meanasym", version, about = "Asymptotic expansions and stability analysis of bivariate symmetric means")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Working precision in bits for numeric subcommands.
    #[arg(long, global = true, default_value_t = 192)]
    precision: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Args)]
struct OrderArg {
    /// Maximum coefficient index.
    #[arg(long, default_value_t = 4)]
    order: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Exact expansion coefficients of a catalog mean.
    Expand {
        /// Mean spec, e.g. "seiffert1", "power:2", "stolarsky:1,-1".
        #[arg(long)]
        mean: MeanSpec,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Stable-mean coefficients from the first coefficient a1.
    Stable {
        /// Rational a1 (e.g. "-1/2") or the literal "symbolic".
        #[arg(long, allow_hyphen_values = true)]
        a1: String,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Coefficients of the (K,M)-stabilizable mean N.
    Stabilizable {
        #[arg(long)]
        k: MeanSpec,
        #[arg(long)]
        m: MeanSpec,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Coefficients of the (K,N)-stabilized mean M.
    Stabilized {
        #[arg(long)]
        k: MeanSpec,
        #[arg(long)]
        n: MeanSpec,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Coefficients of the resultant mean-map R(K, N, M).
    Resultant {
        #[arg(long)]
        k: MeanSpec,
        #[arg(long)]
        n: MeanSpec,
        #[arg(long)]
        m: MeanSpec,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Stability test of a concrete mean, or the symbolic stability
    /// conditions of a parametric family.
    CheckStability {
        /// Concrete mean spec to test termwise against the stable recursion.
        #[arg(long, conflicts_with = "family")]
        mean: Option<MeanSpec>,
        /// Parametric family (gini, stolarsky, genlog) for symbolic conditions.
        #[arg(long)]
        family: Option<String>,
        /// Maximum coefficient index (termwise test) or condition order.
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Stabilizability disproof for a target mean.
    Disprove {
        #[arg(long)]
        target: MeanSpec,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Optimal (B_p, B_q)-sub-stabilizability parameters for a target mean.
    Substab {
        #[arg(long)]
        target: MeanSpec,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Asymptotic comparison of two means, or of a mean against R(K, N, M).
    Compare {
        /// Left-hand mean.
        #[arg(long)]
        mean: MeanSpec,
        /// Right-hand mean for a direct comparison.
        #[arg(long, required_unless_present = "k", conflicts_with_all = ["k", "n"])]
        m: Option<MeanSpec>,
        /// With --n and --m2: compare against the resultant R(K, N, M).
        #[arg(long, requires_all = ["n", "m2"])]
        k: Option<MeanSpec>,
        #[arg(long)]
        n: Option<MeanSpec>,
        /// Right stable mean of the resultant form.
        #[arg(long)]
        m2: Option<MeanSpec>,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Numeric residual of a defining functional equation on the standard
    /// grid (1,2), (1,4), (3,7), (1,100).
    Verify {
        #[arg(long)]
        k: MeanSpec,
        #[arg(long)]
        n: MeanSpec,
        #[arg(long)]
        m: MeanSpec,
        #[arg(long, value_enum)]
        relation: RelationArg,
    },
    /// Gauss compound mean K ⊗ N by iteration.
    Compound {
        #[arg(long)]
        k: MeanSpec,
        #[arg(long)]
        n: MeanSpec,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Necessary conditions for the simultaneity cases.
    Simultaneous {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long, default_value_t = 5)]
        order: usize,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum RelationArg {
    Stable,
    Stabilizable,
    Stabilized,
}

impl From<RelationArg> for Relation {
    fn from(r: RelationArg) -> Relation {
        match r {
            RelationArg::Stable => Relation::Stable,
            RelationArg::Stabilizable => Relation::Stabilizable,
            RelationArg::Stabilized => Relation::Stabilized,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum CaseArg {
    StabilizableSwap,
    StabilizedSwap,
    StabilizableAndStabilized,
}

impl From<CaseArg> for SimultaneousCase {
    fn from(c: CaseArg) -> SimultaneousCase {
        match c {
            CaseArg::StabilizableSwap => SimultaneousCase::StabilizableSwap,
            CaseArg::StabilizedSwap => SimultaneousCase::StabilizedSwap,
            CaseArg::StabilizableAndStabilized => SimultaneousCase::StabilizableAndStabilized,
        }
    }
}

/// Serializable output of every subcommand: a coefficient list, a report,
/// or numeric values — always under one stable schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
struct Output {
    schema_version: u32,
    command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    label: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    coefficients: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    report: Option<Report>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    values: Vec<String>,
}

impl Output {
    fn new(command: &str) -> Self {
        Output {
            schema_version: 1,
            command: command.to_string(),
            ..Output::default()
        }
    }

    fn with_coeffs<T: meanasym::Coeff + std::fmt::Display>(mut self, c: &MeanCoeffs<T>) -> Self {
        self.label = Some(c.label().to_string());
        self.coefficients = (0..=c.order()).map(|i| format!("{}", c.coeff(i))).collect();
        self
    }

    fn with_report(mut self, r: Report) -> Self {
        self.report = Some(r);
        self
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{}", render(&out, cli.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Expand { mean, order } => {
            let c = exact_coeffs(mean, order.order)?;
            Ok(Output::new("expand").with_coeffs(&c))
        }
        Command::Stable { a1, order } => {
            let a1 = if a1 == "symbolic" {
                Scalar::var("a1")
            } else {
                Scalar::from_rat(parse_rat(a1)?)
            };
            let c = stable_coeffs(a1, order.order)?;
            Ok(Output::new("stable").with_coeffs(&c))
        }
        Command::Stabilizable { k, m, order } => {
            let kc = exact_coeffs(k, order.order)?;
            let mc = exact_coeffs(m, order.order)?;
            let c = stabilizable_coeffs(&kc, &mc, order.order)?;
            Ok(Output::new("stabilizable").with_coeffs(&c))
        }
        Command::Stabilized { k, n, order } => {
            let kc = exact_coeffs(k, order.order)?;
            let nc = exact_coeffs(n, order.order)?;
            let c = stabilized_coeffs(&kc, &nc, order.order)?;
            Ok(Output::new("stabilized").with_coeffs(&c))
        }
        Command::Resultant { k, n, m, order } => {
            let kc = exact_coeffs(k, order.order)?;
            let nc = exact_coeffs(n, order.order)?;
            let mc = exact_coeffs(m, order.order)?;
            let c = resultant_coeffs(&kc, &nc, &mc, order.order)?;
            Ok(Output::new("resultant").with_coeffs(&c))
        }
        Command::CheckStability {
            mean,
            family,
            order,
        } => match (mean, family) {
            (Some(spec), None) => {
                let (stable, first_fail) = is_stable(spec, *order)?;
                let verdict = if stable {
                    format!("{spec} is stable to order {order} (necessary condition)")
                } else {
                    format!(
                        "{spec} is not stable: first failing index {}",
                        first_fail.unwrap()
                    )
                };
                Ok(Output::new("check-stability").with_report(Report {
                    verdict,
                    ..Report::default()
                }))
            }
            (None, Some(fam)) => {
                let fam = Family::from_name(fam)
                    .ok_or_else(|| Error::Parse(format!("unknown family: {fam}")))?;
                let orders: Vec<usize> = (2..=(*order).max(2)).collect();
                let rep = stability_conditions(fam, &orders)?;
                Ok(Output::new("check-stability").with_report(rep.to_report()))
            }
            _ => Err(Error::Parse(
                "check-stability needs exactly one of --mean or --family".into(),
            )),
        },
        Command::Disprove { target, order } => {
            let rep = stabilizable_disproof(target, *order)?;
            Ok(Output::new("disprove").with_report(rep.to_report()))
        }
        Command::Substab { target, order } => {
            let rep = substab_optimize(target, *order)?;
            Ok(Output::new("substab").with_report(rep.to_report()))
        }
        Command::Compare {
            mean,
            m,
            k,
            n,
            m2,
            order,
        } => {
            let a = exact_coeffs(mean, *order)?.to_symbolic();
            let b = match (m, k) {
                (Some(other), None) => exact_coeffs(other, *order)?.to_symbolic(),
                (None, Some(k)) => {
                    let kc = exact_coeffs(k, *order)?;
                    let nc = exact_coeffs(n.as_ref().unwrap(), *order)?;
                    let mc = exact_coeffs(m2.as_ref().unwrap(), *order)?;
                    resultant_coeffs(&kc, &nc, &mc, *order)?.to_symbolic()
                }
                _ => {
                    return Err(Error::Parse(
                        "compare needs --m, or the triple --k/--n/--m2".into(),
                    ))
                }
            };
            let res = asym_compare(&a, &b, *order)?;
            Ok(Output::new("compare").with_report(res.to_report(a.label(), b.label())))
        }
        Command::Verify { k, n, m, relation } => {
            let grid = standard_grid();
            let r = functional_eq_residual(k, n, m, (*relation).into(), &grid, cli.precision)?;
            let mut ctx = FloatCtx::new(cli.precision);
            let mut out = Output::new("verify");
            out.values = vec![ctx.to_decimal_string(&r)];
            out.label = Some(format!("max relative residual of the {} equation", {
                match relation {
                    RelationArg::Stable => "stable",
                    RelationArg::Stabilizable => "stabilizable",
                    RelationArg::Stabilized => "stabilized",
                }
            }));
            Ok(out)
        }
        Command::Compound { k, n, s, t } => {
            let sv = parse_rat(s)?;
            let tv = parse_rat(t)?;
            let v = compound_mean(k, n, &sv, &tv, cli.precision)?;
            let mut ctx = FloatCtx::new(cli.precision);
            let mut out = Output::new("compound");
            out.values = vec![ctx.to_decimal_string(&v)];
            out.label = Some(format!("{k} ⊗ {n} at ({s}, {t})"));
            Ok(out)
        }
        Command::Simultaneous { case, order } => {
            let rep = simultaneous_conditions((*case).into(), *order)?;
            Ok(Output::new("simultaneous").with_report(rep.to_report()))
        }
    }
}

fn standard_grid() -> Vec<(Rat, Rat)> {
    [(1, 2), (1, 4), (3, 7), (1, 100)]
        .into_iter()
        .map(|(a, b)| (Rat::from_integer(a.into()), Rat::from_integer(b.into())))
        .collect()
}

// ---------------------------------------------------------------------------
// Rendering.
// ---------------------------------------------------------------------------

fn render(out: &Output, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(out).expect("serializable output"),
        Format::Text => render_text(out),
        Format::Latex => render_latex(out),
    }
}

fn render_text(out: &Output) -> String {
    let mut lines = Vec::new();
    if !out.coefficients.is_empty() {
        lines.push(out.coefficients.join(", "));
    }
    if let Some(rep) = &out.report {
        lines.push(rep.verdict.clone());
        for c in &rep.conditions {
            let factored = if c.factors.is_empty() {
                String::new()
            } else {
                let parts: Vec<String> = c
                    .factors
                    .iter()
                    .map(|f| {
                        // multi-term factors need parentheses in a product
                        if f.contains(' ') && !f.starts_with('(') {
                            format!("({f})")
                        } else {
                            f.clone()
                        }
                    })
                    .collect();
                format!(" = {}", parts.join(" * "))
            };
            lines.push(format!("C_{} = {}{}", c.order, c.polynomial, factored));
        }
        for s in &rep.solutions {
            lines.push(format!("solution: p = {}, q = {} [{}]", s.p, s.q, s.representation));
        }
        for r in &rep.residuals {
            lines.push(format!("residual at order {}: {}", r.order, r.value));
        }
    }
    if !out.values.is_empty() {
        if let Some(label) = &out.label {
            if out.coefficients.is_empty() {
                lines.push(label.clone());
            }
        }
        lines.extend(out.values.iter().cloned());
    }
    lines.join("\n")
}

fn render_latex(out: &Output) -> String {
    let mut lines = Vec::new();
    for (i, c) in out.coefficients.iter().enumerate() {
        lines.push(format!("a_{{{i}}} = {}", latex_value(c)));
    }
    if let Some(rep) = &out.report {
        lines.push(format!("\\text{{{}}}", rep.verdict));
        for c in &rep.conditions {
            let rhs = if c.factors.is_empty() {
                latex_value(&c.polynomial)
            } else {
                c.factors
                    .iter()
                    .map(|f| latex_value(f))
                    .collect::<Vec<_>>()
                    .join(" \\, ")
            };
            lines.push(format!("C_{{{}}} = {rhs}", c.order));
        }
        for r in &rep.residuals {
            lines.push(format!(
                "\\text{{residual}}_{{{}}} = {}",
                r.order,
                latex_value(&r.value)
            ));
        }
    }
    for v in &out.values {
        lines.push(latex_value(v));
    }
    lines.join("\n")
}

/// Best-effort conversion of the canonical text renderings into LaTeX math:
/// exact rationals become \tfrac, symbolic coefficients are re-factored into
/// the paper's product style when the small-factor search succeeds.
fn latex_value(s: &str) -> String {
    if let Ok(r) = parse_rat(s) {
        return latex_rat(&r);
    }
    if let Ok(p) = parse_poly_display(s) {
        let (unit, factors) = factor_condition(&p);
        if !factors.is_empty() && factors.iter().all(|(f, _)| f.total_degree() <= 1) {
            let mut parts = Vec::new();
            if unit != Rat::from_integer(1.into()) {
                parts.push(latex_rat(&unit));
            }
            for (f, m) in &factors {
                let inner = latex_poly_atom(f);
                parts.push(if *m == 1 {
                    inner
                } else {
                    format!("{inner}^{{{m}}}")
                });
            }
            return parts.join(" ");
        }
    }
    latex_symbols(s)
}

fn latex_rat(r: &Rat) -> String {
    use num_traits::{One, Signed};
    if r.denom().is_one() {
        r.numer().to_string()
    } else if r.is_negative() {
        format!("-\\tfrac{{{}}}{{{}}}", r.numer().abs(), r.denom())
    } else {
        format!("\\tfrac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn latex_poly_atom(p: &Poly) -> String {
    let s = latex_symbols(&format!("{p}"));
    if p.terms().count() > 1 {
        format!("({s})")
    } else {
        s
    }
}

/// Canonical display → LaTeX-ish math: drop '*', subscript the known
/// variable names.
fn latex_symbols(s: &str) -> String {
    s.replace("a1", "a_1")
        .replace("k1", "a_1^K")
        .replace("n1", "a_1^N")
        .replace("m1", "a_1^M")
        .replace('*', " ")
}

/// Parses the expanded monomial display of Poly back into a Poly; used only
/// to re-factor coefficients for LaTeX output, so it handles exactly the
/// shape the display produces: terms "c*v^e*w" joined by " + " / " - ".
fn parse_poly_display(s: &str) -> Result<Poly, Error> {
    let mut acc = Poly::zero();
    let mut rest = s.trim();
    let mut sign = 1i64;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1;
        rest = r.trim_start();
    }
    loop {
        let term_end = rest
            .find(" + ")
            .into_iter()
            .chain(rest.find(" - "))
            .min()
            .unwrap_or(rest.len());
        let (term, tail) = rest.split_at(term_end);
        let mut p = Poly::constant(Rat::from_integer(sign.into()));
        for part in term.trim().split('*') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::Parse(format!("bad term in '{s}'")));
            }
            if part.chars().next().unwrap().is_ascii_alphabetic() {
                let (var, exp) = match part.split_once('^') {
                    Some((v, e)) => (
                        v,
                        e.parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad exponent in '{s}'")))?,
                    ),
                    None => (part, 1),
                };
                p = p.mul(&Poly::var(var).pow(exp));
            } else {
                p = p.scale(&parse_rat(part)?);
            }
        }
        acc = acc.add(&p);
        if tail.is_empty() {
            return Ok(acc);
        }
        sign = if tail.starts_with(" - ") { -1 } else { 1 };
        rest = tail[3..].trim_start();
    }
}
