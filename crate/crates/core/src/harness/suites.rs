//! Named verification suites. Each maps to one fixed set of laws; `all`
//! runs every suite and merges the reports.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde_json::{json, Value as Json};

use super::cauchy::{cauchy_family_check, default_grid, CauchySpec};
use super::continuity::{check_continuity, SequenceSpec};
use super::family::{family_eval, FamilyParams, Variant};
use super::input::{Input, InputClass};
use super::laws::{check_affine, check_law, check_laws, check_sln, check_valuation, probe, random_input, CheckConfig};
use super::report::{LawAccumulator, LawReport, ValuationReport};
use super::transform::{AffineLaw, Combine, Evaluator, Transform};
use crate::duality::{dualize, DualParams, DualVariant, TransformHandle};
use crate::error::{Error, Result};
use crate::expint::ExpPolyDensity;
use crate::function::fixtures::{self, random_nonzero_vector, random_rat, random_vector, FixtureRng};
use crate::function::{LogConcaveFn, PLConvexS};
use crate::geom::Polytope;
use crate::rat::{rat, ratio, sqrt_upper, Rat, Vector};
use crate::real::{Ball, Prec};
use crate::transforms::{
    finiteness_bound_lower, laplace_logconcave, laplace_polytope, laplace_polytope_profile, legendre_f, legendre_s,
    integral_representation, ZetaSpec,
};
use crate::value::{residual, Value};

/// Suite names accepted by [`run_suite`]; `all` runs each of them.
pub const SUITES: [&str; 17] = [
    "legendre-thm11",
    "logpolar-thm12",
    "laplace-thm13",
    "thm41",
    "thm42",
    "thm52",
    "thm59",
    "duality-thm61-64",
    "dlist",
    "laplace-dlist",
    "cauchy",
    "continuity",
    "weird-counterexample",
    "fubini",
    "laplace-bound",
    "gradient",
    "lemma45",
];

/// Tolerance of the log-translation law of the exponential polytope family.
pub const THM42_TOL: f64 = 1e-12;

/// Agreement demanded between the two exact Laplace routes.
pub const FUBINI_TOL: f64 = 1e-12;

/// Absolute error allowed for the finite-difference gradient.
pub const GRADIENT_TOL: f64 = 1e-6;

/// Step of the central differences.
pub fn gradient_step() -> Rat {
    ratio(1, 10_000)
}

/// Run parameters shared by all suites; `None` picks the suite default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub dim: usize,
    pub seed: u64,
    pub count: Option<usize>,
    pub tol: Option<f64>,
    pub prec: Prec,
}

impl SuiteConfig {
    pub fn new(dim: usize, seed: u64) -> Self {
        SuiteConfig { dim, seed, count: None, tol: None, prec: Prec::default() }
    }

    pub fn check(&self, default_count: usize) -> CheckConfig {
        self.check_tol(default_count, super::laws::DEFAULT_TOL)
    }

    fn check_tol(&self, default_count: usize, default_tol: f64) -> CheckConfig {
        let mut c = CheckConfig::new(self.dim, self.seed, self.count.unwrap_or(default_count));
        c.tol = self.tol.unwrap_or(default_tol);
        c.prec = self.prec;
        c
    }
}

/// Runs a named suite.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<ValuationReport> {
    if !(1..=4).contains(&cfg.dim) {
        return Err(Error::Input(format!("dimension {} outside 1..=4", cfg.dim)));
    }
    let mut report = match name {
        "legendre-thm11" => legendre_thm11(cfg),
        "logpolar-thm12" => logpolar_thm12(cfg),
        "laplace-thm13" => laplace_thm13(cfg),
        "thm41" => thm41(cfg),
        "thm42" => thm42(cfg),
        "thm52" => thm52(cfg),
        "thm59" => thm59(cfg),
        "duality-thm61-64" => duality(cfg),
        "dlist" => dlist(cfg),
        "laplace-dlist" => laplace_dlist(cfg),
        "cauchy" => cauchy(cfg),
        "continuity" => continuity(cfg),
        "weird-counterexample" => weird(cfg),
        "fubini" => fubini(cfg),
        "laplace-bound" => laplace_bound(cfg),
        "gradient" => gradient(cfg),
        "lemma45" => lemma45(cfg),
        "all" => {
            let mut out: Option<ValuationReport> = None;
            for s in SUITES {
                let r = run_suite(s, cfg)?;
                out = Some(match out {
                    None => r,
                    Some(acc) => acc.merge(&r),
                });
            }
            let mut r = out.expect("nonempty suite list");
            r.suite = "all".into();
            return Ok(r);
        }
        other => return Err(Error::Input(format!("unknown suite {other:?}; expected one of {} or all", SUITES.join(", ")))),
    }?;
    report.suite = name.into();
    report.seed = cfg.seed;
    Ok(report)
}

/// One comparison produced by a fixture.
pub enum Check {
    Pair { lhs: Value, rhs: Value, ctx: Json },
    Holds { ok: bool, ctx: Json },
}

impl Check {
    fn pair(lhs: Value, rhs: Value, ctx: Json) -> Self {
        Check::Pair { lhs, rhs, ctx }
    }
}

fn with_sides(mut ctx: Json, lhs: &Value, rhs: &Value, prec: Prec) -> Json {
    if let Json::Object(m) = &mut ctx {
        m.insert("lhs".into(), serde_json::to_value(lhs.to_json(prec)).expect("serializable"));
        m.insert("rhs".into(), serde_json::to_value(rhs.to_json(prec)).expect("serializable"));
    }
    ctx
}

/// Runs `f` on `cfg.count` fixtures, each with its own sub-stream.
pub fn run_law(
    name: &str,
    class: &str,
    cfg: &CheckConfig,
    mut f: impl FnMut(&mut FixtureRng) -> Result<Vec<Check>>,
) -> LawReport {
    let mut acc = LawAccumulator::new(name, class, cfg.tol);
    for i in 0..cfg.count {
        let mut rng = cfg.rng(name, i);
        match f(&mut rng) {
            Ok(checks) => {
                for c in checks {
                    match c {
                        Check::Pair { lhs, rhs, ctx } => {
                            acc.record(residual(&lhs, &rhs, cfg.prec), || with_sides(ctx, &lhs, &rhs, cfg.prec))
                        }
                        Check::Holds { ok, ctx } => acc.record_bool(ok, || ctx),
                    }
                }
            }
            Err(e) => acc.record_error(&e, || json!({ "fixture": i })),
        }
    }
    acc.finish()
}

fn probes(rng: &mut FixtureRng, cfg: &CheckConfig, punctured: bool) -> Vec<Vector> {
    (0..cfg.probes).map(|_| probe(rng, cfg.dim, punctured)).collect()
}

fn renamed(mut l: LawReport, name: &str) -> LawReport {
    l.name = name.into();
    l
}

fn report(suite: &str, cfg: &CheckConfig, laws: Vec<LawReport>) -> ValuationReport {
    let mut r = ValuationReport::new(suite, cfg.seed);
    r.fixtures = cfg.count as u64;
    for l in laws {
        r.push(l);
    }
    r
}

fn merge_all(reports: Vec<ValuationReport>) -> ValuationReport {
    let mut it = reports.into_iter();
    let first = it.next().expect("at least one report");
    it.fold(first, |acc, r| acc.merge(&r))
}

fn continuity_all(e: &dyn Evaluator, cfg: &CheckConfig, specs: &[SequenceSpec]) -> Vec<ValuationReport> {
    specs.iter().map(|&s| check_continuity(e, s, cfg)).collect()
}

fn family(variant: Variant, c: &[Rat], sigma: Rat, eps: Rat) -> Result<Transform> {
    Ok(Transform::family(FamilyParams::new(variant, c, sigma, eps)?))
}

// ---------------------------------------------------------------------------
// characterization premises

fn legendre_thm11(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(100);
    let t = Transform::legendre();
    let mut reports = vec![check_laws("legendre-thm11", &t, &c)];
    let cc = cfg.check(10);
    reports.extend(continuity_all(&t, &cc, &SequenceSpec::ALL));
    // the additive constant of a conforming transform is its value on ι_{0}
    let point = Input::S(PLConvexS::indicator(&Polytope::point(Vector::zeros(cfg.dim)))?);
    let probe_law = run_law("legendre/constant_probe", "S", &c, |rng| {
        probes(rng, &c, false)
            .into_iter()
            .map(|x| Ok(Check::pair(t.eval(&point, &x, c.prec)?, Value::zero(), json!({ "x": x }))))
            .collect()
    });
    reports.push(report("legendre-thm11", &c, vec![probe_law]));
    Ok(merge_all(reports))
}

fn logpolar_thm12(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(50);
    let t = Transform::polar();
    let mut reports = vec![check_laws("logpolar-thm12", &t, &c)];
    reports.extend(continuity_all(&t, &cfg.check(10), &SequenceSpec::ALL));
    Ok(merge_all(reports))
}

/// `(c₁, c₂)` settings of the Laplace family.
pub fn thm13_settings() -> Vec<(Rat, Rat)> {
    vec![(rat(1), rat(0)), (rat(0), rat(1)), (rat(2), rat(-1))]
}

fn laplace_thm13(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(30);
    let mut reports = Vec::new();
    for (c1, c2) in thm13_settings() {
        let t = family(Variant::Thm13, &[c1, c2], rat(1), rat(1))?;
        reports.push(check_laws("laplace-thm13", &t, &c));
    }
    reports.extend(continuity_all(&Transform::laplace(), &cfg.check(10), &SequenceSpec::ALL));
    Ok(merge_all(reports))
}

/// Constant vectors `(c₁, …, c₅)` of the translation covariant family.
pub fn thm41_settings() -> Vec<[i64; 5]> {
    vec![[1, 0, 0, 0, 2], [0, 1, 0, 0, 0], [1, -2, 3, 1, 2], [0, 0, 1, -1, -3], [2, 2, -1, 5, 1]]
}

fn thm41(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(100);
    let mut reports = Vec::new();
    for cs in thm41_settings() {
        reports.push(check_laws("thm41", &Transform::family(FamilyParams::simple(Variant::Thm41, &cs)), &c));
    }
    Ok(merge_all(reports))
}

/// Values of `σ` for the log-translation covariant family.
pub fn thm42_sigmas() -> Vec<Rat> {
    vec![rat(1), rat(-1), rat(2), rat(-2), ratio(1, 2)]
}

fn thm42(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check_tol(100, THM42_TOL);
    let mut reports = Vec::new();
    for s in thm42_sigmas() {
        let t = family(Variant::Thm42, &[rat(1), rat(-1), rat(2)], s, rat(1))?;
        reports.push(check_laws("thm42", &t, &c));
    }
    Ok(merge_all(reports))
}

/// `(ε, σ)` settings; at `ε = 0` the family is `c'δ + c` and the
/// translation law forces `σ = 0`.
pub fn thm52_settings() -> Vec<(Rat, Rat)> {
    vec![(rat(1), rat(1)), (rat(2), rat(-1)), (rat(-1), rat(2)), (ratio(-1, 2), rat(-3)), (rat(0), rat(0))]
}

fn thm52(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(50);
    let mut reports = Vec::new();
    for (eps, sigma) in thm52_settings() {
        let t = family(Variant::Thm52, &[rat(1), rat(3)], sigma, eps)?;
        reports.push(check_laws("thm52", &t, &c));
    }
    Ok(merge_all(reports))
}

/// `(ε, σ, c₂)`: `εσ > 0` with both terms, `εσ < 0` with `c₂ = 0`.
pub fn thm59_settings() -> Vec<(Rat, Rat, Rat)> {
    vec![
        (rat(1), rat(1), rat(2)),
        (rat(-1), rat(-2), rat(1)),
        (ratio(1, 2), rat(2), rat(-1)),
        (rat(1), rat(-1), rat(0)),
        (rat(-2), ratio(1, 2), rat(0)),
    ]
}

fn thm59(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(30);
    let mut reports = Vec::new();
    for (eps, sigma, c2) in thm59_settings() {
        let t = family(Variant::Thm59, &[rat(1), c2], sigma, eps)?;
        reports.push(check_laws("thm59", &t, &c));
    }
    Ok(merge_all(reports))
}

fn weird(cfg: &SuiteConfig) -> Result<ValuationReport> {
    Ok(check_laws("weird-counterexample", &Transform::weird(), &cfg.check(30)))
}

// ---------------------------------------------------------------------------
// duality

fn duality(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(30);
    let mut reports = Vec::new();

    // dualized Legendre is the identity with c = 0
    let dl = dualize(&TransformHandle::new(Transform::legendre()))?;
    let id = run_law("thm61/dualized_legendre_is_identity", "F", &c, |rng| {
        let u = fixtures::random_f(rng, c.dim);
        probes(rng, &c, false)
            .into_iter()
            .map(|x| {
                let v = dl.eval(&Input::F(u.clone()), &x, c.prec)?;
                Ok(Check::pair(v, Value::rational(u.eval(&x)), json!({ "u": u, "x": x })))
            })
            .collect()
    });

    // the closed-form dual families against the dualized originals
    let mut cross = vec![id];
    let pairs: Vec<(&str, TransformHandle, Transform)> = vec![
        (
            "thm61/closed_form_vs_dualized",
            dualize(&TransformHandle::new(family(Variant::Thm52, &[rat(3)], rat(1), rat(1))?))?,
            Transform::Dual(DualParams::new(DualVariant::IdC, rat(3), rat(0))),
        ),
        (
            "thm63/closed_form_vs_dualized",
            dualize(&TransformHandle::new(family(Variant::Polar, &[rat(2)], rat(1), rat(1))?))?,
            Transform::Dual(DualParams::new(DualVariant::ScaleC, rat(2), rat(0))),
        ),
        (
            "thm64/closed_form_vs_dualized",
            dualize(&TransformHandle::new(family(Variant::Thm13, &[rat(2), rat(-1)], rat(1), rat(1))?))?,
            Transform::Dual(DualParams::new(DualVariant::Mix, rat(2), rat(-1))),
        ),
    ];
    for (name, dualized, closed) in &pairs {
        let class = closed.input_class();
        cross.push(run_law(name, &class.to_string(), &c, |rng| {
            let u = random_input(class, rng, c.dim);
            probes(rng, &c, false)
                .into_iter()
                .map(|x| {
                    let a = dualized.eval(&u, &x, c.prec)?;
                    let b = closed.eval(&u, &x, c.prec)?;
                    Ok(Check::pair(a, b, json!({ "input": u.to_json(), "x": x })))
                })
                .collect()
        }));
    }

    // Φ*(u*) = Φ(u), and dualizing twice returns Φ
    let shipped = shipped_transforms()?;
    for t in &shipped {
        let h = TransformHandle::new(t.clone());
        let d = dualize(&h)?;
        let class = t.input_class();
        let name = format!("{}/bridge", t.id());
        cross.push(run_law(&name, &class.to_string(), &c, |rng| {
            let u = h.prepare(random_input(class, rng, c.dim));
            let ud = crate::duality::dual_input(&u)?;
            let dd = dualize(&d)?;
            probes(rng, &c, h.punctured())
                .into_iter()
                .map(|x| {
                    let a = h.eval(&u, &x, c.prec)?;
                    let b = d.eval(&ud, &x, c.prec)?;
                    let back = dd.eval(&u, &x, c.prec)?;
                    Ok(vec![
                        Check::pair(a.clone(), b, json!({ "input": u.to_json(), "x": x, "route": "dual" })),
                        Check::pair(a, back, json!({ "input": u.to_json(), "x": x, "route": "involution" })),
                    ])
                })
                .collect::<Result<Vec<_>>>()
                .map(|v| v.into_iter().flatten().collect())
        }));
    }
    reports.push(report("duality-thm61-64", &c, cross));

    // law transport: the dual of each conforming transform obeys the dual laws
    for t in [Transform::legendre(), Transform::polar(), family(Variant::Thm13, &[rat(1), rat(1)], rat(1), rat(1))?] {
        reports.push(check_laws("duality-thm61-64", &dualize(&TransformHandle::new(t))?, &c));
    }
    // and the closed-form families obey them directly
    for p in [
        DualParams::new(DualVariant::IdC, rat(3), rat(0)),
        DualParams::new(DualVariant::ScaleC, rat(2), rat(0)),
        DualParams::new(DualVariant::Mix, rat(2), rat(-1)),
    ] {
        reports.push(check_laws("duality-thm61-64", &Transform::Dual(p), &c));
    }
    Ok(merge_all(reports))
}

/// Transforms with a dualizable input class.
pub fn shipped_transforms() -> Result<Vec<Transform>> {
    Ok(vec![
        Transform::legendre(),
        Transform::laplace(),
        Transform::polar(),
        Transform::weird(),
        family(Variant::Thm13, &[rat(2), rat(-1)], rat(1), rat(1))?,
        family(Variant::Thm52, &[rat(1), rat(3)], rat(-1), rat(2))?,
        family(Variant::Thm59, &[rat(1), rat(2)], rat(1), rat(1))?,
        Transform::Dual(DualParams::new(DualVariant::IdC, rat(3), rat(0))),
        Transform::Dual(DualParams::new(DualVariant::ScaleC, rat(2), rat(0))),
        Transform::Dual(DualParams::new(DualVariant::Mix, rat(2), rat(-1))),
    ])
}

// ---------------------------------------------------------------------------
// property lists

fn nonzero_scale(rng: &mut FixtureRng) -> Rat {
    const CHOICES: [(i64, i64); 6] = [(2, 1), (-1, 1), (1, 3), (-3, 2), (3, 2), (-1, 2)];
    let (p, q) = CHOICES[rng.gen_range(0..CHOICES.len())];
    ratio(p, q)
}

fn positive_scale(rng: &mut FixtureRng) -> Rat {
    const CHOICES: [(i64, i64); 4] = [(2, 1), (1, 3), (3, 2), (5, 4)];
    let (p, q) = CHOICES[rng.gen_range(0..CHOICES.len())];
    ratio(p, q)
}

/// Pair `u ≤ v`: `v = u + c` with `c ≥ 0` or `v` a restriction of `u`.
fn ordered_pair(rng: &mut FixtureRng, n: usize) -> (PLConvexS, PLConvexS) {
    let u = fixtures::random_s(rng, n);
    if rng.gen_bool(0.5) {
        let c = random_rat(rng, 0, 2, 2);
        let v = u.add_const(&c);
        (u, v)
    } else {
        let (_, _, v, _) = fixtures::random_split(rng, &u);
        (u, v)
    }
}

fn dlist(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(100);
    let t = Transform::legendre();
    let n = c.dim;
    let s_probes = |rng: &mut FixtureRng| -> Vec<Vector> { (0..c.probes).map(|_| random_vector(rng, n, -3, 3, 4)).collect() };
    let mut laws = vec![
        renamed(check_valuation(&t, &c), "D1:valuation"),
        renamed(check_sln(&t, "sln_contravariant", true, &c), "D2:sln_contravariant"),
        renamed(check_affine(&t, &AffineLaw::tau("t", rat(1), Combine::Add), &c), "D3:translate"),
        renamed(check_affine(&t, &AffineLaw::ell("t", rat(1)), &c), "D4:dual_translate"),
    ];
    laws.push(run_law("D5:add_constant", "S", &c, |rng| {
        let u = fixtures::random_s(rng, n);
        let s = random_rat(rng, -3, 3, 4);
        let (lhs, rhs) = (legendre_s(&u.add_const(&s)), legendre_s(&u));
        Ok(s_probes(rng)
            .into_iter()
            .map(|x| Check::pair(Value::rational(lhs.eval(&x)), Value::rational(rhs.eval(&x) - &s), json!({ "u": u, "t": s.to_string(), "x": x })))
            .collect())
    }));
    laws.push(run_law("D6:scale_argument", "S", &c, |rng| {
        let u = fixtures::random_s(rng, n);
        let l = nonzero_scale(rng);
        let (lhs, rhs) = (legendre_s(&u.scale_arg(&l)?), legendre_s(&u));
        Ok(s_probes(rng)
            .into_iter()
            .map(|x| {
                let r = rhs.eval(&x.scale(&l.recip()));
                Check::pair(Value::rational(lhs.eval(&x)), Value::rational(r), json!({ "u": u, "lambda": l.to_string(), "x": x }))
            })
            .collect())
    }));
    laws.push(run_law("D7:scale_value", "S", &c, |rng| {
        let u = fixtures::random_s(rng, n);
        let l = positive_scale(rng);
        let (lhs, rhs) = (legendre_s(&u.scale_val(&l)?), legendre_s(&u));
        Ok(s_probes(rng)
            .into_iter()
            .map(|x| {
                let r = &l * rhs.eval(&x.scale(&l.recip()));
                Check::pair(Value::rational(lhs.eval(&x)), Value::rational(r), json!({ "u": u, "lambda": l.to_string(), "x": x }))
            })
            .collect())
    }));
    laws.push(run_law("D9:bijection", "S/F", &c, |rng| {
        let u = fixtures::random_s(rng, n);
        let w = fixtures::random_f(rng, n);
        Ok(vec![
            Check::Holds { ok: legendre_f(&legendre_s(&u)) == u, ctx: json!({ "u": u }) },
            Check::Holds { ok: legendre_s(&legendre_f(&w)) == w, ctx: json!({ "w": w }) },
        ])
    }));
    laws.push(run_law("D10:involution", "S/F", &c, |rng| {
        let u = fixtures::random_s(rng, n);
        let w = fixtures::random_f(rng, n);
        let (uu, ww) = (legendre_f(&legendre_s(&u)), legendre_s(&legendre_f(&w)));
        let mut out = Vec::new();
        for x in s_probes(rng) {
            out.push(Check::Holds { ok: uu.eval(&x) == u.eval(&x), ctx: json!({ "u": u, "x": x }) });
            out.push(Check::pair(Value::rational(ww.eval(&x)), Value::rational(w.eval(&x)), json!({ "w": w, "x": x })));
        }
        Ok(out)
    }));
    laws.push(run_law("D11:order_reversal", "S", &c, |rng| {
        let (u, v) = ordered_pair(rng, n);
        let (us, vs) = (legendre_s(&u), legendre_s(&v));
        let mut out = Vec::new();
        for x in s_probes(rng) {
            out.push(Check::Holds { ok: u.eval(&x) <= v.eval(&x), ctx: json!({ "premise": true, "u": u, "v": v, "x": x }) });
            out.push(Check::Holds { ok: us.eval(&x) >= vs.eval(&x), ctx: json!({ "u": u, "v": v, "x": x }) });
        }
        Ok(out)
    }));
    laws.push(run_law("D12:lattice", "S", &c, |rng| {
        let (u, v, join, meet) = super::laws::s_pair(rng, n)?;
        let (us, vs) = (legendre_s(&u), legendre_s(&v));
        let jm = us.meet(&vs)?.ok_or_else(|| Error::Input("conjugates have no common minorant".into()))?;
        let mj = us.join(&vs)?;
        let (lj, lm) = (legendre_s(&join), legendre_s(&meet));
        let mut out = vec![
            Check::Holds { ok: lj == jm, ctx: json!({ "u": u, "v": v, "side": "join" }) },
            Check::Holds { ok: lm == mj, ctx: json!({ "u": u, "v": v, "side": "meet" }) },
        ];
        for x in s_probes(rng) {
            out.push(Check::pair(Value::rational(lj.eval(&x)), Value::rational(jm.eval(&x)), json!({ "u": u, "v": v, "x": x })));
            out.push(Check::pair(Value::rational(lm.eval(&x)), Value::rational(mj.eval(&x)), json!({ "u": u, "v": v, "x": x })));
        }
        Ok(out)
    }));
    laws.push(run_law("D13:inf_convolution", "S", &c, |rng| {
        let u = fixtures::random_s(rng, n);
        let v = fixtures::random_s(rng, n);
        let lhs = legendre_s(&u.inf_conv(&v)?);
        let rhs = legendre_s(&u).sum(&legendre_s(&v))?;
        let mut out = vec![Check::Holds { ok: lhs == rhs, ctx: json!({ "u": u, "v": v }) }];
        for x in s_probes(rng) {
            out.push(Check::pair(Value::rational(lhs.eval(&x)), Value::rational(rhs.eval(&x)), json!({ "u": u, "v": v, "x": x })));
        }
        Ok(out)
    }));
    laws.push(run_law("D14:indicator", "polytope", &c, |rng| {
        let k = fixtures::random_polytope(rng, n);
        let h = legendre_s(&PLConvexS::indicator(&k)?);
        s_probes(rng)
            .into_iter()
            .map(|x| Ok(Check::pair(Value::rational(h.eval(&x)), Value::rational(k.support(&x)?), json!({ "K": k, "x": x }))))
            .collect()
    }));
    let mut reports = vec![report("dlist", &c, laws)];
    let cc = cfg.check(10);
    for r in continuity_all(&t, &cc, &SequenceSpec::ALL) {
        let mut r = r;
        for l in &mut r.laws {
            l.name = l.name.replace("legendre/continuity", "D8:continuity");
        }
        reports.push(r);
    }
    Ok(merge_all(reports))
}

fn laplace_dlist(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(50);
    let t = Transform::laplace();
    let n = c.dim;
    let p = c.prec;
    let lc = |rng: &mut FixtureRng| LogConcaveFn::from_s(fixtures::random_s(rng, n));
    let lap = |f: &LogConcaveFn, x: &Vector| -> Result<Value> { Ok(Value::Approx(laplace_logconcave(f, x, p)?)) };
    let mut laws = vec![
        renamed(check_valuation(&t, &c), "D1:valuation"),
        renamed(check_sln(&t, "sln_contravariant", true, &c), "D2:sln_contravariant"),
        renamed(check_law(&t, &t.laws()[2], &c), "D3:translate"),
        renamed(check_law(&t, &t.laws()[3], &c), "D4:dual_translate"),
    ];
    laws.push(run_law("D5:exp_constant", "LC_sc", &c, |rng| {
        let f = lc(rng);
        let s = random_rat(rng, -3, 3, 4);
        let g = f.mul_exp_const(&s);
        probes(rng, &c, false)
            .into_iter()
            .map(|x| Ok(Check::pair(lap(&g, &x)?, lap(&f, &x)?.mul_exp(&-s.clone(), p), json!({ "f": f, "t": s.to_string(), "x": x }))))
            .collect()
    }));
    laws.push(run_law("D6:scale_argument", "LC_sc", &c, |rng| {
        let f = lc(rng);
        let l = nonzero_scale(rng);
        let g = f.scale_arg(&l)?;
        let mut k = Rat::one();
        for _ in 0..n {
            k *= l.abs().recip();
        }
        probes(rng, &c, false)
            .into_iter()
            .map(|x| {
                let rhs = lap(&f, &x.scale(&l.recip()))?.scale(&k, p);
                Ok(Check::pair(lap(&g, &x)?, rhs, json!({ "f": f, "lambda": l.to_string(), "x": x })))
            })
            .collect()
    }));
    laws.push(run_law("D7:scale_value", "LC_sc", &c, |rng| {
        let f = lc(rng);
        let l = if rng.gen_range(0..4) == 0 { Rat::zero() } else { positive_scale(rng) };
        let g = f.mul_const(&l)?;
        probes(rng, &c, false)
            .into_iter()
            .map(|x| Ok(Check::pair(lap(&g, &x)?, lap(&f, &x)?.scale(&l, p), json!({ "f": f, "lambda": l.to_string(), "x": x }))))
            .collect()
    }));
    let mut reports = vec![report("laplace-dlist", &c, laws)];
    for mut r in continuity_all(&t, &cfg.check(10), &SequenceSpec::ALL) {
        for l in &mut r.laws {
            l.name = l.name.replace("laplace/continuity", "D8:continuity");
        }
        reports.push(r);
    }
    Ok(merge_all(reports))
}

// ---------------------------------------------------------------------------
// functional equations and continuity

fn cauchy(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let prec = cfg.prec;
    let tol = cfg.tol.unwrap_or(1e-12);
    let grid = default_grid();
    let valid = [
        CauchySpec::linear(rat(1), rat(0), rat(2), rat(0), rat(1)),
        CauchySpec::linear(rat(-1), rat(3), ratio(1, 2), rat(-2), ratio(3, 2)),
        CauchySpec::exponential(rat(1), rat(-1), rat(1), rat(1), rat(1)),
        CauchySpec::exponential(rat(2), ratio(1, 3), rat(-1), ratio(-1, 3), rat(-2)),
    ];
    let mut reports = Vec::new();
    let mut valid_ok = LawAccumulator::new("cauchy:constraint_holds", "grid", 0.0);
    for s in &valid {
        valid_ok.record_bool(s.validate().is_ok(), || json!({ "spec": s }));
        reports.push(cauchy_family_check(s, &grid, tol, prec));
    }
    // perturbed constants violate the constraint, and the grid search must
    // exhibit a violating triple
    let perturbed = [
        CauchySpec::linear(rat(1), rat(0), rat(2), rat(0), ratio(11, 10)),
        CauchySpec::exponential(rat(1), rat(-1), rat(1), ratio(11, 10), rat(1)),
    ];
    let mut found = LawAccumulator::new("cauchy:perturbation_detected", "grid", 0.0);
    for s in &perturbed {
        let r = cauchy_family_check(s, &grid, tol, prec);
        let ok = s.validate().is_err() && !r.pass && r.laws.iter().any(|l| l.witness.is_some());
        found.record_bool(ok, || json!({ "spec": s }));
    }
    let mut r = ValuationReport::new("cauchy", cfg.seed);
    r.push(valid_ok.finish());
    r.push(found.finish());
    reports.push(r);
    let mut out = merge_all(reports);
    out.fixtures = (valid.len() + perturbed.len()) as u64;
    Ok(out)
}

fn continuity(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(10);
    let dl = dualize(&TransformHandle::new(Transform::legendre()))?;
    let mut reports = Vec::new();
    let ts: [&dyn Evaluator; 4] = [&Transform::legendre(), &Transform::laplace(), &Transform::polar(), &dl];
    for t in ts {
        reports.extend(continuity_all(t, &c, &SequenceSpec::ALL));
    }
    Ok(merge_all(reports))
}

// ---------------------------------------------------------------------------
// polytope functionals

fn fubini(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check_tol(20, FUBINI_TOL);
    let law = run_law("fubini:dd_vs_profile", "polytope", &c, |rng| {
        let poly = fixtures::random_polytope(rng, c.dim);
        let mut xs = probes(rng, &c, false);
        xs.push(Vector::zeros(c.dim));
        xs.into_iter()
            .map(|x| {
                let dd = Value::Approx(laplace_polytope(&poly, &x, c.prec)?);
                let prof = Value::Exact(laplace_polytope_profile(&poly, &x)?);
                Ok(Check::pair(dd, prof, json!({ "P": poly, "x": x })))
            })
            .collect()
    });
    Ok(report("fubini", &c, vec![law]))
}

/// `b` for which `u(y) > (|x|+a)|y| + b` holds on `dom u`, with `a = 1`.
///
/// `u` is affine on each cell and the right side is convex, so the premise
/// reduces to the graph points; `sqrt_upper` makes the norms upper bounds.
pub fn finiteness_offset(u: &PLConvexS, x: &Vector, a: &Rat) -> Rat {
    let xn = sqrt_upper(&x.norm_sq());
    u.points()
        .iter()
        .map(|g| &g.t - (&xn + a) * sqrt_upper(&g.x.norm_sq()))
        .min()
        .expect("nonempty")
        - Rat::one()
}

fn laplace_bound(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check(30);
    let a = Rat::one();
    let law = run_law("finiteness_bound:strict", "LC_sc", &c, |rng| {
        let u = fixtures::random_s(rng, c.dim);
        let f = LogConcaveFn::from_s(u.clone());
        probes(rng, &c, false)
            .into_iter()
            .map(|x| {
                let b = finiteness_offset(&u, &x, &a);
                // the premise, re-checked exactly at the graph points
                let xn = sqrt_upper(&x.norm_sq());
                let premise = u.points().iter().all(|g| g.t > (&xn + &a) * sqrt_upper(&g.x.norm_sq()) + &b);
                let value = laplace_logconcave(&f, &x, c.prec)?;
                let bound = finiteness_bound_lower(c.dim, &a, &b, c.prec)?;
                let ok = premise && value.certainly_lt(&bound);
                Ok(Check::Holds {
                    ok,
                    ctx: json!({
                        "u": u, "x": x, "b": b.to_string(), "premise": premise,
                        "value": value.to_f64(), "bound_lower": bound.to_f64(),
                    }),
                })
            })
            .collect()
    });
    Ok(report("laplace-bound", &c, vec![law]))
}

fn gradient(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check_tol(20, GRADIENT_TOL);
    let h = gradient_step();
    let mut acc = LawAccumulator::new("gradient:central_difference", "polytope", c.tol);
    for i in 0..c.count {
        let mut rng = c.rng("gradient", i);
        let poly = fixtures::random_polytope(&mut rng, c.dim);
        let m = poly.measures().moment;
        for k in 0..c.dim {
            let e = Vector::basis(c.dim, k).scale(&h);
            let diff = (|| -> Result<Ball> {
                let plus = laplace_polytope(&poly, &e, c.prec)?;
                let minus = laplace_polytope(&poly, &-&e, c.prec)?;
                Ok(plus.sub(&minus, c.prec).mul_rat(&(rat(2) * &h).recip(), c.prec))
            })();
            let witness = || json!({ "P": poly, "coordinate": k });
            match diff {
                Ok(d) => {
                    let err = (d.to_f64() - crate::rat::rat_to_f64(&m[k])).abs();
                    acc.record(crate::value::Residual { exact: false, abs: err, rel: err }, witness);
                }
                Err(e) => acc.record_error(&e, witness),
            }
        }
    }
    Ok(report("gradient", &c, vec![acc.finish()]))
}

fn lemma45(cfg: &SuiteConfig) -> Result<ValuationReport> {
    let c = cfg.check_tol(50, THM42_TOL);
    let lin = run_law("lemma45:linear_vs_thm41", "polytope", &c, |rng| {
        let cs: Vec<Rat> = (0..5).map(|_| random_rat(rng, -3, 3, 2)).collect();
        let params = FamilyParams::new(Variant::Thm41, &cs, rat(1), rat(1))?;
        let zeta = ZetaSpec::linear(cs[0].clone(), cs[1].clone(), cs[2].clone());
        let eta = ExpPolyDensity::linear(cs[3].clone(), cs[4].clone());
        let poly = fixtures::random_polytope_about_origin(rng, c.dim);
        probes(rng, &c, true)
            .into_iter()
            .map(|x| {
                let a = Value::Exact(integral_representation(&zeta, &eta, &poly, &x)?);
                let b = family_eval(&params, &Input::Polytope(poly.clone()), &x, c.prec)?;
                Ok(Check::pair(a, b, json!({ "P": poly, "x": x, "params": params })))
            })
            .collect()
    });
    let exp = run_law("lemma45:exponential_vs_thm42", "polytope", &c, |rng| {
        let cs: Vec<Rat> = (0..3).map(|_| random_rat(rng, -3, 3, 2)).collect();
        let sigma = nonzero_scale(rng);
        let params = FamilyParams::new(Variant::Thm42, &cs, sigma.clone(), rat(1))?;
        let zeta = ZetaSpec::exponential(cs[0].clone(), cs[1].clone(), sigma.clone());
        let eta = ExpPolyDensity::exponential(cs[2].clone(), sigma.clone());
        let poly = fixtures::random_polytope_about_origin(rng, c.dim);
        probes(rng, &c, true)
            .into_iter()
            .map(|x| {
                let a = Value::Exact(integral_representation(&zeta, &eta, &poly, &x)?);
                let b = family_eval(&params, &Input::Polytope(poly.clone()), &x, c.prec)?;
                Ok(Check::pair(a, b, json!({ "P": poly, "x": x, "params": params })))
            })
            .collect()
    });
    Ok(report("lemma45", &c, vec![lin, exp]))
}

/// Sanity helper for callers that build their own probes.
pub fn random_probe(rng: &mut FixtureRng, n: usize, punctured: bool) -> Vector {
    if punctured {
        random_nonzero_vector(rng, n, -2, 2, 2)
    } else {
        random_vector(rng, n, -2, 2, 2)
    }
}

/// The class a suite's fixtures belong to, for labelling plot output.
pub fn suite_class(name: &str) -> Option<InputClass> {
    match name {
        "legendre-thm11" | "thm52" | "thm59" | "dlist" | "weird-counterexample" => Some(InputClass::S),
        "logpolar-thm12" | "laplace-thm13" | "laplace-dlist" | "laplace-bound" => Some(InputClass::LcSc),
        "thm41" | "thm42" | "fubini" | "gradient" | "lemma45" => Some(InputClass::Polytope),
        _ => None,
    }
}
