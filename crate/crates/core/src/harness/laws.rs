use rand::Rng;
use serde_json::{json, Value as Json};

use super::input::{Input, InputClass};
use super::report::{LawAccumulator, LawReport, ValuationReport};
use super::transform::{AffineLaw, Combine, Evaluator, Law};
use crate::error::Result;
use crate::function::fixtures::{self, fixture_rng, random_nonzero_vector, random_vector, FixtureRng};
use crate::function::{LogConcaveFn, PLConvexS};
use crate::geom::{random_unimodular, UnimodularMap};
use crate::rat::{Rat, Vector};
use crate::real::Prec;
use crate::transforms::legendre_s;
use crate::value::{residual, Value};

/// Tolerance for transcendental identities; rational ones must hold exactly.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Number of distinct unimodular maps cycled through by the SL(n) laws.
pub const SLN_MAPS: usize = 20;

/// Parameters shared by every check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckConfig {
    pub dim: usize,
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    pub prec: Prec,
    /// Probe points per fixture.
    pub probes: usize,
}

impl CheckConfig {
    pub fn new(dim: usize, seed: u64, count: usize) -> Self {
        CheckConfig { dim, seed, count, tol: DEFAULT_TOL, prec: Prec::default(), probes: 2 }
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    /// Sub-stream for fixture `i` of a law: distinct laws draw from
    /// distinct streams so adding a law does not shift the others.
    pub fn rng(&self, salt: &str, i: usize) -> FixtureRng {
        let h = salt.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
        fixture_rng(self.seed ^ h, i as u64)
    }
}

/// A random input of the given class.
pub fn random_input(class: InputClass, rng: &mut FixtureRng, n: usize) -> Input {
    match class {
        InputClass::Polytope => Input::Polytope(fixtures::random_polytope(rng, n)),
        InputClass::S => Input::S(fixtures::random_s(rng, n)),
        InputClass::F => Input::F(fixtures::random_f(rng, n)),
        InputClass::LcSc => Input::Lc(LogConcaveFn::from_s(fixtures::random_s(rng, n))),
        InputClass::LcPos => Input::Lc(LogConcaveFn::from_f(fixtures::random_f(rng, n))),
    }
}

/// Four inputs with `join ∨ meet` lattice structure, all in class.
#[derive(Clone, Debug)]
pub struct Quad {
    pub u: Input,
    pub v: Input,
    pub join: Input,
    pub meet: Input,
}

impl Quad {
    pub fn to_json(&self) -> Json {
        json!({ "u": self.u.to_json(), "v": self.v.to_json() })
    }
}

/// Class-S pair `(u, v)` with `u ∨ v` and `u ∧ v = u ∧̃ v`: a random split
/// of a random function, or every fourth time two consecutive staircase
/// steps.
pub fn s_pair(rng: &mut FixtureRng, n: usize) -> Result<(PLConvexS, PLConvexS, PLConvexS, PLConvexS)> {
    if rng.gen_range(0..4) == 0 {
        let i = rng.gen_range(1..=4);
        let u = fixtures::staircase_step(n, i);
        let v = fixtures::staircase_step(n, i + 1);
        let join = u.join(&v)?.expect("consecutive steps meet");
        let meet = u.meet(&v)?;
        return Ok((u, v, join, meet));
    }
    let w = fixtures::random_s(rng, n);
    let (_, _, u, v) = fixtures::random_split(rng, &w);
    let join = u.join(&v)?.expect("split halves share the cut");
    let meet = u.meet(&v)?;
    Ok((u, v, join, meet))
}

/// Lattice quadruple of the given class. Max-affine pairs are conjugates of
/// class-S pairs (`u*∨v* = (u∧v)*`, `u*∧v* = (u∨v)*`); log-concave pairs
/// swap the roles (`e^{-u}∨e^{-v} = e^{-(u∧v)}`).
pub fn random_quad(class: InputClass, rng: &mut FixtureRng, n: usize) -> Result<Quad> {
    if class == InputClass::Polytope {
        let p = fixtures::random_polytope(rng, n);
        let w = PLConvexS::indicator(&p)?;
        let (a, c, _, _) = fixtures::random_split(rng, &w);
        return Ok(Quad {
            u: Input::Polytope(p.clip(&a, &c)),
            v: Input::Polytope(p.clip(&-&a, &-c.clone())),
            join: Input::Polytope(p.clone()),
            meet: Input::Polytope(p.section(&a, &c)),
        });
    }
    let (u, v, join, meet) = s_pair(rng, n)?;
    let f = |w: &PLConvexS| legendre_s(w);
    let lc = LogConcaveFn::from_s;
    let lcf = |w: &PLConvexS| LogConcaveFn::from_f(legendre_s(w));
    Ok(match class {
        InputClass::S => Quad { u: Input::S(u), v: Input::S(v), join: Input::S(join), meet: Input::S(meet) },
        InputClass::F => Quad {
            u: Input::F(f(&u)),
            v: Input::F(f(&v)),
            join: Input::F(f(&meet)),
            meet: Input::F(f(&join)),
        },
        InputClass::LcSc => Quad {
            join: Input::Lc(lc(meet)),
            meet: Input::Lc(lc(join)),
            u: Input::Lc(lc(u)),
            v: Input::Lc(lc(v)),
        },
        InputClass::LcPos => Quad {
            u: Input::Lc(lcf(&u)),
            v: Input::Lc(lcf(&v)),
            join: Input::Lc(lcf(&join)),
            meet: Input::Lc(lcf(&meet)),
        },
        InputClass::Polytope => unreachable!(),
    })
}

/// Probe point; nonzero for punctured transforms.
pub fn probe(rng: &mut FixtureRng, n: usize, punctured: bool) -> Vector {
    if punctured {
        random_nonzero_vector(rng, n, -2, 2, 2)
    } else {
        random_vector(rng, n, -2, 2, 2)
    }
}

fn vjson(v: &Value, prec: Prec) -> Json {
    serde_json::to_value(v.to_json(prec)).expect("serializable")
}

/// `class` label used in reports.
fn class_label(e: &dyn Evaluator) -> String {
    e.input_class().to_string()
}

pub fn check_valuation(e: &dyn Evaluator, cfg: &CheckConfig) -> LawReport {
    let mut acc = LawAccumulator::new("valuation", &class_label(e), cfg.tol);
    for i in 0..cfg.count {
        let mut rng = cfg.rng("valuation", i);
        let quad = match random_quad(e.input_class(), &mut rng, cfg.dim) {
            Ok(q) => q,
            Err(err) => {
                acc.record_error(&err, || json!({ "fixture": i }));
                continue;
            }
        };
        for _ in 0..cfg.probes {
            let x = probe(&mut rng, cfg.dim, e.punctured());
            let sides = (|| -> Result<(Value, Value)> {
                let lhs = e.eval(&quad.join, &x, cfg.prec)?.add(&e.eval(&quad.meet, &x, cfg.prec)?, cfg.prec);
                let rhs = e.eval(&quad.u, &x, cfg.prec)?.add(&e.eval(&quad.v, &x, cfg.prec)?, cfg.prec);
                Ok((lhs, rhs))
            })();
            let witness = |extra: Json| {
                let mut w = json!({ "transform": e.id(), "pair": quad.to_json(), "x": x });
                if let (Json::Object(m), Json::Object(ex)) = (&mut w, extra) {
                    m.extend(ex);
                }
                w
            };
            match sides {
                Ok((lhs, rhs)) => acc.record(residual(&lhs, &rhs, cfg.prec), || {
                    witness(json!({ "lhs": vjson(&lhs, cfg.prec), "rhs": vjson(&rhs, cfg.prec) }))
                }),
                Err(err) => acc.record_error(&err, || witness(json!({}))),
            }
        }
    }
    acc.finish()
}

/// Map number `i` of the SL(n) checks.
pub fn sln_map(cfg: &CheckConfig, i: usize) -> Result<UnimodularMap> {
    random_unimodular(cfg.dim, cfg.seed.wrapping_add((i % SLN_MAPS) as u64), 2)
}

/// `Φ(u∘φ^{-1})(x)` against `Φu(φ^t x)` or `Φu(φ^{-1}x)`.
pub fn check_sln(e: &dyn Evaluator, name: &str, transpose: bool, cfg: &CheckConfig) -> LawReport {
    let mut acc = LawAccumulator::new(name, &class_label(e), cfg.tol);
    for i in 0..cfg.count {
        let mut rng = cfg.rng(name, i);
        let u = e.prepare(random_input(e.input_class(), &mut rng, cfg.dim));
        let phi = match sln_map(cfg, i) {
            Ok(p) => p,
            Err(err) => {
                acc.record_error(&err, || json!({ "map": i }));
                continue;
            }
        };
        for _ in 0..cfg.probes {
            let x = probe(&mut rng, cfg.dim, e.punctured());
            let arg = if transpose { phi.apply_transpose(&x) } else { phi.apply_inverse(&x) };
            let sides = (|| -> Result<(Value, Value)> {
                let moved = u.compose_inverse(&phi)?;
                Ok((e.eval(&moved, &x, cfg.prec)?, e.eval(&u, &arg, cfg.prec)?))
            })();
            let witness = || json!({ "transform": e.id(), "input": u.to_json(), "map": phi.matrix().iter().map(|r| Vector(r.clone())).collect::<Vec<_>>(), "x": x });
            match sides {
                Ok((lhs, rhs)) => acc.record(residual(&lhs, &rhs, cfg.prec), witness),
                Err(err) => acc.record_error(&err, witness),
            }
        }
    }
    acc.finish()
}

/// Right side of an affine law: `Φu(x - a·y) ⊕ b·(x·y)`.
pub fn affine_rhs(e: &dyn Evaluator, law: &AffineLaw, u: &Input, x: &Vector, y: &Vector, prec: Prec) -> Result<Value> {
    let arg = x - &y.scale(&law.shift);
    let base = e.eval(u, &arg, prec)?;
    let b: Rat = law.coef.value(u) * x.dot(y);
    Ok(match law.combine {
        Combine::Add => base.add(&Value::rational(b), prec),
        Combine::Mul => base.mul_exp(&b, prec),
    })
}

pub fn check_affine(e: &dyn Evaluator, law: &AffineLaw, cfg: &CheckConfig) -> LawReport {
    let mut acc = LawAccumulator::new(&law.name, &class_label(e), cfg.tol);
    if law.expect_failure {
        acc = acc.expect_failure();
    }
    for i in 0..cfg.count {
        let mut rng = cfg.rng(&law.name, i);
        let u = e.prepare(random_input(e.input_class(), &mut rng, cfg.dim));
        let y = random_nonzero_vector(&mut rng, cfg.dim, -2, 2, 2);
        for _ in 0..cfg.probes {
            let x = probe(&mut rng, cfg.dim, e.punctured());
            if e.punctured() && (&x - &y.scale(&law.shift)).is_zero() {
                continue;
            }
            let sides = (|| -> Result<(Value, Value)> {
                let moved = law.op.apply(&u, &y)?;
                Ok((e.eval(&moved, &x, cfg.prec)?, affine_rhs(e, law, &u, &x, &y, cfg.prec)?))
            })();
            let witness = |lr: Option<(&Value, &Value)>| {
                let mut w = json!({ "transform": e.id(), "input": u.to_json(), "y": y, "x": x });
                if let (Some((l, r)), Json::Object(m)) = (lr, &mut w) {
                    m.insert("lhs".into(), vjson(l, cfg.prec));
                    m.insert("rhs".into(), vjson(r, cfg.prec));
                }
                w
            };
            match sides {
                Ok((lhs, rhs)) => acc.record(residual(&lhs, &rhs, cfg.prec), || witness(Some((&lhs, &rhs)))),
                Err(err) => acc.record_error(&err, || witness(None)),
            }
        }
    }
    acc.finish()
}

pub fn check_law(e: &dyn Evaluator, law: &Law, cfg: &CheckConfig) -> LawReport {
    match law {
        Law::Valuation => check_valuation(e, cfg),
        Law::SlnTranspose(name) => check_sln(e, name, true, cfg),
        Law::SlnInverse => check_sln(e, "sln_covariant", false, cfg),
        Law::Affine(a) => check_affine(e, a, cfg),
    }
}

/// Runs every law the evaluator asserts.
pub fn check_laws(suite: &str, e: &dyn Evaluator, cfg: &CheckConfig) -> ValuationReport {
    check_law_set(suite, e, &e.laws(), cfg)
}

pub fn check_law_set(suite: &str, e: &dyn Evaluator, laws: &[Law], cfg: &CheckConfig) -> ValuationReport {
    let mut report = ValuationReport::new(suite, cfg.seed);
    report.fixtures = cfg.count as u64;
    for law in laws {
        let mut r = check_law(e, law, cfg);
        r.name = format!("{}/{}", e.id(), r.name);
        report.push(r);
    }
    report
}
