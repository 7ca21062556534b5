//! Continuity at a finite schedule: `Φ(u_i)(x) → Φ(u_∞)(x)` along explicit
//! sequences `u_i → u_∞`.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::input::{Input, InputClass};
use super::laws::{probe, random_input, CheckConfig};
use super::report::{LawAccumulator, ValuationReport};
use super::transform::Evaluator;
use crate::error::{Error, Result};
use crate::function::fixtures::staircase;
use crate::function::{LogConcaveFn, PLConvexS};
use crate::rat::{Rat, Vector};
use crate::real::Prec;
use crate::transforms::legendre_s;
use crate::value::Value;

/// Indices `i` at which `u_i` is evaluated.
pub const SCHEDULE: [u32; 6] = [1, 2, 4, 8, 16, 32];

/// Staircase lengths `m`; the last one serves as the limit.
pub const STAIRCASE_SCHEDULE: [usize; 5] = [1, 2, 4, 8, 16];

/// Final residual demanded by the convergence law.
pub const CONTINUITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceSpec {
    /// `τ_{y_i}u` with `y_i = y + e₁/2^i`.
    TranslateLimit,
    /// `u∘λ_i` with `λ_i = 1 + 2^{-i}`.
    ScaleLimit,
    /// Running staircase meets `v_m`.
    StaircaseLimit,
}

impl SequenceSpec {
    pub const ALL: [SequenceSpec; 3] = [SequenceSpec::TranslateLimit, SequenceSpec::ScaleLimit, SequenceSpec::StaircaseLimit];

    pub fn name(self) -> &'static str {
        match self {
            SequenceSpec::TranslateLimit => "translate_limit",
            SequenceSpec::ScaleLimit => "scale_limit",
            SequenceSpec::StaircaseLimit => "staircase_limit",
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn pow2_inv(i: u32) -> Rat {
    Rat::new(1.into(), num_bigint::BigInt::from(2u8).pow(i))
}

/// Moves a class-S function into the class of `class`.
fn from_s(u: PLConvexS, class: InputClass) -> Result<Input> {
    Ok(match class {
        InputClass::S => Input::S(u),
        InputClass::F => Input::F(legendre_s(&u)),
        InputClass::LcSc => Input::Lc(LogConcaveFn::from_s(u)),
        InputClass::LcPos => Input::Lc(LogConcaveFn::from_f(legendre_s(&u))),
        InputClass::Polytope => return Err(Error::Input("staircases are functions, not polytopes".into())),
    })
}

/// A sequence `(index, u_i)` and its limit.
pub struct Sequence {
    pub terms: Vec<(u32, Input)>,
    pub limit: Input,
}

pub fn build_sequence(spec: SequenceSpec, u: &Input, y: &Vector) -> Result<Sequence> {
    let n = u.dim();
    let e1 = Vector::basis(n, 0);
    match spec {
        SequenceSpec::TranslateLimit => {
            let terms = SCHEDULE
                .iter()
                .map(|&i| Ok((i, u.translate(&(y + &e1.scale(&pow2_inv(i))))?)))
                .collect::<Result<_>>()?;
            Ok(Sequence { terms, limit: u.translate(y)? })
        }
        SequenceSpec::ScaleLimit => {
            let terms = SCHEDULE
                .iter()
                .map(|&i| Ok((i, u.scale_arg(&(Rat::from_integer(1.into()) + pow2_inv(i)))?)))
                .collect::<Result<_>>()?;
            Ok(Sequence { terms, limit: u.clone() })
        }
        SequenceSpec::StaircaseLimit => {
            let class = u.class();
            let last = *STAIRCASE_SCHEDULE.last().expect("nonempty");
            let terms = STAIRCASE_SCHEDULE
                .iter()
                .map(|&m| Ok((m as u32, from_s(staircase(n, m)?.meet, class)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Sequence { terms, limit: from_s(staircase(n, last)?.meet, class)? })
        }
    }
}

/// `|a - b| / max(1, |b|)`, taken from ball midpoints.
fn scaled_gap(a: &Value, b: &Value, prec: Prec) -> f64 {
    let d = a.add(&b.scale(&Rat::from_integer((-1).into()), prec), prec);
    if let Some(q) = d.as_rational() {
        if q == Rat::from_integer(0.into()) {
            return 0.0;
        }
    }
    // certified lower bound, so rounding noise on equal values reads as 0
    d.to_ball(prec).abs_lower() / b.to_f64(prec).abs().max(1.0)
}

/// Residual curve `i ↦ max_x |Φ(u_i)(x) - Φ(u_∞)(x)|/max(1, |Φ(u_∞)(x)|)`.
pub fn residual_curve(e: &dyn Evaluator, seq: &Sequence, probes: &[Vector], prec: Prec) -> Result<Vec<(u32, f64)>> {
    let limits: Vec<Value> = probes.iter().map(|x| e.eval(&seq.limit, x, prec)).collect::<Result<_>>()?;
    seq.terms
        .iter()
        .map(|(i, ui)| {
            let mut worst = 0.0f64;
            for (x, lim) in probes.iter().zip(&limits) {
                worst = worst.max(scaled_gap(&e.eval(ui, x, prec)?, lim, prec));
            }
            Ok((*i, worst))
        })
        .collect()
}

/// Fixture and probes of continuity fixture `i`.
pub fn continuity_fixture(e: &dyn Evaluator, spec: SequenceSpec, cfg: &CheckConfig, i: usize) -> (Input, Vector, Vec<Vector>) {
    let mut rng = cfg.rng(spec.name(), i);
    let u = e.prepare(random_input(e.input_class(), &mut rng, cfg.dim));
    let y = super::laws::probe(&mut rng, cfg.dim, false);
    let probes = (0..cfg.probes).map(|_| probe(&mut rng, cfg.dim, e.punctured())).collect();
    (u, y, probes)
}

/// Two laws per sequence: `converges` (final residual ≤ 1e-6) and
/// `monotone_tail` (the last three residuals do not increase).
pub fn check_continuity(e: &dyn Evaluator, spec: SequenceSpec, cfg: &CheckConfig) -> ValuationReport {
    let class = e.input_class().to_string();
    let mut conv = LawAccumulator::new(&format!("{}/continuity:{spec}:converges", e.id()), &class, CONTINUITY_TOL);
    let mut mono = LawAccumulator::new(&format!("{}/continuity:{spec}:monotone_tail", e.id()), &class, 0.0);
    let count = if spec == SequenceSpec::StaircaseLimit { cfg.count.min(1) } else { cfg.count };
    for i in 0..count {
        let (u, y, probes) = continuity_fixture(e, spec, cfg, i);
        let witness = |curve: Option<&[(u32, f64)]>| {
            json!({ "transform": e.id(), "sequence": spec, "input": u.to_json(), "y": y, "probes": probes, "curve": curve })
        };
        let curve = build_sequence(spec, &u, &y).and_then(|seq| residual_curve(e, &seq, &probes, cfg.prec));
        match curve {
            Ok(curve) => {
                // the staircase limit is its own last term
                let k = if spec == SequenceSpec::StaircaseLimit { curve.len() - 2 } else { curve.len() - 1 };
                let last = curve[k].1;
                conv.record(crate::value::Residual { exact: false, abs: last, rel: last }, || witness(Some(&curve)));
                let tail = &curve[k.saturating_sub(2)..=k];
                let monotone = tail.windows(2).all(|w| w[1].1 <= w[0].1);
                mono.record_bool(monotone, || witness(Some(&curve)));
            }
            Err(err) => {
                conv.record_error(&err, || witness(None));
                mono.record_error(&err, || witness(None));
            }
        }
    }
    let mut report = ValuationReport::new("continuity", cfg.seed);
    report.fixtures = count as u64;
    report.push(conv.finish());
    report.push(mono.finish());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::transform::Transform;
    use crate::rat::rat;

    #[test]
    fn legendre_translate_limit_is_lipschitz() {
        let cube = crate::geom::Polytope::cube(3, rat(0), rat(1));
        let u = Input::S(PLConvexS::indicator(&cube).unwrap());
        let x = Vector::from_i64(&[2, -1, 1]);
        let seq = build_sequence(SequenceSpec::TranslateLimit, &u, &Vector::zeros(3)).unwrap();
        let curve = residual_curve(&Transform::legendre(), &seq, &[x], Prec::default()).unwrap();
        for (i, r) in curve {
            assert!(r <= 2.0 * 2f64.powi(-(i as i32)) + 1e-300, "i = {i}: {r}");
        }
    }

    #[test]
    fn staircase_stabilizes_exactly() {
        let u = Input::S(PLConvexS::indicator(&crate::geom::Polytope::cube(3, rat(0), rat(1))).unwrap());
        let seq = build_sequence(SequenceSpec::StaircaseLimit, &u, &Vector::zeros(3)).unwrap();
        let probes = [Vector::from_i64(&[-2, 1, 0]), Vector::from_i64(&[2, 0, 1])];
        let curve = residual_curve(&Transform::legendre(), &seq, &probes, Prec::default()).unwrap();
        assert_eq!(curve[3].1, 0.0);
    }

    #[test]
    fn continuity_reports_pass() {
        let cfg = CheckConfig::new(3, 5, 3);
        for spec in SequenceSpec::ALL {
            let r = check_continuity(&Transform::laplace(), spec, &cfg);
            assert!(r.pass, "{}", r.to_json_string());
        }
    }
}
