use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::error::Result;
use crate::value::Residual;

/// Outcome of one named law on one fixture class.
///
/// `max_residual` is absolute for exactly decided comparisons (where any
/// nonzero value fails) and relative otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub name: String,
    pub fixture_class: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub checks: u64,
    /// The suite passes only if this law fails.
    #[serde(default, skip_serializing_if = "is_false")]
    pub expected_failure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Json>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl LawReport {
    /// Whether this law contributes a pass to its suite.
    pub fn ok(&self) -> bool {
        self.pass != self.expected_failure
    }

    fn merge(&mut self, o: &LawReport) {
        let take_witness = match (&self.witness, &o.witness) {
            (None, Some(_)) => true,
            (Some(a), Some(b)) => {
                o.max_residual > self.max_residual
                    || (o.max_residual == self.max_residual && b.to_string() < a.to_string())
            }
            _ => false,
        };
        if take_witness {
            self.witness = o.witness.clone();
        }
        self.max_residual = self.max_residual.max(o.max_residual);
        self.tolerance = self.tolerance.min(o.tolerance);
        self.pass &= o.pass;
        self.checks += o.checks;
    }
}

/// Result of a verification suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValuationReport {
    pub suite: String,
    pub seed: u64,
    pub fixtures: u64,
    pub pass: bool,
    pub laws: Vec<LawReport>,
}

impl ValuationReport {
    pub fn new(suite: &str, seed: u64) -> Self {
        ValuationReport { suite: suite.into(), seed, fixtures: 0, pass: true, laws: Vec::new() }
    }

    pub fn push(&mut self, law: LawReport) {
        self.laws.push(law);
        self.refresh();
    }

    fn refresh(&mut self) {
        self.laws.sort_by(|a, b| (&a.name, &a.fixture_class).cmp(&(&b.name, &b.fixture_class)));
        self.pass = self.laws.iter().all(LawReport::ok);
    }

    pub fn first_failure(&self) -> Option<&LawReport> {
        self.laws.iter().find(|l| !l.ok())
    }

    /// Associative, commutative merge: laws keyed by `(name, class)`, suite
    /// ids united, fixtures summed, the smallest seed kept.
    pub fn merge(&self, o: &ValuationReport) -> ValuationReport {
        let mut suites: Vec<&str> = self.suite.split('+').chain(o.suite.split('+')).collect();
        suites.sort();
        suites.dedup();
        let mut laws: BTreeMap<(String, String), LawReport> = BTreeMap::new();
        for l in self.laws.iter().chain(&o.laws) {
            let key = (l.name.clone(), l.fixture_class.clone());
            match laws.get_mut(&key) {
                Some(existing) => existing.merge(l),
                None => {
                    laws.insert(key, l.clone());
                }
            }
        }
        let mut out = ValuationReport {
            suite: suites.join("+"),
            seed: self.seed.min(o.seed),
            fixtures: self.fixtures + o.fixtures,
            pass: true,
            laws: laws.into_values().collect(),
        };
        out.refresh();
        out
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV row per `(law, fixture class)`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        write_csv(std::slice::from_ref(self), w)
    }
}

pub fn write_csv<W: std::io::Write>(reports: &[ValuationReport], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| crate::Error::Io(std::io::Error::other(e));
    wr.write_record([
        "suite",
        "seed",
        "fixtures",
        "law",
        "fixture_class",
        "checks",
        "max_residual",
        "tolerance",
        "pass",
        "expected_failure",
        "witness",
    ])
    .map_err(io)?;
    for r in reports {
        for l in &r.laws {
            wr.write_record([
                r.suite.clone(),
                r.seed.to_string(),
                r.fixtures.to_string(),
                l.name.clone(),
                l.fixture_class.clone(),
                l.checks.to_string(),
                format!("{:e}", l.max_residual),
                format!("{:e}", l.tolerance),
                l.pass.to_string(),
                l.expected_failure.to_string(),
                l.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Running maximum of residuals for one law.
#[derive(Clone, Debug)]
pub struct LawAccumulator {
    name: String,
    class: String,
    tolerance: f64,
    max_residual: f64,
    pass: bool,
    checks: u64,
    witness: Option<Json>,
    expected_failure: bool,
}

impl LawAccumulator {
    pub fn new(name: &str, class: &str, tolerance: f64) -> Self {
        LawAccumulator {
            name: name.into(),
            class: class.into(),
            tolerance,
            max_residual: 0.0,
            pass: true,
            checks: 0,
            witness: None,
            expected_failure: false,
        }
    }

    pub fn expect_failure(mut self) -> Self {
        self.expected_failure = true;
        self
    }

    /// Records a residual; the witness closure runs only for the first failure.
    pub fn record(&mut self, r: Residual, witness: impl FnOnce() -> Json) {
        self.checks += 1;
        let (value, ok) = if r.exact { (r.abs, r.abs == 0.0) } else { (r.rel, r.rel <= self.tolerance) };
        self.max_residual = self.max_residual.max(value);
        if !ok && self.pass {
            self.pass = false;
            self.witness = Some(witness());
        }
    }

    /// Records a boolean check (residual 0 or 1).
    pub fn record_bool(&mut self, ok: bool, witness: impl FnOnce() -> Json) {
        let r = if ok { Residual::ZERO } else { Residual { exact: true, abs: 1.0, rel: 1.0 } };
        self.record(r, witness);
    }

    /// Records a failure to even evaluate.
    pub fn record_error(&mut self, e: &crate::Error, witness: impl FnOnce() -> Json) {
        self.checks += 1;
        self.max_residual = f64::INFINITY;
        if self.pass {
            self.pass = false;
            let mut w = witness();
            if let Json::Object(m) = &mut w {
                m.insert("error".into(), Json::String(e.to_string()));
            }
            self.witness = Some(w);
        }
    }

    pub fn passed(&self) -> bool {
        self.pass
    }

    pub fn finish(self) -> LawReport {
        LawReport {
            name: self.name,
            fixture_class: self.class,
            max_residual: self.max_residual,
            tolerance: self.tolerance,
            pass: self.pass,
            checks: self.checks,
            expected_failure: self.expected_failure,
            witness: self.witness,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(name: &str, res: f64, pass: bool, w: Option<&str>) -> LawReport {
        LawReport {
            name: name.into(),
            fixture_class: "S".into(),
            max_residual: res,
            tolerance: 1e-9,
            pass,
            checks: 1,
            expected_failure: false,
            witness: w.map(|s| Json::String(s.into())),
        }
    }

    fn rep(suite: &str, seed: u64, laws: Vec<LawReport>) -> ValuationReport {
        let mut r = ValuationReport::new(suite, seed);
        r.fixtures = 3;
        for l in laws {
            r.push(l);
        }
        r
    }

    #[test]
    fn merge_is_associative_and_commutative() {
        let a = rep("a", 5, vec![law("x", 0.0, true, None)]);
        let b = rep("b", 2, vec![law("x", 1e-3, false, Some("w1")), law("y", 0.0, true, None)]);
        let c = rep("a", 9, vec![law("x", 1e-3, false, Some("w0"))]);
        let l = a.merge(&b).merge(&c);
        let r = a.merge(&b.merge(&c));
        assert_eq!(l, r);
        assert_eq!(a.merge(&b), b.merge(&a));
        assert_eq!(l.suite, "a+b");
        assert_eq!(l.seed, 2);
        assert_eq!(l.fixtures, 9);
        assert!(!l.pass);
        assert_eq!(l.laws[0].witness, Some(Json::String("w0".into())));
    }

    #[test]
    fn csv_has_one_row_per_law() {
        let a = rep("a", 1, vec![law("x", 0.0, true, None), law("y", 0.5, false, Some("w"))]);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn expected_failures_invert_pass() {
        let mut l = law("second", 1.0, false, Some("w"));
        l.expected_failure = true;
        let r = rep("weird", 1, vec![l]);
        assert!(r.pass);
    }
}
