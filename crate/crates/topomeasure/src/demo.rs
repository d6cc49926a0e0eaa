//! Worked examples with their expected-values tables.
//!
//! Each demo builds a space and a solid-set function, extends it, and
//! compares named values with the table. Claims that are not single values
//! (covers, witnesses, classifications) are reported as checks.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::builders;
use crate::extend::{self, Cover, ExtendError, TopMeasure, PROPER_TM};
use crate::region::Region;
use crate::report::{overall, Budget, Check, Verdict, Witness};
use crate::solid::{self, Model};
use crate::space::{FiniteSpace, SpaceError};
use crate::ssf::{self, SolidSetFunction, SsfError, TwoPointRule};
use crate::value::Value;

pub const DEMOS: &[&str] = &[
    "aarnes-disk",
    "three-points-sphere",
    "npoints",
    "punctured-disk",
    "line-plane",
    "two-point-plane",
    "threshold-plane",
];

/// The (space, solid-set function) pairs behind the demos, as builtin name
/// and descriptor.
pub const SHIPPED: &[(&str, &str)] = &[
    ("disk(2)", "aarnes-circle B=@rim p=@center"),
    ("sphere(3)", "point-majority points=q0,q1,q2"),
    ("sphere(3)", "point-majority points=n,s,q0,q1,q2"),
    ("punctured-disk(2)", "aarnes-circle B=@rim p=w"),
    ("plane(3)", "aarnes-circle B=@line p=@p"),
    (
        "plane(3)",
        "two-point p1=p1_2 p2=p3_2 w=@uniform rule=doubled-local",
    ),
    ("plane(3)", "threshold w=@uniform*1/4 t=1"),
];

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("unknown demo {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Ssf(#[from] SsfError),
    #[error(transparent)]
    Extend(#[from] ExtendError),
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// Follows from the definitions with no computation.
    Immediate,
    /// Stated in the worked example the demo reproduces.
    WorkedExample,
    /// Computed independently by brute force and frozen.
    Computed,
}

/// Which set function a row reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reads {
    Lambda,
    Mu,
}

#[derive(Debug, Clone, Serialize)]
pub struct Expectation {
    pub name: String,
    pub region: String,
    pub reads: Reads,
    pub expected: Value,
    pub actual: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub basis: Basis,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub demo: String,
    pub space: String,
    pub function: String,
    pub expectations: Vec<Expectation>,
    pub claims: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover: Option<Cover>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub verdict: &'static str,
}

impl DemoReport {
    pub fn expectation(&self, name: &str) -> Option<&Expectation> {
        self.expectations.iter().find(|e| e.name == name)
    }

    pub fn claim(&self, name: &str) -> Option<&Verdict> {
        self.claims
            .iter()
            .find(|c| c.name == name)
            .map(|c| &c.verdict)
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

struct Run {
    model: Arc<Model>,
    lambda: Arc<SolidSetFunction>,
    mu: TopMeasure,
    budget: Budget,
    rep: DemoReport,
}

impl Run {
    fn new(demo: &str, space: &str, ssf: &str, budget: Budget) -> Result<Run, DemoError> {
        let model = Model::new(builders::builtin(space)?);
        let lambda = Arc::new(ssf::parse_descriptor(Arc::clone(&model), ssf)?);
        Ok(Run::with(demo, model, lambda, budget))
    }

    fn with(demo: &str, model: Arc<Model>, lambda: Arc<SolidSetFunction>, budget: Budget) -> Run {
        let mu = TopMeasure::extend(Arc::clone(&lambda));
        let rep = DemoReport {
            demo: demo.to_string(),
            space: model.space().name().to_string(),
            function: lambda.describe(),
            expectations: Vec::new(),
            claims: Vec::new(),
            cover: None,
            classification: None,
            notes: Vec::new(),
            verdict: "pass",
        };
        Run {
            model,
            lambda,
            mu,
            budget,
            rep,
        }
    }

    fn space(&self) -> &FiniteSpace {
        self.model.space()
    }

    fn label(&self, name: &str) -> Region {
        self.space().label(name).unwrap_or(Region::EMPTY)
    }

    fn parse(&self, lit: &str) -> Region {
        self.space().parse_region(lit).unwrap_or(Region::EMPTY)
    }

    fn mu(&self, r: Region) -> Result<Value, ExtendError> {
        self.mu.value(r)
    }

    fn expect(&mut self, name: &str, r: Region, reads: Reads, expected: Value, basis: Basis) {
        let got = match reads {
            Reads::Mu => self.mu(r).map_err(|e| e.to_string()),
            Reads::Lambda => {
                if r.is_empty() {
                    Ok(Value::ZERO)
                } else {
                    self.lambda
                        .evaluate(r)
                        .map(Value::Finite)
                        .map_err(|e| e.to_string())
                }
            }
        };
        let (actual, error) = match got {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e)),
        };
        self.rep.expectations.push(Expectation {
            name: name.to_string(),
            region: self.space().format_region(r),
            reads,
            expected,
            ok: actual == Some(expected),
            actual,
            error,
            basis,
        });
    }

    fn claim(&mut self, name: &str, v: Verdict) {
        self.rep.claims.push(Check::new(name, v));
    }

    /// Claims that the cover search finds a cover of `target` by μ-null
    /// solid sets.
    fn cover(&mut self, name: &str, target: Option<Region>, max_parts: usize) {
        let v =
            match extend::find_nonsubadditive_cover(&self.mu, target, max_parts, true, self.budget)
            {
                Ok(Some(c)) => {
                    let sp = self.space();
                    let mut w =
                        Witness::new(format!("cover with sum {} < {}", c.sum, c.target_value))
                            .item(sp, "target", c.target_cells, Some(c.target_value));
                    for (&p, &v) in c.part_cells.iter().zip(&c.values) {
                        w = w.item(sp, "part", p, Some(v));
                    }
                    self.rep.cover = Some(c);
                    Verdict::pass_with(format!("{}", serde_json::json!(w)))
                }
                Ok(None) => Verdict::fail(Witness::new(format!(
                    "no cover with at most {max_parts} μ-null parts"
                ))),
                Err(e) => Verdict::unknown(e.to_string()),
            };
        self.claim(name, v);
    }

    /// Claims that `parts` are pairwise disjoint or at least cover `target`,
    /// are solid, and have μ-sum below μ(target).
    fn explicit_cover(&mut self, name: &str, target: Region, parts: &[(&str, Region)]) {
        let sp = self.space();
        let mut w = Witness::new("explicit cover");
        let mut union = Region::EMPTY;
        let mut sum = Value::ZERO;
        let mut problems = Vec::new();
        for &(role, p) in parts {
            union |= p;
            match self.mu(p) {
                Ok(v) => {
                    sum = sum + v;
                    w = w.item(sp, role, p, Some(v));
                }
                Err(e) => problems.push(e.to_string()),
            }
            if !solid::is_solid(sp, p) {
                problems.push(format!("{role} is not solid"));
            }
        }
        if !target.is_subset(union) {
            problems.push("parts do not cover the target".to_string());
        }
        let tv = self.mu(target).unwrap_or(Value::ZERO);
        w = w.item(sp, "target", target, Some(tv));
        if sum >= tv {
            problems.push(format!("sum {sum} is not below {tv}"));
        }
        let v = if problems.is_empty() {
            Verdict::pass_with(format!("{}", serde_json::json!(w)))
        } else {
            w.reason = problems.join("; ");
            Verdict::fail(w)
        };
        self.claim(name, v);
    }

    /// Claims the validator classifies μ as a proper topological measure.
    fn classify(&mut self) -> Option<extend::TmValidationReport> {
        match extend::validate_tm(&self.mu, self.budget) {
            Ok(r) => {
                let v = match r.check("subadditivity") {
                    Some(Verdict::Fail { witness }) if r.classification == PROPER_TM => {
                        Verdict::pass_with(witness.reason.clone())
                    }
                    Some(Verdict::Unknown { reason }) => Verdict::unknown(reason.clone()),
                    _ => Verdict::fail(Witness::new(format!("classified as {}", r.classification))),
                };
                self.rep.classification = Some(r.classification.clone());
                self.claim("proper-topological-measure", v);
                Some(r)
            }
            Err(e) => {
                self.claim(
                    "proper-topological-measure",
                    Verdict::unknown(e.to_string()),
                );
                None
            }
        }
    }

    fn finish(mut self) -> DemoReport {
        let values_ok = self.rep.expectations.iter().all(|e| e.ok);
        let claims = overall(self.rep.claims.iter().map(|c| &c.verdict));
        self.rep.verdict = if !values_ok || claims == "fail" {
            "fail"
        } else {
            claims
        };
        self.rep
    }
}

/// Runs a demo by name.
pub fn run(name: &str, budget: Budget) -> Result<DemoReport, DemoError> {
    match name {
        "aarnes-disk" => aarnes_disk(budget),
        "three-points-sphere" => three_points_sphere(budget),
        "npoints" => npoints(budget),
        "punctured-disk" => punctured_disk(budget),
        "line-plane" => line_plane(budget),
        "two-point-plane" => two_point_plane(budget),
        "threshold-plane" => threshold_plane(budget),
        other => Err(DemoError::Unknown(other.to_string())),
    }
}

use Basis::{Computed, Immediate, WorkedExample};
use Reads::{Lambda, Mu};

/// The closed disk, B the rim circle and p the center.
fn aarnes_disk(budget: Budget) -> Result<DemoReport, DemoError> {
    let mut run = Run::new(
        "aarnes-disk",
        "disk(2)",
        "aarnes-circle B=@rim p=@center",
        budget,
    )?;
    let sp = run.space().clone();
    let x = sp.points();
    let rim = run.label("rim");
    // A1: the closed arc made of the two rim edges at r2_1; A2: the closure
    // of the rest of the rim; A3: the open disk X minus B.
    let r21 = run.parse("r2_1");
    let arc_edges: Region = (rim & sp.star(r21)) - r21;
    let a1 = sp.closure(arc_edges);
    let a2 = sp.closure(rim - a1);
    let a3 = x - rim;
    run.expect("mu(X)", x, Mu, Value::ONE, WorkedExample);
    run.expect("mu(B)", rim, Mu, Value::ONE, Immediate);
    run.expect("mu(A1)", a1, Mu, Value::ZERO, WorkedExample);
    run.expect("mu(A2)", a2, Mu, Value::ZERO, WorkedExample);
    run.expect("mu(A3)", a3, Mu, Value::ZERO, WorkedExample);
    run.explicit_cover(
        "arcs-and-interior-cover",
        x,
        &[("A1", a1), ("A2", a2), ("A3", a3)],
    );
    run.cover("cover-search", None, 3);
    run.classify();
    Ok(run.finish())
}

/// Majority of three equator points on the sphere.
fn three_points_sphere(budget: Budget) -> Result<DemoReport, DemoError> {
    let mut run = Run::new(
        "three-points-sphere",
        "sphere(3)",
        "point-majority points=q0,q1,q2",
        budget,
    )?;
    let sp = run.space().clone();
    let x = sp.points();
    let pts = run.parse("q0,q1,q2");
    run.expect("mu(X)", x, Mu, Value::ONE, WorkedExample);
    run.expect("mu(q0)", run.parse("q0"), Mu, Value::ZERO, Immediate);
    // Every connected open or closed region holding two marked points.
    let mut bad: Option<(Region, Value)> = None;
    let mut seen = 0u64;
    let mut visit = |r: Region| {
        if (r & pts).len() >= 2 && sp.is_connected(r) {
            seen += 1;
            let v = run.mu.value(r).unwrap_or(Value::Infinite);
            if v != Value::ONE {
                bad = Some((r, v));
                return false;
            }
        }
        true
    };
    if solid::for_each_up_set(&sp, x, &mut visit) {
        solid::for_each_down_set(&sp, x, &mut visit);
    }
    let v = match bad {
        None => Verdict::pass_with(format!("{seen} connected regions checked")),
        Some((r, v)) => Verdict::fail(
            Witness::new("connected region with two marked points").item(&sp, "A", r, Some(v)),
        ),
    };
    run.claim("two-points-connected-is-one", v);
    run.cover("three-set-cover", None, 3);
    run.classify();
    Ok(run.finish())
}

/// Five marked points on the sphere: λ(A) = k/2 when ♯A ∈ {2k, 2k+1}.
fn npoints(budget: Budget) -> Result<DemoReport, DemoError> {
    let mut run = Run::new(
        "npoints",
        "sphere(3)",
        "point-majority points=n,s,q0,q1,q2",
        budget,
    )?;
    let pts = run.parse("n,s,q0,q1,q2");
    let cat = run.model.catalog();
    let solids: Vec<Region> = cat.compact.iter().chain(&cat.open).copied().collect();
    for count in 0..=5usize {
        let expected = Value::ratio((count / 2) as i64, 2);
        let basis = if count < 2 { Immediate } else { WorkedExample };
        let name = format!("lambda(#A={count})");
        match solids.iter().find(|a| (**a & pts).len() == count) {
            Some(&a) => run.expect(&name, a, Lambda, expected, basis),
            None => run.claim(
                &name,
                Verdict::fail(Witness::new(format!(
                    "no solid set with {count} marked points"
                ))),
            ),
        }
    }
    run.classify();
    Ok(run.finish())
}

/// The disk without its center; B the rim, p the removed center, so λ′(A)
/// is 1 exactly when A contains the rim.
fn punctured_disk(budget: Budget) -> Result<DemoReport, DemoError> {
    let mut run = Run::new(
        "punctured-disk",
        "punctured-disk(2)",
        "aarnes-circle B=@rim p=w",
        budget,
    )?;
    let sp = run.space().clone();
    let x = sp.points();
    let (f, u1, u2, c) = (
        run.label("axis"),
        run.label("upper"),
        run.label("lower"),
        run.label("rim"),
    );
    run.expect("mu(F)", f, Mu, Value::ZERO, WorkedExample);
    run.expect("mu(U1)", u1, Mu, Value::ZERO, WorkedExample);
    run.expect("mu(U2)", u2, Mu, Value::ZERO, WorkedExample);
    run.expect("mu(C)", c, Mu, Value::ONE, WorkedExample);
    run.expect("mu(X)", x, Mu, Value::ONE, WorkedExample);
    // F ⊔ U1 ⊔ U2 = X with μ-sum 0.
    let sum = [f, u1, u2]
        .iter()
        .map(|&r| run.mu(r).unwrap_or(Value::Infinite))
        .fold(Value::ZERO, |a, b| a + b);
    let total = run.mu(x).unwrap_or(Value::Infinite);
    let partition =
        f.is_disjoint(u1) && f.is_disjoint(u2) && u1.is_disjoint(u2) && (f | u1 | u2) == x;
    let w = Witness::new("closed F and open U1 ⊔ U2 partition X")
        .item(&sp, "F", f, run.mu(f).ok())
        .item(&sp, "U1 ⊔ U2", u1 | u2, run.mu(u1 | u2).ok())
        .item(&sp, "X", x, Some(total));
    let v = if partition && sp.is_closed(f) && sp.is_open(u1 | u2) && sum != total {
        Verdict::pass_with(format!("{}", serde_json::json!(w)))
    } else {
        Verdict::fail(w)
    };
    run.claim("closed-open-additivity-fails", v);
    if let Some(r) = run.classify() {
        let tm1 = r
            .check("tm1")
            .cloned()
            .unwrap_or(Verdict::unknown("missing"));
        run.claim("tm1", tm1);
        let coadd = match r.check("closed-open-additivity") {
            Some(Verdict::Fail { witness }) => Verdict::pass_with(witness.reason.clone()),
            Some(Verdict::Unknown { reason }) => Verdict::unknown(reason.clone()),
            _ => Verdict::fail(Witness::new(
                "validator found no closed-open additivity failure",
            )),
        };
        run.claim("validator-reports-closed-open-failure", coadd);
    }
    Ok(run.finish())
}

/// The plane with the line l (row y = 1) and a point p off it:
/// λ(A) = 1 iff A meets l and contains p.
fn line_plane(budget: Budget) -> Result<DemoReport, DemoError> {
    let mut run = Run::new(
        "line-plane",
        "plane(3)",
        "aarnes-circle B=@line p=@p",
        budget,
    )?;
    let sp = run.space().clone();
    let x = sp.points();
    let f = run.label("below");
    run.expect("mu(F)", f, Mu, Value::ZERO, WorkedExample);
    run.expect("mu(X-F)", x - f, Mu, Value::ZERO, WorkedExample);
    run.expect("mu(X)", x, Mu, Value::ONE, WorkedExample);
    let p = run.label("p");
    run.expect("mu(star p)", sp.star(p), Mu, Value::ZERO, Computed);
    // A bounded open V with μ(V) = μ(X∖V) = 0, over every bounded open set.
    let total = run.mu(x).unwrap_or(Value::Infinite);
    let bounded_cells: Region = x.iter().filter(|&c| sp.is_bounded(sp.up(c))).collect();
    let mut found: Option<Region> = None;
    let mut scanned = 0u64;
    solid::for_each_up_set(&sp, bounded_cells, &mut |v| {
        if v.is_empty() {
            return true;
        }
        scanned += 1;
        let a = run.mu.value(v).unwrap_or(Value::Infinite);
        let b = run.mu.value(x - v).unwrap_or(Value::Infinite);
        if a.is_zero() && b.is_zero() {
            found = Some(v);
            return false;
        }
        true
    });
    let v = match found {
        Some(v) => Verdict::pass_with(format!(
            "{}",
            serde_json::json!(Witness::new("μ(V) = μ(X∖V) = 0")
                .item(&sp, "V", v, Some(Value::ZERO))
                .item(&sp, "X∖V", x - v, Some(Value::ZERO))
                .item(&sp, "X", x, Some(total)))
        )),
        None => {
            let sv = sp.star(p);
            Verdict::fail(
                Witness::new(format!(
                    "none of the {scanned} bounded open sets has μ(V) = μ(X∖V) = 0"
                ))
                .item(&sp, "V", sv, run.mu(sv).ok())
                .item(&sp, "X∖V", x - sv, run.mu(x - sv).ok()),
            )
        }
    };
    run.claim("bounded-open-null-pair", v);
    // Closed F with a bounded open V ⊆ F where μ(F) ≠ μ(V) + μ(F∖V).
    let mut closed: Vec<Region> = vec![x];
    for &r in sp.labels().values() {
        for s in [r, x - r] {
            if sp.is_closed(s) && !closed.contains(&s) {
                closed.push(s);
            }
        }
    }
    let mut dual: Option<Witness> = None;
    'outer: for &fc in &closed {
        let vf = run.mu(fc).unwrap_or(Value::Infinite);
        let mut hit = None;
        solid::for_each_up_set(&sp, bounded_cells & fc, &mut |v| {
            if v.is_empty() || !sp.is_closed(fc - v) {
                return true;
            }
            let a = run.mu.value(v).unwrap_or(Value::Infinite);
            let b = run.mu.value(fc - v).unwrap_or(Value::Infinite);
            if a + b != vf {
                hit = Some((v, a, b));
                return false;
            }
            true
        });
        if let Some((v, a, b)) = hit {
            dual = Some(
                Witness::new("μ(F) differs from μ(V) + μ(F∖V)")
                    .item(&sp, "F", fc, Some(vf))
                    .item(&sp, "V", v, Some(a))
                    .item(&sp, "F∖V", fc - v, Some(b)),
            );
            break 'outer;
        }
    }
    let v = match dual {
        Some(w) => Verdict::pass_with(format!("{}", serde_json::json!(w))),
        None => Verdict::fail(Witness::new(
            "no closed F and bounded open V ⊆ F with μ(F) ≠ μ(V) + μ(F∖V)",
        )),
    };
    run.claim("closed-dual-carving-fails", v);
    run.classify();
    Ok(run.finish())
}

/// Two marked points with vertex-count weights; K1 and K2 are closed plus
/// shapes around p1 and p2 that touch at the middle vertex.
fn two_point_plane(budget: Budget) -> Result<DemoReport, DemoError> {
    let model = Model::new(builders::builtin("plane(3)")?);
    let sp = model.space().clone();
    let k1 = sp.closure(sp.parse_region("p1_1-p1_2,p1_2-p1_3,p1_2-p2_2")?);
    let k2 = sp.closure(sp.parse_region("p3_1-p3_2,p3_2-p3_3,p2_2-p3_2")?);
    let c = k1 | k2;
    let weights = ssf::Weights::parse(&sp, "@uniform")?;
    let (p1, p2) = (
        sp.index_of("p1_2").unwrap_or(0),
        sp.index_of("p3_2").unwrap_or(0),
    );
    let local = Arc::new(SolidSetFunction::two_point(
        Arc::clone(&model),
        p1,
        p2,
        weights.clone(),
        TwoPointRule::DoubledLocal,
        ssf::OpenRule::Literal,
    )?);
    let mut run = Run::with("two-point-plane", Arc::clone(&model), local, budget);
    run.expect("lambda(K1)", k1, Lambda, Value::int(4), WorkedExample);
    run.expect("lambda(K2)", k2, Lambda, Value::int(4), WorkedExample);
    run.expect("lambda(C)", c, Lambda, Value::int(14), WorkedExample);
    run.expect(
        "lambda(empty-count)",
        run.parse("p2_1"),
        Lambda,
        Value::ZERO,
        Immediate,
    );
    run.expect("mu(C)", c, Mu, Value::int(14), Computed);
    let literal = SolidSetFunction::two_point(
        Arc::clone(&model),
        p1,
        p2,
        weights.clone(),
        TwoPointRule::AsWritten,
        ssf::OpenRule::Literal,
    )?;
    let lx = weights.sum(sp.points());
    let lit_c = literal.evaluate(c).map(Value::Finite).ok();
    run.rep.notes.push(format!(
        "rule as-written gives lambda(C) = 2*lambda0(X) = {}; the closed-form value 4*pi corresponds to 2*lambda0(C)",
        lit_c.map_or_else(|| "error".to_string(), |v| v.to_string())
    ));
    run.rep.notes.push(format!(
        "lambda0(X) = {lx} is finite on the finite window, so mu(X) is finite here"
    ));
    let sum = run.mu(k1).unwrap_or(Value::Infinite) + run.mu(k2).unwrap_or(Value::Infinite);
    let vc = run.mu(c).unwrap_or(Value::ZERO);
    let w = Witness::new("μ(K1 ∪ K2) exceeds μ(K1) + μ(K2)")
        .item(&sp, "K1", k1, run.mu(k1).ok())
        .item(&sp, "K2", k2, run.mu(k2).ok())
        .item(&sp, "C", c, Some(vc));
    let v = if vc > sum {
        Verdict::pass_with(format!("{}", serde_json::json!(w)))
    } else {
        Verdict::fail(w)
    };
    run.claim("not-subadditive", v);
    run.classify();
    Ok(run.finish())
}

/// Weight 1/4 per vertex with threshold 1: the compact plus shape around p
/// (five vertices) is covered by four closed edges of weight 1/2.
fn threshold_plane(budget: Budget) -> Result<DemoReport, DemoError> {
    let mut run = Run::new(
        "threshold-plane",
        "plane(3)",
        "threshold w=@uniform*1/4 t=1",
        budget,
    )?;
    let sp = run.space().clone();
    let x = sp.points();
    let edges = ["p1_2-p2_2", "p2_1-p2_2", "p2_2-p2_3", "p2_2-p3_2"];
    let parts: Vec<Region> = edges
        .iter()
        .map(|e| sp.closure(sp.parse_region(e).unwrap_or(Region::EMPTY)))
        .collect();
    let plus = parts.iter().fold(Region::EMPTY, |a, &b| a | b);
    run.expect("lambda(K)", plus, Lambda, Value::ratio(5, 4), Computed);
    run.expect("mu(K)", plus, Mu, Value::ratio(5, 4), WorkedExample);
    for (i, &p) in parts.iter().enumerate() {
        run.expect(
            &format!("mu(K{})", i + 1),
            p,
            Mu,
            Value::ZERO,
            WorkedExample,
        );
    }
    run.expect("mu(X)", x, Mu, Value::Infinite, WorkedExample);
    let named: Vec<(String, Region)> = parts
        .iter()
        .enumerate()
        .map(|(i, &p)| (format!("K{}", i + 1), p))
        .collect();
    let refs: Vec<(&str, Region)> = named.iter().map(|(n, r)| (n.as_str(), *r)).collect();
    run.explicit_cover("sub-threshold-cover", plus, &refs);
    run.classify();
    Ok(run.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_demo_is_an_error() {
        assert!(matches!(
            run("nope", Budget::DEFAULT),
            Err(DemoError::Unknown(_))
        ));
    }

    #[test]
    fn npoints_table() {
        let r = run("npoints", Budget::DEFAULT).unwrap();
        assert!(r.passed(), "{r:#?}");
    }
}
