//! Solid-set functions: the example families and the axiom validator.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::partition;
use crate::region::Region;
use crate::report::{Budget, Check, Meter, Verdict, Witness};
use crate::solid::Model;
use crate::space::{FiniteSpace, SpaceError};
use crate::value::{Rational, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SsfError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("{0} is not a bounded solid set")]
    NotBoundedSolid(String),
    #[error("the solid-set catalog of {0} was truncated; raise the cap")]
    CatalogTruncated(String),
    #[error("a majority function needs an odd number of at least 3 points, got {0}")]
    PointCount(usize),
    #[error("{0} is not a vertex cell")]
    NotAVertex(String),
    #[error("the marked point {0} lies in B")]
    PointInB(String),
    #[error("B must be nonempty")]
    EmptyB,
    #[error("B must be a closed subcomplex or a set of vertices")]
    BadB,
    #[error("the two marked points coincide")]
    SamePoints,
    #[error("threshold must be positive")]
    ThresholdNotPositive,
    #[error("bad solid-set function descriptor: {0}")]
    Parse(String),
}

/// How a family defined by a formula is evaluated on open solid sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpenRule {
    /// Apply the formula to the open set itself.
    Literal,
    /// Use the largest value the formula gives a compact solid set inside.
    InnerRegular,
}

impl OpenRule {
    pub fn parse(s: &str) -> Option<OpenRule> {
        match s {
            "literal" => Some(OpenRule::Literal),
            "inner" | "inner-regular" => Some(OpenRule::InnerRegular),
            _ => None,
        }
    }
}

/// The two readings of the two-point function on sets holding both points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoPointRule {
    /// `2 λ₀(X)`.
    AsWritten,
    /// `2 λ₀(A)`.
    DoubledLocal,
}

/// Whether a set is evaluated as an open or a compact solid set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Open,
    Compact,
}

/// Nonnegative rational weight per cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights(Vec<Rational>);

impl Weights {
    pub fn zeros(space: &FiniteSpace) -> Self {
        Weights(vec![Rational::zero(); space.cell_count()])
    }

    /// Weight `q` on every vertex of X.
    pub fn uniform(space: &FiniteSpace, q: Rational) -> Self {
        Weights::on_vertices(space, space.points(), q)
    }

    /// Weight `q` on every vertex of `r`.
    pub fn on_vertices(space: &FiniteSpace, r: Region, q: Rational) -> Self {
        let mut w = Weights::zeros(space);
        for v in r & space.vertices() {
            w.0[v] = q;
        }
        w
    }

    pub fn set(&mut self, cell: usize, q: Rational) {
        self.0[cell] = q;
    }

    pub fn get(&self, cell: usize) -> Rational {
        self.0[cell]
    }

    pub fn sum(&self, r: Region) -> Rational {
        r.iter().map(|c| self.0[c]).sum()
    }

    pub fn support(&self) -> Region {
        (0..self.0.len())
            .filter(|&i| !self.0[i].is_zero())
            .collect()
    }

    /// Parses `@uniform`, a region literal (weight 1 on its vertices) or
    /// `id:q,id:q`, each optionally followed by `*q`.
    pub fn parse(space: &FiniteSpace, text: &str) -> Result<Self, SsfError> {
        let bad = || SsfError::Parse(format!("bad weight spec {text:?}"));
        let (body, scale) = match text.rsplit_once('*') {
            Some((b, q)) => (b, parse_rational(q).ok_or_else(bad)?),
            None => (text, Rational::one()),
        };
        if body.contains(':') {
            let mut w = Weights::zeros(space);
            for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (id, q) = item.split_once(':').ok_or_else(bad)?;
                let c = space
                    .index_of(id.trim())
                    .ok_or_else(|| SsfError::Space(SpaceError::RegionToken(id.to_string())))?;
                w.0[c] = parse_rational(q).ok_or_else(bad)? * scale;
            }
            return Ok(w);
        }
        let r = if body == "@uniform" {
            space.points()
        } else {
            space.parse_region(body)?
        };
        Ok(Weights::on_vertices(space, r, scale))
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    match s.trim().parse::<Value>().ok()? {
        Value::Finite(r) => Some(r),
        Value::Infinite => None,
    }
}

/// Closure type for user-defined formulas.
pub type Formula = dyn Fn(&FiniteSpace, Region, SetKind) -> Rational + Send + Sync;

/// A family tag with its parameters.
#[derive(Clone)]
pub enum SsfKind {
    Zero,
    PointMajority {
        points: Region,
    },
    Aarnes {
        b: Region,
        p: usize,
    },
    TwoPoint {
        p1: usize,
        p2: usize,
        weights: Weights,
        rule: TwoPointRule,
    },
    Threshold {
        weights: Weights,
        t: Rational,
    },
    Measure {
        weights: Weights,
    },
    Custom {
        name: String,
        formula: Arc<Formula>,
    },
}

impl fmt::Debug for SsfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SsfKind::Zero => f.write_str("Zero"),
            SsfKind::PointMajority { points } => write!(f, "PointMajority({points:?})"),
            SsfKind::Aarnes { b, p } => write!(f, "Aarnes(b={b:?}, p={p})"),
            SsfKind::TwoPoint { p1, p2, rule, .. } => write!(f, "TwoPoint({p1}, {p2}, {rule:?})"),
            SsfKind::Threshold { t, .. } => write!(f, "Threshold(t={t})"),
            SsfKind::Measure { .. } => f.write_str("Measure"),
            SsfKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

struct Table {
    values: HashMap<Region, Rational>,
    /// Minimal compact solid sets of each value level, with their values.
    floor: Vec<(Region, Rational)>,
}

/// A real-valued function on the bounded solid sets of a space.
pub struct SolidSetFunction {
    model: Arc<Model>,
    kind: SsfKind,
    open_rule: OpenRule,
    table: OnceLock<Result<Table, SsfError>>,
}

impl fmt::Debug for SolidSetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolidSetFunction")
            .field("space", &self.model.space().name())
            .field("kind", &self.kind)
            .field("open_rule", &self.open_rule)
            .finish()
    }
}

fn require_vertex(space: &FiniteSpace, c: usize) -> Result<(), SsfError> {
    if !space.vertices().contains(c) {
        return Err(SsfError::NotAVertex(space.cell(c).id.clone()));
    }
    Ok(())
}

impl SolidSetFunction {
    pub fn new(model: Arc<Model>, kind: SsfKind, open_rule: OpenRule) -> Self {
        SolidSetFunction {
            model,
            kind,
            open_rule,
            table: OnceLock::new(),
        }
    }

    pub fn zero(model: Arc<Model>) -> Self {
        SolidSetFunction::new(model, SsfKind::Zero, OpenRule::Literal)
    }

    /// `λ(A) = k/n` when `A` holds `2k` or `2k+1` of the `2n+1` points.
    pub fn point_majority(
        model: Arc<Model>,
        points: Region,
        open_rule: OpenRule,
    ) -> Result<Self, SsfError> {
        let space = model.space();
        for c in points {
            require_vertex(space, c)?;
        }
        if points.len() < 3 || points.len().is_multiple_of(2) {
            return Err(SsfError::PointCount(points.len()));
        }
        Ok(SolidSetFunction::new(
            model,
            SsfKind::PointMajority { points },
            open_rule,
        ))
    }

    /// `λ(A) = 1` iff `B ⊆ A`, or `p ∈ A` and `A` meets `B`.
    ///
    /// `p` may be the infinity cell, which no bounded set contains.
    pub fn aarnes_circle(
        model: Arc<Model>,
        b: Region,
        p: usize,
        open_rule: OpenRule,
    ) -> Result<Self, SsfError> {
        let space = model.space();
        if b.is_empty() {
            return Err(SsfError::EmptyB);
        }
        space.check_region(b)?;
        let vertex_set = b.is_subset(space.vertices());
        if !vertex_set && !space.is_closed(b) {
            return Err(SsfError::BadB);
        }
        if Some(p) != space.infinity() {
            require_vertex(space, p)?;
        }
        if b.contains(p) {
            return Err(SsfError::PointInB(space.cell(p).id.clone()));
        }
        Ok(SolidSetFunction::new(
            model,
            SsfKind::Aarnes { b, p },
            open_rule,
        ))
    }

    pub fn two_point(
        model: Arc<Model>,
        p1: usize,
        p2: usize,
        weights: Weights,
        rule: TwoPointRule,
        open_rule: OpenRule,
    ) -> Result<Self, SsfError> {
        let space = model.space();
        require_vertex(space, p1)?;
        require_vertex(space, p2)?;
        if p1 == p2 {
            return Err(SsfError::SamePoints);
        }
        Ok(SolidSetFunction::new(
            model,
            SsfKind::TwoPoint {
                p1,
                p2,
                weights,
                rule,
            },
            open_rule,
        ))
    }

    /// Weight sum, cut to zero at or below `t` on open sets and below `t` on
    /// compact ones.
    pub fn threshold(
        model: Arc<Model>,
        weights: Weights,
        t: Rational,
        open_rule: OpenRule,
    ) -> Result<Self, SsfError> {
        if t <= Rational::zero() {
            return Err(SsfError::ThresholdNotPositive);
        }
        Ok(SolidSetFunction::new(
            model,
            SsfKind::Threshold { weights, t },
            open_rule,
        ))
    }

    /// Weight sum on compact solid sets, regularized from inside on open ones.
    pub fn restricted_measure(model: Arc<Model>, weights: Weights) -> Self {
        SolidSetFunction::new(model, SsfKind::Measure { weights }, OpenRule::InnerRegular)
    }

    pub fn custom(
        model: Arc<Model>,
        name: impl Into<String>,
        formula: Arc<Formula>,
        open_rule: OpenRule,
    ) -> Self {
        SolidSetFunction::new(
            model,
            SsfKind::Custom {
                name: name.into(),
                formula,
            },
            open_rule,
        )
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn space(&self) -> &FiniteSpace {
        self.model.space()
    }

    pub fn kind(&self) -> &SsfKind {
        &self.kind
    }

    pub fn open_rule(&self) -> OpenRule {
        self.open_rule
    }

    /// Short human-readable name.
    pub fn describe(&self) -> String {
        let sp = self.space();
        let rule = match self.open_rule {
            OpenRule::Literal => "literal",
            OpenRule::InnerRegular => "inner",
        };
        let body = match &self.kind {
            SsfKind::Zero => "zero".to_string(),
            SsfKind::PointMajority { points } => {
                format!("point-majority points={}", sp.format_region(*points))
            }
            SsfKind::Aarnes { b, p } => {
                format!(
                    "aarnes-circle B={} p={}",
                    sp.format_region(*b),
                    sp.cell(*p).id
                )
            }
            SsfKind::TwoPoint { p1, p2, rule, .. } => format!(
                "two-point p1={} p2={} rule={}",
                sp.cell(*p1).id,
                sp.cell(*p2).id,
                match rule {
                    TwoPointRule::AsWritten => "as-written",
                    TwoPointRule::DoubledLocal => "doubled-local",
                }
            ),
            SsfKind::Threshold { t, .. } => format!("threshold t={t}"),
            SsfKind::Measure { .. } => "measure".to_string(),
            SsfKind::Custom { name, .. } => name.clone(),
        };
        format!("{body} open={rule}")
    }

    /// The defining formula, applied without any regularization.
    pub fn formula(&self, a: Region, kind: SetKind) -> Rational {
        let space = self.space();
        match &self.kind {
            SsfKind::Zero => Rational::zero(),
            SsfKind::PointMajority { points } => {
                let n = (points.len() as i64 - 1) / 2;
                let k = (a & *points).len() as i64 / 2;
                Rational::new(k, n)
            }
            SsfKind::Aarnes { b, p } => {
                if b.is_subset(a) || (a.contains(*p) && a.intersects(*b)) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            SsfKind::TwoPoint {
                p1,
                p2,
                weights,
                rule,
            } => match a.contains(*p1) as u8 + a.contains(*p2) as u8 {
                0 => Rational::zero(),
                1 => weights.sum(a),
                _ => {
                    let base = match rule {
                        TwoPointRule::AsWritten => weights.sum(space.points()),
                        TwoPointRule::DoubledLocal => weights.sum(a),
                    };
                    base * Rational::from_integer(2)
                }
            },
            SsfKind::Threshold { weights, t } => {
                let w = weights.sum(a);
                let cut = match kind {
                    SetKind::Open => w <= *t,
                    SetKind::Compact => w < *t,
                };
                if cut {
                    Rational::zero()
                } else {
                    w
                }
            }
            SsfKind::Measure { weights } => weights.sum(a),
            SsfKind::Custom { formula, .. } => formula(space, a, kind),
        }
    }

    fn table(&self) -> Result<&Table, SsfError> {
        self.table
            .get_or_init(|| self.build_table())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn build_table(&self) -> Result<Table, SsfError> {
        let cat = self.model.catalog();
        if cat.truncated {
            return Err(SsfError::CatalogTruncated(self.space().name().to_string()));
        }
        let mut values = HashMap::with_capacity(cat.len());
        let compact: Vec<(Region, Rational)> = cat
            .compact
            .iter()
            .map(|&c| (c, self.formula(c, SetKind::Compact)))
            .collect();
        for &(c, v) in &compact {
            values.insert(c, v);
        }
        let floor = level_minima(&compact);
        for &u in &cat.open {
            if values.contains_key(&u) {
                continue;
            }
            let v = match self.open_rule {
                OpenRule::Literal => self.formula(u, SetKind::Open),
                OpenRule::InnerRegular => floor
                    .iter()
                    .filter(|(m, _)| m.is_subset(u))
                    .map(|&(_, v)| v)
                    .max()
                    .unwrap_or_else(Rational::zero),
            };
            values.insert(u, v);
        }
        Ok(Table { values, floor })
    }

    /// Value on a bounded solid set (open or compact).
    pub fn evaluate(&self, a: Region) -> Result<Rational, SsfError> {
        let t = self.table()?;
        t.values
            .get(&a)
            .copied()
            .ok_or_else(|| SsfError::NotBoundedSolid(self.space().format_region(a)))
    }

    /// Minimal compact solid sets of each value level.
    pub fn compact_floor(&self) -> Result<&[(Region, Rational)], SsfError> {
        Ok(&self.table()?.floor)
    }

    /// Every bounded solid set with its value, open ones first.
    pub fn values(&self) -> Result<Vec<(Region, Rational)>, SsfError> {
        let t = self.table()?;
        Ok(self
            .model
            .catalog()
            .all()
            .into_iter()
            .map(|r| (r, t.values[&r]))
            .collect())
    }

    /// True when every value is 0 or 1.
    pub fn is_two_valued(&self) -> Result<bool, SsfError> {
        Ok(self
            .table()?
            .values
            .values()
            .all(|v| v.is_zero() || v.is_one()))
    }

    /// Supremum of λ over compact solid sets.
    pub fn compact_sup(&self) -> Result<Rational, SsfError> {
        Ok(self
            .table()?
            .floor
            .iter()
            .map(|&(_, v)| v)
            .max()
            .unwrap_or_else(Rational::zero))
    }
}

/// For each distinct value `v`, the inclusion-minimal sets whose value is at
/// least `v`; deduplicated, each with its own value.
pub fn level_minima(items: &[(Region, Rational)]) -> Vec<(Region, Rational)> {
    let levels: BTreeSet<Rational> = items.iter().map(|&(_, v)| v).collect();
    let mut sorted: Vec<(Region, Rational)> = items.to_vec();
    sorted.sort_by_key(|&(r, _)| (r.len(), r));
    let mut out: Vec<(Region, Rational)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for level in levels {
        let mut mins: Vec<Region> = Vec::new();
        for &(r, v) in &sorted {
            if v >= level && !mins.iter().any(|m| m.is_subset(r)) {
                mins.push(r);
                if seen.insert(r) {
                    out.push((r, v));
                }
            }
        }
    }
    out
}

/// For each distinct value `v`, the inclusion-maximal sets whose value is at
/// most `v`; deduplicated, each with its own value.
pub fn level_maxima(items: &[(Region, Rational)]) -> Vec<(Region, Rational)> {
    let levels: BTreeSet<Rational> = items.iter().map(|&(_, v)| v).collect();
    let mut sorted: Vec<(Region, Rational)> = items.to_vec();
    sorted.sort_by_key(|&(r, _)| (std::cmp::Reverse(r.len()), r));
    let mut out: Vec<(Region, Rational)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for level in levels {
        let mut maxs: Vec<Region> = Vec::new();
        for &(r, v) in &sorted {
            if v <= level && !maxs.iter().any(|m| r.is_subset(*m)) {
                maxs.push(r);
                if seen.insert(r) {
                    out.push((r, v));
                }
            }
        }
    }
    out
}

/// Parses a descriptor such as `point-majority points=q0,q1,q2` or
/// `threshold w=@uniform*1/2 t=1 open=literal`.
pub fn parse_descriptor(model: Arc<Model>, text: &str) -> Result<SolidSetFunction, SsfError> {
    let mut words = text.split_whitespace();
    let family = words
        .next()
        .ok_or_else(|| SsfError::Parse("empty descriptor".into()))?;
    let mut args: HashMap<&str, &str> = HashMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| SsfError::Parse(format!("expected key=value, got {w:?}")))?;
        args.insert(k, v);
    }
    let space = model.space();
    let cell = |key: &str| -> Result<usize, SsfError> {
        let id = args
            .get(key)
            .ok_or_else(|| SsfError::Parse(format!("missing {key}=")))?;
        if let Some(w) = space.infinity() {
            if space.cell(w).id == *id {
                return Ok(w);
            }
        }
        if let Some(name) = id.strip_prefix('@') {
            let r = space
                .label(name)
                .ok_or_else(|| SsfError::Space(SpaceError::RegionToken(id.to_string())))?;
            return match (r.len(), r.iter().next()) {
                (1, Some(c)) => Ok(c),
                _ => Err(SsfError::Parse(format!(
                    "{key}={id} must name a single cell"
                ))),
            };
        }
        space
            .index_of(id)
            .ok_or_else(|| SsfError::Space(SpaceError::RegionToken(id.to_string())))
    };
    let region = |key: &str| -> Result<Region, SsfError> {
        let lit = args
            .get(key)
            .ok_or_else(|| SsfError::Parse(format!("missing {key}=")))?;
        Ok(space.parse_region(lit)?)
    };
    let weights = |default_uniform: bool| -> Result<Weights, SsfError> {
        match args.get("w") {
            Some(w) => Weights::parse(space, w),
            None if default_uniform => Ok(Weights::uniform(space, Rational::one())),
            None => Err(SsfError::Parse("missing w=".into())),
        }
    };
    let open_rule = match args.get("open") {
        Some(s) => {
            OpenRule::parse(s).ok_or_else(|| SsfError::Parse(format!("unknown open rule {s:?}")))?
        }
        None => OpenRule::Literal,
    };
    let known: &[&str] = match family {
        "zero" => &["open"],
        "point-majority" => &["points", "open"],
        "aarnes-circle" => &["B", "p", "open"],
        "two-point" => &["p1", "p2", "w", "rule", "open"],
        "threshold" => &["w", "t", "open"],
        "measure" => &["w"],
        other => return Err(SsfError::Parse(format!("unknown family {other:?}"))),
    };
    if let Some(k) = args.keys().find(|k| !known.contains(k)) {
        return Err(SsfError::Parse(format!("unknown key {k:?} for {family}")));
    }
    match family {
        "zero" => Ok(SolidSetFunction::new(
            model.clone(),
            SsfKind::Zero,
            open_rule,
        )),
        "point-majority" => {
            let pts = region("points")?;
            SolidSetFunction::point_majority(model.clone(), pts, open_rule)
        }
        "aarnes-circle" => {
            let b = region("B")?;
            let p = cell("p")?;
            SolidSetFunction::aarnes_circle(model.clone(), b, p, open_rule)
        }
        "two-point" => {
            let rule = match args.get("rule").copied().unwrap_or("doubled-local") {
                "as-written" => TwoPointRule::AsWritten,
                "doubled-local" => TwoPointRule::DoubledLocal,
                other => return Err(SsfError::Parse(format!("unknown rule {other:?}"))),
            };
            let (p1, p2) = (cell("p1")?, cell("p2")?);
            SolidSetFunction::two_point(model.clone(), p1, p2, weights(true)?, rule, open_rule)
        }
        "threshold" => {
            let t = args
                .get("t")
                .and_then(|s| parse_rational(s))
                .ok_or_else(|| SsfError::Parse("missing or bad t=".into()))?;
            SolidSetFunction::threshold(model.clone(), weights(true)?, t, open_rule)
        }
        "measure" => Ok(SolidSetFunction::restricted_measure(
            model.clone(),
            weights(true)?,
        )),
        _ => unreachable!(),
    }
}

/// Verdicts for the solid-set function axioms.
#[derive(Debug, Clone, Serialize)]
pub struct SsfValidationReport {
    pub space: String,
    pub function: String,
    pub checks: Vec<Check>,
}

impl SsfValidationReport {
    pub fn check(&self, name: &str) -> Option<&Verdict> {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .map(|c| &c.verdict)
    }

    pub fn overall(&self) -> &'static str {
        crate::report::overall(self.checks.iter().map(|c| &c.verdict))
    }
}

fn val(r: Rational) -> Option<Value> {
    Some(Value::Finite(r))
}

/// Checks (s1)–(s4) and, on compact spaces, the alternative compact axioms.
pub fn validate_ssf(lambda: &SolidSetFunction, budget: Budget) -> SsfValidationReport {
    let space = lambda.space();
    let mut report = SsfValidationReport {
        space: space.name().to_string(),
        function: lambda.describe(),
        checks: Vec::new(),
    };
    let values = match lambda.values() {
        Ok(v) => v,
        Err(e) => {
            for name in ["s1", "s2", "s3", "s4"] {
                report
                    .checks
                    .push(Check::new(name, Verdict::unknown(e.to_string())));
            }
            return report;
        }
    };
    let cat = lambda.model().catalog();
    let compact: Vec<(Region, Rational)> = cat
        .compact
        .iter()
        .map(|&c| (c, lambda.evaluate(c).expect("catalog member")))
        .collect();
    let open_only: Vec<(Region, Rational)> = values
        .iter()
        .copied()
        .filter(|(r, _)| !space.is_closed(*r))
        .collect();
    let open_all: Vec<(Region, Rational)> = cat
        .open
        .iter()
        .map(|&u| (u, lambda.evaluate(u).expect("catalog member")))
        .collect();

    let empty = lambda
        .evaluate(Region::EMPTY)
        .unwrap_or_else(|_| Rational::zero());
    report.checks.push(Check::new(
        "empty",
        if empty.is_zero() {
            Verdict::pass()
        } else {
            Verdict::fail(Witness::new("λ(∅) ≠ 0").item(space, "set", Region::EMPTY, val(empty)))
        },
    ));

    let floor = lambda.compact_floor().expect("table built").to_vec();
    report.checks.push(Check::new(
        "s1",
        check_superadditivity(space, &compact, &floor, budget),
    ));
    let s2 = check_inner_regularity(space, &open_only, &floor);
    report.checks.push(Check::new("s2", s2.clone()));
    report.checks.push(Check::new(
        "s3",
        check_outer_regularity(space, &compact, &open_all),
    ));
    let s4 = check_partition_additivity(lambda, &values, budget);
    report.checks.push(Check::new("s4", s4.clone()));

    if space.is_compact_space() {
        let all_floor = level_minima(&values);
        report.checks.push(Check::new(
            "c1",
            check_packing_below_total(lambda, &all_floor, budget),
        ));
        report.checks.push(Check::new("c2", s2));
        report.checks.push(Check::new("c3", s4));
    }
    report
}

/// Largest total value of a disjoint family drawn from `pieces` inside
/// `avail`; stops early once the total exceeds `stop_above`.
fn best_packing(
    pieces: &[(Region, Rational)],
    avail: Region,
    stop_above: Rational,
    meter: &mut Meter,
) -> Option<(Rational, Vec<Region>)> {
    let inside: Vec<(Region, Rational)> = pieces
        .iter()
        .copied()
        .filter(|(r, v)| r.is_subset(avail) && *v > Rational::zero())
        .collect();
    let mut suffix = vec![Rational::zero(); inside.len() + 1];
    for i in (0..inside.len()).rev() {
        suffix[i] = suffix[i + 1] + inside[i].1;
    }
    struct Search<'a> {
        inside: &'a [(Region, Rational)],
        suffix: &'a [Rational],
        stop_above: Rational,
        best: Rational,
        best_family: Vec<Region>,
        family: Vec<Region>,
    }
    fn rec(s: &mut Search, start: usize, avail: Region, sum: Rational, meter: &mut Meter) -> bool {
        if !meter.spend(1) {
            return false;
        }
        if sum > s.best {
            s.best = sum;
            s.best_family = s.family.clone();
            if s.best > s.stop_above {
                return true;
            }
        }
        for j in start..s.inside.len() {
            if sum + s.suffix[j] <= s.best {
                break;
            }
            let (r, v) = s.inside[j];
            if r.is_subset(avail) {
                s.family.push(r);
                let ok = rec(s, j + 1, avail - r, sum + v, meter);
                s.family.pop();
                if !ok {
                    return false;
                }
                if s.best > s.stop_above {
                    return true;
                }
            }
        }
        true
    }
    let mut s = Search {
        inside: &inside,
        suffix: &suffix,
        stop_above,
        best: Rational::zero(),
        best_family: Vec::new(),
        family: Vec::new(),
    };
    if !rec(&mut s, 0, avail, Rational::zero(), meter) {
        return None;
    }
    Some((s.best, s.best_family))
}

/// (s1). Any positive member of a family can be shrunk to a minimal compact
/// solid set of at least its value, so families are drawn from the level
/// minima without loss.
fn check_superadditivity(
    space: &FiniteSpace,
    compact: &[(Region, Rational)],
    floor: &[(Region, Rational)],
    budget: Budget,
) -> Verdict {
    let mut meter = Meter::new(budget);
    for &(c, lc) in compact {
        match best_packing(floor, c, lc, &mut meter) {
            None => return Verdict::unknown("budget exhausted while packing families"),
            Some((best, family)) if best > lc => {
                let mut w = Witness::new(format!(
                    "disjoint compact solid sets with total {best} inside a compact solid set of value {lc}"
                ))
                .item(space, "container", c, val(lc));
                for r in family {
                    let v = floor.iter().find(|(f, _)| *f == r).map(|&(_, v)| v);
                    w = w.item(space, "member", r, v.map(Value::Finite));
                }
                return Verdict::fail(w);
            }
            Some(_) => {}
        }
    }
    Verdict::pass()
}

/// (s2), through the level minima of the compact values.
fn check_inner_regularity(
    space: &FiniteSpace,
    open: &[(Region, Rational)],
    floor: &[(Region, Rational)],
) -> Verdict {
    for &(u, lu) in open {
        let best = floor
            .iter()
            .filter(|(m, _)| m.is_subset(u))
            .max_by_key(|&&(m, v)| (v, std::cmp::Reverse(m)));
        let (m, sup) = best.copied().unwrap_or((Region::EMPTY, Rational::zero()));
        if sup != lu {
            return Verdict::fail(
                Witness::new(format!(
                    "open solid set of value {lu} but the compact solid sets inside reach {sup}"
                ))
                .item(space, "open", u, val(lu))
                .item(space, "best-compact", m, val(sup)),
            );
        }
    }
    Verdict::pass()
}

/// (s3), through the level maxima of the open values.
fn check_outer_regularity(
    space: &FiniteSpace,
    compact: &[(Region, Rational)],
    open: &[(Region, Rational)],
) -> Verdict {
    let ceiling = level_maxima(open);
    for &(c, lc) in compact {
        let best = ceiling
            .iter()
            .filter(|(m, _)| c.is_subset(*m))
            .min_by_key(|&&(m, v)| (v, m));
        match best {
            None => {
                return Verdict::fail(
                    Witness::new(format!(
                        "compact solid set of value {lc} lies in no bounded open solid set, so the infimum is inf"
                    ))
                    .item(space, "compact", c, val(lc)),
                )
            }
            Some(&(m, inf)) if inf != lc => {
                return Verdict::fail(
                    Witness::new(format!(
                        "compact solid set of value {lc} but the open solid sets around it go down to {inf}"
                    ))
                    .item(space, "compact", c, val(lc))
                    .item(space, "best-open", m, val(inf)),
                )
            }
            Some(_) => {}
        }
    }
    Verdict::pass()
}

/// (s4). Uses the genus-0 shortcut when it is proved on the model and
/// enumerates partitions otherwise.
fn check_partition_additivity(
    lambda: &SolidSetFunction,
    values: &[(Region, Rational)],
    budget: Budget,
) -> Verdict {
    let space = lambda.space();
    let model = lambda.model();
    if space.is_compact_space() {
        let g = model.genus(budget);
        if g.is_zero() {
            let total = match lambda.evaluate(space.points()) {
                Ok(v) => v,
                Err(e) => return Verdict::unknown(e.to_string()),
            };
            for &(a, la) in values {
                let rest = space.complement(a);
                let lr = match lambda.evaluate(rest) {
                    Ok(v) => v,
                    Err(_) => {
                        return Verdict::fail(
                            Witness::new("the complement of a solid set is not solid").item(
                                space,
                                "set",
                                a,
                                val(la),
                            ),
                        )
                    }
                };
                if la + lr != total {
                    return Verdict::fail(
                        Witness::new(format!(
                            "trivial partition of X: {la} + {lr} ≠ λ(X) = {total}"
                        ))
                        .item(space, "part", a, val(la))
                        .item(space, "part", rest, val(lr)),
                    );
                }
            }
            return Verdict::pass_with(
                "genus 0: only trivial partitions, complement identity checked",
            );
        }
    } else if model.hat_genus(budget).is_zero() {
        return Verdict::pass_with(
            "one-point compactification has genus 0: every solid partition of a bounded solid set is trivial",
        );
    }
    let mut meter = Meter::new(budget);
    for &(a, la) in values {
        let mut verdict = None;
        let walk =
            partition::for_each_solid_partition(model, a, usize::MAX, &mut meter, &mut |parts| {
                if parts.len() < 2 {
                    return true;
                }
                let sum: Rational = parts
                    .iter()
                    .map(|&p| lambda.evaluate(p).unwrap_or_else(|_| Rational::zero()))
                    .sum();
                if sum != la {
                    let mut w = Witness::new(format!("solid partition sums to {sum}, not {la}"))
                        .item(space, "whole", a, val(la));
                    for &p in parts {
                        w = w.item(space, "part", p, lambda.evaluate(p).ok().map(Value::Finite));
                    }
                    verdict = Some(Verdict::fail(w));
                    return false;
                }
                true
            });
        if let Some(v) = verdict {
            return v;
        }
        if walk == partition::Walk::Exhausted {
            return Verdict::unknown("budget exhausted while enumerating solid partitions");
        }
    }
    Verdict::pass()
}

/// First compact condition: no disjoint family of solid sets exceeds λ(X).
fn check_packing_below_total(
    lambda: &SolidSetFunction,
    all_floor: &[(Region, Rational)],
    budget: Budget,
) -> Verdict {
    let space = lambda.space();
    let total = match lambda.evaluate(space.points()) {
        Ok(v) => v,
        Err(e) => return Verdict::unknown(e.to_string()),
    };
    let mut meter = Meter::new(budget);
    match best_packing(all_floor, space.points(), total, &mut meter) {
        None => Verdict::unknown("budget exhausted while packing families"),
        Some((best, family)) if best > total => {
            let mut w = Witness::new(format!(
                "disjoint solid sets with total {best} > λ(X) = {total}"
            ));
            for r in family {
                w = w.item(
                    space,
                    "member",
                    r,
                    lambda.evaluate(r).ok().map(Value::Finite),
                );
            }
            Verdict::fail(w)
        }
        Some(_) => Verdict::pass(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;

    fn sphere() -> Arc<Model> {
        Model::new(build_sphere(3).unwrap())
    }

    #[test]
    fn majority_counts_points() {
        let m = sphere();
        let s = m.space();
        let pts = s.parse_region("q0,q1,q2").unwrap();
        let l = SolidSetFunction::point_majority(m.clone(), pts, OpenRule::InnerRegular).unwrap();
        assert_eq!(l.evaluate(s.points()).unwrap(), Rational::one());
        assert_eq!(l.evaluate(Region::EMPTY).unwrap(), Rational::zero());
        let edge = s.closure(s.parse_region("q0-q1").unwrap());
        assert_eq!(l.evaluate(edge).unwrap(), Rational::one());
        let five = s.vertices();
        let l5 = SolidSetFunction::point_majority(m.clone(), five, OpenRule::InnerRegular).unwrap();
        let tri = s.closure(s.parse_region("n-q0-q1").unwrap());
        assert_eq!(l5.evaluate(tri).unwrap(), Rational::new(1, 2));
    }

    #[test]
    fn majority_rejects_even_or_non_vertex_points() {
        let m = sphere();
        let s = m.space();
        let even = s.parse_region("q0,q1").unwrap();
        assert_eq!(
            SolidSetFunction::point_majority(m.clone(), even, OpenRule::Literal).unwrap_err(),
            SsfError::PointCount(2)
        );
        let edge = s.parse_region("q0-q1,q2,n").unwrap();
        assert!(matches!(
            SolidSetFunction::point_majority(m.clone(), edge, OpenRule::Literal),
            Err(SsfError::NotAVertex(_))
        ));
    }

    #[test]
    fn threshold_is_inclusive_on_compacts_only() {
        let m = Model::new(build_plane_window(3).unwrap());
        let s = m.space();
        let w = Weights::uniform(s, Rational::new(1, 2));
        let l =
            SolidSetFunction::threshold(m.clone(), w, Rational::one(), OpenRule::Literal).unwrap();
        let edge = s.closure(s.parse_region("p1_2-p2_2").unwrap());
        assert_eq!(l.formula(edge, SetKind::Compact), Rational::one());
        assert_eq!(l.formula(edge, SetKind::Open), Rational::zero());
        assert_eq!(l.formula(Region::EMPTY, SetKind::Compact), Rational::zero());
    }

    #[test]
    fn two_point_rules_differ_only_on_both_points() {
        let m = Model::new(build_plane_window(3).unwrap());
        let s = m.space();
        let w = Weights::uniform(s, Rational::one());
        let p1 = s.index_of("p1_2").unwrap();
        let p2 = s.index_of("p3_2").unwrap();
        let lit = SolidSetFunction::two_point(
            m.clone(),
            p1,
            p2,
            w.clone(),
            TwoPointRule::AsWritten,
            OpenRule::InnerRegular,
        )
        .unwrap();
        let loc = SolidSetFunction::two_point(
            m.clone(),
            p1,
            p2,
            w,
            TwoPointRule::DoubledLocal,
            OpenRule::InnerRegular,
        )
        .unwrap();
        let row = s.closure(s.parse_region("p1_2-p2_2,p2_2-p3_2").unwrap());
        assert_eq!(
            loc.formula(row, SetKind::Compact),
            Rational::from_integer(6)
        );
        assert_eq!(
            lit.formula(row, SetKind::Compact),
            Rational::from_integer(18)
        );
        let one = s.parse_region("p1_2").unwrap();
        assert_eq!(lit.formula(one, SetKind::Compact), Rational::one());
    }

    #[test]
    fn point_mass_measure_is_membership() {
        let m = Model::new(build_interval(2).unwrap());
        let s = m.space();
        let v1 = s.index_of("v1").unwrap();
        let mut w = Weights::zeros(s);
        w.set(v1, Rational::one());
        let l = SolidSetFunction::restricted_measure(m.clone(), w);
        for (r, v) in l.values().unwrap() {
            assert_eq!(v.is_one(), r.contains(v1), "{}", s.format_region(r));
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let m = sphere();
        let l = parse_descriptor(m.clone(), "point-majority points=q0,q1,q2").unwrap();
        assert_eq!(l.describe(), "point-majority points=q0,q1,q2 open=literal");
        assert!(parse_descriptor(m.clone(), "point-majority pts=q0").is_err());
        assert!(parse_descriptor(m.clone(), "nonsense").is_err());
        let t = parse_descriptor(m, "threshold w=@uniform*1/2 t=1 open=inner").unwrap();
        assert_eq!(t.open_rule(), OpenRule::InnerRegular);
    }

    #[test]
    fn level_minima_keep_one_per_chain() {
        let a = Region::from_cells([0]);
        let ab = Region::from_cells([0, 1]);
        let c = Region::from_cells([2]);
        let items = [
            (Region::EMPTY, Rational::zero()),
            (a, Rational::zero()),
            (ab, Rational::one()),
            (c, Rational::one()),
        ];
        let mins = level_minima(&items);
        assert_eq!(
            mins,
            vec![
                (Region::EMPTY, Rational::zero()),
                (c, Rational::one()),
                (ab, Rational::one())
            ]
        );
        let maxs = level_maxima(&items);
        assert!(maxs.contains(&(a, Rational::zero())));
        assert!(maxs.contains(&(ab, Rational::one())));
    }
}
