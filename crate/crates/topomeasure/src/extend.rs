//! From a solid-set function to a topological measure.
//!
//! λ₁ corrects λ on a semisolid set by the bounded holes of its complement,
//! λ₂ sums λ₁ over components, and μ takes λ₂ at the largest compact subset
//! of an open set (the supremum is attained there because λ₂ is monotone)
//! and at the open star of a closed set (the unique minimal open superset).
//! [`grubb_mu`] is the complement-based route for compact spaces.
//! [`validate_tm`] checks the axioms of a topological measure by
//! enumeration.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::region::Region;
use crate::report::{overall, Budget, Check, Meter, Verdict, Witness};
use crate::solid::{self, Model};
use crate::space::FiniteSpace;
use crate::ssf::{SolidSetFunction, SsfError};
use crate::value::{Rational, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtendError {
    #[error(transparent)]
    Ssf(#[from] SsfError),
    #[error("{0} is not open")]
    NotOpen(String),
    #[error("{0} is not closed")]
    NotClosed(String),
    #[error("{0} is neither open nor closed")]
    NotOpenOrClosed(String),
    #[error("{0} is not compact")]
    NotCompact(String),
    #[error("{0} is not a connected bounded open or closed set")]
    NotSemisolid(String),
    #[error("negative value {value} on {region}")]
    Negative { region: String, value: Rational },
    #[error("the compact-space route needs a compact space, {0} has a point at infinity")]
    NoncompactSpace(String),
}

fn lam(l: &SolidSetFunction, a: Region) -> Result<Rational, ExtendError> {
    if a.is_empty() {
        return Ok(Rational::zero());
    }
    Ok(l.evaluate(a)?)
}

/// λ₁(A) = λ(Ã) − Σ λ(Bᵢ) over the bounded components Bᵢ of X∖A.
///
/// `a` must be connected, bounded and open or closed. The value can only be
/// negative when λ is not superadditive.
pub fn lambda1(l: &SolidSetFunction, a: Region) -> Result<Rational, ExtendError> {
    let space = l.space();
    if a.is_empty() {
        return Ok(Rational::zero());
    }
    if !space.is_connected(a) || !space.is_bounded(a) || !(space.is_open(a) || space.is_closed(a)) {
        return Err(ExtendError::NotSemisolid(space.format_region(a)));
    }
    let mut v = lam(l, solid::hull_of(space, a))?;
    for b in solid::bounded_complement_components(space, a) {
        v -= lam(l, b)?;
    }
    Ok(v)
}

/// λ₂(K) = Σ λ₁ over the components of a compact `k`.
pub fn lambda2(l: &SolidSetFunction, k: Region) -> Result<Rational, ExtendError> {
    let space = l.space();
    if !space.is_compact(k) {
        return Err(ExtendError::NotCompact(space.format_region(k)));
    }
    let mut v = Rational::zero();
    for c in space.components(k) {
        v += lambda1(l, c)?;
    }
    Ok(v)
}

fn nonnegative(space: &FiniteSpace, r: Region, v: Rational) -> Result<Value, ExtendError> {
    if v.is_negative() {
        return Err(ExtendError::Negative {
            region: space.format_region(r),
            value: v,
        });
    }
    Ok(Value::Finite(v))
}

/// μ(U) = λ₂(K_max(U)).
pub fn mu_open(l: &SolidSetFunction, u: Region) -> Result<Value, ExtendError> {
    let space = l.space();
    if !space.is_open(u) {
        return Err(ExtendError::NotOpen(space.format_region(u)));
    }
    let v = lambda2(l, space.kmax(u))?;
    nonnegative(space, u, v)
}

/// μ(F) = μ(open star of F).
pub fn mu_closed(l: &SolidSetFunction, f: Region) -> Result<Value, ExtendError> {
    let space = l.space();
    if !space.is_closed(f) {
        return Err(ExtendError::NotClosed(space.format_region(f)));
    }
    mu_open(l, space.star(f))
}

/// μ of an open or closed region; open takes precedence for clopen sets
/// (both formulas agree on them).
pub fn mu(l: &SolidSetFunction, a: Region) -> Result<Value, ExtendError> {
    let space = l.space();
    if space.is_open(a) {
        mu_open(l, a)
    } else if space.is_closed(a) {
        mu_closed(l, a)
    } else {
        Err(ExtendError::NotOpenOrClosed(space.format_region(a)))
    }
}

/// The compact-space route: λ₂(U) = λ(X) − λ₂(X∖U) on open sets and
/// μ(C) = μ(X) − μ(X∖C) on closed sets, which reduces to λ₂(C).
pub fn grubb_mu(l: &SolidSetFunction, a: Region) -> Result<Value, ExtendError> {
    let space = l.space();
    if !space.is_compact_space() {
        return Err(ExtendError::NoncompactSpace(space.name().to_string()));
    }
    let x = space.points();
    let total = lam(l, x)?;
    if space.is_open(a) {
        let v = total - lambda2(l, x - a)?;
        nonnegative(space, a, v)
    } else if space.is_closed(a) {
        let v = total - (total - lambda2(l, a)?);
        nonnegative(space, a, v)
    } else {
        Err(ExtendError::NotOpenOrClosed(space.format_region(a)))
    }
}

type RawEval = Arc<dyn Fn(&FiniteSpace, Region) -> Value + Send + Sync>;

#[derive(Clone)]
enum Source {
    Extension(Arc<SolidSetFunction>),
    Compact(Arc<SolidSetFunction>),
    Raw { name: String, eval: RawEval },
}

/// A set function on open and closed regions: the extension of a solid-set
/// function, or a raw evaluator to be validated.
#[derive(Clone)]
pub struct TopMeasure {
    model: Arc<Model>,
    source: Source,
}

impl fmt::Debug for TopMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TopMeasure")
            .field("space", &self.space().name())
            .field("measure", &self.describe())
            .finish()
    }
}

impl TopMeasure {
    /// The general extension of `l`.
    pub fn extend(l: Arc<SolidSetFunction>) -> Self {
        TopMeasure {
            model: l.model().clone(),
            source: Source::Extension(l),
        }
    }

    /// The compact-space route; errors on a noncompact space.
    pub fn compact_route(l: Arc<SolidSetFunction>) -> Result<Self, ExtendError> {
        if !l.space().is_compact_space() {
            return Err(ExtendError::NoncompactSpace(l.space().name().to_string()));
        }
        Ok(TopMeasure {
            model: l.model().clone(),
            source: Source::Compact(l),
        })
    }

    pub fn raw(
        model: Arc<Model>,
        name: impl Into<String>,
        eval: impl Fn(&FiniteSpace, Region) -> Value + Send + Sync + 'static,
    ) -> Self {
        TopMeasure {
            model,
            source: Source::Raw {
                name: name.into(),
                eval: Arc::new(eval),
            },
        }
    }

    /// The raw evaluator μ ≡ v.
    pub fn constant(model: Arc<Model>, v: Value) -> Self {
        TopMeasure::raw(model, format!("constant {v}"), move |_, _| v)
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn space(&self) -> &FiniteSpace {
        self.model.space()
    }

    /// The solid-set function this measure extends, if engine-built.
    pub fn lambda(&self) -> Option<&SolidSetFunction> {
        match &self.source {
            Source::Extension(l) | Source::Compact(l) => Some(l),
            Source::Raw { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.source {
            Source::Extension(l) => format!("extension of {}", l.describe()),
            Source::Compact(l) => format!("compact-route extension of {}", l.describe()),
            Source::Raw { name, .. } => format!("raw {name}"),
        }
    }

    pub fn value(&self, a: Region) -> Result<Value, ExtendError> {
        match &self.source {
            Source::Extension(l) => mu(l, a),
            Source::Compact(l) => grubb_mu(l, a),
            Source::Raw { eval, .. } => {
                let space = self.space();
                if !space.is_open(a) && !space.is_closed(a) {
                    return Err(ExtendError::NotOpenOrClosed(space.format_region(a)));
                }
                Ok(eval(space, a))
            }
        }
    }

    /// μ(X).
    pub fn total(&self) -> Result<Value, ExtendError> {
        self.value(self.space().points())
    }

    /// Always true for an engine-built measure: compact sets get finite values.
    pub fn compact_finite(&self) -> bool {
        self.lambda().is_some()
    }

    pub fn is_finite(&self) -> Result<bool, ExtendError> {
        Ok(self.total()?.is_finite())
    }
}

/// Verdicts of [`validate_tm`].
#[derive(Debug, Clone, Serialize)]
pub struct TmValidationReport {
    pub space: String,
    pub measure: String,
    /// Open plus closed sets of the space, when counted within budget.
    pub set_count: Option<u64>,
    /// Axioms of a topological measure and their equivalent forms.
    pub checks: Vec<Check>,
    /// Properties a topological measure may lack: additivity on closed and
    /// open sets, the closed-set dual of carving, subadditivity.
    pub properties: Vec<Check>,
    /// `measure-extendable`, `proper topological measure`, `unknown`, or
    /// `not a topological measure` when μ(∅) ≠ 0.
    pub classification: String,
}

impl TmValidationReport {
    pub fn check(&self, name: &str) -> Option<&Verdict> {
        self.checks
            .iter()
            .chain(&self.properties)
            .find(|c| c.name == name)
            .map(|c| &c.verdict)
    }

    /// Worst verdict over the axiom checks.
    pub fn overall(&self) -> &'static str {
        overall(self.checks.iter().map(|c| &c.verdict))
    }
}

pub const MEASURE_EXTENDABLE: &str = "measure-extendable";
pub const PROPER_TM: &str = "proper topological measure";
/// μ(∅) ≠ 0 rules out every reading of the axioms.
pub const NOT_TM: &str = "not a topological measure";

/// Memoized evaluation with work accounting.
struct Evaluator<'a> {
    mu: &'a TopMeasure,
    cache: HashMap<Region, Value>,
    meter: Meter,
}

impl<'a> Evaluator<'a> {
    fn new(mu: &'a TopMeasure, budget: Budget) -> Self {
        Evaluator {
            mu,
            cache: HashMap::new(),
            meter: Meter::new(budget),
        }
    }

    fn get(&mut self, a: Region) -> Result<Value, ExtendError> {
        if let Some(&v) = self.cache.get(&a) {
            return Ok(v);
        }
        self.meter.spend(1);
        let v = self.mu.value(a)?;
        if self.cache.len() < 1 << 20 {
            self.cache.insert(a, v);
        }
        Ok(v)
    }
}

/// One named check being filled in.
struct Probe {
    name: &'static str,
    witness: Option<Witness>,
}

impl Probe {
    fn new(name: &'static str) -> Self {
        Probe {
            name,
            witness: None,
        }
    }

    fn failed(&self) -> bool {
        self.witness.is_some()
    }

    fn fail(&mut self, w: impl FnOnce() -> Witness) {
        if self.witness.is_none() {
            self.witness = Some(w());
        }
    }

    fn finish(self, complete: Result<(), String>) -> Check {
        let v = match (self.witness, complete) {
            (Some(w), _) => Verdict::fail(w),
            (None, Ok(())) => Verdict::pass(),
            (None, Err(reason)) => Verdict::unknown(reason),
        };
        Check::new(self.name, v)
    }
}

fn add(a: Value, b: Value) -> Value {
    a + b
}

/// Cells of `r` that are minimal in X.
fn minimal_cells(space: &FiniteSpace, r: Region) -> Region {
    r.iter()
        .filter(|&x| (space.down(x) & space.points()) == Region::singleton(x))
        .collect()
}

/// Open and closed regions named by labels, with their complements.
fn labelled_regions(space: &FiniteSpace) -> Vec<Region> {
    let mut out = Vec::new();
    for &r in space.labels().values() {
        for s in [r, space.complement(r)] {
            if (space.is_open(s) || space.is_closed(s)) && !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out
}

/// Checks the axioms of a topological measure.
///
/// Targeted families (vertex sets of compact solid sets, labelled regions
/// and their complements, the solid-set catalog) are scanned first; any
/// violation there is a definitive failure. The literal quantifier sweeps
/// over all pairs of open and closed sets run only when their number `N`
/// satisfies `N² <= budget`; otherwise a check without a witness is
/// `unknown`.
pub fn validate_tm(mu: &TopMeasure, budget: Budget) -> Result<TmValidationReport, ExtendError> {
    let space = mu.space();
    let compact_space = space.is_compact_space();
    let x = space.points();
    let mut ev = Evaluator::new(mu, budget);

    let mut tm1 = Probe::new("tm1");
    let mut tm2 = Probe::new("tm2");
    let mut tm3 = Probe::new("tm3");
    let mut mono = Probe::new("monotone");
    let mut c1 = Probe::new("c1");
    let mut c2 = Probe::new("c2");
    let mut c3 = Probe::new("c3");
    let mut w3 = Probe::new("w3");
    let mut w4 = Probe::new("w4");
    let mut agree = Probe::new("mu-equals-lambda");
    let mut simple = Probe::new("simple");
    let mut coadd = Probe::new("closed-open-additivity");
    let mut dual = Probe::new("closed-dual-carving");
    let mut subadd = Probe::new("subadditivity");

    let empty = ev.get(Region::EMPTY)?;
    if !empty.is_zero() {
        tm1.fail(|| {
            Witness::new("A ⊔ B = ∅ with A = B = ∅, but μ(∅) + μ(∅) ≠ μ(∅)")
                .item(space, "A", Region::EMPTY, Some(empty))
                .item(space, "B", Region::EMPTY, Some(empty))
                .item(space, "union", Region::EMPTY, Some(empty))
        });
    }

    let lambda = mu.lambda();
    let two_valued = match lambda {
        Some(l) => l.is_two_valued()?,
        None => false,
    };
    let mut solids: Vec<(Region, bool)> = Vec::new();
    if let Some(l) = lambda {
        let cat = l.model().catalog();
        solids.extend(cat.open.iter().map(|&r| (r, true)));
        solids.extend(cat.compact.iter().map(|&r| (r, false)));
        for &(a, _) in &solids {
            let m = ev.get(a)?;
            let v = Value::Finite(lam(l, a)?);
            if m != v {
                agree.fail(|| {
                    Witness::new("μ differs from λ on a bounded solid set")
                        .item(space, "set", a, Some(m))
                        .item(space, "lambda", a, Some(v))
                });
            }
        }
    }
    let total = ev.get(x)?;

    // Targeted: a compact set and its minimal cells have the same open star,
    // so additivity on compact sets forces μ(K) = Σ μ({v}).
    for &(k, open) in &solids {
        if open || k.is_empty() {
            continue;
        }
        let mut rest = minimal_cells(space, k);
        while rest.len() > 1 {
            let v = Region::singleton(rest.first().unwrap());
            let tail = rest - v;
            let (mr, mv, mt) = (ev.get(rest)?, ev.get(v)?, ev.get(tail)?);
            if mr != add(mv, mt) {
                let w = || {
                    Witness::new("disjoint compact sets whose union is compact, μ not additive")
                        .item(space, "A", v, Some(mv))
                        .item(space, "B", tail, Some(mt))
                        .item(space, "union", rest, Some(mr))
                };
                tm1.fail(w);
                c2.fail(w);
                break;
            }
            rest = tail;
        }
        if tm1.failed() {
            break;
        }
    }

    // Targeted: catalog and labelled regions against X and their stars or
    // compact cores.
    let mut probes: Vec<Region> = solids.iter().map(|&(r, _)| r).collect();
    probes.extend(labelled_regions(space));
    for &a in &probes {
        let ma = ev.get(a)?;
        let rest = x - a;
        let mr = ev.get(rest)?;
        if add(ma, mr) != total {
            let w = || {
                Witness::new("X split into a closed and an open set, μ not additive")
                    .item(space, "A", a, Some(ma))
                    .item(space, "B", rest, Some(mr))
                    .item(space, "union", x, Some(total))
            };
            let k = if space.is_closed(a) { a } else { rest };
            if space.is_compact(k) {
                tm1.fail(w);
                c1.fail(w);
            }
            if compact_space {
                w4.fail(w);
            }
            coadd.fail(w);
            if space.is_open(a) && space.is_bounded(a) {
                dual.fail(w);
            }
        }
        if space.is_open(a) {
            let k = space.kmax(a);
            let mk = ev.get(k)?;
            if mk > ma {
                tm2.fail(|| {
                    Witness::new("a compact subset has a larger value than the open set")
                        .item(space, "open", a, Some(ma))
                        .item(space, "compact", k, Some(mk))
                });
            }
        }
        if space.is_closed(a) {
            let u = space.star(a);
            let mu_u = ev.get(u)?;
            if mu_u < ma {
                tm3.fail(|| {
                    Witness::new("an open superset has a smaller value than the closed set")
                        .item(space, "closed", a, Some(ma))
                        .item(space, "open", u, Some(mu_u))
                });
            }
            if space.is_compact(a) {
                let collar = u - a;
                let mc = ev.get(collar)?;
                if mu_u != add(ma, mc) {
                    c1.fail(|| {
                        Witness::new("open star of a compact set, μ(U) ≠ μ(K) + μ(U∖K)")
                            .item(space, "compact", a, Some(ma))
                            .item(space, "rest", collar, Some(mc))
                            .item(space, "open", u, Some(mu_u))
                    });
                }
            }
        }
        if two_valued && !(ma.is_zero() || ma == Value::ONE) {
            simple.fail(|| {
                Witness::new("λ is two-valued but μ is not").item(space, "set", a, Some(ma))
            });
        }
    }

    // Targeted subadditivity: pairs of maximal μ-null compact solid sets.
    let mut null_compacts: Vec<Region> = Vec::new();
    for &(k, open) in &solids {
        if !open && !k.is_empty() && ev.get(k)?.is_zero() {
            null_compacts.push(k);
        }
    }
    let null_compacts = maximal(null_compacts);
    'pairs: for (i, &a) in null_compacts.iter().enumerate() {
        for &b in &null_compacts[i + 1..] {
            if !ev.meter.spend(1) {
                break 'pairs;
            }
            let u = a | b;
            let mu_u = ev.get(u)?;
            if !mu_u.is_zero() {
                subadd.fail(|| {
                    Witness::new("two μ-null compact sets whose union has positive μ")
                        .item(space, "C", a, Some(Value::ZERO))
                        .item(space, "K", b, Some(Value::ZERO))
                        .item(space, "union", u, Some(mu_u))
                });
                break 'pairs;
            }
        }
    }

    // Pairs of level-minimal compact solid sets of λ.
    if !subadd.failed() {
        if let Some(l) = mu.lambda() {
            let floor: Vec<Region> = l.compact_floor()?.iter().map(|&(k, _)| k).collect();
            'floor: for (i, &a) in floor.iter().enumerate() {
                for &b in &floor[i + 1..] {
                    if !ev.meter.spend(1) {
                        break 'floor;
                    }
                    let (va, vb, vu) = (ev.get(a)?, ev.get(b)?, ev.get(a | b)?);
                    if vu > va + vb {
                        subadd.fail(|| {
                            Witness::new("μ of a union of two compact sets exceeds the sum")
                                .item(space, "C", a, Some(va))
                                .item(space, "K", b, Some(vb))
                                .item(space, "union", a | b, Some(vu))
                        });
                        break 'floor;
                    }
                }
            }
        }
    }

    // Exhaustive sweeps.
    let mut family: Vec<Region> = Vec::new();
    let limit = (budget.0 as f64).sqrt() as usize;
    let mut over = false;
    solid::for_each_up_set(space, x, &mut |u| {
        family.push(u);
        if family.len() > limit {
            over = true;
        }
        !over
    });
    let n_open = family.len();
    if !over {
        solid::for_each_down_set(space, x, &mut |f| {
            family.push(f);
            if family.len() > limit {
                over = true;
            }
            !over
        });
    }
    let complete: Result<(), String>;
    let mut set_count = None;
    if over {
        complete = Err(format!(
            "more than {limit} open and closed sets; the pair sweeps need N² within the budget of {}",
            budget.0
        ));
    } else {
        let opens: Vec<Region> = family[..n_open].to_vec();
        let closeds: Vec<Region> = family[n_open..].to_vec();
        let mut all: Vec<Region> = opens.clone();
        let open_set: HashSet<Region> = opens.iter().copied().collect();
        all.extend(closeds.iter().copied().filter(|r| !open_set.contains(r)));
        let closed_set: HashSet<Region> = closeds.iter().copied().collect();
        set_count = Some(all.len() as u64);
        let compacts: Vec<Region> = closeds
            .iter()
            .copied()
            .filter(|&r| space.is_bounded(r))
            .collect();
        let mut val: HashMap<Region, Value> = HashMap::new();
        for &a in &all {
            val.insert(a, ev.get(a)?);
        }
        let is_k = |r: Region| closed_set.contains(&r) && space.is_bounded(r);
        let in_ko = |r: Region| open_set.contains(&r) || is_k(r);
        let in_co = |r: Region| open_set.contains(&r) || closed_set.contains(&r);

        for (i, &a) in all.iter().enumerate() {
            let va = val[&a];
            if two_valued && !(va.is_zero() || va == Value::ONE) {
                simple.fail(|| {
                    Witness::new("λ is two-valued but μ is not").item(space, "set", a, Some(va))
                });
            }
            for &b in &all[i..] {
                let vb = val[&b];
                // Monotonicity on 𝒪 ∪ 𝒞.
                if a.is_subset(b) && va > vb || b.is_subset(a) && vb > va {
                    let (s, t) = if a.is_subset(b) { (a, b) } else { (b, a) };
                    mono.fail(|| {
                        Witness::new("a subset has a larger value")
                            .item(space, "subset", s, Some(val[&s]))
                            .item(space, "superset", t, Some(val[&t]))
                    });
                }
                if !a.is_disjoint(b) || (a == b && !a.is_empty()) {
                    continue;
                }
                let u = a | b;
                let Some(&vu) = val.get(&u) else { continue };
                let sum = add(va, vb);
                if sum == vu {
                    continue;
                }
                let w = |why: &str| {
                    Witness::new(why)
                        .item(space, "A", a, Some(va))
                        .item(space, "B", b, Some(vb))
                        .item(space, "union", u, Some(vu))
                };
                if in_ko(a) && in_ko(b) && in_ko(u) {
                    tm1.fail(|| w("disjoint sets in 𝒦 ∪ 𝒪 with union in 𝒦 ∪ 𝒪, μ not additive"));
                }
                if in_co(a) && in_co(b) && in_co(u) {
                    coadd.fail(|| w("disjoint sets in 𝒞 ∪ 𝒪 with union in 𝒞 ∪ 𝒪, μ not additive"));
                }
                if is_k(a) && is_k(b) {
                    c2.fail(|| w("disjoint compact sets, μ not additive"));
                }
                if open_set.contains(&a) && open_set.contains(&b) {
                    c3.fail(|| w("disjoint open sets, μ not additive"));
                }
                let carve = |k: Region, r: Region| {
                    is_k(k) && open_set.contains(&r) && open_set.contains(&u)
                };
                if carve(a, b) || carve(b, a) {
                    c1.fail(|| w("compact K inside open U with μ(U) ≠ μ(K) + μ(U∖K)"));
                }
                let dual_of = |v: Region, r: Region| {
                    open_set.contains(&v)
                        && space.is_bounded(v)
                        && closed_set.contains(&r)
                        && closed_set.contains(&u)
                };
                if dual_of(a, b) || dual_of(b, a) {
                    dual.fail(|| w("bounded open V inside closed F with μ(F) ≠ μ(V) + μ(F∖V)"));
                }
            }
        }
        // Inner regularity on open sets, outer regularity on closed sets.
        for &u in &opens {
            let best = compacts
                .iter()
                .filter(|k| k.is_subset(u))
                .map(|k| (val[k], *k))
                .max_by(|p, q| p.0.cmp(&q.0))
                .unwrap_or((Value::ZERO, Region::EMPTY));
            if best.0 != val[&u] {
                tm2.fail(|| {
                    Witness::new("open set whose value is not the supremum over compact subsets")
                        .item(space, "open", u, Some(val[&u]))
                        .item(space, "best-compact", best.1, Some(best.0))
                });
            }
        }
        for &f in &closeds {
            let best = opens
                .iter()
                .filter(|u| f.is_subset(**u))
                .map(|u| (val[u], *u))
                .min_by(|p, q| p.0.cmp(&q.0))
                .expect("X is open");
            if best.0 != val[&f] {
                tm3.fail(|| {
                    Witness::new("closed set whose value is not the infimum over open supersets")
                        .item(space, "closed", f, Some(val[&f]))
                        .item(space, "best-open", best.1, Some(best.0))
                });
            }
        }
        // Subadditivity on compact pairs.
        'sub: for (i, &a) in compacts.iter().enumerate() {
            for &b in &compacts[i..] {
                let u = a | b;
                let vu = val[&u];
                if vu > add(val[&a], val[&b]) {
                    subadd.fail(|| {
                        Witness::new("μ(C ∪ K) > μ(C) + μ(K)")
                            .item(space, "C", a, Some(val[&a]))
                            .item(space, "K", b, Some(val[&b]))
                            .item(space, "union", u, Some(vu))
                    });
                    break 'sub;
                }
            }
        }
        if compact_space {
            // Closed sets nearly fill X from outside: sup over disjoint
            // closed K of μ(C) + μ(K) reaches μ(X).
            for &c in &closeds {
                let best = closeds
                    .iter()
                    .filter(|k| k.is_disjoint(c))
                    .map(|k| (val[k], *k))
                    .max_by(|p, q| p.0.cmp(&q.0))
                    .expect("∅ is closed");
                if add(val[&c], best.0) < total {
                    w3.fail(|| {
                        Witness::new("no closed set disjoint from C brings μ up to μ(X)")
                            .item(space, "C", c, Some(val[&c]))
                            .item(space, "best-K", best.1, Some(best.0))
                            .item(space, "X", x, Some(total))
                    });
                }
            }
            for &u in &opens {
                let f = x - u;
                if add(val[&u], val[&f]) != total {
                    w4.fail(|| {
                        Witness::new("μ(U) ≠ μ(X) − μ(X∖U)")
                            .item(space, "U", u, Some(val[&u]))
                            .item(space, "complement", f, Some(val[&f]))
                            .item(space, "X", x, Some(total))
                    });
                }
            }
        }
        complete = if ev.meter.exhausted() {
            Err(format!("budget of {} evaluations exhausted", budget.0))
        } else {
            Ok(())
        };
    }

    let mut checks = vec![
        tm1.finish(complete.clone()),
        tm2.finish(complete.clone()),
        tm3.finish(complete.clone()),
        mono.finish(complete.clone()),
        c1.finish(complete.clone()),
        c2.finish(complete.clone()),
        c3.finish(complete.clone()),
    ];
    if compact_space {
        // Wheeler's conditions: monotone and additive on closed sets are
        // covered by `monotone` and `c2`.
        checks.push(w3.finish(complete.clone()));
        checks.push(w4.finish(complete.clone()));
    }
    if lambda.is_some() {
        let done = if mu.model().catalog().truncated {
            Err("solid-set catalog truncated".to_string())
        } else {
            Ok(())
        };
        checks.push(agree.finish(done));
        if two_valued {
            checks.push(simple.finish(complete.clone()));
        }
    }
    let subadd_check = subadd.finish(complete.clone());
    let classification = match &subadd_check.verdict {
        _ if !empty.is_zero() => NOT_TM,
        Verdict::Pass { .. } => MEASURE_EXTENDABLE,
        Verdict::Fail { .. } => PROPER_TM,
        Verdict::Unknown { .. } => "unknown",
    };
    let properties = vec![
        coadd.finish(complete.clone()),
        dual.finish(complete.clone()),
        subadd_check,
    ];
    Ok(TmValidationReport {
        space: space.name().to_string(),
        measure: mu.describe(),
        set_count,
        checks,
        properties,
        classification: classification.to_string(),
    })
}

/// Members not strictly contained in another member.
fn maximal(mut sets: Vec<Region>) -> Vec<Region> {
    sets.sort_by_key(|r| std::cmp::Reverse(r.len()));
    let mut out: Vec<Region> = Vec::new();
    for s in sets {
        if !out.iter().any(|t| s.is_subset(*t)) {
            out.push(s);
        }
    }
    out
}

/// A cover whose μ-sum is below μ of the covered set.
#[derive(Debug, Clone, Serialize)]
pub struct Cover {
    pub target: String,
    pub target_value: Value,
    pub parts: Vec<String>,
    pub values: Vec<Value>,
    pub sum: Value,
    #[serde(skip)]
    pub target_cells: Region,
    #[serde(skip)]
    pub part_cells: Vec<Region>,
}

/// Looks for at most `max_parts` μ-null open or closed sets covering
/// `target` (X by default) when μ(target) > 0.
///
/// Candidates are the bounded solid sets of the catalog, the labelled
/// regions and their complements, and the open stars of vertices; only
/// maximal μ-null candidates are tried. With `solid_only`, non-solid
/// candidates are dropped first.
pub fn find_nonsubadditive_cover(
    mu: &TopMeasure,
    target: Option<Region>,
    max_parts: usize,
    solid_only: bool,
    budget: Budget,
) -> Result<Option<Cover>, ExtendError> {
    let space = mu.space();
    let target = target.unwrap_or(space.points());
    let tv = mu.value(target)?;
    if tv.is_zero() {
        return Ok(None);
    }
    let mut cands: Vec<Region> = Vec::new();
    if mu.lambda().is_some() {
        cands.extend(mu.model().catalog().all());
    }
    cands.extend(labelled_regions(space));
    cands.extend(
        space
            .vertices()
            .iter()
            .map(|v| space.star(Region::singleton(v))),
    );
    let mut null = Vec::new();
    let mut seen = HashSet::new();
    for c in cands {
        let c = c & space.points();
        if c.is_empty() || !c.intersects(target) || !seen.insert(c) {
            continue;
        }
        if (!solid_only || solid::is_solid(space, c)) && mu.value(c)?.is_zero() {
            null.push(c);
        }
    }
    let null = maximal(null);
    let mut meter = Meter::new(budget);
    let mut chosen = Vec::new();
    fn rec(
        target: Region,
        covered: Region,
        null: &[Region],
        chosen: &mut Vec<Region>,
        left: usize,
        meter: &mut Meter,
    ) -> bool {
        let Some(x) = (target - covered).first() else {
            return true;
        };
        if left == 0 || !meter.spend(1) {
            return false;
        }
        for &c in null.iter().filter(|c| c.contains(x)) {
            chosen.push(c);
            if rec(target, covered | c, null, chosen, left - 1, meter) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    if !rec(
        target,
        Region::EMPTY,
        &null,
        &mut chosen,
        max_parts,
        &mut meter,
    ) {
        return Ok(None);
    }
    Ok(Some(Cover {
        target: space.format_region(target),
        target_value: tv,
        parts: chosen.iter().map(|&c| space.format_region(c)).collect(),
        values: vec![Value::ZERO; chosen.len()],
        sum: Value::ZERO,
        target_cells: target,
        part_cells: chosen,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::builtin;
    use crate::ssf::{parse_descriptor, Weights};

    fn model(name: &str) -> Arc<Model> {
        Model::new(builtin(name).unwrap())
    }

    #[test]
    fn majority_extension_on_sphere() {
        let m = model("sphere(3)");
        let l = Arc::new(parse_descriptor(m.clone(), "point-majority points=q0,q1,q2").unwrap());
        let s = m.space();
        assert_eq!(mu_open(&l, s.points()).unwrap(), Value::ONE);
        let k = s.parse_region("q0,q1,q0-q1").unwrap();
        assert_eq!(mu_closed(&l, k).unwrap(), Value::ONE);
        let two = s.parse_region("q0,q1").unwrap();
        assert_eq!(lambda2(&l, two).unwrap(), Rational::zero());
    }

    #[test]
    fn point_mass_extends_to_membership() {
        let m = model("interval(2)");
        let s = m.space();
        let v1 = s.index_of("v1").unwrap();
        let mut w = Weights::zeros(s);
        w.set(v1, Rational::from_integer(1));
        let l = Arc::new(SolidSetFunction::restricted_measure(m.clone(), w));
        for_all_open_closed(s, |a| {
            let want = if a.contains(v1) {
                Value::ONE
            } else {
                Value::ZERO
            };
            assert_eq!(mu(&l, a).unwrap(), want, "{}", s.format_region(a));
        });
        let r = validate_tm(&TopMeasure::extend(l), Budget::DEFAULT).unwrap();
        assert_eq!(r.overall(), "pass", "{r:#?}");
        assert_eq!(r.classification, MEASURE_EXTENDABLE);
    }

    fn for_all_open_closed(s: &FiniteSpace, mut f: impl FnMut(Region)) {
        for a in s.points().subsets() {
            if s.is_open(a) || s.is_closed(a) {
                f(a);
            }
        }
    }

    #[test]
    fn compact_route_rejects_noncompact_space() {
        let m = model("line(4)");
        let l = Arc::new(SolidSetFunction::zero(m));
        assert!(matches!(
            TopMeasure::compact_route(l),
            Err(ExtendError::NoncompactSpace(_))
        ));
    }

    #[test]
    fn constant_one_fails_on_empty_pair() {
        let m = model("interval(2)");
        let r = validate_tm(&TopMeasure::constant(m, Value::ONE), Budget::DEFAULT).unwrap();
        let w = r.check("tm1").unwrap().witness().unwrap();
        assert!(w.items.iter().all(|i| i.cells.is_empty()));
    }

    #[test]
    fn zero_is_a_measure() {
        let m = model("circle(4)");
        let l = Arc::new(SolidSetFunction::zero(m));
        let r = validate_tm(&TopMeasure::extend(l), Budget::DEFAULT).unwrap();
        assert_eq!(r.overall(), "pass");
    }

    #[test]
    fn lambda1_rejects_disconnected_sets() {
        let m = model("interval(2)");
        let l = SolidSetFunction::zero(m.clone());
        let two = m.space().parse_region("v0,v2").unwrap();
        assert!(matches!(
            lambda1(&l, two),
            Err(ExtendError::NotSemisolid(_))
        ));
    }
}
