//! Brute-force reference computations.
//!
//! Nothing here calls into the engine modules: the order relation,
//! components, hulls and solidity are recomputed from the cover list by
//! scanning every subset. The only engine type used besides the space is the
//! solid-set function being evaluated. Spaces above the budget are refused.

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::region::Region;
use crate::report::{Verdict, Witness};
use crate::space::FiniteSpace;
use crate::ssf::SolidSetFunction;
use crate::value::{Rational, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleBudget {
    pub max_cells: usize,
    pub max_open_sets: usize,
    pub max_family: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_cells: 18,
            max_open_sets: 200_000,
            max_family: 4,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{space} has {cells} cells, the oracle budget allows {max}")]
    TooManyCells {
        space: String,
        cells: usize,
        max: usize,
    },
    #[error("{space} has more than {max} open sets")]
    TooManyOpenSets { space: String, max: usize },
    #[error("{0} is neither open nor closed")]
    NotOpenOrClosed(String),
    #[error("solid-set function rejected {region}: {reason}")]
    Lambda { region: String, reason: String },
}

/// Which condition [`Oracle::axiom`] sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    S1,
    S2,
    S3,
    S4,
    Tm1,
    Tm2,
    Tm3,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::S1,
        Axiom::S2,
        Axiom::S3,
        Axiom::S4,
        Axiom::Tm1,
        Axiom::Tm2,
        Axiom::Tm3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::S1 => "s1",
            Axiom::S2 => "s2",
            Axiom::S3 => "s3",
            Axiom::S4 => "s4",
            Axiom::Tm1 => "tm1",
            Axiom::Tm2 => "tm2",
            Axiom::Tm3 => "tm3",
        }
    }

    pub fn parse(s: &str) -> Option<Axiom> {
        Axiom::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// Structural facts about one subset, recomputed from scratch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facts {
    pub components: Vec<Region>,
    /// Complement components with their boundedness flag.
    pub complement: Vec<(Region, bool)>,
    pub open: bool,
    pub closed: bool,
    pub bounded: bool,
    pub solid: bool,
    pub hull: Region,
}

/// Definition-literal view of a small space.
pub struct Oracle<'a> {
    space: &'a FiniteSpace,
    omega: Option<usize>,
    x: Region,
    // below[i]: cells j with j <= i, ω included.
    below: Vec<Region>,
    above: Vec<Region>,
    opens: Vec<Region>,
    budget: OracleBudget,
}

impl<'a> Oracle<'a> {
    pub fn new(space: &'a FiniteSpace, budget: OracleBudget) -> Result<Self, OracleError> {
        let n = space.cell_count();
        if n > budget.max_cells {
            return Err(OracleError::TooManyCells {
                space: space.name().to_string(),
                cells: n,
                max: budget.max_cells,
            });
        }
        let mut below: Vec<Region> = (0..n).map(Region::singleton).collect();
        // Transitive closure by relaxation; n is tiny.
        loop {
            let mut changed = false;
            for &(lo, hi) in space.covers() {
                let merged = below[hi] | below[lo];
                if merged != below[hi] {
                    below[hi] = merged;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut above = vec![Region::EMPTY; n];
        for (i, b) in below.iter().enumerate() {
            for j in b.iter() {
                above[j].insert(i);
            }
        }
        let omega = space.infinity();
        let x = match omega {
            Some(w) => Region::prefix(n).without(w),
            None => Region::prefix(n),
        };
        let mut o = Oracle {
            space,
            omega,
            x,
            below,
            above,
            opens: Vec::new(),
            budget,
        };
        let mut opens = Vec::new();
        for s in x.subsets() {
            if o.open(s) {
                opens.push(s);
                if opens.len() > budget.max_open_sets {
                    return Err(OracleError::TooManyOpenSets {
                        space: space.name().to_string(),
                        max: budget.max_open_sets,
                    });
                }
            }
        }
        o.opens = opens;
        Ok(o)
    }

    pub fn space(&self) -> &FiniteSpace {
        self.space
    }

    pub fn points(&self) -> Region {
        self.x
    }

    pub fn open(&self, r: Region) -> bool {
        r.iter().all(|i| (self.above[i] & self.x).is_subset(r))
    }

    pub fn closed(&self, r: Region) -> bool {
        r.iter().all(|i| (self.below[i] & self.x).is_subset(r))
    }

    /// No cell of `r` lies above ω.
    pub fn bounded(&self, r: Region) -> bool {
        match self.omega {
            Some(w) => r.iter().all(|i| !self.below[i].contains(w)),
            None => true,
        }
    }

    pub fn compact(&self, r: Region) -> bool {
        self.closed(r) && self.bounded(r)
    }

    fn comparable(&self, i: usize, j: usize) -> bool {
        self.below[i].contains(j) || self.below[j].contains(i)
    }

    /// Components of the comparability graph restricted to `r`.
    pub fn components(&self, r: Region) -> Vec<Region> {
        let mut out = Vec::new();
        let mut seen = Region::EMPTY;
        for start in r.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = Region::singleton(start);
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for j in r.iter() {
                    if !comp.contains(j) && self.comparable(i, j) {
                        comp.insert(j);
                        stack.push(j);
                    }
                }
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }

    pub fn connected(&self, r: Region) -> bool {
        self.components(r).len() <= 1
    }

    pub fn facts(&self, r: Region) -> Facts {
        let components = self.components(r);
        let complement: Vec<(Region, bool)> = self
            .components(self.x - r)
            .into_iter()
            .map(|c| (c, self.bounded(c)))
            .collect();
        let complement_ok = if self.omega.is_none() {
            complement.len() <= 1
        } else {
            complement.iter().all(|&(_, b)| !b)
        };
        let hull = complement
            .iter()
            .filter(|&&(_, b)| b)
            .fold(r, |h, &(c, _)| h | c);
        Facts {
            solid: components.len() <= 1 && complement_ok,
            components,
            complement,
            open: self.open(r),
            closed: self.closed(r),
            bounded: self.bounded(r),
            hull,
        }
    }

    pub fn solid(&self, r: Region) -> bool {
        self.facts(r).solid
    }

    /// Every subset of X that is compact.
    pub fn compacts(&self) -> Vec<Region> {
        self.x.subsets().filter(|&s| self.compact(s)).collect()
    }

    pub fn opens(&self) -> &[Region] {
        &self.opens
    }

    pub fn closeds(&self) -> Vec<Region> {
        self.opens.iter().map(|&u| self.x - u).collect()
    }

    /// Nonempty compact solid sets and bounded open solid sets.
    pub fn bounded_solids(&self) -> (Vec<Region>, Vec<Region>) {
        let compact = self
            .compacts()
            .into_iter()
            .filter(|&k| !k.is_empty() && self.solid(k))
            .collect();
        let open = self
            .opens
            .iter()
            .copied()
            .filter(|&u| !u.is_empty() && self.bounded(u) && self.solid(u))
            .collect();
        (compact, open)
    }

    fn lam(&self, l: &SolidSetFunction, a: Region) -> Result<Rational, OracleError> {
        if a.is_empty() {
            return Ok(Rational::zero());
        }
        l.evaluate(a).map_err(|e| OracleError::Lambda {
            region: self.space.format_region(a),
            reason: e.to_string(),
        })
    }

    /// λ(hull A) minus λ of each bounded complement component.
    pub fn lambda1(&self, l: &SolidSetFunction, a: Region) -> Result<Rational, OracleError> {
        let f = self.facts(a);
        let mut v = self.lam(l, f.hull)?;
        for (c, bounded) in f.complement {
            if bounded {
                v -= self.lam(l, c)?;
            }
        }
        Ok(v)
    }

    pub fn lambda2(&self, l: &SolidSetFunction, k: Region) -> Result<Rational, OracleError> {
        let mut v = Rational::zero();
        for c in self.components(k) {
            v += self.lambda1(l, c)?;
        }
        Ok(v)
    }

    /// μ by the literal sup over all compact subsets (open sets) or the
    /// literal inf over all open supersets (closed sets).
    pub fn brute_force_mu(&self, l: &SolidSetFunction, a: Region) -> Result<Value, OracleError> {
        let mut cache = MuCache::default();
        self.mu_cached(l, a, &mut cache)
    }

    fn mu_cached(
        &self,
        l: &SolidSetFunction,
        a: Region,
        cache: &mut MuCache,
    ) -> Result<Value, OracleError> {
        if self.open(a) {
            return self.sup_open(l, a, cache);
        }
        if !self.closed(a) {
            return Err(OracleError::NotOpenOrClosed(self.space.format_region(a)));
        }
        let mut best: Option<Value> = None;
        for &u in &self.opens {
            if a.is_subset(u) {
                let v = self.sup_open(l, u, cache)?;
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        Ok(best.unwrap_or(Value::ZERO))
    }

    fn sup_open(
        &self,
        l: &SolidSetFunction,
        u: Region,
        cache: &mut MuCache,
    ) -> Result<Value, OracleError> {
        if let Some(&v) = cache.open.get(&u) {
            return Ok(v);
        }
        if cache.compacts.is_none() {
            let mut ks = Vec::new();
            for k in self.compacts() {
                ks.push((k, self.lambda2(l, k)?));
            }
            cache.compacts = Some(ks);
        }
        let best = cache
            .compacts
            .as_ref()
            .unwrap()
            .iter()
            .filter(|(k, _)| k.is_subset(u))
            .map(|&(_, v)| v)
            .max()
            .unwrap_or_else(Rational::zero);
        let v = Value::Finite(best);
        cache.open.insert(u, v);
        Ok(v)
    }

    /// μ on every open and closed region.
    pub fn mu_table(&self, l: &SolidSetFunction) -> Result<Vec<(Region, Value)>, OracleError> {
        let mut cache = MuCache::default();
        let mut out = Vec::new();
        let mut regions: Vec<Region> = self.opens.clone();
        regions.extend(self.closeds().into_iter().filter(|&f| !self.open(f)));
        regions.sort_unstable();
        for r in regions {
            out.push((r, self.mu_cached(l, r, &mut cache)?));
        }
        Ok(out)
    }

    /// Definition-literal sweep of one condition. `l` is needed for the
    /// solid-set conditions, `mu` for the topological-measure ones. The
    /// first violation in subset order is returned as the witness.
    pub fn axiom(
        &self,
        axiom: Axiom,
        l: Option<&SolidSetFunction>,
        mu: Option<&dyn Fn(Region) -> Option<Value>>,
    ) -> Result<Verdict, OracleError> {
        match axiom {
            Axiom::S1 | Axiom::S2 | Axiom::S3 | Axiom::S4 => match l {
                Some(l) => self.ssf_axiom(axiom, l),
                None => Ok(Verdict::unknown("no solid-set function given")),
            },
            Axiom::Tm1 | Axiom::Tm2 | Axiom::Tm3 => match mu {
                Some(mu) => Ok(self.tm_axiom(axiom, mu)),
                None => Ok(Verdict::unknown("no set function given")),
            },
        }
    }

    fn ssf_axiom(&self, axiom: Axiom, l: &SolidSetFunction) -> Result<Verdict, OracleError> {
        let sp = self.space;
        let (compact, open) = self.bounded_solids();
        let val = |a: Region| self.lam(l, a).map(Value::Finite);
        match axiom {
            Axiom::S1 => {
                for &c in &compact {
                    let vc = val(c)?;
                    let inside: Vec<Region> =
                        compact.iter().copied().filter(|k| k.is_subset(c)).collect();
                    let mut found = None;
                    let mut pick = Vec::new();
                    self.disjoint_families(&inside, 0, Region::EMPTY, &mut pick, &mut |fam| {
                        let total: Value =
                            fam.iter().map(|&k| val(k).unwrap_or(Value::Infinite)).sum();
                        if total > vc {
                            found = Some(fam.to_vec());
                            return false;
                        }
                        true
                    });
                    if let Some(fam) = found {
                        let mut w = Witness::new("disjoint compact solids inside C exceed λ(C)")
                            .item(sp, "C", c, Some(vc));
                        for k in fam {
                            w = w.item(sp, "part", k, Some(val(k)?));
                        }
                        return Ok(Verdict::fail(w));
                    }
                }
                Ok(Verdict::pass())
            }
            Axiom::S2 => {
                for &u in &open {
                    let vu = val(u)?;
                    let mut sup = Value::ZERO;
                    for &k in compact.iter().filter(|k| k.is_subset(u)) {
                        sup = sup.max(val(k)?);
                    }
                    if sup != vu {
                        return Ok(Verdict::fail(
                            Witness::new("λ(U) differs from the sup over compact solids inside")
                                .item(sp, "U", u, Some(vu))
                                .item(sp, "sup", Region::EMPTY, Some(sup)),
                        ));
                    }
                }
                Ok(Verdict::pass())
            }
            Axiom::S3 => {
                for &k in &compact {
                    let vk = val(k)?;
                    let mut inf = Value::Infinite;
                    for &u in open.iter().filter(|u| k.is_subset(**u)) {
                        inf = inf.min(val(u)?);
                    }
                    if inf != vk {
                        return Ok(Verdict::fail(
                            Witness::new("λ(K) differs from the inf over open solids around it")
                                .item(sp, "K", k, Some(vk))
                                .item(sp, "inf", Region::EMPTY, Some(inf)),
                        ));
                    }
                }
                Ok(Verdict::pass())
            }
            _ => {
                let mut all = compact.clone();
                all.extend(open.iter().copied());
                all.sort_unstable();
                all.dedup();
                for &a in &all {
                    let va = val(a)?;
                    let pieces: Vec<Region> =
                        all.iter().copied().filter(|p| p.is_subset(a)).collect();
                    let mut found = None;
                    let mut pick = Vec::new();
                    self.partitions(a, &pieces, &mut pick, &mut |parts| {
                        if parts.len() < 2 {
                            return true;
                        }
                        let total: Value = parts
                            .iter()
                            .map(|&p| val(p).unwrap_or(Value::Infinite))
                            .sum();
                        if total != va {
                            found = Some(parts.to_vec());
                            return false;
                        }
                        true
                    });
                    if let Some(parts) = found {
                        let mut w = Witness::new("solid partition whose values do not add up")
                            .item(sp, "A", a, Some(va));
                        for p in parts {
                            w = w.item(sp, "part", p, Some(val(p)?));
                        }
                        return Ok(Verdict::fail(w));
                    }
                }
                Ok(Verdict::pass())
            }
        }
    }

    fn disjoint_families(
        &self,
        items: &[Region],
        from: usize,
        used: Region,
        pick: &mut Vec<Region>,
        visit: &mut dyn FnMut(&[Region]) -> bool,
    ) -> bool {
        if pick.len() >= 2 && !visit(pick) {
            return false;
        }
        if pick.len() == self.budget.max_family {
            return true;
        }
        for i in from..items.len() {
            if items[i].is_disjoint(used) {
                pick.push(items[i]);
                let go = self.disjoint_families(items, i + 1, used | items[i], pick, visit);
                pick.pop();
                if !go {
                    return false;
                }
            }
        }
        true
    }

    fn partitions(
        &self,
        left: Region,
        pieces: &[Region],
        pick: &mut Vec<Region>,
        visit: &mut dyn FnMut(&[Region]) -> bool,
    ) -> bool {
        let Some(x) = left.first() else {
            return visit(pick);
        };
        if pick.len() == self.budget.max_family {
            return true;
        }
        for &p in pieces {
            if p.contains(x) && p.is_subset(left) {
                pick.push(p);
                let go = self.partitions(left - p, pieces, pick, visit);
                pick.pop();
                if !go {
                    return false;
                }
            }
        }
        true
    }

    fn tm_axiom(&self, axiom: Axiom, mu: &dyn Fn(Region) -> Option<Value>) -> Verdict {
        let sp = self.space;
        let compacts = self.compacts();
        let closeds = self.closeds();
        let value = |r: Region| mu(r).unwrap_or(Value::Infinite);
        match axiom {
            Axiom::Tm1 => {
                let mut family: Vec<Region> = compacts.clone();
                family.extend(self.opens.iter().copied());
                family.sort_unstable();
                family.dedup();
                let member = |r: Region| self.open(r) || self.compact(r);
                for (i, &a) in family.iter().enumerate() {
                    for &b in &family[i..] {
                        if !a.is_disjoint(b) || !member(a | b) {
                            continue;
                        }
                        let (va, vb, vab) = (value(a), value(b), value(a | b));
                        if va + vb != vab {
                            return Verdict::fail(
                                Witness::new("μ(A ⊔ B) differs from μ(A) + μ(B)")
                                    .item(sp, "A", a, Some(va))
                                    .item(sp, "B", b, Some(vb))
                                    .item(sp, "A ⊔ B", a | b, Some(vab)),
                            );
                        }
                    }
                }
                Verdict::pass()
            }
            Axiom::Tm2 => {
                for &u in &self.opens {
                    let sup = compacts
                        .iter()
                        .filter(|k| k.is_subset(u))
                        .map(|&k| value(k))
                        .max()
                        .unwrap_or(Value::ZERO);
                    let vu = value(u);
                    if sup != vu {
                        return Verdict::fail(
                            Witness::new("μ(U) differs from the sup over compact subsets")
                                .item(sp, "U", u, Some(vu))
                                .item(sp, "sup", Region::EMPTY, Some(sup)),
                        );
                    }
                }
                Verdict::pass()
            }
            _ => {
                for &f in &closeds {
                    let inf = self
                        .opens
                        .iter()
                        .filter(|u| f.is_subset(**u))
                        .map(|&u| value(u))
                        .min()
                        .unwrap_or(Value::Infinite);
                    let vf = value(f);
                    if inf != vf {
                        return Verdict::fail(
                            Witness::new("μ(F) differs from the inf over open supersets")
                                .item(sp, "F", f, Some(vf))
                                .item(sp, "inf", Region::EMPTY, Some(inf)),
                        );
                    }
                }
                Verdict::pass()
            }
        }
    }
}

#[derive(Default)]
struct MuCache {
    compacts: Option<Vec<(Region, Rational)>>,
    open: HashMap<Region, Value>,
}

/// One disagreement between the engine and the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub what: String,
    pub region: String,
    pub engine: String,
    pub oracle: String,
}

/// Outcome of a cross-check run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub space: String,
    pub subject: String,
    pub compared: u64,
    pub mismatches: Vec<Mismatch>,
}

impl Agreement {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn record(&mut self, what: &str, sp: &FiniteSpace, r: Region, engine: String, oracle: String) {
        self.compared += 1;
        if engine != oracle {
            self.mismatches.push(Mismatch {
                what: what.to_string(),
                region: sp.format_region(r),
                engine,
                oracle,
            });
        }
    }
}

/// Compares components, complement components, hulls and classification
/// flags with the engine on every subset of X.
pub fn cross_check_structure(o: &Oracle) -> Agreement {
    let sp = o.space();
    let mut a = Agreement {
        space: sp.name().to_string(),
        subject: "structure".to_string(),
        ..Agreement::default()
    };
    for r in o.points().subsets() {
        let f = o.facts(r);
        let class = crate::solid::classify(sp, r);
        a.record(
            "components",
            sp,
            r,
            format!("{:?}", sp.components(r)),
            format!("{:?}", f.components),
        );
        let engine_comp: Vec<(Region, bool)> = sp
            .complement_components(r)
            .into_iter()
            .map(|c| (c.cells, c.bounded))
            .collect();
        a.record(
            "complement",
            sp,
            r,
            format!("{engine_comp:?}"),
            format!("{:?}", f.complement),
        );
        a.record(
            "hull",
            sp,
            r,
            format!("{:?}", crate::solid::hull_of(sp, r)),
            format!("{:?}", f.hull),
        );
        let flags = |c: bool, o: bool, cl: bool, b: bool, s: bool| format!("{c}{o}{cl}{b}{s}");
        a.record(
            "class",
            sp,
            r,
            flags(
                class.connected,
                class.open,
                class.closed,
                class.bounded,
                class.solid,
            ),
            flags(
                f.components.len() <= 1,
                f.open,
                f.closed,
                f.bounded,
                f.solid,
            ),
        );
    }
    a
}

/// Compares engine μ with [`Oracle::brute_force_mu`] on every open and
/// closed region.
pub fn cross_check_mu(o: &Oracle, l: &SolidSetFunction) -> Agreement {
    let sp = o.space();
    let mut a = Agreement {
        space: sp.name().to_string(),
        subject: l.describe(),
        ..Agreement::default()
    };
    let table = match o.mu_table(l) {
        Ok(t) => t,
        Err(e) => {
            a.record("oracle", sp, Region::EMPTY, String::new(), e.to_string());
            return a;
        }
    };
    for (r, want) in table {
        let got = match crate::extend::mu(l, r) {
            Ok(v) => v.to_string(),
            Err(e) => format!("error: {e}"),
        };
        a.record("mu", sp, r, got, want.to_string());
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_circle, build_interval, build_line_window};
    use crate::solid::Model;
    use crate::ssf::Weights;
    use std::sync::Arc;

    #[test]
    fn interval_point_mass_on_middle_vertex() {
        let m = Model::new(build_interval(2).unwrap());
        let sp = m.space();
        let v1 = sp.index_of("v1").unwrap();
        let mut w = Weights::zeros(sp);
        w.set(v1, Rational::from_integer(1));
        let l = crate::ssf::SolidSetFunction::restricted_measure(Arc::clone(&m), w);
        let o = Oracle::new(sp, OracleBudget::default()).unwrap();
        // The literal inf over the open supersets of {v1}.
        assert_eq!(
            o.brute_force_mu(&l, Region::singleton(v1)).unwrap(),
            Value::ONE
        );
        assert_eq!(o.brute_force_mu(&l, Region::EMPTY).unwrap(), Value::ZERO);
    }

    #[test]
    fn refuses_large_spaces() {
        let sp = build_circle(12).unwrap();
        assert!(matches!(
            Oracle::new(&sp, OracleBudget::default()),
            Err(OracleError::TooManyCells { .. })
        ));
    }

    #[test]
    fn structure_agrees_on_line() {
        let sp = build_line_window(4).unwrap();
        let o = Oracle::new(&sp, OracleBudget::default()).unwrap();
        let a = cross_check_structure(&o);
        assert!(a.ok(), "{:?}", a.mismatches);
        assert_eq!(a.compared, 4 * 128);
    }

    #[test]
    fn zero_passes_every_axiom() {
        let m = Model::new(build_circle(4).unwrap());
        let l = crate::ssf::SolidSetFunction::zero(Arc::clone(&m));
        let o = Oracle::new(m.space(), OracleBudget::default()).unwrap();
        let mu = |_: Region| Some(Value::ZERO);
        for ax in Axiom::ALL {
            let v = o.axiom(ax, Some(&l), Some(&mu)).unwrap();
            assert!(v.is_pass(), "{}: {v:?}", ax.name());
        }
    }
}
