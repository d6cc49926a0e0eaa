//! Solid and semisolid sets, solid hulls and the open-minus-compact
//! decompositions.

use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::partition::{self, GenusReport};
use crate::region::Region;
use crate::report::{Budget, Check, Meter, Verdict, Witness};
use crate::space::FiniteSpace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolidError {
    #[error("region {0} is not connected")]
    NotConnected(String),
    #[error("region {0} is not bounded")]
    NotBounded(String),
    #[error("region {0} is neither open nor closed")]
    NeitherOpenNorClosed(String),
    #[error("region {0} is not open")]
    NotOpen(String),
    #[error("region {0} is not compact")]
    NotCompact(String),
    #[error("region {0} is not solid")]
    NotSolid(String),
    #[error("{inner} is not contained in {outer}")]
    NotContained { inner: String, outer: String },
    #[error("model violation: piece {piece} should be {expected}")]
    ModelViolation {
        piece: String,
        expected: &'static str,
    },
}

/// Topological classification of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolidClass {
    pub connected: bool,
    pub open: bool,
    pub closed: bool,
    pub bounded: bool,
    pub compact: bool,
    pub solid: bool,
    pub semisolid: bool,
    pub complement_component_count: usize,
    pub unbounded_complement_count: usize,
}

pub fn classify(space: &FiniteSpace, r: Region) -> SolidClass {
    let comps = space.complement_components(r);
    let unbounded = comps.iter().filter(|c| !c.bounded).count();
    let connected = space.is_connected(r);
    let complement_ok = if space.is_compact_space() {
        comps.len() <= 1
    } else {
        unbounded == comps.len()
    };
    let open = space.is_open(r);
    let closed = space.is_closed(r);
    let bounded = space.is_bounded(r);
    SolidClass {
        connected,
        open,
        closed,
        bounded,
        compact: closed && bounded,
        solid: connected && complement_ok,
        // Complements of regions in a finite space always have finitely many
        // components.
        semisolid: connected,
        complement_component_count: comps.len(),
        unbounded_complement_count: unbounded,
    }
}

/// Connected with only unbounded complement components (noncompact X), or
/// connected with connected complement (compact X).
pub fn is_solid(space: &FiniteSpace, r: Region) -> bool {
    if !space.is_connected(r) {
        return false;
    }
    let rest = space.complement(r);
    if space.is_compact_space() {
        return space.is_connected(rest);
    }
    let mut left = rest;
    while let Some(x) = left.first() {
        let c = space.component_of(left, x);
        if space.is_bounded(c) {
            return false;
        }
        left -= c;
    }
    true
}

/// `r` together with every bounded component of its complement.
///
/// No precondition is checked; see [`solid_hull`].
pub fn hull_of(space: &FiniteSpace, r: Region) -> Region {
    let mut h = r;
    let mut left = space.complement(r);
    while let Some(x) = left.first() {
        let c = space.component_of(left, x);
        if space.is_bounded(c) {
            h |= c;
        }
        left -= c;
    }
    h
}

/// Bounded components of the complement, in least-cell order.
pub fn bounded_complement_components(space: &FiniteSpace, r: Region) -> Vec<Region> {
    space
        .complement_components(r)
        .into_iter()
        .filter(|c| c.bounded)
        .map(|c| c.cells)
        .collect()
}

/// Solid hull of a connected bounded region that is open or closed.
pub fn solid_hull(space: &FiniteSpace, r: Region) -> Result<Region, SolidError> {
    let lit = || space.format_region(r);
    if !space.is_connected(r) {
        return Err(SolidError::NotConnected(lit()));
    }
    if !space.is_bounded(r) {
        return Err(SolidError::NotBounded(lit()));
    }
    if !space.is_open(r) && !space.is_closed(r) {
        return Err(SolidError::NeitherOpenNorClosed(lit()));
    }
    Ok(hull_of(space, r))
}

/// How the compact part of [`decompose_open_minus_compact`] is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactPart {
    /// A single compact solid set.
    Solid,
    /// A disjoint union of compact connected sets.
    ConnectedUnion,
}

/// One component of `V \ C` with its class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Piece {
    pub region: Region,
    pub class: SolidClass,
}

/// Decomposes a bounded open semisolid `v` minus a compact `c` inside it and
/// checks each piece against the class the structure lemmas promise.
pub fn decompose_open_minus_compact(
    space: &FiniteSpace,
    v: Region,
    c: Region,
    mode: CompactPart,
) -> Result<Vec<Piece>, SolidError> {
    let lit = |r: Region| space.format_region(r);
    if !space.is_open(v) {
        return Err(SolidError::NotOpen(lit(v)));
    }
    if !space.is_bounded(v) {
        return Err(SolidError::NotBounded(lit(v)));
    }
    if !space.is_connected(v) {
        return Err(SolidError::NotConnected(lit(v)));
    }
    if !space.is_compact(c) {
        return Err(SolidError::NotCompact(lit(c)));
    }
    if !c.is_subset(v) {
        return Err(SolidError::NotContained {
            inner: lit(c),
            outer: lit(v),
        });
    }
    if mode == CompactPart::Solid && !is_solid(space, c) {
        return Err(SolidError::NotSolid(lit(c)));
    }
    let v_solid = is_solid(space, v);
    let comps = space.components(v - c);
    let split = comps.len() > 1;
    let mut pieces = Vec::with_capacity(comps.len());
    for r in comps {
        let class = classify(space, r);
        let semisolid_open = class.open && class.bounded && class.semisolid;
        let expected = if mode == CompactPart::Solid && v_solid && split {
            (class.solid && semisolid_open, "a bounded open solid set")
        } else {
            (semisolid_open, "a bounded open semisolid set")
        };
        if !expected.0 {
            return Err(SolidError::ModelViolation {
                piece: lit(r),
                expected: expected.1,
            });
        }
        pieces.push(Piece { region: r, class });
    }
    Ok(pieces)
}

/// Bounded solid sets of a space, split by kind.
#[derive(Debug, Clone, Default)]
pub struct SolidCatalog {
    /// Bounded open solid sets, including the empty set.
    pub open: Vec<Region>,
    /// Compact solid sets, including the empty set.
    pub compact: Vec<Region>,
    /// Set when enumeration stopped at the cap.
    pub truncated: bool,
}

impl SolidCatalog {
    /// Open and compact members without repetition (the empty set and any
    /// clopen set appear once), open ones first.
    pub fn all(&self) -> Vec<Region> {
        let mut out = self.open.clone();
        let opens: std::collections::HashSet<Region> = self.open.iter().copied().collect();
        out.extend(self.compact.iter().copied().filter(|r| !opens.contains(r)));
        out
    }

    pub fn len(&self) -> usize {
        self.open.len() + self.compact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Enumerates down-sets of X contained in `allowed`, faces before cofaces.
/// `visit` returns `false` to stop; the function returns `false` if stopped.
pub fn for_each_down_set(
    space: &FiniteSpace,
    allowed: Region,
    visit: &mut dyn FnMut(Region) -> bool,
) -> bool {
    let mut order: Vec<usize> = space.points().iter().collect();
    order.sort_by_key(|&x| (space.down(x).len(), x));
    let faces: Vec<Region> = order
        .iter()
        .map(|&x| space.down(x).without(x) & space.points())
        .collect();
    fn rec(
        i: usize,
        order: &[usize],
        faces: &[Region],
        allowed: Region,
        inside: Region,
        visit: &mut dyn FnMut(Region) -> bool,
    ) -> bool {
        if i == order.len() {
            return visit(inside);
        }
        let x = order[i];
        if allowed.contains(x)
            && faces[i].is_subset(inside)
            && !rec(i + 1, order, faces, allowed, inside.with(x), visit)
        {
            return false;
        }
        rec(i + 1, order, faces, allowed, inside, visit)
    }
    rec(0, &order, &faces, allowed, Region::EMPTY, visit)
}

/// Enumerates up-sets of X contained in `allowed`, cofaces before faces.
pub fn for_each_up_set(
    space: &FiniteSpace,
    allowed: Region,
    visit: &mut dyn FnMut(Region) -> bool,
) -> bool {
    let mut order: Vec<usize> = space.points().iter().collect();
    order.sort_by_key(|&x| (space.up(x).len(), x));
    let cofaces: Vec<Region> = order
        .iter()
        .map(|&x| space.up(x).without(x) & space.points())
        .collect();
    fn rec(
        i: usize,
        order: &[usize],
        cofaces: &[Region],
        allowed: Region,
        inside: Region,
        visit: &mut dyn FnMut(Region) -> bool,
    ) -> bool {
        if i == order.len() {
            return visit(inside);
        }
        let x = order[i];
        if allowed.contains(x)
            && cofaces[i].is_subset(inside)
            && !rec(i + 1, order, cofaces, allowed, inside.with(x), visit)
        {
            return false;
        }
        rec(i + 1, order, cofaces, allowed, inside, visit)
    }
    rec(0, &order, &cofaces, allowed, Region::EMPTY, visit)
}

/// Every bounded open solid set and every compact solid set, each once.
///
/// Stops with `truncated` set once more than `cap` candidate open or closed
/// sets have been scanned.
pub fn enumerate_bounded_solid_sets(space: &FiniteSpace, cap: usize) -> SolidCatalog {
    let mut cat = SolidCatalog::default();
    if space.is_compact_space() {
        // Compact solid sets are the closed solid sets, and the open solid
        // ones are exactly their complements.
        let mut meter = Meter::new(Budget(cap as u64));
        let complete = partition::for_each_closed_solid(space, &mut meter, &mut |k| {
            cat.compact.push(k);
            true
        });
        cat.compact.sort();
        cat.open = cat.compact.iter().map(|&k| space.complement(k)).collect();
        cat.open.sort();
        cat.truncated = !complete;
        return cat;
    }
    let bounded = space.points() - space.frontier();
    let mut scanned = 0usize;
    let complete = for_each_up_set(space, bounded, &mut |u| {
        scanned += 1;
        if scanned > cap {
            return false;
        }
        if is_solid(space, u) {
            cat.open.push(u);
        }
        true
    });
    if !complete {
        cat.truncated = true;
        return cat;
    }
    scanned = 0;
    let complete = for_each_down_set(space, bounded, &mut |k| {
        scanned += 1;
        if scanned > cap {
            return false;
        }
        if is_solid(space, k) {
            cat.compact.push(k);
        }
        true
    });
    cat.truncated = !complete;
    cat
}

/// A space together with lazily computed solid-set data shared by every
/// function defined on it.
#[derive(Debug)]
pub struct Model {
    space: FiniteSpace,
    cap: usize,
    catalog: OnceLock<SolidCatalog>,
    by_least: OnceLock<Vec<Vec<Region>>>,
    genus: Mutex<Option<GenusReport>>,
    hat_genus: Mutex<Option<GenusReport>>,
}

impl Model {
    /// Default number of candidate open or closed sets the catalog scans.
    pub const DEFAULT_CAP: usize = 50_000_000;

    pub fn new(space: FiniteSpace) -> Arc<Model> {
        Model::with_cap(space, Model::DEFAULT_CAP)
    }

    pub fn with_cap(space: FiniteSpace, cap: usize) -> Arc<Model> {
        Arc::new(Model {
            space,
            cap,
            catalog: OnceLock::new(),
            by_least: OnceLock::new(),
            genus: Mutex::new(None),
            hat_genus: Mutex::new(None),
        })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn catalog(&self) -> &SolidCatalog {
        self.catalog
            .get_or_init(|| enumerate_bounded_solid_sets(&self.space, self.cap))
    }

    /// Genus of X (compact spaces only), cached. A cached lower bound is
    /// recomputed when a larger budget is offered.
    pub fn genus(&self, budget: Budget) -> GenusReport {
        cached(&self.genus, budget, || {
            partition::genus(&self.space, partition::DEFAULT_FAMILY_BOUND, budget)
        })
    }

    /// Genus of the one-point compactification (noncompact spaces), cached.
    pub fn hat_genus(&self, budget: Budget) -> GenusReport {
        cached(&self.hat_genus, budget, || {
            partition::hatx_genus(&self.space, budget)
        })
    }

    /// Nonempty catalog members grouped by least cell.
    pub fn solids_by_least_cell(&self) -> &[Vec<Region>] {
        self.by_least.get_or_init(|| {
            let mut out = vec![Vec::new(); self.space.cell_count()];
            for r in self.catalog().all() {
                if let Some(x) = r.first() {
                    out[x].push(r);
                }
            }
            out
        })
    }
}

fn cached(
    slot: &Mutex<Option<GenusReport>>,
    budget: Budget,
    compute: impl FnOnce() -> GenusReport,
) -> GenusReport {
    let mut slot = slot.lock().unwrap_or_else(|e| e.into_inner());
    match &*slot {
        Some(r) if r.exact || r.budget >= budget.0 => r.clone(),
        _ => {
            let r = compute();
            *slot = Some(r.clone());
            r
        }
    }
}

/// Connected bounded regions that are open or closed, without the empty set.
/// `None` if the budget ran out.
pub fn connected_bounded_regions(space: &FiniteSpace, budget: Budget) -> Option<Vec<Region>> {
    let mut meter = Meter::new(budget);
    let mut out = Vec::new();
    let mut keep = |r: Region| {
        if !r.is_empty() && space.is_bounded(r) && space.is_connected(r) {
            out.push(r);
        }
        meter.spend(1)
    };
    let done = for_each_up_set(space, space.points(), &mut keep)
        && for_each_down_set(space, space.points(), &mut keep);
    if !done {
        return None;
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}

/// Checks the solid hull lemma on every connected bounded open or closed
/// region (and every pair of them):
///
/// - `a1` monotone under inclusion;
/// - `a2` the hull is bounded and solid, and equals the region iff the region is solid;
/// - `a3` idempotent;
/// - `a4` open stays open and compact stays compact;
/// - `a5` hulls of disjoint regions are disjoint or strictly nested.
///
/// On a compact space the checks are vacuous and pass with a note.
pub fn hull_properties(space: &FiniteSpace, budget: Budget) -> Vec<Check> {
    const NAMES: [&str; 5] = ["a1", "a2", "a3", "a4", "a5"];
    if space.is_compact_space() {
        // Every complement component is bounded, so every hull is X.
        let note = "stated for noncompact spaces";
        return NAMES
            .iter()
            .map(|n| Check::new(*n, Verdict::pass_with(note)))
            .collect();
    }
    let Some(regions) = connected_bounded_regions(space, budget) else {
        let why = format!("more open and closed sets than the budget of {}", budget.0);
        return NAMES
            .iter()
            .map(|n| Check::new(*n, Verdict::unknown(why.clone())))
            .collect();
    };
    let hulls: Vec<Region> = regions.iter().map(|&r| hull_of(space, r)).collect();
    let item = |w: Witness, role: &str, r: Region| w.item(space, role, r, None);
    let mut fails: [Option<Witness>; 5] = Default::default();

    for (&a, &h) in regions.iter().zip(&hulls) {
        if fails[1].is_none() {
            let solid = is_solid(space, a);
            if !space.is_bounded(h) || !is_solid(space, h) || solid != (h == a) {
                let w = Witness::new("hull is not a bounded solid set, or fixes a non-solid set");
                fails[1] = Some(item(item(w, "A", a), "hull", h));
            }
        }
        if fails[2].is_none() && hull_of(space, h) != h {
            let w = Witness::new("hull of the hull differs");
            fails[2] = Some(item(item(w, "A", a), "hull", h));
        }
        if fails[3].is_none() {
            let open_ok = !space.is_open(a) || space.is_open(h);
            let compact_ok = !space.is_closed(a) || space.is_closed(h);
            if !(open_ok && compact_ok) {
                let w = Witness::new("hull changes the kind of the region");
                fails[3] = Some(item(item(w, "A", a), "hull", h));
            }
        }
    }

    let mut meter = Meter::new(budget);
    let mut complete = true;
    'pairs: for (i, (&a, &ha)) in regions.iter().zip(&hulls).enumerate() {
        for (&b, &hb) in regions.iter().zip(&hulls).skip(i + 1) {
            if !meter.spend(1) {
                complete = false;
                break 'pairs;
            }
            let nested =
                |x: Region, y: Region, hx: Region, hy: Region| x.is_subset(y) && !hx.is_subset(hy);
            if fails[0].is_none() && (nested(a, b, ha, hb) || nested(b, a, hb, ha)) {
                let w = Witness::new("A is inside B but hull(A) is not inside hull(B)");
                let (x, y) = if a.is_subset(b) { (a, b) } else { (b, a) };
                fails[0] = Some(item(item(w, "A", x), "B", y));
            }
            if fails[4].is_none() && (a & b).is_empty() {
                let ok = (ha & hb).is_empty()
                    || (ha.is_subset(hb) && ha != hb)
                    || (hb.is_subset(ha) && ha != hb);
                if !ok {
                    let w = Witness::new("hulls of disjoint regions overlap without nesting");
                    fails[4] = Some(item(
                        item(item(item(w, "A", a), "B", b), "hull A", ha),
                        "hull B",
                        hb,
                    ));
                }
            }
        }
    }

    NAMES
        .iter()
        .zip(fails)
        .enumerate()
        .map(|(k, (name, fail))| {
            let v = match fail {
                Some(w) => Verdict::fail(w),
                None if !complete && (k == 0 || k == 4) => {
                    Verdict::unknown(format!("pair scan stopped at the budget of {}", budget.0))
                }
                None => Verdict::pass_with(format!("{} regions", regions.len())),
            };
            Check::new(*name, v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;

    #[test]
    fn inner_square_is_solid_and_its_boundary_semisolid() {
        let s = build_disk(2).unwrap();
        let core = s.label("core").unwrap();
        assert!(s.is_compact(core));
        assert!(classify(&s, core).solid);
        let ring = s.label("ring1").unwrap();
        let c = classify(&s, ring);
        assert!(!c.solid);
        assert!(c.semisolid);
        assert_eq!(c.complement_component_count, 2);
    }

    #[test]
    fn empty_region_is_connected_and_solid() {
        for s in [build_disk(2).unwrap(), build_line_window(4).unwrap()] {
            let c = classify(&s, Region::EMPTY);
            assert!(c.connected && c.solid);
        }
    }

    #[test]
    fn hull_fills_the_enclosed_disk() {
        let s = build_open_disk(2).unwrap();
        let ring = s.label("ring1").unwrap();
        assert_eq!(solid_hull(&s, ring).unwrap(), s.label("core").unwrap());
    }

    #[test]
    fn hull_on_a_compact_space_is_everything() {
        // Every complement component of a compact space is bounded.
        let s = build_disk(2).unwrap();
        let ring = s.label("ring1").unwrap();
        assert_eq!(solid_hull(&s, ring).unwrap(), s.points());
    }

    #[test]
    fn hull_of_middle_vertex_on_the_line_is_itself() {
        let s = build_line_window(4).unwrap();
        let v2 = s.parse_region("v2").unwrap();
        assert_eq!(solid_hull(&s, v2).unwrap(), v2);
        let comps = s.complement_components(v2);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| !c.bounded));
    }

    #[test]
    fn hull_rejects_bad_input() {
        let s = build_interval(2).unwrap();
        let two = s.parse_region("v0,v2").unwrap();
        assert!(matches!(
            solid_hull(&s, two),
            Err(SolidError::NotConnected(_))
        ));
        let mixed = s.parse_region("v1,e1").unwrap();
        assert!(matches!(
            solid_hull(&s, mixed),
            Err(SolidError::NeitherOpenNorClosed(_))
        ));
    }

    #[test]
    fn disk_minus_central_disk_is_one_semisolid_piece() {
        let s = build_disk(2).unwrap();
        let v = s.points() - s.label("rim").unwrap();
        let c = s.label("core").unwrap();
        let pieces = decompose_open_minus_compact(&s, v, c, CompactPart::Solid).unwrap();
        assert_eq!(pieces.len(), 1);
        assert!(pieces[0].class.semisolid && !pieces[0].class.solid);
        assert_eq!(pieces[0].class.complement_component_count, 2);
    }

    #[test]
    fn band_minus_middle_circle_is_two_semisolid_pieces() {
        let s = build_annulus(4).unwrap();
        let v = s.label("band").unwrap();
        let c = s.label("middle").unwrap();
        let pieces = decompose_open_minus_compact(&s, v, c, CompactPart::ConnectedUnion).unwrap();
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|p| p.class.semisolid && p.class.open));
    }

    #[test]
    fn decomposition_with_empty_compact_returns_v() {
        let s = build_disk(2).unwrap();
        let v = s.points() - s.label("rim").unwrap();
        let pieces =
            decompose_open_minus_compact(&s, v, Region::EMPTY, CompactPart::Solid).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].region, v);
    }

    #[test]
    fn unbounded_cells_are_never_enumerated() {
        let s = build_line_window(4).unwrap();
        let cat = enumerate_bounded_solid_sets(&s, 1 << 20);
        assert!(!cat.truncated);
        for r in cat.all() {
            assert!(r.is_disjoint(s.frontier()));
        }
    }

    #[test]
    fn cap_is_reported() {
        let s = build_disk(2).unwrap();
        let cat = enumerate_bounded_solid_sets(&s, 10);
        assert!(cat.truncated);
    }

    #[test]
    fn hull_lemma_holds_on_the_punctured_sphere() {
        let sphere = builtin("sphere(3)").unwrap();
        let s = sphere.punctured(sphere.index_of("n").unwrap()).unwrap();
        let checks = hull_properties(&s, Budget::DEFAULT);
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c.verdict.is_pass()), "{checks:?}");
    }
}
