//! Finite face posets with the Alexandrov topology.
//!
//! Open sets are up-sets, closed sets are down-sets. An optional minimal cell
//! ω stands for the point at infinity of the one-point compactification; the
//! modeled space X is everything except ω.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::region::{Region, MAX_CELLS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("too many cells: {0} (limit {MAX_CELLS})")]
    TooManyCells(usize),
    #[error("duplicate cell id {0}")]
    DuplicateCell(String),
    #[error("unknown cell {0:?}")]
    UnknownCell(String),
    #[error("cover {0} < {0} is reflexive")]
    ReflexiveCover(String),
    #[error("order cycle through cells {0:?}")]
    Cycle(Vec<String>),
    #[error("infinity cell {omega} is not minimal: {below} lies below it")]
    InfinityNotMinimal { omega: String, below: String },
    #[error("space has no cells besides infinity")]
    Empty,
    #[error("X is disconnected: {0:?} is not reachable from {1:?}")]
    Disconnected(String, String),
    #[error("up-set of {0} is disconnected")]
    UpSetDisconnected(String),
    #[error("bad region literal: unknown token {0:?}")]
    RegionToken(String),
    #[error("region contains the infinity cell {0}")]
    RegionHasInfinity(String),
    #[error("{0}")]
    Builder(String),
}

/// One cell of a face poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub dim: u32,
    pub labels: Vec<String>,
}

impl Cell {
    pub fn new(id: impl Into<String>, dim: u32) -> Self {
        Cell {
            id: id.into(),
            dim,
            labels: Vec::new(),
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.labels.push(label.into());
        self
    }
}

/// A complement component together with its boundedness flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub cells: Region,
    pub bounded: bool,
}

/// A validated finite space. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FiniteSpace {
    name: String,
    cells: Vec<Cell>,
    covers: Vec<(usize, usize)>,
    infinity: Option<usize>,
    down: Vec<Region>,
    up: Vec<Region>,
    adjacent: Vec<Region>,
    points: Region,
    frontier: Region,
    vertices: Region,
    labels: BTreeMap<String, Region>,
}

impl FiniteSpace {
    /// Builds and validates a space from cells and cover pairs `(lower, upper)`.
    pub fn new(
        name: impl Into<String>,
        cells: Vec<Cell>,
        covers: Vec<(usize, usize)>,
        infinity: Option<usize>,
    ) -> Result<Self, SpaceError> {
        let n = cells.len();
        if n > MAX_CELLS {
            return Err(SpaceError::TooManyCells(n));
        }
        let mut seen = BTreeMap::new();
        for (i, c) in cells.iter().enumerate() {
            if seen.insert(c.id.clone(), i).is_some() {
                return Err(SpaceError::DuplicateCell(c.id.clone()));
            }
        }
        let mut covers = covers;
        covers.sort_unstable();
        covers.dedup();
        for &(a, b) in &covers {
            if a >= n || b >= n {
                return Err(SpaceError::UnknownCell(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(SpaceError::ReflexiveCover(cells[a].id.clone()));
            }
        }

        let order = topo_order(n, &covers).map_err(|cyc| {
            SpaceError::Cycle(cyc.into_iter().map(|i| cells[i].id.clone()).collect())
        })?;
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in &covers {
            below[b].push(a);
        }
        let mut down = vec![Region::EMPTY; n];
        for &x in &order {
            let mut d = Region::singleton(x);
            for &y in &below[x] {
                d |= down[y];
            }
            down[x] = d;
        }
        let mut up = vec![Region::EMPTY; n];
        for (x, d) in down.iter().enumerate() {
            for y in *d {
                up[y].insert(x);
            }
        }

        let all = Region::prefix(n);
        let (points, frontier) = match infinity {
            Some(w) => {
                if w >= n {
                    return Err(SpaceError::UnknownCell(format!("#{w}")));
                }
                if let Some(b) = (down[w].without(w)).first() {
                    return Err(SpaceError::InfinityNotMinimal {
                        omega: cells[w].id.clone(),
                        below: cells[b].id.clone(),
                    });
                }
                (all.without(w), up[w].without(w))
            }
            None => (all, Region::EMPTY),
        };
        if points.is_empty() {
            return Err(SpaceError::Empty);
        }
        let adjacent: Vec<Region> = (0..n)
            .map(|x| (down[x] | up[x]).without(x) & points)
            .collect();
        let vertices = points
            .iter()
            .filter(|&x| down[x] == Region::singleton(x))
            .collect();

        let mut labels: BTreeMap<String, Region> = BTreeMap::new();
        for (i, c) in cells.iter().enumerate() {
            for l in &c.labels {
                labels.entry(l.clone()).or_default().insert(i);
            }
        }

        let space = FiniteSpace {
            name: name.into(),
            cells,
            covers,
            infinity,
            down,
            up,
            adjacent,
            points,
            frontier,
            vertices,
            labels,
        };

        let comps = space.components(points);
        if comps.len() > 1 {
            let a = comps[0].first().unwrap_or(0);
            let b = comps[1].first().unwrap_or(0);
            return Err(SpaceError::Disconnected(
                space.cells[b].id.clone(),
                space.cells[a].id.clone(),
            ));
        }
        for x in points {
            if !space.is_connected(space.up[x] & points) {
                return Err(SpaceError::UpSetDisconnected(space.cells[x].id.clone()));
            }
        }
        Ok(space)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of cells including ω.
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn infinity(&self) -> Option<usize> {
        self.infinity
    }

    /// True when there is no ω, i.e. X itself is compact.
    pub fn is_compact_space(&self) -> bool {
        self.infinity.is_none()
    }

    /// All cells of X.
    pub fn points(&self) -> Region {
        self.points
    }

    /// Cells lying strictly above ω.
    pub fn frontier(&self) -> Region {
        self.frontier
    }

    /// Minimal cells of X that are not above ω.
    pub fn vertices(&self) -> Region {
        self.vertices
    }

    /// Down-set of a cell in X̂, the cell included.
    pub fn down(&self, x: usize) -> Region {
        self.down[x]
    }

    /// Up-set of a cell in X̂, the cell included.
    pub fn up(&self, x: usize) -> Region {
        self.up[x]
    }

    /// Cells of X comparable to `x`, other than `x`.
    pub fn adjacent(&self, x: usize) -> Region {
        self.adjacent[x]
    }

    pub fn labels(&self) -> &BTreeMap<String, Region> {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Option<Region> {
        if name == "all" {
            return Some(self.points);
        }
        self.labels.get(name).copied()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.id == id)
    }

    pub fn complement(&self, r: Region) -> Region {
        self.points - r
    }

    pub fn closure(&self, r: Region) -> Region {
        let mut c = Region::EMPTY;
        for x in r & self.points {
            c |= self.down[x];
        }
        c & self.points
    }

    /// Minimal open superset (the up-closure, or open star).
    pub fn star(&self, r: Region) -> Region {
        let mut s = Region::EMPTY;
        for x in r & self.points {
            s |= self.up[x];
        }
        s & self.points
    }

    pub fn interior(&self, r: Region) -> Region {
        let r = r & self.points;
        r.iter()
            .filter(|&x| (self.up[x] & self.points).is_subset(r))
            .collect()
    }

    pub fn is_open(&self, r: Region) -> bool {
        self.star(r) == r & self.points && r.is_subset(self.points)
    }

    pub fn is_closed(&self, r: Region) -> bool {
        self.closure(r) == r && r.is_subset(self.points)
    }

    /// No cell of `r` lies above ω.
    pub fn is_bounded(&self, r: Region) -> bool {
        r.is_disjoint(self.frontier)
    }

    pub fn is_compact(&self, r: Region) -> bool {
        self.is_closed(r) && self.is_bounded(r)
    }

    /// The largest closed bounded subset of an open set `u`:
    /// cells whose whole down-set in X̂ lies in `u`.
    pub fn kmax(&self, u: Region) -> Region {
        u.iter().filter(|&x| self.down[x].is_subset(u)).collect()
    }

    /// Connected component of `r` containing `seed`.
    pub fn component_of(&self, r: Region, seed: usize) -> Region {
        let mut comp = Region::singleton(seed);
        let mut frontier = comp;
        while let Some(x) = frontier.first() {
            frontier = frontier.without(x);
            let fresh = self.adjacent[x] & (r - comp);
            comp |= fresh;
            frontier |= fresh;
        }
        comp
    }

    /// Components of `r`, ordered by least cell.
    pub fn components(&self, r: Region) -> Vec<Region> {
        let mut rest = r & self.points;
        let mut out = Vec::new();
        while let Some(x) = rest.first() {
            let c = self.component_of(rest, x);
            rest -= c;
            out.push(c);
        }
        out
    }

    pub fn component_count(&self, r: Region) -> usize {
        let mut rest = r & self.points;
        let mut k = 0;
        while let Some(x) = rest.first() {
            rest -= self.component_of(rest, x);
            k += 1;
        }
        k
    }

    /// The empty region counts as connected.
    pub fn is_connected(&self, r: Region) -> bool {
        match (r & self.points).first() {
            None => true,
            Some(x) => self.component_of(r & self.points, x) == r & self.points,
        }
    }

    pub fn complement_components(&self, r: Region) -> Vec<Component> {
        self.components(self.complement(r))
            .into_iter()
            .map(|c| Component {
                cells: c,
                bounded: self.is_bounded(c),
            })
            .collect()
    }

    /// Checks that `r` is a valid region of X.
    pub fn check_region(&self, r: Region) -> Result<Region, SpaceError> {
        if let Some(w) = self.infinity {
            if r.contains(w) {
                return Err(SpaceError::RegionHasInfinity(self.cells[w].id.clone()));
            }
        }
        if !r.is_subset(Region::prefix(self.cells.len())) {
            return Err(SpaceError::UnknownCell(format!(
                "#{}",
                (r - self.points).first().unwrap_or(0)
            )));
        }
        Ok(r)
    }

    /// Parses a region literal: comma-separated cell ids and `@label` references.
    pub fn parse_region(&self, literal: &str) -> Result<Region, SpaceError> {
        let mut r = Region::EMPTY;
        for tok in literal.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Some(label) = tok.strip_prefix('@') {
                r |= self
                    .label(label)
                    .ok_or_else(|| SpaceError::RegionToken(tok.to_string()))?;
            } else {
                let i = self
                    .index_of(tok)
                    .ok_or_else(|| SpaceError::RegionToken(tok.to_string()))?;
                r.insert(i);
            }
        }
        self.check_region(r)
    }

    /// Region literal listing cell ids in index order.
    pub fn format_region(&self, r: Region) -> String {
        r.iter()
            .map(|i| self.cells[i].id.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// X̂ as a compact space: ω becomes an ordinary cell.
    pub fn compactification(&self) -> FiniteSpace {
        FiniteSpace::new(
            format!("{}^", self.name),
            self.cells.clone(),
            self.covers.clone(),
            None,
        )
        .expect("the compactification of a valid space is valid")
    }

    /// The space with the minimal cell `omega` taken as the point at
    /// infinity, so that X∖{ω} of a compact X becomes noncompact.
    pub fn punctured(&self, omega: usize) -> Result<FiniteSpace, SpaceError> {
        FiniteSpace::new(
            format!("{}-{}", self.name, self.cells[omega].id),
            self.cells.clone(),
            self.covers.clone(),
            Some(omega),
        )
    }

    /// Serializes to the text descriptor format.
    pub fn to_descriptor(&self) -> String {
        let mut out = format!("space {}\n", self.name);
        if let Some(w) = self.infinity {
            out.push_str(&format!("infinity {}\n", self.cells[w].id));
        }
        for c in &self.cells {
            out.push_str(&format!("cell {} dim {}", c.id, c.dim));
            if !c.labels.is_empty() {
                out.push_str(&format!(" label {}", c.labels.join(",")));
            }
            out.push('\n');
        }
        for &(a, b) in &self.covers {
            out.push_str(&format!(
                "cover {} {}\n",
                self.cells[a].id, self.cells[b].id
            ));
        }
        out
    }

    /// Parses the text descriptor format.
    ///
    /// ```text
    /// space I2
    /// cell v0 dim 0
    /// cell e1 dim 1 label mid
    /// cover v0 e1
    /// ```
    pub fn from_descriptor(text: &str) -> Result<Self, SpaceError> {
        let mut name = None;
        let mut infinity: Option<(usize, String)> = None;
        let mut cells: Vec<Cell> = Vec::new();
        let mut ids: BTreeMap<String, usize> = BTreeMap::new();
        let mut covers: Vec<(usize, String, String)> = Vec::new();

        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: &str| SpaceError::Parse {
                line,
                msg: msg.to_string(),
            };
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks[0] {
                "space" => {
                    if toks.len() != 2 {
                        return Err(err("expected `space <name>`"));
                    }
                    if name.is_some() {
                        return Err(err("duplicate space header"));
                    }
                    name = Some(toks[1].to_string());
                }
                "infinity" => {
                    if toks.len() != 2 {
                        return Err(err("expected `infinity <cell-id>`"));
                    }
                    if infinity.is_some() {
                        return Err(err("duplicate infinity line"));
                    }
                    infinity = Some((line, toks[1].to_string()));
                }
                "cell" => {
                    let ok = matches!(toks.len(), 4 | 6)
                        && toks[2] == "dim"
                        && (toks.len() == 4 || toks[4] == "label");
                    if !ok {
                        return Err(err("expected `cell <id> dim <d> [label <text>]`"));
                    }
                    let id = toks[1];
                    if id.contains(',') || id.starts_with('@') {
                        return Err(err("cell ids may not contain ',' or start with '@'"));
                    }
                    let dim: u32 = toks[3].parse().map_err(|_| err("bad dimension"))?;
                    if ids.insert(id.to_string(), cells.len()).is_some() {
                        return Err(SpaceError::DuplicateCell(id.to_string()));
                    }
                    let mut cell = Cell::new(id, dim);
                    if toks.len() == 6 {
                        cell.labels = toks[5]
                            .split(',')
                            .filter(|s| !s.is_empty())
                            .map(str::to_string)
                            .collect();
                    }
                    cells.push(cell);
                }
                "cover" => {
                    if toks.len() != 3 {
                        return Err(err("expected `cover <lower> <upper>`"));
                    }
                    covers.push((line, toks[1].to_string(), toks[2].to_string()));
                }
                other => return Err(err(&format!("unknown directive {other:?}"))),
            }
        }
        let name = name.ok_or(SpaceError::Parse {
            line: 1,
            msg: "missing `space <name>` header".into(),
        })?;
        let lookup = |line: usize, id: &str| {
            ids.get(id).copied().ok_or(SpaceError::Parse {
                line,
                msg: format!("unknown cell {id:?}"),
            })
        };
        let mut pairs = Vec::with_capacity(covers.len());
        for (line, a, b) in &covers {
            pairs.push((lookup(*line, a)?, lookup(*line, b)?));
        }
        let infinity = match infinity {
            Some((line, id)) => Some(lookup(line, &id)?),
            None => None,
        };
        FiniteSpace::new(name, cells, pairs, infinity)
    }
}

/// Topological order of the cover graph (lower cells first), or a cycle.
fn topo_order(n: usize, covers: &[(usize, usize)]) -> Result<Vec<usize>, Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in covers {
        succ[a].push(b);
        indeg[b] += 1;
    }
    let mut stack: Vec<usize> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &succ[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                stack.push(y);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Walk backwards along remaining edges until a cell repeats.
    let mut pred: Vec<Option<usize>> = vec![None; n];
    for &(a, b) in covers {
        if indeg[a] > 0 && indeg[b] > 0 {
            pred[b] = Some(a);
        }
    }
    let start = (0..n).find(|&i| indeg[i] > 0).unwrap_or(0);
    let mut path = vec![start];
    let mut cur = start;
    while let Some(p) = pred[cur] {
        if let Some(pos) = path.iter().position(|&q| q == p) {
            let mut cyc = path[pos..].to_vec();
            cyc.reverse();
            return Err(cyc);
        }
        path.push(p);
        cur = p;
    }
    Err(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I2: &str = "space I2\n\
        cell v0 dim 0\ncell v1 dim 0\ncell v2 dim 0\ncell e1 dim 1\ncell e2 dim 1\n\
        cover v0 e1\ncover v1 e1\ncover v1 e2\ncover v2 e2\n";

    fn i2() -> FiniteSpace {
        FiniteSpace::from_descriptor(I2).unwrap()
    }

    fn r(s: &FiniteSpace, lit: &str) -> Region {
        s.parse_region(lit).unwrap()
    }

    #[test]
    fn interval_has_five_cells() {
        let s = i2();
        assert_eq!(s.cell_count(), 5);
        assert!(s.is_compact_space());
        assert_eq!(s.vertices(), r(&s, "v0,v1,v2"));
    }

    #[test]
    fn closure_and_interior_on_interval() {
        let s = i2();
        assert_eq!(s.closure(r(&s, "e1")), r(&s, "v0,v1,e1"));
        assert_eq!(s.closure(r(&s, "v1")), r(&s, "v1"));
        assert_eq!(s.interior(r(&s, "v0,v1,e1")), r(&s, "v0,e1"));
        assert_eq!(s.interior(Region::EMPTY), Region::EMPTY);
        assert_eq!(s.interior(s.points()), s.points());
        assert!(s.is_compact(r(&s, "v1")));
    }

    #[test]
    fn components_sorted_by_least_cell() {
        let s = i2();
        assert_eq!(s.components(r(&s, "v0,v2")), vec![r(&s, "v0"), r(&s, "v2")]);
        assert_eq!(
            s.components(r(&s, "v0,e1,v2")),
            vec![r(&s, "v0,e1"), r(&s, "v2")]
        );
        assert!(s.components(Region::EMPTY).is_empty());
        assert!(s.complement_components(s.points()).is_empty());
    }

    #[test]
    fn cycle_is_rejected() {
        let text = "space bad\ncell v0 dim 0\ncell e1 dim 1\ncover v0 e1\ncover e1 v0\n";
        match FiniteSpace::from_descriptor(text) {
            Err(SpaceError::Cycle(cells)) => {
                assert!(cells.contains(&"v0".to_string()));
                assert!(cells.contains(&"e1".to_string()));
            }
            other => panic!("expected a cycle error, got {other:?}"),
        }
    }

    #[test]
    fn infinity_must_be_minimal() {
        let text = "space bad\ninfinity e1\ncell v0 dim 0\ncell e1 dim 1\ncell v1 dim 0\n\
            cover v0 e1\ncover v1 e1\n";
        assert!(matches!(
            FiniteSpace::from_descriptor(text),
            Err(SpaceError::InfinityNotMinimal { .. })
        ));
    }

    #[test]
    fn disconnected_x_is_rejected() {
        let text = "space bad\ncell a dim 0\ncell b dim 0\n";
        assert!(matches!(
            FiniteSpace::from_descriptor(text),
            Err(SpaceError::Disconnected(..))
        ));
    }

    #[test]
    fn descriptor_round_trip_is_byte_identical() {
        let s = i2();
        let text = s.to_descriptor();
        let again = FiniteSpace::from_descriptor(&text).unwrap();
        assert_eq!(again.to_descriptor(), text);
    }

    #[test]
    fn region_literal_names_bad_token() {
        let s = i2();
        assert_eq!(
            s.parse_region("v0,zz"),
            Err(SpaceError::RegionToken("zz".into()))
        );
        assert_eq!(s.parse_region("@all"), Ok(s.points()));
    }
}
