//! Builders for the shipped complexes.
//!
//! Every builder produces a regular cell complex from vertex lists, then
//! optionally collapses a closed subcomplex to the single minimal cell ω. The
//! collapse models the one-point compactification: cells that touched the
//! collapsed part end up strictly above ω.

use std::collections::BTreeMap;

use crate::space::{Cell, FiniteSpace, SpaceError};

/// Id of the infinity cell in the noncompact builders other than the line,
/// where ω keeps the id `v0` of the vertex it replaces.
pub const OMEGA: &str = "w";

#[derive(Default)]
struct Complex {
    names: Vec<String>,
    // Sorted vertex list -> cell index in `cells`.
    index: BTreeMap<Vec<usize>, usize>,
    cells: Vec<(Vec<usize>, u32, String)>,
    faces: Vec<Vec<usize>>,
}

impl Complex {
    fn vertex(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        let v = self.names.len();
        self.names.push(name.clone());
        self.cell(vec![v], 0, name, Vec::new());
        v
    }

    fn cell(&mut self, mut verts: Vec<usize>, dim: u32, id: String, faces: Vec<usize>) -> usize {
        verts.sort_unstable();
        if let Some(&i) = self.index.get(&verts) {
            return i;
        }
        let i = self.cells.len();
        self.index.insert(verts.clone(), i);
        self.cells.push((verts, dim, id));
        self.faces.push(faces);
        i
    }

    fn edge(&mut self, a: usize, b: usize) -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let id = format!("{}-{}", self.names[lo], self.names[hi]);
        let fa = self.index[&vec![a]];
        let fb = self.index[&vec![b]];
        self.cell(vec![a, b], 1, id, vec![fa, fb])
    }

    fn named_edge(&mut self, a: usize, b: usize, id: String) -> usize {
        let fa = self.index[&vec![a]];
        let fb = self.index[&vec![b]];
        self.cell(vec![a, b], 1, id, vec![fa, fb])
    }

    /// A 2-cell bounded by the cycle `vs`.
    fn polygon(&mut self, vs: &[usize]) -> usize {
        let faces: Vec<usize> = (0..vs.len())
            .map(|i| self.edge(vs[i], vs[(i + 1) % vs.len()]))
            .collect();
        let mut sorted = vs.to_vec();
        sorted.sort_unstable();
        let id = sorted
            .iter()
            .map(|&v| self.names[v].as_str())
            .collect::<Vec<_>>()
            .join("-");
        self.cell(vs.to_vec(), 2, id, faces)
    }

    /// Turns the complex into a space, collapsing every cell whose vertices
    /// all satisfy `collapse` (when given) to ω. `label` assigns labels from
    /// the vertex list of each surviving cell.
    fn finish(
        self,
        name: &str,
        collapse: Option<(&str, &dyn Fn(usize) -> bool)>,
        label: &dyn Fn(&[usize]) -> Vec<String>,
    ) -> Result<FiniteSpace, SpaceError> {
        let n = self.cells.len();
        let gone: Vec<bool> = (0..n)
            .map(|i| match collapse {
                Some((_, f)) => self.cells[i].0.iter().all(|&v| f(v)),
                None => false,
            })
            .collect();
        let mut out_index = vec![usize::MAX; n];
        let mut cells = Vec::new();
        let omega = if gone.iter().any(|&g| g) {
            cells.push(Cell::new(collapse.map_or(OMEGA, |(id, _)| id), 0));
            Some(0)
        } else {
            None
        };
        for i in 0..n {
            if gone[i] {
                out_index[i] = omega.unwrap_or(usize::MAX);
                continue;
            }
            let (verts, dim, id) = &self.cells[i];
            let mut cell = Cell::new(id.clone(), *dim);
            cell.labels = label(verts);
            out_index[i] = cells.len();
            cells.push(cell);
        }
        let mut covers = Vec::new();
        for i in 0..n {
            if gone[i] {
                continue;
            }
            for &f in &self.faces[i] {
                covers.push((out_index[f], out_index[i]));
            }
        }
        FiniteSpace::new(name, cells, covers, omega)
    }
}

fn no_labels(_: &[usize]) -> Vec<String> {
    Vec::new()
}

fn too_small(what: &str) -> SpaceError {
    SpaceError::Builder(format!("resolution too small: {what}"))
}

/// Closed interval with `n` edges: `v0 .. vn`, `e1 .. en` with `e_i` joining
/// `v(i-1)` and `v(i)`.
pub fn build_interval(n: usize) -> Result<FiniteSpace, SpaceError> {
    if n < 1 {
        return Err(too_small("interval needs n >= 1"));
    }
    let mut c = Complex::default();
    let vs: Vec<usize> = (0..=n).map(|i| c.vertex(format!("v{i}"))).collect();
    for i in 1..=n {
        c.named_edge(vs[i - 1], vs[i], format!("e{i}"));
    }
    c.finish(&format!("interval-{n}"), None, &no_labels)
}

fn cycle(c: &mut Complex, n: usize) -> Vec<usize> {
    let vs: Vec<usize> = (0..n).map(|i| c.vertex(format!("v{i}"))).collect();
    for i in 1..=n {
        c.named_edge(vs[i - 1], vs[i % n], format!("e{i}"));
    }
    vs
}

/// Circle with `n` vertices and `n` edges.
pub fn build_circle(n: usize) -> Result<FiniteSpace, SpaceError> {
    if n < 3 {
        return Err(too_small("circle needs n >= 3"));
    }
    let mut c = Complex::default();
    cycle(&mut c, n);
    c.finish(&format!("circle-{n}"), None, &no_labels)
}

/// The real line: a circle with `n` vertices whose vertex `v0` is ω.
pub fn build_line_window(n: usize) -> Result<FiniteSpace, SpaceError> {
    if n < 3 {
        return Err(too_small("line window needs n >= 3"));
    }
    let mut c = Complex::default();
    let vs = cycle(&mut c, n);
    let v0 = vs[0];
    c.finish(&format!("line-{n}"), Some(("v0", &|v| v == v0)), &no_labels)
}

/// The filled triangle (`d = 2`) or the segment (`d = 1`) on vertices
/// `a`, `b`, `c`.
pub fn build_simplex(d: usize) -> Result<FiniteSpace, SpaceError> {
    let mut c = Complex::default();
    let vs: Vec<usize> = ["a", "b", "c"][..=d.min(2)]
        .iter()
        .map(|n| c.vertex(*n))
        .collect();
    match d {
        1 => {
            c.edge(vs[0], vs[1]);
        }
        2 => {
            c.polygon(&vs);
        }
        _ => return Err(too_small("simplex dimension must be 1 or 2")),
    }
    c.finish(&format!("simplex-{d}"), None, &no_labels)
}

/// Boundary of the tetrahedron (`d = 3`, a 14-cell sphere) or of the
/// triangle (`d = 2`, a 6-cell circle).
pub fn build_simplex_boundary(d: usize) -> Result<FiniteSpace, SpaceError> {
    if !(2..=3).contains(&d) {
        return Err(too_small("simplex boundary dimension must be 2 or 3"));
    }
    let mut c = Complex::default();
    let vs: Vec<usize> = ["a", "b", "c", "d"][..=d]
        .iter()
        .map(|n| c.vertex(*n))
        .collect();
    if d == 2 {
        for i in 0..3 {
            c.edge(vs[i], vs[(i + 1) % 3]);
        }
    } else {
        for skip in 0..4 {
            let face: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| vs[i]).collect();
            c.polygon(&face);
        }
    }
    c.finish(&format!("simplex-boundary-{d}"), None, &no_labels)
}

const RING: usize = 4;

/// Disk with a center vertex `c` and `r` concentric rings of four vertices.
///
/// Ring `i` has vertices `r{i}_{j}` at angle `j * 90` degrees. Labels:
/// `rim` (outer ring subcomplex), `rimv` (its vertices), `center`,
/// `core` (closed disk spanned by the center and ring 1), `ring1`
/// (the boundary cycle of `core`), `axis` (the horizontal diameter),
/// `upper` and `lower` (the open half disks off the axis).
pub fn build_disk(r: usize) -> Result<FiniteSpace, SpaceError> {
    if r < 2 {
        return Err(too_small("disk needs at least 2 rings"));
    }
    let (c, ring_of, angle_of) = disk_complex(r);
    let label = |vs: &[usize]| disk_labels(vs, r, &ring_of, &angle_of);
    c.finish(&format!("disk-{r}"), None, &label)
}

/// Unit disk without its center: the disk with `c` collapsed to ω.
pub fn build_punctured_disk(r: usize) -> Result<FiniteSpace, SpaceError> {
    if r < 2 {
        return Err(too_small("punctured disk needs at least 2 rings"));
    }
    let (c, ring_of, angle_of) = disk_complex(r);
    let label = |vs: &[usize]| disk_labels(vs, r, &ring_of, &angle_of);
    c.finish(
        &format!("punctured-disk-{r}"),
        Some((OMEGA, &|v| v == 0)),
        &label,
    )
}

/// Open disk: the disk with its rim collapsed to ω, a noncompact analogue
/// of the closed disk.
pub fn build_open_disk(r: usize) -> Result<FiniteSpace, SpaceError> {
    if r < 2 {
        return Err(too_small("open disk needs at least 2 rings"));
    }
    let (c, ring_of, angle_of) = disk_complex(r);
    let label = |vs: &[usize]| disk_labels(vs, r, &ring_of, &angle_of);
    let on_rim = |v: usize| ring_of[v] == r;
    c.finish(&format!("open-disk-{r}"), Some((OMEGA, &on_rim)), &label)
}

type DiskParts = (Complex, Vec<usize>, Vec<Option<usize>>);

fn disk_complex(r: usize) -> DiskParts {
    let mut c = Complex::default();
    let center = c.vertex("c");
    let mut ring_of = vec![0];
    let mut angle_of = vec![None];
    let mut rings: Vec<Vec<usize>> = Vec::new();
    for i in 1..=r {
        let ring: Vec<usize> = (0..RING)
            .map(|j| {
                ring_of.push(i);
                angle_of.push(Some(j));
                c.vertex(format!("r{i}_{j}"))
            })
            .collect();
        rings.push(ring);
    }
    for j in 0..RING {
        let k = (j + 1) % RING;
        c.polygon(&[center, rings[0][j], rings[0][k]]);
        for i in 1..r {
            let (a, b) = (&rings[i - 1], &rings[i]);
            c.polygon(&[a[j], b[k], b[j]]);
            c.polygon(&[a[j], a[k], b[k]]);
        }
    }
    (c, ring_of, angle_of)
}

fn disk_labels(
    vs: &[usize],
    r: usize,
    ring_of: &[usize],
    angle_of: &[Option<usize>],
) -> Vec<String> {
    let mut out = Vec::new();
    if vs.iter().all(|&v| ring_of[v] == r) {
        out.push("rim".to_string());
        if vs.len() == 1 {
            out.push("rimv".to_string());
        }
    }
    if vs == [0] {
        out.push("center".to_string());
    }
    if vs.iter().all(|&v| ring_of[v] <= 1) {
        out.push("core".to_string());
    }
    if vs.iter().all(|&v| ring_of[v] == 1) {
        out.push("ring1".to_string());
    }
    let on_axis = |v: usize| matches!(angle_of[v], None | Some(0) | Some(2));
    let up_closed = |v: usize| matches!(angle_of[v], None | Some(0) | Some(1) | Some(2));
    let low_closed = |v: usize| matches!(angle_of[v], None | Some(0) | Some(3) | Some(2));
    if vs.iter().all(|&v| on_axis(v)) {
        out.push("axis".to_string());
    } else if vs.iter().all(|&v| up_closed(v)) {
        out.push("upper".to_string());
    } else if vs.iter().all(|&v| low_closed(v)) {
        out.push("lower".to_string());
    }
    out
}

/// Sphere as the suspension of an `r`-gon: poles `n`, `s` and equator
/// vertices `q0 .. q(r-1)`. Label `equator` marks the equator cycle.
pub fn build_sphere(r: usize) -> Result<FiniteSpace, SpaceError> {
    if r < 3 {
        return Err(too_small("sphere needs an equator of at least 3 vertices"));
    }
    let mut c = Complex::default();
    let north = c.vertex("n");
    let south = c.vertex("s");
    let eq: Vec<usize> = (0..r).map(|j| c.vertex(format!("q{j}"))).collect();
    for j in 0..r {
        let k = (j + 1) % r;
        c.polygon(&[north, eq[j], eq[k]]);
        c.polygon(&[south, eq[j], eq[k]]);
    }
    let label = move |vs: &[usize]| {
        if vs.iter().all(|&v| v >= 2) {
            vec!["equator".to_string()]
        } else {
            Vec::new()
        }
    };
    c.finish(&format!("sphere-{r}"), None, &label)
}

/// Closed annulus with three concentric rings of `m` vertices: inner `a{j}`,
/// middle `b{j}` and outer `c{j}`. Labels: `inner`, `middle`, `outer` (the
/// ring cycles), `band` (the open band between the inner and outer circles)
/// and `seg{j}`, the radial segment through angle `j`.
pub fn build_annulus(m: usize) -> Result<FiniteSpace, SpaceError> {
    if m < 4 {
        return Err(too_small("annulus needs at least 4 vertices per ring"));
    }
    let mut c = Complex::default();
    let rings: Vec<Vec<usize>> = ["a", "b", "c"]
        .iter()
        .map(|p| (0..m).map(|j| c.vertex(format!("{p}{j}"))).collect())
        .collect();
    for i in 0..2 {
        let (lo, hi) = (&rings[i], &rings[i + 1]);
        for j in 0..m {
            let k = (j + 1) % m;
            c.edge(lo[j], hi[j]);
            c.polygon(&[lo[j], hi[k], hi[j]]);
            c.polygon(&[lo[j], lo[k], hi[k]]);
        }
    }
    let label = move |vs: &[usize]| {
        let mut out = Vec::new();
        let ring = |v: usize| v / m;
        let angle = |v: usize| v % m;
        for (i, name) in ["inner", "middle", "outer"].iter().enumerate() {
            if vs.iter().all(|&v| ring(v) == i) {
                out.push(name.to_string());
            }
        }
        if !vs.iter().all(|&v| ring(v) == 0) && !vs.iter().all(|&v| ring(v) == 2) {
            out.push("band".to_string());
        }
        if vs.iter().all(|&v| angle(v) == angle(vs[0])) {
            out.push(format!("seg{}", angle(vs[0])));
        }
        out
    };
    c.finish(&format!("annulus-{m}"), None, &label)
}

/// The plane: a square grid of `(r+2) x (r+2)` vertices `p{x}_{y}` whose
/// frame is collapsed to ω, leaving `r x r` interior vertices.
///
/// Labels: `line` (the row `y = 1`), `below` (the closed half plane
/// `y <= 1`), `above` (its open complement), `mid` (the row `y = 2`) and
/// `p` (the central vertex, kept off the line).
pub fn build_plane_window(r: usize) -> Result<FiniteSpace, SpaceError> {
    if r < 2 {
        return Err(too_small("plane window needs r >= 2"));
    }
    let side = r + 2;
    let mut c = Complex::default();
    let grid: Vec<Vec<usize>> = (0..side)
        .map(|x| (0..side).map(|y| c.vertex(format!("p{x}_{y}"))).collect())
        .collect();
    for x in 0..side - 1 {
        for y in 0..side - 1 {
            c.polygon(&[
                grid[x][y],
                grid[x + 1][y],
                grid[x + 1][y + 1],
                grid[x][y + 1],
            ]);
        }
    }
    let coord = move |v: usize| (v / side, v % side);
    let frame = move |v: usize| {
        let (x, y) = coord(v);
        x == 0 || y == 0 || x == side - 1 || y == side - 1
    };
    let p_vertex = (r.div_ceil(2), r.div_ceil(2).max(2));
    let label = move |vs: &[usize]| {
        let mut out = Vec::new();
        let ys: Vec<usize> = vs.iter().map(|&v| coord(v).1).collect();
        if ys.iter().all(|&y| y == 1) {
            out.push("line".to_string());
        }
        if ys.iter().all(|&y| y == 2) {
            out.push("mid".to_string());
        }
        if ys.iter().all(|&y| y <= 1) {
            out.push("below".to_string());
        } else {
            out.push("above".to_string());
        }
        if vs.len() == 1 && coord(vs[0]) == p_vertex {
            out.push("p".to_string());
        }
        out
    };
    c.finish(&format!("plane-{r}"), Some((OMEGA, &frame)), &label)
}

/// The strip R x [0,1] with a square hole: a grid of `(w+1) x (h+1)`
/// vertices whose left and right columns are collapsed to ω and whose square
/// nearest the middle is removed. Needs `w >= 4`, `h >= 3`.
pub fn build_strip(w: usize, h: usize) -> Result<FiniteSpace, SpaceError> {
    if w < 4 || h < 3 {
        return Err(too_small("strip needs w >= 4 and h >= 3"));
    }
    let mut c = Complex::default();
    let grid: Vec<Vec<usize>> = (0..=w)
        .map(|x| (0..=h).map(|y| c.vertex(format!("p{x}_{y}"))).collect())
        .collect();
    let hole = (w / 2 - 1, h / 2);
    for x in 0..w {
        for y in 0..h {
            if (x, y) == hole {
                for (a, b) in [
                    (grid[x][y], grid[x + 1][y]),
                    (grid[x + 1][y], grid[x + 1][y + 1]),
                    (grid[x][y + 1], grid[x + 1][y + 1]),
                    (grid[x][y], grid[x][y + 1]),
                ] {
                    c.edge(a, b);
                }
                continue;
            }
            c.polygon(&[
                grid[x][y],
                grid[x + 1][y],
                grid[x + 1][y + 1],
                grid[x][y + 1],
            ]);
        }
    }
    let rows = h + 1;
    let ends = move |v: usize| {
        let x = v / rows;
        x == 0 || x == w
    };
    c.finish(&format!("strip-{w}x{h}"), Some((OMEGA, &ends)), &no_labels)
}

/// Resolves a builtin name such as `disk(2)` or `strip(4,3)`.
pub fn builtin(spec: &str) -> Result<FiniteSpace, SpaceError> {
    let spec = spec.trim();
    let (name, args) = match spec.split_once('(') {
        Some((n, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| SpaceError::Builder(format!("unclosed parameters in {spec:?}")))?;
            let args: Result<Vec<usize>, _> = inner
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect();
            let args =
                args.map_err(|_| SpaceError::Builder(format!("bad parameters in {spec:?}")))?;
            (n.trim(), args)
        }
        None => (spec, Vec::new()),
    };
    let arg = |i: usize, default: usize| args.get(i).copied().unwrap_or(default);
    match name {
        "interval" => build_interval(arg(0, 2)),
        "circle" => build_circle(arg(0, 4)),
        "disk" => build_disk(arg(0, 2)),
        "sphere" => build_sphere(arg(0, 3)),
        "annulus" => build_annulus(arg(0, 4)),
        "line" | "line_window" | "line-window" => build_line_window(arg(0, 4)),
        "plane" | "plane_window" | "plane-window" => build_plane_window(arg(0, 3)),
        "punctured_disk" | "punctured-disk" => build_punctured_disk(arg(0, 2)),
        "open_disk" | "open-disk" => build_open_disk(arg(0, 2)),
        "strip" => build_strip(arg(0, 4), arg(1, 3)),
        "simplex" => build_simplex(arg(0, 2)),
        "simplex_boundary" | "simplex-boundary" => build_simplex_boundary(arg(0, 3)),
        other => Err(SpaceError::Builder(format!(
            "unknown builtin space {other:?}"
        ))),
    }
}

/// Names accepted by [`builtin`], with their default parameters.
pub const BUILTINS: &[(&str, &str)] = &[
    ("interval(n)", "interval(2)"),
    ("circle(n)", "circle(4)"),
    ("disk(r)", "disk(2)"),
    ("sphere(r)", "sphere(3)"),
    ("annulus(m)", "annulus(4)"),
    ("line(n)", "line(4)"),
    ("plane(r)", "plane(3)"),
    ("punctured-disk(r)", "punctured-disk(2)"),
    ("open-disk(r)", "open-disk(2)"),
    ("strip(w,h)", "strip(4,3)"),
    ("simplex(d)", "simplex(2)"),
    ("simplex-boundary(d)", "simplex-boundary(3)"),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Region;

    #[test]
    fn interval_two_matches_hand_descriptor() {
        let s = build_interval(2).unwrap();
        assert_eq!(s.cell_count(), 5);
        let e1 = s.index_of("e1").unwrap();
        assert_eq!(
            s.closure(Region::singleton(e1)),
            s.parse_region("v0,v1,e1").unwrap()
        );
    }

    #[test]
    fn circle_four_has_eight_cells() {
        let s = build_circle(4).unwrap();
        assert_eq!(s.cell_count(), 8);
        assert!(s.is_compact_space());
    }

    #[test]
    fn line_window_four_has_seven_cells_in_x() {
        let s = build_line_window(4).unwrap();
        assert_eq!(s.points().len(), 7);
        let e1 = s.index_of("e1").unwrap();
        assert_eq!(
            s.closure(Region::singleton(e1)),
            s.parse_region("v1,e1").unwrap()
        );
        assert!(!s.is_bounded(Region::singleton(e1)));
        let v2 = s.parse_region("v2").unwrap();
        assert!(s.is_compact(v2));
    }

    #[test]
    fn simplices() {
        assert_eq!(build_simplex(2).unwrap().cell_count(), 7);
        assert_eq!(build_simplex_boundary(3).unwrap().cell_count(), 14);
        assert_eq!(build_simplex_boundary(2).unwrap().cell_count(), 6);
    }

    #[test]
    fn small_resolutions_are_rejected() {
        assert!(build_disk(1).is_err());
        assert!(build_circle(2).is_err());
        assert!(build_strip(3, 3).is_err());
    }

    #[test]
    fn builtin_parsing() {
        assert_eq!(builtin("disk(2)").unwrap().name(), "disk-2");
        assert_eq!(builtin("strip(4,3)").unwrap().name(), "strip-4x3");
        assert!(builtin("torus(3)").is_err());
    }

    #[test]
    fn noncompact_builders_have_infinity() {
        for s in [
            build_line_window(5).unwrap(),
            build_plane_window(2).unwrap(),
            build_punctured_disk(2).unwrap(),
            build_strip(4, 3).unwrap(),
        ] {
            assert!(s.infinity().is_some(), "{}", s.name());
            assert!(!s.frontier().is_empty());
        }
        for s in [
            build_disk(2).unwrap(),
            build_sphere(3).unwrap(),
            build_annulus(4).unwrap(),
        ] {
            assert!(s.infinity().is_none(), "{}", s.name());
        }
    }
}
