//! Upper convex hulls as explicit cell complexes.
//!
//! For a finite dual point set `S`, the upper hull `U(S)` is the part of the
//! convex hull with nothing above it in the last (intercept) coordinate. Its
//! vertex set `U*(S)` is the minimal subset realizing the same max-function,
//! and its face lattice is dual to the tessellation of input space into
//! argmax cells: `k`-cells of the tessellation correspond to `(d-k)`-cells
//! of `U(S)`.
//!
//! The complex records, per cell, every input point lying on the closed
//! cell — including collinear or coplanar points that are not vertices.
//! Counting decision-boundary pieces depends on those incidences.
//!
//! All constructions are exact. Ambient dimensions 2 and 3 (inputs of
//! dimension 1 and 2) are supported; degenerate affine ranks (single point,
//! segment, planar set, vertical flats) are handled explicitly.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::dual::{DualPoint, PointSet};
use crate::geometry::hull3;
use crate::geometry::predicates::{cmp_coord, orient2_axes, orient3, HPoint, IPlane};
use crate::geometry::scalar::Scalar;

/// A single cell of the upper-hull complex.
#[derive(Clone, Debug)]
pub struct HullCell {
    /// Intrinsic dimension of the cell (0 = vertex, 1 = edge, 2 = facet).
    pub dim: usize,
    /// Corner points of the cell, as indices into [`HullComplex::points`].
    /// Facet corners are listed in cyclic boundary order.
    pub vertices: Vec<usize>,
    /// Every input point lying on the closed cell, sorted.
    pub incident_points: Vec<usize>,
    /// Adjacent cells one dimension down.
    pub faces: Vec<usize>,
    /// Adjacent cells one dimension up.
    pub cofaces: Vec<usize>,
}

/// The full face lattice of an upper hull.
#[derive(Clone, Debug)]
pub struct HullComplex {
    /// Deduplicated input points in canonical order.
    pub points: Vec<DualPoint>,
    /// All cells, vertices first, then edges, then facets.
    pub cells: Vec<HullCell>,
    /// Minimal cell each input point lies on; `None` means strictly below
    /// the upper hull.
    pub point_cell: Vec<Option<usize>>,
}

impl HullComplex {
    pub fn cells_of_dim(&self, dim: usize) -> impl Iterator<Item = (usize, &HullCell)> {
        self.cells
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.dim == dim)
    }

    /// Point indices of the hull vertices (0-cells), sorted.
    pub fn vertex_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .cells_of_dim(0)
            .map(|(_, c)| c.vertices[0])
            .collect();
        v.sort_unstable();
        v
    }

    /// The vertex set `U*(S)` as a point set.
    pub fn vertex_points(&self) -> PointSet {
        PointSet::new(
            self.vertex_indices()
                .into_iter()
                .map(|i| self.points[i].clone())
                .collect(),
        )
        .expect("hull vertices share the ambient dimension")
    }

    /// For each hull vertex (by point index), the point indices of vertices
    /// adjacent through hull edges. This is the wall structure of the argmax
    /// tessellation cell of that vertex.
    pub fn vertex_neighbors(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (_, c) in self.cells_of_dim(0) {
            out.entry(c.vertices[0]).or_default();
        }
        for (_, c) in self.cells_of_dim(1) {
            let (a, b) = (c.vertices[0], c.vertices[1]);
            out.get_mut(&a).unwrap().push(b);
            out.get_mut(&b).unwrap().push(a);
        }
        for nbrs in out.values_mut() {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        out
    }

    fn check_lattice(&self) {
        for (i, c) in self.cells.iter().enumerate() {
            for &f in &c.faces {
                debug_assert_eq!(self.cells[f].dim + 1, c.dim);
                debug_assert!(self.cells[f].cofaces.contains(&i));
            }
        }
    }
}

/// Computes the full upper-hull complex of a nonempty point set.
pub fn upper_hull(set: &PointSet) -> Result<HullComplex> {
    if set.is_empty() {
        return Err(Error::EmptyPointSet("upper_hull"));
    }
    let ambient = set.dim().unwrap();
    let points: Vec<DualPoint> = set.points().to_vec();
    let complex = match ambient {
        2 => build_ambient2(points),
        3 => build_ambient3(points)?,
        d => return Err(Error::UnsupportedDimension(d.saturating_sub(1))),
    };
    complex.check_lattice();
    Ok(complex)
}

/// The minimal subset of `S` with the same max-function: vertices of `U(S)`.
pub fn upper_hull_vertices(set: &PointSet) -> Result<PointSet> {
    Ok(upper_hull(set)?.vertex_points())
}

// ---------------------------------------------------------------------------
// Shared assembly helpers
// ---------------------------------------------------------------------------

pub(crate) struct ComplexBuilder {
    points: Vec<DualPoint>,
    cells: Vec<HullCell>,
    point_cell: Vec<Option<usize>>,
}

impl ComplexBuilder {
    pub(crate) fn new(points: Vec<DualPoint>) -> Self {
        let n = points.len();
        ComplexBuilder {
            points,
            cells: Vec::new(),
            point_cell: vec![None; n],
        }
    }

    pub(crate) fn add_cell(&mut self, dim: usize, vertices: Vec<usize>) -> usize {
        self.cells.push(HullCell {
            dim,
            vertices,
            incident_points: Vec::new(),
            faces: Vec::new(),
            cofaces: Vec::new(),
        });
        self.cells.len() - 1
    }

    pub(crate) fn set_minimal(&mut self, point: usize, cell: usize) {
        debug_assert!(self.point_cell[point].is_none());
        self.point_cell[point] = Some(cell);
    }

    pub(crate) fn link(&mut self, face: usize, coface: usize) {
        debug_assert_eq!(self.cells[face].dim + 1, self.cells[coface].dim);
        self.cells[face].cofaces.push(coface);
        self.cells[coface].faces.push(face);
    }

    /// Fills `incident_points` from the minimal-cell assignment: each point
    /// lies on its minimal cell and on every coface transitively above it.
    pub(crate) fn finish(mut self) -> HullComplex {
        for p in 0..self.points.len() {
            if let Some(cell) = self.point_cell[p] {
                // walk up the lattice from the minimal cell
                let mut stack = vec![cell];
                let mut seen = vec![false; self.cells.len()];
                while let Some(c) = stack.pop() {
                    if seen[c] {
                        continue;
                    }
                    seen[c] = true;
                    self.cells[c].incident_points.push(p);
                    stack.extend(self.cells[c].cofaces.iter().copied());
                }
            }
        }
        for c in &mut self.cells {
            c.incident_points.sort_unstable();
            c.incident_points.dedup();
            c.faces.sort_unstable();
            c.faces.dedup();
            c.cofaces.sort_unstable();
            c.cofaces.dedup();
        }
        HullComplex {
            points: self.points,
            cells: self.cells,
            point_cell: self.point_cell,
        }
    }
}

// ---------------------------------------------------------------------------
// Ambient dimension 2 (inputs on the line)
// ---------------------------------------------------------------------------

/// Result of an upper-chain computation over abstract planar coordinates.
pub(crate) struct Chain2 {
    /// Chain vertex indices, ordered by increasing abscissa.
    pub verts: Vec<usize>,
    /// For each chain edge `(verts[i], verts[i+1])`, the indices lying in
    /// the open segment.
    pub on_edge: Vec<Vec<usize>>,
}

/// Upper chain of points `(x_i, y_i)` given exact comparator callbacks:
/// `cmp(i, j, axis)` compares coordinates, `turn(a, b, c)` is the sign of
/// the cross product `(b - a) × (c - a)`.
pub(crate) fn upper_chain(
    n: usize,
    cmp: &dyn Fn(usize, usize, usize) -> std::cmp::Ordering,
    turn: &dyn Fn(usize, usize, usize) -> i8,
) -> Chain2 {
    use std::cmp::Ordering;
    debug_assert!(n > 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp(a, b, 0).then_with(|| cmp(a, b, 1)));

    // one representative (max y) per distinct x; shadowed points are
    // strictly below the hull and need no further bookkeeping
    let mut reps: Vec<usize> = Vec::new();
    for &i in &order {
        match reps.last() {
            Some(&r) if cmp(r, i, 0) == Ordering::Equal => {
                *reps.last_mut().unwrap() = i; // ascending y within equal x
            }
            _ => reps.push(i),
        }
    }
    if reps.len() == 1 {
        return Chain2 {
            verts: reps,
            on_edge: vec![],
        };
    }

    let mut chain: Vec<usize> = Vec::new();
    for &i in &reps {
        while chain.len() >= 2 && turn(chain[chain.len() - 2], chain[chain.len() - 1], i) >= 0 {
            chain.pop();
        }
        chain.push(i);
    }

    // every non-chain representative has an abscissa strictly between two
    // consecutive chain vertices; walk both sorted sequences together
    let mut on_edge = vec![Vec::new(); chain.len() - 1];
    let mut edge = 0usize;
    for &i in &reps {
        if chain[edge] == i {
            continue;
        }
        while edge + 1 < chain.len() && chain[edge + 1] == i {
            edge += 1;
        }
        if chain[edge] == i {
            continue;
        }
        debug_assert!(cmp(chain[edge], i, 0) == Ordering::Less);
        debug_assert!(cmp(i, chain[edge + 1], 0) == Ordering::Less);
        let t = turn(chain[edge], chain[edge + 1], i);
        debug_assert!(t <= 0, "representative above the upper chain");
        if t == 0 {
            on_edge[edge].push(i);
        }
    }
    Chain2 {
        verts: chain,
        on_edge,
    }
}

fn chain_to_complex(points: Vec<DualPoint>, chain: Chain2) -> HullComplex {
    let mut b = ComplexBuilder::new(points);
    let vcells: Vec<usize> = chain
        .verts
        .iter()
        .map(|&i| {
            let c = b.add_cell(0, vec![i]);
            b.set_minimal(i, c);
            c
        })
        .collect();
    for w in 0..chain.verts.len().saturating_sub(1) {
        let e = b.add_cell(1, vec![chain.verts[w], chain.verts[w + 1]]);
        b.link(vcells[w], e);
        b.link(vcells[w + 1], e);
        for &p in &chain.on_edge[w] {
            b.set_minimal(p, e);
        }
    }
    b.finish()
}

fn build_ambient2(points: Vec<DualPoint>) -> HullComplex {
    let hp: Vec<HPoint> = points.iter().map(HPoint::from_dual).collect();
    let chain = upper_chain(
        points.len(),
        &|a, b, ax| cmp_coord(&hp[a], &hp[b], ax),
        &|a, b, c| orient2_axes(&hp[a], &hp[b], &hp[c], 0, 1),
    );
    chain_to_complex(points, chain)
}

// ---------------------------------------------------------------------------
// Ambient dimension 3 (planar inputs)
// ---------------------------------------------------------------------------

fn build_ambient3(points: Vec<DualPoint>) -> Result<HullComplex> {
    let hp: Vec<HPoint> = points.iter().map(HPoint::from_dual).collect();
    let n = points.len();
    if n == 1 {
        let mut b = ComplexBuilder::new(points);
        let c = b.add_cell(0, vec![0]);
        b.set_minimal(0, c);
        return Ok(b.finish());
    }

    // affine rank probing: points are deduplicated, so hp[1] != hp[0]
    let collinear = |a: usize, bb: usize, c: usize| -> bool {
        orient2_axes(&hp[a], &hp[bb], &hp[c], 0, 1) == 0
            && orient2_axes(&hp[a], &hp[bb], &hp[c], 0, 2) == 0
            && orient2_axes(&hp[a], &hp[bb], &hp[c], 1, 2) == 0
    };
    let p2 = (2..n).find(|&i| !collinear(0, 1, i));
    let Some(p2) = p2 else {
        return Ok(build_rank1(points, &hp));
    };
    let p3 = (2..n).find(|&i| orient3(&hp[0], &hp[1], &hp[p2], &hp[i]) != 0);
    let Some(p3) = p3 else {
        return Ok(build_rank2(points, &hp, p2));
    };
    hull3::build_rank3(points, hp, [0, 1, p2, p3])
}

/// All points on one line in ambient 3-space.
fn build_rank1(points: Vec<DualPoint>, hp: &[HPoint]) -> HullComplex {
    let vertical = cmp_coord(&hp[0], &hp[1], 0) == std::cmp::Ordering::Equal
        && cmp_coord(&hp[0], &hp[1], 1) == std::cmp::Ordering::Equal;
    if vertical {
        // only the topmost point is on the upper hull
        let top = (0..points.len())
            .max_by(|&a, &b| cmp_coord(&hp[a], &hp[b], 2))
            .unwrap();
        let mut b = ComplexBuilder::new(points);
        let c = b.add_cell(0, vec![top]);
        b.set_minimal(top, c);
        return b.finish();
    }
    // the whole segment is the upper hull; order along a non-degenerate axis
    let axis = if cmp_coord(&hp[0], &hp[1], 0) != std::cmp::Ordering::Equal {
        0
    } else {
        1
    };
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| cmp_coord(&hp[a], &hp[b], axis));
    let (first, last) = (order[0], *order.last().unwrap());
    let mut b = ComplexBuilder::new(points);
    let c0 = b.add_cell(0, vec![first]);
    b.set_minimal(first, c0);
    let c1 = b.add_cell(0, vec![last]);
    b.set_minimal(last, c1);
    let e = b.add_cell(1, vec![first, last]);
    b.link(c0, e);
    b.link(c1, e);
    for &p in &order[1..order.len() - 1] {
        b.set_minimal(p, e);
    }
    b.finish()
}

/// All points on one plane in ambient 3-space. For a non-vertical plane the
/// whole polygon is the upper hull; for a vertical plane only its upper
/// chain is.
fn build_rank2(points: Vec<DualPoint>, hp: &[HPoint], p2: usize) -> HullComplex {
    let plane = IPlane::through(&hp[0], &hp[1], &hp[p2]);
    if plane.n[2].is_zero() {
        // vertical plane: parametrize by an in-plane horizontal coordinate
        // s = -n1·x + n0·y and the height z; take the upper chain.
        let coords: Vec<[Scalar; 2]> = points
            .iter()
            .map(|p| {
                let n0 = Scalar::from_integer(plane.n[0].clone());
                let n1 = Scalar::from_integer(plane.n[1].clone());
                let s = -&n1 * &p.coords()[0] + &n0 * &p.coords()[1];
                [s, p.coords()[2].clone()]
            })
            .collect();
        let proj: Vec<HPoint> = coords
            .iter()
            .map(|c| HPoint::from_dual(&DualPoint::new(c.to_vec())))
            .collect();
        let chain = upper_chain(
            points.len(),
            &|a, b, ax| cmp_coord(&proj[a], &proj[b], ax),
            &|a, b, c| orient2_axes(&proj[a], &proj[b], &proj[c], 0, 1),
        );
        return chain_to_complex(points, chain);
    }

    // non-vertical plane: inject onto (x, y) and build the full polygon
    let polygon = convex_polygon_2d(hp, &(0..points.len()).collect::<Vec<_>>(), 0, 1);
    let mut b = ComplexBuilder::new(points);
    polygon_cells(&mut b, &polygon);
    b.finish()
}

/// An exactly computed convex polygon over projected coordinates.
pub(crate) struct Polygon2 {
    /// Strict corners in counterclockwise cyclic order.
    pub corners: Vec<usize>,
    /// Points on the open boundary segment following `corners[i]`.
    pub on_edge: Vec<Vec<usize>>,
    /// Points strictly inside.
    pub interior: Vec<usize>,
    /// Non-extreme duplicates are impossible (inputs deduplicated), but a
    /// degenerate polygon (all collinear) is reported through `flat`.
    pub flat: bool,
}

/// Full 2D convex hull of `subset`, using axes `(ax0, ax1)` of homogeneous
/// points. Corners are strict; collinear boundary points are classified
/// onto their edges.
pub(crate) fn convex_polygon_2d(
    hp: &[HPoint],
    subset: &[usize],
    ax0: usize,
    ax1: usize,
) -> Polygon2 {
    use std::cmp::Ordering;
    let cmp = |a: usize, b: usize| {
        cmp_coord(&hp[a], &hp[b], ax0).then_with(|| cmp_coord(&hp[a], &hp[b], ax1))
    };
    let turn = |a: usize, b: usize, c: usize| orient2_axes(&hp[a], &hp[b], &hp[c], ax0, ax1);

    let mut order: Vec<usize> = subset.to_vec();
    order.sort_by(|&a, &b| cmp(a, b));

    let first = order[0];
    let last = *order.last().unwrap();
    if order.len() == 1 {
        return Polygon2 {
            corners: vec![first],
            on_edge: Vec::new(),
            interior: Vec::new(),
            flat: true,
        };
    }
    if order.iter().all(|&i| turn(first, last, i) == 0) {
        let inner: Vec<usize> = order[1..order.len() - 1].to_vec();
        return Polygon2 {
            corners: vec![first, last],
            on_edge: vec![inner],
            interior: Vec::new(),
            flat: true,
        };
    }

    // Andrew's monotone chains with strict corners (collinear points pop)
    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], i) <= 0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], i) <= 0 {
            upper.pop();
        }
        upper.push(i);
    }

    // cyclic corner list, counterclockwise
    let mut corners = lower.clone();
    corners.extend(upper[1..upper.len() - 1].iter().copied());
    let k = corners.len();

    let mut on_edge = vec![Vec::new(); k];
    let mut interior = Vec::new();
    let corner_set: std::collections::HashSet<usize> = corners.iter().copied().collect();
    for &i in &order {
        if corner_set.contains(&i) {
            continue;
        }
        let mut placed = false;
        for e in 0..k {
            let (a, b) = (corners[e], corners[(e + 1) % k]);
            if turn(a, b, i) == 0 && between(a, b, i, &cmp) {
                on_edge[e].push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            debug_assert!(
                (0..k).all(|e| turn(corners[e], corners[(e + 1) % k], i) > 0),
                "non-corner point neither on an edge nor strictly inside"
            );
            interior.push(i);
        }
    }
    let _ = Ordering::Equal;
    Polygon2 {
        corners,
        on_edge,
        interior,
        flat: false,
    }
}

impl Polygon2 {
    /// Points on the open edge after corner `e`, when tracked.
    pub(crate) fn edge_points(&self, e: usize) -> &[usize] {
        self.on_edge.get(e).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Strict lexicographic betweenness of `i` on the segment `(a, b)`; valid
/// for collinear points since lexicographic order is monotone along a line.
fn between(a: usize, b: usize, i: usize, cmp: &dyn Fn(usize, usize) -> std::cmp::Ordering) -> bool {
    use std::cmp::Ordering;
    let (lo, hi) = if cmp(a, b) == Ordering::Less { (a, b) } else { (b, a) };
    cmp(lo, i) == Ordering::Less && cmp(i, hi) == Ordering::Less
}

/// Emits the cells of a single polygon facet into the builder.
fn polygon_cells(b: &mut ComplexBuilder, poly: &Polygon2) {
    if poly.corners.len() == 1 {
        let c = b.add_cell(0, vec![poly.corners[0]]);
        b.set_minimal(poly.corners[0], c);
        return;
    }
    if poly.flat {
        let c0 = b.add_cell(0, vec![poly.corners[0]]);
        b.set_minimal(poly.corners[0], c0);
        let c1 = b.add_cell(0, vec![poly.corners[1]]);
        b.set_minimal(poly.corners[1], c1);
        let e = b.add_cell(1, vec![poly.corners[0], poly.corners[1]]);
        b.link(c0, e);
        b.link(c1, e);
        for &p in poly.edge_points(0) {
            b.set_minimal(p, e);
        }
        return;
    }
    let k = poly.corners.len();
    let vcells: Vec<usize> = poly
        .corners
        .iter()
        .map(|&i| {
            let c = b.add_cell(0, vec![i]);
            b.set_minimal(i, c);
            c
        })
        .collect();
    let facet = b.add_cell(2, poly.corners.clone());
    for e in 0..k {
        let edge = b.add_cell(1, vec![poly.corners[e], poly.corners[(e + 1) % k]]);
        b.link(vcells[e], edge);
        b.link(vcells[(e + 1) % k], edge);
        b.link(edge, facet);
        for &p in &poly.on_edge[e] {
            b.set_minimal(p, edge);
        }
    }
    for &p in &poly.interior {
        b.set_minimal(p, facet);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dual::{eval_max, PointSet};
    use crate::geometry::scalar::scalar_ratio;

    fn pt(coords: &[(i64, i64)]) -> DualPoint {
        DualPoint::new(coords.iter().map(|&(n, d)| scalar_ratio(n, d)).collect())
    }

    fn set(rows: &[&[(i64, i64)]]) -> PointSet {
        PointSet::new(rows.iter().map(|r| pt(r)).collect()).unwrap()
    }

    #[test]
    fn five_function_example_reduces_to_three() {
        // max{-x+3, -x/2+2, x/2, x-2, 0}: (-1/2, 2) lies on an edge of the
        // hull, (0, 0) strictly below it.
        let s = set(&[
            &[(-1, 1), (3, 1)],
            &[(-1, 2), (2, 1)],
            &[(1, 2), (0, 1)],
            &[(1, 1), (-2, 1)],
            &[(0, 1), (0, 1)],
        ]);
        let hull = upper_hull(&s).unwrap();
        let verts = hull.vertex_points();
        let expect = set(&[&[(-1, 1), (3, 1)], &[(1, 2), (0, 1)], &[(1, 1), (-2, 1)]]);
        assert_eq!(verts, expect);

        // (-1/2, 2) on an edge; (0,0) strictly below
        let on_edge = s.points().iter().position(|p| p == &pt(&[(-1, 2), (2, 1)])).unwrap();
        let below = s.points().iter().position(|p| p == &pt(&[(0, 1), (0, 1)])).unwrap();
        let on_cell = hull.point_cell[on_edge].expect("on the hull");
        assert_eq!(hull.cells[on_cell].dim, 1);
        assert!(hull.point_cell[below].is_none());

        // reduced max is identical everywhere
        for k in -30..30i64 {
            let x = [scalar_ratio(k, 7)];
            assert_eq!(eval_max(&s, &x).unwrap(), eval_max(&verts, &x).unwrap());
        }
    }

    #[test]
    fn single_point_and_vertical_flat() {
        let s = set(&[&[(2, 1), (5, 1)]]);
        let hull = upper_hull(&s).unwrap();
        assert_eq!(hull.cells.len(), 1);
        assert_eq!(hull.cells[0].dim, 0);

        // same slope, different intercepts: only the top survives
        let s = set(&[&[(1, 1), (0, 1)], &[(1, 1), (3, 1)], &[(1, 1), (-2, 1)]]);
        let hull = upper_hull(&s).unwrap();
        let verts = hull.vertex_points();
        assert_eq!(verts, set(&[&[(1, 1), (3, 1)]]));
        assert!(upper_hull(&PointSet::new(vec![]).unwrap()).is_err());
    }

    #[test]
    fn collinear_points_stay_on_the_edge() {
        let s = set(&[&[(0, 1), (0, 1)], &[(1, 1), (1, 1)], &[(2, 1), (2, 1)], &[(1, 1), (0, 1)]]);
        let hull = upper_hull(&s).unwrap();
        assert_eq!(hull.vertex_indices().len(), 2);
        let edges: Vec<_> = hull.cells_of_dim(1).collect();
        assert_eq!(edges.len(), 1);
        // (1,1) sits on the single edge; (1,0) is below
        assert_eq!(edges[0].1.incident_points.len(), 3);
    }

    #[test]
    fn planar_example_from_counts_section() {
        // P ∪ N of the two-dimensional worked example: 5 vertices, 8 edges,
        // 4 facets; (0,0,0) strictly below the hull.
        let s = set(&[
            &[(-1, 1), (1, 1), (4, 1)],
            &[(1, 1), (1, 1), (-2, 1)],
            &[(-2, 1), (-1, 1), (-1, 1)],
            &[(0, 1), (0, 1), (0, 1)],
            &[(2, 1), (-1, 1), (2, 1)],
            &[(-1, 1), (2, 1), (2, 1)],
        ]);
        let hull = upper_hull(&s).unwrap();
        assert_eq!(hull.cells_of_dim(0).count(), 5);
        assert_eq!(hull.cells_of_dim(1).count(), 8);
        assert_eq!(hull.cells_of_dim(2).count(), 4);
        let below = s.points().iter().position(|p| p == &pt(&[(0, 1), (0, 1), (0, 1)])).unwrap();
        assert!(hull.point_cell[below].is_none());
    }

    #[test]
    fn rank_deficient_sets_in_ambient_three() {
        // vertical line: only the top point remains
        let s = set(&[&[(0, 1), (0, 1), (0, 1)], &[(0, 1), (0, 1), (1, 1)], &[(0, 1), (0, 1), (-1, 1)]]);
        let hull = upper_hull(&s).unwrap();
        assert_eq!(hull.vertex_points(), set(&[&[(0, 1), (0, 1), (1, 1)]]));

        // slanted segment: both ends are vertices, middle on the edge
        let s = set(&[&[(0, 1), (0, 1), (0, 1)], &[(2, 1), (2, 1), (2, 1)], &[(1, 1), (1, 1), (1, 1)]]);
        let hull = upper_hull(&s).unwrap();
        assert_eq!(hull.cells_of_dim(0).count(), 2);
        assert_eq!(hull.cells_of_dim(1).count(), 1);

        // non-vertical plane: full square polygon with interior and edge points
        let s = set(&[
            &[(0, 1), (0, 1), (0, 1)],
            &[(1, 1), (0, 1), (0, 1)],
            &[(0, 1), (1, 1), (0, 1)],
            &[(1, 1), (1, 1), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 2), (0, 1), (0, 1)],
        ]);
        let hull = upper_hull(&s).unwrap();
        assert_eq!(hull.cells_of_dim(0).count(), 4);
        assert_eq!(hull.cells_of_dim(1).count(), 4);
        assert_eq!(hull.cells_of_dim(2).count(), 1);
        let interior = s.points().iter().position(|p| p == &pt(&[(1, 2), (1, 2), (0, 1)])).unwrap();
        let mid = s.points().iter().position(|p| p == &pt(&[(1, 2), (0, 1), (0, 1)])).unwrap();
        assert_eq!(hull.cells[hull.point_cell[interior].unwrap()].dim, 2);
        assert_eq!(hull.cells[hull.point_cell[mid].unwrap()].dim, 1);

        // vertical plane: upper chain only
        let s = set(&[&[(0, 1), (0, 1), (0, 1)], &[(1, 1), (0, 1), (1, 1)], &[(1, 1), (0, 1), (0, 1)]]);
        let hull = upper_hull(&s).unwrap();
        assert_eq!(hull.cells_of_dim(0).count(), 2);
        assert_eq!(hull.cells_of_dim(1).count(), 1);
        let low = s.points().iter().position(|p| p == &pt(&[(1, 1), (0, 1), (0, 1)])).unwrap();
        assert!(hull.point_cell[low].is_none());
    }

    #[test]
    fn tetrahedron_with_decorations() {
        // a tetra plus: a point on a facet, a point on an edge, one inside
        let s = set(&[
            &[(0, 1), (0, 1), (0, 1)],
            &[(4, 1), (0, 1), (0, 1)],
            &[(0, 1), (4, 1), (0, 1)],
            &[(1, 1), (1, 1), (4, 1)],
            &[(1, 1), (1, 1), (1, 1)],   // strictly inside
            &[(2, 1), (0, 1), (0, 1)],   // on base edge, which is not upper
            &[(1, 1), (1, 2), (2, 1)],   // on the upper facet through (0,0,0),(4,0,0),(1,1,4)
        ]);
        let hull = upper_hull(&s).unwrap();
        // apex and three base corners are vertices; the base triangle itself
        // is the lower hull, so the upper complex has 3 facets
        assert_eq!(hull.cells_of_dim(0).count(), 4);
        assert_eq!(hull.cells_of_dim(2).count(), 3);
        let inside = s.points().iter().position(|p| p == &pt(&[(1, 1), (1, 1), (1, 1)])).unwrap();
        assert!(hull.point_cell[inside].is_none());
        let on_facet = s.points().iter().position(|p| p == &pt(&[(1, 1), (1, 2), (2, 1)])).unwrap();
        assert_eq!(hull.cells[hull.point_cell[on_facet].unwrap()].dim, 2);
        // the base-edge point lies on a lower edge: on U it belongs to the
        // silhouette edge shared with an upper facet
        let on_base = s.points().iter().position(|p| p == &pt(&[(2, 1), (0, 1), (0, 1)])).unwrap();
        assert_eq!(hull.cells[hull.point_cell[on_base].unwrap()].dim, 1);
    }

    #[test]
    fn reduction_preserves_the_max_function() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let n = rng.gen_range(1..14);
            let pts: Vec<DualPoint> = (0..n)
                .map(|_| {
                    DualPoint::new(
                        (0..3)
                            .map(|_| scalar_ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
                            .collect(),
                    )
                })
                .collect();
            let s = PointSet::new(pts).unwrap();
            let verts = upper_hull_vertices(&s).unwrap();
            assert!(verts.len() <= s.len());
            for _ in 0..25 {
                let x = [
                    scalar_ratio(rng.gen_range(-40..=40), rng.gen_range(1..=7)),
                    scalar_ratio(rng.gen_range(-40..=40), rng.gen_range(1..=7)),
                ];
                assert_eq!(eval_max(&s, &x).unwrap(), eval_max(&verts, &x).unwrap());
            }
        }
    }

    #[test]
    fn simplex_keeps_all_points() {
        let s = set(&[&[(0, 1), (0, 1), (0, 1)], &[(1, 1), (0, 1), (2, 1)], &[(0, 1), (1, 1), (5, 1)]]);
        let verts = upper_hull_vertices(&s).unwrap();
        assert_eq!(verts, s);
    }
}
