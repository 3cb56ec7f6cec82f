//! Exact piece counting for DCPA functions.
//!
//! For `F − G` with `F = R(P)` and `G = R(N)`:
//!
//! * boundary pieces — the `(d−1)`-dimensional linear pieces of the zero set
//!   `{F = G}` — are the 1-cells of `U(P ∪ N)` whose incident input points
//!   include at least one point of `P` and one of `N`;
//! * the total number of affine pieces is the number of vertices of
//!   `U(P ⊕ N)`.
//!
//! Mixed cells of other dimensions are never silently added to the piece
//! count. A mixed 0-cell is a shared dual point of `P` and `N` and
//! corresponds to a full-dimensional flat region of the zero set. A mixed
//! cell of dimension ≥ 2 corresponds to a zero-set cell of dimension below
//! `d − 1`; those are ordinary endpoints of boundary pieces when one of
//! their edges is mixed, and isolated lower-dimensional zeros — reported as
//! degenerate — when none is.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::dual::{minkowski_sum, DualPoint, PointSet};
use crate::geometry::fan::{minkowski_fan, Fan};
use crate::geometry::hull::{upper_hull, HullComplex};
use crate::geometry::scalar::Scalar;
use crate::tropical::DcpaFunction;

/// Pairwise products up to this size are counted through a direct hull of
/// the Minkowski sum; larger ones walk the fan overlay.
const DIRECT_SUM_CAP: usize = 2048;

/// Boundary-piece count plus degeneracy diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryReport {
    /// Number of `(d−1)`-dimensional linear pieces of the decision boundary.
    pub boundary_piece_count: usize,
    /// Mixed 0-cells: dual points shared by `P` and `N`, i.e. regions where
    /// the function is identically zero.
    pub degenerate_flat_cells: usize,
    /// Isolated mixed cells of dimension ≥ 2: zero-set pieces of dimension
    /// below `d − 1` that bound no one-dimensional piece.
    pub mixed_higher_cells: usize,
}

impl BoundaryReport {
    pub fn is_degenerate(&self) -> bool {
        self.degenerate_flat_cells > 0 || self.mixed_higher_cells > 0
    }
}

/// The extent of one boundary piece on its supporting line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extent2D {
    Segment([Scalar; 2], [Scalar; 2]),
    Ray {
        start: [Scalar; 2],
        direction: [Scalar; 2],
    },
    Line {
        point: [Scalar; 2],
        direction: [Scalar; 2],
    },
}

/// One linear piece of a planar decision boundary: the supporting line
/// `a · x + b = 0` and the exact extent of the piece on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySegment2D {
    pub line_a: [Scalar; 2],
    pub line_b: Scalar,
    pub extent: Extent2D,
}

impl BoundarySegment2D {
    /// A point in the relative interior of the piece.
    pub fn interior_point(&self) -> [Scalar; 2] {
        match &self.extent {
            Extent2D::Segment(p, q) => {
                let half = Scalar::new(1.into(), 2.into());
                [(&p[0] + &q[0]) * &half, (&p[1] + &q[1]) * &half]
            }
            Extent2D::Ray { start, direction } => {
                [&start[0] + &direction[0], &start[1] + &direction[1]]
            }
            Extent2D::Line { point, .. } => point.clone(),
        }
    }
}

/// One affine piece of the function: the hull vertex it corresponds to and
/// the irredundant half-space system `a · x + b ≥ 0` cutting out its cell.
#[derive(Clone, Debug)]
pub struct AffineCell {
    pub vertex: DualPoint,
    pub halfspaces: Vec<(Vec<Scalar>, Scalar)>,
}

fn reduced_parts(f: &DcpaFunction) -> Result<(HullComplex, HullComplex)> {
    if f.p.is_empty() || f.n.is_empty() {
        return Err(Error::EmptyPointSet("count"));
    }
    Ok((upper_hull(&f.p)?, upper_hull(&f.n)?))
}

struct MixedCounts {
    complex: HullComplex,
    in_p: Vec<bool>,
    in_n: Vec<bool>,
    mixed_by_dim: [usize; 3],
    mixed_edges: Vec<usize>,
}

fn mixed_cells(p_red: &PointSet, n_red: &PointSet) -> Result<MixedCounts> {
    let union = crate::geometry::dual::union(p_red, n_red)?;
    let complex = upper_hull(&union)?;
    let in_p: Vec<bool> = complex.points.iter().map(|pt| p_red.contains(pt)).collect();
    let in_n: Vec<bool> = complex.points.iter().map(|pt| n_red.contains(pt)).collect();
    let mixed: Vec<bool> = complex
        .cells
        .iter()
        .map(|cell| {
            cell.incident_points.iter().any(|&i| in_p[i])
                && cell.incident_points.iter().any(|&i| in_n[i])
        })
        .collect();
    let mut mixed_by_dim = [0usize; 3];
    let mut mixed_edges = Vec::new();
    for (id, cell) in complex.cells.iter().enumerate() {
        if !mixed[id] {
            continue;
        }
        match cell.dim {
            0 => mixed_by_dim[0] += 1,
            1 => {
                mixed_by_dim[1] += 1;
                mixed_edges.push(id);
            }
            _ => {
                // a mixed facet bounded by a mixed edge is an ordinary
                // endpoint of that piece; only isolated zeros count
                if !cell.faces.iter().any(|&e| mixed[e]) {
                    mixed_by_dim[2] += 1;
                }
            }
        }
    }
    Ok(MixedCounts {
        complex,
        in_p,
        in_n,
        mixed_by_dim,
        mixed_edges,
    })
}

/// Counts the linear pieces of the decision boundary of `R(P) − R(N)`.
pub fn count_boundary_pieces(f: &DcpaFunction) -> Result<BoundaryReport> {
    let (hull_p, hull_n) = reduced_parts(f)?;
    let m = mixed_cells(&hull_p.vertex_points(), &hull_n.vertex_points())?;
    Ok(BoundaryReport {
        boundary_piece_count: m.mixed_by_dim[1],
        degenerate_flat_cells: m.mixed_by_dim[0],
        mixed_higher_cells: m.mixed_by_dim[2],
    })
}

/// Counts the affine pieces of `R(P) − R(N)`: the vertices of `U(P ⊕ N)`.
pub fn count_affine_pieces(f: &DcpaFunction) -> Result<usize> {
    let (hull_p, hull_n) = reduced_parts(f)?;
    let p_red = hull_p.vertex_points();
    let n_red = hull_n.vertex_points();
    if p_red.len() * n_red.len() <= DIRECT_SUM_CAP || p_red.dim() != Some(3) {
        let sum = minkowski_sum(&p_red, &n_red)?;
        Ok(upper_hull(&sum)?.cells_of_dim(0).count())
    } else {
        let fan = minkowski_fan(&Fan::from_complex(&hull_p), &Fan::from_complex(&hull_n))?;
        Ok(fan.len())
    }
}

/// Extracts the exact geometry of every boundary piece of a planar DCPA.
pub fn boundary_geometry_2d(f: &DcpaFunction) -> Result<Vec<BoundarySegment2D>> {
    if f.input_dim() != 2 {
        return Err(Error::UnsupportedDimension(f.input_dim()));
    }
    let (hull_p, hull_n) = reduced_parts(f)?;
    let m = mixed_cells(&hull_p.vertex_points(), &hull_n.vertex_points())?;
    let nbrs = m.complex.vertex_neighbors();

    let mut out = Vec::with_capacity(m.mixed_edges.len());
    for &edge in &m.mixed_edges {
        let cell = &m.complex.cells[edge];
        let (u, w) = (cell.vertices[0], cell.vertices[1]);
        // supporting line from one P point and one N point on the edge;
        // all choices agree on the 1-dimensional tie cell
        let pp = *cell
            .incident_points
            .iter()
            .find(|&&i| m.in_p[i])
            .expect("mixed edge has a P point");
        let nn = *cell
            .incident_points
            .iter()
            .find(|&&i| m.in_n[i])
            .expect("mixed edge has an N point");
        let (pa, na) = (&m.complex.points[pp], &m.complex.points[nn]);
        let line_a = [
            &pa.linear()[0] - &na.linear()[0],
            &pa.linear()[1] - &na.linear()[1],
        ];
        let line_b = pa.intercept() - na.intercept();
        assert!(
            !(line_a[0].is_zero() && line_a[1].is_zero()),
            "mixed edge between parallel duals cannot tie"
        );

        // tie cell of the hull edge: where R(u) and R(w) are jointly maximal
        let constraints: Vec<([Scalar; 2], Scalar)> = nbrs[&u]
            .iter()
            .map(|&q| (u, q))
            .chain(nbrs[&w].iter().map(|&q| (w, q)))
            .filter(|&(_, q)| q != u && q != w)
            .map(|(base, q)| {
                let (b, t) = (&m.complex.points[base], &m.complex.points[q]);
                (
                    [
                        &b.linear()[0] - &t.linear()[0],
                        &b.linear()[1] - &t.linear()[1],
                    ],
                    b.intercept() - t.intercept(),
                )
            })
            .collect();
        let (ua, wa) = (&m.complex.points[u], &m.complex.points[w]);
        let tie_a = [
            &ua.linear()[0] - &wa.linear()[0],
            &ua.linear()[1] - &wa.linear()[1],
        ];
        let tie_b = ua.intercept() - wa.intercept();
        let extent = line_extent(&tie_a, &tie_b, &constraints)
            .expect("a hull edge always has a one-dimensional tie cell");
        out.push(BoundarySegment2D {
            line_a,
            line_b,
            extent,
        });
    }
    Ok(out)
}

/// Clips the line `a · x + b = 0` against half-planes `c · x + e ≥ 0`,
/// returning the extent when it is one-dimensional.
fn line_extent(
    a: &[Scalar; 2],
    b: &Scalar,
    constraints: &[([Scalar; 2], Scalar)],
) -> Option<Extent2D> {
    let norm2 = &a[0] * &a[0] + &a[1] * &a[1];
    let factor = -(b / &norm2);
    let base = [&a[0] * &factor, &a[1] * &factor];
    let dir = [-a[1].clone(), a[0].clone()];

    let mut lo: Option<Scalar> = None;
    let mut hi: Option<Scalar> = None;
    for (c, e) in constraints {
        let alpha = &c[0] * &base[0] + &c[1] * &base[1] + e;
        let beta = &c[0] * &dir[0] + &c[1] * &dir[1];
        if beta.is_zero() {
            if alpha.is_negative() {
                return None;
            }
            continue;
        }
        let bound = -alpha / &beta;
        if beta.is_positive() {
            if lo.as_ref().is_none_or(|l| bound > *l) {
                lo = Some(bound);
            }
        } else if hi.as_ref().is_none_or(|h| bound < *h) {
            hi = Some(bound);
        }
    }
    let at = |s: &Scalar| [&base[0] + s * &dir[0], &base[1] + s * &dir[1]];
    match (lo, hi) {
        (Some(l), Some(h)) => {
            if l >= h {
                return None;
            }
            Some(Extent2D::Segment(at(&l), at(&h)))
        }
        (Some(l), None) => Some(Extent2D::Ray {
            start: at(&l),
            direction: dir,
        }),
        (None, Some(h)) => Some(Extent2D::Ray {
            start: at(&h),
            direction: [-dir[0].clone(), -dir[1].clone()],
        }),
        (None, None) => Some(Extent2D::Line {
            point: base,
            direction: dir,
        }),
    }
}

/// The affine pieces of the function with their defining half-space
/// systems: piece of vertex `v = (a, b)` is where `v` dominates every other
/// vertex of `U(P ⊕ N)`.
pub fn affine_cell_geometry(f: &DcpaFunction) -> Result<Vec<AffineCell>> {
    let (hull_p, hull_n) = reduced_parts(f)?;
    let p_red = hull_p.vertex_points();
    let n_red = hull_n.vertex_points();
    let fan = if p_red.len() * n_red.len() <= DIRECT_SUM_CAP || p_red.dim() != Some(3) {
        let sum = minkowski_sum(&p_red, &n_red)?;
        Fan::from_complex(&upper_hull(&sum)?)
    } else {
        minkowski_fan(&Fan::from_complex(&hull_p), &Fan::from_complex(&hull_n))?
    };
    Ok((0..fan.len())
        .map(|i| {
            let v = &fan.verts[i];
            let halfspaces = fan.nbrs[i]
                .iter()
                .map(|&q| {
                    let t = &fan.verts[q];
                    let a: Vec<Scalar> = v
                        .linear()
                        .iter()
                        .zip(t.linear())
                        .map(|(x, y)| x - y)
                        .collect();
                    (a, v.intercept() - t.intercept())
                })
                .collect();
            AffineCell {
                vertex: v.clone(),
                halfspaces,
            }
        })
        .collect())
}
