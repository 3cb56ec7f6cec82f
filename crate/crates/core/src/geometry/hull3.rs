//! Exact 3D upper-hull construction.
//!
//! QuickHull over exact predicates produces a triangulation of the full
//! convex hull; upward-facing triangles are then merged by supporting plane
//! into polygon facets, and every input point is located exactly on the
//! resulting complex (vertex, edge, facet interior, or strictly below).
//!
//! Strict visibility keeps the construction sound in degenerate inputs:
//! a point is only ever carried in a conflict set while strictly outside
//! some triangle, and the apex of an insertion is never coplanar with its
//! horizon ridges, so cone triangles are never degenerate.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::Result;
use crate::geometry::dual::DualPoint;
use crate::geometry::hull::{convex_polygon_2d, ComplexBuilder, HullComplex, Polygon2};
use crate::geometry::predicates::{cmp_coord, orient2_axes, HPoint, IPlane};
use crate::geometry::scalar::Scalar;

struct Tri {
    v: [usize; 3],
    plane: IPlane,
    nbr: [usize; 3],
    outside: Vec<usize>,
    alive: bool,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

struct QuickHull<'a> {
    pts: &'a [HPoint],
    interior: HPoint,
    tris: Vec<Tri>,
}

impl<'a> QuickHull<'a> {
    fn oriented_plane(&self, a: usize, b: usize, c: usize) -> IPlane {
        let plane = IPlane::through(&self.pts[a], &self.pts[b], &self.pts[c]);
        assert!(
            plane.n.iter().any(|x| x != &BigInt::from(0u8)),
            "degenerate hull triangle"
        );
        match plane.eval_sign(&self.interior) {
            -1 => plane,
            1 => plane.flipped(),
            _ => panic!("interior reference point on a hull plane"),
        }
    }

    fn add_tri(&mut self, a: usize, b: usize, c: usize) -> usize {
        let plane = self.oriented_plane(a, b, c);
        self.tris.push(Tri {
            v: [a, b, c],
            plane,
            nbr: [usize::MAX; 3],
            outside: Vec::new(),
            alive: true,
        });
        self.tris.len() - 1
    }

    fn wire(&mut self, ids: &[usize]) {
        let mut edges: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for &t in ids {
            for s in 0..3 {
                let k = edge_key(self.tris[t].v[s], self.tris[t].v[(s + 1) % 3]);
                if let Some(&(ot, os)) = edges.get(&k) {
                    self.tris[t].nbr[s] = ot;
                    self.tris[ot].nbr[os] = t;
                } else {
                    edges.insert(k, (t, s));
                }
            }
        }
    }

    fn run(&mut self, init: [usize; 4]) {
        let [a, b, c, d] = init;
        let t0 = self.add_tri(a, b, c);
        let t1 = self.add_tri(a, b, d);
        let t2 = self.add_tri(a, c, d);
        let t3 = self.add_tri(b, c, d);
        self.wire(&[t0, t1, t2, t3]);

        for p in 0..self.pts.len() {
            if init.contains(&p) {
                continue;
            }
            for t in 0..4 {
                if self.tris[t].plane.eval_sign(&self.pts[p]) > 0 {
                    self.tris[t].outside.push(p);
                    break;
                }
            }
        }

        let mut queue: Vec<usize> = (0..4).collect();
        while let Some(t) = queue.pop() {
            if !self.tris[t].alive || self.tris[t].outside.is_empty() {
                continue;
            }
            let apex = *self.tris[t]
                .outside
                .iter()
                .max_by(|&&x, &&y| self.tris[t].plane.cmp_eval(&self.pts[x], &self.pts[y]))
                .unwrap();
            let apex_pt = &self.pts[apex];

            // strict visibility over every live triangle
            let mut is_visible = vec![false; self.tris.len()];
            let mut visible: Vec<usize> = Vec::new();
            for (i, tri) in self.tris.iter().enumerate() {
                if tri.alive && tri.plane.eval_sign(apex_pt) > 0 {
                    is_visible[i] = true;
                    visible.push(i);
                }
            }
            debug_assert!(is_visible[t]);

            let mut horizon: Vec<(usize, usize, usize)> = Vec::new(); // (u, w, outer tri)
            for &i in &visible {
                for s in 0..3 {
                    let n = self.tris[i].nbr[s];
                    if !is_visible[n] {
                        horizon.push((self.tris[i].v[s], self.tris[i].v[(s + 1) % 3], n));
                    }
                }
            }

            let mut orphans: Vec<usize> = Vec::new();
            for &i in &visible {
                self.tris[i].alive = false;
                orphans.extend(self.tris[i].outside.drain(..).filter(|&p| p != apex));
            }

            // walk the horizon into a single cycle
            let mut next: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
            for &(u, w, o) in &horizon {
                next.entry(u).or_default().push((w, o));
                next.entry(w).or_default().push((u, o));
            }
            for (v, es) in &next {
                assert!(
                    es.len() == 2,
                    "horizon is not a simple cycle at vertex {v} ({} incidences)",
                    es.len()
                );
            }
            let start = horizon[0].0;
            let mut cycle: Vec<(usize, usize)> = Vec::new(); // (vertex, outer tri of edge to next)
            let mut prev = usize::MAX;
            let mut cur = start;
            loop {
                let es = &next[&cur];
                let &(nxt, outer) = if es[0].0 != prev { &es[0] } else { &es[1] };
                cycle.push((cur, outer));
                prev = cur;
                cur = nxt;
                if cur == start {
                    break;
                }
            }
            assert_eq!(cycle.len(), horizon.len(), "horizon walk missed edges");

            // cone of new triangles around the apex
            let k = cycle.len();
            let mut cone: Vec<usize> = Vec::with_capacity(k);
            for i in 0..k {
                let (u, outer) = cycle[i];
                let (w, _) = cycle[(i + 1) % k];
                let nt = self.add_tri(apex, u, w);
                // outer neighbor across (u, w)
                let os = (0..3)
                    .find(|&s| {
                        edge_key(self.tris[outer].v[s], self.tris[outer].v[(s + 1) % 3])
                            == edge_key(u, w)
                    })
                    .expect("outer triangle lost its horizon edge");
                self.tris[nt].nbr[1] = outer; // edge (u, w) is slot 1 of (apex, u, w)
                self.tris[outer].nbr[os] = nt;
                cone.push(nt);
            }
            for i in 0..k {
                let nt = cone[i];
                let prev_t = cone[(i + k - 1) % k];
                let next_t = cone[(i + 1) % k];
                self.tris[nt].nbr[0] = prev_t; // edge (apex, u)
                self.tris[nt].nbr[2] = next_t; // edge (w, apex)
            }

            // redistribute orphans: try the cone first, then rescan
            for q in orphans {
                let qp = &self.pts[q];
                let mut placed = false;
                for &nt in &cone {
                    if self.tris[nt].plane.eval_sign(qp) > 0 {
                        self.tris[nt].outside.push(q);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    for i in 0..self.tris.len() {
                        if self.tris[i].alive && self.tris[i].plane.eval_sign(qp) > 0 {
                            self.tris[i].outside.push(q);
                            queue.push(i);
                            placed = true;
                            break;
                        }
                    }
                }
                let _ = placed; // unplaced points are inside or on the hull
            }
            for &nt in &cone {
                if !self.tris[nt].outside.is_empty() {
                    queue.push(nt);
                }
            }
        }
    }
}

struct Facet {
    plane: IPlane,
    tri_verts: Vec<usize>,
}

/// f64 bounding-box grid for candidate-facet pruning. Purely an accelerator:
/// a miss falls back to scanning every facet.
struct ShadowGrid {
    x0: f64,
    y0: f64,
    inv_dx: f64,
    inv_dy: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
    all: Vec<u32>,
}

impl ShadowGrid {
    fn build(boxes: &[(f64, f64, f64, f64)]) -> ShadowGrid {
        let finite = boxes.iter().filter(|b| {
            b.0.is_finite() && b.1.is_finite() && b.2.is_finite() && b.3.is_finite()
        });
        let mut x0 = f64::INFINITY;
        let mut y0 = f64::INFINITY;
        let mut x1 = f64::NEG_INFINITY;
        let mut y1 = f64::NEG_INFINITY;
        for b in finite {
            x0 = x0.min(b.0);
            y0 = y0.min(b.1);
            x1 = x1.max(b.2);
            y1 = y1.max(b.3);
        }
        let n = (boxes.len() as f64).sqrt().ceil() as usize + 1;
        let (nx, ny) = (n, n);
        let dx = ((x1 - x0) / nx as f64).max(f64::MIN_POSITIVE);
        let dy = ((y1 - y0) / ny as f64).max(f64::MIN_POSITIVE);
        let mut grid = ShadowGrid {
            x0,
            y0,
            inv_dx: 1.0 / dx,
            inv_dy: 1.0 / dy,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
            all: (0..boxes.len() as u32).collect(),
        };
        for (i, b) in boxes.iter().enumerate() {
            if !(b.0.is_finite() && b.1.is_finite() && b.2.is_finite() && b.3.is_finite()) {
                continue; // non-finite boxes are covered by the full fallback
            }
            let (cx0, cy0) = grid.cell_of(b.0, b.1);
            let (cx1, cy1) = grid.cell_of(b.2, b.3);
            for cx in cx0..=cx1 {
                for cy in cy0..=cy1 {
                    grid.cells[cx * ny + cy].push(i as u32);
                }
            }
        }
        grid
    }

    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let cx = (((x - self.x0) * self.inv_dx) as isize).clamp(0, self.nx as isize - 1) as usize;
        let cy = (((y - self.y0) * self.inv_dy) as isize).clamp(0, self.ny as isize - 1) as usize;
        (cx, cy)
    }

    fn candidates(&self, x: f64, y: f64) -> &[u32] {
        if !(x.is_finite() && y.is_finite()) {
            return &self.all;
        }
        let (cx, cy) = self.cell_of(x, y);
        &self.cells[cx * self.ny + cy]
    }
}

pub(crate) fn build_rank3(
    points: Vec<DualPoint>,
    hp: Vec<HPoint>,
    init: [usize; 4],
) -> Result<HullComplex> {
    // interior reference: centroid of the initial affinely independent points
    let quarter = Scalar::new(1.into(), 4.into());
    let mut centroid = vec![Scalar::from_integer(0.into()); 3];
    for &i in &init {
        for (axis, acc) in centroid.iter_mut().enumerate() {
            *acc += &points[i].coords()[axis] * &quarter;
        }
    }
    let interior = HPoint::from_dual(&DualPoint::new(centroid));

    let mut qh = QuickHull {
        pts: &hp,
        interior,
        tris: Vec::new(),
    };
    qh.run(init);

    // merge coplanar upward triangles into facets
    type PlaneKey = (BigInt, BigInt, BigInt, BigInt);
    let mut facet_of: HashMap<PlaneKey, usize> = HashMap::new();
    let mut facets: Vec<Facet> = Vec::new();
    for t in qh.tris.iter().filter(|t| t.alive && t.plane.is_upper()) {
        let id = *facet_of.entry(t.plane.key()).or_insert_with(|| {
            facets.push(Facet {
                plane: t.plane.clone(),
                tri_verts: Vec::new(),
            });
            facets.len() - 1
        });
        facets[id].tri_verts.extend(t.v);
    }
    assert!(!facets.is_empty(), "full-dimensional hull has an upper facet");
    for f in &mut facets {
        f.tri_verts.sort_unstable();
        f.tri_verts.dedup();
    }

    // strict corner polygons, counterclockwise in the (x, y) shadow
    let polygons: Vec<Polygon2> = facets
        .iter()
        .map(|f| convex_polygon_2d(&hp, &f.tri_verts, 0, 1))
        .collect();

    let mut b = ComplexBuilder::new(points);

    // 0-cells
    let mut vcell: HashMap<usize, usize> = HashMap::new();
    for poly in &polygons {
        for &c in &poly.corners {
            vcell.entry(c).or_insert(usize::MAX);
        }
    }
    let mut corner_ids: Vec<usize> = vcell.keys().copied().collect();
    corner_ids.sort_unstable();
    for &c in &corner_ids {
        let cell = b.add_cell(0, vec![c]);
        b.set_minimal(c, cell);
        vcell.insert(c, cell);
    }

    // 1-cells shared across facets
    let mut ecell: HashMap<(usize, usize), usize> = HashMap::new();
    for poly in &polygons {
        let k = poly.corners.len();
        for e in 0..k {
            let key = edge_key(poly.corners[e], poly.corners[(e + 1) % k]);
            ecell.entry(key).or_insert_with(|| {
                let cell = b.add_cell(1, vec![key.0, key.1]);
                b.link(vcell[&key.0], cell);
                b.link(vcell[&key.1], cell);
                cell
            });
        }
    }

    // 2-cells
    let mut fcell: Vec<usize> = Vec::with_capacity(polygons.len());
    for poly in &polygons {
        let k = poly.corners.len();
        let cell = b.add_cell(2, poly.corners.clone());
        for e in 0..k {
            let key = edge_key(poly.corners[e], poly.corners[(e + 1) % k]);
            b.link(ecell[&key], cell);
        }
        fcell.push(cell);
    }

    // points that survive as strict corners are done; locate the rest
    type BBox = (f64, f64, f64, f64);
    let shadow_boxes: Vec<BBox> = polygons
        .iter()
        .map(|poly| {
            let mut bx = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &c in &poly.corners {
                let (x, y) = (hp[c].approx[0], hp[c].approx[1]);
                bx.0 = bx.0.min(x);
                bx.1 = bx.1.min(y);
                bx.2 = bx.2.max(x);
                bx.3 = bx.3.max(y);
            }
            let pad_x = 1e-9 + 1e-9 * (bx.2.abs().max(bx.0.abs()));
            let pad_y = 1e-9 + 1e-9 * (bx.3.abs().max(bx.1.abs()));
            (bx.0 - pad_x, bx.1 - pad_y, bx.2 + pad_x, bx.3 + pad_y)
        })
        .collect();
    let grid = ShadowGrid::build(&shadow_boxes);

    let n = hp.len();
    for p in 0..n {
        if vcell.contains_key(&p) {
            continue;
        }
        let mut resolved = locate_point(p, &hp, &facets, &polygons, grid.candidates(hp[p].approx[0], hp[p].approx[1]));
        if resolved.is_none() {
            // grid miss or boundary case: scan everything before concluding
            resolved = locate_point(p, &hp, &facets, &polygons, &grid.all);
        }
        match resolved {
            Some(Location::Interior(f)) => b.set_minimal(p, fcell[f]),
            Some(Location::OnEdge(a, bb)) => b.set_minimal(p, ecell[&edge_key(a, bb)]),
            Some(Location::Below) | None => {}
        }
    }

    Ok(b.finish())
}

enum Location {
    Interior(usize),
    OnEdge(usize, usize),
    Below,
}

fn locate_point(
    p: usize,
    hp: &[HPoint],
    facets: &[Facet],
    polygons: &[Polygon2],
    candidates: &[u32],
) -> Option<Location> {
    for &fi in candidates {
        let fi = fi as usize;
        let poly = &polygons[fi];
        let k = poly.corners.len();
        let mut on_boundary: Option<(usize, usize)> = None;
        let mut inside = true;
        for e in 0..k {
            let (a, bb) = (poly.corners[e], poly.corners[(e + 1) % k]);
            match orient2_axes(&hp[a], &hp[bb], &hp[p], 0, 1) {
                -1 => {
                    inside = false;
                    break;
                }
                0 => {
                    let lex = |x: usize, y: usize| {
                        cmp_coord(&hp[x], &hp[y], 0).then_with(|| cmp_coord(&hp[x], &hp[y], 1))
                    };
                    let (lo, hi) = if lex(a, bb) == std::cmp::Ordering::Less {
                        (a, bb)
                    } else {
                        (bb, a)
                    };
                    if lex(lo, p) == std::cmp::Ordering::Less
                        && lex(p, hi) == std::cmp::Ordering::Less
                    {
                        on_boundary = Some((a, bb));
                    } else {
                        // collinear with the edge but outside its span
                        inside = false;
                        break;
                    }
                }
                _ => {}
            }
        }
        if !inside {
            continue;
        }
        let side = facets[fi].plane.eval_sign(&hp[p]);
        assert!(side <= 0, "input point strictly above a hull facet");
        if side == 0 {
            return Some(match on_boundary {
                Some((a, bb)) => Location::OnEdge(a, bb),
                None => Location::Interior(fi),
            });
        }
        if on_boundary.is_none() {
            // strictly below the roof over the interior of this shadow cell
            return Some(Location::Below);
        }
        // below this facet but on its shadow boundary: a neighbor may still
        // contain the point exactly; keep searching
    }
    None
}
