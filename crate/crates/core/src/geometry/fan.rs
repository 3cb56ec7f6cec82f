//! Normal fans of upper hulls and their exact overlay.
//!
//! The argmax cell of a hull vertex `v` in input space is the polyhedron cut
//! out by one half-plane per hull edge at `v`. For two reduced point sets
//! the cells of the Minkowski sum's hull are exactly the pairwise
//! intersections of such cells with nonempty interior, so the vertices of
//! `U(X ⊕ Y)` can be enumerated by walking the overlay of the two fans
//! instead of hulling all `|X|·|Y|` pairwise sums. The walk crosses each
//! polygon edge at an interior point and re-resolves the argmax pair there,
//! which keeps it exact through coinciding walls.
//!
//! Only inputs of dimension 2 (ambient dual dimension 3) need the overlay;
//! smaller products fall back to the direct hull.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::dual::{minkowski_sum, DualPoint, PointSet};
use crate::geometry::hull::{upper_hull, HullComplex};
use crate::geometry::scalar::Scalar;

/// A reduced CPA in fan form: hull vertices plus, for each vertex, the
/// vertices adjacent through hull edges (the walls of its argmax cell).
#[derive(Clone, Debug)]
pub struct Fan {
    pub verts: Vec<DualPoint>,
    pub nbrs: Vec<Vec<usize>>,
}

impl Fan {
    pub fn from_complex(c: &HullComplex) -> Fan {
        let vert_pts = c.vertex_indices();
        let lookup: HashMap<usize, usize> =
            vert_pts.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let nbr_map = c.vertex_neighbors();
        let verts: Vec<DualPoint> = vert_pts.iter().map(|&p| c.points[p].clone()).collect();
        let nbrs = vert_pts
            .iter()
            .map(|p| nbr_map[p].iter().map(|q| lookup[q]).collect())
            .collect();
        Fan { verts, nbrs }
    }

    pub fn from_point_set(set: &PointSet) -> Result<Fan> {
        Ok(Fan::from_complex(&upper_hull(set)?))
    }

    pub fn point_set(&self) -> PointSet {
        PointSet::new(self.verts.clone()).expect("fan vertices share a dimension")
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Minkowski sum with a single point: a translation.
    pub fn translate(&self, v: &DualPoint) -> Fan {
        Fan {
            verts: self.verts.iter().map(|p| p.add(v)).collect(),
            nbrs: self.nbrs.clone(),
        }
    }
}

/// One full-dimensional cell of the fan overlay: the region where vertex
/// `p_idx` of the first fan and `n_idx` of the second are jointly maximal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OverlayCell {
    pub p_idx: usize,
    pub n_idx: usize,
}

pub struct Overlay {
    pub cells: Vec<OverlayCell>,
    /// Pairs of cell indices sharing a wall.
    pub adjacency: Vec<(usize, usize)>,
}

/// A wall constraint `a0·tx + a1·ty + b >= 0` with denominators cleared;
/// half-planes are invariant under positive scaling, so integer
/// coefficients represent them exactly and the walk below never reduces a
/// fraction.
#[derive(Clone, Debug)]
struct IWall {
    a0: BigInt,
    a1: BigInt,
    b: BigInt,
    /// f64 images of the coefficients for the fast filter.
    f: [f64; 3],
    /// Fan this wall belongs to (0 = first, 1 = second) and the vertex on
    /// the far side.
    side: u8,
    to: usize,
}

/// A float with a conservative absolute error bound. All arithmetic widens
/// the bound, so a comparison that resolves under the bound is exact.
#[derive(Clone, Copy, Debug)]
struct Approx {
    v: f64,
    e: f64,
}

const APPROX_EPS: f64 = 8.9e-16; // 4 × 2^-52, covers rounding of each op

impl Approx {
    fn from_bigint(x: &BigInt) -> Approx {
        let v = ratio_f64(x);
        Approx {
            v,
            e: v.abs() * APPROX_EPS,
        }
    }

    fn mul(self, o: Approx) -> Approx {
        let v = self.v * o.v;
        Approx {
            v,
            e: self.v.abs() * o.e + o.v.abs() * self.e + self.e * o.e + v.abs() * APPROX_EPS,
        }
    }

    fn add(self, o: Approx) -> Approx {
        let v = self.v + o.v;
        Approx {
            v,
            e: self.e + o.e + v.abs() * APPROX_EPS,
        }
    }

    fn neg(self) -> Approx {
        Approx { v: -self.v, e: self.e }
    }

    /// Certified sign, or `None` when the bound straddles zero (or any
    /// value is non-finite).
    fn sign(self) -> Option<i8> {
        if !self.v.is_finite() || !self.e.is_finite() {
            return None;
        }
        if self.v > self.e {
            Some(1)
        } else if self.v < -self.e {
            Some(-1)
        } else {
            None
        }
    }
}

fn ratio_f64(x: &BigInt) -> f64 {
    let b = x.bits();
    if b <= 900 {
        x.to_f64().unwrap_or(f64::NAN)
    } else {
        f64::INFINITY * if x.is_negative() { -1.0 } else { 1.0 }
    }
}

/// Homogeneous integer form of a fan: per-vertex affine coefficients with a
/// positive common denominator, and the cached wall list per vertex.
struct IFan {
    // (ax, ay, b, w): the vertex is the affine function (ax·x + ay·y + b)/w
    hverts: Vec<(BigInt, BigInt, BigInt, BigInt)>,
    walls: Vec<Vec<IWall>>,
}

fn clear_denoms(values: &[&Scalar]) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::from(1u8);
    for v in values {
        den = den.lcm(v.denom());
    }
    let nums = values
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    (nums, den)
}

impl IFan {
    fn build(fan: &Fan, side: u8) -> IFan {
        let hverts: Vec<(BigInt, BigInt, BigInt, BigInt)> = fan
            .verts
            .iter()
            .map(|v| {
                let c = v.coords();
                let (nums, den) = clear_denoms(&[&c[0], &c[1], &c[2]]);
                let mut it = nums.into_iter();
                (it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), den)
            })
            .collect();
        let walls = fan
            .nbrs
            .iter()
            .enumerate()
            .map(|(i, nbrs)| {
                nbrs.iter()
                    .map(|&q| {
                        let (fa, fw) = (&hverts[i], &hverts[i].3);
                        let (ta, tw) = (&hverts[q], &hverts[q].3);
                        // (from - to) scaled by the positive product of denominators
                        let mut a0 = &fa.0 * tw - &ta.0 * fw;
                        let mut a1 = &fa.1 * tw - &ta.1 * fw;
                        let mut b = &fa.2 * tw - &ta.2 * fw;
                        let mut g = a0.gcd(&a1).gcd(&b);
                        if g.is_zero() {
                            g = BigInt::from(1u8);
                        }
                        a0 /= &g;
                        a1 /= &g;
                        b /= &g;
                        let f = [ratio_f64(&a0), ratio_f64(&a1), ratio_f64(&b)];
                        IWall { a0, a1, b, f, side, to: q }
                    })
                    .collect()
            })
            .collect();
        IFan { hverts, walls }
    }

    /// Index of the unique argmax at `(tx/td, ty/td)`, or `None` on a tie.
    fn unique_argmax(&self, tx: &BigInt, ty: &BigInt, td: &BigInt) -> Option<usize> {
        let mut best: Option<(BigInt, &BigInt, usize, bool)> = None; // (num, den, idx, unique)
        for (i, (ax, ay, b, w)) in self.hverts.iter().enumerate() {
            let num = ax * tx + ay * ty + b * td;
            best = Some(match best {
                None => (num, w, i, true),
                Some((bn, bw, bi, uniq)) => {
                    // compare num/(w·td) against bn/(bw·td); td > 0 cancels
                    let lhs = &num * bw;
                    let rhs = &bn * w;
                    match lhs.cmp(&rhs) {
                        std::cmp::Ordering::Greater => (num, w, i, true),
                        std::cmp::Ordering::Equal => (bn, bw, bi, false),
                        std::cmp::Ordering::Less => (bn, bw, bi, uniq),
                    }
                }
            });
        }
        match best {
            Some((_, _, i, true)) => Some(i),
            _ => None,
        }
    }
}

/// Exact overlay of two fans over `R^2`. Both fans must be nonempty and in
/// ambient dimension 3.
pub fn overlay2(fan_p: &Fan, fan_n: &Fan) -> Result<Overlay> {
    if fan_p.is_empty() || fan_n.is_empty() {
        return Err(Error::EmptyPointSet("overlay2"));
    }
    if fan_p.verts[0].dim() != 3 || fan_n.verts[0].dim() != 3 {
        return Err(Error::DimensionMismatch(
            "fan overlay requires ambient dual dimension 3".into(),
        ));
    }

    let ip = IFan::build(fan_p, 0);
    let ifn = IFan::build(fan_n, 1);
    let seed = find_seed_cell(&ip, &ifn);

    let mut cell_ids: HashMap<OverlayCell, usize> = HashMap::new();
    let mut cells: Vec<OverlayCell> = Vec::new();
    let mut adjacency: HashSet<(usize, usize)> = HashSet::new();
    let mut stack = vec![seed];
    cell_ids.insert(seed, 0);
    cells.push(seed);

    let mut constraints: Vec<&IWall> = Vec::new();
    let mut coincident: Vec<usize> = Vec::new();
    while let Some(cell) = stack.pop() {
        let id = cell_ids[&cell];
        constraints.clear();
        constraints.extend(ip.walls[cell.p_idx].iter());
        constraints.extend(ifn.walls[cell.n_idx].iter());

        for ci in 0..constraints.len() {
            coincident.clear();
            if !edge_exists(&constraints, ci, &mut coincident) {
                continue;
            }
            // Cross the wall. On the open edge the only constraints that
            // vanish are the crossed one and those identically zero on its
            // line (coinciding walls of the other fan); any transversal
            // wall would have cut the interval first.
            let mut new_p = cell.p_idx;
            let mut new_n = cell.n_idx;
            for &cj in coincident.iter().chain(std::iter::once(&ci)) {
                let c = constraints[cj];
                if c.side == 0 {
                    debug_assert!(
                        new_p == cell.p_idx || new_p == c.to,
                        "two distinct fan walls through one edge interior"
                    );
                    new_p = c.to;
                } else {
                    debug_assert!(
                        new_n == cell.n_idx || new_n == c.to,
                        "two distinct fan walls through one edge interior"
                    );
                    new_n = c.to;
                }
            }
            let nbr = OverlayCell {
                p_idx: new_p,
                n_idx: new_n,
            };
            debug_assert!(nbr != cell);
            let nid = *cell_ids.entry(nbr).or_insert_with(|| {
                cells.push(nbr);
                stack.push(nbr);
                cells.len() - 1
            });
            adjacency.insert((id.min(nid), id.max(nid)));
        }
    }

    Ok(Overlay {
        cells,
        adjacency: adjacency.into_iter().collect(),
    })
}

/// One interval bound `n/d` (`d > 0`) with a float image for fast
/// comparison and the exact value computed only when a comparison is too
/// close to call.
struct Bound {
    approx_n: Approx,
    approx_d: Approx,
    exact: Option<(BigInt, BigInt)>,
}

struct EdgeScratch {
    w0: BigInt,
    x0: BigInt,
    y0: BigInt,
    ready: bool,
}

impl EdgeScratch {
    fn prepare(&mut self, c: &IWall) {
        if !self.ready {
            self.w0 = &c.a0 * &c.a0 + &c.a1 * &c.a1;
            self.x0 = -(&c.b) * &c.a0;
            self.y0 = -(&c.b) * &c.a1;
            self.ready = true;
        }
    }
}

impl Bound {
    fn exact(&mut self, c: &IWall, other: &IWall, scratch: &mut EdgeScratch, upper: bool) -> &(BigInt, BigInt) {
        if self.exact.is_none() {
            scratch.prepare(c);
            let alpha = &other.a0 * &scratch.x0 + &other.a1 * &scratch.y0 + &other.b * &scratch.w0;
            let beta = &other.a1 * &c.a0 - &other.a0 * &c.a1;
            debug_assert!(upper == beta.is_negative());
            let (n, d) = if upper {
                (alpha, &scratch.w0 * -beta)
            } else {
                (-alpha, &scratch.w0 * beta)
            };
            self.exact = Some((n, d));
        }
        self.exact.as_ref().unwrap()
    }
}

/// `a < b` with the float images, falling back to exact cross products.
#[allow(clippy::too_many_arguments)]
fn bound_lt(
    a: &mut Bound,
    a_wall: &IWall,
    a_upper: bool,
    b: &mut Bound,
    b_wall: &IWall,
    b_upper: bool,
    c: &IWall,
    scratch: &mut EdgeScratch,
) -> bool {
    if let Some(sign) = a
        .approx_n
        .mul(b.approx_d)
        .add(b.approx_n.mul(a.approx_d).neg())
        .sign()
    {
        return sign < 0;
    }
    let (an, ad) = {
        let v = a.exact(c, a_wall, scratch, a_upper);
        (v.0.clone(), v.1.clone())
    };
    let (bn, bd) = b.exact(c, b_wall, scratch, b_upper);
    an * bd < bn * &ad
}

/// Whether `constraints[ci]` carries a 1-dimensional piece of the cell
/// boundary. Constraints identically zero on its line (coinciding walls)
/// are pushed to `coincident`. Arithmetic is floating point with
/// conservative error bounds; any comparison too close to call is redone
/// exactly in integers, so the result is always exact.
fn edge_exists(constraints: &[&IWall], ci: usize, coincident: &mut Vec<usize>) -> bool {
    let c = constraints[ci];
    let (ca0, ca1, cb) = (
        Approx::from_bigint(&c.a0),
        Approx::from_bigint(&c.a1),
        Approx::from_bigint(&c.b),
    );
    let w0f = ca0.mul(ca0).add(ca1.mul(ca1));
    let x0f = cb.neg().mul(ca0);
    let y0f = cb.neg().mul(ca1);
    let mut scratch = EdgeScratch {
        w0: BigInt::from(0u8),
        x0: BigInt::from(0u8),
        y0: BigInt::from(0u8),
        ready: false,
    };

    let mut lo: Option<(Bound, usize)> = None;
    let mut hi: Option<(Bound, usize)> = None;
    for (cj, other) in constraints.iter().enumerate() {
        if cj == ci {
            continue;
        }
        let (oa0, oa1, ob) = (
            Approx { v: other.f[0], e: other.f[0].abs() * APPROX_EPS },
            Approx { v: other.f[1], e: other.f[1].abs() * APPROX_EPS },
            Approx { v: other.f[2], e: other.f[2].abs() * APPROX_EPS },
        );
        let beta_f = oa1.mul(ca0).add(oa0.mul(ca1).neg());
        let beta_sign = beta_f.sign().unwrap_or_else(|| {
            let beta = &other.a1 * &c.a0 - &other.a0 * &c.a1;
            match beta.sign() {
                num_bigint::Sign::Minus => -1,
                num_bigint::Sign::NoSign => 0,
                num_bigint::Sign::Plus => 1,
            }
        });
        if beta_sign == 0 {
            // parallel wall: the line is cut off, untouched, or identical
            scratch.prepare(c);
            let alpha = &other.a0 * &scratch.x0 + &other.a1 * &scratch.y0 + &other.b * &scratch.w0;
            if alpha.is_negative() {
                return false;
            }
            if alpha.is_zero() {
                coincident.push(cj);
            }
            continue;
        }
        let alpha_f = oa0.mul(x0f).add(oa1.mul(y0f)).add(ob.mul(w0f));
        let upper = beta_sign < 0;
        let mut bound = if upper {
            Bound {
                approx_n: alpha_f,
                approx_d: w0f.mul(beta_f.neg()),
                exact: None,
            }
        } else {
            Bound {
                approx_n: alpha_f.neg(),
                approx_d: w0f.mul(beta_f),
                exact: None,
            }
        };
        if upper {
            hi = match hi {
                Some((mut best, bj)) => {
                    if bound_lt(&mut bound, other, true, &mut best, constraints[bj], true, c, &mut scratch) {
                        Some((bound, cj))
                    } else {
                        Some((best, bj))
                    }
                }
                None => Some((bound, cj)),
            };
        } else {
            lo = match lo {
                Some((mut best, bj)) => {
                    if bound_lt(&mut best, constraints[bj], false, &mut bound, other, false, c, &mut scratch) {
                        Some((bound, cj))
                    } else {
                        Some((best, bj))
                    }
                }
                None => Some((bound, cj)),
            };
        }
    }
    match (lo, hi) {
        (Some((mut l, lj)), Some((mut h, hj))) => bound_lt(
            &mut l,
            constraints[lj],
            false,
            &mut h,
            constraints[hj],
            true,
            c,
            &mut scratch,
        ),
        _ => true,
    }
}

/// Deterministic search for a cell where both fans have a unique argmax.
fn find_seed_cell(ip: &IFan, ifn: &IFan) -> OverlayCell {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let td = BigInt::from(1i64 << 21);
    for _ in 0..64 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let hx = ((state >> 20) & 0xfffff) as i64 - (1 << 19);
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let hy = ((state >> 20) & 0xfffff) as i64 - (1 << 19);
        let (tx, ty) = (BigInt::from(hx), BigInt::from(hy));
        if let (Some(p_idx), Some(n_idx)) = (
            ip.unique_argmax(&tx, &ty, &td),
            ifn.unique_argmax(&tx, &ty, &td),
        ) {
            return OverlayCell { p_idx, n_idx };
        }
    }
    panic!("no generic direction found for fan overlay seed");
}

/// Vertices of `U(X ⊕ Y)` for reduced fans, with the wall structure of the
/// sum. Equal to `Fan::from_point_set(minkowski_sum(X, Y))` but output
/// sensitive in the overlay size.
pub fn minkowski_fan(fan_p: &Fan, fan_n: &Fan) -> Result<Fan> {
    if fan_p.len() == 1 {
        return Ok(fan_n.translate(&fan_p.verts[0]));
    }
    if fan_n.len() == 1 {
        return Ok(fan_p.translate(&fan_n.verts[0]));
    }
    if fan_p.verts[0].dim() != 3 {
        // ambient dimension 2 stays small: hull the sum directly
        let sum = minkowski_sum(&fan_p.point_set(), &fan_n.point_set())?;
        return Fan::from_point_set(&sum);
    }
    let overlay = overlay2(fan_p, fan_n)?;

    // distinct sum points; coinciding sums merge into one fan cell
    let sums: Vec<DualPoint> = overlay
        .cells
        .iter()
        .map(|c| fan_p.verts[c.p_idx].add(&fan_n.verts[c.n_idx]))
        .collect();
    let mut order: Vec<usize> = (0..sums.len()).collect();
    order.sort_unstable_by(|&a, &b| sums[a].cmp(&sums[b]));
    let mut canon: Vec<DualPoint> = Vec::new();
    let mut cell_vert = vec![0usize; sums.len()];
    for &i in &order {
        if canon.last() != Some(&sums[i]) {
            canon.push(sums[i].clone());
        }
        cell_vert[i] = canon.len() - 1;
    }

    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); canon.len()];
    for &(a, b) in &overlay.adjacency {
        let (va, vb) = (cell_vert[a], cell_vert[b]);
        if va != vb {
            nbrs[va].push(vb);
            nbrs[vb].push(va);
        }
    }
    for n in nbrs.iter_mut() {
        n.sort_unstable();
        n.dedup();
    }
    Ok(Fan {
        verts: canon,
        nbrs,
    })
}

/// Number of vertices of `U(X ⊕ Y)` via the overlay (dimension-2 inputs).
pub fn minkowski_vertex_count(fan_p: &Fan, fan_n: &Fan) -> Result<usize> {
    Ok(minkowski_fan(fan_p, fan_n)?.len())
}

/// Reduced Minkowski sum of two point sets: `U*(X ⊕ Y)`. Uses the direct
/// hull when the pairwise product is small, the fan overlay otherwise.
pub fn minkowski_reduced(x: &PointSet, y: &PointSet) -> Result<PointSet> {
    const DIRECT_CAP: usize = 2048;
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyPointSet("minkowski_reduced"));
    }
    if x.len() * y.len() <= DIRECT_CAP || x.dim() != Some(3) {
        let sum = minkowski_sum(x, y)?;
        return crate::geometry::hull::upper_hull_vertices(&sum);
    }
    let fan = minkowski_fan(&Fan::from_point_set(x)?, &Fan::from_point_set(y)?)?;
    Ok(fan.point_set())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hull::upper_hull_vertices;
    use crate::geometry::scalar::scalar_ratio;
    use rand::{Rng, SeedableRng};

    fn random_set(rng: &mut impl Rng, n: usize) -> PointSet {
        PointSet::new(
            (0..n)
                .map(|_| {
                    DualPoint::new(
                        (0..3)
                            .map(|_| scalar_ratio(rng.gen_range(-8..=8), rng.gen_range(1..=4)))
                            .collect(),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn overlay_matches_direct_minkowski_hull() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for round in 0..60 {
            let nx = rng.gen_range(1..10);
            let ny = rng.gen_range(1..10);
            let x = random_set(&mut rng, nx);
            let y = random_set(&mut rng, ny);
            let xr = upper_hull_vertices(&x).unwrap();
            let yr = upper_hull_vertices(&y).unwrap();
            let direct = upper_hull_vertices(&minkowski_sum(&xr, &yr).unwrap()).unwrap();
            let fan = minkowski_fan(
                &Fan::from_point_set(&xr).unwrap(),
                &Fan::from_point_set(&yr).unwrap(),
            )
            .unwrap();
            assert_eq!(fan.point_set(), direct, "round {round}");
        }
    }

    #[test]
    fn overlay_handles_shared_walls() {
        // both fans crease on the same line x = 0
        let x = PointSet::from_rows(&[&[1, 0, 0], &[-1, 0, 0]]);
        let y = PointSet::from_rows(&[&[2, 0, 1], &[-2, 0, 1]]);
        let fan = minkowski_fan(
            &Fan::from_point_set(&x).unwrap(),
            &Fan::from_point_set(&y).unwrap(),
        )
        .unwrap();
        let direct = upper_hull_vertices(&minkowski_sum(&x, &y).unwrap()).unwrap();
        assert_eq!(fan.point_set(), direct);
        assert_eq!(fan.len(), 2);
    }

    #[test]
    fn translation_fast_path() {
        let x = PointSet::from_rows(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
        let shift = PointSet::from_rows(&[&[3, -2, 7]]);
        let out = minkowski_reduced(&x, &shift).unwrap();
        assert_eq!(out, PointSet::from_rows(&[&[3, -2, 7], &[4, -2, 7], &[3, -1, 7]]));
    }

    #[test]
    fn coinciding_sum_points_merge() {
        // (a ⊕ b) where two pairs produce the same dual point: both argmax
        // cells merge into one fan cell for the shared vertex
        let x = PointSet::from_rows(&[&[0, 0, 0], &[2, 0, 0], &[1, 0, 1]]);
        let y = PointSet::from_rows(&[&[0, 0, 0], &[2, 0, 0], &[1, 0, 1]]);
        let direct = upper_hull_vertices(&minkowski_sum(&x, &y).unwrap()).unwrap();
        let fan = minkowski_fan(
            &Fan::from_point_set(&x).unwrap(),
            &Fan::from_point_set(&y).unwrap(),
        )
        .unwrap();
        assert_eq!(fan.point_set(), direct);
    }
}
