//! Independent brute-force verification of piece counts.
//!
//! Counts activation regions by breadth-first search over activation
//! patterns: starting from the patterns of a few sample points, each
//! pattern is tested for a strictly feasible interior with an exact linear
//! program, and feasible regions expand by flipping one neuron at a time.
//! Nothing here touches the dual-space machinery, so agreement between the
//! two counters is a genuine cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::scalar::{scalar_from_f64, scalar_to_f64, Scalar};
use crate::lp::max_slack;
use crate::tropical::{Activation, NetworkSpec};

/// One full-dimensional activation region.
#[derive(Clone, Debug)]
pub struct ActivationRegion {
    /// On/off bit per hidden neuron, layer-major.
    pub pattern: Vec<bool>,
    /// A strictly interior rational point (the LP witness).
    pub interior_point: Vec<Scalar>,
    /// The affine form `(a, b)` of the network on the region.
    pub affine: (Vec<Scalar>, Scalar),
}

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Hard cap on enumerated regions; exceeding it is an error.
    pub region_cap: usize,
    /// Seed for the sample points that prime the search.
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            region_cap: 100_000,
            seed: 0x5eed,
        }
    }
}

/// Widths of the layers that carry pattern bits: every rectified layer,
/// including a rectified output layer.
fn pattern_widths(net: &NetworkSpec) -> Vec<usize> {
    net.layers
        .iter()
        .filter(|l| l.activation == Activation::Relu)
        .map(|l| l.weights.rows())
        .collect()
}

type AffineForm = (Vec<Scalar>, Scalar);

/// The affine forms of the network under a fixed pattern: the region's
/// strict inequality system, the output form, and the forms of the convex
/// parts `R(P)`, `R(N)` of the dual decomposition, derived by the shadow
/// recursion `R(N') = A⁻·R(P) + A⁺·R(N)`, `R(P') = R(N') + σ(pre)` — pure
/// forward algebra, no dual-space machinery.
struct PatternForms {
    constraints: Vec<AffineForm>,
    output: AffineForm,
    /// `(R(P), R(N))` forms of the output; constant on exactly the cells
    /// that the dual tessellation counts.
    part_forms: (AffineForm, AffineForm),
}

fn zero_form(d: usize) -> AffineForm {
    (vec![Scalar::zero(); d], Scalar::zero())
}

fn add_scaled(acc: &mut AffineForm, w: &Scalar, f: &AffineForm) {
    if w.is_zero() {
        return;
    }
    for (ai, fi) in acc.0.iter_mut().zip(&f.0) {
        if !fi.is_zero() {
            *ai += w * fi;
        }
    }
    if !f.1.is_zero() {
        acc.1 += w * &f.1;
    }
}

fn form_sub(a: &AffineForm, b: &AffineForm) -> AffineForm {
    (
        a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect(),
        &a.1 - &b.1,
    )
}

fn form_add(a: &AffineForm, b: &AffineForm) -> AffineForm {
    (
        a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect(),
        &a.1 + &b.1,
    )
}

fn pattern_forms(net: &NetworkSpec, pattern: &[bool]) -> PatternForms {
    let d = net.input_dim;
    // forms of R(P_l), R(N_l) per channel; initially P = coordinates, N = 0
    let mut p_forms: Vec<AffineForm> = (0..d)
        .map(|i| {
            let mut a = vec![Scalar::zero(); d];
            a[i] = Scalar::from_integer(1.into());
            (a, Scalar::zero())
        })
        .collect();
    let mut n_forms: Vec<AffineForm> = vec![zero_form(d); d];
    let mut constraints = Vec::new();
    let mut bit = 0usize;
    for layer in net.layers.iter() {
        let rows = layer.weights.rows();
        let mut next_p = Vec::with_capacity(rows);
        let mut next_n = Vec::with_capacity(rows);
        for r in 0..rows {
            // pre-activation form and the shadow negative part
            let mut pre = (vec![Scalar::zero(); d], layer.bias[r].clone());
            let mut neg = zero_form(d);
            for j in 0..layer.weights.cols() {
                let w = layer.weights.get(r, j);
                if w.is_zero() {
                    continue;
                }
                let f = form_sub(&p_forms[j], &n_forms[j]);
                add_scaled(&mut pre, w, &f);
                if w > &Scalar::zero() {
                    add_scaled(&mut neg, w, &n_forms[j]);
                } else {
                    let neg_w = -w.clone();
                    add_scaled(&mut neg, &neg_w, &p_forms[j]);
                }
            }
            if layer.activation == Activation::Linear {
                next_p.push(form_add(&neg, &pre));
                next_n.push(neg);
            } else {
                let on = pattern[bit];
                bit += 1;
                if on {
                    constraints.push(pre.clone());
                    next_p.push(form_add(&neg, &pre));
                } else {
                    let neg_pre = (
                        pre.0.iter().map(|v| -v.clone()).collect(),
                        -pre.1.clone(),
                    );
                    constraints.push(neg_pre);
                    next_p.push(neg.clone());
                }
                next_n.push(neg);
            }
        }
        p_forms = next_p;
        n_forms = next_n;
    }
    debug_assert_eq!(bit, pattern.len());
    let p_out = p_forms.pop().expect("scalar output");
    let n_out = n_forms.pop().expect("scalar output");
    PatternForms {
        constraints,
        output: form_sub(&p_out, &n_out),
        part_forms: (p_out, n_out),
    }
}

/// The activation pattern at a sample point, or `None` if the point lies
/// exactly on a pre-activation hyperplane.
fn pattern_at(net: &NetworkSpec, x: &[Scalar]) -> Option<Vec<bool>> {
    let mut pattern = Vec::new();
    let mut cur: Vec<Scalar> = x.to_vec();
    for layer in net.layers.iter() {
        let mut next = Vec::with_capacity(layer.weights.rows());
        for r in 0..layer.weights.rows() {
            let mut acc = layer.bias[r].clone();
            for (j, v) in cur.iter().enumerate() {
                let w = layer.weights.get(r, j);
                if !w.is_zero() && !v.is_zero() {
                    acc += w * v;
                }
            }
            if layer.activation == Activation::Linear {
                next.push(acc);
            } else {
                if acc.is_zero() {
                    return None;
                }
                pattern.push(acc.is_positive());
                next.push(if acc.is_positive() { acc } else { Scalar::zero() });
            }
        }
        cur = next;
    }
    Some(pattern)
}

/// Enumerates every full-dimensional activation region of a scalar-output
/// network over the whole input space.
pub fn enumerate_activation_regions(
    net: &NetworkSpec,
    cfg: &OracleConfig,
) -> Result<Vec<ActivationRegion>> {
    net.validate()?;
    if net.output_dim() != 1 {
        return Err(Error::InvalidNetwork("oracle needs a scalar output".into()));
    }
    let d = net.input_dim;
    if d > 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let n_hidden: usize = pattern_widths(net).iter().sum();
    let cap = Scalar::from_integer(1.into());

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stack: Vec<Vec<bool>> = Vec::new();
    for _ in 0..(4 * d + 8) {
        let x: Vec<Scalar> = (0..d)
            .map(|_| {
                Scalar::new(
                    rng.gen_range(-(1i64 << 20)..(1i64 << 20)).into(),
                    (1i64 << 18).into(),
                )
            })
            .collect();
        if let Some(p) = pattern_at(net, &x) {
            stack.push(p);
        }
    }
    if stack.is_empty() && n_hidden > 0 {
        stack.push(vec![true; n_hidden]);
    }
    if n_hidden == 0 {
        stack.push(Vec::new());
    }

    let mut seen = std::collections::HashSet::new();
    let mut regions = Vec::new();
    while let Some(pattern) = stack.pop() {
        if !seen.insert(pattern.clone()) {
            continue;
        }
        let forms = pattern_forms(net, &pattern);
        let Some((slack, point)) = max_slack(d, &forms.constraints, &[], cap.clone()) else {
            continue;
        };
        if !slack.is_positive() {
            continue;
        }
        if regions.len() >= cfg.region_cap {
            return Err(Error::ResourceCap(format!(
                "more than {} activation regions",
                cfg.region_cap
            )));
        }
        regions.push(ActivationRegion {
            pattern: pattern.clone(),
            interior_point: point,
            affine: forms.output,
        });
        for i in 0..n_hidden {
            let mut flipped = pattern.clone();
            flipped[i] = !flipped[i];
            if !seen.contains(&flipped) {
                stack.push(flipped);
            }
        }
    }
    Ok(regions)
}

/// Merges activation regions into the cells the dual tessellation counts:
/// two regions merge when they differ in exactly one neuron, share a
/// `(d−1)`-dimensional wall on that neuron's local zero set, and both
/// convex parts `R(P)`, `R(N)` continue affinely across it. Such pairs
/// arise generically in deeper networks when a crease runs through
/// territory where all its downstream neurons are inactive. Returns a
/// piece id per region.
fn merge_same_form_regions(
    net: &NetworkSpec,
    regions: &[ActivationRegion],
) -> Vec<usize> {
    let d = net.input_dim;
    let cap = Scalar::from_integer(1.into());
    let mut parent: Vec<usize> = (0..regions.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    // group by the pair of part forms; only equal pairs can merge
    let mut by_form: std::collections::HashMap<String, Vec<usize>> = std::collections::HashMap::new();
    let pair_forms: Vec<(AffineForm, AffineForm)> = regions
        .iter()
        .map(|r| pattern_forms(net, &r.pattern).part_forms)
        .collect();
    for (i, pf) in pair_forms.iter().enumerate() {
        let key = format!("{pf:?}");
        by_form.entry(key).or_default().push(i);
    }
    for group in by_form.values() {
        for (ga, &i) in group.iter().enumerate() {
            for &j in group.iter().skip(ga + 1) {
                let (ri, rj) = (&regions[i], &regions[j]);
                let diff: Vec<usize> = ri
                    .pattern
                    .iter()
                    .zip(&rj.pattern)
                    .enumerate()
                    .filter(|(_, (a, b))| a != b)
                    .map(|(k, _)| k)
                    .collect();
                if diff.len() != 1 {
                    continue;
                }
                let bit = diff[0];
                // shared wall: the flipped neuron's zero set must meet the
                // interiors of the remaining constraints of region i
                let forms = pattern_forms(net, &ri.pattern);
                let mut others = forms.constraints.clone();
                let (wall_a, wall_b) = others.remove(bit);
                // the stored constraint is sign-adjusted; the wall is its zero set
                let eqs = vec![(wall_a, wall_b)];
                if let Some((slack, _)) = max_slack(d, &others, &eqs, cap.clone()) {
                    if slack.is_positive() {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
        }
    }
    (0..regions.len()).map(|i| find(&mut parent, i)).collect()
}

/// The independent count of affine pieces: full-dimensional activation
/// regions, with adjacent same-function regions counted once (a crease
/// whose downstream neurons are all inactive does not change the function,
/// and the function's piece count is what the dual side measures).
pub fn oracle_affine_count(net: &NetworkSpec, cfg: &OracleConfig) -> Result<usize> {
    let regions = enumerate_activation_regions(net, cfg)?;
    let piece = merge_same_form_regions(net, &regions);
    let distinct: std::collections::HashSet<usize> = piece.into_iter().collect();
    Ok(distinct.len())
}

/// Number of regions whose affine form vanishes on a `(d−1)`-dimensional
/// set through the region interior: the independent boundary-piece count.
/// Regions on which the network is identically zero are degenerate flats
/// and are excluded, mirroring the dual-side convention.
pub fn oracle_boundary_count(net: &NetworkSpec, cfg: &OracleConfig) -> Result<usize> {
    let regions = enumerate_activation_regions(net, cfg)?;
    let piece = merge_same_form_regions(net, &regions);
    let d = net.input_dim;
    let cap = Scalar::from_integer(1.into());
    let mut crossing_pieces = std::collections::HashSet::new();
    for (i, region) in regions.iter().enumerate() {
        if crossing_pieces.contains(&piece[i]) {
            continue;
        }
        let (a, b) = &region.affine;
        if a.iter().all(Zero::is_zero) {
            continue; // constant on the region: either no zero or a flat
        }
        let forms = pattern_forms(net, &region.pattern);
        let eqs = vec![(a.clone(), b.clone())];
        if let Some((slack, _)) = max_slack(d, &forms.constraints, &eqs, cap.clone()) {
            if slack.is_positive() {
                crossing_pieces.insert(piece[i]);
            }
        }
    }
    Ok(crossing_pieces.len())
}

/// Result of the grid sanity probe.
#[derive(Clone, Debug)]
pub struct GridProbe {
    /// Connected components of constant exact gradient on the grid graph;
    /// a lower bound for the affine-piece count.
    pub region_lower_bound: usize,
    /// Sign-change contour segments, in input coordinates.
    pub contour: Vec<[(f64, f64); 2]>,
}

/// Samples the network on a `(resolution+1)²` grid over
/// `[x0, x1] × [y0, y1]`, counting components of constant gradient and
/// extracting the sign-change contour. A sanity check, documented as a
/// lower bound only.
pub fn grid_probe(
    net: &NetworkSpec,
    bbox: (f64, f64, f64, f64),
    resolution: usize,
) -> Result<GridProbe> {
    net.validate()?;
    if net.input_dim != 2 {
        return Err(Error::UnsupportedDimension(net.input_dim));
    }
    if resolution == 0 {
        return Err(Error::Parse("grid resolution must be positive".into()));
    }
    let (x0, x1, y0, y1) = bbox;
    let n = resolution + 1;
    let fx = |i: usize| x0 + (x1 - x0) * i as f64 / resolution as f64;
    let fy = |j: usize| y0 + (y1 - y0) * j as f64 / resolution as f64;

    // exact gradient (pattern-fixed affine form) and value per node
    let mut grads: Vec<(Vec<Scalar>, Scalar)> = Vec::with_capacity(n * n);
    let mut values: Vec<Scalar> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = vec![scalar_from_f64(fx(i))?, scalar_from_f64(fy(j))?];
            let pattern = pattern_at_closed(net, &x);
            let forms = pattern_forms(net, &pattern);
            let (a, b) = &forms.output;
            let v = &a[0] * &x[0] + &a[1] * &x[1] + b;
            grads.push(forms.output);
            values.push(v);
        }
    }

    // union-find over 4-adjacent equal-gradient nodes
    let mut parent: Vec<usize> = (0..n * n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let idx = |i: usize, j: usize| i * n + j;
    for i in 0..n {
        for j in 0..n {
            for (di, dj) in [(1usize, 0usize), (0, 1)] {
                let (i2, j2) = (i + di, j + dj);
                if i2 < n && j2 < n && grads[idx(i, j)] == grads[idx(i2, j2)] {
                    let (a, b) = (find(&mut parent, idx(i, j)), find(&mut parent, idx(i2, j2)));
                    parent[a] = b;
                }
            }
        }
    }
    let mut roots = std::collections::HashSet::new();
    for i in 0..n * n {
        let r = find(&mut parent, i);
        roots.insert(r);
    }

    // marching-squares sign contour
    let t = |va: &Scalar, vb: &Scalar| {
        let a = scalar_to_f64(va);
        let b = scalar_to_f64(vb);
        a / (a - b)
    };
    let mut contour = Vec::new();
    for i in 0..resolution {
        for j in 0..resolution {
            let corners = [
                (idx(i, j), (fx(i), fy(j))),
                (idx(i + 1, j), (fx(i + 1), fy(j))),
                (idx(i + 1, j + 1), (fx(i + 1), fy(j + 1))),
                (idx(i, j + 1), (fx(i), fy(j + 1))),
            ];
            let mut crossings: Vec<(f64, f64)> = Vec::new();
            for k in 0..4 {
                let (ia, (xa, ya)) = corners[k];
                let (ib, (xb, yb)) = corners[(k + 1) % 4];
                let (va, vb) = (&values[ia], &values[ib]);
                if va.is_positive() != vb.is_positive() {
                    let s = t(va, vb);
                    crossings.push((xa + (xb - xa) * s, ya + (yb - ya) * s));
                }
            }
            // 2 crossings: one segment; 4 (saddle): pair them as found
            let mut it = crossings.chunks_exact(2);
            for pair in &mut it {
                contour.push([pair[0], pair[1]]);
            }
        }
    }
    Ok(GridProbe {
        region_lower_bound: roots.len(),
        contour,
    })
}

/// Pattern with the closed convention `active ⟺ pre ≥ 0`; used by the grid
/// probe where nodes may sit exactly on a kink.
fn pattern_at_closed(net: &NetworkSpec, x: &[Scalar]) -> Vec<bool> {
    let mut pattern = Vec::new();
    let mut cur: Vec<Scalar> = x.to_vec();
    for layer in net.layers.iter() {
        let mut next = Vec::with_capacity(layer.weights.rows());
        for r in 0..layer.weights.rows() {
            let mut acc = layer.bias[r].clone();
            for (j, v) in cur.iter().enumerate() {
                let w = layer.weights.get(r, j);
                if !w.is_zero() && !v.is_zero() {
                    acc += w * v;
                }
            }
            if layer.activation == Activation::Linear {
                next.push(acc);
            } else {
                pattern.push(!acc.is_negative());
                next.push(if acc.is_positive() { acc } else { Scalar::zero() });
            }
        }
        cur = next;
    }
    pattern
}
