//! ReLU networks as differences of convex piecewise-affine functions.
//!
//! With biases folded into an augmented "dummy" coordinate, a network layer
//! is a linear map followed by the rectifier. Writing the incoming function
//! as `R(P) − R(N)` for vectors of dual point sets and splitting the layer
//! matrix `A = A⁺ − A⁻` into non-negative parts, the layer recursion is
//!
//! ```text
//! N' = (A⁻ ⊗ P) ⊕ (A⁺ ⊗ N)
//! P' = (A⁺ ⊗ P) ⊕ (A⁻ ⊗ N) ∪ N'      (the union step is the ReLU)
//! ```
//!
//! Every channel is reduced to its upper-hull vertices after each layer,
//! which never changes the represented function. Large Minkowski folds run
//! on normal fans so intermediate products stay output-sized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::dual::{DualPoint, Matrix, PointSet, PointSetVector};
use crate::geometry::fan::{minkowski_fan, Fan};
use crate::geometry::hull::upper_hull;
use crate::geometry::scalar::{format_scalar, parse_scalar, scalar_from_f64, Scalar};
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Linear,
}

#[derive(Clone, Debug)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<Scalar>,
    pub activation: Activation,
}

/// A feed-forward ReLU network with exact rational parameters.
#[derive(Clone, Debug)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub layers: Vec<Layer>,
}

impl NetworkSpec {
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self> {
        let net = NetworkSpec { input_dim, layers };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::InvalidNetwork("input dimension 0".into()));
        }
        if self.layers.is_empty() {
            return Err(Error::InvalidNetwork("no layers".into()));
        }
        let mut width = self.input_dim;
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.weights.cols() != width {
                return Err(Error::InvalidNetwork(format!(
                    "layer {i} expects input width {}, previous width is {width}",
                    layer.weights.cols()
                )));
            }
            if layer.bias.len() != layer.weights.rows() {
                return Err(Error::InvalidNetwork(format!(
                    "layer {i} bias length {} does not match {} rows",
                    layer.bias.len(),
                    layer.weights.rows()
                )));
            }
            width = layer.weights.rows();
        }
        Ok(())
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, |l| l.weights.rows())
    }

    /// Layer widths including input and output, e.g. `[2, 10, 10, 1]`.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.input_dim];
        w.extend(self.layers.iter().map(|l| l.weights.rows()));
        w
    }

    /// The augmented matrix `[W | b]` of a layer, with the dummy row
    /// `(0, …, 0, 1)` appended when `keep_dummy` so the constant channel
    /// propagates.
    pub fn augmented(&self, layer: usize, keep_dummy: bool) -> Matrix {
        let l = &self.layers[layer];
        let (rows, cols) = (l.weights.rows(), l.weights.cols());
        let out_rows = rows + usize::from(keep_dummy);
        let mut m = Matrix::zeros(out_rows, cols + 1);
        for i in 0..rows {
            for j in 0..cols {
                *m.get_mut(i, j) = l.weights.get(i, j).clone();
            }
            *m.get_mut(i, cols) = l.bias[i].clone();
        }
        if keep_dummy {
            *m.get_mut(rows, cols) = Scalar::from_integer(1.into());
        }
        m
    }
}

/// Splits `A = A⁺ − A⁻` into entrywise non-negative parts.
pub fn split_pos_neg(a: &Matrix) -> (Matrix, Matrix) {
    a.split_pos_neg()
}

/// Exact forward pass; returns the full output vector.
pub fn net_forward(net: &NetworkSpec, x: &[Scalar]) -> Result<Vec<Scalar>> {
    if x.len() != net.input_dim {
        return Err(Error::DimensionMismatch(format!(
            "network input dimension {} fed {} coordinates",
            net.input_dim,
            x.len()
        )));
    }
    let zero = Scalar::zero();
    let mut cur: Vec<Scalar> = x.to_vec();
    for layer in &net.layers {
        let mut next = Vec::with_capacity(layer.weights.rows());
        for i in 0..layer.weights.rows() {
            let mut acc = layer.bias[i].clone();
            for (j, v) in cur.iter().enumerate() {
                let w = layer.weights.get(i, j);
                if !w.is_zero() && !v.is_zero() {
                    acc += w * v;
                }
            }
            if layer.activation == Activation::Relu && acc < zero {
                acc = zero.clone();
            }
            next.push(acc);
        }
        cur = next;
    }
    Ok(cur)
}

/// Exact scalar output of a single-output network.
pub fn net_eval(net: &NetworkSpec, x: &[Scalar]) -> Result<Scalar> {
    if net.output_dim() != 1 {
        return Err(Error::InvalidNetwork(format!(
            "scalar evaluation of a width-{} output",
            net.output_dim()
        )));
    }
    Ok(net_forward(net, x)?.pop().unwrap())
}

/// The dual state of a layer: `F = R(P) − R(N)` coordinate-wise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcpaState {
    pub p: PointSetVector,
    pub n: PointSetVector,
}

/// A scalar difference of convex piecewise-affine functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcpaFunction {
    pub p: PointSet,
    pub n: PointSet,
}

impl DcpaFunction {
    pub fn new(p: PointSet, n: PointSet) -> Result<Self> {
        if p.is_empty() || n.is_empty() {
            return Err(Error::EmptyPointSet("DcpaFunction"));
        }
        if p.dim() != n.dim() {
            return Err(Error::DimensionMismatch(
                "positive and negative parts disagree on ambient dimension".into(),
            ));
        }
        Ok(DcpaFunction { p, n })
    }

    /// Input dimension `d` (ambient dual dimension minus one).
    pub fn input_dim(&self) -> usize {
        self.p.dim().unwrap() - 1
    }
}

/// `R(P)(x) − R(N)(x)`, exactly.
pub fn dcpa_eval(f: &DcpaFunction, x: &[Scalar]) -> Result<Scalar> {
    let p = crate::geometry::dual::eval_max(&f.p, x)?;
    let n = crate::geometry::dual::eval_max(&f.n, x)?;
    Ok(p - n)
}

/// Initial state for input dimension `d`: the identity function `(x, 1)`
/// with the constant dummy channel last.
pub fn dcpa_init(d: usize) -> DcpaState {
    let mut p = Vec::with_capacity(d + 1);
    let one = Scalar::from_integer(1.into());
    for i in 0..=d {
        let mut coords = vec![Scalar::zero(); d + 1];
        coords[i] = one.clone();
        p.push(PointSet::singleton(DualPoint::new(coords)));
    }
    let n = vec![PointSet::singleton(DualPoint::origin(d + 1)); d + 1];
    DcpaState {
        p: PointSetVector::new(p).unwrap(),
        n: PointSetVector::new(n).unwrap(),
    }
}

// --- fan-threaded layer computation ---------------------------------------

fn scale_fan(fan: &Fan, factor: &Scalar) -> Fan {
    debug_assert!(factor > &Scalar::zero());
    Fan {
        verts: fan.verts.iter().map(|v| v.scale(factor)).collect(),
        nbrs: fan.nbrs.clone(),
    }
}

fn origin_fan(dim: usize) -> Fan {
    Fan {
        verts: vec![DualPoint::origin(dim)],
        nbrs: vec![Vec::new()],
    }
}

fn union_fan(a: &Fan, b: &Fan) -> Result<Fan> {
    let mut pts = a.verts.clone();
    pts.extend(b.verts.iter().cloned());
    let set = PointSet::new(pts)?;
    Ok(Fan::from_complex(&upper_hull(&set)?))
}

/// Reduced Minkowski fold of scaled channel fans. Summed as a balanced
/// tree, smallest pairs first, so intermediate refinements stay close to
/// output size instead of being revisited once per term.
fn fold_minkowski(mut terms: Vec<Fan>, dim: usize) -> Result<Fan> {
    if terms.is_empty() {
        return Ok(origin_fan(dim));
    }
    while terms.len() > 1 {
        terms.sort_by_key(|f| std::cmp::Reverse(f.len()));
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        while let Some(a) = terms.pop() {
            match terms.pop() {
                Some(b) => next.push(minkowski_fan(&a, &b)?),
                None => next.push(a),
            }
        }
        terms = next;
    }
    Ok(terms.pop().unwrap())
}

fn channel_fans(v: &PointSetVector) -> Result<Vec<Fan>> {
    v.entries().iter().map(Fan::from_point_set).collect()
}

fn fans_to_vector(fans: &[Fan]) -> PointSetVector {
    PointSetVector::new(fans.iter().map(Fan::point_set).collect())
        .expect("layer channels share the ambient dimension")
}

/// One layer of the recursion over channel fans.
fn layer_on_fans(
    a_aug: &Matrix,
    p_fans: &[Fan],
    n_fans: &[Fan],
    relu: bool,
) -> Result<(Vec<Fan>, Vec<Fan>)> {
    if a_aug.cols() != p_fans.len() || p_fans.len() != n_fans.len() {
        return Err(Error::ShapeMismatch(format!(
            "augmented matrix with {} columns against a state of length {}",
            a_aug.cols(),
            p_fans.len()
        )));
    }
    let dim = p_fans
        .first()
        .and_then(|f| f.verts.first())
        .map(|v| v.dim())
        .ok_or(Error::EmptyPointSet("layer input state"))?;
    let (a_pos, a_neg) = a_aug.split_pos_neg();
    let zero = Scalar::zero();

    let mut out_p = Vec::with_capacity(a_aug.rows());
    let mut out_n = Vec::with_capacity(a_aug.rows());
    for i in 0..a_aug.rows() {
        let mut neg_terms: Vec<Fan> = Vec::new();
        let mut pos_terms: Vec<Fan> = Vec::new();
        for j in 0..a_aug.cols() {
            let (wp, wn) = (a_pos.get(i, j), a_neg.get(i, j));
            if wp > &zero {
                pos_terms.push(scale_fan(&p_fans[j], wp));
                neg_terms.push(scale_fan(&n_fans[j], wp));
            }
            if wn > &zero {
                pos_terms.push(scale_fan(&n_fans[j], wn));
                neg_terms.push(scale_fan(&p_fans[j], wn));
            }
        }
        let neg = fold_minkowski(neg_terms, dim)?;
        let pos = fold_minkowski(pos_terms, dim)?;
        if relu {
            out_p.push(union_fan(&pos, &neg)?);
        } else {
            out_p.push(pos);
        }
        out_n.push(neg);
    }
    Ok((out_p, out_n))
}

/// Applies one ReLU layer `σ(A_aug · F)` to a dual state. The augmented
/// matrix must carry the dummy row so the constant channel propagates.
pub fn dcpa_relu_layer(a_aug: &Matrix, s: &DcpaState) -> Result<DcpaState> {
    let (p, n) = layer_on_fans(a_aug, &channel_fans(&s.p)?, &channel_fans(&s.n)?, true)?;
    Ok(DcpaState {
        p: fans_to_vector(&p),
        n: fans_to_vector(&n),
    })
}

/// Applies one linear layer `A_aug · F` (no rectifier); used for the final
/// classifier layer.
pub fn dcpa_linear_layer(a_aug: &Matrix, s: &DcpaState) -> Result<DcpaState> {
    let (p, n) = layer_on_fans(a_aug, &channel_fans(&s.p)?, &channel_fans(&s.n)?, false)?;
    Ok(DcpaState {
        p: fans_to_vector(&p),
        n: fans_to_vector(&n),
    })
}

/// Converts a scalar-output network to its dual form `R(P) − R(N)`.
///
/// Hidden layers run the recursion with the dummy channel appended; the
/// final layer consumes it, so the result has exactly one channel.
pub fn dcpa_extract(net: &NetworkSpec) -> Result<DcpaFunction> {
    net.validate()?;
    if net.output_dim() != 1 {
        return Err(Error::InvalidNetwork(format!(
            "dual extraction needs a scalar output, got width {}",
            net.output_dim()
        )));
    }
    if net.input_dim > 2 {
        return Err(Error::UnsupportedDimension(net.input_dim));
    }
    let init = dcpa_init(net.input_dim);
    let mut p_fans = channel_fans(&init.p)?;
    let mut n_fans = channel_fans(&init.n)?;
    let last = net.layers.len() - 1;
    for (l, layer) in net.layers.iter().enumerate() {
        let a_aug = net.augmented(l, l != last);
        let relu = layer.activation == Activation::Relu;
        let (p, n) = layer_on_fans(&a_aug, &p_fans, &n_fans, relu)?;
        p_fans = p;
        n_fans = n;
    }
    DcpaFunction::new(p_fans[0].point_set(), n_fans[0].point_set())
}

// --- text serialization ----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    rows: usize,
    cols: usize,
    weights: Vec<String>,
    bias: Vec<String>,
    activation: String,
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    input_dim: usize,
    layers: Vec<LayerDoc>,
}

/// Serializes a network as a JSON document with decimal-string entries that
/// parse back exactly.
pub fn network_to_text(net: &NetworkSpec) -> String {
    let doc = NetworkDoc {
        input_dim: net.input_dim,
        layers: net
            .layers
            .iter()
            .map(|l| LayerDoc {
                rows: l.weights.rows(),
                cols: l.weights.cols(),
                weights: (0..l.weights.rows())
                    .flat_map(|i| l.weights.row(i).iter().map(format_scalar))
                    .collect(),
                bias: l.bias.iter().map(format_scalar).collect(),
                activation: match l.activation {
                    Activation::Relu => "relu".into(),
                    Activation::Linear => "linear".into(),
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("network serialization cannot fail")
}

pub fn network_from_text(text: &str) -> Result<NetworkSpec> {
    let doc: NetworkDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("network file: {e}")))?;
    let mut layers = Vec::with_capacity(doc.layers.len());
    for (i, l) in doc.layers.iter().enumerate() {
        if l.weights.len() != l.rows * l.cols {
            return Err(Error::Parse(format!(
                "layer {i}: {}x{} matrix with {} weights",
                l.rows,
                l.cols,
                l.weights.len()
            )));
        }
        let weights = Matrix::new(
            l.rows,
            l.cols,
            l.weights
                .iter()
                .map(|w| parse_scalar(w))
                .collect::<Result<_>>()?,
        )?;
        let bias = l
            .bias
            .iter()
            .map(|b| parse_scalar(b))
            .collect::<Result<_>>()?;
        let activation = match l.activation.as_str() {
            "relu" => Activation::Relu,
            "linear" => Activation::Linear,
            other => return Err(Error::Parse(format!("unknown activation {other:?}"))),
        };
        layers.push(Layer {
            weights,
            bias,
            activation,
        });
    }
    NetworkSpec::new(doc.input_dim, layers)
}

/// A float layer description `(rows, cols, weights, bias, activation)`
/// for [`network_from_f64`].
pub type FloatLayer = (usize, usize, Vec<f64>, Vec<f64>, Activation);

/// Builds a network from float parameters (exact dyadic conversion).
pub fn network_from_f64(input_dim: usize, layers: &[FloatLayer]) -> Result<NetworkSpec> {
    let layers = layers
        .iter()
        .map(|(rows, cols, w, b, act)| {
            Ok(Layer {
                weights: Matrix::from_f64(*rows, *cols, w)?,
                bias: b.iter().map(|&v| scalar_from_f64(v)).collect::<Result<_>>()?,
                activation: *act,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkSpec::new(input_dim, layers)
}


#[cfg(test)]
mod perf_probe {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    #[ignore = "timing probe, run on demand"]
    fn extraction_timing_spiral_scale() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let widths = [2usize, 30, 30, 1];
        let layers: Vec<Layer> = widths
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                let (cols, rows) = (w[0], w[1]);
                let bound = (1.0 / cols as f64).sqrt();
                let data: Vec<Scalar> = (0..rows * cols)
                    .map(|_| scalar_from_f64(rng.gen_range(-bound..bound)).unwrap())
                    .collect();
                Layer {
                    weights: Matrix::new(rows, cols, data).unwrap(),
                    bias: (0..rows)
                        .map(|_| scalar_from_f64(rng.gen_range(-bound..bound)).unwrap())
                        .collect(),
                    activation: if l + 2 == widths.len() {
                        Activation::Linear
                    } else {
                        Activation::Relu
                    },
                }
            })
            .collect();
        let net = NetworkSpec::new(2, layers).unwrap();
        let t0 = std::time::Instant::now();
        let f = dcpa_extract(&net).unwrap();
        println!(
            "extracted in {:?}: |P| = {}, |N| = {}",
            t0.elapsed(),
            f.p.len(),
            f.n.len()
        );
    }
}
