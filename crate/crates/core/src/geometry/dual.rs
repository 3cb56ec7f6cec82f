//! Dual-space primitives.
//!
//! An affine function `x ↦ aᵀx + b` on `R^d` is identified with the point
//! `(a, b)` in the dual space `D ≅ R^(d+1)`. A finite point set `S ⊂ D`
//! stands for the convex piecewise-affine function
//! `x ↦ max { aᵀx + b | (a, b) ∈ S }`, and the Minkowski operations below are
//! dual to pointwise combination of such maxima: union is `max`, Minkowski
//! sum is `+`, and the Minkowski matrix product applies a non-negative matrix
//! to a vector of maxima coordinate-wise.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::scalar::{format_scalar, scalar_from_f64, Scalar};

/// A point of the dual space: the first `d` coordinates are the linear
/// coefficients of an affine function, the last is its intercept.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualPoint {
    coords: Vec<Scalar>,
}

impl DualPoint {
    pub fn new(coords: Vec<Scalar>) -> Self {
        assert!(!coords.is_empty(), "dual points live in R^(d+1), d >= 0");
        DualPoint { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| Scalar::from_integer(c.into())).collect())
    }

    pub fn origin(dim: usize) -> Self {
        Self::new(vec![Scalar::zero(); dim])
    }

    /// Ambient dual dimension (`d + 1`).
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    /// Linear coefficients `a` (all but the last coordinate).
    pub fn linear(&self) -> &[Scalar] {
        &self.coords[..self.coords.len() - 1]
    }

    /// Intercept `b` (the last coordinate).
    pub fn intercept(&self) -> &Scalar {
        &self.coords[self.coords.len() - 1]
    }

    /// Evaluates the affine function this point is dual to: `aᵀx + b`.
    pub fn eval(&self, x: &[Scalar]) -> Result<Scalar> {
        if x.len() + 1 != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "affine function on R^{} evaluated at a point of R^{}",
                self.dim() - 1,
                x.len()
            )));
        }
        let mut acc = self.intercept().clone();
        for (c, xi) in self.linear().iter().zip(x) {
            if !c.is_zero() && !xi.is_zero() {
                acc += c * xi;
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &DualPoint) -> DualPoint {
        debug_assert_eq!(self.dim(), other.dim());
        DualPoint::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn scale(&self, factor: &Scalar) -> DualPoint {
        DualPoint::new(self.coords.iter().map(|c| c * factor).collect())
    }
}

impl fmt::Debug for DualPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", format_scalar(c))?;
        }
        write!(f, ")")
    }
}

/// A finite set of dual points, kept deduplicated and in canonical
/// (lexicographic) order so that set equality is plain `==`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PointSet {
    points: Vec<DualPoint>,
}

impl PointSet {
    pub fn new(mut points: Vec<DualPoint>) -> Result<Self> {
        if let Some(first) = points.first() {
            let dim = first.dim();
            if points.iter().any(|p| p.dim() != dim) {
                return Err(Error::DimensionMismatch(
                    "point set mixes ambient dimensions".into(),
                ));
            }
        }
        points.sort_unstable();
        points.dedup();
        Ok(PointSet { points })
    }

    pub fn singleton(p: DualPoint) -> Self {
        PointSet { points: vec![p] }
    }

    /// Parses rows of i64 coordinates; test convenience.
    pub fn from_rows(rows: &[&[i64]]) -> Self {
        Self::new(rows.iter().map(|r| DualPoint::from_i64(r)).collect()).unwrap()
    }

    pub fn points(&self) -> &[DualPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient dual dimension, if the set is nonempty.
    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.dim())
    }

    pub fn contains(&self, p: &DualPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    fn check_same_dim(&self, other: &PointSet) -> Result<()> {
        match (self.dim(), other.dim()) {
            (Some(a), Some(b)) if a != b => Err(Error::DimensionMismatch(format!(
                "point sets of ambient dimension {a} and {b}"
            ))),
            _ => Ok(()),
        }
    }
}

/// `max { aᵀx + b | (a,b) ∈ S }`, exactly.
pub fn eval_max(set: &PointSet, x: &[Scalar]) -> Result<Scalar> {
    let mut best: Option<Scalar> = None;
    for p in set.points() {
        let v = p.eval(x)?;
        best = Some(match best {
            None => v,
            Some(b) => b.max(v),
        });
    }
    best.ok_or(Error::EmptyPointSet("eval_max"))
}

/// `{ λ·s | s ∈ S }` for `λ ≥ 0`. Negative coefficients are handled by the
/// positive/negative matrix split and are rejected here.
pub fn scalar_mul(factor: &Scalar, set: &PointSet) -> Result<PointSet> {
    if factor < &Scalar::zero() {
        return Err(Error::NegativeScale);
    }
    PointSet::new(set.points().iter().map(|p| p.scale(factor)).collect())
}

/// Minkowski sum `{ x + y | x ∈ X, y ∈ Y }`, deduplicated.
pub fn minkowski_sum(x: &PointSet, y: &PointSet) -> Result<PointSet> {
    x.check_same_dim(y)?;
    let mut out = Vec::with_capacity(x.len() * y.len());
    for p in x.points() {
        for q in y.points() {
            out.push(p.add(q));
        }
    }
    PointSet::new(out)
}

/// Plain set union, deduplicated. Dual to the pointwise max.
pub fn union(x: &PointSet, y: &PointSet) -> Result<PointSet> {
    x.check_same_dim(y)?;
    let mut out = x.points().to_vec();
    out.extend_from_slice(y.points());
    PointSet::new(out)
}

/// An ordered tuple of point sets; the dual of a vector-valued CPA function.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointSetVector {
    entries: Vec<PointSet>,
}

impl PointSetVector {
    pub fn new(entries: Vec<PointSet>) -> Result<Self> {
        let mut dim = None;
        for e in &entries {
            match (dim, e.dim()) {
                (None, d) => dim = d,
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::DimensionMismatch(
                        "point-set vector mixes ambient dimensions".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(PointSetVector { entries })
    }

    pub fn entries(&self) -> &[PointSet] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.entries.iter().find_map(|e| e.dim())
    }
}

/// A dense matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = Scalar::from_integer(1.into());
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| Scalar::from_integer(v.into())))
            .collect();
        Matrix::new(r, c, data).unwrap()
    }

    pub fn from_f64(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        let data = data
            .iter()
            .map(|&v| scalar_from_f64(v))
            .collect::<Result<Vec<_>>>()?;
        Matrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Splits into the positive and negative parts `A = A⁺ − A⁻`,
    /// both entrywise non-negative.
    pub fn split_pos_neg(&self) -> (Matrix, Matrix) {
        let zero = Scalar::zero();
        let mut pos = Matrix::zeros(self.rows, self.cols);
        let mut neg = Matrix::zeros(self.rows, self.cols);
        for (k, v) in self.data.iter().enumerate() {
            if *v > zero {
                pos.data[k] = v.clone();
            } else if *v < zero {
                neg.data[k] = -v.clone();
            }
        }
        (pos, neg)
    }

    fn check_non_negative(&self) -> Result<()> {
        let zero = Scalar::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if *self.get(i, j) < zero {
                    return Err(Error::NegativeEntry { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        *out.get_mut(i, j) += a * b;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Minkowski matrix product `(A ⊗ X)_i = ⊕_j A_ij · X_j` for a non-negative
/// matrix `A`. Dual to applying `A` to the vector of max-functions.
pub fn minkowski_matrix_product(a: &Matrix, x: &PointSetVector) -> Result<PointSetVector> {
    a.check_non_negative()?;
    if a.cols() != x.len() {
        return Err(Error::ShapeMismatch(format!(
            "matrix has {} columns but vector has {} entries",
            a.cols(),
            x.len()
        )));
    }
    let dim = x
        .dim()
        .ok_or(Error::EmptyPointSet("minkowski_matrix_product"))?;
    let mut rows = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let mut acc = PointSet::singleton(DualPoint::origin(dim));
        for j in 0..a.cols() {
            let scaled = scalar_mul(a.get(i, j), &x.entries()[j])?;
            acc = minkowski_sum(&acc, &scaled)?;
        }
        rows.push(acc);
    }
    PointSetVector::new(rows)
}
