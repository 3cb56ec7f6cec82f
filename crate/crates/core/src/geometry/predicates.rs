//! Exact geometric predicates over homogeneous integer coordinates.
//!
//! Hull construction never compares floats. Every dual point is lifted once
//! to homogeneous integer coordinates `(num..., den)` with `den > 0`; all
//! orientation and side-of-plane tests are then integer determinant signs.
//! A conservative floating-point filter answers the generic cases quickly
//! and falls back to exact `BigInt` arithmetic whenever the approximate
//! value is within the error bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::geometry::dual::DualPoint;

/// Relative error margin for the float filter. The true rounding error of
/// the filtered expressions is below 2^-45 of the accumulated magnitude;
/// 2^-38 leaves two orders of magnitude of slack.
const FILTER_EPS: f64 = 3.6e-12; // 2^-38

/// A dual point in homogeneous integer coordinates.
#[derive(Clone, Debug)]
pub struct HPoint {
    pub num: Vec<BigInt>,
    pub den: BigInt,
    pub approx: Vec<f64>,
}

fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    let bn = n.bits();
    let bd = d.bits();
    if bn <= 900 && bd <= 900 {
        let nf = n.to_f64().unwrap_or(f64::NAN);
        let df = d.to_f64().unwrap_or(f64::NAN);
        return nf / df;
    }
    let shift = bn.max(bd).saturating_sub(512);
    let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
    nf / df
}

impl HPoint {
    pub fn from_dual(p: &DualPoint) -> HPoint {
        let mut den = BigInt::from(1u8);
        for c in p.coords() {
            den = den.lcm(c.denom());
        }
        let num: Vec<BigInt> = p
            .coords()
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let approx = num.iter().map(|n| ratio_to_f64(n, &den)).collect();
        HPoint { num, den, approx }
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }
}

fn sign_of(v: &BigInt) -> i8 {
    match v.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

fn filtered(approx: f64, magnitude: f64, exact: impl FnOnce() -> BigInt) -> i8 {
    let bound = magnitude * FILTER_EPS;
    if approx.is_finite() && magnitude.is_finite() {
        if approx > bound {
            return 1;
        }
        if approx < -bound {
            return -1;
        }
    }
    sign_of(&exact())
}

/// Homogeneous difference `q - p` along coordinate `i`, scaled by the
/// positive factor `p.den * q.den`.
fn hdiff(p: &HPoint, q: &HPoint, i: usize) -> BigInt {
    &q.num[i] * &p.den - &p.num[i] * &q.den
}

fn det2(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> BigInt {
    a * d - b * c
}

fn det3(m: &[[BigInt; 3]; 3]) -> BigInt {
    &m[0][0] * det2(&m[1][1], &m[1][2], &m[2][1], &m[2][2])
        - &m[0][1] * det2(&m[1][0], &m[1][2], &m[2][0], &m[2][2])
        + &m[0][2] * det2(&m[1][0], &m[1][1], &m[2][0], &m[2][1])
}

/// Sign of the 2D cross product `(q - p) × (r - p)` using coordinate axes
/// `(ax0, ax1)`: positive for a counterclockwise turn.
pub fn orient2_axes(p: &HPoint, q: &HPoint, r: &HPoint, ax0: usize, ax1: usize) -> i8 {
    let a = [
        q.approx[ax0] - p.approx[ax0],
        q.approx[ax1] - p.approx[ax1],
        r.approx[ax0] - p.approx[ax0],
        r.approx[ax1] - p.approx[ax1],
    ];
    let m = [
        q.approx[ax0].abs() + p.approx[ax0].abs(),
        q.approx[ax1].abs() + p.approx[ax1].abs(),
        r.approx[ax0].abs() + p.approx[ax0].abs(),
        r.approx[ax1].abs() + p.approx[ax1].abs(),
    ];
    let approx = a[0] * a[3] - a[1] * a[2];
    let magnitude = m[0] * m[3] + m[1] * m[2];
    filtered(approx, magnitude, || {
        det2(
            &hdiff(p, q, ax0),
            &hdiff(p, q, ax1),
            &hdiff(p, r, ax0),
            &hdiff(p, r, ax1),
        )
    })
}

pub fn orient2(p: &HPoint, q: &HPoint, r: &HPoint) -> i8 {
    orient2_axes(p, q, r, 0, 1)
}

/// Sign of `det [q-p; r-p; s-p]` in ambient dimension 3.
pub fn orient3(p: &HPoint, q: &HPoint, r: &HPoint, s: &HPoint) -> i8 {
    let rows_f: Vec<[f64; 3]> = [q, r, s]
        .iter()
        .map(|t| {
            [
                t.approx[0] - p.approx[0],
                t.approx[1] - p.approx[1],
                t.approx[2] - p.approx[2],
            ]
        })
        .collect();
    let rows_m: Vec<[f64; 3]> = [q, r, s]
        .iter()
        .map(|t| {
            [
                t.approx[0].abs() + p.approx[0].abs(),
                t.approx[1].abs() + p.approx[1].abs(),
                t.approx[2].abs() + p.approx[2].abs(),
            ]
        })
        .collect();
    let approx = rows_f[0][0] * (rows_f[1][1] * rows_f[2][2] - rows_f[1][2] * rows_f[2][1])
        - rows_f[0][1] * (rows_f[1][0] * rows_f[2][2] - rows_f[1][2] * rows_f[2][0])
        + rows_f[0][2] * (rows_f[1][0] * rows_f[2][1] - rows_f[1][1] * rows_f[2][0]);
    let magnitude = rows_m[0][0] * (rows_m[1][1] * rows_m[2][2] + rows_m[1][2] * rows_m[2][1])
        + rows_m[0][1] * (rows_m[1][0] * rows_m[2][2] + rows_m[1][2] * rows_m[2][0])
        + rows_m[0][2] * (rows_m[1][0] * rows_m[2][1] + rows_m[1][1] * rows_m[2][0]);
    filtered(approx, magnitude, || {
        let m = [
            [hdiff(p, q, 0), hdiff(p, q, 1), hdiff(p, q, 2)],
            [hdiff(p, r, 0), hdiff(p, r, 1), hdiff(p, r, 2)],
            [hdiff(p, s, 0), hdiff(p, s, 1), hdiff(p, s, 2)],
        ];
        det3(&m)
    })
}

/// Compares coordinate `axis` of two homogeneous points.
pub fn cmp_coord(p: &HPoint, q: &HPoint, axis: usize) -> Ordering {
    let s = filtered(
        p.approx[axis] - q.approx[axis],
        p.approx[axis].abs() + q.approx[axis].abs(),
        || &p.num[axis] * &q.den - &q.num[axis] * &p.den,
    );
    match s {
        -1 => Ordering::Less,
        0 => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

/// An oriented plane `n · z = c` in ambient dimension 3 with integer
/// coefficients; `eval > 0` is the positive (outside) half-space.
#[derive(Clone, Debug)]
pub struct IPlane {
    pub n: [BigInt; 3],
    pub c: BigInt,
    nf: [f64; 3],
    cf: f64,
}

impl IPlane {
    /// Plane through three homogeneous points, oriented so that `orient > 0`
    /// points (in the sense of `orient3(p, q, r, ·)`) evaluate positive.
    pub fn through(p: &HPoint, q: &HPoint, r: &HPoint) -> IPlane {
        // normal = (q - p) × (r - p), dropping the positive denominators
        let d1 = [hdiff(p, q, 0), hdiff(p, q, 1), hdiff(p, q, 2)];
        let d2 = [hdiff(p, r, 0), hdiff(p, r, 1), hdiff(p, r, 2)];
        let n = [
            det2(&d1[1], &d1[2], &d2[1], &d2[2]),
            -det2(&d1[0], &d1[2], &d2[0], &d2[2]),
            det2(&d1[0], &d1[1], &d2[0], &d2[1]),
        ];
        // c = n · p, scaled by p.den so everything stays integral:
        // store the pair (n * p.den, n · p.num) which defines the same plane.
        let c = &n[0] * &p.num[0] + &n[1] * &p.num[1] + &n[2] * &p.num[2];
        let n = [&n[0] * &p.den, &n[1] * &p.den, &n[2] * &p.den];
        IPlane::from_parts(n, c)
    }

    fn from_parts(mut n: [BigInt; 3], mut c: BigInt) -> IPlane {
        // reduce by the gcd to keep magnitudes small across merges
        let mut g = n[0].gcd(&n[1]).gcd(&n[2]).gcd(&c);
        if g.is_zero() {
            g = BigInt::from(1u8);
        }
        for ni in n.iter_mut() {
            *ni /= &g;
        }
        c /= &g;
        let nf = [
            ratio_to_f64(&n[0], &BigInt::from(1u8)),
            ratio_to_f64(&n[1], &BigInt::from(1u8)),
            ratio_to_f64(&n[2], &BigInt::from(1u8)),
        ];
        let cf = ratio_to_f64(&c, &BigInt::from(1u8));
        IPlane { n, c, nf, cf }
    }

    pub fn flipped(&self) -> IPlane {
        IPlane::from_parts(
            [-&self.n[0], -&self.n[1], -&self.n[2]],
            -&self.c,
        )
    }

    /// Sign of `n · t - c` for a homogeneous point `t`.
    pub fn eval_sign(&self, t: &HPoint) -> i8 {
        let terms = [
            self.nf[0] * t.approx[0],
            self.nf[1] * t.approx[1],
            self.nf[2] * t.approx[2],
            -self.cf,
        ];
        let approx = terms.iter().sum::<f64>();
        let magnitude = terms.iter().map(|v| v.abs()).sum::<f64>();
        filtered(approx, magnitude, || self.eval_exact(t))
    }

    fn eval_exact(&self, t: &HPoint) -> BigInt {
        &self.n[0] * &t.num[0] + &self.n[1] * &t.num[1] + &self.n[2] * &t.num[2]
            - &self.c * &t.den
    }

    /// Orders two points by their signed distance from the plane
    /// (monotone in the true distance since denominators are positive).
    pub fn cmp_eval(&self, a: &HPoint, b: &HPoint) -> Ordering {
        let ea = self.eval_exact(a);
        let eb = self.eval_exact(b);
        (ea * &b.den).cmp(&(eb * &a.den))
    }

    /// Whether the plane faces upward: positive last (intercept) component
    /// of the outward normal.
    pub fn is_upper(&self) -> bool {
        self.n[2].is_positive()
    }

    /// Canonical key identifying the oriented plane; coefficients are
    /// already gcd-reduced at construction.
    pub fn key(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        (
            self.n[0].clone(),
            self.n[1].clone(),
            self.n[2].clone(),
            self.c.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::scalar::scalar_ratio;

    fn hp(coords: &[(i64, i64)]) -> HPoint {
        HPoint::from_dual(&DualPoint::new(
            coords.iter().map(|&(n, d)| scalar_ratio(n, d)).collect(),
        ))
    }

    #[test]
    fn orientation_basics() {
        let p = hp(&[(0, 1), (0, 1)]);
        let q = hp(&[(1, 1), (0, 1)]);
        let r = hp(&[(0, 1), (1, 1)]);
        assert_eq!(orient2(&p, &q, &r), 1);
        assert_eq!(orient2(&p, &r, &q), -1);
        let mid = hp(&[(1, 2), (1, 2)]);
        assert_eq!(orient2(&q, &r, &mid), 0);
    }

    #[test]
    fn orient3_sign_and_degeneracy() {
        let p = hp(&[(0, 1), (0, 1), (0, 1)]);
        let q = hp(&[(1, 1), (0, 1), (0, 1)]);
        let r = hp(&[(0, 1), (1, 1), (0, 1)]);
        let above = hp(&[(0, 1), (0, 1), (1, 3)]);
        let below = hp(&[(0, 1), (0, 1), (-1, 7)]);
        let on = hp(&[(1, 3), (1, 5), (0, 1)]);
        assert_eq!(orient3(&p, &q, &r, &above), 1);
        assert_eq!(orient3(&p, &q, &r, &below), -1);
        assert_eq!(orient3(&p, &q, &r, &on), 0);
    }

    #[test]
    fn filter_falls_back_near_degeneracy() {
        // Points collinear up to 2^-80: the float filter cannot decide, the
        // exact path must. The perturbed point is barely above the line.
        let tiny = scalar_ratio(1, 1) / Scalar::from_integer(BigInt::from(2u8).pow(80));
        let p = hp(&[(0, 1), (0, 1), (0, 1)]);
        let q = hp(&[(1, 1), (0, 1), (0, 1)]);
        let r = hp(&[(0, 1), (1, 1), (0, 1)]);
        let s = HPoint::from_dual(&DualPoint::new(vec![
            scalar_ratio(1, 3),
            scalar_ratio(1, 3),
            tiny,
        ]));
        assert_eq!(orient3(&p, &q, &r, &s), 1);
    }

    #[test]
    fn plane_eval_and_orientation() {
        let p = hp(&[(0, 1), (0, 1), (0, 1)]);
        let q = hp(&[(1, 1), (0, 1), (0, 1)]);
        let r = hp(&[(0, 1), (1, 1), (0, 1)]);
        let plane = IPlane::through(&p, &q, &r);
        let above = hp(&[(1, 7), (1, 9), (5, 1)]);
        let sgn = plane.eval_sign(&above);
        // orientation of `through` matches orient3
        assert_eq!(sgn, orient3(&p, &q, &r, &above));
        assert_eq!(plane.eval_sign(&p), 0);
        // upper test: normal z-component positive after orienting upward
        let up = if plane.is_upper() { plane } else { plane.flipped() };
        assert!(up.is_upper());
    }

    use crate::geometry::scalar::Scalar;
}
