//! A small exact simplex solver over rationals.
//!
//! Sized for activation-region feasibility tests: a handful of free
//! variables against some tens of constraints. Two phases with Bland's
//! rule, so it terminates on every input and never cycles; all pivots are
//! exact rational arithmetic.

use num_traits::{One, Signed, Zero};

use crate::geometry::scalar::Scalar;

/// Outcome of `maximize`.
#[derive(Clone, Debug)]
pub enum LpOutcome {
    /// Optimal value and a maximizing assignment of the original variables.
    Optimal { value: Scalar, point: Vec<Scalar> },
    Unbounded,
    Infeasible,
}

/// A linear program over free variables `x`:
/// maximize `c · x` subject to `a_i · x <= b_i` and `e_j · x == f_j`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Scalar>,
    pub leq: Vec<(Vec<Scalar>, Scalar)>,
    pub eq: Vec<(Vec<Scalar>, Scalar)>,
}

impl LinearProgram {
    pub fn new(num_vars: usize, objective: Vec<Scalar>) -> Self {
        assert_eq!(objective.len(), num_vars);
        LinearProgram {
            num_vars,
            objective,
            leq: Vec::new(),
            eq: Vec::new(),
        }
    }

    pub fn less_eq(&mut self, coeffs: Vec<Scalar>, rhs: Scalar) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.leq.push((coeffs, rhs));
    }

    pub fn equal(&mut self, coeffs: Vec<Scalar>, rhs: Scalar) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.eq.push((coeffs, rhs));
    }

    /// Solves by the standard split `x = u − v` with `u, v ≥ 0`, slack
    /// variables on inequalities and a phase-one artificial basis.
    pub fn maximize(&self) -> LpOutcome {
        let n_free = self.num_vars;
        let n_split = 2 * n_free;
        let n_slack = self.leq.len();
        let m = self.leq.len() + self.eq.len();
        let n_total = n_split + n_slack + m; // artificials last

        // rows: [u coeffs | v coeffs | slack | artificial] = rhs, rhs >= 0
        let mut a = vec![vec![Scalar::zero(); n_total]; m];
        let mut rhs = vec![Scalar::zero(); m];
        for (r, (coeffs, b)) in self.leq.iter().chain(self.eq.iter()).enumerate() {
            for (j, cj) in coeffs.iter().enumerate() {
                a[r][j] = cj.clone();
                a[r][n_free + j] = -cj.clone();
            }
            if r < n_slack {
                a[r][n_split + r] = Scalar::one();
            }
            rhs[r] = b.clone();
            if rhs[r].is_negative() {
                rhs[r] = -rhs[r].clone();
                for v in a[r].iter_mut() {
                    *v = -v.clone();
                }
            }
            a[r][n_split + n_slack + r] = Scalar::one();
        }

        let mut basis: Vec<usize> = (0..m).map(|r| n_split + n_slack + r).collect();

        // phase one: minimize the sum of artificials
        let mut phase1 = vec![Scalar::zero(); n_total];
        for v in phase1.iter_mut().skip(n_split + n_slack) {
            *v = -Scalar::one();
        }
        let value = simplex(&mut a, &mut rhs, &mut basis, &phase1, n_total);
        match value {
            Some(v) if v.is_zero() => {}
            Some(_) => return LpOutcome::Infeasible,
            None => unreachable!("phase one is bounded by zero"),
        }
        // drive remaining artificials out of the basis
        for r in 0..m {
            if basis[r] >= n_split + n_slack {
                if let Some(j) = (0..n_split + n_slack).find(|&j| !a[r][j].is_zero()) {
                    pivot(&mut a, &mut rhs, &mut basis, r, j);
                }
                // a fully zero row is a redundant constraint; harmless
            }
        }

        // phase two on the real objective (artificials forbidden)
        let mut obj = vec![Scalar::zero(); n_total];
        for (j, cj) in self.objective.iter().enumerate() {
            obj[j] = cj.clone();
            obj[n_free + j] = -cj.clone();
        }
        let Some(value) = simplex(&mut a, &mut rhs, &mut basis, &obj, n_split + n_slack) else {
            return LpOutcome::Unbounded;
        };

        let mut point = vec![Scalar::zero(); n_free];
        for (r, &b) in basis.iter().enumerate() {
            if b < n_free {
                point[b] += &rhs[r];
            } else if b < n_split {
                point[b - n_free] -= &rhs[r];
            }
        }
        LpOutcome::Optimal { value, point }
    }
}

/// Maximizes `obj` over the current basic feasible tableau; columns at or
/// beyond `allowed` never enter. Returns the optimum, `None` if unbounded.
fn simplex(
    a: &mut [Vec<Scalar>],
    rhs: &mut [Scalar],
    basis: &mut [usize],
    obj: &[Scalar],
    allowed: usize,
) -> Option<Scalar> {
    let m = a.len();
    loop {
        // reduced costs via the basic solution: c_j - c_B · B^-1 A_j
        let mut entering = None;
        for j in 0..allowed {
            if basis.contains(&j) {
                continue;
            }
            let mut red = obj[j].clone();
            for r in 0..m {
                if !obj[basis[r]].is_zero() && !a[r][j].is_zero() {
                    red -= &obj[basis[r]] * &a[r][j];
                }
            }
            if red.is_positive() {
                entering = Some(j); // Bland: first improving index
                break;
            }
        }
        let Some(j) = entering else {
            let mut value = Scalar::zero();
            for r in 0..m {
                if !obj[basis[r]].is_zero() {
                    value += &obj[basis[r]] * &rhs[r];
                }
            }
            return Some(value);
        };

        // ratio test, Bland ties by smallest basis index
        let mut leave: Option<(usize, Scalar)> = None;
        for r in 0..m {
            if a[r][j].is_positive() {
                let ratio = &rhs[r] / &a[r][j];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return None; // unbounded along the entering column
        };
        pivot(a, rhs, basis, r, j);
    }
}

fn pivot(a: &mut [Vec<Scalar>], rhs: &mut [Scalar], basis: &mut [usize], r: usize, j: usize) {
    let m = a.len();
    let p = a[r][j].clone();
    for v in a[r].iter_mut() {
        *v /= &p;
    }
    rhs[r] /= &p;
    for i in 0..m {
        if i != r && !a[i][j].is_zero() {
            let f = a[i][j].clone();
            let (row_r, row_i) = if i < r {
                let (lo, hi) = a.split_at_mut(r);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = a.split_at_mut(i);
                (&lo[r], &mut hi[0])
            };
            for (vi, vr) in row_i.iter_mut().zip(row_r.iter()) {
                if !vr.is_zero() {
                    *vi -= &f * vr;
                }
            }
            let sub = &f * &rhs[r];
            rhs[i] -= sub;
        }
    }
    basis[r] = j;
}

/// Maximal uniform slack of a strict system: the optimum of
/// `max s  s.t.  a_i · x + b_i ≥ s, s ≤ cap` (optionally with equality
/// side conditions). Positive iff the open region `{a_i · x + b_i > 0}`
/// (intersected with the equalities) is nonempty, in which case `point`
/// is a strictly interior witness.
pub fn max_slack(
    num_vars: usize,
    constraints: &[(Vec<Scalar>, Scalar)],
    equalities: &[(Vec<Scalar>, Scalar)],
    cap: Scalar,
) -> Option<(Scalar, Vec<Scalar>)> {
    // variables: (x, s)
    let mut obj = vec![Scalar::zero(); num_vars + 1];
    obj[num_vars] = Scalar::one();
    let mut lp = LinearProgram::new(num_vars + 1, obj);
    for (a, b) in constraints {
        // s − a·x ≤ b
        let mut row: Vec<Scalar> = a.iter().map(|v| -v.clone()).collect();
        row.push(Scalar::one());
        lp.less_eq(row, b.clone());
    }
    let mut cap_row = vec![Scalar::zero(); num_vars + 1];
    cap_row[num_vars] = Scalar::one();
    lp.less_eq(cap_row, cap);
    for (e, f) in equalities {
        let mut row = e.clone();
        row.push(Scalar::zero());
        lp.equal(row, -f.clone());
    }
    match lp.maximize() {
        LpOutcome::Optimal { value, mut point } => {
            point.truncate(num_vars);
            Some((value, point))
        }
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("slack is capped above"),
    }
}
