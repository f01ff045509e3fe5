//! Exact revised simplex with a dense rational basis inverse.
//!
//! Entering columns follow the largest-reduced-cost rule and switch to
//! Bland's rule after a run of degenerate pivots, which rules out cycling.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Basis, Scaled};
use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, Rational};

const DEGENERATE_STREAK_BEFORE_BLAND: usize = 32;

pub(super) struct Simplex<'a> {
    p: &'a Scaled,
    basis: Vec<usize>,
    /// binv[c][r] = (B^-1)[r][c]
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
    pivots: usize,
}

impl<'a> Simplex<'a> {
    pub(super) fn new(p: &'a Scaled) -> Self {
        let (m, n) = (p.m, p.n());
        Simplex {
            p,
            basis: (n..n + m).collect(),
            binv: (0..m)
                .map(|c| (0..m).map(|r| if r == c { Rational::one() } else { Rational::zero() }).collect())
                .collect(),
            xb: p.rhs.clone(),
            pivots: 0,
        }
    }

    fn n(&self) -> usize {
        self.p.n()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n()
    }

    /// `B^-1 a_j`.
    fn ftran(&self, j: usize) -> Vec<Rational> {
        let mut u = vec![Rational::zero(); self.p.m];
        if self.is_artificial(j) {
            u.clone_from(&self.binv[j - self.n()]);
            return u;
        }
        self.p.columns[j].for_each(|row, a| {
            let a = Rational::from_integer(a);
            for (i, v) in self.binv[row].iter().enumerate() {
                if !v.is_zero() {
                    u[i] += v * &a;
                }
            }
        });
        u
    }

    fn row_of_binv(&self, r: usize) -> Vec<Rational> {
        self.binv.iter().map(|col| col[r].clone()).collect()
    }

    fn duals(&self, cost_of: &impl Fn(usize) -> BigInt) -> Vec<Rational> {
        let cb: Vec<Rational> = self.basis.iter().map(|&j| Rational::from_integer(cost_of(j))).collect();
        self.binv
            .iter()
            .map(|col| {
                col.iter()
                    .zip(&cb)
                    .filter(|(v, c)| !v.is_zero() && !c.is_zero())
                    .map(|(v, c)| v * c)
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, j: usize, u: &[Rational]) {
        let ur = u[r].clone();
        let theta = &self.xb[r] / &ur;
        for i in 0..self.p.m {
            if i != r && !u[i].is_zero() {
                let d = &u[i] * &theta;
                self.xb[i] -= d;
            }
        }
        self.xb[r] = theta;
        let nz: Vec<usize> = (0..self.p.m).filter(|&i| i != r && !u[i].is_zero()).collect();
        for col in self.binv.iter_mut() {
            if col[r].is_zero() {
                continue;
            }
            let t = &col[r] / &ur;
            for &i in &nz {
                let d = &u[i] * &t;
                col[i] -= d;
            }
            col[r] = t;
        }
        self.basis[r] = j;
        self.pivots += 1;
    }

    /// Ratio test. Ties go to artificials first, then the lowest index; under
    /// Bland's rule strictly the lowest index.
    fn leaving_row(&self, u: &[Rational], bland: bool) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..self.p.m {
            if !u[i].is_positive() {
                continue;
            }
            let ratio = &self.xb[i] / &u[i];
            let better = match &best {
                None => true,
                Some((bi, br)) => {
                    ratio < *br || (ratio == *br && self.leave_key(i, bland) < self.leave_key(*bi, bland))
                }
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    fn leave_key(&self, row: usize, bland: bool) -> (bool, usize) {
        let j = self.basis[row];
        (!bland && !self.is_artificial(j), j)
    }

    /// Runs simplex iterations for the given cost until optimal.
    fn optimize(&mut self, cost_of: impl Fn(usize) -> BigInt) -> Result<()> {
        let mut streak = 0usize;
        loop {
            let y = self.duals(&cost_of);
            let den = lcm_of_denominators(y.iter());
            let y_int: Vec<BigInt> = y
                .iter()
                .map(|v| (v * Rational::from_integer(den.clone())).to_integer())
                .collect();
            let bland = streak >= DEGENERATE_STREAK_BEFORE_BLAND;
            let mut entering: Option<(usize, BigInt)> = None;
            for j in 0..self.n() {
                let scaled = cost_of(j) * &den - self.p.columns[j].dot_int(&y_int);
                if !scaled.is_positive() {
                    continue;
                }
                match &entering {
                    Some((_, best)) if scaled <= *best => {}
                    _ => entering = Some((j, scaled)),
                }
                if bland {
                    break;
                }
            }
            let Some((j, _)) = entering else {
                return Ok(());
            };
            let u = self.ftran(j);
            let r = self.leaving_row(&u, bland).ok_or(Error::Unbounded)?;
            if self.xb[r].is_zero() {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, j, &u);
        }
    }

    pub(super) fn run(mut self) -> Result<Basis> {
        let n = self.n();
        // phase 1: maximize -(sum of artificials)
        self.optimize(|j| if j >= n { -BigInt::one() } else { BigInt::zero() })?;
        let infeasible = self
            .basis
            .iter()
            .zip(&self.xb)
            .any(|(&j, v)| j >= n && v.is_positive());
        if infeasible {
            return Err(Error::Infeasible);
        }
        self.drive_out_artificials();

        let p = self.p;
        let cost = &p.cost;
        let cost_of = |j: usize| if j >= n { BigInt::zero() } else { cost[j].clone() };
        self.optimize(cost_of)?;
        let y = self.duals(&cost_of);
        Ok(Basis { basis: self.basis, xb: self.xb, y, pivots: self.pivots })
    }

    /// Replaces zero-level artificials with real columns where the row is not
    /// redundant.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.p.m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row = self.row_of_binv(r);
            let found = (0..self.n())
                .find(|&j| !self.basis.contains(&j) && !self.p.columns[j].dot_rat(&row).is_zero());
            if let Some(j) = found {
                let u = self.ftran(j);
                self.pivot(r, j, &u);
            }
        }
    }
}
