//! Floating-point revised simplex used to find a candidate optimal basis.
//!
//! Nothing computed here is trusted: the basis it returns is re-solved and
//! checked exactly before any result is reported.

use num_traits::ToPrimitive;

use super::Scaled;
use crate::error::{Error, Result};

const TOL_COST: f64 = 1e-9;
const TOL_PIVOT: f64 = 1e-9;
const TOL_FEAS: f64 = 1e-9;
const PERTURB: f64 = 1e-7;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_STREAK_BEFORE_BLAND: usize = 64;

pub(super) enum Outcome {
    Optimal(Vec<usize>, usize),
    /// Final phase-one basis; its duals should be a Farkas certificate.
    Infeasible(Vec<usize>),
    Unbounded,
}

struct State {
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// row-major `B^-1`
    binv: Vec<f64>,
    xb: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
    limit: usize,
}

pub(super) fn solve(p: &Scaled) -> Result<Outcome> {
    let (m, n) = (p.m, p.n());
    let mut s = State {
        m,
        n,
        cols: p.columns.iter().map(|c| c.to_f64()).collect(),
        b: p.rhs.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
        basis: (n..n + m).collect(),
        in_basis: (0..n + m).map(|j| j >= n).collect(),
        binv: identity(m),
        xb: Vec::new(),
        pivots: 0,
        since_refactor: 0,
        limit: 50_000 + 50 * (n + m),
    };
    if s.b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Exhausted("rhs out of floating-point range".into()));
    }
    // Degenerate rows stall the simplex; solve a slightly perturbed rhs
    // first, then restore it and finish from the basis reached.
    let exact_b = s.b.clone();
    let scale = s.b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    s.b = s.b.iter().enumerate().map(|(i, v)| v + PERTURB * scale * perturbation(i)).collect();
    s.xb = s.b.clone();

    let phase1: Vec<f64> = (0..n + m).map(|j| if j >= n { -1.0 } else { 0.0 }).collect();
    let mut phase2: Vec<f64> = p.cost.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    if phase2.iter().any(|v| !v.is_finite()) {
        return Err(Error::Exhausted("objective out of floating-point range".into()));
    }
    phase2.extend(std::iter::repeat(0.0).take(m));

    s.optimize(&phase1, true)?;
    if s.artificial_level() <= TOL_FEAS * scale {
        s.drive_out_artificials();
        if !s.optimize(&phase2, false)? {
            return Ok(Outcome::Unbounded);
        }
        s.b = exact_b;
        s.refactor()?;
        s.restore(&phase2, false)?;
        return Ok(Outcome::Optimal(s.basis, s.pivots));
    }
    // The perturbed problem may be infeasible where the exact one is not,
    // e.g. with redundant rows; decide on the exact rhs.
    s.b = exact_b;
    s.refactor()?;
    s.restore(&phase1, true)?;
    if s.artificial_level() > TOL_FEAS * scale {
        return Ok(Outcome::Infeasible(s.basis));
    }
    s.drive_out_artificials();
    if !s.optimize(&phase2, false)? {
        return Ok(Outcome::Unbounded);
    }
    Ok(Outcome::Optimal(s.basis, s.pivots))
}

/// Deterministic pseudo-random weight in `[1, 2)` for row `i`.
fn perturbation(i: usize) -> f64 {
    1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_895).fract()
}

fn identity(m: usize) -> Vec<f64> {
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    v
}

impl State {
    fn artificial_level(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(&j, _)| j >= self.n)
            .map(|(_, v)| v.abs())
            .sum()
    }

    fn column(&self, j: usize) -> std::borrow::Cow<'_, [(usize, f64)]> {
        if j >= self.n {
            std::borrow::Cow::Owned(vec![(j - self.n, 1.0)])
        } else {
            std::borrow::Cow::Borrowed(&self.cols[j])
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &j) in self.basis.iter().enumerate() {
            let c = cost[j];
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, bk) in y.iter_mut().zip(row) {
                    *yk += c * bk;
                }
            }
        }
        y
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let col = self.column(j);
        (0..m)
            .map(|i| {
                let row = &self.binv[i * m..(i + 1) * m];
                col.iter().map(|&(r, a)| row[r] * a).sum()
            })
            .collect()
    }

    /// Returns `false` when the problem is unbounded in the current phase.
    /// Entering columns are priced with Devex reference weights.
    fn optimize(&mut self, cost: &[f64], allow_artificial: bool) -> Result<bool> {
        let mut streak = 0usize;
        let candidates = if allow_artificial { self.n + self.m } else { self.n };
        let mut weight = vec![1.0f64; self.n + self.m];
        loop {
            if self.pivots > self.limit {
                return Err(Error::Exhausted("floating-point simplex iteration limit".into()));
            }
            let y = self.duals(cost);
            let bland = streak >= DEGENERATE_STREAK_BEFORE_BLAND;
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..candidates {
                if self.in_basis[j] {
                    continue;
                }
                let d = cost[j] - self.column(j).iter().map(|&(r, a)| y[r] * a).sum::<f64>();
                if d <= TOL_COST {
                    continue;
                }
                let score = d * d / weight[j];
                if entering.map_or(true, |(_, best)| score > best) {
                    entering = Some((j, score));
                }
                if bland {
                    break;
                }
            }
            let Some((q, _)) = entering else {
                return Ok(true);
            };
            let u = self.ftran(q);
            let Some(r) = self.leaving_row(&u, bland) else {
                return Ok(false);
            };
            if self.xb[r] <= TOL_FEAS {
                streak += 1;
            } else {
                streak = 0;
            }
            let m = self.m;
            let rho = &self.binv[r * m..(r + 1) * m];
            let wq = weight[q];
            let aq = u[r];
            for j in 0..candidates {
                if self.in_basis[j] || j == q {
                    continue;
                }
                let arj: f64 = self.column(j).iter().map(|&(k, a)| rho[k] * a).sum();
                if arj != 0.0 {
                    let ratio = arj / aq;
                    weight[j] = weight[j].max(ratio * ratio * wq);
                }
            }
            let leaving = self.basis[r];
            weight[leaving] = (wq / (aq * aq)).max(1.0);
            self.pivot(r, q, &u)?;
        }
    }

    /// After a change of rhs: dual simplex pivots until the basis is primal
    /// feasible again, then primal pivots until it is optimal.
    fn restore(&mut self, cost: &[f64], allow_artificial: bool) -> Result<()> {
        let m = self.m;
        let candidates = if allow_artificial { self.n + self.m } else { self.n };
        loop {
            if self.pivots > self.limit {
                return Err(Error::Exhausted("floating-point simplex iteration limit".into()));
            }
            let Some(r) = (0..m)
                .filter(|&i| self.xb[i] < -TOL_FEAS)
                .min_by(|&a, &b| self.xb[a].total_cmp(&self.xb[b]))
            else {
                break;
            };
            let y = self.duals(cost);
            let rho = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64, f64)> = None;
            for j in 0..candidates {
                if self.in_basis[j] {
                    continue;
                }
                let col = self.column(j);
                let alpha: f64 = col.iter().map(|&(k, a)| rho[k] * a).sum();
                if alpha >= -TOL_PIVOT {
                    continue;
                }
                let d = cost[j] - col.iter().map(|&(k, a)| y[k] * a).sum::<f64>();
                let ratio = d.min(0.0) / alpha;
                let better = match best {
                    None => true,
                    Some((_, br, ba)) => ratio < br - TOL_COST || (ratio <= br + TOL_COST && alpha < ba),
                };
                if better {
                    best = Some((j, ratio, alpha));
                }
            }
            let Some((j, _, _)) = best else {
                return Err(Error::Exhausted("dual simplex found no pivot".into()));
            };
            let u = self.ftran(j);
            self.pivot(r, j, &u)?;
        }
        if !self.optimize(cost, allow_artificial)? {
            return Err(Error::Exhausted("unbounded after restoring the rhs".into()));
        }
        Ok(())
    }

    /// Two-pass ratio test: find the smallest relaxed ratio, then among rows
    /// within it prefer the largest pivot (or the lowest index under Bland).
    fn leaving_row(&self, u: &[f64], bland: bool) -> Option<usize> {
        let mut bound = f64::INFINITY;
        for i in 0..self.m {
            if u[i] > TOL_PIVOT {
                bound = bound.min((self.xb[i].max(0.0) + TOL_FEAS) / u[i]);
            }
        }
        if bound.is_infinite() {
            return None;
        }
        let mut best: Option<usize> = None;
        for i in 0..self.m {
            if u[i] <= TOL_PIVOT || self.xb[i].max(0.0) / u[i] > bound {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) if bland => self.basis[i] < self.basis[b],
                Some(b) => u[i] > u[b] || (u[i] == u[b] && self.basis[i] < self.basis[b]),
            };
            if better {
                best = Some(i);
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, j: usize, u: &[f64]) -> Result<()> {
        let m = self.m;
        let theta = self.xb[r] / u[r];
        for i in 0..m {
            if i != r && u[i] != 0.0 {
                self.xb[i] -= u[i] * theta;
            }
        }
        self.xb[r] = theta;
        let inv = 1.0 / u[r];
        let row_r: Vec<f64> = self.binv[r * m..(r + 1) * m].iter().map(|v| v * inv).collect();
        for i in 0..m {
            if i == r || u[i] == 0.0 {
                continue;
            }
            let f = u[i];
            let row = &mut self.binv[i * m..(i + 1) * m];
            for (v, w) in row.iter_mut().zip(&row_r) {
                *v -= f * w;
            }
        }
        self.binv[r * m..(r + 1) * m].copy_from_slice(&row_r);
        self.in_basis[self.basis[r]] = false;
        self.in_basis[j] = true;
        self.basis[r] = j;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    /// Recomputes `B^-1` and the basic values from scratch.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (c, &j) in self.basis.iter().enumerate() {
            for &(r, v) in self.column(j).iter() {
                a[r * m + c] = v;
            }
        }
        let mut inv = identity(m);
        for c in 0..m {
            let piv = (c..m)
                .max_by(|&x, &y| a[x * m + c].abs().total_cmp(&a[y * m + c].abs()))
                .unwrap();
            if a[piv * m + c].abs() < 1e-12 {
                return Err(Error::Exhausted("singular floating-point basis".into()));
            }
            if piv != c {
                for k in 0..m {
                    a.swap(piv * m + k, c * m + k);
                    inv.swap(piv * m + k, c * m + k);
                }
            }
            let d = 1.0 / a[c * m + c];
            for k in 0..m {
                a[c * m + k] *= d;
                inv[c * m + k] *= d;
            }
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = a[r * m + c];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    a[r * m + k] -= f * a[c * m + k];
                    inv[r * m + k] -= f * inv[c * m + k];
                }
            }
        }
        self.binv = inv;
        self.xb = (0..m)
            .map(|i| {
                let row = &self.binv[i * m..(i + 1) * m];
                row.iter().zip(&self.b).map(|(x, y)| x * y).sum::<f64>()
            })
            .collect();
        self.since_refactor = 0;
        Ok(())
    }

    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if self.basis[r] < self.n {
                continue;
            }
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let found = (0..self.n).filter(|&j| !self.in_basis[j]).find(|&j| {
                let v: f64 = self.cols[j].iter().map(|&(k, a)| row[k] * a).sum();
                v.abs() > 1e-7
            });
            if let Some(j) = found {
                let u = self.ftran(j);
                if self.pivot(r, j, &u).is_err() {
                    return;
                }
            }
        }
    }
}
