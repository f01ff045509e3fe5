//! Exact linear programming over the rationals.
//!
//! Problems are stated as `maximize c·x  s.t.  A x = b, x >= 0`. Rows are
//! rescaled internally so `A` and `c` are integral. A floating-point revised
//! simplex proposes a basis; the basis is then solved exactly by p-adic
//! lifting and its primal and dual feasibility are checked in exact
//! arithmetic, so every reported optimum carries an exact dual certificate.
//! When the floating-point pass cannot produce a certifiable basis, an exact
//! rational simplex solves the problem from scratch. All ties break on the
//! lowest index, so identical inputs always give identical bases.

mod certify;
mod exact;
mod float;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, Rational};

/// Sparse column of integer coefficients.
#[derive(Debug, Clone)]
enum Column {
    Small(Vec<(u32, i64)>),
    Big(Vec<(u32, BigInt)>),
}

impl Column {
    fn from_entries(entries: Vec<(u32, BigInt)>) -> Self {
        if entries.iter().all(|(_, v)| v.to_i64().is_some()) {
            Column::Small(entries.into_iter().map(|(r, v)| (r, v.to_i64().unwrap())).collect())
        } else {
            Column::Big(entries)
        }
    }

    fn dot_int(&self, y: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        match self {
            Column::Small(e) => {
                for &(r, v) in e {
                    let yr = &y[r as usize];
                    if yr.is_zero() {
                        continue;
                    }
                    if v == 1 {
                        acc += yr;
                    } else {
                        acc += yr * v;
                    }
                }
            }
            Column::Big(e) => {
                for (r, v) in e {
                    acc += &y[*r as usize] * v;
                }
            }
        }
        acc
    }

    fn dot_rat(&self, y: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        self.for_each(|r, v| {
            let yr = &y[r];
            if !yr.is_zero() {
                acc += yr * Rational::from_integer(v);
            }
        });
        acc
    }

    fn for_each(&self, mut f: impl FnMut(usize, BigInt)) {
        match self {
            Column::Small(e) => e.iter().for_each(|&(r, v)| f(r as usize, BigInt::from(v))),
            Column::Big(e) => e.iter().for_each(|(r, v)| f(*r as usize, v.clone())),
        }
    }

    fn to_f64(&self) -> Vec<(usize, f64)> {
        match self {
            Column::Small(e) => e.iter().map(|&(r, v)| (r as usize, v as f64)).collect(),
            Column::Big(e) => e
                .iter()
                .map(|(r, v)| (*r as usize, v.to_f64().unwrap_or(f64::MAX)))
                .collect(),
        }
    }
}

/// `maximize objective·x  s.t.  Σ_j columns[j]·x_j = rhs, x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    rhs: Vec<Rational>,
    columns: Vec<Vec<(usize, Rational)>>,
    objective: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Optimal objective value.
    pub value: Rational,
    /// Nonzero primal entries `(column, value)`, sorted by column.
    pub primal: Vec<(usize, Rational)>,
    /// Row duals `y` with `Aᵀy >= c` and `b·y = value`.
    pub dual: Vec<Rational>,
    pub basis: Vec<usize>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(rhs: Vec<Rational>) -> Self {
        LinearProgram { rhs, columns: Vec::new(), objective: Vec::new() }
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// Appends a column and returns its index.
    pub fn add_column(&mut self, entries: Vec<(usize, Rational)>, cost: Rational) -> usize {
        debug_assert!(entries.iter().all(|(r, _)| *r < self.rhs.len()));
        self.columns.push(entries);
        self.objective.push(cost);
        self.columns.len() - 1
    }

    pub fn solve_max(&self) -> Result<LpSolution> {
        Scaled::new(self).solve()
    }

    /// Minimizes by maximizing the negated objective; duals are returned for
    /// the minimization (`Aᵀy <= c`).
    pub fn solve_min(&self) -> Result<LpSolution> {
        let mut neg = self.clone();
        neg.objective.iter_mut().for_each(|c| *c = -c.clone());
        let mut sol = neg.solve_max()?;
        sol.value = -sol.value;
        sol.dual.iter_mut().for_each(|y| *y = -y.clone());
        Ok(sol)
    }

    /// Exact simplex only, skipping the floating-point pass.
    pub fn solve_max_exact(&self) -> Result<LpSolution> {
        let scaled = Scaled::new(self);
        let basis = exact::Simplex::new(&scaled).run()?;
        Ok(scaled.finish(basis))
    }
}

/// The problem with integral rows and costs and a nonnegative rhs. Basis
/// variables `>= n` are the artificial unit columns, one per row.
struct Scaled {
    m: usize,
    columns: Vec<Column>,
    cost: Vec<BigInt>,
    rhs: Vec<Rational>,
    /// original row = scaled row * row_factor
    row_factor: Vec<Rational>,
    cost_scale: Rational,
}

/// An optimal basis with exact primal values and scaled duals.
struct Basis {
    basis: Vec<usize>,
    xb: Vec<Rational>,
    y: Vec<Rational>,
    pivots: usize,
}

impl Scaled {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.rhs.len();
        let mut row_mult = vec![BigInt::one(); m];
        for col in &lp.columns {
            for (r, v) in col {
                row_mult[*r] = row_mult[*r].lcm(v.denom());
            }
        }
        let row_scale: Vec<Rational> = (0..m)
            .map(|r| {
                let s = Rational::from_integer(row_mult[r].clone());
                if lp.rhs[r].is_negative() {
                    -s
                } else {
                    s
                }
            })
            .collect();
        let columns = lp
            .columns
            .iter()
            .map(|col| {
                let mut e: Vec<(u32, BigInt)> = col
                    .iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(r, v)| (*r as u32, (v * &row_scale[*r]).to_integer()))
                    .collect();
                e.sort_by_key(|(r, _)| *r);
                Column::from_entries(e)
            })
            .collect();
        let cost_den = lcm_of_denominators(lp.objective.iter());
        let cost = lp
            .objective
            .iter()
            .map(|c| (c * Rational::from_integer(cost_den.clone())).to_integer())
            .collect();
        let rhs = lp.rhs.iter().enumerate().map(|(r, b)| b * &row_scale[r]).collect();
        Scaled {
            m,
            columns,
            cost,
            rhs,
            row_factor: row_scale,
            cost_scale: Rational::from_integer(cost_den),
        }
    }

    fn n(&self) -> usize {
        self.columns.len()
    }

    fn solve(&self) -> Result<LpSolution> {
        match float::solve(self) {
            Ok(float::Outcome::Optimal(basis, pivots)) => {
                if let Some(b) = certify::optimal(self, &basis, pivots) {
                    return Ok(self.finish(b));
                }
            }
            Ok(float::Outcome::Infeasible(basis)) => {
                if certify::infeasible(self, &basis) {
                    return Err(Error::Infeasible);
                }
            }
            Ok(float::Outcome::Unbounded) | Err(_) => {}
        }
        let basis = exact::Simplex::new(self).run()?;
        Ok(self.finish(basis))
    }

    fn finish(&self, b: Basis) -> LpSolution {
        let n = self.n();
        let dual: Vec<Rational> = b
            .y
            .iter()
            .zip(&self.row_factor)
            .map(|(y, f)| y * f / &self.cost_scale)
            .collect();
        let value_scaled = b
            .basis
            .iter()
            .zip(&b.xb)
            .filter(|(&j, _)| j < n)
            .map(|(&j, v)| v * Rational::from_integer(self.cost[j].clone()))
            .fold(Rational::zero(), |a, c| a + c);
        let mut primal: Vec<(usize, Rational)> = b
            .basis
            .iter()
            .zip(&b.xb)
            .filter(|(&j, v)| j < n && !v.is_zero())
            .map(|(&j, v)| (j, v.clone()))
            .collect();
        primal.sort_by_key(|(j, _)| *j);
        LpSolution {
            value: value_scaled / &self.cost_scale,
            primal,
            dual,
            basis: b.basis,
            pivots: b.pivots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn col(entries: &[(usize, i64)]) -> Vec<(usize, Rational)> {
        entries.iter().map(|&(r, v)| (r, int(v))).collect()
    }

    fn both(lp: &LinearProgram) -> Vec<Result<LpSolution>> {
        vec![lp.solve_max(), lp.solve_max_exact()]
    }

    #[test]
    fn small_max_problem() {
        // max x + y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let mut lp = LinearProgram::new(vec![int(4), int(6)]);
        lp.add_column(col(&[(0, 1), (1, 3)]), int(1));
        lp.add_column(col(&[(0, 2), (1, 1)]), int(1));
        lp.add_column(col(&[(0, 1)]), int(0));
        lp.add_column(col(&[(1, 1)]), int(0));
        for s in both(&lp) {
            let s = s.unwrap();
            assert_eq!(s.value, rat(14, 5));
            assert_eq!(&s.dual[0] * int(4) + &s.dual[1] * int(6), s.value);
        }
    }

    #[test]
    fn rational_entries_and_min() {
        // min x + y s.t. x/2 + y/3 = 1, x,y >= 0  -> y = 3 gives 3, x = 2 gives 2
        let mut lp = LinearProgram::new(vec![int(1)]);
        lp.add_column(vec![(0, rat(1, 2))], int(1));
        lp.add_column(vec![(0, rat(1, 3))], int(1));
        let s = lp.solve_min().unwrap();
        assert_eq!(s.value, int(2));
        assert_eq!(s.primal, vec![(0, int(2))]);
        assert_eq!(s.dual[0], int(2));
        let s = lp.solve_max().unwrap();
        assert_eq!(s.value, int(3));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![int(-1)]);
        lp.add_column(col(&[(0, 1)]), int(0));
        for s in both(&lp) {
            assert!(matches!(s, Err(Error::Infeasible)));
        }

        let mut lp = LinearProgram::new(vec![int(1)]);
        lp.add_column(col(&[(0, 1)]), int(0));
        lp.add_column(col(&[(0, 1)]), int(0));
        lp.add_column(col(&[]), int(1));
        for s in both(&lp) {
            assert!(matches!(s, Err(Error::Unbounded)));
        }
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // x + y = 1 stated twice
        let mut lp = LinearProgram::new(vec![int(1), int(1)]);
        lp.add_column(col(&[(0, 1), (1, 1)]), int(2));
        lp.add_column(col(&[(0, 1), (1, 1)]), int(1));
        for s in both(&lp) {
            let s = s.unwrap();
            assert_eq!(s.value, int(2));
            assert_eq!(&s.dual[0] + &s.dual[1], int(2));
        }
    }

    /// Max of `Q(all ones)` over pairwise-uniform laws on three bits.
    #[test]
    fn degenerate_moment_problem() {
        let n = 3;
        let rows: Vec<u64> = (0..1u64 << n).filter(|s| s.count_ones() <= 2).collect();
        let rhs = rows.iter().map(|s| rat(1, 1 << s.count_ones())).collect();
        let mut lp = LinearProgram::new(rhs);
        for x in 0..1u64 << n {
            let e = rows
                .iter()
                .enumerate()
                .filter(|(_, s)| *s & x == **s)
                .map(|(r, _)| (r, int(1)))
                .collect();
            lp.add_column(e, int(i64::from(x == 7)));
        }
        for s in both(&lp) {
            let s = s.unwrap();
            assert_eq!(s.value, rat(1, 4));
            let by: Rational = s.dual.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
            assert_eq!(by, s.value);
        }
    }
}
