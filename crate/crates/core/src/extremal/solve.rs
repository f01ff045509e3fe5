//! The extremal linear programs: all atoms, exchangeable laws, and
//! block-exchangeable laws.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::orbits::{arrangements, block_counts, multisets, row_coefficient};
use super::poly::{DualPolynomial, MultilinearPolynomial};
use super::SandwichCertificate;
use crate::boolfn::{BooleanFunction, SymmetricProfile};
use crate::caps::{self, caps};
use crate::dist::{expectation, subsets_of_size, AtomicDistribution, Marginal, SymmetricLaw};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpSolution};
use crate::rational::{binomial_q, in_open_unit, pow, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Max,
    Min,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Max => "max",
            Direction::Min => "min",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "max" => Ok(Direction::Max),
            "min" => Ok(Direction::Min),
            other => Err(Error::invalid(format!("direction must be max or min, got `{other}`"))),
        }
    }
}

/// Which linear program to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Block-symmetric when possible, else symmetric, else full.
    Auto,
    Full,
    Symmetric,
    Blocks,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Full => "full",
            Method::Symmetric => "symmetric",
            Method::Blocks => "blocks",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(Method::Auto),
            "full" => Ok(Method::Full),
            "symmetric" => Ok(Method::Symmetric),
            "blocks" => Ok(Method::Blocks),
            other => Err(Error::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// A block-exchangeable law: weight on each multiset of per-block counts,
/// spread evenly over the points with those counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLaw {
    pub m: usize,
    pub l: usize,
    pub p: Rational,
    /// Sorted count multisets with positive weight.
    pub weights: Vec<(Vec<usize>, Rational)>,
}

impl BlockLaw {
    pub fn expand(&self) -> Result<AtomicDistribution> {
        let n = self.m * self.l;
        caps::check("atom count", 1usize.checked_shl(n as u32).unwrap_or(usize::MAX), caps().atoms)?;
        let per_point: Vec<(Vec<usize>, Rational)> = self
            .weights
            .iter()
            .map(|(v, w)| {
                let points = v.iter().fold(arrangements(v), |acc, &c| acc * crate::rational::binomial(self.l, c));
                (v.clone(), w / Rational::from_integer(points))
            })
            .collect();
        let atoms = (0..1u64 << n).filter_map(|x| {
            let mut c = block_counts(x, self.m, self.l);
            c.sort_unstable();
            per_point.iter().find(|(v, _)| *v == c).map(|(_, w)| (x, w.clone()))
        });
        AtomicDistribution::new(n, 2, atoms, Marginal::Bernoulli(self.p.clone()), 0)
    }
}

/// Optimal law, in the form its linear program produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Atomic(AtomicDistribution),
    Symmetric(SymmetricLaw),
    Blocks(BlockLaw),
}

impl Witness {
    /// Materialized law with claimed strength `k`.
    pub fn to_atomic(&self, k: usize) -> Result<AtomicDistribution> {
        Ok(match self {
            Witness::Atomic(d) => d.clone(),
            Witness::Symmetric(s) => s.expand()?,
            Witness::Blocks(b) => b.expand()?,
        }
        .with_claimed_strength(k))
    }
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub n: usize,
    pub k: usize,
    pub p: Rational,
    pub direction: Direction,
    /// The method actually used.
    pub method: Method,
    pub value: Rational,
    pub witness: Witness,
    /// Dual polynomial: `>= f` pointwise for max, `<= f` for min, with
    /// expectation `value` under the product law.
    pub bound: DualPolynomial,
    pub pivots: usize,
}

impl LpResult {
    /// The one-sided sandwich certificate: the dual polynomial on its side
    /// and the trivial constant (1 above, 0 below) on the other.
    pub fn certificate(&self) -> SandwichCertificate {
        let n = self.n;
        let (upper, lower) = match self.direction {
            Direction::Max => (self.bound.clone(), DualPolynomial::Multilinear(MultilinearPolynomial::zero(n))),
            Direction::Min => {
                (DualPolynomial::Multilinear(MultilinearPolynomial::constant(n, Rational::one())), self.bound.clone())
            }
        };
        SandwichCertificate { n, k: self.k, p: self.p.clone(), upper, lower }
    }
}

fn check_params(n: usize, k: usize, p: &Rational) -> Result<()> {
    if !in_open_unit(p) {
        return Err(Error::invalid(format!("p = {p} must lie in (0,1)")));
    }
    if k == 0 {
        return Err(Error::invalid("k = 0 is rejected: marginals are part of A(n,k,p), so k >= 1"));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

fn run(lp: &LinearProgram, direction: Direction) -> Result<LpSolution> {
    let sol = match direction {
        Direction::Max => lp.solve_max(),
        Direction::Min => lp.solve_min(),
    };
    match sol {
        Err(Error::Infeasible) => Err(Error::verification(
            "moment system reported infeasible although the product law satisfies it",
        )),
        other => other,
    }
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

fn finish(
    f: &BooleanFunction,
    k: usize,
    p: &Rational,
    direction: Direction,
    method: Method,
    sol: LpSolution,
    witness: Witness,
    witness_value: Rational,
    bound: DualPolynomial,
) -> Result<LpResult> {
    if witness_value != sol.value {
        return Err(Error::verification(format!("witness gives {witness_value}, solver reported {}", sol.value)));
    }
    let dual_value = bound.expectation(p);
    if dual_value != sol.value {
        return Err(Error::verification(format!("dual bound {dual_value} differs from primal value {}", sol.value)));
    }
    Ok(LpResult { n: f.n(), k, p: p.clone(), direction, method, value: sol.value, witness, bound, pivots: sol.pivots })
}

/// Optimizes `Q(f = 1)` over `A(n, k, p)` with one variable per atom and
/// one row per monomial of degree `<= k`.
pub fn solve_full(f: &BooleanFunction, k: usize, p: &Rational, direction: Direction) -> Result<LpResult> {
    let n = f.n();
    check_params(n, k, p)?;
    caps::check("full LP n", n, caps().full_lp_n)?;
    let mut row_of = vec![usize::MAX; 1 << n];
    let mut masks = Vec::new();
    for size in 0..=k {
        for set in subsets_of_size(n, size) {
            let mask = set.iter().fold(0usize, |acc, &i| acc | 1 << i);
            row_of[mask] = masks.len();
            masks.push(mask as u64);
        }
    }
    let rhs = masks.iter().map(|m| pow(p, m.count_ones() as usize)).collect();
    let mut lp = LinearProgram::new(rhs);
    for x in 0..1usize << n {
        // rows are the monomials contained in x
        let mut entries = Vec::new();
        let mut sub = x;
        loop {
            if row_of[sub] != usize::MAX {
                entries.push((row_of[sub], Rational::one()));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & x;
        }
        entries.sort_unstable_by_key(|e| e.0);
        lp.add_column(entries, indicator(f.eval_index(x as u64)));
    }
    let sol = run(&lp, direction)?;
    let atoms = sol.primal.iter().map(|(x, q)| (*x as u64, q.clone()));
    let d = AtomicDistribution::new(n, 2, atoms, Marginal::Bernoulli(p.clone()), k)?;
    let value = expectation(&d, f)?;
    let poly = MultilinearPolynomial::from_terms(n, masks.iter().copied().zip(sol.dual.iter().cloned()))?;
    finish(f, k, p, direction, Method::Full, sol, Witness::Atomic(d), value, DualPolynomial::Multilinear(poly))
}

/// Optimizes over exchangeable laws, which suffices for symmetric `f`:
/// variables `q_s = Q(S = s)` and rows `sum_s q_s C(s, j) = C(n, j) p^j`.
pub fn solve_symmetric(f: &BooleanFunction, k: usize, p: &Rational, direction: Direction) -> Result<LpResult> {
    let profile = f.profile().ok_or_else(|| Error::Unsupported("a symmetric function".into()))?;
    let n = f.n();
    check_params(n, k, p)?;
    caps::check("symmetric LP n", n, caps().symmetric_n)?;
    let rhs = (0..=k).map(|j| binomial_q(n, j) * pow(p, j)).collect();
    let mut lp = LinearProgram::new(rhs);
    for s in 0..=n {
        let entries = (0..=k.min(s)).map(|j| (j, binomial_q(s, j))).collect();
        lp.add_column(entries, indicator(profile.at(s)));
    }
    let sol = run(&lp, direction)?;
    let mut q = vec![Rational::zero(); n + 1];
    for (s, v) in &sol.primal {
        q[*s] = v.clone();
    }
    let value = q.iter().enumerate().filter(|(s, _)| profile.at(*s)).map(|(_, v)| v).sum();
    let law = SymmetricLaw::new(q)?;
    let bound = DualPolynomial::Symmetric { n, y: sol.dual.clone() };
    finish(f, k, p, direction, Method::Symmetric, sol, Witness::Symmetric(law), value, bound)
}

/// `(inner profile, outer profile, m, l)` when `f` is a symmetric function
/// of identical symmetric block functions.
fn block_profiles(f: &BooleanFunction) -> Result<(&SymmetricProfile, &SymmetricProfile, usize, usize)> {
    let b = f.blocks().ok_or_else(|| Error::Unsupported("a block-structured function".into()))?;
    let inner = b
        .uniform_inner_profile()
        .ok_or_else(|| Error::Unsupported("identical symmetric inner functions".into()))?;
    let outer = b.outer.profile().ok_or_else(|| Error::Unsupported("a symmetric outer function".into()))?;
    Ok((inner, outer, b.m, b.l))
}

/// Optimizes over laws invariant under permutations inside blocks and
/// permutations of the blocks: one variable per multiset of block counts,
/// one row per multiset of block degrees of total degree `<= k`.
pub fn solve_block_symmetric(f: &BooleanFunction, k: usize, p: &Rational, direction: Direction) -> Result<LpResult> {
    let (inner, outer, m, l) = block_profiles(f)?;
    let n = f.n();
    check_params(n, k, p)?;
    let vars = multisets(m, l, m * l);
    caps::check("block orbit count", vars.len(), caps().orbits)?;
    let rows = multisets(m, l, k);
    let rhs = rows.iter().map(|j| pow(p, j.iter().sum())).collect();
    let mut lp = LinearProgram::new(rhs);
    for v in &vars {
        let entries = rows
            .iter()
            .enumerate()
            .map(|(r, j)| (r, row_coefficient(v, j, l)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let ones = v.iter().filter(|&&c| inner.at(c)).count();
        lp.add_column(entries, indicator(outer.at(ones)));
    }
    let sol = run(&lp, direction)?;
    let weights: Vec<(Vec<usize>, Rational)> = sol.primal.iter().map(|(i, w)| (vars[*i].clone(), w.clone())).collect();
    let value = weights
        .iter()
        .filter(|(v, _)| outer.at(v.iter().filter(|&&c| inner.at(c)).count()))
        .map(|(_, w)| w)
        .sum();
    let law = BlockLaw { m, l, p: p.clone(), weights };
    let bound = DualPolynomial::Blocks { m, l, y: rows.into_iter().zip(sol.dual.iter().cloned()).collect() };
    finish(f, k, p, direction, Method::Blocks, sol, Witness::Blocks(law), value, bound)
}

/// The cheapest sound method for `f`.
pub fn auto_method(f: &BooleanFunction) -> Method {
    if block_profiles(f).is_ok() {
        Method::Blocks
    } else if f.profile().is_some() {
        Method::Symmetric
    } else {
        Method::Full
    }
}

pub fn solve(f: &BooleanFunction, k: usize, p: &Rational, direction: Direction, method: Method) -> Result<LpResult> {
    match method {
        Method::Auto => solve(f, k, p, direction, auto_method(f)),
        Method::Full => solve_full(f, k, p, direction),
        Method::Symmetric => solve_symmetric(f, k, p, direction),
        Method::Blocks => solve_block_symmetric(f, k, p, direction),
    }
}
