//! Extremal expectations over `k`-wise independent laws with marginal `p`,
//! their dual polynomials, sandwich certificates, and the quantities derived
//! from them: the approximation error `eps_f(k, p)`, the strength `k^f(eps, p)`
//! needed for a given error, and the critical size `n_c(k, p)` of AND.

mod certificate;
mod orbits;
mod poly;
mod solve;

use num_traits::{One, Zero};

pub use certificate::{
    compose_certificate, compose_certificate_unchecked, read_certificate, verify_certificate, write_certificate,
    CertificateFile, SandwichCertificate, TermRecord,
};
pub use poly::{DualPolynomial, MultilinearPolynomial};
pub use solve::{
    auto_method, solve, solve_block_symmetric, solve_full, solve_symmetric, BlockLaw, Direction, LpResult, Method,
    Witness,
};

use crate::boolfn::BooleanFunction;
use crate::caps::{self, caps};
use crate::error::{Error, Result};
use crate::moments::{binomial_moments, hankel_feasible, nc_lower_bound, NcLowerBound};
use crate::rational::{uint, Rational};

/// Both extremes of `E f` over the instance, plus the error they imply.
#[derive(Debug, Clone)]
pub struct EpsilonResult {
    pub max: LpResult,
    pub min: LpResult,
    pub epsilon: Rational,
}

impl EpsilonResult {
    pub fn certificate(&self) -> Result<SandwichCertificate> {
        SandwichCertificate::pair(&self.max, &self.min)
    }
}

/// `eps_f(k, p) = max E f - min E f` over `A(n, k, p)`.
pub fn epsilon(f: &BooleanFunction, k: usize, p: &Rational, method: Method) -> Result<EpsilonResult> {
    let max = solve(f, k, p, Direction::Max, method)?;
    let min = solve(f, k, p, Direction::Min, method)?;
    let epsilon = &max.value - &min.value;
    Ok(EpsilonResult { max, min, epsilon })
}

/// Least `k` with `eps_f(k, p) < eps`; `0` for `eps > 1` or constant `f`.
/// Strengths are scanned upward from 1; `k = n` always qualifies.
pub fn k_of_eps(f: &BooleanFunction, eps: &Rational, p: &Rational, method: Method) -> Result<usize> {
    if *eps <= Rational::zero() {
        return Err(Error::invalid("eps must be positive"));
    }
    if *eps > Rational::one() {
        return Ok(0);
    }
    if let Some(ones) = f.count_ones() {
        if ones == 0 || ones == 1u64 << f.n() {
            return Ok(0);
        }
    }
    for k in 1..f.n() {
        if epsilon(f, k, p, method)?.epsilon < *eps {
            return Ok(k);
        }
    }
    Ok(f.n())
}

/// One size in the critical-size scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcRow {
    pub n: usize,
    /// `min P(all ones)` over `A(n, k, p)`.
    pub min_value: Rational,
    /// Whether the binomial moments admit a law on the real interval
    /// `[0, n-1]` by the Hankel criterion.
    pub hankel_feasible: bool,
}

impl NcRow {
    /// The LP says a law with no all-ones mass exists exactly when the
    /// moment test on `[0, n-1]` does.
    pub fn consistent(&self) -> bool {
        self.hankel_feasible == self.min_value.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcScan {
    pub k: usize,
    pub p: Rational,
    /// Least `n` at which some `k`-wise independent law avoids all ones.
    pub n_c: usize,
    pub lower_bound: NcLowerBound,
    pub rows: Vec<NcRow>,
}

impl NcScan {
    pub fn hankel_consistent(&self) -> bool {
        self.rows.iter().all(NcRow::consistent)
    }
}

/// Scans `n = k+1, k+2, ..` until `min E AND_n` over `A(n, k, p)` is zero.
/// Requires `p >= 1/2`; stops with [`Error::Exhausted`] past `max_n`
/// (default: the symmetric LP cap).
pub fn nc_scan(k: usize, p: &Rational, max_n: Option<usize>) -> Result<NcScan> {
    let lower_bound = nc_lower_bound(k, p)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let limit = max_n.unwrap_or(caps().symmetric_n);
    caps::check("n_c scan limit", limit, caps().symmetric_n)?;
    let mut rows = Vec::new();
    for n in k + 1..=limit {
        let and = BooleanFunction::and(n)?;
        let min_value = solve_symmetric(&and, k, p, Direction::Min)?.value;
        let moments = binomial_moments(n, p, k)?;
        let hankel = hankel_feasible(&moments, &Rational::zero(), &uint(n - 1))?;
        let done = min_value.is_zero();
        rows.push(NcRow { n, min_value, hankel_feasible: hankel });
        if done {
            return Ok(NcScan { k, p: p.clone(), n_c: n, lower_bound, rows });
        }
    }
    Err(Error::Exhausted(format!("no zero minimum for n <= {limit}")))
}
