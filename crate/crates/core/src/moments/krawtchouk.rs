//! Krawtchouk polynomials of the binomial law and the ρ functions built
//! from them.
//!
//! The normalized polynomials `P_m = K_m / sqrt(h_m)` are never formed;
//! every quantity uses `K_m^2 / h_m`, which is rational.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{binomial_q, in_open_unit, pow, uint, Rational};

/// `K_m(x) = sum_j (-1)^{m-j} C(n-x, m-j) C(x, j) p^{m-j} (1-p)^j` with
/// `E_{Bin(n,p)} K_l K_m = δ_{lm} h_m`, `h_m = C(n,m) (p(1-p))^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Krawtchouk {
    pub n: usize,
    pub p: Rational,
    pub m: usize,
    /// Power-basis coefficients, constant term first.
    pub coefficients: Vec<Rational>,
    pub norm: Rational,
}

impl Krawtchouk {
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coefficients.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

fn check(n: usize, p: &Rational, m: usize) -> Result<()> {
    if !in_open_unit(p) {
        return Err(Error::invalid("p must lie in (0,1)"));
    }
    if m > n {
        return Err(Error::invalid(format!("Krawtchouk degree {m} exceeds n = {n}")));
    }
    Ok(())
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `C(c + s x, j)` as a polynomial in `x`, for `s = ±1`.
fn binomial_poly(c: i64, s: i64, j: usize) -> Vec<Rational> {
    let mut out = vec![Rational::one()];
    for t in 0..j as i64 {
        out = poly_mul(&out, &[Rational::from_integer((c - t).into()), Rational::from_integer(s.into())]);
    }
    let fact: Rational = (1..=j).map(uint).product();
    out.into_iter().map(|v| v / &fact).collect()
}

pub fn krawtchouk(n: usize, p: &Rational, m: usize) -> Result<Krawtchouk> {
    check(n, p, m)?;
    let q = Rational::one() - p;
    let mut coefficients = vec![Rational::zero(); m + 1];
    for j in 0..=m {
        let sign = if (m - j) % 2 == 0 { Rational::one() } else { -Rational::one() };
        let scale = sign * pow(p, m - j) * pow(&q, j);
        let term = poly_mul(&binomial_poly(n as i64, -1, m - j), &binomial_poly(0, 1, j));
        for (i, c) in term.into_iter().enumerate() {
            coefficients[i] += &scale * c;
        }
    }
    let norm = binomial_q(n, m) * pow(&(p * &q), m);
    Ok(Krawtchouk { n, p: p.clone(), m, coefficients, norm })
}

/// `K_m(x)` at an integer point, straight from the defining sum.
pub fn krawtchouk_value(n: usize, p: &Rational, m: usize, x: usize) -> Rational {
    let q = Rational::one() - p;
    (0..=m)
        .filter(|&j| j <= x && m - j <= n.saturating_sub(x))
        .map(|j| {
            let v = binomial_q(n - x, m - j) * binomial_q(x, j) * pow(p, m - j) * pow(&q, j);
            if (m - j) % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .sum()
}

/// `ρ_m(x) = (sum_{j <= m} K_j(x)^2 / h_j)^{-1}`.
pub fn rho(n: usize, p: &Rational, m: usize, x: usize) -> Result<Rational> {
    check(n, p, m)?;
    if x > n {
        return Err(Error::invalid(format!("point {x} outside 0..={n}")));
    }
    let q = Rational::one() - p;
    let total: Rational = (0..=m)
        .map(|j| {
            let k = krawtchouk_value(n, p, j, x);
            &k * &k / (binomial_q(n, j) * pow(&(p * &q), j))
        })
        .sum();
    Ok(total.recip())
}
