//! Multilinear polynomials on the cube, and the compact dual polynomials
//! produced by the reduced linear programs.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::orbits::{block_counts, orbit_size, row_coefficient};
use crate::boolfn::BooleanFunction;
use crate::caps::{self, caps};
use crate::dist::subsets_of_size;
use crate::error::{Error, Result};
use crate::rational::{binomial_q, pow, Rational};

/// `sum_S c_S prod_{i in S} x_i`, monomials keyed by coordinate bitmask
/// (bit `i` is `X_{i+1}`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearPolynomial {
    n: usize,
    terms: BTreeMap<u64, Rational>,
}

impl MultilinearPolynomial {
    pub fn zero(n: usize) -> Self {
        MultilinearPolynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        MultilinearPolynomial::zero(n).with_term(0, c)
    }

    fn with_term(mut self, mask: u64, c: Rational) -> Self {
        if !c.is_zero() {
            self.terms.insert(mask, c);
        }
        self
    }

    /// Merges repeated monomials and drops zero coefficients.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (u64, Rational)>) -> Result<Self> {
        if n > 64 {
            return Err(Error::invalid("multilinear polynomials are limited to 64 variables"));
        }
        let mut map: BTreeMap<u64, Rational> = BTreeMap::new();
        for (mask, c) in terms {
            if n < 64 && mask >> n != 0 {
                return Err(Error::malformed(format!("monomial {mask:#b} uses a variable beyond X_{n}")));
            }
            *map.entry(mask).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(MultilinearPolynomial { n, terms: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<u64, Rational> {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> Rational {
        self.terms.iter().filter(|(m, _)| *m & !x == 0).map(|(_, c)| c).sum()
    }

    /// `E_{P_p}` of the polynomial: each monomial contributes `c p^|S|`.
    pub fn expectation(&self, p: &Rational) -> Rational {
        self.terms.iter().map(|(m, c)| c * pow(p, m.count_ones() as usize)).sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.n = self.n.max(o.n);
        for (m, c) in &o.terms {
            *out.terms.entry(*m).or_insert_with(Rational::zero) += c;
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (*m, c * k)).filter(|(_, c)| !c.is_zero()).collect();
        MultilinearPolynomial { n: self.n, terms }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rational::one()))
    }

    /// Product reduced by `x_i^2 = x_i`.
    pub fn mul(&self, o: &Self) -> Self {
        let mut terms: BTreeMap<u64, Rational> = BTreeMap::new();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                *terms.entry(a | b).or_insert_with(Rational::zero) += c * d;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MultilinearPolynomial { n: self.n.max(o.n), terms }
    }

    /// Renames `X_{i+1}` to `X_{i+1+offset}` in a space of `n` variables.
    pub fn shift(&self, offset: usize, n: usize) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m << offset, c.clone())).collect();
        MultilinearPolynomial { n, terms }
    }

    /// Values at every cube point, by a subset-sum transform.
    pub fn values_on_cube(&self) -> Result<Vec<Rational>> {
        caps::check("cube evaluation n", self.n, caps().table_n)?;
        let mut v = vec![Rational::zero(); 1 << self.n];
        for (m, c) in &self.terms {
            v[*m as usize] = c.clone();
        }
        for i in 0..self.n {
            let bit = 1usize << i;
            for x in 0..v.len() {
                if x & bit != 0 {
                    let lower = v[x ^ bit].clone();
                    v[x] += lower;
                }
            }
        }
        Ok(v)
    }

    /// The unique multilinear polynomial agreeing with `f` on the cube.
    pub fn extension_of(f: &BooleanFunction) -> Result<Self> {
        let n = f.n();
        caps::check("cube evaluation n", n, caps().table_n)?;
        let mut v: Vec<Rational> = (0..1u64 << n).map(|x| if f.eval_index(x) { Rational::one() } else { Rational::zero() }).collect();
        for i in 0..n {
            let bit = 1usize << i;
            for x in 0..v.len() {
                if x & bit != 0 {
                    let lower = v[x ^ bit].clone();
                    v[x] -= lower;
                }
            }
        }
        MultilinearPolynomial::from_terms(n, v.into_iter().enumerate().map(|(m, c)| (m as u64, c)))
    }
}

/// A dual solution read as a polynomial, in the basis its linear program
/// used. All forms evaluate pointwise and convert to multilinear form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualPolynomial {
    Multilinear(MultilinearPolynomial),
    /// `sum_j y_j C(S, j)` with `S` the number of ones; multilinear
    /// coefficient `y_j` on every monomial of degree `j`.
    Symmetric { n: usize, y: Vec<Rational> },
    /// Block-symmetric: `y_J` is spread evenly over the monomials whose
    /// per-block degrees form the multiset `J`.
    Blocks { m: usize, l: usize, y: Vec<(Vec<usize>, Rational)> },
}

impl DualPolynomial {
    pub fn n(&self) -> usize {
        match self {
            DualPolynomial::Multilinear(p) => p.n(),
            DualPolynomial::Symmetric { n, .. } => *n,
            DualPolynomial::Blocks { m, l, .. } => m * l,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            DualPolynomial::Multilinear(p) => p.degree(),
            DualPolynomial::Symmetric { y, .. } => y.iter().rposition(|c| !c.is_zero()).unwrap_or(0),
            DualPolynomial::Blocks { y, .. } => {
                y.iter().filter(|(_, c)| !c.is_zero()).map(|(j, _)| j.iter().sum()).max().unwrap_or(0)
            }
        }
    }

    pub fn expectation(&self, p: &Rational) -> Rational {
        match self {
            DualPolynomial::Multilinear(poly) => poly.expectation(p),
            DualPolynomial::Symmetric { n, y } => {
                y.iter().enumerate().map(|(j, c)| c * binomial_q(*n, j) * pow(p, j)).sum()
            }
            DualPolynomial::Blocks { y, .. } => y.iter().map(|(j, c)| c * pow(p, j.iter().sum())).sum(),
        }
    }

    /// Value at a point whose number of ones is `s`, when the polynomial
    /// depends only on that count.
    pub fn eval_count(&self, s: usize) -> Option<Rational> {
        match self {
            DualPolynomial::Symmetric { y, .. } => Some(y.iter().enumerate().map(|(j, c)| c * binomial_q(s, j)).sum()),
            DualPolynomial::Multilinear(p) if p.degree() == 0 => Some(p.eval(0)),
            _ => None,
        }
    }

    /// Value at a point with per-block counts `counts`, when the polynomial
    /// is invariant under the block symmetries.
    pub fn eval_block_counts(&self, counts: &[usize], l: usize) -> Option<Rational> {
        match self {
            DualPolynomial::Blocks { l: ll, y, .. } if *ll == l => {
                Some(y.iter().map(|(j, c)| c * row_coefficient(counts, j, l)).sum())
            }
            DualPolynomial::Multilinear(p) if p.degree() == 0 => Some(p.eval(0)),
            _ => None,
        }
    }

    pub fn eval(&self, x: u64) -> Rational {
        match self {
            DualPolynomial::Multilinear(p) => p.eval(x),
            DualPolynomial::Symmetric { .. } => self.eval_count(x.count_ones() as usize).expect("symmetric"),
            DualPolynomial::Blocks { m, l, .. } => {
                self.eval_block_counts(&block_counts(x, *m, *l), *l).expect("blocks")
            }
        }
    }

    pub fn to_multilinear(&self) -> Result<MultilinearPolynomial> {
        let n = self.n();
        match self {
            DualPolynomial::Multilinear(p) => Ok(p.clone()),
            DualPolynomial::Symmetric { y, .. } => {
                let mut terms = Vec::new();
                for (j, c) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    let subsets = subsets_of_size(n, j);
                    caps::check("monomial count", terms.len() + subsets.len(), caps().atoms)?;
                    terms.extend(subsets.into_iter().map(|s| (mask_of(&s), c.clone())));
                }
                MultilinearPolynomial::from_terms(n, terms)
            }
            DualPolynomial::Blocks { m, l, y } => {
                let coeff: BTreeMap<&Vec<usize>, Rational> =
                    y.iter().map(|(j, c)| (j, c / Rational::from_integer(orbit_size(j, *l)))).collect();
                let mut terms = Vec::new();
                for size in 0..=self.degree() {
                    let subsets = subsets_of_size(n, size);
                    caps::check("monomial count", terms.len() + subsets.len(), caps().atoms)?;
                    for s in subsets {
                        let mask = mask_of(&s);
                        let mut j = block_counts(mask, *m, *l);
                        j.sort_unstable();
                        if let Some(c) = coeff.get(&j) {
                            terms.push((mask, c.clone()));
                        }
                    }
                }
                MultilinearPolynomial::from_terms(n, terms)
            }
        }
    }
}

fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |acc, &i| acc | 1 << i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn extension_and_transform() {
        let maj = BooleanFunction::maj(3).unwrap();
        let p = MultilinearPolynomial::extension_of(&maj).unwrap();
        // maj3 = x1x2 + x1x3 + x2x3 - 2 x1x2x3
        assert_eq!(p.terms().len(), 4);
        assert_eq!(p.terms()[&0b111], int(-2));
        let values = p.values_on_cube().unwrap();
        for x in 0..8u64 {
            assert_eq!(values[x as usize], p.eval(x));
            assert_eq!(p.eval(x), if maj.eval_index(x) { int(1) } else { int(0) });
        }
        assert_eq!(p.expectation(&rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn symmetric_dual_expands() {
        let d = DualPolynomial::Symmetric { n: 4, y: vec![rat(1, 3), int(-1), rat(1, 2)] };
        let m = d.to_multilinear().unwrap();
        assert_eq!(m.terms().len(), 1 + 4 + 6);
        for x in 0..16u64 {
            assert_eq!(m.eval(x), d.eval(x));
        }
        assert_eq!(m.expectation(&rat(1, 3)), d.expectation(&rat(1, 3)));
        assert_eq!(d.degree(), 2);
    }

    #[test]
    fn block_dual_expands() {
        let d = DualPolynomial::Blocks { m: 2, l: 2, y: vec![(vec![0, 0], rat(1, 5)), (vec![0, 1], int(3)), (vec![1, 1], int(-2)), (vec![0, 2], rat(1, 7))] };
        let m = d.to_multilinear().unwrap();
        for x in 0..16u64 {
            assert_eq!(m.eval(x), d.eval(x), "x={x:b}");
        }
        assert_eq!(m.expectation(&rat(2, 3)), d.expectation(&rat(2, 3)));
    }

    #[test]
    fn arithmetic() {
        let x1 = MultilinearPolynomial::from_terms(2, [(1, int(1))]).unwrap();
        let one = MultilinearPolynomial::constant(2, int(1));
        let y = one.sub(&x1).mul(&x1);
        assert!(y.terms().is_empty());
        assert_eq!(x1.shift(1, 2).terms()[&2], int(1));
    }
}
