//! Counting helpers for block-symmetric laws: per-block counts, multisets
//! of counts, and orbit-averaged monomial expectations.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{binomial, binomial_q, factorial, Rational};

/// Number of ones in each block of `l` coordinates.
pub(crate) fn block_counts(x: u64, m: usize, l: usize) -> Vec<usize> {
    let mask = if l >= 64 { u64::MAX } else { (1u64 << l) - 1 };
    (0..m).map(|i| ((x >> (i * l)) & mask).count_ones() as usize).collect()
}

/// Nondecreasing sequences of length `m` over `0..=l` with sum at most
/// `max_sum`, in lexicographic order.
pub(crate) fn multisets(m: usize, l: usize, max_sum: usize) -> Vec<Vec<usize>> {
    fn go(m: usize, l: usize, budget: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in lo..=l {
            // every later entry is at least v
            if v * (m - cur.len()) > budget {
                break;
            }
            cur.push(v);
            go(m, l, budget - v, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, l, max_sum, 0, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Number of distinct orderings of a multiset.
pub(crate) fn arrangements(v: &[usize]) -> BigInt {
    let mut sorted = v.to_vec();
    sorted.sort_unstable();
    let mut denom = BigInt::one();
    let mut run = 1;
    for i in 1..=sorted.len() {
        if i < sorted.len() && sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    factorial(v.len()) / denom
}

/// Number of monomials whose per-block degrees form the multiset `j`.
pub(crate) fn orbit_size(j: &[usize], l: usize) -> BigInt {
    j.iter().fold(arrangements(j), |acc, &ji| acc * binomial(l, ji))
}

/// Probability that a uniformly chosen monomial with block-degree multiset
/// `j` is contained in a point whose block counts are `counts`; equivalently
/// the expectation of such a monomial under the uniform law on the orbit of
/// that point.
pub(crate) fn row_coefficient(counts: &[usize], j: &[usize], l: usize) -> Rational {
    let m = counts.len();
    let active: Vec<usize> = j.iter().copied().filter(|&v| v > 0).collect();
    if active.len() > m {
        return Rational::zero();
    }
    fn go(counts: &[usize], active: &[usize], l: usize, used: &mut Vec<bool>) -> Rational {
        let Some((&first, rest)) = active.split_first() else {
            return Rational::one();
        };
        let mut total = Rational::zero();
        for b in 0..counts.len() {
            if used[b] || counts[b] < first {
                continue;
            }
            used[b] = true;
            total += binomial_q(counts[b], first) / binomial_q(l, first) * go(counts, rest, l, used);
            used[b] = false;
        }
        total
    }
    let maps: BigInt = (m - active.len() + 1..=m).fold(BigInt::one(), |acc, v| acc * v);
    go(counts, &active, l, &mut vec![false; m]) / Rational::from_integer(maps)
}
