//! Greedy constructions: parity-check Gilbert–Varshamov codes, and arrays
//! whose derived bits never all equal 1.

use num_traits::Zero;

use super::{all_ones_mass, dual_and_strength, oa_distribution, GeneratorMatrix, OrthogonalArray};
use crate::caps::{self, caps};
use crate::dist::AtomicDistribution;
use crate::error::{Error, Result};
use crate::moments::{closed_m3, nc_lower_bound};
use crate::rational::{fmt_rational, is_prime, Rational};

/// Largest syndrome space scanned by the greedy search.
const MAX_SYNDROMES: u64 = 1 << 20;

/// Digits of `v` in base `q`, most significant (first row) first.
fn column(v: u64, q: u64, r: usize) -> Vec<u64> {
    (0..r).rev().map(|i| v / q.pow(i as u32) % q).collect()
}

fn add_scaled(a: u64, b: u64, c: u64, q: u64, r: usize) -> u64 {
    // a + c·b digitwise
    let mut out = 0;
    let mut place = 1;
    for _ in 0..r {
        out += (a / place % q + c * (b / place % q)) % q * place;
        place *= q;
    }
    out
}

/// Picks `n` columns of a parity-check matrix with `r` rows so that no
/// column is a combination of `d - 2` earlier ones; each pick is the
/// smallest admissible syndrome.
fn greedy_columns(q: u64, n: usize, d: usize, r: usize) -> Option<Vec<u64>> {
    let size = q.pow(r as u32);
    let depth = d.saturating_sub(2);
    // reach[j]: combinations of at most j chosen columns
    let mut reach = vec![vec![false; size as usize]; depth + 1];
    for level in reach.iter_mut() {
        level[0] = true;
    }
    let mut chosen = Vec::with_capacity(n);
    while chosen.len() < n {
        let c = (1..size).find(|&c| !reach[depth][c as usize])?;
        chosen.push(c);
        for j in (1..=depth).rev() {
            let from: Vec<u64> = (0..size).filter(|&v| reach[j - 1][v as usize]).collect();
            for v in from {
                for a in 1..q {
                    reach[j][add_scaled(v, c, a, q, r) as usize] = true;
                }
            }
        }
    }
    Some(chosen)
}

/// A code of length `n` and minimum distance at least `d` over GF(q), from
/// the smallest redundancy for which the greedy parity-check search
/// succeeds. Fails when the syndrome space outgrows the search limit.
pub fn gv_greedy(q: u64, n: usize, d: usize) -> Result<GeneratorMatrix> {
    if !is_prime(q) {
        return Err(Error::Unsupported(format!("prime field orders, got q = {q}")));
    }
    if n == 0 {
        return Err(Error::invalid("code length must be positive"));
    }
    if d <= 1 {
        return GeneratorMatrix::from_parity_check(q, n, &[]);
    }
    for r in 1..=n {
        if q.checked_pow(r as u32).is_none_or(|s| s > MAX_SYNDROMES) {
            break;
        }
        if let Some(cols) = greedy_columns(q, n, d, r) {
            let h: Vec<Vec<u64>> = (0..r)
                .map(|i| cols.iter().map(|&c| column(c, q, r)[i]).collect())
                .collect();
            return GeneratorMatrix::from_parity_check(q, n, &h);
        }
    }
    Err(Error::Exhausted(format!("no greedy [{n}, *, >={d}] code over GF({q}) within {MAX_SYNDROMES} syndromes")))
}

/// Result of [`nc_upper_construct`].
#[derive(Debug, Clone)]
pub struct NcConstruction {
    pub k: usize,
    pub q: u64,
    pub n: usize,
    pub array: OrthogonalArray,
    /// Per coordinate, the symbol sent to 0; every other symbol gives 1.
    pub zero_symbols: Vec<u64>,
    pub distribution: AtomicDistribution,
    /// Best all-ones mass reached at each length tried, from `k + 1` up.
    pub residuals: Vec<(usize, Rational)>,
}

/// Symbols sent to 0, chosen coordinate by coordinate to leave the fewest
/// rows that avoid every chosen symbol so far (ties: smallest symbol).
fn greedy_zeros(words: &[Vec<u64>], q: u64) -> (Vec<u64>, usize) {
    let n = words.first().map_or(0, Vec::len);
    let mut alive: Vec<&Vec<u64>> = words.iter().collect();
    let mut zeros = Vec::with_capacity(n);
    for i in 0..n {
        let z = (0..q).min_by_key(|&z| alive.iter().filter(|w| w[i] != z).count()).unwrap_or(0);
        alive.retain(|w| w[i] != z);
        zeros.push(z);
    }
    (zeros, alive.len())
}

/// Searches `n = k+1, k+2, ..` for a strength-`k` array over GF(q) (the
/// dual of a greedy code of distance `k + 1`) and a choice of zero symbols
/// that leaves no all-ones row. The marginal is `p = 1 - 1/q`. The found
/// `n` is checked against the lower bound on `n_c(k, p)`.
pub fn nc_upper_construct(k: usize, q: u64, max_n: Option<usize>) -> Result<NcConstruction> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let p = Rational::new((q - 1).into(), q.into());
    let cap = if q == 2 { caps().brute_binary_n } else { caps().brute_qary_n };
    let limit = max_n.unwrap_or(cap);
    caps::check("construction length", limit, cap)?;
    let bound = nc_lower_bound(k, &p)?;
    let mut residuals = Vec::new();
    for n in k + 1..=limit {
        let code = match gv_greedy(q, n, k + 1) {
            Ok(code) => code,
            Err(Error::Exhausted(_)) => break,
            Err(e) => return Err(e),
        };
        let array = dual_and_strength(&code)?;
        if array.strength < k {
            return Err(Error::verification(format!(
                "greedy array at n = {n} has strength {} < {k}",
                array.strength
            )));
        }
        let words = array.generator.codewords()?;
        let (zeros, alive) = greedy_zeros(&words, q);
        residuals.push((n, Rational::new(alive.into(), words.len().into())));
        if alive == 0 {
            if n < bound.ceiling {
                return Err(Error::verification(format!(
                    "zero all-ones mass at n = {n}, below the lower bound {}",
                    bound.ceiling
                )));
            }
            let one_map: Vec<Vec<u64>> = zeros.iter().map(|&z| (0..q).filter(|&s| s != z).collect()).collect();
            let distribution = oa_distribution(&array, &one_map)?;
            debug_assert!(all_ones_mass(&distribution).is_zero());
            return Ok(NcConstruction { k, q, n, array, zero_symbols: zeros, distribution, residuals });
        }
    }
    let best = residuals.iter().map(|(_, r)| r).min().cloned().unwrap_or_else(|| Rational::from_integer(1.into()));
    Err(Error::Exhausted(format!(
        "no length n <= {limit} reached zero all-ones mass; best residual {}",
        fmt_rational(&best)
    )))
}

/// One length in the linear-versus-general comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapRow {
    pub n: usize,
    /// Dimension `m` of the strength-3 array over GF(3).
    pub m: usize,
    /// All-ones mass of the array's bits at `p = 1/3`: at most `3^-m`.
    pub linear: Rational,
    /// The maximum over all 3-wise independent laws.
    pub general: Rational,
}

/// For each `n`, a greedy strength-3 array over GF(3) mapped to bits by
/// `{0} -> 1`, next to the exact maximum all-ones mass at `k = 3, p = 1/3`.
pub fn linear_gap_report(ns: &[usize]) -> Result<Vec<GapRow>> {
    let p = Rational::new(1.into(), 3.into());
    ns.iter()
        .map(|&n| {
            let array = dual_and_strength(&gv_greedy(3, n, 4)?)?;
            if array.strength < 3 {
                return Err(Error::verification(format!("array at n = {n} has strength {} < 3", array.strength)));
            }
            let bits = oa_distribution(&array, &[vec![0]])?;
            Ok(GapRow { n, m: array.generator.m(), linear: all_ones_mass(&bits), general: closed_m3(n, &p)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{independence_strength_definitional, xor_parity};
    use crate::moments::rao_bound;
    use crate::rational::{rat, uint};

    #[test]
    fn greedy_codes() {
        let even = gv_greedy(2, 5, 2).unwrap();
        assert_eq!(even.m(), 4);
        assert_eq!(even.min_distance().unwrap(), Some(2));
        let c = gv_greedy(2, 4, 3).unwrap();
        assert_eq!(c.m(), 1);
        assert!(c.min_distance().unwrap().unwrap() >= 3);
        for (q, n, d) in [(2, 7, 3), (2, 8, 4), (3, 6, 3), (3, 5, 4), (5, 4, 3)] {
            let g = gv_greedy(q, n, d).unwrap();
            assert!(g.min_distance().unwrap().is_none_or(|w| w >= d), "q={q} n={n} d={d}");
        }
        assert_eq!(gv_greedy(2, 7, 3).unwrap().m(), 4);
    }

    #[test]
    fn arrays_meet_rao() {
        for (q, n, k) in [(2, 6, 2), (2, 8, 4), (3, 5, 2), (3, 6, 2)] {
            let oa = dual_and_strength(&gv_greedy(q, n, k + 1).unwrap()).unwrap();
            assert!(oa.strength >= k);
            let d = oa.distribution().unwrap();
            assert!(independence_strength_definitional(&d).unwrap() >= k);
            assert!(uint(oa.rows()) >= rao_bound(n, k, q).unwrap());
        }
    }

    #[test]
    fn critical_constructions() {
        let c = nc_upper_construct(2, 2, None).unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.distribution, xor_parity(3, false).unwrap().with_claimed_strength(2));
        let t = nc_upper_construct(2, 3, None).unwrap();
        assert!(t.n >= nc_lower_bound(2, &rat(2, 3)).unwrap().ceiling);
        assert!(all_ones_mass(&t.distribution).is_zero());
        assert!(independence_strength_definitional(&t.distribution).unwrap() >= 2);
    }

    #[test]
    fn linear_arrays_fall_short() {
        for row in linear_gap_report(&[5, 6, 7]).unwrap() {
            assert!(row.linear <= Rational::new(1.into(), 3u64.pow(row.m as u32).into()));
            assert!(row.linear < row.general);
        }
    }
}
