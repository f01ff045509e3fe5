//! Existence of a law on `[a, b]` with prescribed power moments, decided
//! by exact positive-semidefiniteness tests on Hankel matrices.

use num_traits::{Signed, Zero};

use super::MomentSequence;
use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

fn hankel(s: &[Rational], size: usize, shift: usize) -> Matrix {
    (0..size).map(|i| (0..size).map(|j| s[i + j + shift].clone()).collect()).collect()
}

/// `A(m) = (s_{i+j})_{i,j=0..m}`.
pub fn hankel_a(s: &MomentSequence, m: usize) -> Matrix {
    hankel(s.values(), m + 1, 0)
}

/// `B(m) = (s_{i+j+1})_{i,j=0..m}`.
pub fn hankel_b(s: &MomentSequence, m: usize) -> Matrix {
    hankel(s.values(), m + 1, 1)
}

/// `C(m) = (s_{i+j})_{i,j=1..m}`.
pub fn hankel_c(s: &MomentSequence, m: usize) -> Matrix {
    hankel(s.values(), m, 2)
}

fn combine(terms: &[(Rational, &Matrix)]) -> Matrix {
    let size = terms[0].1.len();
    (0..size)
        .map(|i| (0..size).map(|j| terms.iter().map(|(c, m)| c * &m[i][j]).sum()).collect())
        .collect()
}

/// Exact test by symmetric elimination: a negative pivot, or a zero pivot
/// with a nonzero remainder in its row, rules out semidefiniteness.
pub fn is_positive_semidefinite(m: &Matrix) -> bool {
    let mut a = m.clone();
    let n = a.len();
    for i in 0..n {
        let piv = a[i][i].clone();
        if piv.is_negative() {
            return false;
        }
        if piv.is_zero() {
            if (i + 1..n).any(|j| !a[i][j].is_zero() || !a[j][i].is_zero()) {
                return false;
            }
            continue;
        }
        for r in i + 1..n {
            if a[r][i].is_zero() {
                continue;
            }
            let f = &a[r][i] / &piv;
            for c in i..n {
                let v = &f * &a[i][c];
                a[r][c] -= v;
            }
        }
    }
    true
}

/// Does some law supported on the real interval `[a, b]` have power
/// moments `s_0..s_k`?
///
/// Odd `k = 2h+1`: `b A(h) ⪰ B(h) ⪰ a A(h)`. Even `k = 2h`: `A(h) ⪰ 0` and
/// `(a+b) B(h-1) ⪰ ab A(h-1) + C(h)`. Boundary (singular) cases count as
/// feasible. A one-point interval `a = b` admits only the point mass, so
/// the test is `s_j = a^j`.
pub fn hankel_feasible(s: &MomentSequence, a: &Rational, b: &Rational) -> Result<bool> {
    if a > b {
        return Err(Error::invalid("interval needs a <= b"));
    }
    if a == b {
        return Ok(s.values().iter().enumerate().all(|(j, v)| *v == crate::rational::pow(a, j)));
    }
    let k = s.k();
    let one = Rational::from_integer(1.into());
    if k % 2 == 1 {
        let h = (k - 1) / 2;
        let (am, bm) = (hankel_a(s, h), hankel_b(s, h));
        let upper = combine(&[(b.clone(), &am), (-one.clone(), &bm)]);
        let lower = combine(&[(one, &bm), (-a.clone(), &am)]);
        Ok(is_positive_semidefinite(&upper) && is_positive_semidefinite(&lower))
    } else {
        let h = k / 2;
        if !is_positive_semidefinite(&hankel_a(s, h)) {
            return Ok(false);
        }
        if h == 0 {
            return Ok(true);
        }
        let (am, bm, cm) = (hankel_a(s, h - 1), hankel_b(s, h - 1), hankel_c(s, h));
        let m = combine(&[(a + b, &bm), (-(a * b), &am), (-one, &cm)]);
        Ok(is_positive_semidefinite(&m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::binomial_moments;
    use crate::rational::{int, rat, uint};

    #[test]
    fn psd_tests() {
        assert!(is_positive_semidefinite(&vec![vec![int(1), int(1)], vec![int(1), int(1)]]));
        assert!(!is_positive_semidefinite(&vec![vec![int(0), int(1)], vec![int(1), int(0)]]));
        assert!(!is_positive_semidefinite(&vec![vec![int(1), int(2)], vec![int(2), int(1)]]));
        assert!(is_positive_semidefinite(&vec![vec![int(2), int(-1)], vec![int(-1), int(2)]]));
    }

    #[test]
    fn binomial_examples() {
        let s = binomial_moments(3, &rat(1, 2), 2).unwrap();
        assert!(hankel_feasible(&s, &int(0), &int(2)).unwrap());
        let t = binomial_moments(2, &rat(1, 2), 2).unwrap();
        assert!(!hankel_feasible(&t, &int(0), &int(1)).unwrap());
        // the binomial law itself lives on [0, n]
        for k in 1..=6 {
            let s = binomial_moments(5, &rat(2, 3), k).unwrap();
            assert!(hankel_feasible(&s, &int(0), &uint(5)).unwrap(), "k={k}");
        }
    }
}
