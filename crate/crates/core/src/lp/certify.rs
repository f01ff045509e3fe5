//! Exact solution of basis systems by p-adic lifting, and the exact
//! optimality and infeasibility checks built on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Basis, Scaled};
use crate::rational::{lcm_of_denominators, Rational};

const PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];
const MAX_LIFTS: usize = 4096;

/// A square basis matrix `B` (columns are basis variables) with its inverse
/// modulo a word-sized prime.
struct Factored<'a> {
    p: &'a Scaled,
    basis: &'a [usize],
    prime: u64,
    /// row-major `B^-1 mod prime`
    inv: Vec<u64>,
}

fn reduce(v: &BigInt, prime: u64) -> u64 {
    v.mod_floor(&BigInt::from(prime)).to_u64().unwrap()
}

fn pow_mod(mut a: u64, mut e: u64, prime: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % prime;
        }
        a = a * a % prime;
        e >>= 1;
    }
    r
}

impl<'a> Factored<'a> {
    fn new(p: &'a Scaled, basis: &'a [usize]) -> Option<Self> {
        PRIMES.iter().find_map(|&prime| Self::with_prime(p, basis, prime))
    }

    fn with_prime(p: &'a Scaled, basis: &'a [usize], prime: u64) -> Option<Self> {
        let m = p.m;
        let n = p.n();
        let mut a = vec![0u64; m * m];
        for (c, &j) in basis.iter().enumerate() {
            if j >= n {
                a[(j - n) * m + c] = 1;
            } else {
                p.columns[j].for_each(|r, v| a[r * m + c] = reduce(&v, prime));
            }
        }
        let mut inv = vec![0u64; m * m];
        for i in 0..m {
            inv[i * m + i] = 1;
        }
        for c in 0..m {
            let piv = (c..m).find(|&r| a[r * m + c] != 0)?;
            if piv != c {
                for k in 0..m {
                    a.swap(piv * m + k, c * m + k);
                    inv.swap(piv * m + k, c * m + k);
                }
            }
            let d = pow_mod(a[c * m + c], prime - 2, prime);
            for k in 0..m {
                a[c * m + k] = a[c * m + k] * d % prime;
                inv[c * m + k] = inv[c * m + k] * d % prime;
            }
            let (pivot_a, pivot_inv): (Vec<u64>, Vec<u64>) =
                (a[c * m..(c + 1) * m].to_vec(), inv[c * m..(c + 1) * m].to_vec());
            for r in 0..m {
                if r == c || a[r * m + c] == 0 {
                    continue;
                }
                let f = prime - a[r * m + c];
                for k in 0..m {
                    if pivot_a[k] != 0 {
                        a[r * m + k] = (a[r * m + k] + f * pivot_a[k]) % prime;
                    }
                    if pivot_inv[k] != 0 {
                        inv[r * m + k] = (inv[r * m + k] + f * pivot_inv[k]) % prime;
                    }
                }
            }
        }
        Some(Factored { p, basis, prime, inv })
    }

    /// Adds `sign * B x` (or `Bᵀ x`) into `acc`.
    fn apply(&self, x: &[i64], transpose: bool, acc: &mut [BigInt]) {
        let n = self.p.n();
        for (c, &j) in self.basis.iter().enumerate() {
            if j >= n {
                if transpose {
                    acc[c] -= x[j - n];
                } else {
                    acc[j - n] -= x[c];
                }
                continue;
            }
            if transpose {
                let mut s = BigInt::zero();
                self.p.columns[j].for_each(|r, v| {
                    if x[r] != 0 {
                        s += v * x[r];
                    }
                });
                acc[c] -= s;
            } else if x[c] != 0 {
                self.p.columns[j].for_each(|r, v| acc[r] -= v * x[c]);
            }
        }
    }

    /// Exact solution of `B z = v` (or `Bᵀ z = v`) for integral `v`.
    fn solve(&self, v: &[BigInt], transpose: bool) -> Option<Vec<Rational>> {
        let m = self.p.m;
        let prime = self.prime;
        let big_prime = BigInt::from(prime);
        let mut residual = v.to_vec();
        let mut acc = vec![BigInt::zero(); m];
        let mut modulus = BigInt::one();
        let mut next_attempt = 1;
        for lift in 1..=MAX_LIFTS {
            let r: Vec<u64> = residual.iter().map(|x| reduce(x, prime)).collect();
            let digit: Vec<i64> = (0..m)
                .map(|i| {
                    let mut s = 0u64;
                    for (k, &rk) in r.iter().enumerate() {
                        let e = if transpose { self.inv[k * m + i] } else { self.inv[i * m + k] };
                        if e != 0 && rk != 0 {
                            s = (s + e * rk) % prime;
                        }
                    }
                    if s > prime / 2 {
                        s as i64 - prime as i64
                    } else {
                        s as i64
                    }
                })
                .collect();
            for (a, &d) in acc.iter_mut().zip(&digit) {
                if d != 0 {
                    *a += &modulus * d;
                }
            }
            modulus *= &big_prime;
            self.apply(&digit, transpose, &mut residual);
            for x in residual.iter_mut() {
                let (q, rem) = x.div_rem(&big_prime);
                debug_assert!(rem.is_zero());
                *x = q;
            }
            if residual.iter().all(Zero::is_zero) {
                return Some(acc.into_iter().map(Rational::from_integer).collect());
            }
            if lift == next_attempt {
                next_attempt = (lift * 3 / 2).max(lift + 1);
                if let Some(z) = reconstruct(&acc, &modulus) {
                    if self.check(&z, v, transpose) {
                        return Some(z);
                    }
                }
            }
        }
        None
    }

    fn check(&self, z: &[Rational], v: &[BigInt], transpose: bool) -> bool {
        let den = lcm_of_denominators(z.iter());
        let num: Vec<BigInt> = z.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
        let n = self.p.n();
        let m = self.p.m;
        let mut lhs = vec![BigInt::zero(); m];
        for (c, &j) in self.basis.iter().enumerate() {
            if j >= n {
                if transpose {
                    lhs[c] += &num[j - n];
                } else {
                    lhs[j - n] += &num[c];
                }
            } else if transpose {
                lhs[c] += self.p.columns[j].dot_int(&num);
            } else if !num[c].is_zero() {
                self.p.columns[j].for_each(|r, a| lhs[r] += a * &num[c]);
            }
        }
        lhs.iter().zip(v).all(|(l, r)| *l == r * &den)
    }
}

/// Recovers rationals from residues modulo `modulus`, sharing a running
/// denominator across entries.
fn reconstruct(acc: &[BigInt], modulus: &BigInt) -> Option<Vec<Rational>> {
    let bound = (modulus / BigInt::from(2)).sqrt();
    let mut den = BigInt::one();
    let mut out = Vec::with_capacity(acc.len());
    for a in acc {
        let t = (a * &den).mod_floor(modulus);
        let (num, d) = rational_reconstruction(&t, modulus, &bound)?;
        den *= &d;
        out.push(Rational::new(num, den.clone()));
        if den > bound {
            return None;
        }
    }
    Some(out)
}

fn rational_reconstruction(t: &BigInt, modulus: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (modulus.clone(), t.clone());
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > *bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > *bound {
        return None;
    }
    if s1.is_negative() {
        Some((-r1, -s1))
    } else {
        Some((r1, s1))
    }
}

fn integral(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = lcm_of_denominators(values.iter());
    let v = values.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    (v, den)
}

/// Solves the basis exactly and accepts it if it is primal feasible and no
/// column has a positive reduced cost.
pub(super) fn optimal(p: &Scaled, basis: &[usize], pivots: usize) -> Option<Basis> {
    let n = p.n();
    let f = Factored::new(p, basis)?;
    let (b, b_den) = integral(&p.rhs);
    let xb: Vec<Rational> = f
        .solve(&b, false)?
        .into_iter()
        .map(|x| x / Rational::from_integer(b_den.clone()))
        .collect();
    let feasible = basis
        .iter()
        .zip(&xb)
        .all(|(&j, x)| if j >= n { x.is_zero() } else { !x.is_negative() });
    if !feasible {
        return None;
    }
    let cb: Vec<BigInt> = basis.iter().map(|&j| if j >= n { BigInt::zero() } else { p.cost[j].clone() }).collect();
    let y = f.solve(&cb, true)?;
    let (y_int, y_den) = integral(&y);
    let dual_feasible = (0..n).all(|j| &p.cost[j] * &y_den <= p.columns[j].dot_int(&y_int));
    if !dual_feasible {
        return None;
    }
    Some(Basis { basis: basis.to_vec(), xb, y, pivots })
}

/// Checks that the phase-one duals of `basis` form a Farkas certificate:
/// `Aᵀy >= 0` and `b·y < 0`.
pub(super) fn infeasible(p: &Scaled, basis: &[usize]) -> bool {
    let n = p.n();
    let Some(f) = Factored::new(p, basis) else {
        return false;
    };
    let cb: Vec<BigInt> = basis.iter().map(|&j| if j >= n { -BigInt::one() } else { BigInt::zero() }).collect();
    let Some(y) = f.solve(&cb, true) else {
        return false;
    };
    let (y_int, _) = integral(&y);
    let by: Rational = y.iter().zip(&p.rhs).map(|(a, b)| a * b).sum();
    by.is_negative() && (0..n).all(|j| !p.columns[j].dot_int(&y_int).is_negative())
}
