//! Exact rational helpers and certified enclosures of irrational constants.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn uint(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((whole, frac)) = t.split_once('.') {
        if !t.contains('/') {
            let neg = whole.starts_with('-');
            let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
            let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
                .map_err(|_| Error::malformed(format!("not a rational: `{s}`")))?;
            let den = num_traits::pow(BigInt::from(10u32), frac.len());
            let v = Rational::new(num, den);
            return Ok(if neg { -v } else { v });
        }
    }
    let v = Rational::from_str(t).map_err(|_| Error::malformed(format!("not a rational: `{s}`")))?;
    Ok(v)
}

pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

/// Decimal rendering for human-readable columns.
pub fn approx(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn pow(base: &Rational, exp: usize) -> Rational {
    num_traits::pow(base.clone(), exp)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn binomial_q(n: usize, k: usize) -> Rational {
    Rational::from_integer(binomial(n, k))
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `P(Bin(n, p) <= m)`.
pub fn binomial_cdf(n: usize, p: &Rational, m: usize) -> Rational {
    let q = Rational::one() - p;
    (0..=m.min(n))
        .map(|i| binomial_q(n, i) * pow(p, i) * pow(&q, n - i))
        .fold(Rational::zero(), |a, b| a + b)
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

pub fn in_open_unit(p: &Rational) -> bool {
    p.is_positive() && p < &Rational::one()
}

pub(crate) fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(prime, exponent)` when `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Closed rational interval `[lo, hi]` known to contain a real quantity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
}

/// Width used for every reported enclosure.
pub fn default_tolerance() -> Rational {
    rat(1, 1_000_000_000)
}

impl Enclosure {
    pub fn exact(v: Rational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure::new(lo, hi)
    }

    pub fn scale(&self, k: &Rational) -> Enclosure {
        self.mul(&Enclosure::exact(k.clone()))
    }

    /// Reciprocal of a strictly positive enclosure.
    pub fn recip(&self) -> Enclosure {
        assert!(self.lo.is_positive(), "reciprocal of a non-positive enclosure");
        Enclosure::new(self.hi.recip(), self.lo.recip())
    }

    pub fn div(&self, o: &Enclosure) -> Enclosure {
        self.mul(&o.recip())
    }

    /// Integer power of a nonnegative enclosure.
    pub fn powi(&self, e: usize) -> Enclosure {
        assert!(!self.lo.is_negative(), "powi of a possibly negative enclosure");
        Enclosure::new(pow(&self.lo, e), pow(&self.hi, e))
    }

    pub fn midpoint_f64(&self) -> f64 {
        approx(&((&self.lo + &self.hi) / int(2)))
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Evaluates `build(tol)` with shrinking tolerances until the result is no
/// wider than `target`.
pub fn refine(target: &Rational, mut build: impl FnMut(&Rational) -> Enclosure) -> Enclosure {
    let mut tol = target.clone();
    for _ in 0..64 {
        let e = build(&tol);
        if &e.width() <= target {
            return e;
        }
        tol /= int(1 << 10);
    }
    build(&tol)
}

fn pow2_at_least(x: &Rational) -> BigInt {
    // smallest power of two >= x (x > 0)
    let mut d = BigInt::one();
    while Rational::from_integer(d.clone()) < *x {
        d <<= 4;
    }
    d
}

/// Square root of a nonnegative rational, exact when the root is rational.
pub fn sqrt_enclosure(r: &Rational, tol: &Rational) -> Enclosure {
    assert!(!r.is_negative(), "square root of a negative rational");
    if let Some(s) = exact_sqrt(r) {
        return Enclosure::exact(s);
    }
    let d = pow2_at_least(&(int(4) / tol));
    let scaled = r * Rational::from_integer(&d * &d);
    let lo_n = isqrt(&floor(&scaled));
    let hi_n = isqrt(&(floor(&scaled) + 1u32)) + 1u32;
    let den = Rational::from_integer(d);
    Enclosure::new(Rational::from_integer(lo_n) / &den, Rational::from_integer(hi_n) / &den)
}

fn isqrt(v: &BigInt) -> BigInt {
    let u: BigUint = v.to_biguint().expect("nonnegative");
    BigInt::from(u.sqrt())
}

pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = isqrt(r.numer());
    let d = isqrt(r.denom());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// Euler's number.
pub fn e_enclosure(tol: &Rational) -> Enclosure {
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    let mut i = 0usize;
    loop {
        sum += &term;
        i += 1;
        term /= uint(i);
        // tail after this point is below 2 * term
        if term.clone() * int(2) <= *tol {
            return Enclosure::new(sum.clone(), sum + term * int(2));
        }
    }
}

/// Natural logarithm of a rational `x >= 1`.
pub fn ln_enclosure(x: &Rational, tol: &Rational) -> Enclosure {
    assert!(x >= &Rational::one(), "ln enclosure requires x >= 1");
    if x.is_one() {
        return Enclosure::exact(Rational::zero());
    }
    let t = (x - Rational::one()) / (x + Rational::one());
    let t2 = &t * &t;
    let tail_factor = (Rational::one() - &t2).recip();
    let mut sum = Rational::zero();
    let mut power = t.clone();
    let mut i = 0usize;
    loop {
        sum += &power / uint(2 * i + 1);
        power *= &t2;
        i += 1;
        let tail = int(2) * &power / uint(2 * i + 1) * &tail_factor;
        if tail <= *tol {
            let lo = int(2) * &sum;
            return Enclosure::new(lo.clone(), lo + tail);
        }
    }
}

/// Serde adapter writing rationals as `"a/b"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
