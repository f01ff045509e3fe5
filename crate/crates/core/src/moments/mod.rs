//! Moment-problem bounds and closed forms for extremal all-ones
//! probabilities, evaluated exactly.
//!
//! Irrational quantities (`e`, square roots, logarithms) are returned as
//! certified [`Enclosure`]s of width at most [`default_tolerance`]; callers
//! compare against the conservative end.

mod hankel;
mod krawtchouk;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use hankel::{hankel_a, hankel_b, hankel_c, hankel_feasible, is_positive_semidefinite, Matrix};
pub use krawtchouk::{krawtchouk, krawtchouk_value, rho, Krawtchouk};

use crate::error::{Error, Result};
use crate::rational::{
    binomial, binomial_cdf, binomial_q, ceil, default_tolerance, e_enclosure, factorial, floor, in_open_unit,
    is_prime, ln_enclosure, pow, prime_power, refine, sqrt_enclosure, uint, Enclosure, Rational,
};

/// Power moments `s_0 = 1, s_1, .., s_k` of an integer-valued law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSequence {
    s: Vec<Rational>,
}

impl MomentSequence {
    pub fn new(s: Vec<Rational>) -> Result<Self> {
        if s.first().map_or(true, |s0| !s0.is_one()) {
            return Err(Error::malformed("a moment sequence starts with s_0 = 1"));
        }
        Ok(MomentSequence { s })
    }

    /// Moments `0..=k` of the law `law[x] = P(X = x)`.
    pub fn of_law(law: &[Rational], k: usize) -> Result<Self> {
        let s = (0..=k)
            .map(|j| law.iter().enumerate().map(|(x, w)| w * pow(&uint(x), j)).sum())
            .collect();
        MomentSequence::new(s)
    }

    pub fn k(&self) -> usize {
        self.s.len() - 1
    }

    pub fn values(&self) -> &[Rational] {
        &self.s
    }
}

/// Stirling numbers of the second kind `S(j, i)` for `j, i <= k`.
fn stirling2(k: usize) -> Vec<Vec<BigInt>> {
    let mut t = vec![vec![BigInt::zero(); k + 1]; k + 1];
    t[0][0] = BigInt::one();
    for j in 1..=k {
        for i in 1..=j {
            t[j][i] = &t[j - 1][i] * i + &t[j - 1][i - 1];
        }
    }
    t
}

/// `E S^j` for `S ~ Bin(n, p)`, `j = 0..=k`, from the factorial moments
/// `E C(S, i) = C(n, i) p^i`.
pub fn binomial_moments(n: usize, p: &Rational, k: usize) -> Result<MomentSequence> {
    if !in_open_unit(p) {
        return Err(Error::invalid("p must lie in (0,1)"));
    }
    let st = stirling2(k);
    let falling: Vec<Rational> = (0..=k)
        .map(|i| Rational::from_integer(binomial(n, i) * factorial(i)) * pow(p, i))
        .collect();
    let s = (0..=k)
        .map(|j| (0..=j).map(|i| Rational::from_integer(st[j][i].clone()) * &falling[i]).sum())
        .collect();
    MomentSequence::new(s)
}

fn require_p(p: &Rational) -> Result<()> {
    if in_open_unit(p) {
        Ok(())
    } else {
        Err(Error::invalid("p must lie in (0,1)"))
    }
}

fn require_even(k: usize) -> Result<()> {
    if k % 2 == 1 {
        return Err(Error::invalid(format!("k = {k} must be even (round down to {})", k - 1)));
    }
    Ok(())
}

/// Upper bounds on the largest all-ones probability `M(n, k, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AndUpperBound {
    /// `p^n / P(Bin(n, 1-p) <= k/2)`.
    pub main: Rational,
    /// `2 sqrt(k) (kp / (2e(1-p)(n - k/2)))^{k/2}`, for `2 <= k < 2n`;
    /// its `hi` end is the usable bound.
    pub corollary: Option<Enclosure>,
    /// `10 p^n`, stated for `n(1-p) <= k/2`.
    pub ten_pn: Option<Rational>,
}

pub fn and_upper_bound(n: usize, k: usize, p: &Rational) -> Result<AndUpperBound> {
    require_p(p)?;
    require_even(k)?;
    let q = Rational::one() - p;
    let main = pow(p, n) / binomial_cdf(n, &q, k / 2);
    let half = uint(k) / uint(2);
    let corollary = (k >= 2 && uint(n) > half).then(|| {
        let base = uint(k) * p / (uint(2) * &q * (uint(n) - &half));
        refine(&default_tolerance(), |tol| {
            let inv_e = e_enclosure(tol).recip();
            let sqrt_k = sqrt_enclosure(&uint(k), tol);
            inv_e.scale(&base).powi(k / 2).mul(&sqrt_k).scale(&uint(2))
        })
    });
    let ten_pn = (uint(n) * &q <= half).then(|| uint(10) * pow(p, n));
    Ok(AndUpperBound { main, corollary, ten_pn })
}

/// `M(n, 2, p)` in closed form: with `M = floor((n-1)(1-p))` and `δ` the
/// fractional part, `p/(M+2) + (δ^2 - δ(1+p) + p)/((M+1)(M+2))`.
pub fn closed_m2(n: usize, p: &Rational) -> Result<Rational> {
    require_p(p)?;
    if n < 2 {
        return Err(Error::invalid("closed form for k = 2 needs n >= 2"));
    }
    let t = uint(n - 1) * (Rational::one() - p);
    let m = Rational::from_integer(floor(&t));
    let delta = &t - &m;
    let one = Rational::one();
    let two = uint(2);
    Ok(p / (&m + &two) + (&delta * &delta - &delta * (&one + p) + p) / ((&m + &one) * (&m + &two)))
}

/// `M(n, 3, p) = p M(n-1, 2, p)`.
pub fn closed_m3(n: usize, p: &Rational) -> Result<Rational> {
    if n < 3 {
        return Err(Error::invalid("closed form for k = 3 needs n >= 3"));
    }
    Ok(p * closed_m2(n - 1, p)?)
}

/// `M(n, k, p) = p^k` when `p <= 1/(n-1)`.
pub fn small_p_exact(n: usize, k: usize, p: &Rational) -> Result<Rational> {
    require_p(p)?;
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if n >= 2 && *p > Rational::new(1.into(), BigInt::from(n - 1)) {
        return Err(Error::invalid(format!("p = {p} exceeds 1/(n-1) = 1/{}", n - 1)));
    }
    Ok(pow(p, k))
}

/// Lower bound on `n_c(k, p)`: `k/(2(1-p)) + 1` for even `k`,
/// `(k+1)/(2(1-p))` for odd `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcLowerBound {
    pub value: Rational,
    pub ceiling: usize,
}

pub fn nc_lower_bound(k: usize, p: &Rational) -> Result<NcLowerBound> {
    require_p(p)?;
    if *p < Rational::new(1.into(), 2.into()) {
        return Err(Error::invalid("n_c is defined for p >= 1/2"));
    }
    let q2 = uint(2) * (Rational::one() - p);
    let value = if k % 2 == 0 { uint(k) / &q2 + Rational::one() } else { uint(k + 1) / &q2 };
    let ceiling = ceil(&value).to_usize().expect("small bound");
    Ok(NcLowerBound { value, ceiling })
}

/// Constant used in the `n_c` upper bound formula; the source leaves it
/// unspecified ("a large constant").
pub const DEFAULT_NC_CONSTANT: i64 = 10;

/// `C k/(1-p) ln(1/(1-p))`, defined when `1/(1-p)` is a prime power.
pub fn nc_upper_bound_formula(k: usize, p: &Rational, c: &Rational) -> Result<Enclosure> {
    require_p(p)?;
    let q = (Rational::one() - p).recip();
    let q_int = q.to_integer().to_u64().filter(|_| q.is_integer());
    if q_int.and_then(prime_power).is_none() {
        return Err(Error::invalid(format!("1/(1-p) = {q} is not a prime power")));
    }
    let scale = c * uint(k) * &q;
    Ok(refine(&default_tolerance(), |tol| ln_enclosure(&q, tol).scale(&scale)))
}

/// Rao bound `q^n P(Bin(n, 1-1/q) <= k/2)` on the number of rows of a
/// strength-`k` orthogonal array.
pub fn rao_bound(n: usize, k: usize, q: u64) -> Result<Rational> {
    require_even(k)?;
    if q < 2 {
        return Err(Error::invalid("q must be at least 2"));
    }
    let qr = Rational::from_integer(q.into());
    Ok(pow(&qr, n) * binomial_cdf(n, &(Rational::one() - qr.recip()), k / 2))
}

/// `sum_{i <= k/2} C(n, i)`: the binary Rao bound, and the reciprocal of
/// the largest possible atom of a law in `A(n, k, 1/2)`.
pub fn rao_sum(n: usize, k: usize) -> BigInt {
    (0..=(k / 2).min(n)).map(|i| binomial(n, i)).sum()
}

/// Lower bounds on `M(n, k, p)` from linear codes; each is reported only
/// where its hypotheses hold, otherwise with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLowerBounds {
    /// `p (p(k-1)/(en))^{k-1}` for `1/p` a prime power; `lo` is the usable bound.
    pub gv: std::result::Result<Enclosure, String>,
    /// `p (1/(n+1))^{(k-1)(1-p)}` for `1/p = q` prime, `k ≡ 1 (mod q)`,
    /// `n+1` a power of `q`; exact since the exponent is an integer.
    pub bch: std::result::Result<Rational, String>,
}

pub fn code_lower_bounds(n: usize, k: usize, p: &Rational) -> Result<CodeLowerBounds> {
    require_p(p)?;
    if k == 0 || n == 0 {
        return Err(Error::invalid("code bounds need n, k >= 1"));
    }
    let inv = p.recip();
    let q = inv.is_integer().then(|| inv.to_integer().to_u64()).flatten();
    let gv = match q.and_then(prime_power) {
        None => Err(format!("1/p = {inv} is not a prime power")),
        Some(_) => {
            let base = p * uint(k - 1) / uint(n);
            Ok(refine(&default_tolerance(), |tol| e_enclosure(tol).recip().scale(&base).powi(k - 1).scale(p)))
        }
    };
    let bch = match q {
        Some(q) if is_prime(q) => {
            let q_usize = q as usize;
            let mut power = 1usize;
            while power < n + 1 {
                power = power.saturating_mul(q_usize);
            }
            if (k - 1) % q_usize != 0 {
                Err(format!("k = {k} is not 1 mod {q}"))
            } else if power != n + 1 {
                Err(format!("n + 1 = {} is not a power of {q}", n + 1))
            } else {
                let e = (k - 1) / q_usize * (q_usize - 1);
                Ok(p * pow(&uint(n + 1).recip(), e))
            }
        }
        _ => Err(format!("1/p = {inv} is not a prime")),
    };
    Ok(CodeLowerBounds { gv, bch })
}

/// Which deviation bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationKind {
    /// `max |Q(Maj_n = 1) - 1/2| <= 2 sqrt(2) / sqrt(k)` over `A(n, k, 1/2)`.
    Majority,
    /// `ε^{Tribes}(k w, 1/2) <= 2 / (k/2)!` for tribes of width `w`.
    Tribes,
}

pub fn deviation_bound(kind: DeviationKind, k: usize) -> Result<Enclosure> {
    require_even(k)?;
    if k < 2 {
        return Err(Error::invalid("deviation bounds need k >= 2"));
    }
    Ok(match kind {
        DeviationKind::Majority => sqrt_enclosure(&(uint(8) / uint(k)), &default_tolerance()),
        DeviationKind::Tribes => Enclosure::exact(Rational::new(2.into(), factorial(k / 2))),
    })
}

/// `1/(3 sqrt(n))`, the stated lower bound on the majority deviation under
/// the even-parity law.
pub fn xor0_majority_lower(n: usize) -> Enclosure {
    sqrt_enclosure(&uint(9 * n).recip(), &default_tolerance())
}

/// Exact `|Q(Maj_n = 1) - 1/2|` under the even-parity law, `n` odd.
pub fn xor0_majority_deviation(n: usize) -> Result<Rational> {
    if n % 2 == 0 || n < 3 {
        return Err(Error::invalid("majority needs odd n >= 3"));
    }
    let total = Rational::from_integer(BigInt::one() << (n - 1));
    let win: Rational = (n / 2 + 1..=n).filter(|s| s % 2 == 0).map(|s| binomial_q(n, s)).sum::<Rational>() / total;
    Ok((win - Rational::new(1.into(), 2.into())).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn binomial_moment_values() {
        assert_eq!(binomial_moments(3, &rat(1, 2), 2).unwrap().values(), &[int(1), rat(3, 2), int(3)]);
        let b = binomial_moments(1, &rat(2, 7), 5).unwrap();
        assert!(b.values()[1..].iter().all(|v| *v == rat(2, 7)));
        let law: Vec<Rational> = (0..=6).map(|x| binomial_q(6, x) * pow(&rat(1, 3), x) * pow(&rat(2, 3), 6 - x)).collect();
        assert_eq!(binomial_moments(6, &rat(1, 3), 6).unwrap(), MomentSequence::of_law(&law, 6).unwrap());
    }

    #[test]
    fn upper_bound_examples() {
        assert_eq!(and_upper_bound(3, 2, &rat(1, 2)).unwrap().main, rat(1, 4));
        assert_eq!(and_upper_bound(4, 2, &rat(1, 2)).unwrap().main, rat(1, 5));
        assert_eq!(and_upper_bound(4, 2, &rat(1, 4)).unwrap().main, rat(1, 13));
        assert!(and_upper_bound(4, 3, &rat(1, 4)).is_err());
        let b = and_upper_bound(20, 4, &rat(1, 2)).unwrap();
        assert!(b.corollary.unwrap().hi >= b.main);
        // endpoint identity
        for n in 1..=8 {
            for m in 0..=n {
                let p = rat(1, 3);
                assert_eq!(rho(n, &p, m, n).unwrap(), pow(&p, n) / binomial_cdf(n, &(int(1) - &p), m));
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_m2(3, &rat(1, 2)).unwrap(), rat(1, 4));
        assert_eq!(closed_m2(2, &rat(1, 2)).unwrap(), rat(1, 4));
        assert_eq!(closed_m3(4, &rat(1, 2)).unwrap(), rat(1, 8));
        assert_eq!(closed_m2(10, &rat(1, 2)).unwrap(), rat(1, 12));
        assert_eq!(closed_m2(4, &rat(1, 2)).unwrap(), rat(1, 6));
        assert_eq!(closed_m2(12, &rat(1, 3)).unwrap(), rat(1, 27));
        assert_eq!(closed_m3(12, &rat(1, 2)).unwrap(), rat(1, 24));
        assert_eq!(small_p_exact(4, 2, &rat(1, 4)).unwrap(), rat(1, 16));
        assert_eq!(small_p_exact(5, 2, &rat(1, 5)).unwrap(), rat(1, 25));
        assert!(small_p_exact(5, 2, &rat(1, 3)).is_err());
    }

    #[test]
    fn nc_bounds() {
        assert_eq!(nc_lower_bound(2, &rat(1, 2)).unwrap().ceiling, 3);
        assert_eq!(nc_lower_bound(3, &rat(1, 2)).unwrap().ceiling, 4);
        assert_eq!(nc_lower_bound(2, &rat(2, 3)).unwrap().ceiling, 4);
        assert!(nc_lower_bound(2, &rat(1, 3)).is_err());
        let c = int(DEFAULT_NC_CONSTANT);
        let a = nc_upper_bound_formula(3, &rat(1, 2), &c).unwrap();
        let b = nc_upper_bound_formula(6, &rat(1, 2), &c).unwrap();
        assert!(b.lo <= a.hi.clone() * int(2) && a.lo.clone() * int(2) <= b.hi);
        assert!(nc_upper_bound_formula(2, &rat(5, 6), &c).is_err());
        for k in 1..=20 {
            for q in [2u64, 3, 4, 5, 7, 8, 9] {
                let p = int(1) - rat(1, q as i64);
                assert!(nc_upper_bound_formula(k, &p, &c).unwrap().lo >= nc_lower_bound(k, &p).unwrap().value);
            }
        }
    }

    #[test]
    fn rao_and_code_bounds() {
        assert_eq!(rao_bound(4, 2, 2).unwrap(), int(5));
        assert_eq!(rao_bound(5, 0, 3).unwrap(), int(1));
        for n in 1..=12 {
            for k in (0..=n).step_by(2) {
                assert_eq!(rao_bound(n, k, 2).unwrap(), Rational::from_integer(rao_sum(n, k)));
            }
        }
        let b = code_lower_bounds(8, 1, &rat(1, 2)).unwrap();
        assert_eq!(b.gv.unwrap(), Enclosure::exact(rat(1, 2)));
        let g = code_lower_bounds(8, 3, &rat(1, 2)).unwrap().gv.unwrap();
        let approx = 0.5 / (8.0 * std::f64::consts::E).powi(2);
        assert!((g.midpoint_f64() - approx).abs() < 1e-9 && g.width() <= default_tolerance());
        let later = code_lower_bounds(9, 3, &rat(1, 2)).unwrap().gv.unwrap();
        assert!(later.hi < g.lo);
        let bch = code_lower_bounds(7, 3, &rat(1, 2)).unwrap().bch.unwrap();
        assert_eq!(bch, rat(1, 16));
        assert!(code_lower_bounds(6, 3, &rat(1, 2)).unwrap().bch.is_err());
        assert!(code_lower_bounds(6, 3, &rat(2, 5)).unwrap().gv.is_err());
    }

    #[test]
    fn deviations() {
        assert_eq!(deviation_bound(DeviationKind::Majority, 8).unwrap(), Enclosure::exact(int(1)));
        assert_eq!(deviation_bound(DeviationKind::Majority, 32).unwrap(), Enclosure::exact(rat(1, 2)));
        assert_eq!(deviation_bound(DeviationKind::Tribes, 8).unwrap(), Enclosure::exact(rat(1, 12)));
        assert_eq!(xor0_majority_deviation(3).unwrap(), rat(1, 4));
        for n in [3usize, 5, 7, 9, 11] {
            assert!(xor0_majority_deviation(n).unwrap() >= xor0_majority_lower(n).hi);
        }
    }
}
