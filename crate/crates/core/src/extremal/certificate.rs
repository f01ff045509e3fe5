//! Sandwich certificates: pointwise verification, the certificate file
//! format, and composition through a block function.

use std::path::Path;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::orbits::multisets;
use super::poly::{DualPolynomial, MultilinearPolynomial};
use super::solve::{Direction, LpResult};
use crate::boolfn::BooleanFunction;
use crate::caps::{self, caps};
use crate::dist::format_word;
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, serde_rational, uint, Rational};

/// Polynomials `lower <= f <= upper` on the cube, both of degree `<= k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichCertificate {
    pub n: usize,
    pub k: usize,
    pub p: Rational,
    pub upper: DualPolynomial,
    pub lower: DualPolynomial,
}

impl SandwichCertificate {
    /// `E_{P_p}(upper - lower)`.
    pub fn gap(&self, p: &Rational) -> Rational {
        self.upper.expectation(p) - self.lower.expectation(p)
    }

    /// Combines the upper side of a max solve with the lower side of a min
    /// solve of the same instance.
    pub fn pair(max: &LpResult, min: &LpResult) -> Result<Self> {
        if max.direction != Direction::Max || min.direction != Direction::Min {
            return Err(Error::invalid("pair needs a max result and a min result"));
        }
        if (max.n, max.k, &max.p) != (min.n, min.k, &min.p) {
            return Err(Error::invalid("paired results solve different instances"));
        }
        Ok(SandwichCertificate { n: max.n, k: max.k, p: max.p.clone(), upper: max.bound.clone(), lower: min.bound.clone() })
    }
}

fn violation(side: &str, at: String, poly: &Rational, fx: bool) -> Error {
    let rel = if side == "upper" { "below" } else { "above" };
    Error::verification(format!(
        "{side} polynomial is {rel} f at {at}: P = {}, f = {}",
        fmt_rational(poly),
        u8::from(fx)
    ))
}

fn check(upper: &Rational, lower: &Rational, fx: bool, at: impl Fn() -> String) -> Result<()> {
    let v = if fx { Rational::one() } else { Rational::zero() };
    if *upper < v {
        return Err(violation("upper", at(), upper, fx));
    }
    if *lower > v {
        return Err(violation("lower", at(), lower, fx));
    }
    Ok(())
}

/// Checks `lower <= f <= upper` at every cube point and the degree bound,
/// and returns the gap `E_{P_p}(upper - lower)`.
///
/// Polynomials that depend only on the count of ones (or only on block
/// counts) are checked once per count (per count multiset) against a
/// symmetric (block-symmetric) `f`, which covers every point.
pub fn verify_certificate(c: &SandwichCertificate, f: &BooleanFunction, p: &Rational) -> Result<Rational> {
    let n = f.n();
    if c.upper.n() != n || c.lower.n() != n || c.n != n {
        return Err(Error::SizeMismatch { expected: n, got: c.n });
    }
    for (side, poly) in [("upper", &c.upper), ("lower", &c.lower)] {
        if poly.degree() > c.k {
            return Err(Error::verification(format!("{side} polynomial has degree {} > k = {}", poly.degree(), c.k)));
        }
    }
    let symmetric = f.profile().and_then(|prof| {
        let ok = c.upper.eval_count(0).is_some() && c.lower.eval_count(0).is_some();
        ok.then_some(prof)
    });
    let blocks = f.blocks().and_then(|b| {
        let inner = b.uniform_inner_profile()?;
        let outer = b.outer.profile()?;
        let zeros = vec![0; b.m];
        let ok = c.upper.eval_block_counts(&zeros, b.l).is_some() && c.lower.eval_block_counts(&zeros, b.l).is_some();
        ok.then_some((inner, outer, b.m, b.l))
    });
    if let Some(profile) = symmetric {
        for s in 0..=n {
            let (u, l) = (c.upper.eval_count(s).unwrap(), c.lower.eval_count(s).unwrap());
            let x = (1u64 << s) - 1;
            check(&u, &l, profile.at(s), || format!("x = {} (and every point with {s} ones)", format_word(x, n, 2)))?;
        }
    } else if let Some((inner, outer, m, l)) = blocks {
        for v in multisets(m, l, m * l) {
            let (u, lo) = (c.upper.eval_block_counts(&v, l).unwrap(), c.lower.eval_block_counts(&v, l).unwrap());
            let fx = outer.at(v.iter().filter(|&&x| inner.at(x)).count());
            let x = v.iter().enumerate().fold(0u64, |acc, (b, &c)| acc | ((1u64 << c) - 1) << (b * l));
            check(&u, &lo, fx, || format!("x = {} (and every point with block counts {v:?})", format_word(x, n, 2)))?;
        }
    } else {
        caps::check("cube evaluation n", n, caps().table_n)?;
        let values = |poly: &DualPolynomial| -> Result<Vec<Rational>> {
            match poly {
                DualPolynomial::Multilinear(m) => m.values_on_cube(),
                other => Ok((0..1u64 << n).map(|x| other.eval(x)).collect()),
            }
        };
        let (up, lo) = (values(&c.upper)?, values(&c.lower)?);
        for x in 0..1u64 << n {
            check(&up[x as usize], &lo[x as usize], f.eval_index(x), || format!("x = {}", format_word(x, n, 2)))?;
        }
    }
    let gap = c.gap(p);
    debug_assert!(!gap.is_negative());
    Ok(gap)
}

/// One monomial: 1-based indices of its variables `X_i`, and its coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub monomial: Vec<usize>,
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
}

/// `{"n", "k", "p", "direction", "value", "upper": [..], "lower": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub n: usize,
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub p: Rational,
    pub direction: String,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub upper: Vec<TermRecord>,
    pub lower: Vec<TermRecord>,
}

fn records(poly: &DualPolynomial) -> Result<Vec<TermRecord>> {
    let m = poly.to_multilinear()?;
    // degree first, then lexicographic by variable indices
    let mut out: Vec<TermRecord> = m
        .terms()
        .iter()
        .map(|(mask, c)| TermRecord {
            monomial: (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect(),
            coeff: c.clone(),
        })
        .collect();
    out.sort_by(|a, b| (a.monomial.len(), &a.monomial).cmp(&(b.monomial.len(), &b.monomial)));
    Ok(out)
}

fn from_records(n: usize, recs: &[TermRecord]) -> Result<MultilinearPolynomial> {
    let mut terms = Vec::with_capacity(recs.len());
    for (row, r) in recs.iter().enumerate() {
        let mut mask = 0u64;
        for &i in &r.monomial {
            if i == 0 || i > n {
                return Err(Error::malformed(format!("term row {row}: variable index {i} outside 1..={n}")));
            }
            mask |= 1 << (i - 1);
        }
        terms.push((mask, r.coeff.clone()));
    }
    MultilinearPolynomial::from_terms(n, terms)
}

impl CertificateFile {
    pub fn from_certificate(c: &SandwichCertificate, direction: &str, value: &Rational) -> Result<Self> {
        Ok(CertificateFile {
            n: c.n,
            k: c.k,
            p: c.p.clone(),
            direction: direction.to_string(),
            value: value.clone(),
            upper: records(&c.upper)?,
            lower: records(&c.lower)?,
        })
    }

    pub fn from_result(r: &LpResult) -> Result<Self> {
        CertificateFile::from_certificate(&r.certificate(), &r.direction.to_string(), &r.value)
    }

    pub fn to_certificate(&self) -> Result<SandwichCertificate> {
        Ok(SandwichCertificate {
            n: self.n,
            k: self.k,
            p: self.p.clone(),
            upper: DualPolynomial::Multilinear(from_records(self.n, &self.upper)?),
            lower: DualPolynomial::Multilinear(from_records(self.n, &self.lower)?),
        })
    }
}

pub fn read_certificate(path: &Path) -> Result<CertificateFile> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn write_certificate(file: &CertificateFile, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(file)? + "\n")?;
    Ok(())
}

/// Certificate for `f = g(h_1, .., h_m)` from certificates for the `h_i`,
/// requiring every component gap to be at most `1/(2m)`. The composed gap
/// is checked against `4m` times the largest component gap, and the result
/// is verified pointwise against `f`.
pub fn compose_certificate(
    g: &BooleanFunction,
    inner: &[BooleanFunction],
    certs: &[SandwichCertificate],
    p: &Rational,
) -> Result<SandwichCertificate> {
    let m = g.n();
    let eps = certs.iter().map(|c| c.gap(p)).max().unwrap_or_else(Rational::zero);
    if eps > uint(2 * m).recip() {
        return Err(Error::invalid(format!(
            "component gap {} exceeds 1/(2m) = 1/{}",
            fmt_rational(&eps),
            2 * m
        )));
    }
    let c = compose_certificate_unchecked(g, inner, certs, p)?;
    let gap = c.gap(p);
    if gap > uint(4 * m) * &eps {
        return Err(Error::verification(format!("composed gap {} exceeds 4m·eps", fmt_rational(&gap))));
    }
    Ok(c)
}

/// The same substitution without the gap hypothesis: each component
/// certificate and the composed one are still verified pointwise.
///
/// Upper side: `sum_{g(a)=1} prod_{a_i=1} P+_i prod_{a_j=0} (1 - P-_j)`.
/// Lower side: `1 - sum_{g(a)=0}` of the same products. Each factor bounds
/// a nonnegative indicator from above, so the products do too.
pub fn compose_certificate_unchecked(
    g: &BooleanFunction,
    inner: &[BooleanFunction],
    certs: &[SandwichCertificate],
    p: &Rational,
) -> Result<SandwichCertificate> {
    let m = g.n();
    if certs.len() != m || inner.len() != m {
        return Err(Error::SizeMismatch { expected: m, got: certs.len().min(inner.len()) });
    }
    caps::check("outer function n", m, caps().brute_binary_n)?;
    for (i, (c, h)) in certs.iter().zip(inner).enumerate() {
        verify_certificate(c, h, p).map_err(|e| Error::verification(format!("component {}: {e}", i + 1)))?;
    }
    let n: usize = certs.iter().map(|c| c.n).sum();
    if n > 64 {
        return Err(Error::invalid("composed certificates are limited to 64 variables"));
    }
    let one = MultilinearPolynomial::constant(n, Rational::one());
    let mut ups = Vec::with_capacity(m);
    let mut not_lows = Vec::with_capacity(m);
    let mut offset = 0;
    for c in certs {
        ups.push(c.upper.to_multilinear()?.shift(offset, n));
        not_lows.push(one.sub(&c.lower.to_multilinear()?.shift(offset, n)));
        offset += c.n;
    }
    let mut accept = MultilinearPolynomial::zero(n);
    let mut reject = MultilinearPolynomial::zero(n);
    for a in 0..1u64 << m {
        let prod = (0..m).fold(one.clone(), |acc, i| acc.mul(if a >> i & 1 == 1 { &ups[i] } else { &not_lows[i] }));
        if g.eval_index(a) {
            accept = accept.add(&prod);
        } else {
            reject = reject.add(&prod);
        }
    }
    let c = SandwichCertificate {
        n,
        k: certs.iter().map(|c| c.k).sum(),
        p: p.clone(),
        upper: DualPolynomial::Multilinear(accept),
        lower: DualPolynomial::Multilinear(one.sub(&reject)),
    };
    let f = BooleanFunction::compose(g, inner)?;
    verify_certificate(&c, &f, p)?;
    Ok(c)
}
