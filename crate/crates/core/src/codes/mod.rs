//! Linear codes over prime fields and the orthogonal arrays they give:
//! greedy Gilbert–Varshamov codes, dual codes with brute-force strength,
//! conversion to `k`-wise independent bits, and the greedy construction of
//! laws with no all-ones mass.

mod greedy;

use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use greedy::{gv_greedy, linear_gap_report, nc_upper_construct, GapRow, NcConstruction};

use crate::caps::{self, caps};
use crate::dist::{independence_strength_definitional, qary_to_binary, AtomicDistribution, Marginal};
use crate::error::{Error, Result};
use crate::rational::{is_prime, Rational};

fn inverse(a: u64, q: u64) -> u64 {
    // Fermat: a^(q-2) mod q
    let (mut base, mut exp, mut acc) = (a % q, q - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

/// Reduced row echelon form in place; returns the pivot columns.
fn row_reduce(rows: &mut Vec<Vec<u64>>, q: u64) -> Vec<usize> {
    let n = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(i) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, i);
        let inv = inverse(rows[r][c], q);
        for v in rows[r].iter_mut() {
            *v = *v * inv % q;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..n {
                    rows[i][j] = (rows[i][j] + (q - f) * rows[r][j]) % q;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : rows · x = 0}` over GF(q).
fn kernel(rows: &[Vec<u64>], n: usize, q: u64) -> Vec<Vec<u64>> {
    let mut reduced = rows.to_vec();
    let pivots = row_reduce(&mut reduced, q);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0; n];
            x[f] = 1;
            for (row, &pc) in reduced.iter().zip(&pivots) {
                x[pc] = (q - row[f]) % q;
            }
            x
        })
        .collect()
}

/// Generator matrix of a linear `[n, m]` code over the prime field GF(q);
/// rows are linearly independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    q: u64,
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl GeneratorMatrix {
    pub fn new(q: u64, n: usize, rows: Vec<Vec<u64>>) -> Result<Self> {
        if !is_prime(q) || q > 36 {
            return Err(Error::Unsupported(format!("a prime field of order at most 36, got q = {q}")));
        }
        if n == 0 {
            return Err(Error::invalid("code length must be positive"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::malformed(format!("generator row {i} has {} entries, expected {n}", row.len())));
            }
            if let Some(v) = row.iter().find(|&&v| v >= q) {
                return Err(Error::malformed(format!("generator row {i}: entry {v} not in GF({q})")));
            }
        }
        let mut reduced = rows.clone();
        if row_reduce(&mut reduced, q).len() != rows.len() {
            return Err(Error::malformed("generator rows are linearly dependent"));
        }
        Ok(GeneratorMatrix { q, n, rows })
    }

    /// Generator of the code `{x : h · x = 0}` for a parity-check matrix `h`.
    pub fn from_parity_check(q: u64, n: usize, h: &[Vec<u64>]) -> Result<Self> {
        GeneratorMatrix::new(q, n, kernel(h, n, q))
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `m`.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// All `q^m` codewords, in the order of their message vectors.
    pub fn codewords(&self) -> Result<Vec<Vec<u64>>> {
        let count = crate::dist::checked_pow(self.q as u32, self.m())?;
        caps::check("codeword count", count as usize, caps().atoms)?;
        let mut out = Vec::with_capacity(count as usize);
        for msg in 0..count {
            let mut word = vec![0; self.n];
            let mut rest = msg;
            for row in &self.rows {
                let c = rest % self.q;
                rest /= self.q;
                if c != 0 {
                    for (w, g) in word.iter_mut().zip(row) {
                        *w = (*w + c * g) % self.q;
                    }
                }
            }
            out.push(word);
        }
        Ok(out)
    }

    /// Minimum nonzero weight; `None` for the zero code.
    pub fn min_distance(&self) -> Result<Option<usize>> {
        Ok(self.codewords()?.iter().map(|w| w.iter().filter(|&&v| v != 0).count()).filter(|&w| w > 0).min())
    }

    /// The dual code `{y : x · y = 0 for every codeword x}`.
    pub fn dual(&self) -> Result<GeneratorMatrix> {
        GeneratorMatrix::new(self.q, self.n, kernel(&self.rows, self.n, self.q))
    }

    /// Canonical form (reduced row echelon), for comparing codes.
    pub fn canonical(&self) -> GeneratorMatrix {
        let mut rows = self.rows.clone();
        row_reduce(&mut rows, self.q);
        GeneratorMatrix { q: self.q, n: self.n, rows }
    }

    /// Uniform law on the codewords as a `q`-ary distribution. Needs every
    /// coordinate to be non-constant, i.e. uniform.
    pub fn codeword_distribution(&self, claimed_strength: usize) -> Result<AtomicDistribution> {
        let words = self.codewords()?;
        let mass = Rational::new(1.into(), (words.len() as u64).into());
        let q = self.q;
        let atoms = words.iter().map(|w| (w.iter().rev().fold(0u64, |acc, &v| acc * q + v), mass.clone()));
        AtomicDistribution::new(self.n, q as u32, atoms, Marginal::Uniform, claimed_strength)
    }
}

/// A linear orthogonal array: the codewords of `generator`, with a
/// brute-force verified strength.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    pub generator: GeneratorMatrix,
    pub strength: usize,
}

impl OrthogonalArray {
    pub fn levels(&self) -> u64 {
        self.generator.q()
    }

    pub fn rows(&self) -> usize {
        (self.levels() as usize).pow(self.generator.m() as u32)
    }

    /// Builds the array of `generator`'s codewords, verifying its strength.
    pub fn from_code(generator: GeneratorMatrix) -> Result<Self> {
        let n = generator.n();
        if generator.q() == 2 {
            caps::check("strength check n", n, caps().brute_binary_n)?;
        } else {
            caps::check("q-ary strength check n", n, caps().brute_qary_n)?;
        }
        let constant = (0..n).any(|j| generator.rows().iter().all(|row| row[j] == 0));
        let strength = if constant {
            0
        } else {
            independence_strength_definitional(&generator.codeword_distribution(0)?)?
        };
        Ok(OrthogonalArray { generator, strength })
    }

    /// Uniform law on the rows, as a `q`-ary distribution.
    pub fn distribution(&self) -> Result<AtomicDistribution> {
        if self.strength == 0 {
            return Err(Error::invalid("an array of strength 0 has a constant coordinate"));
        }
        self.generator.codeword_distribution(self.strength)
    }
}

/// The dual of `g` as an orthogonal array, with its strength (the minimum
/// distance of `g` minus one) found by brute force.
pub fn dual_and_strength(g: &GeneratorMatrix) -> Result<OrthogonalArray> {
    OrthogonalArray::from_code(g.dual()?)
}

/// Bits from a uniformly chosen row: coordinate `i` is 1 when its symbol
/// lies in `one_map[i]` (or in the single set given for all coordinates).
pub fn oa_distribution(oa: &OrthogonalArray, one_map: &[Vec<u64>]) -> Result<AtomicDistribution> {
    qary_to_binary(&oa.distribution()?, one_map)
}

/// `{"q", "n", "generator": [[ints]]}`; `n` may be omitted when the
/// generator has at least one row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub generator: Vec<Vec<u64>>,
}

impl CodeFile {
    pub fn from_generator(g: &GeneratorMatrix) -> Self {
        CodeFile { q: g.q(), n: Some(g.n()), generator: g.rows().to_vec() }
    }

    pub fn to_generator(&self) -> Result<GeneratorMatrix> {
        let n = match (self.n, self.generator.first()) {
            (Some(n), _) => n,
            (None, Some(row)) => row.len(),
            (None, None) => return Err(Error::malformed("an empty generator needs an explicit n")),
        };
        GeneratorMatrix::new(self.q, n, self.generator.clone())
    }
}

pub fn read_code(path: &Path) -> Result<GeneratorMatrix> {
    let file: CodeFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.to_generator()
}

pub fn write_code(g: &GeneratorMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&CodeFile::from_generator(g))? + "\n")?;
    Ok(())
}

/// Probability of the all-ones word.
pub(crate) fn all_ones_mass(d: &AtomicDistribution) -> Rational {
    let all = (1u64 << d.n()) - 1;
    d.atoms().get(&all).cloned().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::xor_parity;
    use crate::rational::rat;

    fn repetition(n: usize) -> GeneratorMatrix {
        GeneratorMatrix::new(2, n, vec![vec![1; n]]).unwrap()
    }

    #[test]
    fn duality() {
        let rep = repetition(4);
        let even = dual_and_strength(&rep).unwrap();
        assert_eq!(even.generator.m(), 3);
        assert_eq!(even.strength, 3);
        assert_eq!(even.generator.min_distance().unwrap(), Some(2));
        let back = dual_and_strength(&even.generator).unwrap();
        assert_eq!(back.generator.canonical(), rep.canonical());
        assert_eq!(back.strength, 1);
        let zero = GeneratorMatrix::new(2, 3, vec![]).unwrap();
        let full = dual_and_strength(&zero).unwrap();
        assert_eq!((full.generator.m(), full.strength), (3, 3));
        assert_eq!(OrthogonalArray::from_code(zero).unwrap().strength, 0);
    }

    #[test]
    fn arrays_to_bits() {
        let even = dual_and_strength(&repetition(4)).unwrap();
        let d = oa_distribution(&even, &[vec![0]]).unwrap();
        assert_eq!(d, xor_parity(4, false).unwrap().with_claimed_strength(3));
        let full = dual_and_strength(&GeneratorMatrix::new(2, 3, vec![]).unwrap()).unwrap();
        let bits = oa_distribution(&full, &[vec![1]]).unwrap();
        assert_eq!(bits, AtomicDistribution::product(3, &rat(1, 2)).unwrap());
        let ternary = dual_and_strength(&GeneratorMatrix::new(3, 4, vec![vec![1, 1, 1, 1], vec![0, 1, 2, 1]]).unwrap())
            .unwrap();
        let t = oa_distribution(&ternary, &[vec![0]]).unwrap();
        assert_eq!(t.p(), Some(&rat(1, 3)));
        assert!(independence_strength_definitional(&t).unwrap() >= ternary.strength);
    }

    #[test]
    fn validation_and_files() {
        assert!(GeneratorMatrix::new(4, 2, vec![vec![1, 1]]).is_err());
        assert!(GeneratorMatrix::new(2, 2, vec![vec![1, 1], vec![1, 1]]).is_err());
        let g = GeneratorMatrix::new(3, 3, vec![vec![1, 2, 0]]).unwrap();
        let text = serde_json::to_string(&CodeFile::from_generator(&g)).unwrap();
        let back: CodeFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_generator().unwrap(), g);
        let bare: CodeFile = serde_json::from_str(r#"{"q": 2, "generator": [[1, 0, 1]]}"#).unwrap();
        assert_eq!(bare.to_generator().unwrap().n(), 3);
    }
}
