//! Boolean functions on `{0,1}^n`.
//!
//! Inputs are indexed by the integer whose bit `i` (least significant first)
//! is coordinate `X_{i+1}`. Bit strings written as text list `X_1` first, so
//! `"110"` is the index `0b011 = 3`.

mod fourier;
mod percolation;
mod spec;

use std::collections::BTreeMap;

pub use fourier::{fourier, fourier_mass_by_level, FourierSpectrum};
pub use percolation::{grid_has_crossing, grid_word, tree_path_count, tree_vertex_count, DisjointSet};
pub use spec::{parse_function_spec, read_truth_table, write_truth_table, TruthTableFile};

use crate::caps::{self, caps};
use crate::error::{Error, Result};

/// Values of a symmetric function indexed by the number of ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricProfile {
    values: Vec<bool>,
    monotone: bool,
}

impl SymmetricProfile {
    pub fn new(values: Vec<bool>) -> Self {
        let monotone = values.windows(2).all(|w| w[0] <= w[1]);
        SymmetricProfile { values, monotone }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn at(&self, ones: usize) -> bool {
        self.values[ones]
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }
}

/// `f = outer(inner_1, .., inner_m)` with block `i` owning coordinates
/// `i*l .. (i+1)*l` (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    pub m: usize,
    pub l: usize,
    pub inner: Vec<BooleanFunction>,
    pub outer: Box<BooleanFunction>,
}

impl BlockStructure {
    /// Shared symmetric profile of the inner functions, when they coincide.
    pub fn uniform_inner_profile(&self) -> Option<&SymmetricProfile> {
        let first = self.inner.first()?.profile()?;
        self.inner
            .iter()
            .all(|h| h.profile() == Some(first))
            .then_some(first)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Symmetry {
    None,
    Symmetric(SymmetricProfile),
    Blocks(BlockStructure),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    n: usize,
    table: Option<Vec<u64>>,
    symmetry: Symmetry,
    name: Option<String>,
}

fn pack(n: usize, mut bit: impl FnMut(u64) -> bool) -> Vec<u64> {
    let len = 1usize << n;
    let mut words = vec![0u64; len.div_ceil(64)];
    for x in 0..len as u64 {
        if bit(x) {
            words[(x >> 6) as usize] |= 1 << (x & 63);
        }
    }
    words
}

impl BooleanFunction {
    /// Builds a function from its full truth table (`table[x]` for input index `x`).
    pub fn from_table(n: usize, table: &[bool]) -> Result<Self> {
        caps::check("truth-table n", n, caps().table_n)?;
        if table.len() != 1usize << n {
            return Err(Error::SizeMismatch { expected: 1 << n, got: table.len() });
        }
        Ok(BooleanFunction {
            n,
            table: Some(pack(n, |x| table[x as usize])),
            symmetry: Symmetry::None,
            name: None,
        })
    }

    pub fn from_fn(n: usize, f: impl FnMut(u64) -> bool) -> Result<Self> {
        caps::check("truth-table n", n, caps().table_n)?;
        Ok(BooleanFunction { n, table: Some(pack(n, f)), symmetry: Symmetry::None, name: None })
    }

    /// A symmetric function given by `profile[s]` for `s` ones. The truth table
    /// is materialized only below the table cap.
    pub fn symmetric(profile: Vec<bool>) -> Result<Self> {
        if profile.is_empty() {
            return Err(Error::invalid("symmetric profile must have n+1 entries"));
        }
        let n = profile.len() - 1;
        caps::check("symmetric n", n, caps().symmetric_n)?;
        let table = (n <= caps().table_n).then(|| pack(n, |x| profile[x.count_ones() as usize]));
        Ok(BooleanFunction {
            n,
            table,
            symmetry: Symmetry::Symmetric(SymmetricProfile::new(profile)),
            name: None,
        })
    }

    fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn and(n: usize) -> Result<Self> {
        Ok(Self::symmetric((0..=n).map(|s| s == n).collect())?.named(format!("and:n={n}")))
    }

    pub fn or(n: usize) -> Result<Self> {
        Ok(Self::symmetric((0..=n).map(|s| s > 0).collect())?.named(format!("or:n={n}")))
    }

    pub fn parity(n: usize) -> Result<Self> {
        Ok(Self::symmetric((0..=n).map(|s| s % 2 == 1).collect())?.named(format!("parity:n={n}")))
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Ok(Self::symmetric(vec![value; n + 1])?.named(format!("const:n={n},v={}", value as u8)))
    }

    /// The one-bit identity.
    pub fn identity() -> Self {
        Self::symmetric(vec![false, true]).expect("one-bit profile").named("id")
    }

    pub fn maj(n: usize) -> Result<Self> {
        if n % 2 == 0 {
            return Err(Error::invalid(format!("majority needs odd n, got {n}")));
        }
        Ok(Self::symmetric((0..=n).map(|s| 2 * s > n).collect())?.named(format!("maj:n={n}")))
    }

    /// OR of `t` disjoint ANDs of width `w`.
    pub fn tribes(w: usize, t: usize) -> Result<Self> {
        if w == 0 || t == 0 {
            return Err(Error::invalid("tribes needs w, t >= 1"));
        }
        let inner = (0..t).map(|_| Self::and(w)).collect::<Result<Vec<_>>>()?;
        Ok(Self::compose(&Self::or(t)?, &inner)?.named(format!("tribes:w={w},t={t}")))
    }

    /// Majority of `m` majorities of `l` bits each.
    pub fn maj2(m: usize, l: usize) -> Result<Self> {
        let inner = (0..m).map(|_| Self::maj(l)).collect::<Result<Vec<_>>>()?;
        Ok(Self::compose(&Self::maj(m)?, &inner)?.named(format!("maj2:m={m},l={l}")))
    }

    /// Open top-to-bottom crossing of the `side x side` site grid (4-adjacency).
    /// Site `(row, col)` is coordinate `row * side + col`; a 1-bit is open.
    pub fn grid_crossing(side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::invalid("grid side must be >= 1"));
        }
        let n = side
            .checked_mul(side)
            .ok_or_else(|| Error::invalid("grid side overflows"))?;
        caps::check("truth-table n", n, caps().table_n)?;
        Ok(Self::from_fn(n, |x| grid_has_crossing(side, x))?.named(format!("grid:side={side}")))
    }

    /// Builds a member of a named family. Recognized families and parameters:
    /// `and|or|parity|maj` (`n`), `tribes` (`w`, `t`, or the preset `m` giving
    /// `w = m`, `t = 2^m`), `maj2` (`m`, optional `l` defaulting to `m`),
    /// `grid_crossing`/`grid` (`side`).
    pub fn make_named(family: &str, params: &BTreeMap<String, u64>) -> Result<Self> {
        let get = |key: &str| -> Result<usize> {
            params
                .get(key)
                .map(|&v| v as usize)
                .ok_or_else(|| Error::invalid(format!("{family} needs parameter `{key}`")))
        };
        match family {
            "and" => Self::and(get("n")?),
            "or" => Self::or(get("n")?),
            "parity" | "xor" => Self::parity(get("n")?),
            "maj" => Self::maj(get("n")?),
            "tribes" => {
                if let Ok(m) = get("m") {
                    if m >= 16 {
                        return Err(Error::invalid("tribes preset m too large"));
                    }
                    Self::tribes(m, 1 << m)
                } else {
                    Self::tribes(get("w")?, get("t")?)
                }
            }
            "maj2" => {
                let m = get("m")?;
                let l = get("l").unwrap_or(m);
                Self::maj2(m, l)
            }
            "grid" | "grid_crossing" => Self::grid_crossing(get("side")?),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    /// `outer(inner_1(x_block1), .., inner_m(x_blockm))` on disjoint blocks.
    pub fn compose(outer: &BooleanFunction, inner: &[BooleanFunction]) -> Result<Self> {
        if inner.len() != outer.n {
            return Err(Error::SizeMismatch { expected: outer.n, got: inner.len() });
        }
        let l = inner.first().map(|h| h.n).unwrap_or(0);
        if let Some(bad) = inner.iter().find(|h| h.n != l) {
            return Err(Error::SizeMismatch { expected: l, got: bad.n });
        }
        let m = outer.n;
        let n = m * l;
        let structure = BlockStructure {
            m,
            l,
            inner: inner.to_vec(),
            outer: Box::new(outer.clone()),
        };
        let mut f = BooleanFunction { n, table: None, symmetry: Symmetry::Blocks(structure), name: None };
        if n <= caps().table_n && n < 64 {
            let table = pack(n, |x| f.eval_index_structural(x));
            f.table = Some(table);
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.symmetry
    }

    pub fn profile(&self) -> Option<&SymmetricProfile> {
        match &self.symmetry {
            Symmetry::Symmetric(p) => Some(p),
            _ => None,
        }
    }

    pub fn blocks(&self) -> Option<&BlockStructure> {
        match &self.symmetry {
            Symmetry::Blocks(b) => Some(b),
            _ => None,
        }
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// Evaluates at the input index `x` (bit `i` = coordinate `X_{i+1}`).
    pub fn eval_index(&self, x: u64) -> bool {
        match &self.table {
            Some(t) => (t[(x >> 6) as usize] >> (x & 63)) & 1 == 1,
            None => self.eval_index_structural(x),
        }
    }

    fn eval_index_structural(&self, x: u64) -> bool {
        match &self.symmetry {
            Symmetry::Symmetric(p) => p.at(x.count_ones() as usize),
            Symmetry::Blocks(b) => {
                let mask = if b.l >= 64 { u64::MAX } else { (1u64 << b.l) - 1 };
                let y = b
                    .inner
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, h)| acc | ((h.eval_index((x >> (i * b.l)) & mask) as u64) << i));
                b.outer.eval_index(y)
            }
            Symmetry::None => unreachable!("functions without symmetry always carry a table"),
        }
    }

    /// Evaluates at a bit string listing `X_1` first.
    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, got: x.len() });
        }
        match &self.symmetry {
            Symmetry::Symmetric(p) => Ok(p.at(x.iter().filter(|&&b| b).count())),
            Symmetry::Blocks(b) if self.n > 63 => {
                let mut y = Vec::with_capacity(b.m);
                for (i, h) in b.inner.iter().enumerate() {
                    y.push(h.eval(&x[i * b.l..(i + 1) * b.l])?);
                }
                b.outer.eval(&y)
            }
            _ => Ok(self.eval_index(bits_to_index(x))),
        }
    }

    /// Iterates the full truth table; `None` above the table cap.
    pub fn table(&self) -> Option<Vec<bool>> {
        if self.n > caps().table_n || self.n >= 64 {
            return None;
        }
        Some((0..1u64 << self.n).map(|x| self.eval_index(x)).collect())
    }

    pub fn count_ones(&self) -> Option<u64> {
        if self.n > caps().table_n {
            return None;
        }
        Some((0..1u64 << self.n).filter(|&x| self.eval_index(x)).count() as u64)
    }

    /// Same truth table, ignoring symmetry descriptors and names.
    pub fn same_table(&self, other: &BooleanFunction) -> bool {
        self.n == other.n
            && self.n <= caps().table_n
            && (0..1u64 << self.n).all(|x| self.eval_index(x) == other.eval_index(x))
    }
}

pub fn bits_to_index(x: &[bool]) -> u64 {
    x.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
}

pub fn index_to_bits(n: usize, x: u64) -> Vec<bool> {
    (0..n).map(|i| (x >> i) & 1 == 1).collect()
}

/// Parses a text bit string such as `"0110"` (first character is `X_1`).
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::malformed(format!("bad bit `{other}`"))),
        })
        .collect()
}
